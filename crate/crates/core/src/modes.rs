//! Normal modes of a linear ion chain and the dimensionless couplings between
//! ion excursions and the beam coordinates.
//!
//! Frame convention: `x` runs along the chain (axial), `y` along the beam
//! propagation (horizontal) and `z` is vertical. Mode vectors are
//! mass-weighted orthonormal columns, so the inverse of the mode matrix is its
//! transpose and the projection of mode `p` onto axis `α` at ion `i` is the
//! matrix entry at row `3i + α`, column `p`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::beam_optics::{Axis, BeamFramePoint, BeamGeometry};
use crate::constants::{ELEMENTARY_CHARGE, EPSILON_0, HBAR};
use crate::error::{Error, Result};

/// Dominant direction of a normal mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Axial,
    Horizontal,
    Vertical,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Axial, Direction::Horizontal, Direction::Vertical];

    /// Index of the dominant frame axis (x = 0, y = 1, z = 2).
    pub fn axis_index(self) -> usize {
        match self {
            Direction::Axial => 0,
            Direction::Horizontal => 1,
            Direction::Vertical => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Axial => "axial",
            Direction::Horizontal => "horizontal",
            Direction::Vertical => "vertical",
        }
    }
}

/// Ground-state position spread `√(ħ/2mω)` of a mode, m.
pub fn zero_point_spread(mass: f64, omega: f64) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::invalid("mass", "must be positive"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", "must be positive"));
    }
    Ok((HBAR / (2.0 * mass * omega)).sqrt())
}

/// Mean occupation at the Doppler cooling limit, `Γ/2ω`.
pub fn doppler_nbar(linewidth: f64, omega: f64) -> Result<f64> {
    if !(linewidth > 0.0 && omega > 0.0) {
        return Err(Error::invalid("linewidth/omega", "must be positive"));
    }
    Ok(linewidth / (2.0 * omega))
}

/// Projection of one mode onto the frame axes at a single ion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeProjection {
    /// Angular frequency, rad/s.
    pub frequency: f64,
    pub direction: Direction,
    /// `[ν^x, ν^y, ν^z]`.
    pub nu: [f64; 3],
}

/// All modes seen from one addressed ion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProjections {
    pub ions: usize,
    pub mass: f64,
    pub modes: Vec<ModeProjection>,
}

impl ModeProjections {
    pub fn zero_point_spreads(&self) -> Result<Vec<f64>> {
        self.modes
            .iter()
            .map(|m| zero_point_spread(self.mass, m.frequency))
            .collect()
    }

    pub fn indices(&self, direction: Direction) -> Vec<usize> {
        (0..self.modes.len())
            .filter(|&p| self.modes[p].direction == direction)
            .collect()
    }

    /// Mode set with worst-case alignment: every dominant projection equals
    /// `1/√N` and every off-dominant projection equals `ε/√N`.
    pub fn worst_case(
        ions: usize,
        mass: f64,
        epsilon: f64,
        axial: &[f64],
        horizontal: &[f64],
        vertical: &[f64],
    ) -> Result<Self> {
        if ions == 0 {
            return Err(Error::invalid("ions", "must be at least 1"));
        }
        let s = 1.0 / (ions as f64).sqrt();
        let mut modes = Vec::new();
        for (dir, freqs) in [
            (Direction::Axial, axial),
            (Direction::Horizontal, horizontal),
            (Direction::Vertical, vertical),
        ] {
            for &f in freqs {
                let mut nu = [epsilon * s; 3];
                nu[dir.axis_index()] = s;
                modes.push(ModeProjection {
                    frequency: f,
                    direction: dir,
                    nu,
                });
            }
        }
        Ok(Self { ions, mass, modes })
    }
}

/// Table I alignment bound `|ν_off-dominant| < ε/√N`, read per element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentError {
    pub epsilon: f64,
}

/// One off-dominant projection that exceeds the alignment bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentViolation {
    pub mode: usize,
    pub axis: usize,
    pub value: f64,
    pub bound: f64,
}

impl AlignmentError {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::invalid("epsilon", "must lie in [0, 1)"));
        }
        Ok(Self { epsilon })
    }

    pub fn check(&self, modes: &ModeProjections) -> std::result::Result<(), Vec<AlignmentViolation>> {
        let bound = self.epsilon / (modes.ions as f64).sqrt();
        let mut bad = Vec::new();
        for (p, m) in modes.modes.iter().enumerate() {
            for axis in 0..3 {
                if axis == m.direction.axis_index() {
                    continue;
                }
                // The bound is strict; allow rounding noise on an exactly saturated value.
                if m.nu[axis].abs() > bound * (1.0 + 1e-12) {
                    bad.push(AlignmentViolation {
                        mode: p,
                        axis,
                        value: m.nu[axis],
                        bound,
                    });
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }
}

/// Normal modes of a single-species linear chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainModes {
    pub ions: usize,
    pub mass: f64,
    /// Angular frequencies, rad/s, one per column of `mode_matrix`.
    pub frequencies: Vec<f64>,
    /// `3N × 3N`, rows `3i + α`, columns modes.
    pub mode_matrix: DMatrix<f64>,
    pub directions: Vec<Direction>,
    /// Equilibrium positions along the chain, m.
    pub positions: Vec<f64>,
}

impl ChainModes {
    /// Projections at ion `ion`.
    pub fn projections(&self, ion: usize) -> Result<ModeProjections> {
        if ion >= self.ions {
            return Err(Error::invalid("addressed_ion", format!("index {ion} outside chain of {}", self.ions)));
        }
        let modes = (0..self.frequencies.len())
            .map(|p| ModeProjection {
                frequency: self.frequencies[p],
                direction: self.directions[p],
                nu: [
                    self.mode_matrix[(3 * ion, p)],
                    self.mode_matrix[(3 * ion + 1, p)],
                    self.mode_matrix[(3 * ion + 2, p)],
                ],
            })
            .collect();
        Ok(ModeProjections {
            ions: self.ions,
            mass: self.mass,
            modes,
        })
    }

    /// Index of the centre-of-mass mode of a direction (all components equal).
    pub fn com_index(&self, direction: Direction) -> usize {
        let axis = direction.axis_index();
        let target = 1.0 / (self.ions as f64).sqrt();
        (0..self.frequencies.len())
            .filter(|&p| self.directions[p] == direction)
            .min_by(|&a, &b| {
                let da: f64 = (0..self.ions)
                    .map(|i| (self.mode_matrix[(3 * i + axis, a)].abs() - target).abs())
                    .sum();
                let db: f64 = (0..self.ions)
                    .map(|i| (self.mode_matrix[(3 * i + axis, b)].abs() - target).abs())
                    .sum();
                da.total_cmp(&db)
            })
            .expect("every direction has N modes")
    }

    /// Rotates the trap axes relative to the beam frame by `angle` about
    /// frame axis `about` (0 = x, 1 = y, 2 = z), then re-orthonormalises.
    pub fn rotated(&self, about: usize, angle: f64) -> Result<Self> {
        if about > 2 {
            return Err(Error::invalid("about", "axis index must be 0, 1 or 2"));
        }
        let (s, c) = angle.sin_cos();
        let (a, b) = match about {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        let mut m = self.mode_matrix.clone();
        for p in 0..m.ncols() {
            for i in 0..self.ions {
                let va = self.mode_matrix[(3 * i + a, p)];
                let vb = self.mode_matrix[(3 * i + b, p)];
                m[(3 * i + a, p)] = c * va - s * vb;
                m[(3 * i + b, p)] = s * va + c * vb;
            }
        }
        gram_schmidt(&mut m);
        Ok(Self {
            mode_matrix: m,
            ..self.clone()
        })
    }

    /// Largest deviation of `νᵀν` from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.mode_matrix.transpose() * &self.mode_matrix;
        let n = g.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - e).abs());
            }
        }
        worst
    }
}

fn gram_schmidt(m: &mut DMatrix<f64>) {
    let n = m.ncols();
    for j in 0..n {
        for k in 0..j {
            let d = m.column(k).dot(&m.column(j));
            let ck = m.column(k).clone_owned();
            let mut cj = m.column_mut(j);
            cj.axpy(-d, &ck, 1.0);
        }
        let norm = m.column(j).norm();
        m.column_mut(j).scale_mut(1.0 / norm);
    }
}

/// Length scale `(e²/(4πε₀ m ω²))^{1/3}` of a chain with axial COM frequency ω.
pub fn chain_length_scale(mass: f64, omega_axial: f64) -> f64 {
    (ELEMENTARY_CHARGE * ELEMENTARY_CHARGE
        / (4.0 * std::f64::consts::PI * EPSILON_0 * mass * omega_axial * omega_axial))
        .cbrt()
}

/// Dimensionless equilibrium positions of `n` ions, sorted ascending.
pub fn chain_equilibrium(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("ions", "must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let spacing = 2.018 / (n as f64).powf(0.559);
    let mut u: Vec<f64> = (0..n)
        .map(|i| (i as f64 - (n as f64 - 1.0) / 2.0) * spacing)
        .collect();
    let energy = |u: &[f64]| -> f64 {
        let mut e = 0.0;
        for i in 0..u.len() {
            e += 0.5 * u[i] * u[i];
            for j in i + 1..u.len() {
                e += 1.0 / (u[j] - u[i]).abs();
            }
        }
        e
    };
    for _ in 0..200 {
        let (g, h) = gradient_hessian(&u);
        let step = match h.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => -&g,
        };
        let e0 = energy(&u);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            if ordered && energy(&trial) <= e0 + 1e-14 * e0.abs() {
                let change = trial
                    .iter()
                    .zip(u.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let scale = u.iter().map(|x| x.abs()).fold(1.0, f64::max);
                u = trial;
                accepted = true;
                if change < 1e-12 * scale {
                    return Ok(u);
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // No descent possible at double precision: the gradient is already at noise level.
            let gmax = g.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            if gmax < 1e-10 {
                return Ok(u);
            }
            return Err(Error::NonConvergence {
                what: "chain equilibrium line search".into(),
                iterations: 0,
                partial: gmax,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "chain equilibrium".into(),
        iterations: 200,
        partial: u[0],
    })
}

fn gradient_hessian(u: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let n = u.len();
    let mut g = DVector::zeros(n);
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        g[i] = u[i];
        h[(i, i)] = 1.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = u[i] - u[j];
            let ad = d.abs();
            g[i] -= d / (ad * ad * ad);
            let c = 2.0 / (ad * ad * ad);
            h[(i, i)] += c;
            h[(i, j)] -= c;
        }
    }
    (g, h)
}

/// Solves the linear chain: equilibrium, then axial and both transverse mode sets.
///
/// Frequencies are angular (rad/s). Modes are ordered axial, horizontal,
/// vertical, each by ascending frequency.
pub fn chain_normal_modes(
    ions: usize,
    mass: f64,
    axial_com: f64,
    horizontal: f64,
    vertical: f64,
) -> Result<ChainModes> {
    for (name, v) in [
        ("mass", mass),
        ("axial_com", axial_com),
        ("horizontal", horizontal),
        ("vertical", vertical),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid(name, "must be positive"));
        }
    }
    if horizontal <= axial_com || vertical <= axial_com {
        return Err(Error::Unstable(
            "transverse frequencies must exceed the axial COM frequency".into(),
        ));
    }
    let u = chain_equilibrium(ions)?;
    let n = ions;
    let mut coupling = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = (u[i] - u[j]).abs();
                coupling[(i, j)] = 1.0 / (d * d * d);
            }
        }
    }
    let mut axial_h = DMatrix::zeros(n, n);
    for i in 0..n {
        axial_h[(i, i)] = 1.0;
        for j in 0..n {
            if i != j {
                axial_h[(i, i)] += 2.0 * coupling[(i, j)];
                axial_h[(i, j)] = -2.0 * coupling[(i, j)];
            }
        }
    }
    let transverse = |ratio: f64| -> DMatrix<f64> {
        let mut b = DMatrix::zeros(n, n);
        for i in 0..n {
            b[(i, i)] = ratio * ratio;
            for j in 0..n {
                if i != j {
                    b[(i, i)] -= coupling[(i, j)];
                    b[(i, j)] = coupling[(i, j)];
                }
            }
        }
        b
    };

    let mut frequencies = Vec::with_capacity(3 * n);
    let mut directions = Vec::with_capacity(3 * n);
    let mut mode_matrix = DMatrix::zeros(3 * n, 3 * n);
    let mut col = 0;
    for (dir, hess) in [
        (Direction::Axial, axial_h),
        (Direction::Horizontal, transverse(horizontal / axial_com)),
        (Direction::Vertical, transverse(vertical / axial_com)),
    ] {
        let eig = SymmetricEigen::new(hess);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for &k in &order {
            let ev = eig.eigenvalues[k];
            if ev <= 0.0 {
                return Err(Error::Unstable(format!(
                    "{} mode with non-positive curvature {ev:.3e} (zigzag transition)",
                    dir.label()
                )));
            }
            let mut v = eig.eigenvectors.column(k).clone_owned();
            let lead = (0..n)
                .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
                .unwrap_or(0);
            if v[lead] < 0.0 {
                v = -v;
            }
            for i in 0..n {
                mode_matrix[(3 * i + dir.axis_index(), col)] = v[i];
            }
            frequencies.push(axial_com * ev.sqrt());
            directions.push(dir);
            col += 1;
        }
    }
    let scale = chain_length_scale(mass, axial_com);
    Ok(ChainModes {
        ions,
        mass,
        frequencies,
        mode_matrix,
        directions,
        positions: u.iter().map(|x| x * scale).collect(),
    })
}

/// Dimensionless coupling data for one beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamCoupling {
    /// `γ⁽⁰⁾` for `[x, z]`.
    pub gamma0: [f64; 2],
    /// `λ⁽⁰⁾` for `[x, z]`.
    pub lambda0: [f64; 2],
    /// Equilibrium `y` in the beam frame, m.
    pub y_eq: f64,
    /// Per-mode coefficient of `β̂`.
    pub c_beta: Vec<f64>,
    /// Per-mode coefficients of `γ̂` for `[x, z]`.
    pub c_gamma: [Vec<f64>; 2],
    /// Per-mode coefficients of `λ̂` for `[x, z]`.
    pub c_lambda: [Vec<f64>; 2],
}

/// Couplings of both beams to every mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingParams {
    pub beams: [BeamCoupling; 2],
    pub frequencies: Vec<f64>,
    pub directions: Vec<Direction>,
    pub ions: usize,
}

fn axis_slot(axis: Axis) -> usize {
    match axis {
        Axis::X => 0,
        Axis::Z => 1,
    }
}

impl BeamCoupling {
    pub fn gamma0(&self, axis: Axis) -> f64 {
        self.gamma0[axis_slot(axis)]
    }
    pub fn lambda0(&self, axis: Axis) -> f64 {
        self.lambda0[axis_slot(axis)]
    }
    pub fn c_gamma(&self, axis: Axis) -> &[f64] {
        &self.c_gamma[axis_slot(axis)]
    }
    pub fn c_lambda(&self, axis: Axis) -> &[f64] {
        &self.c_lambda[axis_slot(axis)]
    }
}

impl CouplingParams {
    /// The same geometry with every mode coefficient set to zero.
    pub fn without_motion(&self) -> Self {
        let mut out = self.clone();
        for b in out.beams.iter_mut() {
            b.c_beta.iter_mut().for_each(|c| *c = 0.0);
            for v in b.c_gamma.iter_mut().chain(b.c_lambda.iter_mut()) {
                v.iter_mut().for_each(|c| *c = 0.0);
            }
        }
        out
    }
}

/// Largest `|λ⁽⁰⁾|` accepted; beyond this the expansion about the focus fails.
pub const LAMBDA0_LIMIT: f64 = 0.5;
/// `|λ⁽⁰⁾|` above which a warning is logged.
pub const LAMBDA0_WARN: f64 = 0.1;

/// Dimensionless offsets and per-mode coefficients for a beam pair.
///
/// `equilibrium[b]` is the ion position in the frame of beam `b`. The beam's
/// `propagation_sign` maps lab `y` projections into its own frame.
pub fn coupling_params(
    beams: &[BeamGeometry; 2],
    equilibrium: &[BeamFramePoint; 2],
    modes: &ModeProjections,
) -> Result<CouplingParams> {
    let zeta = modes.zero_point_spreads()?;
    let mut out: Vec<BeamCoupling> = Vec::with_capacity(2);
    for (b, (beam, eq)) in beams.iter().zip(equilibrium.iter()).enumerate() {
        beam.validate()?;
        let mut gamma0 = [0.0; 2];
        let mut lambda0 = [0.0; 2];
        for axis in Axis::BOTH {
            let s = axis_slot(axis);
            let transverse = match axis {
                Axis::X => eq.x,
                Axis::Z => eq.z,
            };
            gamma0[s] = transverse / beam.waist(axis);
            lambda0[s] = (eq.y - beam.focal_y(axis)) / beam.rayleigh_range(axis);
            if lambda0[s].abs() >= LAMBDA0_LIMIT {
                return Err(Error::invalid(
                    &format!("beam{}.lambda0_{}", b + 1, axis.label()),
                    format!("|λ⁽⁰⁾| = {:.3} lies outside the Rayleigh range regime", lambda0[s].abs()),
                ));
            }
            if lambda0[s].abs() > LAMBDA0_WARN {
                log::warn!(
                    "beam{} axis {}: |λ⁽⁰⁾| = {:.3} exceeds {LAMBDA0_WARN}",
                    b + 1,
                    axis.label(),
                    lambda0[s].abs()
                );
            }
        }
        let sign = beam.propagation_sign as f64;
        let k = beam.wavevector();
        let c_beta = modes
            .modes
            .iter()
            .zip(&zeta)
            .map(|(m, z)| k * z * sign * m.nu[1])
            .collect();
        let mut c_gamma: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        let mut c_lambda: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for axis in Axis::BOTH {
            let s = axis_slot(axis);
            let nu_idx = if axis == Axis::X { 0 } else { 2 };
            let w = beam.waist(axis);
            let yr = beam.rayleigh_range(axis);
            c_gamma[s] = modes.modes.iter().zip(&zeta).map(|(m, z)| z * m.nu[nu_idx] / w).collect();
            c_lambda[s] = modes
                .modes
                .iter()
                .zip(&zeta)
                .map(|(m, z)| z * sign * m.nu[1] / yr)
                .collect();
        }
        out.push(BeamCoupling {
            gamma0,
            lambda0,
            y_eq: eq.y,
            c_beta,
            c_gamma,
            c_lambda,
        });
    }
    let b2 = out.pop().expect("two beams");
    let b1 = out.pop().expect("two beams");
    Ok(CouplingParams {
        beams: [b1, b2],
        frequencies: modes.modes.iter().map(|m| m.frequency).collect(),
        directions: modes.modes.iter().map(|m| m.direction).collect(),
        ions: modes.ions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{hz_to_angular, YB171_MASS, YB_DOPPLER_LINEWIDTH};

    #[test]
    fn zero_point_spread_examples() {
        let z = zero_point_spread(YB171_MASS, hz_to_angular(153e3)).unwrap();
        assert!((z - 13.9e-9).abs() < 0.05e-9, "{z}");
        let z3 = zero_point_spread(YB171_MASS, hz_to_angular(3.0e6)).unwrap();
        assert!((z3 - 3.1e-9).abs() < 0.05e-9, "{z3}");
        let z4 = zero_point_spread(YB171_MASS, 4.0 * hz_to_angular(153e3)).unwrap();
        assert!((z4 / z - 0.5).abs() < 1e-15);
        assert!(zero_point_spread(YB171_MASS, 0.0).is_err());
        assert!(zero_point_spread(-1.0, 1.0).is_err());
    }

    #[test]
    fn doppler_examples() {
        let n = doppler_nbar(YB_DOPPLER_LINEWIDTH, hz_to_angular(153e3)).unwrap();
        assert!((n - 64.05).abs() < 0.01, "{n}");
        let n = doppler_nbar(YB_DOPPLER_LINEWIDTH, hz_to_angular(2.5e6)).unwrap();
        assert!((n - 3.92).abs() < 0.01, "{n}");
        assert_eq!(doppler_nbar(2.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn single_ion_modes_are_trap_frequencies() {
        let m = chain_normal_modes(1, YB171_MASS, 1.0, 3.0, 2.0).unwrap();
        assert_eq!(m.frequencies, vec![1.0, 3.0, 2.0]);
        assert_eq!(m.mode_matrix, DMatrix::identity(3, 3));
    }

    #[test]
    fn two_ion_axial_ratio() {
        let m = chain_normal_modes(2, YB171_MASS, 1.0, 10.0, 9.0).unwrap();
        assert!((m.frequencies[1] / m.frequencies[0] - 3f64.sqrt()).abs() < 1e-10);
        assert!((m.frequencies[0] - 1.0).abs() < 1e-12);
        assert!(m.orthonormality_error() < 1e-10);
        // Transverse rocking mode sits at √(ω_t² − ω_z²).
        assert!((m.frequencies[2] - (100.0f64 - 1.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn three_ion_equilibrium_is_known() {
        let u = chain_equilibrium(3).unwrap();
        let expect = (5.0f64 / 4.0).cbrt();
        assert!((u[2] - expect).abs() < 1e-12 && u[1].abs() < 1e-12);
    }

    #[test]
    fn twenty_five_ion_com() {
        let m = chain_normal_modes(25, YB171_MASS, 1.0, 20.3, 16.9).unwrap();
        let com = m.com_index(Direction::Axial);
        assert_eq!(com, 0);
        for i in 0..25 {
            assert!((m.mode_matrix[(3 * i, com)] - 0.2).abs() < 1e-9);
        }
        assert!(m.orthonormality_error() < 1e-10);
    }

    #[test]
    fn zigzag_is_reported() {
        let r = chain_normal_modes(25, YB171_MASS, 1.0, 3.0, 20.0);
        assert!(matches!(r, Err(Error::Unstable(_))));
    }

    #[test]
    fn rotation_keeps_orthonormality_and_leaks_projection() {
        let m = chain_normal_modes(5, YB171_MASS, 1.0, 12.0, 10.0).unwrap();
        let r = m.rotated(2, 0.01).unwrap();
        assert!(r.orthonormality_error() < 1e-12);
        let p = r.projections(2).unwrap();
        let com = p.modes[r.com_index(Direction::Axial)];
        assert!((com.nu[1] - 0.01f64.sin() / 5f64.sqrt()).abs() < 1e-9);
        let eps = AlignmentError::new(0.05).unwrap();
        assert!(eps.check(&p).is_ok());
        let big = m.rotated(2, 0.2).unwrap().projections(2).unwrap();
        assert!(eps.check(&big).is_err());
    }

    #[test]
    fn worst_case_set_saturates_table_one() {
        let p = ModeProjections::worst_case(4, YB171_MASS, 0.05, &[1.0], &[3.0], &[2.0]).unwrap();
        assert!(AlignmentError::new(0.05).unwrap().check(&p).is_ok());
        assert!(AlignmentError::new(0.04).unwrap().check(&p).is_err());
        assert_eq!(p.modes[0].nu, [0.5, 0.025, 0.025]);
    }

    fn single_mode(freq_hz: f64, nu: [f64; 3], dir: Direction) -> ModeProjections {
        ModeProjections {
            ions: 1,
            mass: YB171_MASS,
            modes: vec![ModeProjection {
                frequency: hz_to_angular(freq_hz),
                direction: dir,
                nu,
            }],
        }
    }

    fn beams() -> [BeamGeometry; 2] {
        let b = BeamGeometry::focused(1e-3, 355e-9, 1e-6, 5e-6);
        [b.clone(), b]
    }

    #[test]
    fn coupling_examples_against_table_two() {
        let eq = [BeamFramePoint::default(); 2];
        let c = coupling_params(&beams(), &eq, &single_mode(153e3, [1.0, 0.05, 0.05], Direction::Axial)).unwrap();
        assert!((c.beams[0].c_beta[0] - 1.24e-2).abs() < 0.02e-2, "{}", c.beams[0].c_beta[0]);
        let c = coupling_params(&beams(), &eq, &single_mode(150e3, [1.0, 0.05, 0.05], Direction::Axial)).unwrap();
        assert!((c.beams[0].c_gamma(Axis::X)[0] - 1.4e-2).abs() < 0.05e-2);
        let c = coupling_params(&beams(), &eq, &single_mode(3.0e6, [0.05, 1.0, 0.05], Direction::Horizontal)).unwrap();
        assert!((c.beams[0].c_beta[0] - 5.6e-2).abs() < 0.1e-2);
    }

    #[test]
    fn coupling_scales_with_inverse_root_frequency() {
        let eq = [BeamFramePoint::default(); 2];
        let nu = [0.3, 0.2, 0.1];
        let a = coupling_params(&beams(), &eq, &single_mode(200e3, nu, Direction::Axial)).unwrap();
        let b = coupling_params(&beams(), &eq, &single_mode(800e3, nu, Direction::Axial)).unwrap();
        let pairs = [
            (a.beams[0].c_beta[0], b.beams[0].c_beta[0]),
            (a.beams[0].c_gamma(Axis::X)[0], b.beams[0].c_gamma(Axis::X)[0]),
            (a.beams[0].c_gamma(Axis::Z)[0], b.beams[0].c_gamma(Axis::Z)[0]),
            (a.beams[0].c_lambda(Axis::X)[0], b.beams[0].c_lambda(Axis::X)[0]),
            (a.beams[0].c_lambda(Axis::Z)[0], b.beams[0].c_lambda(Axis::Z)[0]),
        ];
        for (x, y) in pairs {
            assert!((y / x - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn offsets_and_counter_propagation() {
        let mut bs = beams();
        bs[1].propagation_sign = -1;
        let yr = bs[0].rayleigh_range(Axis::X);
        let eq = [
            BeamFramePoint::new(0.1e-6, 0.05 * yr, 0.0),
            BeamFramePoint::new(0.0, 0.0, 0.0),
        ];
        let c = coupling_params(&bs, &eq, &single_mode(3e6, [0.0, 1.0, 0.0], Direction::Horizontal)).unwrap();
        assert!((c.beams[0].gamma0(Axis::X) - 0.1).abs() < 1e-12);
        assert!((c.beams[0].lambda0(Axis::X) - 0.05).abs() < 1e-12);
        assert_eq!(c.beams[0].c_beta[0], -c.beams[1].c_beta[0]);
        let far = [BeamFramePoint::new(0.0, 0.6 * yr, 0.0), BeamFramePoint::default()];
        assert!(coupling_params(&bs, &far, &single_mode(3e6, [0.0, 1.0, 0.0], Direction::Horizontal)).is_err());
    }
}
