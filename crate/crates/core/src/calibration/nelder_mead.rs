//! Downhill simplex minimiser (standard reflection, expansion, contraction
//! and shrink coefficients 1, 2, ½, ½).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    /// Stop when the largest vertex distance from the best vertex is below this.
    pub diameter_tol: f64,
    pub max_iterations: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            diameter_tol: 1e-6,
            max_iterations: 10_000,
            initial_step: 0.1,
        }
    }
}

/// Final simplex state.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub best: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub diameter: f64,
}

fn diameter(pts: &[Vec<f64>]) -> f64 {
    pts[1..]
        .iter()
        .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

fn combine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimises `f` from `start`.
pub fn nelder_mead<F>(f: F, start: &[f64], opts: NelderMead) -> Result<Simplex>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let dim = start.len();
    if dim == 0 {
        return Err(Error::invalid("start", "needs at least one coordinate"));
    }
    let mut pts = vec![start.to_vec()];
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += opts.initial_step;
        pts.push(p);
    }
    let mut vals = pts.iter().map(|p| f(p)).collect::<Result<Vec<f64>>>()?;
    let mut it = 0;
    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let d = diameter(&pts);
        if d < opts.diameter_tol {
            return Ok(Simplex {
                best: pts[0].clone(),
                value: vals[0],
                iterations: it,
                diameter: d,
            });
        }
        if it >= opts.max_iterations {
            return Err(Error::NonConvergence {
                what: "Nelder–Mead simplex".into(),
                iterations: it,
                partial: vals[0],
            });
        }
        it += 1;
        let mut centroid = vec![0.0; dim];
        for p in &pts[..dim] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let worst = pts[dim].clone();
        let refl = combine(&centroid, &worst, -1.0);
        let fr = f(&refl)?;
        if fr < vals[0] {
            let exp = combine(&centroid, &worst, -2.0);
            let fe = f(&exp)?;
            if fe < fr {
                pts[dim] = exp;
                vals[dim] = fe;
            } else {
                pts[dim] = refl;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = refl;
            vals[dim] = fr;
            continue;
        }
        let (cand, fc) = if fr < vals[dim] {
            let c = combine(&centroid, &refl, 0.5);
            let v = f(&c)?;
            (c, v)
        } else {
            let c = combine(&centroid, &worst, 0.5);
            let v = f(&c)?;
            (c, v)
        };
        if fc < vals[dim].min(fr) {
            pts[dim] = cand;
            vals[dim] = fc;
            continue;
        }
        for i in 1..=dim {
            pts[i] = combine(&pts[0], &pts[i], 0.5);
            vals[i] = f(&pts[i])?;
        }
    }
}
