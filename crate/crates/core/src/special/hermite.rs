//! Physicists' Hermite polynomials.

/// `H_n(x)` by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * x;
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// `[H_0(x), …, H_n(x)]`.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(2.0 * x);
    }
    for k in 1..n {
        let next = 2.0 * x * out[k] - 2.0 * k as f64 * out[k - 1];
        out.push(next);
    }
    out
}

/// `H_n(z)` for complex argument.
pub fn hermite_complex(n: usize, z: num_complex::Complex64) -> num_complex::Complex64 {
    let mut h0 = num_complex::Complex64::new(1.0, 0.0);
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * z;
    for k in 1..n {
        let h2 = 2.0 * z * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}
