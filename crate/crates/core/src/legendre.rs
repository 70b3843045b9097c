//! Gauss–Legendre quadrature and orthonormal associated Legendre functions.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], nodes in decreasing order
/// (so that `acos(x)` increases).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Legendre polynomials orthonormal on [-1, 1] and their x-derivatives,
/// `(p[l], dp[l])` for `l = 0..n`.
pub fn normalized_legendre(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n];
    let mut dp = vec![0.0; n];
    if n == 0 {
        return (p, dp);
    }
    // unnormalized recurrences for value and derivative
    let (mut a, mut b) = (1.0, 0.0); // P_l, P_{l-1}
    let (mut da, mut db) = (0.0, 0.0);
    for l in 0..n {
        let scale = ((2 * l + 1) as f64 / 2.0).sqrt();
        p[l] = a * scale;
        dp[l] = da * scale;
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * a - lf * b) / (lf + 1.0);
        let dnext = ((2.0 * lf + 1.0) * (a + x * da) - lf * db) / (lf + 1.0);
        b = a;
        a = next;
        db = da;
        da = dnext;
    }
    (p, dp)
}

/// Orthonormal associated Legendre functions for fixed order `m >= 0`:
/// returns `p[l - m]` for `l = m..=lmax`, normalized so that
/// `p_lm(cos t) e^{i m phi}` is a unit-sphere spherical harmonic
/// (Condon–Shortley phase included).
pub fn assoc_legendre(lmax: usize, m: usize, x: f64) -> Vec<f64> {
    if m > lmax {
        return Vec::new();
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    let mut out = Vec::with_capacity(lmax - m + 1);
    out.push(pmm);
    if lmax == m {
        return out;
    }
    let mf = m as f64;
    let mut prev = pmm;
    let mut cur = x * (2.0 * mf + 3.0).sqrt() * pmm;
    out.push(cur);
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// `(p_lm, d p_lm / d theta)` for `l = m..=lmax` at polar angle `theta`.
pub fn assoc_legendre_theta(lmax: usize, m: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let (s, x) = theta.sin_cos();
    let p = assoc_legendre(lmax, m, x);
    let mf = m as f64;
    let dp = p
        .iter()
        .enumerate()
        .map(|(i, &plm)| {
            let l = (m + i) as f64;
            let lower = if i == 0 { 0.0 } else { p[i - 1] };
            let c = ((2.0 * l + 1.0) * (l * l - mf * mf) / (2.0 * l - 1.0)).sqrt();
            (l * x * plm - c * lower) / s
        })
        .collect();
    (p, dp)
}

/// Unit-sphere spherical harmonic `Y_l^m(theta, phi)` for any integer `m`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> num_complex::Complex64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return num_complex::Complex64::new(0.0, 0.0);
    }
    let p = assoc_legendre(l, am, theta.cos())[l - am];
    let y = num_complex::Complex64::from_polar(p, am as f64 * phi);
    if m >= 0 {
        y
    } else if am.is_multiple_of(2) {
        y.conj()
    } else {
        -y.conj()
    }
}
