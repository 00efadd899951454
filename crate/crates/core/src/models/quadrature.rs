//! Tabulated oscillatory integrals for the 1/f^α transmon model.
//!
//! ```text
//! f_cos(x) = ∫₀^{x^α} cos(u^{1/α}) du = ∫₀^x α w^{α−1} cos(w) dw
//! f_sin(x) = ∫₀^{x^α} sin(u^{1/α}) du = ∫₀^x α w^{α−1} sin(w) dw
//! ```
//!
//! The substituted integrand has an integrable `w^{α−1}` singularity at the
//! origin for α < 1. The first table interval is split into panels graded
//! quadratically towards zero; every other interval is a single panel.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const GAUSS_ORDER: usize = 16;
const GRADED_PANELS: usize = 32;
/// Below this many table intervals the integrals are evaluated directly;
/// linear interpolation cannot follow the x^α cusp near the origin.
const DIRECT_INTERVALS: usize = 64;

/// Gauss–Legendre nodes and weights on [−1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut derivative = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn_1 = if n == 1 { 1.0 } else { p0 };
            derivative = n as f64 * (x * pn - pn_1) / (x * x - 1.0);
            let dx = pn / derivative;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

/// ∫ α w^{α−1} (cos w, sin w) dw over [a, b] with one Gauss panel.
fn panel(alpha: f64, a: f64, b: f64) -> (f64, f64) {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let (mut c, mut s) = (0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        let t = mid + half * x;
        let scale = w * alpha * t.powf(alpha - 1.0);
        let (sin, cos) = t.sin_cos();
        c += scale * cos;
        s += scale * sin;
    }
    (c * half, s * half)
}

/// Power series of the integrals over [0, h]; exact to rounding for h ≤ 1.
///
/// Term k is α h^α (h^k / k!) / (α + k) with sign + for k mod 4 ∈ {0, 1}
/// and − otherwise; even k feed the cosine integral, odd k the sine one.
fn near_origin(alpha: f64, h: f64) -> (f64, f64) {
    let scale = alpha * h.powf(alpha);
    let (mut c, mut s) = (0.0, 0.0);
    let mut power = 1.0;
    for k in 0..40 {
        let sign = if k % 4 < 2 { 1.0 } else { -1.0 };
        let term = sign * scale * power / (alpha + k as f64);
        if k % 2 == 0 {
            c += term;
        } else {
            s += term;
        }
        power *= h / (k + 1) as f64;
        if power < 1e-18 {
            break;
        }
    }
    (c, s)
}

/// ∫₀^x with panels graded as w_j = (j/J)² x; the innermost panel, which
/// holds the endpoint singularity, is integrated by series.
fn from_origin(alpha: f64, x: f64) -> (f64, f64) {
    let first = x / (GRADED_PANELS * GRADED_PANELS) as f64;
    let (mut c, mut s) = near_origin(alpha, first);
    let mut prev = first;
    for j in 2..=GRADED_PANELS {
        let r = j as f64 / GRADED_PANELS as f64;
        let edge = r * r * x;
        let (dc, ds) = panel(alpha, prev, edge);
        c += dc;
        s += ds;
        prev = edge;
    }
    (c, s)
}

/// f_cos and f_sin on a uniform grid over [0, x_max].
#[derive(Clone, Debug)]
pub struct TransmonTables {
    alpha: f64,
    step: f64,
    f_cos: Vec<f64>,
    f_sin: Vec<f64>,
}

impl TransmonTables {
    pub fn new(alpha: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidExponent { alpha, reason: "must be positive" });
        }
        if points < 2 || !(x_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature table needs x_max > 0 and at least 2 points (got {x_max}, {points})"
            )));
        }
        let step = x_max / (points - 1) as f64;
        let mut f_cos = Vec::with_capacity(points);
        let mut f_sin = Vec::with_capacity(points);
        f_cos.push(0.0);
        f_sin.push(0.0);
        let (c1, s1) = from_origin(alpha, step);
        f_cos.push(c1);
        f_sin.push(s1);
        let (mut c, mut s) = (c1, s1);
        for k in 2..points {
            let (dc, ds) = panel(alpha, (k - 1) as f64 * step, k as f64 * step);
            c += dc;
            s += ds;
            f_cos.push(c);
            f_sin.push(s);
        }
        Ok(TransmonTables { alpha, step, f_cos, f_sin })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x_max(&self) -> f64 {
        self.step * (self.f_cos.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.f_cos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f_cos.is_empty()
    }

    /// Tabulated (x_k, f_cos(x_k), f_sin(x_k)) nodes.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.f_cos
            .iter()
            .zip(&self.f_sin)
            .enumerate()
            .map(move |(k, (&c, &s))| (k as f64 * self.step, c, s))
    }

    /// (f_cos(x), f_sin(x)); `None` outside [0, x_max].
    pub fn lookup(&self, x: f64) -> Option<(f64, f64)> {
        let last = self.f_cos.len() - 1;
        let x_max = self.x_max();
        if !(x >= 0.0) || x > x_max * (1.0 + 1e-12) {
            return None;
        }
        if x == 0.0 {
            return Some((0.0, 0.0));
        }
        if x < DIRECT_INTERVALS as f64 * self.step {
            return Some(from_origin(self.alpha, x));
        }
        let pos = (x / self.step).min(last as f64);
        let k = (pos.floor() as usize).min(last - 1);
        let frac = pos - k as f64;
        let lerp = |v: &[f64]| v[k] + frac * (v[k + 1] - v[k]);
        Some((lerp(&self.f_cos), lerp(&self.f_sin)))
    }

    pub fn f_cos(&self, x: f64) -> Option<f64> {
        self.lookup(x).map(|(c, _)| c)
    }

    pub fn f_sin(&self, x: f64) -> Option<f64> {
        self.lookup(x).map(|(_, s)| s)
    }
}

/// Direct evaluation without a table, for arbitrary x ≥ 0.
#[cfg(test)]
pub(crate) fn direct(alpha: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    // Graded first panel, then unit-width panels.
    let first = x.min(1.0);
    let (mut c, mut s) = from_origin(alpha, first);
    let n = ((x - first) / 0.25).ceil() as usize;
    let width = if n > 0 { (x - first) / n as f64 } else { 0.0 };
    for k in 0..n {
        let (dc, ds) = panel(alpha, first + k as f64 * width, first + (k + 1) as f64 * width);
        c += dc;
        s += ds;
    }
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // mpmath adaptive quadrature of ∫₀^{x^0.9} cos/sin(u^{1/0.9}) du at 30 digits.
    const ORACLE_09: [(f64, f64, f64); 3] = [
        (1.0, 0.852_301_973_427_990_3, 0.436_471_503_163_896_5),
        (5.0, -0.585_627_572_820_087_5, 0.747_084_788_165_521_9),
        (10.0, -0.232_186_814_384_363_6, 1.552_958_196_441_513_7),
    ];

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(16);
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // ∫ x^30 over [−1, 1] = 2/31
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_abs_diff_eq!(v, 2.0 / 31.0, epsilon = 1e-14);
        let (x, w) = gauss_legendre(5);
        assert_abs_diff_eq!(x[4], (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w[2], 128.0 / 225.0, epsilon = 1e-15);
    }

    #[test]
    fn empty_range_is_zero() {
        let t = TransmonTables::new(0.9, 10.0, 1000).unwrap();
        assert_eq!(t.lookup(0.0), Some((0.0, 0.0)));
    }

    #[test]
    fn alpha_one_matches_closed_form_on_every_node() {
        let t = TransmonTables::new(1.0, 2.0 * std::f64::consts::PI * 5.0, 100_001).unwrap();
        for (x, c, s) in t.nodes() {
            assert_abs_diff_eq!(c, x.sin(), epsilon = 1e-6);
            assert_abs_diff_eq!(s, 1.0 - x.cos(), epsilon = 1e-6);
        }
    }

    #[test]
    fn alpha_point_nine_matches_adaptive_oracle() {
        let t = TransmonTables::new(0.9, 2.0 * std::f64::consts::PI * 5.0, 100_001).unwrap();
        for (x, c, s) in ORACLE_09 {
            let (tc, ts) = t.lookup(x).unwrap();
            assert_abs_diff_eq!(tc, c, epsilon = 1e-6);
            assert_abs_diff_eq!(ts, s, epsilon = 1e-6);
            let (dc, ds) = direct(0.9, x);
            assert_abs_diff_eq!(dc, c, epsilon = 1e-9);
            assert_abs_diff_eq!(ds, s, epsilon = 1e-9);
        }
    }

    #[test]
    fn lookup_is_accurate_near_the_origin() {
        let t = TransmonTables::new(0.9, 31.4, 100_001).unwrap();
        for k in 1..400 {
            let x = k as f64 * t.step() * 0.37;
            let (c, s) = t.lookup(x).unwrap();
            let (dc, ds) = direct(0.9, x);
            assert_abs_diff_eq!(c, dc, epsilon = 1e-7);
            assert_abs_diff_eq!(s, ds, epsilon = 1e-7);
        }
    }

    #[test]
    fn rejects_bad_exponent_and_range() {
        assert!(matches!(TransmonTables::new(0.0, 1.0, 1000), Err(Error::InvalidExponent { .. })));
        assert!(matches!(TransmonTables::new(-0.5, 1.0, 1000), Err(Error::InvalidExponent { .. })));
        let t = TransmonTables::new(0.9, 1.0, 1000).unwrap();
        assert_eq!(t.lookup(1.5), None);
        assert_eq!(t.lookup(-0.1), None);
    }
}
