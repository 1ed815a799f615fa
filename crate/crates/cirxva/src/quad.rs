//! One-dimensional quadrature: fixed Gauss–Legendre rules and a global
//! adaptive scheme used for the outer pricing integrals.

use crate::error::{Error, Result};
use once_cell::sync::Lazy;
use std::collections::BinaryHeap;

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build the `n`-point rule. Nodes are the roots of the Legendre
    /// polynomial `P_n`, found by Newton iteration from the Chebyshev-like
    /// initial guess; weights follow from the derivative at the root.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "need at least a 2-point rule");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for k in 0..m {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre recurrence for P_n(x) and P'_n(x).
                let mut p0 = 1.0;
                let mut p1 = x;
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[k] = -x;
            nodes[n - 1 - k] = x;
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over `[a, b]` with this rule on a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        half * acc
    }

    /// Integrate over `[a, b]`, splitting into unit-width panels when the
    /// interval exceeds `max_panel` (keeps the rule in its accurate regime
    /// for exponentially shaped integrands on long horizons).
    pub fn integrate_split<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        max_panel: f64,
    ) -> f64 {
        let width = (b - a).abs();
        if width <= max_panel {
            return self.integrate(f, a, b);
        }
        let n_panels = (width / max_panel).ceil() as usize;
        let step = (b - a) / n_panels as f64;
        let mut acc = 0.0;
        for i in 0..n_panels {
            let lo = a + i as f64 * step;
            let hi = if i + 1 == n_panels { b } else { lo + step };
            acc += self.integrate(&mut f, lo, hi);
        }
        acc
    }
}

/// 64-point rule used for the nested moment integrals.
pub static GL64: Lazy<GaussLegendre> = Lazy::new(|| GaussLegendre::new(64));
/// 15-point rule used per panel by the adaptive integrator.
pub static GL15: Lazy<GaussLegendre> = Lazy::new(|| GaussLegendre::new(15));

/// Tolerances and budget for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_panels: 4096,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    /// Two-half GL15 value of the panel (the kept estimate).
    value: f64,
    /// |two-half estimate − single-panel estimate|.
    err: f64,
    left: f64,
    right: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Self {
        let whole = GL15.integrate(f, a, b);
        let mid = 0.5 * (a + b);
        let left = GL15.integrate(f, a, mid);
        let right = GL15.integrate(f, mid, b);
        let value = left + right;
        Panel {
            a,
            b,
            value,
            err: (value - whole).abs(),
            left,
            right,
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// Keeps a worst-first queue of panels and bisects until the summed error
/// estimate meets `max(rel_tol · |I|, abs_tol)` or the panel budget is
/// exhausted (reported as [`Error::QuadratureNonConvergence`], never
/// silently truncated).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel::new(f, a, b));
    loop {
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.err).sum();
        let tol = (cfg.rel_tol * total.abs()).max(cfg.abs_tol);
        if err <= tol {
            return Ok(total);
        }
        if heap.len() >= cfg.max_panels {
            return Err(Error::QuadratureNonConvergence {
                integral: total,
                error_estimate: err,
                tolerance: tol,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        // Children reuse nothing but are cheap relative to the integrands
        // this crate feeds in (nested moment quadratures).
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer splittable in f64; accept its estimate.
            let mut done = worst;
            done.err = 0.0;
            heap.push(done);
            continue;
        }
        let _ = (worst.left, worst.right);
        heap.push(Panel::new(f, worst.a, mid));
        heap.push(Panel::new(f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl64_weights_sum_to_two() {
        let s: f64 = GL64.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        assert_eq!(GL64.len(), 64);
    }

    #[test]
    fn gl_nodes_match_reference() {
        // numpy.polynomial.legendre.leggauss(64): largest node and its weight.
        let g = GaussLegendre::new(64);
        assert!((g.nodes[63] - 0.9993050417357722).abs() < 1e-14);
        assert!((g.weights[63] - 0.0017832807216964044).abs() < 1e-15);
        // leggauss(15) midpoint and extremes.
        let g15 = GaussLegendre::new(15);
        assert_eq!(g15.nodes[7], 0.0);
        assert!((g15.nodes[14] - 0.9879925180204854).abs() < 1e-14);
        assert!((g15.weights[7] - 0.2025782419255613).abs() < 1e-14);
    }

    #[test]
    fn gl_exact_on_polynomials() {
        // A 15-point rule is exact through degree 29.
        let val = GL15.integrate(|x| x.powi(12) - 3.0 * x.powi(5) + 2.0, -1.0, 1.0);
        assert!((val - (2.0 / 13.0 + 4.0)).abs() < 1e-13);
    }

    #[test]
    fn adaptive_matches_closed_forms() {
        let cfg = QuadConfig::default();
        let v = integrate_adaptive(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let v = integrate_adaptive(&|x: f64| (-x).exp(), 0.0, 30.0, &cfg).unwrap();
        assert!((v - (1.0 - (-30.0f64).exp())).abs() < 1e-9);
        // A sharply peaked integrand forces real subdivision.
        let v = integrate_adaptive(&|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * (1.0 / 1e-2) * (1.0f64 / 1e-2).atan();
        assert!((v - exact).abs() / exact < 1e-8);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let cfg = QuadConfig {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_panels: 4,
        };
        let res = integrate_adaptive(&|x: f64| 1.0 / (1e-6 + x * x), -1.0, 1.0, &cfg);
        match res {
            Err(Error::QuadratureNonConvergence { panels, .. }) => assert_eq!(panels, 4),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn split_panels_agree_with_single_panel_on_smooth_data() {
        let one = GL64.integrate(|x: f64| (0.3 * x).exp(), 0.0, 0.9);
        let split = GL64.integrate_split(|x: f64| (0.3 * x).exp(), 0.0, 0.9, 1.0);
        assert_eq!(one, split);
        let long = GL64.integrate_split(|x: f64| (0.3 * x).exp(), 0.0, 5.0, 1.0);
        let exact = ((0.3f64 * 5.0).exp() - 1.0) / 0.3;
        assert!((long - exact).abs() < 1e-12);
    }
}
