//! Monte Carlo benchmark of the exact adjusted-price representation: joint
//! simulation of the log price and the two CIR intensities with correlated
//! drivers, pathwise evaluation of the discounted payoff plus the running
//! adjustment integral, and a fitted control-variate estimator.
//!
//! Intensities advance by Euler with full truncation: stored levels may go
//! negative, every coefficient (drift, diffusion, discount, adjustment)
//! evaluates the positive part. The log price advances by exact Gaussian
//! increments. Running integrals use the trapezoidal rule on the simulation
//! grid, with the Black–Scholes value replaced by the payoff at the final
//! node where it degenerates.
//!
//! Reproducibility: each path draws from its own ChaCha8 stream keyed by
//! `(seed, path index)` and the reduction is a fixed-shape pairwise sum, so
//! results are bit-identical for any worker count.

use crate::blackscholes::{bs_call, MarketParams};
use crate::cir::CirParams;
use crate::error::{domain, Result};
use crate::xva::{breakdown_at, g0, g1, g2, ApproxParams, CreditParams, XvaBreakdown};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Simulation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Time step in years; the final step is shortened to land exactly on
    /// the maturity.
    pub dt: f64,
    pub seed: u64,
    pub control_variate: bool,
    /// Worker threads for path generation. Estimates are bit-identical for
    /// any value.
    pub workers: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_paths: 200_000,
            dt: 1.0 / 250.0,
            seed: 42,
            control_variate: true,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(domain("n_paths must be positive"));
        }
        if !(self.dt > 0.0) {
            return Err(domain("dt must be positive"));
        }
        if self.workers == 0 {
            return Err(domain("workers must be positive"));
        }
        Ok(())
    }
}

/// One simulated path reduced to the three terms the estimator needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// `e^{−∫_t^T (r_phi + λ)} f(X_T)`
    pub discounted_payoff: f64,
    /// `∫_t^T e^{−∫_t^s (r_phi + λ)} Λ_s c_BS(X_s, s, rbar_s, σ) ds`
    pub psi_integral: f64,
    /// Default-free control `e^{−∫_t^T h} f(X_T)` with known expectation.
    pub control: f64,
}

/// Monte Carlo estimate with its sampling error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub ci95_halfwidth: f64,
    pub n_paths: usize,
    /// Fitted control coefficient; present only when the control variate
    /// is enabled.
    pub cv_beta: Option<f64>,
}

/// Per-step quantities shared by every path.
struct StepGrid {
    /// Step sizes; all equal to `dt` except possibly the last.
    dts: Vec<f64>,
    sqrt_dts: Vec<f64>,
    /// Log-price drift increment `∫ (h − σ²/2)` per step.
    drift_x: Vec<f64>,
    /// `e^{−∫_t^{t_k} r_phi}` at each node (length steps + 1).
    disc_rphi: Vec<f64>,
    /// `α · (r_phi(t_k) − r_c(t_k))` at each node.
    alpha_rhat: Vec<f64>,
    /// `∫_{t_k}^T r` at each node, for the Black–Scholes carry.
    rbar: Vec<f64>,
    times: Vec<f64>,
}

impl StepGrid {
    fn build(market: &MarketParams, credit: &CreditParams, t: f64, dt: f64) -> Self {
        let maturity = market.maturity;
        let span = maturity - t;
        let n_full = (span / dt).floor() as usize;
        let mut times: Vec<f64> = (0..=n_full).map(|k| t + k as f64 * dt).collect();
        let last = *times.last().expect("at least the start node");
        if maturity - last > 1e-12 * span.max(1.0) {
            times.push(maturity);
        } else {
            *times.last_mut().expect("non-empty") = maturity;
        }
        let n_steps = times.len() - 1;
        let mut grid = StepGrid {
            dts: Vec::with_capacity(n_steps),
            sqrt_dts: Vec::with_capacity(n_steps),
            drift_x: Vec::with_capacity(n_steps),
            disc_rphi: Vec::with_capacity(n_steps + 1),
            alpha_rhat: Vec::with_capacity(n_steps + 1),
            rbar: Vec::with_capacity(n_steps + 1),
            times: times.clone(),
        };
        let half_sigma2 = 0.5 * market.sigma * market.sigma;
        for k in 0..n_steps {
            let (a, b) = (times[k], times[k + 1]);
            grid.dts.push(b - a);
            grid.sqrt_dts.push((b - a).sqrt());
            grid.drift_x.push(market.h.integral(a, b) - half_sigma2 * (b - a));
        }
        for &tk in &times {
            grid.disc_rphi.push((-market.r_phi.integral(t, tk)).exp());
            grid.alpha_rhat.push(credit.alpha * market.hat_r(tk));
            grid.rbar.push(market.r.integral(tk, maturity));
        }
        grid
    }
}

/// Simulate all paths and reduce each to its estimator terms.
///
/// Path `i` draws three independent Gaussian increment streams from ChaCha8
/// stream `i`; the asset driver is `ρ1 B¹ + ρ2 B² + sqrt(1 − ρ1² − ρ2²) B³`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_paths(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    rho1: f64,
    rho2: f64,
    config: &McConfig,
) -> Result<Vec<PathSample>> {
    config.validate()?;
    if rho1 * rho1 + rho2 * rho2 > 1.0 + 1e-12 {
        return Err(domain("correlations must satisfy rho1^2 + rho2^2 <= 1"));
    }
    let t = 0.0;
    if !(t < market.maturity) {
        return Err(domain("maturity must be positive"));
    }
    let grid = StepGrid::build(market, credit, t, config.dt);
    let rho3 = (1.0 - rho1 * rho1 - rho2 * rho2).max(0.0).sqrt();
    let l1_eff = credit.effective_l1();
    let h_disc = (-market.h.integral(t, market.maturity)).exp();

    let one_path = |idx: usize| -> PathSample {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(idx as u64);
        let n_steps = grid.dts.len();
        let mut x = market.x0;
        let mut lam1 = cir1.lambda0;
        let mut lam2 = cir2.lambda0;
        let mut int_lam = 0.0;
        let mut lam_sum_prev = lam1.max(0.0) + lam2.max(0.0);
        let mut psi = 0.0;
        // Integrand at s = t.
        let big_lambda0 = lam_sum_prev + grid.alpha_rhat[0] - l1_eff * lam1.max(0.0);
        let c0 = bs_call(x, t, grid.rbar[0], market.sigma, market.maturity, market.kappa)
            .expect("t < maturity");
        let mut f_prev = big_lambda0 * c0;
        for k in 0..n_steps {
            let dt = grid.dts[k];
            let sq = grid.sqrt_dts[k];
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let z3: f64 = StandardNormal.sample(&mut rng);
            let l1p = lam1.max(0.0);
            let l2p = lam2.max(0.0);
            lam1 += cir1.gamma * (cir1.theta - l1p) * dt + cir1.eta * l1p.sqrt() * sq * z1;
            lam2 += cir2.gamma * (cir2.theta - l2p) * dt + cir2.eta * l2p.sqrt() * sq * z2;
            x += grid.drift_x[k] + market.sigma * sq * (rho1 * z1 + rho2 * z2 + rho3 * z3);
            let lam_sum = lam1.max(0.0) + lam2.max(0.0);
            int_lam += 0.5 * (lam_sum_prev + lam_sum) * dt;
            lam_sum_prev = lam_sum;
            let big_lambda = lam_sum + grid.alpha_rhat[k + 1] - l1_eff * lam1.max(0.0);
            let c_val = if k + 1 == n_steps {
                (x.exp() - market.kappa.exp()).max(0.0)
            } else {
                bs_call(
                    x,
                    grid.times[k + 1],
                    grid.rbar[k + 1],
                    market.sigma,
                    market.maturity,
                    market.kappa,
                )
                .expect("interior node is before maturity")
            };
            let f_k = grid.disc_rphi[k + 1] * (-int_lam).exp() * big_lambda * c_val;
            psi += 0.5 * (f_prev + f_k) * dt;
            f_prev = f_k;
        }
        let payoff = (x.exp() - market.kappa.exp()).max(0.0);
        PathSample {
            discounted_payoff: grid.disc_rphi[n_steps] * (-int_lam).exp() * payoff,
            psi_integral: psi,
            control: h_disc * payoff,
        }
    };

    let mut samples = vec![
        PathSample {
            discounted_payoff: 0.0,
            psi_integral: 0.0,
            control: 0.0,
        };
        config.n_paths
    ];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| domain(format!("failed to build thread pool: {e}")))?;
    pool.install(|| {
        use rayon::prelude::*;
        samples
            .par_iter_mut()
            .enumerate()
            .with_min_len(256)
            .for_each(|(idx, slot)| *slot = one_path(idx));
    });
    Ok(samples)
}

/// Deterministic pairwise summation, independent of worker count.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Estimate the adjusted price from simulated paths.
///
/// The per-path value is `discounted_payoff + psi_integral`. With the
/// control variate on, the default-free discounted payoff (expectation
/// `c_BS(x, t, hbar_t, σ)`) is subtracted with the coefficient fitted from
/// the sample covariance.
#[allow(clippy::too_many_arguments)]
pub fn estimate_price(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    rho1: f64,
    rho2: f64,
    config: &McConfig,
) -> Result<McEstimate> {
    if config.n_paths < 2 {
        return Err(domain("need at least 2 paths for a standard error"));
    }
    let samples = simulate_paths(market, credit, cir1, cir2, rho1, rho2, config)?;
    let n = samples.len();
    let totals: Vec<f64> = samples
        .iter()
        .map(|s| s.discounted_payoff + s.psi_integral)
        .collect();
    let mean_raw = pairwise_sum(&totals) / n as f64;

    let (values, cv_beta) = if config.control_variate {
        let controls: Vec<f64> = samples.iter().map(|s| s.control).collect();
        let mean_c = pairwise_sum(&controls) / n as f64;
        let cov_terms: Vec<f64> = totals
            .iter()
            .zip(&controls)
            .map(|(p, c)| (p - mean_raw) * (c - mean_c))
            .collect();
        let var_terms: Vec<f64> = controls.iter().map(|c| (c - mean_c).powi(2)).collect();
        let var_c = pairwise_sum(&var_terms);
        let beta = if var_c > 0.0 {
            pairwise_sum(&cov_terms) / var_c
        } else {
            0.0
        };
        let expected_control = bs_call(
            market.x0,
            0.0,
            market.h_bar(0.0),
            market.sigma,
            market.maturity,
            market.kappa,
        )?;
        let adjusted: Vec<f64> = totals
            .iter()
            .zip(&controls)
            .map(|(p, c)| p - beta * (c - expected_control))
            .collect();
        (adjusted, Some(beta))
    } else {
        (totals, None)
    };

    let mean = pairwise_sum(&values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (n as f64 - 1.0);
    let std_error = (var / n as f64).sqrt();
    Ok(McEstimate {
        mean,
        std_error,
        ci95_halfwidth: 1.96 * std_error,
        n_paths: n,
        cv_beta,
    })
}

/// One row of a correlation-grid study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub rho1: f64,
    pub rho2: f64,
    pub price_approx: f64,
    pub price_mc: f64,
    pub mc_se: f64,
    /// `price_approx − price_mc`.
    pub error: f64,
}

/// Run the first-order approximation against the Monte Carlo benchmark on a
/// correlation grid. The Taylor coefficients are computed once and shared;
/// rows keep the input order. Correlation-domain violations are reported
/// before any simulation starts.
#[allow(clippy::too_many_arguments)]
pub fn error_grid(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    grid: &[(f64, f64)],
    mc_config: &McConfig,
    approx: &ApproxParams,
) -> Result<Vec<GridRow>> {
    for &(r1, r2) in grid {
        if r1 * r1 + r2 * r2 > 1.0 + 1e-12 {
            return Err(domain(format!(
                "grid point ({r1}, {r2}) violates rho1^2 + rho2^2 <= 1"
            )));
        }
    }
    if grid.is_empty() {
        return Ok(Vec::new());
    }
    let g0v = g0(market, credit, cir1, cir2, 0.0, approx)?;
    let g1v = g1(market, credit, cir1, cir2, 0.0, approx)?;
    let g2v = g2(market, credit, cir1, cir2, 0.0, approx)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &(r1, r2) in grid {
        let approx_price = breakdown_at(g0v, g1v, g2v, r1, r2)?.price;
        let est = estimate_price(market, credit, cir1, cir2, r1, r2, mc_config)?;
        rows.push(GridRow {
            rho1: r1,
            rho2: r2,
            price_approx: approx_price,
            price_mc: est.mean,
            mc_se: est.std_error,
            error: approx_price - est.mean,
        });
    }
    Ok(rows)
}

/// Shared coefficients plus an estimate, for callers that already have the
/// breakdown (keeps a grid sweep's analytic work out of the MC loop).
pub fn breakdown_price(breakdown: &XvaBreakdown) -> f64 {
    breakdown.price
}
