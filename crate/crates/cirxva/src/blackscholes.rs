//! Closed-form Black–Scholes machinery: `d1`/`d2`, the call formula, the
//! Gaussian integral `E[e^{pX} N(X)]`, and the unconditional expectation of a
//! future Black–Scholes price under lognormal dynamics.
//!
//! Throughout, prices are parameterized by the log spot `x`, a log strike
//! `kappa` and an accumulated carry `vbar = ∫_s^T v_u du` so the call reads
//! `e^x N(d1) − e^{kappa − vbar} N(d2)`.

use crate::curve::RateCurve;
use crate::error::{domain, Result};

/// Standard normal distribution function, accurate to well below 1e-12.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * std::f64::consts::FRAC_1_SQRT_2)
}

/// Market state for one deal: log spot, volatility, log strike, maturity and
/// the four deterministic rate curves (risk-free `r`, funding `r_phi`,
/// collateral `r_c`, repo/hedging `h`).
///
/// The derived curves `tilde_r = r_phi − h` and `hat_r = r_phi − r_c` are
/// always computed from these, never stored.
#[derive(Debug, Clone)]
pub struct MarketParams {
    pub x0: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub maturity: f64,
    pub r: RateCurve,
    pub r_phi: RateCurve,
    pub r_c: RateCurve,
    pub h: RateCurve,
}

impl MarketParams {
    pub fn new(
        x0: f64,
        sigma: f64,
        kappa: f64,
        maturity: f64,
        r: RateCurve,
        r_phi: RateCurve,
        r_c: RateCurve,
        h: RateCurve,
    ) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(domain("sigma must be > 0"));
        }
        if !(maturity > 0.0) {
            return Err(domain("maturity must be > 0"));
        }
        if !x0.is_finite() || !kappa.is_finite() {
            return Err(domain("log prices must be finite"));
        }
        Ok(MarketParams {
            x0,
            sigma,
            kappa,
            maturity,
            r,
            r_phi,
            r_c,
            h,
        })
    }

    /// Convenience constructor with flat rates, spot and strike in currency.
    pub fn with_flat_rates(
        s0: f64,
        sigma: f64,
        strike: f64,
        maturity: f64,
        r: f64,
        r_phi: f64,
        r_c: f64,
        h: f64,
    ) -> Result<Self> {
        if !(s0 > 0.0) || !(strike > 0.0) {
            return Err(domain("spot and strike must be > 0"));
        }
        MarketParams::new(
            s0.ln(),
            sigma,
            strike.ln(),
            maturity,
            RateCurve::constant(r),
            RateCurve::constant(r_phi),
            RateCurve::constant(r_c),
            RateCurve::constant(h),
        )
    }

    /// `∫_s^T r_u du`
    pub fn r_bar(&self, s: f64) -> f64 {
        self.r.integral(s, self.maturity)
    }

    /// `∫_s^T h_u du`
    pub fn h_bar(&self, s: f64) -> f64 {
        self.h.integral(s, self.maturity)
    }

    /// `∫_a^b (r_phi − h) du`
    pub fn tilde_r_int(&self, a: f64, b: f64) -> f64 {
        self.r_phi.integral(a, b) - self.h.integral(a, b)
    }

    /// `hat_r(s) = r_phi(s) − r_c(s)`
    pub fn hat_r(&self, s: f64) -> f64 {
        self.r_phi.value(s) - self.r_c.value(s)
    }
}

/// `d1` and `d2` for log spot `x` at time `s`, carry `vbar = ∫_s^T v`,
/// volatility `sigma`, maturity `T` and log strike `kappa`.
///
/// `d1 − d2 = sigma · sqrt(T − s)` by construction.
pub fn d12(x: f64, s: f64, vbar: f64, sigma: f64, maturity: f64, kappa: f64) -> Result<(f64, f64)> {
    if !(sigma > 0.0) {
        return Err(domain("sigma must be > 0"));
    }
    if s >= maturity {
        return Err(domain(format!(
            "need s < maturity for d1/d2 (s = {s}, maturity = {maturity})"
        )));
    }
    let st = sigma * (maturity - s).sqrt();
    let d1 = (x - kappa + vbar + 0.5 * st * st) / st;
    Ok((d1, d1 - st))
}

/// Black–Scholes call value `e^x N(d1) − e^{kappa − vbar} N(d2)`.
pub fn bs_call(x: f64, s: f64, vbar: f64, sigma: f64, maturity: f64, kappa: f64) -> Result<f64> {
    let (d1, d2) = d12(x, s, vbar, sigma, maturity, kappa)?;
    Ok(x.exp() * norm_cdf(d1) - (kappa - vbar).exp() * norm_cdf(d2))
}

/// `E[e^{pX} N(X)]` for `X ~ N(mu, nu^2)` in closed form:
/// `e^{p·mu + (p·nu)^2/2} · N((mu + p·nu^2) / sqrt(1 + nu^2))`.
pub fn gauss_exp_cdf(p: f64, mu: f64, nu: f64) -> f64 {
    assert!(nu >= 0.0, "nu must be nonnegative");
    (p * mu + 0.5 * (p * nu).powi(2)).exp() * norm_cdf((mu + p * nu * nu) / (1.0 + nu * nu).sqrt())
}

/// Time-`t` expectation of the future Black–Scholes value
/// `c_BS(X_s, s, rbar_s, sigma)` where `X` carries drift `h − sigma^2/2`.
///
/// Evaluated through [`gauss_exp_cdf`] applied to the Gaussian laws of
/// `X_s` and `d_i(X_s, ·)`; equals
/// `e^{−(rbar_s − hbar_s) + ∫_t^s h} · c_BS(x + (rbar_s − hbar_s), t, hbar_t, sigma)`.
pub fn expected_bs(market: &MarketParams, t: f64, s: f64) -> Result<f64> {
    let maturity = market.maturity;
    if t > s {
        return Err(domain("need t <= s"));
    }
    if s >= maturity {
        return Err(domain("need s < maturity"));
    }
    let sigma = market.sigma;
    let tau = maturity - s;
    let st = sigma * tau.sqrt();
    let rbar_s = market.r_bar(s);
    let h_ts = market.h.integral(t, s);
    let drift = h_ts - 0.5 * sigma * sigma * (s - t);
    // d_i(X_s, s, rbar_s, sigma) are Gaussian with these means and a common
    // standard deviation nu.
    let (d1_x, d2_x) = d12(market.x0, s, rbar_s, sigma, maturity, market.kappa)?;
    let nu = ((s - t) / tau).sqrt();
    let mu1 = d1_x + drift / st;
    let mu2 = d2_x + drift / st;
    // e^{X_s} N(d1(X_s)) rewritten as e^{kappa − rbar_s − sigma^2 tau / 2} e^{p Z} N(Z)
    // with Z = d1(X_s) and p = sigma sqrt(tau).
    let lead = (market.kappa - rbar_s - 0.5 * st * st).exp();
    Ok(lead * gauss_exp_cdf(st, mu1, nu) - (market.kappa - rbar_s).exp() * gauss_exp_cdf(0.0, mu2, nu))
}
