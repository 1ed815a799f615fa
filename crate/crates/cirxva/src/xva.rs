//! Assembly of the first-order adjusted call price: the zeroth-order term
//! `g0`, the correlation sensitivities `g1`/`g2`, the assembled price, and
//! the constant-intensity closed form.

use crate::blackscholes::{bs_call, d12, norm_cdf, MarketParams};
use crate::cir::{survival, CirParams, ForwardMoments, FreezeMode, MomentMode};
use crate::error::{domain, Result};
use crate::quad::{integrate_adaptive, QuadConfig, GL64};

/// Collateralization fraction and losses-given-default.
///
/// Effective losses are `(1 − alpha) · l_i`; the counterparty recovery
/// weight `R1 = 1 − (1 − alpha) · l1` is always derived, never stored. `l2`
/// is part of the data model but never enters the call formulas (the
/// close-out value of a call is nonnegative, so its negative part is zero
/// by construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreditParams {
    pub alpha: f64,
    pub l1: f64,
    pub l2: f64,
}

impl CreditParams {
    pub fn new(alpha: f64, l1: f64, l2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(domain("alpha must be in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&l1) || !(0.0..=1.0).contains(&l2) {
            return Err(domain("losses given default must be in [0, 1]"));
        }
        Ok(CreditParams { alpha, l1, l2 })
    }

    /// Effective counterparty loss `(1 − alpha) · l1`.
    pub fn effective_l1(&self) -> f64 {
        (1.0 - self.alpha) * self.l1
    }

    /// `R1 = 1 − (1 − alpha) · l1`.
    pub fn recovery1(&self) -> f64 {
        1.0 - self.effective_l1()
    }
}

/// Numerical and approximation knobs for the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    pub quad: QuadConfig,
    pub freeze: FreezeMode,
    pub moment_mode: MomentMode,
}

impl Default for ApproxParams {
    fn default() -> Self {
        ApproxParams {
            quad: QuadConfig::default(),
            freeze: FreezeMode::default(),
            moment_mode: MomentMode::default(),
        }
    }
}

/// Taylor coefficients and the assembled first-order price at one
/// correlation pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XvaBreakdown {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub price: f64,
}

fn check_pricing_inputs(market: &MarketParams, t: f64) -> Result<()> {
    if !(t < market.maturity) {
        return Err(domain("need t < maturity"));
    }
    Ok(())
}

fn check_correlations(rho1: f64, rho2: f64) -> Result<()> {
    if rho1 * rho1 + rho2 * rho2 > 1.0 + 1e-12 {
        return Err(domain(format!(
            "correlations must satisfy rho1^2 + rho2^2 <= 1 (got {rho1}, {rho2})"
        )));
    }
    Ok(())
}

/// The carry-shifted Black–Scholes factor
/// `e^{−(rbar_s − hbar_s)} c_BS(x + (rbar_s − hbar_s), t, hbar_t, σ)`.
fn shifted_bs(market: &MarketParams, t: f64, s: f64) -> f64 {
    let shift = market.r_bar(s) - market.h_bar(s);
    (-shift).exp()
        * bs_call(
            market.x0 + shift,
            t,
            market.h_bar(t),
            market.sigma,
            market.maturity,
            market.kappa,
        )
        .expect("t < maturity is validated by the caller")
}

/// `N(d1(x + (rbar_s − hbar_s), t, hbar_t, σ))` for the sensitivity terms.
fn shifted_nd1(market: &MarketParams, t: f64, s: f64) -> f64 {
    let shift = market.r_bar(s) - market.h_bar(s);
    let (d1, _) = d12(
        market.x0 + shift,
        t,
        market.h_bar(t),
        market.sigma,
        market.maturity,
        market.kappa,
    )
    .expect("t < maturity is validated by the caller");
    norm_cdf(d1)
}

/// Zeroth-order term of the expansion (the uncorrelated price):
///
/// `g0 = e^{−∫_t^T r̃} N(t,T) c_BS(x, t, hbar_t, σ)
///   + ∫_t^T e^{−∫_t^s r̃ − (rbar_s − hbar_s)} N(t,s)
///         [R1 E^s(λ¹_s) + E^s(λ²_s) + α·r̂_s]
///         c_BS(x + (rbar_s − hbar_s), t, hbar_t, σ) ds`.
pub fn g0(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    t: f64,
    approx: &ApproxParams,
) -> Result<f64> {
    check_pricing_inputs(market, t)?;
    let maturity = market.maturity;
    let r1 = credit.recovery1();
    let first = (-market.tilde_r_int(t, maturity)).exp()
        * survival(cir1, cir2, t, maturity)?
        * bs_call(market.x0, t, market.h_bar(t), market.sigma, maturity, market.kappa)?;

    let integrand = |s: f64| -> f64 {
        let n = survival(cir1, cir2, t, s).expect("s >= t inside the integration range");
        let m1 = ForwardMoments::new(cir1, t, s, approx.freeze)
            .expect("s >= t")
            .mean(s);
        let m2 = ForwardMoments::new(cir2, t, s, approx.freeze)
            .expect("s >= t")
            .mean(s);
        let coef = r1 * m1 + m2 + credit.alpha * market.hat_r(s);
        (-market.tilde_r_int(t, s)).exp() * n * coef * shifted_bs(market, t, s)
    };
    let integral = integrate_adaptive(&integrand, t, maturity, &approx.quad)?;
    Ok(first + integral)
}

/// Shared shape of the two first-order coefficients. `own` is the intensity
/// correlated with the driving Brownian increment; `other` only enters
/// through its forward mean. `own_weight` is `R1` for `g1` and 1 for `g2`;
/// `cross_weight` multiplies the other intensity's mean inside the cross
/// term (1 for `g1`, `R1` for `g2`).
#[allow(clippy::too_many_arguments)]
fn first_order_coeff(
    market: &MarketParams,
    credit: &CreditParams,
    own: &CirParams,
    other: &CirParams,
    pair: (&CirParams, &CirParams),
    own_weight: f64,
    cross_weight: f64,
    t: f64,
    approx: &ApproxParams,
) -> Result<f64> {
    check_pricing_inputs(market, t)?;
    let maturity = market.maturity;
    let x = market.x0;
    let (cir1, cir2) = pair;

    // First piece: the terminal-survival leg.
    let n_t = survival(cir1, cir2, t, maturity)?;
    let (d1_0, _) = d12(x, t, market.h_bar(t), market.sigma, maturity, market.kappa)?;
    let fm_t = ForwardMoments::new(own, t, maturity, approx.freeze)?;
    let i1 = GL64.integrate_split(|s| fm_t.a_coeff(s) * fm_t.mean_sqrt(s), t, maturity, 1.0);
    let piece1 =
        own.eta * (x - market.tilde_r_int(t, maturity)).exp() * n_t * norm_cdf(d1_0) * i1;

    // Second piece: the running-adjustment leg.
    let integrand = |s: f64| -> f64 {
        let n = survival(cir1, cir2, t, s).expect("s >= t");
        let fm = ForwardMoments::new(own, t, s, approx.freeze).expect("s >= t");
        let other_mean = ForwardMoments::new(other, t, s, approx.freeze)
            .expect("s >= t")
            .mean(s);
        let cross = cross_weight * other_mean + credit.alpha * market.hat_r(s);
        let inner = GL64.integrate_split(
            |u| {
                fm.a_coeff(u)
                    * (fm.third_moment(u, approx.moment_mode) + cross * fm.mean_sqrt(u))
            },
            t,
            s,
            1.0,
        );
        let bracket = own_weight * fm.cov_with_bm() + own.eta * inner;
        (x - market.tilde_r_int(t, s)).exp() * n * shifted_nd1(market, t, s) * bracket
    };
    let piece2 = integrate_adaptive(&integrand, t, maturity, &approx.quad)?;
    Ok(market.sigma * (piece1 + piece2))
}

/// First-order sensitivity to the asset–counterparty correlation ρ1.
pub fn g1(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    t: f64,
    approx: &ApproxParams,
) -> Result<f64> {
    first_order_coeff(
        market,
        credit,
        cir1,
        cir2,
        (cir1, cir2),
        credit.recovery1(),
        1.0,
        t,
        approx,
    )
}

/// First-order sensitivity to the asset–investor correlation ρ2.
pub fn g2(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    t: f64,
    approx: &ApproxParams,
) -> Result<f64> {
    first_order_coeff(
        market,
        credit,
        cir2,
        cir1,
        (cir1, cir2),
        1.0,
        credit.recovery1(),
        t,
        approx,
    )
}

/// First-order price `g0 + g1·ρ1 + g2·ρ2` with its breakdown.
#[allow(clippy::too_many_arguments)]
pub fn price_first_order(
    market: &MarketParams,
    credit: &CreditParams,
    cir1: &CirParams,
    cir2: &CirParams,
    t: f64,
    rho1: f64,
    rho2: f64,
    approx: &ApproxParams,
) -> Result<XvaBreakdown> {
    check_correlations(rho1, rho2)?;
    let g0v = g0(market, credit, cir1, cir2, t, approx)?;
    let g1v = g1(market, credit, cir1, cir2, t, approx)?;
    let g2v = g2(market, credit, cir1, cir2, t, approx)?;
    Ok(XvaBreakdown {
        g0: g0v,
        g1: g1v,
        g2: g2v,
        rho1,
        rho2,
        price: g0v + g1v * rho1 + g2v * rho2,
    })
}

/// Assemble a breakdown at a new correlation pair from already-computed
/// coefficients (used by grid sweeps).
pub fn breakdown_at(g0: f64, g1: f64, g2: f64, rho1: f64, rho2: f64) -> Result<XvaBreakdown> {
    check_correlations(rho1, rho2)?;
    Ok(XvaBreakdown {
        g0,
        g1,
        g2,
        rho1,
        rho2,
        price: g0 + g1 * rho1 + g2 * rho2,
    })
}

/// Constant-intensity closed form:
///
/// `e^{(λ¹ + λ² )(T−t) − ∫_t^T r̃} c_BS(x, t, hbar_t, σ)
///  + ∫_t^T (λ¹ + λ² + α·r̂_s − λ¹ L1_eff)
///      e^{−(λ¹+λ²)(s−t) − ∫_t^s r̃ − (rbar_s − hbar_s)}
///      c_BS(x + (rbar_s − hbar_s), t, hbar_t, σ) ds`
///
/// with `L1_eff = (1 − alpha) l1`. The first factor's sign on
/// `(λ¹ + λ²)(T − t)` follows the published formula, which the reference
/// tables were generated from; see the README's reproduction notes for the
/// relation to `g0` in the constant-intensity limit.
pub fn price_const_intensity(
    market: &MarketParams,
    credit: &CreditParams,
    lam1: f64,
    lam2: f64,
    t: f64,
    approx: &ApproxParams,
) -> Result<f64> {
    check_pricing_inputs(market, t)?;
    if lam1 < 0.0 || lam2 < 0.0 {
        return Err(domain("intensities must be nonnegative"));
    }
    let maturity = market.maturity;
    let lam = lam1 + lam2;
    let first = (lam * (maturity - t) - market.tilde_r_int(t, maturity)).exp()
        * bs_call(market.x0, t, market.h_bar(t), market.sigma, maturity, market.kappa)?;
    let l1_eff = credit.effective_l1();
    let integrand = |s: f64| -> f64 {
        let coef = lam + credit.alpha * market.hat_r(s) - lam1 * l1_eff;
        coef * (-lam * (s - t) - market.tilde_r_int(t, s)).exp() * shifted_bs(market, t, s)
    };
    let integral = integrate_adaptive(&integrand, t, maturity, &approx.quad)?;
    Ok(first + integral)
}

/// Sign-corrected constant-intensity price implied by the model itself:
/// identical to [`price_const_intensity`] except the first factor decays,
/// `e^{−(λ¹+λ²)(T−t) − ∫ r̃}`. At constant intensities this equals `g0`
/// exactly; it is exposed for consistency checks.
pub fn price_const_intensity_consistent(
    market: &MarketParams,
    credit: &CreditParams,
    lam1: f64,
    lam2: f64,
    t: f64,
    approx: &ApproxParams,
) -> Result<f64> {
    check_pricing_inputs(market, t)?;
    if lam1 < 0.0 || lam2 < 0.0 {
        return Err(domain("intensities must be nonnegative"));
    }
    let maturity = market.maturity;
    let lam = lam1 + lam2;
    let first = (-lam * (maturity - t) - market.tilde_r_int(t, maturity)).exp()
        * bs_call(market.x0, t, market.h_bar(t), market.sigma, maturity, market.kappa)?;
    let l1_eff = credit.effective_l1();
    let integrand = |s: f64| -> f64 {
        let coef = lam + credit.alpha * market.hat_r(s) - lam1 * l1_eff;
        coef * (-lam * (s - t) - market.tilde_r_int(t, s)).exp() * shifted_bs(market, t, s)
    };
    let integral = integrate_adaptive(&integrand, t, maturity, &approx.quad)?;
    Ok(first + integral)
}
