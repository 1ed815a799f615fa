//! Flat sectioned key/value run configuration.
//!
//! Every run is fully specified on disk for bit-exact reproducibility. The
//! format is INI-like: `[section]` headers, `key = value` lines, `#`
//! comments. Rates accept either a number (flat curve) or a piecewise list
//! `0:0.001,0.25:0.002` of `start:level` pairs.

use crate::blackscholes::MarketParams;
use crate::cir::{CirParams, FreezeMode, MomentMode};
use crate::curve::RateCurve;
use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::quad::QuadConfig;
use crate::xva::{ApproxParams, CreditParams};
use std::collections::BTreeMap;

/// Fully parsed and validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub market: MarketParams,
    pub credit: CreditParams,
    pub cir1: CirParams,
    pub cir2: CirParams,
    pub rho1: f64,
    pub rho2: f64,
    pub mc: McConfig,
    pub approx: ApproxParams,
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Raw sections of key/value strings.
struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
    /// Keys read so far, to report unknown leftovers.
    consumed: std::cell::RefCell<Vec<(String, String)>>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(i) => &raw_line[..i],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(config_err(
                        "",
                        format!("line {}: malformed section header `{raw_line}`", lineno + 1),
                    ));
                }
                let name = line[1..line.len() - 1].trim().to_string();
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(
                    "",
                    format!("line {}: expected `key = value`, got `{raw_line}`", lineno + 1),
                ));
            };
            let section = current.as_ref().ok_or_else(|| {
                config_err("", format!("line {}: key before any [section]", lineno + 1))
            })?;
            let prev = sections
                .get_mut(section)
                .expect("section was created on header")
                .insert(key.trim().to_string(), value.trim().to_string());
            if prev.is_some() {
                return Err(config_err(
                    &format!("{section}.{}", key.trim()),
                    "duplicate key",
                ));
            }
        }
        Ok(RawConfig {
            sections,
            consumed: std::cell::RefCell::new(Vec::new()),
        })
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.consumed
            .borrow_mut()
            .push((section.to_string(), key.to_string()));
        self.sections.get(section)?.get(key).map(|s| s.as_str())
    }

    fn require(&self, section: &str, key: &str) -> Result<&str> {
        self.get(section, key)
            .ok_or_else(|| config_err(&format!("{section}.{key}"), "missing required key"))
    }

    fn require_f64(&self, section: &str, key: &str) -> Result<f64> {
        parse_f64(&format!("{section}.{key}"), self.require(section, key)?)
    }

    fn optional_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| parse_f64(&format!("{section}.{key}"), v))
            .transpose()
    }

    fn unknown_keys(&self) -> Vec<String> {
        let consumed = self.consumed.borrow();
        let mut unknown = Vec::new();
        for (section, keys) in &self.sections {
            for key in keys.keys() {
                if !consumed
                    .iter()
                    .any(|(s, k)| s == section && k == key)
                {
                    unknown.push(format!("{section}.{key}"));
                }
            }
        }
        unknown
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| config_err(key, format!("expected a number, got `{value}`")))
}

fn parse_curve(key: &str, value: &str) -> Result<RateCurve> {
    if !value.contains(':') {
        return Ok(RateCurve::constant(parse_f64(key, value)?));
    }
    let mut segments = Vec::new();
    for piece in value.split(',') {
        let Some((start, level)) = piece.split_once(':') else {
            return Err(config_err(key, format!("malformed curve segment `{piece}`")));
        };
        segments.push((
            parse_f64(key, start.trim())?,
            parse_f64(key, level.trim())?,
        ));
    }
    RateCurve::piecewise(&segments).map_err(|e| config_err(key, e.to_string()))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        other => Err(config_err(key, format!("expected a boolean, got `{other}`"))),
    }
}

fn parse_cir(raw: &RawConfig, section: &str) -> Result<CirParams> {
    let p = CirParams::new(
        raw.require_f64(section, "lambda0")?,
        raw.require_f64(section, "gamma")?,
        raw.require_f64(section, "theta")?,
        raw.require_f64(section, "eta")?,
    )
    .map_err(|e| config_err(section, e.to_string()))?;
    if p.feller_violated() {
        eprintln!(
            "warning: [{section}] violates the Feller condition (2*gamma*theta = {} < eta^2 = {}); \
             the origin is attainable",
            2.0 * p.gamma * p.theta,
            p.eta * p.eta
        );
    }
    Ok(p)
}

impl RunConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        let raw = RawConfig::parse(text)?;

        // [market]: exactly one of s0 / x0.
        let s0 = raw.optional_f64("market", "s0")?;
        let x0 = raw.optional_f64("market", "x0")?;
        let x0 = match (s0, x0) {
            (Some(s), None) => {
                if !(s > 0.0) {
                    return Err(config_err("market.s0", "must be > 0"));
                }
                s.ln()
            }
            (None, Some(x)) => x,
            (Some(_), Some(_)) => {
                return Err(config_err("market.s0", "give exactly one of s0 / x0, not both"))
            }
            (None, None) => return Err(config_err("market.s0", "give exactly one of s0 / x0")),
        };
        let strike = raw.require_f64("market", "strike")?;
        if !(strike > 0.0) {
            return Err(config_err("market.strike", "must be > 0"));
        }
        let market = MarketParams::new(
            x0,
            raw.require_f64("market", "sigma")?,
            strike.ln(),
            raw.require_f64("market", "maturity")?,
            parse_curve("market.r", raw.require("market", "r")?)?,
            parse_curve("market.r_phi", raw.require("market", "r_phi")?)?,
            parse_curve("market.r_c", raw.require("market", "r_c")?)?,
            parse_curve("market.h", raw.require("market", "h")?)?,
        )
        .map_err(|e| config_err("market", e.to_string()))?;

        let credit = CreditParams::new(
            raw.require_f64("credit", "alpha")?,
            raw.require_f64("credit", "l1")?,
            raw.require_f64("credit", "l2")?,
        )
        .map_err(|e| config_err("credit", e.to_string()))?;

        let cir1 = parse_cir(&raw, "cir1")?;
        let cir2 = parse_cir(&raw, "cir2")?;

        let rho1 = raw.require_f64("corr", "rho1")?;
        let rho2 = raw.require_f64("corr", "rho2")?;
        if rho1 * rho1 + rho2 * rho2 > 1.0 + 1e-12 {
            return Err(config_err("corr", "rho1^2 + rho2^2 must be <= 1"));
        }

        // [mc] and [approx] default to desk-scale values.
        let mut mc = McConfig::default();
        if let Some(v) = raw.get("mc", "paths") {
            mc.n_paths = v
                .parse()
                .map_err(|_| config_err("mc.paths", "expected a positive integer"))?;
        }
        if let Some(v) = raw.optional_f64("mc", "dt")? {
            mc.dt = v;
        }
        if let Some(v) = raw.get("mc", "seed") {
            mc.seed = v
                .parse()
                .map_err(|_| config_err("mc.seed", "expected a 64-bit integer"))?;
        }
        if let Some(v) = raw.get("mc", "control_variate") {
            mc.control_variate = parse_bool("mc.control_variate", v)?;
        }
        if let Some(v) = raw.get("mc", "workers") {
            mc.workers = v
                .parse()
                .map_err(|_| config_err("mc.workers", "expected a positive integer"))?;
        }
        if mc.n_paths == 0 {
            return Err(config_err("mc.paths", "must be positive"));
        }
        if !(mc.dt > 0.0) {
            return Err(config_err("mc.dt", "must be positive"));
        }
        if mc.workers == 0 {
            return Err(config_err("mc.workers", "must be positive"));
        }

        let mut approx = ApproxParams::default();
        if let Some(v) = raw.optional_f64("approx", "quad_rel_tol")? {
            if !(v > 0.0) {
                return Err(config_err("approx.quad_rel_tol", "must be positive"));
            }
            approx.quad = QuadConfig {
                rel_tol: v,
                ..approx.quad
            };
        }
        if let Some(v) = raw.get("approx", "freeze_mode") {
            approx.freeze = match v {
                "theta" | "at-theta" => FreezeMode::AtTheta,
                "lambda0" | "at-lambda0" => FreezeMode::AtLambda0,
                other => {
                    return Err(config_err(
                        "approx.freeze_mode",
                        format!("expected `theta` or `lambda0`, got `{other}`"),
                    ))
                }
            };
        }
        if let Some(v) = raw.get("approx", "moment_mode") {
            approx.moment_mode = match v {
                "paper" => MomentMode::Paper,
                "tower" => MomentMode::Tower,
                other => {
                    return Err(config_err(
                        "approx.moment_mode",
                        format!("expected `paper` or `tower`, got `{other}`"),
                    ))
                }
            };
        }

        let unknown = raw.unknown_keys();
        if !unknown.is_empty() {
            return Err(config_err(&unknown[0], "unknown key"));
        }

        Ok(RunConfig {
            market,
            credit,
            cir1,
            cir2,
            rho1,
            rho2,
            mc,
            approx,
        })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# reference deal
[market]
s0 = 100.0
sigma = 0.4
strike = 100.0
maturity = 0.5
r = 0.001
r_phi = 0.005
r_c = 0.002
h = 0.005

[credit]
alpha = 0.5
l1 = 0.405
l2 = 0.405

[cir1]
lambda0 = 0.03
gamma = 0.02
theta = 0.161
eta = 0.08

[cir2]
lambda0 = 0.035
gamma = 0.35
theta = 0.45
eta = 0.15

[corr]
rho1 = 0.1
rho2 = -0.2
";

    #[test]
    fn parses_reference_config() {
        let cfg = RunConfig::from_str(GOOD).unwrap();
        assert!((cfg.market.x0 - 100.0f64.ln()).abs() < 1e-15);
        assert_eq!(cfg.rho1, 0.1);
        assert_eq!(cfg.mc.n_paths, 200_000);
        assert_eq!(cfg.mc.seed, 42);
        assert_eq!(cfg.approx.quad.rel_tol, 1e-8);
    }

    #[test]
    fn optional_sections_override_defaults() {
        let text = format!(
            "{GOOD}\n[mc]\npaths = 1000\ndt = 0.01\nseed = 9\ncontrol_variate = off\nworkers = 2\n\
             [approx]\nquad_rel_tol = 1e-6\nfreeze_mode = lambda0\nmoment_mode = tower\n"
        );
        let cfg = RunConfig::from_str(&text).unwrap();
        assert_eq!(cfg.mc.n_paths, 1000);
        assert!(!cfg.mc.control_variate);
        assert_eq!(cfg.approx.freeze, FreezeMode::AtLambda0);
        assert_eq!(cfg.approx.moment_mode, MomentMode::Tower);
    }

    #[test]
    fn errors_carry_key_paths() {
        let broken = GOOD.replace("sigma = 0.4", "sigma = forty");
        let err = RunConfig::from_str(&broken).unwrap_err().to_string();
        assert!(err.contains("market.sigma"), "{err}");

        let missing = GOOD.replace("alpha = 0.5\n", "");
        let err = RunConfig::from_str(&missing).unwrap_err().to_string();
        assert!(err.contains("credit.alpha"), "{err}");

        let both = GOOD.replace("[market]", "[market]\nx0 = 4.6");
        let err = RunConfig::from_str(&both).unwrap_err().to_string();
        assert!(err.contains("exactly one"), "{err}");

        let duplicate = GOOD.replace("sigma = 0.4", "sigma = 0.4\nsigma = 0.5");
        let err = RunConfig::from_str(&duplicate).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn rejects_unknown_keys_and_bad_domains() {
        let extra = format!("{GOOD}typo_key = 1\n");
        let err = RunConfig::from_str(&extra).unwrap_err().to_string();
        assert!(err.contains("corr.typo_key"), "{err}");

        let bad_rho = GOOD.replace("rho1 = 0.1", "rho1 = 0.9").replace("rho2 = -0.2", "rho2 = 0.9");
        assert!(RunConfig::from_str(&bad_rho).is_err());
    }

    #[test]
    fn parses_piecewise_curves() {
        let text = GOOD.replace("r = 0.001", "r = 0:0.001,0.25:0.002");
        let cfg = RunConfig::from_str(&text).unwrap();
        assert!((cfg.market.r.integral(0.0, 0.5) - (0.001 * 0.25 + 0.002 * 0.25)).abs() < 1e-15);
    }
}
