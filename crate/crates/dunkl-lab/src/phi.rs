//! The admissible family of nonlinearities phi.
//!
//! All solvers in this crate work with continuous nondecreasing functions
//! phi : [0, inf) -> [0, inf) with phi(0) = 0, given in one of four closed
//! forms: a pure power c t^p (p >= 1), a linear term c t, a shifted
//! exponential c (e^t - 1), or a polynomial with nonnegative coefficients and
//! no constant term. Keeping the family symbolic buys exact primitives
//! Phi(t) = int_0^t phi (used by the growth test for entire solutions),
//! exact derivatives (used for Lipschitz bounds and quartic series starts),
//! and safe overflow thresholds.
//!
//! The textual grammar accepted by [`Phi::parse`] (and therefore by
//! command-line flags and config files) is
//!
//! ```text
//! power:c,p   |   linear:c   |   expm1:c   |   poly:c1,c2,...
//! ```
//!
//! where `poly:c1,c2,...` means c1 t + c2 t^2 + ... .

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Symbolic form of the nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum PhiForm {
    /// c t^p with c > 0, p >= 1.
    Power { c: f64, p: f64 },
    /// c t with c > 0.
    Linear { c: f64 },
    /// c (e^t - 1) with c > 0.
    ExpMinusOne { c: f64 },
    /// sum_i coeffs[i] t^{i+1}, all coefficients >= 0, at least one > 0.
    Poly { coeffs: Vec<f64> },
}

/// A validated nonlinearity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Phi {
    form: PhiForm,
}

impl Phi {
    pub fn power(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "power nonlinearity needs c > 0, got {c}"
            )));
        }
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidInput(format!(
                "power nonlinearity needs exponent p >= 1, got {p}"
            )));
        }
        Ok(Phi {
            form: PhiForm::Power { c, p },
        })
    }

    pub fn linear(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "linear nonlinearity needs c > 0, got {c}"
            )));
        }
        Ok(Phi {
            form: PhiForm::Linear { c },
        })
    }

    pub fn expm1(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidInput(format!(
                "exponential nonlinearity needs c > 0, got {c}"
            )));
        }
        Ok(Phi {
            form: PhiForm::ExpMinusOne { c },
        })
    }

    pub fn poly(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || !coeffs.iter().any(|&c| c > 0.0) {
            return Err(Error::InvalidInput(
                "polynomial nonlinearity needs at least one positive coefficient".into(),
            ));
        }
        if coeffs.iter().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "polynomial coefficients must be finite and nonnegative, got {coeffs:?}"
            )));
        }
        Ok(Phi {
            form: PhiForm::Poly { coeffs },
        })
    }

    pub fn form(&self) -> &PhiForm {
        &self.form
    }

    /// phi(u). Negative arguments clamp to 0 (they only arise from
    /// floating-point undershoot in fixed-point iterations).
    pub fn eval(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match &self.form {
            PhiForm::Power { c, p } => c * u.powf(*p),
            PhiForm::Linear { c } => c * u,
            PhiForm::ExpMinusOne { c } => c * u.exp_m1(),
            PhiForm::Poly { coeffs } => {
                // Horner on sum coeffs[i] u^{i+1} = u * (c1 + u(c2 + ...)).
                let mut acc = 0.0;
                for &ci in coeffs.iter().rev() {
                    acc = acc * u + ci;
                }
                acc * u
            }
        }
    }

    /// phi'(u) (right derivative at 0).
    pub fn derivative(&self, u: f64) -> f64 {
        let u = u.max(0.0);
        match &self.form {
            PhiForm::Power { c, p } => {
                if *p == 1.0 {
                    *c
                } else {
                    c * p * u.powf(p - 1.0)
                }
            }
            PhiForm::Linear { c } => *c,
            PhiForm::ExpMinusOne { c } => c * u.exp(),
            PhiForm::Poly { coeffs } => {
                let mut acc = 0.0;
                for (i, &ci) in coeffs.iter().enumerate().rev() {
                    acc = acc * u + (i as f64 + 1.0) * ci;
                }
                acc
            }
        }
    }

    /// Exact primitive Phi(t) = int_0^t phi(s) ds.
    pub fn primitive(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.form {
            PhiForm::Power { c, p } => c * t.powf(p + 1.0) / (p + 1.0),
            PhiForm::Linear { c } => 0.5 * c * t * t,
            // int_0^t (e^s - 1) ds = e^t - t - 1; exp_m1 keeps precision
            // for small t.
            PhiForm::ExpMinusOne { c } => c * (t.exp_m1() - t),
            PhiForm::Poly { coeffs } => {
                let mut acc = 0.0;
                for (i, &ci) in coeffs.iter().enumerate().rev() {
                    acc = acc * t + ci / (i as f64 + 2.0);
                }
                acc * t * t
            }
        }
    }

    /// A Lipschitz constant for phi on [0, c]; since every member is convex,
    /// the slope is maximal at the right endpoint.
    pub fn lipschitz_on(&self, c: f64) -> f64 {
        self.derivative(c.max(0.0))
    }

    /// Largest u the integrators should reach before declaring blow-up:
    /// the generic ceiling of 1e8, lowered for the exponential form so that
    /// phi(u) (and r^{m-1} phi(u) for moderate radii) stays finite.
    pub fn blowup_ceiling(&self) -> f64 {
        match &self.form {
            PhiForm::ExpMinusOne { .. } => 680.0,
            _ => 1e8,
        }
    }

    /// Short human-readable description, `power:c,p`-style (round-trips
    /// through [`Phi::parse`]).
    pub fn describe(&self) -> String {
        match &self.form {
            PhiForm::Power { c, p } => format!("power:{c},{p}"),
            PhiForm::Linear { c } => format!("linear:{c}"),
            PhiForm::ExpMinusOne { c } => format!("expm1:{c}"),
            PhiForm::Poly { coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                format!("poly:{}", cs.join(","))
            }
        }
    }

    /// Parse the `form:params` grammar described in the module docs.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("nonlinearity '{s}' lacks a ':' separator")))?;
        let nums: Vec<f64> = rest
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("bad number '{t}' in nonlinearity '{s}'"))
                })
            })
            .collect::<Result<_>>()?;
        match (name.trim(), nums.len()) {
            ("power", 2) => Phi::power(nums[0], nums[1]),
            ("linear", 1) => Phi::linear(nums[0]),
            ("expm1", 1) => Phi::expm1(nums[0]),
            ("poly", n) if n >= 1 => Phi::poly(nums),
            (other, n) => Err(Error::InvalidInput(format!(
                "unrecognized nonlinearity '{other}' with {n} parameter(s); expected power:c,p | linear:c | expm1:c | poly:c1,c2,..."
            ))),
        }
    }
}

impl FromStr for Phi {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Phi::parse(s)
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_closed_forms() {
        let p = Phi::power(2.0, 2.5).unwrap();
        assert!((p.eval(3.0) - 2.0 * 3.0f64.powf(2.5)).abs() < 1e-12);
        let l = Phi::linear(0.7).unwrap();
        assert!((l.eval(4.0) - 2.8).abs() < 1e-14);
        let e = Phi::expm1(1.5).unwrap();
        assert!((e.eval(1.0) - 1.5 * (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let q = Phi::poly(vec![1.0, 0.0, 2.0]).unwrap();
        assert!((q.eval(2.0) - (2.0 + 2.0 * 8.0)).abs() < 1e-12);
    }

    #[test]
    fn primitive_matches_derivative_numerically() {
        for phi in [
            Phi::power(1.3, 1.7).unwrap(),
            Phi::linear(2.0).unwrap(),
            Phi::expm1(0.5).unwrap(),
            Phi::poly(vec![0.5, 1.5, 0.25]).unwrap(),
        ] {
            for t in [0.1, 0.9, 2.7] {
                let h = 1e-6;
                let num = (phi.primitive(t + h) - phi.primitive(t - h)) / (2.0 * h);
                assert!(
                    (num - phi.eval(t)).abs() < 1e-7 * (1.0 + phi.eval(t)),
                    "{phi}: primitive'({t}) = {num} vs phi = {}",
                    phi.eval(t)
                );
                let dnum = (phi.eval(t + h) - phi.eval(t - h)) / (2.0 * h);
                assert!((dnum - phi.derivative(t)).abs() < 1e-5 * (1.0 + phi.derivative(t)));
            }
        }
    }

    #[test]
    fn monotone_and_zero_at_zero() {
        for phi in [
            Phi::power(1.0, 1.0).unwrap(),
            Phi::power(3.0, 4.0).unwrap(),
            Phi::expm1(2.0).unwrap(),
            Phi::poly(vec![0.0, 1.0]).unwrap(),
        ] {
            assert_eq!(phi.eval(0.0), 0.0);
            let mut prev = 0.0;
            for i in 1..=50 {
                let u = 0.1 * i as f64;
                let v = phi.eval(u);
                assert!(v >= prev, "{phi} decreased at {u}");
                prev = v;
            }
        }
    }

    #[test]
    fn parse_round_trip_and_rejections() {
        for s in ["power:1,2", "linear:0.5", "expm1:2", "poly:1,0,3.5"] {
            let phi = Phi::parse(s).unwrap();
            assert_eq!(phi.describe(), s);
            assert_eq!(Phi::parse(&phi.describe()).unwrap(), phi);
        }
        assert!(Phi::parse("power:1").is_err());
        assert!(Phi::parse("power:-1,2").is_err());
        assert!(Phi::parse("power:1,0.5").is_err());
        assert!(Phi::parse("cubic:1").is_err());
        assert!(Phi::parse("poly:-1,2").is_err());
        assert!(Phi::parse("poly:0,0").is_err());
        assert!(Phi::parse("linear:abc").is_err());
        assert!(Phi::parse("linear").is_err());
    }

    #[test]
    fn lipschitz_is_endpoint_slope() {
        let phi = Phi::power(1.0, 3.0).unwrap();
        assert!((phi.lipschitz_on(2.0) - 12.0).abs() < 1e-12);
    }
}
