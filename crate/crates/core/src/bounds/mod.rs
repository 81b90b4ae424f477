//! Closed-form regret bounds and lower bounds.
//!
//! Every evaluator checks the hypotheses of the result it encodes and reports
//! the first violated condition instead of returning a number outside the
//! bound's domain.

mod bernstein;
mod oracle;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bernstein::{bernstein_estimate, BernsteinEstimate};
pub use oracle::constant_hedge_exact_regret;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BoundId {
    /// Anytime worst case of Decreasing Hedge with `c0 = 2`: `sqrt(T ln M)`.
    Prop1,
    /// Stochastic pseudo-regret of Decreasing Hedge: `(4 ln M + 25) / delta`.
    Thm1,
    /// Minimax lower bound under a gap: `ln M / (256 delta)`.
    Prop2,
    /// Adversarial-with-a-gap upper bound.
    Thm2,
    /// Expected regret under a conditional gap.
    Cor1Exp,
    /// High-probability regret under a conditional gap.
    Cor1Prob,
    /// Constant Hedge on constant losses: `min(sqrt(T ln M)/(3 c0), T/3)`.
    Prop3Const,
    /// Doubling-trick Hedge on constant losses: `min(sqrt(T ln M)/(6 c0), T/12)`.
    Prop3Dbl,
    /// Decreasing Hedge on a (1,1)-Bernstein instance: `min(sqrt(T ln M)/c0, T)/3`.
    Thm4,
    /// Second-order algorithms under a (beta, B)-Bernstein condition.
    Prop4,
    /// Decreasing Hedge on any stochastic instance: `1 / (450 c0^4 ln^2 M delta)`.
    Thm5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
        }
    }
}

impl BoundId {
    pub const ALL: [BoundId; 11] = [
        BoundId::Prop1,
        BoundId::Thm1,
        BoundId::Prop2,
        BoundId::Thm2,
        BoundId::Cor1Exp,
        BoundId::Cor1Prob,
        BoundId::Prop3Const,
        BoundId::Prop3Dbl,
        BoundId::Thm4,
        BoundId::Prop4,
        BoundId::Thm5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::Prop1 => "prop1",
            BoundId::Thm1 => "thm1",
            BoundId::Prop2 => "prop2",
            BoundId::Thm2 => "thm2",
            BoundId::Cor1Exp => "cor1-exp",
            BoundId::Cor1Prob => "cor1-prob",
            BoundId::Prop3Const => "prop3-const",
            BoundId::Prop3Dbl => "prop3-dbl",
            BoundId::Thm4 => "thm4",
            BoundId::Prop4 => "prop4",
            BoundId::Thm5 => "thm5",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            BoundId::Prop1
            | BoundId::Thm1
            | BoundId::Thm2
            | BoundId::Cor1Exp
            | BoundId::Cor1Prob
            | BoundId::Prop4 => Direction::Upper,
            BoundId::Prop2
            | BoundId::Prop3Const
            | BoundId::Prop3Dbl
            | BoundId::Thm4
            | BoundId::Thm5 => Direction::Lower,
        }
    }

    /// Hypotheses under which the bound holds, for display.
    pub fn validity(self) -> &'static str {
        match self {
            BoundId::Prop1 => "M ≥ 2, T ≥ 1",
            BoundId::Thm1 => "M ≥ 3, 0 < Δ ≤ 1",
            BoundId::Prop2 => "M ≥ 4, 0 < Δ < 1/4, T ≥ lnM/(16Δ²)",
            BoundId::Thm2 => "M ≥ 3, 0 < Δ < 1, τ0 ≥ 1, c0 > 0, c1 > 0",
            BoundId::Cor1Exp => "M ≥ 3, 0 < Δ < 1, c0 > 0, c1 > 0",
            BoundId::Cor1Prob => "M ≥ 3, 0 < Δ < 1, 0 < ε < 1, c0 > 0, c1 > 0",
            BoundId::Prop3Const | BoundId::Prop3Dbl | BoundId::Thm4 => "M ≥ 2, T ≥ 1, c0 > 0",
            BoundId::Prop4 => "M ≥ 2, T ≥ 1, 0 ≤ β ≤ 1, B > 0, C1 > 0, C2 > 0",
            BoundId::Thm5 => "M ≥ 2, Δ > 0, c0 ≥ 1, T ≥ 1/(4Δ²)",
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownBound(s.to_string()))
    }
}

impl TryFrom<String> for BoundId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BoundId> for String {
    fn from(id: BoundId) -> Self {
        id.as_str().to_string()
    }
}

/// Inputs of the bound evaluators; each bound reads only what it needs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub experts: Option<usize>,
    pub horizon: Option<u64>,
    pub delta: Option<f64>,
    pub c0: Option<f64>,
    /// Worst-case constant in `R_T <= c1 sqrt(T ln M)`; defaults to 1.
    pub c1: Option<f64>,
    pub tau0: Option<u64>,
    pub beta: Option<f64>,
    pub b: Option<f64>,
    pub epsilon: Option<f64>,
    /// `C1` of the second-order regret bound; defaults to 1.
    pub second_order_c1: Option<f64>,
    /// `C2` of the second-order regret bound; defaults to 1.
    pub second_order_c2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub id: BoundId,
    pub value: f64,
    pub direction: Direction,
    pub validity: &'static str,
    /// Parameters that fell back to their exploratory defaults.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub defaulted: Vec<&'static str>,
}

/// Constants of the adversarial-with-a-gap bound derived from `c0` and `c1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl GapConstants {
    pub fn new(c0: f64, c1: f64) -> Self {
        let s8 = 8f64.sqrt();
        GapConstants {
            c1,
            c2: c1 + s8 / c0,
            c3: s8 / c0,
            c4: 16.0 / (c0 * c0),
        }
    }
}

struct Reader<'a> {
    id: BoundId,
    p: &'a BoundParams,
    defaulted: Vec<&'static str>,
}

impl Reader<'_> {
    fn need<T>(&self, v: Option<T>, param: &'static str) -> Result<T> {
        v.ok_or(Error::MissingParameter {
            id: self.id.to_string(),
            param,
        })
    }

    fn check(&self, ok: bool, condition: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfValidityDomain {
                id: self.id.to_string(),
                condition: condition.to_string(),
            })
        }
    }

    fn or_default(&mut self, v: Option<f64>, param: &'static str, default: f64) -> f64 {
        v.unwrap_or_else(|| {
            self.defaulted.push(param);
            default
        })
    }

    fn ln_m(&self, min: usize) -> Result<f64> {
        let m = self.need(self.p.experts, "M")?;
        self.check(m >= min, &format!("M ≥ {min}"))?;
        Ok((m as f64).ln())
    }

    fn horizon(&self) -> Result<f64> {
        let t = self.need(self.p.horizon, "T")?;
        self.check(t >= 1, "T ≥ 1")?;
        Ok(t as f64)
    }

    fn c0(&self) -> Result<f64> {
        let c0 = self.need(self.p.c0, "c0")?;
        self.check(c0 > 0.0 && c0.is_finite(), "c0 > 0")?;
        Ok(c0)
    }

    fn c1(&mut self) -> Result<f64> {
        let c1 = self.or_default(self.p.c1, "c1", 1.0);
        self.check(c1 > 0.0 && c1.is_finite(), "c1 > 0")?;
        Ok(c1)
    }

    fn delta(&self, upper: f64, inclusive: bool) -> Result<f64> {
        let d = self.need(self.p.delta, "delta")?;
        let ok = d > 0.0 && if inclusive { d <= upper } else { d < upper };
        let cond = match (upper, inclusive) {
            (u, _) if u.is_infinite() => "Δ > 0".to_string(),
            (u, true) => format!("0 < Δ ≤ {u}"),
            (u, false) => format!("0 < Δ < {u}"),
        };
        self.check(ok, &cond)?;
        Ok(d)
    }
}

/// Evaluates bound `id` at `params`.
pub fn theory_value(id: BoundId, params: &BoundParams) -> Result<BoundValue> {
    let mut r = Reader {
        id,
        p: params,
        defaulted: Vec::new(),
    };
    let value = match id {
        BoundId::Prop1 => {
            let ln_m = r.ln_m(2)?;
            (r.horizon()? * ln_m).sqrt()
        }
        BoundId::Thm1 => {
            let ln_m = r.ln_m(3)?;
            let d = r.delta(1.0, true)?;
            (4.0 * ln_m + 25.0) / d
        }
        BoundId::Prop2 => {
            let ln_m = r.ln_m(4)?;
            let d = r.delta(0.25, false)?;
            let t = r.horizon()?;
            r.check(t >= ln_m / (16.0 * d * d), "T ≥ lnM/(16Δ²)")?;
            ln_m / (256.0 * d)
        }
        BoundId::Thm2 => {
            let ln_m = r.ln_m(3)?;
            let d = r.delta(1.0, false)?;
            let tau0 = r.need(params.tau0, "tau0")?;
            r.check(tau0 >= 1, "τ0 ≥ 1")?;
            let k = GapConstants::new(r.c0()?, r.c1()?);
            k.c1 * (tau0 as f64 * ln_m).sqrt() + (k.c2 * ln_m + k.c3 * (1.0 / d).ln() + k.c4) / d
        }
        BoundId::Cor1Exp => {
            let ln_m = r.ln_m(3)?;
            let d = r.delta(1.0, false)?;
            let k = GapConstants::new(r.c0()?, r.c1()?);
            (5.0 * k.c1 + 2.0 * k.c2) * ln_m / d + 2.0 * k.c3 * (1.0 / d).ln() / d + 2.0 * k.c4 / d
        }
        BoundId::Cor1Prob => {
            let ln_m = r.ln_m(3)?;
            let d = r.delta(1.0, false)?;
            let eps = r.need(params.epsilon, "epsilon")?;
            r.check(eps > 0.0 && eps < 1.0, "0 < ε < 1")?;
            let k = GapConstants::new(r.c0()?, r.c1()?);
            (k.c1 * 8f64.sqrt() + 2.0 * k.c2) * ln_m / d
                + k.c1 * (8.0 * ln_m * (1.0 / eps).ln()).sqrt() / d
                + 2.0 * k.c3 * (1.0 / d).ln() / d
                + 2.0 * k.c4 / d
        }
        BoundId::Prop3Const | BoundId::Prop3Dbl | BoundId::Thm4 => {
            let ln_m = r.ln_m(2)?;
            let t = r.horizon()?;
            let c0 = r.c0()?;
            let scale = (t * ln_m).sqrt();
            match id {
                BoundId::Prop3Const => (scale / (3.0 * c0)).min(t / 3.0),
                BoundId::Prop3Dbl => (scale / (6.0 * c0)).min(t / 12.0),
                _ => (scale / c0).min(t) / 3.0,
            }
        }
        BoundId::Prop4 => {
            let ln_m = r.ln_m(2)?;
            let t = r.horizon()?;
            let beta = r.need(params.beta, "beta")?;
            r.check((0.0..=1.0).contains(&beta), "0 ≤ β ≤ 1")?;
            let b = r.need(params.b, "B")?;
            r.check(b > 0.0 && b.is_finite(), "B > 0")?;
            let big_c1 = r.or_default(params.second_order_c1, "C1", 1.0);
            let big_c2 = r.or_default(params.second_order_c2, "C2", 1.0);
            r.check(big_c1 > 0.0 && big_c2 > 0.0, "C1 > 0, C2 > 0")?;
            let c3 = f64::max(1.0, 4.0 * big_c1 * big_c1);
            let c4 = 2.0 * big_c2;
            c3 * (b * ln_m).powf(1.0 / (2.0 - beta)) * t.powf((1.0 - beta) / (2.0 - beta))
                + c4 * ln_m
        }
        BoundId::Thm5 => {
            let ln_m = r.ln_m(2)?;
            let d = r.delta(f64::INFINITY, false)?;
            let c0 = r.c0()?;
            r.check(c0 >= 1.0, "c0 ≥ 1")?;
            let t = r.horizon()?;
            r.check(t >= 1.0 / (4.0 * d * d), "T ≥ 1/(4Δ²)")?;
            1.0 / (450.0 * c0.powi(4) * ln_m * ln_m * d)
        }
    };
    Ok(BoundValue {
        id,
        value,
        direction: id.direction(),
        validity: id.validity(),
        defaulted: r.defaulted,
    })
}
