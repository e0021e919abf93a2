//! Membership functions and quantifier definitions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nlg::quantify::{ApexLabel, ApexQuantifier, CountLabel, CountQuantifier};

/// Fuzzy set membership over the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Membership {
    /// Crisp point: 1 at the value, 0 elsewhere.
    Singleton(f64),
    /// `[a, b, c, d]`: rises on `[a, b]`, flat on `[b, c]`, falls on `[c, d]`.
    Trapezoid([f64; 4]),
    /// `[a, b]`: 0 up to `a`, rising to 1 at `b`, then 1 forever.
    RightShoulder([f64; 2]),
}

impl Membership {
    pub fn degree(&self, x: f64) -> f64 {
        match *self {
            Membership::Singleton(at) => {
                if x == at {
                    1.0
                } else {
                    0.0
                }
            }
            Membership::Trapezoid([a, b, c, d]) => {
                if x < a || x > d {
                    0.0
                } else if x < b {
                    (x - a) / (b - a)
                } else if x <= c {
                    1.0
                } else if d > c {
                    (d - x) / (d - c)
                } else {
                    1.0
                }
            }
            Membership::RightShoulder([a, b]) => {
                if x <= a {
                    0.0
                } else if x >= b {
                    1.0
                } else {
                    (x - a) / (b - a)
                }
            }
        }
    }

    pub(crate) fn check(&self, field: &str) -> Result<()> {
        let ok = match *self {
            Membership::Singleton(at) => at.is_finite(),
            Membership::Trapezoid([a, b, c, d]) => {
                [a, b, c, d].iter().all(|v| v.is_finite()) && a <= b && b <= c && c <= d
            }
            Membership::RightShoulder([a, b]) => a.is_finite() && b.is_finite() && a < b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConstraintViolation {
                field: field.to_string(),
                message: format!("malformed membership function {self:?}"),
            })
        }
    }
}

/// A relative quantifier `μ_Q : [0, 1] → [0, 1]` given by its breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseLinear {
    pub points: Vec<[f64; 2]>,
}

impl PiecewiseLinear {
    pub fn identity() -> Self {
        PiecewiseLinear {
            points: vec![[0.0, 0.0], [1.0, 1.0]],
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if x <= first[0] {
            return first[1];
        }
        if x >= last[0] {
            return last[1];
        }
        for w in pts.windows(2) {
            let ([x0, y0], [x1, y1]) = (w[0], w[1]);
            if x <= x1 {
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        }
        last[1]
    }

    pub(crate) fn check(&self, field: &str) -> Result<()> {
        let bad = |message: &str| Error::ConstraintViolation {
            field: field.to_string(),
            message: message.to_string(),
        };
        if self.points.len() < 2 {
            return Err(bad("needs at least two breakpoints"));
        }
        if self
            .points
            .iter()
            .any(|[x, y]| !(0.0..=1.0).contains(x) || !(0.0..=1.0).contains(y))
        {
            return Err(bad("breakpoints must lie in [0, 1] x [0, 1]"));
        }
        if self.points.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(bad("breakpoint abscissae must increase strictly"));
        }
        Ok(())
    }
}

impl Default for PiecewiseLinear {
    fn default() -> Self {
        Self::identity()
    }
}

/// Aggregate reliability cutpoints; values on a cutpoint are `normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelCutpoints {
    /// Aggregates strictly below are `low`.
    pub low_below: f64,
    /// Aggregates strictly above are `high`.
    pub high_above: f64,
}

impl Default for LabelCutpoints {
    fn default() -> Self {
        LabelCutpoints {
            low_below: 1.0 / 3.0,
            high_above: 2.0 / 3.0,
        }
    }
}

/// Every fuzzy quantifier the engine evaluates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantifierConfig {
    /// Relative quantifier applied to the mean per-tooth reliability.
    pub reliability: PiecewiseLinear,
    /// Proportion of fully developed right-quadrant teeth.
    pub count: CountQuantifier,
    /// CSM of tooth 45; `completely_closed` is the crisp zero case.
    pub apex: ApexQuantifier,
}

impl Default for QuantifierConfig {
    fn default() -> Self {
        let count = BTreeMap::from([
            (CountLabel::None, Membership::Singleton(0.0)),
            (CountLabel::Few, Membership::Trapezoid([0.0, 0.0, 0.3, 0.7])),
            (CountLabel::Most, Membership::Trapezoid([0.3, 0.7, 1.0, 1.0])),
            (CountLabel::All, Membership::Singleton(1.0)),
        ]);
        let apex = BTreeMap::from([
            (ApexLabel::FairlyClosed, Membership::Trapezoid([0.0, 0.0, 0.05, 0.09])),
            (ApexLabel::FairlyOpen, Membership::Trapezoid([0.05, 0.09, 0.21, 0.29])),
            (ApexLabel::QuiteOpen, Membership::RightShoulder([0.21, 0.29])),
        ]);
        QuantifierConfig {
            reliability: PiecewiseLinear::identity(),
            count: CountQuantifier(count),
            apex: ApexQuantifier(apex),
        }
    }
}
