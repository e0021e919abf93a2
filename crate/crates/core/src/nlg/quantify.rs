//! Fuzzy quantifiers turning counts and apex openness into words.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reliability::fuzzy::Membership;

/// How many right-quadrant teeth are fully developed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountLabel {
    None,
    Few,
    Most,
    All,
}

impl CountLabel {
    fn is_extreme(self) -> bool {
        matches!(self, CountLabel::None | CountLabel::All)
    }
}

/// Openness of the apex of tooth 45, ordered from closed to open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApexLabel {
    CompletelyClosed,
    FairlyClosed,
    FairlyOpen,
    QuiteOpen,
}

/// Membership functions over the proportion of developed teeth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountQuantifier(pub BTreeMap<CountLabel, Membership>);

/// Membership functions of the graded apex labels over CSM(45) > 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ApexQuantifier(pub BTreeMap<ApexLabel, Membership>);

/// Label of maximum membership for `developed` out of `total` teeth.
///
/// Ties go to `none`/`all` first, then to the earlier label.
pub fn quantify_count(developed: u32, total: u32, lexicon: &CountQuantifier) -> Result<CountLabel> {
    if total == 0 || developed > total {
        return Err(Error::InvalidCount { developed, total });
    }
    let proportion = f64::from(developed) / f64::from(total);
    let mut best: Option<(CountLabel, f64)> = None;
    for (&label, m) in &lexicon.0 {
        let degree = m.degree(proportion);
        best = match best {
            None => Some((label, degree)),
            Some((b, bd)) if degree > bd || (degree == bd && label.is_extreme() && !b.is_extreme()) => {
                Some((label, degree))
            }
            keep => keep,
        };
    }
    best.map(|(label, _)| label)
        .ok_or(Error::InvalidCount { developed, total })
}

/// Apex label for the CSM of tooth 45.
///
/// Zero is crisply `completely_closed`; otherwise the graded label of maximum
/// membership wins, with ties going to the more open label.
pub fn quantify_apex(csm45: f64, lexicon: &ApexQuantifier) -> Result<ApexLabel> {
    if !csm45.is_finite() || csm45 < 0.0 {
        return Err(Error::InvalidCsm(csm45));
    }
    if csm45 == 0.0 {
        return Ok(ApexLabel::CompletelyClosed);
    }
    let mut best = (ApexLabel::FairlyClosed, f64::NEG_INFINITY);
    for (&label, m) in &lexicon.0 {
        let degree = m.degree(csm45);
        if degree >= best.1 {
            best = (label, degree);
        }
    }
    Ok(best.0)
}

impl CountQuantifier {
    pub(crate) fn check(&self) -> Result<()> {
        let labels: Vec<CountLabel> = self.0.keys().copied().collect();
        if labels != [CountLabel::None, CountLabel::Few, CountLabel::Most, CountLabel::All] {
            return Err(Error::ConstraintViolation {
                field: "quantifiers.count".into(),
                message: "exactly the labels none, few, most, all are required".into(),
            });
        }
        for m in self.0.values() {
            m.check("quantifiers.count")?;
        }
        // every proportion needs a label with non-zero membership
        for i in 0..=1000 {
            let x = f64::from(i) / 1000.0;
            if self.0.values().all(|m| m.degree(x) <= 0.0) {
                return Err(Error::ConstraintViolation {
                    field: "quantifiers.count".into(),
                    message: format!("proportion {x} has no label"),
                });
            }
        }
        Ok(())
    }
}

impl ApexQuantifier {
    pub(crate) fn check(&self) -> Result<()> {
        let labels: Vec<ApexLabel> = self.0.keys().copied().collect();
        if labels != [ApexLabel::FairlyClosed, ApexLabel::FairlyOpen, ApexLabel::QuiteOpen] {
            return Err(Error::ConstraintViolation {
                field: "quantifiers.apex".into(),
                message: "exactly the graded labels fairly_closed, fairly_open, quite_open are required"
                    .into(),
            });
        }
        for m in self.0.values() {
            m.check("quantifiers.apex")?;
        }
        for i in 1..=2000 {
            let x = f64::from(i) / 1000.0;
            if self.0.values().all(|m| m.degree(x) <= 0.0) {
                return Err(Error::ConstraintViolation {
                    field: "quantifiers.apex".into(),
                    message: format!("csm {x} has no label"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reliability::fuzzy::QuantifierConfig;
    use proptest::prelude::*;

    fn defaults() -> QuantifierConfig {
        QuantifierConfig::default()
    }

    #[test]
    fn count_examples() {
        let q = defaults().count;
        assert_eq!(quantify_count(0, 5, &q).unwrap(), CountLabel::None);
        assert_eq!(quantify_count(5, 5, &q).unwrap(), CountLabel::All);
        // at 0.6: few = (0.7-0.6)/0.4 = 0.25, most = (0.6-0.3)/0.4 = 0.75
        assert_eq!(quantify_count(3, 5, &q).unwrap(), CountLabel::Most);
        assert_eq!(quantify_count(1, 5, &q).unwrap(), CountLabel::Few);
        assert_eq!(quantify_count(0, 0, &q).unwrap_err().code(), "INVALID_COUNT");
        assert_eq!(quantify_count(6, 5, &q).unwrap_err().code(), "INVALID_COUNT");
    }

    #[test]
    fn apex_examples() {
        let q = defaults().apex;
        assert_eq!(quantify_apex(0.0, &q).unwrap(), ApexLabel::CompletelyClosed);
        assert_eq!(quantify_apex(0.05, &q).unwrap(), ApexLabel::FairlyClosed);
        assert_eq!(quantify_apex(0.15, &q).unwrap(), ApexLabel::FairlyOpen);
        assert_eq!(quantify_apex(0.4, &q).unwrap(), ApexLabel::QuiteOpen);
        // crossover is a tie and goes to the more open label
        assert_eq!(quantify_apex(0.07, &q).unwrap(), ApexLabel::FairlyOpen);
        assert_eq!(quantify_apex(-0.1, &q).unwrap_err().code(), "INVALID_CSM");
    }

    #[test]
    fn default_quantifiers_cover_domain() {
        defaults().count.check().unwrap();
        defaults().apex.check().unwrap();
    }

    proptest! {
        #[test]
        fn count_label_monotone(total in 1u32..12, a in 0u32..12, b in 0u32..12) {
            let (lo, hi) = (a.min(b).min(total), a.max(b).min(total));
            let q = defaults().count;
            prop_assert!(quantify_count(lo, total, &q).unwrap() <= quantify_count(hi, total, &q).unwrap());
        }

        #[test]
        fn apex_label_monotone(a in 0.0f64..1.5, b in 0.0f64..1.5) {
            let q = defaults().apex;
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(quantify_apex(lo, &q).unwrap() <= quantify_apex(hi, &q).unwrap());
        }
    }
}
