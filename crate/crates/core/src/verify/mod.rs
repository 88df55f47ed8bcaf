//! Equivalence engine: ratio statistics, refinement stability and verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod lemmas;

pub use lemmas::{run_lemma_suite, run_lemma_suite_at, CATALOG};

pub const FLOOR: f64 = 1e-300;
pub const LEMMA_THRESHOLD: f64 = 10.0;
pub const PIPELINE_THRESHOLD: f64 = 50.0;
/// Allowed growth of the spread (or of C_max) from n to 2n.
pub const REFINE_GROWTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    /// Worst of two verdicts: fail beats inconclusive beats pass.
    pub fn worst(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub index: String,
    #[serde(with = "num")]
    pub lhs: f64,
    #[serde(with = "num")]
    pub rhs: f64,
    #[serde(with = "num")]
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub label: String,
    pub samples: Vec<Sample>,
    #[serde(with = "num")]
    pub ratio_min: f64,
    #[serde(with = "num")]
    pub ratio_max: f64,
    #[serde(with = "num")]
    pub spread: f64,
    pub floor_skipped: usize,
    /// Samples dropped because a side was infinite or NaN.
    pub skipped: usize,
    /// `(spread_n, spread_2n)`, or `(C_max_n, C_max_2n)` for one-sided checks.
    #[serde(with = "num_pair")]
    pub refinement: Option<(f64, f64)>,
    #[serde(with = "num")]
    pub threshold: f64,
    pub one_sided: bool,
    pub seed: Option<u64>,
    pub notes: Vec<String>,
    pub verdict: Verdict,
}

/// JSON has no NaN or infinities; they travel as the strings "nan", "inf" and "-inf".
mod num {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Text(String),
    }

    pub(super) fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else if x.is_nan() {
            Repr::Text("nan".into())
        } else if x > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    pub(super) fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "nan" => Ok(f64::NAN),
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => Err(E::custom(format!("not a number: {t}"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

mod num_pair {
    use super::num::{from_repr, to_repr, Repr};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<(f64, f64)>, s: S) -> Result<S::Ok, S::Error> {
        x.map(|(a, b)| (to_repr(a), to_repr(b))).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<(f64, f64)>, D::Error> {
        match Option::<(Repr, Repr)>::deserialize(d)? {
            None => Ok(None),
            Some((a, b)) => Ok(Some((from_repr(a)?, from_repr(b)?))),
        }
    }
}

fn stats(samples: &[Sample]) -> (f64, f64) {
    samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.ratio), hi.max(s.ratio)))
}

impl EquivalenceReport {
    pub(crate) fn build(label: &str, lhs: &[(String, f64)], rhs: &[(String, f64)], threshold: f64, floor: f64, one_sided: bool) -> Result<Self> {
        if lhs.len() != rhs.len() || lhs.iter().zip(rhs).any(|(a, b)| a.0 != b.0) {
            return Err(Error::Mismatch(format!("{label}: lhs and rhs are indexed differently")));
        }
        if !(threshold > 1.0) {
            return Err(Error::Param(format!("threshold must be > 1, got {threshold}")));
        }
        let mut samples = Vec::with_capacity(lhs.len());
        let (mut floor_skipped, mut skipped) = (0, 0);
        for ((idx, l), (_, r)) in lhs.iter().zip(rhs) {
            let (l, r) = (*l, *r);
            if l.is_nan() || r.is_nan() || l.is_infinite() || r.is_infinite() || l < 0.0 || r < 0.0 {
                skipped += 1;
                continue;
            }
            if l < floor && r < floor {
                floor_skipped += 1;
                continue;
            }
            let ratio = if r < floor { f64::INFINITY } else { l / r };
            samples.push(Sample { index: idx.clone(), lhs: l, rhs: r, ratio });
        }
        let mut rep = EquivalenceReport {
            label: label.to_string(),
            samples,
            ratio_min: f64::NAN,
            ratio_max: f64::NAN,
            spread: f64::NAN,
            floor_skipped,
            skipped,
            refinement: None,
            threshold,
            one_sided,
            seed: None,
            notes: Vec::new(),
            verdict: Verdict::Inconclusive,
        };
        rep.restat();
        Ok(rep)
    }

    fn restat(&mut self) {
        if self.samples.is_empty() {
            self.ratio_min = f64::NAN;
            self.ratio_max = f64::NAN;
            self.spread = f64::NAN;
        } else {
            let (lo, hi) = stats(&self.samples);
            self.ratio_min = lo;
            self.ratio_max = hi;
            self.spread = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        }
        self.verdict = self.decide();
    }

    /// Headline statistic: the spread, or C_max for one-sided checks.
    pub fn statistic(&self) -> f64 {
        if self.one_sided {
            self.ratio_max
        } else {
            self.spread
        }
    }

    fn decide(&self) -> Verdict {
        if self.samples.is_empty() {
            return Verdict::Inconclusive;
        }
        let s = self.statistic();
        if !s.is_finite() {
            return Verdict::Fail;
        }
        match self.refinement {
            Some((a, b)) => {
                let stable = b.is_finite() && b <= REFINE_GROWTH * a.max(1.0);
                if !stable {
                    Verdict::Fail
                } else if self.one_sided || (a <= self.threshold && b <= self.threshold) {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            None if self.one_sided => Verdict::Inconclusive,
            None if s <= self.threshold => Verdict::Pass,
            None => Verdict::Fail,
        }
    }

    /// Attaches the statistic of the same check at 2n.
    pub fn with_refinement(mut self, fine: &EquivalenceReport) -> Self {
        let f = if fine.samples.is_empty() { f64::NAN } else { fine.statistic() };
        self.refinement = Some((self.statistic(), f));
        self.verdict = if fine.samples.is_empty() { Verdict::Inconclusive } else { self.decide() };
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Param(format!("bad report line: {e}")))
    }

    /// One-line summary for terminals and logs.
    pub fn summary(&self) -> String {
        let stat = if self.one_sided { "C_max" } else { "spread" };
        let refine = match self.refinement {
            Some((a, b)) => format!(" n:{a:.3} 2n:{b:.3}"),
            None => String::new(),
        };
        format!(
            "{} {}: {stat}={:.4} samples={}{refine}",
            self.verdict.name(),
            self.label,
            self.statistic(),
            self.samples.len()
        )
    }
}

/// Two-sided check: `lhs ~ rhs` with spread at most `threshold`.
pub fn check_equivalence(label: &str, lhs: &[(String, f64)], rhs: &[(String, f64)], threshold: f64) -> Result<EquivalenceReport> {
    EquivalenceReport::build(label, lhs, rhs, threshold, FLOOR, false)
}

/// Same with an explicit floor, used for the floor-sensitivity check.
pub fn check_equivalence_floor(
    label: &str,
    lhs: &[(String, f64)],
    rhs: &[(String, f64)],
    threshold: f64,
    floor: f64,
) -> Result<EquivalenceReport> {
    EquivalenceReport::build(label, lhs, rhs, threshold, floor, false)
}

/// One-sided check `lhs <= C rhs`: reports C_max only.
pub fn check_bound(label: &str, lhs: &[(String, f64)], rhs: &[(String, f64)]) -> Result<EquivalenceReport> {
    EquivalenceReport::build(label, lhs, rhs, f64::INFINITY, FLOOR, true)
}

pub fn indexed(prefix: &str, values: impl IntoIterator<Item = (f64, f64)>) -> (Vec<(String, f64)>, Vec<(String, f64)>) {
    values
        .into_iter()
        .enumerate()
        .map(|(i, (l, r))| ((format!("{prefix}{i}"), l), (format!("{prefix}{i}"), r)))
        .unzip()
}

/// Reports as a CSV summary with a final verdict line.
pub fn summary_csv(reports: &[EquivalenceReport]) -> String {
    let mut s = String::from("label,samples,ratio_min,ratio_max,spread,refine_n,refine_2n,floor_skipped,skipped,verdict\n");
    for r in reports {
        let (a, b) = r.refinement.unwrap_or((f64::NAN, f64::NAN));
        s.push_str(&format!(
            "{},{},{:e},{:e},{:e},{:e},{:e},{},{},{}\n",
            r.label,
            r.samples.len(),
            r.ratio_min,
            r.ratio_max,
            r.spread,
            a,
            b,
            r.floor_skipped,
            r.skipped,
            r.verdict.name()
        ));
    }
    s.push_str(&format!("# verdict,{}\n", overall(reports).name()));
    s
}

pub fn overall(reports: &[EquivalenceReport]) -> Verdict {
    if reports.is_empty() {
        return Verdict::Inconclusive;
    }
    reports.iter().fold(Verdict::Pass, |v, r| v.worst(r.verdict))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_values_survive_json() {
        let empty = check_equivalence("empty", &[], &[], 10.0).unwrap();
        assert!(empty.spread.is_nan());
        let back = EquivalenceReport::from_json(&empty.to_json()).unwrap();
        assert!(back.spread.is_nan() && back.verdict == Verdict::Inconclusive);

        let l = vec![("a".to_string(), 1.0), ("b".to_string(), 2.0)];
        let r = vec![("a".to_string(), 0.0), ("b".to_string(), 1.0)];
        let mut rep = check_bound("inf", &l, &r).unwrap();
        rep.refinement = Some((f64::INFINITY, f64::NEG_INFINITY));
        let back = EquivalenceReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back.refinement, rep.refinement);
        assert_eq!(back.ratio_max.to_bits(), rep.ratio_max.to_bits());
        assert!(EquivalenceReport::from_json(&rep.to_json().replace("\"inf\"", "\"huge\"")).is_err());
    }
}
