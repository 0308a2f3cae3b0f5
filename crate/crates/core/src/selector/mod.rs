//! Algorithm selection: graph features, relative-performance scoring, and a
//! small Gini decision tree.

mod features;
mod tree;

pub use features::{extract_features, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use tree::{train_tree, training_risk_path, DecisionTree, TrainOptions};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SelectorError {
    #[error("algorithm `{0}` is not present in the sample")]
    MissingAlgorithm(String),
    #[error("tree tests feature {0} but the layout has {1} entries")]
    LayoutMismatch(usize, usize),
    #[error("tree file line {0}: {1}")]
    TreeParse(usize, String),
    #[error("tree structure is inconsistent: {0}")]
    BadTree(String),
}

/// Per-algorithm timings of one benchmark problem.
#[derive(Debug, Clone)]
pub struct RpSample {
    pub dataset: String,
    pub family: String,
    /// (algorithm id, time in seconds); times are positive
    pub times: Vec<(String, f64)>,
}

impl RpSample {
    pub fn fastest(&self) -> &str {
        self.times
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(a, _)| a.as_str())
            .expect("sample must contain at least one algorithm")
    }
}

/// Relative performance of `selected` on one sample: the fastest time
/// divided by the selected algorithm's time, in `(0, 1]`; 1 means the
/// selection tied the fastest, 0.5 means it took twice as long.
pub fn rp_score(s: &RpSample, selected: &str) -> Result<f64, SelectorError> {
    let sel = s
        .times
        .iter()
        .find(|(a, _)| a == selected)
        .ok_or_else(|| SelectorError::MissingAlgorithm(selected.to_string()))?;
    let fastest = s
        .times
        .iter()
        .map(|(_, t)| *t)
        .fold(f64::INFINITY, f64::min);
    Ok(fastest / sel.1)
}

/// Mean relative performance of a selection strategy, oversampled so every
/// problem family contributes equally (the mean of per-family means).
pub fn mean_rp<S>(samples: &[RpSample], mut strategy: S) -> Result<f64, SelectorError>
where
    S: FnMut(&RpSample) -> String,
{
    let mut families: Vec<&str> = samples.iter().map(|s| s.family.as_str()).collect();
    families.sort_unstable();
    families.dedup();
    let mut total = 0.0;
    for fam in &families {
        let mut sum = 0.0;
        let mut count = 0usize;
        for s in samples.iter().filter(|s| s.family == *fam) {
            sum += rp_score(s, &strategy(s))?;
            count += 1;
        }
        total += sum / count as f64;
    }
    Ok(total / families.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(family: &str, times: &[(&str, f64)]) -> RpSample {
        RpSample {
            dataset: "d".into(),
            family: family.into(),
            times: times.iter().map(|(a, t)| (a.to_string(), *t)).collect(),
        }
    }

    #[test]
    fn rp_hand_examples() {
        let s = sample("f", &[("A", 10.0), ("B", 5.0)]);
        assert_eq!(rp_score(&s, "A").unwrap(), 0.5);
        assert_eq!(rp_score(&s, "B").unwrap(), 1.0);
        let s = sample("f", &[("A", 4.0), ("B", 8.0), ("C", 16.0)]);
        assert_eq!(rp_score(&s, "C").unwrap(), 0.25);
    }

    #[test]
    fn rp_missing_algorithm() {
        let s = sample("f", &[("A", 1.0)]);
        assert!(matches!(
            rp_score(&s, "Z"),
            Err(SelectorError::MissingAlgorithm(_))
        ));
    }

    #[test]
    fn mean_rp_balances_families() {
        // family one: a single sample with rp 0.5; family two: three with rp 1
        let samples = vec![
            sample("one", &[("A", 10.0), ("B", 5.0)]),
            sample("two", &[("A", 1.0), ("B", 2.0)]),
            sample("two", &[("A", 3.0), ("B", 4.0)]),
            sample("two", &[("A", 5.0), ("B", 9.0)]),
        ];
        let got = mean_rp(&samples, |_| "A".to_string()).unwrap();
        assert_eq!(got, 0.75);
    }

    #[test]
    fn mean_rp_of_always_fastest_is_one() {
        let samples = vec![
            sample("one", &[("A", 10.0), ("B", 5.0)]),
            sample("two", &[("A", 1.0), ("B", 2.0)]),
        ];
        let got = mean_rp(&samples, |s| s.fastest().to_string()).unwrap();
        assert_eq!(got, 1.0);
    }

    #[test]
    fn single_sample_mean_is_its_score() {
        let samples = vec![sample("one", &[("A", 10.0), ("B", 5.0)])];
        assert_eq!(mean_rp(&samples, |_| "A".into()).unwrap(), 0.5);
    }
}
