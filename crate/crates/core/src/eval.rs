//! Prediction risk and fit metrics.

use crate::data::{mean_and_risk, Dataset, Tree};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub l2_risk: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// Mean squared residual of the tree's predictions on `data`.
pub fn empirical_l2_risk(tree: &Tree, data: &Dataset) -> Result<f64> {
    let predictions = tree.predict_dataset(data)?;
    if predictions.is_empty() {
        return Err(Error::empty("cannot evaluate on an empty dataset"));
    }
    let total: f64 = predictions.iter().zip(data.response()).map(|(p, y)| (y - p) * (y - p)).sum();
    Ok(total / predictions.len() as f64)
}

/// `1 − MSE / Var(y)` with the divide-by-n variance of `data`'s responses.
pub fn r_squared(tree: &Tree, data: &Dataset) -> Result<f64> {
    Ok(evaluate(tree, data)?.r_squared)
}

pub fn evaluate(tree: &Tree, data: &Dataset) -> Result<EvalResult> {
    let l2_risk = empirical_l2_risk(tree, data)?;
    let (_, variance) = mean_and_risk(data.response().iter().copied()).expect("non-empty dataset");
    if variance == 0.0 {
        return Err(Error::invalid("R² is undefined for a constant response"));
    }
    Ok(EvalResult { l2_risk, r_squared: 1.0 - l2_risk / variance, n: data.n_rows() })
}

/// Test risk minus training risk.
pub fn generalization_gap(tree: &Tree, train: &Dataset, test: &Dataset) -> Result<f64> {
    Ok(empirical_l2_risk(tree, test)? - empirical_l2_risk(tree, train)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::CriterionKind;
    use crate::grow::{grow, GrowConfig};

    fn step_data() -> Dataset {
        Dataset::univariate(vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn stump_is_perfect_on_training_data() {
        let d = step_data();
        let tree = grow(&d, &GrowConfig::new(CriterionKind::Covrt, 1).min_node_size(1)).unwrap();
        assert_eq!(empirical_l2_risk(&tree, &d).unwrap(), 0.0);
        assert_eq!(r_squared(&tree, &d).unwrap(), 1.0);
        assert_eq!(generalization_gap(&tree, &d, &d).unwrap(), 0.0);
    }

    #[test]
    fn root_only_tree() {
        let d = step_data();
        let tree = grow(&d, &GrowConfig::new(CriterionKind::Cart, 0)).unwrap();
        assert_eq!(empirical_l2_risk(&tree, &d).unwrap(), 0.25);
        assert_eq!(r_squared(&tree, &d).unwrap(), 0.0);
        let shifted = Dataset::univariate(vec![1.0, 2.0], vec![2.0, 4.0]).unwrap();
        // Mean 0.5 against responses 2 and 4: MSE 7.25, variance 1.
        assert_eq!(r_squared(&tree, &shifted).unwrap(), -6.25);
    }

    #[test]
    fn constant_response_has_no_r_squared() {
        let d = step_data();
        let tree = grow(&d, &GrowConfig::new(CriterionKind::Cart, 0)).unwrap();
        let flat = Dataset::univariate(vec![1.0, 2.0], vec![3.0, 3.0]).unwrap();
        assert!(r_squared(&tree, &flat).is_err());
        assert!(empirical_l2_risk(&tree, &flat).is_ok());
    }
}
