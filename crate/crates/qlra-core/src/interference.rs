//! Coefficients of interference: the normalized deviation of each pair
//! conditional from its classical mixture value, their classification, and
//! the total-probability formula with interference terms.

use serde::Serialize;
use thiserror::Error;

use crate::context_data::{pair_label, ContextData, PAIRS};

/// How the nine coefficient magnitudes split against 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InterferenceClass {
    /// All `|λ| ≤ 1` (boundary values count here).
    Trigonometric,
    /// All `|λ| > 1`.
    Hyperbolic,
    /// Mixed magnitudes.
    HyperTrigonometric,
}

impl std::fmt::Display for InterferenceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InterferenceClass::Trigonometric => write!(f, "Trigonometric"),
            InterferenceClass::Hyperbolic => write!(f, "Hyperbolic"),
            InterferenceClass::HyperTrigonometric => write!(f, "HyperTrigonometric"),
        }
    }
}

/// The nine coefficients `λ_{l,ij}` (rows `l`, columns the pair slots) plus
/// the class. `near_boundary` lists entries within 1e-6 of ±1 so borderline
/// data is visible; classification itself uses exact comparisons.
#[derive(Debug, Clone, Serialize)]
pub struct InterferenceTable {
    pub coefficients: [[f64; 3]; 3],
    pub class: InterferenceClass,
    pub near_boundary: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterferenceError {
    #[error("degenerate denominator for coefficient (b{row}, {{{pair}}}): sqrt argument {value}")]
    DegenerateDenominator { row: usize, pair: String, value: f64 },
}

/// Coefficient of interference for row `l` and outcome pair `{i, j}`:
///
/// `[(pᵢ + pⱼ)·p_{l,ij} − (pᵢ·q_{li} + pⱼ·q_{lj})] / (2·√(pᵢ q_{li} pⱼ q_{lj}))`,
///
/// symmetric in `(i, j)`.
pub fn coefficient(
    data: &ContextData,
    l: usize,
    i: usize,
    j: usize,
) -> Result<f64, InterferenceError> {
    let slot = crate::context_data::pair_slot(i, j).expect("distinct indices in 0..3");
    // canonical order makes the evaluation bit-identical under (i, j) swap
    let (i, j) = (i.min(j), i.max(j));
    let (pi, pj) = (data.priors[i], data.priors[j]);
    let (qi, qj) = (data.singles[l][i], data.singles[l][j]);
    let radicand = pi * qi * pj * qj;
    if radicand <= 0.0 {
        return Err(InterferenceError::DegenerateDenominator {
            row: l + 1,
            pair: pair_label(slot).to_string(),
            value: radicand,
        });
    }
    let numerator = (pi + pj) * data.pairs[l][slot] - (pi * qi + pj * qj);
    Ok(numerator / (2.0 * radicand.sqrt()))
}

/// All nine coefficients and their classification.
pub fn table(data: &ContextData) -> Result<InterferenceTable, InterferenceError> {
    let mut coefficients = [[0.0; 3]; 3];
    let mut near_boundary = Vec::new();
    for l in 0..3 {
        for (slot, &(i, j)) in PAIRS.iter().enumerate() {
            let lam = coefficient(data, l, i, j)?;
            coefficients[l][slot] = lam;
            if (lam.abs() - 1.0).abs() <= 1e-6 {
                near_boundary.push((l, slot));
            }
        }
    }
    let all = coefficients.iter().flatten();
    let class = if all.clone().all(|&l| l.abs() <= 1.0) {
        InterferenceClass::Trigonometric
    } else if coefficients.iter().flatten().all(|&l| l.abs() > 1.0) {
        InterferenceClass::Hyperbolic
    } else {
        InterferenceClass::HyperTrigonometric
    };
    Ok(InterferenceTable { coefficients, class, near_boundary })
}

/// Total probability of the second observable's outcome `l` with the
/// interference cross terms:
///
/// `Σᵢ pᵢ·q_{li} + 2·Σ_{i<j} λ_{l,ij}·√(pᵢ q_{li} pⱼ q_{lj})`.
pub fn ftp_interference(data: &ContextData, tbl: &InterferenceTable, l: usize) -> f64 {
    let mut total = classical_ftp(data, l);
    for (slot, &(i, j)) in PAIRS.iter().enumerate() {
        let cross =
            data.priors[i] * data.singles[l][i] * data.priors[j] * data.singles[l][j];
        total += 2.0 * tbl.coefficients[l][slot] * cross.sqrt();
    }
    total
}

/// The classical total-probability sum `Σᵢ pᵢ·q_{li}`.
pub fn classical_ftp(data: &ContextData, l: usize) -> f64 {
    (0..3).map(|i| data.priors[i] * data.singles[l][i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Classically conditioned pair values: the mixture of the two singles.
    fn classical_pairs(data: &mut ContextData) {
        for l in 0..3 {
            for (slot, &(i, j)) in PAIRS.iter().enumerate() {
                let (pi, pj) = (data.priors[i], data.priors[j]);
                data.pairs[l][slot] =
                    (pi * data.singles[l][i] + pj * data.singles[l][j]) / (pi + pj);
            }
        }
    }

    #[test]
    fn classical_conditioning_gives_zero_coefficients() {
        let mut data = ContextData::uniform();
        data.priors = [0.2, 0.5, 0.3];
        data.singles = [[0.1, 0.3, 0.6], [0.7, 0.2, 0.1], [0.2, 0.5, 0.3]];
        classical_pairs(&mut data);
        let tbl = table(&data).unwrap();
        for l in 0..3 {
            for slot in 0..3 {
                assert!(tbl.coefficients[l][slot].abs() <= 1e-14);
            }
        }
        assert_eq!(tbl.class, InterferenceClass::Trigonometric);
    }

    #[test]
    fn uniform_data_has_no_interference() {
        let tbl = table(&ContextData::uniform()).unwrap();
        assert!(tbl.coefficients.iter().flatten().all(|&l| l.abs() <= 1e-15));
    }

    #[test]
    fn coefficient_is_symmetric_in_the_pair() {
        let mut data = ContextData::uniform();
        data.priors = [0.3, 0.45, 0.25];
        data.singles = [[0.2, 0.4, 0.35], [0.5, 0.25, 0.4], [0.3, 0.35, 0.25]];
        data.pairs[0][0] = 0.41;
        for l in 0..3 {
            for &(i, j) in &PAIRS {
                let a = coefficient(&data, l, i, j).unwrap();
                let b = coefficient(&data, l, j, i).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn zero_single_conditional_is_degenerate() {
        let mut data = ContextData::uniform();
        data.singles[0][0] = 0.0;
        let err = coefficient(&data, 0, 0, 1).unwrap_err();
        assert!(matches!(err, InterferenceError::DegenerateDenominator { .. }));
    }

    #[test]
    fn ftp_with_zero_interference_reduces_to_classical() {
        let mut data = ContextData::uniform();
        data.priors = [0.25, 0.6, 0.15];
        data.singles = [[0.3, 0.2, 0.5], [0.4, 0.5, 0.2], [0.3, 0.3, 0.3]];
        classical_pairs(&mut data);
        let tbl = table(&data).unwrap();
        for l in 0..3 {
            let with = ftp_interference(&data, &tbl, l);
            let classical = classical_ftp(&data, l);
            assert!((with - classical).abs() <= 1e-14);
        }
    }

    #[test]
    fn boundary_coefficient_classifies_trigonometric() {
        // dyadic values make λ = 1 exact: cross term √(1/256) = 1/16,
        // classical mixture 1/4, pair value 1/2
        let mut data = ContextData::uniform();
        data.priors = [0.25, 0.25, 0.5];
        data.singles = [[0.25, 0.25, 0.5]; 3];
        classical_pairs(&mut data);
        for l in 0..3 {
            data.pairs[l][0] = 0.5;
        }
        let tbl = table(&data).unwrap();
        assert_eq!(tbl.coefficients[0][0], 1.0);
        assert_eq!(tbl.class, InterferenceClass::Trigonometric);
        assert!(tbl.near_boundary.contains(&(0, 0)));
    }

    #[test]
    fn uniform_classical_ftp_is_one_third() {
        let data = ContextData::uniform();
        for l in 0..3 {
            assert!((classical_ftp(&data, l) - 1.0 / 3.0).abs() <= 1e-15);
        }
    }

    #[test]
    fn ftp_sums_to_one_for_quantum_data() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut done = 0;
        while done < 50 {
            let q = crate::context_data::random_complex_side(&mut rng);
            let Ok(data) = crate::context_data::from_quantum(&q, 1e-9) else { continue };
            done += 1;
            let tbl = table(&data).unwrap();
            let total: f64 = (0..3).map(|l| ftp_interference(&data, &tbl, l)).sum();
            assert!((total - 1.0).abs() <= 1e-10, "total {total}");
        }
    }

    #[test]
    fn dominant_prior_limit() {
        let delta = 1e-4;
        let mut data = ContextData::uniform();
        data.priors = [1.0 - 2.0 * delta, delta, delta];
        data.singles = [[0.2, 0.4, 0.35], [0.5, 0.25, 0.4], [0.3, 0.35, 0.25]];
        for l in 0..3 {
            let ftp = classical_ftp(&data, l);
            assert!((ftp - data.singles[l][0]).abs() <= 2.0 * delta);
        }
    }
}
