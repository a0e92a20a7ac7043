//! The statistical-data model: prior probabilities of one trichotomous
//! observable, single conditionals of the second given the first, and pair
//! conditionals given a disjunction of two outcomes. Includes validation,
//! the JSON file format, and a generator that derives such data from an
//! explicit basis and state.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{column, gram_residual, inner, sq_norm, Amplitude, Mat3, Vec3};

/// The three unordered outcome pairs, in canonical slot order.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Canonical slot of the unordered pair `{i, j}`, `i ≠ j`.
pub fn pair_slot(i: usize, j: usize) -> Option<usize> {
    match (i.min(j), i.max(j)) {
        (0, 1) => Some(0),
        (0, 2) => Some(1),
        (1, 2) => Some(2),
        _ => None,
    }
}

/// Display label of a pair slot ("12", "13", "23"), 1-indexed.
pub fn pair_label(slot: usize) -> &'static str {
    ["12", "13", "23"][slot]
}

/// Statistical data for two trichotomous observables.
///
/// `singles[l][i]` is the conditional probability of the second observable's
/// outcome `l` given the first observable's outcome `i`; `pairs[l][slot]`
/// conditions on the disjunction of the two outcomes in `PAIRS[slot]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextData {
    pub priors: [f64; 3],
    pub singles: [[f64; 3]; 3],
    pub pairs: [[f64; 3]; 3],
    pub b_priors: Option<[f64; 3]>,
}

/// One validated constraint: pass iff `residual ≤ tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstraintCheck {
    pub id: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Outcome of [`validate`]: every constraint with its residual.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub tol: f64,
    pub checks: Vec<ConstraintCheck>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<24} residual {:>12.3e}  {}",
                c.id,
                c.residual,
                if c.pass { "pass" } else { "FAIL" }
            )?;
        }
        write!(f, "verdict: {}", if self.pass() { "pass" } else { "FAIL" })
    }
}

/// Errors from parsing, construction and quantum-side generation.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("computed {what} = {value} is not an interior probability")]
    NonProbability { what: String, value: f64 },
    #[error("degenerate denominator in {what}: {value}")]
    DegenerateDenominator { what: String, value: f64 },
    #[error("quantum side is not orthonormal/normalized: residual {residual}")]
    InvalidQuantumSide { residual: f64 },
}

fn push_sum(checks: &mut Vec<ConstraintCheck>, id: String, sum: f64, tol: f64) {
    let residual = (sum - 1.0).abs();
    checks.push(ConstraintCheck { id, residual, tolerance: tol, pass: residual <= tol });
}

fn push_range(checks: &mut Vec<ConstraintCheck>, id: String, p: f64, tol: f64) {
    // open-interval constraint 0 < p < 1 with margin tol; residual is the
    // violation depth, zero when satisfied
    let residual = (tol - p).max(p - (1.0 - tol)).max(0.0);
    checks.push(ConstraintCheck { id, residual, tolerance: 0.0, pass: residual == 0.0 });
}

/// Check every invariant of [`ContextData`] and report each residual.
/// Failures are reported, never thrown.
pub fn validate(data: &ContextData, tol: f64) -> ValidationReport {
    let mut checks = Vec::new();

    push_sum(&mut checks, "priors.sum".into(), data.priors.iter().sum(), tol);
    for (i, &p) in data.priors.iter().enumerate() {
        push_range(&mut checks, format!("priors.range.a{}", i + 1), p, tol);
    }

    for l in 0..3 {
        push_sum(
            &mut checks,
            format!("singles.row_sum.b{}", l + 1),
            data.singles[l].iter().sum(),
            tol,
        );
    }
    for i in 0..3 {
        let col: f64 = (0..3).map(|l| data.singles[l][i]).sum();
        push_sum(&mut checks, format!("singles.col_sum.a{}", i + 1), col, tol);
    }
    for l in 0..3 {
        for i in 0..3 {
            push_range(
                &mut checks,
                format!("singles.range.b{}a{}", l + 1, i + 1),
                data.singles[l][i],
                tol,
            );
        }
    }

    for slot in 0..3 {
        let col: f64 = (0..3).map(|l| data.pairs[l][slot]).sum();
        push_sum(&mut checks, format!("pairs.col_sum.{}", pair_label(slot)), col, tol);
    }
    for l in 0..3 {
        for slot in 0..3 {
            push_range(
                &mut checks,
                format!("pairs.range.b{}.{}", l + 1, pair_label(slot)),
                data.pairs[l][slot],
                tol,
            );
        }
    }

    if let Some(b) = data.b_priors {
        push_sum(&mut checks, "b_priors.sum".into(), b.iter().sum(), tol);
        for (l, &p) in b.iter().enumerate() {
            push_range(&mut checks, format!("b_priors.range.b{}", l + 1), p, tol);
        }
    }

    ValidationReport { tol, checks }
}

/// Explicit quantum side: an orthonormal basis (columns of `basis`, written
/// in the canonical coordinate basis) and a unit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSide<S> {
    pub basis: Mat3<S>,
    pub state: Vec3<S>,
}

impl<S: Amplitude> QuantumSide<S> {
    /// Orthonormality of the basis and unit norm of the state, to `tol`.
    pub fn check(&self, tol: f64) -> Result<(), DataError> {
        let residual = gram_residual(&self.basis).max((sq_norm(&self.state) - 1.0).abs());
        if residual > tol {
            return Err(DataError::InvalidQuantumSide { residual });
        }
        Ok(())
    }

    /// Subamplitude table `ψ_{β_l α_i} = ⟨ψ|e_i⟩·(e_i)_l`, indexed `[l][i]`.
    pub fn subamplitudes(&self) -> Mat3<S> {
        let mut sub = [[S::zero(); 3]; 3];
        for i in 0..3 {
            let proj = inner(&self.state, &column(&self.basis, i));
            for l in 0..3 {
                sub[l][i] = proj * self.basis[l][i];
            }
        }
        sub
    }
}

/// Derive [`ContextData`] from an explicit basis and state.
///
/// In the hyperbolic field any of the squared moduli may leave `(0, 1)`;
/// such draws are rejected with [`DataError::NonProbability`], never clamped.
pub fn from_quantum<S: Amplitude>(q: &QuantumSide<S>, tol: f64) -> Result<ContextData, DataError> {
    q.check(1e-10)?;

    let interior = |what: &str, v: f64| -> Result<f64, DataError> {
        if !(v > tol && v < 1.0 - tol) {
            return Err(DataError::NonProbability { what: what.into(), value: v });
        }
        Ok(v)
    };

    let mut priors = [0.0; 3];
    for i in 0..3 {
        let p = inner(&q.state, &column(&q.basis, i)).sq_abs();
        priors[i] = interior(&format!("prior a{}", i + 1), p)?;
    }

    let mut singles = [[0.0; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            let p = q.basis[l][i].sq_abs();
            singles[l][i] = interior(&format!("single b{}a{}", l + 1, i + 1), p)?;
        }
    }

    let mut b_priors = [0.0; 3];
    for l in 0..3 {
        b_priors[l] = interior(&format!("b_prior b{}", l + 1), q.state[l].sq_abs())?;
    }

    let sub = q.subamplitudes();
    let mut pairs = [[0.0; 3]; 3];
    for l in 0..3 {
        for (slot, &(j, k)) in PAIRS.iter().enumerate() {
            let den = priors[j] + priors[k];
            if den <= tol {
                return Err(DataError::DegenerateDenominator {
                    what: format!("pair b{}.{}", l + 1, pair_label(slot)),
                    value: den,
                });
            }
            let num = (sub[l][j] + sub[l][k]).sq_abs();
            pairs[l][slot] =
                interior(&format!("pair b{}.{}", l + 1, pair_label(slot)), num / den)?;
        }
    }

    Ok(ContextData { priors, singles, pairs, b_priors: Some(b_priors) })
}

// ---------------------------------------------------------------------------
// file format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ContextDataFile {
    priors: [f64; 3],
    singles: [[f64; 3]; 3],
    pairs: BTreeMap<String, [f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_priors: Option<[f64; 3]>,
}

fn parse_pair_key(key: &str) -> Result<usize, DataError> {
    let digits: Vec<u32> = key.chars().filter_map(|c| c.to_digit(10)).collect();
    if digits.len() != 2 || key.len() != 2 {
        return Err(DataError::Schema(format!("invalid pairs key {key:?}")));
    }
    let (a, b) = (digits[0] as usize, digits[1] as usize);
    if a == b || !(1..=3).contains(&a) || !(1..=3).contains(&b) {
        return Err(DataError::Schema(format!("invalid pairs key {key:?}")));
    }
    // any textual order is accepted and canonicalized
    pair_slot(a - 1, b - 1).ok_or_else(|| DataError::Schema(format!("invalid pairs key {key:?}")))
}

impl ContextData {
    pub fn from_json(text: &str) -> Result<Self, DataError> {
        let raw: ContextDataFile = serde_json::from_str(text).map_err(|e| DataError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let mut pairs = [[f64::NAN; 3]; 3];
        for (key, col) in &raw.pairs {
            let slot = parse_pair_key(key)?;
            for l in 0..3 {
                if !pairs[l][slot].is_nan() && pairs[l][slot] != col[l] {
                    return Err(DataError::Schema(format!(
                        "conflicting values for pair {{{}}}",
                        pair_label(slot)
                    )));
                }
                pairs[l][slot] = col[l];
            }
        }
        for slot in 0..3 {
            if pairs[0][slot].is_nan() {
                return Err(DataError::Schema(format!(
                    "missing pairs entry \"{}\"",
                    pair_label(slot)
                )));
            }
        }
        Ok(ContextData {
            priors: raw.priors,
            singles: raw.singles,
            pairs,
            b_priors: raw.b_priors,
        })
    }

    pub fn to_json(&self) -> String {
        let mut pairs = BTreeMap::new();
        for slot in 0..3 {
            pairs.insert(
                pair_label(slot).to_string(),
                [self.pairs[0][slot], self.pairs[1][slot], self.pairs[2][slot]],
            );
        }
        let file = ContextDataFile {
            priors: self.priors,
            singles: self.singles,
            pairs,
            b_priors: self.b_priors,
        };
        serde_json::to_string_pretty(&file).expect("context data serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Uniform data: every probability 1/3. Passes validation; used as a
    /// smoke-test fixture.
    pub fn uniform() -> Self {
        let third = 1.0 / 3.0;
        ContextData {
            priors: [third; 3],
            singles: [[third; 3]; 3],
            pairs: [[third; 3]; 3],
            b_priors: None,
        }
    }
}

/// Random complex quantum side: Gram-Schmidt on Gaussian vectors plus a
/// random unit state. Used by round-trip suites.
pub fn random_complex_side<R: rand::Rng>(rng: &mut R) -> QuantumSide<crate::scalars::ComplexNumber> {
    use crate::scalars::ComplexNumber;
    use rand::distributions::Distribution;
    let normal = standard_normal();
    let rvec = |rng: &mut R| -> Vec3<ComplexNumber> {
        [0, 1, 2].map(|_| ComplexNumber::new(normal.sample(rng), normal.sample(rng)))
    };
    let mut cols: Vec<Vec3<ComplexNumber>> = Vec::new();
    while cols.len() < 3 {
        let mut w = rvec(rng);
        for c in &cols {
            let ip = inner(&w, c);
            for m in 0..3 {
                w[m] -= ip * c[m];
            }
        }
        let n = sq_norm(&w).sqrt();
        if n < 1e-6 {
            continue;
        }
        cols.push(w.map(|z| z.scale(1.0 / n)));
    }
    let mut basis = [[ComplexNumber::new(0.0, 0.0); 3]; 3];
    for (i, c) in cols.iter().enumerate() {
        for l in 0..3 {
            basis[l][i] = c[l];
        }
    }
    let mut state = rvec(rng);
    let n = sq_norm(&state).sqrt();
    state = state.map(|z| z.scale(1.0 / n));
    QuantumSide { basis, state }
}

// Box-Muller standard normal.
fn standard_normal() -> impl rand::distributions::Distribution<f64> {
    struct BoxMuller;
    impl rand::distributions::Distribution<f64> for BoxMuller {
        fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        }
    }
    BoxMuller
}
