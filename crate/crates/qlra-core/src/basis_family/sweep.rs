//! Deterministic random sampling of family instances, sweep records, and the
//! closed-form-versus-direct oracle cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    closed_form_pairs, closed_form_priors, closed_form_singles, quantum_side, BasisParams,
    FamilyError, StateParams,
};
use crate::context_data::{from_quantum, validate, ContextData, DataError};
use crate::interference::{table, InterferenceClass};
use crate::qlra::{represent, RepresentError, Tolerances};
use crate::scalars::{gram_residual, sq_norm, ComplexNumber, Field, HyperbolicNumber};

/// Sampling ranges and acceptance policy for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct ParamRanges {
    /// Magnitude range for the free `a` parameters.
    pub magnitude: (f64, f64),
    /// Range for the phases `u, s, t` and the state phases `γ`.
    pub phase: (f64, f64),
    /// Magnitude range for the state weights `v` (sign drawn separately).
    pub v_abs: (f64, f64),
    /// Interior margin every generated probability must respect.
    pub margin: f64,
    /// Conditioning floor for the orthogonality-system denominator.
    pub min_denominator: f64,
    pub max_attempts: u32,
}

impl Default for ParamRanges {
    fn default() -> Self {
        ParamRanges {
            magnitude: (0.2, 5.0),
            phase: (-1.5, 1.5),
            v_abs: (0.1, 5.0),
            margin: 1e-8,
            min_denominator: 1e-6,
            max_attempts: 10_000,
        }
    }
}

/// An accepted random draw together with its generated data.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub basis: BasisParams,
    pub state: StateParams,
    pub data: ContextData,
    /// Draws consumed, including rejected ones.
    pub attempts: u32,
}

fn draw_params<R: Rng>(rng: &mut R, ranges: &ParamRanges, field: Field) -> (BasisParams, StateParams) {
    let mut signed_mag = |lo: f64, hi: f64| {
        let m = rng.gen_range(lo..hi);
        if rng.gen::<bool>() {
            m
        } else {
            -m
        }
    };
    let (mlo, mhi) = ranges.magnitude;
    let (s23, s32, s33) = (signed_mag(mlo, mhi), signed_mag(mlo, mhi), signed_mag(mlo, mhi));
    let (vlo, vhi) = ranges.v_abs;
    let v = [signed_mag(vlo, vhi), signed_mag(vlo, vhi), signed_mag(vlo, vhi)];
    let (plo, phi) = ranges.phase;
    let mut ph = || rng.gen_range(plo..phi);
    let basis = BasisParams::from_signed(s23, s32, s33, ph(), ph(), ph(), field);
    let state = StateParams { v, gamma: [ph(), ph(), ph()] };
    (basis, state)
}

fn try_instance(
    basis: &BasisParams,
    state: &StateParams,
    ranges: &ParamRanges,
) -> Option<ContextData> {
    let denom = {
        let (s23, s32, s33) = (basis.s23(), basis.s32(), basis.s33());
        s23 * s23 * s32 + s32 * s33 * s33 + s33
    };
    if denom.abs() < ranges.min_denominator {
        return None;
    }
    let data = match basis.field {
        Field::Hyperbolic => {
            let q = quantum_side::<HyperbolicNumber>(basis, state).ok()?;
            from_quantum(&q, ranges.margin).ok()?
        }
        Field::Complex => {
            let q = quantum_side::<ComplexNumber>(basis, state).ok()?;
            from_quantum(&q, ranges.margin).ok()?
        }
    };
    if !validate(&data, 1e-9).pass() {
        return None;
    }
    Some(data)
}

/// Rejection-sample one admissible instance. Deterministic for a given RNG
/// state; the same seed always yields the same instance.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    ranges: &ParamRanges,
    field: Field,
) -> Result<RandomInstance, FamilyError> {
    for attempt in 1..=ranges.max_attempts {
        let (basis, state) = draw_params(rng, ranges, field);
        if let Some(data) = try_instance(&basis, &state, ranges) {
            return Ok(RandomInstance { basis, state, data, attempts: attempt });
        }
    }
    Err(FamilyError::ExhaustedRejection { attempts: ranges.max_attempts })
}

/// Per-instance seed: decorrelates instances while keeping each one
/// reproducible from `(base_seed, index)`.
pub fn instance_seed(base_seed: u64, index: u32) -> u64 {
    base_seed ^ (u64::from(index) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One sweep record: parameters, classification, admissibility and residuals.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub index: u32,
    pub seed: u64,
    pub field: Field,
    pub s23: f64,
    pub s32: f64,
    pub s33: f64,
    pub u: f64,
    pub s: f64,
    pub t: f64,
    pub v: [f64; 3],
    pub gamma: [f64; 3],
    pub attempts: u32,
    pub priors: [f64; 3],
    pub class: InterferenceClass,
    pub max_abs_coefficient: f64,
    pub admissible: bool,
    pub rejection: Option<String>,
    pub born_residual: Option<f64>,
    pub unitarity_residual: Option<f64>,
}

impl SweepRecord {
    pub fn csv_header() -> &'static str {
        "index,seed,field,s23,s32,s33,u,s,t,v1,v2,v3,gamma1,gamma2,gamma3,attempts,\
         prior1,prior2,prior3,class,max_abs_coefficient,admissible,born_residual,\
         unitarity_residual,rejection"
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.index,
            self.seed,
            self.field,
            self.s23,
            self.s32,
            self.s33,
            self.u,
            self.s,
            self.t,
            self.v[0],
            self.v[1],
            self.v[2],
            self.gamma[0],
            self.gamma[1],
            self.gamma[2],
            self.attempts,
            self.priors[0],
            self.priors[1],
            self.priors[2],
            self.class,
            self.max_abs_coefficient,
            self.admissible,
            opt(self.born_residual),
            opt(self.unitarity_residual),
            self.rejection.as_deref().unwrap_or(""),
        )
    }
}

/// Sweep result plus acceptance-rate bookkeeping.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub total_attempts: u64,
    pub acceptance_rate: f64,
}

/// Generate `count` records; instance `k` is reproducible from
/// `instance_seed(seed, k)` alone.
pub fn run_sweep(
    count: u32,
    seed: u64,
    ranges: &ParamRanges,
    field: Field,
    tols: Tolerances,
) -> Result<SweepReport, FamilyError> {
    let mut records = Vec::with_capacity(count as usize);
    let mut total_attempts = 0u64;
    for index in 0..count {
        let iseed = instance_seed(seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(iseed);
        let inst = random_instance(&mut rng, ranges, field)?;
        total_attempts += u64::from(inst.attempts);
        let tbl = table(&inst.data).map_err(|e| FamilyError::Data(DataError::Schema(e.to_string())))?;
        let max_abs = tbl
            .coefficients
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let record = match represent(&inst.data, tols) {
            Ok(rep) => {
                let diag = rep.diagnostics();
                let b = inst.data.b_priors.expect("generated data carries b_priors");
                let born = (0..3)
                    .map(|l| (rep.reconstructed_b()[l] - b[l]).abs())
                    .fold(0.0, f64::max);
                SweepRecord {
                    index,
                    seed: iseed,
                    field,
                    s23: inst.basis.s23(),
                    s32: inst.basis.s32(),
                    s33: inst.basis.s33(),
                    u: inst.basis.u,
                    s: inst.basis.s,
                    t: inst.basis.t,
                    v: inst.state.v,
                    gamma: inst.state.gamma,
                    attempts: inst.attempts,
                    priors: inst.data.priors,
                    class: tbl.class,
                    max_abs_coefficient: max_abs,
                    admissible: true,
                    rejection: None,
                    born_residual: Some(born),
                    unitarity_residual: Some(diag.unitarity.max(diag.transition_sums)),
                }
            }
            Err(err) => SweepRecord {
                index,
                seed: iseed,
                field,
                s23: inst.basis.s23(),
                s32: inst.basis.s32(),
                s33: inst.basis.s33(),
                u: inst.basis.u,
                s: inst.basis.s,
                t: inst.basis.t,
                v: inst.state.v,
                gamma: inst.state.gamma,
                attempts: inst.attempts,
                priors: inst.data.priors,
                class: tbl.class,
                max_abs_coefficient: max_abs,
                admissible: false,
                rejection: Some(err.to_string()),
                born_residual: None,
                unitarity_residual: None,
            },
        };
        records.push(record);
    }
    let acceptance_rate = f64::from(count) / total_attempts.max(1) as f64;
    Ok(SweepReport { records, total_attempts, acceptance_rate })
}

/// First failing instance of an oracle run, reproducible from its seed.
#[derive(Debug, Clone, Serialize)]
pub struct OracleFailure {
    pub index: u32,
    pub seed: u64,
    pub basis: BasisParams,
    pub state: StateParams,
    pub detail: String,
}

/// Worst residuals over an oracle run.
#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub trials: u32,
    pub field: Field,
    /// Worst relative gap between any closed-form probability and its direct
    /// inner-product counterpart.
    pub max_closed_vs_direct: f64,
    /// Worst Gram residual of a constructed basis.
    pub max_gram_residual: f64,
    /// Worst gap between reconstructed and generated Born probabilities.
    pub max_born_residual: f64,
    /// Worst solved-representation unitarity residual.
    pub max_unitarity_residual: f64,
    pub failure: Option<OracleFailure>,
}

impl OracleSummary {
    pub fn pass(&self) -> bool {
        self.failure.is_none()
    }
}

/// Tolerances for [`oracle_check`].
#[derive(Debug, Clone, Copy)]
pub struct OracleTolerances {
    /// Relative tolerance for closed-form vs direct probabilities.
    pub closed_vs_direct: f64,
    /// Gram residual bound for constructed bases.
    pub gram: f64,
    /// Born round-trip bound for solved representations.
    pub born: f64,
}

impl Default for OracleTolerances {
    fn default() -> Self {
        OracleTolerances { closed_vs_direct: 1e-9, gram: 1e-10, born: 1e-8 }
    }
}

fn gram_of(basis: &BasisParams, state: &StateParams) -> Result<f64, FamilyError> {
    Ok(match basis.field {
        Field::Hyperbolic => {
            let q = quantum_side::<HyperbolicNumber>(basis, state)?;
            gram_residual(&q.basis).max((sq_norm(&q.state) - 1.0).abs())
        }
        Field::Complex => {
            let q = quantum_side::<ComplexNumber>(basis, state)?;
            gram_residual(&q.basis).max((sq_norm(&q.state) - 1.0).abs())
        }
    })
}

/// Cross-check every closed form against the direct computation and run the
/// solver round trip, over `trials` reproducible instances.
pub fn oracle_check(
    trials: u32,
    seed: u64,
    field: Field,
    ranges: &ParamRanges,
    tols: OracleTolerances,
    solver_tols: Tolerances,
) -> Result<OracleSummary, FamilyError> {
    let mut summary = OracleSummary {
        trials,
        field,
        max_closed_vs_direct: 0.0,
        max_gram_residual: 0.0,
        max_born_residual: 0.0,
        max_unitarity_residual: 0.0,
        failure: None,
    };

    for index in 0..trials {
        let iseed = instance_seed(seed, index);
        let mut rng = ChaCha8Rng::seed_from_u64(iseed);
        let inst = random_instance(&mut rng, ranges, field)?;
        let fail = |detail: String, summary: &mut OracleSummary| {
            if summary.failure.is_none() {
                summary.failure = Some(OracleFailure {
                    index,
                    seed: iseed,
                    basis: inst.basis,
                    state: inst.state,
                    detail,
                });
            }
        };

        // closed forms vs direct
        let cf_priors = closed_form_priors(&inst.basis, &inst.state)?;
        let cf_singles = closed_form_singles(&inst.basis)?;
        let cf_pairs = closed_form_pairs(&inst.basis, &inst.state)?;
        let mut worst_rel = 0.0f64;
        for i in 0..3 {
            worst_rel =
                worst_rel.max((cf_priors[i] - inst.data.priors[i]).abs() / inst.data.priors[i]);
            for l in 0..3 {
                worst_rel = worst_rel.max(
                    (cf_singles[l][i] - inst.data.singles[l][i]).abs() / inst.data.singles[l][i],
                );
                worst_rel = worst_rel.max(
                    (cf_pairs[l][i] - inst.data.pairs[l][i]).abs() / inst.data.pairs[l][i],
                );
            }
        }
        summary.max_closed_vs_direct = summary.max_closed_vs_direct.max(worst_rel);
        if worst_rel > tols.closed_vs_direct {
            fail(format!("closed-form vs direct relative gap {worst_rel:e}"), &mut summary);
        }

        // orthonormality of the construction
        let gram = gram_of(&inst.basis, &inst.state)?;
        summary.max_gram_residual = summary.max_gram_residual.max(gram);
        if gram > tols.gram {
            fail(format!("gram residual {gram:e}"), &mut summary);
        }

        // solver round trip
        match represent(&inst.data, solver_tols) {
            Ok(rep) => {
                let b = inst.data.b_priors.expect("generated data carries b_priors");
                let born = (0..3)
                    .map(|l| (rep.reconstructed_b()[l] - b[l]).abs())
                    .fold(0.0, f64::max);
                summary.max_born_residual = summary.max_born_residual.max(born);
                if born > tols.born {
                    fail(format!("born round-trip residual {born:e}"), &mut summary);
                }
                let diag = rep.diagnostics();
                let unit = diag.unitarity.max(diag.transition_sums);
                summary.max_unitarity_residual = summary.max_unitarity_residual.max(unit);
                let expected_class = match field {
                    Field::Complex => InterferenceClass::Trigonometric,
                    Field::Hyperbolic => InterferenceClass::Hyperbolic,
                };
                if rep.class() != expected_class {
                    // boundary draws can legally classify differently; only
                    // flag when the magnitudes are not borderline
                    if rep.interference().near_boundary.is_empty() {
                        fail(
                            format!("unexpected class {:?} for {field}", rep.class()),
                            &mut summary,
                        );
                    }
                }
            }
            Err(e @ RepresentError::NoUnitaryCombination { .. })
            | Err(e @ RepresentError::InfeasibleRow { .. }) => {
                fail(format!("represent rejected generated data: {e}"), &mut summary);
            }
            Err(e) => fail(format!("represent failed: {e}"), &mut summary),
        }

        if summary.failure.is_some() {
            break;
        }
    }
    Ok(summary)
}
