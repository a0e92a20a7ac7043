//! A constructive two-parameter-phase family of orthonormal bases and states
//! over either amplitude field, with closed-form expressions for every
//! probability the data model needs, the bundled reference instance, and
//! deterministic random sampling for sweeps and oracle cross-checks.
//!
//! Free parameters are three signed magnitudes `ε₂₃a₂₃`, `ε₃₂a₃₂`, `ε₃₃a₃₃`,
//! three per-row phases `u, s, t`, and a state `(v, γ)`. The remaining
//! magnitudes follow from the orthogonality system.

pub mod sweep;

use serde::Serialize;
use thiserror::Error;

use crate::context_data::{from_quantum, ContextData, DataError, QuantumSide, PAIRS};
use crate::scalars::{Amplitude, Field, HyperbolicNumber, Mat3, Sign, Vec3};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("degenerate denominator in {what}: {value}")]
    DegenerateDenominator { what: String, value: f64 },
    #[error("state parameters are all zero")]
    ZeroState,
    #[error("basis parameters declare field {expected} but scalar type is {got}")]
    FieldMismatch { expected: Field, got: Field },
    #[error("no admissible instance found after {attempts} attempts")]
    ExhaustedRejection { attempts: u32 },
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Free parameters of the basis family. The first-row magnitudes are fixed
/// to 1 with positive sign; `a21, a31, a22` are derived, see
/// [`complete_orthogonal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasisParams {
    pub a23: f64,
    pub a32: f64,
    pub a33: f64,
    pub eps23: Sign,
    pub eps32: Sign,
    pub eps33: Sign,
    /// Phase of every first-row entry.
    pub u: f64,
    /// Phase of every second-row entry.
    pub s: f64,
    /// Phase of every third-row entry.
    pub t: f64,
    pub field: Field,
}

impl BasisParams {
    /// Build from signed products `ε·a`; magnitudes must be nonzero.
    pub fn from_signed(
        s23: f64,
        s32: f64,
        s33: f64,
        u: f64,
        s: f64,
        t: f64,
        field: Field,
    ) -> Self {
        BasisParams {
            a23: s23.abs(),
            a32: s32.abs(),
            a33: s33.abs(),
            eps23: Sign::of(s23),
            eps32: Sign::of(s32),
            eps33: Sign::of(s33),
            u,
            s,
            t,
            field,
        }
    }

    pub fn s23(&self) -> f64 {
        self.eps23.value() * self.a23
    }
    pub fn s32(&self) -> f64 {
        self.eps32.value() * self.a32
    }
    pub fn s33(&self) -> f64 {
        self.eps33.value() * self.a33
    }
}

/// State parameters: `ψ ∝ (v₁e^{jγ₁}, v₂e^{jγ₂}, v₃e^{jγ₃})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateParams {
    pub v: [f64; 3],
    pub gamma: [f64; 3],
}

/// Derived signed products `ε₂₁a₂₁`, `ε₃₁a₃₁`, `ε₂₂a₂₂` solving the
/// orthogonality system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalCompletion {
    pub s21: f64,
    pub s31: f64,
    pub s22: f64,
}

impl OrthogonalCompletion {
    pub fn a21(&self) -> f64 {
        self.s21.abs()
    }
    pub fn a31(&self) -> f64 {
        self.s31.abs()
    }
    pub fn a22(&self) -> f64 {
        self.s22.abs()
    }
    pub fn eps21(&self) -> Sign {
        Sign::of(self.s21)
    }
    pub fn eps31(&self) -> Sign {
        Sign::of(self.s31)
    }
    pub fn eps22(&self) -> Sign {
        Sign::of(self.s22)
    }

    /// Signed magnitude table `S[row][col]`, first row all ones.
    pub fn signed_table(&self, p: &BasisParams) -> [[f64; 3]; 3] {
        [
            [1.0, 1.0, 1.0],
            [self.s21, self.s22, p.s23()],
            [self.s31, p.s32(), p.s33()],
        ]
    }
}

/// Solve the pairwise-orthogonality system
/// `1 + a₂ᵢa₂ₖε₂ᵢε₂ₖ + a₃ᵢa₃ₖε₃ᵢε₃ₖ = 0` for the three underdetermined
/// signed products. Since `ε² = 1` the solution depends only on the signed
/// products of the free parameters.
pub fn complete_orthogonal(p: &BasisParams) -> Result<OrthogonalCompletion, FamilyError> {
    let (s23, s32, s33) = (p.s23(), p.s32(), p.s33());
    let a23_sq = s23 * s23;
    let denom = a23_sq * s32 + s32 * s33 * s33 + s33;
    if denom.abs() <= 1e-12 {
        return Err(FamilyError::DegenerateDenominator {
            what: "orthogonality system".into(),
            value: denom,
        });
    }
    if s23.abs() <= 1e-12 {
        return Err(FamilyError::DegenerateDenominator {
            what: "a22 (division by eps23*a23)".into(),
            value: s23,
        });
    }
    Ok(OrthogonalCompletion {
        s31: -(a23_sq + s32 * s33 + 1.0) / denom,
        s21: -(s23 * (s32 - s33)) / denom,
        s22: -(1.0 + s32 * s33) / s23,
    })
}

/// Residual of the three pairwise inner-product numerators
/// `1 + a₂ᵢa₂ₖε₂ᵢε₂ₖ + a₃ᵢa₃ₖε₃ᵢε₃ₖ` under a completion.
pub fn orthogonality_residual(p: &BasisParams, c: &OrthogonalCompletion) -> f64 {
    let s = c.signed_table(p);
    let mut worst = 0.0f64;
    for i in 0..3 {
        for k in (i + 1)..3 {
            worst = worst.max((1.0 + s[1][i] * s[1][k] + s[2][i] * s[2][k]).abs());
        }
    }
    worst
}

/// The three normalized basis columns
/// `eᵢ = (e^{ju}, s₂ᵢ·e^{js}, s₃ᵢ·e^{jt}) / √(1 + s₂ᵢ² + s₃ᵢ²)`.
pub fn build_basis<S: Amplitude>(p: &BasisParams) -> Result<Mat3<S>, FamilyError> {
    if S::FIELD != p.field {
        return Err(FamilyError::FieldMismatch { expected: p.field, got: S::FIELD });
    }
    let completion = complete_orthogonal(p)?;
    let table = completion.signed_table(p);
    let mut basis = [[S::zero(); 3]; 3];
    let phases = [p.u, p.s, p.t];
    for i in 0..3 {
        let norm = (1.0 + table[1][i] * table[1][i] + table[2][i] * table[2][i]).sqrt();
        for l in 0..3 {
            basis[l][i] = S::unit_phase(Sign::Plus, phases[l]).scale(table[l][i] / norm);
        }
    }
    Ok(basis)
}

/// Normalized state `(v₁e^{jγ₁}, v₂e^{jγ₂}, v₃e^{jγ₃}) / |v|`.
pub fn build_state<S: Amplitude>(sp: &StateParams) -> Result<Vec3<S>, FamilyError> {
    let norm_sq: f64 = sp.v.iter().map(|x| x * x).sum();
    if norm_sq <= 0.0 {
        return Err(FamilyError::ZeroState);
    }
    let norm = norm_sq.sqrt();
    Ok([0, 1, 2].map(|k| S::unit_phase(Sign::Plus, sp.gamma[k]).scale(sp.v[k] / norm)))
}

/// Basis and state bundled as a quantum side.
pub fn quantum_side<S: Amplitude>(
    p: &BasisParams,
    sp: &StateParams,
) -> Result<QuantumSide<S>, FamilyError> {
    Ok(QuantumSide { basis: build_basis(p)?, state: build_state(sp)? })
}

/// The `d`-shorthands shared by every closed-form probability, plus the two
/// phase combinations that survive into the cross terms.
#[derive(Debug, Clone, Copy)]
pub struct Shorthands {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub d5: f64,
    pub d6: f64,
    pub d7: f64,
    pub d8: f64,
    pub d9: f64,
    pub d10: f64,
    pub d11: f64,
    pub d12: f64,
    pub d13: f64,
    pub gamma_s12: f64,
    pub gamma_t13: f64,
}

impl Shorthands {
    pub fn new(p: &BasisParams, sp: &StateParams) -> Self {
        let (s23, s32, s33) = (p.s23(), p.s32(), p.s33());
        let (a23_sq, a32_sq, a33_sq) = (s23 * s23, s32 * s32, s33 * s33);
        let v = sp.v;
        let d5 = 1.0 + s32 * s33;
        Shorthands {
            d1: 1.0 + a23_sq + s32 * s33,
            d2: s32 * (a23_sq + a33_sq) + s33,
            d3: a23_sq * (s32 - s33) * (s32 - s33),
            d4: s23 * (s32 - s33),
            d5,
            d6: s32 * v[2],
            d7: s23 * v[1],
            d8: s33 * v[2],
            d9: a23_sq * a32_sq * v[2] * v[2],
            d10: (s23 + s23 * s32 * s33) * (s23 + s23 * s32 * s33),
            d11: 1.0 + a23_sq + a33_sq,
            d12: a23_sq * (1.0 + a32_sq) + d5 * d5,
            d13: v[0] * v[0] + v[1] * v[1] + v[2] * v[2],
            gamma_s12: sp.gamma[0] - sp.gamma[1] + p.s - p.u,
            gamma_t13: sp.gamma[0] - sp.gamma[2] + p.t - p.u,
        }
    }
}

/// Field-dependent cross-term kernel: `cosh` for hyperbolic phases, `cos`
/// for trigonometric ones.
fn cross_kernel(field: Field) -> fn(f64) -> f64 {
    match field {
        Field::Hyperbolic => f64::cosh,
        Field::Complex => f64::cos,
    }
}

fn guard(what: &str, value: f64) -> Result<f64, FamilyError> {
    if value.abs() <= 1e-12 {
        return Err(FamilyError::DegenerateDenominator { what: what.into(), value });
    }
    Ok(value)
}

/// Closed-form priors of the first observable's three outcomes.
pub fn closed_form_priors(p: &BasisParams, sp: &StateParams) -> Result<[f64; 3], FamilyError> {
    let d = Shorthands::new(p, sp);
    let ch = cross_kernel(p.field);
    let (s23, s32, s33) = (p.s23(), p.s32(), p.s33());
    let (a23_sq, a32_sq, a33_sq) = (s23 * s23, s32 * s32, s33 * s33);
    let [v1, v2, v3] = sp.v;
    let (gs, gt) = (d.gamma_s12, d.gamma_t13);
    let delta = gs - gt;

    let p1 = (d.d2 * d.d2 * v1 * v1
        - 2.0 * d.d2 * (ch(gs) * d.d4 * v2 + ch(gt) * d.d1 * v3) * v1
        + d.d3 * v2 * v2
        + d.d1 * v3 * (2.0 * ch(delta) * d.d4 * v2 + d.d1 * v3))
        / guard("d11*d12*d13", d.d11 * d.d12 * d.d13)?;

    let p2 = ((v1 * v1 + 2.0 * ch(gt) * d.d6 * v1 + a32_sq * v3 * v3) * a23_sq
        - 2.0 * d.d5 * (ch(delta) * d.d6 + ch(gs) * v1) * d.d7
        + d.d5 * d.d5 * v2 * v2)
        / guard("d12*d13", d.d12 * d.d13)?;

    let p3 = (v1 * v1
        + 2.0 * ch(gt) * d.d8 * v1
        + a23_sq * v2 * v2
        + a33_sq * v3 * v3
        + 2.0 * d.d7 * (ch(delta) * d.d8 + ch(gs) * v1))
        / guard("d11*d13", d.d11 * d.d13)?;

    Ok([p1, p2, p3])
}

/// Closed-form single conditionals, `[row l][column i]`. Doubly stochastic
/// by construction.
pub fn closed_form_singles(p: &BasisParams) -> Result<[[f64; 3]; 3], FamilyError> {
    let sp0 = StateParams { v: [1.0, 0.0, 0.0], gamma: [0.0; 3] };
    let d = Shorthands::new(p, &sp0);
    let (s23, s32, s33) = (p.s23(), p.s32(), p.s33());
    let (a23_sq, a32_sq, a33_sq) = (s23 * s23, s32 * s32, s33 * s33);
    let d11_d12 = guard("d11*d12", d.d11 * d.d12)?;
    let d11 = d.d11;
    let d12 = guard("d12", d.d12)?;
    Ok([
        [d.d2 * d.d2 / d11_d12, a23_sq / d12, 1.0 / d11],
        [d.d3 / d11_d12, d.d5 * d.d5 / d12, a23_sq / d11],
        [d.d1 * d.d1 / d11_d12, a23_sq * a32_sq / d12, a33_sq / d11],
    ])
}

/// Closed-form pair conditionals, `[row l][pair slot]`.
///
/// Eight slots evaluate compact rational-plus-`cosh` expressions in the
/// shorthands; the `(β₃, {12})` slot is expanded from the subamplitude sum
/// `|ψ_{β₃α₁} + ψ_{β₃α₂}|² / (p₁ + p₂)` instead, rewritten in the same
/// vocabulary. It must not reuse [`beta3_pair13_form`], which looks similar
/// but evaluates a different quantity.
pub fn closed_form_pairs(
    p: &BasisParams,
    sp: &StateParams,
) -> Result<[[f64; 3]; 3], FamilyError> {
    let d = Shorthands::new(p, sp);
    let ch = cross_kernel(p.field);
    let (s23, s32, s33) = (p.s23(), p.s32(), p.s33());
    let (a23_sq, a32_sq, a33_sq) = (s23 * s23, s32 * s32, s33 * s33);
    let [v1, v2, v3] = sp.v;
    let (gs, gt) = (d.gamma_s12, d.gamma_t13);
    let delta = gs - gt;
    let (v1_sq, v2_sq, v3_sq) = (v1 * v1, v2 * v2, v3 * v3);

    // shared denominators per pair column
    let b12 = (v1_sq + v3_sq) * a23_sq + v2_sq + v3_sq
        - 2.0 * ch(gt) * d.d8 * v1
        - 2.0 * d.d7 * (ch(delta) * d.d8 + ch(gs) * v1)
        + a33_sq * (v1_sq + v2_sq);
    let k13 = (a23_sq + a33_sq) * a32_sq + 2.0 * d.d5 - 1.0;
    let b13 = k13 * v1_sq
        + a23_sq * (a32_sq + 1.0) * v2_sq
        + (a23_sq + d.d5 * d.d5) * v3_sq
        + 2.0 * s23 * (d.d5 * (ch(delta) * d.d6 + ch(gs) * v1) * v2 - ch(gt) * s23 * d.d6 * v1);
    let w23 = 2.0 * s32 * s33 * a33_sq
        + (a23_sq + 1.0) * a33_sq
        + a32_sq * (a23_sq * a23_sq + (2.0 * a33_sq + 1.0) * a23_sq + a33_sq * a33_sq);
    let b23 = (a23_sq * a23_sq + (a32_sq + a33_sq + 2.0) * a23_sq + d.d5 * d.d5) * v1_sq
        + 2.0 * d.d2 * (ch(gs) * d.d4 * v2 + ch(gt) * d.d1 * v3) * v1
        + ((a32_sq + 1.0) * a23_sq * a23_sq + (a33_sq + 1.0) * d.d5 * d.d5 + 2.0 * d.d10)
            * v2_sq
        - 2.0 * ch(delta) * d.d1 * d.d4 * v2 * v3
        + v3_sq * w23;

    let mut pairs = [[0.0; 3]; 3];

    // (β1, {12})
    pairs[0][0] = 1.0 - 1.0 / guard("d11", d.d11)?
        - (a33_sq * v2_sq + a23_sq * v3_sq - 2.0 * ch(delta) * d.d7 * d.d8)
            / guard("pair (b1,{12}) denominator", b12)?;

    // (β1, {13})
    let n = 2.0 * k13 * v1 * s23 * (ch(gs) * d.d5 * v2 - ch(gt) * s23 * d.d6)
        - 2.0 * ch(delta) * d.d5 * d.d6 * v2 * s23 * a23_sq
        + (d.d9 + d.d5 * d.d5 * v2_sq) * a23_sq
        + k13 * k13 * v1_sq;
    pairs[0][1] = n / guard("pair (b1,{13}) denominator", d.d12 * b13)?;

    // (β1, {23})
    let n = d.d1 * d.d1 * v2_sq - 2.0 * ch(delta) * d.d1 * d.d4 * v3 * v2 + d.d3 * v3_sq;
    pairs[0][2] = a23_sq / guard("d12", d.d12)? + 1.0 / d.d11
        - n / guard("pair (b1,{23}) denominator", b23)?;

    // (β2, {12})
    let n = (v1_sq + 2.0 * ch(gt) * d.d8 * v1 + a33_sq * v3_sq) * a23_sq
        - 2.0 * (a33_sq + 1.0) * (ch(delta) * d.d8 + ch(gs) * v1) * v2 * s23
        + (a33_sq + 1.0) * (a33_sq + 1.0) * v2_sq;
    pairs[1][0] = n / guard("pair (b2,{12}) denominator", d.d11 * b12)?;

    // (β2, {13})
    let n = a23_sq
        * ((v1_sq + 2.0 * ch(gt) * d.d6 * v1 + a32_sq * v3_sq) * d.d5 * d.d5
            + 2.0 * (a32_sq + 1.0) * d.d7 * (ch(delta) * d.d6 + ch(gs) * v1) * d.d5
            + a23_sq * (a32_sq + 1.0) * (a32_sq + 1.0) * v2_sq);
    pairs[1][1] = n / guard("pair (b2,{13}) denominator", d.d12 * b13)?;

    // (β2, {23})
    let m = (a32_sq + 1.0) * a23_sq * a23_sq + (a33_sq + 1.0) * d.d5 * d.d5 + 2.0 * d.d10;
    let n = m * m * v2_sq - 2.0 * ch(delta) * d.d1 * d.d4 * m * v3 * v2
        + 2.0 * d.d2 * d.d4 * v1 * (ch(gs) * m * v2 - ch(gt) * d.d1 * d.d4 * v3)
        + d.d3 * (d.d2 * d.d2 * v1_sq + d.d1 * d.d1 * v3_sq);
    pairs[1][2] = n / guard("pair (b2,{23}) denominator", d.d11 * d.d12 * b23)?;

    // (β3, {12}): expanded from the subamplitude sum; no independent
    // tabulated form exists for this slot.
    let w1 = s32 * a23_sq * d.d11 - d.d1 * d.d2;
    let w2 = d.d1 * d.d4 - d.d11 * d.d5 * s23 * s32;
    let w3 = d.d1 * d.d1 + d.d11 * a23_sq * a32_sq;
    let priors = closed_form_priors(p, sp)?;
    let n = w1 * w1 * v1_sq
        + w2 * w2 * v2_sq
        + w3 * w3 * v3_sq
        + 2.0 * w1 * w2 * v1 * v2 * ch(gs)
        + 2.0 * w1 * w3 * v1 * v3 * ch(gt)
        + 2.0 * w2 * w3 * v2 * v3 * ch(delta);
    let scale = d.d11 * d.d12;
    pairs[2][0] = n
        / guard(
            "pair (b3,{12}) denominator",
            d.d13 * scale * scale * (priors[0] + priors[1]),
        )?;

    // (β3, {13})
    pairs[2][1] = beta3_pair13_form(p, sp)?;

    // (β3, {23})
    let n = d.d12
        * ((d.d2 * d.d2 * v1_sq - 2.0 * ch(gs) * d.d2 * d.d4 * v2 * v1 + d.d3 * v2_sq)
            * d.d1
            * d.d1
            + 2.0 * (ch(gt) * d.d2 * v1 - ch(delta) * d.d4 * v2) * v3 * w23 * d.d1
            + v3_sq * w23 * w23);
    let den = d.d12
        * d.d12
        * d.d11
        * ((d.d12 * v2_sq + d.d11 * (v1_sq + 2.0 * ch(gt) * d.d6 * v1 + a32_sq * v3_sq))
            * a23_sq
            - 2.0 * d.d5 * d.d11 * (ch(delta) * d.d6 + ch(gs) * v1) * v2 * s23
            + d.d5 * d.d5 * d.d11 * v2_sq
            + 2.0 * ch(gt) * d.d8 * d.d12 * v1
            + 2.0 * d.d7 * d.d12 * (ch(delta) * d.d8 + ch(gs) * v1)
            + d.d12 * (v1_sq + a33_sq * v3_sq));
    pairs[2][2] = n / guard("pair (b3,{23}) denominator", den)?;

    Ok(pairs)
}

/// Compact closed form of the `(β₃, {13})` conditional. Kept public so
/// reports can show that reusing it for the `(β₃, {12})` slot would be
/// wrong: [`WorkedExample::duplicate_form_gap`] is the distance between this
/// expression and the direct `(β₃, {12})` value, and the oracle suite pins
/// down that it does equal the `(β₃, {13})` one.
pub fn beta3_pair13_form(p: &BasisParams, sp: &StateParams) -> Result<f64, FamilyError> {
    let d = Shorthands::new(p, sp);
    let ch = cross_kernel(p.field);
    let (s23, s32, s33) = (p.s23(), p.s32(), p.s33());
    let (a23_sq, a32_sq, a33_sq) = (s23 * s23, s32 * s32, s33 * s33);
    let [v1, v2, v3] = sp.v;
    let (gs, gt) = (d.gamma_s12, d.gamma_t13);
    let delta = gs - gt;
    let (v1_sq, v2_sq, v3_sq) = (v1 * v1, v2 * v2, v3 * v3);

    let k13 = (a23_sq + a33_sq) * a32_sq + 2.0 * d.d5 - 1.0;
    let b13 = k13 * v1_sq
        + a23_sq * (a32_sq + 1.0) * v2_sq
        + (a23_sq + d.d5 * d.d5) * v3_sq
        + 2.0 * s23 * (d.d5 * (ch(delta) * d.d6 + ch(gs) * v1) * v2 - ch(gt) * s23 * d.d6 * v1);

    let n = a32_sq * a23_sq * (a23_sq * v1_sq + d.d5 * d.d5 * v2_sq)
        + 2.0
            * s23
            * s32
            * ((a23_sq + d.d5 * d.d5) * v3 * (ch(delta) * d.d5 * v2 - ch(gt) * s23 * v1)
                - ch(gs) * s23 * s32 * d.d5 * d.d7 * v1)
        + (a23_sq + d.d5 * d.d5) * (a23_sq + d.d5 * d.d5) * v3_sq;
    Ok(n / guard("pair (b3,{13}) denominator", d.d12 * b13)?)
}

// ---------------------------------------------------------------------------
// bundled reference instance
// ---------------------------------------------------------------------------

/// Reference priors of the worked instance, printed to six decimals.
pub const REFERENCE_PRIORS: [f64; 3] = [0.045837, 0.937356, 0.016807];

/// Reference pair conditionals, `[row][pair slot]`, six decimals.
pub const REFERENCE_PAIRS: [[f64; 3]; 3] = [
    [0.206349, 0.887593, 0.075727],
    [0.650559, 0.111601, 0.580032],
    [0.143091, 0.000805, 0.344240],
];

/// Born probabilities of the reference state: `(4/17, 9/17, 4/17)`.
pub const REFERENCE_BORN: [f64; 3] = [4.0 / 17.0, 9.0 / 17.0, 4.0 / 17.0];

/// Parameters of the worked instance: signed products `(2, 2, 3)`,
/// `u = 0.3`, `s = t`, state `v = (−2, 3, −2)`, `γ = (0, t, t)`. Every
/// probability is independent of the free parameter `t`.
pub fn example_params(t: f64) -> (BasisParams, StateParams) {
    (
        BasisParams::from_signed(2.0, 2.0, 3.0, 0.3, t, t, Field::Hyperbolic),
        StateParams { v: [-2.0, 3.0, -2.0], gamma: [0.0, t, t] },
    )
}

/// One compared probability of the worked instance.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleRow {
    pub name: String,
    pub reference: f64,
    pub direct: f64,
    pub closed_form: f64,
}

impl ExampleRow {
    /// Worst absolute deviation of either computed route from the reference.
    pub fn deviation(&self) -> f64 {
        (self.direct - self.reference)
            .abs()
            .max((self.closed_form - self.reference).abs())
    }
}

/// Outcome of [`reproduce_example`].
#[derive(Debug, Clone)]
pub struct WorkedExample {
    pub basis: BasisParams,
    pub state: StateParams,
    pub quantum: QuantumSide<HyperbolicNumber>,
    pub data: ContextData,
    pub rows: Vec<ExampleRow>,
    /// Worst change in any probability when the free parameter moves
    /// from 0 to 0.7.
    pub t_invariance: f64,
    /// Distance between the `(β₃, {13})` closed form and the direct
    /// `(β₃, {12})` value: evidence the two slots cannot share one
    /// expression.
    pub duplicate_form_gap: f64,
}

impl WorkedExample {
    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(ExampleRow::deviation).fold(0.0, f64::max)
    }

    /// All reference values matched within `tol` absolute.
    pub fn pass(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }
}

type ProbabilityTriple = ([f64; 3], [[f64; 3]; 3], [[f64; 3]; 3]);

fn instance_probabilities(t: f64) -> Result<ProbabilityTriple, FamilyError> {
    let (p, sp) = example_params(t);
    Ok((closed_form_priors(&p, &sp)?, closed_form_singles(&p)?, closed_form_pairs(&p, &sp)?))
}

/// Rebuild the worked instance and compare every probability, through both
/// the direct and the closed-form route, against the reference values.
pub fn reproduce_example() -> Result<WorkedExample, FamilyError> {
    let t = 0.7;
    let (params, state) = example_params(t);
    let quantum = quantum_side::<HyperbolicNumber>(&params, &state)?;
    let data = from_quantum(&quantum, 1e-9)?;
    let cf_priors = closed_form_priors(&params, &state)?;
    let cf_pairs = closed_form_pairs(&params, &state)?;

    let mut rows = Vec::new();
    for i in 0..3 {
        rows.push(ExampleRow {
            name: format!("prior a{}", i + 1),
            reference: REFERENCE_PRIORS[i],
            direct: data.priors[i],
            closed_form: cf_priors[i],
        });
    }
    for l in 0..3 {
        for (slot, _) in PAIRS.iter().enumerate() {
            rows.push(ExampleRow {
                name: format!("pair b{}.{}", l + 1, crate::context_data::pair_label(slot)),
                reference: REFERENCE_PAIRS[l][slot],
                direct: data.pairs[l][slot],
                closed_form: cf_pairs[l][slot],
            });
        }
    }

    let (pa, sa, ra) = instance_probabilities(0.0)?;
    let (pb, sb, rb) = instance_probabilities(0.7)?;
    let mut t_invariance = 0.0f64;
    for i in 0..3 {
        t_invariance = t_invariance.max((pa[i] - pb[i]).abs());
        for l in 0..3 {
            t_invariance = t_invariance
                .max((sa[l][i] - sb[l][i]).abs())
                .max((ra[l][i] - rb[l][i]).abs());
        }
    }

    let duplicate_form_gap =
        (beta3_pair13_form(&params, &state)? - data.pairs[2][0]).abs();

    Ok(WorkedExample {
        basis: params,
        state,
        quantum,
        data,
        rows,
        t_invariance,
        duplicate_form_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::{ftp_interference, table, InterferenceClass};
    use crate::scalars::{gram_residual, ComplexNumber};

    const TOL: f64 = 1e-12;

    #[test]
    fn completion_of_the_worked_instance_is_exact() {
        let (p, _) = example_params(0.7);
        let c = complete_orthogonal(&p).unwrap();
        assert!((c.s31 - (-11.0 / 29.0)).abs() <= TOL);
        assert!((c.s21 - 2.0 / 29.0).abs() <= TOL);
        assert!((c.s22 - (-3.5)).abs() <= TOL);
        assert!(orthogonality_residual(&p, &c) <= TOL);
    }

    #[test]
    fn completion_substitutes_back_over_random_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut tried = 0;
        let mut accepted = 0;
        while accepted < 1000 && tried < 100_000 {
            tried += 1;
            let mut signed = || {
                let m: f64 = rng.gen_range(0.2..5.0);
                if rng.gen::<bool>() {
                    m
                } else {
                    -m
                }
            };
            let p = BasisParams::from_signed(
                signed(),
                signed(),
                signed(),
                0.0,
                0.0,
                0.0,
                Field::Hyperbolic,
            );
            let Ok(c) = complete_orthogonal(&p) else { continue };
            accepted += 1;
            let scale = 1.0 + c.s31.abs().max(c.s22.abs());
            assert!(orthogonality_residual(&p, &c) <= 1e-11 * scale);
        }
        assert_eq!(accepted, 1000);
    }

    #[test]
    fn worked_instance_basis_columns() {
        let (p, _) = example_params(0.7);
        let c = complete_orthogonal(&p).unwrap();
        // normalizations 966/841, 69/4, 14
        let t = c.signed_table(&p);
        let norms: Vec<f64> =
            (0..3).map(|i| 1.0 + t[1][i] * t[1][i] + t[2][i] * t[2][i]).collect();
        assert!((norms[0] - 966.0 / 841.0).abs() <= TOL);
        assert!((norms[1] - 69.0 / 4.0).abs() <= TOL);
        assert!((norms[2] - 14.0).abs() <= TOL);

        let basis = build_basis::<HyperbolicNumber>(&p).unwrap();
        assert!(gram_residual(&basis) <= 1e-10);
    }

    #[test]
    fn complex_variant_is_unitary() {
        let mut p = example_params(0.7).0;
        p.field = Field::Complex;
        let basis = build_basis::<ComplexNumber>(&p).unwrap();
        assert!(gram_residual(&basis) <= 1e-12);
    }

    #[test]
    fn field_mismatch_is_rejected() {
        let (p, _) = example_params(0.0);
        assert!(matches!(
            build_basis::<ComplexNumber>(&p),
            Err(FamilyError::FieldMismatch { .. })
        ));
    }

    #[test]
    fn state_of_the_worked_instance() {
        let (_, sp) = example_params(0.7);
        let state = build_state::<HyperbolicNumber>(&sp).unwrap();
        let norm: f64 = state.iter().map(|z| z.sq_abs()).sum();
        assert!((norm - 1.0).abs() <= TOL);
        assert!((state[0].x - (-2.0 / 17f64.sqrt())).abs() <= TOL);
    }

    #[test]
    fn unit_state_on_axis() {
        let sp = StateParams { v: [1.0, 0.0, 0.0], gamma: [0.0; 3] };
        let state = build_state::<ComplexNumber>(&sp).unwrap();
        assert_eq!(state[0], ComplexNumber::new(1.0, 0.0));
        assert_eq!(state[1], ComplexNumber::new(0.0, 0.0));
    }

    #[test]
    fn zero_state_is_rejected() {
        let sp = StateParams { v: [0.0; 3], gamma: [0.0; 3] };
        assert!(matches!(
            build_state::<ComplexNumber>(&sp),
            Err(FamilyError::ZeroState)
        ));
    }

    #[test]
    fn closed_priors_match_reference_and_exact_fraction() {
        let (p, sp) = example_params(0.7);
        let priors = closed_form_priors(&p, &sp).unwrap();
        for i in 0..3 {
            assert!((priors[i] - REFERENCE_PRIORS[i]).abs() <= 1e-6);
        }
        assert!((priors[2] - 4.0 / 238.0).abs() <= TOL);
    }

    #[test]
    fn closed_singles_exact_fractions_and_stochasticity() {
        let (p, _) = example_params(0.7);
        let singles = closed_form_singles(&p).unwrap();
        assert!((singles[0][2] - 1.0 / 14.0).abs() <= TOL);
        assert!((singles[0][0] - 841.0 / 966.0).abs() <= TOL);
        assert!((singles[1][1] - 49.0 / 69.0).abs() <= TOL);
        for k in 0..3 {
            let row: f64 = singles[k].iter().sum();
            let col: f64 = (0..3).map(|l| singles[l][k]).sum();
            assert!((row - 1.0).abs() <= 1e-10 && (col - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn closed_pairs_match_reference_and_columns_sum_to_one() {
        let (p, sp) = example_params(0.7);
        let pairs = closed_form_pairs(&p, &sp).unwrap();
        for l in 0..3 {
            for slot in 0..3 {
                assert!(
                    (pairs[l][slot] - REFERENCE_PAIRS[l][slot]).abs() <= 1e-6,
                    "slot ({l},{slot}): {} vs {}",
                    pairs[l][slot],
                    REFERENCE_PAIRS[l][slot]
                );
            }
        }
        for slot in 0..3 {
            let col: f64 = (0..3).map(|l| pairs[l][slot]).sum();
            assert!((col - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn closed_pair_columns_sum_to_one_over_random_draws() {
        use rand::SeedableRng;
        let ranges = crate::basis_family::sweep::ParamRanges::default();
        for k in 0..30u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000 + k);
            let inst =
                crate::basis_family::sweep::random_instance(&mut rng, &ranges, Field::Hyperbolic)
                    .unwrap();
            let pairs = closed_form_pairs(&inst.basis, &inst.state).unwrap();
            let priors = closed_form_priors(&inst.basis, &inst.state).unwrap();
            assert!((priors.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            for slot in 0..3 {
                let col: f64 = (0..3).map(|l| pairs[l][slot]).sum();
                assert!((col - 1.0).abs() <= 1e-9, "seed {k} slot {slot}: {col}");
            }
        }
    }

    #[test]
    fn duplicate_slot_form_matches_13_not_12() {
        let (p, sp) = example_params(0.7);
        let form = beta3_pair13_form(&p, &sp).unwrap();
        let q = quantum_side::<HyperbolicNumber>(&p, &sp).unwrap();
        let data = from_quantum(&q, 1e-9).unwrap();
        assert!((form - data.pairs[2][1]).abs() <= 1e-12);
        assert!((form - data.pairs[2][0]).abs() > 0.1);
    }

    #[test]
    fn space_like_projection_is_rejected_not_clamped() {
        // this instance puts one state projection outside the positive cone,
        // so its squared modulus is negative
        let p = BasisParams::from_signed(
            -4.526851796535121,
            -0.30714613290235454,
            -4.707915981336851,
            -0.3563872869353628,
            -0.8502018086081599,
            -0.23365027325184817,
            Field::Hyperbolic,
        );
        let sp = StateParams {
            v: [-2.6853841303757515, 4.701918392848074, -1.7939320320728873],
            gamma: [0.5305456195499234, 0.7828432126254619, 1.3567333658735814],
        };
        let q = quantum_side::<HyperbolicNumber>(&p, &sp).unwrap();
        let err = from_quantum(&q, 1e-9).unwrap_err();
        assert!(
            matches!(err, crate::context_data::DataError::NonProbability { value, .. }
                if value < 0.0),
            "{err}"
        );
    }

    #[test]
    fn reproduce_example_passes_and_is_t_invariant() {
        let ex = reproduce_example().unwrap();
        assert!(ex.pass(1e-6), "max deviation {}", ex.max_deviation());
        assert!(ex.t_invariance <= 1e-10, "t dependence {}", ex.t_invariance);
        assert!(ex.duplicate_form_gap > 0.1);
        let report = crate::context_data::validate(&ex.data, 1e-9);
        assert!(report.pass());
    }

    #[test]
    fn worked_instance_interference_and_ftp() {
        let ex = reproduce_example().unwrap();
        let tbl = table(&ex.data).unwrap();
        assert_eq!(tbl.class, InterferenceClass::Hyperbolic);
        // frozen from an independent high-precision evaluation
        let expected = [
            [1.166448948340317, 1.047178862586922, 1.0348571593334],
            [-1.16644894834031, 1.047178862586921, -1.034857159333398],
            [-1.166448948340317, -1.047178862586921, 1.034857159333401],
        ];
        for l in 0..3 {
            for slot in 0..3 {
                assert!(
                    (tbl.coefficients[l][slot] - expected[l][slot]).abs() <= 1e-12,
                    "lambda[{l}][{slot}] = {}",
                    tbl.coefficients[l][slot]
                );
            }
        }
        for l in 0..3 {
            let ftp = ftp_interference(&ex.data, &tbl, l);
            assert!((ftp - REFERENCE_BORN[l]).abs() <= 1e-12);
        }
        // classical route, frozen independently
        let classical = [0.095445947584826, 0.670650300122151, 0.233903752293024];
        for l in 0..3 {
            let got = crate::interference::classical_ftp(&ex.data, l);
            assert!((got - classical[l]).abs() <= 1e-12);
        }
    }
}
