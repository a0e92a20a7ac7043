//! Scalar arithmetic for the two amplitude fields: ordinary complex numbers
//! and hyperbolic (split-complex) numbers with generator `j`, `j² = 1`.
//!
//! The hyperbolic squared modulus `x² − y²` can vanish or turn negative, so
//! polar decomposition only exists on the positive cone (`sq_abs > 0`). All
//! cone-membership checks use the strict sign of `sq_abs` with no epsilon;
//! callers apply their own tolerances.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Ordinary complex scalar; the trigonometric amplitude field.
pub type ComplexNumber = num_complex::Complex<f64>;

/// Errors from cone-restricted hyperbolic operations and phase plumbing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    /// Polar form and `arg` require `sq_abs > 0`.
    #[error("element {x} + {y}j lies outside the positive cone (sq_abs = {sq_abs})")]
    NotInPositiveCone { x: f64, y: f64, sq_abs: f64 },
    /// Trigonometric and hyperbolic phase factors cannot be combined.
    #[error("phase factors of different kinds cannot be combined")]
    KindMismatch,
}

/// A sign, `+1` or `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// The sign as `±1.0`.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign of a nonzero real; zero maps to `Plus`.
    pub fn of(x: f64) -> Sign {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if *self == Sign::Plus { "+1" } else { "-1" })
    }
}

impl serde::Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.value() as i8)
    }
}

/// Split-complex scalar `x + j y` with `j² = 1`.
///
/// Product rule: `(x₁ + j y₁)(x₂ + j y₂) = x₁x₂ + y₁y₂ + j(x₁y₂ + x₂y₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperbolicNumber {
    pub x: f64,
    pub y: f64,
}

impl HyperbolicNumber {
    pub const ZERO: Self = Self { x: 0.0, y: 0.0 };
    pub const ONE: Self = Self { x: 1.0, y: 0.0 };
    /// The generator `j`.
    pub const J: Self = Self { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Hyperbolic conjugate `x − j y`.
    pub fn conj(self) -> Self {
        Self { x: self.x, y: -self.y }
    }

    /// Multiplication by a real scalar.
    pub fn scale(self, k: f64) -> Self {
        Self { x: self.x * k, y: self.y * k }
    }

    /// Squared modulus `x² − y²`; the scalar part of `z·conj(z)`. May be
    /// negative or zero.
    pub fn sq_abs(self) -> f64 {
        self.x * self.x - self.y * self.y
    }

    /// Membership in the closed cone `G₊` (`sq_abs ≥ 0`).
    pub fn in_cone(self) -> bool {
        self.sq_abs() >= 0.0
    }

    /// Membership in the open positive cone `G₊*` (`sq_abs > 0`).
    pub fn in_positive_cone(self) -> bool {
        self.sq_abs() > 0.0
    }

    /// Hyperbolic exponential `e^{jθ} = cosh θ + j sinh θ`.
    pub fn exp(theta: f64) -> Self {
        Self { x: theta.cosh(), y: theta.sinh() }
    }

    /// Argument `arctanh(y/x) = ½ ln((x+y)/(x−y))`, defined on `G₊*`.
    pub fn arg(self) -> Result<f64, ScalarError> {
        if !self.in_positive_cone() {
            return Err(ScalarError::NotInPositiveCone {
                x: self.x,
                y: self.y,
                sq_abs: self.sq_abs(),
            });
        }
        Ok((self.y / self.x).atanh())
    }

    /// Polar decomposition `z = ε·m·e^{jθ}` on `G₊*`.
    pub fn polar(self) -> Result<Polar, ScalarError> {
        let angle = self.arg()?;
        Ok(Polar {
            sign: Sign::of(self.x),
            modulus: self.sq_abs().sqrt(),
            angle,
        })
    }
}

/// Polar form of a positive-cone element: `sign · modulus · e^{j angle}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub sign: Sign,
    pub modulus: f64,
    pub angle: f64,
}

impl Polar {
    /// Rebuild the split-complex value.
    pub fn reconstruct(self) -> HyperbolicNumber {
        HyperbolicNumber::exp(self.angle).scale(self.sign.value() * self.modulus)
    }
}

impl Add for HyperbolicNumber {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { x: self.x + rhs.x, y: self.y + rhs.y }
    }
}

impl Sub for HyperbolicNumber {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { x: self.x - rhs.x, y: self.y - rhs.y }
    }
}

impl Mul for HyperbolicNumber {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            x: self.x * rhs.x + self.y * rhs.y,
            y: self.x * rhs.y + self.y * rhs.x,
        }
    }
}

impl Neg for HyperbolicNumber {
    type Output = Self;
    fn neg(self) -> Self {
        Self { x: -self.x, y: -self.y }
    }
}

impl fmt::Display for HyperbolicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}j", self.x, if self.y < 0.0 { "-" } else { "+" }, self.y.abs())
    }
}

/// Whether `z₁ + z₂` stays in the open positive cone, decided through the
/// polar criterion: same signs always stay; opposite signs stay iff
/// `arccosh((m₁² + m₂²)/(2 m₁ m₂)) > |θ₁ − θ₂|`.
///
/// The direct `sq_abs(z₁ + z₂) > 0` test is the independent reference the
/// property suite checks this against.
pub fn cone_sum_check(
    z1: HyperbolicNumber,
    z2: HyperbolicNumber,
) -> Result<bool, ScalarError> {
    let p1 = z1.polar()?;
    let p2 = z2.polar()?;
    if p1.sign == p2.sign {
        return Ok(true);
    }
    // the ratio is ≥ 1 by AM-GM; clamp away sub-ulp dips that would NaN
    let ratio = (p1.modulus * p1.modulus + p2.modulus * p2.modulus)
        / (2.0 * p1.modulus * p2.modulus);
    Ok(ratio.max(1.0).acosh() > (p1.angle - p2.angle).abs())
}

/// Which amplitude field a scalar or phase belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Complex,
    Hyperbolic,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Complex => write!(f, "complex"),
            Field::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

/// Kind of a unit phase factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseKind {
    Trig,
    Hyper,
}

impl PhaseKind {
    pub fn field(self) -> Field {
        match self {
            PhaseKind::Trig => Field::Complex,
            PhaseKind::Hyper => Field::Hyperbolic,
        }
    }
}

/// Unit-modulus phase factor: `e^{iθ}` in the trigonometric case,
/// `ε·e^{jθ}` in the hyperbolic case. `|λ|² = 1` in both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseFactor {
    Trig { theta: f64 },
    Hyper { sign: Sign, theta: f64 },
}

impl PhaseFactor {
    pub fn kind(self) -> PhaseKind {
        match self {
            PhaseFactor::Trig { .. } => PhaseKind::Trig,
            PhaseFactor::Hyper { .. } => PhaseKind::Hyper,
        }
    }

    pub fn theta(self) -> f64 {
        match self {
            PhaseFactor::Trig { theta } | PhaseFactor::Hyper { theta, .. } => theta,
        }
    }

    /// Sign factor; always `+1` for trigonometric phases.
    pub fn sign(self) -> Sign {
        match self {
            PhaseFactor::Trig { .. } => Sign::Plus,
            PhaseFactor::Hyper { sign, .. } => sign,
        }
    }

    /// The phase as a scalar value in its own field.
    pub fn value(self) -> Scalar {
        match self {
            PhaseFactor::Trig { theta } => {
                Scalar::Complex(ComplexNumber::new(theta.cos(), theta.sin()))
            }
            PhaseFactor::Hyper { sign, theta } => {
                Scalar::Hyperbolic(HyperbolicNumber::exp(theta).scale(sign.value()))
            }
        }
    }

    /// The real combination `½(λ₁·conj(λ₂) + λ₂·conj(λ₁))`: `cos(θ₁ − θ₂)`
    /// for trigonometric pairs, `ε₁ε₂·cosh(θ₁ − θ₂)` for hyperbolic pairs.
    pub fn pair_real(self, other: PhaseFactor) -> Result<f64, ScalarError> {
        match (self, other) {
            (PhaseFactor::Trig { theta: t1 }, PhaseFactor::Trig { theta: t2 }) => {
                Ok((t1 - t2).cos())
            }
            (
                PhaseFactor::Hyper { sign: s1, theta: t1 },
                PhaseFactor::Hyper { sign: s2, theta: t2 },
            ) => Ok((s1 * s2).value() * (t1 - t2).cosh()),
            _ => Err(ScalarError::KindMismatch),
        }
    }
}

/// Tagged scalar value; the dynamic counterpart of the [`Amplitude`] trait.
/// Arithmetic across different tags is a usage error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Complex(ComplexNumber),
    Hyperbolic(HyperbolicNumber),
}

impl Scalar {
    pub fn field(self) -> Field {
        match self {
            Scalar::Complex(_) => Field::Complex,
            Scalar::Hyperbolic(_) => Field::Hyperbolic,
        }
    }

    pub fn sq_abs(self) -> f64 {
        match self {
            Scalar::Complex(z) => z.norm_sqr(),
            Scalar::Hyperbolic(z) => z.sq_abs(),
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Scalar::Complex(z) => Scalar::Complex(z.conj()),
            Scalar::Hyperbolic(z) => Scalar::Hyperbolic(z.conj()),
        }
    }

    pub fn try_mul(self, rhs: Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Complex(a), Scalar::Complex(b)) => Ok(Scalar::Complex(a * b)),
            (Scalar::Hyperbolic(a), Scalar::Hyperbolic(b)) => Ok(Scalar::Hyperbolic(a * b)),
            _ => Err(ScalarError::KindMismatch),
        }
    }

    pub fn try_add(self, rhs: Scalar) -> Result<Scalar, ScalarError> {
        match (self, rhs) {
            (Scalar::Complex(a), Scalar::Complex(b)) => Ok(Scalar::Complex(a + b)),
            (Scalar::Hyperbolic(a), Scalar::Hyperbolic(b)) => Ok(Scalar::Hyperbolic(a + b)),
            _ => Err(ScalarError::KindMismatch),
        }
    }

    /// Real and generator components.
    pub fn components(self) -> (f64, f64) {
        match self {
            Scalar::Complex(z) => (z.re, z.im),
            Scalar::Hyperbolic(z) => (z.x, z.y),
        }
    }
}

/// Amplitude scalar: the compile-time interface shared by the two fields.
/// Vector and matrix code is generic over this.
pub trait Amplitude:
    Copy
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const FIELD: Field;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    /// Multiplication by a real scalar.
    fn scale(self, k: f64) -> Self;
    fn conj(self) -> Self;
    /// Squared modulus; nonnegative for complex, any sign for hyperbolic.
    fn sq_abs(self) -> f64;
    /// Unit phase `sign·e^{iθ}` resp. `sign·e^{jθ}`.
    fn unit_phase(sign: Sign, theta: f64) -> Self;
    fn components(self) -> (f64, f64);
    fn is_finite(self) -> bool;

    fn into_scalar(self) -> Scalar {
        let (a, b) = self.components();
        match Self::FIELD {
            Field::Complex => Scalar::Complex(ComplexNumber::new(a, b)),
            Field::Hyperbolic => Scalar::Hyperbolic(HyperbolicNumber::new(a, b)),
        }
    }
}

impl Amplitude for ComplexNumber {
    const FIELD: Field = Field::Complex;

    fn zero() -> Self {
        ComplexNumber::new(0.0, 0.0)
    }
    fn one() -> Self {
        ComplexNumber::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        ComplexNumber::new(x, 0.0)
    }
    fn scale(self, k: f64) -> Self {
        ComplexNumber::new(self.re * k, self.im * k)
    }
    fn conj(self) -> Self {
        num_complex::Complex::conj(&self)
    }
    fn sq_abs(self) -> f64 {
        self.norm_sqr()
    }
    fn unit_phase(sign: Sign, theta: f64) -> Self {
        ComplexNumber::new(theta.cos(), theta.sin()).scale(sign.value())
    }
    fn components(self) -> (f64, f64) {
        (self.re, self.im)
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl Amplitude for HyperbolicNumber {
    const FIELD: Field = Field::Hyperbolic;

    fn zero() -> Self {
        Self::ZERO
    }
    fn one() -> Self {
        Self::ONE
    }
    fn from_real(x: f64) -> Self {
        Self { x, y: 0.0 }
    }
    fn scale(self, k: f64) -> Self {
        Self { x: self.x * k, y: self.y * k }
    }
    fn conj(self) -> Self {
        HyperbolicNumber::conj(self)
    }
    fn sq_abs(self) -> f64 {
        HyperbolicNumber::sq_abs(self)
    }
    fn unit_phase(sign: Sign, theta: f64) -> Self {
        Self::exp(theta).scale(sign.value())
    }
    fn components(self) -> (f64, f64) {
        (self.x, self.y)
    }
    fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Three-component amplitude vector.
pub type Vec3<S> = [S; 3];
/// 3×3 amplitude matrix, indexed `[row][column]`.
pub type Mat3<S> = [[S; 3]; 3];

/// Inner product `⟨x, y⟩ = Σ xᵢ·conj(yᵢ)`, linear in the first argument.
pub fn inner<S: Amplitude>(x: &Vec3<S>, y: &Vec3<S>) -> S {
    let mut acc = S::zero();
    for i in 0..3 {
        acc = acc + x[i] * y[i].conj();
    }
    acc
}

/// Squared norm `⟨x, x⟩`; real-valued in both fields.
pub fn sq_norm<S: Amplitude>(x: &Vec3<S>) -> f64 {
    let mut acc = 0.0;
    for v in x {
        acc += v.sq_abs();
    }
    acc
}

/// Column `i` of a matrix.
pub fn column<S: Amplitude>(m: &Mat3<S>, i: usize) -> Vec3<S> {
    [m[0][i], m[1][i], m[2][i]]
}

/// `M*·M` with the field's conjugate transpose.
pub fn adjoint_mul<S: Amplitude>(m: &Mat3<S>) -> Mat3<S> {
    let mut out = [[S::zero(); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            let mut acc = S::zero();
            for r in 0..3 {
                acc = acc + m[r][i].conj() * m[r][k];
            }
            out[i][k] = acc;
        }
    }
    out
}

/// Max-norm distance of `M*·M` from the identity, over both components.
pub fn gram_residual<S: Amplitude>(m: &Mat3<S>) -> f64 {
    let g = adjoint_mul(m);
    let mut worst = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            let (a, b) = g[i][k].components();
            let target = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((a - target).abs()).max(b.abs());
        }
    }
    worst
}
