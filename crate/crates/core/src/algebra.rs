//! Complex matrix-field primitives and the constant unitary matrices of the
//! reduction scheme.
//!
//! A [`ScalarField`] is a closure over `(x, y, t)`; potentials are small
//! matrices of such fields. Nothing here is symbolic: every property is
//! checked by sampling.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Imaginary-part bound for fields flagged as Hermitian (real) entries.
pub const REAL_ENTRY_TOL: f64 = 1e-14;
/// Sampled Hermiticity bound for assembled 4x4 potentials.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A space-time point. Fermi velocity is set to one, so all coordinates
/// share the same unit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub const fn xy(x: f64, y: f64) -> Self {
        Self { x, y, t: 0.0 }
    }
}

type Evaluator = dyn Fn(Point) -> C64 + Send + Sync;

/// Complex-valued function of `(x, y, t)`.
///
/// Evaluation must be deterministic and reentrant. Fields built with
/// [`ScalarField::real`] carry the `hermitian_entry` flag and may sit on the
/// diagonal of a Hermitian potential.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<Evaluator>,
    hermitian_entry: bool,
    zero: bool,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("hermitian_entry", &self.hermitian_entry)
            .field("zero", &self.zero)
            .finish_non_exhaustive()
    }
}

impl ScalarField {
    pub fn new(f: impl Fn(Point) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(f),
            hermitian_entry: false,
            zero: false,
        }
    }

    /// Real-valued field; flagged as a Hermitian entry.
    pub fn real(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(move |p| C64::new(f(p), 0.0)),
            hermitian_entry: true,
            zero: false,
        }
    }

    /// The identically vanishing field. Structural zeros are tracked so that
    /// degenerate angles can be handled without sampling.
    pub fn zero() -> Self {
        Self {
            eval: Arc::new(|_| ZERO),
            hermitian_entry: true,
            zero: true,
        }
    }

    pub fn constant(c: C64) -> Self {
        if c == ZERO {
            return Self::zero();
        }
        Self {
            eval: Arc::new(move |_| c),
            hermitian_entry: c.im == 0.0,
            zero: false,
        }
    }

    pub fn real_constant(c: f64) -> Self {
        Self::constant(C64::new(c, 0.0))
    }

    #[inline]
    pub fn at(&self, p: Point) -> C64 {
        (self.eval)(p)
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64, t: f64) -> C64 {
        (self.eval)(Point::new(x, y, t))
    }

    pub fn is_hermitian_entry(&self) -> bool {
        self.hermitian_entry
    }

    /// True only for fields known to vanish by construction.
    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Re-flag a field as real-valued. The flag is checked by
    /// [`ScalarField::check_real`], not trusted blindly by the numerics.
    pub fn into_hermitian_entry(mut self) -> Self {
        self.hermitian_entry = true;
        self
    }

    pub fn conj(&self) -> Self {
        if self.zero || self.hermitian_entry {
            return self.clone();
        }
        let f = self.eval.clone();
        Self {
            eval: Arc::new(move |p| f(p).conj()),
            hermitian_entry: false,
            zero: false,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        if self.zero || c == ZERO {
            return Self::zero();
        }
        let f = self.eval.clone();
        Self {
            eval: Arc::new(move |p| c * f(p)),
            hermitian_entry: self.hermitian_entry && c.im == 0.0,
            zero: false,
        }
    }

    pub fn map(&self, g: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        let f = self.eval.clone();
        Self::new(move |p| g(f(p)))
    }

    /// Largest imaginary part over the given points.
    pub fn max_imag(&self, points: &[Point]) -> f64 {
        points.iter().map(|&p| self.at(p).im.abs()).fold(0.0, f64::max)
    }

    pub fn check_real(&self, points: &[Point]) -> Result<()> {
        let worst = self.max_imag(points);
        if worst < REAL_ENTRY_TOL {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "field flagged real has imaginary part {worst:.3e}"
            )))
        }
    }
}

impl Add for &ScalarField {
    type Output = ScalarField;

    fn add(self, rhs: &ScalarField) -> ScalarField {
        if self.zero {
            return rhs.clone();
        }
        if rhs.zero {
            return self.clone();
        }
        let (f, g) = (self.eval.clone(), rhs.eval.clone());
        ScalarField {
            eval: Arc::new(move |p| f(p) + g(p)),
            hermitian_entry: self.hermitian_entry && rhs.hermitian_entry,
            zero: false,
        }
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;

    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self + &(-rhs)
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;

    fn neg(self) -> ScalarField {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;

    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(C64::new(rhs, 0.0))
    }
}

impl Mul<C64> for &ScalarField {
    type Output = ScalarField;

    fn mul(self, rhs: C64) -> ScalarField {
        self.scale(rhs)
    }
}

impl Mul for &ScalarField {
    type Output = ScalarField;

    fn mul(self, rhs: &ScalarField) -> ScalarField {
        if self.zero || rhs.zero {
            return ScalarField::zero();
        }
        let (f, g) = (self.eval.clone(), rhs.eval.clone());
        ScalarField {
            eval: Arc::new(move |p| f(p) * g(p)),
            hermitian_entry: self.hermitian_entry && rhs.hermitian_entry,
            zero: false,
        }
    }
}

/// Hermitian 2x2 potential `[[a, b], [b*, d]]` with real diagonal.
#[derive(Clone, Debug)]
pub struct Potential2x2 {
    pub a: ScalarField,
    pub b: ScalarField,
    pub d: ScalarField,
}

impl Potential2x2 {
    /// Fails unless both diagonal fields are flagged as Hermitian entries.
    pub fn new(a: ScalarField, b: ScalarField, d: ScalarField) -> Result<Self> {
        if !a.is_hermitian_entry() || !d.is_hermitian_entry() {
            return Err(Error::InvalidParameter(
                "diagonal entries of a 2x2 potential must be real fields".into(),
            ));
        }
        Ok(Self { a, b, d })
    }

    pub fn zero() -> Self {
        Self {
            a: ScalarField::zero(),
            b: ScalarField::zero(),
            d: ScalarField::zero(),
        }
    }

    pub fn diagonal(a: ScalarField, d: ScalarField) -> Result<Self> {
        Self::new(a, ScalarField::zero(), d)
    }

    pub fn at(&self, p: Point) -> Mat2 {
        let b = self.b.at(p);
        Mat2::new(self.a.at(p), b, b.conj(), self.d.at(p))
    }

    /// Largest violation of the Hermitian structure over the sample points.
    pub fn hermiticity_defect(&self, points: &[Point]) -> f64 {
        self.a.max_imag(points).max(self.d.max_imag(points))
    }
}

type MatrixEvaluator = dyn Fn(Point) -> Mat4 + Send + Sync;

/// 4x4 matrix potential whose entries are scalar fields.
#[derive(Clone)]
pub struct Potential4x4 {
    entries: Box<[[ScalarField; 4]; 4]>,
    matrix: Option<Arc<MatrixEvaluator>>,
}

impl fmt::Debug for Potential4x4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential4x4").finish_non_exhaustive()
    }
}

impl Potential4x4 {
    pub fn from_entries(entries: [[ScalarField; 4]; 4]) -> Self {
        Self {
            entries: Box::new(entries),
            matrix: None,
        }
    }

    /// Build from a matrix-valued evaluator. Entry fields are projections of
    /// the evaluator; diagonal projections take the real part.
    pub fn from_matrix_fn(f: impl Fn(Point) -> Mat4 + Send + Sync + 'static) -> Self {
        let f: Arc<MatrixEvaluator> = Arc::new(f);
        let entries = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let g = f.clone();
                if i == j {
                    ScalarField::real(move |p| g(p)[(i, i)].re)
                } else {
                    ScalarField::new(move |p| g(p)[(i, j)])
                }
            })
        });
        Self {
            entries: Box::new(entries),
            matrix: Some(f),
        }
    }

    pub fn zero() -> Self {
        Self::from_entries(std::array::from_fn(|_| std::array::from_fn(|_| ScalarField::zero())))
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScalarField {
        &self.entries[row][col]
    }

    pub fn at(&self, p: Point) -> Mat4 {
        match &self.matrix {
            Some(f) => f(p),
            None => Mat4::from_fn(|i, j| self.entries[i][j].at(p)),
        }
    }

    /// Largest `|M - M^dagger|` entry over the sample points.
    pub fn hermiticity_defect(&self, points: &[Point]) -> f64 {
        points
            .iter()
            .map(|&p| hermiticity_defect(&self.at(p)))
            .fold(0.0, f64::max)
    }

    /// Sampled Hermiticity check at [`HERMITIAN_TOL`]. Reports the first
    /// offending point and entry (zero-based).
    pub fn check_hermitian(&self, points: &[Point]) -> Result<()> {
        for (k, &p) in points.iter().enumerate() {
            let m = self.at(p);
            for i in 0..4 {
                for j in i..4 {
                    let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
                    if dev >= HERMITIAN_TOL {
                        return Err(Error::NotHermitian {
                            point: k,
                            row: i,
                            col: j,
                            deviation: dev,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sign `epsilon` of the component swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }
}

impl TryFrom<i32> for Epsilon {
    type Error = Error;

    fn try_from(v: i32) -> Result<Self> {
        match v {
            1 => Ok(Epsilon::Plus),
            -1 => Ok(Epsilon::Minus),
            other => Err(Error::InvalidParameter(format!(
                "epsilon must be +1 or -1, got {other}"
            ))),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i32())
    }
}

/// Full parameterization `(tau, phi, epsilon)` of the unitary family.
/// Angles are radians and are never normalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionParams {
    pub tau: f64,
    pub phi: f64,
    pub epsilon: Epsilon,
}

impl ReductionParams {
    pub fn new(tau: f64, phi: f64, epsilon: Epsilon) -> Self {
        Self { tau, phi, epsilon }
    }

    pub(crate) fn trig(&self) -> Trig {
        Trig::new(self)
    }
}

/// Precomputed trigonometric factors shared by the reduction formulas.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Trig {
    pub cos: f64,
    pub sin: f64,
    pub cos2: f64,
    pub sin2: f64,
    pub sin_2tau: f64,
    pub phase: C64,
    pub eps: f64,
}

impl Trig {
    fn new(p: &ReductionParams) -> Self {
        let (sin, cos) = p.tau.sin_cos();
        Self {
            cos,
            sin,
            cos2: cos * cos,
            sin2: sin * sin,
            sin_2tau: (2.0 * p.tau).sin(),
            phase: C64::from_polar(1.0, p.phi),
            eps: p.epsilon.value(),
        }
    }
}

/// The 2x2 mixer `[[cos tau, -e^{-i phi} sin tau], [e^{i phi} sin tau, cos tau]]`.
pub fn mixer_matrix(params: &ReductionParams) -> Mat2 {
    let (s, c) = params.tau.sin_cos();
    let e = C64::from_polar(1.0, params.phi);
    Mat2::new(C64::from(c), -e.conj() * s, e * s, C64::from(c))
}

/// Identity on components 1,2; row 3 carries `epsilon` in column 4 and row 4
/// a one in column 3.
pub fn swap_matrix(epsilon: Epsilon) -> Mat4 {
    let mut r = Mat4::zeros();
    r[(0, 0)] = ONE;
    r[(1, 1)] = ONE;
    r[(2, 3)] = C64::from(epsilon.value());
    r[(3, 2)] = ONE;
    r
}

/// Kronecker product `u ⊗ I_2`, with `u` acting on the block index.
pub fn kron_identity(u: &Mat2) -> Mat4 {
    Mat4::from_fn(|i, j| if i % 2 == j % 2 { u[(i / 2, j / 2)] } else { ZERO })
}

/// `R (U ⊗ I_2)`, the transform relating the block-diagonal and the
/// reducible Hamiltonians.
pub fn total_transform(params: &ReductionParams) -> Mat4 {
    swap_matrix(params.epsilon) * kron_identity(&mixer_matrix(params))
}

/// `t m t^dagger`.
pub fn conjugate(t: &Mat4, m: &Mat4) -> Mat4 {
    t * m * t.adjoint()
}

pub fn block_diag(first: &Mat2, second: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(first);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(second);
    m
}

/// `max |(M^dagger M - I)_ij|`.
pub fn unitarity_defect<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    let g = m.adjoint() * m;
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

/// `max |(M - M^dagger)_ij|`.
pub fn hermiticity_defect<const N: usize>(m: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..N {
        for j in 0..N {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs<const R: usize, const C: usize>(m: &nalgebra::SMatrix<C64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Random Hermitian 2x2 matrix with entries of order one.
pub fn random_hermitian2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let a = rng.random_range(-2.0..2.0);
    let d = rng.random_range(-2.0..2.0);
    let b = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    Mat2::new(a.into(), b, b.conj(), d.into())
}

/// Random smooth field of `(x, y)`: a constant plus two Gaussian bumps and
/// one plane wave with random amplitudes. Real when `real` is set.
pub fn random_smooth_field<R: Rng + ?Sized>(rng: &mut R, real: bool) -> ScalarField {
    let amp = |rng: &mut R| {
        let re = rng.random_range(-1.0..1.0);
        let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
        C64::new(re, im)
    };
    let c0 = amp(rng);
    let bumps: Vec<(C64, f64, f64, f64)> = (0..2)
        .map(|_| {
            (
                amp(rng),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(0.5..3.0),
            )
        })
        .collect();
    let (cw, kx, ky) = (amp(rng), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    let f = move |p: Point| {
        let mut v = c0;
        for &(c, x0, y0, w) in &bumps {
            v += c * (-w * ((p.x - x0).powi(2) + (p.y - y0).powi(2))).exp();
        }
        v + cw * (kx * p.x + ky * p.y).cos()
    };
    if real {
        ScalarField::real(move |p| f(p).re)
    } else {
        ScalarField::new(f)
    }
}
