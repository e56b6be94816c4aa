//! Truncated exponential-generating-function arithmetic.
//!
//! Series come in two flavors sharing one generic implementation:
//! [`SeriesExact`] holds arbitrary-precision rationals and never rounds,
//! [`SeriesFloat`] holds MPFR floats with a configurable mantissa. The
//! [`Series`] enum carries either flavor for callers that pick at runtime;
//! mixing flavors in one operation is an error.
//!
//! Every operation takes the truncation order `T` from the caller and
//! returns a series with exactly `T + 1` coefficients.

use std::fmt;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Default mantissa precision of the float flavor, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Scalar type usable as a power-series coefficient.
pub trait Coefficient: Clone + fmt::Debug + PartialEq {
    /// Construction context (mantissa precision for floats, nothing for rationals).
    type Ctx: Copy + PartialEq + fmt::Debug;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: Self::Ctx) -> Self;
    fn from_rational(r: &Rational, ctx: Self::Ctx) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn mul_u(&self, k: u64) -> Self;
    fn div_u(&self, k: u64) -> Self;
    fn to_f64(&self) -> f64;

    /// `Σ a·b` over the pairs. Hot loop of every convolution.
    fn dot<'a, I>(ctx: Self::Ctx, pairs: I) -> Self
    where
        Self: 'a,
        I: Iterator<Item = (&'a Self, &'a Self)>;

    fn one(ctx: Self::Ctx) -> Self {
        Self::from_rational(&Rational::from(1), ctx)
    }

    /// Equality for exact values; relative agreement to half the mantissa
    /// for floats.
    fn agrees_with(&self, other: &Self) -> bool;
}

impl Coefficient for Rational {
    type Ctx = ();

    fn ctx(&self) {}
    fn zero(_: ()) -> Self {
        Rational::new()
    }
    fn from_rational(r: &Rational, _: ()) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn is_negative(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Less
    }
    fn add(&self, other: &Self) -> Self {
        Rational::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Rational::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Rational::from(self * other)
    }
    fn mul_u(&self, k: u64) -> Self {
        Rational::from(self * Integer::from(k))
    }
    fn div_u(&self, k: u64) -> Self {
        Rational::from(self / Integer::from(k))
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }

    // Accumulates over a running common denominator and reduces once at the
    // end; EGF denominators mostly divide one another, so the lcm rarely grows.
    fn dot<'a, I>(_: (), pairs: I) -> Self
    where
        I: Iterator<Item = (&'a Self, &'a Self)>,
    {
        let mut num = Integer::new();
        let mut den = Integer::from(1);
        for (a, b) in pairs {
            if Coefficient::is_zero(a) || Coefficient::is_zero(b) {
                continue;
            }
            let p = Integer::from(a.numer() * b.numer());
            let q = Integer::from(a.denom() * b.denom());
            if den.is_divisible(&q) {
                num += p * Integer::from(den.div_exact_ref(&q));
            } else {
                let l = Integer::from(den.lcm_ref(&q));
                num *= Integer::from(l.div_exact_ref(&den));
                num += p * Integer::from(l.div_exact_ref(&q));
                den = l;
            }
        }
        Rational::from((num, den))
    }
}

impl Coefficient for Float {
    type Ctx = u32;

    fn ctx(&self) -> u32 {
        self.prec()
    }
    fn zero(prec: u32) -> Self {
        Float::new(prec)
    }
    fn from_rational(r: &Rational, prec: u32) -> Self {
        Float::with_val(prec, r)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        self.is_sign_negative() && !Float::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Float::with_val(self.prec().max(other.prec()), self * other)
    }
    fn mul_u(&self, k: u64) -> Self {
        Float::with_val(self.prec(), self * k)
    }
    fn div_u(&self, k: u64) -> Self {
        Float::with_val(self.prec(), self / k)
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
    fn agrees_with(&self, other: &Self) -> bool {
        if self == other {
            return true;
        }
        let prec = self.prec().min(other.prec());
        let diff = Float::with_val(prec, self - other).abs();
        let scale = Float::with_val(prec, self.abs_ref()).max(&Float::with_val(prec, other.abs_ref()));
        diff <= scale >> (prec / 2)
    }
    fn dot<'a, I>(prec: u32, pairs: I) -> Self
    where
        I: Iterator<Item = (&'a Self, &'a Self)>,
    {
        let mut acc = Float::new(prec);
        for (a, b) in pairs {
            acc += a * b;
        }
        acc
    }
}

/// Truncated power series `c_0 + c_1 x + … + c_T x^T`.
#[derive(Clone, PartialEq)]
pub struct PowerSeries<C: Coefficient> {
    coeffs: Vec<C>,
    ctx: C::Ctx,
}

/// Exact-rational flavor.
pub type SeriesExact = PowerSeries<Rational>;
/// MPFR float flavor.
pub type SeriesFloat = PowerSeries<Float>;

impl<C: Coefficient> fmt::Debug for PowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeries")
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<C: Coefficient> PowerSeries<C> {
    /// Builds a series from its coefficients; order is `coeffs.len() - 1`.
    /// An empty vector yields the zero series of order 0.
    pub fn from_coeffs(mut coeffs: Vec<C>, ctx: C::Ctx) -> Self {
        if coeffs.is_empty() {
            coeffs.push(C::zero(ctx));
        }
        PowerSeries { coeffs, ctx }
    }

    pub fn zero(order: usize, ctx: C::Ctx) -> Self {
        PowerSeries {
            coeffs: vec![C::zero(ctx); order + 1],
            ctx,
        }
    }

    pub fn one(order: usize, ctx: C::Ctx) -> Self {
        let mut s = Self::zero(order, ctx);
        s.coeffs[0] = C::one(ctx);
        s
    }

    /// The series `x` (zero when `order == 0`).
    pub fn x(order: usize, ctx: C::Ctx) -> Self {
        let mut s = Self::zero(order, ctx);
        if order >= 1 {
            s.coeffs[1] = C::one(ctx);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn ctx(&self) -> C::Ctx {
        self.ctx
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the stored order.
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(|| C::zero(self.ctx))
    }

    /// Resizes to order `t`, dropping or zero-filling coefficients.
    pub fn truncate(&self, t: usize) -> Self {
        let coeffs = (0..=t).map(|k| self.coeff(k)).collect();
        PowerSeries {
            coeffs,
            ctx: self.ctx,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.order().max(other.order());
        let coeffs = (0..=t).map(|k| self.coeff(k).add(&other.coeff(k))).collect();
        PowerSeries {
            coeffs,
            ctx: self.ctx,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let t = self.order().max(other.order());
        let coeffs = (0..=t).map(|k| self.coeff(k).sub(&other.coeff(k))).collect();
        PowerSeries {
            coeffs,
            ctx: self.ctx,
        }
    }

    /// Multiplies by `x`, keeping the order.
    pub fn shift_up(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(C::zero(self.ctx));
        coeffs.extend(self.coeffs[..self.order()].iter().cloned());
        PowerSeries {
            coeffs,
            ctx: self.ctx,
        }
    }

    /// Index of the first nonzero coefficient (`None` for the zero series).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Evaluates the truncated polynomial at `t` in double precision.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c.to_f64())
    }

    pub fn has_negative_coeff(&self) -> bool {
        self.coeffs.iter().any(|c| c.is_negative())
    }
}

impl SeriesExact {
    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        Self::from_coeffs(coeffs, ())
    }

    /// Rounds every coefficient to a float series of the given precision.
    pub fn to_float(&self, prec: u32) -> SeriesFloat {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| Float::with_val(prec, c))
            .collect();
        SeriesFloat::from_coeffs(coeffs, prec)
    }
}

impl SeriesFloat {
    pub fn precision_bits(&self) -> u32 {
        self.ctx
    }
}

/// Cauchy product truncated at order `t`.
pub fn mul<C: Coefficient>(a: &PowerSeries<C>, b: &PowerSeries<C>, t: usize) -> PowerSeries<C> {
    let ctx = a.ctx;
    let (va, vb) = match (a.valuation(), b.valuation()) {
        (Some(va), Some(vb)) => (va, vb),
        _ => return PowerSeries::zero(t, ctx),
    };
    let coeffs = (0..=t)
        .map(|k| {
            if k < va + vb {
                return C::zero(ctx);
            }
            let lo = va.max(k.saturating_sub(b.order()));
            let hi = (k - vb).min(a.order());
            if lo > hi {
                return C::zero(ctx);
            }
            C::dot(ctx, (lo..=hi).map(|i| (&a.coeffs[i], &b.coeffs[k - i])))
        })
        .collect();
    PowerSeries { coeffs, ctx }
}

/// `a^m` truncated at `t`, by binary exponentiation with truncation after
/// every product.
pub fn pow<C: Coefficient>(a: &PowerSeries<C>, m: u64, t: usize) -> PowerSeries<C> {
    let mut result = PowerSeries::one(t, a.ctx);
    let mut base = a.truncate(t);
    let mut e = m;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base, t);
        }
        e >>= 1;
        if e > 0 {
            base = mul(&base, &base, t);
        }
    }
    result
}

fn require_zero_constant<C: Coefficient>(a: &PowerSeries<C>) -> Result<()> {
    if a.coeffs[0].is_zero() {
        Ok(())
    } else {
        Err(Error::ConstantTerm(format!("{:?}", a.coeffs[0])))
    }
}

/// `exp(a)` via `n·f_n = Σ_{k=1..n} k·a_k·f_{n-k}`; requires `a_0 = 0`.
pub fn exp<C: Coefficient>(a: &PowerSeries<C>, t: usize) -> Result<PowerSeries<C>> {
    require_zero_constant(a)?;
    let ctx = a.ctx;
    let weighted: Vec<C> = (0..=t).map(|k| a.coeff(k).mul_u(k as u64)).collect();
    let mut f: Vec<C> = Vec::with_capacity(t + 1);
    f.push(C::one(ctx));
    for n in 1..=t {
        let s = C::dot(ctx, (1..=n).map(|k| (&weighted[k], &f[n - k])));
        f.push(s.div_u(n as u64));
    }
    Ok(PowerSeries { coeffs: f, ctx })
}

/// `f(g(x))` truncated at `t`; requires `g_0 = 0`.
///
/// Baby-step giant-step evaluation: with `s ≈ √deg`, `f` is cut into blocks
/// of `s` coefficients, each block is a linear combination of
/// `1, g, …, g^{s-1}`, and the blocks are joined by Horner's rule in `g^s`.
/// This takes about `2√deg` series products instead of `deg`.
pub fn compose<C: Coefficient>(
    f: &PowerSeries<C>,
    g: &PowerSeries<C>,
    t: usize,
) -> Result<PowerSeries<C>> {
    require_zero_constant(g)?;
    let ctx = f.ctx;
    let g = g.truncate(t);
    let deg = f.order().min(t);
    let s = ((deg + 1) as f64).sqrt().ceil().max(1.0) as usize;

    let mut baby = vec![PowerSeries::one(t, ctx)];
    while baby.len() < s {
        let next = mul(baby.last().expect("non-empty"), &g, t);
        baby.push(next);
    }
    let giant = mul(baby.last().expect("non-empty"), &g, t);

    let block = |i: usize| -> PowerSeries<C> {
        let lo = i * s;
        let hi = (lo + s).min(deg + 1);
        let coeffs = (0..=t)
            .map(|k| C::dot(ctx, (lo..hi).map(|j| (&f.coeffs[j], &baby[j - lo].coeffs[k]))))
            .collect();
        PowerSeries { coeffs, ctx }
    };
    let blocks = deg / s + 1;
    let mut r = block(blocks - 1);
    for i in (0..blocks - 1).rev() {
        r = mul(&r, &giant, t).add(&block(i));
    }
    Ok(r.truncate(t))
}

/// Solves `y = x·exp(B′(y))` through order `t`, where `bprime` holds the
/// coefficients of `B′` (so `y = x·C′(x)` for the connected class whose
/// 2-connected blocks have EGF `B`).
///
/// This is the fixed-point iteration `y ← x·exp(B′(y))` with the truncation
/// raised by one per pass: pass `m` only ever changes coefficient `m + 1`,
/// so the powers `y^j` are extended one row at a time instead of being
/// recomposed. A final full pass of the literal iteration must leave `y`
/// unchanged.
pub fn solve_block_fixed_point<C: Coefficient>(
    bprime: &PowerSeries<C>,
    t: usize,
) -> Result<PowerSeries<C>> {
    require_zero_constant(bprime)?;
    let ctx = bprime.ctx;
    let mut y = vec![C::zero(ctx); t + 1];
    if t == 0 {
        return Ok(PowerSeries { coeffs: y, ctx });
    }
    y[1] = C::one(ctx);

    let beta: Vec<C> = (0..=t).map(|j| bprime.coeff(j)).collect();
    // powers[j - 1][m - j] = [x^m] y^j, stored from m = j upwards.
    let mut powers: Vec<Vec<C>> = Vec::with_capacity(t);
    // f = B′(y), e = exp(f), weighted_f[k] = k·f_k.
    let mut weighted_f = vec![C::zero(ctx)];
    let mut e = vec![C::one(ctx)];

    for m in 1..t {
        powers.push(Vec::with_capacity(t + 1 - m));
        for j in 1..=m {
            let v = if j == 1 {
                y[m].clone()
            } else {
                let prev = &powers[j - 2];
                C::dot(ctx, (1..=m + 1 - j).map(|i| (&y[i], &prev[m - i - (j - 1)])))
            };
            powers[j - 1].push(v);
        }
        let fm = C::dot(ctx, (1..=m).map(|j| (&beta[j], &powers[j - 1][m - j])));
        weighted_f.push(fm.mul_u(m as u64));
        let em = C::dot(ctx, (1..=m).map(|k| (&weighted_f[k], &e[m - k]))).div_u(m as u64);
        y[m + 1] = em.clone();
        e.push(em);
    }

    let y = PowerSeries { coeffs: y, ctx };
    verify_fixed_point(bprime, &y, t)?;
    Ok(y)
}

fn verify_fixed_point<C: Coefficient>(
    bprime: &PowerSeries<C>,
    y: &PowerSeries<C>,
    t: usize,
) -> Result<()> {
    let next = exp(&compose(bprime, y, t)?, t)?.shift_up();
    for k in 0..=t {
        let (a, b) = (&y.coeffs[k], &next.coeffs[k]);
        if !a.agrees_with(b) {
            return Err(Error::InternalConsistency(format!(
                "fixed point not stable at coefficient {k}: {a:?} vs {b:?}"
            )));
        }
    }
    Ok(())
}

/// EGF of the connected class from `y = x·C′(x)`: `[x^n]C = [x^n]y / n`.
pub fn egf_from_y<C: Coefficient>(y: &PowerSeries<C>) -> PowerSeries<C> {
    let coeffs = y
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| if n == 0 { C::zero(y.ctx) } else { c.div_u(n as u64) })
        .collect();
    PowerSeries { coeffs, ctx: y.ctx }
}

/// `|C_n| = (n-1)!·[x^n]y` for `n = 1..=n_max`; every value must be an integer.
pub fn connected_coeffs_from_y(y: &SeriesExact, n_max: usize) -> Result<Vec<Integer>> {
    let mut out = Vec::with_capacity(n_max);
    let mut fact = Integer::from(1);
    for n in 1..=n_max {
        if n > 1 {
            fact *= (n - 1) as u64;
        }
        let v = Rational::from(&y.coeff(n) * &fact);
        if *v.denom() != 1 {
            return Err(Error::ModelViolation(format!(
                "|C_{n}| = {v} is not an integer; block specification is inconsistent"
            )));
        }
        out.push(v.into_numer_denom().0);
    }
    Ok(out)
}

/// Second route to `C(x)`: `C = y − y·B′(y) + B(y)` with `y = x·C′(x)`.
/// The result is cross-checked against [`connected_coeffs_from_y`].
pub fn c_series_from_blocks(
    y: &SeriesExact,
    b: &SeriesExact,
    bprime: &SeriesExact,
    t: usize,
) -> Result<SeriesExact> {
    let y = y.truncate(t);
    let bp_y = compose(bprime, &y, t)?;
    let b_y = compose(b, &y, t)?;
    let c = y.sub(&mul(&y, &bp_y, t)).add(&b_y).truncate(t);

    let direct = connected_coeffs_from_y(&y, t)?;
    let mut fact = Integer::from(1);
    for n in 1..=t {
        fact *= n as u64;
        let via_blocks = Rational::from(&c.coeffs[n] * &fact);
        if via_blocks != direct[n - 1] {
            return Err(Error::InternalConsistency(format!(
                "|C_{n}|: block formula gives {via_blocks}, fixed point gives {}",
                direct[n - 1]
            )));
        }
    }
    if !Coefficient::is_zero(&c.coeffs[0]) {
        return Err(Error::InternalConsistency(
            "C(x) has nonzero constant term".into(),
        ));
    }
    Ok(c)
}

/// A series of either flavor, for callers choosing the flavor at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum Series {
    Exact(SeriesExact),
    Float(SeriesFloat),
}

impl Series {
    pub fn order(&self) -> usize {
        match self {
            Series::Exact(s) => s.order(),
            Series::Float(s) => s.order(),
        }
    }

    pub fn mul(&self, other: &Series, t: usize) -> Result<Series> {
        match (self, other) {
            (Series::Exact(a), Series::Exact(b)) => Ok(Series::Exact(mul(a, b, t))),
            (Series::Float(a), Series::Float(b)) => Ok(Series::Float(mul(a, b, t))),
            _ => Err(Error::FlavorMismatch),
        }
    }

    pub fn pow(&self, m: u64, t: usize) -> Series {
        match self {
            Series::Exact(a) => Series::Exact(pow(a, m, t)),
            Series::Float(a) => Series::Float(pow(a, m, t)),
        }
    }

    pub fn exp(&self, t: usize) -> Result<Series> {
        match self {
            Series::Exact(a) => exp(a, t).map(Series::Exact),
            Series::Float(a) => exp(a, t).map(Series::Float),
        }
    }

    pub fn compose(&self, g: &Series, t: usize) -> Result<Series> {
        match (self, g) {
            (Series::Exact(f), Series::Exact(g)) => compose(f, g, t).map(Series::Exact),
            (Series::Float(f), Series::Float(g)) => compose(f, g, t).map(Series::Float),
            _ => Err(Error::FlavorMismatch),
        }
    }

    pub fn solve_block_fixed_point(&self, t: usize) -> Result<Series> {
        match self {
            Series::Exact(b) => solve_block_fixed_point(b, t).map(Series::Exact),
            Series::Float(b) => solve_block_fixed_point(b, t).map(Series::Float),
        }
    }
}
