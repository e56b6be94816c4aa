//! Registry of connected classes `C`.
//!
//! A class knows its counting sequence `|C_n|`, the growth parameters of
//! `|C_n| ~ b·n^{-(1+α)}·ρ^{-n}·n!`, and optionally the EGF of its
//! 2-connected blocks. Built-ins are trees, cacti and Husimi trees;
//! synthetic classes realize a prescribed growth directly, and arbitrary
//! classes can be loaded from a JSON definition file.

use std::fmt;
use std::path::Path;
use std::sync::RwLock;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::asymptotics;
use crate::error::{Error, Result};
use crate::exact::BigCount;
use crate::powerseries::{self, SeriesExact, SeriesFloat};

pub const CLASS_FILE_SCHEMA_VERSION: &str = "1";

/// Parameters of `|C_n| ~ b·n^{-(1+α)}·ρ^{-n}·n!`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub b: f64,
    pub rho: f64,
    pub alpha: f64,
}

impl GrowthParams {
    pub fn new(b: f64, rho: f64, alpha: f64) -> Result<Self> {
        let g = GrowthParams { b, rho, alpha };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.b) {
            return Err(Error::Validation(format!("b must be positive, got {}", self.b)));
        }
        if !ok(self.rho) {
            return Err(Error::Validation(format!("rho must be positive, got {}", self.rho)));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(Error::Validation(format!("alpha must exceed 1, got {}", self.alpha)));
        }
        Ok(())
    }

    /// `ln(b·n^{-(1+α)}·ρ^{-n})`, the log of the asymptotic EGF coefficient.
    pub fn log_model_coeff(&self, n: f64) -> f64 {
        self.b.ln() - (1.0 + self.alpha) * n.ln() - n * self.rho.ln()
    }
}

/// The 2-connected building blocks of a block-stable class.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockKind {
    /// Single edges, `B(x) = x²/2`: trees.
    Edges,
    /// Edges and cycles, `B(x) = x²/4 − x/2 − log(1−x)/2`: cacti.
    EdgesAndCycles,
    /// Complete graphs, `B(x) = eˣ − x − 1`: Husimi trees.
    Complete,
    /// Finitely many block types; `counts[i] = |B_{i+2}|`.
    Finite(Vec<Integer>),
}

/// Block EGF `B` with scalar evaluators for `B, B′, B″, B‴` on `[0, R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    kind: BlockKind,
    /// `counts` of a `Finite` kind divided by `n!`, cached for evaluation.
    poly: Vec<f64>,
}

impl BlockSpec {
    pub fn new(kind: BlockKind) -> Result<Self> {
        let poly = match &kind {
            BlockKind::Finite(counts) => {
                let mut p = vec![0.0, 0.0];
                let mut fact = Integer::from(2);
                for (i, c) in counts.iter().enumerate() {
                    if *c < 0 {
                        return Err(Error::Validation(format!("block count |B_{}| is negative", i + 2)));
                    }
                    if i > 0 {
                        fact *= (i + 2) as u64;
                    }
                    p.push(Rational::from((c.clone(), fact.clone())).to_f64());
                }
                p
            }
            _ => Vec::new(),
        };
        Ok(BlockSpec { kind, poly })
    }

    pub fn kind(&self) -> &BlockKind {
        &self.kind
    }

    /// Identifier used in class files for the named block families.
    pub fn closed_form_id(&self) -> Option<&'static str> {
        match self.kind {
            BlockKind::Edges => Some("edges"),
            BlockKind::EdgesAndCycles => Some("edges_and_cycles"),
            BlockKind::Complete => Some("complete"),
            BlockKind::Finite(_) => None,
        }
    }

    pub fn from_closed_form_id(id: &str) -> Result<Self> {
        let kind = match id {
            "edges" => BlockKind::Edges,
            "edges_and_cycles" => BlockKind::EdgesAndCycles,
            "complete" => BlockKind::Complete,
            other => return Err(Error::Lookup(other.to_string())),
        };
        BlockSpec::new(kind)
    }

    /// Radius of convergence `R` of `B`.
    pub fn radius(&self) -> f64 {
        match self.kind {
            BlockKind::EdgesAndCycles => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// `|B_n|`, the number of blocks on `n` labeled vertices.
    pub fn block_count(&self, n: usize) -> Integer {
        match &self.kind {
            BlockKind::Edges => Integer::from((n == 2) as u32),
            BlockKind::EdgesAndCycles => match n {
                0 | 1 => Integer::new(),
                2 => Integer::from(1),
                _ => Integer::from(Integer::factorial((n - 1) as u32)) / 2,
            },
            BlockKind::Complete => Integer::from((n >= 2) as u32),
            BlockKind::Finite(c) => {
                if n < 2 {
                    Integer::new()
                } else {
                    c.get(n - 2).cloned().unwrap_or_default()
                }
            }
        }
    }

    /// Coefficients of `B` through order `t`.
    pub fn b_series_exact(&self, t: usize) -> SeriesExact {
        let coeffs = (0..=t)
            .map(|n| {
                Rational::from((self.block_count(n), Integer::from(Integer::factorial(n as u32))))
            })
            .collect();
        SeriesExact::from_rationals(coeffs)
    }

    /// Coefficients of `B′` through order `t`: `[u^j]B′ = |B_{j+1}|/j!`.
    pub fn bprime_series_exact(&self, t: usize) -> SeriesExact {
        let coeffs = (0..=t)
            .map(|j| {
                Rational::from((self.block_count(j + 1), Integer::from(Integer::factorial(j as u32))))
            })
            .collect();
        SeriesExact::from_rationals(coeffs)
    }

    pub fn bprime_series_float(&self, t: usize, prec: u32) -> SeriesFloat {
        let coeffs = (0..=t)
            .map(|j| {
                let num = Float::with_val(prec, self.block_count(j + 1));
                let den = Float::with_val(prec, Float::factorial(j as u32));
                num / den
            })
            .collect();
        SeriesFloat::from_coeffs(coeffs, prec)
    }

    fn poly_derivative(&self, t: f64, order: usize) -> f64 {
        // Σ_n b_n·n(n−1)…(n−order+1)·t^{n−order}
        let mut acc = 0.0;
        for n in (order..self.poly.len()).rev() {
            let falling: f64 = (0..order).map(|i| (n - i) as f64).product();
            acc = acc * t + self.poly[n] * falling;
        }
        acc
    }

    pub fn b(&self, t: f64) -> f64 {
        match self.kind {
            BlockKind::Edges => t * t / 2.0,
            BlockKind::EdgesAndCycles => t * t / 4.0 - t / 2.0 - (-t).ln_1p() / 2.0,
            BlockKind::Complete => t.exp_m1() - t,
            BlockKind::Finite(_) => self.poly_derivative(t, 0),
        }
    }

    pub fn b1(&self, t: f64) -> f64 {
        match self.kind {
            BlockKind::Edges => t,
            BlockKind::EdgesAndCycles => t / 2.0 - 0.5 + 0.5 / (1.0 - t),
            BlockKind::Complete => t.exp_m1(),
            BlockKind::Finite(_) => self.poly_derivative(t, 1),
        }
    }

    pub fn b2(&self, t: f64) -> f64 {
        match self.kind {
            BlockKind::Edges => 1.0,
            BlockKind::EdgesAndCycles => 0.5 + 0.5 / ((1.0 - t) * (1.0 - t)),
            BlockKind::Complete => t.exp(),
            BlockKind::Finite(_) => self.poly_derivative(t, 2),
        }
    }

    pub fn b3(&self, t: f64) -> f64 {
        match self.kind {
            BlockKind::Edges => 0.0,
            BlockKind::EdgesAndCycles => 1.0 / (1.0 - t).powi(3),
            BlockKind::Complete => t.exp(),
            BlockKind::Finite(_) => self.poly_derivative(t, 3),
        }
    }

    /// Checks that the truncated `B′` series and the scalar `B′` agree at
    /// `t = min(R, 2)/2`.
    pub fn check_consistency(&self) -> Result<()> {
        let t = self.radius().min(2.0) / 2.0;
        let order = 200;
        let series = self.bprime_series_exact(order).eval_f64(t);
        let scalar = self.b1(t);
        if (series - scalar).abs() > 1e-9 * scalar.abs().max(1.0) {
            return Err(Error::InternalConsistency(format!(
                "B′({t}) = {scalar} but its series gives {series}"
            )));
        }
        Ok(())
    }
}

/// Where a class's counting sequence comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffSource {
    ClosedForm,
    BlockDerived,
    ExplicitList,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq)]
enum Provider {
    CayleyTrees,
    Blocks,
    List(Vec<Integer>),
    Synthetic(GrowthParams),
}

/// A registered connected class `C`.
pub struct ConnectedClass {
    name: String,
    provider: Provider,
    growth: Option<GrowthParams>,
    block_spec: Option<BlockSpec>,
    exact_cache: RwLock<Vec<Integer>>,
    float_cache: RwLock<Option<SeriesFloat>>,
}

impl Clone for ConnectedClass {
    fn clone(&self) -> Self {
        ConnectedClass {
            name: self.name.clone(),
            provider: self.provider.clone(),
            growth: self.growth,
            block_spec: self.block_spec.clone(),
            exact_cache: RwLock::new(self.exact_cache.read().unwrap().clone()),
            float_cache: RwLock::new(self.float_cache.read().unwrap().clone()),
        }
    }
}

impl fmt::Debug for ConnectedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectedClass")
            .field("name", &self.name)
            .field("source", &self.coeff_source())
            .field("growth", &self.growth)
            .field("block_spec", &self.block_spec)
            .finish()
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["trees", "cacti", "husimi"];

/// Looks up a built-in class.
pub fn builtin(name: &str) -> Result<ConnectedClass> {
    match name {
        "trees" => {
            let growth = GrowthParams::new(
                1.0 / (2.0 * std::f64::consts::PI).sqrt(),
                (-1.0f64).exp(),
                1.5,
            )?;
            Ok(ConnectedClass::new(
                "trees",
                Provider::CayleyTrees,
                Some(growth),
                Some(BlockSpec::new(BlockKind::Edges)?),
            ))
        }
        "cacti" => ConnectedClass::from_blocks("cacti", BlockSpec::new(BlockKind::EdgesAndCycles)?),
        "husimi" => ConnectedClass::from_blocks("husimi", BlockSpec::new(BlockKind::Complete)?),
        other => Err(Error::Lookup(other.to_string())),
    }
}

/// A class whose coefficients are `max(round(b·n^{-(1+α)}·ρ^{-n}·n!), [n=1])`.
pub fn synthetic(b: f64, rho: f64, alpha: f64) -> Result<ConnectedClass> {
    let growth = GrowthParams::new(b, rho, alpha)?;
    Ok(ConnectedClass::new(
        &format!("synthetic(b={b},rho={rho},alpha={alpha})"),
        Provider::Synthetic(growth),
        Some(growth),
        None,
    ))
}

/// Loads a class definition document from disk.
pub fn from_file(path: impl AsRef<Path>) -> Result<ConnectedClass> {
    let text = std::fs::read_to_string(path.as_ref())?;
    from_json_str(&text)
}

pub fn from_json_str(text: &str) -> Result<ConnectedClass> {
    let doc: ClassFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    ConnectedClass::from_document(doc)
}

/// Serialized class definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    #[serde(default = "default_schema_version")]
    pub schema_version: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthParams>,
}

fn default_schema_version() -> String {
    CLASS_FILE_SCHEMA_VERSION.to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum BlockDocument {
    /// `{"id": "edges" | "edges_and_cycles" | "complete"}`
    ClosedFormId { id: String },
    /// `counts[i] = |B_{i+2}|` as decimal strings.
    CoefficientList { counts: Vec<String> },
}

fn parse_count(s: &str, what: &str) -> Result<Integer> {
    let v = Integer::from_str_radix(s.trim(), 10)
        .map_err(|e| Error::Parse(format!("{what}: {s:?} is not a decimal integer ({e})")))?;
    if v < 0 {
        return Err(Error::Validation(format!("{what} is negative: {v}")));
    }
    Ok(v)
}

impl ConnectedClass {
    fn new(
        name: &str,
        provider: Provider,
        growth: Option<GrowthParams>,
        block_spec: Option<BlockSpec>,
    ) -> Self {
        ConnectedClass {
            name: name.to_string(),
            provider,
            growth,
            block_spec,
            exact_cache: RwLock::new(Vec::new()),
            float_cache: RwLock::new(None),
        }
    }

    /// A block-stable class whose growth comes from its block EGF.
    pub fn from_blocks(name: &str, spec: BlockSpec) -> Result<Self> {
        spec.check_consistency()?;
        let rc = asymptotics::recipe_constants_for(&spec)?;
        let growth = GrowthParams::new(rc.b, rc.rho, 1.5)?;
        Ok(ConnectedClass::new(name, Provider::Blocks, Some(growth), Some(spec)))
    }

    pub fn from_document(doc: ClassFile) -> Result<Self> {
        if doc.schema_version != CLASS_FILE_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported class file schema_version {:?}",
                doc.schema_version
            )));
        }
        if let Some(g) = &doc.growth {
            g.validate()?;
        }
        match (doc.coefficients, doc.block) {
            (Some(_), Some(_)) => Err(Error::Parse(
                "class file must give either coefficients or block, not both".into(),
            )),
            (None, None) => Err(Error::Parse(
                "class file must give coefficients or block".into(),
            )),
            (Some(list), None) => {
                let counts = list
                    .iter()
                    .enumerate()
                    .map(|(i, s)| parse_count(s, &format!("|C_{}|", i + 1)))
                    .collect::<Result<Vec<_>>>()?;
                validate_counts(&counts)?;
                let class = ConnectedClass::new(&doc.name, Provider::List(counts.clone()), doc.growth, None);
                *class.exact_cache.write().unwrap() = counts;
                Ok(class)
            }
            (None, Some(block)) => {
                let spec = match block {
                    BlockDocument::ClosedFormId { id } => BlockSpec::from_closed_form_id(&id)?,
                    BlockDocument::CoefficientList { counts } => {
                        let counts = counts
                            .iter()
                            .enumerate()
                            .map(|(i, s)| parse_count(s, &format!("|B_{}|", i + 2)))
                            .collect::<Result<Vec<_>>>()?;
                        BlockSpec::new(BlockKind::Finite(counts))?
                    }
                };
                let mut class = ConnectedClass::from_blocks(&doc.name, spec)?;
                if let Some(g) = doc.growth {
                    class.growth = Some(g);
                }
                Ok(class)
            }
        }
    }

    /// Definition document listing `|C_1..terms|` explicitly.
    pub fn export(&self, terms: usize) -> Result<ClassFile> {
        if terms == 0 {
            return Err(Error::Domain("terms must be at least 1".into()));
        }
        let coeffs = self.coefficients(terms)?;
        Ok(ClassFile {
            schema_version: CLASS_FILE_SCHEMA_VERSION.to_string(),
            name: self.name.clone(),
            coefficients: Some(coeffs.iter().map(|c| c.to_string()).collect()),
            block: None,
            growth: self.growth,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coeff_source(&self) -> CoeffSource {
        match self.provider {
            Provider::CayleyTrees => CoeffSource::ClosedForm,
            Provider::Blocks => CoeffSource::BlockDerived,
            Provider::List(_) => CoeffSource::ExplicitList,
            Provider::Synthetic(_) => CoeffSource::Synthetic,
        }
    }

    /// Growth parameters; an error for explicit lists loaded without them.
    pub fn growth(&self) -> Result<GrowthParams> {
        self.growth.ok_or_else(|| {
            Error::Validation(format!("class {:?} declares no growth parameters", self.name))
        })
    }

    pub fn block_spec(&self) -> Option<&BlockSpec> {
        self.block_spec.as_ref()
    }

    /// Largest `n` for which `|C_n|` is available (`None` when unbounded).
    pub fn max_known_size(&self) -> Option<usize> {
        match &self.provider {
            Provider::List(v) => Some(v.len()),
            _ => None,
        }
    }

    /// `|C_n|`.
    pub fn coeff(&self, n: usize) -> Result<BigCount> {
        if n == 0 {
            return Ok(BigCount::zero());
        }
        Ok(self.coefficients(n)?.pop().expect("n >= 1"))
    }

    /// `|C_1|, …, |C_{n_max}|`, memoized and extended on demand.
    pub fn coefficients(&self, n_max: usize) -> Result<Vec<BigCount>> {
        if n_max == 0 {
            return Err(Error::Domain("n_max must be at least 1".into()));
        }
        {
            let cache = self.exact_cache.read().unwrap();
            if cache.len() >= n_max {
                return Ok(cache[..n_max].iter().cloned().map(BigCount::from).collect());
            }
        }
        let fresh = self.compute_coefficients(n_max)?;
        let mut cache = self.exact_cache.write().unwrap();
        if cache.len() < fresh.len() {
            *cache = fresh;
        }
        Ok(cache[..n_max].iter().cloned().map(BigCount::from).collect())
    }

    fn compute_coefficients(&self, n_max: usize) -> Result<Vec<Integer>> {
        let out = match &self.provider {
            Provider::CayleyTrees => (1..=n_max)
                .map(|n| {
                    if n == 1 {
                        Integer::from(1)
                    } else {
                        Integer::from(n).pow((n - 2) as u32)
                    }
                })
                .collect(),
            Provider::Blocks => {
                let spec = self.block_spec.as_ref().expect("block class has a spec");
                let y = powerseries::solve_block_fixed_point(&spec.bprime_series_exact(n_max), n_max)?;
                powerseries::connected_coeffs_from_y(&y, n_max)?
            }
            Provider::List(v) => {
                if n_max > v.len() {
                    return Err(Error::Domain(format!(
                        "class {:?} lists only {} coefficients, {} requested",
                        self.name,
                        v.len(),
                        n_max
                    )));
                }
                v[..n_max].to_vec()
            }
            Provider::Synthetic(g) => (1..=n_max).map(|n| synthetic_coeff(g, n)).collect(),
        };
        validate_counts(&out)?;
        Ok(out)
    }

    /// EGF `Σ |C_n| xⁿ/n!` through order `t`, exact.
    pub fn egf_exact(&self, t: usize) -> Result<SeriesExact> {
        let mut coeffs = vec![Rational::new()];
        if t > 0 {
            let counts = self.coefficients(t)?;
            let mut fact = Integer::from(1);
            for (i, c) in counts.into_iter().enumerate() {
                fact *= (i + 1) as u64;
                coeffs.push(Rational::from((c.into_inner(), fact.clone())));
            }
        }
        Ok(SeriesExact::from_rationals(coeffs))
    }

    /// EGF through order `t` in the float flavor. Block-derived classes solve
    /// the fixed point directly in floats; the result is memoized.
    pub fn egf_float(&self, t: usize, prec: u32) -> Result<SeriesFloat> {
        match &self.provider {
            Provider::Blocks => {
                if let Some(s) = self.float_cache.read().unwrap().as_ref() {
                    if s.order() >= t && s.precision_bits() == prec {
                        return Ok(s.truncate(t));
                    }
                }
                let spec = self.block_spec.as_ref().expect("block class has a spec");
                let y = powerseries::solve_block_fixed_point(&spec.bprime_series_float(t, prec), t)?;
                let c = powerseries::egf_from_y(&y);
                *self.float_cache.write().unwrap() = Some(c.clone());
                Ok(c)
            }
            Provider::CayleyTrees => {
                let mut coeffs = vec![Float::new(prec)];
                let mut fact = Float::with_val(prec, 1);
                for n in 1..=t {
                    fact *= n as u32;
                    let num = if n == 1 {
                        Float::with_val(prec, 1)
                    } else {
                        Float::with_val(prec, n as u32).pow((n - 2) as u32)
                    };
                    coeffs.push(num / &fact);
                }
                Ok(SeriesFloat::from_coeffs(coeffs, prec))
            }
            _ => Ok(self.egf_exact(t)?.to_float(prec)),
        }
    }

    /// `ln(|C_n|/n!)` for `n = 1..=n_max` (`-∞` where `|C_n| = 0`).
    pub fn log_egf_coeffs(&self, n_max: usize) -> Result<Vec<f64>> {
        match &self.provider {
            Provider::CayleyTrees => Ok((1..=n_max)
                .map(|n| {
                    let nf = n as f64;
                    (nf - 2.0) * nf.ln() - asymptotics::ln_gamma(nf + 1.0)
                })
                .collect()),
            Provider::Synthetic(g) => Ok((1..=n_max)
                .map(|n| {
                    let model = g.log_model_coeff(n as f64);
                    // beyond ~1e30 rounding to an integer is invisible in f64
                    if model + asymptotics::ln_gamma(n as f64 + 1.0) > 70.0 {
                        model
                    } else {
                        log_ratio_to_factorial(&synthetic_coeff(g, n), n)
                    }
                })
                .collect()),
            Provider::Blocks => {
                let prec = powerseries::DEFAULT_PRECISION_BITS;
                let s = self.egf_float(n_max, prec)?;
                Ok((1..=n_max)
                    .map(|n| {
                        let c = &s.coeffs()[n];
                        if c.is_zero() {
                            f64::NEG_INFINITY
                        } else {
                            Float::with_val(prec, c.ln_ref()).to_f64()
                        }
                    })
                    .collect())
            }
            Provider::List(_) => {
                let counts = self.coefficients(n_max)?;
                Ok(counts
                    .iter()
                    .enumerate()
                    .map(|(i, c)| log_ratio_to_factorial(c.as_integer(), i + 1))
                    .collect())
            }
        }
    }
}

fn log_ratio_to_factorial(c: &Integer, n: usize) -> f64 {
    if *c == 0 {
        return f64::NEG_INFINITY;
    }
    let prec = 128;
    let lc = Float::with_val(prec, c).ln();
    let lf = Float::with_val(prec, Float::factorial(n as u32)).ln();
    (lc - lf).to_f64()
}

/// `max(round(b·n^{-(1+α)}·ρ^{-n}·n!), [n=1])`, ties away from zero.
fn synthetic_coeff(g: &GrowthParams, n: usize) -> Integer {
    let nf = n as f64;
    let log2_size = (g.log_model_coeff(nf) + asymptotics::ln_gamma(nf + 1.0)) / std::f64::consts::LN_2;
    let prec = (log2_size.max(0.0) as u32) + 96;
    let mut v = Float::with_val(prec, Float::factorial(n as u32));
    v *= g.b;
    v /= Float::with_val(prec, g.rho).pow(n as u32);
    v /= Float::with_val(prec, n as u32).pow(Float::with_val(prec, 1.0 + g.alpha));
    let rounded = v.round().to_integer().unwrap_or_default();
    if n == 1 && rounded < 1 {
        Integer::from(1)
    } else {
        rounded
    }
}

fn validate_counts(counts: &[Integer]) -> Result<()> {
    match counts.first() {
        Some(c1) if *c1 >= 1 => {}
        Some(_) => {
            return Err(Error::AssumptionViolation(
                "|C_1| = 0: the class must contain the single-vertex structure".into(),
            ))
        }
        None => return Err(Error::Validation("empty coefficient list".into())),
    }
    if let Some((i, c)) = counts.iter().enumerate().find(|(_, c)| **c < 0) {
        return Err(Error::Validation(format!("|C_{}| = {c} is negative", i + 1)));
    }
    Ok(())
}
