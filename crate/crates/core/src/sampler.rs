//! Boltzmann sampling for `SET∘C` at the level of component sizes, uniform
//! labelled forests by rejection, and Monte Carlo checks of the law of sums
//! of iid Boltzmann sizes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::asymptotics::{self, model_tail, ClassScalars};
use crate::error::{Error, Result};
use crate::species::{self, ConnectedClass};

/// Default bound on the probability mass cut off by the size table.
pub const DEFAULT_TAIL_MASS: f64 = 1e-6;
/// Largest default table for block-derived classes, whose coefficients come
/// from a quadratic-cost fixed point.
pub const BLOCK_TABLE_CAP: usize = 600;
/// Largest default table for every other class.
pub const TABLE_CAP: usize = 1 << 20;

/// Law of `|ΓC(x)|` tabulated on `1..=n_max` and renormalized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeDistribution {
    pub x: f64,
    pub n_max: usize,
    /// `pmf[i]` is the probability of size `i + 1`.
    pub pmf: Vec<f64>,
    /// Estimated probability of sizes above `n_max` under the untruncated law.
    pub truncated_mass: f64,
    /// `Σ_{n ≤ n_max} |C_n| xⁿ/n!`
    pub normalizer: f64,
    #[serde(skip)]
    cdf: Vec<f64>,
}

impl SizeDistribution {
    fn from_log_weights(x: f64, logw: Vec<f64>, tail: f64) -> Result<Self> {
        let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Domain(format!("no positive weight in the size table at x = {x}")));
        }
        let scaled: Vec<f64> = logw.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = scaled.iter().sum();
        let normalizer = total * top.exp();
        let pmf: Vec<f64> = scaled.iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let cdf = pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(SizeDistribution {
            x,
            n_max: pmf.len(),
            truncated_mass: tail / (normalizer + tail),
            pmf,
            normalizer,
            cdf,
        })
    }

    /// `P(size = n)` under the renormalized table.
    pub fn p(&self, n: usize) -> f64 {
        if n == 0 || n > self.n_max {
            0.0
        } else {
            self.pmf[n - 1]
        }
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(i, p)| ((i + 1) as f64).powi(2) * p)
            .sum()
    }
}

/// Largest `x` accepted for a class; `∞` for a finite list without growth data.
fn radius(class: &ConnectedClass) -> f64 {
    class.growth().map(|g| g.rho).unwrap_or(f64::INFINITY)
}

fn check_x(class: &ConnectedClass, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let rho = radius(class);
    if x > rho * (1.0 + 1e-15) {
        return Err(Error::Domain(format!(
            "divergence: C(x) diverges for x = {x} > rho = {rho}"
        )));
    }
    Ok(())
}

/// `ln(|C_n| xⁿ/n!)` for `n = 1..=n_max`; sizes past an explicit list follow
/// the growth model.
fn log_weights(class: &ConnectedClass, x: f64, n_max: usize) -> Result<Vec<f64>> {
    let known = class.max_known_size().map_or(n_max, |m| m.min(n_max));
    let mut out = class.log_egf_coeffs(known)?;
    if n_max > known {
        let g = class.growth()?;
        out.extend(((known + 1)..=n_max).map(|n| g.log_model_coeff(n as f64)));
    }
    let lx = x.ln();
    for (i, l) in out.iter_mut().enumerate() {
        *l += (i + 1) as f64 * lx;
    }
    Ok(out)
}

/// Model estimate of `Σ_{n > n_max} |C_n| xⁿ/n!` (zero for a finite list
/// without growth data that the table covers).
fn tail_weight(class: &ConnectedClass, x: f64, n_max: usize) -> Result<f64> {
    match class.growth() {
        Ok(g) => Ok(g.b * model_tail(1.0 + g.alpha, (x / g.rho).min(1.0), n_max as u64 + 1)?),
        Err(_) => Ok(0.0),
    }
}

/// Size law on `1..=n_max` at `x`.
pub fn size_distribution(class: &ConnectedClass, x: f64, n_max: usize) -> Result<SizeDistribution> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    check_x(class, x)?;
    let n_max = match (class.max_known_size(), class.growth()) {
        (Some(m), Err(_)) => n_max.min(m),
        _ => n_max,
    };
    let tail = tail_weight(class, x, n_max)?;
    SizeDistribution::from_log_weights(x, log_weights(class, x, n_max)?, tail)
}

/// Size law with the smallest table whose cut-off mass is below
/// [`DEFAULT_TAIL_MASS`], subject to the table caps.
pub fn default_size_distribution(class: &ConnectedClass, x: f64) -> Result<SizeDistribution> {
    check_x(class, x)?;
    let n_max = default_table_size(class, x)?;
    size_distribution(class, x, n_max)
}

fn default_table_size(class: &ConnectedClass, x: f64) -> Result<usize> {
    let cap = match class.coeff_source() {
        species::CoeffSource::BlockDerived => BLOCK_TABLE_CAP,
        _ => TABLE_CAP,
    };
    if class.growth().is_err() {
        return Ok(class.max_known_size().unwrap_or(1).min(cap));
    }
    let total = ClassScalars::new(class)?.moments(x)?.s0;
    let small_enough = |n: usize| -> Result<bool> { Ok(tail_weight(class, x, n)? <= DEFAULT_TAIL_MASS * total) };
    let mut hi = 16usize;
    while hi < cap && !small_enough(hi)? {
        hi *= 2;
    }
    if hi >= cap {
        return Ok(cap);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if small_enough(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One draw of `|ΓC(x)|` by inverse CDF.
pub fn sample_size<R: Rng + ?Sized>(dist: &SizeDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.gen::<f64>() * dist.cdf[dist.n_max - 1];
    dist.cdf.partition_point(|&c| c <= u).min(dist.n_max - 1) + 1
}

/// Component count and component sizes of one `ΓSET∘C(x)` draw.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Composition {
    pub kappa: usize,
    pub sizes: Vec<usize>,
}

/// `κ ~ Poisson(C(x))`, then `κ` iid sizes.
pub fn sample_set<R: Rng + ?Sized>(dist: &SizeDistribution, rng: &mut R) -> Composition {
    let kappa = if dist.normalizer > 0.0 {
        let pois = Poisson::new(dist.normalizer).expect("positive Poisson rate");
        pois.sample(rng) as usize
    } else {
        0
    };
    let sizes = (0..kappa).map(|_| sample_size(dist, rng)).collect();
    Composition { kappa, sizes }
}

/// [`sample_set`] on the default size table of `class` at `x`.
pub fn sample_set_for<R: Rng + ?Sized>(class: &ConnectedClass, x: f64, rng: &mut R) -> Result<Composition> {
    Ok(sample_set(&default_size_distribution(class, x)?, rng))
}

/// Uniform set partition of `{1..Σsizes}` with the given block sizes: shuffle
/// and cut into consecutive runs. Blocks are sorted, and ordered by their
/// smallest element.
pub fn sample_partition<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Vec<Vec<usize>> {
    let n: usize = sizes.iter().sum();
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let mut blocks = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for &s in sizes {
        let mut b = labels[start..start + s].to_vec();
        b.sort_unstable();
        blocks.push(b);
        start += s;
    }
    blocks.sort_unstable_by_key(|b| b.first().copied().unwrap_or(usize::MAX));
    blocks
}

/// A labelled forest on `{1..n}`: one tree per block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LabeledForest {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
    /// Edges `(u, v)` with `u < v`, sorted, one list per block.
    pub trees: Vec<Vec<(usize, usize)>>,
}

impl LabeledForest {
    /// All edges of the forest, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self.trees.iter().flatten().copied().collect();
        e.sort_unstable();
        e
    }

    /// Blocks partition `{1..n}` and each edge list is a spanning tree of its block.
    pub fn check(&self) -> Result<()> {
        let mut seen = vec![false; self.n + 1];
        for b in &self.blocks {
            for &v in b {
                if v == 0 || v > self.n || seen[v] {
                    return Err(Error::InternalConsistency(format!("bad block vertex {v}")));
                }
                seen[v] = true;
            }
        }
        if seen.iter().skip(1).any(|s| !s) {
            return Err(Error::InternalConsistency("blocks do not cover 1..n".into()));
        }
        for (b, edges) in self.blocks.iter().zip(&self.trees) {
            if edges.len() + 1 != b.len() {
                return Err(Error::InternalConsistency("edge count is not block size - 1".into()));
            }
            let mut parent: Vec<usize> = (0..=self.n).collect();
            fn find(p: &mut [usize], mut v: usize) -> usize {
                while p[v] != v {
                    p[v] = p[p[v]];
                    v = p[v];
                }
                v
            }
            for &(u, v) in edges {
                if b.binary_search(&u).is_err() || b.binary_search(&v).is_err() {
                    return Err(Error::InternalConsistency(format!("edge ({u},{v}) leaves its block")));
                }
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru == rv {
                    return Err(Error::InternalConsistency(format!("edge ({u},{v}) closes a cycle")));
                }
                parent[ru] = rv;
            }
        }
        Ok(())
    }
}

/// Uniform labelled tree on the given vertex set via a random Prüfer sequence.
pub fn random_tree<R: Rng + ?Sized>(vertices: &[usize], rng: &mut R) -> Vec<(usize, usize)> {
    let m = vertices.len();
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    if m == 2 {
        edges.push((vertices[0].min(vertices[1]), vertices[0].max(vertices[1])));
    } else if m > 2 {
        let code: Vec<usize> = (0..m - 2).map(|_| rng.gen_range(0..m)).collect();
        let mut degree = vec![1usize; m];
        for &c in &code {
            degree[c] += 1;
        }
        let mut leaves: BinaryHeap<Reverse<usize>> =
            (0..m).filter(|&i| degree[i] == 1).map(Reverse).collect();
        for &c in &code {
            let Reverse(leaf) = leaves.pop().expect("a leaf exists");
            edges.push((leaf, c));
            degree[c] -= 1;
            if degree[c] == 1 {
                leaves.push(Reverse(c));
            }
        }
        let Reverse(u) = leaves.pop().expect("two leaves remain");
        let Reverse(v) = leaves.pop().expect("two leaves remain");
        edges.push((u, v));
        for e in edges.iter_mut() {
            let (a, b) = (vertices[e.0], vertices[e.1]);
            *e = (a.min(b), a.max(b));
        }
    }
    edges.sort_unstable();
    edges
}

/// Uniform forests on `{1..n}` with exactly `k` trees, by rejection on the
/// sum of `k` iid Boltzmann tree sizes.
pub struct ForestSampler {
    n: usize,
    k: usize,
    dist: SizeDistribution,
}

impl ForestSampler {
    /// `x` defaults to `x_λ` for `λ = k/n` above `λ* = 1/2`, and to `ρ = 1/e`
    /// otherwise.
    pub fn new(n: usize, k: usize, x: Option<f64>) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
        }
        let trees = species::builtin("trees")?;
        let x = match x {
            Some(x) => x,
            None => default_forest_x(&trees, n, k)?,
        };
        check_x(&trees, x)?;
        // sizes above n never survive conditioning on the sum, so the table stops at n
        let dist = size_distribution(&trees, x, n)?;
        Ok(ForestSampler { n, k, dist })
    }

    pub fn x(&self) -> f64 {
        self.dist.x
    }

    pub fn size_distribution(&self) -> &SizeDistribution {
        &self.dist
    }

    /// Probability that `k` iid sizes sum to `n` under the table.
    pub fn acceptance_probability(&self) -> f64 {
        sum_probability_exact(&self.dist, self.k, self.n)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_rejects: u64) -> Result<LabeledForest> {
        let mut sizes = vec![0usize; self.k];
        let mut attempts = 0u64;
        loop {
            attempts += 1;
            let mut total = 0;
            for s in sizes.iter_mut() {
                *s = sample_size(&self.dist, rng);
                total += *s;
            }
            if total == self.n {
                break;
            }
            if attempts > max_rejects {
                return Err(Error::RetryBudget {
                    attempts,
                    acceptance_estimate: self.acceptance_probability(),
                });
            }
        }
        let blocks = sample_partition(&sizes, rng);
        let trees = blocks.iter().map(|b| random_tree(b, rng)).collect();
        Ok(LabeledForest { n: self.n, blocks, trees })
    }
}

fn default_forest_x(trees: &ConnectedClass, n: usize, k: usize) -> Result<f64> {
    let ls = asymptotics::lambda_star(trees)?;
    let rho = radius(trees);
    let lambda = k as f64 / n as f64;
    if k == n {
        // only all-singleton draws are accepted; small x makes them likely
        Ok(rho / n as f64)
    } else if lambda > ls + asymptotics::CRITICAL_BAND {
        Ok(asymptotics::solve_supercritical(trees, lambda)?.x_lambda)
    } else {
        Ok(rho)
    }
}

/// One uniform forest on `{1..n}` with `k` trees.
pub fn sample_forest<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    x: Option<f64>,
    rng: &mut R,
    max_rejects: u64,
) -> Result<LabeledForest> {
    ForestSampler::new(n, k, x)?.sample(rng, max_rejects)
}

/// `P(Σ_{i≤k} |γ_i| = n)` by convolving the table `k` times.
pub fn sum_probability_exact(dist: &SizeDistribution, k: usize, n: usize) -> f64 {
    if k == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut cur = vec![0.0; n + 1];
    cur[0] = 1.0;
    for _ in 0..k {
        let mut next = vec![0.0; n + 1];
        for (t, &pt) in cur.iter().enumerate() {
            if pt == 0.0 {
                continue;
            }
            for s in 1..=(n - t).min(dist.n_max) {
                next[t + s] += pt * dist.pmf[s - 1];
            }
        }
        cur = next;
    }
    cur[n]
}

/// Monte Carlo estimate of `P(Σ_{i≤k} |γ_i| = n)` with its binomial
/// standard error.
pub fn mc_sum_probability<R: Rng + ?Sized>(
    dist: &SizeDistribution,
    k: usize,
    n: usize,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if k == 0 || trials == 0 {
        return Err(Error::Domain("k and trials must be at least 1".into()));
    }
    let mut hits = 0u64;
    for _ in 0..trials {
        let s: usize = (0..k).map(|_| sample_size(dist, rng)).sum();
        if s == n {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok((p, (p * (1.0 - p) / trials as f64).sqrt()))
}
