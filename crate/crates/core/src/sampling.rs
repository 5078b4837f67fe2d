//! Uniform random generation of planar tanglegrams by recursive
//! decomposition, plus irreducible layout draws (exact or by random walk on
//! the flip graph) and goodness-of-fit diagnostics.
//!
//! Every random choice on the exact path is a uniform integer below an exact
//! integer bound, requested from a [`DecisionSource`]. A seeded ChaCha20
//! stream serves real draws, while [`Replay`] walks every branch of the
//! decision tree so that output probabilities can be computed exactly.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Display;
use std::rc::Rc;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::counting::CountTable;
use crate::duality::pair_to_layout;
use crate::polygon::{
    count_triangulations_avoiding, enumerate_triangulations, flip_pair, moves, triangulations_avoiding, DisjointPair,
    PolygonError, Symmetry, Triangulation, DEFAULT_PAIR_CAP,
};
use crate::tanglegram::{substitute, Layout, PlaneTree, Tanglegram, TanglegramError};

/// Default largest irreducible size drawn exactly.
pub const DEFAULT_EXACT_IRREDUCIBLE_CAP: usize = 10;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("count tables do not cover size {0}")]
    TablesMissing(usize),
    #[error("size {n} is below the minimum {min}")]
    TooSmall { n: usize, min: usize },
    #[error("irreducible size {k} exceeds the exact cap {cap}")]
    CapExceeded { k: usize, cap: usize },
    #[error("irreducible size {k} exceeds the exact cap {cap} and no burn-in was given for the random walk")]
    MissingBurnIn { k: usize, cap: usize },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("sampled object {0} is outside the enumerated support")]
    UnknownCategory(String),
    #[error("the support is empty")]
    EmptySupport,
    #[error("no observations")]
    NoSamples,
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error(transparent)]
    Tanglegram(#[from] TanglegramError),
}

pub type Result<T, E = SamplingError> = std::result::Result<T, E>;

/// A supply of uniform integer decisions.
pub trait DecisionSource: Sized {
    /// Uniform integer in `0..bound`; `bound` must be positive.
    fn below(&mut self, bound: &BigUint) -> BigUint;

    fn below_usize(&mut self, bound: usize) -> usize {
        self.below(&BigUint::from(bound)).to_usize().expect("value below a usize bound")
    }

    /// An independent source for the `index`-th sub-computation.
    fn fork(&mut self, index: u64) -> Self;
}

/// ChaCha20 keyed by a 32-byte seed. The root seed is SHA-256 of the 64-bit
/// user seed in little-endian order; child `i` of a stream with seed `s` has
/// seed SHA-256(`s` ‖ `i` as 8 little-endian bytes), so every node of a
/// recursion owns a stream determined by its path from the root.
#[derive(Clone)]
pub struct ChaChaStream {
    seed: [u8; 32],
    rng: ChaCha20Rng,
}

impl ChaChaStream {
    pub fn new(seed: u64) -> Self {
        Self::from_seed(Sha256::digest(seed.to_le_bytes()).into())
    }

    fn from_seed(seed: [u8; 32]) -> Self {
        ChaChaStream { seed, rng: ChaCha20Rng::from_seed(seed) }
    }

    pub fn child(&self, index: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(self.seed);
        hasher.update(index.to_le_bytes());
        Self::from_seed(hasher.finalize().into())
    }
}

impl DecisionSource for ChaChaStream {
    fn below(&mut self, bound: &BigUint) -> BigUint {
        assert!(!bound.is_zero(), "empty range");
        if let Some(b) = bound.to_u64() {
            return BigUint::from(below_u64(&mut self.rng, b));
        }
        let bits = bound.bits() as usize;
        let mut bytes = vec![0u8; bits.div_ceil(8)];
        let spare = bytes.len() * 8 - bits;
        loop {
            self.rng.fill_bytes(&mut bytes);
            *bytes.last_mut().unwrap() &= 0xff >> spare;
            let x = BigUint::from_bytes_le(&bytes);
            if &x < bound {
                return x;
            }
        }
    }

    fn below_usize(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        below_u64(&mut self.rng, bound as u64) as usize
    }

    fn fork(&mut self, index: u64) -> Self {
        self.child(index)
    }
}

/// Rejection from the smallest enclosing power of two.
fn below_u64(rng: &mut ChaCha20Rng, bound: u64) -> u64 {
    let mask = u64::MAX >> (bound - 1).leading_zeros().min(63);
    let mask = if bound == 1 { 0 } else { mask };
    loop {
        let x = rng.next_u64() & mask;
        if x < bound {
            return x;
        }
    }
}

#[derive(Default)]
struct ReplayState {
    script: Vec<BigUint>,
    bounds: Vec<BigUint>,
    pos: usize,
}

/// Answers decisions from a script and extends it with zeros, recording
/// every bound. Forks share the script, so a whole recursion is one path.
#[derive(Clone, Default)]
pub struct Replay {
    state: Rc<RefCell<ReplayState>>,
}

impl Replay {
    fn probability(&self) -> BigRational {
        let s = self.state.borrow();
        let denominator = s.bounds[..s.pos].iter().fold(BigUint::one(), |acc, b| acc * b);
        BigRational::new(1.into(), denominator.into())
    }

    /// Moves to the next path in lexicographic order; false when exhausted.
    fn advance(&self) -> bool {
        let mut s = self.state.borrow_mut();
        let used = s.pos;
        s.script.truncate(used);
        s.bounds.truncate(used);
        s.pos = 0;
        while let Some(last) = s.script.pop() {
            let bound = s.bounds.pop().unwrap();
            let next = last + 1u8;
            if next < bound {
                s.script.push(next);
                s.bounds.push(bound);
                return true;
            }
        }
        false
    }
}

impl DecisionSource for Replay {
    fn below(&mut self, bound: &BigUint) -> BigUint {
        assert!(!bound.is_zero(), "empty range");
        let mut s = self.state.borrow_mut();
        let pos = s.pos;
        s.pos += 1;
        if pos < s.script.len() {
            assert_eq!(&s.bounds[pos], bound, "decision tree is not deterministic");
            s.script[pos].clone()
        } else {
            s.script.push(BigUint::zero());
            s.bounds.push(bound.clone());
            BigUint::zero()
        }
    }

    fn fork(&mut self, _index: u64) -> Self {
        self.clone()
    }
}

/// Runs `f` along every path of its decision tree and sums the exact path
/// probabilities by outcome.
pub fn exact_outcomes<T: Ord, E>(
    mut f: impl FnMut(&mut Replay) -> Result<T, E>,
) -> Result<BTreeMap<T, BigRational>, E> {
    let mut replay = Replay::default();
    let mut out: BTreeMap<T, BigRational> = BTreeMap::new();
    loop {
        let value = f(&mut replay)?;
        let p = replay.probability();
        *out.entry(value).or_insert_with(BigRational::zero) += p;
        if !replay.advance() {
            return Ok(out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Irreducible cores up to this size are drawn exactly.
    pub exact_irreducible_cap: usize,
    /// Random-walk steps for larger cores. Without it such cores are an error.
    pub mcmc_burn_in: Option<usize>,
    /// Start each walk at a uniformly chosen symmetric image of the standard
    /// pair instead of the standard pair itself.
    pub randomize_start: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            exact_irreducible_cap: DEFAULT_EXACT_IRREDUCIBLE_CAP,
            mcmc_burn_in: None,
            randomize_start: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.exact_irreducible_cap + 1 > DEFAULT_PAIR_CAP {
            return Err(SamplingError::InvalidConfig(format!(
                "exact cap {} needs pair enumeration beyond the {}-gon",
                self.exact_irreducible_cap, DEFAULT_PAIR_CAP
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleMode {
    Exact,
    Approximate,
}

/// How one tanglegram of the recursion was assembled.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SampleTrace {
    pub code: String,
    pub chosen_k: usize,
    /// Block sizes, top to bottom.
    pub composition: Vec<usize>,
    /// The layout of the core the blocks were substituted into.
    pub layout: String,
    /// Both blocks are one shared sample.
    pub duplicate: bool,
    pub children: Vec<SampleTrace>,
}

impl SampleTrace {
    fn leaf(t: &Tanglegram) -> Self {
        SampleTrace {
            code: t.code().to_string(),
            chosen_k: t.size(),
            composition: vec![1; t.size()],
            layout: t.presentation().to_string(),
            duplicate: false,
            children: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub tanglegram: Tanglegram,
    pub trace: SampleTrace,
    pub mode: SampleMode,
}

fn table_t(tables: &CountTable, n: usize) -> Result<&BigUint> {
    tables.t(n).map_err(|_| SamplingError::TablesMissing(n))
}

fn table_conv(tables: &CountTable, j: usize, m: usize) -> Result<&BigUint> {
    tables.conv(j, m).map_err(|_| SamplingError::TablesMissing(m))
}

/// First index at which the running sum of `weights` exceeds `r`.
fn pick(r: &BigUint, weights: impl Iterator<Item = BigUint>) -> usize {
    let mut acc = BigUint::zero();
    for (i, w) in weights.enumerate() {
        acc += w;
        if r < &acc {
            return i;
        }
    }
    unreachable!("draw exceeds the total weight")
}

/// Core size `k` with probability `t_{n,k} / t_n`.
pub fn sample_k(n: usize, tables: &CountTable, src: &mut impl DecisionSource) -> Result<usize> {
    if n < 3 {
        return Err(SamplingError::TooSmall { n, min: 3 });
    }
    let r = src.below(table_t(tables, n)?);
    let weights = (2..=n).map(|k| tables.t_nk(n, k).expect("row covered").clone());
    Ok(2 + pick(&r, weights))
}

/// Block sizes `(a_1, …, a_k)` with probability `Π t_{a_i} / [x^n] T^k`,
/// one part at a time.
pub fn sample_composition(n: usize, k: usize, tables: &CountTable, src: &mut impl DecisionSource) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(SamplingError::InvalidConfig(format!("no composition of {n} into {k} parts")));
    }
    table_t(tables, n)?;
    let mut parts = Vec::with_capacity(k);
    let mut rest = n;
    for j in (2..=k).rev() {
        let r = src.below(table_conv(tables, j, rest)?);
        let weights = (1..=rest - (j - 1)).map(|m| tables.t(m).unwrap() * tables.conv(j - 1, rest - m).unwrap());
        let m = 1 + pick(&r, weights);
        parts.push(m);
        rest -= m;
    }
    parts.push(rest);
    Ok(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairBranch {
    /// One tanglegram of size `n / 2` used for both blocks.
    Duplicate(usize),
    /// Independent blocks of these sizes, top first.
    Sizes(usize, usize),
}

/// The size-two core branch. Out of `2 t_{n,2}` equally likely tickets,
/// `t_{n/2}` select the duplicate branch for even `n` and `t_a t_{n−a}`
/// select sizes `(a, n − a)`.
pub fn sample_pair_sizes(n: usize, tables: &CountTable, src: &mut impl DecisionSource) -> Result<PairBranch> {
    if n < 2 {
        return Err(SamplingError::TooSmall { n, min: 2 });
    }
    table_t(tables, n)?;
    let half = if n % 2 == 0 { tables.t(n / 2).unwrap().clone() } else { BigUint::zero() };
    let total = table_conv(tables, 2, n)? + &half;
    let mut r = src.below(&total);
    if r < half {
        return Ok(PairBranch::Duplicate(n / 2));
    }
    r -= half;
    let weights = (1..n).map(|a| tables.t(a).unwrap() * tables.t(n - a).unwrap());
    let a = 1 + pick(&r, weights);
    Ok(PairBranch::Sizes(a, n - a))
}

/// Checks that every branch distribution of the sampler sums to one, as
/// integer identities over the tables.
pub fn check_branch_identities(tables: &CountTable) -> Result<()> {
    let fail = |what: String| Err(SamplingError::InvalidConfig(format!("count tables violate {what}")));
    for n in 2..=tables.max_n() {
        let t = tables.t(n).unwrap();
        let row: BigUint = (2..=n).map(|k| tables.t_nk(n, k).unwrap()).sum();
        if n >= 3 && &row != t {
            return fail(format!("Σ_k t_{{{n},k}} = t_{n}"));
        }
        for j in 2..=n {
            let total: BigUint = (1..=n - (j - 1)).map(|m| tables.t(m).unwrap() * tables.conv(j - 1, n - m).unwrap()).sum();
            if &total != tables.conv(j, n).unwrap() {
                return fail(format!("the convolution at ({j}, {n})"));
            }
        }
        let half = if n % 2 == 0 { tables.t(n / 2).unwrap().clone() } else { BigUint::zero() };
        if tables.conv(2, n).unwrap() + half != tables.t_nk(n, 2).unwrap() * 2u8 {
            return fail(format!("the size-two branch at {n}"));
        }
    }
    Ok(())
}

/// Triangulations of a polygon with the number of disjoint partners of each,
/// accumulated, indexing the ordered disjoint pairs without listing them.
pub struct PairIndex {
    firsts: Vec<Triangulation>,
    ends: Vec<u64>,
}

impl PairIndex {
    fn build(n: usize) -> Result<Self> {
        let firsts = enumerate_triangulations(n)?;
        let mut acc = 0u64;
        let ends = firsts
            .iter()
            .map(|t| {
                acc += count_triangulations_avoiding(n, t.mask());
                acc
            })
            .collect();
        Ok(PairIndex { firsts, ends })
    }

    /// Shared index for the `n`-gon, built on first use.
    pub fn for_polygon(n: usize) -> Result<Arc<PairIndex>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PairIndex>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(index) = cache.lock().unwrap().get(&n) {
            return Ok(index.clone());
        }
        let index = Arc::new(Self::build(n)?);
        Ok(cache.lock().unwrap().entry(n).or_insert(index).clone())
    }

    pub fn len(&self) -> u64 {
        self.ends.last().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The pair at position `i` of the full listing, ordered by first and then
    /// second triangulation.
    pub fn get(&self, i: u64) -> Option<DisjointPair> {
        let slot = self.ends.partition_point(|&e| e <= i);
        let first = self.firsts.get(slot)?;
        let before = if slot == 0 { 0 } else { self.ends[slot - 1] };
        let second = triangulations_avoiding(first)[(i - before) as usize];
        Some(DisjointPair::new(*first, second).expect("partner avoids the first triangulation"))
    }
}

fn cherry_layout() -> Layout {
    Layout { left: PlaneTree::cherry(), right: PlaneTree::cherry() }
}

/// Uniform over the irreducible layouts of size `k`: for `k ≥ 3` a uniform
/// position among the disjoint pairs of the `(k + 1)`-gon, carried over by
/// the dual bijection.
pub fn sample_irreducible_layout_exact(k: usize, src: &mut impl DecisionSource) -> Result<Layout> {
    sample_irreducible_layout_exact_with_cap(k, DEFAULT_EXACT_IRREDUCIBLE_CAP, src)
}

pub fn sample_irreducible_layout_exact_with_cap(k: usize, cap: usize, src: &mut impl DecisionSource) -> Result<Layout> {
    if k < 2 {
        return Err(SamplingError::TooSmall { n: k, min: 2 });
    }
    if k > cap || k + 1 > DEFAULT_PAIR_CAP {
        return Err(SamplingError::CapExceeded { k, cap: cap.min(DEFAULT_PAIR_CAP - 1) });
    }
    if k == 2 {
        return Ok(cherry_layout());
    }
    let index = PairIndex::for_polygon(k + 1)?;
    let i = src.below(&BigUint::from(index.len())).to_u64().unwrap();
    Ok(pair_to_layout(&index.get(i).unwrap()))
}

/// One step of the simple random walk: a uniform choice among the `2(n − 3)`
/// flips.
pub fn random_walk_step(p: &DisjointPair, src: &mut impl DecisionSource) -> DisjointPair {
    let options = moves(p);
    let m = options[src.below_usize(options.len())];
    flip_pair(p, m).expect("move taken from the pair itself").pair
}

/// Approximately uniform irreducible layout: `burn_in` walk steps on the
/// flip graph of the `(k + 1)`-gon from the standard pair, or from a random
/// symmetric image of it.
pub fn sample_irreducible_layout_mcmc(
    k: usize,
    burn_in: usize,
    randomize_start: bool,
    src: &mut impl DecisionSource,
) -> Result<Layout> {
    if k < 2 {
        return Err(SamplingError::TooSmall { n: k, min: 2 });
    }
    if k == 2 {
        return Ok(cherry_layout());
    }
    let n = k + 1;
    let mut p = DisjointPair::standard(n)?;
    if randomize_start {
        let symmetries = Symmetry::all(n);
        p = symmetries[src.below_usize(symmetries.len())].apply(&p);
    }
    for _ in 0..burn_in {
        p = random_walk_step(&p, src);
    }
    Ok(pair_to_layout(&p))
}

/// Recursive planar tanglegram sampler over shared count tables.
pub struct Sampler<'a> {
    tables: &'a CountTable,
    config: SamplerConfig,
}

impl<'a> Sampler<'a> {
    pub fn new(tables: &'a CountTable, config: SamplerConfig) -> Result<Self> {
        config.validate()?;
        check_branch_identities(tables)?;
        Ok(Sampler { tables, config })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// The stream for the `i`-th of several independent samples.
    pub fn stream(&self, i: u64) -> ChaChaStream {
        ChaChaStream::new(self.config.seed).child(i)
    }

    /// A planar tanglegram of size `n`, uniformly distributed when the mode
    /// is exact.
    pub fn sample(&self, n: usize, src: &mut impl DecisionSource) -> Result<SampleOutcome> {
        if n == 0 {
            return Err(SamplingError::TooSmall { n, min: 1 });
        }
        table_t(self.tables, n)?;
        let mut approximate = false;
        let (tanglegram, trace) = self.node(n, src, &mut approximate)?;
        let mode = if approximate { SampleMode::Approximate } else { SampleMode::Exact };
        Ok(SampleOutcome { tanglegram, trace, mode })
    }

    fn core_layout(&self, k: usize, src: &mut impl DecisionSource, approximate: &mut bool) -> Result<Layout> {
        let cap = self.config.exact_irreducible_cap;
        if k <= cap {
            return sample_irreducible_layout_exact_with_cap(k, cap, src);
        }
        let burn_in = self.config.mcmc_burn_in.ok_or(SamplingError::MissingBurnIn { k, cap })?;
        *approximate = true;
        sample_irreducible_layout_mcmc(k, burn_in, self.config.randomize_start, src)
    }

    fn node<D: DecisionSource>(&self, n: usize, src: &mut D, approximate: &mut bool) -> Result<(Tanglegram, SampleTrace)> {
        match n {
            1 => {
                let t = Tanglegram::single();
                let trace = SampleTrace::leaf(&t);
                return Ok((t, trace));
            }
            2 => {
                let t = Tanglegram::cherry();
                let trace = SampleTrace::leaf(&t);
                return Ok((t, trace));
            }
            _ => {}
        }
        let k = sample_k(n, self.tables, src)?;
        let (layout, composition, duplicate, children) = if k == 2 {
            match sample_pair_sizes(n, self.tables, src)? {
                PairBranch::Duplicate(m) => {
                    let child = self.node(m, &mut src.fork(0), approximate)?;
                    (cherry_layout(), vec![m, m], true, vec![child.clone(), child])
                }
                PairBranch::Sizes(a, b) => {
                    let first = self.node(a, &mut src.fork(0), approximate)?;
                    let second = self.node(b, &mut src.fork(1), approximate)?;
                    (cherry_layout(), vec![a, b], false, vec![first, second])
                }
            }
        } else {
            let composition = sample_composition(n, k, self.tables, src)?;
            let layout = self.core_layout(k, src, approximate)?;
            let children = composition
                .iter()
                .enumerate()
                .map(|(i, &a)| self.node(a, &mut src.fork(i as u64), approximate))
                .collect::<Result<Vec<_>>>()?;
            (layout, composition, false, children)
        };
        let (blocks, traces): (Vec<Tanglegram>, Vec<SampleTrace>) = children.into_iter().unzip();
        let t = substitute(&layout, &blocks)?;
        let trace = SampleTrace {
            code: t.code().to_string(),
            chosen_k: k,
            composition,
            layout: layout.to_string(),
            duplicate,
            children: traces,
        };
        Ok((t, trace))
    }
}

/// Exact output distribution of the sampler at size `n`, by expanding its
/// whole decision tree. Every core must be within the exact cap.
pub fn exact_distribution(n: usize, tables: &CountTable, config: &SamplerConfig) -> Result<BTreeMap<String, BigRational>> {
    if n > config.exact_irreducible_cap.max(2) {
        return Err(SamplingError::CapExceeded { k: n, cap: config.exact_irreducible_cap });
    }
    let sampler = Sampler::new(tables, config.clone())?;
    exact_outcomes(|src| sampler.sample(n, src).map(|o| o.tanglegram.code().to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareReport {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub p_value: f64,
    pub significance: f64,
    pub total: u64,
    pub passed: bool,
}

/// Pearson's test of `observed` against the uniform distribution on
/// `support`. Categories missing from `observed` count as zero.
pub fn chi_square_uniformity<K: Ord + Display>(
    observed: &BTreeMap<K, u64>,
    support: &BTreeSet<K>,
    significance: f64,
) -> Result<ChiSquareReport> {
    if support.is_empty() {
        return Err(SamplingError::EmptySupport);
    }
    if let Some(k) = observed.keys().find(|k| !support.contains(k)) {
        return Err(SamplingError::UnknownCategory(k.to_string()));
    }
    let total: u64 = observed.values().sum();
    if total == 0 {
        return Err(SamplingError::NoSamples);
    }
    let expected = total as f64 / support.len() as f64;
    let statistic = support
        .iter()
        .map(|k| {
            let o = observed.get(k).copied().unwrap_or(0) as f64;
            (o - expected).powi(2) / expected
        })
        .sum::<f64>();
    let dof = support.len() - 1;
    let (critical_value, p_value) = if dof == 0 {
        (0.0, 1.0)
    } else {
        let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        (dist.inverse_cdf(1.0 - significance), dist.sf(statistic))
    };
    Ok(ChiSquareReport {
        statistic,
        degrees_of_freedom: dof,
        critical_value,
        p_value,
        significance,
        total,
        passed: statistic <= critical_value,
    })
}
