//! DACsHUND-valid batch configurations and the greedy parameter search.
//!
//! A configuration partitions the ordered prime list into consecutive
//! batches. It is DACsHUND-valid when every batch's primes share at least one
//! admissible DAC length, so scalar multiplications inside a batch run with a
//! single common chain length and no padding. On top of validity sit the
//! key-space counting functions (`phi`, `psi`), a deterministic cost model in
//! field-multiplication equivalents, and a greedy optimizer that moves
//! boundary primes between batches while the model cost strictly decreases.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;

use crate::dac::DacshundMap;
use crate::{Error, Result};

// ---- key-space counting ----------------------------------------------------

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of integer vectors in `Z^x` with l1-norm at most `y`:
/// `Phi(x, y) = sum_k C(x,k) C(y,k) 2^k`.
pub fn phi(x: u64, y: u64) -> BigUint {
    let mut acc = BigUint::from(0u32);
    for k in 0..=x.min(y) {
        acc += binomial(x, k) * binomial(y, k) * (BigUint::one() << k);
    }
    acc
}

/// Unitary-exponent key count for one batch: `Psi(N, M) = C(N, M) 2^M`
/// (M distinct degrees, each with a sign).
pub fn psi(n: u64, m: u64) -> BigUint {
    binomial(n, m) * (BigUint::one() << m)
}

/// The dummy-allowing variant `sum_{j<=M} C(N, j) 2^j`; computed for
/// completeness, not used by the search or the evaluator.
pub fn psi_dummy(n: u64, m: u64) -> BigUint {
    let mut acc = BigUint::from(0u32);
    for j in 0..=m.min(n) {
        acc += binomial(n, j) * (BigUint::one() << j);
    }
    acc
}

/// Exact key-space size with its bit count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyspaceSize {
    pub size: BigUint,
    /// `floor(log2 size)`.
    pub bits: u64,
}

impl KeyspaceSize {
    pub fn from_size(size: BigUint) -> Self {
        let bits = size.bits().saturating_sub(1);
        KeyspaceSize { size, bits }
    }

    pub fn meets_target(&self, target_bits: u64) -> bool {
        self.size >= (BigUint::one() << target_bits)
    }
}

// ---- configurations ----------------------------------------------------------

/// A consecutive batch partition with per-batch bounds and common DAC lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchConfig {
    /// Full ordered prime list.
    pub primes: Vec<u64>,
    /// Batch sizes `N_i`; consecutive slices of `primes`.
    pub sizes: Vec<usize>,
    /// Bounds `M_i` (isogenies per batch), `1 <= M_i <= N_i`.
    pub bounds: Vec<usize>,
    /// Common DAC length per batch (minimum of the intersection).
    pub dac_lens: Vec<u32>,
}

impl BatchConfig {
    pub fn batch_count(&self) -> usize {
        self.sizes.len()
    }

    /// Primes of batch `i` (consecutive slice).
    pub fn batch_primes(&self, i: usize) -> &[u64] {
        let start: usize = self.sizes[..i].iter().sum();
        &self.primes[start..start + self.sizes[i]]
    }

    /// Total number of isogenies `sum M_i`.
    pub fn isogeny_count(&self) -> u64 {
        self.bounds.iter().map(|&m| m as u64).sum()
    }

    /// Evaluation window `[l_j, l_{N-M+j}]` of sub-batch slot `j`
    /// (0-indexed) inside batch `i`.
    pub fn window(&self, i: usize, j: usize) -> (u64, u64) {
        let ps = self.batch_primes(i);
        let n = self.sizes[i];
        let m = self.bounds[i];
        (ps[j], ps[n - m + j])
    }

    /// Exact key-space size `prod Psi(N_i, M_i)`.
    pub fn keyspace(&self) -> KeyspaceSize {
        let mut size = BigUint::one();
        for (n, m) in self.sizes.iter().zip(&self.bounds) {
            size *= psi(*n as u64, *m as u64);
        }
        KeyspaceSize::from_size(size)
    }

    /// Full validity: partition shape, DACsHUND intersections containing the
    /// recorded lengths, bound ranges, and the Matryoshka window rule
    /// `l_max <= 2 l_min - 1` per batch.
    pub fn validate(&self, map: &DacshundMap) -> Result<()> {
        let b = self.sizes.len();
        if self.bounds.len() != b || self.dac_lens.len() != b || b == 0 {
            return Err(Error::InvalidConfig("inconsistent vector lengths".into()));
        }
        if self.sizes.iter().sum::<usize>() != self.primes.len() {
            return Err(Error::InvalidConfig(
                "sizes do not cover the prime list".into(),
            ));
        }
        let mut sorted = self.primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != self.primes {
            return Err(Error::InvalidConfig(
                "primes must be strictly increasing".into(),
            ));
        }
        for i in 0..b {
            let ps = self.batch_primes(i);
            let inter = batch_intersection(ps, map)?;
            if !inter.contains(&self.dac_lens[i]) {
                return Err(Error::InvalidConfig(format!(
                    "batch {i}: dac length {} not admissible for all primes",
                    self.dac_lens[i]
                )));
            }
            if self.bounds[i] == 0 || self.bounds[i] > self.sizes[i] {
                return Err(Error::InvalidConfig(format!(
                    "batch {i}: bound {} out of range 1..={}",
                    self.bounds[i], self.sizes[i]
                )));
            }
            let (lo, hi) = (ps[0], ps[ps.len() - 1]);
            if hi > 2 * lo - 1 {
                return Err(Error::InvalidConfig(format!(
                    "batch {i}: [{lo}, {hi}] violates the window rule hi <= 2*lo - 1"
                )));
            }
        }
        Ok(())
    }
}

/// Intersection of the admissible DAC-length sets of a prime slice.
pub fn batch_intersection(primes: &[u64], map: &DacshundMap) -> Result<BTreeSet<u32>> {
    let mut iter = primes.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidConfig("empty batch".into()))?;
    let mut inter = map.lengths(*first)?;
    for &l in iter {
        let lens = map.lengths(l)?;
        inter = inter.intersection(&lens).copied().collect();
        if inter.is_empty() {
            break;
        }
    }
    Ok(inter)
}

/// DACsHUND validity over a full partition: every batch's intersection of
/// DAC-length sets is non-empty. Requires `sum(sizes) == primes.len()`.
pub fn is_valid_dacshund(sizes: &[usize], primes: &[u64], map: &DacshundMap) -> Result<bool> {
    if sizes.iter().sum::<usize>() != primes.len() {
        return Err(Error::Parameter(format!(
            "sizes sum to {}, prime list has {}",
            sizes.iter().sum::<usize>(),
            primes.len()
        )));
    }
    prefix_valid(sizes, primes, map)
}

/// Validity over the first `sum(sizes)` primes; used while the initializer
/// grows a partial partition.
fn prefix_valid(sizes: &[usize], primes: &[u64], map: &DacshundMap) -> Result<bool> {
    let mut start = 0usize;
    for &n in sizes {
        let slice = &primes[start..start + n];
        if batch_intersection(slice, map)?.is_empty() {
            return Ok(false);
        }
        start += n;
    }
    Ok(true)
}

/// Valid initial batch sizes: start from `(1, ..., 1)` and cycle through the
/// batches, incrementing any `N_i` whose increment keeps the (prefix)
/// configuration DACsHUND-valid, until all primes are allocated. `None` when
/// a full cycle makes no progress.
pub fn find_initial_batch_sizes(
    b: usize,
    primes: &[u64],
    map: &DacshundMap,
) -> Result<Option<Vec<usize>>> {
    if b == 0 || b > primes.len() {
        return Err(Error::Parameter(format!(
            "batch count {b} out of range 1..={}",
            primes.len()
        )));
    }
    let mut sizes = vec![1usize; b];
    let mut total = b;
    while total < primes.len() {
        let mut progressed = false;
        for i in 0..b {
            if total == primes.len() {
                break;
            }
            sizes[i] += 1;
            if prefix_valid(&sizes, primes, map)? {
                total += 1;
                progressed = true;
            } else {
                sizes[i] -= 1;
            }
        }
        if !progressed {
            return Ok(None);
        }
    }
    Ok(Some(sizes))
}

// ---- cost model --------------------------------------------------------------

/// Deterministic cost model in field-multiplication equivalents (`mul + sqr`;
/// additions are free). The per-window isogeny terms mirror the Matryoshka
/// backends operation by operation, so the model is exact for the isogeny
/// stage; the per-slot kernel preparation charges the cofactor ladder, one
/// DAC multiplication for every other prime in the parameter set at its
/// batch's common length, and the order-check DAC. Action-level constants
/// (deterministic point search, validation, the final inversion) are *not*
/// modeled.
#[derive(Clone, Copy, Debug)]
pub struct CostModel {
    /// Batches whose smallest prime is at least this use the √élu backend.
    pub crossover: u64,
    /// `f` of the field shape (cofactor ladder length).
    pub two_exponent: u32,
    /// Bit length of the odd cofactor `g`.
    pub g_bits: u64,
    /// Points pushed through every isogeny (two for the group action).
    pub npush: u64,
}

const FP_XDBL: u64 = 6;
const FP_XADD: u64 = 6;

impl CostModel {
    /// Montgomery ladder over a `width`-bit scalar.
    pub fn ladder_cost(width: u64) -> u64 {
        FP_XDBL + (width - 1) * (FP_XADD + FP_XDBL)
    }

    /// DAC multiplication: one doubling plus `len + 1` differential adds.
    pub fn dacmul_cost(len: u32) -> u64 {
        FP_XDBL + (len as u64 + 1) * FP_XADD
    }

    fn bits(l: u64) -> u64 {
        64 - l.leading_zeros() as u64
    }

    fn chain_cost(n: usize) -> u64 {
        // multiples(n): one xdbl plus n-2 xadds
        if n <= 1 {
            0
        } else {
            FP_XDBL + (n as u64 - 2) * FP_XADD
        }
    }

    /// Exact operation count of the linear Matryoshka window `[lo, hi]`.
    pub fn m2_window(&self, lo: u64, hi: u64) -> u64 {
        let b_lo = (lo - 1) / 2;
        let b_hi = (hi - 1) / 2;
        let t = b_hi - b_lo;
        let w = Self::bits(hi);
        let np = self.npush;
        let order = Self::ladder_cost(w);
        let mults = Self::chain_cost(b_hi as usize);
        let factors = b_hi * (2 + 4 * np);
        // duplicate scan: sum_{i=1..t} 2 (t - 1 + i) = t (3t - 1)
        let compares = if t == 0 { 0 } else { t * (3 * t - 1) };
        let corr = 2 * t * np;
        let codomain = 4 * w + 8;
        let images = 4 * np;
        order + mults + factors + compares + corr + codomain + images
    }

    /// Exact operation count of the √élu Matryoshka window `[lo, hi]` with
    /// box parameters `(bs, gs)`.
    pub fn m14_window(&self, lo: u64, hi: u64, bs: u64, gs: u64) -> u64 {
        let b_lo = (lo - 1) / 2;
        let b_hi = (hi - 1) / 2;
        let t = b_hi - b_lo;
        let w = Self::bits(hi);
        let np = self.npush;
        let n_w = b_hi - 2 * bs * gs;
        let order = Self::ladder_cost(w);

        // chains: shared [2]K, then the odd and even differential chains
        let odd_needed = if bs >= 1 { 2 * bs - 1 } else { 1 };
        let largest_odd_half = if n_w == 0 {
            1
        } else if n_w % 2 == 1 {
            n_w
        } else {
            (n_w - 1).max(1)
        };
        let odd_max = odd_needed.max(largest_odd_half);
        let n_odd = odd_max.div_ceil(2);
        let even_max = n_w.max(if bs >= 1 && gs >= 1 { bs } else { 0 }).max(1);
        let mut chains = FP_XDBL; // [2]K
        if n_odd >= 2 {
            chains += (n_odd - 1) * FP_XADD;
        }
        if even_max >= 2 {
            chains += FP_XDBL + (even_max - 2) * FP_XADD;
        }

        // box
        let mut boxcost = 0;
        if bs >= 1 && gs >= 1 {
            if gs >= 2 {
                boxcost += FP_XDBL + (gs - 1) * FP_XADD; // [4bs] + giant chain
            }
            boxcost += 3 * gs; // per-giant monomials
            boxcost += 7 * bs; // per-baby coefficients
            boxcost += 2 * 3 * bs * gs; // the two codomain arguments
            boxcost += np * (3 + 5 * bs + 5 * bs * gs); // per pushed point
            boxcost += 2 + 2 * np; // folding resultants into the accumulators
        }

        // W walk: validation xdbl + compare + h pair + per-point factors
        let wloop = n_w * (FP_XDBL + 2 + 2 + 4 * np);

        let corr = 2 * t * np;
        let codomain = 4 * w + 8;
        let images = 4 * np;
        order + chains + boxcost + wloop + corr + codomain + images
    }

    /// Whether a batch starting at `lo` uses the √élu backend.
    pub fn uses_sqrt(&self, lo: u64) -> bool {
        lo >= self.crossover
    }

    /// Model cost of one isogeny slot with window `[lo, hi]`, given the
    /// batch's backend selection prime and box parameters.
    pub fn slot_iso_cost(&self, lo: u64, hi: u64, batch_lo: u64, bs: u64, gs: u64) -> u64 {
        if self.uses_sqrt(batch_lo) {
            self.m14_window(lo, hi, bs, gs)
        } else {
            self.m2_window(lo, hi)
        }
    }

    /// Kernel preparation for one slot of batch `i`: clear `2^f * g`, then
    /// one DAC multiplication per other prime (each batch at its common
    /// length), then the order-check DAC by the chosen prime itself.
    pub fn slot_prep_cost(&self, sizes: &[usize], dac_lens: &[u32], i: usize) -> u64 {
        let cof = Self::ladder_cost(self.two_exponent as u64 + self.g_bits);
        let mut dacs = 0u64;
        for (j, (&n, &len)) in sizes.iter().zip(dac_lens).enumerate() {
            let count = if j == i { n as u64 - 1 } else { n as u64 };
            dacs += count * Self::dacmul_cost(len);
        }
        cof + dacs + Self::dacmul_cost(dac_lens[i])
    }
}

/// Model cost of a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostEstimate {
    /// Total in field-multiplication equivalents; equals `sum(per_batch)`.
    pub total: u64,
    pub per_batch: Vec<u64>,
    /// `sum M_i`.
    pub isogeny_count: u64,
}

/// Box parameters the model assumes per batch: tuned to the batch's smallest
/// prime, like the evaluator.
pub fn batch_sqrt_params(lo: u64) -> (u64, u64) {
    let p = crate::isogeny::SqrtVeluParams::for_degree(lo);
    (p.bs as u64, p.gs as u64)
}

/// Evaluates the documented cost model on a configuration.
pub fn cost_estimate(
    config: &BatchConfig,
    map: &DacshundMap,
    model: &CostModel,
) -> Result<CostEstimate> {
    config.validate(map)?;
    let mut per_batch = Vec::with_capacity(config.batch_count());
    for i in 0..config.batch_count() {
        let ps = config.batch_primes(i);
        let batch_lo = ps[0];
        let (bs, gs) = if model.uses_sqrt(batch_lo) {
            batch_sqrt_params(batch_lo)
        } else {
            (0, 0)
        };
        let prep = model.slot_prep_cost(&config.sizes, &config.dac_lens, i);
        let mut cost = 0u64;
        for j in 0..config.bounds[i] {
            let (lo, hi) = config.window(i, j);
            cost += model.slot_iso_cost(lo, hi, batch_lo, bs, gs) + prep;
        }
        per_batch.push(cost);
    }
    Ok(CostEstimate {
        total: per_batch.iter().sum(),
        per_batch,
        isogeny_count: config.isogeny_count(),
    })
}

// ---- greedy search -------------------------------------------------------------

/// Search controls.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub batches_min: usize,
    pub batches_max: usize,
    pub target_bits: u64,
    pub model: CostModel,
}

/// One accepted step of the greedy log.
#[derive(Clone, Debug)]
pub struct SearchStep {
    pub batches: usize,
    pub sizes: Vec<usize>,
    pub cost: u64,
}

/// Search result: the best configuration, its estimate, and the accepted-move
/// log (non-increasing cost within each batch count).
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub config: BatchConfig,
    pub estimate: CostEstimate,
    pub keyspace: KeyspaceSize,
    pub log: Vec<SearchStep>,
}

/// Picks per-batch bounds meeting the key-space target with minimum
/// `sum M_i`: repeatedly increment the `M_i` with the largest key-space
/// gain (exact rational comparison), ties toward the batch with the cheaper
/// full-window isogeny cost, then lower index. `None` when even `M = N`
/// misses the target or a batch violates the window rule.
fn select_bounds(
    sizes: &[usize],
    primes: &[u64],
    target_bits: u64,
    model: &CostModel,
) -> Option<Vec<usize>> {
    let b = sizes.len();
    let mut start = 0usize;
    let mut batch_slices = Vec::with_capacity(b);
    for &n in sizes {
        let ps = &primes[start..start + n];
        let (lo, hi) = (ps[0], ps[n - 1]);
        // covers every slot window of every M (windows only narrow as M grows)
        if hi > 2 * lo - 1 {
            return None;
        }
        batch_slices.push(ps);
        start += n;
    }
    let iso_cost: Vec<u64> = batch_slices
        .iter()
        .map(|ps| {
            let lo = ps[0];
            let hi = ps[ps.len() - 1];
            let (bs, gs) = if model.uses_sqrt(lo) {
                batch_sqrt_params(lo)
            } else {
                (0, 0)
            };
            model.slot_iso_cost(lo, hi, lo, bs, gs)
        })
        .collect();

    let mut bounds = vec![1usize; b];
    let mut size = BigUint::one();
    for (i, &n) in sizes.iter().enumerate() {
        size *= psi(n as u64, bounds[i] as u64);
    }
    let target = BigUint::one() << target_bits;
    while size < target {
        // gain of incrementing M_i: Psi(N, M+1)/Psi(N, M) = 2 (N - M)/(M + 1)
        let mut best: Option<(usize, u64, u64)> = None; // (i, num, den)
        for i in 0..b {
            let (n, m) = (sizes[i] as u64, bounds[i] as u64);
            if m >= n {
                continue;
            }
            let (num, den) = (2 * (n - m), m + 1);
            let better = match best {
                None => true,
                Some((bi, bnum, bden)) => match (num * bden).cmp(&(bnum * den)) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => iso_cost[i] < iso_cost[bi],
                },
            };
            if better {
                best = Some((i, num, den));
            }
        }
        let (i, num, den) = best?;
        size = size * num / den;
        bounds[i] += 1;
    }
    Some(bounds)
}

/// Builds the full configuration (bounds + minimal common DAC lengths) for a
/// size vector, or `None` if no bounds meet the target.
fn build_config(
    sizes: &[usize],
    primes: &[u64],
    map: &DacshundMap,
    target_bits: u64,
    model: &CostModel,
) -> Result<Option<BatchConfig>> {
    let bounds = match select_bounds(sizes, primes, target_bits, model) {
        Some(b) => b,
        None => return Ok(None),
    };
    let mut dac_lens = Vec::with_capacity(sizes.len());
    let mut start = 0usize;
    for &n in sizes {
        let inter = batch_intersection(&primes[start..start + n], map)?;
        match inter.first() {
            Some(&len) => dac_lens.push(len),
            None => return Ok(None),
        }
        start += n;
    }
    Ok(Some(BatchConfig {
        primes: primes.to_vec(),
        sizes: sizes.to_vec(),
        bounds,
        dac_lens,
    }))
}

/// Greedy search for one batch count. Returns the locally optimal
/// configuration with its accepted-step log, or `None` if no valid
/// configuration exists for this `B`.
pub fn search_single_b(
    b: usize,
    primes: &[u64],
    map: &DacshundMap,
    target_bits: u64,
    model: &CostModel,
) -> Result<Option<(BatchConfig, CostEstimate, Vec<SearchStep>)>> {
    let Some(mut sizes) = find_initial_batch_sizes(b, primes, map)? else {
        return Ok(None);
    };
    let Some(mut config) = build_config(&sizes, primes, map, target_bits, model)? else {
        return Ok(None);
    };
    let mut estimate = cost_estimate(&config, map, model)?;
    let mut log = vec![SearchStep {
        batches: b,
        sizes: sizes.clone(),
        cost: estimate.total,
    }];
    // first-improvement over the fixed (i, j) move order; a move shrinks
    // batch i by one prime and grows batch j, shifting the consecutive
    // partition between them
    loop {
        let mut accepted = false;
        'moves: for i in 0..b {
            for j in 0..b {
                if i == j || sizes[i] <= 1 {
                    continue;
                }
                let mut cand = sizes.clone();
                cand[i] -= 1;
                cand[j] += 1;
                if !is_valid_dacshund(&cand, primes, map)? {
                    continue;
                }
                let Some(cfg) = build_config(&cand, primes, map, target_bits, model)? else {
                    continue;
                };
                let est = cost_estimate(&cfg, map, model)?;
                if est.total < estimate.total {
                    sizes = cand;
                    config = cfg;
                    estimate = est;
                    log.push(SearchStep {
                        batches: b,
                        sizes: sizes.clone(),
                        cost: estimate.total,
                    });
                    accepted = true;
                    break 'moves;
                }
            }
        }
        if !accepted {
            break;
        }
    }
    Ok(Some((config, estimate, log)))
}

/// Greedy search over a range of batch counts; the global best is the
/// cheapest locally optimal configuration (ties toward fewer batches).
pub fn greedy_search(
    primes: &[u64],
    map: &DacshundMap,
    opts: &SearchOptions,
) -> Result<SearchOutcome> {
    if primes.is_empty() {
        return Err(Error::Parameter("empty prime list".into()));
    }
    for &l in primes {
        if !map.contains(l) {
            return Err(Error::MissingPrime(l));
        }
    }
    let mut best: Option<(BatchConfig, CostEstimate)> = None;
    let mut log = Vec::new();
    let b_max = opts.batches_max.min(primes.len());
    for b in opts.batches_min.max(1)..=b_max {
        if let Some((cfg, est, steps)) =
            search_single_b(b, primes, map, opts.target_bits, &opts.model)?
        {
            log.extend(steps);
            let better = match &best {
                None => true,
                Some((_, b_est)) => est.total < b_est.total,
            };
            if better {
                best = Some((cfg, est));
            }
        }
    }
    match best {
        Some((config, estimate)) => {
            let keyspace = config.keyspace();
            Ok(SearchOutcome {
                config,
                estimate,
                keyspace,
                log,
            })
        }
        None => Err(Error::SearchFailure(format!(
            "no valid configuration for {} primes with {}..={} batches at {} bits",
            primes.len(),
            opts.batches_min,
            b_max,
            opts.target_bits
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dac::enumerate_dacs;

    fn map600() -> DacshundMap {
        enumerate_dacs(16, 600).unwrap()
    }

    fn toy_model() -> CostModel {
        CostModel {
            crossover: 1 << 20, // linear backend everywhere
            two_exponent: 2,
            g_bits: 2,
            npush: 2,
        }
    }

    #[test]
    fn phi_examples_and_brute_force() {
        for x in 0..6u64 {
            assert_eq!(phi(x, 0), BigUint::one());
        }
        assert_eq!(phi(1, 1), BigUint::from(3u32));
        assert_eq!(phi(2, 2), BigUint::from(13u32));
        // oracle: count vectors in Z^x with l1 norm <= y by enumeration
        fn count_vectors(dims: u64, budget: i64) -> u64 {
            if dims == 0 {
                return 1;
            }
            let mut acc = 0;
            for v in -budget..=budget {
                acc += count_vectors(dims - 1, budget - v.abs());
            }
            acc
        }
        for x in 0..=5u64 {
            for y in 0..=5u64 {
                assert_eq!(
                    phi(x, y),
                    BigUint::from(count_vectors(x, y as i64)),
                    "phi({x},{y})"
                );
            }
        }
    }

    #[test]
    fn psi_examples_and_brute_force() {
        assert_eq!(psi(7, 0), BigUint::one());
        assert_eq!(psi(4, 2), BigUint::from(24u32));
        assert_eq!(psi_dummy(2, 2), BigUint::from(9u32));
        // oracle: enumerate (subset, sign) pairs
        for n in 0..=12u64 {
            for m in 0..=n {
                let mut count = 0u64;
                for mask in 0u64..(1 << n) {
                    if mask.count_ones() as u64 == m {
                        count += 1u64 << m;
                    }
                }
                assert_eq!(psi(n, m), BigUint::from(count), "psi({n},{m})");
            }
        }
        // psi_dummy oracle: e in {-1,0,1}^n with at most m nonzero entries
        for n in 0..=8u64 {
            for m in 0..=n {
                let mut count = 0u64;
                for mask in 0u64..(1 << n) {
                    if (mask.count_ones() as u64) <= m {
                        count += 1u64 << mask.count_ones();
                    }
                }
                assert_eq!(psi_dummy(n, m), BigUint::from(count), "psi_dummy({n},{m})");
            }
        }
    }

    #[test]
    fn dacshund_validation_examples() {
        let map = map600();
        assert!(is_valid_dacshund(&[4], &[11, 13, 17, 19], &map).unwrap());
        let inter = batch_intersection(&[11, 13, 17, 19], &map).unwrap();
        assert_eq!(inter.into_iter().collect::<Vec<_>>(), vec![4]);
        assert!(!is_valid_dacshund(&[5], &[5, 11, 13, 17, 19], &map).unwrap());
        // singletons always valid
        assert!(is_valid_dacshund(&[1, 1, 1, 1], &[11, 13, 17, 19], &map).unwrap());
        // shape errors
        assert!(is_valid_dacshund(&[3], &[11, 13, 17, 19], &map).is_err());
        assert!(matches!(
            is_valid_dacshund(&[1], &[601], &map),
            Err(Error::MissingPrime(601))
        ));
    }

    #[test]
    fn initial_sizes_examples() {
        let map = map600();
        assert_eq!(
            find_initial_batch_sizes(4, &[11, 13, 17, 19], &map).unwrap(),
            Some(vec![1, 1, 1, 1])
        );
        assert_eq!(
            find_initial_batch_sizes(1, &[11, 13, 17, 19], &map).unwrap(),
            Some(vec![4])
        );
        assert_eq!(
            find_initial_batch_sizes(1, &[3, 11, 13, 17, 19], &map).unwrap(),
            None
        );
    }

    #[test]
    fn keyspace_size_bits() {
        let ks = KeyspaceSize::from_size(BigUint::from(24u32));
        assert_eq!(ks.bits, 4); // floor(log2 24)
        assert!(ks.meets_target(4));
        assert!(!ks.meets_target(5));
    }

    #[test]
    fn cost_estimate_structure() {
        let map = map600();
        let model = toy_model();
        // single batch of a single prime, M = 1: only the window cost plus
        // the constant prep (cofactor ladder + order-check DAC)
        let cfg = BatchConfig {
            primes: vec![11],
            sizes: vec![1],
            bounds: vec![1],
            dac_lens: vec![3],
        };
        let est = cost_estimate(&cfg, &map, &model).unwrap();
        let expect =
            model.m2_window(11, 11) + CostModel::ladder_cost(4) + CostModel::dacmul_cost(3);
        assert_eq!(est.total, expect);
        assert_eq!(est.total, est.per_batch.iter().sum::<u64>());
        assert_eq!(est.isogeny_count, 1);

        // doubling M doubles the batch contribution (window + prep per slot)
        let cfg2 = BatchConfig {
            primes: vec![11, 13, 17, 19],
            sizes: vec![4],
            bounds: vec![2],
            dac_lens: vec![4],
        };
        let est2 = cost_estimate(&cfg2, &map, &model).unwrap();
        let prep = model.slot_prep_cost(&cfg2.sizes, &cfg2.dac_lens, 0);
        let slot = |j: usize| {
            let (lo, hi) = cfg2.window(0, j);
            model.m2_window(lo, hi) + prep
        };
        assert_eq!(est2.total, slot(0) + slot(1));
    }

    #[test]
    fn invalid_configs_rejected() {
        let map = map600();
        let model = toy_model();
        let bad_len = BatchConfig {
            primes: vec![11, 13],
            sizes: vec![2],
            bounds: vec![1],
            dac_lens: vec![8], // 8 not admissible for 13
        };
        assert!(cost_estimate(&bad_len, &map, &model).is_err());
        let bad_window = BatchConfig {
            primes: vec![11, 13, 17, 19, 23],
            sizes: vec![5],
            bounds: vec![1],
            dac_lens: vec![4],
        };
        // 23 > 2*11 - 1
        assert!(bad_window.validate(&map).is_err());
    }

    #[test]
    fn greedy_toy_run() {
        let map = map600();
        let primes = [11u64, 13, 17, 19, 23, 29, 31, 37];
        let opts = SearchOptions {
            batches_min: 2,
            batches_max: 2,
            target_bits: 8,
            model: toy_model(),
        };
        let out = greedy_search(&primes, &map, &opts).unwrap();
        out.config.validate(&map).unwrap();
        assert!(out.keyspace.meets_target(8));
        // greedy never worsens: log non-increasing, final = best
        let costs: Vec<u64> = out.log.iter().map(|s| s.cost).collect();
        assert!(costs.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.estimate.total, *costs.last().unwrap());
        // dac_lens are minima of the intersections
        for i in 0..out.config.batch_count() {
            let inter = batch_intersection(out.config.batch_primes(i), &map).unwrap();
            assert_eq!(out.config.dac_lens[i], *inter.first().unwrap());
        }
    }

    #[test]
    fn greedy_intermediate_configs_valid() {
        let map = map600();
        let primes = [11u64, 13, 17, 19, 23, 29, 31, 37];
        let model = toy_model();
        let out = search_single_b(2, &primes, &map, 8, &model)
            .unwrap()
            .unwrap();
        for step in &out.2 {
            assert!(is_valid_dacshund(&step.sizes, &primes, &map).unwrap());
        }
    }

    #[test]
    fn excluding_three_is_never_worse() {
        // D_3 = {0} intersects nothing, so 3 always burns its own batch and
        // taxes every other slot's kernel preparation. With the target
        // comfortably under capacity (the regime the full-size parameter
        // sets live in), dropping 3 gives cost <= the including-3 run; at
        // small B the including-3 run fails outright.
        let map = map600();
        let with3 = [3u64, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43];
        let without3 = [11u64, 13, 17, 19, 23, 29, 31, 37, 41, 43];
        let opts = |bmin: usize, bmax: usize| SearchOptions {
            batches_min: bmin,
            batches_max: bmax,
            target_bits: 8,
            model: toy_model(),
        };
        // B = 2: {3} forces the other ten primes into one overwide batch
        assert!(matches!(
            greedy_search(&with3, &map, &opts(1, 2)),
            Err(Error::SearchFailure(_))
        ));
        assert!(greedy_search(&without3, &map, &opts(2, 2)).is_ok());
        // at workable B the exclusion is at least as cheap
        let without_cost = greedy_search(&without3, &map, &opts(2, 6))
            .unwrap()
            .estimate
            .total;
        let with_cost = greedy_search(&with3, &map, &opts(2, 6))
            .unwrap()
            .estimate
            .total;
        assert!(without_cost <= with_cost, "{without_cost} vs {with_cost}");
    }

    #[test]
    fn search_failure_is_an_error() {
        let map = map600();
        let opts = SearchOptions {
            batches_min: 1,
            batches_max: 1,
            target_bits: 1,
            model: toy_model(),
        };
        assert!(matches!(
            greedy_search(&[3, 11], &map, &opts),
            Err(Error::SearchFailure(_))
        ));
    }

    #[test]
    fn window_models_match_measured_counts_exactly() {
        use crate::field::{Field, FieldParams};
        use crate::isogeny::{matryoshka1414, matryoshka2, BatchRange, SqrtVeluParams};
        use crate::montgomery::{deterministic_point, ladder, xdbl, CurveCoeff};

        let model = toy_model();
        // linear window on primes {11, 13, 17, 19}
        let f = Field::new(FieldParams::new(2, 9, &[11, 13, 17, 19]).unwrap());
        let e = CurveCoeff::from_affine(&f, f.zero()).unwrap();
        let t_full = deterministic_point(&f, &e, 1).unwrap();
        let p2 = xdbl(&f, &t_full, &e);
        let push = [t_full.clone(), p2];
        let k = {
            let co = f.params().odd_order() / num_bigint::BigUint::from(13u64);
            ladder(&f, &co, &t_full, &e)
        };
        let range = BatchRange::new(11, 19, 13).unwrap();
        let (_, c) = f.scoped("m2", || matryoshka2(&f, &e, &k, &range, &push).unwrap());
        assert_eq!(c.fp_mults(), model.m2_window(11, 19), "m2 model drift");

        // sqrt window on primes {101, 103}
        let f = Field::new(FieldParams::new(2, 1, &[101, 103]).unwrap());
        let e = CurveCoeff::from_affine(&f, f.zero()).unwrap();
        let t_full = deterministic_point(&f, &e, 1).unwrap();
        let p2 = xdbl(&f, &t_full, &e);
        let push = [t_full.clone(), p2];
        let k = {
            let co = f.params().odd_order() / num_bigint::BigUint::from(101u64);
            ladder(&f, &co, &t_full, &e)
        };
        let params = SqrtVeluParams::for_degree(101);
        let range = BatchRange::new(101, 103, 101).unwrap();
        let (_, c) = f.scoped("m14", || {
            matryoshka1414(&f, &e, &k, &range, params, &push).unwrap()
        });
        assert_eq!(
            c.fp_mults(),
            model.m14_window(101, 103, params.bs as u64, params.gs as u64),
            "m14 model drift"
        );
    }

    #[test]
    fn bound_selection_minimizes_isogenies() {
        let model = toy_model();
        // N = (4): psi(4, M) = 8, 24, 32, 16 for M = 1..4
        let sizes = [4usize];
        let primes = [11u64, 13, 17, 19];
        assert_eq!(select_bounds(&sizes, &primes, 3, &model), Some(vec![1]));
        assert_eq!(select_bounds(&sizes, &primes, 4, &model), Some(vec![2]));
        assert_eq!(select_bounds(&sizes, &primes, 6, &model), None); // max 32 < 64
    }
}
