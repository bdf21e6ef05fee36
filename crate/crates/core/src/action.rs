//! Deterministic, dummy-free group-action evaluation over WOMBat key spaces.
//!
//! A [`ParameterSet`] fixes everything public: the field shape, the batch
//! configuration, the Vélu/√élu crossover and per-batch box parameters. A
//! [`WombatKey`] chooses, per batch, `M` distinct degrees with signs. The
//! evaluator walks the batches in fixed public order; sub-batch slot `j`
//! consumes the key's `j`-th smallest chosen degree through a Matryoshka
//! window `[l_j, l_{N-M+j}]`, so the sequence of counted field operations is
//! the same for every key — the desk-scale constant-time/dummy-free contract.
//!
//! Kernel construction is deliberately simple: for every slot the chosen
//! point is multiplied by the full cofactor `2^f * g` and by the DACs of all
//! other parameter-set primes (each batch contributing chains of its common
//! DACsHUND length), then order-checked by the chosen prime's own DAC before
//! the isogeny. Re-clearing costs more than an optimal strategy but keeps the
//! trace analysis auditable.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::batching::{binomial, psi, BatchConfig, CostModel, KeyspaceSize};
use crate::dac::{dac_mul, enumerate_dacs, Dac};
use crate::field::{Fe, Field, FieldParams};
use crate::isogeny::{matryoshka1414, matryoshka2, BatchRange, SqrtVeluParams};
use crate::montgomery::{deterministic_point, ladder, CurveCoeff};
use crate::{Error, Result};

/// Everything public an evaluation needs.
#[derive(Clone, Debug)]
pub struct ParameterSet {
    pub name: String,
    pub field: Arc<FieldParams>,
    pub config: BatchConfig,
    /// Batches whose smallest prime is at least this use Matryoshka 1.414.
    pub crossover: u64,
    /// Per-batch √élu box parameters, tuned to each batch's smallest prime.
    pub sqrt_params: Vec<SqrtVeluParams>,
    /// Per-prime DAC representatives at the owning batch's common length.
    dacs: Vec<Dac>,
}

impl ParameterSet {
    /// Assembles and validates a parameter set, regenerating the DAC map to
    /// pick the representatives.
    pub fn assemble(
        name: String,
        field: Arc<FieldParams>,
        config: BatchConfig,
        crossover: u64,
        sqrt_params: Vec<SqrtVeluParams>,
    ) -> Result<Self> {
        if field.primes != config.primes {
            return Err(Error::Parameter(
                "configuration primes do not match the field torsion primes".into(),
            ));
        }
        if sqrt_params.len() != config.batch_count() {
            return Err(Error::Parameter(
                "one sqrt parameter pair required per batch".into(),
            ));
        }
        let max_len = *config.dac_lens.iter().max().unwrap_or(&0);
        let max_prime = *config.primes.last().unwrap();
        let map = enumerate_dacs(max_len, max_prime)?;
        config.validate(&map)?;
        let mut dacs = Vec::with_capacity(config.primes.len());
        for i in 0..config.batch_count() {
            let len = config.dac_lens[i];
            for &l in config.batch_primes(i) {
                let dac = map.representative(l, len).ok_or_else(|| {
                    Error::InvalidConfig(format!("no length-{len} chain for prime {l}"))
                })?;
                dacs.push(dac);
            }
        }
        for (i, sp) in sqrt_params.iter().enumerate() {
            let lo = config.batch_primes(i)[0];
            if lo >= crossover {
                sp.validate_for(lo)?;
            }
        }
        Ok(ParameterSet {
            name,
            field,
            config,
            crossover,
            sqrt_params,
            dacs,
        })
    }

    /// The DAC used for prime index `idx` (position in the full prime list).
    pub fn dac_for(&self, idx: usize) -> &Dac {
        &self.dacs[idx]
    }

    pub fn keyspace(&self) -> KeyspaceSize {
        self.config.keyspace()
    }

    /// The cost model matching this parameter set (two pushed points).
    pub fn model(&self) -> CostModel {
        CostModel {
            crossover: self.crossover,
            two_exponent: self.field.f,
            g_bits: self.field.g.bits().max(1),
            npush: 2,
        }
    }

    /// Public-key wire width in bytes: `ceil(bits(p) / 8)`.
    pub fn wire_len(&self) -> usize {
        self.field.bits().div_ceil(8) as usize
    }

    // ---- persistence ------------------------------------------------------

    /// Structured text form with a trailing checksum line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("name: {}\n", self.name));
        s.push_str(&format!("field.p: {:#x}\n", self.field.p));
        s.push_str(&format!("field.f: {}\n", self.field.f));
        s.push_str(&format!("field.g: {}\n", self.field.g));
        let primes: Vec<String> = self.field.primes.iter().map(|l| l.to_string()).collect();
        s.push_str(&format!("field.primes: {}\n", primes.join(" ")));
        s.push_str(&format!("crossover: {}\n", self.crossover));
        for i in 0..self.config.batch_count() {
            let ps: Vec<String> = self
                .config
                .batch_primes(i)
                .iter()
                .map(|l| l.to_string())
                .collect();
            s.push_str(&format!("batch.{i}.primes: {}\n", ps.join(" ")));
            s.push_str(&format!("batch.{i}.m: {}\n", self.config.bounds[i]));
            s.push_str(&format!(
                "batch.{i}.dac_len: {}\n",
                self.config.dac_lens[i]
            ));
            s.push_str(&format!("batch.{i}.bs: {}\n", self.sqrt_params[i].bs));
            s.push_str(&format!("batch.{i}.gs: {}\n", self.sqrt_params[i].gs));
        }
        let sum = hex(&Sha256::digest(s.as_bytes()));
        s.push_str(&format!("checksum: {sum}\n"));
        s
    }

    /// Parses and fully re-validates a parameter-set file; the checksum line
    /// guards against edits that would break validity silently.
    pub fn from_text(text: &str) -> Result<Self> {
        let (body, checksum) = split_checksum(text)?;
        let expect = hex(&Sha256::digest(body.as_bytes()));
        if checksum != expect {
            return Err(Error::Format("parameter file checksum mismatch".into()));
        }
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for line in body.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("bad line {line:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| -> Result<&String> {
            kv.get(k)
                .ok_or_else(|| Error::Format(format!("missing key {k}")))
        };
        let name = get("name")?.clone();
        let p_hex = get("field.p")?;
        let p = BigUint::parse_bytes(p_hex.trim_start_matches("0x").as_bytes(), 16)
            .ok_or_else(|| Error::Format("bad field.p".into()))?;
        let f: u32 = get("field.f")?
            .parse()
            .map_err(|_| Error::Format("bad field.f".into()))?;
        let g = BigUint::parse_bytes(get("field.g")?.as_bytes(), 10)
            .ok_or_else(|| Error::Format("bad field.g".into()))?;
        let primes = parse_u64_list(get("field.primes")?)?;
        let field = FieldParams::from_parts(p, f, g, primes.clone())?;
        let crossover: u64 = get("crossover")?
            .parse()
            .map_err(|_| Error::Format("bad crossover".into()))?;
        let mut sizes = Vec::new();
        let mut bounds = Vec::new();
        let mut dac_lens = Vec::new();
        let mut sqrt_params = Vec::new();
        let mut all = Vec::new();
        for i in 0.. {
            let Some(ps) = kv.get(&format!("batch.{i}.primes")) else {
                break;
            };
            let ps = parse_u64_list(ps)?;
            sizes.push(ps.len());
            all.extend_from_slice(&ps);
            let m: usize = get(&format!("batch.{i}.m"))?
                .parse()
                .map_err(|_| Error::Format("bad batch m".into()))?;
            bounds.push(m);
            let len: u32 = get(&format!("batch.{i}.dac_len"))?
                .parse()
                .map_err(|_| Error::Format("bad batch dac_len".into()))?;
            dac_lens.push(len);
            let bs: usize = get(&format!("batch.{i}.bs"))?
                .parse()
                .map_err(|_| Error::Format("bad batch bs".into()))?;
            let gs: usize = get(&format!("batch.{i}.gs"))?
                .parse()
                .map_err(|_| Error::Format("bad batch gs".into()))?;
            sqrt_params.push(SqrtVeluParams { bs, gs });
        }
        if all != primes {
            return Err(Error::Format(
                "batch prime lists do not partition field.primes".into(),
            ));
        }
        let config = BatchConfig {
            primes,
            sizes,
            bounds,
            dac_lens,
        };
        ParameterSet::assemble(name, field, config, crossover, sqrt_params)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn split_checksum(text: &str) -> Result<(String, String)> {
    let idx = text
        .rfind("checksum: ")
        .ok_or_else(|| Error::Format("missing checksum line".into()))?;
    let body = &text[..idx];
    let sum = text[idx + "checksum: ".len()..].trim().to_string();
    Ok((body.to_string(), sum))
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<u64>()
                .map_err(|_| Error::Format(format!("bad integer {t:?}")))
        })
        .collect()
}

/// Derives the Vélu/√élu crossover from the exact window cost models: the
/// smallest candidate degree whose tuned √élu window beats the linear one.
pub fn derive_crossover(candidates: &[u64], npush: u64) -> u64 {
    let model = CostModel {
        crossover: 0,
        two_exponent: 2,
        g_bits: 1,
        npush,
    };
    for &l in candidates {
        let p = SqrtVeluParams::for_degree(l);
        if model.m14_window(l, l, p.bs as u64, p.gs as u64) < model.m2_window(l, l) {
            return l;
        }
    }
    u64::MAX
}

/// Searches the smallest odd cofactor `g <= g_max` making
/// `p = 2^f * g * prod(primes) - 1` prime: the field-shape primality search.
pub fn find_field(f: u32, g_max: u64, primes: &[u64]) -> Result<Arc<FieldParams>> {
    let mut g = 1u64;
    while g <= g_max {
        if let Ok(params) = FieldParams::new(f, g, primes) {
            return Ok(params);
        }
        g += 2;
    }
    Err(Error::PointSearchFailure(format!(
        "no prime p = 2^{f} * g * prod - 1 with odd g <= {g_max}"
    )))
}

/// Packages a batch configuration into a full parameter set: finds the field
/// by the primality search, tunes per-batch box parameters, and derives the
/// crossover from the cost models unless one is forced.
pub fn build_parameter_set(
    name: &str,
    config: BatchConfig,
    f: u32,
    g_max: u64,
    forced_crossover: Option<u64>,
) -> Result<ParameterSet> {
    let field = find_field(f, g_max, &config.primes)?;
    let crossover = forced_crossover.unwrap_or_else(|| derive_crossover(&config.primes, 2));
    let sqrt_params: Vec<SqrtVeluParams> = (0..config.batch_count())
        .map(|i| SqrtVeluParams::for_degree(config.batch_primes(i)[0]))
        .collect();
    ParameterSet::assemble(name.to_string(), field, config, crossover, sqrt_params)
}

// ---- keys ----------------------------------------------------------------------

/// A WOMBat key: per batch, `M` distinct degree indices (ascending) with a
/// sign each. The `j`-th smallest chosen index always lies in
/// `[j, N - M + j]`, so slot `j`'s Matryoshka window covers it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WombatKey {
    /// Per batch: ascending `(index within batch, sign)` with sign in
    /// `{-1, +1}`.
    pub choices: Vec<Vec<(usize, i8)>>,
}

impl WombatKey {
    /// Shape and feasibility validation against a configuration.
    pub fn validate(&self, config: &BatchConfig) -> Result<()> {
        if self.choices.len() != config.batch_count() {
            return Err(Error::Parameter("key batch count mismatch".into()));
        }
        for (i, ch) in self.choices.iter().enumerate() {
            let (n, m) = (config.sizes[i], config.bounds[i]);
            if ch.len() != m {
                return Err(Error::Parameter(format!(
                    "batch {i}: key selects {} degrees, bound is {m}",
                    ch.len()
                )));
            }
            for (j, &(idx, sign)) in ch.iter().enumerate() {
                if idx >= n || (sign != 1 && sign != -1) {
                    return Err(Error::Parameter(format!("batch {i}: bad choice")));
                }
                if j > 0 && ch[j - 1].0 >= idx {
                    return Err(Error::Parameter(format!(
                        "batch {i}: indices must be strictly ascending"
                    )));
                }
                // sub-batch feasibility: j <= idx <= n - m + j
                if idx < j || idx > n - m + j {
                    return Err(Error::Parameter(format!(
                        "batch {i}: index {idx} outside sub-batch window {j}..={}",
                        n - m + j
                    )));
                }
            }
        }
        Ok(())
    }

    /// All-signs-flipped key (the group inverse).
    pub fn inverse(&self) -> WombatKey {
        WombatKey {
            choices: self
                .choices
                .iter()
                .map(|ch| ch.iter().map(|&(i, s)| (i, -s)).collect())
                .collect(),
        }
    }

    /// Rank within the key space (mixed radix over batches; within a batch,
    /// combination rank times `2^M` plus the sign bits).
    pub fn rank(&self, config: &BatchConfig) -> BigUint {
        let mut r = BigUint::zero();
        for i in (0..config.batch_count()).rev() {
            let (n, m) = (config.sizes[i] as u64, config.bounds[i] as u64);
            let indices: Vec<usize> = self.choices[i].iter().map(|&(idx, _)| idx).collect();
            let crank = rank_combination(n as usize, &indices);
            let mut signs = BigUint::zero();
            for (j, &(_, sign)) in self.choices[i].iter().enumerate() {
                if sign < 0 {
                    signs.set_bit(j as u64, true);
                }
            }
            let inner = BigUint::from(crank) * (BigUint::one() << m) + signs;
            r = r * psi(n, m) + inner;
        }
        r
    }

    /// Inverse of [`rank`](WombatKey::rank); a bijection onto the key space.
    pub fn unrank(mut r: BigUint, config: &BatchConfig) -> WombatKey {
        let mut choices = Vec::with_capacity(config.batch_count());
        for i in 0..config.batch_count() {
            let (n, m) = (config.sizes[i] as u64, config.bounds[i] as u64);
            let space = psi(n, m);
            let inner = &r % &space;
            r /= &space;
            let signs = &inner % (BigUint::one() << m);
            let crank: u64 = (&inner >> m)
                .try_into()
                .expect("combination rank fits in u64 at desk scale");
            let indices = unrank_combination(n as usize, m as usize, crank);
            let ch: Vec<(usize, i8)> = indices
                .into_iter()
                .enumerate()
                .map(|(j, idx)| (idx, if signs.bit(j as u64) { -1 } else { 1 }))
                .collect();
            choices.push(ch);
        }
        WombatKey { choices }
    }

    /// Readable text form, one line per batch with signed primes.
    pub fn to_text(&self, params: &ParameterSet) -> String {
        let mut s = format!("params: {}\n", params.name);
        for (i, ch) in self.choices.iter().enumerate() {
            let ps = params.config.batch_primes(i);
            let items: Vec<String> = ch
                .iter()
                .map(|&(idx, sign)| {
                    format!("{}{}", if sign > 0 { "+" } else { "-" }, ps[idx])
                })
                .collect();
            s.push_str(&format!("batch {i}: {}\n", items.join(" ")));
        }
        s
    }

    pub fn from_text(text: &str, params: &ParameterSet) -> Result<WombatKey> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let head = lines
            .next()
            .ok_or_else(|| Error::Format("empty key".into()))?;
        let name = head
            .strip_prefix("params: ")
            .ok_or_else(|| Error::Format("missing params header".into()))?;
        if name.trim() != params.name {
            return Err(Error::Format(format!(
                "key built for parameter set {:?}, not {:?}",
                name.trim(),
                params.name
            )));
        }
        let mut choices = vec![Vec::new(); params.config.batch_count()];
        for line in lines {
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("bad key line {line:?}")))?;
            let i: usize = head
                .trim()
                .strip_prefix("batch ")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad batch header {head:?}")))?;
            if i >= choices.len() {
                return Err(Error::Format(format!("batch {i} out of range")));
            }
            let ps = params.config.batch_primes(i);
            for item in rest.split_whitespace() {
                let (sign, lstr) = match item.as_bytes()[0] {
                    b'+' => (1i8, &item[1..]),
                    b'-' => (-1i8, &item[1..]),
                    _ => return Err(Error::Format(format!("missing sign in {item:?}"))),
                };
                let l: u64 = lstr
                    .parse()
                    .map_err(|_| Error::Format(format!("bad prime {item:?}")))?;
                let idx = ps
                    .iter()
                    .position(|&q| q == l)
                    .ok_or_else(|| Error::Format(format!("prime {l} not in batch {i}")))?;
                choices[i].push((idx, sign));
            }
        }
        let key = WombatKey { choices };
        key.validate(&params.config)?;
        Ok(key)
    }
}

fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut combo = Vec::with_capacity(k);
    let mut c = 0usize;
    for i in 0..k {
        loop {
            let count: u64 = binomial((n - c - 1) as u64, (k - i - 1) as u64)
                .try_into()
                .expect("desk-scale binomial");
            if count <= rank {
                rank -= count;
                c += 1;
            } else {
                combo.push(c);
                c += 1;
                break;
            }
        }
    }
    combo
}

fn rank_combination(n: usize, indices: &[usize]) -> u64 {
    let k = indices.len();
    let mut rank = 0u64;
    for (i, &c) in indices.iter().enumerate() {
        let start = if i == 0 { 0 } else { indices[i - 1] + 1 };
        for j in start..c {
            let count: u64 = binomial((n - j - 1) as u64, (k - i - 1) as u64)
                .try_into()
                .expect("desk-scale binomial");
            rank += count;
        }
    }
    rank
}

/// Deterministic key generation: expand the seed with SHA-256 in counter
/// mode to 128 bits beyond the key-space size, reduce, and unrank. The
/// reduction bias is negligible at that slack and irrelevant to the
/// rank/unrank bijection.
pub fn keygen(seed: &[u8], params: &ParameterSet) -> Result<WombatKey> {
    if seed.is_empty() {
        return Err(Error::Parameter("empty keygen seed".into()));
    }
    let space = params.keyspace().size;
    let need_bytes = (space.bits() as usize).div_ceil(8) + 16;
    let mut stream = Vec::with_capacity(need_bytes + 32);
    let mut ctr = 0u32;
    while stream.len() < need_bytes {
        let mut h = Sha256::new();
        h.update(seed);
        h.update(ctr.to_be_bytes());
        stream.extend_from_slice(&h.finalize());
        ctr += 1;
    }
    stream.truncate(need_bytes);
    let r = BigUint::from_bytes_be(&stream) % &space;
    let key = WombatKey::unrank(r, &params.config);
    key.validate(&params.config)?;
    Ok(key)
}

// ---- wire format ------------------------------------------------------------

/// Fixed-width big-endian encoding of an affine coefficient.
pub fn wire_encode(params: &ParameterSet, a: &Fe) -> Vec<u8> {
    let mut bytes = a.value().to_bytes_be();
    let want = params.wire_len();
    while bytes.len() < want {
        bytes.insert(0, 0);
    }
    bytes
}

pub fn wire_decode(params: &ParameterSet, bytes: &[u8]) -> Result<BigUint> {
    if bytes.len() != params.wire_len() {
        return Err(Error::Format(format!(
            "public key must be {} bytes, got {}",
            params.wire_len(),
            bytes.len()
        )));
    }
    let v = BigUint::from_bytes_be(bytes);
    if v >= params.field.p {
        return Err(Error::Format("coefficient not reduced mod p".into()));
    }
    Ok(v)
}

// ---- evaluation ---------------------------------------------------------------

/// Validates a public curve coefficient: not `±2`, and carrying a point of
/// full odd order on the curve side whose order divides `p + 1` — which
/// pins the group order to `p + 1` (the odd part is far larger than the
/// Hasse interval width for every field this crate builds), hence
/// supersingularity.
pub fn validate_public_curve(field: &Field, a: &Fe, params: &ParameterSet) -> bool {
    debug_assert_eq!(field.params().p, params.field.p);
    let e = match CurveCoeff::from_affine(field, a.clone()) {
        Ok(e) => e,
        Err(_) => return false,
    };
    let t = match deterministic_point(field, &e, 1) {
        Ok(t) => t,
        Err(_) => return false,
    };
    // deterministic_point guarantees every prime component is present;
    // annihilation by the odd part then pins ord(t) = prod(primes)
    ladder(field, &field.params().odd_order(), &t, &e).is_infinity()
}

/// Applies the key to a public curve, returning the affine coefficient of
/// the image. The operation trace depends only on the parameter set, never
/// on the key.
pub fn group_action(
    field: &Field,
    start: &Fe,
    key: &WombatKey,
    params: &ParameterSet,
) -> Result<Fe> {
    key.validate(&params.config)?;
    if field.params().p != params.field.p {
        return Err(Error::Parameter(
            "field does not match parameter set".into(),
        ));
    }
    let config = &params.config;
    let mut curve = CurveCoeff::from_affine(field, start.clone())?;
    let cof = params.field.cofactor();

    // both direction points derived once and pushed through every isogeny
    let (points, _) = field.scoped("derive_points", || -> Result<_> {
        let plus = deterministic_point(field, &curve, 1)?;
        let minus = deterministic_point(field, &curve, -1)?;
        Ok((plus, minus))
    });
    let (mut t_plus, mut t_minus) = points?;

    for i in 0..config.batch_count() {
        let batch_lo = config.batch_primes(i)[0];
        let use_sqrt = batch_lo >= params.crossover;
        for j in 0..config.bounds[i] {
            let (idx_in_batch, sign) = key.choices[i][j];
            let prime_base: usize = config.sizes[..i].iter().sum();
            let idx = prime_base + idx_in_batch;
            let ell = config.primes[idx];
            let (lo, hi) = config.window(i, j);
            let range = BatchRange::new(lo, hi, ell)?;

            // kernel: clear 2^f * g, then every other prime's DAC
            let src = if sign > 0 { &t_plus } else { &t_minus };
            let (k, _) = field.scoped("kernel_prep", || {
                let mut k = ladder(field, &cof, src, &curve);
                for pidx in 0..config.primes.len() {
                    if pidx == idx {
                        continue;
                    }
                    k = dac_mul(field, &k, params.dac_for(pidx), &curve);
                }
                k
            });
            if k.is_infinity() {
                return Err(Error::EvaluationIntegrity(format!(
                    "kernel for degree {ell} vanished (missing torsion component)"
                )));
            }
            let (order_ok, _) = field.scoped("order_check", || {
                dac_mul(field, &k, params.dac_for(idx), &curve).is_infinity()
            });
            if !order_ok {
                return Err(Error::EvaluationIntegrity(format!(
                    "kernel point does not have order {ell}"
                )));
            }

            let push = [t_plus.clone(), t_minus.clone()];
            let (result, _) = field.scoped("isogeny", || {
                if use_sqrt {
                    matryoshka1414(field, &curve, &k, &range, params.sqrt_params[i], &push)
                } else {
                    matryoshka2(field, &curve, &k, &range, &push)
                }
            });
            let (new_curve, images) = result.map_err(|e| match e {
                Error::KernelOrder(m) => Error::EvaluationIntegrity(m),
                other => other,
            })?;
            curve = new_curve;
            let mut images = images.into_iter();
            t_plus = images.next().expect("two images");
            t_minus = images.next().expect("two images");
        }
    }

    let (affine, _) = field.scoped("final_inversion", || curve.to_affine(field));
    affine
}

/// Validates the peer's public curve and returns the shared-secret encoding
/// (the fixed-width affine coefficient of the image curve).
pub fn derive_shared(
    field: &Field,
    peer: &Fe,
    key: &WombatKey,
    params: &ParameterSet,
) -> Result<Vec<u8>> {
    if !validate_public_curve(field, peer, params) {
        return Err(Error::InvalidPublicKey(
            "peer coefficient is not a valid supersingular curve".into(),
        ));
    }
    let shared = group_action(field, peer, key, params)?;
    Ok(wire_encode(params, &shared))
}
