//! Compressed continued-fraction differential addition chains.
//!
//! A chain is encoded by a bitstring `f_3 ... f_r` driving the triple
//! recurrence from `(1, 2, 3)`:
//!
//! ```text
//! bit 0: (a, b, c) -> (b, c, c + b)        difference c - b = a
//! bit 1: (a, b, c) -> (a, c, c + a)        difference c - a = b
//! ```
//!
//! The empty string decodes to 3, and `length = r - 2` is the number of
//! compressed bits, so multiplication by a chain costs exactly one `xDBL`
//! plus `length + 1` `xADD`s regardless of the bit values. Exhaustive
//! enumeration of all bitstrings up to a length bound yields, per prime, the
//! set of admissible lengths with one representative each — the map the
//! batching layer builds DACsHUND configurations from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::field::{is_prime_u64, Field};
use crate::montgomery::{xadd, xdbl, CurveCoeff, ProjPoint};
use crate::{Error, Result};

/// Tractability guard for exhaustive enumeration.
pub const MAX_ENUM_LEN: u32 = 24;

/// Applies the triple recurrence and returns the reached target.
pub fn decode(bits: &[bool]) -> u64 {
    let (mut a, mut b, mut c) = (1u64, 2u64, 3u64);
    for &bit in bits {
        if bit {
            (a, b, c) = (a, c, c + a);
        } else {
            (a, b, c) = (b, c, c + b);
        }
    }
    c
}

/// A compressed chain together with the integer it reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dac {
    bits: Vec<bool>,
    target: u64,
}

impl Dac {
    pub fn new(bits: Vec<bool>) -> Self {
        let target = decode(&bits);
        Dac { bits, target }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of compressed bits (`r - 2`).
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    /// Parses an ASCII `0`/`1` string, most significant (`f_3`) first.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::Format(format!("bad DAC bit {ch:?}"))),
            }
        }
        Ok(Dac::new(bits))
    }
}

impl fmt::Display for Dac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// `x([target]P)` driven by the compressed chain.
///
/// Cost: exactly 1 `xDBL` + `(1 + length)` `xADD`, independent of the bit
/// values and the point, so every chain of a given length has the same trace.
pub fn dac_mul(field: &Field, p: &ProjPoint, dac: &Dac, e: &CurveCoeff) -> ProjPoint {
    // (x0, x1, x2) = x([a]P), x([b]P), x([c]P) for the running triple.
    let mut x0 = p.clone();
    let mut x1 = xdbl(field, p, e);
    let mut x2 = xadd(field, &x1, &x0, &x0);
    for &bit in &dac.bits {
        if bit {
            // c' = c + a, difference b
            let s = xadd(field, &x2, &x0, &x1);
            x1 = x2;
            x2 = s;
        } else {
            // c' = c + b, difference a
            let s = xadd(field, &x2, &x1, &x0);
            x0 = x1;
            x1 = x2;
            x2 = s;
        }
    }
    x2
}

/// Per-prime admissible DAC lengths with one representative bitstring each
/// (the lexicographically smallest of that length).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DacshundMap {
    entries: BTreeMap<u64, BTreeMap<u32, Vec<bool>>>,
}

impl DacshundMap {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.keys().copied()
    }

    pub fn contains(&self, l: u64) -> bool {
        self.entries.contains_key(&l)
    }

    /// Admissible lengths for a prime.
    pub fn lengths(&self, l: u64) -> Result<BTreeSet<u32>> {
        self.entries
            .get(&l)
            .map(|m| m.keys().copied().collect())
            .ok_or(Error::MissingPrime(l))
    }

    /// The recorded representative of a given length.
    pub fn representative(&self, l: u64, len: u32) -> Option<Dac> {
        self.entries
            .get(&l)
            .and_then(|m| m.get(&len))
            .map(|bits| Dac::new(bits.clone()))
    }

    /// The minimum-length representative for a prime.
    pub fn shortest(&self, l: u64) -> Result<Dac> {
        let lens = self.entries.get(&l).ok_or(Error::MissingPrime(l))?;
        let (_, bits) = lens.iter().next().expect("map entries are never empty");
        Ok(Dac::new(bits.clone()))
    }

    /// All `(length, representative)` pairs for a prime.
    pub fn entries_for(&self, l: u64) -> Result<Vec<(u32, Dac)>> {
        let lens = self.entries.get(&l).ok_or(Error::MissingPrime(l))?;
        Ok(lens
            .iter()
            .map(|(&len, bits)| (len, Dac::new(bits.clone())))
            .collect())
    }

    /// Line-oriented text form: `prime: len=bits len=bits ...`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, lens) in &self.entries {
            out.push_str(&l.to_string());
            out.push(':');
            for (len, bits) in lens {
                out.push(' ');
                out.push_str(&len.to_string());
                out.push('=');
                for &b in bits {
                    out.push(if b { '1' } else { '0' });
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<u64, BTreeMap<u32, Vec<bool>>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("line {}: missing ':'", lineno + 1)))?;
            let l: u64 = head
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("line {}: bad prime", lineno + 1)))?;
            let mut lens = BTreeMap::new();
            for item in rest.split_whitespace() {
                let (len_s, bits_s) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Format(format!("line {}: missing '='", lineno + 1)))?;
                let len: u32 = len_s
                    .parse()
                    .map_err(|_| Error::Format(format!("line {}: bad length", lineno + 1)))?;
                let dac = Dac::parse(bits_s)?;
                if dac.len() as u32 != len {
                    return Err(Error::Format(format!(
                        "line {}: length {} does not match bitstring",
                        lineno + 1,
                        len
                    )));
                }
                if dac.target() != l {
                    return Err(Error::Format(format!(
                        "line {}: bits decode to {}, not {}",
                        lineno + 1,
                        dac.target(),
                        l
                    )));
                }
                lens.insert(len, dac.bits);
            }
            if lens.is_empty() {
                return Err(Error::Format(format!("line {}: empty entry", lineno + 1)));
            }
            entries.insert(l, lens);
        }
        Ok(DacshundMap { entries })
    }

    fn record(&mut self, target: u64, len: u32, bits: &[bool]) {
        self.entries
            .entry(target)
            .or_default()
            .entry(len)
            .or_insert_with(|| bits.to_vec());
    }
}

/// Exhaustively visits every compressed bitstring of length `0..=max_len`
/// and records, for each prime target `<= max_target`, every length that
/// occurs, keeping the lexicographically smallest bitstring per length.
///
/// Targets only grow along a chain, so subtrees past `max_target` are pruned;
/// composite targets are skipped (only prime degrees are consumed downstream).
pub fn enumerate_dacs(max_len: u32, max_target: u64) -> Result<DacshundMap> {
    if max_len > MAX_ENUM_LEN {
        return Err(Error::Parameter(format!(
            "max_len {max_len} exceeds enumeration guard {MAX_ENUM_LEN}"
        )));
    }
    // Depth-first, 0-branch before 1-branch: within each length the first
    // bitstring reaching a target is the lexicographically smallest.
    fn walk(
        a: u64,
        b: u64,
        c: u64,
        bits: &mut Vec<bool>,
        max_len: u32,
        max_target: u64,
        map: &mut DacshundMap,
    ) {
        if c > max_target {
            return;
        }
        if is_prime_u64(c) {
            map.record(c, bits.len() as u32, bits);
        }
        if (bits.len() as u32) == max_len {
            return;
        }
        bits.push(false);
        walk(b, c, c + b, bits, max_len, max_target, map);
        bits.pop();
        bits.push(true);
        walk(a, c, c + a, bits, max_len, max_target, map);
        bits.pop();
    }
    let mut map = DacshundMap::default();
    let mut bits = Vec::with_capacity(max_len as usize);
    walk(1, 2, 3, &mut bits, max_len, max_target, &mut map);
    Ok(map)
}
