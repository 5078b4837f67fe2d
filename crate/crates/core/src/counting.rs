//! Exact counts of planar tanglegrams by size and by size of the irreducible
//! core, from the numbers of irreducible ones.
//!
//! With `t_n` planar tanglegrams of size `n` and `h_k` irreducible ones of
//! size `k` (`h_2 = 1`), the generating functions satisfy
//! `T(x) = H(T(x)) + T(x²)/2 + x` where `H` carries `x²/2` for size two. Its
//! `x^n` coefficient only involves `t_m` for `m < n`, which gives a
//! recursion. Refining by core size, `t_{n,k} = h_k · [x^n] T(x)^k` for
//! `k ≥ 3` and `t_{n,2} = ([x^n] T(x)² + [n even] t_{n/2}) / 2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::polygon::{count_disjoint_pairs, MAX_POLYGON};
use crate::tanglegram::{census_by_core_size, TanglegramError};

/// Default largest size whose irreducible count is computed directly.
pub const DEFAULT_H_CAP: usize = 11;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("size {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("no irreducible count available for size {0}")]
    MissingH(usize),
    #[error("({n}, {k}) is outside the table")]
    OutOfRange { n: usize, k: usize },
    #[error("{0} is not an exact division")]
    DivisibilityViolation(String),
    #[error("cache file is corrupt: {0}")]
    CorruptCache(String),
    #[error("cache file was written by a different tool version or parameters")]
    StaleCache,
    #[error("imported table disagrees with computed h_{n}: {imported} vs {computed}")]
    ImportMismatch { n: usize, imported: BigUint, computed: BigUint },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Tanglegram(#[from] TanglegramError),
}

pub type Result<T, E = CountError> = std::result::Result<T, E>;

/// `h_2..=h_max_n`, indexed by size; entries below 2 are zero.
pub fn compute_h(max_n: usize) -> Result<Vec<BigUint>> {
    compute_h_with_cap(max_n, DEFAULT_H_CAP)
}

/// For `k ≥ 3` the irreducible planar tanglegrams of size `k` have two
/// layouts each, and the layouts are in bijection with the disjoint pairs of
/// the `(k + 1)`-gon.
pub fn compute_h_with_cap(max_n: usize, cap: usize) -> Result<Vec<BigUint>> {
    let cap = cap.min(MAX_POLYGON - 1);
    if max_n > cap {
        return Err(CountError::CapExceeded { n: max_n, cap });
    }
    let mut h = vec![BigUint::zero(); max_n + 1];
    if max_n >= 2 {
        h[2] = BigUint::one();
    }
    for (k, slot) in h.iter_mut().enumerate().skip(3) {
        let pairs = count_disjoint_pairs(k + 1).expect("size within polygon range");
        *slot = BigUint::from(pairs / 2);
    }
    Ok(h)
}

/// Exact count tables through `max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    max_n: usize,
    h: Vec<BigUint>,
    t: Vec<BigUint>,
    /// `conv[j][m] = [x^m] T(x)^j`.
    conv: Vec<Vec<BigUint>>,
    /// `t_nk[n][k]`, zero unless `2 ≤ k ≤ n`.
    t_nk: Vec<Vec<BigUint>>,
}

fn halve(value: BigUint, what: impl FnOnce() -> String) -> Result<BigUint> {
    let (q, r) = value.div_rem(&BigUint::from(2u8));
    if !r.is_zero() {
        return Err(CountError::DivisibilityViolation(what()));
    }
    Ok(q)
}

impl CountTable {
    /// Computes everything through `max_n`, including the irreducible counts.
    pub fn compute(max_n: usize) -> Result<Self> {
        Self::from_h(compute_h(max_n)?)
    }

    /// Builds the tables from `h[0..=max_n]` (entries below 2 ignored).
    pub fn from_h(h: Vec<BigUint>) -> Result<Self> {
        let max_n = h.len().saturating_sub(1).max(1);
        let mut h = h;
        h.resize(max_n + 1, BigUint::zero());
        let size = max_n + 1;
        let mut t = vec![BigUint::zero(); size];
        let mut conv = vec![vec![BigUint::zero(); size]; size];
        conv[0][0] = BigUint::one();
        t[1] = BigUint::one();
        conv[1][1] = BigUint::one();
        let mut t_nk = vec![vec![BigUint::zero(); size]; size];
        for n in 2..=max_n {
            if n >= 3 && h[n].is_zero() {
                return Err(CountError::MissingH(n));
            }
            for j in 2..=n {
                let mut acc = BigUint::zero();
                for m in 1..=n - (j - 1) {
                    acc += &t[m] * &conv[j - 1][n - m];
                }
                conv[j][n] = acc;
            }
            let mut two_k2 = conv[2][n].clone();
            if n % 2 == 0 {
                two_k2 += &t[n / 2];
            }
            t_nk[n][2] = halve(two_k2, || format!("t_{{{n},2}}"))?;
            for k in 3..=n {
                t_nk[n][k] = &h[k] * &conv[k][n];
            }
            t[n] = t_nk[n].iter().sum();
            conv[1][n] = t[n].clone();
        }
        Ok(CountTable { max_n, h, t, conv, t_nk })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    fn check(&self, n: usize, k: usize) -> Result<()> {
        if n > self.max_n || k < 2 || k > n {
            return Err(CountError::OutOfRange { n, k });
        }
        Ok(())
    }

    pub fn t(&self, n: usize) -> Result<&BigUint> {
        if n == 0 || n > self.max_n {
            return Err(CountError::OutOfRange { n, k: 0 });
        }
        Ok(&self.t[n])
    }

    pub fn h(&self, k: usize) -> Result<&BigUint> {
        if !(2..=self.max_n).contains(&k) {
            return Err(CountError::OutOfRange { n: k, k });
        }
        Ok(&self.h[k])
    }

    pub fn t_nk(&self, n: usize, k: usize) -> Result<&BigUint> {
        self.check(n, k)?;
        Ok(&self.t_nk[n][k])
    }

    /// Ways to grow one irreducible tanglegram of size `k` to size `n`.
    pub fn c_nk(&self, n: usize, k: usize) -> Result<BigUint> {
        self.check(n, k)?;
        let (q, r) = self.t_nk[n][k].div_rem(&self.h[k]);
        if !r.is_zero() {
            return Err(CountError::DivisibilityViolation(format!("t_{{{n},{k}}} / h_{k}")));
        }
        Ok(q)
    }

    /// `[x^m] T(x)^j`.
    pub fn conv(&self, j: usize, m: usize) -> Result<&BigUint> {
        if j > self.max_n || m > self.max_n {
            return Err(CountError::OutOfRange { n: m, k: j });
        }
        Ok(&self.conv[j][m])
    }

    pub fn h_table(&self) -> &[BigUint] {
        &self.h
    }

    /// `(n, k, t_{n,k})` for every `2 ≤ k ≤ n ≤ max_n`, row by row.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, &BigUint)> {
        (2..=self.max_n).flat_map(move |n| (2..=n).map(move |k| (n, k, &self.t_nk[n][k])))
    }

    /// Table-shaped CSV: a header, every `n,k,t_nk`, and `n,total,t_n` after
    /// each row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,k,t_nk\n");
        for n in 1..=self.max_n {
            for k in 2..=n {
                let _ = writeln!(out, "{n},{k},{}", self.t_nk[n][k]);
            }
            let _ = writeln!(out, "{n},total,{}", self.t[n]);
        }
        out
    }

    fn body(&self) -> String {
        let mut out = String::new();
        for k in 2..=self.max_n {
            let _ = writeln!(out, "h {k} {}", self.h[k]);
        }
        for n in 1..=self.max_n {
            let _ = writeln!(out, "t {n} {}", self.t[n]);
        }
        for (n, k, v) in self.rows() {
            let _ = writeln!(out, "tnk {n} {k} {v}");
        }
        out
    }

    fn header(max_n: usize) -> String {
        format!("# tangle counts v{} max_n={max_n}\n", env!("CARGO_PKG_VERSION"))
    }

    /// Cache text: a header line, one record per line, and a checksum line.
    pub fn to_cache_string(&self) -> String {
        let mut text = Self::header(self.max_n);
        text.push_str(&self.body());
        let digest = Sha256::digest(text.as_bytes());
        let _ = writeln!(text, "checksum {}", hex(&digest));
        text
    }

    /// Parses cache text written for `max_n`, rejecting tampered or stale files.
    pub fn from_cache_string(text: &str, max_n: usize) -> Result<Self> {
        let (content, last) = match text.trim_end_matches('\n').rsplit_once('\n') {
            Some((c, l)) => (format!("{c}\n"), l),
            None => return Err(CountError::CorruptCache("missing checksum line".into())),
        };
        let recorded = last
            .strip_prefix("checksum ")
            .ok_or_else(|| CountError::CorruptCache("missing checksum line".into()))?;
        if hex(&Sha256::digest(content.as_bytes())) != recorded.trim() {
            return Err(CountError::CorruptCache("checksum mismatch".into()));
        }
        if !content.starts_with(&Self::header(max_n)) {
            return Err(CountError::StaleCache);
        }
        let h = parse_h_records(&content)?;
        let table = Self::from_h(h)?;
        if table.max_n != max_n || table.body() != content[Self::header(max_n).len()..] {
            return Err(CountError::CorruptCache("records disagree with recomputation".into()));
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_cache_string())?;
        Ok(())
    }

    pub fn load(path: &Path, max_n: usize) -> Result<Self> {
        Self::from_cache_string(&fs::read_to_string(path)?, max_n)
    }

    /// Loads a valid cache, or computes the tables and rewrites the cache
    /// when it is missing or stale. A corrupt cache is an error.
    pub fn load_or_compute(path: &Path, max_n: usize) -> Result<(Self, bool)> {
        Self::load_or_compute_with_cap(path, max_n, DEFAULT_H_CAP)
    }

    /// As [`CountTable::load_or_compute`], computing irreducible counts up
    /// to `h_cap` when needed.
    pub fn load_or_compute_with_cap(path: &Path, max_n: usize, h_cap: usize) -> Result<(Self, bool)> {
        match Self::load(path, max_n) {
            Ok(t) => return Ok((t, true)),
            Err(CountError::StaleCache) => {}
            Err(CountError::Io(e)) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        let t = Self::from_h(compute_h_with_cap(max_n, h_cap)?)?;
        t.save(path)?;
        Ok((t, false))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_h_records(text: &str) -> Result<Vec<BigUint>> {
    let mut h: BTreeMap<usize, BigUint> = BTreeMap::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || CountError::CorruptCache(format!("bad record `{line}`"));
        match fields.as_slice() {
            ["h", n, v] => {
                let n: usize = n.parse().map_err(|_| bad())?;
                h.insert(n, v.parse().map_err(|_| bad())?);
            }
            ["t", ..] | ["tnk", ..] => {}
            _ => return Err(bad()),
        }
    }
    let max = h.keys().next_back().copied().unwrap_or(1);
    let mut out = vec![BigUint::zero(); max + 1];
    for (n, v) in h {
        out[n] = v;
    }
    Ok(out)
}

/// An irreducible-count table read from outside, checked against the
/// computed values wherever both exist.
#[derive(Debug, Clone)]
pub struct ImportedH {
    pub h: Vec<BigUint>,
    /// Sizes where the import could be checked against computation.
    pub verified_through: usize,
}

pub fn import_h(text: &str, computed: &[BigUint]) -> Result<ImportedH> {
    let h = parse_h_records(text)?;
    let mut verified_through = 0;
    for n in 2..computed.len().min(h.len()) {
        if h[n] != computed[n] {
            return Err(CountError::ImportMismatch { n, imported: h[n].clone(), computed: computed[n].clone() });
        }
        verified_through = n;
    }
    Ok(ImportedH { h, verified_through })
}

/// Result of comparing the enumerated census against one table row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub n: usize,
    /// `t_{n,k}` for `k = 2..=n`.
    pub expected: Vec<BigUint>,
    /// Enumerated planar tanglegrams with core size `k = 2..=n`.
    pub observed: Vec<usize>,
    pub matches: bool,
}

pub fn verify_against_bruteforce(table: &CountTable, n: usize) -> Result<CensusReport> {
    let census = census_by_core_size(n)?;
    let expected: Vec<BigUint> = (2..=n).map(|k| table.t_nk(n, k).cloned()).collect::<Result<_>>()?;
    let observed: Vec<usize> = (2..=n).map(|k| census.get(&k).copied().unwrap_or(0)).collect();
    let matches = census.keys().all(|&k| (2..=n).contains(&k))
        && expected.iter().zip(&observed).all(|(e, &o)| *e == BigUint::from(o));
    Ok(CensusReport { n, expected, observed, matches })
}
