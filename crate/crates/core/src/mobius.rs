//! Segmented Möbius sieve and the Mertens function.
//!
//! A segment `[a, b]` is sieved with the primes up to `√b`: each prime
//! flips the sign of its multiples and is divided out of them, each prime
//! square zeroes its multiples. Whatever is left of `n` after that is 1 or
//! a single large prime.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MIN_SEGMENT: u64 = 1 << 10;
pub const DEFAULT_SEGMENT: u64 = 1 << 18;
/// Segments sieved concurrently before their sums are folded in.
const BATCH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    pub lo: u64,
    pub hi: u64,
    pub values: Vec<i8>,
}

impl MobiusTable {
    /// μ(n) for `lo ≤ n ≤ hi`.
    pub fn mu(&self, n: u64) -> i8 {
        self.values[(n - self.lo) as usize]
    }
}

/// Primes up to `limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; limit as usize + 1];
    let mut out = Vec::new();
    for i in 2..=limit as usize {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit as usize {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|v| v > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|v| v <= n) {
        r += 1;
    }
    r
}

/// μ over `[a, b]` using `primes` (which must cover `√b`).
fn sieve_segment(a: u64, b: u64, primes: &[u64]) -> Vec<i8> {
    let len = (b - a + 1) as usize;
    let mut mu = vec![1i8; len];
    let mut rest: Vec<u64> = (a..=b).collect();
    for &p in primes {
        if p * p > b {
            break;
        }
        let mut m = a.div_ceil(p) * p;
        while m <= b {
            let i = (m - a) as usize;
            mu[i] = -mu[i];
            rest[i] /= p;
            m += p;
        }
        let q = p * p;
        let mut m = a.div_ceil(q) * q;
        while m <= b {
            mu[(m - a) as usize] = 0;
            m += q;
        }
    }
    for i in 0..len {
        if mu[i] != 0 && rest[i] > 1 {
            mu[i] = -mu[i];
        }
    }
    mu
}

fn check_range(lo: u64, hi: u64, segment_size: u64) -> Result<()> {
    if lo < 1 || lo > hi {
        return Err(Error::usage(format!("invalid sieve range [{lo}, {hi}]")));
    }
    if segment_size < MIN_SEGMENT {
        return Err(Error::usage(format!(
            "segment size {segment_size} is below the minimum {MIN_SEGMENT}"
        )));
    }
    if hi.checked_add(segment_size).is_none() || hi > u64::MAX / 2 {
        return Err(Error::usage(format!("sieve bound {hi} overflows 64-bit arithmetic")));
    }
    Ok(())
}

fn segments(lo: u64, hi: u64, segment_size: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a <= hi {
        let b = (a + segment_size - 1).min(hi);
        out.push((a, b));
        a = b + 1;
    }
    out
}

/// μ(n) for `lo ≤ n ≤ hi`, sieved in parallel segments.
pub fn sieve_mobius(lo: u64, hi: u64, segment_size: u64) -> Result<MobiusTable> {
    check_range(lo, hi, segment_size)?;
    let primes = primes_up_to(isqrt(hi));
    let parts: Vec<Vec<i8>> = segments(lo, hi, segment_size)
        .par_iter()
        .map(|&(a, b)| sieve_segment(a, b, &primes))
        .collect();
    Ok(MobiusTable {
        lo,
        hi,
        values: parts.concat(),
    })
}

/// Streams μ(n) for `lo ≤ n ≤ hi` in order, one segment batch at a time.
pub fn for_each_mobius(lo: u64, hi: u64, segment_size: u64, mut f: impl FnMut(u64, &[i8])) -> Result<()> {
    check_range(lo, hi, segment_size)?;
    let primes = primes_up_to(isqrt(hi));
    for batch in segments(lo, hi, segment_size).chunks(BATCH) {
        let parts: Vec<Vec<i8>> = batch.par_iter().map(|&(a, b)| sieve_segment(a, b, &primes)).collect();
        for (&(a, _), mu) in batch.iter().zip(&parts) {
            f(a, mu);
        }
    }
    Ok(())
}

/// `M(n)` on a grid plus the μ values of the final partial cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MertensTable {
    pub x_max: u64,
    pub grid_step: u64,
    pub segment_size: u64,
    /// `grid[i] = M(i·grid_step)`, with `M(0) = 0`.
    pub grid: Vec<i64>,
    /// μ(n) for `tail_start() < n ≤ x_max`.
    pub tail: Vec<i8>,
}

/// Builds the table for `1..=x_max`.
pub fn mertens(x_max: u64, segment_size: u64, checkpoint_every: u64) -> Result<MertensTable> {
    if x_max < 1 {
        return Err(Error::usage("mertens requires x_max ≥ 1"));
    }
    if checkpoint_every < 1 {
        return Err(Error::usage("checkpoint interval must be at least 1"));
    }
    let mut grid = vec![0i64];
    let last_grid = x_max / checkpoint_every * checkpoint_every;
    let mut tail = Vec::with_capacity((x_max - last_grid) as usize);
    let mut m = 0i64;
    for_each_mobius(1, x_max, segment_size, |a, mu| {
        for (i, &v) in mu.iter().enumerate() {
            let n = a + i as u64;
            m += v as i64;
            if n.is_multiple_of(checkpoint_every) {
                grid.push(m);
            }
            if n > last_grid {
                tail.push(v);
            }
        }
    })?;
    Ok(MertensTable {
        x_max,
        grid_step: checkpoint_every,
        segment_size,
        grid,
        tail,
    })
}

const MAGIC: &[u8; 8] = b"MERTENS\0";
const VERSION: u32 = 1;
const HEADER: usize = 48;

impl MertensTable {
    pub fn tail_start(&self) -> u64 {
        self.x_max / self.grid_step * self.grid_step
    }

    /// M(x) for `1 ≤ x ≤ x_max` (resieves one grid cell when needed).
    pub fn query(&self, x: u64) -> Result<i64> {
        if x < 1 || x > self.x_max {
            return Err(Error::usage(format!(
                "M({x}) is outside the table range [1, {}]",
                self.x_max
            )));
        }
        let cell = (x / self.grid_step) as usize;
        let base = self.grid[cell];
        let start = cell as u64 * self.grid_step;
        if x == start {
            return Ok(base);
        }
        let ts = self.tail_start();
        if start == ts {
            let extra: i64 = self.tail[..(x - ts) as usize].iter().map(|&v| v as i64).sum();
            return Ok(base + extra);
        }
        let mut sum = base;
        for_each_mobius(start + 1, x, self.segment_size, |_, mu| {
            sum += mu.iter().map(|&v| v as i64).sum::<i64>();
        })?;
        Ok(sum)
    }

    /// `M(n)` for every `lo ≤ n ≤ hi`, in order.
    pub fn range(&self, lo: u64, hi: u64) -> Result<Vec<i64>> {
        if lo < 1 || lo > hi || hi > self.x_max {
            return Err(Error::usage(format!(
                "range [{lo}, {hi}] is outside the table range [1, {}]",
                self.x_max
            )));
        }
        let mut out = Vec::with_capacity((hi - lo + 1) as usize);
        let mut m = if lo == 1 { 0 } else { self.query(lo - 1)? };
        for_each_mobius(lo, hi, self.segment_size, |_, mu| {
            for &v in mu {
                m += v as i64;
                out.push(m);
            }
        })?;
        Ok(out)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut b = Vec::with_capacity(HEADER + 8 * self.grid.len() + self.tail.len() + 32);
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.extend_from_slice(&(self.segment_size.min(u32::MAX as u64) as u32).to_le_bytes());
        b.extend_from_slice(&self.x_max.to_le_bytes());
        b.extend_from_slice(&self.grid_step.to_le_bytes());
        b.extend_from_slice(&(self.grid.len() as u64).to_le_bytes());
        b.extend_from_slice(&(self.tail.len() as u64).to_le_bytes());
        for g in &self.grid {
            b.extend_from_slice(&g.to_le_bytes());
        }
        b.extend(self.tail.iter().map(|&v| v as u8));
        let digest = Sha256::digest(&b);
        b.extend_from_slice(&digest);
        b
    }

    pub fn from_bytes(bytes: &[u8], location: &str) -> Result<MertensTable> {
        let bad = |reason: String| Error::integrity(location, reason);
        if bytes.len() < HEADER + 32 {
            return Err(bad(format!("file too short ({} bytes)", bytes.len())));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(bad("checksum mismatch".into()));
        }
        if &body[..8] != MAGIC {
            return Err(bad("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(body[o..o + 4].try_into().expect("4 bytes"));
        let u64_at = |o: usize| u64::from_le_bytes(body[o..o + 8].try_into().expect("8 bytes"));
        let version = u32_at(8);
        if version != VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let segment_size = u32_at(12) as u64;
        let x_max = u64_at(16);
        let grid_step = u64_at(24);
        let grid_len = u64_at(32) as usize;
        let tail_len = u64_at(40) as usize;
        let expected = grid_len
            .checked_mul(8)
            .and_then(|g| g.checked_add(tail_len))
            .and_then(|v| v.checked_add(HEADER));
        if expected != Some(body.len()) {
            return Err(bad("length fields disagree with file size".into()));
        }
        if grid_step == 0 || x_max == 0 || grid_len as u64 != x_max / grid_step + 1 {
            return Err(bad("inconsistent header".into()));
        }
        if tail_len as u64 != x_max - x_max / grid_step * grid_step {
            return Err(bad("inconsistent tail length".into()));
        }
        let grid = (0..grid_len).map(|i| u64_at(HEADER + 8 * i) as i64).collect();
        let tail: Vec<i8> = body[HEADER + 8 * grid_len..].iter().map(|&v| v as i8).collect();
        if tail.iter().any(|v| !(-1..=1).contains(v)) {
            return Err(bad("μ value outside {-1, 0, 1}".into()));
        }
        Ok(MertensTable {
            x_max,
            grid_step,
            segment_size: segment_size.max(MIN_SEGMENT),
            grid,
            tail,
        })
    }

    pub fn write_checkpoint(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&self.to_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_checkpoint(path: &Path) -> Result<MertensTable> {
        let bytes = fs::read(path)?;
        MertensTable::from_bytes(&bytes, &path.display().to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub x_min: u64,
    pub x_max: u64,
    /// `max |M(x)|/√x` over the range.
    pub max_ratio: f64,
    pub argmax: u64,
    pub m_at_argmax: i64,
}

/// `max_{x_min ≤ x ≤ x_max} |M(x)|/√x`.
pub fn mertens_growth_report(table: &MertensTable, x_min: u64) -> Result<GrowthReport> {
    if x_min < 1 || x_min > table.x_max {
        return Err(Error::usage(format!(
            "x_min = {x_min} must lie in [1, {}]",
            table.x_max
        )));
    }
    let mut best = (f64::NEG_INFINITY, x_min, 0i64);
    let mut m = if x_min == 1 { 0 } else { table.query(x_min - 1)? };
    for_each_mobius(x_min, table.x_max, table.segment_size, |a, mu| {
        for (i, &v) in mu.iter().enumerate() {
            m += v as i64;
            let x = a + i as u64;
            let r = m.unsigned_abs() as f64 / (x as f64).sqrt();
            if r > best.0 {
                best = (r, x, m);
            }
        }
    })?;
    Ok(GrowthReport {
        x_min,
        x_max: table.x_max,
        max_ratio: best.0,
        argmax: best.1,
        m_at_argmax: best.2,
    })
}

/// `Σ_{n≤N} μ(n)·⌊N/n⌋`, which equals 1 for every `N ≥ 1`.
pub fn floor_sum_identity(mu: &MobiusTable, n: u64) -> i64 {
    (1..=n).map(|k| mu.mu(k) as i64 * (n / k) as i64).sum()
}
