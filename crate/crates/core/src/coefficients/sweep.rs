//! Batch computation of `c_k` backed by an append-only JSON-lines cache.
//!
//! One record per line; a sidecar `<cache>.config.json` holds the
//! configuration the records were computed under. Workers compute records
//! in parallel; the calling thread writes them in `k` order as they
//! complete, so an interrupted sweep leaves a valid prefix behind.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use rayon::prelude::*;

use super::{
    binomial_working_precision, ck_binomial, ck_mertens_from_values, ck_mobius_range, default_kernel,
    CoefficientRecord, Method, FLOAT_MAX_N,
};
use crate::config::{self, check_precision, LabConfig};
use crate::error::{Error, Result};
use crate::mobius::{mertens, sieve_mobius, DEFAULT_SEGMENT};
use crate::zeta::prefetch_inv_zeta_even;

/// Batch size of the multi-`k` Möbius kernel.
const MOBIUS_CHUNK: u64 = 64;

#[derive(Clone, Debug)]
pub struct SweepParams {
    pub target_precision: u32,
    /// Truncation `N` for the Möbius and Mertens methods.
    pub n_cutoff: Option<u64>,
    pub segment_size: u64,
}

impl SweepParams {
    pub fn new(target_precision: u32) -> SweepParams {
        SweepParams {
            target_precision,
            n_cutoff: None,
            segment_size: DEFAULT_SEGMENT,
        }
    }

    pub fn with_cutoff(mut self, n: u64) -> SweepParams {
        self.n_cutoff = Some(n);
        self
    }
}

type Key = (u64, Method, Option<u64>);

/// An open cache file. Holds `<cache>.lock` until dropped.
#[derive(Debug)]
pub struct CoefficientCache {
    path: PathBuf,
    records: Vec<CoefficientRecord>,
    index: HashMap<Key, usize>,
    lock: PathBuf,
}

pub fn sidecar_path(cache: &Path) -> PathBuf {
    let mut s = cache.as_os_str().to_owned();
    s.push(".config.json");
    PathBuf::from(s)
}

fn lock_path(cache: &Path) -> PathBuf {
    let mut s = cache.as_os_str().to_owned();
    s.push(".lock");
    PathBuf::from(s)
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

impl CoefficientCache {
    /// Opens (creating if needed) the cache at `path`, validating every line
    /// and the configuration sidecar.
    pub fn open(path: impl AsRef<Path>) -> Result<CoefficientCache> {
        let path = path.as_ref().to_path_buf();
        let lock = lock_path(&path);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                return Err(Error::Io(std::io::Error::new(
                    e.kind(),
                    format!(
                        "{} is locked by another run (remove {} if that run is gone)",
                        path.display(),
                        lock.display()
                    ),
                )));
            }
            Err(e) => return Err(io_err(&lock, e)),
        }
        let mut cache = CoefficientCache {
            path,
            records: Vec::new(),
            index: HashMap::new(),
            lock,
        };
        cache.check_sidecar()?;
        cache.load()?;
        Ok(cache)
    }

    fn check_sidecar(&self) -> Result<()> {
        let side = sidecar_path(&self.path);
        let active = config::active();
        match std::fs::read_to_string(&side) {
            Ok(text) => {
                let stored: LabConfig = serde_json::from_str(&text).map_err(|e| Error::Integrity {
                    location: side.display().to_string(),
                    reason: e.to_string(),
                })?;
                if stored != *active {
                    return Err(Error::config(format!(
                        "cache {} was built under a different configuration (see {})",
                        self.path.display(),
                        side.display()
                    )));
                }
                Ok(())
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                let mut text = serde_json::to_string_pretty(active).expect("config serializes");
                text.push('\n');
                std::fs::write(&side, text).map_err(|e| io_err(&side, e))
            }
            Err(e) => Err(io_err(&side, e)),
        }
    }

    fn load(&mut self) -> Result<()> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
            Err(e) => return Err(io_err(&self.path, e)),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_err(&self.path, e))?;
            let location = format!("{}:{}", self.path.display(), i + 1);
            if line.trim().is_empty() {
                return Err(Error::Integrity {
                    location,
                    reason: "empty line".into(),
                });
            }
            let rec: CoefficientRecord = serde_json::from_str(&line).map_err(|e| Error::Integrity {
                location: location.clone(),
                reason: e.to_string(),
            })?;
            if !rec.value.is_finite() {
                return Err(Error::Integrity {
                    location,
                    reason: "non-finite value".into(),
                });
            }
            self.insert(rec.normalized());
        }
        Ok(())
    }

    fn insert(&mut self, rec: CoefficientRecord) {
        let key = (rec.k, rec.method, rec.n_cutoff);
        let i = self.records.len();
        self.records.push(rec);
        // Later lines win only if they are more precise.
        match self.index.get(&key) {
            Some(&j) if self.records[j].precision_bits >= self.records[i].precision_bits => {}
            _ => {
                self.index.insert(key, i);
            }
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// All records in file order.
    pub fn records(&self) -> &[CoefficientRecord] {
        &self.records
    }

    /// A stored record for `(k, method, n_cutoff)` with at least `precision`
    /// target bits.
    pub fn lookup(&self, k: u64, method: Method, n_cutoff: Option<u64>, precision: u32) -> Option<&CoefficientRecord> {
        self.index
            .get(&(k, method, n_cutoff))
            .map(|&i| &self.records[i])
            .filter(|r| r.precision_bits >= precision)
    }

    fn writer(&self) -> Result<File> {
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| io_err(&self.path, e))
    }

    /// Appends `rec` and returns it as a later load would see it.
    pub fn append(&mut self, rec: &CoefficientRecord) -> Result<CoefficientRecord> {
        let mut f = self.writer()?;
        self.write_line(&mut f, rec)
    }

    fn write_line(&mut self, f: &mut File, rec: &CoefficientRecord) -> Result<CoefficientRecord> {
        let mut line = serde_json::to_string(rec).expect("record serializes");
        let stored = serde_json::from_str::<CoefficientRecord>(&line)
            .expect("record parses back")
            .normalized();
        line.push('\n');
        f.write_all(line.as_bytes()).map_err(|e| io_err(&self.path, e))?;
        f.flush().map_err(|e| io_err(&self.path, e))?;
        self.insert(stored.clone());
        Ok(stored)
    }
}

impl Drop for CoefficientCache {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.lock);
    }
}

fn required_cutoff(method: Method, params: &SweepParams) -> Result<Option<u64>> {
    match method {
        Method::Binomial => Ok(None),
        Method::Mobius | Method::Mertens => match params.n_cutoff {
            Some(n) if n >= 2 => Ok(Some(n)),
            Some(n) => Err(Error::usage(format!("{method} sweep: N must be at least 2, got {n}"))),
            None => Err(Error::usage(format!("{method} sweep needs an N cutoff"))),
        },
    }
}

/// One record per `k` in `range`, reusing adequate cached records and
/// appending new ones in `k` order.
pub fn ck_sweep(
    range: RangeInclusive<u64>,
    method: Method,
    params: &SweepParams,
    mut cache: Option<&mut CoefficientCache>,
) -> Result<Vec<CoefficientRecord>> {
    check_precision(params.target_precision)?;
    if range.is_empty() {
        return Err(Error::usage(format!(
            "empty k range {}..={}",
            range.start(),
            range.end()
        )));
    }
    let n_cutoff = required_cutoff(method, params)?;
    let prec = params.target_precision;

    let mut out: BTreeMap<u64, CoefficientRecord> = BTreeMap::new();
    let mut missing = Vec::new();
    for k in range.clone() {
        match cache.as_deref().and_then(|c| c.lookup(k, method, n_cutoff, prec)) {
            Some(r) => {
                out.insert(k, r.clone());
            }
            None => missing.push(k),
        }
    }
    if missing.is_empty() {
        return Ok(out.into_values().collect());
    }

    let (tx, rx) = mpsc::channel::<Result<Vec<CoefficientRecord>>>();
    let jobs = jobs(&missing, method, params)?;
    let computed = std::thread::scope(|scope| -> Result<()> {
        scope.spawn(move || {
            jobs.into_par_iter().for_each_with(tx, |tx, job| {
                let _ = tx.send(job.run());
            });
        });
        let mut writer = match cache.as_deref() {
            Some(c) => Some(c.writer()?),
            None => None,
        };
        let mut pending: BTreeMap<u64, CoefficientRecord> = BTreeMap::new();
        let mut next = 0usize;
        let mut first_err = None;
        for batch in rx {
            match batch {
                Ok(recs) => {
                    for r in recs {
                        pending.insert(r.k, r);
                    }
                }
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
            // Write the longest completed prefix of `missing`.
            while next < missing.len() {
                let Some(mut r) = pending.remove(&missing[next]) else {
                    break;
                };
                if let (Some(c), Some(w)) = (cache.as_deref_mut(), writer.as_mut()) {
                    r = c.write_line(w, &r)?;
                }
                out.insert(r.k, r);
                next += 1;
            }
        }
        match first_err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    });
    computed?;
    Ok(out.into_values().collect())
}

enum Job<'a> {
    Binomial {
        k: u64,
        prec: u32,
    },
    Mobius {
        ks: Vec<u64>,
        mu: &'a crate::mobius::MobiusTable,
        prec: u32,
    },
    Mertens {
        k: u64,
        m: &'a [i64],
        prec: u32,
    },
}

impl Job<'_> {
    fn run(self) -> Result<Vec<CoefficientRecord>> {
        match self {
            Job::Binomial { k, prec } => Ok(vec![ck_binomial(k, prec)?]),
            Job::Mobius { ks, mu, prec } => {
                let recs = ck_mobius_range(ks[0], *ks.last().unwrap(), mu, prec)?;
                Ok(recs.into_iter().filter(|r| ks.binary_search(&r.k).is_ok()).collect())
            }
            Job::Mertens { k, m, prec } => {
                let kernel = default_kernel(m.len() as u64 + 1);
                Ok(vec![ck_mertens_from_values(k, m, prec, kernel)?])
            }
        }
    }
}

fn jobs<'a>(missing: &[u64], method: Method, params: &SweepParams) -> Result<Vec<Job<'a>>> {
    let prec = params.target_precision;
    match method {
        Method::Binomial => {
            let k_max = *missing.last().unwrap();
            let cap = config::active().precision_cap_bits as u64;
            let wp = binomial_working_precision(k_max, prec, 0);
            if wp <= cap {
                prefetch_inv_zeta_even(k_max + 1, wp as u32)?;
            }
            // Largest k first so the expensive work starts early.
            Ok(missing.iter().rev().map(|&k| Job::Binomial { k, prec }).collect())
        }
        Method::Mobius => {
            let n = params.n_cutoff.unwrap();
            if n > FLOAT_MAX_N {
                return Err(Error::usage(format!(
                    "mobius sweep: N = {n} exceeds the float kernel limit {FLOAT_MAX_N}; use ck_mobius per k"
                )));
            }
            let mu: &'a _ = Box::leak(Box::new(sieve_mobius(1, n, params.segment_size)?));
            Ok(missing
                .chunks(MOBIUS_CHUNK as usize)
                .map(|c| Job::Mobius {
                    ks: c.to_vec(),
                    mu,
                    prec,
                })
                .collect())
        }
        Method::Mertens => {
            let n = params.n_cutoff.unwrap();
            let table = mertens(n, params.segment_size, 1 << 16)?;
            let m: &'a [i64] = Box::leak(table.range(1, n - 1)?.into_boxed_slice());
            Ok(missing.iter().map(|&k| Job::Mertens { k, m, prec }).collect())
        }
    }
}
