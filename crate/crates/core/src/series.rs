//! Partial sums of `1/ζ(s) = Σ_k c_k·P_k(s/2)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::{ck_binomial, ck_sweep, CoefficientRecord, Method, SweepParams};
use crate::config::check_precision;
use crate::error::{Error, Result};
use crate::mp::{Mag, MpComplex, MpReal};
use crate::zeta::{inv_zeta_even, inv_zeta_oracle};

/// Coefficient balls indexed by `k`.
#[derive(Clone, Debug, Default)]
pub struct CoefficientSet {
    values: BTreeMap<u64, CoefficientRecord>,
}

impl CoefficientSet {
    /// Keeps, for each `k`, the record with the smallest error bound.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a CoefficientRecord>) -> CoefficientSet {
        let mut values: BTreeMap<u64, CoefficientRecord> = BTreeMap::new();
        for r in records {
            match values.get(&r.k) {
                Some(old) if old.error_bound <= r.error_bound => {}
                _ => {
                    values.insert(r.k, r.clone());
                }
            }
        }
        CoefficientSet { values }
    }

    pub fn get(&self, k: u64) -> Option<&CoefficientRecord> {
        self.values.get(&k)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &CoefficientRecord> {
        self.values.values()
    }

    /// `k ≤ k_max` without a record.
    pub fn missing(&self, k_max: u64) -> Vec<u64> {
        (0..=k_max).filter(|k| !self.values.contains_key(k)).collect()
    }

    /// Interval `mid ± error_bound` of `c_k`.
    fn ball(&self, k: u64) -> MpReal {
        self.values[&k].interval()
    }
}

/// How to obtain coefficients that are not supplied.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CoefficientSource {
    Binomial {
        precision: u32,
    },
    Mobius {
        precision: u32,
        n_cutoff: u64,
    },
    /// Binomial up to `binomial_max_k`, Möbius above.
    Hybrid {
        precision: u32,
        binomial_max_k: u64,
        n_cutoff: u64,
    },
}

impl CoefficientSource {
    pub fn build(&self, k_max: u64) -> Result<CoefficientSet> {
        let records = match *self {
            CoefficientSource::Binomial { precision } => {
                ck_sweep(0..=k_max, Method::Binomial, &SweepParams::new(precision), None)?
            }
            CoefficientSource::Mobius { precision, n_cutoff } => ck_sweep(
                0..=k_max,
                Method::Mobius,
                &SweepParams::new(precision).with_cutoff(n_cutoff),
                None,
            )?,
            CoefficientSource::Hybrid {
                precision,
                binomial_max_k,
                n_cutoff,
            } => {
                let top = binomial_max_k.min(k_max);
                let mut r = ck_sweep(0..=top, Method::Binomial, &SweepParams::new(precision), None)?;
                if k_max > top {
                    r.extend(ck_sweep(
                        top + 1..=k_max,
                        Method::Mobius,
                        &SweepParams::new(precision).with_cutoff(n_cutoff),
                        None,
                    )?);
                }
                r
            }
        };
        Ok(CoefficientSet::from_records(&records))
    }
}

/// Where `s` sits relative to the abscissa of absolute convergence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `Re(s) > 1`: unconditional, reference available.
    Unconditional,
    /// `1/2 < Re(s) ≤ 1`: convergence is conditional on RH.
    ConditionalOnRh,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesResult {
    pub s: MpComplex,
    #[serde(rename = "K")]
    pub k_max: u64,
    /// Exact sum of the `K + 1` ball-valued terms.
    pub partial_sum: MpComplex,
    /// `|c_K·P_K(s/2)|·K`. Heuristic, not a bound.
    pub term_tail_estimate: f64,
    pub tail_estimate_is_heuristic: bool,
    /// `1/ζ(s)` when `Re(s) > 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<MpComplex>,
    pub region: Region,
}

impl SeriesResult {
    /// `|partial_sum − reference|` (upper bound of the ball difference).
    pub fn error(&self) -> Option<Mag> {
        self.reference.as_ref().map(|r| self.partial_sum.sub(r).abs_upper())
    }
}

fn region_of(s: &MpComplex) -> Result<Region> {
    let one = MpReal::one(64);
    let half = one.mul_2exp(-1);
    if s.re.sub(&one).is_positive() {
        Ok(Region::Unconditional)
    } else if s.re.sub(&half).is_positive() {
        Ok(Region::ConditionalOnRh)
    } else {
        Err(Error::domain(format!(
            "the series is only evaluated for Re(s) > 1/2, got Re(s) = {}",
            s.re
        )))
    }
}

fn log2_ceil(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// `P_k(z)` for `k = 0..=k_max`.
fn pochhammer_table(z: &MpComplex, k_max: u64, wp: u32) -> Vec<MpComplex> {
    let mut out = Vec::with_capacity(k_max as usize + 1);
    let mut p = MpComplex::one(wp);
    out.push(p.clone());
    for r in 1..=k_max {
        let f = MpComplex::one(wp).sub(&z.div_u64(r));
        p = p.mul(&f);
        out.push(p.clone());
    }
    out
}

/// `Σ_{k≤K} c_k·P_k(s/2)` with coefficients from `set`.
pub fn inv_zeta_pochhammer(s: &MpComplex, k_max: u64, set: &CoefficientSet, precision: u32) -> Result<SeriesResult> {
    check_precision(precision)?;
    let region = region_of(s)?;
    let missing = set.missing(k_max);
    if !missing.is_empty() {
        let shown: Vec<String> = missing.iter().take(20).map(|k| k.to_string()).collect();
        let more = if missing.len() > 20 {
            format!(" and {} more", missing.len() - 20)
        } else {
            String::new()
        };
        return Err(Error::usage(format!(
            "missing coefficients for k = {}{more}",
            shown.join(", ")
        )));
    }
    let wp = precision + 2 * log2_ceil(k_max + 1) + 16;
    let z = s.with_prec(wp).mul_2exp(-1);
    let p = pochhammer_table(&z, k_max, wp);
    let terms: Vec<MpComplex> = p
        .par_iter()
        .enumerate()
        .map(|(k, pk)| pk.mul_real(&set.ball(k as u64)))
        .collect();
    let mut sum = MpComplex::zero(wp);
    for t in &terms {
        sum = sum.add(t);
    }
    let last = terms.last().expect("k_max + 1 terms");
    let term_tail_estimate = last.abs_upper().to_f64() * k_max.max(1) as f64;
    let reference = match region {
        Region::Unconditional => Some(inv_zeta_oracle(s, precision)?),
        Region::ConditionalOnRh => None,
    };
    Ok(SeriesResult {
        s: s.clone(),
        k_max,
        partial_sum: sum.round(precision),
        term_tail_estimate,
        tail_estimate_is_heuristic: true,
        reference,
        region,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationIdentity {
    pub m: u64,
    /// `Σ_{k<m} c_k·P_k(m)`.
    pub sum: MpReal,
    /// `1/ζ(2m)`.
    pub reference: MpReal,
    pub residual: MpReal,
    pub contains_zero: bool,
}

/// `Σ_{k=0}^{m−1} c_k·P_k(m) − 1/ζ(2m)` with binomial coefficients.
pub fn truncation_identity_check(m: u64, precision: u32) -> Result<TruncationIdentity> {
    check_precision(precision)?;
    if m == 0 {
        return Err(Error::usage("truncation_identity_check requires m ≥ 1"));
    }
    let wp = precision + 2 * log2_ceil(m) + 16;
    let mm = MpComplex::from_real(MpReal::from_u64(m, wp));
    let p = pochhammer_table(&mm, m - 1, wp);
    let mut sum = MpReal::zero(wp);
    for (k, pk) in p.iter().enumerate() {
        let c = ck_binomial(k as u64, wp)?;
        sum = sum.add(&pk.re.mul(&c.value));
    }
    let reference = inv_zeta_even(m, wp)?;
    let residual = sum.sub(&reference);
    Ok(TruncationIdentity {
        m,
        contains_zero: residual.contains_zero(),
        sum: sum.round(precision),
        reference: reference.round(precision),
        residual: residual.round(precision),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    #[serde(rename = "K")]
    pub k_max: u64,
    /// Upper bound on `|partial_sum(K) − 1/ζ(s)|`.
    pub error: f64,
    pub term_tail_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceProfile {
    pub s: MpComplex,
    pub rows: Vec<ProfileRow>,
    /// Errors strictly decrease along the K list.
    pub strictly_decreasing: bool,
    /// Errors never increase along the K list.
    pub non_increasing: bool,
    pub max_error: f64,
}

/// `|partial_sum(K) − 1/ζ(s)|` for each `K` in `k_list`.
pub fn convergence_profile(
    s: &MpComplex,
    k_list: &[u64],
    set: &CoefficientSet,
    precision: u32,
) -> Result<ConvergenceProfile> {
    check_precision(precision)?;
    if region_of(s)? != Region::Unconditional {
        return Err(Error::domain("convergence_profile requires Re(s) > 1"));
    }
    if k_list.is_empty() {
        return Err(Error::usage("convergence_profile needs at least one K"));
    }
    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        let r = inv_zeta_pochhammer(s, k, set, precision)?;
        rows.push(ProfileRow {
            k_max: k,
            error: r.error().expect("reference present").to_f64(),
            term_tail_estimate: r.term_tail_estimate,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].error < w[0].error);
    let non_increasing = rows.windows(2).all(|w| w[1].error <= w[0].error);
    let max_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    Ok(ConvergenceProfile {
        s: s.clone(),
        rows,
        strictly_decreasing,
        non_increasing,
        max_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(k_max: u64) -> CoefficientSet {
        CoefficientSource::Binomial { precision: 96 }.build(k_max).unwrap()
    }

    #[test]
    fn even_arguments_truncate() {
        let set = set(12);
        let r = inv_zeta_pochhammer(&MpComplex::from_f64(2.0, 0.0, 96), 12, &set, 96).unwrap();
        assert!(r
            .partial_sum
            .overlaps(&MpComplex::from_real(set.get(0).unwrap().value.clone())));
        let r = inv_zeta_pochhammer(&MpComplex::from_f64(4.0, 0.0, 96), 12, &set, 96).unwrap();
        assert!(r.partial_sum.overlaps(r.reference.as_ref().unwrap()));
    }

    #[test]
    fn missing_coefficients_are_listed() {
        let set = set(3);
        match inv_zeta_pochhammer(&MpComplex::from_f64(3.0, 0.0, 64), 5, &set, 64) {
            Err(Error::Usage(msg)) => assert!(msg.contains("4, 5"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn region_flags() {
        let set = set(5);
        let r = inv_zeta_pochhammer(&MpComplex::from_f64(0.75, 3.0, 64), 5, &set, 64).unwrap();
        assert_eq!(r.region, Region::ConditionalOnRh);
        assert!(r.reference.is_none());
        assert!(matches!(
            inv_zeta_pochhammer(&MpComplex::from_f64(0.5, 0.0, 64), 5, &set, 64),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn identity_small_m() {
        for m in 1..=6 {
            let t = truncation_identity_check(m, 96).unwrap();
            assert!(t.contains_zero, "m = {m}");
            assert!(t.residual.abs_upper() < Mag::pow2(-80), "m = {m}");
        }
    }
}
