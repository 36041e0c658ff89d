//! Cross-method and identity suites run by `ckzeta verify`.

use serde::Serialize;

use crate::analysis::{beta_integral_check, BetaCandidate};
use crate::coefficients::{ck_binomial, ck_binomial_with_guard, ck_sweep, qk, Method, SweepParams};
use crate::error::Result;
use crate::mobius::{floor_sum_identity, mertens, sieve_mobius, DEFAULT_SEGMENT};
use crate::mp::{MpComplex, MpReal};
use crate::pochhammer::{pochhammer_direct, pochhammer_gamma};
use crate::series::{convergence_profile, truncation_identity_check, CoefficientSource};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> SuiteOutcome {
    match r {
        Ok((passed, detail)) => SuiteOutcome { name, passed, detail },
        Err(e) => SuiteOutcome {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every suite; `quick` shrinks the parameters to a few seconds.
pub fn run_suites(quick: bool) -> Vec<SuiteOutcome> {
    vec![
        outcome("cross-method", cross_method(quick)),
        outcome("truncation-identity", truncation(quick)),
        outcome("series-convergence", series(quick)),
        outcome("qk-majorant", majorant(quick)),
        outcome("sieve", sieve(quick)),
        outcome("pochhammer", pochhammer()),
        outcome("beta-integral", beta()),
        outcome("guard-bits", guard_bits(quick)),
    ]
}

fn cross_method(quick: bool) -> Result<(bool, String)> {
    let (ks, n_mob, n_mer): (Vec<u64>, u64, u64) = if quick {
        ((0..=10).chain([50]).collect(), 20_000, 20_000)
    } else {
        ((0..=30).chain([100, 300, 1000]).collect(), 1_000_000, 100_000)
    };
    let k_max = *ks.last().unwrap();
    let bin = ck_sweep(0..=k_max, Method::Binomial, &SweepParams::new(64), None)?;
    let mob = ck_sweep(
        0..=k_max,
        Method::Mobius,
        &SweepParams::new(64).with_cutoff(n_mob),
        None,
    )?;
    let mer = ck_sweep(
        0..=k_max,
        Method::Mertens,
        &SweepParams::new(64).with_cutoff(n_mer),
        None,
    )?;
    let bad: Vec<u64> = ks
        .iter()
        .copied()
        .filter(|&k| {
            let (a, b, c) = (&bin[k as usize], &mob[k as usize], &mer[k as usize]);
            !(a.overlaps(b) && a.overlaps(c) && b.overlaps(c))
        })
        .collect();
    Ok((
        bad.is_empty(),
        format!(
            "{} k values, Möbius N = {n_mob}, Mertens N = {n_mer}, disagreeing: {bad:?}",
            ks.len()
        ),
    ))
}

fn truncation(quick: bool) -> Result<(bool, String)> {
    let top = if quick { 10 } else { 20 };
    let mut bad = Vec::new();
    for m in 1..=top {
        if !truncation_identity_check(m, 128)?.contains_zero {
            bad.push(m);
        }
    }
    Ok((bad.is_empty(), format!("m = 1..{top} at 128 bits, failing: {bad:?}")))
}

fn series(quick: bool) -> Result<(bool, String)> {
    let (ks, source): (Vec<u64>, CoefficientSource) = if quick {
        (vec![10, 100], CoefficientSource::Binomial { precision: 64 })
    } else {
        (
            vec![100, 1000, 10_000],
            CoefficientSource::Hybrid {
                precision: 64,
                binomial_max_k: 1000,
                n_cutoff: 100_000,
            },
        )
    };
    let set = source.build(*ks.last().unwrap())?;
    let p = convergence_profile(&MpComplex::from_f64(3.0, 0.0, 64), &ks, &set, 64)?;
    let last = p.rows.last().unwrap().error;
    let ok = p.strictly_decreasing && (quick || last <= 1e-3);
    let errs: Vec<String> = p
        .rows
        .iter()
        .map(|r| format!("K={}: {:.3e}", r.k_max, r.error))
        .collect();
    Ok((ok, format!("s = 3, {}", errs.join(", "))))
}

fn majorant(quick: bool) -> Result<(bool, String)> {
    let k_max = if quick { 50 } else { 1000 };
    let recs = ck_sweep(0..=k_max, Method::Binomial, &SweepParams::new(64), None)?;
    let mut bad = Vec::new();
    let mut envelope = 0.0f64;
    for r in &recs {
        let q = qk(r.k, 100_000, 64)?;
        if r.value.abs_lower() > q.value.abs_upper() {
            bad.push(r.k);
        }
        if r.k >= 2 {
            envelope = envelope.max(r.value.to_f64().abs() * (r.k as f64).sqrt());
        }
    }
    Ok((
        bad.is_empty() && envelope.is_finite(),
        format!("k ≤ {k_max}, max |c_k|·√k = {envelope:.6}, violations: {bad:?}"),
    ))
}

fn sieve(quick: bool) -> Result<(bool, String)> {
    let ns: &[u64] = if quick { &[1000, 100_000] } else { &[1000, 1_000_000] };
    let mut ok = true;
    for &n in ns {
        let mu = sieve_mobius(1, n, DEFAULT_SEGMENT)?;
        ok &= floor_sum_identity(&mu, n) == 1;
    }
    let t = mertens(100, 1024, 10)?;
    let (m10, m100) = (t.query(10)?, t.query(100)?);
    ok &= m10 == -1 && m100 == 1;
    Ok((
        ok,
        format!("floor-sum identity at N = {ns:?}, M(10) = {m10}, M(100) = {m100}"),
    ))
}

fn pochhammer() -> Result<(bool, String)> {
    let mut ok = true;
    for i in 0..24u64 {
        let k = 1 + (i * 37) % 200;
        let s = MpComplex::from_f64(-3.0 + 0.37 * i as f64, 2.5 - 0.41 * i as f64, 96);
        let d = pochhammer_direct(k, &s, 96)?.value;
        let g = pochhammer_gamma(k, &s, 96)?.value;
        ok &= d.overlaps(&g);
    }
    for k in 1..=12u64 {
        for j in 1..=k {
            let s = MpComplex::from_real(MpReal::from_u64(j, 64));
            ok &= pochhammer_direct(k, &s, 64)?.value.is_zero();
        }
    }
    Ok((ok, "24 direct/Γ-ratio pairs, exact zeros at integer s ≤ k".into()))
}

fn beta() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (lambda, k) in [(1.0, 0u64), (1.0, 1), (2.5, 50)] {
        let c = beta_integral_check(lambda, k, 64)?;
        let matches = c.residual_half <= 16.0 * c.tolerance * c.half.to_f64().abs();
        ok &= matches && c.better == BetaCandidate::Half;
        parts.push(format!("(λ={lambda}, k={k}): half residual {:.2e}", c.residual_half));
    }
    Ok((ok, parts.join("; ")))
}

fn guard_bits(quick: bool) -> Result<(bool, String)> {
    let k = if quick { 100 } else { 1000 };
    let base = ck_binomial(k, 64)?;
    let more = ck_binomial_with_guard(k, 64, 32)?;
    let inside = base.value.contains_mid_of(&more.value);
    Ok((inside, format!("k = {k}, +32 guard bits midpoint inside: {inside}")))
}
