//! Acceptance criteria 1 to 11, one PASS/FAIL line each.
//!
//! Criteria listed in `KNOWN_FAILURES` fail for documented mathematical
//! reasons; they are reported as FAIL but do not fail the process. Any other
//! failure exits with status 1.

use std::time::{Duration, Instant};

use ckzeta::analysis::{beta_integral_check, exponent_fit, limit_study, BetaCandidate};
use ckzeta::coefficients::{ck_binomial, ck_binomial_with_guard, ck_sweep, qk, CoefficientRecord, Method, SweepParams};
use ckzeta::mobius::{floor_sum_identity, mertens, sieve_mobius, DEFAULT_SEGMENT, MIN_SEGMENT};
use ckzeta::mp::{MpComplex, MpReal};
use ckzeta::pochhammer::{pochhammer, pochhammer_direct, pochhammer_gamma};
use ckzeta::series::{convergence_profile, inv_zeta_pochhammer, truncation_identity_check, CoefficientSource};
use ckzeta::zeta::zeta_dirichlet_oracle;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_FAILURES: &[(u32, &str)] = &[
    (
        4,
        "q_k·√k tends to √π/2, since ∫_1^∞ x^{−2}(1 − x^{−2})^k dx = (√π/2)·Γ(k+1)/Γ(k+3/2); the √π target is twice the limit",
    ),
    (
        6,
        "over k ∈ [100, 1000] the coefficients decay like k^{−2}; the real-data slope is about −1.96, confirmed by an independent Möbius sum",
    ),
];

type Outcome = Result<(bool, String), String>;

struct Shared {
    binomial: Vec<CoefficientRecord>,
}

fn err(e: ckzeta::Error) -> String {
    e.to_string()
}

/// ζ(s) bracket for integer s from a partial sum plus integral tails.
fn zeta_bracket(s: i32, n: u64) -> (f64, f64) {
    let acc: f64 = (1..=n).rev().map(|k| (k as f64).powi(-s)).sum();
    let sm = (s - 1) as f64;
    (acc + ((n + 1) as f64).powf(-sm) / sm, acc + (n as f64).powf(-sm) / sm)
}

/// μ(n) by trial division.
fn mu_trial(mut n: u64) -> i64 {
    let mut r = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            r = -r;
        }
        p += 1;
    }
    if n > 1 {
        r = -r;
    }
    r
}

fn criterion_1(sh: &Shared) -> Outcome {
    let start = Instant::now();
    let ks: Vec<u64> = (0..=30).chain([100, 300, 1000]).collect();
    let mob = ck_sweep(
        0..=1000,
        Method::Mobius,
        &SweepParams::new(64).with_cutoff(1_000_000),
        None,
    )
    .map_err(err)?;
    let mer = ck_sweep(
        0..=1000,
        Method::Mertens,
        &SweepParams::new(64).with_cutoff(100_000),
        None,
    )
    .map_err(err)?;
    let bad: Vec<u64> = ks
        .iter()
        .copied()
        .filter(|&k| {
            let (a, b, c) = (&sh.binomial[k as usize], &mob[k as usize], &mer[k as usize]);
            !(a.overlaps(b) && a.overlaps(c) && b.overlaps(c))
        })
        .collect();
    let elapsed = start.elapsed();
    Ok((
        bad.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "{} k values pairwise intersect except {bad:?}; {:.1?}",
            ks.len(),
            elapsed
        ),
    ))
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    for m in 1..=20 {
        if !truncation_identity_check(m, 128).map_err(err)?.contains_zero {
            bad.push(m);
        }
    }
    Ok((
        bad.is_empty(),
        format!("m = 1..20 at 128 bits, residual excludes 0 for {bad:?}"),
    ))
}

fn criterion_3() -> Outcome {
    let set = CoefficientSource::Hybrid {
        precision: 64,
        binomial_max_k: 1000,
        n_cutoff: 1_000_000,
    }
    .build(10_000)
    .map_err(err)?;
    let s = MpComplex::from_f64(3.0, 0.0, 64);
    let r = inv_zeta_pochhammer(&s, 10_000, &set, 64).map_err(err)?;
    let oracle = zeta_dirichlet_oracle(&s, 64).map_err(err)?.re.recip();
    let (lo, hi) = zeta_bracket(3, 1_000_000);
    let v = r.partial_sum.re.to_f64();
    let gap = r.partial_sum.re.sub(&oracle).abs_upper().to_f64();
    let float_gap = (v - 1.0 / hi).abs().max((v - 1.0 / lo).abs());
    let p = convergence_profile(&s, &[100, 1000, 10_000], &set, 64).map_err(err)?;
    let errs: Vec<String> = p.rows.iter().map(|r| format!("{:.3e}", r.error)).collect();
    Ok((
        gap <= 1e-3 && float_gap <= 1e-3 && p.strictly_decreasing,
        format!(
            "|S_10000 − 1/ζ(3)| = {gap:.3e}; errors at K = 10², 10³, 10⁴: {}",
            errs.join(", ")
        ),
    ))
}

fn criterion_4() -> Outcome {
    let q = qk(10_000, 1_000_000, 64).map_err(err)?;
    // Plain f64 partial sum to the same cutoff; the ball must hold it.
    let direct: f64 = (1..=1_000_000u64)
        .rev()
        .map(|n| {
            let x = 1.0 / (n as f64 * n as f64);
            x * (1.0 - x).powi(10_000)
        })
        .sum();
    let scaled = q.value.to_f64() * 100.0;
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let slack = q.value.radius().to_f64() + 1e-12;
    let consistent = (q.value.mid().to_f64() - direct).abs() <= slack;
    Ok((
        consistent && (scaled - sqrt_pi).abs() <= 0.05,
        format!(
            "q_10000·100 = {scaled:.7} (direct partial sum {:.7}, inside ball: {consistent}); √π = {sqrt_pi:.7}, √π/2 = {:.7}",
            direct * 100.0,
            sqrt_pi / 2.0
        ),
    ))
}

fn criterion_5(sh: &Shared) -> Outcome {
    let mut envelope = 0.0f64;
    let mut argmax = 0;
    let mut bad = Vec::new();
    for r in &sh.binomial {
        if r.k >= 2 {
            let e = r.value.to_f64().abs() * (r.k as f64).sqrt();
            if e > envelope {
                envelope = e;
                argmax = r.k;
            }
        }
        let q = qk(r.k, 100_000, 64).map_err(err)?;
        if r.interval().abs_lower() > q.value.abs_upper() {
            bad.push(r.k);
        }
    }
    Ok((
        envelope.is_finite() && bad.is_empty(),
        format!("max_(2≤k≤1000) |c_k|·√k = {envelope:.6} at k = {argmax}; |c_k| > q_k at {bad:?}"),
    ))
}

fn criterion_6(sh: &Shared) -> Outcome {
    let fit = exponent_fit(&sh.binomial, 100, 1000).map_err(err)?;
    let synthetic: Vec<CoefficientRecord> = (1..=1000u64)
        .map(|k| {
            let v = MpReal::from_u64(k, 128).ln().mul(&MpReal::from_f64(-0.75, 128)).exp();
            CoefficientRecord::from_value(k, Method::Binomial, v, 64)
        })
        .collect();
    let syn = exponent_fit(&synthetic, 1, 1000).map_err(err)?;
    let real_ok = (-1.0..=-0.5).contains(&fit.slope);
    let syn_ok = (syn.slope + 0.75).abs() <= 1e-6;
    Ok((
        real_ok && syn_ok,
        format!(
            "real slope over [100, 1000] = {:.4} (bracket [−1.0, −0.5] {}); synthetic k^(−3/4) slope = {:.9}",
            fit.slope,
            if real_ok { "met" } else { "missed" },
            syn.slope
        ),
    ))
}

fn criterion_7(sh: &Shared) -> Outcome {
    let start = Instant::now();
    let study = limit_study(&sh.binomial).map_err(err)?;
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("limit_study.csv");
    std::fs::write(&path, study.to_csv()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rows = study.rows.len();
    let first = study.rows.first().map(|r| r.k);
    let last = study.rows.last().map(|r| r.k);
    Ok((
        rows == 999
            && first == Some(2)
            && last == Some(1000)
            && study.second_difference_rms.is_finite()
            && elapsed < Duration::from_secs(1800),
        format!(
            "{rows} rows written to {}; second-difference RMS = {:.3e}",
            path.display(),
            study.second_difference_rms
        ),
    ))
}

fn criterion_8() -> Outcome {
    let mu = sieve_mobius(1, 1_000_000, DEFAULT_SEGMENT).map_err(err)?;
    let s3 = floor_sum_identity(&mu, 1000);
    let s6 = floor_sum_identity(&mu, 1_000_000);
    let table = mertens(1000, MIN_SEGMENT, 64).map_err(err)?;
    let brute = |x: u64| (1..=x).map(mu_trial).sum::<i64>();
    let (m10, m100) = (table.query(10).map_err(err)?, table.query(100).map_err(err)?);
    let brute_ok = m10 == brute(10) && m100 == brute(100) && m10 == -1 && m100 == 1;
    let mono = sieve_mobius(1, 1_000_000, 1_000_000).map_err(err)?;
    let seg = sieve_mobius(1, 1_000_000, MIN_SEGMENT).map_err(err)?;
    let same = mono.values == seg.values && mono.values == mu.values;
    Ok((
        s3 == 1 && s6 == 1 && brute_ok && same,
        format!("floor sums {s3}, {s6}; M(10) = {m10}, M(100) = {m100}; segmented = monolithic: {same}"),
    ))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut disagree = 0;
    for _ in 0..100 {
        let k = rng.gen_range(1..=2000u64);
        let s = MpComplex::from_f64(rng.gen_range(-15.0..15.0), rng.gen_range(0.01..15.0), 96);
        let d = pochhammer_direct(k, &s, 96).map_err(err)?.value;
        let g = pochhammer_gamma(k, &s, 96).map_err(err)?.value;
        if !d.overlaps(&g) {
            disagree += 1;
        }
    }
    let mut nonzero = 0;
    for k in 1..=60u64 {
        for j in 1..=k {
            let v = pochhammer(k, &MpComplex::from_real(MpReal::from_u64(j, 64)), 64)
                .map_err(err)?
                .value;
            if !(v.is_zero() && v.radius().is_zero()) {
                nonzero += 1;
            }
        }
    }
    let k = 100_000u64;
    let p = pochhammer(k, &MpComplex::from_f64(0.5, 0.0, 96), 96)
        .map_err(err)?
        .value;
    let scaled = p.re.to_f64().abs() * (k as f64).sqrt();
    let product: f64 = (1..=k).map(|r| 1.0 - 0.5 / r as f64).product::<f64>() * (k as f64).sqrt();
    let limit = 1.0 / std::f64::consts::PI.sqrt();
    let rel = (scaled - limit).abs() / limit;
    Ok((
        disagree == 0 && nonzero == 0 && rel <= 0.05 && (scaled - product).abs() < 1e-9,
        format!(
            "{disagree}/100 random pairs disagree; {nonzero} non-exact zeros; |P_k(1/2)|·√k = {scaled:.6} vs 1/Γ(1/2) = {limit:.6}"
        ),
    ))
}

fn criterion_10() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (lambda, k) in [(1.0, 0u64), (1.0, 1), (2.5, 50)] {
        let r = beta_integral_check(lambda, k, 64).map_err(err)?;
        let matches = r.better == BetaCandidate::Half && r.residual_half <= r.tolerance * r.half.to_f64().abs();
        ok &= matches;
        parts.push(format!(
            "(λ={lambda}, k={k}): half residual {:.1e}, displayed residual {:.1e}",
            r.residual_half, r.residual_displayed
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_11() -> Outcome {
    let base = ck_binomial(1000, 64).map_err(err)?;
    let more = ck_binomial_with_guard(1000, 64, 32).map_err(err)?;
    let inside = base.interval().contains_mid_of(&more.value);
    Ok((
        inside,
        format!(
            "c_1000 = {} ± {}; +32 guard bits midpoint inside: {inside}",
            base.value.to_decimal_strings().0,
            base.error_bound.to_decimal_string()
        ),
    ))
}

fn main() {
    let start = Instant::now();
    let shared = match ck_sweep(0..=1000, Method::Binomial, &SweepParams::new(64), None) {
        Ok(binomial) => Shared { binomial },
        Err(e) => {
            println!("FAIL setup: binomial sweep: {e}");
            std::process::exit(1);
        }
    };
    type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;
    let sh = &shared;
    let checks: Vec<(u32, &str, Check)> = vec![
        (1, "cross-method consensus", Box::new(|| criterion_1(sh))),
        (2, "truncation identities", Box::new(criterion_2)),
        (3, "series convergence", Box::new(criterion_3)),
        (4, "q_k main term", Box::new(criterion_4)),
        (5, "unconditional envelope", Box::new(|| criterion_5(sh))),
        (6, "exponent fit", Box::new(|| criterion_6(sh))),
        (7, "limit study", Box::new(|| criterion_7(sh))),
        (8, "sieve integrity", Box::new(criterion_8)),
        (9, "pochhammer", Box::new(criterion_9)),
        (10, "beta integral", Box::new(criterion_10)),
        (11, "guard bits", Box::new(criterion_11)),
    ];
    let mut unexpected = Vec::new();
    for (n, name, check) in checks {
        let t = Instant::now();
        let (passed, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} {n:>2} {name} [{:.1?}]: {detail}", t.elapsed());
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n);
        match (passed, known) {
            (false, Some((_, why))) => println!("        known: {why}"),
            (false, None) => unexpected.push(n),
            (true, Some(_)) => println!("        note: listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    println!("acceptance finished in {:.1?}", start.elapsed());
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
