use ckzeta::mp::{log_gamma, Mag, MpComplex, MpReal};
use ckzeta::pochhammer::{
    binomial_identity_check, pochhammer, pochhammer_bound_scan, pochhammer_direct, pochhammer_gamma, PochhammerMethod,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> MpComplex {
    MpComplex::from_f64(re, im, 128)
}

/// Π_{r≤k} (1 − s/r) in f64 complex arithmetic.
fn product_f64(k: u64, re: f64, im: f64) -> (f64, f64) {
    let (mut pr, mut pi) = (1.0f64, 0.0f64);
    for r in 1..=k {
        let (fr, fi) = (1.0 - re / r as f64, -im / r as f64);
        (pr, pi) = (pr * fr - pi * fi, pr * fi + pi * fr);
    }
    (pr, pi)
}

#[test]
fn small_examples() {
    let one = MpComplex::one(64);
    assert!(pochhammer_direct(0, &c(-7.25, 3.0), 64).unwrap().value.overlaps(&one));
    let z = pochhammer_direct(3, &c(1.0, 0.0), 64).unwrap().value;
    assert!(z.is_zero() && z.radius().is_zero());
    let v = pochhammer_direct(2, &c(0.5, 0.0), 64).unwrap().value;
    assert!(v.re.overlaps(&MpReal::from_f64(0.375, 64)));
    let six = pochhammer_gamma(5, &c(-1.0, 0.0), 64).unwrap().value;
    assert!(six.re.overlaps(&MpReal::from_u64(6, 64)));
}

#[test]
fn dispatch_picks_method() {
    assert_eq!(
        pochhammer(10, &c(0.5, 1.0), 64).unwrap().method,
        PochhammerMethod::DirectProduct
    );
    assert_eq!(
        pochhammer(5000, &c(0.5, 1.0), 64).unwrap().method,
        PochhammerMethod::GammaRatio
    );
    assert_eq!(
        pochhammer(5000, &c(3.0, 0.0), 64).unwrap().method,
        PochhammerMethod::DirectProduct
    );
}

#[test]
fn random_pairs_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut done = 0;
    while done < 100 {
        let k = rng.gen_range(1..=1000u64);
        let re: f64 = rng.gen_range(-20.0..20.0);
        let im = if rng.gen_bool(0.3) {
            0.0
        } else {
            rng.gen_range(-20.0..20.0)
        };
        if im == 0.0 && re > 0.0 && (re - re.round()).abs() < 1e-9 {
            continue;
        }
        let s = c(re, im);
        let d = pochhammer_direct(k, &s, 96).unwrap().value;
        let g = pochhammer_gamma(k, &s, 96).unwrap().value;
        assert!(d.overlaps(&g), "k = {k}, s = {re} + {im}i: {d} vs {g}");
        done += 1;
    }
}

#[test]
fn exact_zeros_at_positive_integers() {
    for k in 1..=40u64 {
        for j in 1..=k {
            let v = pochhammer(k, &MpComplex::from_real(MpReal::from_u64(j, 64)), 64)
                .unwrap()
                .value;
            assert!(v.is_zero() && v.radius().is_zero(), "k = {k}, j = {j}");
        }
    }
}

#[test]
fn asymptotic_law() {
    let k = 100_000u64;
    for s in [0.5, 0.25, 0.75] {
        let p = pochhammer(k, &c(s, 0.0), 96).unwrap().value.re.to_f64().abs();
        let scaled = p * (k as f64).powf(s);
        let g = log_gamma(&c(1.0 - s, 0.0), 96).unwrap().re.exp().to_f64();
        let limit = 1.0 / g;
        assert!((scaled - limit).abs() <= 0.05 * limit, "s = {s}: {scaled} vs {limit}");
    }
    // Cross-check the Γ-ratio path at k = 10^5 against a plain product loop.
    let (pr, _) = product_f64(k, 0.5, 0.0);
    let g = pochhammer_gamma(k, &c(0.5, 0.0), 96).unwrap().value.re.to_f64();
    assert!((pr - g).abs() < 1e-10 * g.abs());

    let big = pochhammer_gamma(1_000_000, &c(0.5, 0.0), 96).unwrap().value.re.to_f64() * 1000.0;
    assert!((big - 0.5641895835).abs() < 1e-2, "{big}");
}

#[test]
fn identity_examples() {
    let r = binomial_identity_check(0, &c(1.7, -0.3), 64).unwrap();
    assert!(r.overlap);
    let r = binomial_identity_check(1, &c(3.0, 0.0), 64).unwrap();
    assert!(r.overlap && r.binomial_side.re.overlaps(&MpReal::from_f64(-0.5, 64)));
    let r = binomial_identity_check(25, &c(0.5, 2.0), 128).unwrap();
    assert!(r.overlap && r.residual < Mag::pow2(-120));
}

#[test]
fn bound_scan_examples() {
    assert_eq!(pochhammer_bound_scan(&c(0.0, 0.0), 100, 64).unwrap().sup, 1.0);
    assert_eq!(pochhammer_bound_scan(&c(1.0, 0.0), 100, 64).unwrap().sup, 0.0);
    let scan = pochhammer_bound_scan(&c(0.5, 0.0), 10_000, 64).unwrap();
    assert!(scan.sup.is_finite() && scan.stabilized);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn direct_matches_float_product(k in 0u64..300, re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let v = pochhammer_direct(k, &c(re, im), 96).unwrap().value;
        let (pr, pi) = product_f64(k, re, im);
        let (vr, vi) = v.to_f64();
        let scale = pr.hypot(pi).max(1e-300);
        prop_assert!((vr - pr).abs() <= 1e-9 * scale + 1e-300);
        prop_assert!((vi - pi).abs() <= 1e-9 * scale + 1e-300);
    }

    #[test]
    fn gamma_and_direct_agree(k in 1u64..1000, re in -20.0f64..20.0, im in 0.01f64..20.0) {
        let s = c(re, im);
        let d = pochhammer_direct(k, &s, 96).unwrap().value;
        let g = pochhammer_gamma(k, &s, 96).unwrap().value;
        prop_assert!(d.overlaps(&g));
    }
}
