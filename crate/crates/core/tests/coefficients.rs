use ckzeta::coefficients::{
    ck_binomial, ck_binomial_with_guard, ck_mertens, ck_mobius, ck_mobius_from_table, ck_sweep, mertens_tail_bound, qk,
    variation_max_check, CoefficientCache, CoefficientRecord, Kernel, Method, SweepParams,
};
use ckzeta::mobius::{mertens, sieve_mobius, MIN_SEGMENT};
use ckzeta::mp::{Mag, MpReal};
use proptest::prelude::*;

/// Bracket for ζ(s) at integer s from a direct partial sum plus integral tails.
fn zeta_bracket(s: i32, n: u64) -> (f64, f64) {
    let mut acc = 0.0f64;
    for k in (1..=n).rev() {
        acc += (k as f64).powi(-s);
    }
    let sm = (s - 1) as f64;
    (acc + ((n + 1) as f64).powf(-sm) / sm, acc + (n as f64).powf(-sm) / sm)
}

fn inside(x: f64, lo: f64, hi: f64, slack: f64) -> bool {
    x >= lo - slack && x <= hi + slack
}

#[test]
fn binomial_small_k_against_dirichlet() {
    let (z2lo, z2hi) = zeta_bracket(2, 1_000_000);
    let (z4lo, z4hi) = zeta_bracket(4, 10_000);
    let c0 = ck_binomial(0, 64).unwrap();
    assert!(inside(c0.value.to_f64(), 1.0 / z2hi, 1.0 / z2lo, 1e-15));
    assert!((c0.value.to_f64() - 0.6079271019).abs() < 1e-10);
    assert!(c0.error_bound <= Mag::pow2(-64));

    let c1 = ck_binomial(1, 64).unwrap().value.to_f64();
    assert!(inside(c1, 1.0 / z2hi - 1.0 / z4lo, 1.0 / z2lo - 1.0 / z4hi, 1e-15));
    assert!((c1 + 0.3160114).abs() < 1e-7);
}

#[test]
fn binomial_meets_target() {
    for k in [0u64, 5, 77, 400] {
        let r = ck_binomial(k, 64).unwrap();
        let mid = r.value.mid_mag();
        let floor = Mag::pow2(-64);
        assert!(r.error_bound <= mid.max(floor).mul_2exp(-64), "k = {k}");
        assert!(r.error_bound >= r.value.radius());
    }
}

#[test]
fn mobius_examples() {
    let c0 = ck_mobius(0, 10_000, 64).unwrap();
    assert!((c0.value.to_f64() - 0.6079271019).abs() < 1e-3);
    assert!(c0.error_bound >= Mag::from_f64_up(1e-4));

    let g = ck_mobius(7, 1, 64).unwrap();
    assert!(g.value.contains(&MpReal::zero(64)) && g.error_bound >= Mag::from_u64(1));
    let g0 = ck_mobius(0, 1, 64).unwrap();
    assert!(g0.interval().contains(&MpReal::one(64)) && g0.error_bound >= Mag::from_u64(1));

    let b10 = ck_binomial(10, 64).unwrap();
    assert!(ck_mobius(10, 1_000_000, 64).unwrap().overlaps(&b10));
    let b50 = ck_binomial(50, 64).unwrap();
    assert!(ck_mobius(50, 1_000_000, 64).unwrap().overlaps(&b50));
}

#[test]
fn mobius_kernels_agree() {
    let mu = sieve_mobius(1, 50_000, MIN_SEGMENT).unwrap();
    for k in [0u64, 3, 250] {
        let f = ck_mobius_from_table(k, &mu, 64, Kernel::Float).unwrap();
        let b = ck_mobius_from_table(k, &mu, 64, Kernel::Ball).unwrap();
        assert!(f.overlaps(&b), "k = {k}");
        // Both carry the 1/N truncation term.
        assert!(
            f.error_bound >= Mag::from_f64_down(1.0 / 50_000.0) && b.error_bound >= Mag::from_f64_down(1.0 / 50_000.0)
        );
    }
}

#[test]
fn mertens_examples() {
    let table = mertens(100_000, 1 << 16, 1 << 12).unwrap();
    let m0 = ck_mertens(0, 1000, &table, 64).unwrap();
    assert!(m0.overlaps(&ck_mobius(0, 999, 64).unwrap()));

    assert!(ck_mertens(10, 100_000, &table, 64)
        .unwrap()
        .overlaps(&ck_binomial(10, 64).unwrap()));

    for k in [1u64, 2, 9] {
        let r = ck_mertens(k, 2, &table, 64).unwrap();
        let one_term = -0.25 * 0.75f64.powi(k as i32);
        assert!((r.value.mid().to_f64() - one_term).abs() < 1e-15, "k = {k}");
        assert!(r.error_bound >= mertens_tail_bound(k, 2));
    }

    let small = mertens(100, MIN_SEGMENT, 10).unwrap();
    assert!(ck_mertens(3, 1000, &small, 64).unwrap_err().is_usage());
}

#[test]
fn qk_examples() {
    let z2 = std::f64::consts::PI.powi(2) / 6.0;
    let q0 = qk(0, 100_000, 64).unwrap();
    assert!(q0.value.contains(&MpReal::from_f64(z2, 64)) || (q0.value.to_f64() - z2).abs() < 2e-5);
    for k in [1u64, 10, 1000] {
        let q = qk(k, 10_000, 64).unwrap();
        assert!(q.value.is_positive());
        assert!(q.value.to_f64() <= z2);
    }
    let q = qk(10_000, 1_000_000, 64).unwrap();
    // q_k·√k tends to ∫_0^∞ e^{−u²} du = √π/2.
    let scaled = q.value.to_f64() * 100.0;
    assert!((scaled - 0.8862269).abs() <= 0.05, "{scaled}");
    assert!((q.main_term.to_f64() * 100.0 - 1.7724539).abs() <= 0.05);
    assert!((q.integral_term.to_f64() * 100.0 - scaled).abs() <= 0.01);
}

/// Golden-section maximum of x^{-2}(1 − x^{-2})^k on [1, 2√(k+1)].
fn golden_max(k: u64) -> f64 {
    let g = |x: f64| x.powi(-2) * (1.0 - x.powi(-2)).powi(k as i32);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (1.0, 2.0 * ((k + 1) as f64).sqrt() + 1.0);
    for _ in 0..200 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if g(c) > g(d) {
            b = d;
        } else {
            a = c;
        }
    }
    g((a + b) / 2.0)
}

#[test]
fn variation_maximum() {
    let v = variation_max_check(1, 64).unwrap();
    assert!((v.g_max.to_f64() - 0.25).abs() < 1e-15);
    assert!((v.formula.to_f64() - 0.25).abs() < 1e-15);
    let v = variation_max_check(10, 64).unwrap();
    assert!(v.residual < 1e-12);
    assert!((v.g_max.to_f64() - golden_max(10)).abs() < 1e-12);
    for k in (1..=1000).step_by(37) {
        let lo = variation_max_check(k, 64).unwrap().residual;
        let hi = variation_max_check(k, 128).unwrap().residual;
        assert!(lo < 1e-15 && hi <= lo.max(1e-30), "k = {k}");
    }
    assert!(variation_max_check(0, 64).is_err());
}

#[test]
fn sweep_reuses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let params = SweepParams::new(64);
    let first = {
        let mut cache = CoefficientCache::open(&path).unwrap();
        ck_sweep(0..=3, Method::Binomial, &params, Some(&mut cache)).unwrap()
    };
    assert_eq!(first.len(), 4);
    for r in &first {
        let direct = ck_binomial(r.k, 64).unwrap();
        assert_eq!(
            r.value.to_decimal_strings().0,
            direct.value.to_decimal_strings().0,
            "k = {}",
            r.k
        );
        assert!(r.value.contains(&direct.value));
        assert!(
            r.error_bound <= direct.error_bound.mul(Mag::from_f64_up(1.01)),
            "k = {}",
            r.k
        );
    }
    let bytes = std::fs::read(&path).unwrap();
    let second = {
        let mut cache = CoefficientCache::open(&path).unwrap();
        ck_sweep(0..=3, Method::Binomial, &params, Some(&mut cache)).unwrap()
    };
    assert_eq!(std::fs::read(&path).unwrap(), bytes);
    for (a, b) in first.iter().zip(&second) {
        assert!(a.overlaps(b) && a.k == b.k);
    }
}

#[test]
fn sweep_thousand_against_mobius() {
    let recs = ck_sweep(0..=1000, Method::Binomial, &SweepParams::new(64), None).unwrap();
    assert_eq!(recs.len(), 1001);
    assert!(recs.iter().enumerate().all(|(i, r)| r.k == i as u64));
    let mu = sieve_mobius(1, 1_000_000, 1 << 18).unwrap();
    for i in 0..20u64 {
        let k = i * 50 + 7;
        let m = ck_mobius_from_table(k, &mu, 64, Kernel::Float).unwrap();
        assert!(recs[k as usize].overlaps(&m), "k = {k}");
    }
    // |c_k| ≤ q_k termwise.
    for r in recs.iter().step_by(25) {
        let q = qk(r.k, 100_000, 64).unwrap();
        assert!(r.interval().abs_lower() <= q.value.abs_upper(), "k = {}", r.k);
    }
}

#[test]
fn guard_bits_keep_value_inside() {
    for k in [10u64, 200, 1000] {
        let base = ck_binomial(k, 64).unwrap();
        let more = ck_binomial_with_guard(k, 64, 32).unwrap();
        assert!(base.interval().contains_mid_of(&more.value), "k = {k}");
        assert!(more.error_bound <= base.error_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn record_survives_json(k in 0u64..60, prec in 24u32..200) {
        let r = ck_binomial(k, prec).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: CoefficientRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.k, r.k);
        prop_assert_eq!(back.method, Method::Binomial);
        prop_assert!(back.interval().contains(&r.value));
        prop_assert!(back.error_bound >= r.error_bound);
    }

    #[test]
    fn cache_round_trip_keeps_error_above_radius(k in 0u64..40, prec in 24u32..160) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let r = ck_binomial(k, prec).unwrap();
        {
            let mut cache = CoefficientCache::open(&path).unwrap();
            cache.append(&r).unwrap();
        }
        let cache = CoefficientCache::open(&path).unwrap();
        let back = cache.lookup(k, Method::Binomial, None, prec).unwrap();
        prop_assert!(back.error_bound >= back.value.radius());
        prop_assert!(back.interval().contains(&r.value));
    }

    #[test]
    fn abs_bounded_by_qk(k in 0u64..400) {
        let c = ck_binomial(k, 64).unwrap();
        let q = qk(k, 20_000, 64).unwrap();
        prop_assert!(c.interval().abs_lower() <= q.value.abs_upper());
    }
}
