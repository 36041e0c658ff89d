use ckzeta::mp::{gamma_ratio, log_gamma, pi_const, Mag, MpComplex, MpReal};
use proptest::prelude::*;

// π to 50 decimals, transcribed from a published table.
const PI_50: &str = "3.14159265358979323846264338327950288419716939937510";

fn real(x: f64, prec: u32) -> MpReal {
    MpReal::from_f64(x, prec)
}

#[test]
fn pi_matches_published_digits() {
    let p = pi_const(64).unwrap();
    let reference = MpReal::parse_decimal(PI_50, "1e-50", 200).unwrap();
    assert!(p.overlaps(&reference));
    assert!(p.radius() <= Mag::pow2(-60));
    let p32 = pi_const(32).unwrap();
    assert_eq!(p32.floor_mid(), 3.into());
}

#[test]
fn log_gamma_examples() {
    let one = MpComplex::from_f64(1.0, 0.0, 64);
    assert!(log_gamma(&one, 64).unwrap().contains_zero());

    let half = MpComplex::from_f64(0.5, 0.0, 96);
    let lg = log_gamma(&half, 96).unwrap();
    let ln_sqrt_pi = pi_const(96).unwrap().sqrt().ln();
    assert!(lg.re.overlaps(&ln_sqrt_pi));
    assert!((lg.re.to_f64() - 0.5723649429247001).abs() < 1e-15);

    let six = MpComplex::from_f64(6.0, 0.0, 64);
    let g = log_gamma(&six, 64).unwrap().exp();
    assert!(g.re.overlaps(&MpReal::from_u64(120, 64)));
}

#[test]
fn gamma_ratio_examples() {
    let r = gamma_ratio(&MpReal::from_u64(2, 64), &MpReal::from_u64(1, 64), 64).unwrap();
    assert!(r.overlaps(&MpReal::one(64)));
    let r = gamma_ratio(&MpReal::from_u64(6, 64), &MpReal::from_u64(4, 64), 64).unwrap();
    assert!(r.overlaps(&MpReal::from_u64(20, 64)));
}

/// Γ(k+1)/Γ(k+3/2) = Γ(1)/Γ(3/2) · Π_{j=1}^{k} j/(j + 1/2).
fn ratio_by_product(k: u64) -> f64 {
    let mut r = 2.0 / std::f64::consts::PI.sqrt();
    for j in 1..=k {
        r *= j as f64 / (j as f64 + 0.5);
    }
    r
}

#[test]
fn gamma_ratio_half_shift_against_product() {
    for k in [0u64, 1, 5, 40, 1000] {
        let a = MpReal::from_u64(k + 1, 64);
        let b = MpReal::from_u64(2 * k + 3, 64).mul_2exp(-1);
        let r = gamma_ratio(&a, &b, 64).unwrap().to_f64();
        let p = ratio_by_product(k);
        assert!((r - p).abs() <= 1e-12 * p, "k = {k}: {r} vs {p}");
    }
    let k = 10_000u64;
    let a = MpReal::from_u64(k + 1, 64);
    let b = MpReal::from_u64(2 * k + 3, 64).mul_2exp(-1);
    let scaled = gamma_ratio(&a, &b, 64).unwrap().to_f64() * (k as f64).sqrt();
    assert!((scaled - 1.0).abs() < 1e-3, "{scaled}");
    assert!((scaled - ratio_by_product(k) * (k as f64).sqrt()).abs() < 1e-9);
}

#[test]
fn decimal_round_trip_contains_original() {
    for x in [0.1, -2.5e-30, 12345.678, 1.0 / 3.0] {
        let b = real(x, 128).div(&MpReal::from_u64(7, 128));
        let (v, r) = b.to_decimal_strings();
        let back = MpReal::parse_decimal(&v, &r, 128).unwrap();
        assert!(back.contains(&b), "{x}");
    }
}

fn arb_positive() -> impl Strategy<Value = f64> {
    (1e-3f64..1e3).prop_map(|x| x)
}

fn arb_any() -> impl Strategy<Value = f64> {
    -50.0f64..50.0
}

/// The operations under test, as functions of (x, y) at a given precision.
fn ops(x: &MpReal, y: &MpReal) -> Vec<MpReal> {
    vec![
        x.add(y),
        x.sub(y),
        x.mul(y),
        x.div(y),
        x.sqrt(),
        x.ln(),
        y.exp(),
        y.atan(),
        y.sin_cos().0,
        y.sin_cos().1,
    ]
}

/// Inputs as balls with a small radius so the radius path is exercised too.
fn ball(v: f64, prec: u32) -> MpReal {
    MpReal::from_f64(v, prec).add_error(Mag::pow2(-200))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn precision_doubling_overlaps(x in arb_positive(), y in arb_any(), p in 24u32..160) {
        let lo = ops(&ball(x, p), &ball(y, p));
        let hi = ops(&ball(x, 2 * p), &ball(y, 2 * p));
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            prop_assert!(a.overlaps(b), "op {} at p = {}: {} vs {}", i, p, a, b);
        }
    }

    #[test]
    fn radii_do_not_grow_with_precision(x in arb_positive(), y in arb_any(), p in 24u32..120) {
        let xa = MpReal::from_f64(x, 2 * p);
        let ya = MpReal::from_f64(y, 2 * p);
        let lo = ops(&xa.with_prec(p), &ya.with_prec(p));
        let hi = ops(&xa, &ya);
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            // One ulp of slack at the lower precision.
            let ulp = a.abs_upper().mul_2exp(1 - p as i64);
            prop_assert!(b.radius() <= a.radius().add(ulp), "op {} at p = {}", i, p);
        }
    }

    #[test]
    fn log_gamma_precision_doubling(re in 0.1f64..40.0, im in -30.0f64..30.0, p in 32u32..128) {
        let a = log_gamma(&MpComplex::from_f64(re, im, p), p).unwrap();
        let b = log_gamma(&MpComplex::from_f64(re, im, 2 * p), 2 * p).unwrap();
        prop_assert!(a.overlaps(&b));
    }

    #[test]
    fn log_gamma_recurrence(re in 0.2f64..20.0, im in -20.0f64..20.0) {
        // log Γ(z + 1) − log Γ(z) = log z, up to a multiple of 2πi.
        let z = MpComplex::from_f64(re, im, 96);
        let d = log_gamma(&z.add_real(&MpReal::one(96)), 96).unwrap().sub(&log_gamma(&z, 96).unwrap());
        let l = z.ln();
        prop_assert!(d.re.overlaps(&l.re));
        let turns = d.im.sub(&l.im).to_f64() / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-12);
    }
}
