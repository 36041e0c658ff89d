//! Exponent fits, the scaled limit study and the beta-integral check.
//!
//! `log` is the natural logarithm throughout.

use std::fmt::Write as _;

use serde::Serialize;

use crate::coefficients::CoefficientRecord;
use crate::config::check_precision;
use crate::error::{Error, Result};
use crate::mp::{gamma_ratio, log_gamma, Mag, MpComplex, MpReal};

pub const LOG_BASE: &str = "natural";

#[derive(Clone, Debug, Serialize)]
pub struct FitPoint {
    pub k: u64,
    pub log_k: f64,
    pub log_abs_c: f64,
    pub leverage: f64,
    /// Leverage above `2p/n` with `p = 2` parameters.
    pub high_leverage: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub k_min: u64,
    pub k_max: u64,
    /// Exponent in `|c_k| ≈ C·k^{slope}`.
    pub slope: f64,
    /// `log C`.
    pub intercept: f64,
    pub residual_rms: f64,
    pub points: Vec<FitPoint>,
    /// Records in range that failed `error_bound < |value|/10` (or `k = 0`).
    pub excluded: Vec<u64>,
    /// `k` at which the sign of `c_k` differs from the previous admissible
    /// record.
    pub sign_changes: Vec<u64>,
    /// `max |c_k|·k^{1/2}` over admissible records, with its argmax.
    pub envelope_half: f64,
    pub envelope_argmax: u64,
    pub log_base: &'static str,
}

/// Least-squares slope of `log|c_k|` against `log k` over admissible records
/// with `k_min ≤ k ≤ k_max`.
pub fn exponent_fit(records: &[CoefficientRecord], k_min: u64, k_max: u64) -> Result<FitReport> {
    if k_min > k_max {
        return Err(Error::usage(format!("empty k range [{k_min}, {k_max}]")));
    }
    let mut sorted: Vec<&CoefficientRecord> = records.iter().filter(|r| (k_min..=k_max).contains(&r.k)).collect();
    sorted.sort_by_key(|r| r.k);
    let mut excluded = Vec::new();
    let mut admissible = Vec::new();
    for r in sorted {
        let tenth = r.value.mid_mag_down().div_down(Mag::from_u64(10));
        let ok = r.k >= 1 && !r.value.mid_is_zero() && r.error_bound.max(r.value.radius()) < tenth;
        if ok {
            admissible.push(r);
        } else {
            excluded.push(r.k);
        }
    }
    if admissible.len() < 10 {
        return Err(Error::usage(format!(
            "exponent_fit needs at least 10 admissible records in [{k_min}, {k_max}], found {}",
            admissible.len()
        )));
    }
    let xs: Vec<f64> = admissible.iter().map(|r| (r.k as f64).ln()).collect();
    let ys: Vec<f64> = admissible.iter().map(|r| r.value.ln_abs_mid_f64()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let threshold = 4.0 / n;
    let points = admissible
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(r, (&x, &y))| {
            let leverage = 1.0 / n + (x - mx).powi(2) / sxx;
            FitPoint {
                k: r.k,
                log_k: x,
                log_abs_c: y,
                leverage,
                high_leverage: leverage > threshold,
            }
        })
        .collect();
    let mut sign_changes = Vec::new();
    for w in admissible.windows(2) {
        if w[0].value.mid_sign() != w[1].value.mid_sign() {
            sign_changes.push(w[1].k);
        }
    }
    let (envelope_argmax, envelope_half) = admissible
        .iter()
        .map(|r| (r.k, (r.value.ln_abs_mid_f64() + 0.5 * (r.k as f64).ln()).exp()))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    Ok(FitReport {
        k_min,
        k_max,
        slope,
        intercept,
        residual_rms: (rss / n).sqrt(),
        points,
        excluded,
        sign_changes,
        envelope_half,
        envelope_argmax,
        log_base: LOG_BASE,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitStudyRow {
    pub k: u64,
    pub c_k: MpReal,
    /// `c_k·k^{3/4}·log²k`.
    pub scaled: MpReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitStudy {
    pub rows: Vec<LimitStudyRow>,
    /// RMS of the second differences of `scaled`.
    pub second_difference_rms: f64,
    pub log_base: &'static str,
}

impl LimitStudy {
    /// Columns `k,c_k,scaled` (midpoints as decimal strings).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,c_k,scaled\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{}",
                r.k,
                r.c_k.to_decimal_strings().0,
                r.scaled.to_decimal_strings().0
            );
        }
        out
    }
}

/// `k^{3/4}·log²k` at `prec` bits.
pub fn limit_scale(k: u64, prec: u32) -> MpReal {
    let l = MpReal::from_u64(k, prec).ln();
    l.mul(&MpReal::from_f64(0.75, prec)).exp().mul(&l.sqr())
}

/// The scaled sequence over contiguous `k ≥ 2` (records with `k < 2` are
/// ignored).
pub fn limit_study(records: &[CoefficientRecord]) -> Result<LimitStudy> {
    let mut sorted: Vec<&CoefficientRecord> = records.iter().filter(|r| r.k >= 2).collect();
    sorted.sort_by_key(|r| r.k);
    sorted.dedup_by_key(|r| r.k);
    if sorted.len() < 3 {
        return Err(Error::usage("limit_study needs at least three records with k ≥ 2"));
    }
    let gaps: Vec<u64> = sorted.windows(2).flat_map(|w| w[0].k + 1..w[1].k).take(20).collect();
    if !gaps.is_empty() {
        return Err(Error::usage(format!(
            "limit_study needs contiguous k; missing {}",
            gaps.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    let rows: Vec<LimitStudyRow> = sorted
        .iter()
        .map(|r| {
            let prec = r.value.prec();
            LimitStudyRow {
                k: r.k,
                scaled: r.value.mul(&limit_scale(r.k, prec + 16)).round(prec),
                c_k: r.value.clone(),
            }
        })
        .collect();
    let s: Vec<f64> = rows.iter().map(|r| r.scaled.to_f64()).collect();
    let d2: Vec<f64> = s.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    let second_difference_rms = (d2.iter().map(|d| d * d).sum::<f64>() / d2.len() as f64).sqrt();
    Ok(LimitStudy {
        rows,
        second_difference_rms,
        log_base: LOG_BASE,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaCandidate {
    /// `Γ((λ+1)/2)·Γ(k+1)/Γ(k+(λ+3)/2)`.
    Displayed,
    /// Half of the displayed constant.
    Half,
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaCheck {
    pub lambda: f64,
    pub k: u64,
    pub integral: MpReal,
    pub displayed: MpReal,
    pub half: MpReal,
    pub residual_displayed: f64,
    pub residual_half: f64,
    /// Relative tolerance the quadrature was run to.
    pub tolerance: f64,
    pub better: BetaCandidate,
}

/// Compares `∫_0^1 x^λ (1 − x²)^k dx` by quadrature with both constants.
pub fn beta_integral_check(lambda: f64, k: u64, precision: u32) -> Result<BetaCheck> {
    beta_integral_check_with(lambda, k, precision, 20, None)
}

/// [`beta_integral_check`] with an explicit Gauss–Legendre order and
/// relative tolerance (default `2^{−precision/2}`).
pub fn beta_integral_check_with(
    lambda: f64,
    k: u64,
    precision: u32,
    order: usize,
    tolerance: Option<f64>,
) -> Result<BetaCheck> {
    check_precision(precision)?;
    if lambda.is_nan() || lambda <= -1.0 || !lambda.is_finite() {
        return Err(Error::domain(format!(
            "beta integral requires finite λ > −1, got {lambda}"
        )));
    }
    if order < 2 {
        return Err(Error::usage("quadrature order must be at least 2"));
    }
    let tol = tolerance.unwrap_or_else(|| 2f64.powi(-((precision / 2) as i32)));
    let wp = precision + 24;
    let lam = MpReal::from_f64(lambda, wp);

    // (λ+1)/2 and k + (λ+3)/2
    let a = lam.add(&MpReal::one(wp)).mul_2exp(-1);
    let b = MpReal::from_u64(k + 1, wp).add(&a);
    let g = log_gamma(&MpComplex::from_real(a), wp)?.re.exp();
    let displayed = g.mul(&gamma_ratio(&MpReal::from_u64(k + 1, wp), &b, wp)?);
    let half = displayed.mul_2exp(-1);

    let one = MpReal::one(wp);
    let f = |x: &MpReal| -> MpReal {
        let xl = x.ln().mul(&lam).exp();
        xl.mul(&one.sub(&x.sqr()).pow_u64(k))
    };
    let rule = GaussLegendre::new(order, wp);
    let integral = rule.adaptive(&f, &MpReal::zero(wp), &one, tol);

    let residual_displayed = integral.sub(&displayed).abs_upper().to_f64();
    let residual_half = integral.sub(&half).abs_upper().to_f64();
    Ok(BetaCheck {
        lambda,
        k,
        integral: integral.round(precision),
        displayed: displayed.round(precision),
        half: half.round(precision),
        residual_displayed,
        residual_half,
        tolerance: tol,
        better: if residual_half < residual_displayed {
            BetaCandidate::Half
        } else {
            BetaCandidate::Displayed
        },
    })
}

/// `n`-point Gauss–Legendre nodes and weights on `[−1, 1]`.
struct GaussLegendre {
    nodes: Vec<(MpReal, MpReal)>,
    wp: u32,
}

impl GaussLegendre {
    fn new(n: usize, wp: u32) -> GaussLegendre {
        let mut nodes = Vec::with_capacity(n);
        let iterations = (wp as f64 / 50.0).log2().ceil().max(0.0) as usize + 3;
        for i in 0..n.div_ceil(2) {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = MpReal::from_f64(guess, wp);
            for _ in 0..iterations {
                let (p, d) = legendre(n, &x);
                x = x.sub(&p.div(&d)).mid();
            }
            let dp = legendre(n, &x).1.mid();
            let w = MpReal::from_u64(2, wp)
                .div(&MpReal::one(wp).sub(&x.sqr()).mul(&dp.sqr()))
                .mid();
            if 2 * i + 1 == n {
                nodes.push((MpReal::zero(wp), w));
            } else {
                nodes.push((x.neg(), w.clone()));
                nodes.push((x, w));
            }
        }
        GaussLegendre { nodes, wp }
    }

    fn apply(&self, f: &impl Fn(&MpReal) -> MpReal, a: &MpReal, b: &MpReal) -> MpReal {
        let half = b.sub(a).mul_2exp(-1);
        let mid = a.add(b).mul_2exp(-1);
        let mut sum = MpReal::zero(self.wp);
        for (x, w) in &self.nodes {
            sum = sum.add(&w.mul(&f(&mid.add(&half.mul(x)))));
        }
        sum.mul(&half).mid()
    }

    /// Bisects until the two-half estimate agrees with the whole-interval one
    /// to `tol` relative to the first whole-range estimate.
    fn adaptive(&self, f: &impl Fn(&MpReal) -> MpReal, a: &MpReal, b: &MpReal, tol: f64) -> MpReal {
        let whole = self.apply(f, a, b);
        let scale = whole.to_f64().abs().max(f64::MIN_POSITIVE);
        self.refine(f, a, b, whole, tol * scale, 0)
    }

    fn refine(
        &self,
        f: &impl Fn(&MpReal) -> MpReal,
        a: &MpReal,
        b: &MpReal,
        whole: MpReal,
        tol: f64,
        depth: u32,
    ) -> MpReal {
        let m = a.add(b).mul_2exp(-1).mid();
        let left = self.apply(f, a, &m);
        let right = self.apply(f, &m, b);
        let both = left.add(&right);
        let diff = both.sub(&whole).to_f64().abs();
        if diff <= tol || depth >= 60 {
            return both;
        }
        let l = self.refine(f, a, &m, left, tol / 2.0, depth + 1);
        let r = self.refine(f, &m, b, right, tol / 2.0, depth + 1);
        l.add(&r)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: &MpReal) -> (MpReal, MpReal) {
    let wp = x.prec();
    let mut p0 = MpReal::one(wp);
    let mut p1 = x.clone();
    for j in 2..=n as u64 {
        let p2 = x
            .mul(&p1)
            .mul_i64((2 * j - 1) as i64)
            .sub(&p0.mul_i64((j - 1) as i64))
            .div_u64(j);
        p0 = p1;
        p1 = p2;
    }
    // (1 − x²) P_n' = n (P_{n−1} − x P_n)
    let d = p0
        .sub(&x.mul(&p1))
        .mul_i64(n as i64)
        .div(&MpReal::one(wp).sub(&x.sqr()));
    (p1, d)
}
