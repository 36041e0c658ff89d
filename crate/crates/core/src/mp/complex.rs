//! Rectangular complex balls.

use std::fmt;

use num_bigint::Sign;
use serde::{Deserialize, Serialize};

use super::consts::pi;
use super::mag::Mag;
use super::real::MpReal;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MpComplex {
    pub re: MpReal,
    pub im: MpReal,
}

impl MpComplex {
    pub fn new(re: MpReal, im: MpReal) -> MpComplex {
        MpComplex { re, im }
    }

    pub fn from_real(re: MpReal) -> MpComplex {
        let prec = re.prec();
        MpComplex {
            re,
            im: MpReal::zero(prec),
        }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> MpComplex {
        MpComplex::new(MpReal::from_f64(re, prec), MpReal::from_f64(im, prec))
    }

    pub fn zero(prec: u32) -> MpComplex {
        MpComplex::from_real(MpReal::zero(prec))
    }

    pub fn one(prec: u32) -> MpComplex {
        MpComplex::from_real(MpReal::one(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn round(&self, prec: u32) -> MpComplex {
        MpComplex::new(self.re.round(prec), self.im.round(prec))
    }

    pub fn with_prec(&self, prec: u32) -> MpComplex {
        self.round(prec)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, other: &MpComplex) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    /// Larger of the two component radii.
    pub fn radius(&self) -> Mag {
        self.re.radius().max(self.im.radius())
    }

    pub fn add_error(self, err: Mag) -> MpComplex {
        MpComplex::new(self.re.add_error(err), self.im.add_error(err))
    }

    pub fn neg(&self) -> MpComplex {
        MpComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> MpComplex {
        MpComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn add(&self, other: &MpComplex) -> MpComplex {
        MpComplex::new(self.re.add(&other.re), self.im.add(&other.im))
    }

    pub fn sub(&self, other: &MpComplex) -> MpComplex {
        MpComplex::new(self.re.sub(&other.re), self.im.sub(&other.im))
    }

    pub fn add_real(&self, x: &MpReal) -> MpComplex {
        MpComplex::new(self.re.add(x), self.im.clone())
    }

    pub fn mul(&self, other: &MpComplex) -> MpComplex {
        if other.im.is_zero() {
            return self.mul_real(&other.re);
        }
        if self.im.is_zero() {
            return other.mul_real(&self.re);
        }
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        MpComplex::new(re, im)
    }

    pub fn mul_real(&self, x: &MpReal) -> MpComplex {
        MpComplex::new(self.re.mul(x), self.im.mul(x))
    }

    pub fn sqr(&self) -> MpComplex {
        self.mul(self)
    }

    pub fn mul_2exp(&self, e: i64) -> MpComplex {
        MpComplex::new(self.re.mul_2exp(e), self.im.mul_2exp(e))
    }

    pub fn div_u64(&self, n: u64) -> MpComplex {
        MpComplex::new(self.re.div_u64(n), self.im.div_u64(n))
    }

    /// `|z|²` as a real ball.
    pub fn norm_sqr(&self) -> MpReal {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> MpReal {
        if self.im.is_zero() {
            return self.re.abs();
        }
        self.norm_sqr().sqrt()
    }

    /// Upper bound of `|z|` over the box.
    pub fn abs_upper(&self) -> Mag {
        let a = self.re.abs_upper();
        let b = self.im.abs_upper();
        a.mul(a).add(b.mul(b)).sqrt()
    }

    /// Lower bound of `|z|` over the box.
    pub fn abs_lower(&self) -> Mag {
        let a = self.re.abs_lower();
        let b = self.im.abs_lower();
        a.mul_down(a).add_down(b.mul_down(b)).sqrt_down()
    }

    pub fn recip(&self) -> MpComplex {
        if self.im.is_zero() {
            return MpComplex::from_real(self.re.recip()).round(self.prec());
        }
        let d = self.norm_sqr();
        MpComplex::new(self.re.div(&d), self.im.neg().div(&d))
    }

    pub fn div(&self, other: &MpComplex) -> MpComplex {
        if other.im.is_zero() {
            return MpComplex::new(self.re.div(&other.re), self.im.div(&other.re));
        }
        self.mul(&other.recip())
    }

    pub fn exp(&self) -> MpComplex {
        let r = self.re.exp();
        if self.im.is_zero() {
            return MpComplex::from_real(r).round(self.prec());
        }
        let (s, c) = self.im.sin_cos();
        MpComplex::new(r.mul(&c), r.mul(&s))
    }

    /// Principal argument in (−π, π]. A box straddling the negative real
    /// axis (other than exactly on it) gets an unbounded radius.
    pub fn arg(&self) -> MpReal {
        let prec = self.prec();
        let x = &self.re;
        let y = &self.im;
        if y.is_zero() {
            if x.is_positive() {
                return MpReal::zero(prec);
            }
            if x.is_negative() {
                return pi(prec);
            }
            return MpReal::from_radius(Mag::INF, prec);
        }
        if x.is_positive() {
            return y.div(x).atan();
        }
        if !y.contains_zero() {
            let half_pi = pi(prec + 8).mul_2exp(-1);
            let base = x.div(y).atan();
            return if y.is_positive() {
                half_pi.sub(&base)
            } else {
                half_pi.neg().sub(&base)
            }
            .round(prec);
        }
        // Straddles the branch cut or the origin.
        MpReal::from_radius(Mag::INF, prec)
    }

    /// Principal logarithm `ln|z| + i·arg z`.
    pub fn ln(&self) -> MpComplex {
        if self.im.is_zero() && self.re.is_positive() {
            return MpComplex::from_real(self.re.ln());
        }
        let re = self.norm_sqr().ln().mul_2exp(-1);
        MpComplex::new(re, self.arg())
    }

    /// Principal power `exp(w·ln z)`.
    pub fn pow(&self, w: &MpComplex) -> MpComplex {
        w.mul(&self.ln()).exp()
    }

    /// Approximate value as a pair of doubles.
    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Sign of the imaginary midpoint (used when choosing branches).
    pub fn im_sign(&self) -> Sign {
        self.im.mid_sign()
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}
