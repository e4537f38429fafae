//! Distances `dist(q^n, Z)` for a Pisot number `q`, given by its monic
//! integer minimal polynomial.
//!
//! The power sums `t_n` of all roots are integers and satisfy the linear
//! recurrence of the polynomial. `q^n` itself is evaluated in binary fixed
//! point with enough guard bits that the distance keeps full relative
//! precision even when it is far below `f64` epsilon times `q^n`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

const ROOT_TOLERANCE: f64 = 1e-9;

/// Monic integer polynomial `x^d + c_1 x^(d-1) + ... + c_d`, leading coefficient first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PisotSpec {
    coeffs: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PisotRow {
    pub n: u32,
    /// Power sum of all roots.
    pub trace: BigInt,
    pub nearest: BigInt,
    pub distance: f64,
}

impl PisotSpec {
    pub fn new<I, T>(coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let coeffs: Vec<BigInt> = coeffs.into_iter().map(Into::into).collect();
        if coeffs.len() < 2 {
            return Err(Error::NotPisot("degree must be at least 1".into()));
        }
        if !coeffs[0].is_one() {
            return Err(Error::NotPisot("polynomial must be monic".into()));
        }
        Ok(PisotSpec { coeffs })
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn float_coeffs(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// All complex roots (Durand–Kerner iteration).
    pub fn roots(&self) -> Vec<Complex64> {
        let c = self.float_coeffs();
        let d = self.degree();
        if d == 1 {
            return vec![Complex64::new(-c[1], 0.0)];
        }
        let eval = |z: Complex64| c.iter().fold(Complex64::zero(), |acc, &a| acc * z + a);
        let radius = 1.0 + c[1..].iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let seed = Complex64::new(0.4, 0.9);
        let mut roots: Vec<Complex64> = (0..d)
            .map(|k| seed.powu(k as u32) * radius.min(2.0))
            .collect();
        for _ in 0..2000 {
            let mut change = 0.0f64;
            for k in 0..d {
                let z = roots[k];
                let denom = (0..d)
                    .filter(|&j| j != k)
                    .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z - roots[j]));
                if denom.norm() == 0.0 {
                    roots[k] = z + Complex64::new(1e-8, 1e-8);
                    change = f64::INFINITY;
                    continue;
                }
                let step = eval(z) / denom;
                roots[k] = z - step;
                change = change.max(step.norm());
            }
            if change < 1e-15 {
                break;
            }
        }
        roots
    }

    /// The dominant root after checking the Pisot conditions.
    pub fn check(&self) -> Result<f64> {
        let mut roots = self.roots();
        roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let top = roots[0];
        if top.im.abs() > ROOT_TOLERANCE * top.re.abs().max(1.0) || top.re <= 1.0 {
            return Err(Error::NotPisot(format!(
                "dominant root {top} is not real and > 1"
            )));
        }
        if let Some(bad) = roots[1..].iter().find(|z| z.norm() > 1.0 - ROOT_TOLERANCE) {
            return Err(Error::NotPisot(format!("conjugate {bad} has modulus >= 1")));
        }
        Ok(top.re)
    }

    /// Conjugates of the dominant root.
    pub fn conjugates(&self) -> Vec<Complex64> {
        let mut roots = self.roots();
        roots.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        roots.remove(0);
        roots
    }

    /// Power sums `t_0 .. t_{n_max}` from Newton's identities.
    pub fn traces(&self, n_max: u32) -> Vec<BigInt> {
        let d = self.degree();
        let c = &self.coeffs;
        let mut t: Vec<BigInt> = Vec::with_capacity(n_max as usize + 1);
        t.push(BigInt::from(d));
        for k in 1..=n_max as usize {
            let mut acc = BigInt::zero();
            for i in 1..=k.min(d) {
                if i < k {
                    acc += &c[i] * &t[k - i];
                } else {
                    acc += &c[i] * BigInt::from(k);
                }
            }
            t.push(-acc);
        }
        t
    }

    fn eval_exact(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, a| acc * x + a)
    }

    /// `p(x)` at the fixed-point value `x / 2^bits`, scaled by `2^bits`.
    fn eval_fixed(&self, x: &BigInt, bits: u32) -> BigInt {
        let one = BigInt::one() << bits;
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, a| ((acc * x) >> bits) + a * &one)
    }

    /// Dominant root scaled by `2^bits`, accurate to a few units in the last place.
    fn dominant_root_fixed(&self, approx: f64, bits: u32) -> Result<BigInt> {
        let rounded = BigInt::from(libm::round(approx) as i64);
        if self.eval_exact(&rounded).is_zero() {
            return Ok(rounded << bits);
        }
        let to_fixed = |v: f64| {
            let mantissa = BigInt::from(libm::ldexp(v, 60) as i128);
            if bits >= 60 {
                mantissa << (bits - 60)
            } else {
                mantissa >> (60 - bits)
            }
        };
        let delta = 1e-6 * approx.abs().max(1.0);
        let mut lo = to_fixed(approx - delta);
        let mut hi = to_fixed(approx + delta);
        let lo_sign = self.eval_fixed(&lo, bits).signum();
        let hi_sign = self.eval_fixed(&hi, bits).signum();
        if lo_sign == hi_sign {
            return Err(Error::NotPisot(
                "could not bracket the dominant root".into(),
            ));
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            let sign = self.eval_fixed(&mid, bits).signum();
            if sign.is_zero() {
                return Ok(mid);
            }
            if sign == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

/// `|v| / 2^bits` as a float without overflowing on large `bits`.
fn fixed_to_f64(v: &BigInt, bits: u32) -> f64 {
    let v = v.abs();
    let shift = v.bits().saturating_sub(62);
    let top = (v >> shift).to_f64().unwrap_or(f64::INFINITY);
    libm::ldexp(top, shift as i32 - bits as i32)
}

/// `dist(q^n, Z)` for `n = 0..=n_max`.
pub fn pisot_distance(spec: &PisotSpec, n_max: u32) -> Result<Vec<PisotRow>> {
    let approx = spec.check()?;
    let root_bits = 2 + libm::ceil(libm::log2(approx.max(1.0))) as u32;
    let bits = 128 + n_max * root_bits;
    let root = spec.dominant_root_fixed(approx, bits)?;
    let traces = spec.traces(n_max);
    let half = BigInt::one() << (bits - 1);
    let mut power = BigInt::one() << bits;
    let mut rows = Vec::with_capacity(n_max as usize + 1);
    for (n, trace) in (0..=n_max).zip(traces) {
        if n > 0 {
            power = (&power * &root) >> bits;
        }
        let nearest: BigInt = (&power + &half) >> bits;
        let frac = &power - (&nearest << bits);
        rows.push(PisotRow {
            n,
            trace,
            nearest,
            distance: fixed_to_f64(&frac, bits),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn silver() -> PisotSpec {
        PisotSpec::new([1, -2, -1]).unwrap()
    }

    #[test]
    fn silver_ratio_distances() {
        let rows = pisot_distance(&silver(), 10).unwrap();
        let conj = core::f64::consts::SQRT_2 - 1.0;
        assert!((rows[1].distance - conj).abs() < 1e-12);
        assert!((rows[10].distance - conj.powi(10)).abs() < 1e-12 * conj.powi(10));
        assert_eq!(rows[0].distance, 0.0);
        assert!((rows[10].distance - 1.4868e-4).abs() < 1e-8);
    }

    #[test]
    fn integer_root_is_exact() {
        let rows = pisot_distance(&PisotSpec::new([1, -3]).unwrap(), 12).unwrap();
        for row in rows {
            assert_eq!(row.distance, 0.0);
            assert_eq!(row.nearest, BigInt::from(3).pow(row.n));
            assert_eq!(row.trace, row.nearest);
        }
    }

    #[test]
    fn traces_follow_the_recurrence() {
        let t = silver().traces(6);
        let expected: Vec<BigInt> = [2, 2, 6, 14, 34, 82, 198]
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        assert_eq!(t, expected);
    }

    #[test]
    fn rejects_non_pisot() {
        assert!(matches!(
            PisotSpec::new([1, 0, -2]).unwrap().check(),
            Err(Error::NotPisot(_))
        ));
        assert!(matches!(
            PisotSpec::new([1, 0, 1]).unwrap().check(),
            Err(Error::NotPisot(_))
        ));
        assert!(matches!(PisotSpec::new([2, -3]), Err(Error::NotPisot(_))));
        // golden ratio and the plastic number pass
        assert!(PisotSpec::new([1, -1, -1]).unwrap().check().is_ok());
        assert!(PisotSpec::new([1, 0, -1, -1]).unwrap().check().is_ok());
    }
}
