//! Number theory behind the weak-limit arguments: the times `n_i` with
//! `q n_i = p^i + s`, collisions between `{m p^j}` and `{n p^i + s}`, and
//! distances from powers of a Pisot number to the integers.

mod pisot;

pub use pisot::{pisot_distance, PisotRow, PisotSpec};

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::{Error, Result};

/// Division of `q n = p^i + s` by `p^k` when `s = p^k s'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub power: u32,
    pub exponent: u32,
    pub n: BigInt,
    pub s: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakLimitEntry {
    pub i: u32,
    pub n: BigInt,
    /// Least nonnegative residue of `-p^i` modulo `q`.
    pub s: u64,
    pub reduction: Option<Reduction>,
}

impl WeakLimitEntry {
    /// `(exponent, n, s)` after removing powers of `p` from `s`.
    pub fn reduced(&self) -> (u32, &BigInt, u64) {
        match &self.reduction {
            Some(r) => (r.exponent, &r.n, r.s),
            None => (self.i, &self.n, self.s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakLimitTimes {
    pub q: u64,
    pub p: u64,
    pub entries: Vec<WeakLimitEntry>,
}

/// `s_i = (-p^i) mod q` and `n_i = (p^i + s_i) / q` for `i = 1..=i_max`.
pub fn weak_limit_times(q: u64, p: u64, i_max: u32) -> Result<WeakLimitTimes> {
    if q == 0 || p < 2 {
        return Err(Error::InvalidParams("need q >= 1 and p >= 2".into()));
    }
    if q.gcd(&p) != 1 {
        return Err(Error::NotCoprime { q, p });
    }
    let big_q = BigInt::from(q);
    let big_p = BigInt::from(p);
    let mut entries = Vec::with_capacity(i_max as usize);
    let mut power = BigInt::from(1u32);
    for i in 1..=i_max {
        power *= &big_p;
        let s = (-&power).mod_floor(&big_q);
        let n = (&power + &s) / &big_q;
        let s = s.to_u64().expect("residue below q");
        let reduction = (s != 0 && s % p == 0).then(|| {
            let mut k = 0;
            let mut rest = s;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            let scale = num_traits::pow(big_p.clone(), k as usize);
            // q and p are coprime, so p^k divides n.
            Reduction {
                power: k,
                exponent: i - k,
                n: &n / scale,
                s: rest,
            }
        });
        entries.push(WeakLimitEntry { i, n, s, reduction });
    }
    Ok(WeakLimitTimes { q, p, entries })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionReport {
    pub bound: u32,
    /// Pairs `(j, i)` with `m p^j = n p^i + s`, sorted.
    pub collisions: Vec<(u32, u32)>,
    /// No collision uses an exponent in the upper half of the range.
    pub settled: bool,
}

/// Exhaustive search for `m p^j = n p^i + s` with `0 <= i, j <= bound`.
pub fn intersection_finite(m: u64, n: u64, s: i64, p: u64, bound: u32) -> Result<CollisionReport> {
    if m == 0 || n == 0 || p < 2 {
        return Err(Error::InvalidParams("need m, n >= 1 and p >= 2".into()));
    }
    let big_p = BigInt::from(p);
    let powers: Vec<BigInt> = (0..=bound)
        .scan(BigInt::from(1u32), |acc, _| {
            let current = acc.clone();
            *acc *= &big_p;
            Some(current)
        })
        .collect();
    let mut right: Vec<(BigInt, u32)> = powers
        .iter()
        .zip(0..)
        .map(|(pw, i)| (BigInt::from(n) * pw + BigInt::from(s), i))
        .collect();
    right.sort();
    let mut collisions = Vec::new();
    for (pw, j) in powers.iter().zip(0..) {
        let value = BigInt::from(m) * pw;
        let start = right.partition_point(|(v, _)| *v < value);
        collisions.extend(
            right[start..]
                .iter()
                .take_while(|(v, _)| *v == value)
                .map(|&(_, i)| (j, i)),
        );
    }
    collisions.sort_unstable();
    let half = bound / 2;
    let settled = collisions.iter().all(|&(j, i)| j <= half && i <= half);
    Ok(CollisionReport {
        bound,
        collisions,
        settled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn times_examples() {
        let t = weak_limit_times(3, 8, 3).unwrap();
        let raw: Vec<(u32, BigInt, u64)> =
            t.entries.iter().map(|e| (e.i, e.n.clone(), e.s)).collect();
        assert_eq!(
            raw,
            vec![
                (1, BigInt::from(3), 1),
                (2, BigInt::from(22), 2),
                (3, BigInt::from(171), 1)
            ]
        );
        let t = weak_limit_times(1, 8, 2).unwrap();
        let raw: Vec<(u32, BigInt, u64)> =
            t.entries.iter().map(|e| (e.i, e.n.clone(), e.s)).collect();
        assert_eq!(raw, vec![(1, BigInt::from(8), 0), (2, BigInt::from(64), 0)]);
        assert_eq!(
            weak_limit_times(2, 8, 3),
            Err(Error::NotCoprime { q: 2, p: 8 })
        );
    }

    #[test]
    fn times_reduce_powers_of_p() {
        // 9 n = 2^i + s; s = 2 or 4 or 8 gets divided down.
        let t = weak_limit_times(9, 2, 12).unwrap();
        for e in &t.entries {
            let lhs = BigInt::from(9) * &e.n;
            assert_eq!(lhs, BigInt::from(2).pow(e.i) + BigInt::from(e.s));
            let (exp, n, s) = e.reduced();
            assert_eq!(
                BigInt::from(9) * n,
                BigInt::from(2).pow(exp) + BigInt::from(s)
            );
            if s != 0 {
                assert_ne!(s % 2, 0);
            }
        }
        assert!(t.entries.iter().any(|e| e.reduction.is_some()));
    }

    #[test]
    fn collision_examples() {
        let same = intersection_finite(1, 1, 0, 8, 5).unwrap();
        assert_eq!(same.collisions, (0..=5).map(|k| (k, k)).collect::<Vec<_>>());
        assert!(intersection_finite(3, 5, 2, 8, 20)
            .unwrap()
            .collisions
            .is_empty());
        let one = intersection_finite(1, 1, 7, 8, 20).unwrap();
        assert_eq!(one.collisions, vec![(1, 0)]);
        assert!(one.settled);
    }
}
