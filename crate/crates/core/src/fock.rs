//! Multiplicity calculus on finite pure-point spectra.
//!
//! A [`RotationMultiset`] records eigenvalues `e^{2πiθ}` by their rotation
//! numbers `θ ∈ [0, 1)` with multiplicities. Direct sums add multiplicities,
//! tensor products add rotation numbers, and symmetric powers add them over
//! multisets of basis vectors, which is enough to follow how multiplicity
//! sets behave under `exp(U) = ⊕_n U^{⊙n}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ratio;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RotationMultiset {
    entries: BTreeMap<BigRational, BigUint>,
}

impl RotationMultiset {
    pub fn empty() -> Self {
        RotationMultiset::default()
    }

    /// `{0: 1}`, the identity on constants.
    pub fn trivial() -> Self {
        let mut m = RotationMultiset::empty();
        m.insert(BigRational::zero(), BigUint::one());
        m
    }

    /// Adds `count` to the multiplicity of `θ mod 1`.
    pub fn insert(&mut self, theta: BigRational, count: BigUint) {
        if count.is_zero() {
            return;
        }
        *self.entries.entry(ratio::fract(&theta)).or_default() += count;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigRational, &BigUint)> {
        self.entries.iter()
    }

    pub fn multiplicity(&self, theta: &BigRational) -> BigUint {
        self.entries
            .get(&ratio::fract(theta))
            .cloned()
            .unwrap_or_default()
    }

    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    /// Total dimension `N`.
    pub fn dim(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn max_multiplicity(&self) -> BigUint {
        self.entries.values().max().cloned().unwrap_or_default()
    }
}

impl FromIterator<(BigRational, BigUint)> for RotationMultiset {
    fn from_iter<I: IntoIterator<Item = (BigRational, BigUint)>>(iter: I) -> Self {
        let mut m = RotationMultiset::empty();
        for (theta, count) in iter {
            m.insert(theta, count);
        }
        m
    }
}

/// `{k/h : k = 0..h}`, each once: the spectrum of a cyclic permutation of `h` levels.
pub fn cyclic_spectrum(h: u64) -> RotationMultiset {
    assert!(h >= 1, "cyclic spectrum needs h >= 1");
    (0..h)
        .map(|k| {
            (
                BigRational::new(BigInt::from(k), BigInt::from(h)),
                BigUint::one(),
            )
        })
        .collect()
}

/// Direct sum of `m` copies.
pub fn scale_copies(spectrum: &RotationMultiset, m: u64) -> RotationMultiset {
    let factor = BigUint::from(m);
    spectrum
        .iter()
        .map(|(t, c)| (t.clone(), c * &factor))
        .collect()
}

pub fn direct_sum(left: &RotationMultiset, right: &RotationMultiset) -> RotationMultiset {
    left.iter()
        .chain(right.iter())
        .map(|(t, c)| (t.clone(), c.clone()))
        .collect()
}

pub fn tensor(left: &RotationMultiset, right: &RotationMultiset) -> RotationMultiset {
    let mut out = RotationMultiset::empty();
    for (a, ca) in left.iter() {
        for (b, cb) in right.iter() {
            out.insert(a + b, ca * cb);
        }
    }
    out
}

/// `C(n + k - 1, k)`: ways to pick `k` vectors with repetition from `n`.
fn multichoose(n: &BigUint, k: u32) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n + BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Symmetric power `U^{⊙d}`.
///
/// Built one distinct rotation number at a time: taking `k` vectors from an
/// eigenspace of dimension `c` contributes `C(c + k - 1, k)` basis vectors
/// with rotation `kθ`.
pub fn sym_power(spectrum: &RotationMultiset, degree: u32) -> RotationMultiset {
    // layers[d] holds the partial symmetric power of degree d
    let mut layers: Vec<RotationMultiset> = (0..=degree)
        .map(|d| {
            if d == 0 {
                RotationMultiset::trivial()
            } else {
                RotationMultiset::empty()
            }
        })
        .collect();
    for (theta, count) in spectrum.iter() {
        let mut next: Vec<RotationMultiset> =
            alloc::vec![RotationMultiset::empty(); degree as usize + 1];
        for (d, layer) in layers.iter().enumerate() {
            for k in 0..=(degree - d as u32) {
                let ways = multichoose(count, k);
                let shift = theta * BigRational::from_integer(BigInt::from(k));
                let target = &mut next[d + k as usize];
                for (phi, c) in layer.iter() {
                    target.insert(phi + &shift, c * &ways);
                }
            }
        }
        layers = next;
    }
    layers.pop().unwrap_or_default()
}

/// `⊕_{d=0}^{D} U^{⊙d}`.
pub fn exp_truncated(spectrum: &RotationMultiset, max_degree: u32) -> RotationMultiset {
    (0..=max_degree).fold(RotationMultiset::empty(), |acc, d| {
        direct_sum(&acc, &sym_power(spectrum, d))
    })
}

/// Distinct multiplicity values, optionally ignoring rotation number 0.
pub fn multiplicity_set(spectrum: &RotationMultiset, exclude_zero: bool) -> BTreeSet<BigUint> {
    spectrum
        .iter()
        .filter(|(t, _)| !(exclude_zero && t.is_zero()))
        .map(|(_, c)| c.clone())
        .collect()
}
