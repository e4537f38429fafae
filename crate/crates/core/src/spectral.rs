//! Spectral diagnostics built from exact correlation sequences.
//!
//! The correlations `a_n = mu(T^n A ∩ B)` are the Fourier coefficients of
//! the (cross) spectral measure. From them this module detects weak limits
//! of the form `2^-m T^q`, synthesizes Fejér densities and measures how a
//! density responds to rotations by `p`-power roots of unity.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ratio;
use crate::tower::{LevelSet, SelfSimilarParams};
use crate::{Error, Result};

/// Exact `a_0 .. a_{n_max}` for one pair of sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationSeq {
    pub params: SelfSimilarParams,
    pub set_a: LevelSet,
    pub set_b: LevelSet,
    pub values: Vec<BigRational>,
}

impl CorrelationSeq {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_autocorrelation(&self) -> bool {
        self.params
            .same_set(&self.set_a, &self.set_b)
            .unwrap_or(false)
    }
}

/// Exact correlations for `n = 0..=n_max`.
///
/// Both sets are written at one stage `K` where `T^n` moves every level of
/// `A` without lifting for all `n <= n_max`; then `a_n` is `w_K` times the
/// number of pairs `(a, b) ∈ A × B` with `b - a = n`.
pub fn correlation_sequence(
    params: &SelfSimilarParams,
    a: &LevelSet,
    b: &LevelSet,
    n_max: usize,
    cap: u32,
) -> Result<CorrelationSeq> {
    params.validate_set(a)?;
    params.validate_set(b)?;
    let reach = params.translate_set(a, n_max, cap)?.stage().max(b.stage());
    let left = params.refine_set(a, reach)?;
    let right = params.refine_set(b, reach)?;
    let mut counts = vec![0u64; n_max + 1];
    let targets = right.indices();
    for level in left.indices() {
        let start = targets.partition_point(|t| t < level);
        for t in &targets[start..] {
            match (t - level).to_usize() {
                Some(d) if d <= n_max => counts[d] += 1,
                _ => break,
            }
        }
    }
    let width = params.width(reach);
    let values = counts
        .into_iter()
        .map(|c| &width * BigRational::from_integer(BigInt::from(c)))
        .collect();
    Ok(CorrelationSeq {
        params: params.clone(),
        set_a: a.clone(),
        set_b: b.clone(),
        values,
    })
}

/// Pointwise product `c_n = a_n * b_n`: the correlation of the product set
/// under the product action.
pub fn tensor_correlation(left: &[BigRational], right: &[BigRational]) -> Result<Vec<BigRational>> {
    if left.len() != right.len() {
        return Err(Error::LengthMismatch {
            left: left.len(),
            right: right.len(),
        });
    }
    Ok(left.iter().zip(right).map(|(a, b)| a * b).collect())
}

/// Anything that can report `mu(T^n A_k ∩ B_k)` for a fixed list of pairs.
pub trait CorrelationSource {
    fn pair_count(&self) -> usize;
    fn correlation(&self, pair: usize, n: i64) -> Result<BigRational>;
}

/// Pairs of level sets of one tower.
#[derive(Debug, Clone)]
pub struct TowerPairs<'a> {
    pub params: &'a SelfSimilarParams,
    pub pairs: &'a [(LevelSet, LevelSet)],
    pub stage_cap: u32,
}

impl CorrelationSource for TowerPairs<'_> {
    fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    fn correlation(&self, pair: usize, n: i64) -> Result<BigRational> {
        let (a, b) = &self.pairs[pair];
        self.params.correlation(a, b, n, self.stage_cap)
    }
}

/// Product sets `A_k × A'_k` under the product of two actions; pair `k`
/// combines pair `k` of each side.
#[derive(Debug, Clone)]
pub struct TensorPairs<L, R> {
    pub left: L,
    pub right: R,
}

impl<L: CorrelationSource, R: CorrelationSource> CorrelationSource for TensorPairs<L, R> {
    fn pair_count(&self) -> usize {
        self.left.pair_count().min(self.right.pair_count())
    }

    fn correlation(&self, pair: usize, n: i64) -> Result<BigRational> {
        Ok(self.left.correlation(pair, n)? * self.right.correlation(pair, n)?)
    }
}

/// Best match `a_n ≈ 2^-m a_q` at one time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakLimitHit {
    pub time: i64,
    pub exponent: u32,
    pub shift: i64,
    /// Largest residual over the test pairs.
    pub residual: BigRational,
    pub pair_residuals: Vec<BigRational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanReport {
    pub hits: Vec<WeakLimitHit>,
    /// Times at which every test correlation vanishes: the limit there is 0,
    /// which has no `2^-m T^q` form.
    pub zero_times: Vec<i64>,
}

impl ScanReport {
    pub fn hits_below(&self, threshold: &BigRational) -> impl Iterator<Item = &WeakLimitHit> {
        let threshold = threshold.clone();
        self.hits.iter().filter(move |h| h.residual < threshold)
    }
}

/// Precomputed `a_q` for every pair over a shift range.
struct ShiftTable {
    shifts: Vec<i64>,
    values: Vec<Vec<BigRational>>,
}

impl ShiftTable {
    fn new(source: &impl CorrelationSource, shifts: RangeInclusive<i64>) -> Result<Self> {
        let shifts: Vec<i64> = shifts.collect();
        let values = shifts
            .iter()
            .map(|&q| {
                (0..source.pair_count())
                    .map(|k| source.correlation(k, q))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(ShiftTable { shifts, values })
    }
}

/// For each time, the `(m, q)` with `m <= m_max` and `q` in `shifts` that
/// minimizes the largest residual `|a_n - 2^-m a_q|` over the test pairs.
///
/// Candidates predicting zero on every pair are not weak limits of the
/// required form and are skipped. Ties go to the smaller `m`, then the
/// smaller `|q|`, then the nonnegative `q`.
pub fn weak_limit_scan(
    source: &impl CorrelationSource,
    times: &[i64],
    m_max: u32,
    shifts: RangeInclusive<i64>,
) -> Result<ScanReport> {
    let table = ShiftTable::new(source, shifts)?;
    let mut report = ScanReport::default();
    for &time in times {
        match scan_with_table(source, &table, time, m_max)? {
            Some(hit) => report.hits.push(hit),
            None => report.zero_times.push(time),
        }
    }
    Ok(report)
}

/// Single-time version of [`weak_limit_scan`]; `None` marks a zero limit.
pub fn scan_time(
    source: &impl CorrelationSource,
    time: i64,
    m_max: u32,
    shifts: RangeInclusive<i64>,
) -> Result<Option<WeakLimitHit>> {
    let table = ShiftTable::new(source, shifts)?;
    scan_with_table(source, &table, time, m_max)
}

fn scan_with_table(
    source: &impl CorrelationSource,
    table: &ShiftTable,
    time: i64,
    m_max: u32,
) -> Result<Option<WeakLimitHit>> {
    let observed: Vec<BigRational> = (0..source.pair_count())
        .map(|k| source.correlation(k, time))
        .collect::<Result<_>>()?;
    if observed.iter().all(Zero::is_zero) {
        return Ok(None);
    }
    let mut best: Option<WeakLimitHit> = None;
    for m in 0..=m_max {
        let coefficient = ratio::inverse_power_of_two(m);
        for (shift, base) in table.shifts.iter().zip(&table.values) {
            if base.iter().all(Zero::is_zero) {
                continue;
            }
            let pair_residuals: Vec<BigRational> = observed
                .iter()
                .zip(base)
                .map(|(a, b)| (a - &coefficient * b).abs())
                .collect();
            let residual = pair_residuals
                .iter()
                .max()
                .cloned()
                .unwrap_or_else(BigRational::zero);
            let better = match &best {
                None => true,
                Some(current) => {
                    let key =
                        |r: &BigRational, m: u32, q: i64| (r.clone(), m, q.unsigned_abs(), q < 0);
                    key(&residual, m, *shift)
                        < key(&current.residual, current.exponent, current.shift)
                }
            };
            if better {
                best = Some(WeakLimitHit {
                    time,
                    exponent: m,
                    shift: *shift,
                    residual,
                    pair_residuals,
                });
            }
        }
    }
    Ok(best)
}

/// Fejér density sampled on a uniform grid of the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub order: usize,
    pub samples: Vec<f64>,
}

impl DensityProfile {
    pub fn grid(&self) -> usize {
        self.samples.len()
    }

    /// Riemann sum `Σ f(θ_g) 2π/G`; equals `a_0` up to rounding when `G > N`.
    pub fn total_mass(&self) -> f64 {
        let step = 2.0 * PI / self.grid() as f64;
        self.samples.iter().sum::<f64>() * step
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `f_N(θ) = (1/2π) Σ_{|n|<=N} (1 - |n|/(N+1)) a_|n| cos(nθ)` at `θ_g = 2πg/G`.
pub fn fejer_density(values: &[BigRational], grid: usize) -> Result<DensityProfile> {
    if grid < 4 {
        return Err(Error::InvalidParams(
            "density grid needs at least 4 points".into(),
        ));
    }
    if values.is_empty() {
        return Err(Error::InvalidParams("empty correlation sequence".into()));
    }
    let order = values.len() - 1;
    let cosines: Vec<f64> = (0..grid)
        .map(|k| libm::cos(2.0 * PI * k as f64 / grid as f64))
        .collect();
    let weights: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let taper = 1.0 - n as f64 / (order + 1) as f64;
            let doubled = if n == 0 { 1.0 } else { 2.0 };
            doubled * taper * ratio::to_f64(a)
        })
        .collect();
    let samples = (0..grid)
        .map(|g| {
            let sum: f64 = weights
                .iter()
                .enumerate()
                .filter(|(_, w)| **w != 0.0)
                .map(|(n, w)| w * cosines[(n * g) % grid])
                .sum();
            sum / (2.0 * PI)
        })
        .collect();
    Ok(DensityProfile { order, samples })
}

/// Fejér density of an autocorrelation sequence.
pub fn fejer_density_of(seq: &CorrelationSeq, grid: usize) -> Result<DensityProfile> {
    if !seq.is_autocorrelation() {
        return Err(Error::InvalidParams("Fejér density needs A = B".into()));
    }
    fejer_density(&seq.values, grid)
}

/// Ratios `f(θ + 2π/p^n) / f(θ)` over grid points with `f(θ) >= floor`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiInvarianceReport {
    pub p: u64,
    pub rotations: u32,
    /// Rotation in grid steps.
    pub step: usize,
    pub floor: f64,
    pub considered: usize,
    /// Points whose rotated value falls below the floor.
    pub degenerate: usize,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
}

impl QuasiInvarianceReport {
    pub fn flagged(&self) -> bool {
        self.degenerate > 0
    }
}

pub fn quasi_invariance_report(
    density: &DensityProfile,
    p: u64,
    rotations: u32,
    floor: f64,
) -> Result<QuasiInvarianceReport> {
    let grid = density.grid();
    let divisor = p.checked_pow(rotations).unwrap_or(u64::MAX);
    if divisor == 0 || !(grid as u64).is_multiple_of(divisor) {
        return Err(Error::GridNotDivisible { grid, divisor });
    }
    let step = grid / divisor as usize;
    let f = &density.samples;
    let mut ratios = Vec::new();
    let mut degenerate = 0;
    for g in 0..grid {
        if f[g] < floor || f[g] <= 0.0 {
            continue;
        }
        let rotated = f[(g + step) % grid];
        if rotated < floor {
            degenerate += 1;
        }
        ratios.push(rotated / f[g]);
    }
    ratios.sort_by(f64::total_cmp);
    let median = if ratios.is_empty() {
        None
    } else if ratios.len() % 2 == 1 {
        Some(ratios[ratios.len() / 2])
    } else {
        Some(0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2]))
    };
    Ok(QuasiInvarianceReport {
        p,
        rotations,
        step,
        floor,
        considered: ratios.len(),
        degenerate,
        min_ratio: ratios.first().copied(),
        max_ratio: ratios.last().copied(),
        median_ratio: median,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn one_eight() -> SelfSimilarParams {
        SelfSimilarParams::hp(1, 8).unwrap()
    }

    #[test]
    fn sequence_examples() {
        let p = one_eight();
        let e1 = LevelSet::base(1);
        let seq = correlation_sequence(&p, &e1, &e1, 16, 20).unwrap();
        assert_eq!(seq.values[0], r(1, 1));
        assert_eq!(seq.values[2], r(1, 2));
        assert_eq!(seq.values[8], r(0, 1));
        assert_eq!(seq.values[16], r(1, 2));
        let zero = correlation_sequence(&p, &e1, &e1, 0, 20).unwrap();
        assert_eq!(zero.values, vec![r(1, 1)]);
        let lifted = p.translate_set(&e1, 1, 20).unwrap();
        let seq = correlation_sequence(&p, &e1, &lifted, 1, 20).unwrap();
        assert_eq!(seq.values[1], r(1, 1));
    }

    #[test]
    fn sequence_matches_pointwise_correlations() {
        let p = SelfSimilarParams::hp(3, 8).unwrap();
        let a = LevelSet::new(2, [0, 5, 11]);
        let b = LevelSet::new(1, [1, 2]);
        let seq = correlation_sequence(&p, &a, &b, 300, 20).unwrap();
        for (n, value) in seq.values.iter().enumerate() {
            assert_eq!(
                *value,
                p.correlation(&a, &b, n as i64, 20).unwrap(),
                "n = {n}"
            );
        }
    }

    #[test]
    fn tensor_examples() {
        let seq = vec![r(1, 1), r(0, 1), r(1, 2)];
        assert_eq!(tensor_correlation(&seq, &seq).unwrap()[2], r(1, 4));
        let zeros = vec![r(0, 1); 3];
        assert_eq!(tensor_correlation(&seq, &zeros).unwrap(), zeros);
        assert_eq!(
            tensor_correlation(&seq, &seq[..2]),
            Err(Error::LengthMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn scan_examples() {
        let p = one_eight();
        let pairs = [(LevelSet::base(1), LevelSet::base(1))];
        let source = TowerPairs {
            params: &p,
            pairs: &pairs,
            stage_cap: 20,
        };
        let report = weak_limit_scan(&source, &[2, 16, 128], 4, -1..=1).unwrap();
        for hit in &report.hits {
            assert_eq!((hit.exponent, hit.shift), (1, 0));
            assert!(hit.residual.is_zero());
        }
        assert_eq!(report.hits.len(), 3);
        let report = weak_limit_scan(&source, &[0], 4, -1..=1).unwrap();
        assert_eq!((report.hits[0].exponent, report.hits[0].shift), (0, 0));
        assert!(report.hits[0].residual.is_zero());
        let report = weak_limit_scan(&source, &[3], 4, -8..=8).unwrap();
        assert_eq!(report.hits_below(&r(1, 8)).count(), 0);
        assert_eq!(report.zero_times, vec![3]);
    }

    #[test]
    fn density_examples() {
        let lebesgue = fejer_density(&[r(1, 1), r(0, 1), r(0, 1)], 16).unwrap();
        for f in &lebesgue.samples {
            assert!((f - 1.0 / (2.0 * PI)).abs() < 1e-12);
        }
        let n = 10;
        let point_mass = fejer_density(&vec![r(1, 1); n + 1], 16).unwrap();
        assert!((point_mass.samples[0] - (n + 1) as f64 / (2.0 * PI)).abs() < 1e-12);
        assert!(fejer_density(&[r(1, 1)], 3).is_err());
    }

    #[test]
    fn rotation_ratios() {
        let uniform = DensityProfile {
            order: 0,
            samples: vec![1.0 / (2.0 * PI); 64],
        };
        let report = quasi_invariance_report(&uniform, 8, 1, 0.0).unwrap();
        assert_eq!(report.min_ratio, Some(1.0));
        assert_eq!(report.max_ratio, Some(1.0));
        assert!(!report.flagged());

        let arc: Vec<f64> = (0..64).map(|g| if g < 8 { 1.0 } else { 0.0 }).collect();
        let arc = DensityProfile {
            order: 0,
            samples: arc,
        };
        let report = quasi_invariance_report(&arc, 8, 1, 0.5).unwrap();
        assert_eq!(report.considered, 8);
        assert!(report.flagged());
        assert_eq!(report.max_ratio, Some(0.0));

        assert_eq!(
            quasi_invariance_report(&arc, 8, 3, 0.5),
            Err(Error::GridNotDivisible {
                grid: 64,
                divisor: 512
            })
        );
    }
}
