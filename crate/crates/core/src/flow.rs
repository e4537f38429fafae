//! The `q`-self-similar rank-one flow with rational `q > 2`.
//!
//! Stage `j` is a rectangle of height `h_j = q^(j-1)` and width `2^(1-j)`.
//! Its base is halved; the right column is put directly on top of the left
//! one (no spacer between them) and a spacer of height `(q - 2) h_j` goes
//! on top, so stage-`j` heights embed into stage `j + 1` as `[0, h_j)` and
//! `[h_j, 2 h_j)`. The flow moves points upward at unit speed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Interval = (BigRational, BigRational);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowParams {
    q: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowStageLayout {
    pub stage: u32,
    pub height: BigRational,
    pub width: BigRational,
    pub columns: Vec<Interval>,
    pub spacer: Option<Interval>,
}

/// Full-width union of half-open height intervals of one stage, kept
/// sorted, disjoint and merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectSet {
    stage: u32,
    intervals: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowPoint {
    pub stage: u32,
    pub height: BigRational,
    pub offset: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowConjugacyReport {
    pub t: BigRational,
    pub attempted: usize,
    pub passed: usize,
    pub first_failure: Option<String>,
}

impl FlowConjugacyReport {
    pub fn all_passed(&self) -> bool {
        self.attempted == self.passed
    }
}

fn normalize(mut intervals: Vec<Interval>) -> Vec<Interval> {
    intervals.retain(|(a, b)| a < b);
    intervals.sort();
    let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
    for (a, b) in intervals {
        match merged.last_mut() {
            Some((_, end)) if a <= *end => {
                if b > *end {
                    *end = b;
                }
            }
            _ => merged.push((a, b)),
        }
    }
    merged
}

impl RectSet {
    pub fn new(stage: u32, intervals: Vec<Interval>) -> Self {
        RectSet {
            stage,
            intervals: normalize(intervals),
        }
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> BigRational {
        self.intervals
            .iter()
            .fold(BigRational::zero(), |acc, (a, b)| acc + (b - a))
    }

    fn shifted(&self, t: &BigRational) -> RectSet {
        RectSet {
            stage: self.stage,
            intervals: self.intervals.iter().map(|(a, b)| (a + t, b + t)).collect(),
        }
    }

    fn intersection_length(&self, other: &RectSet) -> BigRational {
        let (mut i, mut j) = (0, 0);
        let mut total = BigRational::zero();
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a0, a1) = &self.intervals[i];
            let (b0, b1) = &other.intervals[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                total += hi - lo;
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        total
    }
}

impl FlowPoint {
    pub fn new(stage: u32, height: BigRational, offset: BigRational) -> Self {
        FlowPoint {
            stage,
            height,
            offset,
        }
    }
}

impl FlowParams {
    pub fn new(q: BigRational) -> Result<Self> {
        if q <= BigRational::from_integer(BigInt::from(2)) {
            return Err(Error::InvalidQ);
        }
        Ok(FlowParams { q })
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn height(&self, stage: u32) -> BigRational {
        num_traits::pow(self.q.clone(), (stage - 1) as usize)
    }

    pub fn width(&self, stage: u32) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << (stage - 1))
    }

    pub fn build_flow_stage(&self, stage: u32) -> Result<FlowStageLayout> {
        if stage == 0 {
            return Err(Error::InvalidStage(stage));
        }
        let height = self.height(stage);
        let width = self.width(stage);
        if stage == 1 {
            return Ok(FlowStageLayout {
                stage,
                height,
                width,
                columns: Vec::new(),
                spacer: None,
            });
        }
        let prev = self.height(stage - 1);
        let double = &prev + &prev;
        let columns = alloc::vec![(BigRational::zero(), prev.clone()), (prev, double.clone())];
        Ok(FlowStageLayout {
            stage,
            spacer: Some((double, height.clone())),
            height,
            width,
            columns,
        })
    }

    /// The whole stage-`stage` rectangle; `tower(1)` is `X_1`.
    pub fn tower(&self, stage: u32) -> RectSet {
        RectSet::new(
            stage,
            alloc::vec![(BigRational::zero(), self.height(stage))],
        )
    }

    pub fn validate_set(&self, set: &RectSet) -> Result<()> {
        if set.stage == 0 {
            return Err(Error::InvalidStage(0));
        }
        let top = self.height(set.stage);
        let inside = match (set.intervals.first(), set.intervals.last()) {
            (Some((lo, _)), Some((_, hi))) => !lo.is_negative() && *hi <= top,
            _ => true,
        };
        if inside {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "intervals leave the stage-{} tower",
                set.stage
            )))
        }
    }

    pub fn measure(&self, set: &RectSet) -> BigRational {
        self.width(set.stage) * set.total_length()
    }

    fn refine_once(&self, set: &RectSet) -> RectSet {
        let h = self.height(set.stage);
        let upper = set.intervals.iter().map(|(a, b)| (a + &h, b + &h));
        let intervals = set.intervals.iter().cloned().chain(upper).collect();
        RectSet::new(set.stage + 1, intervals)
    }

    pub fn refine_set(&self, set: &RectSet, stage: u32) -> Result<RectSet> {
        self.validate_set(set)?;
        if stage < set.stage {
            return Err(Error::InvalidStage(stage));
        }
        let mut current = set.clone();
        while current.stage < stage {
            current = self.refine_once(&current);
        }
        Ok(current)
    }

    fn containing_stage(
        &self,
        set: &RectSet,
        t: &BigRational,
        floor: u32,
        cap: u32,
    ) -> Result<u32> {
        let mut stage = set.stage;
        let Some((_, top)) = set.intervals.last() else {
            return Ok(stage.max(floor));
        };
        let mut top = top.clone();
        loop {
            if stage >= floor && &top + t <= self.height(stage) {
                return Ok(stage);
            }
            if stage >= cap {
                return Err(Error::StageCapExceeded { cap });
            }
            top += self.height(stage);
            stage += 1;
        }
    }

    /// `T_t A` at the smallest stage containing it.
    pub fn flow_translate(&self, set: &RectSet, t: &BigRational, cap: u32) -> Result<RectSet> {
        self.validate_set(set)?;
        if t.is_negative() {
            return match set.intervals.first() {
                Some((lo, _)) if *lo < -t => Err(Error::StageCapExceeded { cap }),
                _ => Ok(set.shifted(t)),
            };
        }
        let stage = self.containing_stage(set, t, set.stage, cap)?;
        Ok(self.refine_set(set, stage)?.shifted(t))
    }

    /// Exact `mu(T_t A ∩ B)`.
    pub fn flow_correlation(
        &self,
        a: &RectSet,
        b: &RectSet,
        t: &BigRational,
        cap: u32,
    ) -> Result<BigRational> {
        if t.is_negative() {
            return self.flow_correlation(b, a, &-t, cap);
        }
        self.validate_set(a)?;
        self.validate_set(b)?;
        let stage = self.containing_stage(a, t, b.stage, cap)?;
        let moved = self.refine_set(a, stage)?.shifted(t);
        let target = self.refine_set(b, stage)?;
        Ok(self.width(stage) * moved.intersection_length(&target))
    }

    pub fn same_set(&self, a: &RectSet, b: &RectSet) -> Result<bool> {
        let stage = a.stage.max(b.stage);
        Ok(self.refine_set(a, stage)? == self.refine_set(b, stage)?)
    }

    pub fn validate_point(&self, x: &FlowPoint) -> Result<()> {
        if x.stage == 0 {
            return Err(Error::InvalidStage(0));
        }
        let ok = !x.height.is_negative()
            && x.height < self.height(x.stage)
            && !x.offset.is_negative()
            && x.offset < self.width(x.stage);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidPoint { stage: x.stage })
        }
    }

    fn lift_point(&self, x: &FlowPoint) -> FlowPoint {
        let half = self.width(x.stage + 1);
        if x.offset < half {
            FlowPoint {
                stage: x.stage + 1,
                height: x.height.clone(),
                offset: x.offset.clone(),
            }
        } else {
            FlowPoint {
                stage: x.stage + 1,
                height: &x.height + self.height(x.stage),
                offset: &x.offset - half,
            }
        }
    }

    pub fn refine_point(&self, x: &FlowPoint, stage: u32) -> Result<FlowPoint> {
        self.validate_point(x)?;
        if stage < x.stage {
            return Err(Error::InvalidStage(stage));
        }
        let mut current = x.clone();
        while current.stage < stage {
            current = self.lift_point(&current);
        }
        Ok(current)
    }

    /// `T_t x`.
    pub fn apply_flow(&self, x: &FlowPoint, t: &BigRational, cap: u32) -> Result<FlowPoint> {
        self.validate_point(x)?;
        let mut current = x.clone();
        loop {
            let target = &current.height + t;
            if !target.is_negative() && target < self.height(current.stage) {
                current.height = target;
                return Ok(current);
            }
            if current.stage >= cap {
                return Err(Error::StageCapExceeded { cap });
            }
            current = self.lift_point(&current);
        }
    }

    pub fn same_point(&self, x: &FlowPoint, y: &FlowPoint) -> Result<bool> {
        let stage = x.stage.max(y.stage);
        Ok(self.refine_point(x, stage)? == self.refine_point(y, stage)?)
    }

    pub fn contains(&self, set: &RectSet, x: &FlowPoint) -> Result<bool> {
        let stage = set.stage.max(x.stage);
        let set = self.refine_set(set, stage)?;
        let x = self.refine_point(x, stage)?;
        Ok(set
            .intervals
            .iter()
            .any(|(a, b)| *a <= x.height && x.height < *b))
    }

    /// `Φ(u, v) = (2u, v/q)` from the stage-`j` rectangle onto stage `j - 1`.
    pub fn phi_point(&self, x: &FlowPoint) -> Result<FlowPoint> {
        self.validate_point(x)?;
        if x.stage < 2 {
            return Err(Error::StageTooLow);
        }
        let two = BigRational::from_integer(BigInt::from(2));
        Ok(FlowPoint {
            stage: x.stage - 1,
            height: &x.height / &self.q,
            offset: &x.offset * two,
        })
    }

    pub fn phi_set(&self, set: &RectSet) -> Result<RectSet> {
        self.validate_set(set)?;
        if set.stage < 2 {
            return Err(Error::StageTooLow);
        }
        let intervals = set
            .intervals
            .iter()
            .map(|(a, b)| (a / &self.q, b / &self.q))
            .collect();
        Ok(RectSet::new(set.stage - 1, intervals))
    }

    /// Preimage of a stage-`K` set under `Φ`, a stage-`(K+1)` set.
    pub fn phi_inverse_set(&self, set: &RectSet) -> Result<RectSet> {
        self.validate_set(set)?;
        let intervals = set
            .intervals
            .iter()
            .map(|(a, b)| (a * &self.q, b * &self.q))
            .collect();
        Ok(RectSet::new(set.stage + 1, intervals))
    }

    /// Checks `Φ(T_{qt} x) = T_t(Φ x)` on every sample.
    pub fn flow_conjugacy_check(
        &self,
        t: &BigRational,
        samples: &[FlowPoint],
        cap: u32,
    ) -> Result<FlowConjugacyReport> {
        self.flow_conjugacy_check_with(t, samples, cap, |params, x| params.phi_point(x))
    }

    /// [`Self::flow_conjugacy_check`] with a caller-supplied map in place of `Φ`.
    pub fn flow_conjugacy_check_with<F>(
        &self,
        t: &BigRational,
        samples: &[FlowPoint],
        cap: u32,
        phi: F,
    ) -> Result<FlowConjugacyReport>
    where
        F: Fn(&FlowParams, &FlowPoint) -> Result<FlowPoint>,
    {
        let qt = &self.q * t;
        let mut report = FlowConjugacyReport {
            t: t.clone(),
            attempted: 0,
            passed: 0,
            first_failure: None,
        };
        for x in samples {
            self.validate_point(x)?;
            if x.stage < 2 {
                return Err(Error::StageTooLow);
            }
            report.attempted += 1;
            let lhs = self.apply_flow(x, &qt, cap).and_then(|y| phi(self, &y));
            let rhs = phi(self, x).and_then(|y| self.apply_flow(&y, t, cap));
            let agree = match (&lhs, &rhs) {
                (Ok(a), Ok(b)) => self.same_point(a, b).unwrap_or(false),
                _ => false,
            };
            if agree {
                report.passed += 1;
            } else if report.first_failure.is_none() {
                report.first_failure = Some(format!(
                    "stage {} height {} offset {}: images differ",
                    x.stage, x.height, x.offset
                ));
            }
        }
        Ok(report)
    }

    /// `count` deterministic rational points spread over the stage tower.
    pub fn grid_samples(&self, stage: u32, count: usize) -> Vec<FlowPoint> {
        let h = self.height(stage);
        let w = self.width(stage);
        let n = BigInt::from(count.max(1));
        (0..count)
            .map(|k| {
                let k = BigInt::from(k);
                let height_slot = BigRational::new(BigInt::from(2) * &k + 1, BigInt::from(2) * &n);
                let offset_slot = BigRational::new((&k * 37u32) % &n * 3u32 + 1u32, &n * 3u32);
                FlowPoint {
                    stage,
                    height: &h * height_slot,
                    offset: &w * offset_slot,
                }
            })
            .collect()
    }
}
