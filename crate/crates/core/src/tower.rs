//! Stage-by-stage construction of the self-similar rank-one transformation.
//!
//! Stage `j` is a tower of `h_j` levels of common width `w_j`. Passing to
//! stage `j + 1` cuts the base into `r` equal pieces (left to right), puts
//! `s(i) * h_j` spacer levels on top of column `i` and stacks the columns.
//! Every piece of data here is exact: level indices are big integers and
//! widths and offsets are big rationals.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Parameters of a self-similar construction: initial height `h`, `r = s.len()`
/// cuts per stage and spacer multipliers `s(1..r)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfSimilarParams {
    h: BigInt,
    s: Vec<u32>,
    base_width: BigRational,
}

/// Exact layout of one stage of the tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageLayout {
    pub stage: u32,
    pub height: BigInt,
    pub width: BigRational,
    /// Bottom level of each column of the previous tower (empty at stage 1).
    pub column_offsets: Vec<BigInt>,
    /// Height of the previous tower, i.e. of each column.
    pub column_height: Option<BigInt>,
    /// Half-open spacer ranges `[start, end)`.
    pub spacers: Vec<(BigInt, BigInt)>,
}

/// A union of full-width levels of a fixed stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelSet {
    stage: u32,
    indices: Vec<BigInt>,
}

/// A point given by its level in some stage and its offset inside that
/// level, measured from the left end of the base interval `[0, w_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCoord {
    pub stage: u32,
    pub level: BigInt,
    pub offset: BigRational,
}

impl LevelSet {
    /// Builds a set at `stage`; indices are sorted and deduplicated but not
    /// range-checked (see [`SelfSimilarParams::validate_set`]).
    pub fn new<I, T>(stage: u32, indices: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        let mut indices: Vec<BigInt> = indices.into_iter().map(Into::into).collect();
        indices.sort();
        indices.dedup();
        LevelSet { stage, indices }
    }

    pub fn empty(stage: u32) -> Self {
        LevelSet {
            stage,
            indices: Vec::new(),
        }
    }

    /// The base `E_stage` of the stage tower.
    pub fn base(stage: u32) -> Self {
        LevelSet {
            stage,
            indices: alloc::vec![BigInt::zero()],
        }
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn indices(&self) -> &[BigInt] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub(crate) fn from_sorted(stage: u32, indices: Vec<BigInt>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        LevelSet { stage, indices }
    }

    /// Number of common indices; both sets must live at the same stage.
    pub(crate) fn intersection_len(&self, other: &LevelSet) -> usize {
        debug_assert_eq!(self.stage, other.stage);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    pub(crate) fn union(&self, other: &LevelSet) -> LevelSet {
        debug_assert_eq!(self.stage, other.stage);
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.indices.len() || j < other.indices.len() {
            let next = match (self.indices.get(i), other.indices.get(j)) {
                (Some(a), Some(b)) => match a.cmp(b) {
                    Ordering::Less => {
                        i += 1;
                        a
                    }
                    Ordering::Greater => {
                        j += 1;
                        b
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        a
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a
                }
                (None, Some(b)) => {
                    j += 1;
                    b
                }
                (None, None) => unreachable!(),
            };
            merged.push(next.clone());
        }
        LevelSet::from_sorted(self.stage, merged)
    }

    /// Indices in `self` but not in `other`; same stage required.
    pub(crate) fn difference_len(&self, other: &LevelSet) -> usize {
        self.len() - self.intersection_len(other)
    }
}

impl PointCoord {
    pub fn new(stage: u32, level: impl Into<BigInt>, offset: BigRational) -> Self {
        PointCoord {
            stage,
            level: level.into(),
            offset,
        }
    }
}

impl SelfSimilarParams {
    /// General self-similar construction with spacer multipliers `s`.
    pub fn new(h: u64, s: Vec<u32>) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParams(
                "initial height must be positive".into(),
            ));
        }
        if s.len() < 2 {
            return Err(Error::InvalidParams(
                "at least two cuts per stage are required".into(),
            ));
        }
        if s.iter().all(|&x| x == 0) {
            return Err(Error::InvalidParams(
                "at least one spacer multiplier must be positive".into(),
            ));
        }
        Ok(SelfSimilarParams {
            h: BigInt::from(h),
            s,
            base_width: BigRational::one(),
        })
    }

    /// The type-`(h, p)` construction: two cuts with spacer multipliers `(1, p - 3)`.
    pub fn hp(h: u64, p: u32) -> Result<Self> {
        if p < 4 {
            return Err(Error::InvalidParams(
                "the (h, p) family needs p >= 4 so that the second spacer block is nonempty".into(),
            ));
        }
        Self::new(h, alloc::vec![1, p - 3])
    }

    pub fn with_base_width(mut self, width: BigRational) -> Result<Self> {
        if !width.is_positive() {
            return Err(Error::InvalidParams("base width must be positive".into()));
        }
        self.base_width = width;
        Ok(self)
    }

    pub fn initial_height(&self) -> &BigInt {
        &self.h
    }

    pub fn cuts(&self) -> usize {
        self.s.len()
    }

    pub fn spacer_multipliers(&self) -> &[u32] {
        &self.s
    }

    pub fn base_width(&self) -> &BigRational {
        &self.base_width
    }

    /// Similarity coefficient `q = r + sum s(i)`, the height ratio of consecutive stages.
    pub fn similarity(&self) -> u64 {
        self.s.len() as u64 + self.s.iter().map(|&x| u64::from(x)).sum::<u64>()
    }

    /// `Some(p)` when these are type-`(h, p)` parameters.
    pub fn hp_p(&self) -> Option<u32> {
        match self.s.as_slice() {
            [1, rest] => Some(rest + 3),
            _ => None,
        }
    }

    /// True for `(h, p)` parameters with `p < 8`, where the weak-limit
    /// classification this library is modelled on is not guaranteed.
    pub fn below_guarantee_range(&self) -> bool {
        self.hp_p().is_some_and(|p| p < 8)
    }

    fn check_stage(&self, stage: u32) -> Result<()> {
        if stage == 0 {
            Err(Error::InvalidStage(stage))
        } else {
            Ok(())
        }
    }

    /// `h_j = h * q^(j-1)`.
    pub fn height(&self, stage: u32) -> BigInt {
        debug_assert!(stage >= 1);
        &self.h * num_traits::pow(BigInt::from(self.similarity()), (stage - 1) as usize)
    }

    /// `w_j = w / r^(j-1)`.
    pub fn width(&self, stage: u32) -> BigRational {
        debug_assert!(stage >= 1);
        let denom = num_traits::pow(BigInt::from(self.cuts()), (stage - 1) as usize);
        &self.base_width / BigRational::from_integer(denom)
    }

    /// Bottom levels, in the stage-`stage` tower, of the columns cut from the
    /// previous tower. Empty for stage 1.
    pub fn column_offsets(&self, stage: u32) -> Vec<BigInt> {
        if stage < 2 {
            return Vec::new();
        }
        let prev = self.height(stage - 1);
        let mut offsets = Vec::with_capacity(self.cuts());
        let mut c = BigInt::zero();
        for &spacers in &self.s {
            offsets.push(c.clone());
            c += &prev * BigInt::from(1 + u64::from(spacers));
        }
        offsets
    }

    pub fn build_stage(&self, stage: u32) -> Result<StageLayout> {
        self.check_stage(stage)?;
        let height = self.height(stage);
        let width = self.width(stage);
        if stage == 1 {
            return Ok(StageLayout {
                stage,
                height,
                width,
                column_offsets: Vec::new(),
                column_height: None,
                spacers: Vec::new(),
            });
        }
        let prev = self.height(stage - 1);
        let column_offsets = self.column_offsets(stage);
        let spacers = column_offsets
            .iter()
            .zip(&self.s)
            .filter(|(_, &s)| s > 0)
            .map(|(c, &s)| {
                let start = c + &prev;
                let end = &start + &prev * BigInt::from(s);
                (start, end)
            })
            .collect();
        Ok(StageLayout {
            stage,
            height,
            width,
            column_offsets,
            column_height: Some(prev),
            spacers,
        })
    }

    pub fn validate_set(&self, set: &LevelSet) -> Result<()> {
        self.check_stage(set.stage)?;
        let height = self.height(set.stage);
        match (set.indices.first(), set.indices.last()) {
            (Some(lo), _) if lo.is_negative() => Err(Error::IndexOutOfRange {
                stage: set.stage,
                level: lo.to_str_radix(10),
            }),
            (_, Some(hi)) if *hi >= height => Err(Error::IndexOutOfRange {
                stage: set.stage,
                level: hi.to_str_radix(10),
            }),
            _ => Ok(()),
        }
    }

    pub fn measure(&self, set: &LevelSet) -> BigRational {
        self.width(set.stage) * BigRational::from_integer(BigInt::from(set.len()))
    }

    fn refine_once(&self, set: &LevelSet) -> LevelSet {
        let offsets = self.column_offsets(set.stage + 1);
        let mut indices = Vec::with_capacity(set.len() * offsets.len());
        // Column ranges are disjoint and increasing, so the output stays sorted.
        for c in &offsets {
            indices.extend(set.indices.iter().map(|l| c + l));
        }
        LevelSet::from_sorted(set.stage + 1, indices)
    }

    /// The same set written as a union of stage-`stage` levels.
    pub fn refine_set(&self, set: &LevelSet, stage: u32) -> Result<LevelSet> {
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

    /// Smallest stage `K >= set.stage` (and `>= floor`) whose tower contains
    /// every refined index shifted up by `shift`.
    fn containing_stage(
        &self,
        set: &LevelSet,
        shift: &BigInt,
        floor: u32,
        cap: u32,
    ) -> Result<u32> {
        let mut stage = set.stage;
        let Some(mut top) = set.indices.last().cloned() else {
            return Ok(stage.max(floor));
        };
        let last_column = self.cuts() - 1;
        loop {
            if stage >= floor && &top + shift < self.height(stage) {
                return Ok(stage);
            }
            if stage >= cap {
                return Err(Error::StageCapExceeded { cap });
            }
            stage += 1;
            top += &self.column_offsets(stage)[last_column];
        }
    }

    /// `T^n A`, written at the smallest stage `<= cap` that contains it.
    pub fn translate_set(
        &self,
        set: &LevelSet,
        n: impl Into<BigInt>,
        cap: u32,
    ) -> Result<LevelSet> {
        self.validate_set(set)?;
        let n = n.into();
        if n.is_negative() {
            // Refinement keeps the lowest index in place, so if the shift does
            // not fit now it never will.
            return match set.indices.first() {
                Some(lo) if *lo < -&n => Err(Error::StageCapExceeded { cap }),
                _ => Ok(LevelSet::from_sorted(
                    set.stage,
                    set.indices.iter().map(|l| l + &n).collect(),
                )),
            };
        }
        let stage = self.containing_stage(set, &n, set.stage, cap)?;
        let refined = self.refine_set(set, stage)?;
        Ok(LevelSet::from_sorted(
            stage,
            refined.indices.iter().map(|l| l + &n).collect(),
        ))
    }

    /// Exact `mu(T^n A ∩ B)`.
    pub fn correlation(
        &self,
        a: &LevelSet,
        b: &LevelSet,
        n: impl Into<BigInt>,
        cap: u32,
    ) -> Result<BigRational> {
        let n = n.into();
        if n.is_negative() {
            return self.correlation(b, a, -n, cap);
        }
        self.validate_set(a)?;
        self.validate_set(b)?;
        let stage = self.containing_stage(a, &n, b.stage, cap)?;
        let shifted: Vec<BigInt> = self
            .refine_set(a, stage)?
            .indices
            .iter()
            .map(|l| l + &n)
            .collect();
        let shifted = LevelSet::from_sorted(stage, shifted);
        let target = self.refine_set(b, stage)?;
        let hits = shifted.intersection_len(&target);
        Ok(self.width(stage) * BigRational::from_integer(BigInt::from(hits)))
    }

    /// Both sets written at a common stage and compared.
    pub fn same_set(&self, a: &LevelSet, b: &LevelSet) -> Result<bool> {
        let stage = a.stage.max(b.stage);
        Ok(self.refine_set(a, stage)? == self.refine_set(b, stage)?)
    }

    /// `mu(A Δ B)` after writing both sets at a common stage.
    pub fn symmetric_difference_measure(&self, a: &LevelSet, b: &LevelSet) -> Result<BigRational> {
        let stage = a.stage.max(b.stage);
        let a = self.refine_set(a, stage)?;
        let b = self.refine_set(b, stage)?;
        let count = a.difference_len(&b) + b.difference_len(&a);
        Ok(self.width(stage) * BigRational::from_integer(BigInt::from(count)))
    }

    pub fn validate_point(&self, x: &PointCoord) -> Result<()> {
        self.check_stage(x.stage)?;
        let ok = !x.level.is_negative()
            && x.level < self.height(x.stage)
            && !x.offset.is_negative()
            && x.offset < self.width(x.stage);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidPoint { stage: x.stage })
        }
    }

    /// Bottom level of column `index` of stage `stage`, given `h_{stage-1}`.
    fn column_offset(&self, index: usize, prev_height: &BigInt) -> BigInt {
        let blocks: u64 = self.s[..index].iter().map(|&x| 1 + u64::from(x)).sum();
        prev_height * BigInt::from(blocks)
    }

    fn lift_point_with(&self, x: &PointCoord, height: &BigInt) -> PointCoord {
        let stage = x.stage + 1;
        let piece = self.width(stage);
        let column = (&x.offset / &piece).to_integer();
        let column_index = column.to_usize().expect("offset lies inside the base");
        PointCoord {
            stage,
            level: self.column_offset(column_index, height) + &x.level,
            offset: &x.offset - piece * BigRational::from_integer(column),
        }
    }

    fn lift_point(&self, x: &PointCoord) -> PointCoord {
        self.lift_point_with(x, &self.height(x.stage))
    }

    /// The same point in stage-`stage` coordinates.
    pub fn refine_point(&self, x: &PointCoord, stage: u32) -> Result<PointCoord> {
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

    /// `T^n x`, lifting the point to later stages until the move stays
    /// inside a tower.
    pub fn apply_point(
        &self,
        x: &PointCoord,
        n: impl Into<BigInt>,
        cap: u32,
    ) -> Result<PointCoord> {
        self.validate_point(x)?;
        let n = n.into();
        let q = BigInt::from(self.similarity());
        let mut current = x.clone();
        let mut height = self.height(current.stage);
        loop {
            let target = &current.level + &n;
            if !target.is_negative() && target < height {
                current.level = target;
                return Ok(current);
            }
            if current.stage >= cap {
                return Err(Error::StageCapExceeded { cap });
            }
            current = self.lift_point_with(&current, &height);
            height *= &q;
        }
    }

    pub fn same_point(&self, x: &PointCoord, y: &PointCoord) -> Result<bool> {
        let stage = x.stage.max(y.stage);
        Ok(self.refine_point(x, stage)? == self.refine_point(y, stage)?)
    }

    /// Whether the point lies in the level set.
    pub fn contains(&self, set: &LevelSet, x: &PointCoord) -> Result<bool> {
        let stage = set.stage.max(x.stage);
        let set = self.refine_set(set, stage)?;
        let x = self.refine_point(x, stage)?;
        Ok(set.indices.binary_search(&x.level).is_ok())
    }

    /// `l mod q` for a level of stage `stage`.
    pub(crate) fn residue(&self, level: &BigInt) -> u64 {
        level
            .mod_floor(&BigInt::from(self.similarity()))
            .to_u64()
            .expect("residue is below q")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn one_eight() -> SelfSimilarParams {
        SelfSimilarParams::hp(1, 8).unwrap()
    }

    #[test]
    fn stage_two_layout_of_one_eight() {
        let layout = one_eight().build_stage(2).unwrap();
        assert_eq!(layout.height, BigInt::from(8));
        assert_eq!(layout.width, r(1, 2));
        assert_eq!(layout.column_offsets, ints(&[0, 2]));
        assert_eq!(
            layout.spacers,
            vec![
                (BigInt::from(1), BigInt::from(2)),
                (BigInt::from(3), BigInt::from(8))
            ]
        );
    }

    #[test]
    fn stage_one_is_the_initial_tower() {
        let layout = one_eight().build_stage(1).unwrap();
        assert_eq!(layout.height, BigInt::from(1));
        assert_eq!(layout.width, r(1, 1));
        assert!(layout.column_offsets.is_empty());
        assert!(layout.spacers.is_empty());
    }

    #[test]
    fn layout_with_empty_first_spacer_block() {
        let params = SelfSimilarParams::new(1, vec![0, 1]).unwrap();
        let layout = params.build_stage(2).unwrap();
        assert_eq!(layout.height, BigInt::from(3));
        assert_eq!(layout.width, r(1, 2));
        assert_eq!(layout.column_offsets, ints(&[0, 1]));
        assert_eq!(layout.spacers, vec![(BigInt::from(2), BigInt::from(3))]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SelfSimilarParams::hp(1, 3).is_err());
        assert!(SelfSimilarParams::new(0, vec![1, 1]).is_err());
        assert!(SelfSimilarParams::new(1, vec![0, 0]).is_err());
        assert!(SelfSimilarParams::new(1, vec![3]).is_err());
        assert_eq!(one_eight().build_stage(0), Err(Error::InvalidStage(0)));
        assert!(SelfSimilarParams::hp(1, 5).unwrap().below_guarantee_range());
        assert!(!one_eight().below_guarantee_range());
    }

    #[test]
    fn layout_partitions_every_stage() {
        for params in [
            one_eight(),
            SelfSimilarParams::new(3, vec![2, 0, 1]).unwrap(),
        ] {
            for stage in 2..7 {
                let layout = params.build_stage(stage).unwrap();
                let column = layout.column_height.clone().unwrap();
                let mut covered = BigInt::zero();
                let mut ranges: Vec<(BigInt, BigInt)> = layout
                    .column_offsets
                    .iter()
                    .map(|c| (c.clone(), c + &column))
                    .chain(layout.spacers.iter().cloned())
                    .collect();
                ranges.sort();
                for (start, end) in &ranges {
                    assert_eq!(*start, covered);
                    covered = end.clone();
                }
                assert_eq!(covered, layout.height);
            }
        }
        let params = SelfSimilarParams::hp(5, 8).unwrap();
        for stage in 1..10u32 {
            assert_eq!(
                params.height(stage),
                BigInt::from(5) * BigInt::from(8).pow(stage - 1)
            );
        }
    }

    #[test]
    fn refinement_examples() {
        let p = one_eight();
        assert_eq!(
            p.refine_set(&LevelSet::base(2), 3).unwrap(),
            LevelSet::new(3, [0, 16])
        );
        assert_eq!(
            p.refine_set(&LevelSet::base(1), 3).unwrap(),
            LevelSet::new(3, [0, 2, 16, 18])
        );
        assert_eq!(
            p.refine_set(&LevelSet::empty(1), 4).unwrap(),
            LevelSet::empty(4)
        );
        assert!(p.refine_set(&LevelSet::base(3), 2).is_err());
    }

    #[test]
    fn translation_examples() {
        let p = one_eight();
        let cap = 20;
        assert_eq!(
            p.translate_set(&LevelSet::new(2, [0, 2]), 2, cap).unwrap(),
            LevelSet::new(2, [2, 4])
        );
        let a = LevelSet::new(3, [0, 2, 16, 18]);
        assert_eq!(p.translate_set(&a, 0, cap).unwrap(), a);
        assert_eq!(
            p.translate_set(&a, 16, cap).unwrap(),
            LevelSet::new(3, [16, 18, 32, 34])
        );
        // escalates from stage 1 to stage 3
        assert_eq!(
            p.translate_set(&LevelSet::base(1), 8, cap).unwrap(),
            LevelSet::new(3, [8, 10, 24, 26])
        );
        assert_eq!(
            p.translate_set(&LevelSet::new(2, [3, 5]), -3, cap).unwrap(),
            LevelSet::new(2, [0, 2])
        );
        assert_eq!(
            p.translate_set(&LevelSet::base(1), -1, cap),
            Err(Error::StageCapExceeded { cap })
        );
        assert_eq!(
            p.translate_set(&LevelSet::base(1), 1000, 3),
            Err(Error::StageCapExceeded { cap: 3 })
        );
    }

    #[test]
    fn correlation_examples() {
        let p = one_eight();
        let e1 = LevelSet::base(1);
        let cap = 20;
        assert_eq!(p.correlation(&e1, &e1, 0, cap).unwrap(), r(1, 1));
        assert_eq!(p.correlation(&e1, &e1, 2, cap).unwrap(), r(1, 2));
        assert_eq!(p.correlation(&e1, &e1, 8, cap).unwrap(), r(0, 1));
        assert_eq!(p.correlation(&e1, &e1, 16, cap).unwrap(), r(1, 2));
        assert_eq!(p.correlation(&e1, &e1, -16, cap).unwrap(), r(1, 2));
    }

    #[test]
    fn point_examples() {
        let p = one_eight();
        let cap = 20;
        let x = PointCoord::new(1, 0, r(3, 10));
        assert_eq!(
            p.apply_point(&x, 1, cap).unwrap(),
            PointCoord::new(2, 1, r(3, 10))
        );
        assert_eq!(p.apply_point(&x, 0, cap).unwrap(), x);
        let y = PointCoord::new(2, 7, r(1, 10));
        assert_eq!(
            p.apply_point(&y, 1, cap).unwrap(),
            PointCoord::new(3, 8, r(1, 10))
        );
        // right half of the base goes to the second column
        let z = PointCoord::new(1, 0, r(7, 10));
        assert_eq!(
            p.refine_point(&z, 2).unwrap(),
            PointCoord::new(2, 2, r(1, 5))
        );
        assert!(p.validate_point(&PointCoord::new(2, 0, r(1, 2))).is_err());
    }

    #[test]
    fn negative_moves_lift_when_needed() {
        let p = one_eight();
        let x = PointCoord::new(1, 0, r(7, 10));
        let back = p.apply_point(&x, -1, 20).unwrap();
        assert_eq!(back, PointCoord::new(2, 1, r(1, 5)));
        assert!(p
            .same_point(&p.apply_point(&back, 1, 20).unwrap(), &x)
            .unwrap());
        let origin = PointCoord::new(1, 0, r(0, 1));
        assert_eq!(
            p.apply_point(&origin, -1, 6),
            Err(Error::StageCapExceeded { cap: 6 })
        );
    }
}
