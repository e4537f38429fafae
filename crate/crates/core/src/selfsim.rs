//! Self-similarity of the tower: the `T^q`-invariant set, the similarity
//! map onto the whole space, and the `q` ergodic components of `T^q`.
//!
//! Here `q` is the similarity coefficient of the parameters (`q = p` for the
//! type-`(h, p)` family). The similarity sends stage-`(j+1)` level `q*i` to
//! stage-`j` level `i` and stretches base offsets by the number of cuts `r`.
//! Only `r = 2` is the classical setting; larger `r` uses the same formula
//! and is experimental.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::tower::{LevelSet, PointCoord, SelfSimilarParams};
use crate::{Error, Result};

/// Stage-`J` truncation of the invariant set: the union of the levels
/// `T^{q i} E_{j+1}` for `0 <= i < h_j`, `1 <= j < J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantSetTruncation {
    pub resolution: u32,
    pub levels: LevelSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityReport {
    pub stage: u32,
    pub checks_attempted: usize,
    pub checks_passed: usize,
    /// Levels of the truncation left out because checking them needs a later stage.
    pub skipped: usize,
    pub first_failure: Option<String>,
}

impl SimilarityReport {
    pub fn all_passed(&self) -> bool {
        self.checks_attempted == self.checks_passed
    }
}

/// How far the class `{l : l ≡ k mod q}` of stage `J` is from being
/// `T^q`-invariant: measures of `T^q C \ C` and `C \ T^q C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDiscrepancy {
    pub component: u64,
    pub gained: BigRational,
    pub lost: BigRational,
}

impl ComponentDiscrepancy {
    pub fn total(&self) -> BigRational {
        &self.gained + &self.lost
    }
}

pub fn invariant_set(
    params: &SelfSimilarParams,
    resolution: u32,
) -> Result<InvariantSetTruncation> {
    if resolution == 0 {
        return Err(Error::InvalidStage(resolution));
    }
    let q = BigInt::from(params.similarity());
    let mut levels = LevelSet::empty(resolution);
    for j in 1..resolution {
        let count = params
            .height(j)
            .to_usize()
            .expect("truncation fits in memory");
        let term = LevelSet::from_sorted(j + 1, (0..count).map(|i| &q * BigInt::from(i)).collect());
        levels = levels.union(&params.refine_set(&term, resolution)?);
    }
    Ok(InvariantSetTruncation { resolution, levels })
}

/// Writes a stage-1 set or point at stage 2, where the invariant set starts.
fn at_least_stage_two(stage: u32) -> u32 {
    stage.max(2)
}

pub fn phi_forward_set(params: &SelfSimilarParams, set: &LevelSet) -> Result<LevelSet> {
    let set = params.refine_set(set, at_least_stage_two(set.stage()))?;
    let q = BigInt::from(params.similarity());
    let mut mapped = Vec::with_capacity(set.len());
    for level in set.indices() {
        let (i, rem) = level.div_rem(&q);
        if !rem.is_zero() {
            return Err(Error::NotInInvariantSet {
                stage: set.stage(),
                level: level.to_str_radix(10),
            });
        }
        mapped.push(i);
    }
    Ok(LevelSet::from_sorted(set.stage() - 1, mapped))
}

pub fn phi_forward_point(params: &SelfSimilarParams, x: &PointCoord) -> Result<PointCoord> {
    let x = params.refine_point(x, at_least_stage_two(x.stage))?;
    let (i, rem) = x.level.div_rem(&BigInt::from(params.similarity()));
    if !rem.is_zero() {
        return Err(Error::NotInInvariantSet {
            stage: x.stage,
            level: x.level.to_str_radix(10),
        });
    }
    let stretch = BigRational::from_integer(BigInt::from(params.cuts()));
    Ok(PointCoord {
        stage: x.stage - 1,
        level: i,
        offset: x.offset * stretch,
    })
}

/// Offsets `k * w_J / 4`, `k = 0..4`, used for the point-level checks; they
/// cover both halves of the stage-`J` base.
fn sample_offsets(params: &SelfSimilarParams, stage: u32) -> Vec<BigRational> {
    let quarter = params.width(stage) / BigRational::from_integer(BigInt::from(4));
    (0..4)
        .map(|k| &quarter * BigRational::from_integer(BigInt::from(k)))
        .collect()
}

/// Verifies `Φ ∘ T^q = T ∘ Φ` on every level `q*i` of the stage-`J`
/// truncation with `i + 1 < h_{J-1}`.
pub fn conjugacy_check(params: &SelfSimilarParams, stage: u32) -> Result<SimilarityReport> {
    conjugacy_check_with(params, stage, phi_forward_point)
}

/// [`conjugacy_check`] with a caller-supplied point map in place of `Φ`.
///
/// For each level the set identity is checked with the level map, and the
/// point identity at four offsets, evaluating the left side both at stage
/// `J` and after rewriting `T^q x` at stage `J + 1`.
pub fn conjugacy_check_with<F>(
    params: &SelfSimilarParams,
    stage: u32,
    phi: F,
) -> Result<SimilarityReport>
where
    F: Fn(&SelfSimilarParams, &PointCoord) -> Result<PointCoord>,
{
    let mut report = SimilarityReport {
        stage,
        checks_attempted: 0,
        checks_passed: 0,
        skipped: 0,
        first_failure: None,
    };
    if stage < 2 {
        return Ok(report);
    }
    let q = BigInt::from(params.similarity());
    let cap = stage + 2;
    let truncation = invariant_set(params, stage)?;
    let limit = params.height(stage - 1);
    let offsets = sample_offsets(params, stage);
    for level in truncation.levels.indices() {
        let i = level / &q;
        if &i + 1 >= limit {
            report.skipped += 1;
            continue;
        }
        report.checks_attempted += 1;
        let single = LevelSet::from_sorted(stage, alloc::vec![level.clone()]);
        let lhs = phi_forward_set(params, &params.translate_set(&single, q.clone(), stage)?)?;
        let rhs = params.translate_set(&phi_forward_set(params, &single)?, 1, stage)?;
        let mut failure = None;
        if !params.same_set(&lhs, &rhs)? {
            failure = Some(format!("level {level}: set images differ"));
        }
        for offset in &offsets {
            if failure.is_some() {
                break;
            }
            let x = PointCoord {
                stage,
                level: level.clone(),
                offset: offset.clone(),
            };
            let moved = params.apply_point(&x, q.clone(), cap)?;
            let rhs = phi(params, &x).and_then(|y| params.apply_point(&y, 1, cap));
            let lhs_here = phi(params, &moved);
            let lhs_later = params
                .refine_point(&moved, stage + 1)
                .and_then(|y| phi(params, &y));
            let agree = match (&rhs, &lhs_here, &lhs_later) {
                (Ok(r), Ok(a), Ok(b)) => params.same_point(r, a)? && params.same_point(r, b)?,
                _ => false,
            };
            if !agree {
                failure = Some(format!(
                    "level {level}, offset {offset}: point images differ"
                ));
            }
        }
        match failure {
            None => report.checks_passed += 1,
            Some(msg) => {
                report.first_failure.get_or_insert(msg);
            }
        }
    }
    Ok(report)
}

/// Index `k` of the component `T^k X̃` containing level `level` of stage `stage`.
pub fn component_of(params: &SelfSimilarParams, level: &BigInt, stage: u32) -> Result<u64> {
    params.validate_set(&LevelSet::new(stage, [level.clone()]))?;
    Ok(params.residue(level))
}

/// The residue class `{l < h_J : l ≡ k mod q}` as a level set.
pub fn component_class(params: &SelfSimilarParams, component: u64, stage: u32) -> Result<LevelSet> {
    let q = params.similarity();
    if component >= q {
        return Err(Error::IndexOutOfRange {
            stage,
            level: format!("{component}"),
        });
    }
    if stage == 0 {
        return Err(Error::InvalidStage(stage));
    }
    let height = params.height(stage).to_u64().expect("class fits in memory");
    let levels = (component..height)
        .step_by(q as usize)
        .map(BigInt::from)
        .collect();
    Ok(LevelSet::from_sorted(stage, levels))
}

/// Invariance defect of each residue class under `T^q` at stage `J`.
pub fn component_discrepancies(
    params: &SelfSimilarParams,
    stage: u32,
    cap: u32,
) -> Result<Vec<ComponentDiscrepancy>> {
    let q = params.similarity();
    (0..q)
        .map(|k| {
            let class = component_class(params, k, stage)?;
            let moved = params.translate_set(&class, q, cap)?;
            let class = params.refine_set(&class, moved.stage())?;
            let w = params.width(moved.stage());
            let count = |n: usize| &w * BigRational::from_integer(BigInt::from(n));
            Ok(ComponentDiscrepancy {
                component: k,
                gained: count(moved.difference_len(&class)),
                lost: count(class.difference_len(&moved)),
            })
        })
        .collect()
}
