use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("stage {0} is not a valid stage index")]
    InvalidStage(u32),
    #[error("set or point does not fit below stage cap {cap}; raise the cap")]
    StageCapExceeded { cap: u32 },
    #[error("level {level} at stage {stage} is outside the invariant set")]
    NotInInvariantSet { stage: u32, level: String },
    #[error("level {level} is outside the stage-{stage} tower")]
    IndexOutOfRange { stage: u32, level: String },
    #[error("point is not a valid stage-{stage} coordinate")]
    InvalidPoint { stage: u32 },
    #[error("grid of {grid} points is not divisible by {divisor}")]
    GridNotDivisible { grid: usize, divisor: u64 },
    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{q} and {p} are not coprime")]
    NotCoprime { q: u64, p: u64 },
    #[error("polynomial does not define a Pisot number: {0}")]
    NotPisot(String),
    #[error("flow coefficient must exceed 2")]
    InvalidQ,
    #[error("similarity map is undefined on stage 1")]
    StageTooLow,
}
