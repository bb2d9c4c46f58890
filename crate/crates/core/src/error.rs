use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("constraint has zero coefficients on both axes")]
    DegenerateConstraint,
    #[error("invalid objective: {0}")]
    InvalidObjective(&'static str),
    #[error("constraint system is infeasible")]
    Infeasible,
    #[error("rank {k} is out of range (feasible count {count})")]
    RankOutOfRange { k: u64, count: u64 },
    #[error("both constraints are parallel to the objective")]
    ParallelToObjective,
    #[error("the two constraints are parallel; use the parallel engine")]
    ParallelConstraints,
    #[error("constraints are not parallel")]
    NotParallel,
    #[error("every feasible point has x = 0, so the ratio objective is infinite everywhere")]
    AllInfinite,
    #[error("no feasible value satisfies the query")]
    NoSuchValue,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
