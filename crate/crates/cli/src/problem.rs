//! JSON problem files.

use std::path::Path;

use clap::ValueEnum;
use minksum_core::geometry::{normalize_constraint, Constraint, Objective, Point, Relation};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::number::{is_integral, CliNum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Int,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    #[default]
    Auto,
    Oracle,
    Deterministic,
    Randomized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConstraint {
    pub a: Value,
    pub b: Value,
    pub c: Value,
    #[serde(default = "default_op")]
    pub op: Op,
}

fn default_op() -> Op {
    Op::Ge
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Linear,
    Ratio,
}

/// `linear`: `d*x + e*y` with coeffs `[d, e]`. `ratio`: `b*y / (a*x)` with
/// coeffs `[a, b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawObjective {
    #[serde(rename = "type")]
    pub kind: ObjectiveKind,
    pub coeffs: [Value; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryKind {
    Select,
    Rank,
    Find,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Select => "select",
            QueryKind::Rank => "rank",
            QueryKind::Find => "find",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQuery {
    pub kind: QueryKind,
    pub value: Value,
}

/// A problem file as written on disk. Numbers stay as JSON values until the
/// mode is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "P")]
    pub p: Vec<[Value; 2]>,
    #[serde(rename = "Q")]
    pub q: Vec<[Value; 2]>,
    #[serde(default)]
    pub constraints: Vec<RawConstraint>,
    pub objective: RawObjective,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<RawQuery>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(format!("problem file: {e}")))
    }

    /// Reads a problem file; `-` reads standard input.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        Self::parse(&read_input(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem files always serialize")
    }

    /// Integer mode when every coordinate and coefficient is integral. The
    /// query value is left out: integer mode takes rational targets.
    pub fn detect_mode(&self) -> Mode {
        let mut values = self.p.iter().chain(&self.q).flatten();
        let points_int = values.all(is_integral);
        let cons_int = self.constraints.iter().all(|c| [&c.a, &c.b, &c.c].into_iter().all(is_integral));
        if points_int && cons_int && self.objective.coeffs.iter().all(is_integral) {
            Mode::Int
        } else {
            Mode::Float
        }
    }

    pub fn typed<T: CliNum>(&self) -> Result<Problem<T>, CliError> {
        let points = |pts: &[[Value; 2]], name: &str| -> Result<Vec<Point<T>>, CliError> {
            pts.iter()
                .enumerate()
                .map(|(i, [x, y])| {
                    Ok(Point::new(T::from_json(x, &format!("{name}[{i}].x"))?, T::from_json(y, &format!("{name}[{i}].y"))?))
                })
                .collect()
        };
        let p = points(&self.p, "P")?;
        let q = points(&self.q, "Q")?;
        let constraints = self
            .constraints
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let field = |v: &Value, f: &str| T::from_json(v, &format!("constraints[{i}].{f}"));
                let rel = match c.op {
                    Op::Ge => Relation::Ge,
                    Op::Gt => Relation::Gt,
                    Op::Le => Relation::Le,
                    Op::Lt => Relation::Lt,
                };
                normalize_constraint(field(&c.a, "a")?, field(&c.b, "b")?, rel, field(&c.c, "c")?)
                    .map_err(|e| CliError::Schema(format!("constraints[{i}]: {e}")))
            })
            .collect::<Result<Vec<Constraint<T>>, CliError>>()?;
        let [u, v] = &self.objective.coeffs;
        let (u, v) = (T::from_json(u, "objective.coeffs[0]")?, T::from_json(v, "objective.coeffs[1]")?);
        let objective = match self.objective.kind {
            ObjectiveKind::Linear => Objective::Linear { d: u, e: v },
            ObjectiveKind::Ratio => Objective::Ratio { a: u, b: v },
        };
        objective.validate().map_err(|e| CliError::Schema(format!("objective: {e}")))?;
        Ok(Problem { p, q, constraints, objective })
    }
}

/// A problem with numbers parsed in a fixed mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem<T> {
    pub p: Vec<Point<T>>,
    pub q: Vec<Point<T>>,
    pub constraints: Vec<Constraint<T>>,
    pub objective: Objective<T>,
}

pub(crate) fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| CliError::Schema(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}
