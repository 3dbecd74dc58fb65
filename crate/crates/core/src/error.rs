use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("vector of length {radius} m is outside the object-vector range (0, {max}]")]
    OutOfRange { radius: f64, max: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid config: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("edge from node {0} to itself")]
    SelfEdge(NodeId),
    #[error("no engram pattern within the overlap limit after {0} attempts")]
    PatternSpaceExhausted(u32),
    #[error("graph import: {0}")]
    Import(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no part is currently represented")]
    NoActivePart,
    #[error("node {0} has no grid location")]
    NoGridLocation(NodeId),
    #[error("no object-vector cell for node {0} lies within range")]
    NoCandidateInRange(NodeId),
    #[error("no edge joins nodes {0} and {1}")]
    NoRelation(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("unknown part {0}")]
    UnknownPart(u32),
    #[error("part {part} is {distance} m away, beyond sensor range {max} m")]
    OutOfSensorRange { part: u32, distance: f64, max: f64 },
    #[error("agent stands on part {0}")]
    AgentOnPart(u32),
    #[error("could not place {n_parts} parts at separation {min_separation} m")]
    PackingInfeasible { n_parts: usize, min_separation: f64 },
    #[error("invalid action: {0}")]
    InvalidAction(String),
}

/// Failure running a scenario. Each kind maps to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("scenario schema: {0}")]
    Schema(String),
    #[error("runtime: {0}")]
    Runtime(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Schema(_) => 2,
            HarnessError::Runtime(_) | HarnessError::Io(_) => 3,
        }
    }
}
