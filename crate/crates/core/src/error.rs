use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("size mismatch: {what} ({left} vs {right})")]
    SizeMismatch { what: &'static str, left: usize, right: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("block {0} is empty")]
    EmptyBlock(usize),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("processor graph is disconnected")]
    Disconnected,

    #[error("source and target coincide (node {0})")]
    SameEndpoints(usize),

    #[error("baseline {0} is zero; ratio undefined")]
    ZeroBaseline(&'static str),

    #[error("missing baseline `{algorithm}` for {class}/{topology}")]
    MissingBaseline { class: String, topology: String, algorithm: String },

    #[error("no matching row for key {0}")]
    KeyMismatch(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
