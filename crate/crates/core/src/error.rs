use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph is not simple: {0}")]
    NotSimple(String),
    #[error("graph is disconnected: vertex {unreached} is not reachable from vertex 0")]
    Disconnected { unreached: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("root {root} is not a vertex of a graph with {vertex_count} vertices")]
    InvalidRoot { root: usize, vertex_count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalanceError {
    #[error("cannot build a tree over zero items")]
    EmptyInput,
    #[error("item {index} has weight 0; weights must be at least 1")]
    ZeroWeight { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("bad magic bytes, expected \"SGE1\"")]
    BadMagic,
    #[error("unsupported format version {0}")]
    VersionMismatch(u8),
    #[error("stream ended early while reading {0}")]
    TruncatedStream(&'static str),
    #[error("vertex {vertex}: x length {len_x} exceeds y length {len_y}")]
    LengthViolation { vertex: usize, len_x: usize, len_y: usize },
    #[error("vertex {vertex}: address of {len} bits does not fit a u16 length field")]
    LengthOverflow { vertex: usize, len: usize },
    #[error("{0} trailing bytes after the last record")]
    TrailingBytes(usize),
    #[error("malformed JSON coordinates: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("dead end at vertex {at} routing toward {destination}: no neighbor is strictly closer")]
    DeadEnd { at: usize, destination: usize },
    #[error("route from {from} to {destination} exceeded {limit} hops")]
    HopLimitExceeded { from: usize, destination: usize, limit: usize },
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),
    #[error("source and destination are both {0}")]
    SameEndpoints(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HyperbolicError {
    #[error("precision of {precision} bits exhausted: hyperboloid drift 2^{drift_log2} exceeds tolerance 2^-{tolerance_bits}")]
    PrecisionExhausted { precision: usize, drift_log2: i64, tolerance_bits: usize },
    #[error("Minkowski product below 1: points are not on the hyperboloid")]
    DomainError,
    #[error("frame for address {0} was not placed")]
    MissingFrame(String),
    #[error("{vertices} vertices exceeds the render limit of {limit}")]
    RenderLimitExceeded { vertices: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
