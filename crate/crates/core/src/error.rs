use thiserror::Error;

use crate::window::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: {}", format_violations(.0))]
    InvalidWindow(Vec<Violation>),
    #[error("malformed window file: {0}")]
    Parse(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("dangling end `{end}` on edge `{edge}`")]
    DanglingEnd { edge: String, end: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("unknown cylinder `{0}`")]
    UnknownCylinder(String),
    #[error("cylinder `{0}` is not complete")]
    IncompleteCylinder(String),
    #[error("vertex `{vertex}` is not on the boundary of cylinder `{cyl}`")]
    NotOnBoundary { vertex: String, cyl: String },
    #[error("vertex `{vertex}` does not lie on cylinder `{cyl}`")]
    NotOnCylinder { vertex: String, cyl: String },
    #[error("edge `{edge}` has no end `{vertex}`")]
    NotAnEnd { edge: String, vertex: String },
    #[error("classes based on different cylinders `{0}` and `{1}`")]
    CylinderMismatch(String, String),
    #[error("cylinder `{cyl}` has {atoms} infinite atoms, over the enumeration cap {cap}")]
    CapExceeded { cyl: String, atoms: usize, cap: u64 },
    #[error("too many atoms for a bit mask ({0} > 64)")]
    TooWide(usize),
    #[error("vertex `{0}` is not a QH vertex")]
    NotQh(String),
    #[error("missing side assignment for cylinder `{cyl}` at `{vertex}`")]
    MissingSide { vertex: String, cyl: String },
    #[error("crossing of two distinct QH classes at `{0}` is undetermined")]
    QhSameVertex(String),
    #[error("cylinder `{0}` has a single boundary vertex")]
    SingleBoundary(String),
    #[error("projection undefined: {0}")]
    Projection(String),
    #[error("expected pairwise distinct cross-connected components")]
    NotDistinct,
    #[error("need at least 3 cross-connected components, found {0}")]
    TooFewCccs(usize),
    #[error("window has no cross-connected components")]
    NoCccs,
    #[error("not a window automorphism: {0}")]
    NotAutomorphism(String),
    #[error("generator parameters: {0}")]
    BadParams(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
