use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ply: {0}")]
    InvalidPly(String),
    #[error("layup has no plies")]
    EmptyLayup,
    #[error("section is not symmetric: coupling {coupling:.3e} exceeds {limit:.3e}")]
    Coupling { coupling: f64, limit: f64 },
    #[error("singular laminate stiffness")]
    SingularAbd,
    #[error("degenerate element: {0}")]
    Degenerate(String),
    #[error("point ({0}, {1}) lies outside the triangle")]
    OutsideTriangle(f64, f64),
    #[error("invalid cohesive properties: {0}")]
    Cohesive(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("no propagation solution: {0}")]
    NoPropagation(String),
    #[error("matrix is not positive definite at equation {0}")]
    NotPositiveDefinite(usize),
    #[error("no convergence at control value {control:.6e} after {cuts} cuts")]
    NoConvergence { control: f64, cuts: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
