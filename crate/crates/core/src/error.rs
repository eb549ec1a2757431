use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |ρ - ρ†| = {0:e}")]
    NotHermitian(f64),
    #[error("matrix does not have unit trace: |tr ρ - 1| = {0:e}")]
    NotUnitTrace(f64),
    #[error("matrix is not positive semidefinite: minimum eigenvalue = {0:e}")]
    NotPositive(f64),
    #[error("matrix is not in SO(3): orthogonality defect {orthogonality:e}, det = {det}")]
    NotSpecialOrthogonal { orthogonality: f64, det: f64 },
    #[error("{family}: parameters outside the positivity region ({detail})")]
    OutOfPositivityRegion { family: &'static str, detail: String },
    #[error("measurement axis is not a unit vector: |v| = {0}")]
    NotUnitAxis(f64),
    #[error("inner radicand g1^2 - g2 = {0:e} is negative beyond rounding")]
    NegativeRadicand(f64),
    #[error("degenerate outer gap λ̂1 - λ̂3 = {0:e}; use the degenerate-spectrum formulas")]
    DegenerateGap(f64),
    #[error("unknown state family `{0}`")]
    UnknownFamily(String),
    #[error("family `{family}` has no parameter `{param}` (expected one of: {expected})")]
    UnknownParameter {
        family: &'static str,
        param: String,
        expected: String,
    },
    #[error("internal consistency: {0}")]
    InternalConsistency(String),
    #[error("certification failed: {0}")]
    CertificationFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
