use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra: {0}")]
    Algebra(String),
    #[error("group: {0}")]
    Group(String),
    #[error("hopf: {0}")]
    Hopf(String),
    #[error("coaction: {0}")]
    Coaction(String),
    #[error("tower: {0}")]
    Tower(String),
    #[error("spec file: {0}")]
    Spec(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
