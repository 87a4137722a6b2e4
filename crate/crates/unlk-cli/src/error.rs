use thiserror::Error;

use unlk::deformations::DeformationError;
use unlk::ingest::IngestError;
use unlk::model::ModelError;
use unlk::morse_tree::TreeError;
use unlk::reeb_surface::SurfaceError;
use unlk::report::ReportError;
use unlk::sphere::SphereError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Compute(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Json(_) | ModelError::Version(_) => CliError::Malformed(e.to_string()),
            ModelError::Grid(g) => g.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::InvalidTree(_) | TreeError::Profile(_) => CliError::Validation(format!("morse_tree: {e}")),
            _ => CliError::Compute(format!("morse_tree: {e}")),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Invalid(_) | SurfaceError::MissingProfile(_) => CliError::Validation(format!("reeb_surface: {e}")),
            SurfaceError::UnknownCell(_) => CliError::Malformed(format!("reeb_surface: {e}")),
            SurfaceError::Tree(t) => t.into(),
            _ => CliError::Compute(format!("reeb_surface: {e}")),
        }
    }
}

impl From<DeformationError> for CliError {
    fn from(e: DeformationError) -> Self {
        match e {
            DeformationError::Tree(t) => t.into(),
            DeformationError::Shape(_) | DeformationError::Incompatible(_) | DeformationError::InvalidTruncation(_) => {
                CliError::Validation(format!("deformations: {e}"))
            }
            _ => CliError::Compute(format!("deformations: {e}")),
        }
    }
}

impl From<SphereError> for CliError {
    fn from(e: SphereError) -> Self {
        match e {
            SphereError::Shape(_) | SphereError::Domain => CliError::Validation(format!("sphere: {e}")),
            _ => CliError::Compute(format!("sphere: {e}")),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Malformed(_) | IngestError::NonzeroBoundary(_) => CliError::Malformed(format!("ingest: {e}")),
            IngestError::NonMorseGrid { .. } | IngestError::ValidationFailed(_) => CliError::Validation(format!("ingest: {e}")),
            IngestError::Tree(t) => t.into(),
            IngestError::Unsupported(_) => CliError::Compute(format!("ingest: {e}")),
        }
    }
}

impl From<ReportError> for CliError {
    fn from(e: ReportError) -> Self {
        CliError::Malformed(e.to_string())
    }
}
