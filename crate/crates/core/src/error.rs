use crate::fields::FieldsError;
use crate::grid::GridError;
use crate::linalg::LinalgError;
use crate::wells::WellError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Fields(#[from] FieldsError),
    #[error(transparent)]
    Wells(#[from] WellError),
    #[error("{stage} solve failed at step {step}: {source}")]
    Solver {
        stage: &'static str,
        step: usize,
        #[source]
        source: LinalgError,
    },
    #[error("(3.6) maximum principle violated at step {step}: c in [{min:.3e}, {max:.3e}]")]
    MaximumPrinciple { step: usize, min: f64, max: f64 },
    #[error("Picard iteration did not converge at step {step}: |dc| = {change:.3e} after {iterations} iterations")]
    Picard { step: usize, iterations: usize, change: f64 },
    #[error("(2.7) initial concentration {value} in cell {cell} outside [0, 1]")]
    InitialConcentration { cell: usize, value: f64 },
    #[error("(2.1) final time must be positive and finite, got {0}")]
    FinalTime(f64),
    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),
    #[error("initial field has {got} values, grid has {expected} cells")]
    Length { got: usize, expected: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
