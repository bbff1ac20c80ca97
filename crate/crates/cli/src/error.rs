use anosov_core::automaton::GraphError;
use anosov_core::pants::PantsError;
use anosov_core::pressure::PressureError;
use anosov_core::prox::ProxError;
use anosov_core::rep::RepError;
use anosov_core::weyl::WeylError;
use thiserror::Error;

/// Failure of a command, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 2.
    #[error("{0}")]
    Input(String),
    /// A computation failed on valid input; exit code 3.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) => 2,
            Self::Numeric(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Self::Numeric(msg.into())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        Self::Input(e.to_string())
    }
}

impl From<ProxError> for CliError {
    fn from(e: ProxError) -> Self {
        match e {
            ProxError::Dimension(_) | ProxError::NotSquare | ProxError::NonFinite | ProxError::Singular => {
                Self::Input(e.to_string())
            }
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<PressureError> for CliError {
    fn from(e: PressureError) -> Self {
        match e {
            PressureError::BadEntry(..) | PressureError::WeightLength { .. } => Self::Input(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<RepError> for CliError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::Prox(p) => p.into(),
            RepError::Pressure(p) => p.into(),
            RepError::UnknownSymbol(_)
            | RepError::DimensionMismatch { .. }
            | RepError::GeneratorShape(_)
            | RepError::Empty
            | RepError::NoStart
            | RepError::Graph(_)
            | RepError::Weyl(_) => Self::Input(e.to_string()),
            _ => Self::Numeric(e.to_string()),
        }
    }
}

impl From<PantsError> for CliError {
    fn from(e: PantsError) -> Self {
        match e {
            PantsError::NonPositive { .. } => Self::Input(e.to_string()),
            PantsError::Rep(r) => r.into(),
            PantsError::Prox(p) => p.into(),
            PantsError::Pressure(p) => p.into(),
            PantsError::NonPositiveWeight { .. } => Self::Numeric(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let input: CliError = PantsError::NonPositive { name: "Z1", value: 0.0 }.into();
        assert_eq!(input.exit_code(), 2);
        let weight: CliError = RepError::NonPositiveWeight {
            label: "a".into(),
            value: 0.0,
        }
        .into();
        assert_eq!(weight.exit_code(), 3);
        let nested: CliError = PantsError::Rep(RepError::Pressure(PressureError::NoConvergence(5))).into();
        assert_eq!(nested.exit_code(), 3);
        let shape: CliError = RepError::Prox(ProxError::Singular).into();
        assert_eq!(shape.exit_code(), 2);
        let graph: CliError = GraphError::NoStart.into();
        assert_eq!(graph.exit_code(), 2);
    }
}
