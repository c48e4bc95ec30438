use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent input.
    #[error("{0}")]
    Input(String),
    /// A numerical failure or a failed check.
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Core(#[from] bbw_core::Error),
}

impl CliError {
    /// 2 for bad input, 1 for numerical trouble.
    pub fn exit_code(&self) -> u8 {
        use bbw_core::Error as E;
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 1,
            CliError::Core(
                E::Domain { .. }
                | E::InvalidFamily(_)
                | E::InvalidGrid(_)
                | E::GridTooSmall { .. }
                | E::Shape { .. }
                | E::DerivativeOrder { .. }
                | E::UnsupportedPoint { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}
