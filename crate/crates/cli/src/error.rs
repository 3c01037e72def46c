use bergman_coorbit::Error;

/// Failures surfaced by the CLI, each mapped to a process exit code.
#[derive(Debug)]
pub enum CliError {
    /// `(field, message)` pairs.
    Config(Vec<(String, String)>),
    Numerical(Error),
    Capacity(Error),
    Io(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        CliError::Config(vec![(field.into(), msg.into())])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Stable identifier written to stderr alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Capacity(_) => "capacity_exceeded",
            CliError::Io(_) => "io_error",
            CliError::Numerical(e) => match e {
                Error::InvalidGroupElement(_) => "invalid_group_element",
                Error::OutsideBall(_) => "outside_ball",
                Error::DimensionMismatch { .. } => "dimension_mismatch",
                Error::Domain(_) => "domain_error",
                Error::Degenerate(_) => "degenerate_action",
                Error::ConvergenceFailure(_) => "convergence_failure",
                Error::UnsupportedAtomExponent { .. } => "unsupported_atom_exponent",
                Error::NumericalBlowup(_) => "numerical_blowup",
                Error::DegenerateFamily(_) => "degenerate_family",
                Error::CapacityExceeded { .. } => "capacity_exceeded",
            },
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CapacityExceeded { .. } => CliError::Capacity(e),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(errs) => {
                for (i, (field, msg)) in errs.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{field}: {msg}")?;
                }
                Ok(())
            }
            CliError::Numerical(e) | CliError::Capacity(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}
