use std::fmt;

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input. Exit code 1.
    Input(anyhow::Error),
    /// Everything else: backend outages, output errors, bugs. Exit code 2.
    Internal(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (label, e) = match self {
            Failure::Input(e) => ("input error", e),
            Failure::Internal(e) => ("internal error", e),
        };
        write!(f, "{label}: {e}")?;
        // Many library errors already embed their cause in their message.
        let mut prev = e.to_string();
        for cause in e.chain().skip(1) {
            let msg = cause.to_string();
            if !prev.ends_with(&msg) {
                write!(f, ": {msg}")?;
            }
            prev = msg;
        }
        Ok(())
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub trait Classify<T> {
    fn input(self) -> CliResult<T>;
    fn internal(self) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn input(self) -> CliResult<T> {
        self.map_err(|e| Failure::Input(e.into()))
    }

    fn internal(self) -> CliResult<T> {
        self.map_err(|e| Failure::Internal(e.into()))
    }
}

pub fn input_error(msg: impl fmt::Display) -> Failure {
    Failure::Input(anyhow::anyhow!("{msg}"))
}
