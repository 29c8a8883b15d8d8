//! Failure classes and their stable exit codes.
//!
//! | code | kind            |
//! |------|-----------------|
//! | 0    | success         |
//! | 2    | input           |
//! | 3    | precision       |
//! | 4    | positivity      |
//! | 5    | certificate     |
//! | 6    | non_convergence |
//! | 7    | epsilon         |
//! | 8    | evaluation      |
//! | 9    | violation       |
//! | 10   | validation      |
//! | 11   | io              |

use lyapbound::ErrorKind;

#[derive(Debug)]
pub enum CliError {
    Core(lyapbound::Error),
    Usage(String),
    Io(String),
    /// `validate` ran but the map failed a check.
    ValidationFailed(String),
}

impl From<lyapbound::Error> for CliError {
    fn from(e: lyapbound::Error) -> Self {
        CliError::Core(e)
    }
}

pub fn kind_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => 2,
        ErrorKind::Precision => 3,
        ErrorKind::Positivity => 4,
        ErrorKind::Certificate => 5,
        ErrorKind::NonConvergence => 6,
        ErrorKind::Epsilon => 7,
        ErrorKind::Evaluation => 8,
        ErrorKind::Violation => 9,
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind().as_str(),
            CliError::Usage(_) => "input",
            CliError::Io(_) => "io",
            CliError::ValidationFailed(_) => "validation",
        }
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Core(e) => kind_code(e.kind()),
            CliError::Usage(_) => 2,
            CliError::ValidationFailed(_) => 10,
            CliError::Io(_) => 11,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Usage(m) | CliError::Io(m) | CliError::ValidationFailed(m) => m.clone(),
        }
    }

    /// `error kind=<kind> code=<n> message="<text>"` on one line.
    pub fn diagnostic(&self) -> String {
        format!(
            "error kind={} code={} message={}",
            self.kind(),
            self.code(),
            quote(&self.message())
        )
    }
}

/// Double-quoted value with `"` and `\` escaped and newlines folded.
pub fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' | '\r' => out.push(' '),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
