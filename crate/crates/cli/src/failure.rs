use std::process::ExitCode;

use serde::Serialize;
use usvsim::Error;

/// A failed invocation, reported on stderr as one JSON object.
#[derive(Debug, Serialize)]
pub struct Failure {
    /// "validation" or "runtime"
    pub kind: &'static str,
    pub code: u8,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub problems: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

impl Failure {
    pub fn validation(message: impl Into<String>, problems: Vec<String>) -> Self {
        Self {
            kind: "validation",
            code: 1,
            message: message.into(),
            problems,
            line: None,
        }
    }

    pub fn usage(message: String) -> Self {
        Self::validation(message.trim_end().to_string(), Vec::new())
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            kind: "runtime",
            code: 2,
            message: message.into(),
            problems: Vec::new(),
            line: None,
        }
    }

    /// Prefix the message with where the problem came from.
    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }

    pub fn report(self) -> ExitCode {
        let text = serde_json::to_string(&self)
            .unwrap_or_else(|_| format!(r#"{{"kind":"{}","code":{}}}"#, self.kind, self.code));
        eprintln!("{text}");
        ExitCode::from(self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        if !e.is_validation() {
            return Self::runtime(message);
        }
        let mut f = Self::validation(message, Vec::new());
        match e {
            Error::InvalidScenario(problems) => f.problems = problems,
            Error::Parse { line, .. } => f.line = Some(line),
            _ => {}
        }
        f
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::runtime(e.to_string())
    }
}
