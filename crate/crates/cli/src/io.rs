use std::fs;
use std::io::Read;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Exit status plus the JSON document printed on standard output.
pub struct Report {
    pub code: u8,
    pub body: Value,
}

impl Report {
    pub fn ok(v: impl Serialize) -> Self {
        Report::with(0, v)
    }

    pub fn negative(v: impl Serialize) -> Self {
        Report::with(1, v)
    }

    pub fn with(code: u8, v: impl Serialize) -> Self {
        Report {
            code,
            body: serde_json::to_value(v).expect("outputs serialise"),
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(m: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: m.to_string(),
        }
    }

    pub fn budget(m: impl std::fmt::Display) -> Self {
        Failure {
            code: 3,
            message: m.to_string(),
        }
    }
}

pub type Outcome = Result<Report, Failure>;

/// Reads JSON from a file, or from standard input when the path is `-`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("malformed input {}: {e}", path.display())))
}

pub fn parse_json<T: DeserializeOwned>(what: &str, text: &str) -> Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::usage(format!("malformed {what}: {e}")))
}
