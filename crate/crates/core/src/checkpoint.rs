//! Versioned JSON envelopes for everything that can be saved and resumed.
//!
//! Layout: `{"format": <name>, "version": <u32>, "payload": <object>}`. See
//! `docs/checkpoint-format.md` for the payload of each format.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    payload: T,
}

pub fn to_string<T: Serialize>(format: &str, payload: &T) -> Result<String> {
    serde_json::to_string(&Envelope {
        format: format.to_string(),
        version: VERSION,
        payload,
    })
    .map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn from_str<T: DeserializeOwned>(format: &str, text: &str) -> Result<T> {
    let env: Envelope<serde_json::Value> =
        serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
    if env.format != format {
        return Err(Error::Checkpoint(format!(
            "expected format {format:?}, found {:?}",
            env.format
        )));
    }
    if env.version != VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported {format} version {}",
            env.version
        )));
    }
    serde_json::from_value(env.payload).map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn save<T: Serialize>(path: impl AsRef<Path>, format: &str, payload: &T) -> Result<()> {
    let path = path.as_ref();
    let text = to_string(format, payload)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load<T: DeserializeOwned>(path: impl AsRef<Path>, format: &str) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_str(format, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_foreign_format_and_version() {
        let text = to_string("a", &vec![1.5, 2.0]).unwrap();
        assert_eq!(from_str::<Vec<f64>>("a", &text).unwrap(), vec![1.5, 2.0]);
        assert!(from_str::<Vec<f64>>("b", &text).is_err());
        let bumped = text.replace("\"version\":1", "\"version\":2");
        assert!(from_str::<Vec<f64>>("a", &bumped).is_err());
    }
}
