//! JSON newform files.
//!
//! ```json
//! {"level": 5, "weight": 4, "label": "5.4.a.a", "fricke": 1,
//!  "coefficients": [1, -4, 2, "123456789012345678901234567890", "0.25"]}
//! ```
//!
//! Coefficients are JSON integers, or strings holding an integer or an exact
//! decimal. Floating-point literals and unknown keys are rejected.

use std::fmt;
use std::path::Path;

use heegner_core::modforms::{Coefficient, Newform};
use num_bigint::BigInt;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewformFile {
    level: u64,
    weight: u32,
    label: String,
    #[serde(default)]
    fricke: Option<i8>,
    coefficients: Vec<Entry>,
}

struct Entry(Coefficient);

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(EntryVisitor)
    }
}

struct EntryVisitor;

impl Visitor<'_> for EntryVisitor {
    type Value = Entry;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer, or a string holding an integer or exact decimal")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Entry, E> {
        Ok(Entry(Coefficient::Integer(v.into())))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Entry, E> {
        Ok(Entry(Coefficient::Integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Entry, E> {
        Err(E::custom(format!("floating-point coefficient {v}; write decimals and integers beyond 64 bits as strings")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Entry, E> {
        let s = v.trim();
        if let Ok(n) = s.parse::<BigInt>() {
            return Ok(Entry(Coefficient::Integer(n)));
        }
        Coefficient::parse_decimal(s).map(Entry).map_err(|e| E::custom(format!("coefficient {v:?}: {e}")))
    }
}

/// A parsed newform with the SHA-256 of its file.
#[derive(Clone, Debug)]
pub struct LoadedNewform {
    pub newform: Newform,
    pub sha256: String,
}

pub fn parse_newform(text: &str, origin: &str) -> Result<Newform> {
    let file: NewformFile =
        serde_json::from_str(text).map_err(|e| CliError::parse("modforms", format!("{origin}: {e}")))?;
    let coeffs = file.coefficients.into_iter().map(|e| e.0).collect();
    Ok(Newform::new(file.level, file.weight, file.label, file.fricke, coeffs)?)
}

pub fn load_newform(path: &Path) -> Result<LoadedNewform> {
    let bytes = std::fs::read(path).map_err(|e| CliError::parse("modforms", format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::parse("modforms", format!("{}: not UTF-8: {e}", path.display())))?;
    let newform = parse_newform(text, &path.display().to_string())?;
    Ok(LoadedNewform { newform, sha256: hex(&Sha256::digest(&bytes)) })
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
