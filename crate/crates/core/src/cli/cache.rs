//! On-disk field cache keyed by `(name, K, B)`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::serial::{field_from, field_json};
use crate::error::{Error, Result};
use crate::fields::Field;
use crate::qseries::Truncation;

pub struct Cache {
    dir: PathBuf,
}

/// A cached field's identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Key {
    pub name: String,
    pub p_order: i32,
    pub buffer: i32,
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Cache(e.to_string())
}

/// Reversible file-name encoding: ASCII alphanumerics, `-` and `.` pass
/// through, everything else becomes `_xx` per byte.
fn encode(name: &str) -> String {
    let mut s = String::new();
    for b in name.bytes() {
        if b.is_ascii_alphanumeric() || b == b'-' || b == b'.' {
            s.push(b as char);
        } else {
            s.push_str(&format!("_{b:02x}"));
        }
    }
    s
}

fn decode(s: &str) -> Option<String> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'_' {
            out.push(u8::from_str_radix(s.get(i + 1..i + 3)?, 16).ok()?);
            i += 3;
        } else {
            out.push(b[i]);
            i += 1;
        }
    }
    String::from_utf8(out).ok()
}

impl Key {
    pub fn new(name: &str, tr: Truncation) -> Self {
        Key { name: name.to_string(), p_order: tr.p_order, buffer: tr.buffer }
    }

    fn file_name(&self) -> String {
        format!("{}.K{}.B{}.json", encode(&self.name), self.p_order, self.buffer)
    }

    fn parse_file_name(f: &str) -> Option<Key> {
        let stem = f.strip_suffix(".json")?;
        let (rest, b) = stem.rsplit_once(".B")?;
        let (name, k) = rest.rsplit_once(".K")?;
        Some(Key { name: decode(name)?, p_order: k.parse().ok()?, buffer: b.parse().ok()? })
    }
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &Key) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// The canonical payload stored for `field` under `key`.
    pub fn payload(key: &Key, field: &Field) -> Value {
        json!({ "name": key.name, "pOrder": key.p_order, "buffer": key.buffer, "field": field_json(field) })
    }

    pub fn get(&self, key: &Key) -> Result<Option<Field>> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io(e)),
        };
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        let stored = Key {
            name: v.get("name").and_then(Value::as_str).unwrap_or_default().to_string(),
            p_order: v.get("pOrder").and_then(Value::as_i64).unwrap_or(-1) as i32,
            buffer: v.get("buffer").and_then(Value::as_i64).unwrap_or(-1) as i32,
        };
        if &stored != key {
            return Err(Error::Cache(format!("{} holds {stored:?}, not {key:?}", path.display())));
        }
        let f = v.get("field").ok_or_else(|| Error::Cache(format!("{}: no field", path.display())))?;
        field_from(f).map(Some)
    }

    /// Write through a temporary file in the same directory, then rename.
    pub fn put(&self, key: &Key, field: &Field) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(io)?;
        let text = serde_json::to_string_pretty(&Cache::payload(key, field)).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        tmp.write_all(text.as_bytes()).map_err(io)?;
        tmp.write_all(b"\n").map_err(io)?;
        tmp.persist(self.path(key)).map_err(io)?;
        Ok(())
    }

    /// Cached keys in canonical order.
    pub fn list(&self) -> Result<Vec<Key>> {
        let rd = match fs::read_dir(&self.dir) {
            Ok(rd) => rd,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(vec![]),
            Err(e) => return Err(io(e)),
        };
        let mut keys = Vec::new();
        for entry in rd {
            let name = entry.map_err(io)?.file_name();
            if let Some(k) = name.to_str().and_then(Key::parse_file_name) {
                keys.push(k);
            }
        }
        keys.sort();
        Ok(keys)
    }

    /// Remove every cached entry; returns how many were removed.
    pub fn clear(&self) -> Result<usize> {
        let keys = self.list()?;
        for k in &keys {
            fs::remove_file(self.path(k)).map_err(io)?;
        }
        Ok(keys.len())
    }
}
