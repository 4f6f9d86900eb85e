//! Small helpers for reading JSON configuration objects while keeping
//! track of the dotted field path, so errors can name the offending key.

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// A JSON object together with its dotted path from the document root.
#[derive(Debug, Clone, Copy)]
pub struct Fields<'a> {
    obj: &'a Map<String, Value>,
    path: &'a str,
}

pub(crate) fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn config_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

impl<'a> Fields<'a> {
    pub fn new(value: &'a Value, path: &'a str) -> Result<Self> {
        match value.as_object() {
            Some(obj) => Ok(Self { obj, path }),
            None => Err(config_err(
                if path.is_empty() { "<root>" } else { path },
                "expected an object",
            )),
        }
    }

    pub fn path(&self) -> &str {
        self.path
    }

    pub fn field_path(&self, key: &str) -> String {
        join(self.path, key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.obj.get(key).is_some_and(|v| !v.is_null())
    }

    pub fn raw(&self, key: &str) -> Option<&'a Value> {
        self.obj.get(key).filter(|v| !v.is_null())
    }

    pub fn require(&self, key: &str) -> Result<&'a Value> {
        self.raw(key)
            .ok_or_else(|| config_err(self.field_path(key), "missing required field"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        as_f64(v, &self.field_path(key))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| as_f64(v, &self.field_path(key)))
            .transpose()
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>> {
        self.raw(key)
            .map(|v| {
                v.as_u64().ok_or_else(|| {
                    config_err(self.field_path(key), "expected a non-negative integer")
                })
            })
            .transpose()
    }

    pub fn opt_f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let path = self.field_path(key);
        let arr = v
            .as_array()
            .ok_or_else(|| config_err(path.clone(), "expected an array of numbers"))?;
        arr.iter()
            .enumerate()
            .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn opt_u64_list(&self, key: &str) -> Result<Option<Vec<u64>>> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let path = self.field_path(key);
        let arr = v
            .as_array()
            .ok_or_else(|| config_err(path.clone(), "expected an array of integers"))?;
        arr.iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_u64()
                    .ok_or_else(|| config_err(format!("{path}[{i}]"), "expected an integer"))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Rejects keys not in `known`; typos in config files otherwise pass silently.
    pub fn deny_unknown(&self, known: &[&str]) -> Result<()> {
        for key in self.obj.keys() {
            if !known.contains(&key.as_str()) {
                return Err(config_err(self.field_path(key), "unknown field"));
            }
        }
        Ok(())
    }
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| config_err(path, "expected a finite number"))
}

pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Error {
    config_err(field, message)
}
