use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::StoreError;

/// Which side of the testbed produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Emulated,
    Simulated,
    Setpoint,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Emulated => "emulated",
            Source::Simulated => "simulated",
            Source::Setpoint => "setpoint",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "emulated" | "emu" => Ok(Source::Emulated),
            "simulated" | "sim" => Ok(Source::Simulated),
            "setpoint" | "spt" => Ok(Source::Setpoint),
            other => Err(StoreError::InvalidKey(format!("unknown source `{other}`"))),
        }
    }
}

/// Identity of one exchanged variable: `(name, source)` plus its unit label.
///
/// Ordering and equality consider all three fields, but a store refuses to
/// register two keys sharing `(name, source)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VariableKey {
    name: String,
    source: Source,
    unit: String,
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == ',' || c == '"')
}

impl VariableKey {
    pub fn new(name: impl Into<String>, source: Source, unit: impl Into<String>) -> Result<Self, StoreError> {
        let name = name.into();
        let unit = unit.into();
        if !valid_token(&name) {
            return Err(StoreError::InvalidKey(format!("bad variable name `{name}`")));
        }
        if !valid_token(&unit) {
            return Err(StoreError::InvalidKey(format!("bad unit `{unit}` for `{name}`")));
        }
        Ok(Self { name, source, unit })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    /// True when `other` addresses the same `(name, source)` slot.
    pub fn same_slot(&self, other: &VariableKey) -> bool {
        self.name == other.name && self.source == other.source
    }
}

impl fmt::Display for VariableKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.source)
    }
}

/// A `name:source` reference as typed on the command line (unit unknown).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRef {
    pub name: String,
    pub source: Source,
}

impl KeyRef {
    pub fn matches(&self, key: &VariableKey) -> bool {
        key.name() == self.name && key.source() == self.source
    }
}

impl FromStr for KeyRef {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, source) = s
            .rsplit_once(':')
            .ok_or_else(|| StoreError::InvalidKey(format!("expected name:source, got `{s}`")))?;
        if !valid_token(name) {
            return Err(StoreError::InvalidKey(format!("bad variable name `{name}`")));
        }
        Ok(KeyRef {
            name: name.to_string(),
            source: source.parse()?,
        })
    }
}

impl fmt::Display for KeyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.source)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_whitespace_and_empty_names() {
        assert!(VariableKey::new("zone 1.T", Source::Emulated, "degC").is_err());
        assert!(VariableKey::new("", Source::Emulated, "degC").is_err());
        assert!(VariableKey::new("zone1.T", Source::Emulated, "degC").is_ok());
    }

    #[test]
    fn key_ref_parses_cli_syntax() {
        let k: KeyRef = "zone.T:emulated".parse().unwrap();
        assert_eq!(k.name, "zone.T");
        assert_eq!(k.source, Source::Emulated);
        assert!("zone.T".parse::<KeyRef>().is_err());
        assert!("zone.T:bogus".parse::<KeyRef>().is_err());
    }
}
