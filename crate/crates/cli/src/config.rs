//! Versioned JSON config files.
//!
//! ```json
//! { "schema_version": 1, "pdc": { "beta_omega0": 0.6931, "method": "both" } }
//! ```
//!
//! Each section is keyed by subcommand name and uses the flag names with
//! underscores. Flags given on the command line win.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{ExampleArgs, PdcArgs, PhysicsArgs, ProjectArgs, SelftestArgs, SweepArgs, VacuumArgs};
use crate::Failure;

pub const SCHEMA_VERSION: u64 = 1;

/// Environment variable that replaces the default dimension guard.
pub const MAX_DIM_VAR: &str = "TFD_MAX_DIM";
pub const DEFAULT_MAX_DIM: usize = 2_000_000;

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    sections: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("config: cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let value: Value = serde_json::from_str(text).map_err(|e| Failure::Config(format!("config: {e}")))?;
        let Value::Object(mut sections) = value else {
            return Err(Failure::Config("config: top level must be an object".into()));
        };
        match sections.remove("schema_version") {
            Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(other) => {
                return Err(Failure::Config(format!(
                    "config: schema_version {other} is not supported (expected {SCHEMA_VERSION})"
                )))
            }
            None => return Err(Failure::Config("config: missing field schema_version".into())),
        }
        Ok(ConfigFile { sections })
    }

    /// Fills the flags left unset from the file section for `command`.
    pub fn resolve<T>(&self, command: &str, flags: &T) -> Result<T, Failure>
    where
        T: Overlay + Serialize + DeserializeOwned + Default,
    {
        let Some(section) = self.sections.get(command) else {
            return Ok(flags.clone());
        };
        let Value::Object(section) = section else {
            return Err(Failure::Config(format!("config: section {command} must be an object")));
        };
        let known = as_object(&T::default());
        if let Some(key) = section.keys().find(|k| !known.contains_key(*k)) {
            return Err(Failure::Config(format!("config: unknown field {command}.{key}")));
        }
        let file: T = serde_json::from_value(Value::Object(section.clone()))
            .map_err(|e| Failure::Config(format!("config: {command}: {e}")))?;
        Ok(flags.clone().overlay(file))
    }
}

/// Field-wise merge where `self` wins over `fallback`.
pub trait Overlay: Clone {
    fn overlay(self, fallback: Self) -> Self;
}

macro_rules! overlay_options {
    ($ty:ty { $($field:ident),* } $(nested { $($inner:ident),* })? $(lists { $($list:ident),* })?) => {
        impl Overlay for $ty {
            fn overlay(self, fallback: Self) -> Self {
                Self {
                    $($field: self.$field.or(fallback.$field),)*
                    $($($inner: self.$inner.overlay(fallback.$inner),)*)?
                    $($($list: if self.$list.is_empty() { fallback.$list } else { self.$list },)*)?
                }
            }
        }
    };
}

overlay_options!(VacuumArgs { statistics, beta_omega, omega, cutoff, tolerance });
overlay_options!(PhysicsArgs {
    beta_omega0, omega0, omega1, omega2, kappa, t, pump_cutoff, signal_cutoff, idler_cutoff, tolerance
});
overlay_options!(PdcArgs { method } nested { physics });
overlay_options!(ProjectArgs { n_hat, n_tilde, source } nested { physics });
overlay_options!(SweepArgs { from, to, step } nested { physics } lists { values });
overlay_options!(SelftestArgs { seed, count });
overlay_options!(ExampleArgs { pump_cutoff });

fn as_object<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value).expect("args serialize") {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

/// Dimension guard, from the environment when set.
pub fn max_dim() -> Result<usize, Failure> {
    match std::env::var(MAX_DIM_VAR) {
        Err(_) => Ok(DEFAULT_MAX_DIM),
        Ok(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Failure::Config(format!("{MAX_DIM_VAR}: not a number: {raw:?}")))?;
            if !(v >= 1.0) || !v.is_finite() || v.fract() != 0.0 {
                return Err(Failure::Config(format!("{MAX_DIM_VAR}: must be a positive integer, got {raw:?}")));
            }
            Ok(v as usize)
        }
    }
}
