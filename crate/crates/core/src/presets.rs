//! Configurations shipped with the binary.

use crate::config::{parse_config, SimConfig};
use crate::error::SimError;

/// `(name, toml)` for every embedded preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("equilibrium", include_str!("../presets/equilibrium.toml")),
    ("quarter-five-spot-16", include_str!("../presets/quarter-five-spot-16.toml")),
    ("quarter-five-spot-32", include_str!("../presets/quarter-five-spot-32.toml")),
    ("gravity", include_str!("../presets/gravity.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn preset(name: &str) -> Result<SimConfig, SimError> {
    let text = text(name).ok_or_else(|| SimError::Config(format!("unknown preset '{name}' (known: {})", names().collect::<Vec<_>>().join(", "))))?;
    parse_config(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_parse() {
        for name in names() {
            let cfg = preset(name).unwrap();
            cfg.build().unwrap();
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn five_spot_is_compatible() {
        let cfg = preset("quarter-five-spot-16").unwrap();
        let w = cfg.well_set().unwrap();
        assert_eq!(w.compatibility_mismatch(0.0), 0.0);
        assert_eq!(w.atoms.len(), 2);
    }
}
