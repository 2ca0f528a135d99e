//! Named configurations checked into the crate. Presets marked `long` run
//! at full resolution and take hours on a single core.

use crate::config::RunConfig;
use crate::error::{CliError, Result};

macro_rules! preset {
    ($name:literal) => {
        ($name, include_str!(concat!("../presets/", $name, ".toml")))
    };
}

pub const PRESETS: &[(&str, &str)] = &[
    preset!("critical_s025_gaussian"),
    preset!("critical_s025_sech"),
    preset!("critical_s025_sech_n16"),
    preset!("critical_s025_sech_n17"),
    preset!("critical_s025_supergaussian"),
    preset!("linear_s025_sech"),
    preset!("linear_s02_sech"),
    preset!("linear_s04_sech"),
    preset!("linear_s05_sech"),
    preset!("linear_s08_sech"),
    preset!("linear_s1_sech"),
    preset!("p3_s025_gaussian_amp2"),
    preset!("p3_s025_supergaussian"),
    preset!("p4_s025_supergaussian"),
    preset!("quintic_s025_supergaussian"),
    preset!("subcritical_s08_sech"),
    preset!("subcritical_s1_sech"),
    preset!("super_s015_supergaussian"),
    preset!("super_s019_supergaussian"),
    preset!("super_s02_gaussian"),
    preset!("super_s02_sech"),
    preset!("super_s02_sech_long"),
    preset!("super_s02_supergaussian"),
];

pub fn preset_source(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, src)| *src)
}

pub fn load_preset(name: &str, overrides: &[String]) -> Result<RunConfig> {
    let src = preset_source(name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        CliError::config("preset", format!("unknown preset {name:?}; known: {}", known.join(", ")))
    })?;
    RunConfig::from_toml_with(src, overrides)
}
