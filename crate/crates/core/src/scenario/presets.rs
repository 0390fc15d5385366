//! Built-in scenarios.

use super::Scenario;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub toml: &'static str,
}

impl Preset {
    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::from_toml(self.toml)
    }
}

const PRESETS: &[Preset] = &[
    Preset {
        name: "ab-circle",
        description: "Aharonov-Bohm ring C8: flux sweep against the closed-form spectrum, three distinct sectors",
        toml: r#"
name = "ab-circle"
description = "Aharonov-Bohm ring C8"
seed = 1
reps = ["theta:0", "theta:0.25", "theta:0.5"]

[complex]
kind = "cycle"
n = 8

[[steps]]
step = "pi1"

[[steps]]
step = "holonomy-checks"

[[steps]]
step = "spectrum"
theta_sweep = 16
distinct_spectra = true
"#,
    },
    Preset {
        name: "identical-particles-s3",
        description: "S3 presentation complex: bosonic, fermionic and 2-dim sectors, full-cover decomposition",
        toml: r#"
name = "identical-particles-s3"
description = "Presentation complex of S3 = <a, b | a^2, b^2, (ab)^3>"
seed = 2
reps = ["irrep:0", "irrep:1", "irrep:2"]

[complex]
kind = "presentation"
generators = ["a", "b"]
relators = ["a2", "b2", "(ab)3"]

[[steps]]
step = "pi1"

[[steps]]
step = "holonomy-checks"

[[steps]]
step = "identical-particles"

[[steps]]
step = "spectrum"
distinct_spectra = true

[[steps]]
step = "cover-decompose"

[[steps]]
step = "nonl2"
rep = "irrep:2"
form = "trace"
expect_quotient_dim = 4

[[steps]]
step = "amenability"
expect_amenable = true
"#,
    },
    Preset {
        name: "free-group-holes",
        description: "Grid with two holes (free group of rank 2): non-amenable, trivial sector outside l2",
        toml: r#"
name = "free-group-holes"
description = "6x6 grid with two single-cell holes"
seed = 3
reps = ["trivial", "theta:0.125,0.375"]

[complex]
kind = "grid"
width = 6
height = 6
holes = [[1, 1, 1, 1], [3, 3, 1, 1]]

[[steps]]
step = "pi1"

[[steps]]
step = "holonomy-checks"

[[steps]]
step = "spectrum"

[[steps]]
step = "amenability"
expect_amenable = false

[[steps]]
step = "nonl2"
rep = "trivial"
support_radius = 2
expect_quotient_dim = 1
expect_all_ones = true
"#,
    },
    Preset {
        name: "von-neumann-uniqueness",
        description: "5x5 grid (simply connected): every flat connection has the untwisted spectrum",
        toml: r#"
name = "von-neumann-uniqueness"
description = "5x5 grid, random flat connections"
seed = 4
reps = ["trivial:1", "trivial:2"]

[complex]
kind = "grid"
width = 5
height = 5

[[steps]]
step = "pi1"

[[steps]]
step = "holonomy-checks"

[[steps]]
step = "spectrum"
random_gauges = 6
"#,
    },
    Preset {
        name: "z4-quotient",
        description: "C8 with a face wrapping four times (group Z4): cover decomposition into Fourier sectors",
        toml: r#"
name = "z4-quotient"
description = "C8 with the cycle wrapped four times by a face"
seed = 5
reps = ["irrep:0", "irrep:1", "irrep:2", "irrep:3"]

[complex]
kind = "cycle-quotient"
n = 8
order = 4

[[steps]]
step = "pi1"

[[steps]]
step = "holonomy-checks"

[[steps]]
step = "spectrum"

[[steps]]
step = "cover-decompose"

[[steps]]
step = "amenability"
expect_amenable = true
"#,
    },
    Preset {
        name: "two-particle",
        description: "Two hard-core particles on C5: bosons, fermions and anyons from the exchange phase",
        toml: r#"
name = "two-particle"
description = "Unordered two-particle configuration space of C5"
seed = 6
reps = ["theta:0", "theta:0.5", "theta:0.25"]

[complex]
kind = "two-particle"
base = { kind = "cycle", n = 5 }

[[steps]]
step = "pi1"

[[steps]]
step = "holonomy-checks"

[[steps]]
step = "spectrum"
distinct_spectra = true

[[steps]]
step = "amenability"
radii = [5, 10, 20]
expect_amenable = true
"#,
    },
];

pub fn list_presets() -> &'static [Preset] {
    PRESETS
}

pub fn preset(name: &str) -> Result<Scenario> {
    PRESETS
        .iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown preset {name:?}")))?
        .scenario()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_parses_and_builds() {
        for p in list_presets() {
            let s = p.scenario().unwrap_or_else(|e| panic!("{}: {e}", p.name));
            assert_eq!(s.name, p.name);
            s.complex.build(None).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
        let names: Vec<&str> = list_presets().iter().map(|p| p.name).collect();
        for required in ["ab-circle", "identical-particles-s3", "von-neumann-uniqueness"] {
            assert!(names.contains(&required));
        }
        assert!(preset("nope").is_err());
    }
}
