//! Scenario files: a complex, a list of representations and a pipeline of
//! checks, run deterministically into a JSON summary and CSV spectra.
//!
//! Scenarios are TOML:
//!
//! ```toml
//! name = "ab-circle"
//! description = "Aharonov-Bohm ring"
//! seed = 1
//! reps = ["theta:0", "theta:0.25"]
//!
//! [complex]
//! kind = "cycle"        # cycle | cycle-quotient | grid | presentation
//! n = 8                 # | two-particle | file | inline
//!
//! [tolerances]
//! spectrum = 1e-10
//!
//! [[steps]]
//! step = "spectrum"
//! theta_sweep = 16
//! ```
//!
//! Representation specs are those of [`crate::repfile::resolve_rep`].
//! Every tolerance has a default and can be overridden per scenario.

mod presets;
mod run;

pub use presets::{list_presets, preset, Preset};
pub use run::{run, Assertion, RunOutput, SpectrumRow};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::complex::io::parse_complex;
use crate::complex::{
    build_cycle, build_cycle_quotient, build_grid_with_holes, build_presentation_complex, build_two_particle_space,
    CellRect, ConfigComplex,
};
use crate::error::{Error, Result};
use crate::group::word::parse_word;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    pub complex: ComplexSpec,
    /// Base vertex of the presentation.
    #[serde(default)]
    pub base_vertex: usize,
    #[serde(default)]
    pub reps: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ComplexSpec {
    Cycle {
        n: usize,
    },
    CycleQuotient {
        n: usize,
        order: usize,
    },
    Grid {
        width: usize,
        height: usize,
        /// Holes as `[col, row, width, height]` in cell coordinates.
        #[serde(default)]
        holes: Vec<[usize; 4]>,
    },
    Presentation {
        generators: Vec<String>,
        relators: Vec<String>,
    },
    TwoParticle {
        base: Box<ComplexSpec>,
    },
    File {
        path: PathBuf,
    },
    Inline {
        text: String,
    },
}

impl ComplexSpec {
    /// Builds the complex; relative file paths resolve against `dir`.
    pub fn build(&self, dir: Option<&Path>) -> Result<ConfigComplex> {
        match self {
            ComplexSpec::Cycle { n } => build_cycle(*n),
            ComplexSpec::CycleQuotient { n, order } => build_cycle_quotient(*n, *order),
            ComplexSpec::Grid { width, height, holes } => {
                let holes: Vec<CellRect> =
                    holes.iter().map(|&[col, row, width, height]| CellRect { col, row, width, height }).collect();
                build_grid_with_holes(*width, *height, &holes)
            }
            ComplexSpec::Presentation { generators, relators } => {
                let rels = relators.iter().map(|r| parse_word(r, generators)).collect::<Result<Vec<_>>>()?;
                build_presentation_complex(generators, &rels)
            }
            ComplexSpec::TwoParticle { base } => build_two_particle_space(&base.build(dir)?),
            ComplexSpec::File { path } => {
                let full = match dir {
                    Some(d) if path.is_relative() => d.join(path),
                    _ => path.clone(),
                };
                parse_complex(&std::fs::read_to_string(full)?)
            }
            ComplexSpec::Inline { text } => parse_complex(text),
        }
    }

    /// Parses a command-line shorthand:
    ///
    /// - `cycle:N`, `quotient:N:K` (a cycle whose face wraps `K` times);
    /// - `grid:WxH` or `grid:WxH:holes=c,r,w,h;c,r,w,h` (holes in cell
    ///   coordinates);
    /// - `present:a,b;a2,b2,(ab)3` (generators, then relators);
    /// - `two-particle:<shorthand>`.
    pub fn from_shorthand(text: &str) -> Result<ComplexSpec> {
        let bad = || Error::InvalidParameter(format!("cannot parse complex shorthand {text:?}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        match kind {
            "cycle" => Ok(ComplexSpec::Cycle { n: num(rest)? }),
            "quotient" | "cycle-quotient" => {
                let (n, order) = rest.split_once(':').ok_or_else(bad)?;
                Ok(ComplexSpec::CycleQuotient { n: num(n)?, order: num(order)? })
            }
            "grid" => {
                let (size, holes) = match rest.split_once(':') {
                    Some((size, h)) => (size, h.strip_prefix("holes=").ok_or_else(bad)?),
                    None => (rest, ""),
                };
                let (w, h) = size.split_once('x').ok_or_else(bad)?;
                let holes = holes
                    .split(';')
                    .filter(|h| !h.trim().is_empty())
                    .map(|h| {
                        let v = h.split(',').map(num).collect::<Result<Vec<_>>>()?;
                        <[usize; 4]>::try_from(v).map_err(|_| bad())
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(ComplexSpec::Grid { width: num(w)?, height: num(h)?, holes })
            }
            "present" => {
                let (gens, rels) = rest.split_once(';').ok_or_else(bad)?;
                let split = |t: &str| t.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
                Ok(ComplexSpec::Presentation { generators: split(gens), relators: split(rels) })
            }
            "two-particle" => Ok(ComplexSpec::TwoParticle { base: Box::new(ComplexSpec::from_shorthand(rest)?) }),
            _ => Err(bad()),
        }
    }

    /// Cycle length when the complex is a bare cycle, for which the
    /// twisted spectrum has a closed form.
    pub fn cycle_length(&self) -> Option<usize> {
        match self {
            ComplexSpec::Cycle { n } => Some(*n),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub cocycle: f64,
    pub holonomy: f64,
    pub spectrum: f64,
    pub decomposition: f64,
    pub conjugacy: f64,
    pub nonl2: f64,
    /// Fingerprints closer than this count as equal.
    pub fingerprint: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cocycle: 1e-12,
            holonomy: 1e-10,
            spectrum: 1e-10,
            decomposition: 1e-8,
            conjugacy: 1e-10,
            nonl2: 1e-10,
            fingerprint: 1e-10,
        }
    }
}

fn default_trials() -> usize {
    500
}

fn default_pairs() -> usize {
    50
}

fn default_fingerprint_len() -> usize {
    6
}

fn default_gauge_dims() -> Vec<usize> {
    vec![1, 2, 3]
}

fn default_form() -> String {
    "vector".into()
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Step {
    Pi1,
    HolonomyChecks {
        #[serde(default = "default_trials")]
        cocycle_trials: usize,
        #[serde(default = "default_pairs")]
        homotopy_pairs: usize,
    },
    Spectrum {
        /// Character sweep `θ = k/m`, `k = 0..m`, on a one-generator group.
        #[serde(default)]
        theta_sweep: Option<usize>,
        /// Random gauge transforms of the untwisted connection to compare.
        #[serde(default)]
        random_gauges: usize,
        #[serde(default = "default_gauge_dims")]
        gauge_dims: Vec<usize>,
        /// Assert that the scenario's sectors have pairwise different
        /// spectra (fingerprints are always asserted distinct).
        #[serde(default)]
        distinct_spectra: bool,
        #[serde(default = "default_fingerprint_len")]
        fingerprint_len: usize,
    },
    CoverDecompose,
    Amenability {
        #[serde(default)]
        radii: Option<Vec<usize>>,
        #[serde(default)]
        expect_amenable: Option<bool>,
    },
    Nonl2 {
        rep: String,
        /// `vector` (cyclic vector `e_1`) or `trace`.
        #[serde(default = "default_form")]
        form: String,
        /// Word-metric radius of the support; the whole group when absent.
        #[serde(default)]
        support_radius: Option<usize>,
        #[serde(default)]
        expect_quotient_dim: Option<usize>,
        #[serde(default)]
        expect_all_ones: bool,
    },
    IdenticalParticles,
}

impl Step {
    pub fn name(&self) -> &'static str {
        match self {
            Step::Pi1 => "pi1",
            Step::HolonomyChecks { .. } => "holonomy-checks",
            Step::Spectrum { .. } => "spectrum",
            Step::CoverDecompose => "cover-decompose",
            Step::Amenability { .. } => "amenability",
            Step::Nonl2 { .. } => "nonl2",
            Step::IdenticalParticles => "identical-particles",
        }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].lines().count().max(1));
            Error::Parse { line, message: e.message().to_string() }
        })
    }

    pub fn from_file(path: &Path) -> Result<Scenario> {
        let mut s = Self::from_toml(&std::fs::read_to_string(path)?)?;
        // file references inside the scenario are relative to it
        if let ComplexSpec::File { path: p } = &mut s.complex {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(s)
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

impl RunOutput {
    /// `summary.json`, and `spectra.csv` when spectra were computed.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let summary = dir.join("summary.json");
        write_atomic(&summary, self.summary_json()?.as_bytes())?;
        written.push(summary);
        if !self.spectra.is_empty() {
            let path = dir.join("spectra.csv");
            write_atomic(&path, self.spectra_csv()?.as_bytes())?;
            written.push(path);
        }
        Ok(written)
    }
}
