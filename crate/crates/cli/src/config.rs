//! Experiment configuration: a TOML file merged with command-line flags.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Raw file contents; every key is optional and unknown keys are rejected.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub model: Option<String>,
    #[serde(rename = "L")]
    pub l: Option<OneOrMany<i64>>,
    pub layout: Option<String>,
    pub size: Option<OneOrMany<i64>>,
    pub colex_file: Option<PathBuf>,
    pub symmetry: Option<String>,
    pub move_radius: Option<i64>,
    pub beta: Option<OneOrMany<f64>>,
    pub trials: Option<i64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub events: Option<i64>,
    pub cap: Option<i64>,
    pub max_energy: Option<f64>,
    pub max_nodes: Option<i64>,
    pub k_max: Option<i64>,
    pub sublattice: Option<String>,
    pub bound_c: Option<f64>,
}

/// Values given on the command line; these override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub l: Option<Vec<i64>>,
    pub layout: Option<String>,
    pub size: Option<Vec<i64>>,
    pub colex_file: Option<PathBuf>,
    pub symmetry: Option<String>,
    pub move_radius: Option<i64>,
    pub beta: Option<Vec<f64>>,
    pub trials: Option<i64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub events: Option<i64>,
    pub cap: Option<i64>,
    pub max_energy: Option<f64>,
    pub max_nodes: Option<i64>,
    pub k_max: Option<i64>,
    pub sublattice: Option<String>,
    pub bound_c: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Rbh,
    RbhTrivial,
    Gcc,
    Color2d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryMode {
    Enforced,
    None,
}

/// Fully resolved configuration. Its canonical JSON form is hashed into
/// every output; the output path and worker count are excluded.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub model: ModelKind,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub layout: String,
    pub size: Vec<usize>,
    pub colex_sha256: Option<String>,
    pub symmetry: SymmetryMode,
    pub move_radius: usize,
    pub beta: Vec<f64>,
    pub trials: usize,
    pub seed: Option<u64>,
    pub events: u64,
    pub cap: u64,
    pub max_energy: f64,
    pub max_nodes: usize,
    pub k_max: usize,
    pub sublattice: String,
    pub bound_c: f64,
    #[serde(skip)]
    pub colex_text: Option<String>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

/// Where a value came from, for error messages.
struct Origin<'a> {
    text: Option<&'a str>,
    path: Option<&'a Path>,
}

impl Origin<'_> {
    fn locate(&self, key: &str, from_flag: bool) -> String {
        if from_flag {
            return format!("flag --{key}");
        }
        match (self.text, self.path) {
            (Some(text), Some(path)) => match key_line(text, key) {
                Some(line) => format!("{}:{line}: key `{key}`", path.display()),
                None => format!("{}: key `{key}`", path.display()),
            },
            _ => format!("`{key}`"),
        }
    }
}

/// 1-based line of the first `key = ...` assignment.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|line| {
        let t = line.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

pub fn load_file(path: &Path) -> Result<(ConfigFile, String)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let cfg: ConfigFile = toml::from_str(&text).map_err(|e| {
        // unknown keys are reported against the whole table; find the key itself
        let named = e.message().strip_prefix("unknown field `").and_then(|r| r.split('`').next());
        let line = named
            .and_then(|k| key_line(&text, k))
            .or_else(|| e.span().map(|s| text[..s.start].matches('\n').count() + 1));
        match line {
            Some(l) => anyhow!("{}:{l}: {}", path.display(), e.message()),
            None => anyhow!("{}: {}", path.display(), e.message()),
        }
    })?;
    Ok((cfg, text))
}

fn positive(v: i64, what: &str) -> Result<usize> {
    if v <= 0 {
        bail!("{what}: must be positive, got {v}");
    }
    Ok(v as usize)
}

pub fn resolve(
    command: &str,
    file: Option<(ConfigFile, String, PathBuf)>,
    o: Overrides,
) -> Result<ExperimentConfig> {
    let (f, text, path) = match file {
        Some((f, t, p)) => (f, Some(t), Some(p)),
        None => (ConfigFile::default(), None, None),
    };
    let origin = Origin { text: text.as_deref(), path: path.as_deref() };

    macro_rules! pick {
        ($field:ident, $key:expr) => {{
            match o.$field {
                Some(v) => (Some(v), origin.locate($key, true)),
                None => (f.$field, origin.locate($key, false)),
            }
        }};
    }

    let (model, at) = pick!(model, "model");
    let model = match model.as_deref().unwrap_or("rbh") {
        "rbh" => ModelKind::Rbh,
        "rbh-trivial" => ModelKind::RbhTrivial,
        "gcc" => ModelKind::Gcc,
        "color2d" => ModelKind::Color2d,
        other => bail!("{at}: unknown model `{other}` (expected rbh, rbh-trivial, gcc or color2d)"),
    };

    let (l, at) = match o.l {
        Some(v) => (Some(v), origin.locate("L", true)),
        None => (f.l.map(OneOrMany::into_vec), origin.locate("L", false)),
    };
    let l = l.unwrap_or_else(|| vec![2]);
    if l.is_empty() {
        bail!("{at}: at least one size required");
    }
    let l = l.into_iter().map(|v| positive(v, &at)).collect::<Result<Vec<_>>>()?;

    let (layout, at) = pick!(layout, "layout");
    // the trivial model is defined on the cylinder; see `build_trivial_model`
    let default_layout = if model == ModelKind::RbhTrivial { "cylinder" } else { "box" };
    let layout = layout.unwrap_or_else(|| default_layout.into());
    if !["box", "cylinder", "torus-interval", "half-space"].contains(&layout.as_str()) {
        bail!("{at}: unknown layout `{layout}`");
    }

    let (size, at) = match o.size {
        Some(v) => (Some(v), origin.locate("size", true)),
        None => (f.size.map(OneOrMany::into_vec), origin.locate("size", false)),
    };
    let size = size.unwrap_or_else(|| vec![1]);
    if size.is_empty() {
        bail!("{at}: at least one size required");
    }
    let size = size.into_iter().map(|v| positive(v, &at)).collect::<Result<Vec<_>>>()?;

    let (colex_file, _) = pick!(colex_file, "colex-file");
    let colex_text = match &colex_file {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("reading colex file {}", p.display()))?),
        None => None,
    };
    let colex_sha256 = colex_text.as_ref().map(|t| hex(&Sha256::digest(t.as_bytes())));

    let (symmetry, at) = pick!(symmetry, "symmetry");
    let symmetry = match symmetry.as_deref().unwrap_or("enforced") {
        "enforced" => SymmetryMode::Enforced,
        "none" => SymmetryMode::None,
        other => bail!("{at}: unknown symmetry mode `{other}` (expected enforced or none)"),
    };

    let (r, at) = pick!(move_radius, "move-radius");
    let move_radius = positive(r.unwrap_or(1), &at)?;

    let (beta, at) = match o.beta {
        Some(v) => (Some(v), origin.locate("beta", true)),
        None => (f.beta.map(OneOrMany::into_vec), origin.locate("beta", false)),
    };
    let beta = beta.unwrap_or_else(|| vec![1.5]);
    if beta.is_empty() || beta.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        bail!("{at}: every beta must be finite and positive, got {beta:?}");
    }

    let (t, at) = pick!(trials, "trials");
    let trials = positive(t.unwrap_or(100), &at)?;
    let (seed, _) = pick!(seed, "seed");
    let (e, at) = pick!(events, "events");
    let events = positive(e.unwrap_or(100_000), &at)? as u64;
    let (c, at) = pick!(cap, "cap");
    let cap = positive(c.unwrap_or(1_000_000_000), &at)? as u64;
    let (me, at) = pick!(max_energy, "max-energy");
    let max_energy = me.unwrap_or(f64::INFINITY);
    if !(max_energy > 0.0) {
        bail!("{at}: must be positive, got {max_energy}");
    }
    let (mn, at) = pick!(max_nodes, "max-nodes");
    let max_nodes = positive(mn.unwrap_or(50_000_000), &at)?;
    let (k, at) = pick!(k_max, "k-max");
    let k_max = positive(k.unwrap_or(12), &at)?;
    let (sub, at) = pick!(sublattice, "sublattice");
    let sublattice = sub.unwrap_or_else(|| "both".into());
    if !["primal", "dual", "both"].contains(&sublattice.as_str()) {
        bail!("{at}: unknown sublattice `{sublattice}` (expected primal, dual or both)");
    }
    let (bc, at) = pick!(bound_c, "bound-c");
    let bound_c = bc.unwrap_or(1.0);
    if !(bound_c.is_finite() && bound_c > 0.0) {
        bail!("{at}: must be finite and positive, got {bound_c}");
    }
    let (output, _) = pick!(output, "output");

    Ok(ExperimentConfig {
        command: command.into(),
        model,
        l,
        layout,
        size,
        colex_sha256,
        symmetry,
        move_radius,
        beta,
        trials,
        seed,
        events,
        cap,
        max_energy,
        max_nodes,
        k_max,
        sublattice,
        bound_c,
        colex_text,
        output,
    })
}

impl ExperimentConfig {
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(canonical.as_bytes()))[..16].to_string()
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| anyhow!("`{}` needs a seed: pass --seed or set `seed` in the config", self.command))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
