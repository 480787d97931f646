//! Run configuration: `key = value` text files, `--set` overrides and the
//! output-directory environment variable.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chidenn_td::oracles::SourceSampling;
use chidenn_td::{BasisKind, Hyperparams, SolveMode, SolverConfig};

/// Overrides `output_dir` from the file (explicit `--set` still wins).
pub const OUTPUT_DIR_ENV: &str = "CHTD_OUTPUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{key}: {reason}")]
    Key { key: String, reason: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn key_err(key: &str, reason: impl Display) -> ConfigError {
    ConfigError::Key {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemId {
    Poisson2d,
    Diffusion4d,
}

impl ProblemId {
    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Poisson2d => "poisson2d",
            ProblemId::Diffusion4d => "diffusion4d",
        }
    }

    pub fn dims(self) -> usize {
        match self {
            ProblemId::Poisson2d => 2,
            ProblemId::Diffusion4d => 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadKind {
    Gaussian,
    Manufactured,
}

impl LoadKind {
    pub fn name(self) -> &'static str {
        match self {
            LoadKind::Gaussian => "gaussian",
            LoadKind::Manufactured => "manufactured",
        }
    }
}

/// Reference used for error columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    None,
    /// Manufactured closed form (Poisson).
    Exact,
    /// Full-grid finite differences (Poisson CG or diffusion FDM).
    Grid,
    /// Dense tensor-product Galerkin (Poisson, small meshes).
    Dense,
}

impl ReferenceKind {
    pub fn name(self) -> &'static str {
        match self {
            ReferenceKind::None => "none",
            ReferenceKind::Exact => "exact",
            ReferenceKind::Grid => "grid",
            ReferenceKind::Dense => "dense",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub load: LoadKind,
    /// One element count per dimension.
    pub n_elem: Vec<usize>,
    pub hyper: Hyperparams<f64>,
    pub solver: SolverConfig,
    pub reference: ReferenceKind,
    /// Points per axis of grid references.
    pub reference_points: usize,
    pub output_dir: PathBuf,
    pub verbatim_sign: bool,
    /// Convergence study: elements per axis.
    pub grids: Vec<usize>,
    pub ranks: Vec<usize>,
    pub variants: Vec<Hyperparams<f64>>,
    /// Benchmark: grid points per spatial axis.
    pub sizes: Vec<usize>,
    /// Benchmark time elements; `None` uses twice the spatial element count.
    pub time_elements: Option<usize>,
    pub fdm_safety: f64,
    pub fdm_memory_guard: u64,
    /// FDM snapshot stride in steps; 0 keeps the final field only.
    pub fdm_snapshot_stride: usize,
    pub fdm_sampling: SourceSampling,
}

impl RunConfig {
    pub fn defaults(problem: ProblemId) -> Self {
        let n_elem = match problem {
            ProblemId::Poisson2d => vec![32, 32],
            ProblemId::Diffusion4d => vec![20, 20, 20, 40],
        };
        Self {
            problem,
            load: LoadKind::Gaussian,
            n_elem,
            hyper: Hyperparams::chidenn_default_a(2, 2).expect("valid default"),
            solver: SolverConfig::with_rank(4),
            reference: ReferenceKind::None,
            reference_points: 1001,
            output_dir: PathBuf::from("chtd-out"),
            verbatim_sign: false,
            grids: vec![16, 32, 64],
            ranks: (1..=6).collect(),
            variants: vec![
                Hyperparams::fe_linear(),
                Hyperparams::chidenn(2, 2.0, 2).expect("valid default"),
            ],
            sizes: vec![11, 21, 41],
            time_elements: None,
            fdm_safety: 0.9,
            fdm_memory_guard: 512 << 20,
            fdm_snapshot_stride: 0,
            fdm_sampling: SourceSampling::HatAverage,
        }
    }

    /// Defaults, then the file, then the environment, then `--set` pairs.
    pub fn load(base: ProblemId, file: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                path: path.to_path_buf(),
                source,
            })?;
            pairs.extend(parse_pairs(&text)?);
        }
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            if !dir.is_empty() {
                pairs.push(("output_dir".into(), dir));
            }
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| key_err(o, "override must look like key=value"))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Self::from_pairs(base, &pairs)
    }

    pub fn from_pairs(base: ProblemId, pairs: &[(String, String)]) -> Result<Self, ConfigError> {
        // the problem key picks the defaults for everything else
        let problem = match pairs.iter().rev().find(|(k, _)| k == "problem") {
            Some((_, v)) => parse_problem(v)?,
            None => base,
        };
        let mut cfg = Self::defaults(problem);
        let mut raw: BTreeMap<&str, &str> = BTreeMap::new();
        for (k, v) in pairs {
            if !KEYS.contains(&k.as_str()) {
                return Err(key_err(k, "unknown key"));
            }
            raw.insert(k.as_str(), v.as_str());
        }
        let mut kind = cfg.hyper.kind;
        let mut s = cfg.hyper.s;
        let mut p = cfg.hyper.p;
        let mut a: Option<f64> = None;
        for (&k, &v) in &raw {
            match k {
                "problem" => {}
                "load" => {
                    cfg.load = match v {
                        "gaussian" => LoadKind::Gaussian,
                        "manufactured" => LoadKind::Manufactured,
                        _ => return Err(key_err(k, format!("expected gaussian or manufactured, got {v:?}"))),
                    }
                }
                "n_elem" => {
                    let list: Vec<usize> = parse_list(k, v)?;
                    cfg.n_elem = match list.len() {
                        1 => vec![list[0]; problem.dims()],
                        n if n == problem.dims() => list,
                        n => return Err(key_err(k, format!("expected 1 or {} values, got {n}", problem.dims()))),
                    };
                }
                "kind" => kind = parse_kind(k, v)?,
                "s" => s = parse_value(k, v)?,
                "p" => p = parse_value(k, v)?,
                "a" => a = Some(parse_value(k, v)?),
                "rank" => cfg.solver.rank = parse_value(k, v)?,
                "mode" => cfg.solver.mode = v.parse::<SolveMode>().map_err(|e| key_err(k, e))?,
                "tol" => cfg.solver.tol = parse_value(k, v)?,
                "max_sweeps" => cfg.solver.max_sweeps = parse_value(k, v)?,
                "seed" => cfg.solver.seed = parse_value(k, v)?,
                "greedy_full_sweeps" => cfg.solver.greedy_full_sweeps = parse_value(k, v)?,
                "quad_points" => {
                    cfg.solver.quad_points = match v {
                        "default" | "0" => None,
                        _ => Some(parse_value(k, v)?),
                    }
                }
                "ridge" => cfg.solver.ridge = parse_value(k, v)?,
                "reference" => {
                    cfg.reference = match v {
                        "none" => ReferenceKind::None,
                        "exact" => ReferenceKind::Exact,
                        "grid" => ReferenceKind::Grid,
                        "dense" => ReferenceKind::Dense,
                        _ => return Err(key_err(k, format!("expected none, exact, grid or dense, got {v:?}"))),
                    }
                }
                "reference_points" => cfg.reference_points = parse_value(k, v)?,
                "output_dir" => cfg.output_dir = PathBuf::from(v),
                "verbatim_sign" => cfg.verbatim_sign = parse_value(k, v)?,
                "grids" => cfg.grids = parse_list(k, v)?,
                "ranks" => cfg.ranks = parse_list(k, v)?,
                "variants" => cfg.variants = parse_variants(k, v)?,
                "sizes" => cfg.sizes = parse_list(k, v)?,
                "time_elements" => {
                    cfg.time_elements = match v {
                        "auto" => None,
                        _ => Some(parse_value(k, v)?),
                    }
                }
                "fdm_safety" => cfg.fdm_safety = parse_value(k, v)?,
                "fdm_memory_guard" => cfg.fdm_memory_guard = parse_value(k, v)?,
                "fdm_snapshot_stride" => cfg.fdm_snapshot_stride = parse_value(k, v)?,
                "fdm_sampling" => {
                    cfg.fdm_sampling = match v {
                        "nodal" => SourceSampling::Nodal,
                        "hat" => SourceSampling::HatAverage,
                        _ => return Err(key_err(k, format!("expected nodal or hat, got {v:?}"))),
                    }
                }
                _ => unreachable!("key list and match arms agree"),
            }
        }
        cfg.hyper = match kind {
            BasisKind::FeLinear => Hyperparams::fe_linear(),
            BasisKind::Chidenn => Hyperparams {
                kind,
                s,
                a: a.unwrap_or(s as f64),
                p,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.hyper.kind == BasisKind::Chidenn && self.hyper.p > self.hyper.s {
            return Err(key_err("p", "p must not exceed s"));
        }
        self.hyper.validate().map_err(|e| key_err("kind", e))?;
        if let Some(&n) = self.n_elem.iter().find(|&&n| n < 2) {
            return Err(key_err("n_elem", format!("element counts must be at least 2, got {n}")));
        }
        if self.solver.rank == 0 {
            return Err(key_err("rank", "must be at least 1"));
        }
        if !(self.solver.tol > 0.0) {
            return Err(key_err("tol", "must be positive"));
        }
        if self.solver.max_sweeps == 0 {
            return Err(key_err("max_sweeps", "must be at least 1"));
        }
        if !(self.solver.ridge >= 0.0) {
            return Err(key_err("ridge", "must be non-negative"));
        }
        self.solver.validate().map_err(|e| key_err("quad_points", e))?;
        if self.verbatim_sign && self.problem != ProblemId::Diffusion4d {
            return Err(key_err("verbatim_sign", "only applies to diffusion4d"));
        }
        if self.problem == ProblemId::Diffusion4d && self.load != LoadKind::Gaussian {
            return Err(key_err("load", "diffusion4d has a fixed source"));
        }
        if self.reference == ReferenceKind::Exact && self.load != LoadKind::Manufactured {
            return Err(key_err("reference", "exact reference needs load=manufactured"));
        }
        if self.problem == ProblemId::Diffusion4d && self.reference == ReferenceKind::Dense {
            return Err(key_err("reference", "dense reference is two-dimensional only"));
        }
        if self.reference_points < 3 {
            return Err(key_err("reference_points", "must be at least 3"));
        }
        if self.grids.iter().any(|&g| g < 2) {
            return Err(key_err("grids", "element counts must be at least 2"));
        }
        if self.ranks.contains(&0) {
            return Err(key_err("ranks", "ranks must be at least 1"));
        }
        for h in &self.variants {
            h.validate().map_err(|e| key_err("variants", e))?;
        }
        if self.sizes.iter().any(|&n| n < 3) {
            return Err(key_err("sizes", "grid sizes must be at least 3 points"));
        }
        if self.time_elements.is_some_and(|t| t < 2) {
            return Err(key_err("time_elements", "must be at least 2"));
        }
        if !(self.fdm_safety > 0.0) {
            return Err(key_err("fdm_safety", "must be positive"));
        }
        Ok(())
    }

    /// Every resolved setting, in a stable order.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        vec![
            ("problem", self.problem.name().into()),
            ("load", self.load.name().into()),
            ("n_elem", list(&self.n_elem)),
            ("kind", kind_name(self.hyper.kind).into()),
            ("s", self.hyper.s.to_string()),
            ("a", format!("{:?}", self.hyper.a)),
            ("p", self.hyper.p.to_string()),
            ("rank", self.solver.rank.to_string()),
            ("mode", self.solver.mode.name().into()),
            ("tol", format!("{:e}", self.solver.tol)),
            ("max_sweeps", self.solver.max_sweeps.to_string()),
            ("seed", self.solver.seed.to_string()),
            ("greedy_full_sweeps", self.solver.greedy_full_sweeps.to_string()),
            (
                "quad_points",
                self.solver.quad_points.map_or("default".into(), |q| q.to_string()),
            ),
            ("ridge", format!("{:e}", self.solver.ridge)),
            ("reference", self.reference.name().into()),
            ("reference_points", self.reference_points.to_string()),
            ("output_dir", self.output_dir.display().to_string()),
            ("verbatim_sign", self.verbatim_sign.to_string()),
            ("grids", list(&self.grids)),
            ("ranks", list(&self.ranks)),
            (
                "variants",
                self.variants.iter().map(variant_name).collect::<Vec<_>>().join("; "),
            ),
            ("sizes", list(&self.sizes)),
            (
                "time_elements",
                self.time_elements.map_or("auto".into(), |t| t.to_string()),
            ),
            ("fdm_safety", format!("{:?}", self.fdm_safety)),
            ("fdm_memory_guard", self.fdm_memory_guard.to_string()),
            ("fdm_snapshot_stride", self.fdm_snapshot_stride.to_string()),
            (
                "fdm_sampling",
                match self.fdm_sampling {
                    SourceSampling::Nodal => "nodal",
                    SourceSampling::HatAverage => "hat",
                }
                .to_string(),
            ),
        ]
    }
}

const KEYS: &[&str] = &[
    "problem",
    "load",
    "n_elem",
    "kind",
    "s",
    "a",
    "p",
    "rank",
    "mode",
    "tol",
    "max_sweeps",
    "seed",
    "greedy_full_sweeps",
    "quad_points",
    "ridge",
    "reference",
    "reference_points",
    "output_dir",
    "verbatim_sign",
    "grids",
    "ranks",
    "variants",
    "sizes",
    "time_elements",
    "fdm_safety",
    "fdm_memory_guard",
    "fdm_snapshot_stride",
    "fdm_sampling",
];

/// `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_problem(v: &str) -> Result<ProblemId, ConfigError> {
    match v {
        "poisson2d" => Ok(ProblemId::Poisson2d),
        "diffusion4d" => Ok(ProblemId::Diffusion4d),
        _ => Err(key_err(
            "problem",
            format!("expected poisson2d or diffusion4d, got {v:?}"),
        )),
    }
}

fn parse_value<V: FromStr>(key: &str, v: &str) -> Result<V, ConfigError>
where
    V::Err: Display,
{
    v.parse::<V>()
        .map_err(|e| key_err(key, format!("cannot parse {v:?}: {e}")))
}

fn parse_list<V: FromStr>(key: &str, v: &str) -> Result<Vec<V>, ConfigError>
where
    V::Err: Display,
{
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(key_err(key, "empty list"));
    }
    items.iter().map(|s| parse_value(key, s)).collect()
}

fn parse_kind(key: &str, v: &str) -> Result<BasisKind, ConfigError> {
    match v.to_ascii_lowercase().as_str() {
        "fe" | "fe_linear" => Ok(BasisKind::FeLinear),
        "chidenn" => Ok(BasisKind::Chidenn),
        _ => Err(key_err(key, format!("expected fe or chidenn, got {v:?}"))),
    }
}

pub fn kind_name(kind: BasisKind) -> &'static str {
    match kind {
        BasisKind::FeLinear => "fe",
        BasisKind::Chidenn => "chidenn",
    }
}

pub fn variant_name(h: &Hyperparams<f64>) -> String {
    match h.kind {
        BasisKind::FeLinear => "fe".into(),
        BasisKind::Chidenn => format!("chidenn s={} p={} a={:?}", h.s, h.p, h.a),
    }
}

/// `fe; chidenn s=2 p=2 a=2`
fn parse_variants(key: &str, v: &str) -> Result<Vec<Hyperparams<f64>>, ConfigError> {
    let mut out = Vec::new();
    for item in v.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let mut tokens = item.split_whitespace();
        let kind = parse_kind(key, tokens.next().unwrap_or(""))?;
        let (mut s, mut p, mut a) = (2usize, 2usize, None);
        for t in tokens {
            let (k, val) = t
                .split_once('=')
                .ok_or_else(|| key_err(key, format!("expected name=value, got {t:?}")))?;
            match k {
                "s" => s = parse_value(key, val)?,
                "p" => p = parse_value(key, val)?,
                "a" => a = Some(parse_value(key, val)?),
                _ => return Err(key_err(key, format!("unknown variant parameter {k:?}"))),
            }
        }
        out.push(match kind {
            BasisKind::FeLinear => Hyperparams::fe_linear(),
            BasisKind::Chidenn => {
                if p > s {
                    return Err(key_err(key, "p must not exceed s"));
                }
                Hyperparams::chidenn(s, a.unwrap_or(s as f64), p).map_err(|e| key_err(key, e))?
            }
        });
    }
    if out.is_empty() {
        return Err(key_err(key, "empty list"));
    }
    Ok(out)
}
