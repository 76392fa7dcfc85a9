//! Experiment configuration: a TOML file (`--config`) overlaid by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    #[default]
    Spectrum,
    Homology,
    Filling,
    Cheeger,
    Montecarlo,
    Berger,
    Cusp,
    VerifyAll,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Homology => "homology",
            CommandKind::Filling => "filling",
            CommandKind::Cheeger => "cheeger",
            CommandKind::Montecarlo => "montecarlo",
            CommandKind::Berger => "berger",
            CommandKind::Cusp => "cusp",
            CommandKind::VerifyAll => "verify-all",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, CommandKind::Montecarlo)
    }

    /// Commands that operate on a mesh from `--mesh` or `--model`.
    fn uses_mesh(self) -> bool {
        matches!(
            self,
            CommandKind::Spectrum
                | CommandKind::Homology
                | CommandKind::Filling
                | CommandKind::Cheeger
                | CommandKind::Montecarlo
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Torus,
    Berger,
    Cusp,
}

/// Resolved settings of one run. Output locations and the thread count are
/// not serialized, so they never change report bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub mesh: Option<PathBuf>,
    pub model: Option<ModelName>,
    pub epsilon: Option<f64>,
    /// Torus or Berger resolution; finite-difference grid size for `cusp`.
    pub n: Option<usize>,
    /// Number of eigenvalues.
    pub count: usize,
    pub n_traj: usize,
    #[serde(rename = "T")]
    pub time: f64,
    pub seed: Option<u64>,
    pub tol: f64,
    pub sphere_level: usize,
    /// Central layers of the cusp mesh.
    pub layers: Option<usize>,
    /// Closed vertex walk for `filling`.
    pub cycle: Option<Vec<usize>>,
    /// Number of trajectories written as CSV by `montecarlo`.
    pub dump_trajectories: usize,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub export_mesh: Option<PathBuf>,
    #[serde(skip_serializing)]
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: CommandKind::Spectrum,
            mesh: None,
            model: None,
            epsilon: None,
            n: None,
            count: 5,
            n_traj: 256,
            time: 4.0,
            seed: None,
            tol: 1e-8,
            sphere_level: 2,
            layers: None,
            cycle: None,
            dump_trajectories: 0,
            out: None,
            export_mesh: None,
            threads: None,
        }
    }
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct Args {
    /// TOML file with the same keys as the flags (`n_traj`, `T`, ...).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mesh file (`.json` or `.off`).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelName>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Resolution (torus, berger) or finite-difference grid size (cusp).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long = "n-traj")]
    pub n_traj: Option<usize>,
    /// Trajectory length.
    #[arg(long = "T")]
    pub time: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "sphere-level")]
    pub sphere_level: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Comma-separated closed vertex walk, e.g. `0,2,4,0`.
    #[arg(long, value_delimiter = ',')]
    pub cycle: Option<Vec<usize>>,
    #[arg(long = "dump-trajectories")]
    pub dump_trajectories: Option<usize>,
    /// JSON report path; CSV tables are written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Writes the generated mesh as JSON.
    #[arg(long = "export-mesh")]
    pub export_mesh: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text).map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    /// Config file (if any) with the flags on top, validated and with
    /// defaults filled in.
    pub fn resolve(command: CommandKind, args: &Args) -> Result<Self, CliError> {
        let mut c = match &args.config {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        c.command = command;
        macro_rules! overlay {
            ($($f:ident),*) => {$(
                if let Some(v) = args.$f.clone() {
                    c.$f = Some(v);
                }
            )*};
        }
        overlay!(mesh, model, epsilon, n, seed, layers, cycle, out, export_mesh, threads);
        macro_rules! overlay_plain {
            ($($f:ident),*) => {$(
                if let Some(v) = args.$f {
                    c.$f = v;
                }
            )*};
        }
        overlay_plain!(count, n_traj, time, tol, sphere_level, dump_trajectories);
        c.fill_defaults();
        c.validate()?;
        Ok(c)
    }

    fn fill_defaults(&mut self) {
        let cmd = self.command;
        if cmd.uses_mesh() && self.mesh.is_none() && self.model.is_none() {
            self.model = Some(ModelName::Torus);
        }
        let model = match cmd {
            CommandKind::Berger => Some(ModelName::Berger),
            CommandKind::Cusp => Some(ModelName::Cusp),
            _ if self.mesh.is_some() => None,
            _ => self.model,
        };
        if matches!(cmd, CommandKind::Berger | CommandKind::Cusp) {
            self.model = model;
        }
        match model {
            Some(ModelName::Torus) => {
                self.n.get_or_insert(8);
            }
            Some(ModelName::Berger) => {
                self.epsilon.get_or_insert(1.0);
                if cmd != CommandKind::Berger {
                    self.n.get_or_insert(4);
                }
            }
            Some(ModelName::Cusp) => {
                self.epsilon.get_or_insert((-2.0f64).exp());
                if cmd == CommandKind::Cusp {
                    self.n.get_or_insert(2048);
                } else {
                    self.layers.get_or_insert(8);
                }
            }
            None => {}
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        let cmd = self.command;
        if self.mesh.is_some() && self.model.is_some() && cmd.uses_mesh() {
            return bad("--mesh and --model are mutually exclusive".into());
        }
        if cmd.is_stochastic() && self.seed.is_none() {
            return bad(format!("{} is stochastic and needs --seed", cmd.name()));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol = {} outside (0, 1)", self.tol));
        }
        if self.count == 0 || self.count > 200 {
            return bad(format!("count = {} outside [1, 200]", self.count));
        }
        if self.n_traj == 0 {
            return bad("n_traj must be positive".into());
        }
        if !(self.time > 0.0 && self.time.is_finite()) {
            return bad(format!("T = {} must be positive and finite", self.time));
        }
        if self.sphere_level > 5 {
            return bad(format!("sphere_level = {} outside [0, 5]", self.sphere_level));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if let Some(c) = &self.cycle {
            if c.len() < 3 || c.first() != c.last() {
                return bad("cycle must be a closed vertex walk (first = last, at least 2 edges)".into());
            }
        }
        if cmd.uses_mesh() && self.mesh.is_some() {
            return Ok(());
        }
        match self.model {
            Some(ModelName::Torus) if cmd.uses_mesh() => {
                let n = self.n.unwrap_or(0);
                if n < 3 {
                    return bad(format!("torus needs n >= 3, got {n}"));
                }
            }
            Some(ModelName::Berger) => {
                let e = self.epsilon.unwrap_or(f64::NAN);
                if !(e > 0.0 && e <= 1.0) {
                    return bad(format!("berger needs epsilon in (0, 1], got {e}"));
                }
                if let Some(n) = self.n {
                    if n < 2 || n % 2 != 0 {
                        return bad(format!("berger needs an even n >= 2, got {n}"));
                    }
                }
            }
            Some(ModelName::Cusp) => {
                let e = self.epsilon.unwrap_or(f64::NAN);
                if !(e > 0.0 && e < 1.0) {
                    return bad(format!("cusp needs epsilon in (0, 1), got {e}"));
                }
                if cmd == CommandKind::Cusp && self.n.unwrap_or(0) < coexact::models::cusp::MIN_GRID {
                    return bad(format!(
                        "cusp needs n >= {}, got {:?}",
                        coexact::models::cusp::MIN_GRID,
                        self.n
                    ));
                }
                if let Some(l) = self.layers {
                    if l < 2 || l % 2 != 0 {
                        return bad(format!("cusp needs an even layers >= 2, got {l}"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}
