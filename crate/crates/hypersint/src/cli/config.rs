use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::output::Format;
use crate::error::{Error, Result};
use crate::geometry::{Chart, SemiHyperbolicParams};
use crate::interbasis::WMethod;
use crate::potential1::RootSystem;

#[derive(Debug, Parser)]
#[command(name = "hypersint", version, about = "Spectra, wavefunctions and symmetry checks for two superintegrable potentials on the hyperboloid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bound-state energies, degeneracies and state labels
    Spectrum,
    /// Wavefunction values on a chart grid
    Wavefunction,
    /// Root configurations of a parabolic or semi-hyperbolic level
    Roots,
    /// Interbasis expansion coefficients
    Interbasis,
    /// Run a verification suite
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Wavefunction => "wavefunction",
            Command::Roots => "roots",
            Command::Interbasis => "interbasis",
            Command::Verify => "verify",
        }
    }
}

/// Flags shared by all subcommands; any of them may also come from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    #[arg(long, global = true)]
    pub potential: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, global = true)]
    pub chart: Option<String>,
    /// a,b,e3 of the semi-hyperbolic chart
    #[arg(long = "chart-params", global = true, allow_hyphen_values = true)]
    pub chart_params: Option<String>,
    /// Level N
    #[arg(long = "N", global = true)]
    pub level: Option<String>,
    /// n,m (equidistant), n1,n2 (horicyclic) or N,j (root charts)
    #[arg(long, global = true)]
    pub quantum: Option<String>,
    /// n1xn2:lo1,hi1,lo2,hi2
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long = "quad-level", global = true)]
    pub quad_level: Option<String>,
    #[arg(long = "diff-step", global = true)]
    pub diff_step: Option<String>,
    #[arg(long, global = true)]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// orthonormality | eigen | linear-relations | quadratic-algebra | interbasis | cross-chart
    #[arg(long, global = true)]
    pub suite: Option<String>,
    /// quadrature | 3f2 | hahn | printed-quadrature | printed-3f2 | printed-hahn | all
    #[arg(long, global = true)]
    pub method: Option<String>,
    /// corrected | printed
    #[arg(long, global = true)]
    pub system: Option<String>,
    /// Residual tolerance of the root solver
    #[arg(long = "solver-tol", global = true)]
    pub solver_tol: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    V1,
    V2,
}

impl Potential {
    pub fn name(self) -> &'static str {
        match self {
            Potential::V1 => "v1",
            Potential::V2 => "v2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Orthonormality,
    Eigen,
    LinearRelations,
    QuadraticAlgebra,
    Interbasis,
    CrossChart,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Orthonormality => "orthonormality",
            Suite::Eigen => "eigen",
            Suite::LinearRelations => "linear-relations",
            Suite::QuadraticAlgebra => "quadratic-algebra",
            Suite::Interbasis => "interbasis",
            Suite::CrossChart => "cross-chart",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            Suite::Orthonormality,
            Suite::Eigen,
            Suite::LinearRelations,
            Suite::QuadraticAlgebra,
            Suite::Interbasis,
            Suite::CrossChart,
        ]
        .into_iter()
        .find(|x| x.name() == s)
        .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Grid of n1 × n2 points over [lo1, hi1] × [lo2, hi2], endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub lo1: f64,
    pub hi1: f64,
    pub lo2: f64,
    pub hi2: f64,
}

impl GridSpec {
    pub fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        if n == 1 {
            return vec![0.5 * (lo + hi)];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let a = Self::axis(self.n1, self.lo1, self.hi1);
        let b = Self::axis(self.n2, self.lo2, self.hi2);
        a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
    }
}

impl std::str::FromStr for GridSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid '{s}' is not of the form n1xn2:lo1,hi1,lo2,hi2"));
        let (dims, bounds) = s.split_once(':').ok_or_else(bad)?;
        let (a, b) = dims.split_once('x').ok_or_else(bad)?;
        let n1: usize = a.trim().parse().map_err(|_| bad())?;
        let n2: usize = b.trim().parse().map_err(|_| bad())?;
        let v = parse_list(bounds).map_err(|_| bad())?;
        if v.len() != 4 || n1 == 0 || n2 == 0 || !(v[0] <= v[1] && v[2] <= v[3]) {
            return Err(bad());
        }
        Ok(GridSpec { n1, n2, lo1: v[0], hi1: v[1], lo2: v[2], hi2: v[3] })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub potential: Potential,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub chart: Chart,
    pub chart_params: Option<SemiHyperbolicParams>,
    pub level: Option<usize>,
    pub quantum: Option<(usize, usize)>,
    pub grid: Option<GridSpec>,
    pub quad_level: u32,
    pub diff_step: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub suite: Option<Suite>,
    /// None means every method.
    pub method: Option<WMethod>,
    pub system: RootSystem,
    pub solver_tol: f64,
    pub seed: u64,
}

/// Real number; also accepts `sqrt(x)`, `a/b` and `a*b` of those.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse number '{s}'"));
    if let Some((a, b)) = s.rsplit_once('/') {
        return Ok(parse_real(a)? / parse_real(b)?);
    }
    if let Some((a, b)) = s.split_once('*') {
        return Ok(parse_real(a)? * parse_real(b)?);
    }
    if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return Ok(parse_real(inner)?.sqrt());
    }
    s.parse::<f64>().map_err(|_| bad())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_real).collect()
}

fn parse_pair(s: &str, what: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("{what} '{s}' must be two non-negative integers 'a,b'"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// key=value lines; blank lines and lines starting with '#' are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

const KEYS: [&str; 16] = [
    "potential",
    "alpha",
    "beta",
    "gamma",
    "chart",
    "chart-params",
    "N",
    "quantum",
    "grid",
    "quad-level",
    "diff-step",
    "format",
    "out",
    "suite",
    "method",
    "system",
];

impl RunConfig {
    /// Merge the config file (if any) with flags; flags win.
    pub fn resolve(command: Command, flags: &Flags, seed: u64) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        for k in file.keys() {
            if !KEYS.contains(&k.as_str()) && k != "solver-tol" {
                return Err(Error::Config(format!("unknown config key '{k}'")));
            }
        }
        let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());

        let potential = match pick(&flags.potential, "potential").as_deref().unwrap_or("v1") {
            "v1" => Potential::V1,
            "v2" => Potential::V2,
            other => return Err(Error::Config(format!("unknown potential '{other}' (v1 or v2)"))),
        };
        let real = |flag: &Option<String>, key: &str| -> Result<f64> {
            let v = pick(flag, key).ok_or_else(|| Error::Config(format!("missing --{key}")))?;
            let x = parse_real(&v)?;
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidParams(format!("{key} must be positive, got {x}")));
            }
            Ok(x)
        };
        let alpha = real(&flags.alpha, "alpha")?;
        let beta = real(&flags.beta, "beta")?;
        let gamma = real(&flags.gamma, "gamma")?;

        let chart: Chart = pick(&flags.chart, "chart").as_deref().unwrap_or("equidistant").parse()?;
        let allowed = match potential {
            Potential::V1 => chart != Chart::SemiHyperbolic,
            Potential::V2 => matches!(chart, Chart::Equidistant | Chart::SemiHyperbolic),
        };
        if !allowed {
            return Err(Error::Config(format!("chart {chart} is not available for {}", potential.name())));
        }
        let chart_params = match pick(&flags.chart_params, "chart-params") {
            Some(s) => {
                let v = parse_list(&s)?;
                if v.len() != 3 {
                    return Err(Error::Config("chart-params needs a,b,e3".into()));
                }
                Some(SemiHyperbolicParams::new(v[0], v[1], v[2])?)
            }
            None if chart == Chart::SemiHyperbolic => Some(SemiHyperbolicParams::new(0.0, 1.0, 0.0)?),
            None => None,
        };
        let level = match pick(&flags.level, "N") {
            Some(s) => Some(s.trim().parse::<usize>().map_err(|_| Error::Config(format!("N '{s}' is not an integer")))?),
            None => None,
        };
        let quantum = pick(&flags.quantum, "quantum").map(|s| parse_pair(&s, "quantum")).transpose()?;
        let grid = pick(&flags.grid, "grid").map(|s| s.parse::<GridSpec>()).transpose()?;
        let quad_level = match pick(&flags.quad_level, "quad-level") {
            Some(s) => match s.trim().parse::<u32>() {
                Ok(l) if (1..=10).contains(&l) => l,
                _ => return Err(Error::Config(format!("quad-level '{s}' must be an integer in 1..=10"))),
            },
            None => 6,
        };
        let diff_step = match pick(&flags.diff_step, "diff-step") {
            Some(s) => {
                let h = parse_real(&s)?;
                if !(h > 0.0 && h < 1.0) {
                    return Err(Error::Config(format!("diff-step must lie in (0, 1), got {h}")));
                }
                Some(h)
            }
            None => None,
        };
        let format: Format = pick(&flags.format, "format").as_deref().unwrap_or("json").parse()?;
        let out = pick(&flags.out, "out").map(PathBuf::from);
        let suite = pick(&flags.suite, "suite").map(|s| s.parse::<Suite>()).transpose()?;
        let method = match pick(&flags.method, "method").as_deref() {
            None | Some("all") => None,
            Some(s) => Some(s.parse::<WMethod>()?),
        };
        let system = match pick(&flags.system, "system").as_deref().unwrap_or("corrected") {
            "corrected" => RootSystem::Corrected,
            "printed" => RootSystem::Printed,
            other => return Err(Error::Config(format!("unknown root system '{other}'"))),
        };
        let solver_tol = match pick(&flags.solver_tol, "solver-tol") {
            Some(s) => {
                let t = parse_real(&s)?;
                if !(t >= 0.0) {
                    return Err(Error::Config(format!("solver-tol must be non-negative, got {t}")));
                }
                t
            }
            None => 1e-10,
        };
        Ok(RunConfig {
            command,
            potential,
            alpha,
            beta,
            gamma,
            chart,
            chart_params,
            level,
            quantum,
            grid,
            quad_level,
            diff_step,
            format,
            out,
            suite,
            method,
            system,
            solver_tol,
            seed,
        })
    }
}

/// HYPERSINT_SEED, default 0.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var("HYPERSINT_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Config(format!("HYPERSINT_SEED '{s}' is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> Flags {
        let mut f = Flags::default();
        for &(k, v) in pairs {
            let v = Some(v.to_string());
            match k {
                "alpha" => f.alpha = v,
                "beta" => f.beta = v,
                "gamma" => f.gamma = v,
                "potential" => f.potential = v,
                "chart" => f.chart = v,
                "grid" => f.grid = v,
                _ => unreachable!(),
            }
        }
        f
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_real("2").unwrap(), 2.0);
        assert!((parse_real("1/sqrt(2)").unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() <= 2e-16);
        assert!((parse_real("2*sqrt(2)").unwrap() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn config_text_and_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "# fixture\npotential = v1\nalpha=1\nbeta=1/sqrt(2)\ngamma=3\nformat=csv\n").unwrap();
        let mut f = flags(&[("gamma", "2*sqrt(2)")]);
        f.config = Some(p);
        let c = RunConfig::resolve(Command::Spectrum, &f, 0).unwrap();
        assert_eq!(c.format, Format::Csv);
        assert!((c.gamma - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        let base = [("alpha", "1"), ("beta", "1"), ("gamma", "1")];
        let mut v = base.to_vec();
        v[0] = ("alpha", "-1");
        assert!(matches!(RunConfig::resolve(Command::Spectrum, &flags(&v), 0), Err(Error::InvalidParams(_))));
        let mut v = base.to_vec();
        v.push(("chart", "semi-hyperbolic"));
        assert!(RunConfig::resolve(Command::Spectrum, &flags(&v), 0).is_err());
        let mut v = base.to_vec();
        v.push(("potential", "v2"));
        v.push(("chart", "semi-hyperbolic"));
        assert!(RunConfig::resolve(Command::Spectrum, &flags(&v), 0).unwrap().chart_params.is_some());
        let mut v = base.to_vec();
        v.push(("grid", "3x3:0,1"));
        assert!(RunConfig::resolve(Command::Spectrum, &flags(&v), 0).is_err());
    }

    #[test]
    fn grid_points() {
        let g: GridSpec = "2x3:0,1,-1,1".parse().unwrap();
        assert_eq!(g.points(), vec![(0.0, -1.0), (0.0, 0.0), (0.0, 1.0), (1.0, -1.0), (1.0, 0.0), (1.0, 1.0)]);
    }
}
