//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use lift_core::exact::Q;

pub const CACHE_ENV: &str = "LIFTCHECK_CACHE";

#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// Flat key = value file; flags win over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kappa: Option<u32>,
    #[arg(long = "D")]
    pub d: Option<u64>,
    /// Norm of xi, a positive rational such as 1/4.
    #[arg(long)]
    pub norm_xi: Option<String>,
    /// Only `unramified` is supported.
    #[arg(long)]
    pub chi: Option<String>,
    /// q-expansion truncation.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub imax: Option<u32>,
    #[arg(long)]
    pub mmax: Option<u32>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative tolerance of numeric comparisons.
    #[arg(long)]
    pub tol: Option<f64>,
    /// json, csv or markdown.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub kind: Option<String>,
    /// `a_p / p^{(k-1)/2}` such as `-24/2^(11/2)`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps: Option<i8>,
    #[arg(long, allow_hyphen_values = true)]
    pub eps_prime: Option<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kappa: u32,
    pub d: u64,
    pub norm_xi: Q,
    pub n: Option<usize>,
    pub p: Option<u64>,
    pub imax: u32,
    pub mmax: u32,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub format: Format,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub kind: Option<String>,
    pub lambda: Option<String>,
    pub lambda1: Option<String>,
    pub lambda2: Option<String>,
    pub sign: Option<i8>,
    pub delta: Option<i8>,
    pub omega: Option<i8>,
    pub eps: Option<i8>,
    pub eps_prime: Option<i8>,
    /// Which of kappa / D were given explicitly.
    pub scenario_given: bool,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

pub fn read_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(format!("{}: {}", path.display(), e)))?;
    parse_flat(&text)
}

/// `key = value` per line; `#` starts a comment.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected key = value", i + 1)))?;
        let k = k.trim().replace('-', "_");
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(err(format!("line {}: duplicate key {}", i + 1, k)));
        }
    }
    Ok(out)
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| err(format!("bad value for {}: {}", key, v)))
}

pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (s.parse::<i64>().ok()?, 1),
    };
    (d != 0).then(|| lift_core::exact::q(n, d))
}

fn sign_value(key: &str, v: i8) -> Result<i8, ConfigError> {
    if v == 1 || v == -1 {
        Ok(v)
    } else {
        Err(err(format!("{} must be 1 or -1", key)))
    }
}

impl RunConfig {
    pub fn build(flags: &Flags) -> Result<Self, ConfigError> {
        let mut file = match &flags.config {
            Some(p) => read_file(p)?,
            None => BTreeMap::new(),
        };
        let mut take = |key: &str| file.remove(key);
        let kappa_f = take("kappa").map(|v| parse::<u32>("kappa", &v)).transpose()?;
        let d_f = take("D").or_else(|| take("d")).map(|v| parse::<u64>("D", &v)).transpose()?;
        let norm_f = take("norm_xi");
        let chi_f = take("chi");
        let n_f = take("n").map(|v| parse::<usize>("n", &v)).transpose()?;
        let p_f = take("p").map(|v| parse::<u64>("p", &v)).transpose()?;
        let imax_f = take("imax").map(|v| parse::<u32>("imax", &v)).transpose()?;
        let mmax_f = take("mmax").map(|v| parse::<u32>("mmax", &v)).transpose()?;
        let samples_f = take("samples").map(|v| parse::<usize>("samples", &v)).transpose()?;
        let seed_f = take("seed").map(|v| parse::<u64>("seed", &v)).transpose()?;
        let tol_f = take("tol").map(|v| parse::<f64>("tol", &v)).transpose()?;
        let format_f = take("format");
        let threads_f = take("threads").map(|v| parse::<usize>("threads", &v)).transpose()?;
        let cache_f = take("cache_dir").map(PathBuf::from);
        let out_f = take("out").map(PathBuf::from);
        let kind_f = take("kind");
        let lambda_f = take("lambda");
        let lambda1_f = take("lambda1");
        let lambda2_f = take("lambda2");
        let sign_f = take("sign").map(|v| parse::<i8>("sign", &v)).transpose()?;
        let delta_f = take("delta").map(|v| parse::<i8>("delta", &v)).transpose()?;
        let omega_f = take("omega").map(|v| parse::<i8>("omega", &v)).transpose()?;
        let eps_f = take("eps").map(|v| parse::<i8>("eps", &v)).transpose()?;
        let eps_prime_f = take("eps_prime").map(|v| parse::<i8>("eps_prime", &v)).transpose()?;
        if let Some(k) = file.keys().next() {
            return Err(err(format!("unknown key {}", k)));
        }

        let kappa = flags.kappa.or(kappa_f);
        let d = flags.d.or(d_f);
        let scenario_given = kappa.is_some() || d.is_some();
        let norm_s = flags.norm_xi.clone().or(norm_f).unwrap_or_else(|| "1/4".into());
        let norm_xi = parse_rational(&norm_s)
            .filter(|x| *x > Q::from_integer(0.into()))
            .ok_or_else(|| err(format!("norm_xi must be a positive rational, got {}", norm_s)))?;
        let chi = flags.chi.clone().or(chi_f).unwrap_or_else(|| "unramified".into());
        if chi != "unramified" {
            return Err(err(format!("unsupported chi selector {}", chi)));
        }
        let tol = flags.tol.or(tol_f).unwrap_or(1e-8);
        if !(tol > 0.0) {
            return Err(err("tolerances must be positive"));
        }
        let format = match flags.format.clone().or(format_f).as_deref() {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some("markdown") | Some("md") => Format::Markdown,
            Some(o) => return Err(err(format!("unknown format {}", o))),
        };
        let threads = flags.threads.or(threads_f);
        if threads == Some(0) {
            return Err(err("threads must be positive"));
        }
        let cache_dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| flags.cache_dir.clone())
            .or(cache_f);
        let opt_sign = |k: &str, v: Option<i8>| v.map(|x| sign_value(k, x)).transpose();
        Ok(RunConfig {
            kappa: kappa.unwrap_or(12),
            d: d.unwrap_or(1),
            norm_xi,
            n: flags.n.or(n_f),
            p: flags.p.or(p_f),
            imax: flags.imax.or(imax_f).unwrap_or(3),
            mmax: flags.mmax.or(mmax_f).unwrap_or(3),
            samples: flags.samples.or(samples_f).unwrap_or(100),
            seed: flags.seed.or(seed_f).unwrap_or(20240601),
            tol,
            format,
            threads,
            cache_dir,
            out: flags.out.clone().or(out_f),
            kind: flags.kind.clone().or(kind_f),
            lambda: flags.lambda.clone().or(lambda_f),
            lambda1: flags.lambda1.clone().or(lambda1_f),
            lambda2: flags.lambda2.clone().or(lambda2_f),
            sign: opt_sign("sign", flags.sign.or(sign_f))?,
            delta: opt_sign("delta", flags.delta.or(delta_f))?,
            omega: opt_sign("omega", flags.omega.or(omega_f))?,
            eps: opt_sign("eps", flags.eps.or(eps_f))?,
            eps_prime: opt_sign("eps_prime", flags.eps_prime.or(eps_prime_f))?,
            scenario_given,
        })
    }

    /// `kappa` even and above 4, `D | 2`.
    pub fn check_scenario(&self) -> Result<(), ConfigError> {
        if self.kappa <= 4 || self.kappa % 2 != 0 {
            return Err(err(format!("kappa = {} must be even and > 4", self.kappa)));
        }
        if self.d != 1 && self.d != 2 {
            return Err(err(format!("D = {} must divide d_B = 2", self.d)));
        }
        Ok(())
    }
}
