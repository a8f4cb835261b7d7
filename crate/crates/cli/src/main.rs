//! `liftcheck`: runs the verification suites and prints closed forms.

mod config;
mod emit;
mod symbolic;

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lift_core::arakawa::{self, Constant, LiftContext};
use lift_core::eigenforms::{self, EllipticEigenform, QExpansion};
use lift_core::exact::laurent::{Laurent, Var};
use lift_core::exact::poly::Poly;
use lift_core::exact::{primes_up_to, Scalar, Q};
use lift_core::lfactors::{self, FactorData, FactorKind};
use lift_core::quadfield::{field_from_xi, QuadField, Splitting};
use lift_core::report::{all_passed, Report};
use lift_core::{charsums, spherical, spinor, Error};
use rayon::prelude::*;

use config::{ConfigError, Flags, RunConfig};

#[derive(Parser)]
#[command(name = "liftcheck", version, about = "Checks the local and global identities of a theta lift to GSp(1,1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exit 0 iff every case passes.
    Verify {
        suite: Suite,
        #[command(flatten)]
        flags: Flags,
    },
    /// Print a closed form or a numeric value.
    Compute {
        target: Target,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    #[value(name = "lemmas-2x")]
    Lemmas2x,
    #[value(name = "prop-2-9")]
    Prop29,
    #[value(name = "prop-2-10")]
    Prop210,
    #[value(name = "lemmas-3x")]
    Lemmas3x,
    Macdonald,
    AlphaP,
    AlphaBad,
    AlphaInf,
    JlMatch,
    ConstantsConsistency,
    Positivity,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Lfactor,
    SpinorPoly,
    Constants,
    Periods,
    CentralValue,
    FourierPrefactor,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precondition(_) | Error::Domain(_) | Error::CaseMismatch(_) | Error::Character(_) => {
                Failure::Config(e.to_string())
            }
            Error::Guard(_) | Error::Numeric(_) => Failure::Run(e.to_string()),
        }
    }
}

fn cfg_err(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

const DISC_NORMS: [(i64, i64); 4] = [(1, 4), (3, 1), (7, 4), (2, 1)];
const SUITE_PRIMES: [u64; 4] = [2, 3, 5, 7];

fn fields() -> Result<Vec<QuadField>, Error> {
    DISC_NORMS.iter().map(|&(n, d)| field_from_xi(&lift_core::exact::q(n, d))).collect()
}

fn primes(cfg: &RunConfig) -> Vec<u64> {
    cfg.p.map(|p| vec![p]).unwrap_or_else(|| SUITE_PRIMES.to_vec())
}

fn flatten(parts: Vec<Result<Vec<Report>, Error>>) -> Result<Vec<Report>, Error> {
    let mut out = vec![];
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn scenarios(cfg: &RunConfig) -> Vec<(u64, u32)> {
    if cfg.scenario_given {
        vec![(cfg.d, cfg.kappa)]
    } else {
        vec![(1, 12), (2, 8)]
    }
}

fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<Report>, Error> {
    match suite {
        Suite::Lemmas2x => Ok(lfactors::verify_local_lemmas(&primes(cfg))),
        Suite::Prop29 => Ok(spinor::verify_spin(&spinor::SAMPLE_PRIMES, cfg.samples, cfg.seed)),
        Suite::Prop210 => Ok(spinor::verify_convolution(&spinor::SAMPLE_PRIMES, cfg.samples, cfg.seed)),
        Suite::Lemmas3x => {
            let fs = fields()?;
            let jobs: Vec<(&QuadField, u64)> = fs.iter().flat_map(|f| primes(cfg).into_iter().map(move |p| (f, p))).collect();
            let parts = jobs
                .par_iter()
                .map(|&(f, p)| {
                    flatten(vec![
                        charsums::verify_sum_lemmas(f, p, cfg.imax),
                        charsums::verify_volume_lemmas(f, p, cfg.imax),
                        charsums::verify_coset_counts(f, p, cfg.imax),
                    ])
                })
                .collect();
            flatten(parts)
        }
        Suite::Macdonald => Ok(spherical::verify_macdonald(&[2, 3, 5], cfg.mmax)),
        Suite::AlphaP => {
            let fs = fields()?;
            let jobs: Vec<(&QuadField, u64)> = fs.iter().flat_map(|f| primes(cfg).into_iter().map(move |p| (f, p))).collect();
            flatten(jobs.par_iter().map(|&(f, p)| spherical::verify_alpha_unramified(f, p, cfg.imax)).collect())
        }
        Suite::AlphaBad => Ok(primes(cfg).into_iter().flat_map(spherical::verify_alpha_quaternion).collect()),
        Suite::AlphaInf => {
            let ks: Vec<u32> = if cfg.scenario_given { vec![cfg.kappa] } else { vec![6, 8, 10, 12, 20] };
            Ok(spherical::verify_alpha_infinity(&ks))
        }
        Suite::JlMatch => {
            let cal = eigenforms::jl_calibration()?;
            let ks: Vec<u32> = if cfg.scenario_given { vec![cfg.kappa] } else { vec![6, 8] };
            let ps: Vec<u64> = cfg.p.map(|p| vec![p]).unwrap_or_else(|| vec![3, 5, 7, 13]);
            let jobs: Vec<(u32, u64)> = ks.iter().flat_map(|&k| ps.iter().map(move |&p| (k, p))).collect();
            let mut out: Vec<Report> = jobs
                .par_iter()
                .map(|&(k, p)| eigenforms::jl_match(k, p, &cal))
                .collect::<Result<_, _>>()?;
            for k in (6..=20).step_by(2) {
                out.push(eigenforms::dimension_match(k)?);
            }
            Ok(out)
        }
        Suite::ConstantsConsistency => {
            let parts = scenarios(cfg)
                .par_iter()
                .map(|&(d, k)| {
                    let o = arakawa::positivity_report(d, k)?;
                    let ratio = arakawa::fprime_ratio(&o.pair.fprime.v)?;
                    arakawa::verify_constant_consistency(&o.context, &ratio)
                })
                .collect();
            flatten(parts)
        }
        Suite::Positivity => {
            let parts = scenarios(cfg)
                .par_iter()
                .map(|&(d, k)| {
                    let o = arakawa::positivity_report(d, k)?;
                    let mut r = o.reports;
                    r.extend(arakawa::central_value_identity(&o.context, &o.pair)?);
                    Ok(r)
                })
                .collect();
            flatten(parts)
        }
        Suite::All => {
            let suites = [
                Suite::Lemmas2x,
                Suite::Prop29,
                Suite::Prop210,
                Suite::Lemmas3x,
                Suite::Macdonald,
                Suite::AlphaP,
                Suite::AlphaBad,
                Suite::AlphaInf,
                Suite::JlMatch,
                Suite::ConstantsConsistency,
                Suite::Positivity,
            ];
            flatten(suites.iter().map(|&s| run_suite(s, cfg)).collect())
        }
    }
}

fn write_out(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {}", path.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn verify(suite: Suite, cfg: &RunConfig) -> Result<bool, Failure> {
    if cfg.scenario_given {
        cfg.check_scenario()?;
    }
    let reports = run_suite(suite, cfg)?;
    let name = suite.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    write_out(cfg, &emit::render(&name, &reports, cfg.format))?;
    Ok(all_passed(&reports))
}

// ---------------------------------------------------------------------------
// compute

fn parse_value(s: &Option<String>, what: &str, p: u64) -> Result<Laurent, Failure> {
    let s = s.as_deref().ok_or_else(|| cfg_err(format!("--{} is required", what)))?;
    let pp = symbolic::parse_power_product(s).map_err(|e| cfg_err(format!("--{}: {}", what, e)))?;
    symbolic::to_laurent(&pp, p).map_err(|e| cfg_err(format!("--{}: {}", what, e)))
}

fn need_prime(cfg: &RunConfig) -> Result<u64, Failure> {
    let p = cfg.p.ok_or_else(|| cfg_err("--p is required"))?;
    if !lift_core::exact::is_prime(p) {
        return Err(cfg_err(format!("p = {} is not prime", p)));
    }
    Ok(p)
}

fn splitting_of(cfg: &RunConfig, p: u64) -> Result<Splitting, Failure> {
    Ok(field_from_xi(&cfg.norm_xi)?.splitting(p))
}

fn compute_lfactor(cfg: &RunConfig) -> Result<String, Failure> {
    let p = need_prime(cfg)?;
    let kind = cfg.kind.as_deref().unwrap_or("std");
    let rp = spinor::RootP::laurent(p);
    let a = Laurent::var(Var::A);
    let a_inv = Laurent::var_pow(Var::A, -1);
    let omega = cfg.omega.unwrap_or(1);
    let mut data = FactorData::<Laurent> {
        satake: Some((a, a_inv)),
        sqrt_p_inv: Some(rp.s_inv.clone()),
        delta: cfg.delta,
        omega: Some(omega),
        special_sign: cfg.sign,
        splitting: Some(splitting_of(cfg, p)?),
        eta_value: None,
        ..Default::default()
    };
    let (fk, uses_trace) = match kind {
        "std" => (FactorKind::StdUnramified, true),
        "adjoint" => (FactorKind::AdjointUnramified, true),
        "basechange" => {
            data.chi_inv = match data.splitting {
                Some(Splitting::Split) => vec![Laurent::unit(), Laurent::unit()],
                Some(Splitting::Ramified) => vec![Laurent::from_i64(omega as i64)],
                _ => vec![],
            };
            (FactorKind::BasechangeTwistedUnramified, true)
        }
        "std-special" => (FactorKind::StdSpecial, false),
        "adjoint-special" => (FactorKind::AdjointSpecial, false),
        "basechange-special" => (FactorKind::BasechangeTwistedSpecial, false),
        "zeta" => (FactorKind::Zeta, false),
        "eta" => {
            let disc = field_from_xi(&cfg.norm_xi)?.disc;
            data.eta_value = Some(lift_core::quadfield::legendre(disc, p).clamp(-1, 1) as i8);
            if p == 2 {
                data.eta_value = Some(match data.splitting {
                    Some(Splitting::Split) => 1,
                    Some(Splitting::Inert) => -1,
                    _ => 0,
                });
            }
            (FactorKind::Eta, false)
        }
        other => return Err(cfg_err(format!("unknown factor kind {}", other))),
    };
    let factor = lfactors::local_factor(fk, &data, p)?;
    let poly = if uses_trace {
        let lambda = parse_value(&cfg.lambda, "lambda", p)?;
        let cs = factor
            .inv_poly
            .coeffs()
            .iter()
            .map(|c| symbolic::substitute_trace(c, &lambda))
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::Run)?;
        Poly::new(cs)
    } else {
        factor.inv_poly
    };
    Ok(format!("p = {}\nkind = {}\nL_p^-1 = {}\n", p, kind, symbolic::poly_string(&poly)))
}

fn compute_spinor(cfg: &RunConfig) -> Result<String, Failure> {
    let p = need_prime(cfg)?;
    let rp = spinor::RootP::laurent(p);
    let l1 = parse_value(&cfg.lambda1, "lambda1", p)?;
    let l2 = parse_value(&cfg.lambda2, "lambda2", p)?;
    let kind = cfg.kind.as_deref().unwrap_or("good");
    let local = match kind {
        "good" => spinor::spinor_good(&l1, &l2, &rp),
        "bad-quaternion" => spinor::spinor_bad(&l1, &l2, &rp, spinor::SpinorKind::BadQuaternionOnly),
        "bad-level" => spinor::spinor_bad(&l1, &l2, &rp, spinor::SpinorKind::BadLevel),
        other => return Err(cfg_err(format!("unknown spinor kind {}", other))),
    };
    Ok(format!("p = {}\nkind = {}\nQ_p = {}\n", p, kind, symbolic::poly_string(&local.poly)))
}

fn context(cfg: &RunConfig) -> Result<LiftContext, Failure> {
    cfg.check_scenario()?;
    let mut ctx = LiftContext::new(2, cfg.d, cfg.kappa, &cfg.norm_xi, true)?;
    let default_sign = |ctx: &LiftContext, p: u64| ctx.omega(p).unwrap_or(1);
    for p in ctx.d_primes() {
        let s = cfg.eps.unwrap_or_else(|| default_sign(&ctx, p));
        ctx = ctx.set_eps(p, s);
    }
    for p in ctx.d_b_primes() {
        let s = cfg.eps_prime.unwrap_or_else(|| default_sign(&ctx, p));
        ctx = ctx.set_eps_prime(p, s);
    }
    Ok(ctx)
}

fn constant_line(name: &str, c: &Constant) -> String {
    format!("{} = {}\n", name, c)
}

fn compute_constants(cfg: &RunConfig) -> Result<String, Failure> {
    let ctx = context(cfg)?;
    let mut out = format!(
        "d_B = {}\nD = {}\nkappa = {}\nn(xi) = {}\ndisc(E) = {}\n",
        ctx.d_b, ctx.d, ctx.kappa, ctx.field.norm_xi, ctx.field.disc
    );
    for (p, s) in &ctx.eps {
        out.push_str(&format!("eps_{} = {}\n", p, s));
    }
    for (p, s) in &ctx.eps_prime {
        out.push_str(&format!("eps'_{} = {}\n", p, s));
    }
    for p in ctx.relevant_primes() {
        out.push_str(&format!("C_{} = {}\n", p, arakawa::local_constant_cp(&ctx, p)?));
    }
    let one = Q::from_integer(1.into());
    out.push_str(&constant_line("C(f,chi)", &arakawa::constant_c_f_chi(&ctx)?));
    // The highest-weight share r of f' is left as a factor.
    out.push_str(&constant_line("C(f',chi) / r", &arakawa::constant_c_fprime_chi(&ctx, &one)?));
    out.push_str(&constant_line("C(f,f',xi,chi) / r", &arakawa::constant_c_total(&ctx, &one)?));
    Ok(out)
}

fn cache_path(dir: &Path, kappa: u32, level: u32, i: usize) -> std::path::PathBuf {
    dir.join(format!("qexp-k{}-N{}-{}.txt", kappa, level, i))
}

fn eigenform_from(expansion: QExpansion) -> Result<EllipticEigenform, Error> {
    let eigenvalues: BTreeMap<u64, Q> = primes_up_to(expansion.n())
        .into_iter()
        .map(|p| (p, expansion.coeff(p as usize).clone()))
        .collect();
    let mut f = EllipticEigenform {
        expansion,
        eigenvalues,
        al_sign: None,
    };
    if f.level() == 2 {
        f.al_sign = Some(eigenforms::atkin_lehner_sign(&f)?);
    }
    Ok(f)
}

/// Eigenforms of the scenario, read from and written to the cache directory.
fn cached_eigenforms(cfg: &RunConfig) -> Result<Vec<EllipticEigenform>, Failure> {
    let level = cfg.d as u32;
    let n = cfg.n.unwrap_or(0);
    let Some(dir) = &cfg.cache_dir else {
        return Ok(eigenforms::eigenforms(cfg.kappa, level, n)?);
    };
    let io = |e: std::io::Error| Failure::Run(format!("cache {}: {}", dir.display(), e));
    let mut cached = vec![];
    while let Ok(text) = std::fs::read_to_string(cache_path(dir, cfg.kappa, level, cached.len())) {
        let (_, e) = QExpansion::from_cache(&text).map_err(|e| Failure::Run(e.to_string()))?;
        cached.push(e);
    }
    if !cached.is_empty() && (n == 0 || cached.iter().all(|e| e.n() >= n)) {
        return cached.into_iter().map(|e| eigenform_from(e).map_err(Failure::from)).collect();
    }
    let fs = eigenforms::eigenforms(cfg.kappa, level, n)?;
    std::fs::create_dir_all(dir).map_err(io)?;
    for (i, f) in fs.iter().enumerate() {
        let label = format!("f{}", i);
        std::fs::write(cache_path(dir, cfg.kappa, level, i), f.expansion.to_cache(&label)).map_err(io)?;
    }
    Ok(fs)
}

fn compute_periods(cfg: &RunConfig) -> Result<String, Failure> {
    let ctx = context(cfg)?;
    let mut out = String::new();
    for (i, f) in cached_eigenforms(cfg)?.iter().enumerate() {
        let p = eigenforms::toral_period_f(f, &ctx.chi)?;
        out.push_str(&format!(
            "f{}: a_2 = {}, a_3 = {}, z = {:.6}+{:.6}i, y^(k/2) f(z) = {:.12e} +- {:.1e}\n",
            i,
            f.a(2),
            f.a(3),
            p.z.re,
            p.z.im,
            p.value.re,
            p.tail_bound
        ));
    }
    for (i, (fp, ev)) in eigenforms::quaternionic_eigenforms(cfg.kappa)?.iter().enumerate() {
        let v = eigenforms::toral_period_fprime(fp, &ctx.chi)?;
        let nonzero = v.iter().filter(|c| !c.is_nil()).count();
        let t3 = ev.get(&3).map(|x| x.to_string()).unwrap_or_default();
        let ratio = if nonzero > 0 {
            arakawa::fprime_ratio(&fp.v)?.to_string()
        } else {
            "-".into()
        };
        out.push_str(&format!(
            "f'{}: T_3 = {}, sign = {}, nonzero components = {}, highest-weight share = {}\n",
            i,
            t3,
            arakawa::quaternionic_sign(fp)?,
            nonzero,
            ratio
        ));
    }
    Ok(out)
}

fn compute_central(cfg: &RunConfig) -> Result<String, Failure> {
    let ctx = context(cfg)?;
    let mut out = String::new();
    for (i, f) in cached_eigenforms(cfg)?.iter().enumerate() {
        let l = arakawa::twisted_central_value(f, &ctx.chi)?;
        let ad = arakawa::adjoint_value(f)?;
        let pet = eigenforms::petersson_norm(f, cfg.tol)?;
        // classical <f, f> against 2^{-k} D L(Ad, 1)
        let predicted = 2f64.powi(-(cfg.kappa as i32)) * cfg.d as f64 * ad.value;
        out.push_str(&format!(
            "f{}: L(Pi, chi^-1, 1/2) = {:.12e} (residual {:.1e}, {} terms), L(Ad, 1) = {:.12e} (residual {:.1e}), <f,f> = {:.12e} +- {:.1e}, <f,f> / (2^(-k) D L(Ad, 1)) = {:.10}\n",
            i, l.value, l.residual, l.terms, ad.value, ad.residual, pet.value, pet.error, pet.value / predicted
        ));
    }
    Ok(out)
}

fn compute_prefactor(cfg: &RunConfig) -> Result<String, Failure> {
    let ctx = context(cfg)?;
    Ok(format!("{}\n", arakawa::fourier_prefactor(&ctx)?))
}

fn compute(target: Target, cfg: &RunConfig) -> Result<(), Failure> {
    let text = match target {
        Target::Lfactor => compute_lfactor(cfg)?,
        Target::SpinorPoly => compute_spinor(cfg)?,
        Target::Constants => compute_constants(cfg)?,
        Target::Periods => compute_periods(cfg)?,
        Target::CentralValue => compute_central(cfg)?,
        Target::FourierPrefactor => compute_prefactor(cfg)?,
    };
    write_out(cfg, &text)
}

fn setup(flags: &Flags) -> Result<RunConfig, Failure> {
    let cfg = RunConfig::build(flags)?;
    if let Some(t) = cfg.threads {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify { suite, flags } => setup(flags).and_then(|cfg| verify(*suite, &cfg)),
        Command::Compute { target, flags } => setup(flags).and_then(|cfg| compute(*target, &cfg)).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("liftcheck: {}", m);
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("liftcheck: {}", m);
            ExitCode::from(1)
        }
    }
}
