//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pixcode_core::metrics::{Constellation, DEFAULT_NOISE_DBM, DEFAULT_PATH_LOSS_DB, DEFAULT_TRIALS};
use pixcode_core::pattern::{cumulative_power, decompose_weighted};
use pixcode_core::switches::{correlation_vs_switches, Branch};
use pixcode_core::{
    approx_pattern, eadof, ga_optimize, minimize_switches, radiation_pattern, synthesize_dipole_grid, AngularGrid,
    AntennaBundle, AntennaCoder, BasisDecomposition, Error as CoreError, GaParams, InputModel, PatternCoder,
    PowerModel, SphereWeighting,
};
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::exec::RayonExecutor;
use crate::experiments::{self, EeCase, LinkBudget, Sweep};
use crate::manifest::{write_csv, RunManifest};
use crate::{bundle_io, codebook_io};

#[derive(Debug, Parser)]
#[command(name = "pixcode", version, about = "Antenna-coded MIMO with pixel antennas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a pixel antenna bundle.
    Synth(SynthArgs),
    /// Cumulative basis power and effective aerial degrees of freedom.
    Eadof(EadofArgs),
    /// Optimize a codebook with the genetic algorithm.
    Codebook(CodebookArgs),
    /// Remove RF switches from a codebook.
    Minswitch(MinswitchArgs),
    /// Monte-Carlo spectral and energy efficiency sweeps.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Export the radiation pattern of one antenna coder.
    Pattern(PatternArgs),
}

#[derive(Debug, Subcommand)]
pub enum Simulate {
    Se(SeArgs),
    Ee(EeArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 11.0)]
    pub spacing_mm: f64,
    #[arg(long, default_value_t = 2.4)]
    pub freq_ghz: f64,
    /// Angular grid step in degrees.
    #[arg(long, default_value_t = 5.0)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Weighting {
    Unweighted,
    SinTheta,
}

impl From<Weighting> for SphereWeighting {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Unweighted => SphereWeighting::Unweighted,
            Weighting::SinTheta => SphereWeighting::SinTheta,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EadofArgs {
    #[arg(long)]
    pub antenna: PathBuf,
    #[arg(long, default_value_t = 0.995)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = Weighting::Unweighted)]
    pub weighting: Weighting,
    /// CSV with the per-index cumulative power table.
    #[arg(short = 'o', long = "out")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct GaFlags {
    #[arg(long, default_value_t = 200)]
    pub population: usize,
    #[arg(long, default_value_t = 500)]
    pub generations: usize,
    #[arg(long, default_value_t = 0.8)]
    pub crossover: f64,
    /// Per-bit mutation probability; default is one over the genome length.
    #[arg(long)]
    pub mutation: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub elitism: usize,
}

impl GaFlags {
    fn params(&self, seed: u64) -> GaParams {
        GaParams {
            population: self.population,
            generations: self.generations,
            crossover_rate: self.crossover,
            mutation_rate: self.mutation,
            elitism: self.elitism,
            seed,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct CodebookArgs {
    #[arg(long)]
    pub antenna: PathBuf,
    #[arg(short = 'p', long)]
    pub p: usize,
    #[command(flatten)]
    pub ga: GaFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct MinswitchArgs {
    #[arg(long)]
    pub antenna: PathBuf,
    #[arg(long)]
    pub codebook: PathBuf,
    /// Allowed rise of the mean correlation above g*.
    #[arg(long)]
    pub delta_g: f64,
    #[command(flatten)]
    pub ga: GaFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
    /// CSV of the iterations and of the best correlation per switch count.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum Input {
    Qpsk,
    Bpsk,
    Gaussian,
}

impl From<Input> for InputModel {
    fn from(i: Input) -> Self {
        match i {
            Input::Qpsk => InputModel::Discrete(Constellation::Qpsk),
            Input::Bpsk => InputModel::Discrete(Constellation::Bpsk),
            Input::Gaussian => InputModel::Gaussian,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SweepFlags {
    /// Receive antennas.
    #[arg(short = 'm', long, default_value_t = 4)]
    pub m: usize,
    /// Transmit antennas.
    #[arg(short = 'n', long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub snr_start: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub snr_stop: f64,
    #[arg(long, default_value_t = 5.0)]
    pub snr_step: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Input::Qpsk)]
    pub input: Input,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

impl SweepFlags {
    fn sweep(&self) -> Result<Sweep> {
        Ok(Sweep {
            m: self.m,
            n: self.n,
            snr_db: experiments::snr_grid(self.snr_start, self.snr_stop, self.snr_step)?,
            trials: self.trials,
            seed: self.seed,
            input: self.input.into(),
        })
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SeArgs {
    #[command(flatten)]
    pub sweep: SweepFlags,
    /// Antenna bundle the codebook was designed for.
    #[arg(long, requires = "codebook")]
    pub antenna: Option<PathBuf>,
    #[arg(long, requires = "antenna", conflicts_with = "ideal")]
    pub codebook: Option<PathBuf>,
    /// Use P ideal selector pattern coders instead of a codebook file.
    #[arg(long, required_unless_present = "codebook")]
    pub ideal: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EeArgs {
    #[command(flatten)]
    pub sweep: SweepFlags,
    #[arg(long)]
    pub antenna: Option<PathBuf>,
    /// Codebook file (repeatable); switch count defaults to its partition.
    #[arg(long)]
    pub codebook: Vec<PathBuf>,
    /// Ideal selector codebook of size P (repeatable).
    #[arg(long)]
    pub ideal: Vec<usize>,
    /// Switch counts to evaluate for every codebook.
    #[arg(long, value_delimiter = ',')]
    pub n_sw: Vec<usize>,
    #[arg(long, default_value_t = 0.4)]
    pub p_rf: f64,
    #[arg(long, default_value_t = 0.4)]
    pub p_bb: f64,
    /// Power amplifier efficiency.
    #[arg(long, default_value_t = 0.2)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_sw: f64,
    #[arg(long, default_value_t = DEFAULT_PATH_LOSS_DB)]
    pub path_loss_db: f64,
    #[arg(long, default_value_t = DEFAULT_NOISE_DBM, allow_negative_numbers = true)]
    pub noise_dbm: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PatternArgs {
    #[arg(long)]
    pub antenna: PathBuf,
    /// Antenna coder bits, port 1 first (1 = open).
    #[arg(long)]
    pub coder: String,
    /// Use the weak-coupling approximation instead of the exact solve.
    #[arg(long)]
    pub approx: bool,
    #[arg(short = 'o', long = "out")]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    let exec = RayonExecutor::from_env();
    match cli.command {
        Command::Synth(a) => synth(&a, &exec),
        Command::Eadof(a) => cmd_eadof(&a, &exec),
        Command::Codebook(a) => codebook(&a, &exec),
        Command::Minswitch(a) => minswitch(&a, &exec),
        Command::Simulate(Simulate::Se(a)) => simulate_se(&a, &exec),
        Command::Simulate(Simulate::Ee(a)) => simulate_ee(&a, &exec),
        Command::Pattern(a) => pattern(&a, &exec),
    }
}

fn manifest<T: Serialize>(command: &str, args: &T, exec: &RayonExecutor) -> RunManifest {
    RunManifest::start(command, exec.threads()).config(serde_json::to_value(args).unwrap_or_default())
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(AppError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ))
    }
}

fn load_antenna(path: &Path, m: &mut RunManifest) -> Result<AntennaBundle> {
    require_file(path)?;
    m.input(path)?;
    bundle_io::load(path)
}

fn synth(a: &SynthArgs, exec: &RayonExecutor) -> Result<()> {
    let grid = AngularGrid::uniform(a.grid_step)?;
    let bundle = synthesize_dipole_grid(a.rows, a.cols, a.spacing_mm * 1e-3, a.freq_ghz * 1e9, &grid, a.seed)?;
    bundle_io::save(&bundle, &a.out)?;
    manifest("synth", a, exec).seed("synth", a.seed).finish(&a.out)?;
    println!("q = {}", bundle.q());
    Ok(())
}

fn cmd_eadof(a: &EadofArgs, exec: &RayonExecutor) -> Result<()> {
    let mut m = manifest("eadof", a, exec);
    let bundle = load_antenna(&a.antenna, &mut m)?;
    let decomp = decompose_weighted(&bundle, a.weighting.into())?;
    let r = eadof(&decomp, a.threshold)?;
    println!("R = {r}");
    println!("r_full = {}", decomp.r_full);
    if let Some(out) = &a.out {
        let rows: Vec<Vec<String>> = cumulative_power(&decomp)
            .iter()
            .zip(decomp.sigma.iter())
            .enumerate()
            .map(|(i, (f, s))| vec![(i + 1).to_string(), s.to_string(), f.to_string()])
            .collect();
        write_csv(out, &["index", "sigma", "cumulative_power"], &rows)?;
        m.finish(out)?;
    }
    Ok(())
}

fn codebook(a: &CodebookArgs, exec: &RayonExecutor) -> Result<()> {
    let mut m = manifest("codebook", a, exec).seed("ga", a.seed);
    let bundle = load_antenna(&a.antenna, &mut m)?;
    let decomp = pixcode_core::decompose(&bundle)?;
    if a.p < 2 {
        return Err(CoreError::DegenerateCodebook { p: a.p }.into());
    }
    let r = eadof(&decomp, 0.995)?;
    if a.p > r {
        eprintln!("pixcode: warning p={} exceeds the EADoF {r} at threshold 0.995", a.p);
    }
    let cb = ga_optimize(&bundle, &decomp, a.p, &a.ga.params(a.seed), exec)?;
    let g = cb.mean_correlation();
    let cb = cb.with_g_star(g);
    codebook_io::save(&cb, &a.out)?;
    m.finish(&a.out)?;
    println!("mean_correlation = {g}");
    Ok(())
}

fn minswitch(a: &MinswitchArgs, exec: &RayonExecutor) -> Result<()> {
    let mut m = manifest("minswitch", a, exec).seed("ga", a.seed);
    let bundle = load_antenna(&a.antenna, &mut m)?;
    require_file(&a.codebook)?;
    m.input(&a.codebook)?;
    let baseline = codebook_io::load(&a.codebook)?;
    let decomp = pixcode_core::decompose(&bundle)?;
    let g_star = baseline.g_star().unwrap_or(baseline.mean_correlation());
    let run = minimize_switches(
        &bundle,
        &decomp,
        &baseline,
        g_star,
        a.delta_g,
        &a.ga.params(a.seed),
        exec,
    )?;
    codebook_io::save(&run.codebook, &a.out)?;
    if let Some(trace) = &a.trace {
        let mut rows = Vec::new();
        let records = run
            .trace
            .iter()
            .map(|r| (r, true))
            .chain(run.rejected.iter().map(|r| (r, false)));
        for (i, (rec, accepted)) in records.enumerate() {
            let ports: Vec<String> = rec
                .hardwired
                .iter()
                .map(|&(v, s)| format!("{}:{}", v + 1, u8::from(s)))
                .collect();
            rows.push(vec![
                "iteration".into(),
                (i + 1).to_string(),
                match rec.branch {
                    Branch::Identical => "identical",
                    Branch::Forced => "forced",
                }
                .into(),
                ports.join(" "),
                rec.switch_count.to_string(),
                rec.mean_correlation.to_string(),
                accepted.to_string(),
            ]);
        }
        for (s, g, _) in correlation_vs_switches(&baseline, &run) {
            rows.push(vec![
                "best".into(),
                String::new(),
                String::new(),
                String::new(),
                s.to_string(),
                g.to_string(),
                String::new(),
            ]);
        }
        let header = [
            "record",
            "iteration",
            "branch",
            "hardwired",
            "switch_count",
            "mean_correlation",
            "accepted",
        ];
        write_csv(trace, &header, &rows)?;
    }
    m.finish(&a.out)?;
    println!("switches = {}", run.switch_count());
    println!("mean_correlation = {}", run.codebook.mean_correlation());
    Ok(())
}

fn file_coders(
    antenna: &Path,
    codebook: &Path,
    m: &mut RunManifest,
    decomp_cache: &mut Option<(AntennaBundle, BasisDecomposition)>,
) -> Result<(Vec<PatternCoder>, usize)> {
    if decomp_cache.is_none() {
        let bundle = load_antenna(antenna, m)?;
        let decomp = pixcode_core::decompose(&bundle)?;
        *decomp_cache = Some((bundle, decomp));
    }
    let (bundle, decomp) = decomp_cache.as_ref().expect("filled above");
    require_file(codebook)?;
    m.input(codebook)?;
    let cb = codebook_io::load(codebook)?;
    if cb.q() != bundle.q() {
        return Err(AppError::format(
            codebook,
            "q",
            format!("codebook has q = {}, antenna has {}", cb.q(), bundle.q()),
        ));
    }
    Ok((cb.pattern_coders(bundle, decomp)?, cb.partition().switch_count()))
}

fn simulate_se(a: &SeArgs, exec: &RayonExecutor) -> Result<()> {
    let mut m = manifest("simulate se", a, exec).seed("mc", a.sweep.seed);
    let sweep = a.sweep.sweep()?;
    let coders = match (&a.antenna, &a.codebook, a.ideal) {
        (Some(ant), Some(cb), None) => file_coders(ant, cb, &mut m, &mut None)?.0,
        (None, None, Some(p)) => experiments::ideal_coders(p)?,
        _ => {
            return Err(AppError::Usage(
                "give either --ideal P or --antenna with --codebook".into(),
            ))
        }
    };
    let points = experiments::se_sweep(&coders, &sweep, exec)?;
    write_csv(&a.sweep.out, &experiments::SE_HEADER, &experiments::se_rows(&points))?;
    m.finish(&a.sweep.out)?;
    Ok(())
}

fn simulate_ee(a: &EeArgs, exec: &RayonExecutor) -> Result<()> {
    let mut m = manifest("simulate ee", a, exec).seed("mc", a.sweep.seed);
    let sweep = a.sweep.sweep()?;
    if a.codebook.is_empty() && a.ideal.is_empty() {
        return Err(AppError::Usage("give at least one --codebook or --ideal".into()));
    }
    let model = PowerModel::new(a.sweep.n, a.p_rf, a.p_bb, a.eta, 0, a.p_sw)?;
    let budget = LinkBudget {
        path_loss_db: a.path_loss_db,
        noise_dbm: a.noise_dbm,
    };

    let mut sources: Vec<(String, Vec<PatternCoder>, usize)> = Vec::new();
    if !a.codebook.is_empty() {
        let antenna = a
            .antenna
            .as_ref()
            .ok_or_else(|| AppError::Usage("--codebook needs --antenna".into()))?;
        let mut cache = None;
        for path in &a.codebook {
            let (coders, switches) = file_coders(antenna, path, &mut m, &mut cache)?;
            sources.push((path.display().to_string(), coders, switches));
        }
    }
    for &p in &a.ideal {
        sources.push((format!("ideal-{p}"), experiments::ideal_coders(p)?, 0));
    }

    let mut cases = Vec::new();
    for (label, coders, own) in &sources {
        if a.n_sw.is_empty() {
            cases.push(EeCase {
                label: label.clone(),
                coders,
                n_sw: *own,
            });
        } else {
            for &n_sw in &a.n_sw {
                cases.push(EeCase {
                    label: label.clone(),
                    coders,
                    n_sw,
                });
            }
        }
    }
    let points = experiments::ee_sweep(&cases, &sweep, budget, &model, exec)?;
    write_csv(&a.sweep.out, &experiments::EE_HEADER, &experiments::ee_rows(&points))?;
    m.finish(&a.sweep.out)?;
    Ok(())
}

fn pattern(a: &PatternArgs, exec: &RayonExecutor) -> Result<()> {
    let mut m = manifest("pattern", a, exec);
    let bundle = load_antenna(&a.antenna, &mut m)?;
    let coder = AntennaCoder::parse(&a.coder)?;
    if coder.len() != bundle.q() {
        return Err(
            CoreError::InvalidCoder(format!("{} bits given, antenna has q = {}", coder.len(), bundle.q())).into(),
        );
    }
    let pat = if a.approx {
        approx_pattern(&bundle, &coder)?
    } else {
        radiation_pattern(&bundle, &coder)?
    };
    let (et, ep) = (pat.theta(), pat.phi());
    let rows: Vec<Vec<String>> = bundle
        .grid()
        .directions()
        .enumerate()
        .map(|(k, (t, p))| {
            vec![
                t.to_string(),
                p.to_string(),
                et[k].re.to_string(),
                et[k].im.to_string(),
                ep[k].re.to_string(),
                ep[k].im.to_string(),
            ]
        })
        .collect();
    let header = [
        "theta_deg",
        "phi_deg",
        "e_theta_re",
        "e_theta_im",
        "e_phi_re",
        "e_phi_im",
    ];
    write_csv(&a.out, &header, &rows)?;
    m.finish(&a.out)?;
    Ok(())
}
