//! SNR sweeps for spectral and energy efficiency.

use pixcode_core::channel::ChannelEnsemble;
use pixcode_core::metrics::uniform_covariance;
use pixcode_core::{
    energy_efficiency, total_se, Error as CoreError, Executor, InputModel, McConfig, PatternCoder, PowerModel,
    SeEstimate, SnrSpec,
};

use crate::error::{AppError, Result};

/// Inclusive dB grid `start, start + step, ...` up to `stop`.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !step.is_finite() {
        return Err(AppError::Usage(format!("SNR step must be positive, got {step}")));
    }
    if !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(AppError::Usage(format!("empty SNR sweep {start}..{stop}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Ideal codebook: `p` selector pattern coders of length `p`.
pub fn ideal_coders(p: usize) -> Result<Vec<PatternCoder>> {
    if p < 2 {
        return Err(CoreError::DegenerateCodebook { p }.into());
    }
    Ok((0..p).map(|i| PatternCoder::selector(i, p)).collect())
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub m: usize,
    pub n: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub input: InputModel,
}

#[derive(Debug, Clone, Copy)]
pub struct SePoint {
    pub snr_db: f64,
    pub se: SeEstimate,
    pub trials: usize,
}

/// Every SNR point reuses the same seed, so the curves share channel and
/// noise draws.
pub fn se_sweep<E: Executor>(coders: &[PatternCoder], sweep: &Sweep, exec: &E) -> Result<Vec<SePoint>> {
    let r = coders.first().map_or(0, |c| c.len());
    let ensemble = ChannelEnsemble::iid(sweep.m, sweep.n, r)?;
    let cfg = McConfig::new(sweep.trials, sweep.seed).with_input(sweep.input);
    sweep
        .snr_db
        .iter()
        .map(|&snr_db| {
            let snr = SnrSpec::from_snr_db(snr_db)?.snr();
            let s_cov = uniform_covariance(sweep.n, snr);
            let se = total_se(&ensemble, coders, &s_cov, 1.0, &cfg, exec)?;
            Ok(SePoint {
                snr_db,
                se,
                trials: sweep.trials,
            })
        })
        .collect()
}

pub const SE_HEADER: [&str; 6] = [
    "snr_db",
    "se_total",
    "se_mimo_term",
    "se_coding_term",
    "std_error",
    "trials",
];

pub fn se_rows(points: &[SePoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                p.snr_db.to_string(),
                p.se.total.value.to_string(),
                p.se.mimo_term.value.to_string(),
                p.se.coding_term.value.to_string(),
                p.se.total.std_error.to_string(),
                p.trials.to_string(),
            ]
        })
        .collect()
}

/// Link budget turning a target SNR into transmit power.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget {
    pub path_loss_db: f64,
    pub noise_dbm: f64,
}

impl LinkBudget {
    pub fn transmit_dbm(&self, snr_db: f64) -> f64 {
        snr_db + self.path_loss_db + self.noise_dbm
    }

    pub fn transmit_watts(&self, snr_db: f64) -> f64 {
        10f64.powf((self.transmit_dbm(snr_db) - 30.0) / 10.0)
    }
}

pub struct EeCase<'a> {
    pub label: String,
    pub coders: &'a [PatternCoder],
    pub n_sw: usize,
}

#[derive(Debug, Clone)]
pub struct EePoint {
    pub label: String,
    pub n_sw: usize,
    pub snr_db: f64,
    pub p_t_dbm: f64,
    pub se: SeEstimate,
    pub ee: f64,
    pub trials: usize,
}

/// SE for each case over the sweep, then EE with `n_rf = n` RF chains.
pub fn ee_sweep<E: Executor>(
    cases: &[EeCase<'_>],
    sweep: &Sweep,
    budget: LinkBudget,
    model: &PowerModel,
    exec: &E,
) -> Result<Vec<EePoint>> {
    let mut out = Vec::new();
    for case in cases {
        let model = model.with_switches(case.n_sw);
        for point in se_sweep(case.coders, sweep, exec)? {
            let p_t = budget.transmit_watts(point.snr_db);
            out.push(EePoint {
                label: case.label.clone(),
                n_sw: case.n_sw,
                snr_db: point.snr_db,
                p_t_dbm: budget.transmit_dbm(point.snr_db),
                se: point.se,
                ee: energy_efficiency(point.se.total.value, &model, p_t),
                trials: point.trials,
            });
        }
    }
    Ok(out)
}

pub const EE_HEADER: [&str; 8] = [
    "p_t_dbm",
    "snr_db",
    "codebook",
    "n_sw",
    "se_total",
    "std_error",
    "ee",
    "trials",
];

pub fn ee_rows(points: &[EePoint]) -> Vec<Vec<String>> {
    points
        .iter()
        .map(|p| {
            vec![
                p.p_t_dbm.to_string(),
                p.snr_db.to_string(),
                p.label.clone(),
                p.n_sw.to_string(),
                p.se.total.value.to_string(),
                p.se.total.std_error.to_string(),
                p.ee.to_string(),
                p.trials.to_string(),
            ]
        })
        .collect()
}
