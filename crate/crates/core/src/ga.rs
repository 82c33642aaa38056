//! Binary genetic search and exhaustive enumeration for codebook design.
//!
//! The genome of a codebook is the concatenation of its `P` coders, `P Q`
//! bits. Selection is a size-3 tournament, recombination is uniform
//! crossover, mutation flips bits independently, and the best `elitism`
//! individuals survive unchanged. Hardwired ports are frozen: their bits
//! never change. Fitness is the mean correlation plus one per pair of
//! identical coders.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::bundle::AntennaBundle;
use crate::codebook::{duplicate_pairs, pair_mean, unit_pattern_coder, Codebook, CoderCache, SwitchPartition};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::CVector;
use crate::network::AntennaCoder;
use crate::pattern::BasisDecomposition;
use crate::rng::stream_rng;

const TOURNAMENT: usize = 3;
const CACHE_CAPACITY: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means one over the genome length.
    pub mutation_rate: Option<f64>,
    pub elitism: usize,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 200,
            generations: 500,
            crossover_rate: 0.8,
            mutation_rate: None,
            elitism: 2,
            seed: 0,
        }
    }
}

impl GaParams {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidParameter(format!(
                "population must be at least 2, got {}",
                self.population
            )));
        }
        if self.elitism >= self.population {
            return Err(Error::InvalidParameter(format!(
                "elitism {} must be below the population {}",
                self.elitism, self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::InvalidParameter(format!(
                "crossover rate {} not in [0, 1]",
                self.crossover_rate
            )));
        }
        if let Some(m) = self.mutation_rate {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::InvalidParameter(format!("mutation rate {m} not in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Result of a GA run over raw genomes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: Vec<bool>,
    pub best_fitness: f64,
    /// Best fitness in the population after initialization and after
    /// every generation.
    pub generation_best: Vec<f64>,
    pub evaluations: usize,
}

/// Minimizes `evaluate` over genomes of `frozen.len()` bits. `evaluate`
/// receives a whole batch and returns one fitness per genome. `seeds`
/// enter the initial population first (with frozen bits enforced).
pub fn run_ga(
    params: &GaParams,
    frozen: &[Option<bool>],
    seeds: &[Vec<bool>],
    evaluate: &mut dyn FnMut(&[Vec<bool>]) -> Vec<f64>,
) -> Result<GaOutcome> {
    params.validate()?;
    let bits = frozen.len();
    let mutation = params
        .mutation_rate
        .unwrap_or(if bits == 0 { 0.0 } else { 1.0 / bits as f64 });
    let mut rng = stream_rng(params.seed, 0);
    let enforce = |g: &mut Vec<bool>| {
        for (b, f) in g.iter_mut().zip(frozen) {
            if let Some(v) = f {
                *b = *v;
            }
        }
    };

    let mut pop: Vec<Vec<bool>> = Vec::with_capacity(params.population);
    for s in seeds.iter().take(params.population) {
        if s.len() != bits {
            return Err(Error::DimensionMismatch(format!(
                "seed genome has {} bits, expected {bits}",
                s.len()
            )));
        }
        let mut g = s.clone();
        enforce(&mut g);
        pop.push(g);
    }
    while pop.len() < params.population {
        let mut g: Vec<bool> = (0..bits).map(|_| rng.random::<bool>()).collect();
        enforce(&mut g);
        pop.push(g);
    }
    let mut fit = evaluate(&pop);
    let mut evaluations = pop.len();

    let mut best_idx = argmin(&fit);
    let mut best = pop[best_idx].clone();
    let mut best_fitness = fit[best_idx];
    let mut generation_best = vec![best_fitness];

    for _ in 0..params.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]).then(a.cmp(&b)));
        let mut next: Vec<Vec<bool>> = Vec::with_capacity(params.population);
        let mut next_fit: Vec<f64> = Vec::with_capacity(params.population);
        for &i in order.iter().take(params.elitism) {
            next.push(pop[i].clone());
            next_fit.push(fit[i]);
        }
        let mut children = Vec::with_capacity(params.population - next.len());
        while next.len() + children.len() < params.population {
            let a = tournament(&fit, &mut rng);
            let b = tournament(&fit, &mut rng);
            let mut child = if rng.random::<f64>() < params.crossover_rate {
                pop[a]
                    .iter()
                    .zip(&pop[b])
                    .map(|(&x, &y)| if rng.random::<bool>() { x } else { y })
                    .collect()
            } else {
                pop[a].clone()
            };
            for bit in child.iter_mut() {
                if rng.random::<f64>() < mutation {
                    *bit = !*bit;
                }
            }
            enforce(&mut child);
            children.push(child);
        }
        let child_fit = evaluate(&children);
        evaluations += children.len();
        next.extend(children);
        next_fit.extend(child_fit);
        pop = next;
        fit = next_fit;

        best_idx = argmin(&fit);
        if fit[best_idx] < best_fitness {
            best_fitness = fit[best_idx];
            best = pop[best_idx].clone();
        }
        generation_best.push(fit[best_idx]);
    }
    Ok(GaOutcome {
        best,
        best_fitness,
        generation_best,
        evaluations,
    })
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}

fn tournament<R: Rng>(fit: &[f64], rng: &mut R) -> usize {
    let mut winner = rng.random_range(0..fit.len());
    for _ in 1..TOURNAMENT {
        let c = rng.random_range(0..fit.len());
        if fit[c] < fit[winner] || (fit[c] == fit[winner] && c < winner) {
            winner = c;
        }
    }
    winner
}

/// Minimizes the mean correlation of a `p`-coder codebook with every port
/// switched.
pub fn ga_optimize<E: Executor>(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    p: usize,
    params: &GaParams,
    exec: &E,
) -> Result<Codebook> {
    ga_optimize_constrained(bundle, decomp, p, &SwitchPartition::full(bundle.q()), &[], params, exec)
}

/// GA over the switched ports of `partition`; hardwired ports keep their
/// fixed states. Each seed is a list of `p` coders and joins the initial
/// population; seeds may contain repeated coders.
pub fn ga_optimize_constrained<E: Executor>(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    p: usize,
    partition: &SwitchPartition,
    seeds: &[Vec<AntennaCoder>],
    params: &GaParams,
    exec: &E,
) -> Result<Codebook> {
    Ok(ga_search(bundle, decomp, p, partition, seeds, params, exec)?.0)
}

/// Same as [`ga_optimize_constrained`] but also returns the raw GA record.
pub fn ga_search<E: Executor>(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    p: usize,
    partition: &SwitchPartition,
    seeds: &[Vec<AntennaCoder>],
    params: &GaParams,
    exec: &E,
) -> Result<(Codebook, GaOutcome)> {
    if p < 2 {
        return Err(Error::DegenerateCodebook { p });
    }
    let q = bundle.q();
    if partition.q() != q {
        return Err(Error::DimensionMismatch(format!(
            "partition covers {} ports, antenna has {q}",
            partition.q()
        )));
    }
    let free = partition.switch_count();
    if free < usize::BITS as usize && (1usize << free) < p {
        return Err(Error::InvalidCodebook(format!(
            "{free} switched ports cannot realize {p} distinct coders"
        )));
    }
    let port_frozen = partition.frozen();
    let frozen: Vec<Option<bool>> = (0..p).flat_map(|_| port_frozen.iter().copied()).collect();
    let mut seed_genomes = Vec::with_capacity(seeds.len());
    for s in seeds {
        if s.len() != p || s.iter().any(|c| c.len() != q) {
            return Err(Error::DimensionMismatch(format!(
                "seed codebook is not {p} coders of {q} bits"
            )));
        }
        seed_genomes.push(s.iter().flat_map(|c| c.bits().iter().copied()).collect());
    }

    let mut cache = CoderCache::new(bundle, decomp, CACHE_CAPACITY);
    let mut evaluate = |batch: &[Vec<bool>]| -> Vec<f64> {
        cache.fill(batch.iter().flat_map(|g| g.chunks(q)), exec);
        let cache = &cache;
        exec.map(batch.len(), |i| genome_fitness(cache, &batch[i], q))
    };
    let outcome = run_ga(params, &frozen, &seed_genomes, &mut evaluate)?;

    let coders: Vec<AntennaCoder> = outcome.best.chunks(q).map(|c| AntennaCoder::new(c.to_vec())).collect();
    let codebook = Codebook::evaluate_with(bundle, decomp, coders, partition.clone())?;
    Ok((codebook, outcome))
}

fn genome_fitness(cache: &CoderCache<'_>, genome: &[bool], q: usize) -> f64 {
    let bits: Vec<&[bool]> = genome.chunks(q).collect();
    let mut units: Vec<&CVector> = Vec::with_capacity(bits.len());
    for b in &bits {
        match cache.get(b) {
            Some(w) => units.push(w),
            None => return f64::INFINITY,
        }
    }
    pair_mean(&units, &bits) + duplicate_pairs(&bits) as f64
}

fn binomial(n: u128, k: u128) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Global minimum of the mean correlation over all sets of `p` distinct
/// coders. Needs `Q <= q_limit` and either `2^Q <= 256` with `p <= 3` or
/// `p Q <= 20`.
pub fn exhaustive_optimize<E: Executor>(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    p: usize,
    q_limit: usize,
    exec: &E,
) -> Result<Codebook> {
    if p < 2 {
        return Err(Error::DegenerateCodebook { p });
    }
    let q = bundle.q();
    let count = if q < 64 {
        binomial(1u128 << q, p as u128)
    } else {
        u128::MAX
    };
    let feasible = q <= q_limit && ((q <= 8 && p <= 3) || p * q <= 20);
    if !feasible {
        return Err(Error::TooLarge { count });
    }
    let n = 1usize << q;
    if p > n {
        return Err(Error::InvalidCodebook(format!(
            "{q} ports cannot realize {p} distinct coders"
        )));
    }
    let coders: Vec<AntennaCoder> = (0..n as u64).map(|i| AntennaCoder::from_index(i, q)).collect();
    let units = exec.map(n, |i| unit_pattern_coder(bundle, decomp, &coders[i]));
    let units = units.into_iter().collect::<Result<Vec<_>>>()?;
    let gram: Vec<f64> = exec
        .map(n, |i| {
            (0..n)
                .map(|j| units[i].dotc(&units[j]).norm_sqr())
                .collect::<Vec<f64>>()
        })
        .into_iter()
        .flatten()
        .collect();

    let pairs = (p * (p - 1)) as f64 / 2.0;
    let mut idx: Vec<usize> = (0..p).collect();
    let mut best = (f64::INFINITY, idx.clone());
    loop {
        let mut s = 0.0;
        for a in 0..p {
            for b in a + 1..p {
                s += gram[idx[a] * n + idx[b]];
            }
        }
        let g = s / pairs;
        if g < best.0 {
            best = (g, idx.clone());
        }
        // next combination in lexicographic order
        let mut i = p;
        loop {
            if i == 0 {
                let chosen = best.1.iter().map(|&k| coders[k].clone()).collect();
                return Codebook::evaluate(bundle, decomp, chosen);
            }
            i -= 1;
            if idx[i] < n - p + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..p {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::grid::AngularGrid;
    use crate::pattern::decompose;
    use crate::synth::synthesize_dipole_grid;

    #[test]
    fn params_validation() {
        assert!(GaParams::default().validate().is_ok());
        let bad = GaParams {
            population: 1,
            ..GaParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = GaParams {
            elitism: 200,
            ..GaParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = GaParams {
            crossover_rate: 1.5,
            ..GaParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn ga_solves_onemax_with_frozen_bits() {
        let frozen: Vec<Option<bool>> = (0..24).map(|i| if i % 6 == 0 { Some(true) } else { None }).collect();
        let params = GaParams {
            population: 40,
            generations: 100,
            ..GaParams::default()
        };
        let mut eval = |batch: &[Vec<bool>]| batch.iter().map(|g| g.iter().filter(|b| **b).count() as f64).collect();
        let out = run_ga(&params, &frozen, &[], &mut eval).unwrap();
        assert_eq!(out.best_fitness, 4.0);
        for (i, b) in out.best.iter().enumerate() {
            assert_eq!(*b, i % 6 == 0);
        }
        assert!(out.generation_best.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn seeds_enter_population() {
        let frozen = vec![None; 10];
        let seed = vec![false; 10];
        let params = GaParams {
            population: 4,
            generations: 0,
            ..GaParams::default()
        };
        let mut eval = |batch: &[Vec<bool>]| batch.iter().map(|g| g.iter().filter(|b| **b).count() as f64).collect();
        let out = run_ga(&params, &frozen, core::slice::from_ref(&seed), &mut eval).unwrap();
        assert_eq!(out.best, seed);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(8, 2), 28);
        assert_eq!(binomial(256, 3), 2_763_520);
    }

    #[test]
    fn exhaustive_tiny_cases() {
        let grid = AngularGrid::uniform(30.0).unwrap();
        let b = synthesize_dipole_grid(1, 2, 0.011, 2.4e9, &grid, 1).unwrap();
        let d = decompose(&b).unwrap();
        let cb = exhaustive_optimize(&b, &d, 2, 8, &Sequential).unwrap();
        assert_eq!(cb.coders()[0].bits(), &[false]);
        assert_eq!(cb.coders()[1].bits(), &[true]);
        let rho = crate::codebook::correlation(&b, &d, &cb.coders()[0], &cb.coders()[1]).unwrap();
        assert!((cb.mean_correlation() - rho.norm_sqr()).abs() < 1e-15);
        assert!(matches!(
            exhaustive_optimize(&b, &d, 3, 8, &Sequential),
            Err(Error::InvalidCodebook(_))
        ));
    }

    #[test]
    fn exhaustive_rejects_large_searches() {
        let grid = AngularGrid::uniform(30.0).unwrap();
        let b = synthesize_dipole_grid(3, 3, 0.011, 2.4e9, &grid, 1).unwrap();
        let d = decompose(&b).unwrap();
        assert!(matches!(
            exhaustive_optimize(&b, &d, 2, 8, &Sequential),
            Err(Error::TooLarge { .. })
        ));
    }
}
