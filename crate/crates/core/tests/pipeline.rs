//! End-to-end checks across modules on small synthetic antennas.

use num_complex::Complex64;
use pixcode_core::channel::{selector_patterns, ChannelEnsemble};
use pixcode_core::linalg::{CMatrix, CVector};
use pixcode_core::metrics::uniform_covariance;
use pixcode_core::switches::Branch;
use pixcode_core::{
    decompose, exhaustive_optimize, ga_optimize, mean_correlation, minimize_switches, synthesize_dipole_grid, total_se,
    AngularGrid, AntennaBundle, AntennaCoder, BasisDecomposition, Codebook, GaParams, McConfig, MultiportNetwork,
    PatternCoder, Sequential,
};

fn line_antenna(seed: u64) -> (AntennaBundle, BasisDecomposition) {
    let grid = AngularGrid::uniform(10.0).unwrap();
    let b = synthesize_dipole_grid(1, 7, 0.011, 2.4e9, &grid, seed).unwrap();
    let d = decompose(&b).unwrap();
    (b, d)
}

fn small_ga() -> GaParams {
    GaParams {
        population: 60,
        generations: 100,
        ..GaParams::default()
    }
}

#[test]
fn virtual_path_matches_iid_ensemble() {
    // orthonormal transmit bases from an antenna decomposition, selector receive patterns
    let grid = AngularGrid::uniform(60.0).unwrap();
    let b = synthesize_dipole_grid(2, 2, 0.011, 2.4e9, &grid, 1).unwrap();
    let d = decompose(&b).unwrap();
    let (m, n, r) = (2, 2, 2);
    let u_bs = d.u.columns(0, n * r).into_owned();
    let f = selector_patterns(d.u.nrows(), m).unwrap();
    let coders: Vec<PatternCoder> = vec![
        PatternCoder::selector(0, r),
        PatternCoder {
            w: CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]),
        },
    ];
    let s = uniform_covariance(n, 10.0);
    let cfg = McConfig::new(10_000, 9);
    let full = total_se(
        &ChannelEnsemble::virtual_path(f, u_bs, n).unwrap(),
        &coders,
        &s,
        1.0,
        &cfg,
        &Sequential,
    )
    .unwrap();
    let cfg = McConfig::new(10_000, 10);
    let iid = total_se(
        &ChannelEnsemble::iid(m, n, r).unwrap(),
        &coders,
        &s,
        1.0,
        &cfg,
        &Sequential,
    )
    .unwrap();
    let diff = (full.total.value - iid.total.value).abs();
    assert!(diff < 0.1, "full {} vs iid {}", full.total.value, iid.total.value);
}

#[test]
fn identical_port_is_hardwired_without_touching_the_codebook() {
    let (b, d) = line_antenna(3);
    let q = b.q();
    // best pair among those agreeing on port 3 and nowhere else
    let mut best: Option<(f64, Vec<AntennaCoder>)> = None;
    for i in 0..1u64 << q {
        for j in i + 1..1u64 << q {
            let (ci, cj) = (AntennaCoder::from_index(i, q), AntennaCoder::from_index(j, q));
            let same: Vec<usize> = (0..q).filter(|&v| ci.get(v) == cj.get(v)).collect();
            if same != [2] {
                continue;
            }
            let coders = vec![ci, cj];
            let g = mean_correlation(&b, &d, &coders).unwrap();
            if best.as_ref().is_none_or(|(bg, _)| g < *bg) {
                best = Some((g, coders));
            }
        }
    }
    let (g, coders) = best.unwrap();
    let baseline = Codebook::evaluate(&b, &d, coders).unwrap().with_g_star(g);
    let run = minimize_switches(&b, &d, &baseline, g, 0.5, &small_ga(), &Sequential).unwrap();
    let first = &run.trace[0];
    assert_eq!(first.branch, Branch::Identical);
    assert_eq!(first.hardwired, vec![(2, first.codebook.coders()[0].get(2))]);
    assert_eq!(first.switch_count, q - 1);
    assert_eq!(first.codebook.coders(), baseline.coders());
}

#[test]
fn no_reduction_returns_the_baseline() {
    let (b, d) = line_antenna(0);
    let q = b.q();
    let base = exhaustive_optimize(&b, &d, 2, 8, &Sequential).unwrap();
    let shared = (0..q)
        .filter(|&v| base.coders()[0].get(v) == base.coders()[1].get(v))
        .count();
    assert_eq!(shared, 0, "the optimum for this seed has no common port");
    let g = base.mean_correlation();
    let run = minimize_switches(&b, &d, &base.clone().with_g_star(g), g, 1e-12, &small_ga(), &Sequential).unwrap();
    assert!(run.trace.is_empty());
    assert_eq!(run.codebook.coders(), base.coders());
    assert_eq!(run.switch_count(), q);
}

#[test]
fn planted_orthogonal_pair_is_found() {
    // two decoupled pixels: shorting a port subtracts its column from e_a
    let grid = AngularGrid::new(vec![60.0, 120.0], vec![0.0]).unwrap();
    let c = |re: f64| Complex64::new(re, 0.0);
    let z_pp = CMatrix::from_diagonal(&CVector::from_vec(vec![c(50.0), c(50.0)]));
    let net = MultiportNetwork::new(c(50.0), CVector::from_vec(vec![c(50.0), c(50.0)]), z_pp).unwrap();
    let e_a = CVector::from_vec(vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
    let e_p = CMatrix::from_row_slice(4, 2, &[c(1.0), c(0.0), c(1.0), c(0.0), c(0.0), c(1.0), c(0.0), c(0.0)]);
    let b = AntennaBundle::new(net, grid, 2.4e9, e_a, e_p, 1e9).unwrap();
    let d = decompose(&b).unwrap();
    let params = GaParams {
        population: 20,
        generations: 20,
        ..GaParams::default()
    };
    let cb = ga_optimize(&b, &d, 2, &params, &Sequential).unwrap();
    assert!(cb.mean_correlation() < 1e-12, "{}", cb.mean_correlation());
}

#[test]
fn ga_is_reproducible() {
    let (b, d) = line_antenna(4);
    let a = ga_optimize(&b, &d, 3, &small_ga().with_seed(8), &Sequential).unwrap();
    let again = ga_optimize(&b, &d, 3, &small_ga().with_seed(8), &Sequential).unwrap();
    assert_eq!(a, again);
}
