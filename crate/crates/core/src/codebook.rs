//! Codebooks of antenna coders and their correlation objective.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bundle::AntennaBundle;
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::linalg::{CVector, ONE};
use crate::network::{port_currents, AntennaCoder};
use crate::pattern::{BasisDecomposition, PatternCoder};

/// Split of the pixel ports into switched ports and hardwired ones.
///
/// Ports are 0-based here; files and the CLI use 1-based numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwitchPartition {
    switched: Vec<usize>,
    hardwired: Vec<(usize, bool)>,
}

impl SwitchPartition {
    /// Every port carries a switch.
    pub fn full(q: usize) -> Self {
        Self {
            switched: (0..q).collect(),
            hardwired: Vec::new(),
        }
    }

    pub fn new(q: usize, mut switched: Vec<usize>, mut hardwired: Vec<(usize, bool)>) -> Result<Self> {
        switched.sort_unstable();
        hardwired.sort_unstable();
        let mut seen = alloc::vec![false; q];
        for port in switched.iter().copied().chain(hardwired.iter().map(|h| h.0)) {
            if port >= q {
                return Err(Error::InvalidCodebook(format!("port {} is outside 1..={q}", port + 1)));
            }
            if seen[port] {
                return Err(Error::InvalidCodebook(format!("port {} is listed twice", port + 1)));
            }
            seen[port] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidCodebook(format!(
                "port {} is neither switched nor hardwired",
                missing + 1
            )));
        }
        Ok(Self { switched, hardwired })
    }

    pub fn q(&self) -> usize {
        self.switched.len() + self.hardwired.len()
    }

    pub fn switched(&self) -> &[usize] {
        &self.switched
    }

    /// `(port, state)` pairs, sorted by port.
    pub fn hardwired(&self) -> &[(usize, bool)] {
        &self.hardwired
    }

    pub fn switch_count(&self) -> usize {
        self.switched.len()
    }

    /// Moves `port` from the switched set to the hardwired set.
    pub fn hardwire(&mut self, port: usize, state: bool) -> Result<()> {
        let pos = self
            .switched
            .iter()
            .position(|&p| p == port)
            .ok_or_else(|| Error::InvalidCodebook(format!("port {} carries no switch", port + 1)))?;
        self.switched.remove(pos);
        let at = self.hardwired.partition_point(|h| h.0 < port);
        self.hardwired.insert(at, (port, state));
        Ok(())
    }

    /// Per-port fixed state, `None` for switched ports.
    pub fn frozen(&self) -> Vec<Option<bool>> {
        let mut f = alloc::vec![None; self.q()];
        for &(port, state) in &self.hardwired {
            f[port] = Some(state);
        }
        f
    }

    pub fn admits(&self, coder: &AntennaCoder) -> bool {
        coder.len() == self.q() && self.hardwired.iter().all(|&(port, state)| coder.get(port) == state)
    }
}

/// Unit-normalized pattern coder `w / ||w||` of an antenna coder.
pub fn unit_pattern_coder(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    coder: &AntennaCoder,
) -> Result<CVector> {
    if coder.len() != bundle.q() {
        return Err(Error::DimensionMismatch(format!(
            "coder has {} bits, antenna has {} pixel ports",
            coder.len(),
            bundle.q()
        )));
    }
    if decomp.v.nrows() != bundle.q() + 1 {
        return Err(Error::DimensionMismatch(
            "decomposition does not belong to this antenna".into(),
        ));
    }
    let currents = port_currents(bundle.network(), coder, bundle.z_oc(), ONE)?;
    let w = decomp.coder_map() * currents.stacked();
    let norm = w.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroPattern {
            coder: coder.to_bit_string(),
        });
    }
    Ok(w.unscale(norm))
}

/// `rho = w_j^H w_k` on unit-normalized pattern coders; exactly 1 for
/// identical coders.
pub fn correlation(
    bundle: &AntennaBundle,
    decomp: &BasisDecomposition,
    coder_j: &AntennaCoder,
    coder_k: &AntennaCoder,
) -> Result<Complex64> {
    let wj = unit_pattern_coder(bundle, decomp, coder_j)?;
    if coder_j == coder_k {
        return Ok(ONE);
    }
    let wk = unit_pattern_coder(bundle, decomp, coder_k)?;
    Ok(wj.dotc(&wk))
}

/// Mean of `|rho|^2` over all unordered pairs.
pub fn mean_correlation(bundle: &AntennaBundle, decomp: &BasisDecomposition, coders: &[AntennaCoder]) -> Result<f64> {
    if coders.len() < 2 {
        return Err(Error::DegenerateCodebook { p: coders.len() });
    }
    let units = coders
        .iter()
        .map(|c| unit_pattern_coder(bundle, decomp, c))
        .collect::<Result<Vec<_>>>()?;
    let bits: Vec<&[bool]> = coders.iter().map(|c| c.bits()).collect();
    let refs: Vec<&CVector> = units.iter().collect();
    Ok(pair_mean(&refs, &bits))
}

pub(crate) fn pair_mean(units: &[&CVector], bits: &[&[bool]]) -> f64 {
    let p = units.len();
    let mut sum = 0.0;
    for j in 0..p {
        for k in j + 1..p {
            sum += if bits[j] == bits[k] {
                1.0
            } else {
                units[j].dotc(units[k]).norm_sqr()
            };
        }
    }
    2.0 * sum / (p * (p - 1)) as f64
}

pub(crate) fn duplicate_pairs(bits: &[&[bool]]) -> usize {
    let mut d = 0;
    for j in 0..bits.len() {
        for k in j + 1..bits.len() {
            if bits[j] == bits[k] {
                d += 1;
            }
        }
    }
    d
}

/// P distinct antenna coders with their mean correlation, switch partition
/// and the optimization targets they were produced under.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    coders: Vec<AntennaCoder>,
    mean_correlation: f64,
    partition: SwitchPartition,
    g_star: Option<f64>,
    delta_g: Option<f64>,
}

impl Codebook {
    /// Builds a codebook with every port switched, computing its objective.
    pub fn evaluate(bundle: &AntennaBundle, decomp: &BasisDecomposition, coders: Vec<AntennaCoder>) -> Result<Self> {
        let q = bundle.q();
        Self::evaluate_with(bundle, decomp, coders, SwitchPartition::full(q))
    }

    pub fn evaluate_with(
        bundle: &AntennaBundle,
        decomp: &BasisDecomposition,
        coders: Vec<AntennaCoder>,
        partition: SwitchPartition,
    ) -> Result<Self> {
        check_structure(&coders, &partition)?;
        if coders[0].len() != bundle.q() {
            return Err(Error::DimensionMismatch(format!(
                "coders have {} bits, antenna has {} pixel ports",
                coders[0].len(),
                bundle.q()
            )));
        }
        let g = mean_correlation(bundle, decomp, &coders)?;
        Ok(Self {
            coders,
            mean_correlation: g,
            partition,
            g_star: None,
            delta_g: None,
        })
    }

    /// Reassembles a stored codebook; the objective is taken as given (see
    /// [`Codebook::recompute`] to check it).
    pub fn from_parts(
        coders: Vec<AntennaCoder>,
        mean_correlation: f64,
        partition: SwitchPartition,
        g_star: Option<f64>,
        delta_g: Option<f64>,
    ) -> Result<Self> {
        check_structure(&coders, &partition)?;
        if !(0.0..=1.0 + 1e-12).contains(&mean_correlation) {
            return Err(Error::InvalidCodebook(format!(
                "mean correlation {mean_correlation} is outside [0, 1]"
            )));
        }
        Ok(Self {
            coders,
            mean_correlation,
            partition,
            g_star,
            delta_g,
        })
    }

    pub fn with_g_star(mut self, g_star: f64) -> Self {
        self.g_star = Some(g_star);
        self
    }

    pub fn with_delta_g(mut self, delta_g: f64) -> Self {
        self.delta_g = Some(delta_g);
        self
    }

    pub fn p(&self) -> usize {
        self.coders.len()
    }

    pub fn q(&self) -> usize {
        self.coders[0].len()
    }

    pub fn coders(&self) -> &[AntennaCoder] {
        &self.coders
    }

    pub fn mean_correlation(&self) -> f64 {
        self.mean_correlation
    }

    pub fn partition(&self) -> &SwitchPartition {
        &self.partition
    }

    pub fn g_star(&self) -> Option<f64> {
        self.g_star
    }

    pub fn delta_g(&self) -> Option<f64> {
        self.delta_g
    }

    pub fn recompute(&self, bundle: &AntennaBundle, decomp: &BasisDecomposition) -> Result<f64> {
        mean_correlation(bundle, decomp, &self.coders)
    }

    /// Unit-normalized pattern coders, ready for the channel.
    pub fn pattern_coders(&self, bundle: &AntennaBundle, decomp: &BasisDecomposition) -> Result<Vec<PatternCoder>> {
        self.coders
            .iter()
            .map(|c| unit_pattern_coder(bundle, decomp, c).map(|w| PatternCoder { w }))
            .collect()
    }
}

fn check_structure(coders: &[AntennaCoder], partition: &SwitchPartition) -> Result<()> {
    if coders.len() < 2 {
        return Err(Error::DegenerateCodebook { p: coders.len() });
    }
    let q = coders[0].len();
    if q == 0 || coders.iter().any(|c| c.len() != q) {
        return Err(Error::InvalidCodebook("coders must share one nonzero length".into()));
    }
    if partition.q() != q {
        return Err(Error::InvalidCodebook(format!(
            "partition covers {} ports, coders have {q}",
            partition.q()
        )));
    }
    for (i, c) in coders.iter().enumerate() {
        if coders[..i].contains(c) {
            return Err(Error::InvalidCodebook(format!("coder {c} appears twice")));
        }
        if !partition.admits(c) {
            return Err(Error::InvalidCodebook(format!(
                "coder {c} disagrees with a hardwired port"
            )));
        }
    }
    Ok(())
}

/// Memo of unit pattern coders keyed by switch states. Filled in batches
/// through an executor and read concurrently afterwards.
pub(crate) struct CoderCache<'a> {
    bundle: &'a AntennaBundle,
    decomp: &'a BasisDecomposition,
    map: BTreeMap<Vec<bool>, Option<CVector>>,
    capacity: usize,
}

impl<'a> CoderCache<'a> {
    pub(crate) fn new(bundle: &'a AntennaBundle, decomp: &'a BasisDecomposition, capacity: usize) -> Self {
        Self {
            bundle,
            decomp,
            map: BTreeMap::new(),
            capacity,
        }
    }

    /// Makes sure every coder in `wanted` is present.
    pub(crate) fn fill<'b, E: Executor>(&mut self, wanted: impl Iterator<Item = &'b [bool]>, exec: &E) {
        let mut missing: Vec<Vec<bool>> = Vec::new();
        for bits in wanted {
            if !self.map.contains_key(bits) && !missing.iter().any(|m| m.as_slice() == bits) {
                missing.push(bits.to_vec());
            }
        }
        if missing.is_empty() {
            return;
        }
        if self.map.len() + missing.len() > self.capacity {
            self.map.clear();
        }
        let (bundle, decomp) = (self.bundle, self.decomp);
        let solved = exec.map(missing.len(), |i| {
            unit_pattern_coder(bundle, decomp, &AntennaCoder::new(missing[i].clone())).ok()
        });
        for (bits, w) in missing.into_iter().zip(solved) {
            self.map.insert(bits, w);
        }
    }

    /// `None` if the coder is absent or could not be solved.
    pub(crate) fn get(&self, bits: &[bool]) -> Option<&CVector> {
        self.map.get(bits).and_then(|w| w.as_ref())
    }
}
