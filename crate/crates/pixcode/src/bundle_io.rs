//! Antenna bundle files.
//!
//! A bundle is one JSON document:
//!
//! ```text
//! {
//!   "format": "pixcode-antenna",
//!   "version": 1,
//!   "q": 40,
//!   "frequency_hz": 2.4e9,
//!   "z_oc": 1e9,
//!   "grid": {"theta_deg": [...], "phi_deg": [...]},
//!   "Z": [[re, im], ...],      // (q+1)^2 entries, row-major, antenna port first
//!   "E_oc": [[re, im], ...]    // 2K x (q+1), row-major, theta block then phi block
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so save then load is
//! lossless.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use pixcode_core::linalg::CMatrix;
use pixcode_core::{AngularGrid, AntennaBundle, Error as CoreError, MultiportNetwork};
use serde_json::{Map, Value};

use crate::error::{AppError, Result};

pub const FORMAT_TAG: &str = "pixcode-antenna";
pub const FORMAT_VERSION: u64 = 1;

pub fn to_json(bundle: &AntennaBundle) -> String {
    let net = bundle.network();
    let z = net.impedance_matrix();
    let e_oc = bundle.e_oc();
    let num = |x: f64| serde_json::to_string(&x).expect("finite float");
    let list = |xs: &[f64]| serde_json::to_string(xs).expect("finite floats");
    let pairs = |m: &CMatrix| {
        let mut s = String::with_capacity(m.len() * 48);
        s.push('[');
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if r + c > 0 {
                    s.push(',');
                }
                let v = m[(r, c)];
                let _ = write!(s, "[{},{}]", num(v.re), num(v.im));
            }
        }
        s.push(']');
        s
    };
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"format\": \"{FORMAT_TAG}\",");
    let _ = writeln!(out, "  \"version\": {FORMAT_VERSION},");
    let _ = writeln!(out, "  \"q\": {},", bundle.q());
    let _ = writeln!(out, "  \"frequency_hz\": {},", num(bundle.frequency_hz()));
    let _ = writeln!(out, "  \"z_oc\": {},", num(bundle.z_oc()));
    let _ = writeln!(
        out,
        "  \"grid\": {{\"theta_deg\": {}, \"phi_deg\": {}}},",
        list(bundle.grid().theta_deg()),
        list(bundle.grid().phi_deg())
    );
    let _ = writeln!(out, "  \"Z\": {},", pairs(&z));
    let _ = writeln!(out, "  \"E_oc\": {}", pairs(&e_oc));
    out.push_str("}\n");
    out
}

pub fn save(bundle: &AntennaBundle, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(bundle)).map_err(|e| AppError::io(path, e))
}

pub fn load(path: &Path) -> Result<AntennaBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    from_json(&text, path)
}

/// Parses and validates a bundle; `origin` only labels errors.
pub fn from_json(text: &str, origin: &Path) -> Result<AntennaBundle> {
    let fail = |field: &str, reason: String| AppError::format(origin, field, reason);
    let doc: Value = serde_json::from_str(text).map_err(|e| fail("document", format!("not valid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| fail("document", "top level must be an object".into()))?;

    if let Some(tag) = obj.get("format") {
        if tag.as_str() != Some(FORMAT_TAG) {
            return Err(fail("format", format!("expected \"{FORMAT_TAG}\", got {tag}")));
        }
    }
    if let Some(v) = obj.get("version") {
        if v.as_u64() != Some(FORMAT_VERSION) {
            return Err(fail("version", format!("unsupported version {v}")));
        }
    }
    let q = field(obj, "q", origin)?
        .as_u64()
        .filter(|&q| q >= 1)
        .ok_or_else(|| fail("q", "must be a positive integer".into()))? as usize;
    let frequency_hz = number(field(obj, "frequency_hz", origin)?, "frequency_hz", origin)?;
    let z_oc = number(field(obj, "z_oc", origin)?, "z_oc", origin)?;

    let grid_obj = field(obj, "grid", origin)?
        .as_object()
        .ok_or_else(|| fail("grid", "must be an object".into()))?;
    let theta = numbers(field(grid_obj, "theta_deg", origin)?, "grid.theta_deg", origin)?;
    let phi = numbers(field(grid_obj, "phi_deg", origin)?, "grid.phi_deg", origin)?;
    let grid = AngularGrid::new(theta, phi).map_err(|e| fail("grid", core_reason(e)))?;

    let n = q + 1;
    let z_entries = complexes(field(obj, "Z", origin)?, "Z", origin)?;
    if z_entries.len() != n * n {
        return Err(fail(
            "Z",
            format!("has {} entries, expected (q+1)^2 = {}", z_entries.len(), n * n),
        ));
    }
    let z = CMatrix::from_row_slice(n, n, &z_entries);

    let e_entries = complexes(field(obj, "E_oc", origin)?, "E_oc", origin)?;
    if e_entries.len() % n != 0 {
        return Err(fail(
            "E_oc",
            format!("has {} entries, not a multiple of q+1 = {n}", e_entries.len()),
        ));
    }
    let rows = e_entries.len() / n;
    let two_k = 2 * grid.len();
    if rows != two_k {
        return Err(fail(
            "e_a",
            format!("e_a length {rows} does not match 2K = {two_k} of the grid"),
        ));
    }
    let e_oc = CMatrix::from_row_slice(rows, n, &e_entries);

    let network = MultiportNetwork::from_impedance_matrix(&z).map_err(|e| match &e {
        CoreError::InvalidNetwork(msg) if msg.contains("reciprocity") => fail("Z", format!("reciprocity: {msg}")),
        _ => fail("Z", core_reason(e)),
    })?;
    if network.q() != q {
        return Err(fail("q", format!("{q} disagrees with Z ({} pixel ports)", network.q())));
    }
    AntennaBundle::from_full(&z, &e_oc, grid, frequency_hz, z_oc).map_err(|e| match e {
        CoreError::InvalidBundle { field, reason } => fail(field, reason),
        other => fail("document", core_reason(other)),
    })
}

fn core_reason(e: CoreError) -> String {
    e.to_string()
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str, origin: &Path) -> Result<&'a Value> {
    obj.get(name).ok_or_else(|| AppError::format(origin, name, "missing"))
}

fn number(v: &Value, name: &str, origin: &Path) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| AppError::format(origin, name, format!("expected a number, got {v}")))
}

fn numbers(v: &Value, name: &str, origin: &Path) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| AppError::format(origin, name, "expected a list of numbers"))?;
    arr.iter().map(|x| number(x, name, origin)).collect()
}

fn complexes(v: &Value, name: &str, origin: &Path) -> Result<Vec<Complex64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| AppError::format(origin, name, "expected a list of [re, im] pairs"))?;
    arr.iter()
        .enumerate()
        .map(|(i, pair)| match pair.as_array().map(|p| p.as_slice()) {
            Some([re, im]) => match (re.as_f64(), im.as_f64()) {
                (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
                _ => Err(AppError::format(origin, name, format!("entry {i} is not numeric"))),
            },
            _ => Err(AppError::format(
                origin,
                name,
                format!("entry {i} is not a [re, im] pair"),
            )),
        })
        .collect()
}
