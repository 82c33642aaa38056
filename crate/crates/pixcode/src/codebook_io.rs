//! Codebook text files.
//!
//! ```text
//! # pixcode codebook
//! q 6
//! p 2
//! mean_correlation 0.0123
//! g_star 0.0123
//! delta_g none
//! switched 1 2 4 5
//! fixed_states 3:0 6:1
//! coders
//! 010011
//! 100101
//! ```
//!
//! Port numbers are 1-based. Coder strings put port 1 first. `switched`
//! and `fixed_states` may be empty (nothing after the key).

use std::fmt::Write as _;
use std::path::Path;

use pixcode_core::{AntennaCoder, Codebook, SwitchPartition};

use crate::error::{AppError, Result};

const HEADER: &str = "# pixcode codebook";

pub fn to_text(cb: &Codebook) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |x| format!("{x}"));
    let mut s = String::new();
    let _ = writeln!(s, "{HEADER}");
    let _ = writeln!(s, "q {}", cb.q());
    let _ = writeln!(s, "p {}", cb.p());
    let _ = writeln!(s, "mean_correlation {}", cb.mean_correlation());
    let _ = writeln!(s, "g_star {}", opt(cb.g_star()));
    let _ = writeln!(s, "delta_g {}", opt(cb.delta_g()));
    let switched: Vec<String> = cb.partition().switched().iter().map(|v| (v + 1).to_string()).collect();
    let _ = writeln!(s, "switched {}", switched.join(" ").trim_end());
    let fixed: Vec<String> = cb
        .partition()
        .hardwired()
        .iter()
        .map(|&(v, b)| format!("{}:{}", v + 1, u8::from(b)))
        .collect();
    let _ = writeln!(s, "fixed_states {}", fixed.join(" "));
    let _ = writeln!(s, "coders");
    for c in cb.coders() {
        let _ = writeln!(s, "{c}");
    }
    // keep the file free of trailing blanks on empty lists
    s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}

pub fn save(cb: &Codebook, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(cb)).map_err(|e| AppError::io(path, e))
}

pub fn load(path: &Path) -> Result<Codebook> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    from_text(&text, path)
}

pub fn from_text(text: &str, origin: &Path) -> Result<Codebook> {
    let fail = |field: &str, reason: String| AppError::format(origin, field, reason);
    let mut q = None;
    let mut p = None;
    let mut g = None;
    let mut g_star = None;
    let mut delta_g = None;
    let mut switched: Option<Vec<usize>> = None;
    let mut fixed: Option<Vec<(usize, bool)>> = None;
    let mut coders: Option<Vec<AntennaCoder>> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(list) = coders.as_mut() {
            let c = AntennaCoder::parse(line).map_err(|e| fail("coders", format!("line {}: {e}", lineno + 1)))?;
            list.push(c);
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match key {
            "q" => q = Some(parse_count(rest, "q", origin)?),
            "p" => p = Some(parse_count(rest, "p", origin)?),
            "mean_correlation" => g = Some(parse_real(rest, "mean_correlation", origin)?),
            "g_star" => g_star = Some(parse_optional(rest, "g_star", origin)?),
            "delta_g" => delta_g = Some(parse_optional(rest, "delta_g", origin)?),
            "switched" => {
                let ports = rest
                    .split_whitespace()
                    .map(|t| parse_port(t, "switched", origin))
                    .collect::<Result<Vec<_>>>()?;
                switched = Some(ports);
            }
            "fixed_states" => {
                let states = rest
                    .split_whitespace()
                    .map(|t| {
                        let (port, state) = t
                            .split_once(':')
                            .ok_or_else(|| fail("fixed_states", format!("`{t}` is not port:state")))?;
                        let state = match state {
                            "0" => false,
                            "1" => true,
                            other => return Err(fail("fixed_states", format!("state `{other}` is not 0 or 1"))),
                        };
                        Ok((parse_port(port, "fixed_states", origin)?, state))
                    })
                    .collect::<Result<Vec<_>>>()?;
                fixed = Some(states);
            }
            "coders" => coders = Some(Vec::new()),
            other => return Err(fail(other, format!("unknown key on line {}", lineno + 1))),
        }
    }

    let q = q.ok_or_else(|| fail("q", "missing".into()))?;
    let p = p.ok_or_else(|| fail("p", "missing".into()))?;
    let g = g.ok_or_else(|| fail("mean_correlation", "missing".into()))?;
    let coders = coders.ok_or_else(|| fail("coders", "missing".into()))?;
    if coders.len() != p {
        return Err(fail("p", format!("{p} declared but {} coders listed", coders.len())));
    }
    if let Some(bad) = coders.iter().find(|c| c.len() != q) {
        return Err(fail("coders", format!("`{bad}` has {} bits, q is {q}", bad.len())));
    }
    let partition = match (switched, fixed) {
        (None, None) => SwitchPartition::full(q),
        (s, f) => SwitchPartition::new(q, s.unwrap_or_default(), f.unwrap_or_default())
            .map_err(|e| fail("switched", e.to_string()))?,
    };
    Codebook::from_parts(coders, g, partition, g_star.flatten(), delta_g.flatten())
        .map_err(|e| fail("coders", e.to_string()))
}

fn parse_count(s: &str, field: &str, origin: &Path) -> Result<usize> {
    s.parse()
        .map_err(|_| AppError::format(origin, field, format!("`{s}` is not a count")))
}

fn parse_real(s: &str, field: &str, origin: &Path) -> Result<f64> {
    s.parse()
        .map_err(|_| AppError::format(origin, field, format!("`{s}` is not a number")))
}

fn parse_optional(s: &str, field: &str, origin: &Path) -> Result<Option<f64>> {
    if s == "none" {
        Ok(None)
    } else {
        parse_real(s, field, origin).map(Some)
    }
}

fn parse_port(s: &str, field: &str, origin: &Path) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(AppError::format(origin, field, format!("`{s}` is not a 1-based port"))),
    }
}
