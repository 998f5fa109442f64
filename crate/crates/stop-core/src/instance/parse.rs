//! Text format: `n <N>`, `m <M>`, `tmax <T>`, then `N` lines `<x> <y> <score>`,
//! optionally followed by `M: <i1> <i2> ...` listing mandatory vertices.

use super::{InstanceError, StopInstance};
use std::fmt::Write;

fn parse_err(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        message: message.into(),
    }
}

fn header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, key: &str) -> Result<(usize, &'a str), InstanceError> {
    let (no, line) = lines.next().ok_or_else(|| parse_err(0, format!("missing `{key}` header")))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(parse_err(no, format!("expected `{key} <value>`")));
    }
    let value = parts.next().ok_or_else(|| parse_err(no, format!("`{key}` has no value")))?;
    Ok((no, value))
}

/// Parse an instance. `mandatory` overrides any `M:` line in the text.
pub fn parse_instance(text: &str, mandatory: Option<&[usize]>) -> Result<StopInstance, InstanceError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (no, n) = header(&mut lines, "n")?;
    let n: usize = n.parse().map_err(|_| parse_err(no, "vertex count is not an integer"))?;
    let (no, m) = header(&mut lines, "m")?;
    let m: usize = m.parse().map_err(|_| parse_err(no, "fleet size is not an integer"))?;
    let (no, tmax) = header(&mut lines, "tmax")?;
    let tmax: f64 = tmax.parse().map_err(|_| parse_err(no, "time limit is not a number"))?;

    let mut points = Vec::with_capacity(n);
    let mut scores = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = lines.next().ok_or_else(|| parse_err(0, format!("expected {n} vertex lines")))?;
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| parse_err(no, format!("`{f}` is not a number"))))
            .collect::<Result<_, _>>()?;
        if fields.len() != 3 || fields.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(no, "expected `<x> <y> <score>`"));
        }
        points.push((fields[0], fields[1]));
        scores.push(fields[2]);
    }
    let mut from_file = Vec::new();
    if let Some((no, line)) = lines.next() {
        let rest = line
            .strip_prefix("M:")
            .ok_or_else(|| parse_err(no, "unexpected trailing content"))?;
        for tok in rest.split_whitespace() {
            from_file.push(tok.parse().map_err(|_| parse_err(no, format!("`{tok}` is not a vertex index")))?);
        }
        if let Some((no, _)) = lines.next() {
            return Err(parse_err(no, "content after the mandatory line"));
        }
    }
    StopInstance::euclidean(&points, &scores, m, tmax)?.with_mandatory(mandatory.unwrap_or(&from_file))
}

/// Write an instance in the text format. Requires coordinates.
pub fn serialize_instance(inst: &StopInstance) -> Option<String> {
    let coords = inst.coordinates()?;
    let mut out = String::new();
    let _ = writeln!(out, "n {}", inst.vertex_count());
    let _ = writeln!(out, "m {}", inst.fleet_size());
    let _ = writeln!(out, "tmax {}", inst.time_limit());
    for (v, (x, y)) in coords.iter().enumerate() {
        let _ = writeln!(out, "{x} {y} {}", inst.score(v));
    }
    let mandatory = inst.mandatory();
    if !mandatory.is_empty() {
        let ids: Vec<String> = mandatory.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "M: {}", ids.join(" "));
    }
    Some(out)
}
