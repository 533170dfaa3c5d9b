//! Sweep-specification grammar.
//!
//! A sweep is either a single value, a linear grid `start:stop:steps`, or
//! a geometric grid `log:start:stop:steps` (both inclusive of the
//! endpoints). `steps` is the number of points.

use anyhow::{bail, Context, Result};

pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![parse_num(single)?]),
        [start, stop, steps] => {
            let (a, b) = (parse_num(start)?, parse_num(stop)?);
            let n = parse_steps(steps)?;
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect())
        }
        ["log", start, stop, steps] => {
            let (a, b) = (parse_num(start)?, parse_num(stop)?);
            if a <= 0.0 || b <= 0.0 {
                bail!("geometric sweeps need positive endpoints, got {a}:{b}");
            }
            let n = parse_steps(steps)?;
            if n == 1 {
                return Ok(vec![a]);
            }
            let (la, lb) = (a.ln(), b.ln());
            Ok((0..n)
                .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
                .collect())
        }
        _ => bail!("cannot parse sweep {spec:?}; use VALUE, START:STOP:STEPS or log:START:STOP:STEPS"),
    }
}

/// Sweep of positive integers (values are rounded and deduplicated).
pub fn parse_int_sweep(spec: &str) -> Result<Vec<usize>> {
    let mut out: Vec<usize> = parse_sweep(spec)?
        .into_iter()
        .map(|v| v.round().max(0.0) as usize)
        .collect();
    out.dedup();
    Ok(out)
}

fn parse_num(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .with_context(|| format!("invalid number {s:?}"))
}

fn parse_steps(s: &str) -> Result<usize> {
    let n: usize = s
        .trim()
        .parse()
        .with_context(|| format!("invalid step count {s:?}"))?;
    if n == 0 {
        bail!("step count must be positive");
    }
    Ok(n)
}
