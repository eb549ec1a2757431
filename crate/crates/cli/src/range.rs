//! `PARAM=a:b:step` and `PARAM=value` arguments.

use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl ParamRange {
    /// Grid points lo, lo+step, ... up to hi (inclusive up to rounding).
    pub fn points(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor().max(0.0) as usize;
        (0..=n).map(|i| (self.lo + i as f64 * self.step).min(self.hi)).collect()
    }
}

/// A real number, optionally a multiple of `pi` and optionally divided by a
/// number: `0.5`, `1/3`, `pi`, `-pi/4`, `2pi/3`, `0.25*pi`.
pub fn parse_value(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let bad = || format!("cannot parse {t:?} as a number");
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (t, 1.0),
    };
    let num = num.trim();
    let value = match num.strip_suffix("pi") {
        Some(c) => {
            let coef = match c.trim_end_matches('*') {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            coef * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(value / den)
}

fn split_assignment(s: &str) -> Result<(&str, &str), String> {
    s.split_once('=')
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| format!("expected PARAM=..., got {s:?}"))
}

pub fn parse_range(s: &str) -> Result<ParamRange, String> {
    let (name, spec) = split_assignment(s)?;
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts[..] else {
        return Err(format!("expected {name}=a:b:step, got {s:?}"));
    };
    let r = ParamRange {
        name: name.to_string(),
        lo: parse_value(lo)?,
        hi: parse_value(hi)?,
        step: parse_value(step)?,
    };
    if !(r.step > 0.0) || r.hi < r.lo {
        return Err(format!("range {s:?} needs a <= b and step > 0"));
    }
    Ok(r)
}

pub fn parse_fixed(s: &str) -> Result<(String, f64), String> {
    let (name, v) = split_assignment(s)?;
    Ok((name.to_string(), parse_value(v)?))
}
