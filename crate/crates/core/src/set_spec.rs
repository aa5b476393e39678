//! Parametric descriptions of dilation sets and their text grammar:
//!
//! ```text
//! interval
//! points:1,3/2,2
//! cantor:mu=1/3,depth=10[,mode=endpoints][,lo=1,hi=2]
//! convex:a=1,n=1000000
//! assouad:beta=0.4,gamma=0.8,gens=5
//! union(<spec>;<spec>;...)
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{param, Result, SmaxError};
use crate::sets::{
    assouad_regular_set, cantor_endpoints, cantor_generation, convex_sequence_set, set_union,
    Interval, IntervalSet,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetSpec {
    FullInterval,
    Points { values: Vec<f64> },
    Cantor { mu: f64, depth: u32, base: Interval, endpoints: bool },
    ConvexSequence { a: f64, n_max: u64 },
    AssouadRegular { beta: f64, gamma: f64, gens: u32 },
    Union { parts: Vec<SetSpec> },
}

pub const UNIT_AMBIENT: Interval = Interval { lo: 1.0, hi: 2.0 };

impl SetSpec {
    pub fn cantor(mu: f64, depth: u32) -> Self {
        SetSpec::Cantor { mu, depth, base: UNIT_AMBIENT, endpoints: false }
    }

    pub fn cantor_endpoints(mu: f64, depth: u32) -> Self {
        SetSpec::Cantor { mu, depth, base: UNIT_AMBIENT, endpoints: true }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SetSpec::FullInterval => Ok(()),
            SetSpec::Points { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(param("non-finite point"));
                }
                Ok(())
            }
            SetSpec::Cantor { mu, .. } if !(*mu > 0.0 && *mu <= 0.5) => {
                Err(param(format!("cantor mu={mu} outside (0, 1/2]")))
            }
            SetSpec::Cantor { .. } => Ok(()),
            SetSpec::ConvexSequence { a, n_max } => {
                if !(*a > 0.0) {
                    return Err(param(format!("convex a={a} must be positive")));
                }
                if *n_max == 0 {
                    return Err(param("convex n must be >= 1"));
                }
                Ok(())
            }
            SetSpec::AssouadRegular { beta, gamma, gens } => {
                if !(0.0 < *beta && beta < gamma && *gamma < 1.0) {
                    return Err(param(format!(
                        "assouad needs 0 < beta < gamma < 1, got {beta}, {gamma}"
                    )));
                }
                if *gens == 0 {
                    return Err(param("assouad gens must be >= 1"));
                }
                Ok(())
            }
            SetSpec::Union { parts } => {
                if parts.is_empty() {
                    return Err(param("empty union"));
                }
                parts.iter().try_for_each(SetSpec::validate)
            }
        }
    }
}

/// Realizes a spec as a normalized [`IntervalSet`].
///
/// Unions are taken inside the smallest interval containing every part's
/// ambient.
pub fn realize(spec: &SetSpec) -> Result<IntervalSet> {
    spec.validate()?;
    match spec {
        SetSpec::FullInterval => IntervalSet::new(vec![UNIT_AMBIENT], UNIT_AMBIENT),
        SetSpec::Points { values } => {
            let lo = values.iter().copied().fold(UNIT_AMBIENT.lo, f64::min);
            let hi = values.iter().copied().fold(UNIT_AMBIENT.hi, f64::max);
            IntervalSet::from_points(values, Interval::new(lo, hi))
        }
        SetSpec::Cantor { mu, depth, base, endpoints } => {
            if *endpoints {
                cantor_endpoints(*base, *mu, *depth)
            } else {
                IntervalSet::new(cantor_generation(*base, *mu, *depth)?.cells, *base)
            }
        }
        SetSpec::ConvexSequence { a, n_max } => convex_sequence_set(*a, *n_max),
        SetSpec::AssouadRegular { beta, gamma, gens } => Ok(assouad_regular_set(*beta, *gamma, *gens)?.set),
        SetSpec::Union { parts } => {
            let sets = parts.iter().map(realize).collect::<Result<Vec<_>>>()?;
            let lo = sets.iter().map(|s| s.ambient().lo).fold(f64::INFINITY, f64::min);
            let hi = sets.iter().map(|s| s.ambient().hi).fold(f64::NEG_INFINITY, f64::max);
            let amb = Interval::new(lo, hi);
            let widened = sets.iter().map(|s| s.widen_ambient(amb)).collect::<Result<Vec<_>>>()?;
            set_union(&widened)
        }
    }
}

/// Parses a decimal or `p/q` literal.
pub fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| format!("bad numerator `{num}`"))?;
            let d: f64 = den.trim().parse().map_err(|_| format!("bad denominator `{den}`"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            n / d
        }
        None => s.parse().map_err(|_| format!("bad number `{s}`"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite number `{s}`"))
    }
}

fn parse_int<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    let s = s.trim();
    if let Ok(v) = s.parse() {
        return Ok(v);
    }
    // Allow `1e6`-style literals when they are exact integers.
    let f: f64 = s.parse().map_err(|_| format!("bad integer `{s}`"))?;
    if f.fract() == 0.0 && f >= 0.0 {
        format!("{f:.0}").parse().map_err(|_| format!("bad integer `{s}`"))
    } else {
        Err(format!("bad integer `{s}`"))
    }
}

/// Splits on `sep` at parenthesis depth zero.
fn split_top(s: &str, sep: char) -> std::result::Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced `)`".into());
                }
            }
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err("unbalanced `(`".into());
    }
    out.push(&s[start..]);
    Ok(out)
}

fn key_values(body: &str) -> std::result::Result<Vec<(&str, &str)>, String> {
    body.split(',')
        .map(|kv| {
            let kv = kv.trim();
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| format!("expected key=value, got `{kv}`"))
        })
        .collect()
}

fn parse_spec(s: &str) -> std::result::Result<SetSpec, String> {
    let s = s.trim();
    if s == "interval" {
        return Ok(SetSpec::FullInterval);
    }
    if let Some(inner) = s.strip_prefix("union(") {
        let inner = inner.strip_suffix(')').ok_or("union must end with `)`")?;
        let parts = split_top(inner, ';')?
            .into_iter()
            .map(parse_spec)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        return Ok(SetSpec::Union { parts });
    }
    let (head, body) = s.split_once(':').ok_or_else(|| format!("unknown set kind `{s}`"))?;
    match head.trim() {
        "points" => {
            let values = body
                .split(',')
                .map(parse_real)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if values.is_empty() {
                return Err("points needs at least one value".into());
            }
            Ok(SetSpec::Points { values })
        }
        "cantor" => {
            let (mut mu, mut depth, mut endpoints) = (None, None, false);
            let mut base = UNIT_AMBIENT;
            for (k, v) in key_values(body)? {
                match k {
                    "mu" => mu = Some(parse_real(v)?),
                    "depth" => depth = Some(parse_int(v)?),
                    "lo" => base.lo = parse_real(v)?,
                    "hi" => base.hi = parse_real(v)?,
                    "mode" => {
                        endpoints = match v {
                            "endpoints" => true,
                            "cells" => false,
                            _ => return Err(format!("cantor mode must be cells|endpoints, got `{v}`")),
                        }
                    }
                    _ => return Err(format!("unknown cantor key `{k}`")),
                }
            }
            Ok(SetSpec::Cantor {
                mu: mu.ok_or("cantor needs mu=")?,
                depth: depth.ok_or("cantor needs depth=")?,
                base,
                endpoints,
            })
        }
        "convex" => {
            let (mut a, mut n) = (None, None);
            for (k, v) in key_values(body)? {
                match k {
                    "a" => a = Some(parse_real(v)?),
                    "n" => n = Some(parse_int(v)?),
                    _ => return Err(format!("unknown convex key `{k}`")),
                }
            }
            Ok(SetSpec::ConvexSequence { a: a.ok_or("convex needs a=")?, n_max: n.ok_or("convex needs n=")? })
        }
        "assouad" => {
            let (mut beta, mut gamma, mut gens) = (None, None, None);
            for (k, v) in key_values(body)? {
                match k {
                    "beta" => beta = Some(parse_real(v)?),
                    "gamma" => gamma = Some(parse_real(v)?),
                    "gens" => gens = Some(parse_int(v)?),
                    _ => return Err(format!("unknown assouad key `{k}`")),
                }
            }
            Ok(SetSpec::AssouadRegular {
                beta: beta.ok_or("assouad needs beta=")?,
                gamma: gamma.ok_or("assouad needs gamma=")?,
                gens: gens.ok_or("assouad needs gens=")?,
            })
        }
        other => Err(format!("unknown set kind `{other}`")),
    }
}

impl FromStr for SetSpec {
    type Err = SmaxError;

    fn from_str(s: &str) -> Result<Self> {
        let spec = parse_spec(s).map_err(|reason| SmaxError::Parse { input: s.to_string(), reason })?;
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetSpec::FullInterval => write!(f, "interval"),
            SetSpec::Points { values } => {
                write!(f, "points:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v:?}")?;
                }
                Ok(())
            }
            SetSpec::Cantor { mu, depth, base, endpoints } => {
                write!(f, "cantor:mu={mu:?},depth={depth}")?;
                if *endpoints {
                    write!(f, ",mode=endpoints")?;
                }
                if *base != UNIT_AMBIENT {
                    write!(f, ",lo={:?},hi={:?}", base.lo, base.hi)?;
                }
                Ok(())
            }
            SetSpec::ConvexSequence { a, n_max } => write!(f, "convex:a={a:?},n={n_max}"),
            SetSpec::AssouadRegular { beta, gamma, gens } => {
                write!(f, "assouad:beta={beta:?},gamma={gamma:?},gens={gens}")
            }
            SetSpec::Union { parts } => {
                write!(f, "union(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}
