//! Flat `key = value` study configuration. `#` starts a comment; list
//! values are comma separated.

use std::collections::BTreeMap;
use std::path::PathBuf;

use shapelab_core::shape_opt::FamilySpec;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StudyKind {
    Convergence,
    Sum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub family: FamilySpec,
    pub gamma: f64,
    pub lambdas: Vec<f64>,
    pub ms: Vec<usize>,
    pub budget: usize,
    pub seed: u64,
    pub restarts: Option<usize>,
    pub fem_level: Option<usize>,
    pub output: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "study",
    "family",
    "gamma",
    "lambdas",
    "lambda_range",
    "ms",
    "budget",
    "seed",
    "restarts",
    "fem_level",
    "output",
];

fn parse_err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config { line, msg: msg.into() }
}

/// Raw key-value pairs with their line numbers.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| parse_err(i + 1, format!("expected `key = value`, got `{line}`")))?;
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(parse_err(i + 1, "empty key"));
        }
        if out.insert(k.clone(), (i + 1, v.trim().to_string())).is_some() {
            return Err(parse_err(i + 1, format!("duplicate key `{k}`")));
        }
    }
    Ok(out)
}

fn list<T: std::str::FromStr>(line: usize, v: &str) -> Result<Vec<T>, CliError> {
    v.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| parse_err(line, format!("bad list entry `{}`", t.trim())))
        })
        .collect()
}

fn one<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| parse_err(line, format!("bad value for `{key}`: `{v}`")))
}

impl StudyConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        if let Some((k, (line, _))) = pairs.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return Err(parse_err(*line, format!("unknown key `{k}`")));
        }
        let get = |k: &str| pairs.get(k).map(|(l, v)| (*l, v.as_str()));

        let kind = match get("study") {
            None => StudyKind::Convergence,
            Some((_, "convergence")) => StudyKind::Convergence,
            Some((_, "sum")) => StudyKind::Sum,
            Some((l, v)) => return Err(parse_err(l, format!("study must be `convergence` or `sum`, got `{v}`"))),
        };
        let (fl, fv) = get("family").ok_or_else(|| parse_err(0, "missing key `family`"))?;
        let family = FamilySpec::parse(fv).map_err(|e| parse_err(fl, e.to_string()))?;

        let gamma = match get("gamma") {
            Some((l, v)) => one(l, "gamma", v)?,
            None => 1.0,
        };
        let lambdas = match (get("lambdas"), get("lambda_range")) {
            (Some(_), Some((l, _))) => return Err(parse_err(l, "give `lambdas` or `lambda_range`, not both")),
            (Some((l, v)), None) => list::<f64>(l, v)?,
            (None, Some((l, v))) => {
                let r: Vec<f64> = list(l, v)?;
                if r.len() != 3 || !(r[0] > 0.0 && r[1] > r[0] && r[2] >= 2.0 && r[2].fract() == 0.0) {
                    return Err(parse_err(
                        l,
                        "lambda_range is `first, last, count` with 0 < first < last, count >= 2",
                    ));
                }
                let n = r[2] as usize;
                let ratio = (r[1] / r[0]).ln() / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i + 1 == n {
                            r[1]
                        } else {
                            r[0] * (ratio * i as f64).exp()
                        }
                    })
                    .collect()
            }
            (None, None) => Vec::new(),
        };
        let ms = match get("ms") {
            Some((l, v)) => list::<usize>(l, v)?,
            None => Vec::new(),
        };
        let budget = match get("budget") {
            Some((l, v)) => one(l, "budget", v)?,
            None => 400,
        };
        let seed = match get("seed") {
            Some((l, v)) => one(l, "seed", v)?,
            None => 0,
        };
        let restarts = get("restarts").map(|(l, v)| one(l, "restarts", v)).transpose()?;
        let fem_level = get("fem_level").map(|(l, v)| one(l, "fem_level", v)).transpose()?;
        let output = get("output").map(|(_, v)| PathBuf::from(v));

        match kind {
            StudyKind::Convergence => {
                let line = get("lambdas").or(get("lambda_range")).map_or(0, |(l, _)| l);
                if lambdas.is_empty() {
                    return Err(parse_err(line, "convergence studies need `lambdas` or `lambda_range`"));
                }
                if lambdas.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(parse_err(line, "lambdas must be strictly increasing"));
                }
                if !(gamma >= 1.0) {
                    return Err(parse_err(
                        get("gamma").map_or(0, |g| g.0),
                        "optimization needs gamma >= 1",
                    ));
                }
            }
            StudyKind::Sum => {
                let line = get("ms").map_or(0, |(l, _)| l);
                if ms.is_empty() || ms[0] == 0 || ms.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(parse_err(line, "sum studies need strictly increasing positive `ms`"));
                }
            }
        }
        Ok(Self {
            kind,
            family,
            gamma,
            lambdas,
            ms,
            budget,
            seed,
            restarts,
            fem_level,
            output,
        })
    }
}
