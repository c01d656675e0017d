use std::collections::BTreeMap;

use clap::Args;
use fcount::{Family, ProcessSpec, RateFunction};

use crate::output::Artifact;
use crate::CliError;

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// ppk, nppk, fppk, fnppk, pak, npak, fpak or nfpak
    #[arg(long)]
    pub family: Option<String>,
    /// Order of the process (largest jump size)
    #[arg(long)]
    pub k: Option<u32>,
    /// Constant intensity of the homogeneous families
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Pólya-Aeppli parameter in [0, 1)
    #[arg(long)]
    pub rho: Option<f64>,
    /// Fractional order in (0, 1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rate function: constant:X, weibull:b=B,c=C, makeham:b=B,c=C,mu=M or table:PATH
    #[arg(long)]
    pub rate: Option<String>,
}

impl SpecArgs {
    pub fn family(&self) -> Result<Family, CliError> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::usage("missing required parameter: --family"))?;
        name.parse().map_err(|_| {
            CliError::usage(format!(
                "--family: unknown family '{name}' (expected one of ppk, nppk, fppk, fnppk, pak, npak, fpak, nfpak)"
            ))
        })
    }

    pub fn k(&self) -> Result<u32, CliError> {
        self.k
            .ok_or_else(|| CliError::usage("missing required parameter: --k"))
    }

    /// Builds and validates the full spec, recording it in the artifact.
    pub fn build(&self, art: &mut Artifact) -> Result<ProcessSpec, CliError> {
        let family = self.family()?;
        let mut missing = Vec::new();
        if self.k.is_none() {
            missing.push("--k");
        }
        let mut extra = Vec::new();
        let mut need = |flag: &'static str, present: bool, required: bool| match (present, required) {
            (false, true) => missing.push(flag),
            (true, false) => extra.push(flag),
            _ => {}
        };
        need("--rho", self.rho.is_some(), family.is_polya_aeppli());
        need("--alpha", self.alpha.is_some(), family.is_fractional());
        need("--lambda", self.lambda.is_some(), !family.is_nonhomogeneous());
        need("--rate", self.rate.is_some(), family.is_nonhomogeneous());
        check_flags(family, &missing, &extra)?;
        let rate = self.rate.as_deref().map(parse_rate).transpose()?;
        let spec = ProcessSpec::new(family, self.k()?, self.rho, self.alpha, self.lambda, rate)
            .map_err(|e| CliError::usage(e.to_string()))?;
        self.record(art);
        Ok(spec)
    }

    pub fn record(&self, art: &mut Artifact) {
        if let Some(f) = &self.family {
            art.param("family", f.to_ascii_lowercase());
        }
        if let Some(k) = self.k {
            art.param("k", k);
        }
        if let Some(v) = self.lambda {
            art.param("lambda", v);
        }
        if let Some(v) = self.rho {
            art.param("rho", v);
        }
        if let Some(v) = self.alpha {
            art.param("alpha", v);
        }
        if let Some(v) = &self.rate {
            art.param("rate", v);
        }
    }
}

pub fn check_flags(family: Family, missing: &[&str], extra: &[&str]) -> Result<(), CliError> {
    let mut parts = Vec::new();
    if !missing.is_empty() {
        parts.push(format!("missing {}", missing.join(", ")));
    }
    if !extra.is_empty() {
        parts.push(format!("not applicable {}", extra.join(", ")));
    }
    if parts.is_empty() {
        Ok(())
    } else {
        Err(CliError::usage(format!("family {family}: {}", parts.join("; "))))
    }
}

/// Parses the compact `--rate` syntax.
pub fn parse_rate(text: &str) -> Result<RateFunction, CliError> {
    let bad = |msg: String| CliError::usage(format!("--rate '{text}': {msg}"));
    let (kind, body) = text
        .split_once(':')
        .ok_or_else(|| bad("expected KIND:PARAMS".into()))?;
    let built = match kind.trim().to_ascii_lowercase().as_str() {
        "constant" => {
            let v = body.trim().parse::<f64>().map_err(|e| bad(e.to_string()))?;
            RateFunction::constant(v)
        }
        "weibull" => {
            let kv = key_values(body, &["b", "c"]).map_err(bad)?;
            RateFunction::weibull(kv["b"], kv["c"])
        }
        "makeham" => {
            let kv = key_values(body, &["b", "c", "mu"]).map_err(bad)?;
            RateFunction::makeham(kv["b"], kv["c"], kv["mu"])
        }
        "table" => RateFunction::table_from_csv(body.trim()),
        other => return Err(bad(format!("unknown rate kind '{other}'"))),
    };
    built.map_err(|e| bad(e.to_string()))
}

fn key_values(body: &str, keys: &[&str]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in body.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{item}'"))?;
        let k = k.trim().to_ascii_lowercase();
        if !keys.contains(&k.as_str()) {
            return Err(format!("unknown key '{k}'"));
        }
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("{k}: not a number '{}'", v.trim()))?;
        if out.insert(k.clone(), v).is_some() {
            return Err(format!("duplicate key '{k}'"));
        }
    }
    let missing: Vec<&str> = keys.iter().copied().filter(|k| !out.contains_key(*k)).collect();
    if !missing.is_empty() {
        return Err(format!("missing {}", missing.join(", ")));
    }
    Ok(out)
}
