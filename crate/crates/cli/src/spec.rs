//! Parsing of the noise, family and quantizer specification strings.
//!
//! ```text
//! noise:      gg:beta=<f>,sigma=<f> | pointmass
//! family:     gaussian | laplacian | gg:beta=<f>
//! quantizer:  threshold | sine | dither[:family=<family>,sigma=<f>] | aupl:file=<path>
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use qdesign::quantizer::AuplFile;
use qdesign::{Error, NoiseDensity, NoiseFamily, Quantizer, Result};

fn parse_error(what: &str, input: &str, detail: impl std::fmt::Display) -> Error {
    Error::Parse(format!("invalid {what} '{input}': {detail}"))
}

// Splits "k=v,k=v" into a map; values may themselves contain '=' or ':'.
fn key_values<'a>(what: &str, input: &str, body: &'a str) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut out = BTreeMap::new();
    if body.is_empty() {
        return Ok(out);
    }
    for part in body.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse_error(what, input, format!("expected key=value, got '{part}'")))?;
        if out.insert(k.trim(), v.trim()).is_some() {
            return Err(parse_error(what, input, format!("duplicate key '{k}'")));
        }
    }
    Ok(out)
}

fn number(what: &str, input: &str, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_error(what, input, format!("{key} must be a number, got '{value}'")))
}

fn reject_extra(what: &str, input: &str, map: &BTreeMap<&str, &str>, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(k)) {
        Some(k) => Err(parse_error(what, input, format!("unknown key '{k}'"))),
        None => Ok(()),
    }
}

/// Parses a noise specification.
pub fn parse_noise(input: &str) -> Result<NoiseDensity> {
    const WHAT: &str = "noise";
    let s = input.trim();
    if s == "pointmass" {
        return Ok(NoiseDensity::point_mass());
    }
    let body = s
        .strip_prefix("gg:")
        .ok_or_else(|| parse_error(WHAT, input, "expected 'gg:beta=<f>,sigma=<f>' or 'pointmass'"))?;
    let map = key_values(WHAT, input, body)?;
    reject_extra(WHAT, input, &map, &["beta", "sigma"])?;
    let get = |k: &str| {
        map.get(k)
            .ok_or_else(|| parse_error(WHAT, input, format!("missing {k}")))
            .and_then(|v| number(WHAT, input, k, v))
    };
    let beta = get("beta")?;
    let sigma = get("sigma")?;
    if !(sigma > 0.0) {
        return Err(parse_error(WHAT, input, "sigma must be positive"));
    }
    NoiseDensity::generalized_gaussian(beta, sigma * sigma)
}

/// Parses a noise family descriptor.
pub fn parse_family(input: &str) -> Result<NoiseFamily> {
    const WHAT: &str = "family";
    match input.trim() {
        "gaussian" => Ok(NoiseFamily::GAUSSIAN),
        "laplacian" => Ok(NoiseFamily::LAPLACIAN),
        s => {
            let body = s.strip_prefix("gg:").ok_or_else(|| {
                parse_error(WHAT, input, "expected 'gaussian', 'laplacian' or 'gg:beta=<f>'")
            })?;
            let map = key_values(WHAT, input, body)?;
            reject_extra(WHAT, input, &map, &["beta"])?;
            let beta = map
                .get("beta")
                .ok_or_else(|| parse_error(WHAT, input, "missing beta"))
                .and_then(|v| number(WHAT, input, "beta", v))?;
            NoiseFamily::generalized_gaussian(beta)
        }
    }
}

/// Parses a quantizer specification; `noise_family` is the dither family
/// used when none is given.
pub fn parse_quantizer(input: &str, noise_family: NoiseFamily) -> Result<Quantizer> {
    const WHAT: &str = "quantizer";
    let s = input.trim();
    let (name, body) = s.split_once(':').unwrap_or((s, ""));
    let map = key_values(WHAT, input, body)?;
    match name {
        "threshold" | "sine" if !body.is_empty() => {
            Err(parse_error(WHAT, input, format!("{name} takes no parameters")))
        }
        "threshold" => Ok(Quantizer::threshold()),
        "sine" => Ok(Quantizer::sine()),
        "dither" => {
            reject_extra(WHAT, input, &map, &["family", "sigma"])?;
            let family = match map.get("family") {
                Some(f) => parse_family(f)?,
                None => noise_family,
            };
            let sigma = map
                .get("sigma")
                .ok_or_else(|| parse_error(WHAT, input, "missing sigma"))
                .and_then(|v| number(WHAT, input, "sigma", v))?;
            Quantizer::dithered(family, sigma * sigma)
        }
        "aupl" => {
            reject_extra(WHAT, input, &map, &["file"])?;
            let path = map.get("file").ok_or_else(|| parse_error(WHAT, input, "missing file"))?;
            load_aupl(Path::new(path))
        }
        other => Err(parse_error(WHAT, input, format!("unknown quantizer '{other}'"))),
    }
}

/// Reads an AUPL quantizer from `{"K": int, "slopes": [...]}` JSON (extra
/// fields, as in a design result, are ignored).
pub fn load_aupl(path: &Path) -> Result<Quantizer> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: AuplFile = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("bad AUPL file {}: {e}", path.display())))?;
    file.into_quantizer()
}
