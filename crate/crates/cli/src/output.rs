use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rotlab_core::experiments::{with_meta, Meta};
use rotlab_core::{PhaseMatrix, RationalPhase, Tolerances};
use serde::Serialize;

use crate::GlobalOpts;

pub fn tolerances(global: &GlobalOpts) -> Result<Tolerances> {
    match &global.tol_config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(Tolerances::from_json_str(&text)?)
        }
        None => Ok(Tolerances::default()),
    }
}

pub fn out_dir(global: &GlobalOpts) -> Result<&Path> {
    fs::create_dir_all(&global.out)
        .with_context(|| format!("creating {}", global.out.display()))?;
    Ok(&global.out)
}

pub fn meta(tol: &Tolerances) -> Meta {
    Meta::new(
        *tol,
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    )
}

pub fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    tol: &Tolerances,
    report: &T,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let value = with_meta(&meta(tol), report)?;
    let text = serde_json::to_string_pretty(&value)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Θ from a comma-separated upper triangle ("1/2,1/3,1/5", "0.25" or "0").
/// All-rational input keeps exact data.
pub fn parse_theta(text: &str) -> Result<PhaseMatrix> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let m = parts.len();
    let n = (1..=64usize)
        .find(|n| n * (n - 1) / 2 == m)
        .with_context(|| format!("{m} entries do not form an upper triangle"))?;
    if parts.iter().all(|p| p.parse::<RationalPhase>().is_ok()) {
        let rats: Vec<RationalPhase> = parts.iter().map(|p| p.parse().unwrap()).collect();
        return Ok(PhaseMatrix::rational(n, &rats)?);
    }
    let vals: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().with_context(|| format!("bad phase '{p}'")))
        .collect::<Result<_>>()?;
    Ok(PhaseMatrix::from_upper(n, &vals)?)
}

/// Θ from `--theta` inline or `--theta-file`.
pub fn theta_from(inline: Option<&str>, file: Option<&Path>) -> Result<PhaseMatrix> {
    match (inline, file) {
        (Some(s), None) => parse_theta(s),
        (None, Some(p)) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(
                PhaseMatrix::from_json(&text)
                    .with_context(|| format!("parsing {}", p.display()))?,
            )
        }
        (Some(_), Some(_)) => anyhow::bail!("give either --theta or --theta-file, not both"),
        (None, None) => anyhow::bail!("one of --theta or --theta-file is required"),
    }
}
