//! Matplotlib scripts that render C_R against ω₀t, one curve per kT.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use cohtherm::states::StateKind;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    /// CSV file name, relative to the script's directory.
    pub file: String,
}

/// Mathtext label of a state, as used in figure titles.
pub fn state_label(kind: StateKind) -> String {
    match kind {
        StateKind::Ghz => "$GHZ$".into(),
        StateKind::W => "$W$".into(),
        StateKind::Wbar => r"$\overline{W}$".into(),
        StateKind::WWbar => r"$W\overline{W}$".into(),
        StateKind::Star => "$Star$".into(),
        StateKind::MixGhzW(p) => format!(r"$\rho_{{GHZ}}^{{W}}$, $p = {p}$"),
        StateKind::WernerGhz(p) => format!(r"$\rho_{{WER}}^{{GHZ}}$, $p = {p}$"),
        StateKind::WernerW(p) => format!(r"$\rho_{{WER}}^{{W}}$, $p = {p}$"),
    }
}

fn py_str(s: &str) -> String {
    format!("r\"{}\"", s.replace('"', "'"))
}

/// Writes `plot_{name}.py` into `dir` and returns its path. The script reads
/// the listed CSVs next to it and saves `{name}.png` there. Every CSV must
/// already exist.
pub fn emit_plot_script(
    dir: &Path,
    name: &str,
    title: &str,
    curves: &[Curve],
) -> Result<PathBuf, CliError> {
    for c in curves {
        let path = dir.join(&c.file);
        if !path.is_file() {
            return Err(CliError::io(
                path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "CSV not found"),
            ));
        }
    }
    let mut curve_lines = String::new();
    for c in curves {
        let _ = writeln!(
            curve_lines,
            "    ({}, {}),",
            py_str(&c.label),
            py_str(&c.file)
        );
    }
    let script = format!(
        r#"#!/usr/bin/env python3
"""Relative entropy of coherence versus time: {name}."""
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
TITLE = {title}
CURVES = [
{curve_lines}]


def load(file_name):
    with open(os.path.join(HERE, file_name), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["t"]) for r in rows], [float(r["c_r"]) for r in rows]


def main():
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for label, file_name in CURVES:
        t, c_r = load(file_name)
        ax.plot(t, c_r, label=label)
    ax.set_xlabel(r"$\omega_0 t$")
    ax.set_ylabel(r"$C_R(\rho)$")
    ax.set_title(TITLE)
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "{name}.png"), dpi=150)


if __name__ == "__main__":
    main()
"#,
        title = py_str(title),
    );
    let path = dir.join(format!("plot_{name}.py"));
    fs::write(&path, script).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
