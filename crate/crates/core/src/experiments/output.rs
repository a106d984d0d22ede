use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::ErrorSeries;
use crate::error::Result;
use crate::mhd::TrajectorySample;
use crate::nudging::PrimitiveErrorSample;

/// Files of one run directory, keyed by name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunFiles {
    pub files: BTreeMap<String, String>,
}

impl RunFiles {
    pub fn insert(&mut self, name: &str, contents: String) {
        self.files.insert(name.to_string(), contents);
    }

    pub fn insert_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.insert(name, text);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.get(name).map(String::as_str)
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in &self.files {
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

/// Writes rows of floats in shortest round-trip exponent notation.
pub(crate) fn csv<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{x:e}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

pub(crate) fn trajectory_csv(samples: &[TrajectorySample], residuals: &[f64]) -> String {
    csv(
        ["t", "l2_v", "l2_w", "h1_v", "h1_w", "energy_residual"],
        samples
            .iter()
            .zip(residuals)
            .map(|(s, r)| [s.t, s.l2_v, s.l2_w, s.h1_v, s.h1_w, *r]),
    )
}

pub(crate) fn errors_csv(series: &ErrorSeries) -> String {
    csv(
        ["t", "l2_eta", "l2_zeta", "h1_eta", "h1_zeta"],
        (0..series.len()).map(|i| {
            let s = series.sample(i);
            [s.t, s.l2_eta, s.l2_zeta, s.h1_eta, s.h1_zeta]
        }),
    )
}

pub(crate) fn primitive_csv(samples: &[PrimitiveErrorSample]) -> String {
    csv(["t", "l2_u", "l2_b"], samples.iter().map(|s| [s.t, s.l2_u, s.l2_b]))
}
