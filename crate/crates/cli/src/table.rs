//! Row assembly and CSV / JSON emission.

use std::io::Write;

use horn_spectra::{
    bracket, core_stats, weyl_decomposition, PerimeterConvention, Result, SimpleDomainF64,
};
use rayon::prelude::*;
use serde::Serialize;

/// Sweep column names, in output order.
pub const SWEEP_COLUMNS: [&str; 13] = [
    "E",
    "n_E",
    "N_lower",
    "N_upper",
    "gap",
    "gap_certificate",
    "vol2",
    "perim_union",
    "perim_sum",
    "vol_term",
    "perim_term",
    "g_term",
    "residual",
];

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "n_E")]
    pub n: usize,
    #[serde(rename = "N_lower")]
    pub lower: u64,
    #[serde(rename = "N_upper")]
    pub upper: u64,
    pub gap: u64,
    pub gap_certificate: Option<f64>,
    pub vol2: f64,
    pub perim_union: f64,
    pub perim_sum: f64,
    pub vol_term: f64,
    pub perim_term: f64,
    pub g_term: f64,
    pub residual: f64,
}

impl SweepRow {
    pub fn compute(
        domain: &SimpleDomainF64,
        e: f64,
        convention: PerimeterConvention,
    ) -> Result<Self> {
        let b = bracket(domain, e)?;
        let c = core_stats(domain, e)?;
        let w = weyl_decomposition(domain, e, convention)?;
        Ok(Self {
            energy: e,
            n: c.n,
            lower: b.lower,
            upper: b.upper,
            gap: b.gap,
            gap_certificate: b.gap_certificate,
            vol2: c.volume,
            perim_union: c.perimeter_union,
            perim_sum: c.perimeter_sum,
            vol_term: w.volume_term,
            perim_term: w.perimeter_term,
            g_term: w.g_term,
            residual: w.residual,
        })
    }

    /// Numeric value of a named column; `None` for a missing certificate.
    pub fn column(&self, name: &str) -> Option<f64> {
        match name {
            "E" => Some(self.energy),
            "n_E" => Some(self.n as f64),
            "N_lower" => Some(self.lower as f64),
            "N_upper" => Some(self.upper as f64),
            "gap" => Some(self.gap as f64),
            "gap_certificate" => self.gap_certificate,
            "vol2" => Some(self.vol2),
            "perim_union" => Some(self.perim_union),
            "perim_sum" => Some(self.perim_sum),
            "vol_term" => Some(self.vol_term),
            "perim_term" => Some(self.perim_term),
            "g_term" => Some(self.g_term),
            "residual" => Some(self.residual),
            _ => None,
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            real(self.energy),
            self.n.to_string(),
            self.lower.to_string(),
            self.upper.to_string(),
            self.gap.to_string(),
            self.gap_certificate.map(real).unwrap_or_default(),
            real(self.vol2),
            real(self.perim_union),
            real(self.perim_sum),
            real(self.vol_term),
            real(self.perim_term),
            real(self.g_term),
            real(self.residual),
        ]
    }
}

/// Rows for every energy, computed in parallel and returned in input order.
pub fn sweep_rows(
    domain: &SimpleDomainF64,
    energies: &[f64],
    convention: PerimeterConvention,
) -> Result<Vec<SweepRow>> {
    if let Some(&top) = energies.iter().max_by(|a, b| a.total_cmp(b)) {
        // Fill the term cache once so the workers only take read locks.
        domain.warm(horn_spectra::n_of_e(domain, top)? + 2)?;
    }
    energies
        .par_iter()
        .map(|&e| SweepRow::compute(domain, e, convention))
        .collect()
}

/// 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// A two-column `key,value` table for single-record outputs.
pub fn write_pairs_csv<W: Write>(out: W, header: &[&str], values: &[String]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    w.write_record(values)?;
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, S: Serialize>(mut out: W, value: &S) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}
