use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fpsearch::model2d::{apply_sequence, grover_reference, pi3_reference, success_prob_closed, SearchParams};
use fpsearch::schedule::{fixed_point_phases, Mode};
use fpsearch::PhaseSchedule;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{delta_from_sq, sci, with_schema, CliError};
use crate::{Format, Reference, Spacing};

#[derive(Clone, Debug, Serialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl LambdaGrid {
    /// Both endpoints included exactly.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

/// Curves to tabulate over a grid of overlaps.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub delta_sq: f64,
    pub l_values: Vec<usize>,
    pub lambda_grid: LambdaGrid,
    pub references: Vec<Reference>,
    pub pi3_k: Vec<u32>,
}

impl SweepSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        delta_sq: f64,
        l_values: Vec<usize>,
        min: f64,
        max: f64,
        points: usize,
        spacing: Spacing,
        mut references: Vec<Reference>,
        pi3_k: Vec<u32>,
    ) -> Result<Self, CliError> {
        delta_from_sq(delta_sq)?;
        if !(min > 0.0 && min < max && max <= 1.0) {
            return Err(CliError::Usage(format!("lambda grid needs 0 < min < max <= 1, got [{min}, {max}]")));
        }
        if points < 2 {
            return Err(CliError::Usage(format!("lambda grid needs at least 2 points, got {points}")));
        }
        if l_values.is_empty() {
            return Err(CliError::Usage("--l needs at least one value".into()));
        }
        if pi3_k.iter().any(|&k| k > 19) {
            return Err(CliError::Usage("--pi3-k levels above 19 overflow the query count".into()));
        }
        references.sort();
        references.dedup();
        Ok(SweepSpec { delta_sq, l_values, lambda_grid: LambdaGrid { min, max, points, spacing }, references, pi3_k })
    }

    fn has(&self, r: Reference) -> bool {
        self.references.contains(&r)
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["lambda".to_string()];
        for l in &self.l_values {
            cols.push(format!("fp_sim_l{l}"));
            if self.has(Reference::ClosedForm) {
                cols.push(format!("fp_closed_l{l}"));
            }
            if self.has(Reference::Grover) {
                cols.push(format!("grover_l{l}"));
            }
        }
        if self.has(Reference::Pi3) {
            cols.extend(self.pi3_k.iter().map(|k| format!("pi3_k{k}")));
        }
        cols
    }

    /// One row per grid point, in grid order; the first entry is `λ`.
    pub fn rows(&self) -> Result<Vec<Vec<f64>>, CliError> {
        let delta = self.delta_sq.sqrt();
        let schedules: Vec<PhaseSchedule> =
            self.l_values.iter().map(|&l| fixed_point_phases(l, delta, Mode::Amplify)).collect::<Result<_, _>>()?;
        self.lambda_grid
            .values()
            .par_iter()
            .map(|&lambda| {
                let params = SearchParams::new(lambda, delta)?;
                let mut row = vec![lambda];
                for s in &schedules {
                    row.push(apply_sequence(s, &params).success_prob());
                    if self.has(Reference::ClosedForm) {
                        row.push(success_prob_closed(s.big_l(), delta, lambda));
                    }
                    if self.has(Reference::Grover) {
                        row.push(grover_reference(s.l(), lambda));
                    }
                }
                if self.has(Reference::Pi3) {
                    row.extend(self.pi3_k.iter().map(|&k| pi3_reference(k, lambda).probability));
                }
                // Rounding can leave probabilities a few ulps outside [0, 1].
                row[1..].iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
                Ok(row)
            })
            .collect()
    }
}

/// `out.csv` → `out.meta.json`.
fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

fn write_table<W: Write>(w: W, spec: &SweepSpec, rows: &[Vec<f64>], format: Format) -> Result<(), CliError> {
    let cols = spec.columns();
    match format {
        Format::Json => {
            let mut w = w;
            let body = with_schema(json!({ "columns": cols, "rows": rows }));
            serde_json::to_writer(&mut w, &body).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
        }
        Format::Csv | Format::Text => {
            let mut csv = csv::Writer::from_writer(w);
            csv.write_record(&cols)?;
            for r in rows {
                csv.write_record(r.iter().map(|&x| sci(x)))?;
            }
            csv.flush()?;
        }
    }
    Ok(())
}

pub fn run(spec: &SweepSpec, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let rows = spec.rows()?;
    let Some(path) = out else {
        return write_table(io::stdout().lock(), spec, &rows, format);
    };
    let open = |p: &Path| File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())));
    write_table(io::BufWriter::new(open(path)?), spec, &rows, format)?;
    let meta = with_schema(json!({
        "generator": concat!("fpsearch ", env!("CARGO_PKG_VERSION")),
        "data_file": path.file_name().map(|f| f.to_string_lossy().into_owned()),
        "format": if format == Format::Json { "json" } else { "csv" },
        "spec": spec,
        "columns": spec.columns(),
        "rows": rows.len(),
    }));
    let meta_path = sidecar_path(path);
    let mut m = open(&meta_path)?;
    serde_json::to_writer_pretty(&mut m, &meta).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(m)?;
    eprintln!("wrote {} rows to {} (metadata: {})", rows.len(), path.display(), meta_path.display());
    Ok(())
}
