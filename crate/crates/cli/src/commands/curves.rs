//! Tabulated replica partition functions and two-point correlation curves.

use anyhow::Result;
use clap::ValueEnum;
use pfaffkp::correlation::{r2_asymptotic, r2_exact, r2_from_factorization};
use pfaffkp::partition::{z_super, ReplicaIndex};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::output::{num, OutputDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    /// `ẑ_n(ω)` for `n = −2, …, 2`.
    Z,
    /// Exact, asymptotic and factorized `R₂(ω)`.
    R2,
}

/// `resolution` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, resolution: usize) -> Vec<f64> {
    let last = (resolution - 1) as f64;
    (0..resolution).map(|k| lo + (hi - lo) * k as f64 / last).collect()
}

pub const REPLICAS: [i32; 5] = [-2, -1, 0, 1, 2];

fn z_row(omega: f64, cfg: &RunConfig) -> (Vec<String>, bool) {
    let mut row = vec![num(omega)];
    let mut notes = Vec::new();
    for n in REPLICAS {
        let value = ReplicaIndex::new(n).and_then(|r| z_super(r, omega, &cfg.partition));
        match value {
            Ok(v) => {
                let z = v.to_complex();
                row.extend([num(z.re), num(z.im), num(v.error_estimate)]);
            }
            Err(e) => {
                row.extend(["NaN".to_string(), "NaN".to_string(), "NaN".to_string()]);
                notes.push(format!("n={n}: {e}"));
            }
        }
    }
    let ok = notes.is_empty();
    row.push(format!("\"{}\"", notes.join("; ")));
    (row, ok)
}

fn z_columns() -> Vec<String> {
    let mut cols = vec!["omega".to_string()];
    for n in REPLICAS {
        let tag = if n < 0 { format!("m{}", -n) } else { format!("p{n}") };
        cols.extend([format!("z_{tag}_re"), format!("z_{tag}_im"), format!("z_{tag}_err")]);
    }
    cols.push("errors".into());
    cols
}

/// Writes the curve file and returns its path with the number of points
/// that produced an error.
pub fn run(curve: Curve, cfg: &RunConfig, out: &OutputDir) -> Result<(std::path::PathBuf, usize)> {
    let c = &cfg.curves;
    let grid = linspace(c.omega_min, c.omega_max, c.resolution);
    match curve {
        Curve::Z => {
            let rows: Vec<(Vec<String>, bool)> = grid.par_iter().map(|&w| z_row(w, cfg)).collect();
            let failures = rows.iter().filter(|r| !r.1).count();
            let cols = z_columns();
            let cols: Vec<&str> = cols.iter().map(String::as_str).collect();
            let rows: Vec<Vec<String>> = rows.into_iter().map(|r| r.0).collect();
            let path = out.csv("z_curves.csv", &cols, &rows)?;
            println!("wrote {} ({} points, {failures} with errors)", path.display(), grid.len());
            Ok((path, failures))
        }
        Curve::R2 => {
            let factorized = r2_from_factorization(&grid, &c.factorization)?;
            let rows: Vec<Vec<String>> = grid
                .iter()
                .zip(&factorized.r2)
                .map(|(&w, &f)| -> Result<Vec<String>> {
                    let exact = r2_exact(w)?;
                    Ok(vec![num(w), num(exact), num(r2_asymptotic(w)?), num(f), num(f - exact)])
                })
                .collect::<Result<_>>()?;
            let path = out.csv(
                "r2_curves.csv",
                &["omega", "r2_exact", "r2_asymptotic", "r2_factorized", "factorized_minus_exact"],
                &rows,
            )?;
            println!(
                "wrote {} ({} points, closure at omega = {:.3})",
                path.display(),
                grid.len(),
                factorized.closure_point.unwrap_or(f64::NAN)
            );
            Ok((path, 0))
        }
    }
}
