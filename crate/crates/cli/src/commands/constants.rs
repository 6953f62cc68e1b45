//! Normalization constants of the fermionic and bosonic partition functions.

use anyhow::Result;
use pfaffkp::partition::{log_constant_bosonic, log_constant_fermionic, MAX_BOSONIC_M, MAX_FERMIONIC_M};
use serde::Serialize;

use crate::output::{num, OutputDir};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub flavor: &'static str,
    pub m: usize,
    pub value: f64,
    pub log_value: f64,
    pub derivation: &'static str,
}

pub fn table() -> Result<Vec<ConstantRow>> {
    let mut rows = Vec::new();
    for m in 1..=MAX_FERMIONIC_M {
        let log_value = log_constant_fermionic(m)?;
        rows.push(ConstantRow {
            flavor: "fermionic",
            m,
            value: log_value.exp(),
            log_value,
            derivation: "Barnes G ratio G(1/2)/G(2m+3/2) by Gamma recursion, times Gamma products",
        });
    }
    for m in 1..=MAX_BOSONIC_M {
        let log_value = log_constant_bosonic(m)?;
        rows.push(ConstantRow {
            flavor: "bosonic",
            m,
            value: log_value.exp(),
            log_value,
            derivation: "pi^m / (2^(2m^2) (2m)! prod Gamma^2(j/2))",
        });
    }
    Ok(rows)
}

pub fn run(out: &OutputDir) -> Result<Vec<ConstantRow>> {
    let rows = table()?;
    println!("{:<10} {:>2} {:>24} {:>22}  derivation", "flavor", "m", "c_m", "ln c_m");
    for r in &rows {
        println!("{:<10} {:>2} {:>24.17e} {:>22.15}  {}", r.flavor, r.m, r.value, r.log_value, r.derivation);
    }
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.flavor.into(), r.m.to_string(), num(r.value), num(r.log_value), format!("\"{}\"", r.derivation)])
        .collect();
    out.csv("constants.csv", &["flavor", "m", "value", "log_value", "derivation"], &csv)?;
    Ok(rows)
}
