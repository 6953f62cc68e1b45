//! GOE Monte Carlo run with comparison against the exact curve.

use std::time::Instant;

use anyhow::Result;
use pfaffkp::goemc::{self, GoeRun};

use crate::config::RunConfig;
use crate::output::{num, OutputDir};

pub fn run(cfg: &RunConfig, out: &OutputDir) -> Result<GoeRun> {
    let started = Instant::now();
    let result = goemc::run(&cfg.goe)?;
    eprintln!("goemc: {:.1} s", started.elapsed().as_secs_f64());

    let est = &result.estimate;
    let rows: Vec<Vec<String>> = result
        .comparison
        .bins
        .iter()
        .zip(&est.pair_counts)
        .map(|(b, &pairs)| {
            vec![
                num(0.5 * (b.lo + b.hi)),
                num(b.estimate),
                num(b.stderr),
                num(b.exact),
                b.z.map(num).unwrap_or_else(|| "NaN".into()),
                pairs.to_string(),
                b.included.to_string(),
            ]
        })
        .collect();
    out.csv(
        "goemc_bins.csv",
        &["bin_center", "r2_estimate", "stderr", "r2_exact_binavg", "zscore", "pairs", "compared"],
        &rows,
    )?;
    out.json("goemc.json", cfg, &result)?;

    let c = &result.comparison;
    println!(
        "goemc: N = {}, {} samples, {:.1}% of {} bins within 3 sigma, chi2 = {:.2} ({} dof)",
        cfg.goe.matrix_size,
        est.samples,
        100.0 * c.fraction_within_3sigma,
        c.bins.iter().filter(|b| b.included).count(),
        c.chi2,
        c.dof
    );
    println!(
        "goemc: bulk density {:.5} +- {:.5} ({}), clipped fraction {:.2e}",
        est.density.0,
        est.density.1,
        if result.density_ok { "within 2 sigma" } else { "OFF by more than 2 sigma" },
        est.clipped_fraction
    );
    if c.empty_bins > 0 {
        println!("goemc: {} compared bins are empty", c.empty_bins);
    }
    if result.excessive_clipping {
        println!("goemc: warning: more than 1% of eigenvalues clipped");
    }
    if result.underpowered {
        println!("goemc: note: below N = 50 or 100 samples the comparison is not a statistical claim");
    }
    Ok(result)
}
