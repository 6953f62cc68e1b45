use pfaffkp::goemc::*;
use pfaffkp::skewlinalg::sym_eigenvalues;
use rand::Rng;

fn small(n: usize, samples: usize) -> GoeConfig {
    GoeConfig {
        matrix_size: n,
        samples,
        ..GoeConfig::default()
    }
}

#[test]
fn trace_of_square_has_expected_mean() {
    let n = 20;
    let draws = 4000;
    let vals: Vec<f64> = (0..draws)
        .map(|k| sample_goe(n, &mut sample_rng(11, k)).unwrap().frobenius_sq())
        .collect();
    let mean = vals.iter().sum::<f64>() / draws as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    let want = (n as f64 + 1.0) / 4.0;
    assert!((mean - want).abs() < 4.0 * se, "{mean} vs {want} ± {se}");
}

#[test]
fn matrices_are_symmetric() {
    let h = sample_goe(30, &mut sample_rng(1, 0)).unwrap();
    for i in 0..30 {
        for j in 0..30 {
            assert_eq!(h.get(i, j), h.get(j, i));
        }
    }
}

#[test]
fn spectrum_fills_unit_semicircle() {
    // second moment of the semicircle of radius R is R²/4
    let n = 400;
    let mut m2 = 0.0;
    let mut max: f64 = 0.0;
    for k in 0..4 {
        let e = sym_eigenvalues(&sample_goe(n, &mut sample_rng(5, k)).unwrap()).unwrap();
        m2 += e.iter().map(|x| x * x).sum::<f64>() / n as f64;
        max = max.max(e[n - 1].abs()).max(e[0].abs());
    }
    let radius = 2.0 * (m2 / 4.0).sqrt();
    assert!((radius - 1.0).abs() < 0.01, "{radius}");
    assert!((max - 1.0).abs() < 0.05, "{max}");
}

#[test]
fn unfolding_map() {
    for unfolding in [Unfolding::Corrected, Unfolding::Semicircle] {
        assert!((level_count(0.0, 400, unfolding) - 200.0).abs() < 1e-12);
        let xs: Vec<f64> = (0..=200).map(|k| -1.0 + 0.01 * k as f64).collect();
        assert!(xs.windows(2).all(|p| level_count(p[1], 400, unfolding) > level_count(p[0], 400, unfolding)));
    }
}

#[test]
fn bulk_spacing_is_one() {
    let cfg = small(200, 200);
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 0..cfg.samples {
        let e = sym_eigenvalues(&sample_goe(cfg.matrix_size, &mut sample_rng(cfg.seed, k)).unwrap()).unwrap();
        let u = unfold(&e, &cfg);
        for p in u.positions.windows(2) {
            if p[0] >= u.window.0 && p[1] <= u.window.1 {
                sum += p[1] - p[0];
                count += 1;
            }
        }
    }
    let mean = sum / count as f64;
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
}

#[test]
fn uncorrelated_levels_give_one() {
    let samples: Vec<UnfoldedSample> = (0..400)
        .map(|k| {
            let mut rng = sample_rng(99, k);
            let mut x: Vec<f64> = (0..600).map(|_| rng.random::<f64>() * 600.0).collect();
            x.sort_by(f64::total_cmp);
            UnfoldedSample {
                positions: x,
                window: (150.0, 450.0),
                clipped: 0,
            }
        })
        .collect();
    let est = estimate_from_unfolded(&samples, 0.25, 12).unwrap();
    for b in 0..12 {
        let z = (est.r2[b] - 1.0) / est.stderr[b];
        assert!(z.abs() < 4.5, "bin {b}: {} ± {}", est.r2[b], est.stderr[b]);
    }
    assert!(est.stderr.iter().all(|s| s.is_finite() && *s > 0.0));
}

#[test]
fn exact_curve_against_itself() {
    let edges: Vec<f64> = (0..=12).map(|k| 0.25 * k as f64).collect();
    let r2: Vec<f64> = edges.windows(2).map(|e| exact_bin_average(e[0], e[1]).unwrap()).collect();
    let est = CorrelationEstimate {
        bin_edges: edges,
        stderr: vec![0.01; r2.len()],
        pair_counts: vec![1; r2.len()],
        r2,
        samples: 2,
        density: (1.0, 0.0),
        clipped: 0,
        clipped_fraction: 0.0,
    };
    let rep = compare_to_exact(&est, 0.25, 0.9).unwrap();
    assert!(rep.pass && rep.chi2 == 0.0 && rep.fraction_within_3sigma == 1.0);
    assert_eq!(rep.bins.iter().filter(|b| b.included).count(), 11);
}

#[test]
fn empty_bins_are_reported() {
    let edges: Vec<f64> = (0..=12).map(|k| 0.25 * k as f64).collect();
    let mut counts = vec![5u64; 12];
    counts[4] = 0;
    let est = CorrelationEstimate {
        bin_edges: edges,
        stderr: vec![0.01; 12],
        pair_counts: counts,
        r2: vec![1.0; 12],
        samples: 2,
        density: (1.0, 0.0),
        clipped: 0,
        clipped_fraction: 0.0,
    };
    let rep = compare_to_exact(&est, 0.25, 0.9).unwrap();
    assert_eq!(rep.empty_bins, 1);
    assert!(rep.bins[4].z.is_none());
}

#[test]
fn mis_unfolding_is_detected() {
    let good = run(&small(200, 300)).unwrap();
    assert!(good.pass(), "{:?}", good.comparison);
    let bad = run(&GoeConfig {
        fault_scale: 1.05,
        ..small(200, 300)
    })
    .unwrap();
    assert!(!bad.comparison.pass);
    assert!(bad.comparison.bins.iter().filter(|b| b.included).all(|b| b.z.unwrap() < 0.0));
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = small(60, 120);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| estimate_r2(&cfg).unwrap());
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap().install(|| estimate_r2(&cfg).unwrap());
    assert_eq!(one, three);
}

#[test]
fn finer_bins_with_more_samples_agree() {
    let coarse = estimate_r2(&small(100, 300)).unwrap();
    let fine = estimate_r2(&GoeConfig {
        bin_width: 0.125,
        samples: 1200,
        ..small(100, 300)
    })
    .unwrap();
    let mut worst: f64 = 0.0;
    for b in 0..coarse.bin_count() {
        let merged = 0.5 * (fine.r2[2 * b] + fine.r2[2 * b + 1]);
        let err = 0.5 * (fine.stderr[2 * b].powi(2) + fine.stderr[2 * b + 1].powi(2)).sqrt();
        let z = (merged - coarse.r2[b]) / (err * err + coarse.stderr[b].powi(2)).sqrt();
        worst = worst.max(z.abs());
    }
    assert!(worst < 3.5, "{worst}");
}

#[test]
fn finite_size_drift_is_within_errors() {
    let a = estimate_r2(&small(200, 250)).unwrap();
    let b = estimate_r2(&small(400, 250)).unwrap();
    for k in 0..a.bin_count() {
        if a.bin_edges[k] < 0.5 {
            continue;
        }
        let comb = (a.stderr[k].powi(2) + b.stderr[k].powi(2)).sqrt();
        assert!((a.r2[k] - b.r2[k]).abs() < 3.0 * comb, "bin {k}");
    }
}
