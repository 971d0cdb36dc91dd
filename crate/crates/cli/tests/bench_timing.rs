//! Wall-clock properties of the benchmark. Kept in their own test binary so no
//! other test competes for the CPU while they run.

use aswd_cli::commands::bench;
use aswd_cli::Config;

fn seconds(rows: &[aswd_cli::commands::BenchRow], n: usize, l: usize) -> f64 {
    rows.iter().find(|r| r.n == n && r.l == l).unwrap().seconds
}

#[test]
fn swd_timing_scales_as_expected() {
    let mut config = Config::default();
    config.bench.sizes = vec![500, 2000];
    config.bench.projections = vec![10, 100];
    let rows = bench(&config).unwrap();
    assert_eq!(rows.len(), 4);

    let growth = seconds(&rows, 2000, 100) / seconds(&rows, 500, 100);
    println!("4x samples: time x{growth:.2}");
    assert!(growth < 16.0, "quadratic or worse growth: {growth}");

    let ratio = seconds(&rows, 2000, 100) / seconds(&rows, 2000, 10);
    println!("10x projections: time x{ratio:.2}");
    assert!((5.0..=15.0).contains(&ratio), "L ratio {ratio}");

    let again = bench(&config).unwrap();
    for (a, b) in rows.iter().zip(&again) {
        let r = a.seconds / b.seconds;
        assert!((0.5..=2.0).contains(&r), "{a:?} vs {b:?}");
    }
}
