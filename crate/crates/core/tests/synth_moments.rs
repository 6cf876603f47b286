use supplynet::pipeline::describe_columns;
use supplynet::stats::{mean, sample_sd};
use supplynet::synth::{generate, SynthConfig, CALIBRATED_VARIABLES, PUBLISHED_MOMENTS};
use supplynet::Graph;

/// Largest |z| of the sample mean and sd against the calibration targets,
/// over the seven log variables of all focal companies.
fn worst_z(seed: u64, n: usize) -> (f64, String) {
    let g: Graph = generate(&SynthConfig {
        n_companies: n,
        seed,
        ..SynthConfig::default()
    })
    .unwrap();
    let mut worst = (0.0, String::new());
    for ((name, col), target) in describe_columns(&g, true).iter().zip(PUBLISHED_MOMENTS) {
        let v: Vec<f64> = col.iter().flatten().copied().collect();
        let k = v.len() as f64;
        let (m, s) = (mean(&v).unwrap(), sample_sd(&v).unwrap());
        let z_mean = (m - target.mean) / (target.sd / k.sqrt());
        let z_sd = (s - target.sd) / (target.sd / (2.0 * (k - 1.0)).sqrt());
        for (z, what) in [(z_mean, "mean"), (z_sd, "sd")] {
            if z.abs() > worst.0 {
                worst = (
                    z.abs(),
                    format!("{name} {what}: {m:.3}/{s:.3} (n={k}) z={z:.2}"),
                );
            }
        }
    }
    worst
}

#[test]
fn marginal_moments_within_four_standard_errors() {
    assert_eq!(CALIBRATED_VARIABLES.len(), 7);
    for seed in [1, 2] {
        let (z, what) = worst_z(seed, 2000);
        println!("seed {seed}: worst {what}");
        assert!(z < 4.0, "seed {seed}: {what}");
    }
}
