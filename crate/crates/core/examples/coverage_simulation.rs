//! Coverage and width of each algorithm over repeated samples.
//!
//! cargo run --release --example coverage_simulation [config.cfg]

use stratdp::sim::{Experiment, ExperimentConfig};

fn main() -> stratdp::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/table4_top.cfg").to_string()
    });
    let exp = Experiment::new(ExperimentConfig::from_path(&path)?)?;
    let (report, _) = exp.run(false)?;
    println!(
        "true p = {:.4}, sample sizes {:?}",
        report.population.proportion,
        exp.sample_sizes
    );
    for point in &report.points {
        println!("\nrho = {:.6} ({} repetitions)", point.budget.rho(), point.repetitions);
        println!("{:<11} {:>8} {:>8} {:>8} {:>7}", "algorithm", "coverage", "width", "sd", "WR");
        for a in &point.algorithms {
            println!(
                "{:<11} {:>8.4} {:>8.4} {:>8.4} {:>7.3}",
                a.algorithm.as_str(),
                a.coverage,
                a.mean_width,
                a.width_sd.unwrap_or(0.0),
                a.width_ratio
            );
        }
    }
    Ok(())
}
