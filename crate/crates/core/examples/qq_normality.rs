//! Empirical quantiles of the private point estimate against its
//! approximate normal law.

use stratdp::sim::{qq_data, ExperimentConfig};
use stratdp::AlgorithmTag;

fn main() -> stratdp::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/table4_middle.cfg");
    let mut config = ExperimentConfig::from_path(path)?;
    config.repetitions = 2000;
    for alg in AlgorithmTag::PRIVATE {
        let rows = qq_data(&config, 9, alg)?;
        println!("{alg}");
        for r in rows {
            println!("  q={:.1}  theoretical {:.5}  empirical {:.5}", r.q, r.theoretical, r.empirical);
        }
    }
    Ok(())
}
