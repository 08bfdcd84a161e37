//! Private intervals for one stratified sample under each algorithm.
//!
//! cargo run --example private_ci

use stratdp::dp_ci::{run_algorithm, DpOptions};
use stratdp::{AlgorithmTag, Design, PrivacyBudget, RandomStream, StratumCounts};

fn main() -> stratdp::Result<()> {
    let design = Design::from_sizes(&[(2000, 100), (1500, 80), (1800, 120)])?;
    let counts = StratumCounts::new(vec![50, 20, 90]);
    let budget = PrivacyBudget::new(0.05)?;
    let opts = DpOptions {
        alpha: 0.1,
        clip_proportions: true,
        clip_interval: true,
    };
    let stream = RandomStream::new(2024, 0);

    println!("{:<11} {:>9} {:>9} {:>9} {:>9}", "algorithm", "estimate", "lower", "upper", "width");
    for alg in [
        AlgorithmTag::NonPrivate,
        AlgorithmTag::StrNzPubSz,
        AlgorithmTag::PopNzPubSz,
        AlgorithmTag::StrNzPrivSz,
    ] {
        let (ci, strata) = run_algorithm(alg, &stream, &design, &counts, &budget, &opts)?;
        println!(
            "{:<11} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            alg.as_str(),
            ci.point_estimate,
            ci.lower,
            ci.upper,
            ci.width()
        );
        for s in strata {
            println!("    stratum {}: p~ = {:.4}, V~ = {:.3e}", s.stratum, s.p_tilde, s.v_tilde);
        }
    }
    Ok(())
}
