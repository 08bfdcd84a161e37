//! Interval for the difference between two independently sampled
//! populations, each released with its own budget.

use stratdp::dp_ci::{difference_ci, str_nz_pub_sz, DpOptions};
use stratdp::{Design, PrivacyBudget, RandomStream, StratumCounts};

fn main() -> stratdp::Result<()> {
    let opts = DpOptions::default();
    let design_a = Design::from_sizes(&[(5000, 250), (3000, 150)])?;
    let design_b = Design::from_sizes(&[(4000, 200), (4000, 200)])?;
    let a = str_nz_pub_sz(
        &RandomStream::new(10, 0),
        &design_a,
        &StratumCounts::new(vec![140, 70]),
        &PrivacyBudget::new(0.05)?,
        &opts,
    )?
    .0;
    let b = str_nz_pub_sz(
        &RandomStream::new(11, 0),
        &design_b,
        &StratumCounts::new(vec![80, 66]),
        &PrivacyBudget::new(0.02)?,
        &opts,
    )?
    .0;
    let d = difference_ci(&a, &b, 0.1)?;
    println!("p_a ~ {:.4} in [{:.4}, {:.4}]", a.point_estimate, a.lower, a.upper);
    println!("p_b ~ {:.4} in [{:.4}, {:.4}]", b.point_estimate, b.lower, b.upper);
    println!("p_a - p_b ~ {:.4} in [{:.4}, {:.4}]", d.point_estimate, d.lower, d.upper);
    for (i, budget) in d.per_dataset_budgets.iter().enumerate() {
        println!("dataset {i}: rho = {}", budget.rho());
    }
    Ok(())
}
