//! Extrinsic variances, budget ratios and width ratios, including the lower
//! bounds at n * rho = 1.

use stratdp::analysis::{
    budget_ratio_priv_vs_pub, budget_ratio_str_vs_pop, sampling_weights, width_ratio_report,
};
use stratdp::{Design, PrivacyBudget};

fn main() -> stratdp::Result<()> {
    let design = Design::from_sizes(&[(2000, 152)])?;
    let budget = PrivacyBudget::new(1.0 / 152.0)?;
    let report = width_ratio_report(&design, 0.5, &budget)?;
    println!("{:<10} {:>12} {:>8} {:>8}", "algorithm", "V_ex", "TWR", "bound");
    for e in &report.entries {
        println!(
            "{:<10} {:>12.4e} {:>8.4} {:>8.4}",
            e.algorithm.as_str(),
            e.extrinsic_variance,
            e.twr,
            e.twr_lower_bound
        );
    }

    let sizes: Vec<(u64, u64)> = (0..10).map(|h| (1500 + 50 * h, 60 + 10 * h)).collect();
    let many = Design::from_sizes(&sizes)?;
    let u = sampling_weights(&many);
    let p = vec![0.5; u.len()];
    println!("\nten strata:");
    println!("  V_ex(stratum noise) / V_ex(population noise) = {:.3}", budget_ratio_str_vs_pop(&u)?);
    println!("  V_ex(private sizes) / V_ex(public sizes)     = {:.3}", budget_ratio_priv_vs_pub(&u, &p)?);
    Ok(())
}
