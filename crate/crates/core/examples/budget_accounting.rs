//! zCDP budget splits, composition and the per-release noise ledger.

use stratdp::budget::compose_budgets;
use stratdp::ci::ledger_rho;
use stratdp::dp_ci::{pop_nz_pub_sz, str_nz_priv_sz, str_nz_pub_sz, DpOptions};
use stratdp::mechanisms::sensitivities;
use stratdp::{Design, PrivacyBudget, RandomStream, StratumCounts};

fn main() -> stratdp::Result<()> {
    let design = Design::from_sizes(&[(2000, 100), (1500, 80)])?;
    let counts = StratumCounts::new(vec![48, 35]);
    let budget = PrivacyBudget::with_split(0.04, 0.25)?;
    println!("rho = {}, rho1 = {}, rho2 = {}", budget.rho(), budget.rho1(), budget.rho2());

    let sens = sensitivities(&design);
    println!("delta_p = {:.6}, delta_v = {:.3e}", sens.delta_p, sens.delta_v);

    let stream = RandomStream::new(1, 0);
    let opts = DpOptions::default();
    let (a, _) = str_nz_pub_sz(&stream, &design, &counts, &budget, &opts)?;
    let b = pop_nz_pub_sz(&stream, &design, &counts, &budget, &opts)?;
    let (c, _) = str_nz_priv_sz(&stream, &design, &counts, &budget, &opts)?;
    for ci in [&a, &b, &c] {
        println!("\n{}: ledger total rho = {}", ci.algorithm, ledger_rho(&ci.noise));
        for r in &ci.noise {
            println!(
                "  {:<18} stratum {:<4} sensitivity {:.3e} rho {:.4} noise variance {:.3e}",
                r.statistic,
                r.stratum.map_or("-".to_string(), |h| h.to_string()),
                r.sensitivity,
                r.rho,
                r.variance
            );
        }
    }

    // Releasing two intervals on the same data composes sequentially.
    let both = compose_budgets(&budget, &budget);
    println!("\ntwo releases on the same data spend rho = {}", both.rho());
    Ok(())
}
