//! Series for E(1/X | S) against quadrature, and the second-order mean and
//! variance of a noisy-count / noisy-size ratio.

use stratdp::analysis::{
    alg3_k2_approximation, ratio_bias, reciprocal_moments_by_quadrature, reciprocal_normal_moments,
    truncated_even_moment,
};

fn main() -> stratdp::Result<()> {
    let (mu, sigma) = (152.0, 12.3);
    let (q1, q2) = reciprocal_moments_by_quadrature(mu, sigma)?;
    println!("quadrature: E(1/X|S) = {q1:.10e}, E(1/X^2|S) = {q2:.10e}");
    for k in 0..4 {
        let s = reciprocal_normal_moments(mu, sigma, k)?;
        println!(
            "k={k}: mean err {:.2e}, second moment err {:.2e}, (sigma/mu)^(2k+2) = {:.2e}",
            (s.mean - q1).abs(),
            (s.second_moment - q2).abs(),
            s.remainder_order
        );
    }

    for k in 1..4 {
        println!(
            "E[(X-mu)^{} | |X-mu| <= 2 sigma] = {:.6}",
            2 * k,
            truncated_even_moment(0.0, 1.0, 2.0, k)?
        );
    }

    let approx = alg3_k2_approximation(0.5, 152, 2000, 1.0 / 304.0, 1.0 / 304.0)?;
    println!(
        "\nratio estimator at n=152, p=0.5: mean {:.6}, sd {:.6}, leading bias {:.3e}",
        approx.mean,
        approx.variance.sqrt(),
        ratio_bias(0.5, 152, 1.0 / 304.0)
    );
    Ok(())
}
