//! β → ∞: coupled draws converge to D/(2√n) at rate β^{-1/2}.

use tribeta::lowtemp::*;
use tribeta::randsrc::RngStream;

fn main() -> tribeta::Result<()> {
    let betas = [1e2, 1e3, 1e4, 1e5, 1e6];
    let draw = coupled_family(LimitKind::D, 8, &betas, &mut RngStream::new(2, 0))?;
    let rate = convergence_rate(&draw)?;
    for (b, d) in rate.betas.iter().zip(&rate.distances) {
        println!("β = {b:>9.0}: max matched distance {d:.3e}");
    }
    println!("log-log slope {:.3}", rate.slope);

    let f = fluctuation_check(LimitKind::D, 6, 1e6, 50, 4)?;
    println!("first-order fluctuation correlation {:.5}", f.correlation);
    let (mean, var) = chi_limit_stats(1e4, 20_000, &mut RngStream::new(3, 0))?;
    println!("χ_r − √r at r = 1e4: mean {mean:.4}, variance {var:.4}");
    Ok(())
}
