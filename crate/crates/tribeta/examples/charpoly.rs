//! Characteristic-polynomial coefficients three ways, and the exact variance identities.

use tribeta::charpoly::{coeffs_nested_sum, coeffs_recurrence, coeffs_subset_oracle, q_poly_d, q_poly_d_closed, var_kappa_d, var_kappa_g};
use tribeta::randsrc::RngStream;

fn main() -> tribeta::Result<()> {
    let mut s = RngStream::new(1, 0);
    let bt: Vec<_> = (0..9).map(|_| s.complex_normal()).collect();
    let a = coeffs_recurrence(&bt);
    println!("n = {}, κ = {:?}", a.n, a.kappa);
    println!("nested vs recurrence: {:.1e}", a.max_rel_diff(&coeffs_nested_sum(&bt)));
    println!("subsets vs recurrence: {:.1e}", a.max_rel_diff(&coeffs_subset_oracle(&bt)?));

    println!("Var κ_ℓ for D, n = 10: {:?}", var_kappa_d(10)?);
    let g = var_kappa_g(10, 2.0)?;
    println!("G nested sums {:?} == closed form {:?}: {}", g.nested, g.closed, g.nested == g.closed);

    let q = q_poly_d(6);
    for x in [0.0, 1.0, 5.0] {
        println!("Q_6^D({x}) = {} (closed form {})", q.eval(x), q_poly_d_closed(6, x)?);
    }
    Ok(())
}
