//! Eigenvector condition numbers: T and S are mildly non-normal, T̃ is not.

use tribeta::eigensolve::Gauge;
use tribeta::ensembles::EnsembleKind;
use tribeta::ginibre::ginibre_condition_table;
use tribeta::pseudospectrum::condition_table;

fn main() -> tribeta::Result<()> {
    for kind in [EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde] {
        let row = condition_table(kind, 60, 10, 2.0, 1, Gauge::UnitColumns)?;
        println!("{:>7}: median κ = {:.3e}", row.kind, row.median);
    }
    println!("Ginibre: median κ = {:.3e}", ginibre_condition_table(60, 10, 1)?.median_kappa);
    Ok(())
}
