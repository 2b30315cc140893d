//! Closed-form 2×2 densities against Monte Carlo.

use tribeta::ensembles::EnsembleKind;
use tribeta::exact_n2::*;

fn main() -> tribeta::Result<()> {
    for kind in [EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde] {
        let d = N2Density::new(kind, 100.0)?;
        let peak = (0..200).map(|i| i as f64 * 0.1).max_by(|a, b| (a * d.density(*a).unwrap()).total_cmp(&(b * d.density(*b).unwrap()))).unwrap();
        let mc = mc_validate_n2(kind, 100.0, 20_000, 1)?;
        println!("{:>6}: mass {:.8}, radial peak near |λ| = {peak:.1}, MC KS {:.4}", kind.tag(), d.total_mass()?, mc.ks);
    }
    Ok(())
}
