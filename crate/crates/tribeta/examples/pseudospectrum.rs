//! ε-pseudospectrum: s_min grid and the analytic disc around a₁.

use tribeta::ensembles::EnsembleKind;
use tribeta::pseudospectrum::*;
use tribeta::randsrc::RngStream;

fn main() -> tribeta::Result<()> {
    let eps = 0.25;
    for kind in [EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde] {
        let m = kind.sample_scaled(50, 2.0, &mut RngStream::new(5, 0))?;
        let disc = disc_of_scaled(&m, eps);
        let c = disc_vs_grid_check(&m, eps, GridBox::square(1.0), 80)?;
        println!(
            "{:>6}: disc centre {:.3}, radius {:.3}; e_n set {} pts, s_min set {} pts, boundary mismatch {:.2} cells",
            kind.tag(),
            disc.centre,
            disc.radius(),
            c.en_inside,
            c.smin_inside,
            c.max_mismatch_cells
        );
    }
    Ok(())
}
