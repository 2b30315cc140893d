//! Sample each ensemble and solve with both eigensolvers.

use tribeta::eigensolve::{eigen_pairs, eigenvalues_aberth, eigenvalues_qr};
use tribeta::ensembles::EnsembleKind;
use tribeta::linalg::max_matched_distance;
use tribeta::randsrc::RngStream;

fn main() -> tribeta::Result<()> {
    let (n, beta) = (200, 10.0);
    for kind in [EnsembleKind::GeneralT, EnsembleKind::SymmetricS, EnsembleKind::NonsymmetricTtilde] {
        let m = kind.sample_scaled(n, beta, &mut RngStream::new(42, 0))?;
        let qr = eigenvalues_qr(&m)?;
        let ab = eigenvalues_aberth(&m)?;
        let pairs = eigen_pairs(&m, &qr)?;
        let worst = pairs.pairs.iter().map(|p| p.residual(&m)).fold(0.0, f64::max);
        let rmax = qr.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!(
            "{:>6}: max |λ| = {rmax:.3}, QR vs Aberth {:.1e}, max eigenpair residual {worst:.1e}",
            kind.tag(),
            max_matched_distance(&qr.eigenvalues, &ab.eigenvalues)
        );
    }
    Ok(())
}
