//! Forward and inverse Fourier transform of a band-limited function on SU(2),
//! with the Plancherel identity.

use feller_symbol::fourier::{fourier_inverse, fourier_transform, plancherel_norm, BandLimitedFunction};
use feller_symbol::group::GroupKind;
use feller_symbol::quadrature::{haar_quadrature, QuadratureRule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> feller_symbol::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kind = GroupKind::SU2;
    let band = 6;
    let f = BandLimitedFunction::random(kind, band, 0.8, false, &mut rng);

    // exact for |f|² and for f times any coefficient in the band
    let q = haar_quadrature(kind, QuadratureRule::resolution_for_band(kind, 2 * band))?;
    let coeffs = fourier_transform(|g| f.eval(g).unwrap(), &q, band, Some(band))?;
    println!("{} quadrature nodes, exact to band {}", q.len(), q.band);

    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = kind.random_haar(&mut rng);
        worst = worst.max((fourier_inverse(&coeffs, &g)? - f.eval(&g)?).norm());
    }
    println!("max inversion error over 100 points: {worst:.2e}");

    let l2 = q.integrate(|g| f.eval(g).unwrap().norm_sqr()).sqrt();
    println!("‖f‖₂ by quadrature {l2:.12}, by Plancherel {:.12}", plancherel_norm(&coeffs));
    Ok(())
}
