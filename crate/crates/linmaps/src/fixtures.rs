//! Builtin functions and vertex sets used by the checks, the CLI and the acceptance suite.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::FieldElement;
use crate::fourier::{FourierError, MapFunction};
use crate::space::Space;

/// Σ_{rank X = d} u_X.
pub fn sharpness(sp: &Arc<Space>, d: usize) -> MapFunction<f64> {
    let coeffs = sp
        .dual_ranks()
        .iter()
        .map(|&r| if r as usize == d { Complex::new(1.0, 0.0) } else { Complex::new(0.0, 0.0) })
        .collect();
    crate::fourier::Spectrum::new(sp.clone(), coeffs).expect("length matches").inverse()
}

/// Indicator of {A : rank A ≤ r}.
pub fn rank_threshold(sp: &Arc<Space>, r: usize) -> MapFunction<f64> {
    let f = sp.field().clone();
    MapFunction::indicator(sp.clone(), |a| a.rank(&f) <= r)
}

/// Indicator of a random set, each map included independently with the given probability.
pub fn random_boolean(sp: &Arc<Space>, density: f64, seed: u64) -> MapFunction<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals: Vec<f64> = (0..sp.len()).map(|_| if rng.gen_bool(density.clamp(0.0, 1.0)) { 1.0 } else { 0.0 }).collect();
    MapFunction::from_real(sp.clone(), &vals).expect("length matches")
}

/// Indicator of a uniformly random subset of exactly half the maps.
pub fn random_half(sp: &Arc<Space>, seed: u64) -> MapFunction<f64> {
    use rand::seq::SliceRandom;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..sp.len()).collect();
    idx.shuffle(&mut rng);
    let mut vals = vec![0.0; sp.len()];
    for &i in &idx[..sp.len() / 2] {
        vals[i] = 1.0;
    }
    MapFunction::from_real(sp.clone(), &vals).expect("length matches")
}

/// The dictator slab {A : A e₁ = 0}.
pub fn first_dictator(sp: &Arc<Space>) -> Result<MapFunction<f64>, FourierError> {
    let mut v = vec![FieldElement::ZERO; sp.dim_v()];
    v[0] = FieldElement::ONE;
    MapFunction::dictator(sp.clone(), &v, &vec![FieldElement::ZERO; sp.dim_w()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn sharpness_mass_sits_on_one_level() {
        let sp = Space::get(&Field::standard(2).unwrap(), 2, 2);
        let mass = sharpness(&sp, 1).transform().rank_mass();
        assert!((mass[1] - 9.0).abs() < 1e-9 && mass[0] < 1e-18 && mass[2] < 1e-18);
    }

    #[test]
    fn set_builders() {
        let sp = Space::get(&Field::standard(2).unwrap(), 2, 2);
        assert!((rank_threshold(&sp, 1).mean().re - 10.0 / 16.0).abs() < 1e-12);
        assert!((random_half(&sp, 3).mean().re - 0.5).abs() < 1e-12);
        assert!(random_boolean(&sp, 0.3, 1).is_boolean());
        assert!((first_dictator(&sp).unwrap().mean().re - 0.25).abs() < 1e-12);
    }
}
