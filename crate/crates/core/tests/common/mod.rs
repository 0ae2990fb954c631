#![allow(dead_code)]

use eeps_core::entropy::{OrbitalSet, SingleParticleState};
use eeps_core::many_body::{one_body_density, ManyBodyState};
use eeps_core::models::EigenBasis;
use eeps_core::seed::rng_from_seed;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// `n` orthonormal complex orbitals on `sites` sites by Gram-Schmidt on
/// Gaussian vectors. Each vector's first half is scaled by a random factor
/// so that weights in a half-chain cut spread over (0, 1).
pub fn random_orbitals(sites: usize, n: usize, seed: u64) -> OrbitalSet {
    let mut rng = rng_from_seed(seed);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let skew = rng.random_range(-3.0..3.0f64).exp();
        let mut v: Vec<Complex64> = (0..sites)
            .map(|i| {
                let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                if i < sites / 2 {
                    z * skew
                } else {
                    z
                }
            })
            .collect();
        for _ in 0..2 {
            for b in &basis {
                let p: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    OrbitalSet::new(
        basis
            .into_iter()
            .map(|v| SingleParticleState::new(v).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Single-particle orbitals occupied in a non-interacting eigenstate, read off
/// from the occupations `<e_k| D |e_k>` of its one-body density matrix.
pub fn occupied_orbitals(state: &ManyBodyState<'_>, single: &EigenBasis) -> OrbitalSet {
    let d = one_body_density(state);
    let v = single.vectors();
    let l = single.len();
    let mut occupied = Vec::new();
    for k in 0..l {
        let n_k: f64 = (0..l)
            .flat_map(|i| (0..l).map(move |j| (i, j)))
            .map(|(i, j)| v[(i, k)] * d[(i, j)] * v[(j, k)])
            .sum();
        assert!(n_k.abs() < 1e-8 || (n_k - 1.0).abs() < 1e-8, "occupation {n_k} is not 0 or 1");
        if n_k > 0.5 {
            occupied.push(k);
        }
    }
    assert_eq!(occupied.len(), state.basis().particles());
    single.orbital_set().unwrap().subset(&occupied).unwrap()
}

