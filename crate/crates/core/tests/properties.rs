mod common;

use common::random_orbitals;
use eeps_core::bell::bell_count;
use eeps_core::entropy::{
    binary_entropy, correlation_matrix, single_orbital_correlation, single_particle_entropy,
    slater_entropy, Bipartition, CorrelationMatrix, OrbitalSet, SingleParticleState,
};
use eeps_core::linalg::singular_values;
use eeps_core::many_body::{many_body_ee, ManyBodyState, SectorBasis};
use eeps_core::seed::rng_from_seed;
use eeps_core::two_particle::{analyze_pair, modified_occupations};
use faer::Mat;
use num_bigint::BigUint;
use num_integer::binomial;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn cut_strategy() -> impl Strategy<Value = (usize, usize, usize)> {
    (4usize..=16).prop_flat_map(|l| (Just(l), 0..l - 1)).prop_flat_map(|(l, start)| (Just(l), Just(start), 1..l - start))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn correlation_matrix_is_sum_of_single_orbital_matrices(
        (l, start, len) in cut_strategy(),
        n in 1usize..=4,
        seed in any::<u64>(),
    ) {
        let n = n.min(l);
        let set = random_orbitals(l, n, seed);
        let part = Bipartition::contiguous(l, start, len).unwrap();
        let joint = correlation_matrix(&set, &part).unwrap();
        let mut sum = CorrelationMatrix::zeros(part.len_a());
        for orbital in set.orbitals() {
            sum = sum.sum(&single_orbital_correlation(&orbital, &part).unwrap()).unwrap();
        }
        prop_assert!(joint.max_abs_diff(&sum) < 1e-12);
    }

    #[test]
    fn single_orbital_matrix_has_rank_one(
        (l, start, len) in cut_strategy(),
        seed in any::<u64>(),
    ) {
        let orbital = random_orbitals(l, 1, seed).orbital(0);
        let part = Bipartition::contiguous(l, start, len).unwrap();
        let ev = single_orbital_correlation(&orbital, &part).unwrap().eigenvalues().unwrap();
        let lambda = orbital.weight_in(&part).unwrap();
        let (top, rest) = ev.split_last().unwrap();
        prop_assert!((top - lambda).abs() < 1e-10);
        prop_assert!(rest.iter().all(|x| x.abs() < 1e-10));
    }

    #[test]
    fn pairs_are_subadditive_and_conserve_trace(
        (l, start, len) in cut_strategy(),
        seed in any::<u64>(),
    ) {
        let set = random_orbitals(l, 2, seed);
        let part = Bipartition::contiguous(l, start, len).unwrap();
        let (a, b) = (set.orbital(0), set.orbital(1));
        let joint = slater_entropy(&set, &part).unwrap();
        let singles = single_particle_entropy(&a, &part).unwrap() + single_particle_entropy(&b, &part).unwrap();
        prop_assert!(joint <= singles + 1e-9);
        let pa = analyze_pair(&a, &b, &part).unwrap();
        prop_assert!((pa.nu1 + pa.nu2 - pa.lambda1 - pa.lambda2).abs() < 1e-10);
        let ev = correlation_matrix(&set, &part).unwrap().eigenvalues().unwrap();
        prop_assert!((ev.iter().sum::<f64>() - pa.lambda1 - pa.lambda2).abs() < 1e-10);
    }

    #[test]
    fn entanglement_is_additive_for_orthogonal_restrictions(
        l in 4usize..=16,
        seed in any::<u64>(),
    ) {
        // Restrictions supported on disjoint sites of A, and of B.
        let la = l / 2;
        let mut rng = rng_from_seed(seed);
        let mut draw = |sites: &[usize]| {
            let mut v = vec![num_complex::Complex64::new(0.0, 0.0); l];
            for &i in sites {
                v[i] = num_complex::Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            v
        };
        let a_even: Vec<usize> = (0..la).step_by(2).chain((la..l).step_by(2)).collect();
        let a_odd: Vec<usize> = (1..la).step_by(2).chain((la + 1..l).step_by(2)).collect();
        let s1 = SingleParticleState::normalized(draw(&a_even)).unwrap();
        let s2 = SingleParticleState::normalized(draw(&a_odd)).unwrap();
        let part = Bipartition::contiguous(l, 0, la).unwrap();
        let joint = slater_entropy(&OrbitalSet::new(vec![s1.clone(), s2.clone()]).unwrap(), &part).unwrap();
        let sum = single_particle_entropy(&s1, &part).unwrap() + single_particle_entropy(&s2, &part).unwrap();
        prop_assert!((joint - sum).abs() < 1e-9);
    }

    #[test]
    fn joint_entropy_decreases_with_overlap(l1 in 0.0f64..=1.0, l2 in 0.0f64..=1.0) {
        // Orthonormal states have equal and opposite overlaps in A and B, so
        // sigma l1 l2 <= (1 - l1)(1 - l2); this caps sigma below 1 when l1 + l2 > 1.
        let sigma_max = if l1 * l2 > 0.0 { ((1.0 - l1) * (1.0 - l2) / (l1 * l2)).min(1.0) } else { 1.0 };
        let ee = |sigma: f64| {
            let (n1, n2, _) = modified_occupations(l1, l2, sigma);
            binary_entropy(n1).unwrap() + binary_entropy(n2).unwrap()
        };
        let mut prev = ee(0.0);
        for k in 1..=100 {
            let next = ee(sigma_max * k as f64 / 100.0);
            prop_assert!(next <= prev + 1e-12, "step {k}: {next} > {prev}");
            prev = next;
        }
    }

    #[test]
    fn binary_entropy_is_exactly_symmetric(k in 0u64..=(1 << 30)) {
        let x = k as f64 / (1u64 << 30) as f64;
        prop_assert_eq!(binary_entropy(x).unwrap(), binary_entropy(1.0 - x).unwrap());
    }

    #[test]
    fn blockwise_entropy_equals_global_entropy(
        l in 4usize..=10,
        n_frac in 0.0f64..1.0,
        cut_frac in 0.0f64..1.0,
        seed in any::<u64>(),
    ) {
        let n = ((n_frac * (l + 1) as f64) as usize).min(l);
        let la = 1 + ((cut_frac * (l - 1) as f64) as usize).min(l - 2);
        let basis = SectorBasis::new(l, n).unwrap();
        let mut rng = rng_from_seed(seed);
        let raw: Vec<f64> = (0..basis.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let psi = ManyBodyState::new(&basis, raw.iter().map(|x| x / norm).collect()).unwrap();
        let part = Bipartition::contiguous(l, 0, la).unwrap();

        // Global reshape into all 2^la x 2^(l - la) configurations.
        let mut m = Mat::<f64>::zeros(1 << la, 1 << (l - la));
        for (&mask, &amp) in basis.configs().iter().zip(psi.amplitudes()) {
            m[((mask & ((1 << la) - 1)) as usize, (mask >> la) as usize)] = amp;
        }
        let global: f64 = singular_values(m.as_ref())
            .unwrap()
            .iter()
            .map(|s| s * s)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum();
        let blockwise = many_body_ee(&psi, &part).unwrap();
        prop_assert!((global - blockwise).abs() < 1e-10);
        let end = Bipartition::contiguous(l, la, l - la).unwrap();
        prop_assert!((many_body_ee(&psi, &end).unwrap() - blockwise).abs() < 1e-10);
    }
}

#[test]
fn bell_counts_sum_to_binomial() {
    for l in (2..=20).step_by(2) {
        for n in (0..=l).step_by(2) {
            let total: BigUint = (0..=n).step_by(2).map(|s| bell_count(s, n, l).unwrap()).sum();
            assert_eq!(total, binomial(BigUint::from(l), BigUint::from(n)), "L={l} N={n}");
        }
    }
}
