//! Entanglement erasing partner states.
//!
//! The Bell model pairs site `i` of `A` with site `i` of `B` into the two
//! states `(|a_i> +- |b_i>) / sqrt(2)`. Each carries one bit of entanglement;
//! a pair excited together carries none, and states of different pairs do
//! not interact. A random `N`-subset therefore has entanglement equal to the
//! number `s` of singly occupied pairs, whose distribution is counted exactly
//! here.
//!
//! The random-excitation estimator draws uniform `N`-subsets of any orbital
//! basis and reports the ratio of the mean joint entropy `J` to the mean sum
//! of single-orbital entropies `S`. Its standard error follows from the delta
//! method with sample (co)variances:
//! `var(r) = (var J - 2 r cov(J, S) + r^2 var S) / (n mean(S)^2)`.

use faer::Mat;
use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index;
use rayon::prelude::*;

use crate::entropy::{slater_entropy, Bipartition, OrbitalSet, SingleParticleState};
use crate::error::{Error, Result};
use crate::models::EigenBasis;
use crate::seed::{derive_seed, rng_from_seed};

/// `pairs` Bell pairs on `2 * pairs` sites; `A` is the first `pairs` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellModel {
    pairs: usize,
}

impl BellModel {
    pub fn new(pairs: usize) -> Result<Self> {
        if pairs == 0 {
            return Err(Error::Config("the Bell model needs at least one pair".into()));
        }
        Ok(Self { pairs })
    }

    /// Bell model with `states` single-particle states in total.
    pub fn with_states(states: usize) -> Result<Self> {
        if states % 2 != 0 {
            return Err(Error::Config(format!("the Bell model needs an even number of states, got {states}")));
        }
        Self::new(states / 2)
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn sites(&self) -> usize {
        2 * self.pairs
    }

    pub fn bipartition(&self) -> Bipartition {
        Bipartition::half_chain(self.sites()).expect("2 * pairs >= 2 is even")
    }
}

/// States `2i = (|a_i> + |b_i>)/sqrt 2` and `2i+1 = (|a_i> - |b_i>)/sqrt 2`,
/// with `|a_i>` site `i` and `|b_i>` site `pairs + i`.
pub fn bell_states(model: &BellModel) -> Result<OrbitalSet> {
    let l = model.sites();
    let p = model.pairs();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let states = (0..l)
        .map(|k| {
            let i = k / 2;
            let mut v = vec![0.0; l];
            v[i] = r;
            v[p + i] = if k % 2 == 0 { r } else { -r };
            SingleParticleState::from_real(&v)
        })
        .collect::<Result<Vec<_>>>()?;
    OrbitalSet::new(states)
}

/// A chosen set of Bell states and the number of pairs with exactly one member chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcitationSample {
    pub chosen: Vec<usize>,
    pub single_occupied_pairs: usize,
}

impl ExcitationSample {
    pub fn new(mut chosen: Vec<usize>) -> Self {
        chosen.sort_unstable();
        chosen.dedup();
        let mut s = 0;
        let mut k = 0;
        while k < chosen.len() {
            if k + 1 < chosen.len() && chosen[k] / 2 == chosen[k + 1] / 2 {
                k += 2;
            } else {
                s += 1;
                k += 1;
            }
        }
        Self {
            chosen,
            single_occupied_pairs: s,
        }
    }
}

fn check_bell_args(n: usize, l: usize) -> Result<()> {
    if l % 2 != 0 {
        return Err(Error::Domain(format!("the Bell model needs an even number of states, got {l}")));
    }
    if n % 2 != 0 {
        return Err(Error::Domain(format!("particle number must be even, got {n}")));
    }
    if n > l {
        return Err(Error::Domain(format!("cannot excite {n} of {l} states")));
    }
    Ok(())
}

/// Number of `N`-subsets of the `L` Bell states with exactly `s` singly
/// occupied pairs: `n(s) = 2^s C(L/2, s) C(L/2 - s, (N - s)/2)`.
///
/// Odd `N`, `s` or `L` is a domain error; `s > min(N, L/2)` has no subsets.
pub fn bell_count(s: usize, n: usize, l: usize) -> Result<BigUint> {
    check_bell_args(n, l)?;
    if s % 2 != 0 {
        return Err(Error::Domain(format!("the number of singly occupied pairs must be even, got {s}")));
    }
    let pairs = l / 2;
    if s > n || s > pairs || (n - s) / 2 > pairs - s {
        return Ok(BigUint::zero());
    }
    let ways = (BigUint::from(1u8) << s)
        * binomial(BigUint::from(pairs), BigUint::from(s))
        * binomial(BigUint::from(pairs - s), BigUint::from((n - s) / 2));
    Ok(ways)
}

/// Exact `(sum_s s n(s), C(L, N))`, whose ratio is the mean number of singly occupied pairs.
pub fn bell_mean_s_exact(n: usize, l: usize) -> Result<(BigUint, BigUint)> {
    check_bell_args(n, l)?;
    let mut weighted = BigUint::zero();
    for s in (0..=n.min(l / 2)).step_by(2) {
        weighted += bell_count(s, n, l)? * BigUint::from(s);
    }
    Ok((weighted, binomial(BigUint::from(l), BigUint::from(n))))
}

/// `<s> = (L - N) N / (L - 1)`.
pub fn bell_expected_s(n: usize, l: usize) -> Result<f64> {
    check_bell_args(n, l)?;
    if l < 2 {
        return Err(Error::Domain("need at least one pair".into()));
    }
    Ok((l - n) as f64 * n as f64 / (l - 1) as f64)
}

/// Finite-size erasure factor of the Bell model, `<s> / N = (L - N) / (L - 1)`.
pub fn bell_erasure_ratio(n: usize, l: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("the erasure factor needs N >= 1".into()));
    }
    Ok(bell_expected_s(n, l)? / n as f64)
}

/// `BigUint` ratio as `f64`.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    // Scale so both fit comfortably in f64 before dividing.
    let bits = num.bits().max(den.bits());
    let shift = bits.saturating_sub(1000);
    let a = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

/// Joint and summed single-orbital entropy of one random excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationOutcome {
    pub joint: f64,
    pub single_sum: f64,
}

/// Ratio-of-means estimate of the erasure factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErasureEstimate {
    pub samples: usize,
    pub mean_joint_ee: f64,
    pub mean_single_sum: f64,
    pub ratio: f64,
    pub std_error: f64,
}

impl ErasureEstimate {
    /// Sequential reduction over `outcomes` in order.
    pub fn from_outcomes(outcomes: &[ExcitationOutcome]) -> Result<Self> {
        let n = outcomes.len();
        if n == 0 {
            return Err(Error::Domain("no samples to estimate from".into()));
        }
        let nf = n as f64;
        let mean_j = outcomes.iter().map(|o| o.joint).sum::<f64>() / nf;
        let mean_s = outcomes.iter().map(|o| o.single_sum).sum::<f64>() / nf;
        if !(mean_s > 0.0) {
            return Err(Error::Numerical(
                "mean single-particle entropy is zero; the erasure factor is undefined".into(),
            ));
        }
        let ratio = mean_j / mean_s;
        let std_error = if n > 1 {
            let (mut vj, mut vs, mut cov) = (0.0, 0.0, 0.0);
            for o in outcomes {
                let (dj, ds) = (o.joint - mean_j, o.single_sum - mean_s);
                vj += dj * dj;
                vs += ds * ds;
                cov += dj * ds;
            }
            let d = nf - 1.0;
            let var = (vj / d - 2.0 * ratio * cov / d + ratio * ratio * vs / d) / (nf * mean_s * mean_s);
            var.max(0.0).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            samples: n,
            mean_joint_ee: mean_j,
            mean_single_sum: mean_s,
            ratio,
            std_error,
        })
    }
}

/// Joint entropy of the orbitals `chosen` out of `basis`, plus the sum of
/// their single-orbital entropies (taken from `singles`).
///
/// For a complete basis the Slater determinant of the complement has the
/// same entanglement, so the smaller of the two sets is diagonalized.
pub fn excitation_outcome(
    basis: &OrbitalSet,
    singles: &[f64],
    part: &Bipartition,
    chosen: &[usize],
) -> Result<ExcitationOutcome> {
    let single_sum: f64 = chosen.iter().map(|&k| singles[k]).sum();
    let joint = match chosen.len() {
        0 => 0.0,
        1 => singles[chosen[0]],
        n => {
            let complete = basis.len() == basis.sites();
            if complete && n > basis.len() / 2 {
                let mut taken = vec![false; basis.len()];
                for &k in chosen {
                    taken[k] = true;
                }
                let rest: Vec<usize> = (0..basis.len()).filter(|&k| !taken[k]).collect();
                if rest.is_empty() {
                    0.0
                } else {
                    slater_entropy(&basis.subset(&rest)?, part)?
                }
            } else {
                slater_entropy(&basis.subset(chosen)?, part)?
            }
        }
    };
    Ok(ExcitationOutcome { joint, single_sum })
}

/// `samples` uniformly random `n`-subsets of `basis`; sample `k` draws from
/// the stream seeded with `derive_seed(seed, k)`. Output is in sample order
/// regardless of the thread pool size.
pub fn sample_excitation_outcomes(
    basis: &OrbitalSet,
    part: &Bipartition,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<ExcitationOutcome>> {
    if n > basis.len() {
        return Err(Error::Domain(format!("cannot excite {n} of {} states", basis.len())));
    }
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let singles = basis.single_particle_entropies(part)?;
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from_seed(derive_seed(seed, k as u64));
            let mut chosen = index::sample(&mut rng, basis.len(), n).into_vec();
            chosen.sort_unstable();
            excitation_outcome(basis, &singles, part, &chosen)
        })
        .collect()
}

/// Erasure factor estimate from `samples` random `n`-subsets of `basis`.
pub fn sample_random_excitations(
    basis: &OrbitalSet,
    part: &Bipartition,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<ErasureEstimate> {
    ErasureEstimate::from_outcomes(&sample_excitation_outcomes(basis, part, n, samples, seed)?)
}

/// Greedy choice of `n` eigenstates localized next to the half-chain cut.
///
/// Sites are visited nearest to the cut first, alternating left and right
/// (`L/2 - 1, L/2, L/2 - 2, L/2 + 1, ...`); each takes the not yet chosen
/// eigenstate with the largest weight on it, the lowest index winning ties.
/// Returns eigenstate indices in visiting order.
pub fn near_cut_indices(basis: &EigenBasis, part: &Bipartition, n: usize) -> Result<Vec<usize>> {
    let l = basis.len();
    if part.total_sites() != l || !part.is_half_chain() {
        return Err(Error::Validation(format!(
            "near-cut selection needs the half-chain cut of the {l}-site basis"
        )));
    }
    if n % 2 != 0 || n > l {
        return Err(Error::Domain(format!("need even N <= L, got N = {n}, L = {l}")));
    }
    let cut = l / 2;
    let vectors = basis.vectors();
    let mut taken = vec![false; l];
    let mut chosen = Vec::with_capacity(n);
    for d in 0..n / 2 {
        for site in [cut - 1 - d, cut + d] {
            let mut best: Option<(usize, f64)> = None;
            for k in 0..l {
                if taken[k] {
                    continue;
                }
                let w = vectors[(site, k)] * vectors[(site, k)];
                if best.map_or(true, |(_, bw)| w > bw) {
                    best = Some((k, w));
                }
            }
            let (k, _) = best.expect("fewer chosen states than sites");
            taken[k] = true;
            chosen.push(k);
        }
    }
    Ok(chosen)
}

/// The eigenstates picked by [`near_cut_indices`] as an orbital set; `n >= 2`.
pub fn select_near_cut(basis: &EigenBasis, part: &Bipartition, n: usize) -> Result<OrbitalSet> {
    let idx = near_cut_indices(basis, part, n)?;
    let v = basis.vectors();
    OrbitalSet::from_real_columns(Mat::from_fn(v.nrows(), idx.len(), |i, k| v[(i, idx[k])]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{correlation_matrix, entanglement_entropy, single_particle_entropy};
    use crate::models::{build_hamiltonian, diagonalize, ChainSpec};

    #[test]
    fn bell_state_entropies() {
        let model = BellModel::new(3).unwrap();
        let part = model.bipartition();
        let states = bell_states(&model).unwrap();
        for s in states.orbitals() {
            assert!((single_particle_entropy(&s, &part).unwrap() - 1.0).abs() < 1e-12);
        }
        let pair = states.subset(&[2, 3]).unwrap();
        assert!(entanglement_entropy(&correlation_matrix(&pair, &part).unwrap()).unwrap() < 1e-12);
        let cross = states.subset(&[0, 3]).unwrap();
        assert!((entanglement_entropy(&correlation_matrix(&cross, &part).unwrap()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn small_counts() {
        assert_eq!(bell_count(0, 2, 4).unwrap(), BigUint::from(2u8));
        assert_eq!(bell_count(2, 2, 4).unwrap(), BigUint::from(4u8));
        assert_eq!(bell_count(4, 2, 4).unwrap(), BigUint::zero());
        let total: BigUint = (0..=4).step_by(2).map(|s| bell_count(s, 4, 8).unwrap()).sum();
        assert_eq!(total, BigUint::from(70u8));
        assert!(bell_count(1, 2, 4).is_err());
        assert!(bell_count(0, 3, 4).is_err());
        assert!(bell_count(0, 2, 5).is_err());
    }

    #[test]
    fn mean_s_small_case() {
        let (num, den) = bell_mean_s_exact(2, 4).unwrap();
        assert_eq!((num, den), (BigUint::from(8u8), BigUint::from(6u8)));
        assert!((bell_expected_s(2, 4).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(bell_expected_s(8, 8).unwrap(), 0.0);
        assert!((bell_erasure_ratio(2, 4).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn excitation_sample_counts_single_pairs() {
        assert_eq!(ExcitationSample::new(vec![0, 1, 2, 5]).single_occupied_pairs, 2);
        assert_eq!(ExcitationSample::new(vec![3, 2]).single_occupied_pairs, 0);
        assert_eq!(ExcitationSample::new(vec![1, 2]).single_occupied_pairs, 2);
    }

    #[test]
    fn single_excitation_ratio_is_one() {
        let h = build_hamiltonian(&ChainSpec::anderson(16, 1.0), 3).unwrap();
        let basis = diagonalize(h.as_ref()).unwrap().orbital_set().unwrap();
        let part = Bipartition::half_chain(16).unwrap();
        let est = sample_random_excitations(&basis, &part, 1, 50, 9).unwrap();
        assert_eq!(est.ratio, 1.0);
    }

    #[test]
    fn complement_route_matches_direct_route() {
        let l = 12;
        let h = build_hamiltonian(&ChainSpec::anderson(l, 1.5), 21).unwrap();
        let basis = diagonalize(h.as_ref()).unwrap().orbital_set().unwrap();
        let part = Bipartition::half_chain(l).unwrap();
        let singles = basis.single_particle_entropies(&part).unwrap();
        let chosen = [0usize, 1, 3, 4, 6, 7, 8, 10, 11];
        let fast = excitation_outcome(&basis, &singles, &part, &chosen).unwrap();
        let direct = entanglement_entropy(&correlation_matrix(&basis.subset(&chosen).unwrap(), &part).unwrap()).unwrap();
        assert!((fast.joint - direct).abs() < 1e-10);
    }

    #[test]
    fn estimator_is_seed_deterministic() {
        let model = BellModel::new(4).unwrap();
        let basis = bell_states(&model).unwrap();
        let part = model.bipartition();
        let a = sample_random_excitations(&basis, &part, 4, 40, 5).unwrap();
        let b = sample_random_excitations(&basis, &part, 4, 40, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn near_cut_on_diagonal_hamiltonian_picks_site_states() {
        let l = 16;
        let spec = ChainSpec::anderson(l, 1.0).with_hopping(0.0);
        let h = build_hamiltonian(&spec, 4).unwrap();
        let basis = diagonalize(h.as_ref()).unwrap();
        let part = Bipartition::half_chain(l).unwrap();
        let idx = near_cut_indices(&basis, &part, 4).unwrap();
        let sites: Vec<usize> = idx
            .iter()
            .map(|&k| (0..l).find(|&i| basis.vectors()[(i, k)].abs() > 0.5).unwrap())
            .collect();
        assert_eq!(sites, vec![7, 8, 6, 9]);
        let set = select_near_cut(&basis, &part, 4).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.orthonormality_defect() < 1e-10);
        assert!(slater_entropy(&set, &part).unwrap() < 1e-12);
        assert!(near_cut_indices(&basis, &part, 3).is_err());
        assert!(near_cut_indices(&basis, &part, 0).unwrap().is_empty());
    }
}
