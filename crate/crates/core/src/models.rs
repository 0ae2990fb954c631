//! Single-particle chain Hamiltonians and their eigenbases.
//!
//! `H = -t sum_i (c_i^dag c_{i+1} + h.c.) + sum_i h_i n_i`, optionally with a
//! central site coupled to every chain site with strength `A / sqrt(L)`.
//! Chain sites occupy matrix indices `0..L` (site label `i + 1`); the
//! central site, when present, is the last index `L`. Energies are in units
//! of the hopping `t`.

use std::f64::consts::PI;

use faer::{Mat, MatRef};
use num_complex::Complex64;
use rand::Rng;

use crate::entropy::{OrbitalSet, SingleParticleState};
use crate::error::{Error, Result};
use crate::linalg;
use crate::seed::rng_from_seed;

/// Symmetry defect above which a matrix is not accepted as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

/// On-site potential `h_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Zero,
    /// i.i.d. uniform on `[-width, width]`.
    RandomUniform { width: f64 },
    /// `h_i = (-mu)^i` for site labels `i = 1..L`.
    Staggered { mu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub sites: usize,
    pub hopping: f64,
    pub boundary: Boundary,
    pub potential: Potential,
    /// Coupling `A` of the central site; `0` disables it.
    pub central_coupling: f64,
}

impl ChainSpec {
    /// Disorder-free chain with periodic boundaries.
    pub fn clean(sites: usize) -> Self {
        Self {
            sites,
            hopping: 1.0,
            boundary: Boundary::Periodic,
            potential: Potential::Zero,
            central_coupling: 0.0,
        }
    }

    /// Anderson chain with open boundaries.
    pub fn anderson(sites: usize, width: f64) -> Self {
        Self {
            sites,
            hopping: 1.0,
            boundary: Boundary::Open,
            potential: Potential::RandomUniform { width },
            central_coupling: 0.0,
        }
    }

    pub fn staggered(sites: usize, mu: f64) -> Self {
        Self {
            sites,
            hopping: 1.0,
            boundary: Boundary::Open,
            potential: Potential::Staggered { mu },
            central_coupling: 0.0,
        }
    }

    /// Anderson chain plus a central site coupled to every chain site.
    pub fn central_site(sites: usize, width: f64, coupling: f64) -> Self {
        Self {
            central_coupling: coupling,
            ..Self::anderson(sites, width)
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_hopping(mut self, hopping: f64) -> Self {
        self.hopping = hopping;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Config(format!("a chain needs at least 2 sites, got {}", self.sites)));
        }
        if !self.hopping.is_finite() {
            return Err(Error::Config("hopping must be finite".into()));
        }
        match self.potential {
            Potential::RandomUniform { width } if !(width >= 0.0 && width.is_finite()) => {
                return Err(Error::Config(format!("disorder width must be finite and >= 0, got {width}")));
            }
            Potential::Staggered { mu } if !mu.is_finite() => {
                return Err(Error::Config("staggered amplitude must be finite".into()));
            }
            _ => {}
        }
        if !(self.central_coupling >= 0.0 && self.central_coupling.is_finite()) {
            return Err(Error::Config(format!(
                "central-site coupling must be finite and >= 0, got {}",
                self.central_coupling
            )));
        }
        Ok(())
    }

    pub fn has_central_site(&self) -> bool {
        self.central_coupling > 0.0
    }

    /// Dimension of the single-particle Hilbert space.
    pub fn dimension(&self) -> usize {
        self.sites + usize::from(self.has_central_site())
    }
}

/// On-site energies `h_1 .. h_L` for a disorder realization.
///
/// Random potentials draw `h_i = W (2u - 1)` with `u` uniform on `[0, 1)` from
/// a ChaCha8 stream seeded with `seed`; other potentials ignore the seed.
pub fn onsite_potential(spec: &ChainSpec, seed: u64) -> Vec<f64> {
    match spec.potential {
        Potential::Zero => vec![0.0; spec.sites],
        Potential::RandomUniform { width } => {
            let mut rng = rng_from_seed(seed);
            (0..spec.sites)
                .map(|_| width * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        }
        Potential::Staggered { mu } => (1..=spec.sites).map(|i| (-mu).powi(i as i32)).collect(),
    }
}

/// Dense single-particle Hamiltonian of `spec` for disorder seed `seed`.
pub fn build_hamiltonian(spec: &ChainSpec, seed: u64) -> Result<Mat<f64>> {
    spec.validate()?;
    let l = spec.sites;
    let dim = spec.dimension();
    let mut h = Mat::<f64>::zeros(dim, dim);
    for (i, hi) in onsite_potential(spec, seed).into_iter().enumerate() {
        h[(i, i)] = hi;
    }
    let t = spec.hopping;
    for i in 0..l - 1 {
        h[(i, i + 1)] -= t;
        h[(i + 1, i)] -= t;
    }
    if spec.boundary == Boundary::Periodic {
        h[(l - 1, 0)] -= t;
        h[(0, l - 1)] -= t;
    }
    if spec.has_central_site() {
        let g = spec.central_coupling / (l as f64).sqrt();
        for i in 0..l {
            h[(i, l)] = g;
            h[(l, i)] = g;
        }
    }
    Ok(h)
}

/// Eigenpairs of a real symmetric single-particle Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    energies: Vec<f64>,
    vectors: Mat<f64>,
}

impl EigenBasis {
    /// Energies, ascending.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors as columns, in the order of [`energies`](Self::energies).
    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn state(&self, k: usize) -> SingleParticleState {
        SingleParticleState::from_real(&self.vectors.col(k).iter().copied().collect::<Vec<_>>())
            .expect("eigenvectors are normalized")
    }

    pub fn states(&self) -> Vec<SingleParticleState> {
        (0..self.len()).map(|k| self.state(k)).collect()
    }

    /// All eigenvectors as an orbital set.
    pub fn orbital_set(&self) -> Result<OrbitalSet> {
        OrbitalSet::from_real_columns(self.vectors.clone())
    }

    pub fn participation_ratios(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| 1.0 / self.vectors.col(k).iter().map(|x| x.powi(4)).sum::<f64>())
            .collect()
    }

    /// `max_k ||H v_k - E_k v_k||`.
    pub fn max_residual(&self, h: MatRef<'_, f64>) -> f64 {
        let hv = h * &self.vectors;
        let mut worst = 0.0f64;
        for k in 0..self.len() {
            let r: f64 = (0..self.len())
                .map(|i| (hv[(i, k)] - self.energies[k] * self.vectors[(i, k)]).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }
}

/// Dense diagonalization with the conventions of [`linalg::symmetric_eigen`].
pub fn diagonalize(h: MatRef<'_, f64>) -> Result<EigenBasis> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!("Hamiltonian is {}x{}", h.nrows(), h.ncols())));
    }
    let defect = linalg::symmetry_defect(h);
    if !(defect <= SYMMETRY_TOL) {
        return Err(Error::Validation(format!("Hamiltonian is not symmetric (defect {defect:e})")));
    }
    let (energies, vectors) = linalg::symmetric_eigen(h)?;
    Ok(EigenBasis { energies, vectors })
}

/// Momentum eigenstate `e^{i k j} / sqrt(L)`, `k = 2 pi m / L`, site labels `j = 1..L`.
pub fn plane_wave(sites: usize, m: usize) -> Result<SingleParticleState> {
    if sites == 0 || m >= sites {
        return Err(Error::Domain(format!("momentum index {m} outside [0, {sites})")));
    }
    let k = 2.0 * PI * m as f64 / sites as f64;
    let norm = (sites as f64).sqrt().recip();
    SingleParticleState::new(
        (1..=sites)
            .map(|j| Complex64::from_polar(norm, k * j as f64))
            .collect(),
    )
}

/// The Slater orbitals of the plane waves with momentum indices `momenta`.
pub fn plane_wave_set(sites: usize, momenta: &[usize]) -> Result<OrbitalSet> {
    let states = momenta
        .iter()
        .map(|&m| plane_wave(sites, m))
        .collect::<Result<Vec<_>>>()?;
    OrbitalSet::new(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::Bipartition;

    #[test]
    fn clean_open_chain_is_tridiagonal() {
        let h = build_hamiltonian(&ChainSpec::clean(3).with_boundary(Boundary::Open), 0).unwrap();
        let expect = [[0.0, -1.0, 0.0], [-1.0, 0.0, -1.0], [0.0, -1.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[(i, j)], expect[i][j]);
            }
        }
    }

    #[test]
    fn staggered_diagonal_starts_at_site_one() {
        let h = build_hamiltonian(&ChainSpec::staggered(4, 0.5), 0).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| h[(i, i)]).collect();
        assert_eq!(diag, vec![-0.5, 0.25, -0.125, 0.0625]);
    }

    #[test]
    fn disorder_is_seeded() {
        let spec = ChainSpec::anderson(32, 3.0);
        let a = build_hamiltonian(&spec, 11).unwrap();
        let b = build_hamiltonian(&spec, 11).unwrap();
        let c = build_hamiltonian(&spec, 12).unwrap();
        assert!((0..32).all(|i| a[(i, i)].to_bits() == b[(i, i)].to_bits()));
        assert!((0..32).any(|i| a[(i, i)] != c[(i, i)]));
        assert!((0..32).all(|i| a[(i, i)].abs() <= 3.0));
    }

    #[test]
    fn central_site_couples_to_every_chain_site() {
        let h = build_hamiltonian(&ChainSpec::central_site(4, 0.0, 2.0), 0).unwrap();
        assert_eq!(h.nrows(), 5);
        for i in 0..4 {
            assert!((h[(i, 4)] - 1.0).abs() < 1e-15);
            assert_eq!(h[(i, 4)], h[(4, i)]);
        }
        assert_eq!(h[(4, 4)], 0.0);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(ChainSpec::clean(1).validate().is_err());
        assert!(ChainSpec::anderson(8, -1.0).validate().is_err());
        assert!(ChainSpec::central_site(8, 1.0, -0.5).validate().is_err());
    }

    #[test]
    fn periodic_clean_spectrum_is_cosine_band() {
        let l = 8;
        let h = build_hamiltonian(&ChainSpec::clean(l), 0).unwrap();
        let basis = diagonalize(h.as_ref()).unwrap();
        let mut expect: Vec<f64> = (0..l).map(|m| -2.0 * (2.0 * PI * m as f64 / l as f64).cos()).collect();
        expect.sort_by(f64::total_cmp);
        for (e, x) in basis.energies().iter().zip(&expect) {
            assert!((e - x).abs() < 1e-12);
        }
        assert!(basis.max_residual(h.as_ref()) < 1e-8);
    }

    #[test]
    fn strong_disorder_localizes() {
        let l = 256;
        let h = build_hamiltonian(&ChainSpec::anderson(l, 4.0), 5).unwrap();
        let basis = diagonalize(h.as_ref()).unwrap();
        assert!(basis.participation_ratios().iter().all(|&pr| pr < l as f64 / 4.0));
        let trace: f64 = (0..l).map(|i| h[(i, i)]).sum();
        assert!((basis.energies().iter().sum::<f64>() - trace).abs() < 1e-8);
        assert!(basis.orbital_set().is_ok());
    }

    #[test]
    fn asymmetric_input_rejected() {
        let mut h = Mat::<f64>::zeros(2, 2);
        h[(0, 1)] = 1.0;
        assert!(matches!(diagonalize(h.as_ref()), Err(Error::Validation(_))));
    }

    #[test]
    fn plane_waves() {
        let l = 8;
        let p0 = plane_wave(l, 0).unwrap();
        assert!(p0.amplitudes().iter().all(|a| (a.re - 1.0 / 8f64.sqrt()).abs() < 1e-15 && a.im == 0.0));
        let p1 = plane_wave(l, 1).unwrap();
        let p2 = plane_wave(l, 2).unwrap();
        assert!(p1.inner(&p2).norm() < 1e-12);
        let half = Bipartition::half_chain(l).unwrap();
        for m in 0..l {
            assert!((plane_wave(l, m).unwrap().weight_in(&half).unwrap() - 0.5).abs() < 1e-12);
        }
        assert!(plane_wave(l, l).is_err());
    }
}
