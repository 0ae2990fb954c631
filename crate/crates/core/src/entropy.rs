//! Entanglement entropy of fermionic Slater determinants.
//!
//! A Slater determinant of orthonormal orbitals is a Gaussian state, so the
//! reduced density matrix of a subsystem `A` is fixed by the restricted
//! correlation matrix `C^A_ij = <c_j^dag c_i>`, `i, j in A`. Each orbital
//! contributes a rank-one term `lambda_n phi_n phi_n^dag`, and the
//! contributions of jointly excited orbitals add. The entropy is
//! `sum_k s(nu_k)` over the eigenvalues `nu_k` of `C^A`, with `s` the binary
//! entropy. All entropies are in bits.

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;

/// Slack allowed when checking that a probability lies in `[0, 1]`.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Allowed deviation of a state's Euclidean norm from one.
pub const NORM_TOL: f64 = 1e-12;
/// Allowed deviation of the orbital Gram matrix from the identity.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Correlation-matrix eigenvalues further than this outside `[0, 1]` are
/// reported as a numerical failure instead of being clamped.
pub const OCCUPATION_REJECT_TOL: f64 = 1e-8;
/// Allowed deviation from hermiticity of a correlation matrix.
pub const HERMITICITY_TOL: f64 = 1e-12;

fn plogp_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary entropy `s(x) = -x log2 x - (1-x) log2 (1-x)` in bits, with `0 log 0 = 0`.
///
/// Inputs up to [`PROBABILITY_TOL`] outside `[0, 1]` are clamped; anything
/// further out is a domain error.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(x >= -PROBABILITY_TOL && x <= 1.0 + PROBABILITY_TOL) {
        return Err(Error::Domain(format!(
            "binary entropy needs a probability in [0, 1], got {x}"
        )));
    }
    Ok(binary_entropy_clamped(x))
}

pub(crate) fn binary_entropy_clamped(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    plogp_term(x) + plogp_term(1.0 - x)
}

/// Entropy of a Gaussian state from its occupation eigenvalues.
///
/// Eigenvalues within [`OCCUPATION_REJECT_TOL`] of `[0, 1]` are clamped.
pub fn entropy_from_occupations(occupations: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &nu in occupations {
        if !(nu >= -OCCUPATION_REJECT_TOL && nu <= 1.0 + OCCUPATION_REJECT_TOL) {
            return Err(Error::Numerical(format!(
                "occupation eigenvalue {nu:e} outside [0, 1] beyond tolerance \
                 {OCCUPATION_REJECT_TOL:e} (spectrum size {}, min {:e}, max {:e})",
                occupations.len(),
                occupations.iter().copied().fold(f64::INFINITY, f64::min),
                occupations.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            )));
        }
        total += binary_entropy_clamped(nu);
    }
    Ok(total)
}

/// A split of the lattice sites `0..total_sites` into a subsystem `A` and its complement `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bipartition {
    total_sites: usize,
    a_sites: Vec<usize>,
    in_a: Vec<bool>,
}

impl Bipartition {
    /// `a_sites` may be given in any order; they are stored ascending.
    pub fn new(total_sites: usize, a_sites: impl Into<Vec<usize>>) -> Result<Self> {
        let mut a_sites = a_sites.into();
        a_sites.sort_unstable();
        if a_sites.is_empty() || a_sites.len() >= total_sites {
            return Err(Error::Validation(format!(
                "subsystem A must be a proper non-empty subset, got {} of {} sites",
                a_sites.len(),
                total_sites
            )));
        }
        let mut in_a = vec![false; total_sites];
        for &site in &a_sites {
            if site >= total_sites {
                return Err(Error::Validation(format!(
                    "site {site} out of range for {total_sites} sites"
                )));
            }
            if in_a[site] {
                return Err(Error::Validation(format!("site {site} listed twice")));
            }
            in_a[site] = true;
        }
        Ok(Self {
            total_sites,
            a_sites,
            in_a,
        })
    }

    /// `A = {start, ..., start + len - 1}`.
    pub fn contiguous(total_sites: usize, start: usize, len: usize) -> Result<Self> {
        Self::new(total_sites, (start..start + len).collect::<Vec<_>>())
    }

    /// The left half `A = {0, ..., L/2 - 1}` of an even chain.
    pub fn half_chain(total_sites: usize) -> Result<Self> {
        if total_sites < 2 || total_sites % 2 != 0 {
            return Err(Error::Validation(format!(
                "half-chain cut needs an even number of sites >= 2, got {total_sites}"
            )));
        }
        Self::contiguous(total_sites, 0, total_sites / 2)
    }

    pub fn total_sites(&self) -> usize {
        self.total_sites
    }

    pub fn a_sites(&self) -> &[usize] {
        &self.a_sites
    }

    pub fn b_sites(&self) -> Vec<usize> {
        (0..self.total_sites).filter(|&i| !self.in_a[i]).collect()
    }

    pub fn len_a(&self) -> usize {
        self.a_sites.len()
    }

    pub fn len_b(&self) -> usize {
        self.total_sites - self.a_sites.len()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.in_a.get(site).copied().unwrap_or(false)
    }

    pub fn is_contiguous(&self) -> bool {
        self.a_sites.windows(2).all(|w| w[1] == w[0] + 1)
    }

    /// True when `A` is exactly the first half of an even chain.
    pub fn is_half_chain(&self) -> bool {
        self.total_sites % 2 == 0
            && self.len_a() == self.total_sites / 2
            && self.a_sites[0] == 0
            && self.is_contiguous()
    }

    /// The complementary bipartition (`A` and `B` swapped).
    pub fn complement(&self) -> Self {
        let b = self.b_sites();
        Self::new(self.total_sites, b).expect("complement of a proper subset is proper")
    }
}

/// A normalized single-particle wavefunction on `L` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleParticleState {
    amplitudes: Vec<Complex64>,
}

impl SingleParticleState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Validation(format!(
                "state norm {norm} deviates from 1 by more than {NORM_TOL:e}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability `lambda = sum_{j in A} |psi_j|^2` of finding the particle in `A`.
    pub fn weight_in(&self, part: &Bipartition) -> Result<f64> {
        check_len(self.len(), part)?;
        Ok(part
            .a_sites()
            .iter()
            .map(|&j| self.amplitudes[j].norm_sqr())
            .sum::<f64>()
            .min(1.0))
    }

    /// Participation ratio `1 / sum_j |psi_j|^4`: about the number of sites the state covers.
    pub fn participation_ratio(&self) -> f64 {
        1.0 / self
            .amplitudes
            .iter()
            .map(|a| a.norm_sqr().powi(2))
            .sum::<f64>()
    }
}

fn check_len(len: usize, part: &Bipartition) -> Result<()> {
    if len != part.total_sites() {
        return Err(Error::Dimension(format!(
            "state has {len} amplitudes but the bipartition covers {} sites",
            part.total_sites()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
enum Columns {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
}

/// An ordered set of orthonormal orbitals; jointly excited they form a Slater determinant.
///
/// Orbitals are stored as the columns of an `L x N` matrix. Purely real
/// orbital sets are kept in real storage so that downstream linear algebra
/// stays real.
#[derive(Debug, Clone)]
pub struct OrbitalSet {
    columns: Columns,
}

impl OrbitalSet {
    pub fn new(orbitals: Vec<SingleParticleState>) -> Result<Self> {
        let n = orbitals.len();
        let sites = orbitals.first().map(|o| o.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::Validation("an orbital set needs at least one orbital".into()));
        }
        if let Some(bad) = orbitals.iter().position(|o| o.len() != sites) {
            return Err(Error::Dimension(format!(
                "orbital {bad} has {} sites, orbital 0 has {sites}",
                orbitals[bad].len()
            )));
        }
        let all_real = orbitals
            .iter()
            .all(|o| o.amplitudes().iter().all(|a| a.im == 0.0));
        let columns = if all_real {
            Columns::Real(Mat::from_fn(sites, n, |i, k| orbitals[k].amplitudes()[i].re))
        } else {
            Columns::Complex(Mat::from_fn(sites, n, |i, k| orbitals[k].amplitudes()[i]))
        };
        Self::from_columns(columns)
    }

    /// Builds a set from the columns of a real `L x N` matrix, validating orthonormality.
    pub fn from_real_columns(columns: Mat<f64>) -> Result<Self> {
        Self::from_columns(Columns::Real(columns))
    }

    /// Builds a set from the columns of a complex `L x N` matrix, validating orthonormality.
    pub fn from_complex_columns(columns: Mat<Complex64>) -> Result<Self> {
        Self::from_columns(Columns::Complex(columns))
    }

    fn from_columns(columns: Columns) -> Result<Self> {
        let set = Self { columns };
        let (sites, n) = set.shape();
        if n == 0 || n > sites {
            return Err(Error::Validation(format!(
                "orbital count must satisfy 1 <= N <= L, got N = {n}, L = {sites}"
            )));
        }
        let defect = set.orthonormality_defect();
        if !(defect <= ORTHONORMALITY_TOL) {
            return Err(Error::Validation(format!(
                "orbitals are not orthonormal: max |<i|j> - delta_ij| = {defect:e} > {ORTHONORMALITY_TOL:e}"
            )));
        }
        Ok(set)
    }

    fn shape(&self) -> (usize, usize) {
        match &self.columns {
            Columns::Real(m) => (m.nrows(), m.ncols()),
            Columns::Complex(m) => (m.nrows(), m.ncols()),
        }
    }

    /// `max |<i|j> - delta_ij|` over all orbital pairs.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        match &self.columns {
            Columns::Real(m) => {
                let g = m.transpose() * m;
                for j in 0..n {
                    for i in 0..n {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((g[(i, j)] - target).abs());
                    }
                }
            }
            Columns::Complex(m) => {
                let g = m.adjoint() * m;
                for j in 0..n {
                    for i in 0..n {
                        let target = if i == j { 1.0 } else { 0.0 };
                        worst = worst.max((g[(i, j)] - target).norm());
                    }
                }
            }
        }
        if worst.is_nan() {
            f64::INFINITY
        } else {
            worst
        }
    }

    /// Number of orbitals `N`.
    pub fn len(&self) -> usize {
        self.shape().1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of lattice sites `L`.
    pub fn sites(&self) -> usize {
        self.shape().0
    }

    pub fn is_real(&self) -> bool {
        matches!(self.columns, Columns::Real(_))
    }

    pub fn orbital(&self, n: usize) -> SingleParticleState {
        let amplitudes = match &self.columns {
            Columns::Real(m) => m.col(n).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Columns::Complex(m) => m.col(n).iter().copied().collect(),
        };
        SingleParticleState { amplitudes }
    }

    pub fn orbitals(&self) -> Vec<SingleParticleState> {
        (0..self.len()).map(|n| self.orbital(n)).collect()
    }

    /// Columns as a complex matrix (copied when the storage is real).
    pub fn complex_columns(&self) -> Mat<Complex64> {
        match &self.columns {
            Columns::Real(m) => Mat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0)),
            Columns::Complex(m) => m.clone(),
        }
    }

    /// Real columns, if the set is stored as real.
    pub fn real_columns(&self) -> Option<MatRef<'_, f64>> {
        match &self.columns {
            Columns::Real(m) => Some(m.as_ref()),
            Columns::Complex(_) => None,
        }
    }

    /// The orbitals at `indices`, in that order. A subset of an orthonormal set
    /// is orthonormal, so no revalidation takes place.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut seen = vec![false; n];
        for &k in indices {
            if k >= n || std::mem::replace(&mut seen[k], true) {
                return Err(Error::Validation(format!(
                    "subset index {k} out of range or repeated (set has {n} orbitals)"
                )));
            }
        }
        if indices.is_empty() {
            return Err(Error::Validation("empty orbital subset".into()));
        }
        let sites = self.sites();
        let columns = match &self.columns {
            Columns::Real(m) => Columns::Real(Mat::from_fn(sites, indices.len(), |i, j| m[(i, indices[j])])),
            Columns::Complex(m) => {
                Columns::Complex(Mat::from_fn(sites, indices.len(), |i, j| m[(i, indices[j])]))
            }
        };
        Ok(Self { columns })
    }

    /// `lambda_n` for every orbital.
    pub fn weights_in(&self, part: &Bipartition) -> Result<Vec<f64>> {
        check_len(self.sites(), part)?;
        let weights = (0..self.len())
            .map(|k| {
                let w: f64 = match &self.columns {
                    Columns::Real(m) => part.a_sites().iter().map(|&i| m[(i, k)] * m[(i, k)]).sum(),
                    Columns::Complex(m) => part.a_sites().iter().map(|&i| m[(i, k)].norm_sqr()).sum(),
                };
                w.min(1.0)
            })
            .collect();
        Ok(weights)
    }

    /// Single-particle entropies `s(lambda_n)` of every orbital.
    pub fn single_particle_entropies(&self, part: &Bipartition) -> Result<Vec<f64>> {
        Ok(self
            .weights_in(part)?
            .into_iter()
            .map(binary_entropy_clamped)
            .collect())
    }
}

/// Restricted correlation matrix `C^A` of a Slater determinant.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    entries: Mat<Complex64>,
}

impl CorrelationMatrix {
    /// Wraps a square matrix, checking hermiticity to [`HERMITICITY_TOL`].
    pub fn from_entries(entries: Mat<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension(format!(
                "correlation matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let defect = linalg::hermiticity_defect(entries.as_ref());
        if !(defect <= HERMITICITY_TOL) {
            return Err(Error::Validation(format!(
                "correlation matrix is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: Mat::zeros(dim, dim),
        }
    }

    pub fn entries(&self) -> MatRef<'_, Complex64> {
        self.entries.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Expected particle number in `A`.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    /// Occupation eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.entries.as_ref())
    }

    /// Entrywise sum, the additivity of joint excitations.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{} correlation matrices",
                self.dim(),
                self.dim(),
                other.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            entries: &self.entries + &other.entries,
        })
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                worst = worst.max((self.entries[(i, j)] - other.entries[(i, j)]).norm());
            }
        }
        worst
    }
}

/// `C^A` of the Slater determinant of `orbitals`: `C^A_ij = sum_n U_ni conj(U_nj)` for `i, j in A`,
/// i.e. the sum of the rank-one single-orbital matrices `lambda_n phi_n phi_n^dag`.
pub fn correlation_matrix(orbitals: &OrbitalSet, part: &Bipartition) -> Result<CorrelationMatrix> {
    check_len(orbitals.sites(), part)?;
    let a = part.a_sites();
    let phi = match &orbitals.columns {
        Columns::Real(m) => Mat::from_fn(a.len(), m.ncols(), |i, k| Complex64::new(m[(a[i], k)], 0.0)),
        Columns::Complex(m) => Mat::from_fn(a.len(), m.ncols(), |i, k| m[(a[i], k)]),
    };
    let mut entries = &phi * phi.adjoint();
    // Symmetrize away rounding so the result is Hermitian to the last bit.
    let n = entries.nrows();
    for j in 0..n {
        entries[(j, j)] = Complex64::new(entries[(j, j)].re, 0.0);
        for i in (j + 1)..n {
            let avg = (entries[(i, j)] + entries[(j, i)].conj()) * 0.5;
            entries[(i, j)] = avg;
            entries[(j, i)] = avg.conj();
        }
    }
    Ok(CorrelationMatrix { entries })
}

/// `C^A` of a single excitation, `lambda phi phi^dag` with `phi` the normalized restriction to `A`.
pub fn single_orbital_correlation(state: &SingleParticleState, part: &Bipartition) -> Result<CorrelationMatrix> {
    check_len(state.len(), part)?;
    let a = part.a_sites();
    let amps = state.amplitudes();
    Ok(CorrelationMatrix {
        entries: Mat::from_fn(a.len(), a.len(), |i, j| amps[a[i]] * amps[a[j]].conj()),
    })
}

/// Entanglement entropy in bits from the spectrum of a correlation matrix.
pub fn entanglement_entropy(corr: &CorrelationMatrix) -> Result<f64> {
    let nu = corr.eigenvalues()?;
    entropy_from_occupations(&nu).map_err(|e| match e {
        Error::Numerical(msg) => Error::Numerical(format!(
            "{msg}; correlation matrix {0}x{0}, trace {1}",
            corr.dim(),
            corr.trace()
        )),
        other => other,
    })
}

/// Entanglement entropy `s(lambda)` of a single excitation.
pub fn single_particle_entropy(state: &SingleParticleState, part: &Bipartition) -> Result<f64> {
    Ok(binary_entropy_clamped(state.weight_in(part)?))
}

/// Entanglement entropy of the Slater determinant of `orbitals`, evaluated on
/// the smallest equivalent eigenproblem.
///
/// The nonzero spectrum of `C^A = Phi_A Phi_A^dag` equals that of the `N x N`
/// overlap matrix `Phi_A^dag Phi_A`, and the entropy of `A` equals that of `B`
/// for a pure state, so the dimension solved is `min(N, L_A, L_B)`.
pub fn slater_entropy(orbitals: &OrbitalSet, part: &Bipartition) -> Result<f64> {
    check_len(orbitals.sites(), part)?;
    let n = orbitals.len();
    let b_sites;
    let rows: &[usize] = if part.len_a() <= part.len_b() {
        part.a_sites()
    } else {
        b_sites = part.b_sites();
        &b_sites
    };
    let use_gram = n <= rows.len();
    let occupations = match &orbitals.columns {
        Columns::Real(m) => {
            let phi = Mat::from_fn(rows.len(), n, |i, k| m[(rows[i], k)]);
            let g = if use_gram { phi.transpose() * &phi } else { &phi * phi.transpose() };
            linalg::symmetric_eigenvalues(g.as_ref())?
        }
        Columns::Complex(m) => {
            let phi = Mat::from_fn(rows.len(), n, |i, k| m[(rows[i], k)]);
            let g = if use_gram { phi.adjoint() * &phi } else { &phi * phi.adjoint() };
            linalg::hermitian_eigenvalues(g.as_ref())?
        }
    };
    entropy_from_occupations(&occupations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn binary_entropy_reference_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.3).unwrap() - 0.881_290_899_230_692_6).abs() < 1e-12);
    }

    #[test]
    fn binary_entropy_domain() {
        assert!(binary_entropy(-1e-13).is_ok());
        assert!(matches!(binary_entropy(-1e-6), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(1.1), Err(Error::Domain(_))));
        assert!(matches!(binary_entropy(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn binary_entropy_is_symmetric_on_dyadic_grid() {
        for k in 0..=4096 {
            let x = k as f64 / 4096.0;
            assert_eq!(binary_entropy(x).unwrap(), binary_entropy(1.0 - x).unwrap());
        }
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(4, vec![0, 0]).is_err());
        assert!(Bipartition::new(4, vec![4]).is_err());
        assert!(Bipartition::new(4, Vec::new()).is_err());
        assert!(Bipartition::new(4, vec![0, 1, 2, 3]).is_err());
        let p = Bipartition::new(6, vec![3, 1]).unwrap();
        assert_eq!(p.a_sites(), &[1, 3]);
        assert_eq!(p.b_sites(), vec![0, 2, 4, 5]);
        assert!(!p.is_contiguous());
        let h = Bipartition::half_chain(8).unwrap();
        assert!(h.is_half_chain());
        assert!(Bipartition::half_chain(7).is_err());
    }

    #[test]
    fn state_norm_is_enforced() {
        assert!(SingleParticleState::new(vec![c(1.0), c(0.1)]).is_err());
        let s = SingleParticleState::normalized(vec![c(3.0), c(4.0)]).unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
        assert!(SingleParticleState::normalized(vec![c(0.0)]).is_err());
    }

    #[test]
    fn single_particle_entropy_examples() {
        let part = Bipartition::half_chain(4).unwrap();
        let inside = SingleParticleState::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(single_particle_entropy(&inside, &part).unwrap(), 0.0);
        let flat = SingleParticleState::from_real(&[0.5; 4]).unwrap();
        assert!((single_particle_entropy(&flat, &part).unwrap() - 1.0).abs() < 1e-12);
        let split = SingleParticleState::from_real(&[0.3f64.sqrt(), 0.0, -(0.7f64.sqrt()), 0.0]).unwrap();
        assert!((single_particle_entropy(&split, &part).unwrap() - 0.881_290_899_230_692_6).abs() < 1e-12);
    }

    #[test]
    fn orbital_set_rejects_non_orthonormal() {
        let a = SingleParticleState::from_real(&[1.0, 0.0]).unwrap();
        let b = SingleParticleState::normalized(vec![c(1.0), c(1.0)]).unwrap();
        assert!(matches!(OrbitalSet::new(vec![a.clone(), b]), Err(Error::Validation(_))));
        let short = SingleParticleState::from_real(&[1.0]).unwrap();
        assert!(matches!(OrbitalSet::new(vec![a, short]), Err(Error::Dimension(_))));
        assert!(OrbitalSet::new(Vec::new()).is_err());
    }

    #[test]
    fn orbital_fully_inside_a_is_rank_one_with_unit_eigenvalue() {
        let part = Bipartition::half_chain(4).unwrap();
        let s = SingleParticleState::normalized(vec![c(1.0), c(-1.0), c(0.0), c(0.0)]).unwrap();
        let set = OrbitalSet::new(vec![s]).unwrap();
        let nu = correlation_matrix(&set, &part).unwrap().eigenvalues().unwrap();
        assert!(nu[0].abs() < 1e-14);
        assert!((nu[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_state_gives_diagonal_occupations() {
        let l = 6;
        let part = Bipartition::contiguous(l, 0, 3).unwrap();
        let occupied = [0usize, 2, 4];
        let states = occupied
            .iter()
            .map(|&k| {
                let mut v = vec![0.0; l];
                v[k] = 1.0;
                SingleParticleState::from_real(&v).unwrap()
            })
            .collect();
        let set = OrbitalSet::new(states).unwrap();
        let corr = correlation_matrix(&set, &part).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j && (i == 0 || i == 2) { 1.0 } else { 0.0 };
                assert_eq!(corr.entries()[(i, j)], c(expect));
            }
        }
        assert_eq!(entanglement_entropy(&corr).unwrap(), 0.0);
        assert_eq!(slater_entropy(&set, &part).unwrap(), 0.0);
    }

    #[test]
    fn entanglement_entropy_simple_spectra() {
        assert_eq!(entanglement_entropy(&CorrelationMatrix::zeros(3)).unwrap(), 0.0);
        let half = Mat::from_fn(2, 2, |i, j| if i == j { c(0.5) } else { c(0.0) });
        let corr = CorrelationMatrix::from_entries(half).unwrap();
        assert!((entanglement_entropy(&corr).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn out_of_range_spectrum_is_rejected() {
        let bad = Mat::from_fn(1, 1, |_, _| c(1.5));
        let corr = CorrelationMatrix::from_entries(bad).unwrap();
        assert!(matches!(entanglement_entropy(&corr), Err(Error::Numerical(_))));
        let tiny = Mat::from_fn(1, 1, |_, _| c(1.0 + 1e-13));
        let corr = CorrelationMatrix::from_entries(tiny).unwrap();
        assert_eq!(entanglement_entropy(&corr).unwrap(), 0.0);
    }

    #[test]
    fn non_hermitian_entries_rejected() {
        let m = Mat::from_fn(2, 2, |i, j| if i < j { c(0.1) } else { c(0.0) });
        assert!(CorrelationMatrix::from_entries(m).is_err());
    }

    #[test]
    fn bell_pair_is_a_product_state() {
        // sqrt(0.3)|a> - sqrt(0.7)|b> and sqrt(0.7)|a> + sqrt(0.3)|b>, a in A, b in B.
        let part = Bipartition::new(2, vec![0]).unwrap();
        let s1 = SingleParticleState::from_real(&[0.3f64.sqrt(), -(0.7f64.sqrt())]).unwrap();
        let s2 = SingleParticleState::from_real(&[0.7f64.sqrt(), 0.3f64.sqrt()]).unwrap();
        let set = OrbitalSet::new(vec![s1, s2]).unwrap();
        let ee = entanglement_entropy(&correlation_matrix(&set, &part).unwrap()).unwrap();
        assert!(ee < 1e-12, "{ee}");
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let set = OrbitalSet::new(vec![SingleParticleState::from_real(&[1.0, 0.0]).unwrap()]).unwrap();
        let part = Bipartition::half_chain(4).unwrap();
        assert!(matches!(correlation_matrix(&set, &part), Err(Error::Dimension(_))));
    }

    #[test]
    fn subset_checks_indices() {
        let states = (0..3)
            .map(|k| {
                let mut v = vec![0.0; 3];
                v[k] = 1.0;
                SingleParticleState::from_real(&v).unwrap()
            })
            .collect();
        let set = OrbitalSet::new(states).unwrap();
        assert!(set.subset(&[0, 0]).is_err());
        assert!(set.subset(&[3]).is_err());
        let sub = set.subset(&[2, 0]).unwrap();
        assert_eq!(sub.orbital(0).amplitudes()[2], c(1.0));
    }
}
