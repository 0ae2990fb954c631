//! Exact diagonalization of the interacting spinless-fermion chain
//! `H = -t sum (c_i^dag c_{i+1} + h.c.) + sum h_i n_i + V sum n_i n_{i+1}`
//! in a fixed particle-number sector, with open boundaries.
//!
//! Configurations are bit masks with bit `i` for site `i`. Operators are
//! ordered by ascending site, so nearest-neighbour hopping on an open chain
//! carries no fermionic sign, and a subsystem made of the first sites splits
//! every basis state as `|A-part> (x) |B-part>` without a sign either.

use std::collections::BTreeMap;

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::entropy::{Bipartition, CorrelationMatrix, OrbitalSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::models::{onsite_potential, Boundary, ChainSpec};

/// Largest chain handled by the sector builder.
pub const MAX_SITES: usize = 16;
/// Chains beyond this size are slow to diagonalize densely.
pub const DESK_SCALE_SITES: usize = 14;

/// All occupation masks of `particles` fermions on `sites` sites, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    particles: usize,
    configs: Vec<u32>,
}

impl SectorBasis {
    pub fn new(sites: usize, particles: usize) -> Result<Self> {
        if sites == 0 || sites > 31 {
            return Err(Error::Config(format!("sector basis supports 1..=31 sites, got {sites}")));
        }
        if particles > sites {
            return Err(Error::Domain(format!("{particles} particles do not fit on {sites} sites")));
        }
        let limit = 1u64 << sites;
        let mut configs = Vec::new();
        if particles == 0 {
            configs.push(0);
        } else {
            // Gosper's hack walks masks of fixed popcount in increasing order.
            let mut v: u64 = (1u64 << particles) - 1;
            while v < limit {
                configs.push(v as u32);
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
            }
        }
        Ok(Self {
            sites,
            particles,
            configs,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn configs(&self) -> &[u32] {
        &self.configs
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.configs.binary_search(&mask).ok()
    }

    /// Occupations as a string, site 0 first, e.g. `"0110"`.
    pub fn mask_string(&self, mask: u32) -> String {
        (0..self.sites)
            .map(|i| if mask >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Normalized amplitude vector over a sector basis.
#[derive(Debug, Clone)]
pub struct ManyBodyState<'a> {
    basis: &'a SectorBasis,
    amplitudes: Vec<f64>,
}

impl<'a> ManyBodyState<'a> {
    pub fn new(basis: &'a SectorBasis, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("many-body state has norm {norm}")));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &SectorBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &ManyBodyState<'_>) -> Result<f64> {
        if self.basis != other.basis {
            return Err(Error::Dimension("states live in different sectors".into()));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum())
    }
}

/// Dense sector Hamiltonian of the interacting chain with nearest-neighbour
/// interaction `interaction` (`V`). The disorder matches
/// [`build_hamiltonian`](crate::models::build_hamiltonian) for the same `(spec, seed)`.
pub fn build_sector_hamiltonian(spec: &ChainSpec, interaction: f64, particles: usize, seed: u64) -> Result<Mat<f64>> {
    spec.validate()?;
    if spec.sites > MAX_SITES {
        return Err(Error::Config(format!(
            "interacting chain limited to {MAX_SITES} sites, got {}",
            spec.sites
        )));
    }
    if spec.boundary != Boundary::Open {
        return Err(Error::Config("the interacting chain uses open boundaries".into()));
    }
    if spec.has_central_site() {
        return Err(Error::Config("the interacting chain has no central site".into()));
    }
    if !interaction.is_finite() {
        return Err(Error::Config("interaction must be finite".into()));
    }
    let basis = SectorBasis::new(spec.sites, particles)?;
    let h_site = onsite_potential(spec, seed);
    let l = spec.sites;
    let dim = basis.dim();
    let mut h = Mat::<f64>::zeros(dim, dim);
    for (row, &mask) in basis.configs().iter().enumerate() {
        let occupied = |i: usize| mask >> i & 1 == 1;
        let mut diag = 0.0;
        for (i, hi) in h_site.iter().enumerate() {
            if occupied(i) {
                diag += hi;
                if i + 1 < l && occupied(i + 1) {
                    diag += interaction;
                }
            }
        }
        h[(row, row)] = diag;
        for i in 0..l - 1 {
            if occupied(i) != occupied(i + 1) {
                let moved = mask ^ (0b11 << i);
                let col = basis.index_of(moved).expect("hopping conserves particle number");
                h[(row, col)] = -spec.hopping;
            }
        }
    }
    Ok(h)
}

fn check_half_chain(basis: &SectorBasis, part: &Bipartition) -> Result<()> {
    if part.total_sites() != basis.sites() || !part.is_half_chain() {
        return Err(Error::Validation(format!(
            "expected the half-chain cut of a {}-site chain",
            basis.sites()
        )));
    }
    Ok(())
}

/// The product state with `N/2` particles on each side directly next to the cut.
pub fn cut_adjacent_product_state<'a>(basis: &'a SectorBasis, part: &Bipartition) -> Result<ManyBodyState<'a>> {
    check_half_chain(basis, part)?;
    let n = basis.particles();
    if n % 2 != 0 {
        return Err(Error::Domain(format!("particle number must be even, got {n}")));
    }
    let cut = basis.sites() / 2;
    let mask = (cut - n / 2..cut + n / 2).fold(0u32, |m, i| m | 1 << i);
    let mut amplitudes = vec![0.0; basis.dim()];
    amplitudes[basis.index_of(mask).expect("mask has the sector's popcount")] = 1.0;
    ManyBodyState::new(basis, amplitudes)
}

/// Eigenstate picked by [`select_max_overlap_eigenstate`].
#[derive(Debug, Clone)]
pub struct SelectedEigenstate<'a> {
    pub state: ManyBodyState<'a>,
    pub energy: f64,
    /// `|<phi|target>|^2`.
    pub overlap: f64,
    /// Position in the ascending spectrum.
    pub index: usize,
}

/// Overlaps within this of the maximum count as ties.
const OVERLAP_TIE_TOL: f64 = 1e-12;

/// Fully diagonalizes `h` and returns the eigenvector with the largest squared
/// overlap with `target`, preferring the lower energy on ties.
pub fn select_max_overlap_eigenstate<'a>(h: MatRef<'_, f64>, target: &ManyBodyState<'a>) -> Result<SelectedEigenstate<'a>> {
    let dim = target.basis().dim();
    if h.nrows() != dim || h.ncols() != dim {
        return Err(Error::Dimension(format!(
            "Hamiltonian is {}x{}, target has dimension {dim}",
            h.nrows(),
            h.ncols()
        )));
    }
    let (energies, vectors) = linalg::symmetric_eigen(h)?;
    let psi = target.amplitudes();
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..dim {
        let ov: f64 = (0..dim).map(|i| vectors[(i, k)] * psi[i]).sum();
        let ov = ov * ov;
        if ov > best.1 + OVERLAP_TIE_TOL {
            best = (k, ov);
        }
    }
    let (k, overlap) = best;
    let amplitudes: Vec<f64> = vectors.col(k).iter().copied().collect();
    Ok(SelectedEigenstate {
        state: ManyBodyState::new(target.basis, amplitudes)?,
        energy: energies[k],
        overlap,
        index: k,
    })
}

/// Leading block length if `part` is contiguous and touches either chain end.
fn leading_block(part: &Bipartition) -> Result<usize> {
    let a = part.a_sites();
    if !part.is_contiguous() {
        return Err(Error::Validation("subsystem must be contiguous".into()));
    }
    if a[0] == 0 {
        Ok(a.len())
    } else if *a.last().expect("non-empty") == part.total_sites() - 1 {
        // The entropy of A equals that of the leading complement.
        Ok(part.len_b())
    } else {
        Err(Error::Validation("subsystem must start or end at a chain boundary".into()))
    }
}

/// Von Neumann entanglement entropy in bits across a contiguous cut at a chain end.
///
/// Amplitudes are reshaped into one matrix per particle number of the
/// leading block; the squared singular values are the Schmidt weights.
pub fn many_body_ee(state: &ManyBodyState<'_>, part: &Bipartition) -> Result<f64> {
    let basis = state.basis();
    if part.total_sites() != basis.sites() {
        return Err(Error::Dimension(format!(
            "bipartition covers {} sites, state has {}",
            part.total_sites(),
            basis.sites()
        )));
    }
    let la = leading_block(part)?;
    let low_mask = (1u32 << la) - 1;

    // particle number in A -> (A configs, B configs, entries)
    let mut blocks: BTreeMap<u32, (Vec<u32>, Vec<u32>, Vec<(u32, u32, f64)>)> = BTreeMap::new();
    for (&mask, &amp) in basis.configs().iter().zip(state.amplitudes()) {
        let a = mask & low_mask;
        let b = mask >> la;
        let block = blocks.entry(a.count_ones()).or_default();
        block.0.push(a);
        block.1.push(b);
        block.2.push((a, b, amp));
    }

    let mut entropy = 0.0;
    for (_, (mut rows, mut cols, entries)) in blocks {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        let mut m = Mat::<f64>::zeros(rows.len(), cols.len());
        for (a, b, amp) in entries {
            let i = rows.binary_search(&a).expect("row recorded");
            let j = cols.binary_search(&b).expect("column recorded");
            m[(i, j)] = amp;
        }
        for s in linalg::singular_values(m.as_ref())? {
            let p = s * s;
            if p > 0.0 {
                entropy -= p * p.log2();
            }
        }
    }
    Ok(entropy.max(0.0))
}

/// Full one-body density matrix `D_ij = <c_j^dag c_i>` over all sites.
pub fn one_body_density(state: &ManyBodyState<'_>) -> Mat<f64> {
    let basis = state.basis();
    let l = basis.sites();
    let psi = state.amplitudes();
    let mut d = Mat::<f64>::zeros(l, l);
    for (row, &mask) in basis.configs().iter().enumerate() {
        if psi[row] == 0.0 {
            continue;
        }
        for i in (0..l).filter(|&i| mask >> i & 1 == 1) {
            d[(i, i)] += psi[row] * psi[row];
            for j in (0..l).filter(|&j| mask >> j & 1 == 0) {
                // c_j^dag c_i moves the particle from i to j; the sign counts
                // occupied sites strictly between them.
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                let between = (mask >> (lo + 1)) & ((1u32 << (hi - lo - 1)) - 1);
                let sign = if between.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                let target = mask ^ (1 << i) ^ (1 << j);
                let col = basis.index_of(target).expect("particle number conserved");
                d[(i, j)] += sign * psi[col] * psi[row];
            }
        }
    }
    d
}

/// One-body density restricted to `A`, `C^A_ij = <c_j^dag c_i>` for `i, j in A`.
pub fn one_body_correlation(state: &ManyBodyState<'_>, part: &Bipartition) -> Result<CorrelationMatrix> {
    if part.total_sites() != state.basis().sites() {
        return Err(Error::Dimension("bipartition does not match the chain".into()));
    }
    let d = one_body_density(state);
    let sites = part.a_sites();
    CorrelationMatrix::from_entries(Mat::from_fn(sites.len(), sites.len(), |a, b| {
        Complex64::new(d[(sites[a], sites[b])], 0.0)
    }))
}

/// Many-body amplitudes of the Slater determinant of real `orbitals`:
/// `psi(x_1 < ... < x_N) = det[phi_k(x_j)]`.
pub fn slater_state<'a>(orbitals: &OrbitalSet, basis: &'a SectorBasis) -> Result<ManyBodyState<'a>> {
    let u = orbitals
        .real_columns()
        .ok_or_else(|| Error::Validation("Slater states need real orbitals".into()))?;
    if orbitals.sites() != basis.sites() || orbitals.len() != basis.particles() {
        return Err(Error::Dimension(format!(
            "{} orbitals on {} sites for a sector with {} particles on {} sites",
            orbitals.len(),
            orbitals.sites(),
            basis.particles(),
            basis.sites()
        )));
    }
    let n = basis.particles();
    let amplitudes: Vec<f64> = basis
        .configs()
        .iter()
        .map(|&mask| {
            let occupied: Vec<usize> = (0..basis.sites()).filter(|&i| mask >> i & 1 == 1).collect();
            let m = Mat::<f64>::from_fn(n, n, |k, j| u[(occupied[j], k)]);
            m.determinant()
        })
        .collect();
    let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
    ManyBodyState::new(basis, amplitudes.into_iter().map(|a| a / norm).collect())
}
