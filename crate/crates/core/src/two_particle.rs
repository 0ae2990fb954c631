//! Closed forms for two jointly excited orbitals and the overlap-matrix
//! method for plane-wave Slater determinants.
//!
//! Two orthonormal orbitals with weights `lambda_1 >= lambda_2` in `A` and
//! restricted overlap `sigma = |phi_1 . phi_2|^2` have correlation-matrix
//! eigenvalues `nu_1 = lambda_1 + delta/2`, `nu_2 = lambda_2 - delta/2` with
//! `delta = sqrt((lambda_1 - lambda_2)^2 + 4 lambda_1 lambda_2 sigma) - (lambda_1 - lambda_2)`.
//! `delta > 0` whenever `sigma > 0`, and concavity of the binary entropy
//! then makes the joint entropy strictly smaller than the sum of the single
//! entropies.

use std::f64::consts::PI;

use faer::{Mat, MatRef};

use crate::entropy::{binary_entropy_clamped, entropy_from_occupations, Bipartition, SingleParticleState};
use crate::error::{Error, Result};
use crate::linalg;

/// Largest `|<s1|s2>|` accepted as orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Weights this close to 0 or 1 leave the restricted direction undefined;
/// the overlap is then taken as zero.
const DEGENERATE_WEIGHT: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAnalysis {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Squared restricted overlap `|phi_1 . phi_2|^2`.
    pub sigma: f64,
    pub delta: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// `s(nu_1) + s(nu_2)`.
    pub ee_joint: f64,
    /// `s(lambda_1) + s(lambda_2)`.
    pub ee_sum: f64,
}

/// Modified occupations for weights `(l1, l2)` and squared overlap `sigma`,
/// returned in the caller's order.
pub fn modified_occupations(l1: f64, l2: f64, sigma: f64) -> (f64, f64, f64) {
    let swap = l1 < l2;
    let (hi, lo) = if swap { (l2, l1) } else { (l1, l2) };
    let gap = hi - lo;
    let delta = ((gap * gap + 4.0 * hi * lo * sigma).sqrt() - gap).max(0.0);
    let (nu_hi, nu_lo) = (hi + delta / 2.0, lo - delta / 2.0);
    if swap {
        (nu_lo, nu_hi, delta)
    } else {
        (nu_hi, nu_lo, delta)
    }
}

/// Closed-form two-particle analysis of the pair `(s1, s2)` across `part`.
pub fn analyze_pair(s1: &SingleParticleState, s2: &SingleParticleState, part: &Bipartition) -> Result<PairAnalysis> {
    if s1.len() != s2.len() {
        return Err(Error::Dimension(format!("states have {} and {} sites", s1.len(), s2.len())));
    }
    let overlap = s1.inner(s2).norm();
    if !(overlap <= ORTHOGONALITY_TOL) {
        return Err(Error::Validation(format!(
            "pair is not orthogonal: |<1|2>| = {overlap:e}"
        )));
    }
    let lambda1 = s1.weight_in(part)?;
    let lambda2 = s2.weight_in(part)?;

    let degenerate = |l: f64| l < DEGENERATE_WEIGHT || l > 1.0 - DEGENERATE_WEIGHT;
    let sigma = if degenerate(lambda1) || degenerate(lambda2) {
        0.0
    } else {
        let (a1, a2) = (s1.amplitudes(), s2.amplitudes());
        let restricted: num_complex::Complex64 =
            part.a_sites().iter().map(|&j| a1[j].conj() * a2[j]).sum();
        (restricted.norm_sqr() / (lambda1 * lambda2)).clamp(0.0, 1.0)
    };

    let (nu1, nu2, delta) = modified_occupations(lambda1, lambda2, sigma);
    Ok(PairAnalysis {
        lambda1,
        lambda2,
        sigma,
        delta,
        nu1,
        nu2,
        ee_joint: binary_entropy_clamped(nu1) + binary_entropy_clamped(nu2),
        ee_sum: binary_entropy_clamped(lambda1) + binary_entropy_clamped(lambda2),
    })
}

/// System size for the tight-binding closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainLength {
    Finite(usize),
    Infinite,
}

/// Restricted overlap amplitude `|phi_1 . phi_2|` of two plane waves with
/// momentum difference `2 pi n / L` on the half chain.
///
/// Finite `L` uses the sine ratio `(1/L_A) |sin(L_A dk / 2) / sin(dk / 2)|`
/// with `L_A = L/2`; the infinite chain gives `2 |sin(n pi / 2)| / (n pi)`,
/// which vanishes for even `n`.
pub fn tb_sigma(n: usize, length: ChainLength) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("momentum separation n must be >= 1".into()));
    }
    match length {
        ChainLength::Infinite => {
            if n % 2 == 0 {
                Ok(0.0)
            } else {
                Ok(2.0 / (n as f64 * PI))
            }
        }
        ChainLength::Finite(l) => {
            if l % 2 != 0 || n >= l {
                return Err(Error::Domain(format!("need even L > n, got L = {l}, n = {n}")));
            }
            let la = (l / 2) as f64;
            let dk = 2.0 * PI * n as f64 / l as f64;
            Ok(sine_ratio(la, dk).abs())
        }
    }
}

/// `(1/L_A) sin(L_A x / 2) / sin(x / 2)`, with the removable singularity at `x = 0` set to 1.
fn sine_ratio(la: f64, x: f64) -> f64 {
    let den = (x / 2.0).sin();
    if den.abs() < 1e-300 {
        1.0
    } else {
        (la * x / 2.0).sin() / (la * den)
    }
}

/// Half-chain entanglement entropy of two plane waves separated by `n`
/// momentum quanta in the infinite chain: `s(1/2 + sigma/2) + s(1/2 - sigma/2)`.
pub fn tb_two_particle_ee(n: usize) -> Result<f64> {
    let sigma = tb_sigma(n, ChainLength::Infinite)?;
    Ok(binary_entropy_clamped(0.5 + sigma / 2.0) + binary_entropy_clamped(0.5 - sigma / 2.0))
}

/// Large-`n` expansion `2 - (2 / (n pi sqrt(ln 2)))^2` for odd `n`; even `n` is exactly 2.
pub fn tb_two_particle_ee_asymptotic(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("momentum separation n must be >= 1".into()));
    }
    if n % 2 == 0 {
        return Ok(2.0);
    }
    let x = 2.0 / (n as f64 * PI * std::f64::consts::LN_2.sqrt());
    Ok(2.0 - x * x)
}

/// Real symmetric matrix of restricted plane-wave overlaps with unit diagonal.
#[derive(Debug, Clone)]
pub struct OverlapMatrix {
    entries: Mat<f64>,
}

impl OverlapMatrix {
    pub fn entries(&self) -> MatRef<'_, f64> {
        self.entries.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// `O_ml = (1/L_A) sin(L_A (k_m - k_l) / 2) / sin((k_m - k_l) / 2)` for momenta
/// `k = 2 pi m / L` and a contiguous subsystem of `L_A` sites.
///
/// The phase `e^{i (k_m - k_l) c}` fixed by the subsystem's position is a
/// diagonal similarity and is dropped.
pub fn overlap_matrix(momenta: &[usize], sites: usize, part: &Bipartition) -> Result<OverlapMatrix> {
    if part.total_sites() != sites {
        return Err(Error::Dimension(format!(
            "bipartition covers {} sites, chain has {sites}",
            part.total_sites()
        )));
    }
    if !part.is_contiguous() {
        return Err(Error::Validation("overlap matrix needs a contiguous subsystem".into()));
    }
    let mut reduced: Vec<usize> = momenta.iter().map(|&m| m % sites).collect();
    reduced.sort_unstable();
    if reduced.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Validation(format!("duplicate momenta in {momenta:?}")));
    }
    let la = part.len_a() as f64;
    let n = momenta.len();
    let entries = Mat::from_fn(n, n, |m, l| {
        if m == l {
            1.0
        } else {
            let dm = momenta[m] as f64 - momenta[l] as f64;
            sine_ratio(la, 2.0 * PI * dm / sites as f64)
        }
    });
    Ok(OverlapMatrix { entries })
}

/// Entanglement entropy of the plane-wave Slater determinant described by `overlaps`.
///
/// The occupations of `C^A` are `(L_A / L)` times the eigenvalues of the overlap matrix.
pub fn ee_from_overlap_matrix(overlaps: &OverlapMatrix, len_a: usize, sites: usize) -> Result<f64> {
    if len_a == 0 || len_a >= sites {
        return Err(Error::Domain(format!("need 0 < L_A < L, got L_A = {len_a}, L = {sites}")));
    }
    let eig = linalg::symmetric_eigenvalues(overlaps.entries())?;
    let scale = len_a as f64 / sites as f64;
    let upper = (1.0 / scale) * (1.0 + 1e-8);
    if let Some(bad) = eig.iter().find(|&&e| !(e >= -1e-8 && e <= upper)) {
        return Err(Error::Numerical(format!(
            "overlap-matrix eigenvalue {bad:e} outside [0, L/L_A] = [0, {}]",
            1.0 / scale
        )));
    }
    let occupations: Vec<f64> = eig.iter().map(|e| (e * scale).clamp(0.0, 1.0)).collect();
    entropy_from_occupations(&occupations)
}
