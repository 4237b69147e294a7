use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{Parity, SpinChainSpec};
use crate::error::{Error, Result};

/// Memory guard for the 2^N × 2^N matrices.
pub const MAX_DENSE_SITES: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSpectrum {
    /// All 2^N eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
    pub ground_energy: f64,
    pub ground_parity: Parity,
    /// Ground state in the original σᶻ basis, bit i of the index is site i
    /// (bit 0 = spin up).
    pub ground_vector: Vec<f64>,
}

fn guard(spec: &SpinChainSpec) -> Result<usize> {
    let n = spec.n_sites();
    if n > MAX_DENSE_SITES {
        return Err(Error::InvalidInput(format!(
            "dense diagonalization is limited to {MAX_DENSE_SITES} sites, got {n}"
        )));
    }
    Ok(n)
}

/// H = Σ (Δᵢ/2) σˣᵢ + (K̃/4) Σ σᶻᵢσᶻᵢ₊₁ assembled from Kronecker products of
/// 2×2 Pauli matrices, site 0 being the least significant factor.
pub fn dense_hamiltonian_pauli(spec: &SpinChainSpec) -> Result<DMatrix<f64>> {
    let n = guard(spec)?;
    let id = DMatrix::<f64>::identity(2, 2);
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let embed = |ops: &[(usize, &DMatrix<f64>)]| -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::identity(1, 1);
        for site in (0..n).rev() {
            let factor = ops
                .iter()
                .find(|(s, _)| *s == site)
                .map(|(_, m)| *m)
                .unwrap_or(&id);
            out = out.kronecker(factor);
        }
        out
    };
    let dim = 1usize << n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (i, d) in spec.splittings.iter().enumerate() {
        h += 0.5 * d * embed(&[(i, &sx)]);
    }
    for i in 0..n.saturating_sub(1) {
        h += 0.25 * spec.coupling * embed(&[(i, &sz), (i + 1, &sz)]);
    }
    Ok(h)
}

fn walsh_hadamard(v: &mut [f64]) {
    let mut len = 1;
    while len < v.len() {
        for start in (0..v.len()).step_by(2 * len) {
            for k in start..start + len {
                let (a, b) = (v[k], v[k + len]);
                v[k] = a + b;
                v[k + len] = a - b;
            }
        }
        len *= 2;
    }
    let scale = (v.len() as f64).sqrt();
    v.iter_mut().for_each(|x| *x /= scale);
}

/// Exact diagonalization, one parity block at a time, in the rotated basis
/// H = Σ hᵢσᶻᵢ + J Σ σˣᵢσˣᵢ₊₁ where bit i set means site i is up.
pub fn dense_solve(spec: &SpinChainSpec) -> Result<DenseSpectrum> {
    let n = guard(spec)?;
    let h = spec.fields();
    let j = spec.bond();
    let dim = 1usize << n;
    let mut blocks: Vec<(Parity, Vec<usize>)> =
        vec![(Parity::Even, Vec::new()), (Parity::Odd, Vec::new())];
    let mut slot = vec![0usize; dim];
    for (s, pos) in slot.iter_mut().enumerate() {
        let b = (s.count_ones() % 2) as usize;
        *pos = blocks[b].1.len();
        blocks[b].1.push(s);
    }
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut ground = (f64::INFINITY, Parity::Even, Vec::new());
    for (parity, states) in &blocks {
        if states.is_empty() {
            continue;
        }
        let m = states.len();
        let mut mat = DMatrix::<f64>::zeros(m, m);
        for (r, &s) in states.iter().enumerate() {
            mat[(r, r)] = (0..n)
                .map(|i| if s >> i & 1 == 1 { h[i] } else { -h[i] })
                .sum();
            for i in 0..n.saturating_sub(1) {
                let t = s ^ (3 << i);
                mat[(r, slot[t])] += j;
            }
        }
        let eig = SymmetricEigen::new(mat);
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diagonalization {
                condition: f64::INFINITY,
            });
        }
        let (kmin, emin) =
            eig.eigenvalues
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (k, v)| if v < acc.1 { (k, v) } else { acc },
                );
        if emin < ground.0 {
            let mut full = vec![0.0; dim];
            for (r, &s) in states.iter().enumerate() {
                full[s] = eig.eigenvectors[(r, kmin)];
            }
            ground = (emin, *parity, full);
        }
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        match parity {
            Parity::Even => even = vals,
            Parity::Odd => odd = vals,
        }
    }
    // back to the original basis: per site, flip then Hadamard
    let (ground_energy, ground_parity, rotated) = ground;
    let mut ground_vector: Vec<f64> = (0..dim).map(|s| rotated[s ^ (dim - 1)]).collect();
    walsh_hadamard(&mut ground_vector);
    let mut eigenvalues: Vec<f64> = even.iter().chain(&odd).copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    Ok(DenseSpectrum {
        eigenvalues,
        even,
        odd,
        ground_energy,
        ground_parity,
        ground_vector,
    })
}
