//! Symmetric tridiagonal eigensolvers: implicit QL for full decompositions,
//! Sturm bisection and inverse iteration for selected eigenpairs.
//!
//! A matrix is given by its diagonal `d` (length n) and off-diagonal `e`
//! (length n − 1), with `e[i]` coupling rows i and i + 1.

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenpairs sorted ascending. `vectors[k]` is the unit eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn check(d: &[f64], e: &[f64]) -> Result<()> {
    if d.is_empty() || e.len() + 1 != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len().saturating_sub(1),
            got: e.len(),
        });
    }
    if d.iter().chain(e).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "tridiagonal matrix has non-finite entries".into(),
        ));
    }
    Ok(())
}

/// Full eigendecomposition by the implicit QL algorithm with Wilkinson-type shifts.
pub fn eigen_all(d: &[f64], e: &[f64]) -> Result<TridiagonalEigen> {
    ql(d, e, true)
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    Ok(ql(d, e, false)?.values)
}

fn ql(d: &[f64], e: &[f64], vectors: bool) -> Result<TridiagonalEigen> {
    check(d, e)?;
    let n = d.len();
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    // column-major: z[i * n .. (i + 1) * n] is eigenvector i
    let mut z = vec![0.0; if vectors { n * n } else { 0 }];
    if vectors {
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
    }
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                let scale = (d[l].abs() + d[l + 1].abs()).max(f64::MIN_POSITIVE);
                return Err(Error::Diagonalization {
                    condition: e[l].abs() / scale,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if !vectors {
                    continue;
                }
                let (left, right) = z.split_at_mut((i + 1) * n);
                let zi = &mut left[i * n..];
                let zj = &mut right[..n];
                for (a, bb) in zi.iter_mut().zip(zj.iter_mut()) {
                    let fz = *bb;
                    *bb = s * *a + c * fz;
                    *a = c * *a - s * fz;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok(TridiagonalEigen {
        values: order.iter().map(|&k| d[k]).collect(),
        vectors: if vectors {
            order
                .iter()
                .map(|&k| z[k * n..(k + 1) * n].to_vec())
                .collect()
        } else {
            Vec::new()
        },
    })
}

/// Number of eigenvalues strictly below `x`.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = d[0] - x;
    for i in 0..d.len() {
        if i > 0 {
            q = d[i] - x - e[i - 1] * e[i - 1] / q;
        }
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..d.len() {
        let mut r = 0.0;
        if i > 0 {
            r += e[i - 1].abs();
        }
        if i < e.len() {
            r += e[i].abs();
        }
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// The k-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn eigenvalue_by_index(d: &[f64], e: &[f64], k: usize) -> Result<f64> {
    check(d, e)?;
    if k >= d.len() {
        return Err(Error::InvalidInput(format!(
            "eigenvalue index {k} out of range"
        )));
    }
    let (mut lo, mut hi) = gershgorin(d, e);
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves (T − σI) x = b by Gaussian elimination with partial pivoting.
fn shifted_solve(d: &[f64], e: &[f64], shift: f64, rhs: &mut [f64], tiny: f64) {
    let n = d.len();
    if n == 1 {
        let p = d[0] - shift;
        rhs[0] /= if p.abs() < tiny { tiny } else { p };
        return;
    }
    // upper factor rows: (u0, u1, u2) at columns i, i+1, i+2
    let mut u = vec![[0.0f64; 3]; n];
    let (mut a0, mut a1) = (d[0] - shift, e[0]);
    for i in 0..n - 1 {
        let sub = e[i];
        let b0 = d[i + 1] - shift;
        let b1 = if i + 1 < n - 1 { e[i + 1] } else { 0.0 };
        if a0.abs() >= sub.abs() {
            let p = if a0.abs() < tiny { tiny } else { a0 };
            let m = sub / p;
            u[i] = [p, a1, 0.0];
            rhs[i + 1] -= m * rhs[i];
            a0 = b0 - m * a1;
            a1 = b1;
        } else {
            let m = a0 / sub;
            u[i] = [sub, b0, b1];
            rhs.swap(i, i + 1);
            rhs[i + 1] -= m * rhs[i];
            a0 = a1 - m * b0;
            a1 = -m * b1;
        }
    }
    u[n - 1] = [if a0.abs() < tiny { tiny } else { a0 }, 0.0, 0.0];
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= u[i][1] * rhs[i + 1];
        }
        if i + 2 < n {
            v -= u[i][2] * rhs[i + 2];
        }
        rhs[i] = v / u[i][0];
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Eigenvectors for eigenvalues given in ascending order. Vectors whose
/// eigenvalues lie within `cluster_tol` of each other are kept orthogonal.
pub fn inverse_iteration(
    d: &[f64],
    e: &[f64],
    values: &[f64],
    cluster_tol: f64,
) -> Result<Vec<Vec<f64>>> {
    check(d, e)?;
    let n = d.len();
    let (glo, ghi) = gershgorin(d, e);
    let scale = glo.abs().max(ghi.abs()).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    for (j, &lambda) in values.iter().enumerate() {
        if j > 0 && lambda - values[j - 1] > cluster_tol {
            cluster_start = j;
        }
        // deterministic, non-degenerate starting vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| {
                1.0 + 0.5 * ((i as f64 + 1.0) * 0.754_877_666 + j as f64 * 0.569_840_29).fract()
            })
            .collect();
        for _ in 0..4 {
            shifted_solve(d, e, lambda, &mut x, tiny);
            for prev in &out[cluster_start..j] {
                let dot: f64 = prev.iter().zip(&x).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
            }
            normalize(&mut x);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diagonalization {
                condition: f64::INFINITY,
            });
        }
        out.push(x);
    }
    Ok(out)
}
