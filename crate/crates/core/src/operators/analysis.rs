use std::collections::BTreeMap;

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state_space::{LinearOperator, StateSpace};

/// Above this size operator norms fall back to the Frobenius bound.
const EXACT_NORM_MAX_DIM: usize = 1024;
/// Singular values in (LOW, HIGH)·scale make a rank decision ambiguous.
const RANK_LOW: f64 = 1e-10;
const RANK_HIGH: f64 = 1e-6;
/// Relative deflation threshold of the Schur iteration.
const SCHUR_EPS: f64 = 1e-14;

/// Spectral norm, or the Frobenius upper bound for large matrices.
pub fn op_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) > EXACT_NORM_MAX_DIM {
        return m.norm();
    }
    SVD::new(m.clone(), false, false).singular_values.max()
}

fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

/// Number of singular values above `rel`·max(1, σ_max).
pub(crate) fn numerical_rank(m: &DMatrix<Complex64>, rel: f64) -> Result<usize> {
    let sv = singular_values(m);
    let scale = sv.iter().copied().fold(1.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > rel * scale).count())
}

/// Orthonormal basis of the column space, refusing ambiguous ranks.
fn column_basis(w: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if w.ncols() == 0 {
        return Ok(DMatrix::zeros(w.nrows(), 0));
    }
    let svd = SVD::new(w.clone(), true, false);
    let scale = svd.singular_values.iter().copied().fold(1.0, f64::max);
    if let Some(s) = svd.singular_values.iter().find(|&&s| s > RANK_LOW * scale && s < RANK_HIGH * scale) {
        return Err(Error::Instability(format!("rank decision is ambiguous: singular value {s:e} at scale {scale:e}")));
    }
    let u = svd.u.expect("left vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] >= RANK_HIGH * scale).collect();
    Ok(u.select_columns(keep.iter()))
}

/// Ground-space dimension from a projector trace.
#[derive(Debug, Clone, Serialize)]
pub struct GroundDim {
    pub dim: usize,
    pub trace: f64,
    pub trace_imag: f64,
    /// ‖P² − P‖ for the product projector P.
    pub idempotency_residual: f64,
    pub hilbert_dim: usize,
}

pub(crate) fn ground_dim(n: usize, p: &DMatrix<Complex64>, tol: f64) -> Result<GroundDim> {
    let tr = p.trace();
    let idem = op_norm(&(p * p - p));
    let rounded = tr.re.round();
    if (tr.re - rounded).abs() > tol || tr.im.abs() > tol || rounded < 0.0 {
        return Err(Error::Instability(format!(
            "projector trace {:.3e}{:+.3e}i is not within {tol:e} of a nonnegative integer",
            tr.re, tr.im
        )));
    }
    Ok(GroundDim { dim: rounded as usize, trace: tr.re, trace_imag: tr.im, idempotency_residual: idem, hilbert_dim: n })
}

/// Integer spectrum with multiplicities.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// energy → multiplicity
    pub levels: BTreeMap<usize, usize>,
    /// max ‖H U − E U‖ over the joint sectors.
    pub residual: f64,
    /// Largest weight of a plaquette projector leaking out of a vertex sector.
    pub leakage: f64,
}

impl Spectrum {
    pub fn multiplicity(&self, e: usize) -> usize {
        self.levels.get(&e).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.levels.values().sum()
    }

    /// Smallest positive level minus the lowest level.
    pub fn gap(&self) -> Option<usize> {
        let mut it = self.levels.keys();
        let lo = *it.next()?;
        it.next().map(|hi| hi - lo)
    }

    pub fn eigenvalues(&self) -> Vec<usize> {
        self.levels.iter().flat_map(|(&e, &m)| std::iter::repeat_n(e, m)).collect()
    }
}

/// Joint eigen-decomposition of the vertex projectors (diagonal, grouped by the
/// set of empty slots) and then the plaquette projectors (split into image and kernel).
pub(crate) fn spectrum(space: &StateSpace, bs: &[LinearOperator], _tol: f64) -> Result<Spectrum> {
    let mut groups: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
    for (i, s) in space.states().iter().enumerate() {
        groups.entry(s.slots.iter().map(|&c| c == 0).collect()).or_default().push(i);
    }
    let mut levels = BTreeMap::new();
    let mut residual: f64 = 0.0;
    let mut leakage: f64 = 0.0;
    for (mask, idx) in &groups {
        let offset = mask.iter().filter(|&&z| z).count();
        let m = idx.len();
        let blocks: Vec<DMatrix<Complex64>> = bs.iter().map(|b| b.matrix.select_rows(idx.iter()).select_columns(idx.iter())).collect();
        for b in bs {
            let cols = b.matrix.select_columns(idx.iter());
            let inside = cols.select_rows(idx.iter()).norm_squared();
            leakage = leakage.max((cols.norm_squared() - inside).max(0.0).sqrt());
        }
        let mut sectors: Vec<(DMatrix<Complex64>, usize)> = vec![(DMatrix::identity(m, m), 0)];
        for b in &blocks {
            let mut next = Vec::new();
            for (u, e) in sectors {
                let w1 = b * &u;
                let w2 = &u - &w1;
                let (q1, q2) = (column_basis(&w1)?, column_basis(&w2)?);
                if q1.ncols() + q2.ncols() != u.ncols() {
                    return Err(Error::Instability(format!(
                        "projector splitting lost dimensions: {} + {} != {}",
                        q1.ncols(),
                        q2.ncols(),
                        u.ncols()
                    )));
                }
                if q1.ncols() > 0 {
                    next.push((q1, e));
                }
                if q2.ncols() > 0 {
                    next.push((q2, e + 1));
                }
            }
            sectors = next;
        }
        let id = DMatrix::<Complex64>::identity(m, m);
        let h: DMatrix<Complex64> = blocks.iter().fold(DMatrix::zeros(m, m), |acc, b| acc + (&id - b));
        for (u, e) in sectors {
            let r = &h * &u - &u * Complex64::new(e as f64, 0.0);
            residual = residual.max(op_norm(&r));
            *levels.entry(e + offset).or_insert(0) += u.ncols();
        }
    }
    Ok(Spectrum { levels, residual, leakage })
}

/// Eigenvalues of a dense complex matrix from its Schur form.
pub fn dense_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // The deflation test is relative to the diagonal, so zero eigenvalues never
    // deflate; shift the spectrum away from the origin first.
    let shift = Complex64::new(m.norm() + 1.0, 0.0);
    let shifted = m + DMatrix::<Complex64>::identity(n, n) * shift;
    let schur = Schur::try_new(shifted, SCHUR_EPS, 1000 * n)
        .ok_or_else(|| Error::Instability("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok(t.diagonal().iter().map(|&z| z - shift).collect())
}
