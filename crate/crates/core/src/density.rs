//! Real symmetric density matrices in the embedded codeword space, plus
//! the spectral quantities built on them (von Neumann entropy, mixed-state
//! fidelity).

use crate::channel::StateVector;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Eigenvalues of a nominally PSD matrix may dip this far below zero
/// before it is treated as an internal-consistency failure; anything in
/// `[-PSD_EIG_TOL, 0)` is eigensolver noise and clips to 0.
pub const PSD_EIG_TOL: f64 = 1e-9;

/// Relative floor for eigenvalues entering a square root: rank-deficient
/// matrices come back from the eigensolver with ~1e-16·λmax noise in the
/// null space, and √(noise) summed over hundreds of directions would
/// pollute trace-norm results at the 1e-6 level. Everything below
/// `FIDELITY_REL_CUT · λmax` is treated as exact zero.
pub const FIDELITY_REL_CUT: f64 = 1e-12;

/// Iteration cap for the symmetric eigensolver; failures surface as
/// numeric anomalies instead of hanging.
const EIGEN_MAX_ITER: usize = 50_000;

pub(crate) fn symmetric_eigen(m: DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let dim = m.nrows();
    let amax = m.amax();
    match nalgebra::SymmetricEigen::try_new(m, f64::EPSILON, EIGEN_MAX_ITER) {
        Some(e) => Ok((e.eigenvalues, e.eigenvectors)),
        None => Err(Error::numeric(format!(
            "symmetric eigensolver failed to converge (dim {dim}, max |entry| {amax:.3e})"
        ))),
    }
}

pub(crate) fn symmetric_eigenvalues(m: DMatrix<f64>) -> Result<DVector<f64>> {
    // nalgebra's eigenvalue-only path has no iteration guard knob, so a
    // full decomposition is used; dimensions here are small enough.
    symmetric_eigen(m).map(|(vals, _)| vals)
}

/// Real symmetric PSD matrix with unit trace on `R^(2^N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<f64>,
}

impl DensityMatrix {
    /// Rank-one projector `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let v = DVector::from_column_slice(state.amplitudes());
        Self { m: &v * v.transpose() }
    }

    /// Equal-weight mixture of pure states; the accumulation order is the
    /// slice order, so results are bit-for-bit reproducible.
    pub fn uniform_mixture(states: &[StateVector]) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| Error::invalid("mixture of zero states".to_string()))?;
        let dim = first.dim();
        let w = 1.0 / states.len() as f64;
        let mut m = DMatrix::zeros(dim, dim);
        for st in states {
            if st.dim() != dim {
                return Err(Error::invalid(
                    "mixture states must share a dimension".to_string(),
                ));
            }
            let v = DVector::from_column_slice(st.amplitudes());
            m.syger(w, &v, &v, 1.0);
        }
        m.fill_upper_triangle_with_lower_triangle();
        Ok(Self { m })
    }

    /// Wraps an externally assembled symmetric matrix.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid("density matrix must be square".to_string()));
        }
        Ok(Self { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Equal mixture of two states of the same dimension.
    pub fn average(&self, other: &Self) -> Self {
        Self {
            m: (&self.m + &other.m) * 0.5,
        }
    }

    /// Verifies symmetry, unit trace and PSD-ness within tolerances.
    pub fn check_density(&self, trace_tol: f64) -> Result<()> {
        let asym = (&self.m - self.m.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::numeric(format!(
                "density matrix asymmetry {asym:.3e}"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > trace_tol {
            return Err(Error::numeric(format!("density matrix trace {tr}")));
        }
        let evs = symmetric_eigenvalues(self.m.clone())?;
        if let Some(lam) = evs.iter().copied().find(|&l| l < -PSD_EIG_TOL) {
            return Err(Error::numeric(format!(
                "density matrix eigenvalue {lam:.3e} below -{PSD_EIG_TOL:e}"
            )));
        }
        Ok(())
    }

    /// Von Neumann entropy `−Tr ρ log2 ρ` in bits.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let evs = symmetric_eigenvalues(self.m.clone())?;
        let mut h = 0.0;
        for &lam in evs.iter() {
            if lam < -PSD_EIG_TOL {
                return Err(Error::numeric(format!(
                    "entropy of non-PSD matrix (eigenvalue {lam:.3e})"
                )));
            }
            if lam > 0.0 {
                h -= lam * lam.log2();
            }
        }
        Ok(h)
    }

    /// Square-root fidelity `√F(ρ, σ) = ‖√ρ √σ‖₁`, evaluated as the
    /// trace of `√(√ρ σ √ρ)` through two symmetric eigendecompositions.
    pub fn sqrt_fidelity(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(
                "fidelity of states with mismatched dimensions".to_string(),
            ));
        }
        let (vals, vecs) = symmetric_eigen(self.m.clone())?;
        let mut root = DVector::zeros(vals.len());
        for (i, &lam) in vals.iter().enumerate() {
            if lam < -PSD_EIG_TOL {
                return Err(Error::numeric(format!(
                    "fidelity of non-PSD matrix (eigenvalue {lam:.3e})"
                )));
            }
            root[i] = lam.max(0.0).sqrt();
        }
        // S = V √Λ Vᵀ
        let mut scaled = vecs.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= root[j];
        }
        let s = &scaled * vecs.transpose();
        let mut inner = &s * &other.m * &s;
        // re-symmetrize: the triple product picks up ~1e-16 asymmetry
        inner = (&inner + inner.transpose()) * 0.5;
        let evs = symmetric_eigenvalues(inner)?;
        let lam_max = evs.iter().cloned().fold(0.0f64, f64::max);
        let floor = FIDELITY_REL_CUT * lam_max;
        let mut total = 0.0;
        for &lam in evs.iter() {
            if lam < -PSD_EIG_TOL {
                return Err(Error::numeric(format!(
                    "fidelity inner matrix has eigenvalue {lam:.3e}"
                )));
            }
            if lam > floor {
                total += lam.sqrt();
            }
        }
        Ok(total.min(1.0))
    }
}
