//! Orthogonalization of the linear model through the thin SVD.
//!
//! With `X = U diag(d) Wᵀ` and `Z = U diag(d)`, the model `y = Xβ + ε`
//! becomes `y = Zα + ε` for `α = Wᵀβ`, and the least-squares solution
//! decouples into independent per-component estimates `α̂ᵢ = uᵢᵀy / dᵢ` with
//! `α̂ᵢ ~ N(αᵢ, σ²/dᵢ²)`. Every shrinkage estimator in this crate operates on
//! these coordinates and maps back through `β̃ = W α̃`.
//!
//! Numerical-rank policy: singular values below `rank_tol · d₁` are
//! truncated (they would otherwise produce exploding `α̂ᵢ`), so all retained
//! `dᵢ` are strictly positive. Factor signs are normalized — the first
//! nonzero entry of each `uᵢ` is made nonnegative, flipping `wᵢ` to match —
//! so serialized factors are reproducible across platforms; shrinkage
//! results are invariant to these sign choices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A regression problem: design matrix and response.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    /// Design matrix, `n × p`.
    pub x: DMatrix<f64>,
    /// Response vector, length `n`.
    pub y: DVector<f64>,
}

impl RegressionData {
    /// Validate and construct: `n ≥ 2`, `p ≥ 1`, matching lengths, all finite.
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 observations, got {}",
                x.nrows()
            )));
        }
        if x.ncols() < 1 {
            return Err(Error::InvalidInput("need at least one covariate".into()));
        }
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "response length {} does not match {} rows of X",
                y.len(),
                x.nrows()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "design matrix contains non-finite entries".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "response contains non-finite entries".into(),
            ));
        }
        Ok(RegressionData { x, y })
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of covariates.
    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Thin SVD of a design matrix, truncated to numerical rank `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignDecomposition {
    /// Left singular vectors, `n × m`, orthonormal columns.
    pub u: DMatrix<f64>,
    /// Singular values, length `m`, strictly positive, descending.
    pub d: DVector<f64>,
    /// Right singular vectors, `p × m`, orthonormal columns.
    pub w: DMatrix<f64>,
    /// Relative rank tolerance actually applied.
    pub rank_tol: f64,
}

impl DesignDecomposition {
    /// Effective rank (number of retained components).
    pub fn m(&self) -> usize {
        self.d.len()
    }

    /// Number of observations of the decomposed design.
    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    /// Number of covariates of the decomposed design.
    pub fn p(&self) -> usize {
        self.w.nrows()
    }

    /// Reassemble `X ≈ U diag(d) Wᵀ`.
    pub fn reconstruct_x(&self) -> DMatrix<f64> {
        let mut ud = self.u.clone();
        for (j, dj) in self.d.iter().enumerate() {
            ud.column_mut(j).scale_mut(*dj);
        }
        &ud * self.w.transpose()
    }
}

/// Least-squares coefficients in the orthogonalized basis, together with the
/// singular values needed to interpret them (`α̂ᵢ ~ N(αᵢ, σ²/dᵢ²)`).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoCoefficients {
    /// `α̂ᵢ = uᵢᵀy / dᵢ`, length `m`.
    pub alpha_hat: DVector<f64>,
    /// Copy of the singular values, length `m`.
    pub d: DVector<f64>,
}

impl OrthoCoefficients {
    /// Number of components.
    pub fn m(&self) -> usize {
        self.alpha_hat.len()
    }
}

/// Default relative rank tolerance, `1e−12 · max(n, p)`.
pub fn default_rank_tol(n: usize, p: usize) -> f64 {
    1e-12 * n.max(p) as f64
}

/// Thin SVD of the design in `data`, truncating singular values below
/// `rank_tol · d₁` (`rank_tol = None` uses [`default_rank_tol`]).
pub fn decompose(data: &RegressionData, rank_tol: Option<f64>) -> Result<DesignDecomposition> {
    decompose_design(&data.x, rank_tol)
}

/// [`decompose`] for a bare design matrix.
pub fn decompose_design(x: &DMatrix<f64>, rank_tol: Option<f64>) -> Result<DesignDecomposition> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(Error::InvalidInput("empty design matrix".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(
            "design matrix contains non-finite entries".into(),
        ));
    }
    let rank_tol = match rank_tol {
        Some(t) if t >= 0.0 => t,
        Some(t) => {
            return Err(Error::InvalidInput(format!(
                "rank tolerance must be >= 0, got {t}"
            )))
        }
        None => default_rank_tol(x.nrows(), x.ncols()),
    };

    let svd = x.clone().svd(true, true);
    let u_full = svd.u.expect("SVD with compute_u");
    let vt_full = svd.v_t.expect("SVD with compute_v");
    let sv = svd.singular_values;

    // Order components by singular value, descending (defensive: do not rely
    // on the factorization's internal ordering).
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let d1 = sv[order[0]];
    if !(d1 > 0.0) {
        return Err(Error::Degenerate(
            "design matrix is numerically zero (no positive singular values)".into(),
        ));
    }
    let threshold = rank_tol * d1;
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&j| sv[j] > threshold && sv[j] > 0.0)
        .collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(
            "all singular values fall below the rank tolerance".into(),
        ));
    }

    let n = x.nrows();
    let p = x.ncols();
    let m = kept.len();
    let mut u = DMatrix::<f64>::zeros(n, m);
    let mut w = DMatrix::<f64>::zeros(p, m);
    let mut d = DVector::<f64>::zeros(m);
    for (i, &j) in kept.iter().enumerate() {
        d[i] = sv[j];
        u.column_mut(i).copy_from(&u_full.column(j));
        w.column_mut(i).copy_from(&vt_full.row(j).transpose());
        // Sign convention: first entry of uᵢ with non-negligible magnitude
        // made nonnegative; wᵢ flipped in tandem so U diag(d) Wᵀ is unchanged.
        let lead = u
            .column(i)
            .iter()
            .find(|v| v.abs() > 1e-12)
            .copied()
            .unwrap_or(0.0);
        if lead < 0.0 {
            u.column_mut(i).neg_mut();
            w.column_mut(i).neg_mut();
        }
    }

    Ok(DesignDecomposition { u, d, w, rank_tol })
}

/// Rotated least squares: `α̂ᵢ = uᵢᵀ y / dᵢ`.
pub fn ols_ortho(decomp: &DesignDecomposition, y: &DVector<f64>) -> Result<OrthoCoefficients> {
    if y.len() != decomp.n() {
        return Err(Error::DimensionMismatch(format!(
            "response length {} does not match {} rows of U",
            y.len(),
            decomp.n()
        )));
    }
    let uty = decomp.u.transpose() * y;
    let alpha_hat = DVector::from_iterator(
        decomp.m(),
        uty.iter().zip(decomp.d.iter()).map(|(uy, d)| uy / d),
    );
    Ok(OrthoCoefficients {
        alpha_hat,
        d: decomp.d.clone(),
    })
}

/// Map rotated coefficients back to the covariate basis: `β̃ = W α̃`.
pub fn reconstruct_beta(
    alpha_tilde: &DVector<f64>,
    decomp: &DesignDecomposition,
) -> Result<DVector<f64>> {
    if alpha_tilde.len() != decomp.m() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient length {} does not match rank {}",
            alpha_tilde.len(),
            decomp.m()
        )));
    }
    Ok(&decomp.w * alpha_tilde)
}

/// Predictions `X_new β`.
pub fn predict(x_new: &DMatrix<f64>, beta: &DVector<f64>) -> Result<DVector<f64>> {
    if x_new.ncols() != beta.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns of X_new vs coefficient length {}",
            x_new.ncols(),
            beta.len()
        )));
    }
    Ok(x_new * beta)
}
