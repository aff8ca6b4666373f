//! The three operator families: real involutions `P`, Hermitian involutions
//! `P̃` and antilinear cores `P̄` with `P̄·P̄* = 1`, plus the coset and SIP
//! machinery that moves them around.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::numerics::{eigenvalues, hermitian_eigen, ComplexMatrix, ToleranceConfig, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvolutionKind {
    /// `P = P*`, `P² = 1`.
    RealInvolution,
    /// `P̃ = P̃†`, `P̃² = 1`.
    HermitianInvolution,
    /// `P̄·P̄* = 1`.
    AntilinearCore,
}

impl InvolutionKind {
    pub fn is_involutory(self) -> bool {
        !matches!(self, InvolutionKind::AntilinearCore)
    }
}

/// Outcome of [`verify_involution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvolutionCheck {
    pub kind: InvolutionKind,
    pub holds: bool,
    /// `‖O² − 1‖` for involutory kinds, `‖O·O* − 1‖` for the antilinear core.
    pub square_residual: f64,
    /// `‖O − O*‖` or `‖O − O†‖`; zero for the antilinear core.
    pub structure_residual: f64,
    /// `|tr O − (m − n)|`, involutory kinds only.
    pub trace_residual: Option<f64>,
    pub signature: Option<(usize, usize)>,
}

/// A symmetry operator tagged with its kind and, for the involutory kinds,
/// its signature `(m, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvolutionOperator {
    kind: InvolutionKind,
    matrix: ComplexMatrix,
    signature: Option<(usize, usize)>,
}

impl InvolutionOperator {
    /// Verifies `matrix` against the invariants of `kind`.
    pub fn new(matrix: ComplexMatrix, kind: InvolutionKind, tol: &ToleranceConfig) -> Result<Self> {
        let check = verify_involution(&matrix, kind, tol)?;
        if !check.holds {
            return Err(PtError::Contract(format!(
                "matrix is not a valid {kind:?} (square residual {:.3e}, structure residual {:.3e})",
                check.square_residual, check.structure_residual
            )));
        }
        Ok(Self {
            kind,
            matrix,
            signature: check.signature,
        })
    }

    pub fn kind(&self) -> InvolutionKind {
        self.kind
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn signature(&self) -> Option<(usize, usize)> {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Re-tags the operator after verifying it against `kind`.
    pub fn as_kind(&self, kind: InvolutionKind, tol: &ToleranceConfig) -> Result<Self> {
        Self::new(self.matrix.clone(), kind, tol)
    }
}

fn involution_scale(o: &ComplexMatrix) -> f64 {
    let n = o.frobenius_norm();
    n * n
}

/// `(m, n)` counted from eigenvalue signs of `o`; `None` when an eigenvalue
/// sits inside the rank cutoff.
fn eigen_signature(o: &ComplexMatrix, kind: InvolutionKind, tol: &ToleranceConfig) -> Option<(usize, usize)> {
    let reals: Vec<f64> = match kind {
        InvolutionKind::HermitianInvolution => hermitian_eigen(o).0,
        _ => eigenvalues(o, tol).ok()?.iter().map(|z| z.re).collect(),
    };
    let sigma_max = o.singular_values().first().copied().unwrap_or(0.0);
    let cut = tol.rank_threshold(sigma_max.max(1.0));
    let m = reals.iter().filter(|&&x| x > cut).count();
    let n = reals.iter().filter(|&&x| x < -cut).count();
    (m + n == reals.len()).then_some((m, n))
}

/// Checks exactly the defining identities of `kind`. Failing checks are
/// reported in the result; only a non-square input is an error.
pub fn verify_involution(o: &ComplexMatrix, kind: InvolutionKind, tol: &ToleranceConfig) -> Result<InvolutionCheck> {
    let n = o.require_square("involution operator")?;
    let id = ComplexMatrix::identity(n);
    let scale = involution_scale(o);
    let square_residual = match kind {
        InvolutionKind::AntilinearCore => (o * &o.conj()).distance(&id),
        _ => (o * o).distance(&id),
    };
    let structure_residual = match kind {
        InvolutionKind::RealInvolution => o.imaginary_norm(),
        InvolutionKind::HermitianInvolution => o.hermiticity_residual(),
        InvolutionKind::AntilinearCore => 0.0,
    };
    let mut holds = tol.accepts(square_residual, scale) && tol.accepts(structure_residual, o.frobenius_norm());
    let (signature, trace_residual) = if kind.is_involutory() && holds {
        match eigen_signature(o, kind, tol) {
            Some((m, k)) => {
                let tr = o.trace();
                let r = (tr - Complex64::new(m as f64 - k as f64, 0.0)).norm();
                holds &= tol.accepts(r, scale);
                (Some((m, k)), Some(r))
            }
            None => {
                holds = false;
                (None, None)
            }
        }
    } else {
        (None, None)
    };
    Ok(InvolutionCheck {
        kind,
        holds,
        square_residual,
        structure_residual,
        trace_residual,
        signature,
    })
}

/// `P0(m, n) = Diag{1_m, −1_n}`. The result is simultaneously a real and a
/// Hermitian involution and is tagged as [`InvolutionKind::RealInvolution`].
pub fn make_diagonal_parity(m: usize, n: usize) -> Result<InvolutionOperator> {
    if m + n == 0 {
        return Err(PtError::Dimension("diagonal parity needs m + n ≥ 1".into()));
    }
    let diag: Vec<f64> = (0..m + n).map(|k| if k < m { 1.0 } else { -1.0 }).collect();
    Ok(InvolutionOperator {
        kind: InvolutionKind::RealInvolution,
        matrix: ComplexMatrix::from_real_diagonal(&diag),
        signature: Some((m, n)),
    })
}

pub fn sip_matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { ONE } else { ZERO })
}

/// The standard involutory permutation `S_n`, units on the skew-diagonal.
pub fn make_sip(n: usize) -> Result<InvolutionOperator> {
    if n == 0 {
        return Err(PtError::Dimension("SIP needs n ≥ 1".into()));
    }
    Ok(InvolutionOperator {
        kind: InvolutionKind::RealInvolution,
        matrix: sip_matrix(n),
        signature: Some((n.div_ceil(2), n / 2)),
    })
}

/// `T·O·T⁻¹` for the involutory kinds, `T·O·(T⁻¹)*` for the antilinear core.
///
/// A real involution accepts only real `T` and a Hermitian involution only
/// unitary `T`, so the result stays in the same family.
pub fn transport(o: &InvolutionOperator, t: &ComplexMatrix, tol: &ToleranceConfig) -> Result<InvolutionOperator> {
    let n = t.require_square("transport matrix")?;
    if n != o.dim() {
        return Err(PtError::Dimension(format!(
            "transport matrix is {n}x{n} but operator is {}x{}",
            o.dim(),
            o.dim()
        )));
    }
    let out = match o.kind {
        InvolutionKind::RealInvolution => {
            let im = t.imaginary_norm();
            if !tol.accepts(im, 0.0) {
                return Err(PtError::Contract(format!(
                    "real involution needs a real transport matrix (imaginary norm {im:.3e})"
                )));
            }
            let t = ComplexMatrix::from_real(&t.real_part())?;
            let t_inv = t.inverse()?;
            &(&t * &o.matrix) * &t_inv
        }
        InvolutionKind::HermitianInvolution => {
            let r = (t * &t.adjoint()).distance(&ComplexMatrix::identity(n));
            if !tol.accepts(r, 0.0) {
                return Err(PtError::Contract(format!(
                    "Hermitian involution needs a unitary transport matrix (residual {r:.3e})"
                )));
            }
            (&(t * &o.matrix) * &t.adjoint()).hermitian_part()
        }
        InvolutionKind::AntilinearCore => {
            let t_inv = t.inverse()?;
            &(t * &o.matrix) * &t_inv.conj()
        }
    };
    InvolutionOperator::new(out, o.kind, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannCosetSpec {
    pub m: usize,
    pub n: usize,
    /// Complex `m×n` block.
    pub b: ComplexMatrix,
    pub x: f64,
}

impl GrassmannCosetSpec {
    /// The anti-Hermitian generator `a = [[0, b], [−b†, 0]]`.
    pub fn generator(&self) -> Result<ComplexMatrix> {
        self.check()?;
        ComplexMatrix::from_blocks(
            &ComplexMatrix::zeros(self.m, self.m),
            &self.b,
            &(-self.b.adjoint()),
            &ComplexMatrix::zeros(self.n, self.n),
        )
    }

    fn check(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.b.nrows() != self.m || self.b.ncols() != self.n {
            return Err(PtError::Dimension(format!(
                "coset block must be {}x{} with m, n ≥ 1, got {}x{}",
                self.m,
                self.n,
                self.b.nrows(),
                self.b.ncols()
            )));
        }
        if !self.x.is_finite() {
            return Err(PtError::Numerical("coset parameter x is not finite".into()));
        }
        Ok(())
    }
}

/// `f(√M)` for Hermitian positive semidefinite `M` through its eigenbasis.
fn spectral_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(m);
    let d: Vec<f64> = vals.iter().map(|&l| f(l.max(0.0).sqrt())).collect();
    &(&vecs * &ComplexMatrix::from_real_diagonal(&d)) * &vecs.adjoint()
}

/// `sin(s·x)/s`, continued to `x` at `s = 0`.
fn sinc_scaled(s: f64, x: f64) -> f64 {
    let sx = s * x;
    if sx.abs() < 1e-4 {
        x * (1.0 - sx * sx / 6.0)
    } else {
        (sx).sin() / s
    }
}

/// The coset element `U = e^{a·x}` in block closed form.
pub fn grassmann_coset_element(spec: &GrassmannCosetSpec) -> Result<ComplexMatrix> {
    spec.check()?;
    let x = spec.x;
    let b = &spec.b;
    let bbd = b * &b.adjoint();
    let bdb = &b.adjoint() * b;
    let top_left = spectral_function(&bbd, |s| (s * x).cos());
    let bottom_right = spectral_function(&bdb, |s| (s * x).cos());
    let sinc = spectral_function(&bdb, |s| sinc_scaled(s, x));
    let top_right = b * &sinc;
    let bottom_left = -(&sinc * &b.adjoint());
    ComplexMatrix::from_blocks(&top_left, &top_right, &bottom_left, &bottom_right)
}

/// `q` and `q⁻¹` with `q·P̃0·q⁻¹ = S_N`, where `P̃0 = P̃0(k, k)` for `N = 2k`
/// and `P̃0(k + 1, k)` for `N = 2k + 1`.
pub fn sip_similarity(n_total: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n_total == 0 {
        return Err(PtError::Dimension("SIP similarity needs n ≥ 1".into()));
    }
    let k = n_total / 2;
    let odd = n_total % 2 == 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let build = |sign: f64| {
        ComplexMatrix::from_fn(n_total, n_total, |i, j| {
            let mid = odd && i == k && j == k;
            if mid {
                return ONE;
            }
            let off = usize::from(odd);
            let top = |r: usize| r < k;
            let bottom = |r: usize| r >= k + off;
            if i == j && (top(i) || bottom(i)) {
                Complex64::new(h, 0.0)
            } else if top(i) && bottom(j) && i + (j - k - off) + 1 == k {
                // −S_k block in the top right (sign flips for the inverse)
                Complex64::new(-sign * h, 0.0)
            } else if bottom(i) && top(j) && (i - k - off) + j + 1 == k {
                Complex64::new(sign * h, 0.0)
            } else {
                ZERO
            }
        })
    };
    Ok((build(1.0), build(-1.0)))
}

/// The diagonal parity that [`sip_similarity`] maps onto `S_N`.
pub fn sip_source_parity(n_total: usize) -> Result<InvolutionOperator> {
    make_diagonal_parity(n_total.div_ceil(2), n_total / 2)
}
