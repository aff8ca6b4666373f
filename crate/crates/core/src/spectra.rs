//! Spectrum classification (reality, broken/unbroken, Segre characteristics),
//! PT eigenphase alignment, Jordan chains, the block Jordan construction and
//! the near-exceptional-point degeneration scan.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalog::{pseudo2_family, pt2_family, MetricBlock, Pt2Params};
use crate::error::{PtError, Result};
use crate::exec::{map_slice, Execution};
use crate::involutions::InvolutionOperator;
use crate::metric::weighted_inner_product;
use crate::numerics::{
    complex_rank, eigen_decompose, hermitian_eigen, min_norm_solve, CVector, ComplexMatrix, ToleranceConfig, ONE,
};
use crate::symmetry::{check_symmetry, PtBlockParams, SymmetryKind, SymmetryReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealityClass {
    AllRealDiagonalizable,
    AllRealDefective,
    /// Some eigenvalues are complex and the spectrum is closed under
    /// conjugation.
    ConjugatePairs,
    /// Some eigenvalues are complex without a conjugate partner.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegreEntry {
    pub eigenvalue: Complex64,
    pub algebraic_multiplicity: usize,
    /// Jordan block sizes, largest first.
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub reality_class: RealityClass,
    pub segre: Vec<SegreEntry>,
    /// Set when a symmetry operator was supplied and the symmetry holds.
    pub unbroken: Option<bool>,
    pub symmetry: Option<SymmetryReport>,
    /// Two clusters sit within ten times the clustering tolerance, or a
    /// rank staircase was inconsistent.
    pub indeterminate: bool,
}

impl SpectrumReport {
    pub fn dimension(&self) -> usize {
        self.segre.iter().map(|s| s.blocks.iter().sum::<usize>()).sum()
    }

    pub fn is_defective(&self) -> bool {
        self.segre.iter().any(|s| s.blocks.iter().any(|&b| b > 1))
    }
}

fn spectral_norm(h: &ComplexMatrix) -> f64 {
    h.singular_values().first().copied().unwrap_or(0.0)
}

fn centroid(values: &[Complex64], members: &[usize]) -> Complex64 {
    members.iter().map(|&k| values[k]).sum::<Complex64>() / members.len() as f64
}

fn cluster_distance(values: &[Complex64], a: &[usize], b: &[usize]) -> f64 {
    let mut d = f64::INFINITY;
    for &i in a {
        for &j in b {
            d = d.min((values[i] - values[j]).norm());
        }
    }
    d
}

/// Connected components of `members` under links shorter than `tau`.
fn single_linkage(values: &[Complex64], members: &[usize], tau: f64) -> Vec<Vec<usize>> {
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; members.len()];
    for start in 0..members.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![members[start]];
        let mut k = 0;
        while k < comp.len() {
            let a = comp[k];
            for (idx, &b) in members.iter().enumerate() {
                if !seen[idx] && (values[a] - values[b]).norm() <= tau {
                    seen[idx] = true;
                    comp.push(b);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Block sizes at `mu` from the nullities of `(H − μ)^j`, `j = 1..=size`.
/// `None` when the staircase does not account for `size` eigenvalues.
fn staircase(h: &ComplexMatrix, mu: Complex64, size: usize, h2: f64) -> Option<Vec<usize>> {
    let n = h.dim();
    let a = h - &ComplexMatrix::identity(n).scale(mu);
    let base = (64.0 * f64::EPSILON).sqrt();
    let mut power = ComplexMatrix::identity(n);
    let mut nullity = vec![0usize];
    for j in 1..=size {
        power = &power * &a;
        let cut = base * h2.max(1.0).powi(j as i32);
        let nu = (n - complex_rank(&power, cut)).min(size);
        nullity.push(nu);
    }
    if nullity[size] != size {
        return None;
    }
    // at_least[j] = number of blocks of size ≥ j
    let at_least: Vec<usize> = (1..=size).map(|j| nullity[j].saturating_sub(nullity[j - 1])).collect();
    if at_least.windows(2).any(|w| w[1] > w[0]) || nullity.windows(2).any(|w| w[1] < w[0]) {
        return None;
    }
    let mut blocks = Vec::new();
    for j in (1..=size).rev() {
        let exact = at_least[j - 1] - at_least.get(j).copied().unwrap_or(0);
        blocks.extend(std::iter::repeat(j).take(exact));
    }
    Some(blocks)
}

/// Eigenvalues, clusters and Segre characteristics.
///
/// Stage one links eigenvalues closer than `max(abs_tol, 10·rel_tol·‖H‖)`.
/// Stage two links a group of `k` eigenvalues at `10‖H‖(64ε)^{1/k}`, the
/// spread a perturbed `k×k` Jordan block shows, and keeps the group only
/// when the rank staircase at its centroid finds a nontrivial block.
pub fn classify_spectrum(
    h: &ComplexMatrix,
    tol: &ToleranceConfig,
    symmetry: Option<(SymmetryKind, &InvolutionOperator)>,
) -> Result<SpectrumReport> {
    let n = h.require_square("H")?;
    let symmetry = match symmetry {
        Some((kind, o)) => Some(check_symmetry(kind, o, h, tol)?),
        None => None,
    };
    let eig = eigen_decompose(h, tol)?;
    let values = eig.values;
    let h2 = spectral_norm(h);
    let tau0 = tol.abs_tol.max(10.0 * tol.rel_tol * h2);
    let mut indeterminate = false;

    let stage1 = single_linkage(&values, &(0..n).collect::<Vec<_>>(), tau0);

    // stage two: components at the Jordan spread of their own size
    let tau_k = |k: usize| 10.0 * h2 * (64.0 * f64::EPSILON).powf(1.0 / k as f64);
    let mut pending = single_linkage(&values, &(0..n).collect::<Vec<_>>(), tau_k(n.max(2)));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    while let Some(comp) = pending.pop() {
        let sub = single_linkage(&values, &comp, tau_k(comp.len().max(2)));
        if sub.len() > 1 {
            pending.extend(sub);
            continue;
        }
        let parts: Vec<Vec<usize>> = stage1
            .iter()
            .map(|c| c.iter().copied().filter(|k| comp.contains(k)).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();
        if parts.len() == 1 {
            clusters.push(comp);
            continue;
        }
        let mu = centroid(&values, &comp);
        match staircase(h, mu, comp.len(), h2) {
            Some(blocks) if blocks.iter().any(|&b| b > 1) => clusters.push(comp),
            _ => clusters.extend(parts),
        }
    }

    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            if cluster_distance(&values, &clusters[i], &clusters[j]) <= 10.0 * tau0 {
                indeterminate = true;
            }
        }
    }

    let mut segre = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let mu = centroid(&values, c);
        let size = c.len();
        let blocks = match staircase(h, mu, size, h2) {
            Some(b) => b,
            None => {
                indeterminate = true;
                vec![1; size]
            }
        };
        segre.push(SegreEntry {
            eigenvalue: mu,
            algebraic_multiplicity: size,
            blocks,
        });
    }
    segre.sort_by(|a, b| {
        a.eigenvalue
            .re
            .total_cmp(&b.eigenvalue.re)
            .then(a.eigenvalue.im.total_cmp(&b.eigenvalue.im))
    });

    let is_real = |z: Complex64| z.im.abs() <= tau0;
    let all_real = segre.iter().all(|s| is_real(s.eigenvalue));
    let reality_class = if all_real {
        if segre.iter().all(|s| s.blocks.iter().all(|&b| b == 1)) {
            RealityClass::AllRealDiagonalizable
        } else {
            RealityClass::AllRealDefective
        }
    } else {
        let closed = segre.iter().all(|s| {
            is_real(s.eigenvalue)
                || segre.iter().any(|t| {
                    (t.eigenvalue - s.eigenvalue.conj()).norm() <= 10.0 * tau0 && t.blocks == s.blocks
                })
        });
        if closed {
            RealityClass::ConjugatePairs
        } else {
            RealityClass::Mixed
        }
    };
    let unbroken = symmetry.as_ref().and_then(|r| r.holds.then_some(all_real));

    Ok(SpectrumReport {
        eigenvalues: values,
        reality_class,
        segre,
        unbroken,
        symmetry,
        indeterminate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedEigenvectors {
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors with `P·conj(v) = v`.
    pub vectors: Vec<CVector>,
    /// `v†·P·conj(v)` before alignment; unimodular.
    pub pt_eigenvalues: Vec<Complex64>,
}

/// Rotates each eigenvector phase so that its PT eigenvalue is one.
pub fn align_pt_phases(o: &InvolutionOperator, h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<AlignedEigenvectors> {
    let report = check_symmetry(SymmetryKind::Pt, o, h, tol)?;
    if !report.holds {
        return Err(PtError::Contract(format!(
            "H is not PT-symmetric with the given parity (residual {:.3e})",
            report.residual
        )));
    }
    let eig = eigen_decompose(h, tol)?;
    let tau = tol.abs_tol.max(10.0 * tol.rel_tol * spectral_norm(h));
    if let Some(z) = eig.values.iter().find(|z| z.im.abs() > tau) {
        return Err(PtError::Contract(format!(
            "broken PT symmetry: eigenvalue {} {:+}i is complex",
            z.re, z.im
        )));
    }
    for w in eig.values.windows(2) {
        if (w[1] - w[0]).norm() <= tau {
            return Err(PtError::Contract(format!("repeated eigenvalue {} is not simple", w[0].re)));
        }
    }
    let p = o.matrix();
    let mut vectors = Vec::with_capacity(eig.values.len());
    let mut pt_eigenvalues = Vec::with_capacity(eig.values.len());
    for k in 0..eig.values.len() {
        let v = eig.vectors.column(k);
        let v = &v / Complex64::new(v.norm(), 0.0);
        let lambda = v.dotc(&p.mul_vec(&v.conjugate()));
        pt_eigenvalues.push(lambda);
        vectors.push(&v * Complex64::from_polar(1.0, lambda.arg() / 2.0));
    }
    Ok(AlignedEigenvectors {
        eigenvalues: eig.values.iter().map(|z| z.re).collect(),
        vectors,
        pt_eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    pub eigenvalue: Complex64,
    /// `Φ0, Φ1, …` with `(H − λ)Φ_{k+1} = Φ_k`.
    pub vectors: Vec<CVector>,
    /// Free constant: `Φ_k` carries `+ α·Φ_{k−1}` of the `α = 0` chain.
    pub alpha: Complex64,
}

impl JordanChain {
    fn base(&self) -> Vec<CVector> {
        let mut base: Vec<CVector> = Vec::with_capacity(self.vectors.len());
        for (k, v) in self.vectors.iter().enumerate() {
            let b = if k == 0 { v.clone() } else { v - &base[k - 1] * self.alpha };
            base.push(b);
        }
        base
    }

    /// The chain with `Φ_k ← Φ_k + α·Φ_{k−1}` applied to the `α = 0` chain.
    pub fn with_alpha(&self, alpha: Complex64) -> JordanChain {
        let base = self.base();
        let vectors = (0..base.len())
            .map(|k| if k == 0 { base[0].clone() } else { &base[k] + &base[k - 1] * alpha })
            .collect();
        JordanChain {
            eigenvalue: self.eigenvalue,
            vectors,
            alpha,
        }
    }

    /// `‖(H − λ)Φ0‖` followed by `‖(H − λ)Φ_{k+1} − Φ_k‖`.
    pub fn residuals(&self, h: &ComplexMatrix) -> Vec<f64> {
        let a = h - &ComplexMatrix::identity(h.dim()).scale(self.eigenvalue);
        self.vectors
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let av = a.mul_vec(v);
                if k == 0 {
                    av.norm()
                } else {
                    (av - &self.vectors[k - 1]).norm()
                }
            })
            .collect()
    }
}

fn fix_phase(v: CVector) -> CVector {
    let lead = v.iter().copied().fold(Complex64::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
    if lead.norm() == 0.0 {
        return v;
    }
    &v * (lead.conj() / lead.norm())
}

/// Jordan chain at `lambda` with `α = 0`: `Φ0` is the smallest right
/// singular vector of `H − λ`, each next vector the minimum-norm solution
/// of `(H − λ)x = Φ_k` orthogonal to `Φ0`.
pub fn jordan_chain(h: &ComplexMatrix, lambda: Complex64, tol: &ToleranceConfig) -> Result<JordanChain> {
    let n = h.require_square("H")?;
    let a = h - &ComplexMatrix::identity(n).scale(lambda);
    let hn = h.frobenius_norm().max(1.0);
    let svd = a.as_dmatrix().clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let k_min = (0..n)
        .min_by(|&x, &y| svd.singular_values[x].total_cmp(&svd.singular_values[y]))
        .expect("n ≥ 1");
    let phi0 = fix_phase(v_t.row(k_min).adjoint());
    if !tol.accepts(a.mul_vec(&phi0).norm(), hn) {
        return Err(PtError::Contract(format!(
            "{} {:+}i is not an eigenvalue (smallest singular value {:.3e})",
            lambda.re, lambda.im, svd.singular_values[k_min]
        )));
    }
    let mut vectors = vec![phi0];
    while vectors.len() < n {
        let last = vectors.last().expect("nonempty");
        let x = min_norm_solve(&a, last, 1, tol);
        let res = (a.mul_vec(&x) - last).norm();
        if x.norm() == 0.0 || !tol.accepts(res, hn * (x.norm() + last.norm())) {
            break;
        }
        vectors.push(x);
    }
    if vectors.len() < 2 {
        return Err(PtError::Contract(format!(
            "eigenvalue {} {:+}i is not defective; no Jordan chain",
            lambda.re, lambda.im
        )));
    }
    Ok(JordanChain {
        eigenvalue: lambda,
        vectors,
        alpha: Complex64::new(0.0, 0.0),
    })
}

/// `H0 = [[J_m(λ), iB], [0, J_n(λ)]]` with the single nonzero `B_{m,1} = 1`,
/// and `Λ = Diag{1_m, i·1_n}` with `Λ·H0·Λ⁻¹ = J_{m+n}(λ)`.
pub fn build_pt_jordan(m: usize, n: usize, lambda: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if m == 0 || n == 0 {
        return Err(PtError::Dimension(format!("build_pt_jordan needs m, n ≥ 1, got ({m}, {n})")));
    }
    let mut p = PtBlockParams::zeros(m, n);
    for i in 0..m {
        p.a[(i, i)] = lambda;
        if i + 1 < m {
            p.a[(i, i + 1)] = 1.0;
        }
    }
    for i in 0..n {
        p.d[(i, i)] = lambda;
        if i + 1 < n {
            p.d[(i, i + 1)] = 1.0;
        }
    }
    p.b[(m - 1, 0)] = 1.0;
    let h0 = crate::symmetry::construct_pt_block(&p)?;
    let diag: Vec<Complex64> = (0..m + n).map(|k| if k < m { ONE } else { Complex64::new(0.0, 1.0) }).collect();
    Ok((h0, ComplexMatrix::from_diagonal(&diag)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegenerationFamily {
    /// `H0` with `γ` fixed and `ρ² = γ²(1 − ε)`.
    Pt2,
    /// `H̃0` with `ρ² = γ²(1 − ε)`.
    Pseudo2,
}

/// Slopes (or prefactors) of the log-log fits against `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub omega_small: Option<f64>,
    pub norm_plus: Option<f64>,
    pub norm_minus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationScan {
    pub family: DegenerationFamily,
    pub u: f64,
    pub gamma: f64,
    pub epsilons: Vec<f64>,
    pub omega_small: Vec<f64>,
    pub omega_large: Vec<f64>,
    pub norm_plus: Vec<f64>,
    pub norm_minus: Vec<f64>,
    pub fitted_exponents: FitSummary,
    /// `C` in `y ≈ C·ε^slope`.
    pub fitted_prefactors: FitSummary,
}

impl DegenerationScan {
    pub const CSV_HEADER: [&'static str; 5] = ["epsilon", "omega_small", "omega_large", "norm_plus", "norm_minus"];

    pub fn rows(&self) -> Vec<[f64; 5]> {
        (0..self.epsilons.len())
            .map(|k| {
                [
                    self.epsilons[k],
                    self.omega_small[k],
                    self.omega_large[k],
                    self.norm_plus[k],
                    self.norm_minus[k],
                ]
            })
            .collect()
    }
}

/// Least-squares `(slope, prefactor)` of `log y` against `log x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() < 2 || x.len() != y.len() || x.iter().chain(y).any(|&t| t <= 0.0 || !t.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|t| t.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, (my - slope * mx).exp()))
}

struct DegenerationPoint {
    omega_small: f64,
    omega_large: f64,
    norm_plus: f64,
    norm_minus: f64,
}

fn degeneration_point(u: f64, gamma: f64, eps: f64, family: DegenerationFamily) -> Result<DegenerationPoint> {
    let p = Pt2Params::new(0.0, gamma, gamma * (1.0 - eps).sqrt(), 0.0).with_metric(u, 0.0);
    let (w, vp, vm) = match family {
        DegenerationFamily::Pt2 => {
            let f = pt2_family(&p)?;
            (f.metric, f.eigvec_plus, f.eigvec_minus)
        }
        DegenerationFamily::Pseudo2 => {
            let f = pseudo2_family(&p)?;
            (f.metric, f.eigvec_plus, f.eigvec_minus)
        }
    };
    let w = match w {
        MetricBlock::Available(m) => m.w,
        MetricBlock::Unavailable { reason } => return Err(PtError::Constraint(reason)),
    };
    let (omegas, _) = hermitian_eigen(&w);
    Ok(DegenerationPoint {
        omega_small: omegas[0],
        omega_large: omegas[1],
        norm_plus: weighted_inner_product(&w, &vp, &vp)?.re,
        norm_minus: weighted_inner_product(&w, &vm, &vm)?.re,
    })
}

/// Metric eigenvalues and eigenvector norms approaching the exceptional
/// point, with `e = δ = v = 0` and `ρ² = γ²(1 − ε)`.
pub fn degeneration_scan(
    u: f64,
    gamma: f64,
    epsilons: &[f64],
    family: DegenerationFamily,
    exec: Execution,
) -> Result<DegenerationScan> {
    if !(u * gamma > 0.0) {
        return Err(PtError::Constraint("u·γ > 0 violated".into()));
    }
    if epsilons.is_empty() {
        return Err(PtError::Constraint("empty ε grid".into()));
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(PtError::Constraint("every ε must lie in (0, 1)".into()));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(PtError::Constraint("ε must be strictly decreasing".into()));
    }
    let points = map_slice(exec, epsilons, |&eps| degeneration_point(u, gamma, eps, family));
    let points = points.into_iter().collect::<Result<Vec<_>>>()?;
    let omega_small: Vec<f64> = points.iter().map(|p| p.omega_small).collect();
    let omega_large: Vec<f64> = points.iter().map(|p| p.omega_large).collect();
    let norm_plus: Vec<f64> = points.iter().map(|p| p.norm_plus).collect();
    let norm_minus: Vec<f64> = points.iter().map(|p| p.norm_minus).collect();
    let fit = |y: &[f64]| log_log_fit(epsilons, y);
    let (fo, fp, fm) = (fit(&omega_small), fit(&norm_plus), fit(&norm_minus));
    Ok(DegenerationScan {
        family,
        u,
        gamma,
        epsilons: epsilons.to_vec(),
        fitted_exponents: FitSummary {
            omega_small: fo.map(|f| f.0),
            norm_plus: fp.map(|f| f.0),
            norm_minus: fm.map(|f| f.0),
        },
        fitted_prefactors: FitSummary {
            omega_small: fo.map(|f| f.1),
            norm_plus: fp.map(|f| f.1),
            norm_minus: fm.map(|f| f.1),
        },
        omega_small,
        omega_large,
        norm_plus,
        norm_minus,
    })
}

/// `n` points log-spaced from `10^lo` down to `10^hi`, strictly decreasing
/// when `lo > hi`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..n)
            .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (n - 1) as f64))
            .collect(),
    }
}
