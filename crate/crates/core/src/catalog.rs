//! Closed-form 2×2 families: PT-symmetric `H0` and its two chart
//! transforms, pseudo-Hermitian `H̃0` and its unitary transform, the cross
//! operators between the two classes, the generalized `P̄` parametrization and
//! the Jordan chains at the exceptional point.
//!
//! Everything here is direct formula evaluation. The generic modules are
//! tested against these values.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PtError, Result};
use crate::numerics::{CVector, ComplexMatrix, ToleranceConfig, I, ONE, ZERO};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => a,
        (0, 1) => b,
        (1, 0) => cc,
        _ => d,
    })
}

fn v2(a: Complex64, b: Complex64) -> CVector {
    CVector::from_vec(vec![a, b])
}

#[derive(Debug, Clone, PartialEq)]
pub struct PauliBasis {
    pub sigma0: ComplexMatrix,
    pub sigma1: ComplexMatrix,
    pub sigma2: ComplexMatrix,
    pub sigma3: ComplexMatrix,
}

pub fn pauli() -> PauliBasis {
    PauliBasis {
        sigma0: ComplexMatrix::identity(2),
        sigma1: m2(ZERO, ONE, ONE, ZERO),
        sigma2: m2(ZERO, -I, I, ZERO),
        sigma3: m2(ONE, ZERO, ZERO, -ONE),
    }
}

/// `x·σ` for a complex 3-vector `x`.
pub fn sigma_dot(x: [Complex64; 3]) -> ComplexMatrix {
    m2(x[2], x[0] - I * x[1], x[0] + I * x[1], -x[2])
}

/// Parameters shared by the PT and pseudo-Hermitian 2×2 families.
///
/// `u`, `v` only enter the metric; `theta`, `phi` only enter the chart
/// transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Pt2Params {
    pub e: f64,
    pub gamma: f64,
    pub rho: f64,
    pub delta: f64,
    pub u: f64,
    pub v: f64,
    pub theta: f64,
    pub phi: f64,
}

impl Default for Pt2Params {
    fn default() -> Self {
        Self {
            e: 0.0,
            gamma: 0.0,
            rho: 0.0,
            delta: 0.0,
            u: 1.0,
            v: 0.0,
            theta: 0.0,
            phi: 0.0,
        }
    }
}

impl Pt2Params {
    pub fn new(e: f64, gamma: f64, rho: f64, delta: f64) -> Self {
        Self {
            e,
            gamma,
            rho,
            delta,
            ..Self::default()
        }
    }

    pub fn with_metric(self, u: f64, v: f64) -> Self {
        Self { u, v, ..self }
    }

    pub fn with_chart(self, theta: f64, phi: f64) -> Self {
        Self { theta, phi, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("e", self.e),
            ("gamma", self.gamma),
            ("rho", self.rho),
            ("delta", self.delta),
            ("u", self.u),
            ("v", self.v),
            ("theta", self.theta),
            ("phi", self.phi),
        ];
        match fields.iter().find(|(_, x)| !x.is_finite()) {
            Some((name, _)) => Err(PtError::Constraint(format!("parameter {name} must be finite"))),
            None => Ok(()),
        }
    }

    /// `u·γ > 0` and `v² < γ² − ρ²`.
    pub fn metric_constraints(&self) -> Result<()> {
        if self.u * self.gamma <= 0.0 {
            return Err(PtError::Constraint("u·γ > 0 violated".into()));
        }
        if self.v * self.v >= self.gamma * self.gamma - self.rho * self.rho {
            return Err(PtError::Constraint("v² < γ² − ρ² violated".into()));
        }
        Ok(())
    }

    /// `√(γ² − ρ²)`, imaginary in the broken phase.
    pub fn splitting(&self) -> Complex64 {
        c(self.gamma * self.gamma - self.rho * self.rho).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricBlock<T> {
    Available(T),
    Unavailable { reason: String },
}

impl<T> MetricBlock<T> {
    pub fn available(&self) -> Option<&T> {
        match self {
            MetricBlock::Available(t) => Some(t),
            MetricBlock::Unavailable { .. } => None,
        }
    }

    fn from_check(check: Result<()>, f: impl FnOnce() -> T) -> Self {
        match check {
            Ok(()) => MetricBlock::Available(f()),
            Err(e) => MetricBlock::Unavailable { reason: e.to_string() },
        }
    }
}

/// Metric with its eigenvalues and the eigenvector norms for `n± = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricData {
    pub w: ComplexMatrix,
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub norm_plus: f64,
    pub norm_minus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pt2Family {
    pub h: ComplexMatrix,
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub eigvec_plus: CVector,
    pub eigvec_minus: CVector,
    pub metric: MetricBlock<MetricData>,
}

pub fn pt2_h0(p: &Pt2Params) -> ComplexMatrix {
    let (e, g, r, d) = (p.e, p.gamma, p.rho, p.delta);
    m2(
        c(e + g * d.cos()),
        -I * (g * d.sin() - r),
        I * (g * d.sin() + r),
        c(e - g * d.cos()),
    )
}

pub fn pt2_w0(p: &Pt2Params) -> ComplexMatrix {
    let (g, r, d, u, v) = (p.gamma, p.rho, p.delta, p.u, p.v);
    let k = v * d.cos() + r * d.sin();
    let l = v * d.sin() - r * d.cos();
    m2(c(g + k), -I * l, I * l, c(g - k)).scale_real(u)
}

/// `H0`, its spectrum, eigenvectors and (when the constraints hold) metric.
pub fn pt2_family(p: &Pt2Params) -> Result<Pt2Family> {
    p.validate()?;
    let s = p.splitting();
    let ge = Complex64::from_polar(p.gamma, p.delta);
    let ir = I * p.rho;
    let metric = MetricBlock::from_check(p.metric_constraints(), || {
        let s = s.re;
        let root = (p.rho * p.rho + p.v * p.v).sqrt();
        MetricData {
            w: pt2_w0(p),
            omega_plus: p.u * (p.gamma + root),
            omega_minus: p.u * (p.gamma - root),
            norm_plus: 4.0 * p.u * p.gamma * s * (s + p.v),
            norm_minus: 4.0 * p.u * p.gamma * s * (s - p.v),
        }
    });
    Ok(Pt2Family {
        h: pt2_h0(p),
        e_plus: p.e + s,
        e_minus: p.e - s,
        eigvec_plus: v2(ge - ir + s, ge + ir - s),
        eigvec_minus: v2(ge - ir - s, ge + ir + s),
        metric,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `R1 = e^{−φσ3/2}·e^{−iθσ2/2}`.
    R1,
    /// `R2 = e^{−φσ3/2}·e^{−θσ1/2}`.
    R2,
}

pub fn chart_matrix(chart: Chart, theta: f64, phi: f64) -> ComplexMatrix {
    let (a, b) = ((-phi / 2.0).exp(), (phi / 2.0).exp());
    match chart {
        Chart::R1 => {
            let (s, co) = (theta / 2.0).sin_cos();
            m2(c(a * co), c(-a * s), c(b * s), c(b * co))
        }
        Chart::R2 => {
            let (ch, sh) = ((theta / 2.0).cosh(), (theta / 2.0).sinh());
            m2(c(a * ch), c(-a * sh), c(-b * sh), c(b * ch))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pt2Transformed {
    pub r: ComplexMatrix,
    pub parity: ComplexMatrix,
    pub h: ComplexMatrix,
    pub w: MetricBlock<ComplexMatrix>,
}

/// Closed forms of `P1, H1, W1` (chart R1) or `P2, H2, W2`
/// (chart R2).
pub fn pt2_transformed(chart: Chart, p: &Pt2Params) -> Result<Pt2Transformed> {
    p.validate()?;
    let (e, g, r, d, u, v, t, f) = (p.e, p.gamma, p.rho, p.delta, p.u, p.v, p.theta, p.phi);
    let (ef, emf) = (f.exp(), (-f).exp());
    let k = r * d.sin() + v * d.cos();
    let l = r * d.cos() - v * d.sin();
    let (parity, h, w) = match chart {
        Chart::R1 => {
            let (st, ct) = t.sin_cos();
            let (sd, cd) = d.sin_cos();
            let parity = m2(c(ct), c(emf * st), c(ef * st), c(-ct));
            let h = m2(
                e + g * cd * ct - I * r * st,
                (g * cd * st - I * g * sd + I * r * ct) * emf,
                (g * cd * st + I * g * sd + I * r * ct) * ef,
                e - g * cd * ct + I * r * st,
            );
            let w = move || {
                m2(c((g + ct * k) * ef), st * k + I * l, st * k - I * l, c((g - ct * k) * emf)).scale_real(u)
            };
            (parity, h, Box::new(w) as Box<dyn FnOnce() -> ComplexMatrix>)
        }
        Chart::R2 => {
            let (sh, ch) = (t.sinh(), t.cosh());
            let z = Complex64::new(d, t);
            let parity = m2(c(ch), c(emf * sh), c(-ef * sh), c(-ch));
            let h = m2(
                e + g * z.cos(),
                -I * (g * z.sin() - r) * emf,
                I * (g * z.sin() + r) * ef,
                e - g * z.cos(),
            );
            let w = move || m2(c((g * ch + k) * ef), g * sh + I * l, g * sh - I * l, c((g * ch - k) * emf)).scale_real(u);
            (parity, h, Box::new(w) as Box<dyn FnOnce() -> ComplexMatrix>)
        }
    };
    Ok(Pt2Transformed {
        r: chart_matrix(chart, t, f),
        parity,
        h,
        w: MetricBlock::from_check(p.metric_constraints(), w),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pseudo2Family {
    pub h0: ComplexMatrix,
    pub e_plus: Complex64,
    pub e_minus: Complex64,
    pub eigvec_plus: CVector,
    pub eigvec_minus: CVector,
    pub metric: MetricBlock<MetricData>,
    /// `U(θ, φ) = e^{−iφσ3/2}·e^{−iθσ2/2}`.
    pub u: ComplexMatrix,
    /// `P̃ = n^r·σ`.
    pub ptilde: ComplexMatrix,
    /// `H̃ = e·σ0 + (γ n^r + iρ sinδ n^θ + iρ cosδ n^φ)·σ`.
    pub h: ComplexMatrix,
    /// `W̃ = u[γσ0 + (v n^r + ρ cosδ n^θ − ρ sinδ n^φ)·σ]`.
    pub w: MetricBlock<ComplexMatrix>,
}

pub fn pseudo2_h0(p: &Pt2Params) -> ComplexMatrix {
    let (e, g, r, d) = (p.e, p.gamma, p.rho, p.delta);
    m2(c(e + g), Complex64::from_polar(r, d), -Complex64::from_polar(r, -d), c(e - g))
}

pub fn pseudo2_w0(p: &Pt2Params) -> ComplexMatrix {
    let (g, r, d, v) = (p.gamma, p.rho, p.delta, p.v);
    m2(c(g + v), Complex64::from_polar(r, d), Complex64::from_polar(r, -d), c(g - v)).scale_real(p.u)
}

pub fn unitary_chart(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    let a = Complex64::from_polar(1.0, -phi / 2.0);
    let b = Complex64::from_polar(1.0, phi / 2.0);
    m2(a * co, -a * s, b * s, b * co)
}

/// Spherical frame `(n^r, n^θ, n^φ)`.
pub fn spherical_frame(theta: f64, phi: f64) -> [[f64; 3]; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [[st * cp, st * sp, ct], [ct * cp, ct * sp, -st], [-sp, cp, 0.0]]
}

/// `γ + σ·s` for `s = √(γ² − ρ²)`, through `ρ²/(γ − σ·s)` when the two
/// terms would cancel.
fn gamma_shift(g: f64, r: f64, s: f64, sigma: f64) -> f64 {
    if g * sigma * s < 0.0 {
        r * r / (g - sigma * s)
    } else {
        g + sigma * s
    }
}

pub fn pseudo2_family(p: &Pt2Params) -> Result<Pseudo2Family> {
    p.validate()?;
    let s = p.splitting();
    let (g, r, d, e) = (p.gamma, p.rho, p.delta, p.e);
    let [nr, nt, nf] = spherical_frame(p.theta, p.phi);
    let comb = |a: Complex64, b: Complex64, cc: Complex64| -> [Complex64; 3] {
        [0, 1, 2].map(|k| a * nr[k] + b * nt[k] + cc * nf[k])
    };
    let h = &ComplexMatrix::identity(2).scale_real(e)
        + &sigma_dot(comb(c(g), I * (r * d.sin()), I * (r * d.cos())));
    let w_closed = || {
        let x = comb(c(p.v), c(r * d.cos()), c(-r * d.sin()));
        (&ComplexMatrix::identity(2).scale_real(g) + &sigma_dot(x)).scale_real(p.u)
    };
    let metric = MetricBlock::from_check(p.metric_constraints(), || {
        let s = s.re;
        let root = (r * r + p.v * p.v).sqrt();
        MetricData {
            w: pseudo2_w0(p),
            omega_plus: p.u * (g + root),
            omega_minus: p.u * (g - root),
            norm_plus: 2.0 * p.u * s * gamma_shift(g, r, s, 1.0) * (s + p.v),
            norm_minus: 2.0 * p.u * s * gamma_shift(g, r, s, -1.0) * (s - p.v),
        }
    });
    let lower = -Complex64::from_polar(r, -d);
    let shift = |sigma: f64| if s.im == 0.0 { c(gamma_shift(g, r, s.re, sigma)) } else { g + s * sigma };
    Ok(Pseudo2Family {
        h0: pseudo2_h0(p),
        e_plus: e + s,
        e_minus: e - s,
        eigvec_plus: v2(shift(1.0), lower),
        eigvec_minus: v2(shift(-1.0), lower),
        metric,
        u: unitary_chart(p.theta, p.phi),
        ptilde: sigma_dot([c(nr[0]), c(nr[1]), c(nr[2])]),
        h,
        w: MetricBlock::from_check(p.metric_constraints(), w_closed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossCase {
    /// `P̃` making `H0` pseudo-Hermitian.
    PtildeForH0,
    /// `P` making `H̃0` PT-symmetric.
    PForHtilde0,
    /// `P` making the rotated `H̃(θ, φ)` PT-symmetric.
    Delta1,
    /// `P̃` making `H1(θ, φ)` pseudo-Hermitian.
    Delta2,
    /// `P̃'` making `H2(θ, φ)` pseudo-Hermitian.
    Delta3,
}

impl CrossCase {
    pub const ALL: [CrossCase; 5] = [
        CrossCase::PtildeForH0,
        CrossCase::PForHtilde0,
        CrossCase::Delta1,
        CrossCase::Delta2,
        CrossCase::Delta3,
    ];

    /// The matrix the operator is built for.
    pub fn target(self, p: &Pt2Params) -> Result<ComplexMatrix> {
        Ok(match self {
            CrossCase::PtildeForH0 => pt2_h0(p),
            CrossCase::PForHtilde0 => pseudo2_h0(p),
            CrossCase::Delta1 => pseudo2_family(p)?.h,
            CrossCase::Delta2 => pt2_transformed(Chart::R1, p)?.h,
            CrossCase::Delta3 => pt2_transformed(Chart::R2, p)?.h,
        })
    }

    /// Whether the operator is a parity (PT) rather than a Hermitian
    /// involution (pseudo-Hermiticity).
    pub fn is_parity(self) -> bool {
        matches!(self, CrossCase::PForHtilde0 | CrossCase::Delta1)
    }
}

/// The normalizer `Δ` of each case; the operator carries `1/√Δ`.
pub fn cross_normalizer(case: CrossCase, p: &Pt2Params) -> f64 {
    let (g, r, d, t, f) = (p.gamma, p.rho, p.delta, p.theta, p.phi);
    let (sd, cd) = d.sin_cos();
    let (st, ct) = t.sin_cos();
    match case {
        CrossCase::PtildeForH0 => 1.0,
        CrossCase::PForHtilde0 => g * g - r * r * cd * cd,
        CrossCase::Delta1 => {
            let (sf, cf) = f.sin_cos();
            g * g * (cd * ct * sf - sd * cf).powi(2) + (g * g - r * r) * (sd * ct * sf + cd * cf).powi(2)
        }
        CrossCase::Delta2 => {
            let (chf, shf) = (f.cosh(), f.sinh());
            g * g * cd * cd * (st * st * chf * chf + ct * ct) + (g * sd * chf + r * ct * shf).powi(2)
        }
        CrossCase::Delta3 => {
            let (chf, shf) = (f.cosh(), f.sinh());
            let (cht, sht) = (t.cosh(), t.sinh());
            g * g * cd * cd * (1.0 + sht * sht * chf * chf) + (g * sd * cht * chf + r * shf).powi(2)
        }
    }
}

/// Cross operators, with the `±` prefactor fixed by
/// [`crate::numerics::canonical_sign`].
pub fn cross_operators(case: CrossCase, p: &Pt2Params, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    p.validate()?;
    let (g, r, d, t, f) = (p.gamma, p.rho, p.delta, p.theta, p.phi);
    let (sd, cd) = d.sin_cos();
    let (st, ct) = t.sin_cos();
    let delta = cross_normalizer(case, p);
    if delta <= tol.abs_tol {
        let name = match case {
            CrossCase::PtildeForH0 => "1",
            CrossCase::PForHtilde0 => "γ² − ρ²cos²δ",
            CrossCase::Delta1 => "Δ1",
            CrossCase::Delta2 => "Δ2",
            CrossCase::Delta3 => "Δ3",
        };
        return Err(PtError::Singular(format!("{name} = {delta:.3e}")));
    }
    let raw = match case {
        CrossCase::PtildeForH0 => m2(c(cd), -I * sd, I * sd, c(-cd)),
        CrossCase::PForHtilde0 => m2(c(g), c(r * cd), c(-r * cd), c(-g)),
        CrossCase::Delta1 => {
            let (sf, cf) = f.sin_cos();
            let p12 = g * st * cf + r * cd * cf + r * sd * ct * sf;
            let p21 = g * st * cf - r * cd * cf - r * sd * ct * sf;
            m2(c(g * ct), c(p12), c(p21), c(-g * ct))
        }
        CrossCase::Delta2 => {
            let (chf, shf) = (f.cosh(), f.sinh());
            let re = g * cd * st * chf;
            let im = g * sd * chf + r * ct * shf;
            m2(c(g * cd * ct), Complex64::new(re, -im), Complex64::new(re, im), c(-g * cd * ct))
        }
        CrossCase::Delta3 => {
            let (chf, shf) = (f.cosh(), f.sinh());
            let (cht, sht) = (t.cosh(), t.sinh());
            let re = -g * cd * sht * shf;
            let im = g * sd * cht * chf + r * shf;
            m2(c(g * cd * cht), Complex64::new(re, -im), Complex64::new(re, im), c(-g * cd * cht))
        }
    };
    Ok(crate::numerics::canonical_sign(&raw.scale_real(1.0 / delta.sqrt())))
}

/// The in-text `P̃` for `H1` at `φ = 0`, before sign fixing.
pub fn ptilde_for_h1_at_phi_zero(p: &Pt2Params) -> ComplexMatrix {
    let (sd, cd) = p.delta.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    m2(c(cd * ct), Complex64::new(cd * st, -sd), Complex64::new(cd * st, sd), c(-cd * ct))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenPt2Params {
    pub theta: f64,
    pub delta: f64,
    pub phi: f64,
    pub alpha: f64,
}

/// `P̄ = cosh φ·e^{iα}·[[cosθ + i sinθ sinδ, i(sinθ cosδ − tanh φ)],
/// [i(sinθ cosδ + tanh φ), cosθ − i sinθ sinδ]]`.
pub fn genpt2_operator(p: &GenPt2Params) -> Result<ComplexMatrix> {
    for (name, x) in [("theta", p.theta), ("delta", p.delta), ("phi", p.phi), ("alpha", p.alpha)] {
        if !x.is_finite() {
            return Err(PtError::Constraint(format!("parameter {name} must be finite")));
        }
    }
    let (st, ct) = p.theta.sin_cos();
    let (sd, cd) = p.delta.sin_cos();
    let th = p.phi.tanh();
    let m = m2(
        Complex64::new(ct, st * sd),
        I * (st * cd - th),
        I * (st * cd + th),
        Complex64::new(ct, -st * sd),
    );
    Ok(m.scale(Complex64::from_polar(p.phi.cosh(), p.alpha)))
}

/// Jordan chain of a 2×2 family at `γ = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogChain {
    pub h: ComplexMatrix,
    pub eigenvalue: f64,
    pub phi0: CVector,
    pub phi1: CVector,
    /// `n0*/n0`, the PT eigenvalue of both chain vectors (PT family only).
    pub pt_eigenvalue: Option<Complex64>,
}

/// `H0` at `γ = ρ` with `Φ0 = n0(1 − sinδ, i cosδ)` and
/// `Φ1 = n0((1 − sinδ)/(γ cosδ), 0) + αΦ0`.
pub fn pt2_jordan_chain(e: f64, gamma: f64, delta: f64, n0: Complex64, alpha: Complex64) -> Result<CatalogChain> {
    if gamma == 0.0 {
        return Err(PtError::Constraint("γ ≠ 0 violated".into()));
    }
    if n0 == ZERO {
        return Err(PtError::Constraint("n0 ≠ 0 violated".into()));
    }
    let (sd, cd) = delta.sin_cos();
    if cd.abs() <= f64::EPSILON {
        return Err(PtError::Singular("γ·cos δ".into()));
    }
    let h = pt2_h0(&Pt2Params::new(e, gamma, gamma, delta));
    let phi0 = v2(n0 * (1.0 - sd), n0 * I * cd);
    let phi1 = v2(n0 * ((1.0 - sd) / (gamma * cd)), ZERO) + &phi0 * alpha;
    Ok(CatalogChain {
        h,
        eigenvalue: e,
        phi0,
        phi1,
        pt_eigenvalue: Some(n0.conj() / n0),
    })
}

/// `H̃0` at `γ = ρ` with `Φ0 = n0(1, −e^{−iδ})` and
/// `Φ1 = n0(0, e^{−iδ}/γ) + αΦ0`.
pub fn pseudo2_jordan_chain(e: f64, gamma: f64, delta: f64, n0: Complex64, alpha: Complex64) -> Result<CatalogChain> {
    if gamma == 0.0 {
        return Err(PtError::Constraint("γ ≠ 0 violated".into()));
    }
    if n0 == ZERO {
        return Err(PtError::Constraint("n0 ≠ 0 violated".into()));
    }
    let h = pseudo2_h0(&Pt2Params::new(e, gamma, gamma, delta));
    let ph = Complex64::from_polar(1.0, -delta);
    let phi0 = v2(n0, -n0 * ph);
    let phi1 = v2(ZERO, n0 * ph / gamma) + &phi0 * alpha;
    Ok(CatalogChain {
        h,
        eigenvalue: e,
        phi0,
        phi1,
        pt_eigenvalue: None,
    })
}
