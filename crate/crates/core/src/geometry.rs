//! Characteristic geometry of the linearized system.
//!
//! The characteristic form factors into two planes and two cones,
//!
//!   𝒬(x;ξ) = ξ₀³ · (U·ξ)³ · h⁻¹(ξ,ξ) · ḡ⁻¹(ξ,ξ),
//!
//! where h is the acoustical metric. Sheet classification, per-factor root
//! extraction, and the Christoffel symbols of the conformal metric all live
//! here.

use crate::eos::PolytropicEos;
use crate::state::{StateError, StateVector};
use crate::{minkowski_inner, MINKOWSKI};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("sound speed {0} is outside (0, 1); acoustical metric degenerates")]
    SoundSpeedDegenerate(f64),
    #[error("the two covectors are parallel")]
    ParallelDirections,
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Eos(#[from] crate::eos::EosError),
}

/// A covector ξ in the fixed rectangular frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covector(pub [f64; 4]);

impl Covector {
    pub fn time() -> Self {
        Covector([1.0, 0.0, 0.0, 0.0])
    }

    /// ḡ⁻¹(ξ, ξ).
    pub fn minkowski_sq(&self) -> f64 {
        minkowski_inner(&self.0, &self.0)
    }

    /// Membership in the positive inner characteristic core:
    /// ξ_μξ^μ < 0 and ξ₀ > 0.
    pub fn in_positive_core(&self) -> bool {
        self.minkowski_sq() < 0.0 && self.0[0] > 0.0
    }

    pub fn scale(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Covariant acoustical metric and its reciprocal.
#[derive(Debug, Clone, Copy)]
pub struct AcousticalPair {
    /// h_{μν} = ḡ_{μν} + (1 − σ²) U_μ U_ν.
    pub h: [[f64; 4]; 4],
    /// (h⁻¹)^{μν} = ḡ^{μν} − (σ⁻² − 1) U^μ U^ν.
    pub h_inv: [[f64; 4]; 4],
    pub sigma: f64,
}

impl AcousticalPair {
    /// h(X, X) for a vector X.
    pub fn h_form(&self, x: &[f64; 4]) -> f64 {
        quad(&self.h, x)
    }

    /// h⁻¹(ξ, ξ) for a covector ξ.
    pub fn hinv_form(&self, xi: &Covector) -> f64 {
        quad(&self.h_inv, &xi.0)
    }

    pub fn hinv_bilinear(&self, a: &Covector, b: &Covector) -> f64 {
        bilin(&self.h_inv, &a.0, &b.0)
    }
}

fn quad(m: &[[f64; 4]; 4], x: &[f64; 4]) -> f64 {
    bilin(m, x, x)
}

fn bilin(m: &[[f64; 4]; 4], x: &[f64; 4], y: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            acc += m[a][b] * x[a] * y[b];
        }
    }
    acc
}

/// The four sheets of the characteristic subset of the cotangent space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sheet {
    /// U·ξ = 0 (a plane).
    PlaneU,
    /// ξ₀ = 0 (a plane; an artifact of carrying ∂_tφ as an unknown).
    PlaneTime,
    /// h⁻¹(ξ,ξ) = 0 (the sound cone).
    SoundCone,
    /// ḡ⁻¹(ξ,ξ) = 0 (the light cone).
    LightCone,
}

/// Value and factorization of the characteristic form at (V, ξ).
#[derive(Debug, Clone)]
pub struct CharDecomposition {
    /// ξ₀³ (U·ξ)³ h⁻¹(ξ,ξ) ḡ⁻¹(ξ,ξ).
    pub value: f64,
    pub xi0: f64,
    pub u_dot_xi: f64,
    pub hinv_xx: f64,
    pub ginv_xx: f64,
    /// Sheets whose defining factor vanishes within the scale-invariant
    /// tolerance band.
    pub sheets: Vec<Sheet>,
}

impl CharDecomposition {
    pub fn on_sheet(&self, s: Sheet) -> bool {
        self.sheets.contains(&s)
    }
}

/// Root multiset of λ ↦ 𝒬(x; λξ + υ) with the per-factor verdicts.
#[derive(Debug, Clone)]
pub struct HyperbolicRoots {
    pub roots: Vec<Complex64>,
    pub hyperbolic: bool,
    pub strictly_hyperbolic: bool,
    pub xi_in_core: bool,
}

/// Christoffel symbols Γ^α_{μν} of the conformal metric e^{2φ}ḡ.
#[derive(Debug, Clone)]
pub struct Christoffel(pub [[[f64; 4]; 4]; 4]);

/// Sound speed at the state's unweighted thermodynamic point.
pub fn sound_speed(eos: &PolytropicEos, v: &StateVector) -> Result<f64, GeometryError> {
    let p = v.p() * (-4.0 * v.phi()).exp();
    Ok(eos.thermo_from_p(v.s(), p)?.sigma)
}

/// Builds the acoustical metric pair at an admissible state.
pub fn acoustical_metrics(
    eos: &PolytropicEos,
    v: &StateVector,
) -> Result<AcousticalPair, GeometryError> {
    if !(v.s() > 0.0 && v.p() > 0.0) {
        return Err(StateError::InadmissibleState { s: v.s(), p: v.p() }.into());
    }
    let sigma = sound_speed(eos, v)?;
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(GeometryError::SoundSpeedDegenerate(sigma));
    }
    Ok(acoustical_from_sigma(v, sigma))
}

/// The metric pair for an explicitly supplied sound speed; σ = 1 collapses
/// both to the Minkowski metric.
pub fn acoustical_from_sigma(v: &StateVector, sigma: f64) -> AcousticalPair {
    let u4 = v.u4();
    let u_low = [-u4[0], u4[1], u4[2], u4[3]];
    let s2 = sigma * sigma;
    let mut h = [[0.0; 4]; 4];
    let mut h_inv = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            h[a][b] = (1.0 - s2) * u_low[a] * u_low[b];
            h_inv[a][b] = -(1.0 / s2 - 1.0) * u4[a] * u4[b];
        }
        h[a][a] += MINKOWSKI[a];
        h_inv[a][a] += MINKOWSKI[a];
    }
    AcousticalPair { h, h_inv, sigma }
}

/// Evaluates and factors the characteristic form, classifying ξ onto the
/// sheets whose factor vanishes within `tol` (scale-invariant: a factor of
/// homogeneity degree d is compared against tol·|ξ|^d).
pub fn characteristic_form(
    eos: &PolytropicEos,
    v: &StateVector,
    xi: &Covector,
    tol: f64,
) -> Result<CharDecomposition, GeometryError> {
    let pair = acoustical_metrics(eos, v)?;
    let u4 = v.u4();
    let xi0 = xi.0[0];
    let u_dot_xi = u4[0] * xi.0[0] + u4[1] * xi.0[1] + u4[2] * xi.0[2] + u4[3] * xi.0[3];
    let hinv_xx = pair.hinv_form(xi);
    let ginv_xx = xi.minkowski_sq();
    let value = xi0.powi(3) * u_dot_xi.powi(3) * hinv_xx * ginv_xx;
    let scale = xi.scale().max(f64::MIN_POSITIVE);
    let mut sheets = Vec::new();
    if u_dot_xi.abs() < tol * scale * u4[0] {
        sheets.push(Sheet::PlaneU);
    }
    if xi0.abs() < tol * scale {
        sheets.push(Sheet::PlaneTime);
    }
    if hinv_xx.abs() < tol * scale * scale * (1.0 / (pair.sigma * pair.sigma)) {
        sheets.push(Sheet::SoundCone);
    }
    if ginv_xx.abs() < tol * scale * scale {
        sheets.push(Sheet::LightCone);
    }
    Ok(CharDecomposition {
        value,
        xi0,
        u_dot_xi,
        hinv_xx,
        ginv_xx,
        sheets,
    })
}

pub const DEFAULT_SHEET_TOL: f64 = 1e-9;

/// Roots of λ ↦ 𝒬(x; λξ + υ), computed per factor: two triple linear roots
/// and two quadratics. Never falls back to a general degree-10 solver.
pub fn hyperbolic_roots(
    eos: &PolytropicEos,
    v: &StateVector,
    xi: &Covector,
    upsilon: &Covector,
) -> Result<HyperbolicRoots, GeometryError> {
    // Parallel directions leave a degenerate pencil: reject via the Gram
    // determinant of the pair.
    let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram = dot(&xi.0, &xi.0) * dot(&upsilon.0, &upsilon.0) - dot(&xi.0, &upsilon.0).powi(2);
    if gram <= 1e-12 * dot(&xi.0, &xi.0) * dot(&upsilon.0, &upsilon.0) {
        return Err(GeometryError::ParallelDirections);
    }
    let pair = acoustical_metrics(eos, v)?;
    let u4 = v.u4();
    let u_dot = |c: &Covector| u4[0] * c.0[0] + u4[1] * c.0[1] + u4[2] * c.0[2] + u4[3] * c.0[3];

    let mut roots: Vec<Complex64> = Vec::with_capacity(10);
    let mut degenerate = false;

    // Linear factors (λ ξ₀ + υ₀)³ and (λ U·ξ + U·υ)³.
    for (a, b) in [(xi.0[0], upsilon.0[0]), (u_dot(xi), u_dot(upsilon))] {
        if a.abs() < 1e-14 * (a.abs() + b.abs()).max(1.0) {
            degenerate = true;
        } else {
            let r = Complex64::new(-b / a, 0.0);
            roots.extend([r, r, r]);
        }
    }

    // Quadratic factors form(λξ + υ, λξ + υ) for h⁻¹ and ḡ⁻¹.
    let mut quad_roots = |fxx: f64, fxy: f64, fyy: f64| {
        if fxx.abs() < 1e-14 * (fxx.abs() + fxy.abs() + fyy.abs()).max(1.0) {
            degenerate = true;
            return;
        }
        let disc = fxy * fxy - fxx * fyy;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            roots.push(Complex64::new((-fxy + sq) / fxx, 0.0));
            roots.push(Complex64::new((-fxy - sq) / fxx, 0.0));
        } else {
            let sq = (-disc).sqrt();
            roots.push(Complex64::new(-fxy / fxx, sq / fxx));
            roots.push(Complex64::new(-fxy / fxx, -sq / fxx));
        }
    };
    quad_roots(
        pair.hinv_form(xi),
        pair.hinv_bilinear(xi, upsilon),
        pair.hinv_form(upsilon),
    );
    quad_roots(
        xi.minkowski_sq(),
        minkowski_inner(&xi.0, &upsilon.0),
        upsilon.minkowski_sq(),
    );

    let scale = roots.iter().fold(1e-30f64, |m, r| m.max(r.norm()));
    let hyperbolic = !degenerate && roots.iter().all(|r| r.im.abs() < 1e-7 * scale.max(1e-12));
    let strictly_hyperbolic = hyperbolic && {
        let mut distinct = true;
        for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if (roots[i] - roots[j]).norm() < 1e-9 * scale {
                    distinct = false;
                }
            }
        }
        distinct
    };
    Ok(HyperbolicRoots {
        roots,
        hyperbolic,
        strictly_hyperbolic,
        xi_in_core: xi.in_positive_core(),
    })
}

/// Γ^α_{μν} = δ^α_ν ∂_μφ + δ^α_μ ∂_νφ − ḡ_{μν} ḡ^{αβ} ∂_βφ.
pub fn christoffel(dphi: &[f64; 4]) -> Christoffel {
    let mut g = [[[0.0; 4]; 4]; 4];
    for alpha in 0..4 {
        // ḡ^{αβ}∂_βφ for the diagonal metric.
        let dphi_up = MINKOWSKI[alpha] * dphi[alpha];
        for mu in 0..4 {
            for nu in 0..4 {
                let mut val = 0.0;
                if alpha == nu {
                    val += dphi[mu];
                }
                if alpha == mu {
                    val += dphi[nu];
                }
                if mu == nu {
                    val -= MINKOWSKI[mu] * dphi_up;
                }
                g[alpha][mu][nu] = val;
            }
        }
    }
    Christoffel(g)
}
