//! Polytropic equation of state.
//!
//! The closure is ρ = n + A(S)/(γ−1)·n^γ with 1 < γ < 2 and A positive and
//! increasing, so p = A(S)·n^γ and the sound speed stays below √(γ−1) < 1.
//! Everything downstream (weighted densities, coefficient matrices, energy
//! currents) reaches thermodynamics only through this module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EosError {
    #[error("adiabatic index gamma = {0} is outside the open interval (1, 2)")]
    GammaOutOfRange(f64),
    #[error("entropy coefficient must be positive with positive slope on S > 0")]
    NonIncreasingCoefficient,
    #[error("number density must be nonnegative, got {0}")]
    NegativeDensity(f64),
    #[error("pressure must be nonnegative, got {0}")]
    NegativePressure(f64),
    #[error("entropy must be positive, got {0}")]
    NonPositiveEntropy(f64),
}

/// Parameterized family for the entropy coefficient A(S).
///
/// The default family is `Exponential`, A(S) = e^{S−1}, normalized so that
/// A(1) = 1 and the canonical desk values come out exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoeffFamily {
    Exponential,
    /// A(S) = c. Never admissible (A' = 0); exists so that constructing an
    /// equation of state from a bad coefficient family is testable.
    Constant(f64),
    /// A(S) = c·S^k with c, k > 0.
    Power { scale: f64, exponent: f64 },
}

impl CoeffFamily {
    pub fn id(&self) -> &'static str {
        match self {
            CoeffFamily::Exponential => "exp",
            CoeffFamily::Constant(_) => "const",
            CoeffFamily::Power { .. } => "power",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            CoeffFamily::Exponential => vec![],
            CoeffFamily::Constant(c) => vec![c],
            CoeffFamily::Power { scale, exponent } => vec![scale, exponent],
        }
    }

    pub fn from_parts(id: &str, params: &[f64]) -> Result<Self, EosError> {
        match (id, params) {
            ("exp", []) => Ok(CoeffFamily::Exponential),
            ("const", [c]) => Ok(CoeffFamily::Constant(*c)),
            ("power", [scale, exponent]) => Ok(CoeffFamily::Power {
                scale: *scale,
                exponent: *exponent,
            }),
            _ => Err(EosError::NonIncreasingCoefficient),
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            CoeffFamily::Exponential => (s - 1.0).exp(),
            CoeffFamily::Constant(c) => c,
            CoeffFamily::Power { scale, exponent } => scale * s.powf(exponent),
        }
    }

    /// dA/dS.
    pub fn slope(&self, s: f64) -> f64 {
        match *self {
            CoeffFamily::Exponential => (s - 1.0).exp(),
            CoeffFamily::Constant(_) => 0.0,
            CoeffFamily::Power { scale, exponent } => scale * exponent * s.powf(exponent - 1.0),
        }
    }
}

/// Thermodynamic state at one fluid point, in the original (unweighted)
/// variables. `sigma` is the sound speed in units of the speed of light.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoPoint {
    pub n: f64,
    pub s: f64,
    pub rho: f64,
    pub p: f64,
    pub sigma: f64,
}

impl ThermoPoint {
    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// Outcome of checking the four perfect-fluid postulates at one point:
/// ∂ρ/∂n > 0, ∂p/∂n > 0, ∂ρ/∂S ≥ 0, and 0 < σ < 1.
#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    /// False when the point itself is outside the open domain S > 0, p ≥ 0.
    pub domain_ok: bool,
    pub postulates: [PostulateCheck; 4],
}

#[derive(Debug, Clone, Copy)]
pub struct PostulateCheck {
    pub holds: bool,
    pub closed_form: f64,
    pub finite_difference: f64,
}

impl AdmissibilityReport {
    pub fn all_hold(&self) -> bool {
        self.domain_ok && self.postulates.iter().all(|p| p.holds)
    }
}

/// On-disk record for an equation of state inside scenario configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EosRecord {
    pub gamma: f64,
    pub coeff: String,
    #[serde(default)]
    pub coeff_params: Vec<f64>,
}

impl From<PolytropicEos> for EosRecord {
    fn from(eos: PolytropicEos) -> EosRecord {
        EosRecord {
            gamma: eos.gamma,
            coeff: eos.coeff.id().to_string(),
            coeff_params: eos.coeff.params(),
        }
    }
}

impl TryFrom<EosRecord> for PolytropicEos {
    type Error = EosError;
    fn try_from(rec: EosRecord) -> Result<PolytropicEos, EosError> {
        PolytropicEos::new(rec.gamma, CoeffFamily::from_parts(&rec.coeff, &rec.coeff_params)?)
    }
}

/// A validated polytropic equation of state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "EosRecord", try_from = "EosRecord")]
pub struct PolytropicEos {
    gamma: f64,
    coeff: CoeffFamily,
}

impl Default for PolytropicEos {
    fn default() -> Self {
        PolytropicEos::new(4.0 / 3.0, CoeffFamily::Exponential).expect("canonical family")
    }
}

impl PolytropicEos {
    /// Validates 1 < γ < 2 and samples A, A' over S ∈ [10⁻², 10] to reject
    /// non-positive or non-increasing coefficient families.
    pub fn new(gamma: f64, coeff: CoeffFamily) -> Result<Self, EosError> {
        if !(gamma > 1.0 && gamma < 2.0) {
            return Err(EosError::GammaOutOfRange(gamma));
        }
        let lo: f64 = 1e-2;
        let hi: f64 = 10.0;
        for i in 0..=64 {
            let s = lo * (hi / lo).powf(i as f64 / 64.0);
            if !(coeff.value(s) > 0.0) || !(coeff.slope(s) > 0.0) {
                return Err(EosError::NonIncreasingCoefficient);
            }
        }
        Ok(PolytropicEos { gamma, coeff })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coeff(&self) -> CoeffFamily {
        self.coeff
    }

    fn a(&self, s: f64) -> f64 {
        self.coeff.value(s)
    }

    /// ∂ρ/∂n at fixed S.
    pub fn drho_dn(&self, n: f64, s: f64) -> f64 {
        let g = self.gamma;
        1.0 + g * self.a(s) / (g - 1.0) * powg(n, g - 1.0)
    }

    /// ∂p/∂n at fixed S.
    pub fn dp_dn(&self, n: f64, s: f64) -> f64 {
        let g = self.gamma;
        g * self.a(s) * powg(n, g - 1.0)
    }

    /// ∂ρ/∂S at fixed n.
    pub fn drho_ds_fixed_n(&self, n: f64, s: f64) -> f64 {
        self.coeff.slope(s) / (self.gamma - 1.0) * powg(n, self.gamma)
    }

    /// σ² as a function of (n, S).
    pub fn sigma2_of_n(&self, n: f64, s: f64) -> f64 {
        if n == 0.0 {
            return 0.0;
        }
        self.dp_dn(n, s) / self.drho_dn(n, s)
    }

    /// Thermodynamic point from (n, S).
    pub fn thermo_from_n(&self, n: f64, s: f64) -> Result<ThermoPoint, EosError> {
        if n < 0.0 {
            return Err(EosError::NegativeDensity(n));
        }
        if !(s > 0.0) {
            return Err(EosError::NonPositiveEntropy(s));
        }
        let g = self.gamma;
        let a = self.a(s);
        let p = a * powg(n, g);
        let rho = n + a / (g - 1.0) * powg(n, g);
        Ok(ThermoPoint {
            n,
            s,
            rho,
            p,
            sigma: self.sigma2_of_n(n, s).sqrt(),
        })
    }

    /// Thermodynamic point from (S, p): inverts p = A(S)·n^γ in closed form,
    /// realizing ρ = 𝓡(S, p) and σ = 𝓢(S, p).
    pub fn thermo_from_p(&self, s: f64, p: f64) -> Result<ThermoPoint, EosError> {
        if p < 0.0 {
            return Err(EosError::NegativePressure(p));
        }
        if !(s > 0.0) {
            return Err(EosError::NonPositiveEntropy(s));
        }
        let n = (p / self.a(s)).powf(1.0 / self.gamma);
        self.thermo_from_n(n, s)
    }

    /// ∂𝓡/∂p at fixed S. Equals σ^{−2}.
    pub fn rho_p(&self, s: f64, p: f64) -> Result<f64, EosError> {
        let t = self.thermo_from_p(s, p)?;
        Ok(self.drho_dn(t.n, s) / self.dp_dn(t.n, s))
    }

    /// ∂𝓡/∂S at fixed p.
    pub fn rho_s(&self, s: f64, p: f64) -> Result<f64, EosError> {
        let t = self.thermo_from_p(s, p)?;
        let dn_ds = -(t.n / self.gamma) * self.coeff.slope(s) / self.a(s);
        Ok(self.drho_dn(t.n, s) * dn_ds + self.drho_ds_fixed_n(t.n, s))
    }

    /// ∂σ²/∂n at fixed S.
    pub fn dsigma2_dn(&self, n: f64, s: f64) -> f64 {
        let g = self.gamma;
        let d = self.drho_dn(n, s);
        g * (g - 1.0) * self.a(s) * powg(n, g - 2.0) / (d * d)
    }

    /// ∂σ²/∂p at fixed S.
    pub fn sigma2_p(&self, s: f64, p: f64) -> Result<f64, EosError> {
        let t = self.thermo_from_p(s, p)?;
        let dn_dp = t.n / (self.gamma * p);
        Ok(self.dsigma2_dn(t.n, s) * dn_dp)
    }

    /// ∂σ²/∂S at fixed p.
    pub fn sigma2_s(&self, s: f64, p: f64) -> Result<f64, EosError> {
        let t = self.thermo_from_p(s, p)?;
        let d = self.drho_dn(t.n, s);
        let dsig_ds_fixed_n = self.gamma * powg(t.n, self.gamma - 1.0) * self.coeff.slope(s) / (d * d);
        let dn_ds = -(t.n / self.gamma) * self.coeff.slope(s) / self.a(s);
        Ok(dsig_ds_fixed_n + self.dsigma2_dn(t.n, s) * dn_ds)
    }

    /// Checks the four perfect-fluid postulates at (S, p), each by its closed
    /// form with a centered finite-difference cross-check.
    pub fn admissibility_check(&self, s: f64, p: f64) -> AdmissibilityReport {
        let fail = PostulateCheck {
            holds: false,
            closed_form: f64::NAN,
            finite_difference: f64::NAN,
        };
        if !(s > 0.0) || p < 0.0 {
            return AdmissibilityReport {
                domain_ok: false,
                postulates: [fail; 4],
            };
        }
        let t = self.thermo_from_p(s, p).expect("domain checked");
        let n = t.n;
        let hn = (n.abs().max(1e-3)) * 1e-6;
        let fd_drho_dn = if n > hn {
            let up = self.thermo_from_n(n + hn, s).unwrap().rho;
            let dn = self.thermo_from_n(n - hn, s).unwrap().rho;
            (up - dn) / (2.0 * hn)
        } else {
            let up = self.thermo_from_n(n + hn, s).unwrap().rho;
            let at = self.thermo_from_n(n, s).unwrap().rho;
            (up - at) / hn
        };
        let fd_dp_dn = if n > hn {
            let up = self.thermo_from_n(n + hn, s).unwrap().p;
            let dn = self.thermo_from_n(n - hn, s).unwrap().p;
            (up - dn) / (2.0 * hn)
        } else {
            let up = self.thermo_from_n(n + hn, s).unwrap().p;
            let at = self.thermo_from_n(n, s).unwrap().p;
            (up - at) / hn
        };
        let hs = s * 1e-6;
        let fd_drho_ds = {
            let up = self.thermo_from_n(n, s + hs).unwrap().rho;
            let dn = self.thermo_from_n(n, s - hs).unwrap().rho;
            (up - dn) / (2.0 * hs)
        };
        let c1 = self.drho_dn(n, s);
        let c2 = self.dp_dn(n, s);
        let c3 = self.drho_ds_fixed_n(n, s);
        let sigma = t.sigma;
        let rel_ok = |a: f64, b: f64| (a - b).abs() <= 1e-4 * a.abs().max(b.abs()).max(1e-12);
        AdmissibilityReport {
            domain_ok: true,
            postulates: [
                PostulateCheck {
                    holds: c1 > 0.0 && rel_ok(c1, fd_drho_dn),
                    closed_form: c1,
                    finite_difference: fd_drho_dn,
                },
                PostulateCheck {
                    holds: c2 > 0.0 && rel_ok(c2, fd_dp_dn),
                    closed_form: c2,
                    finite_difference: fd_dp_dn,
                },
                PostulateCheck {
                    holds: c3 >= 0.0 && rel_ok(c3, fd_drho_ds),
                    closed_form: c3,
                    finite_difference: fd_drho_ds,
                },
                PostulateCheck {
                    holds: sigma > 0.0 && sigma < 1.0,
                    closed_form: sigma,
                    finite_difference: sigma,
                },
            ],
        }
    }
}

/// n^e with the zero-density limit taken by continuity (used with e > 0
/// except inside `dsigma2_dn`, which is only called at interior points).
fn powg(n: f64, e: f64) -> f64 {
    if n == 0.0 {
        if e > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        n.powf(e)
    }
}
