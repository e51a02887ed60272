//! Admissible vector potentials `W : R^m -> R` with two nondegenerate zeros,
//! plus the two built-in families used throughout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{lit, Real};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("two-channel coupling must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("unknown potential `{0}` (expected scalar_quartic or two_channel)")]
    UnknownName(String),
}

/// A potential `W` together with its zeros, derivatives and clip radius.
///
/// `gradient`/`hessian` write into caller-provided slices so the quadrature
/// and solver loops stay allocation-free. `hessian` fills row-major `m*m`
/// and must be symmetric.
pub trait Potential<F: Real>: Send + Sync {
    fn dim(&self) -> usize;
    fn zero_minus(&self) -> Vec<F>;
    fn zero_plus(&self) -> Vec<F>;
    fn value(&self, u: &[F]) -> F;
    fn gradient(&self, u: &[F], out: &mut [F]);
    fn hessian(&self, u: &[F], out: &mut [F]);
    /// Growth radius `M` beyond which `W(s u) >= W(u)` for `s >= 1`.
    fn clip_radius(&self) -> F;
    fn name(&self) -> &'static str;

    /// Coefficients of `t -> W(u + t d)` when `W` is a quartic polynomial,
    /// lowest order first. Enables exact line searches; `None` for general
    /// potentials.
    fn quartic_line_coeffs(&self, _u: &[F], _d: &[F]) -> Option<[F; 5]> {
        None
    }
}

/// `W(u) = (1 - u^2)^2 / 4` on the line, zeros at -1 and 1.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScalarQuartic;

impl<F: Real> Potential<F> for ScalarQuartic {
    fn dim(&self) -> usize {
        1
    }
    fn zero_minus(&self) -> Vec<F> {
        vec![-F::one()]
    }
    fn zero_plus(&self) -> Vec<F> {
        vec![F::one()]
    }
    fn value(&self, u: &[F]) -> F {
        let s = F::one() - u[0] * u[0];
        lit::<F>(0.25) * s * s
    }
    fn gradient(&self, u: &[F], out: &mut [F]) {
        out[0] = (u[0] * u[0] - F::one()) * u[0];
    }
    fn hessian(&self, u: &[F], out: &mut [F]) {
        out[0] = lit::<F>(3.0) * u[0] * u[0] - F::one();
    }
    fn clip_radius(&self) -> F {
        lit(2.0)
    }
    fn name(&self) -> &'static str {
        "scalar_quartic"
    }
    fn quartic_line_coeffs(&self, u: &[F], d: &[F]) -> Option<[F; 5]> {
        // (a + b t + c t^2)^2 / 4 with a = u^2-1, b = 2 u d, c = d^2
        let a = u[0] * u[0] - F::one();
        let b = lit::<F>(2.0) * u[0] * d[0];
        let c = d[0] * d[0];
        let q = lit::<F>(0.25);
        Some([
            q * a * a,
            q * lit::<F>(2.0) * a * b,
            q * (b * b + lit::<F>(2.0) * a * c),
            q * lit::<F>(2.0) * b * c,
            q * c * c,
        ])
    }
}

/// `W(u) = (|u|^2 - 1)^2 / 4 + (A/2) u_2^2`, zeros at (-1, 0) and (1, 0).
///
/// For `A < 1/2` the straight path between the zeros is unstable and the two
/// minimizing connections bow into the upper and lower half planes; for
/// `A > 1/2` the straight connection is the unique minimizer.
#[derive(Debug, Clone, Copy)]
pub struct TwoChannel<F> {
    pub coupling: F,
}

impl<F: Real> Potential<F> for TwoChannel<F> {
    fn dim(&self) -> usize {
        2
    }
    fn zero_minus(&self) -> Vec<F> {
        vec![-F::one(), F::zero()]
    }
    fn zero_plus(&self) -> Vec<F> {
        vec![F::one(), F::zero()]
    }
    fn value(&self, u: &[F]) -> F {
        let r2 = u[0] * u[0] + u[1] * u[1];
        let s = r2 - F::one();
        lit::<F>(0.25) * s * s + lit::<F>(0.5) * self.coupling * u[1] * u[1]
    }
    fn gradient(&self, u: &[F], out: &mut [F]) {
        let s = u[0] * u[0] + u[1] * u[1] - F::one();
        out[0] = s * u[0];
        out[1] = s * u[1] + self.coupling * u[1];
    }
    fn hessian(&self, u: &[F], out: &mut [F]) {
        let s = u[0] * u[0] + u[1] * u[1] - F::one();
        let two = lit::<F>(2.0);
        out[0] = s + two * u[0] * u[0];
        out[1] = two * u[0] * u[1];
        out[2] = out[1];
        out[3] = s + two * u[1] * u[1] + self.coupling;
    }
    fn clip_radius(&self) -> F {
        lit(2.0)
    }
    fn name(&self) -> &'static str {
        "two_channel"
    }
    fn quartic_line_coeffs(&self, u: &[F], d: &[F]) -> Option<[F; 5]> {
        let a = u[0] * u[0] + u[1] * u[1] - F::one();
        let b = lit::<F>(2.0) * (u[0] * d[0] + u[1] * d[1]);
        let c = d[0] * d[0] + d[1] * d[1];
        let q = lit::<F>(0.25);
        let ah = lit::<F>(0.5) * self.coupling;
        Some([
            q * a * a + ah * u[1] * u[1],
            q * lit::<F>(2.0) * a * b + lit::<F>(2.0) * ah * u[1] * d[1],
            q * (b * b + lit::<F>(2.0) * a * c) + ah * d[1] * d[1],
            q * lit::<F>(2.0) * b * c,
            q * c * c,
        ])
    }
}

/// The potential families selectable from a run configuration.
#[derive(Debug, Clone, Copy)]
pub enum BuiltinPotential<F> {
    ScalarQuartic(ScalarQuartic),
    TwoChannel(TwoChannel<F>),
}

/// Name + parameters as they appear in config files and manifests.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PotentialParams {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
}

impl<F: Real> BuiltinPotential<F> {
    pub fn from_params(params: &PotentialParams) -> Result<Self, PotentialError> {
        match params.name.as_str() {
            "scalar_quartic" => Ok(make_scalar_quartic()),
            "two_channel" => make_two_channel(lit(params.coupling.unwrap_or(0.05))),
            other => Err(PotentialError::UnknownName(other.to_string())),
        }
    }

    pub fn params(&self) -> PotentialParams {
        match self {
            BuiltinPotential::ScalarQuartic(_) => PotentialParams {
                name: "scalar_quartic".into(),
                coupling: None,
            },
            BuiltinPotential::TwoChannel(t) => PotentialParams {
                name: "two_channel".into(),
                coupling: t.coupling.to_f64(),
            },
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            BuiltinPotential::ScalarQuartic($p) => $e,
            BuiltinPotential::TwoChannel($p) => $e,
        }
    };
}

impl<F: Real> Potential<F> for BuiltinPotential<F> {
    fn dim(&self) -> usize {
        dispatch!(self, p => Potential::<F>::dim(p))
    }
    fn zero_minus(&self) -> Vec<F> {
        dispatch!(self, p => p.zero_minus())
    }
    fn zero_plus(&self) -> Vec<F> {
        dispatch!(self, p => p.zero_plus())
    }
    fn value(&self, u: &[F]) -> F {
        dispatch!(self, p => p.value(u))
    }
    fn gradient(&self, u: &[F], out: &mut [F]) {
        dispatch!(self, p => p.gradient(u, out))
    }
    fn hessian(&self, u: &[F], out: &mut [F]) {
        dispatch!(self, p => p.hessian(u, out))
    }
    fn clip_radius(&self) -> F {
        dispatch!(self, p => Potential::<F>::clip_radius(p))
    }
    fn name(&self) -> &'static str {
        dispatch!(self, p => Potential::<F>::name(p))
    }
    fn quartic_line_coeffs(&self, u: &[F], d: &[F]) -> Option<[F; 5]> {
        dispatch!(self, p => p.quartic_line_coeffs(u, d))
    }
}

pub fn make_scalar_quartic<F: Real>() -> BuiltinPotential<F> {
    BuiltinPotential::ScalarQuartic(ScalarQuartic)
}

pub fn make_two_channel<F: Real>(coupling: F) -> Result<BuiltinPotential<F>, PotentialError> {
    if coupling <= F::zero() {
        return Err(PotentialError::NonPositiveCoupling(
            coupling.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(BuiltinPotential::TwoChannel(TwoChannel { coupling }))
}

/// Radial projection onto the ball of radius `radius`; identity inside.
pub fn clip_to_ball<F: Real>(u: &mut [F], radius: F) {
    let mut n2 = F::zero();
    for &x in u.iter() {
        n2 += x * x;
    }
    if n2 > radius * radius {
        let s = radius / n2.sqrt();
        for x in u.iter_mut() {
            *x *= s;
        }
    }
}

/// Sample check of the growth condition `W(s z) >= W(z)` for `|z| >= M`,
/// `s in [1, 4]`, on a deterministic direction/radius/scale lattice.
pub fn verify_growth_condition<F: Real, P: Potential<F> + ?Sized>(pot: &P, samples: usize) -> bool {
    let m = pot.dim();
    let radius = pot.clip_radius();
    let samples = samples.max(1);
    let mut z = vec![F::zero(); m];
    let mut zs = vec![F::zero(); m];
    let tol = lit::<F>(-1e-12);
    for k in 0..samples {
        // deterministic direction on the unit sphere (golden-angle lattice for m=2,
        // signs for m=1, mixed harmonics otherwise)
        let t = (k as f64) * 2.399963229728653;
        match m {
            1 => z[0] = if k % 2 == 0 { F::one() } else { -F::one() },
            2 => {
                z[0] = lit(t.cos());
                z[1] = lit(t.sin());
            }
            _ => {
                let mut n2 = F::zero();
                for (j, zj) in z.iter_mut().enumerate() {
                    *zj = lit((t * (j as f64 + 1.0)).sin() + 0.1);
                    n2 += *zj * *zj;
                }
                let inv = n2.sqrt().recip();
                for zj in z.iter_mut() {
                    *zj *= inv;
                }
            }
        }
        for ir in 0..4 {
            let r = radius * (F::one() + lit::<F>(ir as f64));
            for is in 0..8 {
                let s = F::one() + lit::<F>(3.0 * (is as f64) / 7.0);
                for j in 0..m {
                    zs[j] = z[j] * r;
                }
                let w = pot.value(&zs);
                for j in 0..m {
                    zs[j] = z[j] * r * s;
                }
                if pot.value(&zs) - w < tol {
                    return false;
                }
            }
        }
    }
    true
}
