//! Closed-form first-order coefficients of the contradirectional coupler.
//!
//! The output operators are written in the mixed boundary form
//!
//! ```text
//! a(0)  = f1 a(L) + f2 b1(0) + f3 b1†(0) b2(0) + f4 a†(L) b2(0)
//! b1(L) = g1 a(L) + g2 b1(0) + g3 b1†(0) b2(0) + g4 a†(L) b2(0)
//! b2(L) = h1 b2(0) + h2 b1²(0) + h3 b1(0) a(L) + h4 a²(L)
//! ```
//!
//! where `f3, f4, g3, g4, h2, h3, h4` are first order in the nonlinear coupling.

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this value of `Δk·L` the factor `(1 - e^{-iΔkL})/Δk` is taken from
/// its Taylor series instead of the trigonometric form.
pub const SERIES_THRESHOLD: f64 = 1e-6;

/// Physical constants of the device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplerParams {
    /// Linear coupling constant `k`.
    pub k: Complex64,
    /// Nonlinear coupling constant `Γ`.
    pub gamma_nl: Complex64,
    /// Phase mismatch `Δk = |2k₁ − k₂|`.
    pub delta_k: f64,
    /// Interaction length `L`.
    pub length: f64,
}

impl CouplerParams {
    pub fn new(k: Complex64, gamma_nl: Complex64, delta_k: f64, length: f64) -> Result<Self> {
        let p = Self {
            k,
            gamma_nl,
            delta_k,
            length,
        };
        p.validate()?;
        Ok(p)
    }

    /// Real-valued couplings, which is all the figure presets use.
    pub fn real(k: f64, gamma_nl: f64, delta_k: f64, length: f64) -> Result<Self> {
        Self::new(k.into(), gamma_nl.into(), delta_k, length)
    }

    pub fn with_length(self, length: f64) -> Self {
        Self { length, ..self }
    }

    pub fn with_gamma(self, gamma_nl: Complex64) -> Self {
        Self { gamma_nl, ..self }
    }

    pub fn with_delta_k(self, delta_k: f64) -> Self {
        Self { delta_k, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(self.k) {
            return Err(Error::NonFinite("k"));
        }
        if !finite(self.gamma_nl) {
            return Err(Error::NonFinite("gamma_nl"));
        }
        if !self.delta_k.is_finite() {
            return Err(Error::NonFinite("delta_k"));
        }
        if !self.length.is_finite() {
            return Err(Error::NonFinite("length"));
        }
        if self.k.norm() == 0.0 {
            return Err(Error::ZeroLinearCoupling);
        }
        if self.delta_k < 0.0 {
            return Err(Error::Negative {
                name: "delta_k",
                value: self.delta_k,
            });
        }
        if self.length < 0.0 {
            return Err(Error::Negative {
                name: "length",
                value: self.length,
            });
        }
        Ok(())
    }

    /// `|Γ|/|k|`; the solution is only meaningful when this is small.
    pub fn perturbative_ratio(&self) -> f64 {
        self.gamma_nl.norm() / self.k.norm()
    }
}

/// The twelve coefficient functions evaluated at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
    pub f4: Complex64,
    pub g1: Complex64,
    pub g2: Complex64,
    pub g3: Complex64,
    pub g4: Complex64,
    pub h1: Complex64,
    pub h2: Complex64,
    pub h3: Complex64,
    pub h4: Complex64,
}

impl Coefficients {
    pub const NAMES: [&'static str; 12] = [
        "f1", "f2", "f3", "f4", "g1", "g2", "g3", "g4", "h1", "h2", "h3", "h4",
    ];

    /// Zeroth-order identity map (`L = 0`).
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            f1: one,
            f2: zero,
            f3: zero,
            f4: zero,
            g1: zero,
            g2: one,
            g3: zero,
            g4: zero,
            h1: one,
            h2: zero,
            h3: zero,
            h4: zero,
        }
    }

    pub fn values(&self) -> [Complex64; 12] {
        [
            self.f1, self.f2, self.f3, self.f4, self.g1, self.g2, self.g3, self.g4, self.h1,
            self.h2, self.h3, self.h4,
        ]
    }

    pub fn named(&self) -> impl Iterator<Item = (&'static str, Complex64)> {
        Self::NAMES.into_iter().zip(self.values())
    }

    /// `f1 α + f2 β`, the zeroth-order amplitude of mode `a` at the output.
    pub fn a_amplitude(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        self.f1 * alpha + self.f2 * beta
    }

    /// `g1 α + g2 β`, the zeroth-order amplitude of mode `b1` at the output.
    pub fn b1_amplitude(&self, alpha: Complex64, beta: Complex64) -> Complex64 {
        self.g1 * alpha + self.g2 * beta
    }
}

/// `(1 − e^{−iΔkL}) / Δk`, finite as `Δk → 0` where it tends to `iL`.
pub(crate) fn g_minus_over_dk(delta_k: f64, length: f64) -> Complex64 {
    let theta = delta_k * length;
    if theta < SERIES_THRESHOLD {
        // e^{-iθ} ≈ 1 − iθ − θ²/2 + iθ³/6
        length * Complex64::new(theta / 2.0, 1.0 - theta * theta / 6.0)
    } else {
        let half = (theta / 2.0).sin();
        Complex64::new(2.0 * half * half, theta.sin()) / delta_k
    }
}

/// Evaluate all twelve coefficients at `params`.
///
/// The `1/Δk` in the common prefactor is cancelled against the brackets
/// before evaluation, so `Δk = 0` is a valid input.
pub fn compute_coefficients(params: &CouplerParams) -> Result<Coefficients> {
    params.validate()?;
    let k = params.k;
    let kc = k.conj();
    let kappa = k.norm();
    let dk = params.delta_k;
    let x = kappa * params.length;
    // f1² sinh 2x = 2t, f1² cosh 2x = 1 + t², f1² sinh x = s t, f1² cosh x = s
    let s = 1.0 / x.cosh();
    let t = x.tanh();

    // G₊ − 1 = e^{−iΔkL}
    let ep = Complex64::from_polar(1.0, -dk * params.length);
    let gp = 1.0 + ep;
    let gmd = g_minus_over_dk(dk, params.length);
    // C·Δk
    let cd = params.gamma_nl.conj() / (kappa * (dk * dk + 4.0 * kappa * kappa));
    let cdc = cd.conj();

    let f1 = Complex64::from(s);
    let f2 = -I * kc * t / kappa;

    // e^{−iΔkL} s² − (1 + t²) and friends are rewritten with s² = 1 − t² and
    // 1 − e^{−iΔkL} = Δk·gmd so that nothing cancels at small L.
    let f3 = cd * kc * (2.0 * I * dk * t - 2.0 * kappa * (dk * gmd + t * t * gp));
    let f4 = 2.0 * cd * kc * kc * (I * gp * s * t - 2.0 * kappa * s * gmd);
    let g3 =
        -2.0 * cd * kappa * ((dk * dk + 2.0 * kappa * kappa) * s * gmd + I * kappa * gp * s * t);
    let g4 = cd * kc * (2.0 * I * dk * t * ep - 2.0 * kappa * (dk * gmd - t * t * gp));

    let epc = ep.conj();
    let gmdc = gmd.conj();
    let h2 = cdc * kappa / 2.0
        * (4.0 * kappa * kappa * s * s * gmdc + 2.0 * dk * (dk * gmdc + epc * t * t)
            - 4.0 * I * kappa * t);
    // The Δk² term carries e^{iΔkL}; without it h3 fails the coefficient ODE
    // at finite mismatch and a(0), b2†(L) stop commuting at first order.
    let h3 = 2.0
        * cdc
        * k
        * (dk * kappa * s * gmdc + (I * dk * epc - 2.0 * I * kappa * kappa * gmdc) * s * t);
    let h4 = cdc * kappa * k / kc
        * (2.0 * kappa * kappa * s * s * gmdc + t * epc * (2.0 * I * kappa + dk * t));

    let c = Coefficients {
        f1,
        f2,
        f3,
        f4,
        g1: -f2.conj(),
        g2: f1,
        g3,
        g4,
        h1: Complex64::new(1.0, 0.0),
        h2,
        h3,
        h4,
    };
    if c.values()
        .iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
    {
        Ok(c)
    } else {
        Err(Error::NonFinite("coefficients"))
    }
}

/// `h3` with the `Δk²` term lacking its `e^{iΔkL}` factor.
///
/// This is the commonly quoted form; it agrees with [`compute_coefficients`]
/// only as `Δk → 0`. Kept so the ODE oracle can report how far off it is.
pub fn h3_without_phase_factor(params: &CouplerParams) -> Result<Complex64> {
    params.validate()?;
    let k = params.k;
    let kappa = k.norm();
    let dk = params.delta_k;
    let x = kappa * params.length;
    let s = 1.0 / x.cosh();
    let t = x.tanh();
    let gmdc = g_minus_over_dk(dk, params.length).conj();
    let cdc = (params.gamma_nl.conj() / (kappa * (dk * dk + 4.0 * kappa * kappa))).conj();
    Ok(2.0 * cdc * k * (dk * kappa * s * gmdc + (I * dk - 2.0 * I * kappa * kappa * gmdc) * s * t))
}

/// Quadratic-in-`L`, zero-mismatch truncation of the solution.
pub fn short_length_coefficients(params: &CouplerParams) -> Result<Coefficients> {
    params.validate()?;
    let k = params.k;
    let kc = k.conj();
    let l = params.length;
    let gamma = params.gamma_nl;
    let f1 = Complex64::from(1.0 - 0.5 * k.norm_sqr() * l * l);
    let f2 = -I * kc * l;
    let f3 = -gamma.conj() * kc * l * l;
    Ok(Coefficients {
        f1,
        f2,
        f3,
        f4: Complex64::new(0.0, 0.0),
        g1: -f2.conj(),
        g2: f1,
        g3: -2.0 * I * gamma.conj() * l,
        g4: -f3,
        h1: Complex64::new(1.0, 0.0),
        h2: -I * gamma * l,
        h3: -gamma * k * l * l,
        h4: Complex64::new(0.0, 0.0),
    })
}
