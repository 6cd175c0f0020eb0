//! Closed-form nonclassicality witnesses for product coherent inputs.
//!
//! Every expression is first order in the nonlinear coupling. A negative
//! value of any witness (for variances: a value below 1/4) is the
//! corresponding nonclassical signature; nothing is clamped or rescaled.

use num_complex::Complex64;

use crate::coupler::Coefficients;
use crate::error::{Error, Result};
use crate::evaluator::{check_order, MonomialEvaluator};
use crate::ops::binomial;

/// Coherent-state variance of a single quadrature.
pub const VACUUM_VARIANCE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    A,
    B1,
    B2,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::B1, Mode::B2];

    pub fn label(self) -> &'static str {
        match self {
            Mode::A => "a",
            Mode::B1 => "b1",
            Mode::B2 => "b2",
        }
    }
}

/// Amplitudes of the input coherent state `|α⟩|β⟩|γ⟩` of modes `a`, `b1`, `b2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentInput {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl CoherentInput {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Result<Self> {
        for (name, z) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(name));
            }
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            alpha: alpha.into(),
            beta: beta.into(),
            gamma: gamma.into(),
        }
    }

    /// `β = γ = 0`.
    pub fn spontaneous(alpha: Complex64) -> Self {
        Self {
            alpha,
            beta: 0.0.into(),
            gamma: 0.0.into(),
        }
    }

    pub fn vacuum() -> Self {
        Self::real(0.0, 0.0, 0.0)
    }

    pub fn with_gamma(self, gamma: Complex64) -> Self {
        Self { gamma, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPhotons {
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
}

/// `((ΔX)², (ΔY)²)` of one single or compound mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraturePair {
    pub x: f64,
    pub y: f64,
}

impl QuadraturePair {
    fn around_vacuum(shift: f64) -> Self {
        Self {
            x: VACUUM_VARIANCE * (1.0 + shift),
            y: VACUUM_VARIANCE * (1.0 - shift),
        }
    }

    pub fn squeezed(&self) -> bool {
        self.x < VACUUM_VARIANCE || self.y < VACUUM_VARIANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureVariances {
    pub a: QuadraturePair,
    pub b1: QuadraturePair,
    pub b2: QuadraturePair,
    pub ab1: QuadraturePair,
    pub ab2: QuadraturePair,
    pub b1b2: QuadraturePair,
}

/// `(A_1, A_2)` for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezePair {
    pub first: f64,
    pub second: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePowered {
    pub order: u32,
    pub a: SqueezePair,
    pub b1: SqueezePair,
    pub b2: SqueezePair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antibunching {
    pub order: u32,
    pub a: f64,
    pub b1: f64,
    pub b2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermodalAntibunching {
    pub ab1: f64,
    pub ab2: f64,
    pub b1b2: f64,
}

/// Hillery-Zubairy style pair: `E` (type I) and `E'` (type II).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HzPair {
    pub e: f64,
    pub e_prime: f64,
}

impl HzPair {
    pub fn entangled(&self) -> bool {
        self.e < 0.0 || self.e_prime < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HzEntanglement {
    pub m: u32,
    pub n: u32,
    pub ab1: HzPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HzOtherPairs {
    pub ab2: HzPair,
    pub b1b2: HzPair,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duan {
    pub ab1: f64,
    pub ab2: f64,
    pub b1b2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeMode {
    /// `a | b1 b2`
    pub a_b1b2: HzPair,
    /// `a b2 | b1`
    pub ab2_b1: HzPair,
    /// `a b1 | b2`
    pub ab1_b2: HzPair,
    /// `⟨N_a⟩⟨N_b1⟩⟨N_b2⟩ − |⟨a b1 b2⟩|²`
    pub full_separability: f64,
}

fn cj(z: Complex64) -> Complex64 {
    z.conj()
}

/// `z + z*`
fn twice_re(z: Complex64) -> f64 {
    2.0 * z.re
}

pub fn mean_photon_numbers(c: &Coefficients, input: &CoherentInput) -> MeanPhotons {
    let CoherentInput { alpha, beta, gamma } = *input;
    let (ac, bc, gc) = (cj(alpha), cj(beta), cj(gamma));
    let linear_mode = |p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64| {
        p1.norm_sqr() * alpha.norm_sqr()
            + p2.norm_sqr() * beta.norm_sqr()
            + twice_re(
                cj(p1) * p2 * ac * beta
                    + cj(p1) * p3 * ac * bc * gamma
                    + cj(p1) * p4 * ac * ac * gamma
                    + cj(p2) * p3 * bc * bc * gamma
                    + cj(p2) * p4 * bc * ac * gamma,
            )
    };
    MeanPhotons {
        a: linear_mode(c.f1, c.f2, c.f3, c.f4),
        b1: linear_mode(c.g1, c.g2, c.g3, c.g4),
        b2: c.h1.norm_sqr() * gamma.norm_sqr()
            + twice_re(gc * (c.h2 * beta * beta + c.h3 * beta * alpha + c.h4 * alpha * alpha)),
    }
}

/// `(f1 f4 + f2 f3) γ`, the first-order anomalous moment of mode `a`.
fn anomalous_a(c: &Coefficients, gamma: Complex64) -> Complex64 {
    (c.f1 * c.f4 + c.f2 * c.f3) * gamma
}

fn anomalous_b1(c: &Coefficients, gamma: Complex64) -> Complex64 {
    (c.g1 * c.g4 + c.g2 * c.g3) * gamma
}

pub fn quadrature_variances(c: &Coefficients, input: &CoherentInput) -> QuadratureVariances {
    let ma = anomalous_a(c, input.gamma);
    let mb = anomalous_b1(c, input.gamma);
    let mab = ((c.f1 + c.g1) * (c.f4 + c.g4) + (c.f2 + c.g2) * (c.f3 + c.g3)) * input.gamma;
    QuadratureVariances {
        a: QuadraturePair::around_vacuum(twice_re(ma)),
        b1: QuadraturePair::around_vacuum(twice_re(mb)),
        b2: QuadraturePair::around_vacuum(0.0),
        ab1: QuadraturePair::around_vacuum(0.5 * twice_re(mab)),
        ab2: QuadraturePair::around_vacuum(0.5 * twice_re(ma)),
        b1b2: QuadraturePair::around_vacuum(0.5 * twice_re(mb)),
    }
}

pub fn amplitude_powered_squeezing(
    c: &Coefficients,
    input: &CoherentInput,
    n: u32,
) -> Result<AmplitudePowered> {
    check_order("n", n, 2)?;
    let w = (n * n) as f64 / 4.0;
    let pair = |anom: Complex64, amp: Complex64| {
        let v = w * twice_re(anom * amp.powu(2 * n - 2));
        SqueezePair {
            first: v,
            second: -v,
        }
    };
    Ok(AmplitudePowered {
        order: n,
        a: pair(
            anomalous_a(c, input.gamma),
            c.a_amplitude(input.alpha, input.beta),
        ),
        b1: pair(
            anomalous_b1(c, input.gamma),
            c.b1_amplitude(input.alpha, input.beta),
        ),
        b2: SqueezePair {
            first: 0.0,
            second: 0.0,
        },
    })
}

pub fn antibunching(c: &Coefficients, input: &CoherentInput, n: u32) -> Result<Antibunching> {
    check_order("n", n, 2)?;
    let pairs = binomial(n, 2);
    let gc = cj(input.gamma);
    let mode = |amp: Complex64, p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64| {
        pairs
            * amp.norm_sqr().powi(n as i32 - 2)
            * twice_re(gc * amp * amp * (cj(p2) * cj(p3) + cj(p1) * cj(p4)))
    };
    Ok(Antibunching {
        order: n,
        a: mode(
            c.a_amplitude(input.alpha, input.beta),
            c.f1,
            c.f2,
            c.f3,
            c.f4,
        ),
        b1: mode(
            c.b1_amplitude(input.alpha, input.beta),
            c.g1,
            c.g2,
            c.g3,
            c.g4,
        ),
        b2: 0.0,
    })
}

pub fn intermodal_antibunching(c: &Coefficients, input: &CoherentInput) -> IntermodalAntibunching {
    let CoherentInput { alpha, beta, gamma } = *input;
    let (ac, bc) = (cj(alpha), cj(beta));
    let (g1s, g2s) = (c.g1.norm_sqr(), c.g2.norm_sqr());
    let t = (g1s * cj(c.f1) * c.f4 + cj(c.f1) * c.f3 * cj(c.g1) * c.g2) * ac * ac * gamma
        + (g2s * cj(c.f2) * c.f3 + cj(c.f2) * c.f4 * cj(c.g2) * c.g1) * bc * bc * gamma
        + (g1s - g2s) * (cj(c.f2) * c.f4 - cj(c.f1) * c.f3) * ac * bc * gamma;
    IntermodalAntibunching {
        ab1: twice_re(t),
        ab2: 0.0,
        b1b2: 0.0,
    }
}

/// `E^{1,1}_{ab1} = ⟨N_a N_b1⟩ − |⟨a b1†⟩|²`.
fn hz_lowest(c: &Coefficients, input: &CoherentInput) -> f64 {
    let CoherentInput { alpha, beta, gamma } = *input;
    let (ac, bc, gc) = (cj(alpha), cj(beta), cj(gamma));
    let (f1, f2, f3, f4) = (c.f1, c.f2, c.f3, c.f4);
    let (g1, g2, g3, g4) = (c.g1, c.g2, c.g3, c.g4);
    let e = (g1.norm_sqr() * cj(f4) * f1 + cj(f3) * f1 * cj(g2) * g1) * alpha * alpha * gc
        + (f1.norm_sqr() * cj(g1) * g4 + cj(f1) * f2 * cj(g1) * g3) * ac * ac * gamma
        + (g2.norm_sqr() * cj(f3) * f2 + cj(f4) * f2 * cj(g1) * g2) * beta * beta * gc
        + (f2.norm_sqr() * cj(g2) * g3 + cj(f2) * f1 * cj(g2) * g4) * bc * bc * gamma
        + (g1.norm_sqr() - g2.norm_sqr())
            * ((cj(f4) * f2 - cj(f3) * f1) * alpha * beta * gc
                - (cj(g2) * g4 - cj(g1) * g3) * ac * bc * gamma);
    e.re
}

pub fn hz_entanglement(
    c: &Coefficients,
    input: &CoherentInput,
    m: u32,
    n: u32,
) -> Result<HzEntanglement> {
    check_order("m", m, 1)?;
    check_order("n", n, 1)?;
    let xa = c.a_amplitude(input.alpha, input.beta).norm_sqr();
    let xb = c.b1_amplitude(input.alpha, input.beta).norm_sqr();
    let e = (m * n) as f64 * xa.powi(m as i32 - 1) * xb.powi(n as i32 - 1) * hz_lowest(c, input);
    Ok(HzEntanglement {
        m,
        n,
        ab1: HzPair { e, e_prime: -e },
    })
}

/// HZ pairs for `(a, b2)` and `(b1, b2)`, taken from operator products
/// because no closed form is available for them.
pub fn hz_entanglement_other_pairs(c: &Coefficients, input: &CoherentInput) -> HzOtherPairs {
    let ev = MonomialEvaluator::new(c, input);
    // m = n = 1 is always a valid order
    let pair = |j, l| ev.hz(j, l, 1, 1).expect("valid order");
    HzOtherPairs {
        ab2: pair(Mode::A, Mode::B2),
        b1b2: pair(Mode::B1, Mode::B2),
    }
}

/// `d_jl = (Δu)² + (Δv)² − 2`. With `u = 2X_jl` and `v = 2Y_jl` this is
/// `4[(ΔX_jl)² + (ΔY_jl)²] − 2`.
pub fn duan_witness(c: &Coefficients, input: &CoherentInput) -> Duan {
    let q = quadrature_variances(c, input);
    let d = |p: QuadraturePair| 4.0 * (p.x + p.y) - 2.0;
    Duan {
        ab1: d(q.ab1),
        ab2: d(q.ab2),
        b1b2: d(q.b1b2),
    }
}

pub fn three_mode_witnesses(c: &Coefficients, input: &CoherentInput) -> ThreeMode {
    let e = input.gamma.norm_sqr() * hz_lowest(c, input);
    let split = HzPair { e, e_prime: -e };
    ThreeMode {
        a_b1b2: split,
        ab2_b1: split,
        ab1_b2: HzPair {
            e: 0.0,
            e_prime: 0.0,
        },
        full_separability: -e,
    }
}

/// Orders at which the higher-order witnesses are evaluated in a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOrders {
    pub amplitude_powered: Vec<u32>,
    pub antibunching: Vec<u32>,
    pub hz: Vec<(u32, u32)>,
}

impl Default for ReportOrders {
    fn default() -> Self {
        Self {
            amplitude_powered: vec![2, 3],
            antibunching: vec![2, 3, 4, 5],
            hz: vec![(1, 1), (2, 1), (2, 2)],
        }
    }
}

/// Every witness at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub mean_photons: MeanPhotons,
    pub quad_var: QuadratureVariances,
    pub amp_powered: Vec<AmplitudePowered>,
    pub antibunch: Vec<Antibunching>,
    pub intermodal: IntermodalAntibunching,
    pub hz: Vec<HzEntanglement>,
    pub hz_other: HzOtherPairs,
    pub duan: Duan,
    pub three_mode: ThreeMode,
}

impl WitnessReport {
    pub fn evaluate(
        c: &Coefficients,
        input: &CoherentInput,
        orders: &ReportOrders,
    ) -> Result<Self> {
        Ok(Self {
            mean_photons: mean_photon_numbers(c, input),
            quad_var: quadrature_variances(c, input),
            amp_powered: orders
                .amplitude_powered
                .iter()
                .map(|&n| amplitude_powered_squeezing(c, input, n))
                .collect::<Result<_>>()?,
            antibunch: orders
                .antibunching
                .iter()
                .map(|&n| antibunching(c, input, n))
                .collect::<Result<_>>()?,
            intermodal: intermodal_antibunching(c, input),
            hz: orders
                .hz
                .iter()
                .map(|&(m, n)| hz_entanglement(c, input, m, n))
                .collect::<Result<_>>()?,
            hz_other: hz_entanglement_other_pairs(c, input),
            duan: duan_witness(c, input),
            three_mode: three_mode_witnesses(c, input),
        })
    }

    /// Flat `(name, value)` listing in a fixed order.
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut out = Vec::new();
        let mp = &self.mean_photons;
        out.extend([
            ("N_a".to_string(), mp.a),
            ("N_b1".into(), mp.b1),
            ("N_b2".into(), mp.b2),
        ]);
        out.extend(quadrature_entries(&self.quad_var));
        for ap in &self.amp_powered {
            out.extend(amplitude_entries(ap));
        }
        for d in &self.antibunch {
            out.extend(antibunching_entries(d));
        }
        out.extend(intermodal_entries(&self.intermodal));
        for h in &self.hz {
            out.extend(hz_entries(h));
        }
        out.extend(hz_other_entries(&self.hz_other));
        out.extend(duan_entries(&self.duan));
        out.extend(three_mode_entries(&self.three_mode));
        out
    }
}

pub(crate) fn quadrature_entries(q: &QuadratureVariances) -> Vec<(String, f64)> {
    [
        ("a", q.a),
        ("b1", q.b1),
        ("b2", q.b2),
        ("ab1", q.ab1),
        ("ab2", q.ab2),
        ("b1b2", q.b1b2),
    ]
    .into_iter()
    .flat_map(|(l, p)| [(format!("VarX_{l}"), p.x), (format!("VarY_{l}"), p.y)])
    .collect()
}

pub(crate) fn amplitude_entries(ap: &AmplitudePowered) -> Vec<(String, f64)> {
    let n = ap.order;
    [("a", ap.a), ("b1", ap.b1), ("b2", ap.b2)]
        .into_iter()
        .flat_map(|(l, p)| {
            [
                (format!("A1_{l}_n{n}"), p.first),
                (format!("A2_{l}_n{n}"), p.second),
            ]
        })
        .collect()
}

pub(crate) fn antibunching_entries(d: &Antibunching) -> Vec<(String, f64)> {
    let n = d.order;
    vec![
        (format!("D_a_n{n}"), d.a),
        (format!("D_b1_n{n}"), d.b1),
        (format!("D_b2_n{n}"), d.b2),
    ]
}

pub(crate) fn intermodal_entries(d: &IntermodalAntibunching) -> Vec<(String, f64)> {
    vec![
        ("D_ab1".into(), d.ab1),
        ("D_ab2".into(), d.ab2),
        ("D_b1b2".into(), d.b1b2),
    ]
}

pub(crate) fn hz_entries(h: &HzEntanglement) -> Vec<(String, f64)> {
    let (m, n) = (h.m, h.n);
    vec![
        (format!("E_ab1_m{m}n{n}"), h.ab1.e),
        (format!("Ep_ab1_m{m}n{n}"), h.ab1.e_prime),
    ]
}

pub(crate) fn hz_other_entries(h: &HzOtherPairs) -> Vec<(String, f64)> {
    vec![
        ("E_ab2".into(), h.ab2.e),
        ("Ep_ab2".into(), h.ab2.e_prime),
        ("E_b1b2".into(), h.b1b2.e),
        ("Ep_b1b2".into(), h.b1b2.e_prime),
    ]
}

pub(crate) fn duan_entries(d: &Duan) -> Vec<(String, f64)> {
    vec![
        ("d_ab1".into(), d.ab1),
        ("d_ab2".into(), d.ab2),
        ("d_b1b2".into(), d.b1b2),
    ]
}

pub(crate) fn three_mode_entries(t: &ThreeMode) -> Vec<(String, f64)> {
    vec![
        ("E_a|b1b2".into(), t.a_b1b2.e),
        ("Ep_a|b1b2".into(), t.a_b1b2.e_prime),
        ("E_ab2|b1".into(), t.ab2_b1.e),
        ("Ep_ab2|b1".into(), t.ab2_b1.e_prime),
        ("E_ab1|b2".into(), t.ab1_b2.e),
        ("Ep_ab1|b2".into(), t.ab1_b2.e_prime),
        ("full_sep".into(), t.full_separability),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupler::{compute_coefficients, CouplerParams};

    fn coeffs(gamma_nl: f64, delta_k: f64, length: f64) -> Coefficients {
        compute_coefficients(&CouplerParams::real(0.1, gamma_nl, delta_k, length).unwrap()).unwrap()
    }

    fn fig2() -> (Coefficients, CoherentInput) {
        (
            coeffs(0.001, 1e-4, 40.0),
            CoherentInput::real(5.0, 2.0, 1.0),
        )
    }

    fn complex_point() -> (Coefficients, CoherentInput) {
        let c = compute_coefficients(
            &CouplerParams::new(
                Complex64::new(0.07, -0.05),
                Complex64::new(4e-4, 7e-4),
                0.03,
                11.0,
            )
            .unwrap(),
        )
        .unwrap();
        let input = CoherentInput::new(
            Complex64::new(2.5, -1.5),
            Complex64::new(-0.5, 1.8),
            Complex64::new(0.6, 0.9),
        )
        .unwrap();
        (c, input)
    }

    #[track_caller]
    fn assert_close(a: f64, b: f64, scale: f64) {
        let tol = 1e-12 * a.abs().max(b.abs()).max(scale);
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn b2_quadratures_are_vacuum_like() {
        let (c, input) = fig2();
        let q = quadrature_variances(&c, &input);
        assert_eq!(q.b2.x, VACUUM_VARIANCE);
        assert_eq!(q.b2.y, VACUUM_VARIANCE);
    }

    #[test]
    fn compound_b2_variances_follow_single_mode() {
        let (c, input) = complex_point();
        let q = quadrature_variances(&c, &input);
        for (pair, single) in [(q.ab2, q.a), (q.b1b2, q.b1)] {
            assert_close(pair.x, single.x / 2.0 + 0.125, 1.0);
            assert_close(pair.y, single.y / 2.0 + 0.125, 1.0);
        }
    }

    #[test]
    fn zero_gamma_gives_coherent_statistics() {
        let (c, input) = fig2();
        let input = input.with_gamma(0.0.into());
        let r = WitnessReport::evaluate(&c, &input, &ReportOrders::default()).unwrap();
        for (name, v) in r.entries() {
            if name.starts_with("Var") {
                assert_eq!(v, VACUUM_VARIANCE, "{name}");
            } else if !name.starts_with("N_") {
                assert_eq!(v, 0.0, "{name}");
            }
        }
    }

    #[test]
    fn linear_limit_conserves_photons() {
        let c = coeffs(0.0, 1e-4, 1.0);
        let n = mean_photon_numbers(&c, &CoherentInput::real(5.0, 2.0, 0.0));
        assert!((n.a + n.b1 - 29.0).abs() < 1e-12);
        assert_eq!(n.b2, 0.0);
    }

    #[test]
    fn higher_order_hz_factorises() {
        let (c, input) = fig2();
        let e11 = hz_entanglement(&c, &input, 1, 1).unwrap().ab1.e;
        let e21 = hz_entanglement(&c, &input, 2, 1).unwrap().ab1.e;
        let x = c.a_amplitude(input.alpha, input.beta).norm_sqr();
        assert_close(e21, 2.0 * x * e11, 0.0);
    }

    #[test]
    fn orders_are_checked() {
        let (c, input) = fig2();
        assert!(antibunching(&c, &input, 1).is_err());
        assert!(amplitude_powered_squeezing(&c, &input, 1).is_err());
        assert!(hz_entanglement(&c, &input, 0, 1).is_err());
        assert!(hz_entanglement(&c, &input, 1, 0).is_err());
    }

    #[test]
    fn non_finite_amplitude_rejected() {
        let z = Complex64::new(0.0, 0.0);
        assert!(CoherentInput::new(Complex64::new(f64::NAN, 0.0), z, z).is_err());
    }

    fn check_against_evaluator(c: &Coefficients, input: &CoherentInput) {
        let ev = MonomialEvaluator::new(c, input);

        let n = mean_photon_numbers(c, input);
        let ne = ev.mean_photon_numbers();
        assert_close(n.a, ne[0], 0.0);
        assert_close(n.b1, ne[1], 0.0);
        assert_close(n.b2, ne[2], 1e-300);

        let q = quadrature_variances(c, input);
        let pairs = [
            (q.a, ev.quadrature_variance(Mode::A)),
            (q.b1, ev.quadrature_variance(Mode::B1)),
            (q.b2, ev.quadrature_variance(Mode::B2)),
            (q.ab1, ev.compound_quadrature_variance(Mode::A, Mode::B1)),
            (q.ab2, ev.compound_quadrature_variance(Mode::A, Mode::B2)),
            (q.b1b2, ev.compound_quadrature_variance(Mode::B1, Mode::B2)),
        ];
        for (closed, (x, y)) in pairs {
            assert_close(closed.x, x, 0.0);
            assert_close(closed.y, y, 0.0);
            // the deviation from 1/4 carries the physics; allow for the f64 rounding of 1/4 + δ
            assert_close(closed.x - 0.25, x - 0.25, 1e-4);
            assert_close(closed.y - 0.25, y - 0.25, 1e-4);
        }

        for order in [2, 3] {
            let ap = amplitude_powered_squeezing(c, input, order).unwrap();
            for (m, p) in [(Mode::A, ap.a), (Mode::B1, ap.b1), (Mode::B2, ap.b2)] {
                let (a1, a2) = ev.amplitude_powered(m, order).unwrap();
                assert_close(p.first, a1, 1e-16);
                assert_close(p.second, a2, 1e-16);
            }
        }

        for order in 2..=5 {
            let d = antibunching(c, input, order).unwrap();
            assert_close(d.a, ev.antibunching(Mode::A, order).unwrap(), 1e-16);
            assert_close(d.b1, ev.antibunching(Mode::B1, order).unwrap(), 1e-16);
            assert_close(d.b2, ev.antibunching(Mode::B2, order).unwrap(), 1e-16);
        }

        let d = intermodal_antibunching(c, input);
        assert_close(d.ab1, ev.intermodal_antibunching(Mode::A, Mode::B1), 1e-16);
        assert_close(d.ab2, ev.intermodal_antibunching(Mode::A, Mode::B2), 1e-16);
        assert_close(
            d.b1b2,
            ev.intermodal_antibunching(Mode::B1, Mode::B2),
            1e-16,
        );

        for (m, n) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let h = hz_entanglement(c, input, m, n).unwrap().ab1;
            let he = ev.hz(Mode::A, Mode::B1, m, n).unwrap();
            assert_close(h.e, he.e, 1e-16);
            assert_close(h.e_prime, he.e_prime, 1e-16);
        }

        let dd = duan_witness(c, input);
        assert!(dd.ab1.abs() < 1e-12);
        assert!(ev.duan(Mode::A, Mode::B1).abs() < 1e-12);
        assert!(ev.duan(Mode::A, Mode::B2).abs() < 1e-12);
        assert!(ev.duan(Mode::B1, Mode::B2).abs() < 1e-12);

        // exact zeros at first order only cancel to the rounding of the
        // coefficients, amplified by the photon-number products involved
        let scale = n.a * n.b1 * input.gamma.norm_sqr();
        let t = three_mode_witnesses(c, input);
        for (closed, single) in [
            (t.a_b1b2, Mode::A),
            (t.ab2_b1, Mode::B1),
            (t.ab1_b2, Mode::B2),
        ] {
            let e = ev.three_mode_bipartition(single);
            assert_close(closed.e, e.e, scale);
            assert_close(closed.e_prime, e.e_prime, scale);
        }
        assert_close(t.full_separability, ev.full_separability(), scale);
    }

    #[test]
    fn closed_forms_match_evaluator_at_fig2() {
        let (c, input) = fig2();
        check_against_evaluator(&c, &input);
    }

    #[test]
    fn closed_forms_match_evaluator_for_complex_couplings() {
        let (c, input) = complex_point();
        check_against_evaluator(&c, &input);
    }
}
