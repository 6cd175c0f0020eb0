//! Independent witness evaluation from the operator solution.
//!
//! Each output mode is built as an [`OpPoly`] from the twelve coefficients,
//! the operator product a witness is defined by is formed and normal-ordered,
//! and its coherent-state expectation is taken. Nothing here uses the
//! closed-form witness expressions, so the two paths check each other.

use num_complex::Complex64;

use crate::coupler::Coefficients;
use crate::dd::{Cdd, Dd};
use crate::error::{Error, Result};
use crate::ops::{FirstOrder, Monomial, OpPoly};
use crate::witnesses::{CoherentInput, HzPair, Mode};

const A: usize = 0;
const B1: usize = 1;
const B2: usize = 2;

/// First-order truncation used for witnesses.
pub const WITNESS_ORDER: u8 = 1;

/// Output operators `a(0)`, `b1(L)`, `b2(L)` in the input basis.
#[derive(Debug, Clone)]
pub struct OutputModes {
    pub a: OpPoly,
    pub b1: OpPoly,
    pub b2: OpPoly,
}

impl OutputModes {
    pub fn from_coefficients(c: &Coefficients) -> Self {
        let ann = Monomial::annihilate;
        let cre = Monomial::create;
        let b1d_b2 = cre(B1, 1).times(ann(B2, 1));
        let ad_b2 = cre(A, 1).times(ann(B2, 1));
        let linear = |x: Complex64, y: Complex64, u: Complex64, v: Complex64| {
            OpPoly::term(0, ann(A, 1), x)
                .add(&OpPoly::term(0, ann(B1, 1), y))
                .add(&OpPoly::term(1, b1d_b2, u))
                .add(&OpPoly::term(1, ad_b2, v))
        };
        let a = linear(c.f1, c.f2, c.f3, c.f4);
        let b1 = linear(c.g1, c.g2, c.g3, c.g4);
        let b2 = OpPoly::term(0, ann(B2, 1), c.h1)
            .add(&OpPoly::term(1, ann(B1, 2), c.h2))
            .add(&OpPoly::term(1, ann(B1, 1).times(ann(A, 1)), c.h3))
            .add(&OpPoly::term(1, ann(A, 2), c.h4));
        Self { a, b1, b2 }
    }

    pub fn mode(&self, m: Mode) -> &OpPoly {
        match m {
            Mode::A => &self.a,
            Mode::B1 => &self.b1,
            Mode::B2 => &self.b2,
        }
    }
}

/// Input operators `a(L)`, `b1(0)`, `b2(0)` themselves.
pub fn input_mode(m: Mode) -> OpPoly {
    let idx = match m {
        Mode::A => A,
        Mode::B1 => B1,
        Mode::B2 => B2,
    };
    OpPoly::term(0, Monomial::annihilate(idx, 1), 1.0)
}

pub fn amplitudes(input: &CoherentInput) -> [Complex64; 3] {
    [input.alpha, input.beta, input.gamma]
}

/// Witness evaluator working from operator products.
#[derive(Debug, Clone)]
pub struct MonomialEvaluator {
    modes: OutputModes,
    amps: [Complex64; 3],
}

fn real(x: FirstOrder) -> f64 {
    x.value().re.to_f64()
}

impl MonomialEvaluator {
    pub fn new(coeffs: &Coefficients, input: &CoherentInput) -> Self {
        Self {
            modes: OutputModes::from_coefficients(coeffs),
            amps: amplitudes(input),
        }
    }

    fn op(&self, m: Mode) -> &OpPoly {
        self.modes.mode(m)
    }

    fn mul(x: &OpPoly, y: &OpPoly) -> OpPoly {
        x.mul(y, WITNESS_ORDER)
    }

    pub fn expect(&self, p: &OpPoly) -> FirstOrder {
        p.expectation(self.amps).first_order()
    }

    fn variance(&self, p: &OpPoly) -> FirstOrder {
        let mean = self.expect(p);
        self.expect(&Self::mul(p, p)) - mean * mean
    }

    /// `(j + j†)/2` and `−i(j − j†)/2`.
    fn quadratures(j: &OpPoly) -> (OpPoly, OpPoly) {
        let half = Cdd::from(0.5);
        let x = j.add(&j.dagger()).scale(half);
        let y = j
            .sub(&j.dagger())
            .scale(Cdd::from(Complex64::new(0.0, -0.5)));
        (x, y)
    }

    fn number(&self, m: Mode) -> OpPoly {
        Self::mul(&self.op(m).dagger(), self.op(m))
    }

    pub fn mean_photon_numbers(&self) -> [f64; 3] {
        Mode::ALL.map(|m| real(self.expect(&self.number(m))))
    }

    /// `((ΔX_j)², (ΔY_j)²)`.
    pub fn quadrature_variance(&self, m: Mode) -> (f64, f64) {
        let (x, y) = Self::quadratures(self.op(m));
        (real(self.variance(&x)), real(self.variance(&y)))
    }

    /// Compound-mode variances with the `1/(2√2)` normalisation.
    pub fn compound_quadrature_variance(&self, j: Mode, l: Mode) -> (f64, f64) {
        let (xj, yj) = Self::quadratures(self.op(j));
        let (xl, yl) = Self::quadratures(self.op(l));
        let half = Dd::new(0.5);
        (
            real(self.variance(&xj.add(&xl)).scale(half)),
            real(self.variance(&yj.add(&yl)).scale(half)),
        )
    }

    /// `(A_1, A_2)` for `Y_1 = (jⁿ + j†ⁿ)/2`, `Y_2 = i(j†ⁿ − jⁿ)/2`.
    pub fn amplitude_powered(&self, m: Mode, n: u32) -> Result<(f64, f64)> {
        check_order("n", n, 2)?;
        let jn = self.op(m).pow(n, WITNESS_ORDER);
        let jdn = jn.dagger();
        let y1 = jn.add(&jdn).scale(Cdd::from(0.5));
        let y2 = jdn.sub(&jn).scale(Cdd::from(Complex64::new(0.0, 0.5)));
        let comm = self.expect(&y1.commutator(&y2, WITNESS_ORDER));
        let bound = comm.abs().scale(Dd::new(0.5));
        Ok((
            real(self.variance(&y1) - bound),
            real(self.variance(&y2) - bound),
        ))
    }

    /// `⟨j†ⁿ jⁿ⟩ − ⟨j† j⟩ⁿ`.
    pub fn antibunching(&self, m: Mode, n: u32) -> Result<f64> {
        check_order("n", n, 2)?;
        let jn = self.op(m).pow(n, WITNESS_ORDER);
        let moment = self.expect(&Self::mul(&jn.dagger(), &jn));
        let mean = self.expect(&self.number(m));
        Ok(real(moment - mean.powi(n)))
    }

    /// `⟨j† l† l j⟩ − ⟨j† j⟩⟨l† l⟩`.
    pub fn intermodal_antibunching(&self, j: Mode, l: Mode) -> f64 {
        let jo = self.op(j);
        let lo = self.op(l);
        let pair = Self::mul(lo, jo);
        let moment = self.expect(&Self::mul(&pair.dagger(), &pair));
        let nj = self.expect(&self.number(j));
        let nl = self.expect(&self.number(l));
        real(moment - nj * nl)
    }

    /// Hillery-Zubairy pair `(E^{m,n}, E'^{m,n})` for modes `(j, l)`.
    pub fn hz(&self, j: Mode, l: Mode, m: u32, n: u32) -> Result<HzPair> {
        check_order("m", m, 1)?;
        check_order("n", n, 1)?;
        let jm = self.op(j).pow(m, WITNESS_ORDER);
        let ln = self.op(l).pow(n, WITNESS_ORDER);
        let nj = Self::mul(&jm.dagger(), &jm);
        let nl = Self::mul(&ln.dagger(), &ln);
        let joint = self.expect(&Self::mul(&nj, &nl));
        let cross = self.expect(&Self::mul(&jm, &ln.dagger()));
        let direct = self.expect(&Self::mul(&jm, &ln));
        Ok(HzPair {
            e: real(joint - cross.norm_sqr()),
            e_prime: real(self.expect(&nj) * self.expect(&nl) - direct.norm_sqr()),
        })
    }

    /// `(Δu)² + (Δv)² − 2`.
    pub fn duan(&self, j: Mode, l: Mode) -> f64 {
        let (xj, yj) = Self::quadratures(self.op(j));
        let (xl, yl) = Self::quadratures(self.op(l));
        // u = √2 (X_j + X_l), v = √2 (Y_j + Y_l)
        let two = Dd::new(2.0);
        let vu = self.variance(&xj.add(&xl)).scale(two);
        let vv = self.variance(&yj.add(&yl)).scale(two);
        real(vu + vv - FirstOrder::constant(2.0))
    }

    /// Bipartition witnesses with `single` on one side, `E` and `E'` at `m=n=l=1`.
    pub fn three_mode_bipartition(&self, single: Mode) -> HzPair {
        let [p, q] = others(single);
        let ns = self.number(single);
        let np = self.number(p);
        let nq = self.number(q);
        let all = self.expect(&Self::mul(&Self::mul(&np, &nq), &ns));
        let pair_n = self.expect(&Self::mul(&np, &nq));
        let pq = Self::mul(self.op(p), self.op(q));
        let cross = self.expect(&Self::mul(&pq, &self.op(single).dagger()));
        let triple = self.expect(&Self::mul(&pq, self.op(single)));
        HzPair {
            e: real(all - cross.norm_sqr()),
            e_prime: real(pair_n * self.expect(&ns) - triple.norm_sqr()),
        }
    }

    /// `⟨N_a⟩⟨N_b1⟩⟨N_b2⟩ − |⟨a b1 b2⟩|²`.
    pub fn full_separability(&self) -> f64 {
        let [na, nb1, nb2] = Mode::ALL.map(|m| self.expect(&self.number(m)));
        let abc = Self::mul(&Self::mul(&self.modes.a, &self.modes.b1), &self.modes.b2);
        let t = self.expect(&abc);
        real(na * nb1 * nb2 - t.norm_sqr())
    }
}

fn others(m: Mode) -> [Mode; 2] {
    match m {
        Mode::A => [Mode::B1, Mode::B2],
        Mode::B1 => [Mode::A, Mode::B2],
        Mode::B2 => [Mode::A, Mode::B1],
    }
}

pub(crate) fn check_order(name: &'static str, value: u32, min: u32) -> Result<()> {
    if value < min {
        return Err(Error::OrderTooSmall { name, min, value });
    }
    Ok(())
}

/// One witness computed both ways.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub name: String,
    pub closed: f64,
    pub independent: f64,
    /// Size of the zeroth-order terms that cancel inside the witness; their
    /// f64 rounding bounds how well a value that should vanish can vanish.
    pub scale: f64,
}

impl Comparison {
    /// `|closed − independent| ≤ rel·max(|closed|, |independent|) + rel·1e-3·scale`
    pub fn agrees(&self, rel: f64) -> bool {
        self.error() <= rel * (self.closed.abs().max(self.independent.abs()) + 1e-3 * self.scale)
    }

    pub fn error(&self) -> f64 {
        (self.closed - self.independent).abs()
    }
}

/// Every witness of a report, closed form against the operator-product
/// evaluation. Variances are compared as deviations from 1/4.
pub fn compare_with_closed_forms(
    c: &Coefficients,
    input: &CoherentInput,
    orders: &crate::witnesses::ReportOrders,
) -> Result<Vec<Comparison>> {
    use crate::witnesses as w;
    let ev = MonomialEvaluator::new(c, input);
    let xa = c.a_amplitude(input.alpha, input.beta).norm_sqr();
    let xb = c.b1_amplitude(input.alpha, input.beta).norm_sqr();
    let xg = input.gamma.norm_sqr();
    let mut out = Vec::new();
    let mut push = |name: String, closed: f64, independent: f64, scale: f64| {
        out.push(Comparison {
            name,
            closed,
            independent,
            scale,
        })
    };

    let n = w::mean_photon_numbers(c, input);
    let ne = ev.mean_photon_numbers();
    push("N_a".into(), n.a, ne[0], xa);
    push("N_b1".into(), n.b1, ne[1], xb);
    push("N_b2".into(), n.b2, ne[2], xg);

    let q = w::quadrature_variances(c, input);
    let pairs = [
        ("a", q.a, ev.quadrature_variance(Mode::A)),
        ("b1", q.b1, ev.quadrature_variance(Mode::B1)),
        ("b2", q.b2, ev.quadrature_variance(Mode::B2)),
        (
            "ab1",
            q.ab1,
            ev.compound_quadrature_variance(Mode::A, Mode::B1),
        ),
        (
            "ab2",
            q.ab2,
            ev.compound_quadrature_variance(Mode::A, Mode::B2),
        ),
        (
            "b1b2",
            q.b1b2,
            ev.compound_quadrature_variance(Mode::B1, Mode::B2),
        ),
    ];
    for (label, closed, (x, y)) in pairs {
        push(format!("VarX_{label}"), closed.x - 0.25, x - 0.25, 0.25);
        push(format!("VarY_{label}"), closed.y - 0.25, y - 0.25, 0.25);
    }

    let amps = [(Mode::A, xa), (Mode::B1, xb), (Mode::B2, xg)];
    for &order in &orders.amplitude_powered {
        let ap = w::amplitude_powered_squeezing(c, input, order)?;
        for ((m, x), p) in amps.iter().zip([ap.a, ap.b1, ap.b2]) {
            let (a1, a2) = ev.amplitude_powered(*m, order)?;
            let scale = (order * order) as f64 * x.powi(order as i32 - 1).max(1.0);
            push(format!("A1_{}_n{order}", m.label()), p.first, a1, scale);
            push(format!("A2_{}_n{order}", m.label()), p.second, a2, scale);
        }
    }

    for &order in &orders.antibunching {
        let d = w::antibunching(c, input, order)?;
        for ((m, x), v) in amps.iter().zip([d.a, d.b1, d.b2]) {
            let scale = x.powi(order as i32).max(1.0);
            push(
                format!("D_{}_n{order}", m.label()),
                v,
                ev.antibunching(*m, order)?,
                scale,
            );
        }
    }

    let d = w::intermodal_antibunching(c, input);
    push(
        "D_ab1".into(),
        d.ab1,
        ev.intermodal_antibunching(Mode::A, Mode::B1),
        xa * xb,
    );
    push(
        "D_ab2".into(),
        d.ab2,
        ev.intermodal_antibunching(Mode::A, Mode::B2),
        xa * xg,
    );
    push(
        "D_b1b2".into(),
        d.b1b2,
        ev.intermodal_antibunching(Mode::B1, Mode::B2),
        xb * xg,
    );

    for &(m, n) in &orders.hz {
        let h = w::hz_entanglement(c, input, m, n)?.ab1;
        let he = ev.hz(Mode::A, Mode::B1, m, n)?;
        let scale = xa.powi(m as i32) * xb.powi(n as i32);
        push(format!("E_ab1_m{m}n{n}"), h.e, he.e, scale);
        push(format!("Ep_ab1_m{m}n{n}"), h.e_prime, he.e_prime, scale);
    }

    let d = w::duan_witness(c, input);
    push("d_ab1".into(), d.ab1, ev.duan(Mode::A, Mode::B1), 2.0);
    push("d_ab2".into(), d.ab2, ev.duan(Mode::A, Mode::B2), 2.0);
    push("d_b1b2".into(), d.b1b2, ev.duan(Mode::B1, Mode::B2), 2.0);

    let t = w::three_mode_witnesses(c, input);
    let scale = xa * xb * xg;
    for (label, closed, single) in [
        ("a|b1b2", t.a_b1b2, Mode::A),
        ("ab2|b1", t.ab2_b1, Mode::B1),
        ("ab1|b2", t.ab1_b2, Mode::B2),
    ] {
        let e = ev.three_mode_bipartition(single);
        push(format!("E_{label}"), closed.e, e.e, scale);
        push(format!("Ep_{label}"), closed.e_prime, e.e_prime, scale);
    }
    push(
        "full_sep".into(),
        t.full_separability,
        ev.full_separability(),
        scale,
    );
    Ok(out)
}
