//! Normal-ordered polynomials in the input ladder operators.
//!
//! The basis modes are the operators the solution is expressed in: `a(L)`,
//! `b1(0)` and `b2(0)`. Each term also carries its perturbative order (the
//! number of first-order coefficients multiplied into it) so products can be
//! truncated.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::dd::{Cdd, Dd};

pub const MODES: usize = 3;

/// Exponents `[a†, a, b1†, b1, b2†, b2]`, always in normal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub [u8; 2 * MODES]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; 2 * MODES]);

    pub fn annihilate(mode: usize, power: u8) -> Self {
        let mut e = [0; 2 * MODES];
        e[2 * mode + 1] = power;
        Monomial(e)
    }

    pub fn create(mode: usize, power: u8) -> Self {
        let mut e = [0; 2 * MODES];
        e[2 * mode] = power;
        Monomial(e)
    }

    /// Product of two commuting-mode monomials (no reordering needed).
    pub fn times(self, other: Monomial) -> Monomial {
        let mut e = self.0;
        for (x, y) in e.iter_mut().zip(other.0) {
            *x += y;
        }
        Monomial(e)
    }

    fn dagger(self) -> Monomial {
        let mut e = self.0;
        for m in 0..MODES {
            e.swap(2 * m, 2 * m + 1);
        }
        Monomial(e)
    }
}

/// `(x†^p x^q)(x†^r x^s) = Σ_j C(q,j) C(r,j) j! x†^{p+r-j} x^{q+s-j}`
fn reorder_single(p: u8, q: u8, r: u8, s: u8) -> Vec<(u8, u8, f64)> {
    (0..=q.min(r))
        .map(|j| {
            let w =
                binomial(q as u32, j as u32) * binomial(r as u32, j as u32) * factorial(j as u32);
            (p + r - j, q + s - j, w)
        })
        .collect()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn normal_product(x: Monomial, y: Monomial) -> Vec<(Monomial, f64)> {
    let mut out = vec![(Monomial::ONE, 1.0)];
    for m in 0..MODES {
        let parts = reorder_single(x.0[2 * m], x.0[2 * m + 1], y.0[2 * m], y.0[2 * m + 1]);
        let mut next = Vec::with_capacity(out.len() * parts.len());
        for (mono, w) in &out {
            for &(c, a, w2) in &parts {
                let mut e = mono.0;
                e[2 * m] = c;
                e[2 * m + 1] = a;
                next.push((Monomial(e), w * w2));
            }
        }
        out = next;
    }
    out
}

/// Operator polynomial keyed by `(order, monomial)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OpPoly {
    terms: BTreeMap<(u8, Monomial), Cdd>,
}

impl OpPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<Cdd>) -> Self {
        Self::term(0, Monomial::ONE, c)
    }

    pub fn term(order: u8, mono: Monomial, coef: impl Into<Cdd>) -> Self {
        let mut p = Self::zero();
        p.push(order, mono, coef.into());
        p
    }

    pub fn push(&mut self, order: u8, mono: Monomial, coef: Cdd) {
        if coef.is_zero() {
            return;
        }
        let key = (order, mono);
        let sum = self.terms.get(&key).copied().unwrap_or(Cdd::ZERO) + coef;
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u8, Monomial, Cdd)> + '_ {
        self.terms.iter().map(|(&(o, m), &c)| (o, m, c))
    }

    pub fn max_order(&self) -> u8 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn add(&self, other: &OpPoly) -> OpPoly {
        let mut out = self.clone();
        for (o, m, c) in other.terms() {
            out.push(o, m, c);
        }
        out
    }

    pub fn sub(&self, other: &OpPoly) -> OpPoly {
        let mut out = self.clone();
        for (o, m, c) in other.terms() {
            out.push(o, m, -c);
        }
        out
    }

    pub fn scale(&self, s: impl Into<Cdd>) -> OpPoly {
        let s = s.into();
        let mut out = OpPoly::zero();
        for (o, m, c) in self.terms() {
            out.push(o, m, c * s);
        }
        out
    }

    pub fn dagger(&self) -> OpPoly {
        let mut out = OpPoly::zero();
        for (o, m, c) in self.terms() {
            out.push(o, m.dagger(), c.conj());
        }
        out
    }

    /// Normal-ordered product, dropping terms above `max_order`.
    pub fn mul(&self, other: &OpPoly, max_order: u8) -> OpPoly {
        let mut out = OpPoly::zero();
        for (o1, m1, c1) in self.terms() {
            for (o2, m2, c2) in other.terms() {
                let order = o1.saturating_add(o2);
                if order > max_order {
                    continue;
                }
                let c = c1 * c2;
                for (m, w) in normal_product(m1, m2) {
                    out.push(order, m, c.scale(Dd::new(w)));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32, max_order: u8) -> OpPoly {
        (0..n).fold(OpPoly::constant(1.0), |acc, _| acc.mul(self, max_order))
    }

    pub fn commutator(&self, other: &OpPoly, max_order: u8) -> OpPoly {
        self.mul(other, max_order).sub(&other.mul(self, max_order))
    }

    /// Coherent-state expectation split by perturbative order.
    ///
    /// `amplitudes[m]` is the eigenvalue of the annihilator of basis mode `m`.
    pub fn expectation(&self, amplitudes: [Complex64; MODES]) -> OrderSum {
        let max_exp = self.terms.keys().flat_map(|(_, m)| m.0).max().unwrap_or(0) as usize;
        let powers: Vec<(Vec<Cdd>, Vec<Cdd>)> = amplitudes
            .iter()
            .map(|&z| {
                let z = Cdd::from(z);
                let mut up = vec![Cdd::ONE];
                let mut down = vec![Cdd::ONE];
                for i in 0..max_exp {
                    up.push(up[i] * z);
                    down.push(down[i] * z.conj());
                }
                (up, down)
            })
            .collect();
        let mut sum = OrderSum::default();
        for (o, m, c) in self.terms() {
            let mut v = c;
            for (mode, (up, down)) in powers.iter().enumerate() {
                v = v * down[m.0[2 * mode] as usize] * up[m.0[2 * mode + 1] as usize];
            }
            sum.add(o, v);
        }
        sum
    }
}

/// Expectation value resolved by perturbative order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrderSum {
    by_order: Vec<Cdd>,
}

impl OrderSum {
    fn add(&mut self, order: u8, v: Cdd) {
        let o = order as usize;
        if self.by_order.len() <= o {
            self.by_order.resize(o + 1, Cdd::ZERO);
        }
        self.by_order[o] += v;
    }

    pub fn order(&self, o: usize) -> Cdd {
        self.by_order.get(o).copied().unwrap_or(Cdd::ZERO)
    }

    pub fn total(&self) -> Cdd {
        self.by_order.iter().fold(Cdd::ZERO, |acc, &v| acc + v)
    }

    /// Orders zero and one only.
    pub fn first_order(&self) -> FirstOrder {
        FirstOrder {
            zeroth: self.order(0),
            first: self.order(1),
        }
    }
}

/// A quantity `zeroth + first` with products truncated after first order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FirstOrder {
    pub zeroth: Cdd,
    pub first: Cdd,
}

impl FirstOrder {
    pub fn constant(c: impl Into<Cdd>) -> Self {
        FirstOrder {
            zeroth: c.into(),
            first: Cdd::ZERO,
        }
    }

    pub fn value(self) -> Cdd {
        self.zeroth + self.first
    }

    pub fn conj(self) -> Self {
        FirstOrder {
            zeroth: self.zeroth.conj(),
            first: self.first.conj(),
        }
    }

    pub fn scale(self, s: Dd) -> FirstOrder {
        FirstOrder {
            zeroth: self.zeroth.scale(s),
            first: self.first.scale(s),
        }
    }

    pub fn powi(self, n: u32) -> FirstOrder {
        (0..n).fold(FirstOrder::constant(1.0), |acc, _| acc.mul(self))
    }

    pub fn norm_sqr(self) -> FirstOrder {
        self.mul(self.conj())
    }

    /// `|z|` expanded to first order about a nonzero zeroth-order value.
    pub fn abs(self) -> FirstOrder {
        let r = self.zeroth.norm();
        if r.hi == 0.0 {
            return FirstOrder {
                zeroth: Cdd::ZERO,
                first: Cdd::new(self.first.norm(), Dd::ZERO),
            };
        }
        let d = (self.zeroth.conj() * self.first).re / r;
        FirstOrder {
            zeroth: Cdd::new(r, Dd::ZERO),
            first: Cdd::new(d, Dd::ZERO),
        }
    }
}

impl Mul for FirstOrder {
    type Output = FirstOrder;

    fn mul(self, o: FirstOrder) -> FirstOrder {
        FirstOrder {
            zeroth: self.zeroth * o.zeroth,
            first: self.zeroth * o.first + self.first * o.zeroth,
        }
    }
}

impl Sub for FirstOrder {
    type Output = FirstOrder;

    fn sub(self, o: FirstOrder) -> FirstOrder {
        FirstOrder {
            zeroth: self.zeroth - o.zeroth,
            first: self.first - o.first,
        }
    }
}

impl Add for FirstOrder {
    type Output = FirstOrder;

    fn add(self, o: FirstOrder) -> FirstOrder {
        FirstOrder {
            zeroth: self.zeroth + o.zeroth,
            first: self.first + o.first,
        }
    }
}
