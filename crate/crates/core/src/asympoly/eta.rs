//! Coefficient ring: polynomials in η₂…η₆ and W with exact rational coefficients.

use alloc::collections::BTreeMap;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
#[allow(unused_imports)] // inherent when std is in the dependency graph
use num_traits::Float;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Formal symbols a coefficient may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Eta2,
    Eta3,
    Eta4,
    Eta5,
    Eta6,
    W,
}

impl Symbol {
    pub const ALL: [Symbol; 6] = [
        Symbol::Eta2,
        Symbol::Eta3,
        Symbol::Eta4,
        Symbol::Eta5,
        Symbol::Eta6,
        Symbol::W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Eta2 => "eta2",
            Symbol::Eta3 => "eta3",
            Symbol::Eta4 => "eta4",
            Symbol::Eta5 => "eta5",
            Symbol::Eta6 => "eta6",
            Symbol::W => "W",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Symbol::ALL.into_iter().find(|s| s.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Exponent vector over (η₂, η₃, η₄, η₅, η₆, W); ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EtaMonomial([u8; 6]);

impl EtaMonomial {
    pub const ONE: EtaMonomial = EtaMonomial([0; 6]);

    pub fn new(exponents: [u8; 6]) -> Self {
        EtaMonomial(exponents)
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::ONE.with(s, 1)
    }

    pub fn with(mut self, s: Symbol, power: u8) -> Self {
        self.0[s.index()] += power;
        self
    }

    pub fn exponent(&self, s: Symbol) -> u8 {
        self.0[s.index()]
    }

    pub fn exponents(&self) -> [u8; 6] {
        self.0
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 6]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &EtaMonomial) -> EtaMonomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0) {
            *a += b;
        }
        EtaMonomial(e)
    }

    pub fn evaluate(&self, v: &EtaValues) -> f64 {
        Symbol::ALL
            .into_iter()
            .map(|s| v.get(s).powi(self.exponent(s) as i32))
            .product()
    }
}

/// Numeric values substituted for the symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EtaValues {
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub eta5: f64,
    pub eta6: f64,
    pub w: f64,
}

impl EtaValues {
    /// Values with W filled from its definition `1 − η₂ + η₄/3 + η₃²/4`.
    pub fn new(eta2: f64, eta3: f64, eta4: f64, eta5: f64, eta6: f64) -> Self {
        Self {
            eta2,
            eta3,
            eta4,
            eta5,
            eta6,
            w: crate::moments::compute_w(eta2, eta3, eta4),
        }
    }

    pub fn get(&self, s: Symbol) -> f64 {
        match s {
            Symbol::Eta2 => self.eta2,
            Symbol::Eta3 => self.eta3,
            Symbol::Eta4 => self.eta4,
            Symbol::Eta5 => self.eta5,
            Symbol::Eta6 => self.eta6,
            Symbol::W => self.w,
        }
    }
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// A polynomial in the symbols with exact rational coefficients. Zero
/// coefficients are never stored, so structural equality is exact equality.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct EtaPoly(BTreeMap<EtaMonomial, BigRational>);

impl EtaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(r: BigRational) -> Self {
        Self::term(r, EtaMonomial::ONE)
    }

    pub fn term(r: BigRational, m: EtaMonomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, r);
        p
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::term(BigRational::one(), EtaMonomial::symbol(s))
    }

    /// `1 − η₂ + η₄/3 + η₃²/4`.
    pub fn w_definition() -> Self {
        let mut p = Self::constant(BigRational::one());
        p.add_term(EtaMonomial::symbol(Symbol::Eta2), rational(-1, 1));
        p.add_term(EtaMonomial::symbol(Symbol::Eta4), rational(1, 3));
        p.add_term(EtaMonomial::ONE.with(Symbol::Eta3, 2), rational(1, 4));
        p
    }

    pub fn add_term(&mut self, m: EtaMonomial, r: BigRational) {
        if r.is_zero() {
            return;
        }
        let entry = self.0.entry(m).or_insert_with(BigRational::zero);
        *entry += r;
        if entry.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&EtaMonomial, &BigRational)> {
        self.0.iter()
    }

    pub fn coefficient(&self, m: &EtaMonomial) -> BigRational {
        self.0.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        EtaPoly(self.0.iter().map(|(m, c)| (*m, c * r)).collect())
    }

    pub fn scale_monomial(&self, m: &EtaMonomial) -> Self {
        EtaPoly(self.0.iter().map(|(k, c)| (k.mul(m), c.clone())).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.0.keys().any(|m| m.exponent(s) > 0)
    }

    /// Replaces W by its definition in η₂, η₃, η₄.
    pub fn expand_w(&self) -> Self {
        if !self.contains(Symbol::W) {
            return self.clone();
        }
        let w = Self::w_definition();
        let mut out = Self::zero();
        for (m, c) in &self.0 {
            let k = m.exponent(Symbol::W);
            let mut rest = *m;
            rest.0[Symbol::W.index()] = 0;
            let part = w.pow(k as u32).scale_monomial(&rest).scale(c);
            out = &out + &part;
        }
        out
    }

    /// Numeric value; rationals are converted to floating point only here.
    pub fn evaluate(&self, v: &EtaValues) -> f64 {
        self.0
            .iter()
            .map(|(m, c)| c.to_f64().unwrap_or(f64::NAN) * m.evaluate(v))
            .sum()
    }

    /// Same as [`EtaPoly::evaluate`] with every term made non-negative.
    pub fn evaluate_abs(&self, v: &EtaValues) -> f64 {
        self.0
            .iter()
            .map(|(m, c)| c.abs().to_f64().unwrap_or(f64::NAN) * m.evaluate(v).abs())
            .sum()
    }
}

impl Add for &EtaPoly {
    type Output = EtaPoly;
    fn add(self, rhs: &EtaPoly) -> EtaPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &EtaPoly {
    type Output = EtaPoly;
    fn sub(self, rhs: &EtaPoly) -> EtaPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.0 {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl Neg for &EtaPoly {
    type Output = EtaPoly;
    fn neg(self) -> EtaPoly {
        EtaPoly(self.0.iter().map(|(m, c)| (*m, -c.clone())).collect())
    }
}

impl Mul for &EtaPoly {
    type Output = EtaPoly;
    fn mul(self, rhs: &EtaPoly) -> EtaPoly {
        let mut out = EtaPoly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &rhs.0 {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for EtaPoly {
            type Output = EtaPoly;
            fn $method(self, rhs: EtaPoly) -> EtaPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for EtaPoly {
    type Output = EtaPoly;
    fn neg(self) -> EtaPoly {
        -&self
    }
}
