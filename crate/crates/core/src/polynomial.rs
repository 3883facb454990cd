//! Sparse multivariate polynomials keyed by exponent multi-index.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Exponent multi-index α; `alpha[j]` is the power of `x_{j+1}`.
pub type MultiIndex = Vec<u32>;

/// A polynomial in `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    nvars: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    pub fn monomial(alpha: MultiIndex, c: T) -> Self {
        let mut p = Self::zero(alpha.len());
        p.add_term(alpha, c);
        p
    }

    /// The coordinate function `x_{j+1}`.
    pub fn variable(nvars: usize, j: usize) -> Self {
        let mut alpha = vec![0; nvars];
        alpha[j] = 1;
        Self::monomial(alpha, T::one())
    }

    /// `⟨gradient, x⟩ + constant`.
    pub fn affine(gradient: &[T], constant: &T) -> Self {
        let n = gradient.len();
        let mut p = Self::constant(n, constant.clone());
        for (j, g) in gradient.iter().enumerate() {
            let mut alpha = vec![0; n];
            alpha[j] = 1;
            p.add_term(alpha, g.clone());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: T) {
        debug_assert_eq!(alpha.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        let mut out = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c.clone() * s);
        }
        out
    }

    pub fn evaluate(&self, x: &[T]) -> T {
        let mut acc = T::zero();
        for (alpha, c) in &self.terms {
            let mut term = c.clone();
            for (xj, &e) in x.iter().zip(alpha) {
                for _ in 0..e {
                    term *= xj;
                }
            }
            acc += term;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.nvars, T::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Substitutes `x_j ↦ subs[j]` (each a polynomial in a common variable set).
    pub fn compose(&self, subs: &[Polynomial<T>]) -> Polynomial<T> {
        assert_eq!(subs.len(), self.nvars);
        let m = subs.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<Polynomial<T>>> =
            subs.iter().map(|s| vec![Polynomial::constant(m, T::one()), s.clone()]).collect();
        let mut out = Polynomial::zero(m);
        for (alpha, c) in &self.terms {
            let mut term = Polynomial::constant(m, c.clone());
            for (j, &e) in alpha.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap() * &subs[j];
                    powers[j].push(next);
                }
                term = &term * &powers[j][e as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Converts coefficients to another scalar type.
    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        let mut out = Polynomial::zero(self.nvars);
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c.clone());
        }
        out
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.scale(&-T::one())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                let alpha: MultiIndex = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(alpha, c.clone() * d);
            }
        }
        out
    }
}
