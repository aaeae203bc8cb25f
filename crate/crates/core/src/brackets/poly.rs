use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Named variables with a declared canonical pairing.
///
/// Variables that are not part of a pair (frequency parameters, higher jet
/// symbols, variations) behave as constants under the Poisson bracket. An
/// optional imaginary unit obeys `I² = −1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseSpace {
    names: Vec<String>,
    pairs: Vec<(usize, usize)>,
    imag: Option<usize>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PhaseSpace {
    /// `vars` fixes the variable order used by the monomial ordering;
    /// `pairs` lists `(coordinate, momentum)` names.
    pub fn new(vars: &[&str], pairs: &[(&str, &str)], imag: Option<&str>) -> Result<Arc<Self>> {
        let mut names: Vec<String> = Vec::with_capacity(vars.len() + 1);
        for &v in vars {
            if !valid_ident(v) {
                return Err(Error::Parse(format!("invalid variable name `{v}`")));
            }
            if names.iter().any(|n| n == v) {
                return Err(Error::Parse(format!("duplicate variable `{v}`")));
            }
            names.push(v.to_string());
        }
        let imag = match imag {
            Some(i) => match names.iter().position(|n| n == i) {
                Some(k) => Some(k),
                None => {
                    if !valid_ident(i) {
                        return Err(Error::Parse(format!("invalid variable name `{i}`")));
                    }
                    names.push(i.to_string());
                    Some(names.len() - 1)
                }
            },
            None => None,
        };
        let index = |s: &str| -> Result<usize> {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownVariable(s.to_string()))
        };
        let mut used = vec![false; names.len()];
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for &(q, p) in pairs {
            let (qi, pi) = (index(q)?, index(p)?);
            if qi == pi || used[qi] || used[pi] || Some(qi) == imag || Some(pi) == imag {
                return Err(Error::Parse(format!(
                    "pairing ({q}, {p}) is not a matching"
                )));
            }
            used[qi] = true;
            used[pi] = true;
            idx_pairs.push((qi, pi));
        }
        Ok(Arc::new(Self {
            names,
            pairs: idx_pairs,
            imag,
        }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn imaginary_unit(&self) -> Option<usize> {
        self.imag
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with exact rational coefficients over a [`PhaseSpace`].
#[derive(Debug, Clone)]
pub struct PhasePoly {
    space: Arc<PhaseSpace>,
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl PartialEq for PhasePoly {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.terms == other.terms
    }
}

impl Eq for PhasePoly {}

fn same_space(a: &Arc<PhaseSpace>, b: &Arc<PhaseSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PhasePoly {
    pub fn zero(space: &Arc<PhaseSpace>) -> Self {
        Self {
            space: Arc::clone(space),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(space: &Arc<PhaseSpace>, c: BigRational) -> Self {
        let mut p = Self::zero(space);
        p.add_term(Monomial::one(space.len()), c);
        p
    }

    pub fn int(space: &Arc<PhaseSpace>, c: i64) -> Self {
        Self::constant(space, BigRational::from_integer(c.into()))
    }

    pub fn var(space: &Arc<PhaseSpace>, name: &str) -> Result<Self> {
        Ok(Self::var_index(space, space.index(name)?))
    }

    pub fn var_index(space: &Arc<PhaseSpace>, k: usize) -> Self {
        let mut e = vec![0; space.len()];
        e[k] = 1;
        let mut p = Self::zero(space);
        p.add_term(Monomial(e), BigRational::one());
        p
    }

    /// The imaginary unit of the space.
    pub fn imag(space: &Arc<PhaseSpace>) -> Result<Self> {
        space
            .imaginary_unit()
            .map(|k| Self::var_index(space, k))
            .ok_or_else(|| Error::UnknownVariable("imaginary unit".into()))
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// The value if the polynomial is a rational constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn depends_on(&self, k: usize) -> bool {
        self.terms.keys().any(|m| m.0[k] > 0)
    }

    fn check_space(&self, other: &Self) -> Result<()> {
        if same_space(&self.space, &other.space) {
            Ok(())
        } else {
            Err(Error::VariableMismatch)
        }
    }

    fn add_term(&mut self, mut m: Monomial, mut c: BigRational) {
        if let Some(k) = self.space.imag {
            let e = m.0[k];
            if e >= 2 {
                if (e / 2) % 2 == 1 {
                    c = -c;
                }
                m.0[k] = e % 2;
            }
        }
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_space(other)?;
        let mut out = Self::zero(&self.space);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::int(&self.space, 1);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to variable `k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.space);
        for (m, c) in &self.terms {
            let e = m.0[k];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[k] = e - 1;
            out.add_term(m2, c * BigRational::from_integer(e.into()));
        }
        out
    }

    pub fn derivative_by(&self, name: &str) -> Result<Self> {
        Ok(self.derivative(self.space.index(name)?))
    }

    /// Simultaneous substitution into a (possibly different) target space.
    ///
    /// Variables without an explicit image are mapped to the variable of
    /// the same name in `target`.
    pub fn substitute_into(
        &self,
        target: &Arc<PhaseSpace>,
        images: &[(&str, PhasePoly)],
    ) -> Result<Self> {
        let n = self.space.len();
        let mut table: Vec<PhasePoly> = Vec::with_capacity(n);
        for k in 0..n {
            let name = &self.space.names[k];
            let img = match images.iter().find(|(v, _)| v == name) {
                Some((_, p)) => {
                    if !same_space(p.space(), target) {
                        return Err(Error::VariableMismatch);
                    }
                    p.clone()
                }
                None => {
                    if !self.depends_on(k) {
                        PhasePoly::zero(target)
                    } else {
                        PhasePoly::var(target, name)?
                    }
                }
            };
            table.push(img);
        }
        for (v, _) in images {
            self.space.index(v)?;
        }
        let mut powers: HashMap<(usize, u32), PhasePoly> = HashMap::new();
        let mut out = PhasePoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = PhasePoly::constant(target, c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers.entry((k, e)).or_insert_with(|| table[k].pow(e));
                term = &term * &*p;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitution within the same space.
    pub fn substitute(&self, images: &[(&str, PhasePoly)]) -> Result<Self> {
        let target = Arc::clone(&self.space);
        self.substitute_into(&target, images)
    }

    /// Same polynomial viewed in another space holding all of its variables.
    pub fn embed(&self, target: &Arc<PhaseSpace>) -> Result<Self> {
        self.substitute_into(target, &[])
    }
}

impl Neg for &PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        self.scale(&-BigRational::one())
    }
}

impl Neg for PhasePoly {
    type Output = PhasePoly;
    fn neg(self) -> PhasePoly {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $inner:ident) => {
        /// # Panics
        /// If the operands live in different phase spaces; use the `try_`
        /// form to get a [`Error::VariableMismatch`] instead.
        impl $tr<&PhasePoly> for &PhasePoly {
            type Output = PhasePoly;
            fn $m(self, rhs: &PhasePoly) -> PhasePoly {
                self.$inner(rhs)
                    .expect("polynomials from different phase spaces")
            }
        }
        impl $tr<PhasePoly> for PhasePoly {
            type Output = PhasePoly;
            fn $m(self, rhs: PhasePoly) -> PhasePoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&PhasePoly> for PhasePoly {
            type Output = PhasePoly;
            fn $m(self, rhs: &PhasePoly) -> PhasePoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<PhasePoly> for &PhasePoly {
            type Output = PhasePoly;
            fn $m(self, rhs: PhasePoly) -> PhasePoly {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

fn fmt_rational(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for PhasePoly {
    /// Terms in descending graded-lex order, e.g. `3/2*w^2*xd + xddd`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            for (k, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.space.names[k].clone()),
                    _ => factors.push(format!("{}^{e}", self.space.names[k])),
                }
            }
            if factors.is_empty() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `Σ (∂A/∂q ∂B/∂p − ∂A/∂p ∂B/∂q)` over the declared pairs.
pub fn poisson_bracket(a: &PhasePoly, b: &PhasePoly) -> Result<PhasePoly> {
    a.check_space(b)?;
    let mut out = PhasePoly::zero(a.space());
    for &(q, p) in a.space().pairs() {
        let t1 = a.derivative(q).try_mul(&b.derivative(p))?;
        let t2 = a.derivative(p).try_mul(&b.derivative(q))?;
        out = out.try_add(&t1)?.try_sub(&t2)?;
    }
    Ok(out)
}

/// Ordered jet symbols `x, ẋ, ẍ, …` inside a phase space; the total time
/// derivative shifts each one to the next.
#[derive(Debug, Clone)]
pub struct Jets {
    space: Arc<PhaseSpace>,
    order: Vec<usize>,
}

impl Jets {
    pub fn new(space: &Arc<PhaseSpace>, names: &[&str]) -> Result<Self> {
        let order = names
            .iter()
            .map(|n| space.index(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space: Arc::clone(space),
            order,
        })
    }

    pub fn space(&self) -> &Arc<PhaseSpace> {
        &self.space
    }

    /// Highest available derivative order.
    pub fn max_order(&self) -> usize {
        self.order.len() - 1
    }

    pub fn symbol(&self, k: usize) -> Result<PhasePoly> {
        self.order
            .get(k)
            .map(|&i| PhasePoly::var_index(&self.space, i))
            .ok_or(Error::JetOrderExceeded {
                needed: k,
                available: self.max_order(),
            })
    }

    pub fn index_of(&self, k: usize) -> Option<usize> {
        self.order.get(k).copied()
    }

    /// Highest jet order present in `p`, if any.
    pub fn order_of(&self, p: &PhasePoly) -> Option<usize> {
        (0..self.order.len())
            .rev()
            .find(|&k| p.depends_on(self.order[k]))
    }

    pub fn total_derivative(&self, p: &PhasePoly) -> Result<PhasePoly> {
        if !same_space(p.space(), &self.space) {
            return Err(Error::VariableMismatch);
        }
        let mut out = PhasePoly::zero(&self.space);
        for (k, &idx) in self.order.iter().enumerate() {
            if !p.depends_on(idx) {
                continue;
            }
            let next = self.symbol(k + 1).map_err(|_| Error::JetOrderExceeded {
                needed: k + 1,
                available: self.max_order(),
            })?;
            out = &out + &(&p.derivative(idx) * &next);
        }
        Ok(out)
    }
}
