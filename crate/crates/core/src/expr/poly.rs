//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are keyed by exponent vectors ordered graded-lexicographically:
//! higher total degree first, ties broken by the leftmost differing symbol.
//! The leading term of a polynomial is its largest monomial in this order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};

/// Exponent vector over the chart's symbols (variables then constants).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Box<[u16]>);

impl Mono {
    pub fn unit(n: usize) -> Mono {
        Mono(vec![0u16; n].into_boxed_slice())
    }

    pub fn var(n: usize, idx: usize) -> Mono {
        let mut e = vec![0u16; n];
        e[idx] = 1;
        Mono(e.into_boxed_slice())
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect::<Vec<_>>()
                .into_boxed_slice(),
        )
    }

    /// Componentwise quotient; `None` if any exponent would go negative.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out.into_boxed_slice()))
    }

    pub fn gcd(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| *a.min(b))
                .collect::<Vec<_>>()
                .into_boxed_slice(),
        )
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Graded lex: on equal degree, larger power on the earliest symbol wins.
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial: nonzero coefficients keyed by monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    /// Number of symbols every exponent vector covers.
    pub nsyms: usize,
    pub terms: BTreeMap<Mono, BigRational>,
}

impl Poly {
    pub fn zero(nsyms: usize) -> Poly {
        Poly { nsyms, terms: BTreeMap::new() }
    }

    pub fn constant(nsyms: usize, c: BigRational) -> Poly {
        let mut p = Poly::zero(nsyms);
        if !c.is_zero() {
            p.terms.insert(Mono::unit(nsyms), c);
        }
        p
    }

    pub fn one(nsyms: usize) -> Poly {
        Poly::constant(nsyms, BigRational::one())
    }

    pub fn var(nsyms: usize, idx: usize) -> Poly {
        let mut p = Poly::zero(nsyms);
        p.terms.insert(Mono::var(nsyms, idx), BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_unit())
    }

    /// Constant value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Degree in a single symbol.
    pub fn degree_in(&self, idx: usize) -> u16 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.0[idx] > 0)
    }

    /// Leading (graded-lex largest) term.
    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> BigRational {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    fn insert_term(&mut self, m: Mono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nsyms, other.nsyms);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nsyms, other.nsyms);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nsyms: self.nsyms,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nsyms, other.nsyms);
        let mut out = Poly::zero(self.nsyms);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        // Multiply the smaller operand into the larger one.
        let (small, big) = if self.num_terms() <= other.num_terms() {
            (self, other)
        } else {
            (other, self)
        };
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nsyms);
        }
        Poly {
            nsyms: self.nsyms,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nsyms);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to symbol `idx`.
    pub fn diff(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.nsyms);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut v = m.0.to_vec();
            v[idx] = e - 1;
            out.insert_term(Mono(v.into_boxed_slice()), c * BigRational::from(BigInt::from(e)));
        }
        out
    }

    /// Exact division by a polynomial known to divide `self`.
    ///
    /// Returns `None` if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        debug_assert!(!divisor.is_zero());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nsyms);
        let (dm, dc) = divisor.leading()?;
        let dm = dm.clone();
        let dc = dc.clone();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().unwrap();
            let qm = rm.div(&dm)?;
            let qc = rc / &dc;
            let mut t = Poly::zero(self.nsyms);
            t.terms.insert(qm, qc);
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Normalizes the leading coefficient to one; returns (monic, old leading coeff).
    pub fn monic(&self) -> (Poly, BigRational) {
        match self.leading() {
            None => (self.clone(), BigRational::one()),
            Some((_, c)) => {
                let c = c.clone();
                let inv = BigRational::one() / &c;
                (self.scale(&inv), c)
            }
        }
    }

    /// Clears denominators and integer content: returns the primitive
    /// integer-coefficient polynomial `p` and the rational `r` with
    /// `self = r * p`, where `p` has positive leading coefficient.
    pub fn primitive_int(&self) -> (Poly, BigRational) {
        if self.is_zero() {
            return (self.clone(), BigRational::one());
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * &den_lcm / c.denom();
            num_gcd = num::integer::gcd(num_gcd, n);
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let mut sign = BigInt::one();
        if self.leading_coeff().is_negative() {
            sign = -sign;
        }
        let factor = BigRational::new(sign.clone() * &num_gcd, den_lcm.clone());
        let inv = BigRational::new(sign * den_lcm, num_gcd);
        (self.scale(&inv), factor)
    }

    /// Substitutes symbol `idx` by a rational constant, exactly.
    pub fn eval_symbol(&self, idx: usize, value: &BigRational) -> Poly {
        let mut out = Poly::zero(self.nsyms);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            let mut v = m.0.to_vec();
            v[idx] = 0;
            let mut coef = c.clone();
            if e > 0 {
                let mut p = BigRational::one();
                for _ in 0..e {
                    p *= value;
                }
                coef *= p;
            }
            out.insert_term(Mono(v.into_boxed_slice()), coef);
        }
        out
    }

    /// Exact evaluation at a full point (one value per symbol).
    pub fn eval_exact(&self, point: &[BigRational]) -> BigRational {
        debug_assert_eq!(point.len(), self.nsyms);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Floating-point evaluation at a full point.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = rational_to_f64(c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= point[i].powi(e as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

/// Lossy conversion used only on the floating-point verification path.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or_else(|| {
        // Fall back through a scaled quotient for extreme magnitudes.
        let n = r.numer();
        let d = r.denom();
        let shift = (d.bits() as i64 - 52).max(0) as u64;
        let dn = num_traits::ToPrimitive::to_f64(&(n >> shift)).unwrap_or(f64::NAN);
        let dd = num_traits::ToPrimitive::to_f64(&(d >> shift)).unwrap_or(f64::NAN);
        dn / dd
    })
}
