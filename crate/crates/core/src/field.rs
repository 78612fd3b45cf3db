//! Exact arithmetic in GF(p^r).
//!
//! Elements are coefficient vectors of length `r` over GF(p), constant term
//! first, reduced modulo a fixed monic irreducible polynomial. The modulus is
//! the lexicographically smallest monic irreducible of degree `r` (coefficients
//! compared constant term first), so every run labels points the same way.
//!
//! The canonical index of an element is `sum c_i p^i`; [`FieldSpec::elements`]
//! lists elements in increasing index order, which is the external point
//! labeling contract.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Default upper bound on `q = p^r` accepted by [`FieldSpec::new`].
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 20;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^r` with `p` prime, or returns `None`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut r = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p as u32, r))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    coeffs: Vec<u32>,
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

// Highest-degree coefficient is most significant, matching `FieldSpec::index`.
impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.iter().rev().cmp(other.coeffs.iter().rev())
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "x".to_string(),
                (1, c) => format!("{c}x"),
                (i, 1) => format!("x^{i}"),
                (i, c) => format!("{c}x^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+"))
        }
    }
}

/// A finite field GF(p^r) with its reduction polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    r: u32,
    q: u32,
    /// Monic, degree `r`, constant term first (length `r + 1`).
    modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u32, r: u32) -> Result<Self> {
        Self::with_bound(p, r, DEFAULT_FIELD_BOUND)
    }

    pub fn with_bound(p: u32, r: u32, bound: u64) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::InvalidParameter("field degree must be positive".into()));
        }
        let order = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if order > bound || order > u32::MAX as u64 {
            return Err(Error::FieldTooLarge { order, bound });
        }
        let modulus = if r == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, r as usize)
        };
        Ok(FieldSpec {
            p,
            r,
            q: order as u32,
            modulus,
        })
    }

    /// Convenience constructor from the field order.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, r) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, r)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: vec![0; self.r as usize],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_index(1)
    }

    /// The element `x` (or `0·x + c` style constants for prime fields).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() != self.r as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidParameter(format!(
                "coefficient vector {coeffs:?} is not an element of GF({})",
                self.q
            )));
        }
        Ok(FieldElem {
            coeffs: coeffs.to_vec(),
        })
    }

    pub fn from_index(&self, mut index: u32) -> FieldElem {
        debug_assert!(index < self.q);
        let mut coeffs = Vec::with_capacity(self.r as usize);
        for _ in 0..self.r {
            coeffs.push(index % self.p);
            index /= self.p;
        }
        FieldElem { coeffs }
    }

    pub fn index(&self, a: &FieldElem) -> u32 {
        a.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn elements(&self) -> Vec<FieldElem> {
        (0..self.q).map(|i| self.from_index(i)).collect()
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x + y) % self.p).collect();
        FieldElem { coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coeffs = a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect();
        FieldElem { coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p as u64;
        let r = self.r as usize;
        let mut prod = vec![0u64; 2 * r - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // Reduce using the monic modulus, highest degree first.
        for deg in (r..prod.len()).rev() {
            let lead = prod[deg];
            if lead == 0 {
                continue;
            }
            prod[deg] = 0;
            for (k, &m) in self.modulus[..r].iter().enumerate() {
                let pos = deg - r + k;
                prod[pos] = (prod[pos] + (p - lead) * m as u64) % p;
            }
        }
        FieldElem {
            coeffs: prod[..r].iter().map(|&c| c as u32).collect(),
        }
    }

    pub fn pow(&self, a: &FieldElem, mut e: u64) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    /// Euler's criterion: `a^((q-1)/2) = 1`.
    pub fn is_square(&self, a: &FieldElem) -> Result<bool> {
        if a.is_zero() || self.p == 2 {
            return Err(Error::SquareUndefined);
        }
        Ok(self.pow(a, (self.q as u64 - 1) / 2) == self.one())
    }

    /// The Frobenius automorphism `a ↦ a^p`.
    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, self.p as u64)
    }

    pub fn mult_order(&self, a: &FieldElem) -> Result<u32> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let one = self.one();
        let mut x = a.clone();
        let mut k = 1;
        while x != one {
            x = self.mul(&x, a);
            k += 1;
        }
        Ok(k)
    }

    /// The smallest-index generator of the multiplicative group.
    pub fn primitive_element(&self) -> FieldElem {
        (1..self.q)
            .map(|i| self.from_index(i))
            .find(|a| self.mult_order(a).ok() == Some(self.q - 1))
            .expect("multiplicative group of a finite field is cyclic")
    }
}

fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    // `den` is monic.
    let mut rem: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    let p = p as u64;
    while rem.len() > dd {
        let lead = rem.pop().unwrap();
        if lead == 0 {
            continue;
        }
        let shift = rem.len() - dd;
        for (k, &c) in den[..dd].iter().enumerate() {
            rem[shift + k] = (rem[shift + k] + (p - lead) * c as u64) % p;
        }
    }
    rem.iter().map(|&c| c as u32).collect()
}

/// All monic polynomials of the given degree, lexicographic on the
/// coefficient list read constant term first.
fn monic_polys(p: u32, degree: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (p as u64).pow(degree as u32);
    (0..total).map(move |mut n| {
        let mut lower = vec![0u32; degree];
        // Constant term is the most significant digit.
        for slot in lower.iter_mut().rev() {
            *slot = (n % p as u64) as u32;
            n /= p as u64;
        }
        lower.push(1);
        lower
    })
}

pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let degree = poly.len() - 1;
    if degree <= 1 {
        return degree == 1;
    }
    for d in 1..=degree / 2 {
        for divisor in monic_polys(p, d) {
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    monic_polys(p, degree)
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

/// Index-based lookup tables for a small field; used on hot paths where the
/// coefficient-vector arithmetic would dominate.
#[derive(Clone, Debug)]
pub struct FieldTables {
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
}

impl FieldTables {
    pub const MAX_ORDER: u32 = 1024;

    pub fn new(spec: &FieldSpec) -> Result<Self> {
        if spec.q() > Self::MAX_ORDER {
            return Err(Error::FieldTooLarge {
                order: spec.q() as u64,
                bound: Self::MAX_ORDER as u64,
            });
        }
        let q = spec.q() as usize;
        let elems = spec.elements();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate().skip(i) {
                let s = spec.index(&spec.add(a, b));
                let m = spec.index(&spec.mul(a, b));
                add[i * q + j] = s;
                add[j * q + i] = s;
                mul[i * q + j] = m;
                mul[j * q + i] = m;
            }
        }
        let neg = elems.iter().map(|a| spec.index(&spec.neg(a))).collect();
        let mut inv = vec![u32::MAX; q];
        for i in 1..q {
            inv[i] = spec.index(&spec.inv(&elems[i]).expect("nonzero"));
        }
        Ok(FieldTables { q, add, mul, neg, inv })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    /// Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }
}
