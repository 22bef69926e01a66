//! Arithmetic in GF(p^k).
//!
//! Elements are dense coefficient vectors over GF(p), reduced modulo a fixed
//! monic irreducible polynomial. Every element carries its [`FieldSpec`] by
//! value, so mixing elements of different fields is detected at the point of
//! use. The canonical index of an element is `sum c_i p^i`; enumerating
//! indices `0..q` is the canonical element order used by every construction.
//!
//! [`FieldTables`] caches the full addition and multiplication tables for the
//! small fields that the geometric constructions iterate over.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest extension degree a [`FieldSpec`] can hold.
pub const MAX_DEGREE: usize = 8;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 10_000;

/// Largest order for which [`FieldTables`] will materialize tables.
pub const MAX_TABLE_ORDER: u32 = 256;

/// Built-in irreducible moduli, coefficients from the constant term upwards
/// (leading 1 included). Covers every non-prime p^k <= 13^2.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (2, 6, &[1, 1, 0, 1, 1, 0, 1]),
    (2, 7, &[1, 1, 0, 0, 0, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (3, 4, &[2, 0, 0, 2, 1]),
    (5, 2, &[2, 0, 1]),
    (5, 3, &[3, 3, 0, 1]),
    (7, 2, &[1, 0, 1]),
    (11, 2, &[1, 0, 1]),
    (13, 2, &[2, 0, 1]),
];

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// A finite field GF(p^k) together with its defining modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u16,
    k: u8,
    // low-order coefficients of the monic modulus; the leading 1 is implicit
    modulus: [u16; MAX_DEGREE],
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.k)
    }
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) || p > MAX_ORDER {
            return Err(Error::UnsupportedField(format!("{p} is not a supported prime")));
        }
        Self::with_modulus(p, &[0, 1])
    }

    /// GF(p^k) using the built-in modulus table.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        if k == 1 {
            return Self::prime(p);
        }
        let modulus = MODULI
            .iter()
            .find(|(mp, mk, _)| *mp == p && *mk == k)
            .map(|(_, _, m)| *m)
            .ok_or_else(|| Error::UnsupportedField(format!("no built-in modulus for {p}^{k}")))?;
        Self::with_modulus(p, modulus)
    }

    /// The field of order `q`, which must be a prime power.
    pub fn from_order(q: u32) -> Result<Self> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::UnsupportedField(format!("{q} is not a prime power")))?;
        Self::new(p, k)
    }

    /// GF(p)[x] / (modulus). `modulus` lists coefficients from the constant
    /// term up and must be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::UnsupportedField(format!("{p} is not prime")));
        }
        let k = modulus.len().saturating_sub(1);
        if k == 0 || k > MAX_DEGREE {
            return Err(Error::InvalidModulus(format!("degree {k} outside 1..={MAX_DEGREE}")));
        }
        if modulus[k] != 1 {
            return Err(Error::InvalidModulus("modulus is not monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidModulus(format!("coefficient not reduced mod {p}")));
        }
        let order = (p as u64).pow(k as u32);
        if order > MAX_ORDER as u64 {
            return Err(Error::UnsupportedField(format!("order {order} exceeds {MAX_ORDER}")));
        }
        if !is_irreducible(p, modulus) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over GF({p})")));
        }
        let mut low = [0u16; MAX_DEGREE];
        for (slot, &c) in low.iter_mut().zip(&modulus[..k]) {
            *slot = c as u16;
        }
        Ok(FieldSpec { p: p as u16, k: k as u8, modulus: low })
    }

    pub fn characteristic(&self) -> u32 {
        self.p as u32
    }

    pub fn degree(&self) -> u32 {
        self.k as u32
    }

    pub fn order(&self) -> u32 {
        (self.p as u32).pow(self.k as u32)
    }

    /// Full modulus coefficients, constant term first, leading 1 last.
    pub fn modulus(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.modulus[..self.k as usize].iter().map(|&c| c as u32).collect();
        out.push(1);
        out
    }

    /// Human-readable modulus, e.g. `x^2 + 1`.
    pub fn modulus_string(&self) -> String {
        let coeffs = self.modulus();
        let mut terms = Vec::new();
        for (i, &c) in coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}{mono}"),
            });
        }
        terms.join(" + ")
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { spec: *self, coeffs: [0; MAX_DEGREE] }
    }

    pub fn one(&self) -> FieldElement {
        self.constant(1)
    }

    /// The image of the integer `c` in the prime subfield.
    pub fn constant(&self, c: i64) -> FieldElement {
        let mut e = self.zero();
        e.coeffs[0] = c.rem_euclid(self.p as i64) as u16;
        e
    }

    /// The generator `x` of the polynomial basis (equals the constant when k = 1).
    pub fn x(&self) -> FieldElement {
        if self.k == 1 {
            return self.zero();
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.k as usize {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients for a degree-{} field",
                coeffs.len(),
                self.k
            )));
        }
        let mut e = self.zero();
        for (slot, &c) in e.coeffs.iter_mut().zip(coeffs) {
            if c >= self.p as u32 {
                return Err(Error::InvalidParameter(format!("coefficient {c} not reduced mod {}", self.p)));
            }
            *slot = c as u16;
        }
        Ok(e)
    }

    /// Element with canonical index `index` (base-p digits are the coefficients).
    pub fn element(&self, index: u32) -> FieldElement {
        debug_assert!(index < self.order());
        let mut e = self.zero();
        let mut rest = index;
        for slot in e.coeffs.iter_mut().take(self.k as usize) {
            *slot = (rest % self.p as u32) as u16;
            rest /= self.p as u32;
        }
        e
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |i| self.element(i))
    }

    /// Order of the subfield over which this field is a quadratic extension.
    pub fn quadratic_subfield_order(&self) -> Result<u32> {
        if !self.k.is_multiple_of(2) {
            return Err(Error::NotQuadraticExtension(self.order()));
        }
        Ok((self.p as u32).pow(self.k as u32 / 2))
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `"p^k"` or a bare prime power such as `"9"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| t.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad field '{s}'")));
        match s.split_once('^') {
            Some((p, k)) => Self::new(parse(p)?, parse(k)?),
            None => Self::from_order(parse(s)?),
        }
    }
}

/// Every field with a built-in modulus, including prime fields up to 13^2.
pub fn builtin_fields() -> Vec<FieldSpec> {
    let mut out: Vec<FieldSpec> = (2..=169)
        .filter_map(prime_power)
        .filter_map(|(p, k)| FieldSpec::new(p, k).ok())
        .collect();
    out.sort_by_key(|f| (f.order(), f.characteristic()));
    out
}

fn poly_rem(p: u32, num: &[u32], den: &[u32]) -> Vec<u32> {
    // den is monic
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree up to k/2.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut rest = code;
            for _ in 0..d {
                g.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// One of the four field operations or exponentiation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow(u64),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: FieldSpec,
    coeffs: [u16; MAX_DEGREE],
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.coeffs(), self.spec)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.coeffs[..self.spec.k as usize].iter().map(|&c| c as u32).collect()
    }

    pub fn index(&self) -> u32 {
        let p = self.spec.p as u32;
        self.coeffs[..self.spec.k as usize].iter().rev().fold(0, |acc, &c| acc * p + c as u32)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    fn add_raw(&self, other: &Self) -> Self {
        let p = self.spec.p;
        let mut out = *self;
        for (a, &b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a = (*a + b) % p;
        }
        out
    }

    fn neg_raw(&self) -> Self {
        let p = self.spec.p;
        let mut out = *self;
        for a in out.coeffs.iter_mut() {
            *a = (p - *a) % p;
        }
        out
    }

    fn mul_raw(&self, other: &Self) -> Self {
        let p = self.spec.p as u64;
        let k = self.spec.k as usize;
        let mut prod = [0u64; 2 * MAX_DEGREE];
        for i in 0..k {
            if self.coeffs[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + self.coeffs[i] as u64 * other.coeffs[j] as u64) % p;
            }
        }
        // x^k = -(m_0 + m_1 x + ... + m_{k-1} x^{k-1})
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let sub = c * self.spec.modulus[j] as u64 % p;
                prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
            }
            prod[i] = 0;
        }
        let mut out = self.spec.zero();
        for (slot, &c) in out.coeffs.iter_mut().zip(&prod[..k]) {
            *slot = c as u16;
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = self.spec.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_raw(&base);
            }
            base = base.mul_raw(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.spec.order() as u64 - 2))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_raw(other))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.add_raw(&other.neg_raw()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_raw(other))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(self.mul_raw(&other.inv()?))
    }

    /// The Frobenius image `a^p`.
    pub fn frobenius(&self) -> Self {
        self.pow(self.spec.p as u64)
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            /// Panics if the operands live in different fields; use the
            /// `checked_*` methods to get an error instead.
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$checked(&rhs).expect("field operands must share a FieldSpec")
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        self.neg_raw()
    }
}

pub fn field_arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
        ArithOp::Div => a.checked_div(b),
        ArithOp::Pow(e) => {
            a.same_field(b)?;
            Ok(a.pow(e))
        }
    }
}

/// Quadratic character: 0 at zero, +1 on nonzero squares, -1 otherwise.
pub fn quadratic_character(a: &FieldElement) -> Result<i8> {
    let spec = a.spec();
    if spec.characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    if a.is_zero() {
        return Ok(0);
    }
    let r = a.pow((spec.order() as u64 - 1) / 2);
    Ok(if r.is_one() { 1 } else { -1 })
}

/// First element in canonical order whose quadratic character is -1.
pub fn smallest_nonresidue(spec: &FieldSpec) -> Result<FieldElement> {
    if spec.characteristic() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    for e in spec.elements() {
        if quadratic_character(&e)? == -1 {
            return Ok(e);
        }
    }
    unreachable!("odd-order field without a non-residue")
}

/// Conjugation `a -> a^q` of GF(q^2) over GF(q).
pub fn conjugate(a: &FieldElement) -> Result<FieldElement> {
    let q = a.spec().quadratic_subfield_order()?;
    Ok(a.pow(q as u64))
}

/// The norm `a^(q+1)` from GF(q^2) down to GF(q).
pub fn conjugate_norm(a: &FieldElement) -> Result<FieldElement> {
    let q = a.spec().quadratic_subfield_order()?;
    Ok(a.pow(q as u64 + 1))
}

/// Addition and multiplication tables over canonical indices.
#[derive(Clone, Debug)]
pub struct FieldTables {
    spec: FieldSpec,
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl FieldTables {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let q = spec.order();
        if q > MAX_TABLE_ORDER {
            return Err(Error::UnsupportedField(format!("tables limited to order {MAX_TABLE_ORDER}")));
        }
        let q = q as usize;
        let elems: Vec<FieldElement> = spec.elements().collect();
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = a.add_raw(b).index() as u16;
                mul[i * q + j] = a.mul_raw(b).index() as u16;
            }
        }
        let neg = elems.iter().map(|a| a.neg_raw().index() as u16).collect();
        let inv = elems
            .iter()
            .map(|a| a.inv().map(|x| x.index() as u16).unwrap_or(0))
            .collect();
        Ok(FieldTables { spec, q, add, mul, neg, inv })
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    /// Inverse of a nonzero index; zero maps to zero.
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn pow(&self, a: usize, mut e: u64) -> usize {
        let mut base = a;
        let mut acc = 1usize;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Dot product of two coordinate vectors given as indices.
    pub fn dot(&self, u: &[usize], v: &[usize]) -> usize {
        u.iter().zip(v).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }
}

/// Row of the `fields list` table.
#[derive(Clone, Debug, Serialize)]
pub struct FieldInfo {
    pub field: String,
    pub order: u32,
    pub characteristic: u32,
    pub degree: u32,
    pub modulus: Vec<u32>,
    #[serde(rename = "modulusText")]
    pub modulus_text: String,
}

impl From<&FieldSpec> for FieldInfo {
    fn from(f: &FieldSpec) -> Self {
        FieldInfo {
            field: f.to_string(),
            order: f.order(),
            characteristic: f.characteristic(),
            degree: f.degree(),
            modulus: f.modulus(),
            modulus_text: f.modulus_string(),
        }
    }
}
