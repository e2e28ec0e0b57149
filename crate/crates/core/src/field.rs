//! Exact coefficient fields: the rationals, prime fields GF(p) and cyclotomic
//! fields Q(zeta_m).
//!
//! Elements are plain values; all arithmetic goes through the owning
//! [`FieldSpec`], which knows the modulus. A cyclotomic element is the
//! coefficient vector of a polynomial in `z = zeta_m` of degree below
//! `phi(m)`, reduced modulo the m-th cyclotomic polynomial, so structural
//! equality of elements is field equality.

mod expr;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a canonical element of {0}")]
    FieldMismatch(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("`{text}` does not denote an element of {field}")]
    NotInField { text: String, field: String },
    #[error("invalid field: {0}")]
    InvalidSpec(String),
}

/// Which of the three constructible fields a [`FieldSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    Prime(u64),
    Cyclotomic(u64),
}

/// The arithmetic operations accepted by [`FieldSpec::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// A field element in canonical form.
///
/// `Rational` holds `degree` coefficients (one for Q, `phi(m)` for a
/// cyclotomic field); `num-rational` keeps each of them reduced with a
/// positive denominator. `Residue` is a value in `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldElement {
    Rational(Vec<BigRational>),
    Residue(u64),
}

/// Largest prime modulus accepted; keeps products inside `u128` and trial
/// division cheap.
pub const MAX_PRIME: u64 = 1 << 32;

/// Largest cyclotomic conductor accepted.
pub const MAX_CONDUCTOR: u64 = 10_000;

/// Description of a coefficient field together with the data needed for
/// arithmetic in it. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    kind: FieldKind,
    // Monic cyclotomic polynomial, low degree first. Empty unless cyclotomic.
    modulus: Arc<Vec<BigRational>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for FieldSpec {}

impl std::hash::Hash for FieldSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({self})")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Prime(p) => write!(f, "GF({p})"),
            FieldKind::Cyclotomic(m) => write!(f, "Q(zeta_{m})"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            while m.is_multiple_of(d) {
                m /= d;
            }
            result -= result / d;
        }
        d += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Integer coefficients (low degree first) of the m-th cyclotomic polynomial,
/// via `z^m - 1 = prod_{d | m} Phi_d(z)`.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    assert!(m >= 1, "conductor must be positive");
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = exact_monic_div(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_monic_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for k in (dd..num.len()).rev() {
        let c = rem[k].clone();
        if c.is_zero() {
            continue;
        }
        quot[k - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[k - dd + j] -= &c * dj;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact polynomial division");
    quot
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

fn push_varint(buf: &mut Vec<u8>, mut x: u64) {
    loop {
        let byte = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            buf.push(byte);
            return;
        }
        buf.push(byte | 0x80);
    }
}

fn push_bigint(buf: &mut Vec<u8>, x: &BigInt) {
    let (sign, mag) = x.to_bytes_le();
    buf.push(match sign {
        Sign::Minus => 0,
        Sign::NoSign => 1,
        Sign::Plus => 2,
    });
    push_varint(buf, mag.len() as u64);
    buf.extend_from_slice(&mag);
}

impl FieldSpec {
    pub fn rational() -> Self {
        FieldSpec { kind: FieldKind::Rational, modulus: Arc::new(Vec::new()) }
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_PRIME {
            return Err(FieldError::InvalidSpec(format!("prime modulus {p} exceeds 2^32")));
        }
        if !is_prime(p) {
            return Err(FieldError::InvalidSpec(format!("{p} is not prime")));
        }
        Ok(FieldSpec { kind: FieldKind::Prime(p), modulus: Arc::new(Vec::new()) })
    }

    pub fn cyclotomic(m: u64) -> Result<Self, FieldError> {
        if m == 0 || m > MAX_CONDUCTOR {
            return Err(FieldError::InvalidSpec(format!(
                "cyclotomic conductor must lie in 1..={MAX_CONDUCTOR}, got {m}"
            )));
        }
        let modulus = cyclotomic_polynomial(m).into_iter().map(BigRational::from_integer).collect();
        Ok(FieldSpec { kind: FieldKind::Cyclotomic(m), modulus: Arc::new(modulus) })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Degree over the prime field (or over Q).
    pub fn degree(&self) -> usize {
        match self.kind {
            FieldKind::Cyclotomic(_) => self.modulus.len() - 1,
            _ => 1,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.kind {
            FieldKind::Prime(p) => p,
            _ => 0,
        }
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Prime(p) => Some(p),
            _ => None,
        }
    }

    pub fn zero(&self) -> FieldElement {
        match self.kind {
            FieldKind::Prime(_) => FieldElement::Residue(0),
            _ => FieldElement::Rational(vec![BigRational::zero(); self.degree()]),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(x))
    }

    pub fn from_bigint(&self, x: &BigInt) -> FieldElement {
        match self.kind {
            FieldKind::Prime(p) => FieldElement::Residue(bigint_mod(x, p)),
            _ => {
                let mut coeffs = vec![BigRational::zero(); self.degree()];
                coeffs[0] = BigRational::from_integer(x.clone());
                FieldElement::Rational(coeffs)
            }
        }
    }

    /// The image of a rational number; fails over GF(p) when p divides the
    /// denominator.
    pub fn from_ratio(&self, x: &BigRational) -> Result<FieldElement, FieldError> {
        match self.kind {
            FieldKind::Prime(p) => {
                let den = bigint_mod(x.denom(), p);
                if den == 0 {
                    return Err(FieldError::NotInField { text: x.to_string(), field: self.to_string() });
                }
                let num = bigint_mod(x.numer(), p);
                Ok(FieldElement::Residue(mul_mod(num, mod_pow(den, p - 2, p), p)))
            }
            _ => {
                let mut coeffs = vec![BigRational::zero(); self.degree()];
                coeffs[0] = x.clone();
                Ok(FieldElement::Rational(coeffs))
            }
        }
    }

    /// The distinguished primitive root of unity `z` of a cyclotomic field.
    pub fn zeta(&self) -> Result<FieldElement, FieldError> {
        match self.kind {
            FieldKind::Cyclotomic(_) => {
                let mut coeffs = vec![BigRational::zero(); self.degree() + 1];
                coeffs[1] = BigRational::one();
                Ok(self.reduce(coeffs))
            }
            _ => Err(FieldError::NotInField { text: "z".into(), field: self.to_string() }),
        }
    }

    /// Whether `a` is a canonical element of this field.
    pub fn contains(&self, a: &FieldElement) -> bool {
        match (self.kind, a) {
            (FieldKind::Prime(p), FieldElement::Residue(x)) => *x < p,
            (FieldKind::Prime(_), _) | (_, FieldElement::Residue(_)) => false,
            (_, FieldElement::Rational(c)) => c.len() == self.degree(),
        }
    }

    pub fn check(&self, a: &FieldElement) -> Result<(), FieldError> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(self.to_string()))
        }
    }

    pub fn is_zero(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Residue(x) => *x == 0,
            FieldElement::Rational(c) => c.iter().all(Zero::is_zero),
        }
    }

    pub fn is_one(&self, a: &FieldElement) -> bool {
        match a {
            FieldElement::Residue(x) => *x == 1,
            FieldElement::Rational(c) => c[0].is_one() && c[1..].iter().all(Zero::is_zero),
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Residue(x), FieldElement::Residue(y)) => {
                let p = self.characteristic();
                FieldElement::Residue((x + y) % p)
            }
            (FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(x.iter().zip(y).map(|(s, t)| s + t).collect())
            }
            _ => panic!("mixed field elements in {self}"),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        match a {
            FieldElement::Residue(x) => {
                let p = self.characteristic();
                FieldElement::Residue((p - x) % p)
            }
            FieldElement::Rational(c) => FieldElement::Rational(c.iter().map(|s| -s).collect()),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Residue(x), FieldElement::Residue(y)) => {
                let p = self.characteristic();
                FieldElement::Residue((x + p - y) % p)
            }
            (FieldElement::Rational(x), FieldElement::Rational(y)) => {
                FieldElement::Rational(x.iter().zip(y).map(|(s, t)| s - t).collect())
            }
            _ => panic!("mixed field elements in {self}"),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Residue(x), FieldElement::Residue(y)) => {
                FieldElement::Residue(mul_mod(*x, *y, self.characteristic()))
            }
            (FieldElement::Rational(x), FieldElement::Rational(y)) => {
                if x.len() == 1 {
                    return FieldElement::Rational(vec![&x[0] * &y[0]]);
                }
                let mut prod = vec![BigRational::zero(); x.len() + y.len() - 1];
                for (i, s) in x.iter().enumerate() {
                    if s.is_zero() {
                        continue;
                    }
                    for (j, t) in y.iter().enumerate() {
                        if !t.is_zero() {
                            prod[i + j] += s * t;
                        }
                    }
                }
                self.reduce(prod)
            }
            _ => panic!("mixed field elements in {self}"),
        }
    }

    /// Reduce a coefficient vector of arbitrary length modulo the cyclotomic
    /// polynomial.
    fn reduce(&self, mut coeffs: Vec<BigRational>) -> FieldElement {
        let d = self.degree();
        for k in (d..coeffs.len()).rev() {
            let c = std::mem::take(&mut coeffs[k]);
            if c.is_zero() {
                continue;
            }
            for (j, mj) in self.modulus[..d].iter().enumerate() {
                if !mj.is_zero() {
                    coeffs[k - d + j] -= &c * mj;
                }
            }
        }
        coeffs.truncate(d);
        coeffs.resize(d, BigRational::zero());
        FieldElement::Rational(coeffs)
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if self.is_zero(a) {
            return Err(FieldError::DivisionByZero);
        }
        match a {
            FieldElement::Residue(x) => {
                let p = self.characteristic();
                Ok(FieldElement::Residue(mod_pow(*x, p - 2, p)))
            }
            FieldElement::Rational(c) if c.len() == 1 => Ok(FieldElement::Rational(vec![c[0].recip()])),
            FieldElement::Rational(c) => Ok(self.cyclotomic_inverse(c)),
        }
    }

    // Solve x * a = 1 as a linear system in the coefficients of x: the rows
    // of the system are the coefficient vectors of z^j * a.
    fn cyclotomic_inverse(&self, a: &[BigRational]) -> FieldElement {
        let d = a.len();
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(d);
        let mut zj = a.to_vec();
        for _ in 0..d {
            rows.push(zj.clone());
            let mut shifted = vec![BigRational::zero()];
            shifted.extend(zj);
            zj = match self.reduce(shifted) {
                FieldElement::Rational(c) => c,
                FieldElement::Residue(_) => unreachable!(),
            };
        }
        // Augmented system: sum_j x_j rows[j][k] = delta_{k,0}.
        let mut sys: Vec<Vec<BigRational>> = (0..d)
            .map(|k| {
                let mut eq: Vec<BigRational> = (0..d).map(|j| rows[j][k].clone()).collect();
                eq.push(if k == 0 { BigRational::one() } else { BigRational::zero() });
                eq
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !sys[r][col].is_zero()).expect("nonzero cyclotomic element is invertible");
            sys.swap(col, piv);
            let inv = sys[col][col].recip();
            for v in sys[col].iter_mut() {
                *v *= &inv;
            }
            let pivot = sys[col].clone();
            for (r, row) in sys.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (x, y) in row[col..].iter_mut().zip(&pivot[col..]) {
                        *x -= &f * y;
                    }
                }
            }
        }
        FieldElement::Rational(sys.into_iter().map(|mut eq| eq.pop().unwrap()).collect())
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, exp: i64) -> Result<FieldElement, FieldError> {
        let mut base = if exp < 0 { self.inv(a)? } else { a.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }

    /// Checked binary arithmetic: both operands must be canonical elements of
    /// this field.
    pub fn arith(&self, a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
        self.check(a)?;
        self.check(b)?;
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    /// Multiplicative order of a nonzero element, searching up to `bound`.
    pub fn multiplicative_order(&self, a: &FieldElement, bound: u64) -> Option<u64> {
        if self.is_zero(a) {
            return None;
        }
        let mut x = a.clone();
        for k in 1..=bound {
            if self.is_one(&x) {
                return Some(k);
            }
            x = self.mul(&x, a);
        }
        None
    }

    pub fn parse_element(&self, text: &str) -> Result<FieldElement, FieldError> {
        expr::parse(self, text)
    }

    /// Render an element in the input grammar; `parse_element` inverts it.
    pub fn format(&self, a: &FieldElement) -> String {
        match a {
            FieldElement::Residue(x) => x.to_string(),
            FieldElement::Rational(c) if c.len() == 1 => c[0].to_string(),
            FieldElement::Rational(c) => {
                let mut out = String::new();
                for (k, coeff) in c.iter().enumerate().rev() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let term = match k {
                        0 => coeff.to_string(),
                        _ => {
                            let power = if k == 1 { "z".to_string() } else { format!("z^{k}") };
                            if coeff.is_one() {
                                power
                            } else if (-coeff).is_one() {
                                format!("-{power}")
                            } else {
                                format!("{coeff}*{power}")
                            }
                        }
                    };
                    if out.is_empty() {
                        out = term;
                    } else if let Some(rest) = term.strip_prefix('-') {
                        out.push_str(" - ");
                        out.push_str(rest);
                    } else {
                        out.push_str(" + ");
                        out.push_str(&term);
                    }
                }
                if out.is_empty() {
                    "0".into()
                } else {
                    out
                }
            }
        }
    }

    /// Byte string that is injective on canonical elements.
    pub fn canonical_key(&self, a: &FieldElement) -> Vec<u8> {
        let mut buf = Vec::new();
        write_key(a, &mut buf);
        buf
    }
}

/// Append the canonical key of `a` to `buf`. Keys are prefix-free, so
/// concatenations of keys are injective on sequences of elements.
pub fn write_key(a: &FieldElement, buf: &mut Vec<u8>) {
    match a {
        FieldElement::Residue(x) => push_varint(buf, *x),
        FieldElement::Rational(c) => {
            push_varint(buf, c.len() as u64);
            for coeff in c {
                push_bigint(buf, coeff.numer());
                push_bigint(buf, coeff.denom());
            }
        }
    }
}

impl FieldElement {
    /// The rational coefficients, if this is a characteristic-zero element.
    pub fn coefficients(&self) -> Option<&[BigRational]> {
        match self {
            FieldElement::Rational(c) => Some(c),
            FieldElement::Residue(_) => None,
        }
    }

    /// Least common multiple of the denominators of the coefficients.
    pub fn denominator(&self) -> BigInt {
        match self {
            FieldElement::Residue(_) => BigInt::one(),
            FieldElement::Rational(c) => c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zeta6_squared_reduces() {
        let k = FieldSpec::cyclotomic(6).unwrap();
        let z = k.zeta().unwrap();
        let z2 = k.mul(&z, &z);
        assert_eq!(z2, FieldElement::Rational(vec![q(-1, 1), q(1, 1)]));
        assert_eq!(k.canonical_key(&z2), k.canonical_key(&k.sub(&z, &k.one())));
    }

    #[test]
    fn prime_inverse() {
        let k = FieldSpec::prime(5).unwrap();
        assert_eq!(k.inv(&k.from_i64(2)).unwrap(), FieldElement::Residue(3));
        assert_eq!(k.from_i64(-1), FieldElement::Residue(4));
    }

    #[test]
    fn rational_sum() {
        let k = FieldSpec::rational();
        let a = k.from_ratio(&q(1, 2)).unwrap();
        let b = k.from_ratio(&q(1, 3)).unwrap();
        assert_eq!(k.add(&a, &b), k.from_ratio(&q(5, 6)).unwrap());
    }

    #[test]
    fn arith_errors() {
        let k = FieldSpec::rational();
        assert_eq!(k.arith(&k.one(), &k.zero(), ArithOp::Div), Err(FieldError::DivisionByZero));
        let g = FieldSpec::prime(7).unwrap();
        assert!(matches!(k.arith(&k.one(), &g.one(), ArithOp::Add), Err(FieldError::FieldMismatch(_))));
        assert!(matches!(
            g.arith(&FieldElement::Residue(9), &g.one(), ArithOp::Add),
            Err(FieldError::FieldMismatch(_))
        ));
    }

    #[test]
    fn invalid_specs() {
        assert!(FieldSpec::prime(9).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::cyclotomic(0).is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(3), ints(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for m in 1..40 {
            assert_eq!(cyclotomic_polynomial(m).len() as u64 - 1, euler_phi(m));
        }
    }

    #[test]
    fn zeta_has_exact_order() {
        for m in [3u64, 4, 6, 5, 12] {
            let k = FieldSpec::cyclotomic(m).unwrap();
            assert_eq!(k.degree() as u64, euler_phi(m));
            assert_eq!(k.multiplicative_order(&k.zeta().unwrap(), 100), Some(m));
        }
    }

    #[test]
    fn keys_distinguish() {
        let k = FieldSpec::rational();
        let half = k.from_ratio(&q(1, 2)).unwrap();
        assert_ne!(k.canonical_key(&half), k.canonical_key(&k.from_i64(2)));
        let c = FieldSpec::cyclotomic(6).unwrap();
        let zero_poly = c.sub(&c.zeta().unwrap(), &c.zeta().unwrap());
        assert_eq!(c.canonical_key(&zero_poly), c.canonical_key(&c.zero()));
    }

    fn cyclo_element(m: u64) -> impl Strategy<Value = FieldElement> {
        let d = euler_phi(m) as usize;
        prop::collection::vec((-20i64..20, 1i64..6), d)
            .prop_map(|v| FieldElement::Rational(v.into_iter().map(|(n, d)| q(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn cyclotomic_field_axioms(a in cyclo_element(6), b in cyclo_element(6), c in cyclo_element(6)) {
            let k = FieldSpec::cyclotomic(6).unwrap();
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            if !k.is_zero(&a) {
                prop_assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
            }
        }

        #[test]
        fn cyclotomic12_inverse(a in cyclo_element(12)) {
            let k = FieldSpec::cyclotomic(12).unwrap();
            prop_assume!(!k.is_zero(&a));
            prop_assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
        }

        #[test]
        fn prime_field_axioms(a in 0u64..101, b in 0u64..101, c in 0u64..101) {
            let k = FieldSpec::prime(101).unwrap();
            let (a, b, c) = (FieldElement::Residue(a), FieldElement::Residue(b), FieldElement::Residue(c));
            prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
            prop_assert_eq!(k.add(&k.sub(&a, &b), &b), a.clone());
            if !k.is_zero(&a) {
                prop_assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
            }
        }

        #[test]
        fn format_parse_round_trip(a in cyclo_element(6)) {
            let k = FieldSpec::cyclotomic(6).unwrap();
            prop_assert_eq!(k.parse_element(&k.format(&a)).unwrap(), a);
        }

        #[test]
        fn format_parse_round_trip_q12(a in cyclo_element(12)) {
            let k = FieldSpec::cyclotomic(12).unwrap();
            prop_assert_eq!(k.parse_element(&k.format(&a)).unwrap(), a);
        }

        #[test]
        fn format_parse_round_trip_prime(x in 0u64..97) {
            let k = FieldSpec::prime(97).unwrap();
            let a = FieldElement::Residue(x);
            prop_assert_eq!(k.parse_element(&k.format(&a)).unwrap(), a);
        }
    }
}
