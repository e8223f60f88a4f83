//! Arithmetic in GF(p^s), the absolute trace and the additive character kernel.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::scalar::{real, Scalar};

/// Desk-scale cap on the field order.
pub const DEFAULT_MAX_ORDER: usize = 16;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(usize),
    #[error("field order {order} exceeds the cap {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("modulus must be monic of degree at least 1 with coefficients below p")]
    BadModulus,
    #[error("modulus is reducible over F_{0}")]
    Reducible(u8),
    #[error("no shipped modulus for q = {0}")]
    Unsupported(usize),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("cannot parse field config: {0}")]
    Parse(String),
}

/// An element of GF(q), stored as the base-p packing of its polynomial coefficients.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const ZERO: Self = FieldElement(0);
    pub const ONE: Self = FieldElement(1);

    pub const fn from_code(code: u8) -> Self {
        FieldElement(code)
    }

    pub const fn code(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The finite field GF(p^s) with lookup tables for all operations.
#[derive(Clone)]
pub struct Field {
    p: u8,
    s: u8,
    q: usize,
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    trace: Vec<u8>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}; modulus {:?})", self.q, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients in F_p, little-endian.
fn poly_rem(a: &[u8], m: &[u8], p: u8) -> Vec<u8> {
    let p = p as u16;
    let mut r: Vec<u16> = a.iter().map(|&c| c as u16).collect();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap_or(0) % p;
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let sub = lead * c as u16 % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
    }
    r.into_iter().map(|c| (c % p) as u8).collect()
}

fn monic_polys(p: u8, degree: usize) -> impl Iterator<Item = Vec<u8>> {
    let count = (p as usize).pow(degree as u32);
    (0..count).map(move |mut code| {
        let mut v = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            v.push((code % p as usize) as u8);
            code /= p as usize;
        }
        v.push(1);
        v
    })
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(modulus: &[u8], p: u8) -> bool {
    let deg = modulus.len() - 1;
    (1..=deg / 2).all(|d| monic_polys(p, d).all(|g| poly_rem(modulus, &g, p).iter().any(|&c| c != 0)))
}

fn shipped_modulus(q: usize) -> Option<(u8, Vec<u8>)> {
    let m = match q {
        2 => (2, vec![1, 1]),
        3 => (3, vec![1, 1]),
        5 => (5, vec![2, 1]),
        7 => (7, vec![4, 1]),
        4 => (2, vec![1, 1, 1]),
        8 => (2, vec![1, 1, 0, 1]),
        9 => (3, vec![2, 2, 1]),
        16 => (2, vec![1, 1, 0, 0, 1]),
        _ => return None,
    };
    Some(m)
}

impl Field {
    /// The field of order `q` with the shipped canonical modulus.
    pub fn standard(q: usize) -> Result<Self, FieldError> {
        let (p, modulus) = shipped_modulus(q).ok_or(FieldError::Unsupported(q))?;
        Self::new(p, modulus)
    }

    /// GF(p^s) with s = deg(modulus); the modulus is checked for irreducibility.
    pub fn new(p: u8, modulus: Vec<u8>) -> Result<Self, FieldError> {
        Self::with_max_order(p, modulus, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(p: u8, modulus: Vec<u8>, cap: usize) -> Result<Self, FieldError> {
        if !is_prime(p as usize) {
            return Err(FieldError::NotPrime(p as usize));
        }
        if modulus.len() < 2 || modulus.last() != Some(&1) || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus);
        }
        let s = modulus.len() - 1;
        let q = (p as usize).checked_pow(s as u32).unwrap_or(usize::MAX);
        if q > cap || q > 256 {
            return Err(FieldError::TooLarge { order: q, cap });
        }
        if !is_irreducible(&modulus, p) {
            return Err(FieldError::Reducible(p));
        }
        Ok(Self::build(p, s, q, modulus))
    }

    fn build(p: u8, s: usize, q: usize, modulus: Vec<u8>) -> Self {
        let coeffs = |code: usize| -> Vec<u8> {
            let mut c = code;
            (0..s)
                .map(|_| {
                    let d = (c % p as usize) as u8;
                    c /= p as usize;
                    d
                })
                .collect()
        };
        let pack = |v: &[u8]| -> u8 { v.iter().rev().fold(0usize, |acc, &d| acc * p as usize + d as usize) as u8 };
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let ca = coeffs(a);
            for b in 0..q {
                let cb = coeffs(b);
                let sum: Vec<u8> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = pack(&sum);
                let mut prod = vec![0u16; 2 * s - 1];
                for (i, &x) in ca.iter().enumerate() {
                    for (j, &y) in cb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x as u16 * y as u16) % p as u16;
                    }
                }
                let prod: Vec<u8> = prod.into_iter().map(|c| c as u8).collect();
                let mut red = poly_rem(&prod, &modulus, p);
                red.resize(s, 0);
                mul[a * q + b] = pack(&red);
            }
        }
        let neg = (0..q).map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap_or(0) as u8).collect();
        let inv =
            (0..q).map(|a| if a == 0 { 0 } else { (1..q).find(|&b| mul[a * q + b] == 1).unwrap_or(0) as u8 }).collect();
        // trace: x + x^p + ... + x^{p^{s-1}} lands in the prime subfield, i.e. a constant polynomial.
        let trace = (0..q)
            .map(|a| {
                let mut acc = 0u8;
                let mut frob = a as u8;
                for _ in 0..s {
                    acc = add[acc as usize * q + frob as usize];
                    let mut pow = 1u8;
                    for _ in 0..p {
                        pow = mul[pow as usize * q + frob as usize];
                    }
                    frob = pow;
                }
                debug_assert!((acc as usize) < p as usize);
                acc
            })
            .collect();
        Field { p, s: s as u8, q, modulus, add, mul, neg, inv, trace }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.s as usize
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q as u16).map(|c| FieldElement(c as u8))
    }

    pub fn element(&self, code: usize) -> FieldElement {
        assert!(code < self.q, "code {code} out of range for GF({})", self.q);
        FieldElement(code as u8)
    }

    /// Little-endian polynomial-basis coordinates over F_p.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u8> {
        let mut c = x.0 as usize;
        (0..self.s)
            .map(|_| {
                let d = (c % self.p as usize) as u8;
                c /= self.p as usize;
                d
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u8]) -> FieldElement {
        assert!(coeffs.len() <= self.s as usize && coeffs.iter().all(|&c| c < self.p));
        let code = coeffs.iter().rev().fold(0usize, |acc, &d| acc * self.p as usize + d as usize);
        FieldElement(code as u8)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.add[a.0 as usize * self.q + b.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.mul[a.0 as usize * self.q + b.0 as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            Err(FieldError::ZeroInverse)
        } else {
            Ok(FieldElement(self.inv[a.0 as usize]))
        }
    }

    /// Absolute trace to F_p, as a residue in 0..p.
    #[inline]
    pub fn trace(&self, x: FieldElement) -> u8 {
        self.trace[x.0 as usize]
    }

    /// Exponent k with kernel(a, x) = ω^k.
    #[inline]
    pub fn kernel_exponent(&self, a: FieldElement, x: FieldElement) -> u8 {
        self.trace(self.mul(a, x))
    }

    /// ω^k with ω = exp(2πi/p).
    pub fn root<T: Scalar>(&self, k: u8) -> Complex<T> {
        let k = k % self.p;
        if k == 0 {
            return Complex::new(T::one(), T::zero());
        }
        if self.p == 2 {
            return Complex::new(-T::one(), T::zero());
        }
        let theta = real::<T>(2.0 * std::f64::consts::PI * k as f64 / self.p as f64);
        Complex::new(theta.cos(), theta.sin())
    }

    /// All p-th roots of unity, indexed by exponent.
    pub fn roots<T: Scalar>(&self) -> Vec<Complex<T>> {
        (0..self.p).map(|k| self.root(k)).collect()
    }

    /// ω^{τ(a·x)}.
    pub fn kernel<T: Scalar>(&self, a: FieldElement, x: FieldElement) -> Complex<T> {
        self.root(self.kernel_exponent(a, x))
    }

    /// `q=<int>,modulus=<comma-separated coeffs>`
    pub fn config_string(&self) -> String {
        let coeffs: Vec<String> = self.modulus.iter().map(u8::to_string).collect();
        format!("q={},modulus={}", self.q, coeffs.join(","))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.config_string())
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::Parse(s.to_string());
        let rest = s.trim().strip_prefix("q=").ok_or_else(bad)?;
        let (q_str, modulus) = match rest.split_once(",modulus=") {
            Some((q, m)) => (q, Some(m)),
            None => (rest, None),
        };
        let q: usize = q_str.trim().parse().map_err(|_| bad())?;
        let Some(modulus) = modulus else {
            return Field::standard(q);
        };
        let coeffs: Vec<u8> =
            modulus.split(',').map(|c| c.trim().parse::<u8>()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let s_deg = coeffs.len().checked_sub(1).ok_or_else(bad)?;
        let p = (2..=q).find(|&p| q.is_multiple_of(p)).ok_or_else(bad)?;
        if p.checked_pow(s_deg as u32) != Some(q) {
            return Err(bad());
        }
        Field::new(p as u8, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHIPPED: [usize; 8] = [2, 3, 4, 5, 7, 8, 9, 16];

    /// Schoolbook F_4 arithmetic on coefficient pairs, modulus t^2+t+1.
    fn f4_mul(a: [u8; 2], b: [u8; 2]) -> [u8; 2] {
        let c0 = a[0] * b[0];
        let c1 = a[0] * b[1] + a[1] * b[0];
        let c2 = a[1] * b[1];
        // t^2 = t + 1
        [(c0 + c2) % 2, (c1 + c2) % 2]
    }

    #[test]
    fn shipped_moduli_are_irreducible() {
        for q in SHIPPED {
            let f = Field::standard(q).unwrap();
            assert_eq!(f.order(), q);
        }
        assert_eq!(Field::new(2, vec![1, 0, 1]), Err(FieldError::Reducible(2)));
        assert!(matches!(Field::new(4, vec![1, 1]), Err(FieldError::NotPrime(4))));
        assert!(matches!(Field::standard(32), Err(FieldError::Unsupported(32))));
        assert!(matches!(Field::new(2, vec![1, 0, 1, 0, 0, 1]), Err(FieldError::TooLarge { order: 32, cap: 16 })));
    }

    #[test]
    fn f4_matches_schoolbook_oracle() {
        let f = Field::standard(4).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let ca = f.coeffs(a);
                let cb = f.coeffs(b);
                let prod = f4_mul([ca[0], ca[1]], [cb[0], cb[1]]);
                assert_eq!(f.coeffs(f.mul(a, b)), prod.to_vec());
            }
        }
        let t = f.from_coeffs(&[0, 1]);
        assert_eq!(f.coeffs(f.mul(t, t)), vec![1, 1]);
        // τ(t) = t + t^2 = 1
        assert_eq!(f.trace(t), 1);
        assert_eq!(f.trace(FieldElement::ONE), 0);
        let k: Complex<f64> = f.kernel(t, t);
        assert!((k - Complex::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn small_prime_examples() {
        let f2 = Field::standard(2).unwrap();
        for x in f2.elements() {
            assert_eq!(f2.trace(x), x.code());
        }
        let k: Complex<f64> = f2.kernel(FieldElement::ONE, FieldElement::ONE);
        assert!((k + 1.0).norm() < 1e-12);
        let f3 = Field::standard(3).unwrap();
        let two = f3.element(2);
        assert_eq!(f3.inv(two), Ok(two));
        assert_eq!(f3.inv(FieldElement::ZERO), Err(FieldError::ZeroInverse));
        let k: Complex<f64> = f3.kernel(FieldElement::ONE, two);
        let expect = Complex::from_polar(1.0, 4.0 * std::f64::consts::PI / 3.0);
        assert!((k - expect).norm() < 1e-12);
    }

    #[test]
    fn axioms_trace_and_kernel_for_all_shipped_fields() {
        for q in SHIPPED {
            let f = Field::standard(q).unwrap();
            let p = f.p() as usize;
            let mut counts = vec![0usize; p];
            for a in f.elements() {
                counts[f.trace(a) as usize] += 1;
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for b in f.elements() {
                    assert_eq!(f.trace(f.add(a, b)), ((f.trace(a) + f.trace(b)) as usize % p) as u8);
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
            assert!(counts.iter().all(|&c| c == q / p), "trace not balanced for q={q}");
            for a in f.elements() {
                for b in f.elements() {
                    let s: Complex<f64> =
                        f.elements().map(|x| f.kernel::<f64>(a, x) * f.kernel::<f64>(b, x).conj()).sum();
                    let expect = if a == b { q as f64 } else { 0.0 };
                    assert!((s - expect).norm() < 1e-12, "q={q} a={a:?} b={b:?}");
                }
            }
        }
    }

    #[test]
    fn config_round_trip() {
        let f = Field::standard(9).unwrap();
        assert_eq!(f.config_string(), "q=9,modulus=2,2,1");
        let g: Field = f.config_string().parse().unwrap();
        assert_eq!(f, g);
        let h: Field = "q=4".parse().unwrap();
        assert_eq!(h.modulus(), &[1, 1, 1]);
        assert!("q=4,modulus=1,0,1".parse::<Field>().is_err());
        assert!("modulus=1".parse::<Field>().is_err());
    }

    #[test]
    fn code_coeff_bijection_is_base_p() {
        let f = Field::standard(9).unwrap();
        for (i, x) in f.elements().enumerate() {
            let c = f.coeffs(x);
            assert_eq!(c[0] as usize + 3 * c[1] as usize, i);
            assert_eq!(f.from_coeffs(&c), x);
        }
    }
}
