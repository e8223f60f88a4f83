//! Functions on F_p^n: characters, Efron–Stein parts, coordinate Laplacians and derivatives,
//! the noise operator, and the hypercontractive and small-set expansion checks.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::report::InequalityReport;
use crate::scalar::{real, to_f64, zero, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum CubeError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("contract: {0}")]
    Contract(String),
}

/// Coordinate subset of [n] as a bit mask; bit i is coordinate i.
pub type CoordSet = u32;

fn check_prime(p: usize) -> Result<(), CubeError> {
    if p >= 2 && (2..p).take_while(|k| k * k <= p).all(|k| !p.is_multiple_of(k)) {
        Ok(())
    } else {
        Err(CubeError::Domain(format!("{p} is not prime")))
    }
}

fn size(p: usize, n: usize) -> usize {
    p.pow(n as u32)
}

pub fn digits(p: usize, n: usize, mut idx: usize) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let d = (idx % p) as u8;
            idx /= p;
            d
        })
        .collect()
}

pub fn undigits(p: usize, xs: &[u8]) -> usize {
    xs.iter().rev().fold(0, |acc, &d| acc * p + d as usize)
}

fn support(p: usize, n: usize, mut idx: usize) -> CoordSet {
    let mut s = 0;
    for i in 0..n {
        if !idx.is_multiple_of(p) {
            s |= 1 << i;
        }
        idx /= p;
    }
    s
}

pub fn coords(s: CoordSet, n: usize) -> Vec<usize> {
    (0..n).filter(|i| s & (1 << i) != 0).collect()
}

/// All subsets of `s`, including the empty set and `s` itself.
pub fn subsets(s: CoordSet) -> impl Iterator<Item = CoordSet> {
    let mut next = Some(s);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & s) };
        Some(cur)
    })
}

/// Applies `stage` to every p-point fibre along each coordinate in turn.
fn tensor_stages<T: Scalar>(p: usize, n: usize, data: &mut [Complex<T>], stage: impl Fn(&mut [Complex<T>])) {
    let mut buf = vec![zero::<T>(); p];
    let mut stride = 1;
    for _ in 0..n {
        let block = stride * p;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                for (k, b) in buf.iter_mut().enumerate() {
                    *b = data[base + off + k * stride];
                }
                stage(&mut buf);
                for (k, b) in buf.iter().enumerate() {
                    data[base + off + k * stride] = *b;
                }
            }
        }
        stride = block;
    }
}

fn dft_stage<T: Scalar>(p: usize, inverse: bool) -> impl Fn(&mut [Complex<T>]) {
    let sign = if inverse { 1.0 } else { -1.0 };
    let scale = if inverse { 1.0 } else { 1.0 / p as f64 };
    let kernel: Vec<Complex<T>> = (0..p)
        .map(|k| {
            let c = Complex::from_polar(scale, sign * 2.0 * std::f64::consts::PI * k as f64 / p as f64);
            Complex::new(real(c.re), real(c.im))
        })
        .collect();
    move |v: &mut [Complex<T>]| {
        let out: Vec<Complex<T>> =
            (0..p).map(|g| (0..p).fold(zero::<T>(), |acc, x| acc + v[x] * kernel[(g * x) % p])).collect();
        v.copy_from_slice(&out);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubeFunction<T: Scalar = f64> {
    p: usize,
    n: usize,
    values: Vec<Complex<T>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubeSpectrum<T: Scalar = f64> {
    p: usize,
    n: usize,
    coeffs: Vec<Complex<T>>,
    supports: Vec<CoordSet>,
}

impl<T: Scalar> CubeFunction<T> {
    pub fn new(p: usize, n: usize, values: Vec<Complex<T>>) -> Result<Self, CubeError> {
        check_prime(p)?;
        if n > 31 || values.len() != size(p, n) {
            return Err(CubeError::Shape(format!("{} values for F_{p}^{n}", values.len())));
        }
        Ok(CubeFunction { p, n, values })
    }

    pub fn from_fn(p: usize, n: usize, g: impl Fn(&[u8]) -> Complex<T>) -> Result<Self, CubeError> {
        check_prime(p)?;
        let values = (0..size(p, n)).map(|i| g(&digits(p, n, i))).collect();
        Self::new(p, n, values)
    }

    pub fn from_real(p: usize, n: usize, values: &[f64]) -> Result<Self, CubeError> {
        Self::new(p, n, values.iter().map(|&v| Complex::new(real(v), T::zero())).collect())
    }

    pub fn indicator(p: usize, n: usize, member: impl Fn(&[u8]) -> bool) -> Result<Self, CubeError> {
        Self::from_fn(p, n, |x| if member(x) { Complex::new(T::one(), T::zero()) } else { zero() })
    }

    pub fn constant(p: usize, n: usize, c: Complex<T>) -> Result<Self, CubeError> {
        Self::from_fn(p, n, |_| c)
    }

    pub fn character(p: usize, n: usize, gamma: &[u8]) -> Result<Self, CubeError> {
        if gamma.len() != n {
            return Err(CubeError::Shape(format!("character label of length {}", gamma.len())));
        }
        let roots: Vec<Complex<f64>> =
            (0..p).map(|k| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / p as f64)).collect();
        Self::from_fn(p, n, |x| {
            let e = gamma.iter().zip(x).map(|(&g, &xi)| g as usize * xi as usize).sum::<usize>() % p;
            Complex::new(real(roots[e].re), real(roots[e].im))
        })
    }

    /// Uniform random values in the unit square.
    pub fn random(p: usize, n: usize, rng: &mut impl Rng) -> Result<Self, CubeError> {
        let values = (0..size(p, n))
            .map(|_| Complex::new(real(rng.gen_range(-1.0..1.0)), real(rng.gen_range(-1.0..1.0))))
            .collect();
        Self::new(p, n, values)
    }

    /// Random real function of degree at most `d`.
    pub fn random_low_degree(p: usize, n: usize, d: usize, rng: &mut impl Rng) -> Result<Self, CubeError> {
        let g = Self::random(p, n, rng)?.transform().truncate(d).inverse();
        Ok(g.map_values(|v| Complex::new(v.re, T::zero())))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn value(&self, x: &[u8]) -> Complex<T> {
        self.values[undigits(self.p, x)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map_values(&self, g: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        CubeFunction { p: self.p, n: self.n, values: self.values.iter().map(|&v| g(v)).collect() }
    }

    fn zip(&self, other: &Self, g: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!((self.p, self.n), (other.p, other.n), "cube mismatch");
        CubeFunction {
            p: self.p,
            n: self.n,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map_values(|v| v * c)
    }

    pub fn mean(&self) -> Complex<T> {
        let s = self.values.iter().fold(zero::<T>(), |a, &v| a + v);
        s / real::<T>(self.len() as f64)
    }

    pub fn norm2_sq(&self) -> f64 {
        self.values.iter().map(|v| to_f64(v.norm_sqr())).sum::<f64>() / self.len() as f64
    }

    pub fn norm4_4(&self) -> f64 {
        self.values.iter().map(|v| to_f64(v.norm_sqr()).powi(2)).sum::<f64>() / self.len() as f64
    }

    pub fn inner(&self, other: &Self) -> Complex<f64> {
        let s = self.values.iter().zip(&other.values).fold(Complex::new(0.0, 0.0), |acc, (a, b)| {
            acc + Complex::new(to_f64(a.re), to_f64(a.im)) * Complex::new(to_f64(b.re), -to_f64(b.im))
        });
        s / self.len() as f64
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        crate::scalar::max_abs_diff(&self.values, &other.values)
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|v| v.im == T::zero() && (v.re == T::zero() || v.re == T::one()))
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| to_f64(v.im.abs()) <= T::DEGREE_CUTOFF)
    }

    pub fn transform(&self) -> CubeSpectrum<T> {
        let mut coeffs = self.values.clone();
        tensor_stages(self.p, self.n, &mut coeffs, dft_stage(self.p, false));
        let supports = (0..coeffs.len()).map(|g| support(self.p, self.n, g)).collect();
        CubeSpectrum { p: self.p, n: self.n, coeffs, supports }
    }

    pub fn degree(&self) -> usize {
        self.transform().degree()
    }

    /// f^{=S}.
    pub fn efron_stein(&self, s: CoordSet) -> Self {
        self.transform().masked(|supp| supp == s).inverse()
    }

    pub fn level(&self, d: usize) -> Self {
        self.transform().pure(d).inverse()
    }

    pub fn upto(&self, d: usize) -> Self {
        self.transform().truncate(d).inverse()
    }

    /// f_{S→x}, with `x` listing the values on the coordinates of `s` in increasing order.
    pub fn restrict(&self, s: CoordSet, x: &[u8]) -> Result<Self, CubeError> {
        let fixed = coords(s, self.n);
        if fixed.len() != x.len() || s >> self.n != 0 {
            return Err(CubeError::Shape(format!("assignment of length {} for {} coordinates", x.len(), fixed.len())));
        }
        let free: Vec<usize> = (0..self.n).filter(|i| s & (1 << i) == 0).collect();
        let mut point = vec![0u8; self.n];
        for (&c, &v) in fixed.iter().zip(x) {
            point[c] = v;
        }
        let values = (0..size(self.p, free.len()))
            .map(|y| {
                for (&c, v) in free.iter().zip(digits(self.p, free.len(), y)) {
                    point[c] = v;
                }
                self.value(&point)
            })
            .collect();
        Ok(CubeFunction { p: self.p, n: free.len(), values })
    }

    /// ‖f_{S→x}‖₂² for every x ∈ F_p^S, indexed by the base-p code of x.
    pub fn restriction_norms(&self, s: CoordSet) -> Vec<f64> {
        let fixed = coords(s, self.n);
        let mut sums = vec![0.0; size(self.p, fixed.len())];
        for (i, v) in self.values.iter().enumerate() {
            let z = digits(self.p, self.n, i);
            let key = fixed.iter().rev().fold(0, |acc, &c| acc * self.p + z[c] as usize);
            sums[key] += to_f64(v.norm_sqr());
        }
        let free = size(self.p, self.n - fixed.len()) as f64;
        sums.iter().map(|s| s / free).collect()
    }

    /// E_S, the average over the coordinates in `s`.
    pub fn expectation_op(&self, s: CoordSet) -> Self {
        let mut values = self.values.clone();
        let mut stride = 1;
        let p = self.p;
        let inv = real::<T>(1.0 / p as f64);
        for i in 0..self.n {
            let block = stride * p;
            if s & (1 << i) != 0 {
                for base in (0..values.len()).step_by(block) {
                    for off in 0..stride {
                        let m = (0..p).fold(zero::<T>(), |a, k| a + values[base + off + k * stride]) * inv;
                        for k in 0..p {
                            values[base + off + k * stride] = m;
                        }
                    }
                }
            }
            stride = block;
        }
        CubeFunction { p, n: self.n, values }
    }

    /// L_T as the projection onto characters whose support contains `t`.
    pub fn laplacian(&self, t: CoordSet) -> Self {
        self.transform().masked(|supp| supp & t == t).inverse()
    }

    /// L_T = Σ_{S⊆T} (−1)^{|S|} E_S.
    pub fn laplacian_probabilistic(&self, t: CoordSet) -> Self {
        subsets(t).fold(self.map_values(|_| zero()), |acc, s| {
            let term = self.expectation_op(s);
            if s.count_ones() % 2 == 0 {
                acc.add(&term)
            } else {
                acc.sub(&term)
            }
        })
    }

    /// D_{S,x} = (L_S f)_{S→x}.
    pub fn derivative(&self, s: CoordSet, x: &[u8]) -> Result<Self, CubeError> {
        self.laplacian(s).restrict(s, x)
    }

    pub fn influence_at(&self, s: CoordSet, x: &[u8]) -> Result<f64, CubeError> {
        Ok(self.derivative(s, x)?.norm2_sq())
    }

    /// I_S = ‖L_S f‖₂².
    pub fn influence(&self, s: CoordSet) -> f64 {
        self.laplacian(s).norm2_sq()
    }

    /// I_{S,x} for every x ∈ F_p^S.
    pub fn influences_at(&self, s: CoordSet) -> Vec<f64> {
        self.laplacian(s).restriction_norms(s)
    }

    pub fn noise(&self, rho: f64) -> Result<Self, CubeError> {
        check_rho(rho)?;
        Ok(self.transform().multiplied(|supp| real(rho.powi(supp.count_ones() as i32))).inverse())
    }

    /// T_ρ as the exact expectation over the coordinatewise resampling channel.
    pub fn noise_resampled(&self, rho: f64) -> Result<Self, CubeError> {
        check_rho(rho)?;
        let mut values = self.values.clone();
        let p = self.p;
        let (keep, spread) = (real::<T>(rho), real::<T>((1.0 - rho) / p as f64));
        tensor_stages(p, self.n, &mut values, |v| {
            let total = v.iter().fold(zero::<T>(), |a, &x| a + x);
            for x in v.iter_mut() {
                *x = *x * keep + total * spread;
            }
        });
        Ok(CubeFunction { p, n: self.n, values })
    }
}

fn check_rho(rho: f64) -> Result<(), CubeError> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(CubeError::Domain(format!("noise rate {rho} outside [0,1]")))
    }
}

impl<T: Scalar> CubeSpectrum<T> {
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, gamma: &[u8]) -> Complex<T> {
        self.coeffs[undigits(self.p, gamma)]
    }

    pub fn support_of(&self, idx: usize) -> CoordSet {
        self.supports[idx]
    }

    pub fn norm2_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| to_f64(c.norm_sqr())).sum()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        crate::scalar::max_abs_diff(&self.coeffs, &other.coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .zip(&self.supports)
            .filter(|(c, _)| to_f64(c.norm()) > T::DEGREE_CUTOFF)
            .map(|(_, s)| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Σ_{|S|=k} ‖f^{=S}‖₂² for k = 0..=n.
    pub fn level_mass(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        for (c, s) in self.coeffs.iter().zip(&self.supports) {
            out[s.count_ones() as usize] += to_f64(c.norm_sqr());
        }
        out
    }

    pub fn masked(&self, keep: impl Fn(CoordSet) -> bool) -> Self {
        self.multiplied(|s| if keep(s) { T::one() } else { T::zero() })
    }

    pub fn multiplied(&self, factor: impl Fn(CoordSet) -> T) -> Self {
        let coeffs = self.coeffs.iter().zip(&self.supports).map(|(&c, &s)| c * factor(s)).collect();
        CubeSpectrum { coeffs, ..self.clone() }
    }

    pub fn truncate(&self, d: usize) -> Self {
        self.masked(|s| s.count_ones() as usize <= d)
    }

    pub fn pure(&self, d: usize) -> Self {
        self.masked(|s| s.count_ones() as usize == d)
    }

    pub fn inverse(&self) -> CubeFunction<T> {
        let mut values = self.coeffs.clone();
        tensor_stages(self.p, self.n, &mut values, dft_stage(self.p, true));
        CubeFunction { p: self.p, n: self.n, values }
    }
}

/// Coordinate sets of size at most `d` in [n].
pub fn small_sets(n: usize, d: usize) -> Vec<CoordSet> {
    (0..1u32 << n).filter(|s| s.count_ones() as usize <= d).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeGlobalness {
    pub d: usize,
    /// max ‖f_{S→x}‖₂² over |S| ≤ d.
    pub level: f64,
    pub worst_set: Vec<usize>,
    pub worst_assignment: Vec<u8>,
}

/// Exact globalness level at order `d`, scanning every restriction.
pub fn cube_globalness<T: Scalar>(f: &CubeFunction<T>, d: usize) -> CubeGlobalness {
    let sets = small_sets(f.n, d);
    let best = sets
        .par_iter()
        .map(|&s| {
            let norms = f.restriction_norms(s);
            let (x, v) =
                norms.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
            (v, s, x)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::NEG_INFINITY, 0, 0), |b, c| if c.0 > b.0 { c } else { b });
    let (level, s, x) = best;
    let k = s.count_ones() as usize;
    CubeGlobalness { d, level, worst_set: coords(s, f.n), worst_assignment: digits(f.p, k, x) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeHypReport {
    pub degree: usize,
    /// ‖f‖₄⁴ against (100d)^d Σ_S E_x[I_{S,x}²].
    pub hypercontractive: InequalityReport,
    /// ‖f‖₄⁴ against 2·9^d‖f‖₂⁴ + 2Σ_{S≠∅}(4d)^{|S|}‖L_S f‖₄⁴.
    pub inductive: InequalityReport,
    /// ‖f‖₄⁴ against 9^d‖f‖₂⁴, for real functions on the Boolean cube.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bonami: Option<InequalityReport>,
    pub pass: bool,
}

fn pow_d(base: f64, d: usize) -> f64 {
    if d == 0 {
        1.0
    } else {
        base.powi(d as i32)
    }
}

pub fn check_cube_hypercontractivity<T: Scalar>(f: &CubeFunction<T>, d: usize) -> Result<CubeHypReport, CubeError> {
    let deg = f.degree();
    if deg > d {
        return Err(CubeError::Contract(format!("degree {deg} exceeds {d}")));
    }
    let lhs = f.norm4_4();
    let sets: Vec<CoordSet> = (0..1u32 << f.n).collect();
    let terms: Vec<(f64, f64)> = sets
        .par_iter()
        .map(|&s| {
            let lap = f.laplacian(s);
            let infl = lap.restriction_norms(s);
            let sq_mean = infl.iter().map(|i| i * i).sum::<f64>() / infl.len() as f64;
            let induct = if s == 0 { 0.0 } else { pow_d(4.0 * d as f64, s.count_ones() as usize) * lap.norm4_4() };
            (sq_mean, induct)
        })
        .collect();
    let infl_sum: f64 = terms.iter().map(|t| t.0).sum();
    let hyp = InequalityReport::new(lhs, pow_d(100.0 * d as f64, d) * infl_sum);
    let norm2 = f.norm2_sq();
    let induct_rhs = 2.0 * pow_d(9.0, d) * norm2 * norm2 + 2.0 * terms.iter().map(|t| t.1).sum::<f64>();
    let inductive = InequalityReport::new(lhs, induct_rhs);
    let bonami = (f.p == 2 && f.is_real()).then(|| InequalityReport::new(lhs, pow_d(9.0, d) * norm2 * norm2));
    let pass = hyp.pass && inductive.pass && bonami.as_ref().is_none_or(|b| b.pass);
    Ok(CubeHypReport { degree: d, hypercontractive: hyp, inductive, bonami, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubeSseReport {
    pub d: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub globalness: CubeGlobalness,
    /// The set is (d, ε)-global.
    pub hypothesis: bool,
    pub stay_probability: f64,
    pub bound: f64,
    /// Every I_{S,x} with |S| ≤ d is at most 2^{2|S|} max_{T⊆S} ‖f_{T→x_T}‖₂².
    pub influence_from_restrictions: bool,
    /// Every ‖f_{S→x}‖₂² with |S| ≤ d is at most 2^{2|S|} max_{T⊆S} I_{T,x_T}.
    pub restrictions_from_influences: bool,
    /// ‖f^{≤d}‖₄⁴ against (800d)^d ε ‖f^{≤d}‖₂².
    pub truncated_hypercontractive: InequalityReport,
    /// ‖f^{≤d}‖₂² against ε^{1/4}(800d)^{d/4}‖f‖₂².
    pub low_degree_mass: InequalityReport,
    /// ⟨T_ρ f, f⟩ against (ρ^{d+1} + ε^{1/4}(800d)^{d/4})‖f‖₂².
    pub expansion: InequalityReport,
    pub pass: bool,
}

/// Values of `g` on the sub-assignment x_T, with x given on the coordinates of S.
fn sub_assignment(s: CoordSet, t: CoordSet, x: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    let mut k = 0;
    for i in 0..32 {
        if s & (1 << i) != 0 {
            if t & (1 << i) != 0 {
                out.push(x[k]);
            }
            k += 1;
        }
    }
    out
}

/// Checks the two restriction/influence comparisons at every (S, x) with |S| ≤ d.
fn restriction_influence_lemmas<T: Scalar>(f: &CubeFunction<T>, d: usize) -> (bool, bool) {
    let sets = small_sets(f.n, d);
    let norms: std::collections::HashMap<CoordSet, (Vec<f64>, Vec<f64>)> =
        sets.par_iter().map(|&s| (s, (f.restriction_norms(s), f.influences_at(s)))).collect();
    let ok = |v: f64, bound: f64| v <= bound * (1.0 + InequalityReport::SLACK) + InequalityReport::SLACK;
    sets.par_iter()
        .map(|&s| {
            let (rest, infl) = &norms[&s];
            let weight = 4f64.powi(s.count_ones() as i32);
            let k = s.count_ones() as usize;
            (0..rest.len()).fold((true, true), |(a, b), code| {
                let x = digits(f.p, k, code);
                let (mut max_rest, mut max_infl) = (0.0f64, 0.0f64);
                for t in subsets(s) {
                    let xt = undigits(f.p, &sub_assignment(s, t, &x));
                    max_rest = max_rest.max(norms[&t].0[xt]);
                    max_infl = max_infl.max(norms[&t].1[xt]);
                }
                (a && ok(infl[code], weight * max_rest), b && ok(rest[code], weight * max_infl))
            })
        })
        .reduce(|| (true, true), |a, b| (a.0 && b.0, a.1 && b.1))
}

/// Small-set expansion under T_ρ for a 0/1 function, with ε raised to the exact globalness level
/// when the supplied value is smaller.
pub fn check_cube_sse<T: Scalar>(
    set: &CubeFunction<T>,
    rho: f64,
    d: usize,
    epsilon: f64,
) -> Result<CubeSseReport, CubeError> {
    check_rho(rho)?;
    if !set.is_boolean() {
        return Err(CubeError::Contract("expected a 0/1 indicator".into()));
    }
    let mass = set.norm2_sq();
    if mass == 0.0 {
        return Err(CubeError::Domain("empty set".into()));
    }
    let globalness = cube_globalness(set, d);
    let hypothesis = globalness.level <= epsilon;
    let eps = epsilon.max(globalness.level);
    let (influence_from_restrictions, restrictions_from_influences) = restriction_influence_lemmas(set, d);
    let low = set.upto(d);
    let factor = pow_d(800.0 * d as f64, d);
    let truncated_hypercontractive = InequalityReport::new(low.norm4_4(), factor * eps * low.norm2_sq());
    let slack = eps.powf(0.25) * factor.powf(0.25);
    let low_degree_mass = InequalityReport::new(low.norm2_sq(), slack * mass);
    let stay = set.noise(rho)?.inner(set).re;
    let bound = pow_d(rho, d + 1) + slack;
    let expansion = InequalityReport::new(stay, bound * mass);
    let pass = influence_from_restrictions
        && restrictions_from_influences
        && truncated_hypercontractive.pass
        && low_degree_mass.pass
        && expansion.pass;
    Ok(CubeSseReport {
        d,
        rho,
        epsilon: eps,
        globalness,
        hypothesis,
        stay_probability: stay / mass,
        bound,
        influence_from_restrictions,
        restrictions_from_influences,
        truncated_hypercontractive,
        low_degree_mass,
        expansion,
        pass,
    })
}
