//! Functions on L(V,W), their spectra over L(W,V), characters, dictators, degree
//! projections, shifts and restrictions.

use std::sync::Arc;

use num_complex::Complex;

use crate::field::{Field, FieldElement};
use crate::linalg::{LinalgError, Mat, Subspace};
use crate::scalar::{max_abs_diff, real, to_f64, zero, Scalar};
use crate::space::{encode_mat, Space};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FourierError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("frames are not comparable: {0}")]
    Frame(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// How a local space of maps sits inside an ambient L(V,W): local maps A correspond to
/// ambient maps `w_embed · A · v_project`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    v_project: Mat,
    w_embed: Mat,
}

impl Frame {
    pub fn ambient(dim_v: usize, dim_w: usize) -> Self {
        Frame { v_project: Mat::identity(dim_v), w_embed: Mat::identity(dim_w) }
    }

    /// Frame of L(V/V₁, W₁) where V₁, W₁ are given in this frame's local coordinates.
    pub fn restrict(&self, v1: &Subspace, w1: &Subspace, f: &Field) -> Self {
        Frame {
            v_project: v1.quotient_projection(f).mul(&self.v_project, f),
            w_embed: self.w_embed.mul(&w1.basis().transpose(), f),
        }
    }

    pub fn v_project(&self) -> &Mat {
        &self.v_project
    }

    pub fn w_embed(&self) -> &Mat {
        &self.w_embed
    }

    /// Ambient (dim V, dim W).
    pub fn ambient_dims(&self) -> (usize, usize) {
        (self.v_project.cols(), self.w_embed.rows())
    }

    pub fn lift(&self, a: &Mat, f: &Field) -> Mat {
        self.w_embed.mul(a, f).mul(&self.v_project, f)
    }

    /// Same ambient quotient and image, so local maps can be matched one to one.
    pub fn compatible(&self, other: &Frame, f: &Field) -> bool {
        self.ambient_dims() == other.ambient_dims()
            && self.v_project.rows() == other.v_project.rows()
            && self.w_embed.cols() == other.w_embed.cols()
            && self.v_project.kernel(f) == other.v_project.kernel(f)
            && self.w_embed.image(f) == other.w_embed.image(f)
    }
}

/// V₁ ≤ V, W₁ ≤ W and a shift T ∈ L(V,W), all in local coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionTriple {
    pub v1: Subspace,
    pub w1: Subspace,
    pub t: Mat,
}

impl RestrictionTriple {
    pub fn new(v1: Subspace, w1: Subspace, t: Mat) -> Result<Self, FourierError> {
        if t.shape() != (w1.ambient(), v1.ambient()) {
            return Err(FourierError::Shape(format!(
                "shift is {:?}, subspaces need {}x{}",
                t.shape(),
                w1.ambient(),
                v1.ambient()
            )));
        }
        Ok(RestrictionTriple { v1, w1, t })
    }

    /// dim V₁ + codim W₁.
    pub fn order(&self) -> usize {
        self.v1.dim() + self.w1.codim()
    }

    /// Whether both triples select the same affine slice of L(V,W).
    pub fn same_slice(&self, other: &RestrictionTriple, f: &Field) -> bool {
        if self.v1 != other.v1 || self.w1 != other.w1 || self.t.shape() != other.t.shape() {
            return false;
        }
        let d = self.t.sub(&other.t, f);
        self.v1.is_subspace_of(&d.kernel(f), f) && d.image(f).is_subspace_of(&self.w1, f)
    }
}

/// Complex function on L(V,W) with values indexed by the canonical map encoding.
#[derive(Clone, Debug)]
pub struct MapFunction<T: Scalar> {
    space: Arc<Space>,
    frame: Frame,
    values: Vec<Complex<T>>,
}

/// Fourier coefficients over L(W,V), indexed by the dual encoding.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Scalar> {
    space: Arc<Space>,
    frame: Frame,
    coeffs: Vec<Complex<T>>,
}

fn stage_transform<T: Scalar>(values: &mut [Complex<T>], q: usize, axes: usize, kernel: &[Complex<T>]) {
    let mut buf = vec![zero::<T>(); q];
    let mut stride = 1;
    for _ in 0..axes {
        let block = stride * q;
        for start in (0..values.len()).step_by(block) {
            for off in 0..stride {
                let base = start + off;
                for (x, b) in buf.iter_mut().enumerate() {
                    *b = (0..q).fold(zero::<T>(), |acc, a| acc + kernel[x * q + a] * values[base + a * stride]);
                }
                for (j, &b) in buf.iter().enumerate() {
                    values[base + j * stride] = b;
                }
            }
        }
        stride = block;
    }
}

impl<T: Scalar> MapFunction<T> {
    pub fn new(space: Arc<Space>, values: Vec<Complex<T>>) -> Result<Self, FourierError> {
        let frame = Frame::ambient(space.dim_v(), space.dim_w());
        Self::with_frame(space, frame, values)
    }

    pub fn with_frame(space: Arc<Space>, frame: Frame, values: Vec<Complex<T>>) -> Result<Self, FourierError> {
        if values.len() != space.len() {
            return Err(FourierError::Shape(format!("{} values for a space of {}", values.len(), space.len())));
        }
        if frame.v_project.rows() != space.dim_v() || frame.w_embed.cols() != space.dim_w() {
            return Err(FourierError::Shape("frame does not match the space".into()));
        }
        Ok(MapFunction { space, frame, values })
    }

    pub fn from_real(space: Arc<Space>, values: &[f64]) -> Result<Self, FourierError> {
        Self::new(space, values.iter().map(|&v| Complex::new(real(v), T::zero())).collect())
    }

    pub fn from_fn(space: Arc<Space>, mut g: impl FnMut(&Mat) -> Complex<T>) -> Self {
        let values = space.maps().iter().map(&mut g).collect();
        let frame = Frame::ambient(space.dim_v(), space.dim_w());
        MapFunction { space, frame, values }
    }

    pub fn constant(space: Arc<Space>, c: Complex<T>) -> Self {
        let values = vec![c; space.len()];
        Self::new(space, values).expect("length matches")
    }

    pub fn zeros(space: Arc<Space>) -> Self {
        Self::constant(space, zero())
    }

    /// u_X(A) = ω^{τ(Tr(XA))} for X in L(W,V).
    pub fn character(space: Arc<Space>, x: &Mat) -> Result<Self, FourierError> {
        if x.shape() != (space.dim_v(), space.dim_w()) {
            return Err(FourierError::Shape(format!("character index has shape {:?}", x.shape())));
        }
        let roots = space.field().roots::<T>();
        let values = space.maps().iter().map(|a| roots[space.pairing(x, a) as usize]).collect();
        Self::new(space, values)
    }

    pub fn indicator(space: Arc<Space>, mut member: impl FnMut(&Mat) -> bool) -> Self {
        Self::from_fn(space, |a| if member(a) { Complex::new(T::one(), T::zero()) } else { zero() })
    }

    /// 1_{Av = w}.
    pub fn dictator(space: Arc<Space>, v: &[FieldElement], w: &[FieldElement]) -> Result<Self, FourierError> {
        if v.len() != space.dim_v() || w.len() != space.dim_w() {
            return Err(FourierError::Shape("dictator vectors do not match the space".into()));
        }
        if v.iter().all(|e| e.is_zero()) && w.iter().any(|e| !e.is_zero()) {
            return Err(FourierError::Domain("Av = w is empty when v = 0 and w ≠ 0".into()));
        }
        let f = space.field().clone();
        Ok(Self::indicator(space, |a| a.apply(v, &f) == w))
    }

    /// 1_{A*φ = ψ} with A* the transpose, φ ∈ W*, ψ ∈ V*.
    pub fn dual_dictator(space: Arc<Space>, phi: &[FieldElement], psi: &[FieldElement]) -> Result<Self, FourierError> {
        if phi.len() != space.dim_w() || psi.len() != space.dim_v() {
            return Err(FourierError::Shape("dual dictator vectors do not match the space".into()));
        }
        if phi.iter().all(|e| e.is_zero()) && psi.iter().any(|e| !e.is_zero()) {
            return Err(FourierError::Domain("A*φ = ψ is empty when φ = 0 and ψ ≠ 0".into()));
        }
        let f = space.field().clone();
        Ok(Self::indicator(space, |a| a.transpose().apply(phi, &f) == psi))
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn value(&self, a: &Mat) -> Complex<T> {
        self.values[self.space.encode(a)]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn with_values(&self, values: Vec<Complex<T>>) -> Self {
        MapFunction { space: self.space.clone(), frame: self.frame.clone(), values }
    }

    pub fn map_values(&self, g: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        self.with_values(self.values.iter().map(|&v| g(v)).collect())
    }

    fn zip_with(&self, other: &Self, g: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.len(), other.len(), "functions on different spaces");
        self.with_values(self.values.iter().zip(&other.values).map(|(&a, &b)| g(a, b)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map_values(|v| v * c)
    }

    pub fn mean(&self) -> Complex<T> {
        let s = self.values.iter().fold(zero::<T>(), |acc, &v| acc + v);
        s / real::<T>(self.len() as f64)
    }

    /// E|f|².
    pub fn norm2_sq(&self) -> f64 {
        self.values.iter().map(|v| to_f64(v.norm_sqr())).sum::<f64>() / self.len() as f64
    }

    /// E|f|⁴.
    pub fn norm4_4(&self) -> f64 {
        self.values.iter().map(|v| to_f64(v.norm_sqr()).powi(2)).sum::<f64>() / self.len() as f64
    }

    /// E[f · conj(g)].
    pub fn inner(&self, other: &Self) -> Complex<f64> {
        assert_eq!(self.len(), other.len());
        let s = self.values.iter().zip(&other.values).fold(Complex::new(0.0, 0.0), |acc, (a, b)| {
            let p = a * b.conj();
            acc + Complex::new(to_f64(p.re), to_f64(p.im))
        });
        s / self.len() as f64
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }

    /// Values in {0, 1} up to 1e-9.
    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|v| {
            let (re, im) = (to_f64(v.re), to_f64(v.im));
            im.abs() < 1e-9 && (re.abs() < 1e-9 || (re - 1.0).abs() < 1e-9)
        })
    }

    /// Fast transform: one q-point stage per matrix entry.
    pub fn transform(&self) -> Spectrum<T> {
        let q = self.space.q();
        let field = self.space.field();
        let inv_q = real::<T>(1.0 / q as f64);
        let kernel: Vec<Complex<T>> = field
            .elements()
            .flat_map(|x| field.elements().map(move |a| (x, a)))
            .map(|(x, a)| field.kernel::<T>(x, a).conj() * inv_q)
            .collect();
        let mut work = self.values.clone();
        stage_transform(&mut work, q, self.space.dim_v() * self.space.dim_w(), &kernel);
        let perm = self.space.transpose_perm();
        let mut coeffs = vec![zero::<T>(); work.len()];
        for (i, v) in work.into_iter().enumerate() {
            coeffs[perm[i] as usize] = v;
        }
        Spectrum { space: self.space.clone(), frame: self.frame.clone(), coeffs }
    }

    pub fn degree(&self) -> usize {
        self.transform().degree()
    }

    /// f^{≤d}.
    pub fn upto(&self, d: usize) -> Self {
        self.transform().truncate(d).inverse()
    }

    /// f^{=d}.
    pub fn level(&self, d: usize) -> Self {
        self.transform().pure(d).inverse()
    }

    /// Δ_T f(A) = f(A + T).
    pub fn shift(&self, t: &Mat) -> Result<Self, FourierError> {
        if t.shape() != (self.space.dim_w(), self.space.dim_v()) {
            return Err(FourierError::Shape(format!("shift by {:?}", t.shape())));
        }
        let ti = self.space.encode(t);
        Ok(self.with_values((0..self.len()).map(|a| self.values[self.space.add_index(a, ti)]).collect()))
    }

    /// f_{(V₁,W₁)→T} on L(V/V₁, W₁): A ↦ f(A(V,W) + T).
    pub fn restrict(&self, triple: &RestrictionTriple) -> Result<Self, FourierError> {
        let sp = &self.space;
        let f = sp.field();
        if triple.v1.ambient() != sp.dim_v() || triple.w1.ambient() != sp.dim_w() {
            return Err(FourierError::Shape("restriction subspaces do not match the space".into()));
        }
        if triple.t.shape() != (sp.dim_w(), sp.dim_v()) {
            return Err(FourierError::Shape("restriction shift does not match the space".into()));
        }
        let target = Space::get(f, triple.v1.codim(), triple.w1.dim());
        let proj = triple.v1.quotient_projection(f);
        let embed = triple.w1.basis().transpose();
        let values = target
            .maps()
            .iter()
            .map(|a| {
                let lifted = embed.mul(a, f).mul(&proj, f).add(&triple.t, f);
                self.values[sp.encode(&lifted)]
            })
            .collect();
        let frame = self.frame.restrict(&triple.v1, &triple.w1, f);
        Self::with_frame(target, frame, values)
    }

    /// The same function re-indexed into a compatible frame on `space`.
    pub fn align_to(&self, space: &Arc<Space>, frame: &Frame) -> Result<Self, FourierError> {
        let f = self.space.field();
        if space.len() != self.space.len() || !self.frame.compatible(frame, f) {
            return Err(FourierError::Frame(format!("{:?} vs {:?}", self.frame, frame)));
        }
        let q = self.space.q();
        let by_ambient: std::collections::HashMap<usize, usize> =
            self.space.maps().iter().enumerate().map(|(i, a)| (encode_mat(q, &self.frame.lift(a, f)), i)).collect();
        let values = space
            .maps()
            .iter()
            .map(|a| {
                let key = encode_mat(q, &frame.lift(a, f));
                by_ambient.get(&key).map(|&i| self.values[i]).ok_or_else(|| FourierError::Frame("unmatched map".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_frame(space.clone(), frame.clone(), values)
    }

    /// Largest value difference after aligning `other` to this function's frame.
    pub fn max_diff_aligned(&self, other: &Self) -> Result<f64, FourierError> {
        Ok(self.max_diff(&other.align_to(&self.space, &self.frame)?))
    }
}

impl<T: Scalar> Spectrum<T> {
    pub fn new(space: Arc<Space>, coeffs: Vec<Complex<T>>) -> Result<Self, FourierError> {
        if coeffs.len() != space.len() {
            return Err(FourierError::Shape(format!("{} coefficients for a space of {}", coeffs.len(), space.len())));
        }
        let frame = Frame::ambient(space.dim_v(), space.dim_w());
        Ok(Spectrum { space, frame, coeffs })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, x: &Mat) -> Complex<T> {
        self.coeffs[self.space.encode_dual(x)]
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.coeffs, &other.coeffs)
    }

    /// Σ |f̂(X)|².
    pub fn norm2_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| to_f64(c.norm_sqr())).sum()
    }

    /// Σ_{rank X = d} |f̂(X)|² for d = 0..=min(n,m).
    pub fn rank_mass(&self) -> Vec<f64> {
        let mut mass = vec![0.0; self.space.max_rank() + 1];
        for (c, &r) in self.coeffs.iter().zip(self.space.dual_ranks()) {
            mass[r as usize] += to_f64(c.norm_sqr());
        }
        mass
    }

    /// Largest rank carrying a coefficient above the scalar's cutoff.
    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .zip(self.space.dual_ranks())
            .filter(|(c, _)| to_f64(c.norm()) > T::DEGREE_CUTOFF)
            .map(|(_, &r)| r as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn masked(&self, keep: impl Fn(usize) -> bool) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| if keep(i) { c } else { zero() }).collect();
        Spectrum { space: self.space.clone(), frame: self.frame.clone(), coeffs }
    }

    pub fn multiplied(&self, factor: impl Fn(usize) -> Complex<T>) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| c * factor(i)).collect();
        Spectrum { space: self.space.clone(), frame: self.frame.clone(), coeffs }
    }

    pub fn truncate(&self, d: usize) -> Self {
        let ranks = self.space.dual_ranks();
        self.masked(|i| ranks[i] as usize <= d)
    }

    pub fn pure(&self, d: usize) -> Self {
        let ranks = self.space.dual_ranks();
        self.masked(|i| ranks[i] as usize == d)
    }

    pub fn inverse(&self) -> MapFunction<T> {
        let q = self.space.q();
        let field = self.space.field();
        let kernel: Vec<Complex<T>> = field
            .elements()
            .flat_map(|a| field.elements().map(move |x| (a, x)))
            .map(|(a, x)| field.kernel::<T>(x, a))
            .collect();
        let perm = self.space.transpose_perm();
        let mut work: Vec<Complex<T>> = perm.iter().map(|&p| self.coeffs[p as usize]).collect();
        stage_transform(&mut work, q, self.space.dim_v() * self.space.dim_w(), &kernel);
        MapFunction { space: self.space.clone(), frame: self.frame.clone(), values: work }
    }

    /// Spectrum of the restriction via ĝ(Y) = Σ_{X(W₁,V/V₁) = Y} f̂(X) u_X(T).
    pub fn restrict(&self, triple: &RestrictionTriple) -> Result<Self, FourierError> {
        let sp = &self.space;
        let f = sp.field();
        if triple.v1.ambient() != sp.dim_v() || triple.w1.ambient() != sp.dim_w() {
            return Err(FourierError::Shape("restriction subspaces do not match the space".into()));
        }
        let target = Space::get(f, triple.v1.codim(), triple.w1.dim());
        let roots = f.roots::<T>();
        let mut coeffs = vec![zero::<T>(); target.len()];
        for (x, &c) in sp.duals().iter().zip(&self.coeffs) {
            if c == zero() {
                continue;
            }
            let y = crate::linalg::compress(x, &triple.w1, &triple.v1, f);
            coeffs[target.encode_dual(&y)] += c * roots[sp.pairing(x, &triple.t) as usize];
        }
        let frame = self.frame.restrict(&triple.v1, &triple.w1, f);
        Ok(Spectrum { space: target, frame, coeffs })
    }
}
