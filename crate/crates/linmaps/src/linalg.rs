//! Dense linear algebra over GF(q): matrices, canonical subspaces, quotient frames
//! and the rank-additivity order on linear maps.

use std::collections::HashMap;
use std::fmt;

use crate::field::{Field, FieldElement};

/// Desk cap for subspace enumeration.
pub const MAX_ENUM_DIM: usize = 5;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("dimension out of range: {0}")]
    Range(String),
    #[error("hypothesis violated: {0}")]
    Contract(String),
    #[error("cannot parse matrix: {0}")]
    Parse(String),
}

pub type Vector = Vec<FieldElement>;

/// A linear map as a dense rows × cols matrix, entries stored row-major.
///
/// A map V→W with dim V = n and dim W = m is an m×n matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(r).iter().map(|e| e.code().to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Row-major field codes.
    pub fn from_codes(rows: usize, cols: usize, codes: &[u8]) -> Self {
        assert_eq!(codes.len(), rows * cols, "expected {rows}x{cols} entries");
        Mat { rows, cols, data: codes.iter().map(|&c| FieldElement::from_code(c)).collect() }
    }

    pub fn from_rows(cols: usize, rows: &[Vector]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Mat { rows: rows.len(), cols, data }
    }

    pub fn from_cols(rows: usize, cols: &[Vector]) -> Self {
        Self::from_rows(rows, cols).transpose()
    }

    /// The matrix u·vᵀ.
    pub fn outer(f: &Field, u: &[FieldElement], v: &[FieldElement]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &a) in u.iter().enumerate() {
            for (j, &b) in v.iter().enumerate() {
                m.set(i, j, f.mul(a, b));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn same_shape(&self, other: &Mat, op: &str) -> Result<(), LinalgError> {
        if self.shape() != other.shape() {
            return Err(LinalgError::Shape(format!("{op}: {:?} vs {:?}", self.shape(), other.shape())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat, f: &Field) -> Mat {
        self.same_shape(other, "add").expect("matrix add");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat, f: &Field) -> Mat {
        self.same_shape(other, "sub").expect("matrix sub");
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self, f: &Field) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, c: FieldElement, f: &Field) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| f.mul(c, a)).collect() }
    }

    pub fn try_mul(&self, other: &Mat, f: &Field) -> Result<Mat, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!("product of {:?} and {:?}", self.shape(), other.shape())));
        }
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Mat, f: &Field) -> Mat {
        self.try_mul(other, f).expect("matrix product")
    }

    pub fn apply(&self, v: &[FieldElement], f: &Field) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(FieldElement::ZERO, |acc, (&a, &x)| f.add(acc, f.mul(a, x))))
            .collect()
    }

    pub fn trace(&self, f: &Field) -> FieldElement {
        assert_eq!(self.rows, self.cols, "trace of a non-square matrix");
        (0..self.rows).fold(FieldElement::ZERO, |acc, i| f.add(acc, self.get(i, i)))
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self, f: &Field) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if piv != r {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j);
                m.set(r, j, f.mul(inv, v));
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).1.len()
    }

    /// Kernel as a subspace of the domain F^cols.
    pub fn kernel(&self, f: &Field) -> Subspace {
        let (red, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let gens: Vec<Vector> = free
            .iter()
            .map(|&fc| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[fc] = FieldElement::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(red.get(r, fc));
                }
                v
            })
            .collect();
        Subspace::span(f, self.cols, &gens)
    }

    /// Image as a subspace of the codomain F^rows.
    pub fn image(&self, f: &Field) -> Subspace {
        let cols: Vec<Vector> = (0..self.cols).map(|c| self.col(c)).collect();
        Subspace::span(f, self.rows, &cols)
    }

    /// {w : M w ∈ target}.
    pub fn preimage(&self, target: &Subspace, f: &Field) -> Subspace {
        assert_eq!(target.ambient(), self.rows, "preimage target lives in the codomain");
        target.quotient_projection(f).mul(self, f).kernel(f)
    }

    /// Text form `q;rows;cols;e11,e12,...` with row-major base-10 codes.
    pub fn to_text(&self, f: &Field) -> String {
        let codes: Vec<String> = self.data.iter().map(|e| e.code().to_string()).collect();
        format!("{};{};{};{}", f.order(), self.rows, self.cols, codes.join(","))
    }

    pub fn from_text(s: &str, f: &Field) -> Result<Mat, LinalgError> {
        let bad = |why: &str| LinalgError::Parse(format!("{why}: {s}"));
        let parts: Vec<&str> = s.trim().split(';').collect();
        if parts.len() != 4 {
            return Err(bad("expected four ';'-separated fields"));
        }
        let q: usize = parts[0].parse().map_err(|_| bad("q"))?;
        if q != f.order() {
            return Err(bad("field order mismatch"));
        }
        let rows: usize = parts[1].parse().map_err(|_| bad("rows"))?;
        let cols: usize = parts[2].parse().map_err(|_| bad("cols"))?;
        let codes: Vec<u8> = if parts[3].trim().is_empty() {
            Vec::new()
        } else {
            parts[3].split(',').map(|c| c.trim().parse::<u8>()).collect::<Result<_, _>>().map_err(|_| bad("entry"))?
        };
        if codes.len() != rows * cols || codes.iter().any(|&c| c as usize >= q) {
            return Err(bad("entries"));
        }
        Ok(Mat::from_codes(rows, cols, &codes))
    }
}

/// A subspace of F^ambient with its canonical reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: usize,
    basis: Mat,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Span{:?}<F^{}>", self.basis, self.ambient)
    }
}

impl Subspace {
    pub fn span(f: &Field, ambient: usize, vectors: &[Vector]) -> Self {
        let m = Mat::from_rows(ambient, vectors);
        let (red, pivots) = m.rref(f);
        let basis = Mat::from_rows(ambient, &red.row_vectors()[..pivots.len()]);
        Subspace { ambient, basis, pivots }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Mat::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: Mat::identity(ambient), pivots: (0..ambient).collect() }
    }

    pub fn line(f: &Field, v: &[FieldElement]) -> Self {
        Self::span(f, v.len(), &[v.to_vec()])
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    /// dim × ambient basis matrix in RREF.
    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.row_vectors()
    }

    /// Canonical byte key of the RREF basis.
    pub fn key(&self) -> Vec<u8> {
        self.basis.entries().iter().map(|e| e.code()).collect()
    }

    /// v reduced against the basis; zero iff v is in the subspace.
    pub fn reduce(&self, v: &[FieldElement], f: &Field) -> Vector {
        let mut out = v.to_vec();
        for (r, &pc) in self.pivots.iter().enumerate() {
            let factor = out[pc];
            if factor.is_zero() {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.basis.row(r)) {
                *o = f.sub(*o, f.mul(factor, b));
            }
        }
        out
    }

    pub fn contains(&self, v: &[FieldElement], f: &Field) -> bool {
        self.reduce(v, f).iter().all(|e| e.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace, f: &Field) -> bool {
        self.ambient == other.ambient && self.basis_vectors().iter().all(|v| other.contains(v, f))
    }

    pub fn sum(&self, other: &Subspace, f: &Field) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut gens = self.basis_vectors();
        gens.extend(other.basis_vectors());
        Subspace::span(f, self.ambient, &gens)
    }

    pub fn intersect(&self, other: &Subspace, f: &Field) -> Subspace {
        self.annihilator(f).sum(&other.annihilator(f), f).annihilator(f)
    }

    /// {φ : φ(w) = 0 for all w in the subspace}, in the dual standard basis.
    pub fn annihilator(&self, f: &Field) -> Subspace {
        self.basis.kernel(f)
    }

    /// Coordinates of a member vector in the RREF basis (its pivot entries).
    pub fn coords(&self, v: &[FieldElement]) -> Vector {
        self.pivots.iter().map(|&p| v[p]).collect()
    }

    /// This subspace in the basis coordinates of a containing subspace.
    pub fn coords_in(&self, parent: &Subspace, f: &Field) -> Result<Subspace, LinalgError> {
        if !self.is_subspace_of(parent, f) {
            return Err(LinalgError::Contract("subspace is not contained in the parent".into()));
        }
        let gens: Vec<Vector> = self.basis_vectors().iter().map(|v| parent.coords(v)).collect();
        Ok(Subspace::span(f, parent.dim(), &gens))
    }

    /// Non-pivot columns: the standard section of the quotient.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    /// The canonical projection F^ambient → F^ambient / self, as a codim × ambient matrix.
    pub fn quotient_projection(&self, f: &Field) -> Mat {
        let free = self.free_columns();
        let mut q = Mat::zeros(free.len(), self.ambient);
        for j in 0..self.ambient {
            let mut e = vec![FieldElement::ZERO; self.ambient];
            e[j] = FieldElement::ONE;
            let red = self.reduce(&e, f);
            for (i, &fc) in free.iter().enumerate() {
                q.set(i, j, red[fc]);
            }
        }
        q
    }

    /// Standard basis vectors at the free columns, as an ambient × codim matrix.
    pub fn section(&self) -> Mat {
        let free = self.free_columns();
        let mut s = Mat::zeros(self.ambient, free.len());
        for (i, &fc) in free.iter().enumerate() {
            s.set(fc, i, FieldElement::ONE);
        }
        s
    }

    pub fn image_under(&self, m: &Mat, f: &Field) -> Subspace {
        assert_eq!(m.cols(), self.ambient);
        let gens: Vec<Vector> = self.basis_vectors().iter().map(|v| m.apply(v, f)).collect();
        Subspace::span(f, m.rows(), &gens)
    }

    pub fn vectors(&self, f: &Field) -> Vec<Vector> {
        let k = self.dim();
        let q = f.order();
        let total = q.pow(k as u32);
        (0..total)
            .map(|mut code| {
                let mut v = vec![FieldElement::ZERO; self.ambient];
                for r in 0..k {
                    let c = f.element(code % q);
                    code /= q;
                    for (o, &b) in v.iter_mut().zip(self.basis.row(r)) {
                        *o = f.add(*o, f.mul(c, b));
                    }
                }
                v
            })
            .collect()
    }

    /// Every subspace of F^ambient of the given dimension, each once.
    pub fn enumerate(f: &Field, ambient: usize, dim: usize) -> Result<Vec<Subspace>, LinalgError> {
        if ambient > MAX_ENUM_DIM || dim > ambient {
            return Err(LinalgError::Range(format!("dim {dim} in ambient {ambient} (cap {MAX_ENUM_DIM})")));
        }
        let q = f.order();
        let mut out = Vec::new();
        for pivots in combinations(ambient, dim) {
            let slots: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &pc)| ((pc + 1)..ambient).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
                .collect();
            let total = q.pow(slots.len() as u32);
            for mut code in 0..total {
                let mut basis = Mat::zeros(dim, ambient);
                for (r, &pc) in pivots.iter().enumerate() {
                    basis.set(r, pc, FieldElement::ONE);
                }
                for &(r, c) in &slots {
                    basis.set(r, c, f.element(code % q));
                    code /= q;
                }
                out.push(Subspace { ambient, basis, pivots: pivots.clone() });
            }
        }
        Ok(out)
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Gaussian binomial coefficient [n choose k]_q.
pub fn gaussian_binomial(q: usize, n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let (mut num, mut den) = (1u128, 1u128);
    for i in 0..k {
        num *= (q as u128).pow((n - i) as u32) - 1;
        den *= (q as u128).pow((i + 1) as u32) - 1;
    }
    (num / den) as usize
}

/// All subspaces of F^ambient with a containment table, indexed in enumeration order
/// (by dimension, then by enumeration within a dimension).
#[derive(Clone, Debug)]
pub struct Lattice {
    ambient: usize,
    subspaces: Vec<Subspace>,
    index: HashMap<Vec<u8>, usize>,
    contained: Vec<bool>,
}

impl Lattice {
    pub fn new(f: &Field, ambient: usize) -> Result<Self, LinalgError> {
        let mut subspaces = Vec::new();
        for d in 0..=ambient {
            subspaces.extend(Subspace::enumerate(f, ambient, d)?);
        }
        let index = subspaces.iter().enumerate().map(|(i, s)| ((s.dim(), s.key()), i)).map(|((d, k), i)| {
            let mut key = vec![d as u8];
            key.extend(k);
            (key, i)
        });
        let index: HashMap<Vec<u8>, usize> = index.collect();
        let n = subspaces.len();
        let mut contained = vec![false; n * n];
        for (i, a) in subspaces.iter().enumerate() {
            for (j, b) in subspaces.iter().enumerate() {
                contained[i * n + j] = a.dim() <= b.dim() && a.is_subspace_of(b, f);
            }
        }
        Ok(Lattice { ambient, subspaces, index, contained })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn get(&self, id: usize) -> &Subspace {
        &self.subspaces[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Subspace)> {
        self.subspaces.iter().enumerate()
    }

    pub fn id(&self, s: &Subspace) -> usize {
        let mut key = vec![s.dim() as u8];
        key.extend(s.key());
        *self.index.get(&key).expect("subspace belongs to this lattice")
    }

    /// Whether subspace `a` is contained in subspace `b`.
    #[inline]
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.contained[a * self.subspaces.len() + b]
    }
}

/// Canonical coordinates on F^n / V₁ together with the section used to lift back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientFrame {
    sub: Subspace,
    projection: Mat,
    section: Mat,
}

impl QuotientFrame {
    pub fn new(sub: &Subspace, f: &Field) -> Self {
        QuotientFrame { sub: sub.clone(), projection: sub.quotient_projection(f), section: sub.section() }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.sub
    }

    pub fn projection(&self) -> &Mat {
        &self.projection
    }

    pub fn section(&self) -> &Mat {
        &self.section
    }

    pub fn dim(&self) -> usize {
        self.projection.rows()
    }
}

/// A(V,W) for A ∈ L(V/V₁, W₁): the map v ↦ A(v + V₁) viewed inside W.
pub fn lift(a: &Mat, frame: &QuotientFrame, w1: &Subspace, f: &Field) -> Result<Mat, LinalgError> {
    if a.shape() != (w1.dim(), frame.dim()) {
        return Err(LinalgError::Shape(format!("lift expects {}x{}, got {:?}", w1.dim(), frame.dim(), a.shape())));
    }
    Ok(w1.basis().transpose().mul(a, f).mul(frame.projection(), f))
}

/// Inverse of [`lift`] on maps vanishing on V₁ with image in W₁.
pub fn pushdown(m: &Mat, frame: &QuotientFrame, w1: &Subspace, f: &Field) -> Result<Mat, LinalgError> {
    let v1 = frame.subspace();
    if m.cols() != v1.ambient() || m.rows() != w1.ambient() {
        return Err(LinalgError::Shape("pushdown frame does not match the map".into()));
    }
    if !v1.is_subspace_of(&m.kernel(f), f) {
        return Err(LinalgError::Contract("map does not vanish on V1".into()));
    }
    if !m.image(f).is_subspace_of(w1, f) {
        return Err(LinalgError::Contract("image is not contained in W1".into()));
    }
    let ms = m.mul(frame.section(), f);
    let mut out = Mat::zeros(w1.dim(), frame.dim());
    for (r, &p) in w1.pivots().iter().enumerate() {
        for c in 0..frame.dim() {
            out.set(r, c, ms.get(p, c));
        }
    }
    Ok(out)
}

/// A(V₁, W/W₁) = Q_{W₁} ∘ A|_{V₁}, in RREF coordinates on V₁ and quotient coordinates on W/W₁.
pub fn restrict_to(a: &Mat, v1: &Subspace, w1: &Subspace, f: &Field) -> Result<Mat, LinalgError> {
    if a.cols() != v1.ambient() || a.rows() != w1.ambient() {
        return Err(LinalgError::Shape("restrict_to: subspaces do not match the map".into()));
    }
    Ok(w1.quotient_projection(f).mul(a, f).mul(&v1.basis().transpose(), f))
}

/// X(W₁, V/V₁) for X: W → V, i.e. X restricted to W₁ followed by the quotient by V₁.
pub fn compress(x: &Mat, w1: &Subspace, v1: &Subspace, f: &Field) -> Mat {
    v1.quotient_projection(f).mul(x, f).mul(&w1.basis().transpose(), f)
}

/// A(V₂/V₁, W₂/W₁): v + V₁ ↦ Av + W₁, in the canonical coordinates of both quotients.
pub fn sandwich(
    a: &Mat,
    v1: &Subspace,
    v2: &Subspace,
    w1: &Subspace,
    w2: &Subspace,
    f: &Field,
) -> Result<Mat, LinalgError> {
    if a.cols() != v1.ambient() || a.rows() != w1.ambient() {
        return Err(LinalgError::Shape("sandwich: subspaces do not match the map".into()));
    }
    if !v1.is_subspace_of(v2, f) {
        return Err(LinalgError::Contract("V1 is not contained in V2".into()));
    }
    if !w1.is_subspace_of(w2, f) {
        return Err(LinalgError::Contract("W1 is not contained in W2".into()));
    }
    if !v1.image_under(a, f).is_subspace_of(w1, f) {
        return Err(LinalgError::Contract("A(V1) is not contained in W1".into()));
    }
    if !v2.image_under(a, f).is_subspace_of(w2, f) {
        return Err(LinalgError::Contract("A(V2) is not contained in W2".into()));
    }
    let qv = v1.quotient_projection(f);
    let qw = w1.quotient_projection(f);
    let dom = v2.image_under(&qv, f);
    let cod = w2.image_under(&qw, f);
    let sec = v1.section();
    let mut out = Mat::zeros(cod.dim(), dom.dim());
    for (c, b) in dom.basis_vectors().iter().enumerate() {
        let v = sec.apply(b, f);
        let img = qw.apply(&a.apply(&v, f), f);
        for (r, e) in cod.coords(&img).into_iter().enumerate() {
            out.set(r, c, e);
        }
    }
    Ok(out)
}

/// X ≤ Y in the rank-additivity order: rank(Y) = rank(X) + rank(Y − X).
pub fn poset_leq(x: &Mat, y: &Mat, f: &Field) -> Result<bool, LinalgError> {
    if x.shape() != y.shape() {
        return Err(LinalgError::Shape(format!("poset_leq: {:?} vs {:?}", x.shape(), y.shape())));
    }
    Ok(y.rank(f) == x.rank(f) + y.sub(x, f).rank(f))
}

/// The structural characterisation: Im X ≤ Im Y and X = Y on Y⁻¹(Im X).
pub fn poset_leq_structural(x: &Mat, y: &Mat, f: &Field) -> bool {
    let im_x = x.image(f);
    if !im_x.is_subspace_of(&y.image(f), f) {
        return false;
    }
    let p = y.preimage(&im_x, f);
    p.basis_vectors().iter().all(|w| x.apply(w, f) == y.apply(w, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::standard(2).unwrap()
    }

    fn all_mats(f: &Field, rows: usize, cols: usize) -> Vec<Mat> {
        let q = f.order();
        (0..q.pow((rows * cols) as u32))
            .map(|mut code| {
                let codes: Vec<u8> = (0..rows * cols)
                    .map(|_| {
                        let c = (code % q) as u8;
                        code /= q;
                        c
                    })
                    .collect();
                Mat::from_codes(rows, cols, &codes)
            })
            .collect()
    }

    /// Brute-force oracle: the set of vectors in the span of the given generators.
    fn span_set(f: &Field, ambient: usize, gens: &[Vector]) -> std::collections::BTreeSet<Vector> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(vec![FieldElement::ZERO; ambient]);
        loop {
            let before = set.len();
            let cur: Vec<Vector> = set.iter().cloned().collect();
            for v in &cur {
                for g in gens {
                    for c in f.elements() {
                        let w: Vector = v.iter().zip(g).map(|(&a, &b)| f.add(a, f.mul(c, b))).collect();
                        set.insert(w);
                    }
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    #[test]
    fn rank_kernel_examples() {
        let f = f2();
        let z = Mat::zeros(2, 2);
        assert_eq!(z.rank(&f), 0);
        assert_eq!(z.kernel(&f), Subspace::full(2));
        let i = Mat::identity(2);
        assert_eq!(i.rank(&f), 2);
        assert_eq!(i.kernel(&f).dim(), 0);
        let ones = Mat::from_codes(2, 2, &[1, 1, 1, 1]);
        assert_eq!(ones.rank(&f), 1);
        let k = ones.kernel(&f);
        assert_eq!(k.basis_vectors(), vec![vec![FieldElement::ONE, FieldElement::ONE]]);
    }

    #[test]
    fn rank_nullity_and_image_match_brute_force() {
        for q in [2, 3] {
            let f = Field::standard(q).unwrap();
            for m in all_mats(&f, 2, 2).into_iter().chain(all_mats(&f, 2, 3)) {
                let k = m.kernel(&f);
                assert_eq!(m.rank(&f) + k.dim(), m.cols());
                let img = m.image(&f);
                let cols: Vec<Vector> = (0..m.cols()).map(|c| m.col(c)).collect();
                let oracle = span_set(&f, m.rows(), &cols);
                let got: std::collections::BTreeSet<Vector> = img.vectors(&f).into_iter().collect();
                assert_eq!(got, oracle);
                for v in k.vectors(&f) {
                    assert!(m.apply(&v, &f).iter().all(|e| e.is_zero()));
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_are_gaussian_binomials() {
        for q in [2, 3, 4] {
            let f = Field::standard(q).unwrap();
            for n in 0..=3 {
                for k in 0..=n {
                    let subs = Subspace::enumerate(&f, n, k).unwrap();
                    assert_eq!(subs.len(), gaussian_binomial(q, n, k), "q={q} n={n} k={k}");
                    let distinct: std::collections::HashSet<_> = subs.iter().map(|s| s.key()).collect();
                    assert_eq!(distinct.len(), subs.len());
                }
            }
        }
        let f = f2();
        assert_eq!(Subspace::enumerate(&f, 2, 1).unwrap().len(), 3);
        assert_eq!(Subspace::enumerate(&f, 3, 1).unwrap().len(), 7);
        // count lines as (nonzero vectors)/(q-1)
        assert_eq!(gaussian_binomial(3, 3, 1), (27 - 1) / 2);
        assert!(Subspace::enumerate(&f, 6, 1).is_err());
        assert!(Subspace::enumerate(&f, 2, 3).is_err());
    }

    #[test]
    fn annihilator_examples_and_involution() {
        let f = f2();
        assert_eq!(Subspace::full(2).annihilator(&f), Subspace::zero(2));
        assert_eq!(Subspace::zero(2).annihilator(&f), Subspace::full(2));
        let l = Subspace::line(&f, &[FieldElement::ONE, FieldElement::ONE]);
        assert_eq!(l.annihilator(&f), l);
        let f3 = Field::standard(3).unwrap();
        let lat = Lattice::new(&f3, 3).unwrap();
        for (_, s) in lat.iter() {
            let a = s.annihilator(&f3);
            assert_eq!(a.dim(), 3 - s.dim());
            assert_eq!(&a.annihilator(&f3), s);
        }
    }

    #[test]
    fn intersection_matches_vector_sets() {
        let f = Field::standard(3).unwrap();
        let lat = Lattice::new(&f, 3).unwrap();
        for (_, a) in lat.iter() {
            for (_, b) in lat.iter().step_by(3) {
                let i = a.intersect(b, &f);
                let va: std::collections::BTreeSet<Vector> = a.vectors(&f).into_iter().collect();
                let vi: std::collections::BTreeSet<Vector> = i.vectors(&f).into_iter().collect();
                let expect: std::collections::BTreeSet<Vector> = va.into_iter().filter(|v| b.contains(v, &f)).collect();
                assert_eq!(vi, expect);
            }
        }
    }

    #[test]
    fn lift_example_and_round_trip() {
        let f = f2();
        let e1 = vec![FieldElement::ONE, FieldElement::ZERO];
        let v1 = Subspace::line(&f, &e1);
        let frame = QuotientFrame::new(&v1, &f);
        let w1 = Subspace::full(2);
        // (e₂ + V₁) ↦ e₁
        let a = Mat::from_codes(2, 1, &[1, 0]);
        let l = lift(&a, &frame, &w1, &f).unwrap();
        assert_eq!(l, Mat::from_codes(2, 2, &[0, 1, 0, 0]));
        assert_eq!(pushdown(&l, &frame, &w1, &f).unwrap(), a);
        assert!(lift(&Mat::zeros(2, 1), &frame, &w1, &f).unwrap().is_zero());
        let id_frame = QuotientFrame::new(&Subspace::zero(2), &f);
        let i = Mat::identity(2);
        assert_eq!(lift(&i, &id_frame, &w1, &f).unwrap(), i);
        assert!(lift(&Mat::zeros(1, 1), &frame, &w1, &f).is_err());
        assert!(matches!(pushdown(&Mat::identity(2), &frame, &w1, &f), Err(LinalgError::Contract(_))));
    }

    #[test]
    fn pushdown_inverts_lift_everywhere() {
        let f = Field::standard(3).unwrap();
        let lv = Lattice::new(&f, 2).unwrap();
        let lw = Lattice::new(&f, 2).unwrap();
        for (_, v1) in lv.iter() {
            let frame = QuotientFrame::new(v1, &f);
            for (_, w1) in lw.iter() {
                for a in all_mats(&f, w1.dim(), frame.dim()) {
                    let l = lift(&a, &frame, w1, &f).unwrap();
                    assert!(v1.is_subspace_of(&l.kernel(&f), &f));
                    assert!(l.image(&f).is_subspace_of(w1, &f));
                    assert_eq!(pushdown(&l, &frame, w1, &f).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn pushdowns_satisfy_commuting_relations() {
        let f = f2();
        let lat2 = Lattice::new(&f, 2).unwrap();
        let lat3 = Lattice::new(&f, 3).unwrap();
        // A: V=F^2 → W=F^3
        for a in all_mats(&f, 3, 2).into_iter().step_by(5) {
            for (_, v1) in lat2.iter() {
                for (_, w1) in lat3.iter() {
                    let r = restrict_to(&a, v1, w1, &f).unwrap();
                    let qw = w1.quotient_projection(&f);
                    for (i, b) in v1.basis_vectors().iter().enumerate() {
                        assert_eq!(r.col(i), qw.apply(&a.apply(b, &f), &f));
                    }
                }
            }
            assert!(restrict_to(&Mat::zeros(3, 2), &Subspace::full(2), &Subspace::zero(3), &f).unwrap().is_zero());
        }
        let i = Mat::identity(2);
        let z = Subspace::zero(2);
        let full = Subspace::full(2);
        assert_eq!(sandwich(&i, &z, &full, &z, &full, &f).unwrap(), i);
        let e1 = Subspace::line(&f, &[FieldElement::ONE, FieldElement::ZERO]);
        let swap = Mat::from_codes(2, 2, &[0, 1, 1, 0]);
        assert!(matches!(sandwich(&swap, &e1, &full, &e1, &full, &f), Err(LinalgError::Contract(_))));
        // defining relation on every domain vector
        for a in all_mats(&f, 2, 2) {
            for (_, v1) in lat2.iter() {
                for (_, v2) in lat2.iter() {
                    for (_, w1) in lat2.iter() {
                        for (_, w2) in lat2.iter() {
                            let Ok(s) = sandwich(&a, v1, v2, w1, w2, &f) else { continue };
                            let qv = v1.quotient_projection(&f);
                            let qw = w1.quotient_projection(&f);
                            let dom = v2.image_under(&qv, &f);
                            let cod = w2.image_under(&qw, &f);
                            for v in v2.vectors(&f) {
                                let x = dom.coords(&qv.apply(&v, &f));
                                let y = cod.coords(&qw.apply(&a.apply(&v, &f), &f));
                                assert_eq!(s.apply(&x, &f), y);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn poset_examples() {
        let f = f2();
        let e11 = Mat::from_codes(2, 2, &[1, 0, 0, 0]);
        let i = Mat::identity(2);
        assert!(poset_leq(&e11, &i, &f).unwrap());
        assert!(poset_leq(&Mat::zeros(2, 2), &i, &f).unwrap());
        assert!(poset_leq(&i, &i, &f).unwrap());
        assert!(poset_leq(&Mat::zeros(2, 3), &i, &f).is_err());
    }

    #[test]
    fn poset_is_partial_order_and_matches_structure_2x2() {
        let f = f2();
        let all = all_mats(&f, 2, 2);
        let leq: Vec<Vec<bool>> =
            all.iter().map(|x| all.iter().map(|y| poset_leq(x, y, &f).unwrap()).collect()).collect();
        for (i, x) in all.iter().enumerate() {
            assert!(leq[i][i]);
            for (j, y) in all.iter().enumerate() {
                assert_eq!(leq[i][j], poset_leq_structural(x, y, &f));
                if i != j {
                    assert!(!(leq[i][j] && leq[j][i]));
                }
                for k in 0..all.len() {
                    if leq[i][j] && leq[j][k] {
                        assert!(leq[i][k]);
                    }
                }
            }
        }
    }

    #[test]
    fn text_format_round_trip() {
        let f = Field::standard(3).unwrap();
        let m = Mat::from_codes(2, 3, &[0, 1, 2, 2, 1, 0]);
        let s = m.to_text(&f);
        assert_eq!(s, "3;2;3;0,1,2,2,1,0");
        assert_eq!(Mat::from_text(&s, &f).unwrap(), m);
        assert!(Mat::from_text("2;2;3;0,1,2,2,1,0", &f).is_err());
        assert!(Mat::from_text("3;2;2;0,1", &f).is_err());
    }
}
