//! The ambient L(V,W) over GF(q): index encoding of maps and dual maps, and lazily built
//! lookup tables shared by the transforms, Laplacians and certifiers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::field::{Field, FieldElement};
use crate::linalg::{Lattice, Mat, Subspace};

/// Character mask keyed by a (V₁, W₁) pair.
type Mask = Arc<Vec<bool>>;

/// Maps in the space are `dim_w × dim_v` matrices; dual maps (spectrum indices) are
/// `dim_v × dim_w`. Both are encoded column-major with little-endian base-q digits.
pub struct Space {
    field: Arc<Field>,
    n: usize,
    m: usize,
    len: usize,
    maps: OnceLock<Vec<Mat>>,
    duals: OnceLock<Vec<Mat>>,
    dual_ranks: OnceLock<Vec<u8>>,
    transpose: OnceLock<Vec<u32>>,
    v_lattice: OnceLock<Lattice>,
    w_lattice: OnceLock<Lattice>,
    dual_images: OnceLock<Vec<u32>>,
    dual_kernels: OnceLock<Vec<u32>>,
    down_ranks: OnceLock<Vec<Vec<u32>>>,
    preimages: Mutex<HashMap<usize, Arc<Vec<u32>>>>,
    hybrid: Mutex<HashMap<(usize, usize), Mask>>,
    cosets: Mutex<HashMap<(usize, usize), Arc<Cosets>>>,
}

impl std::fmt::Debug for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L(F_{}^{}, F_{}^{})", self.q(), self.n, self.q(), self.m)
    }
}

type SpaceKey = (u8, Vec<u8>, usize, usize);

fn registry() -> &'static Mutex<HashMap<SpaceKey, Arc<Space>>> {
    static REG: OnceLock<Mutex<HashMap<SpaceKey, Arc<Space>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coset labels of the subgroup {maps vanishing on V₁ with image in W₁}.
#[derive(Debug)]
pub struct Cosets {
    pub labels: Vec<u32>,
    pub count: usize,
    /// First member of each coset in index order; a canonical representative T.
    pub representatives: Vec<u32>,
}

/// Base-q column-major encoding of an arbitrary matrix.
pub fn encode_mat(q: usize, a: &Mat) -> usize {
    let mut idx = 0;
    for c in (0..a.cols()).rev() {
        for r in (0..a.rows()).rev() {
            idx = idx * q + a.get(r, c).code() as usize;
        }
    }
    idx
}

pub fn decode_mat(q: usize, rows: usize, cols: usize, mut idx: usize) -> Mat {
    let mut a = Mat::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            a.set(r, c, FieldElement::from_code((idx % q) as u8));
            idx /= q;
        }
    }
    a
}

impl Space {
    /// Shared instance for (field, dim V, dim W).
    pub fn get(field: &Field, dim_v: usize, dim_w: usize) -> Arc<Space> {
        let key = (field.p(), field.modulus().to_vec(), dim_v, dim_w);
        let mut reg = registry().lock().expect("space registry poisoned");
        reg.entry(key)
            .or_insert_with(|| {
                let len = field.order().checked_pow((dim_v * dim_w) as u32).expect("space too large");
                Arc::new(Space {
                    field: Arc::new(field.clone()),
                    n: dim_v,
                    m: dim_w,
                    len,
                    maps: OnceLock::new(),
                    duals: OnceLock::new(),
                    dual_ranks: OnceLock::new(),
                    transpose: OnceLock::new(),
                    v_lattice: OnceLock::new(),
                    w_lattice: OnceLock::new(),
                    dual_images: OnceLock::new(),
                    dual_kernels: OnceLock::new(),
                    down_ranks: OnceLock::new(),
                    preimages: Mutex::new(HashMap::new()),
                    hybrid: Mutex::new(HashMap::new()),
                    cosets: Mutex::new(HashMap::new()),
                })
            })
            .clone()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.order()
    }

    pub fn dim_v(&self) -> usize {
        self.n
    }

    pub fn dim_w(&self) -> usize {
        self.m
    }

    /// Number of maps, q^{nm}.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// |W| = q^{dim W}.
    pub fn w_size(&self) -> usize {
        self.q().pow(self.m as u32)
    }

    pub fn v_size(&self) -> usize {
        self.q().pow(self.n as u32)
    }

    pub fn encode(&self, a: &Mat) -> usize {
        debug_assert_eq!(a.shape(), (self.m, self.n));
        encode_mat(self.q(), a)
    }

    pub fn decode(&self, idx: usize) -> Mat {
        decode_mat(self.q(), self.m, self.n, idx)
    }

    pub fn encode_dual(&self, x: &Mat) -> usize {
        debug_assert_eq!(x.shape(), (self.n, self.m));
        encode_mat(self.q(), x)
    }

    pub fn decode_dual(&self, idx: usize) -> Mat {
        decode_mat(self.q(), self.n, self.m, idx)
    }

    pub fn maps(&self) -> &[Mat] {
        self.maps.get_or_init(|| (0..self.len).map(|i| self.decode(i)).collect())
    }

    pub fn duals(&self) -> &[Mat] {
        self.duals.get_or_init(|| (0..self.len).map(|i| self.decode_dual(i)).collect())
    }

    pub fn dual_ranks(&self) -> &[u8] {
        self.dual_ranks.get_or_init(|| self.duals().iter().map(|x| x.rank(&self.field) as u8).collect())
    }

    pub fn max_rank(&self) -> usize {
        self.n.min(self.m)
    }

    /// Digit index of A-positions carrying Xᵀ, mapped to the dual index of X.
    pub fn transpose_perm(&self) -> &[u32] {
        self.transpose.get_or_init(|| {
            let q = self.q();
            (0..self.len)
                .map(|i| {
                    let xt = decode_mat(q, self.m, self.n, i);
                    self.encode_dual(&xt.transpose()) as u32
                })
                .collect()
        })
    }

    /// For every dual map Y, the number of X ≤ Y in the rank-additivity order, by rank of X.
    pub fn down_rank_counts(&self) -> &[Vec<u32>] {
        self.down_ranks.get_or_init(|| {
            let ranks = self.dual_ranks();
            (0..self.len)
                .map(|y| {
                    let mut counts = vec![0u32; ranks[y] as usize + 1];
                    for x in 0..self.len {
                        let diff = self.add_index(y, self.neg_index(x));
                        if ranks[x] as usize + ranks[diff] as usize == ranks[y] as usize {
                            counts[ranks[x] as usize] += 1;
                        }
                    }
                    counts
                })
                .collect()
        })
    }

    /// Index of A + B.
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let q = self.q();
        let f = &self.field;
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0, 1);
        for _ in 0..self.n * self.m {
            let s = f.add(f.element(a % q), f.element(b % q));
            out += s.code() as usize * scale;
            scale *= q;
            a /= q;
            b /= q;
        }
        out
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let q = self.q();
        let f = &self.field;
        let (mut a, mut out, mut scale) = (a, 0, 1);
        for _ in 0..self.n * self.m {
            out += f.neg(f.element(a % q)).code() as usize * scale;
            scale *= q;
            a /= q;
        }
        out
    }

    /// τ(Tr(XA)) as an exponent of ω, evaluated entrywise.
    pub fn pairing(&self, x: &Mat, a: &Mat) -> u8 {
        let f = &self.field;
        let p = f.p() as u32;
        let mut e = 0u32;
        for i in 0..self.n {
            for k in 0..self.m {
                e += f.kernel_exponent(x.get(i, k), a.get(k, i)) as u32;
            }
        }
        (e % p) as u8
    }

    pub fn v_lattice(&self) -> &Lattice {
        self.v_lattice.get_or_init(|| Lattice::new(&self.field, self.n).expect("V lattice within cap"))
    }

    pub fn w_lattice(&self) -> &Lattice {
        self.w_lattice.get_or_init(|| Lattice::new(&self.field, self.m).expect("W lattice within cap"))
    }

    /// Lattice id of Im(X) ≤ V for every dual map X.
    pub fn dual_images(&self) -> &[u32] {
        self.dual_images.get_or_init(|| {
            let lat = self.v_lattice();
            self.duals().iter().map(|x| lat.id(&x.image(&self.field)) as u32).collect()
        })
    }

    /// Lattice id of Ker(X) ≤ W for every dual map X.
    pub fn dual_kernels(&self) -> &[u32] {
        self.dual_kernels.get_or_init(|| {
            let lat = self.w_lattice();
            self.duals().iter().map(|x| lat.id(&x.kernel(&self.field)) as u32).collect()
        })
    }

    /// Lattice id of X⁻¹(V₁) ≤ W for every dual map X.
    pub fn preimage_ids(&self, v1: usize) -> Arc<Vec<u32>> {
        if let Some(t) = self.preimages.lock().expect("poisoned").get(&v1) {
            return t.clone();
        }
        let sub = self.v_lattice().get(v1).clone();
        let lat = self.w_lattice();
        let table: Vec<u32> = self.duals().iter().map(|x| lat.id(&x.preimage(&sub, &self.field)) as u32).collect();
        let table = Arc::new(table);
        self.preimages.lock().expect("poisoned").insert(v1, table.clone());
        table
    }

    /// Dual maps with Im(X) ⊇ V₁ and X⁻¹(V₁) ⊆ W₁.
    pub fn hybrid_mask(&self, v1: usize, w1: usize) -> Arc<Vec<bool>> {
        if let Some(t) = self.hybrid.lock().expect("poisoned").get(&(v1, w1)) {
            return t.clone();
        }
        let pre = self.preimage_ids(v1);
        let (vl, wl) = (self.v_lattice(), self.w_lattice());
        let mask: Vec<bool> = self
            .dual_images()
            .iter()
            .zip(pre.iter())
            .map(|(&im, &pr)| vl.le(v1, im as usize) && wl.le(pr as usize, w1))
            .collect();
        let mask = Arc::new(mask);
        self.hybrid.lock().expect("poisoned").insert((v1, w1), mask.clone());
        mask
    }

    /// Partition of L(V,W) into slices A + {maps vanishing on V₁ with image in W₁}.
    pub fn cosets(&self, v1: usize, w1: usize) -> Arc<Cosets> {
        if let Some(t) = self.cosets.lock().expect("poisoned").get(&(v1, w1)) {
            return t.clone();
        }
        let f = &self.field;
        let bv = self.v_lattice().get(v1).basis().transpose();
        let qw = self.w_lattice().get(w1).quotient_projection(f);
        let q = self.q();
        let mut seen: HashMap<(usize, usize), u32> = HashMap::new();
        let mut representatives = Vec::new();
        let labels: Vec<u32> = self
            .maps()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let key = (encode_mat(q, &a.mul(&bv, f)), encode_mat(q, &qw.mul(a, f)));
                let next = seen.len() as u32;
                *seen.entry(key).or_insert_with(|| {
                    representatives.push(i as u32);
                    next
                })
            })
            .collect();
        let c = Arc::new(Cosets { labels, count: seen.len(), representatives });
        self.cosets.lock().expect("poisoned").insert((v1, w1), c.clone());
        c
    }

    /// Pairs (V₁, W₁) of lattice ids with dim V₁ + codim W₁ = order, in lattice order.
    pub fn pairs_of_order(&self, order: usize) -> Vec<(usize, usize)> {
        let (vl, wl) = (self.v_lattice(), self.w_lattice());
        let mut out = Vec::new();
        for (i, v1) in vl.iter() {
            for (j, w1) in wl.iter() {
                if v1.dim() + w1.codim() == order {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All subspaces of V of the given dimension as lattice ids.
    pub fn v_subspaces(&self, dim: usize) -> Vec<usize> {
        self.v_lattice().iter().filter(|(_, s)| s.dim() == dim).map(|(i, _)| i).collect()
    }

    pub fn w_subspaces(&self, dim: usize) -> Vec<usize> {
        self.w_lattice().iter().filter(|(_, s)| s.dim() == dim).map(|(i, _)| i).collect()
    }

    pub fn v_id(&self, s: &Subspace) -> usize {
        self.v_lattice().id(s)
    }

    pub fn w_id(&self, s: &Subspace) -> usize {
        self.w_lattice().id(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_is_column_major_little_endian() {
        let f = Field::standard(3).unwrap();
        let s = Space::get(&f, 2, 1);
        // 1×2 map [a b]: index = a + 3b
        assert_eq!(s.encode(&Mat::from_codes(1, 2, &[1, 2])), 7);
        let s = Space::get(&f, 1, 2);
        // 2×1 map [a; b]: index = a + 3b
        assert_eq!(s.encode(&Mat::from_codes(2, 1, &[1, 2])), 7);
        let s = Space::get(&f, 2, 2);
        for i in 0..s.len() {
            assert_eq!(s.encode(&s.decode(i)), i);
            assert_eq!(s.encode_dual(&s.decode_dual(i)), i);
        }
    }

    #[test]
    fn add_index_matches_matrix_addition() {
        let f = Field::standard(4).unwrap();
        let s = Space::get(&f, 1, 2);
        for a in 0..s.len() {
            for b in 0..s.len() {
                assert_eq!(s.add_index(a, b), s.encode(&s.decode(a).add(&s.decode(b), &f)));
            }
            assert_eq!(s.add_index(a, s.neg_index(a)), 0);
        }
    }

    #[test]
    fn coset_counts() {
        let f = Field::standard(2).unwrap();
        let s = Space::get(&f, 2, 3);
        for (v1, sv) in s.v_lattice().iter() {
            for (w1, sw) in s.w_lattice().iter() {
                let c = s.cosets(v1, w1);
                let slice = 2usize.pow(((2 - sv.dim()) * sw.dim()) as u32);
                assert_eq!(c.count * slice, s.len());
                assert_eq!(c.representatives.len(), c.count);
            }
        }
    }

    #[test]
    fn rank_histogram_of_2x2_over_f2() {
        let f = Field::standard(2).unwrap();
        let s = Space::get(&f, 2, 2);
        let mut h = [0; 3];
        for &r in s.dual_ranks() {
            h[r as usize] += 1;
        }
        assert_eq!(h, [1, 9, 6]);
    }
}
