//! Brute-force checkers for the linear-algebra lemmas behind the operator calculus, and a
//! quadratic-time Fourier transform used as a reference for the fast one.
//!
//! Every checker walks a configuration space. Spaces below the plan's limit are enumerated in
//! full; larger ones are sampled from a seeded generator.

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::field::Field;
use crate::fourier::{FourierError, MapFunction, Spectrum};
use crate::linalg::{compress, lift, poset_leq, Lattice, Mat, QuotientFrame, Subspace};
use crate::report::EXHAUSTIVE_LIMIT;
use crate::space::{decode_mat, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Plan {
    pub samples: usize,
    pub seed: u64,
    /// Configuration spaces smaller than this are enumerated in full.
    pub exhaustive_limit: usize,
}

impl Plan {
    pub fn new(samples: usize, seed: u64) -> Self {
        Plan { samples, seed, exhaustive_limit: EXHAUSTIVE_LIMIT }
    }

    pub fn sampled(samples: usize, seed: u64) -> Self {
        Plan { samples, seed, exhaustive_limit: 0 }
    }
}

impl Default for Plan {
    fn default() -> Self {
        Plan::new(1000, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub lemma_id: String,
    pub q: usize,
    pub dim_v: usize,
    pub dim_w: usize,
    pub configurations: usize,
    pub exhaustive: bool,
    pub seed: u64,
    /// Configurations where the hypotheses hold (or the interesting clause fires).
    pub witnesses: usize,
    pub failures: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_instance: Option<String>,
}

enum Outcome {
    /// Consistent, but the hypotheses did not fire.
    Idle,
    Witness,
    Fail(&'static str),
}

/// Contiguous blocks of configurations; `locate` maps a global index to (block, offset).
struct Blocks {
    starts: Vec<usize>,
    total: usize,
}

impl Blocks {
    fn new(sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut starts = Vec::new();
        let mut total = 0usize;
        for s in sizes {
            starts.push(total);
            total = total.saturating_add(s);
        }
        Blocks { starts, total }
    }

    fn locate(&self, i: usize) -> (usize, usize) {
        let b = self.starts.partition_point(|&s| s <= i) - 1;
        (b, i - self.starts[b])
    }
}

fn run<C: Debug + Send + Sync>(
    lemma_id: &str,
    sp: &Space,
    plan: &Plan,
    total: usize,
    decode: impl Fn(usize) -> C + Sync,
    sample: impl Fn(&mut ChaCha8Rng) -> C,
    check: impl Fn(&C) -> Outcome + Sync,
) -> OracleReport {
    let exhaustive = total < plan.exhaustive_limit;
    let tally = |i: usize, c: &C| match check(c) {
        Outcome::Idle => (0, None),
        Outcome::Witness => (1, None),
        Outcome::Fail(why) => (0, Some((i, format!("{why}: {c:?}")))),
    };
    let results: Vec<(usize, Option<(usize, String)>)> = if exhaustive {
        (0..total).into_par_iter().map(|i| tally(i, &decode(i))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let configs: Vec<C> = (0..plan.samples).map(|_| sample(&mut rng)).collect();
        configs.par_iter().enumerate().map(|(i, c)| tally(i, c)).collect()
    };
    let witnesses = results.iter().map(|r| r.0).sum();
    let fails: Vec<&(usize, String)> = results.iter().filter_map(|r| r.1.as_ref()).collect();
    OracleReport {
        lemma_id: lemma_id.to_string(),
        q: sp.q(),
        dim_v: sp.dim_v(),
        dim_w: sp.dim_w(),
        configurations: if exhaustive { total } else { plan.samples },
        exhaustive,
        seed: plan.seed,
        witnesses,
        failures: fails.len(),
        pass: fails.is_empty(),
        failing_instance: fails.iter().min_by_key(|f| f.0).map(|f| f.1.clone()),
    }
}

fn pow(q: usize, e: usize) -> usize {
    q.checked_pow(e as u32).unwrap_or(usize::MAX)
}

fn random_mat(rng: &mut ChaCha8Rng, q: usize, rows: usize, cols: usize) -> Mat {
    decode_mat(q, rows, cols, rng.gen_range(0..pow(q, rows * cols)))
}

fn random_in<'a>(rng: &mut ChaCha8Rng, lat: &'a Lattice, keep: impl Fn(&Subspace) -> bool) -> &'a Subspace {
    let ids: Vec<usize> = lat.iter().filter(|(_, s)| keep(s)).map(|(i, _)| i).collect();
    lat.get(*ids.choose(rng).expect("a subspace qualifies"))
}

/// Ordered pairs (a, b) of lattice ids with a ⊆ b.
fn chains(lat: &Lattice) -> Vec<(usize, usize)> {
    (0..lat.len()).flat_map(|a| (0..lat.len()).filter(move |&b| lat.le(a, b)).map(move |b| (a, b))).collect()
}

fn contains_all(big: &Subspace, small: &Subspace, f: &Field) -> bool {
    small.is_subspace_of(big, f)
}

// ---------------------------------------------------------------------------------------------
// Trace of a lifted map against a compressed one.

#[derive(Debug)]
struct TraceConfig {
    v1: Subspace,
    w1: Subspace,
    a: Mat,
    x: Mat,
}

/// Tr(A · X(W₁, V/V₁)) = Tr(A(V,W) · X) for A ∈ L(V/V₁, W₁) and X ∈ L(W, V).
pub fn check_trace_lemma(sp: &Arc<Space>, plan: &Plan) -> OracleReport {
    let f = sp.field();
    let (q, n, m) = (sp.q(), sp.dim_v(), sp.dim_w());
    let (vl, wl) = (sp.v_lattice(), sp.w_lattice());
    let pairs: Vec<(usize, usize)> = (0..vl.len()).flat_map(|v| (0..wl.len()).map(move |w| (v, w))).collect();
    let a_count = |v: usize, w: usize| pow(q, wl.get(w).dim() * vl.get(v).codim());
    let maps = pow(q, n * m);
    let blocks = Blocks::new(pairs.iter().map(|&(v, w)| a_count(v, w).saturating_mul(maps)));
    let decode = |i: usize| {
        let (b, off) = blocks.locate(i);
        let (v, w) = pairs[b];
        let (v1, w1) = (vl.get(v).clone(), wl.get(w).clone());
        let a = decode_mat(q, w1.dim(), v1.codim(), off / maps);
        TraceConfig { v1, w1, a, x: sp.decode_dual(off % maps) }
    };
    let sample = |rng: &mut ChaCha8Rng| {
        let v1 = random_in(rng, vl, |_| true).clone();
        let w1 = random_in(rng, wl, |_| true).clone();
        let a = random_mat(rng, q, w1.dim(), v1.codim());
        let x = random_mat(rng, q, n, m);
        TraceConfig { v1, w1, a, x }
    };
    let check = |c: &TraceConfig| {
        let frame = QuotientFrame::new(&c.v1, f);
        let lifted = lift(&c.a, &frame, &c.w1, f).expect("shapes match");
        let lhs = c.a.mul(&compress(&c.x, &c.w1, &c.v1, f), f).trace(f);
        let rhs = lifted.mul(&c.x, f).trace(f);
        match (lhs == rhs, c.a.is_zero()) {
            (false, _) => Outcome::Fail("traces differ"),
            (true, true) => Outcome::Idle,
            (true, false) => Outcome::Witness,
        }
    };
    run("trace-lift-compress", sp, plan, blocks.total, decode, sample, check)
}

// ---------------------------------------------------------------------------------------------
// Composing two hybrid conditions.

#[derive(Debug)]
struct NestedConfig {
    v1: Subspace,
    v2: Subspace,
    w1: Subspace,
    w2: Subspace,
    x: Mat,
}

/// Im X ⊇ V and X⁻¹(V) ⊆ W'.
fn hybrid(x: &Mat, v: &Subspace, w: &Subspace, f: &Field) -> bool {
    contains_all(&x.image(f), v, f) && x.preimage(v, f).is_subspace_of(w, f)
}

/// For V₂ ⊆ V₁ and W₁ ⊆ W₂: (Im X ⊇ V₁, X⁻¹(V₁) ⊆ W₁) iff the same conditions hold for
/// (V₂, W₂) and then for (V₁/V₂, W₁) on the compressed map X(W₂, V/V₂).
pub fn check_equivalence_lemma(sp: &Arc<Space>, plan: &Plan) -> OracleReport {
    let f = sp.field();
    let (q, n, m) = (sp.q(), sp.dim_v(), sp.dim_w());
    let (vl, wl) = (sp.v_lattice(), sp.w_lattice());
    let vc: Vec<(usize, usize)> = chains(vl);
    let wc: Vec<(usize, usize)> = chains(wl);
    let maps = pow(q, n * m);
    let total = (vc.len() * wc.len()).saturating_mul(maps);
    let decode = |i: usize| {
        let (pair, xc) = (i / maps, i % maps);
        let ((v2, v1), (w1, w2)) = (vc[pair / wc.len()], wc[pair % wc.len()]);
        NestedConfig {
            v1: vl.get(v1).clone(),
            v2: vl.get(v2).clone(),
            w1: wl.get(w1).clone(),
            w2: wl.get(w2).clone(),
            x: sp.decode_dual(xc),
        }
    };
    let sample = |rng: &mut ChaCha8Rng| {
        let v1 = random_in(rng, vl, |_| true).clone();
        let v2 = random_in(rng, vl, |s| s.is_subspace_of(&v1, f)).clone();
        let w1 = random_in(rng, wl, |_| true).clone();
        let w2 = random_in(rng, wl, |s| w1.is_subspace_of(s, f)).clone();
        NestedConfig { v1, v2, w1, w2, x: random_mat(rng, q, n, m) }
    };
    let check = |c: &NestedConfig| {
        let direct = hybrid(&c.x, &c.v1, &c.w1, f);
        let outer = hybrid(&c.x, &c.v2, &c.w2, f);
        let staged = outer && {
            let y = compress(&c.x, &c.w2, &c.v2, f);
            let target = c.v1.image_under(&c.v2.quotient_projection(f), f);
            let w1_in_w2 = c.w1.coords_in(&c.w2, f).expect("W1 lies in W2");
            hybrid(&y, &target, &w1_in_w2, f)
        };
        match (direct, staged) {
            (true, true) => Outcome::Witness,
            (false, false) => Outcome::Idle,
            _ => Outcome::Fail("conditions disagree"),
        }
    };
    run("hybrid-condition-composition", sp, plan, total, decode, sample, check)
}

// ---------------------------------------------------------------------------------------------
// The unique triple attached to a map with small kernel and large image.

#[derive(Debug)]
struct TripleConfig {
    v1: Subspace,
    w1: Subspace,
    y: Mat,
}

/// For Y with ker Y ⊆ W₁ and Im Y ⊇ V₁, exactly one (W₂ ⊇ W₁, V₂ ⊆ V₁, X) has X: W₂ → V₁/V₂
/// onto with kernel W₁, Y⁻¹(V₂) ⊆ W₂ and X ≤ Y(W₂, V/V₂); it is W₂ = W₁ + Y⁻¹(V₁),
/// V₂ = Y(W₁) ∩ V₁ with X = Y(W₂, V/V₂) on Y⁻¹(V₁).
pub fn check_unique_triple_lemma(sp: &Arc<Space>, plan: &Plan) -> OracleReport {
    let f = sp.field();
    let (q, n, m) = (sp.q(), sp.dim_v(), sp.dim_w());
    let (vl, wl) = (sp.v_lattice(), sp.w_lattice());
    let maps = pow(q, n * m);
    let pairs = vl.len() * wl.len();
    let decode = |i: usize| {
        let (pair, yc) = (i / maps, i % maps);
        TripleConfig { v1: vl.get(pair / wl.len()).clone(), w1: wl.get(pair % wl.len()).clone(), y: sp.decode_dual(yc) }
    };
    let sample = |rng: &mut ChaCha8Rng| {
        // Draw Y first, then subspaces that meet the hypotheses.
        let y = random_mat(rng, q, n, m);
        let (ker, im) = (y.kernel(f), y.image(f));
        let v1 = random_in(rng, vl, |s| s.is_subspace_of(&im, f)).clone();
        let w1 = random_in(rng, wl, |s| ker.is_subspace_of(s, f)).clone();
        TripleConfig { v1, w1, y }
    };
    let check = |c: &TripleConfig| {
        let (v1, w1, y) = (&c.v1, &c.w1, &c.y);
        if !y.kernel(f).is_subspace_of(w1, f) || !contains_all(&y.image(f), v1, f) {
            return Outcome::Idle;
        }
        let pre_v1 = y.preimage(v1, f);
        let w2_recipe = w1.sum(&pre_v1, f);
        let v2_recipe = w1.image_under(y, f).intersect(v1, f);
        let mut found = Vec::new();
        for (_, w2) in wl.iter().filter(|(_, s)| w1.is_subspace_of(s, f)) {
            for (_, v2) in vl.iter().filter(|(_, s)| s.is_subspace_of(v1, f)) {
                let k = v1.dim() - v2.dim();
                if w2.dim() != w1.dim() + k || !y.preimage(v2, f).is_subspace_of(w2, f) {
                    continue;
                }
                let y2 = compress(y, w2, v2, f);
                let embed = v1.image_under(&v2.quotient_projection(f), f).basis().transpose();
                let w1_local = w1.coords_in(w2, f).expect("W1 lies in W2");
                for code in 0..pow(q, k * w2.dim()) {
                    let x = decode_mat(q, k, w2.dim(), code);
                    if x.rank(f) != k || x.kernel(f) != w1_local {
                        continue;
                    }
                    let x_emb = embed.mul(&x, f);
                    if poset_leq(&x_emb, &y2, f).expect("same shape") {
                        found.push((w2.clone(), v2.clone(), x_emb, y2.clone()));
                    }
                }
            }
        }
        let [(w2, v2, x_emb, y2)] = found.as_slice() else {
            return Outcome::Fail("triple count is not one");
        };
        if *w2 != w2_recipe || *v2 != v2_recipe {
            return Outcome::Fail("triple differs from the recipe");
        }
        let pre_local = pre_v1.coords_in(w2, f).expect("Y^-1(V1) lies in W2");
        let agrees = pre_local.basis_vectors().iter().all(|b| x_emb.apply(b, f) == y2.apply(b, f));
        if agrees {
            Outcome::Witness
        } else {
            Outcome::Fail("X does not follow Y on the preimage of V1")
        }
    };
    run("unique-compression-triple", sp, plan, (pairs).saturating_mul(maps), decode, sample, check)
}

// ---------------------------------------------------------------------------------------------
// Swapping the order of two derivatives.

#[derive(Debug)]
struct SwapConfig {
    v1: Subspace,
    v2: Subspace,
    w1: Subspace,
    w2: Subspace,
    x: Mat,
    y: Mat,
}

/// Invertible k × k matrices, as codes.
fn general_linear(q: usize, k: usize, f: &Field) -> Vec<Mat> {
    (0..pow(q, k * k)).map(|c| decode_mat(q, k, k, c)).filter(|a| a.rank(f) == k).collect()
}

/// The map W → W/W₁ ≅ F^k → V₁ ⊆ V through an invertible middle matrix.
fn with_kernel_image(w1: &Subspace, v1: &Subspace, middle: &Mat, f: &Field) -> Mat {
    v1.basis().transpose().mul(middle, f).mul(&w1.quotient_projection(f), f)
}

struct SwapSide {
    v3: Subspace,
    w3: Subspace,
}

/// The hypotheses of the forward direction, for a candidate (V₃, W₃).
fn forward_hypotheses(c: &SwapConfig, s: &SwapSide, f: &Field) -> bool {
    s.v3.intersect(&c.v1, f).dim() == 0
        && s.v3.sum(&c.v1, f) == c.v2
        && s.w3.sum(&c.w1, f) == Subspace::full(c.w1.ambient())
        && s.w3.intersect(&c.w1, f) == c.w2
        && hybrid(&c.y, &s.v3, &s.w3, f)
        && poset_leq(&compress(&c.x, &s.w3, &s.v3, f), &compress(&c.y, &s.w3, &s.v3, f), f).expect("same shape")
}

/// X ≤ Y, and Y(W₁, V/V₁) meets (V₂/V₁, W₂).
fn backward_hypotheses(c: &SwapConfig, f: &Field) -> bool {
    poset_leq(&c.x, &c.y, f).expect("same shape") && {
        let y1 = compress(&c.y, &c.w1, &c.v1, f);
        let target = c.v2.image_under(&c.v1.quotient_projection(f), f);
        hybrid(&y1, &target, &c.w2.coords_in(&c.w1, f).expect("W2 lies in W1"), f)
    }
}

fn canonical_side(c: &SwapConfig, f: &Field) -> SwapSide {
    let diff = c.y.sub(&c.x, f);
    SwapSide { v3: diff.image(f).intersect(&c.v2, f), w3: diff.kernel(f).sum(&c.w2, f) }
}

/// Both directions of the derivative-swapping correspondence. With ker X = W₁, Im X = V₁,
/// V₁ ⊆ V₂ and W₂ ⊆ W₁: a pair (V₃, W₃) meeting the forward hypotheses exists iff the backward
/// hypotheses hold, and it is then unique and equal to (Im(Y−X) ∩ V₂, Ker(Y−X) + W₂).
pub fn check_swapping_lemmas(sp: &Arc<Space>, plan: &Plan) -> OracleReport {
    let f = sp.field();
    let (q, n, m) = (sp.q(), sp.dim_v(), sp.dim_w());
    let (vl, wl) = (sp.v_lattice(), sp.w_lattice());
    let gl: Vec<Vec<Mat>> = (0..=n.min(m)).map(|k| general_linear(q, k, f)).collect();
    let w_chains = chains(wl);
    let frames: Vec<((usize, usize), (usize, usize))> = chains(vl)
        .into_iter()
        .flat_map(|vc| w_chains.iter().map(move |&wc| (vc, wc)))
        .filter(|&((v1, _), (_, w1))| vl.get(v1).dim() == wl.get(w1).codim())
        .collect();
    let maps = pow(q, n * m);
    let blocks = Blocks::new(frames.iter().map(|&((v1, _), _)| gl[vl.get(v1).dim()].len().saturating_mul(maps)));
    let decode = |i: usize| {
        let (b, off) = blocks.locate(i);
        let ((v1, v2), (w2, w1)) = frames[b];
        let (v1, w1) = (vl.get(v1).clone(), wl.get(w1).clone());
        let x = with_kernel_image(&w1, &v1, &gl[v1.dim()][off / maps], f);
        SwapConfig { v2: vl.get(v2).clone(), w2: wl.get(w2).clone(), v1, w1, x, y: sp.decode_dual(off % maps) }
    };
    let sample = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(0..=n.min(m));
        let v1 = random_in(rng, vl, |s| s.dim() == k).clone();
        let v2 = random_in(rng, vl, |s| v1.is_subspace_of(s, f)).clone();
        let w1 = random_in(rng, wl, |s| s.codim() == k).clone();
        let w2 = random_in(rng, wl, |s| s.is_subspace_of(&w1, f)).clone();
        let x = with_kernel_image(&w1, &v1, gl[k].choose(rng).expect("GL is nonempty"), f);
        // Half the draws perturb X by a rank-one map so that X ≤ Y is common.
        let y = if rng.gen_bool(0.5) {
            random_mat(rng, q, n, m)
        } else {
            let u: Vec<_> = (0..n).map(|_| f.element(rng.gen_range(0..q))).collect();
            let w: Vec<_> = (0..m).map(|_| f.element(rng.gen_range(0..q))).collect();
            x.add(&Mat::outer(f, &u, &w), f)
        };
        SwapConfig { v1, v2, w1, w2, x, y }
    };
    let check = |c: &SwapConfig| {
        let k3 = c.v2.dim() - c.v1.dim();
        let w3_dim = m - (c.w1.dim() - c.w2.dim());
        let forward: Vec<SwapSide> = vl
            .iter()
            .filter(|(_, s)| s.dim() == k3 && s.is_subspace_of(&c.v2, f))
            .flat_map(|(_, v3)| {
                wl.iter()
                    .filter(|(_, s)| s.dim() == w3_dim && c.w2.is_subspace_of(s, f))
                    .map(move |(_, w3)| SwapSide { v3: v3.clone(), w3: w3.clone() })
            })
            .filter(|side| forward_hypotheses(c, side, f))
            .collect();
        let backward = backward_hypotheses(c, f);
        if forward.len() != usize::from(backward) {
            return Outcome::Fail("forward pairs do not match the backward hypotheses");
        }
        if !backward {
            return Outcome::Idle;
        }
        let canon = canonical_side(c, f);
        if !forward_hypotheses(c, &canon, f) {
            return Outcome::Fail("canonical pair misses the forward hypotheses");
        }
        if forward[0].v3 != canon.v3 || forward[0].w3 != canon.w3 {
            return Outcome::Fail("forward pair differs from the canonical pair");
        }
        Outcome::Witness
    };
    run("derivative-swap-correspondence", sp, plan, blocks.total, decode, sample, check)
}

// ---------------------------------------------------------------------------------------------
// Splitting pairs (Y, Z) with Y + Z = X.

#[derive(Debug)]
struct SplitConfig {
    y: usize,
    z: usize,
}

/// Every Y + Z = X has a nonzero common image vector of X, Y, Z, or kernels summing to a proper
/// subspace, or a split Y' ⊕ Z' = X with Y' ≤ Y and Z' ≤ Z (found by search over Y').
pub fn check_trichotomy(sp: &Arc<Space>, plan: &Plan) -> OracleReport {
    let f = sp.field();
    let maps = sp.len();
    let ranks = sp.dual_ranks();
    let rank = |i: usize| ranks[i] as usize;
    let sub = |a: usize, b: usize| sp.add_index(a, sp.neg_index(b));
    let below = |a: usize, b: usize| rank(b) == rank(a) + rank(sub(b, a));
    let decode = |i: usize| SplitConfig { y: i / maps, z: i % maps };
    let sample = |rng: &mut ChaCha8Rng| SplitConfig { y: rng.gen_range(0..maps), z: rng.gen_range(0..maps) };
    let check = |c: &SplitConfig| {
        let x = sp.add_index(c.y, c.z);
        let mats = sp.duals();
        let (ym, zm, xm) = (&mats[c.y], &mats[c.z], &mats[x]);
        let common_image = ym.image(f).intersect(&zm.image(f), f).intersect(&xm.image(f), f).dim() > 0;
        let kernels = ym.kernel(f).sum(&zm.kernel(f), f).sum(&xm.kernel(f), f).codim() > 0;
        if common_image || kernels {
            return Outcome::Idle;
        }
        let split = (0..maps).any(|yp| {
            let zp = sub(x, yp);
            rank(x) == rank(yp) + rank(zp) && below(yp, c.y) && below(zp, c.z)
        });
        if split {
            Outcome::Witness
        } else {
            Outcome::Fail("no clause holds")
        }
    };
    run("sum-pair-trichotomy", sp, plan, maps.saturating_mul(maps), decode, sample, check)
}

// ---------------------------------------------------------------------------------------------
// Reference transform.

/// f̂(X) = E_A f(A) conj(ω^{τ(Tr(XA))}) by direct summation, in the function's own coordinates.
pub fn naive_transform_oracle(g: &MapFunction<f64>) -> Spectrum<f64> {
    let sp = g.space();
    let f = sp.field();
    let scale = 1.0 / sp.len() as f64;
    let coeffs: Vec<Complex<f64>> = sp
        .duals()
        .par_iter()
        .map(|x| {
            sp.maps()
                .iter()
                .zip(g.values())
                .map(|(a, &v)| v * f.root::<f64>(f.trace(x.mul(a, f).trace(f))).conj())
                .sum::<Complex<f64>>()
                * scale
        })
        .collect();
    Spectrum::new(sp.clone(), coeffs).expect("length matches")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransformReport {
    pub q: usize,
    pub dim_v: usize,
    pub dim_w: usize,
    pub functions: usize,
    pub seed: u64,
    pub max_err: f64,
    pub pass: bool,
}

/// Reference tolerance for the fast transform.
pub const TRANSFORM_TOL: f64 = 1e-10;

/// Fast against reference transform on seeded random complex functions.
pub fn check_fast_transform(sp: &Arc<Space>, functions: usize, seed: u64) -> Result<TransformReport, FourierError> {
    let max_err = (0..functions as u64)
        .into_par_iter()
        .map(|k| {
            let g = crate::calculus::random_function(sp, seed.wrapping_add(k));
            g.transform().max_diff(&naive_transform_oracle(&g))
        })
        .reduce(|| 0.0, f64::max);
    Ok(TransformReport {
        q: sp.q(),
        dim_v: sp.dim_v(),
        dim_w: sp.dim_w(),
        functions,
        seed,
        max_err,
        pass: max_err < TRANSFORM_TOL,
    })
}

/// The appendix suite plus the splitting trichotomy.
pub fn verify_lemmas(sp: &Arc<Space>, plan: &Plan) -> Vec<OracleReport> {
    vec![
        check_trace_lemma(sp, plan),
        check_equivalence_lemma(sp, plan),
        check_unique_triple_lemma(sp, plan),
        check_swapping_lemmas(sp, plan),
        check_trichotomy(sp, plan),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(q: usize, n: usize, m: usize) -> Arc<Space> {
        Space::get(&Field::standard(q).unwrap(), n, m)
    }

    #[test]
    fn exhaustive_suite_at_two_by_two() {
        let sp = space(2, 2, 2);
        for r in verify_lemmas(&sp, &Plan::default()) {
            assert!(r.exhaustive && r.pass, "{r:?}");
            assert!(r.witnesses > 0, "{} never fires", r.lemma_id);
        }
    }

    #[test]
    fn sampled_suite_at_larger_dims() {
        for sp in [space(2, 2, 3), space(3, 2, 2)] {
            for r in verify_lemmas(&sp, &Plan::sampled(200, 9)) {
                assert!(!r.exhaustive && r.configurations == 200 && r.pass, "{r:?}");
            }
        }
    }

    #[test]
    fn block_lookup() {
        let b = Blocks::new([3, 0, 2]);
        assert_eq!(b.total, 5);
        assert_eq!(b.locate(0), (0, 0));
        assert_eq!(b.locate(2), (0, 2));
        assert_eq!(b.locate(3), (2, 0));
        assert_eq!(b.locate(4), (2, 1));
    }

    #[test]
    fn naive_transform_examples() {
        let sp = space(3, 1, 2);
        let delta = MapFunction::<f64>::indicator(sp.clone(), |a| a.is_zero());
        let spec = naive_transform_oracle(&delta);
        assert!(spec.coeffs().iter().all(|c| (c - Complex::new(1.0 / 9.0, 0.0)).norm() < 1e-12));
        let x = sp.decode_dual(5);
        let u = MapFunction::<f64>::character(sp.clone(), &x).unwrap();
        let spec = naive_transform_oracle(&u);
        for (i, c) in spec.coeffs().iter().enumerate() {
            let want = if i == 5 { 1.0 } else { 0.0 };
            assert!((c - Complex::new(want, 0.0)).norm() < 1e-12);
        }
        assert!(check_fast_transform(&sp, 10, 1).unwrap().pass);
    }

    #[test]
    fn broken_instance_is_reported() {
        let sp = space(2, 2, 2);
        let r = run(
            "always-false",
            &sp,
            &Plan::default(),
            4,
            |i| i,
            |_| 0,
            |&i| {
                if i == 2 {
                    Outcome::Fail("planted")
                } else {
                    Outcome::Idle
                }
            },
        );
        assert!(!r.pass && r.failures == 1 && r.failing_instance.as_deref() == Some("planted: 2"));
    }
}
