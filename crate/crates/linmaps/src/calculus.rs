//! Sweeps checking the derivative and Laplacian calculus coefficientwise on characters
//! and random functions.

use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::{FourierError, MapFunction, RestrictionTriple};
use crate::laplacians::{derivative, derivative_x, laplacian_v, laplacian_w, tee_operator_direct, Direction};
use crate::linalg::{compress, Mat, Subspace};
use crate::report::{sweep, Coverage, IdentityReport, IDENTITY_TOL};
use crate::space::{decode_mat, Space};

pub fn random_function(sp: &Arc<Space>, seed: u64) -> MapFunction<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..sp.len()).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    MapFunction::new(sp.clone(), vals).expect("length matches")
}

/// Coefficientwise distance after aligning `b` to the frame of `a`.
pub fn spectral_err(a: &MapFunction<f64>, b: &MapFunction<f64>) -> Result<f64, FourierError> {
    let b = b.align_to(a.space(), a.frame())?;
    Ok(a.transform().max_diff(&b.transform()))
}

fn rand_mat(q: usize, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Mat {
    decode_mat(q, rows, cols, rng.gen_range(0..q.pow((rows * cols) as u32)))
}

fn rand_map(sp: &Space, rng: &mut ChaCha8Rng) -> Mat {
    sp.decode(rng.gen_range(0..sp.len()))
}

fn rand_dual(sp: &Space, rng: &mut ChaCha8Rng) -> Mat {
    sp.decode_dual(rng.gen_range(0..sp.len()))
}

fn rand_from<T: Clone>(items: &[T], rng: &mut ChaCha8Rng) -> T {
    items[rng.gen_range(0..items.len())].clone()
}

fn v_subs(sp: &Space) -> Vec<Subspace> {
    sp.v_lattice().iter().map(|(_, s)| s.clone()).collect()
}

fn w_subs(sp: &Space) -> Vec<Subspace> {
    sp.w_lattice().iter().map(|(_, s)| s.clone()).collect()
}

/// Lines and hyperplanes on which the combinatorial averages are defined.
pub fn usable_directions(sp: &Space) -> Vec<Direction> {
    Direction::all(sp)
        .into_iter()
        .filter(|d| match d {
            Direction::Line(_) => sp.dim_v() >= 2,
            Direction::Hyperplane(_) => sp.dim_w() >= 2,
        })
        .collect()
}

#[derive(Debug)]
pub struct ChainCase {
    v2: Subspace,
    v1: Subspace,
    w1: Subspace,
    w2: Subspace,
    y: Mat,
    t: Mat,
    s: Mat,
}

fn chain_case(
    sp: &Space,
    v2: &Subspace,
    v1: &Subspace,
    w1: &Subspace,
    w2: &Subspace,
    y: Mat,
    rng: &mut ChaCha8Rng,
) -> ChainCase {
    let q = sp.q();
    ChainCase {
        v2: v2.clone(),
        v1: v1.clone(),
        w1: w1.clone(),
        w2: w2.clone(),
        y,
        t: rand_map(sp, rng),
        s: rand_mat(q, w2.dim(), v2.codim(), rng),
    }
}

/// D_{V₁/V₂,W₁,S} ∘ D_{V₂,W₂,T} = D_{V₁,W₁,T+S(V,W)}.
pub fn check_derivative_composition(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let f = sp.field();
    let (vs, ws) = (v_subs(sp), w_subs(sp));
    let all = |rng: &mut ChaCha8Rng| {
        let mut out = Vec::new();
        for v1 in &vs {
            for v2 in vs.iter().filter(|v2| v2.is_subspace_of(v1, f)) {
                for w2 in &ws {
                    for w1 in ws.iter().filter(|w1| w1.is_subspace_of(w2, f)) {
                        for y in sp.duals() {
                            out.push(chain_case(sp, v2, v1, w1, w2, y.clone(), rng));
                        }
                    }
                }
            }
        }
        out
    };
    let sample = |rng: &mut ChaCha8Rng| {
        let v1 = rand_from(&vs, rng);
        let v2 = rand_from(&vs.iter().filter(|v| v.is_subspace_of(&v1, f)).cloned().collect::<Vec<_>>(), rng);
        let w2 = rand_from(&ws, rng);
        let w1 = rand_from(&ws.iter().filter(|w| w.is_subspace_of(&w2, f)).cloned().collect::<Vec<_>>(), rng);
        let y = rand_dual(sp, rng);
        chain_case(sp, &v2, &v1, &w1, &w2, y, rng)
    };
    sweep("derivative-composition", cov, IDENTITY_TOL, all, sample, |c: &ChainCase| {
        let u = MapFunction::<f64>::character(sp.clone(), &c.y)?;
        let inner = derivative(&u, &c.v2, &c.w2, &c.t)?;
        let v1_loc = c.v1.image_under(&c.v2.quotient_projection(f), f);
        let w1_loc = c.w1.coords_in(&c.w2, f)?;
        let lhs = derivative(&inner, &v1_loc, &w1_loc, &c.s)?;
        let shift = c.t.add(&inner.frame().lift(&c.s, f), f);
        let rhs = derivative(&u, &c.v1, &c.w1, &shift)?;
        spectral_err(&lhs, &rhs)
    })
}

#[derive(Debug)]
pub struct PairCase {
    v1: Subspace,
    w1: Subspace,
    y: Mat,
    t: Mat,
}

/// (L_{V₁} ∘ L_{W₁} f)_{(V₁,W₁)→T} = Σ_{V₂ ≤ V₁, W₂ ≥ W₁, X} D_X ∘ D_{V₂,W₂,T} f, where X runs
/// over maps W₂ → V/V₂ with kernel W₁ and image V₁/V₂.
pub fn check_restricted_laplacians(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let f = sp.field();
    let (vs, ws) = (v_subs(sp), w_subs(sp));
    let all = |rng: &mut ChaCha8Rng| {
        let mut out = Vec::new();
        for v1 in &vs {
            for w1 in &ws {
                for y in sp.duals() {
                    out.push(PairCase { v1: v1.clone(), w1: w1.clone(), y: y.clone(), t: rand_map(sp, rng) });
                }
            }
        }
        out
    };
    let sample = |rng: &mut ChaCha8Rng| PairCase {
        v1: rand_from(&vs, rng),
        w1: rand_from(&ws, rng),
        y: rand_dual(sp, rng),
        t: rand_map(sp, rng),
    };
    sweep("restricted-laplacian-expansion", cov, IDENTITY_TOL, all, sample, |c: &PairCase| {
        let u = MapFunction::<f64>::character(sp.clone(), &c.y)?;
        let triple = RestrictionTriple::new(c.v1.clone(), c.w1.clone(), c.t.clone())?;
        let lhs = laplacian_v(&laplacian_w(&u, &c.w1)?, &c.v1)?.restrict(&triple)?;
        let mut rhs = MapFunction::zeros(lhs.space().clone());
        rhs = MapFunction::with_frame(lhs.space().clone(), lhs.frame().clone(), rhs.into_values())?;
        for v2 in vs.iter().filter(|v2| v2.is_subspace_of(&c.v1, f)) {
            for w2 in ws.iter().filter(|w2| c.w1.is_subspace_of(w2, f)) {
                let inner = derivative(&u, v2, w2, &c.t)?;
                let local = inner.space().clone();
                let v1_loc = c.v1.image_under(&v2.quotient_projection(f), f);
                let w1_loc = c.w1.coords_in(w2, f)?;
                let zero = Mat::zeros(local.dim_w(), local.dim_v());
                for x in local.duals() {
                    if x.kernel(f) != w1_loc || x.image(f) != v1_loc {
                        continue;
                    }
                    let term = derivative_x(&inner, x, &zero)?;
                    rhs = rhs.add(&term.align_to(lhs.space(), lhs.frame())?);
                }
            }
        }
        spectral_err(&lhs, &rhs)
    })
}

#[derive(Debug)]
pub struct SwitchCase {
    x: Mat,
    v2: Subspace,
    w2: Subspace,
    y: Mat,
    t: Mat,
    s: Mat,
}

fn switch_case(sp: &Space, x: &Mat, v2: &Subspace, w2: &Subspace, y: Mat, rng: &mut ChaCha8Rng) -> SwitchCase {
    let f = sp.field();
    let rank = x.rank(f);
    SwitchCase {
        x: x.clone(),
        v2: v2.clone(),
        w2: w2.clone(),
        y,
        t: rand_mat(sp.q(), sp.dim_w() - rank, sp.dim_v() - rank, rng),
        s: rand_map(sp, rng),
    }
}

/// D_{V₂/V₁,W₂,T} ∘ D_{X,S} = Σ_{V₃,W₃} D_{X(W₃,V/V₃)} ∘ D_{V₃,W₃,S+T(V,W)} for X with image V₁
/// and kernel W₁, V₃ complementing V₁ in V₂ and W₃ meeting W₁ in W₂ with W₃ + W₁ = W.
pub fn check_derivative_interchange(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let f = sp.field();
    let (vs, ws) = (v_subs(sp), w_subs(sp));
    let above = |x: &Mat| -> (Vec<Subspace>, Vec<Subspace>) {
        let (v1, w1) = (x.image(f), x.kernel(f));
        (
            vs.iter().filter(|v| v1.is_subspace_of(v, f)).cloned().collect(),
            ws.iter().filter(|w| w.is_subspace_of(&w1, f)).cloned().collect(),
        )
    };
    let all = |rng: &mut ChaCha8Rng| {
        let mut out = Vec::new();
        for x in sp.duals() {
            let (v2s, w2s) = above(x);
            for v2 in &v2s {
                for w2 in &w2s {
                    for y in sp.duals() {
                        out.push(switch_case(sp, x, v2, w2, y.clone(), rng));
                    }
                }
            }
        }
        out
    };
    let sample = |rng: &mut ChaCha8Rng| {
        let x = rand_dual(sp, rng);
        let (v2s, w2s) = above(&x);
        let (v2, w2) = (rand_from(&v2s, rng), rand_from(&w2s, rng));
        let y = rand_dual(sp, rng);
        switch_case(sp, &x, &v2, &w2, y, rng)
    };
    sweep("derivative-interchange", cov, IDENTITY_TOL, all, sample, |c: &SwitchCase| {
        let (v1, w1) = (c.x.image(f), c.x.kernel(f));
        let u = MapFunction::<f64>::character(sp.clone(), &c.y)?;
        let dx = derivative_x(&u, &c.x, &c.s)?;
        let v2_loc = c.v2.image_under(&v1.quotient_projection(f), f);
        let w2_loc = c.w2.coords_in(&w1, f)?;
        let lhs = derivative(&dx, &v2_loc, &w2_loc, &c.t)?;
        let shift = c.s.add(&dx.frame().lift(&c.t, f), f);
        let mut rhs = MapFunction::with_frame(
            lhs.space().clone(),
            lhs.frame().clone(),
            MapFunction::<f64>::zeros(lhs.space().clone()).into_values(),
        )?;
        let whole_w = Subspace::full(sp.dim_w());
        for v3 in vs.iter().filter(|v3| {
            v3.is_subspace_of(&c.v2, f) && v3.intersect(&v1, f).dim() == 0 && v3.dim() + v1.dim() == c.v2.dim()
        }) {
            for w3 in ws
                .iter()
                .filter(|w3| c.w2.is_subspace_of(w3, f) && w3.sum(&w1, f) == whole_w && w3.intersect(&w1, f) == c.w2)
            {
                let inner = derivative(&u, v3, w3, &shift)?;
                let x3 = compress(&c.x, w3, v3, f);
                let zero = Mat::zeros(inner.space().dim_w(), inner.space().dim_v());
                let term = derivative_x(&inner, &x3, &zero)?;
                rhs = rhs.add(&term.align_to(lhs.space(), lhs.frame())?);
            }
        }
        spectral_err(&lhs, &rhs)
    })
}

#[derive(Debug)]
pub struct TripleCase {
    v1: Subspace,
    w1: Subspace,
    t: Mat,
    x: Mat,
    seed: u64,
}

fn all_triples(sp: &Space, rng: &mut ChaCha8Rng, per_x: bool) -> Vec<TripleCase> {
    let mut out = Vec::new();
    for v1 in v_subs(sp) {
        for w1 in w_subs(sp) {
            for t in sp.maps() {
                let xs: Vec<Mat> = if per_x { sp.duals().to_vec() } else { vec![Mat::zeros(sp.dim_v(), sp.dim_w())] };
                for x in xs {
                    out.push(TripleCase { v1: v1.clone(), w1: w1.clone(), t: t.clone(), x, seed: rng.gen() });
                }
            }
        }
    }
    out
}

fn rand_triple(sp: &Space, rng: &mut ChaCha8Rng) -> TripleCase {
    let (vs, ws) = (v_subs(sp), w_subs(sp));
    TripleCase {
        v1: rand_from(&vs, rng),
        w1: rand_from(&ws, rng),
        t: rand_map(sp, rng),
        x: rand_dual(sp, rng),
        seed: rng.gen(),
    }
}

/// (u_X)_{(V₁,W₁)→T} = u_X(T)·u_{X(W₁,V/V₁)}.
pub fn check_character_restriction(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let f = sp.field();
    let roots = f.roots::<f64>();
    sweep(
        "character-restriction",
        cov,
        IDENTITY_TOL,
        |rng| all_triples(sp, rng, true),
        |rng| rand_triple(sp, rng),
        |c| {
            let u = MapFunction::<f64>::character(sp.clone(), &c.x)?;
            let r = u.restrict(&RestrictionTriple::new(c.v1.clone(), c.w1.clone(), c.t.clone())?)?;
            let y = compress(&c.x, &c.w1, &c.v1, f);
            let expect =
                MapFunction::<f64>::character(r.space().clone(), &y)?.scale(roots[sp.pairing(&c.x, &c.t) as usize]);
            Ok(r.max_diff(&expect))
        },
    )
}

/// ĝ(Y) = Σ_{X(W₁,V/V₁) = Y} f̂(X) u_X(T) for g the restriction of f.
pub fn check_restriction_spectrum(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    sweep(
        "restriction-spectrum",
        cov,
        IDENTITY_TOL,
        |rng| all_triples(sp, rng, false),
        |rng| rand_triple(sp, rng),
        |c| {
            let g = random_function(sp, c.seed);
            let triple = RestrictionTriple::new(c.v1.clone(), c.w1.clone(), c.t.clone())?;
            let direct = g.restrict(&triple)?.transform();
            let formula = g.transform().restrict(&triple)?;
            Ok(direct.max_diff(&formula))
        },
    )
}

fn level_or_zero(g: &MapFunction<f64>, d: isize) -> MapFunction<f64> {
    if d < 0 {
        g.map_values(|_| Complex::new(0.0, 0.0))
    } else {
        g.level(d as usize)
    }
}

/// D_{V₁,W₁,T}[f^{=d}] = (D_{V₁,W₁,T}[f])^{=d−i} with i = dim V₁ + codim W₁.
pub fn check_derivative_degree(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let all = |rng: &mut ChaCha8Rng| {
        let mut out = Vec::new();
        for v1 in v_subs(sp) {
            for w1 in w_subs(sp) {
                let t = rand_map(sp, rng);
                out.push(TripleCase { v1: v1.clone(), w1, t, x: Mat::zeros(sp.dim_v(), sp.dim_w()), seed: rng.gen() });
            }
        }
        out
    };
    sweep(
        "derivative-degree-shift",
        cov,
        IDENTITY_TOL,
        all,
        |rng| rand_triple(sp, rng),
        |c| {
            let g = random_function(sp, c.seed);
            let order = (c.v1.dim() + c.w1.codim()) as isize;
            let whole = derivative(&g, &c.v1, &c.w1, &c.t)?;
            let mut worst = 0.0f64;
            for d in 0..=sp.max_rank() {
                let lhs = derivative(&g.level(d), &c.v1, &c.w1, &c.t)?;
                worst = worst.max(lhs.max_diff(&level_or_zero(&whole, d as isize - order)));
            }
            Ok(worst)
        },
    )
}

/// D_{X,T}[f^{=d}] = (D_{X,T}[f])^{=d−rank X}.
pub fn check_poset_derivative_degree(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let f = sp.field();
    let all = |rng: &mut ChaCha8Rng| {
        sp.duals()
            .iter()
            .map(|x| TripleCase {
                v1: Subspace::zero(sp.dim_v()),
                w1: Subspace::full(sp.dim_w()),
                t: rand_map(sp, rng),
                x: x.clone(),
                seed: rng.gen(),
            })
            .collect()
    };
    sweep(
        "poset-derivative-degree-shift",
        cov,
        IDENTITY_TOL,
        all,
        |rng| rand_triple(sp, rng),
        |c| {
            let g = random_function(sp, c.seed);
            let rank = c.x.rank(f) as isize;
            let whole = derivative_x(&g, &c.x, &c.t)?;
            let mut worst = 0.0f64;
            for d in 0..=sp.max_rank() {
                let lhs = derivative_x(&g.level(d), &c.x, &c.t)?;
                worst = worst.max(lhs.max_diff(&level_or_zero(&whole, d as isize - rank)));
            }
            Ok(worst)
        },
    )
}

#[derive(Debug)]
pub struct DirectionCase {
    dir: Direction,
    t: Mat,
    seed: u64,
}

fn direction_cases(sp: &Space, rng: &mut ChaCha8Rng, all_shifts: bool) -> Vec<DirectionCase> {
    let mut out = Vec::new();
    for dir in usable_directions(sp) {
        if all_shifts {
            let (v1, w1) = dir.pair(sp);
            let cosets = sp.cosets(sp.v_id(&v1), sp.w_id(&w1));
            for &rep in &cosets.representatives {
                out.push(DirectionCase { dir: dir.clone(), t: sp.decode(rep as usize), seed: rng.gen() });
            }
        } else {
            out.push(DirectionCase { dir, t: rand_map(sp, rng), seed: rng.gen() });
        }
    }
    out
}

fn rand_direction_case(sp: &Space, rng: &mut ChaCha8Rng) -> DirectionCase {
    let dirs = usable_directions(sp);
    DirectionCase { dir: rand_from(&dirs, rng), t: rand_map(sp, rng), seed: rng.gen() }
}

fn no_directions(id: &str, cov: &Coverage) -> IdentityReport {
    IdentityReport {
        lemma_id: id.to_string(),
        instances_checked: 0,
        max_err: 0.0,
        pass: true,
        seed: Some(cov.seed()),
        failing_instance: None,
    }
}

/// L_U[f^{=i}] = f^{=i} − q^i ℰ_U[f^{=i}], with ℰ_U averaged directly.
pub fn check_homogeneous_laplacian(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let id = "homogeneous-laplacian";
    if usable_directions(sp).is_empty() {
        return Ok(no_directions(id, cov));
    }
    let q = sp.q() as f64;
    sweep(
        id,
        cov,
        IDENTITY_TOL,
        |rng| direction_cases(sp, rng, false),
        |rng| rand_direction_case(sp, rng),
        |c| {
            let g = random_function(sp, c.seed);
            let mut worst = 0.0f64;
            for i in 0..=sp.max_rank() {
                let gi = g.level(i);
                let lhs = c.dir.laplacian().apply(&gi)?;
                let rhs = gi.sub(&c.dir.average_direct(&gi)?.scale(Complex::new(q.powi(i as i32), 0.0)));
                worst = worst.max(lhs.max_diff(&rhs));
            }
            Ok(worst)
        },
    )
}

/// (𝒯_{i,U} f)^{=i} = L_U[f^{=i}] and (𝒯_{i,U} f)^{=i−1} = L_U[f^{=i−1}].
pub fn check_tee_levels(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let id = "tee-levels";
    if usable_directions(sp).is_empty() {
        return Ok(no_directions(id, cov));
    }
    sweep(
        id,
        cov,
        IDENTITY_TOL,
        |rng| direction_cases(sp, rng, false),
        |rng| rand_direction_case(sp, rng),
        |c| {
            let g = random_function(sp, c.seed);
            let lap = c.dir.laplacian();
            let mut worst = 0.0f64;
            for i in 1..=sp.max_rank() {
                let t = tee_operator_direct(&g, i, &c.dir)?;
                worst = worst.max(t.level(i).max_diff(&lap.apply(&g.level(i))?));
                worst = worst.max(t.level(i - 1).max_diff(&lap.apply(&g.level(i - 1))?));
            }
            Ok(worst)
        },
    )
}

/// D_{U→T}[f^{=i}] = ((𝒯_{i,U} f)_{U→T})^{=i−1}, over all slice representatives T.
pub fn check_tee_derivative(sp: &Arc<Space>, cov: &Coverage) -> Result<IdentityReport, FourierError> {
    let id = "tee-derivative";
    if usable_directions(sp).is_empty() {
        return Ok(no_directions(id, cov));
    }
    sweep(
        id,
        cov,
        IDENTITY_TOL,
        |rng| direction_cases(sp, rng, true),
        |rng| rand_direction_case(sp, rng),
        |c| {
            let g = random_function(sp, c.seed);
            let (v1, w1) = c.dir.pair(sp);
            let triple = c.dir.triple(sp, &c.t)?;
            let mut worst = 0.0f64;
            for i in 1..=sp.max_rank() {
                let lhs = derivative(&g.level(i), &v1, &w1, &c.t)?;
                let rhs = tee_operator_direct(&g, i, &c.dir)?.restrict(&triple)?.level(i - 1);
                worst = worst.max(lhs.max_diff(&rhs));
            }
            Ok(worst)
        },
    )
}

type Check = fn(&Arc<Space>, &Coverage) -> Result<IdentityReport, FourierError>;

/// Every calculus identity on one space.
pub fn verify_calculus(sp: &Arc<Space>, cov: &Coverage) -> Result<Vec<IdentityReport>, FourierError> {
    let checks: [Check; 10] = [
        check_character_restriction,
        check_restriction_spectrum,
        check_derivative_degree,
        check_poset_derivative_degree,
        check_derivative_composition,
        check_restricted_laplacians,
        check_derivative_interchange,
        check_homogeneous_laplacian,
        check_tee_levels,
        check_tee_derivative,
    ];
    checks.iter().map(|c| c(sp, cov)).collect()
}
