//! Property tests for the structural invariants of the library.

use std::sync::Arc;

use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linmaps::calculus::random_function;
use linmaps::cube::{coords, digits, subsets, CubeFunction};
use linmaps::expansion::{check_sse_theorem, ShortcodeGraph};
use linmaps::fixtures::random_boolean;
use linmaps::global::{certify_restriction_global, restriction_level};
use linmaps::laplacians::{avg_v, LaplacianSpec};
use linmaps::linalg::{lift, poset_leq, poset_leq_structural, pushdown, QuotientFrame};
use linmaps::space::decode_mat;
use linmaps::{Field, FieldElement, MapFunction, Space};

const SPACES: [(usize, usize, usize); 10] =
    [(2, 1, 1), (2, 2, 2), (2, 2, 3), (2, 3, 2), (3, 1, 2), (3, 2, 2), (4, 1, 2), (4, 2, 1), (5, 1, 1), (2, 3, 3)];

fn space((q, n, m): (usize, usize, usize)) -> Arc<Space> {
    Space::get(&Field::standard(q).unwrap(), n, m)
}

fn any_space() -> impl Strategy<Value = Arc<Space>> {
    prop::sample::select(SPACES.to_vec()).prop_map(space)
}

fn vector(f: &Field, len: usize, mut code: usize) -> Vec<FieldElement> {
    let q = f.order();
    (0..len)
        .map(|_| {
            let e = f.element(code % q);
            code /= q;
            e
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trace_is_additive_and_kernels_cancel(q in prop::sample::select(vec![2usize, 3, 4, 5, 7, 8, 9, 16]), a in 0usize..16, b in 0usize..16) {
        let f = Field::standard(q).unwrap();
        let (a, b) = (f.element(a % q), f.element(b % q));
        let p = f.p();
        prop_assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % p);
        if !a.is_zero() {
            let s: Complex<f64> = f.elements().map(|x| f.kernel::<f64>(a, x)).sum();
            prop_assert!(s.norm() < 1e-12);
        }
    }

    #[test]
    fn poset_order_matches_structural_form(sp in any_space(), i in any::<usize>(), j in any::<usize>()) {
        let f = sp.field();
        let (x, y) = (&sp.duals()[i % sp.len()], &sp.duals()[j % sp.len()]);
        prop_assert_eq!(poset_leq(x, y, f).unwrap(), poset_leq_structural(x, y, f));
        prop_assert!(poset_leq(x, x, f).unwrap());
        if poset_leq(x, y, f).unwrap() && poset_leq(y, x, f).unwrap() {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn pushdown_inverts_lift(sp in any_space(), v in any::<usize>(), w in any::<usize>(), code in any::<usize>()) {
        let f = sp.field();
        let v1 = sp.v_lattice().get(v % sp.v_lattice().len()).clone();
        let w1 = sp.w_lattice().get(w % sp.w_lattice().len()).clone();
        let frame = QuotientFrame::new(&v1, f);
        let count = sp.q().pow((w1.dim() * frame.dim()) as u32);
        let a = decode_mat(sp.q(), w1.dim(), frame.dim(), code % count);
        let lifted = lift(&a, &frame, &w1, f).unwrap();
        prop_assert_eq!(pushdown(&lifted, &frame, &w1, f).unwrap(), a);
    }

    #[test]
    fn transform_is_an_isometry(sp in any_space(), seed in any::<u64>()) {
        let g = random_function(&sp, seed);
        let h = random_function(&sp, seed ^ 0x5eed);
        let (gs, hs) = (g.transform(), h.transform());
        prop_assert!((gs.norm2_sq() - g.norm2_sq()).abs() <= 1e-9 * g.norm2_sq().max(1.0));
        let plancherel: Complex<f64> = gs.coeffs().iter().zip(hs.coeffs()).map(|(a, b)| a * b.conj()).sum();
        prop_assert!((plancherel - g.inner(&h)).norm() < 1e-9);
        prop_assert!(gs.inverse().max_diff(&g) < 1e-9);
    }

    #[test]
    fn laplacians_are_orthogonal_projections(sp in any_space(), kind in 0usize..4, pick in any::<usize>(), pick2 in any::<usize>(), seed in any::<u64>()) {
        let (vl, wl) = (sp.v_lattice(), sp.w_lattice());
        let spec = match kind {
            0 => LaplacianSpec::SubspaceV(vl.get(pick % vl.len()).clone()),
            1 => LaplacianSpec::SubspaceW(wl.get(pick % wl.len()).clone()),
            2 => LaplacianSpec::Hybrid(vl.get(pick % vl.len()).clone(), wl.get(pick2 % wl.len()).clone()),
            _ => LaplacianSpec::Poset(sp.duals()[pick % sp.len()].clone()),
        };
        let g = random_function(&sp, seed);
        let h = random_function(&sp, seed.wrapping_add(1));
        let lg = spec.apply(&g).unwrap();
        prop_assert!(spec.apply(&lg).unwrap().max_diff(&lg) < 1e-9);
        prop_assert!((lg.inner(&h) - g.inner(&spec.apply(&h).unwrap())).norm() < 1e-9);
        prop_assert!(lg.norm2_sq() <= g.norm2_sq() + 1e-12);
    }

    #[test]
    fn line_average_ignores_the_generator(dims in prop::sample::select(vec![(3usize, 2usize, 2usize), (3, 2, 1), (4, 2, 2), (5, 2, 1)]), code in 1usize..25, alpha in 1usize..5, seed in any::<u64>()) {
        let sp = space(dims);
        let f = sp.field();
        let q = sp.q();
        let v = vector(f, sp.dim_v(), 1 + code % (sp.v_size() - 1));
        let a = f.element(1 + alpha % (q - 1));
        let av: Vec<FieldElement> = v.iter().map(|&e| f.mul(a, e)).collect();
        let g = random_function(&sp, seed);
        prop_assert!(avg_v(&g, &v).unwrap().max_diff(&avg_v(&g, &av).unwrap()) < 1e-10);
    }

    #[test]
    fn dictator_products_are_juntas(sp in any_space(), k in 1usize..3, codes in prop::collection::vec(any::<usize>(), 4)) {
        let f = sp.field().clone();
        let pairs: Vec<(Vec<FieldElement>, Vec<FieldElement>)> = (0..k)
            .map(|i| (vector(&f, sp.dim_v(), codes[2 * i]), vector(&f, sp.dim_w(), codes[2 * i + 1])))
            .collect();
        let g = MapFunction::<f64>::indicator(sp.clone(), |a| pairs.iter().all(|(v, w)| a.apply(v, &f) == *w));
        prop_assert!(g.norm2_sq() == 0.0 || g.degree() <= k);
    }

    #[test]
    fn globalness_is_monotone(dims in prop::sample::select(vec![(2usize, 2usize, 2usize), (2, 2, 3), (3, 2, 2)]), density in 0.05f64..0.6, seed in any::<u64>(), eps in 0.0f64..1.0) {
        let sp = space(dims);
        let g = random_boolean(&sp, density, seed);
        let levels: Vec<f64> = (0..=sp.max_rank()).map(|d| restriction_level(&g, d).unwrap()).collect();
        prop_assert!(levels.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        let cert = certify_restriction_global(&g, 1, eps).unwrap();
        prop_assert!((cert.worst_value - levels[1]).abs() < 1e-12);
        if cert.verdict {
            prop_assert!(certify_restriction_global(&g, 1, eps * 2.0 + 0.01).unwrap().verdict);
        }
    }

    #[test]
    fn cube_parseval_and_laplacian_forms(p in prop::sample::select(vec![2usize, 3, 5]), n in 1usize..=4, seed in any::<u64>(), t in any::<u32>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CubeFunction::<f64>::random(p, n, &mut rng).unwrap();
        let spec = g.transform();
        prop_assert!((spec.norm2_sq() - g.norm2_sq()).abs() <= 1e-9 * g.norm2_sq());
        let t = t & ((1u32 << n) - 1);
        prop_assert!(g.laplacian(t).max_diff(&g.laplacian_probabilistic(t)) < 1e-10);
    }

    #[test]
    fn cube_derivatives_lower_degree(p in prop::sample::select(vec![2usize, 3]), n in 1usize..=4, d in 1usize..=3, seed in any::<u64>(), s in any::<u32>(), code in any::<usize>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CubeFunction::<f64>::random_low_degree(p, n, d.min(n), &mut rng).unwrap();
        let s = s & ((1u32 << n) - 1);
        let k = s.count_ones() as usize;
        let x = digits(p, k, code % p.pow(k as u32));
        let der = g.derivative(s, &x).unwrap();
        if der.norm2_sq() > 1e-20 {
            prop_assert!(der.degree() + k <= g.degree());
        }
    }

    #[test]
    fn cube_restrictions_bounded_by_influences(p in prop::sample::select(vec![2usize, 3]), n in 1usize..=4, seed in any::<u64>(), s in any::<u32>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CubeFunction::<f64>::random(p, n, &mut rng).unwrap();
        let s = s & ((1u32 << n) - 1);
        let rest = g.restriction_norms(s);
        let cs = coords(s, n);
        for (code, r) in rest.iter().enumerate() {
            let x = digits(p, cs.len(), code);
            let best = subsets(s)
                .map(|t| {
                    let xt: Vec<u8> = cs.iter().zip(&x).filter(|(c, _)| t & (1 << **c) != 0).map(|(_, &v)| v).collect();
                    g.influence_at(t, &xt).unwrap()
                })
                .fold(0.0f64, f64::max);
            prop_assert!(*r <= 4f64.powi(cs.len() as i32) * best * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn bonami_for_low_degree_boolean_cube_functions(n in 1usize..=5, d in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = d.min(n);
        let g = CubeFunction::<f64>::random_low_degree(2, n, d, &mut rng).unwrap();
        let n2 = g.norm2_sq();
        prop_assert!(g.norm4_4() <= 9f64.powi(d as i32) * n2 * n2 * (1.0 + 1e-9));
    }

    #[test]
    fn shortcode_spectrum_and_expansion(dims in prop::sample::select(vec![(2usize, 2usize, 2usize), (2, 2, 3), (2, 3, 2), (3, 2, 2), (3, 1, 2), (2, 3, 3)]), density in 0.02f64..0.7, seed in any::<u64>(), r in 1usize..3) {
        let sp = space(dims);
        let graph = ShortcodeGraph::new(sp.clone()).unwrap();
        let h = random_function(&sp, seed);
        prop_assert!(graph.adjacency_apply(&h).max_diff(&graph.adjacency_direct(&h)) < 1e-10);
        let set = random_boolean(&sp, density, seed);
        prop_assume!(set.norm2_sq() > 0.0);
        prop_assert!(graph.spectral_identity_err(&set) < 1e-10);
        let rep = check_sse_theorem(&graph, &set, r.min(sp.max_rank()), 1.0).unwrap();
        prop_assert!(rep.tail.pass && rep.pass);
    }
}

#[test]
fn poset_order_is_transitive_exhaustively() {
    let sp = space((2, 2, 2));
    let f = sp.field();
    let d = sp.duals();
    let le: Vec<Vec<bool>> = d.iter().map(|x| d.iter().map(|y| poset_leq(x, y, f).unwrap()).collect()).collect();
    for a in 0..d.len() {
        for b in 0..d.len() {
            for c in 0..d.len() {
                assert!(!(le[a][b] && le[b][c]) || le[a][c], "{a} ≤ {b} ≤ {c}");
            }
            assert!(!(le[a][b] && le[b][a]) || a == b);
        }
    }
}

#[test]
fn exact_eigenvalues_are_rayleigh_quotients() {
    for dims in [(2, 1, 1), (2, 2, 2), (2, 2, 3), (3, 2, 2), (3, 2, 3), (2, 3, 3)] {
        let graph = ShortcodeGraph::new(space(dims)).unwrap();
        for (a, b) in graph.rayleigh_quotients().iter().zip(graph.eigenvalues()) {
            assert!((a - b).abs() < 1e-12, "{dims:?}: {a} vs {b}");
        }
    }
}
