//! The shortcode graph on L(V,W): rank-one Cayley adjacency, its spectrum, stay probabilities
//! of vertex sets and the small-set expansion checks.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fixtures::{first_dictator, random_boolean, rank_threshold};
use crate::fourier::{FourierError, MapFunction, Spectrum};
use crate::global::restriction_level;
use crate::report::InequalityReport;
use crate::space::Space;

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

/// Spaces up to this many maps use direct rank-one averaging for stay probabilities.
pub const DIRECT_LIMIT: usize = 1 << 12;

pub struct ShortcodeGraph {
    space: Arc<Space>,
    rank_one: Vec<u32>,
    eigenvalues: Vec<f64>,
    closed_form: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl std::fmt::Debug for ShortcodeGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ShortcodeGraph")
            .field("space", &self.space)
            .field("rank1_count", &self.rank_one.len())
            .field("eigenvalues", &self.eigenvalues)
            .finish()
    }
}

/// (q^{−d} − 1/|W|)/(1 − 1/|W|).
pub fn closed_form_eigenvalue(q: usize, dim_w: usize, d: usize) -> f64 {
    let inv_w = (q as f64).powi(-(dim_w as i32));
    ((q as f64).powi(-(d as i32)) - inv_w) / (1.0 - inv_w)
}

/// Eigenvalue on rank-d characters: (Pr[Im X ⊆ V'] − 1/|W|)/(1 − 1/|W|) over hyperplanes V' of V.
pub fn exact_eigenvalue(q: usize, dim_v: usize, dim_w: usize, d: usize) -> f64 {
    let qf = q as f64;
    let contain = (qf.powi((dim_v - d) as i32) - 1.0) / (qf.powi(dim_v as i32) - 1.0);
    let inv_w = qf.powi(-(dim_w as i32));
    (contain - inv_w) / (1.0 - inv_w)
}

impl ShortcodeGraph {
    pub fn new(space: Arc<Space>) -> Result<Self, ExpansionError> {
        if space.dim_v() == 0 || space.dim_w() == 0 {
            return Err(ExpansionError::Domain("the shortcode graph needs dim V, dim W ≥ 1".into()));
        }
        let f = space.field().clone();
        let rank_one =
            space.maps().iter().enumerate().filter(|(_, a)| a.rank(&f) == 1).map(|(i, _)| i as u32).collect();
        let top = space.max_rank();
        let (q, n, m) = (space.q(), space.dim_v(), space.dim_w());
        let eigenvalues = (0..=top).map(|d| exact_eigenvalue(q, n, m, d)).collect();
        let closed_form = (0..=top).map(|d| closed_form_eigenvalue(q, m, d)).collect();
        let mut multiplicities = vec![0; top + 1];
        for &r in space.dual_ranks() {
            multiplicities[r as usize] += 1;
        }
        Ok(ShortcodeGraph { space, rank_one, eigenvalues, closed_form, multiplicities })
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn rank1_count(&self) -> usize {
        self.rank_one.len()
    }

    /// (q^n − 1)(q^m − 1)/(q − 1).
    pub fn rank1_formula(&self) -> usize {
        let q = self.space.q();
        (q.pow(self.space.dim_v() as u32) - 1) * (q.pow(self.space.dim_w() as u32) - 1) / (q - 1)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn closed_form(&self) -> &[f64] {
        &self.closed_form
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// T f = Σ_X λ_{rank X} f̂(X) u_X.
    pub fn adjacency_apply(&self, g: &MapFunction<f64>) -> MapFunction<f64> {
        let ranks = self.space.dual_ranks();
        let spec = g.transform();
        let coeffs = spec.coeffs().iter().zip(ranks).map(|(&c, &r)| c * self.eigenvalues[r as usize]).collect();
        Spectrum::new(self.space.clone(), coeffs).expect("length matches").inverse()
    }

    /// T f(A) = E_{rank B = 1} f(A + B).
    pub fn adjacency_direct(&self, g: &MapFunction<f64>) -> MapFunction<f64> {
        let sp = &self.space;
        let scale = 1.0 / self.rank_one.len() as f64;
        let vals = g.values();
        let out: Vec<Complex<f64>> = (0..sp.len())
            .into_par_iter()
            .map(|a| self.rank_one.iter().map(|&b| vals[sp.add_index(a, b as usize)]).sum::<Complex<f64>>() * scale)
            .collect();
        MapFunction::new(sp.clone(), out).expect("length matches")
    }

    /// ⟨T u_X, u_X⟩ by direct averaging, for one character of each rank.
    pub fn rayleigh_quotients(&self) -> Vec<f64> {
        let ranks = self.space.dual_ranks();
        (0..self.eigenvalues.len())
            .map(|d| {
                let x = ranks.iter().position(|&r| r as usize == d).expect("every rank occurs");
                let u = MapFunction::<f64>::character(self.space.clone(), &self.space.decode_dual(x)).expect("shape");
                self.adjacency_direct(&u).inner(&u).re
            })
            .collect()
    }

    fn stay_mass(&self, set: &MapFunction<f64>) -> f64 {
        let t = if self.space.len() <= DIRECT_LIMIT { self.adjacency_direct(set) } else { self.adjacency_apply(set) };
        t.inner(set).re
    }

    /// Pr_{A∼S, rank B = 1}[A + B ∈ S].
    pub fn expansion_probability(&self, set: &MapFunction<f64>) -> Result<f64, ExpansionError> {
        let mass = check_set(set)?;
        Ok(self.stay_mass(set) / mass)
    }

    /// |⟨T 1_S, 1_S⟩ − Σ_d λ_d ‖1_S^{=d}‖₂²| with the left side from direct averaging.
    pub fn spectral_identity_err(&self, set: &MapFunction<f64>) -> f64 {
        let lhs = self.adjacency_direct(set).inner(set).re;
        let rhs: f64 = set.transform().rank_mass().iter().zip(&self.eigenvalues).map(|(m, l)| m * l).sum();
        (lhs - rhs).abs()
    }
}

fn check_set(set: &MapFunction<f64>) -> Result<f64, ExpansionError> {
    if !set.is_boolean() {
        return Err(ExpansionError::Domain("vertex sets are 0/1 functions".into()));
    }
    let mass = set.norm2_sq();
    if mass == 0.0 {
        return Err(ExpansionError::Domain("empty vertex set".into()));
    }
    Ok(mass)
}

/// Quotes a CSV field holding a comma or quote.
fn csv_field(text: &str) -> std::borrow::Cow<'_, str> {
    if text.contains([',', '"']) {
        format!("\"{}\"", text.replace('"', "\"\"")).into()
    } else {
        text.into()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SseReport {
    pub q: usize,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub c0: f64,
    pub globalness_order: usize,
    pub globalness_level: f64,
    /// q^{−C₀r²}.
    pub threshold: f64,
    pub hypothesis: bool,
    pub stay_probability: f64,
    /// q^{−r}.
    pub bound: f64,
    /// Stay probability below the bound; only asserted when the hypothesis holds.
    pub conclusion: Option<bool>,
    pub level_masses: Vec<f64>,
    pub spectral_identity_err: f64,
    /// Σ_{d ≥ r+2} λ_d‖1_S^{=d}‖₂² against q^{−r}‖1_S‖₂²/2.
    pub tail: InequalityReport,
    pub pass: bool,
}

impl SseReport {
    pub const CSV_HEADER: &'static str = "q,n,m,set_id,globalness_order,globalness_level,stay_prob,bound";

    pub fn csv_row(&self, set_id: &str) -> String {
        format!(
            "{},{},{},{},{},{:.12e},{:.12e},{:.12e}",
            self.q,
            self.n,
            self.m,
            csv_field(set_id),
            self.globalness_order,
            self.globalness_level,
            self.stay_probability,
            self.bound
        )
    }
}

/// Spectral identity tolerance for the stay mass.
pub const SPECTRAL_TOL: f64 = 1e-10;

pub fn check_sse_theorem(
    graph: &ShortcodeGraph,
    set: &MapFunction<f64>,
    r: usize,
    c0: f64,
) -> Result<SseReport, ExpansionError> {
    if r == 0 {
        return Err(ExpansionError::Domain("r must be at least 1".into()));
    }
    let mass = check_set(set)?;
    let sp = graph.space();
    let q = sp.q() as f64;
    let globalness_level = restriction_level(set, r + 1)?;
    let threshold = q.powf(-c0 * (r * r) as f64);
    let hypothesis = globalness_level <= threshold;
    let stay_probability = graph.stay_mass(set) / mass;
    let bound = q.powi(-(r as i32));
    let conclusion = hypothesis.then_some(stay_probability < bound);
    let level_masses = set.transform().rank_mass();
    let tail_mass: f64 = level_masses.iter().zip(graph.eigenvalues()).skip(r + 2).map(|(m, l)| m * l).sum();
    let tail = InequalityReport::new(tail_mass, bound / 2.0 * mass);
    let spectral_identity_err = graph.spectral_identity_err(set);
    let pass = conclusion != Some(false) && tail.pass && spectral_identity_err <= SPECTRAL_TOL;
    Ok(SseReport {
        q: sp.q(),
        n: sp.dim_v(),
        m: sp.dim_w(),
        r,
        c0,
        globalness_order: r + 1,
        globalness_level,
        threshold,
        hypothesis,
        stay_probability,
        bound,
        conclusion,
        level_masses,
        spectral_identity_err,
        tail,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub q: usize,
    pub n: usize,
    pub m: usize,
    pub set_id: String,
    pub globalness_order: usize,
    pub globalness_level: f64,
    pub stay_prob: f64,
    /// The set meets the globalness hypothesis yet stays with probability at least η.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub eta: f64,
    pub order: usize,
    pub delta: f64,
    pub rows: Vec<ScanRow>,
    pub flagged: usize,
    pub pass: bool,
}

/// Structured and random vertex sets of one space, with identifiers.
pub fn scan_family(sp: &Arc<Space>, seed: u64) -> Result<Vec<(String, MapFunction<f64>)>, FourierError> {
    let mut sets = Vec::new();
    for r in 0..sp.max_rank() {
        sets.push((format!("rank-threshold:{r}"), rank_threshold(sp, r)));
    }
    sets.push(("dictator-slab".to_string(), first_dictator(sp)?));
    for (k, density) in [1.0 / 16.0, 0.25, 0.5].into_iter().enumerate() {
        for s in 0..4u64 {
            let set_seed = seed.wrapping_add(100 * k as u64 + s);
            let g = random_boolean(sp, density, set_seed);
            if g.norm2_sq() > 0.0 {
                sets.push((format!("random:{density},{set_seed}"), g));
            }
        }
    }
    Ok(sets)
}

/// Flags every (order, δ)-restriction global set in the family whose stay probability is at least η.
pub fn inverse_shortcode_scan(
    eta: f64,
    order: usize,
    delta: f64,
    dims: &[(usize, usize)],
    seed: u64,
) -> Result<ScanReport, ExpansionError> {
    let field = crate::field::Field::standard(2).expect("F_2 exists");
    let mut rows = Vec::new();
    for &(n, m) in dims {
        let sp = Space::get(&field, n, m);
        let graph = ShortcodeGraph::new(sp.clone())?;
        for (id, set) in scan_family(&sp, seed)? {
            let level = restriction_level(&set, order)?;
            let stay = graph.expansion_probability(&set)?;
            let flagged = level <= delta && stay >= eta;
            rows.push(ScanRow {
                q: 2,
                n,
                m,
                set_id: id,
                globalness_order: order,
                globalness_level: level,
                stay_prob: stay,
                flagged,
            });
        }
    }
    let flagged = rows.iter().filter(|r| r.flagged).count();
    Ok(ScanReport { eta, order, delta, rows, flagged, pass: flagged == 0 })
}
