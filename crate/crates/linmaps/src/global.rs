//! Restriction-globalness and generalized-influence certificates, their transfer, and the
//! hypercontractive and level-d inequalities on L(V,W).

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::usable_directions;
use crate::fourier::{FourierError, MapFunction, RestrictionTriple};
use crate::laplacians::{derivative, tee_operator, LaplacianSpec};
use crate::linalg::{Mat, Subspace};
use crate::report::{InequalityReport, IDENTITY_TOL};
use crate::scalar::{to_f64, Scalar};
use crate::space::Space;

#[derive(Debug, Error)]
pub enum GlobalError {
    #[error("contract: {0}")]
    Contract(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

fn qpow(q: usize, e: f64) -> f64 {
    (q as f64).powf(e)
}

/// log_q(ratio)/d², or None when undefined.
fn exponent(q: usize, ratio: f64, d: usize) -> Option<f64> {
    (d >= 1 && ratio > 0.0 && ratio.is_finite()).then(|| ratio.ln() / (q as f64).ln() / (d * d) as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleRecord {
    pub v1: String,
    pub w1: String,
    pub t: String,
    pub order: usize,
}

impl TripleRecord {
    fn new(v1: &Subspace, w1: &Subspace, t: &Mat) -> Self {
        TripleRecord {
            v1: format!("{:?}", v1.basis()),
            w1: format!("{:?}", w1.basis()),
            t: format!("{t:?}"),
            order: v1.dim() + w1.codim(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalnessCertificate {
    pub d: usize,
    pub epsilon: f64,
    pub worst_value: f64,
    pub worst_triple: Option<TripleRecord>,
    pub triples_checked: usize,
    pub verdict: bool,
}

/// Per-slice values for one pair (V₁, W₁), indexed by coset label.
struct PairValues {
    v1: usize,
    w1: usize,
    values: Vec<f64>,
}

/// Mean of |g|² over every slice of the pair.
fn slice_norms<T: Scalar>(g: &MapFunction<T>, v1: usize, w1: usize) -> Vec<f64> {
    let cosets = g.space().cosets(v1, w1);
    let mut sums = vec![0.0; cosets.count];
    for (&label, v) in cosets.labels.iter().zip(g.values()) {
        sums[label as usize] += to_f64(v.norm_sqr());
    }
    let per = (g.len() / cosets.count) as f64;
    sums.iter().map(|s| s / per).collect()
}

fn pairs_up_to(sp: &Space, d: usize) -> Vec<(usize, usize)> {
    (0..=d.min(sp.dim_v() + sp.dim_w())).flat_map(|k| sp.pairs_of_order(k)).collect()
}

fn scan(
    sp: &Space,
    d: usize,
    per_pair: impl Fn(usize, usize) -> Result<Vec<f64>, FourierError> + Sync,
) -> Result<Vec<PairValues>, FourierError> {
    pairs_up_to(sp, d).into_par_iter().map(|(v1, w1)| Ok(PairValues { v1, w1, values: per_pair(v1, w1)? })).collect()
}

/// Max over the scan; ties go to the earliest (order, V₁, W₁, T) in enumeration order.
fn certificate(sp: &Space, scanned: &[PairValues], d: usize, epsilon: f64) -> GlobalnessCertificate {
    let mut worst: Option<(f64, usize, usize, usize)> = None;
    for pv in scanned {
        for (label, &v) in pv.values.iter().enumerate() {
            if worst.is_none_or(|w| v > w.0) {
                worst = Some((v, pv.v1, pv.w1, label));
            }
        }
    }
    let triples_checked = scanned.iter().map(|p| p.values.len()).sum();
    let (worst_value, worst_triple) = match worst {
        Some((v, v1, w1, label)) => {
            let rep = sp.cosets(v1, w1).representatives[label] as usize;
            (v, Some(TripleRecord::new(sp.v_lattice().get(v1), sp.w_lattice().get(w1), &sp.decode(rep))))
        }
        None => (0.0, None),
    };
    let verdict = worst_value <= epsilon * (1.0 + InequalityReport::SLACK) + InequalityReport::SLACK;
    GlobalnessCertificate { d, epsilon, worst_value, worst_triple, triples_checked, verdict }
}

/// Exact max of ‖f_{(V₁,W₁)→T}‖₂² over every triple of order at most `d`.
pub fn certify_restriction_global<T: Scalar>(
    f: &MapFunction<T>,
    d: usize,
    epsilon: f64,
) -> Result<GlobalnessCertificate, FourierError> {
    let scanned = scan(f.space(), d, |v1, w1| Ok(slice_norms(f, v1, w1)))?;
    Ok(certificate(f.space(), &scanned, d, epsilon))
}

fn influence_scan<T: Scalar>(f: &MapFunction<T>, d: usize) -> Result<Vec<PairValues>, FourierError> {
    let sp = f.space();
    let spec = f.transform();
    scan(sp, d, |v1, w1| {
        let mask = sp.hybrid_mask(v1, w1);
        Ok(slice_norms(&spec.masked(|i| mask[i]).inverse(), v1, w1))
    })
}

/// Exact max of I_{V₁,W₁,T}[f] over every triple of order at most `d`.
pub fn certify_influences<T: Scalar>(
    f: &MapFunction<T>,
    d: usize,
    epsilon: f64,
) -> Result<GlobalnessCertificate, FourierError> {
    let scanned = influence_scan(f, d)?;
    Ok(certificate(f.space(), &scanned, d, epsilon))
}

pub fn restriction_level<T: Scalar>(f: &MapFunction<T>, d: usize) -> Result<f64, FourierError> {
    Ok(certify_restriction_global(f, d, f64::INFINITY)?.worst_value)
}

pub fn influence_level<T: Scalar>(f: &MapFunction<T>, d: usize) -> Result<f64, FourierError> {
    Ok(certify_influences(f, d, f64::INFINITY)?.worst_value)
}

/// Σ over pairs of order at most `d` of E_T[I_{V₁,W₁,T}[f]²].
pub fn influence_square_sum<T: Scalar>(f: &MapFunction<T>, d: usize) -> Result<f64, FourierError> {
    Ok(influence_scan(f, d)?.iter().map(|p| p.values.iter().map(|v| v * v).sum::<f64>() / p.values.len() as f64).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub d: usize,
    /// Exact restriction-globalness level of f at order d.
    pub epsilon: f64,
    /// Max I_{V₁,W₁,T}[f^{=d}] over triples of order at most d.
    pub max_influence: f64,
    pub bound: f64,
    pub observed_constant: f64,
    /// Max I_{V₁,W₁,T}[f^{≤d}] against q^{12d²}ε.
    pub truncation: InequalityReport,
    pub pass: bool,
}

pub fn check_globalness_transfer(f: &MapFunction<f64>, d: usize) -> Result<TransferReport, FourierError> {
    let q = f.space().q();
    let epsilon = restriction_level(f, d)?;
    let max_influence = influence_level(&f.level(d), d)?;
    let bound = qpow(q, 10.0 * (d * d) as f64) * epsilon;
    let observed_constant = if epsilon > 0.0 { max_influence / epsilon } else { 0.0 };
    let truncation = InequalityReport::new(influence_level(&f.upto(d), d)?, qpow(q, 12.0 * (d * d) as f64) * epsilon);
    let pass = InequalityReport::new(max_influence, bound).pass && truncation.pass;
    Ok(TransferReport { d, epsilon, max_influence, bound, observed_constant, truncation, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepReport {
    pub d: usize,
    pub epsilon: f64,
    pub directions: usize,
    /// Max distance between (f')^{=d−1} and D_{U,0}[f^{=d}].
    pub identity_err: f64,
    /// Max over directions of the order-(d−1) level of f' divided by ε.
    pub observed_constant: f64,
    pub bound: f64,
    pub pass: bool,
}

/// For every order-one direction U, f' = (𝒯_{d,U} f)_{U→0} has (f')^{=d−1} = D_{U,0}[f^{=d}]
/// and is (d−1, 4q^{4d}ε)-restriction global.
pub fn check_order_one_step(f: &MapFunction<f64>, d: usize) -> Result<StepReport, GlobalError> {
    if d == 0 {
        return Err(GlobalError::Contract("order-one steps need d ≥ 1".into()));
    }
    let sp = f.space();
    let epsilon = restriction_level(f, d)?;
    let bound = 4.0 * qpow(sp.q(), 4.0 * d as f64);
    let dirs = usable_directions(sp);
    let zero = Mat::zeros(sp.dim_w(), sp.dim_v());
    let top = f.level(d);
    let per_dir: Vec<(f64, f64)> = dirs
        .par_iter()
        .map(|dir| {
            let (v1, w1) = dir.pair(sp);
            let shifted =
                tee_operator(f, d, dir)?.restrict(&RestrictionTriple::new(v1.clone(), w1.clone(), zero.clone())?)?;
            let err = shifted.level(d - 1).max_diff(&derivative(&top, &v1, &w1, &zero)?);
            Ok((err, restriction_level(&shifted, d - 1)?))
        })
        .collect::<Result<_, FourierError>>()?;
    let identity_err = per_dir.iter().map(|p| p.0).fold(0.0, f64::max);
    let worst_level = per_dir.iter().map(|p| p.1).fold(0.0, f64::max);
    let observed_constant = if epsilon > 0.0 { worst_level / epsilon } else { 0.0 };
    let pass = identity_err <= IDENTITY_TOL && InequalityReport::new(worst_level, bound * epsilon).pass;
    Ok(StepReport { d, epsilon, directions: dirs.len(), identity_err, observed_constant, bound, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypReport {
    pub d: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    /// Σ_{(V₁,W₁)} E_T[I²] over pairs of order at most d.
    pub influence_sum: f64,
    /// lhs / influence_sum.
    pub observed_constant: f64,
    /// log_q(observed_constant)/d².
    pub observed_exponent: Option<f64>,
    /// ‖f‖₄⁴/162 against q^{3d²}‖f‖₂⁴ + Σ_{(V₁,W₁)≠(0,W)} q^{7d(dim V₁ + codim W₁)}‖L_{V₁}L_{W₁} f‖₄⁴.
    pub degree_reduction: InequalityReport,
    /// Σ_X q^{−4d rank X}‖L_X f‖₂² against 2‖f‖₂².
    pub poset_derivatives: InequalityReport,
    pub pass: bool,
}

fn require_degree(f: &MapFunction<f64>, d: usize) -> Result<(), GlobalError> {
    let deg = f.degree();
    if deg > d {
        return Err(GlobalError::Contract(format!("degree {deg} exceeds {d}")));
    }
    Ok(())
}

pub fn check_bilinear_hypercontractivity(f: &MapFunction<f64>, d: usize) -> Result<HypReport, GlobalError> {
    require_degree(f, d)?;
    let sp = f.space();
    let q = sp.q();
    let lhs = f.norm4_4();
    let influence_sum = influence_square_sum(f, d)?;
    let main = InequalityReport::new(lhs, qpow(q, 100.0 * (d * d) as f64) * influence_sum);
    let observed_constant = if influence_sum > 0.0 { lhs / influence_sum } else { 0.0 };
    let norm2 = f.norm2_sq();
    let spec = f.transform();

    let pairs: Vec<(Subspace, Subspace)> = sp
        .v_lattice()
        .iter()
        .flat_map(|(_, v1)| sp.w_lattice().iter().map(move |(_, w1)| (v1.clone(), w1.clone())))
        .filter(|(v1, w1)| v1.dim() + w1.codim() > 0)
        .collect();
    let reduction_terms: f64 = pairs
        .par_iter()
        .map(|(v1, w1)| {
            let mv = LaplacianSpec::SubspaceV(v1.clone()).mask(sp)?;
            let mw = LaplacianSpec::SubspaceW(w1.clone()).mask(sp)?;
            let g = spec.masked(|i| mv[i] && mw[i]).inverse();
            Ok(qpow(q, 7.0 * (d * (v1.dim() + w1.codim())) as f64) * g.norm4_4())
        })
        .collect::<Result<Vec<f64>, FourierError>>()?
        .iter()
        .sum();
    let degree_reduction =
        InequalityReport::new(lhs / 162.0, qpow(q, 3.0 * (d * d) as f64) * norm2 * norm2 + reduction_terms);

    let poset_sum: f64 = spec
        .coeffs()
        .iter()
        .zip(sp.down_rank_counts())
        .map(|(c, counts)| {
            let weight: f64 = counts.iter().enumerate().map(|(k, &n)| n as f64 * qpow(q, -4.0 * (d * k) as f64)).sum();
            c.norm_sqr() * weight
        })
        .sum();
    let poset_derivatives = InequalityReport::new(poset_sum, 2.0 * norm2);

    let pass = main.pass && degree_reduction.pass && poset_derivatives.pass;
    Ok(HypReport {
        d,
        lhs,
        rhs: main.rhs,
        ratio: main.ratio,
        influence_sum,
        observed_constant,
        observed_exponent: exponent(q, observed_constant, d),
        degree_reduction,
        poset_derivatives,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalBonamiReport {
    pub d: usize,
    pub epsilon: f64,
    /// The supplied ε is at least the exact restriction-globalness level.
    pub hypothesis: bool,
    /// ‖f^{≤d}‖₄⁴ against q^{115d²}ε‖f^{≤d}‖₂².
    pub restriction_global: InequalityReport,
    /// log_q(‖f^{≤d}‖₄⁴ / (ε‖f^{≤d}‖₂²))/d².
    pub observed_exponent: Option<f64>,
    /// max I[f^{≤d}] against q^{12d²}ε.
    pub truncation: InequalityReport,
    /// ‖f^{≤d}‖₄⁴ against q^{103d²}·(max I[f^{≤d}])·‖f^{≤d}‖₂².
    pub small_influences: InequalityReport,
    pub pass: bool,
}

fn resolve_epsilon(level: f64, supplied: Option<f64>) -> (f64, bool) {
    match supplied {
        Some(e) => (e.max(level), level <= e * (1.0 + InequalityReport::SLACK) + InequalityReport::SLACK),
        None => (level, true),
    }
}

pub fn check_restriction_global_bonami(
    f: &MapFunction<f64>,
    d: usize,
    epsilon: Option<f64>,
) -> Result<GlobalBonamiReport, FourierError> {
    let q = f.space().q();
    let (epsilon, hypothesis) = resolve_epsilon(restriction_level(f, d)?, epsilon);
    let low = f.upto(d);
    let (n4, n2) = (low.norm4_4(), low.norm2_sq());
    let dd = (d * d) as f64;
    let restriction_global = InequalityReport::new(n4, qpow(q, 115.0 * dd) * epsilon * n2);
    let infl = influence_level(&low, d)?;
    let truncation = InequalityReport::new(infl, qpow(q, 12.0 * dd) * epsilon);
    let small_influences = InequalityReport::new(n4, qpow(q, 103.0 * dd) * infl * n2);
    let observed = if epsilon > 0.0 && n2 > 0.0 { n4 / (epsilon * n2) } else { 0.0 };
    let pass = restriction_global.pass && truncation.pass && small_influences.pass;
    Ok(GlobalBonamiReport {
        d,
        epsilon,
        hypothesis,
        restriction_global,
        observed_exponent: exponent(q, observed, d),
        truncation,
        small_influences,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub d: usize,
    pub epsilon: f64,
    pub hypothesis: bool,
    /// ‖f^{=i}‖₂² for i = 0..=min(dim V, dim W).
    pub mass_profile: Vec<f64>,
    /// ‖f^{=d}‖₂² against q^{30d²}ε^{1/4}‖f‖₂².
    pub inequality: InequalityReport,
    pub pass: bool,
}

pub fn check_level_d(f: &MapFunction<f64>, d: usize, epsilon: Option<f64>) -> Result<LevelReport, GlobalError> {
    if !f.is_boolean() {
        return Err(GlobalError::Contract("the level-d inequality needs a 0/1 function".into()));
    }
    let q = f.space().q();
    let (epsilon, hypothesis) = resolve_epsilon(restriction_level(f, d)?, epsilon);
    let mass_profile = f.transform().rank_mass();
    let top = mass_profile.get(d).copied().unwrap_or(0.0);
    let inequality = InequalityReport::new(top, qpow(q, 30.0 * (d * d) as f64) * epsilon.powf(0.25) * f.norm2_sq());
    let pass = inequality.pass;
    Ok(LevelReport { d, epsilon, hypothesis, mass_profile, inequality, pass })
}

/// Every check on one function at order `d`: transfer, order-one steps, hypercontractivity
/// of f^{≤d}, the restriction-global Bonami bound and, for 0/1 functions, the level-d inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BatteryReport {
    pub transfer: TransferReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<StepReport>,
    pub hypercontractivity: HypReport,
    pub bonami: GlobalBonamiReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<LevelReport>,
    pub pass: bool,
}

pub fn run_battery(f: &MapFunction<f64>, d: usize) -> Result<BatteryReport, GlobalError> {
    let transfer = check_globalness_transfer(f, d)?;
    let step = if d >= 1 { Some(check_order_one_step(f, d)?) } else { None };
    let hypercontractivity = check_bilinear_hypercontractivity(&f.upto(d), d)?;
    let bonami = check_restriction_global_bonami(f, d, None)?;
    let level = if f.is_boolean() { Some(check_level_d(f, d, None)?) } else { None };
    let pass = transfer.pass
        && step.as_ref().is_none_or(|s| s.pass)
        && hypercontractivity.pass
        && bonami.pass
        && level.as_ref().is_none_or(|l| l.pass);
    Ok(BatteryReport { transfer, step, hypercontractivity, bonami, level, pass })
}

/// Observed exponent of the sharpness family at order `d`.
pub fn sharpness_exponent(sp: &Arc<Space>, d: usize) -> Result<Option<f64>, GlobalError> {
    Ok(check_bilinear_hypercontractivity(&crate::fixtures::sharpness(sp, d), d)?.observed_exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::fixtures::{first_dictator, random_boolean, rank_threshold, sharpness};
    use crate::laplacians::influence;
    use num_complex::Complex;

    fn space22() -> Arc<Space> {
        Space::get(&Field::standard(2).unwrap(), 2, 2)
    }

    #[test]
    fn constant_and_dictator_certificates() {
        let sp = space22();
        let one = MapFunction::<f64>::constant(sp.clone(), Complex::new(1.0, 0.0));
        let c = certify_restriction_global(&one, 2, 1.0).unwrap();
        assert!((c.worst_value - 1.0).abs() < 1e-12 && c.verdict);
        assert_eq!(c.worst_triple.unwrap().order, 0);
        for pv in influence_scan(&one, 2).unwrap() {
            let order = sp.v_lattice().get(pv.v1).dim() + sp.w_lattice().get(pv.w1).codim();
            let want = if order == 0 { 1.0 } else { 0.0 };
            assert!(pv.values.iter().all(|v| (v - want).abs() < 1e-12));
        }
        let dict = first_dictator(&sp).unwrap();
        let c = certify_restriction_global(&dict, 1, 0.5).unwrap();
        assert!((c.worst_value - 1.0).abs() < 1e-12 && !c.verdict);
    }

    #[test]
    fn influences_match_direct_definition() {
        let sp = space22();
        let g = random_boolean(&sp, 0.4, 11);
        let cert = certify_influences(&g, 2, f64::INFINITY).unwrap();
        let mut direct = 0.0f64;
        for (v1, w1) in pairs_up_to(&sp, 2) {
            let (v1, w1) = (sp.v_lattice().get(v1).clone(), sp.w_lattice().get(w1).clone());
            for t in sp.maps() {
                direct = direct.max(influence(&g, &v1, &w1, t).unwrap());
            }
        }
        assert!((cert.worst_value - direct).abs() < 1e-12);
        let u = MapFunction::<f64>::character(sp.clone(), &sp.decode_dual(5)).unwrap();
        for pv in influence_scan(&u, 4).unwrap() {
            assert!(pv.values.iter().all(|&v| v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn restriction_levels_match_direct_restrictions() {
        let sp = space22();
        let g = random_boolean(&sp, 0.5, 4);
        let mut direct = 0.0f64;
        for (v1, w1) in pairs_up_to(&sp, 2) {
            let (v1, w1) = (sp.v_lattice().get(v1).clone(), sp.w_lattice().get(w1).clone());
            for t in sp.maps() {
                let r = g.restrict(&RestrictionTriple::new(v1.clone(), w1.clone(), t.clone()).unwrap()).unwrap();
                direct = direct.max(r.norm2_sq());
            }
        }
        assert!((restriction_level(&g, 2).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn transfer_and_steps_on_fixtures() {
        let sp = space22();
        let dict = first_dictator(&sp).unwrap();
        let r = check_globalness_transfer(&dict, 1).unwrap();
        assert!(r.pass && r.observed_constant <= 1024.0);
        for seed in 0..20 {
            let g = random_boolean(&sp, 0.5, seed);
            for d in 1..=2 {
                assert!(check_globalness_transfer(&g, d).unwrap().pass);
                assert!(check_order_one_step(&g, d).unwrap().pass);
            }
        }
    }

    #[test]
    fn hypercontractivity_on_characters_and_constants() {
        let sp = space22();
        let x = sp.duals().iter().position(|x| x.rank(sp.field()) == 2).unwrap();
        let u = MapFunction::<f64>::character(sp.clone(), &sp.decode_dual(x)).unwrap();
        let r = check_bilinear_hypercontractivity(&u, 2).unwrap();
        assert!(r.pass && (r.lhs - 1.0).abs() < 1e-12 && r.influence_sum >= 1.0);
        let one = MapFunction::<f64>::constant(sp.clone(), Complex::new(1.0, 0.0));
        let r = check_bilinear_hypercontractivity(&one, 0).unwrap();
        assert!(r.pass && (r.influence_sum - 1.0).abs() < 1e-12);
        assert!(matches!(check_bilinear_hypercontractivity(&u, 1), Err(GlobalError::Contract(_))));
        let s = check_bilinear_hypercontractivity(&sharpness(&sp, 1), 1).unwrap();
        assert!(s.pass && s.observed_exponent.is_some());
    }

    #[test]
    fn level_d_and_bonami() {
        let sp = space22();
        let zero = MapFunction::<f64>::zeros(sp.clone());
        let r = check_level_d(&zero, 1, None).unwrap();
        assert!(r.pass && r.inequality.lhs == 0.0);
        let thr = rank_threshold(&sp, 1);
        let r = check_level_d(&thr, 2, None).unwrap();
        assert!(r.pass && (r.mass_profile.iter().sum::<f64>() - thr.norm2_sq()).abs() < 1e-12);
        let b = check_restriction_global_bonami(&thr, 1, None).unwrap();
        assert!(b.pass && b.hypothesis);
        assert!(!check_restriction_global_bonami(&thr, 1, Some(1e-3)).unwrap().hypothesis);
        assert!(matches!(check_level_d(&sharpness(&sp, 1), 1, None), Err(GlobalError::Contract(_))));
    }
}
