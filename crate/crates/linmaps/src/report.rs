//! Report records shared by the verification sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::space::Space;

/// Identities are checked coefficientwise against this tolerance.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Instance budget below which a sweep is run exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub lemma_id: String,
    pub instances_checked: usize,
    pub max_err: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_instance: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every configuration; shifts and random inputs drawn from the seed.
    Exhaustive {
        seed: u64,
    },
    Sampled {
        count: usize,
        seed: u64,
    },
}

impl Coverage {
    /// Exhaustive on spaces of at most 16 maps, sampled otherwise.
    pub fn auto(sp: &Space, samples: usize, seed: u64) -> Self {
        if sp.len() <= 16 {
            Coverage::Exhaustive { seed }
        } else {
            Coverage::Sampled { count: samples, seed }
        }
    }

    pub fn seed(&self) -> u64 {
        match *self {
            Coverage::Exhaustive { seed } | Coverage::Sampled { seed, .. } => seed,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed())
    }
}

/// Runs `check` over the instances selected by `coverage` and folds the worst error.
pub(crate) fn sweep<I, E>(
    lemma_id: &str,
    coverage: &Coverage,
    tol: f64,
    all: impl FnOnce(&mut ChaCha8Rng) -> Vec<I>,
    sample: impl Fn(&mut ChaCha8Rng) -> I,
    check: impl Fn(&I) -> Result<f64, E> + Sync,
) -> Result<IdentityReport, E>
where
    I: Send + Sync + std::fmt::Debug,
    E: Send,
{
    let mut rng = coverage.rng();
    let instances: Vec<I> = match *coverage {
        Coverage::Exhaustive { .. } => all(&mut rng),
        Coverage::Sampled { count, .. } => (0..count).map(|_| sample(&mut rng)).collect(),
    };
    let errs: Vec<f64> = instances.par_iter().map(&check).collect::<Result<_, E>>()?;
    let (worst_at, max_err) =
        errs.iter()
            .enumerate()
            .fold((None, 0.0f64), |(at, m), (i, &e)| if e > m || e.is_nan() { (Some(i), e) } else { (at, m) });
    let pass = max_err <= tol && !max_err.is_nan();
    Ok(IdentityReport {
        lemma_id: lemma_id.to_string(),
        instances_checked: instances.len(),
        max_err,
        pass,
        seed: Some(coverage.seed()),
        failing_instance: if pass { None } else { worst_at.map(|i| format!("{:?}", instances[i])) },
    })
}

/// One-sided inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl InequalityReport {
    /// Relative slack absorbing roundoff on exactly tight cases.
    pub const SLACK: f64 = 1e-9;

    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs <= Self::SLACK {
            0.0
        } else {
            f64::INFINITY
        };
        let pass = lhs <= rhs * (1.0 + Self::SLACK) + Self::SLACK;
        InequalityReport { lhs, rhs, ratio, pass }
    }
}

/// Field orders allowed by the desk profile.
pub const DESK_FIELDS: [usize; 2] = [2, 3];

/// Desk-profile dimension pairs (dim V, dim W): up to 3×3 for spectral work, and at most six
/// matrix entries for quadratic-time direct computations.
pub fn desk_dims(direct: bool) -> Vec<(usize, usize)> {
    (1..=3).flat_map(|n| (1..=3).map(move |m| (n, m))).filter(|&(n, m)| !direct || n * m <= 6).collect()
}

pub fn in_desk_profile(q: usize, dim_v: usize, dim_w: usize, direct: bool) -> bool {
    DESK_FIELDS.contains(&q) && desk_dims(direct).contains(&(dim_v, dim_w))
}
