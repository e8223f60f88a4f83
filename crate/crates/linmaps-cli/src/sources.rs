//! Builtin constructors and file loading for the `--function`/`--set` flags.

use std::sync::Arc;

use linmaps::cube::CubeFunction;
use linmaps::fixtures::{first_dictator, random_boolean, random_half, rank_threshold, sharpness};
use linmaps::io::{cube_from_json, function_from_json};
use linmaps::{MapFunction, Space};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;

/// A resolved map function with the identifier used in reports.
pub struct Source {
    pub id: String,
    pub function: MapFunction<f64>,
}

fn number<T: std::str::FromStr>(text: &str, what: &str) -> Result<T, CliError> {
    text.trim().parse().map_err(|_| CliError::Usage(format!("bad {what} `{text}`")))
}

fn density_seed(args: &str) -> Result<(f64, u64), CliError> {
    let (density, seed) =
        args.split_once(',').ok_or_else(|| CliError::Usage(format!("expected density,seed, got `{args}`")))?;
    let density: f64 = number(density, "density")?;
    if !(0.0..=1.0).contains(&density) {
        return Err(CliError::Usage(format!("density {density} outside [0,1]")));
    }
    Ok((density, number(seed, "seed")?))
}

/// `builtin:sharpness[:d]`, `builtin:rank-threshold:r`, `builtin:random-boolean:density,seed`
/// (also `random:density,seed`), `builtin:random-half:seed`, `builtin:dictator`, or a JSON file.
/// A file brings its own space; builtins use `sp`.
pub fn map_function(spec: &str, sp: &Arc<Space>, default_d: usize) -> Result<Source, CliError> {
    let (name, args) = match spec.strip_prefix("builtin:").or_else(|| spec.starts_with("random:").then_some(spec)) {
        Some(rest) => rest.split_once(':').unwrap_or((rest, "")),
        None => {
            let text = std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
            let function = function_from_json(&text).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
            return Ok(Source { id: spec.to_string(), function });
        }
    };
    let function = match name {
        "sharpness" => {
            let d = if args.is_empty() { default_d } else { number(args.trim_start_matches("d="), "order")? };
            if d > sp.max_rank() {
                return Err(CliError::Usage(format!("sharpness order {d} exceeds max rank {}", sp.max_rank())));
            }
            sharpness(sp, d)
        }
        "rank-threshold" => rank_threshold(sp, number(args, "rank")?),
        "random-boolean" | "random" => {
            let (density, seed) = density_seed(args)?;
            random_boolean(sp, density, seed)
        }
        "random-half" => random_half(sp, number(args, "seed")?),
        "dictator" => first_dictator(sp).map_err(CliError::library)?,
        _ => return Err(CliError::Usage(format!("unknown builtin `{name}`"))),
    };
    let id = if args.is_empty() { name.to_string() } else { format!("{name}:{args}") };
    Ok(Source { id, function })
}

/// `builtin:random-low-degree:seed` (degree `d`), `builtin:dictator`, `builtin:subcube:k`, or a JSON file.
pub fn cube_function(spec: &str, p: usize, n: usize, d: usize) -> Result<CubeFunction<f64>, CliError> {
    let Some(rest) = spec.strip_prefix("builtin:") else {
        let text = std::fs::read_to_string(spec).map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        return cube_from_json(&text).map_err(|e| CliError::Input(format!("{spec}: {e}")));
    };
    let (name, args) = rest.split_once(':').unwrap_or((rest, ""));
    let built = match name {
        "random-low-degree" => {
            let mut rng = ChaCha8Rng::seed_from_u64(number(args, "seed")?);
            CubeFunction::random_low_degree(p, n, d.min(n), &mut rng)
        }
        "dictator" => CubeFunction::indicator(p, n, |x| x[0] == 0),
        "subcube" => {
            let k: usize = number(args, "codimension")?;
            if k > n {
                return Err(CliError::Usage(format!("subcube codimension {k} exceeds n = {n}")));
            }
            CubeFunction::indicator(p, n, |x| x[..k].iter().all(|&c| c == 0))
        }
        _ => return Err(CliError::Usage(format!("unknown cube builtin `{name}`"))),
    };
    built.map_err(|e| CliError::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use linmaps::Field;

    #[test]
    fn builtins_resolve_with_ids() {
        let sp = Space::get(&Field::standard(2).unwrap(), 2, 2);
        let s = map_function("builtin:rank-threshold:1", &sp, 1).unwrap();
        assert_eq!(s.id, "rank-threshold:1");
        assert!((s.function.mean().re - 10.0 / 16.0).abs() < 1e-12);
        assert_eq!(map_function("random:0.25,3", &sp, 1).unwrap().id, "random:0.25,3");
        assert_eq!(map_function("builtin:sharpness", &sp, 2).unwrap().function.degree(), 2);
        assert!(matches!(map_function("builtin:nope", &sp, 1), Err(CliError::Usage(_))));
        assert!(matches!(map_function("builtin:random-boolean:2,1", &sp, 1), Err(CliError::Usage(_))));
        assert!(matches!(map_function("/no/such/file.json", &sp, 1), Err(CliError::Input(_))));
    }

    #[test]
    fn cube_builtins() {
        assert_eq!(cube_function("builtin:subcube:2", 3, 3, 1).unwrap().degree(), 2);
        assert!(cube_function("builtin:random-low-degree:4", 2, 4, 2).unwrap().degree() <= 2);
        assert!(cube_function("builtin:subcube:5", 2, 3, 1).is_err());
    }
}
