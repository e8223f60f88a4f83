//! JSON files for functions, spectra and cube functions.
//!
//! Map functions carry a header {q, n, m, orientation} where n = dim V, m = dim W and values are
//! listed in map-index order as [re, im] pairs. `orientation` tells a function on L(V,W) apart
//! from a spectrum on L(W,V). Cube functions carry {p, n}.

use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cube::{CubeError, CubeFunction};
use crate::field::{Field, FieldError};
use crate::fourier::{FourierError, MapFunction, Spectrum};
use crate::space::Space;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("file format: {0}")]
    Format(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Cube(#[from] CubeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Values on L(V,W).
    Maps,
    /// Fourier coefficients on L(W,V).
    Duals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub q: usize,
    pub n: usize,
    pub m: usize,
    pub orientation: Orientation,
    /// Field config string, when the modulus is not the shipped one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub values: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeFile {
    pub p: usize,
    pub n: usize,
    pub values: Vec<[f64; 2]>,
}

fn pairs(values: &[Complex<f64>]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

fn complexes(values: &[[f64; 2]]) -> Vec<Complex<f64>> {
    values.iter().map(|&[re, im]| Complex::new(re, im)).collect()
}

fn header_field(sp: &Space) -> Option<String> {
    let standard = Field::standard(sp.q()).ok();
    (standard.as_ref() != Some(sp.field())).then(|| sp.field().config_string())
}

impl MapFile {
    pub fn from_function(g: &MapFunction<f64>) -> Self {
        let sp = g.space();
        MapFile {
            q: sp.q(),
            n: sp.dim_v(),
            m: sp.dim_w(),
            orientation: Orientation::Maps,
            field: header_field(sp),
            values: pairs(g.values()),
        }
    }

    pub fn from_spectrum(s: &Spectrum<f64>) -> Self {
        let sp = s.space();
        MapFile {
            q: sp.q(),
            n: sp.dim_v(),
            m: sp.dim_w(),
            orientation: Orientation::Duals,
            field: header_field(sp),
            values: pairs(s.coeffs()),
        }
    }

    pub fn space(&self) -> Result<Arc<Space>, IoError> {
        let field = match &self.field {
            Some(cfg) => cfg.parse::<Field>()?,
            None => Field::standard(self.q)?,
        };
        if field.order() != self.q {
            return Err(IoError::Format(format!("header q={} but field has order {}", self.q, field.order())));
        }
        Ok(Space::get(&field, self.n, self.m))
    }

    /// A function file; spectra are inverted.
    pub fn into_function(self) -> Result<MapFunction<f64>, IoError> {
        let sp = self.space()?;
        let values = complexes(&self.values);
        match self.orientation {
            Orientation::Maps => Ok(MapFunction::new(sp, values)?),
            Orientation::Duals => Ok(Spectrum::new(sp, values)?.inverse()),
        }
    }
}

pub fn function_to_json(g: &MapFunction<f64>) -> Result<String, IoError> {
    Ok(serde_json::to_string(&MapFile::from_function(g))?)
}

pub fn function_from_json(text: &str) -> Result<MapFunction<f64>, IoError> {
    serde_json::from_str::<MapFile>(text)?.into_function()
}

pub fn cube_to_json(g: &CubeFunction<f64>) -> Result<String, IoError> {
    Ok(serde_json::to_string(&CubeFile { p: g.p(), n: g.n(), values: pairs(g.values()) })?)
}

pub fn cube_from_json(text: &str) -> Result<CubeFunction<f64>, IoError> {
    let file: CubeFile = serde_json::from_str(text)?;
    Ok(CubeFunction::new(file.p, file.n, complexes(&file.values))?)
}
