//! JSON file formats for matrices, frames and symmetry certificates.
//!
//! Floats are written in shortest round-trip form, so reading back a written
//! file reproduces every entry bit for bit.

use eitff_core::symmetry::{Permutation, SymmetryCertificate};
use eitff_core::{eitff::FusionFrame, Field, Mat, C64};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub variant: Option<String>,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub field: String,
    pub d: usize,
    pub r: usize,
    pub n: usize,
    pub isometries: Vec<MatrixFile>,
    #[serde(default)]
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    /// One-line image, 1-indexed: "2 1 3 4".
    pub sigma: String,
    pub upsilon: MatrixFile,
    pub residual: f64,
}

pub fn field_tag(field: Field) -> &'static str {
    match field {
        Field::Real => "R",
        Field::Complex => "C",
    }
}

fn parse_field(tag: &str) -> Result<Field, CliError> {
    match tag {
        "R" => Ok(Field::Real),
        "C" => Ok(Field::Complex),
        other => Err(CliError::Format(format!("unknown field tag {other:?}"))),
    }
}

impl MatrixFile {
    pub fn from_mat(m: &Mat) -> MatrixFile {
        MatrixFile {
            field: field_tag(m.field()).into(),
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_mat(&self) -> Result<Mat, CliError> {
        let field = parse_field(&self.field)?;
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::Format(format!(
                "{}x{} matrix with {} entries",
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if field == Field::Real && self.data.iter().any(|e| e[1] != 0.0) {
            return Err(CliError::Format("nonzero imaginary part in a real matrix".into()));
        }
        let data = self.data.iter().map(|e| C64::new(e[0], e[1])).collect();
        Mat::new(field, self.rows, self.cols, data).map_err(|e| CliError::Format(e.to_string()))
    }
}

impl FrameFile {
    pub fn from_frame(frame: &FusionFrame, metadata: Metadata) -> FrameFile {
        FrameFile {
            field: field_tag(frame.field).into(),
            d: frame.d,
            r: frame.r,
            n: frame.n,
            isometries: frame.isometries.iter().map(MatrixFile::from_mat).collect(),
            metadata,
        }
    }

    /// Shape-checked only; members need not be isometries.
    pub fn to_frame(&self) -> Result<FusionFrame, CliError> {
        let field = parse_field(&self.field)?;
        if self.isometries.len() != self.n {
            return Err(CliError::Format(format!(
                "n = {} but {} isometries given",
                self.n,
                self.isometries.len()
            )));
        }
        let mats = self.isometries.iter().map(MatrixFile::to_mat).collect::<Result<Vec<_>, _>>()?;
        if let Some(m) = mats.iter().find(|m| m.shape() != (self.d, self.r)) {
            return Err(CliError::Format(format!(
                "isometry is {}x{}, header says {}x{}",
                m.rows(),
                m.cols(),
                self.d,
                self.r
            )));
        }
        FusionFrame::unchecked(field, mats).map_err(|e| CliError::Format(e.to_string()))
    }
}

impl CertificateFile {
    pub fn from_certificate(c: &SymmetryCertificate) -> CertificateFile {
        CertificateFile {
            sigma: c.sigma.to_string(),
            upsilon: MatrixFile::from_mat(&c.upsilon),
            residual: c.residual,
        }
    }

    pub fn parts(&self) -> Result<(Permutation, Mat), CliError> {
        let sigma = self.sigma.parse().map_err(|e: eitff_core::Error| CliError::Format(e.to_string()))?;
        Ok((sigma, self.upsilon.to_mat()?))
    }
}
