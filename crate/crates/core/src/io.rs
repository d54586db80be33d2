//! File formats: operator and tableau JSON, reports, trajectory CSV.
//!
//! Matrices are stored row-major as flat arrays. Floating-point numbers are
//! written with 17 significant digits so that a write/read cycle is exact.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::ode::IntegrationResult;
use crate::rk::ButcherTableau;
use crate::sbp::{NormKind, SbpOperator};

/// Pretty JSON with every `f64` in `{:.16e}` form.
struct FullPrecision(PrettyFormatter<'static>);

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value as pretty JSON with full-precision numbers.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

fn row_major(m: &Matrix) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

fn square(name: &str, entries: &[f64], s: usize) -> Result<Matrix> {
    if entries.len() != s * s {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} entries, expected {}",
            entries.len(),
            s * s
        )));
    }
    Ok(Matrix::from_row_slice(s, s, entries))
}

fn vector(name: &str, entries: &[f64], s: usize) -> Result<Vector> {
    if entries.len() != s {
        return Err(Error::DimensionMismatch(format!(
            "{name} has {} entries, expected {s}",
            entries.len()
        )));
    }
    Ok(Vector::from_column_slice(entries))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub s: usize,
    #[serde(rename = "T")]
    pub interval: f64,
    pub nodes: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    #[serde(rename = "tL")]
    pub t_left: Vec<f64>,
    #[serde(rename = "tR")]
    pub t_right: Vec<f64>,
    pub claimed_order: usize,
    pub norm_kind: NormKind,
}

impl From<&SbpOperator> for OperatorFile {
    fn from(op: &SbpOperator) -> Self {
        OperatorFile {
            s: op.s(),
            interval: op.interval(),
            nodes: op.nodes().iter().copied().collect(),
            d: row_major(op.d()),
            m: row_major(op.m()),
            t_left: op.t_left().iter().copied().collect(),
            t_right: op.t_right().iter().copied().collect(),
            claimed_order: op.claimed_order(),
            norm_kind: op.norm_kind(),
        }
    }
}

impl OperatorFile {
    /// Rebuilds the operator without verifying it; callers run
    /// [`crate::sbp::verify_sbp`] where the invariants matter.
    pub fn to_operator(&self) -> Result<SbpOperator> {
        let s = self.s;
        SbpOperator::new_unchecked(
            vector("nodes", &self.nodes, s)?,
            self.interval,
            square("D", &self.d, s)?,
            square("M", &self.m, s)?,
            vector("tL", &self.t_left, s)?,
            vector("tR", &self.t_right, s)?,
            self.claimed_order,
        )
    }
}

pub fn operator_to_json(op: &SbpOperator) -> Result<String> {
    to_json(&OperatorFile::from(op))
}

pub fn operator_from_json(text: &str) -> Result<SbpOperator> {
    serde_json::from_str::<OperatorFile>(text)?.to_operator()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableauFile {
    pub label: String,
    pub s: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl From<&ButcherTableau> for TableauFile {
    fn from(t: &ButcherTableau) -> Self {
        TableauFile {
            label: t.label().to_string(),
            s: t.s(),
            a: row_major(t.a()),
            b: t.b().iter().copied().collect(),
            c: t.c().iter().copied().collect(),
        }
    }
}

impl TableauFile {
    pub fn to_tableau(&self) -> Result<ButcherTableau> {
        let s = self.s;
        ButcherTableau::new(
            self.label.clone(),
            square("A", &self.a, s)?,
            vector("b", &self.b, s)?,
            vector("c", &self.c, s)?,
        )
    }
}

pub fn tableau_to_json(t: &ButcherTableau) -> Result<String> {
    to_json(&TableauFile::from(t))
}

pub fn tableau_from_json(text: &str) -> Result<ButcherTableau> {
    serde_json::from_str::<TableauFile>(text)?.to_tableau()
}

/// Trajectory as CSV with header `t,u_1,...,u_d`, one row per block boundary.
pub fn write_trajectory_csv<W: Write>(result: &IntegrationResult, mut w: W) -> io::Result<()> {
    let d = result.states.first().map_or(0, Vec::len);
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=d).map(|k| format!("u_{k}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (t, u) in result.times.iter().zip(&result.states) {
        let row: Vec<String> = std::iter::once(t).chain(u).map(|x| format!("{x:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
