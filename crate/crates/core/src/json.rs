//! JSON wire formats: matrices, complex scalars, map specs and report output.
//!
//! Matrices travel as `{"n": n, "re": [[..]], "im": [[..]]}` (row-major),
//! complex scalars as `{"re": x, "im": y}`. Reports are written with a fixed
//! key order and every float at 17 significant digits, so identical inputs
//! give byte-identical output.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::map::MatrixMap;
use crate::preservers::{CanonicalPreserver, NormTwistMap, Pinching};
use crate::recovery::{LinearRep, Recovery};

/// `{"re": x, "im": y}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// `{"n": n, "re": [[..]], "im": [[..]]}`; `im` may be omitted for real data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&SquareMatrix> for MatrixJson {
    fn from(a: &SquareMatrix) -> Self {
        let n = a.dim();
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| f(&a[(i, j)])).collect()).collect()
        };
        Self {
            n,
            re: part(|z| z.re),
            im: Some(part(|z| z.im)),
        }
    }
}

impl From<SquareMatrix> for MatrixJson {
    fn from(a: SquareMatrix) -> Self {
        Self::from(&a)
    }
}

impl TryFrom<MatrixJson> for SquareMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        let n = m.n;
        let check = |rows: &Vec<Vec<f64>>, name: &str| -> Result<()> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("matrix '{name}' part must be {n} x {n}")));
            }
            Ok(())
        };
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        check(&m.re, "re")?;
        if let Some(im) = &m.im {
            check(im, "im")?;
        }
        let out = SquareMatrix::from_fn(n, |i, j| {
            Complex64::new(m.re[i][j], m.im.as_ref().map_or(0.0, |im| im[i][j]))
        });
        if !out.is_finite() {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(out)
    }
}

pub fn matrix_from_json(value: MatrixJson) -> Result<SquareMatrix> {
    SquareMatrix::try_from(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    PnCongruence,
    SnCongruence,
    MnTwoSided,
    TnDiagonal,
    LinearRep,
    #[serde(rename = "remark1")]
    NormTwist,
    Pinching,
}

/// Declarative description of a black-box map.
///
/// `sigma` is 1-based. For `sn-congruence` the matrix `P` may be given under
/// `"M"` or `"P"`. For `remark1`, `"M"` overrides the Hermitian generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub kind: MapKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ComplexJson>,
    #[serde(rename = "M", alias = "P", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<MatrixJson>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<MatrixJson>,
    #[serde(default)]
    pub transpose: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<ComplexJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offdiag_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<MatrixJson>,
}

/// A map realized from a [`MapSpec`].
#[derive(Debug, Clone)]
pub enum BlackBox {
    Canonical(CanonicalPreserver),
    Linear(LinearRep),
    NormTwist(Option<NormTwistMap>),
    Pinching,
}

impl BlackBox {
    /// Dimension fixed by the spec, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            BlackBox::Canonical(p) => Some(p.dim()),
            BlackBox::Linear(l) => Some(l.n),
            BlackBox::NormTwist(Some(r)) => Some(r.dim()),
            BlackBox::NormTwist(None) | BlackBox::Pinching => None,
        }
    }
}

impl MatrixMap for BlackBox {
    fn eval(&self, a: &SquareMatrix) -> Result<SquareMatrix> {
        match self {
            BlackBox::Canonical(p) => p.apply(a),
            BlackBox::Linear(l) => l.apply(a),
            BlackBox::NormTwist(Some(r)) => r.apply(a),
            BlackBox::NormTwist(None) => NormTwistMap::new(a.dim()).apply(a),
            BlackBox::Pinching => Ok(Pinching.apply(a)),
        }
    }
}

fn required<T>(value: Option<T>, field: &str, kind: MapKind) -> Result<T> {
    value.ok_or_else(|| Error::InvalidInput(format!("map kind {kind:?} requires field '{field}'")))
}

impl MapSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<BlackBox> {
        let alpha: Complex64 = self.alpha.map_or(Complex64::new(1.0, 0.0), Into::into);
        let matrix = |m: &Option<MatrixJson>, field: &str| -> Result<SquareMatrix> {
            SquareMatrix::try_from(required(m.clone(), field, self.kind)?)
        };
        let p = match self.kind {
            MapKind::PnCongruence => {
                if alpha.im != 0.0 {
                    return Err(Error::InvalidInput("pn-congruence needs a real alpha".into()));
                }
                CanonicalPreserver::pn_congruence(alpha.re, matrix(&self.m, "M")?, self.transpose)?
            }
            MapKind::SnCongruence => CanonicalPreserver::sn_congruence(alpha, matrix(&self.m, "M")?)?,
            MapKind::MnTwoSided => {
                CanonicalPreserver::mn_two_sided(alpha, matrix(&self.m, "M")?, matrix(&self.n, "N")?, self.transpose)?
            }
            MapKind::TnDiagonal => {
                let sigma = required(self.sigma.clone(), "sigma", self.kind)?;
                if sigma.contains(&0) {
                    return Err(Error::InvalidInput("sigma is 1-based".into()));
                }
                let lambdas = required(self.lambdas.clone(), "lambdas", self.kind)?;
                CanonicalPreserver::tn_diagonal(
                    alpha,
                    sigma.iter().map(|s| s - 1).collect(),
                    lambdas.into_iter().map(Into::into).collect(),
                    self.offdiag_seed.unwrap_or(0),
                )?
            }
            MapKind::LinearRep => return Ok(BlackBox::Linear(LinearRep::from_operator(matrix(&self.rep, "rep")?)?)),
            MapKind::NormTwist => {
                return Ok(BlackBox::NormTwist(match &self.m {
                    Some(g) => Some(NormTwistMap::with_generator(SquareMatrix::try_from(g.clone())?)?),
                    None => None,
                }))
            }
            MapKind::Pinching => return Ok(BlackBox::Pinching),
        };
        Ok(BlackBox::Canonical(p))
    }

    /// Spec reproducing a canonical preserver.
    pub fn from_preserver(p: &CanonicalPreserver) -> Self {
        let mut spec = Self {
            kind: MapKind::Pinching,
            alpha: Some(p.alpha().into()),
            m: None,
            n: None,
            transpose: p.transpose(),
            sigma: None,
            lambdas: None,
            offdiag_seed: None,
            rep: None,
        };
        match p {
            CanonicalPreserver::PnCongruence { m, .. } => {
                spec.kind = MapKind::PnCongruence;
                spec.m = Some(m.into());
            }
            CanonicalPreserver::SnCongruence { p, .. } => {
                spec.kind = MapKind::SnCongruence;
                spec.m = Some(p.into());
            }
            CanonicalPreserver::MnTwoSided { m, n, .. } => {
                spec.kind = MapKind::MnTwoSided;
                spec.m = Some(m.into());
                spec.n = Some(n.into());
            }
            CanonicalPreserver::TnDiagonal {
                sigma,
                lambdas,
                offdiag_seed,
                ..
            } => {
                spec.kind = MapKind::TnDiagonal;
                spec.sigma = Some(sigma.iter().map(|s| s + 1).collect());
                spec.lambdas = Some(lambdas.iter().map(|&l| l.into()).collect());
                spec.offdiag_seed = Some(*offdiag_seed);
            }
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintResiduals {
    pub det_gauge: f64,
}

/// Output of a successful recovery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub form: &'static str,
    pub branch: &'static str,
    pub alpha: ComplexJson,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<MatrixJson>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<MatrixJson>,
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    pub p: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<ComplexJson>>,
    pub residual: f64,
    pub constraint_residuals: ConstraintResiduals,
}

impl From<&Recovery> for RecoveryReport {
    fn from(r: &Recovery) -> Self {
        let p = &r.preserver;
        let mut out = Self {
            form: p.form().name(),
            branch: r.branch.name(),
            alpha: p.alpha().into(),
            m: None,
            n: None,
            p: None,
            sigma: None,
            lambdas: None,
            residual: r.residual,
            constraint_residuals: ConstraintResiduals {
                det_gauge: p.gauge_residual(),
            },
        };
        match p {
            CanonicalPreserver::PnCongruence { m, .. } => out.m = Some(m.into()),
            CanonicalPreserver::MnTwoSided { m, n, .. } => {
                out.m = Some(m.into());
                out.n = Some(n.into());
            }
            CanonicalPreserver::SnCongruence { p, .. } => out.p = Some(p.into()),
            CanonicalPreserver::TnDiagonal { sigma, lambdas, .. } => {
                out.sigma = Some(sigma.iter().map(|s| s + 1).collect());
                out.lambdas = Some(lambdas.iter().map(|&l| l.into()).collect());
            }
        }
        out
    }
}

/// Pretty printer that writes every float with 17 significant digits.
struct StableFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for StableFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
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

/// Serializes `value` as indented JSON with stable float formatting and a
/// trailing newline.
pub fn to_stable_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, StableFormatter(Default::default()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
