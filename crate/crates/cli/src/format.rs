//! On-disk JSON formats: design files, difference-set files and certificates.
//!
//! Finite-field elements are coefficient lists, constant term first, with
//! trailing zeros dropped (so zero is `[]`). Floats are written in the
//! shortest form that parses back to the same `f64`, which makes
//! write → read → write byte-stable.

use std::collections::BTreeMap;
use std::sync::Arc;

use designforge::complex::{CEnsemble, CVector};
use designforge::ffdesign::{DifferenceSet, FFEnsemble, GaborMeta};
use designforge::fflinalg::FFVector;
use designforge::field::{FieldCtx, FieldElement};
use designforge::quaternion::{QEnsemble, QVector, Quaternion};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// A design in one of the three settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "setting", rename_all = "lowercase")]
pub enum DesignFile {
    Complex(ComplexDesign),
    Finite(FiniteDesign),
    Quaternion(QuaternionDesign),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDesign {
    pub format: u32,
    pub d: usize,
    pub n: usize,
    /// `[re, im]` per entry.
    pub vectors: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteDesign {
    pub format: u32,
    pub field: FieldSpec,
    pub d: usize,
    pub n: usize,
    pub vectors: Vec<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuaternionDesign {
    pub format: u32,
    pub d: usize,
    pub n: usize,
    /// `[r, i, j, k]` per entry.
    pub vectors: Vec<Vec<[f64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// `F_{p^k}` with its defining polynomial, constant term first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u32,
    pub k: usize,
    pub modulus: Vec<u32>,
}

/// How a design was produced. Every field but `kind` is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub difference_set: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

impl Metadata {
    pub fn kind(kind: &str) -> Self {
        Metadata { kind: kind.to_string(), ..Default::default() }
    }
}

/// A `(v, k, λ)` difference set in `Z/vZ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferenceSetFile {
    pub format: u32,
    pub kind: String,
    pub r: u64,
    pub modulus: usize,
    pub lambda: usize,
    pub elements: Vec<usize>,
}

/// Anything `verify` accepts.
#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Design(DesignFile),
    DifferenceSet(DifferenceSetFile),
}

fn check_format(format: u32) -> Result<(), CliError> {
    if format != FORMAT_VERSION {
        return Err(CliError::Parse(format!("unsupported format version {format}")));
    }
    Ok(())
}

/// Parses and validates a design or difference-set file.
pub fn parse_input(bytes: &[u8]) -> Result<InputFile, CliError> {
    match serde_json::from_slice::<DesignFile>(bytes) {
        Ok(file) => {
            check_format(file.format())?;
            Ok(InputFile::Design(file))
        }
        Err(design_err) => match serde_json::from_slice::<DifferenceSetFile>(bytes) {
            Ok(file) if file.kind == "difference-set" => {
                check_format(file.format)?;
                Ok(InputFile::DifferenceSet(file))
            }
            _ => Err(CliError::Parse(design_err.to_string())),
        },
    }
}

pub fn parse_design(bytes: &[u8]) -> Result<DesignFile, CliError> {
    match parse_input(bytes)? {
        InputFile::Design(f) => Ok(f),
        InputFile::DifferenceSet(_) => Err(CliError::Parse("expected a design file, found a difference set".into())),
    }
}

/// JSON with objects indented, arrays of scalars (and arrays of those) kept
/// on one line, and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|x| !matches!(x, Value::Array(_) | Value::Object(_))),
        _ => true,
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (key, val)) in map.iter().enumerate() {
                pad(indent + 2, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(val, indent + 2, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
        Value::Array(items) if !items.iter().all(is_flat) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(indent + 2, out);
                write_value(item, indent + 2, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Lowercase hex SHA-256.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl DesignFile {
    pub fn format(&self) -> u32 {
        match self {
            DesignFile::Complex(f) => f.format,
            DesignFile::Finite(f) => f.format,
            DesignFile::Quaternion(f) => f.format,
        }
    }

    pub fn setting(&self) -> &'static str {
        match self {
            DesignFile::Complex(_) => "complex",
            DesignFile::Finite(_) => "finite",
            DesignFile::Quaternion(_) => "quaternion",
        }
    }

    pub fn d(&self) -> usize {
        match self {
            DesignFile::Complex(f) => f.d,
            DesignFile::Finite(f) => f.d,
            DesignFile::Quaternion(f) => f.d,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DesignFile::Complex(f) => f.n,
            DesignFile::Finite(f) => f.n,
            DesignFile::Quaternion(f) => f.n,
        }
    }

    pub fn metadata(&self) -> Option<&Metadata> {
        match self {
            DesignFile::Complex(f) => f.metadata.as_ref(),
            DesignFile::Finite(f) => f.metadata.as_ref(),
            DesignFile::Quaternion(f) => f.metadata.as_ref(),
        }
    }
}

fn check_shape<T>(d: usize, n: usize, vectors: &[Vec<T>]) -> Result<(), CliError> {
    if vectors.len() != n {
        return Err(CliError::Parse(format!("n = {n} but {} vectors are listed", vectors.len())));
    }
    if let Some(k) = vectors.iter().position(|v| v.len() != d) {
        return Err(CliError::Parse(format!("vector {k} has length {}, expected d = {d}", vectors[k].len())));
    }
    Ok(())
}

pub fn element_to_json(e: &FieldElement) -> Vec<u32> {
    let c = e.coeffs();
    let len = c.iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
    c[..len].to_vec()
}

pub fn element_from_json(ctx: &FieldCtx, coeffs: &[u32]) -> Result<FieldElement, CliError> {
    if coeffs.len() > ctx.degree() {
        return Err(CliError::Parse(format!("{} coefficients for a degree-{} field", coeffs.len(), ctx.degree())));
    }
    let mut c = coeffs.to_vec();
    c.resize(ctx.degree(), 0);
    ctx.element(c).map_err(|e| CliError::Parse(e.to_string()))
}

impl FieldSpec {
    pub fn of(ctx: &FieldCtx) -> Self {
        FieldSpec { p: ctx.p(), k: ctx.degree(), modulus: ctx.modulus().to_vec() }
    }

    pub fn build(&self) -> Result<FieldCtx, CliError> {
        if self.modulus.len() != self.k + 1 {
            return Err(CliError::Parse(format!("modulus of length {} for degree {}", self.modulus.len(), self.k)));
        }
        FieldCtx::with_modulus(self.p, self.modulus.clone()).map_err(|e| CliError::Parse(format!("field: {e}")))
    }
}

impl FiniteDesign {
    pub fn from_ensemble(ens: &FFEnsemble, metadata: Option<Metadata>) -> Self {
        let vectors = ens.vectors().iter().map(|v| v.entries().iter().map(element_to_json).collect()).collect();
        FiniteDesign {
            format: FORMAT_VERSION,
            field: FieldSpec::of(ens.ctx()),
            d: ens.d(),
            n: ens.n(),
            vectors,
            metadata,
        }
    }

    /// Rebuilds the ensemble. Gabor metadata is attached when complete; the
    /// structural verifier checks it against the vectors.
    pub fn to_ensemble(&self) -> Result<FFEnsemble, CliError> {
        check_shape(self.d, self.n, &self.vectors)?;
        let ctx = Arc::new(self.field.build()?);
        if !ctx.is_quadratic() {
            return Err(CliError::Parse(format!("degree {} is not even", ctx.degree())));
        }
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let entries = v.iter().map(|c| element_from_json(&ctx, c)).collect::<Result<_, _>>()?;
                FFVector::new(ctx.clone(), entries).map_err(|e| CliError::Parse(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        let ens = FFEnsemble::new(ctx.clone(), self.d, vectors).map_err(|e| CliError::Parse(e.to_string()))?;
        match &self.metadata {
            Some(m) if m.kind == "gabor" => Ok(ens.with_gabor(gabor_meta(&ctx, m)?)),
            _ => Ok(ens),
        }
    }
}

fn gabor_meta(ctx: &FieldCtx, m: &Metadata) -> Result<GaborMeta, CliError> {
    let missing = |name: &str| CliError::Parse(format!("gabor metadata lacks `{name}`"));
    let set = m.difference_set.clone().ok_or_else(|| missing("D"))?;
    let r = m.r.ok_or_else(|| missing("r"))?;
    let modulus = (r * r + r + 1) as usize;
    let set = DifferenceSet::with_lambda(modulus, set, 1).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(GaborMeta {
        p: m.p.ok_or_else(|| missing("p"))?,
        k: m.k.ok_or_else(|| missing("k"))?,
        r,
        set,
        alpha: element_from_json(ctx, m.alpha.as_deref().ok_or_else(|| missing("alpha"))?)?,
        omega: element_from_json(ctx, m.omega.as_deref().ok_or_else(|| missing("omega"))?)?,
    })
}

/// Metadata recording a Gabor construction.
pub fn gabor_metadata(meta: &GaborMeta) -> Metadata {
    Metadata {
        p: Some(meta.p),
        k: Some(meta.k),
        r: Some(meta.r),
        difference_set: Some(meta.set.elements().to_vec()),
        alpha: Some(element_to_json(&meta.alpha)),
        omega: Some(element_to_json(&meta.omega)),
        ..Metadata::kind("gabor")
    }
}

impl ComplexDesign {
    /// Weights are written only when they are not all equal.
    pub fn from_ensemble(ens: &CEnsemble, metadata: Option<Metadata>) -> Self {
        let vectors = ens.vectors().iter().map(|v| v.iter().map(|z| [z.re, z.im]).collect()).collect();
        let w = ens.weights();
        let uniform = w.iter().all(|&x| x == w[0]);
        ComplexDesign {
            format: FORMAT_VERSION,
            d: ens.d(),
            n: ens.n(),
            vectors,
            weights: (!uniform).then(|| w.to_vec()),
            metadata,
        }
    }

    pub fn to_ensemble(&self) -> Result<CEnsemble, CliError> {
        check_shape(self.d, self.n, &self.vectors)?;
        let vectors: Vec<CVector> = self
            .vectors
            .iter()
            .map(|v| CVector::from_iterator(self.d, v.iter().map(|&[re, im]| Complex64::new(re, im))))
            .collect();
        let ens = match &self.weights {
            Some(w) => CEnsemble::with_weights(self.d, vectors, w.clone()),
            None => CEnsemble::new(self.d, vectors),
        };
        ens.map_err(|e| CliError::Parse(e.to_string()))
    }
}

impl QuaternionDesign {
    pub fn from_ensemble(ens: &QEnsemble, metadata: Option<Metadata>) -> Self {
        let vectors = ens.vectors().iter().map(|v| v.entries().iter().map(|q| q.to_array()).collect()).collect();
        QuaternionDesign { format: FORMAT_VERSION, d: ens.d(), n: ens.n(), vectors, metadata }
    }

    pub fn to_ensemble(&self) -> Result<QEnsemble, CliError> {
        check_shape(self.d, self.n, &self.vectors)?;
        let vectors =
            self.vectors.iter().map(|v| QVector(v.iter().map(|&c| Quaternion::from_array(c)).collect())).collect();
        QEnsemble::new(self.d, vectors).map_err(|e| CliError::Parse(e.to_string()))
    }
}

impl DifferenceSetFile {
    pub fn from_set(r: u64, set: &DifferenceSet) -> Self {
        DifferenceSetFile {
            format: FORMAT_VERSION,
            kind: "difference-set".into(),
            r,
            modulus: set.modulus(),
            lambda: set.lambda(),
            elements: set.elements().to_vec(),
        }
    }
}

/// Outcome of one claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Verified,
    Failed,
    BudgetExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub claim: String,
    pub status: ClaimStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// Exact (finite-field or combinatorial) rather than floating point.
    pub exact: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl Claim {
    pub fn new(claim: &str, status: ClaimStatus, exact: bool) -> Self {
        Claim {
            claim: claim.to_string(),
            status,
            method: None,
            exact,
            values: BTreeMap::new(),
            residual: None,
            tolerance: None,
            failures: Vec::new(),
        }
    }

    pub fn verified(&self) -> bool {
        self.status == ClaimStatus::Verified
    }

    pub fn value(mut self, key: &str, v: impl Serialize) -> Self {
        self.values.insert(key.to_string(), serde_json::to_value(v).expect("serializable"));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub sha256: String,
    pub bytes: usize,
}

/// One recorded upper bound on the entanglement-breaking rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub label: String,
    pub bound: u64,
    pub constructive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EbrSection {
    pub d: usize,
    /// Smallest bound carried by a verified witness.
    pub best_constructive: Option<usize>,
    pub best_recorded: u64,
    pub bounds: Vec<BoundEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputDigest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub setting: Option<String>,
    pub claims: Vec<Claim>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ebr: Option<EbrSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub toolchain: String,
    pub wall_clock_seconds: f64,
}

pub fn toolchain() -> String {
    format!("designforge {}", env!("CARGO_PKG_VERSION"))
}
