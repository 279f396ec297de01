//! The subcommands as plain functions over bytes and values, so that tests
//! can drive them without spawning a process.

use std::sync::Arc;
use std::time::Instant;

use designforge::complex::{
    check_weighted_2design, design_bound, design_to_kraus, ebr_bound_table, frame_potential, mub_ensemble, sic_catalog,
    CEnsemble, Provenance, CERT_TOL, VERIFY_TOL,
};
use designforge::ffdesign::{
    certify_tight_2design, check_projective_2design, gabor_ensemble, harmonic_etf, param_search, singer_difference_set,
    verify_difference_set, CertFailure, DesignError, TableRow,
};
use designforge::field::build_field;
use designforge::quaternion::{
    certify_fusion_frame, check_tight_q_design, optimize_seeds, simplex_design_d2, OptimizeConfig,
};

use crate::error::{engine, CliError, EXIT_BUDGET, EXIT_CLAIM_FAILED, EXIT_OK, EXIT_PARSE};
use crate::format::{
    element_to_json, gabor_metadata, parse_design, parse_input, sha256_hex, toolchain, BoundEntry, CertificateFile,
    Claim, ClaimStatus, ComplexDesign, DesignFile, DifferenceSetFile, EbrSection, FiniteDesign, InputDigest, InputFile,
    Metadata, QuaternionDesign, FORMAT_VERSION,
};

/// Default tolerance for quaternionic claims, loose enough for optimizer output.
pub const Q_VERIFY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructKind {
    Gabor { p: u64, k: usize, r: u64 },
    Singer { r: u64 },
    Harmonic { p: u64, k: usize, r: u64 },
    Mub { d: usize },
    Sic { d: usize },
    QSimplex,
}

/// A constructed artifact.
#[derive(Clone, Debug, PartialEq)]
pub enum Constructed {
    Design(DesignFile),
    DifferenceSet(DifferenceSetFile),
}

impl Constructed {
    pub fn to_json(&self) -> String {
        match self {
            Constructed::Design(f) => crate::format::to_json(f),
            Constructed::DifferenceSet(f) => crate::format::to_json(f),
        }
    }
}

fn usage_or_engine(e: DesignError) -> CliError {
    match e {
        DesignError::NotPrimePower(_) | DesignError::DivisibilityViolated(_) => CliError::Usage(e.to_string()),
        DesignError::Field(_) => CliError::Usage(e.to_string()),
        other => engine(other),
    }
}

pub fn construct(kind: &ConstructKind) -> Result<Constructed, CliError> {
    let design = match *kind {
        ConstructKind::Gabor { p, k, r } => {
            let ens = gabor_ensemble(p, k, r).map_err(usage_or_engine)?;
            let meta = gabor_metadata(ens.gabor().expect("gabor ensembles carry metadata"));
            DesignFile::Finite(FiniteDesign::from_ensemble(&ens, Some(meta)))
        }
        ConstructKind::Singer { r } => {
            let set = singer_difference_set(r).map_err(usage_or_engine)?;
            return Ok(Constructed::DifferenceSet(DifferenceSetFile::from_set(r, &set)));
        }
        ConstructKind::Harmonic { p, k, r } => {
            let set = singer_difference_set(r).map_err(usage_or_engine)?;
            let ctx = Arc::new(build_field(p, 2 * k).map_err(|e| CliError::Usage(e.to_string()))?);
            let ens = harmonic_etf(&ctx, &set).map_err(usage_or_engine)?;
            let meta = Metadata {
                p: Some(p),
                k: Some(k),
                r: Some(r),
                difference_set: Some(set.elements().to_vec()),
                ..Metadata::kind("harmonic")
            };
            DesignFile::Finite(FiniteDesign::from_ensemble(&ens, Some(meta)))
        }
        ConstructKind::Mub { d } => {
            let ens = mub_ensemble(d).map_err(|e| CliError::Usage(e.to_string()))?;
            DesignFile::Complex(ComplexDesign::from_ensemble(&ens, Some(provenance_metadata("mub", Provenance::Mub))))
        }
        ConstructKind::Sic { d } => {
            let ens = sic_catalog(d).map_err(|e| CliError::Usage(e.to_string()))?;
            DesignFile::Complex(ComplexDesign::from_ensemble(&ens, Some(provenance_metadata("sic", Provenance::Sic))))
        }
        ConstructKind::QSimplex => DesignFile::Quaternion(QuaternionDesign::from_ensemble(
            &simplex_design_d2(),
            Some(Metadata::kind("q-simplex")),
        )),
    };
    Ok(Constructed::Design(design))
}

fn provenance_metadata(kind: &str, p: Provenance) -> Metadata {
    Metadata { provenance: Some(p.tag().to_string()), ..Metadata::kind(kind) }
}

fn provenance_of(meta: Option<&Metadata>) -> Provenance {
    match meta.and_then(|m| m.provenance.as_deref()) {
        Some("SIC") => Provenance::Sic,
        Some("MUB") => Provenance::Mub,
        Some("pruned") => Provenance::Pruned,
        _ => Provenance::Imported,
    }
}

/// Claims checked when none are requested.
pub fn default_claims(input: &InputFile) -> Vec<String> {
    let names: &[&str] = match input {
        InputFile::DifferenceSet(_) => &["difference-set"],
        InputFile::Design(DesignFile::Complex(_)) => &["weighted-2-design", "ebr"],
        InputFile::Design(DesignFile::Quaternion(_)) => &["q-design", "fusion-frame"],
        InputFile::Design(DesignFile::Finite(f)) if f.field.p == 2 => &["etf"],
        InputFile::Design(DesignFile::Finite(_)) => &["etf", "design"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

fn supported_claims(input: &InputFile) -> &'static [&'static str] {
    match input {
        InputFile::DifferenceSet(_) => &["difference-set"],
        InputFile::Design(DesignFile::Complex(_)) => &["weighted-2-design", "ebr"],
        InputFile::Design(DesignFile::Quaternion(_)) => &["q-design", "fusion-frame"],
        InputFile::Design(DesignFile::Finite(_)) => &["tight-frame", "etf", "design", "2-design"],
    }
}

/// Exit code for a list of claims: budget trouble wins over plain failure.
pub fn exit_code(claims: &[Claim]) -> i32 {
    if claims.iter().any(|c| c.status == ClaimStatus::BudgetExceeded) {
        EXIT_BUDGET
    } else if claims.iter().any(|c| c.status == ClaimStatus::Failed) {
        EXIT_CLAIM_FAILED
    } else {
        EXIT_OK
    }
}

/// Verifies `claims` (or the setting's defaults) on the file contents. A
/// certificate is produced in every case, including parse failures.
pub fn verify(bytes: &[u8], claims: Option<&[String]>, tol: Option<f64>) -> (CertificateFile, i32) {
    let start = Instant::now();
    let mut cert = CertificateFile {
        format: FORMAT_VERSION,
        kind: "verification".into(),
        input: Some(InputDigest { sha256: sha256_hex(bytes), bytes: bytes.len() }),
        setting: None,
        claims: Vec::new(),
        ebr: None,
        error: None,
        toolchain: toolchain(),
        wall_clock_seconds: 0.0,
    };
    let result = parse_input(bytes).and_then(|input| {
        cert.setting = Some(match &input {
            InputFile::Design(f) => f.setting().to_string(),
            InputFile::DifferenceSet(_) => "difference-set".to_string(),
        });
        let requested = claims.map(<[String]>::to_vec).unwrap_or_else(|| default_claims(&input));
        let supported = supported_claims(&input);
        if let Some(bad) = requested.iter().find(|c| !supported.contains(&c.as_str())) {
            return Err(CliError::Usage(format!("claim `{bad}` is not available here; choose from {supported:?}")));
        }
        match &input {
            InputFile::DifferenceSet(f) => Ok(vec![verify_difference_set_file(f)]),
            InputFile::Design(DesignFile::Finite(f)) => verify_finite(f, &requested),
            InputFile::Design(DesignFile::Complex(f)) => verify_complex(f, &requested, tol.unwrap_or(VERIFY_TOL)),
            InputFile::Design(DesignFile::Quaternion(f)) => {
                verify_quaternion(f, &requested, tol.unwrap_or(Q_VERIFY_TOL))
            }
        }
    });
    let code = match result {
        Ok(claims) => {
            cert.claims = claims;
            exit_code(&cert.claims)
        }
        Err(e) => {
            cert.error = Some(e.to_string());
            EXIT_PARSE
        }
    };
    cert.wall_clock_seconds = start.elapsed().as_secs_f64();
    (cert, code)
}

fn verify_difference_set_file(f: &DifferenceSetFile) -> Claim {
    let lambda = verify_difference_set(f.modulus, &f.elements);
    let singer_shape = f.modulus as u64 == f.r * f.r + f.r + 1 && f.elements.len() as u64 == f.r + 1;
    let ok = lambda == Some(f.lambda) && singer_shape;
    let mut claim = Claim::new("difference-set", if ok { ClaimStatus::Verified } else { ClaimStatus::Failed }, true)
        .value("modulus", f.modulus)
        .value("size", f.elements.len())
        .value("lambda", lambda);
    claim.method = Some("exhaustive-differences".into());
    if lambda != Some(f.lambda) {
        claim.failures.push(format!("claimed lambda {} but found {lambda:?}", f.lambda));
    }
    if !singer_shape {
        claim.failures.push("parameters are not (r^2 + r + 1, r + 1, 1)".into());
    }
    claim
}

fn status(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Verified
    } else {
        ClaimStatus::Failed
    }
}

fn verify_finite(f: &FiniteDesign, claims: &[String]) -> Result<Vec<Claim>, CliError> {
    let ens = f.to_ensemble()?;
    let needs_cert = claims.iter().any(|c| c != "2-design");
    let cert = needs_cert.then(|| certify_tight_2design(&ens));
    let mut out = Vec::new();
    for name in claims {
        let claim = match (name.as_str(), &cert) {
            ("2-design", _) => match check_projective_2design(&ens) {
                Ok(Some((p, method))) => {
                    let mut c = Claim::new(name, ClaimStatus::Verified, true)
                        .value("a", element_to_json(&p.a))
                        .value("c1", element_to_json(&p.c1))
                        .value("c2", element_to_json(&p.c2));
                    c.method = Some(method.tag().into());
                    c
                }
                Ok(None) => Claim::new(name, ClaimStatus::Failed, true),
                Err(e @ DesignError::BudgetExceeded { .. }) => {
                    let mut c = Claim::new(name, ClaimStatus::BudgetExceeded, true);
                    c.failures.push(e.to_string());
                    c
                }
                Err(e) => {
                    let mut c = Claim::new(name, ClaimStatus::Failed, true);
                    c.failures.push(e.to_string());
                    c
                }
            },
            (_, Some(cert)) => {
                let budget = cert.failures.contains(&CertFailure::BudgetExceeded);
                let mut c = match name.as_str() {
                    "tight-frame" => match &cert.tight_frame {
                        Some(c) => Claim::new(name, ClaimStatus::Verified, true).value("c", element_to_json(c)),
                        None => Claim::new(name, ClaimStatus::Failed, true),
                    },
                    "etf" => match &cert.etf {
                        Some(p) => Claim::new(name, ClaimStatus::Verified, true)
                            .value("a", element_to_json(&p.a))
                            .value("b", element_to_json(&p.b))
                            .value("c", element_to_json(&p.c)),
                        None => Claim::new(name, ClaimStatus::Failed, true),
                    },
                    _ => match &cert.design {
                        Some(p) => {
                            let mut c = Claim::new(name, ClaimStatus::Verified, true)
                                .value("a", element_to_json(&p.a))
                                .value("c1", element_to_json(&p.c1))
                                .value("c2", element_to_json(&p.c2));
                            if let Some(etf) = &cert.etf {
                                c = c.value("b", element_to_json(&etf.b));
                            }
                            if let Some(m) = cert.cross_check {
                                c = c.value("cross_check", m.tag());
                            }
                            c
                        }
                        None => Claim::new(name, ClaimStatus::Failed, true),
                    },
                };
                c.method = match name.as_str() {
                    "design" => cert.method.map(|m| m.tag().to_string()),
                    _ => cert.etf_method.map(|m| m.tag().to_string()),
                };
                if !c.verified() {
                    if budget {
                        c.status = ClaimStatus::BudgetExceeded;
                    }
                    c.failures = cert.failures.iter().map(ToString::to_string).collect();
                }
                c
            }
            (_, None) => unreachable!("certificate computed for every claim but 2-design"),
        };
        out.push(claim.value("n", ens.n()).value("d", ens.d()));
    }
    Ok(out)
}

fn verify_complex(f: &ComplexDesign, claims: &[String], tol: f64) -> Result<Vec<Claim>, CliError> {
    let ens = f.to_ensemble()?;
    let d = ens.d();
    Ok(claims
        .iter()
        .map(|name| match name.as_str() {
            "weighted-2-design" => {
                let residual = check_weighted_2design(&ens);
                let mut c = Claim::new(name, status(residual <= tol), false)
                    .value("frame_potential", frame_potential(&ens, 2))
                    .value("welch_bound", design_bound(d, 2));
                c.method = Some("second-moment".into());
                c.residual = Some(residual);
                c.tolerance = Some(tol);
                c
            }
            _ => ebr_claim(&ens, provenance_of(f.metadata.as_ref()), tol),
        })
        .collect())
}

fn ebr_claim(ens: &CEnsemble, provenance: Provenance, tol: f64) -> Claim {
    let mut c = match design_to_kraus(ens, provenance, tol) {
        Ok((_, cert)) => {
            let mut c = Claim::new("ebr", status(cert.holds()), false)
                .value("bound", cert.bound)
                .value("provenance", provenance.tag())
                .value("moment_residual", cert.moment_residual)
                .value("completeness_residual", cert.completeness_residual)
                .value("reconstruction_residual", cert.reconstruction_residual)
                .value("max_rank_ratio", cert.max_rank_ratio);
            c.residual = Some(cert.moment_residual.max(cert.completeness_residual).max(cert.reconstruction_residual));
            c
        }
        Err(e) => {
            let mut c = Claim::new("ebr", ClaimStatus::Failed, false);
            c.failures.push(e.to_string());
            c
        }
    };
    c.method = Some("design-to-kraus".into());
    c.tolerance = Some(tol);
    c
}

fn verify_quaternion(f: &QuaternionDesign, claims: &[String], tol: f64) -> Result<Vec<Claim>, CliError> {
    let ens = f.to_ensemble()?;
    let d = ens.d() as f64;
    Ok(claims
        .iter()
        .map(|name| match name.as_str() {
            "q-design" => {
                let rep = check_tight_q_design(&ens, tol);
                let target = 3.0 / (d * (2.0 * d + 1.0));
                let mut c = Claim::new(name, status(rep.passes), false)
                    .value("first_moment", rep.first)
                    .value("second_moment", rep.second)
                    .value("angle", rep.angle)
                    .value("size_matches", rep.size_matches);
                if let Some(w) = rep.witness {
                    c.failures.push(format!("pair {w:?} breaks equiangularity"));
                }
                if !rep.moments_match {
                    c.failures.push("moments differ from (1/d, 3/(d(2d+1)))".into());
                }
                if !rep.size_matches {
                    c.failures.push(format!("n = {} differs from 2d^2 - d", ens.n()));
                }
                c.method = Some("moments".into());
                c.residual = Some((rep.first - 1.0 / d).abs().max((rep.second - target).abs()));
                c.tolerance = Some(tol);
                c
            }
            _ => {
                let fc = certify_fusion_frame(&ens, tol);
                let mut c = Claim::new(name, status(fc.equi_isoclinic && fc.tight), false)
                    .value("alpha", fc.alpha)
                    .value("potential", fc.potential)
                    .value("target", fc.target)
                    .value("subspace_dim", fc.r)
                    .value("ambient_dim", fc.dim_v)
                    .value("isoclinic_residual", fc.isoclinic_residual);
                if let Some(w) = fc.witness {
                    c.failures.push(format!("pair {w:?} breaks equi-isoclinicity"));
                }
                if !fc.tight {
                    c.failures.push("fusion potential differs from 9/(d(2d+1))".into());
                }
                c.method = Some("cross-gramians".into());
                c.residual = Some(fc.isoclinic_residual.max((fc.potential - fc.target).abs()));
                c.tolerance = Some(tol);
                c
            }
        })
        .collect())
}

pub fn search(p_max: u64, k_max: u64, r_max: u64) -> Vec<TableRow> {
    param_search(p_max, k_max, r_max)
}

pub fn search_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("d,p,k,r,design\n");
    for row in rows {
        s.push_str(&format!("{},{},{},{},{}\n", row.d, row.p, row.k, row.r, row.design));
    }
    s
}

pub fn search_text(rows: &[TableRow]) -> String {
    let mut s = format!("{:>6} {:>4} {:>4} {:>4}  design\n", "d", "p", "k", "r");
    for row in rows {
        s.push_str(&format!(
            "{:>6} {:>4} {:>4} {:>4}  {}\n",
            row.d,
            row.p,
            row.k,
            row.r,
            if row.design { "yes" } else { "no" }
        ));
    }
    s
}

/// The bound table for `d` and a witness certificate: the supplied witness
/// file, else the catalog SIC or MUB when one exists.
pub fn ebr(d: usize, witness: Option<&[u8]>, tol: Option<f64>) -> (CertificateFile, i32) {
    let start = Instant::now();
    let tol = tol.unwrap_or(CERT_TOL);
    let bounds: Vec<BoundEntry> = ebr_bound_table(d as u64)
        .into_iter()
        .map(|b| BoundEntry { label: b.label, bound: b.bound, constructive: b.constructive })
        .collect();
    let mut cert = CertificateFile {
        format: FORMAT_VERSION,
        kind: "ebr".into(),
        input: witness.map(|w| InputDigest { sha256: sha256_hex(w), bytes: w.len() }),
        setting: Some("complex".into()),
        claims: Vec::new(),
        ebr: None,
        error: None,
        toolchain: toolchain(),
        wall_clock_seconds: 0.0,
    };
    let mut code = EXIT_OK;
    let candidate = match witness {
        Some(bytes) => match parse_design(bytes).and_then(|f| match f {
            DesignFile::Complex(c) => Ok((c.to_ensemble()?, provenance_of(c.metadata.as_ref()))),
            other => Err(CliError::Parse(format!("witness must be a complex design, found {}", other.setting()))),
        }) {
            Ok((ens, _)) if ens.d() != d => {
                cert.error = Some(format!("witness lives in dimension {}, not {d}", ens.d()));
                code = EXIT_CLAIM_FAILED;
                None
            }
            Ok(w) => Some(w),
            Err(e) => {
                cert.error = Some(e.to_string());
                code = EXIT_PARSE;
                None
            }
        },
        None => {
            sic_catalog(d).map(|e| (e, Provenance::Sic)).or_else(|_| mub_ensemble(d).map(|e| (e, Provenance::Mub))).ok()
        }
    };
    let mut best_constructive = None;
    if let Some((ens, provenance)) = candidate {
        let claim = ebr_claim(&ens, provenance, tol);
        if claim.verified() {
            best_constructive = Some(ens.n());
        } else if witness.is_some() {
            code = EXIT_CLAIM_FAILED;
        }
        cert.claims.push(claim);
    }
    let best_recorded = bounds.iter().map(|b| b.bound).min().unwrap_or(0);
    cert.ebr = Some(EbrSection { d, best_constructive, best_recorded, bounds });
    cert.wall_clock_seconds = start.elapsed().as_secs_f64();
    (cert, code)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeSummary {
    pub seed: u64,
    pub iterations: usize,
    pub potential: f64,
    pub gap: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct OptimizeOutput {
    /// The run with the smallest gap.
    pub best: DesignFile,
    pub runs: Vec<OptimizeSummary>,
    /// `seed,iteration,potential` rows for every run.
    pub trace_csv: String,
}

pub fn optimize(d: usize, n: usize, seeds: &[u64], config: &OptimizeConfig) -> Result<OptimizeOutput, CliError> {
    if d == 0 || n == 0 {
        return Err(CliError::Usage("need d >= 1 and n >= 1".into()));
    }
    if seeds.is_empty() {
        return Err(CliError::Usage("need at least one seed".into()));
    }
    let results = optimize_seeds(d, n, seeds, config);
    let mut trace_csv = String::from("seed,iteration,potential\n");
    for r in &results {
        for (i, p) in r.trace.iter().enumerate() {
            trace_csv.push_str(&format!("{},{i},{p}\n", r.seed));
        }
    }
    let runs: Vec<OptimizeSummary> = results
        .iter()
        .map(|r| OptimizeSummary {
            seed: r.seed,
            iterations: r.iterations,
            potential: *r.trace.last().expect("trace holds the start"),
            gap: r.gap,
            converged: r.converged,
        })
        .collect();
    let best_idx = (0..runs.len()).min_by(|&a, &b| runs[a].gap.total_cmp(&runs[b].gap)).expect("nonempty");
    let s = &runs[best_idx];
    let meta = Metadata {
        seed: Some(s.seed),
        iterations: Some(s.iterations),
        potential: Some(s.potential),
        gap: Some(s.gap),
        converged: Some(s.converged),
        ..Metadata::kind("optimize")
    };
    let best = DesignFile::Quaternion(QuaternionDesign::from_ensemble(&results[best_idx].ensemble, Some(meta)));
    Ok(OptimizeOutput { best, runs, trace_csv })
}

/// Long-format CSV: one row per vector entry.
pub fn export_csv(file: &DesignFile) -> String {
    let mut s = String::new();
    match file {
        DesignFile::Complex(f) => {
            s.push_str("vector,entry,weight,re,im\n");
            let n = f.vectors.len();
            for (v, entries) in f.vectors.iter().enumerate() {
                let w = f.weights.as_ref().map_or(1.0 / n as f64, |w| w[v]);
                for (e, [re, im]) in entries.iter().enumerate() {
                    s.push_str(&format!("{v},{e},{w},{re},{im}\n"));
                }
            }
        }
        DesignFile::Quaternion(f) => {
            s.push_str("vector,entry,r,i,j,k\n");
            for (v, entries) in f.vectors.iter().enumerate() {
                for (e, [r, i, j, k]) in entries.iter().enumerate() {
                    s.push_str(&format!("{v},{e},{r},{i},{j},{k}\n"));
                }
            }
        }
        DesignFile::Finite(f) => {
            let header: Vec<String> = (0..f.field.k).map(|i| format!("c{i}")).collect();
            s.push_str(&format!("vector,entry,{}\n", header.join(",")));
            for (v, entries) in f.vectors.iter().enumerate() {
                for (e, coeffs) in entries.iter().enumerate() {
                    let mut full = coeffs.clone();
                    full.resize(f.field.k, 0);
                    let cols: Vec<String> = full.iter().map(u32::to_string).collect();
                    s.push_str(&format!("{v},{e},{}\n", cols.join(",")));
                }
            }
        }
    }
    s
}
