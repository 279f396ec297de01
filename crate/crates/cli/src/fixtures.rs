//! The versioned fixture set shipped under `fixtures/v1`.

use std::path::{Path, PathBuf};

use designforge::complex::{sic_catalog, Provenance};
use designforge::ffdesign::tight_heisenberg_design;

use crate::commands::{construct, ConstructKind};
use crate::error::{engine, CliError};
use crate::format::{to_json, ComplexDesign, DesignFile, FiniteDesign, Metadata};

pub const FIXTURE_VERSION: &str = "v1";

const PROVENANCE: &str = "\
# Fixture set v1

Every file here is regenerated byte for byte by `designforge export --fixtures DIR`.

| file | setting | origin |
| --- | --- | --- |
| `finite/f9-d2-heisenberg.json` | finite | first fiducial over F_9 (enumeration order) whose Heisenberg orbit in dimension 2 is a tight 2-design; a (0,1,0)-ETF |
| `finite/f25-d3-heisenberg.json` | finite | same search over F_25 in dimension 3 |
| `finite/gabor-13.json` | finite | Gabor ensemble for (p, k, r) = (2, 6, 3): 169 vectors in F_4096^13, a (0,1,0)-ETF |
| `complex/sic-d2.json` | complex | tetrahedral SIC: (1, 0) and (1/sqrt(3), sqrt(2/3) e^{2 pi i j/3}) for j = 0, 1, 2 |
| `complex/sic-d3.json` | complex | Hesse SIC, Weyl-Heisenberg orbit of (0, 1, -1)/sqrt(2) |
| `complex/mub-d3.json` | complex | four mutually unbiased bases of C^3 from quadratic phases |
| `quaternion/simplex-d2.json` | quaternion | six vectors in H^2 from a regular 4-simplex of unit quaternions |
| `singer/r3.json` | difference set | Singer (13, 4, 1) difference set, canonical translate |

The SIC vectors are imported constants. The catalog checks their overlaps
before any file is written.
";

fn heisenberg(p: u64, d: usize) -> Result<DesignFile, CliError> {
    let ens = tight_heisenberg_design(p, 1, d, 200_000)
        .map_err(engine)?
        .ok_or_else(|| CliError::Engine(format!("no tight Heisenberg orbit over F_{} in dimension {d}", p * p)))?;
    let meta = Metadata { p: Some(p), k: Some(1), ..Metadata::kind("heisenberg-search") };
    Ok(DesignFile::Finite(FiniteDesign::from_ensemble(&ens, Some(meta))))
}

/// `(relative path, contents)` for every fixture file.
pub fn fixture_files() -> Result<Vec<(String, String)>, CliError> {
    let sic = |d| -> Result<String, CliError> {
        let ens = sic_catalog(d).map_err(engine)?;
        let meta = Metadata { provenance: Some(Provenance::Sic.tag().into()), ..Metadata::kind("sic") };
        Ok(to_json(&DesignFile::Complex(ComplexDesign::from_ensemble(&ens, Some(meta)))))
    };
    Ok(vec![
        ("PROVENANCE.md".into(), PROVENANCE.into()),
        ("finite/f9-d2-heisenberg.json".into(), to_json(&heisenberg(3, 2)?)),
        ("finite/f25-d3-heisenberg.json".into(), to_json(&heisenberg(5, 3)?)),
        ("finite/gabor-13.json".into(), construct(&ConstructKind::Gabor { p: 2, k: 6, r: 3 })?.to_json()),
        ("complex/sic-d2.json".into(), sic(2)?),
        ("complex/sic-d3.json".into(), sic(3)?),
        ("complex/mub-d3.json".into(), construct(&ConstructKind::Mub { d: 3 })?.to_json()),
        ("quaternion/simplex-d2.json".into(), construct(&ConstructKind::QSimplex)?.to_json()),
        ("singer/r3.json".into(), construct(&ConstructKind::Singer { r: 3 })?.to_json()),
    ])
}

/// Writes the fixture set under `dir/v1`.
pub fn write_fixtures(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let root = dir.join(FIXTURE_VERSION);
    let mut written = Vec::new();
    for (rel, contents) in fixture_files()? {
        let path = root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|source| CliError::Io { path: parent.display().to_string(), source })?;
        }
        std::fs::write(&path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        written.push(path);
    }
    Ok(written)
}
