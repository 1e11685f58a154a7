//! Experiment manifests: a flat TOML table with a versioned schema header.

use std::fmt::Write as _;

use rieszlab::covering::CoverOptions;
use rieszlab::{DomainSet, SolverOptions};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "rieszlab/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Polarize,
    Cover,
    Diagnose,
    Sigma,
    Chain,
    Lattice,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Polarize => "polarize",
            Command::Cover => "cover",
            Command::Diagnose => "diagnose",
            Command::Sigma => "sigma",
            Command::Chain => "chain",
            Command::Lattice => "lattice",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Manifest as written by users. Scalar and list forms of `s` and `N` are both accepted.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawManifest {
    pub schema: Option<String>,
    pub command: Option<Command>,
    pub domain: Option<String>,
    pub d: Option<usize>,
    pub t0: Option<f64>,
    pub semi_axes: Option<Vec<f64>>,
    pub s: Option<f64>,
    pub s_list: Option<Vec<f64>>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "N_list")]
    pub n_list: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub budget: Option<usize>,
    pub tol: Option<f64>,
    pub max_cells: Option<usize>,
    pub fill: Option<f64>,
    pub cover_restarts: Option<usize>,
    pub cover_iterations: Option<usize>,
    pub eta_list: Option<Vec<f64>>,
    pub probe_radii: Option<Vec<f64>>,
    pub name: Option<String>,
    pub basis: Option<Vec<Vec<f64>>>,
    pub out_dir: Option<String>,
    pub format: Option<Format>,
}

/// Validated manifest. Everything except the output location enters the hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub command: Command,
    pub domain: Option<DomainSet>,
    pub s_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub seed: u64,
    pub solver: SolverOptions,
    pub cover: CoverOptions,
    pub eta_list: Vec<f64>,
    pub probe_radii: Vec<f64>,
    pub lattice_name: Option<String>,
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(skip)]
    pub out_dir: Option<String>,
    #[serde(skip)]
    pub format: Format,
}

fn domain_from(raw: &RawManifest) -> Result<Option<DomainSet>, String> {
    let Some(kind) = raw.domain.as_deref() else { return Ok(None) };
    let need_d = || raw.d.ok_or_else(|| format!("domain {kind} needs d"));
    let domain = match kind {
        "cube" => DomainSet::cube(need_d()?),
        "ball" => DomainSet::ball(need_d()?),
        "sphere" => DomainSet::sphere(need_d()?),
        "cap" => DomainSet::cap(need_d()?, raw.t0.ok_or("domain cap needs t0")?).map_err(|e| e.to_string())?,
        "ellipsoid" => {
            let axes = raw.semi_axes.clone().ok_or("domain ellipsoid needs semi_axes")?;
            if raw.d.is_some_and(|d| d != axes.len()) {
                return Err(format!("d = {} does not match {} semi-axes", raw.d.unwrap_or(0), axes.len()));
            }
            DomainSet::ellipsoid(axes).map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown domain kind {other:?}")),
    };
    domain.validate().map_err(|e| e.to_string())?;
    Ok(Some(domain))
}

fn merge<T: Clone>(one: Option<T>, many: &Option<Vec<T>>, what: &str) -> Result<Vec<T>, String> {
    match (one, many) {
        (Some(_), Some(_)) => Err(format!("give either {what} or {what}_list, not both")),
        (Some(x), None) => Ok(vec![x]),
        (None, Some(v)) => Ok(v.clone()),
        (None, None) => Ok(Vec::new()),
    }
}

impl RawManifest {
    pub fn validate(self) -> Result<Manifest, String> {
        let schema = self.schema.clone().unwrap_or_else(|| SCHEMA.to_string());
        if schema != SCHEMA {
            return Err(format!("unsupported schema {schema:?}, expected {SCHEMA:?}"));
        }
        let command = self.command.ok_or("manifest needs a command")?;
        let domain = domain_from(&self)?;
        let s_list = merge(self.s, &self.s_list, "s")?;
        let n_list = merge(self.n, &self.n_list, "N")?;
        let seed = self.seed.unwrap_or(0);
        let defaults = SolverOptions::default();
        let solver = SolverOptions {
            restarts: self.restarts.unwrap_or(defaults.restarts),
            budget: self.budget.unwrap_or(defaults.budget),
            tol: self.tol.unwrap_or(defaults.tol),
            seed,
            fill: self.fill,
            max_cells: self.max_cells.unwrap_or(defaults.max_cells),
        };
        let cover_defaults = CoverOptions::default();
        let cover = CoverOptions {
            restarts: self.cover_restarts.unwrap_or(cover_defaults.restarts),
            iterations: self.cover_iterations.unwrap_or(cover_defaults.iterations),
            tol: cover_defaults.tol,
            seed,
        };
        if !(solver.tol > 0.0) {
            return Err(format!("tol must be positive, got {}", solver.tol));
        }
        if s_list.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err("s values must be positive and finite".into());
        }
        if n_list.contains(&0) {
            return Err("N values must be at least 1".into());
        }
        let needs_domain = command != Command::Lattice;
        if needs_domain && domain.is_none() {
            return Err(format!("command {} needs a domain", command.name()));
        }
        let needs_s = matches!(command, Command::Polarize | Command::Diagnose | Command::Sigma | Command::Chain);
        if needs_s && s_list.is_empty() {
            return Err(format!("command {} needs s or s_list", command.name()));
        }
        if command != Command::Lattice && n_list.is_empty() {
            return Err(format!("command {} needs N or N_list", command.name()));
        }
        if command == Command::Lattice && self.name.is_none() && self.basis.is_none() && self.d.is_none() {
            return Err("command lattice needs name, basis or d".into());
        }
        Ok(Manifest {
            schema,
            command,
            domain,
            s_list,
            n_list,
            seed,
            solver,
            cover,
            eta_list: self.eta_list.unwrap_or_else(|| vec![0.2]),
            probe_radii: self.probe_radii.unwrap_or_else(|| vec![0.1, 0.25]),
            lattice_name: self.name,
            basis: self.basis,
            out_dir: self.out_dir,
            format: self.format.unwrap_or_default(),
        }
        .with_lattice_dim(self.d))
    }
}

impl Manifest {
    fn with_lattice_dim(mut self, d: Option<usize>) -> Self {
        if self.command == Command::Lattice && self.lattice_name.is_none() && self.basis.is_none() {
            self.lattice_name = d.map(|d| format!("all{d}"));
        }
        self
    }

    pub fn parse_toml(text: &str) -> Result<Manifest, String> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| e.message().replace('\n', " "))?;
        raw.validate()
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("manifest serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest.iter().take(8).fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_toml_round_trip() {
        let m = Manifest::parse_toml(
            r#"
            schema = "rieszlab/1"
            command = "polarize"
            domain = "cube"
            d = 1
            N = 1
            s = 5.0
            "#,
        )
        .unwrap();
        assert_eq!(m.domain, Some(DomainSet::cube(1)));
        assert_eq!((m.s_list.as_slice(), m.n_list.as_slice(), m.seed), (&[5.0][..], &[1][..], 0));
        assert_eq!(m.hash().len(), 16);
    }

    #[test]
    fn hash_ignores_output_location() {
        let base = "command = \"cover\"\ndomain = \"cube\"\nd = 2\nN = 3\n";
        let a = Manifest::parse_toml(base).unwrap();
        let b = Manifest::parse_toml(&format!("{base}out_dir = \"x\"\nformat = \"csv\"\n")).unwrap();
        let c = Manifest::parse_toml(&format!("{base}seed = 1\n")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn rejections() {
        for bad in [
            "command = \"cover\"\ndomain = \"torus\"\nd = 2\nN = 3\n",
            "command = \"cover\"\ndomain = \"cube\"\nN = 3\n",
            "command = \"polarize\"\ndomain = \"cube\"\nd = 2\nN = 3\n",
            "schema = \"rieszlab/0\"\ncommand = \"cover\"\ndomain = \"cube\"\nd = 2\nN = 3\n",
            "command = \"cover\"\ndomain = \"cube\"\nd = 2\nN = 3\nN_list = [3]\n",
            "command = \"cover\"\ndomain = \"cube\"\nd = 2\nN = 3\ncolour = 1\n",
        ] {
            assert!(Manifest::parse_toml(bad).is_err(), "{bad}");
        }
    }
}
