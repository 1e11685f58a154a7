//! Executes a manifest and renders its records as JSON and CSV.

use std::fmt::Write as _;

use rieszlab::asymptotics::{bounds_profile, estimate_sigma, sth_root_chain, BoundsProfile, ChainTable, SigmaEstimate};
use rieszlab::covering::{best_covering, covering_report, CoveringReport, CoveringRadius};
use rieszlab::lattice::{density_by_counting, lattice_covering_radius, lattice_density, Lattice, LatticeRadius};
use rieszlab::polarization::{maximize_polarization, polarization_curve};
use rieszlab::{Configuration, DomainSet, PolarizationResult};
use serde::{Deserialize, Serialize};

use crate::manifest::{Command, Manifest, SCHEMA};

/// Relative tolerance of covering radii in diagnostic reports.
pub const REPORT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringRecord {
    pub domain: DomainSet,
    pub n: usize,
    pub radius: CoveringRadius,
    pub config: Configuration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub polarization: PolarizationResult,
    pub report: CoveringReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub domain: DomainSet,
    pub s: f64,
    pub profile: BoundsProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub lattice: Lattice,
    pub det: f64,
    pub radius: LatticeRadius,
    pub density: f64,
    /// `(R, estimate)` pairs of the counting estimate of the density.
    pub counting: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Polarization(PolarizationResult),
    Covering(CoveringRecord),
    Diagnostic(Box<DiagnosticRecord>),
    Profile(ProfileRecord),
    Sigma(SigmaEstimate),
    Chain(Box<ChainTable>),
    Lattice(LatticeRecord),
}

impl Record {
    /// False when a certification ran out of budget.
    pub fn certified(&self) -> bool {
        match self {
            Record::Polarization(p) => p.certified,
            Record::Covering(c) => c.radius.certified,
            Record::Diagnostic(d) => d.polarization.certified && d.report.rho_certified,
            Record::Sigma(s) => s.runs.iter().all(|r| r.certified),
            Record::Chain(c) => {
                c.sigma_fits.iter().all(|s| s.runs.iter().all(|r| r.certified))
                    && c.covering_fit.runs.iter().all(|r| r.radius.certified)
            }
            Record::Profile(_) | Record::Lattice(_) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema: String,
    pub manifest_hash: String,
    pub manifest: Manifest,
    pub records: Vec<Record>,
}

impl ResultFile {
    pub fn all_certified(&self) -> bool {
        self.records.iter().all(Record::certified)
    }
}

/// Input rejected while running, such as an exponent outside the domain's regime.
#[derive(Debug)]
pub struct RunError(pub String);

impl From<rieszlab::Error> for RunError {
    fn from(e: rieszlab::Error) -> Self {
        RunError(e.to_string())
    }
}

fn named_lattices(name: &str) -> Result<Vec<Lattice>, RunError> {
    let lower = name.to_ascii_lowercase();
    let parse_d = |rest: &str| -> Result<usize, RunError> {
        rest.parse().map_err(|_| RunError(format!("unknown lattice {name:?}")))
    };
    Ok(match lower.as_str() {
        "hex" => vec![Lattice::hexagonal()],
        _ if lower.starts_with("all") => {
            let d = parse_d(&lower[3..])?;
            let mut v = vec![Lattice::integer(d)?];
            if d >= 2 {
                v.push(Lattice::a_lattice(d)?);
                v.push(Lattice::a_dual_lattice(d)?);
            }
            v
        }
        _ if lower.starts_with('z') => vec![Lattice::integer(parse_d(&lower[1..])?)?],
        _ if lower.starts_with('a') && lower.ends_with('*') => vec![Lattice::a_dual_lattice(parse_d(&lower[1..lower.len() - 1])?)?],
        _ if lower.starts_with('a') => vec![Lattice::a_lattice(parse_d(&lower[1..])?)?],
        _ => return Err(RunError(format!("unknown lattice {name:?}"))),
    })
}

fn lattice_record(lattice: Lattice) -> LatticeRecord {
    let radius = lattice_covering_radius(&lattice);
    let counting = if lattice.dim() <= 2 {
        let radii = [10.0, 20.0, 40.0];
        radii.iter().copied().zip(density_by_counting(&lattice, &radii).expect("positive radii")).collect()
    } else {
        Vec::new()
    };
    LatticeRecord { det: lattice.det(), density: lattice_density(&lattice), radius, counting, lattice }
}

/// Runs every cell of the manifest in manifest order.
pub fn run(m: &Manifest) -> Result<ResultFile, RunError> {
    let mut records = Vec::new();
    let domain = m.domain.as_ref();
    match m.command {
        Command::Polarize => {
            let dom = domain.expect("validated");
            for &s in &m.s_list {
                for &n in &m.n_list {
                    records.push(Record::Polarization(maximize_polarization(dom, n, s, &m.solver)?));
                }
            }
        }
        Command::Cover => {
            let dom = domain.expect("validated");
            for &n in &m.n_list {
                let b = best_covering(dom, n, &m.cover)?;
                records.push(Record::Covering(CoveringRecord { domain: dom.clone(), n, radius: b.radius, config: b.config }));
            }
        }
        Command::Diagnose => {
            let dom = domain.expect("validated");
            for &s in &m.s_list {
                let runs = polarization_curve(dom, s, &m.n_list, &m.solver)?;
                for p in &runs {
                    let report = covering_report(dom, &p.config, &m.eta_list, &m.probe_radii, REPORT_TOL * dom.diameter())?;
                    records.push(Record::Diagnostic(Box::new(DiagnosticRecord { polarization: p.clone(), report })));
                }
                if s > dom.dim() as f64 {
                    records.push(Record::Profile(ProfileRecord { domain: dom.clone(), s, profile: bounds_profile(&runs)? }));
                }
            }
        }
        Command::Sigma => {
            let dom = domain.expect("validated");
            for &s in &m.s_list {
                records.push(Record::Sigma(estimate_sigma(dom, s, &m.n_list, &m.solver)?));
            }
        }
        Command::Chain => {
            let dom = domain.expect("validated");
            records.push(Record::Chain(Box::new(sth_root_chain(dom, &m.s_list, &m.n_list, &m.solver, &m.cover)?)));
        }
        Command::Lattice => {
            let lattices = match (&m.basis, &m.lattice_name) {
                (Some(b), name) => {
                    let mut l = Lattice::new(b.clone())?;
                    l.name = name.clone();
                    vec![l]
                }
                (None, Some(name)) => named_lattices(name)?,
                (None, None) => return Err(RunError("command lattice needs name, basis or d".into())),
            };
            records.extend(lattices.into_iter().map(|l| Record::Lattice(lattice_record(l))));
        }
    }
    Ok(ResultFile { schema: SCHEMA.to_string(), manifest_hash: m.hash(), manifest: m.clone(), records })
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn domain_cols(domain: &DomainSet) -> String {
    format!("{},{},{}", domain.name(), domain.dim(), domain.ambient_dim())
}

fn scaled(value: f64, n: usize, s: f64, d: usize) -> f64 {
    value / (n as f64).powf(s / d as f64)
}

/// CSV table of the records. Every row carries domain, d, ℓ, s, N, seed and the manifest hash.
pub fn to_csv(file: &ResultFile) -> String {
    let m = &file.manifest;
    let seed = m.seed;
    let hash = &file.manifest_hash;
    let mut out = String::new();
    let prefix = "domain,d,ell,s,N,seed,options_hash";
    let header = match m.command {
        Command::Polarize => "value,log_value,lower,upper,certified,scaled_value,scaled_witness_gap",
        Command::Cover => "rho,rho_upper,scaled_rho,certified",
        Command::Diagnose => {
            "value,scaled_value,certified,rho,rho_upper,scaled_rho,delta,eta_star,eta,m_observed,m_bound,\
             boundary_min_scaled,corner_min_scaled,scaled_witness_gap,max_discrepancy"
        }
        Command::Sigma => "sigma,a,p,residual,method",
        Command::Chain => "sigma,sigma_root,covering_leg,gap,target",
        Command::Lattice => "name,det,radius_lower,radius_upper,exact,density",
    };
    let _ = writeln!(out, "{prefix},{header}");
    for r in &file.records {
        match r {
            Record::Polarization(p) => {
                let d = p.domain.dim();
                let _ = writeln!(
                    out,
                    "{},{},{},{seed},{hash},{},{},{},{},{},{},{}",
                    domain_cols(&p.domain),
                    num(p.s),
                    p.n,
                    num(p.value),
                    num(p.log_value),
                    num(p.bracket.0),
                    num(p.bracket.1),
                    p.certified,
                    num(scaled(p.value, p.n, p.s, d)),
                    num(p.scaled_witness_gap()),
                );
            }
            Record::Covering(c) => {
                let d = c.domain.dim();
                let _ = writeln!(
                    out,
                    "{},,{},{seed},{hash},{},{},{},{}",
                    domain_cols(&c.domain),
                    c.n,
                    num(c.radius.rho),
                    num(c.radius.upper),
                    num(c.radius.rho * (c.n as f64).powf(1.0 / d as f64)),
                    c.radius.certified,
                );
            }
            Record::Diagnostic(dr) => {
                let (p, rep) = (&dr.polarization, &dr.report);
                let d = p.domain.dim();
                let (eta, m_obs, m_bound) = rep.weak_sep.first().map_or((None, String::new(), String::new()), |v| {
                    (Some(v.eta), v.m_observed.to_string(), v.m_bound.to_string())
                });
                let disc = rep.discrepancy.iter().map(|x| x.1).fold(0.0, f64::max);
                let _ = writeln!(
                    out,
                    "{},{},{},{seed},{hash},{},{},{},{},{},{},{},{},{},{m_obs},{m_bound},{},{},{},{}",
                    domain_cols(&p.domain),
                    num(p.s),
                    p.n,
                    num(p.value),
                    num(scaled(p.value, p.n, p.s, d)),
                    p.certified,
                    num(rep.rho),
                    num(rep.rho_hi),
                    num(rep.rho_hi * (p.n as f64).powf(1.0 / d as f64)),
                    opt(rep.delta),
                    opt(rep.eta_star),
                    opt(eta),
                    opt(rep.boundary_min_scaled),
                    opt(rep.corner_min_scaled),
                    num(p.scaled_witness_gap()),
                    num(disc),
                );
            }
            Record::Profile(_) => {}
            Record::Sigma(e) => {
                let dom = m.domain.as_ref().expect("validated");
                let ns: Vec<String> = e.runs.iter().map(|r| r.n.to_string()).collect();
                let _ = writeln!(
                    out,
                    "{},{},{},{seed},{hash},{},{},{},{},{:?}",
                    domain_cols(dom),
                    num(e.s),
                    ns.join(";"),
                    num(e.fit.limit),
                    num(e.fit.a),
                    num(e.fit.p),
                    num(e.fit.residual),
                    e.fit.method,
                );
            }
            Record::Chain(c) => {
                let dom = m.domain.as_ref().expect("validated");
                let ns: Vec<String> = m.n_list.iter().map(|n| n.to_string()).collect();
                for row in &c.rows {
                    let _ = writeln!(
                        out,
                        "{},{},{},{seed},{hash},{},{},{},{},{}",
                        domain_cols(dom),
                        num(row.s),
                        ns.join(";"),
                        num(row.sigma),
                        num(row.sigma_root),
                        num(c.covering_leg),
                        num(row.gap),
                        opt(c.target),
                    );
                }
            }
            Record::Lattice(l) => {
                let d = l.lattice.dim();
                let _ = writeln!(
                    out,
                    "lattice,{d},{d},,,{seed},{hash},{},{},{},{},{},{}",
                    l.lattice.name.clone().unwrap_or_default(),
                    num(l.det),
                    num(l.radius.lower),
                    num(l.radius.upper),
                    l.radius.exact,
                    num(l.density),
                );
            }
        }
    }
    out
}

/// CSV of the bounds profiles of a diagnose run, if any.
pub fn profile_csv(file: &ResultFile) -> Option<String> {
    let rows: Vec<&ProfileRecord> = file
        .records
        .iter()
        .filter_map(|r| match r {
            Record::Profile(p) => Some(p),
            _ => None,
        })
        .collect();
    if rows.is_empty() {
        return None;
    }
    let mut out = String::from(
        "domain,d,ell,s,N,seed,options_hash,c_hat,big_c_hat,p_hat,r_hat,b_hat,eta_hat,c_d,r_formula,formula_holds\n",
    );
    let ns: Vec<String> = file.manifest.n_list.iter().map(|n| n.to_string()).collect();
    for p in rows {
        let b = &p.profile;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            domain_cols(&p.domain),
            num(p.s),
            ns.join(";"),
            file.manifest.seed,
            file.manifest_hash,
            num(b.c_hat),
            num(b.big_c_hat),
            num(b.p_hat),
            num(b.r_hat),
            opt(b.b_hat),
            opt(b.eta_hat),
            num(b.c_d),
            num(b.r_formula),
            b.formula_holds,
        );
    }
    Some(out)
}
