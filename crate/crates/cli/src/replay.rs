//! Re-verifies a result file: every recorded number that can be recomputed is.

use rieszlab::asymptotics::bounds_profile;
use rieszlab::covering::{covering_radius, eta_star, separation, weak_separation_verdict, CoveringReport};
use rieszlab::lattice::{lattice_density, Lattice};
use rieszlab::polarization::evaluate;
use rieszlab::riesz::potential;
use rieszlab::{Configuration, DomainSet, PolarizationResult, SolverOptions};

use crate::manifest::SCHEMA;
use crate::run::{CoveringRecord, Record, ResultFile, REPORT_TOL};

const REL: f64 = 1e-9;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) || a == b
}

struct Checker {
    failures: Vec<String>,
}

impl Checker {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    /// False, with a failure recorded, when a point lies outside the domain.
    fn contained(&mut self, domain: &DomainSet, cfg: &Configuration, label: &str) -> bool {
        match cfg.check_in(domain, 1e-9) {
            Ok(()) => true,
            Err(e) => {
                self.failures.push(format!("{label}: {e}"));
                false
            }
        }
    }

    fn polarization(&mut self, p: &PolarizationResult, opts: &SolverOptions, label: &str) {
        if !self.contained(&p.domain, &p.config, label) {
            return;
        }
        self.check(p.config.len() == p.n, || format!("{label}: {} points recorded for N = {}", p.config.len(), p.n));
        match p.domain.contains(&p.witness, 1e-9) {
            Ok(true) => {}
            _ => self.failures.push(format!("{label}: witness outside the domain")),
        }
        match potential(&p.config, &p.witness, p.s) {
            Ok(v) => self.check(close(v, p.value, REL), || {
                format!("{label}: value {} but potential at the witness is {v}", p.value)
            }),
            Err(e) => self.failures.push(format!("{label}: {e}")),
        }
        self.check(p.bracket.0 <= p.value * (1.0 + REL) && p.value <= p.bracket.1 * (1.0 + REL), || {
            format!("{label}: value {} outside bracket {:?}", p.value, p.bracket)
        });
        let again = match evaluate(&p.domain, &p.config, p.s, opts) {
            Ok(r) => r,
            Err(e) => return self.failures.push(format!("{label}: {e}")),
        };
        // Both brackets contain the true minimum, so they must overlap.
        let overlap = again.bracket.0 <= p.bracket.1 * (1.0 + REL) && p.bracket.0 <= again.bracket.1 * (1.0 + REL);
        self.check(overlap, || format!("{label}: bracket {:?} disagrees with recomputed {:?}", p.bracket, again.bracket));
    }

    fn covering(&mut self, c: &CoveringRecord, tol: f64, label: &str) {
        if !self.contained(&c.domain, &c.config, label) {
            return;
        }
        self.check(c.config.len() == c.n, || format!("{label}: {} points recorded for N = {}", c.config.len(), c.n));
        self.check(c.radius.rho <= c.radius.upper * (1.0 + REL), || {
            format!("{label}: rho {} above its upper bound {}", c.radius.rho, c.radius.upper)
        });
        match covering_radius(&c.domain, &c.config, tol) {
            Ok(again) => self.check(again.rho <= c.radius.upper + tol && c.radius.rho <= again.upper + tol, || {
                format!("{label}: rho bracket [{}, {}] disagrees with recomputed [{}, {}]", c.radius.rho, c.radius.upper, again.rho, again.upper)
            }),
            Err(e) => self.failures.push(format!("{label}: {e}")),
        }
    }

    fn report(&mut self, domain: &DomainSet, cfg: &Configuration, r: &CoveringReport, eta: &[f64], label: &str) {
        self.check(r.rho_lo <= r.rho_hi * (1.0 + REL), || format!("{label}: rho {} above its upper bound {}", r.rho_lo, r.rho_hi));
        let tol = REPORT_TOL * domain.diameter();
        match covering_radius(domain, cfg, tol) {
            Ok(again) => self.check(again.rho <= r.rho_hi + tol && r.rho_lo <= again.upper + tol, || {
                format!("{label}: rho bracket disagrees with recomputed [{}, {}]", again.rho, again.upper)
            }),
            Err(e) => self.failures.push(format!("{label}: {e}")),
        }
        let delta = if cfg.len() >= 2 { separation(cfg).ok() } else { None };
        let same_delta = match (delta, r.delta) {
            (Some(a), Some(b)) => close(a, b, REL),
            (a, b) => a == b,
        };
        self.check(same_delta, || format!("{label}: separation {:?}, recomputed {delta:?}", r.delta));
        let weak = weak_separation_verdict(domain, cfg, eta);
        self.check(weak == r.weak_sep, || format!("{label}: weak-separation counts differ on recount"));
        let star = eta_star(domain, cfg);
        let same = match (star, r.eta_star) {
            (Some(a), Some(b)) => close(a, b, REL),
            (a, b) => a == b,
        };
        self.check(same, || format!("{label}: eta* {:?}, recomputed {star:?}", r.eta_star));
    }

    fn lattice(&mut self, l: &Lattice, density: f64, det: f64, label: &str) {
        match Lattice::new(l.generators.clone()) {
            Ok(fresh) => {
                self.check(close(fresh.det(), det, REL), || format!("{label}: det {det}, recomputed {}", fresh.det()));
                let again = lattice_density(&fresh);
                self.check(close(again, density, REL), || format!("{label}: density {density}, recomputed {again}"));
            }
            Err(e) => self.failures.push(format!("{label}: {e}")),
        }
    }
}

/// Replays a result file. Returns the list of failed checks; empty means it passed.
pub fn replay(file: &ResultFile) -> Vec<String> {
    let mut c = Checker { failures: Vec::new() };
    let m = &file.manifest;
    c.check(file.schema == SCHEMA, || format!("schema {:?}, expected {SCHEMA:?}", file.schema));
    let hash = m.hash();
    c.check(hash == file.manifest_hash, || format!("manifest hash {} does not match its manifest ({hash})", file.manifest_hash));
    let mut diagnosed: Vec<&PolarizationResult> = Vec::new();
    for (i, r) in file.records.iter().enumerate() {
        let label = format!("record {i}");
        match r {
            Record::Polarization(p) => c.polarization(p, &m.solver, &label),
            Record::Covering(cov) => c.covering(cov, m.cover.tol, &label),
            Record::Diagnostic(d) => {
                let p = &d.polarization;
                let before = c.failures.len();
                c.polarization(p, &m.solver, &label);
                if c.failures.len() == before {
                    c.report(&p.domain, &p.config, &d.report, &m.eta_list, &label);
                }
                diagnosed.push(p);
            }
            Record::Profile(prof) => {
                let runs: Vec<PolarizationResult> =
                    diagnosed.iter().filter(|p| p.s == prof.s).map(|p| (*p).clone()).collect();
                match bounds_profile(&runs) {
                    Ok(again) => c.check(close(again.c_hat, prof.profile.c_hat, REL) && close(again.p_hat, prof.profile.p_hat, REL), || {
                        format!("{label}: bounds profile differs from the recomputed one")
                    }),
                    Err(e) => c.failures.push(format!("{label}: {e}")),
                }
            }
            Record::Sigma(e) => {
                for (j, p) in e.runs.iter().enumerate() {
                    c.polarization(p, &m.solver, &format!("{label} run {j}"));
                }
            }
            Record::Chain(t) => {
                for (k, e) in t.sigma_fits.iter().enumerate() {
                    for (j, p) in e.runs.iter().enumerate() {
                        c.polarization(p, &m.solver, &format!("{label} s-row {k} run {j}"));
                    }
                }
                let domain = m.domain.clone().unwrap_or_else(|| DomainSet::cube(t.d));
                for (j, b) in t.covering_fit.runs.iter().enumerate() {
                    let rec = CoveringRecord { domain: domain.clone(), n: b.config.len(), radius: b.radius.clone(), config: b.config.clone() };
                    c.covering(&rec, m.cover.tol, &format!("{label} covering run {j}"));
                }
            }
            Record::Lattice(l) => c.lattice(&l.lattice, l.density, l.det, &label),
        }
    }
    c.failures
}
