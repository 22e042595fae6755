//! Analysis report. The JSON and text forms are both rendered from
//! [`SystemReport`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub command: String,
    pub system: SystemSection,
    pub legendre: LegendreSection,
    pub contact: Option<ContactSection>,
    pub ledgers: Vec<LedgerSection>,
    /// Present when more than one engine ran.
    pub engines_agree: Option<bool>,
    pub classification: Option<ClassificationSection>,
    pub total_hamiltonian: Option<TotalHamiltonianSection>,
    pub equations_of_motion: Option<Vec<EomRow>>,
    pub tangency: Option<Vec<TangencyEntry>>,
    pub integration: Option<IntegrationSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSection {
    pub kind: String,
    pub n: usize,
    pub lagrangian: String,
    pub phase_coordinates: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreSection {
    pub momenta: Vec<String>,
    pub hessian: Vec<Vec<String>>,
    pub rank: usize,
    pub primaries: Vec<String>,
    pub h0: String,
    pub energy: String,
    pub velocity_solution: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactSection {
    pub eta: String,
    pub class: usize,
    pub reeb: String,
    pub reeb_unique: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintEntry {
    pub expr: String,
    pub stage: usize,
    pub origin: String,
    pub classification: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InconsistencySection {
    pub stage: usize,
    pub source: Option<String>,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerSection {
    pub engine: String,
    pub status: String,
    pub stages_run: usize,
    pub frozen: bool,
    pub constraints: Vec<ConstraintEntry>,
    pub multiplier_fixings: BTreeMap<String, String>,
    pub inconsistency: Option<InconsistencySection>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSection {
    pub bracket: String,
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
    pub kernel_vectors: Vec<Vec<String>>,
    pub complement_vectors: Vec<Vec<String>>,
    pub first: Vec<String>,
    pub second: Vec<String>,
    pub c_matrix: Vec<Vec<String>>,
    pub c_inverse: Vec<Vec<String>>,
    /// Symplectic systems only.
    pub coisotropic: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTerm {
    pub multiplier: String,
    pub constraint: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalHamiltonianSection {
    pub base: String,
    pub terms: Vec<MultiplierTerm>,
    pub expr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EomRow {
    pub variable: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyEntry {
    pub constraint: String,
    pub derivative: String,
    pub tangent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftEntry {
    pub constraint: String,
    pub max_abs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSection {
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
    pub multipliers: BTreeMap<String, String>,
    pub final_state: BTreeMap<String, f64>,
    pub drift: Vec<DriftEntry>,
    pub max_drift: f64,
    pub csv: Option<String>,
}

impl SystemReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<SystemReport, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let s = &self.system;
        line(w, format!("system: {} n={}", s.kind, s.n));
        line(w, format!("  L = {}", s.lagrangian));
        line(w, format!("  phase coordinates: {}", s.phase_coordinates.join(", ")));

        let l = &self.legendre;
        line(w, "legendre:".into());
        for (i, m) in l.momenta.iter().enumerate() {
            line(w, format!("  dL/dv{} = {m}", i + 1));
        }
        line(w, format!("  hessian rank {}", l.rank));
        matrix(w, "  ", &l.hessian);
        list(w, "  primaries", &l.primaries);
        line(w, format!("  H0 = {}", l.h0));
        line(w, format!("  E_L = {}", l.energy));

        if let Some(c) = &self.contact {
            line(w, "contact:".into());
            line(w, format!("  eta_L = {}", c.eta));
            line(w, format!("  class {}", c.class));
            line(
                w,
                format!("  reeb = {}{}", c.reeb, if c.reeb_unique { "" } else { " (default choice, not unique)" }),
            );
        }

        for ledger in &self.ledgers {
            line(w, format!("ledger [{}]: {} after {} stage(s)", ledger.engine, ledger.status, ledger.stages_run));
            for c in &ledger.constraints {
                line(w, format!("  stage {} {:<19} {:<12} {}", c.stage, c.origin, c.classification, c.expr));
            }
            for (m, v) in &ledger.multiplier_fixings {
                line(w, format!("  fixed {m} = {v}"));
            }
            if ledger.frozen {
                line(w, "  final surface has dimension zero (frozen dynamics)".into());
            }
            if let Some(inc) = &ledger.inconsistency {
                let src = inc.source.as_deref().map(|s| format!(" preserving {s}")).unwrap_or_default();
                line(w, format!("  inconsistent at stage {}{src}: residual {} = 0", inc.stage, inc.residual));
            }
        }
        if let Some(agree) = self.engines_agree {
            line(w, format!("engines agree: {}", if agree { "yes" } else { "no" }));
        }

        if let Some(c) = &self.classification {
            line(w, format!("classification ({} bracket, rank {}):", c.bracket, c.rank));
            matrix(w, "  ", &c.matrix);
            list(w, "  first class", &c.first);
            list(w, "  second class", &c.second);
            if !c.second.is_empty() {
                line(w, "  C =".into());
                matrix(w, "    ", &c.c_matrix);
                line(w, "  C^-1 =".into());
                matrix(w, "    ", &c.c_inverse);
            }
            if let Some(co) = c.coisotropic {
                line(w, format!("  first-class surface coisotropic: {}", if co { "yes" } else { "no" }));
            }
        }

        if let Some(h) = &self.total_hamiltonian {
            line(w, format!("H_T = {}", h.expr));
        }
        if let Some(rows) = &self.equations_of_motion {
            line(w, "equations of motion:".into());
            let width = rows.iter().map(|r| r.variable.len()).max().unwrap_or(0) + 4;
            for r in rows {
                line(w, format!("  {:<width$} = {}", format!("d{}/dt", r.variable), r.rhs));
            }
        }
        if let Some(t) = &self.tangency {
            line(w, "tangency:".into());
            for e in t {
                let verdict = if e.tangent { "ok" } else { "NOT TANGENT" };
                line(w, format!("  d({})/dt = {}  [{verdict}]", e.constraint, e.derivative));
            }
        }
        if let Some(i) = &self.integration {
            line(w, format!("integration: t_end={} dt={} samples={}", i.t_end, i.dt, i.samples));
            for (m, v) in &i.multipliers {
                line(w, format!("  {m} = {v}"));
            }
            for (v, x) in &i.final_state {
                line(w, format!("  {v}(t_end) = {x}"));
            }
            for d in &i.drift {
                line(w, format!("  drift of {}: {:.3e}", d.constraint, d.max_abs));
            }
            line(w, format!("  max drift {:.3e}", i.max_drift));
            if let Some(p) = &i.csv {
                line(w, format!("  trajectory written to {p}"));
            }
        }
        out
    }
}

fn line(out: &mut String, s: String) {
    out.push_str(&s);
    out.push('\n');
}

fn list(out: &mut String, label: &str, items: &[String]) {
    if items.is_empty() {
        let _ = writeln!(out, "{label}: none");
    } else {
        let _ = writeln!(out, "{label}: {}", items.join(", "));
    }
}

fn matrix(out: &mut String, indent: &str, m: &[Vec<String>]) {
    let cols = m.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols).map(|j| m.iter().map(|r| r[j].len()).max().unwrap_or(0)).collect();
    for row in m {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{indent}[ {} ]", cells.join("  "));
    }
}
