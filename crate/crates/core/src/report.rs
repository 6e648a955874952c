//! Verification reports: one entry per checked quantity, rendered as text or
//! JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{fmt_rat, parse_rat, GaussRat, Mono, Poly, Var, NVARS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub coeff_re: String,
    pub coeff_im: String,
    pub powers: BTreeMap<String, u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonExpr {
    pub text: String,
    pub terms: Vec<JsonTerm>,
}

impl JsonExpr {
    pub fn from_poly(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| JsonTerm {
                coeff_re: fmt_rat(&c.re),
                coeff_im: fmt_rat(&c.im),
                powers: m
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| (Var::from_index(i).json_key(), *e))
                    .collect(),
            })
            .collect();
        JsonExpr { text: p.to_string(), terms }
    }

    pub fn to_poly(&self) -> Result<Poly> {
        let mut out = Poly::zero();
        for t in &self.terms {
            let mut m: Mono = [0; NVARS];
            for (k, e) in &t.powers {
                let v = Var::from_json_key(k).ok_or_else(|| Error::Malformed(format!("unknown variable {k:?}")))?;
                m[v.index()] = *e;
            }
            let c = GaussRat::new(parse_rat(&t.coeff_re)?, parse_rat(&t.coeff_im)?);
            out = &out + &Poly::monomial(m, c);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMeta {
    pub selector: String,
    pub dimensions: Vec<usize>,
    pub seed: Option<u64>,
    pub instance_digests: BTreeMap<String, String>,
    pub omega_labels: BTreeMap<String, String>,
}

/// A compared quantity; entries without a reference value are informational.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportEntry {
    pub key: String,
    pub computed: Poly,
    pub paper: Option<Poly>,
    pub notes: Vec<String>,
}

impl ReportEntry {
    pub fn new(key: impl Into<String>, computed: Poly, paper: Option<Poly>) -> Self {
        ReportEntry { key: key.into(), computed, paper, notes: Vec::new() }
    }
    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes.extend(notes);
        self
    }
    pub fn matches(&self) -> Option<bool> {
        self.paper.as_ref().map(|p| (&self.computed - p).is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct JsonEntry {
    key: String,
    computed: JsonExpr,
    paper: Option<JsonExpr>,
    #[serde(rename = "match")]
    matches: Option<bool>,
    notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct JsonReport {
    meta: RunMeta,
    entries: Vec<JsonEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub meta: RunMeta,
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    pub fn new(meta: RunMeta) -> Self {
        VerificationReport { meta, entries: Vec::new() }
    }
    pub fn push(&mut self, e: ReportEntry) {
        self.entries.push(e);
    }
    /// True when every entry with a reference value matches it.
    pub fn all_match(&self) -> bool {
        self.entries.iter().all(|e| e.matches() != Some(false))
    }
    pub fn failures(&self) -> Vec<&ReportEntry> {
        self.entries.iter().filter(|e| e.matches() == Some(false)).collect()
    }

    pub fn to_json(&self) -> String {
        let r = JsonReport {
            meta: self.meta.clone(),
            entries: self
                .entries
                .iter()
                .map(|e| JsonEntry {
                    key: e.key.clone(),
                    computed: JsonExpr::from_poly(&e.computed),
                    paper: e.paper.as_ref().map(JsonExpr::from_poly),
                    matches: e.matches(),
                    notes: e.notes.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&r).expect("report serialises")
    }

    /// Reads a JSON report back and checks every match flag against the
    /// exact difference of its expressions.
    pub fn from_json(text: &str) -> Result<Self> {
        let r: JsonReport = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let mut out = VerificationReport::new(r.meta);
        for e in r.entries {
            let entry = ReportEntry {
                key: e.key.clone(),
                computed: e.computed.to_poly()?,
                paper: e.paper.as_ref().map(|p| p.to_poly()).transpose()?,
                notes: e.notes,
            };
            if entry.matches() != e.matches {
                return Err(Error::Invariant(format!("match flag of {} disagrees with its values", e.key)));
            }
            out.push(entry);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "selector {} | n {:?} | seed {} \n",
            self.meta.selector,
            self.meta.dimensions,
            self.meta.seed.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
        );
        for (k, d) in &self.meta.instance_digests {
            s.push_str(&format!("instance {k}: sha256 {d}\n"));
        }
        for (k, d) in &self.meta.omega_labels {
            s.push_str(&format!("Omega at n = {k} stands for {d}\n"));
        }
        for e in &self.entries {
            let tag = match e.matches() {
                Some(true) => "MATCH",
                Some(false) => "MISMATCH",
                None => "INFO",
            };
            s.push_str(&format!("{tag:8} {}: {}", e.key, e.computed));
            if let Some(p) = &e.paper {
                s.push_str(&format!("   [paper: {p}]"));
            }
            s.push('\n');
            for n in &e.notes {
                s.push_str(&format!("           note: {n}\n"));
            }
        }
        let f = self.failures().len();
        s.push_str(&format!("{} entries, {} mismatches\n", self.entries.len(), f));
        s
    }
}
