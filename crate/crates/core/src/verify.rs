//! Builds verification reports for the theorem selectors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::SubbundleInstance;
use crate::lichnerowicz::{
    closed_form_s_coefficient, flat_lichnerowicz_check, interior_coefficient, trace_e, EKind, InteriorRoute,
};
use crate::pipelines::{
    assemble_theorem, compute_theorem_cases, diagnostics_sigma2_variants, paper_a_sum, paper_total, sum_cases, Case,
    MainTheorem, Theorem,
};
use crate::report::{ReportEntry, RunMeta, VerificationReport};
use crate::scalar::{GaussRat, Poly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    Thm11,
    Thm12,
    Thm21Flat,
    Thm22,
    Boundary(Theorem),
    All,
}

impl Selector {
    pub const NAMES: [&'static str; 9] =
        ["thm1.1", "thm1.2", "thm2.1-flat", "thm2.2", "thm3.6", "thm3.7", "thm4.3", "thm4.4", "all"];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "thm1.1" => Selector::Thm11,
            "thm1.2" => Selector::Thm12,
            "thm2.1-flat" => Selector::Thm21Flat,
            "thm2.2" => Selector::Thm22,
            "all" => Selector::All,
            _ => match Theorem::parse(s) {
                Ok(t) if t.selector() == s => Selector::Boundary(t),
                _ => return Err(Error::Unsupported(format!("unknown selector {s:?}"))),
            },
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Selector::Thm11 => "thm1.1",
            Selector::Thm12 => "thm1.2",
            Selector::Thm21Flat => "thm2.1-flat",
            Selector::Thm22 => "thm2.2",
            Selector::Boundary(t) => t.selector(),
            Selector::All => "all",
        }
    }

    fn dims(self, n: Option<usize>) -> Vec<usize> {
        match self {
            Selector::Thm11 => vec![4],
            Selector::Thm12 => vec![6],
            Selector::Boundary(t) => vec![t.n()],
            Selector::Thm21Flat => vec![n.unwrap_or(4)],
            Selector::Thm22 | Selector::All => n.map(|x| vec![x]).unwrap_or_else(|| vec![4, 6]),
        }
    }
}

/// Where instances come from: an explicit instance for its own dimension,
/// seeded random instances otherwise.
#[derive(Clone, Debug)]
pub struct InstanceSource {
    pub seed: u64,
    pub rank: usize,
    pub fixed: Option<SubbundleInstance>,
}

impl InstanceSource {
    pub fn seeded(seed: u64) -> Self {
        InstanceSource { seed, rank: 2, fixed: None }
    }
    pub fn instance(&self, n: usize) -> Result<SubbundleInstance> {
        if let Some(f) = &self.fixed {
            if f.n == n {
                f.validate()?;
                return Ok(f.clone());
            }
        }
        SubbundleInstance::random(n, self.rank.min(n - 1), self.seed)
    }
}

/// Label of the opaque Ω token as printed next to the published values.
pub fn omega_label(n: usize) -> String {
    match n {
        4 => "Omega_3".into(),
        _ => format!("Omega_{}", n - 2),
    }
}

fn boundary_entries(th: Theorem, src: &InstanceSource, out: &mut VerificationReport) -> Result<()> {
    let inst = src.instance(th.n())?;
    let cases = compute_theorem_cases(th, &inst)?;
    let states_cases = matches!(th, Theorem::Phi | Theorem::Psi);
    for c in &cases {
        let paper = if states_cases || matches!(c.spec.case, Case::B | Case::C) { c.paper_value.clone() } else { None };
        out.push(ReportEntry::new(c.spec.key(), c.coefficient.clone(), paper).with_notes(c.diagnostics.clone()));
    }
    if !states_cases {
        let a_sum = cases[..3].iter().fold(Poly::zero(), |acc, c| &acc + &c.coefficient);
        out.push(ReportEntry::new(format!("{}/a-sum", th.key()), a_sum, Some(paper_a_sum(th))));
    }
    if th == Theorem::Psi {
        let d = diagnostics_sigma2_variants(&inst)?;
        let k = |s: &str| format!("psi/b/{s}");
        out.push(ReportEntry::new(k("a-squared-delta"), d.a_squared_delta.clone(), None).with_notes(vec![
            "difference of psi/b with and without the A-quadratic sigma_2 term, per unit Sum|S|^2".into(),
        ]));
        out.push(ReportEntry::new(k("composed-sigma2"), d.composed.clone(), None));
        out.push(
            ReportEntry::new(k("literal-sigma-display"), d.literal_sigma_branch.clone(), None)
                .with_notes(vec![d.notes[2].clone()]),
        );
        out.push(
            ReportEntry::new(k("literal-integrals"), d.literal_integrals.clone(), None)
                .with_notes(vec![d.notes[3].clone()]),
        );
    }
    out.push(ReportEntry::new(format!("{}/total", th.key()), sum_cases(&cases), Some(paper_total(th))));
    Ok(())
}

fn main_theorem_entries(ids: &[MainTheorem], src: &InstanceSource, out: &mut VerificationReport) -> Result<()> {
    for id in ids {
        let inst = src.instance(id.boundary_theorem().n())?;
        let a = assemble_theorem(*id, &inst)?;
        out.push(ReportEntry::new(
            format!("{}/interior-routes", id.key()),
            &a.interior - &a.interior_closed_form,
            Some(Poly::zero()),
        ));
        out.push(ReportEntry::new(
            format!("{}/interior", id.key()),
            a.interior.clone(),
            Some(a.interior_stated.clone()),
        ));
        out.push(ReportEntry::new(
            format!("{}/boundary", id.key()),
            a.boundary.clone(),
            Some(a.boundary_stated.clone()),
        ));
    }
    Ok(())
}

fn thm22_entries(dims: &[usize], src: &InstanceSource, out: &mut VerificationReport) -> Result<()> {
    for &n in dims {
        let inst = src.instance(n)?;
        for kind in [EKind::Star, EKind::Square] {
            let tag = match kind {
                EKind::Star => "star",
                EKind::Square => "square",
            };
            let r = trace_e(kind, &inst, None)?;
            out.push(ReportEntry::new(
                format!("eq-a27/n{n}/{tag}/K"),
                r.coefficient_of_k.clone(),
                Some(Poly::frac(-1, 4)),
            ));
            out.push(ReportEntry::new(
                format!("eq-a27/n{n}/{tag}/S"),
                r.coefficient_of_snorm_sq.clone(),
                Some(closed_form_s_coefficient(n, kind)),
            ));
            let a = interior_coefficient(n, kind, InteriorRoute::FromTraceE, &inst)?;
            let b = interior_coefficient(n, kind, InteriorRoute::ClosedForm, &inst)?;
            out.push(ReportEntry::new(format!("thm2.2/n{n}/{tag}"), a, Some(b)));
        }
    }
    Ok(())
}

fn flat_entries(n: usize, src: &InstanceSource, out: &mut VerificationReport) -> Result<()> {
    let ts = [GaussRat::one(), &GaussRat::frac(2, 3) + &(&GaussRat::i() * &GaussRat::frac(1, 5))];
    for k in [1, 2] {
        let inst = match &src.fixed {
            Some(f) if f.n == n && f.k == k => f.clone(),
            _ => SubbundleInstance::random(n, k, src.seed)?,
        };
        for kind in [EKind::Star, EKind::Square] {
            for t in &ts {
                let r = flat_lichnerowicz_check(&inst, t, kind)?;
                let bad = r.by_order.values().filter(|ok| !**ok).count() as i64;
                let tag = match kind {
                    EKind::Star => "star",
                    EKind::Square => "square",
                };
                out.push(
                    ReportEntry::new(
                        format!("thm2.1-flat/n{n}/k{k}/{tag}/t={}", Poly::constant(t.clone())),
                        Poly::int(bad),
                        Some(Poly::zero()),
                    )
                    .with_notes(vec!["number of derivative orders (0, 1, 2) where the two sides differ".into()]),
                );
            }
        }
    }
    Ok(())
}

/// Runs a selector. `n` narrows the dimension where the selector allows it.
pub fn run_verify(sel: Selector, n: Option<usize>, src: &InstanceSource) -> Result<VerificationReport> {
    if let Some(n) = n {
        if n != 4 && n != 6 {
            return Err(Error::Unsupported(format!("n = {n}; use 4 or 6")));
        }
    }
    let dims = sel.dims(n);
    let mut digests = BTreeMap::new();
    for &d in &dims {
        digests.insert(d.to_string(), src.instance(d)?.digest());
    }
    let meta = RunMeta {
        selector: sel.name().into(),
        dimensions: dims.clone(),
        seed: Some(src.seed),
        instance_digests: digests,
        omega_labels: dims.iter().map(|d| (d.to_string(), omega_label(*d))).collect(),
    };
    let mut out = VerificationReport::new(meta);
    match sel {
        Selector::Thm11 => main_theorem_entries(&[MainTheorem::FourStar, MainTheorem::FourSquare], src, &mut out)?,
        Selector::Thm12 => main_theorem_entries(&[MainTheorem::SixStar, MainTheorem::SixCube], src, &mut out)?,
        Selector::Thm21Flat => flat_entries(dims[0], src, &mut out)?,
        Selector::Thm22 => thm22_entries(&dims, src, &mut out)?,
        Selector::Boundary(t) => boundary_entries(t, src, &mut out)?,
        Selector::All => {
            let main: Vec<MainTheorem> =
                MainTheorem::ALL.into_iter().filter(|m| dims.contains(&m.boundary_theorem().n())).collect();
            main_theorem_entries(&main, src, &mut out)?;
            if dims.contains(&4) {
                flat_entries(4, src, &mut out)?;
            }
            thm22_entries(&dims, src, &mut out)?;
            for t in Theorem::ALL.into_iter().filter(|t| dims.contains(&t.n())) {
                boundary_entries(t, src, &mut out)?;
            }
        }
    }
    Ok(out)
}
