use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{support_leakage, SUPPORT_CUTOFF, SUPPORT_TOL};
use crate::error::{Error, Result};
use crate::info::{maassen_uffink_bound, measured_conditional_entropy, mutual_information};
use crate::linalg::{eigh, CMatrix, C64, ZERO};
use crate::math::{log2, sqrt};
use crate::qcore::{resolve, DensityState, Layout, ProjectiveBasis, SystemLabel};

/// What "the targets are compatible" means.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Semantics {
    /// Every marginal of the joint state equals its target.
    ExactMarginals,
    /// Every marginal of the joint state is supported inside its target's
    /// support (the agreement condition).
    SupportContainment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    PureMarginal,
    Monogamy,
    Entropic,
    InconsistentOverlap,
    ResidualPlateau,
}

/// Target marginals on (possibly overlapping) subsets of a global system
/// list. Targets are stored with their factors in global order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalConstraintSet {
    systems: Vec<SystemLabel>,
    targets: Vec<DensityState>,
    semantics: Semantics,
}

impl MarginalConstraintSet {
    pub fn new(systems: Vec<SystemLabel>, semantics: Semantics) -> Result<Self> {
        let names: Vec<&str> = systems.iter().map(|s| s.name.as_str()).collect();
        resolve(&systems, &names)?;
        Ok(MarginalConstraintSet { systems, targets: Vec::new(), semantics })
    }

    /// Global systems = union of the targets' systems in first-seen order.
    pub fn from_targets(targets: Vec<DensityState>, semantics: Semantics) -> Result<Self> {
        let mut systems: Vec<SystemLabel> = Vec::new();
        for t in &targets {
            for s in t.systems() {
                match systems.iter().find(|x| x.name == s.name) {
                    Some(x) if x.dim != s.dim => {
                        return Err(Error::DimensionMismatch(format!("{x} vs {s}")));
                    }
                    Some(_) => {}
                    None => systems.push(s.clone()),
                }
            }
        }
        let mut c = Self::new(systems, semantics)?;
        for t in targets {
            c.add(t)?;
        }
        Ok(c)
    }

    /// Marginals of `global` on each subset, under exact semantics.
    pub fn from_state(global: &DensityState, subsets: &[&[&str]]) -> Result<Self> {
        let mut c = Self::new(global.systems().to_vec(), Semantics::ExactMarginals)?;
        for s in subsets {
            c.add(global.partial_trace(s)?)?;
        }
        Ok(c)
    }

    pub fn add(&mut self, target: DensityState) -> Result<()> {
        for s in target.systems() {
            let g = self
                .systems
                .iter()
                .find(|x| x.name == s.name)
                .ok_or_else(|| Error::UnknownLabel(s.name.clone()))?;
            if g.dim != s.dim {
                return Err(Error::DimensionMismatch(format!("{g} vs {s}")));
            }
        }
        if target.systems().is_empty() {
            return Err(Error::InvalidArgument("target on no systems".into()));
        }
        let mut order: Vec<&str> = target.names();
        order.sort_by_key(|n| self.systems.iter().position(|s| s.name == *n));
        let t = target.permuted(&order)?;
        self.targets.push(t);
        Ok(())
    }

    pub fn systems(&self) -> &[SystemLabel] {
        &self.systems
    }

    pub fn targets(&self) -> &[DensityState] {
        &self.targets
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    fn positions(&self, t: &DensityState) -> Vec<usize> {
        resolve(&self.systems, &t.names()).expect("targets validated on insertion")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Internal stopping residual.
    pub tolerance: f64,
    /// Largest residual accepted for a feasible verdict.
    pub feasible_residual: f64,
    pub plateau_window: usize,
    pub plateau_floor: f64,
    pub plateau_relative_change: f64,
    /// Iteration budget for the solver run that accompanies a certificate.
    pub certified_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 20_000,
            tolerance: 1e-9,
            feasible_residual: 1e-7,
            plateau_window: 200,
            plateau_floor: 1e-4,
            plateau_relative_change: 1e-12,
            certified_iterations: 2_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub semantics: Semantics,
    /// Frobenius distance from the last PSD iterate to the affine set.
    pub residual: f64,
    pub iterations: usize,
    pub certificate: Option<String>,
    pub certificate_kind: Option<CertificateKind>,
    pub witness: Option<DensityState>,
}

pub fn agreement_feasible(c: &MarginalConstraintSet) -> Result<FeasibilityReport> {
    agreement_feasible_with(c, &SolverOptions::default())
}

pub fn agreement_feasible_with(c: &MarginalConstraintSet, opts: &SolverOptions) -> Result<FeasibilityReport> {
    if c.targets.is_empty() {
        return Err(Error::InvalidArgument("no targets".into()));
    }
    let cert = certificate(c)?;
    let budget = if cert.is_some() { opts.certified_iterations.min(opts.max_iterations) } else { opts.max_iterations };
    let run = Problem::new(c)?.solve(opts, budget);

    let mut report = FeasibilityReport {
        verdict: Verdict::Undecided,
        semantics: c.semantics,
        residual: run.residual,
        iterations: run.iterations,
        certificate: None,
        certificate_kind: None,
        witness: None,
    };
    if let Some((kind, text)) = cert {
        report.verdict = Verdict::Infeasible;
        report.certificate = Some(text);
        report.certificate_kind = Some(kind);
        return Ok(report);
    }
    if run.residual < opts.feasible_residual {
        if let Some(w) = witness(c, &run.x)? {
            report.verdict = Verdict::Feasible;
            report.witness = Some(w);
            return Ok(report);
        }
    }
    if run.plateau {
        report.verdict = Verdict::Infeasible;
        report.certificate = Some(format!(
            "residual plateau at {:.3e} (relative change below {:e} over {} iterations)",
            run.residual, opts.plateau_relative_change, opts.plateau_window
        ));
        report.certificate_kind = Some(CertificateKind::ResidualPlateau);
    }
    Ok(report)
}

/// Witness marginal tolerance in trace distance.
const WITNESS_TOL: f64 = 1e-7;
const PURE_TOL: f64 = 1e-9;
const MONOGAMY_SLACK: f64 = 1e-6;
const ENTROPIC_SLACK: f64 = 1e-9;

fn witness(c: &MarginalConstraintSet, x: &CMatrix) -> Result<Option<DensityState>> {
    let tr = x.trace().re;
    if tr <= 0.0 {
        return Ok(None);
    }
    let w = match DensityState::new(c.systems.clone(), x.scale_real(1.0 / tr).hermitian_part()) {
        Ok(w) => w,
        Err(_) => return Ok(None),
    };
    for t in &c.targets {
        let m = w.partial_trace(&t.names())?;
        let ok = match c.semantics {
            Semantics::ExactMarginals => m.trace_distance(t)? < WITNESS_TOL,
            Semantics::SupportContainment => support_leakage(m.matrix(), t.matrix()) <= SUPPORT_TOL,
        };
        if !ok {
            return Ok(None);
        }
    }
    Ok(Some(w))
}

fn names_str(n: &[&str]) -> String {
    n.join(",")
}

/// Analytic infeasibility proofs, tried in a fixed order.
fn certificate(c: &MarginalConstraintSet) -> Result<Option<(CertificateKind, String)>> {
    let exact = c.semantics == Semantics::ExactMarginals;
    let pure: Vec<bool> = c.targets.iter().map(|t| t.is_pure(PURE_TOL)).collect();
    let usable = |i: usize| exact || pure[i];
    let n = c.targets.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b))).collect();

    // A pure target forces the joint state to be a product across it.
    for &(a, b) in &pairs {
        if !pure[a] || !usable(b) {
            continue;
        }
        let (ta, tb) = (&c.targets[a], &c.targets[b]);
        let overlap: Vec<&str> = ta.names().into_iter().filter(|x| tb.has_system(x)).collect();
        if overlap.is_empty() {
            continue;
        }
        let ma = ta.partial_trace(&overlap)?;
        let mb = tb.partial_trace(&overlap)?;
        let d = ma.trace_distance(&mb)?;
        if d > WITNESS_TOL {
            let text = if pure[b] && !mb.is_pure(PURE_TOL) {
                format!(
                    "pure marginal of entangled pure state: target on {{{}}} is pure, while the pure target on {{{}}} is entangled across {{{}}} (marginal trace distance {:.6})",
                    names_str(&ta.names()),
                    names_str(&tb.names()),
                    names_str(&overlap),
                    d
                )
            } else {
                format!(
                    "pure marginal contradicts overlapping target: {{{}}} pure, {{{}}} differs on {{{}}} by trace distance {:.6}",
                    names_str(&ta.names()),
                    names_str(&tb.names()),
                    names_str(&overlap),
                    d
                )
            };
            return Ok(Some((CertificateKind::PureMarginal, text)));
        }
    }

    // I(A:q) + I(B:q) ≤ 2 log d_q for disjoint A, B.
    for &(a, b) in pairs.iter().filter(|(a, b)| a < b) {
        if !usable(a) || !usable(b) {
            continue;
        }
        let (ta, tb) = (&c.targets[a], &c.targets[b]);
        let sa: Vec<&str> = ta.names().into_iter().filter(|x| !tb.has_system(x)).collect();
        let sb: Vec<&str> = tb.names().into_iter().filter(|x| !ta.has_system(x)).collect();
        if sa.is_empty() || sb.is_empty() {
            continue;
        }
        for qs in ta.systems().iter().filter(|s| tb.has_system(&s.name)) {
            let qn = qs.name.as_str();
            let limit = 2.0 * log2(qs.dim as f64);
            let ia = mutual_information(ta, &sa, &[qn])?;
            let ib = mutual_information(tb, &sb, &[qn])?;
            if ia >= limit - MONOGAMY_SLACK && ib >= limit - MONOGAMY_SLACK {
                let text = format!(
                    "monogamy of entanglement: I({}:{qn}) = {ia:.6} and I({}:{qn}) = {ib:.6} bits, but their sum cannot exceed {limit} bits",
                    names_str(&sa),
                    names_str(&sb)
                );
                return Ok(Some((CertificateKind::Monogamy, text)));
            }
        }
    }

    // H(b1|A) + H(b2|B) ≥ −log₂ c for every joint state on q A B.
    for &(a, b) in pairs.iter().filter(|(a, b)| a < b) {
        if !usable(a) || !usable(b) {
            continue;
        }
        let (ta, tb) = (&c.targets[a], &c.targets[b]);
        let sa: Vec<&str> = ta.names().into_iter().filter(|x| !tb.has_system(x)).collect();
        let sb: Vec<&str> = tb.names().into_iter().filter(|x| !ta.has_system(x)).collect();
        for qs in ta.systems().iter().filter(|s| tb.has_system(&s.name)) {
            let z = ProjectiveBasis::computational(qs.clone());
            let x = if qs.dim == 2 { ProjectiveBasis::diagonal(qs.clone())? } else { ProjectiveBasis::fourier(qs.clone()) };
            let bound = maassen_uffink_bound(&z, &x)?;
            for (b1, b2, l1, l2) in [(&z, &x, "Z", "X"), (&x, &z, "X", "Z")] {
                let h1 = measured_conditional_entropy(ta, b1, &sa)?;
                let h2 = measured_conditional_entropy(tb, b2, &sb)?;
                if h1 + h2 < bound - ENTROPIC_SLACK {
                    let q = qs.name.as_str();
                    let text = format!(
                        "entropic uncertainty: H({l1}_{q}|{}) + H({l2}_{q}|{}) = {:.9} < {bound} required of any joint state",
                        names_str(&sa),
                        names_str(&sb),
                        h1 + h2
                    );
                    return Ok(Some((CertificateKind::Entropic, text)));
                }
            }
        }
    }

    if exact {
        for &(a, b) in pairs.iter().filter(|(a, b)| a < b) {
            let (ta, tb) = (&c.targets[a], &c.targets[b]);
            let overlap: Vec<&str> = ta.names().into_iter().filter(|x| tb.has_system(x)).collect();
            if overlap.is_empty() {
                continue;
            }
            let d = ta.partial_trace(&overlap)?.trace_distance(&tb.partial_trace(&overlap)?)?;
            if d > WITNESS_TOL {
                let text = format!(
                    "inconsistent overlapping marginals on {{{}}}: trace distance {d:.6}",
                    names_str(&overlap)
                );
                return Ok(Some((CertificateKind::InconsistentOverlap, text)));
            }
        }
    }
    Ok(None)
}

/// Hermitian orthonormal (Hilbert–Schmidt) basis of operators on the span of
/// the orthonormal `vectors`.
fn hermitian_ops(vectors: &[Vec<C64>]) -> Vec<CMatrix> {
    let h = 1.0 / sqrt(2.0);
    let mut out = Vec::new();
    for (a, va) in vectors.iter().enumerate() {
        out.push(CMatrix::outer(va, va));
        for vb in &vectors[a + 1..] {
            let ab = CMatrix::outer(va, vb);
            let ba = ab.adjoint();
            out.push((&ab + &ba).scale_real(h));
            out.push((&ab - &ba).scale(C64::new(0.0, h)));
        }
    }
    out
}

struct Block {
    pos: Vec<usize>,
    ops: Vec<CMatrix>,
    rhs: Vec<f64>,
}

struct Problem {
    layout: Layout,
    dim: usize,
    blocks: Vec<Block>,
    gram_pinv: CMatrix,
}

struct Run {
    x: CMatrix,
    residual: f64,
    iterations: usize,
    plateau: bool,
}

fn reduce(x: &CMatrix, layout: &Layout, pos: &[usize]) -> CMatrix {
    let ko = layout.offsets(pos);
    let ro = layout.offsets(&layout.complement(pos));
    CMatrix::from_fn(ko.len(), ko.len(), |i, j| ro.iter().map(|&r| x[(ko[i] + r, ko[j] + r)]).sum())
}

fn embed_into(out: &mut CMatrix, y: &CMatrix, layout: &Layout, pos: &[usize]) {
    let ko = layout.offsets(pos);
    let ro = layout.offsets(&layout.complement(pos));
    for (i, &ki) in ko.iter().enumerate() {
        for (j, &kj) in ko.iter().enumerate() {
            let v = y[(i, j)];
            if v == ZERO {
                continue;
            }
            for &r in &ro {
                out[(ki + r, kj + r)] += v;
            }
        }
    }
}

impl Problem {
    fn new(c: &MarginalConstraintSet) -> Result<Self> {
        let layout = Layout::new(&c.systems);
        let dim = layout.total();
        let mut blocks = vec![Block { pos: Vec::new(), ops: vec![CMatrix::identity(1)], rhs: vec![1.0] }];
        for t in &c.targets {
            let pos = c.positions(t);
            let d = t.dim();
            let (ops, rhs) = match c.semantics {
                Semantics::ExactMarginals => {
                    let basis: Vec<Vec<C64>> = (0..d)
                        .map(|k| (0..d).map(|i| if i == k { C64::new(1.0, 0.0) } else { ZERO }).collect())
                        .collect();
                    let ops = hermitian_ops(&basis);
                    let rhs = ops.iter().map(|o| o.hs_inner_re(t.matrix())).collect();
                    (ops, rhs)
                }
                Semantics::SupportContainment => {
                    let e = eigh(t.matrix());
                    let top = e.values.last().copied().unwrap_or(0.0);
                    let kernel: Vec<Vec<C64>> =
                        (0..d).filter(|&k| e.values[k] <= SUPPORT_CUTOFF * top).map(|k| e.vector(k)).collect();
                    let ops = hermitian_ops(&kernel);
                    let rhs = vec![0.0; ops.len()];
                    (ops, rhs)
                }
            };
            if !ops.is_empty() {
                blocks.push(Block { pos, ops, rhs });
            }
        }
        let n: usize = blocks.iter().map(|b| b.ops.len()).sum();
        let mut gram = CMatrix::zeros(n, n);
        let mut j = 0;
        for bj in &blocks {
            for oj in &bj.ops {
                let mut e = CMatrix::zeros(dim, dim);
                embed_into(&mut e, oj, &layout, &bj.pos);
                let mut i = 0;
                for bi in &blocks {
                    let r = reduce(&e, &layout, &bi.pos);
                    for oi in &bi.ops {
                        gram[(i, j)] = C64::new(oi.hs_inner_re(&r), 0.0);
                        i += 1;
                    }
                }
                j += 1;
            }
        }
        let gram = gram.hermitian_part();
        let eg = eigh(&gram);
        let top = eg.values.last().copied().unwrap_or(1.0);
        let inv: Vec<f64> = eg.values.iter().map(|&l| if l > 1e-10 * top { 1.0 / l } else { 0.0 }).collect();
        let v = &eg.vectors;
        let gram_pinv = CMatrix::from_fn(n, n, |a, b| (0..n).map(|k| v[(a, k)] * v[(b, k)].conj() * inv[k]).sum());
        Ok(Problem { layout, dim, blocks, gram_pinv })
    }

    fn project_affine(&self, x: &CMatrix) -> CMatrix {
        let mut g = Vec::new();
        for b in &self.blocks {
            let r = reduce(x, &self.layout, &b.pos);
            for (o, &rhs) in b.ops.iter().zip(&b.rhs) {
                g.push(o.hs_inner_re(&r) - rhs);
            }
        }
        let n = g.len();
        let coef: Vec<f64> = (0..n).map(|a| (0..n).map(|k| self.gram_pinv[(a, k)].re * g[k]).sum()).collect();
        let mut corr = CMatrix::zeros(self.dim, self.dim);
        let mut k = 0;
        for b in &self.blocks {
            let d = b.ops[0].rows();
            let mut y = CMatrix::zeros(d, d);
            for o in &b.ops {
                if coef[k] != 0.0 {
                    y = &y + &o.scale_real(coef[k]);
                }
                k += 1;
            }
            embed_into(&mut corr, &y, &self.layout, &b.pos);
        }
        (x - &corr).hermitian_part()
    }

    fn solve(&self, opts: &SolverOptions, budget: usize) -> Run {
        let d = self.dim;
        let mut x = CMatrix::identity(d).scale_real(1.0 / d as f64);
        let mut q = CMatrix::zeros(d, d);
        let mut y = self.project_affine(&x);
        let mut residual = (&x - &y).frobenius_norm();
        let mut history: Vec<f64> = Vec::with_capacity(budget + 1);
        history.push(residual);
        let mut it = 0;
        let mut plateau = false;
        while it < budget && residual >= opts.tolerance {
            it += 1;
            let z = &y + &q;
            x = z.hermitian_map(|l| l.max(0.0));
            q = &z - &x;
            y = self.project_affine(&x);
            residual = (&x - &y).frobenius_norm();
            history.push(residual);
            if it >= opts.plateau_window && residual > opts.plateau_floor {
                let old = history[it - opts.plateau_window];
                if (residual - old).abs() / residual < opts.plateau_relative_change {
                    plateau = true;
                    break;
                }
            }
        }
        Run { x, residual, iterations: it, plateau }
    }
}
