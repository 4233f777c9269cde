//! Locally trivial LY-algebra bundles over a sampled atlas.
//!
//! A bundle is given by a model fibre, charts with finitely many sample
//! points, and transition matrices `g_ij` written as expressions in the
//! coordinates of chart `i`. Every condition is checked pointwise at the
//! declared samples: `g_ii = 1`, `g_ij·g_jk = g_ik` on triple overlaps,
//! `g_ij·g_ji = 1` on overlaps, and each `g_ij(m)` an automorphism of the fibre.
//!
//! Points of an overlap are identified across charts only through the
//! correspondences listed in the bundle description; coordinate changes are
//! never solved for.

pub mod expr;

use std::fmt;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::algebra::{derivation_defect, derivations, homomorphism_defect, matrix_from_flat, AlgebraError, LyAlgebra};
use crate::cohomology::{cohomology_report, CohomologyError, CohomologyReport};
use crate::linalg::{format_rational, Matrix, Rational, SubspaceBasis};
use crate::representation::Representation;

pub use expr::{parse_expr, BinOp, Expr, ExprError, Func};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("in {context}: {source}")]
    Eval { context: String, source: ExprError },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("no transition from `{0}` to `{1}`")]
    MissingTransition(String, String),
    #[error("{point:?} is not a sample point of chart `{chart}`")]
    UnknownSample { chart: String, point: Vec<String> },
    #[error("malformed bundle: {0}")]
    Malformed(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("subspace is not a subalgebra of the fibre")]
    NotASubalgebra,
    #[error("transition data fails the cocycle checks ({0} failures)")]
    CocycleFailed(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub name: String,
    pub coords: Vec<String>,
    pub samples: Vec<Vec<Rational>>,
}

/// `g_{from,to}`, with entries in the coordinates of `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub matrix: Vec<Vec<Expr>>,
    /// Overlap probes in `from` coordinates.
    pub samples: Vec<Vec<Rational>>,
    /// The same probes in `to` coordinates; `None` means the coordinates agree.
    pub to_samples: Option<Vec<Vec<Rational>>>,
}

impl Transition {
    /// The `k`-th probe in both charts.
    pub fn sample_pair(&self, k: usize) -> (&[Rational], &[Rational]) {
        let from = &self.samples[k];
        let to = self.to_samples.as_ref().map_or(from, |t| &t[k]);
        (from, to)
    }

    pub fn label(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

/// Triple overlap `(i, j, k)`: probes in `i` coordinates and, optionally, the
/// same points in `j` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleOverlap {
    pub i: String,
    pub j: String,
    pub k: String,
    pub samples: Vec<Vec<Rational>>,
    pub samples_j: Option<Vec<Vec<Rational>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSpec {
    pub fiber: LyAlgebra,
    pub charts: Vec<Chart>,
    pub transitions: Vec<Transition>,
    pub triples: Vec<TripleOverlap>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalMode {
    Exact,
    Float { tol: f64 },
}

impl EvalMode {
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn float() -> Self {
        EvalMode::Float { tol: Self::DEFAULT_TOL }
    }
}

/// A transition value at one point.
#[derive(Clone, Debug, PartialEq)]
pub enum Evaluated {
    Exact(Matrix),
    Float(Vec<Vec<f64>>),
}

impl Evaluated {
    pub fn as_exact(&self) -> Option<&Matrix> {
        match self {
            Evaluated::Exact(m) => Some(m),
            Evaluated::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> Vec<Vec<f64>> {
        match self {
            Evaluated::Exact(m) => to_float(m),
            Evaluated::Float(m) => m.clone(),
        }
    }
}

fn to_float(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

fn point_to_float(p: &[Rational]) -> Vec<f64> {
    p.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn show_point(p: &[Rational]) -> Vec<String> {
    p.iter().map(format_rational).collect()
}

/// Evaluates an expression matrix at a point of a chart.
pub fn eval_matrix(
    m: &[Vec<Expr>],
    coords: &[String],
    pt: &[Rational],
    mode: EvalMode,
) -> Result<Evaluated, ExprError> {
    match mode {
        EvalMode::Exact => {
            let rows = m
                .iter()
                .map(|row| row.iter().map(|e| e.eval_exact(coords, pt)).collect())
                .collect::<Result<Vec<Vec<Rational>>, _>>()?;
            let cols = m.first().map_or(0, |r| r.len());
            if rows.is_empty() {
                return Ok(Evaluated::Exact(Matrix::zeros(0, cols)));
            }
            Ok(Evaluated::Exact(Matrix::from_rows(rows).expect("rectangular")))
        }
        EvalMode::Float { .. } => {
            let p = point_to_float(pt);
            let rows = m
                .iter()
                .map(|row| row.iter().map(|e| e.eval_float(coords, &p)).collect())
                .collect::<Result<Vec<Vec<f64>>, _>>()?;
            Ok(Evaluated::Float(rows))
        }
    }
}

fn rectangular(m: &[Vec<Expr>], rows: usize, cols: usize) -> bool {
    m.len() == rows && m.iter().all(|r| r.len() == cols)
}

impl BundleSpec {
    /// Checks the structural invariants: known chart names, sample arities,
    /// square transitions of fibre dimension, bound identifiers, a valid fibre.
    pub fn new(
        fiber: LyAlgebra,
        charts: Vec<Chart>,
        transitions: Vec<Transition>,
        triples: Vec<TripleOverlap>,
    ) -> Result<Self, BundleError> {
        let b = BundleSpec {
            fiber,
            charts,
            transitions,
            triples,
        };
        b.validate()?;
        Ok(b)
    }

    /// A one-chart bundle with no overlaps.
    pub fn product(fiber: LyAlgebra, samples: Vec<Vec<Rational>>, coords: Vec<String>) -> Result<Self, BundleError> {
        let chart = Chart {
            name: "U".into(),
            coords,
            samples,
        };
        Self::new(fiber, vec![chart], vec![], vec![])
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        let report = self.fiber.check_axioms();
        if let Some(v) = report.violations.first() {
            return Err(BundleError::Malformed(format!(
                "fibre violates {} at {:?}",
                v.axiom, v.tuple
            )));
        }
        let d = self.fiber.dim();
        if self.charts.is_empty() {
            return Err(BundleError::Malformed("no charts".into()));
        }
        for (n, c) in self.charts.iter().enumerate() {
            if self.charts[..n].iter().any(|o| o.name == c.name) {
                return Err(BundleError::Malformed(format!("duplicate chart `{}`", c.name)));
            }
            if c.samples.is_empty() {
                return Err(BundleError::Malformed(format!("chart `{}` has no samples", c.name)));
            }
            check_arity(&c.name, c.coords.len(), &c.samples)?;
        }
        for t in &self.transitions {
            let from = self.chart(&t.from)?;
            let to = self.chart(&t.to)?;
            if !rectangular(&t.matrix, d, d) {
                return Err(BundleError::Malformed(format!(
                    "transition {} must be {d}x{d}",
                    t.label()
                )));
            }
            for e in t.matrix.iter().flatten() {
                e.bind(&from.coords).map_err(|source| BundleError::Eval {
                    context: format!("transition {}", t.label()),
                    source,
                })?;
            }
            check_arity(&t.label(), from.coords.len(), &t.samples)?;
            if let Some(ts) = &t.to_samples {
                if ts.len() != t.samples.len() {
                    return Err(BundleError::Malformed(format!(
                        "transition {} lists {} samples but {} corresponding points",
                        t.label(),
                        t.samples.len(),
                        ts.len()
                    )));
                }
                check_arity(&t.label(), to.coords.len(), ts)?;
            } else if from.coords.len() != to.coords.len() {
                return Err(BundleError::Malformed(format!(
                    "transition {} needs to_samples: chart dimensions differ",
                    t.label()
                )));
            }
        }
        for tr in &self.triples {
            let ci = self.chart(&tr.i)?;
            let cj = self.chart(&tr.j)?;
            self.chart(&tr.k)?;
            let label = format!("triple ({},{},{})", tr.i, tr.j, tr.k);
            check_arity(&label, ci.coords.len(), &tr.samples)?;
            match &tr.samples_j {
                Some(sj) if sj.len() != tr.samples.len() => {
                    return Err(BundleError::Malformed(format!("{label}: samples_j length differs")));
                }
                Some(sj) => check_arity(&label, cj.coords.len(), sj)?,
                None if ci.coords.len() != cj.coords.len() => {
                    return Err(BundleError::Malformed(format!("{label} needs samples_j")));
                }
                None => {}
            }
        }
        Ok(())
    }

    pub fn chart(&self, name: &str) -> Result<&Chart, BundleError> {
        self.charts
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| BundleError::UnknownChart(name.to_string()))
    }

    pub fn transition(&self, from: &str, to: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.from == from && t.to == to)
    }

    /// `g_{from,to}` at a point in `from` coordinates; `g_ii` defaults to the identity.
    pub fn eval_g(&self, from: &str, to: &str, pt: &[Rational], mode: EvalMode) -> Result<Evaluated, BundleError> {
        match self.transition(from, to) {
            Some(t) => eval_transition(self, t, pt, mode),
            None if from == to => {
                self.chart(from)?;
                let id = Matrix::identity(self.fiber.dim());
                Ok(match mode {
                    EvalMode::Exact => Evaluated::Exact(id),
                    EvalMode::Float { .. } => Evaluated::Float(to_float(&id)),
                })
            }
            None => Err(BundleError::MissingTransition(from.to_string(), to.to_string())),
        }
    }
}

fn check_arity(label: &str, n: usize, samples: &[Vec<Rational>]) -> Result<(), BundleError> {
    match samples.iter().find(|s| s.len() != n) {
        Some(s) => Err(BundleError::Malformed(format!(
            "{label}: sample {:?} has {} coordinates, expected {n}",
            show_point(s),
            s.len()
        ))),
        None => Ok(()),
    }
}

pub fn eval_transition(
    b: &BundleSpec,
    tf: &Transition,
    pt: &[Rational],
    mode: EvalMode,
) -> Result<Evaluated, BundleError> {
    let chart = b.chart(&tf.from)?;
    eval_matrix(&tf.matrix, &chart.coords, pt, mode).map_err(|source| BundleError::Eval {
        context: format!("transition {} at {:?}", tf.label(), show_point(pt)),
        source,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CocycleCheck {
    Identity,
    Triple,
    Inverse,
    Automorphism,
}

impl fmt::Display for CocycleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CocycleCheck::Identity => "identity",
            CocycleCheck::Triple => "triple",
            CocycleCheck::Inverse => "inverse",
            CocycleCheck::Automorphism => "automorphism",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckFailure {
    pub check: CocycleCheck,
    /// Transition or triple label.
    pub location: String,
    pub point: Vec<Rational>,
    /// Max-abs defect, as a float for display.
    pub defect: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CocycleReport {
    pub checks_run: usize,
    pub failures: Vec<CheckFailure>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, c: CocycleCheck) -> impl Iterator<Item = &CheckFailure> {
        self.failures.iter().filter(move |f| f.check == c)
    }
}

/// Max-abs distance between two evaluated matrices of equal shape.
fn distance(a: &Evaluated, b: &Evaluated) -> (bool, f64) {
    match (a, b) {
        (Evaluated::Exact(x), Evaluated::Exact(y)) => {
            let diff = x - y;
            let m = diff.max_abs();
            (m.is_zero(), m.to_f64().unwrap_or(f64::INFINITY))
        }
        _ => {
            let (x, y) = (a.to_float(), b.to_float());
            let m = x
                .iter()
                .flatten()
                .zip(y.iter().flatten())
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            (false, m)
        }
    }
}

fn within(mode: EvalMode, exact_zero: bool, defect: f64) -> bool {
    match mode {
        EvalMode::Exact => exact_zero,
        EvalMode::Float { tol } => defect <= tol,
    }
}

fn product(a: &Evaluated, b: &Evaluated) -> Evaluated {
    match (a, b) {
        (Evaluated::Exact(x), Evaluated::Exact(y)) => Evaluated::Exact(x * y),
        _ => Evaluated::Float(fmul(&a.to_float(), &b.to_float())),
    }
}

fn identity_like(n: usize, mode: EvalMode) -> Evaluated {
    match mode {
        EvalMode::Exact => Evaluated::Exact(Matrix::identity(n)),
        EvalMode::Float { .. } => Evaluated::Float(to_float(&Matrix::identity(n))),
    }
}

fn fmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|c| (0..inner).map(|k| row[k] * b[k][c]).sum()).collect())
        .collect()
}

/// Smallest pivot of Gaussian elimination with partial pivoting; zero for singular input.
fn min_pivot(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut smallest = f64::INFINITY;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .expect("nonempty");
        a.swap(c, p);
        let piv = a[c][c];
        smallest = smallest.min(piv.abs());
        if piv == 0.0 {
            return 0.0;
        }
        for r in c + 1..n {
            let f = a[r][c] / piv;
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    if n == 0 {
        1.0
    } else {
        smallest
    }
}

/// Bracket-preservation defect of `phi : a → b` in float arithmetic.
fn float_homomorphism_defect(phi: &[Vec<f64>], a: &LyAlgebra, b: &LyAlgebra) -> f64 {
    let da = a.dim();
    let db = b.dim();
    let col = |i: usize| -> Vec<f64> { (0..db).map(|r| phi[r][i]).collect() };
    let apply = |v: &[Rational]| -> Vec<f64> {
        (0..db)
            .map(|r| (0..da).map(|k| phi[r][k] * v[k].to_f64().unwrap_or(f64::NAN)).sum())
            .collect()
    };
    let bc: Vec<f64> = (0..db * db * db)
        .map(|n| {
            b.binary().get(n / (db * db), (n / db) % db)[n % db]
                .to_f64()
                .unwrap_or(f64::NAN)
        })
        .collect();
    let bracket = |x: &[f64], y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; db];
        for i in 0..db {
            for j in 0..db {
                let w = x[i] * y[j];
                if w != 0.0 {
                    for (l, o) in out.iter_mut().enumerate() {
                        *o += w * bc[(i * db + j) * db + l];
                    }
                }
            }
        }
        out
    };
    let triple = |x: &[f64], y: &[f64], z: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; db];
        for i in 0..db {
            for j in 0..db {
                for k in 0..db {
                    let w = x[i] * y[j] * z[k];
                    if w != 0.0 {
                        let v = b.ternary().get(i, j, k);
                        for (l, o) in out.iter_mut().enumerate() {
                            *o += w * v[l].to_f64().unwrap_or(f64::NAN);
                        }
                    }
                }
            }
        }
        out
    };
    let imgs: Vec<Vec<f64>> = (0..da).map(col).collect();
    let mut worst: f64 = 0.0;
    let diff = |u: Vec<f64>, v: Vec<f64>| u.iter().zip(&v).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    for i in 0..da {
        for j in 0..da {
            worst = worst.max(diff(apply(a.binary().get(i, j)), bracket(&imgs[i], &imgs[j])));
            for k in 0..da {
                worst = worst.max(diff(
                    apply(a.ternary().get(i, j, k)),
                    triple(&imgs[i], &imgs[j], &imgs[k]),
                ));
            }
        }
    }
    worst
}

/// Result of the automorphism test for one evaluated transition.
fn automorphism_failure(
    g: &Evaluated,
    fiber: &LyAlgebra,
    mode: EvalMode,
) -> Result<Option<(f64, String)>, BundleError> {
    match (g, mode) {
        (Evaluated::Exact(m), _) => {
            let defect = homomorphism_defect(m, fiber, fiber)?;
            if !defect.is_zero() {
                return Ok(Some((
                    defect.to_f64().unwrap_or(f64::INFINITY),
                    format!("bracket preservation defect {}", format_rational(&defect)),
                )));
            }
            if !m.is_invertible() {
                return Ok(Some((0.0, "not invertible".into())));
            }
            Ok(None)
        }
        (Evaluated::Float(m), EvalMode::Float { tol }) => {
            let defect = float_homomorphism_defect(m, fiber, fiber);
            if defect.is_nan() || defect > tol {
                return Ok(Some((defect, format!("bracket preservation defect {defect:e}"))));
            }
            if min_pivot(m) <= tol {
                return Ok(Some((0.0, "numerically singular".into())));
            }
            Ok(None)
        }
        (Evaluated::Float(_), EvalMode::Exact) => unreachable!("exact mode never yields float values"),
    }
}

/// Verifies the transition data (see the module docs).
pub fn check_cocycle(b: &BundleSpec, mode: EvalMode) -> Result<CocycleReport, BundleError> {
    b.validate()?;
    let n = b.fiber.dim();
    let mut rep = CocycleReport::default();
    let id = identity_like(n, mode);
    for t in &b.transitions {
        let reverse = b.transition(&t.to, &t.from);
        for k in 0..t.samples.len() {
            let (p, p_to) = t.sample_pair(k);
            let g = eval_transition(b, t, p, mode)?;
            if t.from == t.to {
                rep.checks_run += 1;
                let (zero, defect) = distance(&g, &id);
                if !within(mode, zero, defect) {
                    rep.failures.push(CheckFailure {
                        check: CocycleCheck::Identity,
                        location: t.label(),
                        point: p.to_vec(),
                        defect,
                        detail: "g_ii differs from the identity".into(),
                    });
                }
            }
            if let Some(r) = reverse.filter(|_| t.from != t.to) {
                rep.checks_run += 1;
                let back = eval_transition(b, r, p_to, mode)?;
                let (zero, defect) = distance(&product(&g, &back), &id);
                if !within(mode, zero, defect) {
                    rep.failures.push(CheckFailure {
                        check: CocycleCheck::Inverse,
                        location: format!("{} / {}", t.label(), r.label()),
                        point: p.to_vec(),
                        defect,
                        detail: "g_ij(m)·g_ji(m) differs from the identity".into(),
                    });
                }
            }
            rep.checks_run += 1;
            if let Some((defect, detail)) = automorphism_failure(&g, &b.fiber, mode)? {
                rep.failures.push(CheckFailure {
                    check: CocycleCheck::Automorphism,
                    location: t.label(),
                    point: p.to_vec(),
                    defect,
                    detail,
                });
            }
        }
    }
    for tr in &b.triples {
        for (s, p) in tr.samples.iter().enumerate() {
            let pj = tr.samples_j.as_ref().map_or(p, |v| &v[s]);
            let gij = b.eval_g(&tr.i, &tr.j, p, mode)?;
            let gjk = b.eval_g(&tr.j, &tr.k, pj, mode)?;
            let gik = b.eval_g(&tr.i, &tr.k, p, mode)?;
            rep.checks_run += 1;
            let (zero, defect) = distance(&product(&gij, &gjk), &gik);
            if !within(mode, zero, defect) {
                rep.failures.push(CheckFailure {
                    check: CocycleCheck::Triple,
                    location: format!("({},{},{})", tr.i, tr.j, tr.k),
                    point: p.clone(),
                    defect,
                    detail: "g_ij·g_jk differs from g_ik".into(),
                });
            }
        }
    }
    Ok(rep)
}

fn is_sample(b: &BundleSpec, chart: &str, pt: &[Rational]) -> Result<bool, BundleError> {
    let c = b.chart(chart)?;
    Ok(c.samples.iter().any(|s| s == pt)
        || b.transitions.iter().any(|t| {
            (t.from == chart && t.samples.iter().any(|s| s == pt))
                || (t.to == chart && (0..t.samples.len()).any(|k| t.sample_pair(k).1 == pt))
        })
        || b.triples
            .iter()
            .any(|tr| tr.i == chart && tr.samples.iter().any(|s| s == pt)))
}

/// The fibre over a sample point in the trivialization of `chart`: the model
/// algebra itself.
pub fn fiber_algebra_at(b: &BundleSpec, chart: &str, pt: &[Rational]) -> Result<LyAlgebra, BundleError> {
    if !is_sample(b, chart, pt)? {
        return Err(BundleError::UnknownSample {
            chart: chart.to_string(),
            point: show_point(pt),
        });
    }
    Ok(b.fiber.clone())
}

/// Structure constants of `a` transported along an invertible `g`:
/// `[x, y]' = g[g⁻¹x, g⁻¹y]` and likewise for the triple product.
pub fn transport_algebra(a: &LyAlgebra, g: &Matrix) -> Result<LyAlgebra, BundleError> {
    let d = a.dim();
    if g.rows() != d || g.cols() != d {
        return Err(BundleError::ShapeMismatch(format!(
            "{}x{} transport on dimension {d}",
            g.rows(),
            g.cols()
        )));
    }
    let inv = g
        .inverse()
        .ok_or_else(|| BundleError::ShapeMismatch("transport matrix is singular".into()))?;
    let pre: Vec<Vec<Rational>> = (0..d).map(|i| inv.column(i)).collect();
    let mut out = LyAlgebra::zero(a.name(), d);
    for i in 0..d {
        for j in 0..d {
            out.binary_mut().set(i, j, &g.mul_vec(&a.bracket(&pre[i], &pre[j])));
            for k in 0..d {
                out.ternary_mut()
                    .set(i, j, k, &g.mul_vec(&a.triple(&pre[i], &pre[j], &pre[k])));
            }
        }
    }
    Ok(out)
}

fn require_cocycle(b: &BundleSpec, mode: EvalMode) -> Result<(), BundleError> {
    let rep = check_cocycle(b, mode)?;
    if rep.passed() {
        Ok(())
    } else {
        Err(BundleError::CocycleFailed(rep.failures.len()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleFailure {
    pub transition: String,
    pub point: Vec<Rational>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubbundleReport {
    pub checks_run: usize,
    pub failures: Vec<SubbundleFailure>,
}

impl SubbundleReport {
    /// States what a pass means.
    pub const SCOPE: &'static str =
        "invariance verified under the sampled transition values only, not under every automorphism of the fibre";

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn is_subalgebra(a: &LyAlgebra, h: &SubspaceBasis) -> bool {
    let v = h.vectors();
    v.iter().all(|x| {
        v.iter()
            .all(|y| h.contains(&a.bracket(x, y)) && v.iter().all(|z| h.contains(&a.triple(x, y, z))))
    })
}

/// Orthonormal basis by modified Gram-Schmidt, dropping vectors below `tol`.
fn orthonormal(vs: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for u in &out {
            let dot: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in w.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol {
            out.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Checks `g_ij(m)·h = h` at every overlap sample.
pub fn check_subbundle(b: &BundleSpec, h: &SubspaceBasis, mode: EvalMode) -> Result<SubbundleReport, BundleError> {
    b.validate()?;
    if h.ambient_dim() != b.fiber.dim() {
        return Err(BundleError::ShapeMismatch(format!(
            "subspace of dimension-{} space, fibre has dimension {}",
            h.ambient_dim(),
            b.fiber.dim()
        )));
    }
    if !is_subalgebra(&b.fiber, h) {
        return Err(BundleError::NotASubalgebra);
    }
    let mut rep = SubbundleReport {
        checks_run: 0,
        failures: Vec::new(),
    };
    for t in &b.transitions {
        for p in &t.samples {
            rep.checks_run += 1;
            let g = eval_transition(b, t, p, mode)?;
            let fail = match (&g, mode) {
                (Evaluated::Exact(m), _) => {
                    let image = SubspaceBasis::new(h.ambient_dim(), h.vectors().iter().map(|v| m.mul_vec(v)).collect());
                    if image == *h {
                        None
                    } else {
                        Some(format!("image has dimension {}, subspace {}", image.dim(), h.dim()))
                    }
                }
                (Evaluated::Float(m), EvalMode::Float { tol }) => {
                    let basis = orthonormal(&h.vectors().iter().map(|v| point_to_float(v)).collect::<Vec<_>>(), tol);
                    let images: Vec<Vec<f64>> = h
                        .vectors()
                        .iter()
                        .map(|v| {
                            let x = point_to_float(v);
                            m.iter()
                                .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
                                .collect()
                        })
                        .collect();
                    let residual = images
                        .iter()
                        .map(|w| {
                            let mut r = w.clone();
                            for u in &basis {
                                let dot: f64 = r.iter().zip(u).map(|(a, b)| a * b).sum();
                                for (x, y) in r.iter_mut().zip(u) {
                                    *x -= dot * y;
                                }
                            }
                            r.iter().map(|x| x.abs()).fold(0.0, f64::max)
                        })
                        .fold(0.0, f64::max);
                    let rank = orthonormal(&images, tol).len();
                    if residual > tol {
                        Some(format!("image leaves the subspace by {residual:e}"))
                    } else if rank != basis.len() {
                        Some(format!("image has dimension {rank}, subspace {}", basis.len()))
                    } else {
                        None
                    }
                }
                (Evaluated::Float(_), EvalMode::Exact) => unreachable!("exact mode never yields float values"),
            };
            if let Some(detail) = fail {
                rep.failures.push(SubbundleFailure {
                    transition: t.label(),
                    point: p.clone(),
                    detail,
                });
            }
        }
    }
    Ok(rep)
}

/// One chart's component of a bundle morphism: a `dim B × dim A` matrix in
/// the chart's coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMap {
    pub chart: String,
    pub matrix: Vec<Vec<Expr>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismPoint {
    pub chart: String,
    pub point: Vec<Rational>,
    pub homomorphism: bool,
    pub invertible: bool,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MorphismReport {
    pub points: Vec<MorphismPoint>,
    /// Overlap samples where `φ_i·g^A_ij ≠ g^B_ij·φ_j`.
    pub incompatible: Vec<CheckFailure>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.homomorphism) && self.incompatible.is_empty()
    }

    pub fn all_invertible(&self) -> bool {
        self.points.iter().all(|p| p.invertible)
    }
}

/// Checks a fibrewise morphism between two bundles over the same atlas.
pub fn check_bundle_morphism(
    a: &BundleSpec,
    b: &BundleSpec,
    maps: &[ChartMap],
    mode: EvalMode,
) -> Result<MorphismReport, BundleError> {
    a.validate()?;
    b.validate()?;
    let (da, db) = (a.fiber.dim(), b.fiber.dim());
    for ca in &a.charts {
        let cb = b.chart(&ca.name)?;
        if cb.coords != ca.coords {
            return Err(BundleError::ShapeMismatch(format!(
                "chart `{}` has different coordinates in the two bundles",
                ca.name
            )));
        }
    }
    let map_for = |chart: &str| -> Result<&ChartMap, BundleError> {
        maps.iter()
            .find(|m| m.chart == chart)
            .ok_or_else(|| BundleError::ShapeMismatch(format!("no morphism component for chart `{chart}`")))
    };
    for m in maps {
        let c = a.chart(&m.chart)?;
        if !rectangular(&m.matrix, db, da) {
            return Err(BundleError::ShapeMismatch(format!(
                "morphism component on `{}` must be {db}x{da}",
                m.chart
            )));
        }
        for e in m.matrix.iter().flatten() {
            e.bind(&c.coords)?;
        }
    }
    let eval_phi = |chart: &str, pt: &[Rational]| -> Result<Evaluated, BundleError> {
        let c = a.chart(chart)?;
        eval_matrix(&map_for(chart)?.matrix, &c.coords, pt, mode).map_err(|source| BundleError::Eval {
            context: format!("morphism on `{chart}` at {:?}", show_point(pt)),
            source,
        })
    };
    let mut rep = MorphismReport {
        points: Vec::new(),
        incompatible: Vec::new(),
    };
    for c in &a.charts {
        for p in &c.samples {
            let phi = eval_phi(&c.name, p)?;
            let (homomorphism, invertible, defect) = match (&phi, mode) {
                (Evaluated::Exact(m), _) => {
                    let d = homomorphism_defect(m, &a.fiber, &b.fiber)?;
                    (
                        d.is_zero(),
                        m.is_square() && m.is_invertible(),
                        d.to_f64().unwrap_or(f64::INFINITY),
                    )
                }
                (Evaluated::Float(m), EvalMode::Float { tol }) => {
                    let d = float_homomorphism_defect(m, &a.fiber, &b.fiber);
                    (d <= tol, da == db && min_pivot(m) > tol, d)
                }
                (Evaluated::Float(_), EvalMode::Exact) => unreachable!("exact mode never yields float values"),
            };
            rep.points.push(MorphismPoint {
                chart: c.name.clone(),
                point: p.clone(),
                homomorphism,
                invertible,
                defect,
            });
        }
    }
    for ta in &a.transitions {
        let Some(tb) = b.transition(&ta.from, &ta.to) else {
            continue;
        };
        for k in 0..ta.samples.len() {
            let (p, p_to) = ta.sample_pair(k);
            let lhs = product(&eval_phi(&ta.from, p)?, &eval_transition(a, ta, p, mode)?);
            let rhs = product(&eval_transition(b, tb, p, mode)?, &eval_phi(&ta.to, p_to)?);
            let (zero, defect) = distance(&lhs, &rhs);
            if !within(mode, zero, defect) {
                rep.incompatible.push(CheckFailure {
                    check: CocycleCheck::Triple,
                    location: ta.label(),
                    point: p.to_vec(),
                    defect,
                    detail: "φ_i·g^A_ij differs from g^B_ij·φ_j".into(),
                });
            }
        }
    }
    Ok(rep)
}

/// Coefficients for fibrewise cohomology.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    Adjoint,
    Trivial(usize),
}

/// A fibre probed by [`bundle_cohomology`] or [`der_bundle_dims`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePoint {
    /// Chart name, or a transition label for fibres read through `g_ij(m)`.
    pub location: String,
    pub point: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleCohomologyReport {
    pub points: Vec<(SamplePoint, CohomologyReport)>,
    pub constant: bool,
}

/// Fibres to probe: the model at every chart sample and, in exact mode, the
/// model transported by `g_ij(m)` at every overlap sample.
fn probed_fibres(b: &BundleSpec, mode: EvalMode) -> Result<Vec<(SamplePoint, LyAlgebra)>, BundleError> {
    let mut out = Vec::new();
    for c in &b.charts {
        for p in &c.samples {
            out.push((
                SamplePoint {
                    location: c.name.clone(),
                    point: p.clone(),
                },
                fiber_algebra_at(b, &c.name, p)?,
            ));
        }
    }
    if mode == EvalMode::Exact {
        for t in &b.transitions {
            for p in &t.samples {
                if let Evaluated::Exact(g) = eval_transition(b, t, p, mode)? {
                    out.push((
                        SamplePoint {
                            location: t.label(),
                            point: p.clone(),
                        },
                        transport_algebra(&b.fiber, &g)?,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Cohomology of every probed fibre. `p` follows [`cohomology_report`]:
/// `0` for `H^1`, `1` for `H^(2,3)`, `p ≥ 2` for `H^(2p,2p+1)`.
pub fn bundle_cohomology(
    b: &BundleSpec,
    p: usize,
    coefficients: Coefficients,
    mode: EvalMode,
    cap: usize,
) -> Result<BundleCohomologyReport, BundleError> {
    require_cocycle(b, mode)?;
    let mut cache: Vec<(LyAlgebra, CohomologyReport)> = Vec::new();
    let mut points = Vec::new();
    for (sp, alg) in probed_fibres(b, mode)? {
        let report = match cache.iter().find(|(a, _)| *a == alg) {
            Some((_, r)) => r.clone(),
            None => {
                let rep = match coefficients {
                    Coefficients::Adjoint => Representation::adjoint_unchecked(&alg),
                    Coefficients::Trivial(e) => Representation::trivial(&alg, e),
                };
                let r = cohomology_report(&alg, &rep, p, cap)?;
                cache.push((alg, r.clone()));
                r
            }
        };
        points.push((sp, report));
    }
    let constant = points.windows(2).all(|w| w[0].1.dim_h == w[1].1.dim_h);
    Ok(BundleCohomologyReport { points, constant })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConjugationFailure {
    pub transition: String,
    pub point: Vec<Rational>,
    /// Index of the derivation basis element.
    pub derivation: usize,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerBundleReport {
    pub points: Vec<(SamplePoint, usize)>,
    pub constant: bool,
    pub conjugation_checks: usize,
    pub conjugation_failures: Vec<ConjugationFailure>,
}

impl DerBundleReport {
    pub fn passed(&self) -> bool {
        self.constant && self.conjugation_failures.is_empty()
    }
}

/// `s∘T∘s⁻¹` for an automorphism `s` and endomorphism `T`.
pub fn conjugate(s: &Matrix, t: &Matrix) -> Option<Matrix> {
    let inv = s.inverse()?;
    Some(&(s * t) * &inv)
}

/// Dimension of `Der` at every probed fibre, and the invariance of the
/// derivation algebra under conjugation by every sampled transition value.
pub fn der_bundle_dims(b: &BundleSpec, mode: EvalMode) -> Result<DerBundleReport, BundleError> {
    require_cocycle(b, mode)?;
    let mut cache: Vec<(LyAlgebra, usize)> = Vec::new();
    let mut points = Vec::new();
    for (sp, alg) in probed_fibres(b, mode)? {
        let dim = match cache.iter().find(|(a, _)| *a == alg) {
            Some((_, n)) => *n,
            None => {
                let n = derivations(&alg)?.dim();
                cache.push((alg, n));
                n
            }
        };
        points.push((sp, dim));
    }
    let constant = points.windows(2).all(|w| w[0].1 == w[1].1);
    let d = b.fiber.dim();
    let der: Vec<Matrix> = derivations(&b.fiber)?
        .vectors()
        .iter()
        .map(|v| matrix_from_flat(d, v))
        .collect();
    let mut checks = 0;
    let mut failures = Vec::new();
    for t in &b.transitions {
        for p in &t.samples {
            let s = eval_transition(b, t, p, mode)?;
            for (idx, tm) in der.iter().enumerate() {
                checks += 1;
                let defect = match (&s, mode) {
                    (Evaluated::Exact(s), _) => {
                        let c = conjugate(s, tm).ok_or_else(|| {
                            BundleError::ShapeMismatch(format!("{} is singular at {:?}", t.label(), show_point(p)))
                        })?;
                        crate::linalg::max_abs(&derivation_defect(&b.fiber, &c))
                            .to_f64()
                            .unwrap_or(f64::INFINITY)
                    }
                    (Evaluated::Float(s), EvalMode::Float { .. }) => {
                        float_derivation_defect(&b.fiber, s, &to_float(tm))
                    }
                    (Evaluated::Float(_), EvalMode::Exact) => unreachable!("exact mode never yields float values"),
                };
                let ok = match mode {
                    EvalMode::Exact => defect == 0.0,
                    EvalMode::Float { tol } => defect <= tol,
                };
                if !ok {
                    failures.push(ConjugationFailure {
                        transition: t.label(),
                        point: p.clone(),
                        derivation: idx,
                        defect,
                    });
                }
            }
        }
    }
    Ok(DerBundleReport {
        points,
        constant,
        conjugation_checks: checks,
        conjugation_failures: failures,
    })
}

fn float_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        a.swap(c, p);
        let piv = a[c][c];
        if piv == 0.0 {
            return None;
        }
        for k in 0..2 * n {
            a[c][k] /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                for k in 0..2 * n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn float_derivation_defect(a: &LyAlgebra, s: &[Vec<f64>], t: &[Vec<f64>]) -> f64 {
    let Some(inv) = float_inverse(s) else {
        return f64::INFINITY;
    };
    let c = fmul(&fmul(s, t), &inv);
    let d = a.dim();
    let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
    let apply = |v: &[Rational]| -> Vec<f64> { (0..d).map(|r| (0..d).map(|k| c[r][k] * f(&v[k])).sum()).collect() };
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            // c[e_i,e_j] − [c e_i, e_j] − [e_i, c e_j]
            let mut v = apply(a.binary().get(i, j));
            for k in 0..d {
                for (l, o) in v.iter_mut().enumerate() {
                    *o -= c[k][i] * f(&a.binary().get(k, j)[l]) + c[k][j] * f(&a.binary().get(i, k)[l]);
                }
            }
            worst = worst.max(v.iter().map(|x| x.abs()).fold(0.0, f64::max));
            for m in 0..d {
                let mut v = apply(a.ternary().get(i, j, m));
                for k in 0..d {
                    for (l, o) in v.iter_mut().enumerate() {
                        *o -= c[k][i] * f(&a.ternary().get(k, j, m)[l])
                            + c[k][j] * f(&a.ternary().get(i, k, m)[l])
                            + c[k][m] * f(&a.ternary().get(i, j, k)[l]);
                    }
                }
                worst = worst.max(v.iter().map(|x| x.abs()).fold(0.0, f64::max));
            }
        }
    }
    worst
}

/// The two-chart circle bundle with fibre `fiber`: charts `U1` (coordinate
/// `t`) and `U2` (coordinate `s = 1/t` on the overlap), `g_12 = diag(1, 1+t², …)`
/// and its inverse `g_21`, probed on both overlap arcs.
pub fn circle_bundle(fiber: LyAlgebra) -> BundleSpec {
    let d = fiber.dim();
    let q = |n: i64, m: i64| Rational::new(n.into(), m.into());
    let diag = |first: &str, rest: &str| -> Vec<Vec<Expr>> {
        (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| {
                        if r != c {
                            Expr::num(0)
                        } else if r == 0 {
                            parse_expr(first).expect("literal")
                        } else {
                            parse_expr(rest).expect("literal")
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let ts: Vec<Rational> = vec![q(1, 2), q(1, 1), q(2, 1), q(-1, 3), q(-1, 1), q(-3, 1)];
    let pts = |v: &[Rational]| v.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>();
    let inv: Vec<Rational> = ts.iter().map(|t| t.recip()).collect();
    let charts = vec![
        Chart {
            name: "U1".into(),
            coords: vec!["t".into()],
            samples: pts(&[q(0, 1), q(1, 2), q(-2, 1)]),
        },
        Chart {
            name: "U2".into(),
            coords: vec!["s".into()],
            samples: pts(&[q(0, 1), q(1, 3), q(-1, 2)]),
        },
    ];
    let transitions = vec![
        Transition {
            from: "U1".into(),
            to: "U2".into(),
            matrix: diag("1", "1 + t^2"),
            samples: pts(&ts),
            to_samples: Some(pts(&inv)),
        },
        Transition {
            from: "U2".into(),
            to: "U1".into(),
            matrix: diag("1", "s^2/(1 + s^2)"),
            samples: pts(&inv),
            to_samples: Some(pts(&ts)),
        },
    ];
    let triples = vec![
        TripleOverlap {
            i: "U1".into(),
            j: "U2".into(),
            k: "U1".into(),
            samples: pts(&ts),
            samples_j: Some(pts(&inv)),
        },
        TripleOverlap {
            i: "U2".into(),
            j: "U1".into(),
            k: "U2".into(),
            samples: pts(&inv),
            samples_j: Some(pts(&ts)),
        },
    ];
    BundleSpec::new(fiber, charts, transitions, triples).expect("well-formed circle bundle")
}
