//! Representations `(V; ρ, D, θ)` of a Lie-Yamaguti algebra and the
//! semi-direct products they define.
//!
//! `ρ` is stored per basis vector, `D` and `θ` per ordered basis pair; values
//! on arbitrary arguments follow by linearity. No antisymmetry is imposed on
//! `D` or `θ`; only the representation conditions constrain them.
//!
//! The semi-direct product lives on `g ⊕ V` with the algebra basis first and
//! the module basis second:
//!
//! ```text
//! [x+u, y+v]     = [x,y] + ρ(x)v − ρ(y)u
//! {x+u, y+v, z+w} = {x,y,z} + D(x,y)w − θ(x,z)v + θ(y,z)u
//! ```

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, BilinearTable, LyAlgebra, TrilinearTable};
use crate::cohomology::CochainPair;
use crate::linalg::{zero_vec, Matrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    algebra_dim: usize,
    module_dim: usize,
    rho: Vec<Matrix>,
    d_map: Vec<Matrix>,
    theta: Vec<Matrix>,
}

impl Representation {
    /// `rho` has one `e×e` matrix per basis vector; `d_map` and `theta` are
    /// indexed row-major by basis pairs `(i, j) ↦ i·d + j`.
    pub fn new(
        algebra_dim: usize,
        module_dim: usize,
        rho: Vec<Matrix>,
        d_map: Vec<Matrix>,
        theta: Vec<Matrix>,
    ) -> Result<Self, RepError> {
        let d = algebra_dim;
        let e = module_dim;
        if rho.len() != d || d_map.len() != d * d || theta.len() != d * d {
            return Err(RepError::ShapeMismatch(format!(
                "expected {d} rho and {} D/theta matrices, got {}, {}, {}",
                d * d,
                rho.len(),
                d_map.len(),
                theta.len()
            )));
        }
        if let Some(m) = rho
            .iter()
            .chain(&d_map)
            .chain(&theta)
            .find(|m| m.rows() != e || m.cols() != e)
        {
            return Err(RepError::ShapeMismatch(format!(
                "operator is {}x{}, module dimension is {e}",
                m.rows(),
                m.cols()
            )));
        }
        Ok(Representation {
            algebra_dim,
            module_dim,
            rho,
            d_map,
            theta,
        })
    }

    /// All operators zero.
    pub fn trivial(a: &LyAlgebra, e: usize) -> Self {
        let d = a.dim();
        Representation {
            algebra_dim: d,
            module_dim: e,
            rho: vec![Matrix::zeros(e, e); d],
            d_map: vec![Matrix::zeros(e, e); d * d],
            theta: vec![Matrix::zeros(e, e); d * d],
        }
    }

    /// `ρ(a) = [a,·]`, `D(a,b) = {a,b,·}`, `θ(a,b) = {·,a,b}`.
    pub fn adjoint(a: &LyAlgebra) -> Result<Self, RepError> {
        if !a.is_valid() {
            return Err(RepError::Algebra(invalid(a)));
        }
        Ok(Self::adjoint_unchecked(a))
    }

    /// The adjoint operators without checking the algebra first.
    pub fn adjoint_unchecked(a: &LyAlgebra) -> Self {
        let d = a.dim();
        let c = a.binary();
        let t = a.ternary();
        let col_matrix = |f: &dyn Fn(usize) -> Vec<Rational>| {
            let cols: Vec<Vec<Rational>> = (0..d).map(f).collect();
            Matrix::from_columns(d, &cols)
        };
        let rho = (0..d).map(|i| col_matrix(&|k| c.get(i, k).to_vec())).collect();
        let mut d_map = Vec::with_capacity(d * d);
        let mut theta = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                d_map.push(col_matrix(&|k| t.get(i, j, k).to_vec()));
                theta.push(col_matrix(&|k| t.get(k, i, j).to_vec()));
            }
        }
        Representation {
            algebra_dim: d,
            module_dim: d,
            rho,
            d_map,
            theta,
        }
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    pub fn module_dim(&self) -> usize {
        self.module_dim
    }

    pub fn rho(&self, i: usize) -> &Matrix {
        &self.rho[i]
    }

    pub fn d_op(&self, i: usize, j: usize) -> &Matrix {
        &self.d_map[i * self.algebra_dim + j]
    }

    pub fn theta(&self, i: usize, j: usize) -> &Matrix {
        &self.theta[i * self.algebra_dim + j]
    }

    pub fn rho_mut(&mut self, i: usize) -> &mut Matrix {
        &mut self.rho[i]
    }

    pub fn d_op_mut(&mut self, i: usize, j: usize) -> &mut Matrix {
        &mut self.d_map[i * self.algebra_dim + j]
    }

    pub fn theta_mut(&mut self, i: usize, j: usize) -> &mut Matrix {
        &mut self.theta[i * self.algebra_dim + j]
    }

    /// `ρ(v)` for an arbitrary algebra vector.
    pub fn rho_of(&self, v: &[Rational]) -> Matrix {
        self.combine(v.iter().enumerate().map(|(i, x)| (x, &self.rho[i])))
    }

    /// `D(v, e_j)`
    pub fn d_vb(&self, v: &[Rational], j: usize) -> Matrix {
        self.combine(v.iter().enumerate().map(|(i, x)| (x, self.d_op(i, j))))
    }

    /// `D(e_i, v)`
    pub fn d_bv(&self, i: usize, v: &[Rational]) -> Matrix {
        self.combine(v.iter().enumerate().map(|(j, x)| (x, self.d_op(i, j))))
    }

    /// `θ(v, e_j)`
    pub fn theta_vb(&self, v: &[Rational], j: usize) -> Matrix {
        self.combine(v.iter().enumerate().map(|(i, x)| (x, self.theta(i, j))))
    }

    /// `θ(e_i, v)`
    pub fn theta_bv(&self, i: usize, v: &[Rational]) -> Matrix {
        self.combine(v.iter().enumerate().map(|(j, x)| (x, self.theta(i, j))))
    }

    fn combine<'a>(&'a self, terms: impl Iterator<Item = (&'a Rational, &'a Matrix)>) -> Matrix {
        let mut out = Matrix::zeros(self.module_dim, self.module_dim);
        for (x, m) in terms {
            if !x.is_zero() {
                out.axpy(x, m);
            }
        }
        out
    }

    fn check_shape(&self, a: &LyAlgebra) -> Result<(), RepError> {
        if a.dim() != self.algebra_dim {
            return Err(RepError::ShapeMismatch(format!(
                "representation is over a {}-dimensional algebra, got dimension {}",
                self.algebra_dim,
                a.dim()
            )));
        }
        Ok(())
    }
}

fn invalid(a: &LyAlgebra) -> AlgebraError {
    let report = a.check_axioms();
    let first = report
        .violations
        .first()
        .map(|v| format!("{} at {:?}", v.axiom, v.tuple))
        .unwrap_or_default();
    AlgebraError::InvalidAlgebra {
        name: a.name().to_string(),
        count: report.violations.len(),
        first,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepCondition {
    Rlyb1,
    Rlyb2,
    Rlyb3,
    Rlyb4,
    Rlyb5,
    Rlyb6,
    /// Consequence of the other six; reported for information only.
    Rlyb7,
}

impl RepCondition {
    pub const DEFINING: [RepCondition; 6] = [
        RepCondition::Rlyb1,
        RepCondition::Rlyb2,
        RepCondition::Rlyb3,
        RepCondition::Rlyb4,
        RepCondition::Rlyb5,
        RepCondition::Rlyb6,
    ];

    pub fn arity(self) -> usize {
        match self {
            RepCondition::Rlyb1 => 2,
            RepCondition::Rlyb2 | RepCondition::Rlyb3 | RepCondition::Rlyb5 | RepCondition::Rlyb7 => 3,
            RepCondition::Rlyb4 | RepCondition::Rlyb6 => 4,
        }
    }
}

impl fmt::Display for RepCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            RepCondition::Rlyb1 => 1,
            RepCondition::Rlyb2 => 2,
            RepCondition::Rlyb3 => 3,
            RepCondition::Rlyb4 => 4,
            RepCondition::Rlyb5 => 5,
            RepCondition::Rlyb6 => 6,
            RepCondition::Rlyb7 => 7,
        };
        write!(f, "RLYB{n}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepViolation {
    pub condition: RepCondition,
    pub tuple: Vec<usize>,
    pub defect: Matrix,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepReport {
    /// Failures of the six defining conditions.
    pub violations: Vec<RepViolation>,
    /// Failures of the derived cyclic identity for `D`.
    pub rlyb7: Vec<RepViolation>,
}

impl RepReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, c: RepCondition) -> impl Iterator<Item = &RepViolation> {
        self.violations
            .iter()
            .chain(&self.rlyb7)
            .filter(move |v| v.condition == c)
    }
}

/// Left-hand side minus right-hand side of a condition on a basis tuple.
pub fn condition_defect(a: &LyAlgebra, r: &Representation, cond: RepCondition, t: &[usize]) -> Matrix {
    assert_eq!(t.len(), cond.arity());
    let c = a.binary();
    let tr = a.ternary();
    match cond {
        RepCondition::Rlyb1 => {
            let (x, y) = (t[0], t[1]);
            let mut m = r.d_op(x, y) + r.theta(x, y);
            m = &m - r.theta(y, x);
            m = &m - &Matrix::commutator(r.rho(x), r.rho(y));
            &m + &r.rho_of(c.get(x, y))
        }
        RepCondition::Rlyb2 => {
            let (x, y, z) = (t[0], t[1], t[2]);
            let mut m = r.theta_bv(x, c.get(y, z));
            m = &m - &(r.rho(y) * r.theta(x, z));
            &m + &(r.rho(z) * r.theta(x, y))
        }
        RepCondition::Rlyb3 => {
            let (x, y, z) = (t[0], t[1], t[2]);
            let mut m = r.theta_vb(c.get(x, y), z);
            m = &m - &(r.theta(x, z) * r.rho(y));
            &m + &(r.theta(y, z) * r.rho(x))
        }
        RepCondition::Rlyb4 => {
            let (x, y, z, w) = (t[0], t[1], t[2], t[3]);
            let mut m = r.theta(z, w) * r.theta(x, y);
            m = &m - &(r.theta(y, w) * r.theta(x, z));
            m = &m - &r.theta_bv(x, tr.get(y, z, w));
            &m + &(r.d_op(y, z) * r.theta(x, w))
        }
        RepCondition::Rlyb5 => {
            let (x, y, z) = (t[0], t[1], t[2]);
            &Matrix::commutator(r.d_op(x, y), r.rho(z)) - &r.rho_of(tr.get(x, y, z))
        }
        RepCondition::Rlyb6 => {
            let (x, y, z, w) = (t[0], t[1], t[2], t[3]);
            let mut m = Matrix::commutator(r.d_op(x, y), r.theta(z, w));
            m = &m - &r.theta_vb(tr.get(x, y, z), w);
            &m - &r.theta_bv(z, tr.get(x, y, w))
        }
        RepCondition::Rlyb7 => {
            let (x, y, z) = (t[0], t[1], t[2]);
            let mut m = r.d_vb(c.get(x, y), z);
            m = &m + &r.d_vb(c.get(y, z), x);
            &m + &r.d_vb(c.get(z, x), y)
        }
    }
}

fn scan_condition(a: &LyAlgebra, r: &Representation, cond: RepCondition, out: &mut Vec<RepViolation>) {
    let d = a.dim();
    if d == 0 {
        return;
    }
    let mut t = vec![0usize; cond.arity()];
    loop {
        let defect = condition_defect(a, r, cond, &t);
        if !defect.is_zero() {
            out.push(RepViolation {
                condition: cond,
                tuple: t.clone(),
                defect,
            });
        }
        if !crate::algebra::next_tuple(&mut t, d) {
            break;
        }
    }
}

/// Evaluates RLYB1–RLYB6 (and RLYB7 for information) on all basis tuples.
pub fn check_representation(a: &LyAlgebra, r: &Representation) -> Result<RepReport, RepError> {
    r.check_shape(a)?;
    if !a.is_valid() {
        return Err(RepError::Algebra(invalid(a)));
    }
    let mut report = RepReport::default();
    for cond in RepCondition::DEFINING {
        scan_condition(a, r, cond, &mut report.violations);
    }
    scan_condition(a, r, RepCondition::Rlyb7, &mut report.rlyb7);
    Ok(report)
}

/// True iff `D([a,b],c) + D([b,c],a) + D([c,a],b) = 0` on all basis triples.
pub fn check_rlyb7(a: &LyAlgebra, r: &Representation) -> Result<bool, RepError> {
    r.check_shape(a)?;
    if !a.is_valid() {
        return Err(RepError::Algebra(invalid(a)));
    }
    let mut v = Vec::new();
    scan_condition(a, r, RepCondition::Rlyb7, &mut v);
    Ok(v.is_empty())
}

/// The semi-direct product `g ⋉ V`. The representation is not validated: the
/// result satisfies the algebra identities exactly when `r` is a representation.
pub fn semidirect(a: &LyAlgebra, r: &Representation) -> Result<LyAlgebra, RepError> {
    build_product(a, r, None)
}

/// The semi-direct product twisted by a `(2,3)`-cochain `τ = (f, g)`:
/// `f(x,y)` is added to `[x,y]` and `g(x,y,z)` to `{x,y,z}`. The result is a
/// Lie-Yamaguti algebra when `r` is a representation and `τ` a cocycle.
pub fn twisted_semidirect(a: &LyAlgebra, r: &Representation, tau: &CochainPair) -> Result<LyAlgebra, RepError> {
    if tau.level() != 1 || tau.algebra_dim() != a.dim() || tau.module_dim() != r.module_dim() {
        return Err(RepError::ShapeMismatch(format!(
            "twist must be a (2,3)-cochain for dimensions ({}, {}), got level {} for ({}, {})",
            a.dim(),
            r.module_dim(),
            tau.level(),
            tau.algebra_dim(),
            tau.module_dim()
        )));
    }
    build_product(a, r, Some(tau))
}

fn build_product(a: &LyAlgebra, r: &Representation, tau: Option<&CochainPair>) -> Result<LyAlgebra, RepError> {
    r.check_shape(a)?;
    let d = a.dim();
    let e = r.module_dim();
    let n = d + e;
    let mut binary = BilinearTable::zero(n);
    let mut ternary = TrilinearTable::zero(n);
    let embed = |alg: Option<&[Rational]>, module: Option<Vec<Rational>>| {
        let mut v = zero_vec(n);
        if let Some(x) = alg {
            v[..d].clone_from_slice(x);
        }
        if let Some(u) = module {
            v[d..].clone_from_slice(&u);
        }
        v
    };
    let neg = |v: Vec<Rational>| -> Vec<Rational> { v.into_iter().map(|x| -x).collect() };
    for i in 0..d {
        for j in 0..d {
            let twist = tau.map(|t| t.f().eval(&[i, j]));
            binary.set(i, j, &embed(Some(a.binary().get(i, j)), twist));
            for k in 0..d {
                let twist = tau.map(|t| t.g().eval(&[i, j, k]));
                ternary.set(i, j, k, &embed(Some(a.ternary().get(i, j, k)), twist));
            }
        }
        for b in 0..e {
            // [e_i, u_b] = ρ(e_i)u_b and [u_b, e_i] = −ρ(e_i)u_b
            let image = r.rho(i).column(b);
            binary.set(i, d + b, &embed(None, Some(image.clone())));
            binary.set(d + b, i, &embed(None, Some(neg(image))));
        }
    }
    for i in 0..d {
        for j in 0..d {
            for b in 0..e {
                // {e_i, e_j, u_b} = D(e_i,e_j)u_b
                ternary.set(i, j, d + b, &embed(None, Some(r.d_op(i, j).column(b))));
                // {u_b, e_i, e_j} = θ(e_i,e_j)u_b and {e_i, u_b, e_j} = −θ(e_i,e_j)u_b
                let image = r.theta(i, j).column(b);
                ternary.set(d + b, i, j, &embed(None, Some(image.clone())));
                ternary.set(i, d + b, j, &embed(None, Some(neg(image))));
            }
        }
    }
    let suffix = if tau.is_some() { "twisted" } else { "semidirect" };
    let name = format!("{}-{}", a.name(), suffix);
    Ok(LyAlgebra::from_tables(name, binary, ternary)?)
}
