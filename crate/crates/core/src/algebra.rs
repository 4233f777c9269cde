//! Finite-dimensional Lie-Yamaguti algebras given by structure constants.
//!
//! An algebra of dimension `d` carries a binary bracket `[e_i, e_j] = Σ_k c_ij^k e_k`
//! and a ternary bracket `{e_i, e_j, e_k} = Σ_l t_ijk^l e_l`. Both tables are
//! stored densely. Validity (the six defining identities) is a checkable
//! predicate rather than a type invariant, so deliberately broken algebras can
//! be built and inspected.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{
    axpy, is_zero_vec, kernel_basis, q, sub_assign_vec, unit_vec, zero_vec, Matrix, Rational, SubspaceBasis,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("entry {0:?} is not a canonical representative (first two indices must increase)")]
    NonCanonicalEntry(Vec<usize>),
    #[error("not a Lie algebra: {reason} fails on basis tuple {tuple:?}")]
    NotALieAlgebra { reason: &'static str, tuple: Vec<usize> },
    #[error("not a Leibniz algebra: identity fails on basis triple {0:?}")]
    NotALeibnizAlgebra(Vec<usize>),
    #[error("not a reductive pair: {inclusion} fails on basis pair {pair:?}")]
    NotReductive {
        inclusion: &'static str,
        pair: (usize, usize),
    },
    #[error("index sets do not partition the basis: {0}")]
    BadPartition(String),
    #[error("algebra {name:?} violates {count} identity instance(s), first: {first}")]
    InvalidAlgebra { name: String, count: usize, first: String },
}

/// A bilinear product table `e_i · e_j = Σ_k p[i][j][k] e_k` with no symmetry assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearTable {
    dim: usize,
    data: Vec<Rational>,
}

impl BilinearTable {
    pub fn zero(dim: usize) -> Self {
        BilinearTable {
            dim,
            data: zero_vec(dim * dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &[Rational] {
        let d = self.dim;
        &self.data[(i * d + j) * d..(i * d + j + 1) * d]
    }

    pub fn set(&mut self, i: usize, j: usize, v: &[Rational]) {
        let d = self.dim;
        assert_eq!(v.len(), d);
        self.data[(i * d + j) * d..(i * d + j + 1) * d].clone_from_slice(v);
    }

    /// Sets `e_i·e_j = v` and `e_j·e_i = −v`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, v: &[Rational]) {
        self.set(i, j, v);
        let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
        self.set(j, i, &neg);
    }

    /// Product of arbitrary vectors, extended bilinearly.
    pub fn apply(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    axpy(&mut out, &(xi * yj), self.get(i, j));
                }
            }
        }
        out
    }

    /// `v · e_j`
    pub fn apply_vb(&self, v: &[Rational], j: usize) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (i, vi) in v.iter().enumerate() {
            axpy(&mut out, vi, self.get(i, j));
        }
        out
    }

    /// `e_i · v`
    pub fn apply_bv(&self, i: usize, v: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (j, vj) in v.iter().enumerate() {
            axpy(&mut out, vj, self.get(i, j));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    /// Cross-product algebra on ℚ³: `[e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2`.
    pub fn cross_product() -> Self {
        let mut t = Self::zero(3);
        t.set_antisymmetric(0, 1, &unit_vec(3, 2));
        t.set_antisymmetric(1, 2, &unit_vec(3, 0));
        t.set_antisymmetric(2, 0, &unit_vec(3, 1));
        t
    }

    /// Heisenberg algebra: `[e1,e2] = e3`.
    pub fn heisenberg() -> Self {
        let mut t = Self::zero(3);
        t.set_antisymmetric(0, 1, &unit_vec(3, 2));
        t
    }
}

/// A trilinear product table `{e_i, e_j, e_k} = Σ_l t[i][j][k][l] e_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrilinearTable {
    dim: usize,
    data: Vec<Rational>,
}

impl TrilinearTable {
    pub fn zero(dim: usize) -> Self {
        TrilinearTable {
            dim,
            data: zero_vec(dim * dim * dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        let d = self.dim;
        ((i * d + j) * d + k) * d
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &[Rational] {
        let o = self.offset(i, j, k);
        &self.data[o..o + self.dim]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: &[Rational]) {
        assert_eq!(v.len(), self.dim);
        let o = self.offset(i, j, k);
        self.data[o..o + self.dim].clone_from_slice(v);
    }

    /// Sets `{e_i,e_j,e_k} = v` and `{e_j,e_i,e_k} = −v`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, k: usize, v: &[Rational]) {
        self.set(i, j, k, v);
        let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
        self.set(j, i, k, &neg);
    }

    pub fn apply(&self, x: &[Rational], y: &[Rational], z: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let xy = xi * yj;
                for (k, zk) in z.iter().enumerate() {
                    if !zk.is_zero() {
                        axpy(&mut out, &(&xy * zk), self.get(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// `{v, e_j, e_k}`
    pub fn apply_vbb(&self, v: &[Rational], j: usize, k: usize) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (i, vi) in v.iter().enumerate() {
            axpy(&mut out, vi, self.get(i, j, k));
        }
        out
    }

    /// `{e_i, v, e_k}`
    pub fn apply_bvb(&self, i: usize, v: &[Rational], k: usize) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (j, vj) in v.iter().enumerate() {
            axpy(&mut out, vj, self.get(i, j, k));
        }
        out
    }

    /// `{e_i, e_j, v}`
    pub fn apply_bbv(&self, i: usize, j: usize, v: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim);
        for (k, vk) in v.iter().enumerate() {
            axpy(&mut out, vk, self.get(i, j, k));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }
}

/// The six defining identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Ly1,
    Ly2,
    Ly3,
    Ly4,
    Ly5,
    Ly6,
}

impl Axiom {
    pub const ALL: [Axiom; 6] = [Axiom::Ly1, Axiom::Ly2, Axiom::Ly3, Axiom::Ly4, Axiom::Ly5, Axiom::Ly6];

    /// Number of basis arguments the identity takes.
    pub fn arity(self) -> usize {
        match self {
            Axiom::Ly1 => 2,
            Axiom::Ly2 | Axiom::Ly3 => 3,
            Axiom::Ly4 | Axiom::Ly5 => 4,
            Axiom::Ly6 => 5,
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = Axiom::ALL.iter().position(|a| a == self).unwrap() + 1;
        write!(f, "LY{n}")
    }
}

/// One failing instance of an identity: the basis tuple (0-based) and the
/// nonzero value of `lhs − rhs` there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub tuple: Vec<usize>,
    pub defect: Vec<Rational>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_of(&self, axiom: Axiom) -> impl Iterator<Item = &AxiomViolation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }

    pub fn violated_axioms(&self) -> Vec<Axiom> {
        let mut v: Vec<Axiom> = self.violations.iter().map(|x| x.axiom).collect();
        v.sort();
        v.dedup();
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LyAlgebra {
    name: String,
    binary: BilinearTable,
    ternary: TrilinearTable,
}

impl LyAlgebra {
    pub fn zero(name: impl Into<String>, dim: usize) -> Self {
        LyAlgebra {
            name: name.into(),
            binary: BilinearTable::zero(dim),
            ternary: TrilinearTable::zero(dim),
        }
    }

    /// Wraps raw tables without normalising; LY1/LY2 may fail on the result.
    pub fn from_tables(
        name: impl Into<String>,
        binary: BilinearTable,
        ternary: TrilinearTable,
    ) -> Result<Self, AlgebraError> {
        if binary.dim() != ternary.dim() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "binary table has dimension {}, ternary table {}",
                binary.dim(),
                ternary.dim()
            )));
        }
        Ok(LyAlgebra {
            name: name.into(),
            binary,
            ternary,
        })
    }

    /// Builds an algebra from canonical entries (0-based). Binary entries need
    /// `i < j`, ternary entries need `i < j`; the antisymmetric partners are
    /// filled in and everything else is zero.
    pub fn from_entries(
        name: impl Into<String>,
        dim: usize,
        binary: &[(usize, usize, Vec<Rational>)],
        ternary: &[(usize, usize, usize, Vec<Rational>)],
    ) -> Result<Self, AlgebraError> {
        let check = |idx: &[usize], v: &[Rational]| -> Result<(), AlgebraError> {
            if let Some(&index) = idx.iter().find(|&&i| i >= dim) {
                return Err(AlgebraError::IndexOutOfRange { index, dim });
            }
            if v.len() != dim {
                return Err(AlgebraError::ShapeMismatch(format!(
                    "entry {idx:?} has {} coordinates, expected {dim}",
                    v.len()
                )));
            }
            if idx[0] >= idx[1] {
                return Err(AlgebraError::NonCanonicalEntry(idx.to_vec()));
            }
            Ok(())
        };
        let mut a = LyAlgebra::zero(name, dim);
        for (i, j, v) in binary {
            check(&[*i, *j], v)?;
            a.binary.set_antisymmetric(*i, *j, v);
        }
        for (i, j, k, v) in ternary {
            check(&[*i, *j, *k], v)?;
            a.ternary.set_antisymmetric(*i, *j, *k, v);
        }
        Ok(a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.binary.dim()
    }

    pub fn binary(&self) -> &BilinearTable {
        &self.binary
    }

    pub fn ternary(&self) -> &TrilinearTable {
        &self.ternary
    }

    pub fn binary_mut(&mut self) -> &mut BilinearTable {
        &mut self.binary
    }

    pub fn ternary_mut(&mut self) -> &mut TrilinearTable {
        &mut self.ternary
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        self.binary.apply(x, y)
    }

    pub fn triple(&self, x: &[Rational], y: &[Rational], z: &[Rational]) -> Vec<Rational> {
        self.ternary.apply(x, y, z)
    }

    /// Evaluates LY1–LY6 on every basis tuple.
    pub fn check_axioms(&self) -> AxiomReport {
        let mut report = AxiomReport::default();
        for axiom in Axiom::ALL {
            self.scan(axiom, &mut |tuple, defect| {
                report.violations.push(AxiomViolation {
                    axiom,
                    tuple: tuple.to_vec(),
                    defect,
                });
                true
            });
        }
        report
    }

    /// Same scan as [`check_axioms`](Self::check_axioms), stopping at the first failure.
    pub fn is_valid(&self) -> bool {
        let mut ok = true;
        for axiom in Axiom::ALL {
            self.scan(axiom, &mut |_, _| {
                ok = false;
                false
            });
            if !ok {
                break;
            }
        }
        ok
    }

    /// Value of `lhs − rhs` of `axiom` on a basis tuple of the right arity.
    pub fn axiom_defect(&self, axiom: Axiom, t: &[usize]) -> Vec<Rational> {
        assert_eq!(t.len(), axiom.arity());
        let c = &self.binary;
        let tr = &self.ternary;
        match axiom {
            Axiom::Ly1 => {
                let mut v = c.get(t[0], t[1]).to_vec();
                crate::linalg::add_assign_vec(&mut v, c.get(t[1], t[0]));
                v
            }
            Axiom::Ly2 => {
                let mut v = tr.get(t[0], t[1], t[2]).to_vec();
                crate::linalg::add_assign_vec(&mut v, tr.get(t[1], t[0], t[2]));
                v
            }
            Axiom::Ly3 => {
                let mut v = zero_vec(self.dim());
                for (x, y, z) in cyclic(t[0], t[1], t[2]) {
                    crate::linalg::add_assign_vec(&mut v, &c.apply_vb(c.get(x, y), z));
                    crate::linalg::add_assign_vec(&mut v, tr.get(x, y, z));
                }
                v
            }
            Axiom::Ly4 => {
                let u = t[3];
                let mut v = zero_vec(self.dim());
                for (x, y, z) in cyclic(t[0], t[1], t[2]) {
                    crate::linalg::add_assign_vec(&mut v, &tr.apply_vbb(c.get(x, y), z, u));
                }
                v
            }
            Axiom::Ly5 => {
                let (x, y, u, w) = (t[0], t[1], t[2], t[3]);
                let mut v = tr.apply_bbv(x, y, c.get(u, w));
                sub_assign_vec(&mut v, &c.apply_vb(tr.get(x, y, u), w));
                sub_assign_vec(&mut v, &c.apply_bv(u, tr.get(x, y, w)));
                v
            }
            Axiom::Ly6 => {
                // {x,y,{u,v,w}} − {{x,y,u},v,w} − {u,{x,y,v},w} − {u,v,{x,y,w}}
                let (x, y, u, w1, w2) = (t[0], t[1], t[2], t[3], t[4]);
                let mut v = tr.apply_bbv(x, y, tr.get(u, w1, w2));
                sub_assign_vec(&mut v, &tr.apply_vbb(tr.get(x, y, u), w1, w2));
                sub_assign_vec(&mut v, &tr.apply_bvb(u, tr.get(x, y, w1), w2));
                sub_assign_vec(&mut v, &tr.apply_bbv(u, w1, tr.get(x, y, w2)));
                v
            }
        }
    }

    /// Visits each violating tuple of `axiom`; the visitor returns `false` to stop.
    fn scan(&self, axiom: Axiom, visit: &mut dyn FnMut(&[usize], Vec<Rational>) -> bool) {
        let d = self.dim();
        if d == 0 {
            return;
        }
        let mut t = vec![0usize; axiom.arity()];
        loop {
            let defect = self.axiom_defect(axiom, &t);
            if !is_zero_vec(&defect) && !visit(&t, defect) {
                return;
            }
            if !next_tuple(&mut t, d) {
                return;
            }
        }
    }
}

fn cyclic(a: usize, b: usize, c: usize) -> [(usize, usize, usize); 3] {
    [(a, b, c), (b, c, a), (c, a, b)]
}

/// Odometer over `0..d` in every slot; false once it wraps around.
pub(crate) fn next_tuple(t: &mut [usize], d: usize) -> bool {
    if d == 0 {
        return false;
    }
    for slot in t.iter_mut().rev() {
        *slot += 1;
        if *slot < d {
            return true;
        }
        *slot = 0;
    }
    false
}

fn require_valid(a: &LyAlgebra) -> Result<(), AlgebraError> {
    let report = a.check_axioms();
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(AlgebraError::InvalidAlgebra {
            name: a.name().to_string(),
            count: report.violations.len(),
            first: format!("{} at {:?}", v.axiom, v.tuple),
        }),
    }
}

/// Checks antisymmetry and the Jacobi identity of a binary table.
pub fn check_lie(c: &BilinearTable) -> Result<(), AlgebraError> {
    let d = c.dim();
    for i in 0..d {
        for j in 0..d {
            let mut s = c.get(i, j).to_vec();
            crate::linalg::add_assign_vec(&mut s, c.get(j, i));
            if !is_zero_vec(&s) {
                return Err(AlgebraError::NotALieAlgebra {
                    reason: "antisymmetry",
                    tuple: vec![i, j],
                });
            }
        }
    }
    let mut t = [0usize; 3];
    loop {
        let mut s = zero_vec(d);
        for (x, y, z) in cyclic(t[0], t[1], t[2]) {
            crate::linalg::add_assign_vec(&mut s, &c.apply_vb(c.get(x, y), z));
        }
        if !is_zero_vec(&s) {
            return Err(AlgebraError::NotALieAlgebra {
                reason: "Jacobi identity",
                tuple: t.to_vec(),
            });
        }
        if !next_tuple(&mut t, d) {
            return Ok(());
        }
    }
}

/// A Lie algebra as an LY algebra with `{a,b,c} = [[a,b],c]`.
pub fn from_lie(name: impl Into<String>, c: &BilinearTable) -> Result<LyAlgebra, AlgebraError> {
    check_lie(c)?;
    let d = c.dim();
    let mut t = TrilinearTable::zero(d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                t.set(i, j, k, &c.apply_vb(c.get(i, j), k));
            }
        }
    }
    LyAlgebra::from_tables(name, c.clone(), t)
}

/// A Leibniz algebra `(g, ·)` as an LY algebra with `[a,b] = a·b − b·a` and
/// `{a,b,c} = −(a·b)·c`.
pub fn from_leibniz(name: impl Into<String>, p: &BilinearTable) -> Result<LyAlgebra, AlgebraError> {
    let d = p.dim();
    // x·(y·z) = (x·y)·z + y·(x·z)
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let mut s = p.apply_bv(x, p.get(y, z));
                sub_assign_vec(&mut s, &p.apply_vb(p.get(x, y), z));
                sub_assign_vec(&mut s, &p.apply_bv(y, p.get(x, z)));
                if !is_zero_vec(&s) {
                    return Err(AlgebraError::NotALeibnizAlgebra(vec![x, y, z]));
                }
            }
        }
    }
    let mut binary = BilinearTable::zero(d);
    let mut ternary = TrilinearTable::zero(d);
    for i in 0..d {
        for j in 0..d {
            let mut v = p.get(i, j).to_vec();
            sub_assign_vec(&mut v, p.get(j, i));
            binary.set(i, j, &v);
            for k in 0..d {
                let v: Vec<Rational> = p.apply_vb(p.get(i, j), k).iter().map(|x| -x).collect();
                ternary.set(i, j, k, &v);
            }
        }
    }
    LyAlgebra::from_tables(name, binary, ternary)
}

/// A ternary-only structure; validity is left to `check_axioms`.
pub fn from_lie_triple(name: impl Into<String>, t: TrilinearTable) -> LyAlgebra {
    let d = t.dim();
    LyAlgebra {
        name: name.into(),
        binary: BilinearTable::zero(d),
        ternary: t,
    }
}

/// The meson-field triple system on `n` generators:
/// `{G_i, G_j, G_k} = δ_ki G_j − δ_kj G_i`.
pub fn meson(n: usize) -> LyAlgebra {
    assert!(n >= 1, "meson field needs at least one generator");
    let mut t = TrilinearTable::zero(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = zero_vec(n);
                if k == i {
                    v[j] += Rational::one();
                }
                if k == j {
                    v[i] -= Rational::one();
                }
                t.set(i, j, k, &v);
            }
        }
    }
    from_lie_triple(format!("meson{n}"), t)
}

/// The three-dimensional algebra with `[e1,e2] = e3` and `{e1,e2,e1} = e3`,
/// every other bracket zero up to the sign forced by antisymmetry.
pub fn example_3dim() -> LyAlgebra {
    LyAlgebra::from_entries("3dim", 3, &[(0, 1, unit_vec(3, 2))], &[(0, 1, 0, unit_vec(3, 2))])
        .expect("canonical entries")
}

/// Abelian algebra: all constants zero.
pub fn abelian(d: usize) -> LyAlgebra {
    LyAlgebra::zero(format!("abelian{d}"), d)
}

/// Cross-product Lie algebra viewed as an LY algebra.
pub fn cross_product_lie() -> LyAlgebra {
    from_lie("crossproduct-lie", &BilinearTable::cross_product()).expect("so(3) is a Lie algebra")
}

/// LY structure on `m` from a reductive decomposition `g = h ⊕ m` of a Lie
/// algebra: `[a,b] = π_m⟨a,b⟩` and `{a,b,c} = ⟨π_h⟨a,b⟩, c⟩`. Basis vectors of
/// the result follow the order of `m_idx`.
pub fn from_reductive_pair(
    name: impl Into<String>,
    lie: &BilinearTable,
    h_idx: &[usize],
    m_idx: &[usize],
) -> Result<LyAlgebra, AlgebraError> {
    let n = lie.dim();
    let mut seen = vec![false; n];
    for &i in h_idx.iter().chain(m_idx) {
        if i >= n {
            return Err(AlgebraError::IndexOutOfRange { index: i, dim: n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(AlgebraError::BadPartition(format!("index {i} listed twice")));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(AlgebraError::BadPartition(format!("index {i} missing")));
    }
    check_lie(lie)?;
    let in_h = |i: usize| h_idx.contains(&i);
    let supported_in =
        |v: &[Rational], keep: &dyn Fn(usize) -> bool| v.iter().enumerate().all(|(k, x)| x.is_zero() || keep(k));
    for &a in h_idx {
        for &b in h_idx {
            if !supported_in(lie.get(a, b), &in_h) {
                return Err(AlgebraError::NotReductive {
                    inclusion: "[h,h] ⊆ h",
                    pair: (a, b),
                });
            }
        }
        for &b in m_idx {
            if !supported_in(lie.get(a, b), &|k| !in_h(k)) {
                return Err(AlgebraError::NotReductive {
                    inclusion: "[h,m] ⊆ m",
                    pair: (a, b),
                });
            }
        }
    }
    let dm = m_idx.len();
    let project_m = |v: &[Rational]| -> Vec<Rational> { m_idx.iter().map(|&k| v[k].clone()).collect() };
    let project_h = |v: &[Rational]| -> Vec<Rational> {
        v.iter()
            .enumerate()
            .map(|(k, x)| if in_h(k) { x.clone() } else { Rational::zero() })
            .collect()
    };
    let mut binary = BilinearTable::zero(dm);
    let mut ternary = TrilinearTable::zero(dm);
    for (a, &ga) in m_idx.iter().enumerate() {
        for (b, &gb) in m_idx.iter().enumerate() {
            let ab = lie.get(ga, gb);
            binary.set(a, b, &project_m(ab));
            let h_part = project_h(ab);
            for (c, &gc) in m_idx.iter().enumerate() {
                ternary.set(a, b, c, &project_m(&lie.apply_vb(&h_part, gc)));
            }
        }
    }
    LyAlgebra::from_tables(name, binary, ternary)
}

/// Maximal defect of bracket preservation, `max |φ[x,y] − [φx,φy]'|` and the
/// ternary analogue over all basis tuples. `φ` has `b.dim()` rows and
/// `a.dim()` columns.
pub fn homomorphism_defect(phi: &Matrix, a: &LyAlgebra, b: &LyAlgebra) -> Result<Rational, AlgebraError> {
    if phi.rows() != b.dim() || phi.cols() != a.dim() {
        return Err(AlgebraError::ShapeMismatch(format!(
            "map is {}x{}, algebras have dimensions {} -> {}",
            phi.rows(),
            phi.cols(),
            a.dim(),
            b.dim()
        )));
    }
    let d = a.dim();
    let images: Vec<Vec<Rational>> = (0..d).map(|i| phi.column(i)).collect();
    let mut worst = Rational::zero();
    for i in 0..d {
        for j in 0..d {
            let mut v = phi.mul_vec(a.binary.get(i, j));
            sub_assign_vec(&mut v, &b.bracket(&images[i], &images[j]));
            worst = worst.max(crate::linalg::max_abs(&v));
            for k in 0..d {
                let mut v = phi.mul_vec(a.ternary.get(i, j, k));
                sub_assign_vec(&mut v, &b.triple(&images[i], &images[j], &images[k]));
                worst = worst.max(crate::linalg::max_abs(&v));
            }
        }
    }
    Ok(worst)
}

pub fn is_homomorphism(phi: &Matrix, a: &LyAlgebra, b: &LyAlgebra) -> Result<bool, AlgebraError> {
    Ok(homomorphism_defect(phi, a, b)?.is_zero())
}

pub fn is_automorphism(phi: &Matrix, a: &LyAlgebra) -> Result<bool, AlgebraError> {
    if !phi.is_square() {
        return Err(AlgebraError::ShapeMismatch(format!(
            "automorphism candidate is {}x{}",
            phi.rows(),
            phi.cols()
        )));
    }
    Ok(is_homomorphism(phi, a, a)? && phi.is_invertible())
}

/// Value of both derivation identities for the endomorphism `dm`, stacked:
/// `D[e_i,e_j] − [De_i,e_j] − [e_i,De_j]` for all pairs, then the ternary
/// analogue for all triples.
pub fn derivation_defect(a: &LyAlgebra, dm: &Matrix) -> Vec<Rational> {
    let d = a.dim();
    let c = &a.binary;
    let t = &a.ternary;
    let images: Vec<Vec<Rational>> = (0..d).map(|i| dm.column(i)).collect();
    let mut out = Vec::with_capacity(d * d * d + d * d * d * d);
    for i in 0..d {
        for j in 0..d {
            let mut v = dm.mul_vec(c.get(i, j));
            sub_assign_vec(&mut v, &c.apply_vb(&images[i], j));
            sub_assign_vec(&mut v, &c.apply_bv(i, &images[j]));
            out.extend(v);
        }
    }
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut v = dm.mul_vec(t.get(i, j, k));
                sub_assign_vec(&mut v, &t.apply_vbb(&images[i], j, k));
                sub_assign_vec(&mut v, &t.apply_bvb(i, &images[j], k));
                sub_assign_vec(&mut v, &t.apply_bbv(i, j, &images[k]));
                out.extend(v);
            }
        }
    }
    out
}

pub fn is_derivation(a: &LyAlgebra, dm: &Matrix) -> bool {
    is_zero_vec(&derivation_defect(a, dm))
}

/// Row-major flattening used for derivation bases: entry `(r, c)` sits at `r·d + c`.
pub fn matrix_from_flat(d: usize, v: &[Rational]) -> Matrix {
    assert_eq!(v.len(), d * d);
    Matrix::from_fn(d, d, |r, c| v[r * d + c].clone())
}

pub fn flatten_matrix(m: &Matrix) -> Vec<Rational> {
    m.entries().to_vec()
}

/// The derivation algebra as a subspace of row-major flattened `d×d` matrices.
pub fn derivations(a: &LyAlgebra) -> Result<SubspaceBasis, AlgebraError> {
    require_valid(a)?;
    let d = a.dim();
    let columns: Vec<Vec<Rational>> = (0..d * d)
        .map(|idx| derivation_defect(a, &matrix_from_flat(d, &unit_vec(d * d, idx))))
        .collect();
    let rows = d * d * d + d * d * d * d;
    let system = Matrix::from_columns(rows, &columns);
    let der = kernel_basis(&system);
    debug_assert!(commutator_closed(d, &der));
    Ok(der)
}

/// True when the span of the given flattened matrices is closed under `[A,B] = AB − BA`.
pub fn commutator_closed(d: usize, space: &SubspaceBasis) -> bool {
    let mats: Vec<Matrix> = space.vectors().iter().map(|v| matrix_from_flat(d, v)).collect();
    mats.iter().enumerate().all(|(i, x)| {
        mats[i + 1..]
            .iter()
            .all(|y| space.contains(&flatten_matrix(&Matrix::commutator(x, y))))
    })
}

/// The inner derivation `z ↦ {x, y, z}`.
pub fn inner_derivation(a: &LyAlgebra, x: &[Rational], y: &[Rational]) -> Result<Matrix, AlgebraError> {
    require_valid(a)?;
    let d = a.dim();
    if x.len() != d || y.len() != d {
        return Err(AlgebraError::ShapeMismatch(format!(
            "arguments must have {d} coordinates"
        )));
    }
    let cols: Vec<Vec<Rational>> = (0..d).map(|k| a.triple(x, y, &unit_vec(d, k))).collect();
    Ok(Matrix::from_columns(d, &cols))
}

/// Shorthand for an integer vector.
pub fn qvec(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| q(x)).collect()
}
