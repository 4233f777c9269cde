//! Yamaguti cochains, coboundary operators and cohomology dimensions.
//!
//! A cochain of degree `n` is an `n`-linear map `g^n → V` that vanishes
//! whenever two arguments in the same consecutive pair `(x_{2i−1}, x_{2i})`
//! coincide. Over ℚ that is antisymmetry in each pair, so coefficients are
//! stored only on increasing pairs `i < j`; a trailing unpaired argument (odd
//! degree) is stored on every basis index.
//!
//! Every coboundary is assembled as an explicit matrix acting on coefficient
//! vectors. Rows are indexed by output coefficients (canonical argument tuple,
//! then module coordinate) and columns by input coefficients; kernels and
//! images then come straight from [`crate::linalg`].

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{AlgebraError, LyAlgebra};
use crate::linalg::{
    image_basis, is_zero_vec, kernel_basis, quotient_dim, unit_vec, zero_vec, LinalgError, Matrix, Rational,
    SubspaceBasis,
};
use crate::representation::{check_representation, RepError, Representation};

/// Default refusal threshold on the number of target coordinates.
pub const DEFAULT_SIZE_CAP: usize = 50_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("coefficients are not a representation: {0}")]
    InvalidRepresentation(String),
    #[error("level {0} is out of range for this operation")]
    LevelOutOfRange(usize),
    #[error("target cochain space has {needed} coordinates, cap is {cap}")]
    SizeCapExceeded { needed: usize, cap: usize },
    #[error("coboundaries are not contained in cocycles at level {level}")]
    CocycleContainmentFailure { level: usize },
}

impl From<RepError> for CohomologyError {
    fn from(e: RepError) -> Self {
        match e {
            RepError::ShapeMismatch(s) => CohomologyError::ShapeMismatch(s),
            RepError::Algebra(a) => CohomologyError::Algebra(a),
        }
    }
}

impl From<LinalgError> for CohomologyError {
    fn from(e: LinalgError) -> Self {
        CohomologyError::ShapeMismatch(e.to_string())
    }
}

/// How a group of consecutive arguments is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    /// Two arguments, antisymmetric; stored on `i < j`.
    Pair,
    /// One unrestricted argument.
    Single,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CochainShape {
    slots: Vec<Slot>,
    d: usize,
    e: usize,
}

fn pair_count(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

/// Position of `(i, j)`, `i < j`, in the lexicographic list of increasing pairs.
fn pair_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * (2 * d - i - 1) / 2 + (j - i - 1)
}

fn pair_at(d: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..d {
        let row = d - i - 1;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("pair index out of range")
}

impl CochainShape {
    pub fn new(slots: Vec<Slot>, d: usize, e: usize) -> Self {
        CochainShape { slots, d, e }
    }

    /// `C^n`: `[Single]` for `n = 1`, `p` pairs for `n = 2p`, `p` pairs and a
    /// trailing single for `n = 2p + 1`.
    pub fn degree(n: usize, d: usize, e: usize) -> Self {
        assert!(n >= 1, "cochain degree starts at 1");
        let mut slots = vec![Slot::Pair; n / 2];
        if n % 2 == 1 {
            slots.push(Slot::Single);
        }
        CochainShape { slots, d, e }
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn algebra_dim(&self) -> usize {
        self.d
    }

    pub fn module_dim(&self) -> usize {
        self.e
    }

    pub fn arity(&self) -> usize {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::Pair => 2,
                Slot::Single => 1,
            })
            .sum()
    }

    fn radix(&self, s: Slot) -> usize {
        match s {
            Slot::Pair => pair_count(self.d),
            Slot::Single => self.d,
        }
    }

    /// Number of stored argument tuples.
    pub fn blocks(&self) -> usize {
        self.slots.iter().map(|&s| self.radix(s)).product()
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.blocks() * self.e
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Block holding the value at a basis argument tuple, with the sign picked
    /// up by sorting each pair; `None` when some pair repeats an index.
    pub fn locate(&self, args: &[usize]) -> Option<(bool, usize)> {
        debug_assert_eq!(args.len(), self.arity());
        let mut negate = false;
        let mut block = 0;
        let mut pos = 0;
        for &s in &self.slots {
            let digit = match s {
                Slot::Pair => {
                    let (i, j) = (args[pos], args[pos + 1]);
                    pos += 2;
                    match i.cmp(&j) {
                        std::cmp::Ordering::Equal => return None,
                        std::cmp::Ordering::Less => pair_index(self.d, i, j),
                        std::cmp::Ordering::Greater => {
                            negate = !negate;
                            pair_index(self.d, j, i)
                        }
                    }
                }
                Slot::Single => {
                    pos += 1;
                    args[pos - 1]
                }
            };
            block = block * self.radix(s) + digit;
        }
        Some((negate, block))
    }

    /// Canonical argument tuple (increasing within each pair) of a block.
    pub fn block_args(&self, mut block: usize) -> Vec<usize> {
        let mut digits = Vec::with_capacity(self.slots.len());
        for &s in self.slots.iter().rev() {
            let r = self.radix(s);
            digits.push(block % r);
            block /= r;
        }
        digits.reverse();
        let mut args = Vec::with_capacity(self.arity());
        for (&s, &digit) in self.slots.iter().zip(&digits) {
            match s {
                Slot::Pair => {
                    let (i, j) = pair_at(self.d, digit);
                    args.push(i);
                    args.push(j);
                }
                Slot::Single => args.push(digit),
            }
        }
        args
    }
}

/// Dimension of `C^n` for an algebra of dimension `d` and module of dimension `e`.
pub fn cochain_dim(n: usize, d: usize, e: usize) -> usize {
    CochainShape::degree(n, d, e).len()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    shape: CochainShape,
    coeffs: Vec<Rational>,
}

impl Cochain {
    pub fn zero(shape: CochainShape) -> Self {
        let n = shape.len();
        Cochain {
            shape,
            coeffs: zero_vec(n),
        }
    }

    pub fn from_coeffs(shape: CochainShape, coeffs: Vec<Rational>) -> Result<Self, CohomologyError> {
        if coeffs.len() != shape.len() {
            return Err(CohomologyError::ShapeMismatch(format!(
                "cochain needs {} coefficients, got {}",
                shape.len(),
                coeffs.len()
            )));
        }
        Ok(Cochain { shape, coeffs })
    }

    pub fn shape(&self) -> &CochainShape {
        &self.shape
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coeffs)
    }

    /// Value (a module vector) on a basis argument tuple.
    pub fn eval(&self, args: &[usize]) -> Vec<Rational> {
        let e = self.shape.e;
        match self.shape.locate(args) {
            None => zero_vec(e),
            Some((negate, block)) => {
                let v = &self.coeffs[block * e..(block + 1) * e];
                if negate {
                    v.iter().map(|x| -x).collect()
                } else {
                    v.to_vec()
                }
            }
        }
    }

    /// Sets the value on a canonical tuple (each pair increasing).
    pub fn set(&mut self, args: &[usize], value: &[Rational]) -> Result<(), CohomologyError> {
        let e = self.shape.e;
        match self.shape.locate(args) {
            Some((false, block)) if value.len() == e => {
                self.coeffs[block * e..(block + 1) * e].clone_from_slice(value);
                Ok(())
            }
            _ => Err(CohomologyError::ShapeMismatch(format!(
                "{args:?} is not a canonical argument tuple for this cochain"
            ))),
        }
    }

    /// Multilinear value on arbitrary algebra vectors.
    pub fn eval_vectors(&self, args: &[Vec<Rational>]) -> Vec<Rational> {
        assert_eq!(args.len(), self.shape.arity());
        let mut out = zero_vec(self.shape.e);
        let mut idx = vec![0usize; args.len()];
        let d = self.shape.d;
        if d == 0 {
            return out;
        }
        loop {
            let mut coef = Rational::one();
            for (slot, &i) in idx.iter().enumerate() {
                coef *= &args[slot][i];
                if coef.is_zero() {
                    break;
                }
            }
            if !coef.is_zero() {
                crate::linalg::axpy(&mut out, &coef, &self.eval(&idx));
            }
            if !crate::algebra::next_tuple(&mut idx, d) {
                return out;
            }
        }
    }
}

/// A `(2p, 2p+1)`-cochain `(f, g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainPair {
    level: usize,
    f: Cochain,
    g: Cochain,
}

impl CochainPair {
    pub fn zero(level: usize, d: usize, e: usize) -> Self {
        assert!(level >= 1, "cochain pairs start at level 1");
        CochainPair {
            level,
            f: Cochain::zero(CochainShape::degree(2 * level, d, e)),
            g: Cochain::zero(CochainShape::degree(2 * level + 1, d, e)),
        }
    }

    pub fn new(f: Cochain, g: Cochain) -> Result<Self, CohomologyError> {
        let fs = f.shape();
        let gs = g.shape();
        let level = fs.arity() / 2;
        let ok = level >= 1
            && *fs == CochainShape::degree(2 * level, fs.d, fs.e)
            && *gs == CochainShape::degree(2 * level + 1, fs.d, fs.e);
        if !ok {
            return Err(CohomologyError::ShapeMismatch(
                "f and g must have degrees 2p and 2p+1 over the same spaces".into(),
            ));
        }
        Ok(CochainPair { level, f, g })
    }

    /// Splits a coefficient vector laid out as `f` then `g`.
    pub fn from_vector(level: usize, d: usize, e: usize, v: &[Rational]) -> Result<Self, CohomologyError> {
        let mut c = Self::zero(level, d, e);
        let nf = c.f.coeffs.len();
        if v.len() != nf + c.g.coeffs.len() {
            return Err(CohomologyError::ShapeMismatch(format!(
                "level {level} cochain needs {} coefficients, got {}",
                nf + c.g.coeffs.len(),
                v.len()
            )));
        }
        c.f.coeffs.clone_from_slice(&v[..nf]);
        c.g.coeffs.clone_from_slice(&v[nf..]);
        Ok(c)
    }

    pub fn to_vector(&self) -> Vec<Rational> {
        self.f.coeffs.iter().chain(&self.g.coeffs).cloned().collect()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn algebra_dim(&self) -> usize {
        self.f.shape.d
    }

    pub fn module_dim(&self) -> usize {
        self.f.shape.e
    }

    pub fn f(&self) -> &Cochain {
        &self.f
    }

    pub fn g(&self) -> &Cochain {
        &self.g
    }

    pub fn f_mut(&mut self) -> &mut Cochain {
        &mut self.f
    }

    pub fn g_mut(&mut self) -> &mut Cochain {
        &mut self.g
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero() && self.g.is_zero()
    }

    pub fn len(&self) -> usize {
        self.f.coeffs.len() + self.g.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Total coordinate count of `C^(2p, 2p+1)`.
pub fn pair_space_dim(level: usize, d: usize, e: usize) -> usize {
    cochain_dim(2 * level, d, e) + cochain_dim(2 * level + 1, d, e)
}

/// Which input cochain a term reads from: its shape and first column.
#[derive(Clone, Copy)]
struct Input<'s> {
    shape: &'s CochainShape,
    col: usize,
}

/// Accumulates `coef · op · h(args)` terms into rows of an operator matrix.
struct Assembler {
    m: Matrix,
    e: usize,
}

impl Assembler {
    fn new(rows: usize, cols: usize, e: usize) -> Self {
        Assembler {
            m: Matrix::zeros(rows, cols),
            e,
        }
    }

    /// Adds `coef · op · h(args)` to the output block starting at `row`;
    /// `op = None` means the identity.
    fn term(&mut self, row: usize, input: Input<'_>, op: Option<&Matrix>, coef: &Rational, args: &[usize]) {
        if coef.is_zero() {
            return;
        }
        let Some((negate, block)) = input.shape.locate(args) else {
            return;
        };
        let c = if negate { -coef } else { coef.clone() };
        let col = input.col + block * self.e;
        match op {
            None => {
                for k in 0..self.e {
                    *self.m.entry_mut(row + k, col + k) += &c;
                }
            }
            Some(op) => {
                for o in 0..self.e {
                    for k in 0..self.e {
                        let x = op.get(o, k);
                        if !x.is_zero() {
                            *self.m.entry_mut(row + o, col + k) += &c * x;
                        }
                    }
                }
            }
        }
    }

    /// Same as [`term`](Self::term) with the argument at `pos` replaced by
    /// the algebra vector `v`, expanded linearly.
    fn term_vec(
        &mut self,
        row: usize,
        input: Input<'_>,
        op: Option<&Matrix>,
        coef: &Rational,
        args: &[usize],
        pos: usize,
        v: &[Rational],
    ) {
        let mut a = args.to_vec();
        for (l, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            a[pos] = l;
            self.term(row, input, op, &(coef * x), &a);
        }
    }
}

fn sign(positive: bool) -> Rational {
    if positive {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn check_dims(a: &LyAlgebra, r: &Representation) -> Result<(), CohomologyError> {
    if r.algebra_dim() != a.dim() {
        return Err(CohomologyError::ShapeMismatch(format!(
            "representation is over dimension {}, algebra has dimension {}",
            r.algebra_dim(),
            a.dim()
        )));
    }
    Ok(())
}

fn require_valid_algebra(a: &LyAlgebra) -> Result<(), CohomologyError> {
    check_representation(a, &Representation::trivial(a, 0))?;
    Ok(())
}

fn require_representation(a: &LyAlgebra, r: &Representation) -> Result<(), CohomologyError> {
    let report = check_representation(a, r)?;
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(CohomologyError::InvalidRepresentation(format!(
            "{} fails at {:?}",
            v.condition, v.tuple
        ))),
    }
}

/// `(x without positions 2k−2 and 2k−1)` for the 1-based pair number `k`.
fn drop_pair(x: &[usize], k: usize) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|&(i, _)| i != 2 * k - 2 && i != 2 * k - 1)
        .map(|(_, &v)| v)
        .collect()
}

/// Matrix of `δ = (δ_I, δ_II) : C^(2p,2p+1) → C^(2p+2,2p+3)` for `p ≥ 1`.
pub fn delta_matrix(a: &LyAlgebra, r: &Representation, p: usize) -> Result<Matrix, CohomologyError> {
    if p == 0 {
        return Err(CohomologyError::LevelOutOfRange(p));
    }
    check_dims(a, r)?;
    let d = a.dim();
    let e = r.module_dim();
    let f_in = CochainShape::degree(2 * p, d, e);
    let g_in = CochainShape::degree(2 * p + 1, d, e);
    let f_out = CochainShape::degree(2 * p + 2, d, e);
    let g_out = CochainShape::degree(2 * p + 3, d, e);
    let fi = Input { shape: &f_in, col: 0 };
    let gi = Input {
        shape: &g_in,
        col: f_in.len(),
    };
    let mut asm = Assembler::new(f_out.len() + g_out.len(), f_in.len() + g_in.len(), e);
    let s = sign(p.is_multiple_of(2));
    let c = a.binary();
    let t = a.ternary();

    // δ_I f(x_1, …, x_{2p+2})
    for block in 0..f_out.blocks() {
        let x = f_out.block_args(block);
        let row = block * e;
        let head = &x[..2 * p];
        let (y1, y2) = (x[2 * p], x[2 * p + 1]);
        let with = |last: usize| {
            let mut v = head.to_vec();
            v.push(last);
            v
        };
        asm.term(row, gi, Some(r.rho(y1)), &s, &with(y2));
        asm.term(row, gi, Some(r.rho(y2)), &-&s, &with(y1));
        asm.term_vec(row, gi, None, &-&s, &with(0), 2 * p, c.get(y1, y2));
        for k in 1..=p {
            let coef = sign(k % 2 == 1);
            asm.term(
                row,
                fi,
                Some(r.d_op(x[2 * k - 2], x[2 * k - 1])),
                &coef,
                &drop_pair(&x, k),
            );
        }
        for k in 1..=p + 1 {
            let coef = sign(k % 2 == 0);
            let rest = drop_pair(&x, k);
            for j in 2 * k + 1..=2 * p + 2 {
                let v = t.get(x[2 * k - 2], x[2 * k - 1], x[j - 1]);
                asm.term_vec(row, fi, None, &coef, &rest, j - 3, v);
            }
        }
    }

    // δ_II g(x_1, …, x_{2p+3})
    let base = f_out.len();
    for block in 0..g_out.blocks() {
        let x = g_out.block_args(block);
        let row = base + block * e;
        let mut first = x[..2 * p + 1].to_vec();
        asm.term(row, gi, Some(r.theta(x[2 * p + 1], x[2 * p + 2])), &s, &first);
        first[2 * p] = x[2 * p + 1];
        asm.term(row, gi, Some(r.theta(x[2 * p], x[2 * p + 2])), &-&s, &first);
        for k in 1..=p + 1 {
            let coef = sign(k % 2 == 1);
            asm.term(
                row,
                gi,
                Some(r.d_op(x[2 * k - 2], x[2 * k - 1])),
                &coef,
                &drop_pair(&x, k),
            );
        }
        for k in 1..=p + 1 {
            let coef = sign(k % 2 == 0);
            let rest = drop_pair(&x, k);
            for j in 2 * k + 1..=2 * p + 3 {
                let v = t.get(x[2 * k - 2], x[2 * k - 1], x[j - 1]);
                asm.term_vec(row, gi, None, &coef, &rest, j - 3, v);
            }
        }
    }
    Ok(asm.m)
}

/// Applies `δ` to a cochain pair.
pub fn delta(a: &LyAlgebra, r: &Representation, c: &CochainPair) -> Result<CochainPair, CohomologyError> {
    check_pair(a, r, c)?;
    let m = delta_matrix(a, r, c.level())?;
    CochainPair::from_vector(c.level() + 1, a.dim(), r.module_dim(), &m.mul_vec(&c.to_vector()))
}

fn check_pair(a: &LyAlgebra, r: &Representation, c: &CochainPair) -> Result<(), CohomologyError> {
    check_dims(a, r)?;
    if c.algebra_dim() != a.dim() || c.module_dim() != r.module_dim() {
        return Err(CohomologyError::ShapeMismatch(format!(
            "cochain is over ({}, {}), expected ({}, {})",
            c.algebra_dim(),
            c.module_dim(),
            a.dim(),
            r.module_dim()
        )));
    }
    Ok(())
}

/// Matrix of `f ↦ (δ_I f, δ_II f)` from `C^1 = Hom(g, V)` to `C^(2,3)`.
/// Columns follow the `C^1` layout: coordinate `c·e + m` is `f(e_c)_m`.
pub fn delta_zero_matrix(a: &LyAlgebra, r: &Representation) -> Result<Matrix, CohomologyError> {
    check_dims(a, r)?;
    let d = a.dim();
    let e = r.module_dim();
    let one = CochainShape::degree(1, d, e);
    let f2 = CochainShape::degree(2, d, e);
    let g3 = CochainShape::degree(3, d, e);
    let fi = Input { shape: &one, col: 0 };
    let mut asm = Assembler::new(f2.len() + g3.len(), one.len(), e);
    let pos = Rational::one();
    let neg = -Rational::one();
    for block in 0..f2.blocks() {
        let x = f2.block_args(block);
        let row = block * e;
        asm.term(row, fi, Some(r.rho(x[0])), &pos, &[x[1]]);
        asm.term(row, fi, Some(r.rho(x[1])), &neg, &[x[0]]);
        asm.term_vec(row, fi, None, &neg, &[0], 0, a.binary().get(x[0], x[1]));
    }
    for block in 0..g3.blocks() {
        let x = g3.block_args(block);
        let row = f2.len() + block * e;
        asm.term(row, fi, Some(r.theta(x[1], x[2])), &pos, &[x[0]]);
        asm.term(row, fi, Some(r.theta(x[0], x[2])), &neg, &[x[1]]);
        asm.term(row, fi, Some(r.d_op(x[0], x[1])), &pos, &[x[2]]);
        asm.term_vec(row, fi, None, &neg, &[0], 0, a.ternary().get(x[0], x[1], x[2]));
    }
    Ok(asm.m)
}

/// `C^1` coefficient vector of a linear map `g → V` given as an `e×d` matrix.
pub fn hom_to_vector(f: &Matrix) -> Vec<Rational> {
    let (e, d) = (f.rows(), f.cols());
    let mut v = Vec::with_capacity(d * e);
    for c in 0..d {
        for m in 0..e {
            v.push(f.get(m, c).clone());
        }
    }
    v
}

pub fn vector_to_hom(d: usize, e: usize, v: &[Rational]) -> Matrix {
    assert_eq!(v.len(), d * e);
    Matrix::from_fn(e, d, |m, c| v[c * e + m].clone())
}

/// Coboundary of the diagonal element `(f, f)` of `C^0`.
pub fn delta_zero(a: &LyAlgebra, r: &Representation, f: &Matrix) -> Result<CochainPair, CohomologyError> {
    check_dims(a, r)?;
    if f.rows() != r.module_dim() || f.cols() != a.dim() {
        return Err(CohomologyError::ShapeMismatch(format!(
            "C^1 element must be {}x{}, got {}x{}",
            r.module_dim(),
            a.dim(),
            f.rows(),
            f.cols()
        )));
    }
    let m = delta_zero_matrix(a, r)?;
    CochainPair::from_vector(1, a.dim(), r.module_dim(), &m.mul_vec(&hom_to_vector(f)))
}

/// Signs of the `ρ`-terms of `δ*_I` and the `θ`-terms of `δ*_II`, in cyclic
/// order `(x1; x2,x3)`, `(x2; x3,x1)`, `(x3; x1,x2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaStarSigns {
    pub rho: [bool; 3],
    pub theta: [bool; 3],
}

impl DeltaStarSigns {
    /// The signs under which `δ* ∘ δ` vanishes on `C^0` and cocycles give
    /// valid twisted semi-direct products: `ρ`-terms negative, `θ`-terms positive.
    pub const STANDARD: DeltaStarSigns = DeltaStarSigns {
        rho: [false, false, false],
        theta: [true, true, true],
    };
}

/// Shape of the `δ*_I` output: alternating in three arguments, stored as a
/// pair plus a single.
pub fn delta_star_i_shape(d: usize, e: usize) -> CochainShape {
    CochainShape::degree(3, d, e)
}

/// Shape of the `δ*_II` output: alternating in the first three arguments but
/// unrestricted in the fourth, so only the first pair is folded.
pub fn delta_star_ii_shape(d: usize, e: usize) -> CochainShape {
    CochainShape::new(vec![Slot::Pair, Slot::Single, Slot::Single], d, e)
}

/// Matrix of `δ* = (δ*_I, δ*_II) : C^(2,3) → C^3 × C^4`.
pub fn delta_star_matrix(a: &LyAlgebra, r: &Representation) -> Result<Matrix, CohomologyError> {
    delta_star_matrix_with_signs(a, r, DeltaStarSigns::STANDARD)
}

/// [`delta_star_matrix`] with explicit term signs; used to pin the sign
/// pattern against the identity `δ* ∘ δ|_{C^0} = 0`.
pub fn delta_star_matrix_with_signs(
    a: &LyAlgebra,
    r: &Representation,
    signs: DeltaStarSigns,
) -> Result<Matrix, CohomologyError> {
    check_dims(a, r)?;
    let d = a.dim();
    let e = r.module_dim();
    let f_in = CochainShape::degree(2, d, e);
    let g_in = CochainShape::degree(3, d, e);
    let out1 = delta_star_i_shape(d, e);
    let out2 = delta_star_ii_shape(d, e);
    let fi = Input { shape: &f_in, col: 0 };
    let gi = Input {
        shape: &g_in,
        col: f_in.len(),
    };
    let mut asm = Assembler::new(out1.len() + out2.len(), f_in.len() + g_in.len(), e);
    let one = Rational::one();
    let c = a.binary();

    for block in 0..out1.blocks() {
        let x = out1.block_args(block);
        let row = block * e;
        for (n, (p, q, s)) in cyclic3(x[0], x[1], x[2]).into_iter().enumerate() {
            // ±ρ(x_p) f(x_q, x_s) + f([x_p, x_q], x_s) + g(x_p, x_q, x_s)
            asm.term(row, fi, Some(r.rho(p)), &sign(signs.rho[n]), &[q, s]);
            asm.term_vec(row, fi, None, &one, &[0, s], 0, c.get(p, q));
            asm.term(row, gi, None, &one, &[p, q, s]);
        }
    }
    let base = out1.len();
    for block in 0..out2.blocks() {
        let x = out2.block_args(block);
        let row = base + block * e;
        let w = x[3];
        for (n, (p, q, s)) in cyclic3(x[0], x[1], x[2]).into_iter().enumerate() {
            // ±θ(x_p, x_4) f(x_q, x_s) + g([x_p, x_q], x_s, x_4)
            asm.term(row, fi, Some(r.theta(p, w)), &sign(signs.theta[n]), &[q, s]);
            asm.term_vec(row, gi, None, &one, &[0, s, w], 0, c.get(p, q));
        }
    }
    Ok(asm.m)
}

fn cyclic3(a: usize, b: usize, c: usize) -> [(usize, usize, usize); 3] {
    [(a, b, c), (b, c, a), (c, a, b)]
}

/// Applies `δ*` to a `(2,3)`-cochain.
pub fn delta_star(a: &LyAlgebra, r: &Representation, c: &CochainPair) -> Result<(Cochain, Cochain), CohomologyError> {
    check_pair(a, r, c)?;
    if c.level() != 1 {
        return Err(CohomologyError::LevelOutOfRange(c.level()));
    }
    let (d, e) = (a.dim(), r.module_dim());
    let v = delta_star_matrix(a, r)?.mul_vec(&c.to_vector());
    let s1 = delta_star_i_shape(d, e);
    let s2 = delta_star_ii_shape(d, e);
    let n1 = s1.len();
    Ok((
        Cochain::from_coeffs(s1, v[..n1].to_vec())?,
        Cochain::from_coeffs(s2, v[n1..].to_vec())?,
    ))
}

/// `H^1 = {f ∈ Hom(g, V) : δ_I f = 0, δ_II f = 0}`; basis vectors use the
/// [`hom_to_vector`] layout.
pub fn h1(a: &LyAlgebra, r: &Representation) -> Result<(usize, SubspaceBasis), CohomologyError> {
    check_dims(a, r)?;
    require_valid_algebra(a)?;
    require_representation(a, r)?;
    let k = kernel_basis(&delta_zero_matrix(a, r)?);
    Ok((k.dim(), k))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H23 {
    pub dim: usize,
    /// Cocycles: `ker δ ∩ ker δ*` in `C^(2,3)`.
    pub z: SubspaceBasis,
    /// Coboundaries: image of `C^0` under `δ`.
    pub b: SubspaceBasis,
}

/// How `Z^(2,3)` is read off the definition.
pub const Z23_READING: &str = "Z^(2,3) = ker(delta) ∩ ker(delta_star) on pairs (f,g)";

pub fn h23(a: &LyAlgebra, r: &Representation) -> Result<H23, CohomologyError> {
    check_dims(a, r)?;
    require_valid_algebra(a)?;
    require_representation(a, r)?;
    let dm = delta_matrix(a, r, 1)?;
    let ds = delta_star_matrix(a, r)?;
    let stacked = stack(&dm, &ds);
    let z = kernel_basis(&stacked);
    let b = image_basis(&delta_zero_matrix(a, r)?);
    let dim = quotient_dim(&z, &b).map_err(|_| CohomologyError::CocycleContainmentFailure { level: 1 })?;
    Ok(H23 { dim, z, b })
}

fn stack(top: &Matrix, bottom: &Matrix) -> Matrix {
    assert_eq!(top.cols(), bottom.cols());
    let mut rows = top.to_rows();
    rows.extend(bottom.to_rows());
    if rows.is_empty() {
        return Matrix::zeros(0, top.cols());
    }
    Matrix::from_rows(rows).expect("equal widths")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperCohomology {
    pub level: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim: usize,
    /// `δ_p ∘ δ_{p−1} = 0` as matrices.
    pub delta_squared_zero: bool,
}

/// `H^(2p,2p+1) = ker δ_p / δ_{p−1}(C^(2p−2,2p−1))` for `p ≥ 2`.
pub fn h_upper(a: &LyAlgebra, r: &Representation, p: usize, cap: usize) -> Result<UpperCohomology, CohomologyError> {
    if p < 2 {
        return Err(CohomologyError::LevelOutOfRange(p));
    }
    check_dims(a, r)?;
    let (d, e) = (a.dim(), r.module_dim());
    let needed = pair_space_dim(p + 1, d, e);
    if needed > cap {
        return Err(CohomologyError::SizeCapExceeded { needed, cap });
    }
    require_valid_algebra(a)?;
    require_representation(a, r)?;
    let upper = delta_matrix(a, r, p)?;
    let lower = delta_matrix(a, r, p - 1)?;
    let delta_squared_zero = (&upper * &lower).is_zero();
    let z = kernel_basis(&upper);
    let b = image_basis(&lower);
    let dim = quotient_dim(&z, &b).map_err(|_| CohomologyError::CocycleContainmentFailure { level: p })?;
    Ok(UpperCohomology {
        level: p,
        dim_z: z.dim(),
        dim_b: b.dim(),
        dim,
        delta_squared_zero,
    })
}

/// Summary of one cohomology computation, as emitted by the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyReport {
    /// `0` for `H^1`, `1` for `H^(2,3)`, `p ≥ 2` for `H^(2p,2p+1)`.
    pub p: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_h: usize,
    pub delta_squared_zero: bool,
    pub z_reading: Option<&'static str>,
}

/// Computes the group selected by `p` (see [`CohomologyReport::p`]).
pub fn cohomology_report(
    a: &LyAlgebra,
    r: &Representation,
    p: usize,
    cap: usize,
) -> Result<CohomologyReport, CohomologyError> {
    match p {
        0 | 1 => {
            let (d, e) = (a.dim(), r.module_dim());
            let needed = pair_space_dim(2, d, e);
            if needed > cap {
                return Err(CohomologyError::SizeCapExceeded { needed, cap });
            }
            let d0 = delta_zero_matrix(a, r)?;
            let squared = (&delta_matrix(a, r, 1)? * &d0).is_zero() && (&delta_star_matrix(a, r)? * &d0).is_zero();
            if p == 0 {
                let (dim, _) = h1(a, r)?;
                Ok(CohomologyReport {
                    p,
                    dim_z: dim,
                    dim_b: 0,
                    dim_h: dim,
                    delta_squared_zero: squared,
                    z_reading: None,
                })
            } else {
                let h = h23(a, r)?;
                Ok(CohomologyReport {
                    p,
                    dim_z: h.z.dim(),
                    dim_b: h.b.dim(),
                    dim_h: h.dim,
                    delta_squared_zero: squared,
                    z_reading: Some(Z23_READING),
                })
            }
        }
        _ => {
            let h = h_upper(a, r, p, cap)?;
            Ok(CohomologyReport {
                p,
                dim_z: h.dim_z,
                dim_b: h.dim_b,
                dim_h: h.dim,
                delta_squared_zero: h.delta_squared_zero,
                z_reading: None,
            })
        }
    }
}

/// True when `τ` satisfies both `δτ = 0` and `δ*τ = 0`.
pub fn is_23_cocycle(a: &LyAlgebra, r: &Representation, tau: &CochainPair) -> Result<bool, CohomologyError> {
    check_pair(a, r, tau)?;
    if tau.level() != 1 {
        return Err(CohomologyError::LevelOutOfRange(tau.level()));
    }
    let v = tau.to_vector();
    Ok(is_zero_vec(&delta_matrix(a, r, 1)?.mul_vec(&v)) && is_zero_vec(&delta_star_matrix(a, r)?.mul_vec(&v)))
}

/// Unit cochain: coefficient `idx` set to one.
pub fn unit_pair(level: usize, d: usize, e: usize, idx: usize) -> CochainPair {
    let n = pair_space_dim(level, d, e);
    CochainPair::from_vector(level, d, e, &unit_vec(n, idx)).expect("length matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{abelian, derivations, example_3dim, meson, qvec};
    use crate::linalg::{q, qf};

    #[test]
    fn dimensions() {
        assert_eq!(cochain_dim(2, 3, 3), 9);
        assert_eq!(cochain_dim(3, 3, 3), 27);
        assert_eq!(cochain_dim(2, 1, 4), 0);
        assert_eq!(cochain_dim(1, 2, 5), 10);
        assert_eq!(cochain_dim(4, 3, 2), 18);
        assert_eq!(cochain_dim(5, 2, 1), 2);
    }

    #[test]
    fn pair_indexing_round_trips() {
        for d in 2..6 {
            for idx in 0..pair_count(d) {
                let (i, j) = pair_at(d, idx);
                assert!(i < j);
                assert_eq!(pair_index(d, i, j), idx);
            }
        }
        let shape = CochainShape::new(vec![Slot::Pair, Slot::Single, Slot::Pair], 4, 2);
        for b in 0..shape.blocks() {
            assert_eq!(shape.locate(&shape.block_args(b)), Some((false, b)));
        }
        assert_eq!(shape.locate(&[1, 0, 2, 3, 3]), None);
        let (neg, _) = shape.locate(&[1, 0, 2, 1, 3]).unwrap();
        assert!(neg);
    }

    #[test]
    fn cochain_values_are_pairwise_antisymmetric() {
        let shape = CochainShape::degree(5, 3, 2);
        let coeffs: Vec<Rational> = (0..shape.len()).map(|i| qf(i as i64 - 7, 3)).collect();
        let c = Cochain::from_coeffs(shape, coeffs).unwrap();
        let u = vec![q(1), qf(-1, 2), q(3)];
        let v = vec![q(0), q(2), qf(1, 5)];
        let w = vec![q(-1), q(1), q(1)];
        assert!(is_zero_vec(&c.eval_vectors(&[
            u.clone(),
            u.clone(),
            v.clone(),
            w.clone(),
            w.clone()
        ])));
        assert!(is_zero_vec(&c.eval_vectors(&[
            v.clone(),
            w.clone(),
            u.clone(),
            u.clone(),
            v.clone()
        ])));
        let a = c.eval_vectors(&[u.clone(), v.clone(), w.clone(), u.clone(), v.clone()]);
        let b = c.eval_vectors(&[v.clone(), u.clone(), w.clone(), u.clone(), v.clone()]);
        let sum: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        assert!(is_zero_vec(&sum));
    }

    #[test]
    fn trivial_data_gives_zero_operators() {
        let a = abelian(2);
        let r = Representation::trivial(&a, 1);
        assert!(delta_matrix(&a, &r, 1).unwrap().is_zero());
        assert!(delta_matrix(&a, &r, 2).unwrap().is_zero());
        assert!(delta_zero_matrix(&a, &r).unwrap().is_zero());
        assert!(delta_star_matrix(&a, &r).unwrap().is_zero());
        let f = Matrix::from_i64(&[&[2, -3]]);
        assert!(delta_zero(&a, &r, &f).unwrap().is_zero());
    }

    #[test]
    fn delta_zero_on_identity() {
        // δ_I id(e1,e2) = [e1,e2] − [e2,e1] − [e1,e2] = e3
        let a = example_3dim();
        let r = Representation::adjoint(&a).unwrap();
        let c = delta_zero(&a, &r, &Matrix::identity(3)).unwrap();
        assert_eq!(c.f().eval(&[0, 1]), qvec(&[0, 0, 1]));
        assert!(delta_zero(&a, &r, &Matrix::zeros(3, 3)).unwrap().is_zero());
    }

    #[test]
    fn delta_zero_with_trivial_coefficients() {
        // δ f = (−f([·,·]), −f({·,·,·}))
        let a = example_3dim();
        let r = Representation::trivial(&a, 1);
        let f = Matrix::from_i64(&[&[0, 0, 5]]);
        let c = delta_zero(&a, &r, &f).unwrap();
        assert_eq!(c.f().eval(&[0, 1]), qvec(&[-5]));
        assert_eq!(c.g().eval(&[0, 1, 0]), qvec(&[-5]));
        assert_eq!(c.g().eval(&[0, 1, 1]), qvec(&[0]));
    }

    #[test]
    fn h1_matches_derivations() {
        for alg in [example_3dim(), meson(2), meson(3)] {
            let r = Representation::adjoint(&alg).unwrap();
            let (dim, _) = h1(&alg, &r).unwrap();
            assert_eq!(dim, derivations(&alg).unwrap().dim(), "{}", alg.name());
        }
        let a = abelian(2);
        assert_eq!(h1(&a, &Representation::trivial(&a, 3)).unwrap().0, 6);
    }

    #[test]
    fn trivial_coefficient_groups() {
        let a = abelian(2);
        let r = Representation::trivial(&a, 1);
        let h = h23(&a, &r).unwrap();
        assert_eq!((h.z.dim(), h.b.dim(), h.dim), (3, 0, 3));
        let up = h_upper(&a, &r, 2, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!((up.dim_z, up.dim_b, up.dim), (3, 0, 3));
        let one = abelian(1);
        let up = h_upper(&one, &Representation::trivial(&one, 1), 2, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(up.dim, 0);
    }

    #[test]
    fn size_cap_is_enforced() {
        let a = example_3dim();
        let r = Representation::adjoint(&a).unwrap();
        assert!(matches!(
            h_upper(&a, &r, 2, 100),
            Err(CohomologyError::SizeCapExceeded { needed: 324, cap: 100 })
        ));
        assert!(matches!(
            h_upper(&a, &r, 1, 100),
            Err(CohomologyError::LevelOutOfRange(1))
        ));
    }

    #[test]
    fn invalid_representation_is_rejected() {
        let a = example_3dim();
        let mut r = Representation::adjoint(&a).unwrap();
        *r.theta_mut(0, 1).entry_mut(2, 0) += q(1);
        assert!(matches!(h23(&a, &r), Err(CohomologyError::InvalidRepresentation(_))));
    }

    #[test]
    fn three_dim_adjoint_h23_contains_coboundaries() {
        let a = example_3dim();
        let r = Representation::adjoint(&a).unwrap();
        let h = h23(&a, &r).unwrap();
        assert!(h.z.contains_subspace(&h.b));
        assert_eq!(h.dim, h.z.dim() - h.b.dim());
    }
}
