use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use super::blade::{wedge_sign, Blade};
use super::MAX_DIMENSION;
use crate::{Error, Result};

/// Coefficient ring of a form: real scalars, or matrices for Lie-algebra
/// valued forms.
pub trait Coefficient: Clone + fmt::Debug + Send + Sync + 'static {
    fn is_zero(&self) -> bool;
    /// `self += s · other`
    fn add_scaled(&mut self, other: &Self, s: f64);
    fn scaled(&self, s: f64) -> Self;
    /// Squared Euclidean (Frobenius) size.
    fn norm_sqr(&self) -> f64;
}

/// A coefficient ring with an associative product.
pub trait Algebra: Coefficient {
    fn product(&self, other: &Self) -> Self;
    /// Whether the two coefficients can be multiplied.
    fn compatible(&self, _other: &Self) -> Result<()> {
        Ok(())
    }
}

impl Coefficient for f64 {
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += s * other;
    }
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn norm_sqr(&self) -> f64 {
        self * self
    }
}

impl Algebra for f64 {
    fn product(&self, other: &Self) -> Self {
        self * other
    }
}

/// An element of the exterior algebra over an `N`-dimensional space, stored
/// sparsely as `blade → coefficient`. Exact zeros are never stored.
#[derive(Clone, PartialEq)]
pub struct Multiform<C> {
    dim: usize,
    terms: BTreeMap<Blade, C>,
}

/// Real-valued form.
pub type Form = Multiform<f64>;

impl<C: Coefficient> Multiform<C> {
    /// The zero form. Panics if `dim` exceeds [`MAX_DIMENSION`]; use
    /// [`Multiform::try_zero`] for untrusted input.
    pub fn zero(dim: usize) -> Self {
        Self::try_zero(dim).expect("dimension too large")
    }

    pub fn try_zero(dim: usize) -> Result<Self> {
        if dim > MAX_DIMENSION {
            return Err(Error::DimensionTooLarge(dim));
        }
        Ok(Multiform {
            dim,
            terms: BTreeMap::new(),
        })
    }

    pub fn term(dim: usize, blade: Blade, coefficient: C) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(blade, &coefficient, 1.0);
        f
    }

    /// `coefficient · e^{i₁} ∧ … ∧ e^{i_k}` with indices in any order.
    pub fn monomial(dim: usize, coefficient: C, indices: &[usize]) -> Self {
        match Blade::from_indices(indices) {
            Some((blade, sign)) => Self::term(dim, blade, coefficient.scaled(sign)),
            None => Self::zero(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Blade, &C)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn coefficient(&self, blade: Blade) -> Option<&C> {
        self.terms.get(&blade)
    }

    /// `self += s · c · blade`, dropping the term if it cancels exactly.
    pub fn add_term(&mut self, blade: Blade, c: &C, s: f64) {
        debug_assert!(blade.fits(self.dim), "blade {blade} outside dimension {}", self.dim);
        if s == 0.0 || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&blade) {
            Some(existing) => {
                existing.add_scaled(c, s);
                if existing.is_zero() {
                    self.terms.remove(&blade);
                }
            }
            None => {
                self.terms.insert(blade, c.scaled(s));
            }
        }
    }

    /// Distinct grades present, ascending.
    pub fn grades(&self) -> Vec<usize> {
        let mut g: Vec<usize> = self.terms.keys().map(|b| b.grade()).collect();
        g.sort_unstable();
        g.dedup();
        g
    }

    /// `Ok(None)` for the zero form, `Ok(Some(k))` for a homogeneous form,
    /// [`Error::MixedGrade`] otherwise.
    pub fn homogeneous_grade(&self) -> Result<Option<usize>> {
        let g = self.grades();
        match g.len() {
            0 => Ok(None),
            1 => Ok(Some(g[0])),
            _ => Err(Error::MixedGrade(g)),
        }
    }

    /// Fails unless the form is zero or homogeneous of grade `k`.
    pub fn expect_grade(&self, k: usize) -> Result<()> {
        match self.homogeneous_grade()? {
            Some(found) if found != k => Err(Error::GradeMismatch { expected: k, found }),
            _ => Ok(()),
        }
    }

    /// Part of grade `k`.
    pub fn grade_part(&self, k: usize) -> Self {
        Multiform {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == k)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (b, c) in &self.terms {
            out.add_term(*b, c, s);
        }
        out
    }

    /// `self + s · other`
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!(self.dim, other.dim, "adding forms of different dimension");
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(*b, c, s);
        }
        out
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(Blade, &C) -> D) -> Multiform<D> {
        let mut out = Multiform::zero(self.dim);
        for (b, c) in &self.terms {
            out.add_term(*b, &f(*b, c), 1.0);
        }
        out
    }

    /// Sum of squared coefficient sizes in the stored (orthonormal) basis.
    pub fn coefficient_norm_sqr(&self) -> f64 {
        self.terms.values().map(Coefficient::norm_sqr).sum()
    }

    /// Largest coefficient size.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr().sqrt()).fold(0.0, f64::max)
    }

    /// Drops terms smaller than `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Multiform {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm_sqr().sqrt() > tol)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    /// `e^i ∧ self`
    pub fn left_basis_wedge(&self, i: usize) -> Self {
        let e = Blade::basis(i);
        let mut out = Self::zero(self.dim);
        for (b, c) in &self.terms {
            let s = wedge_sign(e, *b);
            if s != 0 {
                out.add_term(b.with(i), c, s as f64);
            }
        }
        out
    }

    /// Embeds into dimension `dim + shift` by moving every index up by `shift`.
    /// With `shift = 1` this lifts a form on `M` to the cylinder `ℝ × M`.
    pub fn shifted(&self, shift: usize) -> Self {
        let mut out = Self::zero(self.dim + shift);
        for (b, c) in &self.terms {
            out.add_term(Blade::from_mask(b.mask() << shift), c, 1.0);
        }
        out
    }

    /// Interior product `i_v` with a vector given by its components in the
    /// dual basis.
    pub fn interior(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(v.len(), self.dim));
        }
        let mut out = Self::zero(self.dim);
        for (b, c) in &self.terms {
            for (pos, j) in b.indices().enumerate() {
                let s = if pos % 2 == 0 { v[j] } else { -v[j] };
                out.add_term(b.without(j), c, s);
            }
        }
        Ok(out)
    }

    /// Rewrites the form in a new coframe. `m` has one row per old basis
    /// covector and one column per new one: `e^i = Σ_a m[(i, a)] f^a`.
    /// The image lives in dimension `m.ncols()`; this covers both changes
    /// of basis and pullbacks along linear maps.
    pub fn change_basis(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch(m.nrows(), self.dim));
        }
        let new_dim = m.ncols();
        let mut out = Self::try_zero(new_dim)?;
        let mut targets: BTreeMap<usize, Vec<(Blade, Vec<usize>)>> = BTreeMap::new();
        for (b, c) in &self.terms {
            let k = b.grade();
            let rows: Vec<usize> = b.indices().collect();
            let cands = targets.entry(k).or_insert_with(|| {
                Blade::all_of_grade(new_dim, k)
                    .into_iter()
                    .map(|t| (t, t.indices().collect()))
                    .collect()
            });
            for (target, cols) in cands.iter() {
                let det = minor_det(m, &rows, cols);
                if det != 0.0 {
                    out.add_term(*target, c, det);
                }
            }
        }
        Ok(out)
    }
}

impl<C: Algebra> Multiform<C> {
    /// Exterior product; coefficients multiply in order (left · right).
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    ca.compatible(cb)?;
                    out.add_term(Blade::from_mask(a.mask() | b.mask()), &ca.product(cb), s as f64);
                }
            }
        }
        Ok(out)
    }
}

impl Form {
    pub fn scalar(dim: usize, value: f64) -> Self {
        Self::term(dim, Blade::SCALAR, value)
    }

    pub fn one_form(dim: usize, i: usize) -> Self {
        Self::term(dim, Blade::basis(i), 1.0)
    }

    /// `e^0 ∧ … ∧ e^{N-1}`
    pub fn volume(dim: usize) -> Self {
        Self::term(dim, Blade::from_mask(super::blade::full_mask(dim)), 1.0)
    }

    /// Sum of signed monomials, e.g. `Form::from_monomials(6, &[(1.0, &[0, 1])])`.
    pub fn from_monomials(dim: usize, terms: &[(f64, &[usize])]) -> Self {
        let mut out = Self::zero(dim);
        for (c, idx) in terms {
            out = &out + &Self::monomial(dim, *c, idx);
        }
        out
    }

    /// Coefficient of `blade`, zero when absent.
    pub fn get(&self, blade: Blade) -> f64 {
        self.coefficient(blade).copied().unwrap_or(0.0)
    }

    /// Coefficient of the top blade.
    pub fn top_coefficient(&self) -> f64 {
        self.get(Blade::from_mask(super::blade::full_mask(self.dim)))
    }

    /// Scalar-times-matrix lift `self ⊗ x`.
    pub fn tensor<C: Coefficient>(&self, x: &C) -> Multiform<C> {
        self.map_coefficients(|_, c| x.scaled(*c))
    }

    /// Scalar form wedged into a coefficient-valued form: `self ∧ other`.
    pub fn wedge_into<C: Coefficient>(&self, other: &Multiform<C>) -> Result<Multiform<C>> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Multiform::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let s = wedge_sign(*a, *b);
                if s != 0 {
                    out.add_term(Blade::from_mask(a.mask() | b.mask()), cb, s as f64 * ca);
                }
            }
        }
        Ok(out)
    }
}

/// Determinant of the square submatrix `m[rows, cols]`.
pub(crate) fn minor_det(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    match k {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        2 => m[(rows[0], cols[0])] * m[(rows[1], cols[1])] - m[(rows[0], cols[1])] * m[(rows[1], cols[0])],
        3 => {
            let e = |r: usize, c: usize| m[(rows[r], cols[c])];
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        _ => {
            let mut a = [[0.0f64; 16]; 16];
            for (r, &i) in rows.iter().enumerate() {
                for (c, &j) in cols.iter().enumerate() {
                    a[r][c] = m[(i, j)];
                }
            }
            lu_det(&mut a, k)
        }
    }
}

fn lu_det(a: &mut [[f64; 16]; 16], k: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for r in col + 1..k {
            let f = a[r][col] / p;
            if f != 0.0 {
                for c in col + 1..k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    det
}

impl<C: Coefficient> Add for &Multiform<C> {
    type Output = Multiform<C>;
    fn add(self, rhs: Self) -> Multiform<C> {
        self.add_scaled(rhs, 1.0)
    }
}

impl<C: Coefficient> Sub for &Multiform<C> {
    type Output = Multiform<C>;
    fn sub(self, rhs: Self) -> Multiform<C> {
        self.add_scaled(rhs, -1.0)
    }
}

impl<C: Coefficient> Add for Multiform<C> {
    type Output = Multiform<C>;
    fn add(self, rhs: Self) -> Multiform<C> {
        &self + &rhs
    }
}

impl<C: Coefficient> Sub for Multiform<C> {
    type Output = Multiform<C>;
    fn sub(self, rhs: Self) -> Multiform<C> {
        &self - &rhs
    }
}

impl<C: Coefficient> Neg for &Multiform<C> {
    type Output = Multiform<C>;
    fn neg(self) -> Multiform<C> {
        self.scale(-1.0)
    }
}

impl<C: Coefficient> Mul<f64> for &Multiform<C> {
    type Output = Multiform<C>;
    fn mul(self, s: f64) -> Multiform<C> {
        self.scale(s)
    }
}

impl<C: Coefficient> fmt::Debug for Multiform<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multiform[{}]", self.dim)?;
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (b, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " {} ", if *c < 0.0 { '-' } else { '+' })?;
                write!(f, "{}·{}", c.abs(), b)?;
            } else {
                write!(f, "{}·{}", c, b)?;
            }
        }
        Ok(())
    }
}
