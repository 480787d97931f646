//! 1D Galerkin operators assembled from a [`BasisTable`].

use crate::basis::{Basis1D, BasisTable};
use crate::error::{invalid, Error, Result};
use crate::linalg::DenseMatrix;
use crate::mesh::QuadRule;
use crate::scalar::Real;

/// The three 1D bilinear forms a separable weak form is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    /// `∫ Ñ_a Ñ_b`
    Mass,
    /// `∫ Ñ'_a Ñ'_b`
    Stiff,
    /// `∫ Ñ_a Ñ'_b` (test function in the row, differentiated trial in the column)
    Grad,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 3] = [OperatorKind::Mass, OperatorKind::Stiff, OperatorKind::Grad];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Mass => "MASS",
            OperatorKind::Stiff => "STIFF",
            OperatorKind::Grad => "GRAD",
        }
    }
}

/// Square band matrix with equal lower and upper half-bandwidth.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    half_bandwidth: usize,
    entries: Vec<T>,
    symmetric: bool,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        Self {
            n,
            half_bandwidth,
            entries: vec![T::zero(); n * (2 * half_bandwidth + 1)],
            symmetric: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn width(&self) -> usize {
        2 * self.half_bandwidth + 1
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i.abs_diff(j) <= self.half_bandwidth
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.entries[i * self.width() + j + self.half_bandwidth - i]
        } else {
            T::zero()
        }
    }

    /// Adds `v` to entry `(i, j)`, which must lie inside the band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside the band");
        let w = self.width();
        self.entries[i * w + j + self.half_bandwidth - i] += v;
    }

    /// Column range of row `i` inside the band.
    pub fn row_span(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.half_bandwidth)..(i + self.half_bandwidth + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row_span(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `uᵀ A v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        assert_eq!(u.len(), self.n);
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| u[i] * self.row_span(i).map(|j| self.get(i, j) * v[j]).sum::<T>())
            .sum()
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row_span(i).map(|j| self.get(i, j)).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut s = vec![T::zero(); self.n];
        for i in 0..self.n {
            for j in self.row_span(i) {
                s[j] += self.get(i, j);
            }
        }
        s
    }

    /// Largest `|A - Aᵀ|` entry.
    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in self.row_span(i) {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    fn refresh_symmetry(&mut self) {
        self.symmetric = self.asymmetry() <= T::lit(1e-12) * self.max_abs();
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Homogeneous Dirichlet constraints on one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSet {
    n_full: usize,
    constrained: Vec<usize>,
    free: Vec<usize>,
    reduced_index: Vec<Option<usize>>,
}

impl ConstraintSet {
    pub fn new(n_full: usize, constrained: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut c: Vec<usize> = constrained.into_iter().collect();
        c.sort_unstable();
        c.dedup();
        if let Some(&bad) = c.iter().find(|&&i| i >= n_full) {
            return Err(invalid(format!(
                "constrained node {bad} out of range (dimension has {n_full} nodes)"
            )));
        }
        let mut reduced_index = vec![None; n_full];
        let mut free = Vec::with_capacity(n_full - c.len());
        for i in 0..n_full {
            if c.binary_search(&i).is_err() {
                reduced_index[i] = Some(free.len());
                free.push(i);
            }
        }
        Ok(Self {
            n_full,
            constrained: c,
            free,
            reduced_index,
        })
    }

    pub fn none(n_full: usize) -> Self {
        Self::new(n_full, []).expect("empty constraint set is valid")
    }

    /// Both end nodes constrained.
    pub fn both_ends(n_full: usize) -> Self {
        Self::new(n_full, [0, n_full - 1]).expect("end nodes in range")
    }

    pub fn n_full(&self) -> usize {
        self.n_full
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn reduced_index(&self, full: usize) -> Option<usize> {
        self.reduced_index[full]
    }

    pub fn reduce<T: Copy>(&self, full: &[T]) -> Vec<T> {
        assert_eq!(full.len(), self.n_full);
        self.free.iter().map(|&i| full[i]).collect()
    }

    /// Scatters reduced values into a full-length vector with zeros at constrained nodes.
    pub fn expand<T: Real>(&self, reduced: &[T]) -> Vec<T> {
        assert_eq!(reduced.len(), self.free.len());
        let mut full = vec![T::zero(); self.n_full];
        for (&i, &v) in self.free.iter().zip(reduced) {
            full[i] = v;
        }
        full
    }

    pub fn reduce_matrix<T: Real>(&self, matrix: &BandedMatrix<T>) -> Result<BandedMatrix<T>> {
        assert_eq!(matrix.dim(), self.n_full);
        if self.free.is_empty() {
            return Err(Error::EmptySystem);
        }
        let mut out = BandedMatrix::zeros(self.free.len(), matrix.half_bandwidth());
        for (ri, &i) in self.free.iter().enumerate() {
            for j in matrix.row_span(i) {
                if let Some(rj) = self.reduced_index[j] {
                    out.add(ri, rj, matrix.get(i, j));
                }
            }
        }
        out.symmetric = matrix.symmetric;
        Ok(out)
    }
}

/// Element-loop Gauss assembly of one operator.
pub fn assemble_operator<T: Real>(table: &BasisTable<T>, kind: OperatorKind) -> BandedMatrix<T> {
    let mut a = BandedMatrix::zeros(table.n_nodes(), table.hyper.half_bandwidth());
    for el in &table.elements {
        let na = el.n_active;
        for q in 0..el.weights.len() {
            let w = el.weights[q];
            let v = el.values_at(q);
            let d = el.derivs_at(q);
            let (test, trial) = match kind {
                OperatorKind::Mass => (v, v),
                OperatorKind::Stiff => (d, d),
                OperatorKind::Grad => (v, d),
            };
            for i in 0..na {
                let wi = w * test[i];
                for j in 0..na {
                    a.add(el.first_node + i, el.first_node + j, wi * trial[j]);
                }
            }
        }
    }
    a.refresh_symmetry();
    a
}

/// `F[a] = ∫ Ñ_a f` by the table's quadrature.
pub fn assemble_load<T: Real>(table: &BasisTable<T>, f: impl Fn(T) -> T) -> Vec<T> {
    let mut load = vec![T::zero(); table.n_nodes()];
    for el in &table.elements {
        for q in 0..el.weights.len() {
            let wf = el.weights[q] * f(el.points[q]);
            for (k, &v) in el.values_at(q).iter().enumerate() {
                load[el.first_node + k] += wf * v;
            }
        }
    }
    load
}

/// Like [`assemble_load`], but elements are split at `breakpoints` (jumps or
/// kinks of `f`) and each piece is integrated with its own mapped rule.
pub fn assemble_load_split<T: Real>(
    basis: &Basis1D<T>,
    quad: &QuadRule<T>,
    f: impl Fn(T) -> T,
    breakpoints: &[T],
) -> Vec<T> {
    let mesh = basis.mesh();
    let two = T::lit(2.0);
    let mut load = vec![T::zero(); mesh.n_nodes()];
    for e in 0..mesh.n_elem() {
        let (x0, x1) = (mesh.node(e), mesh.node(e + 1));
        let mut cuts = vec![x0];
        let mut inner: Vec<T> = breakpoints.iter().copied().filter(|&b| b > x0 && b < x1).collect();
        inner.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        cuts.extend(inner);
        cuts.push(x1);
        for piece in cuts.windows(2) {
            let (a, b) = (piece[0], piece[1]);
            let half = (b - a) / two;
            for (&t, &w) in quad.points().iter().zip(quad.weights()) {
                let x = a + (t + T::one()) * half;
                let xi = (two * (x - x0) / (x1 - x0) - T::one()).max(-T::one()).min(T::one());
                let local = basis.eval_in_element(e, xi);
                let wf = w * half * f(x);
                for (k, &v) in local.values.iter().enumerate() {
                    load[local.first + k] += wf * v;
                }
            }
        }
    }
    load
}

/// Removes constrained rows and columns (homogeneous values).
pub fn apply_dirichlet<T: Real>(
    matrix: &BandedMatrix<T>,
    rhs: &[T],
    constraints: &ConstraintSet,
) -> Result<(BandedMatrix<T>, Vec<T>)> {
    if rhs.len() != matrix.dim() || constraints.n_full() != matrix.dim() {
        return Err(invalid("matrix, right-hand side and constraints disagree in size"));
    }
    Ok((constraints.reduce_matrix(matrix)?, constraints.reduce(rhs)))
}
