//! Rank-M separated representation
//! `u(p) ≈ Σ_m Π_i [Ñ_i(p_i) · u_i^(m)]`.

use std::collections::HashSet;
use std::path::Path;

use crate::basis::{eval_basis_at, Basis1D, BasisKind, Hyperparams};
use crate::error::{invalid, Error, Result};
use crate::grid::{ByteReader, GridField};
use crate::mesh::{uniform_mesh, Mesh1D};
use crate::operators::ConstraintSet;
use crate::scalar::{norm2, Real};

/// Largest grid [`SeparatedSolution::evaluate_grid`] materializes by default.
pub const DEFAULT_GRID_CAP: u128 = 100_000_000;

/// One coordinate of a separated problem.
#[derive(Clone, Debug, PartialEq)]
pub struct DimSpec<T> {
    pub label: String,
    pub mesh: Mesh1D<T>,
    pub hyper: Hyperparams<T>,
    pub constraints: ConstraintSet,
}

impl<T: Real> DimSpec<T> {
    pub fn new(
        label: impl Into<String>,
        mesh: Mesh1D<T>,
        hyper: Hyperparams<T>,
        constraints: ConstraintSet,
    ) -> Result<Self> {
        hyper.validate()?;
        if constraints.n_full() != mesh.n_nodes() {
            return Err(invalid("constraint set size differs from the node count"));
        }
        Ok(Self {
            label: label.into(),
            mesh,
            hyper,
            constraints,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    pub fn basis(&self) -> Result<Basis1D<T>> {
        Basis1D::new(self.mesh.clone(), self.hyper)
    }
}

/// Column-major `L × M` matrix of nodal factor vectors, one column per rank.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorMatrix<T> {
    len: usize,
    rank: usize,
    data: Vec<T>,
}

impl<T: Real> FactorMatrix<T> {
    pub fn zeros(len: usize, rank: usize) -> Self {
        Self {
            len,
            rank,
            data: vec![T::zero(); len * rank],
        }
    }

    pub fn from_columns(len: usize, columns: &[Vec<T>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != len) {
            return Err(invalid("factor columns must all have the node count as length"));
        }
        Ok(Self {
            len,
            rank: columns.len(),
            data: columns.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn col(&self, m: usize) -> &[T] {
        &self.data[m * self.len..(m + 1) * self.len]
    }

    pub fn col_mut(&mut self, m: usize) -> &mut [T] {
        &mut self.data[m * self.len..(m + 1) * self.len]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn frobenius(&self) -> T {
        norm2(&self.data)
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &Self) -> T {
        assert_eq!(self.data.len(), other.data.len());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }
}

/// Outcome of [`SeparatedSolution::normalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized<T> {
    pub solution: SeparatedSolution<T>,
    /// Ranks with an all-zero factor in some dimension; they are zeroed out.
    pub degenerate: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedSolution<T> {
    dims: Vec<DimSpec<T>>,
    factors: Vec<FactorMatrix<T>>,
    rank: usize,
}

/// Payload size of a rank-`rank` solution: 8 bytes per stored value.
pub fn storage_bytes_for(rank: usize, node_counts: &[usize]) -> u64 {
    8 * rank as u64 * node_counts.iter().map(|&l| l as u64).sum::<u64>()
}

impl<T: Real> SeparatedSolution<T> {
    pub fn new(dims: Vec<DimSpec<T>>, factors: Vec<FactorMatrix<T>>) -> Result<Self> {
        if dims.is_empty() || dims.len() != factors.len() {
            return Err(invalid("one factor matrix per dimension is required"));
        }
        let mut labels = HashSet::new();
        for d in &dims {
            if !labels.insert(d.label.as_str()) {
                return Err(invalid(format!("duplicate dimension label {:?}", d.label)));
            }
        }
        let rank = factors[0].rank();
        for (d, (spec, f)) in dims.iter().zip(&factors).enumerate() {
            if f.rank() != rank {
                return Err(invalid("all factor matrices must share the same rank"));
            }
            if f.len() != spec.n_nodes() {
                return Err(invalid(format!("factor of dimension {d} has wrong length")));
            }
            for m in 0..rank {
                if spec.constraints.constrained().iter().any(|&i| f.col(m)[i] != T::zero()) {
                    return Err(invalid(format!(
                        "rank {m} of dimension {d} is nonzero at a constrained node"
                    )));
                }
            }
        }
        Ok(Self { dims, factors, rank })
    }

    pub fn zeros(dims: Vec<DimSpec<T>>, rank: usize) -> Result<Self> {
        let factors = dims.iter().map(|d| FactorMatrix::zeros(d.n_nodes(), rank)).collect();
        Self::new(dims, factors)
    }

    pub fn dims(&self) -> &[DimSpec<T>] {
        &self.dims
    }

    pub fn dim_count(&self) -> usize {
        self.dims.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn factors(&self) -> &[FactorMatrix<T>] {
        &self.factors
    }

    pub fn factor(&self, d: usize) -> &FactorMatrix<T> {
        &self.factors[d]
    }

    /// Overwrites rank `m` of dimension `d`; constrained entries are forced to zero.
    pub fn set_column(&mut self, d: usize, m: usize, values: &[T]) {
        let col = self.factors[d].col_mut(m);
        col.copy_from_slice(values);
        for &i in self.dims[d].constraints.constrained() {
            col[i] = T::zero();
        }
    }

    /// Point value of the separated field.
    pub fn evaluate(&self, point: &[T]) -> Result<T> {
        if point.len() != self.dims.len() {
            return Err(invalid("point dimension mismatch"));
        }
        let mut per_rank = vec![T::one(); self.rank];
        for (d, (spec, &x)) in self.dims.iter().zip(point).enumerate() {
            let local = eval_basis_at(&spec.mesh, &spec.hyper, x)?;
            for (m, acc) in per_rank.iter_mut().enumerate() {
                *acc *= local.contract(self.factors[d].col(m)).0;
            }
        }
        Ok(per_rank.into_iter().sum())
    }

    /// Per-dimension sample matrices `V_d[s, m] = Σ_k Ñ_k(x_s) U_d[k, m]`
    /// (row-major, one row per sample).
    pub fn sample_factors(&self, samples: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        if samples.len() != self.dims.len() {
            return Err(invalid("one sample list per dimension is required"));
        }
        self.dims
            .iter()
            .zip(samples)
            .enumerate()
            .map(|(d, (spec, xs))| {
                let basis = spec.basis()?;
                let mut v = Vec::with_capacity(xs.len() * self.rank);
                for &x in xs {
                    let local = basis.eval(x)?;
                    for m in 0..self.rank {
                        v.push(local.contract(self.factors[d].col(m)).0);
                    }
                }
                Ok(v)
            })
            .collect()
    }

    pub fn evaluate_grid(&self, samples: &[Vec<T>]) -> Result<GridField<T>> {
        self.evaluate_grid_capped(samples, DEFAULT_GRID_CAP)
    }

    /// Dense tensor of point values on the product grid, as a sum over
    /// ranks of outer products of the sampled factors.
    pub fn evaluate_grid_capped(&self, samples: &[Vec<T>], cap: u128) -> Result<GridField<T>> {
        let entries: u128 = samples.iter().map(|s| s.len() as u128).product();
        if entries > cap {
            return Err(Error::TooLargeGrid { entries, cap });
        }
        let sampled = self.sample_factors(samples)?;
        let size = entries as usize;
        let mut values = vec![T::zero(); size];
        let mut outer = Vec::with_capacity(size);
        let mut next = Vec::with_capacity(size);
        for m in 0..self.rank {
            outer.clear();
            outer.push(T::one());
            for (d, xs) in samples.iter().enumerate() {
                next.clear();
                for &o in &outer {
                    for s in 0..xs.len() {
                        next.push(o * sampled[d][s * self.rank + m]);
                    }
                }
                std::mem::swap(&mut outer, &mut next);
            }
            for (v, &o) in values.iter_mut().zip(&outer) {
                *v += o;
            }
        }
        let labels: Vec<&str> = self.dims.iter().map(|d| d.label.as_str()).collect();
        Ok(GridField::new("separated", samples.to_vec(), values)?.with_axis_labels(&labels))
    }

    /// Factor payload in bytes (`M · Σ L_i · 8`).
    pub fn storage_bytes(&self) -> u64 {
        let lens: Vec<usize> = self.dims.iter().map(DimSpec::n_nodes).collect();
        storage_bytes_for(self.rank, &lens)
    }

    pub fn normalize(&self) -> Normalized<T> {
        let mut solution = self.clone();
        let degenerate = solution.normalize_in_place();
        Normalized { solution, degenerate }
    }

    /// Scales every factor but the last to unit norm and moves the scale into
    /// the last dimension. Ranks with a zero factor are zeroed in every
    /// dimension and flagged.
    pub fn normalize_in_place(&mut self) -> Vec<bool> {
        (0..self.rank).map(|m| !self.normalize_rank(m)).collect()
    }

    /// Normalizes rank `m`; returns `false` (after zeroing the rank) when
    /// one of its factors vanishes.
    pub fn normalize_rank(&mut self, m: usize) -> bool {
        let last = self.dims.len() - 1;
        let mut norms = Vec::with_capacity(last + 1);
        for f in &self.factors {
            let n = norm2(f.col(m));
            if n == T::zero() || !n.is_finite() {
                for f in &mut self.factors {
                    f.col_mut(m).iter_mut().for_each(|v| *v = T::zero());
                }
                return false;
            }
            norms.push(n);
        }
        let mut scale = T::one();
        for d in 0..last {
            scale *= norms[d];
            let n = norms[d];
            self.factors[d].col_mut(m).iter_mut().for_each(|v| *v /= n);
        }
        self.factors[last].col_mut(m).iter_mut().for_each(|v| *v *= scale);
        true
    }

    /// Ranks whose factors are all nonzero.
    pub fn live_ranks(&self) -> Vec<usize> {
        (0..self.rank)
            .filter(|&m| self.factors.iter().all(|f| f.col(m).iter().any(|&v| v != T::zero())))
            .collect()
    }

    /// Serializes into the CHTD1 container.
    ///
    /// Layout (little-endian): a 32-byte header with magic `b"CHTD"`, `u32`
    /// version 1, `u32` dimension count, `u32` rank and 16 reserved zero
    /// bytes; then per dimension `u32` label length and label bytes, `f64`
    /// x_min and x_max, `u32` element count, `u32` s, `f64` a, `u32` p,
    /// `u32` basis kind, `u32` constraint count and the constrained `u32`
    /// node ids; then per dimension the column-major `L × M` block of `f64`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CHTD_MAGIC);
        for v in [CHTD_VERSION, self.dims.len() as u32, self.rank as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&[0u8; 16]);
        for d in &self.dims {
            out.extend_from_slice(&(d.label.len() as u32).to_le_bytes());
            out.extend_from_slice(d.label.as_bytes());
            out.extend_from_slice(&d.mesh.x_min().as_f64().to_le_bytes());
            out.extend_from_slice(&d.mesh.x_max().as_f64().to_le_bytes());
            out.extend_from_slice(&(d.mesh.n_elem() as u32).to_le_bytes());
            out.extend_from_slice(&(d.hyper.s as u32).to_le_bytes());
            out.extend_from_slice(&d.hyper.a.as_f64().to_le_bytes());
            out.extend_from_slice(&(d.hyper.p as u32).to_le_bytes());
            out.extend_from_slice(&d.hyper.kind.code().to_le_bytes());
            let c = d.constraints.constrained();
            out.extend_from_slice(&(c.len() as u32).to_le_bytes());
            for &i in c {
                out.extend_from_slice(&(i as u32).to_le_bytes());
            }
        }
        for f in &self.factors {
            for v in f.as_slice() {
                out.extend_from_slice(&v.as_f64().to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = ByteReader::new(bytes);
        if r.take(4)? != CHTD_MAGIC {
            return Err(r.corrupt_at(0, "bad magic"));
        }
        let version = r.u32()?;
        if version != CHTD_VERSION {
            return Err(r.corrupt_at(4, format!("unsupported version {version}")));
        }
        let n_dims = r.u32()? as usize;
        let rank = r.u32()? as usize;
        if r.take(16)?.iter().any(|&b| b != 0) {
            return Err(r.corrupt_at(16, "reserved header bytes are not zero"));
        }
        if n_dims == 0 {
            return Err(r.corrupt_at(8, "zero dimensions"));
        }
        let mut dims = Vec::with_capacity(n_dims);
        for _ in 0..n_dims {
            let at = r.pos();
            let len = r.u32()? as usize;
            let label = std::str::from_utf8(r.take(len)?)
                .map_err(|_| r.corrupt_at(at + 4, "label is not UTF-8"))?
                .to_string();
            let at = r.pos();
            let x_min = r.f64()?;
            let x_max = r.f64()?;
            let n_elem = r.u32()? as usize;
            let s = r.u32()? as usize;
            let a = r.f64()?;
            let p = r.u32()? as usize;
            let kind_at = r.pos();
            let kind = BasisKind::from_code(r.u32()?).ok_or_else(|| r.corrupt_at(kind_at, "unknown basis kind"))?;
            let count = r.u32()? as usize;
            let mut constrained = Vec::with_capacity(count.min(1 << 16));
            for _ in 0..count {
                constrained.push(r.u32()? as usize);
            }
            let describe = |e: Error| r.corrupt_at(at, format!("invalid dimension descriptor: {e}"));
            let mesh = uniform_mesh(T::lit(x_min), T::lit(x_max), n_elem).map_err(describe)?;
            let hyper = Hyperparams {
                kind,
                s,
                a: T::lit(a),
                p,
            };
            let constraints = ConstraintSet::new(mesh.n_nodes(), constrained).map_err(describe)?;
            dims.push(DimSpec::new(label, mesh, hyper, constraints).map_err(describe)?);
        }
        let mut factors = Vec::with_capacity(n_dims);
        for d in &dims {
            let len = d.n_nodes();
            let data = (0..len * rank)
                .map(|_| r.f64().map(T::lit))
                .collect::<Result<Vec<T>>>()?;
            factors.push(FactorMatrix { len, rank, data });
        }
        r.finish()?;
        let at = r.pos();
        Self::new(dims, factors).map_err(|e| r.corrupt_at(at, e.to_string()))
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

const CHTD_MAGIC: &[u8; 4] = b"CHTD";
const CHTD_VERSION: u32 = 1;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dim(label: &str, a: f64, b: f64, n: usize, hyper: Hyperparams<f64>, constrained: bool) -> DimSpec<f64> {
        let mesh = uniform_mesh(a, b, n).unwrap();
        let c = if constrained {
            ConstraintSet::both_ends(n + 1)
        } else {
            ConstraintSet::none(n + 1)
        };
        DimSpec::new(label, mesh, hyper, c).unwrap()
    }

    fn random_solution(rank: usize, seed: u64) -> SeparatedSolution<f64> {
        let chid = Hyperparams::chidenn(2, 2.0, 2).unwrap();
        let dims = vec![
            dim("x", 0.0, 1.0, 5, Hyperparams::fe_linear(), true),
            dim("y", -1.0, 2.0, 7, chid, false),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sol = SeparatedSolution::zeros(dims, rank).unwrap();
        for d in 0..2 {
            let len = sol.dims()[d].n_nodes();
            for m in 0..rank {
                let v: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
                sol.set_column(d, m, &v);
            }
        }
        sol
    }

    #[test]
    fn ones_give_partition_of_unity() {
        let chid = Hyperparams::chidenn(2, 2.0, 2).unwrap();
        let dims = vec![
            dim("x", 0.0, 1.0, 4, chid, false),
            dim("y", 0.0, 3.0, 6, Hyperparams::fe_linear(), false),
        ];
        let factors = dims
            .iter()
            .map(|d| FactorMatrix::from_columns(d.n_nodes(), &[vec![1.0; d.n_nodes()]]).unwrap())
            .collect();
        let sol = SeparatedSolution::new(dims, factors).unwrap();
        for p in [[0.0, 0.0], [0.33, 2.9], [1.0, 1.7]] {
            assert!((sol.evaluate(&p).unwrap() - 1.0).abs() < 1e-10);
        }
        let g = sol.evaluate_grid(&[vec![0.1, 0.5], vec![0.0, 1.0, 3.0]]).unwrap();
        assert!(g.values.iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn evaluate_matches_brute_force_sum() {
        let sol = random_solution(3, 11);
        let p = [0.37, 0.81];
        // explicit double loop over ranks and nodes
        let mut want = 0.0;
        for m in 0..3 {
            let mut prod = 1.0;
            for d in 0..2 {
                let spec = &sol.dims()[d];
                let local = eval_basis_at(&spec.mesh, &spec.hyper, p[d]).unwrap();
                let mut s = 0.0;
                for k in 0..spec.n_nodes() {
                    s += local.value_of(k) * sol.factor(d).col(m)[k];
                }
                prod *= s;
            }
            want += prod;
        }
        assert!((sol.evaluate(&p).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn scale_indeterminacy() {
        let sol = random_solution(2, 5);
        let mut scaled = sol.clone();
        let x: Vec<f64> = sol.factor(0).col(1).iter().map(|v| v * 3.5).collect();
        let y: Vec<f64> = sol.factor(1).col(1).iter().map(|v| v / 3.5).collect();
        scaled.set_column(0, 1, &x);
        scaled.set_column(1, 1, &y);
        for p in [[0.2, 0.1], [0.9, 1.9]] {
            let (a, b) = (sol.evaluate(&p).unwrap(), scaled.evaluate(&p).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn grid_matches_pointwise() {
        let sol = random_solution(2, 9);
        let xs = vec![0.0, 0.45, 1.0];
        let ys = vec![-1.0, 0.3, 2.0];
        let g = sol.evaluate_grid(&[xs.clone(), ys.clone()]).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                assert!((g.get(&[i, j]) - sol.evaluate(&[x, y]).unwrap()).abs() < 1e-12);
            }
        }
        let big = vec![vec![0.5; 1000], vec![0.5; 1000], vec![0.5; 1000]];
        let sol3 = SeparatedSolution::zeros(
            vec![
                dim("a", 0.0, 1.0, 2, Hyperparams::fe_linear(), false),
                dim("b", 0.0, 1.0, 2, Hyperparams::fe_linear(), false),
                dim("c", 0.0, 1.0, 2, Hyperparams::fe_linear(), false),
            ],
            1,
        )
        .unwrap();
        assert!(matches!(sol3.evaluate_grid(&big), Err(Error::TooLargeGrid { .. })));
        assert!(matches!(sol.evaluate(&[2.0, 0.0]), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn storage_accounting() {
        assert_eq!(storage_bytes_for(10, &[51_200; 4]), 16_384_000);
        assert_eq!(storage_bytes_for(0, &[51_200; 4]), 0);
        assert_eq!(storage_bytes_for(3, &[11, 21]), 768);
        let sol = random_solution(3, 1);
        assert_eq!(sol.storage_bytes(), 3 * (6 + 8) * 8);
    }

    #[test]
    fn normalization() {
        let dims = vec![
            dim("x", 0.0, 1.0, 1, Hyperparams::fe_linear(), false),
            dim("y", 0.0, 1.0, 1, Hyperparams::fe_linear(), false),
        ];
        let f = vec![
            FactorMatrix::from_columns(2, &[vec![2.0, 0.0]]).unwrap(),
            FactorMatrix::from_columns(2, &[vec![0.0, 3.0]]).unwrap(),
        ];
        let n = SeparatedSolution::new(dims, f).unwrap().normalize();
        assert_eq!(n.solution.factor(0).col(0), &[1.0, 0.0]);
        assert_eq!(n.solution.factor(1).col(0), &[0.0, 6.0]);
        assert_eq!(n.degenerate, vec![false]);
        let again = n.solution.normalize();
        assert_eq!(again.solution, n.solution);

        let sol = random_solution(3, 21);
        let norm = sol.normalize().solution;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let p = [rng.random_range(0.0..1.0), rng.random_range(-1.0..2.0)];
            let (a, b) = (sol.evaluate(&p).unwrap(), norm.evaluate(&p).unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12));
        }
    }

    #[test]
    fn zero_rank_is_flagged() {
        let mut sol = random_solution(2, 3);
        let len = sol.dims()[0].n_nodes();
        sol.set_column(0, 1, &vec![0.0; len]);
        let n = sol.normalize();
        assert_eq!(n.degenerate, vec![false, true]);
        assert!(n.solution.factor(1).col(1).iter().all(|&v| v == 0.0));
        assert_eq!(n.solution.live_ranks(), vec![0]);
    }

    #[test]
    fn chtd_round_trip_and_size() {
        let sol = random_solution(3, 77);
        let bytes = sol.to_bytes();
        let back = SeparatedSolution::<f64>::from_bytes(&bytes).unwrap();
        assert_eq!(back, sol);
        for d in 0..2 {
            let a: Vec<u64> = sol.factor(d).as_slice().iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.factor(d).as_slice().iter().map(|v| v.to_bits()).collect();
            assert_eq!(a, b);
        }
        // label "x": 4 + 1 + 2·8 + 2·4 + 8 + 3·4 + 2 constraints·4
        // label "y": same without constraints
        let desc_x = 4 + 1 + 16 + 8 + 8 + 12 + 8;
        let desc_y = 4 + 1 + 16 + 8 + 8 + 12;
        assert_eq!(bytes.len() as u64, 32 + desc_x + desc_y + sol.storage_bytes());
    }

    #[test]
    fn chtd_rejects_corruption() {
        let bytes = random_solution(2, 8).to_bytes();
        for cut in [0, 3, 20, 40, bytes.len() - 1] {
            assert!(matches!(
                SeparatedSolution::<f64>::from_bytes(&bytes[..cut]),
                Err(Error::CorruptFile { .. })
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            SeparatedSolution::<f64>::from_bytes(&bad),
            Err(Error::CorruptFile { offset: 0, .. })
        ));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(
            SeparatedSolution::<f64>::from_bytes(&bad),
            Err(Error::CorruptFile { offset: 4, .. })
        ));
        let mut long = bytes;
        long.push(0);
        assert!(SeparatedSolution::<f64>::from_bytes(&long).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.chtd");
        let sol = random_solution(2, 12);
        sol.export(&path).unwrap();
        assert_eq!(SeparatedSolution::<f64>::import(&path).unwrap(), sol);
    }
}
