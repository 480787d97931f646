//! Alternating fixed point on the per-dimension block systems `A_d U_d = Q_d`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::basis::{build_basis_table, Basis1D, BasisTable};
use crate::error::{invalid, Error, Result};
use crate::linalg::{DenseMatrix, LuFactor};
use crate::mesh::{gauss_rule, QuadRule};
use crate::operators::{assemble_load_split, assemble_operator, BandedMatrix, ConstraintSet, OperatorKind};
use crate::problem::WeakProblem;
use crate::scalar::{dot, norm2, Real};
use crate::separated::SeparatedSolution;

/// Floor of the denominator in the relative factor change.
pub const CHANGE_EPS: f64 = 1e-30;

/// Load vectors are integrated with the operator rule repeated on this many
/// sub-intervals per element.
const LOAD_SUBDIVISIONS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveMode {
    #[default]
    FullAls,
    Greedy,
}

impl SolveMode {
    pub fn name(self) -> &'static str {
        match self {
            SolveMode::FullAls => "FULL_ALS",
            SolveMode::Greedy => "GREEDY",
        }
    }
}

impl std::str::FromStr for SolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "FULL_ALS" | "FULL" | "ALS" => Ok(SolveMode::FullAls),
            "GREEDY" => Ok(SolveMode::Greedy),
            _ => Err(invalid(format!("unknown solve mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub rank: usize,
    pub mode: SolveMode,
    /// Relative factor-change tolerance.
    pub tol: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    /// Gauss points per element; `None` uses the basis default.
    pub quad_points: Option<usize>,
    /// Full sweeps over all ranks after greedy enrichment.
    pub greedy_full_sweeps: usize,
    /// Relative diagonal shift added before each block factorization.
    pub ridge: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rank: 1,
            mode: SolveMode::FullAls,
            tol: 1e-6,
            max_sweeps: 100,
            seed: 0,
            quad_points: None,
            greedy_full_sweeps: 0,
            ridge: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn with_rank(rank: usize) -> Self {
        Self {
            rank,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(invalid("rank must be at least 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(invalid("tol must be positive"));
        }
        if self.max_sweeps == 0 {
            return Err(invalid("max_sweeps must be at least 1"));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(invalid("ridge must be non-negative"));
        }
        if let Some(q) = self.quad_points {
            gauss_rule::<f64>(q)?;
        }
        Ok(())
    }
}

/// Which ranks a sweep updated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepPhase {
    AllRanks,
    Rank(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub phase: SweepPhase,
    /// Max relative factor change across dimensions.
    pub change: f64,
    /// `‖A_d U_d - Q_d‖ / ‖Q_d‖` per dimension (0 when no rank was active).
    pub residuals: Vec<f64>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SolveTrace {
    pub sweeps: Vec<SweepRecord>,
    pub converged: bool,
    /// Ranks that collapsed to zero and were dropped from the iteration.
    pub retired: Vec<usize>,
}

impl SolveTrace {
    pub fn final_change(&self) -> Option<f64> {
        self.sweeps.last().map(|s| s.change)
    }

    /// Equality ignoring wall times.
    pub fn same_iterates(&self, other: &Self) -> bool {
        self.converged == other.converged
            && self.retired == other.retired
            && self.sweeps.len() == other.sweeps.len()
            && self.sweeps.iter().zip(&other.sweeps).all(|(a, b)| {
                a.phase == b.phase
                    && a.change.to_bits() == b.change.to_bits()
                    && a.residuals.len() == b.residuals.len()
                    && a.residuals
                        .iter()
                        .zip(&b.residuals)
                        .all(|(x, y)| x.to_bits() == y.to_bits())
            })
    }
}

/// Dirichlet-reduced operators and loads of one dimension.
#[derive(Clone, Debug)]
pub struct DimBundle<T> {
    pub constraints: ConstraintSet,
    pub mass: BandedMatrix<T>,
    pub stiff: BandedMatrix<T>,
    pub grad: Option<BandedMatrix<T>>,
    /// One reduced load vector per source term.
    pub loads: Vec<Vec<T>>,
    pub table: BasisTable<T>,
}

impl<T: Real> DimBundle<T> {
    pub fn op(&self, kind: OperatorKind) -> &BandedMatrix<T> {
        match kind {
            OperatorKind::Mass => &self.mass,
            OperatorKind::Stiff => &self.stiff,
            OperatorKind::Grad => self.grad.as_ref().expect("gradient operator assembled when referenced"),
        }
    }

    pub fn n_free(&self) -> usize {
        self.constraints.n_free()
    }
}

/// Assembles every dimension's operators and source loads. `quad` overrides
/// the per-dimension default Gauss rule.
pub fn precompute_dim_operators<T: Real>(
    problem: &WeakProblem<T>,
    quad: Option<&QuadRule<T>>,
) -> Result<Vec<DimBundle<T>>> {
    let mut bundles = Vec::with_capacity(problem.dim_count());
    for (d, spec) in problem.dims.iter().enumerate() {
        let rule = match quad {
            Some(q) => q.clone(),
            None => gauss_rule(spec.hyper.default_quad_points())?,
        };
        let table = build_basis_table(&spec.mesh, &spec.hyper, &rule)?;
        let c = &spec.constraints;
        let mass = c.reduce_matrix(&assemble_operator(&table, OperatorKind::Mass))?;
        let stiff = c.reduce_matrix(&assemble_operator(&table, OperatorKind::Stiff))?;
        let grad = if problem.uses(d, OperatorKind::Grad) {
            Some(c.reduce_matrix(&assemble_operator(&table, OperatorKind::Grad))?)
        } else {
            None
        };
        let basis = Basis1D::new(spec.mesh.clone(), spec.hyper)?;
        let load_rule = rule.composite(LOAD_SUBDIVISIONS);
        let loads = problem
            .source
            .terms
            .iter()
            .map(|term| {
                let f = term.factors[d];
                c.reduce(&assemble_load_split(
                    &basis,
                    &load_rule,
                    |x| f.eval(x),
                    &f.breakpoints(),
                ))
            })
            .collect();
        bundles.push(DimBundle {
            constraints: c.clone(),
            mass,
            stiff,
            grad,
            loads,
            table,
        });
    }
    Ok(bundles)
}

/// Dense block system for one dimension, rank-major blocks of the reduced
/// node count.
#[derive(Clone, Debug)]
pub struct BlockSystem<T> {
    pub matrix: DenseMatrix<T>,
    pub rhs: Vec<T>,
    pub ranks: Vec<usize>,
    pub block_len: usize,
}

impl<T: Real> BlockSystem<T> {
    pub fn block(&self, a: usize, b: usize) -> DenseMatrix<T> {
        let l = self.block_len;
        DenseMatrix::from_fn(l, l, |i, j| self.matrix[(a * l + i, b * l + j)])
    }

    pub fn residual(&self, u: &[T]) -> T {
        let au = self.matrix.matvec(u);
        let r: Vec<T> = au.iter().zip(&self.rhs).map(|(&a, &q)| a - q).collect();
        let q = norm2(&self.rhs);
        if q > T::zero() {
            norm2(&r) / q
        } else {
            norm2(&r)
        }
    }
}

/// `u_i^(m)ᵀ Op u_i^(n)` for every rank pair.
struct Gram<T> {
    rank: usize,
    values: Vec<T>,
}

impl<T: Real> Gram<T> {
    fn new(op: &BandedMatrix<T>, cols: &[Vec<T>]) -> Self {
        let rank = cols.len();
        let applied: Vec<Vec<T>> = cols.iter().map(|u| op.matvec(u)).collect();
        let mut values = vec![T::zero(); rank * rank];
        for m in 0..rank {
            for n in 0..rank {
                values[m * rank + n] = dot(&cols[m], &applied[n]);
            }
        }
        Self { rank, values }
    }

    fn get(&self, m: usize, n: usize) -> T {
        self.values[m * self.rank + n]
    }
}

fn reduced_columns<T: Real>(state: &SeparatedSolution<T>, bundles: &[DimBundle<T>], d: usize) -> Vec<Vec<T>> {
    let f = state.factor(d);
    (0..state.rank())
        .map(|m| bundles[d].constraints.reduce(f.col(m)))
        .collect()
}

/// Block system for dimension `d` over all ranks.
pub fn build_block_system<T: Real>(
    problem: &WeakProblem<T>,
    bundles: &[DimBundle<T>],
    state: &SeparatedSolution<T>,
    d: usize,
) -> Result<BlockSystem<T>> {
    let all: Vec<usize> = (0..state.rank()).collect();
    build_block_system_for(problem, bundles, state, d, &all, &[])
}

/// Block system for dimension `d` with unknowns for the `active` ranks; the
/// `frozen` ranks' current contributions move to the right-hand side.
pub fn build_block_system_for<T: Real>(
    problem: &WeakProblem<T>,
    bundles: &[DimBundle<T>],
    state: &SeparatedSolution<T>,
    d: usize,
    active: &[usize],
    frozen: &[usize],
) -> Result<BlockSystem<T>> {
    let n_dims = problem.dim_count();
    if bundles.len() != n_dims || state.dim_count() != n_dims || d >= n_dims {
        return Err(invalid("problem, bundles and state disagree in dimension count"));
    }
    let cols: Vec<Vec<Vec<T>>> = (0..n_dims).map(|i| reduced_columns(state, bundles, i)).collect();
    for &m in active.iter().chain(frozen) {
        for (i, c) in cols.iter().enumerate() {
            if i != d && c[m].iter().all(|&v| v == T::zero()) {
                return Err(Error::SingularBlock {
                    dim: d,
                    rank: m,
                    zero_dim: i,
                });
            }
        }
    }
    // per-dimension Gram matrices for each operator kind in use
    let grams: Vec<Vec<Option<Gram<T>>>> = (0..n_dims)
        .map(|i| {
            OperatorKind::ALL
                .iter()
                .map(|&k| (i != d && problem.uses(i, k)).then(|| Gram::new(bundles[i].op(k), &cols[i])))
                .collect()
        })
        .collect();
    let kind_index = |k: OperatorKind| OperatorKind::ALL.iter().position(|&x| x == k).expect("listed kind");
    let coupling = |term: usize, m: usize, n: usize| -> T {
        let t = &problem.terms[term];
        let mut c = t.coeff;
        for (i, &k) in t.ops.iter().enumerate() {
            if i != d {
                c *= grams[i][kind_index(k)].as_ref().expect("gram computed").get(m, n);
            }
        }
        c
    };

    let l = bundles[d].n_free();
    let size = active.len() * l;
    let mut matrix = DenseMatrix::zeros(size, size);
    let mut rhs = vec![T::zero(); size];
    for (a, &m) in active.iter().enumerate() {
        for (t, term) in problem.terms.iter().enumerate() {
            let op = bundles[d].op(term.ops[d]);
            for (b, &n) in active.iter().enumerate() {
                let c = coupling(t, m, n);
                if c == T::zero() {
                    continue;
                }
                for r in 0..l {
                    for s in op.row_span(r) {
                        matrix[(a * l + r, b * l + s)] += c * op.get(r, s);
                    }
                }
            }
            for &n in frozen {
                let c = coupling(t, m, n);
                let applied = op.matvec(&cols[d][n]);
                for r in 0..l {
                    rhs[a * l + r] -= c * applied[r];
                }
            }
        }
        for (s, term) in problem.source.terms.iter().enumerate() {
            let mut c = term.coeff;
            for i in (0..n_dims).filter(|&i| i != d) {
                c *= dot(&cols[i][m], &bundles[i].loads[s]);
            }
            for (r, &f) in bundles[d].loads[s].iter().enumerate() {
                rhs[a * l + r] += c * f;
            }
        }
    }
    Ok(BlockSystem {
        matrix,
        rhs,
        ranks: active.to_vec(),
        block_len: l,
    })
}

/// Refinement steps against the unshifted matrix after the shifted solve.
const REFINEMENT_STEPS: usize = 2;

/// Solves `(A + ridge·max|diag A|·I) U = Q`, then refines against the
/// unshifted `A` while the residual drops. Returns the solution and its
/// unshifted relative residual.
pub fn solve_block_system<T: Real>(sys: &BlockSystem<T>, ridge: f64, dim: usize) -> Result<(Vec<T>, T)> {
    let n = sys.rhs.len();
    let mut shifted = sys.matrix.clone();
    let diag = (0..n).map(|i| sys.matrix[(i, i)].abs()).fold(T::zero(), T::max);
    let shift = T::lit(ridge) * diag;
    for i in 0..n {
        shifted[(i, i)] += shift;
    }
    let lu = LuFactor::new(shifted).map_err(|e| Error::BlockSolve {
        dim,
        source: Box::new(e),
    })?;
    let mut u = lu.solve(&sys.rhs);
    let mut res = sys.residual(&u);
    if shift == T::zero() {
        return Ok((u, res));
    }
    for _ in 0..REFINEMENT_STEPS {
        let au = sys.matrix.matvec(&u);
        let r: Vec<T> = sys.rhs.iter().zip(&au).map(|(&q, &a)| q - a).collect();
        let du = lu.solve(&r);
        let refined: Vec<T> = u.iter().zip(&du).map(|(&a, &b)| a + b).collect();
        let res_refined = sys.residual(&refined);
        if !(res_refined < res) {
            break;
        }
        u = refined;
        res = res_refined;
    }
    Ok((u, res))
}

/// Result of one pass over all dimensions.
#[derive(Clone, Debug)]
pub struct SweepResult<T> {
    pub state: SeparatedSolution<T>,
    pub change: f64,
    pub residuals: Vec<f64>,
    /// Ranks that collapsed to zero during the sweep.
    pub retired: Vec<usize>,
}

/// One sweep over every live rank of `state`.
pub fn als_sweep<T: Real>(
    problem: &WeakProblem<T>,
    bundles: &[DimBundle<T>],
    state: &SeparatedSolution<T>,
    ridge: f64,
) -> Result<SweepResult<T>> {
    let active = state.live_ranks();
    sweep_ranks(problem, bundles, state.clone(), active, &[], ridge)
}

fn sweep_ranks<T: Real>(
    problem: &WeakProblem<T>,
    bundles: &[DimBundle<T>],
    mut state: SeparatedSolution<T>,
    mut active: Vec<usize>,
    frozen: &[usize],
    ridge: f64,
) -> Result<SweepResult<T>> {
    let start = state.clone();
    let mut residuals = vec![0.0; problem.dim_count()];
    let mut retired = Vec::new();
    for d in 0..problem.dim_count() {
        if active.is_empty() {
            break;
        }
        let sys = build_block_system_for(problem, bundles, &state, d, &active, frozen)?;
        let (u, res) = solve_block_system(&sys, ridge, d)?;
        residuals[d] = res.as_f64();
        let l = sys.block_len;
        for (a, &m) in active.iter().enumerate() {
            let full = bundles[d].constraints.expand(&u[a * l..(a + 1) * l]);
            state.set_column(d, m, &full);
        }
        active.retain(|&m| {
            let alive = state.normalize_rank(m);
            if !alive {
                retired.push(m);
            }
            alive
        });
    }
    let change = (0..problem.dim_count())
        .map(|d| {
            let end = state.factor(d);
            let diff = end.distance(start.factor(d)).as_f64();
            diff / end.frobenius().as_f64().max(CHANGE_EPS)
        })
        .fold(0.0, f64::max);
    Ok(SweepResult {
        state,
        change,
        residuals,
        retired,
    })
}

/// Seeded standard-normal factors, zero at constrained nodes, normalized.
pub fn initial_state<T: Real>(problem: &WeakProblem<T>, rank: usize, seed: u64) -> Result<SeparatedSolution<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SeparatedSolution::zeros(problem.dims.clone(), rank)?;
    for d in 0..problem.dim_count() {
        let len = problem.dims[d].n_nodes();
        for m in 0..rank {
            let col: Vec<T> = (0..len).map(|_| T::lit(StandardNormal.sample(&mut rng))).collect();
            state.set_column(d, m, &col);
        }
    }
    state.normalize_in_place();
    Ok(state)
}

/// Runs the alternating fixed point to tolerance.
pub fn solve<T: Real>(problem: &WeakProblem<T>, config: &SolverConfig) -> Result<(SeparatedSolution<T>, SolveTrace)> {
    config.validate()?;
    let quad = config.quad_points.map(gauss_rule::<T>).transpose()?;
    let bundles = precompute_dim_operators(problem, quad.as_ref())?;
    solve_with_bundles(problem, &bundles, config)
}

pub fn solve_with_bundles<T: Real>(
    problem: &WeakProblem<T>,
    bundles: &[DimBundle<T>],
    config: &SolverConfig,
) -> Result<(SeparatedSolution<T>, SolveTrace)> {
    config.validate()?;
    let state = initial_state(problem, config.rank, config.seed)?;
    let mut trace = SolveTrace::default();
    let state = match config.mode {
        SolveMode::FullAls => {
            let (state, converged) = iterate(problem, bundles, state, None, config.max_sweeps, config, &mut trace)?;
            trace.converged = converged;
            state
        }
        SolveMode::Greedy => {
            let mut state = state;
            let mut converged = true;
            for m in 0..config.rank {
                let (next, ok) = iterate(problem, bundles, state, Some(m), config.max_sweeps, config, &mut trace)?;
                state = next;
                converged &= ok;
            }
            if config.greedy_full_sweeps > 0 {
                let (next, ok) = iterate(
                    problem,
                    bundles,
                    state,
                    None,
                    config.greedy_full_sweeps,
                    config,
                    &mut trace,
                )?;
                state = next;
                converged = ok;
            }
            trace.converged = converged;
            state
        }
    };
    Ok((state, trace))
}

/// Sweeps until the change drops below tolerance; `only` restricts the
/// update to one rank with the lower ranks frozen.
fn iterate<T: Real>(
    problem: &WeakProblem<T>,
    bundles: &[DimBundle<T>],
    mut state: SeparatedSolution<T>,
    only: Option<usize>,
    max_sweeps: usize,
    config: &SolverConfig,
    trace: &mut SolveTrace,
) -> Result<(SeparatedSolution<T>, bool)> {
    for _ in 0..max_sweeps {
        let live = state.live_ranks();
        let (active, frozen, phase) = match only {
            None => (live, Vec::new(), SweepPhase::AllRanks),
            Some(m) => (
                live.iter().copied().filter(|&r| r == m).collect(),
                live.iter().copied().filter(|&r| r < m).collect(),
                SweepPhase::Rank(m),
            ),
        };
        if active.is_empty() {
            return Ok((state, true));
        }
        let clock = Instant::now();
        let sweep = sweep_ranks(problem, bundles, state, active, &frozen, config.ridge)?;
        let record = SweepRecord {
            phase,
            change: sweep.change,
            residuals: sweep.residuals,
            wall_seconds: clock.elapsed().as_secs_f64(),
        };
        log::debug!(
            "{:?} sweep {}: change {:e}",
            phase,
            trace.sweeps.len() + 1,
            record.change
        );
        trace.sweeps.push(record);
        trace.retired.extend(&sweep.retired);
        state = sweep.state;
        let remaining = match only {
            None => state.live_ranks().len(),
            Some(m) => state.live_ranks().contains(&m) as usize,
        };
        if sweep.change < config.tol || remaining == 0 {
            return Ok((state, true));
        }
    }
    Ok((state, false))
}
