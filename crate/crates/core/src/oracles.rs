//! Full-grid baselines and error metrics.

use crate::basis::Hyperparams;
use crate::error::{invalid, Error, Result};
use crate::grid::GridField;
use crate::linalg::BandLu;
use crate::mesh::{gauss_rule, QuadRule};
use crate::problem::{DiffusionConstants, SeparableSource, SourceFactor, WeakProblem};
use crate::scalar::{dot, norm2, Real};
use crate::separated::SeparatedSolution;
use crate::solver::precompute_dim_operators;

/// Largest system [`dense_galerkin_2d`] assembles.
pub const DENSE_DOF_CAP: usize = 10_000;

/// Stable explicit step of the 7-point heat stencil, `dx² ρ c_p / (6k)`.
pub fn critical_dt(dx: f64, rho: f64, c_p: f64, k: f64) -> Result<f64> {
    if [dx, rho, c_p, k].iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(invalid("critical_dt needs positive finite inputs"));
    }
    Ok(dx * dx * rho * c_p / (6.0 * k))
}

/// How the FDM source is sampled at grid nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SourceSampling {
    /// `b(x_i)`. Loses features thinner than the grid spacing.
    Nodal,
    /// `(1/dx) ∫ hat_i(x) b(x) dx` per axis, the lumped linear-element load.
    #[default]
    HatAverage,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FdmConfig {
    /// Grid points per axis, boundary included.
    pub points: usize,
    pub constants: DiffusionConstants,
    /// Fraction of the critical step used when `dt` is unset.
    pub safety: f64,
    pub dt: Option<f64>,
    pub t_end: f64,
    /// Keep a snapshot every this many steps.
    pub snapshot_stride: Option<usize>,
    pub sampling: SourceSampling,
    /// Refuse runs whose estimated field storage exceeds this many bytes.
    pub memory_guard: u64,
}

impl FdmConfig {
    pub fn new(points: usize) -> Self {
        let constants = DiffusionConstants::default();
        Self {
            points,
            t_end: constants.t_end,
            constants,
            safety: 0.9,
            dt: None,
            snapshot_stride: None,
            sampling: SourceSampling::default(),
            memory_guard: 512 << 20,
        }
    }

    pub fn dx(&self) -> f64 {
        self.constants.side / (self.points - 1) as f64
    }

    pub fn critical_dt(&self) -> Result<f64> {
        let c = &self.constants;
        critical_dt(self.dx(), c.rho, c.c_p, c.k)
    }

    /// `(steps, dt)` covering `t_end` exactly with `dt` at most the requested step.
    pub fn schedule(&self) -> Result<(usize, f64)> {
        let crit = self.critical_dt()?;
        let dt = self.dt.unwrap_or(self.safety * crit);
        if !(dt > 0.0 && self.t_end > 0.0) {
            return Err(invalid("time step and end time must be positive"));
        }
        if dt > crit {
            log::warn!("FDM step {dt:e} s exceeds the critical step {crit:e} s");
        }
        let steps = (self.t_end / dt).ceil().max(1.0) as usize;
        Ok((steps, self.t_end / steps as f64))
    }

    pub fn snapshot_count(&self) -> Result<usize> {
        let (steps, _) = self.schedule()?;
        Ok(match self.snapshot_stride {
            Some(s) if s > 0 => steps / s + 1,
            _ => 0,
        })
    }

    /// Working arrays (two fields plus the source) and snapshots.
    pub fn memory_estimate(&self) -> Result<u64> {
        let n3 = (self.points as u64).pow(3);
        Ok((3 + self.snapshot_count()? as u64) * n3 * 8)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(invalid("FDM grid needs at least 3 points per axis"));
        }
        if !(self.safety > 0.0) {
            return Err(invalid("FDM safety factor must be positive"));
        }
        let bytes = self.memory_estimate()?;
        if bytes > self.memory_guard {
            return Err(Error::MemoryGuard {
                bytes,
                guard: self.memory_guard,
            });
        }
        Ok(())
    }
}

/// Bytes of a full-grid transient result: `n³ · snapshots · 8`.
pub fn fdm_storage_bytes(points: usize, snapshots: usize) -> u64 {
    (points as u64).pow(3) * snapshots as u64 * 8
}

/// `(1/dx) ∫ hat_i f` on a uniform grid, pieces split at the factor's breakpoints.
fn hat_average<T: Real>(f: &SourceFactor<T>, coords: &[T], i: usize, quad: &QuadRule<T>) -> T {
    let dx = coords[1] - coords[0];
    let xi = coords[i];
    let breaks = f.breakpoints();
    let mut total = T::zero();
    let sides = [(i > 0, xi - dx, xi), (i + 1 < coords.len(), xi, xi + dx)];
    for (present, a, b) in sides {
        if !present {
            continue;
        }
        let mut cuts = vec![a];
        cuts.extend(breaks.iter().copied().filter(|&p| p > a && p < b));
        cuts.push(b);
        for w in cuts.windows(2) {
            let half = (w[1] - w[0]) / T::lit(2.0);
            for (&t, &wt) in quad.points().iter().zip(quad.weights()) {
                let x = w[0] + (t + T::one()) * half;
                let hat = T::one() - (x - xi).abs() / dx;
                total += wt * half * hat * f.eval(x);
            }
        }
    }
    total / dx
}

/// Samples the spatial part of `source` (factors 0..3; later factors at 0)
/// on the `points³` grid over `[0, side]³`, row-major with z fastest.
pub fn sample_source3d<T: Real>(
    source: &SeparableSource<T>,
    points: usize,
    side: T,
    sampling: SourceSampling,
) -> Result<Vec<T>> {
    if source.terms.iter().any(|t| t.factors.len() < 3) {
        return Err(invalid("a 3D source needs at least three factors per term"));
    }
    let coords = axis(points, side);
    let quad = gauss_rule::<T>(8)?.composite(4);
    let mut out = vec![T::zero(); points * points * points];
    for term in &source.terms {
        let rest = term.factors[3..]
            .iter()
            .fold(term.coeff, |acc, f| acc * f.eval(T::zero()));
        let per_axis: Vec<Vec<T>> = (0..3)
            .map(|d| {
                let f = &term.factors[d];
                (0..points)
                    .map(|i| match sampling {
                        SourceSampling::Nodal => f.eval(coords[i]),
                        SourceSampling::HatAverage => hat_average(f, &coords, i, &quad),
                    })
                    .collect()
            })
            .collect();
        for i in 0..points {
            for j in 0..points {
                let fij = rest * per_axis[0][i] * per_axis[1][j];
                for k in 0..points {
                    out[(i * points + j) * points + k] += fij * per_axis[2][k];
                }
            }
        }
    }
    Ok(out)
}

fn axis<T: Real>(points: usize, side: T) -> Vec<T> {
    let h = side / T::from_usize_lossy(points - 1);
    (0..points).map(|i| T::from_usize_lossy(i) * h).collect()
}

/// Forward-Euler stepper for `u̇ = α Δ₇u + b/(ρ c_p)` with zero faces.
#[derive(Clone, Debug)]
pub struct Fdm3d<T> {
    n: usize,
    u: Vec<T>,
    next: Vec<T>,
    forcing: Vec<T>,
    coef: T,
    dt: T,
    step: usize,
}

impl<T: Real> Fdm3d<T> {
    /// `source` holds nodal `b` values (row-major, z fastest).
    pub fn new(points: usize, dx: T, dt: T, constants: &DiffusionConstants, source: &[T]) -> Result<Self> {
        let len = points * points * points;
        if points < 3 || source.len() != len {
            return Err(invalid("source grid does not match the point count"));
        }
        let inv_cap = T::one() / T::lit(constants.heat_capacity());
        Ok(Self {
            n: points,
            u: vec![T::zero(); len],
            next: vec![T::zero(); len],
            forcing: source.iter().map(|&b| b * inv_cap).collect(),
            coef: T::lit(constants.alpha()) * dt / (dx * dx),
            dt,
            step: 0,
        })
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn field(&self) -> &[T] {
        &self.u
    }

    pub fn max_abs(&self) -> T {
        self.u.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn step(&mut self) -> Result<()> {
        let n = self.n;
        let six = T::lit(6.0);
        let mut finite = true;
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let row = (i * n + j) * n;
                for k in 1..n - 1 {
                    let c = row + k;
                    let lap = self.u[c - n * n]
                        + self.u[c + n * n]
                        + self.u[c - n]
                        + self.u[c + n]
                        + self.u[c - 1]
                        + self.u[c + 1]
                        - six * self.u[c];
                    let v = self.u[c] + self.coef * lap + self.dt * self.forcing[c];
                    finite &= v.is_finite();
                    self.next[c] = v;
                }
            }
        }
        std::mem::swap(&mut self.u, &mut self.next);
        self.step += 1;
        if !finite {
            return Err(Error::Divergence { step: self.step });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FdmResult<T> {
    pub field: GridField<T>,
    pub snapshots: Vec<(T, GridField<T>)>,
    pub dt: f64,
    pub steps: usize,
    pub critical_dt: f64,
}

/// Explicit FDM solution at `t_end`, starting from zero.
pub fn solve_diffusion_fdm3d<T: Real>(config: &FdmConfig, source: &SeparableSource<T>) -> Result<FdmResult<T>> {
    config.validate()?;
    let (steps, dt) = config.schedule()?;
    let n = config.points;
    let side = T::lit(config.constants.side);
    let b = sample_source3d(source, n, side, config.sampling)?;
    let mut fdm = Fdm3d::new(n, T::lit(config.dx()), T::lit(dt), &config.constants, &b)?;
    let coords = vec![axis(n, side); 3];
    let grid = |u: &[T]| {
        GridField::new("fdm", coords.clone(), u.to_vec())
            .expect("grid shape")
            .with_axis_labels(&["x", "y", "z"])
    };
    let mut snapshots = Vec::new();
    let stride = config.snapshot_stride.filter(|&s| s > 0);
    if stride.is_some() {
        snapshots.push((T::zero(), grid(fdm.field())));
    }
    for s in 1..=steps {
        fdm.step()?;
        if let Some(k) = stride {
            if s % k == 0 {
                snapshots.push((T::lit(s as f64 * dt), grid(fdm.field())));
            }
        }
    }
    Ok(FdmResult {
        field: grid(fdm.field()),
        snapshots,
        dt,
        steps,
        critical_dt: config.critical_dt()?,
    })
}

/// `-Δu = b` on `[lo, hi]²` with zero boundary values by the 5-point stencil
/// and unpreconditioned conjugate gradients to relative residual `1e-10`.
pub fn solve_poisson_grid2d<T: Real>(n: usize, lo: T, hi: T, b: impl Fn(T, T) -> T) -> Result<GridField<T>> {
    if n < 3 || !(hi > lo) {
        return Err(invalid("grid Poisson solve needs n ≥ 3 and a non-empty domain"));
    }
    let h = (hi - lo) / T::from_usize_lossy(n - 1);
    let coords: Vec<T> = (0..n).map(|i| lo + T::from_usize_lossy(i) * h).collect();
    let m = n - 2;
    let h2 = h * h;
    let rhs: Vec<T> = (0..m * m)
        .map(|p| h2 * b(coords[p / m + 1], coords[p % m + 1]))
        .collect();
    let apply = |x: &[T], y: &mut [T]| {
        let four = T::lit(4.0);
        for i in 0..m {
            for j in 0..m {
                let p = i * m + j;
                let mut v = four * x[p];
                if i > 0 {
                    v -= x[p - m];
                }
                if i + 1 < m {
                    v -= x[p + m];
                }
                if j > 0 {
                    v -= x[p - 1];
                }
                if j + 1 < m {
                    v -= x[p + 1];
                }
                y[p] = v;
            }
        }
    };
    let x = conjugate_gradient(apply, &rhs, T::lit(1e-10), 20 * m * m.max(50))?;
    let mut values = vec![T::zero(); n * n];
    for i in 0..m {
        for j in 0..m {
            values[(i + 1) * n + j + 1] = x[i * m + j];
        }
    }
    Ok(GridField::new("poisson-grid", vec![coords.clone(), coords], values)?.with_axis_labels(&["x", "y"]))
}

fn conjugate_gradient<T: Real>(apply: impl Fn(&[T], &mut [T]), b: &[T], rtol: T, max_iter: usize) -> Result<Vec<T>> {
    let n = b.len();
    let mut x = vec![T::zero(); n];
    let b_norm = norm2(b);
    if b_norm == T::zero() {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![T::zero(); n];
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        if rr.sqrt() <= rtol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    if rr.sqrt() <= rtol * b_norm {
        return Ok(x);
    }
    Err(Error::CgNotConverged {
        iterations: max_iter,
        residual: (rr.sqrt() / b_norm).as_f64(),
    })
}

/// Nodal Galerkin solution of a two-dimensional problem from the assembled
/// Kronecker-sum system `Σ_t c_t (Op_x ⊗ Op_y)`.
pub fn dense_galerkin_2d<T: Real>(problem: &WeakProblem<T>, quad: Option<&QuadRule<T>>) -> Result<GridField<T>> {
    if problem.dim_count() != 2 {
        return Err(invalid("dense Galerkin oracle handles two dimensions only"));
    }
    let bundles = precompute_dim_operators(problem, quad)?;
    let (lx, ly) = (bundles[0].n_free(), bundles[1].n_free());
    let dofs = lx * ly;
    if dofs > DENSE_DOF_CAP {
        return Err(Error::TooLarge {
            dofs,
            cap: DENSE_DOF_CAP,
        });
    }
    let ops: Vec<_> = problem
        .terms
        .iter()
        .map(|t| (t.coeff, bundles[0].op(t.ops[0]), bundles[1].op(t.ops[1])))
        .collect();
    let (bx, by) = (
        ops.iter().map(|o| o.1.half_bandwidth()).max().unwrap_or(0),
        ops.iter().map(|o| o.2.half_bandwidth()).max().unwrap_or(0),
    );
    let band = (bx * ly + by).min(dofs.saturating_sub(1));
    let lu = BandLu::new(dofs, band, band, |p, q| {
        let (i, j, k, l) = (p / ly, p % ly, q / ly, q % ly);
        ops.iter().map(|&(c, ox, oy)| c * ox.get(i, k) * oy.get(j, l)).sum()
    })?;
    let mut rhs = vec![T::zero(); dofs];
    for (s, term) in problem.source.terms.iter().enumerate() {
        let (fx, fy) = (&bundles[0].loads[s], &bundles[1].loads[s]);
        for i in 0..lx {
            for j in 0..ly {
                rhs[i * ly + j] += term.coeff * fx[i] * fy[j];
            }
        }
    }
    let u = lu.solve(&rhs);
    let (cx, cy) = (&bundles[0].constraints, &bundles[1].constraints);
    let (nx, ny) = (cx.n_full(), cy.n_full());
    let mut values = vec![T::zero(); nx * ny];
    for (i, &fi) in cx.free().iter().enumerate() {
        for (j, &fj) in cy.free().iter().enumerate() {
            values[fi * ny + fj] = u[i * ly + j];
        }
    }
    let coords = problem.dims.iter().map(|d| d.mesh.nodes().to_vec()).collect();
    let labels: Vec<&str> = problem.dims.iter().map(|d| d.label.as_str()).collect();
    Ok(GridField::new("dense-galerkin", coords, values)?.with_axis_labels(&labels))
}

/// Gradient of a two-dimensional reference field.
pub trait GradientField {
    fn gradient(&self, x: f64, y: f64) -> [f64; 2];
}

/// Analytic gradient given as a closure.
pub struct AnalyticGradient<F>(pub F);

impl<F: Fn(f64, f64) -> [f64; 2]> GradientField for AnalyticGradient<F> {
    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        (self.0)(x, y)
    }
}

/// Nodal gradients of a 2D grid by central differences (one-sided at the
/// edges), bilinearly interpolated between nodes.
#[derive(Clone, Debug)]
pub struct GridGradient {
    xs: Vec<f64>,
    ys: Vec<f64>,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

impl GridGradient {
    pub fn new<T: Real>(field: &GridField<T>) -> Result<Self> {
        if field.ndim() != 2 || field.coords.iter().any(|c| c.len() < 2) {
            return Err(invalid(
                "gradient reconstruction needs a 2D grid with at least 2 points per axis",
            ));
        }
        let xs: Vec<f64> = field.coords[0].iter().map(|v| v.as_f64()).collect();
        let ys: Vec<f64> = field.coords[1].iter().map(|v| v.as_f64()).collect();
        let (nx, ny) = (xs.len(), ys.len());
        let u = |i: usize, j: usize| field.values[i * ny + j].as_f64();
        let diff = |lo: usize, hi: usize, c: &[f64]| (lo, hi, c[hi] - c[lo]);
        let mut gx = vec![0.0; nx * ny];
        let mut gy = vec![0.0; nx * ny];
        for i in 0..nx {
            let (a, b, dx) = diff(i.saturating_sub(1), (i + 1).min(nx - 1), &xs);
            for j in 0..ny {
                gx[i * ny + j] = (u(b, j) - u(a, j)) / dx;
            }
        }
        for j in 0..ny {
            let (a, b, dy) = diff(j.saturating_sub(1), (j + 1).min(ny - 1), &ys);
            for i in 0..nx {
                gy[i * ny + j] = (u(i, b) - u(i, a)) / dy;
            }
        }
        Ok(Self { xs, ys, gx, gy })
    }
}

/// Cell index and local coordinate on a sorted axis (clamped).
fn cell(axis: &[f64], x: f64) -> (usize, f64) {
    let n = axis.len();
    let i = axis.partition_point(|&a| a <= x).clamp(1, n - 1) - 1;
    let t = ((x - axis[i]) / (axis[i + 1] - axis[i])).clamp(0.0, 1.0);
    (i, t)
}

impl GradientField for GridGradient {
    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let ny = self.ys.len();
        let (i, s) = cell(&self.xs, x);
        let (j, t) = cell(&self.ys, y);
        let lerp = |g: &[f64]| {
            let v = |a: usize, b: usize| g[a * ny + b];
            (1.0 - s) * ((1.0 - t) * v(i, j) + t * v(i, j + 1)) + s * ((1.0 - t) * v(i + 1, j) + t * v(i + 1, j + 1))
        };
        [lerp(&self.gx), lerp(&self.gy)]
    }
}

/// Gauss points per element used by the energy error for a basis.
pub fn energy_quad_points<T: Real>(hyper: &Hyperparams<T>) -> usize {
    (hyper.default_quad_points() + 2).clamp(4, crate::mesh::MAX_GAUSS_POINTS)
}

/// Relative H¹-seminorm error `‖∇(u_h - u_ref)‖ / ‖∇u_ref‖` of a 2D separated
/// solution, integrated on the solution's own meshes.
pub fn energy_norm_error<T: Real>(u_h: &SeparatedSolution<T>, u_ref: &dyn GradientField) -> Result<f64> {
    if u_h.dim_count() != 2 {
        return Err(invalid("energy error is defined for two-dimensional solutions"));
    }
    // per dimension: quadrature points, weights, per-rank values and derivatives
    let mut axes = Vec::with_capacity(2);
    for (d, spec) in u_h.dims().iter().enumerate() {
        let quad = gauss_rule::<T>(energy_quad_points(&spec.hyper))?;
        let table = spec.basis()?.table(&quad);
        let (mut pts, mut wts, mut vals, mut ders) = (vec![], vec![], vec![], vec![]);
        for el in &table.elements {
            for q in 0..el.weights.len() {
                pts.push(el.points[q].as_f64());
                wts.push(el.weights[q].as_f64());
                let (v, dv) = (el.values_at(q), el.derivs_at(q));
                for m in 0..u_h.rank() {
                    let u = &u_h.factor(d).col(m)[el.nodes()];
                    vals.push(dot(v, u).as_f64());
                    ders.push(dot(dv, u).as_f64());
                }
            }
        }
        axes.push((pts, wts, vals, ders));
    }
    let rank = u_h.rank();
    let (px, wx, vx, dx) = &axes[0];
    let (py, wy, vy, dy) = &axes[1];
    let (mut err, mut reference) = (0.0, 0.0);
    for a in 0..px.len() {
        for b in 0..py.len() {
            let (mut gx, mut gy) = (0.0, 0.0);
            for m in 0..rank {
                gx += dx[a * rank + m] * vy[b * rank + m];
                gy += vx[a * rank + m] * dy[b * rank + m];
            }
            let g = u_ref.gradient(px[a], py[b]);
            let w = wx[a] * wy[b];
            err += w * ((gx - g[0]).powi(2) + (gy - g[1]).powi(2));
            reference += w * (g[0] * g[0] + g[1] * g[1]);
        }
    }
    ratio(err, reference)
}

fn ratio(err: f64, reference: f64) -> Result<f64> {
    if !(reference > 0.0) || !reference.is_finite() {
        return Err(Error::UndefinedMetric("reference has zero energy".into()));
    }
    Ok((err / reference).sqrt())
}

/// Energy error of a grid field against a reference, integrated over the
/// cells of `u_h` with both gradients reconstructed from their grids.
pub fn energy_norm_error_grid<T: Real>(u_h: &GridField<T>, u_ref: &dyn GradientField) -> Result<f64> {
    let gh = GridGradient::new(u_h)?;
    let quad = gauss_rule::<f64>(4)?;
    let (mut err, mut reference) = (0.0, 0.0);
    for cx in gh.xs.windows(2) {
        for cy in gh.ys.windows(2) {
            let (hx, hy) = ((cx[1] - cx[0]) / 2.0, (cy[1] - cy[0]) / 2.0);
            for (&s, &ws) in quad.points().iter().zip(quad.weights()) {
                for (&t, &wt) in quad.points().iter().zip(quad.weights()) {
                    let (x, y) = (cx[0] + (s + 1.0) * hx, cy[0] + (t + 1.0) * hy);
                    let (a, g) = (gh.gradient(x, y), u_ref.gradient(x, y));
                    let w = ws * wt * hx * hy;
                    err += w * ((a[0] - g[0]).powi(2) + (a[1] - g[1]).powi(2));
                    reference += w * (g[0] * g[0] + g[1] * g[1]);
                }
            }
        }
    }
    ratio(err, reference)
}

/// `‖a - b‖₂ / ‖b‖₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeError {
    pub value: f64,
    /// `b` is identically zero and `value` is `‖a‖₂`.
    pub zero_reference: bool,
}

pub fn rel_l2_error<T: Real>(a: &GridField<T>, b: &GridField<T>) -> Result<RelativeError> {
    if a.shape() != b.shape() {
        return Err(invalid(format!(
            "grid shapes differ: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let diff: f64 = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| (x - y).as_f64().powi(2))
        .sum::<f64>()
        .sqrt();
    let reference = norm2(&b.values).as_f64();
    if reference == 0.0 {
        return Ok(RelativeError {
            value: norm2(&a.values).as_f64(),
            zero_reference: true,
        });
    }
    Ok(RelativeError {
        value: diff / reference,
        zero_reference: false,
    })
}
