//! Convolution-enriched 1D basis.
//!
//! On element `e` the composite shape functions are
//! `Ñ_k(x) = Σ_{i∈{e,e+1}} N_i(ξ) W^i_k(x)`, where `N_i` are the linear hat
//! functions and `W^i` are patch interpolation weights of node `i`. The patch
//! weights come from a Gaussian radial-point interpolation augmented with the
//! monomials `1, ζ, …, ζ^p` (`ζ` is the patch-local coordinate), so they keep
//! the Kronecker-delta property and reproduce polynomials up to order `p`.
//! Linear FE is the special case `W^i_k = δ_ik`.

use std::ops::Range;

use crate::error::{invalid, Error, Result};
use crate::linalg::{condition_1norm, DenseMatrix, LuFactor};
use crate::mesh::{gauss_rule, map_to_element, Mesh1D, QuadRule};
use crate::scalar::Real;

/// Patch interpolation systems above this 1-norm condition number are rejected.
const MAX_PATCH_CONDITION: f64 = 1e13;

const CHIDENN_QUAD_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    FeLinear,
    Chidenn,
}

impl BasisKind {
    pub fn code(self) -> u32 {
        match self {
            BasisKind::FeLinear => 0,
            BasisKind::Chidenn => 1,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(BasisKind::FeLinear),
            1 => Some(BasisKind::Chidenn),
            _ => None,
        }
    }
}

/// Basis hyperparameters: patch size `s` (in elements), dilation `a` and
/// reproducing order `p`. Ignored for [`BasisKind::FeLinear`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hyperparams<T> {
    pub kind: BasisKind,
    pub s: usize,
    pub a: T,
    pub p: usize,
}

impl<T: Real> Hyperparams<T> {
    pub fn fe_linear() -> Self {
        Self {
            kind: BasisKind::FeLinear,
            s: 1,
            a: T::one(),
            p: 1,
        }
    }

    pub fn chidenn(s: usize, a: T, p: usize) -> Result<Self> {
        let h = Self {
            kind: BasisKind::Chidenn,
            s,
            a,
            p,
        };
        h.validate()?;
        Ok(h)
    }

    /// C-HiDeNN with the default dilation `a = s`.
    pub fn chidenn_default_a(s: usize, p: usize) -> Result<Self> {
        Self::chidenn(s, T::from_usize_lossy(s), p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == BasisKind::FeLinear {
            return Ok(());
        }
        if self.s == 0 {
            return Err(invalid("patch size s must be positive"));
        }
        if !(self.a > T::zero()) || !self.a.is_finite() {
            return Err(invalid("dilation a must be a positive finite number"));
        }
        if self.p > self.s {
            return Err(invalid("p must not exceed s"));
        }
        Ok(())
    }

    /// Gauss points per element used when no override is given. The
    /// convolution basis is not polynomial; 8 points keep every assembled
    /// entry within 1e-9 (relative to the largest entry) of a rule with
    /// twice as many points for all s, p <= 3 and a in [1, 4].
    pub fn default_quad_points(&self) -> usize {
        match self.kind {
            BasisKind::FeLinear => 2,
            BasisKind::Chidenn => CHIDENN_QUAD_POINTS,
        }
    }

    /// Largest index distance between two nodes active on a common element.
    pub fn half_bandwidth(&self) -> usize {
        match self.kind {
            BasisKind::FeLinear => 1,
            BasisKind::Chidenn => 2 * self.s + 1,
        }
    }
}

/// Factorized interpolation system of one nodal patch.
#[derive(Clone, Debug)]
pub struct PatchWeights<T> {
    center_node: usize,
    nodes: Range<usize>,
    coords: Vec<T>,
    center: T,
    kernel_width: T,
    mono_scale: T,
    p: usize,
    system: LuFactor<T>,
}

impl<T: Real> PatchWeights<T> {
    pub fn center_node(&self) -> usize {
        self.center_node
    }

    /// Node ids of the patch (a contiguous window clipped to the mesh).
    pub fn patch_nodes(&self) -> Range<usize> {
        self.nodes.clone()
    }

    fn rhs(&self, x: T) -> (Vec<T>, Vec<T>) {
        let n = self.coords.len();
        let mut r = Vec::with_capacity(n + self.p + 1);
        let mut dr = Vec::with_capacity(n + self.p + 1);
        let two = T::lit(2.0);
        let w2 = self.kernel_width * self.kernel_width;
        for &xj in &self.coords {
            let d = x - xj;
            let phi = (-(d * d) / w2).exp();
            r.push(phi);
            dr.push(-two * d / w2 * phi);
        }
        let z = (x - self.center) / self.mono_scale;
        let mut zq = T::one();
        let mut zq_prev = T::zero();
        for q in 0..=self.p {
            r.push(zq);
            dr.push(if q == 0 {
                T::zero()
            } else {
                T::from_usize_lossy(q) * zq_prev / self.mono_scale
            });
            zq_prev = zq;
            zq = zq * z;
        }
        (r, dr)
    }

    /// Weights `W_j(x)` and `dW_j/dx` over [`Self::patch_nodes`].
    pub fn eval(&self, x: T) -> (Vec<T>, Vec<T>) {
        let n = self.coords.len();
        let (r, dr) = self.rhs(x);
        let mut w = self.system.solve(&r);
        let mut dw = self.system.solve(&dr);
        w.truncate(n);
        dw.truncate(n);
        (w, dw)
    }
}

/// Builds the interpolation patch of node `i`.
pub fn build_patch<T: Real>(mesh: &Mesh1D<T>, i: usize, hyper: &Hyperparams<T>) -> Result<PatchWeights<T>> {
    if hyper.kind != BasisKind::Chidenn {
        return Err(invalid("patches exist only for the C-HiDeNN basis"));
    }
    hyper.validate()?;
    if i >= mesh.n_nodes() {
        return Err(invalid(format!("node index {i} out of range")));
    }
    let lo = i.saturating_sub(hyper.s);
    let hi = (i + hyper.s).min(mesh.n_elem());
    let n = hi - lo + 1;
    if n < hyper.p + 1 {
        return Err(invalid(format!(
            "patch of node {i} has {n} nodes, fewer than p+1 = {}",
            hyper.p + 1
        )));
    }
    let h = mesh.h();
    let coords: Vec<T> = mesh.nodes()[lo..=hi].to_vec();
    let center = mesh.node(i);
    let kernel_width = hyper.a * h;
    let mono_scale = T::from_usize_lossy(hyper.s) * h;
    let m = n + hyper.p + 1;
    let mut g = DenseMatrix::zeros(m, m);
    let w2 = kernel_width * kernel_width;
    for r in 0..n {
        for c in 0..n {
            let d = coords[r] - coords[c];
            g[(r, c)] = (-(d * d) / w2).exp();
        }
        let z = (coords[r] - center) / mono_scale;
        let mut zq = T::one();
        for q in 0..=hyper.p {
            g[(r, n + q)] = zq;
            g[(n + q, r)] = zq;
            zq = zq * z;
        }
    }
    let system = LuFactor::new(g.clone()).map_err(|_| Error::IllConditionedPatch {
        node: i,
        condition: f64::INFINITY,
    })?;
    let cond = condition_1norm(&g, &system).as_f64();
    if !(cond <= MAX_PATCH_CONDITION) {
        return Err(Error::IllConditionedPatch {
            node: i,
            condition: cond,
        });
    }
    Ok(PatchWeights {
        center_node: i,
        nodes: lo..hi + 1,
        coords,
        center,
        kernel_width,
        mono_scale,
        p: hyper.p,
        system,
    })
}

/// Patch weights and their derivatives at `x`.
pub fn eval_patch_weights<T: Real>(patch: &PatchWeights<T>, x: T) -> (Vec<T>, Vec<T>) {
    patch.eval(x)
}

/// Basis values at one point: contiguous active nodes starting at `first`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBasis<T> {
    pub first: usize,
    pub values: Vec<T>,
    pub derivs: Vec<T>,
}

impl<T: Real> LocalBasis<T> {
    pub fn nodes(&self) -> Range<usize> {
        self.first..self.first + self.values.len()
    }

    /// `(node, Ñ_k, dÑ_k/dx)` triples.
    pub fn iter(&self) -> impl Iterator<Item = (usize, T, T)> + '_ {
        self.values
            .iter()
            .zip(&self.derivs)
            .enumerate()
            .map(move |(j, (&v, &d))| (self.first + j, v, d))
    }

    pub fn value_of(&self, node: usize) -> T {
        node.checked_sub(self.first)
            .and_then(|j| self.values.get(j).copied())
            .unwrap_or_else(T::zero)
    }

    /// `Σ_k Ñ_k coeffs[k]` and its derivative.
    pub fn contract(&self, coeffs: &[T]) -> (T, T) {
        let c = &coeffs[self.nodes()];
        (crate::scalar::dot(&self.values, c), crate::scalar::dot(&self.derivs, c))
    }
}

/// Basis on one mesh with every nodal patch constructed.
#[derive(Clone, Debug)]
pub struct Basis1D<T> {
    mesh: Mesh1D<T>,
    hyper: Hyperparams<T>,
    patches: Vec<PatchWeights<T>>,
    identity_weights: bool,
}

impl<T: Real> Basis1D<T> {
    pub fn new(mesh: Mesh1D<T>, hyper: Hyperparams<T>) -> Result<Self> {
        hyper.validate()?;
        let patches = match hyper.kind {
            BasisKind::FeLinear => Vec::new(),
            BasisKind::Chidenn => (0..mesh.n_nodes())
                .map(|i| build_patch(&mesh, i, &hyper))
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            mesh,
            hyper,
            patches,
            identity_weights: false,
        })
    }

    /// C-HiDeNN layout with every patch weight replaced by `δ_ij`.
    #[cfg(test)]
    pub(crate) fn with_identity_weights(mesh: Mesh1D<T>, hyper: Hyperparams<T>) -> Result<Self> {
        let mut b = Self::new(mesh, hyper)?;
        b.identity_weights = true;
        Ok(b)
    }

    pub fn mesh(&self) -> &Mesh1D<T> {
        &self.mesh
    }

    pub fn hyper(&self) -> &Hyperparams<T> {
        &self.hyper
    }

    /// Nodes that can be active on element `e`.
    pub fn element_support(&self, e: usize) -> Range<usize> {
        element_support(&self.mesh, &self.hyper, e)
    }

    /// Evaluates all basis functions active on element `e` at parent coordinate `xi`.
    pub fn eval_in_element(&self, e: usize, xi: T) -> LocalBasis<T> {
        let patches = if self.hyper.kind == BasisKind::FeLinear || self.identity_weights {
            None
        } else {
            Some([&self.patches[e], &self.patches[e + 1]])
        };
        composite_eval(&self.mesh, &self.hyper, e, xi, patches)
    }

    /// Evaluates the basis at a physical coordinate.
    pub fn eval(&self, x: T) -> Result<LocalBasis<T>> {
        let (e, xi) = self.mesh.locate(x).ok_or_else(|| Error::OutOfDomain {
            coord: x.as_f64(),
            min: self.mesh.x_min().as_f64(),
            max: self.mesh.x_max().as_f64(),
        })?;
        Ok(self.eval_in_element(e, xi))
    }

    /// Tabulates the basis at the points of `quad` in every element.
    pub fn table(&self, quad: &QuadRule<T>) -> BasisTable<T> {
        let elements = (0..self.mesh.n_elem())
            .map(|e| {
                let nq = quad.len();
                let support = self.element_support(e);
                let na = support.len();
                let mut values = Vec::with_capacity(nq * na);
                let mut derivs = Vec::with_capacity(nq * na);
                let mut points = Vec::with_capacity(nq);
                let mut weights = Vec::with_capacity(nq);
                for (&xi, &w) in quad.points().iter().zip(quad.weights()) {
                    let (x, jac) = map_to_element(&self.mesh, e, xi).expect("valid element");
                    let local = self.eval_in_element(e, xi);
                    values.extend_from_slice(&local.values);
                    derivs.extend_from_slice(&local.derivs);
                    points.push(x);
                    weights.push(w * jac);
                }
                ElementBasis {
                    first_node: support.start,
                    n_active: na,
                    points,
                    weights,
                    values,
                    derivs,
                }
            })
            .collect();
        BasisTable {
            mesh: self.mesh.clone(),
            hyper: self.hyper,
            quad: quad.clone(),
            elements,
        }
    }
}

fn element_support<T: Real>(mesh: &Mesh1D<T>, hyper: &Hyperparams<T>, e: usize) -> Range<usize> {
    match hyper.kind {
        BasisKind::FeLinear => e..e + 2,
        BasisKind::Chidenn => {
            let lo = e.saturating_sub(hyper.s);
            let hi = (e + 1 + hyper.s).min(mesh.n_elem());
            lo..hi + 1
        }
    }
}

/// `Ñ_k = Σ_i N_i W^i_k` on element `e`; `patches = None` means `W^i_k = δ_ik`.
fn composite_eval<T: Real>(
    mesh: &Mesh1D<T>,
    hyper: &Hyperparams<T>,
    e: usize,
    xi: T,
    patches: Option<[&PatchWeights<T>; 2]>,
) -> LocalBasis<T> {
    let (x, _) = map_to_element(mesh, e, xi).expect("element index in range");
    let two = T::lit(2.0);
    let h = mesh.h();
    let hats = [(T::one() - xi) / two, (T::one() + xi) / two];
    let dhats = [-T::one() / h, T::one() / h];
    let support = element_support(mesh, hyper, e);
    let mut values = vec![T::zero(); support.len()];
    let mut derivs = vec![T::zero(); support.len()];
    match patches {
        None => {
            for k in 0..2 {
                values[e + k - support.start] = hats[k];
                derivs[e + k - support.start] = dhats[k];
            }
        }
        Some(pair) => {
            for (k, patch) in pair.iter().enumerate() {
                let (w, dw) = patch.eval(x);
                for (j, node) in patch.patch_nodes().enumerate() {
                    let idx = node - support.start;
                    values[idx] += hats[k] * w[j];
                    derivs[idx] += dhats[k] * w[j] + hats[k] * dw[j];
                }
            }
        }
    }
    LocalBasis {
        first: support.start,
        values,
        derivs,
    }
}

/// Basis values on one element at its quadrature points.
#[derive(Clone, Debug)]
pub struct ElementBasis<T> {
    pub first_node: usize,
    pub n_active: usize,
    /// Physical quadrature points.
    pub points: Vec<T>,
    /// Quadrature weights times the element Jacobian.
    pub weights: Vec<T>,
    /// Row-major `n_points × n_active`.
    pub values: Vec<T>,
    pub derivs: Vec<T>,
}

impl<T: Real> ElementBasis<T> {
    pub fn nodes(&self) -> Range<usize> {
        self.first_node..self.first_node + self.n_active
    }

    pub fn values_at(&self, q: usize) -> &[T] {
        &self.values[q * self.n_active..(q + 1) * self.n_active]
    }

    pub fn derivs_at(&self, q: usize) -> &[T] {
        &self.derivs[q * self.n_active..(q + 1) * self.n_active]
    }
}

/// Precomputed basis values and derivatives at all quadrature points.
#[derive(Clone, Debug)]
pub struct BasisTable<T> {
    pub mesh: Mesh1D<T>,
    pub hyper: Hyperparams<T>,
    pub quad: QuadRule<T>,
    pub elements: Vec<ElementBasis<T>>,
}

impl<T: Real> BasisTable<T> {
    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }
}

pub fn build_basis_table<T: Real>(
    mesh: &Mesh1D<T>,
    hyper: &Hyperparams<T>,
    quad: &QuadRule<T>,
) -> Result<BasisTable<T>> {
    Ok(Basis1D::new(mesh.clone(), *hyper)?.table(quad))
}

/// Table with the default Gauss order for `hyper`.
pub fn default_basis_table<T: Real>(mesh: &Mesh1D<T>, hyper: &Hyperparams<T>) -> Result<BasisTable<T>> {
    build_basis_table(mesh, hyper, &gauss_rule(hyper.default_quad_points())?)
}

/// Evaluates every basis function active at `x`. Only the two patches needed
/// are constructed.
pub fn eval_basis_at<T: Real>(mesh: &Mesh1D<T>, hyper: &Hyperparams<T>, x: T) -> Result<LocalBasis<T>> {
    hyper.validate()?;
    let (e, xi) = mesh.locate(x).ok_or_else(|| Error::OutOfDomain {
        coord: x.as_f64(),
        min: mesh.x_min().as_f64(),
        max: mesh.x_max().as_f64(),
    })?;
    if hyper.kind == BasisKind::FeLinear {
        return Ok(composite_eval(mesh, hyper, e, xi, None));
    }
    let left = build_patch(mesh, e, hyper)?;
    let right = build_patch(mesh, e + 1, hyper)?;
    Ok(composite_eval(mesh, hyper, e, xi, Some([&left, &right])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::uniform_mesh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mesh10() -> Mesh1D<f64> {
        uniform_mesh(0.0, 10.0, 10).unwrap()
    }

    #[test]
    fn patch_windows() {
        let m = mesh10();
        let h = Hyperparams::chidenn_default_a(2, 2).unwrap();
        assert_eq!(build_patch(&m, 5, &h).unwrap().patch_nodes(), 3..8);
        assert_eq!(build_patch(&m, 0, &h).unwrap().patch_nodes(), 0..3);
        assert_eq!(build_patch(&m, 10, &h).unwrap().patch_nodes(), 8..11);
        assert!(Hyperparams::<f64>::chidenn(1, 1.0, 2).is_err());
    }

    #[test]
    fn patch_error_reports_node() {
        // a tiny mesh cannot host p+1 nodes in a patch
        let m = uniform_mesh(0.0, 1.0, 1).unwrap();
        let h = Hyperparams::chidenn(3, 1.0, 3).unwrap();
        assert!(build_patch(&m, 0, &h).is_err());
    }

    #[test]
    fn patch_weights_match_generic_dense_solve() {
        // Oracle: assemble the 5-node RBF + monomial system by hand and
        // solve it with an unpivoted Gauss–Jordan elimination.
        let m = mesh10();
        let hyper = Hyperparams::chidenn(2, 2.0, 2).unwrap();
        let patch = build_patch(&m, 5, &hyper).unwrap();
        let xs = [3.0, 4.0, 5.0, 6.0, 7.0];
        let x = 4.3;
        let n = 8;
        let mut g = vec![vec![0.0; n + 1]; n];
        for r in 0..5 {
            for c in 0..5 {
                g[r][c] = (-((xs[r] - xs[c]) / 2.0f64).powi(2)).exp();
            }
            for q in 0..3 {
                let z: f64 = (xs[r] - 5.0) / 2.0;
                g[r][5 + q] = z.powi(q as i32);
                g[5 + q][r] = z.powi(q as i32);
            }
            g[r][n] = (-((x - xs[r]) / 2.0f64).powi(2)).exp();
        }
        for q in 0..3 {
            g[5 + q][n] = ((x - 5.0) / 2.0f64).powi(q as i32);
        }
        for k in 0..n {
            let piv = (k..n).max_by(|&a, &b| g[a][k].abs().total_cmp(&g[b][k].abs())).unwrap();
            g.swap(k, piv);
            let d = g[k][k];
            for c in 0..=n {
                g[k][c] /= d;
            }
            for r in 0..n {
                if r != k {
                    let f = g[r][k];
                    for c in 0..=n {
                        g[r][c] -= f * g[k][c];
                    }
                }
            }
        }
        let (w, _) = eval_patch_weights(&patch, x);
        for j in 0..5 {
            assert!((w[j] - g[j][n]).abs() < 1e-12, "{} vs {}", w[j], g[j][n]);
        }
    }

    #[test]
    fn patch_weight_properties() {
        let m = mesh10();
        let hyper = Hyperparams::chidenn(3, 2.0, 2).unwrap();
        for i in [0, 1, 5, 10] {
            let patch = build_patch(&m, i, &hyper).unwrap();
            for (l, node) in patch.patch_nodes().enumerate() {
                let (w, _) = patch.eval(m.node(node));
                for (j, wj) in w.iter().enumerate() {
                    let d = if j == l { 1.0 } else { 0.0 };
                    assert!((wj - d).abs() < 1e-10);
                }
            }
            for x in [0.3, 2.2, 4.9, 9.7] {
                let (w, dw) = patch.eval(x);
                let xs: Vec<f64> = patch.patch_nodes().map(|k| m.node(k)).collect();
                for q in 0..=2 {
                    let s: f64 = w.iter().zip(&xs).map(|(w, x)| w * x.powi(q)).sum();
                    assert!((s - x.powi(q)).abs() < 1e-8 * x.powi(q).abs().max(1.0));
                }
                assert!(dw.iter().sum::<f64>().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fe_table_is_hat_functions() {
        let m = mesh10();
        let quad = gauss_rule::<f64>(1).unwrap();
        let t = build_basis_table(&m, &Hyperparams::fe_linear(), &quad).unwrap();
        for (e, el) in t.elements.iter().enumerate() {
            assert_eq!(el.nodes(), e..e + 2);
            assert_eq!(el.values_at(0), &[0.5, 0.5]);
            assert_eq!(el.derivs_at(0), &[-1.0, 1.0]);
        }
    }

    #[test]
    fn identity_weights_reproduce_fe_table() {
        let m = uniform_mesh(0.0, 3.0, 7).unwrap();
        let quad = gauss_rule::<f64>(3).unwrap();
        let fe = build_basis_table(&m, &Hyperparams::fe_linear(), &quad).unwrap();
        let hyper = Hyperparams::chidenn(2, 2.0, 2).unwrap();
        let id = Basis1D::with_identity_weights(m.clone(), hyper).unwrap().table(&quad);
        for (a, b) in fe.elements.iter().zip(&id.elements) {
            for q in 0..quad.len() {
                for (node, (v, d)) in b.nodes().zip(b.values_at(q).iter().zip(b.derivs_at(q))) {
                    let (fv, fd) = if a.nodes().contains(&node) {
                        let j = node - a.first_node;
                        (a.values_at(q)[j], a.derivs_at(q)[j])
                    } else {
                        (0.0, 0.0)
                    };
                    assert_eq!(*v, fv);
                    assert_eq!(*d, fd);
                }
            }
        }
    }

    #[test]
    fn linear_reproduction_s1() {
        let m = mesh10();
        let hyper = Hyperparams::chidenn(1, 50.0, 1).unwrap();
        let t = default_basis_table(&m, &hyper).unwrap();
        for el in &t.elements {
            for q in 0..t.quad.len() {
                let s: f64 = el.nodes().zip(el.values_at(q)).map(|(k, v)| v * m.node(k)).sum();
                assert!((s - el.points[q]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quadratic_reproduction_s2p2() {
        let m = mesh10();
        let hyper = Hyperparams::chidenn(2, 2.0, 2).unwrap();
        let t = default_basis_table(&m, &hyper).unwrap();
        for el in &t.elements {
            assert!(el.n_active <= 2 * 2 + 2);
            for q in 0..t.quad.len() {
                let s: f64 = el
                    .nodes()
                    .zip(el.values_at(q))
                    .map(|(k, v)| v * m.node(k).powi(2))
                    .sum();
                assert!((s - el.points[q].powi(2)).abs() < 1e-9);
                let pu: f64 = el.values_at(q).iter().sum();
                assert!((pu - 1.0).abs() < 1e-10);
                let dpu: f64 = el.derivs_at(q).iter().sum();
                assert!(dpu.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn pointwise_evaluation() {
        let m = mesh10();
        let fe = eval_basis_at(&m, &Hyperparams::fe_linear(), 4.25).unwrap();
        assert_eq!(fe.nodes(), 4..6);
        assert!((fe.value_of(4) - 0.75).abs() < 1e-14);
        assert!((fe.value_of(5) - 0.25).abs() < 1e-14);

        let hyper = Hyperparams::chidenn(2, 2.0, 2).unwrap();
        let at_node = eval_basis_at(&m, &hyper, 4.0).unwrap();
        for (k, v, _) in at_node.iter() {
            let d = if k == 4 { 1.0 } else { 0.0 };
            assert!((v - d).abs() < 1e-10);
        }
        assert!(matches!(
            eval_basis_at(&m, &hyper, 10.5),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn eval_matches_full_basis() {
        let m = uniform_mesh(0.0, 1.0, 12).unwrap();
        let hyper = Hyperparams::chidenn(3, 4.0, 3).unwrap();
        let full = Basis1D::new(m.clone(), hyper).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = rng.random_range(0.0..1.0);
            assert_eq!(full.eval(x).unwrap(), eval_basis_at(&m, &hyper, x).unwrap());
        }
    }
}
