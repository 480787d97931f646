//! Uniform 1D meshes and Gauss–Legendre rules on the parent element [-1, 1].

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Uniform 1D mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh1D<T> {
    x_min: T,
    x_max: T,
    n_elem: usize,
    nodes: Vec<T>,
}

impl<T: Real> Mesh1D<T> {
    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n_elem(&self) -> usize {
        self.n_elem
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elem + 1
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> T {
        self.nodes[i]
    }

    /// Element size.
    pub fn h(&self) -> T {
        (self.x_max - self.x_min) / T::from_usize_lossy(self.n_elem)
    }

    pub fn length(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Element containing `x` together with the parent coordinate of `x` in it.
    /// Points on an interior node belong to the element on their right.
    pub fn locate(&self, x: T) -> Option<(usize, T)> {
        if !self.contains(x) {
            return None;
        }
        let h = self.h();
        let t = ((x - self.x_min) / h).floor();
        let e = t.to_usize().unwrap_or(0).min(self.n_elem - 1);
        let left = self.nodes[e];
        let xi = (T::lit(2.0) * (x - left) / h - T::one()).max(-T::one()).min(T::one());
        Some((e, xi))
    }
}

/// Builds the uniform mesh of `n_elem` elements on `[x_min, x_max]`.
pub fn uniform_mesh<T: Real>(x_min: T, x_max: T, n_elem: usize) -> Result<Mesh1D<T>> {
    if n_elem == 0 {
        return Err(invalid("element count must be positive"));
    }
    if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(invalid(format!(
            "mesh bounds must satisfy x_min < x_max (got {x_min}, {x_max})"
        )));
    }
    let n = T::from_usize_lossy(n_elem);
    let len = x_max - x_min;
    let mut nodes: Vec<T> = (0..=n_elem)
        .map(|i| x_min + len * (T::from_usize_lossy(i) / n))
        .collect();
    nodes[n_elem] = x_max;
    Ok(Mesh1D {
        x_min,
        x_max,
        n_elem,
        nodes,
    })
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule<T> {
    points: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> QuadRule<T> {
    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `pieces` copies of this rule on equal sub-intervals of [-1, 1].
    pub fn composite(&self, pieces: usize) -> Self {
        let pieces = pieces.max(1);
        let width = T::lit(2.0) / T::from_usize_lossy(pieces);
        let half = width / T::lit(2.0);
        let mut points = Vec::with_capacity(self.len() * pieces);
        let mut weights = Vec::with_capacity(self.len() * pieces);
        for k in 0..pieces {
            let left = -T::one() + width * T::from_usize_lossy(k);
            for (&p, &w) in self.points.iter().zip(&self.weights) {
                points.push(left + (p + T::one()) * half);
                weights.push(w * half);
            }
        }
        Self { points, weights }
    }

    /// Integrates `f` over [-1, 1].
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

pub const MAX_GAUSS_POINTS: usize = 10;

// Non-negative abscissae with their weights; the rule is symmetric.
const GAUSS_HALF: [&[(f64, f64)]; MAX_GAUSS_POINTS] = [
    &[(0.0, 2.0)],
    &[(0.5773502691896257, 1.0)],
    &[(0.0, 0.8888888888888888), (0.7745966692414834, 0.5555555555555556)],
    &[
        (0.33998104358485626, 0.6521451548625461),
        (0.8611363115940526, 0.34785484513745385),
    ],
    &[
        (0.0, 0.5688888888888889),
        (0.5384693101056831, 0.47862867049936647),
        (0.906179845938664, 0.23692688505618908),
    ],
    &[
        (0.2386191860831969, 0.46791393457269104),
        (0.6612093864662645, 0.3607615730481386),
        (0.932469514203152, 0.17132449237917036),
    ],
    &[
        (0.0, 0.4179591836734694),
        (0.4058451513773972, 0.3818300505051189),
        (0.7415311855993945, 0.27970539148927664),
        (0.9491079123427585, 0.1294849661688697),
    ],
    &[
        (0.1834346424956498, 0.362683783378362),
        (0.525532409916329, 0.31370664587788727),
        (0.7966664774136267, 0.22238103445337448),
        (0.9602898564975363, 0.10122853629037626),
    ],
    &[
        (0.0, 0.3302393550012598),
        (0.3242534234038089, 0.31234707704000286),
        (0.6133714327005904, 0.26061069640293544),
        (0.8360311073266358, 0.1806481606948574),
        (0.9681602395076261, 0.08127438836157441),
    ],
    &[
        (0.14887433898163122, 0.29552422471475287),
        (0.4333953941292472, 0.26926671930999635),
        (0.6794095682990244, 0.21908636251598204),
        (0.8650633666889845, 0.1494513491505806),
        (0.9739065285171717, 0.06667134430868814),
    ],
];

/// Gauss–Legendre rule with `n_points` points, `1 <= n_points <= 10`.
pub fn gauss_rule<T: Real>(n_points: usize) -> Result<QuadRule<T>> {
    if !(1..=MAX_GAUSS_POINTS).contains(&n_points) {
        return Err(invalid(format!(
            "Gauss rule order must lie in 1..={MAX_GAUSS_POINTS} (got {n_points})"
        )));
    }
    let half = GAUSS_HALF[n_points - 1];
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n_points);
    for &(p, w) in half.iter().rev() {
        if p > 0.0 {
            pairs.push((-p, w));
        }
    }
    pairs.extend_from_slice(half);
    Ok(QuadRule {
        points: pairs.iter().map(|&(p, _)| T::lit(p)).collect(),
        weights: pairs.iter().map(|&(_, w)| T::lit(w)).collect(),
    })
}

/// Maps parent coordinate `xi` of element `e` to `(x, dx/dxi)`.
pub fn map_to_element<T: Real>(mesh: &Mesh1D<T>, e: usize, xi: T) -> Result<(T, T)> {
    if e >= mesh.n_elem() {
        return Err(invalid(format!(
            "element index {e} out of range (mesh has {} elements)",
            mesh.n_elem()
        )));
    }
    let half_h = mesh.h() / T::lit(2.0);
    Ok((mesh.nodes[e] + (xi + T::one()) * half_h, half_h))
}
