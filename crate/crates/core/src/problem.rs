//! Weak forms as sums of Kronecker-separable bilinear terms plus a separable source.

use crate::basis::Hyperparams;
use crate::error::{invalid, Result};
use crate::mesh::uniform_mesh;
use crate::operators::{ConstraintSet, OperatorKind};
use crate::scalar::Real;
use crate::separated::DimSpec;

/// `coeff · (Op_1 ⊗ Op_2 ⊗ … ⊗ Op_I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilinearTerm<T> {
    pub coeff: T,
    pub ops: Vec<OperatorKind>,
}

impl<T> BilinearTerm<T> {
    pub fn new(coeff: T, ops: impl Into<Vec<OperatorKind>>) -> Self {
        Self { coeff, ops: ops.into() }
    }
}

/// One univariate factor of a source term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceFactor<T> {
    Constant(T),
    /// `exp(-rate · (x - center)²)`
    Gaussian {
        center: T,
        rate: T,
    },
    /// `H(x - at)` with `H(0) = 1/2`.
    Step {
        at: T,
    },
    /// `sin(wavenumber · x)`
    Sine {
        wavenumber: T,
    },
}

impl<T: Real> SourceFactor<T> {
    pub fn eval(&self, x: T) -> T {
        match *self {
            SourceFactor::Constant(c) => c,
            SourceFactor::Gaussian { center, rate } => (-rate * (x - center) * (x - center)).exp(),
            SourceFactor::Step { at } => {
                if x > at {
                    T::one()
                } else if x < at {
                    T::zero()
                } else {
                    T::lit(0.5)
                }
            }
            SourceFactor::Sine { wavenumber } => (wavenumber * x).sin(),
        }
    }

    /// Points where the factor is not smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        match *self {
            SourceFactor::Step { at } => vec![at],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SourceTerm<T> {
    pub coeff: T,
    pub factors: Vec<SourceFactor<T>>,
}

impl<T: Real> SourceTerm<T> {
    pub fn eval(&self, point: &[T]) -> T {
        self.factors
            .iter()
            .zip(point)
            .fold(self.coeff, |acc, (f, &x)| acc * f.eval(x))
    }
}

/// `b(p) = Σ_t coeff_t Π_i f_{t,i}(p_i)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SeparableSource<T> {
    pub terms: Vec<SourceTerm<T>>,
}

impl<T: Real> SeparableSource<T> {
    pub fn eval(&self, point: &[T]) -> T {
        self.terms.iter().map(|t| t.eval(point)).sum()
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeakProblem<T> {
    pub name: String,
    pub dims: Vec<DimSpec<T>>,
    pub terms: Vec<BilinearTerm<T>>,
    pub source: SeparableSource<T>,
}

impl<T: Real> WeakProblem<T> {
    pub fn new(
        name: impl Into<String>,
        dims: Vec<DimSpec<T>>,
        terms: Vec<BilinearTerm<T>>,
        source: SeparableSource<T>,
    ) -> Result<Self> {
        if dims.is_empty() {
            return Err(invalid("a problem needs at least one dimension"));
        }
        if terms.is_empty() {
            return Err(invalid("a problem needs at least one bilinear term"));
        }
        if let Some(t) = terms.iter().find(|t| t.ops.len() != dims.len()) {
            return Err(invalid(format!(
                "bilinear term has {} operators for {} dimensions",
                t.ops.len(),
                dims.len()
            )));
        }
        if source.terms.iter().any(|t| t.factors.len() != dims.len()) {
            return Err(invalid("every source term needs one factor per dimension"));
        }
        if let Some(d) = dims.iter().find(|d| d.constraints.n_free() == 0) {
            return Err(invalid(format!("dimension {:?} has no free nodes", d.label)));
        }
        Ok(Self {
            name: name.into(),
            dims,
            terms,
            source,
        })
    }

    pub fn dim_count(&self) -> usize {
        self.dims.len()
    }

    /// Whether dimension `d` references `kind` in any term.
    pub fn uses(&self, d: usize, kind: OperatorKind) -> bool {
        self.terms.iter().any(|t| t.ops[d] == kind)
    }

    /// Copy with every dimension's hyperparameters replaced.
    pub fn with_hyper(&self, hyper: Hyperparams<T>) -> Result<Self> {
        let mut p = self.clone();
        hyper.validate()?;
        for d in &mut p.dims {
            d.hyper = hyper;
        }
        Ok(p)
    }
}

fn check_elems(n_elem: &[usize]) -> Result<()> {
    if let Some(&n) = n_elem.iter().find(|&&n| n < 2) {
        return Err(invalid(format!("element count must be at least 2, got {n}")));
    }
    Ok(())
}

fn poisson_dims<T: Real>(n_elem: [usize; 2], hyper: Hyperparams<T>) -> Result<Vec<DimSpec<T>>> {
    check_elems(&n_elem)?;
    ["x", "y"]
        .iter()
        .zip(n_elem)
        .map(|(label, n)| {
            let mesh = uniform_mesh(T::zero(), T::lit(10.0), n)?;
            DimSpec::new(*label, mesh, hyper, ConstraintSet::both_ends(n + 1))
        })
        .collect()
}

fn laplacian_terms<T: Real>() -> Vec<BilinearTerm<T>> {
    use OperatorKind::*;
    vec![
        BilinearTerm::new(T::one(), [Stiff, Mass]),
        BilinearTerm::new(T::one(), [Mass, Stiff]),
    ]
}

/// `-Δu = e^{-10(x-5)² - 10(y-5)²}` on `[0,10]²`, `u = 0` on the boundary.
pub fn poisson2d_problem<T: Real>(n_elem: [usize; 2], hyper: Hyperparams<T>) -> Result<WeakProblem<T>> {
    let g = SourceFactor::Gaussian {
        center: T::lit(5.0),
        rate: T::lit(10.0),
    };
    let source = SeparableSource {
        terms: vec![SourceTerm {
            coeff: T::one(),
            factors: vec![g, g],
        }],
    };
    WeakProblem::new("poisson2d", poisson_dims(n_elem, hyper)?, laplacian_terms(), source)
}

/// Same operator with the load `2(π/10)² sin(πx/10) sin(πy/10)`, whose exact
/// solution is `sin(πx/10) sin(πy/10)`.
pub fn manufactured_poisson_problem<T: Real>(n_elem: [usize; 2], hyper: Hyperparams<T>) -> Result<WeakProblem<T>> {
    let k = T::lit(std::f64::consts::PI / 10.0);
    let s = SourceFactor::Sine { wavenumber: k };
    let source = SeparableSource {
        terms: vec![SourceTerm {
            coeff: T::lit(2.0) * k * k,
            factors: vec![s, s],
        }],
    };
    WeakProblem::new(
        "poisson2d-manufactured",
        poisson_dims(n_elem, hyper)?,
        laplacian_terms(),
        source,
    )
}

pub fn manufactured_poisson_exact(x: f64, y: f64) -> f64 {
    let k = std::f64::consts::PI / 10.0;
    (k * x).sin() * (k * y).sin()
}

pub fn manufactured_poisson_gradient(x: f64, y: f64) -> [f64; 2] {
    let k = std::f64::consts::PI / 10.0;
    [k * (k * x).cos() * (k * y).sin(), k * (k * x).sin() * (k * y).cos()]
}

/// Material constants of the transient diffusion benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionConstants {
    pub rho: f64,
    pub c_p: f64,
    pub k: f64,
    pub source_amplitude: f64,
    pub side: f64,
    pub t_end: f64,
    pub step_at: f64,
    pub gaussian_radius: f64,
    pub centers: [(f64, f64); 3],
}

impl Default for DiffusionConstants {
    fn default() -> Self {
        Self {
            rho: 1000.0,
            c_p: 367.8,
            k: 5.836,
            source_amplitude: 2.55e11,
            side: 0.01,
            t_end: 0.5,
            step_at: 9.5e-3,
            gaussian_radius: 5e-4,
            centers: [(2e-3, -2e-3), (2e-3, 2e-3), (-2e-3, 2e-3)],
        }
    }
}

impl DiffusionConstants {
    /// Thermal diffusivity `k / (ρ c_p)`.
    pub fn alpha(&self) -> f64 {
        self.k / (self.rho * self.c_p)
    }

    pub fn heat_capacity(&self) -> f64 {
        self.rho * self.c_p
    }

    /// Rate of the Gaussian factors, `2 / r²`.
    pub fn gaussian_rate(&self) -> f64 {
        2.0 / (self.gaussian_radius * self.gaussian_radius)
    }

    /// Source as separable terms in `(x, y, z, t)`.
    pub fn source<T: Real>(&self, coeff_sign: f64) -> SeparableSource<T> {
        let rate = T::lit(self.gaussian_rate());
        let terms = self
            .centers
            .iter()
            .map(|&(cx, cy)| SourceTerm {
                coeff: T::lit(coeff_sign * self.source_amplitude),
                factors: vec![
                    SourceFactor::Gaussian {
                        center: T::lit(cx),
                        rate,
                    },
                    SourceFactor::Gaussian {
                        center: T::lit(cy),
                        rate,
                    },
                    SourceFactor::Step {
                        at: T::lit(self.step_at),
                    },
                    SourceFactor::Constant(T::one()),
                ],
            })
            .collect();
        SeparableSource { terms }
    }

    /// Spatial part of the source (the time factor is constant).
    pub fn spatial_source(&self, x: f64, y: f64, z: f64) -> f64 {
        self.source::<f64>(1.0).eval(&[x, y, z, 0.0])
    }
}

/// Sign convention of the diffusion equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DiffusionSign {
    /// `ρ c_p u̇ - kΔu = b`
    #[default]
    Corrected,
    /// `ρ c_p u̇ + kΔu + b = 0`, anti-diffusive.
    Verbatim,
}

/// Space-time heat equation on `[0, side]³ × [0, t_end]`, zero on the
/// spatial faces and at `t = 0`.
pub fn diffusion_spacetime_problem<T: Real>(
    n_elem: [usize; 4],
    hyper: Hyperparams<T>,
    constants: &DiffusionConstants,
    sign: DiffusionSign,
) -> Result<WeakProblem<T>> {
    use OperatorKind::*;
    check_elems(&n_elem)?;
    let mut dims = Vec::with_capacity(4);
    for (d, (label, n)) in ["x", "y", "z", "t"].iter().zip(n_elem).enumerate() {
        let (hi, constraints) = if d < 3 {
            (constants.side, ConstraintSet::both_ends(n + 1))
        } else {
            (constants.t_end, ConstraintSet::new(n + 1, [0])?)
        };
        let mesh = uniform_mesh(T::zero(), T::lit(hi), n)?;
        dims.push(DimSpec::new(*label, mesh, hyper, constraints)?);
    }
    let (k, source_sign) = match sign {
        DiffusionSign::Corrected => (constants.k, 1.0),
        DiffusionSign::Verbatim => (-constants.k, -1.0),
    };
    let k = T::lit(k);
    let terms = vec![
        BilinearTerm::new(T::lit(constants.heat_capacity()), [Mass, Mass, Mass, Grad]),
        BilinearTerm::new(k, [Stiff, Mass, Mass, Mass]),
        BilinearTerm::new(k, [Mass, Stiff, Mass, Mass]),
        BilinearTerm::new(k, [Mass, Mass, Stiff, Mass]),
    ];
    WeakProblem::new("diffusion4d", dims, terms, constants.source(source_sign))
}
