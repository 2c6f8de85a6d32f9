//! Time-stepping schemes for `u' = A u`, each behind the [`Scheme`] trait and
//! looked up by name in a [`SchemeRegistry`].
//!
//! | name       | update                                                        |
//! |------------|---------------------------------------------------------------|
//! | `explicit` | `u + τ A u`                                                   |
//! | `implicit` | `(I − τ A)⁻¹ u` (banded LU of the penta-diagonal matrix)      |
//! | `pr`       | Peaceman-Rachford: half steps `τ/2`, A2 implicit then A1      |
//! | `aos`      | `½ Σₙ (I − 2τ Aₙ)⁻¹ u`                                        |
//! | `mos`      | `(I − τ A1)⁻¹ (I − τ A2)⁻¹ u`                                 |
//! | `amos`     | `½ [(I − τ A2)⁻¹ (I − τ A1)⁻¹ + (I − τ A1)⁻¹ (I − τ A2)⁻¹] u` |

mod amos;
mod aos;
mod explicit;
mod implicit;
mod mos;
mod peaceman_rachford;

use std::sync::{Arc, OnceLock};

pub use amos::{step_amos, Amos};
pub use aos::{step_aos, Aos};
pub use explicit::{step_explicit, Explicit};
pub use implicit::{step_implicit_full, ImplicitFull};
pub use mos::{step_mos, Mos};
pub use peaceman_rachford::{step_pr, PeacemanRachford};

use crate::discretize::OsmosisOperators;
use crate::error::{Error, Result};
use crate::solvers::TridiagonalFactor;
use crate::stencil::StencilOperator;

/// Linear-solve work done by a stepper.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveCounters {
    /// Full-field tridiagonal solve passes (one per split operator inverse).
    pub passes: u64,
    /// Individual tridiagonal line systems solved.
    pub line_solves: u64,
    /// Penta-diagonal banded solves.
    pub banded_solves: u64,
}

/// A time integrator for the osmosis system.
pub trait Scheme: Send + Sync {
    fn name(&self) -> &'static str;

    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn summary(&self) -> &'static str;

    /// Builds a stepper for a fixed step `tau`, factoring whatever the scheme
    /// needs once up front.
    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>>;
}

/// One prepared scheme instance: maps `u^k` to `u^{k+1}`.
pub trait Stepper: Send {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()>;

    fn counters(&self) -> SolveCounters;
}

/// Schemes addressable by name or alias.
pub struct SchemeRegistry {
    schemes: Vec<Box<dyn Scheme>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        Self { schemes: Vec::new() }
    }

    /// All built-in schemes.
    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        let builtin: [Box<dyn Scheme>; 6] = [
            Box::new(Explicit),
            Box::new(ImplicitFull),
            Box::new(PeacemanRachford),
            Box::new(Aos),
            Box::new(Mos),
            Box::new(Amos),
        ];
        for scheme in builtin {
            registry.register(scheme).expect("built-in names are unique");
        }
        registry
    }

    pub fn register(&mut self, scheme: Box<dyn Scheme>) -> Result<()> {
        let taken = std::iter::once(scheme.name())
            .chain(scheme.aliases().iter().copied())
            .find(|n| self.lookup(n).is_some());
        if let Some(name) = taken {
            return Err(Error::InvalidConfig(format!(
                "scheme name '{name}' is already registered"
            )));
        }
        self.schemes.push(scheme);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&dyn Scheme> {
        self.lookup(name).ok_or_else(|| Error::UnknownScheme {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Scheme> {
        self.schemes.iter().map(|s| s.as_ref())
    }

    fn lookup(&self, name: &str) -> Option<&dyn Scheme> {
        let name = name.trim().to_ascii_lowercase();
        self.schemes
            .iter()
            .find(|s| s.name() == name || s.aliases().contains(&name.as_str()))
            .map(|s| s.as_ref())
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Shared registry of the built-in schemes.
pub fn registry() -> &'static SchemeRegistry {
    static REGISTRY: OnceLock<SchemeRegistry> = OnceLock::new();
    REGISTRY.get_or_init(SchemeRegistry::builtin)
}

/// A tridiagonal factor with its own transpose buffer and solve counting.
struct LineSolver {
    factor: Arc<TridiagonalFactor>,
    scratch: Vec<f64>,
}

impl LineSolver {
    fn new(op: &StencilOperator, scaled_tau: f64) -> Result<Self> {
        Ok(Self::shared(Arc::new(TridiagonalFactor::factor(op, scaled_tau)?)))
    }

    fn shared(factor: Arc<TridiagonalFactor>) -> Self {
        Self {
            factor,
            scratch: Vec::new(),
        }
    }

    fn solve(&mut self, rhs: &[f64], out: &mut [f64], counters: &mut SolveCounters) -> Result<()> {
        self.factor.solve_into(rhs, out, &mut self.scratch)?;
        counters.passes += 1;
        counters.line_solves += self.factor.lines() as u64;
        Ok(())
    }
}

fn check_step(tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("time step must be positive, got {tau}")))
    }
}

fn check_len(expected: usize, u: &[f64], out: &[f64]) -> Result<()> {
    if u.len() != expected || out.len() != expected {
        return Err(Error::ShapeMismatch {
            expected: format!("{expected} values"),
            found: format!("{} in, {} out", u.len(), out.len()),
        });
    }
    Ok(())
}

/// `out = (a + b) / 2`, elementwise in index order.
fn average_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = 0.5 * (x + y);
    }
}

/// Wraps the split operators of a single step call.
fn split_ops(a1: &StencilOperator, a2: &StencilOperator) -> Result<OsmosisOperators> {
    if a1.dims() != a2.dims() {
        return Err(Error::shape(a1.dims(), a2.dims()));
    }
    Ok(OsmosisOperators {
        full: a1.sum(a2)?,
        horizontal: a1.clone(),
        vertical: a2.clone(),
    })
}

fn single_step(stepper: &mut dyn Stepper, u: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; u.len()];
    stepper.step(u, &mut out)?;
    Ok(out)
}
