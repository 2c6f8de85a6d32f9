use super::{check_len, check_step, single_step, Scheme, SolveCounters, Stepper};
use crate::discretize::OsmosisOperators;
use crate::error::Result;
use crate::solvers::BandedLu;
use crate::stencil::StencilOperator;

/// Backward Euler on the full (non-split) operator, solved with a banded LU
/// factored once per step size.
pub struct ImplicitFull;

impl Scheme for ImplicitFull {
    fn name(&self) -> &'static str {
        "implicit"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["implicit-full"]
    }

    fn summary(&self) -> &'static str {
        "backward Euler (I - tau A)^-1 u, banded LU of the penta-diagonal matrix"
    }

    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>> {
        check_step(tau)?;
        Ok(Box::new(ImplicitStepper {
            lu: BandedLu::factor(&ops.full, tau)?,
            len: ops.full.len(),
            counters: SolveCounters::default(),
        }))
    }
}

struct ImplicitStepper {
    lu: BandedLu,
    len: usize,
    counters: SolveCounters,
}

impl Stepper for ImplicitStepper {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.len, u, out)?;
        self.lu.solve_into(u, out)?;
        self.counters.banded_solves += 1;
        Ok(())
    }

    fn counters(&self) -> SolveCounters {
        self.counters
    }
}

/// One backward Euler step: solves `(I - tau A) u' = u`.
pub fn step_implicit_full(u: &[f64], a: &StencilOperator, tau: f64) -> Result<Vec<f64>> {
    check_step(tau)?;
    let mut stepper = ImplicitStepper {
        lu: BandedLu::factor(a, tau)?,
        len: a.len(),
        counters: SolveCounters::default(),
    };
    single_step(&mut stepper, u)
}
