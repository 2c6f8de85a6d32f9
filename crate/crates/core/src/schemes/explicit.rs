use super::{check_len, check_step, single_step, Scheme, SolveCounters, Stepper};
use crate::discretize::OsmosisOperators;
use crate::error::Result;
use crate::stencil::StencilOperator;

/// Forward Euler on the full operator. Only stable for small steps.
pub struct Explicit;

impl Scheme for Explicit {
    fn name(&self) -> &'static str {
        "explicit"
    }

    fn summary(&self) -> &'static str {
        "forward Euler u + tau A u"
    }

    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>> {
        check_step(tau)?;
        Ok(Box::new(ExplicitStepper {
            op: ops.full.clone(),
            tau,
        }))
    }
}

struct ExplicitStepper {
    op: StencilOperator,
    tau: f64,
}

impl Stepper for ExplicitStepper {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.op.len(), u, out)?;
        self.op.apply_shifted(u, self.tau, out)
    }

    fn counters(&self) -> SolveCounters {
        SolveCounters::default()
    }
}

/// One forward Euler step `u + tau A u`.
pub fn step_explicit(u: &[f64], a: &StencilOperator, tau: f64) -> Result<Vec<f64>> {
    check_step(tau)?;
    let mut stepper = ExplicitStepper { op: a.clone(), tau };
    single_step(&mut stepper, u)
}
