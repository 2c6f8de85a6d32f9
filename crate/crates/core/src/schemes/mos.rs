use super::{check_len, check_step, single_step, split_ops, LineSolver, Scheme, SolveCounters, Stepper};
use crate::discretize::OsmosisOperators;
use crate::error::Result;
use crate::stencil::StencilOperator;

/// Multiplicative operator splitting. The vertical solve is applied first,
/// then the horizontal one.
pub struct Mos;

impl Scheme for Mos {
    fn name(&self) -> &'static str {
        "mos"
    }

    fn summary(&self) -> &'static str {
        "multiplicative splitting (I - tau A1)^-1 (I - tau A2)^-1 u"
    }

    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>> {
        check_step(tau)?;
        Ok(Box::new(MosStepper::new(ops, tau)?))
    }
}

struct MosStepper {
    solve_a1: LineSolver,
    solve_a2: LineSolver,
    inner: Vec<f64>,
    counters: SolveCounters,
}

impl MosStepper {
    fn new(ops: &OsmosisOperators, tau: f64) -> Result<Self> {
        Ok(Self {
            solve_a1: LineSolver::new(&ops.horizontal, tau)?,
            solve_a2: LineSolver::new(&ops.vertical, tau)?,
            inner: vec![0.0; ops.full.len()],
            counters: SolveCounters::default(),
        })
    }
}

impl Stepper for MosStepper {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.inner.len(), u, out)?;
        self.solve_a2.solve(u, &mut self.inner, &mut self.counters)?;
        self.solve_a1.solve(&self.inner, out, &mut self.counters)
    }

    fn counters(&self) -> SolveCounters {
        self.counters
    }
}

/// One MOS step.
pub fn step_mos(u: &[f64], a1: &StencilOperator, a2: &StencilOperator, tau: f64) -> Result<Vec<f64>> {
    check_step(tau)?;
    let mut stepper = MosStepper::new(&split_ops(a1, a2)?, tau)?;
    single_step(&mut stepper, u)
}
