use super::{average_into, check_len, check_step, single_step, split_ops, LineSolver, Scheme, SolveCounters, Stepper};
use crate::discretize::OsmosisOperators;
use crate::error::Result;
use crate::stencil::StencilOperator;

/// Additive operator splitting: average of the two one-dimensional implicit
/// steps with doubled step size.
pub struct Aos;

impl Scheme for Aos {
    fn name(&self) -> &'static str {
        "aos"
    }

    fn summary(&self) -> &'static str {
        "additive splitting 1/2 sum_n (I - 2 tau A_n)^-1 u"
    }

    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>> {
        check_step(tau)?;
        Ok(Box::new(AosStepper::new(ops, tau)?))
    }
}

struct AosStepper {
    solve_a1: LineSolver,
    solve_a2: LineSolver,
    branch1: Vec<f64>,
    branch2: Vec<f64>,
    counters: [SolveCounters; 2],
}

impl AosStepper {
    fn new(ops: &OsmosisOperators, tau: f64) -> Result<Self> {
        let n = ops.full.len();
        Ok(Self {
            solve_a1: LineSolver::new(&ops.horizontal, 2.0 * tau)?,
            solve_a2: LineSolver::new(&ops.vertical, 2.0 * tau)?,
            branch1: vec![0.0; n],
            branch2: vec![0.0; n],
            counters: Default::default(),
        })
    }
}

impl Stepper for AosStepper {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.branch1.len(), u, out)?;
        let [c1, c2] = &mut self.counters;
        let (r1, r2) = rayon::join(
            || self.solve_a1.solve(u, &mut self.branch1, c1),
            || self.solve_a2.solve(u, &mut self.branch2, c2),
        );
        r1?;
        r2?;
        average_into(&self.branch1, &self.branch2, out);
        Ok(())
    }

    fn counters(&self) -> SolveCounters {
        merge(&self.counters)
    }
}

pub(super) fn merge(parts: &[SolveCounters]) -> SolveCounters {
    parts.iter().fold(SolveCounters::default(), |acc, c| SolveCounters {
        passes: acc.passes + c.passes,
        line_solves: acc.line_solves + c.line_solves,
        banded_solves: acc.banded_solves + c.banded_solves,
    })
}

/// One AOS step.
pub fn step_aos(u: &[f64], a1: &StencilOperator, a2: &StencilOperator, tau: f64) -> Result<Vec<f64>> {
    check_step(tau)?;
    let mut stepper = AosStepper::new(&split_ops(a1, a2)?, tau)?;
    single_step(&mut stepper, u)
}
