use std::sync::Arc;

use super::aos::merge;
use super::{average_into, check_len, check_step, single_step, split_ops, LineSolver, Scheme, SolveCounters, Stepper};
use crate::discretize::OsmosisOperators;
use crate::error::Result;
use crate::solvers::TridiagonalFactor;
use crate::stencil::StencilOperator;

/// Additive-multiplicative splitting: the average of both MOS orderings.
/// Twice the solves of AOS or MOS per step.
pub struct Amos;

impl Scheme for Amos {
    fn name(&self) -> &'static str {
        "amos"
    }

    fn summary(&self) -> &'static str {
        "symmetrised splitting 1/2 [P2 P1 + P1 P2] u with P_n = (I - tau A_n)^-1"
    }

    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>> {
        check_step(tau)?;
        Ok(Box::new(AmosStepper::new(ops, tau)?))
    }
}

struct Branch {
    solve_a1: LineSolver,
    solve_a2: LineSolver,
    inner: Vec<f64>,
    result: Vec<f64>,
    counters: SolveCounters,
}

impl Branch {
    fn new(f1: &Arc<TridiagonalFactor>, f2: &Arc<TridiagonalFactor>, n: usize) -> Self {
        Self {
            solve_a1: LineSolver::shared(f1.clone()),
            solve_a2: LineSolver::shared(f2.clone()),
            inner: vec![0.0; n],
            result: vec![0.0; n],
            counters: SolveCounters::default(),
        }
    }

    /// `P_outer P_inner u`, with `horizontal_first` selecting the inner factor.
    fn run(&mut self, u: &[f64], horizontal_first: bool) -> Result<()> {
        let (first, second) = if horizontal_first {
            (&mut self.solve_a1, &mut self.solve_a2)
        } else {
            (&mut self.solve_a2, &mut self.solve_a1)
        };
        first.solve(u, &mut self.inner, &mut self.counters)?;
        second.solve(&self.inner, &mut self.result, &mut self.counters)
    }
}

struct AmosStepper {
    // (I - τA2)⁻¹(I - τA1)⁻¹ u
    a1_first: Branch,
    // (I - τA1)⁻¹(I - τA2)⁻¹ u
    a2_first: Branch,
}

impl AmosStepper {
    fn new(ops: &OsmosisOperators, tau: f64) -> Result<Self> {
        let f1 = Arc::new(TridiagonalFactor::factor(&ops.horizontal, tau)?);
        let f2 = Arc::new(TridiagonalFactor::factor(&ops.vertical, tau)?);
        let n = ops.full.len();
        Ok(Self {
            a1_first: Branch::new(&f1, &f2, n),
            a2_first: Branch::new(&f1, &f2, n),
        })
    }
}

impl Stepper for AmosStepper {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.a1_first.result.len(), u, out)?;
        let (b1, b2) = (&mut self.a1_first, &mut self.a2_first);
        let (r1, r2) = rayon::join(|| b1.run(u, true), || b2.run(u, false));
        r1?;
        r2?;
        average_into(&self.a1_first.result, &self.a2_first.result, out);
        Ok(())
    }

    fn counters(&self) -> SolveCounters {
        merge(&[self.a1_first.counters, self.a2_first.counters])
    }
}

/// One AMOS step.
pub fn step_amos(u: &[f64], a1: &StencilOperator, a2: &StencilOperator, tau: f64) -> Result<Vec<f64>> {
    check_step(tau)?;
    let mut stepper = AmosStepper::new(&split_ops(a1, a2)?, tau)?;
    single_step(&mut stepper, u)
}
