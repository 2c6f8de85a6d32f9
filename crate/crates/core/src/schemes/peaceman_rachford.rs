use log::warn;

use super::{check_len, check_step, single_step, split_ops, LineSolver, Scheme, SolveCounters, Stepper};
use crate::discretize::OsmosisOperators;
use crate::error::Result;
use crate::stencil::StencilOperator;

/// Peaceman-Rachford ADI. Second order in time; keeps positivity only below
/// [`OsmosisOperators::pr_stability_bound`].
pub struct PeacemanRachford;

impl Scheme for PeacemanRachford {
    fn name(&self) -> &'static str {
        "pr"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["p-r", "peaceman-rachford", "adi"]
    }

    fn summary(&self) -> &'static str {
        "Peaceman-Rachford ADI, alternating half steps"
    }

    fn prepare(&self, ops: &OsmosisOperators, tau: f64) -> Result<Box<dyn Stepper>> {
        check_step(tau)?;
        let bound = ops.pr_stability_bound();
        if tau >= bound {
            warn!("P-R step {tau} is not below the stability bound {bound:.4e}; positivity is not guaranteed");
        }
        Ok(Box::new(PrStepper::new(ops, tau)?))
    }
}

struct PrStepper {
    a1: StencilOperator,
    a2: StencilOperator,
    half_tau: f64,
    solve_a1: LineSolver,
    solve_a2: LineSolver,
    rhs: Vec<f64>,
    half: Vec<f64>,
    counters: SolveCounters,
}

impl PrStepper {
    fn new(ops: &OsmosisOperators, tau: f64) -> Result<Self> {
        let half_tau = 0.5 * tau;
        let n = ops.full.len();
        Ok(Self {
            a1: ops.horizontal.clone(),
            a2: ops.vertical.clone(),
            half_tau,
            solve_a1: LineSolver::new(&ops.horizontal, half_tau)?,
            solve_a2: LineSolver::new(&ops.vertical, half_tau)?,
            rhs: vec![0.0; n],
            half: vec![0.0; n],
            counters: SolveCounters::default(),
        })
    }
}

impl Stepper for PrStepper {
    fn step(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        check_len(self.rhs.len(), u, out)?;
        // (I - τ/2 A2) u^{k+1/2} = (I + τ/2 A1) u^k
        self.a1.apply_shifted(u, self.half_tau, &mut self.rhs)?;
        self.solve_a2.solve(&self.rhs, &mut self.half, &mut self.counters)?;
        // (I - τ/2 A1) u^{k+1} = (I + τ/2 A2) u^{k+1/2}
        self.a2.apply_shifted(&self.half, self.half_tau, &mut self.rhs)?;
        self.solve_a1.solve(&self.rhs, out, &mut self.counters)
    }

    fn counters(&self) -> SolveCounters {
        self.counters
    }
}

/// One Peaceman-Rachford step.
pub fn step_pr(u: &[f64], a1: &StencilOperator, a2: &StencilOperator, tau: f64) -> Result<Vec<f64>> {
    check_step(tau)?;
    let mut stepper = PrStepper::new(&split_ops(a1, a2)?, tau)?;
    single_step(&mut stepper, u)
}
