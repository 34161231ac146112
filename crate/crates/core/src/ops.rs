use serde::{Deserialize, Serialize};

/// Operation tallies used to compare prediction costs without a wall clock.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    /// Scalar additions of weights (primal dot products).
    pub adds: u64,
    /// Scalar multiplications.
    pub mults: u64,
    /// Closed-form or isolation kernel evaluations.
    pub kernel_evals: u64,
    /// Point-to-cell assignments.
    pub assigns: u64,
}

impl OpCounter {
    pub fn total(&self) -> u64 {
        self.adds + self.mults + self.kernel_evals + self.assigns
    }

    pub fn saturating_sub(&self, earlier: &OpCounter) -> OpCounter {
        OpCounter {
            adds: self.adds.saturating_sub(earlier.adds),
            mults: self.mults.saturating_sub(earlier.mults),
            kernel_evals: self.kernel_evals.saturating_sub(earlier.kernel_evals),
            assigns: self.assigns.saturating_sub(earlier.assigns),
        }
    }
}

impl std::ops::AddAssign for OpCounter {
    fn add_assign(&mut self, o: OpCounter) {
        self.adds += o.adds;
        self.mults += o.mults;
        self.kernel_evals += o.kernel_evals;
        self.assigns += o.assigns;
    }
}

impl std::ops::Mul<u64> for OpCounter {
    type Output = OpCounter;

    fn mul(self, k: u64) -> OpCounter {
        OpCounter {
            adds: self.adds * k,
            mults: self.mults * k,
            kernel_evals: self.kernel_evals * k,
            assigns: self.assigns * k,
        }
    }
}
