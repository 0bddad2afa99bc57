//! Closed-form and measured sizes of the two worst-case subproblems.

use robtnep_milp::{MilpModel, VarKind};
use serde::{Deserialize, Serialize};

use crate::model::Network;
use crate::{subproblem_dual, subproblem_kkt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSize {
    pub binaries: usize,
    pub continuous: usize,
    pub equations: usize,
}

impl ModelSize {
    pub fn of(model: &MilpModel) -> Self {
        let binaries = model.variables().iter().filter(|v| v.kind == VarKind::Binary).count();
        Self {
            binaries,
            continuous: model.num_vars() - binaries,
            equations: model.num_constraints(),
        }
    }

    pub fn strictly_smaller_than(&self, other: &ModelSize) -> bool {
        self.binaries < other.binaries && self.continuous < other.continuous && self.equations < other.equations
    }
}

/// Size of the dual subproblem for `n_g` generators, `n_d` demands, `n_b`
/// buses and `n_l` lines.
pub fn predicted_size_dual(ng: usize, nd: usize, nb: usize, nl: usize) -> ModelSize {
    ModelSize {
        binaries: ng + nd,
        continuous: 3 * ng + 5 * nd + 3 * nb + 3 * nl,
        equations: 5 * ng + 10 * nd + nl + nb + 3,
    }
}

/// Size of the KKT subproblem. Requires `n_b >= 1`.
pub fn predicted_size_kkt(ng: usize, nd: usize, nb: usize, nl: usize) -> ModelSize {
    ModelSize {
        binaries: 2 * ng + 2 * nd + 2 * (nb - 1) + 2 * nl,
        continuous: 5 * ng + 7 * nd + 4 * nb + 4 * nl,
        equations: (3 * ng + 5 * nd + 4 * nl + 4 * nb) + (4 * ng + 4 * nd + 4 * nl + 4 * nb - 2),
    }
}

/// Predicted and measured sizes of both subproblems for one network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub dims: [usize; 4],
    pub dual_predicted: ModelSize,
    /// Counted like the closed form: the rows defining the uncertain
    /// parameters from the indicators are left out.
    pub dual_measured: ModelSize,
    /// Every row of the built model.
    pub dual_raw: ModelSize,
    pub kkt_predicted: ModelSize,
    pub kkt_measured: ModelSize,
}

pub fn size_report(net: &Network) -> SizeReport {
    let d = net.dimensions();
    let plan = vec![false; net.num_candidates()];
    let dual_raw = ModelSize::of(&subproblem_dual::build_dual_subproblem(net, &plan));
    let dual_measured = ModelSize {
        equations: dual_raw.equations - subproblem_dual::definition_rows(net),
        ..dual_raw
    };
    let kkt_measured = ModelSize::of(&subproblem_kkt::build_kkt_subproblem(net, &plan));
    SizeReport {
        dims: [d.generators, d.demands, d.buses, d.lines],
        dual_predicted: predicted_size_dual(d.generators, d.demands, d.buses, d.lines),
        dual_measured,
        dual_raw,
        kkt_predicted: predicted_size_kkt(d.generators, d.demands, d.buses, d.lines),
        kkt_measured,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let s = |b, c, e| ModelSize { binaries: b, continuous: c, equations: e };
        assert_eq!(predicted_size_dual(3, 5, 6, 45), s(8, 187, 119));
        assert_eq!(predicted_size_dual(10, 17, 24, 123), s(27, 556, 370));
        assert_eq!(predicted_size_dual(54, 91, 118, 247), s(145, 1712, 1548));
        assert_eq!(predicted_size_kkt(10, 17, 24, 123), s(346, 757, 1397));
        assert_eq!(predicted_size_kkt(54, 91, 118, 247), s(1018, 2367, 4115));
        assert_eq!(predicted_size_kkt(3, 5, 6, 45), s(116, 254, 472));
    }
}
