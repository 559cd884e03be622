use serde::Serialize;

use crate::algebra::AlgebraTensor;
use crate::moment::CriticalReport;

use super::{
    containment_residual, eigenspace_split, residual_to_span, substructures, StructureError,
    DER_TOL,
};

/// Containment tolerance for the clause tests.
const CLAUSE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct ClauseResult {
    pub clause: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureChecks {
    pub clauses: Vec<ClauseResult>,
}

impl StructureChecks {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }
}

fn clause(name: &str, residual: f64) -> ClauseResult {
    ClauseResult {
        clause: name.to_string(),
        passed: residual <= CLAUSE_TOL,
        residual,
    }
}

/// Checks, for a critical `μ` with `M_μ = cI + D`, with `𝔄₋, 𝔄₀, 𝔄₊` the
/// eigenspaces of `D`:
/// (i) `ann ⊆ 𝔄₊`, (ii) `𝔄₊ ⊆ N`, (iii) `𝔄₋ ⊆ C ∩ N` with no basis vector of
/// `𝔄₋` in `ann`, (iv) `(L_A − R_A)* ∈ Der` for `A` in a basis of `𝔄₀`.
pub fn structure_checks(mu: &AlgebraTensor, report: &CriticalReport) -> Result<StructureChecks, StructureError> {
    if !report.critical {
        return Err(StructureError::NotCritical(report.residual));
    }
    let subs = substructures(mu, DER_TOL)?;
    let split = eigenspace_split(&report.d, CLAUSE_TOL * report.c.abs())?;

    let c1 = containment_residual(&split.plus, &subs.annihilator);
    let c2 = containment_residual(&subs.radical, &split.plus);

    let mut c3 = containment_residual(&subs.center, &split.minus).max(containment_residual(&subs.radical, &split.minus));
    if split.minus.iter().any(|v| residual_to_span(&subs.annihilator, v) <= CLAUSE_TOL) {
        c3 = f64::INFINITY;
    }

    let nm = mu.norm();
    let mut c4: f64 = 0.0;
    for a in &split.zero {
        let x = (&mu.left_mult(a) - &mu.right_mult(a)).adjoint();
        let nx = x.norm_fro();
        if nx > 0.0 {
            c4 = c4.max(mu.act_lie(&x)?.norm() / (nx * nm));
        }
    }

    Ok(StructureChecks {
        clauses: vec![
            clause("(i) ann ⊆ A+", c1),
            clause("(ii) A+ ⊆ N", c2),
            clause("(iii) A- ⊆ (C ∩ N) \\ ann", c3),
            clause("(iv) (L_A − R_A)* ∈ Der for A ∈ A0", c4),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::moment::{critical_test, CRITICAL_TOL};

    #[test]
    fn d6_and_d15() {
        for name in ["d6@2", "d15@3"] {
            let mu = catalog::get(name).unwrap().tensor;
            let r = critical_test(&mu, CRITICAL_TOL).unwrap();
            let checks = structure_checks(&mu, &r).unwrap();
            assert!(checks.all_passed(), "{name}: {checks:?}");
        }
    }

    #[test]
    fn rejects_non_critical() {
        let mu = catalog::d21();
        let r = critical_test(&mu, CRITICAL_TOL).unwrap();
        assert!(matches!(structure_checks(&mu, &r), Err(StructureError::NotCritical(_))));
    }
}
