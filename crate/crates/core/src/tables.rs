//! Reproduction of the two- and three-dimensional tables of critical types,
//! and the one-parameter family of metrics on `d21`.
//!
//! Each row names a recipe. Most rows are critical in the catalog frame.
//! The others are resolved by a balanced direct sum of smaller critical
//! algebras (`M_{μ⊕tλ} = c I + D` needs `|t|² = c_μ / c_λ`) or by an
//! isomorphic model that is critical as written. With flows enabled, every
//! row is also checked by flowing from the catalog frame.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{catalog, AlgebraError, AlgebraTensor};
use crate::cla::{self, CMatrix, C64};
use crate::exec::Exec;
use crate::flow::{self, FlowConfig, FlowError};
use crate::moment::{self, CriticalType, MomentError, CLUSTER_TOL, CRITICAL_TOL, FLOW_CRITICAL_TOL};
use crate::structure::{self, GammaPair, StructureError};

/// Largest value difference for a row to match.
pub const VALUE_TOL: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TableError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("no table for dimension {0}")]
    NoTable(usize),
    #[error("at least one sample is required")]
    NoSamples,
    #[error("sample a = {0} must be positive")]
    BadSample(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Match,
    Mismatch,
    NotCritical,
    Degenerated,
}

/// Where the critical metric of a row comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Recipe {
    Frame,
    /// `left ⊕ t·right` with `|t|² = c_left / c_right`.
    DirectSum { left: String, right: String },
    Model { name: String },
    /// Catalog frame, cross-checked against `S ⋉ λ` with `S = span{(I, I)}`.
    Semidirect { lambda: String },
    Family { x: f64, y: f64 },
    /// The row has no critical metric.
    NoCriticalMetric,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowCheck {
    pub converged: bool,
    pub iterations: usize,
    pub value: f64,
    #[serde(rename = "type")]
    pub critical_type: Option<String>,
    pub degenerated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub name: String,
    pub dim: usize,
    pub recipe: Recipe,
    pub expected_type: Option<String>,
    pub expected_value: Option<f64>,
    pub computed_type: Option<String>,
    pub computed_value: Option<f64>,
    pub residual: f64,
    pub frame_critical: bool,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TableRow {
    /// Rows with an expected type must match; rows without one must not be
    /// critical.
    pub fn ok(&self) -> bool {
        match self.expected_type {
            Some(_) => self.status == RowStatus::Match,
            None => matches!(self.status, RowStatus::NotCritical | RowStatus::Degenerated),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableOptions {
    /// Also flow from every catalog frame.
    pub flows: bool,
    /// Random `(x, y)` samples of the `d22` family besides `(1, 1)`.
    pub d22_samples: usize,
    pub seed: u64,
    pub flow: FlowConfig,
    pub exec: Exec,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            flows: true,
            d22_samples: 2,
            seed: 0,
            flow: FlowConfig::default(),
            exec: Exec::default(),
        }
    }
}

struct RowSpec {
    name: String,
    frame: AlgebraTensor,
    expected: Option<CriticalType>,
    recipe: Recipe,
}

/// `left ⊕ t·right` with `t = sqrt(c_left / c_right)`, critical whenever both
/// summands are.
pub fn balanced_direct_sum(left: &AlgebraTensor, right: &AlgebraTensor) -> Result<AlgebraTensor, TableError> {
    let (_, cl, _) = moment::decompose(left)?;
    let (_, cr, _) = moment::decompose(right)?;
    Ok(left.direct_sum(right, C64::new((cl / cr).sqrt(), 0.0))?)
}

fn specs(dim: usize, opts: &TableOptions) -> Result<Vec<RowSpec>, TableError> {
    let count = match dim {
        2 => 6,
        3 => 22,
        _ => return Err(TableError::NoTable(dim)),
    };
    let mut out = Vec::new();
    for k in 1..=count {
        let entry = catalog::table_entry(dim, k)?;
        let sum = |l: &str, r: &str| Recipe::DirectSum { left: l.into(), right: r.into() };
        let model = |m: &str| Recipe::Model { name: m.into() };
        let recipe = match (dim, k) {
            (3, 2) => sum("mat(1)", "d5@2"),
            (3, 10) => sum("d3@2", "mat(1)"),
            (3, 11) => sum("mat(1)", "d2@2"),
            (3, 12) => sum("mat(1)", "d6@2"),
            (3, 13) => model("U13"),
            (3, 17) => model("W103"),
            (3, 18) => model("U03"),
            (3, 19) => Recipe::Semidirect { lambda: "d5@2".into() },
            (3, 21) => Recipe::NoCriticalMetric,
            (3, 22) => Recipe::Family { x: 1.0, y: 1.0 },
            _ => Recipe::Frame,
        };
        out.push(RowSpec {
            name: format!("d{k}"),
            frame: entry.tensor,
            expected: entry.expected_type,
            recipe,
        });
    }
    if dim == 3 {
        let expected = catalog::table_entry(3, 22)?.expected_type;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.d22_samples {
            let (x, y) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
            out.push(RowSpec {
                name: format!("d22(x={x:.4},y={y:.4})"),
                frame: catalog::d22(C64::new(x, 0.0), C64::new(y, 0.0)),
                expected: expected.clone(),
                recipe: Recipe::Family { x, y },
            });
        }
    }
    Ok(out)
}

/// The tensor a row is tested on; cross-check failures are pushed to `notes`.
fn recipe_tensor(spec: &RowSpec, notes: &mut Vec<String>) -> Result<AlgebraTensor, TableError> {
    Ok(match &spec.recipe {
        Recipe::DirectSum { left, right } => {
            let t = balanced_direct_sum(&catalog::get(left)?.tensor, &catalog::get(right)?.tensor)?;
            let same = flow::orbit_invariants(&t, structure::DER_TOL)?
                == flow::orbit_invariants(&spec.frame, structure::DER_TOL)?;
            if !same {
                notes.push("direct sum and catalog frame have different invariants".into());
            }
            t
        }
        Recipe::Model { name } => {
            let t = catalog::get(name)?.tensor;
            let same = flow::orbit_invariants(&t, structure::DER_TOL)?
                == flow::orbit_invariants(&spec.frame, structure::DER_TOL)?;
            if !same {
                notes.push(format!("model {name} and catalog frame have different invariants"));
            }
            t
        }
        Recipe::Semidirect { lambda } => {
            let lam = catalog::get(lambda)?.tensor;
            let report = moment::critical_test(&lam, CRITICAL_TOL)?;
            let id = CMatrix::identity(lam.dim());
            let built = structure::semidirect_sum(&[GammaPair::new(id.clone(), id)], &lam, &report)?;
            let r = moment::critical_test(&built, CRITICAL_TOL)?;
            let want = moment::critical_test(&spec.frame, CRITICAL_TOL)?;
            if r.critical_type != want.critical_type || (r.value - want.value).abs() > VALUE_TOL {
                notes.push(format!("semidirect construction gives {} with value {}", r.type_string(), r.value));
            }
            spec.frame.clone()
        }
        _ => spec.frame.clone(),
    })
}

fn run_row(spec: &RowSpec, opts: &TableOptions) -> Result<TableRow, TableError> {
    let n = spec.frame.dim();
    let mut notes = Vec::new();
    let frame_report = moment::critical_test(&spec.frame, CRITICAL_TOL)?;
    let tensor = recipe_tensor(spec, &mut notes)?;
    let consistent = notes.is_empty();
    let report = moment::critical_test(&tensor, CRITICAL_TOL)?;
    let expected_value = match &spec.expected {
        Some(t) => Some(t.value(n)?),
        None => None,
    };
    let matches = |ty: &Option<CriticalType>, value: f64| {
        ty.is_some() && *ty == spec.expected && expected_value.is_some_and(|v| (v - value).abs() <= VALUE_TOL)
    };

    let mut status = if !report.critical {
        RowStatus::NotCritical
    } else if matches(&report.critical_type, report.value) {
        RowStatus::Match
    } else {
        RowStatus::Mismatch
    };
    if (!report.critical && spec.expected.is_some()) || !consistent {
        status = RowStatus::Mismatch;
    }

    let flow = if opts.flows {
        let trace = flow::flow_to_critical(&spec.frame, &opts.flow)?;
        let fr = moment::critical_test(&trace.final_tensor, FLOW_CRITICAL_TOL)?;
        let degenerated = trace.converged && flow::detect_degeneration(&trace)?;
        if spec.expected.is_some() && !(trace.converged && matches(&fr.critical_type, fr.value)) {
            notes.push(format!("flow from the catalog frame reached {} with value {}", fr.type_string(), fr.value));
            status = RowStatus::Mismatch;
        }
        if spec.expected.is_none() && degenerated {
            status = RowStatus::Degenerated;
        }
        Some(FlowCheck {
            converged: trace.converged,
            iterations: trace.iterations,
            value: fr.value,
            critical_type: fr.critical_type.as_ref().map(|t| t.to_string()),
            degenerated,
        })
    } else {
        None
    };

    Ok(TableRow {
        name: spec.name.clone(),
        dim: n,
        recipe: spec.recipe.clone(),
        expected_type: spec.expected.as_ref().map(|t| t.to_string()),
        expected_value,
        computed_type: report.critical_type.as_ref().map(|t| t.to_string()),
        computed_value: report.critical.then_some(report.value),
        residual: report.residual,
        frame_critical: frame_report.critical,
        status,
        flow,
        notes,
    })
}

/// All rows of the table for `dim` (2 or 3), in table order.
pub fn table(dim: usize, opts: &TableOptions) -> Result<Vec<TableRow>, TableError> {
    let specs = specs(dim, opts)?;
    opts.exec.map(&specs, |s| run_row(s, opts)).into_iter().collect()
}

/// `d21` in the frame pulled back by `diag(1/a, 1, 1)`:
/// `x1x1 = a² x3`, `x1x2 = a x3`, `x2x1 = −a x3`.
pub fn d21_frame(a: f64) -> AlgebraTensor {
    let a2 = C64::new(a * a, 0.0);
    let a1 = C64::new(a, 0.0);
    AlgebraTensor::from_terms(3, &[(0, 0, 2, a2), (0, 1, 2, a1), (1, 0, 2, -a1)]).expect("literal terms")
}

/// Predicted `D` spectrum of [`d21_frame`] up to a positive factor.
pub fn d21_predicted(a: f64) -> [f64; 3] {
    let (a2, a4) = (a * a, a * a * a * a);
    [3.0 * a4 + 6.0 * a2 + 8.0, 5.0 * a4 + 10.0 * a2 + 8.0, 2.0 * (3.0 * a4 + 8.0 * a2 + 8.0)]
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyPoint {
    pub a: f64,
    pub spectrum: Vec<f64>,
    pub predicted: [f64; 3],
    /// Max relative deviation after scaling both triples to unit sum.
    pub rel_error: f64,
    /// Eigenvalue multiplicities of `D`, ascending.
    pub multiplicities: Vec<usize>,
    pub residual: f64,
    pub critical: bool,
}

impl FamilyPoint {
    pub fn ok(&self, tol: f64) -> bool {
        self.rel_error <= tol && self.multiplicities != [2, 1] && !self.critical
    }
}

/// `k` sample points in `(0, 4]`, always including `a = 1`.
pub fn d21_samples(k: usize) -> Result<Vec<f64>, TableError> {
    if k == 0 {
        return Err(TableError::NoSamples);
    }
    let mut out = vec![1.0];
    let mut i = 1;
    while out.len() < k {
        let a = 4.0 * i as f64 / k as f64;
        if (a - 1.0).abs() > 1e-12 {
            out.push(a);
        }
        i += 1;
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn d21_family(samples: &[f64], exec: Exec) -> Result<Vec<FamilyPoint>, TableError> {
    if samples.is_empty() {
        return Err(TableError::NoSamples);
    }
    if let Some(&a) = samples.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return Err(TableError::BadSample(a));
    }
    exec.map(samples, |&a| {
        let mu = d21_frame(a);
        let report = moment::critical_test(&mu, CRITICAL_TOL)?;
        let ev = cla::hermitian_eig(&report.d).map_err(MomentError::from)?.eigenvalues;
        let predicted = d21_predicted(a);
        let s_ev: f64 = ev.iter().sum();
        let s_pr: f64 = predicted.iter().sum();
        let rel_error = ev
            .iter()
            .zip(&predicted)
            .map(|(x, y)| (x / s_ev - y / s_pr).abs() / (y / s_pr))
            .fold(0.0, f64::max);
        let r = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let scaled: Vec<f64> = ev.iter().map(|x| x / r).collect();
        let multiplicities = moment::cluster(&scaled, CLUSTER_TOL).iter().map(|c| c.1).collect();
        Ok(FamilyPoint {
            a,
            spectrum: ev,
            predicted,
            rel_error,
            multiplicities,
            residual: report.residual,
            critical: report.critical,
        })
    })
    .into_iter()
    .collect()
}

/// Flow from `d21` and report whether the limit left the orbit.
pub fn d21_flow(cfg: &FlowConfig) -> Result<(flow::FlowTrace, bool), TableError> {
    let trace = flow::flow_to_critical(&catalog::d21(), cfg)?;
    let degenerated = flow::detect_degeneration(&trace)?;
    Ok((trace, degenerated))
}
