//! Negative gradient flow of `F_n` on the unit sphere of `V_n`, and orbit
//! invariants used to notice when the limit has left the starting orbit.
//!
//! Each step moves along the orbit: `μ ← normalize(exp(−8 s M_μ).μ)` for a
//! unit `μ`. To first order this is the step `−s·grad F_n` followed by
//! renormalization. The accumulated group element is applied to a fixed base
//! tensor, so roundoff cannot push iterates off the orbit; critical points
//! of smaller orbits are saddles of `F_n` and would otherwise repel them.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraTensor};
use crate::cla::{self, LinalgError};
use crate::moment::{self, MomentError};
use crate::structure::{self, StructureError};

/// Relative rank tolerance for invariants of flow limits.
pub const INVARIANT_TOL: f64 = 1e-5;

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;
/// Bound on `8 s ‖A‖` for the step generator `A`, so a single step has condition number at most `e^4`.
const MAX_EXPONENT: f64 = 2.0;
/// Rebase once `‖g‖ ‖g⁻¹‖` exceeds this, to bound cancellation error.
const REBASE_COND: f64 = 1e6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid flow configuration: {0}")]
    Config(String),
    #[error("trace did not converge")]
    NotConverged,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowConfig {
    /// Initial step; `None` means `0.1 / F_n(start)`.
    pub step0: Option<f64>,
    pub shrink: f64,
    pub grad_tol: f64,
    /// A line search that fails below this gradient norm has hit the
    /// roundoff floor and counts as converged.
    pub stall_tol: f64,
    pub max_iters: usize,
    /// Keep every `record_every`-th iterate (the first and last are always kept).
    pub record_every: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            step0: None,
            shrink: 0.5,
            grad_tol: 1e-9,
            stall_tol: 1e-6,
            max_iters: 200_000,
            record_every: 100,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        if let Some(s) = self.step0 {
            if !(s > 0.0 && s.is_finite()) {
                return Err(FlowError::Config(format!("step0 must be positive, got {s}")));
            }
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(FlowError::Config(format!("shrink must lie in (0, 1), got {}", self.shrink)));
        }
        if self.grad_tol.is_nan() || self.grad_tol <= 0.0 {
            return Err(FlowError::Config(format!("grad_tol must be positive, got {}", self.grad_tol)));
        }
        if self.stall_tol.is_nan() || self.stall_tol < self.grad_tol {
            return Err(FlowError::Config(format!("stall_tol must be at least grad_tol, got {}", self.stall_tol)));
        }
        if self.record_every == 0 {
            return Err(FlowError::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Converged,
    /// No acceptable step, with the gradient below `stall_tol`.
    Stalled,
    BudgetExhausted,
    /// No acceptable step, with the gradient above `stall_tol`.
    LineSearchFailed,
}

/// `(dim Der, dim N, dim ann, dim C)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitInvariants {
    pub der: usize,
    pub radical: usize,
    pub annihilator: usize,
    pub center: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowTrace {
    #[serde(skip)]
    pub iterates: Vec<AlgebraTensor>,
    /// `(iteration, F)` samples.
    pub f_values: Vec<(usize, f64)>,
    #[serde(serialize_with = "serialize_tensor")]
    pub final_tensor: AlgebraTensor,
    pub converged: bool,
    pub status: FlowStatus,
    pub iterations: usize,
    pub grad_norm: f64,
    pub start_invariants: OrbitInvariants,
    pub final_invariants: OrbitInvariants,
}

fn serialize_tensor<S: serde::Serializer>(t: &AlgebraTensor, s: S) -> Result<S::Ok, S::Error> {
    crate::algebra::JsonAlgebra::from(t).serialize(s)
}

impl FlowTrace {
    pub fn final_value(&self) -> f64 {
        self.f_values.last().map_or(f64::NAN, |x| x.1)
    }
}

/// Invariant dimensions at relative rank tolerance `tol`: use
/// [`structure::DER_TOL`] for exact inputs and [`INVARIANT_TOL`] for flow
/// limits.
pub fn orbit_invariants(mu: &AlgebraTensor, tol: f64) -> Result<OrbitInvariants, FlowError> {
    let unit = if mu.is_zero() { mu.clone() } else { mu.normalized()? };
    let der = structure::derivation_algebra(&unit, tol)?.dim();
    let subs = structure::substructures(&unit, tol)?;
    Ok(OrbitInvariants {
        der,
        radical: subs.radical.len(),
        annihilator: subs.annihilator.len(),
        center: subs.center.len(),
    })
}

/// True when the flow limit has different invariants from the start, which
/// means the limit lies outside the starting orbit. The converse need not
/// hold.
pub fn detect_degeneration(trace: &FlowTrace) -> Result<bool, FlowError> {
    if !trace.converged {
        return Err(FlowError::NotConverged);
    }
    Ok(trace.start_invariants != trace.final_invariants)
}

/// `F`, the gradient and its norm at a unit tensor.
fn evaluate(mu: &AlgebraTensor) -> Result<(f64, cla::CMatrix, f64), FlowError> {
    let mm = moment::moment_matrix(mu)?;
    let ns = mm.norm_sq;
    let f = mm.trace_sq() / (ns * ns);
    let grad = moment::euclidean_gradient(mu)?;
    Ok((f, mm.m, grad.norm()))
}

/// Position on the orbit as `g.base` with `h = g⁻¹`, together with an
/// orthonormal basis of `Der(base)`.
struct OrbitPoint {
    base: AlgebraTensor,
    der: Vec<cla::CMatrix>,
    g: cla::CMatrix,
    h: cla::CMatrix,
}

impl OrbitPoint {
    fn new(base: AlgebraTensor) -> Result<Self, FlowError> {
        let n = base.dim();
        let der = structure::derivation_algebra(&base, structure::DER_TOL)?.basis;
        Ok(Self {
            base,
            der,
            g: cla::CMatrix::identity(n),
            h: cla::CMatrix::identity(n),
        })
    }

    /// Step generator: `M − c I` with its component along `Der(g.base)`
    /// removed. The velocity is unchanged up to a radial term, but the
    /// accumulated `g` no longer drifts along the stabilizer.
    fn generator(&self, m: &cla::CMatrix) -> cla::CMatrix {
        let n = m.rows();
        let c = (m * m).trace().re / m.trace().re;
        let mut x = m - &cla::CMatrix::identity(n).scale_real(c);
        if self.der.is_empty() {
            return x;
        }
        let conj: Vec<Vec<cla::C64>> = self.der.iter().map(|b| (&(&self.g * b) * &self.h).to_vec()).collect();
        let q = structure::orthonormal_span(&conj, 1e-8);
        let mut v = x.to_vec();
        for qi in &q {
            let w = cla::vec_dot(&v, qi);
            for (vi, qj) in v.iter_mut().zip(qi) {
                *vi -= w * qj;
            }
        }
        x = cla::CMatrix::from_vec_square(n, &v);
        x
    }

    fn step(&self, a: &cla::CMatrix, s: f64) -> Result<(Self, AlgebraTensor), FlowError> {
        let e = cla::expm(&a.scale_real(-8.0 * s));
        let einv = cla::expm(&a.scale_real(8.0 * s));
        let g = &e * &self.g;
        let h = &self.h * &einv;
        // scalars act trivially after normalization
        let ng = g.norm_fro() / (g.rows() as f64).sqrt();
        let (g, h) = (g.scale_real(1.0 / ng), h.scale_real(ng));
        let mu = self.base.act_group_pair(&g, &h).normalized()?;
        let next = if g.norm_fro() * h.norm_fro() > REBASE_COND {
            OrbitPoint::new(mu.clone())?
        } else {
            OrbitPoint {
                base: self.base.clone(),
                der: self.der.clone(),
                g,
                h,
            }
        };
        Ok((next, mu))
    }
}

/// Runs the flow from `μ` until the gradient norm drops below `grad_tol`
/// or the iteration budget is spent.
pub fn flow_to_critical(mu: &AlgebraTensor, cfg: &FlowConfig) -> Result<FlowTrace, FlowError> {
    cfg.validate()?;
    let start_invariants = orbit_invariants(mu, structure::DER_TOL)?;
    let mut cur = mu.normalized()?;
    let mut point = OrbitPoint::new(cur.clone())?;
    let (mut f, mut m, mut gn) = evaluate(&cur)?;
    let mut step = cfg.step0.unwrap_or(0.1 / f);
    let mut iterates = vec![cur.clone()];
    let mut f_values = vec![(0, f)];
    let mut status = FlowStatus::BudgetExhausted;
    let mut iter = 0;
    while iter < cfg.max_iters {
        if gn <= cfg.grad_tol {
            status = FlowStatus::Converged;
            break;
        }
        let mut accepted = None;
        let a = point.generator(&m);
        let mut s = step.min(MAX_EXPONENT / (8.0 * a.norm_fro()).max(f64::MIN_POSITIVE));
        for _ in 0..MAX_BACKTRACK {
            let (next, cand) = point.step(&a, s)?;
            let (fc, mc, gc) = evaluate(&cand)?;
            let armijo = fc <= f - ARMIJO * s * gn * gn;
            // below roundoff in F, accept steps that shrink the gradient
            let flat = fc <= f + 8.0 * f64::EPSILON * f && gc < gn;
            if armijo || flat {
                accepted = Some((next, cand, fc, mc, gc, s));
                break;
            }
            s *= cfg.shrink;
        }
        let Some((next, cand, fc, mc, gc, s)) = accepted else {
            status = if gn <= cfg.stall_tol {
                FlowStatus::Stalled
            } else {
                FlowStatus::LineSearchFailed
            };
            break;
        };
        iter += 1;
        point = next;
        cur = cand;
        f = fc.min(f);
        m = mc;
        gn = gc;
        step = s * 2.0;
        if iter % cfg.record_every == 0 {
            iterates.push(cur.clone());
            f_values.push((iter, f));
        }
    }
    if status == FlowStatus::BudgetExhausted && gn <= cfg.grad_tol {
        status = FlowStatus::Converged;
    }
    if f_values.last().map(|x| x.0) != Some(iter) {
        iterates.push(cur.clone());
        f_values.push((iter, f));
    }
    let final_invariants = orbit_invariants(&cur, INVARIANT_TOL)?;
    Ok(FlowTrace {
        iterates,
        f_values,
        final_tensor: cur,
        converged: matches!(status, FlowStatus::Converged | FlowStatus::Stalled),
        status,
        iterations: iter,
        grad_norm: gn,
        start_invariants,
        final_invariants,
    })
}
