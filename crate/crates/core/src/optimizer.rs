//! Tightening majorants: closed-form Young parameters and least-squares flux fitting
//! over nested analytic bases.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analytic::{Factor, SeparableSum, VectorSpec};
use crate::domain::BoxDomain;
use crate::elliptic::{require_primal, sq, sqv};
use crate::error::{Error, Result};
use crate::exec;
use crate::field::{ScalarField, SpaceVec, VectorField};
use crate::manufactured::{mode_tuple, ProblemCase, ProblemKind};
use crate::norms::Component;
use crate::quadrature::{compensated_sum, QuadGrid, QuadratureRule, Region};
use crate::report::BoundReport;

/// Diagonal shift applied when the normal matrix is not numerically positive definite.
pub const RIDGE: f64 = 1e-12;

/// Minimizer of `γ ↦ (1 + 1/γ)A + (1 + γ)B` and the minimum value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaChoice {
    /// `+∞` when `B = 0`, `0` when `A = 0`.
    pub gamma: f64,
    pub bound: f64,
}

/// `γ* = √(A/B)`, `bound* = (√A + √B)²`. The degenerate limits are `B = 0 → (∞, A)`,
/// `A = 0 → (0, B)`; for `A = B = 0` any `γ` works and `1` is returned.
pub fn optimal_gamma(a: f64, b: f64) -> Result<GammaChoice> {
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "majorant terms must be finite and non-negative, got A = {a}, B = {b}"
        )));
    }
    Ok(match (a == 0.0, b == 0.0) {
        (true, true) => GammaChoice { gamma: 1.0, bound: 0.0 },
        (false, true) => GammaChoice {
            gamma: f64::INFINITY,
            bound: a,
        },
        (true, false) => GammaChoice { gamma: 0.0, bound: b },
        (false, false) => {
            let s = a.sqrt() + b.sqrt();
            GammaChoice {
                gamma: (a / b).sqrt(),
                bound: s * s,
            }
        }
    })
}

/// `(1 + 1/γ)A + (1 + γ)B`.
pub fn young_bound(a: f64, b: f64, gamma: f64) -> f64 {
    (1.0 + 1.0 / gamma) * a + (1.0 + gamma) * b
}

/// Multipliers of `residual · ‖f - reaction·ũ + div ϕ‖² + gap · ‖ϕ - ∇ũ‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantWeights {
    pub reaction: f64,
    pub residual: f64,
    pub gap: f64,
}

impl MajorantWeights {
    /// Reaction-diffusion majorant of `‖u-ũ‖²_{H¹}`.
    pub fn reaction_diffusion() -> Self {
        MajorantWeights {
            reaction: 1.0,
            residual: 1.0,
            gap: 1.0,
        }
    }

    /// Poisson majorant of `‖∇(u-ũ)‖²` after Young's inequality with parameter `β`:
    /// `(1+β)c²‖f + div ϕ‖² + (1+1/β)‖ϕ - ∇ũ‖²`.
    pub fn poisson(cf: f64, beta: f64) -> Self {
        MajorantWeights {
            reaction: 0.0,
            residual: (1.0 + beta) * cf * cf,
            gap: 1.0 + 1.0 / beta,
        }
    }

    pub fn for_kind(kind: ProblemKind, cf: f64, beta: f64) -> Result<Self> {
        match kind {
            ProblemKind::ReactionDiffusion => Ok(Self::reaction_diffusion()),
            ProblemKind::Poisson => Ok(Self::poisson(cf, beta)),
            other => Err(Error::InvalidParameter(format!(
                "flux majorants are available for stationary problems only, not {other}"
            ))),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.residual) && ok(self.gap) && self.reaction.is_finite() && self.reaction >= 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "majorant weights must be positive, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Result of fitting a flux in the span of a basis.
#[derive(Debug, Clone)]
pub struct FluxFit {
    pub flux: VectorField,
    pub coefficients: Vec<f64>,
    /// Weighted majorant at `flux`, evaluated by quadrature.
    pub value: f64,
    /// `‖f - reaction·ũ + div ϕ‖²`
    pub residual_sq: f64,
    /// `‖ϕ - ∇ũ‖²`
    pub gap_sq: f64,
}

fn dot(a: &SpaceVec, b: &SpaceVec, d: usize) -> f64 {
    (0..d).map(|i| a[i] * b[i]).sum()
}

/// Minimize the weighted majorant over `ϕ ∈ span(basis)` through the normal equations.
///
/// The Gram matrix is assembled from pointwise values at the quadrature nodes and
/// factored by Cholesky after dropping members with a vanishing diagonal. If that fails the
/// diagonal is shifted by [`RIDGE`] (scaled by the largest diagonal entry, at least 1).
pub fn minimize_flux_majorant(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    basis: &[VectorField],
    weights: MajorantWeights,
    q: &QuadratureRule,
) -> Result<FluxFit> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    weights.validate()?;
    let dom = &case.dom;
    require_primal(u_tilde, dom)?;
    let divs = basis
        .iter()
        .map(|b| {
            b.div_fn().cloned().map_err(|_| {
                Error::Conformity(format!("basis member `{}` has no divergence", b.name()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = QuadGrid::new(dom, q, Region::Domain);
    let d = dom.dim();
    let g = case.f.sub(&u_tilde.scale(weights.reaction));
    let grad_u = u_tilde.grad_fn()?.clone();

    let values: Vec<Vec<SpaceVec>> = exec::map_collect(basis, |b| {
        grid.points.iter().map(|p| b.eval(p)).collect()
    });
    let div_values: Vec<Vec<f64>> =
        exec::map_collect(&divs, |dv| grid.points.iter().map(|p| dv(p)).collect());
    let g_values: Vec<f64> = grid.points.iter().map(|p| g.eval(p)).collect();
    let grad_values: Vec<SpaceVec> = grid.points.iter().map(|p| grad_u(p)).collect();

    let n = basis.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let entries = exec::map_collect(&pairs, |&(j, k)| {
        let terms: Vec<f64> = (0..grid.len())
            .map(|i| {
                grid.weights[i]
                    * (weights.residual * div_values[j][i] * div_values[k][i]
                        + weights.gap * dot(&values[j][i], &values[k][i], d))
            })
            .collect();
        compensated_sum(&terms)
    });
    let rhs = exec::map_range(n, |j| {
        let terms: Vec<f64> = (0..grid.len())
            .map(|i| {
                grid.weights[i]
                    * (-weights.residual * g_values[i] * div_values[j][i]
                        + weights.gap * dot(&values[j][i], &grad_values[i], d))
            })
            .collect();
        compensated_sum(&terms)
    });
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for (&(j, k), v) in pairs.iter().zip(&entries) {
        gram[(j, k)] = *v;
        gram[(k, j)] = *v;
    }
    let b = DVector::from_vec(rhs);
    let coeffs = solve_spd(gram, &b);
    let coefficients: Vec<f64> = coeffs.iter().copied().collect();
    let flux = VectorField::linear_combination(&coefficients, basis).named("flux*");
    let residual_sq = sq(&g.add(&flux.div_field()?), dom, q)?;
    let gap_sq = sqv(&flux.sub(&u_tilde.gradient_field()?), dom, q)?;
    Ok(FluxFit {
        flux,
        coefficients,
        value: weights.residual * residual_sq + weights.gap * gap_sq,
        residual_sq,
        gap_sq,
    })
}

fn solve_spd(gram: DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    // Members with a vanishing diagonal (zero fields) get coefficient zero.
    let scale = gram.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let active: Vec<usize> = (0..gram.nrows())
        .filter(|&i| gram[(i, i)] > 1e-300 && gram[(i, i)] > 1e-14 * scale)
        .collect();
    let mut out = DVector::<f64>::zeros(gram.nrows());
    if active.is_empty() {
        return out;
    }
    let m = gram.select_rows(&active).select_columns(&active);
    let rhs = b.select_rows(&active);
    let sol = solve_reduced(m, &rhs);
    for (slot, &i) in active.iter().enumerate() {
        out[i] = sol[slot];
    }
    out
}

fn solve_reduced(gram: DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if let Some(ch) = gram.clone().cholesky() {
        return ch.solve(b);
    }
    let scale = gram.diagonal().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut shift = RIDGE * scale;
    loop {
        let mut m = gram.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += shift;
        }
        if let Some(ch) = m.cholesky() {
            return ch.solve(b);
        }
        shift *= 10.0;
    }
}

/// `k`-th member of the nested flux family: the gradient of the `k`-th boundary-vanishing
/// sine product, whose divergence is its Laplacian. In one dimension these are the
/// cosine modes `kπ cos(kπx̂)` on the normalized interval.
pub fn gradient_flux(dom: &BoxDomain, k: usize) -> Result<VectorField> {
    let d = dom.dim();
    let modes: Vec<f64> = mode_tuple(d, k).into_iter().map(|m| m as f64).collect();
    let s = SeparableSum::sine_product(dom, &modes, 1.0, Factor::one());
    VectorSpec::gradient(&s, d).to_field(&format!("flux{k}"), dom)
}

pub fn gradient_flux_basis(dom: &BoxDomain, size: usize) -> Result<Vec<VectorField>> {
    (0..size).map(|k| gradient_flux(dom, k)).collect()
}

/// A flux-majorant bound together with the flux and Young parameter that produced it.
#[derive(Debug, Clone)]
pub struct MajorantState {
    pub report: BoundReport,
    pub flux: VectorField,
    /// Young parameter for the Poisson majorant (unused for reaction-diffusion).
    pub beta: f64,
}

const BETA_RANGE: (f64, f64) = (1e-8, 1e8);

/// Evaluate the conforming flux majorant at a given flux.
///
/// Reaction-diffusion: `‖f-ũ+div ϕ‖² + ‖ϕ-∇ũ‖² ≥ ‖u-ũ‖²_{H¹}`. Poisson:
/// `(c‖f+div ϕ‖ + ‖ϕ-∇ũ‖)² ≥ ‖∇(u-ũ)‖²`, i.e. the Young-weighted form at its optimal
/// parameter.
pub fn flux_majorant(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    flux: &VectorField,
    cf: f64,
    q: &QuadratureRule,
) -> Result<MajorantState> {
    let dom = &case.dom;
    require_primal(u_tilde, dom)?;
    let div = flux
        .div_field()
        .map_err(|_| Error::Conformity(format!("flux `{}` has no divergence", flux.name())))?;
    let e = case.exact_u.sub(u_tilde);
    let grad_e = sqv(&e.gradient_field()?, dom, q)?;
    let gap = sqv(&flux.sub(&u_tilde.gradient_field()?), dom, q)?;
    match case.kind {
        ProblemKind::ReactionDiffusion => {
            let res = sq(&case.f.sub(u_tilde).add(&div), dom, q)?;
            let report = BoundReport::new(
                "rd_flux_majorant",
                Vec::new(),
                vec![
                    Component::new("|u-u~|^2", sq(&e, dom, q)?),
                    Component::new("|grad(u-u~)|^2", grad_e),
                ],
                vec![
                    Component::new("|f-u~+div flux|^2", res),
                    Component::new("|flux-grad u~|^2", gap),
                ],
                None,
            );
            Ok(MajorantState {
                report,
                flux: flux.clone(),
                beta: 1.0,
            })
        }
        ProblemKind::Poisson => {
            let res = sq(&case.f.add(&div), dom, q)?;
            let a = cf * cf * res;
            // (1+β)·a + (1+1/β)·gap is minimized at β = √(gap/a).
            let choice = optimal_gamma(gap, a)?;
            let beta = choice.gamma.clamp(BETA_RANGE.0, BETA_RANGE.1);
            let report = BoundReport::with_upper(
                "poisson_flux_majorant",
                Vec::new(),
                vec![Component::new("|grad(u-u~)|^2", grad_e)],
                vec![
                    Component::new("c^2|f+div flux|^2", a),
                    Component::new("|flux-grad u~|^2", gap),
                ],
                choice.bound,
                Some(beta),
            );
            Ok(MajorantState {
                report,
                flux: flux.clone(),
                beta,
            })
        }
        other => Err(Error::InvalidParameter(format!(
            "flux majorants are available for stationary problems only, not {other}"
        ))),
    }
}

/// Nested enrichment: step `s` refits the flux over the starting flux plus the first `s`
/// members of `family`, then re-optimizes the Young parameter. Upper bounds are
/// non-increasing: a step that fails to improve repeats the previous state.
pub fn improve_bound(
    case: &ProblemCase,
    u_tilde: &ScalarField,
    start: &MajorantState,
    family: impl Fn(usize) -> Result<VectorField>,
    budget: usize,
    cf: f64,
    q: &QuadratureRule,
) -> Result<Vec<MajorantState>> {
    if budget == 0 {
        return Err(Error::InvalidParameter("enrichment budget must be at least 1".into()));
    }
    let mut basis = vec![start.flux.clone()];
    let mut beta = start.beta;
    let mut out = Vec::with_capacity(budget);
    for step in 0..budget {
        basis.push(family(step)?);
        let weights = MajorantWeights::for_kind(case.kind, cf, beta)?;
        let fit = minimize_flux_majorant(case, u_tilde, &basis, weights, q)?;
        let state = flux_majorant(case, u_tilde, &fit.flux, cf, q)?;
        // With a clamped Young parameter the weighted fit can land marginally above the
        // previous optimum, which is still in the span; keep whichever is smaller.
        let prev = out.last().unwrap_or(start);
        let state = if state.report.upper <= prev.report.upper {
            state
        } else {
            prev.clone()
        };
        beta = state.beta;
        out.push(state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manufactured::make_case;

    #[test]
    fn gamma_closed_form() {
        let c = optimal_gamma(4.0, 1.0).unwrap();
        assert_eq!(c.gamma, 2.0);
        assert_eq!(c.bound, 9.0);
        assert_eq!(optimal_gamma(0.0, 5.0).unwrap().bound, 5.0);
        assert_eq!(optimal_gamma(3.0, 0.0).unwrap().bound, 3.0);
        assert!(optimal_gamma(3.0, 0.0).unwrap().gamma.is_infinite());
        assert!(optimal_gamma(-1.0, 1.0).is_err());
    }

    fn rd_sine() -> ProblemCase {
        let dom = BoxDomain::unit(1).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::one());
        make_case("rd", ProblemKind::ReactionDiffusion, &dom, &u).unwrap()
    }

    #[test]
    fn zero_basis_forces_zero_coefficients() {
        let case = rd_sine();
        let q = QuadratureRule::default();
        let ut = case.exact_u.scale(0.9);
        let fit = minimize_flux_majorant(
            &case,
            &ut,
            &[VectorField::zero()],
            MajorantWeights::reaction_diffusion(),
            &q,
        )
        .unwrap();
        assert_eq!(fit.coefficients, vec![0.0]);
        let expect = sq(&case.f.sub(&ut), &case.dom, &q).unwrap()
            + sqv(&ut.gradient_field().unwrap(), &case.dom, &q).unwrap();
        assert!((fit.value - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn exact_flux_in_basis_gives_zero() {
        let case = rd_sine();
        let q = QuadratureRule::default();
        let basis = gradient_flux_basis(&case.dom, 3).unwrap();
        let fit = minimize_flux_majorant(
            &case,
            &case.exact_u,
            &basis,
            MajorantWeights::reaction_diffusion(),
            &q,
        )
        .unwrap();
        assert!(fit.value < 1e-20, "{}", fit.value);
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_basis_rejected() {
        let case = rd_sine();
        let r = minimize_flux_majorant(
            &case,
            &case.exact_u,
            &[],
            MajorantWeights::reaction_diffusion(),
            &QuadratureRule::default(),
        );
        assert_eq!(r.unwrap_err(), Error::EmptyBasis);
    }

    #[test]
    fn nonconforming_basis_member_rejected() {
        let case = rd_sine();
        let bad = VectorField::new("bad", |p| [p.x[0], 0.0, 0.0]);
        let r = minimize_flux_majorant(
            &case,
            &case.exact_u,
            &[bad],
            MajorantWeights::reaction_diffusion(),
            &QuadratureRule::default(),
        );
        assert!(matches!(r, Err(Error::Conformity(_))));
    }

    #[test]
    fn rank_deficient_basis_is_regularized() {
        let case = rd_sine();
        let q = QuadratureRule::default();
        let f0 = gradient_flux(&case.dom, 0).unwrap();
        let basis = vec![f0.clone(), f0.scale(2.0)];
        let ut = case.exact_u.scale(0.5);
        let fit =
            minimize_flux_majorant(&case, &ut, &basis, MajorantWeights::reaction_diffusion(), &q)
                .unwrap();
        let single =
            minimize_flux_majorant(&case, &ut, &[f0], MajorantWeights::reaction_diffusion(), &q)
                .unwrap();
        assert!((fit.value - single.value).abs() <= 1e-8 * single.value);
    }

    #[test]
    fn enrichment_is_monotone_for_poisson() {
        let dom = BoxDomain::unit(2).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0, 2.0], 1.0, Factor::one())
            .add(&SeparableSum::sine_product(&dom, &[2.0, 1.0], 0.4, Factor::one()));
        let case = make_case("d", ProblemKind::Poisson, &dom, &u).unwrap();
        let q = QuadratureRule::default();
        let cf = crate::elliptic::friedrichs_constant(&dom).value;
        let ut = case.exact_u.scale(0.8);
        let start = flux_majorant(&case, &ut, &ut.gradient_field().unwrap(), cf, &q).unwrap();
        let steps =
            improve_bound(&case, &ut, &start, |k| gradient_flux(&dom, k), 4, cf, &q).unwrap();
        let mut prev = start.report.upper;
        for s in &steps {
            assert!(s.report.upper <= prev * (1.0 + 1e-12));
            assert!(s.report.upper >= s.report.true_total * (1.0 - 1e-12));
            prev = s.report.upper;
        }
    }
}
