//! Manufactured problem cases, controlled approximation pairs and free fields.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{Factor, SeparableSum, Term, VectorSpec};
use crate::domain::BoxDomain;
use crate::error::{Error, Result};
use crate::field::{Point, ScalarField, VectorField, BOUNDARY_TOL};

/// The four model operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `-Δu + u = f`
    ReactionDiffusion,
    /// `-Δu = f`
    Poisson,
    /// `∂ₜu - Δu + u = f`, `u(0) = u₀`
    TimeReactionDiffusion,
    /// `∂ₜu - Δu = f`, `u(0) = u₀`
    Heat,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] = [
        ProblemKind::ReactionDiffusion,
        ProblemKind::Poisson,
        ProblemKind::TimeReactionDiffusion,
        ProblemKind::Heat,
    ];

    pub fn is_parabolic(self) -> bool {
        matches!(self, ProblemKind::TimeReactionDiffusion | ProblemKind::Heat)
    }

    /// Coefficient of the zeroth-order term.
    pub fn reaction(self) -> f64 {
        match self {
            ProblemKind::ReactionDiffusion | ProblemKind::TimeReactionDiffusion => 1.0,
            ProblemKind::Poisson | ProblemKind::Heat => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::ReactionDiffusion => "reaction_diffusion",
            ProblemKind::Poisson => "poisson",
            ProblemKind::TimeReactionDiffusion => "time_reaction_diffusion",
            ProblemKind::Heat => "heat",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A model problem with data `(f, u₀)` and exact pair `(u, p = ∇u)`.
#[derive(Debug, Clone)]
pub struct ProblemCase {
    pub name: String,
    pub kind: ProblemKind,
    pub dom: BoxDomain,
    pub f: ScalarField,
    pub u0: Option<ScalarField>,
    pub exact_u: ScalarField,
    pub exact_p: VectorField,
}

impl ProblemCase {
    pub fn require_kind(&self, expected: ProblemKind) -> Result<()> {
        if self.kind != expected {
            return Err(Error::KindMismatch {
                expected: expected.as_str(),
                found: self.kind.as_str(),
            });
        }
        Ok(())
    }

    pub fn initial_value(&self) -> Result<&ScalarField> {
        self.u0.as_ref().ok_or(Error::NotParabolic)
    }

    /// The same case with the source multiplied by `factor` (exact pair unchanged).
    /// Deliberately inconsistent data, for exercising defect detection.
    pub fn with_source_scaled(&self, factor: f64) -> ProblemCase {
        let mut out = self.clone();
        out.f = self.f.scale(factor).named(&format!("{factor}*f"));
        out
    }

    /// Largest pointwise defect over `samples` random points of: `p - ∇u`, the PDE
    /// residual `f - L u`, and (parabolic) `u₀ - u(0,·)`.
    pub fn max_defect(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dom.dim();
        let grad = self.exact_u.grad_fn()?;
        let lap = self.exact_u.laplacian_fn()?;
        let dt = if self.kind.is_parabolic() {
            Some(self.exact_u.dt_fn()?)
        } else {
            None
        };
        let c = self.kind.reaction();
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let mut x = [0.0; 3];
            for (i, xi) in x.iter_mut().enumerate().take(d) {
                *xi = rng.gen_range(self.dom.lower()[i]..self.dom.upper()[i]);
            }
            let t = self.dom.time_horizon().map_or(0.0, |h| rng.gen_range(0.0..h));
            let p = Point { t, x };
            let g = grad(&p);
            let flux = self.exact_p.eval(&p);
            for i in 0..d {
                worst = worst.max((flux[i] - g[i]).abs());
            }
            let mut op = -lap(&p) + c * self.exact_u.eval(&p);
            if let Some(dt) = dt {
                op += dt(&p);
            }
            worst = worst.max((self.f.eval(&p) - op).abs());
            if let Some(u0) = &self.u0 {
                let p0 = Point { t: 0.0, x };
                worst = worst.max((u0.eval(&p0) - self.exact_u.eval(&p0)).abs());
            }
        }
        Ok(worst)
    }
}

fn check_kind_domain(kind: ProblemKind, dom: &BoxDomain) -> Result<()> {
    match (kind.is_parabolic(), dom.is_parabolic()) {
        (true, false) => Err(Error::NotParabolic),
        (false, true) => Err(Error::InvalidDomain(format!(
            "{kind} is stationary but the domain has a time horizon"
        ))),
        _ => Ok(()),
    }
}

/// Build a case from a closed-form solution. The source is obtained by applying the
/// operator symbolically; `p = ∇u` carries the exact divergence `Δu`.
pub fn make_case(
    name: &str,
    kind: ProblemKind,
    dom: &BoxDomain,
    u_spec: &SeparableSum,
) -> Result<ProblemCase> {
    check_kind_domain(kind, dom)?;
    let d = dom.dim();
    u_spec.validate_dim(d)?;
    if !kind.is_parabolic() && u_spec.is_time_dependent() {
        return Err(Error::MissingTimeHorizon);
    }
    if u_spec.max_boundary_value(dom) > BOUNDARY_TOL {
        return Err(Error::Conformity(format!(
            "exact solution of `{name}` does not vanish on the boundary"
        )));
    }
    let lap = u_spec.laplacian(d);
    let mut f_spec = lap.scale(-1.0);
    if kind.reaction() != 0.0 {
        f_spec = f_spec.add(&u_spec.scale(kind.reaction()));
    }
    if kind.is_parabolic() {
        f_spec = f_spec.add(&u_spec.dt());
    }
    let exact_u = u_spec.to_field("u", dom)?;
    let exact_p = VectorSpec::gradient(u_spec, d).to_field("p", dom)?;
    let f = f_spec.to_field("f", dom)?.vanishing(false);
    let u0 = if kind.is_parabolic() {
        Some(u_spec.at_time(0.0).to_field("u0", dom)?)
    } else {
        None
    };
    Ok(ProblemCase {
        name: name.to_string(),
        kind,
        dom: dom.clone(),
        f,
        u0,
        exact_u,
        exact_p,
    })
}

/// Build a case from a field with caller-supplied derivatives. Requires the gradient and
/// Laplacian, plus the time derivative for parabolic kinds.
pub fn case_from_field(
    name: &str,
    kind: ProblemKind,
    dom: &BoxDomain,
    u: ScalarField,
) -> Result<ProblemCase> {
    check_kind_domain(kind, dom)?;
    let lap = u.laplacian_fn()?.clone();
    u.grad_fn()?;
    let dt = if kind.is_parabolic() {
        Some(u.dt_fn()?.clone())
    } else {
        None
    };
    if !u.spot_check_boundary(dom, BOUNDARY_TOL) {
        return Err(Error::Conformity(format!(
            "exact solution of `{name}` does not vanish on the boundary"
        )));
    }
    let u = u.vanishing(true);
    let c = kind.reaction();
    let value = u.value_fn().clone();
    let f = ScalarField::new("f", move |p| {
        let mut v = -lap(p) + c * value(p);
        if let Some(dt) = &dt {
            v += dt(p);
        }
        v
    })
    .time_dependent(u.is_time_dependent());
    let exact_p = u.gradient_field()?.named("p");
    let u0 = if kind.is_parabolic() {
        Some(u.at_time(0.0).named("u0"))
    } else {
        None
    };
    Ok(ProblemCase {
        name: name.to_string(),
        kind,
        dom: dom.clone(),
        f,
        u0,
        exact_u: u,
        exact_p,
    })
}

/// How conforming an approximation pair is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// `ũ` boundary-vanishing with a Laplacian, `p̃ = ∇ũ`.
    VeryConforming,
    /// `ũ` boundary-vanishing with a gradient, `p̃` with a divergence.
    ConformingMixed,
    /// Only `ũ` conforming.
    SemiConformingPrimal,
    /// Only `p̃` conforming.
    SemiConformingDual,
    /// Both merely square integrable.
    NonConforming,
}

impl Level {
    pub const ALL: [Level; 5] = [
        Level::VeryConforming,
        Level::ConformingMixed,
        Level::SemiConformingPrimal,
        Level::SemiConformingDual,
        Level::NonConforming,
    ];

    pub fn primal_conforming(self) -> bool {
        matches!(
            self,
            Level::VeryConforming | Level::ConformingMixed | Level::SemiConformingPrimal
        )
    }

    pub fn dual_conforming(self) -> bool {
        matches!(
            self,
            Level::VeryConforming | Level::ConformingMixed | Level::SemiConformingDual
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::VeryConforming => "very_conforming",
            Level::ConformingMixed => "conforming_mixed",
            Level::SemiConformingPrimal => "semi_conforming_primal",
            Level::SemiConformingDual => "semi_conforming_dual",
            Level::NonConforming => "non_conforming",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Approximation `(ũ, p̃)` together with its declared conformity level.
#[derive(Debug, Clone)]
pub struct ApproxPair {
    pub u_tilde: ScalarField,
    pub p_tilde: VectorField,
    pub level: Level,
}

impl ApproxPair {
    /// Check that the fields advertise what the level promises.
    pub fn check_contract(&self, dom: &BoxDomain) -> Result<()> {
        let u = self.u_tilde.conformity();
        let p = self.p_tilde.conformity();
        let fail = |what: &str| {
            Err(Error::Conformity(format!(
                "{} approximation: {what}",
                self.level
            )))
        };
        if self.level.primal_conforming() {
            if !u.has_grad {
                return fail("u~ needs a gradient");
            }
            if !u.vanishes_on_boundary {
                return fail("u~ must vanish on the boundary");
            }
            self.u_tilde.validate(dom)?;
        }
        if self.level == Level::VeryConforming && !u.has_laplacian {
            return fail("u~ needs a Laplacian");
        }
        if self.level.dual_conforming() && !p.has_div {
            return fail("p~ needs a divergence");
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

fn random_time(rng: &mut ChaCha8Rng, parabolic: bool) -> Factor {
    if parabolic {
        Factor::Poly {
            coeffs: vec![uniform(rng), uniform(rng)],
        }
    } else {
        Factor::one()
    }
}

/// Random combination of boundary-vanishing sine products with modes in `1..=2`.
fn random_sine_sum(rng: &mut ChaCha8Rng, dom: &BoxDomain, terms: usize) -> SeparableSum {
    let mut out = SeparableSum::zero();
    for _ in 0..terms {
        let modes: Vec<f64> = (0..dom.dim())
            .map(|_| rng.gen_range(1..=2) as f64)
            .collect();
        let c = uniform(rng);
        let time = random_time(rng, dom.is_parabolic());
        out = out.add(&SeparableSum::sine_product(dom, &modes, c, time));
    }
    out
}

/// Random smooth sum of sine/cosine products with no boundary condition.
fn random_trig_sum(rng: &mut ChaCha8Rng, dom: &BoxDomain, terms: usize) -> SeparableSum {
    let mut out = SeparableSum::zero();
    for _ in 0..terms {
        let axes = (0..dom.dim())
            .map(|i| {
                let (a, len) = (dom.lower()[i], dom.lengths()[i]);
                if rng.gen_bool(0.5) {
                    Factor::sine_mode(rng.gen_range(1..=2) as f64, a, len)
                } else {
                    Factor::cosine_mode(rng.gen_range(0..=2) as f64, a, len)
                }
            })
            .collect();
        let c = uniform(rng);
        let time = random_time(rng, dom.is_parabolic());
        out = out.add(&SeparableSum::new(vec![Term::new(c, axes).with_time(time)]));
    }
    out
}

fn normalized(s: SeparableSum, dom: &BoxDomain) -> SeparableSum {
    let n = s.l2_norm_sq(dom);
    if n > 0.0 {
        s.scale(1.0 / n.sqrt())
    } else {
        s
    }
}

fn normalized_vec(v: VectorSpec, dom: &BoxDomain) -> VectorSpec {
    let n = v.l2_norm_sq(dom);
    if n > 0.0 {
        v.scale(1.0 / n.sqrt())
    } else {
        v
    }
}

/// The seeded perturbation directions `(δu, δu_nc, δp)`, each of unit `L²` norm.
///
/// `δu` vanishes on the boundary, `δu_nc` does not (it carries a cosine term in the
/// first coordinate), and `δp` is a gradient plus, in two dimensions, a rotated gradient.
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub du: SeparableSum,
    pub du_nonconforming: SeparableSum,
    pub dp: VectorSpec,
}

impl Perturbation {
    pub fn draw(dom: &BoxDomain, seed: u64) -> Perturbation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = dom.dim();
        let du = normalized(random_sine_sum(&mut rng, dom, 3), dom);

        let mut axes = vec![Factor::cosine_mode(1.0, dom.lower()[0], dom.lengths()[0])];
        for i in 1..d {
            axes.push(Factor::sine_mode(1.0, dom.lower()[i], dom.lengths()[i]));
        }
        let bump = SeparableSum::new(vec![Term::new(rng.gen_range(0.5..1.0), axes)
            .with_time(random_time(&mut rng, dom.is_parabolic()))]);
        let du_nonconforming = normalized(random_sine_sum(&mut rng, dom, 2).add(&bump), dom);

        let h = random_trig_sum(&mut rng, dom, 3);
        let mut dp = VectorSpec::gradient(&h, d);
        if d == 2 {
            let s = random_trig_sum(&mut rng, dom, 2);
            dp = dp.add(&VectorSpec::rotated_gradient(&s));
        }
        let dp = normalized_vec(dp, dom);
        Perturbation {
            du,
            du_nonconforming,
            dp,
        }
    }
}

/// `(ũ, p̃) = (u, p) + ε(δu, δp)` with the conformity of `level`. `ε = 0` returns the
/// exact pair (capabilities still trimmed to the level).
pub fn perturb(case: &ProblemCase, level: Level, eps: f64, seed: u64) -> Result<ApproxPair> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "perturbation scale must be non-negative, got {eps}"
        )));
    }
    let dom = &case.dom;
    let (du, dp) = if eps == 0.0 {
        (None, None)
    } else {
        let pert = Perturbation::draw(dom, seed);
        let du = if level.primal_conforming() {
            pert.du
        } else {
            pert.du_nonconforming
        };
        (
            Some(du.scale(eps).to_field("du", dom)?),
            Some(pert.dp.scale(eps).to_field("dp", dom)?),
        )
    };
    let u_tilde = match &du {
        Some(du) => case.exact_u.add(du),
        None => case.exact_u.clone(),
    }
    .named("u~");
    let p_full = match &dp {
        Some(dp) => case.exact_p.add(dp),
        None => case.exact_p.clone(),
    }
    .named("p~");
    let (u_tilde, p_tilde) = match level {
        Level::VeryConforming => {
            let p = u_tilde.gradient_field()?.named("p~");
            (u_tilde, p)
        }
        Level::ConformingMixed => (u_tilde.without_laplacian(), p_full),
        Level::SemiConformingPrimal => (u_tilde.without_laplacian(), p_full.l2_only()),
        Level::SemiConformingDual => (u_tilde.l2_only(), p_full),
        Level::NonConforming => (u_tilde.l2_only(), p_full.l2_only()),
    };
    let pair = ApproxPair {
        u_tilde,
        p_tilde,
        level,
    };
    pair.check_contract(dom)?;
    Ok(pair)
}

/// Choice of the free fields `(φ, ϕ)` entering the non-conforming bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeStrategy {
    /// `(u, p)`
    Exact,
    /// `0.9 (u, p)`
    Coarse,
    /// k-th sine product and its gradient.
    Basis(usize),
}

/// k-th tuple of positive modes, ordered by total degree then lexicographically.
pub fn mode_tuple(d: usize, k: usize) -> Vec<usize> {
    let mut seen = 0;
    let mut total = d;
    loop {
        let mut tuples = Vec::new();
        compositions(total, d, &mut Vec::new(), &mut tuples);
        if k < seen + tuples.len() {
            return tuples.swap_remove(k - seen);
        }
        seen += tuples.len();
        total += 1;
    }
}

fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 1 {
        let mut t = prefix.clone();
        t.push(total);
        out.push(t);
        return;
    }
    for first in 1..=(total - (parts - 1)) {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// Conforming scalar and div-conforming vector free fields.
pub fn free_fields(case: &ProblemCase, strategy: FreeStrategy) -> Result<(ScalarField, VectorField)> {
    match strategy {
        FreeStrategy::Exact => Ok((
            case.exact_u.clone().named("phi"),
            case.exact_p.clone().named("theta"),
        )),
        FreeStrategy::Coarse => Ok((
            case.exact_u.scale(0.9).named("phi"),
            case.exact_p.scale(0.9).named("theta"),
        )),
        FreeStrategy::Basis(k) => {
            let d = case.dom.dim();
            let modes: Vec<f64> = mode_tuple(d, k).into_iter().map(|m| m as f64).collect();
            let s = SeparableSum::sine_product(&case.dom, &modes, 1.0, Factor::one());
            let phi = s.to_field("phi", &case.dom)?;
            phi.validate(&case.dom)?;
            if !phi.conformity().vanishes_on_boundary {
                return Err(Error::Conformity("basis potential must vanish".into()));
            }
            let theta = VectorSpec::gradient(&s, d).to_field("theta", &case.dom)?;
            Ok((phi, theta))
        }
    }
}

fn sines(dom: &BoxDomain, modes: &[f64], c: f64, time: Factor) -> SeparableSum {
    SeparableSum::sine_product(dom, modes, c, time)
}

/// Closed-form solutions used by the test suites: ten per problem kind, in one and
/// two space dimensions, on unit and non-unit boxes.
pub fn catalog(kind: ProblemKind) -> Vec<ProblemCase> {
    let specs = if kind.is_parabolic() {
        parabolic_specs()
    } else {
        elliptic_specs()
    };
    specs
        .into_iter()
        .map(|(name, dom, spec)| {
            make_case(&format!("{kind}/{name}"), kind, &dom, &spec)
                .expect("catalog entries are valid by construction")
        })
        .collect()
}

fn bubble_1d(a: f64, b: f64) -> Factor {
    // (x - a)(b - x)
    Factor::Poly {
        coeffs: vec![-a * b, a + b, -1.0],
    }
}

fn elliptic_specs() -> Vec<(String, BoxDomain, SeparableSum)> {
    let unit1 = BoxDomain::unit(1).unwrap();
    let unit2 = BoxDomain::unit(2).unwrap();
    let long1 = BoxDomain::new(vec![0.0], vec![2.0]).unwrap();
    let sym1 = BoxDomain::new(vec![-1.0], vec![1.0]).unwrap();
    let rect = BoxDomain::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap();
    let one = Factor::one;
    vec![
        ("sin1".into(), unit1.clone(), sines(&unit1, &[1.0], 1.0, one())),
        ("sin2".into(), unit1.clone(), sines(&unit1, &[2.0], 1.0, one())),
        (
            "sin1+sin2".into(),
            unit1.clone(),
            sines(&unit1, &[1.0], 1.0, one()).add(&sines(&unit1, &[2.0], 0.5, one())),
        ),
        ("long-sin".into(), long1.clone(), sines(&long1, &[1.0], 1.0, one())),
        (
            "sym-bubble".into(),
            sym1,
            SeparableSum::new(vec![Term::new(1.0, vec![bubble_1d(-1.0, 1.0)])]),
        ),
        (
            "bubble".into(),
            unit1.clone(),
            SeparableSum::new(vec![Term::new(4.0, vec![bubble_1d(0.0, 1.0)])]),
        ),
        ("sinsin".into(), unit2.clone(), sines(&unit2, &[1.0, 1.0], 1.0, one())),
        (
            "sinsin-mixed".into(),
            unit2.clone(),
            sines(&unit2, &[1.0, 2.0], 1.0, one()).add(&sines(&unit2, &[2.0, 1.0], 0.3, one())),
        ),
        ("rect".into(), rect.clone(), sines(&rect, &[1.0, 1.0], 1.0, one())),
        (
            "bubble-sin".into(),
            unit2.clone(),
            SeparableSum::new(vec![Term::new(
                4.0,
                vec![bubble_1d(0.0, 1.0), Factor::Sin { k: 1.0, shift: 0.0 }],
            )]),
        ),
    ]
}

fn parabolic_specs() -> Vec<(String, BoxDomain, SeparableSum)> {
    let unit1 = |t: f64| BoxDomain::unit(1).unwrap().with_time_horizon(t).unwrap();
    let unit2 = |t: f64| BoxDomain::unit(2).unwrap().with_time_horizon(t).unwrap();
    let long1 = BoxDomain::new(vec![0.0], vec![2.0])
        .unwrap()
        .with_time_horizon(1.0)
        .unwrap();
    let sym1 = BoxDomain::new(vec![-1.0], vec![1.0])
        .unwrap()
        .with_time_horizon(1.0)
        .unwrap();
    let rect = BoxDomain::new(vec![0.0, 0.0], vec![2.0, 1.0])
        .unwrap()
        .with_time_horizon(1.0)
        .unwrap();
    let decay = |rate: f64| Factor::Exp { rate };
    let poly = |c: &[f64]| Factor::Poly { coeffs: c.to_vec() };
    let d1 = unit1(1.0);
    let d_half = unit1(0.5);
    let d2 = unit1(2.0);
    let q1 = unit2(1.0);
    let q_half = unit2(0.5);
    vec![
        ("exp-sin".into(), d1.clone(), sines(&d1, &[1.0], 1.0, decay(-1.0))),
        ("t-sin".into(), d1.clone(), sines(&d1, &[1.0], 1.0, poly(&[0.0, 1.0]))),
        (
            "quad-sin2".into(),
            d_half.clone(),
            sines(&d_half, &[2.0], 1.0, poly(&[1.0, 0.0, 1.0])),
        ),
        ("long".into(), long1.clone(), sines(&long1, &[1.0], 1.0, decay(-0.5))),
        (
            "sym-bubble".into(),
            sym1,
            SeparableSum::new(vec![
                Term::new(1.0, vec![bubble_1d(-1.0, 1.0)]).with_time(Factor::Cos { k: 0.5, shift: 0.0 })
            ]),
        ),
        (
            "growing-bubble".into(),
            d2.clone(),
            SeparableSum::new(vec![Term::new(4.0, vec![bubble_1d(0.0, 1.0)]).with_time(decay(0.5))]),
        ),
        ("exp-sinsin".into(), q1.clone(), sines(&q1, &[1.0, 1.0], 1.0, decay(-1.0))),
        (
            "mixed-modes".into(),
            q_half.clone(),
            sines(&q_half, &[1.0, 2.0], 1.0, poly(&[0.0, 1.0]))
                .add(&sines(&q_half, &[2.0, 1.0], 1.0, Factor::one())),
        ),
        ("rect".into(), rect.clone(), sines(&rect, &[1.0, 1.0], 1.0, poly(&[1.0, 1.0]))),
        (
            "bubble-sin".into(),
            q1.clone(),
            SeparableSum::new(vec![Term::new(
                4.0,
                vec![bubble_1d(0.0, 1.0), Factor::Sin { k: 1.0, shift: 0.0 }],
            )
            .with_time(decay(-2.0))]),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rd_source_for_sine() {
        let dom = BoxDomain::unit(1).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::one());
        let case = make_case("rd", ProblemKind::ReactionDiffusion, &dom, &u).unwrap();
        for x in [0.1, 0.5, 0.77] {
            let p = Point::space(&[x]);
            let expect = (PI * PI + 1.0) * (PI * x).sin();
            assert!((case.f.eval(&p) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_source_2d() {
        let dom = BoxDomain::unit(2).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0, 1.0], 1.0, Factor::one());
        let case = make_case("d", ProblemKind::Poisson, &dom, &u).unwrap();
        let p = Point::space(&[0.3, 0.6]);
        let expect = 2.0 * PI * PI * (PI * 0.3).sin() * (PI * 0.6).sin();
        assert!((case.f.eval(&p) - expect).abs() < 1e-12);
    }

    #[test]
    fn heat_source_and_initial_value() {
        let dom = BoxDomain::unit(1).unwrap().with_time_horizon(1.0).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::Exp { rate: -1.0 });
        let case = make_case("h", ProblemKind::Heat, &dom, &u).unwrap();
        let p = Point::new(0.4, &[0.2]);
        let expect = (PI * PI - 1.0) * (-0.4f64).exp() * (PI * 0.2).sin();
        assert!((case.f.eval(&p) - expect).abs() < 1e-12);
        let u0 = case.u0.as_ref().unwrap();
        assert!((u0.eval(&Point::new(0.9, &[0.2])) - (PI * 0.2).sin()).abs() < 1e-15);
        assert!(!u0.is_time_dependent());
    }

    #[test]
    fn kind_domain_mismatch() {
        let dom = BoxDomain::unit(1).unwrap();
        let u = SeparableSum::sine_product(&dom, &[1.0], 1.0, Factor::one());
        assert_eq!(
            make_case("x", ProblemKind::Heat, &dom, &u).unwrap_err(),
            Error::NotParabolic
        );
        let cyl = dom.clone().with_time_horizon(1.0).unwrap();
        assert!(make_case("x", ProblemKind::Poisson, &cyl, &u).is_err());
    }

    #[test]
    fn nonvanishing_solution_rejected() {
        let dom = BoxDomain::unit(1).unwrap();
        let u = SeparableSum::new(vec![Term::new(1.0, vec![Factor::Cos { k: 1.0, shift: 0.0 }])]);
        assert!(matches!(
            make_case("x", ProblemKind::Poisson, &dom, &u),
            Err(Error::Conformity(_))
        ));
    }

    #[test]
    fn field_case_needs_laplacian() {
        let dom = BoxDomain::unit(1).unwrap();
        let u = ScalarField::new("u", |p| (PI * p.x[0]).sin())
            .with_grad(|p| [PI * (PI * p.x[0]).cos(), 0.0, 0.0]);
        assert!(matches!(
            case_from_field("x", ProblemKind::Poisson, &dom, u),
            Err(Error::MissingCapability { capability: "laplacian", .. })
        ));
    }

    #[test]
    fn catalog_cases_satisfy_pde_pointwise() {
        for kind in ProblemKind::ALL {
            let cases = catalog(kind);
            assert!(cases.len() >= 10);
            for c in &cases {
                let defect = c.max_defect(1000, 3).unwrap();
                assert!(defect <= 1e-10, "{}: {defect}", c.name);
            }
        }
    }

    #[test]
    fn perturbation_levels_honour_contracts() {
        let case = &catalog(ProblemKind::ReactionDiffusion)[6];
        for level in Level::ALL {
            let a = perturb(case, level, 1.0, 11).unwrap();
            assert_eq!(a.level, level);
            let u = a.u_tilde.conformity();
            let p = a.p_tilde.conformity();
            assert_eq!(u.vanishes_on_boundary, level.primal_conforming());
            assert_eq!(u.has_grad, level.primal_conforming());
            assert_eq!(p.has_div, level.dual_conforming());
            assert_eq!(u.has_laplacian, level == Level::VeryConforming);
        }
    }

    #[test]
    fn nonconforming_perturbation_leaves_h10() {
        let case = &catalog(ProblemKind::Poisson)[0];
        let a = perturb(case, Level::NonConforming, 1.0, 5).unwrap();
        assert!(a.u_tilde.max_boundary_value(&case.dom, &[0.0]) > 1e-3);
    }

    #[test]
    fn perturbation_is_unit_and_deterministic() {
        let dom = BoxDomain::unit(2).unwrap().with_time_horizon(0.7).unwrap();
        let a = Perturbation::draw(&dom, 42);
        let b = Perturbation::draw(&dom, 42);
        assert_eq!(a.du, b.du);
        assert!((a.du.l2_norm_sq(&dom) - 1.0).abs() < 1e-12);
        assert!((a.dp.l2_norm_sq(&dom) - 1.0).abs() < 1e-12);
        assert!(a.du.max_boundary_value(&dom) < 1e-12);
        assert_ne!(Perturbation::draw(&dom, 43).du, a.du);
    }

    #[test]
    fn negative_eps_rejected() {
        let case = &catalog(ProblemKind::Poisson)[0];
        assert!(perturb(case, Level::ConformingMixed, -0.1, 0).is_err());
    }

    #[test]
    fn mode_tuples_enumerate_in_degree_order() {
        assert_eq!(mode_tuple(1, 0), vec![1]);
        assert_eq!(mode_tuple(1, 4), vec![5]);
        assert_eq!(mode_tuple(2, 0), vec![1, 1]);
        assert_eq!(mode_tuple(2, 1), vec![1, 2]);
        assert_eq!(mode_tuple(2, 2), vec![2, 1]);
        assert_eq!(mode_tuple(2, 3), vec![1, 3]);
    }

    #[test]
    fn free_field_strategies() {
        let case = &catalog(ProblemKind::ReactionDiffusion)[0];
        let p = Point::space(&[0.3]);
        let (phi, theta) = free_fields(case, FreeStrategy::Coarse).unwrap();
        assert!((phi.eval(&p) - 0.9 * (PI * 0.3).sin()).abs() < 1e-15);
        assert!((theta.eval(&p)[0] - 0.9 * PI * (PI * 0.3).cos()).abs() < 1e-14);
        let (phi, theta) = free_fields(case, FreeStrategy::Basis(2)).unwrap();
        assert!(phi.conformity().vanishes_on_boundary);
        assert!(theta.conformity().has_div);
        assert!((phi.eval(&p) - (3.0 * PI * 0.3).sin()).abs() < 1e-14);
    }
}
