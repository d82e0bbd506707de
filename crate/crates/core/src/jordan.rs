//! Jordan extension towers: the smallest overring `A` of `R` on which an
//! injective endomorphism `sigma` becomes an automorphism, realized as a
//! union of formal preimages `sigma^-n(R)`.
//!
//! A tower element `(n, r)` denotes `sigma^-n(r)`. Canonical form has
//! `n = 0` or `r` outside the image of `sigma`, decided by the base ring's
//! exact preimage procedure; equality on canonical forms is sound because
//! `sigma` is injective. Arithmetic lifts both operands to a common level,
//! operates in `R`, and renormalizes.

use crate::ore::{skew_mul, FieldOreContext, OreError, SkewContext, SkewPoly};
use crate::scalars::{Scalar, ScalarDeriv, ScalarEndo, ScalarField};
use crate::semisimple::{SsElem, SsEndo, SsRing};
use crate::verify::VerifyReport;
use rand::{Rng, RngCore};
use std::collections::BTreeMap;
use thiserror::Error;

/// Levels beyond this are refused; desk-scale work never comes close.
pub const LEVEL_CAP: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JordanError {
    #[error("tower level cap {LEVEL_CAP} exceeded (needed {needed})")]
    LevelCap { needed: u64 },
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("operation requires delta = 0 in the context")]
    NonzeroDelta,
    #[error("quantization scalar missing or not sigma/delta invariant")]
    NotQuantized,
    #[error("invalid tower base: {0}")]
    InvalidBase(String),
}

/// What the tower needs from the base ring: exact arithmetic, `sigma`, and a
/// decision procedure for membership in the image of `sigma`.
pub trait JordanBase {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn sigma_apply(&self, a: &Self::Elem) -> Self::Elem;
    /// Exact preimage under `sigma`; `None` certifies `a` is not in the image.
    fn sigma_preimage(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn invert(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn render(&self, a: &Self::Elem) -> String;
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;
}

/// Scalar field base `K` with `sigma: t -> c t^k`.
#[derive(Debug, Clone)]
pub struct FieldJordanBase {
    pub field: ScalarField,
    pub sigma: ScalarEndo,
}

impl FieldJordanBase {
    pub fn new(field: ScalarField, sigma: ScalarEndo) -> Result<Self, JordanError> {
        if matches!(sigma, ScalarEndo::Map(_)) && !field.is_rational() {
            return Err(JordanError::InvalidBase(
                "F_p admits only the identity endomorphism".into(),
            ));
        }
        Ok(FieldJordanBase { field, sigma })
    }
}

impl JordanBase for FieldJordanBase {
    type Elem = Scalar;

    fn zero(&self) -> Scalar {
        self.field.zero()
    }
    fn one(&self) -> Scalar {
        self.field.one()
    }
    fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.field.add(a, b)
    }
    fn neg(&self, a: &Scalar) -> Scalar {
        self.field.neg(a)
    }
    fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.field.mul(a, b)
    }
    fn is_zero(&self, a: &Scalar) -> bool {
        self.field.is_zero(a)
    }
    fn sigma_apply(&self, a: &Scalar) -> Scalar {
        self.field.endo_apply(&self.sigma, a)
    }
    fn sigma_preimage(&self, a: &Scalar) -> Option<Scalar> {
        self.field.endo_preimage(&self.sigma, a)
    }
    fn invert(&self, a: &Scalar) -> Option<Scalar> {
        self.field.inv(a)
    }
    fn render(&self, a: &Scalar) -> String {
        self.field.render(a)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> Scalar {
        self.field.sample_tame(rng)
    }
}

/// Semisimple base with a structured injective endomorphism.
#[derive(Debug, Clone)]
pub struct SsJordanBase {
    pub ring: SsRing,
    pub sigma: SsEndo,
}

impl JordanBase for SsJordanBase {
    type Elem = SsElem;

    fn zero(&self) -> SsElem {
        self.ring.zero()
    }
    fn one(&self) -> SsElem {
        self.ring.one()
    }
    fn add(&self, a: &SsElem, b: &SsElem) -> SsElem {
        self.ring.add(a, b)
    }
    fn neg(&self, a: &SsElem) -> SsElem {
        self.ring.neg(a)
    }
    fn mul(&self, a: &SsElem, b: &SsElem) -> SsElem {
        self.ring.mul(a, b)
    }
    fn is_zero(&self, a: &SsElem) -> bool {
        self.ring.is_zero(a)
    }
    fn sigma_apply(&self, a: &SsElem) -> SsElem {
        self.sigma.apply(&self.ring, a)
    }
    fn sigma_preimage(&self, a: &SsElem) -> Option<SsElem> {
        self.sigma.preimage(&self.ring, a)
    }
    fn invert(&self, a: &SsElem) -> Option<SsElem> {
        self.ring.invert(a).ok()
    }
    fn render(&self, a: &SsElem) -> String {
        self.ring.render(a)
    }
    fn sample(&self, rng: &mut dyn RngCore) -> SsElem {
        self.ring.sample_tame(rng)
    }
}

/// Element of the tower: denotes `sigma^-level(body)`. Constructed only
/// through normalization, so derived equality is equality in the tower.
#[derive(Debug, Clone, PartialEq)]
pub struct TowerElem<E> {
    level: u32,
    body: E,
}

impl<E> TowerElem<E> {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn body(&self) -> &E {
        &self.body
    }
}

/// The tower ring `A` over a base.
#[derive(Debug, Clone)]
pub struct JordanRing<B: JordanBase> {
    pub base: B,
}

impl<B: JordanBase> JordanRing<B> {
    pub fn new(base: B) -> Self {
        JordanRing { base }
    }

    /// Canonical element denoting `sigma^-level(body)`.
    pub fn elem(&self, level: u32, body: B::Elem) -> Result<TowerElem<B::Elem>, JordanError> {
        if level > LEVEL_CAP {
            return Err(JordanError::LevelCap {
                needed: level as u64,
            });
        }
        Ok(self.normalize(level, body))
    }

    fn normalize(&self, mut level: u32, mut body: B::Elem) -> TowerElem<B::Elem> {
        while level > 0 {
            match self.base.sigma_preimage(&body) {
                Some(pre) => {
                    body = pre;
                    level -= 1;
                }
                None => break,
            }
        }
        TowerElem { level, body }
    }

    pub fn embed(&self, r: B::Elem) -> TowerElem<B::Elem> {
        self.normalize(0, r)
    }

    pub fn zero(&self) -> TowerElem<B::Elem> {
        self.embed(self.base.zero())
    }

    pub fn one(&self) -> TowerElem<B::Elem> {
        self.embed(self.base.one())
    }

    pub fn is_zero(&self, a: &TowerElem<B::Elem>) -> bool {
        a.level == 0 && self.base.is_zero(&a.body)
    }

    /// Representative of `a` at level `m >= level(a)`.
    pub fn lift(&self, a: &TowerElem<B::Elem>, m: u32) -> B::Elem {
        assert!(m >= a.level, "cannot lift level {} to {}", a.level, m);
        let mut body = a.body.clone();
        for _ in a.level..m {
            body = self.base.sigma_apply(&body);
        }
        body
    }

    pub fn add(&self, a: &TowerElem<B::Elem>, b: &TowerElem<B::Elem>) -> TowerElem<B::Elem> {
        let m = a.level.max(b.level);
        self.normalize(m, self.base.add(&self.lift(a, m), &self.lift(b, m)))
    }

    pub fn neg(&self, a: &TowerElem<B::Elem>) -> TowerElem<B::Elem> {
        TowerElem {
            level: a.level,
            body: self.base.neg(&a.body),
        }
    }

    pub fn sub(&self, a: &TowerElem<B::Elem>, b: &TowerElem<B::Elem>) -> TowerElem<B::Elem> {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &TowerElem<B::Elem>, b: &TowerElem<B::Elem>) -> TowerElem<B::Elem> {
        let m = a.level.max(b.level);
        self.normalize(m, self.base.mul(&self.lift(a, m), &self.lift(b, m)))
    }

    pub fn invert(&self, a: &TowerElem<B::Elem>) -> Option<TowerElem<B::Elem>> {
        let inv = self.base.invert(&a.body)?;
        Some(self.normalize(a.level, inv))
    }

    /// The extension of `sigma` to the tower; bijective, restricts to
    /// `sigma` on level 0.
    pub fn sigma_bar(&self, a: &TowerElem<B::Elem>) -> TowerElem<B::Elem> {
        self.normalize(a.level, self.base.sigma_apply(&a.body))
    }

    pub fn sigma_bar_inv(
        &self,
        a: &TowerElem<B::Elem>,
    ) -> Result<TowerElem<B::Elem>, JordanError> {
        if a.level + 1 > LEVEL_CAP {
            return Err(JordanError::LevelCap {
                needed: a.level as u64 + 1,
            });
        }
        Ok(self.normalize(a.level + 1, a.body.clone()))
    }

    /// `sigma_bar^i` for any integer `i`.
    pub fn sigma_bar_pow(
        &self,
        a: &TowerElem<B::Elem>,
        i: i64,
    ) -> Result<TowerElem<B::Elem>, JordanError> {
        let mut out = a.clone();
        if i >= 0 {
            for _ in 0..i {
                out = self.sigma_bar(&out);
            }
        } else {
            for _ in 0..(-i) {
                out = self.sigma_bar_inv(&out)?;
            }
        }
        Ok(out)
    }

    pub fn render(&self, a: &TowerElem<B::Elem>) -> String {
        if a.level == 0 {
            self.base.render(&a.body)
        } else {
            format!("sigma^-{}({})", a.level, self.base.render(&a.body))
        }
    }

    pub fn sample(&self, max_level: u32, rng: &mut dyn RngCore) -> TowerElem<B::Elem> {
        let level = rng.gen_range(0..=max_level);
        self.normalize(level, self.base.sample(rng))
    }
}

/// Ring and automorphism checks for the tower on random samples.
pub fn verify_jordan<B: JordanBase>(
    jordan: &JordanRing<B>,
    samples: usize,
    max_level: u32,
    rng: &mut dyn RngCore,
) -> VerifyReport {
    let mut report = VerifyReport::new();
    let mut ring_ok = true;
    let mut auto_ok = true;
    let mut round_ok = true;
    let mut lands_ok = true;
    let mut restrict_ok = true;
    for _ in 0..samples {
        let a = jordan.sample(max_level, rng);
        let b = jordan.sample(max_level, rng);
        let c = jordan.sample(max_level, rng);
        // Associativity and distributivity through the level-alignment path.
        let ab_c = jordan.mul(&jordan.mul(&a, &b), &c);
        let a_bc = jordan.mul(&a, &jordan.mul(&b, &c));
        let dist = jordan.sub(
            &jordan.mul(&a, &jordan.add(&b, &c)),
            &jordan.add(&jordan.mul(&a, &b), &jordan.mul(&a, &c)),
        );
        if ab_c != a_bc || !jordan.is_zero(&dist) {
            ring_ok = false;
        }
        let sab = jordan.sigma_bar(&jordan.mul(&a, &b));
        let sa_sb = jordan.mul(&jordan.sigma_bar(&a), &jordan.sigma_bar(&b));
        let sadd = jordan.sigma_bar(&jordan.add(&a, &b));
        let sa_plus = jordan.add(&jordan.sigma_bar(&a), &jordan.sigma_bar(&b));
        if sab != sa_sb || sadd != sa_plus {
            auto_ok = false;
        }
        let down_up = jordan
            .sigma_bar_inv(&a)
            .map(|d| jordan.sigma_bar(&d) == a)
            .unwrap_or(false);
        let up_down = jordan
            .sigma_bar_inv(&jordan.sigma_bar(&a))
            .map(|u| u == a)
            .unwrap_or(false);
        if !down_up || !up_down {
            round_ok = false;
        }
        let mut landed = a.clone();
        for _ in 0..a.level() {
            landed = jordan.sigma_bar(&landed);
        }
        if landed.level() != 0 {
            lands_ok = false;
        }
        let r = jordan.base.sample(rng);
        if jordan.sigma_bar(&jordan.embed(r.clone()))
            != jordan.embed(jordan.base.sigma_apply(&r))
        {
            restrict_ok = false;
        }
    }
    report.record(
        "ring-axioms",
        ring_ok,
        format!("associativity and distributivity on {samples} sampled triples"),
    );
    report.record(
        "sigma-bar-homomorphism",
        auto_ok,
        "sigma-bar is additive and multiplicative on samples",
    );
    report.record(
        "sigma-bar-bijective",
        round_ok,
        "sigma-bar and its inverse round-trip on samples",
    );
    report.record(
        "levels-land-in-base",
        lands_ok,
        "sigma-bar^level(a) lies in the base ring for every sample",
    );
    report.record(
        "restricts-to-sigma",
        restrict_ok,
        "sigma-bar agrees with sigma on embedded base elements",
    );
    report
}

/// Compares the iterated inner-twisted map `(I_u sigma)^n` against its closed
/// product form `u^-1 sigma(u^-1) ... sigma^{n-1}(u^-1) sigma^n(a)
/// sigma^{n-1}(u) ... sigma(u) u`, in the tower.
pub fn verify_inner_twist<B: JordanBase>(
    jordan: &JordanRing<B>,
    u: &B::Elem,
    a: &TowerElem<B::Elem>,
    n: usize,
) -> Result<bool, JordanError> {
    let u_inv = jordan
        .base
        .invert(u)
        .ok_or_else(|| JordanError::NotAUnit("inner twist unit".into()))?;
    let u_t = jordan.embed(u.clone());
    let u_inv_t = jordan.embed(u_inv);
    let twisted_sigma = |x: &TowerElem<B::Elem>| {
        jordan.mul(&jordan.mul(&u_inv_t, &jordan.sigma_bar(x)), &u_t)
    };
    let mut iterated = a.clone();
    for _ in 0..n {
        iterated = twisted_sigma(&iterated);
    }
    let mut left = jordan.one();
    let mut right = jordan.one();
    let mut u_inv_pow = u_inv_t.clone();
    let mut u_pow = u_t.clone();
    for i in 0..n {
        left = jordan.mul(&left, &u_inv_pow);
        right = jordan.mul(&u_pow, &right);
        if i + 1 < n {
            u_inv_pow = jordan.sigma_bar(&u_inv_pow);
            u_pow = jordan.sigma_bar(&u_pow);
        }
    }
    let middle = jordan.sigma_bar_pow(a, n as i64)?;
    let closed = jordan.mul(&jordan.mul(&left, &middle), &right);
    if middle.level() == 0 && iterated.level() != 0 {
        return Ok(false);
    }
    Ok(iterated == closed)
}

/// Certifies that the same carrier serves `sigma^n`: every sampled element
/// reaches the base under few enough applications of `sigma-bar^n`, and
/// `sigma-bar^n` is bijective on samples.
pub fn verify_power_extension<B: JordanBase>(
    jordan: &JordanRing<B>,
    n: u32,
    samples: usize,
    max_level: u32,
    rng: &mut dyn RngCore,
) -> VerifyReport {
    let mut report = VerifyReport::new();
    assert!(n >= 1);
    let mut reach_ok = true;
    let mut bij_ok = true;
    let mut detail = String::new();
    for _ in 0..samples {
        let a = jordan.sample(max_level, rng);
        let bound = (a.level() + n - 1) / n + 1;
        let mut cur = a.clone();
        let mut m = 0;
        while cur.level() != 0 && m <= bound {
            cur = jordan
                .sigma_bar_pow(&cur, n as i64)
                .expect("powers only lower the level");
            m += 1;
        }
        if cur.level() != 0 {
            reach_ok = false;
            if detail.is_empty() {
                detail = format!(
                    "element at level {} did not reach the base within {} steps of sigma^{n}",
                    a.level(),
                    bound
                );
            }
        }
        let round = jordan
            .sigma_bar_pow(&a, -(n as i64))
            .and_then(|d| jordan.sigma_bar_pow(&d, n as i64))
            .map(|u| u == a)
            .unwrap_or(false);
        if !round {
            bij_ok = false;
        }
    }
    report.record(
        "reaches-base",
        reach_ok,
        if detail.is_empty() {
            format!("(sigma-bar^{n})^m lands in the base within ceil(level/{n})+1 steps")
        } else {
            detail
        },
    );
    report.record(
        "power-bijective",
        bij_ok,
        format!("sigma-bar^{n} round-trips with its inverse on samples"),
    );
    report
}

/// Extends a q-quantized `delta` to the tower by
/// `delta-bar(a) = q^-n sigma-bar^-n(delta(sigma-bar^n(a)))` with
/// `n = level(a)`; independent of using any larger `n`.
pub fn extend_delta_bar(
    jordan: &JordanRing<FieldJordanBase>,
    delta: &ScalarDeriv,
    q: &Scalar,
    a: &TowerElem<Scalar>,
) -> Result<TowerElem<Scalar>, JordanError> {
    let field = &jordan.base.field;
    if field.is_zero(q)
        || field.endo_apply(&jordan.base.sigma, q) != *q
        || !field.is_zero(&field.deriv_apply(delta, q))
    {
        return Err(JordanError::NotQuantized);
    }
    let q_inv = field.inv(q).ok_or(JordanError::NotQuantized)?;
    let out = delta_bar_via(jordan, delta, &q_inv, a, a.level())?;
    #[cfg(debug_assertions)]
    {
        let wider = delta_bar_via(jordan, delta, &q_inv, a, a.level() + 1)?;
        debug_assert!(
            out == wider,
            "delta-bar value depends on the lifting level"
        );
    }
    Ok(out)
}

/// Compares the two computations of `delta-bar(a)` that lift through levels
/// `n` and `n + 1`; agreement on samples certifies that the extension does
/// not depend on the chosen lifting level.
pub fn verify_delta_bar_levels(
    jordan: &JordanRing<FieldJordanBase>,
    delta: &ScalarDeriv,
    q: &Scalar,
    samples: usize,
    max_level: u32,
    rng: &mut dyn RngCore,
) -> Result<VerifyReport, JordanError> {
    let field = &jordan.base.field;
    let q_inv = field.inv(q).ok_or(JordanError::NotQuantized)?;
    let mut ok = true;
    for _ in 0..samples {
        let a = jordan.sample(max_level, rng);
        let n = a.level();
        if delta_bar_via(jordan, delta, &q_inv, &a, n)?
            != delta_bar_via(jordan, delta, &q_inv, &a, n + 1)?
        {
            ok = false;
        }
    }
    let mut report = VerifyReport::new();
    report.record(
        "level-independent",
        ok,
        format!("lifting through n and n+1 agrees on {samples} samples"),
    );
    Ok(report)
}

fn delta_bar_via(
    jordan: &JordanRing<FieldJordanBase>,
    delta: &ScalarDeriv,
    q_inv: &Scalar,
    a: &TowerElem<Scalar>,
    n: u32,
) -> Result<TowerElem<Scalar>, JordanError> {
    let field = &jordan.base.field;
    let lifted = jordan.lift(a, n);
    let d = field.deriv_apply(delta, &lifted);
    let down = jordan.sigma_bar_pow(&jordan.embed(d), -(n as i64))?;
    let mut scale = field.one();
    for _ in 0..n {
        scale = field.mul(&scale, q_inv);
    }
    Ok(jordan.mul(&jordan.embed(scale), &down))
}

// ---- Skew Laurent ring over the tower ----

/// Finite-support Laurent polynomial `sum a_i x^i`, `i` over all integers,
/// with coefficients in the tower and `x^i a = sigma-bar^i(a) x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewLaurent {
    coeffs: BTreeMap<i64, TowerElem<Scalar>>,
}

impl SkewLaurent {
    pub fn zero() -> Self {
        SkewLaurent {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn term(
        jordan: &JordanRing<FieldJordanBase>,
        i: i64,
        a: TowerElem<Scalar>,
    ) -> Self {
        let mut out = SkewLaurent::zero();
        if !jordan.is_zero(&a) {
            out.coeffs.insert(i, a);
        }
        out
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, TowerElem<Scalar>> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

pub fn laurent_add(
    jordan: &JordanRing<FieldJordanBase>,
    a: &SkewLaurent,
    b: &SkewLaurent,
) -> SkewLaurent {
    let mut out = a.coeffs.clone();
    for (&i, c) in &b.coeffs {
        let sum = match out.get(&i) {
            Some(cur) => jordan.add(cur, c),
            None => c.clone(),
        };
        if jordan.is_zero(&sum) {
            out.remove(&i);
        } else {
            out.insert(i, sum);
        }
    }
    SkewLaurent { coeffs: out }
}

pub fn laurent_mul(
    jordan: &JordanRing<FieldJordanBase>,
    a: &SkewLaurent,
    b: &SkewLaurent,
) -> Result<SkewLaurent, JordanError> {
    let mut out = SkewLaurent::zero();
    for (&i, ac) in &a.coeffs {
        for (&j, bc) in &b.coeffs {
            let twisted = jordan.sigma_bar_pow(bc, i)?;
            let term = SkewLaurent::term(jordan, i + j, jordan.mul(ac, &twisted));
            out = laurent_add(jordan, &out, &term);
        }
    }
    Ok(out)
}

pub fn laurent_render(jordan: &JordanRing<FieldJordanBase>, a: &SkewLaurent) -> String {
    if a.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (&i, c) in a.coeffs.iter().rev() {
        let cs = jordan.render(c);
        let term = match i {
            0 => cs,
            1 => format!("({cs})*x"),
            _ => format!("({cs})*x^{i}"),
        };
        terms.push(term);
    }
    terms.join(" + ")
}

/// Embeds a skew polynomial with twist-only context into the Laurent ring,
/// coefficients at level 0.
pub fn laurent_embed(
    jordan: &JordanRing<FieldJordanBase>,
    ctx: &FieldOreContext,
    f: &SkewPoly<Scalar>,
) -> Result<SkewLaurent, JordanError> {
    if !ctx.delta.is_zero() {
        return Err(JordanError::NonzeroDelta);
    }
    let mut out = SkewLaurent::zero();
    for (i, c) in f.coeffs().iter().enumerate() {
        out = laurent_add(
            jordan,
            &out,
            &SkewLaurent::term(jordan, i as i64, jordan.embed(c.clone())),
        );
    }
    Ok(out)
}

/// Constructive left Ore condition for `S = {x^n}`: returns
/// `f' = sum sigma^n(a_i) x^i` with `x^n f = f' x^n`, verified exactly.
pub fn ore_set_witness(
    ctx: &FieldOreContext,
    f: &SkewPoly<Scalar>,
    n: usize,
) -> Result<SkewPoly<Scalar>, JordanError> {
    if !ctx.delta.is_zero() {
        return Err(JordanError::NonzeroDelta);
    }
    let twisted = SkewPoly::from_coeffs(
        ctx,
        f.coeffs().iter().map(|c| ctx.sigma_iter(c, n)).collect(),
    );
    let xn = SkewPoly::monomial(ctx, ctx.one(), n);
    let lhs = skew_mul(ctx, &xn, f).map_err(ore_to_jordan)?;
    let rhs = skew_mul(ctx, &twisted, &xn).map_err(ore_to_jordan)?;
    assert!(lhs == rhs, "Ore witness identity x^n f = f' x^n failed");
    Ok(twisted)
}

fn ore_to_jordan(e: OreError) -> JordanError {
    JordanError::InvalidBase(e.to_string())
}

// ---- The Ore ring over the tower ----

/// `A[x;sigma-bar,delta-bar]` over a field tower, with the quantization
/// carried along so the extension of sigma to the Ore ring stays available.
#[derive(Debug, Clone)]
pub struct TowerOreContext {
    pub jordan: JordanRing<FieldJordanBase>,
    pub delta: ScalarDeriv,
    pub q: Scalar,
}

impl TowerOreContext {
    pub fn new(
        jordan: JordanRing<FieldJordanBase>,
        delta: ScalarDeriv,
        q: Scalar,
    ) -> Result<Self, JordanError> {
        let field = &jordan.base.field;
        if !delta.is_zero() && delta.sigma != jordan.base.sigma {
            return Err(JordanError::InvalidBase(
                "delta must be twisted by the tower's sigma".into(),
            ));
        }
        if field.is_zero(&q) {
            return Err(JordanError::NotQuantized);
        }
        // Probe the quantized extension once so construction fails loudly.
        let probe = jordan.elem(1, field.one())?;
        extend_delta_bar(&jordan, &delta, &q, &probe)?;
        Ok(TowerOreContext { jordan, delta, q })
    }
}

impl SkewContext for TowerOreContext {
    type Elem = TowerElem<Scalar>;

    fn zero(&self) -> TowerElem<Scalar> {
        self.jordan.zero()
    }
    fn one(&self) -> TowerElem<Scalar> {
        self.jordan.one()
    }
    fn add(&self, a: &TowerElem<Scalar>, b: &TowerElem<Scalar>) -> TowerElem<Scalar> {
        self.jordan.add(a, b)
    }
    fn neg(&self, a: &TowerElem<Scalar>) -> TowerElem<Scalar> {
        self.jordan.neg(a)
    }
    fn mul(&self, a: &TowerElem<Scalar>, b: &TowerElem<Scalar>) -> TowerElem<Scalar> {
        self.jordan.mul(a, b)
    }
    fn is_zero(&self, a: &TowerElem<Scalar>) -> bool {
        self.jordan.is_zero(a)
    }
    fn sigma(&self, a: &TowerElem<Scalar>) -> TowerElem<Scalar> {
        self.jordan.sigma_bar(a)
    }
    fn delta(&self, a: &TowerElem<Scalar>) -> TowerElem<Scalar> {
        extend_delta_bar(&self.jordan, &self.delta, &self.q, a)
            .expect("delta-bar never raises the level of its input")
    }
    fn invert(&self, a: &TowerElem<Scalar>) -> Option<TowerElem<Scalar>> {
        self.jordan.invert(a)
    }
    fn render_elem(&self, a: &TowerElem<Scalar>) -> String {
        self.jordan.render(a)
    }
    fn sample_elem(&self, rng: &mut dyn RngCore) -> TowerElem<Scalar> {
        self.jordan.sample(2, rng)
    }
    fn quantization(&self) -> Option<TowerElem<Scalar>> {
        Some(self.jordan.embed(self.q.clone()))
    }
    fn is_domain(&self) -> bool {
        true
    }
}

/// Checks that the Ore ring over the base sits inside the Ore ring over the
/// tower as a Jordan extension: applying the quantized extension of sigma
/// `max coefficient level` times pushes every sampled polynomial down into
/// the base Ore ring.
pub fn verify_ore_jordan_extension(
    ctx: &TowerOreContext,
    samples: usize,
    max_deg: usize,
    rng: &mut dyn RngCore,
) -> Result<VerifyReport, OreError> {
    let mut report = VerifyReport::new();
    let mut ok = true;
    let mut detail = String::new();
    for _ in 0..samples {
        let p = crate::ore::sample_poly(ctx, max_deg, rng);
        let n = p.coeffs().iter().map(|c| c.level()).max().unwrap_or(0);
        let mut cur = p;
        for _ in 0..n {
            cur = crate::ore::extend_sigma(ctx, &cur)?;
        }
        if cur.coeffs().iter().any(|c| c.level() != 0) {
            ok = false;
            if detail.is_empty() {
                detail = format!(
                    "{} applications of the extension left a coefficient above the base",
                    n
                );
            }
        }
    }
    report.record(
        "ore-jordan-extension",
        ok,
        if detail.is_empty() {
            format!("sigma-hat^max-level lands in the base Ore ring on {samples} samples")
        } else {
            detail
        },
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{FieldEndo, PrimeField, RatFun};
    use crate::semisimple::{FactorDesc, Matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    fn rf(num: &[u64]) -> RatFun {
        let f = f5();
        f.rf_new(f.poly(num), f.poly(&[1])).unwrap()
    }

    fn sc(num: &[u64]) -> Scalar {
        Scalar::Rational(rf(num))
    }

    /// Tower over F_5(t) with sigma: t -> t^2.
    fn field_tower() -> JordanRing<FieldJordanBase> {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        JordanRing::new(FieldJordanBase::new(field, sigma).unwrap())
    }

    fn squaring_delta() -> ScalarDeriv {
        ScalarDeriv {
            sigma: ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap()),
            dt: rf(&[0, 4, 1]),
        }
    }

    #[test]
    fn normalization_reduces_exactly_the_image_part() {
        let j = field_tower();
        // (2, t^2) reduces once: t^2 = sigma(t) but t is not in the image.
        let a = j.elem(2, sc(&[0, 0, 1])).unwrap();
        assert_eq!(a.level(), 1);
        assert_eq!(a.body(), &sc(&[0, 1]));
        // Constants are fixed by sigma, so they fall straight to level 0.
        let b = j.elem(3, sc(&[2])).unwrap();
        assert_eq!(b.level(), 0);
        assert_eq!(b.body(), &sc(&[2]));
        // Already canonical stays put; normalization is idempotent.
        let c = j.elem(0, sc(&[0, 1, 1])).unwrap();
        assert_eq!(c.level(), 0);
        let again = j.elem(c.level(), c.body().clone()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn square_root_of_t_squares_back() {
        let j = field_tower();
        let root = j.elem(1, sc(&[0, 1])).unwrap();
        assert_eq!(root.level(), 1);
        let sq = j.mul(&root, &root);
        assert_eq!(sq, j.embed(sc(&[0, 1])));
        let sum = j.add(&root, &j.embed(sc(&[0, 1])));
        // t lifts to level 1 as t^2; t^2 + t is not in the image of sigma.
        assert_eq!(sum.level(), 1);
        assert_eq!(sum.body(), &sc(&[0, 1, 1]));
        let one = j.one();
        assert_eq!(j.mul(&root, &one), root);
    }

    #[test]
    fn sigma_bar_and_inverse_round_trip() {
        let j = field_tower();
        let root = j.elem(1, sc(&[0, 1])).unwrap();
        assert_eq!(j.sigma_bar(&root), j.embed(sc(&[0, 1])));
        let down = j.sigma_bar_inv(&j.embed(sc(&[0, 1]))).unwrap();
        assert_eq!(down, root);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let a = j.sample(3, &mut rng);
            assert_eq!(j.sigma_bar(&j.sigma_bar_inv(&a).unwrap()), a);
        }
    }

    #[test]
    fn level_cap_is_a_typed_error() {
        let j = field_tower();
        let err = j.elem(65, sc(&[0, 1])).unwrap_err();
        assert_eq!(err, JordanError::LevelCap { needed: 65 });
    }

    #[test]
    fn field_tower_passes_the_jordan_suite() {
        let j = field_tower();
        let report = verify_jordan(&j, 200, 3, &mut ChaCha8Rng::seed_from_u64(22));
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn finite_semisimple_base_degenerates_to_level_zero() {
        let f3 = ScalarField::Prime(PrimeField::new(3).unwrap());
        let ring = SsRing::new(vec![
            FactorDesc { n: 1, field: f3 },
            FactorDesc { n: 1, field: f3 },
        ])
        .unwrap();
        let sigma = SsEndo::new(
            &ring,
            vec![1, 0],
            vec![Matrix::identity(&f3, 1), Matrix::identity(&f3, 1)],
            vec![ScalarEndo::Identity, ScalarEndo::Identity],
        )
        .unwrap();
        let j = JordanRing::new(SsJordanBase { ring, sigma });
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let a = j.sample(3, &mut rng);
            assert_eq!(a.level(), 0);
        }
        let report = verify_jordan(&j, 100, 3, &mut rng);
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    /// Base whose preimage oracle lies: it certifies nothing as an image
    /// member, so normalization never reduces.
    struct BrokenBase(FieldJordanBase);

    impl JordanBase for BrokenBase {
        type Elem = Scalar;
        fn zero(&self) -> Scalar {
            self.0.zero()
        }
        fn one(&self) -> Scalar {
            self.0.one()
        }
        fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
            self.0.add(a, b)
        }
        fn neg(&self, a: &Scalar) -> Scalar {
            self.0.neg(a)
        }
        fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
            self.0.mul(a, b)
        }
        fn is_zero(&self, a: &Scalar) -> bool {
            self.0.is_zero(a)
        }
        fn sigma_apply(&self, a: &Scalar) -> Scalar {
            self.0.sigma_apply(a)
        }
        fn sigma_preimage(&self, _a: &Scalar) -> Option<Scalar> {
            None
        }
        fn invert(&self, a: &Scalar) -> Option<Scalar> {
            self.0.invert(a)
        }
        fn render(&self, a: &Scalar) -> String {
            self.0.render(a)
        }
        fn sample(&self, rng: &mut dyn RngCore) -> Scalar {
            self.0.sample(rng)
        }
    }

    #[test]
    fn broken_preimage_oracle_fails_the_suite() {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        let j = JordanRing::new(BrokenBase(FieldJordanBase::new(field, sigma).unwrap()));
        let report = verify_jordan(&j, 100, 3, &mut ChaCha8Rng::seed_from_u64(24));
        assert!(!report.passed());
        // Unreduced zeros break zero detection before the level checks run.
        let failure = report.first_failure().unwrap();
        assert!(
            failure.name == "ring-axioms"
                || failure.name == "levels-land-in-base"
                || failure.name == "sigma-bar-bijective",
            "{failure:?}"
        );
    }

    #[test]
    fn inner_twist_closed_form_matches_iteration() {
        let f3 = ScalarField::Prime(PrimeField::new(3).unwrap());
        let ring = SsRing::new(vec![FactorDesc { n: 2, field: f3 }]).unwrap();
        let swap = Matrix::new(
            2,
            vec![
                Scalar::Prime(0),
                Scalar::Prime(1),
                Scalar::Prime(1),
                Scalar::Prime(0),
            ],
        )
        .unwrap();
        // sigma conjugates by the swap matrix, so it is not the identity.
        let sigma = SsEndo::new(
            &ring,
            vec![0],
            vec![swap.clone()],
            vec![ScalarEndo::Identity],
        )
        .unwrap();
        let j = JordanRing::new(SsJordanBase {
            ring: ring.clone(),
            sigma,
        });
        let mut u = ring.zero();
        *u.part_mut(0) = Matrix::new(
            2,
            vec![
                Scalar::Prime(1),
                Scalar::Prime(1),
                Scalar::Prime(0),
                Scalar::Prime(1),
            ],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for n in 0..=4 {
            for _ in 0..20 {
                let a = j.sample(0, &mut rng);
                assert!(verify_inner_twist(&j, &u, &a, n).unwrap());
            }
        }
        // u = 1 reduces to sigma^n.
        let one = ring.one();
        let a = j.sample(0, &mut rng);
        assert!(verify_inner_twist(&j, &one, &a, 3).unwrap());
        // A singular u is refused by name.
        let err = verify_inner_twist(&j, &ring.zero(), &a, 1).unwrap_err();
        assert!(matches!(err, JordanError::NotAUnit(_)));
    }

    #[test]
    fn power_extension_reaches_base_at_the_expected_step() {
        let j = field_tower();
        // a = sigma^-3(t): two applications of sigma-bar^2 land in the base.
        let a = j.elem(3, sc(&[0, 1])).unwrap();
        assert_eq!(a.level(), 3);
        let once = j.sigma_bar_pow(&a, 2).unwrap();
        assert_ne!(once.level(), 0);
        let twice = j.sigma_bar_pow(&once, 2).unwrap();
        assert_eq!(twice.level(), 0);
        let report = verify_power_extension(&j, 2, 200, 4, &mut ChaCha8Rng::seed_from_u64(26));
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn towers_for_sigma_and_sigma_squared_share_canonical_forms() {
        let j1 = field_tower();
        let field = ScalarField::Rational(f5());
        let sigma2 = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 4).unwrap());
        let j2 = JordanRing::new(FieldJordanBase::new(field, sigma2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..100 {
            let r = j1.base.sample(&mut rng);
            for i in 0u32..=2 {
                let via_sigma = j1.elem(2 * i, r.clone()).unwrap();
                let via_square = j2.elem(i, r.clone()).unwrap();
                // Convert the sigma^2-tower form back into the sigma tower.
                let matched = j1.elem(2 * via_square.level(), via_square.body().clone()).unwrap();
                assert_eq!(via_sigma, matched);
            }
        }
    }

    #[test]
    fn delta_bar_matches_hand_values() {
        let j = field_tower();
        let delta = squaring_delta();
        let q = sc(&[1]);
        // Level 0 is plain delta.
        let t = j.embed(sc(&[0, 1]));
        assert_eq!(
            extend_delta_bar(&j, &delta, &q, &t).unwrap(),
            j.embed(sc(&[0, 4, 1]))
        );
        // delta-bar(sigma^-1(t)) = sigma^-1(t^2 - t).
        let root = j.elem(1, sc(&[0, 1])).unwrap();
        let want = j.elem(1, sc(&[0, 4, 1])).unwrap();
        assert_eq!(want.level(), 1);
        assert_eq!(extend_delta_bar(&j, &delta, &q, &root).unwrap(), want);
    }

    #[test]
    fn delta_bar_is_independent_of_the_lifting_level() {
        let j = field_tower();
        let delta = squaring_delta();
        let q_inv = sc(&[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        for _ in 0..200 {
            let a = j.sample(2, &mut rng);
            let n = a.level();
            let via_n1 = delta_bar_via(&j, &delta, &q_inv, &a, n + 1).unwrap();
            let via_n2 = delta_bar_via(&j, &delta, &q_inv, &a, n + 2).unwrap();
            assert_eq!(via_n1, via_n2);
            assert_eq!(via_n1, delta_bar_via(&j, &delta, &q_inv, &a, n).unwrap());
        }
    }

    #[test]
    fn delta_bar_satisfies_leibniz_with_sigma_bar() {
        let j = field_tower();
        let delta = squaring_delta();
        let q = sc(&[1]);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..500 {
            let a = j.sample(2, &mut rng);
            let b = j.sample(2, &mut rng);
            let lhs = extend_delta_bar(&j, &delta, &q, &j.mul(&a, &b)).unwrap();
            let rhs = j.add(
                &j.mul(&extend_delta_bar(&j, &delta, &q, &a).unwrap(), &b),
                &j.mul(&j.sigma_bar(&a), &extend_delta_bar(&j, &delta, &q, &b).unwrap()),
            );
            assert_eq!(lhs, rhs);
        }
    }

    fn twist_only_ctx() -> FieldOreContext {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        FieldOreContext::new(field, sigma, ScalarDeriv::zero(&field), Some(sc(&[1]))).unwrap()
    }

    #[test]
    fn ore_witness_for_the_one_step_example() {
        let ctx = twist_only_ctx();
        // f = t*x, n = 1: x (t x) = t^2 x^2 = (t^2 x) x.
        let f = SkewPoly::monomial(&ctx, sc(&[0, 1]), 1);
        let w = ore_set_witness(&ctx, &f, 1).unwrap();
        assert_eq!(w, SkewPoly::monomial(&ctx, sc(&[0, 0, 1]), 1));
        // Constants twist by sigma^3: t moves to t^8.
        let c = SkewPoly::constant(&ctx, sc(&[0, 1]));
        let w3 = ore_set_witness(&ctx, &c, 3).unwrap();
        assert_eq!(
            w3,
            SkewPoly::constant(&ctx, sc(&[0, 0, 0, 0, 0, 0, 0, 0, 1]))
        );
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..500 {
            let f = crate::ore::sample_poly(&ctx, 4, &mut rng);
            for n in 0..=3 {
                ore_set_witness(&ctx, &f, n).unwrap();
            }
        }
    }

    #[test]
    fn ore_witness_requires_twist_only_contexts() {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        let ctx = FieldOreContext::new(field, sigma, squaring_delta(), None).unwrap();
        let err = ore_set_witness(&ctx, &SkewPoly::x(&ctx), 1).unwrap_err();
        assert_eq!(err, JordanError::NonzeroDelta);
    }

    #[test]
    fn laurent_embedding_is_multiplicative_and_inverts_x() {
        let j = field_tower();
        let ctx = twist_only_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let f = crate::ore::sample_poly(&ctx, 3, &mut rng);
            let g = crate::ore::sample_poly(&ctx, 3, &mut rng);
            let prod = skew_mul(&ctx, &f, &g).unwrap();
            let lhs = laurent_embed(&j, &ctx, &prod).unwrap();
            let rhs = laurent_mul(
                &j,
                &laurent_embed(&j, &ctx, &f).unwrap(),
                &laurent_embed(&j, &ctx, &g).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs);
        }
        let x = SkewLaurent::term(&j, 1, j.one());
        let x_inv = SkewLaurent::term(&j, -1, j.one());
        let one = SkewLaurent::term(&j, 0, j.one());
        assert_eq!(laurent_mul(&j, &x, &x_inv).unwrap(), one);
        assert_eq!(laurent_mul(&j, &x_inv, &x).unwrap(), one);
        // x^-1 * (t x) = sigma^-1(t) lands at degree 0 with a level-1 body.
        let tx = SkewLaurent::term(&j, 1, j.embed(sc(&[0, 1])));
        let moved = laurent_mul(&j, &x_inv, &tx).unwrap();
        let c0 = moved.coeffs().get(&0).unwrap();
        assert_eq!(c0.level(), 1);
    }

    #[test]
    fn tower_ore_ring_is_a_jordan_extension_of_the_base_ore_ring() {
        let j = field_tower();
        let tctx = TowerOreContext::new(j, squaring_delta(), sc(&[1])).unwrap();
        let report =
            verify_ore_jordan_extension(&tctx, 100, 3, &mut ChaCha8Rng::seed_from_u64(32))
                .unwrap();
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn tower_renders_with_explicit_levels() {
        let j = field_tower();
        let root = j.elem(1, sc(&[0, 1])).unwrap();
        assert_eq!(j.render(&root), "sigma^-1(t)");
        assert_eq!(j.render(&j.embed(sc(&[0, 1]))), "t");
    }
}
