//! Skew polynomials `R[x;sigma,delta]` with left coefficients and the
//! commutation rule `x*r = sigma(r)x + delta(r)`.
//!
//! A coefficient ring plugs in through [`SkewContext`]; polynomials are plain
//! coefficient vectors (ascending in `x`, no stored leading zero) and all
//! operations are free functions taking the context by handle. Products,
//! quotients and the verification routines are exact; anything that would
//! grow past the `x`-degree cap returns a typed error instead of truncating.

use crate::linalg;
use crate::scalars::{verify_quantization, Scalar, ScalarDeriv, ScalarEndo, ScalarField};
use crate::semisimple::{orbits, SsDeriv, SsElem, SsEndo, SsRing};
use crate::verify::VerifyReport;
use rand::rngs::StdRng;
use rand::{RngCore, SeedableRng};
use thiserror::Error;

/// Hard cap on the `x`-degree of any computed skew polynomial.
pub const X_DEGREE_CAP: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OreError {
    #[error("x-degree cap {X_DEGREE_CAP} exceeded (needed degree {needed})")]
    DegreeCapExceeded { needed: usize },
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("zero input where a nonzero polynomial is required")]
    ZeroInput,
    #[error("unsupported coefficients: {0}")]
    UnsupportedCoefficients(String),
    #[error("context carries no verified quantization scalar")]
    NotQuantized,
    #[error("context rejected: {0}")]
    InvalidContext(String),
    #[error("internal identity check failed: {0}")]
    Internal(String),
}

/// Coefficient ring together with `sigma` and `delta`. Everything the skew
/// polynomial engine needs from the base ring goes through this trait.
pub trait SkewContext {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn sigma(&self, a: &Self::Elem) -> Self::Elem;
    fn delta(&self, a: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn render_elem(&self, a: &Self::Elem) -> String;
    fn sample_elem(&self, rng: &mut dyn RngCore) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn sigma_iter(&self, a: &Self::Elem, n: usize) -> Self::Elem {
        let mut out = a.clone();
        for _ in 0..n {
            out = self.sigma(&out);
        }
        out
    }

    /// Central unit `q` with `delta sigma = q sigma delta`, when configured.
    fn quantization(&self) -> Option<Self::Elem> {
        None
    }

    /// Additive spanning set of the coefficient ring, for searches.
    fn coefficient_spanning_set(&self) -> Vec<Self::Elem> {
        vec![self.one()]
    }

    /// Full coefficient list for exhaustive searches, when finite and small.
    fn enumerate_coefficients(&self) -> Option<Vec<Self::Elem>> {
        None
    }

    /// True when the coefficient ring is a domain and `sigma` is injective,
    /// so the Ore extension has no zero divisors at all.
    fn is_domain(&self) -> bool {
        false
    }
}

/// Skew polynomial `sum c_i x^i`; `coeffs[i] = c_i`, leading entry nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewPoly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> SkewPoly<E> {
    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    pub fn from_coeffs<C: SkewContext<Elem = E>>(ctx: &C, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().map_or(false, |c| ctx.is_zero(c)) {
            coeffs.pop();
        }
        SkewPoly { coeffs }
    }

    pub fn constant<C: SkewContext<Elem = E>>(ctx: &C, c: E) -> Self {
        SkewPoly::from_coeffs(ctx, vec![c])
    }

    pub fn one<C: SkewContext<Elem = E>>(ctx: &C) -> Self {
        SkewPoly::constant(ctx, ctx.one())
    }

    pub fn x<C: SkewContext<Elem = E>>(ctx: &C) -> Self {
        SkewPoly::from_coeffs(ctx, vec![ctx.zero(), ctx.one()])
    }

    pub fn monomial<C: SkewContext<Elem = E>>(ctx: &C, c: E, d: usize) -> Self {
        let mut coeffs = vec![ctx.zero(); d + 1];
        coeffs[d] = c;
        SkewPoly::from_coeffs(ctx, coeffs)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn coeff_or_zero<C: SkewContext<Elem = E>>(&self, ctx: &C, i: usize) -> E {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ctx.zero())
    }
}

// ---- Arithmetic ----

pub fn skew_add<C: SkewContext>(
    ctx: &C,
    a: &SkewPoly<C::Elem>,
    b: &SkewPoly<C::Elem>,
) -> SkewPoly<C::Elem> {
    let n = a.coeffs.len().max(b.coeffs.len());
    let mut coeffs = Vec::with_capacity(n);
    for i in 0..n {
        coeffs.push(ctx.add(&a.coeff_or_zero(ctx, i), &b.coeff_or_zero(ctx, i)));
    }
    SkewPoly::from_coeffs(ctx, coeffs)
}

pub fn skew_neg<C: SkewContext>(ctx: &C, a: &SkewPoly<C::Elem>) -> SkewPoly<C::Elem> {
    SkewPoly {
        coeffs: a.coeffs.iter().map(|c| ctx.neg(c)).collect(),
    }
}

pub fn skew_sub<C: SkewContext>(
    ctx: &C,
    a: &SkewPoly<C::Elem>,
    b: &SkewPoly<C::Elem>,
) -> SkewPoly<C::Elem> {
    skew_add(ctx, a, &skew_neg(ctx, b))
}

/// Left multiplication by a coefficient: `c * sum a_i x^i = sum (c a_i) x^i`.
pub fn skew_scale<C: SkewContext>(
    ctx: &C,
    c: &C::Elem,
    a: &SkewPoly<C::Elem>,
) -> SkewPoly<C::Elem> {
    SkewPoly::from_coeffs(ctx, a.coeffs.iter().map(|e| ctx.mul(c, e)).collect())
}

/// One commutation pass: `x * sum c_j x^j = sum sigma(c_j) x^{j+1} + delta(c_j) x^j`.
pub fn x_times<C: SkewContext>(
    ctx: &C,
    a: &SkewPoly<C::Elem>,
) -> Result<SkewPoly<C::Elem>, OreError> {
    if a.is_zero() {
        return Ok(SkewPoly::zero());
    }
    let d = a.degree().unwrap();
    if d + 1 > X_DEGREE_CAP {
        return Err(OreError::DegreeCapExceeded { needed: d + 1 });
    }
    let mut coeffs = vec![ctx.zero(); d + 2];
    for (j, c) in a.coeffs.iter().enumerate() {
        coeffs[j + 1] = ctx.add(&coeffs[j + 1], &ctx.sigma(c));
        coeffs[j] = ctx.add(&coeffs[j], &ctx.delta(c));
    }
    Ok(SkewPoly::from_coeffs(ctx, coeffs))
}

/// Exact product. `x^i * g` is expanded by iterating [`x_times`], then the
/// left coefficients of `f` are applied; no closed-form skew binomials.
pub fn skew_mul<C: SkewContext>(
    ctx: &C,
    f: &SkewPoly<C::Elem>,
    g: &SkewPoly<C::Elem>,
) -> Result<SkewPoly<C::Elem>, OreError> {
    let (Some(df), Some(dg)) = (f.degree(), g.degree()) else {
        return Ok(SkewPoly::zero());
    };
    if df + dg > X_DEGREE_CAP {
        return Err(OreError::DegreeCapExceeded { needed: df + dg });
    }
    let mut row = g.clone();
    let mut acc = skew_scale(ctx, &f.coeffs[0], &row);
    for i in 1..=df {
        row = x_times(ctx, &row)?;
        acc = skew_add(ctx, &acc, &skew_scale(ctx, &f.coeffs[i], &row));
    }
    Ok(acc)
}

pub fn skew_pow<C: SkewContext>(
    ctx: &C,
    f: &SkewPoly<C::Elem>,
    n: usize,
) -> Result<SkewPoly<C::Elem>, OreError> {
    let mut acc = SkewPoly::one(ctx);
    for _ in 0..n {
        acc = skew_mul(ctx, &acc, f)?;
    }
    Ok(acc)
}

pub fn sample_poly<C: SkewContext>(
    ctx: &C,
    max_deg: usize,
    rng: &mut dyn RngCore,
) -> SkewPoly<C::Elem> {
    let coeffs = (0..=max_deg).map(|_| ctx.sample_elem(rng)).collect();
    SkewPoly::from_coeffs(ctx, coeffs)
}

// ---- Rendering ----

/// True when the rendered coefficient needs parentheses before `*x^d`:
/// anything with a top-level `+`, `-` or `/`.
fn is_atom(s: &str) -> bool {
    let mut depth = 0usize;
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth = depth.saturating_sub(1),
            '+' | '-' | '/' if depth == 0 => return false,
            _ => {}
        }
    }
    true
}

/// Renders descending in `x`, e.g. `t^2*x + (t^2-t)`.
pub fn skew_render<C: SkewContext>(ctx: &C, f: &SkewPoly<C::Elem>) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut terms = Vec::new();
    for (i, c) in f.coeffs.iter().enumerate().rev() {
        if ctx.is_zero(c) {
            continue;
        }
        let cs = ctx.render_elem(c);
        let xs = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        let term = if xs.is_empty() {
            if is_atom(&cs) || f.coeffs.len() == 1 {
                cs
            } else {
                format!("({cs})")
            }
        } else if cs == "1" {
            xs
        } else if is_atom(&cs) {
            format!("{cs}*{xs}")
        } else {
            format!("({cs})*{xs}")
        };
        terms.push(term);
    }
    terms.join(" + ")
}

// ---- Division, gcd, lclm ----

/// Left division `f = quot*g + rem` with `deg rem < deg g`. Each elimination
/// step solves `c * sigma^d(lc g) = lc f'`, so it needs the twisted leading
/// coefficient of `g` to be invertible.
pub fn left_divide<C: SkewContext>(
    ctx: &C,
    f: &SkewPoly<C::Elem>,
    g: &SkewPoly<C::Elem>,
) -> Result<(SkewPoly<C::Elem>, SkewPoly<C::Elem>), OreError> {
    let Some(dg) = g.degree() else {
        return Err(OreError::DivisionByZeroPoly);
    };
    let lg = g.leading().unwrap().clone();
    let mut rem = f.clone();
    let mut quot = vec![ctx.zero(); f.degree().map_or(0, |df| df.saturating_sub(dg) + 1)];
    while let Some(dr) = rem.degree() {
        if dr < dg {
            break;
        }
        let d = dr - dg;
        let twisted = ctx.sigma_iter(&lg, d);
        let inv = ctx.invert(&twisted).ok_or_else(|| {
            OreError::UnsupportedCoefficients(
                "sigma-twisted leading coefficient of the divisor is not a unit".into(),
            )
        })?;
        let c = ctx.mul(rem.leading().unwrap(), &inv);
        let step = skew_mul(ctx, &SkewPoly::monomial(ctx, c.clone(), d), g)?;
        let next = skew_sub(ctx, &rem, &step);
        debug_assert!(next.degree().map_or(true, |nd| nd < dr));
        quot[d] = ctx.add(&quot[d], &c);
        rem = next;
    }
    let quot = SkewPoly::from_coeffs(ctx, quot);
    #[cfg(debug_assertions)]
    {
        let back = skew_add(ctx, &skew_mul(ctx, &quot, g)?, &rem);
        debug_assert!(
            back == *f,
            "left division postcondition failed: quot*g + rem != f"
        );
    }
    Ok((quot, rem))
}

/// Greatest common right divisor, least common left multiple and their
/// cofactors over field coefficients; every identity is re-checked exactly
/// before returning.
#[derive(Debug, Clone)]
pub struct GcdLclm {
    /// Monic gcd `d` with `R f + R g = R d`.
    pub gcd: SkewPoly<Scalar>,
    /// Cofactors with `gcd = gcd_cof_f * f + gcd_cof_g * g`.
    pub gcd_cof_f: SkewPoly<Scalar>,
    pub gcd_cof_g: SkewPoly<Scalar>,
    /// Monic lclm `h` of minimal degree with `h = lclm_cof_f * f = lclm_cof_g * g`.
    pub lclm: SkewPoly<Scalar>,
    pub lclm_cof_f: SkewPoly<Scalar>,
    pub lclm_cof_g: SkewPoly<Scalar>,
}

pub fn left_gcd_lclm(
    ctx: &FieldOreContext,
    f: &SkewPoly<Scalar>,
    g: &SkewPoly<Scalar>,
) -> Result<GcdLclm, OreError> {
    let (Some(df), Some(dg)) = (f.degree(), g.degree()) else {
        return Err(OreError::ZeroInput);
    };
    // Euclid with cofactors: r_i = s_i*f + t_i*g throughout.
    let mut r0 = f.clone();
    let mut s0 = SkewPoly::one(ctx);
    let mut t0 = SkewPoly::zero();
    let mut r1 = g.clone();
    let mut s1 = SkewPoly::zero();
    let mut t1 = SkewPoly::one(ctx);
    while !r1.is_zero() {
        let (q, r2) = left_divide(ctx, &r0, &r1)?;
        let s2 = skew_sub(ctx, &s0, &skew_mul(ctx, &q, &s1)?);
        let t2 = skew_sub(ctx, &t0, &skew_mul(ctx, &q, &t1)?);
        (r0, s0, t0) = (r1, s1, t1);
        (r1, s1, t1) = (r2, s2, t2);
    }
    let scale = ctx
        .invert(r0.leading().unwrap())
        .ok_or_else(|| OreError::Internal("gcd leading coefficient not invertible".into()))?;
    let gcd = skew_scale(ctx, &scale, &r0);
    let gcd_cof_f = skew_scale(ctx, &scale, &s0);
    let gcd_cof_g = skew_scale(ctx, &scale, &t0);
    let check = skew_add(
        ctx,
        &skew_mul(ctx, &gcd_cof_f, f)?,
        &skew_mul(ctx, &gcd_cof_g, g)?,
    );
    if check != gcd {
        return Err(OreError::Internal(
            "gcd cofactor identity s*f + t*g = gcd failed".into(),
        ));
    }

    // lclm by the bounded-degree linear system: find a, b with a*f = b*g.
    // A nonzero solution exists by dimension count at h = deg f + deg g.
    let field = &ctx.field;
    let mut x_pows_f = vec![f.clone()];
    let mut x_pows_g = vec![g.clone()];
    for i in 1..=dg.max(df) {
        if i <= dg {
            x_pows_f.push(x_times(ctx, &x_pows_f[i - 1])?);
        }
        if i <= df {
            x_pows_g.push(x_times(ctx, &x_pows_g[i - 1])?);
        }
    }
    for h in df.max(dg)..=df + dg {
        let na = h - df + 1;
        let nb = h - dg + 1;
        let mut rows = Vec::with_capacity(h + 1);
        for e in 0..=h {
            let mut row = Vec::with_capacity(na + nb);
            for xf in x_pows_f.iter().take(na) {
                row.push(xf.coeff_or_zero(ctx, e));
            }
            for xg in x_pows_g.iter().take(nb) {
                row.push(field.neg(&xg.coeff_or_zero(ctx, e)));
            }
            rows.push(row);
        }
        let kernel = linalg::kernel_basis(field, &rows);
        let Some(v) = kernel.first() else { continue };
        let a = SkewPoly::from_coeffs(ctx, v[..na].to_vec());
        let b = SkewPoly::from_coeffs(ctx, v[na..].to_vec());
        let raw = skew_mul(ctx, &a, f)?;
        if raw.is_zero() {
            return Err(OreError::Internal("kernel vector gave a zero multiple".into()));
        }
        let scale = ctx.invert(raw.leading().unwrap()).unwrap();
        let lclm = skew_scale(ctx, &scale, &raw);
        let lclm_cof_f = skew_scale(ctx, &scale, &a);
        let lclm_cof_g = skew_scale(ctx, &scale, &b);
        if skew_mul(ctx, &lclm_cof_f, f)? != lclm || skew_mul(ctx, &lclm_cof_g, g)? != lclm {
            return Err(OreError::Internal(
                "lclm cofactor identity a*f = b*g = lclm failed".into(),
            ));
        }
        return Ok(GcdLclm {
            gcd,
            gcd_cof_f,
            gcd_cof_g,
            lclm,
            lclm_cof_f,
            lclm_cof_g,
        });
    }
    Err(OreError::Internal(
        "no lclm found at the degree cap deg f + deg g".into(),
    ))
}

// ---- The quantized extension of sigma ----

/// Extends `sigma` to the whole skew polynomial ring by `x -> q^-1 x`:
/// `sum c_i x^i -> sum sigma(c_i) q^-i x^i`. Since `q` is central, fixed by
/// `sigma` and killed by `delta`, `(q^-1 x)^i = q^-i x^i` exactly.
pub fn extend_sigma<C: SkewContext>(
    ctx: &C,
    f: &SkewPoly<C::Elem>,
) -> Result<SkewPoly<C::Elem>, OreError> {
    let q = ctx.quantization().ok_or(OreError::NotQuantized)?;
    let q_inv = ctx.invert(&q).ok_or(OreError::NotQuantized)?;
    let mut coeffs = Vec::with_capacity(f.coeffs.len());
    let mut q_pow = ctx.one();
    for c in &f.coeffs {
        coeffs.push(ctx.mul(&ctx.sigma(c), &q_pow));
        q_pow = ctx.mul(&q_pow, &q_inv);
    }
    Ok(SkewPoly::from_coeffs(ctx, coeffs))
}

/// Checks that the extension fixes the coefficient embedding, sends `x` to
/// `q^-1 x`, and is multiplicative and injective on sampled pairs.
pub fn verify_extension<C: SkewContext>(
    ctx: &C,
    samples: usize,
    max_deg: usize,
    rng: &mut dyn RngCore,
) -> Result<VerifyReport, OreError> {
    let mut report = VerifyReport::new();
    let q = ctx.quantization().ok_or(OreError::NotQuantized)?;
    let q_inv = ctx.invert(&q).ok_or(OreError::NotQuantized)?;
    let x = SkewPoly::x(ctx);
    report.record(
        "sends-x-to-qinv-x",
        extend_sigma(ctx, &x)? == SkewPoly::monomial(ctx, q_inv, 1),
        "extension maps x to q^-1 x",
    );
    let mut const_ok = true;
    for _ in 0..samples {
        let c = ctx.sample_elem(rng);
        if extend_sigma(ctx, &SkewPoly::constant(ctx, c.clone()))?
            != SkewPoly::constant(ctx, ctx.sigma(&c))
        {
            const_ok = false;
            break;
        }
    }
    report.record(
        "restricts-to-sigma",
        const_ok,
        "extension agrees with sigma on coefficients",
    );
    let mut mult_ok = true;
    let mut inj_ok = true;
    let mut detail = String::new();
    for _ in 0..samples {
        let a = sample_poly(ctx, max_deg, rng);
        let b = sample_poly(ctx, max_deg, rng);
        let lhs = extend_sigma(ctx, &skew_mul(ctx, &a, &b)?)?;
        let rhs = skew_mul(ctx, &extend_sigma(ctx, &a)?, &extend_sigma(ctx, &b)?)?;
        if lhs != rhs {
            mult_ok = false;
            if detail.is_empty() {
                detail = format!(
                    "violated at f = {}, g = {}",
                    skew_render(ctx, &a),
                    skew_render(ctx, &b)
                );
            }
        }
        if !a.is_zero() && extend_sigma(ctx, &a)?.is_zero() {
            inj_ok = false;
        }
    }
    report.record(
        "multiplicative-sampled",
        mult_ok,
        if detail.is_empty() {
            format!("extension is multiplicative on {samples} sampled pairs")
        } else {
            detail
        },
    );
    report.record(
        "injective-sampled",
        inj_ok,
        "extension kills no sampled nonzero polynomial",
    );
    Ok(report)
}

// ---- Concrete contexts ----

/// `K[x;sigma,delta]` over a scalar field `K`.
#[derive(Debug, Clone)]
pub struct FieldOreContext {
    pub field: ScalarField,
    pub sigma: ScalarEndo,
    pub delta: ScalarDeriv,
    pub q: Option<Scalar>,
}

impl FieldOreContext {
    pub fn new(
        field: ScalarField,
        sigma: ScalarEndo,
        delta: ScalarDeriv,
        q: Option<Scalar>,
    ) -> Result<Self, OreError> {
        if matches!(sigma, ScalarEndo::Map(_)) && !field.is_rational() {
            return Err(OreError::InvalidContext(
                "F_p admits only the identity endomorphism".into(),
            ));
        }
        if !delta.is_zero() {
            if !field.is_rational() {
                return Err(OreError::InvalidContext(
                    "F_p admits no nonzero sigma-derivation".into(),
                ));
            }
            if delta.sigma != sigma {
                return Err(OreError::InvalidContext(
                    "delta must be a derivation twisted by the context sigma".into(),
                ));
            }
        }
        if let Some(q) = &q {
            let mut rng = StdRng::seed_from_u64(7);
            let report = verify_quantization(&field, &sigma, &delta, q, 8, &mut rng);
            if !report.passed() {
                let failure = report.first_failure().unwrap();
                return Err(OreError::InvalidContext(format!(
                    "quantization check {} failed: {}",
                    failure.name, failure.detail
                )));
            }
        }
        Ok(FieldOreContext {
            field,
            sigma,
            delta,
            q,
        })
    }
}

impl SkewContext for FieldOreContext {
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
    fn sigma(&self, a: &Scalar) -> Scalar {
        self.field.endo_apply(&self.sigma, a)
    }
    fn delta(&self, a: &Scalar) -> Scalar {
        self.field.deriv_apply(&self.delta, a)
    }
    fn invert(&self, a: &Scalar) -> Option<Scalar> {
        self.field.inv(a)
    }
    fn render_elem(&self, a: &Scalar) -> String {
        self.field.render(a)
    }
    fn sample_elem(&self, rng: &mut dyn RngCore) -> Scalar {
        self.field.sample_tame(rng)
    }
    fn quantization(&self) -> Option<Scalar> {
        self.q.clone()
    }
    fn is_domain(&self) -> bool {
        true
    }
}

/// `R[x;sigma,delta]` over a semisimple coefficient ring.
#[derive(Debug, Clone)]
pub struct SsOreContext {
    pub ring: SsRing,
    pub sigma: SsEndo,
    pub delta: SsDeriv,
}

impl SsOreContext {
    pub fn new(ring: SsRing, sigma: SsEndo, delta: SsDeriv) -> Result<Self, OreError> {
        let mut rng = StdRng::seed_from_u64(7);
        let endo_report = crate::semisimple::verify_endomorphism(&ring, &sigma, 16, &mut rng);
        if !endo_report.passed() {
            let f = endo_report.first_failure().unwrap();
            return Err(OreError::InvalidContext(format!(
                "endomorphism check {} failed: {}",
                f.name, f.detail
            )));
        }
        let ctx = SsOreContext { ring, sigma, delta };
        let basis = |i: usize, j: usize, k: usize| {
            ctx.delta
                .apply(&ctx.ring, &ctx.sigma, &ctx.ring.unit_elem(i, j, k))
        };
        let deriv_report =
            crate::semisimple::verify_sigma_derivation(&ctx.ring, &ctx.sigma, &basis);
        if !deriv_report.passed() {
            let f = deriv_report.first_failure().unwrap();
            return Err(OreError::InvalidContext(format!(
                "derivation check {} failed: {}",
                f.name, f.detail
            )));
        }
        Ok(ctx)
    }
}

impl SkewContext for SsOreContext {
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
    fn sigma(&self, a: &SsElem) -> SsElem {
        self.sigma.apply(&self.ring, a)
    }
    fn delta(&self, a: &SsElem) -> SsElem {
        self.delta.apply(&self.ring, &self.sigma, a)
    }
    fn invert(&self, a: &SsElem) -> Option<SsElem> {
        self.ring.invert(a).ok()
    }
    fn render_elem(&self, a: &SsElem) -> String {
        self.ring.render(a)
    }
    fn sample_elem(&self, rng: &mut dyn RngCore) -> SsElem {
        self.ring.sample_tame(rng)
    }
    fn coefficient_spanning_set(&self) -> Vec<SsElem> {
        self.ring
            .unit_indices()
            .into_iter()
            .map(|(i, j, k)| self.ring.unit_elem(i, j, k))
            .collect()
    }
    fn enumerate_coefficients(&self) -> Option<Vec<SsElem>> {
        self.ring.enumerate().ok()
    }
}

// ---- Leading coefficient chains ----

/// Leading coefficients of degree-`n` members of the truncated two-sided span
/// of the generators, as a canonical basis over `F_p`.
#[derive(Debug, Clone)]
pub struct LcLevel {
    pub n: usize,
    pub dim: usize,
    pub basis: Vec<SsElem>,
}

/// Computes the levels `I_0..I_{n_max}` of the leading-coefficient chain.
/// Multipliers range over monomials `r x^j * g * s x^k` with total degree
/// at most `bound`, `r`, `s` matrix units; the result is a lower
/// approximation of the untruncated chain and is monotone in `bound`.
pub fn leading_coeff_module(
    ctx: &SsOreContext,
    gens: &[SkewPoly<SsElem>],
    n_max: usize,
    bound: usize,
) -> Result<Vec<LcLevel>, OreError> {
    if !ctx.ring.all_prime_fields() {
        return Err(OreError::UnsupportedCoefficients(
            "leading-coefficient chains need finite scalar fields".into(),
        ));
    }
    let ring = &ctx.ring;
    let field = if ring.num_factors() > 0 {
        ScalarField::Prime(*ring.field(0).prime())
    } else {
        ScalarField::Prime(crate::scalars::PrimeField::new(2).unwrap())
    };
    let dim_r: usize = ring.factors().iter().map(|f| f.n * f.n).sum();
    let slots = ring.unit_indices();
    // Coordinates ordered by descending x-degree so that RREF pivots reveal
    // the intersection with each degree filtration level.
    let coord = |deg: usize, slot: usize| (bound - deg) * dim_r + slot;
    let flatten = |w: &SkewPoly<SsElem>| -> Vec<Scalar> {
        let mut v = vec![field.zero(); (bound + 1) * dim_r];
        for (deg, c) in w.coeffs().iter().enumerate() {
            for (si, &(i, r, cc)) in slots.iter().enumerate() {
                v[coord(deg, si)] = c.part(i).get(r, cc).clone();
            }
        }
        v
    };
    let mut rows = Vec::new();
    for g in gens {
        let Some(dgg) = g.degree() else { continue };
        for j in 0..=bound.saturating_sub(dgg) {
            for k in 0..=bound.saturating_sub(dgg + j) {
                for &(i1, a, b) in &slots {
                    let left = SkewPoly::monomial(ctx, ring.unit_elem(i1, a, b), j);
                    let lg = skew_mul(ctx, &left, g)?;
                    for &(i2, c, d) in &slots {
                        let right = SkewPoly::monomial(ctx, ring.unit_elem(i2, c, d), k);
                        let w = skew_mul(ctx, &lg, &right)?;
                        if !w.is_zero() {
                            rows.push(flatten(&w));
                        }
                    }
                }
            }
        }
    }
    let pivots = linalg::rref(&field, &mut rows);
    let mut levels: Vec<LcLevel> = (0..=n_max)
        .map(|n| LcLevel {
            n,
            dim: 0,
            basis: Vec::new(),
        })
        .collect();
    for (row, &p) in rows.iter().zip(pivots.iter()) {
        let deg = bound - p / dim_r;
        if deg > n_max {
            continue;
        }
        // Everything left of the pivot is zero, so the row's x-degree is
        // exactly `deg` and its leading coefficient is the degree block.
        let mut lead = ring.zero();
        for (si, &(i, r, c)) in slots.iter().enumerate() {
            lead.part_mut(i).set(r, c, row[coord(deg, si)].clone());
        }
        levels[deg].basis.push(lead);
        levels[deg].dim += 1;
    }
    Ok(levels)
}

fn elem_coords(ring: &SsRing, e: &SsElem) -> Vec<Scalar> {
    let mut v = Vec::new();
    for (i, f) in ring.factors().iter().enumerate() {
        for r in 0..f.n {
            for c in 0..f.n {
                v.push(e.part(i).get(r, c).clone());
            }
        }
    }
    v
}

fn in_span(field: &ScalarField, ring: &SsRing, basis: &[SsElem], e: &SsElem) -> bool {
    let rows: Vec<Vec<Scalar>> = basis.iter().map(|b| elem_coords(ring, b)).collect();
    let base_rank = linalg::rank(field, rows.clone());
    let mut with = rows;
    with.push(elem_coords(ring, e));
    linalg::rank(field, with) == base_rank
}

/// Chain checks for the leading-coefficient levels: each level is a left
/// module, the chain ascends, and `sigma^l(I_n)` lands in `I_{n+l}`.
/// Inclusions that raise the degree are tested against levels computed at an
/// enlarged bound, since right or left multiplication by `x` can push a
/// product past the original truncation.
pub fn leading_coeff_chain_report(
    ctx: &SsOreContext,
    gens: &[SkewPoly<SsElem>],
    n_max: usize,
    bound: usize,
) -> Result<(Vec<LcLevel>, VerifyReport), OreError> {
    let ring = &ctx.ring;
    let field = if ring.num_factors() > 0 {
        ScalarField::Prime(*ring.field(0).prime())
    } else {
        ScalarField::Prime(crate::scalars::PrimeField::new(2).unwrap())
    };
    let shift = orbits(ring, &ctx.sigma).order.max(1);
    let levels = leading_coeff_module(ctx, gens, n_max, bound)?;
    let wide = leading_coeff_module(ctx, gens, n_max, bound + shift)?;
    let mut report = VerifyReport::new();
    let dims: Vec<String> = levels.iter().map(|l| format!("{}", l.dim)).collect();
    report.record(
        "levels",
        true,
        format!("dim I_n for n = 0..{n_max}: [{}]", dims.join(", ")),
    );
    let mut module_ok = true;
    let mut ascend_ok = true;
    let mut shift_ok = true;
    let mut detail = String::new();
    for level in &levels {
        for a in &level.basis {
            for (i, j, k) in ring.unit_indices() {
                let ra = ring.mul(&ring.unit_elem(i, j, k), a);
                if !ring.is_zero(&ra) && !in_span(&field, ring, &level.basis, &ra) {
                    module_ok = false;
                    if detail.is_empty() {
                        detail = format!("left multiple escapes I_{}", level.n);
                    }
                }
            }
            if level.n + 1 <= n_max
                && !in_span(&field, ring, &wide[level.n + 1].basis, a)
            {
                ascend_ok = false;
                if detail.is_empty() {
                    detail = format!("I_{} not inside I_{}", level.n, level.n + 1);
                }
            }
            for l in 1..=shift {
                if level.n + l > n_max {
                    break;
                }
                let sa = {
                    let mut cur = a.clone();
                    for _ in 0..l {
                        cur = ctx.sigma.apply(ring, &cur);
                    }
                    cur
                };
                if !in_span(&field, ring, &wide[level.n + l].basis, &sa) {
                    shift_ok = false;
                    if detail.is_empty() {
                        detail = format!("sigma^{l}(I_{}) escapes I_{}", level.n, level.n + l);
                    }
                }
            }
        }
    }
    report.record(
        "left-module",
        module_ok,
        "each I_n is closed under left multiplication by R",
    );
    report.record(
        "ascending",
        ascend_ok,
        "I_n is contained in I_{n+1} at the enlarged bound",
    );
    report.record(
        "sigma-shifts",
        shift_ok,
        if detail.is_empty() {
            "sigma^l(I_n) is contained in I_{n+l} at the enlarged bound".to_string()
        } else {
            detail
        },
    );
    Ok((levels, report))
}

// ---- Nilpotency falsification search ----

/// A polynomial `p` with `p * (r x^j) * p = 0` for every spanning `r` and
/// `j <= max_x_power`; over the shift ring this pins down a nilpotent left
/// ideal, over semiprime coefficient rings the search comes back empty.
#[derive(Debug, Clone)]
pub struct NilWitness<E> {
    pub p: SkewPoly<E>,
    pub multipliers_checked: usize,
    pub max_x_power: usize,
}

pub fn nilpotency_search<C: SkewContext>(
    ctx: &C,
    deg_bound: usize,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<Option<NilWitness<C::Elem>>, OreError> {
    if budget == 0 {
        return Ok(None);
    }
    if ctx.is_domain() {
        // p * 1 * p = p^2 is nonzero for nonzero p; no witness can exist.
        return Ok(None);
    }
    let spanning: Vec<C::Elem> = ctx
        .coefficient_spanning_set()
        .into_iter()
        .filter(|r| !ctx.is_zero(r))
        .collect();
    let mut tested = 0usize;
    let check = |p: &SkewPoly<C::Elem>| -> Result<Option<NilWitness<C::Elem>>, OreError> {
        for r in &spanning {
            for j in 0..=deg_bound {
                let m = SkewPoly::monomial(ctx, r.clone(), j);
                let pm = skew_mul(ctx, p, &m)?;
                let pmp = skew_mul(ctx, &pm, p)?;
                if !pmp.is_zero() {
                    return Ok(None);
                }
            }
        }
        Ok(Some(NilWitness {
            p: p.clone(),
            multipliers_checked: spanning.len(),
            max_x_power: deg_bound,
        }))
    };
    if let Some(elems) = ctx.enumerate_coefficients() {
        let total = (elems.len() as u128).checked_pow(deg_bound as u32 + 1);
        if let Some(total) = total {
            if total <= budget as u128 {
                // Exhaustive odometer over coefficient tuples.
                let mut digits = vec![0usize; deg_bound + 1];
                loop {
                    let coeffs: Vec<C::Elem> =
                        digits.iter().map(|&d| elems[d].clone()).collect();
                    let p = SkewPoly::from_coeffs(ctx, coeffs);
                    if !p.is_zero() {
                        if let Some(w) = check(&p)? {
                            return Ok(Some(w));
                        }
                    }
                    let mut pos = 0;
                    loop {
                        if pos == digits.len() {
                            return Ok(None);
                        }
                        digits[pos] += 1;
                        if digits[pos] < elems.len() {
                            break;
                        }
                        digits[pos] = 0;
                        pos += 1;
                    }
                }
            }
        }
    }
    // Sparse candidates first: single monomials over the spanning set.
    for r in &spanning {
        for j in 0..=deg_bound {
            if tested >= budget {
                return Ok(None);
            }
            tested += 1;
            let p = SkewPoly::monomial(ctx, r.clone(), j);
            if let Some(w) = check(&p)? {
                return Ok(Some(w));
            }
        }
    }
    while tested < budget {
        tested += 1;
        let p = sample_poly(ctx, deg_bound, rng);
        if p.is_zero() {
            continue;
        }
        if let Some(w) = check(&p)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{FieldEndo, PrimeField, RatFun};
    use crate::semisimple::FactorDesc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    fn rf(num: &[u64], den: &[u64]) -> RatFun {
        let f = f5();
        f.rf_new(f.poly(num), f.poly(den)).unwrap()
    }

    fn sc(num: &[u64]) -> Scalar {
        Scalar::Rational(rf(num, &[1]))
    }

    /// F_5(t) with sigma: t -> t^2 and delta(t) = t^2 - t.
    fn squaring_ctx() -> FieldOreContext {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        let delta = ScalarDeriv {
            sigma,
            dt: rf(&[0, 4, 1], &[1]),
        };
        FieldOreContext::new(field, sigma, delta, Some(sc(&[1]))).unwrap()
    }

    /// Same sigma with delta = 0.
    fn twist_only_ctx() -> FieldOreContext {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        FieldOreContext::new(field, sigma, ScalarDeriv::zero(&field), Some(sc(&[1]))).unwrap()
    }

    fn t_const(ctx: &FieldOreContext) -> SkewPoly<Scalar> {
        SkewPoly::constant(ctx, sc(&[0, 1]))
    }

    #[test]
    fn single_commutation_step() {
        let ctx = squaring_ctx();
        let x = SkewPoly::x(&ctx);
        let prod = skew_mul(&ctx, &x, &t_const(&ctx)).unwrap();
        // x*t = t^2 x + (t^2 - t).
        let want = SkewPoly::from_coeffs(&ctx, vec![sc(&[0, 4, 1]), sc(&[0, 0, 1])]);
        assert_eq!(prod, want);
        assert_eq!(skew_render(&ctx, &prod), "t^2*x + (t^2-t)");
    }

    #[test]
    fn twist_only_commutation_has_no_tail() {
        let ctx = twist_only_ctx();
        let x = SkewPoly::x(&ctx);
        let prod = skew_mul(&ctx, &x, &t_const(&ctx)).unwrap();
        assert_eq!(
            prod,
            SkewPoly::from_coeffs(&ctx, vec![ctx.zero(), sc(&[0, 0, 1])])
        );
    }

    #[test]
    fn x_squared_times_t_matches_the_stepwise_oracle() {
        let ctx = squaring_ctx();
        let x = SkewPoly::x(&ctx);
        let x2 = skew_mul(&ctx, &x, &x).unwrap();
        let prod = skew_mul(&ctx, &x2, &t_const(&ctx)).unwrap();
        // Oracle: apply the one-step rule x * (sum c_j x^j) by hand, twice,
        // without going through skew_mul.
        let step = |f: &SkewPoly<Scalar>| {
            let mut coeffs = vec![ctx.zero(); f.coeffs().len() + 1];
            for (j, c) in f.coeffs().iter().enumerate() {
                coeffs[j + 1] = ctx.add(&coeffs[j + 1], &ctx.sigma(c));
                coeffs[j] = ctx.add(&coeffs[j], &ctx.delta(c));
            }
            SkewPoly::from_coeffs(&ctx, coeffs)
        };
        let oracle = step(&step(&t_const(&ctx)));
        assert_eq!(prod, oracle);
        // Frozen closed form: t^4 x^2 + 2(t^4 - t^2) x + (t^4 - 2t^2 + t).
        let want = SkewPoly::from_coeffs(
            &ctx,
            vec![
                sc(&[0, 1, 3, 0, 1]),
                sc(&[0, 0, 3, 0, 2]),
                sc(&[0, 0, 0, 0, 1]),
            ],
        );
        assert_eq!(prod, want);
    }

    #[test]
    fn left_division_worked_example() {
        let ctx = twist_only_ctx();
        let x = SkewPoly::x(&ctx);
        let f = skew_mul(&ctx, &x, &x).unwrap();
        let g = skew_sub(&ctx, &x, &t_const(&ctx));
        let (q, r) = left_divide(&ctx, &f, &g).unwrap();
        assert_eq!(q, SkewPoly::from_coeffs(&ctx, vec![sc(&[0, 0, 1]), sc(&[1])]));
        assert_eq!(r, SkewPoly::constant(&ctx, sc(&[0, 0, 0, 1])));
        let (q2, r2) = left_divide(&ctx, &g, &g).unwrap();
        assert_eq!(q2, SkewPoly::one(&ctx));
        assert!(r2.is_zero());
        let (q3, r3) = left_divide(&ctx, &g, &f).unwrap();
        assert!(q3.is_zero());
        assert_eq!(r3, g);
    }

    #[test]
    fn division_by_zero_is_a_typed_error() {
        let ctx = twist_only_ctx();
        let err = left_divide(&ctx, &SkewPoly::x(&ctx), &SkewPoly::zero()).unwrap_err();
        assert_eq!(err, OreError::DivisionByZeroPoly);
    }

    #[test]
    fn gcd_and_lclm_of_the_worked_pair() {
        let ctx = twist_only_ctx();
        let f = SkewPoly::x(&ctx);
        let g = skew_sub(&ctx, &f, &t_const(&ctx));
        let out = left_gcd_lclm(&ctx, &f, &g).unwrap();
        assert_eq!(out.gcd, SkewPoly::one(&ctx));
        // lclm = x^2 - t^2 x = (x - t^2)*x = x*(x - t).
        let want = SkewPoly::from_coeffs(&ctx, vec![ctx.zero(), sc(&[0, 0, 4]), sc(&[1])]);
        assert_eq!(out.lclm, want);
        assert_eq!(
            out.lclm_cof_f,
            SkewPoly::from_coeffs(&ctx, vec![sc(&[0, 0, 4]), sc(&[1])])
        );
        assert_eq!(out.lclm_cof_g, SkewPoly::x(&ctx));
    }

    #[test]
    fn gcd_of_a_polynomial_with_itself_is_its_monic_form() {
        let ctx = twist_only_ctx();
        let f = SkewPoly::from_coeffs(&ctx, vec![sc(&[0, 1]), sc(&[2])]);
        let out = left_gcd_lclm(&ctx, &f, &f).unwrap();
        let monic = skew_scale(&ctx, &ctx.invert(&sc(&[2])).unwrap(), &f);
        assert_eq!(out.gcd, monic);
        assert_eq!(out.lclm, monic);
    }

    #[test]
    fn gcd_euclid_trace_ends_at_a_unit() {
        let ctx = twist_only_ctx();
        let x = SkewPoly::x(&ctx);
        let f = skew_mul(&ctx, &x, &x).unwrap();
        let g = skew_sub(&ctx, &x, &t_const(&ctx));
        let out = left_gcd_lclm(&ctx, &f, &g).unwrap();
        assert_eq!(out.gcd, SkewPoly::one(&ctx));
        let back = skew_add(
            &ctx,
            &skew_mul(&ctx, &out.gcd_cof_f, &f).unwrap(),
            &skew_mul(&ctx, &out.gcd_cof_g, &g).unwrap(),
        );
        assert_eq!(back, out.gcd);
    }

    #[test]
    fn zero_inputs_to_gcd_are_rejected() {
        let ctx = twist_only_ctx();
        let err = left_gcd_lclm(&ctx, &SkewPoly::zero(), &SkewPoly::x(&ctx)).unwrap_err();
        assert_eq!(err, OreError::ZeroInput);
    }

    #[test]
    fn degree_cap_is_a_typed_error() {
        let ctx = twist_only_ctx();
        let a = SkewPoly::monomial(&ctx, ctx.one(), 400);
        let b = SkewPoly::monomial(&ctx, ctx.one(), 200);
        let err = skew_mul(&ctx, &a, &b).unwrap_err();
        assert_eq!(err, OreError::DegreeCapExceeded { needed: 600 });
    }

    #[test]
    fn extension_fixes_x_when_q_is_one() {
        let ctx = squaring_ctx();
        let x = SkewPoly::x(&ctx);
        assert_eq!(extend_sigma(&ctx, &x).unwrap(), x);
        // sigma-hat(x*t) = sigma-hat(x)*sigma-hat(t) = t^4 x + (t^4 - t^2).
        let xt = skew_mul(&ctx, &x, &t_const(&ctx)).unwrap();
        let lhs = extend_sigma(&ctx, &xt).unwrap();
        let want = SkewPoly::from_coeffs(&ctx, vec![sc(&[0, 0, 4, 0, 1]), sc(&[0, 0, 0, 0, 1])]);
        assert_eq!(lhs, want);
        let rhs = skew_mul(
            &ctx,
            &extend_sigma(&ctx, &x).unwrap(),
            &extend_sigma(&ctx, &t_const(&ctx)).unwrap(),
        )
        .unwrap();
        assert_eq!(lhs, rhs);
        let report = verify_extension(&ctx, 25, 3, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn quantum_plane_extension_scales_x() {
        // sigma(t) = 2t, delta(t) = 1, q = 2 over F_5(t): x maps to 3x.
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 2, 1).unwrap());
        let delta = ScalarDeriv {
            sigma,
            dt: rf(&[1], &[1]),
        };
        let ctx = FieldOreContext::new(field, sigma, delta, Some(sc(&[2]))).unwrap();
        let img = extend_sigma(&ctx, &SkewPoly::x(&ctx)).unwrap();
        assert_eq!(img, SkewPoly::monomial(&ctx, sc(&[3]), 1));
        assert_eq!(skew_render(&ctx, &img), "3*x");
    }

    #[test]
    fn missing_quantization_is_a_typed_error() {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        let ctx =
            FieldOreContext::new(field, sigma, ScalarDeriv::zero(&field), None).unwrap();
        let err = extend_sigma(&ctx, &SkewPoly::x(&ctx)).unwrap_err();
        assert_eq!(err, OreError::NotQuantized);
    }

    #[test]
    fn mismatched_delta_twist_is_rejected() {
        let field = ScalarField::Rational(f5());
        let sigma = ScalarEndo::Map(FieldEndo::new(&f5(), 1, 2).unwrap());
        let delta = ScalarDeriv {
            sigma: ScalarEndo::Identity,
            dt: rf(&[1], &[1]),
        };
        let err = FieldOreContext::new(field, sigma, delta, None).unwrap_err();
        assert!(matches!(err, OreError::InvalidContext(_)));
    }

    #[test]
    fn twist_identity_for_powers_of_x() {
        // With delta = 0: x^n * f = (sum sigma^n(a_i) x^i) * x^n.
        let ctx = twist_only_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let f = sample_poly(&ctx, 3, &mut rng);
            for n in 1..=3 {
                let xn = skew_pow(&ctx, &SkewPoly::x(&ctx), n).unwrap();
                let lhs = skew_mul(&ctx, &xn, &f).unwrap();
                let twisted = SkewPoly::from_coeffs(
                    &ctx,
                    f.coeffs().iter().map(|c| ctx.sigma_iter(c, n)).collect(),
                );
                let rhs = skew_mul(&ctx, &twisted, &xn).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    fn f3() -> ScalarField {
        ScalarField::Prime(PrimeField::new(3).unwrap())
    }

    /// F_3 x F_3 with the swap and delta = 0.
    fn two_lines_ctx() -> SsOreContext {
        let ring = SsRing::new(vec![
            FactorDesc { n: 1, field: f3() },
            FactorDesc { n: 1, field: f3() },
        ])
        .unwrap();
        let sigma = SsEndo::new(
            &ring,
            vec![1, 0],
            vec![
                crate::semisimple::Matrix::identity(&f3(), 1),
                crate::semisimple::Matrix::identity(&f3(), 1),
            ],
            vec![ScalarEndo::Identity, ScalarEndo::Identity],
        )
        .unwrap();
        let delta = SsDeriv::zero(&ring);
        SsOreContext::new(ring, sigma, delta).unwrap()
    }

    fn pair(ctx: &SsOreContext, a: u64, b: u64) -> SsElem {
        let mut e = ctx.ring.zero();
        e.part_mut(0).set(0, 0, Scalar::Prime(a));
        e.part_mut(1).set(0, 0, Scalar::Prime(b));
        e
    }

    #[test]
    fn leading_coeff_levels_match_the_hand_span() {
        let ctx = two_lines_ctx();
        let gens = vec![SkewPoly::constant(&ctx, pair(&ctx, 1, 0))];
        let levels = leading_coeff_module(&ctx, &gens, 1, 2).unwrap();
        assert_eq!(levels[0].dim, 1);
        assert_eq!(levels[0].basis, vec![pair(&ctx, 1, 0)]);
        assert_eq!(levels[1].dim, 2);
        let field = f3();
        assert!(in_span(&field, &ctx.ring, &levels[1].basis, &pair(&ctx, 1, 0)));
        assert!(in_span(&field, &ctx.ring, &levels[1].basis, &pair(&ctx, 0, 1)));
        let zero_gens = vec![SkewPoly::<SsElem>::zero()];
        let empty = leading_coeff_module(&ctx, &zero_gens, 1, 2).unwrap();
        assert!(empty.iter().all(|l| l.dim == 0));
    }

    #[test]
    fn leading_coeff_chain_checks_pass_on_the_swap_ring() {
        let ctx = two_lines_ctx();
        let gens = vec![SkewPoly::constant(&ctx, pair(&ctx, 1, 0))];
        let (_, report) = leading_coeff_chain_report(&ctx, &gens, 3, 3).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn leading_coeff_needs_finite_scalars() {
        let field = ScalarField::Rational(f5());
        let ring = SsRing::new(vec![FactorDesc { n: 1, field }]).unwrap();
        let sigma = SsEndo::identity(&ring);
        let delta = SsDeriv::zero(&ring);
        let ctx = SsOreContext::new(ring, sigma, delta).unwrap();
        let gens = vec![SkewPoly::one(&ctx)];
        let err = leading_coeff_module(&ctx, &gens, 1, 2).unwrap_err();
        assert!(matches!(err, OreError::UnsupportedCoefficients(_)));
    }

    #[test]
    fn nilpotency_search_is_empty_over_the_semiprime_swap_ring() {
        let ctx = two_lines_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let found = nilpotency_search(&ctx, 2, 1000, &mut rng).unwrap();
        assert!(found.is_none());
    }

    #[test]
    fn nilpotency_search_respects_budget_and_domains() {
        let ctx = two_lines_ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        assert!(nilpotency_search(&ctx, 2, 0, &mut rng).unwrap().is_none());
        let empty_ring = SsRing::new(vec![]).unwrap();
        let zero_ctx = SsOreContext::new(
            empty_ring.clone(),
            SsEndo::identity(&empty_ring),
            SsDeriv::zero(&empty_ring),
        )
        .unwrap();
        assert!(nilpotency_search(&zero_ctx, 2, 10, &mut rng)
            .unwrap()
            .is_none());
        let field_ctx = twist_only_ctx();
        assert!(
            nilpotency_search(&field_ctx, 3, 1_000_000_000, &mut rng)
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn renders_follow_the_descending_convention() {
        let ctx = squaring_ctx();
        assert_eq!(skew_render(&ctx, &SkewPoly::zero()), "0");
        assert_eq!(skew_render(&ctx, &SkewPoly::one(&ctx)), "1");
        let p = SkewPoly::from_coeffs(&ctx, vec![sc(&[0, 1]), ctx.zero(), sc(&[2])]);
        assert_eq!(skew_render(&ctx, &p), "2*x^2 + t");
    }
}
