//! Structure of skew polynomial rings over semisimple coefficient rings:
//! decomposition along the orbits of the factor permutation, the supported
//! matrix normal form for simple blocks, uniform-dimension traces, and
//! direct-sum independence certificates.
//!
//! Conventions: an inner derivation attached to `b` sends `r` to
//! `b*r - sigma(r)*b`, and the variable substitution that removes it is
//! `x - b`; the structured endomorphism acts as `u^-1 tau(X) u`.

use crate::linalg::{rank, solve_affine};
use crate::ore::{
    left_divide, sample_poly, skew_add, skew_mul, skew_scale, FieldOreContext, OreError,
    SkewPoly, SsOreContext,
};
use crate::scalars::{Scalar, ScalarDeriv, ScalarEndo, ScalarField};
use crate::semisimple::{
    orbits, solve_inner, FactorDesc, InnerOutcome, Matrix, SsDeriv, SsElem, SsEndo, SsError,
    SsRing,
};
use crate::verify::VerifyReport;
use rand::rngs::StdRng;
use rand::SeedableRng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("input fails validation: {0}")]
    InvalidInput(String),
    #[error("derivation on a multi-factor block is not inner: {0}")]
    InnerSolveFailed(String),
    #[error("single block outside the supported normal form: {0}")]
    UnsupportedForm(String),
    #[error("unsupported coefficients: {0}")]
    UnsupportedCoefficients(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Ore(#[from] OreError),
    #[error(transparent)]
    Ss(#[from] SsError),
}

fn sub_ring(ring: &SsRing, indices: &[usize]) -> Result<SsRing, StructureError> {
    let factors = indices
        .iter()
        .map(|&i| FactorDesc {
            n: ring.size(i),
            field: *ring.field(i),
        })
        .collect();
    Ok(SsRing::new(factors)?)
}

fn restrict_elem(indices: &[usize], e: &SsElem) -> Vec<Matrix> {
    indices.iter().map(|&i| e.part(i).clone()).collect()
}

fn restrict_endo(
    ring: &SsRing,
    sigma: &SsEndo,
    indices: &[usize],
    block: &SsRing,
) -> Result<SsEndo, StructureError> {
    let pos = |orig: usize| -> Result<usize, StructureError> {
        indices.iter().position(|&i| i == orig).ok_or_else(|| {
            StructureError::Internal("permutation leaves the orbit block".into())
        })
    };
    let mut rho = Vec::new();
    let mut units = Vec::new();
    let mut taus = Vec::new();
    for &i in indices {
        rho.push(pos(sigma.rho()[i])?);
        units.push(sigma.unit(i).clone());
        taus.push(*sigma.tau(i));
    }
    let _ = ring;
    Ok(SsEndo::new(block, rho, units, taus)?)
}

fn restrict_deriv(
    delta: &SsDeriv,
    indices: &[usize],
    block: &SsRing,
    block_sigma: &SsEndo,
) -> Result<SsDeriv, StructureError> {
    let b = block.elem(restrict_elem(indices, delta.b()))?;
    let entrywise = indices
        .iter()
        .map(|&i| delta.entrywise()[i].clone())
        .collect();
    Ok(SsDeriv::new(block, block_sigma, b, entrywise)?)
}

fn mat_flat(m: &Matrix) -> Vec<Scalar> {
    let n = m.n();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(m.get(i, j).clone());
        }
    }
    out
}

// ---- matrix normal form for a single simple block ----

/// Presentation of one simple block as a matrix ring over a skew polynomial
/// ring in the variable `y = u*(x - b)`, whose commutation law is entrywise:
/// `y*r = tau(r)*y + delta'(r)` on matrix inputs.
#[derive(Debug, Clone)]
pub struct MatrixForm {
    pub m: usize,
    pub b: Matrix,
    pub u: Matrix,
    pub tau: ScalarEndo,
    pub delta_prime: ScalarDeriv,
    /// Original presentation of the block.
    pub ctx_x: SsOreContext,
    /// Entry ring `D[y; tau, delta']`.
    pub inner: FieldOreContext,
}

impl MatrixForm {
    /// `y` written in the original variable: `u*x - u*b`.
    pub fn y_poly(&self) -> SkewPoly<SsElem> {
        let ring = &self.ctx_x.ring;
        let field = ring.field(0);
        let u_elem = ring
            .elem(vec![self.u.clone()])
            .expect("unit has the block's shape");
        let ub = ring
            .elem(vec![self.u.mul(field, &self.b)])
            .expect("product has the block's shape");
        SkewPoly::from_coeffs(&self.ctx_x, vec![ring.neg(&ub), u_elem])
    }

    /// Coefficients of `p` written in powers of `y`, low degree first.
    fn y_coefficients(&self, p: &SkewPoly<SsElem>) -> Result<Vec<SsElem>, StructureError> {
        let y = self.y_poly();
        let mut rest = p.clone();
        let mut out = Vec::new();
        while rest.degree().is_some() {
            let (quot, rem) = left_divide(&self.ctx_x, &rest, &y)?;
            out.push(rem.coeff_or_zero(&self.ctx_x, 0));
            rest = quot;
        }
        Ok(out)
    }

    /// Rewrites a block polynomial as an `m x m` matrix (row-major) with
    /// entries in `D[y; tau, delta']`.
    pub fn to_matrix(&self, p: &SkewPoly<SsElem>) -> Result<Vec<SkewPoly<Scalar>>, StructureError> {
        let coeffs = self.y_coefficients(p)?;
        let mut entries = Vec::with_capacity(self.m * self.m);
        for r in 0..self.m {
            for c in 0..self.m {
                let entry = coeffs
                    .iter()
                    .map(|coef| coef.part(0).get(r, c).clone())
                    .collect();
                entries.push(SkewPoly::from_coeffs(&self.inner, entry));
            }
        }
        Ok(entries)
    }

    /// Inverse of `to_matrix`: reassembles the block polynomial in `x`.
    pub fn from_matrix(
        &self,
        entries: &[SkewPoly<Scalar>],
    ) -> Result<SkewPoly<SsElem>, StructureError> {
        if entries.len() != self.m * self.m {
            return Err(StructureError::Internal(
                "matrix presentation has the wrong number of entries".into(),
            ));
        }
        let ring = &self.ctx_x.ring;
        let field = ring.field(0);
        let top = entries
            .iter()
            .filter_map(|e| e.degree())
            .max()
            .unwrap_or(0);
        let y = self.y_poly();
        let mut acc = SkewPoly::zero();
        for i in (0..=top).rev() {
            let mut coef = Matrix::zero(field, self.m);
            for r in 0..self.m {
                for c in 0..self.m {
                    coef.set(
                        r,
                        c,
                        match entries[r * self.m + c].coeffs().get(i) {
                            Some(s) => s.clone(),
                            None => field.zero(),
                        },
                    );
                }
            }
            let coef_poly = SkewPoly::constant(&self.ctx_x, ring.elem(vec![coef])?);
            acc = skew_add(&self.ctx_x, &skew_mul(&self.ctx_x, &acc, &y)?, &coef_poly);
        }
        Ok(acc)
    }
}

/// Entrywise lift of `delta_prime` to block matrices; zero on matrix units.
fn entrywise_apply(field: &ScalarField, d: &ScalarDeriv, m: &Matrix) -> Matrix {
    let n = m.n();
    let mut out = Matrix::zero(field, n);
    for r in 0..n {
        for c in 0..n {
            out.set(r, c, field.deriv_apply(d, m.get(r, c)));
        }
    }
    out
}

/// Finds `b` and an entrywise `delta'` with
/// `u*(delta(r) - (b*r - sigma(r)*b)) = M_m(delta')(r)`, so that
/// `y = u*(x - b)` obeys `y*r = M_m(tau)(r)*y + M_m(delta')(r)`.
///
/// The feasibility system is solved exactly over the block's scalar field;
/// the unknown `delta'(t)` is ordered before the entries of `b`, so inner
/// mass is attributed to the entrywise part only when unavoidable.
pub fn matrix_form(
    block: &SsRing,
    sigma: &SsEndo,
    delta: &SsDeriv,
) -> Result<MatrixForm, StructureError> {
    if block.num_factors() != 1 {
        return Err(StructureError::Internal(
            "matrix normal form applies to a single simple block".into(),
        ));
    }
    let field = *block.field(0);
    let m = block.size(0);
    let u = sigma.unit(0).clone();
    let tau = *sigma.tau(0);
    let rational = field.is_rational();
    let t_scalar = if rational {
        Some(Scalar::Rational(field.prime().rf_t()))
    } else {
        None
    };

    // Probe matrices: units, plus t-scaled units over F_p(t).
    let mut probes: Vec<Matrix> = Vec::new();
    for j in 0..m {
        for k in 0..m {
            probes.push(Matrix::unit(&field, m, j, k));
        }
    }
    if let Some(t) = &t_scalar {
        for j in 0..m {
            for k in 0..m {
                let mut te = Matrix::zero(&field, m);
                te.set(j, k, t.clone());
                probes.push(te);
            }
        }
    }

    let has_dt = rational;
    let ncols = m * m + usize::from(has_dt);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let mut rhs: Vec<Scalar> = Vec::new();
    for (probe_idx, r_mat) in probes.iter().enumerate() {
        let r_elem = block.elem(vec![r_mat.clone()])?;
        let sigma_r = sigma.apply(block, &r_elem).part(0).clone();
        let delta_r = delta.apply(block, sigma, &r_elem).part(0).clone();
        let rhs_mat = u.mul(&field, &delta_r);
        // Column per unknown: evaluate the b-linear map at basis matrices.
        let mut columns: Vec<Vec<Scalar>> = Vec::new();
        if has_dt {
            // delta'(t) contributes dt * e only on the t-scaled probes.
            let dt_shape = if probe_idx >= m * m {
                Matrix::unit(&field, m, (probe_idx - m * m) / m, (probe_idx - m * m) % m)
            } else {
                Matrix::zero(&field, m)
            };
            columns.push(mat_flat(&dt_shape));
        }
        for s in 0..m {
            for t_col in 0..m {
                let basis = Matrix::unit(&field, m, s, t_col);
                let image = u.mul(
                    &field,
                    &basis.mul(&field, r_mat).sub(&field, &sigma_r.mul(&field, &basis)),
                );
                columns.push(mat_flat(&image));
            }
        }
        let rhs_flat = mat_flat(&rhs_mat);
        for comp in 0..m * m {
            rows.push(columns.iter().map(|col| col[comp].clone()).collect());
            rhs.push(rhs_flat[comp].clone());
        }
    }
    let Some(solution) = solve_affine(&field, &rows, &rhs) else {
        return Err(StructureError::UnsupportedForm(
            "no change of variable makes the derivation entrywise".into(),
        ));
    };
    let sol = solution.particular;
    let delta_prime = if has_dt {
        match &sol[0] {
            Scalar::Rational(dt) => ScalarDeriv {
                sigma: tau,
                dt: dt.clone(),
            },
            Scalar::Prime(_) => {
                return Err(StructureError::Internal(
                    "rational system solved over the wrong field".into(),
                ))
            }
        }
    } else {
        ScalarDeriv::zero(&field)
    };
    let offset = usize::from(has_dt);
    let mut b = Matrix::zero(&field, m);
    for s in 0..m {
        for c in 0..m {
            b.set(s, c, sol[offset + s * m + c].clone());
        }
    }
    let _ = ncols;

    let ctx_x = SsOreContext::new(block.clone(), sigma.clone(), delta.clone())
        .map_err(|e| StructureError::InvalidInput(e.to_string()))?;
    let inner = FieldOreContext::new(field, tau, delta_prime.clone(), None)
        .map_err(|e| StructureError::Internal(e.to_string()))?;
    let form = MatrixForm {
        m,
        b,
        u,
        tau,
        delta_prime,
        ctx_x,
        inner,
    };

    // The commutation law must hold exactly on every probe.
    let y = form.y_poly();
    for r_mat in &probes {
        let r_elem = form.ctx_x.ring.elem(vec![r_mat.clone()])?;
        let lhs = skew_mul(&form.ctx_x, &y, &SkewPoly::constant(&form.ctx_x, r_elem))?;
        let tau_r = form
            .ctx_x
            .ring
            .elem(vec![r_mat.map_entries(&field, &form.tau)])?;
        let d_r = form
            .ctx_x
            .ring
            .elem(vec![entrywise_apply(&field, &form.delta_prime, r_mat)])?;
        let rhs_poly = skew_add(
            &form.ctx_x,
            &skew_scale(&form.ctx_x, &tau_r, &y),
            &SkewPoly::constant(&form.ctx_x, d_r),
        );
        if lhs != rhs_poly {
            return Err(StructureError::Internal(
                "normal-form commutation law failed on a probe".into(),
            ));
        }
    }
    Ok(form)
}

// ---- multi-factor blocks ----

/// Orbit block with at least two factors: the derivation is inner there, and
/// `x - b` presents the block with zero derivation.
#[derive(Debug, Clone)]
pub struct MultiBlock {
    pub orbit: Vec<usize>,
    pub b: SsElem,
    pub solution_space_dim: usize,
    /// Original presentation of the block.
    pub ctx_x: SsOreContext,
    /// Twist-only presentation in the substituted variable.
    pub ctx_y: SsOreContext,
}

impl MultiBlock {
    /// The substituted variable written in the original one: `x - b`.
    pub fn y_poly(&self) -> SkewPoly<SsElem> {
        SkewPoly::from_coeffs(
            &self.ctx_x,
            vec![self.ctx_x.ring.neg(&self.b), self.ctx_x.ring.one()],
        )
    }

    pub fn to_twist_only(
        &self,
        p: &SkewPoly<SsElem>,
    ) -> Result<SkewPoly<SsElem>, StructureError> {
        let y = self.y_poly();
        let mut rest = p.clone();
        let mut coeffs = Vec::new();
        while rest.degree().is_some() {
            let (quot, rem) = left_divide(&self.ctx_x, &rest, &y)?;
            coeffs.push(rem.coeff_or_zero(&self.ctx_x, 0));
            rest = quot;
        }
        Ok(SkewPoly::from_coeffs(&self.ctx_y, coeffs))
    }

    pub fn from_twist_only(
        &self,
        p: &SkewPoly<SsElem>,
    ) -> Result<SkewPoly<SsElem>, StructureError> {
        let y = self.y_poly();
        let mut acc = SkewPoly::zero();
        let top = match p.degree() {
            Some(d) => d,
            None => return Ok(SkewPoly::zero()),
        };
        for i in (0..=top).rev() {
            let coef = SkewPoly::constant(&self.ctx_x, p.coeff_or_zero(&self.ctx_y, i));
            acc = skew_add(&self.ctx_x, &skew_mul(&self.ctx_x, &acc, &y)?, &coef);
        }
        Ok(acc)
    }
}

#[derive(Debug)]
pub enum MatrixFormOutcome {
    Supported(Box<MatrixForm>),
    /// Feasibility failed; the block is reported in its original form.
    Unsupported { m: usize, reason: String },
}

#[derive(Debug)]
pub enum BlockKind {
    Simple(MatrixFormOutcome),
    Multi(MultiBlock),
}

#[derive(Debug)]
pub struct BlockReport {
    pub orbit: Vec<usize>,
    pub kind: BlockKind,
}

#[derive(Debug)]
pub struct DecompositionReport {
    pub blocks: Vec<BlockReport>,
    pub verification: VerifyReport,
}

/// Splits `R[x; sigma, delta]` along the orbits of the factor permutation
/// into blocks, normalizing each: multi-factor blocks become twist-only via
/// `x - b`, single factors get the matrix normal form. Conversion maps are
/// checked multiplicative and mutually inverse on random pairs.
pub fn decompose(
    ring: &SsRing,
    sigma: &SsEndo,
    delta: &SsDeriv,
) -> Result<DecompositionReport, StructureError> {
    // Context construction re-runs the endomorphism and derivation checks.
    let _full = SsOreContext::new(ring.clone(), sigma.clone(), delta.clone())
        .map_err(|e| StructureError::InvalidInput(e.to_string()))?;
    let orbit_data = orbits(ring, sigma);
    let mut verification = VerifyReport::new();
    let mut covered = vec![false; ring.num_factors()];
    let mut blocks = Vec::new();
    let mut rng = StdRng::seed_from_u64(7);
    for (block_idx, cycle) in orbit_data.cycles.iter().enumerate() {
        let mut members = cycle.clone();
        members.sort_unstable();
        for &i in &members {
            covered[i] = true;
        }
        let block_ring = sub_ring(ring, &members)?;
        let block_sigma = restrict_endo(ring, sigma, &members, &block_ring)?;
        let block_delta = restrict_deriv(delta, &members, &block_ring, &block_sigma)?;
        if members.len() == 1 {
            let outcome = match matrix_form(&block_ring, &block_sigma, &block_delta) {
                Ok(form) => {
                    let ok = verify_matrix_conversions(&form, 200, &mut rng)?;
                    verification.record(
                        &format!("block-{block_idx}-conversion"),
                        ok,
                        "matrix presentation is multiplicative and invertible on 200 sampled pairs",
                    );
                    MatrixFormOutcome::Supported(Box::new(form))
                }
                Err(StructureError::UnsupportedForm(reason)) => MatrixFormOutcome::Unsupported {
                    m: block_ring.size(0),
                    reason,
                },
                Err(other) => return Err(other),
            };
            blocks.push(BlockReport {
                orbit: members,
                kind: BlockKind::Simple(outcome),
            });
        } else {
            let ctx_x = SsOreContext::new(
                block_ring.clone(),
                block_sigma.clone(),
                block_delta.clone(),
            )
            .map_err(|e| StructureError::InvalidInput(e.to_string()))?;
            let basis = |i: usize, j: usize, k: usize| {
                block_delta.apply(&block_ring, &block_sigma, &block_ring.unit_elem(i, j, k))
            };
            let (b, dim) = match solve_inner(&block_ring, &block_sigma, &basis) {
                InnerOutcome::Inner {
                    b,
                    solution_space_dim,
                } => (b, solution_space_dim),
                InnerOutcome::NotInner { reason } => {
                    return Err(StructureError::InnerSolveFailed(reason))
                }
            };
            let ctx_y = SsOreContext::new(
                block_ring.clone(),
                block_sigma.clone(),
                SsDeriv::zero(&block_ring),
            )
            .map_err(|e| StructureError::InvalidInput(e.to_string()))?;
            let block = MultiBlock {
                orbit: members.clone(),
                b,
                solution_space_dim: dim,
                ctx_x,
                ctx_y,
            };
            verification.record(
                &format!("block-{block_idx}-delta-zero"),
                block.ctx_y.delta.is_zero(&block.ctx_y.ring),
                "substituted presentation carries the zero derivation",
            );
            let ok = verify_multi_conversions(&block, 200, &mut rng)?;
            verification.record(
                &format!("block-{block_idx}-conversion"),
                ok,
                "substitution is multiplicative and invertible on 200 sampled pairs",
            );
            blocks.push(BlockReport {
                orbit: members,
                kind: BlockKind::Multi(block),
            });
        }
    }
    verification.record(
        "blocks-partition-factors",
        covered.iter().all(|&c| c),
        "every factor lies in exactly one block",
    );
    Ok(DecompositionReport {
        blocks,
        verification,
    })
}

fn verify_multi_conversions(
    block: &MultiBlock,
    pairs: usize,
    rng: &mut StdRng,
) -> Result<bool, StructureError> {
    for _ in 0..pairs {
        let p = sample_poly(&block.ctx_x, 2, rng);
        let q = sample_poly(&block.ctx_x, 2, rng);
        let prod = skew_mul(&block.ctx_x, &p, &q)?;
        let mapped = skew_mul(
            &block.ctx_y,
            &block.to_twist_only(&p)?,
            &block.to_twist_only(&q)?,
        )?;
        if block.to_twist_only(&prod)? != mapped {
            return Ok(false);
        }
        if block.from_twist_only(&block.to_twist_only(&p)?)? != p {
            return Ok(false);
        }
        let sum = skew_add(&block.ctx_x, &p, &q);
        let mapped_sum = skew_add(
            &block.ctx_y,
            &block.to_twist_only(&p)?,
            &block.to_twist_only(&q)?,
        );
        if block.to_twist_only(&sum)? != mapped_sum {
            return Ok(false);
        }
    }
    Ok(true)
}

fn mat_mul_polys(
    inner: &FieldOreContext,
    m: usize,
    a: &[SkewPoly<Scalar>],
    b: &[SkewPoly<Scalar>],
) -> Result<Vec<SkewPoly<Scalar>>, StructureError> {
    let mut out = Vec::with_capacity(m * m);
    for r in 0..m {
        for c in 0..m {
            let mut acc = SkewPoly::zero();
            for l in 0..m {
                acc = skew_add(inner, &acc, &skew_mul(inner, &a[r * m + l], &b[l * m + c])?);
            }
            out.push(acc);
        }
    }
    Ok(out)
}

fn verify_matrix_conversions(
    form: &MatrixForm,
    pairs: usize,
    rng: &mut StdRng,
) -> Result<bool, StructureError> {
    for _ in 0..pairs {
        let p = sample_poly(&form.ctx_x, 2, rng);
        let q = sample_poly(&form.ctx_x, 2, rng);
        let prod = skew_mul(&form.ctx_x, &p, &q)?;
        let lhs = form.to_matrix(&prod)?;
        let rhs = mat_mul_polys(&form.inner, form.m, &form.to_matrix(&p)?, &form.to_matrix(&q)?)?;
        if lhs != rhs {
            return Ok(false);
        }
        if form.from_matrix(&form.to_matrix(&p)?)? != p {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- uniform dimension ----

#[derive(Debug, Clone)]
pub struct UdimEntry {
    pub orbit: Vec<usize>,
    pub value: usize,
    pub justification: String,
}

#[derive(Debug, Clone)]
pub struct UdimTrace {
    pub total: usize,
    pub entries: Vec<UdimEntry>,
}

/// Left uniform dimension of `R[x; sigma, delta]` with one justified entry
/// per block; the total equals the uniform dimension of `R`.
pub fn udim_ore(
    ring: &SsRing,
    sigma: &SsEndo,
    delta: &SsDeriv,
) -> Result<UdimTrace, StructureError> {
    let report = decompose(ring, sigma, delta)?;
    let mut entries = Vec::new();
    for block in &report.blocks {
        let entry = match &block.kind {
            BlockKind::Simple(MatrixFormOutcome::Supported(form)) => UdimEntry {
                orbit: block.orbit.clone(),
                value: form.m,
                justification: format!(
                    "size-{m} matrix ring over a skew polynomial ring over a field, \
                     a principal left ideal domain of uniform dimension 1",
                    m = form.m
                ),
            },
            BlockKind::Simple(MatrixFormOutcome::Unsupported { m, .. }) => UdimEntry {
                orbit: block.orbit.clone(),
                value: *m,
                justification: format!(
                    "simple artinian block: the skew polynomial ring inherits \
                     the coefficient ring's uniform dimension {m}"
                ),
            },
            BlockKind::Multi(multi) => UdimEntry {
                orbit: block.orbit.clone(),
                value: multi.ctx_y.ring.udim(),
                justification: format!(
                    "twist-only block after substitution: uniform dimension {v} \
                     of the semisimple coefficients is preserved when the \
                     derivation is zero",
                    v = multi.ctx_y.ring.udim()
                ),
            },
        };
        entries.push(entry);
    }
    let total: usize = entries.iter().map(|e| e.value).sum();
    if total != ring.udim() {
        return Err(StructureError::Internal(format!(
            "block values sum to {total} but the coefficient ring has uniform dimension {}",
            ring.udim()
        )));
    }
    Ok(UdimTrace { total, entries })
}

// ---- independence certificates ----

#[derive(Debug, Clone)]
pub struct IndependenceWitness {
    /// Number of exhibited left ideals: one per diagonal matrix unit.
    pub count: usize,
    pub trunc: usize,
    /// Dimension of each ideal's computed span at the truncation.
    pub ranks: Vec<usize>,
    /// Dimension of the joint span.
    pub joint_rank: usize,
    /// True when the joint span splits as a direct sum of the ideals' spans.
    pub direct: bool,
}

/// Exhibits the left ideals generated by the diagonal matrix units and
/// certifies, by exact rank computation at the truncation degree, that their
/// spans are independent: the certificate is the equality
/// `dim(sum) = sum(dim)` together with every span being nonzero.
pub fn independence_witness(
    ring: &SsRing,
    sigma: &SsEndo,
    delta: &SsDeriv,
    trunc: usize,
) -> Result<IndependenceWitness, StructureError> {
    let field = *ring.field(0);
    for i in 1..ring.num_factors() {
        let other = ring.field(i);
        if other.is_rational() != field.is_rational()
            || other.prime().modulus() != field.prime().modulus()
        {
            return Err(StructureError::UnsupportedCoefficients(
                "independence certificates need one scalar field across factors".into(),
            ));
        }
    }
    let ctx = SsOreContext::new(ring.clone(), sigma.clone(), delta.clone())
        .map_err(|e| StructureError::InvalidInput(e.to_string()))?;
    let coords_per_deg: usize = (0..ring.num_factors()).map(|f| ring.size(f) * ring.size(f)).sum();
    let flatten = |p: &SkewPoly<SsElem>| -> Vec<Scalar> {
        let mut out = vec![field.zero(); (trunc + 1) * coords_per_deg];
        for (deg, coef) in p.coeffs().iter().enumerate() {
            let mut off = deg * coords_per_deg;
            for f in 0..ring.num_factors() {
                let n = ring.size(f);
                for r in 0..n {
                    for c in 0..n {
                        out[off] = coef.part(f).get(r, c).clone();
                        off += 1;
                    }
                }
            }
        }
        out
    };
    let mut gens = Vec::new();
    for f in 0..ring.num_factors() {
        for d in 0..ring.size(f) {
            gens.push(ring.unit_elem(f, d, d));
        }
    }
    let mut per_ideal_rows: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for gen in &gens {
        let gen_poly = SkewPoly::constant(&ctx, gen.clone());
        let mut rows = Vec::new();
        for (f, j, k) in ring.unit_indices() {
            for deg in 0..=trunc {
                let mult = SkewPoly::monomial(&ctx, ring.unit_elem(f, j, k), deg);
                let prod = skew_mul(&ctx, &mult, &gen_poly)?;
                if prod.degree().is_some() {
                    rows.push(flatten(&prod));
                }
            }
        }
        per_ideal_rows.push(rows);
    }
    let ranks: Vec<usize> = per_ideal_rows
        .iter()
        .map(|rows| rank(&field, rows.clone()))
        .collect();
    let all_rows: Vec<Vec<Scalar>> = per_ideal_rows.into_iter().flatten().collect();
    let joint_rank = rank(&field, all_rows);
    let direct = ranks.iter().all(|&r| r >= 1) && joint_rank == ranks.iter().sum::<usize>();
    Ok(IndependenceWitness {
        count: gens.len(),
        trunc,
        ranks,
        joint_rank,
        direct,
    })
}
