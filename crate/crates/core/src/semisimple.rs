//! Semisimple coefficient rings: finite products of full matrix rings over
//! scalar fields, with structured injective endomorphisms and
//! sigma-derivations.
//!
//! An endomorphism permutes the factors through `rho` and acts on the factor
//! `i` content by `X -> u_i^-1 * tau_i(X) * u_i`, landing in factor `rho(i)`;
//! `tau_i` is a scalar field endomorphism applied entrywise and `u_i` is a
//! unit of the target factor. A sigma-derivation is an inner part
//! `r -> b*r - sigma(r)*b` plus an optional entrywise scalar derivation on
//! factors that `sigma` fixes without a unit twist.
//!
//! All factors share one prime `p`; factors choose `F_p` or `F_p(t)`
//! individually, but the scalar fields must agree along every `rho`-orbit.

use crate::linalg;
use crate::scalars::{Scalar, ScalarDeriv, ScalarEndo, ScalarField};
use crate::verify::VerifyReport;
use rand::RngCore;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("entrywise derivation part incompatible with sigma: {0}")]
    IncompatibleEntrywisePart(String),
    #[error("scalar fields disagree along the factor permutation: {0}")]
    FieldMismatch(String),
    #[error("rho is not a permutation of the factors")]
    BadPermutation,
    #[error("unsupported over these coefficients: {0}")]
    Unsupported(String),
}

// ---- Matrices over a scalar field ----

/// Square matrix, row-major. Arithmetic goes through the owning factor's
/// [`ScalarField`] handle.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<Scalar>) -> Result<Self, SsError> {
        if entries.len() != n * n {
            return Err(SsError::ShapeMismatch(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(Matrix { n, entries })
    }

    pub fn zero(field: &ScalarField, n: usize) -> Self {
        Matrix {
            n,
            entries: vec![field.zero(); n * n],
        }
    }

    pub fn identity(field: &ScalarField, n: usize) -> Self {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Matrix unit `e_{jk}` (zero-based indices).
    pub fn unit(field: &ScalarField, n: usize, j: usize, k: usize) -> Self {
        let mut m = Matrix::zero(field, n);
        m.set(j, k, field.one());
        m
    }

    pub fn scalar(field: &ScalarField, n: usize, s: &Scalar) -> Self {
        let mut m = Matrix::zero(field, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn add(&self, field: &ScalarField, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| field.add(a, b))
                .collect(),
        }
    }

    pub fn neg(&self, field: &ScalarField) -> Matrix {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(|a| field.neg(a)).collect(),
        }
    }

    pub fn sub(&self, field: &ScalarField, other: &Matrix) -> Matrix {
        self.add(field, &other.neg(field))
    }

    pub fn mul(&self, field: &ScalarField, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zero(field, n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..n {
                    let t = field.mul(a, other.get(k, j));
                    let cur = field.add(out.get(i, j), &t);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn is_zero(&self, field: &ScalarField) -> bool {
        self.entries.iter().all(|e| field.is_zero(e))
    }

    pub fn is_identity(&self, field: &ScalarField) -> bool {
        self == &Matrix::identity(field, self.n)
    }

    pub fn invert(&self, field: &ScalarField) -> Option<Matrix> {
        let rows: Vec<Vec<Scalar>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let inv = linalg::invert(field, &rows)?;
        Some(Matrix {
            n: self.n,
            entries: inv.into_iter().flatten().collect(),
        })
    }

    /// Applies a scalar field endomorphism entrywise.
    pub fn map_entries(&self, field: &ScalarField, endo: &ScalarEndo) -> Matrix {
        Matrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|e| field.endo_apply(endo, e))
                .collect(),
        }
    }

    pub fn entries_preimage(&self, field: &ScalarField, endo: &ScalarEndo) -> Option<Matrix> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(field.endo_preimage(endo, e)?);
        }
        Some(Matrix { n: self.n, entries })
    }

    pub fn render(&self, field: &ScalarField) -> String {
        if self.n == 1 {
            return field.render(self.get(0, 0));
        }
        let rows: Vec<String> = (0..self.n)
            .map(|i| {
                let cells: Vec<String> =
                    (0..self.n).map(|j| field.render(self.get(i, j))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }

    pub fn sample(field: &ScalarField, n: usize, rng: &mut dyn RngCore) -> Matrix {
        Matrix {
            n,
            entries: (0..n * n).map(|_| field.sample(rng)).collect(),
        }
    }

    /// Entries drawn from the tame profile, safe under iterated sigma images.
    pub fn sample_tame(field: &ScalarField, n: usize, rng: &mut dyn RngCore) -> Matrix {
        Matrix {
            n,
            entries: (0..n * n).map(|_| field.sample_tame(rng)).collect(),
        }
    }
}

// ---- The product ring ----

#[derive(Debug, Clone, PartialEq)]
pub struct FactorDesc {
    pub n: usize,
    pub field: ScalarField,
}

/// Product of full matrix rings `M_{n_1}(K_1) x ... x M_{n_m}(K_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SsRing {
    factors: Vec<FactorDesc>,
}

/// Element of an [`SsRing`]: one matrix per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SsElem {
    parts: Vec<Matrix>,
}

impl SsElem {
    pub fn parts(&self) -> &[Matrix] {
        &self.parts
    }

    pub fn part(&self, i: usize) -> &Matrix {
        &self.parts[i]
    }

    pub fn part_mut(&mut self, i: usize) -> &mut Matrix {
        &mut self.parts[i]
    }
}

impl SsRing {
    pub fn new(factors: Vec<FactorDesc>) -> Result<Self, SsError> {
        if let Some(first) = factors.first() {
            let p = first.field.prime().modulus();
            for f in &factors {
                if f.n == 0 {
                    return Err(SsError::ShapeMismatch("factor of size 0".into()));
                }
                if f.field.prime().modulus() != p {
                    return Err(SsError::FieldMismatch(
                        "all factors must share one prime modulus".into(),
                    ));
                }
            }
        }
        Ok(SsRing { factors })
    }

    pub fn factors(&self) -> &[FactorDesc] {
        &self.factors
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn field(&self, i: usize) -> &ScalarField {
        &self.factors[i].field
    }

    pub fn size(&self, i: usize) -> usize {
        self.factors[i].n
    }

    /// Sum of the matrix sizes: the uniform dimension of the ring as a left
    /// module over itself.
    pub fn udim(&self) -> usize {
        self.factors.iter().map(|f| f.n).sum()
    }

    pub fn all_prime_fields(&self) -> bool {
        self.factors.iter().all(|f| !f.field.is_rational())
    }

    /// Number of elements when all factors are over `F_p`; `None` otherwise.
    pub fn cardinality(&self) -> Option<u128> {
        if !self.all_prime_fields() {
            return None;
        }
        let mut total: u128 = 1;
        for f in &self.factors {
            let p = f.field.prime().modulus() as u128;
            for _ in 0..f.n * f.n {
                total = total.checked_mul(p)?;
            }
        }
        Some(total)
    }

    pub fn zero(&self) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .map(|f| Matrix::zero(&f.field, f.n))
                .collect(),
        }
    }

    pub fn one(&self) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .map(|f| Matrix::identity(&f.field, f.n))
                .collect(),
        }
    }

    /// Central idempotent: identity in factor `i`, zero elsewhere.
    pub fn idempotent(&self, i: usize) -> SsElem {
        let mut e = self.zero();
        e.parts[i] = Matrix::identity(&self.factors[i].field, self.factors[i].n);
        e
    }

    /// Matrix unit `e_{jk}` of factor `i`, zero elsewhere (zero-based).
    pub fn unit_elem(&self, i: usize, j: usize, k: usize) -> SsElem {
        let mut e = self.zero();
        e.parts[i] = Matrix::unit(&self.factors[i].field, self.factors[i].n, j, k);
        e
    }

    /// All matrix units `(factor, row, col)`, a spanning set of the ring.
    pub fn unit_indices(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (i, f) in self.factors.iter().enumerate() {
            for j in 0..f.n {
                for k in 0..f.n {
                    out.push((i, j, k));
                }
            }
        }
        out
    }

    fn check_shape(&self, e: &SsElem) -> Result<(), SsError> {
        if e.parts.len() != self.factors.len()
            || e.parts
                .iter()
                .zip(self.factors.iter())
                .any(|(m, f)| m.n() != f.n)
        {
            return Err(SsError::ShapeMismatch(
                "element does not match the ring's factor sizes".into(),
            ));
        }
        Ok(())
    }

    pub fn elem(&self, parts: Vec<Matrix>) -> Result<SsElem, SsError> {
        let e = SsElem { parts };
        self.check_shape(&e)?;
        Ok(e)
    }

    pub fn add(&self, a: &SsElem, b: &SsElem) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .zip(a.parts.iter().zip(b.parts.iter()))
                .map(|(f, (x, y))| x.add(&f.field, y))
                .collect(),
        }
    }

    pub fn neg(&self, a: &SsElem) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .zip(a.parts.iter())
                .map(|(f, x)| x.neg(&f.field))
                .collect(),
        }
    }

    pub fn sub(&self, a: &SsElem, b: &SsElem) -> SsElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &SsElem, b: &SsElem) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .zip(a.parts.iter().zip(b.parts.iter()))
                .map(|(f, (x, y))| x.mul(&f.field, y))
                .collect(),
        }
    }

    pub fn is_zero(&self, a: &SsElem) -> bool {
        self.factors
            .iter()
            .zip(a.parts.iter())
            .all(|(f, x)| x.is_zero(&f.field))
    }

    pub fn invert(&self, a: &SsElem) -> Result<SsElem, SsError> {
        let mut parts = Vec::with_capacity(a.parts.len());
        for (i, (f, x)) in self.factors.iter().zip(a.parts.iter()).enumerate() {
            match x.invert(&f.field) {
                Some(inv) => parts.push(inv),
                None => {
                    return Err(SsError::NotAUnit(format!(
                        "factor {i} component is singular"
                    )))
                }
            }
        }
        Ok(SsElem { parts })
    }

    pub fn render(&self, a: &SsElem) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .zip(a.parts.iter())
            .map(|(f, x)| x.render(&f.field))
            .collect();
        if parts.len() == 1 {
            parts.into_iter().next().unwrap()
        } else {
            format!("({})", parts.join(","))
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .map(|f| Matrix::sample(&f.field, f.n, rng))
                .collect(),
        }
    }

    /// Sampling profile safe for iterated sigma images.
    pub fn sample_tame(&self, rng: &mut dyn RngCore) -> SsElem {
        SsElem {
            parts: self
                .factors
                .iter()
                .map(|f| Matrix::sample_tame(&f.field, f.n, rng))
                .collect(),
        }
    }

    /// Random unit; resamples until every factor component is invertible.
    pub fn sample_unit(&self, rng: &mut dyn RngCore) -> SsElem {
        loop {
            let e = self.sample(rng);
            if self.invert(&e).is_ok() {
                return e;
            }
        }
    }

    /// Enumerates every ring element; only for small rings over `F_p`.
    pub fn enumerate(&self) -> Result<Vec<SsElem>, SsError> {
        let card = self.cardinality().ok_or_else(|| {
            SsError::Unsupported("enumeration requires finite scalar fields".into())
        })?;
        if card > 1 << 20 {
            return Err(SsError::Unsupported(format!(
                "ring has {card} elements; enumeration capped at 2^20"
            )));
        }
        let slots = self.unit_indices();
        let p = if self.factors.is_empty() {
            2
        } else {
            self.factors[0].field.prime().modulus()
        };
        let mut out = Vec::with_capacity(card as usize);
        let mut digits = vec![0u64; slots.len()];
        loop {
            let mut e = self.zero();
            for ((i, j, k), &d) in slots.iter().zip(digits.iter()) {
                e.parts[*i].set(*j, *k, Scalar::Prime(d));
            }
            out.push(e);
            // Odometer increment over base-p digits.
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return Ok(out);
                }
                digits[pos] += 1;
                if digits[pos] < p {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
}

// ---- Structured endomorphisms ----

/// Injective endomorphism of an [`SsRing`] in structured form: a factor
/// permutation `rho`, a unit `u_i` of factor `rho(i)` and a scalar
/// endomorphism `tau_i` per source factor.
#[derive(Debug, Clone)]
pub struct SsEndo {
    rho: Vec<usize>,
    units: Vec<Matrix>,
    units_inv: Vec<Matrix>,
    taus: Vec<ScalarEndo>,
}

impl SsEndo {
    pub fn new(
        ring: &SsRing,
        rho: Vec<usize>,
        units: Vec<Matrix>,
        taus: Vec<ScalarEndo>,
    ) -> Result<Self, SsError> {
        let m = ring.num_factors();
        if rho.len() != m || units.len() != m || taus.len() != m {
            return Err(SsError::ShapeMismatch(
                "rho, units and taus must list one entry per factor".into(),
            ));
        }
        let mut seen = vec![false; m];
        for &t in &rho {
            if t >= m || seen[t] {
                return Err(SsError::BadPermutation);
            }
            seen[t] = true;
        }
        let mut units_inv = Vec::with_capacity(m);
        for (i, u) in units.iter().enumerate() {
            let target = rho[i];
            if ring.size(target) != ring.size(i) {
                return Err(SsError::ShapeMismatch(format!(
                    "factor {i} has size {} but rho sends it to a factor of size {}",
                    ring.size(i),
                    ring.size(target)
                )));
            }
            if ring.field(target).is_rational() != ring.field(i).is_rational() {
                return Err(SsError::FieldMismatch(format!(
                    "factor {i} and factor {target} use different scalar fields"
                )));
            }
            if u.n() != ring.size(target) {
                return Err(SsError::ShapeMismatch(format!(
                    "unit for factor {i} has size {} but factor {target} has size {}",
                    u.n(),
                    ring.size(target)
                )));
            }
            match u.invert(ring.field(target)) {
                Some(inv) => units_inv.push(inv),
                None => {
                    return Err(SsError::NotAUnit(format!(
                        "u for factor {i} must be invertible"
                    )))
                }
            }
        }
        for (i, tau) in taus.iter().enumerate() {
            if matches!(tau, ScalarEndo::Map(_)) && !ring.field(i).is_rational() {
                return Err(SsError::FieldMismatch(format!(
                    "factor {i} is over F_p, whose only endomorphism is the identity"
                )));
            }
        }
        Ok(SsEndo {
            rho,
            units,
            units_inv,
            taus,
        })
    }

    /// Identity endomorphism.
    pub fn identity(ring: &SsRing) -> Self {
        let m = ring.num_factors();
        SsEndo {
            rho: (0..m).collect(),
            units: (0..m)
                .map(|i| Matrix::identity(ring.field(i), ring.size(i)))
                .collect(),
            units_inv: (0..m)
                .map(|i| Matrix::identity(ring.field(i), ring.size(i)))
                .collect(),
            taus: vec![ScalarEndo::Identity; m],
        }
    }

    pub fn rho(&self) -> &[usize] {
        &self.rho
    }

    pub fn tau(&self, i: usize) -> &ScalarEndo {
        &self.taus[i]
    }

    pub fn unit(&self, i: usize) -> &Matrix {
        &self.units[i]
    }

    pub fn is_surjective(&self) -> bool {
        self.taus.iter().all(|t| t.is_surjective())
    }

    /// True when the endomorphism fixes factor `i` without a unit twist or
    /// scalar action beyond `tau`.
    pub fn fixes_factor_untwisted(&self, ring: &SsRing, i: usize) -> bool {
        self.rho[i] == i && self.units[i].is_identity(ring.field(i))
    }

    pub fn apply(&self, ring: &SsRing, e: &SsElem) -> SsElem {
        let mut out = ring.zero();
        for i in 0..ring.num_factors() {
            let target = self.rho[i];
            let field = ring.field(target);
            let mapped = e.parts[i].map_entries(ring.field(i), &self.taus[i]);
            let conj = self.units_inv[i]
                .mul(field, &mapped)
                .mul(field, &self.units[i]);
            out.parts[target] = conj;
        }
        out
    }

    /// Exact preimage; `None` when any entry of the pulled-back matrix lies
    /// outside the image of the factor's scalar endomorphism.
    pub fn preimage(&self, ring: &SsRing, e: &SsElem) -> Option<SsElem> {
        let mut out = ring.zero();
        for i in 0..ring.num_factors() {
            let target = self.rho[i];
            let field = ring.field(target);
            let conj = self.units[i]
                .mul(field, &e.parts[target])
                .mul(field, &self.units_inv[i]);
            out.parts[i] = conj.entries_preimage(ring.field(i), &self.taus[i])?;
        }
        Some(out)
    }
}

/// Orbit decomposition of the factor permutation.
#[derive(Debug, Clone)]
pub struct Orbits {
    /// Cycles in ascending order of their smallest member.
    pub cycles: Vec<Vec<usize>>,
    /// Order of the permutation: lcm of the cycle lengths.
    pub order: usize,
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn orbits(ring: &SsRing, sigma: &SsEndo) -> Orbits {
    let m = ring.num_factors();
    let mut seen = vec![false; m];
    let mut cycles = Vec::new();
    let mut order = 1;
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = sigma.rho[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = sigma.rho[cur];
        }
        order = lcm(order, cycle.len());
        cycles.push(cycle);
    }
    Orbits { cycles, order }
}

/// Structured restriction of a power of `sigma` to one factor:
/// `X -> u^-1 * tau(X) * u` inside factor `i`.
#[derive(Debug, Clone)]
pub struct FactorEndo {
    pub factor: usize,
    pub tau: ScalarEndo,
    pub u: Matrix,
}

impl FactorEndo {
    pub fn apply(&self, field: &ScalarField, m: &Matrix) -> Matrix {
        let uinv = self.u.invert(field).expect("stored unit is invertible");
        uinv.mul(field, &m.map_entries(field, &self.tau))
            .mul(field, &self.u)
    }
}

impl SsEndo {
    /// Composes `sigma` with itself `m` times along the orbit of factor `i`;
    /// requires `rho^m` to fix `i`.
    pub fn power_restriction(&self, ring: &SsRing, i: usize, m: usize) -> FactorEndo {
        let field = ring.field(i);
        let prime = field.prime();
        let mut tau_acc = ScalarEndo::Identity;
        let mut u_acc = Matrix::identity(field, ring.size(i));
        let mut cur = i;
        for _ in 0..m {
            u_acc = u_acc
                .map_entries(field, &self.taus[cur])
                .mul(field, &self.units[cur]);
            tau_acc = self.taus[cur].compose(prime, &tau_acc);
            cur = self.rho[cur];
        }
        assert_eq!(cur, i, "rho^{m} does not fix factor {i}");
        FactorEndo {
            factor: i,
            tau: tau_acc,
            u: u_acc,
        }
    }
}

/// Checks that the structured map is a unital ring homomorphism with trivial
/// kernel: `sigma(1) = 1`, multiplicativity on all matrix-unit pairs within
/// each factor (cross-factor products vanish on both sides), idempotents
/// follow the permutation, and sampled nonzero elements have nonzero image.
pub fn verify_endomorphism(
    ring: &SsRing,
    sigma: &SsEndo,
    samples: usize,
    rng: &mut dyn RngCore,
) -> VerifyReport {
    let mut report = VerifyReport::new();
    let one = ring.one();
    report.record(
        "unital",
        sigma.apply(ring, &one) == one,
        "sigma(1) = 1".to_string(),
    );
    for i in 0..ring.num_factors() {
        let e = ring.idempotent(i);
        let img = sigma.apply(ring, &e);
        let want = ring.idempotent(sigma.rho[i]);
        report.record(
            &format!("idempotent-{i}"),
            img == want,
            format!("sigma(e_{i}) lands on factor {}", sigma.rho[i]),
        );
    }
    let mut mult_ok = true;
    let mut first = String::new();
    for (i, j, k) in ring.unit_indices() {
        for (i2, j2, k2) in ring.unit_indices() {
            if i != i2 {
                continue;
            }
            let a = ring.unit_elem(i, j, k);
            let b = ring.unit_elem(i2, j2, k2);
            let lhs = sigma.apply(ring, &ring.mul(&a, &b));
            let rhs = ring.mul(&sigma.apply(ring, &a), &sigma.apply(ring, &b));
            if lhs != rhs {
                mult_ok = false;
                if first.is_empty() {
                    first = format!("first violating pair e[{i};{j},{k}], e[{i2};{j2},{k2}]");
                }
            }
        }
    }
    report.record(
        "multiplicative-on-basis",
        mult_ok,
        if first.is_empty() {
            "sigma(ab) = sigma(a)sigma(b) on all matrix-unit pairs".to_string()
        } else {
            first
        },
    );
    let mut inj_ok = true;
    for _ in 0..samples {
        let a = ring.sample(rng);
        if !ring.is_zero(&a) && ring.is_zero(&sigma.apply(ring, &a)) {
            inj_ok = false;
            break;
        }
    }
    report.record(
        "injective",
        inj_ok,
        "structured form is injective; sampled kernel is trivial",
    );
    report
}

// ---- Sigma-derivations ----

/// Sigma-derivation in structured form: `delta(r) = b*r - sigma(r)*b` plus an
/// optional entrywise scalar derivation on untwisted fixed factors.
#[derive(Debug, Clone)]
pub struct SsDeriv {
    b: SsElem,
    entrywise: Vec<Option<ScalarDeriv>>,
}

impl SsDeriv {
    pub fn new(
        ring: &SsRing,
        sigma: &SsEndo,
        b: SsElem,
        entrywise: Vec<Option<ScalarDeriv>>,
    ) -> Result<Self, SsError> {
        ring.check_shape(&b)?;
        if entrywise.len() != ring.num_factors() {
            return Err(SsError::ShapeMismatch(
                "one optional entrywise part per factor".into(),
            ));
        }
        for (i, part) in entrywise.iter().enumerate() {
            let Some(d) = part else { continue };
            if d.is_zero() {
                continue;
            }
            if !ring.field(i).is_rational() {
                return Err(SsError::IncompatibleEntrywisePart(format!(
                    "factor {i} is over F_p, which has no nonzero derivation"
                )));
            }
            if !sigma.fixes_factor_untwisted(ring, i) {
                return Err(SsError::IncompatibleEntrywisePart(format!(
                    "factor {i} is moved or unit-twisted by sigma"
                )));
            }
            if d.sigma != sigma.taus[i] {
                return Err(SsError::IncompatibleEntrywisePart(format!(
                    "entrywise part on factor {i} must be a derivation twisted by sigma's tau"
                )));
            }
        }
        Ok(SsDeriv { b, entrywise })
    }

    pub fn zero(ring: &SsRing) -> Self {
        SsDeriv {
            b: ring.zero(),
            entrywise: vec![None; ring.num_factors()],
        }
    }

    pub fn inner(ring: &SsRing, b: SsElem) -> Result<Self, SsError> {
        ring.check_shape(&b)?;
        Ok(SsDeriv {
            b,
            entrywise: vec![None; ring.num_factors()],
        })
    }

    pub fn b(&self) -> &SsElem {
        &self.b
    }

    pub fn entrywise(&self) -> &[Option<ScalarDeriv>] {
        &self.entrywise
    }

    pub fn is_zero(&self, ring: &SsRing) -> bool {
        ring.is_zero(&self.b)
            && self
                .entrywise
                .iter()
                .all(|d| d.as_ref().map_or(true, |d| d.is_zero()))
    }

    pub fn apply(&self, ring: &SsRing, sigma: &SsEndo, e: &SsElem) -> SsElem {
        let inner = ring.sub(
            &ring.mul(&self.b, e),
            &ring.mul(&sigma.apply(ring, e), &self.b),
        );
        let mut out = inner;
        for (i, part) in self.entrywise.iter().enumerate() {
            let Some(d) = part else { continue };
            if d.is_zero() {
                continue;
            }
            let field = ring.field(i);
            let n = ring.size(i);
            let mut m = Matrix::zero(field, n);
            for r in 0..n {
                for c in 0..n {
                    m.set(r, c, field.deriv_apply(d, e.parts[i].get(r, c)));
                }
            }
            out.parts[i] = out.parts[i].add(field, &m);
        }
        out
    }
}

/// Checks the twisted Leibniz rule `delta(ab) = delta(a)b + sigma(a)delta(b)`
/// for a derivation given by its values on the matrix-unit basis. Unit pairs
/// suffice by additivity over `F_p`; for rational scalar factors the caller
/// should also pass sampled pairs through [`verify_sigma_derivation_sampled`].
pub fn verify_sigma_derivation(
    ring: &SsRing,
    sigma: &SsEndo,
    delta_on_basis: &dyn Fn(usize, usize, usize) -> SsElem,
) -> VerifyReport {
    let mut report = VerifyReport::new();
    let units = ring.unit_indices();
    // delta(1) = 0 is forced by Leibniz; check it directly.
    let mut d_one = ring.zero();
    for i in 0..ring.num_factors() {
        for j in 0..ring.size(i) {
            d_one = ring.add(&d_one, &delta_on_basis(i, j, j));
        }
    }
    report.record(
        "kills-one",
        ring.is_zero(&d_one),
        "delta(1) = 0".to_string(),
    );
    let delta_of_unit_product = |i: usize, j: usize, k: usize, i2: usize, j2: usize, k2: usize| {
        // e[i;j,k] * e[i2;j2,k2] is e[i;j,k2] when i = i2 and k = j2, else 0.
        if i == i2 && k == j2 {
            delta_on_basis(i, j, k2)
        } else {
            ring.zero()
        }
    };
    let mut ok = true;
    let mut first = String::new();
    for &(i, j, k) in &units {
        let a = ring.unit_elem(i, j, k);
        let da = delta_on_basis(i, j, k);
        let sa = sigma.apply(ring, &a);
        for &(i2, j2, k2) in &units {
            let b = ring.unit_elem(i2, j2, k2);
            let db = delta_on_basis(i2, j2, k2);
            let lhs = delta_of_unit_product(i, j, k, i2, j2, k2);
            let rhs = ring.add(&ring.mul(&da, &b), &ring.mul(&sa, &db));
            if lhs != rhs {
                ok = false;
                if first.is_empty() {
                    first =
                        format!("first violating pair e[{i};{j},{k}], e[{i2};{j2},{k2}]");
                }
            }
        }
    }
    report.record(
        "leibniz-on-basis",
        ok,
        if first.is_empty() {
            "delta(ab) = delta(a)b + sigma(a)delta(b) on all matrix-unit pairs".to_string()
        } else {
            first
        },
    );
    report
}

/// Leibniz spot-check on sampled element pairs for a concrete derivation.
pub fn verify_sigma_derivation_sampled(
    ring: &SsRing,
    sigma: &SsEndo,
    delta: &SsDeriv,
    samples: usize,
    rng: &mut dyn RngCore,
) -> VerifyReport {
    let mut report = VerifyReport::new();
    let mut ok = true;
    let mut first = String::new();
    for _ in 0..samples {
        let a = ring.sample(rng);
        let b = ring.sample(rng);
        let lhs = delta.apply(ring, sigma, &ring.mul(&a, &b));
        let rhs = ring.add(
            &ring.mul(&delta.apply(ring, sigma, &a), &b),
            &ring.mul(&sigma.apply(ring, &a), &delta.apply(ring, sigma, &b)),
        );
        if lhs != rhs {
            ok = false;
            if first.is_empty() {
                first = format!(
                    "violated at a = {}, b = {}",
                    ring.render(&a),
                    ring.render(&b)
                );
            }
            break;
        }
    }
    report.record(
        "leibniz-sampled",
        ok,
        if first.is_empty() {
            format!("Leibniz holds on {samples} sampled pairs")
        } else {
            first
        },
    );
    report
}

// ---- Inner derivation solver ----

/// Outcome of [`solve_inner`]. `NotInner` is a normal answer, not an error.
#[derive(Debug, Clone)]
pub enum InnerOutcome {
    Inner {
        /// Solution with free variables zeroed under the lexicographic entry
        /// order (factor, row, column); deterministic across runs.
        b: SsElem,
        /// Dimension of the affine solution space.
        solution_space_dim: usize,
    },
    NotInner {
        reason: String,
    },
}

/// Solves `delta(r) = b*r - sigma(r)*b` for `b`, given `delta` by its values
/// on the matrix-unit basis. The system splits along `rho`-orbits and is
/// solved exactly over each orbit's scalar field.
pub fn solve_inner(
    ring: &SsRing,
    sigma: &SsEndo,
    delta_on_basis: &dyn Fn(usize, usize, usize) -> SsElem,
) -> InnerOutcome {
    let orbit_data = orbits(ring, sigma);
    let mut b = ring.zero();
    let mut total_dim = 0;
    for cycle in &orbit_data.cycles {
        let mut members: Vec<usize> = cycle.clone();
        members.sort_unstable();
        let field = ring.field(members[0]).clone();
        // Column layout: entries of b_f for f in ascending factor order.
        let mut col_of = std::collections::BTreeMap::new();
        let mut ncols = 0;
        for &f in &members {
            col_of.insert(f, ncols);
            ncols += ring.size(f) * ring.size(f);
        }
        let col = |f: usize, r: usize, c: usize, col_of: &std::collections::BTreeMap<usize, usize>| {
            col_of[&f] + r * ring.size(f) + c
        };
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        for &i in &members {
            let n = ring.size(i);
            let target = sigma.rho()[i];
            for j in 0..n {
                for k in 0..n {
                    let d = delta_on_basis(i, j, k);
                    // Support outside {i, rho(i)} rules out inner form.
                    for (m, part) in d.parts().iter().enumerate() {
                        if m != i && m != target && !part.is_zero(ring.field(m)) {
                            return InnerOutcome::NotInner {
                                reason: format!(
                                    "delta(e[{i};{j},{k}]) has support in factor {m}, outside the orbit pair"
                                ),
                            };
                        }
                    }
                    let sig_e = sigma.apply(ring, &ring.unit_elem(i, j, k));
                    let sig_part = sig_e.part(target);
                    if i != target {
                        // Component i: delta(e)_i = b_i * e, so column (i, r, j)
                        // carries coefficient 1 exactly in row (r, k).
                        for r in 0..n {
                            for c in 0..n {
                                let mut row = vec![field.zero(); ncols];
                                if c == k {
                                    row[col(i, r, j, &col_of)] = field.one();
                                }
                                rows.push(row);
                                rhs.push(d.part(i).get(r, c).clone());
                            }
                        }
                        // Component rho(i): delta(e)_rho = -sigma(e) * b_rho.
                        let nt = ring.size(target);
                        for r in 0..nt {
                            for c in 0..nt {
                                let mut row = vec![field.zero(); ncols];
                                for s in 0..nt {
                                    row[col(target, s, c, &col_of)] =
                                        field.neg(sig_part.get(r, s));
                                }
                                rows.push(row);
                                rhs.push(d.part(target).get(r, c).clone());
                            }
                        }
                    } else {
                        // Fixed factor: delta(e)_i = b_i e - sigma(e) b_i.
                        for r in 0..n {
                            for c in 0..n {
                                let mut row = vec![field.zero(); ncols];
                                if c == k {
                                    row[col(i, r, j, &col_of)] = field.one();
                                }
                                for s in 0..n {
                                    let cur = row[col(i, s, c, &col_of)].clone();
                                    row[col(i, s, c, &col_of)] =
                                        field.sub(&cur, sig_part.get(r, s));
                                }
                                rows.push(row);
                                rhs.push(d.part(i).get(r, c).clone());
                            }
                        }
                    }
                }
            }
        }
        match linalg::solve_affine(&field, &rows, &rhs) {
            None => {
                return InnerOutcome::NotInner {
                    reason: format!(
                        "no inner witness exists on the orbit of factor {}",
                        members[0]
                    ),
                }
            }
            Some(sol) => {
                total_dim += sol.kernel_dim;
                for &f in &members {
                    let n = ring.size(f);
                    for r in 0..n {
                        for c in 0..n {
                            b.parts[f].set(r, c, sol.particular[col(f, r, c, &col_of)].clone());
                        }
                    }
                }
            }
        }
    }
    InnerOutcome::Inner {
        b,
        solution_space_dim: total_dim,
    }
}

// ---- Annihilator chains ----

/// Enumerates left annihilators of single elements in a small finite ring and
/// reports the longest strictly ascending chain; every chain is finite, which
/// is the ascending chain condition made concrete at desk scale.
pub fn annihilator_chain_report(ring: &SsRing) -> Result<VerifyReport, SsError> {
    let elements = ring.enumerate()?;
    let field = if ring.num_factors() > 0 {
        ScalarField::Prime(*ring.field(0).prime())
    } else {
        ScalarField::Prime(crate::scalars::PrimeField::new(2).unwrap())
    };
    let dim: usize = ring.factors().iter().map(|f| f.n * f.n).sum();
    let flatten = |e: &SsElem| -> Vec<Scalar> {
        let mut v = Vec::with_capacity(dim);
        for (i, f) in ring.factors().iter().enumerate() {
            for r in 0..f.n {
                for c in 0..f.n {
                    v.push(e.parts[i].get(r, c).clone());
                }
            }
        }
        v
    };
    // Left annihilator of a: kernel of x -> x*a, as a canonical RREF basis.
    let mut distinct: Vec<Vec<Vec<Scalar>>> = Vec::new();
    for a in &elements {
        let mut rows = Vec::with_capacity(dim);
        for (i, j, k) in ring.unit_indices() {
            let x = ring.unit_elem(i, j, k);
            rows.push(flatten(&ring.mul(&x, a)));
        }
        // rows[m] is the image of the m-th basis vector; transpose to get the
        // matrix of the right-multiplication operator acting on coordinates.
        let mat: Vec<Vec<Scalar>> = (0..dim)
            .map(|c| (0..dim).map(|r| rows[r][c].clone()).collect())
            .collect();
        let mut basis = linalg::kernel_basis(&field, &mat);
        linalg::rref(&field, &mut basis);
        if !distinct.iter().any(|b| *b == basis) {
            distinct.push(basis);
        }
    }
    // Longest chain in the inclusion order via DP over dimensions.
    let contains = |big: &Vec<Vec<Scalar>>, small: &Vec<Vec<Scalar>>| -> bool {
        if small.len() > big.len() {
            return false;
        }
        let mut all: Vec<Vec<Scalar>> = big.clone();
        all.extend(small.iter().cloned());
        linalg::rank(&field, all) == big.len()
    };
    let n = distinct.len();
    let mut best = vec![1usize; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| distinct[i].len());
    for (pos, &i) in order.iter().enumerate() {
        for &j in order.iter().take(pos) {
            if distinct[j].len() < distinct[i].len() && contains(&distinct[i], &distinct[j]) {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    let longest = best.iter().copied().max().unwrap_or(0);
    let mut report = VerifyReport::new();
    report.record(
        "annihilator-count",
        true,
        format!("{} distinct left annihilators of single elements", n),
    );
    report.record(
        "ascending-chains-stabilize",
        longest <= dim + 1,
        format!("longest strict chain has {longest} subspaces (dimension bound {dim})"),
    );
    Ok(report)
}
