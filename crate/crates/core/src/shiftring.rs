//! The shift counterexample ring: column-finite N x N matrices over F_p of
//! the form "finite block plus constant scalar tail", with the endomorphism
//! that shifts the block down-right and refills position (1,1) from the
//! tail. The ring is prime, the shift is injective but not surjective, and
//! the skew polynomial ring it twists is not semiprime: the corner element
//! `e11*x` spans a square-zero left ideal.
//!
//! Block size is kept canonically minimal, so derived equality is equality
//! of the denoted infinite matrices. Positions are 1-based throughout,
//! matching the customary `e11` notation.

use crate::linalg::invert;
use crate::ore::{nilpotency_search, skew_mul, NilWitness, OreError, SkewContext, SkewPoly};
use crate::scalars::{PrimeField, Scalar, ScalarField};
use crate::verify::VerifyReport;
use rand::{Rng, RngCore};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShiftError {
    #[error("primeness witness needs nonzero inputs")]
    ZeroInput,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// `sum block[i][j] e_ij (i,j <= n)  +  tail * sum e_ii (i > n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvScalarMat {
    p: PrimeField,
    n: usize,
    block: Vec<u64>,
    tail: u64,
}

impl EvScalarMat {
    pub fn new(p: PrimeField, n: usize, entries: &[u64], tail: u64) -> Self {
        assert_eq!(entries.len(), n * n, "block must be n x n");
        let block = entries.iter().map(|&e| e % p.modulus()).collect();
        EvScalarMat {
            p,
            n,
            block,
            tail: tail % p.modulus(),
        }
        .canonicalize()
    }

    fn canonicalize(mut self) -> Self {
        while self.n > 0 {
            let l = self.n - 1;
            let trailing_matches = self.block[l * self.n + l] == self.tail
                && (0..l).all(|i| {
                    self.block[i * self.n + l] == 0 && self.block[l * self.n + i] == 0
                });
            if !trailing_matches {
                break;
            }
            let m = self.n - 1;
            let mut shrunk = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    shrunk.push(self.block[i * self.n + j]);
                }
            }
            self.block = shrunk;
            self.n = m;
        }
        self
    }

    pub fn zero(p: PrimeField) -> Self {
        EvScalarMat {
            p,
            n: 0,
            block: Vec::new(),
            tail: 0,
        }
    }

    pub fn one(p: PrimeField) -> Self {
        Self::scalar(p, 1)
    }

    /// `a` times the identity: empty block, tail `a`.
    pub fn scalar(p: PrimeField, a: u64) -> Self {
        EvScalarMat {
            p,
            n: 0,
            block: Vec::new(),
            tail: a % p.modulus(),
        }
    }

    /// Matrix unit `e_ij`, 1-based.
    pub fn unit(p: PrimeField, i: usize, j: usize) -> Self {
        assert!(i >= 1 && j >= 1, "matrix units are 1-based");
        let n = i.max(j);
        let mut block = vec![0; n * n];
        block[(i - 1) * n + (j - 1)] = 1;
        EvScalarMat { p, n, block, tail: 0 }
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn tail(&self) -> u64 {
        self.tail
    }

    /// Entry at 1-based position `(i, j)` of the denoted infinite matrix.
    pub fn entry(&self, i: usize, j: usize) -> u64 {
        assert!(i >= 1 && j >= 1);
        if i <= self.n && j <= self.n {
            self.block[(i - 1) * self.n + (j - 1)]
        } else if i == j {
            self.tail
        } else {
            0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.n == 0 && self.tail == 0
    }

    fn padded(&self, m: usize) -> Vec<u64> {
        debug_assert!(m >= self.n);
        let mut out = vec![0; m * m];
        for i in 0..self.n {
            for j in 0..self.n {
                out[i * m + j] = self.block[i * self.n + j];
            }
        }
        for d in self.n..m {
            out[d * m + d] = self.tail;
        }
        out
    }

    pub fn add(&self, other: &EvScalarMat) -> EvScalarMat {
        let p = self.p;
        let m = self.n.max(other.n);
        let a = self.padded(m);
        let b = other.padded(m);
        let block: Vec<u64> = a.iter().zip(&b).map(|(&x, &y)| p.add(x, y)).collect();
        EvScalarMat {
            p,
            n: m,
            block,
            tail: p.add(self.tail, other.tail),
        }
        .canonicalize()
    }

    pub fn neg(&self) -> EvScalarMat {
        let p = self.p;
        EvScalarMat {
            p,
            n: self.n,
            block: self.block.iter().map(|&x| p.neg(x)).collect(),
            tail: p.neg(self.tail),
        }
    }

    pub fn sub(&self, other: &EvScalarMat) -> EvScalarMat {
        self.add(&other.neg())
    }

    /// Blocks multiply at the common size; tails multiply; the cross terms
    /// vanish because block and tail have disjoint support.
    pub fn mul(&self, other: &EvScalarMat) -> EvScalarMat {
        let p = self.p;
        let m = self.n.max(other.n);
        let a = self.padded(m);
        let b = other.padded(m);
        let mut block = vec![0; m * m];
        for i in 0..m {
            for k in 0..m {
                let aik = a[i * m + k];
                if aik == 0 {
                    continue;
                }
                for j in 0..m {
                    block[i * m + j] = p.add(block[i * m + j], p.mul(aik, b[k * m + j]));
                }
            }
        }
        EvScalarMat {
            p,
            n: m,
            block,
            tail: p.mul(self.tail, other.tail),
        }
        .canonicalize()
    }

    /// Inverse when the block is invertible at the canonical size and the
    /// tail is nonzero; the two parts invert independently.
    pub fn invert(&self) -> Option<EvScalarMat> {
        let p = self.p;
        let tail_inv = p.inv(self.tail)?;
        if self.n == 0 {
            return Some(EvScalarMat::scalar(p, tail_inv));
        }
        let field = ScalarField::Prime(p);
        let rows: Vec<Vec<Scalar>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| Scalar::Prime(self.block[i * self.n + j]))
                    .collect()
            })
            .collect();
        let inv_rows = invert(&field, &rows)?;
        let mut block = Vec::with_capacity(self.n * self.n);
        for row in &inv_rows {
            for s in row {
                match s {
                    Scalar::Prime(v) => block.push(*v),
                    Scalar::Rational(_) => return None,
                }
            }
        }
        Some(
            EvScalarMat {
                p,
                n: self.n,
                block,
                tail: tail_inv,
            }
            .canonicalize(),
        )
    }

    pub fn render(&self) -> String {
        let mut terms = Vec::new();
        for i in 1..=self.n {
            for j in 1..=self.n {
                let c = self.entry(i, j);
                if c == 0 {
                    continue;
                }
                if c == 1 {
                    terms.push(format!("e({i},{j})"));
                } else {
                    terms.push(format!("{c}*e({i},{j})"));
                }
            }
        }
        if self.tail != 0 {
            terms.push(format!("tail({})", self.tail));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }

    pub fn sample(p: PrimeField, rng: &mut dyn RngCore) -> EvScalarMat {
        let n = rng.gen_range(0..=3usize);
        let entries: Vec<u64> = (0..n * n).map(|_| p.sample(rng)).collect();
        let tail = p.sample(rng);
        EvScalarMat::new(p, n, &entries, tail)
    }
}

/// The shift endomorphism: the block moves down-right by one, the tail value
/// appears at position (1,1), and the tail continues past the block.
pub fn shift_sigma(a: &EvScalarMat) -> EvScalarMat {
    let p = a.p;
    let m = a.n + 1;
    let mut block = vec![0; m * m];
    block[0] = a.tail;
    for i in 0..a.n {
        for j in 0..a.n {
            block[(i + 1) * m + (j + 1)] = a.block[i * a.n + j];
        }
    }
    EvScalarMat {
        p,
        n: m,
        block,
        tail: a.tail,
    }
    .canonicalize()
}

/// Exact preimage under the shift: position (1,1) must carry the tail value
/// and the rest of the first row and column must vanish.
pub fn shift_preimage(a: &EvScalarMat) -> Option<EvScalarMat> {
    if a.n == 0 {
        return Some(a.clone());
    }
    if a.block[0] != a.tail {
        return None;
    }
    for k in 1..a.n {
        if a.block[k] != 0 || a.block[k * a.n] != 0 {
            return None;
        }
    }
    let m = a.n - 1;
    let mut block = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            block.push(a.block[(i + 1) * a.n + (j + 1)]);
        }
    }
    Some(
        EvScalarMat {
            p: a.p,
            n: m,
            block,
            tail: a.tail,
        }
        .canonicalize(),
    )
}

/// Primeness in one step: from nonzero entries `A[i,j]` and `B[k,l]`, the
/// unit `r = e_jk` gives `A*r*B` a nonzero entry at `(i,l)`. Returns the
/// multiplier and the verified nonzero product.
pub fn prime_witness(
    a: &EvScalarMat,
    b: &EvScalarMat,
) -> Result<(EvScalarMat, EvScalarMat), ShiftError> {
    if a.is_zero() || b.is_zero() {
        return Err(ShiftError::ZeroInput);
    }
    let first_nonzero = |m: &EvScalarMat| -> (usize, usize) {
        for i in 1..=m.n {
            for j in 1..=m.n {
                if m.entry(i, j) != 0 {
                    return (i, j);
                }
            }
        }
        // Canonical nonzero value with a zero block: the tail is nonzero
        // and first appears just past the block.
        (m.n + 1, m.n + 1)
    };
    let (_, j) = first_nonzero(a);
    let (k, _) = first_nonzero(b);
    let r = EvScalarMat::unit(a.p, j, k);
    let product = a.mul(&r).mul(b);
    if product.is_zero() {
        return Err(ShiftError::Internal(
            "witness product vanished for nonzero inputs".into(),
        ));
    }
    Ok((r, product))
}

/// Skew polynomial context over the shift ring with zero derivation. The
/// spanning set holds the identity and the units `e_ij` with `i, j` up to
/// `span`: the shift moves indices up by one per power of `x`, so degree-`d`
/// interactions with the corner idempotent only involve indices `<= d + 2`.
#[derive(Debug, Clone)]
pub struct ShiftOreContext {
    pub p: PrimeField,
    pub span: usize,
}

impl ShiftOreContext {
    pub fn new(p: PrimeField, span: usize) -> Self {
        ShiftOreContext { p, span }
    }
}

impl SkewContext for ShiftOreContext {
    type Elem = EvScalarMat;

    fn zero(&self) -> EvScalarMat {
        EvScalarMat::zero(self.p)
    }
    fn one(&self) -> EvScalarMat {
        EvScalarMat::one(self.p)
    }
    fn add(&self, a: &EvScalarMat, b: &EvScalarMat) -> EvScalarMat {
        a.add(b)
    }
    fn neg(&self, a: &EvScalarMat) -> EvScalarMat {
        a.neg()
    }
    fn mul(&self, a: &EvScalarMat, b: &EvScalarMat) -> EvScalarMat {
        a.mul(b)
    }
    fn is_zero(&self, a: &EvScalarMat) -> bool {
        a.is_zero()
    }
    fn sigma(&self, a: &EvScalarMat) -> EvScalarMat {
        shift_sigma(a)
    }
    fn delta(&self, _a: &EvScalarMat) -> EvScalarMat {
        EvScalarMat::zero(self.p)
    }
    fn invert(&self, a: &EvScalarMat) -> Option<EvScalarMat> {
        a.invert()
    }
    fn render_elem(&self, a: &EvScalarMat) -> String {
        a.render()
    }
    fn sample_elem(&self, rng: &mut dyn RngCore) -> EvScalarMat {
        EvScalarMat::sample(self.p, rng)
    }
    fn coefficient_spanning_set(&self) -> Vec<EvScalarMat> {
        let mut out = vec![EvScalarMat::one(self.p)];
        for i in 1..=self.span {
            for j in 1..=self.span {
                out.push(EvScalarMat::unit(self.p, i, j));
            }
        }
        out
    }
}

/// Ring endomorphism checks for the shift on random samples, plus the
/// structural non-surjectivity fact: `e11` has no preimage because any
/// candidate would need its tail both at position (1,1) and past the block.
pub fn verify_shift_endomorphism(
    p: PrimeField,
    samples: usize,
    rng: &mut dyn RngCore,
) -> VerifyReport {
    let mut report = VerifyReport::new();
    let mut mult_ok = true;
    let mut add_ok = true;
    let mut inj_ok = true;
    for _ in 0..samples {
        let a = EvScalarMat::sample(p, rng);
        let b = EvScalarMat::sample(p, rng);
        if shift_sigma(&a.mul(&b)) != shift_sigma(&a).mul(&shift_sigma(&b)) {
            mult_ok = false;
        }
        if shift_sigma(&a.add(&b)) != shift_sigma(&a).add(&shift_sigma(&b)) {
            add_ok = false;
        }
        if shift_preimage(&shift_sigma(&a)) != Some(a.clone()) {
            inj_ok = false;
        }
    }
    report.record(
        "unital",
        shift_sigma(&EvScalarMat::one(p)) == EvScalarMat::one(p),
        "the shift fixes the identity",
    );
    report.record(
        "multiplicative",
        mult_ok,
        format!("sigma(a*b) = sigma(a)*sigma(b) on {samples} sampled pairs"),
    );
    report.record(
        "additive",
        add_ok,
        format!("sigma(a+b) = sigma(a)+sigma(b) on {samples} sampled pairs"),
    );
    report.record(
        "injective",
        inj_ok,
        "the exact preimage inverts the shift on samples",
    );
    report.record(
        "not-surjective",
        shift_preimage(&EvScalarMat::unit(p, 1, 1)).is_none(),
        "e(1,1) has no preimage: its (1,1) entry disagrees with its tail",
    );
    report
}

/// Certificate that `e11*x` spans a square-zero left ideal of the skew
/// polynomial ring: the displayed identity `e11*x*r*x^k*e11 = 0` over a
/// spanning set, vanishing of random products `(e11*x*p)*(e11*x*q)`, and the
/// compression `e11*sigma(r)` landing in `F_p*e11`.
pub fn nilpotent_ideal_certificate(
    p: PrimeField,
    k_max: usize,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<VerifyReport, OreError> {
    let ctx = ShiftOreContext::new(p, k_max + 2);
    let spanning = ctx.coefficient_spanning_set();
    let e11 = EvScalarMat::unit(p, 1, 1);
    let corner_x = SkewPoly::monomial(&ctx, e11.clone(), 1);
    let mut report = VerifyReport::new();

    let mut identity_ok = true;
    for r in &spanning {
        for k in 0..=k_max {
            let step = skew_mul(&ctx, &corner_x, &SkewPoly::constant(&ctx, r.clone()))?;
            let step = skew_mul(&ctx, &step, &SkewPoly::monomial(&ctx, ctx.one(), k))?;
            let step = skew_mul(&ctx, &step, &SkewPoly::constant(&ctx, e11.clone()))?;
            if !step.is_zero() {
                identity_ok = false;
            }
        }
    }
    report.record(
        "corner-identity",
        identity_ok,
        format!(
            "e(1,1)*x*r*x^k*e(1,1) = 0 for {} spanning r and k <= {k_max}",
            spanning.len()
        ),
    );

    let mut squares_ok = true;
    for _ in 0..budget {
        let f = crate::ore::sample_poly(&ctx, 5, rng);
        let g = crate::ore::sample_poly(&ctx, 5, rng);
        let left = skew_mul(&ctx, &corner_x, &f)?;
        let right = skew_mul(&ctx, &corner_x, &g)?;
        if !skew_mul(&ctx, &left, &right)?.is_zero() {
            squares_ok = false;
        }
    }
    report.record(
        "random-squares",
        squares_ok,
        format!("(e(1,1)*x*p)*(e(1,1)*x*q) = 0 for {budget} random pairs of degree <= 5"),
    );

    let compression_ok = spanning.iter().all(|r| {
        let m = e11.mul(&shift_sigma(r));
        m.is_zero() || (m.block_size() == 1 && m.tail() == 0)
    });
    report.record(
        "corner-compression",
        compression_ok,
        "e(1,1)*sigma(r) is a scalar multiple of e(1,1) for spanning r",
    );
    Ok(report)
}

/// Runs the generic nilpotency search over the shift context; the first
/// witness in the sparse enumeration is the corner monomial.
pub fn corner_witness_search(
    p: PrimeField,
    deg_bound: usize,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<Option<NilWitness<EvScalarMat>>, OreError> {
    let ctx = ShiftOreContext::new(p, deg_bound + 2);
    nilpotency_search(&ctx, deg_bound, budget, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> PrimeField {
        PrimeField::new(2).unwrap()
    }

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn canonical_forms_identify_padded_representations() {
        let p = f3();
        // The identity padded into a 2x2 block is still the identity.
        let padded = EvScalarMat::new(p, 2, &[1, 0, 0, 1], 1);
        assert_eq!(padded, EvScalarMat::one(p));
        assert_eq!(padded.block_size(), 0);
        // A nontrivial corner survives canonicalization.
        let corner = EvScalarMat::new(p, 2, &[1, 0, 0, 0], 0);
        assert_eq!(corner, EvScalarMat::unit(p, 1, 1));
        assert_eq!(corner.block_size(), 1);
        // Entries beyond the block read off the tail diagonal.
        assert_eq!(EvScalarMat::scalar(p, 2).entry(7, 7), 2);
        assert_eq!(EvScalarMat::scalar(p, 2).entry(7, 8), 0);
    }

    #[test]
    fn products_follow_matrix_unit_calculus() {
        let p = f3();
        let a = EvScalarMat::sample(p, &mut ChaCha8Rng::seed_from_u64(51));
        assert_eq!(EvScalarMat::one(p).mul(&a), a);
        assert_eq!(a.mul(&EvScalarMat::one(p)), a);
        let e11 = EvScalarMat::unit(p, 1, 1);
        let e22 = EvScalarMat::unit(p, 2, 2);
        assert!(e11.mul(&e22).is_zero());
        // (1 + e12)(1 + e21) = 1 + e11 + e12 + e21.
        let one = EvScalarMat::one(p);
        let lhs = one
            .add(&EvScalarMat::unit(p, 1, 2))
            .mul(&one.add(&EvScalarMat::unit(p, 2, 1)));
        let rhs = one
            .add(&EvScalarMat::unit(p, 1, 1))
            .add(&EvScalarMat::unit(p, 1, 2))
            .add(&EvScalarMat::unit(p, 2, 1));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.entry(1, 1), 2);
        // Bare corner blocks with a tail: only the block parts interact.
        let a = EvScalarMat::new(p, 2, &[0, 1, 0, 0], 1);
        let b = EvScalarMat::new(p, 2, &[0, 0, 1, 0], 1);
        assert_eq!(a.mul(&b), EvScalarMat::new(p, 2, &[1, 0, 0, 0], 1));
    }

    #[test]
    fn shift_matches_the_displayed_formula() {
        let p = f2();
        assert_eq!(
            shift_sigma(&EvScalarMat::unit(p, 1, 1)),
            EvScalarMat::unit(p, 2, 2)
        );
        assert_eq!(shift_sigma(&EvScalarMat::one(p)), EvScalarMat::one(p));
        assert_eq!(
            shift_sigma(&EvScalarMat::unit(p, 1, 2)),
            EvScalarMat::unit(p, 2, 3)
        );
        // The tail lands at (1,1).
        let a = EvScalarMat::scalar(f3(), 2);
        assert_eq!(shift_sigma(&a).entry(1, 1), 2);
        let report = verify_shift_endomorphism(f3(), 1000, &mut ChaCha8Rng::seed_from_u64(52));
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn corner_unit_has_no_shift_preimage() {
        let p = f2();
        assert_eq!(shift_preimage(&EvScalarMat::unit(p, 1, 1)), None);
        assert_eq!(
            shift_preimage(&EvScalarMat::unit(p, 2, 2)),
            Some(EvScalarMat::unit(p, 1, 1))
        );
        // Scalars shift to themselves.
        let s = EvScalarMat::scalar(f3(), 2);
        assert_eq!(shift_sigma(&s), s);
        assert_eq!(shift_preimage(&s), Some(s.clone()));
    }

    #[test]
    fn inverses_split_into_block_and_tail() {
        let p = f3();
        let a = EvScalarMat::one(p).add(&EvScalarMat::unit(p, 1, 2));
        let inv = a.invert().unwrap();
        assert_eq!(a.mul(&inv), EvScalarMat::one(p));
        assert_eq!(inv.mul(&a), EvScalarMat::one(p));
        // A zero tail can never invert.
        assert_eq!(EvScalarMat::unit(p, 1, 1).invert(), None);
        // A singular block can never invert.
        let sing = EvScalarMat::new(p, 2, &[1, 1, 1, 1], 2);
        assert_eq!(sing.invert(), None);
    }

    #[test]
    fn prime_witnesses_connect_nonzero_pairs() {
        let p = f3();
        let e11 = EvScalarMat::unit(p, 1, 1);
        let (r, product) = prime_witness(&e11, &e11).unwrap();
        assert_eq!(r, e11);
        assert_eq!(product, e11);
        let (r, product) =
            prime_witness(&EvScalarMat::unit(p, 1, 2), &EvScalarMat::unit(p, 3, 4)).unwrap();
        assert_eq!(r, EvScalarMat::unit(p, 2, 3));
        assert_eq!(product, EvScalarMat::unit(p, 1, 4));
        // A tail-only left factor connects through its first diagonal spot.
        let (r, product) = prime_witness(&EvScalarMat::scalar(p, 2), &e11).unwrap();
        assert_eq!(r, e11);
        assert_eq!(product.entry(1, 1), 2);
        assert_eq!(
            prime_witness(&EvScalarMat::zero(p), &e11),
            Err(ShiftError::ZeroInput)
        );
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..200 {
            let mut a = EvScalarMat::sample(p, &mut rng);
            while a.is_zero() {
                a = EvScalarMat::sample(p, &mut rng);
            }
            let mut b = EvScalarMat::sample(p, &mut rng);
            while b.is_zero() {
                b = EvScalarMat::sample(p, &mut rng);
            }
            let (_, product) = prime_witness(&a, &b).unwrap();
            assert!(!product.is_zero());
        }
    }

    #[test]
    fn corner_products_vanish_in_the_skew_ring() {
        let p = f2();
        let ctx = ShiftOreContext::new(p, 4);
        let e11 = EvScalarMat::unit(p, 1, 1);
        // k = 0, r = 1: e11*x*e11 = e11*sigma(e11)*x = e11*e22*x = 0.
        let corner_x = SkewPoly::monomial(&ctx, e11.clone(), 1);
        let k0 = skew_mul(&ctx, &corner_x, &SkewPoly::constant(&ctx, e11.clone())).unwrap();
        assert!(k0.is_zero());
        // k = 2, r = e33: the product compresses through e44 and dies.
        let r = SkewPoly::constant(&ctx, EvScalarMat::unit(p, 3, 3));
        let x2 = SkewPoly::monomial(&ctx, ctx.one(), 2);
        let chain = skew_mul(&ctx, &corner_x, &r).unwrap();
        let chain = skew_mul(&ctx, &chain, &x2).unwrap();
        let chain = skew_mul(&ctx, &chain, &SkewPoly::constant(&ctx, e11.clone())).unwrap();
        assert!(chain.is_zero());
        let report =
            nilpotent_ideal_certificate(p, 2, 500, &mut ChaCha8Rng::seed_from_u64(54)).unwrap();
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn generic_search_finds_the_corner_witness() {
        let p = f2();
        let witness = corner_witness_search(p, 2, 2000, &mut ChaCha8Rng::seed_from_u64(55))
            .unwrap()
            .expect("the corner monomial is a witness");
        let ctx = ShiftOreContext::new(p, 4);
        assert_eq!(
            witness.p,
            SkewPoly::monomial(&ctx, EvScalarMat::unit(p, 1, 1), 1)
        );
        assert_eq!(witness.max_x_power, 2);
    }
}
