//! Scalar coefficient fields: the prime field `F_p` and the rational function
//! field `F_p(t)`, together with their injective endomorphisms `t -> c*t^k`
//! and the sigma-derivations determined by the image of `t`.
//!
//! Representation invariants:
//! - residues live in `[0, p)`;
//! - dense polynomials are stored with ascending coefficients and no leading
//!   zero (the zero polynomial is the empty vector);
//! - rational functions are reduced to lowest terms with a monic denominator,
//!   and zero is `0/1`.
//!
//! Polynomial degrees are capped at [`POLY_DEGREE_CAP`]; arithmetic that would
//! exceed the cap panics with an explicit message rather than truncating.

use rand::{Rng, RngCore};
use thiserror::Error;

/// Hard cap on dense polynomial degrees. Exceeding it is a loud error.
pub const POLY_DEGREE_CAP: usize = 4096;

/// Largest admissible prime modulus.
pub const MAX_PRIME: u64 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("modulus {0} is not a prime in [2, 2^31]")]
    NotPrime(u64),
    #[error("zero denominator in rational function")]
    ZeroDenominator,
    #[error("endomorphism t -> c*t^k requires c != 0 and k >= 1, got c={c}, k={k}")]
    BadEndo { c: u64, k: u64 },
    #[error("sigma-derivation of F_p must be zero")]
    NonzeroPrimeDerivation,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field `F_p`, `p <= 2^31`. Elements are residues in `[0, p)`;
/// all element and polynomial arithmetic goes through this handle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        // Extended Euclid on (a, p).
        let (mut r0, mut r1) = (a as i64 % self.p as i64, self.p as i64);
        let (mut s0, mut s1) = (1i64, 0i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce(s0))
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        rng.gen_range(0..self.p)
    }
}

// ---- Dense polynomials over F_p ----

/// Dense polynomial with ascending coefficients; no leading zero is stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly(Vec<u64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree of the zero polynomial is `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.0.last().copied().unwrap_or(0)
    }

    fn trim(mut v: Vec<u64>) -> Poly {
        while v.last() == Some(&0) {
            v.pop();
        }
        Poly(v)
    }

    /// True if the polynomial has at most one nonzero coefficient.
    pub fn is_monomial(&self) -> bool {
        self.0.iter().filter(|&&c| c != 0).count() <= 1
    }

    /// Exponent of the lowest nonzero coefficient; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|&c| c != 0)
    }
}

fn cap_check(deg: usize) {
    assert!(
        deg <= POLY_DEGREE_CAP,
        "polynomial degree cap {POLY_DEGREE_CAP} exceeded (needed degree {deg})"
    );
}

impl PrimeField {
    pub fn poly(&self, coeffs: &[u64]) -> Poly {
        Poly::trim(coeffs.iter().map(|&c| c % self.p).collect())
    }

    pub fn poly_constant(&self, c: u64) -> Poly {
        self.poly(&[c])
    }

    pub fn poly_one(&self) -> Poly {
        self.poly_constant(1)
    }

    pub fn poly_t(&self) -> Poly {
        self.poly(&[0, 1])
    }

    /// The monomial `c * t^k`.
    pub fn poly_monomial(&self, c: u64, k: usize) -> Poly {
        if c % self.p == 0 {
            return Poly::zero();
        }
        cap_check(k);
        let mut v = vec![0; k + 1];
        v[k] = c % self.p;
        Poly(v)
    }

    pub fn poly_add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.0.len().max(b.0.len());
        let mut v = vec![0; n];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = self.add(a.coeff(i), b.coeff(i));
        }
        Poly::trim(v)
    }

    pub fn poly_neg(&self, a: &Poly) -> Poly {
        Poly(a.0.iter().map(|&c| self.neg(c)).collect())
    }

    pub fn poly_sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.poly_add(a, &self.poly_neg(b))
    }

    pub fn poly_scale(&self, c: u64, a: &Poly) -> Poly {
        if c % self.p == 0 {
            return Poly::zero();
        }
        Poly(a.0.iter().map(|&x| self.mul(c, x)).collect())
    }

    pub fn poly_mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let (da, db) = (a.0.len() - 1, b.0.len() - 1);
        cap_check(da + db);
        // Monomial fast path keeps shift-heavy workloads linear.
        if a.is_monomial() {
            let k = a.valuation().unwrap();
            let mut v = vec![0; k];
            v.extend(self.poly_scale(a.0[k], b).0);
            return Poly::trim(v);
        }
        if b.is_monomial() {
            return self.poly_mul(b, a);
        }
        let mut v = vec![0; da + db + 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                v[i + j] = (v[i + j] + x * y) % self.p;
            }
        }
        Poly::trim(v)
    }

    /// Euclidean division: returns `(q, r)` with `a = q*b + r`, `deg r < deg b`.
    pub fn poly_divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        assert!(!b.is_zero(), "polynomial division by zero");
        let db = b.0.len() - 1;
        let lcinv = self.inv(b.leading()).expect("nonzero leading coefficient");
        let mut r = a.0.clone();
        let mut q = vec![0; a.0.len().saturating_sub(db)];
        while r.len() > db && !r.is_empty() {
            let lead = *r.last().unwrap();
            if lead == 0 {
                r.pop();
                continue;
            }
            let shift = r.len() - 1 - db;
            let f = self.mul(lead, lcinv);
            q[shift] = f;
            for (j, &bc) in b.0.iter().enumerate() {
                let idx = shift + j;
                r[idx] = self.sub(r[idx], self.mul(f, bc));
            }
            r.pop();
        }
        (Poly::trim(q), Poly::trim(r))
    }

    /// Exact division; panics if `b` does not divide `a`.
    pub fn poly_exact_div(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.poly_divrem(a, b);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn poly_monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        self.poly_scale(self.inv(a.leading()).unwrap(), a)
    }

    /// Monic greatest common divisor, with fast paths for monomial operands.
    pub fn poly_gcd(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return self.poly_monic(b);
        }
        if b.is_zero() {
            return self.poly_monic(a);
        }
        if a.is_monomial() {
            let k = a.valuation().unwrap().min(b.valuation().unwrap());
            return self.poly_monomial(1, k);
        }
        if b.is_monomial() {
            return self.poly_gcd(b, a);
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let (_, r) = self.poly_divrem(&x, &y);
            x = y;
            y = r;
        }
        self.poly_monic(&x)
    }

    /// Substitution `t -> c * t^k`, the action of a field endomorphism on
    /// polynomials. Linear time because the image of `t` is a monomial.
    pub fn poly_subst_monomial(&self, a: &Poly, c: u64, k: u64) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let deg = a.0.len() - 1;
        let target = deg
            .checked_mul(k as usize)
            .unwrap_or(usize::MAX);
        cap_check(target);
        let mut v = vec![0; target + 1];
        let mut cpow = 1u64;
        for (i, &x) in a.0.iter().enumerate() {
            if x != 0 {
                v[i * k as usize] = self.mul(x, cpow);
            }
            cpow = self.mul(cpow, c);
        }
        Poly::trim(v)
    }

    pub fn poly_formal_derivative(&self, a: &Poly) -> Poly {
        if a.0.len() <= 1 {
            return Poly::zero();
        }
        let mut v = vec![0; a.0.len() - 1];
        for (i, slot) in v.iter_mut().enumerate() {
            *slot = self.mul((i as u64 + 1) % self.p, a.0[i + 1]);
        }
        Poly::trim(v)
    }

    pub fn poly_sample(&self, rng: &mut dyn RngCore, max_deg: usize) -> Poly {
        let deg = rng.gen_range(0..=max_deg);
        let v: Vec<u64> = (0..=deg).map(|_| self.sample(rng)).collect();
        Poly::trim(v)
    }

    /// Renders with descending powers; a coefficient `p-1` prints as a
    /// subtracted term so that, for example, `t^2 + 4t` over `F_5` reads
    /// `t^2-t`.
    pub fn poly_render(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for i in (0..a.0.len()).rev() {
            let c = a.0[i];
            if c == 0 {
                continue;
            }
            let (neg, mag) = if self.p > 2 && c == self.p - 1 {
                (true, 1)
            } else {
                (false, c)
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let body = match (i, mag) {
                (0, m) => m.to_string(),
                (1, 1) => "t".to_string(),
                (1, m) => format!("{m}*t"),
                (e, 1) => format!("t^{e}"),
                (e, m) => format!("{m}*t^{e}"),
            };
            out.push_str(&body);
        }
        out
    }
}

// ---- Rational functions over F_p ----

/// Reduced fraction of dense polynomials; the denominator is monic and
/// coprime to the numerator, and zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }
}

impl PrimeField {
    /// Reduces `num/den` to canonical form.
    pub fn rf_new(&self, num: Poly, den: Poly) -> Result<RatFun, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RatFun {
                num: Poly::zero(),
                den: self.poly_one(),
            });
        }
        let g = self.poly_gcd(&num, &den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (self.poly_exact_div(&num, &g), self.poly_exact_div(&den, &g))
        };
        let scale = self.inv(den.leading()).unwrap();
        if scale != 1 {
            num = self.poly_scale(scale, &num);
            den = self.poly_scale(scale, &den);
        }
        Ok(RatFun { num, den })
    }

    /// Canonical form without running a gcd; callers must guarantee the pair
    /// is already coprime (for instance images of reduced fractions under a
    /// field endomorphism, which stay coprime by substituting into a Bezout
    /// identity).
    fn rf_from_coprime(&self, num: Poly, den: Poly) -> RatFun {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return self.rf_zero();
        }
        let scale = self.inv(den.leading()).unwrap();
        if scale == 1 {
            RatFun { num, den }
        } else {
            RatFun {
                num: self.poly_scale(scale, &num),
                den: self.poly_scale(scale, &den),
            }
        }
    }

    pub fn rf_zero(&self) -> RatFun {
        RatFun {
            num: Poly::zero(),
            den: self.poly_one(),
        }
    }

    pub fn rf_one(&self) -> RatFun {
        RatFun {
            num: self.poly_one(),
            den: self.poly_one(),
        }
    }

    pub fn rf_constant(&self, c: u64) -> RatFun {
        RatFun {
            num: self.poly_constant(c),
            den: self.poly_one(),
        }
    }

    pub fn rf_from_poly(&self, p: Poly) -> RatFun {
        RatFun {
            num: p,
            den: self.poly_one(),
        }
    }

    pub fn rf_t(&self) -> RatFun {
        self.rf_from_poly(self.poly_t())
    }

    /// Addition through the gcd of the denominators, which keeps monomial
    /// denominators from accumulating multiplicatively.
    pub fn rf_add(&self, a: &RatFun, b: &RatFun) -> RatFun {
        if a.is_zero() {
            return b.clone();
        }
        if b.is_zero() {
            return a.clone();
        }
        let g = self.poly_gcd(&a.den, &b.den);
        let (da, db) = if g.degree() == Some(0) {
            (a.den.clone(), b.den.clone())
        } else {
            (
                self.poly_exact_div(&a.den, &g),
                self.poly_exact_div(&b.den, &g),
            )
        };
        let num = self.poly_add(
            &self.poly_mul(&a.num, &db),
            &self.poly_mul(&b.num, &da),
        );
        let den = self.poly_mul(&a.den, &db);
        self.rf_new(num, den).expect("nonzero denominator")
    }

    pub fn rf_neg(&self, a: &RatFun) -> RatFun {
        RatFun {
            num: self.poly_neg(&a.num),
            den: a.den.clone(),
        }
    }

    pub fn rf_sub(&self, a: &RatFun, b: &RatFun) -> RatFun {
        self.rf_add(a, &self.rf_neg(b))
    }

    /// Multiplication with cross-reduction, so intermediate products never
    /// carry a removable common factor.
    pub fn rf_mul(&self, a: &RatFun, b: &RatFun) -> RatFun {
        if a.is_zero() || b.is_zero() {
            return self.rf_zero();
        }
        let g1 = self.poly_gcd(&a.num, &b.den);
        let g2 = self.poly_gcd(&b.num, &a.den);
        let an = if g1.degree() == Some(0) {
            a.num.clone()
        } else {
            self.poly_exact_div(&a.num, &g1)
        };
        let bd = if g1.degree() == Some(0) {
            b.den.clone()
        } else {
            self.poly_exact_div(&b.den, &g1)
        };
        let bn = if g2.degree() == Some(0) {
            b.num.clone()
        } else {
            self.poly_exact_div(&b.num, &g2)
        };
        let ad = if g2.degree() == Some(0) {
            a.den.clone()
        } else {
            self.poly_exact_div(&a.den, &g2)
        };
        let num = self.poly_mul(&an, &bn);
        let den = self.poly_mul(&ad, &bd);
        self.rf_from_coprime(num, den)
    }

    pub fn rf_inv(&self, a: &RatFun) -> Option<RatFun> {
        if a.is_zero() {
            return None;
        }
        Some(self.rf_from_coprime(a.den.clone(), a.num.clone()))
    }

    pub fn rf_sample(&self, rng: &mut dyn RngCore, num_deg: usize, den_deg: usize) -> RatFun {
        let num = self.poly_sample(rng, num_deg);
        let den = loop {
            let d = self.poly_sample(rng, den_deg);
            if !d.is_zero() {
                break d;
            }
        };
        self.rf_new(num, den).unwrap()
    }

    /// Random rational function whose denominator is `1`, `t` or `t^2`.
    /// Monomial denominators stay monomials under `t -> c*t^k`, so iterated
    /// sigma images remain far below the degree cap.
    pub fn rf_sample_monomial_den(&self, rng: &mut dyn RngCore, num_deg: usize) -> RatFun {
        let num = self.poly_sample(rng, num_deg);
        let den = match rng.gen_range(0..10u32) {
            0..=5 => self.poly_one(),
            6..=8 => self.poly_t(),
            _ => self.poly_monomial(1, 2),
        };
        self.rf_new(num, den).unwrap()
    }

    pub fn rf_render(&self, a: &RatFun) -> String {
        let num = self.poly_render(&a.num);
        if a.den.degree() == Some(0) {
            return num;
        }
        let den = self.poly_render(&a.den);
        let num = if a.num.0.iter().filter(|&&c| c != 0).count() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = if a.den.0.iter().filter(|&&c| c != 0).count() > 1 {
            format!("({den})")
        } else {
            den
        };
        format!("{num}/{den}")
    }
}

// ---- Field endomorphisms t -> c * t^k ----

/// Endomorphism of `F_p(t)` fixing `F_p` and sending `t` to `c*t^k`.
/// Always injective; surjective exactly when `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldEndo {
    c: u64,
    k: u64,
}

impl FieldEndo {
    pub fn new(field: &PrimeField, c: u64, k: u64) -> Result<Self, ScalarError> {
        let c = c % field.modulus();
        if c == 0 || k == 0 {
            return Err(ScalarError::BadEndo { c, k });
        }
        Ok(FieldEndo { c, k })
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn is_identity(&self) -> bool {
        self.c == 1 && self.k == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.k == 1
    }

    /// `self` after `other`: `t -> self(other(t))`.
    pub fn compose(&self, field: &PrimeField, other: &FieldEndo) -> FieldEndo {
        FieldEndo {
            c: field.mul(other.c, field.pow(self.c, other.k)),
            k: self.k.checked_mul(other.k).expect("endomorphism power overflow"),
        }
    }

    pub fn apply_poly(&self, field: &PrimeField, a: &Poly) -> Poly {
        field.poly_subst_monomial(a, self.c, self.k)
    }

    pub fn apply(&self, field: &PrimeField, f: &RatFun) -> RatFun {
        // Coprimality survives substitution (substitute into a Bezout
        // identity), so no gcd is needed here.
        let num = self.apply_poly(field, &f.num);
        let den = self.apply_poly(field, &f.den);
        field.rf_from_coprime(num, den)
    }

    /// Decides membership in the image and returns the unique preimage.
    ///
    /// In lowest terms with monic denominator, `f` lies in the image of
    /// `t -> c*t^k` exactly when every exponent appearing in the numerator
    /// and denominator is divisible by `k`; the preimage divides exponents by
    /// `k` and rescales by inverse powers of `c`.
    pub fn preimage(&self, field: &PrimeField, f: &RatFun) -> Option<RatFun> {
        if f.is_zero() {
            return Some(field.rf_zero());
        }
        let pull = |a: &Poly| -> Option<Poly> {
            let k = self.k as usize;
            let deg = a.0.len() - 1;
            if deg % k != 0 {
                return None;
            }
            let cinv = field.inv(self.c).unwrap();
            let mut v = vec![0u64; deg / k + 1];
            let mut cpow = 1u64;
            for (i, slot) in v.iter_mut().enumerate() {
                *slot = field.mul(a.coeff(i * k), cpow);
                cpow = field.mul(cpow, cinv);
            }
            // Any coefficient at an exponent not divisible by k blocks the
            // preimage; check by weight count.
            let nonzero_in = a.0.iter().filter(|&&c| c != 0).count();
            let nonzero_out = v.iter().filter(|&&c| c != 0).count();
            if nonzero_in != nonzero_out {
                return None;
            }
            Some(Poly::trim(v))
        };
        let num = pull(&f.num)?;
        let den = pull(&f.den)?;
        let g = field.rf_from_coprime(num, den);
        debug_assert_eq!(self.apply(field, &g), *f);
        Some(g)
    }
}

// ---- Unified scalar layer ----

/// Element of one of the supported scalar fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Prime(u64),
    Rational(RatFun),
}

/// Handle for a supported scalar field: `F_p` or `F_p(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    Prime(PrimeField),
    Rational(PrimeField),
}

/// Endomorphism of a scalar field. `F_p` admits only the identity; on
/// `F_p(t)` any `t -> c*t^k` is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarEndo {
    Identity,
    Map(FieldEndo),
}

impl ScalarEndo {
    pub fn is_identity(&self) -> bool {
        match self {
            ScalarEndo::Identity => true,
            ScalarEndo::Map(e) => e.is_identity(),
        }
    }

    pub fn is_surjective(&self) -> bool {
        match self {
            ScalarEndo::Identity => true,
            ScalarEndo::Map(e) => e.is_surjective(),
        }
    }

    pub fn compose(&self, field: &PrimeField, other: &ScalarEndo) -> ScalarEndo {
        match (self, other) {
            (ScalarEndo::Identity, e) | (e, ScalarEndo::Identity) => *e,
            (ScalarEndo::Map(a), ScalarEndo::Map(b)) => ScalarEndo::Map(a.compose(field, b)),
        }
    }
}

/// Sigma-derivation of a scalar field, determined by `delta(t)`.
/// Satisfies `delta(rs) = delta(r)s + sigma(r)delta(s)` and vanishes on `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarDeriv {
    pub sigma: ScalarEndo,
    pub dt: RatFun,
}

impl ScalarDeriv {
    pub fn zero(field: &ScalarField) -> Self {
        ScalarDeriv {
            sigma: ScalarEndo::Identity,
            dt: field.prime().rf_zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dt.is_zero()
    }
}

impl ScalarField {
    pub fn prime(&self) -> &PrimeField {
        match self {
            ScalarField::Prime(f) | ScalarField::Rational(f) => f,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ScalarField::Rational(_))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            ScalarField::Prime(_) => Scalar::Prime(0),
            ScalarField::Rational(f) => Scalar::Rational(f.rf_zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            ScalarField::Prime(_) => Scalar::Prime(1),
            ScalarField::Rational(f) => Scalar::Rational(f.rf_one()),
        }
    }

    pub fn constant(&self, c: u64) -> Scalar {
        match self {
            ScalarField::Prime(f) => Scalar::Prime(c % f.modulus()),
            ScalarField::Rational(f) => Scalar::Rational(f.rf_constant(c)),
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Prime(x) => *x == 0,
            Scalar::Rational(x) => x.is_zero(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarField::Prime(f), Scalar::Prime(x), Scalar::Prime(y)) => {
                Scalar::Prime(f.add(*x, *y))
            }
            (ScalarField::Rational(f), Scalar::Rational(x), Scalar::Rational(y)) => {
                Scalar::Rational(f.rf_add(x, y))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (ScalarField::Prime(f), Scalar::Prime(x)) => Scalar::Prime(f.neg(*x)),
            (ScalarField::Rational(f), Scalar::Rational(x)) => Scalar::Rational(f.rf_neg(x)),
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (ScalarField::Prime(f), Scalar::Prime(x), Scalar::Prime(y)) => {
                Scalar::Prime(f.mul(*x, *y))
            }
            (ScalarField::Rational(f), Scalar::Rational(x), Scalar::Rational(y)) => {
                Scalar::Rational(f.rf_mul(x, y))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (ScalarField::Prime(f), Scalar::Prime(x)) => f.inv(*x).map(Scalar::Prime),
            (ScalarField::Rational(f), Scalar::Rational(x)) => {
                f.rf_inv(x).map(Scalar::Rational)
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn endo_apply(&self, endo: &ScalarEndo, a: &Scalar) -> Scalar {
        match (endo, a) {
            (ScalarEndo::Identity, _) => a.clone(),
            (ScalarEndo::Map(e), Scalar::Rational(x)) => {
                Scalar::Rational(e.apply(self.prime(), x))
            }
            (ScalarEndo::Map(_), Scalar::Prime(_)) => a.clone(),
        }
    }

    pub fn endo_preimage(&self, endo: &ScalarEndo, a: &Scalar) -> Option<Scalar> {
        match (endo, a) {
            (ScalarEndo::Identity, _) => Some(a.clone()),
            (ScalarEndo::Map(e), Scalar::Rational(x)) => {
                e.preimage(self.prime(), x).map(Scalar::Rational)
            }
            (ScalarEndo::Map(_), Scalar::Prime(_)) => Some(a.clone()),
        }
    }

    /// Applies the sigma-derivation. Polynomials use the exact closed form
    /// `delta(P) = delta(t) * (P(sigma(t)) - P(t)) / (sigma(t) - t)`
    /// (formal derivative when sigma fixes `t`); fractions use
    /// `delta(P/Q) = delta(P)/Q - sigma(P) delta(Q) / (sigma(Q) Q)`,
    /// which is forced by `delta(Q^-1) = -sigma(Q^-1) delta(Q) Q^-1`.
    pub fn deriv_apply(&self, d: &ScalarDeriv, a: &Scalar) -> Scalar {
        match (self, a) {
            (ScalarField::Prime(_), Scalar::Prime(_)) => Scalar::Prime(0),
            (ScalarField::Rational(f), Scalar::Rational(x)) => {
                Scalar::Rational(self.deriv_rf(f, d, x))
            }
            _ => panic!("scalar kind mismatch"),
        }
    }

    fn deriv_poly(&self, f: &PrimeField, d: &ScalarDeriv, a: &Poly) -> RatFun {
        if a.0.len() <= 1 || d.dt.is_zero() {
            return f.rf_zero();
        }
        let quotient = match &d.sigma {
            ScalarEndo::Identity => f.poly_formal_derivative(a),
            ScalarEndo::Map(e) if e.is_identity() => f.poly_formal_derivative(a),
            ScalarEndo::Map(e) => {
                let image = e.apply_poly(f, a);
                let diff = f.poly_sub(&image, a);
                let divisor = f.poly_sub(&f.poly_monomial(e.c(), e.k() as usize), &f.poly_t());
                f.poly_exact_div(&diff, &divisor)
            }
        };
        f.rf_mul(&d.dt, &f.rf_from_poly(quotient))
    }

    fn deriv_rf(&self, f: &PrimeField, d: &ScalarDeriv, x: &RatFun) -> RatFun {
        let dnum = self.deriv_poly(f, d, x.num());
        let first = f.rf_mul(
            &dnum,
            &f.rf_inv(&f.rf_from_poly(x.den().clone())).unwrap(),
        );
        if x.is_polynomial() {
            return first;
        }
        let dden = self.deriv_poly(f, d, x.den());
        let sig_num = match &d.sigma {
            ScalarEndo::Identity => x.num().clone(),
            ScalarEndo::Map(e) => e.apply_poly(f, x.num()),
        };
        let sig_den = match &d.sigma {
            ScalarEndo::Identity => x.den().clone(),
            ScalarEndo::Map(e) => e.apply_poly(f, x.den()),
        };
        let denom = f.rf_mul(
            &f.rf_from_poly(sig_den),
            &f.rf_from_poly(x.den().clone()),
        );
        let second = f.rf_mul(
            &f.rf_mul(&f.rf_from_poly(sig_num), &dden),
            &f.rf_inv(&denom).unwrap(),
        );
        f.rf_sub(&first, &second)
    }

    pub fn render(&self, a: &Scalar) -> String {
        match (self, a) {
            (ScalarField::Prime(_), Scalar::Prime(x)) => x.to_string(),
            (ScalarField::Rational(f), Scalar::Rational(x)) => f.rf_render(x),
            _ => panic!("scalar kind mismatch"),
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Scalar {
        match self {
            ScalarField::Prime(f) => Scalar::Prime(f.sample(rng)),
            ScalarField::Rational(f) => Scalar::Rational(f.rf_sample(rng, 2, 2)),
        }
    }

    /// Sampling profile safe for iterated sigma images; see
    /// [`PrimeField::rf_sample_monomial_den`].
    pub fn sample_tame(&self, rng: &mut dyn RngCore) -> Scalar {
        match self {
            ScalarField::Prime(f) => Scalar::Prime(f.sample(rng)),
            ScalarField::Rational(f) => Scalar::Rational(f.rf_sample_monomial_den(rng, 1)),
        }
    }
}

/// Checks that `(sigma, delta, q)` is a quantized pair: `q` is a nonzero
/// constant fixed by `sigma` and killed by `delta`, and
/// `delta(sigma(f)) = q * sigma(delta(f))` holds on `t` and on random samples.
pub fn verify_quantization(
    field: &ScalarField,
    sigma: &ScalarEndo,
    delta: &ScalarDeriv,
    q: &Scalar,
    samples: usize,
    rng: &mut dyn RngCore,
) -> crate::VerifyReport {
    let mut report = crate::VerifyReport::new();
    report.record(
        "q-nonzero",
        !field.is_zero(q),
        format!("q = {}", field.render(q)),
    );
    let sq = field.endo_apply(sigma, q);
    report.record("sigma-fixes-q", sq == *q, format!("sigma(q) = {}", field.render(&sq)));
    let dq = field.deriv_apply(delta, q);
    report.record(
        "delta-kills-q",
        field.is_zero(&dq),
        format!("delta(q) = {}", field.render(&dq)),
    );
    let commutes = |f: &Scalar| {
        let lhs = field.deriv_apply(delta, &field.endo_apply(sigma, f));
        let rhs = field.mul(q, &field.endo_apply(sigma, &field.deriv_apply(delta, f)));
        (lhs == rhs, lhs, rhs)
    };
    if field.is_rational() {
        let t = Scalar::Rational(field.prime().rf_t());
        let (ok, lhs, rhs) = commutes(&t);
        report.record(
            "commutation-on-t",
            ok,
            format!(
                "delta(sigma(t)) = {}, q*sigma(delta(t)) = {}",
                field.render(&lhs),
                field.render(&rhs)
            ),
        );
    }
    let mut ok = true;
    let mut detail = format!("delta(sigma(f)) = q*sigma(delta(f)) on {samples} samples");
    for _ in 0..samples {
        let f = field.sample(rng);
        let (sample_ok, lhs, rhs) = commutes(&f);
        if !sample_ok {
            ok = false;
            detail = format!(
                "f = {}: delta(sigma(f)) = {}, q*sigma(delta(f)) = {}",
                field.render(&f),
                field.render(&lhs),
                field.render(&rhs)
            );
            break;
        }
    }
    report.record("commutation-sampled", ok, detail);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    fn rat5() -> ScalarField {
        ScalarField::Rational(f5())
    }

    /// Leibniz one-step recursion for delta on polynomials; independent of
    /// the closed-form implementation.
    fn deriv_poly_recursive(field: &PrimeField, sigma: &FieldEndo, dt: &RatFun, a: &Poly) -> RatFun {
        let mut acc = field.rf_zero();
        let mut dpow = field.rf_zero(); // delta(t^0)
        let mut spow = field.poly_one(); // sigma(t^0)
        for i in 0..a.coeffs().len() {
            let c = a.coeff(i);
            if c != 0 {
                acc = field.rf_add(&acc, &field.rf_mul(&field.rf_constant(c), &dpow));
            }
            // delta(t^{i+1}) = delta(t^i) * t + sigma(t^i) * delta(t)
            dpow = field.rf_add(
                &field.rf_mul(&dpow, &field.rf_t()),
                &field.rf_mul(&field.rf_from_poly(spow.clone()), dt),
            );
            spow = field.poly_mul(&spow, &sigma.apply_poly(field, &field.poly_t()));
        }
        acc
    }

    #[test]
    fn primality_validation() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(5).is_ok());
        assert!(PrimeField::new(2147483647).is_ok());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(4294967295).is_err());
    }

    #[test]
    fn normalize_cancels_common_factor_and_rescales() {
        let f = f5();
        // (2t^2 + 2t) / (2t) reduces to (t+1)/1.
        let num = f.poly(&[0, 2, 2]);
        let den = f.poly(&[0, 2]);
        let r = f.rf_new(num, den).unwrap();
        assert_eq!(r.num(), &f.poly(&[1, 1]));
        assert_eq!(r.den(), &f.poly_one());
    }

    #[test]
    fn normalize_cancels_polynomial_factor() {
        let f = f5();
        // (t^2 - 1) / (t - 1) = t + 1.
        let num = f.poly(&[4, 0, 1]);
        let den = f.poly(&[4, 1]);
        let r = f.rf_new(num, den).unwrap();
        assert_eq!(r.num(), &f.poly(&[1, 1]));
        assert_eq!(r.den(), &f.poly_one());
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let f = f5();
        assert_eq!(
            f.rf_new(f.poly_one(), Poly::zero()),
            Err(ScalarError::ZeroDenominator)
        );
    }

    #[test]
    fn zero_normalizes_to_zero_over_one() {
        let f = f5();
        let r = f.rf_new(Poly::zero(), f.poly(&[0, 3])).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.den(), &f.poly_one());
    }

    #[test]
    fn endo_apply_squares_t() {
        let f = f5();
        let e = FieldEndo::new(&f, 1, 2).unwrap();
        // (t+1)/t^2 -> (t^2+1)/t^4.
        let x = f.rf_new(f.poly(&[1, 1]), f.poly_monomial(1, 2)).unwrap();
        let y = e.apply(&f, &x);
        assert_eq!(y.num(), &f.poly(&[1, 0, 1]));
        assert_eq!(y.den(), &f.poly_monomial(1, 4));
        assert_eq!(f.rf_render(&y), "(t^2+1)/t^4");
    }

    #[test]
    fn endo_fixes_constants_and_units() {
        let f = f5();
        let e = FieldEndo::new(&f, 1, 2).unwrap();
        assert_eq!(e.apply(&f, &f.rf_zero()), f.rf_zero());
        assert_eq!(e.apply(&f, &f.rf_one()), f.rf_one());
        assert_eq!(e.apply(&f, &f.rf_constant(3)), f.rf_constant(3));
    }

    #[test]
    fn preimage_divides_exponents() {
        let f = f5();
        let e = FieldEndo::new(&f, 1, 2).unwrap();
        let y = f.rf_new(f.poly(&[1, 0, 1]), f.poly_monomial(1, 4)).unwrap();
        let x = e.preimage(&f, &y).unwrap();
        assert_eq!(x.num(), &f.poly(&[1, 1]));
        assert_eq!(x.den(), &f.poly_monomial(1, 2));
        // t itself has no preimage under t -> t^2.
        assert_eq!(e.preimage(&f, &f.rf_t()), None);
        // Constants pull back to themselves.
        assert_eq!(e.preimage(&f, &f.rf_constant(4)), Some(f.rf_constant(4)));
    }

    #[test]
    fn preimage_rejects_large_odd_exponent_without_expansion() {
        let f = f5();
        let e = FieldEndo::new(&f, 1, 2).unwrap();
        let big = f.rf_from_poly(f.poly_monomial(2, 4095));
        assert_eq!(e.preimage(&f, &big), None);
    }

    #[test]
    fn preimage_with_nontrivial_scale_round_trips() {
        let f = f5();
        let e = FieldEndo::new(&f, 3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = f.rf_sample(&mut rng, 2, 2);
            let img = e.apply(&f, &g);
            let back = e.preimage(&f, &img).expect("image element has a preimage");
            assert_eq!(back, g);
        }
    }

    #[test]
    fn bijective_endo_round_trips_both_ways() {
        let f = f5();
        let e = FieldEndo::new(&f, 2, 1).unwrap();
        assert!(e.is_surjective());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let g = f.rf_sample(&mut rng, 2, 2);
            let img = e.apply(&f, &g);
            assert_eq!(e.preimage(&f, &img).unwrap(), g);
            let pre = e.preimage(&f, &g).expect("k = 1 is surjective");
            assert_eq!(e.apply(&f, &pre), g);
        }
    }

    #[test]
    fn deriv_matches_hand_values() {
        let field = rat5();
        let f = f5();
        let sigma = ScalarEndo::Map(FieldEndo::new(&f, 1, 2).unwrap());
        let dt = f.rf_new(f.poly(&[0, 4, 1]), f.poly_one()).unwrap(); // t^2 - t
        let d = ScalarDeriv { sigma, dt };
        // delta(t^2) = delta(t) t + sigma(t) delta(t) = t^4 - t^2.
        let t2 = Scalar::Rational(f.rf_from_poly(f.poly_monomial(1, 2)));
        let want = Scalar::Rational(f.rf_from_poly(f.poly(&[0, 0, 4, 0, 1])));
        assert_eq!(field.deriv_apply(&d, &t2), want);
        // delta(1/t) = (1 - t)/t^2.
        let inv_t = Scalar::Rational(f.rf_new(f.poly_one(), f.poly_t()).unwrap());
        let want = Scalar::Rational(f.rf_new(f.poly(&[1, 4]), f.poly_monomial(1, 2)).unwrap());
        assert_eq!(field.deriv_apply(&d, &inv_t), want);
        // Constants die.
        let c = Scalar::Rational(f.rf_constant(3));
        assert!(field.is_zero(&field.deriv_apply(&d, &c)));
    }

    #[test]
    fn deriv_closed_form_agrees_with_leibniz_recursion() {
        let f = f5();
        let sigma = FieldEndo::new(&f, 1, 2).unwrap();
        let dt = f.rf_new(f.poly(&[0, 4, 1]), f.poly_one()).unwrap();
        let field = rat5();
        let d = ScalarDeriv {
            sigma: ScalarEndo::Map(sigma),
            dt: dt.clone(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let p = f.poly_sample(&mut rng, 6);
            let via_closed = match field.deriv_apply(&d, &Scalar::Rational(f.rf_from_poly(p.clone()))) {
                Scalar::Rational(r) => r,
                _ => unreachable!(),
            };
            let via_recursion = deriv_poly_recursive(&f, &sigma, &dt, &p);
            assert_eq!(via_closed, via_recursion);
        }
        // Same cross-check with a rational delta(t) and a scaling sigma.
        let sigma2 = FieldEndo::new(&f, 2, 1).unwrap();
        let dt2 = f.rf_new(f.poly(&[1]), f.poly_t()).unwrap();
        let d2 = ScalarDeriv {
            sigma: ScalarEndo::Map(sigma2),
            dt: dt2.clone(),
        };
        for _ in 0..40 {
            let p = f.poly_sample(&mut rng, 6);
            let via_closed = match field.deriv_apply(&d2, &Scalar::Rational(f.rf_from_poly(p.clone()))) {
                Scalar::Rational(r) => r,
                _ => unreachable!(),
            };
            let via_recursion = deriv_poly_recursive(&f, &sigma2, &dt2, &p);
            assert_eq!(via_closed, via_recursion);
        }
    }

    #[test]
    fn deriv_satisfies_leibniz_on_fractions() {
        let f = f5();
        let field = rat5();
        let d = ScalarDeriv {
            sigma: ScalarEndo::Map(FieldEndo::new(&f, 1, 2).unwrap()),
            dt: f.rf_new(f.poly(&[0, 4, 1]), f.poly_one()).unwrap(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..60 {
            let a = Scalar::Rational(f.rf_sample(&mut rng, 2, 2));
            let b = Scalar::Rational(f.rf_sample(&mut rng, 2, 2));
            let lhs = field.deriv_apply(&d, &field.mul(&a, &b));
            let rhs = field.add(
                &field.mul(&field.deriv_apply(&d, &a), &b),
                &field.mul(&field.endo_apply(&d.sigma, &a), &field.deriv_apply(&d, &b)),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn quantization_accepts_the_squaring_pair() {
        let field = rat5();
        let f = f5();
        let sigma = ScalarEndo::Map(FieldEndo::new(&f, 1, 2).unwrap());
        let delta = ScalarDeriv {
            sigma,
            dt: f.rf_new(f.poly(&[0, 4, 1]), f.poly_one()).unwrap(),
        };
        let q = Scalar::Rational(f.rf_one());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let report = verify_quantization(&field, &sigma, &delta, &q, 25, &mut rng);
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn quantization_accepts_the_quantum_plane_pair() {
        let field = rat5();
        let f = f5();
        let sigma = ScalarEndo::Map(FieldEndo::new(&f, 2, 1).unwrap());
        let delta = ScalarDeriv {
            sigma,
            dt: f.rf_one(),
        };
        let q = Scalar::Rational(f.rf_constant(2));
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let report = verify_quantization(&field, &sigma, &delta, &q, 25, &mut rng);
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn quantization_rejects_squaring_sigma_with_constant_derivation() {
        // delta(t) = 1 with sigma: t -> t^2 fails: delta(sigma(t)) = t + t^2
        // while sigma(delta(t)) = 1.
        let field = rat5();
        let f = f5();
        let sigma = ScalarEndo::Map(FieldEndo::new(&f, 1, 2).unwrap());
        let delta = ScalarDeriv {
            sigma,
            dt: f.rf_one(),
        };
        let q = Scalar::Rational(f.rf_one());
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let report = verify_quantization(&field, &sigma, &delta, &q, 5, &mut rng);
        assert!(!report.passed());
        let failure = report.first_failure().unwrap();
        assert_eq!(failure.name, "commutation-on-t");
    }

    #[test]
    fn rendering_matches_exact_strings() {
        let f = f5();
        assert_eq!(f.poly_render(&f.poly(&[0, 4, 1])), "t^2-t");
        assert_eq!(f.poly_render(&f.poly(&[1, 0, 1])), "t^2+1");
        assert_eq!(f.poly_render(&Poly::zero()), "0");
        assert_eq!(f.poly_render(&f.poly(&[3])), "3");
        assert_eq!(f.poly_render(&f.poly(&[0, 2])), "2*t");
        let r = f.rf_new(f.poly(&[1, 0, 1]), f.poly_monomial(1, 4)).unwrap();
        assert_eq!(f.rf_render(&r), "(t^2+1)/t^4");
        let r = f.rf_new(f.poly(&[1, 1]), f.poly_monomial(1, 2)).unwrap();
        assert_eq!(f.rf_render(&r), "(t+1)/t^2");
    }

    #[test]
    fn endo_composition_matches_pointwise_application() {
        let f = f5();
        let a = FieldEndo::new(&f, 2, 2).unwrap();
        let b = FieldEndo::new(&f, 3, 1).unwrap();
        let ab = a.compose(&f, &b);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..30 {
            let x = f.rf_sample(&mut rng, 2, 1);
            assert_eq!(ab.apply(&f, &x), a.apply(&f, &b.apply(&f, &x)));
        }
    }

    #[test]
    fn poly_divrem_and_gcd_are_exact() {
        let f = f5();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let a = f.poly_sample(&mut rng, 6);
            let b = loop {
                let b = f.poly_sample(&mut rng, 3);
                if !b.is_zero() {
                    break b;
                }
            };
            let (q, r) = f.poly_divrem(&a, &b);
            assert_eq!(f.poly_add(&f.poly_mul(&q, &b), &r), a);
            if let Some(dr) = r.degree() {
                assert!(dr < b.degree().unwrap());
            }
            let g = f.poly_gcd(&a, &b);
            if !a.is_zero() {
                let (_, ra) = f.poly_divrem(&a, &g);
                let (_, rb) = f.poly_divrem(&b, &g);
                assert!(ra.is_zero() && rb.is_zero());
            }
        }
    }
}
