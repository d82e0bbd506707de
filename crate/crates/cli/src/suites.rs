//! Suite registry: named groups of checks run against a loaded scenario.
//! Entry order is fixed by the registry order and each suite derives its
//! randomness from the run seed and its own name, so the assembled report
//! is byte-identical at any parallelism level.

use orekit_core::jordan::{
    verify_delta_bar_levels, verify_jordan, verify_ore_jordan_extension, FieldJordanBase,
    JordanRing, SsJordanBase, TowerOreContext,
};
use orekit_core::ore::{
    leading_coeff_chain_report, left_divide, left_gcd_lclm, nilpotency_search, sample_poly,
    skew_add, skew_mul, skew_render, skew_sub, FieldOreContext, SkewContext, SkewPoly,
    SsOreContext,
};
use orekit_core::scalars::{verify_quantization, Scalar, ScalarEndo};
use orekit_core::semisimple::verify_endomorphism;
use orekit_core::shiftring::{
    corner_witness_search, nilpotent_ideal_certificate, verify_shift_endomorphism,
    ShiftOreContext,
};
use orekit_core::structure::{
    decompose, independence_witness, udim_ore, BlockKind, MatrixFormOutcome,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Budgets, ConfigError, Loaded, Scenario};
use crate::report::{from_verify, ReportDoc, ReportEntry};

pub const SUITE_NAMES: &[&str] = &[
    "axioms",
    "endomorphism",
    "derivation",
    "udim",
    "decompose",
    "semiprime",
    "jordan",
    "quantized",
    "division",
    "chains",
];

/// FNV-1a of the suite name folded into the run seed. Each suite's stream is
/// independent of which other suites run and in what order.
fn sub_seed(seed: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h ^ seed
}

pub fn run_suites(
    loaded: &Loaded,
    seed: u64,
    jobs: Option<usize>,
) -> Result<ReportDoc, ConfigError> {
    let selected: Vec<String> = match &loaded.config.suites {
        Some(list) => {
            for name in list {
                if !SUITE_NAMES.contains(&name.as_str()) {
                    return Err(ConfigError::Invalid(format!(
                        "suites: unknown suite \"{name}\""
                    )));
                }
            }
            list.clone()
        }
        None => SUITE_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let run = || -> Vec<ReportEntry> {
        selected
            .par_iter()
            .map(|name| run_suite(name, loaded, seed))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    let entries = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| ConfigError::Invalid(format!("jobs: {e}")))?
            .install(run),
        None => run(),
    };
    Ok(ReportDoc::new(loaded.config.name.clone(), seed, entries))
}

fn run_suite(name: &str, loaded: &Loaded, seed: u64) -> Vec<ReportEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, name));
    let b = &loaded.config.budgets;
    match name {
        "axioms" => axioms(loaded, b, &mut rng, seed),
        "endomorphism" => endomorphism(loaded, b, &mut rng, seed),
        "derivation" => derivation(loaded, b, &mut rng, seed),
        "udim" => udim(loaded, b, seed),
        "decompose" => decompose_suite(loaded, seed),
        "semiprime" => semiprime(loaded, b, &mut rng, seed),
        "jordan" => jordan(loaded, b, &mut rng, seed),
        "quantized" => quantized(loaded, b, &mut rng, seed),
        "division" => division(loaded, b, &mut rng, seed),
        "chains" => chains(loaded, seed),
        other => unreachable!("suite {other} passed validation"),
    }
}

fn ss_view(loaded: &Loaded) -> Option<&SsOreContext> {
    match &loaded.scenario {
        Scenario::Field { ss, .. } => Some(ss),
        Scenario::Ss { ctx } => Some(ctx),
        Scenario::Shift { .. } => None,
    }
}

// ---- axioms ----

fn axioms(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    match &loaded.scenario {
        Scenario::Field { ctx, .. } => axioms_over(ctx, b, rng, seed),
        Scenario::Ss { ctx } => axioms_over(ctx, b, rng, seed),
        Scenario::Shift { ctx, .. } => axioms_over(ctx, b, rng, seed),
    }
}

fn axioms_over<C: SkewContext>(
    ctx: &C,
    b: &Budgets,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Vec<ReportEntry> {
    let mut assoc_ok = true;
    let mut distrib_ok = true;
    let mut detail = String::new();
    for _ in 0..b.samples {
        let f = sample_poly(ctx, b.degree, rng);
        let g = sample_poly(ctx, b.degree, rng);
        let h = sample_poly(ctx, b.degree, rng);
        let fg = skew_mul(ctx, &f, &g).expect("product within degree cap");
        let gh = skew_mul(ctx, &g, &h).expect("product within degree cap");
        if skew_mul(ctx, &fg, &h).expect("product within degree cap")
            != skew_mul(ctx, &f, &gh).expect("product within degree cap")
        {
            assoc_ok = false;
            detail = format!(
                "f = {}, g = {}, h = {}",
                skew_render(ctx, &f),
                skew_render(ctx, &g),
                skew_render(ctx, &h)
            );
        }
        let lhs = skew_mul(ctx, &f, &skew_add(ctx, &g, &h)).expect("product within degree cap");
        if lhs != skew_add(ctx, &fg, &skew_mul(ctx, &f, &h).expect("product within degree cap")) {
            distrib_ok = false;
        }
        if !assoc_ok || !distrib_ok {
            break;
        }
    }
    vec![
        ReportEntry::checked(
            "axioms.associativity",
            "(f g) h = f (g h) for skew polynomials",
            assoc_ok,
            if assoc_ok {
                format!("{} random triples of degree <= {}", b.samples, b.degree)
            } else {
                detail.clone()
            },
            seed,
        ),
        ReportEntry::checked(
            "axioms.distributivity",
            "f (g + h) = f g + f h for skew polynomials",
            distrib_ok,
            format!("{} random triples of degree <= {}", b.samples, b.degree),
            seed,
        ),
    ]
}

// ---- endomorphism ----

fn endomorphism(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    let stmt = "sigma is an injective ring endomorphism of the coefficient ring";
    match &loaded.scenario {
        Scenario::Field { ctx, .. } => {
            let field = &ctx.field;
            let mut map_ok = field.endo_apply(&ctx.sigma, &field.one()) == field.one();
            let mut inj_ok = true;
            for _ in 0..b.samples {
                let a = field.sample_tame(rng);
                let c = field.sample_tame(rng);
                let sa = field.endo_apply(&ctx.sigma, &a);
                let sc = field.endo_apply(&ctx.sigma, &c);
                map_ok &= field.endo_apply(&ctx.sigma, &field.mul(&a, &c))
                    == field.mul(&sa, &sc)
                    && field.endo_apply(&ctx.sigma, &field.add(&a, &c)) == field.add(&sa, &sc);
                inj_ok &= field.endo_preimage(&ctx.sigma, &sa) == Some(a);
                if !map_ok || !inj_ok {
                    break;
                }
            }
            vec![
                ReportEntry::checked(
                    "endomorphism.ring-map",
                    stmt,
                    map_ok,
                    format!("unital, multiplicative and additive on {} samples", b.samples),
                    seed,
                ),
                ReportEntry::checked(
                    "endomorphism.injective",
                    stmt,
                    inj_ok,
                    format!("preimage recovers the argument on {} samples", b.samples),
                    seed,
                ),
            ]
        }
        Scenario::Ss { ctx } => from_verify(
            "endomorphism",
            stmt,
            &verify_endomorphism(&ctx.ring, &ctx.sigma, b.samples, rng),
            seed,
        ),
        Scenario::Shift { p, .. } => from_verify(
            "endomorphism",
            "the shift is an injective, non-surjective ring endomorphism",
            &verify_shift_endomorphism(*p, b.samples, rng),
            seed,
        ),
    }
}

// ---- derivation ----

fn derivation(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    let stmt = "delta is additive and satisfies delta(ab) = delta(a) b + sigma(a) delta(b)";
    match &loaded.scenario {
        Scenario::Field { ctx, .. } => {
            let field = &ctx.field;
            let mut ok = true;
            for _ in 0..b.samples {
                let a = field.sample_tame(rng);
                let c = field.sample_tame(rng);
                let da = field.deriv_apply(&ctx.delta, &a);
                let dc = field.deriv_apply(&ctx.delta, &c);
                let lhs = field.deriv_apply(&ctx.delta, &field.mul(&a, &c));
                let rhs = field.add(
                    &field.mul(&da, &c),
                    &field.mul(&field.endo_apply(&ctx.sigma, &a), &dc),
                );
                ok &= lhs == rhs
                    && field.deriv_apply(&ctx.delta, &field.add(&a, &c)) == field.add(&da, &dc);
                if !ok {
                    break;
                }
            }
            vec![ReportEntry::checked(
                "derivation.leibniz",
                stmt,
                ok,
                format!(
                    "delta(t) = {}; twisted Leibniz rule on {} sample pairs",
                    field.prime().rf_render(&ctx.delta.dt),
                    b.samples
                ),
                seed,
            )]
        }
        Scenario::Ss { ctx } => {
            let ring = &ctx.ring;
            let mut ok = true;
            for _ in 0..b.samples {
                let a = ring.sample_tame(rng);
                let c = ring.sample_tame(rng);
                let da = ctx.delta.apply(ring, &ctx.sigma, &a);
                let dc = ctx.delta.apply(ring, &ctx.sigma, &c);
                let lhs = ctx.delta.apply(ring, &ctx.sigma, &ring.mul(&a, &c));
                let rhs = ring.add(
                    &ring.mul(&da, &c),
                    &ring.mul(&ctx.sigma.apply(ring, &a), &dc),
                );
                ok &= lhs == rhs
                    && ctx.delta.apply(ring, &ctx.sigma, &ring.add(&a, &c)) == ring.add(&da, &dc);
                if !ok {
                    break;
                }
            }
            vec![ReportEntry::checked(
                "derivation.leibniz",
                stmt,
                ok,
                format!("twisted Leibniz rule on {} sample pairs", b.samples),
                seed,
            )]
        }
        Scenario::Shift { .. } => vec![ReportEntry::checked(
            "derivation.zero",
            stmt,
            true,
            "the scenario fixes delta = 0, so x r = sigma(r) x exactly",
            seed,
        )],
    }
}

// ---- udim ----

fn udim(loaded: &Loaded, b: &Budgets, seed: u64) -> Vec<ReportEntry> {
    let Some(ss) = ss_view(loaded) else {
        return vec![ReportEntry::unsupported(
            "udim.trace",
            "the uniform dimension of the skew polynomial ring equals udim of the coefficients",
            "uniform dimension accounting is implemented for semisimple coefficient rings",
        )];
    };
    let mut entries = Vec::new();
    match udim_ore(&ss.ring, &ss.sigma, &ss.delta) {
        Ok(trace) => {
            let blocks: Vec<String> = trace
                .entries
                .iter()
                .map(|e| format!("orbit {:?} contributes {}: {}", e.orbit, e.value, e.justification))
                .collect();
            entries.push(ReportEntry::checked(
                "udim.trace",
                "the uniform dimension of the skew polynomial ring equals udim of the coefficients",
                trace.total == ss.ring.udim(),
                format!(
                    "total {} against udim R = {}; {}",
                    trace.total,
                    ss.ring.udim(),
                    blocks.join("; ")
                ),
                seed,
            ));
        }
        Err(e) => entries.push(ReportEntry::checked(
            "udim.trace",
            "the uniform dimension of the skew polynomial ring equals udim of the coefficients",
            false,
            e.to_string(),
            seed,
        )),
    }
    match independence_witness(&ss.ring, &ss.sigma, &ss.delta, b.truncation) {
        Ok(w) => entries.push(ReportEntry::checked(
            "udim.witness",
            "udim-many independent left ideals are exhibited at a finite truncation",
            w.count == ss.ring.udim() && w.direct,
            format!(
                "{} ideals at truncation {}; ranks {:?}, joint rank {}, direct sum: {}",
                w.count, w.trunc, w.ranks, w.joint_rank, w.direct
            ),
            seed,
        )),
        Err(e) => entries.push(ReportEntry::unsupported(
            "udim.witness",
            "udim-many independent left ideals are exhibited at a finite truncation",
            e.to_string(),
        )),
    }
    entries
}

// ---- decompose ----

fn decompose_suite(loaded: &Loaded, seed: u64) -> Vec<ReportEntry> {
    let stmt = "the skew polynomial ring splits along sigma-orbits into twist-only \
                and matrix normal form blocks";
    let Some(ss) = ss_view(loaded) else {
        return vec![ReportEntry::unsupported(
            "decompose.blocks",
            stmt,
            "decomposition is implemented for semisimple coefficient rings",
        )];
    };
    let report = match decompose(&ss.ring, &ss.sigma, &ss.delta) {
        Ok(r) => r,
        Err(e) => {
            return vec![ReportEntry::checked(
                "decompose.blocks",
                stmt,
                false,
                e.to_string(),
                seed,
            )]
        }
    };
    let field = *ss.ring.field(0);
    let mut entries = Vec::new();
    for (i, block) in report.blocks.iter().enumerate() {
        let claim = format!("decompose.block-{i}");
        match &block.kind {
            BlockKind::Multi(mb) => entries.push(ReportEntry::checked(
                claim,
                "a multi-factor orbit rewrites to a twist-only presentation in y = x - b",
                true,
                format!(
                    "orbit {:?}; b = {}; residual solution space dimension {}",
                    mb.orbit,
                    mb.ctx_x.ring.render(&mb.b),
                    mb.solution_space_dim
                ),
                seed,
            )),
            BlockKind::Simple(MatrixFormOutcome::Supported(mf)) => {
                entries.push(ReportEntry::checked(
                    claim,
                    "a single matrix factor rewrites as matrices over an inner skew \
                     polynomial ring",
                    true,
                    format!(
                        "m = {}; b = {}; inner twist {}; inner derivation sends t to {}",
                        mf.m,
                        mf.b.render(&field),
                        render_tau(&mf.tau),
                        field.prime().rf_render(&mf.delta_prime.dt)
                    ),
                    seed,
                ))
            }
            BlockKind::Simple(MatrixFormOutcome::Unsupported { m, reason }) => {
                entries.push(ReportEntry::unsupported(
                    claim,
                    "a single matrix factor rewrites as matrices over an inner skew \
                     polynomial ring",
                    format!("m = {m}; {reason}"),
                ))
            }
        }
    }
    entries.extend(from_verify(
        "decompose",
        "conversion maps between presentations are ring maps and mutually inverse",
        &report.verification,
        seed,
    ));
    entries
}

fn render_tau(tau: &ScalarEndo) -> String {
    match tau {
        ScalarEndo::Identity => "t -> t".to_string(),
        ScalarEndo::Map(e) => {
            if e.c() == 1 {
                format!("t -> t^{}", e.k())
            } else {
                format!("t -> {}*t^{}", e.c(), e.k())
            }
        }
    }
}

// ---- semiprime ----

fn semiprime(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    match &loaded.scenario {
        Scenario::Field { ctx, .. } => semiprime_search(ctx, "coefficients form a domain", b, rng, seed),
        Scenario::Ss { ctx } => semiprime_search(ctx, "coefficients are semisimple", b, rng, seed),
        Scenario::Shift { p, .. } => {
            let mut entries = Vec::new();
            match corner_witness_search(*p, 2, b.samples.max(1), rng) {
                Ok(Some(w)) => {
                    let render_ctx = ShiftOreContext::new(*p, 4);
                    let rendered = skew_render(&render_ctx, &w.p);
                    entries.push(ReportEntry::checked(
                        "semiprime.witness",
                        "the corner monomial generates a square-zero left ideal",
                        rendered == "e(1,1)*x",
                        format!(
                            "generator {rendered}; its left ideal squares to zero against {} \
                             multipliers up to x-degree {}",
                            w.multipliers_checked, w.max_x_power
                        ),
                        seed,
                    ));
                }
                Ok(None) => entries.push(ReportEntry::checked(
                    "semiprime.witness",
                    "the corner monomial generates a square-zero left ideal",
                    false,
                    "search found no square-zero left ideal generator",
                    seed,
                )),
                Err(e) => entries.push(ReportEntry::checked(
                    "semiprime.witness",
                    "the corner monomial generates a square-zero left ideal",
                    false,
                    e.to_string(),
                    seed,
                )),
            }
            match nilpotent_ideal_certificate(*p, 8, b.samples, rng) {
                Ok(rep) => entries.extend(from_verify(
                    "semiprime",
                    "e(1,1) x r x^k e(1,1) vanishes for every r and every k up to the bound",
                    &rep,
                    seed,
                )),
                Err(e) => entries.push(ReportEntry::checked(
                    "semiprime.certificate",
                    "e(1,1) x r x^k e(1,1) vanishes for every r and every k up to the bound",
                    false,
                    e.to_string(),
                    seed,
                )),
            }
            entries
        }
    }
}

fn semiprime_search<C: SkewContext>(
    ctx: &C,
    why_expected: &str,
    b: &Budgets,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Vec<ReportEntry> {
    let stmt = "no element generates a square-zero left ideal at the searched degrees";
    match nilpotency_search(ctx, 2, b.samples, rng) {
        Ok(None) => vec![ReportEntry::checked(
            "semiprime.search",
            stmt,
            true,
            format!(
                "no generator found up to x-degree 2 within budget {}; {}",
                b.samples, why_expected
            ),
            seed,
        )],
        Ok(Some(w)) => vec![ReportEntry::checked(
            "semiprime.search",
            stmt,
            false,
            format!("found generator {}", skew_render(ctx, &w.p)),
            seed,
        )],
        Err(e) => vec![ReportEntry::checked(
            "semiprime.search",
            stmt,
            false,
            e.to_string(),
            seed,
        )],
    }
}

// ---- jordan ----

fn jordan(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    let stmt = "the tower closure extends sigma to an automorphism restricting back to sigma";
    match &loaded.scenario {
        Scenario::Field { ctx, .. } => {
            let base = match FieldJordanBase::new(ctx.field, ctx.sigma) {
                Ok(base) => base,
                Err(e) => {
                    return vec![ReportEntry::checked("jordan.base", stmt, false, e.to_string(), seed)]
                }
            };
            let jr = JordanRing::new(base);
            let mut entries = from_verify(
                "jordan",
                stmt,
                &verify_jordan(&jr, b.samples, 3, rng),
                seed,
            );
            let ext_stmt = "delta extends to the tower and skew multiplication stays \
                            coefficient-level bounded";
            let q_eff = if ctx.delta.is_zero() {
                Some(ctx.q.clone().unwrap_or_else(|| ctx.field.one()))
            } else {
                ctx.q.clone()
            };
            match q_eff {
                Some(q) => {
                    let base2 = FieldJordanBase::new(ctx.field, ctx.sigma)
                        .expect("base validated above");
                    match TowerOreContext::new(JordanRing::new(base2), ctx.delta.clone(), q) {
                        Ok(tctx) => match verify_ore_jordan_extension(
                            &tctx,
                            b.samples.min(100),
                            2,
                            rng,
                        ) {
                            Ok(rep) => {
                                entries.extend(from_verify("jordan.extension", ext_stmt, &rep, seed))
                            }
                            Err(e) => entries.push(ReportEntry::checked(
                                "jordan.extension",
                                ext_stmt,
                                false,
                                e.to_string(),
                                seed,
                            )),
                        },
                        Err(e) => entries.push(ReportEntry::unsupported(
                            "jordan.extension",
                            ext_stmt,
                            e.to_string(),
                        )),
                    }
                }
                None => entries.push(ReportEntry::unsupported(
                    "jordan.extension",
                    ext_stmt,
                    "a nonzero derivation extends to the tower only alongside a \
                     quantization constant; none is configured",
                )),
            }
            entries
        }
        Scenario::Ss { ctx } => {
            let base = SsJordanBase {
                ring: ctx.ring.clone(),
                sigma: ctx.sigma.clone(),
            };
            from_verify(
                "jordan",
                stmt,
                &verify_jordan(&JordanRing::new(base), b.samples, 3, rng),
                seed,
            )
        }
        Scenario::Shift { .. } => vec![ReportEntry::unsupported(
            "jordan.tower",
            stmt,
            "tower levels for the shift ring need unboundedly large corner blocks \
             and are not represented here",
        )],
    }
}

// ---- quantized ----

fn quantized(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    let pair_stmt = "delta sigma = q sigma delta with q central, fixed by sigma and killed by delta";
    let Scenario::Field { ctx, .. } = &loaded.scenario else {
        return vec![ReportEntry::unsupported(
            "quantized.pair",
            pair_stmt,
            "quantization constants are tracked for scalar-line scenarios",
        )];
    };
    let q = if ctx.delta.is_zero() {
        Some(ctx.q.clone().unwrap_or_else(|| ctx.field.one()))
    } else {
        ctx.q.clone()
    };
    let Some(q) = q else {
        return vec![ReportEntry::unsupported(
            "quantized.pair",
            pair_stmt,
            "the derivation is nonzero and no quantization constant is configured",
        )];
    };
    let mut entries = from_verify(
        "quantized",
        pair_stmt,
        &verify_quantization(&ctx.field, &ctx.sigma, &ctx.delta, &q, b.samples, rng),
        seed,
    );
    let hat_stmt = "sigma-hat(c x^i) = sigma(c) q^-i x^i extends sigma multiplicatively to \
                    skew polynomials";
    let hat_ctx = quantized_view(ctx, &q);
    match orekit_core::ore::verify_extension(&hat_ctx, b.samples, 2, rng) {
        Ok(rep) => entries.extend(from_verify("quantized.sigma-hat", hat_stmt, &rep, seed)),
        Err(e) => entries.push(ReportEntry::checked(
            "quantized.sigma-hat",
            hat_stmt,
            false,
            e.to_string(),
            seed,
        )),
    }
    let bar_stmt = "the tower extension of delta does not depend on the lifting level";
    match FieldJordanBase::new(ctx.field, ctx.sigma) {
        Ok(base) => {
            let jr = JordanRing::new(base);
            match verify_delta_bar_levels(&jr, &ctx.delta, &q, b.samples, 2, rng) {
                Ok(rep) => entries.extend(from_verify("quantized.delta-bar", bar_stmt, &rep, seed)),
                Err(e) => entries.push(ReportEntry::checked(
                    "quantized.delta-bar",
                    bar_stmt,
                    false,
                    e.to_string(),
                    seed,
                )),
            }
        }
        Err(e) => entries.push(ReportEntry::unsupported("quantized.delta-bar", bar_stmt, e.to_string())),
    }
    entries
}

/// The context with `q` filled in, so the extension checks see a quantized
/// pair even when the scenario left `q` implicit (zero derivation).
fn quantized_view(ctx: &FieldOreContext, q: &Scalar) -> FieldOreContext {
    FieldOreContext {
        field: ctx.field,
        sigma: ctx.sigma,
        delta: ctx.delta.clone(),
        q: Some(q.clone()),
    }
}

// ---- division ----

fn division(loaded: &Loaded, b: &Budgets, rng: &mut ChaCha8Rng, seed: u64) -> Vec<ReportEntry> {
    let Scenario::Field { ctx, .. } = &loaded.scenario else {
        return vec![ReportEntry::unsupported(
            "division.remainder",
            "f = q g + r with deg r < deg g",
            "left division needs invertible leading coefficients; the coefficient \
             ring is not a division ring",
        )];
    };
    let mut entries = Vec::new();
    let mut div_ok = true;
    let mut detail = format!("{} random pairs reconstructed by multiplication", b.pairs);
    for _ in 0..b.pairs {
        let f = sample_poly(ctx, b.degree + 2, rng);
        let g = nonzero_poly(ctx, b.degree, rng);
        let (quot, rem) = match left_divide(ctx, &f, &g) {
            Ok(v) => v,
            Err(e) => {
                div_ok = false;
                detail = e.to_string();
                break;
            }
        };
        let back = skew_add(ctx, &skew_mul(ctx, &quot, &g).expect("within cap"), &rem);
        let deg_ok = match (rem.degree(), g.degree()) {
            (Some(dr), Some(dg)) => dr < dg,
            (None, _) => true,
            _ => false,
        };
        if back != f || !deg_ok {
            div_ok = false;
            detail = format!("f = {}, g = {}", skew_render(ctx, &f), skew_render(ctx, &g));
            break;
        }
    }
    entries.push(ReportEntry::checked(
        "division.remainder",
        "f = q g + r with deg r < deg g",
        div_ok,
        detail,
        seed,
    ));
    let mut gl_ok = true;
    let mut gl_detail = format!("{} random pairs; both cofactor identities verified", b.pairs);
    for _ in 0..b.pairs {
        let f = nonzero_poly(ctx, b.degree, rng);
        let g = nonzero_poly(ctx, b.degree, rng);
        let gl = match left_gcd_lclm(ctx, &f, &g) {
            Ok(v) => v,
            Err(e) => {
                gl_ok = false;
                gl_detail = e.to_string();
                break;
            }
        };
        let bezout = skew_add(
            ctx,
            &skew_mul(ctx, &gl.gcd_cof_f, &f).expect("within cap"),
            &skew_mul(ctx, &gl.gcd_cof_g, &g).expect("within cap"),
        );
        let mf = skew_mul(ctx, &gl.lclm_cof_f, &f).expect("within cap");
        let mg = skew_mul(ctx, &gl.lclm_cof_g, &g).expect("within cap");
        if bezout != gl.gcd || mf != gl.lclm || mg != gl.lclm {
            gl_ok = false;
            gl_detail = format!("f = {}, g = {}", skew_render(ctx, &f), skew_render(ctx, &g));
            break;
        }
        let rf = skew_sub(ctx, &f, &skew_mul(ctx, &left_divide(ctx, &f, &gl.gcd).expect("gcd divides").0, &gl.gcd).expect("within cap"));
        if !rf.is_zero() {
            gl_ok = false;
            gl_detail = format!("gcd does not right-divide f = {}", skew_render(ctx, &f));
            break;
        }
    }
    entries.push(ReportEntry::checked(
        "division.gcd-lclm",
        "gcd and lclm cofactor identities hold exactly",
        gl_ok,
        gl_detail,
        seed,
    ));
    entries
}

fn nonzero_poly(
    ctx: &FieldOreContext,
    max_deg: usize,
    rng: &mut ChaCha8Rng,
) -> SkewPoly<Scalar> {
    loop {
        let f = sample_poly(ctx, max_deg, rng);
        if !f.is_zero() {
            return f;
        }
    }
}

// ---- chains ----

fn chains(loaded: &Loaded, seed: u64) -> Vec<ReportEntry> {
    let stmt = "leading-coefficient levels embed into later levels under sigma and inclusion";
    let Some(ss) = ss_view(loaded) else {
        return vec![ReportEntry::unsupported(
            "chains.levels",
            stmt,
            "leading-coefficient chains are computed for semisimple coefficient rings",
        )];
    };
    if !ss.ring.all_prime_fields() {
        return vec![ReportEntry::unsupported(
            "chains.levels",
            stmt,
            "chain levels are finite-dimensional only over prime scalar fields",
        )];
    }
    let x = SkewPoly::x(ss);
    let g1 = skew_add(
        ss,
        &x,
        &SkewPoly::constant(ss, ss.ring.unit_elem(0, 0, 0)),
    );
    match leading_coeff_chain_report(ss, &[g1], 3, 3) {
        Ok((levels, rep)) => {
            let dims: Vec<usize> = levels.iter().map(|l| l.dim).collect();
            let mut entries = vec![ReportEntry::checked(
                "chains.dimensions",
                stmt,
                true,
                format!("level dimensions {dims:?} at multiplier bound 3"),
                seed,
            )];
            entries.extend(from_verify("chains", stmt, &rep, seed));
            entries
        }
        Err(e) => vec![ReportEntry::checked(
            "chains.levels",
            stmt,
            false,
            e.to_string(),
            seed,
        )],
    }
}
