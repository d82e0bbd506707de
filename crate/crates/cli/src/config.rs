//! Scenario files: a JSON description of a coefficient ring, a structured
//! endomorphism, a derivation and suite budgets. Loading validates through
//! the same constructors the library enforces, so a scenario that loads is
//! one every suite can run on.
//!
//! Matrix entries, derivation images and q are written as expression
//! strings ("1", "t^2-t", "(t+1)/t") and parsed against the factor's
//! scalar field.

use crate::parse;
use orekit_core::ore::{FieldOreContext, SsOreContext};
use orekit_core::scalars::{
    FieldEndo, PrimeField, Scalar, ScalarDeriv, ScalarEndo, ScalarField,
};
use orekit_core::semisimple::{FactorDesc, Matrix, SsDeriv, SsEndo, SsRing};
use orekit_core::shiftring::ShiftOreContext;
use serde::Deserialize;
use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Json(String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Json(m) => write!(f, "malformed config: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid scenario: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn invalid(field: &str, detail: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid(format!("{field}: {detail}"))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub ring: RingSpec,
    #[serde(default)]
    pub sigma: SigmaSpec,
    #[serde(default)]
    pub delta: DeltaSpec,
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default)]
    pub suites: Option<Vec<String>>,
    #[serde(default)]
    pub budgets: Budgets,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub prime: u64,
    #[serde(default)]
    pub factors: Option<Vec<FactorSpec>>,
    #[serde(default, rename = "shift-ring")]
    pub shift_ring: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub n: usize,
    pub scalar: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaSpec {
    /// Factor permutation as disjoint cycles, identity when omitted.
    #[serde(default)]
    pub rho: Option<Vec<Vec<usize>>>,
    /// Per-factor unit matrices (entry strings), identity when omitted.
    #[serde(default)]
    pub units: Option<Vec<Option<Vec<Vec<String>>>>>,
    /// Per-factor scalar action `t -> c*t^k`, identity when omitted.
    #[serde(default)]
    pub taus: Option<Vec<Option<(u64, u64)>>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaSpec {
    /// Inner part: one matrix of entry strings per factor.
    #[serde(default)]
    pub inner: Option<Vec<Vec<Vec<String>>>>,
    /// Entrywise part: `delta(t)` per factor.
    #[serde(default)]
    pub entrywise: Option<Vec<Option<String>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    pub samples: usize,
    pub pairs: usize,
    pub degree: usize,
    pub truncation: usize,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            samples: 200,
            pairs: 200,
            degree: 3,
            truncation: 4,
        }
    }
}

/// A validated scenario: single scalar-line rings keep a field-level view
/// alongside the structured one so the calculator subcommands can run.
#[derive(Debug)]
pub enum Scenario {
    Field { ctx: FieldOreContext, ss: SsOreContext },
    Ss { ctx: SsOreContext },
    Shift { p: PrimeField, ctx: ShiftOreContext },
}

pub struct Loaded {
    pub config: ScenarioConfig,
    pub scenario: Scenario,
}

pub fn load(path: &Path) -> Result<Loaded, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    let config: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| ConfigError::Json(e.to_string()))?;
    let scenario = build(&config)?;
    Ok(Loaded { config, scenario })
}

/// Scratch context for parsing entry strings against one factor's field.
fn entry_ctx(field: &ScalarField) -> FieldOreContext {
    FieldOreContext::new(
        *field,
        ScalarEndo::Identity,
        ScalarDeriv::zero(field),
        None,
    )
    .expect("identity context is always valid")
}

fn parse_entry(field: &ScalarField, what: &str, s: &str) -> Result<Scalar, ConfigError> {
    parse::parse_scalar(&entry_ctx(field), s).map_err(|e| invalid(what, e))
}

fn parse_matrix(
    field: &ScalarField,
    what: &str,
    n: usize,
    rows: &[Vec<String>],
) -> Result<Matrix, ConfigError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid(what, format!("expected an {n} x {n} matrix")));
    }
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        for cell in row {
            entries.push(parse_entry(field, what, cell)?);
        }
    }
    Matrix::new(n, entries).map_err(|e| invalid(what, e))
}

fn cycles_to_permutation(m: usize, cycles: &[Vec<usize>]) -> Result<Vec<usize>, ConfigError> {
    let mut perm: Vec<usize> = (0..m).collect();
    let mut moved = vec![false; m];
    for cycle in cycles {
        for window in cycle.windows(2) {
            perm_set(&mut perm, &mut moved, window[0], window[1], m)?;
        }
        if cycle.len() > 1 {
            perm_set(&mut perm, &mut moved, cycle[cycle.len() - 1], cycle[0], m)?;
        }
    }
    Ok(perm)
}

fn perm_set(
    perm: &mut [usize],
    moved: &mut [bool],
    from: usize,
    to: usize,
    m: usize,
) -> Result<(), ConfigError> {
    if from >= m || to >= m {
        return Err(invalid(
            "sigma.rho",
            format!("factor index out of range (ring has {m} factors)"),
        ));
    }
    if moved[from] {
        return Err(invalid(
            "sigma.rho",
            format!("factor {from} appears in two cycles"),
        ));
    }
    moved[from] = true;
    perm[from] = to;
    Ok(())
}

fn build(config: &ScenarioConfig) -> Result<Scenario, ConfigError> {
    let p = PrimeField::new(config.ring.prime).map_err(|e| invalid("ring.prime", e))?;

    if config.ring.shift_ring {
        if config.ring.factors.is_some() {
            return Err(invalid(
                "ring",
                "a scenario is either a factor list or the shift ring, not both",
            ));
        }
        if config.q.is_some() {
            return Err(invalid("q", "the shift scenario has no quantization"));
        }
        let span = config.budgets.degree + 2;
        return Ok(Scenario::Shift {
            p,
            ctx: ShiftOreContext::new(p, span),
        });
    }

    let factor_specs = config
        .ring
        .factors
        .as_ref()
        .ok_or_else(|| invalid("ring", "needs either factors or \"shift-ring\": true"))?;
    if factor_specs.is_empty() {
        return Err(invalid("ring.factors", "at least one factor"));
    }
    let mut descs = Vec::new();
    for (i, f) in factor_specs.iter().enumerate() {
        let field = match f.scalar.as_str() {
            "Fp" => ScalarField::Prime(p),
            "Fp(t)" => ScalarField::Rational(p),
            other => {
                return Err(invalid(
                    &format!("ring.factors[{i}].scalar"),
                    format!("unknown scalar field \"{other}\" (use \"Fp\" or \"Fp(t)\")"),
                ))
            }
        };
        descs.push(FactorDesc { n: f.n, field });
    }
    let ring = SsRing::new(descs).map_err(|e| invalid("ring.factors", e))?;
    let m = ring.num_factors();

    let rho = match &config.sigma.rho {
        Some(cycles) => cycles_to_permutation(m, cycles)?,
        None => (0..m).collect(),
    };
    let mut taus = Vec::with_capacity(m);
    for i in 0..m {
        let spec = config
            .sigma
            .taus
            .as_ref()
            .and_then(|v| v.get(i).cloned().flatten());
        taus.push(match spec {
            None | Some((1, 1)) => ScalarEndo::Identity,
            Some((c, k)) => ScalarEndo::Map(
                FieldEndo::new(&p, c, k).map_err(|e| invalid(&format!("sigma.taus[{i}]"), e))?,
            ),
        });
    }
    let mut units = Vec::with_capacity(m);
    for i in 0..m {
        let target = rho[i];
        let field = ring.field(target);
        let n = ring.size(target);
        let spec = config
            .sigma
            .units
            .as_ref()
            .and_then(|v| v.get(i))
            .and_then(|u| u.as_ref());
        units.push(match spec {
            None => Matrix::identity(field, n),
            Some(rows) => parse_matrix(field, &format!("sigma.units[{i}]"), n, rows)?,
        });
    }
    if let Some(v) = &config.sigma.units {
        if v.len() != m {
            return Err(invalid("sigma.units", "one entry per factor"));
        }
    }
    if let Some(v) = &config.sigma.taus {
        if v.len() != m {
            return Err(invalid("sigma.taus", "one entry per factor"));
        }
    }
    let sigma = SsEndo::new(&ring, rho, units, taus).map_err(|e| invalid("sigma", e))?;

    let mut b = ring.zero();
    if let Some(inner) = &config.delta.inner {
        if inner.len() != m {
            return Err(invalid("delta.inner", "one matrix per factor"));
        }
        for (i, rows) in inner.iter().enumerate() {
            *b.part_mut(i) = parse_matrix(
                ring.field(i),
                &format!("delta.inner[{i}]"),
                ring.size(i),
                rows,
            )?;
        }
    }
    let mut entrywise = vec![None; m];
    if let Some(images) = &config.delta.entrywise {
        if images.len() != m {
            return Err(invalid("delta.entrywise", "one optional image per factor"));
        }
        for (i, image) in images.iter().enumerate() {
            let Some(expr) = image else { continue };
            let field = ring.field(i);
            let dt = parse_entry(field, &format!("delta.entrywise[{i}]"), expr)?;
            let Scalar::Rational(dt) = dt else {
                return Err(invalid(
                    &format!("delta.entrywise[{i}]"),
                    "factor is over F_p, which has no nonzero derivation",
                ));
            };
            entrywise[i] = Some(ScalarDeriv {
                sigma: *sigma.tau(i),
                dt,
            });
        }
    }
    let delta = SsDeriv::new(&ring, &sigma, b, entrywise).map_err(|e| invalid("delta", e))?;

    let ss = SsOreContext::new(ring, sigma, delta).map_err(|e| invalid("scenario", e))?;

    if ss.ring.num_factors() == 1 && ss.ring.size(0) == 1 {
        let field = *ss.ring.field(0);
        let sigma0 = *ss.sigma.tau(0);
        // The full delta on a scalar line, as delta(t): the entrywise image
        // plus the inner contribution b*(t - sigma(t)).
        let dt_total = if field.is_rational() {
            let f = field.prime();
            let t = Scalar::Rational(f.rf_t());
            let b0 = ss.delta.apply(&ss.ring, &ss.sigma, &scalar_line(&ss, &t));
            match b0.part(0).get(0, 0) {
                Scalar::Rational(r) => r.clone(),
                Scalar::Prime(_) => unreachable!("rational factor holds rational entries"),
            }
        } else {
            f_dt_zero(&field)
        };
        let q = match &config.q {
            Some(expr) => Some(parse_entry(&field, "q", expr)?),
            None => None,
        };
        let ctx = FieldOreContext::new(
            field,
            sigma0,
            ScalarDeriv {
                sigma: sigma0,
                dt: dt_total,
            },
            q,
        )
        .map_err(|e| invalid("scenario", e))?;
        return Ok(Scenario::Field { ctx, ss });
    }

    if config.q.is_some() {
        return Err(invalid(
            "q",
            "quantization constants apply to single scalar-line scenarios",
        ));
    }
    Ok(Scenario::Ss { ctx: ss })
}

fn scalar_line(ss: &SsOreContext, v: &Scalar) -> orekit_core::semisimple::SsElem {
    let mut e = ss.ring.zero();
    e.part_mut(0).set(0, 0, v.clone());
    e
}

fn f_dt_zero(field: &ScalarField) -> orekit_core::scalars::RatFun {
    field.prime().rf_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_config(json: &str) -> Result<Scenario, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(json).unwrap();
        build(&config)
    }

    #[test]
    fn builds_the_swap_scenario() {
        let scenario = parse_config(
            r#"{
                "name": "f2-swap",
                "ring": { "prime": 3, "factors": [
                    { "n": 1, "scalar": "Fp" }, { "n": 1, "scalar": "Fp" } ] },
                "sigma": { "rho": [[0, 1]] },
                "delta": { "inner": [ [["1"]], [["0"]] ] }
            }"#,
        )
        .unwrap();
        let Scenario::Ss { ctx } = scenario else {
            panic!("two lines build a structured scenario");
        };
        assert_eq!(ctx.ring.udim(), 2);
        assert_eq!(ctx.sigma.rho(), &[1, 0]);
    }

    #[test]
    fn single_line_scenarios_carry_a_field_view() {
        let scenario = parse_config(
            r#"{
                "name": "f1",
                "ring": { "prime": 5, "factors": [ { "n": 1, "scalar": "Fp(t)" } ] },
                "sigma": { "taus": [[1, 2]] },
                "delta": { "entrywise": ["t^2-t"] }
            }"#,
        )
        .unwrap();
        let Scenario::Field { ctx, .. } = scenario else {
            panic!("one line builds a field scenario");
        };
        let f = ctx.field.prime();
        assert_eq!(ctx.delta.dt, f.rf_new(f.poly(&[0, 4, 1]), f.poly_one()).unwrap());
    }

    #[test]
    fn inner_delta_folds_into_the_field_view() {
        let scenario = parse_config(
            r#"{
                "name": "inner-line",
                "ring": { "prime": 5, "factors": [ { "n": 1, "scalar": "Fp(t)" } ] },
                "sigma": { "taus": [[1, 2]] },
                "delta": { "inner": [ [["1"]] ] }
            }"#,
        )
        .unwrap();
        let Scenario::Field { ctx, .. } = scenario else {
            panic!("one line builds a field scenario");
        };
        // delta(t) = b*(t - t^2) with b = 1.
        let f = ctx.field.prime();
        assert_eq!(ctx.delta.dt, f.rf_new(f.poly(&[0, 1, 4]), f.poly_one()).unwrap());
    }

    #[test]
    fn rejects_a_singular_unit_by_name() {
        let err = parse_config(
            r#"{
                "name": "broken",
                "ring": { "prime": 3, "factors": [ { "n": 2, "scalar": "Fp" } ] },
                "sigma": { "units": [ [["0","0"],["0","0"]] ] }
            }"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("invertible"), "{msg}");
    }

    #[test]
    fn rejects_entrywise_images_on_prime_factors() {
        let err = parse_config(
            r#"{
                "name": "broken",
                "ring": { "prime": 3, "factors": [ { "n": 1, "scalar": "Fp" } ] },
                "delta": { "entrywise": ["1"] }
            }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("no nonzero derivation"));
    }

    #[test]
    fn rejects_a_fake_quantization_constant() {
        let err = parse_config(
            r#"{
                "name": "broken",
                "ring": { "prime": 5, "factors": [ { "n": 1, "scalar": "Fp(t)" } ] },
                "sigma": { "taus": [[1, 2]] },
                "delta": { "entrywise": ["t^2-t"] },
                "q": "2"
            }"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("quantization"));
    }

    #[test]
    fn builds_the_shift_scenario() {
        let scenario = parse_config(
            r#"{ "name": "shift", "ring": { "prime": 2, "shift-ring": true } }"#,
        )
        .unwrap();
        assert!(matches!(scenario, Scenario::Shift { .. }));
    }
}
