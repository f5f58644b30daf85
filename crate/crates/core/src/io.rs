//! JSON formats for spaces, measures and states, and the canonical writer
//! used for outputs and input digests: sorted keys, floats as `%.17g`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Result, WeylError};
use crate::measure::{GridDensity, Measure};
use crate::phase_space::PhasePoint;
use crate::representation::{CharacterConfig, GridSpec, QuantumState, RepConfig};
use crate::space::{HbarScaler, PreSymplecticSpace, ScalingKind, SeminormSpec};

/// Everything a space file configures.
#[derive(Debug, Clone)]
pub struct SpaceConfig {
    pub space: Arc<PreSymplecticSpace>,
    pub seminorm: SeminormSpec,
    pub scaler: HbarScaler,
    pub rep: RepConfig,
}

impl PartialEq for SpaceConfig {
    fn eq(&self, other: &Self) -> bool {
        *self.space == *other.space && self.seminorm == other.seminorm && self.scaler == other.scaler && self.rep == other.rep
    }
}

impl SpaceConfig {
    /// Identity semi-norm with `c = ‖σ‖₂`, sqrt scaling, default grids.
    pub fn with_defaults(space: PreSymplecticSpace) -> Self {
        let d = space.dim();
        let c = spectral_norm(space.sigma());
        Self {
            space: Arc::new(space),
            seminorm: SeminormSpec::identity(d, c),
            scaler: HbarScaler::sqrt(),
            rep: RepConfig::default(),
        }
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

// ---------------------------------------------------------------- reading

fn field<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| WeylError::validation(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| WeylError::validation(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| WeylError::validation(path, "expected an array"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| WeylError::validation(path, "expected a finite number"))
}

fn as_i64(v: &Value, path: &str) -> Result<i64> {
    if let Some(i) = v.as_i64() {
        return Ok(i);
    }
    match v.as_f64() {
        Some(x) if x.fract() == 0.0 && x.abs() < 9.0e15 => Ok(x as i64),
        _ => Err(WeylError::validation(path, "expected an integer")),
    }
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    let i = as_i64(v, path)?;
    usize::try_from(i).map_err(|_| WeylError::validation(path, "expected a non-negative integer"))
}

fn f64_vec(v: &Value, path: &str) -> Result<Vec<f64>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
        .collect()
}

fn i64_vec(v: &Value, path: &str) -> Result<Vec<i64>> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_i64(x, &format!("{path}[{i}]")))
        .collect()
}

pub fn matrix_from_value(v: &Value, path: &str) -> Result<DMatrix<f64>> {
    let rows = as_array(v, path)?;
    let data: Vec<Vec<f64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| f64_vec(r, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    let n = data.len();
    let m = data.first().map_or(0, |r| r.len());
    if data.iter().any(|r| r.len() != m) {
        return Err(WeylError::validation(path, "rows have different lengths"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| data[i][j]))
}

fn with_field<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| match e {
        WeylError::Validation { .. } => e,
        other => WeylError::validation(path, other.to_string()),
    })
}

pub fn space_from_value(v: &Value) -> Result<SpaceConfig> {
    let path = "space";
    let obj = as_object(v, path)?;
    let sigma = matrix_from_value(field(obj, path, "sigma")?, "space.sigma")?;
    let dim = sigma.nrows();
    if let Some(d) = obj.get("dim") {
        let d = as_usize(d, "space.dim")?;
        if d != dim {
            return Err(WeylError::validation("space.dim", format!("dim is {d} but sigma is {dim}×{dim}")));
        }
    }
    let step = match obj.get("lattice_step") {
        Some(s) => f64_vec(s, "space.lattice_step")?,
        None => vec![1.0; dim],
    };
    let space = with_field(PreSymplecticSpace::new(sigma, step), "space.sigma")?;
    let mut cfg = SpaceConfig::with_defaults(space);

    if let Some(sn) = obj.get("seminorm") {
        let sp = "space.seminorm";
        let so = as_object(sn, sp)?;
        let gram = matrix_from_value(field(so, sp, "gram")?, "space.seminorm.gram")?;
        let c = as_f64(field(so, sp, "c")?, "space.seminorm.c")?;
        cfg.seminorm = with_field(SeminormSpec::new(gram, c), sp)?;
        if cfg.seminorm.dim() != dim {
            return Err(WeylError::validation(sp, format!("gram must be {dim}×{dim}")));
        }
    }
    if let Some(sc) = obj.get("scaler") {
        let sp = "space.scaler";
        let so = as_object(sc, sp)?;
        let kind = field(so, sp, "kind")?
            .as_str()
            .ok_or_else(|| WeylError::validation("space.scaler.kind", "expected a string"))?;
        cfg.scaler = match kind {
            "sqrt_scaling" => HbarScaler::sqrt(),
            "split_scaling" => {
                let c = matrix_from_value(field(so, sp, "conjugation")?, "space.scaler.conjugation")?;
                let alpha = match so.get("theta_exponent") {
                    Some(a) => as_f64(a, "space.scaler.theta_exponent")?,
                    None => 0.5,
                };
                with_field(HbarScaler::split(&cfg.space, c, alpha), "space.scaler.conjugation")?
            }
            other => {
                return Err(WeylError::validation(
                    "space.scaler.kind",
                    format!("unknown kind {other:?} (expected sqrt_scaling or split_scaling)"),
                ))
            }
        };
    }
    if let Some(rep) = obj.get("representation") {
        let rp = "space.representation";
        let ro = as_object(rep, rp)?;
        let half = cfg.space.darboux_decompose().half_dim();
        let default = GridSpec::default_for(half);
        let n = match ro.get("points_per_axis") {
            Some(n) => as_usize(n, "space.representation.points_per_axis")?,
            None => default.points_per_axis,
        };
        let l = match ro.get("half_length") {
            Some(l) => as_f64(l, "space.representation.half_length")?,
            None => default.half_length,
        };
        cfg.rep.grid = Some(with_field(GridSpec::new(half, n, l), rp)?);
        if let Some(c) = ro.get("characters") {
            cfg.rep.characters.count = as_usize(c, "space.representation.characters")?;
        }
        if let Some(s) = ro.get("seed") {
            cfg.rep.characters.seed = as_usize(s, "space.representation.seed")? as u64;
        }
    }
    Ok(cfg)
}

pub fn measure_from_value(v: &Value) -> Result<(SpaceConfig, Measure)> {
    let obj = as_object(v, "measure")?;
    let cfg = space_from_value(field(obj, "", "space")?)?;
    let dim = cfg.space.dim();
    let mut atoms = Vec::new();
    if let Some(d) = obj.get("discrete") {
        for (i, a) in as_array(d, "discrete")?.iter().enumerate() {
            let p = format!("discrete[{i}]");
            let ao = as_object(a, &p)?;
            let coord = i64_vec(field(ao, &p, "coord")?, &join(&p, "coord"))?;
            if coord.len() != dim {
                return Err(WeylError::validation(join(&p, "coord"), format!("expected {dim} entries")));
            }
            let re = match ao.get("re") {
                Some(x) => as_f64(x, &join(&p, "re"))?,
                None => 0.0,
            };
            let im = match ao.get("im") {
                Some(x) => as_f64(x, &join(&p, "im"))?,
                None => 0.0,
            };
            atoms.push((coord, C64::new(re, im)));
        }
    }
    let mut mu = Measure::from_atoms(cfg.space.clone(), atoms)?;
    if let Some(d) = obj.get("density") {
        let p = "density";
        let dobj = as_object(d, p)?;
        let bounds: Vec<(i64, i64)> = as_array(field(dobj, p, "box")?, "density.box")?
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let bp = format!("density.box[{i}]");
                let pair = i64_vec(b, &bp)?;
                match pair.as_slice() {
                    [lo, hi] => Ok((*lo, *hi)),
                    _ => Err(WeylError::validation(bp, "expected [lo, hi]")),
                }
            })
            .collect::<Result<_>>()?;
        if bounds.len() != dim {
            return Err(WeylError::validation("density.box", format!("expected {dim} axes")));
        }
        let stride = match dobj.get("stride") {
            Some(s) => i64_vec(s, "density.stride")?,
            None => vec![1; dim],
        };
        let samples: Vec<C64> = as_array(field(dobj, p, "samples")?, "density.samples")?
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let sp = format!("density.samples[{i}]");
                let pair = f64_vec(s, &sp)?;
                match pair.as_slice() {
                    [re, im] => Ok(C64::new(*re, *im)),
                    _ => Err(WeylError::validation(sp, "expected [re, im]")),
                }
            })
            .collect::<Result<_>>()?;
        mu = mu.with_density(with_field(GridDensity::from_box(&bounds, stride, samples), p)?)?;
    }
    Ok((cfg, mu))
}

pub fn state_from_value(v: &Value) -> Result<QuantumState> {
    let obj = as_object(v, "state")?;
    let kind = field(obj, "state", "kind")?
        .as_str()
        .ok_or_else(|| WeylError::validation("state.kind", "expected a string"))?;
    match kind {
        "gaussian" => with_field(
            QuantumState::gaussian(matrix_from_value(field(obj, "state", "s")?, "state.s")?),
            "state.s",
        ),
        "character" => Ok(QuantumState::character(PhasePoint::new(f64_vec(
            field(obj, "state", "at")?,
            "state.at",
        )?))),
        other => Err(WeylError::validation(
            "state.kind",
            format!("unknown kind {other:?} (expected gaussian or character)"),
        )),
    }
}

pub fn probes_from_value(v: &Value) -> Result<Vec<Vec<f64>>> {
    as_array(v, "probes")?
        .iter()
        .enumerate()
        .map(|(i, p)| f64_vec(p, &format!("probes[{i}]")))
        .collect()
}

pub fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| WeylError::validation(what, format!("invalid JSON: {e}")))
}

pub fn read_json_file(path: &std::path::Path, what: &str) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| WeylError::validation(what, format!("cannot read {}: {e}", path.display())))?;
    parse_json(&text, what)
}

// ---------------------------------------------------------------- writing

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn vec_value(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

pub fn matrix_value(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| vec_value(&m.row(i).iter().copied().collect::<Vec<_>>()))
            .collect(),
    )
}

pub fn complex_value(z: C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn space_to_value(cfg: &SpaceConfig) -> Value {
    let mut obj = Map::new();
    obj.insert("dim".into(), Value::from(cfg.space.dim()));
    obj.insert("sigma".into(), matrix_value(cfg.space.sigma()));
    obj.insert("lattice_step".into(), vec_value(cfg.space.lattice_step()));
    let mut sn = Map::new();
    sn.insert("gram".into(), matrix_value(cfg.seminorm.gram()));
    sn.insert("c".into(), num(cfg.seminorm.compat_c()));
    obj.insert("seminorm".into(), Value::Object(sn));
    let mut sc = Map::new();
    match cfg.scaler.kind() {
        ScalingKind::Sqrt => {
            sc.insert("kind".into(), Value::from("sqrt_scaling"));
        }
        ScalingKind::Split {
            conjugation,
            theta_exponent,
        } => {
            sc.insert("kind".into(), Value::from("split_scaling"));
            sc.insert("conjugation".into(), matrix_value(conjugation));
            sc.insert("theta_exponent".into(), num(*theta_exponent));
        }
    }
    obj.insert("scaler".into(), Value::Object(sc));
    if let Some(g) = cfg.rep.grid {
        let mut r = Map::new();
        r.insert("points_per_axis".into(), Value::from(g.points_per_axis));
        r.insert("half_length".into(), num(g.half_length));
        r.insert("characters".into(), Value::from(cfg.rep.characters.count));
        r.insert("seed".into(), Value::from(cfg.rep.characters.seed));
        obj.insert("representation".into(), Value::Object(r));
    } else if cfg.rep.characters != CharacterConfig::default() {
        let mut r = Map::new();
        r.insert("characters".into(), Value::from(cfg.rep.characters.count));
        r.insert("seed".into(), Value::from(cfg.rep.characters.seed));
        obj.insert("representation".into(), Value::Object(r));
    }
    Value::Object(obj)
}

pub fn measure_to_value(cfg: &SpaceConfig, mu: &Measure) -> Value {
    let mut obj = Map::new();
    obj.insert("space".into(), space_to_value(cfg));
    let atoms: Vec<Value> = mu
        .discrete()
        .iter()
        .map(|(c, z)| {
            let mut a = Map::new();
            a.insert("coord".into(), Value::Array(c.iter().map(|&x| Value::from(x)).collect()));
            a.insert("re".into(), num(z.re));
            a.insert("im".into(), num(z.im));
            Value::Object(a)
        })
        .collect();
    obj.insert("discrete".into(), Value::Array(atoms));
    if let Some(d) = mu.density() {
        let mut dobj = Map::new();
        let hi = d.hi();
        dobj.insert(
            "box".into(),
            Value::Array(
                d.lo()
                    .iter()
                    .zip(&hi)
                    .map(|(l, h)| Value::Array(vec![Value::from(*l), Value::from(*h)]))
                    .collect(),
            ),
        );
        dobj.insert("stride".into(), Value::Array(d.stride().iter().map(|&s| Value::from(s)).collect()));
        dobj.insert("samples".into(), Value::Array(d.samples().iter().map(|&z| complex_value(z)).collect()));
        obj.insert("density".into(), Value::Object(dobj));
    }
    Value::Object(obj)
}

/// `%.17g`: shortest fixed or exponent form with 17 significant digits and
/// trailing zeros removed.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Canonical JSON: object keys sorted, no whitespace, floats via `%.17g`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&format_g17(n.as_f64().expect("finite float")));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        Value::Object(o) => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&o[k], out);
            }
            out.push('}');
        }
    }
}

pub fn sha256_hex(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn g17_matches_printf() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (0.5, "0.5"),
            (2.0, "2"),
            (-3.25, "-3.25"),
            (1e-4, "0.0001"),
            (1e-5, "1.0000000000000001e-05"),
            (1e17, "1e+17"),
            (123456789.0, "123456789"),
            (1.0 / 3.0, "0.33333333333333331"),
            (6.02214076e23, "6.0221407599999999e+23"),
        ];
        for (x, s) in cases {
            assert_eq!(format_g17(x), s, "{x}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn canonical_sorts_keys() {
        let v = json!({"b": 1, "a": [0.1, {"d": true, "c": null}]});
        assert_eq!(canonical_json(&v), r#"{"a":[0.10000000000000001,{"c":null,"d":true}],"b":1}"#);
    }

    #[test]
    fn measure_round_trip() {
        let v = json!({
            "space": {"sigma": [[0, 1], [-1, 0]], "lattice_step": [0.5, 0.25]},
            "discrete": [{"coord": [1, 0], "re": 2.0, "im": 0.0}, {"coord": [0, 1], "re": 0, "im": -3}],
            "density": {"box": [[0, 1], [-2, 0]], "samples": [[1, 0], [0, 1], [2, 0], [0.5, 0.5], [1, 1], [0, 0]]}
        });
        let (cfg, mu) = measure_from_value(&v).unwrap();
        assert_eq!(mu.discrete().len(), 2);
        let emitted = measure_to_value(&cfg, &mu);
        let text = canonical_json(&emitted);
        let (cfg2, mu2) = measure_from_value(&parse_json(&text, "m").unwrap()).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(mu, mu2);
        assert_eq!(canonical_json(&measure_to_value(&cfg2, &mu2)), text);
    }

    #[test]
    fn validation_names_fields() {
        let bad = json!({"space": {"sigma": [[0, 1], [1, 0]]}, "discrete": []});
        let err = measure_from_value(&bad).unwrap_err();
        assert!(matches!(err, WeylError::Validation { ref field, .. } if field == "space.sigma"), "{err}");
        let bad = json!({"space": {"sigma": [[0, 1], [-1, 0]]}, "discrete": [{"coord": [1], "re": 1}]});
        let err = measure_from_value(&bad).unwrap_err();
        assert!(matches!(err, WeylError::Validation { ref field, .. } if field == "discrete[0].coord"), "{err}");
        let missing = json!({"discrete": []});
        assert!(matches!(measure_from_value(&missing), Err(WeylError::Validation { ref field, .. }) if field == "space"));
    }

    #[test]
    fn space_options() {
        let v = json!({
            "sigma": [[0, 1], [-1, 0]],
            "seminorm": {"gram": [[2, 0], [0, 2]], "c": 0.5},
            "scaler": {"kind": "split_scaling", "conjugation": [[1, 0], [0, -1]], "theta_exponent": 1.0},
            "representation": {"points_per_axis": 128, "half_length": 8, "characters": 16, "seed": 7}
        });
        let cfg = space_from_value(&v).unwrap();
        assert_eq!(cfg.seminorm.compat_c(), 0.5);
        assert!(matches!(cfg.scaler.kind(), ScalingKind::Split { .. }));
        assert_eq!(cfg.rep.grid.unwrap().points_per_axis, 128);
        assert_eq!(cfg.rep.characters.count, 16);
        let again = space_from_value(&space_to_value(&cfg)).unwrap();
        assert_eq!(cfg, again);
        let bad = json!({"sigma": [[0, 1], [-1, 0]], "scaler": {"kind": "cubic"}});
        assert!(space_from_value(&bad).is_err());
    }
}
