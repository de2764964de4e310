//! Problem files, batch execution and reports.
//!
//! A problem file is JSON with `"schema": 1`, a field, an optional monomial
//! ring, named objects and a list of commands. Field elements are integers in
//! the packed base-`p` encoding; polynomials are coefficient lists, low degree
//! first.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::artinian::{ArtinRing, FinModule};
use crate::crystal::{
    kashiwara_roundtrip, stable_part, structured_i_torsion, unitalize, Kind, StructuredModule,
    UnitalizeOutcome, DEFAULT_MAX_STEPS,
};
use crate::duality::{
    double_dual_check, dual_base_change_check, dualize, hasse_invariant, ordinarity, pair_c_to_f,
    pair_f_to_c, short_weierstrass_curves, sol_base_change_check, sol_point, trace_by_point_count,
};
use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldSpec};
use crate::local::{dualize_pid, is_perverse, local_duality_check, PidComplex};
use crate::matrix::Matrix;
use crate::pid::{coherent_model_of_localization, matlis_double_dual_check, PidModule, PresModule};
use crate::poly::{Poly, PolyMatrix};
use crate::random::{random_module, random_pid_torsion, random_ring, random_structure, rng};
use crate::semilinear::TwistedOperator;
use crate::suite::{run_suite, SUITES};

pub const SCHEMA_VERSION: u32 = 1;

type Rows = Vec<Vec<Elem>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub p: u32,
    #[serde(default = "one")]
    pub r: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingJson {
    pub vars: Vec<String>,
    pub relations: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleJson {
    pub dim: usize,
    pub actions: Vec<Rows>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsionJson {
    pub x: Rows,
    pub op: Rows,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub degree: i32,
    pub object: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectJson {
    /// Module over the file's monomial ring with its structure matrix.
    Module {
        kind: Kind,
        #[serde(default = "one")]
        exponent: u32,
        module: ModuleJson,
        structure: Rows,
    },
    /// `F_q[x]`-module: torsion data and/or a presentation, plus the free
    /// transition matrix.
    Pid {
        kind: Kind,
        #[serde(default = "one")]
        exponent: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        torsion: Option<TorsionJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        presentation: Option<Vec<Vec<Vec<Elem>>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        op: Option<Rows>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        free: Vec<Vec<Vec<Elem>>>,
    },
    Complex {
        terms: Vec<TermJson>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Op {
    Validate,
    Nilpotent,
    Stable,
    Unitalize,
    Dualize,
    DoubleDual,
    Pair,
    Sol,
    BaseChange,
    LocalDuality,
    Perverse,
    Kashiwara,
    LocalizeModel,
    Hasse,
    Suite,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandJson {
    pub op: Option<Op>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    /// Second operand of `pair`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub with: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Fields of the result that must take the given values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Map<String, Value>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: u32,
    pub field: FieldJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<RingJson>,
    #[serde(default)]
    pub objects: BTreeMap<String, ObjectJson>,
    #[serde(default)]
    pub commands: Vec<CommandJson>,
}

#[derive(Clone, Debug)]
pub enum Object {
    Module(StructuredModule),
    Pid(PidModule),
    Complex(PidComplex),
}

impl Object {
    fn tier(&self) -> &'static str {
        match self {
            Object::Module(_) => "module",
            Object::Pid(_) => "pid",
            Object::Complex(_) => "complex",
        }
    }
}

pub struct Problem {
    pub field: Field,
    pub ring: Option<std::sync::Arc<ArtinRing>>,
    pub objects: BTreeMap<String, Object>,
    pub commands: Vec<CommandJson>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn matrix(field: &Field, rows: &Rows, n: usize, m: usize, what: &str) -> Result<Matrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != m) {
        return Err(schema(format!("{what} must be a {n}x{m} matrix")));
    }
    if rows.iter().flatten().any(|&c| !field.contains(c)) {
        return Err(schema(format!("{what} has entries outside the field")));
    }
    Matrix::from_rows_sized(field, n, m, rows)
}

fn poly(field: &Field, c: &[Elem]) -> Result<Poly> {
    if c.iter().any(|&a| !field.contains(a)) {
        return Err(schema("polynomial coefficient outside the field"));
    }
    Ok(Poly::new(field, c.to_vec()))
}

fn poly_rows(field: &Field, rows: &[Vec<Vec<Elem>>], what: &str) -> Result<PolyMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    let entries = rows
        .iter()
        .map(|r| r.iter().map(|c| poly(field, c)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::from_rows(field, n, m, entries)
        .map_err(|_| schema(format!("{what} is not rectangular")))
}

fn twist(kind: Kind, e: u32) -> Result<i32> {
    if e == 0 {
        return Err(schema("exponent must be positive"));
    }
    Ok(kind.sign() * e as i32)
}

pub fn load(file: &ProblemFile) -> Result<Problem> {
    if file.schema != SCHEMA_VERSION {
        return Err(schema(format!(
            "unsupported schema version {}",
            file.schema
        )));
    }
    let field = Field::new(FieldSpec::new(file.field.p, file.field.r, 1))
        .map_err(|e| schema(e.to_string()))?;
    let ring = match &file.ring {
        Some(r) => Some(
            ArtinRing::new(&field, r.vars.clone(), r.relations.clone())
                .map_err(|e| schema(e.to_string()))?,
        ),
        None => None,
    };
    let mut objects = BTreeMap::new();
    for (name, obj) in &file.objects {
        let built = build_object(&field, ring.as_ref(), obj, &objects).map_err(|e| {
            schema(format!(
                "object {name:?}: {}",
                e.to_string().trim_start_matches("schema error: ")
            ))
        })?;
        objects.insert(name.clone(), built);
    }
    // complexes may reference objects declared after them in key order
    for (name, obj) in &file.objects {
        if let ObjectJson::Complex { .. } = obj {
            let built = build_object(&field, ring.as_ref(), obj, &objects)
                .map_err(|e| schema(format!("object {name:?}: {e}")))?;
            objects.insert(name.clone(), built);
        }
    }
    let problem = Problem {
        field,
        ring,
        objects,
        commands: file.commands.clone(),
    };
    for (i, c) in problem.commands.iter().enumerate() {
        check_command(&problem, c).map_err(|e| {
            schema(format!(
                "command {i}: {}",
                e.to_string().trim_start_matches("schema error: ")
            ))
        })?;
    }
    Ok(problem)
}

fn build_object(
    field: &Field,
    ring: Option<&std::sync::Arc<ArtinRing>>,
    obj: &ObjectJson,
    done: &BTreeMap<String, Object>,
) -> Result<Object> {
    Ok(match obj {
        ObjectJson::Module {
            kind,
            exponent,
            module,
            structure,
        } => {
            let ring = ring.ok_or_else(|| schema("module objects need a ring"))?;
            if module.actions.len() != ring.nvars() {
                return Err(schema(format!("expected {} action matrices", ring.nvars())));
            }
            let d = module.dim;
            let acts = module
                .actions
                .iter()
                .map(|a| matrix(field, a, d, d, "action"))
                .collect::<Result<Vec<_>>>()?;
            let m = FinModule::new(ring, d, acts).map_err(|e| schema(e.to_string()))?;
            let k = matrix(field, structure, d, d, "structure")?;
            Object::Module(StructuredModule::new(
                m,
                TwistedOperator::new(k, twist(*kind, *exponent)?),
            )?)
        }
        ObjectJson::Pid {
            kind,
            exponent,
            torsion,
            presentation,
            op,
            free,
        } => {
            let t = twist(*kind, *exponent)?;
            let free = if free.is_empty() {
                PolyMatrix::zeros(field, 0, 0)
            } else {
                poly_rows(field, free, "free")?
            };
            match (torsion, presentation) {
                (Some(_), Some(_)) => {
                    return Err(schema("give either torsion or presentation, not both"))
                }
                (Some(tj), None) => {
                    if op.is_some() {
                        return Err(schema("op belongs inside torsion"));
                    }
                    let n = tj.x.len();
                    let x = matrix(field, &tj.x, n, n, "torsion.x")?;
                    let a = matrix(field, &tj.op, n, n, "torsion.op")?;
                    Object::Pid(PidModule::new(x, a, free, t)?)
                }
                (None, Some(p)) => {
                    let pm = PresModule::new(poly_rows(field, p, "presentation")?);
                    let n = pm.torsion_dim();
                    let a = match op {
                        Some(rows) => matrix(field, rows, n, n, "op")?,
                        None if n == 0 => Matrix::zeros(field, 0, 0),
                        None => return Err(schema("presentation with torsion needs op")),
                    };
                    let mut m = PidModule::from_presentation(&pm, a, free, *kind)?;
                    m.twist = t;
                    Object::Pid(m)
                }
                (None, None) => {
                    let z = Matrix::zeros(field, 0, 0);
                    Object::Pid(PidModule::new(z.clone(), z, free, t)?)
                }
            }
        }
        ObjectJson::Complex { terms } => {
            let mut out = Vec::new();
            for term in terms {
                match done.get(&term.object) {
                    Some(Object::Pid(m)) => out.push((term.degree, m.clone())),
                    Some(o) => {
                        return Err(schema(format!(
                            "complex term {:?} is a {} object",
                            term.object,
                            o.tier()
                        )))
                    }
                    None => return Err(schema(format!("undefined object {:?}", term.object))),
                }
            }
            let twists: Vec<i32> = out.iter().map(|(_, m)| m.twist).collect();
            if twists.windows(2).any(|w| w[0] != w[1]) {
                return Err(schema("complex mixes structure types"));
            }
            Object::Complex(PidComplex { terms: out })
        }
    })
}

fn check_command(p: &Problem, c: &CommandJson) -> Result<()> {
    let op = c.op.ok_or_else(|| schema("missing op"))?;
    let get = |name: &Option<String>, what: &str| -> Result<&Object> {
        let n = name
            .as_ref()
            .ok_or_else(|| schema(format!("{op:?} needs {what}")))?;
        p.objects
            .get(n)
            .ok_or_else(|| schema(format!("undefined object {n:?}")))
    };
    let tiers: &[&str] = match op {
        Op::Validate | Op::Nilpotent | Op::Dualize => &["module", "pid", "complex"],
        Op::Stable | Op::Unitalize | Op::Pair | Op::Sol | Op::BaseChange | Op::Kashiwara => {
            &["module"]
        }
        Op::DoubleDual => &["module", "pid"],
        Op::LocalDuality | Op::LocalizeModel => &["pid"],
        Op::Perverse => &["pid", "complex"],
        Op::Hasse | Op::Suite => &[],
    };
    if !tiers.is_empty() {
        let o = get(&c.object, "an object")?;
        if !tiers.contains(&o.tier()) {
            return Err(schema(format!(
                "{op:?} does not apply to {} objects",
                o.tier()
            )));
        }
    }
    match op {
        Op::Pair => {
            if get(&c.with, "a second object (with)")?.tier() != "module" {
                return Err(schema("pair needs two module objects"));
            }
        }
        Op::Kashiwara if c.ideal.is_none() => return Err(schema("kashiwara needs an ideal")),
        Op::LocalizeModel if c.f.is_none() => return Err(schema("localize-model needs f")),
        Op::Hasse if c.p.is_none() || c.f.is_none() => return Err(schema("hasse needs p and f")),
        Op::Suite => {
            if let Some(n) = &c.name {
                if !SUITES.contains(&n.as_str()) {
                    return Err(schema(format!("unknown suite {n:?}")));
                }
            }
        }
        _ => {}
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Unsupported,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandResult {
    pub index: usize,
    pub op: Op,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
    pub status: Status,
    pub result: Value,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub ok: usize,
    pub failed: usize,
    pub unsupported: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub version: &'static str,
    pub seed: u64,
    pub strict: bool,
    pub field: Value,
    pub results: Vec<CommandResult>,
    pub summary: Summary,
}

impl Report {
    /// 0 when every command passed; 1 on any failure, or any unsupported
    /// result under `--strict`.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 || (self.strict && self.summary.unsupported > 0) {
            1
        } else {
            0
        }
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "forge {}  field F_{}  seed {}\n",
            self.version, self.field["q"], self.seed
        );
        for r in &self.results {
            let status = match r.status {
                Status::Ok => "ok",
                Status::Failed => "FAILED",
                Status::Unsupported if self.strict => "UNSUPPORTED",
                Status::Unsupported => "unsupported",
            };
            let op = serde_json::to_value(r.op).unwrap_or(Value::Null);
            s.push_str(&format!(
                "{:>3}  {:<15} {:<12} {:<12} {}\n",
                r.index,
                op.as_str().unwrap_or("?"),
                r.object.as_deref().unwrap_or("-"),
                status,
                brief(&r.result)
            ));
            for f in &r.failures {
                s.push_str(&format!("       ! {f}\n"));
            }
        }
        s.push_str(&format!(
            "{} ok, {} failed, {} unsupported\n",
            self.summary.ok, self.summary.failed, self.summary.unsupported
        ));
        s
    }
}

fn brief(v: &Value) -> String {
    let Some(m) = v.as_object() else {
        return v.to_string();
    };
    m.iter()
        .filter(|(_, x)| !x.is_array() && !x.is_object())
        .map(|(k, x)| format!("{k}={x}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub struct RunOptions {
    pub seed: u64,
    pub strict: bool,
    pub timing: bool,
}

pub fn run(problem: &Problem, opts: &RunOptions) -> Report {
    let results: Vec<CommandResult> = problem
        .commands
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let start = Instant::now();
            let mut r = execute(problem, i, c, opts.seed);
            if opts.timing {
                r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            r
        })
        .collect();
    let count = |s: Status| results.iter().filter(|r| r.status == s).count();
    let summary = Summary {
        ok: count(Status::Ok),
        failed: count(Status::Failed),
        unsupported: count(Status::Unsupported),
    };
    Report {
        schema: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        seed: opts.seed,
        strict: opts.strict,
        field: json!({
            "p": problem.field.p(),
            "r": problem.field.r(),
            "q": problem.field.q(),
            "modulus": problem.field.modulus(),
        }),
        results,
        summary,
    }
}

fn execute(p: &Problem, index: usize, c: &CommandJson, seed: u64) -> CommandResult {
    let op = c.op.expect("checked at load");
    let mut failures = Vec::new();
    let (status, result) = match dispatch(p, c, op, seed, &mut failures) {
        Ok(v) => {
            if let Some(exp) = &c.expect {
                for (k, want) in exp {
                    match v.get(k) {
                        Some(got) if got == want => {}
                        Some(got) => failures.push(format!("expected {k} = {want}, got {got}")),
                        None => failures.push(format!("result has no field {k:?}")),
                    }
                }
            }
            (
                if failures.is_empty() {
                    Status::Ok
                } else {
                    Status::Failed
                },
                v,
            )
        }
        Err(Error::Unsupported(msg)) => (Status::Unsupported, json!({ "reason": msg })),
        Err(e) => {
            failures.push(e.to_string());
            (Status::Failed, Value::Null)
        }
    };
    CommandResult {
        index,
        op,
        object: c.object.clone(),
        status,
        result,
        failures,
        elapsed_ms: None,
    }
}

fn module<'a>(p: &'a Problem, name: &Option<String>) -> &'a StructuredModule {
    match p.objects.get(name.as_deref().unwrap_or_default()) {
        Some(Object::Module(m)) => m,
        _ => unreachable!("checked at load"),
    }
}

fn pid<'a>(p: &'a Problem, name: &Option<String>) -> &'a PidModule {
    match p.objects.get(name.as_deref().unwrap_or_default()) {
        Some(Object::Pid(m)) => m,
        _ => unreachable!("checked at load"),
    }
}

fn require_valid(o: &Object) -> Result<()> {
    let bad = match o {
        Object::Module(m) => m.validate().violations,
        Object::Pid(m) => m.validate(),
        Object::Complex(c) => c.terms.iter().flat_map(|(_, m)| m.validate()).collect(),
    };
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::NotEquivariant(bad.join("; ")))
    }
}

fn pid_json(m: &PidModule) -> Value {
    json!({
        "kind": m.kind(),
        "torsion_dim": m.torsion_dim(),
        "free_rank": m.free_rank(),
        "x": m.torsion_x,
        "op": m.torsion_op,
        "free": (0..m.free_rank())
            .map(|i| (0..m.free_rank()).map(|j| m.free.get(i, j).coeffs().to_vec()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn complex_json(c: &PidComplex) -> Value {
    Value::Array(
        c.terms
            .iter()
            .map(|(d, m)| {
                let mut v = pid_json(m);
                v["degree"] = json!(d);
                v
            })
            .collect(),
    )
}

fn dispatch(
    p: &Problem,
    c: &CommandJson,
    op: Op,
    seed: u64,
    failures: &mut Vec<String>,
) -> Result<Value> {
    let obj = c.object.as_ref().and_then(|n| p.objects.get(n));
    if let Some(o) = obj {
        if op != Op::Validate {
            require_valid(o)?;
        }
    }
    Ok(match op {
        Op::Validate => {
            let violations = match obj.expect("checked") {
                Object::Module(m) => m.validate().violations,
                Object::Pid(m) => m.validate(),
                Object::Complex(c) => c.terms.iter().flat_map(|(_, m)| m.validate()).collect(),
            };
            failures.extend(violations.iter().cloned());
            json!({ "valid": violations.is_empty(), "violations": violations })
        }
        Op::Nilpotent => match obj.expect("checked") {
            Object::Module(m) => {
                let n = m.nilpotency_index();
                json!({ "index": n, "nilpotent": n.is_finite() })
            }
            Object::Pid(m) => {
                let n = m.torsion_nilpotency_total();
                let free = m.free_structure_nilpotent()?;
                json!({ "torsion_index": n, "free_nilpotent": free, "nilpotent": n.is_finite() && free })
            }
            Object::Complex(c) => {
                let mut all = true;
                for (_, m) in &c.terms {
                    all &=
                        m.torsion_nilpotency_total().is_finite() && m.free_structure_nilpotent()?;
                }
                json!({ "nilpotent": all })
            }
        },
        Op::Stable => {
            let m = module(p, &c.object);
            let (s, b) = stable_part(m)?;
            json!({ "dim": s.dim(), "stable_rank": m.stable_rank(), "basis": b })
        }
        Op::Unitalize => {
            let m = module(p, &c.object);
            match unitalize(m, DEFAULT_MAX_STEPS)? {
                UnitalizeOutcome::NotStabilized { steps, last_dim } => {
                    failures.push(format!("no stabilization within {steps} steps"));
                    json!({ "stabilized": false, "steps": steps, "last_dim": last_dim })
                }
                UnitalizeOutcome::Stabilized(u) => {
                    if !u.certificate.is_nil_isomorphism {
                        failures.push("canonical map is not a nil-isomorphism".into());
                    }
                    if (u.module.dim() == 0) != m.is_nilpotent() {
                        failures.push("unitalization vanishing disagrees with nilpotence".into());
                    }
                    json!({
                        "stabilized": true,
                        "dim": u.module.dim(),
                        "is_unit": u.is_unit,
                        "steps": u.steps,
                        "certificate": u.certificate,
                        "structure": u.module.mat(),
                        "canonical": u.canonical,
                    })
                }
            }
        }
        Op::Dualize => match obj.expect("checked") {
            Object::Module(m) => {
                let d = dualize(m)?;
                json!({
                    "kind": d.module.kind(),
                    "dim": d.module.dim(),
                    "index": d.module.nilpotency_index(),
                    "structure": d.module.mat(),
                    "actions": d.module.module.actions(),
                })
            }
            Object::Pid(m) => complex_json(&dualize_pid(&PidComplex::single(
                m.clone(),
                c.degree.unwrap_or(0),
            ))?),
            Object::Complex(cx) => complex_json(&dualize_pid(cx)?),
        },
        Op::DoubleDual => match obj.expect("checked") {
            Object::Module(m) => {
                let r = double_dual_check(m)?;
                if !r.holds() {
                    failures
                        .push("evaluation map is not a structure-preserving isomorphism".into());
                }
                json!({ "holds": r.holds(), "bijective": r.bijective, "structure_preserving": r.structure_preserving,
                        "r_linear": r.r_linear, "evaluation": r.evaluation })
            }
            Object::Pid(m) => {
                let holds = matlis_double_dual_check(m)?;
                if !holds {
                    failures.push("Matlis evaluation map is not an isomorphism".into());
                }
                json!({ "holds": holds })
            }
            Object::Complex(_) => unreachable!("checked at load"),
        },
        Op::Pair => {
            let a = module(p, &c.object);
            let b = module(p, &c.with);
            let (h, _) = match a.kind() {
                Kind::Frobenius => pair_f_to_c(a, b)?,
                Kind::Cartier => pair_c_to_f(a, b)?,
            };
            json!({ "kind": h.kind(), "dim": h.dim(), "index": h.nilpotency_index(), "structure": h.mat() })
        }
        Op::Sol => {
            let r = sol_point(module(p, &c.object), c.s.unwrap_or(1))?;
            json!({ "s": r.s, "dim": r.arithmetic_dim, "geometric_dim": r.geometric_dim, "basis": r.basis })
        }
        Op::BaseChange => {
            let m = module(p, &c.object);
            let s = c.s.unwrap_or(2);
            let mut out = Map::new();
            if m.kind() == Kind::Frobenius {
                let r = sol_base_change_check(m, s)?;
                if !r.agrees {
                    failures.push("Sol dimensions change under base change".into());
                }
                out.insert("sol".into(), json!(r));
            }
            let d = dual_base_change_check(m, s)?;
            if !d.isomorphic {
                failures.push("D(M_s) and D(M)_s differ".into());
            }
            out.insert("dual_isomorphic".into(), json!(d.isomorphic));
            out.insert("comparison".into(), json!(d.comparison));
            Value::Object(out)
        }
        Op::LocalDuality => {
            let r = local_duality_check(pid(p, &c.object))?;
            if !r.agree {
                failures.push("Ext and local cohomology verdicts differ".into());
            }
            json!(r)
        }
        Op::Perverse => {
            let cx = match obj.expect("checked") {
                Object::Pid(m) => PidComplex::single(m.clone(), c.degree.unwrap_or(0)),
                Object::Complex(cx) => cx.clone(),
                Object::Module(_) => unreachable!("checked at load"),
            };
            json!(is_perverse(&cx)?)
        }
        Op::Kashiwara => {
            let n = module(p, &c.object);
            let ideal = c.ideal.as_ref().expect("checked");
            let (sub, _) = structured_i_torsion(n, ideal)?;
            let r = kashiwara_roundtrip(&sub, Some(n))?;
            if !r.roundtrip_exact {
                failures.push("i^♭ i_* is not the identity".into());
            }
            if !r.counit.as_ref().is_some_and(|c| c.is_nil_isomorphism) {
                failures.push("counit is not a nil-isomorphism".into());
            }
            json!({ "torsion_dim": sub.dim(), "roundtrip_exact": r.roundtrip_exact, "counit": r.counit })
        }
        Op::LocalizeModel => {
            let m = pid(p, &c.object);
            let coeffs: Vec<Elem> =
                c.f.as_ref()
                    .expect("checked")
                    .iter()
                    .map(|&a| p.field.from_int(a))
                    .collect();
            let f = Poly::new(&p.field, coeffs);
            let r = coherent_model_of_localization(m, &f, c.depth.unwrap_or(3))?;
            if !r.certified {
                failures.push("a localization layer is not nilpotent".into());
            }
            json!({ "certified": r.certified, "layers": r.layers, "model": pid_json(&r.model) })
        }
        Op::Hasse => {
            let (prime, f) = (c.p.expect("checked"), c.f.as_ref().expect("checked"));
            let h = hasse_invariant(prime, f)?;
            let o = ordinarity(prime, f)?;
            let ap = trace_by_point_count(prime, f)?;
            let agrees = (h != 0) == (ap.rem_euclid(prime as i64) != 0);
            if !agrees {
                failures.push("Hasse invariant and point count disagree".into());
            }
            json!({ "value": h, "ordinary": o.ordinary, "a_p": ap, "point_count_agrees": agrees })
        }
        Op::Suite => {
            let names: Vec<&str> = match &c.name {
                Some(n) => vec![n.as_str()],
                None => SUITES.to_vec(),
            };
            let count = c.count.unwrap_or(50);
            let outs = names
                .iter()
                .map(|n| run_suite(n, seed, count))
                .collect::<Result<Vec<_>>>()?;
            for o in &outs {
                failures.extend(o.failures.iter().map(|f| format!("{}: {f}", o.name)));
            }
            json!({ "passed": outs.iter().all(|o| o.passed), "suites": outs })
        }
    })
}

/// Parses a problem file; all failures are schema errors.
pub fn parse(text: &str) -> Result<ProblemFile> {
    serde_json::from_str(text).map_err(|e| schema(e.to_string()))
}

pub const GENERATORS: &[&str] = &["random-artinian", "random-pid-torsion", "elliptic-scan"];

pub struct GenerateOptions {
    pub seed: u64,
    pub count: usize,
    pub max_dim: usize,
    pub p: Option<u32>,
}

fn rows(m: &Matrix) -> Rows {
    m.to_rows()
}

/// Reproducible problem file of the given kind.
pub fn generate(kind: &str, o: &GenerateOptions) -> Result<ProblemFile> {
    let mut r = rng(o.seed);
    let mut objects = BTreeMap::new();
    let mut commands = Vec::new();
    let cmd = |op: Op, object: &str| CommandJson {
        op: Some(op),
        object: Some(object.into()),
        ..Default::default()
    };
    let (field, ring) = match kind {
        "random-artinian" => {
            let primes = match o.p {
                Some(p) => vec![p],
                None => vec![2, 3],
            };
            let ring = random_ring(&mut r, &primes, 6)?;
            for i in 0..o.count {
                let kind = if i % 2 == 0 {
                    Kind::Cartier
                } else {
                    Kind::Frobenius
                };
                let m = random_module(&ring, &mut r, o.max_dim)?;
                let s = random_structure(&m, kind, &mut r)?;
                let name = format!("m{i}");
                objects.insert(
                    name.clone(),
                    ObjectJson::Module {
                        kind,
                        exponent: 1,
                        module: ModuleJson {
                            dim: s.dim(),
                            actions: s.module.actions().iter().map(rows).collect(),
                        },
                        structure: rows(s.mat()),
                    },
                );
                commands.push(cmd(Op::Validate, &name));
                commands.push(cmd(Op::Nilpotent, &name));
                commands.push(cmd(Op::DoubleDual, &name));
                commands.push(CommandJson {
                    s: Some(2),
                    ..cmd(Op::BaseChange, &name)
                });
                match kind {
                    Kind::Cartier => commands.push(cmd(Op::Unitalize, &name)),
                    Kind::Frobenius => commands.push(cmd(Op::Sol, &name)),
                }
            }
            let spec = ring.spec();
            (
                FieldJson {
                    p: spec.p,
                    r: spec.r,
                },
                Some(RingJson {
                    vars: spec.vars,
                    relations: spec.relations,
                }),
            )
        }
        "random-pid-torsion" => {
            let p = o.p.unwrap_or(2);
            let field = Field::base(p, 1)?;
            for i in 0..o.count {
                let kind = if i % 2 == 0 {
                    Kind::Cartier
                } else {
                    Kind::Frobenius
                };
                let m = random_pid_torsion(&field, &mut r, kind, o.max_dim)?;
                let name = format!("t{i}");
                objects.insert(
                    name.clone(),
                    ObjectJson::Pid {
                        kind,
                        exponent: 1,
                        torsion: Some(TorsionJson {
                            x: rows(&m.torsion_x),
                            op: rows(&m.torsion_op),
                        }),
                        presentation: None,
                        op: None,
                        free: vec![],
                    },
                );
                commands.push(cmd(Op::Validate, &name));
                commands.push(cmd(Op::LocalDuality, &name));
                commands.push(cmd(Op::Dualize, &name));
                commands.push(CommandJson {
                    expect: Some(Map::from_iter([("perverse".to_string(), json!(true))])),
                    ..cmd(Op::Perverse, &name)
                });
            }
            (FieldJson { p, r: 1 }, None)
        }
        "elliptic-scan" => {
            let p = o.p.unwrap_or(5);
            for f in short_weierstrass_curves(p)? {
                commands.push(CommandJson {
                    op: Some(Op::Hasse),
                    p: Some(p),
                    f: Some(f.to_vec()),
                    ..Default::default()
                });
            }
            (FieldJson { p, r: 1 }, None)
        }
        other => {
            return Err(schema(format!(
                "unknown generator {other:?}; expected one of {GENERATORS:?}"
            )))
        }
    };
    Ok(ProblemFile {
        schema: SCHEMA_VERSION,
        field,
        ring,
        objects,
        commands,
    })
}
