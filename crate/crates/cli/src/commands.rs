//! Command implementations. Each returns the text to print and an exit code;
//! `main` only parses arguments and writes the output.

use std::fmt::Write as _;

use gprox::equivariant::{
    beta_g_proximity, check_equinormal, compute_ug, is_massive, massiveness, nu_proximity,
};
use gprox::gaction::{GActionGerm, Property};
use gprox::proximity::{check_axioms, from_uniformity, Prox, ProxAxiom, ProxReport};
use gprox::rationals::{
    build_tower, check_ordcomp_claim, decide_far, Chain, ClaimVerdict, FarVerdict, RatSet,
};
use gprox::setrel::{CarrierRef, Rel, Subset};
use gprox::uniformity::UnifBase;
use gprox::Error;
use itertools::Itertools;
use serde_json::{json, Value};

use crate::doc::{Instance, LoadError};
use crate::suite::{self, SuiteOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Output {
        Output {
            text,
            code: EXIT_OK,
        }
    }

    fn json(value: Value, passed: bool) -> Output {
        Output {
            text: serde_json::to_string(&value).expect("serializable") + "\n",
            code: if passed { EXIT_OK } else { EXIT_FAILED },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdError {
    pub code: i32,
    pub message: String,
}

impl CmdError {
    pub fn input(message: impl Into<String>) -> CmdError {
        CmdError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> CmdError {
        let code = match e {
            Error::ResourceCap { .. } => EXIT_CAP,
            Error::Invalid { .. } | Error::CarrierMismatch(_) => EXIT_INPUT,
            Error::Precondition { .. } | Error::Internal { .. } => EXIT_FAILED,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LoadError> for CmdError {
    fn from(e: LoadError) -> CmdError {
        CmdError {
            code: if e.cap_exceeded { EXIT_CAP } else { EXIT_INPUT },
            message: e.to_string(),
        }
    }
}

pub type CmdResult = Result<Output, CmdError>;

fn names(carrier: &CarrierRef, s: Subset) -> Vec<String> {
    s.iter().map(|x| carrier.name(x).to_string()).collect()
}

fn rel_json(r: &Rel) -> Value {
    let c = r.carrier();
    Value::Array(
        r.pairs()
            .map(|(x, y)| json!([c.name(x), c.name(y)]))
            .collect(),
    )
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

// ----- validate -----

pub fn validate(inst: &Instance, require: &[Property], as_json: bool) -> CmdResult {
    let germ = &inst.germ;
    let u = inst.unif();
    let basis = u.validate_basis();
    let mut failed: Vec<String> = basis
        .failures()
        .map(|(a, w)| format!("basis axiom {a} at {w}"))
        .collect();

    let mut text = String::new();
    writeln!(
        text,
        "instance: {} points, group of order {}, chain of {} level(s), basis of {} entourage(s)",
        inst.carrier.len(),
        germ.group().order(),
        germ.levels().len(),
        u.basis().len()
    )
    .unwrap();
    writeln!(
        text,
        "chain: {}",
        germ.levels()
            .iter()
            .map(|v| germ.group().format_set(*v))
            .join(" > ")
    )
    .unwrap();
    write!(text, "basis:\n{}", indent(&basis.to_string())).unwrap();

    let mut doc = json!({
        "schema": SCHEMA,
        "command": "validate",
        "points": inst.carrier.len(),
        "group_order": germ.group().order(),
        "basis": basis.iter().map(|(a, v)| (a.to_string(), json!(v.passed()))).collect::<serde_json::Map<_, _>>(),
    });

    if basis.all_pass() {
        let p = from_uniformity(&u)?;
        let axioms = check_axioms(&p)?;
        write!(
            text,
            "proximity axioms:\n{}",
            axiom_lines(&axioms, &inst.carrier)
        )
        .unwrap();
        failed.extend(
            axioms
                .failures()
                .filter(|(a, _)| ProxAxiom::PROXIMITY.contains(a))
                .map(|(a, w)| format!("{a} at {}", w.describe(&inst.carrier))),
        );
        doc["axioms"] = axioms
            .iter()
            .map(|(a, v)| (a.to_string(), json!(v.passed())))
            .collect();

        let classes = germ.classify(&u);
        writeln!(text, "classification:").unwrap();
        let mut props = serde_json::Map::new();
        for prop in Property::ALL {
            let line = match classes.witness(prop) {
                None => format!("{prop}: yes"),
                Some(w) => format!("{prop}: no ({})", w.describe(germ)),
            };
            writeln!(text, "  {line}").unwrap();
            props.insert(prop.to_string(), json!(classes.passes(prop)));
            if require.contains(&prop) && !classes.passes(prop) {
                failed.push(format!("required property {prop} fails"));
            }
        }
        doc["properties"] = Value::Object(props);

        if let Some(order) = &inst.order {
            let report = gprox::ordered::check_ordered_proximity(order, &p);
            let verdict = match (report.op1, report.op2) {
                (None, None) => "ordered".to_string(),
                (Some((x, y)), _) => format!(
                    "not ordered: (-inf,{}] is near [{},inf)",
                    inst.carrier.name(x),
                    inst.carrier.name(y)
                ),
                (None, Some((a, b))) => format!(
                    "not ordered: {} far {} but not covered by convex sets avoiding the latter",
                    inst.carrier.format_subset(a),
                    inst.carrier.format_subset(b)
                ),
            };
            writeln!(text, "order: {verdict}").unwrap();
            doc["ordered"] = json!(report.is_ordered());
            if !report.is_ordered() {
                failed.push(format!("order: {verdict}"));
            }
        }
    } else if !require.is_empty() {
        failed.push("properties not evaluated on an invalid basis".into());
    }
    if let Some(m) = &inst.metric {
        writeln!(
            text,
            "metric: {}",
            if m.pseudometric().is_metric() {
                "metric"
            } else {
                "pseudometric"
            }
        )
        .unwrap();
    }

    doc["failures"] = json!(failed);
    if as_json {
        return Ok(Output::json(doc, failed.is_empty()));
    }
    if failed.is_empty() {
        text.push_str("result: all checks pass\n");
        Ok(Output::ok(text))
    } else {
        for f in &failed {
            writeln!(text, "FAIL: {f}").unwrap();
        }
        Ok(Output {
            text,
            code: EXIT_FAILED,
        })
    }
}

fn axiom_lines(report: &ProxReport, carrier: &CarrierRef) -> String {
    report
        .iter()
        .map(|(a, v)| match v.witness() {
            None => format!("  {a}: pass\n"),
            Some(w) => format!("  {a}: FAIL ({})\n", w.describe(carrier)),
        })
        .collect()
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("  {l}\n")).collect()
}

// ----- ug, nu, betag, equinormal, massive -----

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum What {
    Ug,
    Nu,
    Betag,
    Equinormal,
    Massive,
}

impl What {
    fn name(self) -> &'static str {
        match self {
            What::Ug => "ug",
            What::Nu => "nu",
            What::Betag => "betag",
            What::Equinormal => "equinormal",
            What::Massive => "massive",
        }
    }
}

pub fn compute(
    inst: &Instance,
    what: What,
    sets: Option<(&str, &str)>,
    as_json: bool,
) -> CmdResult {
    if sets.is_some() && matches!(what, What::Equinormal | What::Massive) {
        return Err(CmdError::input(format!(
            "--sets does not apply to {}",
            what.name()
        )));
    }
    let sets = sets
        .map(|(a, b)| {
            Ok::<_, CmdError>((
                inst.subset(a).map_err(CmdError::input)?,
                inst.subset(b).map_err(CmdError::input)?,
            ))
        })
        .transpose()?;
    let germ = &inst.germ;
    let u = inst.unif();
    match what {
        What::Ug => {
            let ug = compute_ug(germ, &u)?;
            match sets {
                Some((a, b)) => {
                    let miss = ug.basis().iter().position(|e| !e.meets_product(a, b));
                    let detail = miss.map(|i| format!("entourage #{i} misses A x B"));
                    verdict_output(inst, what, a, b, miss.is_none(), detail, as_json)
                }
                None if as_json => Ok(Output::json(
                    json!({
                        "schema": SCHEMA,
                        "command": "ug",
                        "basis": ug.basis().iter().map(rel_json).collect::<Vec<_>>(),
                    }),
                    true,
                )),
                None => {
                    let mut text = format!("U^G basis of {} entourage(s):\n", ug.basis().len());
                    for (i, e) in ug.basis().iter().enumerate() {
                        writeln!(text, "  #{i} {e}").unwrap();
                    }
                    Ok(Output::ok(text))
                }
            }
        }
        What::Nu | What::Betag => {
            let p = if what == What::Nu {
                nu_proximity(germ, &u)?
            } else {
                beta_g_proximity(germ)?
            };
            match sets {
                Some((a, b)) => {
                    let detail = far_level(germ, &u, what, a, b);
                    verdict_output(inst, what, a, b, p.near(a, b), detail, as_json)
                }
                None => Ok(proximity_output(what.name(), &p, as_json)),
            }
        }
        What::Equinormal => {
            let report = check_equinormal(germ)?;
            let unseparated = report
                .unseparated
                .map(|(a, b)| (inst.carrier.format_subset(a), inst.carrier.format_subset(b)));
            let ok = report.is_equinormal();
            if as_json {
                return Ok(Output::json(
                    json!({
                        "schema": SCHEMA,
                        "command": "equinormal",
                        "equinormal": ok,
                        "axioms": report.axioms.iter().map(|(a, v)| (a.to_string(), json!(v.passed()))).collect::<serde_json::Map<_, _>>(),
                        "unseparated": unseparated.as_ref().map(|(a, b)| json!([a, b])),
                    }),
                    ok,
                ));
            }
            let mut text = format!(
                "beta_G axioms:\n{}",
                axiom_lines(&report.axioms, &inst.carrier)
            );
            if let Some((a, b)) = &unseparated {
                writeln!(text, "unseparated pair: {a} and {b}").unwrap();
            }
            writeln!(text, "equinormal: {}", yes(ok)).unwrap();
            Ok(Output {
                text,
                code: if ok { EXIT_OK } else { EXIT_FAILED },
            })
        }
        What::Massive => {
            let ok = is_massive(germ, &u)?;
            let nets = massiveness(germ, &u)?;
            let sizes = nets.net_sizes();
            if as_json {
                return Ok(Output::json(
                    json!({"schema": SCHEMA, "command": "massive", "massive": ok, "net_sizes": sizes}),
                    ok,
                ));
            }
            let text = format!(
                "net sizes per U^G entourage: {}\nmassive: {}\n",
                sizes.iter().join(" "),
                yes(ok)
            );
            Ok(Output {
                text,
                code: if ok { EXIT_OK } else { EXIT_FAILED },
            })
        }
    }
}

/// For a pair far in `ν` or `β_G`, the least chain level at which the
/// translates are far, with the translates.
fn far_level(germ: &GActionGerm, u: &UnifBase, what: What, a: Subset, b: Subset) -> Option<String> {
    let delta = from_uniformity(u).ok()?;
    let c = germ.carrier();
    germ.levels().iter().enumerate().find_map(|(i, v)| {
        let (va, vb) = (germ.translate_set(*v, a), germ.translate_set(*v, b));
        let far = if what == What::Nu {
            delta.far(va, vb)
        } else {
            !va.meets(vb)
        };
        far.then(|| {
            format!(
                "level {i} V={}: V.A={} V.B={}",
                germ.group().format_set(*v),
                c.format_subset(va),
                c.format_subset(vb)
            )
        })
    })
}

fn verdict_output(
    inst: &Instance,
    what: What,
    a: Subset,
    b: Subset,
    near: bool,
    detail: Option<String>,
    as_json: bool,
) -> CmdResult {
    let c = &inst.carrier;
    if as_json {
        return Ok(Output::json(
            json!({
                "schema": SCHEMA,
                "command": what.name(),
                "a": names(c, a),
                "b": names(c, b),
                "near": near,
                "witness": if near { None } else { detail },
            }),
            true,
        ));
    }
    Ok(Output::ok(match (near, detail) {
        (true, _) => "near\n".to_string(),
        (false, Some(d)) => format!("far, witness {d}\n"),
        (false, None) => "far\n".to_string(),
    }))
}

/// Far pairs of nonempty sets that are maximal under inclusion. Under P4
/// these determine the whole table.
pub fn maximal_far_pairs(p: &Prox) -> Vec<(Subset, Subset)> {
    let c = p.carrier();
    let n = c.len();
    c.subsets()
        .skip(1)
        .flat_map(|a| c.subsets().skip(1).map(move |b| (a, b)))
        .filter(|&(a, b)| p.far(a, b))
        .filter(|&(a, b)| {
            (0..n).all(|x| {
                (a.contains(x) || p.near(a.with(x), b)) && (b.contains(x) || p.near(a, b.with(x)))
            })
        })
        .collect()
}

fn proximity_output(command: &str, p: &Prox, as_json: bool) -> Output {
    let c = p.carrier();
    let maximal = maximal_far_pairs(p);
    let total = c.subset_count() * c.subset_count();
    if as_json {
        return Output::json(
            json!({
                "schema": SCHEMA,
                "command": command,
                "near_pairs": p.near_pair_count(),
                "total_pairs": total,
                "maximal_far_pairs": maximal.iter().map(|&(a, b)| json!([names(c, a), names(c, b)])).collect::<Vec<_>>(),
            }),
            true,
        );
    }
    let mut text = format!("near pairs: {} of {}\n", p.near_pair_count(), total);
    writeln!(text, "maximal far pairs: {}", maximal.len()).unwrap();
    for (a, b) in maximal {
        writeln!(text, "  {} far {}", c.format_subset(a), c.format_subset(b)).unwrap();
    }
    Output::ok(text)
}

// ----- rat -----

fn parse_set(s: &str) -> Result<RatSet, CmdError> {
    RatSet::parse(s).map_err(|e| CmdError::input(format!("`{s}`: {e}")))
}

pub fn rat_far(a: &str, b: &str, as_json: bool) -> CmdResult {
    let (sa, sb) = (parse_set(a)?, parse_set(b)?);
    let verdict = decide_far(&sa, &sb);
    let witness = match &verdict {
        FarVerdict::Far(f) => Some(f.to_string()),
        FarVerdict::Near => None,
    };
    if as_json {
        return Ok(Output::json(
            json!({
                "schema": SCHEMA,
                "command": "rat far",
                "a": sa.to_string(),
                "b": sb.to_string(),
                "far": witness.is_some(),
                "witness": witness,
            }),
            true,
        ));
    }
    Ok(Output::ok(match witness {
        Some(f) => format!("far, witness F={f}\n"),
        None => "near\n".to_string(),
    }))
}

pub fn rat_tower(chains: &[String]) -> Result<(gprox::rationals::Tower, String), CmdError> {
    let parsed = chains
        .iter()
        .map(|s| Chain::parse(s).map_err(|e| CmdError::input(format!("`{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let tower = build_tower(&parsed);
    let report = tower.validate();
    if !report.holds() {
        return Err(CmdError {
            code: EXIT_FAILED,
            message: format!("tower fails validation: {report:?}"),
        });
    }
    let dot = tower.to_dot();
    Ok((tower, dot))
}

/// Summary printed when the DOT text goes to a file.
pub fn tower_summary(tower: &gprox::rationals::Tower) -> String {
    let cells = tower.levels().iter().map(|l| l.len()).join("+");
    format!("levels: {}, cells: {}\n", tower.levels().len(), cells)
}

pub fn rat_claim(a: &str, o: &str, as_json: bool) -> CmdResult {
    let (sa, so) = (parse_set(a)?, parse_set(o)?);
    let verdict = check_ordcomp_claim(&sa, &so).map_err(|e| match e {
        Error::Precondition { .. } => CmdError::input(e.to_string()),
        other => other.into(),
    })?;
    let (witness, code) = match &verdict {
        ClaimVerdict::Witness(f) => (Some(f.to_string()), EXIT_OK),
        ClaimVerdict::Alarm => (None, EXIT_FAILED),
    };
    if as_json {
        let mut out = Output::json(
            json!({
                "schema": SCHEMA,
                "command": "rat claim",
                "a": sa.to_string(),
                "o": so.to_string(),
                "witness": witness,
                "alarm": witness.is_none(),
            }),
            true,
        );
        out.code = code;
        return Ok(out);
    }
    let text = match witness {
        Some(f) => format!("witness F={f}\n"),
        None => format!(
            "ALARM: no chain F over the endpoints gives St_F.A inside O for A={sa}, O={so}\n"
        ),
    };
    Ok(Output { text, code })
}

// ----- suite -----

pub fn run_suite(opts: &SuiteOptions, as_json: bool) -> CmdResult {
    if opts.max_n > 12 {
        return Err(Error::ResourceCap {
            what: "suite carrier size",
            size: opts.max_n,
            cap: 12,
        }
        .into());
    }
    let results = suite::run(opts);
    if results.is_empty() {
        return Err(CmdError::input(format!(
            "no invariant matches the filter `{}`",
            opts.filter.as_deref().unwrap_or_default()
        )));
    }
    let passed = results.iter().all(|r| r.passed());
    if as_json {
        return Ok(Output::json(
            json!({
                "schema": SCHEMA,
                "command": "suite",
                "options": {
                    "max_n": opts.max_n,
                    "max_group": opts.max_group,
                    "seed": opts.seed,
                    "filter": opts.filter,
                    "mutation": opts.mutation.map(|m| m.name()),
                },
                "invariants": results.iter().map(|r| json!({
                    "name": r.name,
                    "criterion": r.criterion,
                    "instances": r.instances,
                    "failures": r.failures,
                    "first_failure": r.first_failure,
                    "passed": r.passed(),
                })).collect::<Vec<_>>(),
                "passed": passed,
            }),
            passed,
        ));
    }
    let mut text = format!(
        "suite: max_n={} max_group={} seed={}{}\n",
        opts.max_n,
        opts.max_group,
        opts.seed,
        opts.mutation
            .map(|m| format!(" mutation={}", m.name()))
            .unwrap_or_default()
    );
    for r in &results {
        writeln!(text, "{r}").unwrap();
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    if failed == 0 {
        writeln!(text, "all {} invariants pass", results.len()).unwrap();
    } else {
        writeln!(text, "{failed} of {} invariants fail", results.len()).unwrap();
    }
    Ok(Output {
        text,
        code: if passed { EXIT_OK } else { EXIT_FAILED },
    })
}
