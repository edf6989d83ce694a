//! One function per subcommand, each turning a resolved document into a
//! [`Report`].

use alexsheaf::sheaf::{AxiomKind, AxiomReport, VerifyOptions};
use alexsheaf::{CellularSheaf, OpenSet, Poset, PreOrder};
use serde_json::{json, Value};

use crate::document::Spanned;
use crate::error::CliError;
use crate::model::Model;
use crate::normalize::normalize;
use crate::report::{matrix_json, matrix_text, vector_json, vector_text, witness_json, Report};

/// Settings shared by every command.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub max_elements: usize,
}

impl Settings {
    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            seed: self.seed,
            max_elements: self.max_elements,
            ..VerifyOptions::default()
        }
    }
}

/// Records a failed check with its witness, or passes input errors through.
fn record(report: &mut Report, err: CliError) -> Result<(), CliError> {
    match err {
        CliError::Failed { context, source } => {
            report.check(context.clone(), false, source.to_string());
            let witnesses = report
                .data
                .as_object_mut()
                .expect("data is an object")
                .entry("witnesses")
                .or_insert_with(|| json!([]));
            witnesses
                .as_array_mut()
                .expect("witnesses is an array")
                .push(json!({"check": context, "witness": witness_json(&source)}));
            Ok(())
        }
        other => Err(other),
    }
}

fn names(order: &PreOrder, members: &[usize]) -> Vec<String> {
    members.iter().map(|&x| order.name(x).to_string()).collect()
}

fn open_text(order: &PreOrder, open: &OpenSet) -> String {
    open.describe(order)
}

fn pairs_json(order: &PreOrder, pairs: &[(usize, usize)]) -> Value {
    Value::Array(
        pairs
            .iter()
            .map(|&(a, b)| json!([order.name(a), order.name(b)]))
            .collect(),
    )
}

fn summarize_axioms(
    report: &mut Report,
    sheaf_name: &str,
    kind: AxiomKind,
    result: &AxiomReport,
    order: &PreOrder,
) {
    let label = match kind {
        AxiomKind::Basic => "basic covers",
        AxiomKind::Extended => "random covers",
    };
    let total = result.checks.len();
    match result.failures().next() {
        None => report.check(
            format!("sheaf {sheaf_name}: {label}"),
            true,
            format!("{total} gluing sequences exact"),
        ),
        Some(f) => {
            let cover: Vec<String> = f.cover.iter().map(|u| open_text(order, u)).collect();
            let what = if f.injective {
                "not exact in the middle"
            } else {
                "restriction not injective"
            };
            report.check(
                format!("sheaf {sheaf_name}: {label}"),
                false,
                format!(
                    "{} of {total} sequences fail; first: {what} for {} covered by {}",
                    result.failures().count(),
                    open_text(order, &f.open),
                    cover.join(" ")
                ),
            );
        }
    }
}

pub fn check(model: &Model, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("check", settings.seed);
    let order = &model.order;
    report.check("parse", true, format!("{} elements", order.len()));
    let poset = match model.poset() {
        Ok(p) => {
            report.check(
                "poset",
                true,
                format!("antisymmetric, {} Hasse edges", p.hasse_edges().len()),
            );
            p
        }
        Err(e) => {
            record(&mut report, e)?;
            report.set("normalized_document", Value::String(normalize(model)?));
            return Ok(report);
        }
    };
    report.set("elements", json!(order.names()));
    report.set("hasse", pairs_json(order, &poset.hasse_edges()));

    for block in &model.doc.opens {
        match model.named_open(block) {
            Ok(u) => report.check(
                format!("open {}", block.name.value),
                true,
                open_text(order, &u),
            ),
            Err(e) => record(&mut report, e)?,
        }
    }

    let opts = settings.verify_options();
    let mut sheaves = Vec::new();
    let mut sheaf_data = Vec::new();
    for block in &model.doc.sheaves {
        let name = &block.name.value;
        let sheaf = match model.sheaf(&poset, block) {
            Ok(s) => s,
            Err(e) => {
                record(&mut report, e)?;
                continue;
            }
        };
        report.check(
            format!("sheaf {name}: functoriality"),
            true,
            "restrictions compose independently of the path",
        );
        let base = sheaf
            .verify_base_sheaf_axioms(&opts)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        summarize_axioms(&mut report, name, AxiomKind::Basic, &base, order);
        let extended = sheaf
            .verify_sheaf_axioms_extended(&opts)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        summarize_axioms(&mut report, name, AxiomKind::Extended, &extended, order);
        let mut stalks_ok = true;
        for p in 0..poset.len() {
            let s = sheaf
                .stalk_at(p, settings.max_elements)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            stalks_ok &= s.holds();
        }
        report.check(
            format!("sheaf {name}: stalks"),
            stalks_ok,
            if stalks_ok {
                "direct limit at every point matches the value there".to_string()
            } else {
                "some direct limit differs from the value at its point".to_string()
            },
        );
        sheaf_data.push(json!({
            "name": name,
            "dims": sheaf.dims(),
            "basic_checks": base.checks.len(),
            "extended_checks": extended.checks.len(),
        }));
        sheaves.push((name.clone(), sheaf));
    }
    report.set("sheaves", Value::Array(sheaf_data));

    for block in &model.doc.morphisms {
        match model.morphism(&poset, block) {
            Ok(_) => report.check(
                format!("morphism {}", block.name.value),
                true,
                "components commute with restrictions",
            ),
            Err(e) => record(&mut report, e)?,
        }
    }
    for block in &model.doc.sections {
        let sheaf_block = model.section_sheaf_block(block)?;
        let Some((_, sheaf)) = sheaves.iter().find(|(n, _)| *n == sheaf_block.name.value) else {
            report.check(
                format!("section {}", block.name.value),
                false,
                format!("sheaf `{}` is invalid", sheaf_block.name.value),
            );
            continue;
        };
        match model.section(sheaf, block) {
            Ok(s) => report.check(
                format!("section {}", block.name.value),
                true,
                format!("compatible over {}", open_text(order, s.open())),
            ),
            Err(e) => record(&mut report, e)?,
        }
    }
    report.set("normalized_document", Value::String(normalize(model)?));
    Ok(report)
}

fn chosen_sheaf(
    model: &Model,
    name: Option<&str>,
) -> Result<(Poset, CellularSheaf, String), CliError> {
    let poset = model.poset()?;
    let block = model.sheaf_block(name)?;
    let sheaf = model.sheaf(&poset, block)?;
    Ok((poset, sheaf, block.name.value.clone()))
}

pub fn sections(
    model: &Model,
    settings: &Settings,
    open: &str,
    sheaf: Option<&str>,
) -> Result<Report, CliError> {
    let mut report = Report::new("sections", settings.seed);
    let (_, sheaf, name) = chosen_sheaf(model, sheaf)?;
    let order = &model.order;
    let open = model.open_spec(&Spanned::new(open.to_string(), 0, 0))?;
    report.check("open", true, open_text(order, &open));
    let space = sheaf
        .sections_over(&open)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    report.check("sections", true, format!("dimension {}", space.dim()));
    report.line(format!("sheaf {name} over {}", open_text(order, &open)));
    report.line(format!("dim = {}", space.dim()));
    let mut basis_json = Vec::new();
    for (i, s) in sheaf.basis_sections(&space).iter().enumerate() {
        let parts: Vec<String> = open
            .members()
            .iter()
            .zip(s.components())
            .map(|(&p, v)| format!("{}={}", order.name(p), vector_text(v)))
            .collect();
        report.line(format!("s{} = {}", i + 1, parts.join(" ")));
        basis_json.push(Value::Array(
            open.members()
                .iter()
                .zip(s.components())
                .map(|(&p, v)| json!({"element": order.name(p), "value": vector_json(v)}))
                .collect(),
        ));
    }
    report.line(format!(
        "rref basis = {}",
        matrix_text(&space.basis().as_matrix())
    ));
    report.set("sheaf", json!(name));
    report.set("open", json!(names(order, open.members())));
    report.set("dim", json!(space.dim()));
    report.set("basis", Value::Array(basis_json));
    report.set("rref_basis", matrix_json(&space.basis().as_matrix()));
    Ok(report)
}

pub fn stalk(
    model: &Model,
    settings: &Settings,
    point: Option<&str>,
    sheaf: Option<&str>,
) -> Result<Report, CliError> {
    let mut report = Report::new("stalk", settings.seed);
    let (poset, sheaf, name) = chosen_sheaf(model, sheaf)?;
    let points: Vec<usize> = match point {
        Some(p) => vec![poset
            .index_of(p)
            .map_err(|_| CliError::Usage(format!("unknown point `{p}`")))?],
        None => (0..poset.len()).collect(),
    };
    let mut rows = Vec::new();
    for p in points {
        let r = sheaf
            .stalk_at(p, settings.max_elements)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let opens = sheaf
            .stalk_oracle(p, settings.max_elements)
            .map_err(|e| CliError::Usage(e.to_string()))?
            .opens()
            .len();
        report.check(
            format!("stalk at {}", poset.name(p)),
            r.holds(),
            format!(
                "value dim {}, direct limit dim {} over {opens} opens, germ map {}",
                r.theorem_dim,
                r.oracle_dim,
                if r.iso_witness.is_invertible() {
                    "invertible"
                } else {
                    "not invertible"
                }
            ),
        );
        report.line(format!(
            "{}: dim G = {}, dim limit = {}, witness = {}",
            poset.name(p),
            r.theorem_dim,
            r.oracle_dim,
            matrix_text(&r.iso_witness)
        ));
        rows.push(json!({
            "point": poset.name(p),
            "theorem_dim": r.theorem_dim,
            "oracle_dim": r.oracle_dim,
            "opens_containing_point": opens,
            "iso_witness": matrix_json(&r.iso_witness),
        }));
    }
    report.set("sheaf", json!(name));
    report.set("stalks", Value::Array(rows));
    Ok(report)
}

pub fn quotient(model: &Model, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("quotient", settings.seed);
    let order = &model.order;
    let q = order.quotient();
    let classes: Vec<Vec<String>> = q.classes.iter().map(|c| names(order, c)).collect();
    report.check(
        "quotient",
        q.quotient.is_poset(),
        format!("{} classes from {} elements", q.classes.len(), order.len()),
    );
    report.check("projection", q.projection.is_monotone(), "order-preserving");
    let singletons = q.classes.iter().all(|c| c.len() == 1);
    for c in &classes {
        report.line(format!("[{}] = {{{}}}", c[0], c.join(", ")));
    }
    let hasse = q.quotient.hasse_edges();
    let edges: Vec<String> = hasse
        .iter()
        .map(|&(a, b)| format!("{}<{}", q.quotient.name(a), q.quotient.name(b)))
        .collect();
    report.line(format!("hasse = {}", edges.join(" ")));
    report.set("classes", json!(classes));
    report.set("all_singletons", json!(singletons));
    report.set("elements", json!(q.quotient.names()));
    report.set("hasse", pairs_json(q.quotient.as_preorder(), &hasse));
    Ok(report)
}

pub fn morphism(
    model: &Model,
    settings: &Settings,
    name: Option<&str>,
) -> Result<Report, CliError> {
    let mut report = Report::new("morphism", settings.seed);
    let poset = model.poset()?;
    let block = model.morphism_block(name)?;
    let m = model.morphism(&poset, block)?;
    let name = &block.name.value;
    report.check(
        format!("morphism {name}: naturality"),
        true,
        "components commute with restrictions",
    );
    let c = m.classify();
    let level = m
        .section_level(settings.max_elements)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let agree = c.isomorphism == level.all_invertible && c.injective == level.all_injective;
    report.check(
        format!("morphism {name}: stalks vs sections"),
        agree,
        format!(
            "stalkwise flags agree with the maps on all {} opens",
            level.opens_checked
        ),
    );
    report.line(format!("injective: {}", c.injective));
    report.line(format!("surjective: {}", c.surjective));
    report.line(format!("isomorphism: {}", c.isomorphism));
    for p in 0..poset.len() {
        report.line(format!(
            "component {} = {}",
            poset.name(p),
            matrix_text(m.component(p))
        ));
    }
    report.set("name", json!(name));
    report.set("injective", json!(c.injective));
    report.set("surjective", json!(c.surjective));
    report.set("isomorphism", json!(c.isomorphism));
    report.set(
        "sections",
        json!({
            "opens_checked": level.opens_checked,
            "all_injective": level.all_injective,
            "all_surjective": level.all_surjective,
            "all_invertible": level.all_invertible,
        }),
    );
    Ok(report)
}

pub fn glue(
    model: &Model,
    settings: &Settings,
    section_names: &[String],
) -> Result<Report, CliError> {
    let mut report = Report::new("glue", settings.seed);
    if section_names.is_empty() {
        return Err(CliError::Usage(
            "--sections needs at least one section name".into(),
        ));
    }
    let poset = model.poset()?;
    let blocks = section_names
        .iter()
        .map(|n| model.section_block(n))
        .collect::<Result<Vec<_>, CliError>>()?;
    let sheaf_block = model.section_sheaf_block(blocks[0])?;
    for b in &blocks[1..] {
        if model.section_sheaf_block(b)?.name.value != sheaf_block.name.value {
            return Err(CliError::Usage(format!(
                "sections `{}` and `{}` belong to different sheaves",
                blocks[0].name.value, b.name.value
            )));
        }
    }
    let sheaf = model.sheaf(&poset, sheaf_block)?;
    let order = &model.order;
    let mut locals = Vec::new();
    for b in &blocks {
        let s = model.section(&sheaf, b)?;
        report.check(
            format!("section {}", b.name.value),
            true,
            format!("compatible over {}", open_text(order, s.open())),
        );
        locals.push(s);
    }
    let cover: Vec<OpenSet> = locals.iter().map(|s| s.open().clone()).collect();
    match sheaf.glue(&cover, &locals) {
        Ok(glued) => {
            report.check(
                "glue",
                true,
                format!("unique section over {}", open_text(order, glued.open())),
            );
            let parts: Vec<String> = glued
                .open()
                .members()
                .iter()
                .zip(glued.components())
                .map(|(&p, v)| format!("{}={}", order.name(p), vector_text(v)))
                .collect();
            report.line(format!("glued = {}", parts.join(" ")));
            report.set("open", json!(names(order, glued.open().members())));
            report.set(
                "section",
                Value::Array(
                    glued
                        .open()
                        .members()
                        .iter()
                        .zip(glued.components())
                        .map(|(&p, v)| json!({"element": order.name(p), "value": vector_json(v)}))
                        .collect(),
                ),
            );
        }
        Err(e) => record(&mut report, CliError::failed("glue", e))?,
    }
    Ok(report)
}

pub fn opens(model: &Model, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new("opens", settings.seed);
    let order = &model.order;
    let all = order
        .enumerate_opens(settings.max_elements)
        .map_err(|e| CliError::Usage(format!("{e}; raise --max-elements")))?;
    report.check("opens", true, format!("{} open sets", all.len()));
    for u in &all {
        report.line(open_text(order, u));
    }
    report.set(
        "opens",
        Value::Array(
            all.iter()
                .map(|u| json!(names(order, u.members())))
                .collect(),
        ),
    );
    Ok(report)
}

/// Converts a failed check raised while building the inputs of a command
/// into a report, so that the witness is printed with exit code 1.
pub fn failure_report(
    command: &str,
    settings: &Settings,
    err: CliError,
) -> Result<Report, CliError> {
    let mut report = Report::new(command, settings.seed);
    record(&mut report, err)?;
    Ok(report)
}
