//! Canonical text form of a document: fixed block order, elements in
//! declaration order, Hasse edges instead of arbitrary relation pairs,
//! canonical scalar literals. Parsing it gives back equal objects.

use std::fmt::Write;

use crate::error::CliError;
use crate::model::Model;
use crate::report::{matrix_text, vector_text};

pub fn normalize(model: &Model) -> Result<String, CliError> {
    let order = &model.order;
    let mut out = String::new();
    writeln!(out, "[settings]\nfield = {}\n", model.field).unwrap();

    writeln!(out, "[poset]\nelements = {}", order.names().join(" ")).unwrap();
    let poset = model.poset().ok();
    let pairs: Vec<(usize, usize)> = match &poset {
        Some(p) => p.hasse_edges(),
        None => order
            .relation_pairs()
            .into_iter()
            .filter(|(a, b)| a != b)
            .collect(),
    };
    if !pairs.is_empty() {
        let key = if poset.is_some() {
            "hasse"
        } else {
            "relations"
        };
        let text: Vec<String> = pairs
            .iter()
            .map(|&(a, b)| format!("{}<{}", order.name(a), order.name(b)))
            .collect();
        writeln!(out, "{key} = {}", text.join(" ")).unwrap();
    }

    if let Some(poset) = &poset {
        for block in &model.doc.sheaves {
            writeln!(out, "\n[sheaf {}]", block.name.value).unwrap();
            let dims = model.dims(block)?;
            for (i, d) in dims.iter().enumerate() {
                writeln!(out, "dim {} = {d}", order.name(i)).unwrap();
            }
            for ((p, q), m) in model.edge_maps(poset, block, &dims)? {
                writeln!(
                    out,
                    "map {} {} = {}",
                    order.name(p),
                    order.name(q),
                    matrix_text(&m)
                )
                .unwrap();
            }
        }
        for block in &model.doc.morphisms {
            writeln!(out, "\n[morphism {}]", block.name.value).unwrap();
            let find = |name: &Option<crate::document::Spanned<String>>| {
                name.as_ref()
                    .and_then(|n| model.doc.sheaves.iter().find(|s| s.name.value == n.value))
            };
            let (Some(src), Some(tgt)) = (find(&block.source), find(&block.target)) else {
                return Err(block.name.error(format!(
                    "morphism `{}` needs known `source` and `target` sheaves",
                    block.name.value
                )));
            };
            writeln!(
                out,
                "source = {}\ntarget = {}",
                src.name.value, tgt.name.value
            )
            .unwrap();
            let (ds, dt) = (model.dims(src)?, model.dims(tgt)?);
            for (x, lit) in &block.components {
                let p = model.element(x)?;
                let m = model.matrix(lit, dt[p], ds[p])?;
                writeln!(out, "component {} = {}", x.value, matrix_text(&m)).unwrap();
            }
        }
    }

    for block in &model.doc.opens {
        let mut members = model.open_block_set(block)?;
        members.sort_unstable();
        members.dedup();
        let names: Vec<&str> = members.iter().map(|&x| order.name(x)).collect();
        writeln!(
            out,
            "\n[open {}]\nmembers = {}",
            block.name.value,
            names.join(" ")
        )
        .unwrap();
    }

    if poset.is_some() {
        for block in &model.doc.sections {
            writeln!(out, "\n[section {}]", block.name.value).unwrap();
            let sheaf_block = model.section_sheaf_block(block)?;
            writeln!(out, "sheaf = {}", sheaf_block.name.value).unwrap();
            if let Some(spec) = &block.open {
                let text = match model.open_spec(spec) {
                    Ok(open) => open
                        .members()
                        .iter()
                        .map(|&x| order.name(x))
                        .collect::<Vec<_>>()
                        .join(" "),
                    Err(_) => spec.value.clone(),
                };
                writeln!(out, "open = {text}").unwrap();
            }
            let dims = model.dims(sheaf_block)?;
            for (x, lit) in &block.values {
                let p = model.element(x)?;
                let m = model.matrix(lit, usize::from(dims[p] > 0), dims[p])?;
                let v = if dims[p] == 0 {
                    Vec::new()
                } else {
                    m.row(0).to_vec()
                };
                writeln!(out, "value {} = {}", x.value, vector_text(&v)).unwrap();
            }
        }
    }
    Ok(out)
}
