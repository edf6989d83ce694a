//! Resolution of a parsed [`Document`] into library objects.
//!
//! Unknown names, malformed literals and wrongly shaped matrices are input
//! errors with a location; order, functoriality, naturality and openness
//! failures are reported as failed checks carrying the library's witness.

use std::collections::BTreeMap;

use alexsheaf::linalg::Matrix;
use alexsheaf::sheaf::Section;
use alexsheaf::{CellularSheaf, Field, OpenSet, Poset, PreOrder, Scalar, SheafMorphism};

use crate::document::{
    Document, MatrixLiteral, MorphismBlock, OpenBlock, SectionBlock, SheafBlock, Spanned,
};
use crate::error::CliError;

/// A document together with its field and the order it declares.
pub struct Model {
    pub doc: Document,
    pub field: Field,
    pub order: PreOrder,
}

fn parse_field(text: &str) -> Result<Field, String> {
    text.parse::<Field>()
        .map_err(|e| format!("invalid field `{text}` ({e}); expected `q` or `fp:<prime>`"))
}

impl Model {
    /// Resolves the field (an explicit override wins over `[settings]`) and
    /// the order relation.
    pub fn new(doc: Document, field_override: Option<Field>) -> Result<Self, CliError> {
        let field = match (field_override, &doc.field) {
            (Some(f), _) => f,
            (None, Some(f)) => parse_field(&f.value).map_err(|m| f.error(m))?,
            (None, None) => Field::Rationals,
        };
        let block = doc
            .poset
            .as_ref()
            .ok_or_else(|| CliError::Usage("document has no [poset] block".into()))?;
        let mut names: Vec<String> = Vec::new();
        for e in &block.elements {
            if names.contains(&e.value) {
                return Err(e.error(format!("element `{}` listed twice", e.value)));
            }
            names.push(e.value.clone());
        }
        let position = |s: &Spanned<String>| {
            names
                .iter()
                .position(|n| *n == s.value)
                .ok_or_else(|| s.error(format!("unknown element `{}`", s.value)))
        };
        let pairs = block
            .pairs
            .iter()
            .map(|(a, b)| Ok((position(a)?, position(b)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let order = PreOrder::from_indices(names, &pairs)
            .map_err(|e| CliError::parse(block.line, 1, e.to_string()))?;
        Ok(Model { doc, field, order })
    }

    pub fn element(&self, s: &Spanned<String>) -> Result<usize, CliError> {
        self.order
            .index_of(&s.value)
            .map_err(|_| s.error(format!("unknown element `{}`", s.value)))
    }

    /// The order as a poset; a cycle is a failed check.
    pub fn poset(&self) -> Result<Poset, CliError> {
        Poset::try_from(self.order.clone()).map_err(|e| CliError::failed("poset", e))
    }

    fn scalar(&self, entry: &Spanned<String>) -> Result<Scalar, CliError> {
        self.field
            .parse(&entry.value)
            .map_err(|e| entry.error(format!("{e} over {}", self.field)))
    }

    /// A matrix literal checked against the expected shape; `[]` stands for
    /// any matrix with no entries.
    pub fn matrix(
        &self,
        lit: &Spanned<MatrixLiteral>,
        rows: usize,
        cols: usize,
    ) -> Result<Matrix, CliError> {
        let found = (lit.value.len(), lit.value.first().map_or(0, Vec::len));
        let empty_ok = lit.value.is_empty() && rows * cols == 0;
        if found != (rows, cols) && !empty_ok {
            return Err(lit.error(format!(
                "expected a {rows}x{cols} matrix, found {}x{}",
                found.0, found.1
            )));
        }
        let entries = lit
            .value
            .iter()
            .map(|row| row.iter().map(|e| self.scalar(e)).collect())
            .collect::<Result<Vec<Vec<Scalar>>, CliError>>()?;
        if empty_ok {
            return Ok(Matrix::zeros(self.field, rows, cols));
        }
        Matrix::from_rows(self.field, rows, cols, entries).map_err(|e| lit.error(e.to_string()))
    }

    fn vector(&self, lit: &Spanned<MatrixLiteral>, len: usize) -> Result<Vec<Scalar>, CliError> {
        let m = self.matrix(lit, usize::from(len > 0), len).map_err(|_| {
            lit.error(format!(
                "expected a vector of length {len}, e.g. `[{}]`",
                vec!["0"; len].join(" ")
            ))
        })?;
        Ok(if len == 0 {
            Vec::new()
        } else {
            m.row(0).to_vec()
        })
    }

    pub fn sheaf_block(&self, name: Option<&str>) -> Result<&SheafBlock, CliError> {
        match name {
            Some(n) => self
                .doc
                .sheaves
                .iter()
                .find(|s| s.name.value == n)
                .ok_or_else(|| CliError::Usage(format!("no sheaf named `{n}`"))),
            None => match self.doc.sheaves.as_slice() {
                [only] => Ok(only),
                [] => Err(CliError::Usage("document has no [sheaf] block".into())),
                _ => Err(CliError::Usage(
                    "document has several sheaves; choose one with --sheaf".into(),
                )),
            },
        }
    }

    /// Stalk dimensions indexed by element.
    pub fn dims(&self, block: &SheafBlock) -> Result<Vec<usize>, CliError> {
        let mut dims: Vec<Option<usize>> = vec![None; self.order.len()];
        for (x, d) in &block.dims {
            let i = self.element(x)?;
            if dims[i].is_some() {
                return Err(x.error(format!("dimension of `{}` given twice", x.value)));
            }
            dims[i] = Some(d.value);
        }
        dims.into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| {
                    block.name.error(format!(
                        "sheaf `{}` has no `dim {} = ...`",
                        block.name.value,
                        self.order.name(i)
                    ))
                })
            })
            .collect()
    }

    /// Restriction matrices on Hasse edges, after shape checks. Maps into or
    /// out of a zero stalk may be omitted.
    pub(crate) fn edge_maps(
        &self,
        poset: &Poset,
        block: &SheafBlock,
        dims: &[usize],
    ) -> Result<BTreeMap<(usize, usize), Matrix>, CliError> {
        let mut maps = BTreeMap::new();
        for entry in &block.maps {
            let (p, q) = (self.element(&entry.from)?, self.element(&entry.to)?);
            if !poset.is_hasse_edge(p, q) {
                return Err(entry.from.error(format!(
                    "`{}` < `{}` is not a Hasse edge; give maps only for covering pairs",
                    entry.from.value, entry.to.value
                )));
            }
            if maps.contains_key(&(p, q)) {
                return Err(entry.from.error(format!(
                    "map `{}` `{}` given twice",
                    entry.from.value, entry.to.value
                )));
            }
            maps.insert((p, q), self.matrix(&entry.matrix, dims[q], dims[p])?);
        }
        for (p, q) in poset.hasse_edges() {
            if maps.contains_key(&(p, q)) {
                continue;
            }
            if dims[p] * dims[q] == 0 {
                maps.insert((p, q), Matrix::zeros(self.field, dims[q], dims[p]));
            } else {
                return Err(block.name.error(format!(
                    "sheaf `{}` has no `map {} {} = ...`",
                    block.name.value,
                    poset.name(p),
                    poset.name(q)
                )));
            }
        }
        Ok(maps)
    }

    pub fn sheaf(&self, poset: &Poset, block: &SheafBlock) -> Result<CellularSheaf, CliError> {
        let dims = self.dims(block)?;
        let maps = self.edge_maps(poset, block, &dims)?;
        CellularSheaf::new(poset.clone(), self.field, dims, maps)
            .map_err(|e| CliError::failed(format!("sheaf {}", block.name.value), e))
    }

    pub fn morphism_block(&self, name: Option<&str>) -> Result<&MorphismBlock, CliError> {
        match name {
            Some(n) => self
                .doc
                .morphisms
                .iter()
                .find(|m| m.name.value == n)
                .ok_or_else(|| CliError::Usage(format!("no morphism named `{n}`"))),
            None => match self.doc.morphisms.as_slice() {
                [only] => Ok(only),
                [] => Err(CliError::Usage("document has no [morphism] block".into())),
                _ => Err(CliError::Usage(
                    "document has several morphisms; choose one with --name".into(),
                )),
            },
        }
    }

    fn named_sheaf(
        &self,
        poset: &Poset,
        name: &Spanned<String>,
    ) -> Result<CellularSheaf, CliError> {
        let block = self
            .doc
            .sheaves
            .iter()
            .find(|s| s.name.value == name.value)
            .ok_or_else(|| name.error(format!("no sheaf named `{}`", name.value)))?;
        self.sheaf(poset, block)
    }

    pub fn morphism(
        &self,
        poset: &Poset,
        block: &MorphismBlock,
    ) -> Result<SheafMorphism, CliError> {
        let missing = |what: &str| {
            block.name.error(format!(
                "morphism `{}` has no `{what} = ...`",
                block.name.value
            ))
        };
        let source = self.named_sheaf(
            poset,
            block.source.as_ref().ok_or_else(|| missing("source"))?,
        )?;
        let target = self.named_sheaf(
            poset,
            block.target.as_ref().ok_or_else(|| missing("target"))?,
        )?;
        let mut components: Vec<Option<Matrix>> = vec![None; poset.len()];
        for (x, lit) in &block.components {
            let p = self.element(x)?;
            if components[p].is_some() {
                return Err(x.error(format!("component at `{}` given twice", x.value)));
            }
            components[p] = Some(self.matrix(lit, target.stalk_dim(p), source.stalk_dim(p))?);
        }
        let components = components
            .into_iter()
            .enumerate()
            .map(|(p, m)| match m {
                Some(m) => Ok(m),
                None if source.stalk_dim(p) * target.stalk_dim(p) == 0 => Ok(Matrix::zeros(
                    self.field,
                    target.stalk_dim(p),
                    source.stalk_dim(p),
                )),
                None => Err(block.name.error(format!(
                    "morphism `{}` has no `component {} = ...`",
                    block.name.value,
                    poset.name(p)
                ))),
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        SheafMorphism::new(source, target, components)
            .map_err(|e| CliError::failed(format!("morphism {}", block.name.value), e))
    }

    fn open_block(&self, name: &str) -> Option<&OpenBlock> {
        self.doc.opens.iter().find(|o| o.name.value == name)
    }

    /// Members and star centres of a named open, as written.
    pub(crate) fn open_block_set(&self, block: &OpenBlock) -> Result<Vec<usize>, CliError> {
        let mut members = Vec::new();
        for x in &block.members {
            members.push(self.element(x)?);
        }
        for x in &block.stars {
            members.extend(self.order.open_star(self.element(x)?).members());
        }
        Ok(members)
    }

    pub fn named_open(&self, block: &OpenBlock) -> Result<OpenSet, CliError> {
        let members = self.open_block_set(block)?;
        self.order
            .open_set(members)
            .map_err(|e| CliError::failed(format!("open {}", block.name.value), e))
    }

    /// Resolves an open-set expression: comma- or space-separated items,
    /// each `star:x` (the smallest open containing `x`), `open:NAME` (a
    /// named `[open]` block) or a bare element. The union must be open.
    pub fn open_spec(&self, spec: &Spanned<String>) -> Result<OpenSet, CliError> {
        let mut members = Vec::new();
        let items: Vec<&str> = spec
            .value
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(spec.error("empty open-set expression"));
        }
        let lookup = |name: &str| {
            self.order
                .index_of(name)
                .map_err(|_| spec.error(format!("unknown element `{name}` in `{}`", spec.value)))
        };
        for item in items {
            if let Some(x) = item.strip_prefix("star:") {
                members.extend(self.order.open_star(lookup(x)?).members());
            } else if let Some(name) = item.strip_prefix("open:") {
                let block = self
                    .open_block(name)
                    .ok_or_else(|| spec.error(format!("no open named `{name}`")))?;
                members.extend(self.open_block_set(block)?);
            } else {
                members.push(lookup(item)?);
            }
        }
        self.order
            .open_set(members)
            .map_err(|e| CliError::failed(format!("open {}", spec.value), e))
    }

    pub fn section_block(&self, name: &str) -> Result<&SectionBlock, CliError> {
        self.doc
            .sections
            .iter()
            .find(|s| s.name.value == name)
            .ok_or_else(|| CliError::Usage(format!("no section named `{name}`")))
    }

    /// The section's sheaf block, its open and its components.
    pub fn section(
        &self,
        sheaf: &CellularSheaf,
        block: &SectionBlock,
    ) -> Result<Section, CliError> {
        let open_spec = block.open.as_ref().ok_or_else(|| {
            block.name.error(format!(
                "section `{}` has no `open = ...`",
                block.name.value
            ))
        })?;
        let open = self.open_spec(open_spec)?;
        let mut components: Vec<Option<Vec<Scalar>>> = vec![None; open.len()];
        for (x, lit) in &block.values {
            let p = self.element(x)?;
            let slot = open.position(p).ok_or_else(|| {
                x.error(format!(
                    "`{}` is not in the open {}",
                    x.value,
                    open.describe(&self.order)
                ))
            })?;
            if components[slot].is_some() {
                return Err(x.error(format!("value at `{}` given twice", x.value)));
            }
            components[slot] = Some(self.vector(lit, sheaf.stalk_dim(p))?);
        }
        let components = components
            .into_iter()
            .zip(open.members())
            .map(|(c, &p)| match c {
                Some(v) => Ok(v),
                None if sheaf.stalk_dim(p) == 0 => Ok(Vec::new()),
                None => Err(block.name.error(format!(
                    "section `{}` has no `value {} = ...`",
                    block.name.value,
                    self.order.name(p)
                ))),
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        sheaf
            .section(&open, components)
            .map_err(|e| CliError::failed(format!("section {}", block.name.value), e))
    }

    /// The sheaf a section block refers to (the only sheaf if omitted).
    pub fn section_sheaf_block(&self, block: &SectionBlock) -> Result<&SheafBlock, CliError> {
        match &block.sheaf {
            Some(name) => self
                .doc
                .sheaves
                .iter()
                .find(|s| s.name.value == name.value)
                .ok_or_else(|| name.error(format!("no sheaf named `{}`", name.value))),
            None => self.sheaf_block(None),
        }
    }
}
