//! Line-oriented sectioned text format for posets, sheaves and morphisms.
//!
//! ```text
//! # comments run to the end of the line
//! [settings]
//! field = q                 # or fp:5
//!
//! [poset]
//! elements = p q1 q2 r
//! hasse = p<q1 p<q2 q1<r q2<r   # chains like a<b<c are allowed
//!
//! [sheaf G]
//! dim p = 1
//! map p q1 = [1]
//! map q1 r = [1/2]
//!
//! [morphism phi]
//! source = G
//! target = G
//! component p = [1]
//!
//! [open U]
//! stars = q1 q2             # and/or `members = ...`
//!
//! [section s1]
//! sheaf = G
//! open = star:q1            # same syntax as `--open`
//! value q1 = [1]
//! ```
//!
//! Parsing only checks syntax and keys; names and shapes are resolved
//! against the poset by [`crate::model`].

use crate::error::CliError;

/// A value with the 1-based line and column where it starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub line: usize,
    pub col: usize,
}

impl<T> Spanned<T> {
    pub fn new(value: T, line: usize, col: usize) -> Self {
        Spanned { value, line, col }
    }

    pub fn error(&self, message: impl Into<String>) -> CliError {
        CliError::parse(self.line, self.col, message)
    }
}

/// Rows of literal entries, e.g. `[1 2/3; 0 -1]`; `[]` has no rows.
pub type MatrixLiteral = Vec<Vec<Spanned<String>>>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PosetBlock {
    pub line: usize,
    pub elements: Vec<Spanned<String>>,
    pub pairs: Vec<(Spanned<String>, Spanned<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapEntry {
    pub from: Spanned<String>,
    pub to: Spanned<String>,
    pub matrix: Spanned<MatrixLiteral>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafBlock {
    pub name: Spanned<String>,
    pub dims: Vec<(Spanned<String>, Spanned<usize>)>,
    pub maps: Vec<MapEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismBlock {
    pub name: Spanned<String>,
    pub source: Option<Spanned<String>>,
    pub target: Option<Spanned<String>>,
    pub components: Vec<(Spanned<String>, Spanned<MatrixLiteral>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpenBlock {
    pub name: Spanned<String>,
    pub members: Vec<Spanned<String>>,
    pub stars: Vec<Spanned<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionBlock {
    pub name: Spanned<String>,
    pub sheaf: Option<Spanned<String>>,
    pub open: Option<Spanned<String>>,
    pub values: Vec<(Spanned<String>, Spanned<MatrixLiteral>)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub field: Option<Spanned<String>>,
    pub poset: Option<PosetBlock>,
    pub sheaves: Vec<SheafBlock>,
    pub morphisms: Vec<MorphismBlock>,
    pub opens: Vec<OpenBlock>,
    pub sections: Vec<SectionBlock>,
}

enum Block {
    None,
    Settings,
    Poset,
    Sheaf,
    Morphism,
    Open,
    Section,
}

/// Whitespace- or comma-separated words with their 1-based columns.
fn words(text: &str, first_col: usize) -> Vec<Spanned<String>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let chars: Vec<char> = text.chars().collect();
    for (i, &c) in chars.iter().chain(std::iter::once(&' ')).enumerate() {
        let sep = c.is_whitespace() || c == ',';
        match (sep, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Spanned::new(chars[s..i].iter().collect(), 0, first_col + s));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '-' | '+'))
}

fn name_token(w: Spanned<String>, line: usize) -> Result<Spanned<String>, CliError> {
    if is_name(&w.value) {
        Ok(Spanned { line, ..w })
    } else {
        Err(CliError::parse(
            line,
            w.col,
            format!("invalid name `{}`", w.value),
        ))
    }
}

/// Parses `[a b; c d]`, entries separated by whitespace or commas.
fn matrix_literal(text: &str, line: usize, col: usize) -> Result<MatrixLiteral, CliError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| {
            CliError::parse(
                line,
                col,
                format!("expected a matrix literal like `[1 0; 0 1]`, found `{text}`"),
            )
        })?;
    let mut rows = Vec::new();
    if inner.trim().is_empty() {
        return Ok(rows);
    }
    let mut offset = 1;
    for row_text in inner.split(';') {
        let row: Vec<Spanned<String>> = words(row_text, col + offset)
            .into_iter()
            .map(|w| Spanned { line, ..w })
            .collect();
        if row.is_empty() {
            return Err(CliError::parse(line, col + offset, "empty matrix row"));
        }
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(CliError::parse(
                    line,
                    row[0].col,
                    format!(
                        "ragged matrix: row has {} entries, the first row has {first}",
                        row.len()
                    ),
                ));
            }
        }
        rows.push(row);
        offset += row_text.chars().count() + 1;
    }
    Ok(rows)
}

type SpannedPair = (Spanned<String>, Spanned<String>);

fn pairs(values: Vec<Spanned<String>>, line: usize) -> Result<Vec<SpannedPair>, CliError> {
    let mut out = Vec::new();
    for w in values {
        let mut parts = Vec::new();
        let mut col = w.col;
        for part in w.value.split('<') {
            parts.push(name_token(Spanned::new(part.to_string(), line, col), line)?);
            col += part.chars().count() + 1;
        }
        if parts.len() < 2 {
            return Err(CliError::parse(
                line,
                w.col,
                format!("expected `a<b`, found `{}`", w.value),
            ));
        }
        for pair in parts.windows(2) {
            out.push((pair[0].clone(), pair[1].clone()));
        }
    }
    Ok(out)
}

struct Line<'a> {
    number: usize,
    key: Spanned<String>,
    args: Vec<Spanned<String>>,
    value: &'a str,
    value_col: usize,
}

impl Line<'_> {
    fn error(&self, message: impl Into<String>) -> CliError {
        CliError::parse(self.number, self.key.col, message)
    }

    fn no_args(&self) -> Result<(), CliError> {
        match self.args.first() {
            Some(a) => Err(CliError::parse(
                self.number,
                a.col,
                format!("`{}` takes no arguments", self.key.value),
            )),
            None => Ok(()),
        }
    }

    fn args(&self, n: usize) -> Result<Vec<Spanned<String>>, CliError> {
        if self.args.len() != n {
            return Err(self.error(format!(
                "`{}` takes {n} element name(s) before `=`",
                self.key.value
            )));
        }
        self.args
            .iter()
            .cloned()
            .map(|a| name_token(a, self.number))
            .collect()
    }

    fn words(&self) -> Vec<Spanned<String>> {
        words(self.value, self.value_col)
            .into_iter()
            .map(|w| Spanned {
                line: self.number,
                ..w
            })
            .collect()
    }

    fn names(&self) -> Result<Vec<Spanned<String>>, CliError> {
        self.words()
            .into_iter()
            .map(|w| name_token(w, self.number))
            .collect()
    }

    fn single(&self) -> Result<Spanned<String>, CliError> {
        let mut w = self.words();
        if w.len() != 1 {
            return Err(CliError::parse(
                self.number,
                self.value_col,
                format!("`{}` takes a single value", self.key.value),
            ));
        }
        Ok(w.remove(0))
    }

    fn whole_value(&self) -> Spanned<String> {
        Spanned::new(self.value.to_string(), self.number, self.value_col)
    }

    fn matrix(&self) -> Result<Spanned<MatrixLiteral>, CliError> {
        Ok(Spanned::new(
            matrix_literal(self.value, self.number, self.value_col)?,
            self.number,
            self.value_col,
        ))
    }
}

fn set_once(
    slot: &mut Option<Spanned<String>>,
    line: &Line,
    value: Spanned<String>,
) -> Result<(), CliError> {
    if slot.is_some() {
        return Err(line.error(format!("`{}` given twice", line.key.value)));
    }
    *slot = Some(value);
    Ok(())
}

pub fn parse(text: &str) -> Result<Document, CliError> {
    let mut doc = Document::default();
    let mut block = Block::None;
    for (index, raw) in text.lines().enumerate() {
        let number = index + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let first_col = content[..indent].chars().count() + 1;

        if let Some(header) = trimmed.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| CliError::parse(number, first_col, "unterminated block header"))?;
            let mut parts = words(header, first_col + 1)
                .into_iter()
                .map(|w| Spanned { line: number, ..w });
            let kind = parts
                .next()
                .ok_or_else(|| CliError::parse(number, first_col, "empty block header"))?;
            let name = parts.next().map(|n| name_token(n, number)).transpose()?;
            if let Some(extra) = parts.next() {
                return Err(extra.error("block headers take at most a kind and a name"));
            }
            let named = |what: &str| {
                name.clone().ok_or_else(|| {
                    CliError::parse(
                        number,
                        first_col,
                        format!("[{what}] needs a name, e.g. `[{what} NAME]`"),
                    )
                })
            };
            let unnamed = |what: &str| match &name {
                Some(n) => Err(n.error(format!("[{what}] takes no name"))),
                None => Ok(()),
            };
            block = match kind.value.as_str() {
                "settings" => {
                    unnamed("settings")?;
                    Block::Settings
                }
                "poset" => {
                    unnamed("poset")?;
                    if doc.poset.is_some() {
                        return Err(kind.error("only one [poset] block is allowed"));
                    }
                    doc.poset = Some(PosetBlock {
                        line: number,
                        ..PosetBlock::default()
                    });
                    Block::Poset
                }
                "sheaf" => {
                    let name = name.clone().unwrap_or_else(|| Spanned::new("F".to_string(), number, first_col));
                    if doc.sheaves.iter().any(|s| s.name.value == name.value) {
                        return Err(name.error(format!("sheaf `{}` declared twice", name.value)));
                    }
                    doc.sheaves.push(SheafBlock {
                        name,
                        dims: Vec::new(),
                        maps: Vec::new(),
                    });
                    Block::Sheaf
                }
                "morphism" => {
                    let name = named("morphism")?;
                    if doc.morphisms.iter().any(|m| m.name.value == name.value) {
                        return Err(name.error(format!("morphism `{}` declared twice", name.value)));
                    }
                    doc.morphisms.push(MorphismBlock {
                        name,
                        source: None,
                        target: None,
                        components: Vec::new(),
                    });
                    Block::Morphism
                }
                "open" => {
                    let name = named("open")?;
                    if doc.opens.iter().any(|o| o.name.value == name.value) {
                        return Err(name.error(format!("open `{}` declared twice", name.value)));
                    }
                    doc.opens.push(OpenBlock {
                        name,
                        members: Vec::new(),
                        stars: Vec::new(),
                    });
                    Block::Open
                }
                "section" => {
                    let name = named("section")?;
                    if doc.sections.iter().any(|s| s.name.value == name.value) {
                        return Err(name.error(format!("section `{}` declared twice", name.value)));
                    }
                    doc.sections.push(SectionBlock {
                        name,
                        sheaf: None,
                        open: None,
                        values: Vec::new(),
                    });
                    Block::Section
                }
                other => {
                    return Err(kind.error(format!(
                        "unknown block `[{other}]`; expected settings, poset, sheaf, morphism, open or section"
                    )))
                }
            };
            continue;
        }

        let Some(eq) = content.find('=') else {
            return Err(CliError::parse(number, first_col, "expected `key = value`"));
        };
        let mut lhs = words(&content[..eq], 1)
            .into_iter()
            .map(|w| Spanned { line: number, ..w });
        let key = lhs
            .next()
            .ok_or_else(|| CliError::parse(number, first_col, "missing key before `=`"))?;
        let after = &content[eq + 1..];
        let value = after.trim();
        let value_col = content[..eq + 1].chars().count() + after.chars().count()
            - after.trim_start().chars().count()
            + 1;
        let line = Line {
            number,
            key,
            args: lhs.collect(),
            value,
            value_col,
        };
        if value.is_empty() {
            return Err(CliError::parse(
                number,
                value_col,
                format!("`{}` has no value", line.key.value),
            ));
        }
        let unknown = |allowed: &str| {
            line.error(format!(
                "unknown key `{}`; expected {allowed}",
                line.key.value
            ))
        };

        match block {
            Block::None => return Err(line.error("key outside of any block")),
            Block::Settings => match line.key.value.as_str() {
                "field" => {
                    line.no_args()?;
                    let v = line.single()?;
                    set_once(&mut doc.field, &line, v)?;
                }
                _ => return Err(unknown("`field`")),
            },
            Block::Poset => {
                let poset = doc.poset.as_mut().expect("inside [poset]");
                match line.key.value.as_str() {
                    "elements" => {
                        line.no_args()?;
                        poset.elements.extend(line.names()?);
                    }
                    "hasse" | "relations" => {
                        line.no_args()?;
                        poset.pairs.extend(pairs(line.words(), number)?);
                    }
                    _ => return Err(unknown("`elements`, `hasse` or `relations`")),
                }
            }
            Block::Sheaf => {
                let sheaf = doc.sheaves.last_mut().expect("inside [sheaf]");
                match line.key.value.as_str() {
                    "dim" => {
                        let x = line.args(1)?.remove(0);
                        let v = line.single()?;
                        let d = v.value.parse::<usize>().map_err(|_| {
                            v.error(format!(
                                "dimension must be a non-negative integer, found `{}`",
                                v.value
                            ))
                        })?;
                        sheaf.dims.push((x, Spanned::new(d, v.line, v.col)));
                    }
                    "map" => {
                        let mut a = line.args(2)?;
                        let to = a.pop().expect("two args");
                        let from = a.pop().expect("two args");
                        sheaf.maps.push(MapEntry {
                            from,
                            to,
                            matrix: line.matrix()?,
                        });
                    }
                    _ => return Err(unknown("`dim` or `map`")),
                }
            }
            Block::Morphism => {
                let m = doc.morphisms.last_mut().expect("inside [morphism]");
                match line.key.value.as_str() {
                    "source" => {
                        line.no_args()?;
                        let v = name_token(line.single()?, number)?;
                        set_once(&mut m.source, &line, v)?;
                    }
                    "target" => {
                        line.no_args()?;
                        let v = name_token(line.single()?, number)?;
                        set_once(&mut m.target, &line, v)?;
                    }
                    "component" => {
                        let x = line.args(1)?.remove(0);
                        m.components.push((x, line.matrix()?));
                    }
                    _ => return Err(unknown("`source`, `target` or `component`")),
                }
            }
            Block::Open => {
                let o = doc.opens.last_mut().expect("inside [open]");
                match line.key.value.as_str() {
                    "members" => {
                        line.no_args()?;
                        o.members.extend(line.names()?);
                    }
                    "stars" => {
                        line.no_args()?;
                        o.stars.extend(line.names()?);
                    }
                    _ => return Err(unknown("`members` or `stars`")),
                }
            }
            Block::Section => {
                let s = doc.sections.last_mut().expect("inside [section]");
                match line.key.value.as_str() {
                    "sheaf" => {
                        line.no_args()?;
                        let v = name_token(line.single()?, number)?;
                        set_once(&mut s.sheaf, &line, v)?;
                    }
                    "open" => {
                        line.no_args()?;
                        set_once(&mut s.open, &line, line.whole_value())?;
                    }
                    "value" => {
                        let x = line.args(1)?.remove(0);
                        s.values.push((x, line.matrix()?));
                    }
                    _ => return Err(unknown("`sheaf`, `open` or `value`")),
                }
            }
        }
    }
    Ok(doc)
}
