//! Line-oriented document formats.
//!
//! ```text
//! lattice C3          map f : C3 -> C2      relation R : 2 -> 3     space S
//! elements 3          0 -> 0                0 1                     points 2
//! order               1 -> 1                1 2                     open
//! 0 1                 2 -> 1                end                     open 1
//! 1 2                 end                                           open 0 1
//! end                                                               end
//! ```
//!
//! Blank lines and `#` comments are ignored. Order lines are generating
//! pairs; the reflexive-transitive closure is taken. A lattice renders as
//! its covering pairs, so `parse(render(d)) == d`.

use std::collections::BTreeMap;
use std::sync::Arc;

use oakit_core::lattice::{
    chain_lattice, lattice_from_poset, poset_from_pairs, powerset_lattice, topology_from_opens,
    PointSet,
};
use oakit_core::{Caps, Elem, FinLattice, LatticeMap, Relation, Topology};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Lattice(Arc<FinLattice>),
    /// Images by source index; resolved against lattices by name.
    Map {
        source: String,
        target: String,
        images: Vec<Elem>,
    },
    Relation(Relation),
    Space(Topology),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub payload: Payload,
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self.payload {
            Payload::Lattice(_) => "lattice",
            Payload::Map { .. } => "map",
            Payload::Relation(_) => "relation",
            Payload::Space(_) => "space",
        }
    }
}

/// Non-empty lines as `(line number, tokens)`.
type TokenLines<'a> = Box<dyn Iterator<Item = (usize, Vec<&'a str>)> + 'a>;

struct Lines<'a> {
    inner: std::iter::Peekable<TokenLines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: TokenLines<'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("")))
                .map(|(i, l)| (i, l.split_whitespace().collect::<Vec<_>>()))
                .filter(|(_, t)| !t.is_empty()),
        );
        Lines {
            inner: it.peekable(),
            last: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.inner.next();
        if let Some((n, _)) = &item {
            self.last = *n;
        }
        item
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), CliError> {
        self.next()
            .ok_or_else(|| parse_err(self.last + 1, format!("unexpected end of input, expected {what}")))
    }

    fn is_done(&mut self) -> bool {
        self.inner.peek().is_none()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, tok: &str) -> Result<usize, CliError> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a number, found `{tok}`")))
}

fn identifier(line: usize, tok: &str) -> Result<String, CliError> {
    let ok = !tok.is_empty()
        && tok
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'));
    if ok {
        Ok(tok.to_string())
    } else {
        Err(parse_err(line, format!("invalid name `{tok}`")))
    }
}

/// `keyword value` on one line.
fn keyed(lines: &mut Lines, key: &str) -> Result<(usize, usize), CliError> {
    let (n, toks) = lines.expect(key)?;
    match toks.as_slice() {
        [k, v] if *k == key => Ok((n, number(n, v)?)),
        _ => Err(parse_err(n, format!("expected `{key} <n>`"))),
    }
}

/// `kind name : src -> tgt`.
fn arrow_header(n: usize, toks: &[&str]) -> Result<(String, String, String), CliError> {
    match toks {
        [_, name, ":", src, "->", tgt] => Ok((
            identifier(n, name)?,
            identifier(n, src)?,
            identifier(n, tgt)?,
        )),
        _ => Err(parse_err(n, format!("expected `{} <name> : <source> -> <target>`", toks[0]))),
    }
}

/// Parses exactly one document.
pub fn parse_input(text: &str, caps: &Caps) -> Result<Document, CliError> {
    let mut docs = parse_documents(text, caps)?;
    match docs.len() {
        1 => Ok(docs.pop().expect("one document")),
        0 => Err(parse_err(1, "no document found")),
        _ => Err(parse_err(1, "expected exactly one document")),
    }
}

/// Parses every document in `text`, in order.
pub fn parse_documents(text: &str, caps: &Caps) -> Result<Vec<Document>, CliError> {
    let mut lines = Lines::new(text);
    let mut docs = Vec::new();
    while !lines.is_done() {
        docs.push(parse_one(&mut lines, caps)?);
    }
    Ok(docs)
}

fn parse_one(lines: &mut Lines, caps: &Caps) -> Result<Document, CliError> {
    let (n, toks) = lines.expect("a document header")?;
    match toks[0] {
        "lattice" => {
            let [_, name] = toks.as_slice() else {
                return Err(parse_err(n, "expected `lattice <name>`"));
            };
            let name = identifier(n, name)?;
            let (en, size) = keyed(lines, "elements")?;
            if size > caps.lattice {
                let e = oakit_core::Error::SizeCap {
                    what: "lattice",
                    requested: size,
                    cap: caps.lattice,
                };
                return Err(at(en, e));
            }
            let (on, toks) = lines.expect("order")?;
            if toks != ["order"] {
                return Err(parse_err(on, "expected `order`"));
            }
            let mut pairs = Vec::new();
            loop {
                let (pn, toks) = lines.expect("an order pair or `end`")?;
                match toks.as_slice() {
                    ["end"] => break,
                    [a, b] => pairs.push((number(pn, a)?, number(pn, b)?)),
                    _ => return Err(parse_err(pn, "expected `<x> <y>` or `end`")),
                }
            }
            let lattice = poset_from_pairs(size, &pairs)
                .and_then(lattice_from_poset)
                .map_err(|e| at(n, e))?;
            Ok(Document {
                name,
                payload: Payload::Lattice(lattice),
            })
        }
        "map" => {
            let (name, source, target) = arrow_header(n, &toks)?;
            let mut images: BTreeMap<usize, usize> = BTreeMap::new();
            loop {
                let (pn, toks) = lines.expect("`<x> -> <y>` or `end`")?;
                match toks.as_slice() {
                    ["end"] => break,
                    [x, "->", y] => {
                        let x = number(pn, x)?;
                        if images.insert(x, number(pn, y)?).is_some() {
                            return Err(parse_err(pn, format!("element {x} mapped twice")));
                        }
                    }
                    _ => return Err(parse_err(pn, "expected `<x> -> <y>` or `end`")),
                }
            }
            if let Some((i, _)) = images.keys().enumerate().find(|(i, k)| i != *k) {
                return Err(parse_err(n, format!("map does not cover element {i}")));
            }
            Ok(Document {
                name,
                payload: Payload::Map {
                    source,
                    target,
                    images: images.into_values().collect(),
                },
            })
        }
        "relation" => {
            let (name, src, tgt) = arrow_header(n, &toks)?;
            let (src, tgt) = (number(n, &src)?, number(n, &tgt)?);
            let mut pairs = Vec::new();
            loop {
                let (pn, toks) = lines.expect("a pair or `end`")?;
                match toks.as_slice() {
                    ["end"] => break,
                    [a, b] => pairs.push((number(pn, a)?, number(pn, b)?)),
                    _ => return Err(parse_err(pn, "expected `<x> <y>` or `end`")),
                }
            }
            let rel = Relation::new(src, tgt, &pairs).map_err(|e| at(n, e))?;
            Ok(Document {
                name,
                payload: Payload::Relation(rel),
            })
        }
        "space" => {
            let [_, name] = toks.as_slice() else {
                return Err(parse_err(n, "expected `space <name>`"));
            };
            let name = identifier(n, name)?;
            let (pn, points) = keyed(lines, "points")?;
            if points > 64 {
                return Err(parse_err(pn, "at most 64 points are supported"));
            }
            let mut opens: Vec<PointSet> = Vec::new();
            loop {
                let (ln, toks) = lines.expect("`open ...` or `end`")?;
                match toks.as_slice() {
                    ["end"] => break,
                    ["open", members @ ..] => {
                        let mut u: PointSet = 0;
                        for m in members {
                            let p = number(ln, m)?;
                            if p >= points {
                                return Err(parse_err(ln, format!("point {p} out of range")));
                            }
                            u |= 1 << p;
                        }
                        opens.push(u);
                    }
                    _ => return Err(parse_err(ln, "expected `open ...` or `end`")),
                }
            }
            let space = topology_from_opens(points, &opens, caps).map_err(|e| at(n, e))?;
            Ok(Document {
                name,
                payload: Payload::Space(space),
            })
        }
        other => Err(parse_err(n, format!("unknown document kind `{other}`"))),
    }
}

fn at(line: usize, source: oakit_core::Error) -> CliError {
    CliError::Validation { line, source }
}

pub fn render(doc: &Document) -> String {
    let mut out = String::new();
    match &doc.payload {
        Payload::Lattice(l) => {
            out.push_str(&format!("lattice {}\nelements {}\norder\n", doc.name, l.size()));
            for (a, b) in l.poset().covers() {
                out.push_str(&format!("{a} {b}\n"));
            }
        }
        Payload::Map {
            source,
            target,
            images,
        } => {
            out.push_str(&format!("map {} : {source} -> {target}\n", doc.name));
            for (x, y) in images.iter().enumerate() {
                out.push_str(&format!("{x} -> {y}\n"));
            }
        }
        Payload::Relation(r) => {
            out.push_str(&format!(
                "relation {} : {} -> {}\n",
                doc.name,
                r.src_size(),
                r.tgt_size()
            ));
            for (x, y) in r.pairs() {
                out.push_str(&format!("{x} {y}\n"));
            }
        }
        Payload::Space(t) => {
            out.push_str(&format!("space {}\npoints {}\n", doc.name, t.points()));
            for &u in t.opens() {
                out.push_str("open");
                for p in 0..t.points() {
                    if u >> p & 1 == 1 {
                        out.push_str(&format!(" {p}"));
                    }
                }
                out.push('\n');
            }
        }
    }
    out.push_str("end\n");
    out
}

/// `pow:N` and `chain:N` name built-in lattices.
pub fn builtin_lattice(name: &str, caps: &Caps) -> Option<Result<Arc<FinLattice>, CliError>> {
    let (kind, n) = name.split_once(':')?;
    let n: usize = n.parse().ok()?;
    let built = match kind {
        "pow" => powerset_lattice(n, caps),
        "chain" => {
            if n > caps.lattice {
                return Some(Err(CliError::Usage(format!("chain:{n} exceeds the lattice cap"))));
            }
            chain_lattice(n)
        }
        _ => return None,
    };
    Some(built.map_err(|e| CliError::Validation { line: 0, source: e }))
}

/// All documents named on one command line.
#[derive(Debug, Default)]
pub struct Workspace {
    docs: Vec<Document>,
    /// Documents available for name resolution but not selected.
    context: Vec<Document>,
}

impl Workspace {
    /// Adds documents, rejecting duplicate names.
    pub fn extend(&mut self, docs: Vec<Document>) -> Result<(), CliError> {
        for d in docs {
            if self.docs.iter().any(|e| e.name == d.name) {
                return Err(CliError::Resolve(format!("duplicate name `{}`", d.name)));
            }
            self.docs.push(d);
        }
        Ok(())
    }

    /// The named documents in the given order. Maps keep resolving their
    /// lattices against the full workspace.
    pub fn select(&self, names: &[String], caps: &Caps) -> Result<Workspace, CliError> {
        let mut picked = Vec::new();
        for name in names {
            let doc = match self.docs.iter().find(|d| &d.name == name) {
                Some(d) => d.clone(),
                None => Document {
                    name: name.clone(),
                    payload: Payload::Lattice(self.lattice(name, caps)?),
                },
            };
            picked.push(doc);
        }
        Ok(Workspace {
            docs: picked,
            context: self.docs.clone(),
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn lattices(&self) -> Vec<(String, Arc<FinLattice>)> {
        self.docs
            .iter()
            .filter_map(|d| match &d.payload {
                Payload::Lattice(l) => Some((d.name.clone(), l.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn spaces(&self) -> Vec<(String, Topology)> {
        self.docs
            .iter()
            .filter_map(|d| match &d.payload {
                Payload::Space(t) => Some((d.name.clone(), t.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn relations(&self) -> Vec<(String, Relation)> {
        self.docs
            .iter()
            .filter_map(|d| match &d.payload {
                Payload::Relation(r) => Some((d.name.clone(), r.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn lattice(&self, name: &str, caps: &Caps) -> Result<Arc<FinLattice>, CliError> {
        let found = self.docs.iter().chain(&self.context).find_map(|d| match &d.payload {
            Payload::Lattice(l) if d.name == name => Some(l.clone()),
            _ => None,
        });
        if let Some(l) = found {
            return Ok(l);
        }
        builtin_lattice(name, caps)
            .unwrap_or_else(|| Err(CliError::Resolve(format!("no lattice named `{name}`"))))
    }

    /// Maps in command-line order, resolved against the lattices.
    pub fn maps(&self, caps: &Caps) -> Result<Vec<(String, LatticeMap)>, CliError> {
        let mut out = Vec::new();
        for d in &self.docs {
            if let Payload::Map {
                source,
                target,
                images,
            } = &d.payload
            {
                let l = self.lattice(source, caps)?;
                let m = self.lattice(target, caps)?;
                if images.len() != l.size() {
                    return Err(CliError::Resolve(format!(
                        "map `{}` lists {} images for {} elements of `{source}`",
                        d.name,
                        images.len(),
                        l.size()
                    )));
                }
                let f = LatticeMap::new(l, m, images.clone()).map_err(|e| CliError::Validation {
                    line: 0,
                    source: e,
                })?;
                out.push((d.name.clone(), f));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn parses_the_three_formats() {
        let c3 = parse_input("lattice C3\nelements 3\norder\n0 1\n1 2\nend", &caps()).unwrap();
        let Payload::Lattice(l) = &c3.payload else { panic!() };
        assert_eq!(**l, *chain_lattice(3).unwrap());

        let f = parse_input("map f : C3 -> C2\n0 -> 0\n1 -> 1\n2 -> 1\nend", &caps()).unwrap();
        assert_eq!(
            f.payload,
            Payload::Map {
                source: "C3".into(),
                target: "C2".into(),
                images: vec![0, 1, 1]
            }
        );

        let s = parse_input("space S\npoints 2\nopen\nopen 1\nopen 0 1\nend", &caps()).unwrap();
        let Payload::Space(t) = &s.payload else { panic!() };
        assert_eq!(t.opens(), &[0, 0b10, 0b11]);
    }

    #[test]
    fn generating_pairs_are_closed() {
        let d = parse_input("lattice C\nelements 3\norder\n0 1\n1 2\n0 2\nend", &caps()).unwrap();
        assert_eq!(render(&d), "lattice C\nelements 3\norder\n0 1\n1 2\nend\n");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_input("lattice C\nelements x\n", &caps()).unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 2, .. }));
        let e = parse_input("map f : A -> B\n0 -> 1\n2 -> 0\nend", &caps()).unwrap_err();
        assert!(matches!(e, CliError::Parse { line: 1, .. }));
        let e = parse_input("lattice A\nelements 2\norder\nend", &caps()).unwrap_err();
        assert!(matches!(e, CliError::Validation { line: 1, .. }));
        let e = parse_input("space S\npoints 2\nopen 0\nend", &caps()).unwrap_err();
        assert!(e.exit_code() == 2);
    }

    #[test]
    fn resolution_and_builtins() {
        let mut ws = Workspace::default();
        ws.extend(
            parse_documents("map p : pow:2 -> pow:1\n0 -> 0\n1 -> 1\n2 -> 0\n3 -> 1\nend", &caps())
                .unwrap(),
        )
        .unwrap();
        let maps = ws.maps(&caps()).unwrap();
        assert_eq!(maps[0].1.images(), &[0, 1, 0, 1]);
        let dup = parse_documents("relation p : 1 -> 1\nend", &caps()).unwrap();
        assert!(matches!(ws.extend(dup), Err(CliError::Resolve(_))));

        let mut ws = Workspace::default();
        ws.extend(
            parse_documents(
                "lattice B\nelements 2\norder\n0 1\nend\nmap f : B -> B\n0 -> 1\n1 -> 1\nend\nmap g : B -> B\n0 -> 0\n1 -> 1\nend",
                &caps(),
            )
            .unwrap(),
        )
        .unwrap();
        let picked = ws.select(&["g".into(), "f".into()], &caps()).unwrap();
        let names: Vec<String> = picked.maps(&caps()).unwrap().into_iter().map(|(n, _)| n).collect();
        assert_eq!(names, ["g", "f"]);
        assert!(picked.lattices().is_empty());
        assert!(ws.select(&["h".into()], &caps()).is_err());
    }
}
