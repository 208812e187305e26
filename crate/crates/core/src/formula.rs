//! Dependence atoms, their two-atom disjunctions, and the text syntax
//! `dep(a,b) | dep(c,d)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `dep(y1, ..., yn, z)`: the target `z` is functionally determined by the
/// determiners. With no determiners it is the constancy atom `dep(z)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DependenceAtom {
    determiners: Vec<String>,
    target: String,
}

impl DependenceAtom {
    pub fn new<S: Into<String>>(
        determiners: impl IntoIterator<Item = S>,
        target: impl Into<String>,
    ) -> Result<Self> {
        let determiners: Vec<String> = determiners.into_iter().map(Into::into).collect();
        let target = target.into();
        for (i, d) in determiners.iter().enumerate() {
            if determiners[..i].contains(d) || *d == target {
                return Err(Error::DuplicateVariable(d.clone()));
            }
        }
        Ok(Self { determiners, target })
    }

    pub fn constancy(target: impl Into<String>) -> Self {
        Self {
            determiners: Vec::new(),
            target: target.into(),
        }
    }

    pub fn determiners(&self) -> &[String] {
        &self.determiners
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    /// Number of determiners.
    pub fn arity(&self) -> usize {
        self.determiners.len()
    }

    pub fn is_constancy(&self) -> bool {
        self.determiners.is_empty()
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.determiners
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.target.as_str()))
    }
}

impl fmt::Display for DependenceAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("dep(")?;
        for d in &self.determiners {
            write!(f, "{d},")?;
        }
        write!(f, "{})", self.target)
    }
}

/// `left ∨ right` under team semantics: the team splits into two parts, one
/// satisfying each atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisjunctionFormula {
    pub left: DependenceAtom,
    pub right: DependenceAtom,
}

impl DisjunctionFormula {
    pub fn new(left: DependenceAtom, right: DependenceAtom) -> Self {
        Self { left, right }
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in self.left.variables().chain(self.right.variables()) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// `Some((x, y))` when the formula is `dep(x,y) ∨ dep(y,x)`.
    pub fn as_mutual(&self) -> Option<(&str, &str)> {
        match (self.left.determiners(), self.right.determiners()) {
            ([a], [b]) if *a == self.right.target && *b == self.left.target => {
                Some((a.as_str(), b.as_str()))
            }
            _ => None,
        }
    }
}

impl fmt::Display for DisjunctionFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.left, self.right)
    }
}

impl FromStr for DisjunctionFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

/// Parses `atom "|" atom` where `atom := "dep(" ident ("," ident)* ")"`.
/// Whitespace is ignored between tokens; `∨` is accepted in place of `|`.
pub fn parse_formula(text: &str) -> Result<DisjunctionFormula> {
    let mut p = Parser { src: text, pos: 0 };
    let left = p.atom()?;
    p.skip_ws();
    if !(p.eat("|") || p.eat("∨")) {
        return Err(p.error("expected `|` between atoms"));
    }
    let right = p.atom()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input"));
    }
    Ok(DisjunctionFormula::new(left, right))
}

/// Parses a single atom such as `dep(x,y)`.
pub fn parse_atom(text: &str) -> Result<DependenceAtom> {
    let mut p = Parser { src: text, pos: 0 };
    let atom = p.atom()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("trailing input"));
    }
    Ok(atom)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let len = self
            .rest()
            .char_indices()
            .find(|&(_, c)| !(c.is_alphanumeric() || c == '_' || c == '\''))
            .map_or(self.rest().len(), |(i, _)| i);
        if len == 0 {
            return Err(self.error("expected identifier"));
        }
        let id = self.rest()[..len].to_string();
        self.pos += len;
        Ok(id)
    }

    fn atom(&mut self) -> Result<DependenceAtom> {
        self.skip_ws();
        if !self.eat("dep") {
            return Err(self.error("expected `dep(`"));
        }
        self.skip_ws();
        if !self.eat("(") {
            return Err(self.error("expected `(`"));
        }
        let mut vars = vec![self.ident()?];
        loop {
            self.skip_ws();
            if self.eat(")") {
                break;
            }
            if !self.eat(",") {
                return Err(self.error("expected `,` or `)`"));
            }
            vars.push(self.ident()?);
        }
        let target = vars.pop().expect("at least one identifier");
        DependenceAtom::new(vars, target)
    }
}
