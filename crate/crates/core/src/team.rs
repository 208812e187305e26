//! Teams: finite sets of assignments over an ordered list of variables.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{DependenceAtom, DisjunctionFormula};
use crate::value::{OwnedValue, Symbol, ValuePool};

/// A team. Rows are distinct tuples kept in insertion order (first occurrence
/// wins on duplicates); [`Team::sorted`] gives the canonical lexicographic
/// order used by the file formats.
#[derive(Clone)]
pub struct Team {
    vars: Vec<String>,
    len: usize,
    cells: Vec<Symbol>,
    labels: Option<Vec<String>>,
    pool: Arc<ValuePool>,
    duplicates_removed: usize,
}

pub struct TeamBuilder {
    vars: Vec<String>,
    cells: Vec<Symbol>,
    len: usize,
    labels: Vec<String>,
    labelled: bool,
    seen: HashSet<Vec<Symbol>>,
    pool: ValuePool,
    duplicates_removed: usize,
}

impl TeamBuilder {
    pub fn new<S: AsRef<str>>(vars: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::with_pool(vars, ValuePool::new())
    }

    pub fn with_pool<S: AsRef<str>>(vars: impl IntoIterator<Item = S>, pool: ValuePool) -> Result<Self> {
        let vars: Vec<String> = vars.into_iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::Format("empty variable name".into()));
            }
            if vars[..i].contains(v) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        Ok(Self {
            vars,
            cells: Vec::new(),
            len: 0,
            labels: Vec::new(),
            labelled: false,
            seen: HashSet::new(),
            pool,
            duplicates_removed: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    /// Distinct rows so far.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pool_mut(&mut self) -> &mut ValuePool {
        &mut self.pool
    }

    /// Adds a row of text values. Returns `false` if it duplicated an
    /// earlier row and was dropped.
    pub fn push_row<S: AsRef<str>>(&mut self, values: impl IntoIterator<Item = S>) -> Result<bool> {
        let syms: Vec<Symbol> = values
            .into_iter()
            .map(|v| self.pool.intern_text(v.as_ref()))
            .collect();
        self.push_symbols(syms, None)
    }

    pub fn push_labelled_row<S: AsRef<str>>(
        &mut self,
        label: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Result<bool> {
        let syms: Vec<Symbol> = values
            .into_iter()
            .map(|v| self.pool.intern_text(v.as_ref()))
            .collect();
        self.push_symbols(syms, Some(label.into()))
    }

    pub fn push_symbols(&mut self, row: Vec<Symbol>, label: Option<String>) -> Result<bool> {
        if row.len() != self.vars.len() {
            return Err(Error::RaggedRow {
                row: self.len + self.duplicates_removed,
                expected: self.vars.len(),
                found: row.len(),
            });
        }
        if self.seen.contains(&row) {
            self.duplicates_removed += 1;
            return Ok(false);
        }
        self.cells.extend_from_slice(&row);
        self.seen.insert(row);
        if let Some(l) = label {
            if !self.labelled {
                self.labels = (0..self.len).map(|i| format!("s{i}")).collect();
                self.labelled = true;
            }
            self.labels.push(l);
        } else if self.labelled {
            self.labels.push(format!("s{}", self.len));
        }
        self.len += 1;
        Ok(true)
    }

    pub fn build(self) -> Team {
        Team {
            vars: self.vars,
            len: self.len,
            cells: self.cells,
            labels: self.labelled.then_some(self.labels),
            pool: Arc::new(self.pool),
            duplicates_removed: self.duplicates_removed,
        }
    }
}

impl Team {
    /// Convenience constructor from text rows.
    pub fn from_rows<S: AsRef<str>, R: AsRef<[S]>>(vars: &[&str], rows: &[R]) -> Result<Self> {
        let mut b = TeamBuilder::new(vars)?;
        for r in rows {
            b.push_row(r.as_ref().iter().map(|s| s.as_ref()))?;
        }
        Ok(b.build())
    }

    /// Like [`Team::from_rows`] but labels rows `s{offset}`, `s{offset+1}`, ...
    pub fn from_labelled_rows<S: AsRef<str>, R: AsRef<[S]>>(
        vars: &[&str],
        first_label: usize,
        rows: &[R],
    ) -> Result<Self> {
        let mut b = TeamBuilder::new(vars)?;
        for (i, r) in rows.iter().enumerate() {
            b.push_labelled_row(format!("s{}", first_label + i), r.as_ref().iter().map(|s| s.as_ref()))?;
        }
        Ok(b.build())
    }

    pub fn empty<S: AsRef<str>>(vars: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(TeamBuilder::new(vars)?.build())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn width(&self) -> usize {
        self.vars.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }

    pub fn pool(&self) -> &ValuePool {
        &self.pool
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Row label if present, otherwise the row index.
    pub fn row_name(&self, row: usize) -> String {
        match &self.labels {
            Some(l) => l[row].clone(),
            None => row.to_string(),
        }
    }

    pub fn row(&self, i: usize) -> &[Symbol] {
        let w = self.width();
        &self.cells[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[Symbol]> + '_ {
        (0..self.len).map(move |i| self.row(i))
    }

    #[inline]
    pub fn cell(&self, row: usize, col: usize) -> Symbol {
        self.cells[row * self.width() + col]
    }

    pub fn column_index(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// One column as a contiguous vector.
    pub fn column(&self, col: usize) -> Vec<Symbol> {
        (0..self.len).map(|r| self.cell(r, col)).collect()
    }

    pub fn row_text(&self, i: usize) -> Vec<String> {
        self.row(i).iter().map(|&s| self.pool.display(s)).collect()
    }

    pub fn row_owned(&self, i: usize) -> Vec<OwnedValue> {
        self.row(i).iter().map(|&s| self.pool.resolve(s)).collect()
    }

    /// Team restricted to `vars` (in the given order), with projected
    /// duplicates collapsed.
    pub fn restrict<S: AsRef<str>>(&self, vars: &[S]) -> Result<Team> {
        let cols = vars
            .iter()
            .map(|v| {
                self.column_index(v.as_ref())
                    .map_err(|_| Error::DomainMismatch(format!("`{}` is not in the team's domain", v.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        let names: Vec<&str> = vars.iter().map(|v| v.as_ref()).collect();
        let mut b = TeamBuilder::with_pool(names, (*self.pool).clone())?;
        for r in 0..self.len {
            let row: Vec<Symbol> = cols.iter().map(|&c| self.cell(r, c)).collect();
            let label = self.labels.as_ref().map(|l| l[r].clone());
            b.push_symbols(row, label)?;
        }
        let mut t = b.build();
        t.duplicates_removed = 0;
        Ok(t)
    }

    /// The subteam made of the given rows, in the given order.
    pub fn subteam(&self, rows: &[usize]) -> Team {
        let mut cells = Vec::with_capacity(rows.len() * self.width());
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(rows.len());
        for &r in rows {
            if seen.insert(r) {
                cells.extend_from_slice(self.row(r));
                kept.push(r);
            }
        }
        Team {
            vars: self.vars.clone(),
            len: kept.len(),
            cells,
            labels: self.labels.as_ref().map(|l| kept.iter().map(|&r| l[r].clone()).collect()),
            pool: Arc::clone(&self.pool),
            duplicates_removed: 0,
        }
    }

    /// Distinct values taken by `var`, in order of first occurrence.
    pub fn column_range(&self, var: &str) -> Result<Vec<Symbol>> {
        let c = self.column_index(var)?;
        let mut seen = HashSet::new();
        Ok((0..self.len)
            .map(|r| self.cell(r, c))
            .filter(|s| seen.insert(*s))
            .collect())
    }

    pub fn column_range_text(&self, var: &str) -> Result<Vec<String>> {
        Ok(self
            .column_range(var)?
            .into_iter()
            .map(|s| self.pool.display(s))
            .collect())
    }

    /// The same rows in canonical lexicographic order (the duplicate count
    /// carries over).
    pub fn sorted(&self) -> Team {
        let mut order: Vec<usize> = (0..self.len).collect();
        order.sort_by(|&a, &b| self.compare_rows(a, b));
        let mut t = self.subteam(&order);
        t.duplicates_removed = self.duplicates_removed;
        t
    }

    fn compare_rows(&self, a: usize, b: usize) -> Ordering {
        for (&x, &y) in self.row(a).iter().zip(self.row(b)) {
            match self.pool.compare(x, y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }

    /// Adds a column computed from each row. Used by tupling; the value pool is
    /// extended copy-on-write.
    pub(crate) fn with_derived_column(
        &self,
        name: &str,
        mut f: impl FnMut(&[Symbol], &mut ValuePool) -> Symbol,
    ) -> Result<Team> {
        if self.vars.iter().any(|v| v == name) {
            return Err(Error::DuplicateVariable(name.to_string()));
        }
        let mut pool = (*self.pool).clone();
        let w = self.width();
        let mut cells = Vec::with_capacity(self.len * (w + 1));
        for r in 0..self.len {
            let row = self.row(r);
            cells.extend_from_slice(row);
            cells.push(f(row, &mut pool));
        }
        let mut vars = self.vars.clone();
        vars.push(name.to_string());
        Ok(Team {
            vars,
            len: self.len,
            cells,
            labels: self.labels.clone(),
            pool: Arc::new(pool),
            duplicates_removed: 0,
        })
    }

    /// Set equality on rows (order-insensitive), comparing values
    /// structurally so teams with different pools can be compared.
    pub fn same_rows(&self, other: &Team) -> bool {
        if self.vars != other.vars || self.len != other.len {
            return false;
        }
        let mine: HashSet<Vec<OwnedValue>> = (0..self.len).map(|r| self.row_owned(r)).collect();
        (0..other.len).all(|r| mine.contains(&other.row_owned(r)))
    }
}

impl PartialEq for Team {
    fn eq(&self, other: &Self) -> bool {
        self.same_rows(other)
    }
}

impl fmt::Debug for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Team[{}]", self.vars.join(","))?;
        for r in 0..self.len {
            writeln!(f, "  {}: ({})", self.row_name(r), self.row_text(r).join(","))?;
        }
        Ok(())
    }
}

/// An atom resolved against a team's column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundAtom {
    pub determiners: Vec<usize>,
    pub target: usize,
}

impl BoundAtom {
    pub fn bind(team: &Team, atom: &DependenceAtom) -> Result<Self> {
        Ok(Self {
            determiners: atom
                .determiners()
                .iter()
                .map(|d| team.column_index(d))
                .collect::<Result<_>>()?,
            target: team.column_index(atom.target())?,
        })
    }

    /// Whether the two rows, taken together, violate the atom.
    #[inline]
    pub fn violated_by(&self, team: &Team, a: usize, b: usize) -> bool {
        team.cell(a, self.target) != team.cell(b, self.target)
            && self.determiners.iter().all(|&c| team.cell(a, c) == team.cell(b, c))
    }

    /// Whether the atom holds on the subteam formed by `rows`; linear
    /// expected time by hashing determiner projections.
    pub fn holds_on(&self, team: &Team, rows: impl IntoIterator<Item = usize>) -> bool {
        match self.determiners.as_slice() {
            [] => {
                let mut first = None;
                rows.into_iter().all(|r| {
                    let v = team.cell(r, self.target);
                    *first.get_or_insert(v) == v
                })
            }
            &[d] => {
                let mut map: HashMap<Symbol, Symbol> = HashMap::new();
                rows.into_iter().all(|r| {
                    let v = team.cell(r, self.target);
                    *map.entry(team.cell(r, d)).or_insert(v) == v
                })
            }
            dets => {
                let mut map: HashMap<Vec<Symbol>, Symbol> = HashMap::new();
                rows.into_iter().all(|r| {
                    let key: Vec<Symbol> = dets.iter().map(|&c| team.cell(r, c)).collect();
                    let v = team.cell(r, self.target);
                    *map.entry(key).or_insert(v) == v
                })
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundFormula {
    pub left: BoundAtom,
    pub right: BoundAtom,
}

impl BoundFormula {
    pub fn bind(team: &Team, f: &DisjunctionFormula) -> Result<Self> {
        Ok(Self {
            left: BoundAtom::bind(team, &f.left)?,
            right: BoundAtom::bind(team, &f.right)?,
        })
    }
}

/// `T ⊨ dep(ȳ, z)`: no two rows agree on every determiner yet differ on the
/// target.
pub fn satisfies_atom(team: &Team, atom: &DependenceAtom) -> Result<bool> {
    let bound = BoundAtom::bind(team, atom)
        .map_err(|e| Error::DomainMismatch(e.to_string()))?;
    Ok(bound.holds_on(team, 0..team.len()))
}
