//! Interned team values.
//!
//! Dependence atoms only ever compare values for equality, so every cell of a
//! team is an opaque [`Symbol`]. Symbols index into a [`ValuePool`] that owns
//! the underlying text (or, after tupling a determiner list, a tuple of other
//! symbols from the same pool).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub(crate) u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Text(Box<str>),
    Tuple(Box<[Symbol]>),
}

/// A value with every tuple component resolved; compares structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OwnedValue {
    Text(String),
    Tuple(Vec<OwnedValue>),
}

impl fmt::Display for OwnedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OwnedValue::Text(s) => f.write_str(s),
            OwnedValue::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValuePool {
    values: Vec<Value>,
    index: HashMap<Value, Symbol>,
}

impl ValuePool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn intern_text(&mut self, text: &str) -> Symbol {
        self.intern(Value::Text(text.into()))
    }

    pub fn intern_tuple(&mut self, parts: &[Symbol]) -> Symbol {
        self.intern(Value::Tuple(parts.into()))
    }

    fn intern(&mut self, value: Value) -> Symbol {
        if let Some(&sym) = self.index.get(&value) {
            return sym;
        }
        let sym = Symbol(u32::try_from(self.values.len()).expect("value pool overflow"));
        self.values.push(value.clone());
        self.index.insert(value, sym);
        sym
    }

    pub fn get(&self, sym: Symbol) -> &Value {
        &self.values[sym.index()]
    }

    pub fn lookup_text(&self, text: &str) -> Option<Symbol> {
        self.index.get(&Value::Text(text.into())).copied()
    }

    pub fn resolve(&self, sym: Symbol) -> OwnedValue {
        match self.get(sym) {
            Value::Text(s) => OwnedValue::Text(s.to_string()),
            Value::Tuple(parts) => OwnedValue::Tuple(parts.iter().map(|&p| self.resolve(p)).collect()),
        }
    }

    pub fn display(&self, sym: Symbol) -> String {
        match self.get(sym) {
            Value::Text(s) => s.to_string(),
            Value::Tuple(_) => self.resolve(sym).to_string(),
        }
    }

    /// Structural order on values: text before tuples, text by bytes, tuples
    /// lexicographically.
    pub fn compare(&self, a: Symbol, b: Symbol) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        match (self.get(a), self.get(b)) {
            (Value::Text(x), Value::Text(y)) => x.cmp(y),
            (Value::Text(_), Value::Tuple(_)) => Ordering::Less,
            (Value::Tuple(_), Value::Text(_)) => Ordering::Greater,
            (Value::Tuple(x), Value::Tuple(y)) => {
                for (&p, &q) in x.iter().zip(y.iter()) {
                    match self.compare(p, q) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                x.len().cmp(&y.len())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent() {
        let mut pool = ValuePool::new();
        let a = pool.intern_text("a");
        let b = pool.intern_text("b");
        assert_ne!(a, b);
        assert_eq!(pool.intern_text("a"), a);
        let t = pool.intern_tuple(&[a, b]);
        assert_eq!(pool.intern_tuple(&[a, b]), t);
        assert_ne!(pool.intern_tuple(&[b, a]), t);
        assert_eq!(pool.display(t), "(a,b)");
    }

    #[test]
    fn text_is_not_coerced() {
        let mut pool = ValuePool::new();
        assert_ne!(pool.intern_text("01"), pool.intern_text("1"));
    }

    #[test]
    fn tuple_never_equals_text_with_same_rendering() {
        let mut pool = ValuePool::new();
        let a = pool.intern_text("a");
        let b = pool.intern_text("b");
        let t = pool.intern_tuple(&[a, b]);
        let s = pool.intern_text("(a,b)");
        assert_ne!(t, s);
        assert_eq!(pool.compare(s, t), Ordering::Less);
    }
}
