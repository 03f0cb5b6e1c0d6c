//! Process-wide symbol table.
//!
//! Variables are interned once and compared by index afterwards. The index
//! doubles as the variable order for the monomial order: a symbol interned
//! earlier ranks higher, so declaring `x1 x2 x3` gives `x1 > x2 > x3`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

#[derive(Default)]
struct Table {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

fn table() -> &'static RwLock<Table> {
    static TABLE: OnceLock<RwLock<Table>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(Table::default()))
}

impl Var {
    /// Interns `name`, returning the existing handle if it is already known.
    pub fn new(name: &str) -> Var {
        if let Some(v) = Var::lookup(name) {
            return v;
        }
        let mut t = table().write().expect("symbol table poisoned");
        if let Some(&i) = t.index.get(name) {
            return Var(i);
        }
        let i = t.names.len() as u32;
        t.names.push(name.to_string());
        t.index.insert(name.to_string(), i);
        Var(i)
    }

    pub fn lookup(name: &str) -> Option<Var> {
        let t = table().read().expect("symbol table poisoned");
        t.index.get(name).map(|&i| Var(i))
    }

    pub fn name(self) -> String {
        let t = table().read().expect("symbol table poisoned");
        t.names[self.0 as usize].clone()
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Interns a run of names in order, e.g. `x1 x2 x3`.
pub fn vars<S: AsRef<str>>(names: &[S]) -> Vec<Var> {
    names.iter().map(|n| Var::new(n.as_ref())).collect()
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
