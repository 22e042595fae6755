use std::collections::HashMap;
use std::fmt;

/// Index of a variable in its [`VarTable`]. The derived order is the table order,
/// which every monomial order and pivot rule in the crate is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub(crate) u16);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarRole {
    Coordinate,
    Velocity,
    Momentum,
    Extended,
    Multiplier,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub role: VarRole,
}

/// Ordered, immutable registry of variable names.
///
/// Layout for mechanical systems is `q1..qn, v1..vn, p1..pn, [z], m1..mk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarTable {
    vars: Vec<Variable>,
    by_name: HashMap<String, Var>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VarTableError {
    #[error("duplicate variable name `{0}`")]
    Duplicate(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("too many variables ({0})")]
    TooMany(usize),
}

impl VarTable {
    pub fn new<I, S>(vars: I) -> Result<Self, VarTableError>
    where
        I: IntoIterator<Item = (S, VarRole)>,
        S: Into<String>,
    {
        let mut table = VarTable {
            vars: Vec::new(),
            by_name: HashMap::new(),
        };
        for (name, role) in vars {
            let name = name.into();
            if !is_identifier(&name) {
                return Err(VarTableError::InvalidName(name));
            }
            if table.by_name.contains_key(&name) {
                return Err(VarTableError::Duplicate(name));
            }
            let idx = table.vars.len();
            if idx > u16::MAX as usize {
                return Err(VarTableError::TooMany(idx));
            }
            table.by_name.insert(name.clone(), Var(idx as u16));
            table.vars.push(Variable { name, role });
        }
        Ok(table)
    }

    /// Standard mechanics layout: `q1..qn, v1..vn, p1..pn`, then `z` when
    /// `extended`, then `multipliers` names `{prefix}1..`.
    pub fn mechanics(n: usize, extended: bool, multiplier_prefix: &str, multipliers: usize) -> Self {
        let mut entries: Vec<(String, VarRole)> = Vec::new();
        entries.extend((1..=n).map(|i| (format!("q{i}"), VarRole::Coordinate)));
        entries.extend((1..=n).map(|i| (format!("v{i}"), VarRole::Velocity)));
        entries.extend((1..=n).map(|i| (format!("p{i}"), VarRole::Momentum)));
        if extended {
            entries.push(("z".to_string(), VarRole::Extended));
        }
        entries.extend((1..=multipliers).map(|i| (format!("{multiplier_prefix}{i}"), VarRole::Multiplier)));
        VarTable::new(entries).expect("mechanics layout has unique identifier names")
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, v: Var) -> &str {
        &self.vars[v.index()].name
    }

    pub fn role(&self, v: Var) -> VarRole {
        self.vars[v.index()].role
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Variable)> {
        self.vars.iter().enumerate().map(|(i, v)| (Var(i as u16), v))
    }

    pub fn with_role(&self, role: VarRole) -> Vec<Var> {
        self.iter().filter(|(_, v)| v.role == role).map(|(id, _)| id).collect()
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
