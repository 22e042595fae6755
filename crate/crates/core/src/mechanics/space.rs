use crate::symexpr::{parse_expr, Expr, ExprError, Var, VarRole, VarTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// `T*Q` with coordinates `(q, p)`.
    Symplectic,
    /// `T*Q × ℝ` with coordinates `(q, p, z)`.
    Contact,
}

impl SpaceKind {
    pub fn multiplier_prefix(self) -> &'static str {
        match self {
            SpaceKind::Symplectic => "lambda",
            SpaceKind::Contact => "u",
        }
    }
}

/// Variable registry for a mechanical system: `q1..qn, v1..vn, p1..pn`,
/// `z` for contact systems, then multipliers (`lambda1..` or `u1..`).
///
/// Growing the multiplier list appends variables, so every expression built
/// over a smaller space stays valid in the larger one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSpace {
    kind: SpaceKind,
    n: usize,
    multipliers: usize,
    vars: VarTable,
}

impl PhaseSpace {
    pub fn new(kind: SpaceKind, n: usize) -> Self {
        PhaseSpace::with_layout(kind, n, 0)
    }

    fn with_layout(kind: SpaceKind, n: usize, multipliers: usize) -> Self {
        let vars = VarTable::mechanics(n, kind == SpaceKind::Contact, kind.multiplier_prefix(), multipliers);
        PhaseSpace {
            kind,
            n,
            multipliers,
            vars,
        }
    }

    /// Same space with at least `count` multipliers.
    pub fn with_multipliers(&self, count: usize) -> Self {
        if count <= self.multipliers {
            self.clone()
        } else {
            PhaseSpace::with_layout(self.kind, self.n, count)
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> &VarTable {
        &self.vars
    }

    /// `q_{i+1}`.
    pub fn q(&self, i: usize) -> Var {
        self.lookup(&format!("q{}", i + 1))
    }

    /// `v_{i+1}`.
    pub fn v(&self, i: usize) -> Var {
        self.lookup(&format!("v{}", i + 1))
    }

    /// `p_{i+1}`.
    pub fn p(&self, i: usize) -> Var {
        self.lookup(&format!("p{}", i + 1))
    }

    pub fn z(&self) -> Option<Var> {
        self.vars.lookup("z")
    }

    /// Multiplier number `i + 1`.
    pub fn multiplier(&self, i: usize) -> Var {
        self.multipliers()[i]
    }

    pub fn multipliers(&self) -> Vec<Var> {
        self.vars.with_role(VarRole::Multiplier)
    }

    pub fn is_multiplier(&self, v: Var) -> bool {
        self.vars.role(v) == VarRole::Multiplier
    }

    pub fn coordinates(&self) -> Vec<Var> {
        (0..self.n).map(|i| self.q(i)).collect()
    }

    pub fn velocities(&self) -> Vec<Var> {
        (0..self.n).map(|i| self.v(i)).collect()
    }

    pub fn momenta(&self) -> Vec<Var> {
        (0..self.n).map(|i| self.p(i)).collect()
    }

    /// Phase-space coordinates `q, p[, z]` in table order.
    pub fn phase_coords(&self) -> Vec<Var> {
        let mut c = self.coordinates();
        c.extend(self.momenta());
        c.extend(self.z());
        c
    }

    /// Coordinates of the (extended) tangent bundle `q, v[, z]`.
    pub fn tangent_coords(&self) -> Vec<Var> {
        let mut c = self.coordinates();
        c.extend(self.velocities());
        c.extend(self.z());
        c
    }

    /// Phase-space dimension `2n` or `2n + 1`.
    pub fn dim(&self) -> usize {
        self.phase_coords().len()
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ExprError> {
        parse_expr(text, &self.vars)
    }

    pub fn render(&self, e: &Expr) -> String {
        e.render(&self.vars)
    }

    pub fn name(&self, v: Var) -> &str {
        self.vars.name(v)
    }

    fn lookup(&self, name: &str) -> Var {
        self.vars.lookup(name).unwrap_or_else(|| panic!("`{name}` is outside the {}-dimensional layout", self.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_growth() {
        let s = PhaseSpace::new(SpaceKind::Contact, 2);
        let names: Vec<_> = s.phase_coords().iter().map(|&v| s.name(v).to_string()).collect();
        assert_eq!(names, ["q1", "q2", "p1", "p2", "z"]);
        assert_eq!(s.dim(), 5);
        let e = s.parse("q2*z").unwrap();
        let g = s.with_multipliers(2);
        assert_eq!(g.render(&e), "q2*z");
        assert_eq!(g.name(g.multiplier(1)), "u2");
        assert!(g.is_multiplier(g.multiplier(0)));
        assert_eq!(PhaseSpace::new(SpaceKind::Symplectic, 1).z(), None);
    }
}
