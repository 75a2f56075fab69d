use std::collections::HashMap;

use crate::LpError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    /// Sparse row; each variable appears at most once.
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimization problem over named, bounded variables and named linear rows.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    cons: Vec<Constraint>,
    var_index: HashMap<String, usize>,
    con_index: HashMap<String, usize>,
}

impl PartialEq for LinearProgram {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.cons == other.cons
    }
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> Result<VarId, LpError> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(LpError::BadBounds { name, lower, upper });
        }
        if !cost.is_finite() {
            return Err(LpError::NonFinite(format!("cost of `{name}`")));
        }
        if self.var_index.contains_key(&name) {
            return Err(LpError::DuplicateName(name));
        }
        let id = self.vars.len();
        self.var_index.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            lower,
            upper,
            cost,
        });
        Ok(VarId(id))
    }

    /// Adds a row. Repeated variables in `terms` are summed, zero coefficients dropped.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> Result<ConId, LpError> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(LpError::NonFinite(format!("rhs of `{name}`")));
        }
        if self.con_index.contains_key(&name) {
            return Err(LpError::DuplicateName(name));
        }
        let mut row: Vec<(VarId, f64)> = Vec::new();
        for (v, a) in terms {
            if v.0 >= self.vars.len() {
                return Err(LpError::UnknownVariable(format!("#{} in `{name}`", v.0)));
            }
            if !a.is_finite() {
                return Err(LpError::NonFinite(format!("coefficient in `{name}`")));
            }
            match row.iter_mut().find(|(w, _)| *w == v) {
                Some(t) => t.1 += a,
                None => row.push((v, a)),
            }
        }
        row.retain(|(_, a)| *a != 0.0);
        let id = self.cons.len();
        self.con_index.insert(name.clone(), id);
        self.cons.push(Constraint {
            name,
            terms: row,
            sense,
            rhs,
        });
        Ok(ConId(id))
    }

    pub fn set_cost(&mut self, v: VarId, cost: f64) {
        self.vars[v.0].cost = cost;
    }

    pub fn set_bounds(&mut self, v: VarId, lower: f64, upper: f64) -> Result<(), LpError> {
        let var = &mut self.vars[v.0];
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(LpError::BadBounds {
                name: var.name.clone(),
                lower,
                upper,
            });
        }
        var.lower = lower;
        var.upper = upper;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.cons
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.var_index.get(name).copied().map(VarId)
    }

    pub fn constraint(&self, name: &str) -> Option<ConId> {
        self.con_index.get(name).copied().map(ConId)
    }

    pub fn n_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.cons.len()
    }

    pub fn n_nonzeros(&self) -> usize {
        self.cons.iter().map(|c| c.terms.len()).sum()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, x)| v.cost * x).sum()
    }

    pub fn row_activity(&self, c: ConId, x: &[f64]) -> f64 {
        self.cons[c.0].terms.iter().map(|(v, a)| a * x[v.0]).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, x) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        for (i, c) in self.cons.iter().enumerate() {
            let lhs = self.row_activity(ConId(i), x);
            let viol = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_input() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(lp.add_var("x", 0.0, 1.0, 0.0), Err(LpError::DuplicateName(_))));
        assert!(matches!(lp.add_var("y", 2.0, 1.0, 0.0), Err(LpError::BadBounds { .. })));
        assert!(matches!(lp.add_var("z", 0.0, 1.0, f64::NAN), Err(LpError::NonFinite(_))));
        assert!(lp.add_constraint("c", [(x, f64::INFINITY)], Sense::Le, 1.0).is_err());
        assert!(lp.add_constraint("c", [(VarId(9), 1.0)], Sense::Le, 1.0).is_err());
        lp.add_constraint("c", [(x, 1.0), (x, 2.0)], Sense::Le, 1.0).unwrap();
        assert_eq!(lp.constraints()[0].terms, vec![(x, 3.0)]);
    }
}
