use std::fmt::Write;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{render, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjSense {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Eq => lhs == rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// A sparse row `sum coeffs (relation) rhs`. Coefficients are sorted by
/// variable and never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }
}

/// `opt c·x` subject to sparse rows and per-variable bounds
/// `lower <= x <= upper`, where `upper = None` means unbounded above.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LpProblem {
    pub sense: ObjSense,
    pub objective: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Option<Rational>>,
    pub rows: Vec<Row>,
    pub names: Vec<String>,
}

impl LpProblem {
    pub fn new(sense: ObjSense) -> Self {
        LpProblem {
            sense,
            objective: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            rows: Vec::new(),
            names: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: Rational,
        upper: Option<Rational>,
        cost: Rational,
    ) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.names.push(name.into());
        self.objective.len() - 1
    }

    /// Adds a row; duplicate variables are summed and zero coefficients dropped.
    pub fn add_row(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> usize {
        let mut coeffs = coeffs;
        coeffs.sort_by_key(|(j, _)| *j);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(coeffs.len());
        for (j, a) in coeffs {
            match merged.last_mut() {
                Some((lj, la)) if *lj == j => *la += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        self.rows.push(Row {
            coeffs: merged,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::contract("bound vectors do not match the objective length"));
        }
        for j in 0..n {
            if let Some(u) = &self.upper[j] {
                if u < &self.lower[j] {
                    return Err(Error::contract(format!("variable {j}: lower bound exceeds upper bound")));
                }
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if row.coeffs.iter().any(|(j, _)| *j >= n) {
                return Err(Error::contract(format!("row {r} references an unknown variable")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, v)| c * v)
            .sum()
    }

    /// Exact membership test for the feasible region.
    pub fn check_point(&self, x: &[Rational]) -> PointCheck {
        assert_eq!(x.len(), self.num_vars(), "point dimension mismatch");
        for (j, v) in x.iter().enumerate() {
            if v < &self.lower[j] {
                return PointCheck::Violated(Violation::Lower(j));
            }
            if self.upper[j].as_ref().is_some_and(|u| v > u) {
                return PointCheck::Violated(Violation::Upper(j));
            }
        }
        for (r, row) in self.rows.iter().enumerate() {
            if !row.relation.holds(&row.eval(x), &row.rhs) {
                return PointCheck::Violated(Violation::Row(r));
            }
        }
        PointCheck::Feasible
    }

    /// Rows satisfied with equality at `x`.
    pub fn tight_rows(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| self.rows[r].eval(x) == self.rows[r].rhs)
            .collect()
    }

    fn write_linear(out: &mut String, names: &[String], coeffs: impl Iterator<Item = (usize, Rational)>) {
        let mut first = true;
        for (j, a) in coeffs {
            let sign = if a.is_negative() { "-" } else { "+" };
            let mag = a.abs();
            if first {
                if a.is_negative() {
                    out.push_str("- ");
                }
            } else {
                let _ = write!(out, " {sign} ");
            }
            first = false;
            if mag == Rational::from_integer(1.into()) {
                out.push_str(&names[j]);
            } else {
                let _ = write!(out, "{} {}", render(&mag), names[j]);
            }
        }
        if first {
            out.push('0');
        }
    }

    /// The constraints and bounds in LP-text form, without the objective.
    pub fn constraints_text(&self) -> String {
        let mut out = String::from("subject to\n");
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "  r{r}: ");
            Self::write_linear(&mut out, &self.names, row.coeffs.iter().cloned());
            let _ = writeln!(out, " {} {}", row.relation.symbol(), render(&row.rhs));
        }
        out.push_str("bounds\n");
        for j in 0..self.num_vars() {
            let up = self.upper[j].as_ref().map_or("inf".to_string(), render);
            let _ = writeln!(out, "  {} <= {} <= {}", render(&self.lower[j]), self.names[j], up);
        }
        out.push_str("end\n");
        out
    }

    /// Full LP-text dump with exact `p/q` coefficients.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::from(match self.sense {
            ObjSense::Max => "maximize\n  obj: ",
            ObjSense::Min => "minimize\n  obj: ",
        });
        Self::write_linear(
            &mut out,
            &self.names,
            self.objective
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j, c.clone())),
        );
        out.push('\n');
        out.push_str(&self.constraints_text());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Lower(usize),
    Upper(usize),
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointCheck {
    Feasible,
    Violated(Violation),
}

impl PointCheck {
    pub fn is_feasible(self) -> bool {
        self == PointCheck::Feasible
    }
}
