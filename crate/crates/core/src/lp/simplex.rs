use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// `minimize c.x` subject to `A x (rel) b`, `x_i >= l_i` (or free when `l_i` is `None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    objective: Vec<Rational>,
    rows: Vec<Vec<Rational>>,
    relations: Vec<Relation>,
    rhs: Vec<Rational>,
    lower: Vec<Option<Rational>>,
}

impl LpProblem {
    /// An unconstrained problem over `objective.len()` variables, all bounded below by zero.
    pub fn new(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            relations: Vec::new(),
            rhs: Vec::new(),
            lower: vec![Some(Rational::zero()); n],
        }
    }

    pub fn set_lower(&mut self, var: usize, lower: Option<Rational>) {
        self.lower[var] = lower;
    }

    /// Appends a row; panics if `coeffs` has the wrong length.
    pub fn add_row(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars(), "row length must match variable count");
        self.rows.push(coeffs);
        self.relations.push(relation);
        self.rhs.push(rhs);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn lower(&self) -> &[Option<Rational>] {
        &self.lower
    }

    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Every row and bound holds exactly at `x`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        let bounds = self.lower.iter().zip(x).all(|(l, v)| l.as_ref().is_none_or(|l| v >= l));
        bounds
            && self.rows.iter().zip(&self.relations).zip(&self.rhs).all(|((a, rel), b)| {
                let lhs = dot(a, x);
                match rel {
                    Relation::Le => &lhs <= b,
                    Relation::Eq => &lhs == b,
                    Relation::Ge => &lhs >= b,
                }
            })
    }
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).filter(|(c, _)| !c.is_zero()).map(|(c, v)| c * v).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point in the original variables (empty unless optimal).
    pub point: Vec<Rational>,
    pub objective: Rational,
    /// Final basis, as column indices of the internal standard form.
    pub basis: Vec<usize>,
    /// Dual multipliers, one per original row (empty unless optimal).
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    /// Re-checks optimality from the problem data alone: primal feasibility,
    /// dual feasibility of `(y, z = c - A^T y)` and equal objective values.
    pub fn certify(&self, p: &LpProblem) -> Result<(), String> {
        if self.status != LpStatus::Optimal {
            return Err(format!("status is {}", self.status));
        }
        if !p.is_feasible(&self.point) {
            return Err("point violates a constraint".into());
        }
        if p.evaluate(&self.point) != self.objective {
            return Err("reported objective differs from c.x".into());
        }
        if self.duals.len() != p.num_rows() {
            return Err("dual vector has wrong length".into());
        }
        for (r, (y, rel)) in self.duals.iter().zip(p.relations()).enumerate() {
            let ok = match rel {
                Relation::Le => !y.is_positive(),
                Relation::Ge => !y.is_negative(),
                Relation::Eq => true,
            };
            if !ok {
                return Err(format!("dual {r} has the wrong sign"));
            }
        }
        let mut dual_obj = dot(&self.duals, p.rhs());
        for i in 0..p.num_vars() {
            let aty: Rational = p.rows().iter().zip(&self.duals).map(|(row, y)| &row[i] * y).sum();
            let z = &p.objective()[i] - aty;
            match &p.lower()[i] {
                Some(l) => {
                    if z.is_negative() {
                        return Err(format!("reduced cost of variable {i} is negative"));
                    }
                    dual_obj += &z * l;
                }
                None => {
                    if !z.is_zero() {
                        return Err(format!("free variable {i} has nonzero reduced cost"));
                    }
                }
            }
        }
        if dual_obj != self.objective {
            return Err(format!("duality gap: primal {} dual {}", self.objective, dual_obj));
        }
        Ok(())
    }
}

/// Where an original variable lives in the standard form.
#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lower + y`.
    Shifted { col: usize, lower: Rational },
    /// `x = y_plus - y_minus`.
    Split { plus: usize, minus: usize },
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the right-hand side.
    t: Vec<Vec<Rational>>,
    /// Reduced costs, with the negated objective value in the last entry.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.t[r][self.ncols]
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut obj: Vec<Rational> = costs.to_vec();
        obj.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(&self.t[r]) {
                if !v.is_zero() {
                    *o -= cb * v;
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let prow = std::mem::take(&mut self.t[r]);
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| !prow[k].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &k in &nz {
                row[k] -= &f * &prow[k];
            }
        };
        for row in self.t.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.t[r] = prow;
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Primal simplex with Bland's rule; columns `>= allowed` never enter.
    fn run(&mut self, allowed: usize) -> Outcome {
        loop {
            let Some(c) = (0..allowed).find(|&k| self.obj[k].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Outcome::Unbounded,
            }
        }
    }
}

/// Two-phase primal simplex over exact rationals with Bland's anti-cycling rule.
pub fn simplex_solve(p: &LpProblem) -> LpSolution {
    let n = p.num_vars();
    let m = p.num_rows();

    // structural columns
    let mut vars = Vec::with_capacity(n);
    let mut ncols = 0;
    for l in p.lower() {
        match l {
            Some(l) => {
                vars.push(VarMap::Shifted { col: ncols, lower: l.clone() });
                ncols += 1;
            }
            None => {
                vars.push(VarMap::Split { plus: ncols, minus: ncols + 1 });
                ncols += 2;
            }
        }
    }
    let n_struct = ncols;

    // rows over structural columns, normalized to rhs >= 0 (and `<=` when rhs == 0)
    let mut rows: Vec<(Vec<Rational>, Relation, Rational, bool)> = Vec::with_capacity(m);
    for ((a, rel), b) in p.rows().iter().zip(p.relations()).zip(p.rhs()) {
        let mut coeffs = vec![Rational::zero(); n_struct];
        let mut rhs = b.clone();
        for (v, coef) in vars.iter().zip(a) {
            if coef.is_zero() {
                continue;
            }
            match v {
                VarMap::Shifted { col, lower } => {
                    coeffs[*col] = coef.clone();
                    rhs -= coef * lower;
                }
                VarMap::Split { plus, minus } => {
                    coeffs[*plus] = coef.clone();
                    coeffs[*minus] = -coef;
                }
            }
        }
        let negate = rhs.is_negative() || (rhs.is_zero() && *rel == Relation::Ge);
        if negate {
            coeffs.iter_mut().for_each(|c| *c = -c.clone());
            rows.push((coeffs, rel.flipped(), -rhs, true));
        } else {
            rows.push((coeffs, *rel, rhs, false));
        }
    }

    // slack/surplus columns, then artificials
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = n_struct + n_slack;
    ncols = art_start + n_art;

    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity_col = Vec::with_capacity(m);
    let (mut s, mut a) = (n_struct, art_start);
    for (coeffs, rel, rhs, _) in &rows {
        let mut row = coeffs.clone();
        row.resize(ncols + 1, Rational::zero());
        row[ncols] = rhs.clone();
        match rel {
            Relation::Le => {
                row[s] = Rational::one();
                basis.push(s);
                identity_col.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -Rational::one();
                row[a] = Rational::one();
                basis.push(a);
                identity_col.push(a);
                s += 1;
                a += 1;
            }
            Relation::Eq => {
                row[a] = Rational::one();
                basis.push(a);
                identity_col.push(a);
                a += 1;
            }
        }
        t.push(row);
    }

    let mut tab = Tableau { t, obj: Vec::new(), basis, ncols, pivots: 0 };

    let failed = |status: LpStatus, tab: &Tableau| LpSolution {
        status,
        point: Vec::new(),
        objective: Rational::zero(),
        basis: tab.basis.clone(),
        duals: Vec::new(),
        pivots: tab.pivots,
    };

    // phase one
    if n_art > 0 {
        let mut costs = vec![Rational::zero(); ncols];
        costs[art_start..].iter_mut().for_each(|c| *c = Rational::one());
        tab.set_costs(&costs);
        tab.run(ncols);
        if !tab.obj[ncols].is_zero() {
            return failed(LpStatus::Infeasible, &tab);
        }
        // drive zero-valued artificials out of the basis where possible
        for r in 0..m {
            if tab.basis[r] < art_start {
                continue;
            }
            if let Some(c) = (0..art_start).find(|&k| !tab.t[r][k].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }

    // phase two
    let mut costs = vec![Rational::zero(); ncols];
    for (v, c) in vars.iter().zip(p.objective()) {
        match v {
            VarMap::Shifted { col, .. } => costs[*col] = c.clone(),
            VarMap::Split { plus, minus } => {
                costs[*plus] = c.clone();
                costs[*minus] = -c;
            }
        }
    }
    tab.set_costs(&costs);
    if let Outcome::Unbounded = tab.run(art_start) {
        return failed(LpStatus::Unbounded, &tab);
    }

    let mut values = vec![Rational::zero(); ncols];
    for (r, &b) in tab.basis.iter().enumerate() {
        values[b] = tab.rhs(r).clone();
    }
    let point: Vec<Rational> = vars
        .iter()
        .map(|v| match v {
            VarMap::Shifted { col, lower } => lower + &values[*col],
            VarMap::Split { plus, minus } => &values[*plus] - &values[*minus],
        })
        .collect();
    let duals = rows
        .iter()
        .zip(&identity_col)
        .map(|((_, _, _, negated), &col)| {
            let y = -tab.obj[col].clone();
            if *negated {
                -y
            } else {
                y
            }
        })
        .collect();
    LpSolution {
        status: LpStatus::Optimal,
        objective: p.evaluate(&point),
        point,
        basis: tab.basis.clone(),
        duals,
        pivots: tab.pivots,
    }
}
