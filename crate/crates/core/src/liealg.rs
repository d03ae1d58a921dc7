//! The symmetry algebra: structure constants, adjoint actions, the invariant
//! system and verification of optimal-system representatives.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, CatalogError};
use crate::expr::{Builtin, Expr, Name, Q};
use crate::jetcalc::{Generator, JetError};
use crate::linalg::QMatrix;
use crate::symmetry::{self, SymmetryError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("[S{0}, S{1}] is not in the span of the basis")]
    NotClosed(usize, usize),
    #[error("entry `{0}` is not linear in the basis symbols")]
    NotLinear(String),
    #[error("ad matrix of S{0} has non-integer spectrum")]
    NotExponentiable(usize),
    #[error("`{0}` does not evaluate to a rational")]
    NotRational(String),
}

/// `[g1, g2]` on coefficients: `g1(g2^k) - g2(g1^k)`.
pub fn commutator(g1: &Generator, g2: &Generator) -> Result<Generator, LieError> {
    let mut coeffs = Vec::new();
    for (a, b) in g2.coefficients().zip(g1.coefficients()) {
        coeffs.push((g1.apply_to(a)? - g2.apply_to(b)?).expand());
    }
    let eta = coeffs.split_off(g1.xi.len());
    Ok(Generator {
        indep: g1.indep.clone(),
        xi: coeffs,
        dep: g1.dep.clone(),
        eta,
    })
}

/// A finite-dimensional Lie algebra given by structure constants
/// `[S_i, S_j] = sum_k c[i][j][k] S_k`, optionally with its generators.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub gens: Vec<Generator>,
    pub c: Vec<Vec<Vec<Q>>>,
}

impl AlgebraBasis {
    /// Structure constants from the generators; fails unless every bracket
    /// closes on the span.
    pub fn new(gens: Vec<Generator>) -> Result<Self, LieError> {
        let n = gens.len();
        let mut c = vec![vec![vec![Q::zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let br = commutator(&gens[i], &gens[j])?;
                if br.is_zero() {
                    continue;
                }
                c[i][j] = symmetry::decompose(&br, &gens).ok_or(LieError::NotClosed(i + 1, j + 1))?;
            }
        }
        Ok(AlgebraBasis { gens, c })
    }

    /// The seven-dimensional algebra with `S5 = d/dq`.
    pub fn kdv() -> Result<Self, LieError> {
        Self::new(symmetry::basis()?)
    }

    pub fn from_constants(c: Vec<Vec<Vec<Q>>>) -> Self {
        AlgebraBasis { gens: Vec::new(), c }
    }

    /// Constants read from the printed commutator cells `comm_i_j`, using
    /// only the cells with `i < j` and antisymmetry.
    pub fn transcribed_upper() -> Result<Self, LieError> {
        let t = transcribed_commutators()?;
        let n = t.len();
        let mut c = vec![vec![vec![Q::zero(); n]; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                c[i][j] = t[i][j].clone();
                c[j][i] = t[i][j].iter().map(|q| -q).collect();
            }
        }
        Ok(Self::from_constants(c))
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn bracket(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let f = &x[i] * &y[j];
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        out[k] += &f * &self.c[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// `M[i][k]`: coefficient of `S_k` in `[S_w, S_i]`.
    pub fn ad_matrix(&self, w: usize) -> QMatrix {
        QMatrix::from_rows(self.c[w].clone())
    }

    /// Pairs `(i, j)` with `c_ij != -c_ji`.
    pub fn antisymmetry_violations(&self) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let ok = (0..n).all(|k| (&self.c[i][j][k] + &self.c[j][i][k]).is_zero());
                if !ok {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let n = self.dim();
        let e = |i: usize| -> Vec<Q> { (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect() };
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (e(i), e(j), e(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    if (0..n).any(|m| !(&t1[m] + &t2[m] + &t3[m]).is_zero()) {
                        out.push((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        out
    }
}

fn basis_symbol(k: usize) -> Name {
    format!("S{}", k + 1).into()
}

fn eps_symbol(w: usize) -> Name {
    format!("eps{}", w + 1).into()
}

/// `sum_k v[k] S_k` in the symbols `S1 .. S7`.
pub fn combination(v: &[Q]) -> Expr {
    Expr::add(
        v.iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(k, q)| Expr::sym(basis_symbol(k)).scale(q)),
    )
}

/// Coordinates of an expression linear in `S1 .. S{n}` with rational
/// coefficients.
fn coordinates(e: &Expr, n: usize) -> Result<Vec<Q>, LieError> {
    let e = e.expand();
    let mut out = vec![Q::zero(); n];
    let mut rebuilt = Vec::new();
    for (k, slot) in out.iter_mut().enumerate() {
        let s = basis_symbol(k);
        let d = e.partial_sym(&s).map_err(JetError::from)?.expand();
        let Some(q) = d.as_num() else {
            return Err(LieError::NotLinear(e.to_string()));
        };
        *slot = q.clone();
        rebuilt.push(Expr::sym(s).scale(q));
    }
    if !(&e - Expr::add(rebuilt)).expand().is_zero() {
        return Err(LieError::NotLinear(e.to_string()));
    }
    Ok(out)
}

/// Printed commutator cells as coordinate vectors, `t[i][j]`.
pub fn transcribed_commutators() -> Result<Vec<Vec<Vec<Q>>>, LieError> {
    let cat = catalog::tables();
    let mut t = vec![vec![Vec::new(); 7]; 7];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = coordinates(&cat.expr(&format!("comm_{}_{}", i + 1, j + 1))?, 7)?;
        }
    }
    Ok(t)
}

/// Entry of an adjoint matrix: `sum q * eps^p * exp(r * eps)` keyed by
/// `(r, p)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpPoly(pub BTreeMap<(i64, u32), Q>);

impl ExpPoly {
    pub fn constant(q: Q) -> Self {
        let mut m = BTreeMap::new();
        if !q.is_zero() {
            m.insert((0, 0), q);
        }
        ExpPoly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, key: (i64, u32), q: Q) {
        let e = self.0.entry(key).or_insert_with(Q::zero);
        *e += q;
        if e.is_zero() {
            self.0.remove(&key);
        }
    }

    pub fn add(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        for (k, q) in &other.0 {
            out.add_term(*k, q.clone());
        }
        out
    }

    pub fn mul(&self, other: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::default();
        for ((r1, p1), q1) in &self.0 {
            for ((r2, p2), q2) in &other.0 {
                out.add_term((r1 + r2, p1 + p2), q1 * q2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> ExpPoly {
        let mut out = ExpPoly::default();
        for (k, q) in &self.0 {
            out.add_term(*k, q * c);
        }
        out
    }

    /// Coefficient of `eps^1` in the Taylor expansion at 0.
    pub fn linear_coefficient(&self) -> Q {
        let mut acc = Q::zero();
        for ((r, p), q) in &self.0 {
            match p {
                0 => acc += q * Q::from_integer((*r).into()),
                1 => acc += q,
                _ => {}
            }
        }
        acc
    }

    /// Value at a rational `eps`; needs every exponential rate to vanish
    /// unless `eps = 0`.
    pub fn at(&self, eps: &Q) -> Option<Q> {
        let mut acc = Q::zero();
        for ((r, p), q) in &self.0 {
            if *r != 0 && !eps.is_zero() {
                return None;
            }
            acc += q * num_traits::pow(eps.clone(), *p as usize);
        }
        Some(acc)
    }

    pub fn to_expr(&self, eps: &Name) -> Expr {
        let e = Expr::sym(eps.clone());
        Expr::add(self.0.iter().map(|((r, p), q)| {
            let mut f = vec![Expr::num(q.clone()), e.pow(*p as i64)];
            if *r != 0 {
                f.push(Expr::call(Builtin::Exp, e.scale(&Q::from_integer((*r).into()))));
            }
            Expr::mul(f)
        }))
        .expand()
    }
}

/// Square matrix of [`ExpPoly`] entries in one parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjointMatrix {
    pub w: usize,
    pub entries: Vec<Vec<ExpPoly>>,
}

impl AdjointMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn at(&self, eps: &Q) -> Option<QMatrix> {
        let rows = self
            .entries
            .iter()
            .map(|r| r.iter().map(|e| e.at(eps)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(QMatrix::from_rows(rows))
    }

    pub fn entry_expr(&self, i: usize, j: usize) -> Expr {
        self.entries[i][j].to_expr(&eps_symbol(self.w))
    }

    /// `v A`, the image of the coordinate row vector `v`.
    pub fn act(&self, v: &[ExpPoly]) -> Vec<ExpPoly> {
        let n = self.dim();
        (0..n)
            .map(|j| (0..n).fold(ExpPoly::default(), |acc, i| acc.add(&v[i].mul(&self.entries[i][j]))))
            .collect()
    }
}

fn factorial(n: u32) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * Q::from_integer(i.into()))
}

/// `exp(eps * n)` for a matrix whose eigenvalues are integers, from the
/// spectral projectors and the nilpotent parts on each generalized
/// eigenspace.
pub fn exp_matrix(n: &QMatrix, w: usize) -> Result<AdjointMatrix, LieError> {
    let dim = n.rows;
    let bound = (0..dim)
        .map(|i| n.row(i).iter().fold(Q::zero(), |acc, q| acc + q.abs()))
        .fold(Q::zero(), |a, b| if b > a { b } else { a })
        .ceil()
        .to_integer();
    let bound: i64 = bound.try_into().map_err(|_| LieError::NotExponentiable(w + 1))?;
    let mut spaces: Vec<(i64, Vec<Vec<Q>>)> = Vec::new();
    for lam in -bound..=bound {
        let shifted = n.add(&QMatrix::identity(dim).scale(&Q::from_integer((-lam).into())));
        let ker = shifted.pow(dim as u32).nullspace();
        if !ker.is_empty() {
            spaces.push((lam, ker));
        }
    }
    let total: usize = spaces.iter().map(|(_, k)| k.len()).sum();
    if total != dim {
        return Err(LieError::NotExponentiable(w + 1));
    }
    let cols: Vec<Vec<Q>> = spaces.iter().flat_map(|(_, k)| k.iter().cloned()).collect();
    let p = QMatrix::from_rows(cols).transpose();
    let pinv = p.inverse().ok_or(LieError::NotExponentiable(w + 1))?;
    let mut entries = vec![vec![ExpPoly::default(); dim]; dim];
    let mut offset = 0;
    for (lam, ker) in &spaces {
        let mut sel = QMatrix::zeros(dim, dim);
        for i in offset..offset + ker.len() {
            sel[(i, i)] = Q::one();
        }
        offset += ker.len();
        let proj = p.mul(&sel).mul(&pinv);
        let nil = n.add(&QMatrix::identity(dim).scale(&Q::from_integer((-lam).into())));
        let mut power = proj.clone();
        for k in 0..ker.len() as u32 {
            if power.is_zero() {
                break;
            }
            let c = factorial(k).recip();
            for i in 0..dim {
                for j in 0..dim {
                    if !power[(i, j)].is_zero() {
                        entries[i][j].add_term((*lam, k), &power[(i, j)] * &c);
                    }
                }
            }
            power = nil.mul(&power);
        }
    }
    Ok(AdjointMatrix { w, entries })
}

/// `Ad_{exp(eps S_w)} = exp(-eps ad_{S_w})` in the row-vector convention:
/// row `i` holds the image of `S_i`.
pub fn adjoint_matrix(alg: &AlgebraBasis, w: usize) -> Result<AdjointMatrix, LieError> {
    exp_matrix(&alg.ad_matrix(w).scale(&-Q::one()), w)
}

/// `Ad_{exp(eps S_w)}(s)` for `s` given by rational coordinates.
pub fn adjoint_action(alg: &AlgebraBasis, w: usize, s: &[Q]) -> Result<Vec<ExpPoly>, LieError> {
    let a = adjoint_matrix(alg, w)?;
    let v: Vec<ExpPoly> = s.iter().map(|q| ExpPoly::constant(q.clone())).collect();
    Ok(a.act(&v))
}

/// Cell `(i, j)` of the commutator table as text in `S1 .. S7`.
pub fn commutator_table(alg: &AlgebraBasis) -> Vec<Vec<Expr>> {
    let n = alg.dim();
    (0..n).map(|i| (0..n).map(|j| combination(&alg.c[i][j])).collect()).collect()
}

/// Cell `(i, j)`: `Ad_{exp(eps_i S_i)}(S_j)`.
pub fn adjoint_table(alg: &AlgebraBasis) -> Result<Vec<Vec<Expr>>, LieError> {
    let n = alg.dim();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = adjoint_matrix(alg, i)?;
        let row = (0..n)
            .map(|j| {
                Expr::add((0..n).map(|k| a.entry_expr(j, k) * Expr::sym(basis_symbol(k)))).expand()
            })
            .collect();
        out.push(row);
    }
    Ok(out)
}

/// One cell where a recomputed table differs from the printed one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellDiff {
    pub table: String,
    pub cell: String,
    pub computed: String,
    pub printed: String,
}

impl fmt::Display for CellDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: computed {}, printed {}", self.table, self.cell, self.computed, self.printed)
    }
}

fn diff_cell(table: &str, cell: String, computed: &Expr, entry: &str) -> Result<Option<CellDiff>, LieError> {
    let printed = catalog::tables().expr(entry)?;
    if (computed - &printed).expand().is_zero() {
        return Ok(None);
    }
    Ok(Some(CellDiff {
        table: table.into(),
        cell,
        computed: computed.to_string(),
        printed: printed.to_string(),
    }))
}

pub fn commutator_diffs(alg: &AlgebraBasis) -> Result<Vec<CellDiff>, LieError> {
    let t = commutator_table(alg);
    let mut out = Vec::new();
    for (i, row) in t.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let cell = format!("({},{})", i + 1, j + 1);
            out.extend(diff_cell("commutator", cell, e, &format!("comm_{}_{}", i + 1, j + 1))?);
        }
    }
    Ok(out)
}

pub fn adjoint_diffs(alg: &AlgebraBasis) -> Result<Vec<CellDiff>, LieError> {
    let t = adjoint_table(alg)?;
    let mut out = Vec::new();
    for (i, row) in t.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let cell = format!("({},{})", i + 1, j + 1);
            out.extend(diff_cell("adjoint", cell, e, &format!("ad_{}_{}", i + 1, j + 1))?);
        }
    }
    Ok(out)
}

pub fn matrix_diffs(alg: &AlgebraBasis) -> Result<Vec<CellDiff>, LieError> {
    let n = alg.dim();
    let mut out = Vec::new();
    for w in 0..n {
        let a = adjoint_matrix(alg, w)?;
        for i in 0..n {
            for j in 0..n {
                let cell = format!("({},{})", i + 1, j + 1);
                let name = format!("A{}_{}_{}", w + 1, i + 1, j + 1);
                out.extend(diff_cell(&format!("A{}", w + 1), cell, &a.entry_expr(i, j), &name)?);
            }
        }
    }
    Ok(out)
}

/// Which form of the fifth generator makes the printed commutator rows
/// `[S1, S6] = -1/6 S5` and `[S5, S7] = -S5` hold.
#[derive(Debug, Clone, Serialize)]
pub struct S5Adjudication {
    /// `eta = t` closes on the span.
    pub printed_closes: bool,
    pub printed_rows_hold: bool,
    pub unit_closes: bool,
    pub unit_rows_hold: bool,
    /// `"d/dq"` or `"t*d/dq"`.
    pub chosen: String,
}

pub fn adjudicate_s5() -> Result<S5Adjudication, LieError> {
    let unit = symmetry::basis()?;
    let mut printed = unit.clone();
    printed[4] = symmetry::catalog_generator("S5")?;
    let rows_hold = |b: &[Generator]| -> Result<bool, LieError> {
        let r16 = commutator(&b[0], &b[5])?;
        let r57 = commutator(&b[4], &b[6])?;
        let want16 = b[4].scale(&Q::new((-1).into(), 6.into()));
        let want57 = b[4].scale(&-Q::one());
        Ok(r16.plus(&want16.scale(&-Q::one())).is_zero() && r57.plus(&want57.scale(&-Q::one())).is_zero())
    };
    let printed_closes = AlgebraBasis::new(printed.clone()).is_ok();
    let unit_closes = AlgebraBasis::new(unit.clone()).is_ok();
    let printed_rows_hold = rows_hold(&printed)?;
    let unit_rows_hold = rows_hold(&unit)?;
    let chosen = if unit_closes && unit_rows_hold { "d/dq" } else { "t*d/dq" };
    Ok(S5Adjudication {
        printed_closes,
        printed_rows_hold,
        unit_closes,
        unit_rows_hold,
        chosen: chosen.into(),
    })
}

fn indexed(prefix: &str, i: usize) -> Expr {
    Expr::sym(format!("{prefix}{}", i + 1))
}

/// `Theta_i`, the components of `[a.S, b.S]`.
pub fn theta(alg: &AlgebraBasis) -> Vec<Expr> {
    let n = alg.dim();
    (0..n)
        .map(|k| {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let c = &alg.c[i][j][k];
                    if !c.is_zero() {
                        terms.push((indexed("a", i) * indexed("b", j)).scale(c));
                    }
                }
            }
            Expr::add(terms).expand()
        })
        .collect()
}

/// Symbol standing for `dPhi/da_i`.
pub fn phi_partial(i: usize) -> Name {
    format!("Phi_a{}", i + 1).into()
}

/// Coefficients of `b_j` in `sum_i Theta_i dPhi/da_i`.
pub fn phi_system(theta: &[Expr]) -> Result<Vec<Expr>, LieError> {
    let n = theta.len();
    let sum = Expr::add(theta.iter().enumerate().map(|(i, t)| t * Expr::sym(phi_partial(i)))).expand();
    (0..n)
        .map(|j| Ok(sum.partial_sym(&format!("b{}", j + 1).into()).map_err(JetError::from)?.expand()))
        .collect()
}

/// Members of the system that do not vanish for the candidate `phi`.
pub fn phi_violations(system: &[Expr], phi: &Expr) -> Result<Vec<Expr>, LieError> {
    let n = system.len();
    let mut vals = HashMap::new();
    for i in 0..n {
        let d = phi.partial_sym(&format!("a{}", i + 1).into()).map_err(JetError::from)?;
        vals.insert(phi_partial(i), d);
    }
    Ok(system
        .iter()
        .map(|e| e.subst_syms(&vals).expand())
        .filter(|e| !e.is_zero())
        .collect())
}

/// The printed `Theta_i`.
pub fn transcribed_theta() -> Result<Vec<Expr>, LieError> {
    let cat = catalog::tables();
    (1..=7)
        .map(|i| Ok(cat.expr(&format!("theta_{i}"))?.expand()))
        .collect()
}

/// Printed group parameters `eps_1 .. eps_6` for the `a7 = 1` case.
pub fn representative_eps() -> Result<Vec<Expr>, LieError> {
    let cat = catalog::tables();
    (1..=6).map(|i| Ok(cat.expr(&format!("rep_eps_{i}"))?)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RepresentativeReport {
    pub a: Vec<String>,
    pub eps: Vec<String>,
    pub result: Vec<String>,
    pub residual: Vec<String>,
    pub pass: bool,
}

/// Evaluates `eps` at `a`, forms `a A_1(eps_1) ... A_n(eps_n)` and compares
/// with `target`. Missing trailing parameters are zero.
pub fn verify_optimal_representative(
    alg: &AlgebraBasis,
    a: &[Q],
    eps: &[Expr],
    target: &[Q],
) -> Result<RepresentativeReport, LieError> {
    let n = alg.dim();
    let vals: HashMap<Name, Expr> = a
        .iter()
        .enumerate()
        .map(|(i, q)| (Name::from(format!("a{}", i + 1)), Expr::num(q.clone())))
        .collect();
    let mut eps_vals = Vec::with_capacity(n);
    for w in 0..n {
        let v = match eps.get(w) {
            Some(e) => {
                let v = e.subst_syms(&vals).expand();
                v.as_num().cloned().ok_or_else(|| LieError::NotRational(v.to_string()))?
            }
            None => Q::zero(),
        };
        eps_vals.push(v);
    }
    let mut row = QMatrix::from_rows(vec![a.to_vec()]);
    for (w, e) in eps_vals.iter().enumerate() {
        let m = adjoint_matrix(alg, w)?
            .at(e)
            .ok_or_else(|| LieError::NotRational(format!("exp at eps{} = {e}", w + 1)))?;
        row = row.mul(&m);
    }
    let result: Vec<Q> = row.row(0).to_vec();
    let residual: Vec<Q> = result.iter().zip(target).map(|(r, t)| r - t).collect();
    let show = |v: &[Q]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    Ok(RepresentativeReport {
        a: show(a),
        eps: show(&eps_vals),
        result: show(&result),
        pass: residual.iter().all(Zero::is_zero),
        residual: show(&residual),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, q, qi, Context};

    fn table_expr(s: &str) -> Expr {
        let ctx = Context::kdv().constants(&["S1", "S2", "S3", "S4", "S5", "S6", "S7"]);
        parse(s, &ctx).unwrap().expand()
    }

    #[test]
    fn brackets() {
        let alg = AlgebraBasis::kdv().unwrap();
        let t = commutator_table(&alg);
        assert!(t[0][1].is_zero());
        assert_eq!(t[0][5], table_expr("-1/6*S5"));
        assert_eq!(t[1][5], table_expr("-3/2*S5"));
        assert_eq!(t[2][5], table_expr("-3/2*S5"));
        assert_eq!(t[3][5], table_expr("S1"));
        assert_eq!(t[4][6], table_expr("-S5"));
        assert_eq!(t[5][6], table_expr("-2*S6"));
        assert!(alg.antisymmetry_violations().is_empty());
        assert!(alg.jacobi_violations().is_empty());
    }

    #[test]
    fn adjoint_examples() {
        let alg = AlgebraBasis::kdv().unwrap();
        let ad = adjoint_table(&alg).unwrap();
        assert_eq!(ad[6][3], table_expr("exp(3*eps7)*S4"));
        assert_eq!(ad[0][6], table_expr("S7 - eps1*S1"));
        for w in 0..7 {
            let a = adjoint_matrix(&alg, w).unwrap();
            assert_eq!(a.at(&Q::zero()).unwrap(), QMatrix::identity(7));
        }
    }

    #[test]
    fn abelian_theta_vanishes() {
        let alg = AlgebraBasis::from_constants(vec![vec![vec![Q::zero(); 3]; 3]; 3]);
        assert!(theta(&alg).iter().all(Expr::is_zero));
    }

    #[test]
    fn theta_and_phi() {
        let alg = AlgebraBasis::kdv().unwrap();
        let th = theta(&alg);
        assert_eq!(th[3], parse("3*a4*b7 - 3*b4*a7", &Context::kdv()).unwrap());
        let sys = phi_system(&th).unwrap();
        assert!(phi_violations(&sys, &Expr::sym("a7")).unwrap().is_empty());
        assert!(!phi_violations(&sys, &Expr::sym("a1")).unwrap().is_empty());
    }

    #[test]
    fn identity_representative() {
        let alg = AlgebraBasis::kdv().unwrap();
        let mut e6 = vec![Q::zero(); 7];
        e6[5] = Q::one();
        let r = verify_optimal_representative(&alg, &e6, &[], &e6).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn exp_of_jordan_block() {
        let n = QMatrix::from_rows(vec![vec![qi(2), qi(1)], vec![qi(0), qi(2)]]);
        let a = exp_matrix(&n, 0).unwrap();
        assert_eq!(a.entry_expr(0, 1), parse("eps1*exp(2*eps1)", &Context::kdv()).unwrap());
        let rot = QMatrix::from_rows(vec![vec![qi(0), qi(-1)], vec![qi(1), qi(0)]]);
        assert!(matches!(exp_matrix(&rot, 0), Err(LieError::NotExponentiable(1))));
        assert_eq!(a.entries[0][0].linear_coefficient(), q(2, 1));
    }
}
