//! Δ0 interpretations as executable transformations.
//!
//! An [`Interp`] codes each component sort of its output type by a tuple of
//! input sorts, with a domain formula selecting the valid codes and a
//! membership formula interpreting `∈` at every set sort.  Products are
//! always coded componentwise (the coding tuple of `T1 × T2` is the
//! concatenation of the component codings), the Ur-element and unit sorts are
//! preserved, and equivalence of codes is extensional: two codes are
//! equivalent exactly when they collapse to the same value, which makes the
//! quotient construction of the largest-quotient interpretation the default.
//!
//! Evaluation builds the least input structure for an object, enumerates the
//! input matches of each sort, and folds the Mostowski collapse directly
//! into decoding, so the output is a canonical [`Value`].  The module also
//! provides composition, the singleton/union/map/pair/quotient combinators,
//! and both directions of the equivalence between NRC[Get] and Δ0
//! interpretations.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::kernel::{fresh_name, ObjType};
use crate::nrc::{case_expr, typecheck_nrc, NrcError, NrcExpr};
use crate::values::{Value, ValueError, C0 as C0_ATOM};

/// Default step budget for interpreting formulas during one evaluation.
pub const EVAL_BUDGET: u64 = 10_000_000;
/// Default node budget for formulas emitted by translations.
pub const SIZE_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpError {
    #[error("type mismatch: {detail}")]
    TypeMismatch { detail: String },
    #[error("ill-formed interpretation: {detail}")]
    IllFormedInterp { detail: String },
    #[error("emitted formulas of size {size} exceed the budget {budget}")]
    SizeBudgetExceeded { size: usize, budget: usize },
    #[error("evaluation budget exceeded")]
    EvalBudget,
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Nrc(#[from] NrcError),
}

// ---------------------------------------------------------------------------
// first-order formulas over an input structure

/// Terms denoting input-structure elements.  `OIn` is the distinguished
/// input constant; the remaining constants denote the default atom, the unit
/// value, empty sets and the true Boolean `{()}` — all of which exist in
/// every (suitably extended) input structure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FoTerm {
    Var(String),
    OIn,
    C0,
    UnitC,
    EmptyC(ObjType),
    TrueC,
    Pair(Box<FoTerm>, Box<FoTerm>),
    Proj1(Box<FoTerm>),
    Proj2(Box<FoTerm>),
}

impl FoTerm {
    pub fn var(name: impl Into<String>) -> FoTerm {
        FoTerm::Var(name.into())
    }
    pub fn pair(a: FoTerm, b: FoTerm) -> FoTerm {
        FoTerm::Pair(Box::new(a), Box::new(b))
    }
    pub fn proj1(t: FoTerm) -> FoTerm {
        FoTerm::Proj1(Box::new(t))
    }
    pub fn proj2(t: FoTerm) -> FoTerm {
        FoTerm::Proj2(Box::new(t))
    }

    fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            FoTerm::Var(x) => {
                out.insert(x.clone());
            }
            FoTerm::Pair(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            FoTerm::Proj1(a) | FoTerm::Proj2(a) => a.free_vars(out),
            _ => {}
        }
    }

    fn map_vars(&self, f: &dyn Fn(&str) -> Option<FoTerm>) -> FoTerm {
        match self {
            FoTerm::Var(x) => f(x).unwrap_or_else(|| self.clone()),
            FoTerm::Pair(a, b) => FoTerm::pair(a.map_vars(f), b.map_vars(f)),
            FoTerm::Proj1(a) => FoTerm::proj1(a.map_vars(f)),
            FoTerm::Proj2(a) => FoTerm::proj2(a.map_vars(f)),
            other => other.clone(),
        }
    }

    fn subst_oin(&self, repl: &FoTerm) -> FoTerm {
        match self {
            FoTerm::OIn => repl.clone(),
            FoTerm::Pair(a, b) => FoTerm::pair(a.subst_oin(repl), b.subst_oin(repl)),
            FoTerm::Proj1(a) => FoTerm::proj1(a.subst_oin(repl)),
            FoTerm::Proj2(a) => FoTerm::proj2(a.subst_oin(repl)),
            other => other.clone(),
        }
    }

    fn mentions_c0(&self) -> bool {
        match self {
            FoTerm::C0 => true,
            FoTerm::Pair(a, b) => a.mentions_c0() || b.mentions_c0(),
            FoTerm::Proj1(a) | FoTerm::Proj2(a) => a.mentions_c0(),
            _ => false,
        }
    }
}

/// First-order formulas over the input structure.  Quantifiers come in two
/// flavours: bounded by a set-denoting term (the Δ0 discipline) or
/// relativized to the finite carrier of an input sort, which on the least
/// structure of an object is equivalent to bounding by a subobject
/// enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FoFormula {
    Eq(ObjType, FoTerm, FoTerm),
    Mem(ObjType, FoTerm, FoTerm),
    Top,
    Bot,
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    ForallIn(String, ObjType, FoTerm, Box<FoFormula>),
    ExistsIn(String, ObjType, FoTerm, Box<FoFormula>),
    ForallSort(String, ObjType, Box<FoFormula>),
    ExistsSort(String, ObjType, Box<FoFormula>),
}

impl FoFormula {
    pub fn not(f: FoFormula) -> FoFormula {
        FoFormula::Not(Box::new(f))
    }
    pub fn and(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: FoFormula, b: FoFormula) -> FoFormula {
        FoFormula::Or(Box::new(a), Box::new(b))
    }
    pub fn and_all(fs: impl IntoIterator<Item = FoFormula>) -> FoFormula {
        fs.into_iter()
            .reduce(FoFormula::and)
            .unwrap_or(FoFormula::Top)
    }
    pub fn forall_in(x: impl Into<String>, ty: ObjType, t: FoTerm, f: FoFormula) -> FoFormula {
        FoFormula::ForallIn(x.into(), ty, t, Box::new(f))
    }
    pub fn exists_in(x: impl Into<String>, ty: ObjType, t: FoTerm, f: FoFormula) -> FoFormula {
        FoFormula::ExistsIn(x.into(), ty, t, Box::new(f))
    }
    pub fn forall_sort(x: impl Into<String>, ty: ObjType, f: FoFormula) -> FoFormula {
        FoFormula::ForallSort(x.into(), ty, Box::new(f))
    }
    pub fn exists_sort(x: impl Into<String>, ty: ObjType, f: FoFormula) -> FoFormula {
        FoFormula::ExistsSort(x.into(), ty, Box::new(f))
    }

    pub fn size(&self) -> usize {
        match self {
            FoFormula::Eq(..) | FoFormula::Mem(..) | FoFormula::Top | FoFormula::Bot => 1,
            FoFormula::Not(a) => 1 + a.size(),
            FoFormula::And(a, b) | FoFormula::Or(a, b) => 1 + a.size() + b.size(),
            FoFormula::ForallIn(_, _, _, a)
            | FoFormula::ExistsIn(_, _, _, a)
            | FoFormula::ForallSort(_, _, a)
            | FoFormula::ExistsSort(_, _, a) => 1 + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &FoFormula, out: &mut BTreeSet<String>) {
            match f {
                FoFormula::Eq(_, a, b) | FoFormula::Mem(_, a, b) => {
                    a.free_vars(out);
                    b.free_vars(out);
                }
                FoFormula::Top | FoFormula::Bot => {}
                FoFormula::Not(a) => go(a, out),
                FoFormula::And(a, b) | FoFormula::Or(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                FoFormula::ForallIn(x, _, t, a) | FoFormula::ExistsIn(x, _, t, a) => {
                    t.free_vars(out);
                    let mut inner = BTreeSet::new();
                    go(a, &mut inner);
                    inner.remove(x);
                    out.extend(inner);
                }
                FoFormula::ForallSort(x, _, a) | FoFormula::ExistsSort(x, _, a) => {
                    let mut inner = BTreeSet::new();
                    go(a, &mut inner);
                    inner.remove(x);
                    out.extend(inner);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn subst(&self, map: &BTreeMap<String, FoTerm>) -> FoFormula {
        if map.is_empty() {
            return self.clone();
        }
        let lookup = |x: &str| map.get(x).cloned();
        match self {
            FoFormula::Eq(ty, a, b) => {
                FoFormula::Eq(ty.clone(), a.map_vars(&lookup), b.map_vars(&lookup))
            }
            FoFormula::Mem(ty, a, b) => {
                FoFormula::Mem(ty.clone(), a.map_vars(&lookup), b.map_vars(&lookup))
            }
            FoFormula::Top => FoFormula::Top,
            FoFormula::Bot => FoFormula::Bot,
            FoFormula::Not(a) => FoFormula::not(a.subst(map)),
            FoFormula::And(a, b) => FoFormula::and(a.subst(map), b.subst(map)),
            FoFormula::Or(a, b) => FoFormula::or(a.subst(map), b.subst(map)),
            FoFormula::ForallIn(x, ty, t, a)
            | FoFormula::ExistsIn(x, ty, t, a) => {
                let t2 = t.map_vars(&lookup);
                let (x2, body) = rebind(x, a, map);
                let body = Box::new(body);
                match self {
                    FoFormula::ForallIn(..) => FoFormula::ForallIn(x2, ty.clone(), t2, body),
                    _ => FoFormula::ExistsIn(x2, ty.clone(), t2, body),
                }
            }
            FoFormula::ForallSort(x, ty, a) | FoFormula::ExistsSort(x, ty, a) => {
                let (x2, body) = rebind(x, a, map);
                let body = Box::new(body);
                match self {
                    FoFormula::ForallSort(..) => FoFormula::ForallSort(x2, ty.clone(), body),
                    _ => FoFormula::ExistsSort(x2, ty.clone(), body),
                }
            }
        }
    }

    fn subst_oin(&self, repl: &FoTerm) -> FoFormula {
        match self {
            FoFormula::Eq(ty, a, b) => {
                FoFormula::Eq(ty.clone(), a.subst_oin(repl), b.subst_oin(repl))
            }
            FoFormula::Mem(ty, a, b) => {
                FoFormula::Mem(ty.clone(), a.subst_oin(repl), b.subst_oin(repl))
            }
            FoFormula::Top => FoFormula::Top,
            FoFormula::Bot => FoFormula::Bot,
            FoFormula::Not(a) => FoFormula::not(a.subst_oin(repl)),
            FoFormula::And(a, b) => FoFormula::and(a.subst_oin(repl), b.subst_oin(repl)),
            FoFormula::Or(a, b) => FoFormula::or(a.subst_oin(repl), b.subst_oin(repl)),
            FoFormula::ForallIn(x, ty, t, a) => FoFormula::ForallIn(
                x.clone(),
                ty.clone(),
                t.subst_oin(repl),
                Box::new(a.subst_oin(repl)),
            ),
            FoFormula::ExistsIn(x, ty, t, a) => FoFormula::ExistsIn(
                x.clone(),
                ty.clone(),
                t.subst_oin(repl),
                Box::new(a.subst_oin(repl)),
            ),
            FoFormula::ForallSort(x, ty, a) => {
                FoFormula::ForallSort(x.clone(), ty.clone(), Box::new(a.subst_oin(repl)))
            }
            FoFormula::ExistsSort(x, ty, a) => {
                FoFormula::ExistsSort(x.clone(), ty.clone(), Box::new(a.subst_oin(repl)))
            }
        }
    }

    /// Bottom-up constant folding: trivial equalities, `⊤`/`⊥` absorption
    /// in connectives and quantifier bodies.  Keeps the formulas produced by
    /// composition from accumulating dead branches.
    pub fn simplify(&self) -> FoFormula {
        use FoFormula::*;
        match self {
            Eq(_, a, b) if a == b => Top,
            Eq(..) | Mem(..) | Top | Bot => self.clone(),
            Not(a) => match a.simplify() {
                Top => Bot,
                Bot => Top,
                f => FoFormula::not(f),
            },
            And(a, b) => match (a.simplify(), b.simplify()) {
                (Bot, _) | (_, Bot) => Bot,
                (Top, f) | (f, Top) => f,
                (f, g) => FoFormula::and(f, g),
            },
            Or(a, b) => match (a.simplify(), b.simplify()) {
                (Top, _) | (_, Top) => Top,
                (Bot, f) | (f, Bot) => f,
                (f, g) => FoFormula::or(f, g),
            },
            ForallIn(x, ty, t, a) => match a.simplify() {
                Top => Top,
                f => ForallIn(x.clone(), ty.clone(), t.clone(), Box::new(f)),
            },
            ExistsIn(x, ty, t, a) => match a.simplify() {
                Bot => Bot,
                f => ExistsIn(x.clone(), ty.clone(), t.clone(), Box::new(f)),
            },
            ForallSort(x, ty, a) => match a.simplify() {
                Top => Top,
                f => ForallSort(x.clone(), ty.clone(), Box::new(f)),
            },
            ExistsSort(x, ty, a) => match a.simplify() {
                Bot => Bot,
                f => ExistsSort(x.clone(), ty.clone(), Box::new(f)),
            },
        }
    }

    fn mentions_c0(&self) -> bool {
        match self {
            FoFormula::Eq(_, a, b) | FoFormula::Mem(_, a, b) => {
                a.mentions_c0() || b.mentions_c0()
            }
            FoFormula::Top | FoFormula::Bot => false,
            FoFormula::Not(a) => a.mentions_c0(),
            FoFormula::And(a, b) | FoFormula::Or(a, b) => a.mentions_c0() || b.mentions_c0(),
            FoFormula::ForallIn(_, _, t, a) | FoFormula::ExistsIn(_, _, t, a) => {
                t.mentions_c0() || a.mentions_c0()
            }
            FoFormula::ForallSort(_, _, a) | FoFormula::ExistsSort(_, _, a) => a.mentions_c0(),
        }
    }
}

fn rebind(x: &str, body: &FoFormula, map: &BTreeMap<String, FoTerm>) -> (String, FoFormula) {
    let mut inner = map.clone();
    inner.remove(x);
    let mut clash: BTreeSet<String> = BTreeSet::new();
    for t in inner.values() {
        t.free_vars(&mut clash);
    }
    if clash.contains(x) {
        let mut avoid = clash;
        avoid.extend(body.free_vars());
        let x2 = fresh_name(x, &avoid);
        inner.insert(x.to_string(), FoTerm::var(&x2));
        (x2, body.subst(&inner))
    } else {
        (x.to_string(), body.subst(&inner))
    }
}

// ---------------------------------------------------------------------------
// structures

/// A finite multi-sorted structure: per-sort carriers, the membership
/// relations at every set sort, the projection maps at every product sort,
/// and a distinguished constant.  Input structures carry actual values;
/// output structures built by [`eval_to_structure`] carry code tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub sorts: BTreeMap<ObjType, Vec<Value>>,
    pub membership: BTreeMap<ObjType, BTreeSet<(Value, Value)>>,
    pub projections: BTreeMap<ObjType, BTreeMap<Value, (Value, Value)>>,
    pub constant: Value,
    pub constant_sort: ObjType,
}

/// All component sorts of a type (the type itself plus, recursively, the
/// parts of products and the elements of sets), together with `U`, `Unit`
/// and `Bool = Set(Unit)`, which every schema shares.
pub fn component_sorts(ty: &ObjType) -> BTreeSet<ObjType> {
    fn go(ty: &ObjType, out: &mut BTreeSet<ObjType>) {
        if !out.insert(ty.clone()) {
            return;
        }
        match ty {
            ObjType::Prod(a, b) => {
                go(a, out);
                go(b, out);
            }
            ObjType::SetOf(t) => go(t, out),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    go(ty, &mut out);
    out.insert(ObjType::U);
    out.insert(ObjType::Unit);
    out.insert(ObjType::set(ObjType::Unit));
    out
}

fn subobjects(v: &Value, ty: &ObjType, acc: &mut BTreeMap<ObjType, BTreeSet<Value>>) {
    acc.entry(ty.clone()).or_default().insert(v.clone());
    match (v, ty) {
        (Value::PairV(a, b), ObjType::Prod(ta, tb)) => {
            subobjects(a, ta, acc);
            subobjects(b, tb, acc);
        }
        (Value::SetV(xs), ObjType::SetOf(t)) => {
            for x in xs {
                subobjects(x, t, acc);
            }
        }
        _ => {}
    }
}

/// The least structure containing an object: its subobjects at every
/// component sort, all pairs of carried objects at product sorts, the empty
/// set at every set sort, and the unit and Boolean values.
pub fn build_input_structure(o: &Value, ty: &ObjType) -> Structure {
    build_structure(o, ty, false)
}

fn build_structure(o: &Value, ty: &ObjType, with_default_atom: bool) -> Structure {
    let mut acc: BTreeMap<ObjType, BTreeSet<Value>> = BTreeMap::new();
    subobjects(o, ty, &mut acc);
    let sorts_wanted = component_sorts(ty);
    // carriers, bottom-up so that product closures see their components
    let mut ordered: Vec<ObjType> = sorts_wanted.iter().cloned().collect();
    ordered.sort_by_key(type_depth);
    let mut sorts: BTreeMap<ObjType, Vec<Value>> = BTreeMap::new();
    for s in &ordered {
        let mut elems: BTreeSet<Value> = acc.remove(s).unwrap_or_default();
        match s {
            ObjType::U => {
                if with_default_atom {
                    elems.insert(Value::atom(C0_ATOM));
                }
            }
            ObjType::Unit => {
                elems.insert(Value::UnitV);
            }
            ObjType::SetOf(t) => {
                elems.insert(Value::empty_set());
                if **t == ObjType::Unit {
                    elems.insert(Value::set(vec![Value::UnitV]));
                }
            }
            ObjType::Prod(a, b) => {
                let left = sorts.get(a.as_ref()).cloned().unwrap_or_default();
                let right = sorts.get(b.as_ref()).cloned().unwrap_or_default();
                for x in &left {
                    for y in &right {
                        elems.insert(Value::pair(x.clone(), y.clone()));
                    }
                }
            }
        }
        sorts.insert(s.clone(), elems.into_iter().collect());
    }
    let mut membership: BTreeMap<ObjType, BTreeSet<(Value, Value)>> = BTreeMap::new();
    let mut projections: BTreeMap<ObjType, BTreeMap<Value, (Value, Value)>> = BTreeMap::new();
    for (s, elems) in &sorts {
        match s {
            ObjType::SetOf(t) => {
                let rel = membership.entry((**t).clone()).or_default();
                for set in elems {
                    let Value::SetV(xs) = set else { continue };
                    for x in xs {
                        rel.insert((x.clone(), set.clone()));
                    }
                }
            }
            ObjType::Prod(..) => {
                let map = projections.entry(s.clone()).or_default();
                for p in elems {
                    let Value::PairV(a, b) = p else { continue };
                    map.insert(p.clone(), ((**a).clone(), (**b).clone()));
                }
            }
            _ => {}
        }
    }
    Structure {
        sorts,
        membership,
        projections,
        constant: o.clone(),
        constant_sort: ty.clone(),
    }
}

fn type_depth(ty: &ObjType) -> usize {
    match ty {
        ObjType::U | ObjType::Unit => 0,
        ObjType::Prod(a, b) => 1 + type_depth(a).max(type_depth(b)),
        ObjType::SetOf(t) => 1 + type_depth(t),
    }
}

/// The Mostowski collapse of a structure element: products collapse through
/// the projection maps, sets through the membership relation, and Ur-element
/// or unit elements are returned as-is.
pub fn collapse(m: &Structure, sort: &ObjType, e: &Value) -> Result<Value, InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok(e.clone()),
        ObjType::Prod(a, b) => {
            let (x, y) = m
                .projections
                .get(sort)
                .and_then(|p| p.get(e))
                .ok_or_else(|| InterpError::IllFormedInterp {
                    detail: format!("no projections recorded for `{e}` at {sort}"),
                })?;
            Ok(Value::pair(collapse(m, a, x)?, collapse(m, b, y)?))
        }
        ObjType::SetOf(t) => {
            let mut members = Vec::new();
            if let Some(rel) = m.membership.get(t.as_ref()) {
                for (x, set) in rel {
                    if set == e {
                        members.push(collapse(m, t, x)?);
                    }
                }
            }
            Ok(Value::set(members))
        }
    }
}

// ---------------------------------------------------------------------------
// formula evaluation over a structure

fn spend(budget: &mut u64) -> Result<(), InterpError> {
    *budget = budget.checked_sub(1).ok_or(InterpError::EvalBudget)?;
    Ok(())
}

fn eval_fo_term(
    t: &FoTerm,
    st: &Structure,
    env: &BTreeMap<String, Value>,
) -> Result<Value, InterpError> {
    match t {
        FoTerm::Var(x) => env.get(x).cloned().ok_or_else(|| InterpError::IllFormedInterp {
            detail: format!("unbound formula variable {x}"),
        }),
        FoTerm::OIn => Ok(st.constant.clone()),
        FoTerm::C0 => Ok(Value::atom(C0_ATOM)),
        FoTerm::UnitC => Ok(Value::UnitV),
        FoTerm::EmptyC(_) => Ok(Value::empty_set()),
        FoTerm::TrueC => Ok(Value::set(vec![Value::UnitV])),
        FoTerm::Pair(a, b) => Ok(Value::pair(
            eval_fo_term(a, st, env)?,
            eval_fo_term(b, st, env)?,
        )),
        FoTerm::Proj1(a) => match eval_fo_term(a, st, env)? {
            Value::PairV(x, _) => Ok(*x),
            other => Err(InterpError::IllFormedInterp {
                detail: format!("projection of non-pair `{other}`"),
            }),
        },
        FoTerm::Proj2(a) => match eval_fo_term(a, st, env)? {
            Value::PairV(_, y) => Ok(*y),
            other => Err(InterpError::IllFormedInterp {
                detail: format!("projection of non-pair `{other}`"),
            }),
        },
    }
}

/// Classical satisfaction of a formula in a structure under a binding.
pub fn eval_fo(
    f: &FoFormula,
    st: &Structure,
    env: &BTreeMap<String, Value>,
    budget: &mut u64,
) -> Result<bool, InterpError> {
    spend(budget)?;
    match f {
        FoFormula::Eq(_, a, b) => Ok(eval_fo_term(a, st, env)? == eval_fo_term(b, st, env)?),
        FoFormula::Mem(_, a, b) => {
            let x = eval_fo_term(a, st, env)?;
            match eval_fo_term(b, st, env)? {
                Value::SetV(xs) => Ok(xs.contains(&x)),
                other => Err(InterpError::IllFormedInterp {
                    detail: format!("membership in non-set `{other}`"),
                }),
            }
        }
        FoFormula::Top => Ok(true),
        FoFormula::Bot => Ok(false),
        FoFormula::Not(a) => Ok(!eval_fo(a, st, env, budget)?),
        FoFormula::And(a, b) => Ok(eval_fo(a, st, env, budget)? && eval_fo(b, st, env, budget)?),
        FoFormula::Or(a, b) => Ok(eval_fo(a, st, env, budget)? || eval_fo(b, st, env, budget)?),
        FoFormula::ForallIn(x, _, t, a) | FoFormula::ExistsIn(x, _, t, a) => {
            let exists = matches!(f, FoFormula::ExistsIn(..));
            let Value::SetV(xs) = eval_fo_term(t, st, env)? else {
                return Err(InterpError::IllFormedInterp {
                    detail: "bounded quantifier over a non-set".into(),
                });
            };
            let mut env2 = env.clone();
            for v in xs {
                env2.insert(x.clone(), v);
                if eval_fo(a, st, &env2, budget)? == exists {
                    return Ok(exists);
                }
            }
            Ok(!exists)
        }
        FoFormula::ForallSort(x, ty, a) | FoFormula::ExistsSort(x, ty, a) => {
            let exists = matches!(f, FoFormula::ExistsSort(..));
            let carrier = st.sorts.get(ty).ok_or_else(|| InterpError::IllFormedInterp {
                detail: format!("quantification over an absent sort {ty}"),
            })?;
            let mut env2 = env.clone();
            for v in carrier {
                env2.insert(x.clone(), v.clone());
                if eval_fo(a, st, &env2, budget)? == exists {
                    return Ok(exists);
                }
            }
            Ok(!exists)
        }
    }
}

// ---------------------------------------------------------------------------
// interpretations

/// How one output sort is coded: the input sorts of its code tuples, the
/// domain formula over variables `x0..x{k-1}`, and — at set sorts — the
/// membership formula over element variables `x0..` and set variables
/// `y0..`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortCode {
    pub tau: Vec<ObjType>,
    pub domain: FoFormula,
    pub membership: Option<FoFormula>,
}

/// The output object: either a tuple of closed terms, or a formula over
/// `x0..` with a unique satisfying value up to collapse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutSpec {
    Terms(Vec<FoTerm>),
    Formula(FoFormula),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interp {
    pub input_type: ObjType,
    pub output_type: ObjType,
    pub sorts: BTreeMap<ObjType, SortCode>,
    pub out: OutSpec,
}

pub fn xv(i: usize) -> String {
    format!("x{i}")
}
pub fn yv(i: usize) -> String {
    format!("y{i}")
}

fn xvars(n: usize) -> Vec<FoTerm> {
    (0..n).map(|i| FoTerm::var(xv(i))).collect()
}

impl Interp {
    /// Construct and validate: every component sort of the output must be
    /// coded, with `U`/`Unit` preserved, products coded by concatenation,
    /// and membership formulas exactly at set sorts.
    pub fn new(
        input_type: ObjType,
        output_type: ObjType,
        sorts: BTreeMap<ObjType, SortCode>,
        out: OutSpec,
    ) -> Result<Interp, InterpError> {
        let i = Interp {
            input_type,
            output_type,
            sorts,
            out,
        };
        let allowed: BTreeSet<ObjType> = component_sorts(&i.input_type);
        for s in component_sorts(&i.output_type) {
            let code = i.sorts.get(&s).ok_or_else(|| InterpError::IllFormedInterp {
                detail: format!("no coding for output sort {s}"),
            })?;
            match &s {
                ObjType::U => {
                    if code.tau != vec![ObjType::U] {
                        return Err(InterpError::IllFormedInterp {
                            detail: "the Ur-element sort must be coded by itself".into(),
                        });
                    }
                }
                ObjType::Unit => {
                    if code.tau != vec![ObjType::Unit] {
                        return Err(InterpError::IllFormedInterp {
                            detail: "the unit sort must be coded by itself".into(),
                        });
                    }
                }
                ObjType::Prod(a, b) => {
                    let mut expect = i.tau(a)?.to_vec();
                    expect.extend(i.tau(b)?.iter().cloned());
                    if code.tau != expect {
                        return Err(InterpError::IllFormedInterp {
                            detail: format!(
                                "product sort {s} must be coded by the concatenation of its components"
                            ),
                        });
                    }
                }
                ObjType::SetOf(_) => {
                    if code.membership.is_none() {
                        return Err(InterpError::IllFormedInterp {
                            detail: format!("set sort {s} has no membership formula"),
                        });
                    }
                }
            }
            if matches!(s, ObjType::U | ObjType::Unit | ObjType::Prod(..))
                && code.membership.is_some()
            {
                return Err(InterpError::IllFormedInterp {
                    detail: format!("non-set sort {s} has a membership formula"),
                });
            }
            for t in &code.tau {
                if !allowed.contains(t) {
                    return Err(InterpError::IllFormedInterp {
                        detail: format!("coding sort {t} is not an input component sort"),
                    });
                }
            }
        }
        let out_arity = i.tau(&i.output_type.clone())?.len();
        if let OutSpec::Terms(ts) = &i.out {
            if ts.len() != out_arity {
                return Err(InterpError::IllFormedInterp {
                    detail: format!(
                        "output constant has {} components, expected {out_arity}",
                        ts.len()
                    ),
                });
            }
        }
        Ok(i)
    }

    pub fn tau(&self, sort: &ObjType) -> Result<&[ObjType], InterpError> {
        self.sorts
            .get(sort)
            .map(|c| c.tau.as_slice())
            .ok_or_else(|| InterpError::IllFormedInterp {
                detail: format!("no coding for sort {sort}"),
            })
    }

    fn code(&self, sort: &ObjType) -> Result<&SortCode, InterpError> {
        self.sorts
            .get(sort)
            .ok_or_else(|| InterpError::IllFormedInterp {
                detail: format!("no coding for sort {sort}"),
            })
    }

    /// The derived equivalence formula at a sort: identity at `U` and
    /// `Unit`, componentwise at products, extensional at set sorts.  Two
    /// codes satisfy it exactly when they collapse to the same value, which
    /// makes it a partial equivalence congruent with membership by
    /// construction.
    pub fn equiv_formula(&self, sort: &ObjType) -> Result<FoFormula, InterpError> {
        let tau = self.tau(sort)?.to_vec();
        let left = xvars(tau.len());
        let right: Vec<FoTerm> = (0..tau.len()).map(|i| FoTerm::var(yv(i))).collect();
        self.equiv_on(sort, &left, &right, 0)
    }

    fn equiv_on(
        &self,
        sort: &ObjType,
        left: &[FoTerm],
        right: &[FoTerm],
        depth: usize,
    ) -> Result<FoFormula, InterpError> {
        match sort {
            ObjType::U => Ok(FoFormula::Eq(
                ObjType::U,
                left[0].clone(),
                right[0].clone(),
            )),
            ObjType::Unit => Ok(FoFormula::Top),
            ObjType::Prod(a, b) => {
                let na = self.tau(a)?.len();
                Ok(FoFormula::and(
                    self.equiv_on(a, &left[..na], &right[..na], depth)?,
                    self.equiv_on(b, &left[na..], &right[na..], depth)?,
                ))
            }
            // identity-coded sets: codes are values, so code equality is
            // collapse equality and the extensional expansion is unnecessary
            ObjType::SetOf(_) if self.is_identity_coded(sort) => Ok(FoFormula::Eq(
                sort.clone(),
                left[0].clone(),
                right[0].clone(),
            )),
            ObjType::SetOf(t) => {
                let elem_tau = self.tau(t)?.to_vec();
                let prefix = format!("q{depth}_");
                let zs: Vec<FoTerm> = (0..elem_tau.len())
                    .map(|i| FoTerm::var(format!("{prefix}{i}")))
                    .collect();
                let ws: Vec<FoTerm> = (0..elem_tau.len())
                    .map(|i| FoTerm::var(format!("{prefix}w{i}")))
                    .collect();
                let dom_z = self.domain_on(t, &zs)?;
                let dom_w = self.domain_on(t, &ws)?;
                let half = |one: &[FoTerm], other: &[FoTerm]| -> Result<FoFormula, InterpError> {
                    let body = FoFormula::and_all([
                        dom_w.clone(),
                        self.mem_on(t, &ws, other)?,
                        self.equiv_on(t, &zs, &ws, depth + 1)?,
                    ]);
                    let ex = (0..elem_tau.len()).rev().fold(body, |acc, i| {
                        FoFormula::exists_sort(format!("{prefix}w{i}"), elem_tau[i].clone(), acc)
                    });
                    let guarded = FoFormula::or(
                        FoFormula::not(FoFormula::and(dom_z.clone(), self.mem_on(t, &zs, one)?)),
                        ex,
                    );
                    Ok((0..elem_tau.len()).rev().fold(guarded, |acc, i| {
                        FoFormula::forall_sort(format!("{prefix}{i}"), elem_tau[i].clone(), acc)
                    }))
                };
                Ok(FoFormula::and(half(left, right)?, half(right, left)?))
            }
        }
    }

    fn domain_on(&self, sort: &ObjType, code: &[FoTerm]) -> Result<FoFormula, InterpError> {
        let sc = self.code(sort)?;
        let map: BTreeMap<String, FoTerm> = code
            .iter()
            .enumerate()
            .map(|(i, t)| (xv(i), t.clone()))
            .collect();
        Ok(sc.domain.subst(&map))
    }

    fn mem_on(
        &self,
        elem: &ObjType,
        elem_code: &[FoTerm],
        set_code: &[FoTerm],
    ) -> Result<FoFormula, InterpError> {
        let set_sort = ObjType::set(elem.clone());
        let sc = self.code(&set_sort)?;
        let mem = sc
            .membership
            .as_ref()
            .ok_or_else(|| InterpError::IllFormedInterp {
                detail: format!("no membership formula at {set_sort}"),
            })?;
        let mut map: BTreeMap<String, FoTerm> = elem_code
            .iter()
            .enumerate()
            .map(|(i, t)| (xv(i), t.clone()))
            .collect();
        for (i, t) in set_code.iter().enumerate() {
            map.insert(yv(i), t.clone());
        }
        Ok(mem.subst(&map))
    }

    fn mentions_c0(&self) -> bool {
        self.sorts.values().any(|c| {
            c.domain.mentions_c0()
                || c.membership.as_ref().map(|m| m.mentions_c0()).unwrap_or(false)
        }) || match &self.out {
            OutSpec::Terms(ts) => ts.iter().any(|t| t.mentions_c0()),
            OutSpec::Formula(f) => f.mentions_c0(),
        }
    }
}

// ---------------------------------------------------------------------------
// evaluation

struct Evaluator<'a> {
    interp: &'a Interp,
    st: Structure,
    budget: u64,
    memo: BTreeMap<(ObjType, Vec<Value>), Value>,
    matches_memo: BTreeMap<ObjType, Vec<Vec<Value>>>,
}

impl<'a> Evaluator<'a> {
    /// All domain-satisfying code tuples of a sort.
    fn matches(&mut self, sort: &ObjType) -> Result<Vec<Vec<Value>>, InterpError> {
        if let Some(cached) = self.matches_memo.get(sort) {
            return Ok(cached.clone());
        }
        let tau = self.interp.tau(sort)?.to_vec();
        let mut tuples: Vec<Vec<Value>> = vec![vec![]];
        for s in &tau {
            let carrier = self
                .st
                .sorts
                .get(s)
                .cloned()
                .ok_or_else(|| InterpError::IllFormedInterp {
                    detail: format!("input structure has no sort {s}"),
                })?;
            let mut next = Vec::with_capacity(tuples.len() * carrier.len());
            for t in &tuples {
                for v in &carrier {
                    spend(&mut self.budget)?;
                    let mut t2 = t.clone();
                    t2.push(v.clone());
                    next.push(t2);
                }
            }
            tuples = next;
        }
        let code = self.interp.code(sort)?.clone();
        let mut out = Vec::new();
        for t in tuples {
            let env: BTreeMap<String, Value> = t
                .iter()
                .enumerate()
                .map(|(i, v)| (xv(i), v.clone()))
                .collect();
            if eval_fo(&code.domain, &self.st, &env, &mut self.budget)? {
                out.push(t);
            }
        }
        self.matches_memo.insert(sort.clone(), out.clone());
        Ok(out)
    }

    fn decode(&mut self, sort: &ObjType, code: &[Value]) -> Result<Value, InterpError> {
        let key = (sort.clone(), code.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        spend(&mut self.budget)?;
        let v = match sort {
            ObjType::U | ObjType::Unit => code[0].clone(),
            ObjType::Prod(a, b) => {
                let na = self.interp.tau(a)?.len();
                Value::pair(self.decode(a, &code[..na])?, self.decode(b, &code[na..])?)
            }
            ObjType::SetOf(t) => {
                let elems = self.matches(t)?;
                let mut members = Vec::new();
                for m in elems {
                    let mut env: BTreeMap<String, Value> = m
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (xv(i), v.clone()))
                        .collect();
                    for (i, v) in code.iter().enumerate() {
                        env.insert(yv(i), v.clone());
                    }
                    let mem = self
                        .interp
                        .code(sort)?
                        .membership
                        .clone()
                        .expect("validated set sort");
                    if eval_fo(&mem, &self.st, &env, &mut self.budget)? {
                        members.push(self.decode(t, &m)?);
                    }
                }
                Value::set(members)
            }
        };
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    fn output_code(&mut self) -> Result<Vec<Value>, InterpError> {
        match &self.interp.out {
            OutSpec::Terms(ts) => {
                let env = BTreeMap::new();
                ts.iter()
                    .map(|t| eval_fo_term(t, &self.st, &env))
                    .collect()
            }
            OutSpec::Formula(f) => {
                let f = f.clone();
                let out_ty = self.interp.output_type.clone();
                let candidates = self.matches(&out_ty)?;
                let mut best: Option<(Vec<Value>, Value)> = None;
                for c in candidates {
                    let env: BTreeMap<String, Value> = c
                        .iter()
                        .enumerate()
                        .map(|(i, v)| (xv(i), v.clone()))
                        .collect();
                    if !eval_fo(&f, &self.st, &env, &mut self.budget)? {
                        continue;
                    }
                    let v = self.decode(&out_ty, &c)?;
                    match &best {
                        None => best = Some((c, v)),
                        Some((_, prev)) if *prev == v => {}
                        Some((_, prev)) => {
                            return Err(InterpError::IllFormedInterp {
                                detail: format!(
                                    "output formula is ambiguous: `{prev}` and `{v}` both satisfy it"
                                ),
                            })
                        }
                    }
                }
                best.map(|(c, _)| c).ok_or_else(|| InterpError::IllFormedInterp {
                    detail: "output formula has no satisfying code".into(),
                })
            }
        }
    }
}

fn check_value_type(v: &Value, ty: &ObjType) -> bool {
    match (v, ty) {
        (Value::Atom(_), ObjType::U) => true,
        (Value::UnitV, ObjType::Unit) => true,
        (Value::PairV(a, b), ObjType::Prod(ta, tb)) => {
            check_value_type(a, ta) && check_value_type(b, tb)
        }
        (Value::SetV(xs), ObjType::SetOf(t)) => xs.iter().all(|x| check_value_type(x, t)),
        _ => false,
    }
}

/// Run an interpretation on an input object, with the default budget.
pub fn eval_interpretation(i: &Interp, o: &Value) -> Result<Value, InterpError> {
    eval_interpretation_budgeted(i, o, EVAL_BUDGET)
}

pub fn eval_interpretation_budgeted(
    i: &Interp,
    o: &Value,
    budget: u64,
) -> Result<Value, InterpError> {
    if !check_value_type(o, &i.input_type) {
        return Err(InterpError::TypeMismatch {
            detail: format!("input `{o}` does not have type {}", i.input_type),
        });
    }
    let st = build_structure(o, &i.input_type, i.mentions_c0());
    let mut ev = Evaluator {
        interp: i,
        st,
        budget,
        memo: BTreeMap::new(),
        matches_memo: BTreeMap::new(),
    };
    let code = ev.output_code()?;
    let out_ty = i.output_type.clone();
    let env: BTreeMap<String, Value> = code
        .iter()
        .enumerate()
        .map(|(idx, v)| (xv(idx), v.clone()))
        .collect();
    let dom = i.code(&out_ty)?.domain.clone();
    if !eval_fo(&dom, &ev.st, &env, &mut ev.budget)? {
        return Err(InterpError::IllFormedInterp {
            detail: "output code violates its own domain formula".into(),
        });
    }
    ev.decode(&out_ty, &code)
}

/// Evaluate and return the output structure instead of the collapsed value:
/// carriers hold (tupled) codes, with membership and projections among them
/// and the output constant's code distinguished.  `collapse` on this
/// structure agrees with [`eval_interpretation`].
pub fn eval_to_structure(i: &Interp, o: &Value) -> Result<Structure, InterpError> {
    if !check_value_type(o, &i.input_type) {
        return Err(InterpError::TypeMismatch {
            detail: format!("input `{o}` does not have type {}", i.input_type),
        });
    }
    let st = build_structure(o, &i.input_type, i.mentions_c0());
    let mut ev = Evaluator {
        interp: i,
        st,
        budget: EVAL_BUDGET,
        memo: BTreeMap::new(),
        matches_memo: BTreeMap::new(),
    };
    let out_code = ev.output_code()?;
    let mut sorts: BTreeMap<ObjType, Vec<Value>> = BTreeMap::new();
    let mut membership: BTreeMap<ObjType, BTreeSet<(Value, Value)>> = BTreeMap::new();
    let mut projections: BTreeMap<ObjType, BTreeMap<Value, (Value, Value)>> = BTreeMap::new();
    let mut ordered: Vec<ObjType> = component_sorts(&i.output_type)
        .into_iter()
        .filter(|s| i.sorts.contains_key(s))
        .collect();
    ordered.sort_by_key(type_depth);
    for sort in &ordered {
        let matches = ev.matches(sort)?;
        let codes: Vec<Value> = matches.iter().map(|m| pack_code(sort, m)).collect();
        match sort {
            ObjType::SetOf(t) => {
                let rel = membership.entry((**t).clone()).or_default();
                let elem_matches = ev.matches(t)?;
                for m in &matches {
                    for e in &elem_matches {
                        let mut env: BTreeMap<String, Value> = e
                            .iter()
                            .enumerate()
                            .map(|(idx, v)| (xv(idx), v.clone()))
                            .collect();
                        for (idx, v) in m.iter().enumerate() {
                            env.insert(yv(idx), v.clone());
                        }
                        let mem = ev.interp.code(sort)?.membership.clone().expect("set sort");
                        if eval_fo(&mem, &ev.st, &env, &mut ev.budget)? {
                            rel.insert((pack_code(t, e), pack_code(sort, m)));
                        }
                    }
                }
            }
            ObjType::Prod(a, b) => {
                let na = i.tau(a)?.len();
                let map = projections.entry(sort.clone()).or_default();
                for m in &matches {
                    map.insert(
                        pack_code(sort, m),
                        (pack_code(a, &m[..na]), pack_code(b, &m[na..])),
                    );
                }
            }
            _ => {}
        }
        sorts.insert(sort.clone(), codes);
    }
    Ok(Structure {
        sorts,
        membership,
        projections,
        constant: pack_code(&i.output_type, &out_code),
        constant_sort: i.output_type.clone(),
    })
}

/// A code packed into a single value so it can live in a `Structure`
/// carrier: base sorts (whose codes are single values by validation) stay
/// bare so `collapse` reads them off directly, everything else becomes a
/// tuple.
fn pack_code(sort: &ObjType, code: &[Value]) -> Value {
    match sort {
        ObjType::U | ObjType::Unit => code[0].clone(),
        _ => tuple_value(code),
    }
}

/// A code tuple packed into a single value (right-nested pairs ending in a
/// unit), so codes can live in `Structure` carriers.
pub fn tuple_value(code: &[Value]) -> Value {
    code.iter()
        .rev()
        .fold(Value::UnitV, |acc, v| Value::pair(v.clone(), acc))
}

// ---------------------------------------------------------------------------
// identity and term interpretations

fn bool_ty() -> ObjType {
    ObjType::set(ObjType::Unit)
}

/// The identity coding tuple of a sort: sets and base sorts by themselves,
/// products componentwise.
fn id_tau(sort: &ObjType) -> Vec<ObjType> {
    match sort {
        ObjType::U | ObjType::Unit | ObjType::SetOf(_) => vec![sort.clone()],
        ObjType::Prod(a, b) => {
            let mut out = id_tau(a);
            out.extend(id_tau(b));
            out
        }
    }
}

/// Rebuild a term of `sort` from an identity-layout code.
fn assemble(sort: &ObjType, code: &[FoTerm]) -> FoTerm {
    match sort {
        ObjType::U | ObjType::Unit | ObjType::SetOf(_) => code[0].clone(),
        ObjType::Prod(a, b) => {
            let na = id_tau(a).len();
            FoTerm::pair(assemble(a, &code[..na]), assemble(b, &code[na..]))
        }
    }
}

fn identity_mem(elem: &ObjType) -> FoFormula {
    let n = id_tau(elem).len();
    FoFormula::Mem(elem.clone(), assemble(elem, &xvars(n)), FoTerm::var(yv(0)))
}

/// A term of `sort` denoting the default value (the reserved atom, unit,
/// empty sets, pairs of defaults).
fn filler_term(sort: &ObjType) -> FoTerm {
    match sort {
        ObjType::U => FoTerm::C0,
        ObjType::Unit => FoTerm::UnitC,
        ObjType::SetOf(t) => FoTerm::EmptyC((**t).clone()),
        ObjType::Prod(a, b) => FoTerm::pair(filler_term(a), filler_term(b)),
    }
}

fn embed_tau(sort: &ObjType, ins: &BTreeSet<ObjType>) -> Vec<ObjType> {
    match sort {
        ObjType::U | ObjType::Unit => vec![sort.clone()],
        ObjType::Prod(a, b) => {
            let mut out = embed_tau(a, ins);
            out.extend(embed_tau(b, ins));
            out
        }
        ObjType::SetOf(_) if ins.contains(sort) => vec![sort.clone()],
        ObjType::SetOf(_) => vec![ObjType::Unit],
    }
}

fn embed_out(sort: &ObjType, ins: &BTreeSet<ObjType>, root: FoTerm) -> Vec<FoTerm> {
    match sort {
        ObjType::U | ObjType::Unit => vec![root],
        ObjType::Prod(a, b) => {
            let mut out = embed_out(a, ins, FoTerm::proj1(root.clone()));
            out.extend(embed_out(b, ins, FoTerm::proj2(root)));
            out
        }
        ObjType::SetOf(_) if ins.contains(sort) => vec![root],
        ObjType::SetOf(_) => vec![FoTerm::UnitC],
    }
}

/// The interpretation of a term over the input object: every shared sort is
/// coded by itself and the output constant is `root` (a term over `OIn`).
/// Output set sorts that are not input component sorts must denote the empty
/// set in `root`; they are coded by the one-point unit sort.
pub fn term_interp(
    input_ty: &ObjType,
    output_ty: &ObjType,
    root: FoTerm,
) -> Result<Interp, InterpError> {
    let ins = component_sorts(input_ty);
    let mut sorts = BTreeMap::new();
    for s in component_sorts(output_ty) {
        let code = if ins.contains(&s) || !matches!(s, ObjType::SetOf(_)) {
            SortCode {
                tau: embed_tau(&s, &ins),
                domain: FoFormula::Top,
                membership: match &s {
                    ObjType::SetOf(t) => Some(identity_mem(t)),
                    _ => None,
                },
            }
        } else {
            SortCode {
                tau: vec![ObjType::Unit],
                domain: FoFormula::Top,
                membership: Some(FoFormula::Bot),
            }
        };
        sorts.insert(s, code);
    }
    let out = OutSpec::Terms(embed_out(output_ty, &ins, root));
    Interp::new(input_ty.clone(), output_ty.clone(), sorts, out)
}

pub fn identity_interp(ty: &ObjType) -> Result<Interp, InterpError> {
    term_interp(ty, ty, FoTerm::OIn)
}

impl Interp {
    /// Does this interpretation code `sort` (and everything below it) by the
    /// identity, so that its codes are actual values and collapse is the
    /// identity on them?
    fn is_identity_coded(&self, sort: &ObjType) -> bool {
        match sort {
            ObjType::U | ObjType::Unit => true,
            ObjType::Prod(a, b) => self.is_identity_coded(a) && self.is_identity_coded(b),
            ObjType::SetOf(t) => {
                self.sorts.get(sort).is_some_and(|c| {
                    c.tau == vec![sort.clone()]
                        && c.domain == FoFormula::Top
                        && c.membership.as_ref() == Some(&identity_mem(t))
                }) && self.is_identity_coded(t)
            }
        }
    }

    /// Constant-fold every formula in the interpretation.
    fn simplified(mut self) -> Interp {
        for code in self.sorts.values_mut() {
            code.domain = code.domain.simplify();
            if let Some(m) = &code.membership {
                code.membership = Some(m.simplify());
            }
        }
        if let OutSpec::Formula(f) = &self.out {
            self.out = OutSpec::Formula(f.simplify());
        }
        self
    }
}

// ---------------------------------------------------------------------------
// combinators

fn sorts_with_override(
    input_ty: &ObjType,
    output_ty: &ObjType,
    over: (ObjType, SortCode),
) -> BTreeMap<ObjType, SortCode> {
    let ins = component_sorts(input_ty);
    let mut sorts = BTreeMap::new();
    for s in component_sorts(output_ty) {
        if ins.contains(&s) || !matches!(s, ObjType::SetOf(_)) {
            sorts.insert(
                s.clone(),
                SortCode {
                    tau: embed_tau(&s, &ins),
                    domain: FoFormula::Top,
                    membership: match &s {
                        ObjType::SetOf(t) => Some(identity_mem(t)),
                        _ => None,
                    },
                },
            );
        } else {
            sorts.insert(
                s.clone(),
                SortCode {
                    tau: vec![ObjType::Unit],
                    domain: FoFormula::Top,
                    membership: Some(FoFormula::Bot),
                },
            );
        }
    }
    sorts.insert(over.0, over.1);
    sorts
}

/// `T → Set(T)`, `x ↦ {x}`: the output set is coded by the one-point unit
/// sort and its sole member is the input itself.
pub fn singleton_interp(t: &ObjType) -> Result<Interp, InterpError> {
    let out_ty = ObjType::set(t.clone());
    let asm = assemble(t, &xvars(id_tau(t).len()));
    let over = SortCode {
        tau: vec![ObjType::Unit],
        domain: FoFormula::Top,
        membership: Some(FoFormula::Eq(t.clone(), asm, FoTerm::OIn)),
    };
    let sorts = sorts_with_override(t, &out_ty, (out_ty.clone(), over));
    Interp::new(
        t.clone(),
        out_ty,
        sorts,
        OutSpec::Terms(vec![FoTerm::UnitC]),
    )
}

fn binary_set_interp(t: &ObjType, mem: FoFormula) -> Result<Interp, InterpError> {
    let set_ty = ObjType::set(t.clone());
    let in_ty = ObjType::prod(set_ty.clone(), set_ty.clone());
    let over = SortCode {
        tau: vec![ObjType::Unit],
        domain: FoFormula::Top,
        membership: Some(mem),
    };
    let sorts = sorts_with_override(&in_ty, &set_ty, (set_ty.clone(), over));
    Interp::new(in_ty, set_ty, sorts, OutSpec::Terms(vec![FoTerm::UnitC]))
}

/// `Set(T) × Set(T) → Set(T)` by union.
pub fn union_interp(t: &ObjType) -> Result<Interp, InterpError> {
    let asm = assemble(t, &xvars(id_tau(t).len()));
    binary_set_interp(
        t,
        FoFormula::or(
            FoFormula::Mem(t.clone(), asm.clone(), FoTerm::proj1(FoTerm::OIn)),
            FoFormula::Mem(t.clone(), asm, FoTerm::proj2(FoTerm::OIn)),
        ),
    )
}

/// `Set(T) × Set(T) → Set(T)` by difference: a member of the first
/// component that is not a member of the second.
pub fn difference_interp(t: &ObjType) -> Result<Interp, InterpError> {
    let asm = assemble(t, &xvars(id_tau(t).len()));
    binary_set_interp(
        t,
        FoFormula::and(
            FoFormula::Mem(t.clone(), asm.clone(), FoTerm::proj1(FoTerm::OIn)),
            FoFormula::not(FoFormula::Mem(t.clone(), asm, FoTerm::proj2(FoTerm::OIn))),
        ),
    )
}

/// `Set(Set(T)) → Set(T)` by flattening.
pub fn bigunion_interp(t: &ObjType) -> Result<Interp, InterpError> {
    let set_ty = ObjType::set(t.clone());
    let in_ty = ObjType::set(set_ty.clone());
    let asm = assemble(t, &xvars(id_tau(t).len()));
    let mem = FoFormula::exists_in(
        "bu",
        set_ty.clone(),
        FoTerm::OIn,
        FoFormula::Mem(t.clone(), asm, FoTerm::var("bu")),
    );
    let over = SortCode {
        tau: vec![ObjType::Unit],
        domain: FoFormula::Top,
        membership: Some(mem),
    };
    let sorts = sorts_with_override(&in_ty, &set_ty, (set_ty.clone(), over));
    Interp::new(in_ty, set_ty, sorts, OutSpec::Terms(vec![FoTerm::UnitC]))
}

/// `Set(T) → T`: the unique element when the input is a singleton, the
/// default value of `T` otherwise.  The output constant is given by a
/// formula, since no term denotes "the unique element".
pub fn get_interp(t: &ObjType) -> Result<Interp, InterpError> {
    let in_ty = ObjType::set(t.clone());
    let ins = component_sorts(&in_ty);
    let mut sorts = BTreeMap::new();
    for s in component_sorts(t) {
        debug_assert!(ins.contains(&s) || !matches!(s, ObjType::SetOf(_)));
        sorts.insert(
            s.clone(),
            SortCode {
                tau: embed_tau(&s, &ins),
                domain: FoFormula::Top,
                membership: match &s {
                    ObjType::SetOf(e) => Some(identity_mem(e)),
                    _ => None,
                },
            },
        );
    }
    let a = assemble(t, &xvars(id_tau(t).len()));
    let unique = |body: FoFormula| {
        FoFormula::exists_in(
            "gz",
            t.clone(),
            FoTerm::OIn,
            FoFormula::and(
                FoFormula::forall_in(
                    "gw",
                    t.clone(),
                    FoTerm::OIn,
                    FoFormula::Eq(t.clone(), FoTerm::var("gw"), FoTerm::var("gz")),
                ),
                body,
            ),
        )
    };
    let hit = unique(FoFormula::Eq(t.clone(), a.clone(), FoTerm::var("gz")));
    let miss = FoFormula::and(
        FoFormula::not(unique(FoFormula::Top)),
        FoFormula::Eq(t.clone(), a, filler_term(t)),
    );
    Interp::new(
        in_ty,
        t.clone(),
        sorts,
        OutSpec::Formula(FoFormula::or(hit, miss)),
    )
}

/// `Env × Set(T) → Set(Env × T)`: tensorial strength, pairing the first
/// component with every member of the second.
pub fn strength_interp(env_ty: &ObjType, tx: &ObjType) -> Result<Interp, InterpError> {
    let in_ty = ObjType::prod(env_ty.clone(), ObjType::set(tx.clone()));
    let p_ty = ObjType::prod(env_ty.clone(), tx.clone());
    let out_ty = ObjType::set(p_ty.clone());
    let ne = id_tau(env_ty).len();
    let code = xvars(ne + id_tau(tx).len());
    let mem = FoFormula::and(
        FoFormula::Eq(
            env_ty.clone(),
            assemble(env_ty, &code[..ne]),
            FoTerm::proj1(FoTerm::OIn),
        ),
        FoFormula::Mem(
            tx.clone(),
            assemble(tx, &code[ne..]),
            FoTerm::proj2(FoTerm::OIn),
        ),
    );
    let over = SortCode {
        tau: vec![ObjType::Unit],
        domain: FoFormula::Top,
        membership: Some(mem),
    };
    let sorts = sorts_with_override(&in_ty, &out_ty, (out_ty.clone(), over));
    Interp::new(in_ty, out_ty, sorts, OutSpec::Terms(vec![FoTerm::UnitC]))
}

/// The quotient by extensional equivalence.  Code equivalence is derived
/// extensionally throughout this module, so the largest quotient is already
/// folded into every evaluation and the combinator is the identity.
pub fn quotient_interp(ty: &ObjType) -> Result<Interp, InterpError> {
    identity_interp(ty)
}

// ---------------------------------------------------------------------------
// the map combinator

fn out_match(i: &Interp, code: &[FoTerm]) -> Result<FoFormula, InterpError> {
    match &i.out {
        OutSpec::Terms(ts) => {
            let tau = i.tau(&i.output_type)?.to_vec();
            Ok(FoFormula::and_all(ts.iter().zip(code).zip(tau).map(
                |((t, c), s)| FoFormula::Eq(s, c.clone(), t.clone()),
            )))
        }
        OutSpec::Formula(f) => {
            let map: BTreeMap<String, FoTerm> = code
                .iter()
                .enumerate()
                .map(|(j, c)| (xv(j), c.clone()))
                .collect();
            Ok(f.subst(&map))
        }
    }
}

fn map_tau(i: &Interp, sort: &ObjType) -> Result<Vec<ObjType>, InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok(vec![sort.clone()]),
        ObjType::Prod(a, b) => {
            let mut out = map_tau(i, a)?;
            out.extend(map_tau(i, b)?);
            Ok(out)
        }
        ObjType::SetOf(_) => {
            let mut out = vec![i.input_type.clone()];
            out.extend(i.tau(sort)?.iter().cloned());
            Ok(out)
        }
    }
}

/// Split a map-layout code into its source tags and the underlying
/// element-interpretation code.
fn map_untag<'a>(
    i: &Interp,
    sort: &ObjType,
    code: &'a [FoTerm],
) -> Result<(Vec<FoTerm>, Vec<FoTerm>), InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok((vec![], code.to_vec())),
        ObjType::Prod(a, b) => {
            let na = map_tau(i, a)?.len();
            let (mut tags, mut inner) = map_untag(i, a, &code[..na])?;
            let (tags_b, inner_b) = map_untag(i, b, &code[na..])?;
            tags.extend(tags_b);
            inner.extend(inner_b);
            Ok((tags, inner))
        }
        ObjType::SetOf(_) => Ok((vec![code[0].clone()], code[1..].to_vec())),
    }
}

fn map_retag(
    i: &Interp,
    sort: &ObjType,
    tag: &FoTerm,
    inner: &[FoTerm],
) -> Result<Vec<FoTerm>, InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok(inner.to_vec()),
        ObjType::Prod(a, b) => {
            let na = i.tau(a)?.len();
            let mut out = map_retag(i, a, tag, &inner[..na])?;
            out.extend(map_retag(i, b, tag, &inner[na..])?);
            Ok(out)
        }
        ObjType::SetOf(_) => {
            let mut out = vec![tag.clone()];
            out.extend(inner.iter().cloned());
            Ok(out)
        }
    }
}

fn map_dom(i: &Interp, sort: &ObjType, code: &[FoTerm]) -> Result<FoFormula, InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok(FoFormula::Top),
        ObjType::Prod(a, b) => {
            let na = map_tau(i, a)?.len();
            Ok(FoFormula::and(
                map_dom(i, a, &code[..na])?,
                map_dom(i, b, &code[na..])?,
            ))
        }
        ObjType::SetOf(_) => Ok(FoFormula::and(
            FoFormula::Mem(i.input_type.clone(), code[0].clone(), FoTerm::OIn),
            i.domain_on(sort, &code[1..])?.subst_oin(&code[0]),
        )),
    }
}

/// `Set(S) → Set(T)` applying an interpretation `i : S → T` to every
/// member.  Every output code is tagged with the source element it came
/// from; membership is closed under code equivalence so that it stays
/// congruent under composition.
pub fn map_interp(i: &Interp) -> Result<Interp, InterpError> {
    let s_ty = i.input_type.clone();
    let t_ty = i.output_type.clone();
    let in_ty = ObjType::set(s_ty.clone());
    let out_ty = ObjType::set(t_ty.clone());

    let build = |congruent: Option<&Interp>| -> Result<Interp, InterpError> {
        let mut sorts = BTreeMap::new();
        for s in component_sorts(&out_ty) {
            if s == out_ty {
                continue;
            }
            let tau = map_tau(i, &s)?;
            let domain = map_dom(i, &s, &xvars(tau.len()))?;
            let membership = match &s {
                ObjType::SetOf(e) => {
                    let set_code = (0..tau.len()).map(|j| FoTerm::var(yv(j))).collect::<Vec<_>>();
                    let tag = set_code[0].clone();
                    let inner_set = &set_code[1..];
                    let elem_code = xvars(map_tau(i, e)?.len());
                    Some(match congruent {
                        None => {
                            let (etags, einner) = map_untag(i, e, &elem_code)?;
                            FoFormula::and_all(
                                etags
                                    .iter()
                                    .map(|tg| {
                                        FoFormula::Eq(s_ty.clone(), tg.clone(), tag.clone())
                                    })
                                    .chain([i
                                        .mem_on(e, &einner, inner_set)?
                                        .subst_oin(&tag)]),
                            )
                        }
                        Some(m0) => {
                            let elem_tau = i.tau(e)?.to_vec();
                            let us: Vec<FoTerm> = (0..elem_tau.len())
                                .map(|j| FoTerm::var(format!("mu{j}")))
                                .collect();
                            let body = FoFormula::and_all([
                                i.domain_on(e, &us)?.subst_oin(&tag),
                                i.mem_on(e, &us, inner_set)?.subst_oin(&tag),
                                m0.equiv_on(e, &elem_code, &map_retag(i, e, &tag, &us)?, 0)?,
                            ]);
                            (0..elem_tau.len()).rev().fold(body, |acc, j| {
                                FoFormula::exists_sort(
                                    format!("mu{j}"),
                                    elem_tau[j].clone(),
                                    acc,
                                )
                            })
                        }
                    })
                }
                _ => None,
            };
            sorts.insert(
                s,
                SortCode {
                    tau,
                    domain,
                    membership,
                },
            );
        }
        // the output set itself: one code, whose members are the images of
        // the input's members
        let elem_code = xvars(map_tau(i, &t_ty)?.len());
        let ms = FoTerm::var("ms");
        let mem_top = match congruent {
            None => {
                let (etags, einner) = map_untag(i, &t_ty, &elem_code)?;
                FoFormula::exists_in(
                    "ms",
                    s_ty.clone(),
                    FoTerm::OIn,
                    FoFormula::and_all(
                        etags
                            .iter()
                            .map(|tg| FoFormula::Eq(s_ty.clone(), tg.clone(), ms.clone()))
                            .chain([out_match(i, &einner)?.subst_oin(&ms)]),
                    ),
                )
            }
            Some(m0) => {
                let out_tau = i.tau(&t_ty)?.to_vec();
                let os: Vec<FoTerm> = (0..out_tau.len())
                    .map(|j| FoTerm::var(format!("mo{j}")))
                    .collect();
                let body = FoFormula::and_all([
                    i.domain_on(&t_ty, &os)?.subst_oin(&ms),
                    out_match(i, &os)?.subst_oin(&ms),
                    m0.equiv_on(&t_ty, &elem_code, &map_retag(i, &t_ty, &ms, &os)?, 0)?,
                ]);
                let inner = (0..out_tau.len()).rev().fold(body, |acc, j| {
                    FoFormula::exists_sort(format!("mo{j}"), out_tau[j].clone(), acc)
                });
                FoFormula::exists_in("ms", s_ty.clone(), FoTerm::OIn, inner)
            }
        };
        let mut sorts = sorts;
        sorts.insert(
            out_ty.clone(),
            SortCode {
                tau: vec![ObjType::Unit],
                domain: FoFormula::Top,
                membership: Some(mem_top),
            },
        );
        Interp::new(
            in_ty.clone(),
            out_ty.clone(),
            sorts,
            OutSpec::Terms(vec![FoTerm::UnitC]),
        )
    };

    let pass1 = build(None)?;
    build(Some(&pass1))
}

// ---------------------------------------------------------------------------
// the pairing combinator

fn istt(t: FoTerm) -> FoFormula {
    FoFormula::Mem(ObjType::Unit, FoTerm::UnitC, t)
}
fn isff(t: FoTerm) -> FoFormula {
    FoFormula::not(istt(t))
}
fn tt_term() -> FoTerm {
    FoTerm::TrueC
}
fn ff_term() -> FoTerm {
    FoTerm::EmptyC(ObjType::Unit)
}

fn side_tau(i: &Interp, sort: &ObjType) -> Vec<ObjType> {
    i.sorts
        .get(sort)
        .map(|c| c.tau.clone())
        .unwrap_or_default()
}

fn pr_tau(i1: &Interp, i2: &Interp, sort: &ObjType) -> Result<Vec<ObjType>, InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok(vec![sort.clone()]),
        ObjType::Prod(a, b) => {
            let mut out = pr_tau(i1, i2, a)?;
            out.extend(pr_tau(i1, i2, b)?);
            Ok(out)
        }
        ObjType::SetOf(_) => {
            let mut out = vec![bool_ty()];
            out.extend(side_tau(i1, sort));
            out.extend(side_tau(i2, sort));
            Ok(out)
        }
    }
}

/// Split a pair-layout code into its Boolean tags and the two side codes.
/// At base sorts the same component serves both sides.
fn pr_untag(
    i1: &Interp,
    i2: &Interp,
    sort: &ObjType,
    code: &[FoTerm],
) -> Result<(Vec<FoTerm>, Vec<FoTerm>, Vec<FoTerm>), InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok((vec![], code.to_vec(), code.to_vec())),
        ObjType::Prod(a, b) => {
            let na = pr_tau(i1, i2, a)?.len();
            let (mut t, mut s1, mut s2) = pr_untag(i1, i2, a, &code[..na])?;
            let (tb, s1b, s2b) = pr_untag(i1, i2, b, &code[na..])?;
            t.extend(tb);
            s1.extend(s1b);
            s2.extend(s2b);
            Ok((t, s1, s2))
        }
        ObjType::SetOf(_) => {
            let n1 = side_tau(i1, sort).len();
            Ok((
                vec![code[0].clone()],
                code[1..1 + n1].to_vec(),
                code[1 + n1..].to_vec(),
            ))
        }
    }
}

/// Rebuild a pair-layout code from one side's code, filling the dead side
/// with default terms.
fn pr_retag(
    i1: &Interp,
    i2: &Interp,
    side: u8,
    sort: &ObjType,
    code: &[FoTerm],
) -> Result<Vec<FoTerm>, InterpError> {
    let own = if side == 1 { i1 } else { i2 };
    match sort {
        ObjType::U | ObjType::Unit => Ok(code.to_vec()),
        ObjType::Prod(a, b) => {
            let na = own.tau(a)?.len();
            let mut out = pr_retag(i1, i2, side, a, &code[..na])?;
            out.extend(pr_retag(i1, i2, side, b, &code[na..])?);
            Ok(out)
        }
        ObjType::SetOf(_) => {
            let mut out = vec![if side == 1 { tt_term() } else { ff_term() }];
            if side == 1 {
                out.extend(code.iter().cloned());
                out.extend(side_tau(i2, sort).iter().map(filler_term));
            } else {
                out.extend(side_tau(i1, sort).iter().map(filler_term));
                out.extend(code.iter().cloned());
            }
            Ok(out)
        }
    }
}

fn pr_side_dom(i: &Interp, sort: &ObjType, code: &[FoTerm]) -> FoFormula {
    match i.sorts.get(sort) {
        Some(_) => i.domain_on(sort, code).unwrap_or(FoFormula::Bot),
        None => FoFormula::Bot,
    }
}

fn pr_dom(
    i1: &Interp,
    i2: &Interp,
    sort: &ObjType,
    code: &[FoTerm],
) -> Result<FoFormula, InterpError> {
    match sort {
        ObjType::U | ObjType::Unit => Ok(FoFormula::Top),
        ObjType::Prod(a, b) => {
            let na = pr_tau(i1, i2, a)?.len();
            Ok(FoFormula::and(
                pr_dom(i1, i2, a, &code[..na])?,
                pr_dom(i1, i2, b, &code[na..])?,
            ))
        }
        ObjType::SetOf(_) => {
            let (tags, s1, s2) = pr_untag(i1, i2, sort, code)?;
            let b = tags[0].clone();
            Ok(FoFormula::or(
                FoFormula::and(istt(b.clone()), pr_side_dom(i1, sort, &s1)),
                FoFormula::and(isff(b), pr_side_dom(i2, sort, &s2)),
            ))
        }
    }
}

fn pr_side_mem(
    i: &Interp,
    elem: &ObjType,
    e_code: &[FoTerm],
    s_code: &[FoTerm],
) -> FoFormula {
    let set_sort = ObjType::set(elem.clone());
    if i.sorts.get(&set_sort).is_none() || i.sorts.get(elem).is_none() {
        return FoFormula::Bot;
    }
    i.mem_on(elem, e_code, s_code).unwrap_or(FoFormula::Bot)
}

/// `S → T1 × T2` from two interpretations over the same input: shared set
/// sorts become Boolean-tagged unions of the two codings.
pub fn pair_interp(i1: &Interp, i2: &Interp) -> Result<Interp, InterpError> {
    if i1.input_type != i2.input_type {
        return Err(InterpError::TypeMismatch {
            detail: format!(
                "pairing interpretations with inputs {} and {}",
                i1.input_type, i2.input_type
            ),
        });
    }
    let in_ty = i1.input_type.clone();
    let out_ty = ObjType::prod(i1.output_type.clone(), i2.output_type.clone());

    // a pair of term interpretations is itself a term interpretation
    if let (Some(r1), Some(r2)) = (i1.as_term_root(), i2.as_term_root()) {
        return term_interp(&in_ty, &out_ty, FoTerm::pair(r1, r2));
    }

    let build = |congruent: Option<&Interp>| -> Result<Interp, InterpError> {
        let mut sorts = BTreeMap::new();
        for s in component_sorts(&out_ty) {
            let tau = pr_tau(i1, i2, &s)?;
            let domain = pr_dom(i1, i2, &s, &xvars(tau.len()))?;
            let membership = match &s {
                ObjType::SetOf(e) => {
                    let set_code: Vec<FoTerm> =
                        (0..tau.len()).map(|j| FoTerm::var(yv(j))).collect();
                    let elem_code = xvars(pr_tau(i1, i2, e)?.len());
                    let (stags, ss1, ss2) = pr_untag(i1, i2, &s, &set_code)?;
                    let b = stags[0].clone();
                    Some(match congruent {
                        None => {
                            let (etags, es1, es2) = pr_untag(i1, i2, e, &elem_code)?;
                            let tt_case = FoFormula::and_all(
                                [istt(b.clone())]
                                    .into_iter()
                                    .chain(etags.iter().map(|tg| istt(tg.clone())))
                                    .chain([pr_side_mem(i1, e, &es1, &ss1)]),
                            );
                            let ff_case = FoFormula::and_all(
                                [isff(b.clone())]
                                    .into_iter()
                                    .chain(etags.iter().map(|tg| isff(tg.clone())))
                                    .chain([pr_side_mem(i2, e, &es2, &ss2)]),
                            );
                            FoFormula::or(tt_case, ff_case)
                        }
                        Some(p0) => {
                            let side = |k: u8,
                                        i: &Interp,
                                        ss: &[FoTerm]|
                             -> Result<FoFormula, InterpError> {
                                if i.sorts.get(e).is_none() || i.sorts.get(&s).is_none() {
                                    return Ok(FoFormula::Bot);
                                }
                                let elem_tau = i.tau(e)?.to_vec();
                                let us: Vec<FoTerm> = (0..elem_tau.len())
                                    .map(|j| FoTerm::var(format!("pu{j}")))
                                    .collect();
                                let body = FoFormula::and_all([
                                    i.domain_on(e, &us)?,
                                    i.mem_on(e, &us, ss)?,
                                    p0.equiv_on(
                                        e,
                                        &elem_code,
                                        &pr_retag(i1, i2, k, e, &us)?,
                                        0,
                                    )?,
                                ]);
                                Ok((0..elem_tau.len()).rev().fold(body, |acc, j| {
                                    FoFormula::exists_sort(
                                        format!("pu{j}"),
                                        elem_tau[j].clone(),
                                        acc,
                                    )
                                }))
                            };
                            FoFormula::or(
                                FoFormula::and(istt(b.clone()), side(1, i1, &ss1)?),
                                FoFormula::and(isff(b), side(2, i2, &ss2)?),
                            )
                        }
                    })
                }
                _ => None,
            };
            sorts.insert(
                s,
                SortCode {
                    tau,
                    domain,
                    membership,
                },
            );
        }
        let out = pr_out(i1, i2, &out_ty)?;
        Interp::new(in_ty.clone(), out_ty.clone(), sorts, out)
    };

    let pass1 = build(None)?;
    build(Some(&pass1))
}

fn pr_out(i1: &Interp, i2: &Interp, out_ty: &ObjType) -> Result<OutSpec, InterpError> {
    if let (OutSpec::Terms(t1), OutSpec::Terms(t2)) = (&i1.out, &i2.out) {
        let mut code = pr_retag(i1, i2, 1, &i1.output_type, t1)?;
        code.extend(pr_retag(i1, i2, 2, &i2.output_type, t2)?);
        return Ok(OutSpec::Terms(code));
    }
    // at least one side is formula-defined: characterize the pair code
    let n1 = pr_tau(i1, i2, &i1.output_type)?.len();
    let total = pr_tau(i1, i2, out_ty)?.len();
    let code = xvars(total);
    let part1 = &code[..n1];
    let part2 = &code[n1..];
    let side = |k: u8, i: &Interp, part: &[FoTerm]| -> Result<FoFormula, InterpError> {
        let (tags, s1, s2) = pr_untag(i1, i2, &i.output_type, part)?;
        let own = if k == 1 { s1 } else { s2 };
        let tag_ok = FoFormula::and_all(tags.into_iter().map(|tg| {
            if k == 1 {
                istt(tg)
            } else {
                isff(tg)
            }
        }));
        Ok(FoFormula::and(tag_ok, out_match(i, &own)?))
    };
    Ok(OutSpec::Formula(FoFormula::and(
        side(1, i1, part1)?,
        side(2, i2, part2)?,
    )))
}

// ---------------------------------------------------------------------------
// combinator dispatch

/// The primitive interpretation combinators.
#[derive(Debug, Clone)]
pub enum Combinator {
    Singleton(ObjType),
    Union(ObjType),
    Difference(ObjType),
    BigUnion(ObjType),
    Get(ObjType),
    Strength(ObjType, ObjType),
    Map(Interp),
    Pair(Interp, Interp),
    Quotient(ObjType),
}

pub fn make_combinator(c: &Combinator) -> Result<Interp, InterpError> {
    match c {
        Combinator::Singleton(t) => singleton_interp(t),
        Combinator::Union(t) => union_interp(t),
        Combinator::Difference(t) => difference_interp(t),
        Combinator::BigUnion(t) => bigunion_interp(t),
        Combinator::Get(t) => get_interp(t),
        Combinator::Strength(env, t) => strength_interp(env, t),
        Combinator::Map(i) => map_interp(i),
        Combinator::Pair(i1, i2) => pair_interp(i1, i2),
        Combinator::Quotient(t) => quotient_interp(t),
    }
}

// ---------------------------------------------------------------------------
// composition

impl Interp {
    /// Total size of all formulas in the interpretation.
    pub fn formula_size(&self) -> usize {
        let mut n = 0;
        for c in self.sorts.values() {
            n += c.domain.size();
            if let Some(m) = &c.membership {
                n += m.size();
            }
        }
        n += match &self.out {
            OutSpec::Terms(ts) => ts.len(),
            OutSpec::Formula(f) => f.size(),
        };
        n
    }

    /// A pure term over the input: everything identity-coded and the output
    /// given by terms.
    fn as_term_root(&self) -> Option<FoTerm> {
        let OutSpec::Terms(ts) = &self.out else {
            return None;
        };
        if !self.is_identity_coded(&self.output_type) {
            return None;
        }
        Some(assemble(&self.output_type, ts))
    }
}

pub fn compose(i2: &Interp, i1: &Interp) -> Result<Interp, InterpError> {
    compose_budgeted(i2, i1, SIZE_BUDGET)
}

/// `i2 ∘ i1`, an interpretation from `i1`'s input to `i2`'s output: each
/// output sort of `i2` is coded by tuples of `i1`-codes, with `i2`'s
/// formulas translated atom-by-atom (equality becomes `i1`'s code
/// equivalence, membership becomes `i1`'s membership, quantifiers range over
/// `i1`-code tuples).
pub fn compose_budgeted(
    i2: &Interp,
    i1: &Interp,
    budget: usize,
) -> Result<Interp, InterpError> {
    if i2.input_type != i1.output_type {
        return Err(InterpError::TypeMismatch {
            detail: format!(
                "composing an interpretation of {} with one producing {}",
                i2.input_type, i1.output_type
            ),
        });
    }
    // peephole: when the inner interpretation is a pure term, composition is
    // substitution of that term for the input constant
    if component_sorts(&i1.output_type).is_subset(&component_sorts(&i1.input_type)) {
        if let Some(root) = i1.as_term_root() {
            let sorts = i2
                .sorts
                .iter()
                .map(|(s, c)| {
                    (
                        s.clone(),
                        SortCode {
                            tau: c.tau.clone(),
                            domain: c.domain.subst_oin(&root),
                            membership: c.membership.as_ref().map(|m| m.subst_oin(&root)),
                        },
                    )
                })
                .collect();
            let out = match &i2.out {
                OutSpec::Terms(ts) => {
                    OutSpec::Terms(ts.iter().map(|t| t.subst_oin(&root)).collect())
                }
                OutSpec::Formula(f) => OutSpec::Formula(f.subst_oin(&root)),
            };
            let i = Interp::new(i1.input_type.clone(), i2.output_type.clone(), sorts, out)?;
            return check_size(i, budget);
        }
    }

    let mut tr = Tr { i1, n: 0 };
    let mut sorts = BTreeMap::new();
    for c in component_sorts(&i2.output_type) {
        let tau2 = i2.tau(&c)?.to_vec();
        let (tau, xslices) = tr.slices(&tau2, xv)?;
        let (_, yslices) = tr.slices(&tau2, yv)?;
        let xvars_map = var_map(&tau2, &xslices, xv);
        let code2 = i2.code(&c)?;
        let mut domain = tr.formula(&code2.domain, &xvars_map)?;
        for (s, sl) in tau2.iter().zip(&xslices) {
            domain = FoFormula::and(domain, i1.domain_on(s, sl)?);
        }
        let membership = match &c {
            ObjType::SetOf(e) => {
                let elem_tau2 = i2.tau(e)?.to_vec();
                let (_, eslices) = tr.slices(&elem_tau2, xv)?;
                let mut vars = var_map(&elem_tau2, &eslices, xv);
                vars.extend(var_map(&tau2, &yslices, yv));
                let mem2 = code2.membership.clone().expect("validated set sort");
                Some(tr.formula(&mem2, &vars)?)
            }
            _ => None,
        };
        sorts.insert(
            c,
            SortCode {
                tau,
                domain,
                membership,
            },
        );
    }
    let out_tau2 = i2.tau(&i2.output_type)?.to_vec();
    let out = match &i2.out {
        OutSpec::Terms(ts) => {
            let mut pend = Pend::default();
            let mut tuples = Vec::new();
            for (t, s) in ts.iter().zip(&out_tau2) {
                let (tup, _) = tr.term(t, s, &BTreeMap::new(), &mut pend)?;
                tuples.push(tup);
            }
            if pend.binders.is_empty() && pend.constraints.is_empty() {
                OutSpec::Terms(tuples.concat())
            } else {
                let (_, slices) = tr.slices(&out_tau2, xv)?;
                let mut core = FoFormula::Top;
                for ((s, sl), tup) in out_tau2.iter().zip(&slices).zip(&tuples) {
                    core = FoFormula::and(core, i1.equiv_on(s, sl, tup, 0)?);
                }
                OutSpec::Formula(wrap_exists(pend, core))
            }
        }
        OutSpec::Formula(f) => {
            let (_, slices) = tr.slices(&out_tau2, xv)?;
            let vars = var_map(&out_tau2, &slices, xv);
            OutSpec::Formula(tr.formula(f, &vars)?)
        }
    };
    let i = Interp::new(i1.input_type.clone(), i2.output_type.clone(), sorts, out)?;
    check_size(i, budget)
}

fn check_size(i: Interp, budget: usize) -> Result<Interp, InterpError> {
    let i = i.simplified();
    let size = i.formula_size();
    if size > budget {
        return Err(InterpError::SizeBudgetExceeded { size, budget });
    }
    Ok(i)
}

#[derive(Default)]
struct Pend {
    binders: Vec<(String, ObjType)>,
    constraints: Vec<FoFormula>,
}

fn wrap_exists(pend: Pend, core: FoFormula) -> FoFormula {
    let body = FoFormula::and_all(pend.constraints.into_iter().chain([core]));
    pend.binders
        .into_iter()
        .rev()
        .fold(body, |acc, (x, s)| FoFormula::exists_sort(x, s, acc))
}

/// Variable-to-slice map for translating a formula whose free variables
/// follow the `x0..`/`y0..` convention.
fn var_map(
    tau2: &[ObjType],
    slices: &[Vec<FoTerm>],
    name: fn(usize) -> String,
) -> BTreeMap<String, (ObjType, Vec<FoTerm>)> {
    tau2.iter()
        .zip(slices)
        .enumerate()
        .map(|(j, (s, sl))| (name(j), (s.clone(), sl.clone())))
        .collect()
}

struct Tr<'a> {
    i1: &'a Interp,
    n: u64,
}

impl Tr<'_> {
    /// Fresh tuple variables for each of the given inner sorts, flattened
    /// through `i1`'s codings.
    fn slices(
        &mut self,
        tau2: &[ObjType],
        _name: fn(usize) -> String,
    ) -> Result<(Vec<ObjType>, Vec<Vec<FoTerm>>), InterpError> {
        let mut tau = Vec::new();
        let mut slices = Vec::new();
        for s in tau2 {
            let t1 = self.i1.tau(s)?.to_vec();
            let start = tau.len();
            let slice: Vec<FoTerm> = (0..t1.len())
                .map(|j| FoTerm::var(_name(start + j)))
                .collect();
            tau.extend(t1);
            slices.push(slice);
        }
        Ok((tau, slices))
    }

    fn fresh_tuple(&mut self, tau: &[ObjType], pend: &mut Pend) -> Vec<FoTerm> {
        let k = self.n;
        self.n += 1;
        tau.iter()
            .enumerate()
            .map(|(j, s)| {
                let name = format!("cv{k}_{j}");
                pend.binders.push((name.clone(), s.clone()));
                FoTerm::var(name)
            })
            .collect()
    }

    fn bound_tuple(&mut self, tau: &[ObjType]) -> Vec<(String, ObjType)> {
        let k = self.n;
        self.n += 1;
        tau.iter()
            .enumerate()
            .map(|(j, s)| (format!("cb{k}_{j}"), s.clone()))
            .collect()
    }

    /// Translate a term of inner sort `sort` into a tuple of `i1`-layout
    /// terms, possibly adding existential binders for constants that have no
    /// term-level code.
    fn term(
        &mut self,
        t: &FoTerm,
        sort: &ObjType,
        vars: &BTreeMap<String, (ObjType, Vec<FoTerm>)>,
        pend: &mut Pend,
    ) -> Result<(Vec<FoTerm>, ObjType), InterpError> {
        match t {
            FoTerm::Var(x) => {
                let (s, tup) = vars.get(x).ok_or_else(|| InterpError::IllFormedInterp {
                    detail: format!("unbound variable {x} in a composed formula"),
                })?;
                Ok((tup.clone(), s.clone()))
            }
            FoTerm::OIn => {
                let b = self.i1.output_type.clone();
                match &self.i1.out {
                    OutSpec::Terms(ts) => Ok((ts.clone(), b)),
                    OutSpec::Formula(f) => {
                        let tau = self.i1.tau(&b)?.to_vec();
                        let vs = self.fresh_tuple(&tau, pend);
                        pend.constraints.push(self.i1.domain_on(&b, &vs)?);
                        let map: BTreeMap<String, FoTerm> = vs
                            .iter()
                            .enumerate()
                            .map(|(j, v)| (xv(j), v.clone()))
                            .collect();
                        pend.constraints.push(f.subst(&map));
                        Ok((vs, b))
                    }
                }
            }
            FoTerm::C0 => Ok((vec![FoTerm::C0], ObjType::U)),
            FoTerm::UnitC => Ok((vec![FoTerm::UnitC], ObjType::Unit)),
            FoTerm::TrueC => {
                let b = bool_ty();
                let tau = self.i1.tau(&b)?.to_vec();
                let vs = self.fresh_tuple(&tau, pend);
                pend.constraints.push(self.i1.domain_on(&b, &vs)?);
                pend.constraints.push(FoFormula::exists_sort(
                    "cu",
                    ObjType::Unit,
                    self.i1.mem_on(&ObjType::Unit, &[FoTerm::var("cu")], &vs)?,
                ));
                Ok((vs, b))
            }
            FoTerm::EmptyC(e) => {
                let set_sort = ObjType::set(e.clone());
                let tau = self.i1.tau(&set_sort)?.to_vec();
                let vs = self.fresh_tuple(&tau, pend);
                pend.constraints.push(self.i1.domain_on(&set_sort, &vs)?);
                let elem_tau = self.i1.tau(e)?.to_vec();
                let bound = self.bound_tuple(&elem_tau);
                let evars: Vec<FoTerm> =
                    bound.iter().map(|(x, _)| FoTerm::var(x.clone())).collect();
                let inner = FoFormula::and(
                    self.i1.domain_on(e, &evars)?,
                    self.i1.mem_on(e, &evars, &vs)?,
                );
                let nonempty = bound
                    .into_iter()
                    .rev()
                    .fold(inner, |acc, (x, s)| FoFormula::exists_sort(x, s, acc));
                pend.constraints.push(FoFormula::not(nonempty));
                Ok((vs, set_sort))
            }
            FoTerm::Pair(a, b) => {
                let (mut ta, sa) = self.term(a, sort, vars, pend)?;
                let (tb, sb) = self.term(b, sort, vars, pend)?;
                ta.extend(tb);
                Ok((ta, ObjType::prod(sa, sb)))
            }
            FoTerm::Proj1(a) | FoTerm::Proj2(a) => {
                let (tup, s) = self.term(a, sort, vars, pend)?;
                let ObjType::Prod(l, r) = s else {
                    return Err(InterpError::IllFormedInterp {
                        detail: "projection of a non-product in a composed formula".into(),
                    });
                };
                let nl = self.i1.tau(&l)?.len();
                match t {
                    FoTerm::Proj1(_) => Ok((tup[..nl].to_vec(), *l)),
                    _ => Ok((tup[nl..].to_vec(), *r)),
                }
            }
        }
    }

    fn atom(
        &mut self,
        t: &FoTerm,
        u: &FoTerm,
        sort: &ObjType,
        vars: &BTreeMap<String, (ObjType, Vec<FoTerm>)>,
        mem_elem: Option<&ObjType>,
    ) -> Result<FoFormula, InterpError> {
        let mut pend = Pend::default();
        let (tt, _) = self.term(t, sort, vars, &mut pend)?;
        let (uu, _) = self.term(u, sort, vars, &mut pend)?;
        let core = match mem_elem {
            None => self.i1.equiv_on(sort, &tt, &uu, 0)?,
            Some(e) => self.i1.mem_on(e, &tt, &uu)?,
        };
        Ok(wrap_exists(pend, core))
    }

    fn formula(
        &mut self,
        f: &FoFormula,
        vars: &BTreeMap<String, (ObjType, Vec<FoTerm>)>,
    ) -> Result<FoFormula, InterpError> {
        match f {
            FoFormula::Eq(s, t, u) => self.atom(t, u, s, vars, None),
            FoFormula::Mem(e, t, u) => self.atom(t, u, e, vars, Some(e)),
            FoFormula::Top => Ok(FoFormula::Top),
            FoFormula::Bot => Ok(FoFormula::Bot),
            FoFormula::Not(a) => Ok(FoFormula::not(self.formula(a, vars)?)),
            FoFormula::And(a, b) => Ok(FoFormula::and(
                self.formula(a, vars)?,
                self.formula(b, vars)?,
            )),
            FoFormula::Or(a, b) => Ok(FoFormula::or(
                self.formula(a, vars)?,
                self.formula(b, vars)?,
            )),
            FoFormula::ForallIn(x, e, u, body) | FoFormula::ExistsIn(x, e, u, body) => {
                let exists = matches!(f, FoFormula::ExistsIn(..));
                let mut pend = Pend::default();
                let (uu, _) = self.term(u, &ObjType::set(e.clone()), vars, &mut pend)?;
                let tau = self.i1.tau(e)?.to_vec();
                let bound = self.bound_tuple(&tau);
                let bvars: Vec<FoTerm> =
                    bound.iter().map(|(b, _)| FoTerm::var(b.clone())).collect();
                let guard = FoFormula::and(
                    self.i1.domain_on(e, &bvars)?,
                    wrap_exists(pend, self.i1.mem_on(e, &bvars, &uu)?),
                );
                let mut vars2 = vars.clone();
                vars2.insert(x.clone(), (e.clone(), bvars));
                let body2 = self.formula(body, &vars2)?;
                Ok(quantify(bound, exists, guard, body2))
            }
            FoFormula::ForallSort(x, s, body) | FoFormula::ExistsSort(x, s, body) => {
                let exists = matches!(f, FoFormula::ExistsSort(..));
                let tau = self.i1.tau(s)?.to_vec();
                let bound = self.bound_tuple(&tau);
                let bvars: Vec<FoTerm> =
                    bound.iter().map(|(b, _)| FoTerm::var(b.clone())).collect();
                let guard = self.i1.domain_on(s, &bvars)?;
                let mut vars2 = vars.clone();
                vars2.insert(x.clone(), (s.clone(), bvars));
                let body2 = self.formula(body, &vars2)?;
                Ok(quantify(bound, exists, guard, body2))
            }
        }
    }
}

fn quantify(
    bound: Vec<(String, ObjType)>,
    exists: bool,
    guard: FoFormula,
    body: FoFormula,
) -> FoFormula {
    let inner = if exists {
        FoFormula::and(guard, body)
    } else {
        FoFormula::or(FoFormula::not(guard), body)
    };
    bound.into_iter().rev().fold(inner, |acc, (x, s)| {
        if exists {
            FoFormula::exists_sort(x, s, acc)
        } else {
            FoFormula::forall_sort(x, s, acc)
        }
    })
}

// ---------------------------------------------------------------------------
// NRC[Get] to interpretations

use crate::kernel::TypeContext;

pub fn nrc_to_interp(
    input_var: &str,
    input_ty: &ObjType,
    e: &NrcExpr,
) -> Result<Interp, InterpError> {
    nrc_to_interp_budgeted(input_var, input_ty, e, SIZE_BUDGET)
}

/// Translate a (typechecked) expression with one free variable into an
/// interpretation, structurally through the combinators: pairs become the
/// tagged-union pairing, set operations their set combinators, and a big
/// union becomes flattening after mapping the body over the strengthened
/// source.  Pure projection/constant subexpressions short-circuit to term
/// interpretations, which keeps the composition-induced blowup confined to
/// genuinely higher-order parts.
pub fn nrc_to_interp_budgeted(
    input_var: &str,
    input_ty: &ObjType,
    e: &NrcExpr,
    budget: usize,
) -> Result<Interp, InterpError> {
    let mut ctx = TypeContext::new();
    ctx.insert(input_var.to_string(), input_ty.clone());
    typecheck_nrc(&ctx, e)?;
    let mut env = BTreeMap::new();
    env.insert(
        input_var.to_string(),
        (input_ty.clone(), FoTerm::OIn),
    );
    translate_nrc(input_ty, &env, e, budget)
}

fn to_path(e: &NrcExpr, env: &BTreeMap<String, (ObjType, FoTerm)>) -> Option<FoTerm> {
    match e {
        NrcExpr::Var(x) => env.get(x).map(|(_, p)| p.clone()),
        NrcExpr::UnitE => Some(FoTerm::UnitC),
        NrcExpr::PairE(a, b) => Some(FoTerm::pair(to_path(a, env)?, to_path(b, env)?)),
        NrcExpr::ProjE(1, a) => Some(FoTerm::proj1(to_path(a, env)?)),
        NrcExpr::ProjE(_, a) => Some(FoTerm::proj2(to_path(a, env)?)),
        NrcExpr::EmptyE(t) => Some(FoTerm::EmptyC(t.clone())),
        _ => None,
    }
}

fn translate_nrc(
    env_ty: &ObjType,
    env: &BTreeMap<String, (ObjType, FoTerm)>,
    e: &NrcExpr,
    budget: usize,
) -> Result<Interp, InterpError> {
    let ctx: TypeContext = env
        .iter()
        .map(|(k, (t, _))| (k.clone(), t.clone()))
        .collect();
    let ty = typecheck_nrc(&ctx, e)?;
    if let Some(p) = to_path(e, env) {
        return check_size(term_interp(env_ty, &ty, p)?, budget);
    }
    match e {
        NrcExpr::PairE(a, b) => {
            let ia = translate_nrc(env_ty, env, a, budget)?;
            let ib = translate_nrc(env_ty, env, b, budget)?;
            check_size(pair_interp(&ia, &ib)?, budget)
        }
        NrcExpr::ProjE(i, a) => {
            let ia = translate_nrc(env_ty, env, a, budget)?;
            let root = if *i == 1 {
                FoTerm::proj1(FoTerm::OIn)
            } else {
                FoTerm::proj2(FoTerm::OIn)
            };
            let outer = term_interp(&ia.output_type, &ty, root)?;
            compose_budgeted(&outer, &ia, budget)
        }
        NrcExpr::SingletonE(a) => {
            let ia = translate_nrc(env_ty, env, a, budget)?;
            compose_budgeted(&singleton_interp(&ia.output_type)?, &ia, budget)
        }
        NrcExpr::UnionE(a, b) | NrcExpr::DiffE(a, b) => {
            let ia = translate_nrc(env_ty, env, a, budget)?;
            let ib = translate_nrc(env_ty, env, b, budget)?;
            let ObjType::SetOf(elem) = &ty else {
                unreachable!("typechecked set operation")
            };
            let op = if matches!(e, NrcExpr::UnionE(..)) {
                union_interp(elem)?
            } else {
                difference_interp(elem)?
            };
            compose_budgeted(&op, &check_size(pair_interp(&ia, &ib)?, budget)?, budget)
        }
        NrcExpr::GetE(a) => {
            let ia = translate_nrc(env_ty, env, a, budget)?;
            compose_budgeted(&get_interp(&ty)?, &ia, budget)
        }
        NrcExpr::BigUnionE(x, src, body) => {
            let isrc = translate_nrc(env_ty, env, src, budget)?;
            let ObjType::SetOf(tx) = isrc.output_type.clone() else {
                unreachable!("typechecked big union")
            };
            let idenv = identity_interp(env_ty)?;
            let withsrc = check_size(pair_interp(&idenv, &isrc)?, budget)?;
            let istep = compose_budgeted(&strength_interp(env_ty, &tx)?, &withsrc, budget)?;
            let p_ty = ObjType::prod(env_ty.clone(), (*tx).clone());
            let mut env2: BTreeMap<String, (ObjType, FoTerm)> = env
                .iter()
                .map(|(k, (t, p))| {
                    (
                        k.clone(),
                        (t.clone(), p.subst_oin(&FoTerm::proj1(FoTerm::OIn))),
                    )
                })
                .collect();
            env2.insert(x.clone(), ((*tx).clone(), FoTerm::proj2(FoTerm::OIn)));
            let ibody = translate_nrc(&p_ty, &env2, body, budget)?;
            let ObjType::SetOf(tb) = ibody.output_type.clone() else {
                unreachable!("typechecked big union body")
            };
            let imap = check_size(map_interp(&ibody)?, budget)?;
            let mapped = compose_budgeted(&imap, &istep, budget)?;
            compose_budgeted(&bigunion_interp(&tb)?, &mapped, budget)
        }
        _ => unreachable!("remaining forms are paths"),
    }
}

// ---------------------------------------------------------------------------
// interpretations to NRC[Get]

/// Expressions enumerating the carriers of the least input structure, per
/// input component sort: subobject collectors closed under the empty set,
/// unit and Boolean values, and all pairs at product sorts.  Returned as a
/// bottom-up list of named bindings — each definition refers to earlier
/// carriers by name, so the compiled expression binds every carrier once
/// instead of inlining it at each use.
fn carrier_exprs(
    input_ty: &ObjType,
    input_var: &str,
    with_c0: bool,
) -> Vec<(ObjType, String, NrcExpr)> {
    fn collect(
        ty: &ObjType,
        set_expr: NrcExpr,
        subs: &mut BTreeMap<ObjType, Vec<NrcExpr>>,
        n: &mut u64,
    ) {
        subs.entry(ty.clone()).or_default().push(set_expr.clone());
        match ty {
            ObjType::SetOf(s) => {
                let b = format!("cx{}", *n);
                *n += 1;
                collect(
                    s,
                    NrcExpr::bigunion(b.clone(), set_expr, NrcExpr::var(b)),
                    subs,
                    n,
                );
            }
            ObjType::Prod(a, bty) => {
                let p = format!("cx{}", *n);
                *n += 1;
                collect(
                    a,
                    NrcExpr::bigunion(
                        p.clone(),
                        set_expr.clone(),
                        NrcExpr::singleton(NrcExpr::proj(1, NrcExpr::var(&p))),
                    ),
                    subs,
                    n,
                );
                let q = format!("cx{}", *n);
                *n += 1;
                collect(
                    bty,
                    NrcExpr::bigunion(
                        q.clone(),
                        set_expr,
                        NrcExpr::singleton(NrcExpr::proj(2, NrcExpr::var(&q))),
                    ),
                    subs,
                    n,
                );
            }
            _ => {}
        }
    }
    let mut subs: BTreeMap<ObjType, Vec<NrcExpr>> = BTreeMap::new();
    let mut n = 0u64;
    collect(
        input_ty,
        NrcExpr::singleton(NrcExpr::var(input_var)),
        &mut subs,
        &mut n,
    );
    let mut ordered: Vec<ObjType> = component_sorts(input_ty).into_iter().collect();
    ordered.sort_by_key(type_depth);
    let mut names: BTreeMap<ObjType, String> = BTreeMap::new();
    let mut out: Vec<(ObjType, String, NrcExpr)> = Vec::new();
    for (k, s) in ordered.into_iter().enumerate() {
        let mut parts: Vec<NrcExpr> = subs.remove(&s).unwrap_or_default();
        match &s {
            ObjType::U => {
                if with_c0 {
                    parts.push(NrcExpr::singleton(NrcExpr::get(NrcExpr::EmptyE(
                        ObjType::U,
                    ))));
                }
            }
            ObjType::Unit => parts.push(NrcExpr::singleton(NrcExpr::UnitE)),
            ObjType::SetOf(t) => {
                parts.push(NrcExpr::singleton(NrcExpr::EmptyE((**t).clone())));
                if **t == ObjType::Unit {
                    parts.push(NrcExpr::singleton(NrcExpr::tt()));
                }
            }
            ObjType::Prod(a, b) => {
                let pa = format!("cx{n}");
                let pb = format!("cx{}", n + 1);
                n += 2;
                parts = vec![NrcExpr::bigunion(
                    pa.clone(),
                    NrcExpr::var(&names[a.as_ref()]),
                    NrcExpr::bigunion(
                        pb.clone(),
                        NrcExpr::var(&names[b.as_ref()]),
                        NrcExpr::singleton(NrcExpr::pair(NrcExpr::var(&pa), NrcExpr::var(&pb))),
                    ),
                )];
            }
        }
        let expr = parts
            .into_iter()
            .reduce(NrcExpr::union)
            .unwrap_or(NrcExpr::EmptyE(s.clone()));
        let name = format!("cs{k}");
        names.insert(s.clone(), name.clone());
        out.push((s, name, expr));
    }
    out
}

struct NrcGen<'a> {
    i: &'a Interp,
    carriers: BTreeMap<ObjType, NrcExpr>,
    n: u64,
}

impl NrcGen<'_> {
    fn freshv(&mut self) -> String {
        let k = self.n;
        self.n += 1;
        format!("dv{k}")
    }

    fn carrier(&self, s: &ObjType) -> Result<NrcExpr, InterpError> {
        self.carriers
            .get(s)
            .cloned()
            .ok_or_else(|| InterpError::IllFormedInterp {
                detail: format!("no carrier enumeration for sort {s}"),
            })
    }

    /// Let-bind a set-valued expression so it appears (and is evaluated)
    /// once: `⋃ { body(v) | v ∈ {e} }`.  Keeps `case_expr`'s scrutinee
    /// duplication from compounding across nested connectives.
    fn bind_set(&mut self, e: NrcExpr, f: impl FnOnce(&NrcExpr) -> NrcExpr) -> NrcExpr {
        if matches!(e, NrcExpr::Var(_)) {
            return f(&e);
        }
        let v = self.freshv();
        let body = f(&NrcExpr::var(&v));
        NrcExpr::bigunion(v, NrcExpr::singleton(e), body)
    }

    fn term(&self, t: &FoTerm, env: &BTreeMap<String, NrcExpr>) -> Result<NrcExpr, InterpError> {
        Ok(match t {
            FoTerm::Var(x) => env
                .get(x)
                .cloned()
                .ok_or_else(|| InterpError::IllFormedInterp {
                    detail: format!("unbound variable {x} while compiling a formula"),
                })?,
            FoTerm::OIn => env["__o_in"].clone(),
            FoTerm::C0 => NrcExpr::get(NrcExpr::EmptyE(ObjType::U)),
            FoTerm::UnitC => NrcExpr::UnitE,
            FoTerm::EmptyC(e) => NrcExpr::EmptyE(e.clone()),
            FoTerm::TrueC => NrcExpr::tt(),
            FoTerm::Pair(a, b) => NrcExpr::pair(self.term(a, env)?, self.term(b, env)?),
            FoTerm::Proj1(a) => NrcExpr::proj(1, self.term(a, env)?),
            FoTerm::Proj2(a) => NrcExpr::proj(2, self.term(a, env)?),
        })
    }

    fn compile(
        &mut self,
        f: &FoFormula,
        env: &BTreeMap<String, NrcExpr>,
    ) -> Result<NrcExpr, InterpError> {
        use crate::nrc::{eq_expr, mem_expr};
        let bool_t = bool_ty();
        Ok(match f {
            FoFormula::Eq(ty, a, b) => eq_expr(ty, &self.term(a, env)?, &self.term(b, env)?),
            FoFormula::Mem(ty, a, b) => mem_expr(ty, &self.term(a, env)?, &self.term(b, env)?),
            FoFormula::Top => NrcExpr::tt(),
            FoFormula::Bot => NrcExpr::ff(),
            FoFormula::Not(a) => {
                let ca = self.compile(a, env)?;
                self.bind_set(ca, |b| case_expr(b, &NrcExpr::ff(), &NrcExpr::tt(), &bool_t))
            }
            FoFormula::And(a, b) => {
                let ca = self.compile(a, env)?;
                let cb = self.compile(b, env)?;
                self.bind_set(ca, |b| case_expr(b, &cb, &NrcExpr::ff(), &bool_t))
            }
            FoFormula::Or(a, b) => {
                NrcExpr::union(self.compile(a, env)?, self.compile(b, env)?)
            }
            FoFormula::ForallIn(x, ty, t, a) | FoFormula::ExistsIn(x, ty, t, a) => {
                let src = self.term(t, env)?;
                self.quantifier(f, x, ty, src, a, env)?
            }
            FoFormula::ForallSort(x, ty, a) | FoFormula::ExistsSort(x, ty, a) => {
                let src = self.carrier(ty)?;
                self.quantifier(f, x, ty, src, a, env)?
            }
        })
    }

    fn quantifier(
        &mut self,
        f: &FoFormula,
        x: &str,
        _ty: &ObjType,
        src: NrcExpr,
        body: &FoFormula,
        env: &BTreeMap<String, NrcExpr>,
    ) -> Result<NrcExpr, InterpError> {
        let universal = matches!(f, FoFormula::ForallIn(..) | FoFormula::ForallSort(..));
        let bool_t = bool_ty();
        let mut env2 = env.clone();
        env2.insert(x.to_string(), NrcExpr::var(x));
        let mut inner = self.compile(body, &env2)?;
        if universal {
            inner =
                self.bind_set(inner, |b| case_expr(b, &NrcExpr::ff(), &NrcExpr::tt(), &bool_t));
        }
        let picked =
            self.bind_set(inner, |b| case_expr(b, &NrcExpr::tt(), &NrcExpr::ff(), &bool_t));
        let hit = NrcExpr::bigunion(x.to_string(), src, picked);
        Ok(if universal {
            self.bind_set(hit, |h| case_expr(h, &NrcExpr::ff(), &NrcExpr::tt(), &bool_t))
        } else {
            hit
        })
    }

    fn decode(
        &mut self,
        sort: &ObjType,
        code: &[NrcExpr],
        o_in: &NrcExpr,
    ) -> Result<NrcExpr, InterpError> {
        Ok(match sort {
            ObjType::U | ObjType::Unit => code[0].clone(),
            ObjType::Prod(a, b) => {
                let na = self.i.tau(a)?.len();
                NrcExpr::pair(
                    self.decode(a, &code[..na], o_in)?,
                    self.decode(b, &code[na..], o_in)?,
                )
            }
            ObjType::SetOf(t) => {
                let elem_tau = self.i.tau(t)?.to_vec();
                let binders: Vec<String> = (0..elem_tau.len()).map(|_| self.freshv()).collect();
                let mut env: BTreeMap<String, NrcExpr> = binders
                    .iter()
                    .enumerate()
                    .map(|(j, b)| (xv(j), NrcExpr::var(b)))
                    .collect();
                for (j, c) in code.iter().enumerate() {
                    env.insert(yv(j), c.clone());
                }
                env.insert("__o_in".to_string(), o_in.clone());
                let dom = self.i.code(t)?.domain.clone();
                let mem = self
                    .i
                    .code(sort)?
                    .membership
                    .clone()
                    .expect("validated set sort");
                let cond = self.compile(&FoFormula::and(dom, mem), &env)?;
                let bvars: Vec<NrcExpr> = binders.iter().map(NrcExpr::var).collect();
                let elem = self.decode(t, &bvars, o_in)?;
                let body = self.bind_set(cond, |c| {
                    case_expr(
                        c,
                        &NrcExpr::singleton(elem),
                        &NrcExpr::EmptyE((**t).clone()),
                        &ObjType::set((**t).clone()),
                    )
                });
                binders
                    .iter()
                    .zip(&elem_tau)
                    .rev()
                    .try_fold(body, |acc, (b, s)| {
                        Ok::<_, InterpError>(NrcExpr::bigunion(b.clone(), self.carrier(s)?, acc))
                    })?
            }
        })
    }
}

/// Compile an interpretation back to an NRC[Get] expression in the given
/// input variable: codes are enumerated over subobject collectors, formulas
/// through the `Verify` construction, and the output decoded recursively.
pub fn interp_to_nrc(i: &Interp, input_var: &str) -> Result<NrcExpr, InterpError> {
    let bindings = carrier_exprs(&i.input_type, input_var, i.mentions_c0());
    let carriers = bindings
        .iter()
        .map(|(s, name, _)| (s.clone(), NrcExpr::var(name)))
        .collect();
    let mut g = NrcGen { i, carriers, n: 0 };
    let o_in = NrcExpr::var(input_var);
    let expr = match &i.out {
        OutSpec::Terms(ts) => {
            let mut env = BTreeMap::new();
            env.insert("__o_in".to_string(), o_in.clone());
            let code: Vec<NrcExpr> = ts
                .iter()
                .map(|t| g.term(t, &env))
                .collect::<Result<_, _>>()?;
            g.decode(&i.output_type, &code, &o_in)?
        }
        OutSpec::Formula(f) => {
            let out_ty = i.output_type.clone();
            let tau = i.tau(&out_ty)?.to_vec();
            let binders: Vec<String> = (0..tau.len()).map(|_| g.freshv()).collect();
            let mut env: BTreeMap<String, NrcExpr> = binders
                .iter()
                .enumerate()
                .map(|(j, b)| (xv(j), NrcExpr::var(b)))
                .collect();
            env.insert("__o_in".to_string(), o_in.clone());
            let dom = i.code(&out_ty)?.domain.clone();
            let cond = g.compile(&FoFormula::and(dom, f.clone()), &env)?;
            let bvars: Vec<NrcExpr> = binders.iter().map(NrcExpr::var).collect();
            let elem = g.decode(&out_ty, &bvars, &o_in)?;
            let body = g.bind_set(cond, |c| {
                case_expr(
                    c,
                    &NrcExpr::singleton(elem),
                    &NrcExpr::EmptyE(out_ty.clone()),
                    &ObjType::set(out_ty.clone()),
                )
            });
            let all = binders
                .iter()
                .zip(&tau)
                .rev()
                .try_fold(body, |acc, (b, s)| {
                    Ok::<_, InterpError>(NrcExpr::bigunion(b.clone(), g.carrier(s)?, acc))
                })?;
            NrcExpr::get(all)
        }
    };
    // bind every carrier once around the whole expression; a non-set result
    // is boxed in a singleton so the bindings stay well-typed, and unboxed
    // with Get at the end
    let is_set = matches!(i.output_type, ObjType::SetOf(_));
    let mut body = if is_set {
        expr
    } else {
        NrcExpr::singleton(expr)
    };
    for (_, name, def) in bindings.into_iter().rev() {
        body = NrcExpr::bigunion(name, NrcExpr::singleton(def), body);
    }
    Ok(if is_set { body } else { NrcExpr::get(body) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nrc::eval_nrc_typed;
    use crate::values::{enumerate_values, Valuation};

    fn u() -> ObjType {
        ObjType::U
    }
    fn a(n: &str) -> Value {
        Value::atom(n)
    }
    fn set(xs: Vec<Value>) -> Value {
        Value::set(xs)
    }
    fn pv(x: Value, y: Value) -> Value {
        Value::pair(x, y)
    }

    /// `R0 = {⟨a,{a,b}⟩, ⟨a,{a,c}⟩, ⟨b,{a,c}⟩}` of type `Set(U × Set(U))`.
    fn r0() -> (Value, ObjType) {
        let ab = set(vec![a("a"), a("b")]);
        let ac = set(vec![a("a"), a("c")]);
        (
            set(vec![
                pv(a("a"), ab.clone()),
                pv(a("a"), ac.clone()),
                pv(a("b"), ac),
            ]),
            ObjType::set(ObjType::prod(u(), ObjType::set(u()))),
        )
    }

    #[test]
    fn least_structure_of_grouping_relation() {
        // [PAPER] carriers of the least structure over R0: three atoms, the
        // two inner sets plus the empty set, the full pair closure, and the
        // relation itself alongside the empty set.
        let (o, ty) = r0();
        let st = build_input_structure(&o, &ty);
        assert_eq!(
            st.sorts[&u()],
            vec![a("a"), a("b"), a("c")],
        );
        assert_eq!(
            st.sorts[&ObjType::set(u())],
            vec![
                Value::empty_set(),
                set(vec![a("a"), a("b")]),
                set(vec![a("a"), a("c")]),
            ],
        );
        assert_eq!(st.sorts[&ObjType::prod(u(), ObjType::set(u()))].len(), 9);
        assert_eq!(st.sorts[&ty], vec![Value::empty_set(), o.clone()]);
        assert_eq!(st.sorts[&ObjType::Unit], vec![Value::UnitV]);
        assert_eq!(
            st.sorts[&bool_ty()],
            vec![Value::empty_set(), set(vec![Value::UnitV])],
        );
        // [TRIVIAL] collapsing the constant of an input structure gives back
        // the object itself
        assert_eq!(collapse(&st, &ty, &o).unwrap(), o);
    }

    #[test]
    fn identity_interpretation_round_trips() {
        // [TRIVIAL] the identity interpretation evaluates to its input
        let (o, ty) = r0();
        let id = identity_interp(&ty).unwrap();
        assert_eq!(eval_interpretation(&id, &o).unwrap(), o);
        let id_u = identity_interp(&u()).unwrap();
        assert_eq!(eval_interpretation(&id_u, &a("x")).unwrap(), a("x"));
    }

    /// The grouping interpretation: groups are coded by their key
    /// Ur-element, so the two rows keyed by `a` collapse into one group.
    fn grouping_interp() -> Interp {
        let (_, in_ty) = r0();
        let set_u = ObjType::set(u());
        let set_set_u = ObjType::set(set_u.clone());
        let out_elem = ObjType::prod(u(), set_set_u.clone());
        let out_ty = ObjType::set(out_elem.clone());
        let key_exists = |t: FoTerm| {
            FoFormula::exists_in(
                "p",
                ObjType::prod(u(), set_u.clone()),
                FoTerm::OIn,
                FoFormula::Eq(u(), FoTerm::proj1(FoTerm::var("p")), t),
            )
        };
        let mut sorts = BTreeMap::new();
        sorts.insert(
            u(),
            SortCode {
                tau: vec![u()],
                domain: FoFormula::Top,
                membership: None,
            },
        );
        sorts.insert(
            ObjType::Unit,
            SortCode {
                tau: vec![ObjType::Unit],
                domain: FoFormula::Top,
                membership: None,
            },
        );
        sorts.insert(
            bool_ty(),
            SortCode {
                tau: vec![bool_ty()],
                domain: FoFormula::Top,
                membership: Some(identity_mem(&ObjType::Unit)),
            },
        );
        sorts.insert(
            set_u.clone(),
            SortCode {
                tau: vec![set_u.clone()],
                domain: FoFormula::Top,
                membership: Some(identity_mem(&u())),
            },
        );
        sorts.insert(
            set_set_u.clone(),
            SortCode {
                tau: vec![u()],
                domain: key_exists(FoTerm::var(xv(0))),
                membership: Some(FoFormula::exists_in(
                    "p",
                    ObjType::prod(u(), set_u.clone()),
                    FoTerm::OIn,
                    FoFormula::and(
                        FoFormula::Eq(u(), FoTerm::proj1(FoTerm::var("p")), FoTerm::var(yv(0))),
                        FoFormula::Eq(
                            set_u.clone(),
                            FoTerm::proj2(FoTerm::var("p")),
                            FoTerm::var(xv(0)),
                        ),
                    ),
                )),
            },
        );
        sorts.insert(
            out_elem.clone(),
            SortCode {
                tau: vec![u(), u()],
                domain: FoFormula::and(
                    FoFormula::Eq(u(), FoTerm::var(xv(0)), FoTerm::var(xv(1))),
                    key_exists(FoTerm::var(xv(0))),
                ),
                membership: None,
            },
        );
        sorts.insert(
            out_ty.clone(),
            SortCode {
                tau: vec![ObjType::Unit],
                domain: FoFormula::Top,
                membership: Some(FoFormula::and(
                    FoFormula::Eq(u(), FoTerm::var(xv(0)), FoTerm::var(xv(1))),
                    key_exists(FoTerm::var(xv(0))),
                )),
            },
        );
        Interp::new(
            in_ty,
            out_ty,
            sorts,
            OutSpec::Terms(vec![FoTerm::UnitC]),
        )
        .unwrap()
    }

    #[test]
    fn grouping_interpretation_on_reference_relation() {
        // [PAPER] grouping R0 yields {⟨a,{{a,b},{a,c}}⟩, ⟨b,{{a,c}}⟩}
        let (o, _) = r0();
        let ab = set(vec![a("a"), a("b")]);
        let ac = set(vec![a("a"), a("c")]);
        let expected = set(vec![
            pv(a("a"), set(vec![ab, ac.clone()])),
            pv(a("b"), set(vec![ac])),
        ]);
        assert_eq!(eval_interpretation(&grouping_interp(), &o).unwrap(), expected);
    }

    #[test]
    fn grouping_structure_collapses_consistently() {
        // [DERIVED] the output structure's constant collapses to the same
        // value as direct evaluation
        let (o, _) = r0();
        let g = grouping_interp();
        let st = eval_to_structure(&g, &o).unwrap();
        let via_structure = collapse(&st, &g.output_type, &st.constant).unwrap();
        assert_eq!(via_structure, eval_interpretation(&g, &o).unwrap());
    }

    #[test]
    fn set_combinators_evaluate_pointwise() {
        // [DERIVED] hand evaluations of the primitive combinators
        let sing = singleton_interp(&u()).unwrap();
        assert_eq!(
            eval_interpretation(&sing, &a("a")).unwrap(),
            set(vec![a("a")])
        );

        let ab = set(vec![a("a"), a("b")]);
        let bc = set(vec![a("b"), a("c")]);
        let uni = union_interp(&u()).unwrap();
        assert_eq!(
            eval_interpretation(&uni, &pv(ab.clone(), bc.clone())).unwrap(),
            set(vec![a("a"), a("b"), a("c")])
        );
        let dif = difference_interp(&u()).unwrap();
        assert_eq!(
            eval_interpretation(&dif, &pv(ab.clone(), bc.clone())).unwrap(),
            set(vec![a("a")])
        );

        let big = bigunion_interp(&u()).unwrap();
        assert_eq!(
            eval_interpretation(&big, &set(vec![ab.clone(), bc])).unwrap(),
            set(vec![a("a"), a("b"), a("c")])
        );
    }

    #[test]
    fn get_combinator_uses_defaults() {
        // [DERIVED] Get yields the unique element of a singleton and the
        // reserved atom otherwise
        let get = get_interp(&u()).unwrap();
        assert_eq!(
            eval_interpretation(&get, &set(vec![a("a")])).unwrap(),
            a("a")
        );
        assert_eq!(
            eval_interpretation(&get, &Value::empty_set()).unwrap(),
            a(C0_ATOM)
        );
        assert_eq!(
            eval_interpretation(&get, &set(vec![a("a"), a("b")])).unwrap(),
            a(C0_ATOM)
        );
    }

    #[test]
    fn map_of_singleton_wraps_members() {
        // [DERIVED] Map({·}) : Set(U) → Set(Set(U)) wraps each atom
        let m = map_interp(&singleton_interp(&u()).unwrap()).unwrap();
        assert_eq!(
            eval_interpretation(&m, &set(vec![a("a"), a("b")])).unwrap(),
            set(vec![set(vec![a("a")]), set(vec![a("b")])])
        );
        assert_eq!(
            eval_interpretation(&m, &Value::empty_set()).unwrap(),
            Value::empty_set()
        );
    }

    #[test]
    fn pairing_and_composition() {
        // [DERIVED] ⟨π2, π1⟩ swaps; Get ∘ {·} is the identity
        let in_ty = ObjType::prod(u(), ObjType::set(u()));
        let p1 = term_interp(&in_ty, &u(), FoTerm::proj1(FoTerm::OIn)).unwrap();
        let p2 = term_interp(&in_ty, &ObjType::set(u()), FoTerm::proj2(FoTerm::OIn)).unwrap();
        let swapped = pair_interp(&p2, &p1).unwrap();
        let ab = set(vec![a("a"), a("b")]);
        assert_eq!(
            eval_interpretation(&swapped, &pv(a("c"), ab.clone())).unwrap(),
            pv(ab, a("c"))
        );

        let round = compose(
            &get_interp(&u()).unwrap(),
            &singleton_interp(&u()).unwrap(),
        )
        .unwrap();
        assert_eq!(eval_interpretation(&round, &a("z")).unwrap(), a("z"));
    }

    fn t_proj() -> NrcExpr {
        NrcExpr::bigunion(
            "f",
            NrcExpr::var("F"),
            NrcExpr::singleton(NrcExpr::proj(1, NrcExpr::var("f"))),
        )
    }

    fn t_flatten() -> NrcExpr {
        NrcExpr::bigunion(
            "g",
            NrcExpr::var("G"),
            NrcExpr::bigunion(
                "x",
                NrcExpr::proj(2, NrcExpr::var("g")),
                NrcExpr::singleton(NrcExpr::pair(
                    NrcExpr::proj(1, NrcExpr::var("g")),
                    NrcExpr::var("x"),
                )),
            ),
        )
    }

    fn eval_expr(e: &NrcExpr, var: &str, ty: &ObjType, o: &Value) -> Value {
        let mut tys = TypeContext::new();
        tys.insert(var.to_string(), ty.clone());
        let env = Valuation::new(vec!["a".into(), "b".into()]).bind(var, o.clone());
        eval_nrc_typed(e, &tys, &env).unwrap()
    }

    #[test]
    fn projection_transformation_as_interpretation() {
        // [DERIVED] nrc_to_interp(T_Proj) agrees with direct evaluation on
        // every Set(U×U) over {a, b}
        let in_ty = ObjType::set(ObjType::prod(u(), u()));
        let i = nrc_to_interp("F", &in_ty, &t_proj()).unwrap();
        for o in enumerate_values(&in_ty, &["a".into(), "b".into()], 1 << 16).unwrap() {
            assert_eq!(
                eval_interpretation(&i, &o).unwrap(),
                eval_expr(&t_proj(), "F", &in_ty, &o),
                "input {o}"
            );
        }
    }

    #[test]
    fn flatten_transformation_as_interpretation() {
        // [DERIVED] nrc_to_interp(T_Flatten) agrees with direct evaluation
        // on a few nested relations
        let in_ty = ObjType::set(ObjType::prod(u(), ObjType::set(u())));
        let i = nrc_to_interp("G", &in_ty, &t_flatten()).unwrap();
        let ab = set(vec![a("a"), a("b")]);
        let inputs = vec![
            Value::empty_set(),
            set(vec![pv(a("a"), Value::empty_set())]),
            set(vec![pv(a("a"), ab.clone()), pv(a("b"), set(vec![a("b")]))]),
        ];
        for o in inputs {
            assert_eq!(
                eval_interpretation(&i, &o).unwrap(),
                eval_expr(&t_flatten(), "G", &in_ty, &o),
                "input {o}"
            );
        }
    }

    #[test]
    fn interpretation_back_to_nrc_round_trips() {
        // [DERIVED] interp_to_nrc(nrc_to_interp(T_Proj)) agrees with T_Proj
        let in_ty = ObjType::set(ObjType::prod(u(), u()));
        let i = nrc_to_interp("F", &in_ty, &t_proj()).unwrap();
        let back = interp_to_nrc(&i, "F").unwrap();
        let mut tys = TypeContext::new();
        tys.insert("F".to_string(), in_ty.clone());
        assert_eq!(
            typecheck_nrc(&tys, &back).unwrap(),
            ObjType::set(u())
        );
        for o in enumerate_values(&in_ty, &["a".into(), "b".into()], 1 << 16).unwrap() {
            assert_eq!(
                eval_expr(&back, "F", &in_ty, &o),
                eval_expr(&t_proj(), "F", &in_ty, &o),
                "input {o}"
            );
        }
    }

    #[test]
    fn hand_interpretation_back_to_nrc() {
        // [DERIVED] the grouping interpretation compiles to an expression
        // with the same behaviour as direct evaluation
        let g = grouping_interp();
        let back = interp_to_nrc(&g, "R").unwrap();
        let (o, in_ty) = r0();
        assert_eq!(
            eval_expr(&back, "R", &in_ty, &o),
            eval_interpretation(&g, &o).unwrap()
        );
    }
}
