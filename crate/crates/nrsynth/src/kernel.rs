//! Types, terms and Δ0 formulas.
//!
//! The object language is the nested relational type system
//! `T ::= U | Unit | T × T | Set(T)` together with Δ0 formulas: first-order
//! formulas whose quantifiers are all bounded (`∀x∈t`, `∃x∈t`) and whose only
//! primitive atoms are equality and disequality of Ur-elements. Richer
//! predicates (equality at any type, membership, inclusion, implication,
//! negation) are *notations* expanded by [`SugarAtom::expand`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Nested relational types. `Bool` is the fixed abbreviation `Set(Unit)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ObjType {
    U,
    Unit,
    Prod(Box<ObjType>, Box<ObjType>),
    SetOf(Box<ObjType>),
}

impl ObjType {
    pub fn prod(a: ObjType, b: ObjType) -> ObjType {
        ObjType::Prod(Box::new(a), Box::new(b))
    }
    pub fn set(t: ObjType) -> ObjType {
        ObjType::SetOf(Box::new(t))
    }
    pub fn bool_ty() -> ObjType {
        ObjType::set(ObjType::Unit)
    }
    /// Number of constructors; used in size accounting.
    pub fn size(&self) -> usize {
        match self {
            ObjType::U | ObjType::Unit => 1,
            ObjType::Prod(a, b) => 1 + a.size() + b.size(),
            ObjType::SetOf(t) => 1 + t.size(),
        }
    }
}

impl fmt::Display for ObjType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjType::U => write!(f, "U"),
            ObjType::Unit => write!(f, "unit"),
            ObjType::Prod(a, b) => write!(f, "(prod {a} {b})"),
            ObjType::SetOf(t) => write!(f, "(set {t})"),
        }
    }
}

/// First-order terms: variables, the empty tuple, pairing and projections.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    UnitVal,
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }
    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }
    pub fn proj1(t: Term) -> Term {
        Term::Proj1(Box::new(t))
    }
    pub fn proj2(t: Term) -> Term {
        Term::Proj2(Box::new(t))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::UnitVal => {}
            Term::Pair(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Proj1(t) | Term::Proj2(t) => t.collect_vars(out),
        }
    }

    /// Replace every occurrence of variable `x` by `t` (terms have no binders).
    pub fn substitute(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(y) if y == x => t.clone(),
            Term::Var(_) | Term::UnitVal => self.clone(),
            Term::Pair(a, b) => Term::pair(a.substitute(x, t), b.substitute(x, t)),
            Term::Proj1(a) => Term::proj1(a.substitute(x, t)),
            Term::Proj2(a) => Term::proj2(a.substitute(x, t)),
        }
    }

    pub fn contains_proj(&self) -> bool {
        match self {
            Term::Var(_) | Term::UnitVal => false,
            Term::Pair(a, b) => a.contains_proj() || b.contains_proj(),
            Term::Proj1(_) | Term::Proj2(_) => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::UnitVal => 1,
            Term::Pair(a, b) => 1 + a.size() + b.size(),
            Term::Proj1(t) | Term::Proj2(t) => 1 + t.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::UnitVal => write!(f, "()"),
            Term::Pair(a, b) => write!(f, "(pair {a} {b})"),
            Term::Proj1(t) => write!(f, "(p1 {t})"),
            Term::Proj2(t) => write!(f, "(p2 {t})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::EqU(a, b) => write!(f, "{a} = {b}"),
            Formula::NeqU(a, b) => write!(f, "{a} ≠ {b}"),
            Formula::Top => write!(f, "⊤"),
            Formula::Bot => write!(f, "⊥"),
            Formula::And(a, b) => write!(f, "({a} ∧ {b})"),
            Formula::Or(a, b) => write!(f, "({a} ∨ {b})"),
            Formula::ForallIn(x, _, t, body) => write!(f, "∀{x}∈{t}.{body}"),
            Formula::ExistsIn(x, _, t, body) => write!(f, "∃{x}∈{t}.{body}"),
        }
    }
}

/// Core Δ0 formulas. Quantifiers record the binder's type and the bound term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    EqU(Term, Term),
    NeqU(Term, Term),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    ForallIn(String, ObjType, Term, Box<Formula>),
    ExistsIn(String, ObjType, Term, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn forall(x: impl Into<String>, ty: ObjType, bound: Term, body: Formula) -> Formula {
        Formula::ForallIn(x.into(), ty, bound, Box::new(body))
    }
    pub fn exists(x: impl Into<String>, ty: ObjType, bound: Term, body: Formula) -> Formula {
        Formula::ExistsIn(x.into(), ty, bound, Box::new(body))
    }

    /// Negation by dualizing every connective (there is no primitive `¬`).
    pub fn negate(&self) -> Formula {
        match self {
            Formula::EqU(a, b) => Formula::NeqU(a.clone(), b.clone()),
            Formula::NeqU(a, b) => Formula::EqU(a.clone(), b.clone()),
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            Formula::And(a, b) => Formula::or(a.negate(), b.negate()),
            Formula::Or(a, b) => Formula::and(a.negate(), b.negate()),
            Formula::ForallIn(x, ty, t, body) => {
                Formula::exists(x.clone(), ty.clone(), t.clone(), body.negate())
            }
            Formula::ExistsIn(x, ty, t, body) => {
                Formula::forall(x.clone(), ty.clone(), t.clone(), body.negate())
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::EqU(a, b) | Formula::NeqU(a, b) => {
                for v in a.free_vars().union(&b.free_vars()) {
                    if !bound.contains(v) {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForallIn(x, _, t, body) | Formula::ExistsIn(x, _, t, body) => {
                for v in t.free_vars() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
                let fresh_here = bound.insert(x.clone());
                body.collect_free(bound, out);
                if fresh_here {
                    bound.remove(x);
                }
            }
        }
    }

    /// Capture-avoiding substitution of term `t` for variable `x`.
    pub fn substitute(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::EqU(a, b) => Formula::EqU(a.substitute(x, t), b.substitute(x, t)),
            Formula::NeqU(a, b) => Formula::NeqU(a.substitute(x, t), b.substitute(x, t)),
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::And(a, b) => Formula::and(a.substitute(x, t), b.substitute(x, t)),
            Formula::Or(a, b) => Formula::or(a.substitute(x, t), b.substitute(x, t)),
            Formula::ForallIn(y, ty, bnd, body) | Formula::ExistsIn(y, ty, bnd, body) => {
                let is_forall = matches!(self, Formula::ForallIn(..));
                let bnd2 = bnd.substitute(x, t);
                let (y2, body2) = if y == x {
                    // binder shadows x: body untouched
                    (y.clone(), (**body).clone())
                } else if t.free_vars().contains(y) && body.free_vars().contains(x) {
                    // would capture: rename the binder first
                    let mut avoid = body.free_vars();
                    avoid.extend(t.free_vars());
                    avoid.insert(x.to_string());
                    let y2 = fresh_name(y, &avoid);
                    let renamed = body.substitute(y, &Term::var(y2.clone()));
                    (y2, renamed.substitute(x, t))
                } else {
                    (y.clone(), body.substitute(x, t))
                };
                if is_forall {
                    Formula::forall(y2, ty.clone(), bnd2, body2)
                } else {
                    Formula::exists(y2, ty.clone(), bnd2, body2)
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::EqU(a, b) | Formula::NeqU(a, b) => 1 + a.size() + b.size(),
            Formula::Top | Formula::Bot => 1,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::ForallIn(_, _, t, body) | Formula::ExistsIn(_, _, t, body) => {
                1 + t.size() + body.size()
            }
        }
    }

    /// Rename all bound variables into a canonical `_b0, _b1, ...` scheme so
    /// that α-equivalent formulas become structurally equal.
    pub fn alpha_normalize(&self) -> Formula {
        fn go(f: &Formula, counter: &mut usize) -> Formula {
            match f {
                Formula::EqU(..) | Formula::NeqU(..) | Formula::Top | Formula::Bot => f.clone(),
                Formula::And(a, b) => Formula::and(go(a, counter), go(b, counter)),
                Formula::Or(a, b) => Formula::or(go(a, counter), go(b, counter)),
                Formula::ForallIn(x, ty, t, body) | Formula::ExistsIn(x, ty, t, body) => {
                    let canon = format!("_b{counter}");
                    *counter += 1;
                    let body2 = go(&body.substitute(x, &Term::var(canon.clone())), counter);
                    if matches!(f, Formula::ForallIn(..)) {
                        Formula::forall(canon, ty.clone(), t.clone(), body2)
                    } else {
                        Formula::exists(canon, ty.clone(), t.clone(), body2)
                    }
                }
            }
        }
        go(self, &mut 0)
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self.alpha_normalize() == other.alpha_normalize()
    }
}

/// Finite map from variable names to types.
pub type TypeContext = BTreeMap<String, ObjType>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("projection applied to non-product term {0}")]
    ProjOfNonProduct(String),
    #[error("sort mismatch at {path}: {msg}")]
    SortMismatch { path: String, msg: String },
}

/// Compute the unique type of `t` under `ctx`.
pub fn typecheck_term(ctx: &TypeContext, t: &Term) -> Result<ObjType, TypeError> {
    match t {
        Term::Var(x) => ctx
            .get(x)
            .cloned()
            .ok_or_else(|| TypeError::UnknownVariable(x.clone())),
        Term::UnitVal => Ok(ObjType::Unit),
        Term::Pair(a, b) => Ok(ObjType::prod(
            typecheck_term(ctx, a)?,
            typecheck_term(ctx, b)?,
        )),
        Term::Proj1(a) => match typecheck_term(ctx, a)? {
            ObjType::Prod(l, _) => Ok(*l),
            _ => Err(TypeError::ProjOfNonProduct(a.to_string())),
        },
        Term::Proj2(a) => match typecheck_term(ctx, a)? {
            ObjType::Prod(_, r) => Ok(*r),
            _ => Err(TypeError::ProjOfNonProduct(a.to_string())),
        },
    }
}

/// Check that every atom and bounded quantifier in `f` is sort-correct.
pub fn typecheck_formula(ctx: &TypeContext, f: &Formula) -> Result<(), TypeError> {
    fn go(ctx: &TypeContext, f: &Formula, path: &str) -> Result<(), TypeError> {
        let mismatch = |msg: String| TypeError::SortMismatch {
            path: path.to_string(),
            msg,
        };
        match f {
            Formula::EqU(a, b) | Formula::NeqU(a, b) => {
                let ta = typecheck_term(ctx, a)?;
                let tb = typecheck_term(ctx, b)?;
                if ta != ObjType::U || tb != ObjType::U {
                    return Err(mismatch(format!(
                        "Ur-equality between terms of type {ta} and {tb}"
                    )));
                }
                Ok(())
            }
            Formula::Top | Formula::Bot => Ok(()),
            Formula::And(a, b) | Formula::Or(a, b) => {
                go(ctx, a, &format!("{path}.l"))?;
                go(ctx, b, &format!("{path}.r"))
            }
            Formula::ForallIn(x, ty, t, body) | Formula::ExistsIn(x, ty, t, body) => {
                let tt = typecheck_term(ctx, t)?;
                if tt != ObjType::set(ty.clone()) {
                    return Err(mismatch(format!(
                        "quantifier binds {x}:{ty} but bound term has type {tt}"
                    )));
                }
                let mut ctx2 = ctx.clone();
                ctx2.insert(x.clone(), ty.clone());
                go(&ctx2, body, &format!("{path}.body"))
            }
        }
    }
    go(ctx, f, "")
}

/// Derived predicates, expanded type-directedly into core Δ0 formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SugarAtom {
    Eq(ObjType, Term, Term),
    Sub(ObjType, Term, Term),
    Mem(ObjType, Term, Term),
    Implies(Formula, Formula),
    Not(Formula),
}

impl SugarAtom {
    /// Expand into a core formula. `Eq`/`Sub`/`Mem` carry the type at which
    /// the predicate is taken: for `Sub(T,..)` and `Mem(T,..)` this is the
    /// *element* type `T` (the right term has type `Set(T)`).
    pub fn expand(&self) -> Formula {
        match self {
            SugarAtom::Eq(ty, t, u) => expand_eq(ty, t, u),
            SugarAtom::Sub(ty, t, u) => expand_sub(ty, t, u),
            SugarAtom::Mem(ty, t, u) => expand_mem(ty, t, u),
            SugarAtom::Implies(a, b) => Formula::or(a.negate(), b.clone()),
            SugarAtom::Not(a) => a.negate(),
        }
    }
}

/// `t =_T u` as a core formula.
pub fn expand_eq(ty: &ObjType, t: &Term, u: &Term) -> Formula {
    match ty {
        ObjType::U => Formula::EqU(t.clone(), u.clone()),
        ObjType::Unit => Formula::Top,
        ObjType::Prod(a, b) => Formula::and(
            expand_eq(a, &Term::proj1(t.clone()), &Term::proj1(u.clone())),
            expand_eq(b, &Term::proj2(t.clone()), &Term::proj2(u.clone())),
        ),
        ObjType::SetOf(elem) => Formula::and(expand_sub(elem, t, u), expand_sub(elem, u, t)),
    }
}

/// `t ⊆_T u` (both of type `Set(T)`) as a core formula.
pub fn expand_sub(elem: &ObjType, t: &Term, u: &Term) -> Formula {
    let mut avoid = t.free_vars();
    avoid.extend(u.free_vars());
    let z = fresh_name("z", &avoid);
    Formula::forall(
        z.clone(),
        elem.clone(),
        t.clone(),
        expand_mem(elem, &Term::var(z), u),
    )
}

/// `t ∈_T u` (`t : T`, `u : Set(T)`) as a core formula: `∃z'∈u  t =_T z'`.
pub fn expand_mem(elem: &ObjType, t: &Term, u: &Term) -> Formula {
    let mut avoid = t.free_vars();
    avoid.extend(u.free_vars());
    let z = fresh_name("z", &avoid);
    Formula::exists(
        z.clone(),
        elem.clone(),
        u.clone(),
        expand_eq(elem, t, &Term::var(z)),
    )
}

/// Deterministic fresh-name scheme: the base name itself if unused, otherwise
/// the base followed by the smallest unused numeric suffix.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    for i in 1.. {
        let cand = format!("{base}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> ObjType {
        ObjType::U
    }

    #[test]
    fn typing_projections() {
        let mut ctx = TypeContext::new();
        ctx.insert("x".into(), ObjType::prod(u(), u()));
        assert_eq!(
            typecheck_term(&ctx, &Term::proj1(Term::var("x"))).unwrap(),
            u()
        );
        assert_eq!(typecheck_term(&ctx, &Term::UnitVal).unwrap(), ObjType::Unit);
    }

    #[test]
    fn typing_pair_of_projections() {
        // g : U × Set(U)  ⊢  ⟨π2 g, π1 g⟩ : Set(U) × U
        let mut ctx = TypeContext::new();
        ctx.insert("g".into(), ObjType::prod(u(), ObjType::set(u())));
        let t = Term::pair(Term::proj2(Term::var("g")), Term::proj1(Term::var("g")));
        assert_eq!(
            typecheck_term(&ctx, &t).unwrap(),
            ObjType::prod(ObjType::set(u()), u())
        );
    }

    #[test]
    fn formula_typing() {
        // ∀x∈c  π1(x) ∈ π2(x)  with  c : Set(U × Set(U))
        let mut ctx = TypeContext::new();
        ctx.insert("c".into(), ObjType::set(ObjType::prod(u(), ObjType::set(u()))));
        let body = expand_mem(&u(), &Term::proj1(Term::var("x")), &Term::proj2(Term::var("x")));
        let f = Formula::forall("x", ObjType::prod(u(), ObjType::set(u())), Term::var("c"), body);
        typecheck_formula(&ctx, &f).unwrap();

        // Ur-equality on unit values is a sort error
        let bad = Formula::EqU(Term::UnitVal, Term::UnitVal);
        assert!(typecheck_formula(&ctx, &bad).is_err());
    }

    #[test]
    fn sugar_unit_eq_is_top() {
        assert_eq!(
            SugarAtom::Eq(ObjType::Unit, Term::var("t"), Term::var("u")).expand(),
            Formula::Top
        );
    }

    #[test]
    fn sugar_mem_shape() {
        let f = SugarAtom::Mem(u(), Term::var("t"), Term::var("u")).expand();
        match f {
            Formula::ExistsIn(z, ty, bound, body) => {
                assert_eq!(ty, u());
                assert_eq!(bound, Term::var("u"));
                assert_eq!(*body, Formula::EqU(Term::var("t"), Term::var(z)));
            }
            other => panic!("unexpected expansion {other:?}"),
        }
    }

    #[test]
    fn negation_dualizes() {
        let f = Formula::or(Formula::Top, Formula::Bot);
        assert_eq!(f.negate(), Formula::and(Formula::Bot, Formula::Top));
    }

    #[test]
    fn substitution_shadowing_and_capture() {
        // (∃x∈y ⊤)[z/x] leaves the body alone
        let f = Formula::exists("x", u(), Term::var("y"), Formula::Top);
        assert_eq!(f.substitute("x", &Term::var("z")), f);

        // (∃x∈y x=u)[x/u]: binder renamed, result ∃x1∈y x1=x
        let g = Formula::exists(
            "x",
            u(),
            Term::var("y"),
            Formula::EqU(Term::var("x"), Term::var("u")),
        );
        let got = g.substitute("u", &Term::var("x"));
        let want = Formula::exists(
            "x1",
            u(),
            Term::var("y"),
            Formula::EqU(Term::var("x1"), Term::var("x")),
        );
        assert!(got.alpha_eq(&want), "got {got:?}");
        // direct replacement under no capture
        let h = expand_mem(&u(), &Term::var("x"), &Term::var("y"));
        let h2 = h.substitute("x", &Term::pair(Term::var("a"), Term::var("b")));
        assert!(h2
            .free_vars()
            .is_superset(&["a".to_string(), "b".to_string()].into_iter().collect()));
    }

    #[test]
    fn free_var_bookkeeping() {
        let f = Formula::exists(
            "x",
            u(),
            Term::var("y"),
            Formula::EqU(Term::var("x"), Term::var("z")),
        );
        let fv = f.free_vars();
        assert_eq!(
            fv,
            ["y".to_string(), "z".to_string()].into_iter().collect()
        );
    }

    #[test]
    fn fresh_names_are_deterministic() {
        let avoid: BTreeSet<String> = ["z".to_string(), "z1".to_string()].into_iter().collect();
        assert_eq!(fresh_name("z", &avoid), "z2");
        assert_eq!(fresh_name("w", &avoid), "w");
    }
}
