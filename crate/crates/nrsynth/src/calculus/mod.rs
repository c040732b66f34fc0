//! Sequent calculus for Δ0 entailments over nested relations.
//!
//! Sequents have the shape `Θ; Γ ⊢ ρ` where `Θ` is a list of membership
//! atoms `t ∈_T u`, `Γ` is a list of Δ0 formulas, and the right-hand side
//! `ρ` is a membership, equality, or inclusion goal.  Proofs are explicit
//! trees: every node names its rule together with enough instantiation data
//! that [`check_proof`] can recompute the premises locally, without search.
//!
//! The rule set splits into *core* rules (the primitive calculus) and
//! *admissible* rules (weakening, axiom, left membership/inclusion,
//! implication-left, reflexivity) which [`elaborate_admissible`] compiles
//! away into core-only proofs.
//!
//! Sequent comparison is up to α-renaming of bound variables inside
//! formulas and β-reduction of projection redexes `πᵢ⟨t₁,t₂⟩ → tᵢ` in
//! terms; both are deterministic normal forms, so checking stays local and
//! linear in the proof size.

mod elaborate;

pub use elaborate::elaborate_admissible;

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::kernel::{
    expand_eq, expand_mem, expand_sub, fresh_name, typecheck_formula, typecheck_term, Formula,
    ObjType, Term, TypeContext, TypeError,
};
use crate::values::{eval_delta0, sample_value, Valuation};

/// A membership atom `member ∈_T set` on the left of a sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThetaAtom {
    pub elem_ty: ObjType,
    pub member: Term,
    pub set: Term,
}

impl ThetaAtom {
    pub fn new(elem_ty: ObjType, member: Term, set: Term) -> ThetaAtom {
        ThetaAtom {
            elem_ty,
            member,
            set,
        }
    }

    /// The atom as a core Δ0 formula.
    pub fn expand(&self) -> Formula {
        expand_mem(&self.elem_ty, &self.member, &self.set)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = self.member.free_vars();
        out.extend(self.set.free_vars());
        out
    }

    pub fn substitute(&self, x: &str, t: &Term) -> ThetaAtom {
        ThetaAtom {
            elem_ty: self.elem_ty.clone(),
            member: self.member.substitute(x, t),
            set: self.set.substitute(x, t),
        }
    }
}

impl fmt::Display for ThetaAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ∈ {}", self.member, self.set)
    }
}

/// Right-hand side of a sequent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rhs {
    /// `t ∈_T u`: the element type is recorded, `u : Set(T)`.
    Mem(ObjType, Term, Term),
    /// `t =_T u` at the recorded type.
    Eq(ObjType, Term, Term),
    /// `t ⊆ u`, both sides of type `Set(T)` with `T` recorded.
    Sub(ObjType, Term, Term),
}

impl Rhs {
    /// The goal as a core Δ0 formula (used by the axiom rule and by the
    /// semantic spot-checker).
    pub fn expand(&self) -> Formula {
        match self {
            Rhs::Mem(ty, t, u) => expand_mem(ty, t, u),
            Rhs::Eq(ty, t, u) => expand_eq(ty, t, u),
            Rhs::Sub(ty, t, u) => expand_sub(ty, t, u),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let (Rhs::Mem(_, t, u) | Rhs::Eq(_, t, u) | Rhs::Sub(_, t, u)) = self;
        let mut out = t.free_vars();
        out.extend(u.free_vars());
        out
    }

    pub fn substitute(&self, x: &str, t: &Term) -> Rhs {
        match self {
            Rhs::Mem(ty, a, b) => Rhs::Mem(ty.clone(), a.substitute(x, t), b.substitute(x, t)),
            Rhs::Eq(ty, a, b) => Rhs::Eq(ty.clone(), a.substitute(x, t), b.substitute(x, t)),
            Rhs::Sub(ty, a, b) => Rhs::Sub(ty.clone(), a.substitute(x, t), b.substitute(x, t)),
        }
    }

    /// Size of the goal, measured on its Δ0 expansion so that equality
    /// goals at nested types are weighted by the work they stand for.
    pub fn size(&self) -> usize {
        self.expand().size()
    }
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Mem(_, t, u) => write!(f, "{t} ∈ {u}"),
            Rhs::Eq(_, t, u) => write!(f, "{t} = {u}"),
            Rhs::Sub(_, t, u) => write!(f, "{t} ⊆ {u}"),
        }
    }
}

/// A sequent `Θ; Γ ⊢ ρ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub theta: Vec<ThetaAtom>,
    pub gamma: Vec<Formula>,
    pub rhs: Rhs,
}

impl Sequent {
    pub fn new(theta: Vec<ThetaAtom>, gamma: Vec<Formula>, rhs: Rhs) -> Sequent {
        Sequent { theta, gamma, rhs }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in &self.theta {
            out.extend(a.free_vars());
        }
        for g in &self.gamma {
            out.extend(g.free_vars());
        }
        out.extend(self.rhs.free_vars());
        out
    }

    pub fn substitute(&self, x: &str, t: &Term) -> Sequent {
        Sequent {
            theta: self.theta.iter().map(|a| a.substitute(x, t)).collect(),
            gamma: self.gamma.iter().map(|g| g.substitute(x, t)).collect(),
            rhs: self.rhs.substitute(x, t),
        }
    }

    pub fn size(&self) -> usize {
        self.theta
            .iter()
            .map(|a| 1 + a.member.size() + a.set.size())
            .sum::<usize>()
            + self.gamma.iter().map(Formula::size).sum::<usize>()
            + self.rhs.size()
    }

    /// Canonical form for comparison: β-normal terms, α-normal formulas.
    pub fn canon(&self) -> Sequent {
        let norm_atom = |a: &ThetaAtom| ThetaAtom {
            elem_ty: a.elem_ty.clone(),
            member: beta_norm_term(&a.member),
            set: beta_norm_term(&a.set),
        };
        let rhs = match &self.rhs {
            Rhs::Mem(ty, t, u) => {
                Rhs::Mem(ty.clone(), beta_norm_term(t), beta_norm_term(u))
            }
            Rhs::Eq(ty, t, u) => Rhs::Eq(ty.clone(), beta_norm_term(t), beta_norm_term(u)),
            Rhs::Sub(ty, t, u) => Rhs::Sub(ty.clone(), beta_norm_term(t), beta_norm_term(u)),
        };
        Sequent {
            theta: self.theta.iter().map(norm_atom).collect(),
            gamma: self
                .gamma
                .iter()
                .map(|g| beta_norm_formula(g).alpha_normalize())
                .collect(),
            rhs,
        }
    }

    pub fn matches(&self, other: &Sequent) -> bool {
        self.canon() == other.canon()
    }

    pub fn typecheck(&self, ctx: &TypeContext) -> Result<(), CheckError> {
        for a in &self.theta {
            let mty = typecheck_term(ctx, &a.member)?;
            let sty = typecheck_term(ctx, &a.set)?;
            if mty != a.elem_ty || sty != ObjType::set(a.elem_ty.clone()) {
                return Err(CheckError::IllTyped {
                    detail: format!("membership atom {a} is not at element type {}", a.elem_ty),
                });
            }
        }
        for g in &self.gamma {
            typecheck_formula(ctx, g)?;
        }
        let (Rhs::Mem(ty, t, u) | Rhs::Eq(ty, t, u) | Rhs::Sub(ty, t, u)) = &self.rhs;
        let tty = typecheck_term(ctx, t)?;
        let uty = typecheck_term(ctx, u)?;
        let ok = match &self.rhs {
            Rhs::Mem(..) => tty == *ty && uty == ObjType::set(ty.clone()),
            Rhs::Eq(..) => tty == *ty && uty == *ty,
            Rhs::Sub(..) => {
                tty == ObjType::set(ty.clone()) && uty == ObjType::set(ty.clone())
            }
        };
        if !ok {
            return Err(CheckError::IllTyped {
                detail: format!("right-hand side {} is not at type {ty}", self.rhs),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let theta: Vec<String> = self.theta.iter().map(|a| a.to_string()).collect();
        let gamma: Vec<String> = self.gamma.iter().map(|g| g.to_string()).collect();
        write!(
            f,
            "{}; {} ⊢ {}",
            theta.join(", "),
            gamma.join(", "),
            self.rhs
        )
    }
}

/// Which side of a `t =_U u` hypothesis holds the substituted variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Proof rules.  `gamma_idx`/`theta_idx` point into the conclusion's lists;
/// `fresh` names are eigenvariables that must not occur in the conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    // -- core rules --
    /// Duplicate `Γ[i]` (the copy lands at the end of `Γ` in the premise).
    Contraction { gamma_idx: usize },
    /// Axiom: conclude `t ∈_U u` directly from the Θ-atom at `theta_idx`.
    MemUrR { theta_idx: usize },
    /// Split `t =_{Set(T)} u` into the two inclusions.
    EqSetR,
    /// Split `t =_{T×U} u` componentwise.
    EqProdR,
    /// `t =_Unit u` holds outright.
    EqUnitR,
    /// Conclude `t =_U u` from `u ∈ z` under the extra hypothesis `t ∈ z`,
    /// for an eigenvariable `z : Set(U)`.
    EqUrR { fresh: String },
    /// Conclude `t ⊆ u` from `z ∈ u` under the extra hypothesis `z ∈ t`.
    SubsetR { fresh: String },
    /// Conclude `u ∈_T v` from `t =_T u`, where `t ∈_T v` is the Θ-atom at
    /// `theta_idx`.
    MemSetR { theta_idx: usize },
    /// Discharge the goal from `⊥` at `gamma_idx`.
    BotL { gamma_idx: usize },
    /// Replace `φ ∧ ψ` at `gamma_idx` by the two conjuncts in place.
    AndL { gamma_idx: usize },
    /// Case split on `φ ∨ ψ` at `gamma_idx`.
    OrL { gamma_idx: usize },
    /// Instantiate `∀y ∈ b. φ` at `gamma_idx` with the member term of the
    /// Θ-atom at `theta_idx` (whose set term must be `b`).
    ForallL { gamma_idx: usize, theta_idx: usize },
    /// Open `∃y ∈ b. φ` at `gamma_idx` with an eigenvariable.
    ExistsL { gamma_idx: usize, fresh: String },
    /// Rewrite with `x =_U t` at `gamma_idx`; `var_side` says which side of
    /// the equation is the variable being substituted away.
    EqSubst { gamma_idx: usize, var_side: Side },
    /// Discharge the goal from a trivially false `t ≠ t` at `gamma_idx`.
    NeqL { gamma_idx: usize },
    /// Projection β-step: the conclusion is `template[πᵢ⟨fst,snd⟩/var]`, the
    /// premise `template[tᵢ/var]`.
    TimesBeta {
        idx: u8,
        var: String,
        fst: Term,
        snd: Term,
        template: Box<Sequent>,
    },
    /// Surjective-pairing step: replace the product variable `var` by
    /// `⟨fresh_fst, fresh_snd⟩` throughout.
    TimesEta {
        var: String,
        fresh_fst: String,
        fresh_snd: String,
    },

    // -- admissible rules --
    /// Drop `Γ[i]` going up.
    Weaken { gamma_idx: usize },
    /// `Θ; ψ ⊢ ρ` where `ψ` is exactly the expansion of `ρ`.
    Axiom,
    /// Move an expanded membership formula from `Γ` into `Θ`.
    MemL {
        gamma_idx: usize,
        elem_ty: ObjType,
        member: Term,
        set: Term,
    },
    /// From `t ∈ u` in `Θ` and the expansion of `u ⊆ superset` in `Γ`,
    /// add `t ∈ superset` to `Θ`.
    SubL {
        theta_idx: usize,
        gamma_idx: usize,
        superset: Term,
    },
    /// From `φ` at `hyp_idx` and `¬φ ∨ θ` at `gamma_idx`, pass to `θ`.
    ImpliesL { gamma_idx: usize, hyp_idx: usize },
    /// `⊢ t = t` holds outright.
    EqReflR,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Contraction { .. } => "contraction",
            Rule::MemUrR { .. } => "mem-ur-r",
            Rule::EqSetR => "eq-set-r",
            Rule::EqProdR => "eq-prod-r",
            Rule::EqUnitR => "eq-unit-r",
            Rule::EqUrR { .. } => "eq-ur-r",
            Rule::SubsetR { .. } => "subset-r",
            Rule::MemSetR { .. } => "mem-set-r",
            Rule::BotL { .. } => "bot-l",
            Rule::AndL { .. } => "and-l",
            Rule::OrL { .. } => "or-l",
            Rule::ForallL { .. } => "forall-l",
            Rule::ExistsL { .. } => "exists-l",
            Rule::EqSubst { .. } => "eq-subst",
            Rule::NeqL { .. } => "neq-l",
            Rule::TimesBeta { .. } => "times-beta",
            Rule::TimesEta { .. } => "times-eta",
            Rule::Weaken { .. } => "weaken",
            Rule::Axiom => "axiom",
            Rule::MemL { .. } => "mem-l",
            Rule::SubL { .. } => "sub-l",
            Rule::ImpliesL { .. } => "implies-l",
            Rule::EqReflR => "eq-refl-r",
        }
    }

    pub fn is_core(&self) -> bool {
        !matches!(
            self,
            Rule::Weaken { .. }
                | Rule::Axiom
                | Rule::MemL { .. }
                | Rule::SubL { .. }
                | Rule::ImpliesL { .. }
                | Rule::EqReflR
        )
    }
}

/// An explicit proof tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<ProofNode>,
}

impl ProofNode {
    pub fn new(rule: Rule, conclusion: Sequent, premises: Vec<ProofNode>) -> ProofNode {
        ProofNode {
            rule,
            conclusion,
            premises,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::node_count).sum::<usize>()
    }

    pub fn max_sequent_size(&self) -> usize {
        self.premises
            .iter()
            .map(ProofNode::max_sequent_size)
            .max()
            .unwrap_or(0)
            .max(self.conclusion.size())
    }

    pub fn is_core_only(&self) -> bool {
        self.rule.is_core() && self.premises.iter().all(ProofNode::is_core_only)
    }

    /// All variable names occurring anywhere in the tree (free variables of
    /// every sequent; eigenvariables are free in the premises they scope
    /// over, so they are included).
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = self.conclusion.free_vars();
        if let Rule::EqUrR { fresh }
        | Rule::SubsetR { fresh }
        | Rule::ExistsL { fresh, .. } = &self.rule
        {
            out.insert(fresh.clone());
        }
        if let Rule::TimesEta {
            fresh_fst,
            fresh_snd,
            ..
        } = &self.rule
        {
            out.insert(fresh_fst.clone());
            out.insert(fresh_snd.clone());
        }
        for p in &self.premises {
            out.extend(p.all_vars());
        }
        out
    }
}

/// A proof that passed [`check_proof`], with summary statistics.
#[derive(Debug, Clone)]
pub struct CheckedProof {
    pub root: ProofNode,
    pub ctx: TypeContext,
    pub core_only: bool,
    pub nodes: usize,
    pub max_sequent_size: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("type error: {0}")]
    Type(#[from] TypeError),
    #[error("ill-typed sequent: {detail}")]
    IllTyped { detail: String },
    #[error("rule {rule}: {detail}")]
    RuleMismatch { rule: &'static str, detail: String },
    #[error("rule {rule}: index {idx} out of range for {what}")]
    BadIndex {
        rule: &'static str,
        what: &'static str,
        idx: usize,
    },
    #[error("rule {rule}: eigenvariable {var} already occurs in the conclusion")]
    NotFresh { rule: &'static str, var: String },
    #[error("rule {rule} expects {expected} premise(s), found {got}")]
    PremiseCount {
        rule: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("rule {rule}, premise {idx}: expected `{expected}`, found `{got}`")]
    PremiseMismatch {
        rule: &'static str,
        idx: usize,
        expected: String,
        got: String,
    },
    #[error("admissible rule {rule} cannot be eliminated here: {detail}")]
    Elaboration { rule: &'static str, detail: String },
}

/// β-reduce all projection redexes `πᵢ⟨t₁,t₂⟩` in a term.
pub fn beta_norm_term(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::UnitVal => t.clone(),
        Term::Pair(a, b) => Term::pair(beta_norm_term(a), beta_norm_term(b)),
        Term::Proj1(inner) => match beta_norm_term(inner) {
            Term::Pair(a, _) => *a,
            n => Term::proj1(n),
        },
        Term::Proj2(inner) => match beta_norm_term(inner) {
            Term::Pair(_, b) => *b,
            n => Term::proj2(n),
        },
    }
}

/// β-normalize every term inside a formula.
pub fn beta_norm_formula(f: &Formula) -> Formula {
    match f {
        Formula::EqU(a, b) => Formula::EqU(beta_norm_term(a), beta_norm_term(b)),
        Formula::NeqU(a, b) => Formula::NeqU(beta_norm_term(a), beta_norm_term(b)),
        Formula::Top | Formula::Bot => f.clone(),
        Formula::And(a, b) => Formula::and(beta_norm_formula(a), beta_norm_formula(b)),
        Formula::Or(a, b) => Formula::or(beta_norm_formula(a), beta_norm_formula(b)),
        Formula::ForallIn(x, ty, t, body) => Formula::forall(
            x.clone(),
            ty.clone(),
            beta_norm_term(t),
            beta_norm_formula(body),
        ),
        Formula::ExistsIn(x, ty, t, body) => Formula::exists(
            x.clone(),
            ty.clone(),
            beta_norm_term(t),
            beta_norm_formula(body),
        ),
    }
}

fn term_beq(a: &Term, b: &Term) -> bool {
    beta_norm_term(a) == beta_norm_term(b)
}

fn formula_abeq(a: &Formula, b: &Formula) -> bool {
    beta_norm_formula(a).alpha_eq(&beta_norm_formula(b))
}

fn gamma_at<'a>(s: &'a Sequent, i: usize, rule: &'static str) -> Result<&'a Formula, CheckError> {
    s.gamma.get(i).ok_or(CheckError::BadIndex {
        rule,
        what: "gamma",
        idx: i,
    })
}

fn theta_at<'a>(s: &'a Sequent, i: usize, rule: &'static str) -> Result<&'a ThetaAtom, CheckError> {
    s.theta.get(i).ok_or(CheckError::BadIndex {
        rule,
        what: "theta",
        idx: i,
    })
}

fn require_mem_rhs<'a>(
    s: &'a Sequent,
    rule: &'static str,
) -> Result<(&'a ObjType, &'a Term, &'a Term), CheckError> {
    match &s.rhs {
        Rhs::Mem(ty, t, u) => Ok((ty, t, u)),
        other => Err(CheckError::RuleMismatch {
            rule,
            detail: format!("requires a membership goal, found `{other}`"),
        }),
    }
}

fn check_fresh(
    s: &Sequent,
    ctx: &TypeContext,
    var: &str,
    rule: &'static str,
) -> Result<(), CheckError> {
    if s.free_vars().contains(var) || ctx.contains_key(var) {
        return Err(CheckError::NotFresh {
            rule,
            var: var.to_string(),
        });
    }
    Ok(())
}

/// Recompute the premises a rule application must have, together with the
/// type context each premise is checked under.
pub fn rule_premises(
    ctx: &TypeContext,
    concl: &Sequent,
    rule: &Rule,
) -> Result<Vec<(Sequent, TypeContext)>, CheckError> {
    let name = rule.name();
    let same_ctx = |seqs: Vec<Sequent>| {
        seqs.into_iter()
            .map(|s| (s, ctx.clone()))
            .collect::<Vec<_>>()
    };
    match rule {
        Rule::Contraction { gamma_idx } => {
            require_mem_rhs(concl, name)?;
            let g = gamma_at(concl, *gamma_idx, name)?.clone();
            let mut s = concl.clone();
            s.gamma.push(g);
            Ok(same_ctx(vec![s]))
        }
        Rule::MemUrR { theta_idx } => {
            let (ty, t, u) = require_mem_rhs(concl, name)?;
            let atom = theta_at(concl, *theta_idx, name)?;
            if atom.elem_ty != ObjType::U || *ty != ObjType::U {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "only applies at the Ur-element type".into(),
                });
            }
            if !term_beq(&atom.member, t) || !term_beq(&atom.set, u) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!("goal `{}` does not match hypothesis `{atom}`", concl.rhs),
                });
            }
            Ok(vec![])
        }
        Rule::EqSetR => {
            let Rhs::Eq(ObjType::SetOf(elem), t, u) = &concl.rhs else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "requires an equality goal at a set type".into(),
                });
            };
            let fwd = Sequent::new(
                concl.theta.clone(),
                concl.gamma.clone(),
                Rhs::Sub((**elem).clone(), t.clone(), u.clone()),
            );
            let bwd = Sequent::new(
                concl.theta.clone(),
                concl.gamma.clone(),
                Rhs::Sub((**elem).clone(), u.clone(), t.clone()),
            );
            Ok(same_ctx(vec![fwd, bwd]))
        }
        Rule::EqProdR => {
            let Rhs::Eq(ObjType::Prod(a, b), t, u) = &concl.rhs else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "requires an equality goal at a product type".into(),
                });
            };
            let fst = Sequent::new(
                concl.theta.clone(),
                concl.gamma.clone(),
                Rhs::Eq(
                    (**a).clone(),
                    Term::proj1(t.clone()),
                    Term::proj1(u.clone()),
                ),
            );
            let snd = Sequent::new(
                concl.theta.clone(),
                concl.gamma.clone(),
                Rhs::Eq(
                    (**b).clone(),
                    Term::proj2(t.clone()),
                    Term::proj2(u.clone()),
                ),
            );
            Ok(same_ctx(vec![fst, snd]))
        }
        Rule::EqUnitR => {
            if !matches!(&concl.rhs, Rhs::Eq(ObjType::Unit, _, _)) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "requires an equality goal at the unit type".into(),
                });
            }
            Ok(vec![])
        }
        Rule::EqUrR { fresh } => {
            let Rhs::Eq(ObjType::U, t, u) = &concl.rhs else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "requires an equality goal at the Ur-element type".into(),
                });
            };
            check_fresh(concl, ctx, fresh, name)?;
            let mut theta = concl.theta.clone();
            theta.push(ThetaAtom::new(ObjType::U, t.clone(), Term::var(fresh)));
            let prem = Sequent::new(
                theta,
                concl.gamma.clone(),
                Rhs::Mem(ObjType::U, u.clone(), Term::var(fresh)),
            );
            let mut ctx2 = ctx.clone();
            ctx2.insert(fresh.clone(), ObjType::set(ObjType::U));
            Ok(vec![(prem, ctx2)])
        }
        Rule::SubsetR { fresh } => {
            let Rhs::Sub(elem, t, u) = &concl.rhs else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "requires an inclusion goal".into(),
                });
            };
            check_fresh(concl, ctx, fresh, name)?;
            let mut theta = concl.theta.clone();
            theta.push(ThetaAtom::new(elem.clone(), Term::var(fresh), t.clone()));
            let prem = Sequent::new(
                theta,
                concl.gamma.clone(),
                Rhs::Mem(elem.clone(), Term::var(fresh), u.clone()),
            );
            let mut ctx2 = ctx.clone();
            ctx2.insert(fresh.clone(), elem.clone());
            Ok(vec![(prem, ctx2)])
        }
        Rule::MemSetR { theta_idx } => {
            let (ty, u, v) = require_mem_rhs(concl, name)?;
            let atom = theta_at(concl, *theta_idx, name)?;
            if atom.elem_ty != *ty || !term_beq(&atom.set, v) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "hypothesis `{atom}` does not bound the goal's set `{v}` at type {ty}"
                    ),
                });
            }
            let prem = Sequent::new(
                concl.theta.clone(),
                concl.gamma.clone(),
                Rhs::Eq(ty.clone(), atom.member.clone(), u.clone()),
            );
            Ok(same_ctx(vec![prem]))
        }
        Rule::BotL { gamma_idx } => {
            require_mem_rhs(concl, name)?;
            if !matches!(gamma_at(concl, *gamma_idx, name)?, Formula::Bot) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not ⊥".into(),
                });
            }
            Ok(vec![])
        }
        Rule::AndL { gamma_idx } => {
            require_mem_rhs(concl, name)?;
            let Formula::And(a, b) = gamma_at(concl, *gamma_idx, name)? else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not a conjunction".into(),
                });
            };
            let mut s = concl.clone();
            s.gamma[*gamma_idx] = (**a).clone();
            s.gamma.insert(gamma_idx + 1, (**b).clone());
            Ok(same_ctx(vec![s]))
        }
        Rule::OrL { gamma_idx } => {
            require_mem_rhs(concl, name)?;
            let Formula::Or(a, b) = gamma_at(concl, *gamma_idx, name)? else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not a disjunction".into(),
                });
            };
            let mut left = concl.clone();
            left.gamma[*gamma_idx] = (**a).clone();
            let mut right = concl.clone();
            right.gamma[*gamma_idx] = (**b).clone();
            Ok(same_ctx(vec![left, right]))
        }
        Rule::ForallL {
            gamma_idx,
            theta_idx,
        } => {
            require_mem_rhs(concl, name)?;
            let Formula::ForallIn(y, ty, bound, body) = gamma_at(concl, *gamma_idx, name)?
            else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not a bounded ∀".into(),
                });
            };
            let atom = theta_at(concl, *theta_idx, name)?;
            if atom.elem_ty != *ty || !term_beq(&atom.set, bound) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "hypothesis `{atom}` does not witness the quantifier bound `{bound}`"
                    ),
                });
            }
            let mut s = concl.clone();
            s.gamma[*gamma_idx] = body.substitute(y, &atom.member);
            Ok(same_ctx(vec![s]))
        }
        Rule::ExistsL { gamma_idx, fresh } => {
            require_mem_rhs(concl, name)?;
            let Formula::ExistsIn(y, ty, bound, body) = gamma_at(concl, *gamma_idx, name)?
            else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not a bounded ∃".into(),
                });
            };
            check_fresh(concl, ctx, fresh, name)?;
            let mut s = concl.clone();
            s.theta
                .push(ThetaAtom::new(ty.clone(), Term::var(fresh), bound.clone()));
            s.gamma[*gamma_idx] = body.substitute(y, &Term::var(fresh));
            let mut ctx2 = ctx.clone();
            ctx2.insert(fresh.clone(), ty.clone());
            Ok(vec![(s, ctx2)])
        }
        Rule::EqSubst {
            gamma_idx,
            var_side,
        } => {
            require_mem_rhs(concl, name)?;
            let Formula::EqU(a, b) = gamma_at(concl, *gamma_idx, name)? else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not an Ur-element equality".into(),
                });
            };
            let (var_term, repl) = match var_side {
                Side::Left => (a, b),
                Side::Right => (b, a),
            };
            let Term::Var(v) = var_term else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!("substituted side `{var_term}` is not a variable"),
                });
            };
            let mut s = concl.clone();
            s.gamma.remove(*gamma_idx);
            Ok(same_ctx(vec![s.substitute(v, repl)]))
        }
        Rule::NeqL { gamma_idx } => {
            require_mem_rhs(concl, name)?;
            let Formula::NeqU(t, u) = gamma_at(concl, *gamma_idx, name)? else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected hypothesis is not an Ur-element disequality".into(),
                });
            };
            if !term_beq(t, u) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!("`{t} ≠ {u}` is not syntactically refutable"),
                });
            }
            Ok(vec![])
        }
        Rule::TimesBeta {
            idx,
            var,
            fst,
            snd,
            template,
        } => {
            require_mem_rhs(concl, name)?;
            require_mem_rhs(template, name)?;
            if *idx != 1 && *idx != 2 {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "projection index must be 1 or 2".into(),
                });
            }
            if fst.free_vars().contains(var) || snd.free_vars().contains(var) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "hole variable occurs in the pair components".into(),
                });
            }
            typecheck_term(ctx, fst)?;
            typecheck_term(ctx, snd)?;
            let pair = Term::pair(fst.clone(), snd.clone());
            let redex = if *idx == 1 {
                Term::proj1(pair)
            } else {
                Term::proj2(pair)
            };
            let expected = template.substitute(var, &redex);
            if !expected.matches(concl) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "conclusion does not match the template instance `{expected}`"
                    ),
                });
            }
            let component = if *idx == 1 { fst } else { snd };
            Ok(same_ctx(vec![template.substitute(var, component)]))
        }
        Rule::TimesEta {
            var,
            fresh_fst,
            fresh_snd,
        } => {
            require_mem_rhs(concl, name)?;
            let Some(ObjType::Prod(a, b)) = ctx.get(var) else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!("`{var}` is not a product-typed variable in scope"),
                });
            };
            if fresh_fst == fresh_snd {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "the two component variables must be distinct".into(),
                });
            }
            check_fresh(concl, ctx, fresh_fst, name)?;
            check_fresh(concl, ctx, fresh_snd, name)?;
            let pair = Term::pair(Term::var(fresh_fst), Term::var(fresh_snd));
            let prem = concl.substitute(var, &pair);
            let mut ctx2 = ctx.clone();
            ctx2.insert(fresh_fst.clone(), (**a).clone());
            ctx2.insert(fresh_snd.clone(), (**b).clone());
            Ok(vec![(prem, ctx2)])
        }
        Rule::Weaken { gamma_idx } => {
            gamma_at(concl, *gamma_idx, name)?;
            let mut s = concl.clone();
            s.gamma.remove(*gamma_idx);
            Ok(same_ctx(vec![s]))
        }
        Rule::Axiom => {
            if concl.gamma.len() != 1 {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "Γ must consist of exactly the goal's expansion".into(),
                });
            }
            if !formula_abeq(&concl.gamma[0], &concl.rhs.expand()) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "hypothesis `{}` is not the expansion of the goal `{}`",
                        concl.gamma[0], concl.rhs
                    ),
                });
            }
            Ok(vec![])
        }
        Rule::MemL {
            gamma_idx,
            elem_ty,
            member,
            set,
        } => {
            require_mem_rhs(concl, name)?;
            let g = gamma_at(concl, *gamma_idx, name)?;
            if !formula_abeq(g, &expand_mem(elem_ty, member, set)) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "hypothesis `{g}` is not the expansion of `{member} ∈ {set}`"
                    ),
                });
            }
            let mut s = concl.clone();
            s.gamma.remove(*gamma_idx);
            s.theta
                .push(ThetaAtom::new(elem_ty.clone(), member.clone(), set.clone()));
            Ok(same_ctx(vec![s]))
        }
        Rule::SubL {
            theta_idx,
            gamma_idx,
            superset,
        } => {
            require_mem_rhs(concl, name)?;
            let atom = theta_at(concl, *theta_idx, name)?.clone();
            let g = gamma_at(concl, *gamma_idx, name)?;
            if !formula_abeq(g, &expand_sub(&atom.elem_ty, &atom.set, superset)) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "hypothesis `{g}` is not the expansion of `{} ⊆ {superset}`",
                        atom.set
                    ),
                });
            }
            let mut s = concl.clone();
            s.gamma.remove(*gamma_idx);
            s.theta.push(ThetaAtom::new(
                atom.elem_ty.clone(),
                atom.member.clone(),
                superset.clone(),
            ));
            Ok(same_ctx(vec![s]))
        }
        Rule::ImpliesL {
            gamma_idx,
            hyp_idx,
        } => {
            require_mem_rhs(concl, name)?;
            if gamma_idx == hyp_idx {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "implication and hypothesis indices coincide".into(),
                });
            }
            let Formula::Or(neg, succ) = gamma_at(concl, *gamma_idx, name)? else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "selected formula is not an (encoded) implication".into(),
                });
            };
            let hyp = gamma_at(concl, *hyp_idx, name)?;
            if !formula_abeq(neg, &hyp.negate()) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!(
                        "antecedent of `{}` is not the negation of `{hyp}`",
                        concl.gamma[*gamma_idx]
                    ),
                });
            }
            let mut s = concl.clone();
            s.gamma[*gamma_idx] = (**succ).clone();
            Ok(same_ctx(vec![s]))
        }
        Rule::EqReflR => {
            let Rhs::Eq(_, t, u) = &concl.rhs else {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: "requires an equality goal".into(),
                });
            };
            if !term_beq(t, u) {
                return Err(CheckError::RuleMismatch {
                    rule: name,
                    detail: format!("`{t}` and `{u}` are not syntactically equal"),
                });
            }
            Ok(vec![])
        }
    }
}

fn check_node(ctx: &TypeContext, node: &ProofNode) -> Result<(), CheckError> {
    let expected = rule_premises(ctx, &node.conclusion, &node.rule)?;
    if expected.len() != node.premises.len() {
        return Err(CheckError::PremiseCount {
            rule: node.rule.name(),
            expected: expected.len(),
            got: node.premises.len(),
        });
    }
    for (i, ((want, ctx2), prem)) in expected.iter().zip(&node.premises).enumerate() {
        if !want.matches(&prem.conclusion) {
            return Err(CheckError::PremiseMismatch {
                rule: node.rule.name(),
                idx: i,
                expected: want.to_string(),
                got: prem.conclusion.to_string(),
            });
        }
        check_node(ctx2, prem)?;
    }
    Ok(())
}

/// Check a proof tree under a type context for its conclusion's free
/// variables.  Every node is re-derived locally from its rule and
/// instantiation data; no search is performed.
pub fn check_proof(ctx: &TypeContext, root: &ProofNode) -> Result<CheckedProof, CheckError> {
    root.conclusion.typecheck(ctx)?;
    check_node(ctx, root)?;
    Ok(CheckedProof {
        core_only: root.is_core_only(),
        nodes: root.node_count(),
        max_sequent_size: root.max_sequent_size(),
        root: root.clone(),
        ctx: ctx.clone(),
    })
}

/// Variables reached by a chain of projections within a term (the only
/// terms a projection can be stuck on once β-normal).
fn projected_vars(t: &Term, out: &mut BTreeSet<String>) {
    fn spine(t: &Term, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Proj1(inner) | Term::Proj2(inner) => spine(inner, out),
            _ => {}
        }
    }
    match t {
        Term::Var(_) | Term::UnitVal => {}
        Term::Pair(a, b) => {
            projected_vars(a, out);
            projected_vars(b, out);
        }
        Term::Proj1(inner) | Term::Proj2(inner) => spine(inner, out),
    }
}

/// The eigenvariables introduced by a rule, if any.
pub(crate) fn rule_eigenvars(rule: &Rule) -> Vec<String> {
    match rule {
        Rule::EqUrR { fresh } | Rule::SubsetR { fresh } | Rule::ExistsL { fresh, .. } => {
            vec![fresh.clone()]
        }
        Rule::TimesEta {
            fresh_fst,
            fresh_snd,
            ..
        } => vec![fresh_fst.clone(), fresh_snd.clone()],
        _ => vec![],
    }
}

/// Point a rule's eigenvariable field at a new name.
pub(crate) fn rename_rule_eigenvar(rule: &mut Rule, old: &str, new: &str) {
    match rule {
        Rule::EqUrR { fresh } | Rule::SubsetR { fresh } | Rule::ExistsL { fresh, .. }
            if fresh.as_str() == old =>
        {
            *fresh = new.to_string();
        }
        Rule::TimesEta {
            fresh_fst,
            fresh_snd,
            ..
        } => {
            if fresh_fst.as_str() == old {
                *fresh_fst = new.to_string();
            } else if fresh_snd.as_str() == old {
                *fresh_snd = new.to_string();
            }
        }
        _ => {}
    }
}

/// Substitute a term for a free variable throughout a proof tree, renaming
/// eigenvariables that would clash with the substituted term's variables.
pub(crate) fn substitute_in_proof(node: &ProofNode, x: &str, t: &Term) -> ProofNode {
    let clash: BTreeSet<String> = {
        let mut s = t.free_vars();
        s.insert(x.to_string());
        s
    };
    let rename_needed = |v: &str| clash.contains(v);

    // Rename clashing eigenvariables at this node first.
    let mut node = node.clone();
    for old in rule_eigenvars(&node.rule) {
        if !rename_needed(&old) {
            continue;
        }
        let mut avoid = node.all_vars();
        avoid.extend(clash.iter().cloned());
        let new = fresh_name(&old, &avoid);
        let nv = Term::var(new.clone());
        for p in node.premises.iter_mut() {
            *p = substitute_in_proof(p, &old, &nv);
        }
        rename_rule_eigenvar(&mut node.rule, &old, &new);
    }

    // Substitute in the rule's instantiation data.
    let rule = match &node.rule {
        Rule::TimesBeta {
            idx,
            var,
            fst,
            snd,
            template,
        } => {
            // The hole variable is template-local; rename it away from the
            // substitution if needed.
            let (var, template) = if rename_needed(var) {
                let mut avoid = template.free_vars();
                avoid.extend(clash.iter().cloned());
                let var2 = fresh_name(var, &avoid);
                let template2 = template.substitute(var, &Term::var(var2.clone()));
                (var2, Box::new(template2))
            } else {
                (var.clone(), template.clone())
            };
            Rule::TimesBeta {
                idx: *idx,
                var,
                fst: fst.substitute(x, t),
                snd: snd.substitute(x, t),
                template: Box::new(template.substitute(x, t)),
            }
        }
        Rule::TimesEta {
            var,
            fresh_fst,
            fresh_snd,
        } => {
            // η on the substituted variable itself disappears only via
            // normalize_projections; keep the rule but retarget if `var`
            // was renamed by the caller (plain variable-for-variable case).
            let var = match t {
                Term::Var(v) if var == x => v.clone(),
                _ => var.clone(),
            };
            Rule::TimesEta {
                var,
                fresh_fst: fresh_fst.clone(),
                fresh_snd: fresh_snd.clone(),
            }
        }
        Rule::MemL {
            gamma_idx,
            elem_ty,
            member,
            set,
        } => Rule::MemL {
            gamma_idx: *gamma_idx,
            elem_ty: elem_ty.clone(),
            member: member.substitute(x, t),
            set: set.substitute(x, t),
        },
        Rule::SubL {
            theta_idx,
            gamma_idx,
            superset,
        } => Rule::SubL {
            theta_idx: *theta_idx,
            gamma_idx: *gamma_idx,
            superset: superset.substitute(x, t),
        },
        other => other.clone(),
    };

    ProofNode {
        rule,
        conclusion: node.conclusion.substitute(x, t),
        premises: node
            .premises
            .iter()
            .map(|p| substitute_in_proof(p, x, t))
            .collect(),
    }
}

/// β-normalize every sequent in a proof tree, collapsing `×β` nodes whose
/// conclusion becomes identical to their premise.
fn beta_pass(node: &ProofNode) -> ProofNode {
    if let Rule::TimesBeta { .. } = &node.rule {
        // Globally β-normalized, the step is the identity.
        return beta_pass(&node.premises[0]);
    }
    let rule = match &node.rule {
        Rule::MemL {
            gamma_idx,
            elem_ty,
            member,
            set,
        } => Rule::MemL {
            gamma_idx: *gamma_idx,
            elem_ty: elem_ty.clone(),
            member: beta_norm_term(member),
            set: beta_norm_term(set),
        },
        Rule::SubL {
            theta_idx,
            gamma_idx,
            superset,
        } => Rule::SubL {
            theta_idx: *theta_idx,
            gamma_idx: *gamma_idx,
            superset: beta_norm_term(superset),
        },
        other => other.clone(),
    };
    ProofNode {
        rule,
        conclusion: node.conclusion.canon(),
        premises: node.premises.iter().map(beta_pass).collect(),
    }
}

fn eta_pass(ctx: &TypeContext, node: &ProofNode) -> Result<ProofNode, CheckError> {
    // Offending variables: product variables still sitting under a
    // projection inside a Θ member term.
    let mut offenders = BTreeSet::new();
    for a in &node.conclusion.theta {
        projected_vars(&beta_norm_term(&a.member), &mut offenders);
    }
    offenders.retain(|v| matches!(ctx.get(v), Some(ObjType::Prod(..))));

    // An η node already present is part of the normal fringe; wrapping it
    // again would break idempotence.
    let already_eta = matches!(node.rule, Rule::TimesEta { .. });
    if let Some(x) = offenders.iter().next().cloned() {
        if matches!(node.conclusion.rhs, Rhs::Mem(..)) && !already_eta {
            let mut avoid = node.all_vars();
            avoid.extend(ctx.keys().cloned());
            let x1 = fresh_name(&format!("{x}_1"), &avoid);
            avoid.insert(x1.clone());
            let x2 = fresh_name(&format!("{x}_2"), &avoid);
            let pair = Term::pair(Term::var(&x1), Term::var(&x2));
            let sub = beta_pass(&substitute_in_proof(node, &x, &pair));
            let Some(ObjType::Prod(a, b)) = ctx.get(&x) else {
                unreachable!("offender filtered on product type")
            };
            let mut ctx2 = ctx.clone();
            ctx2.insert(x1.clone(), (**a).clone());
            ctx2.insert(x2.clone(), (**b).clone());
            let sub = eta_pass(&ctx2, &sub)?;
            return Ok(ProofNode::new(
                Rule::TimesEta {
                    var: x.clone(),
                    fresh_fst: x1,
                    fresh_snd: x2,
                },
                node.conclusion.clone(),
                vec![sub],
            ));
        }
        // Not a membership goal: the projections persist into the premises
        // of whichever right rule applies here, and are η-expanded there.
    }

    let premise_ctxs = rule_premises(ctx, &node.conclusion, &node.rule)?;
    let mut premises = Vec::with_capacity(node.premises.len());
    for ((_, ctx2), p) in premise_ctxs.iter().zip(&node.premises) {
        premises.push(eta_pass(ctx2, p)?);
    }
    Ok(ProofNode {
        rule: node.rule.clone(),
        conclusion: node.conclusion.clone(),
        premises,
    })
}

/// Normalize a proof so that, away from an invertible `×η`/`×β` fringe, no
/// membership atom on the left of a sequent applies a projection: every Θ
/// member term is projection-free.  Interpolation and synthesis rely on
/// this shape.  The conclusion is unchanged; the result is idempotent.
pub fn normalize_projections(proof: &CheckedProof) -> Result<CheckedProof, CheckError> {
    let root = beta_pass(&proof.root);
    let root = eta_pass(&proof.ctx, &root)?;
    check_proof(&proof.ctx, &root)
}

/// Whether every Θ member term in the tree (ignoring `×η`/`×β` fringe
/// conclusions, i.e. looking at premises of η nodes) is projection-free.
pub fn theta_members_projection_free(node: &ProofNode) -> bool {
    let here = matches!(node.rule, Rule::TimesEta { .. } | Rule::TimesBeta { .. })
        || node
            .conclusion
            .theta
            .iter()
            .all(|a| !beta_norm_term(&a.member).contains_proj());
    here && node.premises.iter().all(theta_members_projection_free)
}

/// Report from [`soundness_spotcheck`].
#[derive(Debug, Clone)]
pub struct SpotcheckReport {
    pub trials: usize,
    /// Trials whose sampled valuation satisfied all of `Θ` and `Γ`.
    pub relevant: usize,
    /// Human-readable descriptions of failing valuations (empty if sound on
    /// the sample).
    pub violations: Vec<String>,
}

impl SpotcheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Sample valuations for the sequent's context; whenever the left-hand side
/// holds, the right-hand side must as well.
pub fn soundness_spotcheck<R: Rng>(
    ctx: &TypeContext,
    seq: &Sequent,
    universe: &[String],
    trials: usize,
    rng: &mut R,
) -> SpotcheckReport {
    let mut report = SpotcheckReport {
        trials,
        relevant: 0,
        violations: Vec::new(),
    };
    for _ in 0..trials {
        let mut val = Valuation::new(universe.to_vec());
        for (name, ty) in ctx {
            val = val.bind(name.clone(), sample_value(ty, universe, rng));
        }
        let lhs_holds = seq
            .theta
            .iter()
            .map(|a| a.expand())
            .chain(seq.gamma.iter().cloned())
            .all(|f| eval_delta0(&f, &val).unwrap_or(false));
        if !lhs_holds {
            continue;
        }
        report.relevant += 1;
        if !eval_delta0(&seq.rhs.expand(), &val).unwrap_or(false) {
            let bindings: Vec<String> = ctx
                .keys()
                .map(|k| format!("{k} = {}", val.get(k).unwrap()))
                .collect();
            report
                .violations
                .push(format!("[{}] falsifies `{}`", bindings.join(", "), seq.rhs));
            if report.violations.len() >= 5 {
                break;
            }
        }
    }
    report
}
