//! Shared fixtures for the integration suite: hand-written functionality
//! proofs, reference expressions, brute-force oracles, and a small corpus of
//! derivations exercising every core rule.
//!
//! Proofs are constructed rule by rule through [`Lin`], which recomputes each
//! premise with `rule_premises` so that a mistaken step fails loudly at
//! construction time rather than at checking time.  Premises are stored
//! β-normalized (sequent comparison is β-insensitive), which keeps the
//! scripts free of explicit `×β` bookkeeping.

#![allow(dead_code)]

use std::collections::BTreeSet;

use nrsynth::calculus::{
    beta_norm_formula, beta_norm_term, rule_premises, Rhs, Rule, Sequent, Side, ThetaAtom,
};
use nrsynth::kernel::{expand_eq, expand_mem, Formula, ObjType, SugarAtom, Term, TypeContext};
use nrsynth::nrc::{case_expr, compile_verify, eq_expr, NrcExpr};
use nrsynth::synth::SynthesisProblem;
use nrsynth::values::Value;
use rand::Rng;

use nrsynth::calculus::ProofNode;

pub fn u() -> ObjType {
    ObjType::U
}

pub fn set_u() -> ObjType {
    ObjType::set(u())
}

pub fn ctx_of(vars: &[(&str, ObjType)]) -> TypeContext {
    vars.iter()
        .map(|(n, t)| (n.to_string(), t.clone()))
        .collect()
}

fn var(x: &str) -> Term {
    Term::var(x)
}

fn beta_seq(s: &Sequent) -> Sequent {
    let atom = |a: &ThetaAtom| ThetaAtom {
        elem_ty: a.elem_ty.clone(),
        member: beta_norm_term(&a.member),
        set: beta_norm_term(&a.set),
    };
    let rhs = match &s.rhs {
        Rhs::Mem(ty, t, w) => Rhs::Mem(ty.clone(), beta_norm_term(t), beta_norm_term(w)),
        Rhs::Eq(ty, t, w) => Rhs::Eq(ty.clone(), beta_norm_term(t), beta_norm_term(w)),
        Rhs::Sub(ty, t, w) => Rhs::Sub(ty.clone(), beta_norm_term(t), beta_norm_term(w)),
    };
    Sequent::new(
        s.theta.iter().map(atom).collect(),
        s.gamma.iter().map(beta_norm_formula).collect(),
        rhs,
    )
}

/// A linear proof segment under construction, with the pending rule trail.
pub struct Lin {
    pub ctx: TypeContext,
    pub seq: Sequent,
    trail: Vec<(Rule, Sequent)>,
}

impl Lin {
    pub fn new(ctx: TypeContext, seq: Sequent) -> Lin {
        Lin {
            ctx,
            seq,
            trail: Vec::new(),
        }
    }

    /// Apply a single-premise rule and advance to its (β-normalized) premise.
    pub fn app(&mut self, rule: Rule) {
        let prems = rule_premises(&self.ctx, &self.seq, &rule)
            .unwrap_or_else(|e| panic!("rule {rule:?} on `{}`: {e}", self.seq));
        assert_eq!(prems.len(), 1, "app expects a one-premise rule");
        let (next, ctx2) = prems.into_iter().next().unwrap();
        self.trail.push((rule, self.seq.clone()));
        self.seq = beta_seq(&next);
        self.ctx = ctx2;
    }

    /// Close the segment with a zero-premise rule.
    pub fn close(self, rule: Rule) -> ProofNode {
        let prems = rule_premises(&self.ctx, &self.seq, &rule)
            .unwrap_or_else(|e| panic!("rule {rule:?} on `{}`: {e}", self.seq));
        assert!(prems.is_empty(), "close expects a zero-premise rule");
        let tip = ProofNode::new(rule, self.seq.clone(), vec![]);
        self.finish(tip)
    }

    /// Split into a multi-premise rule, building each child with a closure.
    pub fn branch(
        self,
        rule: Rule,
        children: Vec<Box<dyn FnOnce(TypeContext, Sequent) -> ProofNode>>,
    ) -> ProofNode {
        let prems = rule_premises(&self.ctx, &self.seq, &rule)
            .unwrap_or_else(|e| panic!("rule {rule:?} on `{}`: {e}", self.seq));
        assert_eq!(prems.len(), children.len(), "premise/child count mismatch");
        let nodes = prems
            .into_iter()
            .zip(children)
            .map(|((seq, ctx2), k)| k(ctx2, beta_seq(&seq)))
            .collect();
        let tip = ProofNode::new(rule, self.seq.clone(), nodes);
        self.finish(tip)
    }

    fn finish(self, tip: ProofNode) -> ProofNode {
        self.trail
            .into_iter()
            .rev()
            .fold(tip, |child, (rule, seq)| {
                ProofNode::new(rule, seq, vec![child])
            })
    }

    /// Index of the first Γ formula satisfying the predicate.
    pub fn gi(&self, pred: impl Fn(&Formula) -> bool) -> usize {
        self.seq
            .gamma
            .iter()
            .position(pred)
            .unwrap_or_else(|| panic!("no matching hypothesis in `{}`", self.seq))
    }

    /// Index of the Θ atom with the given member and set.
    pub fn ti(&self, member: &Term, set: &Term) -> usize {
        self.seq
            .theta
            .iter()
            .position(|a| &a.member == member && &a.set == set)
            .unwrap_or_else(|| panic!("no atom `{member} ∈ {set}` in `{}`", self.seq))
    }
}

/// Build a linear proof by applying single-premise rules in order; the last
/// rule must close its goal.
pub fn chain(ctx: &TypeContext, concl: Sequent, rules: &[Rule]) -> ProofNode {
    let (last, init) = rules.split_last().expect("nonempty rule chain");
    let mut l = Lin::new(ctx.clone(), concl);
    for r in init {
        l.app(r.clone());
    }
    l.close(last.clone())
}

// ---------------------------------------------------------------------------
// distinguishers: Σ(X,o) for "elements belonging to exactly one member of X"

/// `χ(X,x,a) := ∀y∈X (a ∈ y ⇒ x =_Set(U) y)`.
fn chi() -> Formula {
    Formula::forall(
        "y",
        set_u(),
        var("X"),
        SugarAtom::Implies(
            expand_mem(&u(), &var("a"), &var("y")),
            expand_eq(&set_u(), &var("x"), &var("y")),
        )
        .expand(),
    )
}

/// `ψ(X,x,a) := a ∈ x ∧ χ(X,x,a)`.
fn psi() -> Formula {
    Formula::and(expand_mem(&u(), &var("a"), &var("x")), chi())
}

/// The implicit definition of the distinguisher transformation: every member
/// of `o` distinguishes some element of `X`, and conversely.
pub fn distinguishers_sigma() -> Formula {
    let fwd = Formula::forall(
        "a",
        u(),
        var("o"),
        Formula::exists("x", set_u(), var("X"), psi()),
    );
    let bwd = Formula::forall(
        "x",
        set_u(),
        var("X"),
        Formula::forall(
            "a",
            u(),
            var("x"),
            SugarAtom::Implies(chi(), expand_mem(&u(), &var("a"), &var("o"))).expand(),
        ),
    );
    Formula::and(fwd, bwd)
}

pub fn distinguishers_ctx() -> TypeContext {
    ctx_of(&[
        ("X", ObjType::set(set_u())),
        ("o", set_u()),
    ])
}

fn distinguishers_branch_rules(sub_side: Side) -> Vec<Rule> {
    // Indices for the inclusion `s ⊆ t`: for the forward branch (o ⊆ o')
    // the A-conjunct comes from the first Σ and the B-conjunct from the
    // second; the backward branch mirrors the Γ positions.
    let fwd = sub_side == Side::Left;
    let (i_and1, i_wk1, i_fa, i_ex, i_and2, i_wk2, i_fb) = if fwd {
        (0, 1, 0, 0, 1, 1, 1)
    } else {
        (1, 2, 1, 1, 0, 0, 0)
    };
    vec![
        Rule::SubsetR { fresh: "z0".into() },
        Rule::AndL { gamma_idx: i_and1 },
        Rule::Weaken { gamma_idx: i_wk1 },
        Rule::ForallL {
            gamma_idx: i_fa,
            theta_idx: 0,
        },
        Rule::ExistsL {
            gamma_idx: i_ex,
            fresh: "x0".into(),
        },
        Rule::AndL { gamma_idx: i_and2 },
        Rule::Weaken { gamma_idx: i_wk2 },
        Rule::ForallL {
            gamma_idx: i_fb,
            theta_idx: 1,
        },
        Rule::AndL {
            gamma_idx: if fwd { 0 } else { 1 },
        },
        Rule::ExistsL {
            gamma_idx: if fwd { 0 } else { 1 },
            fresh: "w0".into(),
        },
        Rule::EqSubst {
            gamma_idx: if fwd { 0 } else { 1 },
            var_side: Side::Right,
        },
        Rule::ForallL {
            gamma_idx: if fwd { 1 } else { 0 },
            theta_idx: 2,
        },
        Rule::ImpliesL {
            gamma_idx: if fwd { 1 } else { 0 },
            hyp_idx: if fwd { 0 } else { 1 },
        },
        Rule::Weaken {
            gamma_idx: if fwd { 0 } else { 1 },
        },
        Rule::Axiom,
    ]
}

/// The full functionality proof `Σ(X,o), Σ(X,o') ⊢ o = o'`.
pub fn distinguishers_proof() -> ProofNode {
    let sigma = distinguishers_sigma();
    let sigma2 = sigma.substitute("o", &var("o'"));
    let root = Sequent::new(
        vec![],
        vec![sigma, sigma2],
        Rhs::Eq(set_u(), var("o"), var("o'")),
    );
    let mut ctx = distinguishers_ctx();
    ctx.insert("o'".into(), set_u());
    Lin::new(ctx, root).branch(
        Rule::EqSetR,
        vec![
            Box::new(|c, s| chain(&c, s, &distinguishers_branch_rules(Side::Left))),
            Box::new(|c, s| chain(&c, s, &distinguishers_branch_rules(Side::Right))),
        ],
    )
}

pub fn distinguishers_problem() -> SynthesisProblem {
    SynthesisProblem {
        ctx: distinguishers_ctx(),
        sigma: distinguishers_sigma(),
        input_var: "X".into(),
        output_var: "o".into(),
        aux_vars: vec![],
        proof: distinguishers_proof(),
    }
}

/// The reference program for the distinguisher transformation:
/// `⋃{ case(Verify_θ(X,a), {a}, ∅) | a ∈ ⋃X }` with `θ(X,a) = ∃x∈X ψ`.
pub fn distinguishers_reference_expr() -> NrcExpr {
    let theta = Formula::exists("x", set_u(), var("X"), psi());
    let verify = compile_verify(&theta);
    NrcExpr::bigunion(
        "a",
        NrcExpr::bigunion("x", NrcExpr::var("X"), NrcExpr::var("x")),
        case_expr(
            &verify,
            &NrcExpr::singleton(NrcExpr::var("a")),
            &NrcExpr::EmptyE(u()),
            &set_u(),
        ),
    )
}

/// Brute-force oracle: atoms that belong to exactly one member of `X`.
pub fn brute_distinguishers(x: &Value) -> Value {
    let Value::SetV(members) = x else {
        panic!("expected a set of sets");
    };
    let mut atoms: BTreeSet<Value> = BTreeSet::new();
    for m in members {
        let Value::SetV(elems) = m else {
            panic!("expected a set of atoms");
        };
        atoms.extend(elems.iter().cloned());
    }
    let picked = atoms
        .into_iter()
        .filter(|a| {
            members
                .iter()
                .filter(|m| matches!(m, Value::SetV(es) if es.contains(a)))
                .count()
                == 1
        })
        .collect();
    Value::set(picked)
}

// ---------------------------------------------------------------------------
// grouping: Σ(F,o) forcing o = "F grouped on the first component"

fn prod_uu() -> ObjType {
    ObjType::prod(u(), u())
}

fn prod_us() -> ObjType {
    ObjType::prod(u(), set_u())
}

/// `∃r∈F π₁r = π₁p`: the key of `p` occurs in `F`.
fn g_key(p: &Term) -> Formula {
    Formula::exists(
        "r",
        prod_uu(),
        var("F"),
        Formula::EqU(Term::proj1(var("r")), Term::proj1(p.clone())),
    )
}

/// `∀b∈π₂p ∃q∈F (π₁q = π₁p ∧ π₂q = b)`: the fiber of `p` is inside `F`.
fn g_fib_in(p: &Term) -> Formula {
    Formula::forall(
        "b",
        u(),
        Term::proj2(p.clone()),
        Formula::exists(
            "q",
            prod_uu(),
            var("F"),
            Formula::and(
                Formula::EqU(Term::proj1(var("q")), Term::proj1(p.clone())),
                Formula::EqU(Term::proj2(var("q")), var("b")),
            ),
        ),
    )
}

/// `∀r∈F (π₁r = π₁p ⇒ π₂r ∈ π₂p)`: the fiber of `p` is complete.
fn g_fib_full(p: &Term) -> Formula {
    Formula::forall(
        "r",
        prod_uu(),
        var("F"),
        Formula::or(
            Formula::NeqU(Term::proj1(var("r")), Term::proj1(p.clone())),
            Formula::exists(
                "c",
                u(),
                Term::proj2(p.clone()),
                Formula::EqU(Term::proj2(var("r")), var("c")),
            ),
        ),
    )
}

/// The implicit definition of grouping on the first component: every pair in
/// `o` is a key of `F` with its exact fiber, and every key of `F` occurs.
pub fn grouping_sigma() -> Formula {
    let p = var("p");
    let a = Formula::forall(
        "p",
        prod_us(),
        var("o"),
        Formula::and(g_key(&p), Formula::and(g_fib_in(&p), g_fib_full(&p))),
    );
    let b = Formula::forall(
        "r",
        prod_uu(),
        var("F"),
        Formula::exists(
            "p",
            prod_us(),
            var("o"),
            Formula::EqU(Term::proj1(var("p")), Term::proj1(var("r"))),
        ),
    );
    Formula::and(a, b)
}

pub fn grouping_ctx() -> TypeContext {
    ctx_of(&[("F", ObjType::set(prod_uu())), ("o", ObjType::set(prod_us()))])
}

fn is_sigma_of(f: &Formula, o: &Term) -> bool {
    matches!(f, Formula::And(l, _) if matches!(&**l, Formula::ForallIn(_, _, b, _) if b == o))
}

fn is_a_of(f: &Formula, o: &Term) -> bool {
    matches!(f, Formula::ForallIn(_, _, b, _) if b == o)
}

fn is_b_of(f: &Formula, o: &Term) -> bool {
    matches!(f, Formula::ForallIn(_, _, b, body)
        if b == &var("F") && matches!(&**body, Formula::ExistsIn(_, _, eb, _) if eb == o))
}

fn is_key_inst(f: &Formula) -> bool {
    matches!(f, Formula::ExistsIn(_, _, b, body)
        if b == &var("F") && matches!(&**body, Formula::EqU(..)))
}

fn is_fib_in_of(f: &Formula, src: &Term) -> bool {
    matches!(f, Formula::ForallIn(_, _, b, _) if b == src)
}

fn is_fib_full_into(f: &Formula, dst: &Term) -> bool {
    matches!(f, Formula::ForallIn(_, _, b, body)
        if b == &var("F")
            && matches!(&**body, Formula::Or(_, r) if matches!(&**r, Formula::ExistsIn(_, _, eb, _) if eb == dst)))
}

fn is_eq_vars(f: &Formula) -> bool {
    matches!(f, Formula::EqU(Term::Var(_), Term::Var(_)))
}

/// Transfer `w` across the two fibers: from `Θ ∋ w ∈ src` conclude
/// `w ∈ dst` using "src's fiber is inside F" and "dst's fiber is complete".
fn grouping_fiber(ctx: TypeContext, seq: Sequent, src: &str, dst: &str) -> ProofNode {
    let mut l = Lin::new(ctx, seq);
    l.app(Rule::SubsetR { fresh: "w".into() });
    let g = l.gi(|f| is_fib_in_of(f, &var(src)));
    let th = l.ti(&var("w"), &var(src));
    l.app(Rule::ForallL {
        gamma_idx: g,
        theta_idx: th,
    });
    let g = l.gi(|f| {
        matches!(f, Formula::ExistsIn(_, _, b, body)
            if b == &var("F") && matches!(&**body, Formula::And(..)))
    });
    l.app(Rule::ExistsL {
        gamma_idx: g,
        fresh: "qq".into(),
    });
    l.app(Rule::TimesEta {
        var: "qq".into(),
        fresh_fst: "q1".into(),
        fresh_snd: "q2".into(),
    });
    let g = l.gi(|f| matches!(f, Formula::And(a, _) if is_eq_vars(a)));
    l.app(Rule::AndL { gamma_idx: g });
    for _ in 0..2 {
        let g = l.gi(is_eq_vars);
        l.app(Rule::EqSubst {
            gamma_idx: g,
            var_side: Side::Left,
        });
    }
    let g = l.gi(|f| is_fib_full_into(f, &var(dst)));
    let th = l.ti(&Term::pair(var("z1"), var("w")), &var("F"));
    l.app(Rule::ForallL {
        gamma_idx: g,
        theta_idx: th,
    });
    let g = l.gi(|f| matches!(f, Formula::Or(..)));
    let dst = dst.to_string();
    l.branch(
        Rule::OrL { gamma_idx: g },
        vec![
            Box::new(|c, s| {
                let l = Lin::new(c, s);
                let g = l.gi(|f| matches!(f, Formula::NeqU(..)));
                l.close(Rule::NeqL { gamma_idx: g })
            }),
            Box::new(move |c, s| {
                let mut l = Lin::new(c, s);
                let g = l.gi(|f| matches!(f, Formula::ExistsIn(..)));
                l.app(Rule::ExistsL {
                    gamma_idx: g,
                    fresh: "cc".into(),
                });
                let g = l.gi(is_eq_vars);
                l.app(Rule::EqSubst {
                    gamma_idx: g,
                    var_side: Side::Right,
                });
                let th = l.ti(&var("w"), &var(&dst));
                l.close(Rule::MemUrR { theta_idx: th })
            }),
        ],
    )
}

/// One inclusion branch `Σ(F,s), Σ(F,t) ⊢ s ⊆ t` of the grouping proof.
fn grouping_branch(ctx: TypeContext, seq: Sequent, s: &str, t: &str) -> ProofNode {
    let (s, t) = (var(s), var(t));
    let mut l = Lin::new(ctx, seq);
    l.app(Rule::SubsetR { fresh: "z".into() });
    l.app(Rule::TimesEta {
        var: "z".into(),
        fresh_fst: "z1".into(),
        fresh_snd: "z2".into(),
    });
    let zz = Term::pair(var("z1"), var("z2"));
    // decompose Σ(s), drop its B-conjunct, decompose Σ(t)
    let g = l.gi(|f| is_sigma_of(f, &s));
    l.app(Rule::AndL { gamma_idx: g });
    let g = l.gi(|f| is_b_of(f, &s));
    l.app(Rule::Weaken { gamma_idx: g });
    let g = l.gi(|f| is_sigma_of(f, &t));
    l.app(Rule::AndL { gamma_idx: g });
    // A(s) at ⟨z1,z2⟩: key occurrence and both fiber facts
    let g = l.gi(|f| is_a_of(f, &s));
    let th = l.ti(&zz, &s);
    l.app(Rule::ForallL {
        gamma_idx: g,
        theta_idx: th,
    });
    let g = l.gi(|f| matches!(f, Formula::And(a, _) if is_key_inst(a)));
    l.app(Rule::AndL { gamma_idx: g });
    let g = l.gi(|f| matches!(f, Formula::And(..)));
    l.app(Rule::AndL { gamma_idx: g });
    // the key of z occurs in F: obtain r with π₁r = z1 and normalize
    let g = l.gi(is_key_inst);
    l.app(Rule::ExistsL {
        gamma_idx: g,
        fresh: "rr".into(),
    });
    l.app(Rule::TimesEta {
        var: "rr".into(),
        fresh_fst: "r1".into(),
        fresh_snd: "r2".into(),
    });
    let g = l.gi(is_eq_vars);
    l.app(Rule::EqSubst {
        gamma_idx: g,
        var_side: Side::Left,
    });
    // B(t) at ⟨z1,r2⟩: some p ∈ t shares the key z1
    let g = l.gi(|f| is_b_of(f, &t));
    let th = l.ti(&Term::pair(var("z1"), var("r2")), &var("F"));
    l.app(Rule::ForallL {
        gamma_idx: g,
        theta_idx: th,
    });
    let g = l.gi(|f| matches!(f, Formula::ExistsIn(_, _, b, _) if b == &t));
    l.app(Rule::ExistsL {
        gamma_idx: g,
        fresh: "pp".into(),
    });
    l.app(Rule::TimesEta {
        var: "pp".into(),
        fresh_fst: "p1".into(),
        fresh_snd: "p2".into(),
    });
    let g = l.gi(is_eq_vars);
    l.app(Rule::EqSubst {
        gamma_idx: g,
        var_side: Side::Left,
    });
    // A(t) at ⟨z1,p2⟩; its key fact is not needed
    let pz = Term::pair(var("z1"), var("p2"));
    let g = l.gi(|f| is_a_of(f, &t));
    let th = l.ti(&pz, &t);
    l.app(Rule::ForallL {
        gamma_idx: g,
        theta_idx: th,
    });
    let g = l.gi(|f| matches!(f, Formula::And(a, _) if is_key_inst(a)));
    l.app(Rule::AndL { gamma_idx: g });
    let g = l.gi(|f| matches!(f, Formula::And(..)));
    l.app(Rule::AndL { gamma_idx: g });
    let g = l.gi(is_key_inst);
    l.app(Rule::Weaken { gamma_idx: g });
    // close through the membership ⟨z1,p2⟩ ∈ t and componentwise equality
    let th = l.ti(&pz, &t);
    l.app(Rule::MemSetR { theta_idx: th });
    l.branch(
        Rule::EqProdR,
        vec![
            Box::new(|c, s| {
                let mut l = Lin::new(c, s);
                l.app(Rule::EqUrR { fresh: "gg".into() });
                let th = l.ti(&var("z1"), &var("gg"));
                l.close(Rule::MemUrR { theta_idx: th })
            }),
            Box::new(|c, s| {
                Lin::new(c, s).branch(
                    Rule::EqSetR,
                    vec![
                        Box::new(|c, s| grouping_fiber(c, s, "p2", "z2")),
                        Box::new(|c, s| grouping_fiber(c, s, "z2", "p2")),
                    ],
                )
            }),
        ],
    )
}

/// The full functionality proof `Σ(F,o), Σ(F,o') ⊢ o = o'`.
pub fn grouping_proof() -> ProofNode {
    let sigma = grouping_sigma();
    let sigma2 = sigma.substitute("o", &var("o'"));
    let root = Sequent::new(
        vec![],
        vec![sigma, sigma2],
        Rhs::Eq(ObjType::set(prod_us()), var("o"), var("o'")),
    );
    let mut ctx = grouping_ctx();
    ctx.insert("o'".into(), ObjType::set(prod_us()));
    Lin::new(ctx, root).branch(
        Rule::EqSetR,
        vec![
            Box::new(|c, s| grouping_branch(c, s, "o", "o'")),
            Box::new(|c, s| grouping_branch(c, s, "o'", "o")),
        ],
    )
}

pub fn grouping_problem() -> SynthesisProblem {
    SynthesisProblem {
        ctx: grouping_ctx(),
        sigma: grouping_sigma(),
        input_var: "F".into(),
        output_var: "o".into(),
        aux_vars: vec![],
        proof: grouping_proof(),
    }
}

/// Brute-force oracle: group a flat relation on its first component.
pub fn brute_group(f: &Value) -> Value {
    let Value::SetV(pairs) = f else {
        panic!("expected a set of pairs");
    };
    let keys: BTreeSet<&Value> = pairs
        .iter()
        .map(|p| match p {
            Value::PairV(a, _) => &**a,
            _ => panic!("expected a pair"),
        })
        .collect();
    let groups = keys
        .into_iter()
        .map(|k| {
            let fiber = pairs
                .iter()
                .filter_map(|p| match p {
                    Value::PairV(a, b) if &**a == k => Some((**b).clone()),
                    _ => None,
                })
                .collect();
            Value::PairV(Box::new(k.clone()), Box::new(Value::set(fiber)))
        })
        .collect();
    Value::set(groups)
}

/// Brute-force oracle: flatten a grouped relation.
pub fn brute_flatten(g: &Value) -> Value {
    let Value::SetV(groups) = g else {
        panic!("expected a set of pairs");
    };
    let mut out = Vec::new();
    for p in groups {
        let Value::PairV(k, fiber) = p else {
            panic!("expected a pair");
        };
        let Value::SetV(bs) = &**fiber else {
            panic!("expected a set fiber");
        };
        for b in bs {
            out.push(Value::PairV(k.clone(), Box::new(b.clone())));
        }
    }
    Value::set(out)
}

// ---------------------------------------------------------------------------
// the chained ∨-L family

/// `D(n) := x≠x ∨ (x≠x ∨ (… ∨ x=x))` with `n` disjuncts of `x≠x`.
fn or_chain_formula(n: usize) -> Formula {
    let mut f = Formula::EqU(var("x"), var("x"));
    for _ in 0..n {
        f = Formula::or(Formula::NeqU(var("x"), var("x")), f);
    }
    f
}

/// A functionality problem whose proof threads `n` chained ∨-L steps:
/// `Σ_n(x,o) := o = x ∧ D(n)`.
pub fn or_chain_problem(n: usize) -> SynthesisProblem {
    let sigma = Formula::and(Formula::EqU(var("o"), var("x")), or_chain_formula(n));
    let ctx = ctx_of(&[("x", u()), ("o", u())]);
    let mut full_ctx = ctx.clone();
    full_ctx.insert("o'".into(), u());
    let sigma2 = sigma.substitute("o", &var("o'"));
    let root = Sequent::new(
        vec![],
        vec![sigma.clone(), sigma2],
        Rhs::Eq(u(), var("o"), var("o'")),
    );
    let mut l = Lin::new(full_ctx, root);
    l.app(Rule::EqUrR { fresh: "gg".into() });
    l.app(Rule::AndL { gamma_idx: 0 });
    l.app(Rule::AndL { gamma_idx: 2 });
    l.app(Rule::EqSubst {
        gamma_idx: 0,
        var_side: Side::Left,
    });
    l.app(Rule::EqSubst {
        gamma_idx: 1,
        var_side: Side::Left,
    });
    l.app(Rule::Weaken { gamma_idx: 1 });
    let proof = or_chain_tail(l, n);
    SynthesisProblem {
        ctx,
        sigma,
        input_var: "x".into(),
        output_var: "o".into(),
        aux_vars: vec![],
        proof,
    }
}

fn or_chain_tail(mut l: Lin, n: usize) -> ProofNode {
    if n == 0 {
        l.app(Rule::EqSubst {
            gamma_idx: 0,
            var_side: Side::Left,
        });
        let th = l.ti(&var("x"), &var("gg"));
        return l.close(Rule::MemUrR { theta_idx: th });
    }
    l.branch(
        Rule::OrL { gamma_idx: 0 },
        vec![
            Box::new(|c, s| Lin::new(c, s).close(Rule::NeqL { gamma_idx: 0 })),
            Box::new(move |c, s| or_chain_tail(Lin::new(c, s), n - 1)),
        ],
    )
}

// ---------------------------------------------------------------------------
// reference NRC expressions (free variables `F`, `G`, or a packed `x`)

/// `T_Proj = ⋃{{π₁f} | f∈F}`.
pub fn t_proj() -> NrcExpr {
    NrcExpr::bigunion(
        "f",
        NrcExpr::var("F"),
        NrcExpr::singleton(NrcExpr::proj(1, NrcExpr::var("f"))),
    )
}

/// `T_Filter` over a packed input `x : Set(U×U) × U`:
/// `⋃{case(π₁f = π₂x, {f}, ∅) | f ∈ π₁x}`.
pub fn t_filter() -> NrcExpr {
    let test = eq_expr(
        &u(),
        &NrcExpr::proj(1, NrcExpr::var("f")),
        &NrcExpr::proj(2, NrcExpr::var("x")),
    );
    NrcExpr::bigunion(
        "f",
        NrcExpr::proj(1, NrcExpr::var("x")),
        case_expr(
            &test,
            &NrcExpr::singleton(NrcExpr::var("f")),
            &NrcExpr::EmptyE(prod_uu()),
            &ObjType::set(prod_uu()),
        ),
    )
}

/// `T_Group = ⋃{{⟨v, ⋃{case(π₁f = v, {π₂f}, ∅) | f∈F}⟩} | v ∈ T_Proj}`.
pub fn t_group() -> NrcExpr {
    let fiber = NrcExpr::bigunion(
        "f",
        NrcExpr::var("F"),
        case_expr(
            &eq_expr(
                &u(),
                &NrcExpr::proj(1, NrcExpr::var("f")),
                &NrcExpr::var("v"),
            ),
            &NrcExpr::singleton(NrcExpr::proj(2, NrcExpr::var("f"))),
            &NrcExpr::EmptyE(u()),
            &set_u(),
        ),
    );
    NrcExpr::bigunion(
        "v",
        t_proj(),
        NrcExpr::singleton(NrcExpr::pair(NrcExpr::var("v"), fiber)),
    )
}

/// `T_Flatten = ⋃{⋃{{⟨π₁g, y⟩} | y ∈ π₂g} | g∈G}`.
pub fn t_flatten() -> NrcExpr {
    NrcExpr::bigunion(
        "g",
        NrcExpr::var("G"),
        NrcExpr::bigunion(
            "y",
            NrcExpr::proj(2, NrcExpr::var("g")),
            NrcExpr::singleton(NrcExpr::pair(
                NrcExpr::proj(1, NrcExpr::var("g")),
                NrcExpr::var("y"),
            )),
        ),
    )
}

// ---------------------------------------------------------------------------
// the small-proof corpus

pub struct CorpusEntry {
    pub name: &'static str,
    pub ctx: TypeContext,
    pub proof: ProofNode,
    /// Universe for model enumeration in the interpolation contract checks.
    pub universe: Vec<String>,
}

fn entry(
    name: &'static str,
    ctx: TypeContext,
    proof: ProofNode,
    universe: &[&str],
) -> CorpusEntry {
    CorpusEntry {
        name,
        ctx,
        proof,
        universe: universe.iter().map(|s| s.to_string()).collect(),
    }
}

fn mem_u(t: &str, s: &str) -> ThetaAtom {
    ThetaAtom::new(u(), var(t), var(s))
}

/// Small derivations that, together with the large fixtures, cover every
/// core rule of the calculus.
pub fn corpus() -> Vec<CorpusEntry> {
    let abc = &["a", "b", "c"];
    let mut out = Vec::new();

    // membership from a hypothesis
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let seq = Sequent::new(
        vec![mem_u("x", "s")],
        vec![],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    out.push(entry(
        "mem-ur",
        ctx.clone(),
        chain(&ctx, seq, &[Rule::MemUrR { theta_idx: 0 }]),
        abc,
    ));

    // unit equality
    let ctx = ctx_of(&[]);
    let seq = Sequent::new(vec![], vec![], Rhs::Eq(ObjType::Unit, Term::UnitVal, Term::UnitVal));
    out.push(entry("eq-unit", ctx.clone(), chain(&ctx, seq, &[Rule::EqUnitR]), abc));

    // explosion
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::Bot],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    out.push(entry(
        "bot-left",
        ctx.clone(),
        chain(&ctx, seq, &[Rule::BotL { gamma_idx: 0 }]),
        abc,
    ));

    // refuted disequality
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::NeqU(var("x"), var("x"))],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    out.push(entry(
        "neq-left",
        ctx.clone(),
        chain(&ctx, seq, &[Rule::NeqL { gamma_idx: 0 }]),
        abc,
    ));

    // conjunction and disjunction on the left
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::and(
            Formula::or(Formula::Bot, Formula::NeqU(var("x"), var("x"))),
            Formula::Top,
        )],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    let mut l = Lin::new(ctx.clone(), seq);
    l.app(Rule::AndL { gamma_idx: 0 });
    let proof = l.branch(
        Rule::OrL { gamma_idx: 0 },
        vec![
            Box::new(|c, s| Lin::new(c, s).close(Rule::BotL { gamma_idx: 0 })),
            Box::new(|c, s| Lin::new(c, s).close(Rule::NeqL { gamma_idx: 0 })),
        ],
    );
    out.push(entry("and-or-left", ctx, proof, abc));

    // reflexivity at the Ur type, through a fresh superset
    let ctx = ctx_of(&[("x", u())]);
    let seq = Sequent::new(vec![], vec![], Rhs::Eq(u(), var("x"), var("x")));
    out.push(entry(
        "eq-ur-refl",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[Rule::EqUrR { fresh: "q".into() }, Rule::MemUrR { theta_idx: 0 }],
        ),
        abc,
    ));

    // reflexivity at a product type
    let ctx = ctx_of(&[("p", prod_uu())]);
    let seq = Sequent::new(vec![], vec![], Rhs::Eq(prod_uu(), var("p"), var("p")));
    let refl_u = |c: TypeContext, s: Sequent| {
        chain(
            &c,
            s,
            &[Rule::EqUrR { fresh: "q".into() }, Rule::MemUrR { theta_idx: 0 }],
        )
    };
    let proof = Lin::new(ctx.clone(), seq).branch(
        Rule::EqProdR,
        vec![Box::new(refl_u), Box::new(refl_u)],
    );
    out.push(entry("eq-prod-refl", ctx, proof, abc));

    // universal hypothesis instantiated to a refuting body
    let ctx = ctx_of(&[("x", u()), ("s", set_u()), ("t", set_u())]);
    let seq = Sequent::new(
        vec![mem_u("x", "s")],
        vec![Formula::forall("y", u(), var("s"), Formula::Bot)],
        Rhs::Mem(u(), var("x"), var("t")),
    );
    out.push(entry(
        "forall-left",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[
                Rule::ForallL {
                    gamma_idx: 0,
                    theta_idx: 0,
                },
                Rule::BotL { gamma_idx: 0 },
            ],
        ),
        abc,
    ));

    // membership via an existential witness, rewriting left-to-right
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::exists(
            "y",
            u(),
            var("s"),
            Formula::EqU(var("x"), var("y")),
        )],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    out.push(entry(
        "exists-subst-left",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[
                Rule::ExistsL {
                    gamma_idx: 0,
                    fresh: "w".into(),
                },
                Rule::EqSubst {
                    gamma_idx: 0,
                    var_side: Side::Left,
                },
                Rule::MemUrR { theta_idx: 0 },
            ],
        ),
        abc,
    ));

    // same entailment with the equation oriented the other way
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::exists(
            "y",
            u(),
            var("s"),
            Formula::EqU(var("y"), var("x")),
        )],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    out.push(entry(
        "exists-subst-right",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[
                Rule::ExistsL {
                    gamma_idx: 0,
                    fresh: "w".into(),
                },
                Rule::EqSubst {
                    gamma_idx: 0,
                    var_side: Side::Right,
                },
                Rule::MemUrR { theta_idx: 0 },
            ],
        ),
        abc,
    ));

    // contraction before splitting a disjunction
    let ctx = ctx_of(&[("x", u()), ("s", set_u())]);
    let d = Formula::or(Formula::Bot, Formula::NeqU(var("x"), var("x")));
    let seq = Sequent::new(
        vec![mem_u("x", "s")],
        vec![d],
        Rhs::Mem(u(), var("x"), var("s")),
    );
    let mut l = Lin::new(ctx.clone(), seq);
    l.app(Rule::Contraction { gamma_idx: 0 });
    let proof = l.branch(
        Rule::OrL { gamma_idx: 0 },
        vec![
            Box::new(|c, s| Lin::new(c, s).close(Rule::BotL { gamma_idx: 0 })),
            Box::new(|c, s| Lin::new(c, s).close(Rule::NeqL { gamma_idx: 0 })),
        ],
    );
    out.push(entry("contraction-or", ctx, proof, abc));

    // β-reduction of a projection redex in the goal
    let ctx = ctx_of(&[("x", u()), ("y", u()), ("s", set_u())]);
    let template = Sequent::new(
        vec![mem_u("x", "s")],
        vec![],
        Rhs::Mem(u(), var("h"), var("s")),
    );
    let seq = Sequent::new(
        vec![mem_u("x", "s")],
        vec![],
        Rhs::Mem(u(), Term::proj1(Term::pair(var("x"), var("y"))), var("s")),
    );
    out.push(entry(
        "times-beta",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[
                Rule::TimesBeta {
                    idx: 1,
                    var: "h".into(),
                    fst: var("x"),
                    snd: var("y"),
                    template: Box::new(template),
                },
                Rule::MemUrR { theta_idx: 0 },
            ],
        ),
        abc,
    ));

    // η-expansion of a product variable
    let ctx = ctx_of(&[("p", prod_uu()), ("s", ObjType::set(prod_uu()))]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::Bot],
        Rhs::Mem(prod_uu(), var("p"), var("s")),
    );
    out.push(entry(
        "times-eta",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[
                Rule::TimesEta {
                    var: "p".into(),
                    fresh_fst: "f".into(),
                    fresh_snd: "g".into(),
                },
                Rule::BotL { gamma_idx: 0 },
            ],
        ),
        abc,
    ));

    // set membership through a set-level equality
    let ctx = ctx_of(&[("t", set_u()), ("s", ObjType::set(set_u()))]);
    let seq = Sequent::new(
        vec![ThetaAtom::new(set_u(), var("t"), var("s"))],
        vec![],
        Rhs::Mem(set_u(), var("t"), var("s")),
    );
    let mut l = Lin::new(ctx.clone(), seq);
    l.app(Rule::MemSetR { theta_idx: 0 });
    let inc = |c: TypeContext, s: Sequent| {
        chain(
            &c,
            s,
            &[
                Rule::SubsetR { fresh: "z".into() },
                Rule::MemUrR { theta_idx: 1 },
            ],
        )
    };
    let proof = l.branch(Rule::EqSetR, vec![Box::new(inc), Box::new(inc)]);
    out.push(entry("mem-set-refl", ctx, proof, abc));

    // inclusion from a refuting hypothesis
    let ctx = ctx_of(&[("s", set_u()), ("t", set_u())]);
    let seq = Sequent::new(
        vec![],
        vec![Formula::Bot],
        Rhs::Sub(u(), var("s"), var("t")),
    );
    out.push(entry(
        "subset-bot",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[Rule::SubsetR { fresh: "z".into() }, Rule::BotL { gamma_idx: 0 }],
        ),
        abc,
    ));

    // inclusion through a middle set
    let ctx = ctx_of(&[("s", set_u()), ("m", set_u()), ("r", set_u())]);
    let sub = |a: &str, b: &str| {
        Formula::forall(
            "v",
            u(),
            var(a),
            Formula::exists("v2", u(), var(b), Formula::EqU(var("v"), var("v2"))),
        )
    };
    let seq = Sequent::new(
        vec![],
        vec![sub("s", "m"), sub("m", "r")],
        Rhs::Sub(u(), var("s"), var("r")),
    );
    out.push(entry(
        "inclusion-chain",
        ctx.clone(),
        chain(
            &ctx,
            seq,
            &[
                Rule::SubsetR { fresh: "z".into() },
                Rule::ForallL {
                    gamma_idx: 0,
                    theta_idx: 0,
                },
                Rule::ExistsL {
                    gamma_idx: 0,
                    fresh: "w".into(),
                },
                Rule::ForallL {
                    gamma_idx: 1,
                    theta_idx: 1,
                },
                Rule::ExistsL {
                    gamma_idx: 1,
                    fresh: "w2".into(),
                },
                Rule::EqSubst {
                    gamma_idx: 0,
                    var_side: Side::Right,
                },
                Rule::EqSubst {
                    gamma_idx: 0,
                    var_side: Side::Right,
                },
                Rule::MemUrR { theta_idx: 2 },
            ],
        ),
        abc,
    ));

    // membership bounded on both sides
    let ctx = ctx_of(&[("x", u()), ("s", set_u()), ("r", set_u())]);
    let seq = Sequent::new(
        vec![mem_u("x", "s"), mem_u("x", "r")],
        vec![],
        Rhs::Mem(u(), var("x"), var("r")),
    );
    out.push(entry(
        "mem-two-sided",
        ctx.clone(),
        chain(&ctx, seq, &[Rule::MemUrR { theta_idx: 1 }]),
        abc,
    ));

    // the large fixtures, at universes their contexts can enumerate
    out.push(entry(
        "or-chain",
        {
            let mut c = ctx_of(&[("x", u()), ("o", u())]);
            c.insert("o'".into(), u());
            c
        },
        or_chain_problem(3).proof,
        abc,
    ));
    out.push(entry(
        "distinguishers",
        {
            let mut c = distinguishers_ctx();
            c.insert("o'".into(), set_u());
            c
        },
        distinguishers_proof(),
        &["a", "b"],
    ));
    out.push(entry(
        "grouping",
        {
            let mut c = grouping_ctx();
            c.insert("o'".into(), ObjType::set(prod_us()));
            c
        },
        grouping_proof(),
        &["a"],
    ));
    out
}

/// A proof that must be rejected: the `⊆-R` eigenvariable collides with a
/// context variable.
pub fn bad_freshness_proof() -> (TypeContext, ProofNode) {
    let ctx = ctx_of(&[("s", set_u()), ("t", set_u())]);
    let concl = Sequent::new(
        vec![],
        vec![Formula::Bot],
        Rhs::Sub(u(), var("s"), var("t")),
    );
    let premise = Sequent::new(
        vec![ThetaAtom::new(u(), var("s"), var("s"))],
        vec![Formula::Bot],
        Rhs::Mem(u(), var("s"), var("t")),
    );
    let node = ProofNode::new(
        Rule::SubsetR { fresh: "s".into() },
        concl,
        vec![ProofNode::new(Rule::BotL { gamma_idx: 0 }, premise, vec![])],
    );
    (ctx, node)
}

// ---------------------------------------------------------------------------
// sampling helpers

/// A flat relation over at most `atoms` Ur-elements with at most `max_pairs`
/// pairs.
pub fn sample_relation<R: Rng>(atoms: &[String], max_pairs: usize, rng: &mut R) -> Value {
    let n = rng.gen_range(0..=max_pairs);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let a = &atoms[rng.gen_range(0..atoms.len())];
        let b = &atoms[rng.gen_range(0..atoms.len())];
        pairs.push(Value::PairV(
            Box::new(Value::Atom(a.clone())),
            Box::new(Value::Atom(b.clone())),
        ));
    }
    Value::set(pairs)
}
