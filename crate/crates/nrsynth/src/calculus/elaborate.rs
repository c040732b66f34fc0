//! Elimination of admissible rules.
//!
//! [`elaborate_admissible`] rewrites a checked proof into one using only
//! core rules, preserving the root sequent exactly.  Each admissible rule
//! has a local compilation:
//!
//! * weakening is pushed through the premise subtree (the extra formula is
//!   inserted at every node, with eigenvariables renamed out of its way);
//! * the axiom rule and reflexivity are replaced by type-directed
//!   derivations built from the right rules plus `∃`-L / `∀`-L / `=`-subst;
//! * membership-left and inclusion-left unfold through `∃`-L and `=`-subst
//!   (this needs the equation to sit at the Ur-element type; other element
//!   types have no core equality-elimination rule and are reported);
//! * implication-left becomes `∨`-L, with the refuted branch discharged by
//!   a contradiction derivation recursing through the hypothesis and its
//!   negation side by side.

use std::collections::BTreeSet;

use crate::kernel::{fresh_name, Formula, ObjType, Term, TypeContext};

use super::{
    check_proof, rule_premises, substitute_in_proof, CheckError, CheckedProof, ProofNode, Rhs,
    Rule, Sequent, Side,
};

fn beta_eq(a: &Term, b: &Term) -> bool {
    super::beta_norm_term(a) == super::beta_norm_term(b)
}

fn fresh_for(ctx: &TypeContext, seq: &Sequent, base: &str) -> String {
    let mut avoid = seq.free_vars();
    avoid.extend(ctx.keys().cloned());
    fresh_name(base, &avoid)
}

fn internal(detail: impl Into<String>) -> CheckError {
    CheckError::Elaboration {
        rule: "internal",
        detail: detail.into(),
    }
}

/// Build a node for `rule` at `concl`, handing the recomputed premise
/// sequents (with their contexts) to `build` for the subderivations.
fn by_rule(
    ctx: &TypeContext,
    concl: Sequent,
    rule: Rule,
    build: impl FnOnce(&[(Sequent, TypeContext)]) -> Result<Vec<ProofNode>, CheckError>,
) -> Result<ProofNode, CheckError> {
    let prems = rule_premises(ctx, &concl, &rule)?;
    let premises = build(&prems)?;
    Ok(ProofNode::new(rule, concl, premises))
}

fn subformula_at<'a>(f: &'a Formula, path: &[u8]) -> Result<&'a Formula, CheckError> {
    let mut cur = f;
    for k in path {
        let Formula::And(a, b) = cur else {
            return Err(internal("conjunction path into a non-conjunction"));
        };
        cur = if *k == 1 { a } else { b };
    }
    Ok(cur)
}

/// Apply `∧`-L along `path` inside `Γ[gpos]`, then continue with the
/// exposed conjunct's new position.
fn expose_and(
    ctx: &TypeContext,
    seq: Sequent,
    gpos: usize,
    path: &[u8],
    then: &mut dyn FnMut(&TypeContext, Sequent, usize) -> Result<ProofNode, CheckError>,
) -> Result<ProofNode, CheckError> {
    if path.is_empty() {
        return then(ctx, seq, gpos);
    }
    let rule = Rule::AndL { gamma_idx: gpos };
    let prems = rule_premises(ctx, &seq, &rule)?;
    let gpos2 = gpos + (path[0] as usize - 1);
    let sub = expose_and(ctx, prems[0].0.clone(), gpos2, &path[1..], then)?;
    Ok(ProofNode::new(rule, seq, vec![sub]))
}

/// Which side of an Ur-element equation can be substituted away.
fn subst_side(rule: &'static str, a: &Term, b: &Term) -> Result<Side, CheckError> {
    // Prefer rewriting the right-hand variable: membership expansions put the
    // existential witness there, and eliminating the witness (rather than the
    // term it names) keeps the rewrite local to its own partition side.
    match (a, b) {
        (_, Term::Var(v)) if !a.free_vars().contains(v) => Ok(Side::Right),
        (Term::Var(v), _) if !b.free_vars().contains(v) => Ok(Side::Left),
        _ => Err(CheckError::Elaboration {
            rule,
            detail: format!("cannot orient the equation `{a} = {b}` onto a variable"),
        }),
    }
}

/// Prove `Θ; Γ ⊢ t =_T u` where the subformula of `Γ[gpos]` at `path` is
/// the expansion of the same equation (in either orientation).
fn prove_eq_goal(
    ctx: &TypeContext,
    seq: Sequent,
    gpos: usize,
    path: &[u8],
) -> Result<ProofNode, CheckError> {
    let Rhs::Eq(ty, a, b) = seq.rhs.clone() else {
        return Err(internal("prove_eq_goal without an equality goal"));
    };
    match ty {
        ObjType::Unit => by_rule(ctx, seq, Rule::EqUnitR, |_| Ok(vec![])),
        ObjType::Prod(..) => by_rule(ctx, seq, Rule::EqProdR, |prems| {
            prems
                .iter()
                .enumerate()
                .map(|(k, (p, c))| {
                    let mut path2 = path.to_vec();
                    path2.push(k as u8 + 1);
                    prove_eq_goal(c, p.clone(), gpos, &path2)
                })
                .collect()
        }),
        ObjType::SetOf(_) => by_rule(ctx, seq, Rule::EqSetR, |prems| {
            prems
                .iter()
                .map(|(p, c)| prove_sub_goal(c, p.clone(), gpos, path))
                .collect()
        }),
        ObjType::U => {
            let z = fresh_for(ctx, &seq, "z");
            by_rule(ctx, seq, Rule::EqUrR { fresh: z }, |prems| {
                let (p0, ctx0) = &prems[0];
                let atom_idx = p0.theta.len() - 1;
                let sub = if beta_eq(&a, &b) {
                    ProofNode::new(Rule::MemUrR { theta_idx: atom_idx }, p0.clone(), vec![])
                } else {
                    expose_and(ctx0, p0.clone(), gpos, path, &mut |ctx2, s2, pos| {
                        let Formula::EqU(s1, s2t) = &s2.gamma[pos] else {
                            return Err(internal("expected an Ur-element equation hypothesis"));
                        };
                        let side = subst_side("axiom", s1, s2t)?;
                        let rule = Rule::EqSubst {
                            gamma_idx: pos,
                            var_side: side,
                        };
                        let prems2 = rule_premises(ctx2, &s2, &rule)?;
                        let leaf = ProofNode::new(
                            Rule::MemUrR { theta_idx: atom_idx },
                            prems2[0].0.clone(),
                            vec![],
                        );
                        Ok(ProofNode::new(rule, s2, vec![leaf]))
                    })?
                };
                Ok(vec![sub])
            })
        }
    }
}

/// Prove `Θ; Γ ⊢ t ⊆ u` where the subformula of `Γ[gpos]` at `path` is
/// either the expansion of `t ⊆ u` itself, or the conjunction of the two
/// inclusion expansions from a set-equality (the matching conjunct is
/// selected by its quantifier bound).
fn prove_sub_goal(
    ctx: &TypeContext,
    seq: Sequent,
    gpos: usize,
    path: &[u8],
) -> Result<ProofNode, CheckError> {
    let Rhs::Sub(_, l, _) = seq.rhs.clone() else {
        return Err(internal("prove_sub_goal without an inclusion goal"));
    };
    let mut path2 = path.to_vec();
    match subformula_at(&seq.gamma[gpos], path)? {
        Formula::ForallIn(..) => {}
        Formula::And(f1, _) => {
            let bound_of = |f: &Formula| match f {
                Formula::ForallIn(_, _, bound, _) => Some(bound.clone()),
                _ => None,
            };
            let pick = match bound_of(f1) {
                Some(bound) if beta_eq(&bound, &l) => 1,
                _ => 2,
            };
            path2.push(pick);
        }
        _ => return Err(internal("expected an inclusion expansion hypothesis")),
    }
    let w = fresh_for(ctx, &seq, "w");
    by_rule(ctx, seq, Rule::SubsetR { fresh: w }, |prems| {
        let (p0, ctx0) = &prems[0];
        let atom_idx = p0.theta.len() - 1;
        let sub = expose_and(ctx0, p0.clone(), gpos, &path2, &mut |ctx2, s2, pos| {
            let rule = Rule::ForallL {
                gamma_idx: pos,
                theta_idx: atom_idx,
            };
            let prems2 = rule_premises(ctx2, &s2, &rule)?;
            let sub = prove_mem_goal(&prems2[0].1, prems2[0].0.clone(), pos)?;
            Ok(ProofNode::new(rule, s2, vec![sub]))
        })?;
        Ok(vec![sub])
    })
}

/// Prove `Θ; Γ ⊢ t ∈_T u` where `Γ[gpos]` is the expansion of the goal.
fn prove_mem_goal(ctx: &TypeContext, seq: Sequent, gpos: usize) -> Result<ProofNode, CheckError> {
    if !matches!(&seq.gamma[gpos], Formula::ExistsIn(..)) {
        return Err(internal("expected a membership expansion hypothesis"));
    }
    let w = fresh_for(ctx, &seq, "w");
    by_rule(
        ctx,
        seq,
        Rule::ExistsL {
            gamma_idx: gpos,
            fresh: w,
        },
        |prems| {
            let (p0, ctx0) = &prems[0];
            let atom_idx = p0.theta.len() - 1;
            let node = by_rule(
                ctx0,
                p0.clone(),
                Rule::MemSetR {
                    theta_idx: atom_idx,
                },
                |prems2| {
                    let (q, ctxq) = &prems2[0];
                    Ok(vec![prove_eq_goal(ctxq, q.clone(), gpos, &[])?])
                },
            )?;
            Ok(vec![node])
        },
    )
}

/// Prove `Θ; Γ ⊢ t =_T u` for β-equal `t`, `u`, by recursion on `T`.
fn prove_refl(ctx: &TypeContext, seq: Sequent) -> Result<ProofNode, CheckError> {
    let Rhs::Eq(ty, _, _) = seq.rhs.clone() else {
        return Err(internal("prove_refl without an equality goal"));
    };
    match ty {
        ObjType::Unit => by_rule(ctx, seq, Rule::EqUnitR, |_| Ok(vec![])),
        ObjType::U => {
            let z = fresh_for(ctx, &seq, "z");
            by_rule(ctx, seq, Rule::EqUrR { fresh: z }, |prems| {
                let (p0, _) = &prems[0];
                Ok(vec![ProofNode::new(
                    Rule::MemUrR {
                        theta_idx: p0.theta.len() - 1,
                    },
                    p0.clone(),
                    vec![],
                )])
            })
        }
        ObjType::Prod(..) => by_rule(ctx, seq, Rule::EqProdR, |prems| {
            prems
                .iter()
                .map(|(p, c)| prove_refl(c, p.clone()))
                .collect()
        }),
        ObjType::SetOf(_) => by_rule(ctx, seq, Rule::EqSetR, |prems| {
            prems
                .iter()
                .map(|(p, c)| {
                    let w = fresh_for(c, p, "w");
                    by_rule(c, p.clone(), Rule::SubsetR { fresh: w }, |prems2| {
                        let (q, ctxq) = &prems2[0];
                        let node = by_rule(
                            ctxq,
                            q.clone(),
                            Rule::MemSetR {
                                theta_idx: q.theta.len() - 1,
                            },
                            |prems3| {
                                let (r0, ctxr) = &prems3[0];
                                Ok(vec![prove_refl(ctxr, r0.clone())?])
                            },
                        )?;
                        Ok(vec![node])
                    })
                })
                .collect()
        }),
    }
}

/// Derive a membership goal from the directly contradictory hypotheses
/// `Γ[pos] = φ` and `Γ[neg] = ¬φ` (up to α), recursing through the two
/// formulas in lockstep.
fn prove_contradiction(
    ctx: &TypeContext,
    seq: Sequent,
    pos: usize,
    neg: usize,
) -> Result<ProofNode, CheckError> {
    match seq.gamma[pos].clone() {
        Formula::Bot => by_rule(ctx, seq, Rule::BotL { gamma_idx: pos }, |_| Ok(vec![])),
        Formula::Top => by_rule(ctx, seq, Rule::BotL { gamma_idx: neg }, |_| Ok(vec![])),
        Formula::NeqU(..) => prove_contradiction(ctx, seq, neg, pos),
        Formula::EqU(a, b) => {
            if beta_eq(&a, &b) {
                by_rule(ctx, seq, Rule::NeqL { gamma_idx: neg }, |_| Ok(vec![]))
            } else {
                let side = subst_side("implies-l", &a, &b)?;
                let rule = Rule::EqSubst {
                    gamma_idx: pos,
                    var_side: side,
                };
                let neg2 = if neg > pos { neg - 1 } else { neg };
                by_rule(ctx, seq, rule, |prems| {
                    let (q, ctxq) = &prems[0];
                    Ok(vec![by_rule(
                        ctxq,
                        q.clone(),
                        Rule::NeqL { gamma_idx: neg2 },
                        |_| Ok(vec![]),
                    )?])
                })
            }
        }
        Formula::And(..) => {
            let neg2 = if neg > pos { neg + 1 } else { neg };
            by_rule(ctx, seq, Rule::AndL { gamma_idx: pos }, |prems| {
                let (p0, ctx0) = &prems[0];
                let node = by_rule(ctx0, p0.clone(), Rule::OrL { gamma_idx: neg2 }, |prems2| {
                    let c1 = prove_contradiction(&prems2[0].1, prems2[0].0.clone(), pos, neg2)?;
                    let c2 =
                        prove_contradiction(&prems2[1].1, prems2[1].0.clone(), pos + 1, neg2)?;
                    Ok(vec![c1, c2])
                })?;
                Ok(vec![node])
            })
        }
        Formula::Or(..) => {
            let pos2 = if pos > neg { pos + 1 } else { pos };
            by_rule(ctx, seq, Rule::AndL { gamma_idx: neg }, |prems| {
                let (p0, ctx0) = &prems[0];
                let node = by_rule(ctx0, p0.clone(), Rule::OrL { gamma_idx: pos2 }, |prems2| {
                    let c1 = prove_contradiction(&prems2[0].1, prems2[0].0.clone(), pos2, neg)?;
                    let c2 =
                        prove_contradiction(&prems2[1].1, prems2[1].0.clone(), pos2, neg + 1)?;
                    Ok(vec![c1, c2])
                })?;
                Ok(vec![node])
            })
        }
        Formula::ExistsIn(..) => {
            let w = fresh_for(ctx, &seq, "w");
            by_rule(
                ctx,
                seq,
                Rule::ExistsL {
                    gamma_idx: pos,
                    fresh: w,
                },
                |prems| {
                    let (p0, ctx0) = &prems[0];
                    let rule = Rule::ForallL {
                        gamma_idx: neg,
                        theta_idx: p0.theta.len() - 1,
                    };
                    let node = by_rule(ctx0, p0.clone(), rule, |prems2| {
                        Ok(vec![prove_contradiction(
                            &prems2[0].1,
                            prems2[0].0.clone(),
                            pos,
                            neg,
                        )?])
                    })?;
                    Ok(vec![node])
                },
            )
        }
        Formula::ForallIn(..) => {
            let w = fresh_for(ctx, &seq, "w");
            by_rule(
                ctx,
                seq,
                Rule::ExistsL {
                    gamma_idx: neg,
                    fresh: w,
                },
                |prems| {
                    let (p0, ctx0) = &prems[0];
                    let rule = Rule::ForallL {
                        gamma_idx: pos,
                        theta_idx: p0.theta.len() - 1,
                    };
                    let node = by_rule(ctx0, p0.clone(), rule, |prems2| {
                        Ok(vec![prove_contradiction(
                            &prems2[0].1,
                            prems2[0].0.clone(),
                            pos,
                            neg,
                        )?])
                    })?;
                    Ok(vec![node])
                },
            )
        }
    }
}

/// Rename any eigenvariable in `avoid` throughout the subtree.
fn freshen_eigenvars(node: &ProofNode, avoid: &BTreeSet<String>) -> ProofNode {
    let mut node = node.clone();
    for old in super::rule_eigenvars(&node.rule) {
        if !avoid.contains(&old) {
            continue;
        }
        let mut all = node.all_vars();
        all.extend(avoid.iter().cloned());
        let new = fresh_name(&old, &all);
        for p in node.premises.iter_mut() {
            *p = substitute_in_proof(p, &old, &Term::var(new.clone()));
        }
        super::rename_rule_eigenvar(&mut node.rule, &old, &new);
    }
    node.premises = node
        .premises
        .iter()
        .map(|p| freshen_eigenvars(p, avoid))
        .collect();
    node
}

/// Insert `phi` into `Γ` at `pos` throughout a core-only subtree, keeping
/// the derivation valid (the formula is never selected by any rule).
fn insert_formula(node: &ProofNode, pos: usize, phi: &Formula) -> Result<ProofNode, CheckError> {
    let shift = |g: usize| if g >= pos { g + 1 } else { g };
    let mut concl = node.conclusion.clone();
    concl.gamma.insert(pos, phi.clone());
    let same = |node: &ProofNode, rule: Rule, concl: Sequent| -> Result<ProofNode, CheckError> {
        let premises = node
            .premises
            .iter()
            .map(|p| insert_formula(p, pos, phi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProofNode::new(rule, concl, premises))
    };
    match &node.rule {
        Rule::Contraction { gamma_idx } => same(
            node,
            Rule::Contraction {
                gamma_idx: shift(*gamma_idx),
            },
            concl,
        ),
        Rule::MemUrR { .. }
        | Rule::EqSetR
        | Rule::EqProdR
        | Rule::EqUnitR
        | Rule::EqUrR { .. }
        | Rule::SubsetR { .. }
        | Rule::MemSetR { .. } => same(node, node.rule.clone(), concl),
        Rule::BotL { gamma_idx } => Ok(ProofNode::new(
            Rule::BotL {
                gamma_idx: shift(*gamma_idx),
            },
            concl,
            vec![],
        )),
        Rule::NeqL { gamma_idx } => Ok(ProofNode::new(
            Rule::NeqL {
                gamma_idx: shift(*gamma_idx),
            },
            concl,
            vec![],
        )),
        Rule::AndL { gamma_idx } => {
            let pos2 = if pos > *gamma_idx { pos + 1 } else { pos };
            let premises = node
                .premises
                .iter()
                .map(|p| insert_formula(p, pos2, phi))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProofNode::new(
                Rule::AndL {
                    gamma_idx: shift(*gamma_idx),
                },
                concl,
                premises,
            ))
        }
        Rule::OrL { gamma_idx } => same(
            node,
            Rule::OrL {
                gamma_idx: shift(*gamma_idx),
            },
            concl,
        ),
        Rule::ForallL {
            gamma_idx,
            theta_idx,
        } => same(
            node,
            Rule::ForallL {
                gamma_idx: shift(*gamma_idx),
                theta_idx: *theta_idx,
            },
            concl,
        ),
        Rule::ExistsL { gamma_idx, fresh } => same(
            node,
            Rule::ExistsL {
                gamma_idx: shift(*gamma_idx),
                fresh: fresh.clone(),
            },
            concl,
        ),
        Rule::EqSubst {
            gamma_idx,
            var_side,
        } => {
            let Formula::EqU(a, b) = &node.conclusion.gamma[*gamma_idx] else {
                return Err(internal("eq-subst node without an equation"));
            };
            let (v, repl) = match var_side {
                Side::Left => (a, b),
                Side::Right => (b, a),
            };
            let Term::Var(v) = v else {
                return Err(internal("eq-subst node without a variable side"));
            };
            let phi2 = phi.substitute(v, repl);
            let pos2 = if pos > *gamma_idx { pos - 1 } else { pos };
            let premises = node
                .premises
                .iter()
                .map(|p| insert_formula(p, pos2, &phi2))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProofNode::new(
                Rule::EqSubst {
                    gamma_idx: shift(*gamma_idx),
                    var_side: *var_side,
                },
                concl,
                premises,
            ))
        }
        Rule::TimesBeta {
            idx,
            var,
            fst,
            snd,
            template,
        } => {
            // Rename the hole variable away from the inserted formula.
            let (var, template) = if phi.free_vars().contains(var) {
                let mut avoid = template.free_vars();
                avoid.extend(phi.free_vars());
                let var2 = fresh_name(var, &avoid);
                let t2 = template.substitute(var, &Term::var(var2.clone()));
                (var2, Box::new(t2))
            } else {
                (var.clone(), template.clone())
            };
            let mut template2 = (*template).clone();
            template2.gamma.insert(pos, phi.clone());
            let premises = node
                .premises
                .iter()
                .map(|p| insert_formula(p, pos, phi))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProofNode::new(
                Rule::TimesBeta {
                    idx: *idx,
                    var,
                    fst: fst.clone(),
                    snd: snd.clone(),
                    template: Box::new(template2),
                },
                concl,
                premises,
            ))
        }
        Rule::TimesEta {
            var,
            fresh_fst,
            fresh_snd,
        } => {
            let pair = Term::pair(Term::var(fresh_fst), Term::var(fresh_snd));
            let phi2 = phi.substitute(var, &pair);
            let premises = node
                .premises
                .iter()
                .map(|p| insert_formula(p, pos, &phi2))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ProofNode::new(node.rule.clone(), concl, premises))
        }
        _ => Err(internal(
            "weakening pushed into a subtree still containing admissible rules",
        )),
    }
}

fn elab(ctx: &TypeContext, node: &ProofNode) -> Result<ProofNode, CheckError> {
    let prem_info = rule_premises(ctx, &node.conclusion, &node.rule)?;
    let mut kids = Vec::with_capacity(node.premises.len());
    for ((_, ctx2), p) in prem_info.iter().zip(&node.premises) {
        kids.push(elab(ctx2, p)?);
    }
    let concl = node.conclusion.clone();
    match &node.rule {
        Rule::Weaken { gamma_idx } => {
            let phi = concl.gamma[*gamma_idx].clone();
            let child = freshen_eigenvars(&kids.remove(0), &phi.free_vars());
            let mut out = insert_formula(&child, *gamma_idx, &phi)?;
            out.conclusion = concl;
            Ok(out)
        }
        Rule::Axiom => {
            let mut out = match &concl.rhs {
                Rhs::Mem(..) => prove_mem_goal(ctx, concl.clone(), 0)?,
                Rhs::Eq(..) => prove_eq_goal(ctx, concl.clone(), 0, &[])?,
                Rhs::Sub(..) => prove_sub_goal(ctx, concl.clone(), 0, &[])?,
            };
            out.conclusion = concl;
            Ok(out)
        }
        Rule::EqReflR => prove_refl(ctx, concl),
        Rule::MemL {
            gamma_idx,
            elem_ty,
            member: _,
            set: _,
        } => {
            if *elem_ty != ObjType::U {
                return Err(CheckError::Elaboration {
                    rule: "mem-l",
                    detail: format!(
                        "no core equality elimination at element type {elem_ty}; \
                         only the Ur-element type is supported"
                    ),
                });
            }
            let child = kids.remove(0);
            let w = fresh_for(ctx, &concl, "w");
            by_rule(
                ctx,
                concl,
                Rule::ExistsL {
                    gamma_idx: *gamma_idx,
                    fresh: w,
                },
                |prems| {
                    let (p0, ctx0) = &prems[0];
                    let rule = Rule::EqSubst {
                        gamma_idx: *gamma_idx,
                        var_side: Side::Right,
                    };
                    rule_premises(ctx0, p0, &rule)?;
                    Ok(vec![ProofNode::new(rule, p0.clone(), vec![child])])
                },
            )
        }
        Rule::SubL {
            theta_idx,
            gamma_idx,
            superset: _,
        } => {
            if concl.theta[*theta_idx].elem_ty != ObjType::U {
                return Err(CheckError::Elaboration {
                    rule: "sub-l",
                    detail: format!(
                        "no core equality elimination at element type {}; \
                         only the Ur-element type is supported",
                        concl.theta[*theta_idx].elem_ty
                    ),
                });
            }
            let child = kids.remove(0);
            let gi = *gamma_idx;
            by_rule(
                ctx,
                concl,
                Rule::ForallL {
                    gamma_idx: gi,
                    theta_idx: *theta_idx,
                },
                |prems| {
                    let (p0, ctx0) = &prems[0];
                    let w = fresh_for(ctx0, p0, "w");
                    let node = by_rule(
                        ctx0,
                        p0.clone(),
                        Rule::ExistsL {
                            gamma_idx: gi,
                            fresh: w,
                        },
                        |prems2| {
                            let (q, ctxq) = &prems2[0];
                            let rule = Rule::EqSubst {
                                gamma_idx: gi,
                                var_side: Side::Right,
                            };
                            rule_premises(ctxq, q, &rule)?;
                            Ok(vec![ProofNode::new(rule, q.clone(), vec![child])])
                        },
                    )?;
                    Ok(vec![node])
                },
            )
        }
        Rule::ImpliesL {
            gamma_idx,
            hyp_idx,
        } => {
            let child = kids.remove(0);
            let (gi, hi) = (*gamma_idx, *hyp_idx);
            by_rule(ctx, concl, Rule::OrL { gamma_idx: gi }, |prems| {
                let refuted = prove_contradiction(&prems[0].1, prems[0].0.clone(), hi, gi)?;
                Ok(vec![refuted, child])
            })
        }
        _ => Ok(ProofNode::new(node.rule.clone(), concl, kids)),
    }
}

/// Compile every admissible rule in a checked proof into core rules.  The
/// root sequent is preserved exactly; the result is re-checked and its
/// size is asserted against the polynomial budget `8·|p|·max-sequent-size`.
pub fn elaborate_admissible(proof: &CheckedProof) -> Result<CheckedProof, CheckError> {
    if proof.core_only {
        return Ok(proof.clone());
    }
    let root = elab(&proof.ctx, &proof.root)?;
    assert_eq!(
        root.conclusion, proof.root.conclusion,
        "elaboration must preserve the root sequent exactly"
    );
    let out = check_proof(&proof.ctx, &root)?;
    assert!(
        out.root.is_core_only(),
        "elaboration left an admissible rule behind"
    );
    let budget = 8 * proof.nodes * proof.max_sequent_size;
    assert!(
        out.nodes <= budget,
        "elaborated proof has {} nodes, exceeding the budget {budget}",
        out.nodes
    );
    Ok(out)
}
