//! S-expression surface syntax for every artifact the tools read and write:
//! formulas (`.d0`), NRC expressions (`.nrc`), proofs (`.proof`), synthesis
//! problems (`.prob`), and the JSON codec for values (`.json`).
//!
//! The grammar is deliberately dull: atoms are whitespace-delimited symbols,
//! lists are parenthesized, `;` starts a line comment.  Every parser reports
//! the line and column of the offending token, and printing followed by
//! parsing is the identity on all of these types (see the round-trip
//! properties at the bottom).

use std::fmt;

use thiserror::Error;

use std::collections::BTreeMap;

use crate::calculus::{ProofNode, Rhs, Rule, Sequent, Side, ThetaAtom};
use crate::interp::{FoFormula, FoTerm, Interp, OutSpec, SortCode};
use crate::kernel::{Formula, ObjType, Term, TypeContext};
use crate::nrc::NrcExpr;
use crate::values::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn at(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

/// A symbol or a list, remembering where it started.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SexpKind {
    Sym(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.line, self.col, msg)
    }

    fn sym(&self) -> Result<&str, ParseError> {
        match &self.kind {
            SexpKind::Sym(s) => Ok(s),
            SexpKind::List(_) => Err(self.err("expected a symbol, found a list")),
        }
    }

    fn list(&self) -> Result<&[Sexp], ParseError> {
        match &self.kind {
            SexpKind::List(items) => Ok(items),
            SexpKind::Sym(s) => Err(self.err(format!("expected a list, found `{s}`"))),
        }
    }

    /// A list headed by `tag` with exactly `arity` arguments.
    fn tagged(&self, tag: &str, arity: usize) -> Result<&[Sexp], ParseError> {
        let items = self.list()?;
        match items.first() {
            Some(head) if head.sym().map(|s| s == tag).unwrap_or(false) => {
                if items.len() != arity + 1 {
                    return Err(self.err(format!(
                        "`{tag}` takes {arity} argument(s), found {}",
                        items.len() - 1
                    )));
                }
                Ok(&items[1..])
            }
            Some(head) => Err(head.err(format!("expected `{tag}`"))),
            None => Err(self.err(format!("expected `({tag} ...)`, found `()`"))),
        }
    }

    fn usize_val(&self) -> Result<usize, ParseError> {
        self.sym()?
            .parse()
            .map_err(|_| self.err("expected a number"))
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SexpKind::Sym(s) => write!(f, "{s}"),
            SexpKind::List(items) => {
                write!(f, "(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{item}")?;
                }
                write!(f, ")")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// tokenizer and reader

#[derive(Debug)]
struct Token {
    text: TokenKind,
    line: usize,
    col: usize,
}

#[derive(Debug, PartialEq)]
enum TokenKind {
    LParen,
    RParen,
    Sym(String),
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let (tl, tc) = (line, col);
        match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                for c2 in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => out.push(Token {
                text: TokenKind::LParen,
                line: tl,
                col: tc,
            }),
            ')' => out.push(Token {
                text: TokenKind::RParen,
                line: tl,
                col: tc,
            }),
            c => {
                let mut sym = String::from(c);
                while let Some(&c2) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        break;
                    }
                    sym.push(c2);
                    chars.next();
                    col += 1;
                }
                out.push(Token {
                    text: TokenKind::Sym(sym),
                    line: tl,
                    col: tc,
                });
            }
        }
        col += 1;
    }
    out
}

fn read(tokens: &[Token], pos: &mut usize) -> Result<Sexp, ParseError> {
    let Some(tok) = tokens.get(*pos) else {
        let (l, c) = tokens
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        return Err(ParseError::at(l, c, "unexpected end of input"));
    };
    *pos += 1;
    match &tok.text {
        TokenKind::Sym(s) => Ok(Sexp {
            kind: SexpKind::Sym(s.clone()),
            line: tok.line,
            col: tok.col,
        }),
        TokenKind::RParen => Err(ParseError::at(tok.line, tok.col, "unbalanced `)`")),
        TokenKind::LParen => {
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(t) if t.text == TokenKind::RParen => {
                        *pos += 1;
                        return Ok(Sexp {
                            kind: SexpKind::List(items),
                            line: tok.line,
                            col: tok.col,
                        });
                    }
                    Some(_) => items.push(read(tokens, pos)?),
                    None => {
                        return Err(ParseError::at(
                            tok.line,
                            tok.col,
                            "unclosed `(`".to_string(),
                        ))
                    }
                }
            }
        }
    }
}

/// Parse exactly one datum.
pub fn parse_sexp(text: &str) -> Result<Sexp, ParseError> {
    let tokens = tokenize(text);
    let mut pos = 0;
    let s = read(&tokens, &mut pos)?;
    if let Some(extra) = tokens.get(pos) {
        return Err(ParseError::at(
            extra.line,
            extra.col,
            "trailing input after the first expression",
        ));
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// types, terms, formulas

pub fn parse_type(s: &Sexp) -> Result<ObjType, ParseError> {
    match &s.kind {
        SexpKind::Sym(name) => match name.as_str() {
            "U" | "ur" => Ok(ObjType::U),
            "unit" => Ok(ObjType::Unit),
            other => Err(s.err(format!("unknown type `{other}`"))),
        },
        SexpKind::List(items) => match items.first().map(|h| h.sym()).transpose()? {
            Some("prod") => {
                let args = s.tagged("prod", 2)?;
                Ok(ObjType::prod(parse_type(&args[0])?, parse_type(&args[1])?))
            }
            Some("set") => {
                let args = s.tagged("set", 1)?;
                Ok(ObjType::set(parse_type(&args[0])?))
            }
            _ => Err(s.err("expected a type")),
        },
    }
}

pub fn parse_term(s: &Sexp) -> Result<Term, ParseError> {
    match &s.kind {
        SexpKind::Sym(name) => Ok(Term::var(name.clone())),
        SexpKind::List(items) => match items.first().map(|h| h.sym()).transpose()? {
            None => Ok(Term::UnitVal),
            Some("unit") => {
                s.tagged("unit", 0)?;
                Ok(Term::UnitVal)
            }
            Some("pair") => {
                let args = s.tagged("pair", 2)?;
                Ok(Term::pair(parse_term(&args[0])?, parse_term(&args[1])?))
            }
            Some("p1") => Ok(Term::proj1(parse_term(&s.tagged("p1", 1)?[0])?)),
            Some("p2") => Ok(Term::proj2(parse_term(&s.tagged("p2", 1)?[0])?)),
            Some(other) => Err(s.err(format!("unknown term constructor `{other}`"))),
        },
    }
}

pub fn print_term(t: &Term) -> String {
    match t {
        Term::Var(x) => x.clone(),
        Term::UnitVal => "(unit)".into(),
        Term::Pair(a, b) => format!("(pair {} {})", print_term(a), print_term(b)),
        Term::Proj1(a) => format!("(p1 {})", print_term(a)),
        Term::Proj2(a) => format!("(p2 {})", print_term(a)),
    }
}

pub fn parse_formula(s: &Sexp) -> Result<Formula, ParseError> {
    match &s.kind {
        SexpKind::Sym(name) => match name.as_str() {
            "top" => Ok(Formula::Top),
            "bot" => Ok(Formula::Bot),
            other => Err(s.err(format!("unknown formula `{other}`"))),
        },
        SexpKind::List(_) => {
            let head = s.list()?.first().ok_or_else(|| s.err("empty formula"))?;
            match head.sym()? {
                "=" => {
                    let args = s.tagged("=", 2)?;
                    Ok(Formula::EqU(parse_term(&args[0])?, parse_term(&args[1])?))
                }
                "!=" => {
                    let args = s.tagged("!=", 2)?;
                    Ok(Formula::NeqU(parse_term(&args[0])?, parse_term(&args[1])?))
                }
                "and" => {
                    let args = s.tagged("and", 2)?;
                    Ok(Formula::and(
                        parse_formula(&args[0])?,
                        parse_formula(&args[1])?,
                    ))
                }
                "or" => {
                    let args = s.tagged("or", 2)?;
                    Ok(Formula::or(
                        parse_formula(&args[0])?,
                        parse_formula(&args[1])?,
                    ))
                }
                q @ ("forall" | "exists") => {
                    let args = s.tagged(q, 4)?;
                    let x = args[0].sym()?.to_string();
                    let ty = parse_type(&args[1])?;
                    let bound = parse_term(&args[2])?;
                    let body = parse_formula(&args[3])?;
                    Ok(if q == "forall" {
                        Formula::forall(x, ty, bound, body)
                    } else {
                        Formula::exists(x, ty, bound, body)
                    })
                }
                other => Err(s.err(format!("unknown formula connective `{other}`"))),
            }
        }
    }
}

pub fn print_formula(f: &Formula) -> String {
    match f {
        Formula::EqU(a, b) => format!("(= {} {})", print_term(a), print_term(b)),
        Formula::NeqU(a, b) => format!("(!= {} {})", print_term(a), print_term(b)),
        Formula::Top => "top".into(),
        Formula::Bot => "bot".into(),
        Formula::And(a, b) => format!("(and {} {})", print_formula(a), print_formula(b)),
        Formula::Or(a, b) => format!("(or {} {})", print_formula(a), print_formula(b)),
        Formula::ForallIn(x, ty, t, body) => {
            format!("(forall {x} {ty} {} {})", print_term(t), print_formula(body))
        }
        Formula::ExistsIn(x, ty, t, body) => {
            format!("(exists {x} {ty} {} {})", print_term(t), print_formula(body))
        }
    }
}

// ---------------------------------------------------------------------------
// NRC expressions — the syntax matches the `Display` impl of `NrcExpr`.

pub fn parse_nrc(s: &Sexp) -> Result<NrcExpr, ParseError> {
    let head = s.list()?.first().ok_or_else(|| s.err("empty expression"))?;
    match head.sym()? {
        "var" => Ok(NrcExpr::var(s.tagged("var", 1)?[0].sym()?)),
        "unit" => {
            s.tagged("unit", 0)?;
            Ok(NrcExpr::UnitE)
        }
        "pair" => {
            let args = s.tagged("pair", 2)?;
            Ok(NrcExpr::pair(parse_nrc(&args[0])?, parse_nrc(&args[1])?))
        }
        "p1" => Ok(NrcExpr::proj(1, parse_nrc(&s.tagged("p1", 1)?[0])?)),
        "p2" => Ok(NrcExpr::proj(2, parse_nrc(&s.tagged("p2", 1)?[0])?)),
        "sing" => Ok(NrcExpr::singleton(parse_nrc(&s.tagged("sing", 1)?[0])?)),
        "bigcup" => {
            let args = s.tagged("bigcup", 3)?;
            Ok(NrcExpr::bigunion(
                args[0].sym()?,
                parse_nrc(&args[1])?,
                parse_nrc(&args[2])?,
            ))
        }
        "empty" => Ok(NrcExpr::EmptyE(parse_type(&s.tagged("empty", 1)?[0])?)),
        "cup" => {
            let args = s.tagged("cup", 2)?;
            Ok(NrcExpr::union(parse_nrc(&args[0])?, parse_nrc(&args[1])?))
        }
        "diff" => {
            let args = s.tagged("diff", 2)?;
            Ok(NrcExpr::diff(parse_nrc(&args[0])?, parse_nrc(&args[1])?))
        }
        "get" => Ok(NrcExpr::get(parse_nrc(&s.tagged("get", 1)?[0])?)),
        other => Err(s.err(format!("unknown expression constructor `{other}`"))),
    }
}

pub fn print_nrc(e: &NrcExpr) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// sequents, rules, proofs

fn parse_atom(s: &Sexp) -> Result<ThetaAtom, ParseError> {
    let args = s.tagged("mem", 3)?;
    Ok(ThetaAtom::new(
        parse_type(&args[0])?,
        parse_term(&args[1])?,
        parse_term(&args[2])?,
    ))
}

fn print_atom(a: &ThetaAtom) -> String {
    format!(
        "(mem {} {} {})",
        a.elem_ty,
        print_term(&a.member),
        print_term(&a.set)
    )
}

fn parse_rhs(s: &Sexp) -> Result<Rhs, ParseError> {
    let head = s.list()?.first().ok_or_else(|| s.err("empty goal"))?;
    let tag = head.sym()?;
    let args = s.tagged(tag, 3)?;
    let ty = parse_type(&args[0])?;
    let t = parse_term(&args[1])?;
    let u = parse_term(&args[2])?;
    match tag {
        "eq" => Ok(Rhs::Eq(ty, t, u)),
        "sub" => Ok(Rhs::Sub(ty, t, u)),
        "mem" => Ok(Rhs::Mem(ty, t, u)),
        other => Err(s.err(format!("unknown goal form `{other}`"))),
    }
}

fn print_rhs(r: &Rhs) -> String {
    let (tag, ty, t, u) = match r {
        Rhs::Eq(ty, t, u) => ("eq", ty, t, u),
        Rhs::Sub(ty, t, u) => ("sub", ty, t, u),
        Rhs::Mem(ty, t, u) => ("mem", ty, t, u),
    };
    format!("({tag} {ty} {} {})", print_term(t), print_term(u))
}

pub fn parse_sequent(s: &Sexp) -> Result<Sequent, ParseError> {
    let args = s.tagged("seq", 3)?;
    let theta = args[0]
        .tagged("theta", args[0].list()?.len().saturating_sub(1))?
        .iter()
        .map(parse_atom)
        .collect::<Result<Vec<_>, _>>()?;
    let gamma = args[1]
        .tagged("gamma", args[1].list()?.len().saturating_sub(1))?
        .iter()
        .map(parse_formula)
        .collect::<Result<Vec<_>, _>>()?;
    let rhs = parse_rhs(&args[2].tagged("rhs", 1)?[0])?;
    Ok(Sequent::new(theta, gamma, rhs))
}

pub fn print_sequent(seq: &Sequent) -> String {
    let theta: Vec<String> = seq.theta.iter().map(print_atom).collect();
    let gamma: Vec<String> = seq.gamma.iter().map(print_formula).collect();
    format!(
        "(seq (theta{}{}) (gamma{}{}) (rhs {}))",
        if theta.is_empty() { "" } else { " " },
        theta.join(" "),
        if gamma.is_empty() { "" } else { " " },
        gamma.join(" "),
        print_rhs(&seq.rhs)
    )
}

fn parse_side(s: &Sexp) -> Result<Side, ParseError> {
    match s.sym()? {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(s.err(format!("expected `left` or `right`, found `{other}`"))),
    }
}

pub fn parse_rule(s: &Sexp) -> Result<Rule, ParseError> {
    let head = s.list()?.first().ok_or_else(|| s.err("empty rule"))?;
    match head.sym()? {
        "contraction" => Ok(Rule::Contraction {
            gamma_idx: s.tagged("contraction", 1)?[0].usize_val()?,
        }),
        "mem-ur-r" => Ok(Rule::MemUrR {
            theta_idx: s.tagged("mem-ur-r", 1)?[0].usize_val()?,
        }),
        "eq-set-r" => {
            s.tagged("eq-set-r", 0)?;
            Ok(Rule::EqSetR)
        }
        "eq-prod-r" => {
            s.tagged("eq-prod-r", 0)?;
            Ok(Rule::EqProdR)
        }
        "eq-unit-r" => {
            s.tagged("eq-unit-r", 0)?;
            Ok(Rule::EqUnitR)
        }
        "eq-ur-r" => Ok(Rule::EqUrR {
            fresh: s.tagged("eq-ur-r", 1)?[0].sym()?.to_string(),
        }),
        "subset-r" => Ok(Rule::SubsetR {
            fresh: s.tagged("subset-r", 1)?[0].sym()?.to_string(),
        }),
        "mem-set-r" => Ok(Rule::MemSetR {
            theta_idx: s.tagged("mem-set-r", 1)?[0].usize_val()?,
        }),
        "bot-l" => Ok(Rule::BotL {
            gamma_idx: s.tagged("bot-l", 1)?[0].usize_val()?,
        }),
        "and-l" => Ok(Rule::AndL {
            gamma_idx: s.tagged("and-l", 1)?[0].usize_val()?,
        }),
        "or-l" => Ok(Rule::OrL {
            gamma_idx: s.tagged("or-l", 1)?[0].usize_val()?,
        }),
        "forall-l" => {
            let args = s.tagged("forall-l", 2)?;
            Ok(Rule::ForallL {
                gamma_idx: args[0].usize_val()?,
                theta_idx: args[1].usize_val()?,
            })
        }
        "exists-l" => {
            let args = s.tagged("exists-l", 2)?;
            Ok(Rule::ExistsL {
                gamma_idx: args[0].usize_val()?,
                fresh: args[1].sym()?.to_string(),
            })
        }
        "eq-subst" => {
            let args = s.tagged("eq-subst", 2)?;
            Ok(Rule::EqSubst {
                gamma_idx: args[0].usize_val()?,
                var_side: parse_side(&args[1])?,
            })
        }
        "neq-l" => Ok(Rule::NeqL {
            gamma_idx: s.tagged("neq-l", 1)?[0].usize_val()?,
        }),
        "times-beta" => {
            let args = s.tagged("times-beta", 5)?;
            Ok(Rule::TimesBeta {
                idx: args[0].usize_val()? as u8,
                var: args[1].sym()?.to_string(),
                fst: parse_term(&args[2])?,
                snd: parse_term(&args[3])?,
                template: Box::new(parse_sequent(&args[4])?),
            })
        }
        "times-eta" => {
            let args = s.tagged("times-eta", 3)?;
            Ok(Rule::TimesEta {
                var: args[0].sym()?.to_string(),
                fresh_fst: args[1].sym()?.to_string(),
                fresh_snd: args[2].sym()?.to_string(),
            })
        }
        "weaken" => Ok(Rule::Weaken {
            gamma_idx: s.tagged("weaken", 1)?[0].usize_val()?,
        }),
        "axiom" => {
            s.tagged("axiom", 0)?;
            Ok(Rule::Axiom)
        }
        "mem-l" => {
            let args = s.tagged("mem-l", 4)?;
            Ok(Rule::MemL {
                gamma_idx: args[0].usize_val()?,
                elem_ty: parse_type(&args[1])?,
                member: parse_term(&args[2])?,
                set: parse_term(&args[3])?,
            })
        }
        "sub-l" => {
            let args = s.tagged("sub-l", 3)?;
            Ok(Rule::SubL {
                theta_idx: args[0].usize_val()?,
                gamma_idx: args[1].usize_val()?,
                superset: parse_term(&args[2])?,
            })
        }
        "implies-l" => {
            let args = s.tagged("implies-l", 2)?;
            Ok(Rule::ImpliesL {
                gamma_idx: args[0].usize_val()?,
                hyp_idx: args[1].usize_val()?,
            })
        }
        "eq-refl-r" => {
            s.tagged("eq-refl-r", 0)?;
            Ok(Rule::EqReflR)
        }
        other => Err(s.err(format!("unknown rule `{other}`"))),
    }
}

pub fn print_rule(r: &Rule) -> String {
    match r {
        Rule::Contraction { gamma_idx } => format!("(contraction {gamma_idx})"),
        Rule::MemUrR { theta_idx } => format!("(mem-ur-r {theta_idx})"),
        Rule::EqSetR => "(eq-set-r)".into(),
        Rule::EqProdR => "(eq-prod-r)".into(),
        Rule::EqUnitR => "(eq-unit-r)".into(),
        Rule::EqUrR { fresh } => format!("(eq-ur-r {fresh})"),
        Rule::SubsetR { fresh } => format!("(subset-r {fresh})"),
        Rule::MemSetR { theta_idx } => format!("(mem-set-r {theta_idx})"),
        Rule::BotL { gamma_idx } => format!("(bot-l {gamma_idx})"),
        Rule::AndL { gamma_idx } => format!("(and-l {gamma_idx})"),
        Rule::OrL { gamma_idx } => format!("(or-l {gamma_idx})"),
        Rule::ForallL {
            gamma_idx,
            theta_idx,
        } => format!("(forall-l {gamma_idx} {theta_idx})"),
        Rule::ExistsL { gamma_idx, fresh } => format!("(exists-l {gamma_idx} {fresh})"),
        Rule::EqSubst {
            gamma_idx,
            var_side,
        } => format!(
            "(eq-subst {gamma_idx} {})",
            match var_side {
                Side::Left => "left",
                Side::Right => "right",
            }
        ),
        Rule::NeqL { gamma_idx } => format!("(neq-l {gamma_idx})"),
        Rule::TimesBeta {
            idx,
            var,
            fst,
            snd,
            template,
        } => format!(
            "(times-beta {idx} {var} {} {} {})",
            print_term(fst),
            print_term(snd),
            print_sequent(template)
        ),
        Rule::TimesEta {
            var,
            fresh_fst,
            fresh_snd,
        } => format!("(times-eta {var} {fresh_fst} {fresh_snd})"),
        Rule::Weaken { gamma_idx } => format!("(weaken {gamma_idx})"),
        Rule::Axiom => "(axiom)".into(),
        Rule::MemL {
            gamma_idx,
            elem_ty,
            member,
            set,
        } => format!(
            "(mem-l {gamma_idx} {elem_ty} {} {})",
            print_term(member),
            print_term(set)
        ),
        Rule::SubL {
            theta_idx,
            gamma_idx,
            superset,
        } => format!("(sub-l {theta_idx} {gamma_idx} {})", print_term(superset)),
        Rule::ImpliesL {
            gamma_idx,
            hyp_idx,
        } => format!("(implies-l {gamma_idx} {hyp_idx})"),
        Rule::EqReflR => "(eq-refl-r)".into(),
    }
}

pub fn parse_node(s: &Sexp) -> Result<ProofNode, ParseError> {
    let items = s.list()?;
    if items.len() < 3 || items[0].sym().map(|h| h != "node").unwrap_or(true) {
        return Err(s.err("expected `(node <rule> <sequent> <premises...>)`"));
    }
    let rule = parse_rule(&items[1])?;
    let conclusion = parse_sequent(&items[2])?;
    let premises = items[3..]
        .iter()
        .map(parse_node)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProofNode::new(rule, conclusion, premises))
}

pub fn print_node(node: &ProofNode) -> String {
    print_node_indented(node, 0)
}

fn print_node_indented(node: &ProofNode, depth: usize) -> String {
    let pad = "  ".repeat(depth);
    let mut out = format!(
        "{pad}(node {} {}",
        print_rule(&node.rule),
        print_sequent(&node.conclusion)
    );
    for p in &node.premises {
        out.push('\n');
        out.push_str(&print_node_indented(p, depth + 1));
    }
    out.push(')');
    out
}

pub fn parse_ctx(s: &Sexp) -> Result<TypeContext, ParseError> {
    let items = s.list()?;
    if items.first().map(|h| h.sym()).transpose()? != Some("ctx") {
        return Err(s.err("expected `(ctx (name type) ...)`"));
    }
    let mut ctx = TypeContext::new();
    for entry in &items[1..] {
        let pair = entry.list()?;
        if pair.len() != 2 {
            return Err(entry.err("context entries are `(name type)` pairs"));
        }
        ctx.insert(pair[0].sym()?.to_string(), parse_type(&pair[1])?);
    }
    Ok(ctx)
}

pub fn print_ctx(ctx: &TypeContext) -> String {
    let entries: Vec<String> = ctx.iter().map(|(n, t)| format!("({n} {t})")).collect();
    format!(
        "(ctx{}{})",
        if entries.is_empty() { "" } else { " " },
        entries.join(" ")
    )
}

/// A `.proof` file: `(proof (ctx ...) (node ...))`.
pub fn parse_proof(text: &str) -> Result<(TypeContext, ProofNode), ParseError> {
    let s = parse_sexp(text)?;
    let args = s.tagged("proof", 2)?;
    Ok((parse_ctx(&args[0])?, parse_node(&args[1])?))
}

pub fn print_proof(ctx: &TypeContext, node: &ProofNode) -> String {
    format!("(proof\n  {}\n{})\n", print_ctx(ctx), print_node_indented(node, 1))
}

// ---------------------------------------------------------------------------
// synthesis problems

/// The proof of a `.prob` file can be inline or live in a sibling file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofSource {
    Inline(ProofNode),
    File(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSource {
    pub ctx: TypeContext,
    pub sigma: Formula,
    pub input_var: String,
    pub output_var: String,
    pub aux_vars: Vec<String>,
    pub proof: ProofSource,
}

/// A `.prob` file:
/// `(problem (ctx ...) (sigma f) (input x) (output o) (aux a ...) <proof>)`
/// where `<proof>` is `(proof-file path)` or an inline `(node ...)`.
pub fn parse_problem(text: &str) -> Result<ProblemSource, ParseError> {
    let s = parse_sexp(text)?;
    let args = s.tagged("problem", 6)?;
    let ctx = parse_ctx(&args[0])?;
    let sigma = parse_formula(&args[1].tagged("sigma", 1)?[0])?;
    let input_var = args[2].tagged("input", 1)?[0].sym()?.to_string();
    let output_var = args[3].tagged("output", 1)?[0].sym()?.to_string();
    let aux_list = args[4].list()?;
    if aux_list.first().map(|h| h.sym()).transpose()? != Some("aux") {
        return Err(args[4].err("expected `(aux name ...)`"));
    }
    let aux_vars = aux_list[1..]
        .iter()
        .map(|a| a.sym().map(str::to_string))
        .collect::<Result<Vec<_>, _>>()?;
    let proof = match args[5].list()?.first().map(|h| h.sym()).transpose()? {
        Some("proof-file") => {
            ProofSource::File(args[5].tagged("proof-file", 1)?[0].sym()?.to_string())
        }
        _ => ProofSource::Inline(parse_node(&args[5])?),
    };
    Ok(ProblemSource {
        ctx,
        sigma,
        input_var,
        output_var,
        aux_vars,
        proof,
    })
}

pub fn print_problem(p: &ProblemSource) -> String {
    let proof = match &p.proof {
        ProofSource::File(path) => format!("  (proof-file {path})"),
        ProofSource::Inline(node) => print_node_indented(node, 1),
    };
    format!(
        "(problem\n  {}\n  (sigma {})\n  (input {})\n  (output {})\n  (aux{}{})\n{})\n",
        print_ctx(&p.ctx),
        print_formula(&p.sigma),
        p.input_var,
        p.output_var,
        if p.aux_vars.is_empty() { "" } else { " " },
        p.aux_vars.join(" "),
        proof
    )
}

/// A `.d0` file: `(delta0 (ctx ...) <formula>)`.  Bundling a context makes
/// the file self-contained for type checking and model enumeration.
pub fn parse_delta0(text: &str) -> Result<(TypeContext, Formula), ParseError> {
    let s = parse_sexp(text)?;
    let args = s.tagged("delta0", 2)?;
    Ok((parse_ctx(&args[0])?, parse_formula(&args[1])?))
}

pub fn print_delta0(ctx: &TypeContext, f: &Formula) -> String {
    format!("(delta0\n  {}\n  {})\n", print_ctx(ctx), print_formula(f))
}

// ---------------------------------------------------------------------------
// interpretations

pub fn parse_fo_term(s: &Sexp) -> Result<FoTerm, ParseError> {
    match &s.kind {
        SexpKind::Sym(name) => match name.as_str() {
            "oin" => Ok(FoTerm::OIn),
            "c0" => Ok(FoTerm::C0),
            "unitc" => Ok(FoTerm::UnitC),
            "truec" => Ok(FoTerm::TrueC),
            other => Ok(FoTerm::var(other)),
        },
        SexpKind::List(items) => match items.first().map(|h| h.sym()).transpose()? {
            Some("emptyc") => Ok(FoTerm::EmptyC(parse_type(&s.tagged("emptyc", 1)?[0])?)),
            Some("pair") => {
                let args = s.tagged("pair", 2)?;
                Ok(FoTerm::pair(
                    parse_fo_term(&args[0])?,
                    parse_fo_term(&args[1])?,
                ))
            }
            Some("p1") => Ok(FoTerm::proj1(parse_fo_term(&s.tagged("p1", 1)?[0])?)),
            Some("p2") => Ok(FoTerm::proj2(parse_fo_term(&s.tagged("p2", 1)?[0])?)),
            _ => Err(s.err("expected a first-order term")),
        },
    }
}

pub fn print_fo_term(t: &FoTerm) -> String {
    match t {
        FoTerm::Var(x) => x.clone(),
        FoTerm::OIn => "oin".into(),
        FoTerm::C0 => "c0".into(),
        FoTerm::UnitC => "unitc".into(),
        FoTerm::TrueC => "truec".into(),
        FoTerm::EmptyC(ty) => format!("(emptyc {ty})"),
        FoTerm::Pair(a, b) => format!("(pair {} {})", print_fo_term(a), print_fo_term(b)),
        FoTerm::Proj1(a) => format!("(p1 {})", print_fo_term(a)),
        FoTerm::Proj2(a) => format!("(p2 {})", print_fo_term(a)),
    }
}

pub fn parse_fo_formula(s: &Sexp) -> Result<FoFormula, ParseError> {
    match &s.kind {
        SexpKind::Sym(name) => match name.as_str() {
            "top" => Ok(FoFormula::Top),
            "bot" => Ok(FoFormula::Bot),
            other => Err(s.err(format!("unknown formula `{other}`"))),
        },
        SexpKind::List(_) => {
            let head = s.list()?.first().ok_or_else(|| s.err("empty formula"))?;
            match head.sym()? {
                "=" => {
                    let args = s.tagged("=", 3)?;
                    Ok(FoFormula::Eq(
                        parse_type(&args[0])?,
                        parse_fo_term(&args[1])?,
                        parse_fo_term(&args[2])?,
                    ))
                }
                "mem" => {
                    let args = s.tagged("mem", 3)?;
                    Ok(FoFormula::Mem(
                        parse_type(&args[0])?,
                        parse_fo_term(&args[1])?,
                        parse_fo_term(&args[2])?,
                    ))
                }
                "not" => Ok(FoFormula::not(parse_fo_formula(&s.tagged("not", 1)?[0])?)),
                "and" => {
                    let args = s.tagged("and", 2)?;
                    Ok(FoFormula::and(
                        parse_fo_formula(&args[0])?,
                        parse_fo_formula(&args[1])?,
                    ))
                }
                "or" => {
                    let args = s.tagged("or", 2)?;
                    Ok(FoFormula::or(
                        parse_fo_formula(&args[0])?,
                        parse_fo_formula(&args[1])?,
                    ))
                }
                q @ ("forall" | "exists") => {
                    let args = s.tagged(q, 4)?;
                    let x = args[0].sym()?.to_string();
                    let ty = parse_type(&args[1])?;
                    let bound = parse_fo_term(&args[2])?;
                    let body = parse_fo_formula(&args[3])?;
                    Ok(if q == "forall" {
                        FoFormula::forall_in(x, ty, bound, body)
                    } else {
                        FoFormula::exists_in(x, ty, bound, body)
                    })
                }
                q @ ("forall-sort" | "exists-sort") => {
                    let args = s.tagged(q, 3)?;
                    let x = args[0].sym()?.to_string();
                    let ty = parse_type(&args[1])?;
                    let body = parse_fo_formula(&args[2])?;
                    Ok(if q == "forall-sort" {
                        FoFormula::forall_sort(x, ty, body)
                    } else {
                        FoFormula::exists_sort(x, ty, body)
                    })
                }
                other => Err(s.err(format!("unknown formula connective `{other}`"))),
            }
        }
    }
}

pub fn print_fo_formula(f: &FoFormula) -> String {
    match f {
        FoFormula::Eq(ty, a, b) => {
            format!("(= {ty} {} {})", print_fo_term(a), print_fo_term(b))
        }
        FoFormula::Mem(ty, a, b) => {
            format!("(mem {ty} {} {})", print_fo_term(a), print_fo_term(b))
        }
        FoFormula::Top => "top".into(),
        FoFormula::Bot => "bot".into(),
        FoFormula::Not(a) => format!("(not {})", print_fo_formula(a)),
        FoFormula::And(a, b) => {
            format!("(and {} {})", print_fo_formula(a), print_fo_formula(b))
        }
        FoFormula::Or(a, b) => {
            format!("(or {} {})", print_fo_formula(a), print_fo_formula(b))
        }
        FoFormula::ForallIn(x, ty, t, body) => format!(
            "(forall {x} {ty} {} {})",
            print_fo_term(t),
            print_fo_formula(body)
        ),
        FoFormula::ExistsIn(x, ty, t, body) => format!(
            "(exists {x} {ty} {} {})",
            print_fo_term(t),
            print_fo_formula(body)
        ),
        FoFormula::ForallSort(x, ty, body) => {
            format!("(forall-sort {x} {ty} {})", print_fo_formula(body))
        }
        FoFormula::ExistsSort(x, ty, body) => {
            format!("(exists-sort {x} {ty} {})", print_fo_formula(body))
        }
    }
}

/// An `.itp` file:
///
/// ```text
/// (interp
///   (in <type>)
///   (out <type>)
///   (sort <type> (code <type> ...) (domain <formula>) [(member <formula>)])
///   ...
///   (out-terms <term> ...) | (out-formula <formula>))
/// ```
///
/// One `sort` clause per component sort of the output type, giving the input
/// sorts of its code tuples and the named Δ0 clauses.  The parser only
/// checks syntax; validate with [`Interp::new`] before evaluating.
pub fn parse_interp(text: &str) -> Result<Interp, ParseError> {
    let s = parse_sexp(text)?;
    let items = s.list()?;
    if items.first().map(|h| h.sym()).transpose()? != Some("interp") || items.len() < 4 {
        return Err(s.err("expected `(interp (in ..) (out ..) <sorts> <output>)`"));
    }
    let input_type = parse_type(&items[1].tagged("in", 1)?[0])?;
    let output_type = parse_type(&items[2].tagged("out", 1)?[0])?;
    let mut sorts = BTreeMap::new();
    for clause in &items[3..items.len() - 1] {
        let parts = clause.list()?;
        if parts.first().map(|h| h.sym()).transpose()? != Some("sort")
            || !(4..=5).contains(&parts.len())
        {
            return Err(clause.err("expected `(sort <type> (code ..) (domain ..) [(member ..)])`"));
        }
        let sort = parse_type(&parts[1])?;
        let tau = parts[2]
            .tagged("code", parts[2].list()?.len().saturating_sub(1))?
            .iter()
            .map(parse_type)
            .collect::<Result<Vec<_>, _>>()?;
        let domain = parse_fo_formula(&parts[3].tagged("domain", 1)?[0])?;
        let membership = parts
            .get(4)
            .map(|m| parse_fo_formula(&m.tagged("member", 1)?[0]))
            .transpose()?;
        sorts.insert(
            sort,
            SortCode {
                tau,
                domain,
                membership,
            },
        );
    }
    let last = &items[items.len() - 1];
    let out = match last.list()?.first().map(|h| h.sym()).transpose()? {
        Some("out-terms") => {
            let ts = last.tagged("out-terms", last.list()?.len().saturating_sub(1))?;
            OutSpec::Terms(
                ts.iter()
                    .map(parse_fo_term)
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
        Some("out-formula") => OutSpec::Formula(parse_fo_formula(&last.tagged("out-formula", 1)?[0])?),
        _ => return Err(last.err("expected `(out-terms ...)` or `(out-formula ...)`")),
    };
    Ok(Interp {
        input_type,
        output_type,
        sorts,
        out,
    })
}

pub fn print_interp(i: &Interp) -> String {
    let mut out = format!(
        "(interp\n  (in {})\n  (out {})\n",
        i.input_type, i.output_type
    );
    for (sort, code) in &i.sorts {
        let tau: Vec<String> = code.tau.iter().map(|t| t.to_string()).collect();
        out.push_str(&format!(
            "  (sort {sort} (code{}{}) (domain {})",
            if tau.is_empty() { "" } else { " " },
            tau.join(" "),
            print_fo_formula(&code.domain)
        ));
        if let Some(m) = &code.membership {
            out.push_str(&format!(" (member {})", print_fo_formula(m)));
        }
        out.push_str(")\n");
    }
    match &i.out {
        OutSpec::Terms(ts) => {
            let ts: Vec<String> = ts.iter().map(print_fo_term).collect();
            out.push_str(&format!(
                "  (out-terms{}{}))\n",
                if ts.is_empty() { "" } else { " " },
                ts.join(" ")
            ));
        }
        OutSpec::Formula(f) => {
            out.push_str(&format!("  (out-formula {}))\n", print_fo_formula(f)));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// values as JSON

/// `["ur","a"]`, `["unit"]`, `["pair",v,w]`, `["set",[...]]`.
pub fn value_to_json(v: &Value) -> serde_json::Value {
    use serde_json::json;
    match v {
        Value::Atom(a) => json!(["ur", a]),
        Value::UnitV => json!(["unit"]),
        Value::PairV(a, b) => json!(["pair", value_to_json(a), value_to_json(b)]),
        Value::SetV(xs) => {
            json!(["set", xs.iter().map(value_to_json).collect::<Vec<_>>()])
        }
    }
}

pub fn value_from_json(v: &serde_json::Value) -> Result<Value, ParseError> {
    let bad = |msg: &str| ParseError::at(0, 0, format!("malformed value: {msg}"));
    let arr = v.as_array().ok_or_else(|| bad("expected an array"))?;
    let tag = arr
        .first()
        .and_then(|t| t.as_str())
        .ok_or_else(|| bad("missing tag"))?;
    match (tag, arr.len()) {
        ("ur", 2) => {
            let a = arr[1].as_str().ok_or_else(|| bad("atom name"))?;
            Ok(Value::atom(a.to_string()))
        }
        ("unit", 1) => Ok(Value::UnitV),
        ("pair", 3) => Ok(Value::pair(
            value_from_json(&arr[1])?,
            value_from_json(&arr[2])?,
        )),
        ("set", 2) => {
            let elems = arr[1].as_array().ok_or_else(|| bad("set elements"))?;
            Ok(Value::set(
                elems
                    .iter()
                    .map(value_from_json)
                    .collect::<Result<Vec<_>, _>>()?,
            ))
        }
        (tag, n) => Err(bad(&format!("unknown tag `{tag}` with {n} fields"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // [TRIVIAL] Smoke test: a singleton of a variable.
    #[test]
    fn parses_a_singleton_variable() {
        let e = parse_nrc(&parse_sexp("(sing (var x))").unwrap()).unwrap();
        assert_eq!(e, NrcExpr::singleton(NrcExpr::var("x")));
    }

    // [TRIVIAL] Wrong arity is reported as such, with a position.
    #[test]
    fn arity_errors_carry_positions() {
        let err = parse_nrc(&parse_sexp("(pair (var x))").unwrap()).unwrap_err();
        assert!(err.msg.contains("takes 2 argument(s)"), "{err}");
        assert_eq!((err.line, err.col), (1, 1));
    }

    // [TRIVIAL] Comments and whitespace are skipped; positions survive them.
    #[test]
    fn comments_are_skipped() {
        let text = "; a comment\n(cup (empty U) ; inline\n  (var s))";
        let e = parse_nrc(&parse_sexp(text).unwrap()).unwrap();
        assert_eq!(
            e,
            NrcExpr::union(NrcExpr::EmptyE(ObjType::U), NrcExpr::var("s"))
        );
    }

    // [TRIVIAL] A quantified formula round-trips through its printed form.
    #[test]
    fn formula_roundtrip() {
        let f = Formula::forall(
            "w",
            ObjType::U,
            Term::var("s"),
            Formula::exists(
                "v",
                ObjType::U,
                Term::var("m"),
                Formula::or(
                    Formula::EqU(Term::var("w"), Term::var("v")),
                    Formula::NeqU(Term::proj1(Term::pair(Term::var("w"), Term::UnitVal)), Term::var("v")),
                ),
            ),
        );
        let printed = print_formula(&f);
        assert_eq!(parse_formula(&parse_sexp(&printed).unwrap()).unwrap(), f);
    }

    // [TRIVIAL] Proof files round-trip, including rule instantiation data.
    #[test]
    fn proof_roundtrip() {
        let ctx: TypeContext = [
            ("x".to_string(), ObjType::U),
            ("s".to_string(), ObjType::set(ObjType::U)),
        ]
        .into_iter()
        .collect();
        let concl = Sequent::new(
            vec![ThetaAtom::new(ObjType::U, Term::var("x"), Term::var("s"))],
            vec![Formula::NeqU(Term::var("x"), Term::var("x"))],
            Rhs::Mem(ObjType::U, Term::var("x"), Term::var("s")),
        );
        let node = ProofNode::new(
            Rule::OrL { gamma_idx: 0 },
            Sequent::new(
                concl.theta.clone(),
                vec![Formula::or(concl.gamma[0].clone(), concl.gamma[0].clone())],
                concl.rhs.clone(),
            ),
            vec![
                ProofNode::new(Rule::NeqL { gamma_idx: 0 }, concl.clone(), vec![]),
                ProofNode::new(Rule::NeqL { gamma_idx: 0 }, concl, vec![]),
            ],
        );
        let printed = print_proof(&ctx, &node);
        let (ctx2, node2) = parse_proof(&printed).unwrap();
        assert_eq!(ctx2, ctx);
        assert_eq!(node2, node);
    }

    // [TRIVIAL] Problem files round-trip with a proof-file reference.
    #[test]
    fn problem_roundtrip() {
        let p = ProblemSource {
            ctx: [
                ("x".to_string(), ObjType::set(ObjType::U)),
                ("o".to_string(), ObjType::set(ObjType::U)),
            ]
            .into_iter()
            .collect(),
            sigma: Formula::EqU(Term::var("o"), Term::var("x")),
            input_var: "x".into(),
            output_var: "o".into(),
            aux_vars: vec!["a".into()],
            proof: ProofSource::File("identity.proof".into()),
        };
        let printed = print_problem(&p);
        assert_eq!(parse_problem(&printed).unwrap(), p);
    }

    // [TRIVIAL] The JSON value codec round-trips and canonicalizes sets.
    #[test]
    fn value_json_roundtrip() {
        let v = Value::set(vec![
            Value::pair(Value::atom("a"), Value::set(vec![Value::atom("b")])),
            Value::pair(Value::atom("b"), Value::set(vec![])),
        ]);
        assert_eq!(value_from_json(&value_to_json(&v)).unwrap(), v);
        // duplicated elements in the wire form collapse to the canonical set
        let wire = serde_json::json!(["set", [["ur", "a"], ["ur", "a"]]]);
        assert_eq!(
            value_from_json(&wire).unwrap(),
            Value::set(vec![Value::atom("a")])
        );
    }

    fn arb_type() -> impl Strategy<Value = ObjType> {
        let leaf = prop_oneof![Just(ObjType::U), Just(ObjType::Unit)];
        leaf.prop_recursive(3, 8, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| ObjType::prod(a, b)),
                inner.prop_map(ObjType::set),
            ]
        })
    }

    fn arb_nrc() -> impl Strategy<Value = NrcExpr> {
        let name = "[a-z][a-z0-9]{0,3}";
        let leaf = prop_oneof![
            name.prop_map(NrcExpr::var),
            Just(NrcExpr::UnitE),
            arb_type().prop_map(NrcExpr::EmptyE),
        ];
        leaf.prop_recursive(4, 24, 3, move |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| NrcExpr::pair(a, b)),
                (1..=2u8, inner.clone()).prop_map(|(i, e)| NrcExpr::proj(i, e)),
                inner.clone().prop_map(NrcExpr::singleton),
                (name, inner.clone(), inner.clone())
                    .prop_map(|(x, s, b)| NrcExpr::bigunion(x, s, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| NrcExpr::union(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| NrcExpr::diff(a, b)),
                inner.prop_map(NrcExpr::get),
            ]
        })
    }

    proptest! {
        // [TRIVIAL] parse ∘ print is the identity on arbitrary expressions.
        #[test]
        fn nrc_roundtrip(e in arb_nrc()) {
            let printed = print_nrc(&e);
            prop_assert_eq!(parse_nrc(&parse_sexp(&printed).unwrap()).unwrap(), e);
        }
    }

    // [TRIVIAL] Formula files round-trip with their contexts.
    #[test]
    fn delta0_roundtrip() {
        let ctx: TypeContext = [("s".to_string(), ObjType::set(ObjType::U))]
            .into_iter()
            .collect();
        let f = Formula::forall(
            "w",
            ObjType::U,
            Term::var("s"),
            Formula::EqU(Term::var("w"), Term::var("w")),
        );
        let printed = print_delta0(&ctx, &f);
        assert_eq!(parse_delta0(&printed).unwrap(), (ctx, f));
    }

    // [DERIVED] Interpretation files round-trip on translator output: the
    // projection transformation compiled by `nrc_to_interp` survives
    // printing and re-parsing unchanged.
    #[test]
    fn interp_roundtrip_on_translated_projection() {
        use crate::interp::nrc_to_interp;
        let pairs = ObjType::set(ObjType::prod(ObjType::U, ObjType::U));
        let e = NrcExpr::bigunion(
            "p",
            NrcExpr::var("r"),
            NrcExpr::singleton(NrcExpr::proj(1, NrcExpr::var("p"))),
        );
        let i = nrc_to_interp("r", &pairs, &e).unwrap();
        let printed = print_interp(&i);
        assert_eq!(parse_interp(&printed).unwrap(), i);
    }

    // [TRIVIAL] All first-order constants and both quantifier flavours
    // survive the wire format.
    #[test]
    fn fo_formula_roundtrip() {
        let f = FoFormula::and(
            FoFormula::forall_in(
                "z",
                ObjType::U,
                FoTerm::proj1(FoTerm::pair(FoTerm::OIn, FoTerm::C0)),
                FoFormula::or(
                    FoFormula::Eq(ObjType::U, FoTerm::var("z"), FoTerm::TrueC),
                    FoFormula::not(FoFormula::Mem(
                        ObjType::U,
                        FoTerm::var("z"),
                        FoTerm::EmptyC(ObjType::U),
                    )),
                ),
            ),
            FoFormula::exists_sort(
                "w",
                ObjType::Unit,
                FoFormula::Eq(ObjType::Unit, FoTerm::var("w"), FoTerm::UnitC),
            ),
        );
        let printed = print_fo_formula(&f);
        assert_eq!(
            parse_fo_formula(&parse_sexp(&printed).unwrap()).unwrap(),
            f
        );
    }
}
