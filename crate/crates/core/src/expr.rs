//! The trace-word input language.
//!
//! ```text
//! expr    := ("E[" | "k[") trace { trace } "]"
//! trace   := ("tr" | "Tr") "(" pair { pair } ")"
//! pair    := xletter dslot
//! xletter := IDENT [ "'" | "^T" ]
//! dslot   := "D" INTEGER | IDENT
//! ```
//!
//! Example: `E[ tr(X' D1 X D2) tr(X' D3 X D4) ]`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use crate::engine::{Kind, MomentSpec};
use crate::error::{Error, Pos, Result};
use crate::gluing::WordShape;
use crate::matrix::{bind_matrices, dimension_profile, Bindings, Matrix};
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XLetter {
    pub family: String,
    pub transposed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub x: XLetter,
    pub slot: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    /// Written `Tr` rather than `tr`. Evaluation always uses `tr`.
    pub capital: bool,
    pub pairs: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceWordAst {
    pub kind: Kind,
    pub factors: Vec<Factor>,
}

impl TraceWordAst {
    pub fn letters(&self) -> usize {
        self.factors.iter().map(|f| f.pairs.len()).sum()
    }

    /// Family names in order of first appearance.
    pub fn families(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in self.factors.iter().flat_map(|f| &f.pairs) {
            if !out.contains(&p.x.family) {
                out.push(p.x.family.clone());
            }
        }
        out
    }

    pub fn slot_names(&self) -> Vec<String> {
        self.factors
            .iter()
            .flat_map(|f| f.pairs.iter().map(|p| p.slot.clone()))
            .collect()
    }
}

impl fmt::Display for TraceWordAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.kind {
            Kind::Moment => "E[",
            Kind::Cumulant => "k[",
        })?;
        for factor in &self.factors {
            write!(f, " {}(", if factor.capital { "Tr" } else { "tr" })?;
            for (i, p) in factor.pairs.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(
                    f,
                    "{}{} {}",
                    p.x.family,
                    if p.x.transposed { "'" } else { "" },
                    p.slot
                )?;
            }
            f.write_str(")")?;
        }
        f.write_str(" ]")
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    LBracket,
    RBracket,
    LParen,
    RParen,
    Transpose,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::LBracket => f.write_str("'['"),
            Tok::RBracket => f.write_str("']'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Transpose => f.write_str("transpose mark"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut pos = Pos { line: 1, col: 1 };
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let here = pos;
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                pos.line += 1;
                pos.col = 1;
            } else {
                pos.col += 1;
            }
        };
        match c {
            c if c.is_whitespace() => bump(&mut chars),
            '[' | ']' | '(' | ')' | '\'' => {
                bump(&mut chars);
                out.push((
                    match c {
                        '[' => Tok::LBracket,
                        ']' => Tok::RBracket,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        _ => Tok::Transpose,
                    },
                    here,
                ));
            }
            '^' => {
                bump(&mut chars);
                if chars.peek() == Some(&'T') {
                    bump(&mut chars);
                    out.push((Tok::Transpose, here));
                } else {
                    return Err(Error::parse(here, "expected 'T' after '^'"));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump(&mut chars);
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), here));
            }
            c => return Err(Error::parse(here, format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

fn is_slot_form(s: &str) -> bool {
    s.len() > 1 && s.starts_with('D') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
    warnings: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, Pos)> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> Pos {
        self.peek().map_or(self.end, |t| t.1)
    }

    fn expr(&mut self) -> Result<TraceWordAst> {
        let kind = match self.peek() {
            Some((Tok::Ident(s), _)) if s == "E" => Kind::Moment,
            Some((Tok::Ident(s), _)) if s == "k" => Kind::Cumulant,
            _ => return Err(Error::parse(self.pos(), "expected 'E[' or 'k['")),
        };
        self.i += 1;
        match self.peek() {
            Some((Tok::LBracket, _)) => self.i += 1,
            _ => return Err(Error::parse(self.pos(), "expected '[' after the expectation sign")),
        }
        let open = self.toks[self.i - 1].1;
        let mut factors = Vec::new();
        loop {
            match self.peek().cloned() {
                Some((Tok::Ident(s), p)) if s == "tr" || s == "Tr" => {
                    self.i += 1;
                    factors.push(self.trace(s == "Tr", p)?);
                }
                Some((Tok::RBracket, p)) => {
                    if factors.is_empty() {
                        return Err(Error::parse(p, "expected at least one trace"));
                    }
                    self.i += 1;
                    break;
                }
                Some((Tok::RParen, p)) => {
                    return Err(Error::parse(p, "unbalanced parentheses: unexpected ')'"))
                }
                Some((t, p)) => {
                    return Err(Error::parse(p, format!("expected 'tr(' or ']', found {t}")))
                }
                None => {
                    return Err(Error::parse(
                        self.end,
                        format!("unbalanced brackets: '[' at {open} is never closed"),
                    ))
                }
            }
        }
        if let Some((t, p)) = self.peek() {
            return Err(Error::parse(*p, format!("unexpected {t} after ']'")));
        }
        Ok(TraceWordAst { kind, factors })
    }

    fn trace(&mut self, capital: bool, start: Pos) -> Result<Factor> {
        let open = match self.peek() {
            Some((Tok::LParen, p)) => *p,
            _ => return Err(Error::parse(self.pos(), "expected '(' after the trace")),
        };
        self.i += 1;
        // (name, transposed, position)
        let mut items: Vec<(String, bool, Pos)> = Vec::new();
        loop {
            match self.peek().cloned() {
                Some((Tok::Ident(s), p)) => {
                    self.i += 1;
                    let transposed = matches!(self.peek(), Some((Tok::Transpose, _)));
                    if transposed {
                        self.i += 1;
                    }
                    items.push((s, transposed, p));
                }
                Some((Tok::RParen, p)) => {
                    self.i += 1;
                    if items.is_empty() {
                        return Err(Error::parse(start, "empty factor"));
                    }
                    let _ = p;
                    break;
                }
                Some((Tok::LParen, p)) => {
                    return Err(Error::parse(p, "unbalanced parentheses: unexpected '('"))
                }
                Some((Tok::Transpose, p)) => {
                    return Err(Error::parse(p, "transpose mark must follow a letter"))
                }
                Some((Tok::RBracket, _)) | None => {
                    return Err(Error::parse(
                        self.pos(),
                        format!("unbalanced parentheses: '(' at {open} is never closed"),
                    ))
                }
                Some((t, p)) => return Err(Error::parse(p, format!("unexpected {t}"))),
            }
        }
        if is_slot_form(&items[0].0) && !items[0].1 {
            let first = items.remove(0);
            self.warnings.push(format!(
                "{}: factor starts with constant slot {}; cycled to the end",
                first.2, first.0
            ));
            items.push(first);
        }
        let mut pairs = Vec::with_capacity(items.len() / 2);
        let mut it = items.into_iter();
        while let Some((name, transposed, p)) = it.next() {
            if is_slot_form(&name) {
                return Err(Error::parse(p, format!("constant slot {name} in letter position")));
            }
            let Some((slot, slot_t, sp)) = it.next() else {
                return Err(Error::parse(
                    p,
                    format!("letter {name} is not followed by a constant slot"),
                ));
            };
            if slot_t {
                return Err(Error::parse(sp, format!("constant slot {slot} cannot be transposed")));
            }
            pairs.push(Pair {
                x: XLetter {
                    family: name,
                    transposed,
                },
                slot,
            });
        }
        Ok(Factor { capital, pairs })
    }
}

/// Parses an expression; warnings (such as cycling a leading constant slot)
/// are returned alongside.
pub fn parse_with_warnings(text: &str) -> Result<(TraceWordAst, Vec<String>)> {
    let toks = lex(text)?;
    let mut end = Pos { line: 1, col: 1 };
    for c in text.chars() {
        if c == '\n' {
            end.line += 1;
            end.col = 1;
        } else {
            end.col += 1;
        }
    }
    let mut p = Parser {
        toks,
        i: 0,
        end,
        warnings: Vec::new(),
    };
    let ast = p.expr()?;
    let families = ast.families();
    let mut seen = BTreeSet::new();
    for name in ast.slot_names() {
        if families.contains(&name) && seen.insert(name.clone()) {
            p.warnings.push(format!(
                "{name} is a letter family but is used here as a constant slot"
            ));
        }
    }
    Ok((ast, p.warnings))
}

pub fn parse(text: &str) -> Result<TraceWordAst> {
    parse_with_warnings(text).map(|(ast, _)| ast)
}

/// Inner products of matrix families, read from a file whose first line
/// lists the family names and whose next lines hold the symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Gram {
    pub families: Vec<String>,
    pub matrix: Matrix<Rational>,
}

impl Gram {
    pub fn new(families: Vec<String>, matrix: Matrix<Rational>) -> Result<Self> {
        let k = families.len();
        if k == 0 || matrix.rows() != k || matrix.cols() != k {
            return Err(Error::Input(format!(
                "gram matrix must be {k}x{k} for families {families:?}"
            )));
        }
        for i in 0..k {
            for j in 0..i {
                if matrix.get(i, j) != matrix.get(j, i) {
                    return Err(Error::Input("gram matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self { families, matrix })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let families: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::Input("empty gram file".into()))?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| l.split_whitespace().map(parse_rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(families, Matrix::from_rows(rows)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }
}

/// Letter structure of an expression alone, families labelled in order of
/// first appearance.
pub fn shape_of(ast: &TraceWordAst) -> Result<WordShape> {
    let families = ast.families();
    let pairs = ast.factors.iter().flat_map(|f| &f.pairs);
    WordShape::new(
        ast.factors.iter().map(|f| f.pairs.len()).collect(),
        pairs.clone().map(|p| if p.x.transposed { -1 } else { 1 }).collect(),
        pairs
            .map(|p| families.iter().position(|f| *f == p.x.family).unwrap_or(0))
            .collect(),
    )
}

/// Everything besides the expression needed to build a [`MomentSpec`].
#[derive(Clone, Debug)]
pub struct Context {
    pub bindings: Option<Bindings>,
    pub n: usize,
    pub m: usize,
    pub gram: Option<Gram>,
    pub q: Rational,
    /// Families whose letters are Wigner matrices `½(X + Xᵀ)`.
    pub wigner: Vec<String>,
}

impl Context {
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            bindings: None,
            n,
            m,
            gram: None,
            q: Rational::one(),
            wigner: Vec::new(),
        }
    }
}

/// Builds a validated spec. Without bindings every slot is an identity.
/// Without a gram file one family has unit norm and several families are
/// independent.
pub fn elaborate(ast: &TraceWordAst, ctx: &Context) -> Result<MomentSpec<Rational>> {
    if ctx.n == 0 || ctx.m == 0 {
        return Err(Error::Input("N and M must be at least 1".into()));
    }
    let (families, gram) = match &ctx.gram {
        Some(g) => (g.families.clone(), g.matrix.clone()),
        None => {
            let f = ast.families();
            let k = f.len().max(1);
            (f, Matrix::identity(k))
        }
    };
    let index: BTreeMap<&str, usize> = families
        .iter()
        .enumerate()
        .map(|(i, f)| (f.as_str(), i))
        .collect();
    let mut lengths = Vec::new();
    let mut epsilon = Vec::new();
    let mut labels = Vec::new();
    for f in &ast.factors {
        lengths.push(f.pairs.len());
        for p in &f.pairs {
            epsilon.push(if p.x.transposed { -1 } else { 1 });
            labels.push(
                *index
                    .get(p.x.family.as_str())
                    .ok_or_else(|| Error::UnknownFamily(p.x.family.clone()))?,
            );
        }
    }
    let mut wigner = vec![false; families.len().max(1)];
    for w in &ctx.wigner {
        let i = *index
            .get(w.as_str())
            .ok_or_else(|| Error::UnknownFamily(w.clone()))?;
        wigner[i] = true;
    }
    let families = if families.is_empty() {
        vec!["X".to_string()]
    } else {
        families
    };
    let shape = WordShape::new(lengths, epsilon, labels)?;
    let profile = dimension_profile(&shape, ctx.n, ctx.m);
    let matrices = bind_matrices(ctx.bindings.as_ref(), &ast.slot_names(), &profile)?;
    let spec = MomentSpec::new(shape, matrices, ctx.n, ctx.m)?
        .with_gram(families, gram)?
        .with_q(ctx.q.clone())?
        .with_wigner(wigner)?;
    Ok(spec)
}
