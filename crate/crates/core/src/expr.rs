//! Expression surface syntax for trace and algebra expressions.
//!
//! Grammar (left associative, whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := scalar | gen | 'Tr' '(' expr ')'
//!         | 'Grade' '[' int ']' '(' expr ')' | '(' expr ')'
//! gen    := 'M' | 'Mt' | ('F' | 'Ft') '[' name (',' name)* ']'
//! scalar := complex literal `a+bi` (sign mandatory) or a bare real
//! ```
//!
//! Complex literals bind tighter than sums: `1+2i*M` scales M by 1+2i.
//! Parsing canonicalizes terms by folding scalar factors into a single
//! coefficient and flattening nested products/sums, so printing and
//! reparsing is structurally idempotent.

use num_complex::Complex;

use crate::algebra::{AlgebraElement, EvalContext, Generator, GeneratorKind};
use crate::cmatrix::CMat4;
use crate::error::{ParseError, ParseErrorKind, Result};
use crate::scalar::Real;
use crate::trace::{trace_of_element, TraceReport};

type C64 = Complex<f64>;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Scale(C64, Box<Expr>),
    Trace(Box<Expr>),
    GradePart(usize, Box<Expr>),
    Generator {
        kind: GeneratorKind,
        forms: Vec<String>,
    },
}

impl Expr {
    fn is_empty_product(&self) -> bool {
        matches!(self, Expr::Product(items) if items.is_empty())
    }

    /// Bare scalar literal c, represented as c times the empty product.
    pub fn scalar(c: C64) -> Expr {
        Expr::Scale(c, Box::new(Expr::Product(Vec::new())))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Num(f64),
    Imag(f64),
    Ident(String),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

fn err(pos: Pos, kind: ParseErrorKind) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind,
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn lex(mut self) -> std::result::Result<Vec<(Tok, Pos)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let pos = self.pos();
            match c {
                ' ' | '\t' | '\r' | '\n' => {
                    self.bump();
                }
                '+' => {
                    self.bump();
                    out.push((Tok::Plus, pos));
                }
                '-' => {
                    self.bump();
                    out.push((Tok::Minus, pos));
                }
                '*' => {
                    self.bump();
                    out.push((Tok::Star, pos));
                }
                '(' => {
                    self.bump();
                    out.push((Tok::LParen, pos));
                }
                ')' => {
                    self.bump();
                    out.push((Tok::RParen, pos));
                }
                '[' => {
                    self.bump();
                    out.push((Tok::LBracket, pos));
                }
                ']' => {
                    self.bump();
                    out.push((Tok::RBracket, pos));
                }
                ',' => {
                    self.bump();
                    out.push((Tok::Comma, pos));
                }
                '0'..='9' | '.' => {
                    let mut text = String::new();
                    while matches!(self.chars.peek(), Some('0'..='9') | Some('.')) {
                        text.push(self.bump().unwrap());
                    }
                    // Optional exponent, consumed only when well formed.
                    if matches!(self.chars.peek(), Some('e') | Some('E')) {
                        let mut probe = self.chars.clone();
                        probe.next();
                        let mut exp = String::new();
                        if matches!(probe.peek(), Some('+') | Some('-')) {
                            exp.push(*probe.peek().unwrap());
                            probe.next();
                        }
                        if matches!(probe.peek(), Some('0'..='9')) {
                            self.bump();
                            let mut e = String::from("e");
                            e.push_str(&exp);
                            for _ in exp.chars() {
                                self.bump();
                            }
                            while matches!(self.chars.peek(), Some('0'..='9')) {
                                e.push(self.bump().unwrap());
                            }
                            text.push_str(&e);
                        }
                    }
                    let value: f64 = text
                        .parse()
                        .map_err(|_| err(pos, ParseErrorKind::Number(text.clone())))?;
                    if self.chars.peek() == Some(&'i') {
                        // Imaginary suffix binds only when not starting a name.
                        let mut probe = self.chars.clone();
                        probe.next();
                        let next_is_word =
                            matches!(probe.peek(), Some(c) if c.is_alphanumeric() || *c == '_');
                        if !next_is_word {
                            self.bump();
                            out.push((Tok::Imag(value), pos));
                            continue;
                        }
                    }
                    out.push((Tok::Num(value), pos));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while matches!(self.chars.peek(), Some(c) if c.is_alphanumeric() || *c == '_') {
                        name.push(self.bump().unwrap());
                    }
                    out.push((Tok::Ident(name), pos));
                }
                other => return Err(err(pos, ParseErrorKind::UnexpectedChar(other))),
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    depth: usize,
}

const MAX_DEPTH: usize = 256;

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.at + 1).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(t, _)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> std::result::Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.bump();
                Ok(())
            }
            Some(_) => Err(err(
                self.pos(),
                ParseErrorKind::UnexpectedToken(what.into()),
            )),
            None => Err(err(self.end, ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn enter(&mut self) -> std::result::Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(err(self.pos(), ParseErrorKind::TooDeep));
        }
        Ok(())
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        self.enter()?;
        let mut terms = Vec::new();
        push_summand(&mut terms, self.term()?);
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    push_summand(&mut terms, self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    push_summand(&mut terms, negate(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        self.enter()?;
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            factors.push(self.factor()?);
        }
        self.depth -= 1;
        Ok(assemble_term(factors))
    }

    /// Scalar literal continuation: an optional `±bi` after a real part.
    fn literal_tail(&mut self, re: f64) -> Expr {
        let sign = match self.peek() {
            Some(Tok::Plus) => 1.0,
            Some(Tok::Minus) => -1.0,
            _ => return Expr::scalar(C64::new(re, 0.0)),
        };
        if let Some(Tok::Imag(b)) = self.peek2() {
            let b = *b;
            self.bump();
            self.bump();
            return Expr::scalar(C64::new(re, sign * b));
        }
        Expr::scalar(C64::new(re, 0.0))
    }

    fn factor(&mut self) -> std::result::Result<Expr, ParseError> {
        self.enter()?;
        let pos = self.pos();
        let out = match self.bump() {
            None => return Err(err(self.end, ParseErrorKind::UnexpectedEnd)),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Num(v)) => Ok(self.literal_tail(-v)),
                Some(Tok::Imag(v)) => Ok(Expr::scalar(C64::new(0.0, -v))),
                _ => Err(err(pos, ParseErrorKind::UnexpectedToken("-".into()))),
            },
            Some(Tok::Num(v)) => Ok(self.literal_tail(v)),
            Some(Tok::Imag(v)) => Ok(Expr::scalar(C64::new(0.0, v))),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "Tr" => {
                    self.expect(Tok::LParen, "(")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, ")")?;
                    Ok(Expr::Trace(Box::new(inner)))
                }
                "Grade" => {
                    self.expect(Tok::LBracket, "[")?;
                    let kpos = self.pos();
                    let k = match self.bump() {
                        Some(Tok::Num(v)) if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 => {
                            v as usize
                        }
                        Some(_) => return Err(err(kpos, ParseErrorKind::GradeIndex)),
                        None => return Err(err(self.end, ParseErrorKind::UnexpectedEnd)),
                    };
                    self.expect(Tok::RBracket, "]")?;
                    self.expect(Tok::LParen, "(")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, ")")?;
                    Ok(Expr::GradePart(k, Box::new(inner)))
                }
                "M" => Ok(Expr::Generator {
                    kind: GeneratorKind::M,
                    forms: Vec::new(),
                }),
                "Mt" => Ok(Expr::Generator {
                    kind: GeneratorKind::Mt,
                    forms: Vec::new(),
                }),
                "F" | "Ft" => {
                    let kind = if name == "F" {
                        GeneratorKind::F
                    } else {
                        GeneratorKind::Ft
                    };
                    self.expect(Tok::LBracket, "[")?;
                    let mut forms = Vec::new();
                    if self.peek() == Some(&Tok::RBracket) {
                        self.bump();
                        return Err(err(pos, ParseErrorKind::Arity(0)));
                    }
                    loop {
                        match self.bump() {
                            Some(Tok::Ident(f)) => forms.push(f),
                            Some(_) => {
                                return Err(err(
                                    self.pos(),
                                    ParseErrorKind::UnexpectedToken("form name".into()),
                                ))
                            }
                            None => return Err(err(self.end, ParseErrorKind::UnexpectedEnd)),
                        }
                        match self.bump() {
                            Some(Tok::Comma) => continue,
                            Some(Tok::RBracket) => break,
                            Some(_) => {
                                return Err(err(
                                    self.pos(),
                                    ParseErrorKind::UnexpectedToken("`,` or `]`".into()),
                                ))
                            }
                            None => return Err(err(self.end, ParseErrorKind::UnexpectedEnd)),
                        }
                    }
                    if forms.len() > 3 {
                        return Err(err(pos, ParseErrorKind::Arity(forms.len())));
                    }
                    Ok(Expr::Generator { kind, forms })
                }
                other => Err(err(pos, ParseErrorKind::UnexpectedToken(other.into()))),
            },
            Some(t) => Err(err(pos, ParseErrorKind::UnexpectedToken(format!("{t:?}")))),
        };
        self.depth -= 1;
        out
    }
}

fn push_summand(terms: &mut Vec<Expr>, t: Expr) {
    if let Expr::Sum(items) = t {
        terms.extend(items);
    } else {
        terms.push(t);
    }
}

fn negate(t: Expr) -> Expr {
    match t {
        Expr::Scale(c, inner) => Expr::Scale(-c, inner),
        other => Expr::Scale(C64::new(-1.0, 0.0), Box::new(other)),
    }
}

/// Folds scalar factors into one coefficient and flattens nested products.
fn assemble_term(factors: Vec<Expr>) -> Expr {
    let mut coeff = C64::new(1.0, 0.0);
    let mut nodes: Vec<Expr> = Vec::new();
    let push_node = |nodes: &mut Vec<Expr>, n: Expr| {
        if let Expr::Product(items) = n {
            nodes.extend(items);
        } else {
            nodes.push(n);
        }
    };
    for f in factors {
        match f {
            Expr::Scale(c, inner) => {
                coeff *= c;
                if !inner.is_empty_product() {
                    push_node(&mut nodes, *inner);
                }
            }
            other => push_node(&mut nodes, other),
        }
    }
    if nodes.is_empty() {
        return Expr::scalar(coeff);
    }
    let inner = if nodes.len() == 1 {
        nodes.pop().unwrap()
    } else {
        Expr::Product(nodes)
    };
    if coeff == C64::new(1.0, 0.0) {
        inner
    } else {
        Expr::Scale(coeff, Box::new(inner))
    }
}

/// Parses an expression; positions in diagnostics are 1-based.
pub fn parse(src: &str) -> std::result::Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            line: 1,
            column: 1,
            kind: ParseErrorKind::EmptyInput,
        });
    }
    let lexer = Lexer::new(src);
    let end = Pos {
        line: lexer.line,
        column: lexer.column,
    };
    let toks = lexer.lex()?;
    let end = toks
        .last()
        .map(|(_, p)| Pos {
            line: p.line,
            column: p.column + 1,
        })
        .unwrap_or(end);
    let mut parser = Parser {
        toks,
        at: 0,
        end,
        depth: 0,
    };
    let expr = parser.expr()?;
    if parser.at != parser.toks.len() {
        return Err(err(parser.pos(), ParseErrorKind::TrailingInput));
    }
    Ok(expr)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_complex(c: C64) -> String {
    if c.im == 0.0 {
        fmt_f64(c.re)
    } else if c.im < 0.0 {
        format!("{}-{}i", fmt_f64(c.re), fmt_f64(-c.im))
    } else {
        format!("{}+{}i", fmt_f64(c.re), fmt_f64(c.im))
    }
}

fn print_factor(e: &Expr) -> String {
    match e {
        Expr::Sum(_) | Expr::Scale(..) => format!("({})", print_canonical(e)),
        other => print_canonical(other),
    }
}

fn print_scaled(c: C64, inner: &Expr) -> String {
    if inner.is_empty_product() {
        return fmt_complex(c);
    }
    let coeff = if c.im == 0.0 {
        fmt_f64(c.re)
    } else {
        format!("({})", fmt_complex(c))
    };
    format!("{}*{}", coeff, print_factor(inner))
}

/// Canonical text; reparsing yields a structurally identical tree.
pub fn print_canonical(e: &Expr) -> String {
    match e {
        Expr::Generator { kind, forms } => {
            if forms.is_empty() {
                kind.to_string()
            } else {
                format!("{}[{}]", kind, forms.join(","))
            }
        }
        Expr::Trace(inner) => format!("Tr({})", print_canonical(inner)),
        Expr::GradePart(k, inner) => format!("Grade[{}]({})", k, print_canonical(inner)),
        Expr::Product(items) => {
            if items.is_empty() {
                "1".to_string()
            } else {
                items.iter().map(print_factor).collect::<Vec<_>>().join("*")
            }
        }
        Expr::Scale(c, inner) => print_scaled(*c, inner),
        Expr::Sum(items) => {
            let mut out = String::new();
            for (k, item) in items.iter().enumerate() {
                match item {
                    Expr::Scale(c, inner) if k > 0 && c.im == 0.0 && c.re < 0.0 => {
                        out.push('-');
                        let flipped = C64::new(-c.re, 0.0);
                        if flipped == C64::new(1.0, 0.0) && !inner.is_empty_product() {
                            out.push_str(&print_factor(inner));
                        } else {
                            out.push_str(&print_scaled(flipped, inner));
                        }
                    }
                    _ => {
                        if k > 0 {
                            out.push('+');
                        }
                        out.push_str(&print_canonical(item));
                    }
                }
            }
            out
        }
    }
}

/// Result of evaluating an expression: a complex scalar for trace-level
/// expressions, a formal element for algebra-level ones.
pub enum Value<T> {
    Scalar(Complex<T>),
    Element(AlgebraElement<T>),
}

pub struct EvalOutcome<T> {
    pub value: Value<T>,
    /// One report per Tr(...) node encountered, in evaluation order.
    pub reports: Vec<TraceReport<T>>,
}

pub enum Output<T> {
    Scalar(Complex<T>),
    Matrix(CMat4<T>),
}

impl<T: Real> EvalOutcome<T> {
    pub fn into_output(self, ctx: &EvalContext<T>) -> Result<(Output<T>, Vec<TraceReport<T>>)> {
        let out = match self.value {
            Value::Scalar(c) => Output::Scalar(c),
            Value::Element(el) => Output::Matrix(el.evaluate(ctx)?),
        };
        Ok((out, self.reports))
    }
}

fn embed_scalar<T: Real>(c: Complex<T>) -> AlgebraElement<T> {
    AlgebraElement::one().scale(c)
}

fn eval_rec<T: Real>(
    e: &Expr,
    ctx: &EvalContext<T>,
    reports: &mut Vec<TraceReport<T>>,
) -> Result<Value<T>> {
    match e {
        Expr::Generator { kind, forms } => {
            let g = Generator::new(*kind, forms.clone())?;
            Ok(Value::Element(AlgebraElement::from_generator(g)))
        }
        Expr::Scale(c, inner) => {
            let ct = Complex::new(T::of(c.re), T::of(c.im));
            match eval_rec(inner, ctx, reports)? {
                Value::Scalar(s) => Ok(Value::Scalar(s * ct)),
                Value::Element(el) => Ok(Value::Element(el.scale(ct))),
            }
        }
        Expr::Product(items) => {
            let mut acc = Value::Scalar(Complex::new(T::one(), T::zero()));
            for item in items {
                let v = eval_rec(item, ctx, reports)?;
                acc = match (acc, v) {
                    (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
                    (Value::Scalar(a), Value::Element(b)) => Value::Element(b.scale(a)),
                    (Value::Element(a), Value::Scalar(b)) => Value::Element(a.scale(b)),
                    (Value::Element(a), Value::Element(b)) => Value::Element(a.mul(&b)),
                };
            }
            Ok(acc)
        }
        Expr::Sum(items) => {
            let mut acc: Option<Value<T>> = None;
            for item in items {
                let v = eval_rec(item, ctx, reports)?;
                acc = Some(match acc {
                    None => v,
                    Some(Value::Scalar(a)) => match v {
                        Value::Scalar(b) => Value::Scalar(a + b),
                        Value::Element(b) => Value::Element(embed_scalar(a).add(&b)),
                    },
                    Some(Value::Element(a)) => match v {
                        Value::Scalar(b) => Value::Element(a.add(&embed_scalar(b))),
                        Value::Element(b) => Value::Element(a.add(&b)),
                    },
                });
            }
            Ok(acc.unwrap_or(Value::Scalar(Complex::new(T::zero(), T::zero()))))
        }
        Expr::Trace(inner) => {
            let el = match eval_rec(inner, ctx, reports)? {
                Value::Element(el) => el,
                Value::Scalar(c) => embed_scalar(c),
            };
            let report = trace_of_element(&el, ctx)?;
            let value = report.numeric;
            reports.push(report);
            Ok(Value::Scalar(value))
        }
        Expr::GradePart(k, inner) => match eval_rec(inner, ctx, reports)? {
            Value::Element(el) => Ok(Value::Element(el.grade_part(*k))),
            Value::Scalar(c) => {
                if *k == 0 {
                    Ok(Value::Scalar(c))
                } else {
                    Ok(Value::Scalar(Complex::new(T::zero(), T::zero())))
                }
            }
        },
    }
}

/// Evaluates a parsed expression against a context, collecting one trace
/// report per Tr node. Results match the module operations bit for bit:
/// Tr dispatches to the trace engine, algebra nodes to element evaluation.
pub fn eval_expr<T: Real>(e: &Expr, ctx: &EvalContext<T>) -> Result<EvalOutcome<T>> {
    let mut reports = Vec::new();
    let value = eval_rec(e, ctx, &mut reports)?;
    Ok(EvalOutcome { value, reports })
}
