//! Text format for system models.
//!
//! ```text
//! # comments run to the end of the line
//! model toggle;
//! states x1, x2;
//! params a1, a2, g;
//! eq: 0.5 + a1 / (1 + x2^10) - g * x1;
//! eq: 0.5 + a2 / (1 + x1^10) - g * x2;
//! X0: [0, 10] x [0, 10];
//! U: [3.8, 4.2]^2 x [0.95, 1.05];
//! ```
//!
//! `model` and `params` are optional. Operators are `+ - * /`, unary minus,
//! and `^` with a non-negative integer literal exponent. A box factor may be
//! repeated with `^k`. [`print_system`] emits a fully parenthesized canonical
//! form that parses back to the same model.

use std::fmt::Write as _;

use super::Expr;
use crate::error::ParseError;
use crate::ibox::IntervalBox;
use crate::interval::Interval;
use crate::model::SystemModel;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Sym(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if ch.is_ascii_alphabetic() || ch == '_' {
            let s = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            col += i - s;
            out.push(Token {
                tok: Tok::Ident(chars[s..i].iter().collect()),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if ch.is_ascii_digit()
            || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit()))
        {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            col += i - s;
            out.push(Token {
                tok: Tok::Num(chars[s..i].iter().collect()),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if "+-*/^()[],;:".contains(ch) {
            out.push(Token {
                tok: Tok::Sym(ch),
                line: start_line,
                column: start_col,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError::Syntax {
            line,
            column: col,
            message: format!("unexpected character `{ch}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    states: &'a [String],
    params: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.err(
                &t,
                format!("expected `{c}`, found {}", Self::describe(&t.tok)),
            )
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Ident(s) => Ok(s.clone()),
            other => self.err(
                &t,
                format!("expected identifier, found {}", Self::describe(other)),
            ),
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let neg = self.eat('-');
        let t = self.bump();
        let v = match &t.tok {
            Tok::Num(s) => match s.parse::<f64>() {
                Ok(v) => v,
                Err(_) => return self.err(&t, format!("malformed number `{s}`")),
            },
            Tok::Ident(s) if s == "inf" => f64::INFINITY,
            other => {
                return self.err(
                    &t,
                    format!("expected number, found {}", Self::describe(other)),
                )
            }
        };
        Ok(if neg { -v } else { v })
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(s) if s.chars().all(|c| c.is_ascii_digit()) => match s.parse::<u32>() {
                Ok(k) => Ok(k),
                Err(_) => self.err(&t, format!("exponent `{s}` is too large")),
            },
            other => self.err(
                &t,
                format!(
                    "exponent must be a non-negative integer literal, found {}",
                    Self::describe(other)
                ),
            ),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                lhs = Expr::add(lhs, rhs);
            } else if self.eat('-') {
                let rhs = self.term()?;
                lhs = Expr::sub(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                lhs = Expr::mul(lhs, rhs);
            } else if self.eat('/') {
                let rhs = self.unary()?;
                lhs = Expr::div(lhs, rhs);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            let e = self.unary()?;
            return Ok(Expr::neg(e));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let k = self.exponent()?;
            return Ok(Expr::pow(base, k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Num(s) => match s.parse::<f64>() {
                Ok(v) => Ok(Expr::Const(v)),
                Err(_) => self.err(&t, format!("malformed number `{s}`")),
            },
            Tok::Ident(name) => {
                if let Some(i) = self.states.iter().position(|s| s == name) {
                    Ok(Expr::State(i))
                } else if let Some(j) = self.params.iter().position(|s| s == name) {
                    Ok(Expr::Param(j))
                } else {
                    Err(ParseError::UnknownIdentifier {
                        name: name.clone(),
                        line: t.line,
                        column: t.column,
                    })
                }
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            other => self.err(
                &t,
                format!("expected an expression, found {}", Self::describe(other)),
            ),
        }
    }

    fn box_literal(&mut self) -> Result<Vec<Interval>, ParseError> {
        let mut comps = Vec::new();
        loop {
            let open = self.peek().clone();
            self.expect('[')?;
            let lo = self.number()?;
            self.expect(',')?;
            let hi = self.number()?;
            self.expect(']')?;
            let iv = match Interval::try_new(lo, hi) {
                Ok(iv) => iv,
                Err(_) => return self.err(&open, format!("invalid interval [{lo}, {hi}]")),
            };
            let reps = if self.eat('^') { self.exponent()? } else { 1 };
            comps.extend(std::iter::repeat_n(iv, reps as usize));
            match &self.peek().tok {
                Tok::Ident(s) if s == "x" => {
                    self.bump();
                }
                _ => return Ok(comps),
            }
        }
    }
}

fn ident_list(p: &mut Parser<'_>) -> Result<Vec<String>, ParseError> {
    let mut names = Vec::new();
    if p.peek().tok == Tok::Sym(';') {
        return Ok(names);
    }
    loop {
        let t = p.peek().clone();
        let name = p.ident()?;
        if names.contains(&name) {
            return p.err(&t, format!("duplicate name `{name}`"));
        }
        names.push(name);
        if !p.eat(',') {
            return Ok(names);
        }
    }
}

/// Parses a model written in the text format.
pub fn parse_system(text: &str) -> Result<SystemModel, ParseError> {
    let toks = lex(text)?;
    // Declarations come first, so names are resolved in a first pass.
    let mut states: Option<Vec<String>> = None;
    let mut params: Vec<String> = Vec::new();
    let mut name = String::from("model");
    {
        let empty: [String; 0] = [];
        let mut p = Parser {
            toks: toks.clone(),
            pos: 0,
            states: &empty,
            params: &empty,
        };
        while p.peek().tok != Tok::Eof {
            let t = p.bump();
            match &t.tok {
                Tok::Ident(k) if k == "model" => {
                    name = p.ident()?;
                    p.expect(';')?;
                }
                Tok::Ident(k) if k == "states" => {
                    if states.is_some() {
                        return p.err(&t, "`states` declared twice");
                    }
                    states = Some(ident_list(&mut p)?);
                    p.expect(';')?;
                }
                Tok::Ident(k) if k == "params" => {
                    params = ident_list(&mut p)?;
                    p.expect(';')?;
                }
                _ => {
                    // skip to the end of this statement
                    while !matches!(p.peek().tok, Tok::Sym(';') | Tok::Eof) {
                        p.bump();
                    }
                    if !p.eat(';') {
                        return p.err(p.peek(), "expected `;` at end of statement");
                    }
                }
            }
        }
    }
    let states = states.ok_or_else(|| ParseError::Syntax {
        line: 1,
        column: 1,
        message: "missing `states` declaration".into(),
    })?;
    if let Some(dup) = states.iter().find(|s| params.contains(s)) {
        return Err(ParseError::Syntax {
            line: 1,
            column: 1,
            message: format!("`{dup}` declared as both state and parameter"),
        });
    }

    let mut p = Parser {
        toks,
        pos: 0,
        states: &states,
        params: &params,
    };
    let mut equations = Vec::new();
    let mut x0: Option<Vec<Interval>> = None;
    let mut u: Option<Vec<Interval>> = None;
    while p.peek().tok != Tok::Eof {
        let t = p.bump();
        match &t.tok {
            Tok::Ident(k) if k == "model" || k == "states" || k == "params" => {
                while !matches!(p.peek().tok, Tok::Sym(';') | Tok::Eof) {
                    p.bump();
                }
                p.expect(';')?;
            }
            Tok::Ident(k) if k == "eq" => {
                p.expect(':')?;
                equations.push(p.expr()?);
                p.expect(';')?;
            }
            Tok::Ident(k) if k == "X0" => {
                p.expect(':')?;
                x0 = Some(p.box_literal()?);
                p.expect(';')?;
            }
            Tok::Ident(k) if k == "U" => {
                p.expect(':')?;
                u = Some(p.box_literal()?);
                p.expect(';')?;
            }
            other => {
                return p.err(
                    &t,
                    format!(
                        "expected `model`, `states`, `params`, `eq`, `X0` or `U`, found {}",
                        Parser::describe(other)
                    ),
                )
            }
        }
    }

    if equations.len() != states.len() {
        return Err(ParseError::DimensionMismatch(format!(
            "{} equations for {} declared states",
            equations.len(),
            states.len()
        )));
    }
    let x0 = x0.ok_or_else(|| ParseError::DimensionMismatch("missing `X0` box".into()))?;
    if x0.len() != states.len() {
        return Err(ParseError::Arity(format!(
            "X0 has {} factors but {} states are declared",
            x0.len(),
            states.len()
        )));
    }
    let u = match u {
        Some(u) => u,
        None if params.is_empty() => Vec::new(),
        None => return Err(ParseError::DimensionMismatch("missing `U` box".into())),
    };
    if u.len() != params.len() {
        return Err(ParseError::Arity(format!(
            "U has {} factors but {} parameters are declared",
            u.len(),
            params.len()
        )));
    }
    SystemModel::with_names(
        name,
        states,
        params,
        equations,
        IntervalBox::new(x0),
        IntervalBox::new(u),
    )
    .map_err(|e| ParseError::DimensionMismatch(e.to_string()))
}

/// Parses a single expression against the given variable names.
pub fn parse_expr(text: &str, states: &[String], params: &[String]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        states,
        params,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        let t = p.peek().clone();
        return p.err(&t, format!("unexpected {}", Parser::describe(&t.tok)));
    }
    Ok(e)
}

/// Parses a box literal such as `[0, 1] x [2, 3]` or `[0, 20]^2`.
pub fn parse_box(text: &str) -> Result<IntervalBox, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        states: &[],
        params: &[],
    };
    let comps = p.box_literal()?;
    if p.peek().tok != Tok::Eof {
        let t = p.peek().clone();
        return p.err(&t, format!("unexpected {}", Parser::describe(&t.tok)));
    }
    Ok(IntervalBox::new(comps))
}

fn fmt_num(v: f64) -> String {
    format!("{v:?}")
}

/// Canonical, fully parenthesized rendering of an expression.
pub fn print_expr(e: &Expr, states: &[String], params: &[String]) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, states, params);
    s
}

fn write_expr(out: &mut String, e: &Expr, states: &[String], params: &[String]) {
    match e {
        Expr::Const(v) => {
            if v.is_sign_negative() {
                let _ = write!(out, "(-{})", fmt_num(-v));
            } else {
                out.push_str(&fmt_num(*v));
            }
        }
        Expr::State(i) => out.push_str(&states[*i]),
        Expr::Param(j) => out.push_str(&params[*j]),
        Expr::Neg(a) => {
            out.push_str("(-");
            write_expr(out, a, states, params);
            out.push(')');
        }
        Expr::Pow(a, k) => {
            out.push('(');
            write_expr(out, a, states, params);
            let _ = write!(out, "^{k})");
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            let op = match e {
                Expr::Add(..) => '+',
                Expr::Sub(..) => '-',
                Expr::Mul(..) => '*',
                _ => '/',
            };
            out.push('(');
            write_expr(out, a, states, params);
            let _ = write!(out, " {op} ");
            write_expr(out, b, states, params);
            out.push(')');
        }
    }
}

fn write_box(out: &mut String, b: &IntervalBox) {
    for (i, c) in b.components().iter().enumerate() {
        if i > 0 {
            out.push_str(" x ");
        }
        let _ = write!(out, "[{}, {}]", fmt_num(c.lo()), fmt_num(c.hi()));
    }
}

/// Canonical text form of a model; `parse_system(print_system(m)) == m`.
pub fn print_system(m: &SystemModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model {};", m.name());
    let _ = writeln!(out, "states {};", m.state_names().join(", "));
    let _ = writeln!(out, "params {};", m.param_names().join(", "));
    for eq in m.equations() {
        let _ = writeln!(
            out,
            "eq: {};",
            print_expr(eq, m.state_names(), m.param_names())
        );
    }
    out.push_str("X0: ");
    write_box(&mut out, m.x0());
    out.push_str(";\n");
    if m.p() > 0 {
        out.push_str("U: ");
        write_box(&mut out, m.u());
        out.push_str(";\n");
    }
    out
}
