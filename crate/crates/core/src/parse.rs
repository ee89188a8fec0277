//! Lexer and recursive-descent parser for `.mac` source text.
//!
//! The concrete grammar is Java-like:
//!
//! ```text
//! interface IAccount { Int balance(); Bool withdraw(Int amount); }
//! class Account(Int bal) implements IAccount { ... }
//! { Actor<IEmployee> bank; bank = new actor Employee(null, null); }
//! ```

use std::fmt;

use thiserror::Error;

use crate::ast::*;
use crate::resolve::{self, ResolutionError};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Interface,
    Class,
    Implements,
    New,
    Actor,
    If,
    Else,
    While,
    Return,
    Null,
    True,
    False,
    This,
    Sync,
    BoolTy,
    IntTy,
    Fut,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Dot,
    Bang,
    Question,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    AndAnd,
    OrOr,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(i) => return write!(f, "integer `{i}`"),
            Tok::Interface => "`interface`",
            Tok::Class => "`class`",
            Tok::Implements => "`implements`",
            Tok::New => "`new`",
            Tok::Actor => "`actor`",
            Tok::If => "`if`",
            Tok::Else => "`else`",
            Tok::While => "`while`",
            Tok::Return => "`return`",
            Tok::Null => "`null`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::This => "`this`",
            Tok::Sync => "`sync`",
            Tok::BoolTy => "`Bool`",
            Tok::IntTy => "`Int`",
            Tok::Fut => "`Fut`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Bang => "`!`",
            Tok::Question => "`?`",
            Tok::Assign => "`=`",
            Tok::EqEq => "`==`",
            Tok::NotEq => "`!=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::AndAnd => "`&&`",
            Tok::OrOr => "`||`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

/// Words that cannot be used as identifiers.
pub const KEYWORDS: &[&str] = &[
    "interface",
    "class",
    "implements",
    "new",
    "actor",
    "if",
    "else",
    "while",
    "return",
    "null",
    "true",
    "false",
    "this",
    "sync",
    "Bool",
    "Int",
    "Fut",
    "Actor",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "interface" => Tok::Interface,
        "class" => Tok::Class,
        "implements" => Tok::Implements,
        "new" => Tok::New,
        // `actor` and `Actor` share a token; context disambiguates.
        "actor" | "Actor" => Tok::Actor,
        "if" => Tok::If,
        "else" => Tok::Else,
        "while" => Tok::While,
        "return" => Tok::Return,
        "null" => Tok::Null,
        "true" => Tok::True,
        "false" => Tok::False,
        "this" => Tok::This,
        "sync" => Tok::Sync,
        "Bool" => Tok::BoolTy,
        "Int" => Tok::IntTy,
        "Fut" => Tok::Fut,
        _ => return None,
    })
}

/// A syntax error with its position and, where known, the expected tokens.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    pub expected: Vec<String>,
}

impl ParseError {
    fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), expected: Vec::new() }
    }
}

/// Any failure turning source text into a resolved [`Program`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Parse(e) => e.span,
            SyntaxError::Resolution(e) => e.span,
        }
    }

    pub fn message(&self) -> String {
        match self {
            SyntaxError::Parse(e) => e.message.clone(),
            SyntaxError::Resolution(e) => e.kind.to_string(),
        }
    }

    /// Renders as `file:line:col: message`.
    pub fn render(&self, file: &str) -> String {
        let span = self.span();
        format!("{file}:{}:{}: {}", span.line, span.col, self.message())
    }
}

struct Token {
    tok: Tok,
    span: Span,
}

fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(ParseError::new(span, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            out.push(Token { tok, span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits
                .parse::<i64>()
                .map_err(|_| ParseError::new(span, format!("integer literal `{digits}` out of range")))?;
            out.push(Token { tok: Tok::Int(value), span });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('!', Some('=')) => (Tok::NotEq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('!', _) => (Tok::Bang, 1),
            ('?', _) => (Tok::Question, 1),
            ('=', _) => (Tok::Assign, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('∧', _) => (Tok::AndAnd, 1),
            _ => return Err(ParseError::new(span, format!("unexpected character `{c}`"))),
        };
        for _ in 0..width {
            bump!();
        }
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

/// Parses and resolves a complete program.
pub fn parse_program(source: &str) -> Result<Program, SyntaxError> {
    let program = parse_unresolved(source)?;
    resolve::check(&program)?;
    Ok(program)
}

/// Parses without name resolution.
pub fn parse_unresolved(source: &str) -> Result<Program, ParseError> {
    let mut p = Parser { tokens: lex(source)?, pos: 0 };
    p.program()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let idx = (self.pos + n).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = self.peek();
        ParseError {
            span: self.span(),
            message: format!("expected {}, found {found}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&[&tok.to_string()]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut interfaces = Vec::new();
        let mut classes = Vec::new();
        loop {
            match self.peek() {
                Tok::Interface => interfaces.push(self.interface()?),
                Tok::Class => classes.push(self.class()?),
                Tok::LBrace => break,
                _ => return Err(self.unexpected(&["`interface`", "`class`", "`{`"])),
            }
        }
        let main = self.body(false)?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["end of input"]));
        }
        Ok(Program { interfaces, classes, main })
    }

    fn interface(&mut self) -> PResult<InterfaceDecl> {
        self.expect(Tok::Interface)?;
        let span = self.span();
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut sigs = Vec::new();
        while !self.eat(&Tok::RBrace) {
            let sig = self.signature()?;
            self.expect(Tok::Semi)?;
            sigs.push(sig);
        }
        Ok(InterfaceDecl { name, sigs, span })
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        self.expect(Tok::Class)?;
        let span = self.span();
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.eat(&Tok::RParen) {
                loop {
                    let ty = self.ty()?;
                    params.push(VarDecl { ty, name: self.ident()? });
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
        }
        self.expect(Tok::Implements)?;
        let mut implements = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            implements.push(self.ident()?);
        }
        self.expect(Tok::LBrace)?;
        let mut fields = Vec::new();
        let mut methods = Vec::new();
        while !self.eat(&Tok::RBrace) {
            // A field is `T x;`, a method is `[sync<l>] T m(...) { ... }`.
            if *self.peek() != Tok::Sync && self.is_type_start() {
                let save = self.pos;
                let ty = self.ty()?;
                let fname = self.ident()?;
                if self.eat(&Tok::Semi) {
                    if !methods.is_empty() {
                        return Err(ParseError::new(
                            self.tokens[save].span,
                            "class attributes must precede methods",
                        ));
                    }
                    fields.push(VarDecl { ty, name: fname });
                    continue;
                }
                self.pos = save;
            }
            let sig = self.signature()?;
            let body = self.body(true)?;
            methods.push(MethodDef { sig, body });
        }
        Ok(ClassDecl { name, params, implements, fields, methods, span })
    }

    fn sync_label(&mut self) -> PResult<Option<String>> {
        if !self.eat(&Tok::Sync) {
            return Ok(None);
        }
        self.expect(Tok::Lt)?;
        let label = self.ident()?;
        self.expect(Tok::Gt)?;
        Ok(Some(label))
    }

    fn signature(&mut self) -> PResult<MethodSig> {
        let span = self.span();
        let ret_sync = self.sync_label()?;
        let ret = self.ty()?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let sync = self.sync_label()?;
                if *self.peek() == Tok::Sync {
                    return Err(ParseError::new(self.span(), "a parameter carries at most one sync label"));
                }
                let ty = self.ty()?;
                let pname = self.ident()?;
                params.push(Param { sync, ty, name: pname });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        Ok(MethodSig { ret_sync, ret, name, params, span })
    }

    fn is_type_start(&self) -> bool {
        match self.peek() {
            Tok::BoolTy | Tok::IntTy | Tok::Fut => true,
            Tok::Actor => matches!(self.peek_at(1), Tok::Lt),
            Tok::Ident(_) => matches!(self.peek_at(1), Tok::Ident(_)),
            _ => false,
        }
    }

    fn ty(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::BoolTy => {
                self.advance();
                Ok(Type::Bool)
            }
            Tok::IntTy => {
                self.advance();
                Ok(Type::Int)
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Type::Interface(name))
            }
            Tok::Actor => {
                self.advance();
                self.expect(Tok::Lt)?;
                let name = self.ident()?;
                self.expect(Tok::Gt)?;
                Ok(Type::Actor(name))
            }
            Tok::Fut => {
                self.advance();
                self.expect(Tok::Lt)?;
                let inner = self.ty()?;
                self.expect(Tok::Gt)?;
                Ok(Type::Fut(Box::new(inner)))
            }
            _ => Err(self.unexpected(&["type"])),
        }
    }

    /// `{ (T x [= rhs];)* s* }`. Declarations may be interleaved with
    /// statements; they are hoisted into `Block::vars`.
    fn body(&mut self, is_method: bool) -> PResult<Block> {
        self.expect(Tok::LBrace)?;
        let mut block = Block::default();
        while !self.eat(&Tok::RBrace) {
            if self.is_type_start() {
                let ty = self.ty()?;
                let name = self.ident()?;
                if self.eat(&Tok::Assign) {
                    let value = self.rhs()?;
                    block.stmts.push(Stmt::Assign { target: name.clone(), value });
                }
                self.expect(Tok::Semi)?;
                block.vars.push(VarDecl { ty, name });
                continue;
            }
            let stmt = self.stmt()?;
            let is_return = matches!(stmt, Stmt::Return(_));
            block.stmts.push(stmt);
            if is_return && is_method && *self.peek() != Tok::RBrace {
                return Err(ParseError::new(self.span(), "`return` must be the last statement of a method body"));
            }
        }
        Ok(block)
    }

    fn nested(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.eat(&Tok::RBrace) {
            if self.is_type_start() {
                return Err(ParseError::new(
                    self.span(),
                    "declarations are only allowed at the top level of a method or main body",
                ));
            }
            stmts.push(self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek().clone() {
            Tok::If => {
                self.advance();
                let cond = self.expr()?;
                let then = self.nested()?;
                let els = if self.eat(&Tok::Else) {
                    if *self.peek() == Tok::If {
                        vec![self.stmt()?]
                    } else {
                        self.nested()?
                    }
                } else {
                    Vec::new()
                };
                Ok(Stmt::If { cond, then, els })
            }
            Tok::While => {
                self.advance();
                let cond = self.expr()?;
                let body = self.nested()?;
                Ok(Stmt::While { cond, body })
            }
            Tok::Return => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Return(e))
            }
            Tok::Ident(name) if *self.peek_at(1) == Tok::Assign => {
                self.advance();
                self.advance();
                let value = self.rhs()?;
                self.expect(Tok::Semi)?;
                Ok(Stmt::Assign { target: name, value })
            }
            _ => {
                let e = self.postfix()?;
                self.expect(Tok::Dot)?;
                match self.advance() {
                    Tok::Ident(ref g) if g == "get" => {}
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected(&["`get`"]));
                    }
                }
                self.expect(Tok::Semi)?;
                Ok(Stmt::Get(e))
            }
        }
    }

    fn rhs(&mut self) -> PResult<Rhs> {
        if self.eat(&Tok::New) {
            let is_actor = self.eat(&Tok::Actor);
            let class = self.ident()?;
            let args = if *self.peek() == Tok::LParen { self.args()? } else { Vec::new() };
            return Ok(if is_actor { Rhs::NewActor { class, args } } else { Rhs::New { class, args } });
        }
        let target = self.postfix()?;
        match self.peek().clone() {
            Tok::Dot => {
                self.advance();
                let method = self.ident()?;
                if method == "get" && *self.peek() != Tok::LParen {
                    return Ok(Rhs::Get(target));
                }
                let args = self.args()?;
                Ok(Rhs::SyncCall { target, method, args })
            }
            Tok::Bang => {
                self.advance();
                let method = self.ident()?;
                let args = self.args()?;
                Ok(Rhs::AsyncCall { target, method, args })
            }
            _ => Ok(Rhs::Expr(self.binary(0, target)?)),
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.postfix()?;
        self.binary(0, lhs)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::AndAnd => BinOp::And,
            Tok::OrOr => BinOp::Or,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            _ => return None,
        })
    }

    /// Precedence climbing over left-associative operators, continuing from
    /// an already parsed left operand.
    fn binary(&mut self, min_prec: u8, mut lhs: Expr) -> PResult<Expr> {
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec <= min_prec {
                break;
            }
            self.advance();
            let mut rhs = self.postfix()?;
            while let Some(next) = self.binop() {
                if next.precedence() > prec {
                    rhs = self.binary(prec, rhs)?;
                } else {
                    break;
                }
            }
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        while self.eat(&Tok::Question) {
            e = Expr::Resolved(Box::new(e));
        }
        Ok(e)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.postfix()?)))
            }
            Tok::Minus => {
                self.advance();
                if let Tok::Int(i) = *self.peek() {
                    self.advance();
                    return Ok(Expr::Int(-i));
                }
                Ok(Expr::Unary(UnOp::Neg, Box::new(self.postfix()?)))
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let e = match self.peek().clone() {
            Tok::Null => Expr::Null,
            Tok::True => Expr::Bool(true),
            Tok::False => Expr::Bool(false),
            Tok::This => Expr::This,
            Tok::Int(i) => Expr::Int(i),
            Tok::Ident(name) => Expr::Var(name),
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                return Ok(e);
            }
            _ => return Err(self.unexpected(&["expression"])),
        };
        self.advance();
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let p = parse_program("interface I {} class C implements I { } { Bool x; x = true; }").unwrap();
        assert_eq!(p.interfaces.len(), 1);
        assert!(p.interfaces[0].sigs.is_empty());
        assert_eq!(p.main.vars, vec![VarDecl::new(Type::Bool, "x")]);
        assert_eq!(
            p.main.stmts,
            vec![Stmt::Assign { target: "x".into(), value: Rhs::Expr(Expr::Bool(true)) }]
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let p = parse_unresolved("{ x = a - b - c < d && e == f || g; }").unwrap();
        let Stmt::Assign { value: Rhs::Expr(e), .. } = &p.main.stmts[0] else { panic!() };
        let v = Expr::var;
        let sub = Expr::binary(BinOp::Sub, Expr::binary(BinOp::Sub, v("a"), v("b")), v("c"));
        let lt = Expr::binary(BinOp::Lt, sub, v("d"));
        let eq = Expr::binary(BinOp::Eq, v("e"), v("f"));
        let and = Expr::binary(BinOp::And, lt, eq);
        assert_eq!(*e, Expr::binary(BinOp::Or, and, v("g")));
    }

    #[test]
    fn call_forms() {
        let p = parse_unresolved("{ a = b!m(1, c); d = e.n(); f = a.get; a.get; g = new C; h = new actor D(1); }")
            .unwrap();
        let rhs: Vec<_> = p
            .main
            .stmts
            .iter()
            .filter_map(|s| match s {
                Stmt::Assign { value, .. } => Some(value.clone()),
                _ => None,
            })
            .collect();
        assert!(matches!(&rhs[0], Rhs::AsyncCall { method, args, .. } if method == "m" && args.len() == 2));
        assert!(matches!(&rhs[1], Rhs::SyncCall { method, args, .. } if method == "n" && args.is_empty()));
        assert!(matches!(&rhs[2], Rhs::Get(Expr::Var(v)) if v == "a"));
        assert!(matches!(&rhs[3], Rhs::New { class, args } if class == "C" && args.is_empty()));
        assert!(matches!(&rhs[4], Rhs::NewActor { class, args } if class == "D" && args.len() == 1));
        assert_eq!(p.main.stmts[3], Stmt::Get(Expr::var("a")));
    }

    #[test]
    fn new_with_and_without_parens_normalize() {
        let a = parse_unresolved("{ x = new C; }").unwrap();
        let b = parse_unresolved("{ x = new C(); }").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resolved_postfix_and_not() {
        let p = parse_unresolved("{ while !f? { x = 1; } }").unwrap();
        let Stmt::While { cond, .. } = &p.main.stmts[0] else { panic!() };
        assert_eq!(
            *cond,
            Expr::Unary(UnOp::Not, Box::new(Expr::Resolved(Box::new(Expr::var("f")))))
        );
    }

    #[test]
    fn nested_future_types() {
        let p = parse_unresolved("{ Fut<Fut<Bool>> f; }").unwrap();
        assert_eq!(p.main.vars[0].ty, Type::Fut(Box::new(Type::Fut(Box::new(Type::Bool)))));
    }

    #[test]
    fn sync_labels_on_params_and_return() {
        let p = parse_unresolved(
            "interface I { sync<r> Bool t(sync<a> Int from, Int amt, sync<b> Int to); } { }",
        )
        .unwrap();
        let sig = &p.interfaces[0].sigs[0];
        assert_eq!(sig.ret_sync.as_deref(), Some("r"));
        assert_eq!(sig.sync_labels(), vec![Some("a"), None, Some("b")]);
    }

    #[test]
    fn double_sync_label_rejected() {
        let err = parse_unresolved("interface I { Bool t(sync<a> sync<b> Int x); } { }").unwrap_err();
        assert!(err.message.contains("at most one"));
    }

    #[test]
    fn error_positions() {
        let err = parse_unresolved("{\n  x = ;\n}").unwrap_err();
        assert_eq!((err.span.line, err.span.col), (2, 7));
        assert!(err.expected.contains(&"expression".to_string()));
        let rendered = SyntaxError::from(err).render("t.mac");
        assert!(rendered.starts_with("t.mac:2:7: expected expression"), "{rendered}");
    }

    #[test]
    fn return_must_be_last() {
        let src = "interface I { Int m(); } class C implements I { Int m() { return 1; x = 2; } } { }";
        let err = parse_unresolved(src).unwrap_err();
        assert!(err.message.contains("last statement"));
    }

    #[test]
    fn declaration_with_initializer_is_hoisted() {
        let p = parse_unresolved("{ x = 1; Int y = x + 1; }").unwrap();
        assert_eq!(p.main.vars, vec![VarDecl::new(Type::Int, "y")]);
        assert_eq!(p.main.stmts.len(), 2);
    }

    #[test]
    fn negative_literal_folds() {
        let p = parse_unresolved("{ x = -5; y = -(5); }").unwrap();
        assert_eq!(p.main.stmts[0], Stmt::Assign { target: "x".into(), value: Rhs::Expr(Expr::Int(-5)) });
        assert_eq!(
            p.main.stmts[1],
            Stmt::Assign { target: "y".into(), value: Rhs::Expr(Expr::Unary(UnOp::Neg, Box::new(Expr::Int(5)))) }
        );
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse_unresolved("// header\n/* block\n comment */ { x = 1; // trailing\n }").unwrap();
        assert_eq!(p.main.stmts.len(), 1);
    }
}
