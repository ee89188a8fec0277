//! Abstract syntax of MAC programs.
//!
//! Source positions are carried in [`Span`] values whose equality is
//! trivially true, so two trees compare equal up to positions.

use std::fmt;
use std::hash::{Hash, Hasher};

/// A 1-based source position. Compares equal to every other span.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Int,
    /// An interface type `I`: a reference to an active object.
    Interface(String),
    /// `Actor<I>`: a reference to a multi-threaded actor.
    Actor(String),
    /// `Fut<T>`.
    Fut(Box<Type>),
}

impl Type {
    /// The value a variable of this type holds before its first assignment.
    pub fn default_value(&self) -> crate::Value {
        match self {
            Type::Bool => crate::Value::Bool(false),
            Type::Int => crate::Value::Int(0),
            Type::Interface(_) | Type::Actor(_) | Type::Fut(_) => crate::Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub interfaces: Vec<InterfaceDecl>,
    pub classes: Vec<ClassDecl>,
    pub main: Block,
}

impl Program {
    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InterfaceDecl {
    pub name: String,
    pub sigs: Vec<MethodSig>,
    pub span: Span,
}

impl InterfaceDecl {
    pub fn sig(&self, method: &str) -> Option<&MethodSig> {
        self.sigs.iter().find(|s| s.name == method)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassDecl {
    pub name: String,
    /// Constructor parameters; together with `fields` they form the
    /// fields of every instance.
    pub params: Vec<VarDecl>,
    pub implements: Vec<String>,
    pub fields: Vec<VarDecl>,
    pub methods: Vec<MethodDef>,
    pub span: Span,
}

impl ClassDecl {
    pub fn method(&self, name: &str) -> Option<&MethodDef> {
        self.methods.iter().find(|m| m.sig.name == name)
    }

    /// Parameters followed by attributes.
    pub fn all_fields(&self) -> impl Iterator<Item = &VarDecl> {
        self.params.iter().chain(self.fields.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub ty: Type,
    pub name: String,
}

impl VarDecl {
    pub fn new(ty: Type, name: impl Into<String>) -> Self {
        VarDecl { ty, name: name.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub sync: Option<String>,
    pub ty: Type,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodSig {
    /// Label on the return position. Stored, but scheduling ignores it.
    pub ret_sync: Option<String>,
    pub ret: Type,
    pub name: String,
    pub params: Vec<Param>,
    pub span: Span,
}

impl MethodSig {
    /// The sync label of each parameter position, in order.
    pub fn sync_labels(&self) -> Vec<Option<&str>> {
        self.params.iter().map(|p| p.sync.as_deref()).collect()
    }

    /// Same shape as `other`: name, return type, and per-position parameter
    /// types and labels. Parameter names may differ.
    pub fn conforms_to(&self, other: &MethodSig) -> bool {
        self.name == other.name
            && self.ret == other.ret
            && self.ret_sync == other.ret_sync
            && self.params.len() == other.params.len()
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| a.ty == b.ty && a.sync == b.sync)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MethodDef {
    pub sig: MethodSig,
    pub body: Block,
}

/// Local declarations followed by statements. Declarations with an
/// initializer in source are split into a declaration and an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Block {
    pub vars: Vec<VarDecl>,
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign { target: String, value: Rhs },
    /// `e.get;` on its own: wait for the future without binding it.
    Get(Expr),
    If { cond: Expr, then: Vec<Stmt>, els: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    Return(Expr),
}

/// Right-hand side of an assignment. Side-effecting forms only appear here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rhs {
    Expr(Expr),
    New { class: String, args: Vec<Expr> },
    NewActor { class: String, args: Vec<Expr> },
    SyncCall { target: Expr, method: String, args: Vec<Expr> },
    AsyncCall { target: Expr, method: String, args: Vec<Expr> },
    Get(Expr),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    And,
    Or,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

/// Side-effect-free expressions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Null,
    Bool(bool),
    Int(i64),
    Var(String),
    This,
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// `e?`: true once the future `e` is resolved.
    Resolved(Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }
}
