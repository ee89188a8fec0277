//! Statements with nested blocks behind shared pointers, so closures can
//! hold continuations without copying code.

use std::collections::HashMap;
use std::sync::Arc;

use crate::ast::{self, Expr, MethodSig, Program, Rhs, Stmt, VarDecl};

#[derive(Debug)]
pub(crate) enum Code {
    Assign { target: String, value: Rhs },
    Get(Expr),
    If { cond: Expr, then: Arc<[Code]>, els: Arc<[Code]> },
    While { cond: Expr, body: Arc<[Code]> },
    Return(Expr),
}

pub(crate) fn compile(stmts: &[Stmt]) -> Arc<[Code]> {
    stmts
        .iter()
        .map(|s| match s {
            Stmt::Assign { target, value } => Code::Assign { target: target.clone(), value: value.clone() },
            Stmt::Get(e) => Code::Get(e.clone()),
            Stmt::If { cond, then, els } => Code::If { cond: cond.clone(), then: compile(then), els: compile(els) },
            Stmt::While { cond, body } => Code::While { cond: cond.clone(), body: compile(body) },
            Stmt::Return(e) => Code::Return(e.clone()),
        })
        .collect()
}

pub(crate) struct MethodCode {
    pub sig: MethodSig,
    pub locals: Vec<VarDecl>,
    pub body: Arc<[Code]>,
}

pub(crate) struct ClassCode {
    pub params: Vec<VarDecl>,
    pub attributes: Vec<VarDecl>,
    pub implements: Vec<String>,
    pub methods: HashMap<String, MethodCode>,
}

pub(crate) struct ProgramCode {
    pub classes: HashMap<String, ClassCode>,
    pub interfaces: HashMap<String, ast::InterfaceDecl>,
    pub main_vars: Vec<VarDecl>,
    pub main: Arc<[Code]>,
}

impl ProgramCode {
    pub fn new(p: &Program) -> Self {
        let classes = p
            .classes
            .iter()
            .map(|c| {
                let methods = c
                    .methods
                    .iter()
                    .map(|m| {
                        let code = MethodCode {
                            sig: m.sig.clone(),
                            locals: m.body.vars.clone(),
                            body: compile(&m.body.stmts),
                        };
                        (m.sig.name.clone(), code)
                    })
                    .collect();
                let code = ClassCode {
                    params: c.params.clone(),
                    attributes: c.fields.clone(),
                    implements: c.implements.clone(),
                    methods,
                };
                (c.name.clone(), code)
            })
            .collect();
        ProgramCode {
            classes,
            interfaces: p.interfaces.iter().map(|i| (i.name.clone(), i.clone())).collect(),
            main_vars: p.main.vars.clone(),
            main: compile(&p.main.stmts),
        }
    }
}
