//! Pretty printer producing source that parses back to the same tree.

use std::fmt::Write;

use crate::ast::*;

pub fn pretty_print(p: &Program) -> String {
    let mut out = Printer::default();
    for i in &p.interfaces {
        out.interface(i);
    }
    for c in &p.classes {
        out.class(c);
    }
    out.block(&p.main);
    out.buf
}

pub fn type_to_string(ty: &Type) -> String {
    match ty {
        Type::Bool => "Bool".into(),
        Type::Int => "Int".into(),
        Type::Interface(name) => name.clone(),
        Type::Actor(name) => format!("Actor<{name}>"),
        Type::Fut(inner) => format!("Fut<{}>", type_to_string(inner)),
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

/// Binary expressions are always parenthesized, which keeps the printer
/// independent of operator precedence.
fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Null => out.push_str("null"),
        Expr::Bool(b) => write!(out, "{b}").unwrap(),
        Expr::Int(i) => write!(out, "{i}").unwrap(),
        Expr::Var(v) => out.push_str(v),
        Expr::This => out.push_str("this"),
        Expr::Unary(UnOp::Not, e) => {
            out.push('!');
            write_atom(out, e);
        }
        Expr::Unary(UnOp::Neg, e) => {
            // `-(..)` so that a literal operand is not folded into a
            // negative literal on re-parse.
            out.push_str("-(");
            write_expr(out, e);
            out.push(')');
        }
        Expr::Binary(op, l, r) => {
            out.push('(');
            write_expr(out, l);
            write!(out, " {} ", op.symbol()).unwrap();
            write_expr(out, r);
            out.push(')');
        }
        Expr::Resolved(e) => {
            write_atom(out, e);
            out.push('?');
        }
    }
}

/// An operand of a postfix or prefix form.
fn write_atom(out: &mut String, e: &Expr) {
    match e {
        Expr::Var(_) | Expr::This | Expr::Null | Expr::Bool(_) | Expr::Binary(..) | Expr::Resolved(_) => {
            write_expr(out, e)
        }
        Expr::Int(i) if *i >= 0 => write_expr(out, e),
        _ => {
            out.push('(');
            write_expr(out, e);
            out.push(')');
        }
    }
}

#[derive(Default)]
struct Printer {
    buf: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.buf.push_str("    ");
        }
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    fn interface(&mut self, i: &InterfaceDecl) {
        self.line(&format!("interface {} {{", i.name));
        self.indent += 1;
        for s in &i.sigs {
            self.line(&format!("{};", sig(s)));
        }
        self.indent -= 1;
        self.line("}");
    }

    fn class(&mut self, c: &ClassDecl) {
        let params = if c.params.is_empty() {
            String::new()
        } else {
            let ps: Vec<_> = c.params.iter().map(|v| format!("{} {}", type_to_string(&v.ty), v.name)).collect();
            format!("({})", ps.join(", "))
        };
        self.line(&format!("class {}{} implements {} {{", c.name, params, c.implements.join(", ")));
        self.indent += 1;
        for f in &c.fields {
            self.line(&format!("{} {};", type_to_string(&f.ty), f.name));
        }
        for m in &c.methods {
            self.line(&format!("{} {{", sig(&m.sig)));
            self.indent += 1;
            self.block_contents(&m.body);
            self.indent -= 1;
            self.line("}");
        }
        self.indent -= 1;
        self.line("}");
    }

    fn block(&mut self, b: &Block) {
        if b.vars.is_empty() && b.stmts.is_empty() {
            self.line("{ }");
            return;
        }
        self.line("{");
        self.indent += 1;
        self.block_contents(b);
        self.indent -= 1;
        self.line("}");
    }

    fn block_contents(&mut self, b: &Block) {
        for v in &b.vars {
            self.line(&format!("{} {};", type_to_string(&v.ty), v.name));
        }
        self.stmts(&b.stmts);
    }

    fn stmts(&mut self, stmts: &[Stmt]) {
        for s in stmts {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Assign { target, value } => self.line(&format!("{target} = {};", rhs(value))),
            Stmt::Get(e) => {
                let mut t = String::new();
                write_atom(&mut t, e);
                self.line(&format!("{t}.get;"));
            }
            Stmt::If { cond, then, els } => {
                self.line(&format!("if ({}) {{", expr_to_string(cond)));
                self.indent += 1;
                self.stmts(then);
                self.indent -= 1;
                self.line("} else {");
                self.indent += 1;
                self.stmts(els);
                self.indent -= 1;
                self.line("}");
            }
            Stmt::While { cond, body } => {
                self.line(&format!("while ({}) {{", expr_to_string(cond)));
                self.indent += 1;
                self.stmts(body);
                self.indent -= 1;
                self.line("}");
            }
            Stmt::Return(e) => self.line(&format!("return {};", expr_to_string(e))),
        }
    }
}

fn sig(s: &MethodSig) -> String {
    let mut out = String::new();
    if let Some(l) = &s.ret_sync {
        write!(out, "sync<{l}> ").unwrap();
    }
    write!(out, "{} {}(", type_to_string(&s.ret), s.name).unwrap();
    let params: Vec<_> = s
        .params
        .iter()
        .map(|p| match &p.sync {
            Some(l) => format!("sync<{l}> {} {}", type_to_string(&p.ty), p.name),
            None => format!("{} {}", type_to_string(&p.ty), p.name),
        })
        .collect();
    out.push_str(&params.join(", "));
    out.push(')');
    out
}

fn args(a: &[Expr]) -> String {
    let parts: Vec<_> = a.iter().map(expr_to_string).collect();
    format!("({})", parts.join(", "))
}

fn rhs(r: &Rhs) -> String {
    let target = |e: &Expr| {
        let mut t = String::new();
        write_atom(&mut t, e);
        t
    };
    match r {
        Rhs::Expr(e) => expr_to_string(e),
        Rhs::New { class, args: a } => format!("new {class}{}", args(a)),
        Rhs::NewActor { class, args: a } => format!("new actor {class}{}", args(a)),
        Rhs::SyncCall { target: t, method, args: a } => format!("{}.{method}{}", target(t), args(a)),
        Rhs::AsyncCall { target: t, method, args: a } => format!("{}!{method}{}", target(t), args(a)),
        Rhs::Get(e) => format!("{}.get", target(e)),
    }
}
