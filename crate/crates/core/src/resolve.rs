//! Name resolution and arity checks over a parsed program.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::ast::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {kind}")]
pub struct ResolutionError {
    pub span: Span,
    pub kind: ResolutionErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolutionErrorKind {
    #[error("duplicate declaration of `{0}`")]
    DuplicateName(String),
    #[error("undeclared interface `{0}`")]
    UndeclaredInterface(String),
    #[error("undeclared class `{0}`")]
    UndeclaredClass(String),
    #[error("`{0}` is an interface and cannot be instantiated")]
    InstantiateInterface(String),
    #[error("duplicate method `{method}` in `{owner}`")]
    DuplicateMethod { owner: String, method: String },
    #[error("class `{class}` does not implement `{interface}.{method}`")]
    MissingMethod { class: String, interface: String, method: String },
    #[error("undeclared variable `{name}` in {scope}")]
    UndeclaredVariable { name: String, scope: String },
    #[error("duplicate variable `{name}` in {scope}")]
    DuplicateVariable { name: String, scope: String },
    #[error("no method `{method}` taking {arity} argument(s) is declared")]
    UndeclaredMethod { method: String, arity: usize },
    #[error("class `{class}` takes {expected} constructor argument(s), {found} given")]
    ConstructorArity { class: String, expected: usize, found: usize },
    #[error("method `{0}` does not end with `return`")]
    MissingReturn(String),
    #[error("`return` is only allowed as the last statement of a method body, in {0}")]
    MisplacedReturn(String),
}

/// Checks every resolution rule, reporting the first violation.
pub fn check(p: &Program) -> Result<(), ResolutionError> {
    Resolver::new(p)?.run()
}

struct Resolver<'a> {
    p: &'a Program,
    interfaces: HashMap<&'a str, &'a InterfaceDecl>,
    classes: HashMap<&'a str, &'a ClassDecl>,
    /// Arities of async-callable methods (interface signatures).
    async_arities: HashMap<&'a str, HashSet<usize>>,
    /// Arities of sync-callable methods (any class method).
    sync_arities: HashMap<&'a str, HashSet<usize>>,
}

fn err(span: Span, kind: ResolutionErrorKind) -> ResolutionError {
    ResolutionError { span, kind }
}

impl<'a> Resolver<'a> {
    fn new(p: &'a Program) -> Result<Self, ResolutionError> {
        let mut names = HashSet::new();
        let mut interfaces = HashMap::new();
        let mut classes = HashMap::new();
        let mut async_arities: HashMap<&str, HashSet<usize>> = HashMap::new();
        let mut sync_arities: HashMap<&str, HashSet<usize>> = HashMap::new();
        for i in &p.interfaces {
            if !names.insert(i.name.as_str()) {
                return Err(err(i.span, ResolutionErrorKind::DuplicateName(i.name.clone())));
            }
            interfaces.insert(i.name.as_str(), i);
            let mut seen = HashSet::new();
            for s in &i.sigs {
                if !seen.insert(s.name.as_str()) {
                    return Err(err(
                        s.span,
                        ResolutionErrorKind::DuplicateMethod { owner: i.name.clone(), method: s.name.clone() },
                    ));
                }
                async_arities.entry(&s.name).or_default().insert(s.params.len());
            }
        }
        for c in &p.classes {
            if !names.insert(c.name.as_str()) {
                return Err(err(c.span, ResolutionErrorKind::DuplicateName(c.name.clone())));
            }
            classes.insert(c.name.as_str(), c);
            for m in &c.methods {
                sync_arities.entry(&m.sig.name).or_default().insert(m.sig.params.len());
            }
        }
        Ok(Resolver { p, interfaces, classes, async_arities, sync_arities })
    }

    fn run(&self) -> Result<(), ResolutionError> {
        for i in &self.p.interfaces {
            for s in &i.sigs {
                self.check_sig(s)?;
            }
        }
        for c in &self.p.classes {
            self.check_class(c)?;
        }
        let main_span = Span::default();
        let scope = "main".to_string();
        let mut vars = HashSet::new();
        for v in &self.p.main.vars {
            self.check_type(&v.ty, main_span)?;
            if !vars.insert(v.name.as_str()) {
                return Err(err(
                    main_span,
                    ResolutionErrorKind::DuplicateVariable { name: v.name.clone(), scope: scope.clone() },
                ));
            }
        }
        let ctx = BodyCtx { vars, scope, span: main_span };
        self.check_stmts(&self.p.main.stmts, &ctx, false)
    }

    fn check_type(&self, ty: &Type, span: Span) -> Result<(), ResolutionError> {
        match ty {
            Type::Bool | Type::Int => Ok(()),
            Type::Interface(name) | Type::Actor(name) => {
                if self.interfaces.contains_key(name.as_str()) {
                    Ok(())
                } else {
                    Err(err(span, ResolutionErrorKind::UndeclaredInterface(name.clone())))
                }
            }
            Type::Fut(inner) => self.check_type(inner, span),
        }
    }

    fn check_sig(&self, s: &MethodSig) -> Result<(), ResolutionError> {
        self.check_type(&s.ret, s.span)?;
        let mut seen = HashSet::new();
        for prm in &s.params {
            self.check_type(&prm.ty, s.span)?;
            if !seen.insert(prm.name.as_str()) {
                return Err(err(
                    s.span,
                    ResolutionErrorKind::DuplicateVariable { name: prm.name.clone(), scope: format!("`{}`", s.name) },
                ));
            }
        }
        Ok(())
    }

    fn check_class(&self, c: &ClassDecl) -> Result<(), ResolutionError> {
        for iname in &c.implements {
            if !self.interfaces.contains_key(iname.as_str()) {
                return Err(err(c.span, ResolutionErrorKind::UndeclaredInterface(iname.clone())));
            }
        }
        let mut fields = HashSet::new();
        for f in c.all_fields() {
            self.check_type(&f.ty, c.span)?;
            if !fields.insert(f.name.as_str()) {
                return Err(err(
                    c.span,
                    ResolutionErrorKind::DuplicateVariable { name: f.name.clone(), scope: format!("class `{}`", c.name) },
                ));
            }
        }
        let mut methods = HashSet::new();
        for m in &c.methods {
            if !methods.insert(m.sig.name.as_str()) {
                return Err(err(
                    m.sig.span,
                    ResolutionErrorKind::DuplicateMethod { owner: c.name.clone(), method: m.sig.name.clone() },
                ));
            }
        }
        for iname in &c.implements {
            let iface = self.interfaces[iname.as_str()];
            for s in &iface.sigs {
                if !c.method(&s.name).is_some_and(|m| m.sig.conforms_to(s)) {
                    return Err(err(
                        c.span,
                        ResolutionErrorKind::MissingMethod {
                            class: c.name.clone(),
                            interface: iname.clone(),
                            method: s.name.clone(),
                        },
                    ));
                }
            }
        }
        for m in &c.methods {
            self.check_method(c, m, &fields)?;
        }
        Ok(())
    }

    fn check_method(&self, c: &ClassDecl, m: &'a MethodDef, fields: &HashSet<&'a str>) -> Result<(), ResolutionError> {
        self.check_sig(&m.sig)?;
        let scope = format!("`{}.{}`", c.name, m.sig.name);
        let span = m.sig.span;
        let mut locals = HashSet::new();
        for prm in &m.sig.params {
            locals.insert(prm.name.as_str());
        }
        for v in &m.body.vars {
            self.check_type(&v.ty, span)?;
            if !locals.insert(v.name.as_str()) {
                return Err(err(span, ResolutionErrorKind::DuplicateVariable { name: v.name.clone(), scope }));
            }
        }
        let mut vars = fields.clone();
        vars.extend(locals);
        let ctx = BodyCtx { vars, scope, span };
        match m.body.stmts.last() {
            Some(Stmt::Return(_)) => {}
            _ => return Err(err(span, ResolutionErrorKind::MissingReturn(format!("{}.{}", c.name, m.sig.name)))),
        }
        let (last, init) = m.body.stmts.split_last().expect("checked non-empty");
        self.check_stmts(init, &ctx, false)?;
        self.check_stmts(std::slice::from_ref(last), &ctx, true)
    }

    fn check_stmts(&self, stmts: &[Stmt], ctx: &BodyCtx<'_>, return_ok: bool) -> Result<(), ResolutionError> {
        for s in stmts {
            match s {
                Stmt::Assign { target, value } => {
                    ctx.var(target)?;
                    self.check_rhs(value, ctx)?;
                }
                Stmt::Get(e) => self.check_expr(e, ctx)?,
                Stmt::If { cond, then, els } => {
                    self.check_expr(cond, ctx)?;
                    self.check_stmts(then, ctx, false)?;
                    self.check_stmts(els, ctx, false)?;
                }
                Stmt::While { cond, body } => {
                    self.check_expr(cond, ctx)?;
                    self.check_stmts(body, ctx, false)?;
                }
                Stmt::Return(e) => {
                    if !return_ok {
                        return Err(err(ctx.span, ResolutionErrorKind::MisplacedReturn(ctx.scope.clone())));
                    }
                    self.check_expr(e, ctx)?;
                }
            }
        }
        Ok(())
    }

    fn check_rhs(&self, rhs: &Rhs, ctx: &BodyCtx<'_>) -> Result<(), ResolutionError> {
        match rhs {
            Rhs::Expr(e) | Rhs::Get(e) => self.check_expr(e, ctx),
            Rhs::New { class, args } | Rhs::NewActor { class, args } => {
                let Some(decl) = self.classes.get(class.as_str()) else {
                    let kind = if self.interfaces.contains_key(class.as_str()) {
                        ResolutionErrorKind::InstantiateInterface(class.clone())
                    } else {
                        ResolutionErrorKind::UndeclaredClass(class.clone())
                    };
                    return Err(err(ctx.span, kind));
                };
                if decl.params.len() != args.len() {
                    return Err(err(
                        ctx.span,
                        ResolutionErrorKind::ConstructorArity {
                            class: class.clone(),
                            expected: decl.params.len(),
                            found: args.len(),
                        },
                    ));
                }
                args.iter().try_for_each(|a| self.check_expr(a, ctx))
            }
            Rhs::SyncCall { target, method, args } | Rhs::AsyncCall { target, method, args } => {
                let table = if matches!(rhs, Rhs::SyncCall { .. }) { &self.sync_arities } else { &self.async_arities };
                if !table.get(method.as_str()).is_some_and(|a| a.contains(&args.len())) {
                    return Err(err(
                        ctx.span,
                        ResolutionErrorKind::UndeclaredMethod { method: method.clone(), arity: args.len() },
                    ));
                }
                self.check_expr(target, ctx)?;
                args.iter().try_for_each(|a| self.check_expr(a, ctx))
            }
        }
    }

    fn check_expr(&self, e: &Expr, ctx: &BodyCtx<'_>) -> Result<(), ResolutionError> {
        match e {
            Expr::Null | Expr::Bool(_) | Expr::Int(_) | Expr::This => Ok(()),
            Expr::Var(name) => ctx.var(name),
            Expr::Unary(_, e) | Expr::Resolved(e) => self.check_expr(e, ctx),
            Expr::Binary(_, l, r) => {
                self.check_expr(l, ctx)?;
                self.check_expr(r, ctx)
            }
        }
    }
}

struct BodyCtx<'a> {
    vars: HashSet<&'a str>,
    scope: String,
    span: Span,
}

impl BodyCtx<'_> {
    fn var(&self, name: &str) -> Result<(), ResolutionError> {
        if self.vars.contains(name) {
            Ok(())
        } else {
            Err(err(
                self.span,
                ResolutionErrorKind::UndeclaredVariable { name: name.to_string(), scope: self.scope.clone() },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::ResolutionErrorKind as K;
    use crate::parse::{parse_program, SyntaxError};

    fn kind(src: &str) -> K {
        match parse_program(src) {
            Err(SyntaxError::Resolution(e)) => e.kind,
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_implemented_interface() {
        assert_eq!(kind("class C implements J {} { }"), K::UndeclaredInterface("J".into()));
    }

    #[test]
    fn new_actor_on_interface_rejected_on_class_accepted() {
        let base = "interface I {} class C implements I {}";
        assert_eq!(
            kind(&format!("{base} {{ Actor<I> a; a = new actor I(); }}")),
            K::InstantiateInterface("I".into())
        );
        parse_program(&format!("{base} {{ Actor<I> a; a = new actor C(); }}")).unwrap();
    }

    #[test]
    fn duplicate_names() {
        assert_eq!(kind("interface I {} interface I {} { }"), K::DuplicateName("I".into()));
        assert_eq!(kind("interface I {} class I implements I {} { }"), K::DuplicateName("I".into()));
        assert!(matches!(kind("interface I { Int m(); Int m(); } { }"), K::DuplicateMethod { .. }));
    }

    #[test]
    fn missing_interface_method() {
        let k = kind("interface I { Int m(Int x); } class C implements I { } { }");
        assert_eq!(k, K::MissingMethod { class: "C".into(), interface: "I".into(), method: "m".into() });
        // Label mismatch does not conform either.
        let k = kind(
            "interface I { Int m(sync<a> Int x); } class C implements I { Int m(Int x) { return x; } } { }",
        );
        assert!(matches!(k, K::MissingMethod { .. }));
    }

    #[test]
    fn undeclared_variable_and_method() {
        assert!(matches!(kind("{ x = 1; }"), K::UndeclaredVariable { .. }));
        assert!(matches!(kind("{ Actor<I> a; a = a!m(); } "), K::UndeclaredInterface(_)));
        let k = kind("interface I { Int m(); } class C implements I { Int m() { return 1; } } { Fut<Int> f; f = f!m(1); }");
        assert_eq!(k, K::UndeclaredMethod { method: "m".into(), arity: 1 });
    }

    #[test]
    fn fields_visible_in_methods() {
        parse_program(
            "interface I { Int m(Int y); } class C(Int p) implements I { Int q; Int m(Int y) { q = p + y; return q; } } { }",
        )
        .unwrap();
    }

    #[test]
    fn constructor_arity() {
        let k = kind("interface I {} class C(Int p) implements I {} { I c; c = new C(); }");
        assert_eq!(k, K::ConstructorArity { class: "C".into(), expected: 1, found: 0 });
    }

    #[test]
    fn missing_and_misplaced_return() {
        assert!(matches!(
            kind("interface I { Int m(); } class C implements I { Int m() { } } { }"),
            K::MissingReturn(_)
        ));
        assert!(matches!(
            kind("interface I { Int m(); } class C implements I { Int m() { if true { return 1; } return 2; } } { }"),
            K::MisplacedReturn(_)
        ));
        assert!(matches!(kind("{ return 1; }"), K::MisplacedReturn(_)));
    }
}
