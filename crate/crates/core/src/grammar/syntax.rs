//! Lexer, surface AST and recursive-descent parser for grammar files.

use std::fmt;

use super::category::Category;
use super::GrammarError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// `name.f.g` as written; `atom` marks identifiers that must not be captured
/// by binders (free identifiers of macro bodies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefExpr {
    pub name: String,
    pub path: Vec<String>,
    pub atom: bool,
    pub pos: Pos,
}

/// Untyped semantic expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Lam {
        binder: String,
        body: Box<Expr>,
    },
    App {
        fun: Box<Expr>,
        arg: Box<Expr>,
    },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Eq {
        lhs: RefExpr,
        rhs: RefExpr,
        positive: bool,
    },
    Ref(RefExpr),
    /// `NAME(a, b)`: a macro call, or application when `NAME` is a variable.
    Call {
        name: String,
        args: Vec<Expr>,
        pos: Pos,
    },
    Const(bool),
}

impl Expr {
    pub fn lam(binder: impl Into<String>, body: Expr) -> Expr {
        Expr::Lam {
            binder: binder.into(),
            body: Box::new(body),
        }
    }

    pub fn app(fun: Expr, arg: Expr) -> Expr {
        Expr::App {
            fun: Box::new(fun),
            arg: Box::new(arg),
        }
    }
}

impl fmt::Display for RefExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for feat in &self.path {
            write!(f, ".{feat}")?;
        }
        Ok(())
    }
}

fn expr_level(e: &Expr) -> u8 {
    match e {
        Expr::Lam { .. } => 0,
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Not(..) => 3,
        Expr::App { .. } => 4,
        _ => 5,
    }
}

fn write_expr(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if expr_level(e) < min {
        write!(f, "(")?;
        write_expr(e, 0, f)?;
        return write!(f, ")");
    }
    match e {
        Expr::Lam { binder, body } => {
            write!(f, "\\{binder}. ")?;
            write_expr(body, 0, f)
        }
        Expr::Or(a, b) => {
            write_expr(a, 2, f)?;
            write!(f, " | ")?;
            write_expr(b, 1, f)
        }
        Expr::And(a, b) => {
            write_expr(a, 3, f)?;
            write!(f, " & ")?;
            write_expr(b, 2, f)
        }
        Expr::Not(a) => {
            write!(f, "~")?;
            write_expr(a, 3, f)
        }
        Expr::App { fun, arg } => {
            write_expr(fun, 4, f)?;
            write!(f, " ")?;
            write_expr(arg, 5, f)
        }
        Expr::Eq { lhs, rhs, positive } => {
            write!(f, "{lhs}{}{rhs}", if *positive { "=" } else { "\\=" })
        }
        Expr::Ref(r) => write!(f, "{r}"),
        Expr::Call { name, args, .. } => {
            write!(f, "{name}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write_expr(a, 0, f)?;
            }
            write!(f, ")")
        }
        Expr::Const(v) => write!(f, "{v}"),
    }
}

/// Grammar-file syntax; parses back to the same expression.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, 0, f)
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Bool => write!(f, "bool"),
            TypeExpr::Fs => write!(f, "fs"),
            TypeExpr::Arrow(a, r) => match **a {
                TypeExpr::Arrow(..) => write!(f, "({a})->{r}"),
                _ => write!(f, "{a}->{r}"),
            },
        }
    }
}

/// Type expression on the right of a `Base_Categories` declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeExpr {
    Bool,
    Fs,
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Type(String, TypeExpr),
    Alias(String, Category),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    BaseCategories {
        decls: Vec<(Declaration, Pos)>,
    },
    Transformation {
        from: Category,
        to: Category,
        sem: Expr,
        pos: Pos,
    },
    Let {
        name: String,
        params: Vec<String>,
        body: Expr,
        pos: Pos,
    },
    Lex {
        word: String,
        cat: Category,
        sem: Expr,
        pos: Pos,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda, // `\` in expression context, category backslash otherwise
    Dot,
    Comma,
    Semi,
    Colon,
    Eq,
    Neq,
    Amp,
    Bar,
    Tilde,
    Slash,
    LParen,
    RParen,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Lambda => write!(f, "`\\`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Neq => write!(f, "`\\=`"),
            Tok::Amp => write!(f, "`&`"),
            Tok::Bar => write!(f, "`|`"),
            Tok::Tilde => write!(f, "`~`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
    /// no whitespace between this token and the previous one
    glued: bool,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(src: &str) -> Result<Vec<Token>, GrammarError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut glued = false;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            glued = false;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            glued = false;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            glued = false;
            continue;
        }
        let (tok, len) = if is_ident_char(c) {
            let start = i;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[start..j].iter().collect()), j - start)
        } else {
            match (c, chars.get(i + 1).copied()) {
                ('\\', Some('=')) => (Tok::Neq, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('\\', _) => (Tok::Lambda, 1),
                ('.', _) => (Tok::Dot, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                (':', _) => (Tok::Colon, 1),
                ('=', _) => (Tok::Eq, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Bar, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('/', _) => (Tok::Slash, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                _ => {
                    return Err(GrammarError::Syntax {
                        pos,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        out.push(Token { tok, pos, glued });
        i += len;
        col += len;
        glued = true;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
        glued: false,
    });
    Ok(out)
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    at: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, GrammarError> {
        Ok(Parser {
            toks: lex(src)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at < self.toks.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, GrammarError> {
        Err(GrammarError::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), GrammarError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, GrammarError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    pub(crate) fn statements(&mut self) -> Result<Vec<Statement>, GrammarError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<Statement, GrammarError> {
        let pos = self.pos();
        let kw = self.ident()?;
        let stmt = match kw.as_str() {
            "Base_Categories" => {
                let mut decls = Vec::new();
                loop {
                    let dpos = self.pos();
                    let name = self.ident()?;
                    self.expect(Tok::Eq)?;
                    decls.push((self.declaration(name)?, dpos));
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
                Statement::BaseCategories { decls }
            }
            "transformation" => {
                let from = self.category()?;
                self.expect(Tok::Eq)?;
                let to = self.category()?;
                self.expect(Tok::Colon)?;
                let sem = self.expr()?;
                Statement::Transformation { from, to, sem, pos }
            }
            "let" => {
                let name = self.ident()?;
                let mut params = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    loop {
                        params.push(self.ident()?);
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                self.expect(Tok::Eq)?;
                let body = self.expr()?;
                Statement::Let {
                    name,
                    params,
                    body,
                    pos,
                }
            }
            "lex" => {
                let word = self.ident()?;
                self.expect(Tok::Comma)?;
                let cat = self.category()?;
                self.expect(Tok::Comma)?;
                let sem = self.expr()?;
                Statement::Lex {
                    word,
                    cat,
                    sem,
                    pos,
                }
            }
            other => return Err(GrammarError::Syntax {
                pos,
                message: format!(
                    "expected `Base_Categories`, `transformation`, `let` or `lex`, found `{other}`"
                ),
            }),
        };
        self.expect(Tok::Semi)?;
        Ok(stmt)
    }

    fn declaration(&mut self, name: String) -> Result<Declaration, GrammarError> {
        let start = self.at;
        if let Ok(t) = self.type_expr() {
            if matches!(self.peek(), Tok::Comma | Tok::Semi) {
                return Ok(Declaration::Type(name, t));
            }
        }
        self.at = start;
        Ok(Declaration::Alias(name, self.category()?))
    }

    fn type_expr(&mut self) -> Result<TypeExpr, GrammarError> {
        let left = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.type_expr()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::Ident(s) if s == "fs" => {
                self.bump();
                TypeExpr::Fs
            }
            Tok::Ident(s) if s == "bool" => {
                self.bump();
                TypeExpr::Bool
            }
            other => return self.error(format!("expected a type, found {other}")),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.type_expr()?;
            Ok(TypeExpr::Arrow(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    pub(crate) fn category(&mut self) -> Result<Category, GrammarError> {
        let left = self.category_atom()?;
        match self.peek() {
            Tok::Slash => {
                self.bump();
                let right = self.category_atom()?;
                self.no_chained_slash()?;
                Ok(Category::slash(left, right))
            }
            Tok::Lambda => {
                self.bump();
                let right = self.category_atom()?;
                self.no_chained_slash()?;
                Ok(Category::backslash(left, right))
            }
            _ => Ok(left),
        }
    }

    fn no_chained_slash(&self) -> Result<(), GrammarError> {
        if matches!(self.peek(), Tok::Slash | Tok::Lambda) {
            self.error("slashes do not associate; add parentheses")
        } else {
            Ok(())
        }
    }

    fn category_atom(&mut self) -> Result<Category, GrammarError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let c = self.category()?;
                self.expect(Tok::RParen)?;
                Ok(c)
            }
            Tok::Ident(s) => {
                self.bump();
                Ok(Category::base(s))
            }
            other => self.error(format!("expected a category, found {other}")),
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, GrammarError> {
        if *self.peek() == Tok::Lambda {
            return self.lambda();
        }
        let left = self.conjunction()?;
        if *self.peek() == Tok::Bar {
            self.bump();
            let right = self.expr()?;
            return Ok(Expr::Or(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    /// `\x. body`, `\x \y. body` and `\x\y. body`.
    fn lambda(&mut self) -> Result<Expr, GrammarError> {
        self.expect(Tok::Lambda)?;
        let binder = self.ident()?;
        match self.peek() {
            Tok::Dot => {
                self.bump();
            }
            Tok::Lambda => {}
            other => return self.error(format!("expected `.` after binder, found {other}")),
        }
        let body = self.expr()?;
        Ok(Expr::lam(binder, body))
    }

    fn conjunction(&mut self) -> Result<Expr, GrammarError> {
        let left = self.unary()?;
        if *self.peek() == Tok::Amp {
            self.bump();
            let right = if *self.peek() == Tok::Lambda {
                self.lambda()?
            } else {
                self.conjunction()?
            };
            return Ok(Expr::And(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, GrammarError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Expr::Not(Box::new(self.unary()?)))
            }
            Tok::Lambda => self.lambda(),
            _ => self.application(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn application(&mut self) -> Result<Expr, GrammarError> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            let arg = self.atom()?;
            e = Expr::app(e, arg);
        }
        Ok(e)
    }

    fn reference(&mut self) -> Result<RefExpr, GrammarError> {
        let pos = self.pos();
        let name = self.ident()?;
        let mut path = Vec::new();
        while *self.peek() == Tok::Dot && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            path.push(self.ident()?);
        }
        Ok(RefExpr {
            name,
            path,
            atom: false,
            pos,
        })
    }

    fn atom(&mut self) -> Result<Expr, GrammarError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "true" || name == "false" => {
                self.bump();
                Ok(Expr::Const(name == "true"))
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                let call = *self.peek_at(1) == Tok::LParen && self.toks[self.at + 1].glued;
                if call {
                    self.bump();
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Call { name, args, pos });
                }
                let lhs = self.reference()?;
                let positive = match self.peek() {
                    Tok::Eq => true,
                    Tok::Neq => false,
                    _ => return Ok(Expr::Ref(lhs)),
                };
                self.bump();
                let rhs = self.reference()?;
                Ok(Expr::Eq { lhs, rhs, positive })
            }
            other => self.error(format!("expected an expression, found {other}")),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        *self.peek() == Tok::Eof
    }
}

/// Parses a single semantic expression.
pub fn parse_expr(src: &str) -> Result<Expr, GrammarError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if !p.at_end() {
        return p.error(format!("unexpected {} after expression", p.peek()));
    }
    Ok(e)
}

/// Parses a single category expression.
pub fn parse_category(src: &str) -> Result<Category, GrammarError> {
    let mut p = Parser::new(src)?;
    let c = p.category()?;
    if !p.at_end() {
        return p.error(format!("unexpected {} after category", p.peek()));
    }
    Ok(c)
}

pub(crate) fn parse_statements(src: &str) -> Result<Vec<Statement>, GrammarError> {
    Parser::new(src)?.statements()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(name: &str) -> RefExpr {
        RefExpr {
            name: name.into(),
            path: vec![],
            atom: false,
            pos: Pos::default(),
        }
    }

    fn strip(e: Expr) -> Expr {
        match e {
            Expr::Lam { binder, body } => Expr::lam(binder, strip(*body)),
            Expr::App { fun, arg } => Expr::app(strip(*fun), strip(*arg)),
            Expr::And(a, b) => Expr::And(Box::new(strip(*a)), Box::new(strip(*b))),
            Expr::Or(a, b) => Expr::Or(Box::new(strip(*a)), Box::new(strip(*b))),
            Expr::Not(a) => Expr::Not(Box::new(strip(*a))),
            Expr::Eq {
                mut lhs,
                mut rhs,
                positive,
            } => {
                lhs.pos = Pos::default();
                rhs.pos = Pos::default();
                Expr::Eq { lhs, rhs, positive }
            }
            Expr::Ref(mut x) => {
                x.pos = Pos::default();
                Expr::Ref(x)
            }
            Expr::Call { name, args, .. } => Expr::Call {
                name,
                args: args.into_iter().map(strip).collect(),
                pos: Pos::default(),
            },
            c => c,
        }
    }

    #[test]
    fn binder_forms() {
        let a = strip(parse_expr("\\S \\Vt \\C. S (Vt C)").unwrap());
        let b = strip(parse_expr("\\S\\Vt\\C. S (Vt C)").unwrap());
        let c = strip(parse_expr("\\S.\\Vt.\\C. S (Vt C)").unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
        let body = Expr::app(
            Expr::Ref(r("S")),
            Expr::app(Expr::Ref(r("Vt")), Expr::Ref(r("C"))),
        );
        assert_eq!(a, Expr::lam("S", Expr::lam("Vt", Expr::lam("C", body))));
    }

    #[test]
    fn precedence() {
        let e = strip(parse_expr("~a=b & c=d | P x.f y").unwrap());
        let eq = |l: &str, rr: &str| Expr::Eq {
            lhs: r(l),
            rhs: r(rr),
            positive: true,
        };
        let mut xf = r("x");
        xf.path = vec!["f".into()];
        let app = Expr::app(
            Expr::app(Expr::Ref(r("P")), Expr::Ref(xf)),
            Expr::Ref(r("y")),
        );
        let expected = Expr::Or(
            Box::new(Expr::And(
                Box::new(Expr::Not(Box::new(eq("a", "b")))),
                Box::new(eq("c", "d")),
            )),
            Box::new(app),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn glued_parenthesis_is_a_call() {
        let e = strip(parse_expr("3RD_SG(s.arg)").unwrap());
        assert!(
            matches!(e, Expr::Call { ref name, ref args, .. } if name == "3RD_SG" && args.len() == 1)
        );
        let e = strip(parse_expr("P (s.arg)").unwrap());
        assert!(matches!(e, Expr::App { .. }));
    }

    #[test]
    fn categories() {
        assert_eq!(
            parse_category("np\\((tv\\iv)/np)").unwrap(),
            Category::backslash(
                Category::base("np"),
                Category::slash(
                    Category::backslash(Category::base("tv"), Category::base("iv")),
                    Category::base("np")
                )
            )
        );
        assert!(parse_category("s/np/np").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_expr("\\x. x.f = ").unwrap_err();
        match err {
            GrammarError::Syntax { pos, .. } => assert_eq!(pos, Pos { line: 1, col: 11 }),
            other => panic!("{other:?}"),
        }
    }
}
