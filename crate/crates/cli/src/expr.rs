//! Graph expression language.
//!
//! ```text
//! expr := IDENT '(' args ')' | IDENT
//! args := (expr | INT) (',' (expr | INT))*
//! ```

use std::fmt;

use freegraph::graph::{
    branch_graph, comb_product, m_free_product, make_standard, orth_iter, orth_product, star_product, Family,
};
use freegraph::RootedGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    K(u32),
    F(u32),
    Fork(u32),
    Z2,
    P(u32),
    T1(Option<u32>),
    Z(Option<u32>),
    Tn(u32, Option<u32>),
    Hn(u32, Option<u32>),
    Star(Box<Expr>, Box<Expr>),
    Comb(Box<Expr>, Box<Expr>),
    Orth(Box<Expr>, Box<Expr>),
    OrthIter(Box<Expr>, Box<Expr>, u32),
    MFree(Vec<Expr>, u32),
    Branch(Box<Expr>, Box<Expr>, u32, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax {
        line: usize,
        col: usize,
        expected: Vec<String>,
        found: String,
    },
    Arity {
        line: usize,
        col: usize,
        operator: String,
        message: String,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax {
                line,
                col,
                expected,
                found,
            } => write!(f, "syntax error at {line}:{col}: expected {}, found {found}", expected.join(" or ")),
            ParseError::Arity {
                line,
                col,
                operator,
                message,
            } => write!(f, "bad arguments for '{operator}' at {line}:{col}: {message}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let n = s.parse().map_err(|_| ParseError::Syntax {
                    line: l0,
                    col: c0,
                    expected: vec!["integer below 2^64".into()],
                    found: s.clone(),
                })?;
                toks.push((Tok::Int(n), l0, c0));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                toks.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: l0,
                    col: c0,
                    expected: vec!["identifier".into(), "integer".into(), "'('".into(), "')'".into(), "','".into()],
                    found: format!("'{c}'"),
                })
            }
        };
        toks.push((tok, l0, c0));
        i += 1;
        col += 1;
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks, pos: 0 })
}

enum Arg {
    Expr(Expr),
    Int(u64, usize, usize),
}

impl Lexer {
    fn peek(&self) -> &(Tok, usize, usize) {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> (Tok, usize, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (tok, line, col) = self.peek();
        ParseError::Syntax {
            line: *line,
            col: *col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let (name, line, col) = match self.peek().clone() {
            (Tok::Ident(s), l, c) => {
                self.bump();
                (s, l, c)
            }
            _ => return Err(self.error(&["identifier"])),
        };
        let mut args = Vec::new();
        if self.peek().0 == Tok::LParen {
            self.bump();
            loop {
                match self.peek().clone() {
                    (Tok::Int(n), l, c) => {
                        self.bump();
                        args.push(Arg::Int(n, l, c));
                    }
                    (Tok::Ident(_), _, _) => args.push(Arg::Expr(self.expr()?)),
                    _ => return Err(self.error(&["identifier", "integer"])),
                }
                match self.peek().0 {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.error(&["','", "')'"])),
                }
            }
        }
        build_node(&name, args, line, col)
    }
}

fn build_node(name: &str, args: Vec<Arg>, line: usize, col: usize) -> Result<Expr, ParseError> {
    let arity = |message: String| ParseError::Arity {
        line,
        col,
        operator: name.to_string(),
        message,
    };
    let mut graphs = Vec::new();
    let mut ints = Vec::new();
    let mut seen_int = false;
    for a in args {
        match a {
            Arg::Expr(e) => {
                if seen_int {
                    return Err(arity("graph arguments must precede integer arguments".into()));
                }
                graphs.push(e);
            }
            Arg::Int(n, l, c) => {
                seen_int = true;
                let at = |message: String| ParseError::Arity {
                    line: l,
                    col: c,
                    operator: name.to_string(),
                    message,
                };
                if n == 0 {
                    return Err(at("integer arguments must be at least 1".into()));
                }
                ints.push(u32::try_from(n).map_err(|_| at(format!("integer {n} is too large")))?);
            }
        }
    }
    let shape = |g: usize, i: &[usize]| -> Result<(), ParseError> {
        if graphs.len() == g && i.contains(&ints.len()) {
            Ok(())
        } else {
            let wanted = i.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" or ");
            Err(arity(format!(
                "expects {g} graph argument(s) and {wanted} integer argument(s), got {} and {}",
                graphs.len(),
                ints.len()
            )))
        }
    };
    let mut gs = graphs.clone().into_iter().map(Box::new);
    let mut g = || gs.next().expect("arity checked");
    Ok(match name {
        "K" => {
            shape(0, &[1])?;
            Expr::K(ints[0])
        }
        "F" => {
            shape(0, &[1])?;
            Expr::F(ints[0])
        }
        "Fork" => {
            shape(0, &[1])?;
            Expr::Fork(ints[0])
        }
        "P" => {
            shape(0, &[1])?;
            if ints[0] < 2 {
                return Err(arity("a path needs at least 2 vertices".into()));
            }
            Expr::P(ints[0])
        }
        "Z2" => {
            shape(0, &[0])?;
            Expr::Z2
        }
        "T1" => {
            shape(0, &[0, 1])?;
            Expr::T1(ints.first().copied())
        }
        "Z" => {
            shape(0, &[0, 1])?;
            Expr::Z(ints.first().copied())
        }
        "Tn" => {
            shape(0, &[1, 2])?;
            Expr::Tn(ints[0], ints.get(1).copied())
        }
        "Hn" => {
            shape(0, &[1, 2])?;
            if ints[0] < 2 {
                return Err(arity("a homogeneous tree needs degree at least 2".into()));
            }
            Expr::Hn(ints[0], ints.get(1).copied())
        }
        "star" => {
            shape(2, &[0])?;
            Expr::Star(g(), g())
        }
        "comb" => {
            shape(2, &[0])?;
            Expr::Comb(g(), g())
        }
        "orth" => {
            shape(2, &[0])?;
            Expr::Orth(g(), g())
        }
        "orthiter" => {
            shape(2, &[1])?;
            Expr::OrthIter(g(), g(), ints[0])
        }
        "mfree" => {
            if graphs.len() < 2 || ints.len() != 1 {
                return Err(arity(format!(
                    "expects at least 2 graph arguments and 1 integer argument, got {} and {}",
                    graphs.len(),
                    ints.len()
                )));
            }
            Expr::MFree(graphs, ints[0])
        }
        "branch" => {
            shape(2, &[2])?;
            if ints[0] > 2 {
                return Err(arity("branch index must be 1 or 2".into()));
            }
            Expr::Branch(g(), g(), ints[0], ints[1])
        }
        _ => {
            return Err(ParseError::Syntax {
                line,
                col,
                expected: vec!["a known graph or operator name".into()],
                found: format!("identifier '{name}'"),
            })
        }
    })
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut lx = lex(text)?;
    let e = lx.expr()?;
    if lx.peek().0 != Tok::End {
        return Err(lx.error(&["end of input"]));
    }
    Ok(e)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |n: &Option<u32>| n.map(|d| format!("({d})")).unwrap_or_default();
        match self {
            Expr::K(n) => write!(f, "K({n})"),
            Expr::F(n) => write!(f, "F({n})"),
            Expr::Fork(n) => write!(f, "Fork({n})"),
            Expr::Z2 => write!(f, "Z2"),
            Expr::P(n) => write!(f, "P({n})"),
            Expr::T1(d) => write!(f, "T1{}", opt(d)),
            Expr::Z(d) => write!(f, "Z{}", opt(d)),
            Expr::Tn(n, d) => match d {
                Some(d) => write!(f, "Tn({n},{d})"),
                None => write!(f, "Tn({n})"),
            },
            Expr::Hn(n, d) => match d {
                Some(d) => write!(f, "Hn({n},{d})"),
                None => write!(f, "Hn({n})"),
            },
            Expr::Star(a, b) => write!(f, "star({a},{b})"),
            Expr::Comb(a, b) => write!(f, "comb({a},{b})"),
            Expr::Orth(a, b) => write!(f, "orth({a},{b})"),
            Expr::OrthIter(a, b, m) => write!(f, "orthiter({a},{b},{m})"),
            Expr::MFree(gs, m) => {
                write!(f, "mfree(")?;
                for g in gs {
                    write!(f, "{g},")?;
                }
                write!(f, "{m})")
            }
            Expr::Branch(a, b, j, m) => write!(f, "branch({a},{b},{j},{m})"),
        }
    }
}

impl Expr {
    /// Materialises the graph; infinite atoms without an explicit depth use
    /// `default_depth`.
    pub fn build(&self, default_depth: u32) -> freegraph::Result<RootedGraph> {
        let d = |x: &Option<u32>| x.unwrap_or(default_depth);
        let b = |e: &Expr| e.build(default_depth);
        match self {
            Expr::K(n) => make_standard(Family::K(*n)),
            Expr::F(n) => make_standard(Family::F(*n)),
            Expr::Fork(n) => make_standard(Family::Fork(*n)),
            Expr::Z2 => make_standard(Family::Z2),
            Expr::P(n) => make_standard(Family::P(*n)),
            Expr::T1(x) => make_standard(Family::T1 { depth: d(x) }),
            Expr::Z(x) => make_standard(Family::Z { depth: d(x) }),
            Expr::Tn(n, x) => make_standard(Family::Tn { n: *n, depth: d(x) }),
            Expr::Hn(n, x) => make_standard(Family::Hn { n: *n, depth: d(x) }),
            Expr::Star(x, y) => star_product(&b(x)?, &b(y)?),
            Expr::Comb(x, y) => comb_product(&b(x)?, &b(y)?),
            Expr::Orth(x, y) => orth_product(&b(x)?, &b(y)?),
            Expr::OrthIter(x, y, m) => orth_iter(&b(x)?, &b(y)?, *m as usize),
            Expr::MFree(gs, m) => {
                let factors = gs.iter().map(b).collect::<freegraph::Result<Vec<_>>>()?;
                m_free_product(&factors, *m as usize)
            }
            Expr::Branch(x, y, j, m) => branch_graph(&[b(x)?, b(y)?], *j as u16, *m as usize),
        }
    }
}
