//! The collection-predicate language: a small boolean DSL over families.
//!
//! ```text
//! expr   := term { "or" term }
//! term   := factor { "and" factor }
//! factor := "not" factor | "(" expr ")" | atom
//! atom   := "cover" | "true" | "false" | "nonempty_members"
//!         | "maxsize(" INT ")" | "minsize(" INT ")" | "card_le(" INT ")"
//!         | "subset_of(" NAME ")" | "refines(" NAME ")" | "refined_by(" NAME ")"
//!         | "contains(" SETLIT ")" | "member_of(" NAME ")" | "complement_view(" expr ")"
//! SETLIT := "{" [ INT { "," INT } ] "}"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::set::{SetFamily, Subset, MAX_GROUND};
use crate::star::refines;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Predicate {
    Cover,
    True,
    False,
    NonEmptyMembers,
    MaxSize(usize),
    MinSize(usize),
    CardLe(usize),
    SubsetOf(String),
    Refines(String),
    RefinedBy(String),
    Contains(Subset),
    MemberOf(String),
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    ComplementView(Box<Predicate>),
}

/// Names a predicate may reference: named families and named collections.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeclaredNames {
    pub families: BTreeSet<String>,
    pub collections: BTreeSet<String>,
}

impl DeclaredNames {
    pub fn with_families<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        DeclaredNames {
            families: names.into_iter().map(Into::into).collect(),
            collections: BTreeSet::new(),
        }
    }
}

impl Predicate {
    pub fn not(p: Predicate) -> Predicate {
        Predicate::Not(Box::new(p))
    }

    pub fn and(a: Predicate, b: Predicate) -> Predicate {
        Predicate::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Predicate, b: Predicate) -> Predicate {
        Predicate::Or(Box::new(a), Box::new(b))
    }

    pub fn complement_view(p: Predicate) -> Predicate {
        Predicate::ComplementView(Box::new(p))
    }

    pub fn eval(&self, f: &SetFamily, ctx: &Instance) -> Result<bool> {
        use Predicate::*;
        Ok(match self {
            Cover => f.union_all() == ctx.ground.full(),
            True => true,
            False => false,
            NonEmptyMembers => !f.contains(Subset::EMPTY),
            MaxSize(k) => f.iter().all(|s| s.len() <= *k),
            MinSize(k) => f.iter().all(|s| s.len() >= *k),
            CardLe(k) => f.len() <= *k,
            SubsetOf(name) => f.is_subfamily_of(ctx.family(name)?),
            Refines(name) => refines(f, ctx.family(name)?),
            RefinedBy(name) => refines(ctx.family(name)?, f),
            Contains(s) => f.contains(*s),
            MemberOf(name) => ctx.named_collection(name)?.binary_search(f).is_ok(),
            Not(p) => !p.eval(f, ctx)?,
            And(a, b) => a.eval(f, ctx)? && b.eval(f, ctx)?,
            Or(a, b) => a.eval(f, ctx)? || b.eval(f, ctx)?,
            ComplementView(p) => p.eval(&f.complement(ctx.ground), ctx)?,
        })
    }

    /// Visits every family and collection reference in the tree.
    pub fn references(&self) -> (Vec<&str>, Vec<&str>) {
        let mut fams = Vec::new();
        let mut colls = Vec::new();
        self.collect_refs(&mut fams, &mut colls);
        (fams, colls)
    }

    fn collect_refs<'a>(&'a self, fams: &mut Vec<&'a str>, colls: &mut Vec<&'a str>) {
        use Predicate::*;
        match self {
            SubsetOf(n) | Refines(n) | RefinedBy(n) => fams.push(n),
            MemberOf(n) => colls.push(n),
            Not(p) | ComplementView(p) => p.collect_refs(fams, colls),
            And(a, b) | Or(a, b) => {
                a.collect_refs(fams, colls);
                b.collect_refs(fams, colls);
            }
            _ => {}
        }
    }

    /// Elements mentioned by `contains` literals.
    pub fn literal_elements(&self) -> Subset {
        use Predicate::*;
        match self {
            Contains(s) => *s,
            Not(p) | ComplementView(p) => p.literal_elements(),
            And(a, b) | Or(a, b) => a.literal_elements().union(b.literal_elements()),
            _ => Subset::EMPTY,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Predicate::Or(..) => 1,
            Predicate::And(..) => 2,
            Predicate::Not(..) => 3,
            _ => 4,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Predicate, min_prec: u8) -> fmt::Result {
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Predicate::*;
        match self {
            Cover => write!(f, "cover"),
            True => write!(f, "true"),
            False => write!(f, "false"),
            NonEmptyMembers => write!(f, "nonempty_members"),
            MaxSize(k) => write!(f, "maxsize({k})"),
            MinSize(k) => write!(f, "minsize({k})"),
            CardLe(k) => write!(f, "card_le({k})"),
            SubsetOf(n) => write!(f, "subset_of({n})"),
            Refines(n) => write!(f, "refines({n})"),
            RefinedBy(n) => write!(f, "refined_by({n})"),
            Contains(s) => write!(f, "contains({s})"),
            MemberOf(n) => write!(f, "member_of({n})"),
            ComplementView(p) => write!(f, "complement_view({p})"),
            Not(p) => {
                write!(f, "not ")?;
                write_child(f, p, 3)
            }
            // left-associative: the right operand needs parentheses at equal precedence
            And(a, b) => {
                write_child(f, a, 2)?;
                write!(f, " and ")?;
                write_child(f, b, 3)
            }
            Or(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " or ")?;
                write_child(f, b, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' | b')' | b'{' | b'}' | b',' => {
                let t = match c {
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    _ => Tok::Comma,
                };
                out.push((i, t));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let v = text[start..i].parse::<u64>().map_err(|_| Error::Syntax {
                    position: start,
                    expected: "an integer that fits in 64 bits".into(),
                })?;
                out.push((start, Tok::Int(v)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(Error::Syntax {
                    position: i,
                    expected: "a keyword, name, integer or punctuation".into(),
                })
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    names: &'a DeclaredNames,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            expected: format!("{expected}, found {}", self.peek().describe()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.syntax(&tok.describe())
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expr(&mut self) -> Result<Predicate> {
        let mut lhs = self.term()?;
        while self.is_keyword("or") {
            self.bump();
            let rhs = self.term()?;
            lhs = Predicate::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Predicate> {
        let mut lhs = self.factor()?;
        while self.is_keyword("and") {
            self.bump();
            let rhs = self.factor()?;
            lhs = Predicate::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Predicate> {
        if self.is_keyword("not") {
            self.bump();
            return Ok(Predicate::not(self.factor()?));
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let e = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(e);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Predicate> {
        let Tok::Ident(word) = self.peek().clone() else {
            return self.syntax("a predicate");
        };
        let nullary = match word.as_str() {
            "cover" => Some(Predicate::Cover),
            "true" => Some(Predicate::True),
            "false" => Some(Predicate::False),
            "nonempty_members" => Some(Predicate::NonEmptyMembers),
            _ => None,
        };
        if let Some(p) = nullary {
            self.bump();
            if *self.peek() == Tok::LParen {
                let found = self.count_args()?;
                return Err(Error::Arity { name: word, expected: 0, found });
            }
            return Ok(p);
        }
        match word.as_str() {
            "maxsize" | "minsize" | "card_le" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let k = match self.peek() {
                    Tok::Int(k) => usize::try_from(*k).or_else(|_| self.syntax("a small integer"))?,
                    _ => return self.syntax("an integer"),
                };
                self.bump();
                self.close_unary(&word)?;
                Ok(match word.as_str() {
                    "maxsize" => Predicate::MaxSize(k),
                    "minsize" => Predicate::MinSize(k),
                    _ => Predicate::CardLe(k),
                })
            }
            "subset_of" | "refines" | "refined_by" | "member_of" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let Tok::Ident(name) = self.peek().clone() else {
                    return self.syntax("a name");
                };
                self.bump();
                self.close_unary(&word)?;
                let known = if word == "member_of" {
                    self.names.collections.contains(&name)
                } else {
                    self.names.families.contains(&name)
                };
                if !known {
                    return Err(Error::UnknownReference(name));
                }
                Ok(match word.as_str() {
                    "subset_of" => Predicate::SubsetOf(name),
                    "refines" => Predicate::Refines(name),
                    "refined_by" => Predicate::RefinedBy(name),
                    _ => Predicate::MemberOf(name),
                })
            }
            "contains" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let s = self.set_literal()?;
                self.close_unary(&word)?;
                Ok(Predicate::Contains(s))
            }
            "complement_view" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.close_unary(&word)?;
                Ok(Predicate::complement_view(e))
            }
            _ => self.syntax("a predicate"),
        }
    }

    fn set_literal(&mut self) -> Result<Subset> {
        self.expect(Tok::LBrace)?;
        let mut s = Subset::EMPTY;
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Ok(s);
        }
        loop {
            match self.peek() {
                Tok::Int(x) if (*x as usize) < MAX_GROUND => {
                    s = s.union(Subset::singleton(*x as usize));
                    self.bump();
                }
                Tok::Int(_) => return self.syntax(&format!("an element below {MAX_GROUND}")),
                _ => return self.syntax("an element"),
            }
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(s);
                }
                _ => return self.syntax("`,` or `}`"),
            }
        }
    }

    /// After the single argument of a unary atom: `)` or an arity error on `,`.
    fn close_unary(&mut self, name: &str) -> Result<()> {
        if *self.peek() == Tok::Comma {
            let mut found = 1;
            let mut depth = 0usize;
            loop {
                match self.bump() {
                    Tok::Comma if depth == 0 => found += 1,
                    Tok::LParen | Tok::LBrace => depth += 1,
                    Tok::RParen | Tok::RBrace if depth > 0 => depth -= 1,
                    Tok::RParen | Tok::End => break,
                    _ => {}
                }
            }
            return Err(Error::Arity { name: name.into(), expected: 1, found });
        }
        self.expect(Tok::RParen)
    }

    /// Counts the comma-separated arguments of a parenthesized list at the cursor.
    fn count_args(&mut self) -> Result<usize> {
        self.expect(Tok::LParen)?;
        if *self.peek() == Tok::RParen {
            return Ok(0);
        }
        let mut found = 1;
        let mut depth = 0usize;
        loop {
            match self.bump() {
                Tok::Comma if depth == 0 => found += 1,
                Tok::LParen | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBrace if depth > 0 => depth -= 1,
                Tok::RParen => return Ok(found),
                Tok::End => return self.syntax("`)`"),
                _ => {}
            }
        }
    }
}

/// Parses predicate text, resolving names against `names`.
pub fn parse_predicate(text: &str, names: &DeclaredNames) -> Result<Predicate> {
    let mut p = Parser { toks: lex(text)?, pos: 0, names };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("`and`, `or` or end of input");
    }
    Ok(e)
}
