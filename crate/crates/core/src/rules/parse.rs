//! Line-oriented rule-file reader.
//!
//! ```text
//! players: 6
//! # comment
//! mc: 1 !2 -> 3/2
//! embedded: 1 2 | 3 5 !6 , 4 !3 !6 -> 1
//! weighted: (1 2 -> 1) (3 -> -2) | (4 -> 1/3)
//! hybrid: (1 2 !3 -> 1) (3 5 -> 0) (4 !1 !3 !6 -> 0) (6 !5 -> 0)
//! ```

use num_bigint::BigInt;
use num_traits::Zero;

use super::{BoolExpr, EmbeddedRule, HybridRule, McRule, Rule, RuleSet, WeightedRule};
use crate::combinatorics::Rational;
use crate::error::{Error, ParseError, ParseErrorKind, Result};
use crate::game::{Coalition, MAX_PLAYERS};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(String),
    Word(String),
    Bang,
    Minus,
    Slash,
    Pipe,
    Comma,
    LParen,
    RParen,
    Arrow,
    Colon,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(s) => format!("number '{s}'"),
            Tok::Word(s) => format!("'{s}'"),
            Tok::Bang => "'!'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Pipe => "'|'".into(),
            Tok::Comma => "','".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Colon => "':'".into(),
        }
    }
}

fn lex(line: &str, line_no: usize) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '!' => Some(Tok::Bang),
            '/' => Some(Tok::Slash),
            '|' => Some(Tok::Pipe),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, col));
            i += 1;
        } else if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push((Tok::Arrow, col));
                i += 2;
            } else {
                out.push((Tok::Minus, col));
                i += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Num(chars[start..i].iter().collect()), col));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Word(chars[start..i].iter().collect()), col));
        } else {
            return Err(ParseError::syntax(line_no, col, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    end_col: usize,
    n: usize,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl LineParser<'_> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().map_or_else(|| "end of line".to_string(), Tok::describe);
        ParseError::syntax(self.line, self.col(), format!("expected {wanted}, found {found}"))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> PResult<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn at_lit(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Bang))
    }

    fn number(&mut self, wanted: &str) -> PResult<String> {
        match self.peek() {
            Some(Tok::Num(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn player(&mut self) -> PResult<usize> {
        let col = self.col();
        let digits = self.number("player index")?;
        let out_of_range =
            |player: u64| ParseError::new(self.line, col, ParseErrorKind::PlayerOutOfRange { player, n: self.n });
        let value: u64 = digits.parse().map_err(|_| out_of_range(u64::MAX))?;
        if value == 0 || value as usize > self.n || value as usize > MAX_PLAYERS {
            return Err(out_of_range(value));
        }
        Ok(value as usize)
    }

    fn expr(&mut self) -> PResult<BoolExpr> {
        let start = self.col();
        if !self.at_lit() {
            return Err(self.unexpected("a literal"));
        }
        let mut pos = Coalition::empty();
        let mut neg = Coalition::empty();
        while self.at_lit() {
            let col = self.col();
            let negated = self.eat(&Tok::Bang);
            let p = self.player()?;
            if pos.contains(p) || neg.contains(p) {
                return Err(ParseError::new(
                    self.line,
                    col,
                    ParseErrorKind::DuplicateLiteral(p as u64),
                ));
            }
            if negated {
                neg = neg.with(p);
            } else {
                pos = pos.with(p);
            }
        }
        if pos.is_empty() {
            return Err(ParseError::new(self.line, start, ParseErrorKind::EmptyPositive));
        }
        Ok(BoolExpr::new(pos, neg).expect("checked literals"))
    }

    fn weight(&mut self) -> PResult<Rational> {
        let negative = self.eat(&Tok::Minus);
        let num: BigInt = self.number("weight")?.parse().expect("digits");
        let den: BigInt = if self.eat(&Tok::Slash) {
            let col = self.col();
            let d: BigInt = self.number("denominator")?.parse().expect("digits");
            if d.is_zero() {
                return Err(ParseError::syntax(self.line, col, "zero denominator"));
            }
            d
        } else {
            BigInt::from(1)
        };
        let w = Rational::new(num, den);
        Ok(if negative { -w } else { w })
    }

    fn finish(&self) -> PResult<()> {
        if self.pos < self.toks.len() {
            Err(self.unexpected("end of line"))
        } else {
            Ok(())
        }
    }

    fn mc_rule(&mut self) -> PResult<McRule> {
        let e = self.expr()?;
        self.expect(Tok::Arrow, "'->'")?;
        Ok(McRule::new(e, self.weight()?))
    }

    fn paren_mc(&mut self) -> PResult<McRule> {
        self.expect(Tok::LParen, "'('")?;
        let r = self.mc_rule()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(r)
    }

    fn embedded(&mut self) -> PResult<EmbeddedRule> {
        let head = self.expr()?;
        let mut others = Vec::new();
        if self.eat(&Tok::Pipe) {
            others.push(self.expr()?);
            while self.eat(&Tok::Comma) {
                others.push(self.expr()?);
            }
        }
        self.expect(Tok::Arrow, "'->'")?;
        Ok(EmbeddedRule::new(head, others, self.weight()?))
    }

    fn weighted(&mut self) -> PResult<WeightedRule> {
        let mut blocks = Vec::new();
        loop {
            let mut block = vec![self.paren_mc()?];
            while self.peek() == Some(&Tok::LParen) {
                block.push(self.paren_mc()?);
            }
            blocks.push(block);
            if !self.eat(&Tok::Pipe) {
                break;
            }
        }
        Ok(WeightedRule::new(blocks).expect("nonempty blocks"))
    }

    fn hybrid(&mut self, start_col: usize) -> PResult<HybridRule> {
        let first = self.paren_mc()?;
        let mut exprs = vec![first.expr];
        while self.peek() == Some(&Tok::LParen) {
            let col = self.col();
            let r = self.paren_mc()?;
            if !r.weight.is_zero() {
                return Err(ParseError::new(
                    self.line,
                    col,
                    ParseErrorKind::InvalidRule("only the first expression of a hybrid rule may carry a weight".into()),
                ));
            }
            exprs.push(r.expr);
        }
        HybridRule::new(exprs, first.weight)
            .map_err(|e| ParseError::new(self.line, start_col, ParseErrorKind::InvalidRule(rule_msg(e))))
    }
}

fn rule_msg(e: Error) -> String {
    match e {
        Error::InvalidRule(m) => m,
        other => other.to_string(),
    }
}

enum Line {
    Blank,
    Header(usize, usize),
    Rule(Rule),
}

fn parse_line(text: &str, line: usize, n: Option<usize>) -> PResult<Line> {
    let toks = lex(text, line)?;
    if toks.is_empty() {
        return Ok(Line::Blank);
    }
    let end_col = text.chars().count() + 1;
    let (tag, tag_col) = match &toks[0] {
        (Tok::Word(w), c) => (w.as_str(), *c),
        (t, c) => {
            return Err(ParseError::syntax(
                line,
                *c,
                format!("expected a rule tag, found {}", t.describe()),
            ))
        }
    };
    let mut p = LineParser {
        toks: &toks,
        pos: 1,
        line,
        end_col,
        n: n.unwrap_or(0),
    };
    p.expect(Tok::Colon, "':' after tag")?;
    if tag == "players" {
        let col = p.col();
        let count: usize = p
            .number("player count")?
            .parse()
            .map_err(|_| ParseError::syntax(line, col, "player count too large"))?;
        if count == 0 || count > MAX_PLAYERS {
            return Err(ParseError::syntax(
                line,
                col,
                format!("player count must be in 1..={MAX_PLAYERS}"),
            ));
        }
        p.finish()?;
        return Ok(Line::Header(count, col));
    }
    if n.is_none() {
        return Err(ParseError::new(line, tag_col, ParseErrorKind::MissingHeader));
    }
    let rule = match tag {
        "mc" => Rule::Mc(p.mc_rule()?),
        "embedded" => Rule::Embedded(p.embedded()?),
        "weighted" => Rule::Weighted(p.weighted()?),
        "hybrid" => Rule::Hybrid(p.hybrid(tag_col)?),
        other => {
            return Err(ParseError::syntax(
                line,
                tag_col,
                format!("unknown rule tag '{other}' (expected mc, embedded, weighted or hybrid)"),
            ))
        }
    };
    p.finish()?;
    if let Rule::Hybrid(h) = &rule {
        let expected = n.expect("checked above");
        if h.n() != expected {
            return Err(ParseError::new(
                line,
                tag_col,
                ParseErrorKind::InvalidRule(format!("hybrid rule positives must cover players 1..={expected}")),
            ));
        }
    }
    Ok(Line::Rule(rule))
}

fn parse_with(text: &str, mut n: Option<usize>, require_header: bool) -> Result<RuleSet> {
    let mut rules = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        match parse_line(raw, line, n)? {
            Line::Blank => {}
            Line::Header(count, col) => {
                if header_seen || !rules.is_empty() {
                    return Err(ParseError::syntax(line, 1, "'players' header must come once, before any rule").into());
                }
                if let Some(expected) = n {
                    if expected != count {
                        return Err(ParseError::new(
                            line,
                            col,
                            ParseErrorKind::HeaderMismatch { expected, found: count },
                        )
                        .into());
                    }
                }
                header_seen = true;
                n = Some(count);
            }
            Line::Rule(r) => rules.push(r),
        }
    }
    let Some(n) = n else {
        return Err(ParseError::new(1, 1, ParseErrorKind::MissingHeader).into());
    };
    if require_header && !header_seen {
        return Err(ParseError::new(1, 1, ParseErrorKind::MissingHeader).into());
    }
    RuleSet::new(n, rules)
}

/// Parses rules over players `1..=n`; a `players:` header, if present,
/// must agree with `n`.
pub fn parse_rules(text: &str, n: usize) -> Result<RuleSet> {
    if n == 0 || n > MAX_PLAYERS {
        return Err(Error::InvalidRule(format!("player count {n} unsupported")));
    }
    parse_with(text, Some(n), false)
}

/// Parses a complete rule file, taking the player count from its header.
pub fn parse_rule_file(text: &str) -> Result<RuleSet> {
    parse_with(text, None, true)
}
