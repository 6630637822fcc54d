//! The function-spec mini-language.
//!
//! ```text
//! spec  := "expsum:" term (";" term)*
//!        | "product:" "zeros=pow(" float ["," "angle=" float] ")" ",genus=" int ",cut=" float
//! term  := poly "exp(" cnum ")"
//! poly  := "[" cnum ("," cnum)* "]"
//! cnum  := float | "(" float "," float ")"
//! ```
//!
//! Whitespace may appear between any two tokens. `cut` is the tolerance on the
//! certified tail bound of the product.

use crg_core::{CanonicalProduct, Complex, ExpTerm, ExponentialSum, Model, ModelError, ZeroRule};
use std::fmt;

/// Byte range in the source. Spans never take part in equality, so a
/// re-rendered spec compares equal to the one it came from.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Number {
    pub value: f64,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CNum {
    pub re: Number,
    /// Absent for the bare real form.
    pub im: Option<Number>,
    pub span: Span,
}

impl CNum {
    pub fn value(&self) -> Complex {
        Complex::new(self.re.value, self.im.map_or(0.0, |n| n.value))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermAst {
    pub coeffs: Vec<CNum>,
    pub exponent: CNum,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductAst {
    pub power: Number,
    pub angle: Option<Number>,
    pub genus: u32,
    pub genus_span: Span,
    pub cut: Number,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    ExpSum { terms: Vec<TermAst>, span: Span },
    Product(ProductAst),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    /// Empty for semantic errors such as duplicate exponents.
    pub expected: Vec<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// 1-based line and column (in characters) of a byte offset.
fn line_column(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    (line, before[line_start..].chars().count() + 1)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn error_at(&self, offset: usize, expected: &[&str], message: String) -> ParseError {
        let (line, column) = line_column(self.src, offset);
        ParseError {
            line,
            column,
            expected: expected.iter().map(|s| format!("`{s}`")).collect(),
            message,
        }
    }

    fn found(&self) -> String {
        match self.rest().chars().next() {
            None => "end of input".into(),
            Some(c) => format!("`{c}`"),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        self.error_at(self.pos, expected, format!("unexpected {}", self.found()))
    }

    fn peek(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(token)
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.peek(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.unexpected(&[token]))
        }
    }

    /// Keywords are whole words; `expsum` is not `exp` followed by `sum`.
    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        let found = &self.rest()[..len];
        if found == word {
            self.pos += len;
            Ok(())
        } else if found.is_empty() {
            Err(self.unexpected(&[word]))
        } else {
            Err(self.error_at(self.pos, &[word], format!("unexpected `{found}`")))
        }
    }

    fn number(&mut self) -> Result<Number, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let int_digits = bytes[i..].iter().take_while(|b| b.is_ascii_digit()).count();
        i += int_digits;
        let mut frac_digits = 0;
        if i < bytes.len() && bytes[i] == b'.' {
            frac_digits = bytes[i + 1..].iter().take_while(|b| b.is_ascii_digit()).count();
            i += 1 + frac_digits;
        }
        if int_digits + frac_digits == 0 {
            return Err(self.unexpected(&["number"]));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let exp_digits = bytes[j..].iter().take_while(|b| b.is_ascii_digit()).count();
            if exp_digits == 0 {
                return Err(self.error_at(start + j, &["exponent digits"], "malformed exponent".into()));
            }
            i = j + exp_digits;
        }
        let text = &self.rest()[..i];
        let value: f64 = text
            .parse()
            .map_err(|_| self.error_at(start, &["number"], format!("malformed number `{text}`")))?;
        if !value.is_finite() {
            return Err(self.error_at(start, &[], format!("number `{text}` is out of range")));
        }
        self.pos += i;
        Ok(Number {
            value,
            span: Span { start, end: self.pos },
        })
    }

    fn integer(&mut self) -> Result<(u32, Span), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().bytes().take_while(|b| b.is_ascii_digit()).count();
        if len == 0 {
            return Err(self.unexpected(&["integer"]));
        }
        let text = &self.rest()[..len];
        let value = text
            .parse()
            .map_err(|_| self.error_at(start, &[], format!("integer `{text}` is out of range")))?;
        self.pos += len;
        Ok((value, Span { start, end: self.pos }))
    }

    fn cnum(&mut self) -> Result<CNum, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("(") {
            let re = self.number()?;
            self.expect(",")?;
            let im = self.number()?;
            self.expect(")")?;
            Ok(CNum {
                re,
                im: Some(im),
                span: Span { start, end: self.pos },
            })
        } else if self
            .rest()
            .starts_with(|c: char| c.is_ascii_digit() || "+-.".contains(c))
        {
            let re = self.number()?;
            Ok(CNum {
                re,
                im: None,
                span: re.span,
            })
        } else {
            Err(self.unexpected(&["number", "("]))
        }
    }

    fn term(&mut self) -> Result<TermAst, ParseError> {
        self.skip_ws();
        let start = self.pos;
        self.expect("[")?;
        let mut coeffs = vec![self.cnum()?];
        loop {
            if self.eat(",") {
                coeffs.push(self.cnum()?);
            } else if self.eat("]") {
                break;
            } else {
                return Err(self.unexpected(&[",", "]"]));
            }
        }
        self.keyword("exp")?;
        self.expect("(")?;
        let exponent = self.cnum()?;
        self.expect(")")?;
        Ok(TermAst {
            coeffs,
            exponent,
            span: Span { start, end: self.pos },
        })
    }

    fn expsum(&mut self, start: usize) -> Result<FunctionSpec, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat(";") {
            terms.push(self.term()?);
        }
        for (i, t) in terms.iter().enumerate() {
            if let Some(j) = terms[..i].iter().position(|u| u.exponent.value() == t.exponent.value()) {
                let e = t.exponent.value();
                return Err(self.error_at(
                    t.exponent.span.start,
                    &[],
                    format!(
                        "duplicate exponent ({}, {}) in term {}: already used by term {}; merge the polynomials instead",
                        e.re,
                        e.im,
                        i + 1,
                        j + 1
                    ),
                ));
            }
        }
        Ok(FunctionSpec::ExpSum {
            terms,
            span: Span { start, end: self.pos },
        })
    }

    fn product(&mut self, start: usize) -> Result<FunctionSpec, ParseError> {
        self.keyword("zeros")?;
        self.expect("=")?;
        self.keyword("pow")?;
        self.expect("(")?;
        let power = self.number()?;
        let angle = if self.eat(",") {
            self.keyword("angle")?;
            self.expect("=")?;
            Some(self.number()?)
        } else {
            None
        };
        if !self.eat(")") {
            return Err(self.unexpected(&[",", ")"]));
        }
        self.expect(",")?;
        self.keyword("genus")?;
        self.expect("=")?;
        let (genus, genus_span) = self.integer()?;
        self.expect(",")?;
        self.keyword("cut")?;
        self.expect("=")?;
        let cut = self.number()?;
        Ok(FunctionSpec::Product(ProductAst {
            power,
            angle,
            genus,
            genus_span,
            cut,
            span: Span { start, end: self.pos },
        }))
    }

    fn spec(&mut self) -> Result<FunctionSpec, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_alphabetic())
            .unwrap_or(self.rest().len());
        let spec = match &self.rest()[..len] {
            "expsum" => {
                self.pos += len;
                self.expect(":")?;
                self.expsum(start)?
            }
            "product" => {
                self.pos += len;
                self.expect(":")?;
                self.product(start)?
            }
            _ => return Err(self.unexpected(&["expsum", "product"])),
        };
        self.skip_ws();
        if !self.rest().is_empty() {
            let expected: &[&str] = match spec {
                FunctionSpec::ExpSum { .. } => &[";", "end of input"],
                FunctionSpec::Product(_) => &["end of input"],
            };
            return Err(self.unexpected(expected));
        }
        Ok(spec)
    }
}

pub fn parse_function_spec(text: &str) -> Result<FunctionSpec, ParseError> {
    Parser { src: text, pos: 0 }.spec()
}

fn render_cnum(c: &CNum) -> String {
    match c.im {
        None => format!("{:?}", c.re.value),
        Some(im) => format!("({:?},{:?})", c.re.value, im.value),
    }
}

/// Canonical source text: no whitespace, shortest round-trip floats.
pub fn render(spec: &FunctionSpec) -> String {
    match spec {
        FunctionSpec::ExpSum { terms, .. } => {
            let terms: Vec<String> = terms
                .iter()
                .map(|t| {
                    let coeffs: Vec<String> = t.coeffs.iter().map(render_cnum).collect();
                    format!("[{}]exp({})", coeffs.join(","), render_cnum(&t.exponent))
                })
                .collect();
            format!("expsum:{}", terms.join(";"))
        }
        FunctionSpec::Product(p) => {
            let angle = p.angle.map(|a| format!(",angle={:?}", a.value)).unwrap_or_default();
            format!(
                "product:zeros=pow({:?}{angle}),genus={},cut={:?}",
                p.power.value, p.genus, p.cut.value
            )
        }
    }
}

impl FunctionSpec {
    pub fn is_product(&self) -> bool {
        matches!(self, FunctionSpec::Product(_))
    }

    /// The model, with products certified on `|z| ≤ r_max`.
    pub fn build(&self, r_max: f64) -> Result<Model, ModelError> {
        match self {
            FunctionSpec::ExpSum { terms, .. } => {
                let terms = terms
                    .iter()
                    .map(|t| ExpTerm::new(t.coeffs.iter().map(CNum::value).collect(), t.exponent.value()))
                    .collect();
                Ok(ExponentialSum::new(terms)?.into())
            }
            FunctionSpec::Product(p) => {
                let rule = ZeroRule::new(1.0, p.power.value, p.angle.map_or(0.0, |a| a.value))?;
                Ok(CanonicalProduct::new(rule, p.genus, p.cut.value, r_max)?.into())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples_parse() {
        let exp = parse_function_spec("expsum:[1]exp(1)").unwrap();
        assert_eq!(exp.build(1.0).unwrap(), Model::from(ExponentialSum::exp()));
        let sin = parse_function_spec("expsum:[(0,-0.5)]exp((0,1));[(0,0.5)]exp((0,-1))").unwrap();
        assert_eq!(sin.build(1.0).unwrap(), Model::from(ExponentialSum::sin()));
        let FunctionSpec::Product(p) = parse_function_spec("product:zeros=pow(2),genus=0,cut=1e-3").unwrap() else {
            panic!("not a product");
        };
        assert_eq!((p.power.value, p.genus, p.cut.value, p.angle), (2.0, 0, 1e-3, None));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_function_spec(" expsum : [ ( 0 , -0.5 ) ] exp ( ( 0 , 1 ) )\n ; [(0,0.5)]exp((0,-1)) ").unwrap();
        let b = parse_function_spec("expsum:[(0,-0.5)]exp((0,1));[(0,0.5)]exp((0,-1))").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let e = parse_function_spec("expsum:[1]exq(1)").unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
        assert_eq!(e.expected, vec!["`exp`"]);
        let e = parse_function_spec("expsum:[1]exp(1);\n[2]exp(1)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 8));
        assert!(e.message.contains("duplicate exponent"), "{e}");
        let e = parse_function_spec("product:zeros=pow(2),genus=0").unwrap_err();
        assert!(e.message.contains("end of input") && e.expected == vec!["`,`"]);
    }

    #[test]
    fn render_is_canonical() {
        let s = parse_function_spec("product: zeros = pow(1.5, angle = 0.25), genus = 1, cut = 1e-6").unwrap();
        assert_eq!(render(&s), "product:zeros=pow(1.5,angle=0.25),genus=1,cut=1e-6");
        assert_eq!(parse_function_spec(&render(&s)).unwrap(), s);
    }
}
