//! Braid words in the Artin braid group on `r` strands and their right
//! action on tuples of matrices.
//!
//! Concrete syntax:
//!
//! ```text
//! word   := factor+
//! factor := atom ['^' exp]
//! atom   := 'b' INT | '(' word ')'
//! exp    := ['+' | '-'] INT | atom
//! ```
//!
//! An integer exponent is a power; a word exponent is a conjugation,
//! `x^y = y^-1 x y`.

use std::fmt;

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BraidError {
    #[error("braid parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("generator b{generator} is out of range for {strands} strands")]
    StrandOutOfRange { generator: i64, strands: usize },
    #[error("braid words on {0} and {1} strands cannot be combined")]
    StrandMismatch(usize, usize),
    #[error("tuple of length {len} cannot be acted on by a braid on {strands} strands")]
    TupleLength { len: usize, strands: usize },
    #[error("tuple entries must be square matrices of one common size")]
    ShapeMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A flat word in the generators: letter `i > 0` is `b_i`, `-i` is its
/// inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(BraidError::StrandOutOfRange { generator: l as i64, strands });
            }
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn empty(strands: usize) -> Self {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord { strands: self.strands, letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StrandMismatch(self.strands, other.strands));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord { strands: self.strands, letters })
    }

    /// Cancel adjacent pairs `b_i b_i^-1` until none remain.
    pub fn free_reduce(&self) -> BraidWord {
        let mut stack: Vec<i32> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if stack.last() == Some(&-l) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        BraidWord { strands: self.strands, letters: stack }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.letters.iter().map(|&l| if l > 0 { format!("b{l}") } else { format!("b{}^-1", -l) }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn free_reduce(w: &BraidWord) -> BraidWord {
    w.free_reduce()
}

/// Parsed braid expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BraidExpr {
    Generator(u32),
    Product(Vec<BraidExpr>),
    Power(Box<BraidExpr>, i64),
    /// `Conjugate(x, y)` is `y^-1 x y`.
    Conjugate(Box<BraidExpr>, Box<BraidExpr>),
}

impl BraidExpr {
    /// The expression spelling out a flat word letter by letter.
    pub fn from_letters(letters: &[i32]) -> BraidExpr {
        let factor = |l: i32| {
            let g = BraidExpr::Generator(l.unsigned_abs());
            if l > 0 {
                g
            } else {
                BraidExpr::Power(Box::new(g), -1)
            }
        };
        match letters {
            [l] => factor(*l),
            _ => BraidExpr::Product(letters.iter().map(|&l| factor(l)).collect()),
        }
    }

    /// Largest generator index occurring in the expression.
    pub fn max_generator(&self) -> u32 {
        match self {
            BraidExpr::Generator(i) => *i,
            BraidExpr::Product(v) => v.iter().map(BraidExpr::max_generator).max().unwrap_or(0),
            BraidExpr::Power(x, _) => x.max_generator(),
            BraidExpr::Conjugate(x, y) => x.max_generator().max(y.max_generator()),
        }
    }

    fn expand_into(&self, out: &mut Vec<i32>) {
        match self {
            BraidExpr::Generator(i) => out.push(*i as i32),
            BraidExpr::Product(v) => v.iter().for_each(|x| x.expand_into(out)),
            BraidExpr::Power(x, k) => {
                let mut inner = Vec::new();
                x.expand_into(&mut inner);
                if *k < 0 {
                    inner = inner.iter().rev().map(|l| -l).collect();
                }
                for _ in 0..k.unsigned_abs() {
                    out.extend_from_slice(&inner);
                }
            }
            BraidExpr::Conjugate(x, y) => {
                let mut by = Vec::new();
                y.expand_into(&mut by);
                out.extend(by.iter().rev().map(|l| -l));
                x.expand_into(out);
                out.extend_from_slice(&by);
            }
        }
    }

    /// Flatten into a word on `strands` strands.
    pub fn expand(&self, strands: usize) -> Result<BraidWord, BraidError> {
        let mut letters = Vec::new();
        self.expand_into(&mut letters);
        BraidWord::new(strands, letters)
    }

    fn is_atom(&self) -> bool {
        matches!(self, BraidExpr::Generator(_))
    }
}

impl fmt::Display for BraidExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn atom(x: &BraidExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if x.is_atom() {
                write!(f, "{x}")
            } else {
                write!(f, "({x})")
            }
        }
        match self {
            BraidExpr::Generator(i) => write!(f, "b{i}"),
            BraidExpr::Product(v) => {
                for (j, x) in v.iter().enumerate() {
                    if j > 0 {
                        write!(f, " ")?;
                    }
                    match x {
                        BraidExpr::Product(_) => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
            BraidExpr::Power(x, k) => {
                atom(x, f)?;
                write!(f, "^{k}")
            }
            BraidExpr::Conjugate(x, y) => {
                atom(x, f)?;
                write!(f, "^")?;
                atom(y, f)
            }
        }
    }
}

/// Parse a braid expression on `strands` strands.
pub fn parse_braid(text: &str, strands: usize) -> Result<BraidExpr, BraidError> {
    let mut p = BraidParser { bytes: text.as_bytes(), pos: 0, strands };
    let expr = p.word()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("unexpected input"));
    }
    let max = expr.max_generator();
    if max as usize >= strands {
        return Err(BraidError::StrandOutOfRange { generator: max as i64, strands });
    }
    Ok(expr)
}

struct BraidParser<'a> {
    bytes: &'a [u8],
    pos: usize,
    strands: usize,
}

impl BraidParser<'_> {
    fn error(&self, msg: &str) -> BraidError {
        BraidError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<BraidExpr, BraidError> {
        let mut factors = Vec::new();
        while matches!(self.peek(), Some(b'b') | Some(b'(')) {
            factors.push(self.factor()?);
        }
        match factors.len() {
            0 => Err(self.error("expected a generator `b<i>` or `(`")),
            1 => Ok(factors.pop().unwrap()),
            _ => Ok(BraidExpr::Product(factors)),
        }
    }

    fn factor(&mut self) -> Result<BraidExpr, BraidError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some(b'-') | Some(b'+') => {
                let negative = self.bytes[self.pos] == b'-';
                self.pos += 1;
                let k = self.integer()?;
                Ok(BraidExpr::Power(Box::new(base), if negative { -k } else { k }))
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer()?;
                Ok(BraidExpr::Power(Box::new(base), k))
            }
            Some(b'b') | Some(b'(') => {
                let by = self.atom()?;
                Ok(BraidExpr::Conjugate(Box::new(base), Box::new(by)))
            }
            _ => Err(self.error("expected an exponent")),
        }
    }

    fn atom(&mut self) -> Result<BraidExpr, BraidError> {
        match self.peek() {
            Some(b'b') => {
                self.pos += 1;
                let i = self.integer()?;
                if i <= 0 {
                    return Err(BraidError::StrandOutOfRange { generator: i, strands: self.strands });
                }
                let i = u32::try_from(i).map_err(|_| self.error("generator index too large"))?;
                Ok(BraidExpr::Generator(i))
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error("expected a generator `b<i>` or `(`")),
        }
    }

    fn integer(&mut self) -> Result<i64, BraidError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii")
            .parse()
            .map_err(|_| BraidError::Parse { pos: start, msg: "integer too large".into() })
    }
}

fn check_tuple(g: &[Matrix], strands: usize) -> Result<(), BraidError> {
    if g.len() != strands {
        return Err(BraidError::TupleLength { len: g.len(), strands });
    }
    if let Some(first) = g.first() {
        let n = first.rows();
        if g.iter().any(|m| m.shape() != (n, n) || m.field() != first.field()) {
            return Err(BraidError::ShapeMismatch);
        }
    }
    Ok(())
}

/// Apply one letter of the right action in place:
/// `b_i: (g_i, g_{i+1}) ↦ (g_{i+1}, g_{i+1}^-1 g_i g_{i+1})` and
/// `b_i^-1: (g_i, g_{i+1}) ↦ (g_i g_{i+1} g_i^-1, g_i)`.
pub fn act_letter(g: &mut [Matrix], letter: i32) -> Result<(), BraidError> {
    let i = letter.unsigned_abs() as usize;
    if letter == 0 || i >= g.len() {
        return Err(BraidError::StrandOutOfRange { generator: letter as i64, strands: g.len() });
    }
    let (a, b) = (&g[i - 1], &g[i]);
    let (new_a, new_b) = if letter > 0 {
        let conj = &(&b.inverse()? * a) * b;
        (b.clone(), conj)
    } else {
        let conj = &(a * b) * &a.inverse()?;
        (conj, a.clone())
    };
    g[i - 1] = new_a;
    g[i] = new_b;
    Ok(())
}

/// The tuple `g^w`, applying the letters of `w` from left to right.
pub fn act_on_tuple(g: &[Matrix], w: &BraidWord) -> Result<Vec<Matrix>, BraidError> {
    check_tuple(g, w.strands)?;
    let mut out = g.to_vec();
    for &l in &w.letters {
        act_letter(&mut out, l)?;
    }
    Ok(out)
}

/// Ordered product `g_1 ⋯ g_r`.
pub fn tuple_product(g: &[Matrix]) -> Option<Matrix> {
    let mut it = g.iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, m| &acc * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use proptest::prelude::*;

    fn gen(i: u32) -> BraidExpr {
        BraidExpr::Generator(i)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_braid("b1^2", 4).unwrap(), BraidExpr::Power(Box::new(gen(1)), 2));
        assert_eq!(
            parse_braid("(b2^2)^b1", 4).unwrap(),
            BraidExpr::Conjugate(Box::new(BraidExpr::Power(Box::new(gen(2)), 2)), Box::new(gen(1)))
        );
        let e = parse_braid("b3^-1 (b1 b2 b1)^2 b3", 6).unwrap();
        assert_eq!(
            e,
            BraidExpr::Product(vec![
                BraidExpr::Power(Box::new(gen(3)), -1),
                BraidExpr::Power(Box::new(BraidExpr::Product(vec![gen(1), gen(2), gen(1)])), 2),
                gen(3),
            ])
        );
        assert_eq!(e.to_string(), "b3^-1 (b1 b2 b1)^2 b3");
        assert_eq!(parse_braid("b2^(b1^-1 b3^-1)", 4).unwrap().to_string(), "b2^(b1^-1 b3^-1)");
        assert_eq!(parse_braid("b1b2", 3).unwrap(), BraidExpr::Product(vec![gen(1), gen(2)]));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_braid("b4", 4), Err(BraidError::StrandOutOfRange { generator: 4, strands: 4 })));
        assert!(matches!(parse_braid("b0", 4), Err(BraidError::StrandOutOfRange { .. })));
        assert!(matches!(parse_braid("b1 ^", 4), Err(BraidError::Parse { pos: 4, .. })));
        assert!(matches!(parse_braid("(b1", 4), Err(BraidError::Parse { pos: 3, .. })));
        assert!(matches!(parse_braid("", 4), Err(BraidError::Parse { pos: 0, .. })));
        assert!(matches!(parse_braid("b1 x", 4), Err(BraidError::Parse { pos: 3, .. })));
        assert!(matches!(parse_braid("b1^2^3", 4), Err(BraidError::Parse { .. })));
    }

    #[test]
    fn expansion() {
        let w = parse_braid("(b2^2)^b1", 4).unwrap().expand(4).unwrap();
        assert_eq!(w.letters(), &[-1, 2, 2, 1]);
        assert_eq!(parse_braid("b1^-2", 4).unwrap().expand(4).unwrap().letters(), &[-1, -1]);
        let x = parse_braid("b1 b3^(b2 b1^-1) b2^3", 4).unwrap().expand(4).unwrap();
        assert!(x.concat(&x.inverse()).unwrap().free_reduce().is_empty());
        assert_eq!(parse_braid("(b1 b2)^-1", 3).unwrap().expand(3).unwrap().letters(), &[-2, -1]);
    }

    #[test]
    fn reduction() {
        let red = |v: Vec<i32>| BraidWord::new(4, v).unwrap().free_reduce().letters().to_vec();
        assert_eq!(red(vec![1, -1]), Vec::<i32>::new());
        assert_eq!(red(vec![1, 2, -2, -1]), Vec::<i32>::new());
        assert_eq!(red(vec![1, 2, 1]), vec![1, 2, 1]);
    }

    #[test]
    fn action_on_generators() {
        let k = FieldSpec::rational();
        let a = Matrix::from_ints(&k, &[[1, 1], [0, 1]]);
        let b = Matrix::from_ints(&k, &[[1, 0], [1, 1]]);
        let c = (&a * &b).inverse().unwrap();
        let g = vec![a.clone(), b.clone(), c.clone()];
        let moved = act_on_tuple(&g, &BraidWord::new(3, vec![1]).unwrap()).unwrap();
        assert_eq!(moved, vec![b.clone(), &(&b.inverse().unwrap() * &a) * &b, c]);
        let back = act_on_tuple(&moved, &BraidWord::new(3, vec![-1]).unwrap()).unwrap();
        assert_eq!(back, g);
        assert!(matches!(act_on_tuple(&g, &BraidWord::empty(4)), Err(BraidError::TupleLength { .. })));
    }

    // Random invertible n×n matrix over GF(p) as L·U.
    fn invertible(p: u64, n: usize) -> impl Strategy<Value = Matrix> {
        (
            prop::collection::vec(0..p as i64, n * n),
            prop::collection::vec(0..p as i64, n * n),
            prop::collection::vec(1..p as i64, n),
        )
            .prop_map(move |(l, u, d)| {
                let k = FieldSpec::prime(p).unwrap();
                let mut lm = vec![vec![0; n]; n];
                let mut um = vec![vec![0; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        if i > j {
                            lm[i][j] = l[i * n + j];
                        } else if i == j {
                            lm[i][j] = 1;
                            um[i][j] = d[i];
                        } else {
                            um[i][j] = u[i * n + j];
                        }
                    }
                }
                &Matrix::from_ints(&k, &lm) * &Matrix::from_ints(&k, &um)
            })
    }

    fn tuple_and_words() -> impl Strategy<Value = (Vec<Matrix>, Vec<i32>, Vec<i32>)> {
        (1usize..=3, 3usize..=5).prop_flat_map(|(n, r)| {
            let letter = (1..r as i32).prop_flat_map(|i| prop_oneof![Just(i), Just(-i)]);
            (
                prop::collection::vec(invertible(7, n), r),
                prop::collection::vec(letter.clone(), 0..6),
                prop::collection::vec(letter, 0..6),
            )
        })
    }

    proptest! {
        #[test]
        fn action_properties((g, w1, w2) in tuple_and_words()) {
            let r = g.len();
            let w1 = BraidWord::new(r, w1).unwrap();
            let w2 = BraidWord::new(r, w2).unwrap();
            let step = act_on_tuple(&act_on_tuple(&g, &w1).unwrap(), &w2).unwrap();
            prop_assert_eq!(&step, &act_on_tuple(&g, &w1.concat(&w2).unwrap()).unwrap());
            let there_and_back = act_on_tuple(&act_on_tuple(&g, &w1).unwrap(), &w1.inverse()).unwrap();
            prop_assert_eq!(&there_and_back, &g);
            prop_assert_eq!(tuple_product(&step), tuple_product(&g));
            for i in 1..(r as i32 - 1) {
                let lhs = act_on_tuple(&g, &BraidWord::new(r, vec![i, i + 1, i]).unwrap()).unwrap();
                let rhs = act_on_tuple(&g, &BraidWord::new(r, vec![i + 1, i, i + 1]).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
            for i in 1..r as i32 {
                for j in (i + 2)..r as i32 {
                    let lhs = act_on_tuple(&g, &BraidWord::new(r, vec![i, j]).unwrap()).unwrap();
                    let rhs = act_on_tuple(&g, &BraidWord::new(r, vec![j, i]).unwrap()).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
