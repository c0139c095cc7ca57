// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! A subset of SMARTS: atom primitives `* a A #n` element symbols, isotope,
//! `H D X v R r` counts and charge; bond primitives `- = # : ~ @`; the
//! operators `! & , ;`; branches, ring closures, `.` and `$()` one level
//! deep.

use std::fmt;

use thiserror::Error;

use super::target::{TargetAtom, TargetBond};
use crate::molgraph::{atomic_number_of_symbol, BondOrder, Molecule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmartsErrorKind {
    Empty,
    Unsupported(String),
    UnexpectedCharacter(char),
    UnknownElement(String),
    UnclosedBracket,
    UnclosedBranch,
    UnmatchedParenthesis,
    DanglingRingBond,
    DanglingBond,
    NestedRecursion,
    RingBondToSameAtom,
}

impl fmt::Display for SmartsErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmartsErrorKind::Empty => write!(f, "empty pattern"),
            SmartsErrorKind::Unsupported(p) => write!(f, "unsupported primitive '{p}'"),
            SmartsErrorKind::UnexpectedCharacter(c) => write!(f, "unexpected character '{c}'"),
            SmartsErrorKind::UnknownElement(s) => write!(f, "unknown element '{s}'"),
            SmartsErrorKind::UnclosedBracket => write!(f, "unclosed bracket"),
            SmartsErrorKind::UnclosedBranch => write!(f, "unclosed branch"),
            SmartsErrorKind::UnmatchedParenthesis => write!(f, "unmatched parenthesis"),
            SmartsErrorKind::DanglingRingBond => write!(f, "ring bond never closed"),
            SmartsErrorKind::DanglingBond => write!(f, "bond without a second atom"),
            SmartsErrorKind::NestedRecursion => write!(f, "recursive pattern nested more than one level"),
            SmartsErrorKind::RingBondToSameAtom => write!(f, "ring bond closes on its own atom"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct SmartsError {
    pub offset: usize,
    pub kind: SmartsErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum AtomPrim {
    Any,
    Aromatic,
    Aliphatic,
    Element { z: u8, aromatic: bool },
    AtomicNumber(u8),
    Isotope(u16),
    Charge(i8),
    TotalH(u8),
    Degree(u8),
    TotalDegree(u8),
    Valence(u8),
    InRing(bool),
    RingCount(u8),
    MinRingSize(u16),
    Recursive(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr<P> {
    Prim(P),
    Not(Box<Expr<P>>),
    And(Vec<Expr<P>>),
    Or(Vec<Expr<P>>),
}

impl<P> Expr<P> {
    fn eval(&self, f: &impl Fn(&P) -> bool) -> bool {
        match self {
            Expr::Prim(p) => f(p),
            Expr::Not(e) => !e.eval(f),
            Expr::And(v) => v.iter().all(|e| e.eval(f)),
            Expr::Or(v) => v.iter().any(|e| e.eval(f)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BondPrim {
    Single,
    Double,
    Triple,
    Aromatic,
    Any,
    Ring,
    /// No bond symbol written: single or aromatic.
    Implicit,
}

pub(crate) type AtomExpr = Expr<AtomPrim>;
pub(crate) type BondExpr = Expr<BondPrim>;

/// A compiled pattern.
#[derive(Debug, Clone)]
pub struct SmartsPattern {
    source: String,
    pub(crate) atoms: Vec<AtomExpr>,
    pub(crate) bonds: Vec<(usize, usize, BondExpr)>,
    pub(crate) adjacency: Vec<Vec<(usize, usize)>>,
    pub(crate) recursive: Vec<SmartsPattern>,
}

impl SmartsPattern {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    /// A pattern that matches exactly the constitution of `mol`: element,
    /// aromaticity, charge, hydrogen count and bond order per position.
    pub fn from_molecule(mol: &Molecule) -> SmartsPattern {
        let atoms = (0..mol.atom_count())
            .map(|i| {
                let a = mol.atom(i);
                Expr::And(vec![
                    Expr::Prim(AtomPrim::Element { z: a.element.atomic_number(), aromatic: a.aromatic }),
                    Expr::Prim(AtomPrim::Charge(a.formal_charge)),
                    Expr::Prim(AtomPrim::TotalH(mol.total_h(i) as u8)),
                ])
            })
            .collect();
        let bonds: Vec<(usize, usize, BondExpr)> = mol
            .bonds()
            .iter()
            .map(|b| {
                let prim = match b.order {
                    BondOrder::Single => BondPrim::Single,
                    BondOrder::Double => BondPrim::Double,
                    BondOrder::Triple => BondPrim::Triple,
                    BondOrder::Aromatic => BondPrim::Aromatic,
                };
                (b.a, b.b, Expr::Prim(prim))
            })
            .collect();
        let mut adjacency = vec![Vec::new(); mol.atom_count()];
        for (k, &(a, b, _)) in bonds.iter().enumerate() {
            adjacency[a].push((b, k));
            adjacency[b].push((a, k));
        }
        SmartsPattern { source: crate::smiles::write(mol), atoms, bonds, adjacency, recursive: Vec::new() }
    }

    pub(crate) fn atom_matches(&self, p: usize, atom: &TargetAtom, index: usize, recursive_hits: &[Vec<bool>]) -> bool {
        self.atoms[p].eval(&|prim| atom_prim_matches(prim, atom, index, recursive_hits))
    }

    pub(crate) fn bond_matches(&self, pb: usize, bond: &TargetBond) -> bool {
        self.bonds[pb].2.eval(&|prim| bond_prim_matches(*prim, bond))
    }
}

impl fmt::Display for SmartsPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn atom_prim_matches(prim: &AtomPrim, a: &TargetAtom, index: usize, recursive_hits: &[Vec<bool>]) -> bool {
    match *prim {
        AtomPrim::Any => true,
        AtomPrim::Aromatic => a.aromatic,
        AtomPrim::Aliphatic => !a.aromatic,
        AtomPrim::Element { z, aromatic } => a.atomic_number == z && a.aromatic == aromatic,
        AtomPrim::AtomicNumber(z) => a.atomic_number == z,
        AtomPrim::Isotope(m) => a.isotope == Some(m),
        AtomPrim::Charge(q) => a.charge == q,
        AtomPrim::TotalH(n) => a.total_h == n,
        AtomPrim::Degree(n) => a.degree == n,
        AtomPrim::TotalDegree(n) => a.total_degree == n,
        AtomPrim::Valence(n) => a.valence == n,
        AtomPrim::InRing(want) => (a.ring_count > 0) == want,
        AtomPrim::RingCount(n) => a.ring_count == n,
        AtomPrim::MinRingSize(n) => a.min_ring == n,
        AtomPrim::Recursive(k) => recursive_hits[k].get(index).copied().unwrap_or(false),
    }
}

fn bond_prim_matches(prim: BondPrim, b: &TargetBond) -> bool {
    match prim {
        BondPrim::Single => b.order == BondOrder::Single,
        BondPrim::Double => b.order == BondOrder::Double,
        BondPrim::Triple => b.order == BondOrder::Triple,
        BondPrim::Aromatic => b.order == BondOrder::Aromatic,
        BondPrim::Any => true,
        BondPrim::Ring => b.in_ring,
        BondPrim::Implicit => matches!(b.order, BondOrder::Single | BondOrder::Aromatic),
    }
}

pub fn parse_smarts(pattern: &str) -> Result<SmartsPattern, SmartsError> {
    parse_inner(pattern, 0, false)
}

fn parse_inner(pattern: &str, base: usize, nested: bool) -> Result<SmartsPattern, SmartsError> {
    let mut p = Parser {
        s: pattern.as_bytes(),
        pos: 0,
        base,
        nested,
        atoms: Vec::new(),
        bonds: Vec::new(),
        recursive: Vec::new(),
    };
    p.parse_chain()?;
    let mut adjacency = vec![Vec::new(); p.atoms.len()];
    for (k, &(a, b, _)) in p.bonds.iter().enumerate() {
        adjacency[a].push((b, k));
        adjacency[b].push((a, k));
    }
    Ok(SmartsPattern { source: pattern.to_string(), atoms: p.atoms, bonds: p.bonds, adjacency, recursive: p.recursive })
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    base: usize,
    nested: bool,
    atoms: Vec<AtomExpr>,
    bonds: Vec<(usize, usize, BondExpr)>,
    recursive: Vec<SmartsPattern>,
}

const AROMATIC_SYMBOLS: [(&str, u8); 9] =
    [("se", 34), ("as", 33), ("te", 52), ("b", 5), ("c", 6), ("n", 7), ("o", 8), ("p", 15), ("s", 16)];

impl Parser<'_> {
    fn err(&self, offset: usize, kind: SmartsErrorKind) -> SmartsError {
        SmartsError { offset: self.base + offset, kind }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn parse_chain(&mut self) -> Result<(), SmartsError> {
        if self.s.is_empty() {
            return Err(self.err(0, SmartsErrorKind::Empty));
        }
        let mut prev: Option<usize> = None;
        let mut branches: Vec<(usize, usize)> = Vec::new();
        let mut pending: Option<(BondExpr, usize)> = None;
        let mut rings: Vec<Option<(usize, Option<BondExpr>, usize)>> = vec![None; 100];
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    if prev.is_none() || pending.is_some() {
                        return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter('(')));
                    }
                    branches.push((prev.unwrap(), start));
                    self.pos += 1;
                }
                b')' => {
                    let Some((atom, _)) = branches.pop() else {
                        return Err(self.err(start, SmartsErrorKind::UnmatchedParenthesis));
                    };
                    if pending.is_some() {
                        return Err(self.err(start, SmartsErrorKind::DanglingBond));
                    }
                    prev = Some(atom);
                    self.pos += 1;
                }
                b'.' => {
                    if pending.is_some() {
                        return Err(self.err(start, SmartsErrorKind::DanglingBond));
                    }
                    prev = None;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'~' | b'@' | b'!' | b'/' | b'\\' => {
                    if prev.is_none() || pending.is_some() {
                        return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter(c as char)));
                    }
                    let e = self.parse_bond_expr()?;
                    pending = Some((e, start));
                }
                b'0'..=b'9' | b'%' => {
                    let Some(atom) = prev else {
                        return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter(c as char)));
                    };
                    let label = self.ring_label()?;
                    let bond = pending.take().map(|(e, _)| e);
                    match rings[label].take() {
                        Some((other, open_bond, _)) => {
                            if other == atom {
                                return Err(self.err(start, SmartsErrorKind::RingBondToSameAtom));
                            }
                            let e = bond.or(open_bond).unwrap_or(Expr::Prim(BondPrim::Implicit));
                            self.bonds.push((other, atom, e));
                        }
                        None => rings[label] = Some((atom, bond, start)),
                    }
                }
                _ => {
                    let atom = self.parse_atom()?;
                    if let Some(p) = prev {
                        let e = pending.take().map(|(e, _)| e).unwrap_or(Expr::Prim(BondPrim::Implicit));
                        self.bonds.push((p, atom, e));
                    } else if let Some((_, at)) = pending {
                        return Err(self.err(at, SmartsErrorKind::DanglingBond));
                    }
                    prev = Some(atom);
                }
            }
        }
        if let Some((_, at)) = pending {
            return Err(self.err(at, SmartsErrorKind::DanglingBond));
        }
        if let Some(&(_, at)) = branches.last() {
            return Err(self.err(at, SmartsErrorKind::UnclosedBranch));
        }
        if let Some((_, _, at)) = rings.iter().flatten().next() {
            return Err(self.err(*at, SmartsErrorKind::DanglingRingBond));
        }
        Ok(())
    }

    fn ring_label(&mut self) -> Result<usize, SmartsError> {
        let start = self.pos;
        if self.s[self.pos] == b'%' {
            let digits = self.s.get(self.pos + 1..self.pos + 3);
            match digits {
                Some(d) if d.iter().all(u8::is_ascii_digit) => {
                    self.pos += 3;
                    Ok(((d[0] - b'0') * 10 + (d[1] - b'0')) as usize)
                }
                _ => Err(self.err(start, SmartsErrorKind::UnexpectedCharacter('%'))),
            }
        } else {
            self.pos += 1;
            Ok((self.s[start] - b'0') as usize)
        }
    }

    fn parse_bond_expr(&mut self) -> Result<BondExpr, SmartsError> {
        self.parse_bond_low()
    }

    fn parse_bond_low(&mut self) -> Result<BondExpr, SmartsError> {
        let mut parts = vec![self.parse_bond_or()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            parts.push(self.parse_bond_or()?);
        }
        Ok(collapse(parts, Expr::And))
    }

    fn parse_bond_or(&mut self) -> Result<BondExpr, SmartsError> {
        let mut parts = vec![self.parse_bond_and()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            parts.push(self.parse_bond_and()?);
        }
        Ok(collapse(parts, Expr::Or))
    }

    fn parse_bond_and(&mut self) -> Result<BondExpr, SmartsError> {
        let mut parts = vec![self.parse_bond_not()?];
        loop {
            match self.peek() {
                Some(b'&') => {
                    self.pos += 1;
                    parts.push(self.parse_bond_not()?);
                }
                Some(b'-' | b'=' | b'#' | b':' | b'~' | b'@' | b'!' | b'/' | b'\\') => {
                    parts.push(self.parse_bond_not()?)
                }
                _ => break,
            }
        }
        Ok(collapse(parts, Expr::And))
    }

    fn parse_bond_not(&mut self) -> Result<BondExpr, SmartsError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.parse_bond_not()?)));
        }
        let start = self.pos;
        let prim = match self.peek() {
            Some(b'-') => BondPrim::Single,
            Some(b'=') => BondPrim::Double,
            Some(b'#') => BondPrim::Triple,
            Some(b':') => BondPrim::Aromatic,
            Some(b'~') => BondPrim::Any,
            Some(b'@') => BondPrim::Ring,
            Some(b'/' | b'\\') => return Err(self.err(start, SmartsErrorKind::Unsupported("directional bond".into()))),
            Some(c) => return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter(c as char))),
            None => return Err(self.err(start, SmartsErrorKind::DanglingBond)),
        };
        self.pos += 1;
        Ok(Expr::Prim(prim))
    }

    fn parse_atom(&mut self) -> Result<usize, SmartsError> {
        let start = self.pos;
        let c = self.s[self.pos];
        let expr = if c == b'[' {
            self.pos += 1;
            let e = self.parse_bracket()?;
            if self.peek() != Some(b']') {
                return Err(self.err(start, SmartsErrorKind::UnclosedBracket));
            }
            self.pos += 1;
            e
        } else {
            let prim = match c {
                b'*' => AtomPrim::Any,
                b'a' => AtomPrim::Aromatic,
                b'A' => AtomPrim::Aliphatic,
                b'C' if self.s.get(self.pos + 1) == Some(&b'l') => {
                    self.pos += 1;
                    AtomPrim::Element { z: 17, aromatic: false }
                }
                b'B' if self.s.get(self.pos + 1) == Some(&b'r') => {
                    self.pos += 1;
                    AtomPrim::Element { z: 35, aromatic: false }
                }
                b'B' => AtomPrim::Element { z: 5, aromatic: false },
                b'C' => AtomPrim::Element { z: 6, aromatic: false },
                b'N' => AtomPrim::Element { z: 7, aromatic: false },
                b'O' => AtomPrim::Element { z: 8, aromatic: false },
                b'P' => AtomPrim::Element { z: 15, aromatic: false },
                b'S' => AtomPrim::Element { z: 16, aromatic: false },
                b'F' => AtomPrim::Element { z: 9, aromatic: false },
                b'I' => AtomPrim::Element { z: 53, aromatic: false },
                b'b' => AtomPrim::Element { z: 5, aromatic: true },
                b'c' => AtomPrim::Element { z: 6, aromatic: true },
                b'n' => AtomPrim::Element { z: 7, aromatic: true },
                b'o' => AtomPrim::Element { z: 8, aromatic: true },
                b'p' => AtomPrim::Element { z: 15, aromatic: true },
                b's' => AtomPrim::Element { z: 16, aromatic: true },
                _ => return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter(c as char))),
            };
            self.pos += 1;
            Expr::Prim(prim)
        };
        self.atoms.push(expr);
        Ok(self.atoms.len() - 1)
    }

    fn parse_bracket(&mut self) -> Result<AtomExpr, SmartsError> {
        // `[H]`, `[2H]`, `[H+]`: a hydrogen atom rather than an H count.
        let rest = &self.s[self.pos..];
        let digits = rest.iter().take_while(|c| c.is_ascii_digit()).count();
        if rest.get(digits) == Some(&b'H') && matches!(rest.get(digits + 1), Some(b']' | b'+' | b'-')) {
            let mut parts = Vec::new();
            if digits > 0 {
                parts.push(Expr::Prim(AtomPrim::Isotope(self.number(digits)? as u16)));
            }
            self.pos += 1;
            parts.push(Expr::Prim(AtomPrim::AtomicNumber(1)));
            if matches!(self.peek(), Some(b'+' | b'-')) {
                parts.push(Expr::Prim(self.charge()?));
            }
            return Ok(collapse(parts, Expr::And));
        }
        self.parse_low()
    }

    fn number(&mut self, len: usize) -> Result<u32, SmartsError> {
        let start = self.pos;
        let text = std::str::from_utf8(&self.s[start..start + len]).unwrap();
        self.pos += len;
        text.parse::<u32>()
            .map_err(|_| self.err(start, SmartsErrorKind::UnexpectedCharacter(text.chars().next().unwrap())))
    }

    fn optional_number(&mut self) -> Result<Option<u32>, SmartsError> {
        let len = self.s[self.pos..].iter().take_while(|c| c.is_ascii_digit()).count();
        if len == 0 {
            Ok(None)
        } else {
            self.number(len).map(Some)
        }
    }

    fn parse_low(&mut self) -> Result<AtomExpr, SmartsError> {
        let mut parts = vec![self.parse_or()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            parts.push(self.parse_or()?);
        }
        Ok(collapse(parts, Expr::And))
    }

    fn parse_or(&mut self) -> Result<AtomExpr, SmartsError> {
        let mut parts = vec![self.parse_and()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            parts.push(self.parse_and()?);
        }
        Ok(collapse(parts, Expr::Or))
    }

    fn parse_and(&mut self) -> Result<AtomExpr, SmartsError> {
        let mut parts = vec![self.parse_not()?];
        loop {
            match self.peek() {
                Some(b'&') => {
                    self.pos += 1;
                    parts.push(self.parse_not()?);
                }
                Some(b']' | b';' | b',') | None => break,
                _ => parts.push(self.parse_not()?),
            }
        }
        Ok(collapse(parts, Expr::And))
    }

    fn parse_not(&mut self) -> Result<AtomExpr, SmartsError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.parse_not()?)));
        }
        self.parse_primitive().map(Expr::Prim)
    }

    fn charge(&mut self) -> Result<AtomPrim, SmartsError> {
        let start = self.pos;
        let sign = self.s[self.pos];
        self.pos += 1;
        let mut magnitude = 1i32;
        if let Some(n) = self.optional_number()? {
            magnitude = n as i32;
        } else {
            while self.peek() == Some(sign) {
                self.pos += 1;
                magnitude += 1;
            }
        }
        if magnitude > 8 {
            return Err(self.err(start, SmartsErrorKind::Unsupported("charge magnitude".into())));
        }
        Ok(AtomPrim::Charge(if sign == b'+' { magnitude as i8 } else { -magnitude as i8 }))
    }

    fn count(&mut self, default: u32) -> Result<u8, SmartsError> {
        let n = self.optional_number()?.unwrap_or(default);
        u8::try_from(n).map_err(|_| self.err(self.pos, SmartsErrorKind::Unsupported("count above 255".into())))
    }

    fn parse_primitive(&mut self) -> Result<AtomPrim, SmartsError> {
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Err(self.err(start, SmartsErrorKind::UnclosedBracket));
        };
        let next = self.s.get(self.pos + 1).copied();
        let prim = match c {
            b'*' => {
                self.pos += 1;
                AtomPrim::Any
            }
            b'a' if next != Some(b's') => {
                self.pos += 1;
                AtomPrim::Aromatic
            }
            b'A' if !matches!(next, Some(b'c' | b'g' | b'l' | b'm' | b'r' | b's' | b't' | b'u')) => {
                self.pos += 1;
                AtomPrim::Aliphatic
            }
            b'#' => {
                self.pos += 1;
                let n = self
                    .optional_number()?
                    .ok_or_else(|| self.err(start, SmartsErrorKind::UnexpectedCharacter('#')))?;
                let z = u8::try_from(n)
                    .ok()
                    .filter(|&z| z <= 118)
                    .ok_or_else(|| self.err(start, SmartsErrorKind::UnknownElement(format!("#{n}"))))?;
                AtomPrim::AtomicNumber(z)
            }
            b'0'..=b'9' => {
                let n = self.optional_number()?.unwrap();
                AtomPrim::Isotope(
                    u16::try_from(n).map_err(|_| self.err(start, SmartsErrorKind::Unsupported("isotope".into())))?,
                )
            }
            b'+' | b'-' => self.charge()?,
            b'$' => {
                if next != Some(b'(') {
                    return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter('$')));
                }
                if self.nested {
                    return Err(self.err(start, SmartsErrorKind::NestedRecursion));
                }
                let inner_start = self.pos + 2;
                let mut depth = 1;
                let mut end = inner_start;
                while end < self.s.len() && depth > 0 {
                    match self.s[end] {
                        b'(' => depth += 1,
                        b')' => depth -= 1,
                        _ => {}
                    }
                    end += 1;
                }
                if depth != 0 {
                    return Err(self.err(start, SmartsErrorKind::UnclosedBranch));
                }
                let inner = std::str::from_utf8(&self.s[inner_start..end - 1]).unwrap();
                let sub = parse_inner(inner, self.base + inner_start, true)?;
                self.recursive.push(sub);
                self.pos = end;
                AtomPrim::Recursive(self.recursive.len() - 1)
            }
            b'H' if !matches!(next, Some(b'e' | b'f' | b'g' | b'o' | b's')) => {
                self.pos += 1;
                AtomPrim::TotalH(self.count(1)?)
            }
            b'D' if !matches!(next, Some(b'b' | b'y' | b's')) => {
                self.pos += 1;
                AtomPrim::Degree(self.count(1)?)
            }
            b'X' if next != Some(b'e') => {
                self.pos += 1;
                AtomPrim::TotalDegree(self.count(1)?)
            }
            b'v' => {
                self.pos += 1;
                AtomPrim::Valence(self.count(1)?)
            }
            b'R' if !matches!(next, Some(b'a' | b'b' | b'e' | b'f' | b'g' | b'h' | b'n' | b'u')) => {
                self.pos += 1;
                match self.optional_number()? {
                    None => AtomPrim::InRing(true),
                    Some(0) => AtomPrim::InRing(false),
                    Some(n) => AtomPrim::RingCount(n.min(255) as u8),
                }
            }
            b'r' => {
                self.pos += 1;
                match self.optional_number()? {
                    None => AtomPrim::InRing(true),
                    Some(0) => AtomPrim::InRing(false),
                    Some(n) => AtomPrim::MinRingSize(n.min(u16::MAX as u32) as u16),
                }
            }
            b'Z' if matches!(next, Some(b'n' | b'r')) => {
                self.pos += 2;
                AtomPrim::Element { z: if next == Some(b'n') { 30 } else { 40 }, aromatic: false }
            }
            b'h' | b'x' | b'@' | b'^' | b'z' | b'Z' => {
                return Err(self.err(start, SmartsErrorKind::Unsupported((c as char).to_string())));
            }
            b'A'..=b'Z' => {
                let two = next.filter(u8::is_ascii_lowercase).map(|n| [c, n]);
                let sym2 = two.as_ref().map(|t| std::str::from_utf8(t).unwrap());
                if let Some(z) = sym2.and_then(atomic_number_of_symbol) {
                    self.pos += 2;
                    AtomPrim::Element { z, aromatic: false }
                } else if let Some(z) = atomic_number_of_symbol(std::str::from_utf8(&[c]).unwrap()) {
                    self.pos += 1;
                    AtomPrim::Element { z, aromatic: false }
                } else {
                    return Err(self.err(start, SmartsErrorKind::UnknownElement((c as char).to_string())));
                }
            }
            b'a'..=b'z' => {
                let rest = &self.s[self.pos..];
                let Some(&(sym, z)) = AROMATIC_SYMBOLS.iter().find(|(sym, _)| rest.starts_with(sym.as_bytes())) else {
                    return Err(self.err(start, SmartsErrorKind::UnknownElement((c as char).to_string())));
                };
                self.pos += sym.len();
                AtomPrim::Element { z, aromatic: true }
            }
            _ => return Err(self.err(start, SmartsErrorKind::UnexpectedCharacter(c as char))),
        };
        Ok(prim)
    }
}

fn collapse<P>(mut parts: Vec<Expr<P>>, wrap: fn(Vec<Expr<P>>) -> Expr<P>) -> Expr<P> {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        wrap(parts)
    }
}
