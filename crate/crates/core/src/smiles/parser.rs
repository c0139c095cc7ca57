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

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::molgraph::{atomic_number_of_symbol, Atom, BondOrder, BondStereo, Chirality, Element, Molecule, StereoRef};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    EmptyInput,
    UnclosedBranch,
    UnmatchedParenthesis,
    EmptyBranch,
    DanglingRingBond,
    DanglingBond,
    BondWithoutAtom,
    UnknownElement(String),
    MalformedBracket(&'static str),
    UnexpectedCharacter(char),
    ConflictingRingBond,
    RingBondToSameAtom,
    DuplicateBond,
    ChargeOutOfRange,
    UnsupportedChirality,
    Unsupported(&'static str),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::EmptyInput => f.write_str("empty input"),
            ParseErrorKind::UnclosedBranch => f.write_str("unclosed branch"),
            ParseErrorKind::UnmatchedParenthesis => f.write_str("unmatched closing parenthesis"),
            ParseErrorKind::EmptyBranch => f.write_str("empty branch"),
            ParseErrorKind::DanglingRingBond => f.write_str("dangling ring bond"),
            ParseErrorKind::DanglingBond => f.write_str("bond without a following atom"),
            ParseErrorKind::BondWithoutAtom => f.write_str("bond or ring closure without a preceding atom"),
            ParseErrorKind::UnknownElement(s) => write!(f, "unknown element '{s}'"),
            ParseErrorKind::MalformedBracket(why) => write!(f, "malformed bracket atom: {why}"),
            ParseErrorKind::UnexpectedCharacter(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::ConflictingRingBond => f.write_str("conflicting ring bond orders"),
            ParseErrorKind::RingBondToSameAtom => f.write_str("ring bond to the same atom"),
            ParseErrorKind::DuplicateBond => f.write_str("duplicate bond"),
            ParseErrorKind::ChargeOutOfRange => f.write_str("charge out of range"),
            ParseErrorKind::UnsupportedChirality => f.write_str("unsupported chirality class"),
            ParseErrorKind::Unsupported(what) => write!(f, "unsupported {what}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    /// Byte offset in the input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { offset, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BondSym {
    Single,
    Double,
    Triple,
    Aromatic,
    Up,
    Down,
}

impl BondSym {
    fn order(self) -> BondOrder {
        match self {
            BondSym::Single | BondSym::Up | BondSym::Down => BondOrder::Single,
            BondSym::Double => BondOrder::Double,
            BondSym::Triple => BondOrder::Triple,
            BondSym::Aromatic => BondOrder::Aromatic,
        }
    }

    fn stereo(self) -> Option<BondStereo> {
        match self {
            BondSym::Up => Some(BondStereo::Up),
            BondSym::Down => Some(BondStereo::Down),
            _ => None,
        }
    }
}

struct OpenRing {
    atom: usize,
    bond: Option<BondSym>,
    offset: usize,
    slot: usize,
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    mol: Molecule,
    refs: Vec<Vec<StereoRef>>,
    prev: Option<usize>,
    pending: Option<(BondSym, usize)>,
    branches: Vec<(usize, usize, usize)>,
    rings: HashMap<u32, OpenRing>,
}

/// Parse SMILES text into an unsanitized molecule.
pub fn parse(text: &str) -> Result<Molecule, ParseError> {
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        mol: Molecule::new(),
        refs: Vec::new(),
        prev: None,
        pending: None,
        branches: Vec::new(),
        rings: HashMap::new(),
    };
    p.run()?;
    Ok(p.finish())
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn err<T>(&self, offset: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError::new(offset, kind))
    }

    fn run(&mut self) -> Result<(), ParseError> {
        if self.s.is_empty() {
            return self.err(0, ParseErrorKind::EmptyInput);
        }
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'(' => {
                    let Some(prev) = self.prev else {
                        return self.err(start, ParseErrorKind::BondWithoutAtom);
                    };
                    if self.pending.is_some() {
                        return self.err(start, ParseErrorKind::UnexpectedCharacter('('));
                    }
                    self.branches.push((prev, start, self.mol.atom_count()));
                    self.pos += 1;
                }
                b')' => {
                    let Some((atom, _, count)) = self.branches.pop() else {
                        return self.err(start, ParseErrorKind::UnmatchedParenthesis);
                    };
                    if self.pending.is_some() {
                        return self.err(start, ParseErrorKind::DanglingBond);
                    }
                    if self.mol.atom_count() == count {
                        return self.err(start, ParseErrorKind::EmptyBranch);
                    }
                    self.prev = Some(atom);
                    self.pos += 1;
                }
                b'.' => {
                    if self.pending.is_some() {
                        return self.err(start, ParseErrorKind::DanglingBond);
                    }
                    if self.prev.is_none() {
                        return self.err(start, ParseErrorKind::UnexpectedCharacter('.'));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'-' | b'=' | b'#' | b':' | b'/' | b'\\' => {
                    if self.prev.is_none() {
                        return self.err(start, ParseErrorKind::BondWithoutAtom);
                    }
                    if self.pending.is_some() {
                        return self.err(start, ParseErrorKind::UnexpectedCharacter(c as char));
                    }
                    let sym = match c {
                        b'-' => BondSym::Single,
                        b'=' => BondSym::Double,
                        b'#' => BondSym::Triple,
                        b':' => BondSym::Aromatic,
                        b'/' => BondSym::Up,
                        _ => BondSym::Down,
                    };
                    self.pending = Some((sym, start));
                    self.pos += 1;
                }
                b'$' => return self.err(start, ParseErrorKind::Unsupported("quadruple bond")),
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure((c - b'0') as u32, start)?;
                }
                b'%' => {
                    let d = self.s.get(start + 1..start + 3);
                    match d {
                        Some([a, b]) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            self.pos += 3;
                            self.ring_closure(((a - b'0') * 10 + (b - b'0')) as u32, start)?;
                        }
                        _ => return self.err(start, ParseErrorKind::UnexpectedCharacter('%')),
                    }
                }
                b'[' => {
                    let atom = self.bracket_atom()?;
                    self.attach(atom, start)?;
                }
                b'*' => return self.err(start, ParseErrorKind::Unsupported("wildcard atom")),
                _ => {
                    let atom = self.organic_atom()?;
                    self.attach(atom, start)?;
                }
            }
        }
        if let Some(&(_, offset, _)) = self.branches.last() {
            return self.err(offset, ParseErrorKind::UnclosedBranch);
        }
        if let Some((_, offset)) = self.pending {
            return self.err(offset, ParseErrorKind::DanglingBond);
        }
        if let Some(open) = self.rings.values().min_by_key(|r| r.offset) {
            return self.err(open.offset, ParseErrorKind::DanglingRingBond);
        }
        Ok(())
    }

    fn organic_atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.pos;
        let c = self.s[start];
        let next = self.s.get(start + 1).copied();
        let (element, aromatic, len) = match (c, next) {
            (b'C', Some(b'l')) => (Element::Cl, false, 2),
            (b'B', Some(b'r')) => (Element::Br, false, 2),
            (b'B', _) => (Element::B, false, 1),
            (b'C', _) => (Element::C, false, 1),
            (b'N', _) => (Element::N, false, 1),
            (b'O', _) => (Element::O, false, 1),
            (b'P', _) => (Element::P, false, 1),
            (b'S', _) => (Element::S, false, 1),
            (b'F', _) => (Element::F, false, 1),
            (b'I', _) => (Element::I, false, 1),
            (b'b', _) => (Element::B, true, 1),
            (b'c', _) => (Element::C, true, 1),
            (b'n', _) => (Element::N, true, 1),
            (b'o', _) => (Element::O, true, 1),
            (b'p', _) => (Element::P, true, 1),
            (b's', _) => (Element::S, true, 1),
            (c, _) if c.is_ascii_uppercase() => {
                let mut end = start + 1;
                if matches!(next, Some(l) if l.is_ascii_lowercase()) {
                    end += 1;
                }
                let sym = String::from_utf8_lossy(&self.s[start..end]).into_owned();
                return self.err(start, ParseErrorKind::UnknownElement(sym));
            }
            _ => {
                let ch =
                    std::str::from_utf8(&self.s[start..]).ok().and_then(|t| t.chars().next()).unwrap_or('\u{fffd}');
                return self.err(start, ParseErrorKind::UnexpectedCharacter(ch));
            }
        };
        self.pos += len;
        Ok(Atom { aromatic, ..Atom::new(element) })
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        let mut v: u32 = 0;
        while let Some(d) = self.peek().filter(u8::is_ascii_digit) {
            v = v.saturating_mul(10).saturating_add((d - b'0') as u32);
            self.pos += 1;
        }
        (self.pos > start).then_some(v)
    }

    fn bracket_atom(&mut self) -> Result<Atom, ParseError> {
        let open = self.pos;
        self.pos += 1;
        let malformed = |me: &Self, why| me.err::<Atom>(open, ParseErrorKind::MalformedBracket(why));

        let isotope = self.number();
        if matches!(isotope, Some(0)) || isotope.is_some_and(|v| v > 999) {
            return malformed(self, "bad isotope");
        }

        let sym_start = self.pos;
        let Some(c) = self.peek() else { return malformed(self, "unterminated") };
        let (element, aromatic) = if c.is_ascii_lowercase() {
            let two = self.s.get(sym_start..sym_start + 2);
            let (sym, len) = match two {
                Some(b"se") => ("Se", 2),
                Some(b"as") => ("As", 2),
                _ => match c {
                    b'b' => ("B", 1),
                    b'c' => ("C", 1),
                    b'n' => ("N", 1),
                    b'o' => ("O", 1),
                    b'p' => ("P", 1),
                    b's' => ("S", 1),
                    _ => return malformed(self, "bad element symbol"),
                },
            };
            self.pos += len;
            (Element::from_symbol(sym).unwrap(), true)
        } else if c.is_ascii_uppercase() {
            let mut sym = (c as char).to_string();
            if let Some(l) = self.s.get(sym_start + 1).filter(|l| l.is_ascii_lowercase()) {
                let cand = format!("{}{}", c as char, *l as char);
                if atomic_number_of_symbol(&cand).is_some() {
                    sym = cand;
                }
            }
            self.pos += sym.len();
            match Element::from_symbol(&sym) {
                Some(e) => (e, false),
                None => return self.err(sym_start, ParseErrorKind::UnknownElement(sym)),
            }
        } else if c == b'*' {
            return self.err(sym_start, ParseErrorKind::Unsupported("wildcard atom"));
        } else {
            return malformed(self, "missing element symbol");
        };

        let mut chirality = None;
        if self.peek() == Some(b'@') {
            self.pos += 1;
            chirality = Some(Chirality::CounterClockwise);
            if self.peek() == Some(b'@') {
                self.pos += 1;
                chirality = Some(Chirality::Clockwise);
            } else if self.s[self.pos..].starts_with(b"TH") {
                self.pos += 2;
                chirality = match self.number() {
                    Some(1) => Some(Chirality::CounterClockwise),
                    Some(2) => Some(Chirality::Clockwise),
                    _ => return self.err(open, ParseErrorKind::UnsupportedChirality),
                };
            } else if matches!(self.peek(), Some(b'A' | b'S' | b'T' | b'O')) {
                return self.err(open, ParseErrorKind::UnsupportedChirality);
            }
        }

        let mut hydrogens = 0u32;
        if self.peek() == Some(b'H') {
            self.pos += 1;
            hydrogens = self.number().unwrap_or(1);
            if hydrogens > 8 {
                return malformed(self, "hydrogen count too large");
            }
        }

        let mut charge: i32 = 0;
        if let Some(sign @ (b'+' | b'-')) = self.peek() {
            let unit = if sign == b'+' { 1 } else { -1 };
            self.pos += 1;
            if let Some(n) = self.number() {
                charge = unit * n.min(99) as i32;
            } else {
                charge = unit;
                while self.peek() == Some(sign) {
                    self.pos += 1;
                    charge += unit;
                }
            }
            if charge.abs() > 4 {
                return self.err(open, ParseErrorKind::ChargeOutOfRange);
            }
        }

        if self.peek() == Some(b':') {
            self.pos += 1;
            if self.number().is_none() {
                return malformed(self, "bad atom class");
            }
        }

        if self.peek() != Some(b']') {
            return malformed(self, if self.peek().is_none() { "unterminated" } else { "unexpected character" });
        }
        self.pos += 1;

        if aromatic && !element.can_be_aromatic() {
            return malformed(self, "element cannot be aromatic");
        }
        Ok(Atom {
            element,
            formal_charge: charge as i8,
            explicit_h: Some(hydrogens as u8),
            isotope: isotope.map(|v| v as u16),
            aromatic,
            chirality,
            stereo_refs: Vec::new(),
        })
    }

    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.mol.atom(a).aromatic && self.mol.atom(b).aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn attach(&mut self, atom: Atom, offset: usize) -> Result<(), ParseError> {
        let has_h = atom.explicit_h.unwrap_or(0) > 0;
        let idx = self.mol.add_atom(atom);
        self.refs.push(Vec::new());
        if let Some(prev) = self.prev {
            let (order, stereo) = match self.pending.take() {
                Some((sym, _)) => (sym.order(), sym.stereo()),
                None => (self.default_order(prev, idx), None),
            };
            self.mol
                .add_bond_with_stereo(prev, idx, order, stereo)
                .map_err(|_| ParseError::new(offset, ParseErrorKind::DuplicateBond))?;
            self.refs[prev].push(StereoRef::Atom(idx));
            self.refs[idx].push(StereoRef::Atom(prev));
        }
        if has_h {
            self.refs[idx].push(StereoRef::ImplicitH);
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, digit: u32, offset: usize) -> Result<(), ParseError> {
        let Some(here) = self.prev else {
            return self.err(offset, ParseErrorKind::BondWithoutAtom);
        };
        let bond = self.pending.take().map(|(s, _)| s);
        match self.rings.remove(&digit) {
            None => {
                let slot = self.refs[here].len();
                self.refs[here].push(StereoRef::ImplicitH);
                self.rings.insert(digit, OpenRing { atom: here, bond, offset, slot });
            }
            Some(open) => {
                if open.atom == here {
                    return self.err(offset, ParseErrorKind::RingBondToSameAtom);
                }
                let sym = match (open.bond, bond) {
                    (Some(a), Some(b)) if a.order() != b.order() => {
                        return self.err(offset, ParseErrorKind::ConflictingRingBond)
                    }
                    (Some(a), _) => Some(a),
                    (None, Some(b)) => Some(match b {
                        BondSym::Up => BondSym::Down,
                        BondSym::Down => BondSym::Up,
                        other => other,
                    }),
                    (None, None) => None,
                };
                let (order, stereo) = match sym {
                    Some(s) => (s.order(), s.stereo()),
                    None => (self.default_order(open.atom, here), None),
                };
                self.mol
                    .add_bond_with_stereo(open.atom, here, order, stereo)
                    .map_err(|_| ParseError::new(offset, ParseErrorKind::DuplicateBond))?;
                self.refs[open.atom][open.slot] = StereoRef::Atom(here);
                self.refs[here].push(StereoRef::Atom(open.atom));
            }
        }
        Ok(())
    }

    fn finish(self) -> Molecule {
        let Parser { mut mol, refs, .. } = self;
        for (i, r) in refs.into_iter().enumerate() {
            if mol.atom(i).chirality.is_some() {
                mol.atom_mut(i).stereo_refs = r;
            }
        }
        mol
    }
}
