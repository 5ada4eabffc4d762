//! Finite Kripke structures: data model, validation and the line-oriented
//! text format.
//!
//! ```text
//! kripke
//! props: p q
//! states: s0 s1
//! init: s0
//! labels: s0: p q ; s1:
//! trans: s0 -> s1 ; s1 -> s1 s0
//! ```
//!
//! States are named in files and addressed by dense index internally; the
//! index order is the declaration order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Index of a state inside one [`KripkeStructure`].
pub type StateId = usize;

/// Words that the CTL concrete syntax reserves; they cannot name propositions.
const RESERVED: &[&str] = &[
    "true", "false", "E", "A", "U", "EX", "EG", "EF", "AX", "AG", "AF",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KripkeError {
    #[error("state `{state}` has no successor")]
    NonTotalTransition { state: String },
    #[error("unknown state `{name}`")]
    UnknownState { name: String },
    #[error("unknown proposition `{name}`")]
    UnknownProposition { name: String },
    #[error("the set of initial states is empty")]
    EmptyInitial,
    #[error("a Kripke structure needs at least one state")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate proposition `{0}`")]
    DuplicateProposition(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("line {line}, column {column}: expected {expected}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
    },
}

/// An atomic proposition name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Proposition(String);

impl Proposition {
    pub fn new(name: impl Into<String>) -> Result<Self, KripkeError> {
        let name = name.into();
        if is_identifier(&name) && !RESERVED.contains(&name.as_str()) {
            Ok(Proposition(name))
        } else {
            Err(KripkeError::InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Proposition {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Unchecked, name-based description of a structure, as read from a file or
/// assembled by hand. [`validate`] turns it into a [`KripkeStructure`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawKripke {
    pub props: Vec<String>,
    pub states: Vec<String>,
    pub init: Vec<String>,
    pub labels: Vec<(String, Vec<String>)>,
    pub trans: Vec<(String, Vec<String>)>,
}

/// A validated Kripke structure `M = (S, I, R, L)` over an ordered alphabet.
///
/// Immutable after construction. The transition relation is total.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KripkeStructure {
    alphabet: Vec<Proposition>,
    state_names: Vec<String>,
    initial: Vec<StateId>,
    post: Vec<Vec<StateId>>,
    // proposition indices into `alphabet`, sorted
    labels: Vec<Vec<usize>>,
}

/// Checks a raw description against every structural invariant.
pub fn validate(raw: &RawKripke) -> Result<KripkeStructure, KripkeError> {
    let alphabet = raw
        .props
        .iter()
        .map(|p| Proposition::new(p.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut prop_index = HashMap::new();
    for (i, p) in alphabet.iter().enumerate() {
        if prop_index.insert(p.as_str(), i).is_some() {
            return Err(KripkeError::DuplicateProposition(p.0.clone()));
        }
    }
    if raw.states.is_empty() {
        return Err(KripkeError::NoStates);
    }
    let mut state_index = HashMap::new();
    for (i, s) in raw.states.iter().enumerate() {
        if !is_identifier(s) {
            return Err(KripkeError::InvalidIdentifier(s.clone()));
        }
        if state_index.insert(s.as_str(), i).is_some() {
            return Err(KripkeError::DuplicateState(s.clone()));
        }
    }
    let lookup = |name: &str| {
        state_index
            .get(name)
            .copied()
            .ok_or_else(|| KripkeError::UnknownState {
                name: name.to_string(),
            })
    };

    let n = raw.states.len();
    let initial = raw
        .init
        .iter()
        .map(|s| lookup(s))
        .collect::<Result<Vec<_>, _>>()?;

    let mut labels = vec![BTreeSet::new(); n];
    for (state, props) in &raw.labels {
        let s = lookup(state)?;
        for p in props {
            let idx = prop_index
                .get(p.as_str())
                .ok_or_else(|| KripkeError::UnknownProposition { name: p.clone() })?;
            labels[s].insert(*idx);
        }
    }
    let mut post = vec![BTreeSet::new(); n];
    for (state, succs) in &raw.trans {
        let s = lookup(state)?;
        for t in succs {
            post[s].insert(lookup(t)?);
        }
    }

    KripkeStructure::assemble(
        alphabet,
        raw.states.clone(),
        initial,
        post.into_iter().map(|s| s.into_iter().collect()).collect(),
        labels
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
    )
}

impl KripkeStructure {
    fn assemble(
        alphabet: Vec<Proposition>,
        state_names: Vec<String>,
        initial: Vec<StateId>,
        post: Vec<Vec<StateId>>,
        labels: Vec<Vec<usize>>,
    ) -> Result<Self, KripkeError> {
        let mut initial: Vec<_> = initial
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        initial.shrink_to_fit();
        if initial.is_empty() {
            return Err(KripkeError::EmptyInitial);
        }
        for (s, succ) in post.iter().enumerate() {
            if succ.is_empty() {
                return Err(KripkeError::NonTotalTransition {
                    state: state_names[s].clone(),
                });
            }
        }
        Ok(KripkeStructure {
            alphabet,
            state_names,
            initial,
            post,
            labels,
        })
    }

    /// Builds a structure from dense indices. States are named `s0, s1, ...`.
    ///
    /// `labels[s]` lists proposition names of state `s`; `post[s]` lists its
    /// successors.
    pub fn from_indices<P: AsRef<str>>(
        alphabet: &[P],
        initial: &[StateId],
        post: &[Vec<StateId>],
        labels: &[Vec<P>],
    ) -> Result<Self, KripkeError> {
        let n = post.len();
        let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
        let name = |i: StateId| {
            states
                .get(i)
                .cloned()
                .ok_or_else(|| KripkeError::UnknownState {
                    name: format!("#{i}"),
                })
        };
        let raw = RawKripke {
            props: alphabet.iter().map(|p| p.as_ref().to_string()).collect(),
            states: states.clone(),
            init: initial.iter().map(|&i| name(i)).collect::<Result<_, _>>()?,
            labels: labels
                .iter()
                .enumerate()
                .map(|(s, ps)| {
                    Ok((
                        name(s)?,
                        ps.iter().map(|p| p.as_ref().to_string()).collect(),
                    ))
                })
                .collect::<Result<_, KripkeError>>()?,
            trans: post
                .iter()
                .enumerate()
                .map(|(s, ts)| {
                    Ok((
                        name(s)?,
                        ts.iter().map(|&t| name(t)).collect::<Result<_, _>>()?,
                    ))
                })
                .collect::<Result<_, KripkeError>>()?,
        };
        validate(&raw)
    }

    /// The size of the structure, `|S|`.
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn alphabet(&self) -> &[Proposition] {
        &self.alphabet
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|p| p.as_str() == name)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    /// Successors of `s`, sorted by index. Never empty.
    pub fn post(&self, s: StateId) -> &[StateId] {
        &self.post[s]
    }

    /// Proposition indices labelling `s`, sorted.
    pub fn label_indices(&self, s: StateId) -> &[usize] {
        &self.labels[s]
    }

    pub fn has_label(&self, s: StateId, prop: usize) -> bool {
        self.labels[s].binary_search(&prop).is_ok()
    }

    pub fn labeled(&self, s: StateId, name: &str) -> bool {
        self.prop_index(name).is_some_and(|p| self.has_label(s, p))
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    /// True when both structures are equal up to a renaming of states.
    ///
    /// Exhaustive backtracking is used for up to eight states; larger
    /// structures are compared by identity of their indexed contents.
    pub fn is_isomorphic(&self, other: &KripkeStructure) -> bool {
        let same_alphabet = {
            let a: BTreeSet<_> = self.alphabet.iter().collect();
            let b: BTreeSet<_> = other.alphabet.iter().collect();
            a == b
        };
        if !same_alphabet
            || self.num_states() != other.num_states()
            || self.initial.len() != other.initial.len()
        {
            return false;
        }
        fn label_names(m: &KripkeStructure, s: StateId) -> BTreeSet<&str> {
            m.labels[s]
                .iter()
                .map(|&p| m.alphabet[p].as_str())
                .collect()
        }
        if self.num_states() > 8 {
            return self.initial == other.initial
                && self.post == other.post
                && self
                    .states()
                    .all(|s| label_names(self, s) == label_names(other, s));
        }
        let n = self.num_states();
        let compatible = |a: StateId, b: StateId| {
            self.post[a].len() == other.post[b].len()
                && self.initial.contains(&a) == other.initial.contains(&b)
                && label_names(self, a) == label_names(other, b)
        };
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn extend(
            a: &KripkeStructure,
            b: &KripkeStructure,
            s: usize,
            map: &mut [usize],
            used: &mut [bool],
            compatible: &dyn Fn(StateId, StateId) -> bool,
        ) -> bool {
            if s == map.len() {
                return a.states().all(|x| {
                    let mut img: Vec<_> = a.post[x].iter().map(|&y| map[y]).collect();
                    img.sort_unstable();
                    img == b.post[map[x]]
                });
            }
            for t in 0..map.len() {
                if !used[t] && compatible(s, t) {
                    map[s] = t;
                    used[t] = true;
                    if extend(a, b, s + 1, map, used, compatible) {
                        return true;
                    }
                    used[t] = false;
                }
            }
            false
        }
        extend(self, other, 0, &mut map, &mut used, &compatible)
    }
}

// ---------------------------------------------------------------------------
// text format

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Colon,
    Semi,
    Arrow,
}

struct Token<'a> {
    tok: Tok<'a>,
    column: usize,
}

fn syntax(line: usize, column: usize, expected: impl Into<String>) -> KripkeError {
    KripkeError::Syntax {
        line,
        column,
        expected: expected.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<Token<'_>>, KripkeError> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let column = line[..i].chars().count() + 1;
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b':' => {
                out.push(Token {
                    tok: Tok::Colon,
                    column,
                });
                i += 1;
            }
            b';' => {
                out.push(Token {
                    tok: Tok::Semi,
                    column,
                });
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push(Token {
                    tok: Tok::Arrow,
                    column,
                });
                i += 2;
            }
            c if c.is_ascii_alphanumeric() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(&line[start..i]),
                    column,
                });
            }
            _ => return Err(syntax(line_no, column, "identifier, `:`, `;` or `->`")),
        }
    }
    Ok(out)
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    end_column: usize,
}

impl<'a> Line<'a> {
    fn cursor(&self) -> Cursor<'_, 'a> {
        Cursor { line: self, pos: 0 }
    }
}

struct Cursor<'l, 'a> {
    line: &'l Line<'a>,
    pos: usize,
}

impl<'a> Cursor<'_, 'a> {
    fn peek(&self) -> Option<&Tok<'a>> {
        self.line.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.line
            .tokens
            .get(self.pos)
            .map_or(self.line.end_column, |t| t.column)
    }

    fn error(&self, expected: &str) -> KripkeError {
        syntax(self.line.number, self.column(), expected)
    }

    fn expect(&mut self, tok: Tok<'_>, what: &str) -> Result<(), KripkeError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, KripkeError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = *s;
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(what)),
        }
    }

    fn idents(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while let Some(Tok::Ident(s)) = self.peek() {
            out.push(s.to_string());
            self.pos += 1;
        }
        out
    }

    fn at_end(&self) -> bool {
        self.pos == self.line.tokens.len()
    }

    fn finish(&self) -> Result<(), KripkeError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }
}

/// Parses a document in the Kripke text format and validates it.
pub fn parse_kripke(text: &str) -> Result<KripkeStructure, KripkeError> {
    validate(&parse_raw(text)?)
}

/// Parses a document without applying [`validate`].
pub fn parse_raw(text: &str) -> Result<RawKripke, KripkeError> {
    let mut lines = Vec::new();
    for (idx, raw_line) in text.split('\n').enumerate() {
        let content = raw_line.split('#').next().unwrap_or("");
        let tokens = tokenize(idx + 1, content)?;
        if !tokens.is_empty() {
            lines.push(Line {
                number: idx + 1,
                tokens,
                end_column: content.trim_end().chars().count() + 1,
            });
        }
    }
    let last_line = text.split('\n').count();
    let mut iter = lines.iter();
    let mut next_section = |keyword: &str| -> Result<Option<&Line<'_>>, KripkeError> {
        match iter.next() {
            Some(line) => Ok(Some(line)),
            None => Err(syntax(last_line, 1, format!("`{keyword}` section"))),
        }
    };

    let header = next_section("kripke")?.unwrap();
    let mut c = header.cursor();
    if c.ident("`kripke` header")? != "kripke" {
        return Err(syntax(header.number, 1, "`kripke` header"));
    }
    c.finish()?;

    let mut raw = RawKripke::default();
    let section = |line: &Line<'_>, keyword: &str| -> Result<usize, KripkeError> {
        let mut c = line.cursor();
        match c.ident(&format!("`{keyword}:`")) {
            Ok(k) if k == keyword => {}
            _ => {
                return Err(syntax(
                    line.number,
                    line.tokens[0].column,
                    format!("`{keyword}:`"),
                ))
            }
        }
        c.expect(Tok::Colon, "`:`")?;
        Ok(c.pos)
    };

    let line = next_section("props")?.unwrap();
    let mut c = Cursor {
        line,
        pos: section(line, "props")?,
    };
    raw.props = c.idents();
    c.finish()?;

    let line = next_section("states")?.unwrap();
    let mut c = Cursor {
        line,
        pos: section(line, "states")?,
    };
    raw.states = c.idents();
    if raw.states.is_empty() {
        return Err(c.error("at least one state name"));
    }
    c.finish()?;

    let line = next_section("init")?.unwrap();
    let mut c = Cursor {
        line,
        pos: section(line, "init")?,
    };
    raw.init = c.idents();
    c.finish()?;

    let line = next_section("labels")?.unwrap();
    let mut c = Cursor {
        line,
        pos: section(line, "labels")?,
    };
    let mut seen = BTreeSet::new();
    if !c.at_end() {
        loop {
            let column = c.column();
            let state = c.ident("state name")?;
            if !seen.insert(state) {
                return Err(syntax(
                    line.number,
                    column,
                    "each state labelled at most once",
                ));
            }
            c.expect(Tok::Colon, "`:`")?;
            raw.labels.push((state.to_string(), c.idents()));
            if c.at_end() {
                break;
            }
            c.expect(Tok::Semi, "`;` or end of line")?;
        }
    }

    let line = next_section("trans")?.unwrap();
    let mut c = Cursor {
        line,
        pos: section(line, "trans")?,
    };
    let mut seen = BTreeSet::new();
    loop {
        let column = c.column();
        let state = c.ident("state name")?;
        if !seen.insert(state) {
            return Err(syntax(
                line.number,
                column,
                "each state listed at most once",
            ));
        }
        c.expect(Tok::Arrow, "`->`")?;
        let succs = c.idents();
        if succs.is_empty() {
            return Err(c.error("at least one successor"));
        }
        raw.trans.push((state.to_string(), succs));
        if c.at_end() {
            break;
        }
        c.expect(Tok::Semi, "`;` or end of line")?;
    }

    if let Some(extra) = iter.next() {
        return Err(syntax(
            extra.number,
            extra.tokens[0].column,
            "end of document",
        ));
    }
    Ok(raw)
}

/// Canonical serialization: fixed section order, states in declaration
/// order, successor lists and label sets sorted.
pub fn print_kripke(m: &KripkeStructure) -> String {
    let mut out = String::from("kripke\n");
    let join = |items: &mut dyn Iterator<Item = &str>| {
        items.fold(String::new(), |mut acc, s| {
            acc.push(' ');
            acc.push_str(s);
            acc
        })
    };
    out.push_str("props:");
    out.push_str(&join(&mut m.alphabet.iter().map(|p| p.as_str())));
    out.push_str("\nstates:");
    out.push_str(&join(&mut m.state_names.iter().map(String::as_str)));
    out.push_str("\ninit:");
    out.push_str(&join(&mut m.initial.iter().map(|&s| m.state_name(s))));
    let labels: Vec<String> = m
        .states()
        .map(|s| {
            format!(
                "{}:{}",
                m.state_name(s),
                join(&mut m.labels[s].iter().map(|&p| m.alphabet[p].as_str()))
            )
        })
        .collect();
    out.push_str("\nlabels: ");
    out.push_str(&labels.join(" ; "));
    let trans: Vec<String> = m
        .states()
        .map(|s| {
            format!(
                "{} ->{}",
                m.state_name(s),
                join(&mut m.post[s].iter().map(|&t| m.state_name(t)))
            )
        })
        .collect();
    out.push_str("\ntrans: ");
    out.push_str(&trans.join(" ; "));
    out.push('\n');
    out
}

impl fmt::Display for KripkeStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_kripke(self))
    }
}
