//! The action grammar and an Earley chart parser.

use std::collections::{HashMap, HashSet};
use std::fmt;

use super::GrammarError;
use crate::events::{AtomicAction, Entity, Place, Subject};
use crate::relations::SsrLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonTerminal {
    S,
    Sp,
    Sub,
    Ap,
    Me,
    Op,
    SRp,
    Hand,
    A,
    O,
    P,
    SR,
}

impl NonTerminal {
    pub fn name(self) -> &'static str {
        match self {
            NonTerminal::S => "S",
            NonTerminal::Sp => "S_p",
            NonTerminal::Sub => "Sub",
            NonTerminal::Ap => "A_p",
            NonTerminal::Me => "Me",
            NonTerminal::Op => "O_p",
            NonTerminal::SRp => "SR_p",
            NonTerminal::Hand => "Hand",
            NonTerminal::A => "A",
            NonTerminal::O => "O",
            NonTerminal::P => "P",
            NonTerminal::SR => "SR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sym {
    N(NonTerminal),
    T(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: NonTerminal,
    pub rhs: Vec<Sym>,
}

pub const HAND_TOKENS: [&str; 2] = ["HL", "HR"];
pub const PRIMITIVE_TOKENS: [&str; 4] = ["T", "U", "Mt", "Fmt"];
pub const OBJECT_TOKENS: [&str; 5] = ["O1", "O2", "O3", "G", "-"];
pub const PLACE_TOKENS: [&str; 5] = ["G", "Air", "O1", "O2", "O3"];

#[derive(Debug, Clone)]
pub struct Grammar {
    pub start: NonTerminal,
    pub productions: Vec<Production>,
    by_lhs: HashMap<NonTerminal, Vec<usize>>,
}

impl Default for Grammar {
    fn default() -> Self {
        Grammar::standard()
    }
}

impl Grammar {
    /// The twelve rule groups. `Hand` is grounded in the two hand sides; the
    /// merged entity reaches a hand only through `Me -> Hand O`.
    pub fn standard() -> Grammar {
        use NonTerminal::*;
        let n = Sym::N;
        let t = |s: &str| Sym::T(s.to_string());
        let mut p = vec![
            (S, vec![n(Sp)]),
            (S, vec![n(Sp), n(Sp)]),
            (Sp, vec![n(Sub), n(Ap)]),
            (Sp, vec![n(Sp), n(Sub), n(Ap)]),
            (Sub, vec![n(Hand)]),
            (Sub, vec![n(Me)]),
            (Ap, vec![n(A), n(Op)]),
            (Ap, vec![n(Ap), n(Op)]),
            (Me, vec![n(Hand), n(O)]),
            (Op, vec![n(O), n(SRp)]),
            (SRp, vec![n(SR), n(P)]),
        ];
        p.extend(HAND_TOKENS.iter().map(|h| (Hand, vec![t(h)])));
        p.extend(PRIMITIVE_TOKENS.iter().map(|a| (A, vec![t(a)])));
        p.extend(OBJECT_TOKENS.iter().map(|o| (O, vec![t(o)])));
        p.extend(PLACE_TOKENS.iter().map(|o| (P, vec![t(o)])));
        p.extend(SsrLabel::ALL.iter().map(|l| (SR, vec![t(l.as_str())])));
        let productions: Vec<Production> = p.into_iter().map(|(lhs, rhs)| Production { lhs, rhs }).collect();
        let mut by_lhs: HashMap<NonTerminal, Vec<usize>> = HashMap::new();
        for (i, pr) in productions.iter().enumerate() {
            by_lhs.entry(pr.lhs).or_default().push(i);
        }
        Grammar { start: S, productions, by_lhs }
    }

    pub fn is_terminal(&self, tok: &str) -> bool {
        self.productions.iter().any(|p| matches!(&p.rhs[..], [Sym::T(t)] if t == tok))
    }

    /// Number of distinct left-hand sides.
    pub fn rule_groups(&self) -> usize {
        self.by_lhs.len()
    }

    pub fn parse(&self, tokens: &[String]) -> Result<ParseTree, GrammarError> {
        let chart = Chart::build(self, tokens);
        if !chart.completed.contains(&(self.start, 0, tokens.len())) {
            return Err(GrammarError::NoParse { position: chart.furthest, token: tokens.get(chart.furthest).cloned() });
        }
        let mut builder = TreeBuilder { g: self, tokens, chart: &chart, memo: HashMap::new() };
        builder
            .build(self.start, 0, tokens.len())
            .ok_or(GrammarError::NoParse { position: tokens.len(), token: None })
    }

    pub fn accepts(&self, tokens: &[String]) -> bool {
        let chart = Chart::build(self, tokens);
        chart.completed.contains(&(self.start, 0, tokens.len()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    prod: usize,
    dot: usize,
    origin: usize,
}

struct Chart {
    completed: HashSet<(NonTerminal, usize, usize)>,
    ends: HashMap<(NonTerminal, usize), Vec<usize>>,
    furthest: usize,
}

impl Chart {
    fn build(g: &Grammar, tokens: &[String]) -> Chart {
        let n = tokens.len();
        let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
        let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
        let mut completed = HashSet::new();
        let mut ends: HashMap<(NonTerminal, usize), Vec<usize>> = HashMap::new();
        let add = |k: usize, it: Item, sets: &mut Vec<Vec<Item>>, seen: &mut Vec<HashSet<Item>>| {
            if seen[k].insert(it) {
                sets[k].push(it);
            }
        };
        for &p in &g.by_lhs[&g.start] {
            add(0, Item { prod: p, dot: 0, origin: 0 }, &mut sets, &mut seen);
        }
        let mut furthest = 0;
        for k in 0..=n {
            if !sets[k].is_empty() {
                furthest = k;
            }
            let mut i = 0;
            while i < sets[k].len() {
                let it = sets[k][i];
                i += 1;
                let prod = &g.productions[it.prod];
                match prod.rhs.get(it.dot) {
                    Some(Sym::N(nt)) => {
                        for &p in &g.by_lhs[nt] {
                            add(k, Item { prod: p, dot: 0, origin: k }, &mut sets, &mut seen);
                        }
                    }
                    Some(Sym::T(t)) => {
                        if k < n && tokens[k] == *t {
                            add(k + 1, Item { dot: it.dot + 1, ..it }, &mut sets, &mut seen);
                        }
                    }
                    None => {
                        if completed.insert((prod.lhs, it.origin, k)) {
                            ends.entry((prod.lhs, it.origin)).or_default().push(k);
                        }
                        let waiting: Vec<Item> = sets[it.origin]
                            .iter()
                            .filter(|w| matches!(g.productions[w.prod].rhs.get(w.dot), Some(Sym::N(x)) if *x == prod.lhs))
                            .copied()
                            .collect();
                        for w in waiting {
                            add(k, Item { dot: w.dot + 1, ..w }, &mut sets, &mut seen);
                        }
                    }
                }
            }
        }
        for v in ends.values_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        Chart { completed, ends, furthest }
    }
}

/// A derivation tree. Leaves are terminals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub symbol: String,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaves(&self) -> Vec<&str> {
        if self.children.is_empty() {
            return vec![self.symbol.as_str()];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }

    /// Shape with node labels, leaves included.
    pub fn bracketed(&self) -> String {
        if self.children.is_empty() {
            return self.symbol.clone();
        }
        let inner: Vec<String> = self.children.iter().map(|c| c.bracketed()).collect();
        format!("({} {})", self.symbol, inner.join(" "))
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0)
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(t: &ParseTree, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(f, "{}{}", "  ".repeat(depth), t.symbol)?;
            for c in &t.children {
                walk(c, depth + 1, f)?;
            }
            Ok(())
        }
        walk(self, 0, f)
    }
}

struct TreeBuilder<'a> {
    g: &'a Grammar,
    tokens: &'a [String],
    chart: &'a Chart,
    memo: HashMap<(NonTerminal, usize, usize), Option<ParseTree>>,
}

impl TreeBuilder<'_> {
    /// Productions in declaration order; within one, the first child takes
    /// the longest span that still leaves a derivation for the rest.
    fn build(&mut self, nt: NonTerminal, i: usize, j: usize) -> Option<ParseTree> {
        if let Some(t) = self.memo.get(&(nt, i, j)) {
            return t.clone();
        }
        let mut result = None;
        if self.chart.completed.contains(&(nt, i, j)) {
            for &p in &self.g.by_lhs[&nt] {
                let rhs = self.g.productions[p].rhs.clone();
                if let Some(children) = self.seq(&rhs, i, j) {
                    result = Some(ParseTree { symbol: nt.name().to_string(), children });
                    break;
                }
            }
        }
        self.memo.insert((nt, i, j), result.clone());
        result
    }

    fn seq(&mut self, rhs: &[Sym], i: usize, j: usize) -> Option<Vec<ParseTree>> {
        let Some((first, rest)) = rhs.split_first() else {
            return (i == j).then(Vec::new);
        };
        let candidates: Vec<usize> = match first {
            Sym::T(t) => {
                if i < self.tokens.len() && self.tokens[i] == *t {
                    vec![i + 1]
                } else {
                    vec![]
                }
            }
            Sym::N(nt) => self.chart.ends.get(&(*nt, i)).cloned().unwrap_or_default(),
        };
        for e in candidates {
            if e > j || (rest.is_empty() && e != j) || (!rest.is_empty() && e == j) {
                continue;
            }
            let head = match first {
                Sym::T(t) => ParseTree { symbol: t.clone(), children: vec![] },
                Sym::N(nt) => match self.build(*nt, i, e) {
                    Some(t) => t,
                    None => continue,
                },
            };
            if let Some(mut tail) = self.seq(rest, e, j) {
                tail.insert(0, head);
                return Some(tail);
            }
        }
        None
    }
}

/// Terminal string of a sequence of atomic actions. Object ids become slot
/// tokens `O1..O3` in order of first appearance.
pub fn action_tokens(actions: &[AtomicAction], slots: &[String]) -> Vec<String> {
    let slot = |id: &str| {
        let k = slots.iter().position(|s| s == id).unwrap_or(slots.len()).min(2);
        format!("O{}", k + 1)
    };
    let mut out = Vec::with_capacity(actions.len() * 6);
    for a in actions {
        match &a.subject {
            Subject::Hand(s) => out.push(s.symbol().to_string()),
            Subject::Me(s, x) => {
                out.push(s.symbol().to_string());
                out.push(slot(x));
            }
        }
        out.push(a.primitive.as_str().to_string());
        out.push(match &a.object {
            None => "-".to_string(),
            Some(Entity::Ground) => "G".to_string(),
            Some(Entity::Object(x)) => slot(x),
        });
        out.push(a.relation.as_str().to_string());
        out.push(match &a.place {
            Place::Ground => "G".to_string(),
            Place::Air => "Air".to_string(),
            Place::Object(x) => slot(x),
        });
    }
    out
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| c.is_whitespace() || c == ',' || c == '(' || c == ')')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}
