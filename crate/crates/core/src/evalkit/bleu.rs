use std::collections::HashMap;

use serde::Serialize;

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BleuScore {
    pub n: usize,
    /// Modified precision for orders `1..=n`.
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub score: f64,
}

fn ngrams<T: AsRef<str>>(tokens: &[T], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut out = HashMap::new();
    for w in tokens.windows(n) {
        *out.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
    }
    out
}

/// Sentence BLEU with clipped counts against the best reference for each
/// n-gram. `smoothing` adds one to numerator and denominator for orders
/// above one.
pub fn bleu<T: AsRef<str>, R: AsRef<[T]>>(
    candidate: &[T],
    references: &[R],
    max_n: usize,
    smoothing: bool,
) -> Result<BleuScore, EvalError> {
    if !(1..=4).contains(&max_n) {
        return Err(EvalError::BleuOrder(max_n));
    }
    if references.is_empty() {
        return Err(EvalError::NoReferences);
    }
    if candidate.is_empty() {
        return Err(EvalError::EmptyCandidate);
    }
    let c = candidate.len();
    let mut precisions = Vec::with_capacity(max_n);
    for n in 1..=max_n {
        let cand = ngrams(candidate, n);
        let mut best: HashMap<&Vec<&str>, usize> = HashMap::new();
        for r in references {
            let rc = ngrams(r.as_ref(), n);
            for g in cand.keys() {
                let k = rc.get(g).copied().unwrap_or(0);
                let e = best.entry(g).or_insert(0);
                *e = (*e).max(k);
            }
        }
        let matched: usize = cand.iter().map(|(g, &k)| k.min(best[g])).sum();
        let total: usize = cand.values().sum();
        let p = if smoothing && n > 1 {
            (matched + 1) as f64 / (total + 1) as f64
        } else if total == 0 {
            0.0
        } else {
            matched as f64 / total as f64
        };
        precisions.push(p);
    }
    let r = references
        .iter()
        .map(|r| r.as_ref().len())
        .min_by_key(|&len| (len.abs_diff(c), len))
        .unwrap();
    let brevity_penalty = if c < r { (1.0 - r as f64 / c as f64).exp() } else { 1.0 };
    let score = if precisions.contains(&0.0) {
        0.0
    } else {
        brevity_penalty * (precisions.iter().map(|p| p.ln()).sum::<f64>() / max_n as f64).exp()
    };
    Ok(BleuScore { n: max_n, precisions, brevity_penalty, score })
}

/// Whitespace tokenisation with sentence punctuation split off.
pub fn bleu_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .flat_map(|w| {
            let t = w.trim_end_matches(['.', ',', ';', '!', '?']);
            let punct = &w[t.len()..];
            std::iter::once(t.to_lowercase()).chain(punct.chars().map(String::from))
        })
        .filter(|s| !s.is_empty())
        .collect()
}
