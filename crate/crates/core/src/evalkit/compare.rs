//! Relation accuracy of the hull model against the AABB baseline on
//! synthetic scenes with analytic ground truth.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::scenario::{FrameTruth, ScenarioSpec, Synthetic, SCENARIOS};
use super::EvalError;
use crate::config::Config;
use crate::events::{build_model, EventError, SceneTrace, Side};
use crate::grammar::MappingLibrary;
use crate::pipeline::analyze;
use crate::exec::Execution;
use crate::geometry::ObjectModel;
use crate::relations::{relate, ModelKind, SsrLabel};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelScore {
    pub model: String,
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
    /// (truth, predicted, count) for every mismatch seen.
    pub confusion: Vec<(SsrLabel, SsrLabel, usize)>,
    pub emitted: BTreeSet<SsrLabel>,
    /// For each label only a volumetric model can separate: whether it was
    /// ever predicted correctly.
    pub distinguishes: BTreeMap<SsrLabel, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub scenes: usize,
    pub hull: ModelScore,
    pub aabb: ModelScore,
}

/// `n` specs cycling through every scenario, seeds `seed..seed + n`.
pub fn corpus(n: usize, noise: f64, seed: u64) -> Vec<ScenarioSpec> {
    (0..n)
        .map(|i| ScenarioSpec::new(SCENARIOS[i % SCENARIOS.len()], seed + i as u64).with_noise(noise))
        .collect()
}

/// Manifest text: one `scenario seed noise [frames]` line per scene.
pub fn write_manifest(specs: &[ScenarioSpec]) -> String {
    let mut out = String::from("# scenario seed noise [frames]\n");
    for s in specs {
        out += &format!("{} {} {}", s.scenario, s.seed, s.noise);
        if let Some(n) = s.frames {
            out += &format!(" {n}");
        }
        out.push('\n');
    }
    out
}

pub fn read_manifest(text: &str) -> Result<Vec<ScenarioSpec>, EvalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| EvalError::Manifest { line: i + 1, msg: msg.to_string() };
        let f: Vec<&str> = line.split_whitespace().collect();
        if !(3..=4).contains(&f.len()) {
            return Err(bad("expected `scenario seed noise [frames]`"));
        }
        if !SCENARIOS.contains(&f[0]) {
            return Err(bad(&format!("unknown scenario `{}`", f[0])));
        }
        let seed = f[1].parse().map_err(|_| bad("bad seed"))?;
        let noise: f64 = f[2].parse().map_err(|_| bad("bad noise"))?;
        if !(noise.is_finite() && noise >= 0.0) {
            return Err(bad("noise must be >= 0"));
        }
        let mut spec = ScenarioSpec::new(f[0], seed).with_noise(noise);
        if let Some(n) = f.get(3) {
            spec.frames = Some(n.parse().map_err(|_| bad("bad frame count"))?);
        }
        out.push(spec);
    }
    Ok(out)
}

type Tally = BTreeMap<(SsrLabel, SsrLabel), usize>;

fn tally(trace: &SceneTrace, truth: &[FrameTruth], cfg: &Config, kind: ModelKind) -> Result<Tally, EvalError> {
    let err = |msg: String| EvalError::Trace { id: trace.id.clone(), msg };
    let mut out = Tally::new();
    for ft in truth {
        let frame = trace.frames.get(ft.frame).ok_or_else(|| err(format!("no frame {}", ft.frame)))?;
        let models: BTreeMap<&str, ObjectModel> = frame
            .objects
            .iter()
            .map(|o| build_model(o, cfg).map(|m| (o.id.as_str(), m)).map_err(|e| err(e.to_string())))
            .collect::<Result<_, _>>()?;
        for pt in &ft.pairs {
            let (Some(a), Some(b)) = (models.get(pt.a.as_str()), models.get(pt.b.as_str())) else {
                return Err(err(format!("missing pair {}/{}", pt.a, pt.b)));
            };
            *out.entry((pt.ssr, relate(a, b, cfg, kind).ssr)).or_default() += 1;
        }
    }
    Ok(out)
}

fn score(model: &str, t: &Tally) -> ModelScore {
    let total = t.values().sum();
    let correct = t.iter().filter(|((a, b), _)| a == b).map(|(_, n)| n).sum();
    let emitted = t.keys().map(|k| k.1).collect();
    let distinguishes = SsrLabel::ALL
        .into_iter()
        .filter(|l| l.needs_hull())
        .map(|l| (l, t.get(&(l, l)).is_some_and(|&n| n > 0)))
        .collect();
    ModelScore {
        model: model.to_string(),
        correct,
        total,
        accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        confusion: t.iter().filter(|((a, b), _)| a != b).map(|(&(a, b), &n)| (a, b, n)).collect(),
        emitted,
        distinguishes,
    }
}

fn merge(into: &mut Tally, from: Tally) {
    for (k, n) in from {
        *into.entry(k).or_default() += n;
    }
}

/// Scores both models against the analytic relations sampled in each scene.
pub fn compare_models(scenes: &[Synthetic], cfg: &Config, exec: Execution) -> Result<AccuracyReport, EvalError> {
    let items: Vec<(&SceneTrace, &[FrameTruth])> = scenes.iter().map(|s| (&s.trace, &s.truth.relations[..])).collect();
    compare_labeled(&items, cfg, exec)
}

/// As [`compare_models`], for traces paired with relation labels from elsewhere.
pub fn compare_labeled(
    items: &[(&SceneTrace, &[FrameTruth])],
    cfg: &Config,
    exec: Execution,
) -> Result<AccuracyReport, EvalError> {
    let scenes = items;
    if scenes.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let per = exec.map(scenes, |&(t, r)| {
        Ok::<_, EvalError>((tally(t, r, cfg, ModelKind::Hull)?, tally(t, r, cfg, ModelKind::Aabb)?))
    });
    let (mut hull, mut aabb) = (Tally::new(), Tally::new());
    for r in per {
        let (h, a) = r?;
        merge(&mut hull, h);
        merge(&mut aabb, a);
    }
    Ok(AccuracyReport { scenes: scenes.len(), hull: score("hull", &hull), aabb: score("aabb", &aabb) })
}

/// Name of the one complex action recognised for `side`, when its snippets
/// hold exactly one known action and nothing unrecognised.
pub fn recognized_action(
    trace: &SceneTrace,
    side: Side,
    cfg: &Config,
    lib: &MappingLibrary,
) -> Result<Option<String>, EventError> {
    let a = analyze(trace, cfg, lib, Execution::Sequential)?;
    let rec: Vec<_> = a.hand(side).recognized.iter().flatten().collect();
    Ok(match rec.as_slice() {
        [one] if !one.is_unknown() => Some(one.name.clone()),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    pub total: usize,
    pub recovered: usize,
    pub rate: f64,
    /// Ids of traces whose action was not recovered.
    pub misses: Vec<String>,
}

/// Fraction of traces whose acting hand yields exactly the expected action.
pub fn action_recovery(
    items: &[(&SceneTrace, Side, &str)],
    cfg: &Config,
    lib: &MappingLibrary,
    exec: Execution,
) -> Result<Recovery, EventError> {
    let hits = exec.map(items, |&(t, side, name)| recognized_action(t, side, cfg, lib).map(|r| r.as_deref() == Some(name)));
    let mut misses = Vec::new();
    for (hit, (t, _, _)) in hits.into_iter().zip(items) {
        if !hit? {
            misses.push(t.id.clone());
        }
    }
    let total = items.len();
    let recovered = total - misses.len();
    Ok(Recovery { total, recovered, rate: if total == 0 { 0.0 } else { recovered as f64 / total as f64 }, misses })
}
