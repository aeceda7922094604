use std::collections::{BTreeSet, HashMap};

use super::{AtomicAction, Entity, EventError, Frame, ObjectInstance, Place, Primitive, Role, SceneTrace, Side, Subject};
use crate::config::Config;
use crate::exec::Execution;
use crate::geometry::{ObjectModel, Point3};
use crate::relations::{classify_dsr, relate, DsrLabel, ModelKind, SsrLabel};

pub(crate) fn build_model(o: &ObjectInstance, cfg: &Config) -> Result<ObjectModel, crate::geometry::GeometryError> {
    match o.bbox {
        Some(b) => ObjectModel::from_box(b),
        None => ObjectModel::new(o.points.clone(), cfg.eps_touch),
    }
}

/// Unordered pairs of object ids whose hulls touch in `frame`.
pub fn touch_graph(frame: &Frame, cfg: &Config) -> Result<BTreeSet<(String, String)>, EventError> {
    let models = frame
        .objects
        .iter()
        .map(|o| build_model(o, cfg).map_err(|e| EventError::Geometry { frame: 0, id: o.id.clone(), source: e }))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = BTreeSet::new();
    for i in 0..models.len() {
        for j in i + 1..models.len() {
            if relate(&models[i], &models[j], cfg, ModelKind::Hull).touching {
                let (a, b) = (&frame.objects[i].id, &frame.objects[j].id);
                out.insert(if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) });
            }
        }
    }
    Ok(out)
}

/// Per-frame models and the debounced touch graph of a whole trace.
pub struct TraceAnalysis<'a> {
    pub trace: &'a SceneTrace,
    pub cfg: Config,
    pub kind: ModelKind,
    ids: Vec<String>,
    roles: Vec<Role>,
    models: Vec<Vec<Option<ObjectModel>>>,
    /// Debounced adjacency: `adj[frame][id]` is the set of touched ids.
    adj: Vec<Vec<BTreeSet<usize>>>,
}

/// Atomic actions of both hands, in time order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HandActions {
    pub left: Vec<AtomicAction>,
    pub right: Vec<AtomicAction>,
}

impl HandActions {
    pub fn side(&self, s: Side) -> &[AtomicAction] {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }
}

impl<'a> TraceAnalysis<'a> {
    pub fn new(trace: &'a SceneTrace, cfg: &Config, exec: Execution) -> Result<Self, EventError> {
        Self::with_kind(trace, cfg, exec, ModelKind::Hull)
    }

    pub fn with_kind(trace: &'a SceneTrace, cfg: &Config, exec: Execution, kind: ModelKind) -> Result<Self, EventError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut ids = Vec::new();
        let mut roles = Vec::new();
        for o in trace.frames.iter().flat_map(|f| &f.objects) {
            if !index.contains_key(o.id.as_str()) {
                index.insert(&o.id, ids.len());
                ids.push(o.id.clone());
                roles.push(o.role);
            }
        }
        let n_ids = ids.len();
        let per_frame = exec.map_range(trace.frames.len(), |f| {
            let frame = &trace.frames[f];
            let mut models: Vec<Option<ObjectModel>> = vec![None; n_ids];
            for o in &frame.objects {
                let m = build_model(o, cfg).map_err(|e| EventError::Geometry { frame: f, id: o.id.clone(), source: e })?;
                models[index[o.id.as_str()]] = Some(m);
            }
            let mut edges = Vec::new();
            for i in 0..n_ids {
                for j in i + 1..n_ids {
                    if let (Some(a), Some(b)) = (&models[i], &models[j]) {
                        if relate(a, b, cfg, kind).touching {
                            edges.push((i, j));
                        }
                    }
                }
            }
            Ok::<_, EventError>((models, edges))
        });
        let mut models = Vec::with_capacity(per_frame.len());
        let mut raw = Vec::with_capacity(per_frame.len());
        for r in per_frame {
            let (m, e) = r?;
            models.push(m);
            raw.push(e);
        }
        let adj = debounce(&raw, n_ids, cfg.debounce.max(1));
        Ok(TraceAnalysis { trace, cfg: cfg.clone(), kind, ids, roles, models, adj })
    }

    pub fn frame_count(&self) -> usize {
        self.adj.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    fn is_hand(&self, i: usize) -> bool {
        self.roles[i].hand().is_some()
    }

    fn is_ground(&self, i: usize) -> bool {
        self.roles[i] == Role::Ground
    }

    fn hand_index(&self, s: Side) -> Option<usize> {
        (0..self.ids.len()).find(|&i| self.roles[i].hand() == Some(s))
    }

    fn ground(&self) -> Option<usize> {
        (0..self.ids.len()).find(|&i| self.is_ground(i))
    }

    /// Debounced touch partners of object `i` at frame `f`.
    pub fn touching(&self, f: usize, i: usize) -> &BTreeSet<usize> {
        &self.adj[f][i]
    }

    /// Debounced touch graph at frame `f` as id pairs.
    pub fn touch_pairs(&self, f: usize) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (i, set) in self.adj[f].iter().enumerate() {
            for &j in set {
                if i < j {
                    let (a, b) = (&self.ids[i], &self.ids[j]);
                    out.insert(if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) });
                }
            }
        }
        out
    }

    pub fn model(&self, f: usize, i: usize) -> Option<&ObjectModel> {
        self.models[f][i].as_ref()
    }

    pub fn ssr(&self, f: usize, a: usize, b: usize) -> SsrLabel {
        match (self.model(f, a), self.model(f, b)) {
            (Some(x), Some(y)) => relate(x, y, &self.cfg, self.kind).ssr,
            _ => SsrLabel::NoRelation,
        }
    }

    fn entity(&self, i: usize) -> Entity {
        if self.is_ground(i) {
            Entity::Ground
        } else {
            Entity::Object(self.ids[i].clone())
        }
    }

    /// Supporter of `x`: a touched object it rests on, else the ground, else air.
    pub fn place(&self, f: usize, x: usize) -> Place {
        if self.is_ground(x) {
            return Place::Ground;
        }
        let mut on_ground = false;
        for &z in &self.adj[f][x] {
            if self.is_hand(z) || self.ssr(f, x, z) != SsrLabel::To {
                continue;
            }
            if self.is_ground(z) {
                on_ground = true;
            } else {
                return Place::Object(self.ids[z].clone());
            }
        }
        if on_ground {
            Place::Ground
        } else {
            Place::Air
        }
    }

    fn centroid_track(&self, i: usize, from: usize, to: usize) -> Option<Vec<Point3>> {
        (from..=to).map(|f| self.model(f, i).map(|m| m.centroid())).collect()
    }

    fn dsr(&self, a: usize, b: usize, from: usize, to: usize) -> Option<DsrLabel> {
        let ta = self.centroid_track(a, from, to)?;
        let tb = self.centroid_track(b, from, to)?;
        let touching = vec![true; ta.len()];
        classify_dsr(&ta, &tb, &touching, &self.cfg.relation).ok()
    }

    /// Kinetic label of `a` and `b` over frames `from..=to`, using the
    /// debounced touch state of the pair.
    pub fn window_dsr(&self, a: usize, b: usize, from: usize, to: usize) -> Option<DsrLabel> {
        let ta = self.centroid_track(a, from, to)?;
        let tb = self.centroid_track(b, from, to)?;
        let touching: Vec<bool> = (from..=to).map(|f| self.adj[f][a].contains(&b)).collect();
        classify_dsr(&ta, &tb, &touching, &self.cfg.relation).ok()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    fn carried(&self, f: usize, h: usize) -> Vec<usize> {
        self.adj[f][h].iter().copied().filter(|&x| !self.is_hand(x) && !self.is_ground(x)).collect()
    }

    /// Touch and untouch events for one hand, keyed for ordering.
    fn contact_events(&self, side: Side, h: usize) -> Vec<AtomicAction> {
        let mut out = Vec::new();
        for f in 1..self.frame_count() {
            let mut here: Vec<(String, AtomicAction)> = Vec::new();
            let (prev, cur) = (&self.adj[f - 1][h], &self.adj[f][h]);
            for &x in prev.symmetric_difference(cur) {
                if self.is_hand(x) {
                    continue;
                }
                let prim = if cur.contains(&x) { Primitive::T } else { Primitive::U };
                here.push((
                    self.ids[x].clone(),
                    AtomicAction {
                        subject: Subject::Hand(side),
                        primitive: prim,
                        object: Some(self.entity(x)),
                        relation: self.ssr(f, h, x),
                        place: self.place(f, x),
                        frame_span: (f, f),
                    },
                ));
            }
            let carried = self.carried(f - 1, h);
            for &x in &carried {
                let (px, cx) = (&self.adj[f - 1][x], &self.adj[f][x]);
                for &y in px.symmetric_difference(cx) {
                    if self.is_hand(y) || (carried.contains(&y) && y < x) {
                        continue;
                    }
                    let prim = if cx.contains(&y) { Primitive::T } else { Primitive::U };
                    here.push((
                        self.ids[y].clone(),
                        AtomicAction {
                            subject: Subject::Me(side, self.ids[x].clone()),
                            primitive: prim,
                            object: Some(self.entity(y)),
                            relation: self.ssr(f, x, y),
                            place: self.place(f, y),
                            frame_span: (f, f),
                        },
                    ));
                }
            }
            here.sort_by(|a, b| a.0.cmp(&b.0));
            out.extend(here.into_iter().map(|(_, a)| a));
        }
        out
    }

    /// Motion actions over one window in which the hand's contacts are fixed.
    fn window_actions(&self, side: Side, h: usize, from: usize, to: usize) -> Vec<AtomicAction> {
        let mut out = Vec::new();
        for x in self.carried(from, h) {
            let Some(d) = self.dsr(h, x, from, to) else { continue };
            match d {
                DsrLabel::Mt => {
                    let partners: Vec<usize> = self.adj[from][x]
                        .iter()
                        .copied()
                        .filter(|&y| y != h && !self.is_hand(y) && !self.adj[from][h].contains(&y))
                        .collect();
                    if partners.is_empty() {
                        let rel = self.ground().map_or(SsrLabel::NoRelation, |g| self.ssr(to, x, g));
                        out.push(AtomicAction {
                            subject: Subject::Me(side, self.ids[x].clone()),
                            primitive: Primitive::Mt,
                            object: None,
                            relation: rel,
                            place: Place::Air,
                            frame_span: (from, to),
                        });
                    }
                    for y in partners {
                        let prim = match self.dsr(x, y, from, to) {
                            Some(DsrLabel::Fmt) => Primitive::Fmt,
                            Some(DsrLabel::Mt) => Primitive::Mt,
                            _ => continue,
                        };
                        out.push(AtomicAction {
                            subject: Subject::Me(side, self.ids[x].clone()),
                            primitive: prim,
                            object: Some(self.entity(y)),
                            relation: self.ssr(to, x, y),
                            place: self.place(to, y),
                            frame_span: (from, to),
                        });
                    }
                }
                DsrLabel::Fmt => {
                    let hand_moves = self
                        .centroid_track(h, from, to)
                        .is_some_and(|t| t[t.len() - 1].distance(t[0]) / (to - from) as f64 > self.cfg.relation.delta_move);
                    if hand_moves {
                        out.push(AtomicAction {
                            subject: Subject::Hand(side),
                            primitive: Primitive::Fmt,
                            object: Some(self.entity(x)),
                            relation: self.ssr(to, h, x),
                            place: self.place(to, x),
                            frame_span: (from, to),
                        });
                    }
                }
                _ => {}
            }
        }
        out
    }

    pub fn hand_actions(&self, side: Side) -> Vec<AtomicAction> {
        let Some(h) = self.hand_index(side) else { return Vec::new() };
        let events = self.contact_events(side, h);
        let w = self.cfg.relation.window.max(2);
        let n = self.frame_count();
        let mut anchors: Vec<usize> = events.iter().map(|a| a.frame_span.0).collect();
        anchors.dedup();
        let mut motion = Vec::new();
        for (k, &e) in anchors.iter().enumerate() {
            let next = anchors.get(k + 1).copied().unwrap_or(n);
            if self.adj[e][h].is_empty() {
                continue;
            }
            let mut s = e;
            while s + w <= next {
                motion.extend(self.window_actions(side, h, s, s + w - 1));
                s += w;
            }
        }
        let mut all: Vec<(usize, u8, usize, AtomicAction)> = events
            .into_iter()
            .enumerate()
            .map(|(i, a)| (a.frame_span.0, 0, i, a))
            .chain(motion.into_iter().enumerate().map(|(i, a)| (a.frame_span.0, 1, i, a)))
            .collect();
        all.sort_by_key(|x| (x.0, x.1, x.2));
        all.into_iter().map(|x| x.3).collect()
    }

    pub fn extract(&self) -> HandActions {
        HandActions { left: self.hand_actions(Side::Left), right: self.hand_actions(Side::Right) }
    }
}

/// Debounces every edge: a change is accepted once the new state has held
/// for `k` consecutive frames and is dated back to the first of them.
fn debounce(raw: &[Vec<(usize, usize)>], n_ids: usize, k: usize) -> Vec<Vec<BTreeSet<usize>>> {
    let n = raw.len();
    let mut series: HashMap<(usize, usize), Vec<bool>> = HashMap::new();
    for (f, edges) in raw.iter().enumerate() {
        for &e in edges {
            series.entry(e).or_insert_with(|| vec![false; n])[f] = true;
        }
    }
    let mut adj = vec![vec![BTreeSet::new(); n_ids]; n];
    for ((a, b), s) in series {
        let mut state = s[0];
        let mut f = 0;
        while f < n {
            if s[f] == state {
                if state {
                    adj[f][a].insert(b);
                    adj[f][b].insert(a);
                }
                f += 1;
                continue;
            }
            let run = s[f..].iter().take_while(|&&v| v != state).count();
            if run >= k {
                state = !state;
            }
            if state {
                for row in &mut adj[f..f + run] {
                    row[a].insert(b);
                    row[b].insert(a);
                }
            }
            f += run;
        }
    }
    adj
}

pub fn extract_atomic_actions(trace: &SceneTrace, cfg: &Config) -> Result<HandActions, EventError> {
    Ok(TraceAnalysis::new(trace, cfg, Execution::default())?.extract())
}
