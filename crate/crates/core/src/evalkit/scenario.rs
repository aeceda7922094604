//! Scripted synthetic scenes, one per library action, with their expected
//! atomic actions and analytic relations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::shapes::{jitter, Opening, Placed, Shape};
use super::EvalError;
use crate::config::Config;
use crate::events::{AtomicAction, Entity, Frame, HandActions, ObjectInstance, Place, Primitive, Role, SceneTrace, Side, Subject};
use crate::geometry::{Aabb, Point3};
use crate::grammar::{Bindings, Value};
use crate::relations::SsrLabel;

pub const SCENARIOS: [&str; 14] = [
    "Idle", "Approach", "Retreat", "Hold", "Lift", "Place", "Stir", "Pour", "Cut", "Screw", "Drink", "Wipe", "Hammer",
    "Saw",
];

/// Resting and grasping gap (m), well inside the touch tolerance.
const GAP: f64 = 0.001;
const HAND: f64 = 0.06;
const CRUISE: f64 = 0.40;
const CARRY: f64 = 0.30;
const RATE_HZ: f64 = 30.0;
/// Relation samples are taken on every tenth frame.
pub const TRUTH_STRIDE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub scenario: String,
    /// Tangential per-point jitter amplitude (m).
    pub noise: f64,
    /// Pads the trace with still frames up to this length.
    pub frames: Option<usize>,
    pub seed: u64,
    /// Approximate samples per ordinary object.
    pub points: usize,
}

impl ScenarioSpec {
    pub fn new(scenario: &str, seed: u64) -> ScenarioSpec {
        ScenarioSpec { scenario: scenario.to_string(), noise: 0.0, frames: None, seed, points: 60 }
    }

    pub fn with_noise(mut self, noise: f64) -> ScenarioSpec {
        self.noise = noise;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTruth {
    pub a: String,
    pub b: String,
    pub ssr: SsrLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTruth {
    pub frame: usize,
    pub pairs: Vec<PairTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub action: String,
    pub side: Side,
    pub bindings: Bindings,
    pub actions: HandActions,
    pub relations: Vec<FrameTruth>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub trace: SceneTrace,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, PartialEq)]
enum Motion {
    Carry(String),
    Slide { x: String, on: Entity, rel: SsrLabel, place: Place },
    HandSlide { x: String, place: Place },
}

struct Body {
    id: String,
    label: String,
    role: Role,
    shape: Shape,
}

struct Sim {
    bodies: Vec<Body>,
    pos: Vec<Point3>,
    frames: Vec<Vec<Point3>>,
    /// Bodies that may take a rigid jitter in each frame.
    loose: Vec<Vec<usize>>,
    mode: [Option<Motion>; 2],
    modes: [Vec<Option<Motion>>; 2],
    events: [Vec<(usize, AtomicAction)>; 2],
    hands: [usize; 2],
    speed: f64,
    wait: usize,
}

fn k(s: Side) -> usize {
    match s {
        Side::Left => 0,
        Side::Right => 1,
    }
}

fn p(x: f64, y: f64, z: f64) -> Point3 {
    Point3::new(x, y, z)
}

impl Sim {
    fn new(rng: &mut ChaCha8Rng) -> Sim {
        let mut s = Sim {
            bodies: Vec::new(),
            pos: Vec::new(),
            frames: Vec::new(),
            loose: Vec::new(),
            mode: [None, None],
            modes: [Vec::new(), Vec::new()],
            events: [Vec::new(), Vec::new()],
            hands: [0, 0],
            speed: rng.gen_range(0.012..0.016),
            wait: rng.gen_range(3..=4),
        };
        s.add("table", "table", Role::Ground, Shape::solid([2.0, 0.05, 1.2]), p(-1.0, -0.05, -0.6));
        s.hands[0] = s.add("hand_left", "hand", Role::HandLeft, Shape::solid([HAND; 3]), p(-0.9, 0.5, 0.45));
        s.hands[1] = s.add("hand_right", "hand", Role::HandRight, Shape::solid([HAND; 3]), p(0.84, 0.5, 0.45));
        s
    }

    fn add(&mut self, id: &str, label: &str, role: Role, shape: Shape, at: Point3) -> usize {
        self.bodies.push(Body { id: id.into(), label: label.into(), role, shape });
        self.pos.push(at);
        for f in &mut self.frames {
            f.push(at);
        }
        self.bodies.len() - 1
    }

    /// Adds an object resting on the table with its footprint centred at (x, z).
    fn put(&mut self, id: &str, label: &str, shape: Shape, x: f64, z: f64, on: f64) -> usize {
        let at = p(x - shape.size.x / 2.0, on + GAP, z - shape.size.z / 2.0);
        self.add(id, label, Role::Object, shape, at)
    }

    /// A sugar cube resting in a corner of the bowl's inner floor.
    fn sugar(&mut self, bowl: usize) -> usize {
        let at = self.pos[bowl] + p(0.015, 0.012 + GAP, 0.015);
        self.add("sugar", "sugar_cube", Role::Object, Shape::solid([0.025; 3]), at)
    }

    fn push(&mut self, loose: Vec<usize>) {
        self.frames.push(self.pos.clone());
        self.loose.push(loose);
        for s in 0..2 {
            let m = self.mode[s].clone();
            self.modes[s].push(m);
        }
    }

    fn last(&self) -> usize {
        self.frames.len() - 1
    }

    fn next(&self) -> usize {
        self.frames.len()
    }

    fn hold(&mut self, n: usize) {
        for _ in 0..n {
            self.push(Vec::new());
        }
    }

    fn go(&mut self, group: &[usize], d: Point3, speed: f64, loose: bool) {
        let n = ((d.norm() / speed).ceil() as usize).max(1);
        let start: Vec<Point3> = group.iter().map(|&i| self.pos[i]).collect();
        for step in 1..=n {
            for (g, &i) in group.iter().enumerate() {
                self.pos[i] = start[g] + d * (step as f64 / n as f64);
            }
            self.push(if loose { group.to_vec() } else { Vec::new() });
        }
    }

    fn size(&self, i: usize) -> Point3 {
        self.bodies[i].shape.size
    }

    fn top(&self, i: usize) -> f64 {
        self.pos[i].y + self.size(i).y
    }

    fn centre(&self, i: usize) -> Point3 {
        self.pos[i] + self.size(i) * 0.5
    }

    fn id(&self, i: usize) -> String {
        self.bodies[i].id.clone()
    }

    fn entity(&self, i: Option<usize>) -> Entity {
        match i {
            None => Entity::Ground,
            Some(i) => Entity::Object(self.id(i)),
        }
    }

    fn place(&self, i: Option<usize>) -> Place {
        match i {
            None => Place::Ground,
            Some(i) => Place::Object(self.id(i)),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn event(&mut self, side: Side, frame: usize, subject: Subject, primitive: Primitive, object: Entity, relation: SsrLabel, place: Place) {
        let aa = AtomicAction { subject, primitive, object: Some(object), relation, place, frame_span: (frame, frame) };
        self.events[k(side)].push((frame, aa));
    }

    fn me(&self, side: Side, x: usize) -> Subject {
        Subject::Me(side, self.id(x))
    }

    /// Moves a group horizontally at cruise height so that body `lead` is
    /// centred over (x, z).
    fn cruise(&mut self, group: &[usize], lead: usize, x: f64, z: f64, height: f64) {
        let dy = height - self.pos[lead].y;
        if dy > 0.0 {
            self.go(group, p(0.0, dy, 0.0), self.speed, false);
        }
        let c = self.centre(lead);
        self.go(group, p(x - c.x, 0.0, z - c.z), self.speed, true);
    }

    /// Empty hand lands on top of `x`; returns the contact frame.
    fn land_on(&mut self, side: Side, x: usize, place: Option<usize>) -> usize {
        let h = self.hands[k(side)];
        let c = self.centre(x);
        self.cruise(&[h], h, c.x, c.z, CRUISE);
        let dy = self.top(x) + GAP - self.pos[h].y;
        self.go(&[h], p(0.0, dy, 0.0), self.speed, false);
        let f = self.last();
        self.event(side, f, Subject::Hand(side), Primitive::T, self.entity(Some(x)), SsrLabel::To, self.place(place));
        f
    }

    /// Empty hand reaches the side of `x` from -x; returns the contact frame.
    fn grasp_side(&mut self, side: Side, x: usize, place: Option<usize>, dir: f64) -> usize {
        let h = self.hands[k(side)];
        let c = self.centre(x);
        let half = self.size(x).x / 2.0 + HAND / 2.0;
        let stand_x = c.x - dir * (half + 0.1);
        self.cruise(&[h], h, stand_x, c.z, CRUISE);
        let dy = self.pos[x].y + 0.03 - self.pos[h].y;
        self.go(&[h], p(0.0, dy, 0.0), self.speed, false);
        let hx = self.centre(h).x;
        let target = c.x - dir * (half + GAP);
        self.go(&[h], p(target - hx, 0.0, 0.0), self.speed, false);
        let f = self.last();
        self.event(side, f, Subject::Hand(side), Primitive::T, self.entity(Some(x)), SsrLabel::ArT, self.place(place));
        f
    }

    /// Lifts `x` off its support; the first raised frame is the untouch.
    fn lift(&mut self, side: Side, x: usize, from: Option<usize>, from_place: Option<usize>) {
        let h = self.hands[k(side)];
        self.mode[k(side)] = Some(Motion::Carry(self.id(x)));
        let f = self.next();
        self.event(side, f, self.me(side, x), Primitive::U, self.entity(from), SsrLabel::Ab, self.place(from_place));
        let dy = CARRY - self.pos[x].y;
        self.go(&[h, x], p(0.0, dy, 0.0), self.speed, false);
    }

    /// Lowers the carried `x` until its bottom rests just above `floor`.
    fn lower(&mut self, side: Side, x: usize, floor: f64, on: Entity, rel: SsrLabel, place: Place) -> usize {
        let h = self.hands[k(side)];
        let dy = floor + GAP - self.pos[x].y;
        self.go(&[h, x], p(0.0, dy, 0.0), self.speed, false);
        self.mode[k(side)] = None;
        let f = self.last();
        self.event(side, f, self.me(side, x), Primitive::T, on, rel, place);
        f
    }

    /// Fixed-size steps of a group.
    fn steps(&mut self, group: &[usize], d: Point3, n: usize) {
        for _ in 0..n {
            for &i in group {
                self.pos[i] = self.pos[i] + d;
            }
            self.push(Vec::new());
        }
    }

    /// Raises the carried `x` by `step` per frame until its bottom clears
    /// `above` by more than `tol`; returns that frame.
    fn rise_clear(&mut self, side: Side, x: usize, above: f64, step: f64, tol: f64) -> usize {
        let h = self.hands[k(side)];
        loop {
            self.steps(&[h, x], p(0.0, step, 0.0), 1);
            if self.pos[x].y - above > tol {
                return self.last();
            }
        }
    }

    /// The hand leaves `x` upwards.
    fn release_up(&mut self, side: Side, x: usize, place: Option<usize>) {
        let h = self.hands[k(side)];
        self.mode[k(side)] = None;
        self.hold(self.wait);
        let f = self.next();
        self.event(side, f, Subject::Hand(side), Primitive::U, self.entity(Some(x)), SsrLabel::Ab, self.place(place));
        let dy = CRUISE - self.pos[h].y;
        self.go(&[h], p(0.0, dy, 0.0), self.speed, false);
    }

    /// The hand leaves `x` sideways.
    fn release_side(&mut self, side: Side, x: usize, place: Option<usize>, dir: f64) {
        let h = self.hands[k(side)];
        self.mode[k(side)] = None;
        self.hold(self.wait);
        let f = self.next();
        self.event(side, f, Subject::Hand(side), Primitive::U, self.entity(Some(x)), SsrLabel::Ar, self.place(place));
        self.go(&[h], p(-dir * 0.1, 0.0, 0.0), self.speed, false);
        let dy = CRUISE - self.pos[h].y;
        self.go(&[h], p(0.0, dy, 0.0), self.speed, false);
    }

    /// Picks `x` from the table, lifting it to carry height.
    fn pick(&mut self, side: Side, x: usize) {
        self.land_on(side, x, None);
        self.hold(self.wait);
        self.lift(side, x, None, None);
    }

    /// Carries `x` back to (cx, cz), sets it on the table and lets go.
    fn put_back(&mut self, side: Side, x: usize, cx: f64, cz: f64) {
        let h = self.hands[k(side)];
        self.mode[k(side)] = Some(Motion::Carry(self.id(x)));
        self.cruise(&[h, x], x, cx, cz, CARRY);
        self.lower(side, x, 0.0, Entity::Ground, SsrLabel::To, Place::Ground);
        self.release_up(side, x, None);
    }

    /// Oscillating strokes along x, one window per stroke.
    fn strokes(&mut self, group: &[usize], n: usize, len: f64, window: usize) {
        for s in 0..n {
            let dir = if s % 2 == 0 { 1.0 } else { -1.0 };
            let step = p(dir * len / window as f64, 0.0, 0.0);
            for _ in 0..window {
                for &i in group {
                    self.pos[i] = self.pos[i] + step;
                }
                self.push(Vec::new());
            }
        }
    }

    fn park(&mut self, side: Side) {
        let h = self.hands[k(side)];
        let home = if side == Side::Left { p(-0.9, 0.5, 0.45) } else { p(0.84, 0.5, 0.45) };
        let d = home - self.pos[h];
        if d.norm() > 1e-12 {
            self.go(&[h], p(0.0, (0.5 - self.pos[h].y).max(0.0), 0.0), self.speed, false);
            let d = home - self.pos[h];
            self.go(&[h], d, self.speed, false);
        }
    }

    fn motion_action(side: Side, m: &Motion, from: usize, to: usize) -> AtomicAction {
        let (subject, primitive, object, relation, place) = match m {
            Motion::Carry(x) => (Subject::Me(side, x.clone()), Primitive::Mt, None, SsrLabel::Ab, Place::Air),
            Motion::Slide { x, on, rel, place } => {
                (Subject::Me(side, x.clone()), Primitive::Fmt, Some(on.clone()), *rel, place.clone())
            }
            Motion::HandSlide { x, place } => {
                (Subject::Hand(side), Primitive::Fmt, Some(Entity::Object(x.clone())), SsrLabel::To, place.clone())
            }
        };
        AtomicAction { subject, primitive, object, relation, place, frame_span: (from, to) }
    }

    /// Expected atomic actions of one hand: its contact events plus one
    /// motion action per full window after each event.
    fn expected(&self, side: Side, window: usize) -> Vec<AtomicAction> {
        let mut events = self.events[k(side)].clone();
        events.sort_by(|a, b| {
            let key = |e: &AtomicAction| match &e.object {
                Some(Entity::Object(id)) => id.clone(),
                _ => "table".to_string(),
            };
            a.0.cmp(&b.0).then_with(|| key(&a.1).cmp(&key(&b.1)))
        });
        let mut anchors: Vec<usize> = events.iter().map(|e| e.0).collect();
        anchors.dedup();
        let n = self.frames.len();
        let mut out: Vec<(usize, u8, AtomicAction)> = events.into_iter().map(|(f, a)| (f, 0, a)).collect();
        for (i, &e) in anchors.iter().enumerate() {
            let next = anchors.get(i + 1).copied().unwrap_or(n);
            let mut s = e;
            while s + window <= next {
                if let Some(m) = &self.modes[k(side)][s + window - 1] {
                    out.push((s, 1, Self::motion_action(side, m, s, s + window - 1)));
                }
                s += window;
            }
        }
        out.sort_by_key(|x| (x.0, x.1));
        out.into_iter().map(|x| x.2).collect()
    }
}

fn ground_binding(b: &mut Bindings, var: &str) {
    b.insert(var.to_string(), Value::Ground);
}

fn obj_binding(b: &mut Bindings, var: &str, id: &str) {
    b.insert(var.to_string(), Value::Object(id.to_string()));
}

fn jig(rng: &mut ChaCha8Rng, r: f64) -> f64 {
    rng.gen_range(-r..=r)
}

/// Runs the script for one scenario; returns the bindings of the acting hand.
fn script(name: &str, s: &mut Sim, rng: &mut ChaCha8Rng, cfg: &Config) -> Result<Bindings, EvalError> {
    let l = Side::Left;
    let w = cfg.relation.window.max(2);
    let tol = cfg.eps_touch;
    let mut b = Bindings::new();
    let (ox, oz) = (jig(rng, 0.03), jig(rng, 0.03));
    let h = s.hands[0];
    s.hold(2);
    match name {
        "Idle" => {
            s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), 0.2 + ox, 0.1 + oz, 0.0);
            s.cruise(&[h], h, -0.3 + ox, -0.1 + oz, CRUISE);
            let dy = GAP - s.pos[h].y;
            s.go(&[h], p(0.0, dy, 0.0), s.speed, false);
            let f = s.last();
            s.event(l, f, Subject::Hand(l), Primitive::T, Entity::Ground, SsrLabel::To, Place::Ground);
            s.hold(s.wait);
            let f = s.next();
            s.event(l, f, Subject::Hand(l), Primitive::U, Entity::Ground, SsrLabel::Ab, Place::Ground);
            s.go(&[h], p(0.0, CRUISE, 0.0), s.speed, false);
        }
        "Approach" => {
            let x = s.put("box", "box", Shape::solid([0.12, 0.08, 0.12]), ox, oz, 0.0);
            s.land_on(l, x, None);
            s.release_up(l, x, None);
            obj_binding(&mut b, "obj", "box");
        }
        "Retreat" => {
            let x = s.put("box", "box", Shape::solid([0.3, 0.06, 0.12]), ox, oz, 0.0);
            let (x0, cz) = (s.pos[x].x, s.centre(x).z);
            s.cruise(&[h], h, x0 + 0.05, cz, CRUISE);
            let dy = s.top(x) + GAP - s.pos[h].y;
            s.go(&[h], p(0.0, dy, 0.0), s.speed, false);
            let f = s.last();
            s.event(l, f, Subject::Hand(l), Primitive::T, Entity::Object("box".into()), SsrLabel::To, Place::Ground);
            s.mode[0] = Some(Motion::HandSlide { x: "box".into(), place: Place::Ground });
            let n = 2 * w + rng.gen_range(0..w);
            s.steps(&[h], p(0.16 / n as f64, 0.0, 0.0), n);
            s.mode[0] = None;
            let f = s.next();
            s.event(l, f, Subject::Hand(l), Primitive::U, Entity::Object("box".into()), SsrLabel::Ab, Place::Ground);
            s.go(&[h], p(0.0, 0.2, 0.0), s.speed, false);
            obj_binding(&mut b, "obj", "box");
        }
        "Hold" => {
            let x = s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), ox, oz, 0.0);
            s.grasp_side(l, x, None, 1.0);
            s.hold(2);
            s.release_side(l, x, None, 1.0);
            obj_binding(&mut b, "obj", "cup");
        }
        "Lift" => {
            let x = s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), ox, oz, 0.0);
            s.pick(l, x);
            s.put_back(l, x, 0.25 + ox, oz + 0.1);
            obj_binding(&mut b, "obj", "cup");
        }
        "Place" => {
            let x = s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), ox - 0.1, oz, 0.0);
            let t = s.put("plate", "plate", Shape::solid([0.2, 0.02, 0.2]), 0.25, 0.05, 0.0);
            s.pick(l, x);
            let c = s.centre(t);
            s.cruise(&[h, x], x, c.x, c.z, CARRY);
            let top = s.top(t);
            s.lower(l, x, top, s.entity(Some(t)), SsrLabel::To, Place::Ground);
            s.release_up(l, x, Some(t));
            obj_binding(&mut b, "obj", "cup");
            obj_binding(&mut b, "target", "plate");
        }
        "Stir" => {
            let sp = s.put("spoon", "spoon", Shape::solid([0.02, 0.2, 0.02]), -0.3 + ox, oz, 0.0);
            let bowl = s.put("bowl", "bowl", Shape::open_top([0.16, 0.08, 0.16], 0.012, 0.01), 0.2, oz, 0.0);
            s.sugar(bowl);
            let home = s.centre(sp);
            s.pick(l, sp);
            let c = s.centre(bowl);
            s.cruise(&[h, sp], sp, c.x - 0.02, c.z, CARRY);
            let floor = s.pos[bowl].y + 0.012;
            let on = s.entity(Some(bowl));
            s.lower(l, sp, floor, on.clone(), SsrLabel::Pwi, Place::Ground);
            s.mode[0] = Some(Motion::Slide { x: "spoon".into(), on: on.clone(), rel: SsrLabel::Pwi, place: Place::Ground });
            s.strokes(&[h, sp], 3, 0.04, w);
            s.mode[0] = Some(Motion::Carry("spoon".into()));
            let f = s.next();
            s.event(l, f, s.me(l, sp), Primitive::U, on, SsrLabel::Pwi, Place::Ground);
            let dy = CARRY - s.pos[sp].y;
            s.go(&[h, sp], p(0.0, dy, 0.0), s.speed, false);
            s.put_back(l, sp, home.x, home.z);
            obj_binding(&mut b, "tool", "spoon");
            obj_binding(&mut b, "bowl", "bowl");
        }
        "Pour" => {
            let cup = s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), -0.3 + ox, oz, 0.0);
            let bowl = s.put("bowl", "bowl", Shape::open_top([0.16, 0.08, 0.16], 0.012, 0.01), 0.2, oz, 0.0);
            s.sugar(bowl);
            let home = s.centre(cup);
            s.pick(l, cup);
            let c = s.centre(bowl);
            s.cruise(&[h, cup], cup, c.x, c.z, CARRY);
            let top = s.top(bowl);
            let on = s.entity(Some(bowl));
            s.lower(l, cup, top, on.clone(), SsrLabel::To, Place::Ground);
            s.hold(s.wait);
            s.mode[0] = Some(Motion::Carry("cup".into()));
            let f = s.next();
            s.event(l, f, s.me(l, cup), Primitive::U, on, SsrLabel::Ab, Place::Ground);
            let dy = CARRY - s.pos[cup].y;
            s.go(&[h, cup], p(0.0, dy, 0.0), s.speed, false);
            s.put_back(l, cup, home.x, home.z);
            obj_binding(&mut b, "obj", "cup");
            obj_binding(&mut b, "target", "bowl");
        }
        "Cut" => {
            let board = s.put("board", "cutting_board", Shape::solid([0.3, 0.02, 0.2]), 0.2, oz, 0.0);
            let a = 0.08;
            let (kx, kz) = (0.01, 0.05);
            let slit = Opening {
                x: (a / 2.0 - kx / 2.0 - 0.002, a / 2.0 + kx / 2.0 + 0.002),
                z: (a / 2.0 - kz / 2.0 - 0.002, a / 2.0 + kz / 2.0 + 0.002),
            };
            let bt = s.top(board);
            let apple = s.put("apple", "apple", Shape::with_slit([a; 3], slit), 0.2 + ox / 2.0, oz, bt);
            let knife = s.put("knife", "knife", Shape::solid([kx, 0.16, kz]), -0.3 + ox, -oz, 0.0);
            let home = s.centre(knife);
            s.pick(l, knife);
            let c = s.centre(apple);
            s.cruise(&[h, knife], knife, c.x, c.z, CARRY);
            let (on_apple, on_board) = (s.entity(Some(apple)), s.entity(Some(board)));
            let top = s.top(apple);
            s.lower(l, knife, top, on_apple.clone(), SsrLabel::To, s.place(Some(board)));
            s.mode[0] = Some(Motion::Slide {
                x: "knife".into(),
                on: on_apple.clone(),
                rel: SsrLabel::Pwi,
                place: s.place(Some(board)),
            });
            let depth = s.pos[knife].y - (bt + 0.011);
            let n = (depth / 0.003).floor() as usize;
            s.steps(&[h, knife], p(0.0, -depth / n as f64, 0.0), n);
            s.mode[0] = None;
            s.steps(&[h, knife], p(0.0, -0.010, 0.0), 1);
            let f = s.last();
            s.event(l, f, s.me(l, knife), Primitive::T, on_board.clone(), SsrLabel::To, Place::Ground);
            s.hold(s.wait);
            s.mode[0] = Some(Motion::Carry("knife".into()));
            let f = s.next();
            s.event(l, f, s.me(l, knife), Primitive::U, on_board, SsrLabel::Ab, Place::Ground);
            let f = s.rise_clear(l, knife, top, 0.015, tol);
            s.event(l, f, s.me(l, knife), Primitive::U, on_apple, SsrLabel::Ab, s.place(Some(board)));
            let dy = CARRY - s.pos[knife].y;
            s.go(&[h, knife], p(0.0, dy, 0.0), s.speed, false);
            s.put_back(l, knife, home.x, home.z);
            obj_binding(&mut b, "tool", "knife");
            obj_binding(&mut b, "obj", "apple");
            obj_binding(&mut b, "board", "board");
        }
        "Screw" => {
            let hole = Opening { x: (0.063, 0.087), z: (0.038, 0.062) };
            let disk = s.put("hard_disk", "hard_disk", Shape::with_hole([0.15, 0.05, 0.1], hole, 0.045), 0.2, oz, 0.0);
            let sd = s.put("screwdriver", "screwdriver", Shape::solid([0.02, 0.2, 0.02]), -0.3 + ox, -oz, 0.0);
            let r = Side::Right;
            s.grasp_side(r, disk, None, -1.0);
            s.hold(2);
            s.release_side(r, disk, None, -1.0);
            s.park(r);
            let home = s.centre(sd);
            s.pick(l, sd);
            let (hx, hz) = (s.pos[disk].x + 0.075, s.pos[disk].z + 0.05);
            s.cruise(&[h, sd], sd, hx, hz, CARRY);
            let top = s.top(disk);
            let dy = top + 0.006 - s.pos[sd].y;
            s.go(&[h, sd], p(0.0, dy, 0.0), s.speed, false);
            let on = s.entity(Some(disk));
            s.steps(&[h, sd], p(0.0, -0.010, 0.0), 1);
            let f = s.last();
            s.event(l, f, s.me(l, sd), Primitive::T, on.clone(), SsrLabel::Pwi, Place::Ground);
            s.mode[0] = Some(Motion::Slide { x: "screwdriver".into(), on: on.clone(), rel: SsrLabel::Pwi, place: Place::Ground });
            s.steps(&[h, sd], p(0.0, -0.003, 0.0), w);
            s.mode[0] = Some(Motion::Carry("screwdriver".into()));
            let f = s.rise_clear(l, sd, top, 0.012, tol);
            s.event(l, f, s.me(l, sd), Primitive::U, on, SsrLabel::Ab, Place::Ground);
            let dy = CARRY - s.pos[sd].y;
            s.go(&[h, sd], p(0.0, dy, 0.0), s.speed, false);
            s.put_back(l, sd, home.x, home.z);
            obj_binding(&mut b, "tool", "screwdriver");
            obj_binding(&mut b, "obj", "hard_disk");
        }
        "Drink" => {
            let x = s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), ox, oz, 0.0);
            s.grasp_side(l, x, None, 1.0);
            s.hold(s.wait);
            s.lift(l, x, None, None);
            let c = s.centre(x);
            s.cruise(&[h, x], x, c.x + 0.15, c.z - 0.1, CARRY);
            s.lower(l, x, 0.0, Entity::Ground, SsrLabel::To, Place::Ground);
            s.release_side(l, x, None, 1.0);
            obj_binding(&mut b, "obj", "cup");
        }
        "Wipe" => {
            let sp = s.put("sponge", "sponge", Shape::solid([0.1, 0.04, 0.07]), -0.4 + ox, oz, 0.0);
            let cup = s.put("cup", "cup", Shape::solid([0.08, 0.12, 0.08]), 0.45 + ox, 0.25, 0.0);
            s.land_on(l, sp, None);
            s.hold(s.wait);
            s.mode[0] = Some(Motion::Slide { x: "sponge".into(), on: Entity::Ground, rel: SsrLabel::To, place: Place::Ground });
            let n = 3 * w + rng.gen_range(0..w);
            s.steps(&[h, sp], p(0.4 / n as f64, 0.0, 0.0), n);
            s.mode[0] = None;
            let f = s.next();
            s.event(l, f, Subject::Hand(l), Primitive::U, s.entity(Some(sp)), SsrLabel::Ab, Place::Ground);
            s.go(&[h], p(0.0, 0.3, 0.0), s.speed, false);
            s.park(l);
            let r = Side::Right;
            s.pick(r, cup);
            s.put_back(r, cup, 0.6, -0.1 + oz);
            s.park(r);
            obj_binding(&mut b, "tool", "sponge");
        }
        "Hammer" => {
            let hm = s.put("hammer", "hammer", Shape::solid([0.03, 0.18, 0.03]), -0.3 + ox, oz, 0.0);
            let blk = s.put("block", "block", Shape::solid([0.1, 0.06, 0.1]), 0.2, -oz, 0.0);
            let home = s.centre(hm);
            s.pick(l, hm);
            let c = s.centre(blk);
            s.cruise(&[h, hm], hm, c.x, c.z, CARRY);
            let top = s.top(blk);
            let on = s.entity(Some(blk));
            s.lower(l, hm, top, on.clone(), SsrLabel::To, Place::Ground);
            for strike in 0..2 {
                s.hold(s.wait);
                s.mode[0] = Some(Motion::Carry("hammer".into()));
                let f = s.next();
                s.event(l, f, s.me(l, hm), Primitive::U, on.clone(), SsrLabel::Ab, Place::Ground);
                if strike == 1 {
                    break;
                }
                s.steps(&[h, hm], p(0.0, 0.012, 0.0), w);
                s.steps(&[h, hm], p(0.0, -0.012, 0.0), w);
                s.mode[0] = None;
                let f = s.last();
                s.event(l, f, s.me(l, hm), Primitive::T, on.clone(), SsrLabel::To, Place::Ground);
            }
            let dy = CARRY - s.pos[hm].y;
            s.go(&[h, hm], p(0.0, dy, 0.0), s.speed, false);
            s.put_back(l, hm, home.x, home.z);
            obj_binding(&mut b, "tool", "hammer");
            obj_binding(&mut b, "obj", "block");
        }
        "Saw" => {
            let saw = s.put("saw", "saw", Shape::solid([0.25, 0.03, 0.03]), -0.35 + ox, oz, 0.0);
            let blk = s.put("block", "wood_block", Shape::solid([0.12, 0.08, 0.12]), 0.25, -oz, 0.0);
            let home = s.centre(saw);
            s.pick(l, saw);
            let c = s.centre(blk);
            s.cruise(&[h, saw], saw, c.x - 0.02, c.z, CARRY);
            let top = s.top(blk);
            let on = s.entity(Some(blk));
            s.lower(l, saw, top, on.clone(), SsrLabel::To, Place::Ground);
            s.mode[0] = Some(Motion::Slide { x: "saw".into(), on: on.clone(), rel: SsrLabel::To, place: Place::Ground });
            s.strokes(&[h, saw], 3, 0.04, w);
            s.mode[0] = Some(Motion::Carry("saw".into()));
            let f = s.next();
            s.event(l, f, s.me(l, saw), Primitive::U, on, SsrLabel::Ab, Place::Ground);
            let dy = CARRY - s.pos[saw].y;
            s.go(&[h, saw], p(0.0, dy, 0.0), s.speed, false);
            s.put_back(l, saw, home.x, home.z);
            obj_binding(&mut b, "tool", "saw");
            obj_binding(&mut b, "obj", "block");
        }
        _ => return Err(EvalError::UnknownScenario(name.to_string())),
    }
    if name != "Idle" {
        ground_binding(&mut b, "place");
    }
    Ok(b)
}

/// Builds the trace and ground truth for one scenario.
pub fn generate_synthetic_trace(spec: &ScenarioSpec, cfg: &Config) -> Result<Synthetic, EvalError> {
    let name = SCENARIOS
        .iter()
        .find(|n| n.eq_ignore_ascii_case(&spec.scenario))
        .ok_or_else(|| EvalError::UnknownScenario(spec.scenario.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let window = cfg.relation.window.max(2);
    let mut sim = Sim::new(&mut rng);
    let bindings = script(name, &mut sim, &mut rng, cfg)?;
    sim.hold(3);
    if let Some(n) = spec.frames {
        while sim.frames.len() < n {
            sim.hold(1);
        }
    }
    let actions = HandActions { left: sim.expected(Side::Left, window), right: sim.expected(Side::Right, window) };
    let trace = build_trace(&sim, spec, &mut rng);
    let relations = truth_relations(&sim, cfg);
    Ok(Synthetic {
        trace,
        truth: GroundTruth { action: name.to_string(), side: Side::Left, bindings, actions, relations },
    })
}

fn build_trace(sim: &Sim, spec: &ScenarioSpec, rng: &mut ChaCha8Rng) -> SceneTrace {
    let samples: Vec<_> = sim.bodies.iter().map(|b| b.shape.samples(spec.points)).collect();
    let rigid = spec.noise * 0.1;
    let frames = sim
        .frames
        .iter()
        .enumerate()
        .map(|(f, pos)| {
            let shift = if rigid > 0.0 && !sim.loose[f].is_empty() {
                p(jig(rng, rigid), jig(rng, rigid), jig(rng, rigid))
            } else {
                Point3::ZERO
            };
            let objects = sim
                .bodies
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if b.role == Role::Ground {
                        let bbox = Aabb::new(pos[i], pos[i] + b.shape.size);
                        return ObjectInstance {
                            id: b.id.clone(),
                            label: b.label.clone(),
                            role: b.role,
                            points: bbox.corners().to_vec(),
                            bbox: Some(bbox),
                        };
                    }
                    let off = if sim.loose[f].contains(&i) { pos[i] + shift } else { pos[i] };
                    let points = jitter(&samples[i], spec.noise, rng).into_iter().map(|q| q + off).collect();
                    ObjectInstance { id: b.id.clone(), label: b.label.clone(), role: b.role, points, bbox: None }
                })
                .collect();
            Frame { t: f as f64 / RATE_HZ, objects }
        })
        .collect();
    SceneTrace { id: format!("{}-{}", spec.scenario.to_lowercase(), spec.seed), rate_hz: RATE_HZ, frames }
}

fn truth_relations(sim: &Sim, cfg: &Config) -> Vec<FrameTruth> {
    let n = sim.bodies.len();
    (0..sim.frames.len())
        .step_by(TRUTH_STRIDE)
        .map(|f| {
            let placed: Vec<Placed> =
                (0..n).map(|i| Placed { shape: &sim.bodies[i].shape, at: sim.frames[f][i] }).collect();
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push(PairTruth {
                        a: sim.bodies[i].id.clone(),
                        b: sim.bodies[j].id.clone(),
                        ssr: super::shapes::truth_ssr(placed[i], placed[j], cfg),
                    });
                }
            }
            FrameTruth { frame: f, pairs }
        })
        .collect()
}
