//! JSON-lines trace format: one frame per line.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{EventError, Frame, ObjectInstance, Role, SceneTrace};
use crate::geometry::{Aabb, Point3};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameRecord {
    t: f64,
    objects: Vec<ObjectRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectRecord {
    id: String,
    label: String,
    role: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<[f64; 3]>>,
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    bbox: Option<[[f64; 3]; 2]>,
}

/// Reads a trace. Blank lines are skipped.
pub fn load_trace<R: BufRead>(reader: R) -> Result<SceneTrace, EventError> {
    let mut frames: Vec<Frame> = Vec::new();
    let mut labels: HashMap<String, (String, Role)> = HashMap::new();
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| EventError::Parse { line: line_no, msg: e.to_string() })?;
        let rec: FrameRecord =
            serde_json::from_value(value).map_err(|e| EventError::Schema { line: line_no, msg: e.to_string() })?;
        let schema = |msg: String| EventError::Schema { line: line_no, msg };
        if !rec.t.is_finite() {
            return Err(schema("non-finite timestamp".into()));
        }
        if let Some(prev) = frames.last() {
            if rec.t <= prev.t {
                return Err(EventError::Monotonicity { line: line_no, t: rec.t });
            }
        }
        let mut objects = Vec::with_capacity(rec.objects.len());
        let mut seen_roles = [false; 3];
        let mut seen_ids = std::collections::HashSet::new();
        for o in rec.objects {
            let role = Role::parse(&o.role).ok_or_else(|| schema(format!("unknown role `{}`", o.role)))?;
            let slot = match role {
                Role::HandLeft => Some(0),
                Role::HandRight => Some(1),
                Role::Ground => Some(2),
                Role::Object => None,
            };
            if let Some(s) = slot {
                if seen_roles[s] {
                    return Err(schema(format!("duplicate role `{}`", o.role)));
                }
                seen_roles[s] = true;
            }
            if !seen_ids.insert(o.id.clone()) {
                return Err(schema(format!("duplicate id `{}`", o.id)));
            }
            match labels.get(&o.id) {
                Some((l, r)) if *l != o.label || *r != role => {
                    return Err(schema(format!("id `{}` re-bound from `{l}` to `{}`", o.id, o.label)));
                }
                None => {
                    labels.insert(o.id.clone(), (o.label.clone(), role));
                }
                _ => {}
            }
            let (points, bbox) = match (o.points, o.bbox) {
                (Some(p), None) => (p.into_iter().map(Point3::from_array).collect::<Vec<_>>(), None),
                (None, Some([lo, hi])) if role == Role::Ground => {
                    let b = Aabb::new(Point3::from_array(lo), Point3::from_array(hi));
                    if (0..3).any(|i| b.min(i) > b.max(i)) {
                        return Err(schema(format!("ground `{}` box has min > max", o.id)));
                    }
                    (b.corners().to_vec(), Some(b))
                }
                (None, Some(_)) => return Err(schema(format!("only ground may be a box (`{}`)", o.id))),
                (Some(_), Some(_)) => return Err(schema(format!("`{}` has both points and box", o.id))),
                (None, None) => return Err(schema(format!("`{}` has neither points nor box", o.id))),
            };
            if points.iter().any(|p| !p.is_finite()) {
                return Err(schema(format!("`{}` has a non-finite coordinate", o.id)));
            }
            if role != Role::Ground && points.len() < 4 {
                return Err(schema(format!("`{}` has {} points, need at least 4", o.id, points.len())));
            }
            objects.push(ObjectInstance { id: o.id, label: o.label, role, points, bbox });
        }
        frames.push(Frame { t: rec.t, objects });
    }
    let rate_hz = estimate_rate(&frames);
    Ok(SceneTrace { id: String::from("trace"), rate_hz, frames })
}

fn estimate_rate(frames: &[Frame]) -> f64 {
    if frames.len() < 2 {
        return 0.0;
    }
    let mut dt: Vec<f64> = frames.windows(2).map(|w| w[1].t - w[0].t).collect();
    dt.sort_by(f64::total_cmp);
    1.0 / dt[dt.len() / 2]
}

fn round(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

pub fn write_trace<W: Write>(trace: &SceneTrace, mut out: W) -> std::io::Result<()> {
    for f in &trace.frames {
        let rec = FrameRecord {
            t: f.t,
            objects: f
                .objects
                .iter()
                .map(|o| ObjectRecord {
                    id: o.id.clone(),
                    label: o.label.clone(),
                    role: o.role.as_str().to_string(),
                    points: o.bbox.is_none().then(|| o.points.iter().map(|p| p.to_array().map(round)).collect()),
                    bbox: o.bbox.map(|b| [b.min_corner.to_array(), b.max_corner.to_array()]),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &rec)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const OBJ: &str = r#"{"id":"c","label":"cup","role":"object","points":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]]}"#;

    #[test]
    fn two_frames() {
        let text = format!("{{\"t\":0,\"objects\":[{OBJ}]}}\n{{\"t\":0.1,\"objects\":[{OBJ}]}}\n");
        let t = load_trace(text.as_bytes()).unwrap();
        assert_eq!(t.frames.len(), 2);
        assert!((t.rate_hz - 10.0).abs() < 1e-9);
    }

    #[test]
    fn duplicate_hand() {
        let h = r#"{"id":"h","label":"hand","role":"hand_left","points":[[0,0,0],[1,0,0],[0,1,0],[0,0,1]]}"#;
        let h2 = h.replace("\"h\"", "\"h2\"");
        let text = format!("{{\"t\":0,\"objects\":[{h},{h2}]}}");
        assert!(matches!(load_trace(text.as_bytes()), Err(EventError::Schema { line: 1, .. })));
    }

    #[test]
    fn errors_by_kind() {
        assert!(matches!(load_trace("{\"t\":0,".as_bytes()), Err(EventError::Parse { line: 1, .. })));
        let bad_role = OBJ.replace("object", "robot");
        let text = format!("{{\"t\":0,\"objects\":[{bad_role}]}}");
        assert!(matches!(load_trace(text.as_bytes()), Err(EventError::Schema { .. })));
        assert!(matches!(load_trace("{\"objects\":[]}".as_bytes()), Err(EventError::Schema { .. })));
        let text = format!("{{\"t\":1,\"objects\":[{OBJ}]}}\n\n{{\"t\":1,\"objects\":[{OBJ}]}}");
        assert!(matches!(load_trace(text.as_bytes()), Err(EventError::Monotonicity { line: 3, .. })));
    }

    #[test]
    fn ground_box_round_trip() {
        let g = r#"{"id":"g","label":"table","role":"ground","box":[[-1,-0.1,-1],[1,0,1]]}"#;
        let text = format!("{{\"t\":0,\"objects\":[{g},{OBJ}]}}\n");
        let t = load_trace(text.as_bytes()).unwrap();
        assert_eq!(t.frames[0].objects[0].points.len(), 8);
        let mut buf = Vec::new();
        write_trace(&t, &mut buf).unwrap();
        assert_eq!(load_trace(buf.as_slice()).unwrap(), t);
    }
}
