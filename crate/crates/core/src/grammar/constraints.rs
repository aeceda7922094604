use crate::events::{AtomicAction, Entity, Place, Primitive, Subject};
use crate::relations::SsrLabel;

const DEFAULT_TABLE: &str = include_str!("../../data/constraints.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubjectKind {
    Hand,
    Me,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Object,
    Ground,
    Nothing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Object,
    Ground,
    Air,
}

/// Abstract shape of an atomic action, with objects collapsed to kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActionShape {
    pub subject: SubjectKind,
    pub primitive: Primitive,
    pub object: ObjectKind,
    pub relation: SsrLabel,
    pub place: PlaceKind,
}

impl ActionShape {
    pub fn of(a: &AtomicAction) -> ActionShape {
        ActionShape {
            subject: match a.subject {
                Subject::Hand(_) => SubjectKind::Hand,
                Subject::Me(..) => SubjectKind::Me,
            },
            primitive: a.primitive,
            object: match a.object {
                Some(Entity::Object(_)) => ObjectKind::Object,
                Some(Entity::Ground) => ObjectKind::Ground,
                None => ObjectKind::Nothing,
            },
            relation: a.relation,
            place: match a.place {
                Place::Object(_) => PlaceKind::Object,
                Place::Ground => PlaceKind::Ground,
                Place::Air => PlaceKind::Air,
            },
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    primitive: Primitive,
    subjects: Vec<SubjectKind>,
    objects: Vec<ObjectKind>,
    relations: Vec<SsrLabel>,
    places: Vec<PlaceKind>,
}

/// Which atomic-action shapes are valid.
#[derive(Debug, Clone)]
pub struct ConstraintTable {
    rows: Vec<Row>,
}

impl ConstraintTable {
    pub fn default_table() -> ConstraintTable {
        ConstraintTable::parse(DEFAULT_TABLE).expect("shipped constraint table is valid")
    }

    pub fn parse(text: &str) -> Result<ConstraintTable, String> {
        let mut rows = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [prim, subj, obj, rel, place] = cols[..] else {
                return Err(format!("line {}: expected 5 tab-separated columns", k + 1));
            };
            let list = |s: &str| s.split(',').map(str::trim).map(str::to_string).collect::<Vec<_>>();
            let bad = |what: &str, v: &str| format!("line {}: unknown {what} `{v}`", k + 1);
            rows.push(Row {
                primitive: Primitive::parse(prim).ok_or_else(|| bad("primitive", prim))?,
                subjects: list(subj)
                    .iter()
                    .map(|s| match s.as_str() {
                        "H" => Ok(SubjectKind::Hand),
                        "Me" => Ok(SubjectKind::Me),
                        v => Err(bad("subject", v)),
                    })
                    .collect::<Result<_, _>>()?,
                objects: list(obj)
                    .iter()
                    .map(|s| match s.as_str() {
                        "O" => Ok(ObjectKind::Object),
                        "G" => Ok(ObjectKind::Ground),
                        "-" => Ok(ObjectKind::Nothing),
                        v => Err(bad("object", v)),
                    })
                    .collect::<Result<_, _>>()?,
                relations: list(rel).iter().map(|s| s.parse().map_err(|_| bad("relation", s))).collect::<Result<_, _>>()?,
                places: list(place)
                    .iter()
                    .map(|s| match s.as_str() {
                        "O" => Ok(PlaceKind::Object),
                        "G" => Ok(PlaceKind::Ground),
                        "Air" => Ok(PlaceKind::Air),
                        v => Err(bad("place", v)),
                    })
                    .collect::<Result<_, _>>()?,
            });
        }
        Ok(ConstraintTable { rows })
    }

    pub fn allows_shape(&self, s: &ActionShape) -> bool {
        self.rows.iter().any(|r| {
            r.primitive == s.primitive
                && r.subjects.contains(&s.subject)
                && r.objects.contains(&s.object)
                && r.relations.contains(&s.relation)
                && r.places.contains(&s.place)
        })
    }

    pub fn allows(&self, a: &AtomicAction) -> bool {
        self.allows_shape(&ActionShape::of(a))
    }

    /// Number of distinct valid shapes.
    pub fn count(&self) -> usize {
        let mut all = std::collections::HashSet::new();
        for r in &self.rows {
            for &subject in &r.subjects {
                for &object in &r.objects {
                    for &relation in &r.relations {
                        for &place in &r.places {
                            all.insert(ActionShape { subject, primitive: r.primitive, object, relation, place });
                        }
                    }
                }
            }
        }
        all.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_counts() {
        let t = ConstraintTable::default_table();
        assert_eq!(t.count(), 208);
    }

    #[test]
    fn bad_rows() {
        assert!(ConstraintTable::parse("Q\tH\tO\tTo\tG").is_err());
        assert!(ConstraintTable::parse("T\tH\tO").is_err());
    }
}
