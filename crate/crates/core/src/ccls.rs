//! The CCLS v1 text format.
//!
//! ```text
//! CCLS 1 <points> <concepts>
//! {"id":0,"construction":"headtail","level":1,"role":"head","col":1}
//! ...one JSON object per point...
//! <hex labels, little-endian bytes> <origin tags joined by ',' or '-'>
//! ...one line per concept...
//! ```
//!
//! Rectangle points store their up/down index `j` in `row`. Output depends
//! only on the class, so equal classes give byte-identical files.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits;
use crate::concept::{ClassBuilder, ConceptClass, Domain, DomainPoint, OriginTag, PointMeta, RectRole};
use crate::error::{Error, Result};

const MAGIC: &str = "CCLS";
const VERSION: &str = "1";

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRecord {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    construction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    role: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    row: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    col: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    x: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    y: Option<i64>,
}

impl PointRecord {
    fn from_point(p: &DomainPoint) -> Self {
        let mut r = PointRecord { id: p.id, ..Default::default() };
        let Some(meta) = p.meta else { return r };
        r.construction = Some(meta.construction().to_string());
        r.level = Some(meta.level());
        match meta {
            PointMeta::Rect { role, x, y, .. } => {
                let (name, j) = match role {
                    RectRole::Center => ("center", None),
                    RectRole::Up(j) => ("up", Some(j)),
                    RectRole::Down(j) => ("down", Some(j)),
                };
                r.role = Some(name.into());
                r.row = j;
                r.x = Some(x);
                r.y = Some(y);
            }
            PointMeta::Head { col, .. } => {
                r.role = Some("head".into());
                r.col = Some(col);
            }
            PointMeta::Tail { row, col, .. } => {
                r.role = Some("tail".into());
                r.row = Some(row);
                r.col = Some(col);
            }
        }
        r
    }

    fn into_point(self, line: usize) -> Result<DomainPoint> {
        let missing = |f: &str| Error::parse(line, format!("point {} lacks field {f}", self.id));
        let meta = match self.construction.as_deref() {
            None => None,
            Some(kind) => {
                let level = self.level.ok_or_else(|| missing("level"))?;
                let role = self.role.as_deref().ok_or_else(|| missing("role"))?;
                Some(match (kind, role) {
                    ("rectangles", "center" | "up" | "down") => PointMeta::Rect {
                        level,
                        role: match role {
                            "center" => RectRole::Center,
                            "up" => RectRole::Up(self.row.ok_or_else(|| missing("row"))?),
                            _ => RectRole::Down(self.row.ok_or_else(|| missing("row"))?),
                        },
                        x: self.x.ok_or_else(|| missing("x"))?,
                        y: self.y.ok_or_else(|| missing("y"))?,
                    },
                    ("headtail", "head") => {
                        PointMeta::Head { level, col: self.col.ok_or_else(|| missing("col"))? }
                    }
                    ("headtail", "tail") => PointMeta::Tail {
                        level,
                        row: self.row.ok_or_else(|| missing("row"))?,
                        col: self.col.ok_or_else(|| missing("col"))?,
                    },
                    _ => return Err(Error::parse(line, format!("unknown role {role:?} for {kind}"))),
                })
            }
        };
        Ok(DomainPoint { id: self.id, meta })
    }
}

pub fn write_ccls<W: Write>(class: &ConceptClass, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{MAGIC} {VERSION} {} {}", class.domain_size(), class.len())?;
    for p in class.domain().points() {
        serde_json::to_writer(&mut out, &PointRecord::from_point(p))?;
        out.write_all(b"\n")?;
    }
    for (i, row) in class.rows().enumerate() {
        let tags = class.origins(i);
        let tags = if tags.is_empty() {
            "-".to_string()
        } else {
            tags.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        writeln!(out, "{} {tags}", bits::to_hex(row, class.domain_size()))?;
    }
    out.flush()?;
    Ok(())
}

pub fn to_ccls_string(class: &ConceptClass) -> String {
    let mut buf = Vec::new();
    write_ccls(class, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CCLS output is ASCII")
}

/// Parses a CCLS v1 stream. Duplicate concepts are rejected.
pub fn read_ccls<R: BufRead>(input: R) -> Result<ConceptClass> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, l)) => Ok((n, l?)),
            None => Err(Error::parse(0, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (n, header) = next("header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (points, concepts) = match fields.as_slice() {
        [MAGIC, VERSION, x, c] => (
            x.parse::<usize>().map_err(|_| Error::parse(n, "bad point count"))?,
            c.parse::<usize>().map_err(|_| Error::parse(n, "bad concept count"))?,
        ),
        _ => return Err(Error::parse(n, format!("expected `{MAGIC} {VERSION} <points> <concepts>`"))),
    };

    let mut domain = Vec::with_capacity(points);
    for _ in 0..points {
        let (n, line) = next("a point record")?;
        let record: PointRecord =
            serde_json::from_str(&line).map_err(|e| Error::parse(n, e.to_string()))?;
        domain.push(record.into_point(n)?);
    }
    let domain = Domain::new(domain).map_err(|e| Error::parse(1, e.to_string()))?;

    let mut builder = ClassBuilder::with_shared(Arc::new(domain));
    builder.reserve(concepts);
    for _ in 0..concepts {
        let (n, line) = next("a concept line")?;
        let (hex, tags) = line
            .split_once(' ')
            .ok_or_else(|| Error::parse(n, "expected `<hex> <tags>`"))?;
        let row = bits::from_hex(hex, points).map_err(|e| Error::parse(n, e))?;
        let tags: Vec<OriginTag> = if tags == "-" {
            Vec::new()
        } else {
            tags.split(',')
                .map(|t| t.parse().map_err(|e: String| Error::parse(n, e)))
                .collect::<Result<_>>()?
        };
        let before = builder.len();
        let mut iter = tags.into_iter();
        builder.push_words(&row, iter.next());
        if builder.len() == before {
            return Err(Error::parse(n, "duplicate concept"));
        }
        for t in iter {
            builder.push_words(&row, Some(t));
        }
    }
    if let Some((n, l)) = lines.next() {
        if !l?.trim().is_empty() {
            return Err(Error::parse(n, "trailing content after the last concept"));
        }
    }
    Ok(builder.finish())
}

pub fn save_ccls(class: &ConceptClass, path: impl AsRef<Path>) -> Result<()> {
    write_ccls(class, File::create(path)?)
}

pub fn load_ccls(path: impl AsRef<Path>) -> Result<ConceptClass> {
    read_ccls(BufReader::new(File::open(path)?))
}
