//! Text formats: the native instance format, a TSPLIB CVRP subset, and solution files.
//!
//! Native format (UTF-8, line oriented, `#` starts a comment, blank lines ignored):
//!
//! ```text
//! CVRP 1
//! DEPOT <x> <y>
//! N <n>
//! <x> <y> <demand>      (n lines; terminal ids are 0..n in file order)
//! ```
//!
//! Solution format: one tour per line, tokens in route order. A bare id
//! visits a terminal, `(id)` serves it by an out-and-back excursion from the
//! current route position, and `@x,y` passes through an auxiliary point.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Instance, Point, Solution, Stop, Tour};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn num(line: usize, token: Option<&str>, what: &str) -> Result<f64> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{token}'")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{what} is not finite")));
    }
    Ok(v)
}

pub fn parse_native(text: &str) -> Result<Instance> {
    let mut lines = content_lines(text);
    let (l1, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header.split_whitespace().collect::<Vec<_>>() != ["CVRP", "1"] {
        return Err(parse_err(l1, "expected header 'CVRP 1'"));
    }

    let (l2, depot_line) = lines
        .next()
        .ok_or_else(|| parse_err(l1 + 1, "missing DEPOT line"))?;
    let mut tok = depot_line.split_whitespace();
    if tok.next() != Some("DEPOT") {
        return Err(parse_err(l2, "expected 'DEPOT <x> <y>'"));
    }
    let depot = Point::new(num(l2, tok.next(), "x")?, num(l2, tok.next(), "y")?);
    if tok.next().is_some() {
        return Err(parse_err(l2, "trailing tokens after DEPOT"));
    }

    let (l3, n_line) = lines
        .next()
        .ok_or_else(|| parse_err(l2 + 1, "missing N line"))?;
    let mut tok = n_line.split_whitespace();
    if tok.next() != Some("N") {
        return Err(parse_err(l3, "expected 'N <n>'"));
    }
    let n: usize = tok
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(l3, "invalid terminal count"))?;

    let mut sites = Vec::with_capacity(n);
    let mut last = l3;
    for (line, body) in lines.by_ref() {
        if sites.len() == n {
            return Err(parse_err(line, format!("more than {n} terminal lines")));
        }
        let mut tok = body.split_whitespace();
        let p = Point::new(num(line, tok.next(), "x")?, num(line, tok.next(), "y")?);
        let demand = num(line, tok.next(), "demand")?;
        if tok.next().is_some() {
            return Err(parse_err(line, "trailing tokens"));
        }
        if !(demand > 0.0 && demand <= 1.0) {
            return Err(parse_err(line, "demand outside (0,1]"));
        }
        if p == depot {
            return Err(parse_err(line, "terminal coincides with the depot"));
        }
        sites.push((p, demand));
        last = line;
    }
    if sites.len() != n {
        return Err(parse_err(
            last + 1,
            format!("expected {n} terminal lines, found {}", sites.len()),
        ));
    }
    Instance::new(depot, sites)
}

/// Shortest decimal text that reads back to the same `f64`.
pub fn emit_native(instance: &Instance) -> String {
    let mut out = String::new();
    let d = instance.depot();
    writeln!(out, "CVRP 1").unwrap();
    writeln!(out, "DEPOT {:?} {:?}", d.x, d.y).unwrap();
    writeln!(out, "N {}", instance.len()).unwrap();
    for t in instance.terminals() {
        writeln!(
            out,
            "{:?} {:?} {:?}",
            t.location.x, t.location.y, t.demand
        )
        .unwrap();
    }
    out
}

#[derive(PartialEq)]
enum Section {
    Header,
    Coords,
    Demands,
    Depots,
}

/// Imports an EUC_2D CVRP file. Demands are divided by `CAPACITY`; the
/// depot is the node listed in `DEPOT_SECTION`. Distances are the exact
/// Euclidean distances, not TSPLIB's rounded integers.
pub fn parse_tsplib_cvrp(text: &str) -> Result<Instance> {
    let mut section = Section::Header;
    let mut capacity: Option<f64> = None;
    let mut edge_type: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut coords: BTreeMap<i64, Point> = BTreeMap::new();
    let mut node_order: Vec<i64> = Vec::new();
    let mut demands: BTreeMap<i64, f64> = BTreeMap::new();
    let mut depots: Vec<i64> = Vec::new();
    let mut seen_sections = HashSet::new();

    for (line, body) in content_lines(text) {
        let upper = body.to_ascii_uppercase();
        let first = upper.split([' ', ':', '\t']).next().unwrap_or("");
        match first {
            "EOF" => break,
            "NODE_COORD_SECTION" => {
                section = Section::Coords;
                seen_sections.insert("NODE_COORD_SECTION");
                continue;
            }
            "DEMAND_SECTION" => {
                section = Section::Demands;
                seen_sections.insert("DEMAND_SECTION");
                continue;
            }
            "DEPOT_SECTION" => {
                section = Section::Depots;
                seen_sections.insert("DEPOT_SECTION");
                continue;
            }
            _ => {}
        }
        if first.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            // "KEY : value" header entry.
            section = Section::Header;
            let (key, value) = match body.split_once(':') {
                Some((k, v)) => (k.trim().to_ascii_uppercase(), v.trim().to_string()),
                None => {
                    let mut it = body.splitn(2, char::is_whitespace);
                    (
                        it.next().unwrap_or("").to_ascii_uppercase(),
                        it.next().unwrap_or("").trim().to_string(),
                    )
                }
            };
            match key.as_str() {
                "TYPE" => {
                    if !value.eq_ignore_ascii_case("CVRP") {
                        return Err(Error::Unsupported(format!("problem type {value}")));
                    }
                }
                "EDGE_WEIGHT_TYPE" => edge_type = Some(value.to_ascii_uppercase()),
                "CAPACITY" => {
                    let q = num(line, Some(&value), "capacity")?;
                    if q <= 0.0 {
                        return Err(parse_err(line, "capacity must be positive"));
                    }
                    capacity = Some(q);
                }
                "DIMENSION" => {
                    dimension = Some(
                        value
                            .parse()
                            .map_err(|_| parse_err(line, "invalid DIMENSION"))?,
                    )
                }
                _ => {}
            }
            continue;
        }
        let mut tok = body.split_whitespace();
        match section {
            Section::Header => return Err(parse_err(line, "data outside a section")),
            Section::Coords => {
                let id = parse_node(line, tok.next())?;
                let p = Point::new(num(line, tok.next(), "x")?, num(line, tok.next(), "y")?);
                if tok.next().is_some() {
                    return Err(Error::Unsupported(format!(
                        "line {line}: only 2D coordinates are supported"
                    )));
                }
                if coords.insert(id, p).is_some() {
                    return Err(parse_err(line, format!("duplicate node id {id}")));
                }
                node_order.push(id);
            }
            Section::Demands => {
                let id = parse_node(line, tok.next())?;
                let q = num(line, tok.next(), "demand")?;
                if demands.insert(id, q).is_some() {
                    return Err(parse_err(line, format!("duplicate demand for node {id}")));
                }
            }
            Section::Depots => {
                let id: i64 = body
                    .parse()
                    .map_err(|_| parse_err(line, "invalid depot id"))?;
                if id != -1 {
                    depots.push(id);
                }
            }
        }
    }

    match edge_type.as_deref() {
        Some("EUC_2D") => {}
        Some(other) => {
            return Err(Error::Unsupported(format!("edge weight type {other}")));
        }
        None => return Err(Error::InvalidInstance("missing EDGE_WEIGHT_TYPE".into())),
    }
    let capacity =
        capacity.ok_or_else(|| Error::InvalidInstance("missing CAPACITY".into()))?;
    for s in ["NODE_COORD_SECTION", "DEMAND_SECTION", "DEPOT_SECTION"] {
        if !seen_sections.contains(s) {
            return Err(Error::InvalidInstance(format!("missing {s}")));
        }
    }
    if let Some(dim) = dimension {
        if dim != coords.len() {
            return Err(Error::InvalidInstance(format!(
                "DIMENSION {dim} but {} coordinates",
                coords.len()
            )));
        }
    }
    let depot_id = match depots.as_slice() {
        [d] => *d,
        [] => return Err(Error::InvalidInstance("DEPOT_SECTION names no depot".into())),
        _ => return Err(Error::Unsupported("multiple depots".into())),
    };
    let depot = *coords
        .get(&depot_id)
        .ok_or_else(|| Error::InvalidInstance(format!("depot node {depot_id} has no coordinates")))?;

    let mut sites = Vec::new();
    for id in node_order.into_iter().filter(|&id| id != depot_id) {
        let q = *demands
            .get(&id)
            .ok_or_else(|| Error::InvalidInstance(format!("node {id} has no demand")))?;
        if q > capacity {
            return Err(Error::InvalidInstance(format!(
                "node {id}: demand {q} exceeds capacity {capacity}"
            )));
        }
        if q <= 0.0 {
            return Err(Error::InvalidInstance(format!(
                "node {id}: demand outside (0,1] after normalization"
            )));
        }
        sites.push((coords[&id], q / capacity));
    }
    Instance::new(depot, sites)
}

fn parse_node(line: usize, token: Option<&str>) -> Result<i64> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(line, "invalid node id"))
}

/// Native or TSPLIB, told apart by the presence of `NODE_COORD_SECTION`.
pub fn parse_instance(text: &str) -> Result<Instance> {
    if text.contains("NODE_COORD_SECTION") {
        parse_tsplib_cvrp(text)
    } else {
        parse_native(text)
    }
}

pub fn emit_solution(solution: &Solution) -> String {
    let mut out = String::new();
    for tour in &solution.tours {
        let tokens: Vec<String> = tour
            .stops
            .iter()
            .map(|s| match *s {
                Stop::Visit(id) => id.to_string(),
                Stop::RoundTrip(id) => format!("({id})"),
                Stop::Waypoint(p) => format!("@{:?},{:?}", p.x, p.y),
            })
            .collect();
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_solution(text: &str) -> Result<Solution> {
    let mut tours = Vec::new();
    for (line, body) in content_lines(text) {
        let mut stops = Vec::new();
        for token in body.split_whitespace() {
            let stop = if let Some(rest) = token.strip_prefix('@') {
                let (x, y) = rest
                    .split_once(',')
                    .ok_or_else(|| parse_err(line, format!("invalid waypoint '{token}'")))?;
                Stop::Waypoint(Point::new(
                    num(line, Some(x), "waypoint x")?,
                    num(line, Some(y), "waypoint y")?,
                ))
            } else if let Some(inner) = token.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                Stop::RoundTrip(
                    inner
                        .parse()
                        .map_err(|_| parse_err(line, format!("invalid id '{token}'")))?,
                )
            } else {
                Stop::Visit(
                    token
                        .parse()
                        .map_err(|_| parse_err(line, format!("invalid id '{token}'")))?,
                )
            };
            stops.push(stop);
        }
        tours.push(Tour::new(stops));
    }
    Ok(Solution::new(tours))
}
