//! Text formats: sample CSV and model edge lists.
//!
//! Sample CSV has a header `z0,z1,...,z{p-1}` and one `-1`/`1` row per
//! observation. An edge list has one `v w theta` line per edge (nodes
//! 0-indexed, each unordered pair once); `#` starts a comment and an
//! optional `# p = N` line fixes the node count.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::{Graph, IsingParams, SampleMatrix};

pub fn read_samples_csv<R: Read>(reader: R) -> Result<SampleMatrix> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let p = headers.len();
    for (j, h) in headers.iter().enumerate() {
        if h != format!("z{j}") {
            return Err(Error::parse(1, format!("expected header z{j}, found {h:?}")));
        }
    }
    let mut values = Vec::new();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != p {
            return Err(Error::parse(line, format!("expected {p} fields, found {}", rec.len())));
        }
        for field in rec.iter() {
            let x = match field {
                "1" | "+1" => 1,
                "-1" => -1,
                other => return Err(Error::parse(line, format!("value {other:?} is not -1 or 1"))),
            };
            values.push(x);
        }
        n += 1;
    }
    SampleMatrix::new(n, p, values)
}

pub fn write_samples_csv<W: Write>(samples: &SampleMatrix, mut out: W) -> Result<()> {
    let header: Vec<String> = (0..samples.p()).map(|j| format!("z{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in samples.rows() {
        let line: Vec<&str> = row.iter().map(|&x| if x > 0 { "1" } else { "-1" }).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

struct EdgeLine {
    v: usize,
    w: usize,
    theta: Option<f64>,
}

fn parse_edge_lines(text: &str) -> Result<(Option<usize>, Vec<EdgeLine>)> {
    let mut declared_p = None;
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let (body, comment) = match raw.find('#') {
            Some(pos) => (&raw[..pos], Some(&raw[pos + 1..])),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some(rest) = c.trim().strip_prefix("p") {
                if let Some(num) = rest.trim().strip_prefix('=') {
                    let p = num
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad node count {:?}", num.trim())))?;
                    declared_p = Some(p);
                }
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::parse(
                line,
                format!("expected `v w [theta]`, found {} fields", fields.len()),
            ));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("bad node index {s:?}")))
        };
        let theta = match fields.get(2) {
            Some(s) => Some(
                s.parse::<f64>()
                    .map_err(|_| Error::parse(line, format!("bad theta {s:?}")))?,
            ),
            None => None,
        };
        lines.push(EdgeLine {
            v: idx(fields[0])?,
            w: idx(fields[1])?,
            theta,
        });
    }
    Ok((declared_p, lines))
}

fn resolve_p(declared: Option<usize>, hint: Option<usize>, lines: &[EdgeLine]) -> Result<usize> {
    let inferred = lines.iter().map(|e| e.v.max(e.w) + 1).max().unwrap_or(0);
    match (declared, hint) {
        (Some(d), Some(h)) if d != h => Err(Error::invalid(format!(
            "edge list declares p = {d} but {h} nodes were expected"
        ))),
        (Some(p), _) | (None, Some(p)) => Ok(p),
        (None, None) => Ok(inferred),
    }
}

/// Reads a model; every line must carry a `theta`.
pub fn read_model(text: &str, p_hint: Option<usize>) -> Result<IsingParams> {
    let (declared, lines) = parse_edge_lines(text)?;
    let p = resolve_p(declared, p_hint, &lines)?;
    let mut triples = Vec::with_capacity(lines.len());
    for e in &lines {
        let t = e
            .theta
            .ok_or_else(|| Error::invalid(format!("edge {{{},{}}} has no theta", e.v, e.w)))?;
        triples.push((e.v, e.w, t));
    }
    IsingParams::from_edges(p, triples)
}

/// Reads a graph; `theta` is optional and lines with `theta == 0` are not
/// edges.
pub fn read_graph(text: &str, p_hint: Option<usize>) -> Result<Graph> {
    let (declared, lines) = parse_edge_lines(text)?;
    let p = resolve_p(declared, p_hint, &lines)?;
    Graph::new(
        p,
        lines
            .iter()
            .filter(|e| e.theta.is_none_or(|t| t != 0.0))
            .map(|e| (e.v, e.w)),
    )
}

pub fn write_model<W: Write>(params: &IsingParams, mut out: W) -> Result<()> {
    writeln!(out, "# p = {}", params.p())?;
    for (v, w, t) in params.edges() {
        writeln!(out, "{v} {w} {t}")?;
    }
    Ok(())
}

pub fn write_graph<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# p = {}", graph.p())?;
    for (v, w) in graph.edges() {
        writeln!(out, "{v} {w}")?;
    }
    Ok(())
}
