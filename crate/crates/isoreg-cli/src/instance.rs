//! Instance file parsing, format v1.
//!
//! UTF-8, whitespace-separated, `#` starts a comment, blank lines ignored.
//! Header `isoreg 1 <kind>` with kind ∈ {chain, dag, points, boxes}:
//!   - chain:  `n`, then n lines `value weight` (order = line order)
//!   - dag:    `n m`, then n lines `value weight`, then m lines `u v` (u ≺ v)
//!   - points: `n d`, then n lines of d coordinates followed by `value weight`
//!   - boxes:  `n d`, then n lines of d lower coords, d upper coords, `value weight`

use isoreg::{boxes_to_domination, Dag, PointSet, WeightedFunction};

/// Parse failure; carries a 1-based line number when one applies.
#[derive(Debug)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn at(line: usize, message: String) -> ParseError {
    ParseError {
        line: Some(line),
        message,
    }
}

/// Which layout the file declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Chain,
    Dag,
    Points,
    Boxes,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Chain => "chain",
            Kind::Dag => "dag",
            Kind::Points => "points",
            Kind::Boxes => "boxes",
        }
    }
}

/// The order structure of a parsed instance. Boxes are converted to their
/// domination point set up front; containment and domination then coincide.
#[derive(Debug)]
pub enum Payload {
    Chain,
    Edges(Dag),
    Domination(PointSet),
}

#[derive(Debug)]
pub struct Instance {
    pub kind: Kind,
    pub wf: WeightedFunction,
    pub payload: Payload,
}

impl Instance {
    pub fn len(&self) -> usize {
        self.wf.len()
    }
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Reader {
            lines: text.lines().enumerate(),
        }
    }

    /// Next non-empty line after comment stripping, with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (idx, raw) in self.lines.by_ref() {
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            return Some((idx + 1, body.split_whitespace().collect()));
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), ParseError> {
        self.next_line().ok_or_else(|| ParseError {
            line: None,
            message: format!("unexpected end of file while reading {what}"),
        })
    }
}

fn ints(line: usize, tokens: &[&str], count: usize, what: &str) -> Result<Vec<i64>, ParseError> {
    if tokens.len() != count {
        return Err(at(
            line,
            format!("{what}: expected {count} fields, got {}", tokens.len()),
        ));
    }
    tokens
        .iter()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| at(line, format!("{what}: '{t}' is not an integer")))
        })
        .collect()
}

fn counts(line: usize, tokens: &[&str], names: &[&str]) -> Result<Vec<usize>, ParseError> {
    let raw = ints(line, tokens, names.len(), &names.join(" "))?;
    raw.iter()
        .zip(names)
        .map(|(&v, name)| {
            usize::try_from(v).map_err(|_| at(line, format!("{name} must be nonnegative, got {v}")))
        })
        .collect()
}

/// Read one `value weight` pair (possibly after `lead` other fields),
/// rejecting negative weights at the source line.
fn value_weight(line: usize, fields: &[i64]) -> Result<(i64, i64), ParseError> {
    let (value, weight) = (fields[fields.len() - 2], fields[fields.len() - 1]);
    if weight < 0 {
        return Err(at(line, format!("negative weight {weight}")));
    }
    Ok((value, weight))
}

fn wrap(e: isoreg::Error) -> ParseError {
    ParseError {
        line: None,
        message: e.to_string(),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut r = Reader::new(text);
    let (hline, header) = r.expect("header")?;
    match header.as_slice() {
        ["isoreg", version, _] if *version != "1" => {
            return Err(at(hline, format!("unsupported format version '{version}'")));
        }
        ["isoreg", "1", kind] => {
            let kind = match *kind {
                "chain" => Kind::Chain,
                "dag" => Kind::Dag,
                "points" => Kind::Points,
                "boxes" => Kind::Boxes,
                other => return Err(at(hline, format!("unknown instance kind '{other}'"))),
            };
            let instance = parse_body(&mut r, kind)?;
            if let Some((l, _)) = r.next_line() {
                return Err(at(l, "unexpected trailing content".to_string()));
            }
            Ok(instance)
        }
        _ => Err(at(
            hline,
            "header must be 'isoreg 1 <chain|dag|points|boxes>'".to_string(),
        )),
    }
}

fn parse_body(r: &mut Reader, kind: Kind) -> Result<Instance, ParseError> {
    match kind {
        Kind::Chain => {
            let (l, t) = r.expect("vertex count")?;
            let n = counts(l, &t, &["n"])?[0];
            let (values, weights) = read_function(r, n)?;
            let wf = WeightedFunction::new(values, weights).map_err(wrap)?;
            Ok(Instance {
                kind,
                wf,
                payload: Payload::Chain,
            })
        }
        Kind::Dag => {
            let (l, t) = r.expect("vertex and edge counts")?;
            let c = counts(l, &t, &["n", "m"])?;
            let (n, m) = (c[0], c[1]);
            let (values, weights) = read_function(r, n)?;
            let mut edges = Vec::with_capacity(m);
            for i in 0..m {
                let (l, t) = r.expect(&format!("edge {i}"))?;
                let e = ints(l, &t, 2, "edge")?;
                let pair: Vec<usize> = e
                    .iter()
                    .map(|&x| {
                        usize::try_from(x)
                            .ok()
                            .filter(|&v| v < n)
                            .ok_or_else(|| at(l, format!("edge endpoint {x} out of range (n = {n})")))
                    })
                    .collect::<Result<_, _>>()?;
                edges.push((pair[0], pair[1]));
            }
            let dag = Dag::new(n, edges).map_err(wrap)?;
            let wf = WeightedFunction::new(values, weights).map_err(wrap)?;
            Ok(Instance {
                kind,
                wf,
                payload: Payload::Edges(dag),
            })
        }
        Kind::Points => {
            let (l, t) = r.expect("point and dimension counts")?;
            let c = counts(l, &t, &["n", "d"])?;
            let (n, d) = (c[0], c[1]);
            if d == 0 {
                return Err(at(l, "dimension must be at least 1".to_string()));
            }
            let mut coords = Vec::with_capacity(n);
            let mut values = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for i in 0..n {
                let (l, t) = r.expect(&format!("point {i}"))?;
                let fields = ints(l, &t, d + 2, "point")?;
                let (value, weight) = value_weight(l, &fields)?;
                coords.push(fields[..d].to_vec());
                values.push(value);
                weights.push(weight);
            }
            let points = PointSet::new(&coords).map_err(wrap)?;
            let wf = WeightedFunction::new(values, weights).map_err(wrap)?;
            Ok(Instance {
                kind,
                wf,
                payload: Payload::Domination(points),
            })
        }
        Kind::Boxes => {
            let (l, t) = r.expect("box and dimension counts")?;
            let c = counts(l, &t, &["n", "d"])?;
            let (n, d) = (c[0], c[1]);
            if d == 0 {
                return Err(at(l, "dimension must be at least 1".to_string()));
            }
            let mut lowers = Vec::with_capacity(n);
            let mut uppers = Vec::with_capacity(n);
            let mut values = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for i in 0..n {
                let (l, t) = r.expect(&format!("box {i}"))?;
                let fields = ints(l, &t, 2 * d + 2, "box")?;
                let (value, weight) = value_weight(l, &fields)?;
                let (lo, hi) = (&fields[..d], &fields[d..2 * d]);
                if let Some(k) = (0..d).find(|&k| lo[k] > hi[k]) {
                    return Err(at(
                        l,
                        format!("box lower corner exceeds upper corner in dimension {k}"),
                    ));
                }
                lowers.push(lo.to_vec());
                uppers.push(hi.to_vec());
                values.push(value);
                weights.push(weight);
            }
            let points = boxes_to_domination(&lowers, &uppers).map_err(wrap)?;
            let wf = WeightedFunction::new(values, weights).map_err(wrap)?;
            Ok(Instance {
                kind,
                wf,
                payload: Payload::Domination(points),
            })
        }
    }
}

fn read_function(r: &mut Reader, n: usize) -> Result<(Vec<i64>, Vec<i64>), ParseError> {
    let mut values = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let (l, t) = r.expect(&format!("vertex {i}"))?;
        let fields = ints(l, &t, 2, "vertex")?;
        let (value, weight) = value_weight(l, &fields)?;
        values.push(value);
        weights.push(weight);
    }
    Ok((values, weights))
}
