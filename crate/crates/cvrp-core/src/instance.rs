use std::fmt::Write as _;

use crate::{CvrpError, Result};

/// A CVRP problem. Immutable once built; every invariant is checked by
/// [`Instance::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    coords: Vec<(f64, f64)>,
    demands: Vec<i64>,
    capacity: i64,
    depot: usize,
    dist: Vec<i64>,
    client_centroid: (f64, f64),
    max_arc: i64,
}

/// Round-half-up integer Euclidean distance (CVRPLIB X convention).
pub(crate) fn rounded_euclidean(a: (f64, f64), b: (f64, f64)) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx.hypot(dy) + 0.5).floor() as i64
}

impl Instance {
    pub fn new(
        name: impl Into<String>,
        coords: Vec<(f64, f64)>,
        demands: Vec<i64>,
        capacity: i64,
        depot: usize,
    ) -> Result<Self> {
        let n = coords.len();
        if n < 2 {
            return Err(CvrpError::InvalidInstance(format!(
                "need at least 2 locations, got {n}"
            )));
        }
        if demands.len() != n {
            return Err(CvrpError::InvalidInstance(format!(
                "{} demands for {n} locations",
                demands.len()
            )));
        }
        if capacity <= 0 {
            return Err(CvrpError::InvalidInstance(format!(
                "capacity must be positive, got {capacity}"
            )));
        }
        if depot >= n {
            return Err(CvrpError::InvalidInstance(format!(
                "depot index {depot} out of range"
            )));
        }
        if demands[depot] != 0 {
            return Err(CvrpError::InvalidInstance(format!(
                "depot demand must be 0, got {}",
                demands[depot]
            )));
        }
        for (idx, &d) in demands.iter().enumerate() {
            if d < 0 {
                return Err(CvrpError::InvalidInstance(format!(
                    "location {idx} has negative demand {d}"
                )));
            }
            if d > capacity {
                return Err(CvrpError::InvalidInstance(format!(
                    "location {idx} demand {d} exceeds capacity {capacity}"
                )));
            }
        }
        if coords.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(CvrpError::InvalidInstance("non-finite coordinate".into()));
        }

        let mut dist = vec![0; n * n];
        let mut max_arc = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = rounded_euclidean(coords[i], coords[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
                max_arc = max_arc.max(d);
            }
        }

        let (mut sx, mut sy) = (0.0, 0.0);
        for (idx, &(x, y)) in coords.iter().enumerate() {
            if idx != depot {
                sx += x;
                sy += y;
            }
        }
        let m = (n - 1) as f64;

        Ok(Instance {
            name: name.into(),
            coords,
            demands,
            capacity,
            depot,
            dist,
            client_centroid: (sx / m, sy / m),
            max_arc,
        })
    }

    /// Parses a TSPLIB-style CVRP file (EUC_2D only).
    pub fn parse(text: &str) -> Result<Self> {
        parse_vrp(text)
    }

    /// Renders the instance back into the TSPLIB text format accepted by
    /// [`Instance::parse`].
    pub fn to_vrp_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME : {}", self.name);
        let _ = writeln!(out, "TYPE : CVRP");
        let _ = writeln!(out, "DIMENSION : {}", self.num_locations());
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        let _ = writeln!(out, "CAPACITY : {}", self.capacity);
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for (idx, (x, y)) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}", idx + 1, x, y);
        }
        let _ = writeln!(out, "DEMAND_SECTION");
        for (idx, d) in self.demands.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", idx + 1, d);
        }
        let _ = writeln!(out, "DEPOT_SECTION");
        let _ = writeln!(out, "\t{}", self.depot + 1);
        let _ = writeln!(out, "\t-1");
        let _ = writeln!(out, "EOF");
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_locations(&self) -> usize {
        self.coords.len()
    }

    pub fn num_clients(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn depot(&self) -> usize {
        self.depot
    }

    pub fn coords(&self, loc: usize) -> (f64, f64) {
        self.coords[loc]
    }

    pub fn demand(&self, loc: usize) -> i64 {
        self.demands[loc]
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> i64 {
        self.dist[i * self.coords.len() + j]
    }

    /// Longest arc in the distance matrix.
    pub fn max_arc(&self) -> i64 {
        self.max_arc
    }

    /// Mean position of all client locations (depot excluded).
    pub fn centroid(&self) -> (f64, f64) {
        self.client_centroid
    }

    pub fn is_client(&self, loc: usize) -> bool {
        loc < self.coords.len() && loc != self.depot
    }

    /// Client location indices in ascending order.
    pub fn clients(&self) -> impl Iterator<Item = usize> + '_ {
        let depot = self.depot;
        (0..self.coords.len()).filter(move |&i| i != depot)
    }

    pub fn total_demand(&self) -> i64 {
        self.demands.iter().sum()
    }
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    dimension: Option<usize>,
    capacity: Option<i64>,
    edge_weight_type: Option<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Coords,
    Demands,
    Depots,
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>()
        .map_err(|_| CvrpError::malformed(line, format!("non-numeric token {tok:?}")))
}

fn parse_vrp(text: &str) -> Result<Instance> {
    let mut header = Header::default();
    let mut section = Section::None;
    let mut coords: Vec<(usize, f64, f64, usize)> = Vec::new();
    let mut demands: Vec<(usize, i64, usize)> = Vec::new();
    let mut depots: Vec<usize> = Vec::new();
    let mut seen_coords = false;
    let mut seen_demands = false;
    let mut seen_depots = false;
    let mut depot_closed = false;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let first = line.split_whitespace().next().unwrap_or("");
        let starts_keyword = first
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic());

        if starts_keyword {
            let (key, value) = match line.split_once(':') {
                Some((k, v)) => (k.trim().to_ascii_uppercase(), Some(v.trim())),
                None => (first.to_ascii_uppercase(), None),
            };
            section = Section::None;
            match (key.as_str(), value) {
                ("EOF", _) => break,
                ("NODE_COORD_SECTION", _) => {
                    section = Section::Coords;
                    seen_coords = true;
                }
                ("DEMAND_SECTION", _) => {
                    section = Section::Demands;
                    seen_demands = true;
                }
                ("DEPOT_SECTION", _) => {
                    section = Section::Depots;
                    seen_depots = true;
                }
                ("NAME", Some(v)) => header.name = Some(v.to_string()),
                ("DIMENSION", Some(v)) => header.dimension = Some(parse_num(v, lineno)?),
                ("CAPACITY", Some(v)) => header.capacity = Some(parse_num(v, lineno)?),
                ("EDGE_WEIGHT_TYPE", Some(v)) => header.edge_weight_type = Some(v.to_string()),
                (_, Some(_)) => {} // COMMENT, TYPE and other informational keys
                (other, None) => {
                    return Err(CvrpError::malformed(
                        lineno,
                        format!("unknown section {other:?}"),
                    ))
                }
            }
            continue;
        }

        let toks: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::Coords => {
                if toks.len() != 3 {
                    return Err(CvrpError::malformed(lineno, "expected `id x y`"));
                }
                coords.push((
                    parse_num(toks[0], lineno)?,
                    parse_num(toks[1], lineno)?,
                    parse_num(toks[2], lineno)?,
                    lineno,
                ));
            }
            Section::Demands => {
                if toks.len() != 2 {
                    return Err(CvrpError::malformed(lineno, "expected `id demand`"));
                }
                demands.push((parse_num(toks[0], lineno)?, parse_num(toks[1], lineno)?, lineno));
            }
            Section::Depots => {
                for tok in toks {
                    let id: i64 = parse_num(tok, lineno)?;
                    if id == -1 {
                        depot_closed = true;
                    } else if depot_closed {
                        return Err(CvrpError::malformed(lineno, "depot after -1 terminator"));
                    } else if id < 1 {
                        return Err(CvrpError::malformed(lineno, format!("bad depot id {id}")));
                    } else {
                        depots.push(id as usize);
                    }
                }
            }
            Section::None => {
                return Err(CvrpError::malformed(lineno, "data outside of any section"));
            }
        }
    }

    if let Some(ewt) = &header.edge_weight_type {
        if !ewt.eq_ignore_ascii_case("EUC_2D") {
            return Err(CvrpError::UnsupportedEdgeWeightType(ewt.clone()));
        }
    } else {
        return Err(CvrpError::malformed(0, "missing EDGE_WEIGHT_TYPE"));
    }
    let n = header
        .dimension
        .ok_or_else(|| CvrpError::malformed(0, "missing DIMENSION"))?;
    let capacity = header
        .capacity
        .ok_or_else(|| CvrpError::malformed(0, "missing CAPACITY"))?;
    if !seen_coords {
        return Err(CvrpError::malformed(0, "missing NODE_COORD_SECTION"));
    }
    if !seen_demands {
        return Err(CvrpError::malformed(0, "missing DEMAND_SECTION"));
    }
    if !seen_depots {
        return Err(CvrpError::malformed(0, "missing DEPOT_SECTION"));
    }
    if coords.len() != n {
        return Err(CvrpError::InconsistentDimension {
            section: "NODE_COORD_SECTION",
            expected: n,
            found: coords.len(),
        });
    }
    if demands.len() != n {
        return Err(CvrpError::InconsistentDimension {
            section: "DEMAND_SECTION",
            expected: n,
            found: demands.len(),
        });
    }
    if depots.len() != 1 {
        return Err(CvrpError::malformed(
            0,
            format!("expected exactly one depot, found {}", depots.len()),
        ));
    }

    let mut xy = vec![None; n];
    for (id, x, y, line) in coords {
        if id < 1 || id > n || xy[id - 1].is_some() {
            return Err(CvrpError::malformed(line, format!("bad or repeated node id {id}")));
        }
        xy[id - 1] = Some((x, y));
    }
    let mut dem = vec![None; n];
    for (id, d, line) in demands {
        if id < 1 || id > n || dem[id - 1].is_some() {
            return Err(CvrpError::malformed(line, format!("bad or repeated node id {id}")));
        }
        dem[id - 1] = Some(d);
    }
    let depot = depots[0] - 1;
    if depot >= n {
        return Err(CvrpError::malformed(0, format!("depot id {} out of range", depots[0])));
    }

    // Every slot is filled: ids are distinct, in range and exactly n of them.
    let coords = xy.into_iter().map(Option::unwrap).collect();
    let demands = dem.into_iter().map(Option::unwrap).collect();
    Instance::new(
        header.name.unwrap_or_default(),
        coords,
        demands,
        capacity,
        depot,
    )
}
