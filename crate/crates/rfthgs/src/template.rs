//! A family of crossover programs assembled from interchangeable phases.
//!
//! Each phase has four variants, and a few variants read one shared tuning
//! constant. Programs that differ in any single phase stay below the
//! plagiarism threshold of each other, so the mock policy can keep
//! producing fresh candidates for the whole run.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub const NUM_PHASES: usize = 5;
pub const VARIANTS_PER_PHASE: usize = 4;
pub const CONSTANTS: [&str; 3] = ["0.3", "0.5", "0.7"];

const HEADER: &str = "// variant";

/// Which variant each phase uses, plus the tuning constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Genome {
    pub phases: [u8; NUM_PHASES],
    pub constant: u8,
}

impl Genome {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut phases = [0u8; NUM_PHASES];
        for p in &mut phases {
            *p = rng.gen_range(0..VARIANTS_PER_PHASE as u8);
        }
        Genome {
            phases,
            constant: rng.gen_range(0..CONSTANTS.len() as u8),
        }
    }

    /// Moves one random phase to a different variant and redraws the constant.
    pub fn mutate<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        let mut g = *self;
        let p = rng.gen_range(0..NUM_PHASES);
        let shift = rng.gen_range(1..VARIANTS_PER_PHASE as u8);
        g.phases[p] = (g.phases[p] + shift) % VARIANTS_PER_PHASE as u8;
        g.constant = rng.gen_range(0..CONSTANTS.len() as u8);
        g
    }

    /// Reads the genome back from a rendered program's first line.
    pub fn from_source(source: &str) -> Option<Self> {
        source.lines().next()?.strip_prefix(HEADER)?.trim().parse().ok()
    }

    pub fn render(&self) -> String {
        let c = CONSTANTS[self.constant as usize];
        let mut s = format!("{HEADER} {self}\n");
        s.push_str("let taken = fill(false, num_locations());\nlet out = [];\n");
        s.push_str("let nb = num_routes(1);\nlet keys = [];\nfor i in 0..nb {\n");
        s.push_str(KEY[self.phases[0] as usize]);
        s.push_str("}\nlet order = argsort(keys);\n");
        s.push_str(SELECT[self.phases[1] as usize]);
        s.push_str("let na = num_routes(0);\nlet aorder = [];\n");
        s.push_str(A_ORDER[self.phases[2] as usize]);
        s.push_str("for k in 0..len(aorder) {\n    let r = route(0, aorder[k]);\n");
        s.push_str(FILTER[self.phases[3] as usize]);
        s.push_str("}\n");
        s.push_str(EMIT[self.phases[4] as usize]);
        s.replace("$C", c)
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.phases {
            write!(f, "{p} ")?;
        }
        write!(f, "c{}", self.constant)
    }
}

impl FromStr for Genome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != NUM_PHASES + 1 {
            return Err(format!("expected {} fields in `{s}`", NUM_PHASES + 1));
        }
        let mut phases = [0u8; NUM_PHASES];
        for (p, t) in phases.iter_mut().zip(&parts) {
            *p = t.parse().map_err(|_| format!("bad phase `{t}`"))?;
            if *p as usize >= VARIANTS_PER_PHASE {
                return Err(format!("phase variant {p} out of range"));
            }
        }
        let constant: u8 = parts[NUM_PHASES]
            .strip_prefix('c')
            .and_then(|t| t.parse().ok())
            .filter(|&c| (c as usize) < CONSTANTS.len())
            .ok_or_else(|| format!("bad constant `{}`", parts[NUM_PHASES]))?;
        Ok(Genome { phases, constant })
    }
}

// keys for ordering the routes of parent B, one push per route `i`
const KEY: [&str; VARIANTS_PER_PHASE] = [
    "    push(keys, route_angle(1, i));\n",
    "    let c = route_client(1, i, 0);
    push(keys, atan2(client_y(c) - centroid_y(), client_x(c) - centroid_x()));
",
    "    let r = route(1, i);
    let sx = 0.0;
    let sy = 0.0;
    for j in 0..len(r) {
        sx = sx + client_x(r[j]);
        sy = sy + client_y(r[j]);
    }
    let dx = sx / float(len(r)) - centroid_x();
    let dy = sy / float(len(r)) - centroid_y();
    push(keys, dx * dx + dy * dy);
",
    "    let load = 0;
    for j in 0..route_len(1, i) {
        load = load + demand(route_client(1, i, j));
    }
    push(keys, float(load) / float(capacity()) + rand() * $C);
",
];

// inherit routes of parent B in key order
const SELECT: [&str; VARIANTS_PER_PHASE] = [
    "let m = min(num_moved(), nb);
for k in 0..m {
    let r = route(1, order[(start_b() + k) % nb]);
    let fresh = [];
    for j in 0..len(r) {
        if !taken[r[j]] {
            push(fresh, r[j]);
            taken[r[j]] = true;
        }
    }
    push(out, fresh);
}
",
    "for k in 0..nb {
    if k % 2 == start_b() % 2 {
        let r = route(1, order[k]);
        for j in 0..len(r) {
            taken[r[j]] = true;
        }
        push(out, r);
    }
}
",
    "let m = max(1, floor(float(nb) * $C));
let k = 0;
while k < m {
    let r = route(1, order[k]);
    for j in 0..len(r) {
        taken[r[j]] = true;
    }
    push(out, r);
    k = k + 1;
}
",
    "for k in 0..nb {
    if rand() < $C {
        let r = route(1, order[k]);
        let fresh = [];
        for j in 0..len(r) {
            if !taken[r[j]] {
                push(fresh, r[j]);
                taken[r[j]] = true;
            }
        }
        push(out, fresh);
    }
}
",
];

// visiting order of parent A's routes
const A_ORDER: [&str; VARIANTS_PER_PHASE] = [
    "for i in 0..na {
    push(aorder, i);
}
",
    "let i = na - 1;
while i >= 0 {
    push(aorder, i);
    i = i - 1;
}
",
    "let ak = [];
for i in 0..na {
    push(ak, route_angle(0, i));
}
aorder = argsort(ak);
",
    "for k in 0..na {
    push(aorder, (start_a() + k) % na);
}
",
];

// how a route of parent A is reconciled with clients already placed
const FILTER: [&str; VARIANTS_PER_PHASE] = [
    "    let fresh = [];
    for j in 0..len(r) {
        if !taken[r[j]] {
            push(fresh, r[j]);
            taken[r[j]] = true;
        }
    }
    push(out, fresh);
",
    "    let clash = false;
    for j in 0..len(r) {
        if taken[r[j]] {
            clash = true;
        }
    }
    if !clash {
        for j in 0..len(r) {
            taken[r[j]] = true;
        }
        push(out, r);
    }
",
    "    let seg = [];
    for j in 0..len(r) {
        if taken[r[j]] {
            push(out, seg);
            seg = [];
        } else {
            push(seg, r[j]);
            taken[r[j]] = true;
        }
    }
    push(out, seg);
",
    "    let hits = 0;
    for j in 0..len(r) {
        if taken[r[j]] {
            hits = hits + 1;
        }
    }
    if float(hits) <= $C * float(len(r)) {
        let keep = [];
        for j in 0..len(r) {
            if !taken[r[j]] {
                push(keep, r[j]);
                taken[r[j]] = true;
            }
        }
        push(out, keep);
    }
",
];

// emission of the collected routes
const EMIT: [&str; VARIANTS_PER_PHASE] = [
    "for k in 0..len(out) {
    emit_route(out[k]);
}
",
    "let cur = [];
let load = 0;
for k in 0..len(out) {
    let r = out[k];
    let l = 0;
    for j in 0..len(r) {
        l = l + demand(r[j]);
    }
    if load + l <= capacity() {
        cur = cur + r;
        load = load + l;
    } else {
        emit_route(cur);
        cur = r;
        load = l;
    }
}
emit_route(cur);
",
    "for k in 0..len(out) {
    let r = out[k];
    if k % 2 == 1 {
        let rev = [];
        let j = len(r) - 1;
        while j >= 0 {
            push(rev, r[j]);
            j = j - 1;
        }
        r = rev;
    }
    emit_route(r);
}
",
    "for k in 0..len(out) {
    let r = out[k];
    let a = [];
    for j in 0..len(r) {
        push(a, atan2(client_y(r[j]) - centroid_y(), client_x(r[j]) - centroid_x()));
    }
    let o = argsort(a);
    let s = [];
    for j in 0..len(o) {
        push(s, r[o[j]]);
    }
    emit_route(s);
}
",
];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn genome_round_trips_through_source() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = Genome::random(&mut rng);
            assert_eq!(Genome::from_source(&g.render()), Some(g));
        }
        assert_eq!(Genome::from_source(oplang::SREX_SOURCE), None);
    }
}
