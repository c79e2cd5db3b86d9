/// Functions callable from operator source. Everything an operator can
/// observe or produce goes through this table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    NumRoutes,
    RouteLen,
    RouteClient,
    Route,
    RouteAngle,
    ClientX,
    ClientY,
    Demand,
    Capacity,
    CentroidX,
    CentroidY,
    NumClients,
    NumLocations,
    StartA,
    StartB,
    NumMoved,
    PenalizedCost,
    EmitRoute,
    Abs,
    Sqrt,
    Atan2,
    Floor,
    Float,
    Min,
    Max,
    Len,
    Push,
    Fill,
    Argsort,
    Rand,
    RandInt,
}

const TABLE: &[(&str, Builtin, usize)] = &[
    ("num_routes", Builtin::NumRoutes, 1),
    ("route_len", Builtin::RouteLen, 2),
    ("route_client", Builtin::RouteClient, 3),
    ("route", Builtin::Route, 2),
    ("route_angle", Builtin::RouteAngle, 2),
    ("client_x", Builtin::ClientX, 1),
    ("client_y", Builtin::ClientY, 1),
    ("demand", Builtin::Demand, 1),
    ("capacity", Builtin::Capacity, 0),
    ("centroid_x", Builtin::CentroidX, 0),
    ("centroid_y", Builtin::CentroidY, 0),
    ("num_clients", Builtin::NumClients, 0),
    ("num_locations", Builtin::NumLocations, 0),
    ("start_a", Builtin::StartA, 0),
    ("start_b", Builtin::StartB, 0),
    ("num_moved", Builtin::NumMoved, 0),
    ("penalized_cost", Builtin::PenalizedCost, 1),
    ("emit_route", Builtin::EmitRoute, 1),
    ("abs", Builtin::Abs, 1),
    ("sqrt", Builtin::Sqrt, 1),
    ("atan2", Builtin::Atan2, 2),
    ("floor", Builtin::Floor, 1),
    ("float", Builtin::Float, 1),
    ("min", Builtin::Min, 2),
    ("max", Builtin::Max, 2),
    ("len", Builtin::Len, 1),
    ("push", Builtin::Push, 2),
    ("fill", Builtin::Fill, 2),
    ("argsort", Builtin::Argsort, 1),
    ("rand", Builtin::Rand, 0),
    ("rand_int", Builtin::RandInt, 2),
];

impl Builtin {
    pub fn lookup(name: &str) -> Option<(Builtin, usize)> {
        TABLE
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|&(_, b, arity)| (b, arity))
    }

    pub fn name(self) -> &'static str {
        TABLE
            .iter()
            .find(|(_, b, _)| *b == self)
            .map(|(n, _, _)| *n)
            .expect("every builtin is in the table")
    }

    pub fn all() -> impl Iterator<Item = (&'static str, usize)> {
        TABLE.iter().map(|&(n, _, a)| (n, a))
    }
}
