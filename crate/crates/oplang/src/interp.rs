//! Step-bounded tree-walking interpreter over the normalized form.

use std::rc::Rc;

use cvrp_core::{route_angle, CostEvaluator, Instance, Solution};
use hgs_solver::CrossoverContext;
use rand::Rng;
use thiserror::Error;

use crate::ast::{BinOp, UnOp};
use crate::normalize::{Expr, Place, Stmt};
use crate::{Builtin, OperatorProgram};

/// Resource limits for one execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecBudget {
    pub max_steps: u64,
    pub max_emitted_routes: usize,
    pub max_list_len: usize,
}

impl Default for ExecBudget {
    fn default() -> Self {
        ExecBudget {
            max_steps: 10_000_000,
            max_emitted_routes: 10_000,
            max_list_len: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    List(Rc<Vec<Value>>),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Bool(_) => "bool",
            Value::List(_) => "list",
        }
    }

    fn num(&self) -> Result<f64, ExecError> {
        match self {
            Value::Int(v) => Ok(*v as f64),
            Value::Float(v) => Ok(*v),
            other => Err(runtime(format!("expected a number, got {}", other.type_name()))),
        }
    }

    fn int(&self) -> Result<i64, ExecError> {
        match self {
            Value::Int(v) => Ok(*v),
            Value::Float(_) => Err(runtime("float used where an integer is required".into())),
            other => Err(runtime(format!("expected an integer, got {}", other.type_name()))),
        }
    }

    fn bool(&self) -> Result<bool, ExecError> {
        match self {
            Value::Bool(v) => Ok(*v),
            other => Err(runtime(format!("expected a bool, got {}", other.type_name()))),
        }
    }

    fn list(&self) -> Result<&Rc<Vec<Value>>, ExecError> {
        match self {
            Value::List(v) => Ok(v),
            other => Err(runtime(format!("expected a list, got {}", other.type_name()))),
        }
    }

    /// Structural equality with numeric comparison across int and float.
    fn equals(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::List(a), Value::List(b)) => {
                a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x.equals(y))
            }
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (a, b) => match (a.num(), b.num()) {
                (Ok(x), Ok(y)) => x == y,
                _ => false,
            },
        }
    }
}

fn runtime(message: String) -> ExecError {
    ExecError::Runtime(message)
}

fn index(v: &Value, len: usize) -> Result<usize, ExecError> {
    let i = match v {
        Value::Float(_) => return Err(runtime("float used as index".into())),
        other => other.int()?,
    };
    if i < 0 || i as usize >= len {
        return Err(runtime(format!("index {i} out of range for length {len}")));
    }
    Ok(i as usize)
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return,
}

struct Machine<'m, 'c> {
    inst: &'m Instance,
    cost: &'m CostEvaluator,
    ctx: &'m mut CrossoverContext<'c>,
    budget: ExecBudget,
    steps: u64,
    slots: Vec<Value>,
    emitted: Vec<Vec<usize>>,
    used: Vec<bool>,
}

fn charge(steps: &mut u64, budget: &ExecBudget, n: u64) -> Result<(), ExecError> {
    *steps += n;
    if *steps > budget.max_steps {
        return Err(ExecError::BudgetExceeded(format!(
            "step limit of {} reached",
            budget.max_steps
        )));
    }
    Ok(())
}

/// Runs `prog` against the crossover context and returns the offspring
/// assembled from its `emit_route` calls. Clients never emitted end up
/// unplanned.
pub fn execute(
    prog: &OperatorProgram,
    ctx: &mut CrossoverContext<'_>,
    inst: &Instance,
    cost: &CostEvaluator,
    budget: ExecBudget,
) -> Result<Solution, ExecError> {
    let mut m = Machine {
        inst,
        cost,
        ctx,
        budget,
        steps: 0,
        slots: vec![Value::Int(0); prog.num_slots],
        emitted: Vec::new(),
        used: vec![false; inst.num_locations()],
    };
    m.block(&prog.body)?;
    Ok(Solution::new(inst, m.emitted))
}

impl Machine<'_, '_> {
    fn tick(&mut self, n: u64) -> Result<(), ExecError> {
        charge(&mut self.steps, &self.budget, n)
    }

    fn check_len(&self, len: usize) -> Result<(), ExecError> {
        if len > self.budget.max_list_len {
            return Err(ExecError::BudgetExceeded(format!(
                "list length limit of {} reached",
                self.budget.max_list_len
            )));
        }
        Ok(())
    }

    fn block(&mut self, body: &[Stmt]) -> Result<Flow, ExecError> {
        for s in body {
            match self.stmt(s)? {
                Flow::Normal => {}
                flow => return Ok(flow),
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &Stmt) -> Result<Flow, ExecError> {
        self.tick(1)?;
        match s {
            Stmt::Let(slot, e) => {
                self.slots[*slot] = self.expr(e)?;
            }
            Stmt::Assign(place, e) => {
                let value = self.expr(e)?;
                *self.place_mut(place)? = value;
            }
            Stmt::If(cond, then, otherwise) => {
                let branch = if self.expr(cond)?.bool()? { then } else { otherwise };
                return self.block(branch);
            }
            Stmt::While(cond, body) => {
                while self.expr(cond)?.bool()? {
                    match self.block(body)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Normal | Flow::Continue => {}
                    }
                    self.tick(1)?;
                }
            }
            Stmt::For(slot, lo, hi, body) => {
                let lo = self.expr(lo)?.int()?;
                let hi = self.expr(hi)?.int()?;
                let mut i = lo;
                while i < hi {
                    self.slots[*slot] = Value::Int(i);
                    match self.block(body)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Normal | Flow::Continue => {}
                    }
                    self.tick(1)?;
                    i += 1;
                }
            }
            Stmt::Break => return Ok(Flow::Break),
            Stmt::Continue => return Ok(Flow::Continue),
            Stmt::Return => return Ok(Flow::Return),
            Stmt::Expr(e) => {
                self.expr(e)?;
            }
        }
        Ok(Flow::Normal)
    }

    /// Mutable reference into a variable, copying shared list storage
    /// along the way (charged at the copied length).
    fn place_mut(&mut self, place: &Place) -> Result<&mut Value, ExecError> {
        let idx: Vec<Value> = place
            .indices
            .iter()
            .map(|e| self.expr(e))
            .collect::<Result<_, _>>()?;
        let budget = self.budget;
        let steps = &mut self.steps;
        let mut v = &mut self.slots[place.slot];
        for i in &idx {
            let Value::List(items) = v else {
                return Err(runtime(format!("cannot index into {}", v.type_name())));
            };
            if Rc::strong_count(items) > 1 {
                charge(steps, &budget, items.len() as u64)?;
            }
            let items = Rc::make_mut(items);
            let at = index(i, items.len())?;
            v = &mut items[at];
        }
        Ok(v)
    }

    fn expr(&mut self, e: &Expr) -> Result<Value, ExecError> {
        self.tick(1)?;
        Ok(match e {
            Expr::Int(v) => Value::Int(*v),
            Expr::Float(v) => Value::Float(*v),
            Expr::Bool(v) => Value::Bool(*v),
            Expr::Var(slot) => self.slots[*slot].clone(),
            Expr::List(items) => {
                self.check_len(items.len())?;
                self.tick(items.len() as u64)?;
                let values = items
                    .iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<Vec<_>, _>>()?;
                Value::List(Rc::new(values))
            }
            Expr::Index(base, idx) => {
                let base = self.expr(base)?;
                let idx = self.expr(idx)?;
                let items = base.list()?;
                items[index(&idx, items.len())?].clone()
            }
            Expr::Unary(op, operand) => {
                let v = self.expr(operand)?;
                match (op, v) {
                    (UnOp::Not, v) => Value::Bool(!v.bool()?),
                    (UnOp::Neg, Value::Int(i)) => Value::Int(
                        i.checked_neg()
                            .ok_or_else(|| runtime("integer overflow".into()))?,
                    ),
                    (UnOp::Neg, v) => Value::Float(-v.num()?),
                }
            }
            Expr::Binary(op, lhs, rhs) => self.binary(*op, lhs, rhs)?,
            Expr::Call(b, args) => {
                let args = args
                    .iter()
                    .map(|e| self.expr(e))
                    .collect::<Result<Vec<_>, _>>()?;
                self.call(*b, &args)?
            }
            Expr::Push(place, value) => {
                let value = self.expr(value)?;
                let max = self.budget.max_list_len;
                let budget = self.budget;
                // the place borrow ends before the step charge below
                let target = self.place_mut(place)?;
                let Value::List(items) = target else {
                    return Err(runtime(format!("cannot push onto {}", target.type_name())));
                };
                let copied = if Rc::strong_count(items) > 1 { items.len() } else { 0 };
                if items.len() + 1 > max {
                    return Err(ExecError::BudgetExceeded(format!(
                        "list length limit of {max} reached"
                    )));
                }
                Rc::make_mut(items).push(value);
                charge(&mut self.steps, &budget, copied as u64)?;
                Value::Int(0)
            }
        })
    }

    fn binary(&mut self, op: BinOp, lhs: &Expr, rhs: &Expr) -> Result<Value, ExecError> {
        match op {
            BinOp::And => {
                return Ok(Value::Bool(
                    self.expr(lhs)?.bool()? && self.expr(rhs)?.bool()?,
                ))
            }
            BinOp::Or => {
                return Ok(Value::Bool(
                    self.expr(lhs)?.bool()? || self.expr(rhs)?.bool()?,
                ))
            }
            _ => {}
        }
        let a = self.expr(lhs)?;
        let b = self.expr(rhs)?;
        let overflow = || runtime("integer overflow".into());
        Ok(match op {
            BinOp::Eq | BinOp::Ne => {
                if let (Value::List(x), Value::List(y)) = (&a, &b) {
                    self.tick(x.len().min(y.len()) as u64)?;
                }
                Value::Bool(a.equals(&b) == (op == BinOp::Eq))
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let ord = match (&a, &b) {
                    (Value::Int(x), Value::Int(y)) => x.partial_cmp(y),
                    _ => a.num()?.partial_cmp(&b.num()?),
                };
                let Some(ord) = ord else {
                    return Ok(Value::Bool(false));
                };
                Value::Bool(match op {
                    BinOp::Lt => ord.is_lt(),
                    BinOp::Le => ord.is_le(),
                    BinOp::Gt => ord.is_gt(),
                    _ => ord.is_ge(),
                })
            }
            BinOp::Add => match (&a, &b) {
                (Value::List(x), Value::List(y)) => {
                    self.check_len(x.len() + y.len())?;
                    self.tick((x.len() + y.len()) as u64)?;
                    let mut out = Vec::with_capacity(x.len() + y.len());
                    out.extend(x.iter().cloned());
                    out.extend(y.iter().cloned());
                    Value::List(Rc::new(out))
                }
                (Value::Int(x), Value::Int(y)) => Value::Int(x.checked_add(*y).ok_or_else(overflow)?),
                _ => Value::Float(a.num()? + b.num()?),
            },
            BinOp::Sub => match (&a, &b) {
                (Value::Int(x), Value::Int(y)) => Value::Int(x.checked_sub(*y).ok_or_else(overflow)?),
                _ => Value::Float(a.num()? - b.num()?),
            },
            BinOp::Mul => match (&a, &b) {
                (Value::Int(x), Value::Int(y)) => Value::Int(x.checked_mul(*y).ok_or_else(overflow)?),
                _ => Value::Float(a.num()? * b.num()?),
            },
            BinOp::Div | BinOp::Rem => match (&a, &b) {
                (Value::Int(_), Value::Int(0)) => return Err(runtime("division by zero".into())),
                (Value::Int(x), Value::Int(y)) => Value::Int(
                    if op == BinOp::Div { x.checked_div(*y) } else { x.checked_rem(*y) }
                        .ok_or_else(overflow)?,
                ),
                _ => {
                    let (x, y) = (a.num()?, b.num()?);
                    if y == 0.0 {
                        return Err(runtime("division by zero".into()));
                    }
                    Value::Float(if op == BinOp::Div { x / y } else { x % y })
                }
            },
            BinOp::And | BinOp::Or => unreachable!("short-circuit operators handled above"),
        })
    }

    fn parent(&self, v: &Value) -> Result<&Solution, ExecError> {
        match v.int()? {
            0 => Ok(self.ctx.parents.0),
            1 => Ok(self.ctx.parents.1),
            p => Err(runtime(format!("parent index must be 0 or 1, got {p}"))),
        }
    }

    fn route_of(&self, p: &Value, i: &Value) -> Result<&cvrp_core::Route, ExecError> {
        let routes = self.parent(p)?.routes();
        Ok(&routes[index(i, routes.len())?])
    }

    fn location(&self, v: &Value) -> Result<usize, ExecError> {
        index(v, self.inst.num_locations())
    }

    fn clients(&self, v: &Value) -> Result<Vec<usize>, ExecError> {
        v.list()?
            .iter()
            .map(|c| {
                let c = c.int()?;
                if c < 0 || !self.inst.is_client(c as usize) {
                    return Err(runtime(format!("{c} is not a client")));
                }
                Ok(c as usize)
            })
            .collect()
    }

    fn call(&mut self, b: Builtin, args: &[Value]) -> Result<Value, ExecError> {
        let inst = self.inst;
        Ok(match b {
            Builtin::NumRoutes => Value::Int(self.parent(&args[0])?.num_routes() as i64),
            Builtin::RouteLen => Value::Int(self.route_of(&args[0], &args[1])?.len() as i64),
            Builtin::RouteClient => {
                let visits = self.route_of(&args[0], &args[1])?.visits();
                Value::Int(visits[index(&args[2], visits.len())?] as i64)
            }
            Builtin::Route => {
                let visits = self.route_of(&args[0], &args[1])?.visits().to_vec();
                self.tick(visits.len() as u64)?;
                Value::List(Rc::new(visits.into_iter().map(|c| Value::Int(c as i64)).collect()))
            }
            Builtin::RouteAngle => {
                let route = self.route_of(&args[0], &args[1])?;
                Value::Float(route_angle(inst, route).map_err(|e| runtime(e.to_string()))?)
            }
            Builtin::ClientX => Value::Float(inst.coords(self.location(&args[0])?).0),
            Builtin::ClientY => Value::Float(inst.coords(self.location(&args[0])?).1),
            Builtin::Demand => Value::Int(inst.demand(self.location(&args[0])?)),
            Builtin::Capacity => Value::Int(inst.capacity()),
            Builtin::CentroidX => Value::Float(inst.centroid().0),
            Builtin::CentroidY => Value::Float(inst.centroid().1),
            Builtin::NumClients => Value::Int(inst.num_clients() as i64),
            Builtin::NumLocations => Value::Int(inst.num_locations() as i64),
            Builtin::StartA => Value::Int(self.ctx.start_indices.0 as i64),
            Builtin::StartB => Value::Int(self.ctx.start_indices.1 as i64),
            Builtin::NumMoved => Value::Int(self.ctx.num_moved_routes as i64),
            Builtin::PenalizedCost => {
                let routes = args[0].list()?;
                let mut lists = Vec::with_capacity(routes.len());
                for r in routes.iter() {
                    let clients = self.clients(r)?;
                    self.tick(clients.len() as u64)?;
                    lists.push(clients);
                }
                let sol = Solution::new(inst, lists);
                Value::Float(self.cost.penalized_cost(&sol, inst))
            }
            Builtin::EmitRoute => {
                if self.emitted.len() >= self.budget.max_emitted_routes {
                    return Err(ExecError::BudgetExceeded(format!(
                        "route limit of {} reached",
                        self.budget.max_emitted_routes
                    )));
                }
                let clients = self.clients(&args[0])?;
                self.tick(clients.len() as u64)?;
                for &c in &clients {
                    if self.used[c] {
                        return Err(runtime(format!("client {c} emitted twice")));
                    }
                    self.used[c] = true;
                }
                self.emitted.push(clients);
                Value::Int(0)
            }
            Builtin::Abs => match &args[0] {
                Value::Int(v) => Value::Int(
                    v.checked_abs()
                        .ok_or_else(|| runtime("integer overflow".into()))?,
                ),
                v => Value::Float(v.num()?.abs()),
            },
            Builtin::Sqrt => Value::Float(args[0].num()?.sqrt()),
            Builtin::Atan2 => Value::Float(args[0].num()?.atan2(args[1].num()?)),
            Builtin::Floor => {
                let x = args[0].num()?.floor();
                if !x.is_finite() || x.abs() > i64::MAX as f64 {
                    return Err(runtime(format!("cannot convert {x} to an integer")));
                }
                Value::Int(x as i64)
            }
            Builtin::Float => Value::Float(args[0].num()?),
            Builtin::Min | Builtin::Max => match (&args[0], &args[1]) {
                (Value::Int(x), Value::Int(y)) => {
                    Value::Int(if b == Builtin::Min { *x.min(y) } else { *x.max(y) })
                }
                (x, y) => {
                    let (x, y) = (x.num()?, y.num()?);
                    Value::Float(if b == Builtin::Min { x.min(y) } else { x.max(y) })
                }
            },
            Builtin::Len => Value::Int(args[0].list()?.len() as i64),
            Builtin::Fill => {
                let n = args[1].int()?;
                if n < 0 {
                    return Err(runtime(format!("negative length {n}")));
                }
                self.check_len(n as usize)?;
                self.tick(n as u64)?;
                Value::List(Rc::new(vec![args[0].clone(); n as usize]))
            }
            Builtin::Argsort => {
                let items = args[0].list()?;
                self.tick(items.len() as u64)?;
                let keys = items.iter().map(Value::num).collect::<Result<Vec<_>, _>>()?;
                let mut order: Vec<usize> = (0..keys.len()).collect();
                order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]));
                Value::List(Rc::new(order.into_iter().map(|i| Value::Int(i as i64)).collect()))
            }
            Builtin::Rand => Value::Float(self.ctx.rng.gen::<f64>()),
            Builtin::RandInt => {
                let (lo, hi) = (args[0].int()?, args[1].int()?);
                if lo >= hi {
                    return Err(runtime(format!("empty range {lo}..{hi}")));
                }
                Value::Int(self.ctx.rng.gen_range(lo..hi))
            }
            Builtin::Push => unreachable!("push is resolved to its own node"),
        })
    }
}
