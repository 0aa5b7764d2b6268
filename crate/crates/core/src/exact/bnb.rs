//! Certified branch-and-bound over the error indicators.
//!
//! The SAA objective depends on `θ` only through which draws it
//! misclassifies, and the dual value of each hypothesis is nondecreasing in
//! its set of errors. A node fixes some draws as *correct* and others as
//! *wrong*, each a half-space constraint on `θ`; the rest are free. Free
//! draws that no detector in the node's region can classify correctly are
//! marked as implied errors. The node bound is the objective evaluated with
//! the wrong and implied errors only, which no completion can beat.
//!
//! Each node solves a hinge LP over its region to produce a detector whose
//! true error pattern is an incumbent candidate, then splits the region on a
//! free draw that detector misclassifies. Child LPs are warm-started from the
//! parent's solution.
//!
//! Correctness of a draw is encoded as `⟨ĝ, θ⟩ ≥ margin` and a wrong draw as
//! `⟨ĝ, θ⟩ ≤ −margin`, with `ĝ` the unit feature vector oriented so that
//! positive means correct, over the box `θ ∈ [−1, 1]^{D'}`. Since the
//! objective is scale-free this is exact whenever the optimal detector keeps
//! every draw at a nonzero score, i.e. away from measure-zero ties.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Solution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::Hypothesis;
use crate::numeric::{dot, norm2};
use crate::saa::{indicator_pattern, pattern_value, Pattern, SaaInstance, SaaValue};
use crate::sinkhorn::{minimize_dual, DualOptimum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BnbOptions {
    /// Stop once `upper − lower ≤ tol`.
    pub tol: f64,
    pub max_nodes: Option<usize>,
    pub max_secs: Option<f64>,
    /// Margin that certifies a draw as correctly classified in the LPs.
    pub margin: f64,
    /// Target margin of the hinge terms on free draws.
    pub hinge_target: f64,
    /// At most this many misclassified draws are probed for forced errors per node.
    pub probe_limit: usize,
}

impl Default for BnbOptions {
    fn default() -> Self {
        BnbOptions {
            tol: 1e-6,
            max_nodes: None,
            max_secs: None,
            margin: 1e-7,
            hinge_target: 1.0,
            probe_limit: 1024,
        }
    }
}

/// One line of the solver progress log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressRecord {
    pub time: f64,
    pub nodes: usize,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    /// Unit-norm detector weights (zero when the trivial detector is optimal).
    pub theta: Vec<f64>,
    pub s_star: f64,
    pub duals: [DualOptimum; 2],
    pub pattern: Pattern,
    pub lower_bound: f64,
    pub gap: f64,
    pub node_count: usize,
    pub wall_time: f64,
    /// The budget ran out before the gap closed.
    pub partial: bool,
}

impl ExactSolution {
    pub fn lambda(&self) -> [f64; 2] {
        [self.duals[0].multiplier.lambda(), self.duals[1].multiplier.lambda()]
    }
}

const FREE: u8 = 0;
const CORRECT: u8 = 1;
/// Error implied by the correct set; imposes no constraint of its own.
const ERROR: u8 = 2;
/// Error chosen by branching; constrains `⟨ĝ, θ⟩ ≤ −margin`.
const WRONG: u8 = 3;

/// Draw-level data flattened over both hypotheses.
struct Draws {
    hypothesis: Vec<usize>,
    row: Vec<usize>,
    /// Oriented unit feature; all zeros for zero features.
    dir: Vec<Vec<f64>>,
    /// Per-hypothesis hinge weight `1 / (n_k m)`.
    weight: Vec<f64>,
}

type HingeLp = Rc<(Solution, Vec<minilp::Variable>)>;

/// Open nodes allowed to keep a warm-start LP; bounds memory on large trees.
const WARM_NODES: usize = 256;

struct Node {
    id: u64,
    bound: f64,
    status: Vec<u8>,
    /// Parent's hinge LP and the branching draw, for a warm start.
    warm: Option<(HingeLp, usize)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    /// Reversed so that the max-heap pops the smallest bound, then the oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Search<'a> {
    inst: &'a SaaInstance,
    opts: &'a BnbOptions,
    draws: Draws,
    dim: usize,
    /// Flat index of each hypothesis' first draw.
    first: [usize; 2],
    best_theta: Vec<f64>,
    best: SaaValue,
    best_pattern: Pattern,
}

impl<'a> Search<'a> {
    fn new(inst: &'a SaaInstance, opts: &'a BnbOptions) -> Result<Self> {
        let dim = inst.feature_dim();
        let mut draws = Draws {
            hypothesis: Vec::new(),
            row: Vec::new(),
            dir: Vec::new(),
            weight: Vec::new(),
        };
        for k in Hypothesis::BOTH {
            let block = inst.block(k);
            let w = 1.0 / block.len() as f64;
            for (idx, f) in block.features.iter().enumerate() {
                let norm = block.big_m[idx];
                // Positive ⟨dir, θ⟩ means correct: H1 wants score ≥ 0, H2 wants score < 0.
                let sign = -k.error_sign();
                let dir = if norm > 0.0 {
                    f.iter().map(|v| sign * v / norm).collect()
                } else {
                    vec![0.0; dim]
                };
                draws.hypothesis.push(k.index());
                draws.row.push(idx / block.m);
                draws.dir.push(dir);
                draws.weight.push(w);
            }
        }
        let zero = vec![0.0; dim];
        let best_pattern = indicator_pattern(inst, &zero)?;
        let best = pattern_value(inst, &best_pattern);
        Ok(Search {
            inst,
            opts,
            draws,
            dim,
            first: [0, inst.blocks[0].len()],
            best_theta: zero,
            best,
            best_pattern,
        })
    }

    fn root_status(&self) -> Vec<u8> {
        self.draws
            .dir
            .iter()
            .zip(&self.draws.hypothesis)
            .map(|(d, &k)| {
                if d.iter().all(|&v| v == 0.0) {
                    // Zero features score 0: always correct under H1, always an error under H2.
                    if k == 0 {
                        CORRECT
                    } else {
                        ERROR
                    }
                } else {
                    FREE
                }
            })
            .collect()
    }

    fn is_locked_zero(&self, b: usize) -> bool {
        self.draws.dir[b].iter().all(|&v| v == 0.0)
    }

    /// Objective with exactly the fixed errors.
    fn bound(&self, status: &[u8]) -> f64 {
        let mut counts = [
            vec![0usize; self.inst.blocks[0].n()],
            vec![0usize; self.inst.blocks[1].n()],
        ];
        for (b, &st) in status.iter().enumerate() {
            if st == ERROR || st == WRONG {
                counts[self.draws.hypothesis[b]][self.draws.row[b]] += 1;
            }
        }
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            let m = self.inst.blocks[k].m as f64;
            let q: Vec<f64> = counts[k].iter().map(|&c| c as f64 / m).collect();
            worst = worst.max(minimize_dual(&self.inst.balls[k], &q).value);
        }
        worst
    }

    fn expr(&self, b: usize, vars: &[minilp::Variable]) -> LinearExpr {
        let mut e = LinearExpr::empty();
        for (l, &g) in self.draws.dir[b].iter().enumerate() {
            if g != 0.0 {
                e.add(vars[l], g);
            }
        }
        e
    }

    /// Feasibility LP over the branching constraints alone, used for probing.
    fn fixed_lp(&self, status: &[u8]) -> Option<(Solution, Vec<minilp::Variable>)> {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<minilp::Variable> = (0..self.dim).map(|_| p.add_var(0.0, (-1.0, 1.0))).collect();
        for (b, &st) in status.iter().enumerate() {
            if self.is_locked_zero(b) {
                continue;
            }
            match st {
                CORRECT => p.add_constraint(self.expr(b, &vars), ComparisonOp::Ge, self.opts.margin),
                WRONG => p.add_constraint(self.expr(b, &vars), ComparisonOp::Le, -self.opts.margin),
                _ => {}
            }
        }
        p.solve().ok().map(|sol| (sol, vars))
    }

    /// Hinge LP: branching constraints plus penalized margin shortfalls on free draws.
    fn solve_lp(&self, status: &[u8], warm: Option<(HingeLp, usize)>) -> Option<(Vec<f64>, HingeLp)> {
        if let Some((parent, b)) = warm {
            let (op, rhs) = match status[b] {
                CORRECT => (ComparisonOp::Ge, self.opts.margin),
                _ => (ComparisonOp::Le, -self.opts.margin),
            };
            let vars = parent.1.clone();
            let sol = parent.0.clone().add_constraint(self.expr(b, &vars), op, rhs).ok()?;
            let theta = vars.iter().map(|&v| *sol.var_value(v)).collect();
            return Some((theta, Rc::new((sol, vars))));
        }
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<minilp::Variable> = (0..self.dim).map(|_| p.add_var(0.0, (-1.0, 1.0))).collect();
        for (b, &st) in status.iter().enumerate() {
            if self.is_locked_zero(b) {
                continue;
            }
            match st {
                CORRECT => p.add_constraint(self.expr(b, &vars), ComparisonOp::Ge, self.opts.margin),
                WRONG => p.add_constraint(self.expr(b, &vars), ComparisonOp::Le, -self.opts.margin),
                FREE => {
                    let slack = p.add_var(self.draws.weight[b], (0.0, f64::INFINITY));
                    let mut e = self.expr(b, &vars);
                    e.add(slack, 1.0);
                    p.add_constraint(e, ComparisonOp::Ge, self.opts.hinge_target);
                }
                _ => {}
            }
        }
        let sol = p.solve().ok()?;
        let theta = vars.iter().map(|&v| *sol.var_value(v)).collect();
        Some((theta, Rc::new((sol, vars))))
    }

    /// Re-centers the incumbent: among detectors classifying the incumbent's
    /// correct draws correctly, picks the one with the largest worst-case margin.
    fn widen_margin(&mut self) -> Result<()> {
        if norm2(&self.best_theta) == 0.0 {
            return Ok(());
        }
        let mut p = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<minilp::Variable> = (0..self.dim).map(|_| p.add_var(0.0, (-1.0, 1.0))).collect();
        let margin = p.add_var(1.0, (f64::NEG_INFINITY, 1.0));
        let mut rows = 0;
        for b in 0..self.draws.dir.len() {
            let (k, idx) = (self.draws.hypothesis[b], b - self.first[self.draws.hypothesis[b]]);
            let block = &self.inst.blocks[k];
            if self.is_locked_zero(b) || self.best_pattern[k][idx / block.m][idx % block.m] {
                continue;
            }
            let mut e = self.expr(b, &vars);
            e.add(margin, -1.0);
            p.add_constraint(e, ComparisonOp::Ge, 0.0);
            rows += 1;
        }
        if rows == 0 {
            return Ok(());
        }
        if let Ok(solution) = p.solve() {
            if solution.objective() > self.opts.margin {
                let theta: Vec<f64> = vars.iter().map(|&v| *solution.var_value(v)).collect();
                self.consider_tied(&theta)?;
            }
        }
        Ok(())
    }

    /// Like [`Self::consider`], but also accepts ties.
    fn consider_tied(&mut self, theta: &[f64]) -> Result<()> {
        let norm = norm2(theta);
        if !(norm > 0.0) {
            return Ok(());
        }
        let unit: Vec<f64> = theta.iter().map(|v| v / norm).collect();
        let pattern = indicator_pattern(self.inst, &unit)?;
        let value = pattern_value(self.inst, &pattern);
        if value.s_hat <= self.best.s_hat {
            self.best = value;
            self.best_theta = unit;
            self.best_pattern = pattern;
        }
        Ok(())
    }

    fn consider(&mut self, theta: &[f64]) -> Result<()> {
        let norm = norm2(theta);
        if !(norm > 0.0) {
            return Ok(());
        }
        let unit: Vec<f64> = theta.iter().map(|v| v / norm).collect();
        let pattern = indicator_pattern(self.inst, &unit)?;
        let value = pattern_value(self.inst, &pattern);
        if value.s_hat < self.best.s_hat {
            self.best = value;
            self.best_theta = unit;
            self.best_pattern = pattern;
        }
        Ok(())
    }
}

/// Solves the SAA problem to within `opts.tol`, or returns the incumbent
/// flagged `partial` when a budget runs out.
pub fn solve_bnb(inst: &SaaInstance, opts: &BnbOptions) -> Result<ExactSolution> {
    solve_bnb_logged(inst, opts, |_| {})
}

/// As [`solve_bnb`], reporting progress whenever the incumbent improves,
/// every 256 nodes, and at termination.
pub fn solve_bnb_logged<L: FnMut(&ProgressRecord)>(
    inst: &SaaInstance,
    opts: &BnbOptions,
    mut log: L,
) -> Result<ExactSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::Argument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let start = Instant::now();
    let mut search = Search::new(inst, opts)?;
    let mut heap = BinaryHeap::new();
    let root = search.root_status();
    heap.push(Node {
        id: 0,
        bound: search.bound(&root),
        status: root,
        warm: None,
    });
    let mut next_id = 1u64;
    let mut warm_open = 0usize;
    let mut nodes = 0usize;
    // Smallest bound among nodes closed within tolerance of the incumbent.
    let mut closed_lower = f64::INFINITY;
    let mut partial = false;

    let record = |nodes: usize, lower: f64, upper: f64| ProgressRecord {
        time: start.elapsed().as_secs_f64(),
        nodes,
        lower,
        upper,
        gap: (upper - lower).max(0.0),
    };

    while let Some(node) = heap.peek() {
        let upper = search.best.s_hat;
        if node.bound >= upper - opts.tol {
            closed_lower = closed_lower.min(node.bound);
            break;
        }
        if opts.max_nodes.is_some_and(|cap| nodes >= cap)
            || opts.max_secs.is_some_and(|cap| start.elapsed().as_secs_f64() >= cap)
        {
            partial = true;
            break;
        }
        let mut node = heap.pop().expect("peeked");
        nodes += 1;

        if node.warm.is_some() {
            warm_open -= 1;
        }
        let (theta, hinge) = match search.solve_lp(&node.status, node.warm.take()) {
            Some(lp) => lp,
            None => continue,
        };
        let before = search.best.s_hat;
        search.consider(&theta)?;

        let mut violated: Vec<(f64, usize)> = node
            .status
            .iter()
            .enumerate()
            .filter(|&(_, &st)| st == FREE)
            .map(|(b, _)| (dot(&search.draws.dir[b], &theta), b))
            .filter(|&(margin, _)| margin < opts.margin)
            .collect();
        violated.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // Draws that cannot be made correct within the node's region are errors.
        // Any detector found feasible along the way certifies further draws for free.
        let (fixed, fixed_vars) = match search.fixed_lp(&node.status) {
            Some(lp) => lp,
            None => continue,
        };
        let mut witnesses: Vec<Vec<f64>> = vec![theta.clone()];
        let mut candidates = Vec::new();
        for (rank, &(_, b)) in violated.iter().enumerate() {
            let dir = &search.draws.dir[b];
            if rank < opts.probe_limit && !witnesses.iter().any(|w| dot(dir, w) >= opts.margin) {
                match fixed
                    .clone()
                    .add_constraint(search.expr(b, &fixed_vars), ComparisonOp::Ge, opts.margin)
                {
                    Err(_) => {
                        node.status[b] = ERROR;
                        continue;
                    }
                    Ok(sol) => witnesses.push(fixed_vars.iter().map(|&v| *sol.var_value(v)).collect()),
                }
            }
            candidates.push(b);
        }
        node.bound = node.bound.max(search.bound(&node.status));

        let upper = search.best.s_hat;
        if upper < before {
            let lower = heap.peek().map_or(node.bound, |n| n.bound.min(node.bound)).min(closed_lower);
            log(&record(nodes, lower.min(upper), upper));
        } else if nodes % 256 == 0 {
            let lower = heap.peek().map_or(node.bound, |n| n.bound.min(node.bound)).min(closed_lower);
            log(&record(nodes, lower.min(upper), upper));
        }
        if node.bound >= upper - opts.tol || candidates.is_empty() {
            closed_lower = closed_lower.min(node.bound.min(upper));
            continue;
        }

        // Branch on the draw whose error branch raises the bound most.
        let mut pick = candidates[0];
        let mut pick_bound = f64::NEG_INFINITY;
        for &b in candidates.iter().take(16) {
            node.status[b] = ERROR;
            let v = search.bound(&node.status);
            node.status[b] = FREE;
            if v > pick_bound {
                pick_bound = v;
                pick = b;
            }
        }
        let mut err_status = node.status.clone();
        err_status[pick] = WRONG;
        let mut ok_status = node.status;
        ok_status[pick] = CORRECT;
        let mut warm = |lp: HingeLp| {
            (warm_open < WARM_NODES).then(|| {
                warm_open += 1;
                (lp, pick)
            })
        };
        let ok_warm = warm(hinge.clone());
        let err_warm = warm(hinge);
        heap.push(Node {
            id: next_id,
            bound: node.bound,
            status: ok_status,
            warm: ok_warm,
        });
        heap.push(Node {
            id: next_id + 1,
            bound: pick_bound.max(node.bound),
            status: err_status,
            warm: err_warm,
        });
        next_id += 2;
    }

    search.widen_margin()?;
    let upper = search.best.s_hat;
    let open_lower = heap.peek().map_or(f64::INFINITY, |n| n.bound);
    let lower = if partial {
        open_lower.min(closed_lower).min(upper)
    } else {
        closed_lower.min(upper)
    };
    let final_record = record(nodes, lower, upper);
    log(&final_record);
    Ok(ExactSolution {
        theta: search.best_theta,
        s_star: upper,
        duals: search.best.duals,
        pattern: search.best_pattern,
        lower_bound: lower,
        gap: final_record.gap,
        node_count: nodes,
        wall_time: final_record.time,
        partial,
    })
}
