//! The mixed-integer exponential-conic model of the SAA problem and its text formats.
//!
//! Variables are laid out as `s, λ_1, λ_2, θ_1..θ_D'`, then for each
//! hypothesis `t_i`, `a_ij`, `z_ij`. The model reads
//!
//! ```text
//! min s
//!   λ_k ρ̄_k + (1/n_k) Σ_i t_i^k ≤ s
//!   (1/m) Σ_j a_ij^k ≤ ε_k λ_k
//!   (ε_k λ_k, a_ij^k, z_ij^k − t_i^k) ∈ K_exp
//!   (−1)^k ⟨θ, F_ij^k⟩ ≤ M_ij^k z_ij^k
//!   ‖θ‖₂ ≤ 1,  s ∈ [0, 1],  λ_k ≥ 0,  a ≥ 0,  z ∈ {0, 1}
//! ```
//!
//! with `K_exp = closure{(ν, μ, δ) : ν > 0, ν e^{δ/ν} ≤ μ}`. The big-M row lets
//! `z` fall to 0 only on correctly classified draws.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::saa::SaaInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
}

/// `constant + Σ coef · x[index]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AffineExpr {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl AffineExpr {
    pub fn var(index: usize, coef: f64) -> Self {
        AffineExpr {
            constant: 0.0,
            terms: vec![(index, coef)],
        }
    }

    pub fn constant(value: f64) -> Self {
        AffineExpr {
            constant: value,
            terms: Vec::new(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn tag(self) -> &'static str {
        match self {
            Sense::Le => "LE",
            Sense::Ge => "GE",
            Sense::Eq => "EQ",
        }
    }
}

/// `expr (sense) rhs`; `expr.constant` is always zero for rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub expr: AffineExpr,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cone {
    /// `(ν, μ, δ)` with `ν e^{δ/ν} ≤ μ`.
    Exp([AffineExpr; 3]),
    /// `first ≥ ‖rest‖₂`.
    Soc(Vec<AffineExpr>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub n: [usize; 2],
    pub m: usize,
    pub feature_dim: usize,
    pub epsilon: [f64; 2],
    pub rho_bar: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiecpModel {
    pub header: ModelHeader,
    pub vars: Vec<Variable>,
    /// Minimized.
    pub objective: AffineExpr,
    pub rows: Vec<LinearRow>,
    pub cones: Vec<Cone>,
}

/// Index arithmetic for the variable layout.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    n: [usize; 2],
    m: usize,
    dim: usize,
}

impl Layout {
    pub fn new(header: &ModelHeader) -> Self {
        Layout {
            n: header.n,
            m: header.m,
            dim: header.feature_dim,
        }
    }

    pub fn s(&self) -> usize {
        0
    }

    pub fn lambda(&self, k: usize) -> usize {
        1 + k
    }

    pub fn theta(&self, l: usize) -> usize {
        3 + l
    }

    fn block_start(&self, k: usize) -> usize {
        let first = 3 + self.dim;
        if k == 0 {
            first
        } else {
            first + self.n[0] * (1 + 2 * self.m)
        }
    }

    pub fn t(&self, k: usize, i: usize) -> usize {
        self.block_start(k) + i
    }

    pub fn a(&self, k: usize, i: usize, j: usize) -> usize {
        self.block_start(k) + self.n[k] + i * self.m + j
    }

    pub fn z(&self, k: usize, i: usize, j: usize) -> usize {
        self.block_start(k) + self.n[k] + self.n[k] * self.m + i * self.m + j
    }

    pub fn num_vars(&self) -> usize {
        self.block_start(1) + self.n[1] * (1 + 2 * self.m)
    }
}

/// Builds the mixed-integer conic model of the instance's SAA problem.
pub fn build_miecp(inst: &SaaInstance) -> MiecpModel {
    let header = ModelHeader {
        n: [inst.blocks[0].n(), inst.blocks[1].n()],
        m: inst.blocks[0].m,
        feature_dim: inst.feature_dim(),
        epsilon: [inst.balls[0].epsilon, inst.balls[1].epsilon],
        rho_bar: [inst.balls[0].rho_bar, inst.balls[1].rho_bar],
    };
    let lay = Layout::new(&header);
    let inf = f64::INFINITY;
    let mut vars = vec![
        Variable {
            name: "s".into(),
            lower: 0.0,
            upper: 1.0,
            kind: VarKind::Continuous,
        },
    ];
    for k in 0..2 {
        vars.push(Variable {
            name: format!("lambda{}", k + 1),
            lower: 0.0,
            upper: inf,
            kind: VarKind::Continuous,
        });
    }
    for l in 0..header.feature_dim {
        vars.push(Variable {
            name: format!("theta{}", l + 1),
            lower: -inf,
            upper: inf,
            kind: VarKind::Continuous,
        });
    }
    for k in 0..2 {
        let n = header.n[k];
        let m = header.m;
        for i in 0..n {
            vars.push(Variable {
                name: format!("t{}_{}", k + 1, i + 1),
                lower: -inf,
                upper: inf,
                kind: VarKind::Continuous,
            });
        }
        for i in 0..n {
            for j in 0..m {
                vars.push(Variable {
                    name: format!("a{}_{}_{}", k + 1, i + 1, j + 1),
                    lower: 0.0,
                    upper: inf,
                    kind: VarKind::Continuous,
                });
            }
        }
        for i in 0..n {
            for j in 0..m {
                vars.push(Variable {
                    name: format!("z{}_{}_{}", k + 1, i + 1, j + 1),
                    lower: 0.0,
                    upper: 1.0,
                    kind: VarKind::Binary,
                });
            }
        }
    }
    debug_assert_eq!(vars.len(), lay.num_vars());

    let mut rows = Vec::new();
    let mut cones = Vec::new();
    for k in 0..2 {
        let n = header.n[k];
        let m = header.m;
        let eps = header.epsilon[k];
        let block = &inst.blocks[k];
        let sign = if k == 0 { -1.0 } else { 1.0 };

        let mut budget = vec![(lay.lambda(k), header.rho_bar[k])];
        budget.extend((0..n).map(|i| (lay.t(k, i), 1.0 / n as f64)));
        budget.push((lay.s(), -1.0));
        rows.push(LinearRow {
            expr: AffineExpr {
                constant: 0.0,
                terms: budget,
            },
            sense: Sense::Le,
            rhs: 0.0,
        });

        for i in 0..n {
            let mut mean = vec![(lay.lambda(k), -eps)];
            mean.extend((0..m).map(|j| (lay.a(k, i, j), 1.0 / m as f64)));
            rows.push(LinearRow {
                expr: AffineExpr {
                    constant: 0.0,
                    terms: mean,
                },
                sense: Sense::Le,
                rhs: 0.0,
            });
        }

        for i in 0..n {
            for j in 0..m {
                let mut link: Vec<(usize, f64)> = block
                    .feature(i, j)
                    .iter()
                    .enumerate()
                    .map(|(l, &f)| (lay.theta(l), sign * f))
                    .collect();
                link.push((lay.z(k, i, j), -block.big_m[i * m + j]));
                rows.push(LinearRow {
                    expr: AffineExpr {
                        constant: 0.0,
                        terms: link,
                    },
                    sense: Sense::Le,
                    rhs: 0.0,
                });
                cones.push(Cone::Exp([
                    AffineExpr::var(lay.lambda(k), eps),
                    AffineExpr::var(lay.a(k, i, j), 1.0),
                    AffineExpr {
                        constant: 0.0,
                        terms: vec![(lay.z(k, i, j), 1.0), (lay.t(k, i), -1.0)],
                    },
                ]));
            }
        }
    }
    let mut soc = vec![AffineExpr::constant(1.0)];
    soc.extend((0..header.feature_dim).map(|l| AffineExpr::var(lay.theta(l), 1.0)));
    cones.push(Cone::Soc(soc));

    MiecpModel {
        header,
        vars,
        objective: AffineExpr::var(0, 1.0),
        rows,
        cones,
    }
}

impl MiecpModel {
    pub fn layout(&self) -> Layout {
        Layout::new(&self.header)
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn num_exp_cones(&self) -> usize {
        self.cones.iter().filter(|c| matches!(c, Cone::Exp(_))).count()
    }

    /// Largest violation of bounds, rows, integrality and cones at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xv) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xv).max(xv - v.upper);
            if v.kind == VarKind::Binary {
                worst = worst.max(xv.min(1.0 - xv).abs());
            }
        }
        for r in &self.rows {
            let lhs = r.expr.eval(x);
            let viol = match r.sense {
                Sense::Le => lhs - r.rhs,
                Sense::Ge => r.rhs - lhs,
                Sense::Eq => (lhs - r.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        for c in &self.cones {
            let viol = match c {
                Cone::Exp([nu, mu, delta]) => {
                    let (nu, mu, delta) = (nu.eval(x), mu.eval(x), delta.eval(x));
                    if nu > 0.0 {
                        (nu * (delta / nu).exp() - mu).max(0.0)
                    } else {
                        // closure at ν = 0: μ ≥ 0 and δ ≤ 0
                        (-nu).max(-mu).max(delta).max(0.0)
                    }
                }
                Cone::Soc(parts) => {
                    let head = parts[0].eval(x);
                    let tail: f64 = parts[1..].iter().map(|p| p.eval(x).powi(2)).sum::<f64>().sqrt();
                    (tail - head).max(0.0)
                }
            };
            worst = worst.max(viol);
        }
        worst
    }
}

/// Output layouts for [`export_model`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    NativeText,
    Cbf,
}

/// Writes the model in the requested text format.
pub fn export_model<W: Write>(model: &MiecpModel, format: ExportFormat, mut out: W) -> std::io::Result<()> {
    let text = match format {
        ExportFormat::NativeText => to_native(model),
        ExportFormat::Cbf => to_cbf(model),
    };
    out.write_all(text.as_bytes())
}

/// Writes the model to `path`, reporting failures with the path.
pub fn export_model_to_path(model: &MiecpModel, format: ExportFormat, path: &std::path::Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    export_model(model, format, std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // `{:?}` is the shortest representation that parses back exactly.
        format!("{v:?}")
    }
}

fn write_expr(out: &mut String, e: &AffineExpr) {
    write!(out, "{} {}", fmt_f64(e.constant), e.terms.len()).unwrap();
    for &(i, c) in &e.terms {
        write!(out, " {} {}", i, fmt_f64(c)).unwrap();
    }
}

fn to_native(model: &MiecpModel) -> String {
    let h = &model.header;
    let mut out = String::new();
    out.push_str("MIECP 1\n");
    writeln!(out, "DIMS {} {} {} {}", h.n[0], h.n[1], h.m, h.feature_dim).unwrap();
    writeln!(out, "EPSILON {} {}", fmt_f64(h.epsilon[0]), fmt_f64(h.epsilon[1])).unwrap();
    writeln!(out, "RHOBAR {} {}", fmt_f64(h.rho_bar[0]), fmt_f64(h.rho_bar[1])).unwrap();
    for v in &model.vars {
        let kind = match v.kind {
            VarKind::Continuous => "C",
            VarKind::Binary => "B",
        };
        writeln!(out, "VAR {} {} {} {}", v.name, fmt_f64(v.lower), fmt_f64(v.upper), kind).unwrap();
    }
    out.push_str("OBJ ");
    write_expr(&mut out, &model.objective);
    out.push('\n');
    for r in &model.rows {
        write!(out, "ROW {} {} ", r.sense.tag(), fmt_f64(r.rhs)).unwrap();
        write_expr(&mut out, &r.expr);
        out.push('\n');
    }
    for c in &model.cones {
        let (tag, parts): (&str, &[AffineExpr]) = match c {
            Cone::Exp(p) => ("EXP", p),
            Cone::Soc(p) => ("SOC", p),
        };
        out.push_str(tag);
        for (idx, p) in parts.iter().enumerate() {
            out.push_str(if idx == 0 { " " } else { " ; " });
            write_expr(&mut out, p);
        }
        out.push('\n');
    }
    out.push_str("END\n");
    out
}

/// Parses the native text format back into a model.
pub fn parse_native(text: &str) -> Result<MiecpModel> {
    let mut header: Option<ModelHeader> = None;
    let mut dims: Option<([usize; 2], usize, usize)> = None;
    let mut eps: Option<[f64; 2]> = None;
    let mut rho: Option<[f64; 2]> = None;
    let mut vars = Vec::new();
    let mut objective = None;
    let mut rows = Vec::new();
    let mut cones = Vec::new();
    let mut saw_magic = false;
    let mut saw_end = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tok = line.split_whitespace();
        let key = tok.next().unwrap();
        let rest: Vec<&str> = tok.collect();
        match key {
            "MIECP" => {
                if rest != ["1"] {
                    return Err(err(format!("unsupported version {rest:?}")));
                }
                saw_magic = true;
            }
            "DIMS" => {
                let v = parse_all::<usize>(&rest, 4).map_err(err)?;
                dims = Some(([v[0], v[1]], v[2], v[3]));
            }
            "EPSILON" => {
                let v = parse_all::<f64>(&rest, 2).map_err(err)?;
                eps = Some([v[0], v[1]]);
            }
            "RHOBAR" => {
                let v = parse_all::<f64>(&rest, 2).map_err(err)?;
                rho = Some([v[0], v[1]]);
            }
            "VAR" => {
                if rest.len() != 4 {
                    return Err(err("VAR needs name, lower, upper, kind".into()));
                }
                let kind = match rest[3] {
                    "C" => VarKind::Continuous,
                    "B" => VarKind::Binary,
                    other => return Err(err(format!("unknown variable kind {other}"))),
                };
                vars.push(Variable {
                    name: rest[0].to_string(),
                    lower: parse_num(rest[1]).map_err(err)?,
                    upper: parse_num(rest[2]).map_err(err)?,
                    kind,
                });
            }
            "OBJ" => {
                let (e, used) = parse_expr(&rest).map_err(err)?;
                if used != rest.len() {
                    return Err(err("trailing tokens after objective".into()));
                }
                objective = Some(e);
            }
            "ROW" => {
                if rest.len() < 2 {
                    return Err(err("ROW needs sense and rhs".into()));
                }
                let sense = match rest[0] {
                    "LE" => Sense::Le,
                    "GE" => Sense::Ge,
                    "EQ" => Sense::Eq,
                    other => return Err(err(format!("unknown sense {other}"))),
                };
                let rhs = parse_num(rest[1]).map_err(err)?;
                let (expr, used) = parse_expr(&rest[2..]).map_err(err)?;
                if used != rest.len() - 2 {
                    return Err(err("trailing tokens after row".into()));
                }
                rows.push(LinearRow { expr, sense, rhs });
            }
            "EXP" | "SOC" => {
                let parts = rest
                    .split(|t| *t == ";")
                    .map(|chunk| {
                        let (e, used) = parse_expr(chunk)?;
                        if used != chunk.len() {
                            return Err("trailing tokens in cone part".to_string());
                        }
                        Ok(e)
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(err)?;
                if key == "EXP" {
                    let parts: [AffineExpr; 3] = parts
                        .try_into()
                        .map_err(|_| err("EXP needs exactly three parts".into()))?;
                    cones.push(Cone::Exp(parts));
                } else {
                    if parts.is_empty() {
                        return Err(err("SOC needs at least one part".into()));
                    }
                    cones.push(Cone::Soc(parts));
                }
            }
            "END" => saw_end = true,
            other => return Err(err(format!("unknown record {other}"))),
        }
        if let (None, Some((n, m, d)), Some(e), Some(r)) = (&header, dims, eps, rho) {
            header = Some(ModelHeader {
                n,
                m,
                feature_dim: d,
                epsilon: e,
                rho_bar: r,
            });
        }
    }
    let last = text.lines().count();
    let missing = |what: &str| Error::Parse {
        line: last,
        msg: format!("missing {what}"),
    };
    if !saw_magic {
        return Err(missing("MIECP version line"));
    }
    if !saw_end {
        return Err(missing("END"));
    }
    let header = header.ok_or_else(|| missing("DIMS/EPSILON/RHOBAR header"))?;
    let model = MiecpModel {
        header,
        vars,
        objective: objective.ok_or_else(|| missing("OBJ"))?,
        rows,
        cones,
    };
    let nv = model.vars.len();
    let in_range = |e: &AffineExpr| e.terms.iter().all(|&(i, _)| i < nv);
    let ok = in_range(&model.objective)
        && model.rows.iter().all(|r| in_range(&r.expr))
        && model.cones.iter().all(|c| match c {
            Cone::Exp(p) => p.iter().all(in_range),
            Cone::Soc(p) => p.iter().all(in_range),
        });
    if !ok {
        return Err(Error::Parse {
            line: last,
            msg: "variable index out of range".into(),
        });
    }
    Ok(model)
}

fn parse_num(s: &str) -> std::result::Result<f64, String> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}")),
    }
}

fn parse_all<T: std::str::FromStr>(toks: &[&str], count: usize) -> std::result::Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    if toks.len() != count {
        return Err(format!("expected {count} values, got {}", toks.len()));
    }
    toks.iter()
        .map(|t| t.parse::<T>().map_err(|e| format!("bad value {t:?}: {e}")))
        .collect()
}

/// Parses `constant count (index coef)*`, returning the tokens consumed.
fn parse_expr(toks: &[&str]) -> std::result::Result<(AffineExpr, usize), String> {
    if toks.len() < 2 {
        return Err("expression needs a constant and a term count".into());
    }
    let constant = parse_num(toks[0])?;
    let count: usize = toks[1].parse().map_err(|e| format!("bad term count: {e}"))?;
    if toks.len() < 2 + 2 * count {
        return Err(format!("expression declares {count} terms but is truncated"));
    }
    let mut terms = Vec::with_capacity(count);
    for t in 0..count {
        let i: usize = toks[2 + 2 * t].parse().map_err(|e| format!("bad index: {e}"))?;
        let c = parse_num(toks[3 + 2 * t])?;
        terms.push((i, c));
    }
    Ok((AffineExpr { constant, terms }, 2 + 2 * count))
}

/// Conic Benchmark Format (version 3). All variables are declared free; bounds
/// become `L+`/`L-` rows so that every constraint has the form `A x + b ∈ K`.
fn to_cbf(model: &MiecpModel) -> String {
    // Each constraint block: (domain, rows of (terms, constant)).
    type Row = (Vec<(usize, f64)>, f64);
    let mut nonneg: Vec<Row> = Vec::new();
    let mut nonpos: Vec<Row> = Vec::new();
    let mut zero: Vec<Row> = Vec::new();
    for (i, v) in model.vars.iter().enumerate() {
        if v.lower.is_finite() {
            nonneg.push((vec![(i, 1.0)], -v.lower));
        }
        if v.upper.is_finite() {
            nonpos.push((vec![(i, 1.0)], -v.upper));
        }
    }
    for r in &model.rows {
        let row = (r.expr.terms.clone(), r.expr.constant - r.rhs);
        match r.sense {
            Sense::Le => nonpos.push(row),
            Sense::Ge => nonneg.push(row),
            Sense::Eq => zero.push(row),
        }
    }
    let mut blocks: Vec<(String, Vec<Row>)> = Vec::new();
    for (tag, rows) in [("L+", nonneg), ("L-", nonpos), ("L=", zero)] {
        if !rows.is_empty() {
            blocks.push((format!("{tag} {}", rows.len()), rows));
        }
    }
    for c in &model.cones {
        match c {
            // CBF orders the exponential cone as (μ, ν, δ): x1 ≥ x2 exp(x3 / x2).
            Cone::Exp([nu, mu, delta]) => blocks.push((
                "EXP 3".into(),
                [mu, nu, delta].iter().map(|e| (e.terms.clone(), e.constant)).collect(),
            )),
            Cone::Soc(parts) => blocks.push((
                format!("Q {}", parts.len()),
                parts.iter().map(|e| (e.terms.clone(), e.constant)).collect(),
            )),
        }
    }

    let mut out = String::new();
    out.push_str("# mixed-integer exponential-cone model of a robust detector\n");
    out.push_str("VER\n3\n\nOBJSENSE\nMIN\n\n");
    writeln!(out, "VAR\n{} 1\nF {}\n", model.vars.len(), model.vars.len()).unwrap();
    let ints: Vec<usize> = (0..model.vars.len())
        .filter(|&i| model.vars[i].kind == VarKind::Binary)
        .collect();
    if !ints.is_empty() {
        writeln!(out, "INT\n{}", ints.len()).unwrap();
        for i in &ints {
            writeln!(out, "{i}").unwrap();
        }
        out.push('\n');
    }
    let total_rows: usize = blocks.iter().map(|b| b.1.len()).sum();
    writeln!(out, "CON\n{} {}", total_rows, blocks.len()).unwrap();
    for (dom, _) in &blocks {
        writeln!(out, "{dom}").unwrap();
    }
    out.push('\n');

    let obj: Vec<_> = model.objective.terms.iter().filter(|t| t.1 != 0.0).collect();
    writeln!(out, "OBJACOORD\n{}", obj.len()).unwrap();
    for &&(j, c) in &obj {
        writeln!(out, "{j} {}", fmt_f64(c)).unwrap();
    }
    out.push('\n');
    if model.objective.constant != 0.0 {
        writeln!(out, "OBJBCOORD\n{}\n", fmt_f64(model.objective.constant)).unwrap();
    }

    let mut a = String::new();
    let mut b = String::new();
    let (mut na, mut nb) = (0, 0);
    let mut row = 0;
    for (_, rows) in &blocks {
        for (terms, constant) in rows {
            for &(j, c) in terms {
                if c != 0.0 {
                    writeln!(a, "{row} {j} {}", fmt_f64(c)).unwrap();
                    na += 1;
                }
            }
            if *constant != 0.0 {
                writeln!(b, "{row} {}", fmt_f64(*constant)).unwrap();
                nb += 1;
            }
            row += 1;
        }
    }
    writeln!(out, "ACOORD\n{na}").unwrap();
    out.push_str(&a);
    out.push('\n');
    writeln!(out, "BCOORD\n{nb}").unwrap();
    out.push_str(&b);
    out
}
