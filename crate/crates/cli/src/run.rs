use std::fmt;

use num_rational::BigRational;
use plegma_core::famkit::{check_regular_properties, rank, tree_rank, FamilySpec, FinSet, IndexSet};
use plegma_core::plegma::{enum_bl, enum_plm, ramsey_search_bl, ramsey_search_plm, Coloring, SearchVerdict};
use plegma_core::poset::{
    chains_and_antichains, sandwich_check, scaled_domination_check, weighted_upper_check, DominationParams,
    InequalityReport, OrderReport, SMHandle,
};
use plegma_core::smodel::{
    build_join, build_weighted_join, check_joint_stability, check_suppression, extract_joint, extract_sm,
    join_estimates, spreading_check, subordination_check, FSeqRule, Grid, SMEstimate,
};
use plegma_core::spaces::{NormOracle, Scalar, Vector};
use plegma_core::Error;
use serde_json::{json, Value};

use crate::args::*;
use crate::report::{Failure, Outcome, Table};

/// Why a run could not produce a report.
#[derive(Debug)]
pub enum RunError {
    /// Bad input; exit code 1.
    Usage(String),
    /// The computation itself failed.
    Core(Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Usage(m) => write!(f, "usage error: {m}"),
            RunError::Core(Error::Parse { pos, msg }) => write!(f, "usage error at position {pos}: {msg}"),
            RunError::Core(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Core(e)
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Reads `@path` arguments.
pub fn load(path: &str) -> plegma_core::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// Prefixes parse errors with the flag they came from.
fn flag<T>(name: &str, r: plegma_core::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { pos, msg } => RunError::Usage(format!("--{name} at position {pos}: {msg}")),
        other => RunError::Core(other),
    })
}

fn family(s: &str) -> Result<FamilySpec> {
    flag("family", FamilySpec::parse_with(s, &load))
}

fn index_set(s: &str) -> Result<IndexSet> {
    flag("index-set", s.parse())
}

fn oracle(name: &str, s: &str) -> Result<NormOracle> {
    flag(name, s.parse())
}

fn rules(m: &ModelArgs) -> Result<Vec<FSeqRule>> {
    let host = oracle("host", &m.host)?;
    m.rules.iter().map(|r| flag("rule", FSeqRule::parse_with(r, host.clone(), &load))).collect()
}

fn grid(g: &GridArgs) -> Result<Grid> {
    match g.grid.as_str() {
        "standard" => Ok(Grid::standard(g.k, g.grid_seed)),
        other => match other.strip_prefix("sampled:").map(str::parse::<usize>) {
            Some(Ok(n)) if n > 0 => Ok(Grid::sampled(g.k, n, g.grid_seed)),
            _ => Err(RunError::Usage(format!("--grid at position 0: expected `standard` or `sampled:N`, got `{other}`"))),
        },
    }
}

fn rational(name: &str, s: &str) -> Result<BigRational> {
    flag(name, Scalar::parse_rational(s.trim()))
}

/// Splits at commas outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let (mut depth, mut start, mut out) = (0i32, 0, Vec::new());
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn catalog(s: &str) -> Result<Vec<SMHandle>> {
    let items: Vec<String> = match s.trim().strip_prefix('@') {
        Some(path) if !s.contains(',') => {
            let text = flag("catalog", load(path))?;
            match serde_json::from_str::<Vec<String>>(&text) {
                Ok(list) => list,
                Err(_) => vec![s.trim().to_string()],
            }
        }
        _ => split_top_level(s).into_iter().map(String::from).collect(),
    };
    if items.is_empty() {
        return Err(RunError::Usage("--catalog is empty".into()));
    }
    items.iter().map(|h| flag("catalog", SMHandle::parse_with(h, &load))).collect()
}

fn set_cell(s: &FinSet) -> String {
    s.to_string()
}

fn tuple_cell(t: &[FinSet]) -> String {
    t.iter().map(set_cell).collect::<Vec<_>>().join(" ")
}

fn coeffs_cell(a: &[BigRational]) -> String {
    a.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn inequality_failures(rep: &InequalityReport, context: &str) -> Vec<Failure> {
    rep.violations
        .iter()
        .map(|v| Failure {
            tag: v.inequality.tag().to_string(),
            detail: format!("{context}at {}: {} > {}", v.point, v.lhs, v.rhs),
        })
        .collect()
}

fn estimate_table(est: &SMEstimate) -> Table {
    let mut t = Table::new(&["k", "a", "l", "threshold", "tuples", "lo", "hi", "residual"]);
    for c in &est.cells {
        for cut in &c.cutoffs {
            t.push(vec![
                c.k.to_string(),
                coeffs_cell(&c.a),
                cut.l.to_string(),
                cut.threshold.to_string(),
                cut.tuples.to_string(),
                cut.lo.to_string(),
                cut.hi.to_string(),
                cut.residual.to_string(),
            ]);
        }
    }
    t
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Family(FamilyCmd::Inspect(a)) => family_inspect(a),
        Command::Family(FamilyCmd::Rank(a)) => family_rank(a),
        Command::Plegma(PlegmaCmd::Enum(a)) => plegma_enum(a),
        Command::Ramsey(RamseyCmd::Search(a)) => ramsey(a),
        Command::Norm(NormCmd::Eval(a)) => norm_eval(a),
        Command::Sm(SmCmd::Extract(a)) => sm_extract(a),
        Command::Sm(SmCmd::Joint(a)) => sm_joint(a),
        Command::Sm(SmCmd::Check(a)) => sm_check(a),
        Command::Join(JoinCmd::Build(a)) => join_build(a),
        Command::Join(JoinCmd::Weighted(a)) => join_weighted(a),
        Command::Order(OrderCmd::Matrix(a)) => order(a, true),
        Command::Order(OrderCmd::Chains(a)) => order(a, false),
        Command::Replay { .. } => Err(RunError::Usage("replay cannot be nested".into())),
    }
}

fn family_inspect(a: &InspectArgs) -> Result<Outcome> {
    let f = family(&a.family)?;
    let members = f.members(a.window)?;
    let regularity = check_regular_properties(&members, a.window)?;
    let membership = match &a.set {
        Some(s) => {
            let set = flag("set", FinSet::parse_list(s))?;
            Some(json!({ "set": set, "membership": f.classify(&set)? }))
        }
        None => None,
    };
    let mut table = Table::new(&["member", "size"]);
    for m in &members {
        table.push(vec![set_cell(m), m.len().to_string()]);
    }
    Ok(Outcome {
        result: json!({
            "family": f,
            "window": a.window,
            "member_count": members.len(),
            "members": members,
            "regularity": regularity,
            "query": membership,
        }),
        table: Some(table),
        failures: Vec::new(),
    })
}

fn family_rank(a: &RankArgs) -> Result<Outcome> {
    let f = family(&a.family)?;
    let symbolic = rank(&f)?;
    let tree = tree_rank(&f, &FinSet::empty(), a.window)?;
    let mut table = Table::new(&["family", "symbolic_rank", "window", "tree_rank"]);
    table.push(vec![f.to_string(), symbolic.to_string(), a.window.to_string(), tree.to_string()]);
    Ok(Outcome {
        result: json!({ "family": f, "rank": symbolic.to_string(), "window": a.window, "tree_rank": tree }),
        table: Some(table),
        failures: Vec::new(),
    })
}

fn plegma_enum(a: &EnumArgs) -> Result<Outcome> {
    let (f, l) = (family(&a.family)?, index_set(&a.index_set)?);
    let tuples = match a.kind {
        Kind::Plm => enum_plm(&f, &l, a.k, a.window)?,
        Kind::Bl => enum_bl(&f, &l, a.k, a.window)?,
    };
    let mut table = Table::new(&["position", "tuple"]);
    for (i, t) in tuples.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), tuple_cell(t)]);
    }
    Ok(Outcome {
        result: json!({ "count": tuples.len(), "tuples": tuples }),
        table: Some(table),
        failures: Vec::new(),
    })
}

fn ramsey(a: &SearchArgs) -> Result<Outcome> {
    let (f, l) = (family(&a.family)?, index_set(&a.index_set)?);
    let coloring = flag("coloring", Coloring::parse_with(&a.coloring, &load))?;
    let rep = match a.kind {
        Kind::Plm => ramsey_search_plm(&f, &l, a.arity, &coloring, a.target, a.window)?,
        Kind::Bl => ramsey_search_bl(&f, &l, a.arity, &coloring, a.target, a.window)?,
    };
    let mut table = Table::new(&["kind", "window", "target", "nodes_expanded", "verdict", "witness", "color"]);
    let (verdict, witness, color) = match &rep.result {
        SearchVerdict::Found { witness, color } => {
            ("found", set_cell(witness), color.map(|c| c.to_string()).unwrap_or_default())
        }
        SearchVerdict::Exhausted { exhaustive: true, .. } => ("exhausted", String::new(), String::new()),
        SearchVerdict::Exhausted { .. } => ("budget", String::new(), String::new()),
    };
    table.push(vec![
        format!("{:?}", rep.kind).to_lowercase(),
        rep.window.to_string(),
        rep.target.to_string(),
        rep.nodes_expanded.to_string(),
        verdict.to_string(),
        witness,
        color,
    ]);
    Ok(Outcome { result: serde_json::to_value(&rep).expect("serializable"), table: Some(table), failures: Vec::new() })
}

fn norm_eval(a: &EvalArgs) -> Result<Outcome> {
    let o = oracle("oracle", &a.oracle)?;
    let text = match a.vec.trim().strip_prefix('@') {
        Some(path) => flag("vec", load(path))?,
        None => a.vec.clone(),
    };
    let v: Vector = serde_json::from_str(&text).map_err(|e| RunError::Usage(format!("--vec: {e}")))?;
    let value = o.norm(&v)?;
    let mut table = Table::new(&["oracle", "value", "exact"]);
    table.push(vec![o.to_string(), value.to_string(), value.is_exact().to_string()]);
    Ok(Outcome {
        result: json!({ "oracle": o, "vector": v, "value": value, "exact": value.is_exact() }),
        table: Some(table),
        failures: Vec::new(),
    })
}

fn extract_first(m: &ModelArgs) -> Result<(Vec<FSeqRule>, FamilySpec, IndexSet, Grid, SMEstimate)> {
    let rs = rules(m)?;
    let (f, l, g) = (family(&m.family)?, index_set(&m.index_set)?, grid(&m.grid)?);
    let est = extract_sm(&rs[0], &f, &l, m.grid.k, m.window, &g)?;
    Ok((rs, f, l, g, est))
}

fn sm_extract(m: &ModelArgs) -> Result<Outcome> {
    if m.rules.len() != 1 {
        return Err(RunError::Usage("sm extract takes exactly one --rule; use sm joint for several".into()));
    }
    let (_, _, _, _, est) = extract_first(m)?;
    let table = estimate_table(&est);
    Ok(Outcome {
        result: json!({ "max_residual": est.max_residual(), "estimate": est }),
        table: Some(table),
        failures: Vec::new(),
    })
}

fn sm_joint(m: &ModelArgs) -> Result<Outcome> {
    let rs = rules(m)?;
    let (f, l, g) = (family(&m.family)?, index_set(&m.index_set)?, grid(&m.grid)?);
    let est = extract_joint(&rs, &f, &l, m.grid.k, m.window, &g)?;
    let stability: Vec<Value> = (1..=m.grid.k)
        .map(|len| Ok(json!({ "l": len, "defect": check_joint_stability(&rs, &f, &l, len, m.window, &g)? })))
        .collect::<Result<_>>()?;
    let table = estimate_table(&est);
    Ok(Outcome {
        result: json!({ "max_residual": est.max_residual(), "stability": stability, "estimate": est }),
        table: Some(table),
        failures: Vec::new(),
    })
}

fn sm_check(a: &CheckArgs) -> Result<Outcome> {
    let m = &a.model;
    if m.rules.len() != 1 {
        return Err(RunError::Usage("sm check takes exactly one --rule".into()));
    }
    let (mut rs, f, l, g, _) = extract_first(m)?;
    if a.declare_weakly_null {
        rs[0] = rs[0].clone().with_certificate(true, "declared on the command line");
    }
    let est = extract_sm(&rs[0], &f, &l, m.grid.k, m.window, &g)?;
    let spreading = spreading_check(&est);
    let suppression = check_suppression(&est, &g);
    let sub = subordination_check(&rs[0], &f, &l, m.window)?;
    let declared = sub.declared.as_ref().map(|c| c.weakly_null);
    // Suppression is only owed by weakly null models.
    let owed = sub.weakly_null_coordinatewise || declared == Some(true);
    let mut failures = Vec::new();
    if owed {
        failures.extend(suppression.violations.iter().map(|v| Failure {
            tag: "suppression".into(),
            detail: format!("zeroing position {} of ({}) raises the norm by {}", v.p, coeffs_cell(&v.a), v.slack),
        }));
    }
    let table = estimate_table(&est);
    Ok(Outcome {
        result: json!({
            "suppression_required": owed,
            "spreading": spreading,
            "suppression": suppression,
            "subordination": {
                "coordinatewise_subordinated": sub.coordinatewise_subordinated,
                "weakly_null_coordinatewise": sub.weakly_null_coordinatewise,
                "window_limited": sub.window_limited,
                "declared": sub.declared,
            },
            "estimate": est,
        }),
        table: Some(table),
        failures,
    })
}

fn join_build(m: &ModelArgs) -> Result<Outcome> {
    let rs = rules(m)?;
    let (f, l, g) = (family(&m.family)?, index_set(&m.index_set)?, grid(&m.grid)?);
    let join = build_join(&rs, &f, &l, m.window)?;
    let (je, pe) = join_estimates(&join, &rs, &f, &l, m.grid.k, m.window, &g)?;
    let tol = pe.iter().fold(je.max_residual(), |acc, e| acc.add(&e.max_residual()));
    let parts: Vec<SMHandle> =
        pe.into_iter().enumerate().map(|(i, e)| SMHandle::empirical(format!("part {}", i + 1), e)).collect();
    let join_handle = SMHandle::empirical("join", je.clone());
    let sandwich = sandwich_check(&join_handle, &parts, &g, &tol)?;
    let mut failures = inequality_failures(&sandwich, "");
    failures.extend(join.audit.plegma_failures.iter().map(|t| Failure {
        tag: "join-plegma".into(),
        detail: format!("interleaved prefixes of {} are not plegma", tuple_cell(t)),
    }));
    let table = estimate_table(&je);
    Ok(Outcome {
        result: json!({
            "rule": join.rule,
            "audit": join.audit,
            "tolerance": tol,
            "sandwich": sandwich,
            "estimate": je,
        }),
        table: Some(table),
        failures,
    })
}

fn join_weighted(a: &WeightedArgs) -> Result<Outcome> {
    let m = &a.model;
    let rs = rules(m)?;
    let (f, l, g) = (family(&m.family)?, index_set(&m.index_set)?, grid(&m.grid)?);
    let c: Vec<BigRational> = a.weights.split(',').map(|w| rational("weights", w)).collect::<Result<_>>()?;
    let tol = Scalar::Exact(rational("tol", &a.tol)?);
    let w = build_weighted_join(&rs, &c, a.truncation, &f, &l, m.window)?;
    let mut failures = Vec::new();
    if !w.bounds.holds {
        failures.push(Failure {
            tag: "k-bounds".into(),
            detail: format!("K = {} outside [{}, {}]", w.k_estimate, w.bounds.lower, w.bounds.upper),
        });
    }
    let joined = extract_sm(&w.normalized, &f, &w.index_set(), m.grid.k, m.window, &g)?;
    let join = SMHandle::empirical("join", joined.clone());
    let mut scaled = Vec::new();
    let mut weighted_parts = Vec::new();
    for (i, r) in rs.iter().enumerate().take(a.truncation) {
        let part = SMHandle::empirical(format!("part {}", i + 1), extract_sm(r, &f, &l, m.grid.k, m.window, &g)?);
        let ck = Scalar::Exact(c[i].clone()).mul(&w.k_estimate);
        let rep = scaled_domination_check(&part, &join, &ck, &g, &tol)?;
        failures.extend(inequality_failures(&rep, &format!("part {}: ", i + 1)));
        scaled.push(json!({ "part": i + 1, "constant": ck, "report": rep }));
        let coeff = Scalar::one()
            .div(&w.k_estimate)
            .ok_or_else(|| RunError::Usage("the weighted join has K = 0".into()))?
            .mul(&Scalar::Exact(c[i].recip()));
        weighted_parts.push((coeff, part));
    }
    let upper = weighted_upper_check(&join, &weighted_parts, &Scalar::zero(), &g, &tol)?;
    failures.extend(inequality_failures(&upper, ""));
    let mut table = Table::new(&["part", "weight", "scaled_constant", "checked", "violations"]);
    for (i, s) in scaled.iter().enumerate() {
        table.push(vec![
            (i + 1).to_string(),
            c[i].to_string(),
            s["constant"].as_str().map(String::from).unwrap_or_else(|| s["constant"].to_string()),
            s["report"]["checked"].to_string(),
            s["report"]["violations"].as_array().map_or(0, Vec::len).to_string(),
        ]);
    }
    Ok(Outcome {
        result: json!({
            "weights": c.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "truncation": w.truncation,
            "k_estimate": w.k_estimate,
            "bounds": w.bounds,
            "audit": w.audit,
            "scaled_domination": scaled,
            "weighted_upper": upper,
        }),
        table: Some(table),
        failures,
    })
}

fn order(a: &OrderArgs, matrix: bool) -> Result<Outcome> {
    let cat = catalog(&a.catalog)?;
    let mut params = DominationParams::new(Grid::standard(a.grid_k, a.grid_seed));
    params.n_max = a.n_max;
    params.c_scan_log2 = a.c_scan_log2;
    let r: OrderReport = chains_and_antichains(&cat, &params)?;
    let names = &r.names;
    let table = if matrix {
        let mut header = vec![""];
        header.extend(names.iter().map(String::as_str));
        let mut t = Table::new(&header);
        for (i, row) in r.matrix.iter().enumerate() {
            let mut cells = vec![names[i].clone()];
            cells.extend(row.iter().map(|x| x.symbol().to_string()));
            t.push(cells);
        }
        t
    } else {
        let mut t = Table::new(&["kind", "index", "members"]);
        let list = |idx: &[usize]| idx.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join(" ≺ ");
        t.push(vec!["chain".into(), "1".into(), list(&r.longest_chain)]);
        for (i, anti) in r.antichains.iter().enumerate() {
            let members = anti.iter().map(|&j| names[j].as_str()).collect::<Vec<_>>().join(" ∥ ");
            t.push(vec!["antichain".into(), (i + 1).to_string(), members]);
        }
        t
    };
    let hasse = r.hasse_listing();
    if matrix {
        eprint!("{hasse}");
    }
    let named = |idx: &[usize]| idx.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
    Ok(Outcome {
        result: json!({
            "params": params,
            "order": r,
            "hasse": hasse.lines().collect::<Vec<_>>(),
            "longest_chain_names": named(&r.longest_chain),
            "antichain_names": r.antichains.iter().map(|x| named(x)).collect::<Vec<_>>(),
        }),
        table: Some(table),
        failures: Vec::new(),
    })
}
