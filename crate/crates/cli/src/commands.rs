use crate::format::{csv, sig, table, Output};
use crate::input::Selected;
use qconsensus::induced::{induced_graph, verify_intertwining};
use qconsensus::partition::{enumerate_partitions, hasse_diagram, HasseDiagram};
use qconsensus::quantum::{
    consensus_rate, consensus_state, verify_reduction, DensityState, QcmePropagator,
};
use qconsensus::spectral::{eigenvalues_sym, verify_aldous_extension, verify_hasse_ordering};
use qconsensus::weight_opt::{closed_form, dual_certificate, maximize_gap_numeric, OptimalResult};
use qconsensus::{Density, Error, Graph, Partition, Result};
use serde_json::{json, Value};
use std::fmt::Write;
use std::path::Path;

/// Largest `N` listed by `partitions`.
pub const MAX_PARTITION_N: usize = 20;

fn parts(p: &Partition) -> Value {
    json!(p.parts())
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn partitions(n: usize) -> Result<Output> {
    if n > MAX_PARTITION_N {
        return Err(Error::Resource(format!(
            "N = {n} exceeds {MAX_PARTITION_N}"
        )));
    }
    // a single partition has no cover edges
    let h = match n {
        1 => HasseDiagram {
            nodes: enumerate_partitions(1)?,
            cover_edges: Vec::new(),
        },
        _ => hasse_diagram(n)?,
    };
    let rows: Vec<Vec<String>> = h
        .nodes
        .iter()
        .map(|p| vec![p.to_string(), p.tabloid_count().to_string()])
        .collect();
    let edge_rows: Vec<Vec<String>> = h
        .cover_edges
        .iter()
        .map(|e| {
            vec![
                h.nodes[e.dominant].to_string(),
                h.nodes[e.dominated].to_string(),
                e.category.number().to_string(),
                format!("{}->{}", e.from_row, e.to_row),
            ]
        })
        .collect();
    let result = json!({
        "n": n,
        "nodes": h.nodes.iter().map(|p| json!({
            "partition": parts(p),
            "tabloids": p.tabloid_count(),
        })).collect::<Vec<_>>(),
        "edges": h.cover_edges.iter().map(|e| json!({
            "dominant": parts(&h.nodes[e.dominant]),
            "dominated": parts(&h.nodes[e.dominated]),
            "category": e.category.number(),
            "from_row": e.from_row,
            "to_row": e.to_row,
        })).collect::<Vec<_>>(),
    });
    let mut text = table(&["partition", "tabloids"], &rows);
    if !edge_rows.is_empty() {
        text.push('\n');
        text.push_str(&table(
            &["dominant", "dominated", "category", "move"],
            &edge_rows,
        ));
    }
    let mut dot = String::from("digraph hasse {\n");
    for p in &h.nodes {
        let _ = writeln!(dot, "  \"{p}\";");
    }
    for e in &h.cover_edges {
        let _ = writeln!(
            dot,
            "  \"{}\" -> \"{}\" [label=\"{}\"];",
            h.nodes[e.dominant],
            h.nodes[e.dominated],
            e.category.number()
        );
    }
    dot.push_str("}\n");
    Ok(Output {
        result,
        table: text,
        csv: Some(csv(&["partition", "tabloids"], &rows)),
        dot: Some(dot),
        ok: true,
    })
}

pub fn induced(sel: &Selected, partition: &str) -> Result<Output> {
    let n: Partition = partition.parse()?;
    let ig = induced_graph(&sel.graph, &n)?;
    let spectrum = eigenvalues_sym(&ig.laplacian())?.eigenvalues;
    let gap = spectrum.get(1).copied().unwrap_or(0.0);
    let g = ig.graph();
    let words: Vec<String> = ig.vertices().iter().map(|t| t.word_string()).collect();
    let result = json!({
        "graph": sel.label,
        "partition": parts(&n),
        "vertices": words,
        "edges": g.edges(),
        "weights": g.weights(),
        "orbits": g.orbits(),
        "spectrum": spectrum,
        "lambda2": gap,
    });
    let rows: Vec<Vec<String>> = g
        .edges()
        .iter()
        .zip(g.weights())
        .map(|(&(a, b), &w)| vec![words[a].clone(), words[b].clone(), sig(w)])
        .collect();
    let mut text = format!(
        "induced graph of {n} on {}: {} vertices, {} edges\nλ₂ = {}\nspectrum: {}\n\n",
        sel.label,
        words.len(),
        rows.len(),
        sig(gap),
        spectrum
            .iter()
            .map(|&x| sig(x))
            .collect::<Vec<_>>()
            .join(" ")
    );
    text.push_str(&table(&["from", "to", "weight"], &rows));
    let mut dot = String::from("graph induced {\n");
    for (i, w) in words.iter().enumerate() {
        let _ = writeln!(dot, "  {i} [label=\"{w}\"];");
    }
    for (&(a, b), &w) in g.edges().iter().zip(g.weights()) {
        let _ = writeln!(dot, "  {a} -- {b} [label=\"{}\"];", sig(w));
    }
    dot.push_str("}\n");
    Ok(Output {
        result,
        table: text,
        csv: Some(csv(&["from", "to", "weight"], &rows)),
        dot: Some(dot),
        ok: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Closed,
    Numeric,
    Auto,
}

pub fn optimize(sel: &Selected, budget: f64, method: MethodArg) -> Result<Output> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(Error::Parameter(format!(
            "budget must be positive, got {budget}"
        )));
    }
    let closed = || -> Result<OptimalResult<f64>> {
        let spec = sel
            .spec
            .as_ref()
            .ok_or_else(|| Error::Unsupported("closed forms need a named topology".into()))?;
        closed_form(spec, budget)
    };
    let mut r = match method {
        MethodArg::Closed => closed().map_err(|e| match e {
            Error::Unsupported(m) if !m.contains("numeric") => {
                Error::Unsupported(format!("{m}; rerun with --method numeric"))
            }
            other => other,
        })?,
        MethodArg::Numeric => maximize_gap_numeric(&sel.graph, budget)?,
        MethodArg::Auto => match closed() {
            Ok(r) => r,
            Err(Error::Unsupported(_)) => maximize_gap_numeric(&sel.graph, budget)?,
            Err(e) => return Err(e),
        },
    };
    let weighted = r.weighted_graph(&sel.graph)?;
    match dual_certificate(&sel.graph, &r, budget) {
        Ok(c) => r.certificate = Some(c),
        Err(Error::CertificateUnavailable(_)) => {}
        Err(e) => return Err(e),
    }
    let sizes = sel.graph.orbit_sizes();
    let rows: Vec<Vec<String>> = r
        .weights_by_orbit
        .iter()
        .map(|(o, &w)| {
            vec![
                o.to_string(),
                sizes.get(o).copied().unwrap_or(0).to_string(),
                sig(w),
            ]
        })
        .collect();
    let mut text = format!("{} with budget {}\n\n", sel.label, sig(budget));
    text.push_str(&table(&["orbit", "edges", "weight"], &rows));
    let _ = writeln!(text, "\nλ₂ = {}", sig(r.lambda2));
    let _ = writeln!(text, "budget used = {}", sig(r.budget_used));
    let _ = writeln!(text, "method = {}", r.method);
    match &r.certificate {
        Some(c) => {
            let _ = writeln!(
                text,
                "certificate = {} (max violation {})",
                if c.accepted { "accepted" } else { "rejected" },
                sig(c.max_violation)
            );
        }
        None => text.push_str("certificate = unavailable\n"),
    }
    let mut result = serde_json::to_value(&r).expect("result serializes");
    result["graph"] = json!(sel.label);
    Ok(Output {
        result,
        table: text,
        csv: Some(csv(&["orbit", "edges", "weight"], &rows)),
        dot: Some(weighted.to_dot()),
        ok: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Aldous,
    Hasse,
    Intertwining,
    Reduction,
}

pub fn verify(sel: &Selected, which: Check, d: usize, seed: u64, times: &[f64]) -> Result<Output> {
    let g = &sel.graph;
    match which {
        Check::Aldous => {
            let r = verify_aldous_extension(g)?;
            let rows: Vec<Vec<String>> = r
                .gaps
                .iter()
                .map(|(p, x)| vec![p.to_string(), sig(*x)])
                .collect();
            let mut text = format!(
                "{} aldous on {}: common gap {} (max deviation {})\n\n",
                pass(r.passed),
                sel.label,
                sig(r.common_gap),
                sig(r.max_deviation)
            );
            text.push_str(&table(&["partition", "lambda2"], &rows));
            Ok(Output {
                result: serde_json::to_value(&r).expect("report serializes"),
                csv: Some(csv(&["partition", "lambda2"], &rows)),
                table: text,
                dot: None,
                ok: r.passed,
            })
        }
        Check::Hasse => {
            let r = verify_hasse_ordering(g)?;
            let rows: Vec<Vec<String>> = r
                .pairs
                .iter()
                .map(|p| {
                    vec![
                        p.dominant.to_string(),
                        p.dominated.to_string(),
                        p.category.number().to_string(),
                        p.gap_dominant.map(sig).unwrap_or_else(|| "-".into()),
                        sig(p.gap_dominated),
                        pass(p.ordering_ok && p.inclusion_ok).into(),
                    ]
                })
                .collect();
            let header = [
                "dominant",
                "dominated",
                "category",
                "gap_dominant",
                "gap_dominated",
                "status",
            ];
            let mut text = format!(
                "{} hasse on {}: {} cover pairs\n\n",
                pass(r.passed),
                sel.label,
                r.pairs.len()
            );
            text.push_str(&table(&header, &rows));
            Ok(Output {
                result: serde_json::to_value(&r).expect("report serializes"),
                csv: Some(csv(&header, &rows)),
                table: text,
                dot: None,
                ok: r.passed,
            })
        }
        Check::Intertwining => {
            let h = hasse_diagram(g.n_vertices())?;
            let tol = 1e-12 * g.max_degree().max(1.0);
            let mut rows = Vec::new();
            let mut pairs = Vec::new();
            let mut ok = true;
            for e in &h.cover_edges {
                let (a, b) = (&h.nodes[e.dominant], &h.nodes[e.dominated]);
                let res = verify_intertwining(g, a, b)?;
                ok &= res <= tol;
                rows.push(vec![
                    a.to_string(),
                    b.to_string(),
                    sig(res),
                    pass(res <= tol).into(),
                ]);
                pairs.push(json!({
                    "dominant": parts(a),
                    "dominated": parts(b),
                    "residual": res,
                }));
            }
            let header = ["dominant", "dominated", "residual", "status"];
            let mut text = format!(
                "{} intertwining on {}: {} cover pairs, tolerance {}\n\n",
                pass(ok),
                sel.label,
                rows.len(),
                sig(tol)
            );
            text.push_str(&table(&header, &rows));
            Ok(Output {
                result: json!({ "pairs": pairs, "tolerance": tol, "passed": ok }),
                csv: Some(csv(&header, &rows)),
                table: text,
                dot: None,
                ok,
            })
        }
        Check::Reduction => {
            let rho0 = Density::random(d, g.n_vertices(), seed)?;
            let r = verify_reduction(g, d, &rho0, times)?;
            let rows: Vec<Vec<String>> = r
                .blocks
                .iter()
                .map(|b| {
                    vec![
                        b.partition.to_string(),
                        b.classes.to_string(),
                        sig(b.max_deviation),
                    ]
                })
                .collect();
            let mut text = format!(
                "{} reduction on {} (d={d}, seed {seed}): max deviation {}, trivial block drift {}\n\n",
                pass(r.passed),
                sel.label,
                sig(r.max_deviation),
                sig(r.trivial_block_drift)
            );
            text.push_str(&table(&["partition", "classes", "max_deviation"], &rows));
            Ok(Output {
                result: serde_json::to_value(&r).expect("report serializes"),
                csv: Some(csv(&["partition", "classes", "max_deviation"], &rows)),
                table: text,
                dot: None,
                ok: r.passed,
            })
        }
    }
}

pub fn simulate(
    sel: &Selected,
    d: usize,
    seed: u64,
    times: &[f64],
    state_file: Option<&Path>,
    emit_state: bool,
) -> Result<Output> {
    let g: &Graph = &sel.graph;
    let rho0 = match state_file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Parameter(format!("cannot read {}: {e}", path.display())))?;
            DensityState::from_json(&text)?
        }
        None => Density::random(d, g.n_vertices(), seed)?,
    };
    if rho0.n() != g.n_vertices() {
        return Err(Error::Domain(format!(
            "{}-site state on a {}-vertex graph",
            rho0.n(),
            g.n_vertices()
        )));
    }
    let prop = QcmePropagator::new(g, rho0.d())?;
    let star = consensus_state(&rho0)?;
    let rate = consensus_rate(g)?;
    let mut samples = Vec::new();
    let mut rows = Vec::new();
    let mut last = None;
    for &t in times {
        let rho = prop.evolve(&rho0, t)?;
        let (tr, herm, low, dist) = (
            rho.trace().re,
            rho.hermiticity_error(),
            rho.min_eigenvalue()?,
            rho.distance(&star),
        );
        rows.push(vec![sig(t), sig(tr), sig(herm), sig(low), sig(dist)]);
        samples.push(json!({
            "t": t,
            "trace": tr,
            "hermiticity_error": herm,
            "min_eigenvalue": low,
            "distance_to_consensus": dist,
        }));
        last = Some(rho);
    }
    let mut result = json!({
        "graph": sel.label,
        "d": rho0.d(),
        "n": rho0.n(),
        "consensus_rate": rate,
        "samples": samples,
    });
    if emit_state {
        if let Some(rho) = &last {
            result["final_state"] =
                serde_json::to_value(rho.to_json_form()).expect("state serializes");
        }
    }
    let header = [
        "t",
        "trace",
        "hermiticity_error",
        "min_eigenvalue",
        "distance",
    ];
    let mut text = format!(
        "{} with d={} from {}: consensus rate λ₂ = {}\n\n",
        sel.label,
        rho0.d(),
        match state_file {
            Some(p) => p.display().to_string(),
            None => format!("random state seed {seed}"),
        },
        sig(rate)
    );
    text.push_str(&table(&header, &rows));
    Ok(Output {
        result,
        csv: Some(csv(&header, &rows)),
        table: text,
        dot: None,
        ok: true,
    })
}
