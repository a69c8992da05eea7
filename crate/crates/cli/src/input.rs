//! Graph selection from a topology name (with size flags) or a JSON graph file.

use clap::Args;
use qconsensus::graph::TopologySpec;
use qconsensus::{Error, Graph, Result};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// Topology name (`path`, `star`, `cycle`, `complete`, `paw`, `lollipop`, `ccs-star`,
    /// `ccs-two-branch`, `symmetric-star`, `palm`, `coupled-complete`, `product`). A trailing
    /// number sets `n`, e.g. `path4`.
    pub topology: Option<String>,
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    #[arg(short = 'p', long)]
    pub p: Option<usize>,
    #[arg(short = 'q', long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub q1: Option<usize>,
    #[arg(long)]
    pub q2: Option<usize>,
    #[arg(long)]
    pub n1: Option<usize>,
    #[arg(long)]
    pub n2: Option<usize>,
    #[arg(long)]
    pub n3: Option<usize>,
    /// Factors of a product, e.g. `complete2,complete3`.
    #[arg(long)]
    pub factors: Option<String>,
    /// Graph JSON file `{n_vertices, edges, weights, orbits}` instead of a topology.
    #[arg(long, conflicts_with = "topology")]
    pub graph_file: Option<PathBuf>,
    /// Comma-separated edge weights replacing the unit weights.
    #[arg(long)]
    pub weights: Option<String>,
}

pub struct Selected {
    pub spec: Option<TopologySpec>,
    pub graph: Graph,
    pub label: String,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Splits `path4` into `("path", Some(4))`.
fn split_name(raw: &str) -> (String, Option<usize>) {
    let name = raw.trim().to_ascii_lowercase().replace('-', "_");
    let cut = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let (head, tail) = name.split_at(cut);
    (head.trim_end_matches('_').to_string(), tail.parse().ok())
}

fn parse_spec(raw: &str, a: &GraphArgs, allow_factors: bool) -> Result<TopologySpec> {
    let (name, suffix) = split_name(raw);
    let get = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("{name} needs {flag}")));
    let n = || get(a.n.or(suffix), "-n");
    Ok(match name.as_str() {
        "path" => TopologySpec::Path { n: n()? },
        "star" => TopologySpec::Star { n: n()? },
        "cycle" => TopologySpec::Cycle { n: n()? },
        "complete" => TopologySpec::Complete { n: n()? },
        "paw" | "diamond" => TopologySpec::Paw,
        "lollipop" => TopologySpec::Lollipop {
            p: get(a.p, "-p")?,
            q: get(a.q, "-q")?,
        },
        "ccs_star" | "ccs" => TopologySpec::CcsStar {
            p: get(a.p, "-p")?,
            q: get(a.q, "-q")?,
        },
        "ccs_two_branch" => TopologySpec::CcsTwoBranch {
            p: get(a.p, "-p")?,
            q1: get(a.q1, "--q1")?,
            q2: get(a.q2, "--q2")?,
        },
        "symmetric_star" => TopologySpec::SymmetricStar {
            p: get(a.p, "-p")?,
            q: get(a.q, "-q")?,
        },
        "palm" => TopologySpec::Palm {
            p: get(a.p, "-p")?,
            q: get(a.q, "-q")?,
        },
        "coupled_complete" => TopologySpec::CoupledComplete {
            n1: get(a.n1, "--n1")?,
            n2: get(a.n2, "--n2")?,
            n3: get(a.n3, "--n3")?,
        },
        "product" | "cartesian_product" if allow_factors => {
            let list = a
                .factors
                .as_deref()
                .ok_or_else(|| usage("product needs --factors"))?;
            let bare = GraphArgs {
                n: None,
                ..a.clone()
            };
            let factors = list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|f| parse_spec(f, &bare, false))
                .collect::<Result<Vec<_>>>()?;
            TopologySpec::CartesianProduct { factors }
        }
        _ => return Err(usage(format!("unknown topology '{raw}'"))),
    })
}

fn parse_weights(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad weight '{t}'")))
        })
        .collect()
}

pub fn select(a: &GraphArgs) -> Result<Selected> {
    let (spec, mut graph, label) = match (&a.topology, &a.graph_file) {
        (Some(name), None) => {
            let spec = parse_spec(name, a, true)?;
            let graph: Graph = spec.build()?;
            let label = spec.to_string();
            (Some(spec), graph, label)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            (None, Graph::from_json(&text)?, path.display().to_string())
        }
        _ => return Err(usage("give a topology name or --graph-file")),
    };
    if let Some(w) = &a.weights {
        graph = graph.with_weights(parse_weights(w)?)?;
    }
    Ok(Selected { spec, graph, label })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(topology: &str) -> GraphArgs {
        GraphArgs {
            topology: Some(topology.into()),
            n: None,
            p: None,
            q: None,
            q1: None,
            q2: None,
            n1: None,
            n2: None,
            n3: None,
            factors: None,
            graph_file: None,
            weights: None,
        }
    }

    #[test]
    fn compact_names() {
        assert_eq!(split_name("path4"), ("path".into(), Some(4)));
        assert_eq!(split_name("ccs-star"), ("ccs_star".into(), None));
        assert_eq!(
            parse_spec("star4", &args("star4"), true).unwrap(),
            TopologySpec::Star { n: 4 }
        );
    }

    #[test]
    fn flags_and_products() {
        let mut a = args("ccs-star");
        a.p = Some(5);
        a.q = Some(3);
        assert_eq!(
            parse_spec("ccs-star", &a, true).unwrap(),
            TopologySpec::CcsStar { p: 5, q: 3 }
        );
        let mut a = args("product");
        a.factors = Some("complete2,complete3".into());
        let spec = parse_spec("product", &a, true).unwrap();
        assert_eq!(spec.build::<f64>().unwrap().n_vertices(), 6);
    }

    #[test]
    fn missing_sizes_are_usage_errors() {
        assert!(matches!(
            parse_spec("path", &args("path"), true),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            parse_spec("blob", &args("blob"), true),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn weight_override() {
        let mut a = args("path3");
        a.weights = Some("0.5, 2".into());
        let s = select(&a).unwrap();
        assert_eq!(s.graph.weights(), &[0.5, 2.0]);
    }
}
