//! Plain-text edge lists: a header line `n <count>` followed by one `a b` pair
//! per line, 0-based. Undirected lines are written with `a < b`; DAG lines
//! read as `a -> b`.

use std::fmt::Write as _;

use super::dag::Dag;
use super::undirected::UndirectedGraph;
use crate::error::{Error, Result};

fn parse_pairs(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing `n <count>` header".into(),
    })?;
    let n = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["n", count] => count.parse::<usize>().map_err(|e| Error::Parse {
            line: hline,
            msg: e.to_string(),
        })?,
        _ => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("expected `n <count>`, got `{header}`"),
            })
        }
    };
    let mut pairs = Vec::new();
    for (lineno, l) in lines {
        let mut it = l.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(a)), Some(Ok(b)), None) => pairs.push((a, b)),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected `a b`, got `{l}`"),
                })
            }
        }
    }
    Ok((n, pairs))
}

pub fn parse_undirected(text: &str) -> Result<UndirectedGraph> {
    let (n, pairs) = parse_pairs(text)?;
    UndirectedGraph::from_lines(n, pairs)
}

pub fn format_undirected(g: &UndirectedGraph) -> String {
    let mut out = format!("n {}\n", g.n());
    for (a, b) in g.lines() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

pub fn parse_dag(text: &str) -> Result<Dag> {
    let (n, pairs) = parse_pairs(text)?;
    Dag::from_edges(n, pairs)
}

pub fn format_dag(d: &Dag) -> String {
    let mut out = format!("n {}\n", d.n());
    for (a, b) in d.edges() {
        let _ = writeln!(out, "{a} {b}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_round_trip() {
        let g = UndirectedGraph::from_lines(4, [(2, 0), (1, 3)]).unwrap();
        let text = format_undirected(&g);
        assert_eq!(text, "n 4\n0 2\n1 3\n");
        assert_eq!(parse_undirected(&text).unwrap(), g);
    }

    #[test]
    fn dag_lines_are_directed() {
        let d = parse_dag("n 3\n2 0\n0 1\n").unwrap();
        assert!(d.has_edge(2, 0) && d.has_edge(0, 1));
        assert_eq!(format_dag(&d), "n 3\n0 1\n2 0\n");
        assert!(parse_dag("n 2\n0 1\n1 0\n").is_err());
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_undirected(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_undirected("n x"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_undirected("n 3\n0 1 2"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_undirected("n 3\n0 5"),
            Err(Error::VertexOutOfRange { .. })
        ));
    }
}
