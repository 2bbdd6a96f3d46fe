//! Plain-text graph format used by the command-line tools.
//!
//! One directive per line: `vertex <name>` or `edge <src> <dst> <mult>`,
//! where `<mult>` is a positive integer or `inf`. `#` starts a comment.
//! Vertices must be declared before use; declaration order is the basis order.

use crate::graph::{build_graph, EdgeClass, Graph, GraphError, Mult, VertexId};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphFileError {
    #[error("line {line}: unknown directive {word:?}")]
    UnknownDirective { line: usize, word: String },
    #[error("line {line}: {directive} takes {expected} argument(s), got {got}")]
    BadArity { line: usize, directive: &'static str, expected: usize, got: usize },
    #[error("line {line}: edge uses undeclared vertex {name}")]
    UndeclaredVertex { line: usize, name: String },
    #[error("line {line}: bad multiplicity {token:?} (positive integer or `inf`)")]
    BadMultiplicity { line: usize, token: String },
    #[error("no vertices declared")]
    Empty,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphFileError> {
    let mut vertices: Vec<VertexId> = Vec::new();
    let mut edges: Vec<EdgeClass> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "vertex" => {
                if tokens.len() != 2 {
                    return Err(GraphFileError::BadArity {
                        line,
                        directive: "vertex",
                        expected: 1,
                        got: tokens.len() - 1,
                    });
                }
                vertices.push(VertexId::new(tokens[1]));
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(GraphFileError::BadArity {
                        line,
                        directive: "edge",
                        expected: 3,
                        got: tokens.len() - 1,
                    });
                }
                let src = VertexId::new(tokens[1]);
                let dst = VertexId::new(tokens[2]);
                for name in [&src, &dst] {
                    if !vertices.contains(name) {
                        return Err(GraphFileError::UndeclaredVertex {
                            line,
                            name: name.0.clone(),
                        });
                    }
                }
                let mult = match tokens[3] {
                    "inf" => Mult::Infinite,
                    t => match t.parse::<u64>() {
                        Ok(m) if m > 0 => Mult::Finite(m),
                        _ => {
                            return Err(GraphFileError::BadMultiplicity {
                                line,
                                token: t.to_string(),
                            })
                        }
                    },
                };
                edges.push(EdgeClass { src, dst, mult });
            }
            word => {
                return Err(GraphFileError::UnknownDirective { line, word: word.to_string() })
            }
        }
    }
    if vertices.is_empty() {
        return Err(GraphFileError::Empty);
    }
    Ok(build_graph(vertices, edges)?)
}

/// Deterministic rendering: vertices in basis order, then edges in class order.
pub fn serialize_graph(g: &Graph) -> String {
    let mut out = String::new();
    for v in g.vertices() {
        out.push_str("vertex ");
        out.push_str(v.as_str());
        out.push('\n');
    }
    for e in g.classes() {
        out.push_str(&format!("edge {} {} {}\n", e.src, e.dst, e.mult));
    }
    out
}
