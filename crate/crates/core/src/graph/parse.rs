//! Line-oriented graph text format.
//!
//! ```text
//! # comment
//! node A B C      # optional declarations, fixing node order
//! A -> B          # directed edge
//! B <-> C         # bidirected edge
//! ```
//!
//! Undeclared nodes are declared at first mention. A bare `strict` line turns
//! that off for the rest of the file: any later edge naming an undeclared
//! node is an error.

use super::{Admg, AdmgBuilder, NodeId};
use crate::error::{Error, Result};

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Ident(&'a str),
    Directed,
    Bidirected,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(line_no: usize, line: &str) -> Result<Vec<(usize, Token<'_>)>> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = line[..i].chars().count() + 1;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'_' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'@')
            {
                i += 1;
            }
            let word = &line[start..i];
            if !NodeId::is_valid_name(word) {
                return Err(syntax(line_no, col, format!("invalid node name `{word}`")));
            }
            out.push((col, Token::Ident(word)));
        } else if line[i..].starts_with("<->") {
            out.push((col, Token::Bidirected));
            i += 3;
        } else if line[i..].starts_with("->") {
            out.push((col, Token::Directed));
            i += 2;
        } else {
            let ch = line[i..].chars().next().unwrap_or('?');
            return Err(syntax(line_no, col, format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

/// Parses the graph text format. Node order is first-mention order.
pub fn parse_graph(text: &str) -> Result<Admg> {
    let mut b = AdmgBuilder::default();
    let mut strict = false;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line_no, content)?;
        match tokens.as_slice() {
            [] => {}
            [(_, Token::Ident("strict"))] => strict = true,
            [(_, Token::Ident("node")), rest @ ..]
                if matches!(rest.first(), Some((_, Token::Ident(_)))) =>
            {
                for (col, t) in rest {
                    match t {
                        Token::Ident(name) => {
                            b.node(*name);
                        }
                        _ => {
                            return Err(syntax(line_no, *col, "expected node name in declaration"))
                        }
                    }
                }
            }
            [(_, Token::Ident(a)), (_, arrow @ (Token::Directed | Token::Bidirected)), (_, Token::Ident(c))] =>
            {
                if strict {
                    for n in [a, c] {
                        if !b.contains(n) {
                            return Err(Error::Undeclared {
                                node: (*n).to_owned(),
                                line: line_no,
                            });
                        }
                    }
                }
                match arrow {
                    Token::Directed => b.directed(*a, *c)?,
                    _ => b.bidirected(*a, *c)?,
                };
            }
            [(col, Token::Ident(_))] => {
                return Err(syntax(
                    line_no,
                    *col,
                    "expected `->` or `<->` after node name",
                ))
            }
            [(_, Token::Ident(_)), (col, Token::Directed | Token::Bidirected)] => {
                return Err(syntax(line_no, *col, "edge is missing its second endpoint"))
            }
            [(col, Token::Directed | Token::Bidirected), ..] => {
                return Err(syntax(line_no, *col, "edge is missing its first endpoint"))
            }
            [_, _, _, (col, _), ..] => return Err(syntax(line_no, *col, "one edge per line")),
            [_, (col, _), ..] => return Err(syntax(line_no, *col, "expected `->` or `<->`")),
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1a_text() {
        let g = parse_graph("Z -> X\nZ -> Y\nX -> Y").unwrap();
        let names: Vec<_> = g.nodes().iter().map(|n| n.as_str()).collect();
        assert_eq!(names, ["Z", "X", "Y"]);
        assert_eq!(g.num_directed(), 3);
        assert_eq!(g.num_bidirected(), 0);
    }

    #[test]
    fn empty_text_gives_empty_graph() {
        assert!(parse_graph("").unwrap().is_empty());
        assert!(parse_graph("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn two_cycle_rejected() {
        assert!(matches!(
            parse_graph("A -> B\nB -> A"),
            Err(Error::Cycle(_))
        ));
    }

    #[test]
    fn whitespace_insensitive_and_declarations() {
        let g = parse_graph("node C B A\nA->B   # trailing\n  B<->C").unwrap();
        let names: Vec<_> = g.nodes().iter().map(|n| n.as_str()).collect();
        assert_eq!(names, ["C", "B", "A"]);
        assert!(g.has_directed("A", "B"));
        assert!(g.has_bidirected("C", "B"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_graph("A -> B\nA => C") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        match parse_graph("A ->") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_graph("A -> B -> C"),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(parse_graph("1A -> B"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn duplicate_edges_rejected() {
        assert!(matches!(
            parse_graph("A <-> B\nB <-> A"),
            Err(Error::DuplicateEdge(_))
        ));
        // directed and bidirected between the same pair is fine
        assert!(parse_graph("A -> B\nB <-> A").is_ok());
    }

    #[test]
    fn strict_mode() {
        assert!(parse_graph("strict\nnode A B\nA -> B").is_ok());
        assert_eq!(
            parse_graph("strict\nnode A\nA -> B"),
            Err(Error::Undeclared {
                node: "B".into(),
                line: 3
            })
        );
    }

    #[test]
    fn node_named_node_is_allowed_in_edges() {
        let g = parse_graph("node -> A").unwrap();
        assert!(g.has_directed("node", "A"));
    }

    #[test]
    fn text_roundtrip() {
        let g = parse_graph("node Q\nZ -> X\nX <-> Y\nX -> Y").unwrap();
        assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }
}
