//! Text and binary serialization of trees.
//!
//! Text grammar: `Tree ::= "L" | "(" Tree Tree ")"`. ASCII whitespace
//! between tokens is ignored. [`format_tree`] never emits whitespace.
//!
//! The binary framing stores the pre-order node kinds as a bit sequence:
//! an 8-byte little-endian bit count followed by the bits packed
//! least-significant first (1 = internal node, 0 = leaf).

use std::fmt;
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::tree::{Node, NodeId, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError {
            position,
            message: message.into(),
        }
    }
}

pub fn parse_tree(text: &str) -> Result<Tree, ParseError> {
    let bytes = text.as_bytes();
    let mut flags = Vec::with_capacity(bytes.len());
    // Children completed so far for each open parenthesis.
    let mut open: Vec<u8> = Vec::new();
    let mut complete = false;

    for (pos, &byte) in bytes.iter().enumerate() {
        if byte.is_ascii_whitespace() {
            continue;
        }
        if complete {
            return Err(ParseError::new(pos, "unexpected input after complete tree"));
        }
        match byte {
            b'(' => {
                if open.last() == Some(&2) {
                    return Err(ParseError::new(pos, "expected ')'"));
                }
                flags.push(true);
                open.push(0);
            }
            b'L' => {
                if open.last() == Some(&2) {
                    return Err(ParseError::new(pos, "expected ')'"));
                }
                flags.push(false);
                complete = finish_subtree(&mut open);
            }
            b')' => match open.pop() {
                Some(2) => complete = finish_subtree(&mut open),
                Some(count) => {
                    return Err(ParseError::new(
                        pos,
                        format!("internal node closed with {count} children, expected 2"),
                    ))
                }
                None => return Err(ParseError::new(pos, "unmatched ')'")),
            },
            other => {
                return Err(ParseError::new(
                    pos,
                    format!("unexpected character {:?}", other as char),
                ))
            }
        }
    }
    if !complete {
        return Err(ParseError::new(bytes.len(), "unexpected end of input"));
    }
    Ok(Tree::from_preorder(flags).expect("grammar-checked pre-order is well-formed"))
}

/// Records a finished subtree in its parent. Returns `true` when the
/// finished subtree is the root.
fn finish_subtree(open: &mut [u8]) -> bool {
    match open.last_mut() {
        Some(count) => {
            *count += 1;
            false
        }
        None => true,
    }
}

pub fn format_tree(t: &Tree) -> String {
    let mut out = String::with_capacity(2 * t.node_count());
    write_tree(t, &mut out).expect("writing to a String cannot fail");
    out
}

enum Step {
    Visit(NodeId),
    Close,
}

pub(crate) fn write_tree<W: fmt::Write>(t: &Tree, out: &mut W) -> fmt::Result {
    let mut stack = vec![Step::Visit(t.root())];
    while let Some(step) = stack.pop() {
        match step {
            Step::Close => out.write_char(')')?,
            Step::Visit(id) => match t.node(id) {
                Node::Leaf => out.write_char('L')?,
                Node::Internal { left, right } => {
                    out.write_char('(')?;
                    stack.push(Step::Close);
                    stack.push(Step::Visit(right));
                    stack.push(Step::Visit(left));
                }
            },
        }
    }
    Ok(())
}

pub fn write_framed<W: Write>(t: &Tree, mut out: W) -> io::Result<()> {
    let bits = t.node_count() as u64;
    out.write_all(&bits.to_le_bytes())?;
    let mut packed = vec![0u8; bits.div_ceil(8) as usize];
    for (i, internal) in t.preorder().enumerate() {
        if internal {
            packed[i / 8] |= 1 << (i % 8);
        }
    }
    out.write_all(&packed)
}

/// Reads one framed tree. Returns `Ok(None)` on a clean end of stream.
pub fn read_framed<R: Read>(mut input: R) -> io::Result<Option<Tree>> {
    let mut len = [0u8; 8];
    match input.read_exact(&mut len) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => return Ok(None),
        Err(e) => return Err(e),
    }
    let bits = u64::from_le_bytes(len);
    let mut packed = vec![0u8; bits.div_ceil(8) as usize];
    input.read_exact(&mut packed)?;
    let flags = (0..bits as usize).map(|i| packed[i / 8] >> (i % 8) & 1 == 1);
    Tree::from_preorder(flags)
        .map(Some)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_shapes() {
        assert_eq!(parse_tree("L").unwrap(), Tree::leaf());
        let comb = parse_tree("((LL)L)").unwrap();
        assert_eq!(comb.leaf_count(), 3);
        assert_eq!(format_tree(&comb), "((LL)L)");
        assert_eq!(format_tree(&Tree::leaf()), "L");
        assert_eq!(format_tree(&parse_tree("(LL)").unwrap()), "(LL)");
    }

    #[test]
    fn whitespace_separates_tokens() {
        let t = parse_tree(" ( (L L)\tL )\n").unwrap();
        assert_eq!(format_tree(&t), "((LL)L)");
    }

    #[test]
    fn unbalanced_input_reports_end_of_input() {
        let err = parse_tree("((LL)").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(err.message.contains("end of input"));
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_tree("").unwrap_err().position, 0);
        assert_eq!(parse_tree("(L)").unwrap_err().position, 2);
        assert_eq!(parse_tree("(LLL)").unwrap_err().position, 3);
        assert_eq!(parse_tree("LL").unwrap_err().position, 1);
        assert_eq!(parse_tree(")").unwrap_err().position, 0);
        assert_eq!(parse_tree("(LX)").unwrap_err().position, 2);
        assert_eq!(parse_tree("()").unwrap_err().position, 1);
    }

    #[test]
    fn framed_round_trip() {
        let trees: Vec<Tree> = ["L", "(LL)", "((LL)(L(LL)))"]
            .iter()
            .map(|s| parse_tree(s).unwrap())
            .collect();
        let mut buf = Vec::new();
        for t in &trees {
            write_framed(t, &mut buf).unwrap();
        }
        let mut reader = buf.as_slice();
        let mut back = Vec::new();
        while let Some(t) = read_framed(&mut reader).unwrap() {
            back.push(t);
        }
        assert_eq!(back, trees);
    }

    #[test]
    fn framed_rejects_truncated_shape() {
        let mut buf = Vec::new();
        buf.extend_from_slice(&2u64.to_le_bytes());
        buf.push(0b01);
        assert!(read_framed(buf.as_slice()).is_err());
    }
}
