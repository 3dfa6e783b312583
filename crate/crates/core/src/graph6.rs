//! graph6 encoding (header-less).
//!
//! Size prefix `N(n)` followed by the upper triangle of the adjacency matrix
//! in column-major order, packed six bits per byte and offset by 63.

use crate::graph::{Graph, GraphError};

const MAX_GRAPH6_ORDER: usize = 68_719_476_735;

fn encode_size(n: usize, out: &mut Vec<u8>) {
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        assert!(n <= MAX_GRAPH6_ORDER);
        out.extend([126, 126]);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
}

pub fn encode(g: &Graph) -> Vec<u8> {
    let n = g.vertex_count();
    let mut out = Vec::with_capacity(8 + n * n / 12);
    encode_size(n, &mut out);
    let mut acc = 0u8;
    let mut used = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            used += 1;
            if used == 6 {
                out.push(acc + 63);
                acc = 0;
                used = 0;
            }
        }
    }
    if used > 0 {
        out.push((acc << (6 - used)) + 63);
    }
    out
}

fn sextet(bytes: &[u8], pos: usize) -> Result<u8, GraphError> {
    let b = *bytes
        .get(pos)
        .ok_or_else(|| GraphError::MalformedGraph6("truncated input".into()))?;
    if !(63..=126).contains(&b) {
        return Err(GraphError::MalformedGraph6(format!(
            "byte {b:#04x} at offset {pos} is outside 63..=126"
        )));
    }
    Ok(b - 63)
}

/// Decodes one graph6 record. A trailing newline is tolerated.
pub fn decode(bytes: &[u8]) -> Result<Graph, GraphError> {
    let bytes = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let bytes = bytes.strip_suffix(b"\r").unwrap_or(bytes);
    if bytes.starts_with(b">>graph6<<") {
        return decode(&bytes[10..]);
    }
    let (n, mut pos) = match bytes.first() {
        None => return Err(GraphError::MalformedGraph6("empty input".into())),
        Some(126) if bytes.get(1) == Some(&126) => {
            let mut n = 0usize;
            for k in 2..8 {
                n = (n << 6) | sextet(bytes, k)? as usize;
            }
            (n, 8)
        }
        Some(126) => {
            let mut n = 0usize;
            for k in 1..4 {
                n = (n << 6) | sextet(bytes, k)? as usize;
            }
            (n, 4)
        }
        Some(_) => (sextet(bytes, 0)? as usize, 1),
    };
    let pairs = n * n.saturating_sub(1) / 2;
    let expected = pos + pairs.div_ceil(6);
    if bytes.len() != expected {
        return Err(GraphError::MalformedGraph6(format!(
            "expected {expected} bytes for {n} vertices, got {}",
            bytes.len()
        )));
    }
    let mut edges = Vec::new();
    let mut bit = 0;
    let mut cur = 0u8;
    for j in 1..n {
        for i in 0..j {
            if bit == 0 {
                cur = sextet(bytes, pos)?;
                pos += 1;
            }
            if (cur >> (5 - bit)) & 1 == 1 {
                edges.push((i, j));
            }
            bit = (bit + 1) % 6;
        }
    }
    if bit != 0 && cur & ((1 << (6 - bit)) - 1) != 0 {
        return Err(GraphError::MalformedGraph6("nonzero padding bits".into()));
    }
    Graph::from_edges(n, edges)
}
