//! Plain-text mesh format.
//!
//! ```text
//! vertices N triangles M edges K
//! x y          (N rows)
//! a b c        (M rows, counterclockwise vertex indices)
//! t e          (K rows, boundary edge as triangle and local edge)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Meshes read from a
//! file are straight-sided polygons.

use std::io::{BufRead, Write};

use super::{Domain, Mesh, MeshError};

pub fn read_mesh<R: BufRead>(reader: R) -> Result<Mesh, MeshError> {
    let mut lines = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            lines.push(trimmed.to_string());
        }
    }
    let mut it = lines.iter();
    let header = it.next().ok_or_else(|| MeshError::Format("empty file".into()))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    if words.len() != 6 || words[0] != "vertices" || words[2] != "triangles" || words[4] != "edges" {
        return Err(MeshError::Format(format!("bad header {header:?}")));
    }
    let count = |w: &str| {
        w.parse::<usize>()
            .map_err(|_| MeshError::Format(format!("bad count {w:?}")))
    };
    let (nv, nt, ne) = (count(words[1])?, count(words[3])?, count(words[5])?);

    let mut row = |what: &str, width: usize| -> Result<Vec<&str>, MeshError> {
        let line = it
            .next()
            .ok_or_else(|| MeshError::Format(format!("missing {what} row")))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != width {
            return Err(MeshError::Format(format!("{what} row {line:?} needs {width} fields")));
        }
        Ok(fields)
    };
    let float = |w: &str| {
        w.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| MeshError::Format(format!("bad coordinate {w:?}")))
    };
    let int = |w: &str| {
        w.parse::<usize>()
            .map_err(|_| MeshError::Format(format!("bad index {w:?}")))
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let f = row("vertex", 2)?;
        vertices.push([float(f[0])?, float(f[1])?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let f = row("triangle", 3)?;
        triangles.push([int(f[0])?, int(f[1])?, int(f[2])?]);
    }
    let mut boundary = Vec::with_capacity(ne);
    for _ in 0..ne {
        let f = row("edge", 2)?;
        boundary.push((int(f[0])?, int(f[1])?));
    }
    if it.next().is_some() {
        return Err(MeshError::Format("trailing rows after boundary edges".into()));
    }
    for (t, tri) in triangles.iter().enumerate() {
        if tri.iter().all(|&v| v < nv) {
            let [a, b, c] = tri.map(|v| vertices[v]);
            let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            if area2 <= 0.0 {
                return Err(MeshError::Invalid(format!("triangle {t} is not counterclockwise")));
            }
        }
    }
    Mesh::from_parts(Domain::Polygon, vertices, triangles, Some(boundary), 1)
}

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> Result<(), MeshError> {
    writeln!(
        out,
        "vertices {} triangles {} edges {}",
        mesh.n_vertices(),
        mesh.n_triangles(),
        mesh.boundary_edges().len()
    )?;
    for v in mesh.vertices() {
        writeln!(out, "{:.17e} {:.17e}", v[0], v[1])?;
    }
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    for b in mesh.boundary_edges() {
        writeln!(out, "{} {}", b.triangle, b.local_edge)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "vertices 4 triangles 2 edges 4\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3\n0 0\n0 1\n1 1\n1 2\n";
        let mesh = read_mesh(text.as_bytes()).unwrap();
        assert_eq!(mesh.n_triangles(), 2);
        assert_eq!(mesh.boundary_edges().len(), 4);
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let again = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(again.triangles(), mesh.triangles());
        assert_eq!(again.vertices(), mesh.vertices());
        assert_eq!(again.boundary_edges(), mesh.boundary_edges());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(read_mesh("".as_bytes()).is_err());
        assert!(read_mesh("vertices 1 triangles 0".as_bytes()).is_err());
        let clockwise = "vertices 3 triangles 1 edges 0\n0 0\n0 1\n1 0\n0 1 2\n";
        assert!(read_mesh(clockwise.as_bytes()).is_err());
        let missing = "vertices 3 triangles 1 edges 0\n0 0\n1 0\n0 1\n0 1 5\n";
        assert!(read_mesh(missing.as_bytes()).is_err());
    }

    #[test]
    fn polygon_refinement_keeps_boundary() {
        let text = "vertices 3 triangles 1 edges 3\n0 0\n1 0\n0 1\n0 1 2\n0 0\n0 1\n0 2\n";
        let mesh = read_mesh(text.as_bytes()).unwrap();
        let fine = mesh.refine().refine();
        assert_eq!(fine.boundary_edges().len(), 12);
        assert_eq!(fine.euler_characteristic(), 1);
    }
}
