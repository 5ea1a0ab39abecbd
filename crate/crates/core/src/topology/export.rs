//! Plain-text mesh and field dumps for external plotting.

use std::fmt::Write;

use super::field::DynamicalField;
use super::mesh::BisMesh;
use crate::format::fmt_sig;

/// OFF file: header, `kx ky kz` per vertex, `3 a b c` per triangle.
pub fn mesh_to_off(mesh: &BisMesh) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} 0", mesh.vertices.len(), mesh.triangles.len()).unwrap();
    for k in &mesh.vertices {
        writeln!(s, "{} {} {}", fmt_sig(k.kx), fmt_sig(k.ky), fmt_sig(k.kz)).unwrap();
    }
    for t in &mesh.triangles {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    s
}

pub const FIELD_CSV_HEADER: &str = "kx,ky,kz,g1,g2,g3,flagged";

/// One row per vertex: position, unnormalized `g`, and the flag bit.
pub fn field_to_csv(mesh: &BisMesh, field: &DynamicalField) -> String {
    let mut s = String::new();
    writeln!(s, "{FIELD_CSV_HEADER}").unwrap();
    for (k, (g, u)) in mesh.vertices.iter().zip(field.g.iter().zip(&field.unit)) {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            fmt_sig(k.kx),
            fmt_sig(k.ky),
            fmt_sig(k.kz),
            fmt_sig(g[0]),
            fmt_sig(g[1]),
            fmt_sig(g[2]),
            u64::from(u.is_none())
        )
        .unwrap();
    }
    s
}
