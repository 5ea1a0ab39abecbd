//! Band-inversion surfaces, offset shells, the dynamical field and the
//! winding number it encodes.

mod export;
mod field;
mod mesh;
mod shells;
mod slice;
mod winding;

pub use export::{field_to_csv, mesh_to_off, FIELD_CSV_HEADER};
pub use field::{dynamical_field, normalize, DynamicalField};
pub use mesh::{extract_bis_mesh, refine_vertex, BisMesh, MeshStats};
pub use shells::{offset_shells, ShellPair, DEFAULT_DELTA};
pub use slice::{find_bis_slice, slice_coordinate, Contour};
pub use winding::{
    signed_solid_angle, so_field_units, winding_from_units, winding_number,
    winding_number_analytic_oracle, ORIENTATION_SIGN,
};
