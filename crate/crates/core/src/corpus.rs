//! The bundled example polyhedra.

use crate::poly_model::{parse_polyhedron, LabeledPolyhedron};

pub const TETRAHEDRON: &str = include_str!("../corpus/tetrahedron.apoly");
pub const CUBE_ALL2: &str = include_str!("../corpus/cube_all2.apoly");
pub const LAMBERT_CUBE: &str = include_str!("../corpus/lambert_cube.apoly");
pub const TRIANGULAR_PRISM: &str = include_str!("../corpus/triangular_prism.apoly");
pub const PYRAMID: &str = include_str!("../corpus/pyramid.apoly");

/// `(file name, contents)` for every bundled file.
pub const ALL: [(&str, &str); 5] = [
    ("tetrahedron.apoly", TETRAHEDRON),
    ("cube_all2.apoly", CUBE_ALL2),
    ("lambert_cube.apoly", LAMBERT_CUBE),
    ("triangular_prism.apoly", TRIANGULAR_PRISM),
    ("pyramid.apoly", PYRAMID),
];

fn load(text: &str) -> LabeledPolyhedron {
    parse_polyhedron(text).expect("bundled corpus parses").polyhedron
}

pub fn tetrahedron() -> LabeledPolyhedron {
    load(TETRAHEDRON)
}

pub fn cube_all2() -> LabeledPolyhedron {
    load(CUBE_ALL2)
}

pub fn lambert_cube() -> LabeledPolyhedron {
    load(LAMBERT_CUBE)
}

pub fn triangular_prism() -> LabeledPolyhedron {
    load(TRIANGULAR_PRISM)
}

pub fn pyramid() -> LabeledPolyhedron {
    load(PYRAMID)
}
