//! Builtin scenarios: the five dodecahedral cube measurements, the three
//! hexagon measurements, and a single cube as a colorable control.

use alloc::string::String;
use alloc::vec::Vec;

use crate::contextuality::{Admission, Scenario};
use crate::effects::effect_from_direction;
use crate::exactnum::Rational;
use crate::geometry::{
    axis_aligned_cube, dodecahedron_vertices, find_inscribed_cubes, hexagon_directions, Label,
    VertexSet,
};

pub const BUILTIN_NAMES: [&str; 3] = ["dodecahedron", "hexagon", "cube"];

pub fn builtin(name: &str) -> Option<Scenario> {
    match name {
        "dodecahedron" => Some(dodecahedron_scenario()),
        "hexagon" => Some(hexagon_scenario()),
        "cube" => Some(cube_scenario()),
        _ => None,
    }
}

/// Effects of weight `weight` on the given signed labels of `vs`, with one
/// context per label group.
fn scenario_on(
    name: &str,
    vs: &VertexSet,
    members: &[Label],
    weight: Rational,
    contexts: Vec<Vec<Label>>,
) -> Scenario {
    let effects = members
        .iter()
        .map(|l| {
            let v = vs.get(l).expect("label of this vertex set");
            effect_from_direction(l.clone(), v.coords.clone(), weight.clone())
                .expect("nonzero direction, weight in range")
        })
        .collect();
    Scenario::from_effects(String::from(name), effects, contexts, Admission::default())
        .expect("builtin scenarios are realizable")
}

/// All 20 vertices at weight ¼, one eight-outcome context per inscribed cube
/// in discovery order.
pub fn dodecahedron_scenario() -> Scenario {
    let vs = dodecahedron_vertices();
    let members: Vec<Label> = vs.vertices().iter().map(|v| v.label.clone()).collect();
    let contexts = find_inscribed_cubes(&vs)
        .iter()
        .map(|c| c.member_labels())
        .collect();
    scenario_on(
        "dodecahedron",
        &vs,
        &members,
        Rational::frac(1, 4),
        contexts,
    )
}

/// Six effects of weight ½ and the three four-outcome measurements on pairs
/// of directions: `{A, B}`, `{B, C}`, `{A, C}`.
pub fn hexagon_scenario() -> Scenario {
    let vs = hexagon_directions();
    let members: Vec<Label> = vs.vertices().iter().map(|v| v.label.clone()).collect();
    let pair = |a: &str, b: &str| {
        alloc::vec![
            Label::plus(a),
            Label::minus(a),
            Label::plus(b),
            Label::minus(b)
        ]
    };
    let contexts = alloc::vec![pair("A", "B"), pair("B", "C"), pair("A", "C")];
    scenario_on("hexagon", &vs, &members, Rational::frac(1, 2), contexts)
}

/// The single cube `(±1, ±1, ±1)` of the dodecahedron as one context.
pub fn cube_scenario() -> Scenario {
    let vs = dodecahedron_vertices();
    let cube = axis_aligned_cube(&vs).expect("the dodecahedron contains (±1, ±1, ±1)");
    let members = cube.member_labels();
    scenario_on(
        "cube",
        &vs,
        &members,
        Rational::frac(1, 4),
        alloc::vec![members.clone()],
    )
}
