//! Quasi-surfaces shipped with the crate.
//!
//! - `qt2`: one disk with two gates glued to one point (an annulus), rank 1.
//! - `qg1`: one disk with four gates, opposite gates glued to a common point;
//!   the cut model of a one-holed torus, rank 2.
//! - `qd2`: two disks with two gates each, glued to the ends of an edge, rank 2.
//! - `qp3`: one disk with three gates glued to one point (a pair of pants), rank 2.
//! - `qy2`: one disk with two gates glued to a graph containing a cycle, rank 2.

use crate::surface::QuasiSurface;

pub const QT2: &str = include_str!("../fixtures/qt2.json");
pub const QG1: &str = include_str!("../fixtures/qg1.json");
pub const QD2: &str = include_str!("../fixtures/qd2.json");
pub const QP3: &str = include_str!("../fixtures/qp3.json");
pub const QY2: &str = include_str!("../fixtures/qy2.json");

pub const NAMES: [&str; 5] = ["qt2", "qg1", "qd2", "qp3", "qy2"];

fn load(src: &str) -> QuasiSurface {
    QuasiSurface::from_json_str(src).expect("shipped fixture is valid")
}

pub fn qt2() -> QuasiSurface {
    load(QT2)
}

pub fn qg1() -> QuasiSurface {
    load(QG1)
}

pub fn qd2() -> QuasiSurface {
    load(QD2)
}

pub fn qp3() -> QuasiSurface {
    load(QP3)
}

pub fn qy2() -> QuasiSurface {
    load(QY2)
}

pub fn by_name(name: &str) -> Option<QuasiSurface> {
    match name {
        "qt2" => Some(qt2()),
        "qg1" => Some(qg1()),
        "qd2" => Some(qd2()),
        "qp3" => Some(qp3()),
        "qy2" => Some(qy2()),
        _ => None,
    }
}

pub fn all() -> Vec<QuasiSurface> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}
