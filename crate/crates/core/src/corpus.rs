//! Bundled example algebras, parsed from the `.alg` files in `corpus/`.

use crate::lie::LieAlgebra;
use crate::specfile::{parse_spec, AlgebraSpec};

pub const ABELIAN1: &str = include_str!("../corpus/abelian1.alg");
pub const ABELIAN2: &str = include_str!("../corpus/abelian2.alg");
pub const ABELIAN3: &str = include_str!("../corpus/abelian3.alg");
pub const HEISENBERG3: &str = include_str!("../corpus/heisenberg3.alg");
pub const SOLVABLE2: &str = include_str!("../corpus/solvable2.alg");
pub const SL2: &str = include_str!("../corpus/sl2.alg");
pub const FAVRE7: &str = include_str!("../corpus/favre7.alg");

/// `(file stem, text)` for every bundled algebra.
pub const ALL: [(&str, &str); 7] = [
    ("abelian1", ABELIAN1),
    ("abelian2", ABELIAN2),
    ("abelian3", ABELIAN3),
    ("heisenberg3", HEISENBERG3),
    ("solvable2", SOLVABLE2),
    ("sl2", SL2),
    ("favre7", FAVRE7),
];

pub fn spec(name: &str) -> Option<AlgebraSpec> {
    ALL.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_spec(text).expect("bundled spec parses"))
}

pub fn all_specs() -> Vec<AlgebraSpec> {
    ALL.iter().map(|(_, text)| parse_spec(text).expect("bundled spec parses")).collect()
}

fn algebra(text: &str) -> LieAlgebra {
    parse_spec(text).expect("bundled spec parses").algebra
}

pub fn abelian(n: usize) -> LieAlgebra {
    match n {
        1 => algebra(ABELIAN1),
        2 => algebra(ABELIAN2),
        3 => algebra(ABELIAN3),
        _ => LieAlgebra::abelian(n),
    }
}

pub fn heisenberg3() -> LieAlgebra {
    algebra(HEISENBERG3)
}

pub fn solvable2() -> LieAlgebra {
    algebra(SOLVABLE2)
}

pub fn sl2() -> LieAlgebra {
    algebra(SL2)
}

pub fn favre7() -> LieAlgebra {
    algebra(FAVRE7)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::validate_lie_algebra;

    #[test]
    fn bundled_specs_are_valid() {
        for s in all_specs() {
            assert!(validate_lie_algebra(&s.algebra).is_valid(), "{}", s.algebra.name());
        }
    }

    #[test]
    fn favre_has_nine_brackets() {
        let a = favre7();
        assert_eq!(a.dim(), 7);
        assert_eq!(a.structure_terms().len(), 9);
    }
}
