mod common;

use circlab_core::clifford::{C1_ORDER, C2_ORDER};
use circlab_core::{tables, CliffordOne, CliffordTwo};
use common::{one_qubit_word_is_consistent, two_qubit_word_is_consistent};
use std::collections::HashSet;

#[test]
fn every_one_qubit_word_matches_its_action() {
    assert_eq!(tables().one_count(), C1_ORDER);
    let bad: Vec<usize> = CliffordOne::all().filter(|&c| !one_qubit_word_is_consistent(c)).map(|c| c.index()).collect();
    assert!(bad.is_empty(), "inconsistent one-qubit elements: {bad:?}");
}

#[test]
fn every_two_qubit_word_matches_its_action() {
    assert_eq!(tables().two_count(), C2_ORDER);
    let mut actions = HashSet::new();
    for id in 0..C2_ORDER {
        let g = CliffordTwo::from_index(id).unwrap();
        assert!(two_qubit_word_is_consistent(g), "element {id} word {:?}", g.word());
        assert!(actions.insert(g.action()), "duplicate action at {id}");
    }
}
