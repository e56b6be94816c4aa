mod common;

use common::{brute_force_counts, Family, FAMILIES};
use setcount::exact::count;
use setcount::species::builtin;

#[test]
fn enumeration_recovers_known_totals() {
    // forests on 3 labels: 3 trees, 3 with two components, 1 empty graph
    assert_eq!(brute_force_counts(3, Family::Trees), vec![0, 3, 3, 1]);
    assert_eq!(brute_force_counts(4, Family::Trees)[2], 15);
    // connected on 4 labels: 16 trees, 12 triangles with a pendant edge, 3
    // four-cycles; K4 minus an edge is a single block that is not a cycle
    let cacti = brute_force_counts(4, Family::Cacti);
    assert_eq!(cacti[1], 16 + 12 + 3);
    let husimi = brute_force_counts(4, Family::Husimi);
    assert_eq!(husimi[1], 16 + 12 + 1);
}

#[test]
fn exact_counts_match_enumeration() {
    for (family, name) in FAMILIES {
        let class = builtin(name).unwrap();
        for n in 1..=6 {
            let brute = brute_force_counts(n, family);
            for k in 1..=n {
                let got = count(&class, n, k).unwrap();
                assert_eq!(got.to_string(), brute[k].to_string(), "{name}, n = {n}, k = {k}");
            }
        }
    }
}
