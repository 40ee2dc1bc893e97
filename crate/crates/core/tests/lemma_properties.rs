mod common;

use common::lemma_suite::run_lemma_suite;

/// Victories, attacks and threats come out where each lemma says they do.
/// Step counts and defences are reported; the sweep in the acceptance
/// target holds them to the exact statements.
#[test]
fn lemma_categories_hold_on_random_instances() {
    for r in run_lemma_suite(5, 300) {
        println!(
            "{}: {} instances, {} failures ({} in category), {} stronger",
            r.name,
            r.instances,
            r.failures.len(),
            r.category_failures,
            r.stronger
        );
        assert!(r.instances >= 300, "{} has only {} instances", r.name, r.instances);
        for f in r.failures.iter().take(4) { println!("{f}"); }
        assert_eq!(r.category_failures, 0, "{}: {:?}", r.name, r.failures.first());
    }
}

/// Two threats on one row sharing the trigger at (1,4). The second threat
/// also uses a diagonal. Stopping the first attack at (1,5) leaves the
/// second alive but a step slower, and a stone on the diagonal at (0,1)
/// stops the union although it lies outside both trigger defences.
#[test]
fn stopping_one_attack_can_slow_the_other() {
    use gomoku_engine::patterns::{
        classify_pattern, combination_attack, combination_victory, threat_defence, Coord, Player, RestrictedPattern,
    };
    let x = Player::X;
    let t1 = RestrictedPattern::parse("@1,4\n+++XX+X\n").unwrap();
    let t2 = RestrictedPattern::parse("@-2,-2\n     +\n    X\n   +\n  +X+X++\n X\n+\n").unwrap();
    let g = Coord::new(1, 4);
    let a1 = t1.filled_with(g, x);
    let a2 = t2.filled_with(g, x);
    assert_eq!(classify_pattern(&a1, x).unwrap().label(), "A2");
    assert_eq!(classify_pattern(&a2, x).unwrap().label(), "A2");
    let d1 = threat_defence(&t1, x, g).unwrap();
    let d2 = threat_defence(&t2, x, g).unwrap();
    assert!(d1.is_disjoint(&d2));

    // two A2 with disjoint defences, yet three steps are needed
    assert_eq!(classify_pattern(&a1.union(&a2).unwrap(), x).unwrap().label(), "V3");
    assert!(combination_victory(&a1, &a2, x).is_err());

    let union = classify_pattern(&t1.union(&t2).unwrap(), x).unwrap();
    assert_eq!(union.label(), "A4");
    let gomoku_engine::patterns::PatternClass::Attack { triggers, defence, .. } = union else { unreachable!() };
    assert!(triggers.contains(&g));
    assert!(defence.contains(&Coord::new(0, 1)));
    assert!(!d1.contains(&Coord::new(0, 1)) && !d2.contains(&Coord::new(0, 1)));
    assert!(combination_attack(&t1, &t2, g, x).is_err());
}
