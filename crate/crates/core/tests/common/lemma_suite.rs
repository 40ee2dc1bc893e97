//! Randomized instances of the seven pattern lemmas. Each instance satisfies
//! the lemma's precondition and its conclusion is checked with the oracle
//! directly, independent of the library's own lemma checks.

use std::collections::{BTreeSet, HashSet};

use gomoku_engine::patterns::{
    a1_a2_decomposition, classify_pattern, combination_attack, combination_victory, intersection_attack, restricted_winner, simple_attack, simple_threat, threat_defence, victory_decomposition, Cell,
    Coord, PatternClass, Player, RestrictedPattern, PATTERN_DIRS,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const X: Player = Player::X;

pub struct LemmaReport {
    pub name: &'static str,
    pub instances: usize,
    pub failures: Vec<String>,
    /// Instances where the result is strictly stronger than the lemma's
    /// exact form: a victory, fewer steps or a smaller defence.
    pub stronger: usize,
    /// Failures where even the category claim (victory, attack, threat)
    /// breaks, not just the step count or the defence.
    pub category_failures: usize,
}

/// Pattern moved so that its bounding box starts at (0,0).
fn normalized(p: &RestrictedPattern) -> RestrictedPattern {
    let r0 = p.squares().map(|c| c.row).min().unwrap_or(0);
    let c0 = p.squares().map(|c| c.col).min().unwrap_or(0);
    p.translated(-r0, -c0)
}

fn key(ps: &[&RestrictedPattern]) -> String {
    ps.iter().map(|p| normalized(p).to_string()).collect::<Vec<_>>().join("|")
}

/// One or two aligned segments of length 5 to 7, each square a stone with
/// probability `dense`.
pub fn random_pattern(rng: &mut impl Rng, dense: f64) -> RestrictedPattern {
    let mut p = RestrictedPattern::new();
    let segments = rng.gen_range(1..=2);
    for _ in 0..segments {
        let (dr, dc) = *PATTERN_DIRS.choose(rng).unwrap();
        let len = rng.gen_range(5..=7);
        let start = Coord::new(rng.gen_range(0..4), rng.gen_range(2..6));
        for k in 0..len {
            let c = start.offset(dr * k, dc * k);
            if !p.contains(c) {
                p.set(c, if rng.gen_bool(dense) { Cell::X } else { Cell::Empty });
            }
        }
    }
    p
}

fn classify(p: &RestrictedPattern) -> Option<PatternClass> {
    if p.len() > 16 || p.empty_count() > 11 {
        return None;
    }
    classify_pattern(p, X).ok()
}

fn at_least(c: &PatternClass, rank: u8, steps: u32) -> bool {
    c.rank() > rank || (c.rank() == rank && c.steps().unwrap_or(u32::MAX) <= steps)
}

fn attack_defence(c: &PatternClass) -> Option<(u32, &BTreeSet<Coord>)> {
    match c {
        PatternClass::Attack { steps, defence, .. } => Some((*steps, defence)),
        _ => None,
    }
}

/// Second pattern under a random symmetry, moved so that a random stone of
/// it lands on a random stone of the first.
fn placed_on(rng: &mut impl Rng, a: &RestrictedPattern, b: &RestrictedPattern) -> Option<RestrictedPattern> {
    let b = b.transformed(rng.gen_range(0..8));
    let fa: Vec<Coord> = a.filled().collect();
    let fb: Vec<Coord> = b.filled().collect();
    let (ta, tb) = (fa.choose(rng)?, fb.choose(rng)?);
    Some(b.translated(ta.row - tb.row, ta.col - tb.col))
}

struct Pools {
    victories: Vec<(RestrictedPattern, u32)>,
    attacks: Vec<(RestrictedPattern, PatternClass)>,
    threats: Vec<RestrictedPattern>,
}

fn pools(rng: &mut impl Rng, want: usize) -> Pools {
    let mut seen = HashSet::new();
    let mut pools = Pools { victories: Vec::new(), attacks: Vec::new(), threats: Vec::new() };
    let mut tries = 0;
    while (pools.victories.len() < want || pools.attacks.len() < want || pools.threats.len() < want) && tries < want * 400 {
        tries += 1;
        let dense = rng.gen_range(0.45..0.8);
        let p = random_pattern(rng, dense);
        if !seen.insert(key(&[&p])) {
            continue;
        }
        match classify(&p) {
            // fives are plentiful; keep mostly victories that take steps
            Some(PatternClass::Victory { steps }) if pools.victories.len() < want && (steps > 0 || rng.gen_bool(0.2)) => {
                pools.victories.push((p, steps))
            }
            Some(c @ PatternClass::Attack { .. }) if pools.attacks.len() < want => pools.attacks.push((p, c)),
            Some(PatternClass::Threat { .. }) if pools.threats.len() < want => pools.threats.push(p),
            _ => {}
        }
    }
    pools
}

fn lemma_simple_attack(pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "simple attack", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    for (v, steps) in pools.victories.iter().take(n) {
        r.instances += 1;
        for s in v.filled() {
            let c = classify_pattern(&v.emptied(s), X).unwrap();
            if !at_least(&c, 2, steps + 1) {
                r.category_failures += usize::from(c.rank() < 2);
                r.failures.push(format!("V{steps} {v:?} emptied at {s} gives {}", c.label()));
            }
        }
        if let Err(e) = simple_attack(v, X) {
            r.failures.push(format!("library rejects V{steps}: {e}"));
        }
    }
    r
}

fn lemma_simple_threat(pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "simple threat", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    for (a, class) in pools.attacks.iter().take(n) {
        r.instances += 1;
        let steps = class.steps().unwrap();
        for s in a.filled() {
            let c = classify_pattern(&a.emptied(s), X).unwrap();
            if !at_least(&c, 1, steps + 1) {
                r.category_failures += usize::from(c.rank() < 1);
                r.failures.push(format!("A{steps} emptied at {s} gives {}", c.label()));
            }
        }
        if let Err(e) = simple_threat(a, X) {
            r.failures.push(format!("library rejects A{steps}: {e}"));
        }
    }
    r
}

/// Pairs of compatible attacks placed on a shared stone, split by whether
/// their defences meet.
fn attack_pairs(
    rng: &mut impl Rng,
    pools: &Pools,
    n: usize,
    disjoint: bool,
) -> Vec<(RestrictedPattern, RestrictedPattern, PatternClass, PatternClass, RestrictedPattern)> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut tries = 0;
    while out.len() < n && tries < n * 400 {
        tries += 1;
        let (a1, _) = pools.attacks.choose(rng).unwrap();
        let (a2, _) = pools.attacks.choose(rng).unwrap();
        let Some(a2) = placed_on(rng, a1, a2) else { continue };
        let Ok(union) = a1.union(&a2) else { continue };
        if union.len() > 16 || union.empty_count() > 11 {
            continue;
        }
        let (Some(c1), Some(c2)) = (classify(a1), classify(&a2)) else { continue };
        let (d1, d2) = (attack_defence(&c1).unwrap().1, attack_defence(&c2).unwrap().1);
        if d1.is_disjoint(d2) != disjoint || !seen.insert(key(&[a1, &a2])) {
            continue;
        }
        out.push((a1.clone(), a2, c1, c2, union));
    }
    out
}

fn lemma_combination_victory(rng: &mut impl Rng, pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "combination victory", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    for (a1, a2, c1, c2, union) in attack_pairs(rng, pools, n, true) {
        r.instances += 1;
        let max = c1.steps().unwrap().max(c2.steps().unwrap());
        let holds = match classify_pattern(&union, X).unwrap() {
            PatternClass::Victory { steps } if steps <= max => true,
            c => {
                r.category_failures += usize::from(!c.is_victory());
                r.failures.push(format!("{} + {} gives {}:\n{union}", c1.label(), c2.label(), c.label()));
                false
            }
        };
        if combination_victory(&a1, &a2, X).is_ok() != holds {
            r.failures.push(format!("library disagrees on {} + {}:\n{union}", c1.label(), c2.label()));
        }
    }
    r
}

fn lemma_intersection_attack(rng: &mut impl Rng, pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "intersection attack", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    for (a1, a2, c1, c2, union) in attack_pairs(rng, pools, n, false) {
        r.instances += 1;
        let (n1, d1) = attack_defence(&c1).unwrap();
        let (n2, d2) = attack_defence(&c2).unwrap();
        let common: BTreeSet<Coord> = d1.intersection(d2).copied().collect();
        // at least an attack of min(n1, n2) steps that every square outside
        // the common defence fails to stop
        let c = classify_pattern(&union, X).unwrap();
        let fast = at_least(&c, 2, n1.min(n2));
        let outside_fails = union.empties().filter(|e| !common.contains(e)).all(|e| !stops(&union, e));
        let holds = fast && outside_fails;
        if intersection_attack(&a1, &a2, X).is_ok() != holds {
            r.failures.push(format!("library disagrees on {} ^ {}:\n{a1}{a2}", c1.label(), c2.label()));
        }
        if !holds {
            r.category_failures += usize::from(c.rank() < 2);
            r.failures.push(format!("{} ^ {} gives {}:\n{a1}{a2}", c1.label(), c2.label(), c.label()));
        } else if attack_defence(&c).map(|x| x.1) != Some(&common) {
            r.stronger += 1;
        }
    }
    r
}

/// True when a PY stone on `e` leaves PX, moving first, without a win in
/// the restricted game.
fn stops(p: &RestrictedPattern, e: Coord) -> bool {
    let mut q = p.clone();
    q.set(e, Cell::O);
    restricted_winner(&q, X).map(|o| o.winner != Some(X)).unwrap_or(false)
}

fn lemma_combination_attack(rng: &mut impl Rng, pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "combination attack", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    let mut seen = HashSet::new();
    let mut tries = 0;
    while r.instances < n && tries < n * 400 {
        tries += 1;
        let t1 = pools.threats.choose(rng).unwrap();
        let t2 = pools.threats.choose(rng).unwrap().transformed(rng.gen_range(0..8));
        let triggers = |t: &RestrictedPattern| -> Vec<(Coord, u32, BTreeSet<Coord>)> {
            t.empties()
                .filter_map(|g| match classify_pattern(&t.filled_with(g, X), X) {
                    Ok(PatternClass::Attack { steps, defence, .. }) => Some((g, steps, defence)),
                    _ => None,
                })
                .collect()
        };
        let (g1s, g2s) = (triggers(t1), triggers(&t2));
        let (Some((g, n1, d1)), Some((g2, _, _))) = (g1s.choose(rng), g2s.choose(rng)) else { continue };
        let t2 = t2.translated(g.row - g2.row, g.col - g2.col);
        let Ok(union) = t1.union(&t2) else { continue };
        if union.len() > 16 || union.empty_count() > 11 || !seen.insert(key(&[t1, &t2])) {
            continue;
        }
        let Ok(d2) = threat_defence(&t2, X, *g) else { continue };
        let n2 = classify_pattern(&t2.filled_with(*g, X), X).unwrap().steps().unwrap();
        if !d1.is_disjoint(&d2) {
            continue;
        }
        r.instances += 1;
        let delta: BTreeSet<Coord> = d1.iter().chain(&d2).copied().chain([*g]).collect();
        let c = classify_pattern(&union, X).unwrap();
        let g_wins = matches!(classify_pattern(&union.filled_with(*g, X), X), Ok(PatternClass::Victory { .. }));
        let outside_fails = union.empties().filter(|e| !delta.contains(e)).all(|e| !stops(&union, e));
        let holds = at_least(&c, 2, 1 + (*n1).max(n2)) && g_wins && outside_fails;
        if combination_attack(t1, &t2, *g, X).is_ok() != holds {
            r.failures.push(format!("library disagrees on T + T at {g}:\n{t1}{t2}"));
        }
        if !holds {
            r.category_failures += usize::from(c.rank() < 2 || !g_wins);
            r.failures.push(format!(
                "T + T at {g} gives {} (n1 {n1} n2 {n2} g_wins {g_wins} outside {outside_fails} delta {delta:?}):\n{t1}{t2}",
                c.label()
            ));
        } else if attack_defence(&c).map(|x| x.1) != Some(&delta) {
            r.stronger += 1;
        }
    }
    r
}

fn lemma_victory_decomposition(pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "victory decomposition", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    for (v, steps) in pools.victories.iter().filter(|v| v.1 >= 1).take(n) {
        r.instances += 1;
        let d = match victory_decomposition(v, X) {
            Ok(d) => d,
            Err(e) => {
                r.category_failures += 1;
                r.failures.push(format!("V{steps}: {e}\n{v}"));
                continue;
            }
        };
        let ok = [&d.first, &d.second].iter().all(|a| a.iter().all(|(c, cell)| v.get(c) == Some(cell)));
        let c1 = classify_pattern(&d.first, X).unwrap();
        let c2 = classify_pattern(&d.second, X).unwrap();
        let disjoint = match (attack_defence(&c1), attack_defence(&c2)) {
            (Some((n1, d1)), Some((n2, d2))) => n1 <= *steps && n2 <= *steps && d1.is_disjoint(d2),
            _ => false,
        };
        if !(ok && disjoint) {
            r.category_failures += 1;
            r.failures.push(format!("V{steps} split into {} and {}\n{v}", c1.label(), c2.label()));
        }
    }
    r
}

fn lemma_a1_a2(pools: &Pools, n: usize) -> LemmaReport {
    let mut r = LemmaReport { name: "one and two step attack decomposition", instances: 0, failures: Vec::new(), stronger: 0, category_failures: 0 };
    for (p, c) in pools.attacks.iter().filter(|(_, c)| c.steps() <= Some(2)).take(n) {
        r.instances += 1;
        let steps = c.steps().unwrap();
        let sub = match a1_a2_decomposition(p, X) {
            Ok(s) => s,
            Err(e) => {
                r.category_failures += 1;
                r.failures.push(format!("A{steps}: {e}\n{p}"));
                continue;
            }
        };
        let inside = sub.iter().all(|s| p.contains(*s));
        let q = p.restricted_to(sub.iter().copied());
        let blocks = blocks_of(&q);
        let degree = |b: &[Coord; 5]| b.iter().filter(|&&c| q.get(c) == Some(Cell::X)).count();
        let ok = match classify_pattern(&q, X).unwrap() {
            // a single block with one empty square
            PatternClass::Attack { steps: 1, .. } => steps == 1 && blocks.len() == 1 && degree(&blocks[0]) == 4,
            // two three-stone blocks meeting in exactly one empty square
            PatternClass::Attack { steps: 2, defence, .. } => {
                steps == 2
                    && defence.len() == 3
                    && blocks.iter().enumerate().any(|(i, a)| {
                        blocks[i + 1..].iter().any(|b| {
                            let shared_empty = a.iter().filter(|c| b.contains(c) && q.get(**c) == Some(Cell::Empty)).count();
                            degree(a) == 3 && degree(b) == 3 && shared_empty == 1
                        })
                    })
            }
            _ => false,
        };
        if !(inside && ok) {
            r.category_failures += 1;
            r.failures.push(format!("A{steps} witness {q}"));
        }
    }
    r
}

/// Every run of five aligned squares of `p`.
fn blocks_of(p: &RestrictedPattern) -> Vec<[Coord; 5]> {
    let mut out = Vec::new();
    for c in p.squares() {
        for (dr, dc) in PATTERN_DIRS {
            let b: [Coord; 5] = std::array::from_fn(|k| c.offset(dr * k as i32, dc * k as i32));
            if b.iter().all(|s| p.contains(*s)) {
                out.push(b);
            }
        }
    }
    out
}

/// Runs every lemma on at least `n` instances where the generator finds
/// that many.
pub fn run_lemma_suite(seed: u64, n: usize) -> Vec<LemmaReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pools = pools(&mut rng, n * 3);
    vec![
        lemma_simple_attack(&pools, n),
        lemma_simple_threat(&pools, n),
        lemma_combination_victory(&mut rng, &pools, n),
        lemma_intersection_attack(&mut rng, &pools, n),
        lemma_combination_attack(&mut rng, &pools, n),
        lemma_victory_decomposition(&pools, n),
        lemma_a1_a2(&pools, n),
    ]
}
