//! Pattern construction lemmas. Each constructor checks its preconditions,
//! builds the pattern and confirms the stated conclusion with the oracle.

use std::collections::BTreeSet;

use super::oracle::{block_degree, pattern_blocks};
use super::{
    classify_pattern, threat_defence, w3_placements, Cell, Coord, PatternClass, Player,
    RestrictedPattern,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaWitness {
    pub inputs: Vec<RestrictedPattern>,
    pub output: RestrictedPattern,
    pub class: PatternClass,
}

/// Two attacks with disjoint defences found inside a victory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub first: RestrictedPattern,
    pub first_class: PatternClass,
    pub second: RestrictedPattern,
    pub second_class: PatternClass,
}

fn attack_parts(c: &PatternClass) -> Option<(u32, &BTreeSet<Coord>, &BTreeSet<Coord>)> {
    match c {
        PatternClass::Attack { steps, triggers, defence } => Some((*steps, triggers, defence)),
        _ => None,
    }
}

/// Category and steps only: is `c` at least as strong as a pattern of rank
/// `rank` with `steps` steps?
fn at_least(c: &PatternClass, rank: u8, steps: u32) -> bool {
    c.rank() > rank || (c.rank() == rank && c.steps().unwrap_or(u32::MAX) <= steps)
}

fn emptied_each(p: &RestrictedPattern, owner: Player, rank: u8, steps: u32) -> Result<Vec<LemmaWitness>> {
    let stones: Vec<Coord> = p.filled().collect();
    let mut out = Vec::with_capacity(stones.len());
    for c in stones {
        let q = p.emptied(c);
        let class = classify_pattern(&q, owner)?;
        if !at_least(&class, rank, steps) {
            return Err(Error::Contract(format!("emptying {c} gave {}", class.label())));
        }
        out.push(LemmaWitness { inputs: vec![p.clone()], output: q, class });
    }
    Ok(out)
}

/// Empties each stone of a victory of `n` steps; every result is an attack
/// of at most `n + 1` steps or something stronger.
pub fn simple_attack(v: &RestrictedPattern, owner: Player) -> Result<Vec<LemmaWitness>> {
    match classify_pattern(v, owner)? {
        PatternClass::Victory { steps } => emptied_each(v, owner, 2, steps + 1),
        other => Err(Error::Domain(format!("expected a victory, got {}", other.label()))),
    }
}

/// Empties each stone of an attack of `n` steps; every result is a threat of
/// at most `n + 1` steps or something stronger.
pub fn simple_threat(a: &RestrictedPattern, owner: Player) -> Result<Vec<LemmaWitness>> {
    match classify_pattern(a, owner)? {
        PatternClass::Attack { steps, .. } => emptied_each(a, owner, 1, steps + 1),
        other => Err(Error::Domain(format!("expected an attack, got {}", other.label()))),
    }
}

fn two_attacks(
    a1: &RestrictedPattern,
    a2: &RestrictedPattern,
    owner: Player,
) -> Result<(PatternClass, PatternClass, RestrictedPattern)> {
    let c1 = classify_pattern(a1, owner)?;
    let c2 = classify_pattern(a2, owner)?;
    if !c1.is_attack() || !c2.is_attack() {
        return Err(Error::Precondition(format!("inputs are {} and {}", c1.label(), c2.label())));
    }
    let union = a1.union(a2)?;
    Ok((c1, c2, union))
}

/// Union of two attacks with disjoint defences: a victory of at most
/// `max(n1, n2)` steps. The step bound can fail when the stone that stops
/// one attack also slows the other; that is reported as a contract error.
pub fn combination_victory(a1: &RestrictedPattern, a2: &RestrictedPattern, owner: Player) -> Result<LemmaWitness> {
    let (c1, c2, union) = two_attacks(a1, a2, owner)?;
    let (n1, _, d1) = attack_parts(&c1).unwrap();
    let (n2, _, d2) = attack_parts(&c2).unwrap();
    if !d1.is_disjoint(d2) {
        return Err(Error::Precondition("attack defences overlap".into()));
    }
    let class = classify_pattern(&union, owner)?;
    match class {
        PatternClass::Victory { steps } if steps <= n1.max(n2) => {}
        _ => return Err(Error::Contract(format!("union is {}", class.label()))),
    }
    Ok(LemmaWitness { inputs: vec![a1.clone(), a2.clone()], output: union, class })
}

/// Union of two attacks whose defences meet: an attack of at most
/// `min(n1, n2)` steps whose defence lies inside the common defence squares,
/// or a victory. Stones of one attack can join the other's lines, so the
/// union may be stronger than either part.
pub fn intersection_attack(a1: &RestrictedPattern, a2: &RestrictedPattern, owner: Player) -> Result<LemmaWitness> {
    let (c1, c2, union) = two_attacks(a1, a2, owner)?;
    let (n1, _, d1) = attack_parts(&c1).unwrap();
    let (n2, _, d2) = attack_parts(&c2).unwrap();
    let common: BTreeSet<Coord> = d1.intersection(d2).copied().collect();
    if common.is_empty() {
        return Err(Error::Precondition("attack defences are disjoint".into()));
    }
    let class = classify_pattern(&union, owner)?;
    match &class {
        PatternClass::Victory { .. } => {}
        PatternClass::Attack { steps, defence, .. } if *steps <= n1.min(n2) && defence.is_subset(&common) => {}
        _ => return Err(Error::Contract(format!("union is {} with defence size {}", class.label(), class.defence_size()))),
    }
    Ok(LemmaWitness { inputs: vec![a1.clone(), a2.clone()], output: union, class })
}

/// Union of two threats sharing trigger `g` with disjoint defences for it:
/// an attack triggered at `g`, defended by `g` plus both defences, of
/// `1 + max(n1, n2)` steps, or something stronger. The claim can fail when
/// stopping one attack slows the other; the oracle's verdict is then
/// reported as a contract error.
pub fn combination_attack(
    t1: &RestrictedPattern,
    t2: &RestrictedPattern,
    g: Coord,
    owner: Player,
) -> Result<LemmaWitness> {
    for t in [t1, t2] {
        let c = classify_pattern(t, owner)?;
        if !c.is_threat() {
            return Err(Error::Precondition(format!("input is {} not a threat", c.label())));
        }
        if t.get(g) != Some(Cell::Empty) {
            return Err(Error::Precondition(format!("{g} is not an empty square of both threats")));
        }
    }
    let mut steps = 0;
    let mut defences = Vec::new();
    for t in [t1, t2] {
        match classify_pattern(&t.filled_with(g, owner), owner)? {
            PatternClass::Attack { steps: n, .. } => steps = steps.max(n),
            _ => return Err(Error::Precondition(format!("{g} is not a trigger of both threats"))),
        }
        defences.push(threat_defence(t, owner, g)?);
    }
    if !defences[0].is_disjoint(&defences[1]) {
        return Err(Error::Precondition("trigger defences overlap".into()));
    }
    let union = t1.union(t2)?;
    let expected: BTreeSet<Coord> = defences.concat_sets().chain([g]).collect();
    let class = classify_pattern(&union, owner)?;
    match &class {
        PatternClass::Victory { .. } => {}
        PatternClass::Attack { steps: n, triggers, defence }
            if *n <= steps + 1 && triggers.contains(&g) && defence.is_subset(&expected) => {}
        _ => return Err(Error::Contract(format!("union is {} with defence size {}", class.label(), class.defence_size()))),
    }
    Ok(LemmaWitness { inputs: vec![t1.clone(), t2.clone()], output: union, class })
}

trait ConcatSets {
    fn concat_sets(&self) -> std::vec::IntoIter<Coord>;
}

impl ConcatSets for Vec<BTreeSet<Coord>> {
    fn concat_sets(&self) -> std::vec::IntoIter<Coord> {
        self.iter().flatten().copied().collect::<Vec<_>>().into_iter()
    }
}

/// Two attacks with disjoint defences and at most `n` steps inside a victory
/// of `n >= 1` steps. Candidates are unions of up to four blocks of the
/// pattern, smallest first.
pub fn victory_decomposition(v: &RestrictedPattern, owner: Player) -> Result<Decomposition> {
    let n = match classify_pattern(v, owner)? {
        PatternClass::Victory { steps: 0 } => {
            return Err(Error::Domain("a five has nothing to decompose".into()))
        }
        PatternClass::Victory { steps } => steps,
        other => return Err(Error::Domain(format!("expected a victory, got {}", other.label()))),
    };
    let blocks: Vec<BTreeSet<Coord>> = pattern_blocks(v)
        .into_iter()
        .filter(|b| block_degree(v, b, owner).is_some_and(|d| d > 0))
        .map(|b| b.into_iter().collect())
        .collect();
    let mut seen: BTreeSet<BTreeSet<Coord>> = BTreeSet::new();
    let mut attacks: Vec<(RestrictedPattern, PatternClass)> = Vec::new();
    let mut frontier: Vec<(usize, BTreeSet<Coord>)> = vec![(0, BTreeSet::new())];
    for _ in 0..4 {
        let mut next = Vec::new();
        for (start, squares) in &frontier {
            for (i, b) in blocks.iter().enumerate().skip(*start) {
                let u: BTreeSet<Coord> = squares.union(b).copied().collect();
                if !seen.insert(u.clone()) {
                    continue;
                }
                next.push((i + 1, u.clone()));
                let sub = v.restricted_to(u);
                let class = classify_pattern(&sub, owner)?;
                let Some((steps, _, defence)) = attack_parts(&class) else { continue };
                if steps > n {
                    continue;
                }
                let partner = attacks.iter().find(|(_, c)| {
                    attack_parts(c).is_some_and(|(_, _, d)| d.is_disjoint(defence))
                });
                if let Some((p, c)) = partner {
                    return Ok(Decomposition {
                        first: p.clone(),
                        first_class: c.clone(),
                        second: sub,
                        second_class: class,
                    });
                }
                attacks.push((sub, class));
            }
        }
        frontier = next;
    }
    Err(Error::Contract("no pair of attacks with disjoint defences found".into()))
}

/// The S4 inside a one-step attack or the W3 inside a two-step attack.
pub fn a1_a2_decomposition(p: &RestrictedPattern, owner: Player) -> Result<BTreeSet<Coord>> {
    match classify_pattern(p, owner)? {
        PatternClass::Attack { steps: 1, .. } => pattern_blocks(p)
            .into_iter()
            .find(|b| block_degree(p, b, owner) == Some(4))
            .map(|b| b.into_iter().collect())
            .ok_or_else(|| Error::Contract("one-step attack without a simple four".into())),
        PatternClass::Attack { steps: 2, .. } => w3_placements(p, owner)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Contract("two-step attack without a weak three".into())),
        other => Err(Error::Domain(format!("expected A1 or A2, got {}", other.label()))),
    }
}
