//! Closed-form classifiers. None of these touch the automorphism engine
//! except the valency-4 Moebius-prism comparison.

use crate::abelian::{AbelianGroup, GroupElement};
use crate::aut::{canonical_form_with, EngineConfig};
use crate::cayley::{cayley_graph, ConnectionSet, GridKind, GridParams};

use super::{cayley_is_bipartite, ClassificationVerdict, StabilityError, TrivialReason};

fn rem(x: i64, n: i64) -> i64 {
    x.rem_euclid(n)
}

fn same_mod(x: i64, y: i64, n: i64) -> bool {
    rem(x - y, n) == 0
}

fn plus_minus(x: i64, y: i64, n: i64) -> bool {
    same_mod(x, y, n) || same_mod(x, -y, n)
}

/// Dispatches on the grid kind.
pub fn classify_grid(p: &GridParams) -> ClassificationVerdict {
    match p.kind {
        GridKind::Qd => classify_qd(p),
        GridKind::Tr => classify_tr(p),
    }
}

/// `Qd(m,n,r)`: bipartite iff `n` and `m + r` are even, twins iff `m = 2`
/// and `r = ±2`, otherwise the two nontrivial families.
pub fn classify_qd(p: &GridParams) -> ClassificationVerdict {
    let (m, n, r) = (p.m as i64, p.n as i64, p.r as i64);
    if n % 2 == 0 && (m + r) % 2 == 0 {
        return ClassificationVerdict::trivial(TrivialReason::Bipartite, "Rem1.8(a)");
    }
    if m == 2 && plus_minus(r, 2, n) {
        return ClassificationVerdict::trivial(TrivialReason::TwinVertices, "Rem1.8(b)");
    }
    // Qd(m, 4k, ±k) with m + k odd
    if n % 4 == 0 {
        let k = n / 4;
        if (m + k) % 2 == 1 && plus_minus(r, k, n) {
            return ClassificationVerdict::nontrivial("Thm1.4(1)", &[("k", k)]);
        }
    }
    if let Some((k, l, mm)) = qd_square_family(m, n, r) {
        return ClassificationVerdict::nontrivial("Thm1.4(2)", &[("k", k), ("l", l), ("m", mm)]);
    }
    ClassificationVerdict::stable()
}

fn square_condition(k: i64, l: i64) -> bool {
    plus_minus(4 * l * l, 1, k)
}

/// Both printed forms of the second family: `Qd(2m', km', ±4ℓm')` and
/// `Qd(m', 2km', ±2ℓm')` with `m'` odd. Returns `(k, ℓ, m')`.
fn qd_square_family(m: i64, n: i64, r: i64) -> Option<(i64, i64, i64)> {
    if m % 2 == 0 && (m / 2) % 2 == 1 {
        let mm = m / 2;
        if n % mm == 0 {
            let k = n / mm;
            for l in 0..k {
                let side = mm > 1 || !plus_minus(2 * l, 1, k);
                if square_condition(k, l) && side && plus_minus(r, 4 * l * mm, n) {
                    return Some((k, l, mm));
                }
            }
        }
    }
    if m % 2 == 1 && m > 1 && n % (2 * m) == 0 {
        let k = n / (2 * m);
        for l in 0..k {
            if square_condition(k, l) && plus_minus(r, 2 * l * m, n) {
                return Some((k, l, m));
            }
        }
    }
    None
}

/// `Tr(m,n,r)`. `Tr(2,n,1)` has `a + b = -a`, so it is the valency-4 grid
/// `Qd(2,n,1)` and is classified as such.
pub fn classify_tr(p: &GridParams) -> ClassificationVerdict {
    let (m, n, r) = (p.m as i64, p.n as i64, p.r as i64);
    if m == 2 && r == 1 {
        return classify_qd(&GridParams::qd(2, n, 1).expect("valid"));
    }
    let partner = rem(m - r, n);
    let is = |mm: i64, nn: i64, rr: i64| {
        [r, partner]
            .iter()
            .any(|&x| m == mm && n == nn && same_mod(x, rr, n))
    };
    if is(2, 4, 3) || is(3, 3, 0) {
        return ClassificationVerdict::trivial(TrivialReason::TwinVertices, "Rem1.8(d)");
    }
    if let Some((clause, k)) = tr_clauses(m, n, [r, partner]).into_iter().next() {
        let params: Vec<(&str, i64)> = k.map(|k| vec![("k", k)]).unwrap_or_default();
        return ClassificationVerdict::nontrivial(clause, &params);
    }
    ClassificationVerdict::stable()
}

fn tr_clauses(m: i64, n: i64, rs: [i64; 2]) -> Vec<(&'static str, Option<i64>)> {
    let hit = |rr: i64| rs.iter().any(|&x| same_mod(x, rr, n));
    let mut out = Vec::new();
    // (1) Tr(2,4k,4) ≅ Tr(2,4k,-2) ≅ Tr(4,2k,2)
    if m == 2 && n % 4 == 0 && (hit(4) || hit(-2)) {
        out.push(("Thm1.5(1)", Some(n / 4)));
    }
    if m == 4 && n % 2 == 0 && hit(2) {
        out.push(("Thm1.5(1)", Some(n / 2)));
    }
    // (2) Tr(2,4k,2k+1)
    if m == 2 && n % 4 == 0 && hit(n / 2 + 1) {
        out.push(("Thm1.5(2)", Some(n / 4)));
    }
    // (3) Tr(2,4k,2k) ≅ Tr(2,4k,2k+2) ≅ Tr(2k,4,2)
    if m == 2 && n % 4 == 0 && (hit(n / 2) || hit(n / 2 + 2)) {
        out.push(("Thm1.5(3)", Some(n / 4)));
    }
    if m % 2 == 0 && n == 4 && hit(2) {
        out.push(("Thm1.5(3)", Some(m / 2)));
    }
    // (4) Tr(4,2k,0) ≅ Tr(4,2k,4) ≅ Tr(2k,4,0)
    if m == 4 && n % 2 == 0 && (hit(0) || hit(4)) {
        out.push(("Thm1.5(4)", Some(n / 2)));
    }
    if m % 2 == 0 && n == 4 && hit(0) {
        out.push(("Thm1.5(4)", Some(m / 2)));
    }
    // (5) Tr(2k,4,1) with k > 1, or Tr(2k,4,-1)
    if m % 2 == 0 && n == 4 && ((m > 2 && hit(1)) || hit(-1)) {
        out.push(("Thm1.5(5)", Some(m / 2)));
    }
    // (6) Tr(4,2,1), Tr(4,3,-1)
    if (m == 4 && n == 2 && hit(1)) || (m == 4 && n == 3 && hit(-1)) {
        out.push(("Thm1.5(6)", None));
    }
    out
}

fn check_generating(g: &AbelianGroup, gens: &[GroupElement]) -> Result<(), StabilityError> {
    for x in gens {
        if !g.contains(x) {
            return Err(crate::abelian::GroupError::ForeignElement(x.to_string()).into());
        }
    }
    if g.generates(gens) {
        Ok(())
    } else {
        Err(StabilityError::NotGenerating)
    }
}

/// Parameters of the square family for the ordered pair `(a, b)`:
/// `m = |G:<b>|`, `|b| = 2km`, `m·a = 2ℓm·b`, `4ℓ² ≡ ±1 (mod k)`.
pub(crate) fn val4_square_params(
    g: &AbelianGroup,
    a: &GroupElement,
    b: &GroupElement,
) -> Option<(i64, i64, i64)> {
    let nb = g.element_order(b) as i64;
    let m = g.subgroup_index(b) as i64;
    if nb % (2 * m) != 0 {
        return None;
    }
    let k = nb / (2 * m);
    let ma = g.scalar_multiply(m, a);
    (0..k)
        .find(|&l| square_condition(k, l) && g.scalar_multiply(2 * l * m, b) == ma)
        .map(|l| (k, l, m))
}

/// `Cay(G; ±a, ±b)` with four distinct elements.
pub fn classify_val4(
    g: &AbelianGroup,
    a: &GroupElement,
    b: &GroupElement,
    cfg: &EngineConfig,
) -> Result<ClassificationVerdict, StabilityError> {
    check_generating(g, &[a.clone(), b.clone()])?;
    let s = ConnectionSet::symmetric(g.clone(), &[a.clone(), b.clone()])?;
    if s.valency() != 4 {
        return Err(StabilityError::InvalidShape(format!(
            "±a, ±b give {} distinct elements, expected 4",
            s.valency()
        )));
    }
    if cayley_is_bipartite(g, s.elements()) {
        return Ok(ClassificationVerdict::trivial(TrivialReason::Bipartite, "Thm3.1(bipartite)"));
    }
    let (two_a, two_b) = (g.scalar_multiply(2, a), g.scalar_multiply(2, b));
    if two_a == two_b || two_a == g.negate(&two_b) {
        return Ok(ClassificationVerdict::trivial(TrivialReason::TwinVertices, "Thm3.1(3)"));
    }
    if g.intersection_order(a, b) == 4 {
        return Ok(ClassificationVerdict::nontrivial("Thm3.1(1)", &[]));
    }
    for (x, y) in [(a, b), (b, a)] {
        if let Some((k, l, m)) = val4_square_params(g, x, y) {
            return Ok(ClassificationVerdict::nontrivial("Thm3.1(2)", &[("k", k), ("l", l), ("m", m)]));
        }
    }
    if g.order() % 4 == 0 && g.order() >= 8 {
        let n = (g.order() / 4) as i64;
        let reference = moebius_prism(n)?;
        let ours = canonical_form_with(&cayley_graph(&s), cfg)?;
        let theirs = canonical_form_with(&reference, cfg)?;
        if ours.certificate == theirs.certificate {
            return Ok(ClassificationVerdict::nontrivial("Thm3.1(4)", &[("n", n)]));
        }
    }
    Ok(ClassificationVerdict::stable())
}

/// `Cay(Z_2n × Z_2; ±(1,0), (n,0), (0,1))`.
pub(crate) fn moebius_prism(n: i64) -> Result<crate::graph::Graph, StabilityError> {
    let g = AbelianGroup::direct_product(&[2 * n as u64, 2])?;
    let x = g.generator("a").expect("two generators");
    let y = g.generator("b").expect("two generators");
    let s = ConnectionSet::new(
        g.clone(),
        vec![x.clone(), g.negate(x), g.scalar_multiply(n, x), y.clone()],
    )?;
    Ok(cayley_graph(&s))
}

/// `Cay(G; ±a, ±b, ±c)` with `c = -(a + b)`.
pub fn classify_val6(
    g: &AbelianGroup,
    a: &GroupElement,
    b: &GroupElement,
) -> Result<ClassificationVerdict, StabilityError> {
    let c = g.negate(&g.add(a, b));
    let abc = [a.clone(), b.clone(), c];
    check_generating(g, &abc)?;
    let pm = |x: &GroupElement| {
        let mut v = vec![x.clone(), g.negate(x)];
        v.sort();
        v
    };
    let sets: Vec<_> = abc.iter().map(pm).collect();
    if sets[0] == sets[1] || sets[0] == sets[2] || sets[1] == sets[2] {
        return Err(StabilityError::InvalidShape("the sets {±a}, {±b}, {±c} are not distinct".into()));
    }
    let order = g.order();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let any = |pred: &dyn Fn(&GroupElement, &GroupElement) -> bool| {
        perms.iter().any(|p| pred(&abc[p[0]], &abc[p[1]]))
    };
    let ord = |x: &GroupElement| g.element_order(x);
    let twins = any(&|x, y| ord(x) == 8 && *y == g.scalar_multiply(2, x))
        || any(&|x, y| ord(x) == 3 && ord(y) == 3);
    let clauses: [(&str, &dyn Fn(&GroupElement, &GroupElement) -> bool); 5] = [
        ("Thm4.1(1)", &|x, _| ord(x) == 4 && order % 8 == 0),
        ("Thm4.1(2)", &|x, y| {
            g.scalar_multiply(2, x) == g.scalar_multiply(2, y) && order % 8 == 0
        }),
        ("Thm4.1(3)", &|x, y| ord(x) == 8 && *y == g.scalar_multiply(3, x)),
        ("Thm4.1(4)", &|x, y| ord(x) == 12 && *y == g.scalar_multiply(4, x)),
        ("Thm4.1(5)", &|x, y| ord(x) == 3 && ord(y) == 3),
    ];
    let matched = clauses.iter().find(|(_, pred)| any(*pred)).map(|(id, _)| *id);
    Ok(match (matched, twins) {
        (Some(id), true) => ClassificationVerdict::trivial(TrivialReason::TwinVertices, id),
        (Some(id), false) => ClassificationVerdict::nontrivial(id, &[]),
        (None, true) => ClassificationVerdict::trivial(TrivialReason::TwinVertices, "Lem4.2"),
        (None, false) => ClassificationVerdict::stable(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::Verdict;
    use crate::graph::Graph;

    fn clause(c: &ClassificationVerdict) -> &str {
        c.matched_clause.as_deref().unwrap_or("-")
    }

    #[test]
    fn qd_examples() {
        let c = classify_qd(&GridParams::qd(2, 4, 1).unwrap());
        assert_eq!((c.predicted, clause(&c)), (Verdict::NontriviallyUnstable, "Thm1.4(1)"));
        assert_eq!(c.clause_params.unwrap()["k"], 1);
        let c = classify_qd(&GridParams::qd(2, 8, 2).unwrap());
        assert_eq!(c.trivial_reason, Some(TrivialReason::Bipartite));
        let c = classify_qd(&GridParams::qd(6, 3, 0).unwrap());
        assert_eq!(clause(&c), "Thm1.4(2)");
        let p = c.clause_params.unwrap();
        assert_eq!((p["m"], p["k"], p["l"]), (3, 1, 0));
        let c = classify_qd(&GridParams::qd(2, 5, 1).unwrap());
        assert_eq!(clause(&c), "Thm1.4(2)");
        assert!(classify_qd(&GridParams::qd(3, 3, 0).unwrap()).predicted.is_stable());
    }

    #[test]
    fn tr_examples() {
        let c = classify_tr(&GridParams::tr(2, 8, 5).unwrap());
        assert_eq!(clause(&c), "Thm1.5(2)");
        assert_eq!(c.clause_params.unwrap()["k"], 2);
        assert_eq!(clause(&classify_tr(&GridParams::tr(4, 2, 1).unwrap())), "Thm1.5(6)");
        let c = classify_tr(&GridParams::tr(3, 3, 0).unwrap());
        assert_eq!(c.trivial_reason, Some(TrivialReason::TwinVertices));
        let c = classify_tr(&GridParams::tr(2, 4, 3).unwrap());
        assert_eq!(c.trivial_reason, Some(TrivialReason::TwinVertices));
    }

    #[test]
    fn val4_examples() {
        let cfg = EngineConfig::default();
        let z8 = AbelianGroup::cyclic(8).unwrap();
        let e = |g: &AbelianGroup, x: i64| g.element(&[x]).unwrap();
        let c = classify_val4(&z8, &e(&z8, 1), &e(&z8, 2), &cfg).unwrap();
        assert_eq!(clause(&c), "Thm3.1(1)");
        let z7 = AbelianGroup::cyclic(7).unwrap();
        assert!(classify_val4(&z7, &e(&z7, 1), &e(&z7, 2), &cfg).unwrap().predicted.is_stable());
        let z10 = AbelianGroup::cyclic(10).unwrap();
        let c = classify_val4(&z10, &e(&z10, 1), &e(&z10, 3), &cfg).unwrap();
        assert_eq!(c.trivial_reason, Some(TrivialReason::Bipartite));
        let z12 = AbelianGroup::cyclic(12).unwrap();
        let c = classify_val4(&z12, &e(&z12, 1), &e(&z12, 7), &cfg).unwrap();
        assert_eq!(c.trivial_reason, Some(TrivialReason::Bipartite));
        let z9 = AbelianGroup::cyclic(9).unwrap();
        assert!(matches!(
            classify_val4(&z9, &e(&z9, 3), &e(&z9, 6), &cfg),
            Err(StabilityError::NotGenerating)
        ));
    }

    #[test]
    fn moebius_prism_matches_product() {
        for n in 2..=5 {
            let expected = Graph::moebius_ladder(2 * n as usize)
                .unwrap()
                .cartesian_product(&Graph::complete(2).unwrap());
            assert!(crate::aut::are_isomorphic(&moebius_prism(n).unwrap(), &expected).unwrap());
        }
    }

    #[test]
    fn val6_examples() {
        let e = |g: &AbelianGroup, x: &[i64]| g.element(x).unwrap();
        let z8 = AbelianGroup::cyclic(8).unwrap();
        let c = classify_val6(&z8, &e(&z8, &[1]), &e(&z8, &[3])).unwrap();
        assert_eq!(clause(&c), "Thm4.1(3)");
        let z12 = AbelianGroup::cyclic(12).unwrap();
        let c = classify_val6(&z12, &e(&z12, &[1]), &e(&z12, &[4])).unwrap();
        assert_eq!(clause(&c), "Thm4.1(4)");
        let z33 = AbelianGroup::direct_product(&[3, 3]).unwrap();
        let c = classify_val6(&z33, &e(&z33, &[1, 0]), &e(&z33, &[0, 1])).unwrap();
        assert_eq!((clause(&c), c.trivial_reason), ("Thm4.1(5)", Some(TrivialReason::TwinVertices)));
        assert!(matches!(
            classify_val6(&z8, &e(&z8, &[1]), &e(&z8, &[6])),
            Err(StabilityError::InvalidShape(_))
        ));
    }
}
