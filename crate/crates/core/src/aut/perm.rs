//! Permutations and permutation groups with a base and strong generating set.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

/// A permutation of `0..degree`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// Panics if `images` is not a bijection on `0..images.len()`.
    pub fn from_images(images: &[usize]) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in images {
            assert!(x < n && !seen[x], "not a permutation: {images:?}");
            seen[x] = true;
        }
        Perm(images.iter().map(|&x| x as u32).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self` followed by `other`: `x ↦ other(self(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn first_moved_point(&self) -> Option<usize> {
        self.0.iter().enumerate().position(|(i, &x)| i != x as usize)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // cycle notation, fixed points omitted
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.0[x] as usize;
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Level {
    point: usize,
    /// Indices into the strong generating set of generators fixing the
    /// earlier base points.
    gens: Vec<usize>,
    orbit: Vec<usize>,
    /// `transversal[β]` maps the base point to `β`.
    transversal: Vec<Option<Perm>>,
}

/// A permutation group with an exact base and strong generating set.
#[derive(Debug, Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Perm>,
    strong: Vec<Perm>,
    levels: Vec<Level>,
    order: BigUint,
}

impl PermutationGroup {
    /// Runs deterministic Schreier–Sims on `generators`, starting from
    /// `base_hint` (extended as needed).
    pub fn new(degree: usize, generators: Vec<Perm>, base_hint: &[usize]) -> Self {
        for g in &generators {
            assert_eq!(g.degree(), degree, "generator degree mismatch");
        }
        let strong: Vec<Perm> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut group = PermutationGroup {
            degree,
            generators,
            strong,
            levels: Vec::new(),
            order: BigUint::one(),
        };
        let mut base: Vec<usize> = Vec::new();
        for &b in base_hint {
            if !base.contains(&b) {
                base.push(b);
            }
        }
        for s in &group.strong {
            if base.iter().all(|&b| s.apply(b) == b) {
                base.push(s.first_moved_point().expect("non-identity"));
            }
        }
        group.levels = base
            .into_iter()
            .map(|point| Level {
                point,
                gens: Vec::new(),
                orbit: Vec::new(),
                transversal: Vec::new(),
            })
            .collect();
        for l in 0..group.levels.len() {
            group.rebuild_level(l);
        }
        group.schreier_sims();
        group.order = group
            .levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()));
        group
    }

    fn rebuild_level(&mut self, l: usize) {
        let prefix: Vec<usize> = self.levels[..l].iter().map(|lv| lv.point).collect();
        let gens: Vec<usize> = (0..self.strong.len())
            .filter(|&i| prefix.iter().all(|&b| self.strong[i].apply(b) == b))
            .collect();
        let point = self.levels[l].point;
        let mut transversal: Vec<Option<Perm>> = vec![None; self.degree];
        transversal[point] = Some(Perm::identity(self.degree));
        let mut orbit = vec![point];
        let mut head = 0;
        while head < orbit.len() {
            let beta = orbit[head];
            head += 1;
            for &gi in &gens {
                let g = &self.strong[gi];
                let img = g.apply(beta);
                if transversal[img].is_none() {
                    let u = transversal[beta].as_ref().unwrap().then(g);
                    transversal[img] = Some(u);
                    orbit.push(img);
                }
            }
        }
        let level = &mut self.levels[l];
        level.gens = gens;
        level.orbit = orbit;
        level.transversal = transversal;
    }

    /// Sifts `g` from level `from`. Returns the residue and the level at
    /// which sifting stopped (`levels.len()` if it passed every level).
    fn strip(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for l in from..self.levels.len() {
            let beta = g.apply(self.levels[l].point);
            match &self.levels[l].transversal[beta] {
                None => return (g, l),
                Some(u) => g = g.then(&u.inverse()),
            }
        }
        let k = self.levels.len();
        (g, k)
    }

    fn schreier_sims(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let l = i as usize;
            let mut restart: Option<usize> = None;
            'scan: for oi in 0..self.levels[l].orbit.len() {
                let beta = self.levels[l].orbit[oi];
                for gi in 0..self.levels[l].gens.len() {
                    let s = &self.strong[self.levels[l].gens[gi]];
                    let u_beta = self.levels[l].transversal[beta].as_ref().unwrap();
                    let image = s.apply(beta);
                    let u_image = self.levels[l].transversal[image].as_ref().unwrap();
                    let h = u_beta.then(s).then(&u_image.inverse());
                    if h.is_identity() {
                        continue;
                    }
                    let (residue, j) = self.strip(h, l + 1);
                    let k = self.levels.len();
                    if j < k || !residue.is_identity() {
                        if j == k {
                            let point = residue.first_moved_point().unwrap();
                            self.levels.push(Level {
                                point,
                                gens: Vec::new(),
                                orbit: Vec::new(),
                                transversal: Vec::new(),
                            });
                        }
                        self.strong.push(residue);
                        for m in (l + 1)..=j {
                            self.rebuild_level(m);
                        }
                        restart = Some(j);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &BigUint {
        &self.order
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    /// Strong generators grouped by level: entry `i` lists the generators
    /// fixing the first `i` base points.
    pub fn strong_generators(&self) -> Vec<Vec<Perm>> {
        self.levels
            .iter()
            .map(|l| l.gens.iter().map(|&i| self.strong[i].clone()).collect())
            .collect()
    }

    /// Every strong generator (all levels), without duplication.
    pub fn strong_generating_set(&self) -> &[Perm] {
        &self.strong
    }

    pub fn fundamental_orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (residue, j) = self.strip(g.clone(), 0);
        j == self.levels.len() && residue.is_identity()
    }

    /// Orbit partition of `0..degree` as a representative (least element)
    /// per point.
    pub fn orbit_representatives(&self) -> Vec<usize> {
        orbit_representatives(self.degree, self.generators.iter())
    }
}

/// Least element of each point's orbit under the group generated by `gens`.
pub fn orbit_representatives<'a, I>(degree: usize, gens: I) -> Vec<usize>
where
    I: IntoIterator<Item = &'a Perm>,
{
    let mut uf = UnionFind::new(degree);
    for g in gens {
        for x in 0..degree {
            uf.union(x, g.apply(x));
        }
    }
    (0..degree).map(|x| uf.min_of(x)).collect()
}

/// Disjoint sets tracking the least element of each class.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    min: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            min: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.min[ra] = self.min[ra].min(self.min[rb]);
        true
    }

    pub fn min_of(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.min[r]
    }

    pub fn class_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Perm {
        Perm::from_images(&(0..n).map(|i| (i + 1) % n).collect::<Vec<_>>())
    }

    fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(a, b);
        Perm::from_images(&v)
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 1..=7usize {
            let g = PermutationGroup::new(n, vec![cycle(n), transposition(n, 0, 1.min(n - 1))], &[]);
            let fact: usize = (1..=n).product();
            assert_eq!(g.order(), &BigUint::from(fact), "S_{n}");
        }
    }

    #[test]
    fn dihedral_and_cyclic() {
        let n = 9;
        let reflect = Perm::from_images(&(0..n).map(|i| (n - i) % n).collect::<Vec<_>>());
        let d = PermutationGroup::new(n, vec![cycle(n), reflect], &[]);
        assert_eq!(d.order(), &BigUint::from(18u32));
        let c = PermutationGroup::new(n, vec![cycle(n)], &[]);
        assert_eq!(c.order(), &BigUint::from(9u32));
        assert!(d.contains(&cycle(n).then(&cycle(n))));
        assert!(!c.contains(&transposition(n, 0, 1)));
    }

    #[test]
    fn trivial_group() {
        let g = PermutationGroup::new(4, vec![Perm::identity(4)], &[]);
        assert_eq!(g.order(), &BigUint::one());
        assert!(g.base().is_empty());
    }

    #[test]
    fn alternating_group_from_three_cycles() {
        // A_6 generated by (0 1 2) and (1 2 3 4 5)
        let a = Perm::from_images(&[1, 2, 0, 3, 4, 5]);
        let b = Perm::from_images(&[0, 2, 3, 4, 5, 1]);
        let g = PermutationGroup::new(6, vec![a, b], &[]);
        assert_eq!(g.order(), &BigUint::from(360u32));
        assert!(!g.contains(&transposition(6, 0, 1)));
    }

    #[test]
    fn product_of_orbits_matches_order() {
        let g = PermutationGroup::new(
            8,
            vec![
                Perm::from_images(&[1, 0, 2, 3, 4, 5, 6, 7]),
                Perm::from_images(&[0, 1, 3, 2, 4, 5, 6, 7]),
                Perm::from_images(&[2, 3, 0, 1, 4, 5, 6, 7]),
                Perm::from_images(&[0, 1, 2, 3, 5, 6, 7, 4]),
            ],
            &[4],
        );
        // D4 on {0..3} times C4 on {4..7}
        assert_eq!(g.order(), &BigUint::from(32u32));
        let prod: usize = g.fundamental_orbit_sizes().iter().product();
        assert_eq!(BigUint::from(prod), *g.order());
        assert_eq!(g.base()[0], 4);
        let reps = g.orbit_representatives();
        assert_eq!(reps, vec![0, 0, 0, 0, 4, 4, 4, 4]);
    }

    #[test]
    fn cycle_notation() {
        assert_eq!(format!("{:?}", cycle(3)), "(0 1 2)");
        assert_eq!(format!("{:?}", Perm::identity(3)), "()");
    }
}
