//! Permutations of the signed set `{±1, …, ±m}`, pairings, set partitions
//! and orbit computation.
//!
//! Products are applied right to left: `s.compose(&t)` maps `k` to `s(t(k))`.
//! A permutation of the positive letters only (a face permutation or a
//! pairing) embeds into the signed domain by fixing every negative element.

use std::fmt;

use crate::error::{Error, Result};

/// A bijection of `{-m, …, -1, 1, …, m}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    half: usize,
    // positive k at k-1, negative -k at half+k-1
    images: Vec<i32>,
}

#[inline]
fn slot(half: usize, k: i32) -> usize {
    if k > 0 {
        k as usize - 1
    } else {
        half + (-k) as usize - 1
    }
}

#[inline]
fn label(half: usize, idx: usize) -> i32 {
    if idx < half {
        idx as i32 + 1
    } else {
        -((idx - half) as i32 + 1)
    }
}

impl SignedPermutation {
    pub fn identity(half: usize) -> Self {
        let images = (0..2 * half).map(|i| label(half, i)).collect();
        Self { half, images }
    }

    /// The sign flip `k ↦ -k`.
    pub fn delta(half: usize) -> Self {
        let images = (0..2 * half).map(|i| -label(half, i)).collect();
        Self { half, images }
    }

    /// Builds a permutation from a total map, checking it is a bijection of
    /// the signed domain.
    pub fn from_fn(half: usize, f: impl Fn(i32) -> i32) -> Result<Self> {
        let mut images = Vec::with_capacity(2 * half);
        let mut seen = vec![false; 2 * half];
        for i in 0..2 * half {
            let k = label(half, i);
            let v = f(k);
            if v == 0 || v.unsigned_abs() as usize > half {
                return Err(Error::Input(format!(
                    "image {v} of {k} outside the signed domain of size {half}"
                )));
            }
            let s = slot(half, v);
            if seen[s] {
                return Err(Error::Input(format!("{v} is hit twice; not a bijection")));
            }
            seen[s] = true;
            images.push(v);
        }
        Ok(Self { half, images })
    }

    /// Builds a permutation from disjoint cycles; unlisted elements are fixed.
    pub fn from_cycles(half: usize, cycles: &[Vec<i32>]) -> Result<Self> {
        let mut perm = Self::identity(half);
        let mut used = vec![false; 2 * half];
        for cycle in cycles {
            for (i, &k) in cycle.iter().enumerate() {
                if k == 0 || k.unsigned_abs() as usize > half {
                    return Err(Error::Input(format!(
                        "cycle element {k} outside the signed domain of size {half}"
                    )));
                }
                let s = slot(half, k);
                if used[s] {
                    return Err(Error::Input(format!("element {k} repeated in cycles")));
                }
                used[s] = true;
                perm.images[s] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(perm)
    }

    pub fn half(&self) -> usize {
        self.half
    }

    #[inline]
    pub fn apply(&self, k: i32) -> i32 {
        self.images[slot(self.half, k)]
    }

    /// Elements of the signed domain: `1..=m` then `-1..=-m`.
    pub fn domain(&self) -> impl Iterator<Item = i32> + '_ {
        (0..2 * self.half).map(move |i| label(self.half, i))
    }

    /// `self ∘ other`, i.e. `k ↦ self(other(k))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.half != other.half {
            return Err(Error::DomainMismatch {
                left: self.half,
                right: other.half,
            });
        }
        let images = other.images.iter().map(|&k| self.apply(k)).collect();
        Ok(Self {
            half: self.half,
            images,
        })
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; 2 * self.half];
        for (i, &v) in self.images.iter().enumerate() {
            images[slot(self.half, v)] = label(self.half, i);
        }
        Self {
            half: self.half,
            images,
        }
    }

    /// `t · self · t⁻¹`.
    pub fn conjugate(&self, t: &Self) -> Result<Self> {
        t.compose(self)?.compose(&t.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.domain().all(|k| self.apply(k) == k)
    }

    /// True when `self² = id` and no element is fixed.
    pub fn is_fixed_point_free_involution(&self) -> bool {
        self.domain()
            .all(|k| self.apply(k) != k && self.apply(self.apply(k)) == k)
    }

    /// Cycle decomposition in canonical form: each cycle starts at its element
    /// of smallest absolute value (positive on ties), and cycles are ordered
    /// by that leading element's absolute value, positive first.
    pub fn cycles(&self) -> Vec<Vec<i32>> {
        let mut seen = vec![false; 2 * self.half];
        let mut out = Vec::new();
        for start in self.domain() {
            if seen[slot(self.half, start)] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut k = start;
            while !seen[slot(self.half, k)] {
                seen[slot(self.half, k)] = true;
                cycle.push(k);
                k = self.apply(k);
            }
            out.push(canonical_rotation(cycle));
        }
        out.sort_by_key(|c| cycle_key(c));
        out
    }

    /// True when every element keeps its sign.
    pub fn preserves_sign(&self) -> bool {
        self.domain().all(|k| (self.apply(k) > 0) == (k > 0))
    }
}

fn abs_key(k: i32) -> (u32, bool) {
    (k.unsigned_abs(), k < 0)
}

fn cycle_key(c: &[i32]) -> (u32, bool) {
    abs_key(c[0])
}

/// Rotates a cycle so it starts at its element of smallest absolute value,
/// preferring the positive one on ties.
pub fn canonical_rotation(mut cycle: Vec<i32>) -> Vec<i32> {
    if let Some(pos) = (0..cycle.len()).min_by_key(|&i| abs_key(cycle[i])) {
        cycle.rotate_left(pos);
    }
    cycle
}

/// Renders cycles as `(1,7,-5,-9)(2,4,10)`.
pub fn format_cycles(cycles: &[Vec<i32>]) -> String {
    let mut s = String::new();
    for c in cycles {
        s.push('(');
        for (i, k) in c.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&k.to_string());
        }
        s.push(')');
    }
    s
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_cycles(&self.cycles()))
    }
}

impl fmt::Debug for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedPermutation[{}]{}", self.half, self)
    }
}

/// A fixed-point-free involution of `{1, …, m}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Pairing {
    partner: Vec<usize>,
}

impl Pairing {
    /// `partner[k-1]` is the partner of `k`.
    pub fn new(partner: Vec<usize>) -> Result<Self> {
        let m = partner.len();
        for (i, &p) in partner.iter().enumerate() {
            let k = i + 1;
            if p == 0 || p > m || p == k || partner[p - 1] != k {
                return Err(Error::Input(format!(
                    "not a fixed-point-free involution at {k}"
                )));
            }
        }
        Ok(Self { partner })
    }

    pub fn from_blocks(m: usize, blocks: &[(usize, usize)]) -> Result<Self> {
        let mut partner = vec![0; m];
        for &(a, b) in blocks {
            if a == 0 || b == 0 || a > m || b > m || a == b {
                return Err(Error::Input(format!("bad block ({a},{b}) for m={m}")));
            }
            if partner[a - 1] != 0 || partner[b - 1] != 0 {
                return Err(Error::Input(format!("block ({a},{b}) overlaps another")));
            }
            partner[a - 1] = b;
            partner[b - 1] = a;
        }
        Self::new(partner)
    }

    /// The pairing at position `index` of the canonical enumeration order.
    pub fn from_index(m: usize, mut index: u64) -> Option<Self> {
        if m % 2 == 1 || index >= pairing_count(m) {
            return None;
        }
        // mixed radix digits, most significant first: radix m-1, m-3, ..., 1
        let radices: Vec<u64> = (0..m / 2).map(|i| (m - 1 - 2 * i) as u64).collect();
        let mut digits = vec![0u64; radices.len()];
        for i in (0..radices.len()).rev() {
            digits[i] = index % radices[i];
            index /= radices[i];
        }
        Some(Self::from_choices(m, &digits))
    }

    fn from_choices(m: usize, choices: &[u64]) -> Self {
        let mut remaining: Vec<usize> = (1..=m).collect();
        let mut partner = vec![0; m];
        for &c in choices {
            let a = remaining.remove(0);
            let b = remaining.remove(c as usize);
            partner[a - 1] = b;
            partner[b - 1] = a;
        }
        Self { partner }
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    #[inline]
    pub fn partner(&self, k: usize) -> usize {
        self.partner[k - 1]
    }

    /// Blocks `(a, b)` with `a < b`, ordered by `a`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        (1..=self.len())
            .filter(|&k| k < self.partner(k))
            .map(|k| (k, self.partner(k)))
            .collect()
    }

    /// Extension to the signed domain fixing every negative element.
    pub fn to_signed(&self) -> SignedPermutation {
        let half = self.len();
        let mut images: Vec<i32> = (0..2 * half).map(|i| label(half, i)).collect();
        for (i, &p) in self.partner.iter().enumerate() {
            images[i] = p as i32;
        }
        SignedPermutation { half, images }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in self.blocks() {
            write!(f, "({a},{b})")?;
        }
        Ok(())
    }
}

/// `(m-1)!!` for even `m`, 1 for `m = 0`, 0 for odd `m`.
pub fn pairing_count(m: usize) -> u64 {
    if m % 2 == 1 {
        return 0;
    }
    (1..m as u64).step_by(2).product()
}

/// Iterator over all pairings of `{1, …, m}` in canonical order: the
/// smallest unpaired element is matched with each larger unpaired element in
/// increasing order, recursively.
#[derive(Debug, Clone)]
pub struct Pairings {
    m: usize,
    choices: Vec<u64>,
    done: bool,
}

pub fn enumerate_pairings(m: usize) -> Pairings {
    Pairings {
        m,
        choices: vec![0; m / 2],
        done: m % 2 == 1,
    }
}

impl Iterator for Pairings {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        if self.done {
            return None;
        }
        let current = Pairing::from_choices(self.m, &self.choices);
        // advance the mixed-radix counter
        let mut i = self.choices.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            let radix = (self.m - 1 - 2 * i) as u64;
            self.choices[i] += 1;
            if self.choices[i] < radix {
                break;
            }
            self.choices[i] = 0;
        }
        Some(current)
    }
}

/// Number of block pairs `{i,j}, {k,l}` with `i < k < j < l`.
pub fn crossings(p: &Pairing) -> usize {
    let blocks = p.blocks();
    let mut count = 0;
    for (x, &(_, j)) in blocks.iter().enumerate() {
        for &(k, l) in &blocks[x + 1..] {
            // blocks are sorted by first element, so i < k
            if k < j && j < l {
                count += 1;
            }
        }
    }
    count
}

/// A partition of `{1, …, n}` in canonical form: sorted blocks ordered by
/// their minimum.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
    size: usize,
}

impl SetPartition {
    pub fn from_blocks(size: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; size];
        let mut blocks: Vec<Vec<usize>> = blocks;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::Input("empty block".into()));
            }
            b.sort_unstable();
            for &x in b.iter() {
                if x == 0 || x > size || seen[x - 1] {
                    return Err(Error::Input(format!("element {x} invalid or repeated")));
                }
                seen[x - 1] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Input("blocks do not cover the ground set".into()));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Self { blocks, size })
    }

    /// Builds the partition whose blocks are the classes of `assignment`
    /// (element `i+1` is in class `assignment[i]`).
    pub fn from_assignment(assignment: &[usize]) -> Self {
        let mut by_class: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &c) in assignment.iter().enumerate() {
            by_class.entry(c).or_default().push(i + 1);
        }
        let mut blocks: Vec<Vec<usize>> = by_class.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        Self {
            blocks,
            size: assignment.len(),
        }
    }

    pub fn singletons(size: usize) -> Self {
        Self {
            blocks: (1..=size).map(|i| vec![i]).collect(),
            size,
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.blocks.iter().any(|blk| blk.contains(&a) && blk.contains(&b))
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// All set partitions of `{1, …, n}`, via restricted growth strings.
pub fn set_partitions(n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
        if i == rgs.len() {
            out.push(SetPartition::from_assignment(rgs));
            return;
        }
        for c in 0..=max + 1 {
            rgs[i] = c;
            rec(i + 1, max.max(c), rgs, out);
        }
    }
    if n == 0 {
        out.push(SetPartition::singletons(0));
        return out;
    }
    rec(1, 0, &mut rgs, &mut out);
    out
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
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
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

fn check_halves(gens: &[&SignedPermutation]) -> Result<usize> {
    let half = gens.first().map_or(0, |g| g.half());
    for g in gens {
        if g.half() != half {
            return Err(Error::DomainMismatch {
                left: half,
                right: g.half(),
            });
        }
    }
    Ok(half)
}

/// Orbits on `{1, …, m}` of the group generated by `gens`, each of which
/// must map positive elements to positive elements.
pub fn orbits(gens: &[&SignedPermutation]) -> Result<SetPartition> {
    let half = check_halves(gens)?;
    let mut uf = UnionFind::new(half);
    for g in gens {
        for k in 1..=half as i32 {
            let v = g.apply(k);
            if v < 0 {
                return Err(Error::Input(format!(
                    "generator maps {k} to {v}; positive orbits need sign-preserving generators"
                )));
            }
            uf.union(k as usize - 1, v as usize - 1);
        }
    }
    let assignment: Vec<usize> = (0..half).map(|i| uf.find(i)).collect();
    Ok(SetPartition::from_assignment(&assignment))
}

/// Orbits on the full signed domain. Each orbit is sorted by absolute value,
/// positive first; orbits are ordered by their first element.
pub fn signed_orbits(gens: &[&SignedPermutation]) -> Result<Vec<Vec<i32>>> {
    let half = check_halves(gens)?;
    let mut uf = UnionFind::new(2 * half);
    for g in gens {
        for i in 0..2 * half {
            uf.union(i, slot(half, g.apply(label(half, i))));
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<i32>> = Default::default();
    for i in 0..2 * half {
        groups.entry(uf.find(i)).or_default().push(label(half, i));
    }
    let mut out: Vec<Vec<i32>> = groups
        .into_values()
        .map(|mut v| {
            v.sort_by_key(|&k| abs_key(k));
            v
        })
        .collect();
    out.sort_by_key(|v| abs_key(v[0]));
    Ok(out)
}

/// Partition of the factor indices `{1, …, r}`: factors `i` and `j` share a
/// block when their cycles of `gamma` lie in one orbit of `⟨gamma, p⟩`.
/// `lengths` gives the number of letters in each factor.
pub fn induced_partition(
    gamma: &SignedPermutation,
    p: &Pairing,
    lengths: &[usize],
) -> Result<SetPartition> {
    let total: usize = lengths.iter().sum();
    if total != gamma.half() || total != p.len() {
        return Err(Error::DomainMismatch {
            left: gamma.half(),
            right: p.len().max(total),
        });
    }
    let orbit = orbits(&[gamma, &p.to_signed()])?;
    let mut class_of = vec![0usize; total];
    for (c, block) in orbit.blocks().iter().enumerate() {
        for &x in block {
            class_of[x - 1] = c;
        }
    }
    let mut start = 0;
    let mut assignment = Vec::with_capacity(lengths.len());
    for &len in lengths {
        if len == 0 {
            return Err(Error::Input("factor with no letters".into()));
        }
        assignment.push(class_of[start]);
        start += len;
    }
    Ok(SetPartition::from_assignment(&assignment))
}
