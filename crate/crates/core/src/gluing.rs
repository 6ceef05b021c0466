//! Two-sheeted cover algebra for a trace word and the census of the surface
//! glued by a pairing.
//!
//! Letters `1..=m` are the X-occurrences of the word, numbered left to
//! right across factors. Positive integers label the front sheet of each
//! face, negative integers the back sheet. For a pairing `π` of the letters
//!
//! * `γ₊` cycles the letters of each factor in order, `γ₋ = δ γ₊ δ` does the
//!   same on the back sheet,
//! * `δ′` flips the sign of every transposed letter,
//! * `π̂ = δ′ π δ π δ′` glues front and back edges,
//! * the cycles of `γ₋⁻¹ π̂ γ₊` list the constant matrices met around each
//!   vertex, negative where a transpose is read. They come in mirror pairs
//!   `(k₁,…,k_s)` / `(-k_s,…,-k₁)`; the particular cycles keep the member
//!   whose element of smallest absolute value is positive.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{signed_orbits, Pairing, SignedPermutation, UnionFind};

/// Letter structure of a product of traces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WordShape {
    lengths: Vec<usize>,
    epsilon: Vec<i8>,
    labels: Vec<usize>,
}

impl WordShape {
    pub fn new(lengths: Vec<usize>, epsilon: Vec<i8>, labels: Vec<usize>) -> Result<Self> {
        if lengths.contains(&0) {
            return Err(Error::Input("every factor needs at least one letter".into()));
        }
        let m: usize = lengths.iter().sum();
        if epsilon.len() != m || labels.len() != m {
            return Err(Error::Input(format!(
                "word has {m} letters but {} signs and {} labels",
                epsilon.len(),
                labels.len()
            )));
        }
        if epsilon.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::Input("transpose signs must be +1 or -1".into()));
        }
        Ok(Self {
            lengths,
            epsilon,
            labels,
        })
    }

    /// Single-family word with the given signs.
    pub fn with_signs(lengths: Vec<usize>, epsilon: Vec<i8>) -> Result<Self> {
        let m = epsilon.len();
        Self::new(lengths, epsilon, vec![0; m])
    }

    /// The classical `tr(XᵀD XD ⋯)` word: odd letters transposed. Every
    /// factor length must be even.
    pub fn alternating(lengths: Vec<usize>) -> Result<Self> {
        if lengths.iter().any(|l| l % 2 == 1) {
            return Err(Error::Input("alternating factors need even length".into()));
        }
        let m: usize = lengths.iter().sum();
        let epsilon = (1..=m).map(|k| if k % 2 == 1 { -1 } else { 1 }).collect();
        Self::with_signs(lengths, epsilon)
    }

    pub fn letters(&self) -> usize {
        self.epsilon.len()
    }

    pub fn factors(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn signs(&self) -> &[i8] {
        &self.epsilon
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Sign of letter `k` (1-based): -1 when transposed.
    pub fn epsilon(&self, k: usize) -> i8 {
        self.epsilon[k - 1]
    }

    pub fn label(&self, k: usize) -> usize {
        self.labels[k - 1]
    }

    /// First letter (1-based) of each factor.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.lengths.len());
        let mut start = 1;
        for &l in &self.lengths {
            out.push(start);
            start += l;
        }
        out
    }

    /// Letter following `k` cyclically inside its factor.
    pub fn next_letter(&self, k: usize) -> usize {
        let mut start = 1;
        for &l in &self.lengths {
            if k < start + l {
                return if k + 1 == start + l { start } else { k + 1 };
            }
            start += l;
        }
        panic!("letter {k} outside word of {} letters", self.letters())
    }

    /// Factor (0-based) containing letter `k`.
    pub fn factor_of(&self, k: usize) -> usize {
        let mut start = 1;
        for (f, &l) in self.lengths.iter().enumerate() {
            if k < start + l {
                return f;
            }
            start += l;
        }
        panic!("letter {k} outside word of {} letters", self.letters())
    }

    /// Sub-word made of the listed factors (0-based, repeats allowed), with
    /// the map from new letters to old letters.
    pub fn select(&self, factors: &[usize]) -> (WordShape, Vec<usize>) {
        let offsets = self.offsets();
        let mut lengths = Vec::new();
        let mut map = Vec::new();
        for &f in factors {
            lengths.push(self.lengths[f]);
            map.extend(offsets[f]..offsets[f] + self.lengths[f]);
        }
        let epsilon = map.iter().map(|&k| self.epsilon(k)).collect();
        let labels = map.iter().map(|&k| self.label(k)).collect();
        (
            WordShape {
                lengths,
                epsilon,
                labels,
            },
            map,
        )
    }

    pub fn with_epsilon(&self, epsilon: Vec<i8>) -> Result<Self> {
        Self::new(self.lengths.clone(), epsilon, self.labels.clone())
    }
}

/// `γ₊`: cycles each factor's letters in order on the front sheet.
pub fn gamma_plus(shape: &WordShape) -> SignedPermutation {
    let m = shape.letters();
    let cycles: Vec<Vec<i32>> = shape
        .offsets()
        .iter()
        .zip(shape.lengths())
        .map(|(&s, &l)| (s as i32..(s + l) as i32).collect())
        .collect();
    SignedPermutation::from_cycles(m, &cycles).expect("factor cycles are disjoint")
}

/// The face permutation `γ` on the positive letters; identical to `γ₊`.
pub fn gamma_of(shape: &WordShape) -> SignedPermutation {
    gamma_plus(shape)
}

/// `γ₋ = δ γ₊ δ`: cycles `(-1, …, -m₁)⋯` on the back sheet.
pub fn gamma_minus(shape: &WordShape) -> SignedPermutation {
    let d = SignedPermutation::delta(shape.letters());
    gamma_plus(shape).conjugate(&d).expect("same domain")
}

/// `δ′(k) = ε(|k|)·k`.
pub fn delta_prime_of(shape: &WordShape) -> SignedPermutation {
    SignedPermutation::from_fn(shape.letters(), |k| {
        shape.epsilon(k.unsigned_abs() as usize) as i32 * k
    })
    .expect("sign flips are bijective")
}

/// `π̂ = δ′ π δ π δ′` with `π` fixing the negative elements.
pub fn build_pi_hat(p: &Pairing, delta_prime: &SignedPermutation) -> Result<SignedPermutation> {
    if p.len() != delta_prime.half() {
        return Err(Error::DomainMismatch {
            left: p.len(),
            right: delta_prime.half(),
        });
    }
    let pi = p.to_signed();
    let d = SignedPermutation::delta(p.len());
    delta_prime
        .compose(&pi)?
        .compose(&d)?
        .compose(&pi)?
        .compose(delta_prime)
}

/// `γ₋⁻¹ π̂ γ₊`.
pub fn vertex_permutation(p: &Pairing, shape: &WordShape) -> Result<SignedPermutation> {
    Gluing::new(shape).vertex_permutation(p)
}

/// Keeps one cycle from each mirror pair: the one whose element of smallest
/// absolute value is positive. Fails if the cycles are not closed under
/// reverse-and-negate or a cycle is its own mirror.
pub fn particular_cycles(v: &SignedPermutation) -> Result<Vec<Vec<i32>>> {
    let cycles = v.cycles();
    let mut keep = Vec::with_capacity(cycles.len() / 2);
    for c in &cycles {
        let lead_positive = c[0] > 0;
        // the mirror of c, rotated canonically, must be a different cycle of v
        let first = -c[0];
        if c.contains(&first) {
            return Err(Error::Mirror(format!(
                "cycle {} contains both {} and {}",
                crate::perm::format_cycles(std::slice::from_ref(c)),
                c[0],
                first
            )));
        }
        let s = c.len();
        for i in 0..s {
            let k = c[i];
            let prev = c[(i + s - 1) % s];
            // mirror maps -k to -prev
            if v.apply(-k) != -prev {
                return Err(Error::Mirror(format!(
                    "reverse-negated image of cycle through {k} is missing"
                )));
            }
        }
        if lead_positive {
            keep.push(c.clone());
        }
    }
    if keep.len() * 2 != cycles.len() {
        return Err(Error::Mirror("cycles do not split into mirror pairs".into()));
    }
    Ok(keep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurfaceKind {
    Sphere,
    Orientable { genus: u32 },
    NonOrientable { crosscaps: u32 },
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Sphere => f.write_str("sphere"),
            SurfaceKind::Orientable { genus } => write!(f, "genus-{genus}"),
            SurfaceKind::NonOrientable { crosscaps } => write!(f, "crosscap-{crosscaps}"),
        }
    }
}

/// One connected component of a glued surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Component {
    /// Factors (1-based) whose faces belong to this component.
    pub faces: Vec<usize>,
    pub vertices: usize,
    pub edges: usize,
    pub face_count: usize,
    pub euler: i64,
    pub orientable: bool,
    pub kind: SurfaceKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    pub components: Vec<Component>,
    /// Total number of vertices (particular cycles).
    pub vertices: usize,
    /// Power of N carried by the term in normalized-trace variables,
    /// `V − m/2 − r`.
    pub order_exponent: i64,
}

impl SurfaceReport {
    pub fn is_connected(&self) -> bool {
        self.components.len() <= 1
    }

    pub fn all_spheres(&self) -> bool {
        self.components.iter().all(|c| c.kind == SurfaceKind::Sphere)
    }

    pub fn is_orientable(&self) -> bool {
        self.components.iter().all(|c| c.orientable)
    }

    /// Euler characteristics sorted in decreasing order.
    pub fn euler_multiset(&self) -> Vec<i64> {
        let mut chis: Vec<i64> = self.components.iter().map(|c| c.euler).collect();
        chis.sort_unstable_by(|a, b| b.cmp(a));
        chis
    }
}

/// The fixed permutations of one word shape, built once and reused for every
/// pairing.
#[derive(Clone, Debug)]
pub struct Gluing {
    shape: WordShape,
    gamma_plus: SignedPermutation,
    gamma_minus: SignedPermutation,
    gamma_minus_inv: SignedPermutation,
    delta_prime: SignedPermutation,
}

/// Everything derived from a single pairing.
#[derive(Clone, Debug)]
pub struct Glued {
    pub pi_hat: SignedPermutation,
    pub vertex: SignedPermutation,
    pub particular: Vec<Vec<i32>>,
    pub surface: SurfaceReport,
}

impl Gluing {
    pub fn new(shape: &WordShape) -> Self {
        let gamma_minus = gamma_minus(shape);
        Self {
            shape: shape.clone(),
            gamma_plus: gamma_plus(shape),
            gamma_minus_inv: gamma_minus.inverse(),
            gamma_minus,
            delta_prime: delta_prime_of(shape),
        }
    }

    pub fn shape(&self) -> &WordShape {
        &self.shape
    }

    pub fn gamma_plus(&self) -> &SignedPermutation {
        &self.gamma_plus
    }

    pub fn gamma_minus(&self) -> &SignedPermutation {
        &self.gamma_minus
    }

    pub fn delta_prime(&self) -> &SignedPermutation {
        &self.delta_prime
    }

    pub fn pi_hat(&self, p: &Pairing) -> Result<SignedPermutation> {
        build_pi_hat(p, &self.delta_prime)
    }

    pub fn vertex_permutation(&self, p: &Pairing) -> Result<SignedPermutation> {
        let pi_hat = self.pi_hat(p)?;
        self.gamma_minus_inv
            .compose(&pi_hat)?
            .compose(&self.gamma_plus)
    }

    pub fn glue(&self, p: &Pairing) -> Result<Glued> {
        let pi_hat = self.pi_hat(p)?;
        let vertex = self
            .gamma_minus_inv
            .compose(&pi_hat)?
            .compose(&self.gamma_plus)?;
        let particular = particular_cycles(&vertex)?;
        let surface = self.census(p, &pi_hat, &particular)?;
        Ok(Glued {
            pi_hat,
            vertex,
            particular,
            surface,
        })
    }

    fn census(
        &self,
        p: &Pairing,
        pi_hat: &SignedPermutation,
        particular: &[Vec<i32>],
    ) -> Result<SurfaceReport> {
        let shape = &self.shape;
        let m = shape.letters();
        let r = shape.factors();
        if m % 2 == 1 {
            return Err(Error::Input("odd number of letters has no pairings".into()));
        }
        // components: orbits of <γ, π> on the letters
        let mut uf = UnionFind::new(m);
        for k in 1..=m {
            uf.union(k - 1, shape.next_letter(k) - 1);
            uf.union(k - 1, p.partner(k) - 1);
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut comp_of = vec![0usize; m];
        for k in 0..m {
            let root = uf.find(k);
            let c = match roots.iter().position(|&x| x == root) {
                Some(c) => c,
                None => {
                    roots.push(root);
                    roots.len() - 1
                }
            };
            comp_of[k] = c;
        }
        let n_comp = roots.len();
        let mut faces = vec![Vec::new(); n_comp];
        for (f, &start) in shape.offsets().iter().enumerate() {
            faces[comp_of[start - 1]].push(f + 1);
        }
        let mut letters = vec![0usize; n_comp];
        for &c in &comp_of {
            letters[c] += 1;
        }
        let mut vertices = vec![0usize; n_comp];
        for c in particular {
            vertices[comp_of[c[0].unsigned_abs() as usize - 1]] += 1;
        }
        // orientation cover: orbits of <γ₊γ₋⁻¹, π̂> on the signed letters
        let cover = signed_orbits(&[&self.gamma_plus, &self.gamma_minus, pi_hat])?;
        let mut cover_of = vec![0usize; 2 * m];
        for (o, orbit) in cover.iter().enumerate() {
            for &k in orbit {
                let idx = if k > 0 {
                    k as usize - 1
                } else {
                    m + k.unsigned_abs() as usize - 1
                };
                cover_of[idx] = o;
            }
        }
        let mut components = Vec::with_capacity(n_comp);
        for c in 0..n_comp {
            let k = comp_of.iter().position(|&x| x == c).expect("non-empty component");
            let orientable = cover_of[k] != cover_of[m + k];
            let v = vertices[c];
            let e = letters[c] / 2;
            let fc = faces[c].len();
            let euler = v as i64 - e as i64 + fc as i64;
            let kind = classify(euler, orientable)?;
            components.push(Component {
                faces: faces[c].clone(),
                vertices: v,
                edges: e,
                face_count: fc,
                euler,
                orientable,
                kind,
            });
        }
        components.sort_by_key(|c| c.faces[0]);
        let total_v = particular.len();
        Ok(SurfaceReport {
            components,
            vertices: total_v,
            order_exponent: total_v as i64 - (m / 2) as i64 - r as i64,
        })
    }
}

fn classify(euler: i64, orientable: bool) -> Result<SurfaceKind> {
    if euler > 2 || (orientable && euler % 2 != 0) || (!orientable && euler > 1) {
        return Err(Error::Input(format!(
            "inconsistent surface: chi={euler}, orientable={orientable}"
        )));
    }
    Ok(if orientable {
        if euler == 2 {
            SurfaceKind::Sphere
        } else {
            SurfaceKind::Orientable {
                genus: ((2 - euler) / 2) as u32,
            }
        }
    } else {
        SurfaceKind::NonOrientable {
            crosscaps: (2 - euler) as u32,
        }
    })
}

/// Surface glued from the faces of `shape` by `p`.
pub fn surface_census(p: &Pairing, shape: &WordShape) -> Result<SurfaceReport> {
    Ok(Gluing::new(shape).glue(p)?.surface)
}
