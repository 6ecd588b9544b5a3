//! The Cayley complexes `X^{p,q} = Cay(⟨S_{p,q}⟩, S_{p,q})` built from the
//! Gaussian-integer generators `S_p`, and their geodesic power generators.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{overflow, Error, Result};
use crate::gaussian::{GMatrix, Gaussian};
use crate::gf::is_prime;
use crate::graph::Graph;
use crate::spectral::eigen::Operator;

pub const NEIGHBOR_MAGIC: &[u8; 8] = b"HDXCAY01";
pub const ELEMENT_MAGIC: &[u8; 8] = b"HDXELM01";
/// Largest `q` whose nine digits fit in a `u64` code.
pub const MAX_PACKED_Q: u64 = 137;
pub const DEFAULT_BUDGET_BYTES: u64 = 4 << 30;

fn check_one_mod_four(x: u64, what: &str) -> Result<()> {
    if !is_prime(x) {
        return Err(Error::NotPrime(x));
    }
    if x % 4 != 1 {
        return Err(Error::Invalid(format!("{what} = {x} is not 1 mod 4")));
    }
    Ok(())
}

/// The factor `π = a + bi` of `p = ππ̄` with `a` odd, `b` even and both positive.
pub fn gaussian_prime(p: u64) -> Result<Gaussian> {
    check_one_mod_four(p, "p")?;
    let p = p as i64;
    (1..)
        .step_by(2)
        .take_while(|a| a * a < p)
        .find_map(|a| {
            let b2 = p - a * a;
            let b = (b2 as f64).sqrt().round() as i64;
            (b * b == b2 && b % 2 == 0).then(|| Gaussian::new(a, b))
        })
        .ok_or_else(|| Error::Invalid(format!("{p} is not a sum of two squares")))
}

/// `z ≡ 1 (mod 2+2i)`.
fn is_one_mod_2_2i(z: Gaussian) -> bool {
    (z - Gaussian::ONE).div_exact(Gaussian::new(2, 2)).is_some()
}

fn inner(u: &[Gaussian; 3], v: &[Gaussian; 3]) -> Gaussian {
    (0..3).fold(Gaussian::ZERO, |acc, k| acc + u[k].conj() * v[k])
}

/// `S_p`: matrices with `s*s = pI`, `ord_π det s = 1` and diagonal `≡ 1 (mod 2+2i)`,
/// sorted.
pub fn enumerate_sp(p: u64) -> Result<Vec<GMatrix>> {
    let pi = gaussian_prime(p)?;
    let p = p as i64;
    let m = (p as f64).sqrt() as i64;
    let entries: Vec<Gaussian> = (-m..=m)
        .flat_map(|a| (-m..=m).map(move |b| Gaussian::new(a, b)))
        .filter(|z| z.norm() <= p)
        .collect();
    let mut vectors = Vec::new();
    for &x in &entries {
        for &y in entries.iter().filter(|y| x.norm() + y.norm() <= p) {
            for &z in entries.iter().filter(|z| x.norm() + y.norm() + z.norm() == p) {
                vectors.push([x, y, z]);
            }
        }
    }
    let column = |j: usize| -> Vec<&[Gaussian; 3]> { vectors.iter().filter(|v| is_one_mod_2_2i(v[j])).collect() };
    let (c0, c1, c2) = (column(0), column(1), column(2));
    let mut out = Vec::new();
    for a in &c0 {
        for b in c1.iter().filter(|b| inner(a, b).is_zero()) {
            for c in c2.iter().filter(|c| inner(a, c).is_zero() && inner(b, c).is_zero()) {
                let s = GMatrix::from_columns([**a, **b, **c]);
                if s.det().ord(pi) == 1 {
                    out.push(s);
                }
            }
        }
    }
    out.sort();
    let expected = (p * p + p + 1) as usize;
    if out.len() != expected {
        return Err(Error::Violation(format!("|S_{p}| = {} instead of {expected}", out.len())));
    }
    Ok(out)
}

/// For each `s`, the `s'` closing a triangle (`ss's''` scalar for some `s''`)
/// and the remaining `Σ_s`, as indices into `sp`.
#[derive(Clone, Debug)]
pub struct SigmaTables {
    pub closers: Vec<Vec<u32>>,
    pub sigma: Vec<Vec<u32>>,
}

pub fn sigma_tables(sp: &[GMatrix]) -> SigmaTables {
    let keys: HashSet<GMatrix> = sp.iter().map(GMatrix::projective_key).collect();
    let (closers, sigma) = sp
        .par_iter()
        .map(|&s| {
            let mut close = Vec::new();
            let mut rest = Vec::new();
            for (j, &t) in sp.iter().enumerate() {
                // ss's'' is scalar iff s'' is proportional to (ss')*.
                if keys.contains(&(s * t).adjoint().projective_key()) {
                    close.push(j as u32);
                } else {
                    rest.push(j as u32);
                }
            }
            (close, rest)
        })
        .unzip();
    SigmaTables { closers, sigma }
}

/// `S_p^(r)`: the products `s_1⋯s_r` with `s_{i+1} ∈ Σ_{s_i}`, as index paths.
pub fn power_paths(tables: &SigmaTables, r: usize) -> Vec<Vec<u32>> {
    let mut paths: Vec<Vec<u32>> = (0..tables.sigma.len() as u32).map(|i| vec![i]).collect();
    for _ in 1..r {
        paths = paths
            .iter()
            .flat_map(|path| {
                let last = *path.last().unwrap() as usize;
                tables.sigma[last].iter().map(move |&j| {
                    let mut next = path.clone();
                    next.push(j);
                    next
                })
            })
            .collect();
    }
    paths
}

pub fn power_generators(sp: &[GMatrix], tables: &SigmaTables, r: usize) -> Vec<GMatrix> {
    power_paths(tables, r)
        .iter()
        .map(|path| path.iter().fold(GMatrix::identity(), |acc, &i| acc * sp[i as usize]))
        .collect()
}

/// Whether the given matrices are pairwise distinct in `PGL_3(Q(i))`.
pub fn projectively_distinct(ms: &[GMatrix]) -> bool {
    let keys: HashSet<GMatrix> = ms.iter().map(GMatrix::projective_key).collect();
    keys.len() == ms.len()
}

/// The smaller square root of `−1` in `F_q`.
pub fn sqrt_minus_one(q: u64) -> Option<u64> {
    (1..q).find(|x| x * x % q == q - 1)
}

pub fn pgl3_order(q: u64) -> u64 {
    q.pow(3) * (q.pow(3) - 1) * (q * q - 1)
}

pub fn psl3_order(q: u64) -> u64 {
    let g = if (q - 1) % 3 == 0 { 3 } else { 1 };
    pgl3_order(q) / g
}

/// `PGL_3(F_q)` for prime `q`, elements packed as nine base-`q` digits
/// (row-major, first nonzero entry 1).
#[derive(Clone, Debug)]
pub struct Pgl3 {
    q: u64,
    inv: Vec<u64>,
}

impl Pgl3 {
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q > MAX_PACKED_Q {
            return Err(Error::Invalid(format!("q = {q} exceeds packed limit {MAX_PACKED_Q}")));
        }
        let mut inv = vec![0; q as usize];
        for x in 1..q {
            inv[x as usize] = (1..q).find(|y| x * y % q == 1).unwrap();
        }
        Ok(Self { q, inv })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `None` for singular matrices.
    pub fn pack(&self, m: [u64; 9]) -> Option<u64> {
        let q = self.q;
        let det = (m[0] * ((m[4] * m[8] + q * q - m[5] * m[7]) % q)
            + m[1] * ((m[5] * m[6] + q * q - m[3] * m[8]) % q)
            + m[2] * ((m[3] * m[7] + q * q - m[4] * m[6]) % q))
            % q;
        if det == 0 {
            return None;
        }
        let lead = *m.iter().find(|&&x| x != 0)?;
        let s = self.inv[lead as usize];
        Some(m.iter().rev().fold(0, |acc, &x| acc * q + x * s % q))
    }

    pub fn unpack(&self, mut code: u64) -> [u64; 9] {
        let mut m = [0; 9];
        for x in m.iter_mut() {
            *x = code % self.q;
            code /= self.q;
        }
        m
    }

    fn mul_unpacked(&self, a: &[u64; 9], b: &[u64; 9]) -> [u64; 9] {
        let mut m = [0; 9];
        for i in 0..3 {
            for j in 0..3 {
                m[i * 3 + j] = (0..3).map(|k| a[i * 3 + k] * b[k * 3 + j]).sum::<u64>() % self.q;
            }
        }
        m
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.pack(self.mul_unpacked(&self.unpack(a), &self.unpack(b))).expect("product of invertible matrices")
    }

    pub fn identity(&self) -> u64 {
        self.pack([1, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap()
    }
}

/// `X^{p,q}`: the group `G = ⟨S_{p,q}⟩` in BFS order with its right
/// multiplication table.
#[derive(Clone, Debug)]
pub struct CayleyGroup {
    pub p: u64,
    pub q: u64,
    pub eps: u64,
    pgl: Pgl3,
    /// Integer generators `S_p` (sorted) and their images, in the same order.
    pub sp: Vec<GMatrix>,
    pub gens: Vec<u64>,
    elements: Vec<u64>,
    index: HashMap<u64, u32>,
    /// Row `g`: the ids of `g·s` for `s ∈ S_{p,q}`.
    right: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CayleySummary {
    pub p: u64,
    pub q: u64,
    pub eps: u64,
    pub order: usize,
    pub pgl3_order: u64,
    pub psl3_order: u64,
    pub degree: usize,
    pub generators_injective: bool,
    pub tripartite: bool,
}

/// Reduces `S_p` modulo `q` and closes it under right multiplication.
/// The closure is refused when its estimated footprint exceeds `budget_bytes`.
pub fn build_cayley(p: u64, q: u64, budget_bytes: u64) -> Result<CayleyGroup> {
    check_one_mod_four(q, "q")?;
    if p == q {
        return Err(Error::Invalid("p and q must differ".into()));
    }
    let sp = enumerate_sp(p)?;
    let pgl = Pgl3::new(q)?;
    let eps = sqrt_minus_one(q).expect("q ≡ 1 mod 4");
    let gens: Vec<u64> = sp
        .iter()
        .map(|s| pgl.pack(s.reduce(q, eps)).ok_or_else(|| Error::Violation(format!("{s:?} is singular mod {q}"))))
        .collect::<Result<_>>()?;
    let deg = gens.len() as u128;
    let order = pgl3_order(q) as u128;
    let estimate = order * (8 + 32 + 4 * deg);
    if estimate > budget_bytes as u128 {
        return Err(overflow("Cayley closure bytes", estimate, budget_bytes as u128));
    }
    let id = pgl.identity();
    let mut elements = vec![id];
    let mut index = HashMap::from([(id, 0u32)]);
    let mut right: Vec<u32> = Vec::new();
    let gen_mats: Vec<[u64; 9]> = gens.iter().map(|&g| pgl.unpack(g)).collect();
    let mut start = 0;
    let pg = &pgl;
    while start < elements.len() {
        let end = elements.len();
        let products: Vec<u64> = elements[start..end]
            .par_iter()
            .flat_map_iter(|&g| {
                let a = pg.unpack(g);
                gen_mats.iter().map(move |b| pg.pack(pg.mul_unpacked(&a, b)).unwrap()).collect::<Vec<_>>()
            })
            .collect();
        for code in products {
            let next = elements.len() as u32;
            let id = *index.entry(code).or_insert_with(|| {
                elements.push(code);
                next
            });
            right.push(id);
        }
        start = end;
    }
    Ok(CayleyGroup {
        p,
        q,
        eps,
        pgl,
        sp,
        gens,
        elements,
        index,
        right,
    })
}

/// Loads `X^{p,q}` from `cache/cayley-p-q/` when present, otherwise builds
/// it and writes it there.
pub fn load_or_build(p: u64, q: u64, budget_bytes: u64, cache: Option<&Path>) -> Result<CayleyGroup> {
    let Some(root) = cache else {
        return build_cayley(p, q, budget_bytes);
    };
    let dir = root.join(format!("cayley-{p}-{q}"));
    if dir.join("neighbors.bin").exists() {
        if let Ok(x) = CayleyGroup::read_binary(&dir, p, q) {
            return Ok(x);
        }
    }
    let x = build_cayley(p, q, budget_bytes)?;
    x.write_binary(&dir)?;
    Ok(x)
}

/// Three members of `S_5` as printed in the construction (diagonal, block and
/// dense type), for cross-checking the enumeration.
pub fn s5_reference_members() -> [GMatrix; 3] {
    let g = Gaussian::new;
    [
        GMatrix([g(-1, 2), g(0, 0), g(0, 0), g(0, 0), g(-1, 2), g(0, 0), g(0, 0), g(0, 0), g(-1, -2)]),
        GMatrix([g(-1, 2), g(0, 0), g(0, 0), g(0, 0), g(1, 0), g(2, 0), g(0, 0), g(-2, 0), g(1, 0)]),
        GMatrix([g(1, 0), g(1, 1), g(1, 1), g(1, 1), g(1, 0), g(-1, -1), g(1, 1), g(-1, -1), g(1, 0)]),
    ]
}

impl CayleyGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    pub fn pgl(&self) -> &Pgl3 {
        &self.pgl
    }

    pub fn element(&self, g: u32) -> u64 {
        self.elements[g as usize]
    }

    pub fn id_of(&self, code: u64) -> Option<u32> {
        self.index.get(&code).copied()
    }

    /// Ids of `g·s` for `s ∈ S_{p,q}`.
    pub fn right(&self, g: u32) -> &[u32] {
        let d = self.degree();
        &self.right[g as usize * d..(g as usize + 1) * d]
    }

    pub fn right_table(&self) -> &[u32] {
        &self.right
    }

    pub fn reduce(&self, m: &GMatrix) -> Result<u64> {
        self.pgl
            .pack(m.reduce(self.q, self.eps))
            .ok_or_else(|| Error::Violation(format!("{m:?} is singular mod {}", self.q)))
    }

    /// Table of `g·t` for each `t` in `set` (codes of group elements).
    pub fn table_for(&self, set: &[u64]) -> Result<Vec<u32>> {
        let mats: Vec<[u64; 9]> = set.iter().map(|&t| self.pgl.unpack(t)).collect();
        let rows: Vec<Vec<u32>> = self
            .elements
            .par_iter()
            .map(|&g| {
                let a = self.pgl.unpack(g);
                mats.iter()
                    .map(|b| {
                        let code = self.pgl.pack(self.pgl.mul_unpacked(&a, b)).unwrap();
                        self.id_of(code).ok_or_else(|| Error::Violation("product left the group".into()))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?;
        Ok(rows.concat())
    }

    /// Codes of `s^{-1} ∝ s*` for `s ∈ S_p`.
    pub fn inverse_gens(&self) -> Result<Vec<u64>> {
        self.sp.iter().map(|s| self.reduce(&s.adjoint())).collect()
    }

    pub fn generators_injective(&self) -> bool {
        self.gens.iter().collect::<HashSet<_>>().len() == self.gens.len()
    }

    /// Whether `g ↦ g·s` is a bijection for every generator.
    pub fn right_maps_are_permutations(&self) -> bool {
        let d = self.degree();
        (0..d).into_par_iter().all(|k| {
            let mut seen = vec![false; self.order()];
            (0..self.order()).all(|g| !std::mem::replace(&mut seen[self.right[g * d + k] as usize], true))
        })
    }

    /// For each generator `s`, the number of `s'` with `s·s'·s'' = e` in `G`
    /// for some `s''`. This counts 3-cycles of the quotient graph, which can
    /// exceed the `p+1` triangles lifted from `Z[i]` when `q` is small.
    pub fn quotient_three_cycles(&self) -> Vec<usize> {
        (0..self.degree())
            .map(|k| {
                let x = self.right(0)[k];
                self.right(x).iter().filter(|&&y| self.right(y).contains(&0)).count()
            })
            .collect()
    }

    /// A coloring `c(g·s) = c(g) + 1 (mod 3)` exists.
    pub fn is_tripartite(&self) -> bool {
        let mut label = vec![u8::MAX; self.order()];
        label[0] = 0;
        // BFS order: every element after the identity is first reached from an
        // earlier one.
        for g in 0..self.order() as u32 {
            let l = label[g as usize];
            debug_assert!(l != u8::MAX);
            for &h in self.right(g) {
                let want = (l + 1) % 3;
                match label[h as usize] {
                    u8::MAX => label[h as usize] = want,
                    x if x != want => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Link of the identity: `s` is joined to `ss'` for each triangle
    /// `e → s → ss' → e` coming from a scalar product `ss's''` over `Z[i]`.
    pub fn identity_link(&self, tables: &SigmaTables) -> (Graph, Vec<u32>) {
        let outs: Vec<u32> = self.right(0).to_vec();
        let mut verts = outs.clone();
        let mut edges = Vec::new();
        for (k, &x) in outs.iter().enumerate() {
            for &j in &tables.closers[k] {
                let y = self.right(x)[j as usize];
                edges.push((x, y));
                verts.push(y);
            }
        }
        verts.sort_unstable();
        verts.dedup();
        let pos: HashMap<u32, u32> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        (Graph::from_edges(verts.len(), edges.iter().map(|(x, y)| (pos[x], pos[y]))), verts)
    }

    pub fn summary(&self) -> CayleySummary {
        CayleySummary {
            p: self.p,
            q: self.q,
            eps: self.eps,
            order: self.order(),
            pgl3_order: pgl3_order(self.q),
            psl3_order: psl3_order(self.q),
            degree: self.degree(),
            generators_injective: self.generators_injective(),
            tripartite: self.is_tripartite(),
        }
    }

    /// Writes `neighbors.bin` (magic, then `p, q, |G|, degree` as u32 LE, then
    /// `|G|×degree` u32 neighbor ids) and `elements.bin` (magic, `q, |G|` as
    /// u32 LE, then the u64 element codes).
    pub fn write_binary(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(File::create(dir.join("neighbors.bin"))?);
        w.write_all(NEIGHBOR_MAGIC)?;
        for x in [self.p, self.q, self.order() as u64, self.degree() as u64] {
            w.write_all(&(x as u32).to_le_bytes())?;
        }
        for &id in &self.right {
            w.write_all(&id.to_le_bytes())?;
        }
        w.flush()?;
        let mut w = BufWriter::new(File::create(dir.join("elements.bin"))?);
        w.write_all(ELEMENT_MAGIC)?;
        for x in [self.q, self.order() as u64] {
            w.write_all(&(x as u32).to_le_bytes())?;
        }
        for &e in &self.elements {
            w.write_all(&e.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Loads a closure written by [`CayleyGroup::write_binary`].
    pub fn read_binary(dir: &Path, p: u64, q: u64) -> Result<Self> {
        let bad = |m: &str| Error::Invalid(format!("{}: {m}", dir.display()));
        let mut r = BufReader::new(File::open(dir.join("neighbors.bin"))?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != NEIGHBOR_MAGIC {
            return Err(bad("bad neighbor magic"));
        }
        let mut words = [0u32; 4];
        for w in words.iter_mut() {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            *w = u32::from_le_bytes(b);
        }
        let [fp, fq, n, d] = words.map(u64::from);
        if (fp, fq) != (p, q) {
            return Err(bad("cached closure is for different (p, q)"));
        }
        let mut buf = vec![0u8; (n * d * 4) as usize];
        r.read_exact(&mut buf)?;
        let right: Vec<u32> = buf.chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
        let mut r = BufReader::new(File::open(dir.join("elements.bin"))?);
        r.read_exact(&mut magic)?;
        if &magic != ELEMENT_MAGIC {
            return Err(bad("bad element magic"));
        }
        let mut head = [0u8; 8];
        r.read_exact(&mut head)?;
        let mut buf = vec![0u8; (n * 8) as usize];
        r.read_exact(&mut buf)?;
        let elements: Vec<u64> = buf.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect();
        let sp = enumerate_sp(p)?;
        let pgl = Pgl3::new(q)?;
        let eps = sqrt_minus_one(q).ok_or_else(|| bad("q has no square root of -1"))?;
        let gens: Vec<u64> = sp.iter().map(|s| pgl.pack(s.reduce(q, eps)).unwrap()).collect();
        if gens.len() as u64 != d {
            return Err(bad("degree mismatch"));
        }
        let index = elements.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        Ok(Self {
            p,
            q,
            eps,
            pgl,
            sp,
            gens,
            elements,
            index,
            right,
        })
    }
}

/// `Σ_{s∈S} f(gs) + f(gs^{-1})` over one or more borrowed generator tables.
pub struct CayleyOperator<'a> {
    n: usize,
    tables: Vec<(&'a [u32], usize)>,
}

impl<'a> CayleyOperator<'a> {
    /// `tables` are row-major `n × degree` neighbor arrays.
    pub fn new(n: usize, tables: Vec<(&'a [u32], usize)>) -> Self {
        Self { n, tables }
    }
}

impl Operator for CayleyOperator<'_> {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(g, yg)| {
            *yg = self
                .tables
                .iter()
                .map(|(t, d)| t[g * d..(g + 1) * d].iter().map(|&h| x[h as usize]).sum::<f64>())
                .sum();
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> Gaussian {
        Gaussian::new(re, im)
    }

    #[test]
    fn s5_contains_printed_members() {
        let s5 = enumerate_sp(5).unwrap();
        assert_eq!(s5.len(), 31);
        for m in s5_reference_members() {
            assert!(s5.contains(&m), "{m:?}");
        }
        for s in &s5 {
            assert!((s.adjoint() * *s).is_scalar());
        }
    }

    #[test]
    fn sigma_sizes_for_p5() {
        let s5 = enumerate_sp(5).unwrap();
        let t = sigma_tables(&s5);
        assert!(t.sigma.iter().all(|x| x.len() == 25));
        assert!(t.closers.iter().all(|x| x.len() == 6));
        let pow = power_generators(&s5, &t, 2);
        assert_eq!(pow.len(), 775);
        assert!(projectively_distinct(&pow));
    }

    #[test]
    fn field_helpers() {
        assert_eq!(sqrt_minus_one(5), Some(2));
        assert_eq!(sqrt_minus_one(13), Some(5));
        assert_eq!(pgl3_order(5), 372000);
        assert_eq!(gaussian_prime(5).unwrap(), g(1, 2));
        assert_eq!(gaussian_prime(13).unwrap(), g(3, 2));
        assert!(gaussian_prime(7).is_err());
        let pgl = Pgl3::new(5).unwrap();
        let a = pgl.pack([1, 2, 0, 0, 3, 1, 4, 0, 2]).unwrap();
        assert_eq!(pgl.mul(a, pgl.identity()), a);
        assert_eq!(pgl.pack([2, 4, 0, 0, 1, 2, 3, 0, 4]), pgl.pack([1, 2, 0, 0, 3, 1, 4, 0, 2]));
    }
}
