//! Finite matrix groups given by generators: enumeration by breadth-first
//! search, derived series, invariant subspaces, and reduction modulo
//! primes.

use std::collections::{HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{is_prime, FieldElement, FieldKind, FieldSpec};
use crate::linalg::{
    extend_basis, intertwiner_space, kernel, unflatten, EchelonBuilder, LinalgError, Matrix, Subspace,
};

pub const DEFAULT_CAP: usize = 500_000;

/// Frontier elements multiplied per batch during enumeration.
const BATCH: usize = 4096;

/// Largest number of projective points visited by the exhaustive spin.
const EXHAUSTIVE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator {0} is not invertible")]
    NonInvertibleGenerator(usize),
    #[error("generator {index} is not a {degree}x{degree} matrix over {field}")]
    ShapeMismatch { index: usize, degree: usize, field: String },
    #[error("enumeration exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("the cap must be at least 1")]
    InvalidCap,
    #[error("the closure was run without retaining its elements")]
    ElementsNotRetained,
    #[error("seed vector is zero")]
    ZeroSeed,
    #[error("seed vector has length {got}, expected {expected}")]
    SeedLength { got: usize, expected: usize },
    #[error("prime {p} cannot be used: {reason}")]
    BadPrime { p: u64, reason: String },
    #[error("no primes were supplied")]
    NoPrimes,
    #[error("group orders disagree across primes: {}", format_orders(.0))]
    OrderDisagreement(Vec<(u64, u64)>),
    #[error("characteristic {p} divides the group order {order}")]
    NotSemisimple { p: u64, order: u64 },
    #[error("subspace is not invariant under the group")]
    NotInvariant,
    #[error("could not build a thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn format_orders(orders: &[(u64, u64)]) -> String {
    orders.iter().map(|(p, o)| format!("{o} mod {p}")).collect::<Vec<_>>().join(", ")
}

/// Invertible `d × d` generators over one field.
#[derive(Debug, Clone)]
pub struct MatrixGroupGen {
    field: FieldSpec,
    degree: usize,
    generators: Vec<Matrix>,
}

impl MatrixGroupGen {
    pub fn new(field: &FieldSpec, degree: usize, generators: Vec<Matrix>) -> Result<Self, GroupError> {
        for (index, g) in generators.iter().enumerate() {
            if g.shape() != (degree, degree) || g.field() != field {
                return Err(GroupError::ShapeMismatch { index, degree, field: field.to_string() });
            }
            if !g.is_invertible() {
                return Err(GroupError::NonInvertibleGenerator(index));
            }
        }
        Ok(MatrixGroupGen { field: field.clone(), degree, generators })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }
}

/// Element arithmetic used by the enumeration.
trait Backend: Sync {
    type Elem: Clone + Eq + Hash + Send + Sync;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn encode(&self, m: &Matrix) -> Self::Elem;
    fn decode(&self, e: &Self::Elem) -> Matrix;

    fn inv(&self, e: &Self::Elem) -> Self::Elem {
        self.encode(&self.decode(e).inverse().expect("group elements are invertible"))
    }
}

/// Matrices over GF(p) as flat residue arrays.
#[derive(Debug, Clone)]
struct PrimeBackend {
    field: FieldSpec,
    p: u64,
    d: usize,
}

impl Backend for PrimeBackend {
    type Elem = Box<[u32]>;

    fn mul(&self, a: &Box<[u32]>, b: &Box<[u32]>) -> Box<[u32]> {
        let d = self.d;
        let mut out = vec![0u32; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc: u128 = 0;
                for k in 0..d {
                    acc += a[i * d + k] as u128 * b[k * d + j] as u128;
                }
                out[i * d + j] = (acc % self.p as u128) as u32;
            }
        }
        out.into_boxed_slice()
    }

    fn encode(&self, m: &Matrix) -> Box<[u32]> {
        m.entries()
            .iter()
            .map(|x| match x {
                FieldElement::Residue(r) => *r as u32,
                FieldElement::Rational(_) => unreachable!("prime field entries are residues"),
            })
            .collect()
    }

    fn decode(&self, e: &Box<[u32]>) -> Matrix {
        let data = e.iter().map(|&r| FieldElement::Residue(r as u64)).collect();
        Matrix::new(&self.field, self.d, self.d, data).expect("square data")
    }
}

/// A matrix hashed and compared through its canonical key.
#[derive(Debug, Clone)]
struct Keyed {
    key: Vec<u8>,
    matrix: Matrix,
}

impl PartialEq for Keyed {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for Keyed {}

impl Hash for Keyed {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

#[derive(Debug, Clone)]
struct GenericBackend;

impl Backend for GenericBackend {
    type Elem = Keyed;

    fn mul(&self, a: &Keyed, b: &Keyed) -> Keyed {
        self.encode(&(&a.matrix * &b.matrix))
    }

    fn encode(&self, m: &Matrix) -> Keyed {
        Keyed { key: m.canonical_key(), matrix: m.clone() }
    }

    fn decode(&self, e: &Keyed) -> Matrix {
        e.matrix.clone()
    }
}

/// Breadth-first growth of `set` from `frontier` by right multiplication
/// with `gens`. Returns false once the set would exceed `cap`.
fn grow<B: Backend>(
    b: &B,
    set: &mut HashSet<B::Elem>,
    mut frontier: Vec<B::Elem>,
    gens: &[B::Elem],
    cap: usize,
    pool: Option<&rayon::ThreadPool>,
) -> bool {
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for chunk in frontier.chunks(BATCH) {
            let products: Vec<B::Elem> = match pool {
                Some(pool) => {
                    pool.install(|| chunk.par_iter().flat_map_iter(|x| gens.iter().map(move |g| b.mul(x, g))).collect())
                }
                None => chunk.iter().flat_map(|x| gens.iter().map(move |g| b.mul(x, g))).collect(),
            };
            for y in products {
                if !set.contains(&y) {
                    if set.len() >= cap {
                        return false;
                    }
                    set.insert(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    true
}

/// Enlarge a set closed under `gens[..len-1]` to the closure under all of
/// `gens`. Only products with the new generator can leave the old set.
fn adjoin<B: Backend>(
    b: &B,
    set: &mut HashSet<B::Elem>,
    gens: &[B::Elem],
    cap: usize,
    pool: Option<&rayon::ThreadPool>,
) -> bool {
    let x = gens.last().expect("at least one generator");
    let candidates: Vec<B::Elem> = set.iter().map(|s| b.mul(s, x)).collect();
    let mut frontier = Vec::new();
    for y in candidates {
        if !set.contains(&y) {
            if set.len() >= cap {
                return false;
            }
            set.insert(y.clone());
            frontier.push(y);
        }
    }
    grow(b, set, frontier, gens, cap, pool)
}

fn identity<B: Backend>(b: &B, field: &FieldSpec, d: usize) -> B::Elem {
    b.encode(&Matrix::identity(field, d))
}

/// Generators with duplicates and the identity removed, in order.
fn distinct<E: Clone + Eq + Hash>(gens: &[E], id: &E) -> Vec<E> {
    let mut seen = HashSet::new();
    gens.iter().filter(|g| *g != id && seen.insert((*g).clone())).cloned().collect()
}

fn make_pool(jobs: usize) -> Result<Option<rayon::ThreadPool>, GroupError> {
    if jobs <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Some)
        .map_err(|e| GroupError::ThreadPool(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosureOptions {
    pub cap: usize,
    /// Worker threads for frontier expansion; 0 or 1 is sequential.
    pub jobs: usize,
    /// Keep the element set for membership queries.
    pub retain: bool,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions { cap: DEFAULT_CAP, jobs: 1, retain: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureStatus {
    Complete,
    CapExceeded,
}

#[derive(Debug, Clone)]
enum Members {
    Prime(PrimeBackend, HashSet<Box<[u32]>>),
    Generic(HashSet<Keyed>),
}

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub status: ClosureStatus,
    /// The group order when complete; otherwise the number of elements
    /// found before stopping.
    pub order: u64,
    field: FieldSpec,
    degree: usize,
    members: Option<Members>,
}

impl ClosureResult {
    pub fn is_complete(&self) -> bool {
        self.status == ClosureStatus::Complete
    }

    fn members(&self) -> Result<&Members, GroupError> {
        if !self.is_complete() {
            return Err(GroupError::CapExceeded(self.order as usize));
        }
        self.members.as_ref().ok_or(GroupError::ElementsNotRetained)
    }

    pub fn contains(&self, m: &Matrix) -> Result<bool, GroupError> {
        if m.shape() != (self.degree, self.degree) || m.field() != &self.field {
            return Ok(false);
        }
        Ok(match self.members()? {
            Members::Prime(b, set) => set.contains(&b.encode(m)),
            Members::Generic(set) => set.contains(&GenericBackend.encode(m)),
        })
    }

    /// Whether `λ·1` is a group element.
    pub fn contains_scalar(&self, lambda: &FieldElement) -> Result<bool, GroupError> {
        self.contains(&Matrix::scalar(&self.field, self.degree, lambda))
    }

    /// All elements, sorted by canonical key.
    pub fn elements(&self) -> Result<Vec<Matrix>, GroupError> {
        let mut out: Vec<Matrix> = match self.members()? {
            Members::Prime(b, set) => set.iter().map(|e| b.decode(e)).collect(),
            Members::Generic(set) => set.iter().map(|e| e.matrix.clone()).collect(),
        };
        out.sort_by_cached_key(Matrix::canonical_key);
        Ok(out)
    }
}

fn run_closure<B: Backend>(
    b: &B,
    group: &MatrixGroupGen,
    opts: &ClosureOptions,
) -> Result<(ClosureStatus, HashSet<B::Elem>), GroupError> {
    if opts.cap == 0 {
        return Err(GroupError::InvalidCap);
    }
    let pool = make_pool(opts.jobs)?;
    let id = identity(b, &group.field, group.degree);
    let gens: Vec<B::Elem> = group.generators.iter().map(|g| b.encode(g)).collect();
    let gens = distinct(&gens, &id);
    let mut set = HashSet::from([id.clone()]);
    let complete = grow(b, &mut set, vec![id], &gens, opts.cap, pool.as_ref());
    let status = if complete { ClosureStatus::Complete } else { ClosureStatus::CapExceeded };
    Ok((status, set))
}

fn prime_backend(group: &MatrixGroupGen) -> Option<PrimeBackend> {
    match group.field.kind() {
        FieldKind::Prime(p) => Some(PrimeBackend { field: group.field.clone(), p, d: group.degree }),
        _ => None,
    }
}

/// Enumerate the group generated by `group`.
pub fn closure(group: &MatrixGroupGen, opts: &ClosureOptions) -> Result<ClosureResult, GroupError> {
    let (status, order, members) = match prime_backend(group) {
        Some(b) => {
            let (status, set) = run_closure(&b, group, opts)?;
            (status, set.len(), Members::Prime(b, set))
        }
        None => {
            let (status, set) = run_closure(&GenericBackend, group, opts)?;
            (status, set.len(), Members::Generic(set))
        }
    };
    Ok(ClosureResult {
        status,
        order: order as u64,
        field: group.field.clone(),
        degree: group.degree,
        members: opts.retain.then_some(members),
    })
}

/// Normal closure of `seeds` in the group generated by `ambient`; returns
/// generators and elements.
/// Generators found so far with the element set they generate.
type Generated<B> = (Vec<<B as Backend>::Elem>, HashSet<<B as Backend>::Elem>);

fn normal_closure<B: Backend>(
    b: &B,
    ambient: &[B::Elem],
    seeds: Vec<B::Elem>,
    id: &B::Elem,
    cap: usize,
    pool: Option<&rayon::ThreadPool>,
) -> Result<Generated<B>, GroupError> {
    let ambient_inv: Vec<B::Elem> = ambient.iter().map(|g| b.inv(g)).collect();
    let mut gens = Vec::new();
    let mut set = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from(seeds);
    while let Some(x) = queue.pop_front() {
        if set.contains(&x) {
            continue;
        }
        gens.push(x.clone());
        if !adjoin(b, &mut set, &gens, cap, pool) {
            return Err(GroupError::CapExceeded(cap));
        }
        for (g, gi) in ambient.iter().zip(&ambient_inv) {
            queue.push_back(b.mul(&b.mul(gi, &x), g));
        }
    }
    Ok((gens, set))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedSeries {
    /// `|G|, |G'|, |G''|, …` up to the first repeat or 1.
    pub orders: Vec<u64>,
    pub solvable: bool,
}

impl DerivedSeries {
    /// Whether the last stage is perfect and nontrivial.
    pub fn ends_perfect(&self) -> bool {
        !self.solvable
    }
}

fn run_derived<B: Backend>(b: &B, group: &MatrixGroupGen, opts: &ClosureOptions) -> Result<DerivedSeries, GroupError> {
    let pool = make_pool(opts.jobs)?;
    let id = identity(b, &group.field, group.degree);
    let encoded: Vec<B::Elem> = group.generators.iter().map(|g| b.encode(g)).collect();
    let mut gens = distinct(&encoded, &id);
    let mut set = HashSet::from([id.clone()]);
    if !grow(b, &mut set, vec![id.clone()], &gens, opts.cap, pool.as_ref()) {
        return Err(GroupError::CapExceeded(opts.cap));
    }
    let mut orders = vec![set.len() as u64];
    loop {
        let current = *orders.last().expect("nonempty");
        if current == 1 {
            return Ok(DerivedSeries { orders, solvable: true });
        }
        let inverses: Vec<B::Elem> = gens.iter().map(|g| b.inv(g)).collect();
        let mut seeds = Vec::new();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let c = b.mul(&b.mul(&inverses[i], &inverses[j]), &b.mul(&gens[i], &gens[j]));
                if c != id {
                    seeds.push(c);
                }
            }
        }
        let seeds = distinct(&seeds, &id);
        let (next_gens, next_set) = normal_closure(b, &gens, seeds, &id, opts.cap, pool.as_ref())?;
        let order = next_set.len() as u64;
        orders.push(order);
        if order == current {
            return Ok(DerivedSeries { orders, solvable: false });
        }
        gens = next_gens;
    }
}

/// Orders of the derived series, each stage being the normal closure of
/// the commutators of the previous stage's generators.
pub fn derived_series(group: &MatrixGroupGen, opts: &ClosureOptions) -> Result<DerivedSeries, GroupError> {
    match prime_backend(group) {
        Some(b) => run_derived(&b, group, opts),
        None => run_derived(&GenericBackend, group, opts),
    }
}

/// The smallest subspace containing `seed` and stable under every
/// generator.
pub fn spin(group: &MatrixGroupGen, seed: &[FieldElement]) -> Result<Subspace, GroupError> {
    spin_with(&group.field, group.degree, &group.generators, seed)
}

fn spin_with(k: &FieldSpec, d: usize, gens: &[Matrix], seed: &[FieldElement]) -> Result<Subspace, GroupError> {
    if seed.len() != d {
        return Err(GroupError::SeedLength { got: seed.len(), expected: d });
    }
    let mut builder = EchelonBuilder::new(k);
    if !builder.insert(seed) {
        return Err(GroupError::ZeroSeed);
    }
    let mut basis = vec![seed.to_vec()];
    let mut i = 0;
    while i < basis.len() && basis.len() < d {
        for g in gens {
            let w = g.apply(&basis[i]);
            if builder.insert(&w) {
                basis.push(w);
            }
        }
        i += 1;
    }
    Ok(Subspace::span_of_vectors(k, d, &basis)?)
}

/// The smallest residue of multiplicative order exactly `m` modulo `p`.
pub fn root_of_unity_mod(m: u64, p: u64) -> Result<u64, GroupError> {
    if !is_prime(p) || p >= 1 << 32 {
        return Err(GroupError::BadPrime { p, reason: "not a prime below 2^32".into() });
    }
    if !(p - 1).is_multiple_of(m) {
        return Err(GroupError::BadPrime { p, reason: format!("p is not 1 mod {m}") });
    }
    let f = FieldSpec::prime(p).expect("checked prime");
    (1..p)
        .find(|&x| f.multiplicative_order(&FieldElement::Residue(x), m) == Some(m))
        .ok_or(GroupError::BadPrime { p, reason: format!("no element of order {m}") })
}

/// Reduce a matrix over Q, Q(ζ_m) or GF(p) to GF(p). For cyclotomic fields
/// `z` goes to [`root_of_unity_mod`]`(m, p)`.
pub fn reduce_matrix(m: &Matrix, p: u64) -> Result<Matrix, GroupError> {
    let target = FieldSpec::prime(p).map_err(|e| GroupError::BadPrime { p, reason: e.to_string() })?;
    let zeta = match m.field().kind() {
        FieldKind::Prime(q) if q == p => return Ok(m.clone()),
        FieldKind::Prime(q) => {
            return Err(GroupError::BadPrime { p, reason: format!("entries lie in GF({q})") });
        }
        FieldKind::Rational => None,
        FieldKind::Cyclotomic(n) => Some(FieldElement::Residue(root_of_unity_mod(n, p)?)),
    };
    let bad_denominator = || GroupError::BadPrime { p, reason: "p divides a denominator".into() };
    let mut data = Vec::with_capacity(m.rows() * m.cols());
    for x in m.entries() {
        let coeffs = x.coefficients().expect("characteristic zero");
        let mut acc = target.zero();
        let mut power = target.one();
        for (i, c) in coeffs.iter().enumerate() {
            let term = target.from_ratio(c).map_err(|_| bad_denominator())?;
            acc = target.add(&acc, &target.mul(&term, &power));
            if let Some(z) = &zeta {
                if i + 1 < coeffs.len() {
                    power = target.mul(&power, z);
                }
            }
        }
        data.push(acc);
    }
    Ok(Matrix::new(&target, m.rows(), m.cols(), data)?)
}

pub fn reduce_group(group: &MatrixGroupGen, p: u64) -> Result<MatrixGroupGen, GroupError> {
    let target = FieldSpec::prime(p).map_err(|e| GroupError::BadPrime { p, reason: e.to_string() })?;
    let mut gens = Vec::with_capacity(group.generators.len());
    for (i, g) in group.generators.iter().enumerate() {
        let r = reduce_matrix(g, p)?;
        if !r.is_invertible() {
            return Err(GroupError::BadPrime { p, reason: format!("generator {i} is singular mod p") });
        }
        gens.push(r);
    }
    MatrixGroupGen::new(&target, group.degree, gens)
}

/// Order of the group computed from its images modulo each prime; the
/// images must agree.
pub fn modular_order(group: &MatrixGroupGen, primes: &[u64], opts: &ClosureOptions) -> Result<u64, GroupError> {
    if primes.is_empty() {
        return Err(GroupError::NoPrimes);
    }
    let opts = ClosureOptions { retain: false, ..*opts };
    let mut orders = Vec::with_capacity(primes.len());
    for &p in primes {
        let c = closure(&reduce_group(group, p)?, &opts)?;
        if !c.is_complete() {
            return Err(GroupError::CapExceeded(opts.cap));
        }
        orders.push((p, c.order));
    }
    if orders.iter().any(|&(_, o)| o != orders[0].1) {
        return Err(GroupError::OrderDisagreement(orders));
    }
    Ok(orders[0].1)
}

/// An invariant summand with evidence for its irreducibility.
#[derive(Debug, Clone)]
pub struct Summand {
    pub space: Subspace,
    /// Dimension of the space of endomorphisms commuting with the group.
    pub commutant_dim: usize,
    /// Whether every standard basis vector spins to the whole summand.
    pub standard_spins_full: bool,
    /// Over a small finite field: whether every nonzero vector spins to the
    /// whole summand.
    pub exhaustive_spin: Option<bool>,
}

impl Summand {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Decided by the exhaustive spin when available, otherwise by a
    /// one-dimensional commutant (valid because the module is semisimple).
    pub fn is_irreducible(&self) -> bool {
        self.exhaustive_spin.unwrap_or(self.commutant_dim == 1)
    }
}

fn unit(k: &FieldSpec, d: usize, i: usize) -> Vec<FieldElement> {
    let mut v = vec![k.zero(); d];
    v[i] = k.one();
    v
}

/// A proper nonzero invariant subspace of `k^d` under `gens`, if one is
/// found by spinning unit vectors or from eigenspaces of the commutant.
fn find_invariant(k: &FieldSpec, d: usize, gens: &[Matrix]) -> Result<Option<Subspace>, GroupError> {
    for i in 0..d {
        let s = spin_with(k, d, gens, &unit(k, d, i))?;
        if s.dim() < d {
            return Ok(Some(s));
        }
    }
    let Some(q) = k.order() else {
        return Ok(None);
    };
    let commutant = intertwiner_space(gens, gens)?;
    for c in commutant.basis().row_vectors() {
        let c = unflatten(k, c, d)?;
        for lambda in 0..q {
            let shifted = &c - &Matrix::scalar(k, d, &k.from_i64(lambda as i64));
            let eigen = kernel(&shifted);
            if eigen.dim() > 0 && eigen.dim() < d {
                return Ok(Some(eigen));
            }
        }
    }
    Ok(None)
}

/// Projective points of `k^d` over a finite field, first nonzero entry 1.
fn for_each_projective_point(k: &FieldSpec, d: usize, q: u64, mut f: impl FnMut(&[FieldElement]) -> bool) -> bool {
    for lead in 0..d {
        let tail = d - lead - 1;
        let count = q.pow(tail as u32);
        for mut idx in 0..count {
            let mut v = vec![k.zero(); d];
            v[lead] = k.one();
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = FieldElement::Residue(idx % q);
                idx /= q;
            }
            if !f(&v) {
                return false;
            }
        }
    }
    true
}

fn evidence(k: &FieldSpec, space: Subspace, gens: &[Matrix]) -> Result<Summand, GroupError> {
    let d = space.dim();
    let commutant_dim = intertwiner_space(gens, gens)?.dim();
    let mut standard_spins_full = true;
    for i in 0..d {
        standard_spins_full &= spin_with(k, d, gens, &unit(k, d, i))?.dim() == d;
    }
    let exhaustive_spin = match k.order() {
        Some(q) if BigInt::from(q).pow(d as u32).to_u64().is_some_and(|n| n <= EXHAUSTIVE_LIMIT) => {
            Some(for_each_projective_point(k, d, q, |v| {
                spin_with(k, d, gens, v).map(|s| s.dim() == d).unwrap_or(false)
            }))
        }
        _ => None,
    };
    Ok(Summand { space, commutant_dim, standard_spins_full, exhaustive_spin })
}

fn restrict_all(space: &Subspace, ms: &[Matrix]) -> Result<Vec<Matrix>, GroupError> {
    ms.iter().map(|m| space.restrict(m).ok_or(GroupError::NotInvariant)).collect()
}

/// Lift a subspace given in coordinates of `space` back to the ambient space.
fn lift(coords: &Subspace, space: &Subspace) -> Result<Subspace, GroupError> {
    if coords.dim() == 0 {
        return Ok(Subspace::zero(space.field(), space.ambient_dim()));
    }
    Ok(Subspace::span(&coords.basis().try_mul(space.basis())?))
}

/// Split the natural module into invariant summands. Each proper invariant
/// subspace found is given an invariant complement, the kernel of the
/// group average of a projection onto it; this needs the characteristic to
/// be prime to the group order. Summands are listed by decreasing dimension.
pub fn decompose(group: &MatrixGroupGen, closure: &ClosureResult) -> Result<Vec<Summand>, GroupError> {
    let k = &group.field;
    let p = k.characteristic();
    if !closure.is_complete() {
        return Err(GroupError::CapExceeded(closure.order as usize));
    }
    if p != 0 && closure.order.is_multiple_of(p) {
        return Err(GroupError::NotSemisimple { p, order: closure.order });
    }
    let elements = closure.elements()?;
    let inverses: Vec<Matrix> = elements.iter().map(Matrix::inverse).collect::<Result<_, _>>()?;
    let mut todo = vec![Subspace::full(k, group.degree)];
    let mut done = Vec::new();
    while let Some(space) = todo.pop() {
        let d = space.dim();
        if d == 0 {
            continue;
        }
        let gens = restrict_all(&space, &group.generators)?;
        let Some(u) = find_invariant(k, d, &gens)? else {
            done.push(evidence(k, space, &gens)?);
            continue;
        };
        let t = extend_basis(&u, &u, d)?;
        let mut diag = Matrix::zeros(k, d, d);
        for i in 0..u.dim() {
            diag.set(i, i, k.one());
        }
        let pi = &(&t.inverse()? * &diag) * &t;
        let mut avg = Matrix::zeros(k, d, d);
        for (h, h_inv) in elements.iter().zip(&inverses) {
            let rh = space.restrict(h).ok_or(GroupError::NotInvariant)?;
            let rh_inv = space.restrict(h_inv).ok_or(GroupError::NotInvariant)?;
            avg = &avg + &(&(&rh_inv * &pi) * &rh);
        }
        let complement = kernel(&avg);
        todo.push(lift(&complement, &space)?);
        todo.push(lift(&u, &space)?);
    }
    done.sort_by_key(|s| std::cmp::Reverse(s.dim()));
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_scalar(d: usize) -> MatrixGroupGen {
        let k = FieldSpec::cyclotomic(6).unwrap();
        let z = Matrix::scalar(&k, d, &k.zeta().unwrap());
        MatrixGroupGen::new(&k, d, vec![z]).unwrap()
    }

    fn gf(p: u64, gens: &[&[&[i64]]]) -> MatrixGroupGen {
        let k = FieldSpec::prime(p).unwrap();
        let d = gens[0].len();
        let ms = gens.iter().map(|g| Matrix::from_ints(&k, g)).collect();
        MatrixGroupGen::new(&k, d, ms).unwrap()
    }

    #[test]
    fn scalar_group() {
        let g = cyclic_scalar(4);
        let c = closure(&g, &ClosureOptions::default()).unwrap();
        assert_eq!((c.status, c.order), (ClosureStatus::Complete, 6));
        let k = g.field().clone();
        assert!(c.contains_scalar(&k.one()).unwrap());
        assert!(c.contains_scalar(&k.pow(&k.zeta().unwrap(), 2).unwrap()).unwrap());
        assert!(!c.contains_scalar(&k.from_i64(2)).unwrap());
        assert_eq!(modular_order(&g, &[7, 13], &ClosureOptions::default()).unwrap(), 6);
        let s = derived_series(&g, &ClosureOptions::default()).unwrap();
        assert_eq!(s.orders, vec![6, 1]);
        assert!(s.solvable);
    }

    #[test]
    fn minus_one_has_no_sixth_root() {
        let k = FieldSpec::cyclotomic(6).unwrap();
        let g = MatrixGroupGen::new(&k, 2, vec![Matrix::scalar(&k, 2, &k.from_i64(-1))]).unwrap();
        let c = closure(&g, &ClosureOptions::default()).unwrap();
        assert_eq!(c.order, 2);
        assert!(!c.contains_scalar(&k.zeta().unwrap()).unwrap());
    }

    #[test]
    fn symmetric_group_s3() {
        // Permutation matrices of (1 2) and (1 2 3) over GF(5).
        let g = gf(5, &[&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]], &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]]);
        let c = closure(&g, &ClosureOptions::default()).unwrap();
        assert_eq!(c.order, 6);
        for x in c.elements().unwrap() {
            assert!(c.contains(&x.inverse().unwrap()).unwrap());
            for h in g.generators() {
                assert!(c.contains(&(&x * h)).unwrap());
            }
        }
        let s = derived_series(&g, &ClosureOptions::default()).unwrap();
        assert_eq!(s.orders, vec![6, 3, 1]);
        // Permutation module = trivial line + 2-dimensional irreducible.
        let parts = decompose(&g, &c).unwrap();
        let dims: Vec<usize> = parts.iter().map(Summand::dim).collect();
        assert_eq!(dims, vec![2, 1]);
        assert!(parts.iter().all(Summand::is_irreducible));
        assert_eq!(parts[1].space.basis(), &Matrix::from_ints(g.field(), &[[1, 1, 1]]));
        assert_eq!(parts[0].exhaustive_spin, Some(true));
    }

    #[test]
    fn a5_is_perfect() {
        // (1 2 3 4 5) and (1 2 3) as permutation matrices over GF(7).
        let five = [[0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1], [1, 0, 0, 0, 0]];
        let three = [[0, 1, 0, 0, 0], [0, 0, 1, 0, 0], [1, 0, 0, 0, 0], [0, 0, 0, 1, 0], [0, 0, 0, 0, 1]];
        let k = FieldSpec::prime(7).unwrap();
        let g = MatrixGroupGen::new(&k, 5, vec![Matrix::from_ints(&k, &five), Matrix::from_ints(&k, &three)]).unwrap();
        let s = derived_series(&g, &ClosureOptions::default()).unwrap();
        assert_eq!(s.orders, vec![60, 60]);
        assert!(s.ends_perfect());
    }

    #[test]
    fn cap_and_jobs() {
        let g = gf(101, &[&[&[1, 1], &[0, 1]], &[&[1, 0], &[1, 1]]]);
        let c = closure(&g, &ClosureOptions { cap: 1000, jobs: 1, retain: true }).unwrap();
        assert_eq!((c.status, c.order), (ClosureStatus::CapExceeded, 1000));
        assert!(matches!(c.contains(&Matrix::identity(g.field(), 2)), Err(GroupError::CapExceeded(_))));
        assert!(matches!(closure(&g, &ClosureOptions { cap: 0, jobs: 1, retain: true }), Err(GroupError::InvalidCap)));
        // SL_2(7) has order 336.
        let h = gf(7, &[&[&[1, 1], &[0, 1]], &[&[1, 0], &[1, 1]]]);
        let seq = closure(&h, &ClosureOptions::default()).unwrap();
        let par = closure(&h, &ClosureOptions { jobs: 3, ..ClosureOptions::default() }).unwrap();
        assert_eq!(seq.order, 336);
        assert_eq!(seq.elements().unwrap(), par.elements().unwrap());
    }

    #[test]
    fn reductions() {
        assert_eq!(root_of_unity_mod(6, 7).unwrap(), 3);
        assert_eq!(root_of_unity_mod(6, 13).unwrap(), 4);
        assert!(matches!(root_of_unity_mod(6, 11), Err(GroupError::BadPrime { p: 11, .. })));
        let q = FieldSpec::rational();
        let half = Matrix::new(&q, 1, 1, vec![q.parse_element("1/2").unwrap()]).unwrap();
        assert!(matches!(reduce_matrix(&half, 2), Err(GroupError::BadPrime { p: 2, .. })));
        assert_eq!(reduce_matrix(&half, 7).unwrap().get(0, 0), &FieldElement::Residue(4));
        let g = MatrixGroupGen::new(&q, 1, vec![half]).unwrap();
        assert!(matches!(modular_order(&g, &[2], &ClosureOptions::default()), Err(GroupError::BadPrime { .. })));
        let k = FieldSpec::cyclotomic(6).unwrap();
        let m = Matrix::new(&k, 1, 1, vec![k.parse_element("2*z - 1").unwrap()]).unwrap();
        assert_eq!(reduce_matrix(&m, 7).unwrap().get(0, 0), &FieldElement::Residue(5));
        assert!(matches!(modular_order(&cyclic_scalar(1), &[], &ClosureOptions::default()), Err(GroupError::NoPrimes)));
    }

    #[test]
    fn spinning() {
        let g = gf(5, &[&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]], &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]]);
        let k = g.field().clone();
        let fixed = vec![k.one(); 3];
        assert_eq!(spin(&g, &fixed).unwrap().dim(), 1);
        assert_eq!(spin(&g, &unit(&k, 3, 0)).unwrap().dim(), 3);
        assert_eq!(spin(&g, &[k.zero(), k.zero(), k.zero()]).unwrap_err(), GroupError::ZeroSeed);
        let s = spin(&g, &[k.one(), k.from_i64(-1), k.zero()]).unwrap();
        assert_eq!(s.dim(), 2);
        for h in g.generators() {
            assert!(s.is_invariant_under(h).unwrap());
        }
    }
}
