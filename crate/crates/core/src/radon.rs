//! The monodromy tuple of the Radon transform from fundamental data
//! `(g, ω)`: validation, the predicted rank, the induced tuple
//! `g̃_i = Φ̄(g, ω_i)` and consistency checks on the result.

use rayon::prelude::*;
use thiserror::Error;

use crate::braid::{act_on_tuple, free_reduce, tuple_product, BraidError, BraidExpr, BraidWord};
use crate::cocycle::{check_stability, phibar_with, trafodat, word_matrix, CocycleError, TupleSpaces};
use crate::field::FieldSpec;
use crate::linalg::{intertwiner_space, kernel, unflatten, LinalgError, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RadonError {
    #[error("expected {expected} matrices, got {got}")]
    TupleLength { expected: usize, got: usize },
    #[error("matrix {index} has shape {rows}x{cols}, expected {n}x{n}")]
    MatrixShape { index: usize, rows: usize, cols: usize, n: usize },
    #[error("matrix {index} is over {found}, expected {expected}")]
    FieldMismatch { index: usize, found: String, expected: String },
    #[error("matrix {index} is not invertible")]
    NotInvertible { index: usize },
    #[error("braid {index} uses b{generator}, which needs more than {strands} strands")]
    StrandViolation { index: usize, generator: u32, strands: usize },
    #[error("the product g_1⋯g_r is not the identity")]
    ProductNotIdentity,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("could not build a thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A monodromy tuple `g` of `n × n` matrices with a braid monodromy
/// `(ω_1, …, ω_s)` in `B_r`.
#[derive(Debug, Clone)]
pub struct FundamentalData {
    pub field: FieldSpec,
    pub n: usize,
    pub r: usize,
    pub g: Vec<Matrix>,
    pub omegas: Vec<BraidExpr>,
}

impl FundamentalData {
    /// Checks shapes, fields and invertibility; the product rule and the
    /// braids are left to [`validate`].
    pub fn new(
        field: FieldSpec,
        n: usize,
        r: usize,
        g: Vec<Matrix>,
        omegas: Vec<BraidExpr>,
    ) -> Result<Self, RadonError> {
        if g.len() != r {
            return Err(RadonError::TupleLength { expected: r, got: g.len() });
        }
        for (index, m) in g.iter().enumerate() {
            if m.shape() != (n, n) {
                return Err(RadonError::MatrixShape { index, rows: m.rows(), cols: m.cols(), n });
            }
            if m.field() != &field {
                return Err(RadonError::FieldMismatch {
                    index,
                    found: m.field().to_string(),
                    expected: field.to_string(),
                });
            }
            if !m.is_invertible() {
                return Err(RadonError::NotInvertible { index });
            }
        }
        Ok(FundamentalData { field, n, r, g, omegas })
    }

    /// The braids as flat words in `B_r`.
    pub fn words(&self) -> Result<Vec<BraidWord>, RadonError> {
        self.omegas
            .iter()
            .enumerate()
            .map(|(index, w)| {
                w.expand(self.r).map_err(|_| RadonError::StrandViolation {
                    index,
                    generator: w.max_generator(),
                    strands: self.r,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub product_ok: bool,
    pub strand_ok: bool,
    /// `g^{ω_i} = g` for every braid.
    pub vankampen_ok: bool,
    /// Indices of braids with `g^{ω_i} ≠ g`.
    pub vankampen_failures: Vec<usize>,
}

impl ValidationReport {
    pub fn hard_failure(&self) -> bool {
        !self.product_ok || !self.strand_ok
    }
}

pub fn validate(fd: &FundamentalData) -> ValidationReport {
    let product_ok = tuple_product(&fd.g).is_none_or(|p| p.is_identity());
    let strand_ok = fd.omegas.iter().all(|w| (w.max_generator() as usize) < fd.r);
    let mut vankampen_failures = Vec::new();
    if let (true, Ok(words)) = (strand_ok, fd.words()) {
        for (i, w) in words.iter().enumerate() {
            match act_on_tuple(&fd.g, w) {
                Ok(moved) if moved == fd.g => {}
                _ => vankampen_failures.push(i),
            }
        }
    }
    ValidationReport {
        product_ok,
        strand_ok,
        vankampen_ok: strand_ok && vankampen_failures.is_empty(),
        vankampen_failures,
    }
}

/// `n(r - 2) - Σ dim ker(g_i - 1)`. Negative values are possible for
/// tuples that violate the hypotheses behind the formula.
pub fn radon_rank(fd: &FundamentalData) -> Result<i64, RadonError> {
    if !tuple_product(&fd.g).is_none_or(|p| p.is_identity()) {
        return Err(RadonError::ProductNotIdentity);
    }
    let fixed: usize = fd.g.iter().map(|gi| kernel(&gi.minus_identity()).dim()).sum();
    Ok(fd.n as i64 * (fd.r as i64 - 2) - fixed as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadonOptions {
    /// Check that every `M(g, ω_i)` maps `H` and `E` into place and that
    /// every `g̃_i` is invertible.
    pub verify: bool,
    /// Worker threads for the per-braid computations; 0 or 1 is sequential.
    pub jobs: usize,
}

impl Default for RadonOptions {
    fn default() -> Self {
        RadonOptions { verify: false, jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadonReport {
    pub validation: ValidationReport,
    pub rank: i64,
    pub rank_matches: bool,
    /// `g̃_1⋯g̃_s = 1`, checked when `ω_1⋯ω_s` freely reduces to the empty word.
    pub product_identity: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RadonResult {
    pub spaces: TupleSpaces,
    pub gtilde: Vec<Matrix>,
    pub report: RadonReport,
}

impl RadonResult {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.spaces.dim_e(), self.spaces.dim_h(), self.spaces.dim_w())
    }
}

fn induced(fd: &FundamentalData, spaces: &TupleSpaces, w: &BraidWord, verify: bool) -> Result<Matrix, RadonError> {
    if verify {
        let m = word_matrix(&fd.g, w)?;
        check_stability(&fd.g, w, &m)?;
        let out = crate::cocycle::induced_block(spaces, &m)?;
        if !out.is_invertible() {
            return Err(CocycleError::Inconsistent(format!("induced map of {w} is singular")).into());
        }
        Ok(out)
    } else {
        Ok(phibar_with(spaces, &fd.g, w)?)
    }
}

pub fn radon_transform(fd: &FundamentalData, opts: &RadonOptions) -> Result<RadonResult, RadonError> {
    let validation = validate(fd);
    if !validation.product_ok {
        return Err(RadonError::ProductNotIdentity);
    }
    let words = fd.words()?;
    let spaces = trafodat(&fd.g)?;
    let gtilde: Vec<Matrix> = if opts.jobs > 1 && words.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| RadonError::ThreadPool(e.to_string()))?;
        pool.install(|| words.par_iter().map(|w| induced(fd, &spaces, w, opts.verify)).collect::<Result<_, _>>())?
    } else {
        words.iter().map(|w| induced(fd, &spaces, w, opts.verify)).collect::<Result<_, _>>()?
    };

    let rank = radon_rank(fd)?;
    let dim_w = spaces.dim_w() as i64;
    let mut warnings = Vec::new();
    if rank != dim_w {
        warnings.push(format!("rank formula predicts {rank} but dim W = {dim_w}"));
    }
    if !validation.vankampen_ok {
        warnings.push(format!("braids {:?} do not fix the monodromy tuple", validation.vankampen_failures));
    }
    let product_identity = match words.iter().try_fold(BraidWord::empty(fd.r), |acc, w| acc.concat(w)) {
        Ok(total) if free_reduce(&total).is_empty() => {
            let id = Matrix::identity(&fd.field, spaces.dim_w());
            let ok = gtilde.iter().fold(id, |acc, m| &acc * m).is_identity();
            if !ok {
                warnings.push("the braids multiply to 1 but the induced tuple does not".to_string());
            }
            Some(ok)
        }
        _ => None,
    };
    Ok(RadonResult {
        spaces,
        gtilde,
        report: RadonReport { validation, rank, rank_matches: rank == dim_w, product_identity, warnings },
    })
}

fn check_square_tuple(tuple: &[Matrix]) -> Result<usize, RadonError> {
    let d = tuple.first().map_or(0, Matrix::rows);
    for m in tuple {
        if m.shape() != (d, d) || m.field() != tuple[0].field() {
            return Err(RadonError::ShapeMismatch(format!(
                "tuple entries must be square of size {d} over one field, found {}x{}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(d)
}

/// Whether every braid fixes the tuple under the right action.
pub fn check_relations(tuple: &[Matrix], braids: &[BraidExpr]) -> Result<bool, RadonError> {
    check_square_tuple(tuple)?;
    for b in braids {
        let w = b.expand(tuple.len())?;
        if act_on_tuple(tuple, &w)? != tuple {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficient vectors in `{-2..2}^dim`, ordered by max norm, then
/// lexicographically; at most `limit` of them.
fn small_combinations(dim: usize, limit: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for bound in 1..=2i64 {
        let mut c = vec![-bound; dim];
        loop {
            if c.iter().any(|x| x.abs() == bound) {
                out.push(c.clone());
                if out.len() >= limit {
                    return out;
                }
            }
            let mut j = dim;
            loop {
                if j == 0 {
                    break;
                }
                j -= 1;
                if c[j] < bound {
                    c[j] += 1;
                    break;
                }
                c[j] = -bound;
            }
            if c.iter().all(|&x| x == -bound) {
                break;
            }
        }
    }
    out
}

/// Search for an invertible `T` with `T^-1·computed_i·T = target_i` for all `i`.
pub fn conjugacy_match(computed: &[Matrix], target: &[Matrix]) -> Result<Option<Matrix>, RadonError> {
    if computed.len() != target.len() || computed.is_empty() {
        return Err(RadonError::ShapeMismatch(format!(
            "cannot match tuples of lengths {} and {}",
            computed.len(),
            target.len()
        )));
    }
    let d = check_square_tuple(computed)?;
    if check_square_tuple(target)? != d || target[0].field() != computed[0].field() {
        return Err(RadonError::ShapeMismatch("tuples differ in size or field".into()));
    }
    let k = computed[0].field().clone();
    let space = intertwiner_space(computed, target)?;
    let basis: Vec<Matrix> = space.basis().row_vectors().map(|v| unflatten(&k, v, d)).collect::<Result<_, _>>()?;
    if let Some(t) = basis.iter().find(|t| t.is_invertible()) {
        return Ok(Some(t.clone()));
    }
    if basis.len() > 1 {
        for coeffs in small_combinations(basis.len(), 100_000) {
            let mut t = Matrix::zeros(&k, d, d);
            for (c, b) in coeffs.iter().zip(&basis) {
                if *c != 0 {
                    t = &t + &b.scale(&k.from_i64(*c));
                }
            }
            if t.is_invertible() {
                return Ok(Some(t));
            }
        }
    }
    Ok(None)
}
