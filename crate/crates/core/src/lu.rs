//! Sparse LU factorization with threshold partial pivoting.
//!
//! Left-looking (Gilbert–Peierls) elimination: each column of `L` and `U` is
//! obtained from a sparse triangular solve whose nonzero pattern is found by
//! a depth-first search in the graph of the already computed `L`. Rows and
//! then columns are equilibrated by powers of two close to their largest
//! entry, and the matrix is symmetrically permuted by nested dissection
//! before elimination.
//!
//! A [`Factorization`] is immutable once built. [`Factorization::solve`]
//! takes `&self` and allocates its own workspace, so one factorization may be
//! shared between threads and used for concurrent solves.

use alloc::vec::Vec;

use crate::ordering::{invert, nested_dissection};
use crate::sparse::CsrMatrix;
use crate::{Error, Result};

/// Column pivots are flagged singular below this fraction of the column norm.
pub const SINGULAR_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    /// Diagonal entries within this factor of the column maximum are kept as
    /// pivots; `1.0` is strict partial pivoting.
    pub pivot_threshold: f64,
    pub reorder: bool,
}

impl Default for LuOptions {
    fn default() -> Self {
        LuOptions { pivot_threshold: 0.1, reorder: true }
    }
}

/// Compressed-column triangular factor.
#[derive(Debug, Clone)]
struct Csc {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Factorization {
    n: usize,
    /// `perm[new] = old` symmetric ordering.
    perm: Vec<usize>,
    /// Row pivot of each original (permuted) row.
    pinv: Vec<usize>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    /// Unit lower factor, diagonal stored first in each column.
    l: Csc,
    /// Upper factor, diagonal stored last in each column.
    u: Csc,
}

pub fn factorize(s: &CsrMatrix) -> Result<Factorization> {
    factorize_with(s, LuOptions::default())
}

pub fn factorize_with(s: &CsrMatrix, options: LuOptions) -> Result<Factorization> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.ncols() });
    }
    let perm = if options.reorder { nested_dissection(s) } else { (0..n).collect() };
    factorize_ordered(s, perm, options.pivot_threshold)
}

/// Factorization with a caller-supplied symmetric ordering `perm[new] = old`.
pub fn factorize_ordered(s: &CsrMatrix, perm: Vec<usize>, pivot_threshold: f64) -> Result<Factorization> {
    let n = s.nrows();
    if s.ncols() != n || perm.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if s.ncols() != n { s.ncols() } else { perm.len() } });
    }
    let mut seen = alloc::vec![false; n];
    for &p in &perm {
        if p >= n || core::mem::replace(&mut seen[p], true) {
            return Err(Error::Config("ordering is not a permutation"));
        }
    }
    let iperm = invert(&perm);

    let row_scale: Vec<f64> =
        (0..n).map(|r| power_of_two_scale(s.row(r).1.iter().fold(0.0f64, |m, v| m.max(v.abs())))).collect();
    let t = s.transpose();
    let col_scale: Vec<f64> = (0..n)
        .map(|c| {
            let (rows, vals) = t.row(c);
            power_of_two_scale(rows.iter().zip(vals).fold(0.0f64, |m, (&r, v)| m.max((v * row_scale[r]).abs())))
        })
        .collect();

    // columns of B = P (Dr S Dc) Pᵀ in compressed-column form
    let mut bp = Vec::with_capacity(n + 1);
    let mut bi = Vec::with_capacity(s.nnz());
    let mut bx = Vec::with_capacity(s.nnz());
    bp.push(0);
    for &old_col in &perm {
        let (rows, vals) = t.row(old_col);
        for (&r, &v) in rows.iter().zip(vals) {
            bi.push(iperm[r]);
            bx.push(v * row_scale[r] * col_scale[old_col]);
        }
        bp.push(bi.len());
    }

    let mut l = Csc { ptr: Vec::with_capacity(n + 1), idx: Vec::new(), val: Vec::new() };
    let mut u = Csc { ptr: Vec::with_capacity(n + 1), idx: Vec::new(), val: Vec::new() };
    const NONE: usize = usize::MAX;
    let mut pinv = alloc::vec![NONE; n];
    let mut x = alloc::vec![0.0; n];
    let mut xi = alloc::vec![0usize; n];
    let mut mark = alloc::vec![usize::MAX; n];
    // explicit DFS stack: (node, next child position)
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for k in 0..n {
        l.ptr.push(l.idx.len());
        u.ptr.push(u.idx.len());

        // reach: topological order of the nonzeros of L \ B(:, k), stored in xi[top..]
        let mut top = n;
        for p in bp[k]..bp[k + 1] {
            let i = bi[p];
            if mark[i] == k {
                continue;
            }
            mark[i] = k;
            stack.push((i, 0));
            while let Some(&(j, mut child)) = stack.last() {
                let jcol = pinv[j];
                let mut next = None;
                if jcol != NONE {
                    let (start, end) = (l.ptr[jcol] + 1, l.ptr[jcol + 1]);
                    while start + child < end {
                        let w = l.idx[start + child];
                        child += 1;
                        if mark[w] != k {
                            next = Some(w);
                            break;
                        }
                    }
                }
                if let Some(w) = next {
                    let depth = stack.len() - 1;
                    stack[depth].1 = child;
                    mark[w] = k;
                    stack.push((w, 0));
                } else {
                    stack.pop();
                    top -= 1;
                    xi[top] = j;
                }
            }
        }

        // numeric triangular solve
        for &i in &xi[top..] {
            x[i] = 0.0;
        }
        let mut col_norm = 0.0f64;
        for p in bp[k]..bp[k + 1] {
            x[bi[p]] = bx[p];
            col_norm = col_norm.max(bx[p].abs());
        }
        for &j in &xi[top..] {
            let jcol = pinv[j];
            if jcol == NONE {
                continue;
            }
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for p in l.ptr[jcol] + 1..l.ptr[jcol + 1] {
                x[l.idx[p]] -= l.val[p] * xj;
            }
        }

        // pivot selection
        let mut ipiv = NONE;
        let mut best = -1.0f64;
        for &i in &xi[top..] {
            if pinv[i] == NONE {
                let a = x[i].abs();
                if a > best {
                    best = a;
                    ipiv = i;
                }
            } else {
                u.idx.push(pinv[i]);
                u.val.push(x[i]);
            }
        }
        if ipiv == NONE || !(best > SINGULAR_TOLERANCE * col_norm) || col_norm == 0.0 {
            return Err(Error::Singular { pivot: k });
        }
        if pinv[k] == NONE && mark[k] == k && x[k].abs() >= pivot_threshold * best {
            ipiv = k;
        }
        let pivot = x[ipiv];
        u.idx.push(k);
        u.val.push(pivot);
        pinv[ipiv] = k;
        l.idx.push(ipiv);
        l.val.push(1.0);
        for &i in &xi[top..] {
            if pinv[i] == NONE {
                l.idx.push(i);
                l.val.push(x[i] / pivot);
            }
            x[i] = 0.0;
        }
    }
    l.ptr.push(l.idx.len());
    u.ptr.push(u.idx.len());
    // L row indices into pivot order
    for i in l.idx.iter_mut() {
        *i = pinv[*i];
    }
    Ok(Factorization { n, perm, pinv, row_scale, col_scale, l, u })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U`, including both diagonals.
    pub fn factor_nnz(&self) -> usize {
        self.l.idx.len() + self.u.idx.len()
    }

    /// Solves `S x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = alloc::vec![0.0; self.n];
        self.solve_into(b, &mut x)?;
        Ok(x)
    }

    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: b.len() });
        }
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        // c = Pr P D b
        let mut c = alloc::vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            c[self.pinv[new]] = b[old] * self.row_scale[old];
        }
        // L z = c
        for j in 0..n {
            let cj = c[j];
            if cj != 0.0 {
                for p in self.l.ptr[j] + 1..self.l.ptr[j + 1] {
                    c[self.l.idx[p]] -= self.l.val[p] * cj;
                }
            }
        }
        // U y = z
        for j in (0..n).rev() {
            let last = self.u.ptr[j + 1] - 1;
            c[j] /= self.u.val[last];
            let cj = c[j];
            if cj != 0.0 {
                for p in self.u.ptr[j]..last {
                    c[self.u.idx[p]] -= self.u.val[p] * cj;
                }
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = c[new] * self.col_scale[old];
        }
        Ok(())
    }
}

/// Power of two closest to `1 / max_abs`, so that equilibration is exact.
fn power_of_two_scale(max_abs: f64) -> f64 {
    if max_abs > 0.0 && max_abs.is_finite() {
        libm::exp2(-libm::round(libm::log2(max_abs)))
    } else {
        1.0
    }
}

/// `‖S x - b‖₂ / ‖b‖₂` (absolute residual when `b = 0`).
pub fn relative_residual(s: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r = s.mul_vec(x);
    let num: f64 = r.iter().zip(b).map(|(a, c)| (a - c) * (a - c)).sum();
    let den: f64 = b.iter().map(|v| v * v).sum();
    if den > 0.0 {
        libm::sqrt(num / den)
    } else {
        libm::sqrt(num)
    }
}
