//! Smith normal form over `O_r`.

use crate::ring::{LocalRing, RingElem};

/// Dense row-major matrix over a ring given by context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<RingElem>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<RingElem>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_columns(cols: &[Vec<RingElem>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> RingElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: RingElem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn mul(&self, ring: &LocalRing, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut s = 0;
                for k in 0..self.cols {
                    s = ring.add(s, ring.mul(self.get(i, k), other.get(k, j)));
                }
                out.set(i, j, s);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn scale_row(&mut self, ring: &LocalRing, i: usize, c: RingElem) {
        for j in 0..self.cols {
            let x = ring.mul(self.get(i, j), c);
            self.set(i, j, x);
        }
    }

    /// `row[dst] -= c · row[src]`
    fn row_axpy(&mut self, ring: &LocalRing, dst: usize, src: usize, c: RingElem) {
        for j in 0..self.cols {
            let x = ring.sub(self.get(dst, j), ring.mul(c, self.get(src, j)));
            self.set(dst, j, x);
        }
    }

    /// `col[dst] -= c · col[src]`
    fn col_axpy(&mut self, ring: &LocalRing, dst: usize, src: usize, c: RingElem) {
        for i in 0..self.rows {
            let x = ring.sub(self.get(i, dst), ring.mul(c, self.get(i, src)));
            self.set(i, dst, x);
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal valuations in ascending order, one per diagonal slot
    /// (`min(rows, cols)` entries; `r` for a zero slot).
    pub exponents: Vec<u32>,
    pub diagonal: Matrix,
    /// Row transform `U` and column transform `V` with `U · M · V = diagonal`.
    pub u: Matrix,
    pub v: Matrix,
    pub r: u32,
}

impl SmithForm {
    /// Exponents `m_1 ≥ … ≥ m_d` of the column module inside `O_r^d`
    /// (`d` = row count), padding absent generators with `r`.
    pub fn module_exponents(&self) -> Vec<u32> {
        let d = self.diagonal.rows;
        let mut m: Vec<u32> = self.exponents.clone();
        m.resize(d, self.r);
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    /// Whether the column module is free.
    pub fn is_free(&self) -> bool {
        self.module_exponents()
            .iter()
            .all(|&m| m == 0 || m == self.r)
    }

    /// Rank of the column module when it is free.
    pub fn free_rank(&self) -> Option<usize> {
        self.is_free()
            .then(|| self.exponents.iter().filter(|&&m| m == 0).count())
    }
}

/// Pivots on minimal valuation (ties: lowest row, then lowest column), with
/// the pivot normalized to a power of `π`.
pub fn smith_form(ring: &LocalRing, m: &Matrix) -> SmithForm {
    let (d, e) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = Matrix::identity(d);
    let mut v = Matrix::identity(e);
    let r = ring.r();
    let mut exponents = Vec::with_capacity(d.min(e));
    for k in 0..d.min(e) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in k..d {
            for j in k..e {
                let val = ring.val(a.get(i, j));
                if val < r && best.is_none_or(|(bv, _, _)| val < bv) {
                    best = Some((val, i, j));
                }
            }
        }
        let Some((val, pi, pj)) = best else {
            exponents.resize(d.min(e), r);
            break;
        };
        a.swap_rows(k, pi);
        u.swap_rows(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);
        let (_, unit) = ring.split(a.get(k, k));
        let uinv = ring.inv(unit).expect("unit part");
        a.scale_row(ring, k, uinv);
        u.scale_row(ring, k, uinv);
        let pivot = a.get(k, k);
        for i in k + 1..d {
            let x = a.get(i, k);
            if x != 0 {
                let c = ring.div_exact(x, pivot);
                a.row_axpy(ring, i, k, c);
                u.row_axpy(ring, i, k, c);
            }
        }
        for j in k + 1..e {
            let x = a.get(k, j);
            if x != 0 {
                let c = ring.div_exact(x, pivot);
                a.col_axpy(ring, j, k, c);
                v.col_axpy(ring, j, k, c);
            }
        }
        exponents.push(val);
    }
    SmithForm {
        exponents,
        diagonal: a,
        u,
        v,
        r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z4() -> LocalRing {
        LocalRing::padic(2, 2).unwrap()
    }

    #[test]
    fn identity_and_diagonal_examples() {
        let ring = z4();
        let s = smith_form(&ring, &Matrix::identity(3));
        assert_eq!(s.exponents, vec![0, 0, 0]);
        let m = Matrix::from_rows(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let s = smith_form(&ring, &m);
        assert_eq!(s.exponents, vec![0, 0, 1]);
        assert!(!s.is_free());
    }

    #[test]
    fn column_two_two_zero_not_free() {
        let ring = z4();
        let m = Matrix::from_columns(&[vec![2, 2, 0]]);
        let s = smith_form(&ring, &m);
        assert_eq!(s.exponents, vec![1]);
        assert_eq!(s.module_exponents(), vec![2, 2, 1]);
        assert!(!s.is_free());
        // Oracle: no element of the cyclic module {c·(2,2,0)} has a unit coordinate.
        for c in ring.elements() {
            let g = [ring.mul(c, 2), ring.mul(c, 2), 0];
            assert!(g.iter().all(|&x| !ring.is_unit(x)));
        }
    }

    fn arb_matrix() -> impl Strategy<Value = (usize, Matrix)> {
        (0usize..3, 1usize..4, 1usize..4).prop_flat_map(|(ri, rows, cols)| {
            let size = [4u64, 27, 16][ri];
            proptest::collection::vec(0..size, rows * cols)
                .prop_map(move |data| (ri, Matrix { rows, cols, data }))
        })
    }

    fn ring_for(i: usize) -> LocalRing {
        match i {
            0 => z4(),
            1 => LocalRing::padic(3, 3).unwrap(),
            _ => LocalRing::laurent(2, 4).unwrap(),
        }
    }

    proptest! {
        #[test]
        fn transforms_reproduce_diagonal((ri, m) in arb_matrix()) {
            let ring = ring_for(ri);
            let s = smith_form(&ring, &m);
            let prod = s.u.mul(&ring, &m).mul(&ring, &s.v);
            prop_assert_eq!(&prod, &s.diagonal);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    let x = prod.get(i, j);
                    if i == j {
                        prop_assert_eq!(x, ring.pi_pow(s.exponents[i]));
                    } else {
                        prop_assert_eq!(x, 0);
                    }
                }
            }
            prop_assert!(s.exponents.windows(2).all(|w| w[0] <= w[1]));
            // Running the algorithm again on its own output is a no-op.
            let again = smith_form(&ring, &s.diagonal);
            prop_assert_eq!(again.exponents, s.exponents);
        }
    }
}
