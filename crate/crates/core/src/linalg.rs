//! Exact integer kernels via fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Row echelon form of an integer matrix computed without fractions.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Bareiss elimination. Every intermediate division is exact.
pub fn bareiss(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> Echelon {
    rows.retain(|r| r.iter().any(|c| !c.is_zero()));
    rows.sort();
    rows.dedup();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..ncols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                debug_assert!(v.is_multiple_of(&prev));
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Echelon {
        rows,
        pivots,
        ncols,
    }
}

/// Basis of the integer kernel `{v : M v = 0}`, one primitive vector per free
/// column. Each vector has its first nonzero entry positive.
pub fn integer_kernel(rows: Vec<Vec<BigInt>>, ncols: usize) -> Vec<Vec<BigInt>> {
    let ech = bareiss(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !ech.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); ncols];
            x[f] = BigRational::one();
            for (row, &pc) in ech.rows.iter().zip(&ech.pivots).rev() {
                let mut s = BigRational::zero();
                for j in pc + 1..ncols {
                    if !row[j].is_zero() {
                        s += BigRational::from_integer(row[j].clone()) * &x[j];
                    }
                }
                x[pc] = -s / BigRational::from_integer(row[pc].clone());
            }
            primitive(&x)
        })
        .collect()
}

fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let lcm = x
        .iter()
        .fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let ints: Vec<BigInt> = x
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    let sign = match ints.iter().find(|v| !v.is_zero()) {
        Some(v) if v.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|v| v / &g * &sign).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn apply(rows: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
        rows.iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    #[test]
    fn kernel_of_rank_deficient_matrix() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let k = integer_kernel(a.clone(), 3);
        assert_eq!(k.len(), 1);
        assert!(apply(&a, &k[0]).iter().all(Zero::is_zero));
        assert_eq!(k[0], m(&[&[1, 1, -1]])[0]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let a = m(&[&[2, 1], &[1, 3]]);
        assert!(integer_kernel(a, 2).is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let k = integer_kernel(m(&[&[0, 0, 0]]), 3);
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn bareiss_rank() {
        let a = m(&[&[3, 6, 9, 12], &[1, 1, 1, 1], &[4, 7, 10, 13], &[0, 0, 0, 5]]);
        assert_eq!(bareiss(a, 4).rank(), 3);
    }
}
