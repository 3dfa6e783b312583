//! Smith normal form over the integers.
//!
//! Only the diagonal and the column transformation are tracked: the column
//! transform is what maps the original generators onto the invariant-factor
//! coordinates. Arithmetic is attempted in `i64` first and redone with
//! `BigInt` if any intermediate overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, Zero};

/// Result of a Smith normal form reduction `U · R · V = D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Diagonal entries `d_1 | d_2 | ...`, one per generator column. Columns
    /// beyond the rank of the relation matrix carry a zero.
    pub diagonal: Vec<BigInt>,
    /// Column transform `V` (square, `cols × cols`, unimodular).
    pub column_transform: Vec<Vec<BigInt>>,
}

trait SnfRing: Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul {}
impl<T: Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul> SnfRing for T {}

/// Computes the Smith form of a `rows × cols` integer matrix.
pub fn smith_normal_form(matrix: &[Vec<i64>], cols: usize) -> SmithForm {
    if let Some(form) = reduce::<i64>(matrix.iter().map(|r| r.to_vec()).collect(), cols) {
        return form;
    }
    let big: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    reduce::<BigInt>(big, cols).expect("arbitrary precision cannot overflow")
}

// row_i <- row_i - q * row_j
fn row_sub<T: SnfRing>(a: &mut [Vec<T>], i: usize, j: usize, q: &T) -> Option<()> {
    for c in 0..a[i].len() {
        let t = q.checked_mul(&a[j][c])?;
        a[i][c] = a[i][c].checked_sub(&t)?;
    }
    Some(())
}

// col_i <- col_i - q * col_j, mirrored into the transform
fn col_sub<T: SnfRing>(
    a: &mut [Vec<T>],
    v: &mut [Vec<T>],
    i: usize,
    j: usize,
    q: &T,
) -> Option<()> {
    for row in a.iter_mut() {
        let t = q.checked_mul(&row[j])?;
        row[i] = row[i].checked_sub(&t)?;
    }
    for row in v.iter_mut() {
        let t = q.checked_mul(&row[j])?;
        row[i] = row[i].checked_sub(&t)?;
    }
    Some(())
}

fn swap_cols<T>(a: &mut [Vec<T>], v: &mut [Vec<T>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in v.iter_mut() {
        row.swap(i, j);
    }
}

fn reduce<T: SnfRing + Into<BigInt>>(mut a: Vec<Vec<T>>, cols: usize) -> Option<SmithForm> {
    let rows = a.len();
    let mut v: Vec<Vec<T>> = (0..cols)
        .map(|i| {
            (0..cols)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect();

    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() {
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => a[i][j].abs() < a[bi][bj].abs(),
                    };
                    if better {
                        best = Some((i, j));
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        swap_cols(&mut a, &mut v, t, pj);

        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in (t + 1)..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub(&mut a, i, t, &q)?;
                if !a[i][t].is_zero() {
                    // remainder is smaller than the pivot: promote it
                    a.swap(t, i);
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, &mut v, j, t, &q)?;
                if !a[t][j].is_zero() {
                    swap_cols(&mut a, &mut v, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility: pivot must divide the whole trailing block
            let mut offender = None;
            'scan: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !a[i][j].is_multiple_of(&a[t][t]) {
                        offender = Some(i);
                        break 'scan;
                    }
                }
            }
            match offender {
                Some(i) => {
                    // row_t += row_i, then re-clear
                    let minus_one = T::zero() - T::one();
                    row_sub(&mut a, t, i, &minus_one)?;
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for c in 0..cols {
                a[t][c] = T::zero() - a[t][c].clone();
            }
        }
        t += 1;
    }

    let diagonal = (0..cols)
        .map(|j| {
            if j < rows {
                a[j][j].clone().into()
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let column_transform = v
        .into_iter()
        .map(|row| row.into_iter().map(Into::into).collect())
        .collect();
    Some(SmithForm {
        diagonal,
        column_transform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn det2(m: &[Vec<i64>]) -> i64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[test]
    fn diagonal_of_two_by_two() {
        let m = vec![vec![2, -2], vec![0, 4]];
        let f = smith_normal_form(&m, 2);
        assert_eq!(f.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
        // product of invariant factors equals |det|
        assert_eq!(BigInt::from(det2(&m).abs()), &f.diagonal[0] * &f.diagonal[1]);
    }

    #[test]
    fn coprime_factors_merge() {
        let m = vec![vec![2, 0], vec![0, 3]];
        let f = smith_normal_form(&m, 2);
        assert_eq!(f.diagonal, vec![BigInt::one(), BigInt::from(6)]);
    }

    #[test]
    fn rank_deficient_leaves_zero() {
        let m = vec![vec![4, 6]];
        let f = smith_normal_form(&m, 2);
        assert_eq!(f.diagonal, vec![BigInt::from(2), BigInt::zero()]);
    }

    #[test]
    fn overflow_promotes_to_bigint() {
        let big = i64::MAX / 3;
        let m = vec![vec![big, big - 1], vec![big - 7, big + 5]];
        let f = smith_normal_form(&m, 2);
        let det = BigInt::from(big) * BigInt::from(big + 5)
            - BigInt::from(big - 1) * BigInt::from(big - 7);
        assert_eq!(det.abs(), &f.diagonal[0] * &f.diagonal[1]);
    }
}
