use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};

/// Exact rational scalar.
pub type Rational = Ratio<BigInt>;

/// Reduced row echelon form over Q.
///
/// Returns the nonzero rows (leading entry 1, zero above and below every
/// pivot) and the pivot column of each row.
pub fn rref(mut rows: Vec<Vec<Rational>>, ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        if !lead.is_one() {
            for x in rows[r].iter_mut() {
                *x = &*x / &lead;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x = &*x - &f * p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}
