//! Integer Smith normal form and small exact linear algebra used by the
//! homology computations.

/// Diagonal of the Smith normal form of an integer matrix.
///
/// Classical pivoting elimination: repeatedly move a minimal-magnitude entry
/// to the pivot, clear its row and column, and restore divisibility of the
/// trailing block.  Intended for the small matrices that remain after
/// unit-pivot reduction of a chain complex.
pub fn smith_diagonal(mut a: Vec<Vec<i128>>) -> Vec<i128> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let n = rows.min(cols);
    let mut diag = Vec::with_capacity(n);
    let mut k = 0;
    while k < n {
        // Find a minimal nonzero entry in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if a[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            None => break,
            Some(p) => p,
        };
        a.swap(k, pi);
        for row in a.iter_mut() {
            row.swap(k, pj);
        }
        // Eliminate column and row k.
        let mut clean = true;
        for i in (k + 1)..rows {
            if a[i][k] != 0 {
                let q = a[i][k] / a[k][k];
                for j in k..cols {
                    a[i][j] -= q * a[k][j];
                }
                if a[i][k] != 0 {
                    clean = false;
                }
            }
        }
        for j in (k + 1)..cols {
            if a[k][j] != 0 {
                let q = a[k][j] / a[k][k];
                for i in k..rows {
                    a[i][j] -= q * a[i][k];
                }
                if a[k][j] != 0 {
                    clean = false;
                }
            }
        }
        if !clean {
            continue; // smaller remainders appeared; repick the pivot
        }
        // Divisibility: fold in any entry the pivot does not divide.
        let mut fixed = None;
        'scan: for i in (k + 1)..rows {
            for j in (k + 1)..cols {
                if a[i][j] % a[k][k] != 0 {
                    fixed = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = fixed {
            for j in k..cols {
                let v = a[i][j];
                a[k][j] += v;
            }
            continue;
        }
        diag.push(a[k][k].abs());
        k += 1;
    }
    diag
}

/// Rank of an integer matrix (via the Smith diagonal).
pub fn rank(a: Vec<Vec<i128>>) -> usize {
    smith_diagonal(a).iter().filter(|&&d| d != 0).count()
}

/// Rank over the two-element field.
pub fn rank_mod2(a: &[Vec<i128>]) -> usize {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<bool>> =
        a.iter().map(|r| r.iter().map(|&v| v.rem_euclid(2) == 1).collect()).collect();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        if let Some(p) = (row..rows).find(|&i| m[i][col]) {
            m.swap(row, p);
            for i in 0..rows {
                if i != row && m[i][col] {
                    let (a, b) = if i < row {
                        let (lo, hi) = m.split_at_mut(row);
                        (&mut lo[i], &hi[0])
                    } else {
                        let (lo, hi) = m.split_at_mut(i);
                        (&mut hi[0], &lo[row])
                    };
                    for j in 0..cols {
                        a[j] ^= b[j];
                    }
                }
            }
            row += 1;
            rank += 1;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_diagonal() {
        let m = vec![
            vec![-6, 111, -36, 6],
            vec![5, -672, 210, 74],
            vec![0, -255, 81, 24],
            vec![-7, 255, -81, -10],
        ];
        assert_eq!(smith_diagonal(m), vec![1, 3, 21]);
    }

    #[test]
    fn ranks() {
        let m = vec![vec![2, 4], vec![1, 2]];
        assert_eq!(rank(m.clone()), 1);
        assert_eq!(rank_mod2(&m), 1);
        let id = vec![vec![1, 0], vec![0, 1]];
        assert_eq!(rank(id.clone()), 2);
        assert_eq!(rank_mod2(&id), 2);
    }

    #[test]
    fn torsion_shows_up() {
        // Boundary of the projective-plane style relation x -> 2y.
        let m = vec![vec![2]];
        assert_eq!(smith_diagonal(m), vec![2]);
    }
}
