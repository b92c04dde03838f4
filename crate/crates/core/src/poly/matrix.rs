//! Square matrices over the polynomial ring.

use std::collections::HashMap;

use super::Poly;

/// Determinant by Laplace expansion along rows, memoised on the set of
/// columns still available. `O(n·2^n)` products; fine for the small ranks
/// the engine works with.
pub fn determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    assert!(n < 32, "matrix too large for subset expansion");
    if n == 0 {
        return Poly::one();
    }
    let mut memo: HashMap<u32, Poly> = HashMap::new();
    minor(m, 0, (1u32 << n) - 1, &mut memo)
}

fn minor(m: &[Vec<Poly>], row: usize, cols: u32, memo: &mut HashMap<u32, Poly>) -> Poly {
    if row == m.len() {
        return Poly::one();
    }
    if let Some(p) = memo.get(&cols) {
        return p.clone();
    }
    let mut acc = Poly::zero();
    let mut sign_negative = false;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let entry = &m[row][c];
        if !entry.is_zero() {
            let sub = minor(m, row + 1, cols & !(1 << c), memo);
            let term = entry * &sub;
            if sign_negative {
                acc -= term;
            } else {
                acc += term;
            }
        }
        sign_negative = !sign_negative;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Classical adjugate: `adj(m)[i][j] = (-1)^{i+j} det(m without row j, col i)`,
/// so that `m · adj(m) = det(m) · I`.
pub fn adjugate(m: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
    let n = m.len();
    let mut out = vec![vec![Poly::zero(); n]; n];
    for (i, out_row) in out.iter_mut().enumerate() {
        for (j, slot) in out_row.iter_mut().enumerate() {
            let sub: Vec<Vec<Poly>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != i)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect();
            let d = determinant(&sub);
            *slot = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    out
}

/// Whether the determinant is a nonzero constant, i.e. the matrix is
/// invertible over the polynomial ring.
pub fn is_unit(m: &[Vec<Poly>]) -> bool {
    let d = determinant(m);
    !d.is_zero() && d.is_constant()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn matmul(a: &[Vec<Poly>], b: &[Vec<Poly>]) -> Vec<Vec<Poly>> {
        let n = a.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    #[test]
    fn two_by_two() {
        let m = vec![vec![p("0"), p("-D")], vec![p("D"), p("0")]];
        assert_eq!(determinant(&m), p("D^2"));
        assert!(!is_unit(&m));
        let swap = vec![vec![p("0"), p("1")], vec![p("1"), p("0")]];
        assert_eq!(determinant(&swap), p("-1"));
        assert!(is_unit(&swap));
    }

    #[test]
    fn adjugate_inverts_up_to_determinant() {
        let m = vec![
            vec![p("1"), p("D"), p("0")],
            vec![p("0"), p("1"), p("D^2")],
            vec![p("0"), p("0"), p("2")],
        ];
        let d = determinant(&m);
        assert_eq!(d, p("2"));
        let prod = matmul(&m, &adjugate(&m));
        for (i, row) in prod.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let expected = if i == j { d.clone() } else { Poly::zero() };
                assert_eq!(e, &expected);
            }
        }
    }

    #[test]
    fn empty_matrix_has_unit_determinant() {
        assert_eq!(determinant(&[]), Poly::one());
    }
}
