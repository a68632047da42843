//! Independent Schubert product oracle: products of Schur polynomials in
//! the Chern roots of the quotient bundle, expanded back into Schur functions.

use std::collections::BTreeMap;

use ed_slra::chow::{Partition, SchubertBasis};

pub type Poly = BTreeMap<Vec<usize>, i64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<usize> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Schur polynomial in `nv` variables from semistandard tableaux.
pub fn schur(shape: &Partition, nv: usize) -> Poly {
    let mut out = Poly::new();
    if shape.len() > nv {
        return out;
    }
    let cells: Vec<(usize, usize)> = (0..shape.len())
        .flat_map(|i| (0..shape.part(i)).map(move |j| (i, j)))
        .collect();
    let mut fill = vec![vec![0usize; shape.part(0)]; shape.len()];
    fn rec(
        idx: usize,
        cells: &[(usize, usize)],
        fill: &mut Vec<Vec<usize>>,
        nv: usize,
        out: &mut Poly,
    ) {
        if idx == cells.len() {
            let mut e = vec![0; nv];
            for &(i, j) in cells {
                e[fill[i][j]] += 1;
            }
            *out.entry(e).or_insert(0) += 1;
            return;
        }
        let (i, j) = cells[idx];
        let lo_row = if j > 0 { fill[i][j - 1] } else { 0 };
        let lo_col = if i > 0 { fill[i - 1][j] + 1 } else { 0 };
        for v in lo_row.max(lo_col)..nv {
            fill[i][j] = v;
            rec(idx + 1, cells, fill, nv, out);
        }
    }
    rec(0, &cells, &mut fill, nv, &mut out);
    out
}

/// Decomposes a symmetric polynomial into Schur polynomials by repeatedly
/// removing the lexicographically largest monomial.
fn schur_expand(mut p: Poly, nv: usize) -> BTreeMap<Partition, i64> {
    let mut out = BTreeMap::new();
    while let Some((e, &c)) = p.iter().next_back() {
        let shape = Partition::new(e.clone());
        assert_eq!(shape.parts(), &e[..shape.len()], "leading exponent not a partition");
        let s = schur(&shape, nv);
        for (me, mc) in s {
            *p.entry(me).or_insert(0) -= c * mc;
        }
        p.retain(|_, v| *v != 0);
        out.insert(shape, c);
    }
    out
}

/// σ_λ corresponds to s_{λ'} in the Chern roots of the quotient bundle;
/// Schur functions whose first part exceeds `r` vanish in the ring.
pub fn oracle_product(r: usize, m: usize, a: &Partition, b: &Partition) -> BTreeMap<Partition, i64> {
    let nv = m - r;
    let prod = poly_mul(&schur(&a.conjugate(), nv), &schur(&b.conjugate(), nv));
    schur_expand(prod, nv)
        .into_iter()
        .filter(|(nu, _)| nu.part(0) <= r)
        .map(|(nu, c)| (nu.conjugate(), c))
        .collect()
}

/// Every structure constant of `H*(Gr(r, m))` from the basis, compared
/// against the oracle. Returns the first disagreement.
pub fn first_disagreement(r: usize, m: usize) -> Option<String> {
    let sb = SchubertBasis::new(r, m);
    for i in 0..sb.len() {
        for j in 0..sb.len() {
            let got: BTreeMap<Partition, i64> = sb
                .product(i, j)
                .iter()
                .map(|(k, c)| (sb.partition(*k).clone(), i64::try_from(c).unwrap()))
                .collect();
            let want = oracle_product(r, m, sb.partition(i), sb.partition(j));
            if got != want {
                return Some(format!(
                    "Gr({r},{m}): {} * {}: got {got:?}, want {want:?}",
                    sb.partition(i),
                    sb.partition(j)
                ));
            }
        }
    }
    None
}
