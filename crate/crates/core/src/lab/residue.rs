//! Alternating scaling carried out modulo the prime `P = 2^61 - 1`.
//!
//! Reduction mod `P` is a ring map on rationals whose denominators are not
//! divisible by `P`. As long as every divisor met along the way stays a unit
//! mod `P`, the residues of the exact iterates are the iterates of the
//! residues, so a nonzero residue of `colsum_j - c_j` proves the exact
//! iterate is not doubly stochastic. A zero residue proves nothing and the
//! caller falls back to rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::matrix::{Marginals, Matrix};
use crate::scalar::Scalar;
use crate::scaling::Side;

pub(crate) const P: u64 = (1 << 61) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Fp(u64);

impl Fp {
    const ZERO: Fp = Fp(0);
    const ONE: Fp = Fp(1);

    fn add(self, other: Fp) -> Fp {
        let s = self.0 + other.0;
        Fp(if s >= P { s - P } else { s })
    }

    fn mul(self, other: Fp) -> Fp {
        Fp((u128::from(self.0) * u128::from(other.0) % u128::from(P)) as u64)
    }

    fn pow(self, mut e: u64) -> Fp {
        let (mut base, mut acc) = (self, Fp::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            e >>= 1;
        }
        acc
    }

    fn inv(self) -> Option<Fp> {
        (self != Fp::ZERO).then(|| self.pow(P - 2))
    }

    fn div(self, other: Fp) -> Option<Fp> {
        other.inv().map(|d| self.mul(d))
    }

    fn of_int(n: &BigInt) -> Fp {
        let p = BigInt::from(P);
        let r = ((n % &p) + &p) % &p;
        Fp(r.to_u64().expect("reduced below P"))
    }

    /// `None` when the denominator vanishes mod `P`.
    pub(crate) fn of_rational(q: &BigRational) -> Option<Fp> {
        Fp::of_int(q.numer()).div(Fp::of_int(q.denom()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Scan {
    /// No iterate up to the depth is exactly doubly stochastic.
    Never,
    /// Some iterate may be doubly stochastic, or the residues degenerated.
    Undecided,
}

fn reduce<T: Scalar>(v: &[T]) -> Option<Vec<Fp>> {
    v.iter().map(|x| Fp::of_rational(&x.to_rational())).collect()
}

/// Runs the residue iteration to `depth` effective steps. The no-op test
/// for the first scaling uses the exact sums of `a`.
pub(crate) fn scan<T: Scalar>(a: &Matrix<T>, marg: &Marginals<T>, first_side: Side, depth: usize) -> Scan {
    let rows_exact = a.row_sums() == marg.r();
    let cols_exact = a.col_sums() == marg.c();
    if rows_exact && cols_exact {
        return Scan::Undecided;
    }
    let (Some(entries), Some(r), Some(c)) = (reduce(a.entries()), reduce(marg.r()), reduce(marg.c())) else {
        return Scan::Undecided;
    };
    let (m, n) = (a.rows(), a.cols());
    let times = |w: &[Fp]| -> Vec<Fp> {
        (0..m).map(|i| (0..n).fold(Fp::ZERO, |acc, j| acc.add(entries[i * n + j].mul(w[j])))).collect()
    };
    let times_t = |w: &[Fp]| -> Vec<Fp> {
        (0..n).map(|j| (0..m).fold(Fp::ZERO, |acc, i| acc.add(entries[i * n + j].mul(w[i])))).collect()
    };

    let mut x = vec![Fp::ONE; m];
    let mut y = vec![Fp::ONE; n];
    let mut u = times(&y);
    let mut v = times_t(&x);
    let mut side = first_side;
    let mut effective = 0;
    let mut first = true;
    while effective < depth {
        let no_op = first && if side == Side::Row { rows_exact } else { cols_exact };
        first = false;
        if !no_op {
            effective += 1;
            let done = match side {
                Side::Row => {
                    let Some(next) = r.iter().zip(&u).map(|(ri, ui)| ri.div(*ui)).collect::<Option<Vec<_>>>() else {
                        return Scan::Undecided;
                    };
                    x = next;
                    v = times_t(&x);
                    y.iter().zip(&v).zip(&c).all(|((yj, vj), cj)| yj.mul(*vj) == *cj)
                }
                Side::Column => {
                    let Some(next) = c.iter().zip(&v).map(|(cj, vj)| cj.div(*vj)).collect::<Option<Vec<_>>>() else {
                        return Scan::Undecided;
                    };
                    y = next;
                    u = times(&y);
                    x.iter().zip(&u).zip(&r).all(|((xi, ui), ri)| xi.mul(*ui) == *ri)
                }
            };
            if done {
                return Scan::Undecided;
            }
        }
        side = side.other();
    }
    Scan::Never
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::sampling::ratio;

    #[test]
    fn field_arithmetic() {
        let a = Fp(P - 1);
        assert_eq!(a.add(Fp::ONE), Fp::ZERO);
        assert_eq!(a.mul(a), Fp::ONE);
        let three = Fp(3);
        assert_eq!(three.mul(three.inv().unwrap()), Fp::ONE);
        assert_eq!(Fp::ZERO.inv(), None);
        assert_eq!(Fp::of_rational(&ratio(-1, 2)).unwrap().mul(Fp(2)), Fp(P - 1));
        assert_eq!(Fp::of_rational(&ratio(1, P as i64)), None);
    }

    #[test]
    fn scan_examples() {
        let ones = Marginals::ones(2, 2).unwrap();
        let a: Matrix<crate::ExactRational> = Matrix::parse_inline("3,6;5,10").unwrap();
        assert_eq!(scan(&a, &ones, Side::Row, 1), Scan::Never);
        assert_eq!(scan(&a, &ones, Side::Row, 2), Scan::Undecided);
        let b: Matrix<crate::ExactRational> = Matrix::parse_inline("1,1;1,2").unwrap();
        assert_eq!(scan(&b, &ones, Side::Column, 16), Scan::Never);
    }
}
