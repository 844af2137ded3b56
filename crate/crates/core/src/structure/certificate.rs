//! Extraction of `D1`, `D2` and `z` from a row scaling followed by a column
//! scaling, `A1 -R-> A2 -C-> A3`.
//!
//! With `D1 = diag(rowsum_i(A1) / r_i)` and `D2 = diag(colsum_j(A2) / c_j)`
//! we have `A1 = D1 A3 D2` and `z = D2 j_n - j_n`. The two sums
//! `s1 = sum c_j z_j` and `s2 = sum c_j z_j / (z_j + 1)` cannot both vanish
//! for `z != 0`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{is_doubly_stochastic, DiagonalScaling, Matrix};
use crate::scalar::Scalar;
use crate::scaling::{ScalingTrace, Side};

#[derive(Clone, Debug, PartialEq)]
pub struct ProofCertificate<T> {
    /// Index in the trace of the row step `A1 -> A2`.
    pub row_step: usize,
    pub a1: Matrix<T>,
    pub a2: Matrix<T>,
    pub a3: Matrix<T>,
    pub d1: DiagonalScaling<T>,
    pub d2: DiagonalScaling<T>,
    pub z: Vec<T>,
    pub s1: T,
    pub s2: T,
    /// `A1 = D1 A3 D2`.
    pub reconstruction_ok: bool,
    /// `A3 z = 0`.
    pub z_in_kernel: bool,
    pub a3_doubly_stochastic: bool,
}

impl<T: Scalar> ProofCertificate<T> {
    pub fn z_is_zero(&self) -> bool {
        self.z.iter().all(|x| x.is_zero())
    }

    /// If `z != 0`, `A3 z = 0` and `s1 = 0`, then `s2 < 0`.
    pub fn lemma_consistent(&self) -> bool {
        if self.z_is_zero() || !self.z_in_kernel || !self.s1.is_zero() {
            return true;
        }
        self.s2 < T::zero()
    }

    pub fn to_json(&self) -> Value {
        let render = |v: &[T]| v.iter().map(Scalar::render).collect::<Vec<_>>();
        json!({
            "z": render(&self.z),
            "d1": render(self.d1.factors()),
            "d2": render(self.d2.factors()),
            "s1": self.s1.render(),
            "s2": self.s2.render(),
            "reconstruction_ok": self.reconstruction_ok,
            "z_in_kernel": self.z_in_kernel,
            "a3_doubly_stochastic": self.a3_doubly_stochastic,
        })
    }
}

/// Builds the certificate from the first row step in `trace` that is
/// followed by a column step.
pub fn extract_certificate<T: Scalar>(trace: &ScalingTrace<T>) -> Result<ProofCertificate<T>> {
    if trace.steps.len() < 2 {
        return Err(Error::TraceTooShort(trace.steps.len()));
    }
    trace.marginals.require_balanced()?;
    let k = (0..trace.steps.len() - 1)
        .find(|&k| trace.steps[k].side == Side::Row && trace.steps[k + 1].side == Side::Column)
        .ok_or(Error::WrongSideOrder)?;

    let a1 = trace.input_of(k).clone();
    let a2 = trace.steps[k].result.clone();
    let a3 = trace.steps[k + 1].result.clone();
    let d1 = trace.steps[k].applied.inverse();
    let d2 = trace.steps[k + 1].applied.inverse();
    let c = trace.marginals.c();

    let z: Vec<T> = d2.factors().iter().map(|f| f.clone() - T::one()).collect();
    let s1 = c.iter().zip(&z).fold(T::zero(), |acc, (cj, zj)| acc + cj.clone() * zj.clone());
    let s2 = c.iter().zip(&z).fold(T::zero(), |acc, (cj, zj)| {
        acc + cj.clone() * zj.clone() / (zj.clone() + T::one())
    });

    let tol = T::default_tolerance();
    let rebuilt = d2.apply(&d1.apply(&a3)?)?;
    let reconstruction_ok = rebuilt.approx_eq(&a1, &(tol.clone() * scale_of(&a1)));
    let z_in_kernel = a3.mul_vec(&z)?.iter().all(|x| x.within(&T::zero(), &tol));
    let a3_doubly_stochastic = is_doubly_stochastic(&a3, &trace.marginals, &tol)?;

    Ok(ProofCertificate {
        row_step: k,
        a1,
        a2,
        a3,
        d1,
        d2,
        z,
        s1,
        s2,
        reconstruction_ok,
        z_in_kernel,
        a3_doubly_stochastic,
    })
}

fn scale_of<T: Scalar>(a: &Matrix<T>) -> T {
    a.entries().iter().fold(T::one(), |acc, x| if *x > acc { x.clone() } else { acc })
}
