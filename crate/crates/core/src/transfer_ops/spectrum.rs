use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::discretized::{DiscretizedOperator, OperatorKind};
use super::FunctionSample;
use crate::error::{Error, Result};
use crate::scalar::{cabs, creal, from_usize, lit, Real};

/// Eigenvalues by descending modulus, with residuals ||A v - lambda v|| / ||v||.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub n: usize,
    pub z: Complex<T>,
    pub q: u32,
    pub kind: OperatorKind,
    pub residuals: Vec<T>,
    /// computed with the symmetric solver
    pub symmetric: bool,
    /// eigenvectors in the operator's coordinates, unit L2 norm w.r.t. the rule, first significant entry positive
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn leading(&self) -> Complex<T> {
        self.eigenvalues[0]
    }

    pub fn max_imaginary(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, v| m.max(v.im.abs()))
    }
}

fn order_desc<T: Real>(a: &Complex<T>, b: &Complex<T>) -> std::cmp::Ordering {
    let ka = (cabs(*a), a.re, a.im);
    let kb = (cabs(*b), b.re, b.im);
    kb.partial_cmp(&ka).unwrap_or(std::cmp::Ordering::Equal)
}

/// Unit L2 norm with the rule weights, then a phase making the first significant entry real positive.
fn normalize<T: Real>(v: &mut [Complex<T>], weights: &[T]) {
    let norm = v.iter().zip(weights).fold(T::zero(), |s, (x, &w)| s + w * x.norm_sqr()).sqrt();
    if norm > T::zero() {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    let peak = v.iter().fold(T::zero(), |m, x| m.max(cabs(*x)));
    if let Some(first) = v.iter().find(|x| cabs(**x) > peak * lit(1e-8)).copied() {
        let phase = first.conj() / cabs(first);
        v.iter_mut().for_each(|x| *x *= phase);
    }
}

fn residual<T: Real>(a: &DMatrix<Complex<T>>, lambda: Complex<T>, v: &[Complex<T>]) -> T {
    let x = DVector::from_column_slice(v);
    let r = a * &x - &x * lambda;
    let rn = r.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
    let xn = x.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
    if xn > T::zero() {
        rn / xn
    } else {
        T::zero()
    }
}

/// Inverse iteration for the eigenvector of `lambda`.
fn inverse_iteration<T: Real>(a: &DMatrix<Complex<T>>, lambda: Complex<T>) -> Vec<Complex<T>> {
    let n = a.nrows();
    let scale = a.iter().fold(T::one(), |m, c| m.max(cabs(*c)));
    let mut shift = lambda + creal(scale * T::default_epsilon() * lit(64.0));
    let mut v = DVector::from_fn(n, |i, _| creal(T::one() + from_usize::<T>(i) / from_usize::<T>(n)));
    for attempt in 0..4 {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let lu = shifted.lu();
        let mut ok = true;
        for _ in 0..3 {
            match lu.solve(&v) {
                Some(x) => {
                    let nrm = x.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
                    if !(nrm > T::zero()) || !nrm.is_finite() {
                        ok = false;
                        break;
                    }
                    v = x / creal(nrm);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            break;
        }
        shift += creal(scale * T::default_epsilon() * lit(1024.0) * from_usize::<T>(attempt + 1));
    }
    v.iter().copied().collect()
}

/// Eigen-decomposition of (B + B^T)/2. If the plain solve yields NaN (graded f32 matrices drive the
/// QL sweeps into subnormals), entries below eps |B|_max / n are dropped, which stays inside the
/// backward error of the solver; the flag reports that eigenvectors need a Nystrom pass.
fn symmetric_eigen<T: Real>(b: &DMatrix<T>) -> Result<(SymmetricEigen<T, nalgebra::Dyn>, bool)> {
    let n = b.nrows();
    let sym = DMatrix::from_fn(n, n, |i, j| (b[(i, j)] + b[(j, i)]) / lit(2.0));
    let solve = |m: DMatrix<T>| {
        SymmetricEigen::try_new(m, T::default_epsilon(), 0)
            .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))
    };
    let eig = solve(sym.clone())?;
    if eig.eigenvalues.iter().all(|l| l.is_finite()) {
        return Ok((eig, false));
    }
    let floor = sym.amax() * T::default_epsilon() / from_usize(n.max(1));
    Ok((solve(sym.map(|v| if v.abs() < floor { T::zero() } else { v }))?, true))
}

/// u <- A u / lambda, the Nystrom extension, for vectors from a flushed solve.
fn nystrom_pass<T: Real>(a: &DMatrix<Complex<T>>, lambda: T, u: &mut Vec<T>) {
    if lambda == T::zero() {
        return;
    }
    let next: Vec<T> =
        (0..u.len()).map(|i| (0..u.len()).fold(T::zero(), |acc, j| acc + a[(i, j)].re * u[j]) / lambda).collect();
    if next.iter().all(|v| v.is_finite()) {
        *u = next;
    }
}

/// Nodes whose weight underflowed have no finite frame scaling; their components follow from
/// the eigen-equation u_i = sum_{j != i} A_ij u_j / (lambda - A_ii) over the finite ones.
fn recover_underflowed<T: Real>(a: &DMatrix<Complex<T>>, lambda: T, u: &mut [T]) {
    let bad: Vec<usize> = (0..u.len()).filter(|&i| !u[i].is_finite()).collect();
    if bad.is_empty() {
        return;
    }
    for &i in &bad {
        u[i] = T::zero();
    }
    for &i in &bad {
        let den = lambda - a[(i, i)].re;
        let num = (0..u.len()).filter(|&j| j != i).fold(T::zero(), |acc, j| acc + a[(i, j)].re * u[j]);
        let v = num / den;
        u[i] = if v.is_finite() { v } else { T::zero() };
    }
}

/// All eigenvalues of the discretized operator; the symmetric solver is used when a symmetric frame exists.
pub fn spectrum<T: Real>(op: &DiscretizedOperator<T>) -> Result<SpectrumResult<T>> {
    let n = op.n();
    let weights = op.rule.weights();
    let mut pairs: Vec<(Complex<T>, Vec<Complex<T>>)> = match op.symmetric_frame() {
        Some(frame) => {
            let (eig, flushed) = symmetric_eigen(&frame.matrix)?;
            (0..n)
                .map(|k| {
                    let v = eig.eigenvectors.column(k);
                    let lambda = eig.eigenvalues[k];
                    let mut u: Vec<T> = (0..n).map(|i| v[i] * frame.scaling[i]).collect();
                    recover_underflowed(&op.matrix, lambda, &mut u);
                    if flushed {
                        nystrom_pass(&op.matrix, lambda, &mut u);
                    }
                    (creal(lambda), u.into_iter().map(creal).collect())
                })
                .collect()
        }
        None => {
            let schur = op
                .matrix
                .clone()
                .try_schur(T::default_epsilon(), 0)
                .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))?;
            let vals = schur
                .eigenvalues()
                .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))?;
            vals.iter().map(|&l| (l, inverse_iteration(&op.matrix, l))).collect()
        }
    };
    if pairs.iter().any(|(l, _)| !(l.re.is_finite() && l.im.is_finite())) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    pairs.sort_by(|a, b| order_desc(&a.0, &b.0));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for (l, mut v) in pairs {
        residuals.push(residual(&op.matrix, l, &v));
        normalize(&mut v, weights);
        eigenvalues.push(l);
        eigenvectors.push(v);
    }
    Ok(SpectrumResult {
        eigenvalues,
        n,
        z: op.z,
        q: op.q,
        kind: op.kind,
        residuals,
        symmetric: op.symmetric_frame().is_some(),
        eigenvectors,
    })
}

/// Eigenvalues only, without vectors or residuals.
pub fn eigenvalues<T: Real>(op: &DiscretizedOperator<T>) -> Result<Vec<Complex<T>>> {
    let mut vals: Vec<Complex<T>> = match op.symmetric_frame() {
        Some(frame) => symmetric_eigen(&frame.matrix)?.0.eigenvalues.iter().map(|&l| creal(l)).collect(),
        None => op
            .matrix
            .clone()
            .try_schur(T::default_epsilon(), 0)
            .and_then(|s| s.eigenvalues())
            .ok_or_else(|| Error::Numerical("Schur decomposition failed".into()))?
            .iter()
            .copied()
            .collect(),
    };
    vals.sort_by(order_desc);
    Ok(vals)
}

/// Leading eigenvalue and its normalized eigenvector as a function sample.
pub fn leading_eigenpair<T: Real>(op: &DiscretizedOperator<T>) -> Result<(Complex<T>, FunctionSample<T>)> {
    let mut s = spectrum(op)?;
    let v = s.eigenvectors.swap_remove(0);
    Ok((s.eigenvalues[0], FunctionSample::new(v)))
}

/// Cosine similarity in L2 of the rule weights, |<u, v>| / (|u| |v|).
pub fn weighted_cosine<T: Real>(u: &[Complex<T>], v: &[Complex<T>], weights: &[T]) -> T {
    let mut uv = creal(T::zero());
    let mut uu = T::zero();
    let mut vv = T::zero();
    for ((a, b), &w) in u.iter().zip(v).zip(weights) {
        uv += a.conj() * b * w;
        uu += a.norm_sqr() * w;
        vv += b.norm_sqr() * w;
    }
    cabs(uv) / (uu.sqrt() * vv.sqrt())
}
