use std::io::{self, Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{creal, to_f64, Real};
use crate::specfun_quadrature::{bessel_kernel, MeasureKind, QuadratureRule};

/// Which operator a matrix realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Kzq,
    M,
    T,
    /// T assembled over m~ (diagonal plus symmetric kernel part).
    TTilde,
    ResolventFactor,
}

impl OperatorKind {
    fn code(self) -> u32 {
        match self {
            OperatorKind::Kzq => 0,
            OperatorKind::M => 1,
            OperatorKind::T => 2,
            OperatorKind::TTilde => 3,
            OperatorKind::ResolventFactor => 4,
        }
    }

    fn from_code(c: u32) -> Option<Self> {
        Some(match c {
            0 => OperatorKind::Kzq,
            1 => OperatorKind::M,
            2 => OperatorKind::T,
            3 => OperatorKind::TTilde,
            4 => OperatorKind::ResolventFactor,
            _ => return None,
        })
    }
}

/// Real symmetric B = S^{-1} A S with S = diag(scaling).
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricFrame<T: Real> {
    pub scaling: Vec<T>,
    pub matrix: DMatrix<T>,
}

/// Nystrom matrix of an operator on L2(m) in quadrature coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedOperator<T: Real> {
    pub matrix: DMatrix<Complex<T>>,
    pub z: Complex<T>,
    pub q: u32,
    pub rule: QuadratureRule<T>,
    pub kind: OperatorKind,
    frame: Option<SymmetricFrame<T>>,
}

impl<T: Real> DiscretizedOperator<T> {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// The symmetrized similarity form, when one exists (real z <= 1, M, T).
    pub fn symmetric_frame(&self) -> Option<&SymmetricFrame<T>> {
        self.frame.as_ref()
    }

    /// max |B - B^T| of the symmetrized form.
    pub fn asymmetry(&self) -> Option<T> {
        self.frame.as_ref().map(|f| {
            let b = &f.matrix;
            let mut worst = T::zero();
            for i in 0..b.nrows() {
                for j in 0..i {
                    worst = worst.max((b[(i, j)] - b[(j, i)]).abs());
                }
            }
            worst
        })
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn apply(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.n() {
            return Err(invalid(format!("vector of length {} for a {}x{} operator", v.len(), self.n(), self.n())));
        }
        let x = nalgebra::DVector::from_column_slice(v);
        Ok((&self.matrix * x).iter().copied().collect())
    }

    /// Writes the documented binary layout (see `read_binary`).
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&to_f64(self.z.re).to_le_bytes())?;
        w.write_all(&to_f64(self.z.im).to_le_bytes())?;
        w.write_all(&self.q.to_le_bytes())?;
        w.write_all(&self.kind.code().to_le_bytes())?;
        for i in 0..self.n() {
            for j in 0..self.n() {
                let a = self.matrix[(i, j)];
                w.write_all(&to_f64(a.re).to_le_bytes())?;
                w.write_all(&to_f64(a.im).to_le_bytes())?;
            }
        }
        Ok(())
    }
}

const MAGIC: &[u8; 4] = b"FGOP";

/// Matrix read back from the binary layout.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixDump {
    pub n: usize,
    pub z: Complex<f64>,
    pub q: u32,
    pub kind: OperatorKind,
    pub matrix: DMatrix<Complex<f64>>,
}

/// Layout, little-endian: magic "FGOP", u32 version = 1, u64 N, f64 Re z, f64 Im z, u32 q, u32 kind,
/// then N*N entries row-major, each as f64 real part followed by f64 imaginary part.
pub fn read_binary<R: Read>(mut r: R) -> Result<MatrixDump> {
    let io_err = |e: io::Error| invalid(format!("matrix dump: {e}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(invalid("matrix dump: bad magic"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4).map_err(io_err)?;
    if u32::from_le_bytes(b4) != 1 {
        return Err(invalid("matrix dump: unsupported version"));
    }
    r.read_exact(&mut b8).map_err(io_err)?;
    let n = u64::from_le_bytes(b8) as usize;
    let mut f = || -> Result<f64> {
        r.read_exact(&mut b8).map_err(io_err)?;
        Ok(f64::from_le_bytes(b8))
    };
    let z = Complex::new(f()?, f()?);
    let mut u = || -> Result<u32> {
        r.read_exact(&mut b4).map_err(io_err)?;
        Ok(u32::from_le_bytes(b4))
    };
    let q = u()?;
    let kind = OperatorKind::from_code(u()?).ok_or_else(|| invalid("matrix dump: unknown kind"))?;
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        r.read_exact(&mut b8).map_err(io_err)?;
        let re = f64::from_le_bytes(b8);
        r.read_exact(&mut b8).map_err(io_err)?;
        let im = f64::from_le_bytes(b8);
        data.push(Complex::new(re, im));
    }
    Ok(MatrixDump { n, z, q, kind, matrix: DMatrix::from_row_slice(n, n, &data) })
}

fn require_measure<T: Real>(rule: &QuadratureRule<T>, m: MeasureKind) -> Result<()> {
    if rule.measure() == m {
        Ok(())
    } else {
        Err(invalid(format!("operator needs a rule over {m}, got {}", rule.measure())))
    }
}

/// Symmetric kernel matrix kernel(t_i, t_j, q), filled in parallel by rows.
pub(crate) fn kernel_matrix<T: Real>(nodes: &[T], q: u32) -> DMatrix<T> {
    let n = nodes.len();
    let rows: Vec<Vec<T>> =
        (0..n).into_par_iter().map(|i| (0..=i).map(|j| bessel_kernel(nodes[i], nodes[j], q)).collect()).collect();
    DMatrix::from_fn(n, n, |i, j| if j <= i { rows[i][j] } else { rows[j][i] })
}

/// Whether z is on the cut (1, inf).
pub fn on_cut<T: Real>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re > T::one()
}

/// K_{z,q} on a rule over m; z on the cut (1, inf) is rejected, z = 1 allowed.
pub fn build_kzq<T: Real>(z: Complex<T>, q: u32, rule: &QuadratureRule<T>) -> Result<DiscretizedOperator<T>> {
    if on_cut(z) {
        return Err(Error::OnCut(to_f64(z.re)));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("z must be finite"));
    }
    assemble_kzq(z, q, rule)
}

/// Assembly without the cut check; used to probe continuation values on the cut.
pub(crate) fn assemble_kzq<T: Real>(z: Complex<T>, q: u32, rule: &QuadratureRule<T>) -> Result<DiscretizedOperator<T>> {
    require_measure(rule, MeasureKind::M)?;
    if q > 2 {
        return Err(invalid(format!("q = {q} not in {{0, 1, 2}}")));
    }
    let t = rule.nodes();
    let w = rule.weights();
    let n = t.len();
    let kmat = kernel_matrix(t, q);
    let sign = if q.is_multiple_of(2) { T::one() } else { -T::one() };
    let c: Vec<Complex<T>> = t
        .iter()
        .map(|&ti| {
            let e = (-ti).exp();
            let num = creal(-(-ti).exp_m1());
            let den = creal(T::one()) - z * e;
            z * num / den * sign
        })
        .collect();
    let matrix = DMatrix::from_fn(n, n, |i, j| c[i] * (kmat[(i, j)] * w[j]));
    let frame = if z.im == T::zero() && z.re <= T::one() {
        if z.re == T::zero() {
            Some(SymmetricFrame { scaling: vec![T::one(); n], matrix: DMatrix::zeros(n, n) })
        } else {
            let cr: Vec<T> = c.iter().map(|v| v.re).collect();
            Some(kernel_frame(&vec![T::zero(); n], &cr, w, &kmat))
        }
    } else {
        None
    };
    Ok(DiscretizedOperator { matrix, z, q, rule: rule.clone(), kind: OperatorKind::Kzq, frame })
}

/// Frame of diag(d) + diag(c) K diag(w) with c of one sign: S = diag(sqrt(|c|/w)).
///
/// B is assembled from r = sqrt(|c| w) so that weights below the range of T do not poison it;
/// the scaling is then infinite at those nodes.
fn kernel_frame<T: Real>(d: &[T], c: &[T], w: &[T], kmat: &DMatrix<T>) -> SymmetricFrame<T> {
    let n = d.len();
    let r: Vec<T> = (0..n).map(|i| (c[i].abs() * w[i]).sqrt()).collect();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { d[i] } else { T::zero() };
        diag + c[i].signum() * r[i] * kmat[(i, j)] * r[j]
    });
    let scaling = (0..n).map(|i| (c[i].abs() / w[i]).sqrt()).collect();
    SymmetricFrame { scaling, matrix }
}

/// Multiplication by e^{-t}.
pub fn build_m<T: Real>(rule: &QuadratureRule<T>) -> Result<DiscretizedOperator<T>> {
    let n = rule.order();
    let d: Vec<T> = rule.nodes().iter().map(|&t| (-t).exp()).collect();
    let real = DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { T::zero() });
    Ok(DiscretizedOperator {
        matrix: real.map(creal),
        z: creal(T::zero()),
        q: 0,
        rule: rule.clone(),
        kind: OperatorKind::M,
        frame: Some(SymmetricFrame { scaling: vec![T::one(); n], matrix: real }),
    })
}

/// T = M + (1 - M) K on a rule over m; the coordinate form of P on Borel transforms.
pub fn build_t<T: Real>(rule: &QuadratureRule<T>) -> Result<DiscretizedOperator<T>> {
    require_measure(rule, MeasureKind::M)?;
    let t = rule.nodes();
    let w = rule.weights();
    let n = t.len();
    let kmat = kernel_matrix(t, 0);
    let e: Vec<T> = t.iter().map(|&ti| (-ti).exp()).collect();
    let d: Vec<T> = t.iter().map(|&ti| -(-ti).exp_m1()).collect();
    let real = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { e[i] } else { T::zero() };
        diag + d[i] * kmat[(i, j)] * w[j]
    });
    let frame = kernel_frame(&e, &d, w, &kmat);
    Ok(DiscretizedOperator {
        matrix: real.map(creal),
        z: creal(T::one()),
        q: 0,
        rule: rule.clone(),
        kind: OperatorKind::T,
        frame: Some(frame),
    })
}

/// M + K~ on a rule over m~ = t e^{-t} dt.
pub fn build_t_tilde<T: Real>(rule: &QuadratureRule<T>) -> Result<DiscretizedOperator<T>> {
    require_measure(rule, MeasureKind::MTilde)?;
    let t = rule.nodes();
    let w = rule.weights();
    let n = t.len();
    let kmat = kernel_matrix(t, 0);
    let e: Vec<T> = t.iter().map(|&ti| (-ti).exp()).collect();
    let real = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { e[i] } else { T::zero() };
        diag + kmat[(i, j)] * w[j]
    });
    let frame = kernel_frame(&e, &vec![T::one(); n], w, &kmat);
    Ok(DiscretizedOperator {
        matrix: real.map(creal),
        z: creal(T::one()),
        q: 0,
        rule: rule.clone(),
        kind: OperatorKind::TTilde,
        frame: Some(frame),
    })
}

/// (lambda - M)^{-1}, the diagonal factor of the resolvent.
pub fn build_resolvent_factor<T: Real>(lambda: Complex<T>, rule: &QuadratureRule<T>) -> Result<DiscretizedOperator<T>> {
    let n = rule.order();
    let d: Vec<Complex<T>> = rule.nodes().iter().map(|&t| (lambda - creal((-t).exp())).inv()).collect();
    if d.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Numerical("lambda coincides with a node value e^{-t_i}".into()));
    }
    Ok(DiscretizedOperator {
        matrix: DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { creal(T::zero()) }),
        z: lambda.inv(),
        q: 0,
        rule: rule.clone(),
        kind: OperatorKind::ResolventFactor,
        frame: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun_quadrature::build_rule;
    use num_complex::Complex64;

    #[test]
    fn zero_z_gives_zero_matrix() {
        let r = build_rule::<f64>(MeasureKind::M, 12).unwrap();
        let k = build_kzq(Complex64::new(0.0, 0.0), 0, &r).unwrap();
        assert!(k.matrix.iter().all(|a| *a == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn cut_rejected() {
        let r = build_rule::<f64>(MeasureKind::M, 12).unwrap();
        assert!(matches!(build_kzq(Complex64::new(2.0, 0.0), 0, &r), Err(Error::OnCut(_))));
        assert!(build_kzq(Complex64::new(2.0, 0.1), 0, &r).is_ok());
        assert!(build_kzq(Complex64::new(0.5, 0.0), 3, &r).is_err());
        let rt = build_rule::<f64>(MeasureKind::MTilde, 12).unwrap();
        assert!(build_kzq(Complex64::new(0.5, 0.0), 0, &rt).is_err());
    }

    #[test]
    fn m_is_diagonal_in_unit_interval() {
        let r = build_rule::<f64>(MeasureKind::M, 20).unwrap();
        let m = build_m(&r).unwrap();
        for i in 0..20 {
            let d = m.matrix[(i, i)].re;
            assert!(d > 0.0 && d < 1.0);
        }
    }

    #[test]
    fn binary_round_trip() {
        let r = build_rule::<f64>(MeasureKind::M, 6).unwrap();
        let k = build_kzq(Complex64::new(0.5, 0.25), 1, &r).unwrap();
        let mut buf = Vec::new();
        k.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 8 + 16 + 8 + 36 * 16);
        let back = read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.n, 6);
        assert_eq!(back.q, 1);
        assert_eq!(back.z, Complex64::new(0.5, 0.25));
        assert_eq!(back.kind, OperatorKind::Kzq);
        assert_eq!(back.matrix, k.matrix);
        assert!(read_binary(&b"nope"[..]).is_err());
    }
}
