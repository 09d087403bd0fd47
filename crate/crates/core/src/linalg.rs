//! Dense linear-algebra helpers: matrix exponentials, the unitary flow of a skew-symmetric
//! generator, PSD square roots and norms.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
// 1-norm thresholds for degrees 3, 5, 7, 9, 13 (Higham 2005).
const THETA: [f64; 5] = [
    1.495585217958292e-2,
    2.539_398_330_063_23e-1,
    9.504178996162932e-1,
    2.097847961257068,
    5.371920351148152,
];

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade_solve(u: DMatrix<f64>, v: DMatrix<f64>) -> DMatrix<f64> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Pade denominator is nonsingular within the degree thresholds")
}

fn pade_low(a: &DMatrix<f64>, b: &[f64]) -> DMatrix<f64> {
    let n = a.nrows();
    let a2 = a * a;
    let mut odd = DMatrix::<f64>::identity(n, n) * b[1];
    let mut even = DMatrix::<f64>::identity(n, n) * b[0];
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut k = 2;
    while k < b.len() {
        power = &power * &a2;
        even += &power * b[k];
        if k + 1 < b.len() {
            odd += &power * b[k + 1];
        }
        k += 2;
    }
    pade_solve(a * odd, even)
}

fn pade13(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let b = &PADE13;
    let id = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &id * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + id * b[0];
    pade_solve(u, v)
}

/// `exp(M)` by scaling and squaring with diagonal Padé approximants.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(m.is_square(), "expm needs a square matrix");
    let n = m.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let nrm = norm1(m);
    if nrm == 0.0 {
        return DMatrix::identity(n, n);
    }
    for (theta, coeffs) in THETA[..4].iter().zip([&PADE3[..], &PADE5, &PADE7, &PADE9]) {
        if nrm <= *theta {
            return pade_low(m, coeffs);
        }
    }
    let s = (nrm / THETA[4]).log2().ceil().max(0.0) as i32;
    let scaled = m / 2f64.powi(s);
    let mut r = pade13(&scaled);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Largest eigenvalue of the symmetric part `(A + A^T) / 2`.
pub fn max_symmetric_eigenvalue(a: &DMatrix<f64>) -> f64 {
    let sym = (a + a.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest singular value.
pub fn spectral_norm(b: &DMatrix<f64>) -> f64 {
    if b.is_empty() {
        return 0.0;
    }
    b.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Symmetric PSD square root via eigendecomposition. Eigenvalues down to
/// `-1e-12 * max(1, |lambda|_max)` are clamped to 0; anything more negative is an error.
pub fn psd_sqrt(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let sym = (g + g.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut roots = eig.eigenvalues.clone();
    for v in roots.iter_mut() {
        if *v < -1e-12 * scale {
            return Err(Error::NotPositiveSemidefinite { eig: *v });
        }
        *v = v.max(0.0).sqrt();
    }
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix.
pub fn min_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let (idx, val) =
        eig.eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, v)| if v < best.1 { (i, v) } else { best },
            );
    (val, eig.eigenvectors.column(idx).into_owned())
}

/// Unitary flow `t -> exp(tA)` of a skew-symmetric `A`, from the eigendecomposition of
/// the Hermitian matrix `iA = U diag(lambda) U^*`, so that `exp(tA) = U diag(e^{-i lambda t}) U^*`.
#[derive(Debug, Clone)]
pub struct SkewFlow {
    eigvecs: DMatrix<Complex<f64>>,
    freqs: DVector<f64>,
}

impl SkewFlow {
    pub fn new(a: &DMatrix<f64>) -> Self {
        let herm = a.map(|x| Complex::new(0.0, x));
        // Symmetrize against rounding in the caller's skew part.
        let herm = (&herm + herm.adjoint()) * Complex::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        SkewFlow {
            eigvecs: eig.eigenvectors,
            freqs: eig.eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.freqs.len()
    }

    /// Largest angular frequency of the flow.
    pub fn max_frequency(&self) -> f64 {
        self.freqs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `exp(tA)` as a real matrix.
    pub fn exp(&self, t: f64) -> DMatrix<f64> {
        let phases = self.phases(t);
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigvecs[(i, j)] * phases[j]
        });
        (scaled * self.eigvecs.adjoint()).map(|c| c.re)
    }

    fn phases(&self, t: f64) -> DVector<Complex<f64>> {
        self.freqs.map(|w| Complex::from_polar(1.0, -w * t))
    }

    /// Precomputes `C U` and `U^* z0` so that `C exp(tA) z0` costs `O(rows * N)` per time.
    pub fn observed(&self, c: &DMatrix<f64>, z0: &DVector<f64>) -> ObservedFlow {
        let cu = c.map(|x| Complex::new(x, 0.0)) * &self.eigvecs;
        let w = self.eigvecs.adjoint() * z0.map(|x| Complex::new(x, 0.0));
        ObservedFlow {
            cu,
            coeffs: w,
            freqs: self.freqs.clone(),
        }
    }
}

/// `t -> C exp(tA) z0` for a fixed observation `C` and initial state `z0`.
#[derive(Debug, Clone)]
pub struct ObservedFlow {
    cu: DMatrix<Complex<f64>>,
    coeffs: DVector<Complex<f64>>,
    freqs: DVector<f64>,
}

impl ObservedFlow {
    pub fn at(&self, t: f64) -> DVector<f64> {
        let v = DVector::from_fn(self.coeffs.len(), |k, _| {
            self.coeffs[k] * Complex::from_polar(1.0, -self.freqs[k] * t)
        });
        (&self.cu * v).map(|c| c.re)
    }

    /// `||C exp(tA) z0||^2`.
    pub fn norm_squared(&self, t: f64) -> f64 {
        self.at(t).norm_squared()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(w: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, w, -w, 0.0])
    }

    #[test]
    fn expm_of_rotation_generator() {
        for &t in &[1e-3, 0.3, 2.0, 40.0] {
            let e = expm(&(rotation(1.0) * t));
            let expect = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
            assert!((e - expect).amax() < 1e-13 * (1.0 + t));
        }
    }

    #[test]
    fn expm_matches_nalgebra_and_skew_path() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.3, -0.2, 0.7, -1.3, 0.0, 2.1, 0.1, 0.2, -2.1, 0.0, -0.9, -0.7, -0.1, 0.9,
                0.0,
            ],
        );
        let flow = SkewFlow::new(&a);
        for &t in &[0.01, 0.5, 3.0, 17.0] {
            let ours = expm(&(&a * t));
            let reference = (&a * t).exp();
            let spectral = flow.exp(t);
            assert!((&ours - &reference).amax() < 1e-11, "t = {t}");
            assert!((&ours - &spectral).amax() < 1e-11, "t = {t}");
        }
    }

    #[test]
    fn expm_dissipative_block() {
        // A - BB^T for the damped oscillator: eigenvalues (-1 +- i sqrt 3) / 2.
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -1.0]);
        let e = expm(&(&m * 5.0));
        let reference = (&m * 5.0).exp();
        assert!((e - reference).amax() < 1e-13);
    }

    #[test]
    fn psd_sqrt_roundtrip_and_rejection() {
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let r = psd_sqrt(&g).unwrap();
        assert!((&r * &r - &g).amax() < 1e-14);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let r = psd_sqrt(&singular).unwrap();
        assert!((&r * &r - &singular).amax() < 1e-14);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        assert!(psd_sqrt(&bad).is_err());
    }

    #[test]
    fn observed_flow_matches_dense() {
        let a = rotation(3.0);
        let c = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let z0 = DVector::from_vec(vec![0.6, 0.8]);
        let obs = SkewFlow::new(&a).observed(&c, &z0);
        for &t in &[0.0, 0.2, 1.7] {
            let direct = &c * expm(&(&a * t)) * &z0;
            assert!((obs.at(t) - direct).amax() < 1e-14);
        }
    }
}
