use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Hermitian matrix stored by its upper band: `upper[i*(bw+1) + d] = A(i, i+d)`.
#[derive(Clone, Debug)]
pub struct BandedHermitian {
    dim: usize,
    bw: usize,
    upper: Vec<Complex64>,
}

impl BandedHermitian {
    pub fn zeros(dim: usize, bw: usize) -> Self {
        Self {
            dim,
            bw,
            upper: vec![ZERO; dim * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Set A(i, i+d) (and implicitly its conjugate A(i+d, i)).
    pub fn set_upper(&mut self, i: usize, d: usize, value: Complex64) {
        assert!(d <= self.bw && i + d < self.dim);
        self.upper[i * (self.bw + 1) + d] = value;
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i <= j {
            let d = j - i;
            if d > self.bw {
                ZERO
            } else {
                self.upper[i * (self.bw + 1) + d]
            }
        } else {
            self.get(j, i).conj()
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![ZERO; n];
        for i in 0..n {
            let row = &self.upper[i * (self.bw + 1)..(i + 1) * (self.bw + 1)];
            out[i] += row[0] * x[i];
            for d in 1..=self.bw.min(n - 1 - i) {
                out[i] += row[d] * x[i + d];
                out[i + d] += row[d].conj() * x[i];
            }
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.upper.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.dim {
            let start = i.saturating_sub(self.bw);
            let end = (i + self.bw).min(self.dim - 1);
            let radius: f64 = (start..=end).filter(|&j| j != i).map(|j| self.get(i, j).norm()).sum();
            let centre = self.get(i, i).re;
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`, from the inertia of an
    /// LDL* factorization of A − σI.
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.dim;
        let bw = self.bw;
        let pivmin = f64::MIN_POSITIVE * self.max_abs().powi(2).max(1.0);
        let mut pivots = vec![0.0f64; n];
        // lower[j*bw + (j-i-1)] = L(j, i) for 0 < j - i <= bw
        let mut lower = vec![ZERO; n * bw.max(1)];
        let mut negatives = 0;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut d = self.get(i, i).re - sigma;
            for k in lo..i {
                let l = lower[i * bw + (i - k - 1)];
                d -= l.norm_sqr() * pivots[k];
            }
            if d.abs() < pivmin {
                d = -pivmin;
            }
            pivots[i] = d;
            if d < 0.0 {
                negatives += 1;
            }
            for j in i + 1..=(i + bw).min(n - 1) {
                let mut acc = self.get(j, i);
                for k in j.saturating_sub(bw).max(lo)..i {
                    acc -= lower[j * bw + (j - k - 1)] * lower[i * bw + (i - k - 1)].conj() * pivots[k];
                }
                lower[j * bw + (j - i - 1)] = acc / d;
            }
        }
        negatives
    }

    /// The `index`-th eigenvalue (0-based, ascending) by bisection.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lowest `count` eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        (0..count.min(self.dim)).map(|j| self.eigenvalue(j)).collect()
    }

    /// Unit eigenvector for an accurate eigenvalue by inverse iteration,
    /// kept orthogonal to `deflate` (vectors of numerically equal eigenvalues).
    pub fn eigenvector(&self, lambda: f64, deflate: &[Vec<Complex64>]) -> Vec<Complex64> {
        let n = self.dim;
        let scale = self.max_abs().max(1e-300);
        // shift slightly off the eigenvalue so the factorization stays regular
        let shift = lambda + 4.0 * f64::EPSILON * scale.max(lambda.abs());
        let solver = BandLu::factor(self, shift);
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.5 * ((i as f64) * 0.7548776662).sin(), 0.25 * ((i as f64) * 0.5698402910).cos()))
            .collect();
        for _ in 0..4 {
            project_out(&mut x, deflate);
            normalize(&mut x);
            x = solver.solve(&x);
        }
        project_out(&mut x, deflate);
        normalize(&mut x);
        fix_phase(&mut x);
        x
    }
}

fn project_out(x: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let overlap: Complex64 = b.iter().zip(x.iter()).map(|(bi, xi)| bi.conj() * xi).sum();
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi -= overlap * bi;
        }
    }
}

fn normalize(x: &mut [Complex64]) {
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in x.iter_mut() {
            *c /= norm;
        }
    }
}

/// Rotate so the largest component is real and positive.
fn fix_phase(x: &mut [Complex64]) {
    let mut best = 0;
    for (i, c) in x.iter().enumerate() {
        // tolerance keeps the choice stable between nearly equal peaks
        if c.norm() > x[best].norm() * (1.0 + 1e-9) {
            best = i;
        }
    }
    let norm = x[best].norm();
    if norm > 0.0 {
        let phase = x[best].conj() / norm;
        for c in x.iter_mut() {
            *c *= phase;
        }
    }
}

/// Banded LU with partial pivoting of A − σI. Row i keeps columns
/// [i − bw, i + 2bw], enough for the fill produced by row exchanges.
struct BandLu {
    dim: usize,
    bw: usize,
    rows: Vec<Vec<Complex64>>,
    pivots: Vec<usize>,
    multipliers: Vec<Vec<Complex64>>,
}

impl BandLu {
    fn width(bw: usize) -> usize {
        3 * bw + 1
    }

    fn get(&self, row: usize, col: usize) -> Complex64 {
        let offset = col as isize - row as isize + self.bw as isize;
        if offset < 0 || offset as usize >= Self::width(self.bw) {
            ZERO
        } else {
            self.rows[row][offset as usize]
        }
    }

    fn set(&mut self, row: usize, col: usize, value: Complex64) {
        let offset = col as isize - row as isize + self.bw as isize;
        debug_assert!(offset >= 0 && (offset as usize) < Self::width(self.bw));
        self.rows[row][offset as usize] = value;
    }

    fn factor(a: &BandedHermitian, sigma: f64) -> Self {
        let n = a.dim;
        let bw = a.bw;
        let mut lu = BandLu {
            dim: n,
            bw,
            rows: vec![vec![ZERO; Self::width(bw)]; n],
            pivots: vec![0; n],
            multipliers: vec![vec![ZERO; bw]; n],
        };
        for i in 0..n {
            for j in i.saturating_sub(bw)..=(i + bw).min(n - 1) {
                let mut v = a.get(i, j);
                if i == j {
                    v -= sigma;
                }
                lu.set(i, j, v);
            }
        }
        let tiny = f64::EPSILON * a.max_abs().max(sigma.abs()).max(1e-300);
        for k in 0..n {
            let last = (k + bw).min(n - 1);
            let mut p = k;
            for r in k + 1..=last {
                if lu.get(r, k).norm() > lu.get(p, k).norm() {
                    p = r;
                }
            }
            lu.pivots[k] = p;
            let far = (k + 2 * bw).min(n - 1);
            if p != k {
                for c in k..=far {
                    let a_k = lu.get(k, c);
                    let a_p = lu.get(p, c);
                    lu.set(k, c, a_p);
                    lu.set(p, c, a_k);
                }
            }
            if lu.get(k, k).norm() < tiny {
                lu.set(k, k, Complex64::new(tiny, 0.0));
            }
            let pivot = lu.get(k, k);
            for r in k + 1..=last {
                let factor = lu.get(r, k) / pivot;
                lu.multipliers[k][r - k - 1] = factor;
                lu.set(r, k, ZERO);
                if factor != ZERO {
                    for c in k + 1..=far {
                        let v = lu.get(r, c) - factor * lu.get(k, c);
                        lu.set(r, c, v);
                    }
                }
            }
        }
        lu
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let bw = self.bw;
        let mut y = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                y.swap(k, p);
            }
            for r in k + 1..=(k + bw).min(n - 1) {
                let yk = y[k];
                y[r] -= self.multipliers[k][r - k - 1] * yk;
            }
        }
        for k in (0..n).rev() {
            let mut acc = y[k];
            for c in k + 1..=(k + 2 * bw).min(n - 1) {
                acc -= self.get(k, c) * y[c];
            }
            y[k] = acc / self.get(k, k);
        }
        y
    }
}
