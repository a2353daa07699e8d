//! Symmetric generalized eigenproblems `Q f = λ M f` with `M` diagonal and
//! positive, in the form produced by graphs: a diagonal part plus a sum of
//! edge terms `c (f_u - f_v)²`.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Size at and below which eigenproblems are solved densely.
pub const DENSE_LIMIT: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    measure: Vec<f64>,
    diagonal: Vec<f64>,
    couplings: Vec<(usize, usize, f64)>,
}

impl QuadraticForm {
    /// `measure[i] > 0`; couplings are `(u, v, c)` with `u != v`. Loops are
    /// discarded.
    pub fn new(measure: Vec<f64>, diagonal: Vec<f64>, couplings: Vec<(usize, usize, f64)>) -> Self {
        debug_assert_eq!(measure.len(), diagonal.len());
        let couplings = couplings.into_iter().filter(|&(u, v, _)| u != v).collect();
        Self {
            measure,
            diagonal,
            couplings,
        }
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn couplings(&self) -> &[(usize, usize, f64)] {
        &self.couplings
    }

    pub fn value(&self, f: &[f64]) -> f64 {
        let d: f64 = self.diagonal.iter().zip(f).map(|(d, x)| d * x * x).sum();
        let e: f64 = self
            .couplings
            .iter()
            .map(|&(u, v, c)| c * (f[u] - f[v]) * (f[u] - f[v]))
            .sum();
        d + e
    }

    pub fn norm_sq(&self, f: &[f64]) -> f64 {
        self.measure.iter().zip(f).map(|(m, x)| m * x * x).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.measure
            .iter()
            .zip(f.iter().zip(g))
            .map(|(m, (a, b))| m * a * b)
            .sum()
    }

    pub fn rayleigh(&self, f: &[f64]) -> Result<f64> {
        let n = self.norm_sq(f);
        if n == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(self.value(f) / n)
    }

    /// `Q f` (not divided by the measure).
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = self.diagonal.iter().zip(f).map(|(d, x)| d * x).collect();
        for &(u, v, c) in &self.couplings {
            let t = c * (f[u] - f[v]);
            out[u] += t;
            out[v] -= t;
        }
        out
    }

    /// Residual `‖Q f − λ M f‖_{M⁻¹} / ‖f‖_M`, i.e. `‖Hf − λf‖ / ‖f‖` in `L²(m)`.
    pub fn residual(&self, f: &[f64], lambda: f64) -> f64 {
        let qf = self.apply(f);
        let r: f64 = qf
            .iter()
            .zip(f)
            .zip(&self.measure)
            .map(|((q, x), m)| {
                let d = q - lambda * m * x;
                d * d / m
            })
            .sum();
        (r / self.norm_sq(f)).sqrt()
    }

    /// Diagonal entries of `Q` (potential plus total coupling).
    pub fn full_diagonal(&self) -> Vec<f64> {
        let mut d = self.diagonal.clone();
        for &(u, v, c) in &self.couplings {
            d[u] += c;
            d[v] += c;
        }
        d
    }

    /// Restriction to the coordinates in `keep` (Dirichlet elsewhere: edges
    /// to dropped coordinates become diagonal terms).
    pub fn restrict(&self, keep: &[usize]) -> Result<QuadraticForm> {
        if keep.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut pos = vec![usize::MAX; self.len()];
        for (i, &k) in keep.iter().enumerate() {
            if k >= self.len() {
                return Err(Error::DanglingVertex { index: k, n: self.len() });
            }
            pos[k] = i;
        }
        let mut diagonal: Vec<f64> = keep.iter().map(|&k| self.diagonal[k]).collect();
        let mut couplings = Vec::new();
        for &(u, v, c) in &self.couplings {
            match (pos[u], pos[v]) {
                (usize::MAX, usize::MAX) => {}
                (a, usize::MAX) => diagonal[a] += c,
                (usize::MAX, b) => diagonal[b] += c,
                (a, b) => couplings.push((a, b, c)),
            }
        }
        Ok(QuadraticForm::new(
            keep.iter().map(|&k| self.measure[k]).collect(),
            diagonal,
            couplings,
        ))
    }

    /// Dense `Q`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut q = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for &(u, v, c) in &self.couplings {
            q[(u, u)] += c;
            q[(v, v)] += c;
            q[(u, v)] -= c;
            q[(v, u)] -= c;
        }
        debug_assert_eq!(q.nrows(), n);
        q
    }

    /// `M^{-1/2} Q M^{-1/2}` as sparse symmetric entries `(i, j, value)` with
    /// `i < j`, and its diagonal.
    fn scaled(&self) -> (Vec<f64>, Vec<(usize, usize, f64)>) {
        let s: Vec<f64> = self.measure.iter().map(|m| 1.0 / m.sqrt()).collect();
        let diag: Vec<f64> = self
            .full_diagonal()
            .iter()
            .zip(&s)
            .map(|(d, si)| d * si * si)
            .collect();
        let off = self
            .couplings
            .iter()
            .map(|&(u, v, c)| {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                (a, b, -c * s[u] * s[v])
            })
            .collect();
        (diag, off)
    }

    /// Certified lower bound `min_i diagonal_i / m_i` on the bottom eigenvalue
    /// (the coupling part is positive semidefinite).
    pub fn lower_bound(&self) -> f64 {
        self.diagonal
            .iter()
            .zip(&self.measure)
            .map(|(d, m)| d / m)
            .fold(f64::INFINITY, f64::min)
    }

    /// Upper bound on the top eigenvalue (Gershgorin on the scaled matrix).
    pub fn gershgorin_upper(&self) -> f64 {
        let (diag, off) = self.scaled();
        let mut row = diag.clone();
        for &(a, b, v) in &off {
            row[a] += v.abs();
            row[b] += v.abs();
        }
        row.into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Eigenpairs in ascending order; vectors normalized in `L²(m)`.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Full spectrum by a dense solve.
pub fn dense_eigen(form: &QuadraticForm) -> Result<Eigenpairs> {
    let n = form.len();
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    let (diag, off) = form.scaled();
    let mut b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    for (i, j, v) in off {
        b[(i, j)] += v;
        b[(j, i)] += v;
    }
    let eig = SymmetricEigen::try_new(b, f64::EPSILON, 0)
        .ok_or_else(|| Error::NotConverged("dense symmetric eigensolver".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            (0..n).map(|i| col[i] / form.measure[i].sqrt()).collect()
        })
        .collect();
    Ok(Eigenpairs { values, vectors })
}

/// Elimination order for sparse `LDLᵀ` (greedy minimum degree, ties broken
/// by index). Trees and paths factor with no fill.
fn minimum_degree_order(n: usize, off: &[(usize, usize, f64)]) -> Vec<usize> {
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(a, b, _) in off {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let nbrs: Vec<usize> = std::mem::take(&mut adj[v]).into_iter().collect();
        for &u in &nbrs {
            queue.remove(&(adj[u].len(), u));
            adj[u].remove(&v);
        }
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
        for &u in &nbrs {
            queue.insert((adj[u].len(), u));
        }
    }
    order
}

/// Sparse `LDLᵀ` factorization of `B − σI` where `B = M^{-1/2} Q M^{-1/2}`.
#[derive(Debug, Clone)]
pub struct Factorization {
    perm: Vec<usize>,
    pivots: Vec<f64>,
    /// Column `k` of `L` below the diagonal, as `(row, value)` in permuted indices.
    columns: Vec<Vec<(usize, f64)>>,
}

impl Factorization {
    /// Number of negative pivots, i.e. the number of eigenvalues below `σ`.
    pub fn negative_count(&self) -> usize {
        self.pivots.iter().filter(|&&d| d < 0.0).count()
    }

    /// Solves `(B − σI) x = b` in scaled coordinates.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for k in 0..n {
            let yk = y[k];
            for &(i, l) in &self.columns[k] {
                y[i] -= l * yk;
            }
        }
        for k in 0..n {
            y[k] /= self.pivots[k];
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for &(i, l) in &self.columns[k] {
                s -= l * y[i];
            }
            y[k] = s;
        }
        let mut x = vec![0.0; n];
        for (k, &i) in self.perm.iter().enumerate() {
            x[i] = y[k];
        }
        x
    }
}

/// Precomputed scaled matrix and elimination order, reused across shifts.
#[derive(Debug, Clone)]
pub struct ShiftSolver {
    diag: Vec<f64>,
    off: Vec<(usize, usize, f64)>,
    perm: Vec<usize>,
    position: Vec<usize>,
    scale: f64,
    sqrt_measure: Vec<f64>,
}

impl ShiftSolver {
    pub fn new(form: &QuadraticForm) -> Self {
        let (diag, off) = form.scaled();
        let perm = minimum_degree_order(form.len(), &off);
        let mut position = vec![0; perm.len()];
        for (k, &i) in perm.iter().enumerate() {
            position[i] = k;
        }
        let scale = diag.iter().fold(1.0_f64, |a, d| a.max(d.abs()));
        Self {
            diag,
            off,
            perm,
            position,
            scale,
            sqrt_measure: form.measure.iter().map(|m| m.sqrt()).collect(),
        }
    }

    pub fn factor(&self, sigma: f64) -> Factorization {
        let n = self.perm.len();
        let pos = &self.position;
        let mut pivots: Vec<f64> = self.perm.iter().map(|&i| self.diag[i] - sigma).collect();
        let mut work: Vec<HashMap<usize, f64>> = vec![HashMap::new(); n];
        for &(a, b, v) in &self.off {
            let (pa, pb) = (pos[a], pos[b]);
            let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
            *work[lo].entry(hi).or_insert(0.0) += v;
        }
        let floor = f64::EPSILON * self.scale * 1e-3;
        let mut columns = Vec::with_capacity(n);
        for k in 0..n {
            let mut d = pivots[k];
            if d.abs() < floor {
                d = if d < 0.0 { -floor } else { floor };
                pivots[k] = d;
            }
            let mut col: Vec<(usize, f64)> = std::mem::take(&mut work[k])
                .into_iter()
                .map(|(i, a)| (i, a / d))
                .collect();
            col.sort_unstable_by_key(|e| e.0);
            for (x, &(i, li)) in col.iter().enumerate() {
                pivots[i] -= li * li * d;
                for &(j, lj) in &col[x + 1..] {
                    *work[i].entry(j).or_insert(0.0) -= li * d * lj;
                }
            }
            columns.push(col);
        }
        Factorization {
            perm: self.perm.clone(),
            pivots,
            columns,
        }
    }

    /// Number of eigenvalues strictly below `σ`.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.factor(sigma).negative_count()
    }

    fn unscale(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.sqrt_measure).map(|(x, s)| x / s).collect()
    }
}

/// Result of the iterative bottom-eigenpair solve.
#[derive(Debug, Clone)]
pub struct IterativeEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Bisection brackets `[lo, hi]` for each eigenvalue.
    pub brackets: Vec<(f64, f64)>,
    pub factorizations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lowest `k` eigenpairs by Sylvester-inertia bisection and shifted inverse
/// iteration. The bisection starts from the certified lower bound
/// [`QuadraticForm::lower_bound`].
pub fn lowest_eigenpairs(form: &QuadraticForm, k: usize, tol: f64) -> Result<IterativeEigen> {
    let n = form.len();
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    if k == 0 || k > n {
        return Err(Error::param(format!("requested {k} eigenpairs of a {n}-dimensional problem")));
    }
    let solver = ShiftSolver::new(form);
    let floor = form.lower_bound();
    let top = form.gershgorin_upper();
    let mut factorizations = 0;
    let mut values = Vec::with_capacity(k);
    let mut brackets = Vec::with_capacity(k);
    let mut scaled_vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut lo = floor - tol.max(1e-300);
    for j in 0..k {
        let mut hi = top + 1.0;
        let mut l = lo;
        let mut iterations = 0;
        while hi - l > tol * hi.abs().max(1.0) {
            let mid = 0.5 * (l + hi);
            factorizations += 1;
            if solver.count_below(mid) > j {
                hi = mid;
            } else {
                l = mid;
            }
            iterations += 1;
            if iterations > 200 {
                return Err(Error::NotConverged(format!("bisection for eigenvalue {j}")));
            }
        }
        brackets.push((l, hi));
        let shift = l - tol * hi.abs().max(1.0);
        let fact = solver.factor(shift);
        factorizations += 1;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919 + j * 104729) % 97) as f64).collect();
        let mut value = 0.5 * (l + hi);
        let mut converged = false;
        let mut settled = 0;
        for _ in 0..100 {
            for prev in &scaled_vectors {
                let p = dot(&v, prev);
                v.iter_mut().zip(prev).for_each(|(x, y)| *x -= p * y);
            }
            if normalize(&mut v) == 0.0 {
                return Err(Error::NotConverged(format!("inverse iteration collapsed for eigenvalue {j}")));
            }
            let mut w = fact.solve(&v);
            for prev in &scaled_vectors {
                let p = dot(&w, prev);
                w.iter_mut().zip(prev).for_each(|(x, y)| *x -= p * y);
            }
            normalize(&mut w);
            let f = solver.unscale(&w);
            let rq = form.rayleigh(&f)?;
            let change = (rq - value).abs();
            value = rq;
            let aligned = dot(&v, &w).abs();
            v = w;
            if change <= tol * rq.abs().max(1.0) && aligned > 1.0 - 1e-8 {
                settled += 1;
                if settled >= 2 {
                    converged = true;
                    break;
                }
            } else {
                settled = 0;
            }
        }
        if !converged {
            return Err(Error::NotConverged(format!("inverse iteration for eigenvalue {j}")));
        }
        values.push(value);
        scaled_vectors.push(v);
        lo = l;
    }
    let vectors = scaled_vectors
        .iter()
        .map(|u| {
            let f = solver.unscale(u);
            let norm = form.norm_sq(&f).sqrt();
            f.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    Ok(IterativeEigen {
        values,
        vectors,
        brackets,
        factorizations,
    })
}

/// Lowest `k` eigenpairs, dense for small problems and iterative otherwise.
pub fn bottom_eigenpairs(form: &QuadraticForm, k: usize) -> Result<Eigenpairs> {
    if form.len() <= DENSE_LIMIT {
        let mut e = dense_eigen(form)?;
        e.values.truncate(k);
        e.vectors.truncate(k);
        Ok(e)
    } else {
        let e = lowest_eigenpairs(form, k, 1e-12)?;
        Ok(Eigenpairs {
            values: e.values,
            vectors: e.vectors,
        })
    }
}

/// Number of eigenvalues strictly below `sigma`.
pub fn count_below(form: &QuadraticForm, sigma: f64) -> usize {
    ShiftSolver::new(form).count_below(sigma)
}
