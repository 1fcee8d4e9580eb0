use crate::linalg::DenseMatrix;
use crate::lp::{StandardLp, TripletBuilder};
use crate::IndexSet;

use super::ModelError;

/// Frozen variable and row numbering of the equality-form `P(L, M)`.
///
/// Variables, in order:
///
/// | block | size    | meaning                                     |
/// |-------|---------|---------------------------------------------|
/// | X     | `l*m`   | column-major, `X(i, j)` at `j*l + i`        |
/// | F     | `d*m`   | positive residual part                      |
/// | G     | `d*m`   | negative residual part                      |
/// | u     | 1       | objective                                   |
/// | sigma | `m`     | slack of the column-sum rows                |
/// | zeta  | `l*m-l` | slack of `X(i, j) <= X(i, i)`, `i != j`     |
/// | tau   | `l`     | slack of `X(i, i) <= 1`                     |
///
/// Rows, in order:
///
/// | block | size    | constraint                                  |
/// |-------|---------|---------------------------------------------|
/// | B1    | `d*m`   | `A(L) X + F - G = A(M) Pi`, entry `(i, j)` at `j*d + i` |
/// | B2    | `m`     | `sum_i F(i, j) + G(i, j) - u + sigma_j = 0` |
/// | B3    | 1       | `trace X = r`                               |
/// | B4    | `l*m-l` | `X(i, j) - X(i, i) + zeta = 0`, `j` outer, `i` inner, `i != j` |
/// | B5    | `l`     | `X(i, i) + tau_i = 1`                       |
///
/// With the LP convention `Aᵀy <= c`, the dual blocks of `D(L, M)` are
/// `Y = y[B1]`, `s = -y[B2]`, `v = y[B3]`, `Z(j, i) = -y[B4(i, j)]` and
/// `t = -y[B5]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimalLayout {
    pub d: usize,
    pub l: usize,
    pub m: usize,
}

impl PrimalLayout {
    pub fn new(d: usize, l: usize, m: usize) -> Self {
        debug_assert!(l <= m);
        Self { d, l, m }
    }

    fn offdiag(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < self.l && j < self.m);
        let before = j * self.l - j.min(self.l);
        before + i - usize::from(j < self.l && i > j)
    }

    pub fn num_offdiag(&self) -> usize {
        self.l * self.m - self.l
    }

    pub fn x(&self, i: usize, j: usize) -> usize {
        j * self.l + i
    }

    pub fn f(&self, i: usize, j: usize) -> usize {
        self.l * self.m + j * self.d + i
    }

    pub fn g(&self, i: usize, j: usize) -> usize {
        self.l * self.m + self.d * self.m + j * self.d + i
    }

    pub fn u(&self) -> usize {
        self.l * self.m + 2 * self.d * self.m
    }

    pub fn sigma(&self, j: usize) -> usize {
        self.u() + 1 + j
    }

    pub fn zeta(&self, i: usize, j: usize) -> usize {
        self.u() + 1 + self.m + self.offdiag(i, j)
    }

    pub fn tau(&self, i: usize) -> usize {
        self.u() + 1 + self.m + self.num_offdiag() + i
    }

    pub fn num_vars(&self) -> usize {
        self.tau(0) + self.l
    }

    pub fn row_b1(&self, i: usize, j: usize) -> usize {
        j * self.d + i
    }

    pub fn row_b2(&self, j: usize) -> usize {
        self.d * self.m + j
    }

    pub fn row_b3(&self) -> usize {
        self.d * self.m + self.m
    }

    pub fn row_b4(&self, i: usize, j: usize) -> usize {
        self.row_b3() + 1 + self.offdiag(i, j)
    }

    pub fn row_b5(&self, i: usize) -> usize {
        self.row_b3() + 1 + self.num_offdiag() + i
    }

    pub fn num_rows(&self) -> usize {
        self.row_b5(0) + self.l
    }
}

/// `P(L, M)` in equality form together with its layout and the column
/// order `Pi` (positions of `M` listed as `L` first, then `M \ L`).
#[derive(Debug, Clone)]
pub struct PrimalLp {
    pub lp: StandardLp,
    pub layout: PrimalLayout,
    pub order: Vec<usize>,
    pub r: usize,
}

fn check_indices(n: usize, set: &IndexSet) -> Result<(), ModelError> {
    match set.iter().find(|&i| i >= n) {
        Some(index) => Err(ModelError::IndexOutOfRange { index, n }),
        None => Ok(()),
    }
}

/// Column order `(L, M \ L)`.
pub fn pi_order(l: &IndexSet, m: &IndexSet) -> Result<Vec<usize>, ModelError> {
    if let Some(i) = l.iter().find(|&i| !m.contains(i)) {
        return Err(ModelError::NotSubset { index: i });
    }
    let in_l = l.iter().collect::<std::collections::HashSet<_>>();
    let mut order: Vec<usize> = l.iter().collect();
    order.extend(m.iter().filter(|j| !in_l.contains(j)));
    Ok(order)
}

/// Builds `P(L, M)` for the data matrix `a`.
pub fn build_primal(
    a: &DenseMatrix,
    l: &IndexSet,
    m: &IndexSet,
    r: usize,
) -> Result<PrimalLp, ModelError> {
    let n = a.cols();
    check_indices(n, l)?;
    check_indices(n, m)?;
    if r == 0 || r > l.len() {
        return Err(ModelError::RankTooLarge { r, l: l.len() });
    }
    let order = pi_order(l, m)?;
    let lay = PrimalLayout::new(a.rows(), l.len(), order.len());
    let (d, ll, mm) = (lay.d, lay.l, lay.m);
    let al = l.as_slice();

    let mut b = TripletBuilder::with_capacity(lay.num_rows(), lay.num_vars(), ll * mm * (d + 2));
    let mut cost = vec![0.0; lay.num_vars()];

    for j in 0..mm {
        for i in 0..ll {
            for (k, &v) in a.col(al[i]).iter().enumerate() {
                b.push(lay.row_b1(k, j), v);
            }
            if i == j {
                b.push(lay.row_b3(), 1.0);
                for jj in (0..mm).filter(|&jj| jj != i) {
                    b.push(lay.row_b4(i, jj), -1.0);
                }
                b.push(lay.row_b5(i), 1.0);
            } else {
                b.push(lay.row_b4(i, j), 1.0);
            }
            b.finish_column();
        }
    }
    for sign in [1.0, -1.0] {
        for j in 0..mm {
            for i in 0..d {
                b.push(lay.row_b1(i, j), sign);
                b.push(lay.row_b2(j), 1.0);
                b.finish_column();
            }
        }
    }
    for j in 0..mm {
        b.push(lay.row_b2(j), -1.0);
    }
    cost[b.finish_column()] = 1.0;
    for j in 0..mm {
        b.push(lay.row_b2(j), 1.0);
        b.finish_column();
    }
    for j in 0..mm {
        for i in (0..ll).filter(|&i| i != j) {
            b.push(lay.row_b4(i, j), 1.0);
            b.finish_column();
        }
    }
    for i in 0..ll {
        b.push(lay.row_b5(i), 1.0);
        b.finish_column();
    }
    debug_assert_eq!(b.ncols(), lay.num_vars());

    let mut rhs = vec![0.0; lay.num_rows()];
    for (j, &col) in order.iter().enumerate() {
        for (i, &v) in a.col(col).iter().enumerate() {
            rhs[lay.row_b1(i, j)] = v;
        }
    }
    rhs[lay.row_b3()] = r as f64;
    for i in 0..ll {
        rhs[lay.row_b5(i)] = 1.0;
    }
    let lp = StandardLp::new(cost, b.build(), rhs)?;
    Ok(PrimalLp { lp, layout: lay, order, r })
}

/// Basis of a solved `P(L, M)`, kept to warm-start a larger subproblem.
///
/// Entries below the variable count are structural; `num_vars + i` is the
/// logical of row `i`.
#[derive(Debug, Clone)]
pub struct WarmStart {
    pub layout: PrimalLayout,
    pub order: Vec<usize>,
    pub basis: Vec<usize>,
}

impl PrimalLp {
    /// Carries a basis over to this problem when its `L` and `M` contain the
    /// old ones. Old variables and rows keep their status; the logicals of
    /// the new rows join the basis, so the new basis matrix is block
    /// triangular with the old one in a corner.
    pub fn map_basis(&self, warm: &WarmStart) -> Option<Vec<usize>> {
        let (old, new) = (warm.layout, self.layout);
        if old.d != new.d || warm.basis.len() != old.num_rows() {
            return None;
        }
        let pos: std::collections::HashMap<usize, usize> =
            self.order.iter().enumerate().map(|(p, &e)| (e, p)).collect();
        let np: Vec<usize> = warm.order.iter().map(|e| pos.get(e).copied()).collect::<Option<_>>()?;
        if np[..old.l].iter().any(|&p| p >= new.l) {
            return None;
        }
        let (on, nn) = (old.num_vars(), new.num_vars());
        let mut var = vec![0; on];
        let mut row = vec![0; old.num_rows()];
        for j in 0..old.m {
            for i in 0..old.l {
                var[old.x(i, j)] = new.x(np[i], np[j]);
                if i != j {
                    var[old.zeta(i, j)] = new.zeta(np[i], np[j]);
                    row[old.row_b4(i, j)] = new.row_b4(np[i], np[j]);
                }
            }
            for k in 0..old.d {
                var[old.f(k, j)] = new.f(k, np[j]);
                var[old.g(k, j)] = new.g(k, np[j]);
                row[old.row_b1(k, j)] = new.row_b1(k, np[j]);
            }
            var[old.sigma(j)] = new.sigma(np[j]);
            row[old.row_b2(j)] = new.row_b2(np[j]);
        }
        var[old.u()] = new.u();
        row[old.row_b3()] = new.row_b3();
        for i in 0..old.l {
            var[old.tau(i)] = new.tau(np[i]);
            row[old.row_b5(i)] = new.row_b5(np[i]);
        }
        let mut covered = vec![false; new.num_rows()];
        row.iter().for_each(|&r| covered[r] = true);
        let mut basis: Vec<usize> = warm
            .basis
            .iter()
            .map(|&b| if b < on { var[b] } else { nn + row[b - on] })
            .collect();
        basis.extend((0..new.num_rows()).filter(|&r| !covered[r]).map(|r| nn + r));
        Some(basis)
    }

    /// Primal vector for a given `X` (`l x m`, columns in `Pi` order): the
    /// residual split `F = R⁺`, `G = R⁻`, `u = ‖R‖₁` and the implied slacks.
    pub fn primal_vector(&self, a: &DenseMatrix, l: &IndexSet, x: &DenseMatrix) -> Vec<f64> {
        let lay = &self.layout;
        let mut out = vec![0.0; lay.num_vars()];
        let al = a.select_columns(l.as_slice());
        let mut colsum = vec![0.0; lay.m];
        for j in 0..lay.m {
            let fitted = al.mul_vec(x.col(j));
            for i in 0..lay.l {
                out[lay.x(i, j)] = x.get(i, j);
            }
            for (i, (&target, fit)) in a.col(self.order[j]).iter().zip(&fitted).enumerate() {
                let res = target - fit;
                out[lay.f(i, j)] = res.max(0.0);
                out[lay.g(i, j)] = (-res).max(0.0);
                colsum[j] += res.abs();
            }
        }
        let u = colsum.iter().cloned().fold(0.0, f64::max);
        out[lay.u()] = u;
        for (j, cs) in colsum.iter().enumerate() {
            out[lay.sigma(j)] = u - cs;
        }
        for j in 0..lay.m {
            for i in (0..lay.l).filter(|&i| i != j) {
                out[lay.zeta(i, j)] = x.get(i, i) - x.get(i, j);
            }
        }
        for i in 0..lay.l {
            out[lay.tau(i)] = 1.0 - x.get(i, i);
        }
        out
    }

    /// Dual vector from the blocks of `D(L, M)`; inverse of the recovery
    /// mapping documented on [`PrimalLayout`].
    pub fn dual_vector(&self, blocks: &DualBlocks) -> Vec<f64> {
        let lay = &self.layout;
        let mut y = vec![0.0; lay.num_rows()];
        for j in 0..lay.m {
            for i in 0..lay.d {
                y[lay.row_b1(i, j)] = blocks.y.get(i, j);
            }
            y[lay.row_b2(j)] = -blocks.s[j];
            for i in (0..lay.l).filter(|&i| i != j) {
                y[lay.row_b4(i, j)] = -blocks.z.get(j, i);
            }
        }
        y[lay.row_b3()] = blocks.v;
        for i in 0..lay.l {
            y[lay.row_b5(i)] = -blocks.t[i];
        }
        y
    }

    /// Recovers `(Y, Z, s, t, v)` from an LP dual vector.
    pub fn dual_blocks(&self, y: &[f64]) -> DualBlocks {
        let lay = &self.layout;
        let yy = DenseMatrix::from_fn(lay.d, lay.m, |i, j| y[lay.row_b1(i, j)]);
        let z = DenseMatrix::from_fn(lay.m, lay.l, |j, i| {
            if i == j {
                0.0
            } else {
                -y[lay.row_b4(i, j)]
            }
        });
        DualBlocks {
            y: yy,
            z,
            s: (0..lay.m).map(|j| -y[lay.row_b2(j)]).collect(),
            t: (0..lay.l).map(|i| -y[lay.row_b5(i)]).collect(),
            v: y[lay.row_b3()],
        }
    }

    /// Dual objective `<A(M) Pi, Y> + r v - 1ᵀt`.
    pub fn dual_objective(&self, a: &DenseMatrix, blocks: &DualBlocks) -> f64 {
        let mut obj = 0.0;
        for (j, &col) in self.order.iter().enumerate() {
            obj += crate::linalg::dot(a.col(col), blocks.y.col(j));
        }
        obj + self.r as f64 * blocks.v - blocks.t.iter().sum::<f64>()
    }
}

/// Variables of `D(L, M)`: `Y` is `d x m`, `Z` is `m x l`, `s` has length
/// `m`, `t` has length `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBlocks {
    pub y: DenseMatrix,
    pub z: DenseMatrix,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub v: f64,
}
