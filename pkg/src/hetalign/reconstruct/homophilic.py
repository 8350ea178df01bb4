"""Homophilic structure reconstruction.

Each row `a = A[i, :]` of the homophilic structure minimizes, over the probability simplex with
`a_i = 0`,

    sum_j (2 + q_j) a_j^2 - u_j a_j,

where, for the estimate `M` of the previous outer iteration and its hop power `P = M^l`,

    q_j = sum_{f != i, j} M_jf^2,
    b_j = sum_{f != i, j} M_jf (P_if - M_ij M_jf - M_if),
    u_j = 2 P_ij - F_ij - 2 b_j.

The KKT conditions give `a_j = max(0, (u_j + lam) / (2 (2 + q_j)))` with the row multiplier
`lam` chosen so that the row sums to one. The row sum is piecewise linear and nondecreasing in
`lam`, so `lam` is bracketed by bisection and then computed exactly on the active set.
"""

from .similarity import feature_distance_rows, standardize_features
from ..common import logger
from ..common.default import DEFAULT_DENSE_LIMIT
from ..common.exception import ReconstructionError
from ..graph import Graph, Matrix
from ..graph.graph import dense_rows, right_multiply, row_sums, to_storage
from ..setup import HomophilicSolveConfig

import numpy as np
import numpy.typing as npt
import scipy.sparse as sp


def initial_estimate(adjacency: Matrix, dense_limit: int = DEFAULT_DENSE_LIMIT) -> Matrix:
    """Row-normalized adjacency. Isolated rows become uniform over the other nodes."""
    n = adjacency.shape[0]
    degree = row_sums(adjacency)
    isolated = degree <= 0
    if np.any(isolated):
        logger.warning(
            f"{int(isolated.sum())} isolated node(s) start from uniform homophilic rows."
        )
    if sp.issparse(adjacency) and n > dense_limit:
        scale = np.where(isolated, 0.0, 1.0 / np.where(isolated, 1.0, degree))
        m = sp.csr_matrix(sp.diags(scale) @ adjacency)
        if np.any(isolated) and n > 1:
            rows = np.flatnonzero(isolated)
            fill = sp.lil_matrix((n, n))
            for i in rows:
                fill[i, :] = 1.0 / (n - 1)
                fill[i, i] = 0.0
            m = sp.csr_matrix(m + fill.tocsr())
        return to_storage(m, dense_limit)

    a = np.asarray(adjacency.toarray() if sp.issparse(adjacency) else adjacency, dtype=np.float64)
    m = a / np.where(isolated, 1.0, degree)[:, None]
    if np.any(isolated) and n > 1:
        m[isolated] = 1.0 / (n - 1)
        idx = np.flatnonzero(isolated)
        m[idx, idx] = 0.0
    return m


def hop_power(estimate: Matrix, l: int) -> Matrix:
    """`l`-fold matrix power of the current estimate."""
    if sp.issparse(estimate):
        power = estimate
        for _ in range(l - 1):
            power = sp.csr_matrix(power @ estimate)
        return power
    return np.linalg.matrix_power(estimate, l)


def row_coefficients(
    rows: npt.NDArray,
    distance_rows: npt.NDArray,
    estimate: Matrix,
    power_rows: npt.NDArray,
) -> tuple[npt.NDArray, npt.NDArray]:
    """Linear and quadratic coefficients of the row problems of a block of rows.

    Args:
        rows: Global indices of the rows in the block.
        distance_rows: `F[rows]`.
        estimate: Previous estimate `M`, zero diagonal.
        power_rows: `P[rows]` with `P = M^l`.

    Returns:
        `(u, d)` such that the unconstrained stationary point of entry `j` is `(u_j + lam) / d_j`.
    """
    b = len(rows)
    local = np.arange(b)
    m_rows = dense_rows(estimate, rows)
    m_rows[local, rows] = 0.0

    if sp.issparse(estimate):
        squared_norms = np.asarray(estimate.multiply(estimate).sum(axis=1)).ravel()
        m_cols = np.asarray(estimate[:, rows].toarray()).T
        squared_norms -= np.asarray(estimate.diagonal()) ** 2
    else:
        squared_norms = np.einsum("ij,ij->i", estimate, estimate) - np.diagonal(estimate) ** 2
        m_cols = np.asarray(estimate[:, rows]).T
    # q[k, j] = sum_{f != i, j} M_jf^2 for i = rows[k].
    q = squared_norms[None, :] - m_cols**2

    power_off = power_rows.copy()
    power_off[local, rows] = 0.0
    coupled = right_multiply(power_off - m_rows, estimate.T)
    coupling = coupled - m_rows * q

    u = 2.0 * power_rows - distance_rows - 2.0 * coupling
    d = 2.0 * (2.0 + q)
    return u, d


def _bisect_multipliers(
    rows: npt.NDArray, u: npt.NDArray, d: npt.NDArray, cfg: HomophilicSolveConfig
) -> npt.NDArray:
    b, n = u.shape
    local = np.arange(b)
    valid = np.ones_like(u, dtype=bool)
    valid[local, rows] = False
    finite = np.all(np.isfinite(np.where(valid, u, 0.0)), axis=1) & np.all(
        np.isfinite(d), axis=1
    )
    if not np.all(finite):
        bad = int(np.argmin(finite))
        raise ReconstructionError(
            "Non-finite row coefficients", row=int(rows[bad]), residual=float("nan")
        )
    u = u.copy()
    u[local, rows] = -np.inf
    lo = -np.max(u, axis=1)
    hi = np.max(np.where(valid, d - u, -np.inf), axis=1)

    def row_sum(lam: npt.NDArray) -> npt.NDArray:
        return np.sum(np.maximum(0.0, (u + lam[:, None]) / d), axis=1)

    lam = 0.5 * (lo + hi)
    total = row_sum(lam)
    for _ in range(cfg.bisection_max_steps):
        done = np.abs(total - 1.0) <= cfg.bisection_tol
        if np.all(done):
            break
        above = total > 1.0
        hi = np.where(above & ~done, lam, hi)
        lo = np.where(~above & ~done, lam, lo)
        lam = np.where(done, lam, 0.5 * (lo + hi))
        total = row_sum(lam)

    residual = np.abs(total - 1.0)
    if np.any(~(residual <= cfg.bisection_tol)):
        worst = int(np.nanargmax(np.where(np.isnan(residual), np.inf, residual)))
        raise ReconstructionError(
            "Multiplier bisection did not converge; standardize the features",
            row=int(rows[worst]),
            residual=float(residual[worst]),
        )

    # Exact multiplier on the active set found by bisection.
    active = (u + lam[:, None]) > 0
    inv_d = np.where(active, 1.0 / d, 0.0)
    exact = (1.0 - np.sum(np.where(active, u, 0.0) * inv_d, axis=1)) / np.sum(inv_d, axis=1)
    return exact


def solve_rows(
    rows: npt.NDArray,
    distance_rows: npt.NDArray,
    estimate: Matrix,
    power_rows: npt.NDArray,
    cfg: HomophilicSolveConfig,
) -> npt.NDArray:
    """Solve the row problems of a block of rows. Returns the dense `b x n` block."""
    rows = np.asarray(rows, dtype=np.int64)
    u, d = row_coefficients(rows, distance_rows, estimate, power_rows)
    lam = _bisect_multipliers(rows, u, d, cfg)
    out = np.maximum(0.0, (u + lam[:, None]) / d)
    out[np.arange(len(rows)), rows] = 0.0
    out /= out.sum(axis=1, keepdims=True)
    return out


def solve_row(
    i: int,
    distances: npt.NDArray,
    estimate: Matrix,
    estimate_power: Matrix,
    cfg: HomophilicSolveConfig | None = None,
) -> npt.NDArray:
    """Solve the homophilic problem of row `i` with the previous estimate held fixed.

    Args:
        i: Row index.
        distances: `n x n` feature distance matrix `F`.
        estimate: Previous estimate `M`.
        estimate_power: `M^l`.
        cfg: Solver settings.

    Returns:
        (npt.NDArray): Nonnegative length-`n` row summing to 1 with a zero at position `i`.
    """
    cfg = cfg or HomophilicSolveConfig()
    rows = np.array([i], dtype=np.int64)
    distance_rows = np.asarray(distances, dtype=np.float64)[rows]
    power_rows = dense_rows(estimate_power, rows)
    return solve_rows(rows, distance_rows, estimate, power_rows, cfg)[0]


def row_objective(
    row: npt.ArrayLike,
    i: int,
    distances: npt.NDArray,
    estimate: Matrix,
    estimate_power: Matrix,
) -> float:
    """Row objective with the previous estimate frozen.

    Without coupling terms this is `sum_j a_j F_ij + a_j^2 + (P_ij - a_j)^2` over `j != i`.
    """
    a = np.asarray(row, dtype=np.float64)
    rows = np.array([i], dtype=np.int64)
    power_rows = dense_rows(estimate_power, rows)
    u, d = row_coefficients(
        rows, np.asarray(distances, dtype=np.float64)[rows], estimate, power_rows
    )
    mask = np.ones(len(a), dtype=bool)
    mask[i] = False
    p = power_rows[0]
    value = np.sum((0.5 * d[0] * a**2 - u[0] * a + p**2)[mask])
    return float(value)


def reconstruct_homophilic(
    g: Graph,
    cfg: HomophilicSolveConfig | None = None,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> Matrix:
    """Reconstruct the homophilic structure `A_O` of a graph.

    Starting from the row-normalized adjacency, each outer iteration recomputes `M^l` and then
    solves every row against the frozen estimate.

    Args:
        g: Input graph.
        cfg: Solver settings.
        dense_limit: Largest node count stored densely.

    Returns:
        Row-stochastic matrix with zero diagonal.
    """
    cfg = cfg or HomophilicSolveConfig()
    cfg.validate()
    n = g.n
    features = standardize_features(g.features) if cfg.standardize else g.features
    estimate = initial_estimate(g.adjacency, dense_limit)
    if n < 2:
        return estimate

    for iteration in range(cfg.outer_iters):
        power = hop_power(estimate, cfg.l)
        blocks = []
        for start in range(0, n, cfg.row_block):
            rows = np.arange(start, min(n, start + cfg.row_block))
            try:
                block = solve_rows(
                    rows,
                    feature_distance_rows(features, rows),
                    estimate,
                    dense_rows(power, rows),
                    cfg,
                )
            except ReconstructionError as e:
                e.add_note(f"outer iteration {iteration}")
                raise
            blocks.append(block if n <= dense_limit else sp.csr_matrix(block))
        if n <= dense_limit:
            updated = np.vstack(blocks)
        else:
            updated = to_storage(sp.vstack(blocks), dense_limit)

        change = updated - estimate
        delta = float(abs(change).max()) if sp.issparse(change) else float(np.max(np.abs(change)))
        logger.debug(f"Homophilic iteration {iteration}: max entry change {delta:.3e}")
        estimate = updated

    return estimate
