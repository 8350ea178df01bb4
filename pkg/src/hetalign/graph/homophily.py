from .graph import Graph, Matrix, dense_rows
from ..common.exception import InvalidGraph, InvalidSetting

from typing import Literal
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

HomophilyKind = Literal["edge", "node", "hop"]


def _binary(matrix: Matrix) -> sp.csr_matrix:
    support = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
    support.data = (support.data > 0).astype(np.float64)
    support.eliminate_zeros()
    return support


def _walk_support(matrix: Matrix, l: int) -> sp.csr_matrix:
    """Support of the `l`-th power of a nonnegative matrix."""
    base = _binary(matrix)
    power = base
    for _ in range(l - 1):
        power = _binary(power @ base)
    return power


def hop_homophily_matrix(matrix: Matrix, labels: npt.ArrayLike, l: int = 1) -> float:
    """Label agreement over node pairs joined by a positive entry of `matrix^l`.

    Diagonal entries (closed walks) are not counted.

    Args:
        matrix: A nonnegative `n x n` matrix, e.g. a raw or reconstructed adjacency.
        labels: Length-`n` class ids.
        l: Hop count, at least 1.

    Returns:
        (float): The fraction of qualifying pairs `(i, j)` with `y_i == y_j`.
    """
    if l < 1:
        raise InvalidSetting(f"Hop count must be at least 1, got {l}.")
    labels = np.asarray(labels)
    coo = _walk_support(matrix, l).tocoo()
    off_diagonal = coo.row != coo.col
    rows, cols = coo.row[off_diagonal], coo.col[off_diagonal]
    if len(rows) == 0:
        raise InvalidGraph(f"No off-diagonal positive entries in A^{l}.")
    return float(np.mean(labels[rows] == labels[cols]))


def hop_homophily(g: Graph, l: int = 1) -> float:
    """Hop homophily `H^(l)` of a labeled graph."""
    return hop_homophily_matrix(g.adjacency, g.require_labels(), l)


def local_node_homophily(g: Graph, v: int) -> float:
    """Fraction of the neighbors of `v` that share its label."""
    labels = g.require_labels()
    neighbors = g.neighbors(v)
    if len(neighbors) == 0:
        raise InvalidGraph(f"Local homophily is undefined for isolated node {v}.")
    return float(np.mean(labels[neighbors] == labels[v]))


def node_homophily_values(g: Graph) -> npt.NDArray:
    """Local homophily of every node, NaN for isolated nodes."""
    labels = g.require_labels()
    coo = _binary(g.adjacency).tocoo()
    keep = coo.row != coo.col
    rows, cols = coo.row[keep], coo.col[keep]
    degree = np.bincount(rows, minlength=g.n).astype(np.float64)
    same = np.bincount(
        rows, weights=(labels[rows] == labels[cols]).astype(np.float64), minlength=g.n
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(degree > 0, same / degree, np.nan)


def node_homophily(g: Graph) -> float:
    """Mean local homophily over the non-isolated nodes."""
    values = node_homophily_values(g)
    values = values[~np.isnan(values)]
    if len(values) == 0:
        raise InvalidGraph("Node homophily is undefined for a graph without edges.")
    return float(np.mean(values))


def edge_homophily(g: Graph) -> float:
    """Fraction of undirected edges whose endpoints share a label."""
    labels = g.require_labels()
    upper = sp.triu(_binary(g.adjacency), k=1).tocoo()
    if upper.nnz == 0:
        raise InvalidGraph("Edge homophily is undefined for a graph without edges.")
    return float(np.mean(labels[upper.row] == labels[upper.col]))


def homophily_ratio(g: Graph, kind: HomophilyKind = "edge", l: int = 1) -> float:
    """Graph-level homophily of the requested kind.

    Args:
        g: A labeled graph.
        kind: `"edge"`, `"node"` (mean local homophily) or `"hop"` (`H^(l)`).
        l: Hop count, only used by `"hop"`.
    """
    match kind:
        case "edge":
            return edge_homophily(g)
        case "node":
            return node_homophily(g)
        case "hop":
            return hop_homophily(g, l)
        case _:
            raise InvalidSetting(f"Unknown homophily kind: {kind}")


def row_label_mass(matrix: Matrix, labels: npt.ArrayLike) -> npt.NDArray:
    """Per-row share of weight placed on nodes with the row's own label."""
    labels = np.asarray(labels)
    n = matrix.shape[0]
    out = np.zeros(n)
    block = 1024
    for start in range(0, n, block):
        rows = np.arange(start, min(n, start + block))
        weights = dense_rows(matrix, rows)
        weights[np.arange(len(rows)), rows] = 0
        same = labels[None, :] == labels[rows][:, None]
        total = weights.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            out[rows] = np.where(total > 0, (weights * same).sum(axis=1) / total, np.nan)
    return out
