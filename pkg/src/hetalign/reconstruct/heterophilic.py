from .similarity import cosine_similarity_rows
from ..common.default import DEFAULT_DENSE_LIMIT, DEFAULT_TOPK
from ..graph import Graph, Matrix, normalize_adjacency
from ..graph.graph import dense_rows, support_from_pairs, top_k_per_row

import numpy as np
import numpy.typing as npt


def heterophily_scores(
    g: Graph, rows: npt.NDArray, a_tilde: Matrix | None = None
) -> npt.NDArray:
    """Scores `H = (1 - S) * (1 - A_tilde)` of the given rows.

    Pairs that are far apart both in feature space (low cosine similarity) and in the topology
    (small normalized adjacency) score high.
    """
    if a_tilde is None:
        a_tilde = normalize_adjacency(g).a_tilde
    s_bar = 1.0 - cosine_similarity_rows(g.features, rows)
    a_bar = 1.0 - dense_rows(a_tilde, rows)
    return s_bar * a_bar


def select_heterophilic_pairs(
    g: Graph, topk: int = DEFAULT_TOPK, block: int = 1024
) -> tuple[npt.NDArray, npt.NDArray]:
    """Per-row selections of the heterophilic structure before symmetrization.

    Ties prefer non-neighbors, then the lower node index.
    """
    a_tilde = normalize_adjacency(g).a_tilde
    all_rows, all_cols = [], []
    for start in range(0, g.n, block):
        rows = np.arange(start, min(g.n, start + block))
        scores = heterophily_scores(g, rows, a_tilde)
        is_neighbor = (dense_rows(g.adjacency, rows) > 0).astype(np.int8)
        r, c = top_k_per_row(
            scores, topk, rows=rows, positive_only=False, secondary=is_neighbor
        )
        all_rows.append(r)
        all_cols.append(c)
    if not all_rows:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    return np.concatenate(all_rows), np.concatenate(all_cols)


def reconstruct_heterophilic(
    g: Graph, topk: int = DEFAULT_TOPK, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> Matrix:
    """Reconstruct the binary heterophilic structure `A_E` of a graph.

    Every node keeps its `topk` highest-scoring partners; the selections are symmetrized by
    union, so a node may end up with more than `topk` edges.
    """
    rows, cols = select_heterophilic_pairs(g, topk)
    return support_from_pairs(rows, cols, g.n, dense_limit)
