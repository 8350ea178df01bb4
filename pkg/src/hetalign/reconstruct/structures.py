from .heterophilic import reconstruct_heterophilic
from .homophilic import reconstruct_homophilic
from ..common import logger
from ..common.default import DEFAULT_DENSE_LIMIT, DEFAULT_TOPK
from ..common.exception import InvalidGraph
from ..graph import Graph, Matrix, to_storage
from ..graph.graph import diagonal, row_sums
from ..setup import HomophilicSolveConfig

from dataclasses import dataclass
import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, slots=True)
class ReconstructedStructures:
    """Homophilic and heterophilic structures of one graph.

    Attributes:
        a_o: Row-stochastic homophilic adjacency with zero diagonal.
        a_e: Binary symmetric heterophilic adjacency with zero diagonal.
    """

    a_o: Matrix
    a_e: Matrix

    @property
    def n(self) -> int:
        return self.a_o.shape[0]

    def validate(self, *, row_stochastic: bool = True):
        """Check the structure invariants, raising `InvalidGraph` on violation."""
        if self.a_o.shape != self.a_e.shape:
            raise InvalidGraph("Homophilic and heterophilic structures differ in size.")
        for name, m in (("a_o", self.a_o), ("a_e", self.a_e)):
            if np.any(diagonal(m) != 0):
                raise InvalidGraph(f"{name} has a nonzero diagonal.")
            values = m.data if sp.issparse(m) else m
            if np.size(values) > 0 and np.min(values) < 0:
                raise InvalidGraph(f"{name} has negative entries.")
        if row_stochastic and self.n > 1:
            sums = row_sums(self.a_o)
            if np.max(np.abs(sums - 1.0)) > 1e-6:
                raise InvalidGraph("a_o is not row-stochastic.")


def reconstruct_structures(
    g: Graph,
    cfg: HomophilicSolveConfig | None = None,
    topk: int = DEFAULT_TOPK,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> ReconstructedStructures:
    """Build both reconstructed structures of a graph."""
    a_o = reconstruct_homophilic(g, cfg, dense_limit)
    a_e = reconstruct_heterophilic(g, topk, dense_limit)
    structures = ReconstructedStructures(a_o=a_o, a_e=a_e)
    structures.validate()
    return structures


def _row_normalize(m: sp.csr_matrix) -> sp.csr_matrix:
    sums = row_sums(m)
    scale = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), 0.0)
    return sp.csr_matrix(sp.diags(scale) @ m)


def random_split_structures(
    g: Graph, rng: np.random.Generator, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> ReconstructedStructures:
    """Split the edge set of `g` at random into two row-normalized structures.

    Each undirected edge is assigned to one of the two halves with probability 1/2. Rows left
    without edges stay zero.
    """
    upper = sp.triu(sp.csr_matrix(g.adjacency), k=1).tocoo()
    side = rng.random(upper.nnz) < 0.5
    halves = []
    for keep in (side, ~side):
        part = sp.coo_matrix(
            (np.ones(int(keep.sum())), (upper.row[keep], upper.col[keep])),
            shape=(g.n, g.n),
        ).tocsr()
        part = part + part.T
        halves.append(to_storage(_row_normalize(part), dense_limit))
    logger.debug(
        f"Random split: {int(side.sum())} / {int((~side).sum())} edges per structure"
    )
    return ReconstructedStructures(a_o=halves[0], a_e=halves[1])


def original_structures(
    g: Graph, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> ReconstructedStructures:
    """The input graph as the homophilic structure and no heterophilic edges.

    Without reconstruction the low-pass filter smooths over the original edges and the
    high-pass output vanishes for any positive order.
    """
    a_o = to_storage(_row_normalize(sp.csr_matrix(g.adjacency, dtype=np.float64)), dense_limit)
    a_e = to_storage(sp.csr_matrix((g.n, g.n)), dense_limit)
    return ReconstructedStructures(a_o=a_o, a_e=a_e)
