from ..common.default import DEFAULT_TOPK
from ..common.exception import InvalidGraph
from ..filters import structure_laplacian
from ..graph import Graph, Matrix, as_dense, hop_homophily_matrix, top_k_support
from ..reconstruct import ReconstructedStructures

from dataclasses import dataclass
import numpy as np
import scipy.linalg


def laplacian_gap(l_source: Matrix, l_target: Matrix) -> float:
    """Spectral gap between two symmetric Laplacians.

    Equal sizes give the spectral norm of the difference. Different sizes give the Euclidean
    distance between the sorted spectra, the shorter one padded with zeros.
    """
    ls = as_dense(l_source)
    lt = as_dense(l_target)
    if ls.shape == lt.shape:
        if ls.size == 0:
            return 0.0
        return float(np.max(np.abs(scipy.linalg.eigvalsh(ls - lt))))
    es = np.sort(scipy.linalg.eigvalsh(ls))
    et = np.sort(scipy.linalg.eigvalsh(lt))
    size = max(len(es), len(et))
    es = np.pad(es, (0, size - len(es)))
    et = np.pad(et, (0, size - len(et)))
    return float(np.linalg.norm(es - et))


def structural_difference(
    source: ReconstructedStructures, target: ReconstructedStructures
) -> float:
    """Sum of the Laplacian gaps of the homophilic and of the heterophilic structures."""
    return laplacian_gap(
        structure_laplacian(source.a_o), structure_laplacian(target.a_o)
    ) + laplacian_gap(structure_laplacian(source.a_e), structure_laplacian(target.a_e))


@dataclass(frozen=True, slots=True)
class HomophilyRow:
    """One entry of a homophily report.

    Attributes:
        structure: `original`, `a_o` or `a_e`.
        l: Hop count.
        ratio: `H^(l)`, or `None` when no pair qualifies.
    """

    structure: str
    l: int
    ratio: float | None


def _safe_ratio(matrix: Matrix, labels: np.ndarray, l: int) -> float | None:
    try:
        return hop_homophily_matrix(matrix, labels, l)
    except InvalidGraph:
        return None


def homophily_report(
    g: Graph,
    structures: ReconstructedStructures | None = None,
    max_hop: int = 1,
    topk: int = DEFAULT_TOPK,
) -> list[HomophilyRow]:
    """Hop homophily of the original graph and of its reconstructed structures.

    The homophilic structure is thresholded to its `topk` largest entries per row before
    measuring, the heterophilic one is already binary.
    """
    labels = g.require_labels()
    candidates: list[tuple[str, Matrix]] = [("original", g.adjacency)]
    if structures is not None:
        candidates.append(("a_o", top_k_support(structures.a_o, topk)))
        candidates.append(("a_e", structures.a_e))
    return [
        HomophilyRow(structure=name, l=l, ratio=_safe_ratio(matrix, labels, l))
        for name, matrix in candidates
        for l in range(1, max_hop + 1)
    ]


def format_report(rows: list[HomophilyRow]) -> str:
    lines = [f"{'structure':<10} {'l':>3} {'ratio':>8}"]
    for row in rows:
        ratio = "n/a" if row.ratio is None else f"{row.ratio:.4f}"
        lines.append(f"{row.structure:<10} {row.l:>3} {ratio:>8}")
    return "\n".join(lines)
