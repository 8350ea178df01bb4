from ..graph import Matrix, normalize_matrix
from ..graph.graph import symmetric_part
from ..reconstruct import ReconstructedStructures
from ..setup import FilterConfig

from dataclasses import dataclass
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp


def normalize_structure(matrix: Matrix) -> Matrix:
    """Symmetrize a structure and normalize it with self-loops, `(D+I)^-1/2 (M+I) (D+I)^-1/2`."""
    return normalize_matrix(symmetric_part(matrix))


def structure_laplacian(matrix: Matrix) -> Matrix:
    """Normalized Laplacian `I - normalize_structure(matrix)`."""
    a = normalize_structure(matrix)
    n = a.shape[0]
    if sp.issparse(a):
        return sp.csr_matrix(sp.eye(n, format="csr") - a)
    return np.eye(n) - a


def low_pass_power(a_o: Matrix, features: npt.ArrayLike, k: int) -> npt.NDArray:
    """`(I - L_O / 2)^k X` by repeated products, without the `(1 - gamma)` factor."""
    a = normalize_structure(a_o)
    z = np.asarray(features, dtype=np.float64)
    for _ in range(k):
        z = 0.5 * (z + np.asarray(a @ z))
    return z


def high_pass_power(a_e: Matrix, features: npt.ArrayLike, k: int) -> npt.NDArray:
    """`(L_E / 2)^k X` by repeated products, without the `gamma` factor."""
    a = normalize_structure(a_e)
    z = np.asarray(features, dtype=np.float64)
    for _ in range(k):
        z = 0.5 * (z - np.asarray(a @ z))
    return z


def low_pass(a_o: Matrix, features: npt.ArrayLike, cfg: FilterConfig) -> npt.NDArray:
    """Low-pass filter `Z_O = (1 - gamma) (I - L_O / 2)^k X`."""
    return (1.0 - cfg.gamma) * low_pass_power(a_o, features, cfg.k)


def high_pass(a_e: Matrix, features: npt.ArrayLike, cfg: FilterConfig) -> npt.NDArray:
    """High-pass filter `Z_E = gamma (L_E / 2)^k X`."""
    return cfg.gamma * high_pass_power(a_e, features, cfg.k)


def filter_pair(
    structures: ReconstructedStructures, features: npt.ArrayLike, cfg: FilterConfig
) -> tuple[npt.NDArray, npt.NDArray]:
    """Apply both filters with a shared `gamma`. Returns `(Z_E, Z_O)`."""
    cfg.validate()
    return (
        high_pass(structures.a_e, features, cfg),
        low_pass(structures.a_o, features, cfg),
    )


@dataclass(frozen=True, slots=True)
class FilterCache:
    """Unscaled filter outputs of one graph.

    Only `gamma` changes during training, so the `k`-th powers are computed once.

    Attributes:
        high: `(L_E / 2)^k X`.
        low: `(I - L_O / 2)^k X`.
        k: Filter order used.
    """

    high: npt.NDArray
    low: npt.NDArray
    k: int

    @classmethod
    def build(
        cls, structures: ReconstructedStructures, features: npt.ArrayLike, k: int
    ) -> "FilterCache":
        return cls(
            high=high_pass_power(structures.a_e, features, k),
            low=low_pass_power(structures.a_o, features, k),
            k=k,
        )

    def scaled(self, gamma: float) -> tuple[npt.NDArray, npt.NDArray]:
        return gamma * self.high, (1.0 - gamma) * self.low
