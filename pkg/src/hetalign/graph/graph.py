from ..common.default import DEFAULT_DENSE_LIMIT
from ..common.exception import InvalidGraph

from dataclasses import dataclass, field
from typing import TypeAlias
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

Matrix: TypeAlias = npt.NDArray | sp.csr_matrix
"""Type alias for adjacency-like matrices.

* A dense `numpy` array is used for graphs with at most `DEFAULT_DENSE_LIMIT` nodes.
* A `scipy.sparse.csr_matrix` with sorted indices is used above that limit.
"""


def to_storage(matrix, dense_limit: int = DEFAULT_DENSE_LIMIT) -> Matrix:
    """Convert a square matrix to the storage used for its size.

    Args:
        matrix: A dense array or any scipy sparse matrix.
        dense_limit: Largest node count stored densely.

    Returns:
        A float64 dense array if `n <= dense_limit`, otherwise a csr matrix with sorted indices.
    """
    if not sp.issparse(matrix):
        matrix = np.asarray(matrix, dtype=np.float64)
    n = matrix.shape[0]
    if n <= dense_limit:
        if sp.issparse(matrix):
            return np.asarray(matrix.toarray(), dtype=np.float64)
        return matrix
    out = sp.csr_matrix(matrix, dtype=np.float64)
    out.eliminate_zeros()
    out.sort_indices()
    return out


def as_dense(matrix: Matrix) -> npt.NDArray:
    if sp.issparse(matrix):
        return np.asarray(matrix.toarray(), dtype=np.float64)
    return np.asarray(matrix, dtype=np.float64)


def dense_rows(matrix: Matrix, rows: npt.NDArray) -> npt.NDArray:
    """Extract the given rows of a matrix as a dense array."""
    if sp.issparse(matrix):
        return np.asarray(matrix[rows].toarray(), dtype=np.float64)
    return np.asarray(matrix[rows], dtype=np.float64)


def right_multiply(block: npt.NDArray, matrix: Matrix) -> npt.NDArray:
    """Compute `block @ matrix` for a dense block and a dense or sparse matrix."""
    if sp.issparse(matrix):
        return np.asarray((matrix.T @ block.T).T)
    return block @ matrix


def row_sums(matrix: Matrix) -> npt.NDArray:
    return np.asarray(matrix.sum(axis=1), dtype=np.float64).ravel()


def diagonal(matrix: Matrix) -> npt.NDArray:
    if sp.issparse(matrix):
        return np.asarray(matrix.diagonal(), dtype=np.float64)
    return np.diagonal(matrix).astype(np.float64)


def max_asymmetry(matrix: Matrix) -> float:
    diff = matrix - matrix.T
    if sp.issparse(diff):
        return float(abs(diff).max()) if diff.nnz > 0 else 0.0
    return float(np.max(np.abs(diff))) if diff.size > 0 else 0.0


def symmetric_part(matrix: Matrix) -> Matrix:
    """Return `(M + M^T) / 2`."""
    out = (matrix + matrix.T) * 0.5
    if sp.issparse(out):
        return sp.csr_matrix(out)
    return out


@dataclass(frozen=True, slots=True)
class Graph:
    """An undirected attributed graph, optionally labeled.

    Attributes:
        adjacency: `n x n` nonnegative symmetric matrix with zero diagonal.
        features: `n x d` real feature matrix.
        labels: Optional length-`n` integer class ids in `[0, num_classes)`.
        names: Optional node identifiers.
        num_classes: Number of classes. Inferred from `labels` when omitted.

    Instances are immutable; all operations return new objects.
    """

    adjacency: Matrix
    features: npt.NDArray
    labels: npt.NDArray | None = None
    names: list[str] | None = None
    num_classes: int | None = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2:
            raise InvalidGraph(f"Features must be 2D, got shape {features.shape}.")
        n = features.shape[0]
        object.__setattr__(self, "features", features)

        adjacency = to_storage(self.adjacency)
        if adjacency.shape != (n, n):
            raise InvalidGraph(
                f"Adjacency shape {adjacency.shape} does not match {n} feature rows."
            )
        object.__setattr__(self, "adjacency", adjacency)

        if not np.all(np.isfinite(features)):
            raise InvalidGraph("Features contain NaN or Inf entries.")
        if max_asymmetry(adjacency) > 1e-9:
            raise InvalidGraph("Adjacency matrix is not symmetric.")
        if np.any(diagonal(adjacency) != 0):
            raise InvalidGraph("Adjacency matrix has nonzero diagonal entries.")

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (n,):
                raise InvalidGraph(
                    f"Expected {n} labels, got array of shape {labels.shape}."
                )
            if not np.issubdtype(labels.dtype, np.integer):
                if not np.all(np.equal(np.mod(labels, 1), 0)):
                    raise InvalidGraph("Labels must be integers.")
            labels = labels.astype(np.int64)
            if n > 0 and labels.min() < 0:
                raise InvalidGraph("Labels must be nonnegative.")
            num_classes = self.num_classes
            if num_classes is None:
                num_classes = int(labels.max()) + 1 if n > 0 else 0
            if n > 0 and labels.max() >= num_classes:
                raise InvalidGraph(
                    f"Label {int(labels.max())} out of range for {num_classes} classes."
                )
            object.__setattr__(self, "labels", labels)
            object.__setattr__(self, "num_classes", int(num_classes))

        if self.names is not None and len(self.names) != n:
            raise InvalidGraph(f"Expected {n} node names, got {len(self.names)}.")

    @property
    def n(self) -> int:
        """Number of nodes."""
        return self.features.shape[0]

    @property
    def num_features(self) -> int:
        return self.features.shape[1]

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        if sp.issparse(self.adjacency):
            return int(sp.triu(self.adjacency, k=1).count_nonzero())
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.adjacency)

    def degrees(self) -> npt.NDArray:
        """Weighted degree of each node."""
        return row_sums(self.adjacency)

    def neighbors(self, v: int) -> npt.NDArray:
        """Indices of the nodes adjacent to `v`."""
        row = dense_rows(self.adjacency, np.array([v]))[0]
        row[v] = 0
        return np.flatnonzero(row > 0)

    def require_labels(self) -> npt.NDArray:
        if self.labels is None:
            raise InvalidGraph("Operation requires node labels.")
        return self.labels

    def permute(self, perm: npt.ArrayLike) -> "Graph":
        """Relabel nodes so that new node `i` is old node `perm[i]`."""
        perm = np.asarray(perm, dtype=np.int64)
        if sp.issparse(self.adjacency):
            adjacency = self.adjacency[perm][:, perm]
        else:
            adjacency = self.adjacency[np.ix_(perm, perm)]
        return Graph(
            adjacency=adjacency,
            features=self.features[perm],
            labels=None if self.labels is None else self.labels[perm],
            names=None if self.names is None else [self.names[i] for i in perm],
            num_classes=self.num_classes,
        )

    def with_features(self, features: npt.NDArray) -> "Graph":
        return Graph(
            adjacency=self.adjacency,
            features=features,
            labels=self.labels,
            names=self.names,
            num_classes=self.num_classes,
        )

    def with_adjacency(self, adjacency: Matrix) -> "Graph":
        return Graph(
            adjacency=adjacency,
            features=self.features,
            labels=self.labels,
            names=self.names,
            num_classes=self.num_classes,
        )


@dataclass(frozen=True, slots=True)
class NormalizedGraph:
    """Self-loop normalized adjacency and its Laplacian.

    Attributes:
        a_tilde: `(D+I)^{-1/2} (A+I) (D+I)^{-1/2}`.
        l_tilde: `I - a_tilde`.
    """

    a_tilde: Matrix
    l_tilde: Matrix


def normalize_matrix(adjacency: Matrix) -> Matrix:
    """Symmetric self-loop normalization of a nonnegative square matrix."""
    if sp.issparse(adjacency):
        if adjacency.nnz > 0 and adjacency.data.min() < 0:
            raise InvalidGraph("Adjacency matrix has negative entries.")
    elif adjacency.size > 0 and np.min(adjacency) < 0:
        raise InvalidGraph("Adjacency matrix has negative entries.")

    n = adjacency.shape[0]
    scale = 1.0 / np.sqrt(row_sums(adjacency) + 1.0)
    if sp.issparse(adjacency):
        d = sp.diags(scale)
        a_tilde = sp.csr_matrix(d @ (adjacency + sp.eye(n, format="csr")) @ d)
        a_tilde.sort_indices()
        return a_tilde
    return scale[:, None] * (adjacency + np.eye(n)) * scale[None, :]


def normalize_adjacency(g: Graph | Matrix) -> NormalizedGraph:
    """Compute the self-loop normalized adjacency and Laplacian of a graph.

    Args:
        g: A graph, or a raw nonnegative adjacency matrix.

    Returns:
        (NormalizedGraph): `a_tilde` and `l_tilde = I - a_tilde`.
    """
    adjacency = g.adjacency if isinstance(g, Graph) else g
    a_tilde = normalize_matrix(adjacency)
    n = a_tilde.shape[0]
    if sp.issparse(a_tilde):
        l_tilde = sp.csr_matrix(sp.eye(n, format="csr") - a_tilde)
    else:
        l_tilde = np.eye(n) - a_tilde
    return NormalizedGraph(a_tilde=a_tilde, l_tilde=l_tilde)


def low_pass_baseline(g: Graph, features: npt.NDArray, k: int) -> npt.NDArray:
    """Plain low-pass filter `(I - L/2)^k X` on the raw normalized graph.

    Only used as a reference; the pipeline filters the reconstructed structures instead.
    """
    a_tilde = normalize_adjacency(g).a_tilde
    z = np.asarray(features, dtype=np.float64)
    for _ in range(k):
        z = 0.5 * (z + a_tilde @ z)
    return np.asarray(z)


def top_k_per_row(
    scores: npt.NDArray,
    k: int,
    *,
    rows: npt.NDArray | None = None,
    positive_only: bool = True,
    secondary: npt.NDArray | None = None,
) -> tuple[npt.NDArray, npt.NDArray]:
    """Select the `k` largest off-diagonal entries of each row of a dense score block.

    Ties break toward a smaller `secondary` key (when given) and then toward the lower column index.

    Args:
        scores: `b x n` dense scores.
        k: Entries kept per row.
        rows: Global row index of each block row, used to exclude the diagonal. Defaults to
            `0..b-1`.
        positive_only: Drop selected entries whose score is not positive.
        secondary: Optional `b x n` tie-break key, smaller preferred.

    Returns:
        Row and column indices of the selected entries.
    """
    b, n = scores.shape
    if rows is None:
        rows = np.arange(b)
    if k <= 0 or n <= 1:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)

    primary = -np.asarray(scores, dtype=np.float64).copy()
    primary[np.arange(b), rows] = np.inf
    keys = [np.broadcast_to(np.arange(n), (b, n))]
    if secondary is not None:
        keys.append(secondary)
    keys.append(primary)
    order = np.lexsort(keys, axis=-1)[:, : min(k, n - 1)]

    out_rows = np.repeat(rows, order.shape[1])
    out_cols = order.ravel()
    if positive_only:
        keep = scores[np.repeat(np.arange(b), order.shape[1]), out_cols] > 0
        out_rows, out_cols = out_rows[keep], out_cols[keep]
    return out_rows.astype(np.int64), out_cols.astype(np.int64)


def support_from_pairs(
    rows: npt.NDArray, cols: npt.NDArray, n: int, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> Matrix:
    """Binary symmetric matrix from directed pairs, symmetrized by union."""
    m = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
    m = m.maximum(m.T)
    m.data[:] = 1.0
    return to_storage(m, dense_limit)


def top_k_support(
    matrix: Matrix, k: int, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> Matrix:
    """Binary support of the `k` largest positive off-diagonal entries per row.

    The result is symmetrized by union.
    """
    n = matrix.shape[0]
    all_rows, all_cols = [], []
    block = 1024
    for start in range(0, n, block):
        rows = np.arange(start, min(n, start + block))
        r, c = top_k_per_row(dense_rows(matrix, rows), k, rows=rows)
        all_rows.append(r)
        all_cols.append(c)
    rows = np.concatenate(all_rows) if all_rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(all_cols) if all_cols else np.zeros(0, dtype=np.int64)
    return support_from_pairs(rows, cols, n, dense_limit)
