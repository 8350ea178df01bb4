import numpy as np
import numpy.typing as npt


def standardize_features(features: npt.ArrayLike) -> npt.NDArray:
    """Z-score each feature dimension. Constant dimensions are only centered."""
    x = np.asarray(features, dtype=np.float64)
    std = x.std(axis=0)
    std[std == 0] = 1.0
    return (x - x.mean(axis=0)) / std


def feature_distance_rows(features: npt.NDArray, rows: npt.NDArray) -> npt.NDArray:
    """Squared Euclidean distances from the given rows to all rows."""
    x = np.asarray(features, dtype=np.float64)
    sq = np.einsum("ij,ij->i", x, x)
    block = sq[rows][:, None] + sq[None, :] - 2.0 * (x[rows] @ x.T)
    np.maximum(block, 0.0, out=block)
    block[np.arange(len(rows)), rows] = 0.0
    return block


def feature_distance_matrix(features: npt.ArrayLike) -> npt.NDArray:
    """Pairwise squared Euclidean distance matrix `F_ij = ||x_i - x_j||^2`."""
    x = np.asarray(features, dtype=np.float64)
    f = feature_distance_rows(x, np.arange(x.shape[0]))
    return 0.5 * (f + f.T)


def cosine_similarity_rows(features: npt.NDArray, rows: npt.NDArray) -> npt.NDArray:
    """Cosine similarity from the given rows to all rows; zero-norm rows give 0."""
    x = np.asarray(features, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = x / safe[:, None]
    unit[norms == 0] = 0.0
    return np.clip(unit[rows] @ unit.T, -1.0, 1.0)


def cosine_similarity_matrix(features: npt.ArrayLike) -> npt.NDArray:
    """Pairwise cosine similarity `S_ij = <x_i, x_j> / (|x_i| |x_j|)`."""
    x = np.asarray(features, dtype=np.float64)
    s = cosine_similarity_rows(x, np.arange(x.shape[0]))
    return 0.5 * (s + s.T)
