from ..common import logger
from ..common.default import DEFAULT_DENSE_LIMIT
from ..common.exception import DataError
from ..graph import Graph, Matrix, edge_homophily, node_homophily, to_storage
from ..graph.graph import symmetric_part

from dataclasses import dataclass
from pathlib import Path
import json
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp

HOMOPHILY_TOLERANCE = 0.05


@dataclass(frozen=True, slots=True)
class DeclaredStats:
    """Published statistics of a dataset.

    Attributes:
        n: Number of nodes.
        edges: Number of undirected edges.
        homophily: Homophily ratio; matched within `HOMOPHILY_TOLERANCE`.
        classes: Number of classes.
    """

    n: int
    edges: int
    homophily: float
    classes: int


DECLARED_STATS: dict[str, DeclaredStats] = {
    "USA": DeclaredStats(n=1190, edges=13599, homophily=0.6978, classes=4),
    "Brazil": DeclaredStats(n=131, edges=1038, homophily=0.4683, classes=4),
    "Europe": DeclaredStats(n=399, edges=5995, homophily=0.4048, classes=4),
    "ACMv9": DeclaredStats(n=9360, edges=15556, homophily=0.7798, classes=5),
    "Citationv1": DeclaredStats(n=8935, edges=15098, homophily=0.8598, classes=5),
    "DBLPv7": DeclaredStats(n=5484, edges=8117, homophily=0.8198, classes=5),
    "ACM3": DeclaredStats(n=3025, edges=2221699, homophily=0.1034, classes=3),
    "ACM4": DeclaredStats(n=4019, edges=57853, homophily=0.8391, classes=3),
    "Blog1": DeclaredStats(n=2300, edges=33471, homophily=0.3991, classes=6),
    "Blog2": DeclaredStats(n=2896, edges=53836, homophily=0.4002, classes=6),
    "Texas": DeclaredStats(n=183, edges=325, homophily=0.0614, classes=5),
    "Cornell": DeclaredStats(n=183, edges=298, homophily=0.1220, classes=5),
    "Wisconsin": DeclaredStats(n=251, edges=515, homophily=0.1703, classes=5),
}
"""Statistics of the public benchmark graphs, keyed by dataset name."""


@dataclass(frozen=True, slots=True)
class DatasetBundle:
    """A loaded graph with its name and optional declared statistics."""

    graph: Graph
    name: str = ""
    declared_stats: DeclaredStats | None = None


def _read_lines(path: Path) -> list[str]:
    try:
        return Path(path).read_text().splitlines()
    except OSError as e:
        raise DataError(f"Cannot read file: {e.strerror}", path=str(path)) from e


def read_edge_list(path: str | Path) -> tuple[npt.NDArray, npt.NDArray, npt.NDArray]:
    """Read `i j [w]` lines. Blank lines and `#` comments are skipped.

    Returns:
        Source ids, destination ids and weights (1 when the column is absent).
    """
    rows, cols, weights = [], [], []
    for number, line in enumerate(_read_lines(Path(path)), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if len(tokens) not in (2, 3):
            raise DataError(
                f"Expected 2 or 3 columns, got {len(tokens)}", path=str(path), line=number
            )
        try:
            i, j = int(tokens[0]), int(tokens[1])
            w = float(tokens[2]) if len(tokens) == 3 else 1.0
        except ValueError as e:
            raise DataError(f"Cannot parse edge '{text}'", path=str(path), line=number) from e
        if i < 0 or j < 0:
            raise DataError("Negative node id", path=str(path), line=number)
        if not np.isfinite(w) or w < 0:
            raise DataError("Edge weight must be finite and nonnegative", path=str(path), line=number)
        rows.append(i)
        cols.append(j)
        weights.append(w)
    return (
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(weights, dtype=np.float64),
    )


def build_adjacency(
    rows: npt.NDArray, cols: npt.NDArray, weights: npt.NDArray, n: int
) -> Matrix:
    """Symmetric adjacency from directed pairs.

    Self-loops are dropped, duplicate pairs (in either direction) keep their largest weight.
    """
    if len(rows) > 0 and max(rows.max(), cols.max()) >= n:
        raise DataError(
            f"Edge references node {int(max(rows.max(), cols.max()))} but only {n} nodes exist."
        )
    loops = rows == cols
    if np.any(loops):
        logger.warning(f"Dropped {int(loops.sum())} self-loop(s).")
    rows, cols, weights = rows[~loops], cols[~loops], weights[~loops]

    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    keys = lo * n + hi
    order = np.lexsort((-weights, keys))
    keys, weights = keys[order], weights[order]
    first = np.ones(len(keys), dtype=bool)
    first[1:] = keys[1:] != keys[:-1]
    if np.any(~first):
        logger.warning(f"Dropped {int((~first).sum())} duplicate edge(s).")
    keys, weights = keys[first], weights[first]
    lo, hi = keys // n, keys % n

    upper = sp.coo_matrix((weights, (lo, hi)), shape=(n, n)).tocsr()
    return to_storage(upper + upper.T)


def read_features(path: str | Path) -> npt.NDArray:
    """Read features from comma-separated text or from the binary format.

    The binary format is two little-endian uint64 values `(rows, cols)` followed by
    `rows * cols` little-endian float32 values in row-major order. Files ending in `.bin` are
    read as binary; everything else as text.
    """
    path = Path(path)
    if path.suffix == ".bin":
        try:
            data = path.read_bytes()
        except OSError as e:
            raise DataError(f"Cannot read file: {e.strerror}", path=str(path)) from e
        if len(data) < 16:
            raise DataError("Binary feature header is truncated", path=str(path))
        n_rows, n_cols = np.frombuffer(data[:16], dtype="<u8")
        expected = 16 + int(n_rows) * int(n_cols) * 4
        if len(data) != expected:
            raise DataError(
                "Binary feature payload has the wrong size",
                path=str(path),
                expected=expected,
                actual=len(data),
            )
        values = np.frombuffer(data[16:], dtype="<f4").astype(np.float64)
        return values.reshape(int(n_rows), int(n_cols))

    rows = []
    for number, line in enumerate(_read_lines(path), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            rows.append([float(token) for token in text.split(",")])
        except ValueError as e:
            raise DataError("Cannot parse feature row", path=str(path), line=number) from e
        if len(rows[-1]) != len(rows[0]):
            raise DataError(
                "Inconsistent feature row length",
                path=str(path),
                line=number,
                expected=len(rows[0]),
                actual=len(rows[-1]),
            )
    if not rows:
        raise DataError("Feature file has no rows", path=str(path))
    return np.asarray(rows, dtype=np.float64)


def write_features_binary(path: str | Path, features: npt.ArrayLike):
    x = np.ascontiguousarray(features, dtype="<f4")
    header = np.asarray(x.shape, dtype="<u8").tobytes()
    Path(path).write_bytes(header + x.tobytes())


def write_features_text(path: str | Path, features: npt.ArrayLike):
    x = np.asarray(features, dtype=np.float64)
    Path(path).write_text(
        "".join(",".join(f"{v:.10g}" for v in row) + "\n" for row in x)
    )


def read_labels(path: str | Path) -> npt.NDArray:
    labels = []
    for number, line in enumerate(_read_lines(Path(path)), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            labels.append(int(text))
        except ValueError as e:
            raise DataError(f"Cannot parse label '{text}'", path=str(path), line=number) from e
    return np.asarray(labels, dtype=np.int64)


def write_labels(path: str | Path, labels: npt.ArrayLike):
    Path(path).write_text("".join(f"{int(y)}\n" for y in np.asarray(labels)))


def write_edge_list(path: str | Path, matrix: Matrix, weighted: bool = True):
    """Write the upper triangle of a symmetric matrix as `i j [w]` lines."""
    upper = sp.triu(sp.csr_matrix(symmetric_part(matrix)), k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    with open(path, "w") as f:
        for i, j, w in zip(upper.row[order], upper.col[order], upper.data[order]):
            if w == 0:
                continue
            f.write(f"{i} {j} {w:.10g}\n" if weighted else f"{i} {j}\n")


def write_structure(path: str | Path, matrix: Matrix):
    """Write every nonzero entry of a possibly asymmetric matrix as a directed `i j w` line."""
    entries = sp.coo_matrix(matrix)
    order = np.lexsort((entries.col, entries.row))
    with open(path, "w") as f:
        for i, j, w in zip(entries.row[order], entries.col[order], entries.data[order]):
            if w != 0:
                f.write(f"{i} {j} {w:.17g}\n")


def read_structure(
    path: str | Path, n: int, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> Matrix:
    """Read a matrix written by `write_structure`. Entries are kept as directed pairs."""
    rows, cols, weights = read_edge_list(path)
    if len(rows) > 0 and max(rows.max(), cols.max()) >= n:
        raise DataError(
            f"Entry references node {int(max(rows.max(), cols.max()))} "
            f"but only {n} nodes exist.",
            path=str(path),
        )
    keys = rows * n + cols
    if len(np.unique(keys)) != len(keys):
        raise DataError("Duplicate structure entry", path=str(path))
    matrix = sp.coo_matrix((weights, (rows, cols)), shape=(n, n)).tocsr()
    return to_storage(matrix, dense_limit)


def validate_stats(g: Graph, stats: DeclaredStats, name: str = ""):
    """Check a loaded graph against declared statistics.

    Node, edge and class counts must match exactly. The homophily ratio passes when the edge
    homophily or the mean node homophily lies within `HOMOPHILY_TOLERANCE` of the declared value.
    """
    label = f"{name}: " if name else ""
    if g.n != stats.n:
        raise DataError(f"{label}node count mismatch", expected=stats.n, actual=g.n)
    if g.num_edges != stats.edges:
        raise DataError(f"{label}edge count mismatch", expected=stats.edges, actual=g.num_edges)
    if g.labels is not None:
        classes = len(np.unique(g.labels))
        if classes != stats.classes:
            raise DataError(
                f"{label}class count mismatch", expected=stats.classes, actual=classes
            )
        candidates = {"edge": edge_homophily(g), "node": node_homophily(g)}
        if all(abs(v - stats.homophily) > HOMOPHILY_TOLERANCE for v in candidates.values()):
            measured = ", ".join(f"{k}={v:.4f}" for k, v in candidates.items())
            raise DataError(
                f"{label}homophily mismatch", expected=stats.homophily, actual=measured
            )


def load_dataset(
    edges_path: str | Path,
    features_path: str | Path,
    labels_path: str | Path | None = None,
    declared_stats: DeclaredStats | None = None,
    name: str = "",
) -> DatasetBundle:
    """Load a graph from an edge list, a feature file and an optional label file.

    The node count is the number of feature rows. Edges are symmetrized; self-loops and
    duplicates are dropped with a warning.
    """
    features = read_features(features_path)
    n = features.shape[0]
    rows, cols, weights = read_edge_list(edges_path)
    try:
        adjacency = build_adjacency(rows, cols, weights, n)
    except DataError as e:
        raise DataError(str(e), path=str(edges_path)) from e

    labels = None
    if labels_path is not None:
        labels = read_labels(labels_path)
        if len(labels) != n:
            raise DataError(
                "Label count does not match feature rows",
                path=str(labels_path),
                expected=n,
                actual=len(labels),
            )
    graph = Graph(adjacency=adjacency, features=features, labels=labels)
    if declared_stats is not None:
        validate_stats(graph, declared_stats, name)
    logger.info(
        f"Loaded {name or 'graph'}: {graph.n} nodes, {graph.num_edges} edges, "
        f"{graph.num_features} features."
    )
    return DatasetBundle(graph=graph, name=name, declared_stats=declared_stats)


def load_graph_dir(directory: str | Path, declared: str | None = None) -> DatasetBundle:
    """Load `edges.txt`, `features.bin` or `features.csv`, `labels.txt` and `stats.json`.

    Args:
        directory: Dataset directory. `labels.txt` and `stats.json` are optional.
        declared: Name of an entry of `DECLARED_STATS` to validate against, overriding
            `stats.json`.
    """
    directory = Path(directory)
    features = directory / "features.bin"
    if not features.exists():
        features = directory / "features.csv"
    labels = directory / "labels.txt"

    stats = None
    if declared is not None:
        if declared not in DECLARED_STATS:
            raise DataError(f"Unknown dataset '{declared}'", expected=sorted(DECLARED_STATS))
        stats = DECLARED_STATS[declared]
    elif (directory / "stats.json").exists():
        try:
            stats = DeclaredStats(**json.loads((directory / "stats.json").read_text()))
        except (TypeError, ValueError) as e:
            raise DataError("Invalid stats.json", path=str(directory / "stats.json")) from e

    return load_dataset(
        directory / "edges.txt",
        features,
        labels if labels.exists() else None,
        stats,
        name=declared or directory.name,
    )


def save_graph_dir(directory: str | Path, g: Graph, binary: bool = False):
    """Write a graph in the layout read by `load_graph_dir`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_edge_list(directory / "edges.txt", g.adjacency, weighted=False)
    if binary:
        write_features_binary(directory / "features.bin", g.features)
    else:
        write_features_text(directory / "features.csv", g.features)
    if g.labels is not None:
        write_labels(directory / "labels.txt", g.labels)


def align_feature_dims(a: Graph, b: Graph) -> tuple[Graph, Graph]:
    """Zero-pad the graph with fewer feature columns to the wider one."""
    da, db = a.num_features, b.num_features
    if da == db:
        return a, b
    width = max(da, db)
    logger.warning(f"Zero-padding features from {min(da, db)} to {width} columns.")

    def pad(g: Graph) -> Graph:
        return g.with_features(np.pad(g.features, ((0, 0), (0, width - g.num_features))))

    return pad(a), pad(b)
