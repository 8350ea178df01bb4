from ..common import logger
from ..common.exception import InvalidSetting
from ..common.random import numpy_rng
from ..graph import Graph, to_storage
from ..common.default import DEFAULT_DENSE_LIMIT

from dataclasses import dataclass, fields
import numpy as np
import numpy.typing as npt
import scipy.sparse as sp


@dataclass(kw_only=True, slots=True)
class SyntheticSpec:
    """Parameters of a homophily-controlled random graph.

    Attributes:
        n: Number of nodes.
        classes: Number of classes.
        dim: Feature dimension.
        homophily: Probability that a drawn neighbor shares the node's class.
        degree: Target mean degree.
        separation: Standard deviation of the class centers.
        noise: Standard deviation of the per-node feature noise.
        seed: Seed of the graph and of the feature noise.
        center_seed: Seed of the class centers. Defaults to `seed`. Graphs sharing a center
            seed share their class-conditional feature distribution.
    """

    n: int = 500
    classes: int = 4
    dim: int = 16
    homophily: float = 0.5
    degree: float = 6.0
    separation: float = 1.0
    noise: float = 1.0
    seed: int = 0
    center_seed: int | None = None

    def validate(self):
        if self.n < 2:
            raise InvalidSetting("Synthetic graph needs at least 2 nodes.")
        if not 1 <= self.classes <= self.n:
            raise InvalidSetting(f"Class count {self.classes} must lie in [1, {self.n}].")
        if self.dim < 1:
            raise InvalidSetting("Feature dimension must be positive.")
        if not 0.0 <= self.homophily <= 1.0:
            raise InvalidSetting(f"Homophily {self.homophily} outside [0, 1].")
        if not 0 < self.degree < self.n:
            raise InvalidSetting(
                f"Mean degree {self.degree} is infeasible for {self.n} nodes."
            )
        if self.separation < 0 or self.noise < 0:
            raise InvalidSetting("Separation and noise must be nonnegative.")


def parse_synthetic_spec(text: str) -> SyntheticSpec:
    """Parse `key=value` pairs separated by commas, e.g. `n=500,classes=4,homophily=0.8`.

    `h` is accepted as an alias of `homophily`.
    """
    aliases = {"h": "homophily", "c": "classes", "d": "dim"}
    names = {f.name for f in fields(SyntheticSpec)}
    floats = ("homophily", "degree", "separation", "noise")
    values: dict = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        key, sep, value = item.partition("=")
        key = aliases.get(key.strip(), key.strip())
        if not sep or key not in names:
            raise InvalidSetting(f"Invalid synthetic graph option '{item}'.")
        try:
            values[key] = float(value) if key in floats else int(value)
        except ValueError as e:
            raise InvalidSetting(f"Invalid value for '{key}': {value}") from e
    spec = SyntheticSpec(**values)
    spec.validate()
    return spec


def _draw_partners(
    labels: npt.NDArray, per_node: int, homophily: float, rng: np.random.Generator
) -> tuple[npt.NDArray, npt.NDArray]:
    n = len(labels)
    order = np.argsort(labels, kind="stable")
    position = np.empty(n, dtype=np.int64)
    position[order] = np.arange(n)
    counts = np.bincount(labels)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))

    sources = np.repeat(np.arange(n), per_node)
    c = labels[sources]
    same = rng.random(len(sources)) < homophily
    # Fall back when one side is empty.
    same[counts[c] == 1] = False
    same[counts[c] == n] = True

    partners = np.empty(len(sources), dtype=np.int64)

    # Same class: uniform over the class block without the node itself.
    s = sources[same]
    offset = np.floor(rng.random(len(s)) * (counts[c[same]] - 1)).astype(np.int64)
    own = position[s] - starts[c[same]]
    offset[offset >= own] += 1
    partners[same] = order[starts[c[same]] + offset]

    # Other class: uniform over every node outside the class block.
    o = ~same
    idx = np.floor(rng.random(int(o.sum())) * (n - counts[c[o]])).astype(np.int64)
    past = idx >= starts[c[o]]
    idx[past] += counts[c[o]][past]
    partners[o] = order[idx]
    return sources, partners


def generate_synthetic(spec: SyntheticSpec, dense_limit: int = DEFAULT_DENSE_LIMIT) -> Graph:
    """Random labeled graph whose one-hop homophily tracks `spec.homophily`.

    Classes are drawn uniformly. Every node draws `degree / 2` partners (the undirected union
    then has mean degree close to `spec.degree`); each partner shares the node's class with
    probability `homophily` and is a uniform node of another class otherwise. Features are
    the class center plus Gaussian noise.

    Args:
        spec: Generator parameters.
        dense_limit: Storage threshold of the adjacency.

    Returns:
        (Graph): Labeled graph, deterministic in `spec`.
    """
    spec.validate()
    rng = numpy_rng(spec.seed, "synthetic")
    labels = rng.integers(0, spec.classes, size=spec.n)

    per_node = max(1, int(round(spec.degree / 2)))
    sources, partners = _draw_partners(labels, per_node, spec.homophily, rng)
    lo, hi = np.minimum(sources, partners), np.maximum(sources, partners)
    keys = np.unique(lo * spec.n + hi)
    lo, hi = keys // spec.n, keys % spec.n
    upper = sp.coo_matrix(
        (np.ones(len(keys)), (lo, hi)), shape=(spec.n, spec.n)
    ).tocsr()
    adjacency = to_storage(upper + upper.T, dense_limit)

    center_seed = spec.seed if spec.center_seed is None else spec.center_seed
    centers = numpy_rng(center_seed, "center").normal(
        0.0, spec.separation, size=(spec.classes, spec.dim)
    )
    features = centers[labels] + rng.normal(0.0, spec.noise, size=(spec.n, spec.dim))

    logger.debug(
        f"Generated synthetic graph: {spec.n} nodes, {len(keys)} edges, "
        f"homophily {spec.homophily}."
    )
    return Graph(
        adjacency=adjacency, features=features, labels=labels, num_classes=spec.classes
    )
