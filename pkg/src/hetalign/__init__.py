""" Hetalign: homophily-agnostic domain adaptation for node classification """

__version__ = "0.1.0"

from .common import logger
from .setup import RunConfig as config
from .graph import Graph, hop_homophily
from .reconstruct import reconstruct_structures
from .io import SyntheticSpec, generate_synthetic, load_dataset, load_graph_dir
from .pipeline import RunMetrics, run_transfer

__all__ = ["logger", "config", "Graph", "hop_homophily", "reconstruct_structures",
           "SyntheticSpec", "generate_synthetic", "load_dataset", "load_graph_dir",
           "RunMetrics", "run_transfer"]
