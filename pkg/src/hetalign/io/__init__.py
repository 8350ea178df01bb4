from .dataset import (
    DECLARED_STATS,
    DatasetBundle,
    DeclaredStats,
    align_feature_dims,
    load_dataset,
    load_graph_dir,
    read_edge_list,
    read_features,
    read_labels,
    read_structure,
    save_graph_dir,
    validate_stats,
    write_edge_list,
    write_features_binary,
    write_features_text,
    write_labels,
    write_structure,
)
from .serialize import format_metrics, read_metrics, write_metrics
from .synthetic import SyntheticSpec, generate_synthetic, parse_synthetic_spec
