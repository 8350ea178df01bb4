from .graph import (
    Graph,
    Matrix,
    NormalizedGraph,
    as_dense,
    low_pass_baseline,
    normalize_adjacency,
    normalize_matrix,
    to_storage,
    top_k_per_row,
    top_k_support,
)
from .homophily import (
    edge_homophily,
    homophily_ratio,
    hop_homophily,
    hop_homophily_matrix,
    local_node_homophily,
    node_homophily,
    node_homophily_values,
    row_label_mass,
)
