from .similarity import (
    cosine_similarity_matrix,
    feature_distance_matrix,
    standardize_features,
)
from .homophilic import (
    hop_power,
    initial_estimate,
    reconstruct_homophilic,
    row_objective,
    solve_row,
    solve_rows,
)
from .heterophilic import reconstruct_heterophilic, select_heterophilic_pairs
from .structures import (
    ReconstructedStructures,
    original_structures,
    random_split_structures,
    reconstruct_structures,
)
