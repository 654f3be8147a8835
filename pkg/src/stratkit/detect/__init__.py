from .cluster import agglomerative, kmeans, majority, purity, standardize
from .embed import Embedding, dct_matrix, dct_project, isomap_lite, knn_graph
from .generators import (
    GENERATORS,
    Sample,
    gen_circle,
    gen_half_cylinder,
    gen_hourglass,
    gen_line3d,
    gen_room_corridor,
    gen_segment,
    gen_segment_tube,
    gen_square,
)
from .neighbors import GridIndex, ball_count, ball_counts, diameter, knn_distances, knn_indices, radius_grid
from .vgt import (
    VgtCurve,
    default_bandwidth,
    default_window,
    dic_feature,
    local_dim_ls,
    local_dims,
    slope,
    small_window,
    two_nn_dim,
    vgt,
    vgt_dot,
    vgt_dot_features,
    vgt_matrix,
)
