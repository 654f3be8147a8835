from .coin import (
    CoinConfig,
    OverlapPoset,
    SpaceTimePoint,
    collection_order_complex,
    collection_poset,
    cone_join,
    default_coin_config,
    lightcone_leq,
    overlap_poset,
    overlap_poset_bruteforce,
    strat_label,
    traj_chain,
)
from .grid import MOVES, PolicyTree, grid_step, lemma1_stratification, policy_flow, policy_tree
from .trajectories import TargetSet, time_label, traj_stratify
