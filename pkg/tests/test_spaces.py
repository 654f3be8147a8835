import numpy as np
import pytest

from stratkit.errors import StratError
from stratkit.poset import GridComplex, MonotoneMap, Poset, is_monotone
from stratkit.spaces import (
    CoinConfig,
    SpaceTimePoint,
    TargetSet,
    collection_order_complex,
    collection_poset,
    cone_join,
    default_coin_config,
    lemma1_stratification,
    lightcone_leq,
    overlap_poset,
    overlap_poset_bruteforce,
    policy_flow,
    policy_tree,
    strat_label,
    traj_chain,
    traj_stratify,
)
from stratkit.trace import Trace
from spaces_gen import dyadic_resolution, make_config, random_config, random_tree_policy

# light cone


def test_lightcone_examples():
    assert lightcone_leq((1, 0), (2, 1))
    assert not lightcone_leq((1, 0), (2, 1.5))
    assert lightcone_leq((0, 0), (4.5, 1))


def test_cone_join_examples():
    assert cone_join((1, 0), (1, 2)) == (2, 1)
    assert cone_join((1, 0), (3, 0)) == (3, 0)
    assert cone_join((1, 0.5), (1, 0.5)) == (1, 0.5)
    # a pair where the two time offsets differ
    assert cone_join((0, 0), (1, 3)) == (2, 2)


def _rand_points(rng, n):
    return [SpaceTimePoint(*v) for v in rng.uniform(-3, 3, size=(n, 2))]


def test_cone_join_properties():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        p, q, r = _rand_points(rng, 3)
        j = cone_join(p, q)
        assert np.allclose(j, cone_join(q, p), atol=1e-12)
        assert np.allclose(cone_join(p, p), p)
        assert np.allclose(cone_join(cone_join(p, q), r), cone_join(p, cone_join(q, r)), atol=1e-12)
        assert lightcone_leq(p, j) and lightcone_leq(q, j)
        # least: any common upper bound dominates the join
        w = SpaceTimePoint(j.t + rng.uniform(0, 2), j.y + rng.uniform(-1, 1))
        if lightcone_leq(p, w) and lightcone_leq(q, w):
            assert lightcone_leq(j, w, 1e-9)


# coin configs


def test_config_invalid():
    with pytest.raises(StratError) as e:
        make_config([(1, 2)])
    assert e.value.code == "config-invalid"
    with pytest.raises(StratError):
        make_config([(9, 0)])
    with pytest.raises(StratError):
        CoinConfig((("A", (1, 0)), ("A", (2, 0))), 5)


def test_overlap_examples():
    assert len(overlap_poset(make_config([]))) == 1
    two = overlap_poset(make_config([(1, -1), (1, 1)]))
    assert set(two.poset.elements) == {"{S}", "{S,A}", "{S,B}", "{S,A,B}"}
    assert two.apexes["{S,A,B}"] == (2, 0)
    assert set(overlap_poset_bruteforce(make_config([]), 0.1).poset.elements) == {"{S}"}
    one = overlap_poset_bruteforce(make_config([(1, 0.5)]), 0.05)
    assert set(one.poset.elements) == {"{S}", "{S,A}"}


def test_bruteforce_too_coarse():
    with pytest.raises(StratError) as e:
        overlap_poset_bruteforce(make_config([(1, 0), (2, 0)]), 0.5)
    assert e.value.code == "resolution-too-coarse"


def test_overlap_matches_bruteforce_random():
    rng = np.random.default_rng(1)
    for _ in range(25):
        cfg = random_config(rng)
        a = overlap_poset(cfg)
        b = overlap_poset_bruteforce(cfg, dyadic_resolution(cfg))
        assert a.poset == b.poset
        for k, apex in a.apexes.items():
            assert np.allclose(apex, b.apexes[k])


def test_default_config():
    cfg = default_coin_config()
    O = overlap_poset(cfg)
    assert len(O) == 11
    assert "{S}" in O.poset
    lab = strat_label(cfg, (4.5, 1))
    assert lab == "{S,A,B}"
    C = collection_poset(cfg)
    assert C.leq("A", "C") and not C.comparable("A", "B")
    assert max(len(ch) for ch in collection_order_complex(cfg, 5).chains) == 2


def test_point_forced_between_incomparable_coins():
    # sending p to a single coin target cannot be monotone when it lies above both
    cfg = default_coin_config()
    C = collection_poset(cfg)
    src = Poset(["A", "B", "p"], [("A", "p"), ("B", "p")])
    for choice in ("A", "B"):
        ok, w = is_monotone(MonotoneMap(src, C, {"A": "A", "B": "B", "p": choice}))
        assert not ok and w is not None


def test_strat_label():
    cfg = default_coin_config()
    assert strat_label(cfg, (0, 0)) == "{S}"
    assert strat_label(cfg, (0.5, -0.5)) == "{S,B}"
    with pytest.raises(StratError) as e:
        strat_label(cfg, (1, 3))
    assert e.value.code == "point-outside-domain"


def test_strat_label_monotone():
    cfg = default_coin_config()
    O = overlap_poset(cfg)
    rng = np.random.default_rng(2)
    for _ in range(10_000):
        t = rng.uniform(0, cfg.horizon - 0.5)
        p = (t, rng.uniform(-t, t))
        dt = rng.uniform(0, cfg.horizon - t)
        q = (t + dt, p[1] + rng.uniform(-dt, dt))
        lp, lq = strat_label(cfg, p), strat_label(cfg, q)
        assert lp in O.poset and lq in O.poset
        assert O.members[lp] <= O.members[lq]


def test_overlap_export():
    d = overlap_poset(default_coin_config()).to_dict()
    assert len(d["elements"]) == 11 and set(d["apexes"]) == set(d["elements"])
    cfg = default_coin_config()
    assert CoinConfig.from_dict(cfg.to_dict()) == cfg


# trajectories


def _ramp(values, dt=1.0):
    return Trace.uniform(np.asarray(values, dtype=float)[:, None], dt)


def test_traj_stratify_examples():
    traces = [_ramp([0, 1, 2]), _ramp([2, 2, 2])]
    labels, P = traj_stratify(traces, TargetSet.everything())
    assert labels[0] == {0.0, 1.0, 2.0} and len(P) == 1
    labels, P = traj_stratify(traces, TargetSet.empty())
    assert all(z == frozenset() for z in labels) and len(P) == 1


def test_traj_stratify_grid_goal():
    # 3x3 grid, start (1,3), four moves to the green cell (3,1), then stay
    cells = [(1, 3), (1, 2), (1, 1), (2, 1), (3, 1), (3, 1), (3, 1), (3, 1)]
    tr = Trace.uniform(np.array(cells, dtype=float))
    labels, _ = traj_stratify([tr], TargetSet.states([(3, 1)]))
    assert labels[0] == frozenset(float(k) for k in range(4, len(cells)))


def test_traj_stratify_reverse_inclusion():
    target = TargetSet.box([1], [5])
    traces = [_ramp([0, 1, 2, 3]), _ramp([0, 0, 2, 3]), _ramp([0, 0, 0, 3])]
    labels, P = traj_stratify(traces, target)
    assert labels == [frozenset({1.0, 2.0, 3.0}), frozenset({2.0, 3.0}), frozenset({3.0})]
    assert P.leq("{1,2,3}", "{3}")
    assert P.maximal() == ["{3}"]


def test_traj_stratify_closedness():
    # gamma_n -> gamma pointwise; every gamma_n hits the closed ball at Z
    target = TargetSet.ball([1.0, 0.0], 0.5)
    limit = np.array([[0, 0], [1.5, 0], [1, 0.5], [3, 0]], dtype=float)
    Z = {1.0, 2.0}
    rng = np.random.default_rng(3)
    for n in range(1, 60):
        pert = rng.normal(size=limit.shape)
        pert /= np.linalg.norm(pert, axis=1, keepdims=True)
        gamma_n = limit + pert / n
        # pull the Z samples inside the ball so that label(gamma_n) contains Z
        for k in (1, 2):
            c = np.array([1.0, 0.0])
            v = gamma_n[k] - c
            r = np.linalg.norm(v)
            if r > 0.5:
                gamma_n[k] = c + v * 0.4999 / r
        lab, _ = traj_stratify([Trace.uniform(gamma_n)], target)
        assert Z <= lab[0]
    lab, _ = traj_stratify([Trace.uniform(limit)], target)
    assert Z <= lab[0]


def test_traj_chain_examples():
    cfg = default_coin_config()
    # start at S, straight to A=(1.5, 1), then along the right edge to C=(4, 3.5)
    t = np.arange(0, 4.01, 0.5)
    y = np.where(t <= 1.5, t * (1 / 1.5), 1 + (t - 1.5))
    assert traj_chain(cfg, Trace(t, y[:, None])) == ("A", "C")
    assert traj_chain(cfg, Trace(t, np.full((len(t), 1), -0.2))) == ()
    with pytest.raises(StratError) as e:
        traj_chain(cfg, Trace(t, np.r_[0, 2, np.zeros(len(t) - 2)][:, None]))
    assert e.value.code == "speed-violation" and e.value.witness == 0


def test_trace_validation():
    with pytest.raises(StratError):
        Trace([0, 1, 3], [[0], [1], [2]])
    Trace([0, 1, 3], [[0], [1], [2]], irregular=True)
    with pytest.raises(StratError):
        Trace([0, 0], [[0], [1]])


# spanning-tree stratifications


TREE3 = {
    # 3x3 tree rooted at (3,1): the bottom row flows left, other cells flow down
    (1, 1): "Down", (1, 2): "Down", (1, 3): "Down",
    (2, 1): "Down", (2, 2): "Down", (2, 3): "Down",
    (3, 1): "None", (3, 2): "Left", (3, 3): "Left",
}


def test_lemma1_single_face():
    m = lemma1_stratification(GridComplex(1, 1), {(1, 1): "None"})
    assert len(set(m.assignment.values())) == 1
    assert is_monotone(m)[0]


def test_lemma1_three_by_three_tree():
    m = lemma1_stratification(GridComplex(3, 3), TREE3)
    assert len(m.source) == 49 and len(m.target) == 9
    assert is_monotone(m) == (True, None)
    assert set(m.assignment.values()) == set(m.target.elements)
    assert m.target.minimal() == ["(3,1)"]


def test_lemma1_two_cycle():
    pol = dict(TREE3)
    pol[(1, 1)], pol[(1, 2)] = "Right", "Left"
    with pytest.raises(StratError) as e:
        lemma1_stratification(GridComplex(3, 3), pol)
    assert e.value.code == "not-a-spanning-tree"
    assert set(e.value.witness) == {(1, 1), (1, 2)}


@pytest.mark.parametrize("rows,cols", [(r, c) for r in range(1, 6) for c in range(1, 6)])
def test_lemma1_random_trees(rows, cols):
    rng = np.random.default_rng(rows * 10 + cols)
    for _ in range(100):
        pol = random_tree_policy(rows, cols, rng)
        m = lemma1_stratification(GridComplex(rows, cols), pol)
        assert is_monotone(m)[0]


def test_policy_tree_unreachable():
    flow = policy_flow(1, 3, {(1, 1): "None", (1, 2): "None", (1, 3): "Left"})
    with pytest.raises(StratError) as e:
        policy_tree(flow)
    assert e.value.code == "not-a-spanning-tree"
