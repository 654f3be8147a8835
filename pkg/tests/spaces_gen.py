"""Random coin configurations and spanning-tree policies shared by tests."""
import numpy as np

from stratkit.spaces import CoinConfig, SpaceTimePoint


def make_config(points, horizon=8.0):
    return CoinConfig(tuple((chr(65 + i), SpaceTimePoint(*p)) for i, p in enumerate(points)), horizon)


def random_config(rng):
    while True:
        n = int(rng.integers(3, 6))
        t = rng.integers(1, 9, size=n) * 0.5
        y = rng.integers(-8, 9, size=n) * 0.5
        if np.any(np.abs(y) > t):
            continue
        pts = set(zip(t.tolist(), y.tolist()))
        if len(pts) < n:
            continue
        return make_config(sorted(pts), horizon=float(rng.integers(9, 13) * 0.5))


def dyadic_resolution(cfg):
    # a power of two at most spacing/20, so apexes lying on the horizon are grid points
    return 2.0 ** np.floor(np.log2(cfg.min_spacing() / 20))


def random_tree_policy(rows, cols, rng):
    """Random spanning tree into a random goal (Wilson-style loop-erased walks)."""
    cells = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1)]
    goal = cells[int(rng.integers(len(cells)))]
    in_tree = {goal}
    pol = {goal: "None"}
    moves = {"Up": (-1, 0), "Down": (1, 0), "Left": (0, -1), "Right": (0, 1)}
    for start in cells:
        nxt = {}
        cur = start
        while cur not in in_tree:
            opts = [(a, (cur[0] + d[0], cur[1] + d[1])) for a, d in moves.items()]
            opts = [(a, c) for a, c in opts if 1 <= c[0] <= rows and 1 <= c[1] <= cols]
            a, c = opts[int(rng.integers(len(opts)))]
            nxt[cur] = (a, c)
            cur = c
        cur = start
        while cur not in in_tree:
            a, c = nxt[cur]
            pol[cur] = a
            in_tree.add(cur)
            cur = c
    return pol
