"""Deterministic gridworlds with delayed STL-robustness rewards.

States are grid cells, or cell x heading when rotation is enabled.  Episodes
last ``horizon`` steps and produce a trace with ``horizon + 1`` samples over
the channels ``row, col, [heading], step, in_green, in_red``; the only reward
is the normalized robustness of the whole trace, granted at the end.

Value iteration is exact for formulas built from ``and``/``or``/``not`` over
``F[a,b] p``, ``G[a,b] p`` and plain ``p``, where ``p`` has no temporal
operators: it runs a dynamic program over (state, step, monitor value).
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import StratError
from .spaces.grid import MOVES, PolicyTree, policy_tree
from .stl import BIG, Always, And, Eventually, Formula, Not, Or, Until, normalize, parse, robustness, robustness_signal
from .trace import Trace

GRID_ACTIONS = ("Up", "Down", "Left", "Right", "None")
ROT_ACTIONS = ("L", "R", "F", "D")
HEADINGS = ((-1, 0), (0, 1), (1, 0), (0, -1))  # N, E, S, W

DEFAULT_FORMULA = "F[0,{H}] (in_green >= 0.5)"


@dataclass(frozen=True)
class Mdp:
    states: tuple
    actions: tuple
    transition: np.ndarray  # (S, A) -> next state index
    horizon: int


class GridEnv:
    def __init__(self, rows: int, cols: int, goal, horizon: int, formula: Formula | str | None = None,
                 rotation: bool = False, forbidden=(), red=(), scale: float | None = None,
                 cue_window: tuple[float, float] | None = None):
        if rows < 1 or cols < 1:
            raise StratError("bad-spec", f"grid {rows}x{cols}")
        if int(horizon) != horizon or horizon < 1:
            raise StratError("bad-spec", f"horizon {horizon}")
        goal = tuple(int(v) for v in goal)
        forbidden = frozenset(tuple(int(v) for v in c) for c in forbidden)
        red = frozenset(tuple(int(v) for v in c) for c in red)

        def inside(c):
            return 1 <= c[0] <= rows and 1 <= c[1] <= cols

        if len(goal) != 2 or not inside(goal):
            raise StratError("bad-spec", f"goal {goal} outside the {rows}x{cols} grid")
        if goal in forbidden:
            raise StratError("bad-spec", f"goal {goal} is forbidden")
        for c in forbidden | red:
            if len(c) != 2 or not inside(c):
                raise StratError("bad-spec", f"cell {c} outside the grid")
        if scale is not None and not scale > 0:
            raise StratError("bad-spec", f"scale {scale}")
        self.rows, self.cols = int(rows), int(cols)
        self.goal = goal
        self.horizon = int(horizon)
        self.rotation = bool(rotation)
        self.forbidden = forbidden
        self.red = red
        if formula is None:
            formula = DEFAULT_FORMULA.format(H=self.horizon)
        self.formula = parse(formula) if isinstance(formula, str) else formula
        self.scale = float(scale) if scale is not None else float(max(1, rows + cols - 2))
        self.cue_window = tuple(cue_window) if cue_window is not None else _first_eventually(self.formula)

        cells = [(r, c) for r in range(1, rows + 1) for c in range(1, cols + 1) if (r, c) not in forbidden]
        if self.rotation:
            self.states = tuple((r, c, h) for r, c in cells for h in range(4))
            self.actions = ROT_ACTIONS
        else:
            self.states = tuple(cells)
            self.actions = GRID_ACTIONS
        self.index = {s: i for i, s in enumerate(self.states)}
        T = np.empty((len(self.states), len(self.actions)), dtype=np.int64)
        for i, s in enumerate(self.states):
            for j, a in enumerate(self.actions):
                T[i, j] = self.index[self._step(s, a)]
        self.T = T
        self.cell_of = np.array([self.index_cell(s) for s in self.states], dtype=np.int64)
        self.goal_mask = np.array([s[:2] == goal for s in self.states])
        self.red_mask = np.array([s[:2] in red for s in self.states])

    def index_cell(self, s) -> int:
        return (s[0] - 1) * self.cols + (s[1] - 1)

    def _move(self, cell, d):
        r, c = cell[0] + d[0], cell[1] + d[1]
        if not (1 <= r <= self.rows and 1 <= c <= self.cols) or (r, c) in self.forbidden:
            return tuple(cell[:2])
        return (r, c)

    def _step(self, s, a):
        if not self.rotation:
            return self._move(s, MOVES[a])
        r, c, h = s
        if a == "L":
            return (r, c, (h - 1) % 4)
        if a == "R":
            return (r, c, (h + 1) % 4)
        if a == "F":
            return self._move((r, c), HEADINGS[h]) + (h,)
        return s

    @property
    def mdp(self) -> Mdp:
        return Mdp(self.states, self.actions, self.T, self.horizon)

    @property
    def channels(self) -> tuple[str, ...]:
        head = ("row", "col", "heading") if self.rotation else ("row", "col")
        return head + ("step", "in_green", "in_red")

    def start_states(self, avoid_red: bool = False) -> list[int]:
        return [i for i in range(len(self.states)) if not (avoid_red and self.red_mask[i])]

    def encode(self, states: Sequence[int], steps: Sequence[int]) -> np.ndarray:
        """Channel matrix for a sequence of (state index, step) pairs."""
        S = np.array([self.states[i] for i in states], dtype=float).reshape(len(states), -1)
        idx = np.asarray(states, dtype=np.int64)
        return np.column_stack([S, np.asarray(steps, dtype=float), self.goal_mask[idx].astype(float), self.red_mask[idx].astype(float)])

    def trace(self, states: Sequence[int]) -> Trace:
        return Trace(np.arange(len(states), dtype=float), self.encode(states, range(len(states))), self.channels)

    def reward(self, states: Sequence[int]) -> tuple[float, float]:
        """``(normalized reward, raw robustness)`` of a visited-state sequence."""
        rho = robustness(self.formula, self.trace(states), 0)
        return normalize(rho, self.scale), rho

    def state_id(self, i: int) -> str:
        s = self.states[i]
        return "(" + ",".join(str(v) for v in s) + ")"

    def parse_state(self, s) -> int:
        key = tuple(int(v) for v in s)
        if key not in self.index:
            raise StratError("bad-start", f"{key} is not a state")
        return self.index[key]

    def to_dict(self) -> dict:
        d = {
            "rows": self.rows, "cols": self.cols, "rotation": self.rotation, "goal": list(self.goal),
            "horizon": self.horizon, "formula": str(self.formula),
            "forbidden": sorted(list(c) for c in self.forbidden), "red": sorted(list(c) for c in self.red),
            "scale": self.scale,
        }
        if self.cue_window is not None:
            d["cue_window"] = list(self.cue_window)
        return d


def _first_eventually(f: Formula):
    if isinstance(f, Eventually):
        return (f.a, f.b)
    for ch in f.children():
        w = _first_eventually(ch)
        if w is not None:
            return w
    return None


def build_env(spec: dict | str) -> GridEnv:
    """Environment from a dict or a JSON file path."""
    if isinstance(spec, str):
        try:
            with open(spec) as fh:
                spec = json.load(fh)
        except OSError as e:
            raise StratError("io-error", str(e)) from None
        except json.JSONDecodeError as e:
            raise StratError("bad-spec", f"invalid JSON: {e}") from None
    if not isinstance(spec, dict):
        raise StratError("bad-spec", "expected a JSON object")
    known = {"rows", "cols", "goal", "horizon", "formula", "rotation", "forbidden", "red", "scale", "cue_window"}
    extra = set(spec) - known
    if extra:
        raise StratError("bad-spec", f"unknown keys {sorted(extra)}")
    try:
        return GridEnv(
            spec["rows"], spec["cols"], spec["goal"], spec["horizon"], spec.get("formula"),
            rotation=spec.get("rotation", False), forbidden=spec.get("forbidden", ()), red=spec.get("red", ()),
            scale=spec.get("scale"), cue_window=spec.get("cue_window"),
        )
    except KeyError as e:
        raise StratError("bad-spec", f"missing key {e}") from None
    except (TypeError, ValueError) as e:
        if isinstance(e, StratError):
            raise
        raise StratError("bad-spec", str(e)) from None


# --- monitor ---------------------------------------------------------------

@dataclass(frozen=True)
class _Leaf:
    kind: str  # "F" (running max) or "G" (running min)
    a: float
    b: float
    inner: Formula


def _has_temporal(f: Formula) -> bool:
    return isinstance(f, (Eventually, Always, Until)) or any(_has_temporal(c) for c in f.children())


def _compile(f: Formula, leaves: list, neg: bool = False):
    """Negation-normal combination tree whose leaves are windowed max/min monitors."""
    if not _has_temporal(f):
        leaves.append(_Leaf("F", 0.0, 0.0, Not(f) if neg else f))
        return ("leaf", len(leaves) - 1)
    if isinstance(f, Not):
        return _compile(f.child, leaves, not neg)
    if isinstance(f, (And, Or)):
        op = "min" if isinstance(f, And) != neg else "max"
        return (op, _compile(f.left, leaves, neg), _compile(f.right, leaves, neg))
    if isinstance(f, (Eventually, Always)):
        if _has_temporal(f.child):
            raise StratError("unsupported-formula", f"nested temporal operator in {f}")
        kind = "F" if isinstance(f, Eventually) != neg else "G"
        leaves.append(_Leaf(kind, f.a, f.b, Not(f.child) if neg else f.child))
        return ("leaf", len(leaves) - 1)
    raise StratError("unsupported-formula", f"value iteration cannot monitor {type(f).__name__}")


class Monitor:
    """Streaming evaluation of a supported formula along an episode.

    ``init`` is the accumulator before any sample, ``update(acc, s, k)`` folds
    in sample ``k`` at state ``s``, and ``value(acc)`` after the last sample
    equals the robustness at time 0.
    """

    def __init__(self, env: GridEnv):
        self.env = env
        leaves: list[_Leaf] = []
        self.tree = _compile(env.formula, leaves)
        self.leaves = tuple(leaves)
        H, S = env.horizon, len(env.states)
        states = np.repeat(np.arange(S), H + 1)
        steps = np.tile(np.arange(H + 1), S)
        tr = Trace(np.arange(len(states), dtype=float), env.encode(states, steps), env.channels)
        self.table = []  # per leaf: (S, H+1) values, or None outside the window
        for leaf in self.leaves:
            vals = robustness_signal(leaf.inner, tr).reshape(S, H + 1)
            k = np.arange(H + 1)
            active = (k >= leaf.a - 1e-9) & (k <= leaf.b + 1e-9)
            self.table.append((vals, active))
        self.init = tuple(-BIG if leaf.kind == "F" else BIG for leaf in self.leaves)

    def update(self, acc: tuple, s: int, k: int) -> tuple:
        out = list(acc)
        for j, (leaf, (vals, active)) in enumerate(zip(self.leaves, self.table)):
            if active[k]:
                v = vals[s, k]
                out[j] = max(out[j], v) if leaf.kind == "F" else min(out[j], v)
        return tuple(out)

    def value(self, acc: tuple) -> float:
        def ev(node):
            if node[0] == "leaf":
                return acc[node[1]]
            a, b = ev(node[1]), ev(node[2])
            return min(a, b) if node[0] == "min" else max(a, b)
        return float(ev(self.tree))


def goal_distance(env: GridEnv) -> np.ndarray:
    """Fewest steps from each state to any goal state (inf if unreachable)."""
    S = len(env.states)
    rev = [[] for _ in range(S)]
    for s in range(S):
        for t in env.T[s]:
            rev[t].append(s)
    dist = np.full(S, np.inf)
    q = deque(np.flatnonzero(env.goal_mask).tolist())
    for g in q:
        dist[g] = 0
    while q:
        t = q.popleft()
        for s in rev[t]:
            if dist[s] == np.inf:
                dist[s] = dist[t] + 1
                q.append(s)
    return dist


# --- policies --------------------------------------------------------------

class Policy:
    """Time-augmented policy; ``act(state, step, acc)`` returns an action index."""

    env: GridEnv

    def act(self, s: int, k: int, acc: tuple | None = None) -> int:
        raise NotImplementedError

    def stationary(self) -> dict:
        """Step-0 action per state, keyed by state tuple."""
        return {st: self.env.actions[self.act(i, 0, None)] for i, st in enumerate(self.env.states)}

    def table(self) -> np.ndarray:
        """Action index per (state, step), evaluated with the initial monitor value."""
        H = self.env.horizon
        return np.array([[self.act(s, k, None) for k in range(H)] for s in range(len(self.env.states))], dtype=np.int64)

    def to_json(self) -> str:
        tab = self.table()
        acts = self.env.actions
        return json.dumps({self.env.state_id(i): [acts[a] for a in row] for i, row in enumerate(tab)}, indent=1, sort_keys=True) + "\n"


@dataclass
class TablePolicy(Policy):
    env: GridEnv
    actions: np.ndarray  # (S, H) action indices

    def act(self, s, k, acc=None):
        return int(self.actions[s, k])


@dataclass
class MonitorPolicy(Policy):
    """Optimal policy from value iteration: decisions depend on the monitor value."""

    env: GridEnv
    monitor: Monitor
    choice: dict = field(repr=False)  # (s, k, acc) -> action index
    fallback: np.ndarray = field(repr=False)  # (S, H) choice with the initial accumulator

    def act(self, s, k, acc=None):
        if acc is not None and (s, k, acc) in self.choice:
            return self.choice[(s, k, acc)]
        return int(self.fallback[s, k])


def constant_policy(env: GridEnv, action: str) -> TablePolicy:
    if action not in env.actions:
        raise StratError("bad-action", action)
    a = env.actions.index(action)
    return TablePolicy(env, np.full((len(env.states), env.horizon), a, dtype=np.int64))


def stationary_policy(env: GridEnv, mapping: dict) -> TablePolicy:
    """Table policy that ignores the step; ``mapping`` is state tuple -> action name."""
    tab = np.empty((len(env.states), env.horizon), dtype=np.int64)
    for i, st in enumerate(env.states):
        if st not in mapping:
            raise StratError("partial-assignment", f"no action for state {st}")
        tab[i] = env.actions.index(mapping[st])
    return TablePolicy(env, tab)


# --- rollouts --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EpisodeTrace:
    trace: Trace
    reward: float
    robustness: float
    states: tuple
    actions: tuple


def rollout(env: GridEnv, policy: Policy, start, seed: int | None = None, epsilon: float = 0.0) -> EpisodeTrace:
    """Iterate the policy's flow for ``horizon`` steps from ``start``.

    ``start`` is a state tuple or index.  With ``epsilon > 0`` each step takes
    a uniformly random action with that probability, drawn from ``seed``.
    """
    s = start if isinstance(start, (int, np.integer)) else env.parse_state(start)
    if not 0 <= epsilon <= 1:
        raise StratError("bad-parameters", f"epsilon={epsilon}")
    rng = np.random.default_rng(seed) if epsilon > 0 else None
    mon = _monitor(env, policy)
    acc = mon.init if mon else None
    states, actions = [int(s)], []
    for k in range(env.horizon):
        if mon:
            acc = mon.update(acc, s, k)
        if rng is not None and rng.random() < epsilon:
            a = int(rng.integers(len(env.actions)))
        else:
            a = policy.act(s, k, acc)
        actions.append(env.actions[a])
        s = int(env.T[s, a])
        states.append(s)
    reward, rho = env.reward(states)
    return EpisodeTrace(env.trace(states), reward, rho, tuple(states), tuple(actions))


def _monitor(env, policy):
    return policy.monitor if isinstance(policy, MonitorPolicy) else None


# --- value iteration -------------------------------------------------------

def value_iteration(env: GridEnv) -> tuple[MonitorPolicy, np.ndarray]:
    """Exact finite-horizon optimum of the terminal robustness.

    Returns the greedy policy and the optimal normalized reward from each
    state at step 0.  Ties go to the action whose successor is closest to the
    goal, then to staying put explicitly (``None``/``D``) over bumping into a
    wall, then to the earlier action in enumeration order.
    """
    mon = Monitor(env)
    H, S, A = env.horizon, len(env.states), len(env.actions)
    dist = goal_distance(env)
    hold = len(env.actions) - 1  # "None" and "D" are listed last
    # forward pass: reachable (state, acc) after folding in sample k
    layers = [dict() for _ in range(H + 1)]
    for s in range(S):
        layers[0][(s, mon.update(mon.init, s, 0))] = None
    for k in range(H):
        nxt = layers[k + 1]
        for (s, acc) in layers[k]:
            for a in range(A):
                t = int(env.T[s, a])
                nxt.setdefault((t, mon.update(acc, t, k + 1)), None)
    # backward pass
    V = [dict() for _ in range(H + 1)]
    for key in layers[H]:
        V[H][key] = mon.value(key[1])
    choice = {}
    for k in range(H - 1, -1, -1):
        for (s, acc) in layers[k]:
            best, best_key = None, None
            for a in range(A):
                t = int(env.T[s, a])
                v = V[k + 1][(t, mon.update(acc, t, k + 1))]
                key = (v, -dist[t], a == hold, -a)
                if best_key is None or key > best_key:
                    best, best_key = a, key
            V[k][(s, acc)] = best_key[0]
            # acc passed to act() is the value after folding in sample k
            choice[(s, k, acc)] = best
    values = np.array([normalize(V[0][(s, mon.update(mon.init, s, 0))], env.scale) for s in range(S)])
    fallback = np.array([[choice.get((s, k, _acc_along(env, mon, choice, s, k)), 0) for k in range(H)] for s in range(S)], dtype=np.int64) if H else np.zeros((S, 0), dtype=np.int64)
    return MonitorPolicy(env, mon, choice, fallback), values


def _acc_along(env, mon, choice, s, k):
    """Accumulator at step ``k`` assuming the agent idled at ``s`` until then."""
    acc = mon.init
    for j in range(k + 1):
        acc = mon.update(acc, s, j)
    return acc


# --- Q-learning ------------------------------------------------------------

@dataclass(frozen=True)
class QParams:
    alpha: float = 0.1
    gamma: float = 0.99
    eps_start: float = 1.0
    eps_end: float = 0.05
    decay_fraction: float = 0.8
    episodes: int = 1000

    def __post_init__(self):
        if not (0 < self.alpha <= 1 and 0 < self.gamma <= 1):
            raise StratError("bad-parameters", f"alpha={self.alpha}, gamma={self.gamma}")
        if not (0 <= self.eps_end <= 1 and 0 <= self.eps_start <= 1 and 0 < self.decay_fraction <= 1):
            raise StratError("bad-parameters", "epsilon schedule out of range")
        if self.episodes < 1:
            raise StratError("bad-parameters", f"episodes={self.episodes}")

    def epsilon(self, episode: int) -> float:
        span = max(1.0, self.decay_fraction * self.episodes)
        frac = min(1.0, episode / span)
        return self.eps_start + (self.eps_end - self.eps_start) * frac


def q_learning(env: GridEnv, params: QParams = QParams(), seed: int = 0, avoid_red_starts: bool = False,
               use_monitor: bool = True) -> tuple[Policy, np.ndarray, dict]:
    """Epsilon-greedy tabular Q-learning with a single terminal reward.

    The learning state is (state, step), extended by the monitor accumulator
    when the formula admits one: with only (state, step) the terminal reward
    depends on the unseen history and bootstrapping averages it away.  Each
    episode's transitions are replayed last-to-first so the terminal reward
    reaches early steps within one episode.

    Returns ``(greedy policy, per-episode normalized reward, Q table)``.
    """
    mon = None
    if use_monitor:
        try:
            mon = Monitor(env)
        except StratError:
            mon = None
    rng = np.random.default_rng(seed)
    H, A = env.horizon, len(env.actions)
    zeros = np.zeros(A)
    Q: dict = {}
    starts = np.array(env.start_states(avoid_red_starts))
    curve = np.empty(params.episodes)
    T = env.T

    def key(s, k, acc):
        return (s, k, acc) if mon else (s, k)

    for ep in range(params.episodes):
        eps = params.epsilon(ep)
        s = int(starts[rng.integers(len(starts))])
        acc = mon.init if mon else None
        visited, keys, moves = [s], [], []
        explore = rng.random(H) < eps
        random_a = rng.integers(A, size=H)
        for k in range(H):
            if mon:
                acc = mon.update(acc, s, k)
            kk = key(s, k, acc)
            keys.append(kk)
            a = int(random_a[k]) if explore[k] else int(np.argmax(Q.get(kk, zeros)))
            moves.append(a)
            s = int(T[s, a])
            visited.append(s)
        reward, _ = env.reward(visited)
        curve[ep] = reward
        for k in range(H - 1, -1, -1):
            q = Q.setdefault(keys[k], np.zeros(A))
            target = reward if k == H - 1 else params.gamma * Q[keys[k + 1]].max()
            q[moves[k]] += params.alpha * (target - q[moves[k]])
    if mon:
        choice = {kk: int(np.argmax(q)) for kk, q in Q.items()}
        fallback = np.array([[choice.get((s, k, _acc_along(env, mon, None, s, k)), 0) for k in range(H)]
                             for s in range(len(env.states))], dtype=np.int64)
        return MonitorPolicy(env, mon, choice, fallback), curve, Q
    table = np.array([[int(np.argmax(Q.get((s, k), zeros))) for k in range(H)] for s in range(len(env.states))], dtype=np.int64)
    return TablePolicy(env, table), curve, Q


def evaluate(env: GridEnv, policy: Policy, starts: Sequence[int] | None = None) -> np.ndarray:
    """Normalized reward of a rollout from each start state."""
    starts = range(len(env.states)) if starts is None else starts
    return np.array([rollout(env, policy, int(s)).reward for s in starts])


def best_stationary_reward(env: GridEnv, starts: Sequence[int] | None = None, limit: int = 200_000) -> tuple[float, dict]:
    """Best mean reward over all step-independent policies, by enumeration."""
    S, A = len(env.states), len(env.actions)
    if A ** S > limit:
        raise StratError("too-large", f"{A}^{S} stationary policies")
    starts = list(range(S)) if starts is None else list(starts)
    best, arg = -np.inf, None
    for combo in itertools.product(range(A), repeat=S):
        pol = TablePolicy(env, np.repeat(np.array(combo, dtype=np.int64)[:, None], env.horizon, axis=1))
        m = float(np.mean(evaluate(env, pol, starts)))
        if m > best:
            best, arg = m, {env.states[i]: env.actions[a] for i, a in enumerate(combo)}
    return best, arg


def necessity_env(a: int = 3, b: int = 4, horizon: int = 6) -> GridEnv:
    """Corridor where the goal must be reached inside ``[a, b]`` but not before."""
    f = f"F[{a},{b}] (in_green >= 0.5) & G[0,{a - 1}] (in_green <= 0.5)"
    return GridEnv(1, 3, (1, 3), horizon, f)


# --- policy trees and token clouds -----------------------------------------

def policy_to_tree(env: GridEnv, policy: Policy | dict) -> PolicyTree:
    """Spanning tree of the step-0 flow, rooted at the goal."""
    if env.rotation:
        raise StratError("rotation-unsupported", "policy trees need a no-rotation grid")
    mapping = policy.stationary() if isinstance(policy, Policy) else dict(policy)
    flow = {}
    for st in env.states:
        if st not in mapping:
            raise StratError("not-a-spanning-tree", f"no action for cell {st}", witness=[st])
        flow[st] = env.states[int(env.T[env.index[st], env.actions.index(mapping[st])])]
    if flow[env.goal] != env.goal:
        raise StratError("not-a-spanning-tree", f"goal {env.goal} is not a fixed point", witness=[env.goal, flow[env.goal]])
    for start in env.states:
        path, cur = [start], start
        while cur != env.goal:
            nxt = flow[cur]
            if nxt == cur:
                raise StratError("not-a-spanning-tree", f"{start} never reaches the goal; stuck at {cur}", witness=path)
            if nxt in path:
                cyc = path[path.index(nxt):] + [nxt]
                raise StratError("not-a-spanning-tree", f"cycle {cyc}", witness=cyc)
            path.append(nxt)
            cur = nxt
    return policy_tree(flow)


CUE_PIXELS = 9


@dataclass(frozen=True, eq=False)
class TokenCloud:
    points: np.ndarray
    active: np.ndarray  # 1 where the cue window is active


def encode_token(env: GridEnv, s: int, k: int) -> np.ndarray:
    """One-hot cell, heading one-hot (rotation only), step phase, cue pixels, green/red flags."""
    cell = np.zeros(env.rows * env.cols)
    cell[env.cell_of[s]] = 1.0
    parts = [cell]
    if env.rotation:
        h = np.zeros(4)
        h[env.states[s][2]] = 1.0
        parts.append(h)
    lo, hi = env.cue_window if env.cue_window is not None else (np.inf, -np.inf)
    on = float(lo - 1e-9 <= k <= hi + 1e-9)
    parts += [np.array([k / env.horizon]), np.full(CUE_PIXELS, on), np.array([float(env.goal_mask[s]), float(env.red_mask[s])])]
    return np.concatenate(parts)


def sample_token_states(env: GridEnv, policies: Sequence[Policy], n_trajectories: int, seed: int = 0,
                        epsilon: float = 0.2) -> TokenCloud:
    """Encode every visited (state, step) of sampled rollouts; duplicates removed.

    Rollouts start from random states and act ``epsilon``-greedily, like
    sampling from a stochastic trained agent.
    """
    if n_trajectories < 1:
        raise StratError("bad-parameters", f"n_trajectories={n_trajectories}")
    if not policies:
        raise StratError("bad-parameters", "no policies")
    rng = np.random.default_rng(seed)
    starts = env.start_states()
    rows = []
    for j in range(n_trajectories):
        pol = policies[j % len(policies)]
        ep = rollout(env, pol, int(starts[rng.integers(len(starts))]), int(rng.integers(2**32)), epsilon)
        rows.extend(encode_token(env, s, k) for k, s in enumerate(ep.states))
    X = np.unique(np.array(rows), axis=0)
    col = env.rows * env.cols + (4 if env.rotation else 0) + 1
    return TokenCloud(X, X[:, col].astype(np.int64))


def random_policy(env: GridEnv, seed: int = 0) -> TablePolicy:
    rng = np.random.default_rng(seed)
    return TablePolicy(env, rng.integers(len(env.actions), size=(len(env.states), env.horizon)))

