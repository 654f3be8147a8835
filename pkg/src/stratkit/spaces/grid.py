"""Policy trees on grids and the face-poset stratification they induce.

A no-rotation policy on a grid is a flow ``cell -> cell``.  When every cell
flows into a single goal without cycles, the flow edges form a spanning tree
rooted at the goal; faces of the grid complex map to their tree node and each
lower cell maps to the meet of the faces above it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from ..errors import StratError
from ..poset import GridComplex, MonotoneMap, Poset, face_poset, tree_meet

Cell = tuple[int, int]

MOVES: dict[str, Cell] = {
    "Up": (-1, 0),
    "Down": (1, 0),
    "Left": (0, -1),
    "Right": (0, 1),
    "None": (0, 0),
}


def grid_step(cell: Cell, action: str, rows: int, cols: int, walls: Iterable[Cell] = ()) -> Cell:
    """Move one cell; leaving the grid or entering a wall is a no-op."""
    dr, dc = MOVES[action]
    r, c = cell[0] + dr, cell[1] + dc
    if not (1 <= r <= rows and 1 <= c <= cols) or (r, c) in walls:
        return cell
    return (r, c)


def node_id(cell: Cell) -> str:
    return f"({cell[0]},{cell[1]})"


@dataclass(frozen=True)
class PolicyTree:
    tree: Poset
    root: Cell
    cell_map: Mapping[str, str]  # face id -> tree element


def policy_tree(flow: Mapping[Cell, Cell]) -> PolicyTree:
    """Tree of a cell flow rooted at its unique fixed point.

    Raises ``not-a-spanning-tree`` with a witness (the cycle, or the cells
    that do not reach the goal).
    """
    fixed = sorted(s for s, t in flow.items() if s == t)
    if len(fixed) != 1:
        raise StratError(
            "not-a-spanning-tree",
            f"{len(fixed)} fixed points {fixed[:4]}; need exactly one goal",
            witness=fixed,
        )
    goal = fixed[0]
    for start in sorted(flow):
        path = [start]
        seen = {start}
        cur = start
        while cur != goal:
            nxt = flow.get(cur)
            if nxt is None:
                raise StratError("not-a-spanning-tree", f"{cur} flows off the grid", witness=path)
            if nxt in seen:
                cyc = path[path.index(nxt):] + [nxt]
                raise StratError("not-a-spanning-tree", f"cycle {cyc}", witness=cyc)
            path.append(nxt)
            seen.add(nxt)
            cur = nxt
    covers = [(node_id(flow[s]), node_id(s)) for s in sorted(flow) if s != goal]
    tree = Poset([node_id(s) for s in sorted(flow)], covers, check=False)
    cell_map = {GridComplex.face_id(*s): node_id(s) for s in flow}
    return PolicyTree(tree, goal, cell_map)


def policy_flow(rows: int, cols: int, policy: Mapping[Cell, str], walls: Iterable[Cell] = ()) -> dict[Cell, Cell]:
    walls = set(walls)
    flow = {}
    for r in range(1, rows + 1):
        for c in range(1, cols + 1):
            if (r, c) in walls:
                continue
            if (r, c) not in policy:
                raise StratError("not-a-spanning-tree", f"no action for cell {(r, c)}", witness=[(r, c)])
            flow[(r, c)] = grid_step((r, c), policy[(r, c)], rows, cols, walls)
    return flow


def lemma1_stratification(g: GridComplex, policy: Mapping[Cell, str]) -> MonotoneMap:
    """Monotone map from the face poset of ``g`` onto the policy tree."""
    pt = policy_tree(policy_flow(g.rows, g.cols, policy))
    faces = face_poset(g)
    face_set = set(g.faces())
    assignment = {}
    for x in faces.elements:
        if x in face_set:
            assignment[x] = pt.cell_map[x]
        else:
            above = [f for f in faces.up_set([x]) if f in face_set]
            assignment[x] = tree_meet(pt.tree, [pt.cell_map[f] for f in above])
    return MonotoneMap(faces, pt.tree, assignment)
