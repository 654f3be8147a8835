"""CSV and JSON readers/writers for the exchange formats.

Floats are written with ``repr`` (shortest round-trip form) so files are
byte-stable across runs and read back losslessly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .errors import StratError
from .trace import Trace


def fmt(x) -> str:
    """Shortest exact decimal for a number; integral floats lose the ``.0``."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def write_csv(path, header: list[str], rows, comment: str | None = None) -> None:
    buf = io.StringIO()
    if comment:
        for line in comment.splitlines():
            buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_csv(path) -> tuple[list[str], list[list[str]], list[str]]:
    """Return (header, rows, comment lines)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StratError("io-error", str(exc)) from None
    comments = []
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise StratError("bad-csv", f"{path}: no header")
    header = [h.strip() for h in rows[0]]
    return header, rows[1:], comments


# -- point clouds ------------------------------------------------------------


def write_cloud(path, points: np.ndarray, labels=None) -> None:
    points = np.asarray(points, dtype=float)
    header = [f"x{i + 1}" for i in range(points.shape[1])]
    if labels is None:
        write_csv(path, header, points.tolist())
    else:
        write_csv(path, header + ["label"], [list(p) + [str(lab)] for p, lab in zip(points.tolist(), labels)])


def read_cloud(path) -> tuple[np.ndarray, list[str] | None]:
    header, rows, _ = read_csv(path)
    xcols = [i for i, h in enumerate(header) if h.startswith("x") and h[1:].isdigit()]
    if not xcols:
        xcols = [i for i, h in enumerate(header) if h not in ("index", "label")]
    lab = header.index("label") if "label" in header else None
    try:
        pts = np.array([[float(r[i]) for i in xcols] for r in rows], dtype=float)
    except ValueError as exc:
        raise StratError("bad-csv", f"{path}: {exc}") from None
    if pts.size == 0 or not np.all(np.isfinite(pts)):
        raise StratError("bad-cloud", f"{path}: empty or non-finite")
    labels = [r[lab] for r in rows] if lab is not None else None
    return pts, labels


def write_features(path, features: np.ndarray, prefix: str = "f", comment: str | None = None) -> None:
    features = np.asarray(features, dtype=float)
    header = ["index"] + [f"{prefix}{j + 1}" for j in range(features.shape[1])]
    write_csv(path, header, ([i] + row for i, row in enumerate(features.tolist())), comment=comment)


def read_features(path) -> np.ndarray:
    header, rows, _ = read_csv(path)
    cols = [i for i, h in enumerate(header) if h not in ("index", "label")]
    return np.array([[float(r[i]) for i in cols] for r in rows], dtype=float)


def write_labels(path, labels) -> None:
    write_csv(path, ["index", "label"], ([i, int(lab)] for i, lab in enumerate(labels)))


def read_labels(path) -> np.ndarray:
    header, rows, _ = read_csv(path)
    j = header.index("label")
    return np.array([int(r[j]) for r in rows])


# -- traces ------------------------------------------------------------------


def write_trace(path, trace: Trace) -> None:
    write_csv(path, ["t"] + list(trace.channels), ([t] + s for t, s in zip(trace.times.tolist(), trace.states.tolist())))


def read_trace(path, irregular: bool = False) -> Trace:
    header, rows, _ = read_csv(path)
    if not header or header[0] != "t":
        raise StratError("bad-trace", f"{path}: first column must be 't'")
    data = np.array([[float(v) for v in r] for r in rows], dtype=float)
    if data.size == 0:
        raise StratError("bad-trace", f"{path}: no samples")
    return Trace(data[:, 0], data[:, 1:], tuple(header[1:]), irregular=irregular)


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise StratError("io-error", str(exc)) from None
    except json.JSONDecodeError as exc:
        raise StratError("bad-json", f"{path}: {exc}") from None


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=False) + "\n")
