"""Discrete-time trajectories."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StratError


@dataclass(frozen=True, eq=False)
class Trace:
    """Samples ``states[k]`` taken at ``times[k]``.

    ``channels`` names the state coordinates; the default names are
    ``x1..xD``, matching the trace CSV header.
    """

    times: np.ndarray
    states: np.ndarray
    channels: tuple[str, ...] = ()
    irregular: bool = False

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        states = np.asarray(self.states, dtype=float)
        if states.ndim == 1:
            states = states.reshape(-1, 1)
        if len(times) < 1 or len(times) != len(states):
            raise StratError("bad-trace", f"{len(times)} times for {len(states)} states")
        if np.any(np.diff(times) <= 0):
            raise StratError("bad-trace", "times must be strictly increasing")
        if not self.irregular and len(times) > 2:
            dt = np.diff(times)
            if np.ptp(dt) > 1e-9 * max(1.0, abs(dt[0])):
                raise StratError("bad-trace", "non-uniform time step; pass irregular=True")
        channels = tuple(self.channels) or tuple(f"x{i + 1}" for i in range(states.shape[1]))
        if len(channels) != states.shape[1]:
            raise StratError("bad-trace", f"{len(channels)} channel names for {states.shape[1]} columns")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "channels", channels)

    @classmethod
    def uniform(cls, states, dt: float = 1.0, t0: float = 0.0, channels=()) -> "Trace":
        states = np.asarray(states, dtype=float)
        return cls(t0 + dt * np.arange(len(states)), states, tuple(channels))

    def __len__(self) -> int:
        return len(self.times)

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def channel(self, name: str) -> np.ndarray:
        return self.states[:, self.channels.index(name)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.channels == other.channels
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.states, other.states)
        )
