"""Rainflow cycle counting and depth-of-discharge power-law damage.

Depths are fractions of full capacity. Closed cycles count 1, unclosed
residual ranges count 0.5.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

DEFAULT_A = 3351.0
DEFAULT_B = -1.689


class Cycle(NamedTuple):
    depth: float
    count: float


def turning_points(trace) -> list[float]:
    """First and last samples plus every reversal, with plateaus collapsed."""
    pts: list[float] = []
    direction = 0
    for x in trace:
        x = float(x)
        if not pts:
            pts.append(x)
            continue
        if x == pts[-1]:
            continue
        d = 1 if x > pts[-1] else -1
        if len(pts) > 1 and d == direction:
            pts[-1] = x
        else:
            pts.append(x)
        direction = d
    return pts


def _close(stack: list[float], on_cycle) -> None:
    # four-point rule: inner range no larger than both neighbours closes a cycle
    while len(stack) >= 4:
        x = abs(stack[-2] - stack[-3])
        if x <= abs(stack[-3] - stack[-4]) and x <= abs(stack[-1] - stack[-2]):
            on_cycle(x)
            del stack[-3:-1]
        else:
            break


def rainflow(trace) -> list[Cycle]:
    """Closed cycles in closing order, followed by residual half-cycles."""
    cycles: list[Cycle] = []
    stack: list[float] = []
    for p in turning_points(trace):
        stack.append(p)
        _close(stack, lambda x: cycles.append(Cycle(x, 1.0)))
    cycles.extend(Cycle(abs(b - a), 0.5) for a, b in zip(stack, stack[1:]))
    return cycles


def cycle_damage(depth, A: float = DEFAULT_A, B: float = DEFAULT_B):
    """Percent damage of one full cycle at the given depth."""
    return 100.0 * np.power(depth, -B) / A


def damage(cycles, A: float = DEFAULT_A, B: float = DEFAULT_B) -> float:
    """Miner's-rule sum ``count / (A * depth**B) * 100`` in percent."""
    if A <= 0:
        raise ValueError("A must be positive")
    total = 0.0
    for depth, count in cycles:
        total += count * 100.0 * depth**-B / A
    return total


def degradation(trace, A: float = DEFAULT_A, B: float = DEFAULT_B) -> float:
    return damage(rainflow(trace), A, B)


class OnlineDegradation:
    """Accumulated damage of a growing trace, updated one sample at a time.

    Closed cycles are final once extracted, so only the committed residual
    stack is kept; the tentative last sample is folded in on each query. The
    value after every push equals ``degradation(trace_so_far)``.
    """

    def __init__(self, A: float = DEFAULT_A, B: float = DEFAULT_B):
        self.A, self.B = A, B
        self._stack: list[float] = []
        self._closed = 0.0
        self._last: float | None = None
        self._dir = 0
        self.value = 0.0

    def _full(self, x: float) -> float:
        return 100.0 * x**-self.B / self.A

    def push(self, x: float) -> float:
        x = float(x)
        if self._last is None:
            self._last = x
            return self.value
        if x == self._last:
            return self.value
        d = 1 if x > self._last else -1
        if d != self._dir:
            self._stack.append(self._last)
            _close(self._stack, self._add_closed)
            self._dir = d
        self._last = x
        self.value = self._evaluate()
        return self.value

    def _add_closed(self, x: float) -> None:
        self._closed += self._full(x)

    def _evaluate(self) -> float:
        total = self._closed
        stack = self._stack + [self._last]
        extra = []
        _close(stack, extra.append)
        for x in extra:
            total += self._full(x)
        for a, b in zip(stack, stack[1:]):
            total += 0.5 * self._full(abs(b - a))
        return total

    def extend(self, trace) -> list[float]:
        return [self.push(x) for x in trace]
