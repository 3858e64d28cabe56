"""Deck-line sensor layouts and their mapping onto the random-field grid."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, NetworkConfig

STANDARD_CASE_SIZES = (16, 56, 112)
MAX_GATEWAY_DISTANCE = 300.0  # m


@dataclass(frozen=True)
class Topology:
    positions: np.ndarray          # (n, 2) metres
    gateway_index: int
    cells: np.ndarray              # (n, 2) integer (row, col) of the field grid
    grid_shape: tuple[int, int] = (4, 30)

    def __post_init__(self):
        n = len(self.positions)
        if not 0 <= self.gateway_index < n:
            raise ConfigError(f"gateway_index {self.gateway_index} outside 0..{n - 1}")
        if self.cells.shape != (n, 2):
            raise ConfigError("every node needs exactly one grid cell")
        rows, cols = self.grid_shape
        if (self.cells[:, 0] < 0).any() or (self.cells[:, 0] >= rows).any() \
                or (self.cells[:, 1] < 0).any() or (self.cells[:, 1] >= cols).any():
            raise ConfigError("grid cell outside the field grid")

    @property
    def node_count(self) -> int:
        return len(self.positions)

    def gateway_distances(self) -> np.ndarray:
        return np.linalg.norm(self.positions - self.positions[self.gateway_index], axis=1)

    def flat_cells(self) -> np.ndarray:
        return self.cells[:, 0] * self.grid_shape[1] + self.cells[:, 1]


def generate_topology(case_size: int, span_length: float = 484.0, grid_shape=(4, 30),
                      strict_cases: bool = False) -> Topology:
    """Deterministic deck-line layout with the gateway at mid-span.

    Leaves occupy distinct grid cells, picked evenly along the column-major cell
    ordering, so they spread over the full span. Field-grid column ``c`` sits at
    station ``span_length * c / (cols - 1)``; all nodes lie on the deck line
    (y = 0), the grid rows only matter for the random field. Node 0 is the gateway.
    """
    rows, cols = grid_shape
    if strict_cases and case_size not in STANDARD_CASE_SIZES:
        raise ConfigError(f"case_size {case_size} not one of {STANDARD_CASE_SIZES}")
    if case_size < 2:
        raise ConfigError("need at least a gateway and one leaf")
    if case_size > rows * cols:
        raise ConfigError(f"{case_size} nodes do not fit on a {rows}x{cols} grid")
    if span_length <= 0:
        raise ConfigError("span_length must be positive")

    gateway_cell = (rows // 2, cols // 2)
    free = [(r, c) for c in range(cols) for r in range(rows) if (r, c) != gateway_cell]
    n_leaves = case_size - 1
    if n_leaves == 1:
        picks = [0]
    else:
        picks = np.round(np.linspace(0, len(free) - 1, n_leaves)).astype(int)
    leaf_cells = [free[i] for i in picks]

    step = span_length / (cols - 1) if cols > 1 else 0.0
    positions = [(span_length / 2.0, 0.0)]
    positions += [(c * step, 0.0) for _, c in leaf_cells]
    cells = np.array([gateway_cell] + leaf_cells, dtype=int)
    topo = Topology(np.array(positions, dtype=float), 0, cells, (rows, cols))
    if strict_cases and topo.gateway_distances().max() > MAX_GATEWAY_DISTANCE:
        raise ConfigError("layout violates the 300 m gateway range bound")
    return topo


def load_coordinates(path: str | Path, gateway_index: int, grid_shape=(4, 30)) -> Topology:
    """Read one ``x,y`` pair per line (metres); node index is the line number.

    Cells come from the bounding box of the coordinates divided into the grid.
    """
    pts = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            x, y = (float(v) for v in line.split(","))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: expected 'x,y', got {line!r}") from None
        pts.append((x, y))
    if len(pts) < 2:
        raise ConfigError(f"{path}: need at least two nodes")
    pos = np.array(pts)
    rows, cols = grid_shape
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    extent = np.where(hi > lo, hi - lo, 1.0)
    frac = (pos - lo) / extent
    col = np.minimum((frac[:, 0] * cols).astype(int), cols - 1)
    row = np.minimum((frac[:, 1] * rows).astype(int), rows - 1)
    return Topology(pos, gateway_index, np.stack([row, col], axis=1), (rows, cols))


def topology_for(cfg: NetworkConfig) -> Topology:
    shape = (cfg.grid_rows, cfg.grid_cols)
    if cfg.coordinate_file:
        topo = load_coordinates(cfg.coordinate_file, cfg.gateway_index, shape)
        if topo.node_count != cfg.node_count:
            raise ConfigError(f"coordinate file has {topo.node_count} nodes, config says {cfg.node_count}")
        return topo
    if cfg.gateway_index != 0:
        raise ConfigError("generated layouts put the gateway at index 0")
    return generate_topology(cfg.node_count, cfg.span_length, shape, cfg.strict_cases)
