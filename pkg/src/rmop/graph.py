"""Metric-graph scenarios for budget-limited multi-robot path planning.

A scenario bundles a metric graph (2-D vertices with a symmetric distance
matrix), one start vertex per robot, a shared travel budget, and the number
of robots an adversary may remove. Scenarios serialize to a strict JSON
document and can be generated procedurally from a seeded importance field
built from Gaussian bumps, mimicking a concentration map over a survey area.

All types are immutable after construction and safe to share across
concurrent readers.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

METRIC_TOL = 1e-9
AREA_SIDE = 90.0

_SCENARIO_KEYS = {"vertices", "distance_matrix", "starts", "budget", "alpha", "reward_kind"}
_VERTEX_KEYS = {"id", "x", "y", "reward", "coverage"}
_REWARD_KINDS = ("modular", "coverage")


class ScenarioError(ValueError):
    """A scenario document is malformed or violates a type invariant."""


@dataclass(frozen=True)
class Vertex:
    """A graph vertex: planar position, additive reward, optional covered cells."""

    id: int
    x: float
    y: float
    reward: float = 0.0
    coverage: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True, eq=False)
class MetricGraph:
    """Vertices plus a symmetric, triangle-inequality-respecting distance matrix."""

    vertices: tuple[Vertex, ...]
    distance: np.ndarray
    euclidean: bool = True

    def __post_init__(self):
        mat = np.ascontiguousarray(np.asarray(self.distance, dtype=float))
        mat.setflags(write=False)
        object.__setattr__(self, "distance", mat)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def d(self, i: int, j: int) -> float:
        return float(self.distance[i, j])

    @classmethod
    def from_positions(cls, vertices: Sequence[Vertex]) -> "MetricGraph":
        """Build the graph with pairwise Euclidean distances."""
        pos = np.array([[v.x, v.y] for v in vertices], dtype=float)
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        return cls(vertices=tuple(vertices), distance=dist, euclidean=True)


@dataclass(frozen=True, eq=False)
class Scenario:
    """A full problem instance: graph, robot starts, budget, attack size."""

    graph: MetricGraph
    starts: tuple[int, ...]
    budget: float
    alpha: int
    reward_kind: str = "modular"

    @property
    def n_robots(self) -> int:
        return len(self.starts)

    def with_starts(self, starts: Sequence[int]) -> "Scenario":
        for s in starts:
            if not 0 <= int(s) < self.graph.n:
                raise ScenarioError(f"start vertex {s} is not a valid vertex id")
        return dataclasses.replace(self, starts=tuple(int(s) for s in starts))

    def with_alpha(self, alpha: int) -> "Scenario":
        if not 0 <= alpha < self.n_robots:
            raise ScenarioError(f"alpha must satisfy 0 <= alpha < {self.n_robots}, got {alpha}")
        return dataclasses.replace(self, alpha=int(alpha))


@dataclass(frozen=True)
class Path:
    """An open rooted path: ordered distinct vertex ids and its travel cost."""

    robot: int
    vertices: tuple[int, ...]
    cost: float

    @property
    def vertex_set(self) -> frozenset[int]:
        return frozenset(self.vertices)


@dataclass(frozen=True)
class MetricReport:
    """All detected metric violations; an empty report means the graph is metric."""

    negative: tuple[tuple[int, int], ...] = ()
    diagonal: tuple[int, ...] = ()
    asymmetry: tuple[tuple[int, int], ...] = ()
    triangle: tuple[tuple[int, int, int], ...] = ()

    @property
    def ok(self) -> bool:
        return not (self.negative or self.diagonal or self.asymmetry or self.triangle)

    def entries(self) -> list[str]:
        out = [f"negative distance at ({i},{j})" for i, j in self.negative]
        out += [f"nonzero diagonal at {i}" for i in self.diagonal]
        out += [f"asymmetric distance at ({i},{j})" for i, j in self.asymmetry]
        out += [f"triangle inequality violated at ({i},{j},{k})" for i, j, k in self.triangle]
        return out


def verify_metric(graph: MetricGraph, tol: float = METRIC_TOL) -> MetricReport:
    """Report every symmetry, diagonal, sign, and triangle violation in the matrix.

    Violations are returned as data, never raised; loaders turn them into errors.
    """
    d = graph.distance
    negative = tuple((int(i), int(j)) for i, j in np.argwhere(d < -tol))
    diagonal = tuple(int(i) for i in np.flatnonzero(np.abs(np.diagonal(d)) > tol))
    asym = np.argwhere(np.abs(d - d.T) > tol)
    asymmetry = tuple((int(i), int(j)) for i, j in asym if i < j)
    # d[i,k] <= d[i,j] + d[j,k] for all i, j, k
    via = d[:, :, None] + d[None, :, :]
    direct = d[:, None, :]
    bad = np.argwhere(direct > via + tol)
    triangle = tuple(
        (int(i), int(j), int(k)) for i, j, k in bad if i != j and j != k and i != k
    )
    return MetricReport(negative=negative, diagonal=diagonal, asymmetry=asymmetry, triangle=triangle)


def path_cost(graph: MetricGraph, vertices: Sequence[int]) -> float:
    """Sum of edge distances along consecutive pairs; 0 for a single vertex."""
    seen = set()
    for v in vertices:
        if not 0 <= v < graph.n:
            raise ScenarioError(f"vertex id {v} out of range 0..{graph.n - 1}")
        if v in seen:
            raise ScenarioError(f"repeated vertex id {v} in path")
        seen.add(v)
    if not vertices:
        raise ScenarioError("path must contain at least one vertex")
    total = 0.0
    for a, b in zip(vertices, vertices[1:]):
        total += float(graph.distance[a, b])
    return total


def _validate_vertices(raw: list) -> list[Vertex]:
    if not raw:
        raise ScenarioError("scenario must contain at least one vertex")
    vertices = []
    for idx, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ScenarioError(f"vertex {idx} is not an object")
        unknown = set(entry) - _VERTEX_KEYS
        if unknown:
            raise ScenarioError(f"vertex {idx} has unknown keys {sorted(unknown)}")
        for key in ("id", "x", "y", "reward"):
            if key not in entry:
                raise ScenarioError(f"vertex {idx} is missing key '{key}'")
        for key in ("x", "y", "reward"):
            if not math.isfinite(float(entry[key])):
                raise ScenarioError(f"vertex {idx} has non-finite {key}")
        reward = float(entry["reward"])
        if reward < 0:
            raise ScenarioError(f"vertex {idx} has negative reward {reward}")
        coverage = []
        for pair in entry.get("coverage", []):
            cell, weight = pair
            if not math.isfinite(float(weight)):
                raise ScenarioError(f"vertex {idx} has non-finite coverage weight for cell {cell}")
            if float(weight) < 0:
                raise ScenarioError(f"vertex {idx} has negative coverage weight for cell {cell}")
            coverage.append((int(cell), float(weight)))
        vertices.append(
            Vertex(id=int(entry["id"]), x=float(entry["x"]), y=float(entry["y"]),
                   reward=reward, coverage=tuple(coverage))
        )
    vertices.sort(key=lambda v: v.id)
    for pos, v in enumerate(vertices):
        if v.id != pos:
            raise ScenarioError(f"vertex ids must be dense 0..{len(vertices) - 1}; found {v.id} at position {pos}")
    return vertices


def _validate_scenario(graph: MetricGraph, starts: Sequence[int], budget: float,
                       alpha: int, reward_kind: str) -> Scenario:
    if reward_kind not in _REWARD_KINDS:
        raise ScenarioError(f"reward_kind must be one of {_REWARD_KINDS}, got {reward_kind!r}")
    if not starts:
        raise ScenarioError("scenario must have at least one robot start")
    for s in starts:
        if not 0 <= s < graph.n:
            raise ScenarioError(f"start vertex {s} is not a valid vertex id")
    if not math.isfinite(budget) or budget < 0:
        raise ScenarioError(f"budget must be finite and non-negative, got {budget}")
    n_robots = len(starts)
    if not 0 <= alpha < n_robots:
        raise ScenarioError(f"alpha must be < {n_robots} (number of robots), got {alpha}")
    report = verify_metric(graph)
    if not report.ok:
        raise ScenarioError("graph is not metric: " + "; ".join(report.entries()[:5]))
    return Scenario(graph=graph, starts=tuple(int(s) for s in starts), budget=float(budget),
                    alpha=int(alpha), reward_kind=reward_kind)


def scenario_from_document(doc: dict) -> Scenario:
    """Build and fully validate a Scenario from a parsed document."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    unknown = set(doc) - _SCENARIO_KEYS
    if unknown:
        raise ScenarioError(f"unknown scenario keys {sorted(unknown)}")
    for key in ("vertices", "starts", "budget", "alpha", "reward_kind"):
        if key not in doc:
            raise ScenarioError(f"scenario document is missing key '{key}'")
    vertices = _validate_vertices(doc["vertices"])
    n = len(vertices)
    if "distance_matrix" in doc:
        mat = np.asarray(doc["distance_matrix"], dtype=float)
        if mat.shape != (n, n):
            raise ScenarioError(f"distance_matrix must be {n}x{n}, got {mat.shape}")
        if not np.isfinite(mat).all():
            bad = np.argwhere(~np.isfinite(mat))[0]
            raise ScenarioError(
                f"distance_matrix must be finite, violated at ({bad[0]},{bad[1]})")
        probe = MetricGraph(vertices=tuple(vertices), distance=mat, euclidean=False)
        report = verify_metric(probe)
        if report.diagonal:
            raise ScenarioError(f"distance_matrix diagonal must be zero, violated at {report.diagonal[0]}")
        if report.asymmetry:
            i, j = report.asymmetry[0]
            raise ScenarioError(f"distance_matrix must be symmetric, violated at ({i},{j})")
        if report.negative:
            i, j = report.negative[0]
            raise ScenarioError(f"distance_matrix must be non-negative, violated at ({i},{j})")
        if report.triangle:
            i, j, k = report.triangle[0]
            raise ScenarioError(f"distance_matrix violates the triangle inequality at ({i},{j},{k})")
        graph = probe
    else:
        graph = MetricGraph.from_positions(vertices)
    return _validate_scenario(graph, [int(s) for s in doc["starts"]], float(doc["budget"]),
                              int(doc["alpha"]), str(doc["reward_kind"]))


def metric_report_from_document(doc: dict) -> Union[MetricReport, None]:
    """Best-effort metric diagnosis of a possibly invalid document.

    Strict loading stops at the first violation; verification tooling wants
    them all. Returns None when the document is too malformed to build a
    distance matrix at all.
    """
    try:
        vertices = _validate_vertices(doc["vertices"])
        n = len(vertices)
        if "distance_matrix" in doc:
            mat = np.asarray(doc["distance_matrix"], dtype=float)
            if mat.shape != (n, n) or not np.isfinite(mat).all():
                return None
            graph = MetricGraph(tuple(vertices), mat, euclidean=False)
        else:
            graph = MetricGraph.from_positions(vertices)
        return verify_metric(graph)
    except (ScenarioError, KeyError, TypeError, ValueError):
        return None


def load_scenario(data: Union[bytes, str]) -> Scenario:
    """Parse a UTF-8 JSON scenario document and validate every invariant."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"scenario document is not valid JSON: {exc}") from exc
    return scenario_from_document(doc)


def scenario_to_document(scenario: Scenario) -> dict:
    """Inverse of scenario_from_document; omits Euclidean-derived matrices."""
    doc = {
        "vertices": [
            {
                "id": v.id, "x": v.x, "y": v.y, "reward": v.reward,
                **({"coverage": [[c, w] for c, w in v.coverage]} if v.coverage else {}),
            }
            for v in scenario.graph.vertices
        ],
        "starts": list(scenario.starts),
        "budget": scenario.budget,
        "alpha": scenario.alpha,
        "reward_kind": scenario.reward_kind,
    }
    if not scenario.graph.euclidean:
        doc["distance_matrix"] = [[float(x) for x in row] for row in scenario.graph.distance]
    return doc


def dump_scenario(scenario: Scenario) -> bytes:
    """Canonical UTF-8 JSON bytes (stable key order) for hashing and storage."""
    doc = scenario_to_document(scenario)
    return (json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


@dataclass(frozen=True)
class GaussianBump:
    cx: float
    cy: float
    amplitude: float
    sigma: float


def field_value(bumps: Sequence[GaussianBump], x: float, y: float) -> float:
    total = 0.0
    for b in bumps:
        r2 = (x - b.cx) ** 2 + (y - b.cy) ** 2
        total += b.amplitude * math.exp(-r2 / (2.0 * b.sigma ** 2))
    return total


def _grid_positions(n: int, side: float) -> np.ndarray:
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    xs = np.linspace(0.0, side, cols) if cols > 1 else np.array([side / 2.0])
    ys = np.linspace(0.0, side, rows) if rows > 1 else np.array([side / 2.0])
    pos = [(xs[k % cols], ys[k // cols]) for k in range(n)]
    return np.array(pos, dtype=float)


def generate_scenario(n_vertices: int, n_robots: int, alpha: int, budget: float,
                      layout: str = "grid",
                      bumps: Union[int, Sequence[GaussianBump]] = 3,
                      seed: int = 0,
                      reward_kind: str = "modular",
                      side: float = AREA_SIDE) -> Scenario:
    """Deterministically generate a scenario from parameters and a seed.

    Vertices live on a `side` x `side` area, laid out on a grid or uniformly
    at random. Rewards sample an importance field rescaled to integers in
    [0, 100]. When `bumps` is an int, the field is that many concentrated
    Gaussian bumps of comparable height at seeded locations plus one broad
    low background bump, mimicking a concentration map with a few hotspots
    over a mildly interesting sea; pass explicit bumps for full control.
    Coverage scenarios overlay a cell lattice: each vertex covers nearby
    cells and cell weights sample the same field. Robot starts are drawn
    uniformly from the vertices (shared starts allowed). The same arguments
    and seed always produce a byte-identical scenario.
    """
    if n_vertices < 1:
        raise ScenarioError("n_vertices must be >= 1")
    if n_robots < 1:
        raise ScenarioError("n_robots must be >= 1")
    if not 0 <= alpha < n_robots:
        raise ScenarioError(f"alpha must satisfy 0 <= alpha < n_robots, got alpha={alpha}, n_robots={n_robots}")
    if budget < 0:
        raise ScenarioError("budget must be non-negative")
    if layout not in ("grid", "uniform"):
        raise ScenarioError(f"layout must be 'grid' or 'uniform', got {layout!r}")

    rng = np.random.default_rng(seed)
    if isinstance(bumps, int):
        if bumps < 1:
            raise ScenarioError("number of bumps must be >= 1")
        bump_list = tuple(
            GaussianBump(
                cx=float(rng.uniform(0.15 * side, 0.85 * side)),
                cy=float(rng.uniform(0.15 * side, 0.85 * side)),
                amplitude=float(rng.uniform(0.9, 1.0)),
                sigma=float(rng.uniform(side / 9.0, side / 6.4)),
            )
            for _ in range(bumps)
        ) + (GaussianBump(cx=side / 2.0, cy=side / 2.0, amplitude=0.3, sigma=0.9 * side),)
    else:
        bump_list = tuple(bumps)
        if not bump_list:
            raise ScenarioError("bump list must be non-empty")

    if layout == "grid":
        pos = _grid_positions(n_vertices, side)
    else:
        pos = rng.uniform(0.0, side, size=(n_vertices, 2))

    values = np.array([field_value(bump_list, x, y) for x, y in pos])
    peak = float(values.max())
    rewards = np.rint(100.0 * values / peak) if peak > 0 else np.zeros(n_vertices)

    coverage: list[tuple[tuple[int, float], ...]] = [() for _ in range(n_vertices)]
    if reward_kind == "coverage":
        cells_per_side = max(2, math.ceil(math.sqrt(n_vertices) / 2))
        pitch = side / cells_per_side
        centers = [
            ((i + 0.5) * pitch, (j + 0.5) * pitch)
            for j in range(cells_per_side) for i in range(cells_per_side)
        ]
        cell_vals = np.array([field_value(bump_list, cx, cy) for cx, cy in centers])
        cell_peak = float(cell_vals.max())
        cell_w = np.rint(100.0 * cell_vals / cell_peak) if cell_peak > 0 else np.zeros(len(centers))
        radius = 1.3 * pitch
        for k in range(n_vertices):
            cov = []
            for c, (cx, cy) in enumerate(centers):
                if math.hypot(pos[k][0] - cx, pos[k][1] - cy) <= radius:
                    cov.append((c, float(cell_w[c])))
            coverage[k] = tuple(cov)

    vertices = tuple(
        Vertex(id=k, x=float(pos[k][0]), y=float(pos[k][1]),
               reward=float(rewards[k]), coverage=coverage[k])
        for k in range(n_vertices)
    )
    starts = [int(s) for s in rng.integers(0, n_vertices, size=n_robots)]
    graph = MetricGraph.from_positions(vertices)
    return _validate_scenario(graph, starts, budget, alpha, reward_kind)


def resample_starts(scenario: Scenario, seed: int) -> Scenario:
    """New scenario with starts redrawn uniformly from the vertices."""
    rng = np.random.default_rng(seed)
    starts = [int(s) for s in rng.integers(0, scenario.graph.n, size=scenario.n_robots)]
    return scenario.with_starts(starts)
