"""Training point sets, prediction grids, and ground-truth coefficient vectors.

A design couples a finite training set with a finite held-out grid that
stands in for the rest of the domain; risk curves are means over that grid.
Prediction points never coincide with training points (exact coordinate
comparison).  Every constructor is deterministic per seed; when a random
draw produces duplicate training points, the seed is bumped and the retry is
recorded on the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bases import legendre_gauss_nodes
from .errors import InvalidInputError

STRATEGIES = (
    "uniform_interval",
    "equispaced",
    "legendre_gauss",
    "sphere_uniform",
    "from_dataset",
)

THETA_SCHEMES = ("unstructured_iid", "power_decay", "explicit")

_MAX_RETRIES = 64  # duplicate-draw retries before giving up


@dataclass(frozen=True, eq=False)
class SampleDesign:
    """Training points and a disjoint prediction grid, both (count, dim)."""

    train_points: np.ndarray
    prediction_points: np.ndarray
    strategy: str
    seed: int
    effective_seed: int

    @property
    def n_train(self) -> int:
        return self.train_points.shape[0]

    @property
    def all_points(self) -> np.ndarray:
        """Training rows first, then prediction rows."""
        return np.vstack([self.train_points, self.prediction_points])


@dataclass(frozen=True)
class ParameterSpec:
    """Generation scheme for the ground-truth coefficient vector.

    ``unstructured_iid`` draws i.i.d. mean-zero normals with the given
    variance; ``power_decay`` sets magnitude scale*(j+1)**(-exponent) with
    seeded random signs unless ``random_signs`` is off; ``explicit`` uses the
    supplied values directly.
    """

    scheme: str
    length: int
    seed: int = 0
    variance: float = 1.0
    scale: float = 1.0
    exponent: float = 2.0
    random_signs: bool = True
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.scheme not in THETA_SCHEMES:
            raise InvalidInputError(f"unknown coefficient scheme {self.scheme!r}")
        if self.length < 1:
            raise InvalidInputError("length must be at least 1")
        if self.scheme == "unstructured_iid" and self.variance < 0:
            raise InvalidInputError("variance must be nonnegative")
        if self.scheme == "explicit":
            if self.values is None or len(self.values) != self.length:
                raise InvalidInputError("explicit scheme requires values matching length")


def _row_key(row: np.ndarray) -> bytes:
    return row.tobytes()


def _has_duplicates(points: np.ndarray) -> bool:
    seen = set()
    for row in points:
        key = _row_key(row)
        if key in seen:
            return True
        seen.add(key)
    return False


def _interval_grid(a: float, b: float, grid_size: int, exclude: np.ndarray,
                   half_open: bool = False) -> np.ndarray:
    """Equispaced fill of [a, b] (or [a, b)) skipping excluded coordinates."""
    taken = {_row_key(row) for row in exclude}
    count = grid_size + exclude.shape[0]
    while True:
        if half_open:
            candidates = a + (np.arange(count) + 0.5) * (b - a) / count
        else:
            candidates = np.linspace(a, b, count)
        rows = candidates[:, None]
        keep = [row for row in rows if _row_key(row) not in taken]
        if len(keep) >= grid_size:
            return np.vstack(keep[:grid_size])
        count = 2 * count + 1


def make_design(strategy: str, n: int, grid_size: int, *, seed: int = 0,
                interval: tuple[float, float] = (-1.0, 1.0), period: float = 1.0,
                dim: int | None = None, points: np.ndarray | None = None) -> SampleDesign:
    """Construct a training set of size n plus a disjoint prediction grid.

    ``interval`` bounds the 1-D strategies, ``period`` sets the half-open
    domain for equispaced sampling, ``dim`` is the ambient dimension for the
    sphere, and ``points`` supplies the candidate pool for ``from_dataset``.
    """
    if strategy not in STRATEGIES:
        raise InvalidInputError(f"unknown design strategy {strategy!r}")
    if n < 1:
        raise InvalidInputError("training count must be at least 1")
    if grid_size < 1:
        raise InvalidInputError("prediction grid must be nonempty")

    if strategy == "equispaced":
        if period <= 0:
            raise InvalidInputError("period must be positive")
        train = (np.arange(n) * period / n)[:, None]
        grid = _interval_grid(0.0, period, grid_size, train, half_open=True)
        return SampleDesign(train, grid, strategy, seed, seed)

    if strategy == "legendre_gauss":
        train = legendre_gauss_nodes(n)[:, None]
        grid = _interval_grid(-1.0, 1.0, grid_size, train)
        return SampleDesign(train, grid, strategy, seed, seed)

    if strategy == "uniform_interval":
        a, b = float(interval[0]), float(interval[1])
        if not a < b:
            raise InvalidInputError(f"invalid interval [{a}, {b}]")
        effective = seed
        for _ in range(_MAX_RETRIES):
            rng = np.random.default_rng(effective)
            train = rng.uniform(a, b, n)[:, None]
            if not _has_duplicates(train):
                break
            effective += 1
        else:
            raise InvalidInputError(f"could not draw {n} distinct points on [{a}, {b}]")
        grid = _interval_grid(a, b, grid_size, train)
        return SampleDesign(train, grid, strategy, seed, effective)

    if strategy == "sphere_uniform":
        if dim is None or dim < 1:
            raise InvalidInputError("sphere_uniform requires a positive dim")
        effective = seed
        for _ in range(_MAX_RETRIES):
            rng = np.random.default_rng(effective)
            raw = rng.standard_normal((n, dim))
            train = raw / np.linalg.norm(raw, axis=1, keepdims=True) * np.sqrt(dim)
            if not _has_duplicates(train):
                break
            effective += 1
        else:
            raise InvalidInputError(f"could not draw {n} distinct points on the dim-{dim} sphere")
        taken = {_row_key(row) for row in train}
        grid_rows = []
        for _ in range(_MAX_RETRIES):
            raw = rng.standard_normal((grid_size, dim))
            fresh = raw / np.linalg.norm(raw, axis=1, keepdims=True) * np.sqrt(dim)
            for row in fresh:
                key = _row_key(row)
                if key not in taken:
                    grid_rows.append(row)
                    taken.add(key)
                if len(grid_rows) == grid_size:
                    break
            if len(grid_rows) == grid_size:
                break
        else:
            raise InvalidInputError(
                f"could not fill a {grid_size}-point prediction grid on the dim-{dim} sphere"
            )
        return SampleDesign(train, np.vstack(grid_rows), strategy, seed, effective)

    # from_dataset: seeded shuffle, skipping exact coordinate duplicates of the
    # training selection (retrying the seed cannot remove dataset duplicates)
    if points is None:
        raise InvalidInputError("from_dataset requires a points array")
    pool = np.asarray(points, dtype=float)
    if pool.ndim != 2:
        raise InvalidInputError(f"expected a 2-D point pool, got shape {pool.shape}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(pool.shape[0])
    train_rows: list[np.ndarray] = []
    taken: set[bytes] = set()
    rest: list[np.ndarray] = []
    for idx in order:
        row = pool[idx]
        key = _row_key(row)
        if len(train_rows) < n:
            if key in taken:
                continue
            train_rows.append(row)
            taken.add(key)
        else:
            rest.append(row)
    if len(train_rows) < n:
        raise InvalidInputError(
            f"dataset has only {len(train_rows)} distinct points, {n} requested"
        )
    grid_rows = [row for row in rest if _row_key(row) not in taken][:grid_size]
    if len(grid_rows) < grid_size:
        raise InvalidInputError(
            f"dataset leaves only {len(grid_rows)} prediction points, {grid_size} requested"
        )
    return SampleDesign(np.vstack(train_rows), np.vstack(grid_rows), strategy, seed, seed)


def make_theta(spec: ParameterSpec) -> np.ndarray:
    """Ground-truth coefficient vector, deterministic per scheme and seed."""
    if spec.scheme == "explicit":
        return np.asarray(spec.values, dtype=float)
    rng = np.random.default_rng(spec.seed)
    if spec.scheme == "unstructured_iid":
        return rng.normal(0.0, np.sqrt(spec.variance), spec.length)
    magnitudes = spec.scale * np.power(np.arange(1, spec.length + 1, dtype=float), -spec.exponent)
    if spec.random_signs:
        return magnitudes * rng.choice((-1.0, 1.0), spec.length)
    return magnitudes
