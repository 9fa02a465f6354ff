"""Analytic well-placement and control surrogate.

A deterministic stand-in for a reservoir simulator.  The decision vector has
90 entries: three movable wells described by heel and toe coordinates in the
unit cube (18 values), then one bottom-hole control level per well per control
period for all 18 wells (72 values, unit-scaled).

Placement quality comes from a smooth field built as a sum of anisotropic
Gaussian lobes, sampled at each movable well's heel, midpoint, and toe, minus
Gaussian crowding penalties against the other movable wells and the fixed
wells.  Control levels feed concave per-well production curves that yield
oil, produced-water, and injected-water totals; the scalar objective is oil
minus a weighted water-handling charge.  Higher is better.

All coefficients live in a plain-text fixture shipped with the package, so
evaluations are stable across releases.  The fixture grammar is
``key = value`` with whitespace-separated numbers, ``#`` comments, and blank
lines ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .core import ProductionTotals, SearchSpace
from .errors import ConfigurationError

FIXTURE_NAME = "well_proxy_v1.txt"

PROXY_DIMENSION = 90
PLACEMENT_VARS = 18


@dataclass(frozen=True)
class WellProxyConfig:
    """Structural constants of the surrogate's decision vector."""

    n_movable_wells: int = 3
    coords_per_well: int = 6
    n_wells_total: int = 18
    n_control_times: int = 4
    weight_water: float = 0.1

    def __post_init__(self) -> None:
        problems = []
        for label, value in (
            ("n_movable_wells", self.n_movable_wells),
            ("coords_per_well", self.coords_per_well),
            ("n_wells_total", self.n_wells_total),
            ("n_control_times", self.n_control_times),
        ):
            if value < 1:
                problems.append(f"{label} must be positive, got {value}")
        if self.n_movable_wells > self.n_wells_total:
            problems.append(
                f"n_movable_wells={self.n_movable_wells} exceeds n_wells_total={self.n_wells_total}"
            )
        if not math.isfinite(self.weight_water) or self.weight_water < 0.0:
            problems.append(f"weight_water must be finite and non-negative, got {self.weight_water}")
        if problems:
            raise ConfigurationError(*problems)

    @property
    def dimension(self) -> int:
        return self.n_movable_wells * self.coords_per_well + self.n_wells_total * self.n_control_times


@dataclass(frozen=True)
class ProxyParams:
    """Frozen surrogate coefficients loaded from the fixture file."""

    bump_centers: np.ndarray        # (n_bumps, 3)
    bump_sigmas: np.ndarray         # (n_bumps, 3)
    bump_weights: np.ndarray        # (n_bumps,)
    proximity_strength: float
    proximity_sigma: float
    fixed_centers: np.ndarray       # (n_fixed_wells, 3)
    time_weights: np.ndarray        # (n_control_times,)
    water_cut_profile: np.ndarray   # (n_control_times,)
    oil_rate: np.ndarray            # (n_producers,)
    water_rate: np.ndarray          # (n_producers,)
    injection_rate: np.ndarray      # (n_injectors,)
    curvature: float
    placement_gain: float
    injection_boost: float
    injection_scale: float
    weight_water: float
    min_separation: float
    sweet_spot: np.ndarray | None = None
    sweet_spot_value: float | None = None

    @property
    def n_producers(self) -> int:
        return self.oil_rate.shape[0]

    @property
    def n_injectors(self) -> int:
        return self.injection_rate.shape[0]

    @property
    def n_wells_total(self) -> int:
        return self.n_producers + self.n_injectors

    @property
    def n_control_times(self) -> int:
        return self.time_weights.shape[0]


def default_config() -> WellProxyConfig:
    params = default_params()
    return WellProxyConfig(
        n_movable_wells=3,
        coords_per_well=6,
        n_wells_total=params.n_wells_total,
        n_control_times=params.n_control_times,
        weight_water=params.weight_water,
    )


def canonical_placement(block: np.ndarray) -> np.ndarray:
    """Sort movable-well coordinate blocks into a canonical order.

    Accepts ``(18,)`` or ``(n, 18)`` placement blocks (or full 90-entry
    vectors, from which the placement prefix is taken) and returns the block
    with the three 6-entry well descriptions sorted lexicographically.  The
    evaluation pipeline runs on the canonical order, which is what makes the
    objective bit-identical under relabeling of the movable wells.
    """
    arr = np.asarray(block, dtype=np.float64)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[np.newaxis, :]
    if arr.shape[1] not in (PLACEMENT_VARS, PROXY_DIMENSION):
        raise ConfigurationError(
            f"expected {PLACEMENT_VARS} placement values or a full {PROXY_DIMENSION}-entry vector, "
            f"got {arr.shape[1]}"
        )
    wells = arr[:, :PLACEMENT_VARS].reshape(-1, 3, 6)
    # lexsort keys: last key is primary, so feed coordinates in reverse
    keys = wells.transpose(2, 0, 1)[::-1]
    order = np.lexsort(keys)
    sorted_wells = np.take_along_axis(wells, order[:, :, np.newaxis], axis=1)
    out = sorted_wells.reshape(-1, PLACEMENT_VARS)
    return out[0] if squeeze else out


def _field_values(points: np.ndarray, params: ProxyParams) -> np.ndarray:
    """Evaluate the placement-quality field at points of shape (..., 3)."""
    diff = (points[..., np.newaxis, :] - params.bump_centers) / params.bump_sigmas
    exponent = np.sum(diff * diff, axis=-1)
    return np.sum(params.bump_weights * np.exp(-0.5 * exponent), axis=-1)


def placement_score(block: np.ndarray, params: ProxyParams | None = None) -> np.ndarray:
    """Score (n, 18) placement blocks: field quality minus crowding."""
    if params is None:
        params = default_params()
    canon = canonical_placement(np.atleast_2d(np.asarray(block, dtype=np.float64)))
    wells = canon.reshape(-1, 3, 2, 3)
    heel = wells[:, :, 0, :]
    toe = wells[:, :, 1, :]
    mid = 0.5 * (heel + toe)
    samples = np.stack((heel, mid, toe), axis=2)
    quality = _field_values(samples, params).mean(axis=2)

    inv_two_sigma_sq = 0.5 / (params.proximity_sigma * params.proximity_sigma)
    crowding = np.zeros(canon.shape[0])
    for a in range(3):
        for b in range(a + 1, 3):
            gap = mid[:, a, :] - mid[:, b, :]
            crowding += params.proximity_strength * np.exp(
                -np.sum(gap * gap, axis=1) * inv_two_sigma_sq
            )
    gap_fixed = mid[:, :, np.newaxis, :] - params.fixed_centers
    crowding += params.proximity_strength * np.sum(
        np.exp(-np.sum(gap_fixed * gap_fixed, axis=3) * inv_two_sigma_sq), axis=(1, 2)
    )
    return quality.sum(axis=1) - crowding


def _production_arrays(
    x: np.ndarray, params: ProxyParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compute (q_op, q_wp, q_wi) for a (n, 90) position block."""
    n_prod = params.n_producers
    score = placement_score(x[:, :PLACEMENT_VARS], params)
    controls = x[:, PLACEMENT_VARS:].reshape(
        x.shape[0], params.n_wells_total, params.n_control_times
    )
    u_prod = controls[:, :n_prod, :]
    u_inj = controls[:, n_prod:, :]

    q_wi = np.einsum("njk,j,k->n", u_inj, params.injection_rate, params.time_weights)
    support = 1.0 + params.injection_boost * (1.0 - np.exp(-q_wi / params.injection_scale))
    oil = np.einsum(
        "njk,j,k->n",
        u_prod * (1.0 - params.curvature * u_prod),
        params.oil_rate,
        params.time_weights,
    )
    q_op = np.exp(params.placement_gain * score) * support * oil
    q_wp = np.einsum("njk,j,k->n", u_prod * u_prod, params.water_rate, params.water_cut_profile)
    return q_op, q_wp, q_wi


def well_proxy_batch(x: np.ndarray, params: ProxyParams | None = None) -> np.ndarray:
    """Raw objective values (higher is better) for a (n, 90) position block."""
    if params is None:
        params = default_params()
    block = np.asarray(x, dtype=np.float64)
    if block.ndim != 2 or block.shape[1] != PROXY_DIMENSION:
        raise ConfigurationError(
            f"expected a (count, {PROXY_DIMENSION}) position block, got shape {block.shape}"
        )
    q_op, q_wp, q_wi = _production_arrays(block, params)
    return q_op - params.weight_water * (q_wp + q_wi)


def well_proxy_eval(x: np.ndarray, config: WellProxyConfig | None = None) -> float:
    """Evaluate the surrogate at a single 90-entry decision vector."""
    params = default_params()
    if config is None:
        config = default_config()
    _check_config(config, params)
    point = np.asarray(x, dtype=np.float64)
    if point.ndim != 1 or point.shape[0] != config.dimension:
        raise ConfigurationError(
            f"well proxy input must be a flat vector of length {config.dimension}, "
            f"got shape {point.shape}"
        )
    q_op, q_wp, q_wi = _production_arrays(point[np.newaxis, :], params)
    return float(q_op[0] - config.weight_water * (q_wp[0] + q_wi[0]))


def production_totals(x: np.ndarray, config: WellProxyConfig | None = None) -> ProductionTotals:
    """Expose the underlying production split for a single decision vector."""
    params = default_params()
    if config is None:
        config = default_config()
    _check_config(config, params)
    point = np.asarray(x, dtype=np.float64)
    if point.ndim != 1 or point.shape[0] != config.dimension:
        raise ConfigurationError(
            f"well proxy input must be a flat vector of length {config.dimension}, "
            f"got shape {point.shape}"
        )
    q_op, q_wp, q_wi = _production_arrays(point[np.newaxis, :], params)
    return ProductionTotals(q_op=float(q_op[0]), q_wp=float(q_wp[0]), q_wi=float(q_wi[0]))


def _check_config(config: WellProxyConfig, params: ProxyParams) -> None:
    problems = []
    if config.n_wells_total != params.n_wells_total:
        problems.append(
            f"config declares {config.n_wells_total} wells, fixture defines {params.n_wells_total}"
        )
    if config.n_control_times != params.n_control_times:
        problems.append(
            f"config declares {config.n_control_times} control times, "
            f"fixture defines {params.n_control_times}"
        )
    if config.n_movable_wells * config.coords_per_well != PLACEMENT_VARS:
        problems.append(
            f"config places {config.n_movable_wells * config.coords_per_well} coordinates, "
            f"expected {PLACEMENT_VARS}"
        )
    if problems:
        raise ConfigurationError(*problems)


def proxy_objective(dimension: int = PROXY_DIMENSION):
    """Build the maximize-sense objective spec backed by the shipped fixture."""
    from .objectives import SENSE_MAXIMIZE, ObjectiveSpec

    params = default_params()
    expected = default_config().dimension
    if dimension != expected:
        raise ConfigurationError(
            f"well proxy is only defined at dimension {expected}, got {dimension}"
        )
    if params.sweet_spot is None or params.sweet_spot_value is None:
        raise ConfigurationError("fixture lacks the frozen best-known input")
    return ObjectiveSpec(
        name="well_proxy",
        dimension=expected,
        space=SearchSpace.box(expected, 0.0, 1.0),
        sense=SENSE_MAXIMIZE,
        batch=lambda positions: well_proxy_batch(positions, params),
        known_optimum=params.sweet_spot_value,
        optimum_position=params.sweet_spot.copy(),
    )


# -- fixture parsing ---------------------------------------------------------

_SCALAR_KEYS = {
    "proximity_strength",
    "proximity_sigma",
    "curvature",
    "placement_gain",
    "injection_boost",
    "injection_scale",
    "weight_water",
    "min_separation",
}
_INT_KEYS = {"schema_version", "n_bumps", "n_fixed_wells", "n_producers", "n_injectors"}
_VECTOR_KEYS = {
    "time_weights",
    "water_cut_profile",
    "oil_rate",
    "water_rate",
    "injection_rate",
    "sweet_spot_placement",
}


def _parse_fixture_text(text: str, origin: str) -> dict[str, list[float]]:
    entries: dict[str, list[float]] = {}
    problems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            problems.append(f"{origin}:{lineno}: expected 'key = values', got {line!r}")
            continue
        key, _, value = line.partition("=")
        key = key.strip()
        if key in entries:
            problems.append(f"{origin}:{lineno}: duplicate key {key!r}")
            continue
        try:
            entries[key] = [float(tok) for tok in value.split()]
        except ValueError:
            problems.append(f"{origin}:{lineno}: non-numeric value in {key!r}")
    if problems:
        raise ConfigurationError(*problems)
    return entries


def load_fixture(path: str | Path | None = None) -> ProxyParams:
    """Parse a surrogate coefficient file into :class:`ProxyParams`."""
    if path is None:
        source = resources.files("swarmstage").joinpath("data", FIXTURE_NAME)
        text = source.read_text(encoding="utf-8")
        origin = FIXTURE_NAME
    else:
        text = Path(path).read_text(encoding="utf-8")
        origin = str(path)
    entries = _parse_fixture_text(text, origin)
    problems = []

    def take(key: str) -> list[float]:
        values = entries.pop(key, None)
        if values is None:
            problems.append(f"missing key {key!r}")
            return []
        return values

    def take_scalar(key: str) -> float:
        values = take(key)
        if len(values) > 1:
            problems.append(f"key {key!r} expects one value, got {len(values)}")
        return values[0] if values else math.nan

    def take_int(key: str) -> int:
        value = take_scalar(key)
        if math.isfinite(value) and value != int(value):
            problems.append(f"key {key!r} expects an integer, got {value}")
            return 0
        return int(value) if math.isfinite(value) else 0

    schema = take_int("schema_version")
    if schema not in (0, 1):
        problems.append(f"unsupported schema_version {schema}")

    n_bumps = take_int("n_bumps")
    bump_centers, bump_sigmas, bump_weights = [], [], []
    for b in range(max(n_bumps, 0)):
        center = take(f"bump_center_{b}")
        sigma = take(f"bump_sigma_{b}")
        weight = take(f"bump_weight_{b}")
        if len(center) != 3:
            problems.append(f"bump_center_{b} expects 3 values, got {len(center)}")
        if len(sigma) != 3:
            problems.append(f"bump_sigma_{b} expects 3 values, got {len(sigma)}")
        if len(weight) != 1:
            problems.append(f"bump_weight_{b} expects 1 value, got {len(weight)}")
        if len(center) == 3 and len(sigma) == 3 and len(weight) == 1:
            bump_centers.append(center)
            bump_sigmas.append(sigma)
            bump_weights.append(weight[0])

    n_fixed = take_int("n_fixed_wells")
    n_producers = take_int("n_producers")
    n_injectors = take_int("n_injectors")
    fixed_centers = []
    first_fixed = 3  # movable wells occupy the leading indices
    for i in range(first_fixed, first_fixed + max(n_fixed, 0)):
        center = take(f"fixed_center_{i}")
        if len(center) != 3:
            problems.append(f"fixed_center_{i} expects 3 values, got {len(center)}")
        else:
            fixed_centers.append(center)

    vectors = {key: take(key) for key in sorted(_VECTOR_KEYS - {"sweet_spot_placement"})}
    scalars = {key: take_scalar(key) for key in sorted(_SCALAR_KEYS)}

    sweet_spot = None
    sweet_value = None
    if "sweet_spot_placement" in entries or "sweet_spot_value" in entries:
        placement = take("sweet_spot_placement")
        if len(placement) != PLACEMENT_VARS:
            problems.append(
                f"sweet_spot_placement expects {PLACEMENT_VARS} values, got {len(placement)}"
            )
        control_rows = []
        for j in range(n_producers + n_injectors):
            row = take(f"sweet_spot_controls_{j}")
            if len(row) != len(vectors.get("time_weights", [])) and len(row) != 4:
                problems.append(f"sweet_spot_controls_{j} has {len(row)} values")
            control_rows.extend(row)
        sweet_value = take_scalar("sweet_spot_value")
        if not problems:
            sweet_spot = np.array(placement + control_rows, dtype=np.float64)

    for key in entries:
        problems.append(f"unknown key {key!r}")

    if not problems:
        if len(vectors["oil_rate"]) != n_producers:
            problems.append(
                f"oil_rate expects {n_producers} values, got {len(vectors['oil_rate'])}"
            )
        if len(vectors["water_rate"]) != n_producers:
            problems.append(
                f"water_rate expects {n_producers} values, got {len(vectors['water_rate'])}"
            )
        if len(vectors["injection_rate"]) != n_injectors:
            problems.append(
                f"injection_rate expects {n_injectors} values, got {len(vectors['injection_rate'])}"
            )
        if len(vectors["time_weights"]) != len(vectors["water_cut_profile"]):
            problems.append("time_weights and water_cut_profile must have matching lengths")
        if n_producers + n_injectors != n_fixed + 3:
            problems.append(
                f"{n_producers} producers + {n_injectors} injectors must equal "
                f"{n_fixed} fixed wells + 3 movable"
            )
        if n_bumps < 1:
            problems.append("fixture must define at least one field lobe")
        for label, arr in (("bump_sigma", bump_sigmas), ("bump_weight", [bump_weights])):
            if np.any(np.asarray(arr) <= 0.0):
                problems.append(f"{label} values must be positive")
        for label in ("proximity_sigma", "injection_scale"):
            if not scalars[label] > 0.0:
                problems.append(f"{label} must be positive, got {scalars[label]}")
        if sweet_spot is not None and sweet_spot.shape[0] != PLACEMENT_VARS + (
            n_producers + n_injectors
        ) * len(vectors["time_weights"]):
            problems.append("frozen best-known input has the wrong total length")

    if problems:
        raise ConfigurationError(*problems)

    def frozen(values, shape=None) -> np.ndarray:
        arr = np.array(values, dtype=np.float64)
        if shape is not None:
            arr = arr.reshape(shape)
        arr.setflags(write=False)
        return arr

    return ProxyParams(
        bump_centers=frozen(bump_centers, (n_bumps, 3)),
        bump_sigmas=frozen(bump_sigmas, (n_bumps, 3)),
        bump_weights=frozen(bump_weights),
        proximity_strength=scalars["proximity_strength"],
        proximity_sigma=scalars["proximity_sigma"],
        fixed_centers=frozen(fixed_centers, (n_fixed, 3)),
        time_weights=frozen(vectors["time_weights"]),
        water_cut_profile=frozen(vectors["water_cut_profile"]),
        oil_rate=frozen(vectors["oil_rate"]),
        water_rate=frozen(vectors["water_rate"]),
        injection_rate=frozen(vectors["injection_rate"]),
        curvature=scalars["curvature"],
        placement_gain=scalars["placement_gain"],
        injection_boost=scalars["injection_boost"],
        injection_scale=scalars["injection_scale"],
        weight_water=scalars["weight_water"],
        min_separation=scalars["min_separation"],
        sweet_spot=frozen(sweet_spot) if sweet_spot is not None else None,
        sweet_spot_value=sweet_value,
    )


@lru_cache(maxsize=1)
def default_params() -> ProxyParams:
    """The shipped coefficient set, loaded once per process."""
    return load_fixture()
