"""Ladder topologies, two-port cascading and passband metrics.

Stages are cascaded as ABCD transfer matrices in declaration order (port 1 to
port 2) and converted to S-parameters at the topology's reference impedance.
Every element is reciprocal, so ``S12`` is assigned from ``S21`` and the
equality is exact by construction.  Per-frequency evaluation is vectorized
with a fixed product order, keeping results bit-identical run to run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguityError, DomainError, ExtractionError
from .resonator import ResonatorModel, admittance


class Placement(enum.Enum):
    SERIES = "series"
    SHUNT = "shunt"


@dataclass(frozen=True)
class LadderStage:
    """One ladder element: a resonator placed in series or in shunt."""

    placement: Placement
    resonator: ResonatorModel

    def __post_init__(self):
        if not isinstance(self.placement, Placement):
            raise DomainError(f"placement must be a Placement, got {self.placement!r}")
        if not isinstance(self.resonator, ResonatorModel):
            raise DomainError("stage resonator must be a ResonatorModel")


@dataclass(frozen=True)
class LadderTopology:
    """Ordered ladder stages with a common port reference impedance."""

    stages: tuple
    reference_impedance: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if len(self.stages) < 1:
            raise DomainError("a topology needs at least one stage")
        if not all(isinstance(s, LadderStage) for s in self.stages):
            raise DomainError("stages must be LadderStage instances")
        z = self.reference_impedance
        if not (math.isfinite(z) and z > 0):
            raise DomainError(f"reference impedance must be > 0, got {z}")


@dataclass(frozen=True)
class SParameterSet:
    """Complex S-matrices on a strictly increasing frequency grid.

    ``data[k, i, j]`` is ``S_(i+1)(j+1)`` at ``grid[k]``; one- and two-port
    sets are supported.
    """

    grid: np.ndarray
    data: np.ndarray
    reference_impedance: float = 50.0

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        data = np.asarray(self.data, dtype=complex)
        if grid.ndim != 1 or grid.size == 0:
            raise DomainError("grid must be a non-empty 1-D array")
        if np.any(~np.isfinite(grid)) or np.any(grid <= 0):
            raise DomainError("grid frequencies must be finite and > 0")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if data.ndim != 3 or data.shape[0] != grid.size:
            raise DomainError("data must have shape (len(grid), ports, ports)")
        if data.shape[1] != data.shape[2] or data.shape[1] not in (1, 2):
            raise DomainError("ports must be 1 or 2")
        z = self.reference_impedance
        if not (math.isfinite(z) and z > 0):
            raise DomainError(f"reference impedance must be > 0, got {z}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "data", data)

    @property
    def ports(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class FilterMetrics:
    """Passband summary: center, insertion loss, 3-dB bandwidth, FBW."""

    fc: float
    il_db: float
    bw3db: float
    fbw: float

    def __post_init__(self):
        if not (math.isfinite(self.bw3db) and self.bw3db > 0):
            raise DomainError(f"bw3db must be > 0, got {self.bw3db}")
        if self.il_db < 0:
            raise DomainError(f"il_db must be >= 0, got {self.il_db}")
        if abs(self.fbw - self.bw3db / self.fc) > 1e-12 * max(self.fbw, 1e-30):
            raise DomainError("fbw must equal bw3db / fc")


def _resonator_y(model: ResonatorModel, f: np.ndarray) -> np.ndarray:
    y = admittance(model, f)
    return np.atleast_1d(np.asarray(y, dtype=complex))


def stage_abcd(stage: LadderStage, f):
    """ABCD matrix of one stage: ``[[1, Z], [0, 1]]`` for series placement,
    ``[[1, 0], [Y, 1]]`` for shunt, with ``Z = 1/Y`` from the resonator.

    Returns shape (2, 2) for scalar ``f`` and (n, 2, 2) for an array.
    """
    scalar = np.isscalar(f) or getattr(f, "ndim", 1) == 0
    f_arr = np.atleast_1d(np.asarray(f, dtype=float))
    y = _resonator_y(stage.resonator, f_arr)
    m = np.zeros((f_arr.size, 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    if stage.placement is Placement.SERIES:
        # keep Z finite at exact lossless anti-resonances (Y == 0)
        y_safe = np.where(y == 0, 1e-300 + 0j, y)
        m[:, 0, 1] = 1.0 / y_safe
    else:
        m[:, 1, 0] = y
    return m[0] if scalar else m


def _abcd_to_s(m: np.ndarray, z0: float) -> np.ndarray:
    a, b, c, d = m[:, 0, 0], m[:, 0, 1], m[:, 1, 0], m[:, 1, 1]
    den = a + b / z0 + c * z0 + d
    s = np.empty_like(m)
    s[:, 0, 0] = (a + b / z0 - c * z0 - d) / den
    s[:, 1, 0] = 2.0 / den
    s[:, 0, 1] = s[:, 1, 0]  # reciprocal by construction
    s[:, 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return s


def cascade_sweep(topology: LadderTopology, grid) -> SParameterSet:
    """Two-port S-parameters of the cascaded ladder over ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("frequency grid is empty")
    total = np.zeros((grid.size, 2, 2), dtype=complex)
    total[:, 0, 0] = 1.0
    total[:, 1, 1] = 1.0
    for stage in topology.stages:
        total = total @ stage_abcd(stage, grid)
    s = _abcd_to_s(total, topology.reference_impedance)
    return SParameterSet(grid, s, topology.reference_impedance)


def one_port_sweep(model: ResonatorModel, grid, reference_impedance: float = 50.0) -> SParameterSet:
    """One-port reflection ``S11 = (Z - Z0)/(Z + Z0)`` of a resonator."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise DomainError("frequency grid is empty")
    z0 = float(reference_impedance)
    if not (math.isfinite(z0) and z0 > 0):
        raise DomainError(f"reference impedance must be > 0, got {z0}")
    y = _resonator_y(model, grid)
    # (Z - Z0)/(Z + Z0) rewritten to stay finite when Y == 0
    s11 = (1.0 - z0 * y) / (1.0 + z0 * y)
    return SParameterSet(grid, s11.reshape(-1, 1, 1), z0)


def _interp_crossing(f_in, db_in, f_out, db_out, level):
    # linear-in-dB crossing between an in-band and an out-of-band sample
    if db_in == level:
        return f_in
    span = db_in - db_out
    if not np.isfinite(span) or span == 0.0:
        return f_in
    return f_in + (f_out - f_in) * (db_in - level) / span


def filter_metrics(sparams: SParameterSet, passband_hint=None, center: str = "arithmetic") -> FilterMetrics:
    """Extract passband metrics from a two-port sweep.

    The band reference level is the in-band peak of ``20*log10|S21|`` minus
    3 dB (relative to the peak, not to 0 dB, so lossy filters still report a
    bandwidth).  Band edges are the outermost level crossings around the
    peak, refined by linear interpolation in dB; ``fc`` is the arithmetic
    mean of the edges (``center="geometric"`` switches to the geometric
    mean), ``IL`` the negated in-band peak.

    Parameters
    ----------
    sparams : SParameterSet
        Two-port set.
    passband_hint : (float, float), optional
        Frequency window restricting the peak search when the sweep contains
        several disjoint passbands (e.g. a spurious overtone passband).
    center : {"arithmetic", "geometric"}

    Raises
    ------
    ExtractionError
        No contiguous band around the peak.
    AmbiguityError
        Multiple disjoint candidate bands and no hint window.
    """
    if sparams.ports != 2:
        raise DomainError("filter metrics need a two-port set")
    if center not in ("arithmetic", "geometric"):
        raise DomainError(f"unknown center convention {center!r}")
    f = sparams.grid
    mag = np.abs(sparams.data[:, 1, 0])
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag)

    if passband_hint is not None:
        lo, hi = float(passband_hint[0]), float(passband_hint[1])
        if not lo < hi:
            raise DomainError("passband hint must be (low, high) with low < high")
        window = (f >= lo) & (f <= hi)
        if not np.any(window):
            raise DomainError("passband hint window contains no grid points")
        i_peak = int(np.nonzero(window)[0][np.argmax(db[window])])
    else:
        i_peak = int(np.argmax(db))
    level = db[i_peak] - 3.0

    above = db >= level
    if passband_hint is None:
        runs = _contiguous_runs(above)
        if len(runs) > 1:
            listing = ", ".join(f"[{f[i]:.6g}, {f[j]:.6g}] Hz" for i, j in runs)
            raise AmbiguityError(
                f"multiple candidate passbands, pass a hint window: {listing}"
            )

    i = i_peak
    while i > 0 and above[i - 1]:
        i -= 1
    j = i_peak
    while j < f.size - 1 and above[j + 1]:
        j += 1
    if i == 0 or j == f.size - 1:
        raise ExtractionError("passband is not contained in the sweep")
    f_lo = _interp_crossing(f[i], db[i], f[i - 1], db[i - 1], level)
    f_hi = _interp_crossing(f[j], db[j], f[j + 1], db[j + 1], level)

    bw = f_hi - f_lo
    fc = 0.5 * (f_lo + f_hi) if center == "arithmetic" else math.sqrt(f_lo * f_hi)
    il = -float(db[i_peak])
    if il < -1e-6:
        raise DomainError(f"|S21| peak above unity ({-il:.3g} dB); data is not passive")
    il = max(il, 0.0)
    return FilterMetrics(fc=fc, il_db=il, bw3db=bw, fbw=bw / fc)


def _contiguous_runs(mask: np.ndarray):
    idx = np.nonzero(mask)[0]
    if idx.size == 0:
        return []
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.concatenate(([idx[0]], idx[breaks + 1]))
    ends = np.concatenate((idx[breaks], [idx[-1]]))
    return list(zip(starts, ends))


def passivity_defect(sparams: SParameterSet) -> float:
    """Most negative eigenvalue of ``I - S^H S`` over the grid (>= 0 means
    strictly passive; small negatives are numerical slack)."""
    s = sparams.data
    gram = np.eye(s.shape[1]) - np.conj(np.swapaxes(s, 1, 2)) @ s
    eig = np.linalg.eigvalsh(gram)
    return float(np.min(eig))
