"""Figure-of-merit and model-parameter extraction from sweep data.

Works on simulated or measured data alike: Bode-Q from one-port reflection,
fr/fa from admittance extrema, full mBVD fits, and propagation-loss factors
from delay-line transmission versus gap.

Conventions
-----------
Bode-Q : ``Q(w) = w * tau_gd * |S11| / (1 - |S11|^2)`` with the group delay
    ``tau_gd = -d(phase S11)/dw`` from central differences on the unwrapped
    phase (one-sided at the endpoints).  No smoothing is applied by default
    because smoothing biases the extracted maximum.
Loss factor : amplitude decay per radian of propagation phase,
    ``|S21(x)| = A0 * exp(-2*pi*delta*x)`` with the gap ``x`` in wavelengths.
    The relation between this delta and any FEM damping input is empirical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import (
    BracketingError,
    DomainError,
    ExtractionError,
    GridTooCoarseError,
    RankError,
)
from .network import SParameterSet
from .resonator import (
    MotionalBranch,
    ResonatorModel,
    coupling_from_frequencies,
    quality_factor,
    resonance_frequencies,
)

#: 1 - |S11|^2 below this marks a Q sample as unbounded.
_UNBOUNDED_EPS = 1e-12

#: Log-sharpness above which an |Y| extremum is treated as near-singular
#: (lossless pole/zero) instead of a smooth rounded peak.
_SINGULAR_SHARPNESS = 1.0


@dataclass(frozen=True)
class QCurve:
    """Bode-Q versus frequency; unbounded samples are ``inf`` markers."""

    grid: np.ndarray
    q: np.ndarray
    qmax: float
    f_at_qmax: float

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if grid.shape != q.shape:
            raise DomainError("grid and q must have the same shape")
        finite = q[np.isfinite(q)]
        if finite.size and self.qmax != float(np.max(finite)):
            raise DomainError("qmax must be the largest finite q sample")
        if self.f_at_qmax not in grid:
            raise DomainError("f_at_qmax must lie on the grid")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class DelayLineDataset:
    """|S21| of delay lines at several gaps (gaps in wavelengths).

    ``damping_input`` records the material damping used to generate the data
    (metadata only; it does not enter the fit).
    """

    runs: tuple
    damping_input: float = 0.002

    def __post_init__(self):
        runs = tuple((float(g), float(m)) for g, m in self.runs)
        if len(runs) < 2 or len({g for g, _ in runs}) < 2:
            raise DomainError("need at least 2 runs with distinct gaps")
        if any(not (0.0 < m <= 1.0) for _, m in runs):
            raise DomainError("|S21| magnitudes must lie in (0, 1]")
        if any(g <= 0 for g, _ in runs):
            raise DomainError("gaps must be positive")
        object.__setattr__(self, "runs", runs)


@dataclass(frozen=True)
class FitReport:
    """Outcome of an mBVD fit."""

    model: ResonatorModel
    residual: float
    iterations: int
    converged: bool

    def __post_init__(self):
        if self.residual < 0:
            raise DomainError("residual must be >= 0")


def bode_q(s11_set: SParameterSet, smooth_points: int = 1) -> QCurve:
    """Bode-Q curve from a one-port reflection sweep.

    Parameters
    ----------
    s11_set : SParameterSet
        One-port set, at least 3 points.
    smooth_points : int
        Odd moving-average window applied to the group delay.  Off (1) by
        default: smoothing biases the extracted maximum, so it is strictly
        opt-in for noisy measured data.

    Raises
    ------
    GridTooCoarseError
        An adjacent unwrapped phase step reaches pi, so unwrapping is
        ambiguous.
    ExtractionError
        Every sample is unbounded (pure lossless reflection).
    """
    if s11_set.ports != 1:
        raise DomainError("bode_q needs a one-port set")
    if smooth_points < 1 or smooth_points % 2 == 0:
        raise DomainError(f"smooth_points must be a positive odd integer, got {smooth_points}")
    f = s11_set.grid
    if f.size < 3:
        raise DomainError("need at least 3 grid points")
    s11 = s11_set.data[:, 0, 0]
    phase = np.unwrap(np.angle(s11))
    if np.any(np.abs(np.diff(phase)) >= math.pi):
        raise GridTooCoarseError(
            "adjacent phase step >= pi; refine the frequency grid"
        )
    w = 2.0 * math.pi * f
    tau_gd = -np.gradient(phase, w)
    if smooth_points > 1:
        kernel = np.ones(smooth_points) / smooth_points
        tau_gd = np.convolve(tau_gd, kernel, mode="same")
    mag = np.abs(s11)
    denom = 1.0 - mag * mag
    unbounded = denom < _UNBOUNDED_EPS
    q = np.empty_like(f)
    q[unbounded] = np.inf
    q[~unbounded] = (w * tau_gd * mag)[~unbounded] / denom[~unbounded]
    if np.all(unbounded):
        raise ExtractionError("all samples unbounded (|S11| = 1); qmax undefined")
    finite = np.where(np.isfinite(q), q, -np.inf)
    i = int(np.argmax(finite))
    return QCurve(grid=f, q=q, qmax=float(q[i]), f_at_qmax=float(f[i]))


def _refine_extremum(f, log_mag, mag, i, kind):
    """Sub-grid extremum location from three samples around index ``i``.

    A parabola on log|Y| nails rounded (lossy) peaks.  Lossless data has a
    pole/zero instead, where log|Y| is singular and the parabola lands short;
    there |Y| (minimum) or 1/|Y| (maximum) is locally V-shaped and the vertex
    follows from the two outer samples alone.
    """
    x0, x1, x2 = f[i - 1], f[i], f[i + 1]
    y0, y1, y2 = log_mag[i - 1], log_mag[i], log_mag[i + 1]
    sharpness = (2 * y1 - y0 - y2) if kind == "max" else (y0 + y2 - 2 * y1)
    if sharpness > _SINGULAR_SHARPNESS:
        u = 1.0 / mag[i - 1 : i + 2] if kind == "max" else mag[i - 1 : i + 2]
        return x1 + 0.5 * (x2 - x0) * (u[0] - u[2]) / (u[0] + u[2])
    denom = (x1 - x0) * (y1 - y2) + (x2 - x1) * (y1 - y0)
    if denom == 0.0:
        return x1
    num = (x1 - x0) ** 2 * (y1 - y2) - (x2 - x1) ** 2 * (y1 - y0)
    return x1 + 0.5 * num / denom


def extract_fr_fa(grid, y) -> tuple[float, float]:
    """(fr, fa) from the |Y| maximum and minimum of an admittance sweep.

    Both extrema must be interior to the grid; each is refined to sub-grid
    accuracy (see :func:`_refine_extremum`).  The result is invariant under
    uniform scaling of ``y``.
    """
    f = np.asarray(grid, dtype=float)
    y = np.asarray(y, dtype=complex)
    if f.ndim != 1 or f.size < 3 or y.shape != f.shape:
        raise DomainError("need 1-D grid and admittance arrays of equal length >= 3")
    mag = np.abs(y)
    if np.any(mag <= 0):
        raise DomainError("admittance magnitudes must be positive")
    log_mag = np.log(mag)
    i_max = int(np.argmax(log_mag))
    i_min = int(np.argmin(log_mag))
    if i_max in (0, f.size - 1):
        raise BracketingError("|Y| maximum sits at the grid edge; widen the sweep")
    if i_min in (0, f.size - 1):
        raise BracketingError("|Y| minimum sits at the grid edge; widen the sweep")
    fr = _refine_extremum(f, log_mag, mag, i_max, "max")
    fa = _refine_extremum(f, log_mag, mag, i_min, "min")
    return float(fr), float(fa)


def _as_admittance(data, reference_impedance=50.0):
    """Accept an SParameterSet (one-port) or a (grid, Y) pair."""
    if isinstance(data, SParameterSet):
        if data.ports != 1:
            raise DomainError("mBVD fit needs a one-port set")
        s11 = data.data[:, 0, 0]
        z0 = data.reference_impedance
        y = (1.0 - s11) / (1.0 + s11) / z0
        return data.grid, y
    grid, y = data
    return np.asarray(grid, dtype=float), np.asarray(y, dtype=complex)


def _mbvd_y(f, rs, r0, rm, lm, cm, c0):
    jw = 2j * math.pi * f
    ycore = jw * c0 / (1.0 + jw * c0 * r0) + 1.0 / (rm + jw * lm + 1.0 / (jw * cm))
    return ycore / (1.0 + rs * ycore)


def fit_mbvd(data, max_iterations: int = 4000) -> FitReport:
    """Fit a six-parameter mBVD model (rs, r0, rm, lm, cm, c0) to a sweep.

    Initialization: ``c0 + cm`` from the low-frequency susceptance slope,
    split using the extracted fa/fr ratio; ``lm`` from fr; loop resistance
    from the conductance peak; rs/r0 from the low-frequency conductance.
    Refinement: damped least squares on the logs of the six parameters
    (positivity for free) minimizing the per-point relative complex
    admittance misfit.  Declared converged when the step-relative change
    drops below 1e-10 or the residual below 1e-8; hitting the iteration cap
    returns ``converged=False`` instead of raising.

    Parameters
    ----------
    data : SParameterSet or (grid, admittance) pair
        One-port data bracketing both fr and fa.
    max_iterations : int
        Cap on model evaluations in the refinement.
    """
    f, y = _as_admittance(data)
    fr, fa = extract_fr_fa(f, y)  # raises BracketingError without a resonance
    w = 2.0 * math.pi * f
    n_edge = max(3, f.size // 20)
    c_lf = float(np.median((y.imag / w)[:n_edge]))  # ~ c0 + cm below fr
    ratio = (fa / fr) ** 2 - 1.0  # cm / c0
    if c_lf <= 0 or ratio <= 0:
        raise DomainError("data is not capacitive below resonance; cannot seed fit")
    c0 = c_lf / (1.0 + ratio)
    cm = c0 * ratio
    lm = 1.0 / ((2.0 * math.pi * fr) ** 2 * cm)
    r_loop = 1.0 / float(np.max(y.real))  # ~ rs + rm at the conductance peak
    g_lf = max(float(np.median((y.real / w**2)[:n_edge])), 1e-30)
    rs0 = max(0.5 * g_lf / (c0 + cm) ** 2, 1e-6 * r_loop)
    r00 = max(0.5 * g_lf / c0**2, 1e-6 * r_loop)
    x0 = np.log([rs0, r00, 0.9 * r_loop, lm, cm, c0])

    scale = np.abs(y)

    def residuals(p):
        ym = _mbvd_y(f, *np.exp(p))
        d = (ym - y) / scale
        return np.concatenate([d.real, d.imag])

    result = least_squares(
        residuals,
        x0,
        method="trf",
        bounds=(-92.0, 23.0),  # keeps exp() finite; generous physical range
        xtol=1e-10,
        ftol=1e-14,
        gtol=1e-14,
        max_nfev=max_iterations,
    )
    rs, r0, rm, lm, cm, c0 = np.exp(result.x)
    residual = float(np.sqrt(np.mean(result.fun**2)))
    model = ResonatorModel(
        c0=c0, main=MotionalBranch(rm=rm, lm=lm, cm=cm), rs=rs, r0=r0
    )
    converged = bool(result.status != 0) or residual < 1e-8
    return FitReport(
        model=model,
        residual=residual,
        iterations=int(result.nfev),
        converged=converged,
    )


def delay_line_fit(dataset) -> tuple[float, float]:
    """(delta, a0) for ``|S21(x)| = a0 * exp(-2*pi*delta*x)``, x in wavelengths.

    ``delta`` is the least-squares slope of ``ln|S21|`` against the
    propagation phase ``2*pi*x`` (negated); ``a0`` absorbs gap-independent
    transduction loss.  Accepts a :class:`DelayLineDataset` or a raw sequence
    of (gap, magnitude) pairs.
    """
    runs = dataset.runs if isinstance(dataset, DelayLineDataset) else tuple(dataset)
    gaps = np.array([g for g, _ in runs], dtype=float)
    mags = np.array([m for _, m in runs], dtype=float)
    if gaps.size < 2 or np.unique(gaps).size < 2:
        raise RankError("need at least 2 distinct gaps to fit a slope")
    if np.any(mags <= 0):
        raise DomainError("|S21| magnitudes must be positive")
    x = 2.0 * math.pi * gaps
    design = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, np.log(mags), rcond=None)
    slope, intercept = coef
    return float(-slope), float(math.exp(intercept))


def fit_delay_line_loss(dataset) -> float:
    """Loss factor delta extracted from delay-line transmission data."""
    delta, _ = delay_line_fit(dataset)
    return delta


def figure_of_merit(k2: float, qmax: float) -> float:
    """Coupling-times-quality product ``k2 * qmax``."""
    if k2 < 0 or qmax < 0:
        raise DomainError("k2 and qmax must be non-negative")
    return k2 * qmax


def resonator_report(model: ResonatorModel) -> dict:
    """Analytic summary of a model: fr, fa, k2 and main-branch Q."""
    fr, fa = resonance_frequencies(model)
    return {
        "fr_hz": fr,
        "fa_hz": fa,
        "k2": coupling_from_frequencies(fr, fa),
        "q": quality_factor(model),
    }
