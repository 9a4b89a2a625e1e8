"""Mode dispersion tables and geometry/frequency conversions.

A :class:`DispersionTable` stores sampled ``h/lambda -> (vp, k2)`` curves for
one acoustic mode and interpolates them with a shape-preserving (monotone)
piecewise cubic, so no phantom velocity extrema appear between samples.
Tables are immutable after construction; all queries are pure.

The exact simulated dispersion curves of the platform are not public; the
bundled starter tables (see :func:`builtin_table`) are smooth curves drawn
through the handful of trustworthy anchor points and carry their provenance
in the CSV comments.  Users with better FEM data should load their own
tables.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import AmbiguityError, DomainError, RangeError
from .resonator import COUPLING_SUP

#: Default mode-partition frequency: SH0 below, S0 at or above.
MODE_THRESHOLD_HZ = 3.0e9

#: SH0 phase velocities may ride up to this factor above the slow shear bulk
#: line before a table is rejected as unphysical.
SSB_TOLERANCE = 1.05


class AcousticMode(enum.Enum):
    SH0 = "SH0"
    S0 = "S0"


class Regime(enum.Enum):
    SED = "SED"
    STANDARD = "standard"
    OUT_OF_VALIDATED_RANGE = "out_of_validated_range"


@dataclass(frozen=True)
class PlatformConstants:
    """Geometry constants of the piezoelectric film stack.

    Defaults reflect the reference platform: 450 nm film, 120 nm electrodes,
    slow-shear-bulk velocity ~7150 m/s in the carrier.
    """

    film_thickness_h: float = 450e-9
    electrode_thickness: float = 120e-9
    v_ssb: float = 7150.0

    def __post_init__(self):
        for name in ("film_thickness_h", "electrode_thickness", "v_ssb"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class DispersionTable:
    """Sampled dispersion of one acoustic mode.

    Parameters
    ----------
    mode : AcousticMode
    samples : tuple of (h_over_lambda, vp_mps, k2)
        At least 4 samples, strictly increasing in h/lambda with
        ``0 < h/lambda < 1``, ``0 < vp < 20000`` m/s and ``0 < k2 < pi^2/8``.
    provenance : str
        Free-text record of where the samples came from.
    """

    mode: AcousticMode
    samples: tuple
    provenance: str = ""
    _vp: PchipInterpolator = field(init=False, repr=False, compare=False)
    _k2: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.mode, AcousticMode):
            raise DomainError(f"mode must be an AcousticMode, got {self.mode!r}")
        samples = tuple(tuple(float(v) for v in row) for row in self.samples)
        if any(len(row) != 3 for row in samples):
            raise DomainError("each sample must be (h_over_lambda, vp, k2)")
        if len(samples) < 4:
            raise DomainError("need at least 4 samples for cubic interpolation")
        x = np.array([s[0] for s in samples])
        vp = np.array([s[1] for s in samples])
        k2 = np.array([s[2] for s in samples])
        if np.any(x <= 0) or np.any(x >= 1) or np.any(np.diff(x) <= 0):
            raise DomainError("h_over_lambda must be strictly increasing in (0, 1)")
        if np.any(vp <= 0) or np.any(vp >= 20000):
            raise DomainError("vp must lie in (0, 20000) m/s")
        if np.any(k2 <= 0) or np.any(k2 >= COUPLING_SUP):
            raise DomainError(f"k2 must lie in (0, {COUPLING_SUP:.6f})")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "_vp", PchipInterpolator(x, vp))
        object.__setattr__(self, "_k2", PchipInterpolator(x, k2))

    @property
    def domain(self) -> tuple[float, float]:
        """Sampled (min, max) of h/lambda."""
        return self.samples[0][0], self.samples[-1][0]


def validate_sh0_velocity(table: DispersionTable, consts: PlatformConstants) -> None:
    """Reject SH0 tables whose vp grossly exceeds the slow-shear-bulk line.

    Velocities slightly above ``v_ssb`` are allowed (energy sinking toward
    the bulk line); anything above ``SSB_TOLERANCE * v_ssb`` is unphysical.
    """
    if table.mode is not AcousticMode.SH0:
        return
    bound = SSB_TOLERANCE * consts.v_ssb
    worst = max(s[1] for s in table.samples)
    if worst > bound:
        raise DomainError(
            f"SH0 table vp {worst:.1f} m/s exceeds {SSB_TOLERANCE:.2f} * v_ssb"
            f" = {bound:.1f} m/s"
        )


def interpolate(table: DispersionTable, h_over_lambda: float) -> tuple[float, float]:
    """Shape-preserving (vp, k2) lookup at ``h_over_lambda``.

    Exact at sample abscissas; raises :class:`RangeError` naming the valid
    interval for queries outside the sampled domain.
    """
    lo, hi = table.domain
    x = float(h_over_lambda)
    if not (lo <= x <= hi):
        raise RangeError(
            f"h/lambda = {x:.6g} outside table domain [{lo:.6g}, {hi:.6g}]"
        )
    return float(table._vp(x)), float(table._k2(x))


def frequency_for(table: DispersionTable, consts: PlatformConstants, wavelength: float) -> float:
    """Resonance frequency ``vp(h/lambda) / lambda`` for an IDT wavelength."""
    if not (math.isfinite(wavelength) and wavelength > 0):
        raise DomainError(f"wavelength must be finite and > 0, got {wavelength}")
    vp, _ = interpolate(table, consts.film_thickness_h / wavelength)
    return vp / wavelength


def _lambda_domain(table: DispersionTable, consts: PlatformConstants) -> tuple[float, float]:
    lo, hi = table.domain
    return consts.film_thickness_h / hi, consts.film_thickness_h / lo


def _bisect_frequency(table, consts, f_target, lam_lo, lam_hi, rtol=1e-12):
    # plain bisection on f(lambda) - f_target; sign handled by the caller
    f_lo = frequency_for(table, consts, lam_lo) - f_target
    for _ in range(200):
        mid = 0.5 * (lam_lo + lam_hi)
        f_mid = frequency_for(table, consts, mid) - f_target
        if f_mid == 0.0 or (lam_hi - lam_lo) <= rtol * mid:
            return mid
        if (f_lo < 0) == (f_mid < 0):
            lam_lo, f_lo = mid, f_mid
        else:
            lam_hi = mid
    return 0.5 * (lam_lo + lam_hi)


def wavelength_for_frequency(
    table: DispersionTable, consts: PlatformConstants, f_target: float
) -> float:
    """Invert :func:`frequency_for` by bisection.

    ``f(lambda)`` is checked for monotonicity on a fine grid first.  If it is
    monotone, plain bisection applies; otherwise all sign-change brackets are
    located and a single bracket is solved, while multiple brackets raise
    :class:`AmbiguityError` listing the candidates.
    """
    if not (math.isfinite(f_target) and f_target > 0):
        raise DomainError(f"target frequency must be finite and > 0, got {f_target}")
    lam_lo, lam_hi = _lambda_domain(table, consts)
    lam = np.linspace(lam_lo, lam_hi, 512)
    f_grid = table._vp(consts.film_thickness_h / lam) / lam
    f_min, f_max = float(np.min(f_grid)), float(np.max(f_grid))
    if not (f_min <= f_target <= f_max):
        raise RangeError(
            f"target {f_target:.6g} Hz outside achievable range"
            f" [{f_min:.6g}, {f_max:.6g}] Hz"
        )
    diffs = np.diff(f_grid)
    monotone = np.all(diffs <= 0) or np.all(diffs >= 0)
    resid = f_grid - f_target
    crossings = np.nonzero(np.diff(np.signbit(resid)))[0]
    exact = np.nonzero(resid == 0.0)[0]
    if monotone:
        if exact.size:
            return float(lam[exact[0]])
        i = crossings[0]
        lam_sol = _bisect_frequency(table, consts, f_target, lam[i], lam[i + 1])
    else:
        candidates = [(lam[i], lam[i + 1]) for i in crossings]
        candidates += [(lam[i], lam[i]) for i in exact]
        if len(candidates) > 1:
            listing = ", ".join(f"[{a:.6g}, {b:.6g}] m" for a, b in candidates)
            raise AmbiguityError(
                f"f(lambda) is non-monotone; {f_target:.6g} Hz has multiple"
                f" bracketing candidates: {listing}"
            )
        if not candidates:
            raise RangeError(
                f"target {f_target:.6g} Hz not bracketed on the non-monotone table"
            )
        a, b = candidates[0]
        lam_sol = a if a == b else _bisect_frequency(table, consts, f_target, a, b)
    achieved = frequency_for(table, consts, lam_sol)
    if abs(achieved - f_target) / f_target >= 1e-9:
        raise RangeError(
            f"bisection residual {abs(achieved - f_target) / f_target:.3g}"
            " exceeds 1e-9 relative"
        )
    return float(lam_sol)


def select_mode(f_target: float, threshold: float = MODE_THRESHOLD_HZ) -> AcousticMode:
    """Mode partition: SH0 below ``threshold``, S0 at or above it."""
    if not (math.isfinite(f_target) and f_target > 0):
        raise DomainError(f"target frequency must be finite and > 0, got {f_target}")
    return AcousticMode.SH0 if f_target < threshold else AcousticMode.S0


def classify_regime(consts: PlatformConstants, wavelength: float) -> Regime:
    """Operating-regime bucket for a wavelength on this platform.

    SED (sinking energy distribution) for ``h/lambda < 0.15``; standard for
    ``0.15 <= h/lambda < 0.25``; out of the validated range otherwise.
    """
    if not (math.isfinite(wavelength) and wavelength > 0):
        raise DomainError(f"wavelength must be finite and > 0, got {wavelength}")
    x = consts.film_thickness_h / wavelength
    if x < 0.15:
        return Regime.SED
    if x < 0.25:
        return Regime.STANDARD
    return Regime.OUT_OF_VALIDATED_RANGE


def builtin_table(mode) -> DispersionTable:
    """Load one of the bundled starter tables (``AcousticMode`` or name)."""
    from . import files  # local import: files depends on this module

    if isinstance(mode, str):
        try:
            mode = AcousticMode(mode.upper())
        except ValueError:
            raise DomainError(f"unknown builtin table {mode!r}") from None
    return files.load_builtin_table(mode)
