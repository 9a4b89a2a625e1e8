"""Modified Butterworth-Van Dyke (mBVD) resonator models.

A resonator is a static capacitance ``c0`` (with optional dielectric-loss
resistance ``r0`` and electrode series resistance ``rs``) in parallel with one
main motional RLC branch and any number of spurious motional branches.  All
types are immutable after construction and all operations are pure, so models
can be evaluated concurrently across frequencies without locking.

Conventions
-----------
fr : series (admittance-maximum) resonance of the lossless main branch,
     ``1 / (2*pi*sqrt(lm*cm))``.
fa : anti-resonance, ``fr * sqrt(1 + cm/c0)``.
k2 : electromechanical coupling, ``(pi^2/8) * (fa^2 - fr^2) / fa^2``.  The
     formula is a documented convention chosen to reproduce measured coupling
     ranges from plausible fr/fa ratios; it is exactly inverted by the
     geometry-to-model derivation in :mod:`acoufilt.synth`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

#: Supremum of the coupling coefficient under the adopted definition.
COUPLING_SUP = math.pi**2 / 8

#: Relative spacing below which two branch resonances count as coincident.
_RESONANCE_DISTINCT_RTOL = 1e-9

_LABEL_KINDS = ("main", "transverse", "leaky", "overtone")


def _validate_label(label: str) -> None:
    kind, _, order = label.partition(":")
    if kind not in _LABEL_KINDS:
        raise DomainError(f"unknown branch label kind {label!r}")
    if kind in ("main", "leaky"):
        if order:
            raise DomainError(f"label {label!r} does not take an order")
        return
    # transverse:<odd m> / overtone:<n>
    if not order.isdigit() or int(order) < 1:
        raise DomainError(f"label {label!r} needs a positive integer order")
    if kind == "transverse" and int(order) % 2 == 0:
        raise DomainError(f"transverse order must be odd, got {label!r}")


@dataclass(frozen=True)
class MotionalBranch:
    """One series-RLC motional branch of an mBVD model.

    Parameters
    ----------
    rm : float
        Motional resistance in ohm, >= 0.
    lm : float
        Motional inductance in henry, > 0.
    cm : float
        Motional capacitance in farad, > 0.
    label : str
        Branch kind: ``"main"``, ``"leaky"``, ``"transverse:<odd m>"`` or
        ``"overtone:<n>"``.
    """

    rm: float
    lm: float
    cm: float
    label: str = "main"

    def __post_init__(self):
        if not (math.isfinite(self.lm) and self.lm > 0):
            raise DomainError(f"lm must be finite and > 0, got {self.lm}")
        if not (math.isfinite(self.cm) and self.cm > 0):
            raise DomainError(f"cm must be finite and > 0, got {self.cm}")
        if not (math.isfinite(self.rm) and self.rm >= 0):
            raise DomainError(f"rm must be finite and >= 0, got {self.rm}")
        _validate_label(self.label)
        if not math.isfinite(self.resonance_hz) or self.resonance_hz <= 0:
            raise DomainError("branch resonance is not finite and positive")

    @property
    def resonance_hz(self) -> float:
        """Series resonance ``1 / (2*pi*sqrt(lm*cm))`` of this branch."""
        return 1.0 / (2.0 * math.pi * math.sqrt(self.lm * self.cm))


@dataclass(frozen=True)
class ResonatorModel:
    """mBVD model: static branch plus main and spurious motional branches.

    Parameters
    ----------
    c0 : float
        Static capacitance in farad, > 0.
    main : MotionalBranch
        The main branch; must be labeled ``"main"``.
    spurs : tuple of MotionalBranch
        Spurious branches; labels must not be ``"main"`` and resonances must
        be distinct from the main resonance.
    r0 : float
        Dielectric-loss resistance in series with c0, ohm, >= 0.
    rs : float
        Electrode series resistance in ohm, >= 0.
    """

    c0: float
    main: MotionalBranch
    spurs: tuple = ()
    r0: float = 0.0
    rs: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.c0) and self.c0 > 0):
            raise DomainError(f"c0 must be finite and > 0, got {self.c0}")
        for name in ("r0", "rs"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")
        if self.main.label != "main":
            raise DomainError("the main branch must be labeled 'main'")
        object.__setattr__(self, "spurs", tuple(self.spurs))
        f_main = self.main.resonance_hz
        for spur in self.spurs:
            if not isinstance(spur, MotionalBranch):
                raise DomainError("spurs must be MotionalBranch instances")
            if spur.label == "main":
                raise DomainError("exactly one branch may be labeled 'main'")
            if abs(spur.resonance_hz - f_main) <= _RESONANCE_DISTINCT_RTOL * f_main:
                raise DomainError(
                    f"spur {spur.label!r} resonance coincides with the main resonance"
                )

    @property
    def branches(self) -> tuple:
        """Main branch followed by spurs, in declaration order."""
        return (self.main,) + self.spurs


def admittance(model: ResonatorModel, f):
    """Complex admittance of an mBVD model.

    Parameters
    ----------
    model : ResonatorModel
    f : float or array_like
        Frequency in Hz, > 0.

    Returns
    -------
    complex or ndarray
        ``Y = 1 / (rs + 1/Ycore)`` in siemens, where ``Ycore`` is the static
        branch ``j*w*c0 / (1 + j*w*c0*r0)`` in parallel with every motional
        branch ``1 / (rm + j*w*lm + 1/(j*w*cm))``.
    """
    f_arr = np.asarray(f, dtype=float)
    if f_arr.size == 0:
        raise DomainError("frequency input is empty")
    if np.any(~np.isfinite(f_arr)) or np.any(f_arr <= 0):
        raise DomainError("frequencies must be finite and > 0")
    jw = 2j * math.pi * f_arr
    ycore = jw * model.c0 / (1.0 + jw * model.c0 * model.r0)
    for b in model.branches:
        ycore = ycore + 1.0 / (b.rm + jw * b.lm + 1.0 / (jw * b.cm))
    # y = 1/(rs + 1/ycore), written to stay finite when ycore == 0
    y = ycore / (1.0 + model.rs * ycore)
    if np.isscalar(f) or getattr(f, "ndim", 1) == 0:
        return complex(y)
    return y


def resonance_frequencies(model: ResonatorModel) -> tuple[float, float]:
    """Closed-form lossless (fr, fa) of the main branch plus c0.

    Spurs and all resistances are ignored by convention; numerically located
    admittance extrema are a separate extraction path (see
    :func:`acoufilt.extraction.extract_fr_fa`) so the two can be
    cross-checked.
    """
    fr = model.main.resonance_hz
    fa = fr * math.sqrt(1.0 + model.main.cm / model.c0)
    return fr, fa


def coupling_from_frequencies(fr: float, fa: float) -> float:
    """Electromechanical coupling ``k2 = (pi^2/8) * (fa^2 - fr^2) / fa^2``.

    Raises
    ------
    DomainError
        Unless ``0 < fr < fa``.
    """
    if not (0.0 < fr < fa) or not math.isfinite(fr) or not math.isfinite(fa):
        raise DomainError(f"need 0 < fr < fa, got fr={fr}, fa={fa}")
    return COUPLING_SUP * (fa * fa - fr * fr) / (fa * fa)


def quality_factor(model: ResonatorModel) -> float:
    """Analytic main-branch quality factor ``sqrt(lm/cm) / rm``.

    Returns ``math.inf`` for a lossless main branch (``rm == 0``); infinity is
    the explicit unbounded marker, never a finite sentinel.
    """
    b = model.main
    if b.rm == 0.0:
        return math.inf
    return math.sqrt(b.lm / b.cm) / b.rm
