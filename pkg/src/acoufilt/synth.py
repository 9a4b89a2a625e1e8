"""Geometry-to-model derivation, behavioral spur models and ladder synthesis.

Spur magnitudes and offsets are behavioral calibration knobs, not physics:
the transverse family rolls off as 1/m^2 and is suppressed by a piston-IDT
factor, the leaky branch scales with a reflector-pitch gain that vanishes at
pitch ratio 0.9, and the overtone branch sits near 1.5*fr unless embedded
IDTs remove it.  All defaults are documented here and overridable per field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .dispersion import (
    AcousticMode,
    DispersionTable,
    PlatformConstants,
    frequency_for,
    interpolate,
    select_mode,
    wavelength_for_frequency,
)
from .errors import DegeneracyError, DomainError, FeasibilityError
from .network import (
    FilterMetrics,
    LadderStage,
    LadderTopology,
    Placement,
    cascade_sweep,
    filter_metrics,
)
from .resonator import COUPLING_SUP, MotionalBranch, ResonatorModel

#: Derived motional capacitances below this are rejected as degenerate.
CM_FLOOR = 1e-18

#: Default piston-IDT coupling suppression factor for transverse spurs.
PISTON_FACTOR = 0.03


@dataclass(frozen=True)
class GeometrySpec:
    """IDT geometry feeding the parallel-plate capacitance approximation.

    ``c0 = pairs_n * eps_eff * aperture_w``; ``q_assumed`` sets the motional
    resistance of every derived branch.
    """

    wavelength: float
    pairs_n: int
    aperture_w: float
    eps_eff: float
    q_assumed: float

    def __post_init__(self):
        if int(self.pairs_n) != self.pairs_n or self.pairs_n < 1:
            raise DomainError(f"pairs_n must be an integer >= 1, got {self.pairs_n}")
        object.__setattr__(self, "pairs_n", int(self.pairs_n))
        for name in ("wavelength", "aperture_w", "eps_eff", "q_assumed"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class TransverseSpurs:
    """Transverse standing-wave spur family (odd orders above fr)."""

    enabled: bool = False
    orders: tuple = (1, 3, 5)
    relative_coupling: tuple = (0.08, 0.08, 0.08)
    relative_offset: tuple = (0.008, 0.018, 0.030)
    piston: bool = False
    piston_factor: float = PISTON_FACTOR

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(int(m) for m in self.orders))
        object.__setattr__(self, "relative_coupling", tuple(float(v) for v in self.relative_coupling))
        object.__setattr__(self, "relative_offset", tuple(float(v) for v in self.relative_offset))
        if any(m < 1 or m % 2 == 0 for m in self.orders):
            raise DomainError("transverse orders must be odd positive integers")
        if len(self.orders) != len(set(self.orders)):
            raise DomainError("transverse orders must be unique")
        if not (len(self.orders) == len(self.relative_coupling) == len(self.relative_offset)):
            raise DomainError("orders, couplings and offsets must have equal length")
        if any(not 0.0 <= v <= 1.0 for v in self.relative_coupling):
            raise DomainError("relative couplings must lie in [0, 1]")
        if any(v <= 0.0 for v in self.relative_offset):
            raise DomainError("relative offsets must be > 0")
        if not 0.0 < self.piston_factor <= 1.0:
            raise DomainError("piston_factor must lie in (0, 1]")


@dataclass(frozen=True)
class LeakySpur:
    """Reflector-leakage spur above the anti-resonance."""

    enabled: bool = False
    pr_over_pi: float = 1.0
    relative_coupling: float = 0.05
    relative_offset: float = 0.18

    def __post_init__(self):
        if not 0.5 < self.pr_over_pi <= 1.2:
            raise DomainError(f"pr_over_pi must lie in (0.5, 1.2], got {self.pr_over_pi}")
        if not 0.0 <= self.relative_coupling <= 1.0:
            raise DomainError("relative coupling must lie in [0, 1]")
        if self.relative_offset <= 0.0:
            raise DomainError("relative offset must be > 0")


@dataclass(frozen=True)
class OvertoneSpur:
    """Higher-order overtone; removed entirely by embedded IDTs."""

    enabled: bool = False
    embedded_idt: bool = False
    relative_coupling: float = 0.10
    frequency_factor: float = 1.5

    def __post_init__(self):
        if not 0.0 <= self.relative_coupling <= 1.0:
            raise DomainError("relative coupling must lie in [0, 1]")
        if self.frequency_factor <= 1.0:
            raise DomainError("overtone frequency factor must exceed 1")


@dataclass(frozen=True)
class SpurEnvironment:
    """Aggregate spur configuration attached to a derived resonator."""

    transverse: TransverseSpurs = TransverseSpurs()
    leaky: LeakySpur = LeakySpur()
    overtone: OvertoneSpur = OvertoneSpur()


@dataclass(frozen=True)
class DesignSpec:
    """Band target driving ladder synthesis."""

    fc_target: float
    fbw_target: float
    il_max_db: float
    stage_count: int = 4
    q_assumed: float = 1500.0
    reference_impedance: float = 50.0
    provenance: str = ""

    def __post_init__(self):
        if not (math.isfinite(self.fc_target) and self.fc_target > 0):
            raise DomainError(f"fc_target must be > 0, got {self.fc_target}")
        if not 0.0 < self.fbw_target < 0.2:
            raise DomainError(f"fbw_target must lie in (0, 0.2), got {self.fbw_target}")
        if int(self.stage_count) != self.stage_count or self.stage_count < 2 or self.stage_count % 2:
            raise DomainError(f"stage_count must be an even integer >= 2, got {self.stage_count}")
        object.__setattr__(self, "stage_count", int(self.stage_count))
        if self.il_max_db < 0:
            raise DomainError("il_max_db must be >= 0")
        if self.q_assumed <= 0:
            raise DomainError("q_assumed must be > 0")
        if self.reference_impedance <= 0:
            raise DomainError("reference_impedance must be > 0")


@dataclass(frozen=True)
class SynthesisResult:
    """Synthesized topology with achieved metrics and optimizer status."""

    topology: LadderTopology
    metrics: FilterMetrics
    spec: DesignSpec
    mode: AcousticMode
    converged: bool
    evaluations: int
    cost: float
    series_wavelength: float
    shunt_wavelength: float
    series_c0: float
    shunt_c0: float


def static_capacitance(geom: GeometrySpec) -> float:
    """Parallel-plate IDT approximation ``c0 = pairs_n * eps_eff * aperture_w``."""
    return geom.pairs_n * geom.eps_eff * geom.aperture_w


def leak_gain(pr_over_pi: float) -> float:
    """Leaky-mode coupling gain versus reflector pitch ratio.

    1 at ratio 1.0, 0 at ratio 0.9, linear in between, clamped outside; the
    leaky branch disappears entirely for ratios at or below 0.9.
    """
    if pr_over_pi <= 0.9:
        return 0.0
    if pr_over_pi >= 1.0:
        return 1.0
    return (pr_over_pi - 0.9) / 0.1


def _scaled_branch(fr_branch, cm_branch, q, label):
    lm = 1.0 / ((2.0 * math.pi * fr_branch) ** 2 * cm_branch)
    rm = 0.0 if math.isinf(q) else math.sqrt(lm / cm_branch) / q
    return MotionalBranch(rm=rm, lm=lm, cm=cm_branch, label=label)


def spur_branches(main: MotionalBranch, c0: float, spurs: SpurEnvironment) -> list:
    """Spurious branches implied by a spur environment.

    Each spur is a full RLC branch sharing the main branch's Q, so passivity
    holds exactly.  A branch's peak conductance scales with its motional
    capacitance at fixed Q, which is what the mitigation toggles act on.
    """
    if spurs is None:
        return []
    fr = main.resonance_hz
    q = math.inf if main.rm == 0.0 else math.sqrt(main.lm / main.cm) / main.rm
    out = []
    t = spurs.transverse
    if t.enabled:
        for m, kappa, offset in zip(t.orders, t.relative_coupling, t.relative_offset):
            cm_s = main.cm * kappa / m**2
            if t.piston:
                cm_s *= t.piston_factor
            if cm_s <= 0.0:
                continue
            out.append(_scaled_branch(fr * (1.0 + offset), cm_s, q, f"transverse:{m}"))
    lk = spurs.leaky
    if lk.enabled:
        cm_s = main.cm * lk.relative_coupling * leak_gain(lk.pr_over_pi)
        if cm_s > 0.0:
            out.append(_scaled_branch(fr * (1.0 + lk.relative_offset), cm_s, q, "leaky"))
    ot = spurs.overtone
    if ot.enabled and not ot.embedded_idt:
        cm_s = main.cm * ot.relative_coupling
        if cm_s > 0.0:
            out.append(_scaled_branch(fr * ot.frequency_factor, cm_s, q, "overtone:1"))
    return out


def resonator_from_wavelength(
    table: DispersionTable,
    consts: PlatformConstants,
    wavelength: float,
    c0: float,
    q_assumed: float,
    spurs: SpurEnvironment | None = None,
) -> ResonatorModel:
    """Electrical model at a given wavelength and static capacitance.

    ``fr`` comes from the dispersion table, ``cm`` from exact inversion of
    the coupling definition (``cm = c0 * (1/(1 - k2/(pi^2/8)) - 1)``), ``lm``
    from fr, and ``rm`` from the assumed Q.
    """
    if not (math.isfinite(c0) and c0 > 0):
        raise DomainError(f"c0 must be finite and > 0, got {c0}")
    if not (math.isfinite(q_assumed) and q_assumed > 0):
        raise DomainError(f"q_assumed must be finite and > 0, got {q_assumed}")
    fr = frequency_for(table, consts, wavelength)
    _, k2 = interpolate(table, consts.film_thickness_h / wavelength)
    cm = c0 * (1.0 / (1.0 - k2 / COUPLING_SUP) - 1.0)
    if cm < CM_FLOOR:
        raise DegeneracyError(
            f"derived cm = {cm:.3g} F below the {CM_FLOOR:.0e} F floor (k2 too small)"
        )
    main = _scaled_branch(fr, cm, q_assumed, "main")
    return ResonatorModel(c0=c0, main=main, spurs=tuple(spur_branches(main, c0, spurs)))


def derive_resonator(
    table: DispersionTable,
    consts: PlatformConstants,
    geom: GeometrySpec,
    spurs: SpurEnvironment | None = None,
) -> ResonatorModel:
    """Geometry-to-model bridge: dispersion lookup plus IDT capacitance."""
    return resonator_from_wavelength(
        table, consts, geom.wavelength, static_capacitance(geom), geom.q_assumed, spurs
    )


def _fa_fr_ratio(k2: float) -> float:
    return 1.0 / math.sqrt(1.0 - k2 / COUPLING_SUP)


def _pick_table(tables, fc_target: float) -> tuple[DispersionTable, AcousticMode]:
    if isinstance(tables, DispersionTable):
        return tables, tables.mode
    if isinstance(tables, dict):
        pool = dict(tables)
    else:
        pool = {t.mode: t for t in tables}
    if not pool:
        raise DomainError("no dispersion tables supplied")
    if len(pool) == 1:
        table = next(iter(pool.values()))
        return table, table.mode
    mode = select_mode(fc_target)
    if mode not in pool:
        raise DomainError(f"no table for the auto-selected mode {mode.value}")
    return pool[mode], mode


def ladder_synthesize(
    spec: DesignSpec,
    tables,
    consts: PlatformConstants = PlatformConstants(),
    *,
    seed: int = 0,
    grid_points: int = 801,
    max_evaluations: int = 2000,
    restarts: int = 3,
) -> SynthesisResult:
    """Synthesize an alternating series/shunt ladder to a band target.

    The initial design places the series resonators at
    ``fc / (1 + (fa/fr - 1)/2)`` and detunes the shunts so their
    anti-resonance lands on the series resonance (classic ladder heuristic),
    then a Nelder-Mead simplex over the four scalars (series/shunt wavelength
    and static capacitance, normalized to the initial point) minimizes

    ``10*(fc error)^2 + 10*(fbw error)^2 + 1*max(0, IL - il_max)^2``

    evaluated through the full cascade and metric pipeline.  Each simplex run
    terminates on a relative diameter below 1e-6 or ``max_evaluations``
    cost evaluations; stalls restart from a seeded, jittered point (up to
    ``restarts`` times) so the whole procedure is deterministic for a given
    seed.  A stalled optimizer returns the best design found with
    ``converged=False`` rather than raising.

    Parameters
    ----------
    spec : DesignSpec
    tables : DispersionTable, mapping, or iterable of tables
        With several tables the mode is auto-selected from the target fc.
    consts : PlatformConstants
    """
    table, mode = _pick_table(tables, spec.fc_target)
    fc_t, fbw_t = spec.fc_target, spec.fbw_target
    z0 = spec.reference_impedance

    lam_fc = wavelength_for_frequency(table, consts, fc_t)
    _, k2_fc = interpolate(table, consts.film_thickness_h / lam_fc)
    rho = _fa_fr_ratio(k2_fc)
    bound = 1.2 * (rho - 1.0)
    if fbw_t > bound:
        raise FeasibilityError(
            f"fbw target {fbw_t:.4g} exceeds the coupling-limited bound"
            f" {bound:.4g} (k2 = {k2_fc:.4g} at {fc_t:.4g} Hz)"
        )

    fr_series = fc_t / (1.0 + (rho - 1.0) / 2.0)
    fr_shunt = fr_series / rho
    lam_series0 = wavelength_for_frequency(table, consts, fr_series)
    lam_shunt0 = wavelength_for_frequency(table, consts, fr_shunt)
    c0_0 = 1.0 / (2.0 * math.pi * fc_t * z0)

    b = max(fbw_t, rho - 1.0)
    grid = np.linspace(fc_t * (1.0 - 2.2 * b), fc_t * (1.0 + 2.2 * b), grid_points)
    # candidate designs can show >3 dB in-band ripple, which splits the band
    # into disjoint runs; the hint window keeps the metric well-defined there
    hint = (fc_t * (1.0 - 1.5 * b), fc_t * (1.0 + 1.5 * b))
    h = consts.film_thickness_h
    lam_lo, lam_hi = h / table.domain[1], h / table.domain[0]

    def build(params):
        lam_s = params[0] * lam_series0
        lam_sh = params[1] * lam_shunt0
        c0_s = params[2] * c0_0
        c0_sh = params[3] * c0_0
        series = resonator_from_wavelength(table, consts, lam_s, c0_s, spec.q_assumed)
        shunt = resonator_from_wavelength(table, consts, lam_sh, c0_sh, spec.q_assumed)
        stages = tuple(
            LadderStage(
                Placement.SERIES if k % 2 == 0 else Placement.SHUNT,
                series if k % 2 == 0 else shunt,
            )
            for k in range(spec.stage_count)
        )
        return LadderTopology(stages=stages, reference_impedance=z0)

    evaluations = 0

    def cost(params):
        nonlocal evaluations
        evaluations += 1
        for scale, lam0 in ((params[0], lam_series0), (params[1], lam_shunt0)):
            lam = scale * lam0
            if not (lam_lo < lam < lam_hi):
                return 1e6 * (1.0 + abs(lam - np.clip(lam, lam_lo, lam_hi)) / lam_lo)
        if params[2] <= 0 or params[3] <= 0:
            return 1e9
        try:
            metrics = filter_metrics(cascade_sweep(build(params), grid), passband_hint=hint)
        except Exception:
            return 1e5
        e_fc = (metrics.fc - fc_t) / fc_t
        e_fbw = (metrics.fbw - fbw_t) / fbw_t
        e_il = max(0.0, metrics.il_db - spec.il_max_db)
        return 10.0 * e_fc**2 + 10.0 * e_fbw**2 + 1.0 * e_il**2

    rng = np.random.default_rng(seed)
    x0 = np.ones(4)
    best = None
    converged = False
    for attempt in range(restarts + 1):
        result = minimize(
            cost,
            x0,
            method="Nelder-Mead",
            options={"maxfev": max_evaluations, "xatol": 1e-6, "fatol": 1e-14},
        )
        if best is None or result.fun < best.fun:
            best = result
            converged = bool(result.success)
        # restart (jittered, seeded) while the best design is still poor,
        # even when the simplex collapsed onto a local plateau
        if best.fun < 1e-6:
            break
        x0 = best.x * (1.0 + 0.05 * rng.standard_normal(4))

    topology = build(best.x)
    metrics = filter_metrics(cascade_sweep(topology, grid), passband_hint=hint)
    return SynthesisResult(
        topology=topology,
        metrics=metrics,
        spec=spec,
        mode=mode,
        converged=converged,
        evaluations=evaluations,
        cost=float(best.fun),
        series_wavelength=float(best.x[0] * lam_series0),
        shunt_wavelength=float(best.x[1] * lam_shunt0),
        series_c0=float(best.x[2] * c0_0),
        shunt_c0=float(best.x[3] * c0_0),
    )


def band_presets() -> list[DesignSpec]:
    """Eight design presets spanning 1.4 to 6.0 GHz.

    The endpoints carry the reported extreme center frequencies and
    fractional bandwidths (3.3% and 13.3%); the fifth preset carries the
    reported 488 MHz maximum absolute bandwidth at its 3.802 GHz center.
    The other five are evenly spaced interpolations, flagged as placeholders
    in their provenance, not reproductions of any measured filter.
    """
    presets = []
    for i in range(8):
        fc = 1.4e9 + (6.0e9 - 1.4e9) * i / 7.0
        fbw = 0.033 + (0.133 - 0.033) * i / 7.0
        if i == 0:
            note = "band endpoint: reported minimum fc and FBW"
        elif i == 7:
            note = "band endpoint: reported maximum fc and FBW"
        elif i == 4:
            fc, fbw = 3.802e9, 0.488e9 / 3.802e9
            note = "reported 488 MHz maximum 3-dB bandwidth"
        else:
            note = "evenly spaced placeholder, not a measured filter"
        presets.append(
            DesignSpec(
                fc_target=fc,
                fbw_target=fbw,
                il_max_db=2.10,
                stage_count=4,
                q_assumed=1500.0,
                reference_impedance=50.0,
                provenance=note,
            )
        )
    return presets
