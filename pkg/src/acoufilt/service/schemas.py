"""Pydantic request/response models for the HTTP service.

These mirror the core dataclasses one-to-one; each model knows how to
convert itself to (and from) the core type so the endpoint handlers stay
thin.  Unbounded Q samples are serialized as JSON ``null``.
"""

from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field

from .. import dispersion as disp
from .. import files
from ..errors import DomainError
from ..network import FilterMetrics, LadderStage, LadderTopology, Placement
from ..resonator import MotionalBranch, ResonatorModel
from ..synth import (
    DesignSpec,
    GeometrySpec,
    LeakySpur,
    OvertoneSpur,
    SpurEnvironment,
    TransverseSpurs,
)


class ConstantsModel(BaseModel):
    film_thickness_h: float = 450e-9
    electrode_thickness: float = 120e-9
    v_ssb: float = 7150.0

    def to_core(self) -> disp.PlatformConstants:
        return disp.PlatformConstants(
            film_thickness_h=self.film_thickness_h,
            electrode_thickness=self.electrode_thickness,
            v_ssb=self.v_ssb,
        )


class TableModel(BaseModel):
    """A dispersion table: either a builtin name or inline samples."""

    builtin: Optional[Literal["sh0", "s0"]] = None
    mode: Optional[Literal["SH0", "S0"]] = None
    samples: Optional[list[tuple[float, float, float]]] = None
    provenance: str = ""

    def to_core(self) -> disp.DispersionTable:
        if self.builtin is not None:
            if self.samples is not None:
                raise DomainError("give either a builtin name or samples, not both")
            return files.load_builtin_table(disp.AcousticMode(self.builtin.upper()))
        if self.samples is None or self.mode is None:
            raise DomainError("inline tables need both mode and samples")
        return disp.DispersionTable(
            mode=disp.AcousticMode(self.mode),
            samples=tuple(self.samples),
            provenance=self.provenance,
        )


class GridModel(BaseModel):
    start_hz: float
    stop_hz: float
    points: int = 2001
    spacing: Literal["linear", "log"] = "linear"

    def to_core(self) -> files.FrequencyGrid:
        return files.FrequencyGrid(
            start_hz=self.start_hz,
            stop_hz=self.stop_hz,
            points=self.points,
            spacing=self.spacing,
        )


class BranchModel(BaseModel):
    rm: float
    lm: float
    cm: float
    label: str = "main"

    @classmethod
    def from_core(cls, branch: MotionalBranch) -> "BranchModel":
        return cls(rm=branch.rm, lm=branch.lm, cm=branch.cm, label=branch.label)

    def to_core(self) -> MotionalBranch:
        return MotionalBranch(rm=self.rm, lm=self.lm, cm=self.cm, label=self.label)


class ResonatorModelModel(BaseModel):
    c0: float
    main: BranchModel
    spurs: list[BranchModel] = Field(default_factory=list)
    r0: float = 0.0
    rs: float = 0.0

    @classmethod
    def from_core(cls, model: ResonatorModel) -> "ResonatorModelModel":
        return cls(
            c0=model.c0,
            main=BranchModel.from_core(model.main),
            spurs=[BranchModel.from_core(b) for b in model.spurs],
            r0=model.r0,
            rs=model.rs,
        )

    def to_core(self) -> ResonatorModel:
        return ResonatorModel(
            c0=self.c0,
            main=self.main.to_core(),
            spurs=tuple(b.to_core() for b in self.spurs),
            r0=self.r0,
            rs=self.rs,
        )


class StageModel(BaseModel):
    placement: Literal["series", "shunt"]
    resonator: ResonatorModelModel

    @classmethod
    def from_core(cls, stage: LadderStage) -> "StageModel":
        return cls(
            placement=stage.placement.value,
            resonator=ResonatorModelModel.from_core(stage.resonator),
        )

    def to_core(self) -> LadderStage:
        return LadderStage(
            placement=Placement(self.placement), resonator=self.resonator.to_core()
        )


class TopologyModel(BaseModel):
    stages: list[StageModel]
    reference_impedance: float = 50.0

    @classmethod
    def from_core(cls, topology: LadderTopology) -> "TopologyModel":
        return cls(
            stages=[StageModel.from_core(s) for s in topology.stages],
            reference_impedance=topology.reference_impedance,
        )

    def to_core(self) -> LadderTopology:
        return LadderTopology(
            stages=tuple(s.to_core() for s in self.stages),
            reference_impedance=self.reference_impedance,
        )


class GeometryModel(BaseModel):
    lambda_m: float
    pairs_n: int
    aperture_w_m: float
    eps_eff_f_per_m: float
    q_assumed: float

    def to_core(self) -> GeometrySpec:
        return GeometrySpec(
            wavelength=self.lambda_m,
            pairs_n=self.pairs_n,
            aperture_w=self.aperture_w_m,
            eps_eff=self.eps_eff_f_per_m,
            q_assumed=self.q_assumed,
        )


class TransverseModel(BaseModel):
    enabled: bool = False
    orders: list[int] = [1, 3, 5]
    relative_coupling: list[float] = [0.08, 0.08, 0.08]
    relative_offset: list[float] = [0.008, 0.018, 0.030]
    piston: bool = False
    piston_factor: float = 0.03


class LeakyModel(BaseModel):
    enabled: bool = False
    pr_over_pi: float = 1.0
    relative_coupling: float = 0.05
    relative_offset: float = 0.18


class OvertoneModel(BaseModel):
    enabled: bool = False
    embedded_idt: bool = False
    relative_coupling: float = 0.10
    frequency_factor: float = 1.5


class SpurEnvironmentModel(BaseModel):
    transverse: TransverseModel = TransverseModel()
    leaky: LeakyModel = LeakyModel()
    overtone: OvertoneModel = OvertoneModel()

    def to_core(self) -> SpurEnvironment:
        t, lk, ot = self.transverse, self.leaky, self.overtone
        return SpurEnvironment(
            transverse=TransverseSpurs(
                enabled=t.enabled,
                orders=tuple(t.orders),
                relative_coupling=tuple(t.relative_coupling),
                relative_offset=tuple(t.relative_offset),
                piston=t.piston,
                piston_factor=t.piston_factor,
            ),
            leaky=LeakySpur(
                enabled=lk.enabled,
                pr_over_pi=lk.pr_over_pi,
                relative_coupling=lk.relative_coupling,
                relative_offset=lk.relative_offset,
            ),
            overtone=OvertoneSpur(
                enabled=ot.enabled,
                embedded_idt=ot.embedded_idt,
                relative_coupling=ot.relative_coupling,
                frequency_factor=ot.frequency_factor,
            ),
        )


class DesignSpecModel(BaseModel):
    fc_target_hz: float
    fbw_target: float
    il_max_db: float
    stage_count: int = 4
    q_assumed: float = 1500.0
    reference_impedance: float = 50.0
    provenance: str = ""

    @classmethod
    def from_core(cls, spec: DesignSpec) -> "DesignSpecModel":
        return cls(
            fc_target_hz=spec.fc_target,
            fbw_target=spec.fbw_target,
            il_max_db=spec.il_max_db,
            stage_count=spec.stage_count,
            q_assumed=spec.q_assumed,
            reference_impedance=spec.reference_impedance,
            provenance=spec.provenance,
        )

    def to_core(self) -> DesignSpec:
        return DesignSpec(
            fc_target=self.fc_target_hz,
            fbw_target=self.fbw_target,
            il_max_db=self.il_max_db,
            stage_count=self.stage_count,
            q_assumed=self.q_assumed,
            reference_impedance=self.reference_impedance,
            provenance=self.provenance,
        )


class MetricsModel(BaseModel):
    fc_hz: float
    il_db: float
    bw3db_hz: float
    fbw: float

    @classmethod
    def from_core(cls, metrics: FilterMetrics) -> "MetricsModel":
        return cls(
            fc_hz=metrics.fc,
            il_db=metrics.il_db,
            bw3db_hz=metrics.bw3db,
            fbw=metrics.fbw,
        )


# ---------------------------------------------------------------------------
# endpoint payloads

class HealthResponse(BaseModel):
    status: str
    version: str


class DispersionQueryRequest(BaseModel):
    table: TableModel
    lambda_m: float
    constants: ConstantsModel = ConstantsModel()


class DispersionQueryResponse(BaseModel):
    mode: str
    h_over_lambda: float
    vp_mps: float
    k2: float
    frequency_hz: float
    regime: str


class ResonatorDeriveRequest(BaseModel):
    table: TableModel
    geometry: GeometryModel
    spurs: Optional[SpurEnvironmentModel] = None
    constants: ConstantsModel = ConstantsModel()
    grid: Optional[GridModel] = None
    reference_impedance: float = 50.0
    touchstone_format: Literal["RI", "MA", "DB"] = "RI"


class ResonatorDeriveResponse(BaseModel):
    model: ResonatorModelModel
    fr_hz: float
    fa_hz: float
    k2: float
    q_analytic: Optional[float]
    regime: str
    touchstone_s1p: Optional[str] = None


class FilterSimulateRequest(BaseModel):
    topology: TopologyModel
    grid: GridModel
    band: Optional[tuple[float, float]] = None
    touchstone_format: Literal["RI", "MA", "DB"] = "RI"


class FilterSimulateResponse(BaseModel):
    metrics: MetricsModel
    touchstone_s2p: str


class SynthesizeRequest(BaseModel):
    design: DesignSpecModel
    tables: list[TableModel]
    constants: ConstantsModel = ConstantsModel()
    seed: int = 0


class SynthesizeResponse(BaseModel):
    topology: TopologyModel
    metrics: MetricsModel
    mode: str
    converged: bool
    evaluations: int
    fc_error_rel: float
    fbw_error_rel: float
    series_lambda_m: float
    shunt_lambda_m: float
    series_c0_f: float
    shunt_c0_f: float


class TouchstoneRequest(BaseModel):
    touchstone: str
    band: Optional[tuple[float, float]] = None


class BodeQResponse(BaseModel):
    qmax: float
    f_at_qmax_hz: float
    frequency_hz: list[float]
    q: list[Optional[float]]


class FitResponse(BaseModel):
    model: ResonatorModelModel
    residual: float
    iterations: int
    converged: bool
    fr_hz: float
    fa_hz: float
    k2: float
    q: float


class DelayLineFitRequest(BaseModel):
    runs: list[tuple[float, float]]
    damping_input: float = 0.002


class DelayLineFitResponse(BaseModel):
    delta: float
    a0: float


def finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None
