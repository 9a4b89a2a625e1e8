"""Text file formats: dispersion CSV, delay-line CSV and key-value documents.

All formats are UTF-8 with ``#`` comment lines and ``.`` decimal separators.
Key-value documents (topologies, design specs, geometries, spur
environments) carry a ``spec_version`` field and round-trip losslessly:
floats are written with ``repr`` so reading back reproduces the exact value,
and key order is fixed so identical inputs give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .dispersion import (
    AcousticMode,
    DispersionTable,
    PlatformConstants,
    validate_sh0_velocity,
)
from .errors import DomainError, ParseError
from .extraction import DelayLineDataset
from .network import LadderStage, LadderTopology, Placement
from .resonator import MotionalBranch, ResonatorModel
from .synth import (
    DesignSpec,
    GeometrySpec,
    LeakySpur,
    OvertoneSpur,
    SpurEnvironment,
    TransverseSpurs,
)

SPEC_VERSION = 1

_BUILTIN_TABLES = {
    AcousticMode.SH0: "sh0_lnosic.csv",
    AcousticMode.S0: "s0_lnosic.csv",
}


# ---------------------------------------------------------------------------
# dispersion tables

def parse_dispersion_csv(text: str, mode=None, consts: PlatformConstants | None = None) -> DispersionTable:
    """Parse a ``h_over_lambda,vp_mps,k2`` CSV into a table.

    ``#`` comment lines are collected as provenance; a ``# mode: SH0`` (or
    S0) comment sets the mode unless the ``mode`` argument overrides it.
    SH0 tables are checked against the slow-shear-bulk velocity bound.
    """
    provenance = []
    file_mode = None
    header_seen = False
    samples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition(":")
            if key.strip().lower() == "mode" and value.strip():
                try:
                    file_mode = AcousticMode(value.strip().upper())
                except ValueError:
                    raise ParseError(f"unknown mode {value.strip()!r}", line=lineno) from None
            elif key.strip().lower() == "provenance":
                provenance.append(value.strip())
            elif body:
                provenance.append(body)
            continue
        if not header_seen:
            cols = [c.strip() for c in line.split(",")]
            if cols != ["h_over_lambda", "vp_mps", "k2"]:
                raise ParseError(
                    "expected header 'h_over_lambda,vp_mps,k2'", line=lineno
                )
            header_seen = True
            continue
        cells = line.split(",")
        if len(cells) != 3:
            raise ParseError(f"expected 3 columns, got {len(cells)}", line=lineno)
        try:
            samples.append(tuple(float(c) for c in cells))
        except ValueError:
            raise ParseError(f"non-numeric sample {line!r}", line=lineno) from None
    if not header_seen:
        raise ParseError("missing 'h_over_lambda,vp_mps,k2' header")
    resolved = mode if mode is not None else file_mode
    if resolved is None:
        raise ParseError("mode is neither given nor recorded in a '# mode:' comment")
    if isinstance(resolved, str):
        resolved = AcousticMode(resolved.upper())
    table = DispersionTable(
        mode=resolved, samples=tuple(samples), provenance=" ".join(provenance)
    )
    validate_sh0_velocity(table, consts if consts is not None else PlatformConstants())
    return table


def read_dispersion_table(path, mode=None, consts: PlatformConstants | None = None) -> DispersionTable:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dispersion_csv(fh.read(), mode=mode, consts=consts)


def load_builtin_table(mode: AcousticMode) -> DispersionTable:
    """Load one of the starter tables packaged under ``acoufilt/data``."""
    name = _BUILTIN_TABLES.get(mode)
    if name is None:
        raise DomainError(f"no builtin table for mode {mode!r}")
    text = resources.files("acoufilt").joinpath("data", name).read_text(encoding="utf-8")
    return parse_dispersion_csv(text)


# ---------------------------------------------------------------------------
# delay-line datasets

def parse_delay_line_csv(text: str) -> DelayLineDataset:
    """Parse a ``gap_wavelengths,s21_mag`` CSV; ``# damping:`` sets metadata."""
    damping = 0.002
    header_seen = False
    runs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition(":")
            if key.strip().lower() == "damping" and value.strip():
                damping = float(value.strip())
            continue
        if not header_seen:
            cols = [c.strip() for c in line.split(",")]
            if cols != ["gap_wavelengths", "s21_mag"]:
                raise ParseError("expected header 'gap_wavelengths,s21_mag'", line=lineno)
            header_seen = True
            continue
        cells = line.split(",")
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, got {len(cells)}", line=lineno)
        try:
            runs.append((float(cells[0]), float(cells[1])))
        except ValueError:
            raise ParseError(f"non-numeric run {line!r}", line=lineno) from None
    if not header_seen:
        raise ParseError("missing 'gap_wavelengths,s21_mag' header")
    return DelayLineDataset(runs=tuple(runs), damping_input=damping)


def read_delay_line_csv(path) -> DelayLineDataset:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_delay_line_csv(fh.read())


# ---------------------------------------------------------------------------
# key-value documents

def parse_keyvalue(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` comments and blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        key = key.strip()
        if not key:
            raise ParseError("empty key", line=lineno)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", line=lineno)
        out[key] = value.strip()
    return out


def _format_keyvalue(pairs) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs)


def _num(value: float) -> str:
    return repr(float(value))


def _require(kv: dict, key: str) -> str:
    if key not in kv:
        raise ParseError(f"missing required key {key!r}")
    return kv[key]


def _get_float(kv: dict, key: str) -> float:
    try:
        return float(_require(kv, key))
    except ValueError:
        raise ParseError(f"key {key!r} is not a number: {kv[key]!r}") from None


def _get_int(kv: dict, key: str) -> int:
    try:
        return int(_require(kv, key))
    except ValueError:
        raise ParseError(f"key {key!r} is not an integer: {kv[key]!r}") from None


def _get_bool(kv: dict, key: str, default: bool = False) -> bool:
    if key not in kv:
        return default
    value = kv[key].lower()
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ParseError(f"key {key!r} is not a boolean: {kv[key]!r}")


def _check_kind(kv: dict, kind: str) -> None:
    version = _get_int(kv, "spec_version")
    if version != SPEC_VERSION:
        raise ParseError(f"unsupported spec_version {version}")
    if _require(kv, "kind") != kind:
        raise ParseError(f"expected kind = {kind}, got {kv['kind']!r}")


# -- topology ---------------------------------------------------------------

def format_topology(topology: LadderTopology) -> str:
    pairs = [
        ("spec_version", str(SPEC_VERSION)),
        ("kind", "ladder_topology"),
        ("reference_impedance", _num(topology.reference_impedance)),
        ("stage_count", str(len(topology.stages))),
    ]
    for i, stage in enumerate(topology.stages, start=1):
        p = f"stage.{i}"
        model = stage.resonator
        pairs.append((f"{p}.placement", stage.placement.value))
        pairs.append((f"{p}.c0", _num(model.c0)))
        pairs.append((f"{p}.r0", _num(model.r0)))
        pairs.append((f"{p}.rs", _num(model.rs)))
        pairs.append((f"{p}.branch_count", str(len(model.branches))))
        for j, branch in enumerate(model.branches, start=1):
            q = f"{p}.branch.{j}"
            pairs.append((f"{q}.label", branch.label))
            pairs.append((f"{q}.rm", _num(branch.rm)))
            pairs.append((f"{q}.lm", _num(branch.lm)))
            pairs.append((f"{q}.cm", _num(branch.cm)))
    return _format_keyvalue(pairs)


def parse_topology(text: str) -> LadderTopology:
    kv = parse_keyvalue(text)
    _check_kind(kv, "ladder_topology")
    stages = []
    for i in range(1, _get_int(kv, "stage_count") + 1):
        p = f"stage.{i}"
        placement = _require(kv, f"{p}.placement")
        try:
            placement = Placement(placement)
        except ValueError:
            raise ParseError(f"unknown placement {placement!r}") from None
        branches = []
        for j in range(1, _get_int(kv, f"{p}.branch_count") + 1):
            q = f"{p}.branch.{j}"
            branches.append(
                MotionalBranch(
                    rm=_get_float(kv, f"{q}.rm"),
                    lm=_get_float(kv, f"{q}.lm"),
                    cm=_get_float(kv, f"{q}.cm"),
                    label=_require(kv, f"{q}.label"),
                )
            )
        main = [b for b in branches if b.label == "main"]
        if len(main) != 1:
            raise ParseError(f"stage {i} needs exactly one main branch")
        model = ResonatorModel(
            c0=_get_float(kv, f"{p}.c0"),
            main=main[0],
            spurs=tuple(b for b in branches if b.label != "main"),
            r0=_get_float(kv, f"{p}.r0"),
            rs=_get_float(kv, f"{p}.rs"),
        )
        stages.append(LadderStage(placement=placement, resonator=model))
    return LadderTopology(
        stages=tuple(stages),
        reference_impedance=_get_float(kv, "reference_impedance"),
    )


# -- design spec ------------------------------------------------------------

def format_design_spec(spec: DesignSpec) -> str:
    pairs = [
        ("spec_version", str(SPEC_VERSION)),
        ("kind", "design_spec"),
        ("fc_target_hz", _num(spec.fc_target)),
        ("fbw_target", _num(spec.fbw_target)),
        ("il_max_db", _num(spec.il_max_db)),
        ("stage_count", str(spec.stage_count)),
        ("q_assumed", _num(spec.q_assumed)),
        ("reference_impedance", _num(spec.reference_impedance)),
    ]
    if spec.provenance:
        pairs.append(("provenance", spec.provenance))
    return _format_keyvalue(pairs)


def parse_design_spec(text: str) -> DesignSpec:
    kv = parse_keyvalue(text)
    _check_kind(kv, "design_spec")
    return DesignSpec(
        fc_target=_get_float(kv, "fc_target_hz"),
        fbw_target=_get_float(kv, "fbw_target"),
        il_max_db=_get_float(kv, "il_max_db"),
        stage_count=_get_int(kv, "stage_count"),
        q_assumed=_get_float(kv, "q_assumed"),
        reference_impedance=_get_float(kv, "reference_impedance"),
        provenance=kv.get("provenance", ""),
    )


# -- geometry ---------------------------------------------------------------

def format_geometry(geom: GeometrySpec) -> str:
    return _format_keyvalue(
        [
            ("spec_version", str(SPEC_VERSION)),
            ("kind", "geometry"),
            ("lambda_m", _num(geom.wavelength)),
            ("pairs_n", str(geom.pairs_n)),
            ("aperture_w_m", _num(geom.aperture_w)),
            ("eps_eff_f_per_m", _num(geom.eps_eff)),
            ("q_assumed", _num(geom.q_assumed)),
        ]
    )


def parse_geometry(text: str) -> GeometrySpec:
    kv = parse_keyvalue(text)
    _check_kind(kv, "geometry")
    return GeometrySpec(
        wavelength=_get_float(kv, "lambda_m"),
        pairs_n=_get_int(kv, "pairs_n"),
        aperture_w=_get_float(kv, "aperture_w_m"),
        eps_eff=_get_float(kv, "eps_eff_f_per_m"),
        q_assumed=_get_float(kv, "q_assumed"),
    )


# -- spur environment -------------------------------------------------------

def _float_list(kv: dict, key: str, default: tuple) -> tuple:
    if key not in kv:
        return default
    return tuple(float(v) for v in kv[key].split(",") if v.strip())


def format_spur_environment(spurs: SpurEnvironment) -> str:
    t, lk, ot = spurs.transverse, spurs.leaky, spurs.overtone
    pairs = [
        ("spec_version", str(SPEC_VERSION)),
        ("kind", "spur_environment"),
        ("transverse.enabled", str(t.enabled).lower()),
        ("transverse.orders", ",".join(str(m) for m in t.orders)),
        ("transverse.relative_coupling", ",".join(_num(v) for v in t.relative_coupling)),
        ("transverse.relative_offset", ",".join(_num(v) for v in t.relative_offset)),
        ("transverse.piston", str(t.piston).lower()),
        ("transverse.piston_factor", _num(t.piston_factor)),
        ("leaky.enabled", str(lk.enabled).lower()),
        ("leaky.pr_over_pi", _num(lk.pr_over_pi)),
        ("leaky.relative_coupling", _num(lk.relative_coupling)),
        ("leaky.relative_offset", _num(lk.relative_offset)),
        ("overtone.enabled", str(ot.enabled).lower()),
        ("overtone.embedded_idt", str(ot.embedded_idt).lower()),
        ("overtone.relative_coupling", _num(ot.relative_coupling)),
        ("overtone.frequency_factor", _num(ot.frequency_factor)),
    ]
    return _format_keyvalue(pairs)


def parse_spur_environment(text: str) -> SpurEnvironment:
    kv = parse_keyvalue(text)
    _check_kind(kv, "spur_environment")
    defaults_t = TransverseSpurs()
    orders = tuple(int(v) for v in kv["transverse.orders"].split(",")) if "transverse.orders" in kv else defaults_t.orders
    transverse = TransverseSpurs(
        enabled=_get_bool(kv, "transverse.enabled"),
        orders=orders,
        relative_coupling=_float_list(kv, "transverse.relative_coupling", defaults_t.relative_coupling),
        relative_offset=_float_list(kv, "transverse.relative_offset", defaults_t.relative_offset),
        piston=_get_bool(kv, "transverse.piston"),
        piston_factor=float(kv.get("transverse.piston_factor", defaults_t.piston_factor)),
    )
    defaults_l = LeakySpur()
    leaky = LeakySpur(
        enabled=_get_bool(kv, "leaky.enabled"),
        pr_over_pi=float(kv.get("leaky.pr_over_pi", defaults_l.pr_over_pi)),
        relative_coupling=float(kv.get("leaky.relative_coupling", defaults_l.relative_coupling)),
        relative_offset=float(kv.get("leaky.relative_offset", defaults_l.relative_offset)),
    )
    defaults_o = OvertoneSpur()
    overtone = OvertoneSpur(
        enabled=_get_bool(kv, "overtone.enabled"),
        embedded_idt=_get_bool(kv, "overtone.embedded_idt"),
        relative_coupling=float(kv.get("overtone.relative_coupling", defaults_o.relative_coupling)),
        frequency_factor=float(kv.get("overtone.frequency_factor", defaults_o.frequency_factor)),
    )
    return SpurEnvironment(transverse=transverse, leaky=leaky, overtone=overtone)


# ---------------------------------------------------------------------------
# run configuration

@dataclass(frozen=True)
class FrequencyGrid:
    """Sweep grid specification: ``start < stop``, at least 2 points."""

    start_hz: float
    stop_hz: float
    points: int = 2001
    spacing: str = "linear"

    def __post_init__(self):
        if not (math.isfinite(self.start_hz) and self.start_hz > 0):
            raise DomainError(f"start must be > 0, got {self.start_hz}")
        if not (math.isfinite(self.stop_hz) and self.stop_hz > self.start_hz):
            raise DomainError("grid needs start < stop")
        if int(self.points) != self.points or self.points < 2:
            raise DomainError(f"points must be an integer >= 2, got {self.points}")
        object.__setattr__(self, "points", int(self.points))
        if self.spacing not in ("linear", "log"):
            raise DomainError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")

    def build(self) -> np.ndarray:
        if self.spacing == "linear":
            return np.linspace(self.start_hz, self.stop_hz, self.points)
        return np.geomspace(self.start_hz, self.stop_hz, self.points)


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs, assembled from flags and files."""

    grid: FrequencyGrid
    constants: PlatformConstants = PlatformConstants()
    table_paths: tuple = ()
    output_dir: str = "."
