"""acoufilt: multiband acoustic-wave resonator and ladder-filter toolkit.

Maps device geometry to mBVD electrical models through dispersion tables,
simulates ladder-filter S-parameters, synthesizes filters to band targets and
extracts figures of merit (Bode-Q, coupling, loss factor, IL/FBW) from
simulated or measured sweeps.
"""

from .dispersion import (
    AcousticMode,
    DispersionTable,
    PlatformConstants,
    Regime,
    builtin_table,
    classify_regime,
    frequency_for,
    interpolate,
    select_mode,
    wavelength_for_frequency,
)
from .errors import ToolkitError
from .extraction import (
    DelayLineDataset,
    FitReport,
    QCurve,
    bode_q,
    extract_fr_fa,
    figure_of_merit,
    fit_delay_line_loss,
    fit_mbvd,
)
from .network import (
    FilterMetrics,
    LadderStage,
    LadderTopology,
    Placement,
    SParameterSet,
    cascade_sweep,
    filter_metrics,
    one_port_sweep,
    stage_abcd,
)
from .resonator import (
    MotionalBranch,
    ResonatorModel,
    admittance,
    coupling_from_frequencies,
    quality_factor,
    resonance_frequencies,
)
from .synth import (
    DesignSpec,
    GeometrySpec,
    LeakySpur,
    OvertoneSpur,
    SpurEnvironment,
    SynthesisResult,
    TransverseSpurs,
    band_presets,
    derive_resonator,
    ladder_synthesize,
    leak_gain,
    resonator_from_wavelength,
    spur_branches,
    static_capacitance,
)
from .touchstone import read_touchstone, write_touchstone

__version__ = "0.1.0"

__all__ = [
    "AcousticMode",
    "DelayLineDataset",
    "DesignSpec",
    "DispersionTable",
    "FilterMetrics",
    "FitReport",
    "GeometrySpec",
    "LadderStage",
    "LadderTopology",
    "LeakySpur",
    "MotionalBranch",
    "OvertoneSpur",
    "Placement",
    "PlatformConstants",
    "QCurve",
    "Regime",
    "ResonatorModel",
    "SParameterSet",
    "SpurEnvironment",
    "SynthesisResult",
    "ToolkitError",
    "TransverseSpurs",
    "admittance",
    "band_presets",
    "bode_q",
    "builtin_table",
    "cascade_sweep",
    "classify_regime",
    "coupling_from_frequencies",
    "derive_resonator",
    "extract_fr_fa",
    "figure_of_merit",
    "filter_metrics",
    "fit_delay_line_loss",
    "fit_mbvd",
    "frequency_for",
    "interpolate",
    "ladder_synthesize",
    "leak_gain",
    "one_port_sweep",
    "quality_factor",
    "read_touchstone",
    "resonance_frequencies",
    "resonator_from_wavelength",
    "select_mode",
    "spur_branches",
    "stage_abcd",
    "static_capacitance",
    "wavelength_for_frequency",
    "write_touchstone",
]
