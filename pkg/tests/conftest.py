import numpy as np
import pytest

from acoufilt.dispersion import AcousticMode, DispersionTable
from acoufilt.network import LadderStage, LadderTopology, Placement
from acoufilt.resonator import MotionalBranch, ResonatorModel

# Reference mBVD element values used throughout: c0=1 pF, lm=100 nH,
# cm=0.12 pF, rm=0.25 ohm.  Closed-form figures frozen from the formulas:
REF_FR = 1452879207.8313682       # 1 / (2*pi*sqrt(lm*cm))
REF_FA = 1537582827.5753307       # fr * sqrt(1 + cm/c0)
REF_Q = 3651.4837167011074        # sqrt(lm/cm) / rm
REF_SQRT_LM_CM = 912.8709291752769  # sqrt(lm/cm)


@pytest.fixture
def ref_model():
    return ResonatorModel(c0=1e-12, main=MotionalBranch(rm=0.25, lm=1e-7, cm=0.12e-12))


@pytest.fixture
def ref_model_lossless():
    return ResonatorModel(c0=1e-12, main=MotionalBranch(rm=0.0, lm=1e-7, cm=0.12e-12))


def anchored_sh0_table(k2_at_anchor):
    """Synthetic SH0 table whose x=0.09 sample maps lambda=5 um exactly onto
    the reference resonance frequency, with a chosen coupling there."""
    vp_anchor = REF_FR * 5e-6  # 7264.396... m/s
    shift = k2_at_anchor - 0.0867
    samples = (
        (0.05, 7330.0, 0.070 + shift),
        (0.07, 7300.0, 0.079 + shift),
        (0.09, vp_anchor, k2_at_anchor),
        (0.12, 7060.0, 0.105 + shift),
        (0.15, 6780.0, 0.132 + shift),
    )
    return DispersionTable(mode=AcousticMode.SH0, samples=samples, provenance="test anchor")


def random_resonator(rng, lossless=False, spurs=()):
    fr = rng.uniform(1e9, 6e9)
    c0 = rng.uniform(0.3e-12, 3e-12)
    cm = rng.uniform(0.02, 0.3) * c0
    lm = 1.0 / ((2 * np.pi * fr) ** 2 * cm)
    if lossless:
        rm = rs = r0 = 0.0
    else:
        rm = np.sqrt(lm / cm) / rng.uniform(500, 5000)
        rs = rng.uniform(0.0, 1.0)
        r0 = rng.uniform(0.0, 5.0)
    return ResonatorModel(
        c0=c0, main=MotionalBranch(rm=rm, lm=lm, cm=cm), spurs=spurs, rs=rs, r0=r0
    )


def random_topology(rng, lossless=False, max_stages=6):
    n = int(rng.integers(1, max_stages + 1))
    stages = tuple(
        LadderStage(
            Placement.SERIES if rng.random() < 0.5 else Placement.SHUNT,
            random_resonator(rng, lossless=lossless),
        )
        for _ in range(n)
    )
    return LadderTopology(stages=stages, reference_impedance=50.0)
