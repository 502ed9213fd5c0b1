"""Shared reference parameter sets for the test suite."""

import numpy as np
import pytest

from spincavity import ScanConfig, SystemParams, TrionLevels
from spincavity.physcalc import wavelength_to_frequency

# Canonical device numbers used throughout the suite: cavity linewidth
# 31.79 GHz, total zero-field coupling 18.67 GHz with transverse dipole
# rate 1.78 GHz, and the field-split couplings 17.2 / 7.2 GHz with
# dephasings 1.4 / 3.1 GHz. Transition 4 sits on the cavity resonance,
# 12 GHz below transition 3.
KAPPA = 31.79
G_TOTAL = 18.67
GAMMA_PERP_0T = 1.78
G4 = 17.2
G3 = 7.2
GAMMA_D3 = 3.1
GAMMA_D4 = 1.4
DELTA_H = 12.0

CAVITY_NM = 931.45
DOT_0T_NM = 931.50
ELECTRON_G = 0.478
HOLE_G = 0.143
DIAMAGNETIC = 1.15  # GHz/T^2, places the transition-4 crossing near 6.2 T


@pytest.fixture
def ref_params() -> SystemParams:
    """Coupled-system parameters with transition 4 on cavity resonance."""
    return SystemParams(kappa=KAPPA, g3=G3, g4=G4,
                        gamma_d3=GAMMA_D3, gamma_d4=GAMMA_D4,
                        omega_c=0.0, omega_x=DELTA_H, delta_h=DELTA_H)


@pytest.fixture
def bare_params(ref_params) -> SystemParams:
    from dataclasses import replace
    return replace(ref_params, g3=0.0, g4=0.0)


@pytest.fixture
def ref_levels() -> TrionLevels:
    return TrionLevels(zero_field_frequency=wavelength_to_frequency(DOT_0T_NM),
                       electron_g=ELECTRON_G, hole_g=HOLE_G,
                       diamagnetic_coeff=DIAMAGNETIC)


@pytest.fixture
def cavity_freq() -> float:
    return wavelength_to_frequency(CAVITY_NM)


@pytest.fixture
def ref_scan() -> ScanConfig:
    """Symmetric scan whose grid contains the cavity resonance exactly."""
    return ScanConfig(start=-60.0, stop=60.0, n_points=241,
                      scale=(np.pi * KAPPA) ** 2, background=0.0)
