import math

import numpy as np
import pytest

from measurescale.filter_bank import FilterBank, taps_from_beta

SQ2 = math.sqrt(2.0)

# Frozen from 30-digit mpmath evaluation of the closed-form taps (see
# tests/oracles.py); never from the code under test.
TAPS_03 = (0.83122163515607677, 0.50131349392394355, -0.12411485396952925, 0.20579328726260397)
LAMBDA_03 = -0.32990814123213322
ALPHA_03 = 0.690929406751542
S_03 = 0.53338977896571597
P_A0_03 = 0.14411345263609483
V_03 = (1.0, -0.82276461128854952, -0.17723538871145048)
V_NORM2_03 = 1.7083539886004969
GAP_03 = 0.85068380234565904
LOG3_2 = 0.63092975357145744

BETAS_64 = np.linspace(-math.pi, math.pi, 64)


@pytest.fixture
def haar4():
    """Haar padded to four taps (beta = pi/4)."""
    return FilterBank(np.array([1.0, 1.0, 0.0, 0.0]) / SQ2)


@pytest.fixture
def fb03():
    return taps_from_beta(0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
