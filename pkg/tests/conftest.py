import pytest

from qap import InitialData, OscillatorSpec


@pytest.fixture
def spec() -> OscillatorSpec:
    """Default experiment constants: unit oscillator, boundary 0 -> 1."""
    return OscillatorSpec(m=1.0, k=1.0, hbar_tilde=0.0, T=1.0, x0=0.0, xT=1.0)


@pytest.fixture
def classical_init() -> InitialData:
    """Unit linear coefficient, zero phase offset, silent amplitude sector."""
    return InitialData(S10=1.0, S20=0.0, sigma10=0.0, sigma20=0.0)
