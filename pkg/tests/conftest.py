import pytest

from magicbias.experiment import enumerate_flags
from magicbias.gadget import NoisyFlags

FULL_FLAGS = NoisyFlags()
MAGIC_ONLY = NoisyFlags(stabilizer_state_prep=False, magic_prep=True,
                        injection_cnot=False, error_correction=False)
ABLATED = NoisyFlags(stabilizer_state_prep=False, magic_prep=True,
                     injection_cnot=True, error_correction=False)


@pytest.fixture(scope="session")
def full_order2():
    """Order-2 enumeration of all 24 circuits, all components noisy."""
    return enumerate_flags(FULL_FLAGS, order=2)


@pytest.fixture(scope="session")
def ablated_order2():
    """Order-2 enumeration with ideal stabilizer prep and error correction."""
    return enumerate_flags(ABLATED, order=2)


@pytest.fixture(scope="session")
def magic_only_order2():
    """Order-2 enumeration with only magic state preparation noisy."""
    return enumerate_flags(MAGIC_ONLY, order=2)
