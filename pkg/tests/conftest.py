import pytest

from flowright import ChannelParams, instance_from_dict

# Two-user broadcast reference example: 13 harvests over 23 hours on a
# 100 kHz link, 800 Mbit to the stronger user and 100 Mbit to the weaker.
GOLDEN_TIMES_H = [0, 2, 5, 7, 9, 10, 11, 13, 14, 15, 18, 20, 23]
GOLDEN_ENERGIES_J = [10, 10, 20, 40, 60, 70, 90, 180, 190, 100, 50, 30, 10]
GOLDEN_DOC = {
    "bits": [800e6, 100e6],
    "harvests": [
        {"t": t, "E": e} for t, e in zip(GOLDEN_TIMES_H, GOLDEN_ENERGIES_J)
    ],
    "channel": {"W_hz": 1e5, "N0": 1e-13, "pathloss_db": [70, 75]},
}


@pytest.fixture(scope="session")
def params():
    return ChannelParams(s1=1.0, s2=0.5, sigma2=1.0)


@pytest.fixture(scope="session")
def golden_instance():
    return instance_from_dict(GOLDEN_DOC, time_unit="h")
