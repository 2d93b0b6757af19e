import pytest

from popalloc import SessionCensus, SystemParams

WORKED_COUNTS = [40, 30, 20, 15, 12, 10, 10, 9, 8, 8, 7, 6, 5, 5, 4, 3, 3, 2, 2, 1]

# Hand-checked output of the surplus cascade for WORKED_COUNTS at
# C=30, cap=2, floor=0.6 Mbps; cross-checked against the exact-rational
# oracle in oracles.py.
WORKED_RATES_MBPS = [
    2.0, 2.0, 2.0, 2.0,
    1.920625, 1.740625, 1.740625, 1.650625, 1.560625, 1.560625,
    1.470625, 1.380625, 1.290625, 1.290625, 1.200625, 1.110625,
    1.110625, 1.020625, 1.020625, 0.930625,
]


@pytest.fixture
def reference_params() -> SystemParams:
    return SystemParams.from_mbps(30, 2, 0.6)


@pytest.fixture
def worked_census() -> SessionCensus:
    return SessionCensus.from_counts(
        (f"s{i:02d}", n) for i, n in enumerate(WORKED_COUNTS, start=1)
    )
