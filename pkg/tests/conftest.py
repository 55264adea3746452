import math

import pytest
from hypothesis import HealthCheck, settings

from isorec import ComplexPair, DistinctReal, DoubleRoot

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

NINE = [
    DoubleRoot(0.0),
    DoubleRoot(-1.0),
    DoubleRoot(0.7),
    DistinctReal(-1.0, 1.0),
    DistinctReal(1.0, 1.0 + 1e-6),
    DistinctReal(0.0, 2.0),
    ComplexPair(0.0, 1.0),
    ComplexPair(0.5, 2.0),
    ComplexPair(-1.0, 1e-6),
]

# D^2, D^2 - 1, D^2 + 1
P_ZERO = [DoubleRoot(0.0), DistinctReal(-1.0, 1.0), ComplexPair(0.0, 1.0)]


def op_id(op):
    return f"{type(op).__name__}({op.alpha:g},{getattr(op, 'beta', math.nan):g})"


@pytest.fixture(params=NINE, ids=op_id)
def op(request):
    return request.param


_VERDICTS: dict[int, tuple[bool, str]] = {}


def record_verdict(number: int, ok: bool, detail: str) -> None:
    _VERDICTS[number] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_VERDICTS):
        ok, detail = _VERDICTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
