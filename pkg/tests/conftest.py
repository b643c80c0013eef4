import numpy as np
import pytest

from femtorelay.config import ScenarioConfig
from femtorelay.topology import Topology


def hand_topology(M=1, F=1, N=1, K=1, g_mue_mbs=None, g_mue_fbs=None, g_fue_mbs=None, g_fue_fbs=None,
                  g_fbs_mbs=None) -> Topology:
    """A topology with chosen gains; positions are placeholders."""
    def arr(v, shape, default):
        return np.full(shape, default, dtype=float) if v is None else np.array(v, dtype=float).reshape(shape)

    return Topology(
        mue_positions=np.zeros((M, 2)),
        fbs_positions=np.zeros((F, 2)),
        fue_positions=np.zeros((F, 2)),
        fue_subchannel=np.arange(F) % N,
        mue_subchannel=np.arange(M) % N,
        ota_channel=np.arange(F) % K,
        num_subchannels=N,
        gain_mue_mbs=arr(g_mue_mbs, (M,), 1e-10),
        gain_mue_fbs=arr(g_mue_fbs, (M, F), 1e-10),
        gain_fue_mbs=arr(g_fue_mbs, (F,), 1e-13),
        gain_fue_fbs=arr(g_fue_fbs, (F, F), 1e-12),
        gain_fbs_mbs=arr(g_fbs_mbs, (F,), 1e-10),
    )


@pytest.fixture
def cfg():
    return ScenarioConfig()


@pytest.fixture
def small_cfg():
    return ScenarioConfig(num_mues=2, num_fbs=6, num_subchannels=3, num_ota_channels=2)


# acceptance report: one line per criterion, repeated at the end of the run
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, passed: bool, detail: str) -> str:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
