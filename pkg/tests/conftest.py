import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, n):
    B = rng.standard_normal((n, n))
    return B @ B.T + n * np.eye(n)


def random_psd_kernel(rng, n, top=1.5):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    d = rng.uniform(0.0, top, n)
    K = (Q * d) @ Q.T
    return 0.5 * (K + K.T)


def rel_error(g, ref):
    """Norm-wise relative error of ``g`` against ``ref``."""
    g, ref = np.asarray(g), np.asarray(ref)
    return float(np.linalg.norm(g - ref) / max(np.linalg.norm(ref), 1e-12))


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.lines():
            terminalreporter.write_line(line)
