import pytest
from hypothesis import settings

from qspair.loopalg import Params, eval_module, tensor, trivial_rep
from qspair.scalars import qpow

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


def V(N, k, u=None):
    """Evaluation module V(q^k) (k is the exponent of q)."""
    p = Params(N, u or ())
    return eval_module(p, qpow(k))


def VW(N, k1, k2, u=None):
    return tensor(V(N, k1, u), V(N, k2, u))


@pytest.fixture
def trivial():
    return lambda N: trivial_rep(Params(N))


# -- acceptance reporting ----------------------------------------------------------------

_ACCEPTANCE: dict = {}


class _Criterion:
    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget

    def __enter__(self):
        import time
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        import time
        elapsed = time.perf_counter() - self._t0
        ok = exc_type is None
        line = (f"criterion {self.number:>2} {'PASS' if ok else 'FAIL'}  {self.title}"
                f"  ({elapsed:.1f}s, budget {self.budget}s)")
        _ACCEPTANCE[self.number] = line
        print(line)
        if ok and elapsed > self.budget:
            _ACCEPTANCE[self.number] = line.replace("PASS", "FAIL", 1) + " over budget"
            raise AssertionError(f"criterion {self.number} exceeded its {self.budget}s budget")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
