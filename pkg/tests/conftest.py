import mpmath as mp
import pytest

from momprob import PrecisionConfig, families, truncation_spectrum
from momprob.precision import to_mpf


def assert_close(a, b, tol, msg=""):
    """|a - b| <= tol with mpf-safe arithmetic (Fractions welcome)."""
    with mp.workprec(max(mp.mp.prec, 300)):
        if isinstance(a, (complex, mp.mpc)) or isinstance(b, (complex, mp.mpc)):
            diff = abs(mp.mpc(a) - mp.mpc(b))
        else:
            diff = abs(to_mpf(a) - to_mpf(b))
        assert diff <= tol, f"{msg} |diff| = {mp.nstr(diff, 8)} > {tol}"


@pytest.fixture(scope="session")
def cfg256():
    return PrecisionConfig.bigfloat(256)


@pytest.fixture(scope="session")
def cfg512():
    return PrecisionConfig.bigfloat(512)


@pytest.fixture(scope="session")
def cfg_rational():
    return PrecisionConfig.rational()


@pytest.fixture(scope="session")
def hermite256(cfg256):
    return families.hermite_like(cfg256)


@pytest.fixture(scope="session")
def lognormal60(cfg512):
    return families.lognormal(60, cfg512)


@pytest.fixture(scope="session")
def lognormal_proxy40(lognormal60):
    """40-atom Gauss measure of the lognormal matrix (session-cached)."""
    return truncation_spectrum(lognormal60, 40)


_CRITERION_DESCRIPTIONS = {
    "01": "Hankel positivity and recurrence coefficients (Gaussian family)",
    "02": "moments <-> recurrence round trip, 50 random matrices",
    "03": "determinate side: hermite_like radius trace",
    "04": "indeterminate side: lognormal radius stabilization",
    "05": "damped-measure constructions never indeterminate",
    "06": "operator route vs measure route agreement",
    "07": "weighted-basis Gram identity",
    "08": "reweighting index law Finite(1)/Finite(2)",
    "09": "infinite-index probe AtLeast(4)",
    "10": "structural invariants suite",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = {}
    for status, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call" and verdict == "PASS":
                continue
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid:
                tag = nodeid.split("test_criterion_")[1][:2]
                lines[tag] = (verdict, _CRITERION_DESCRIPTIONS.get(tag, nodeid))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for tag in sorted(lines):
            verdict, desc = lines[tag]
            terminalreporter.write_line(f"{verdict}  criterion {tag}: {desc}")
