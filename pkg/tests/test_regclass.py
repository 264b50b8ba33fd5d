import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diagcalc.errors import DomainTooSparse, NotDifferentiable
from diagcalc.funcspec import FunctionSpec, OpenDisk, RealInterval, tcdis_domain
from diagcalc.regclass import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    RegularityConfig,
    RegularityVerdict,
    SweepPoint,
    Witness,
    default_scales,
    estimate_ddb,
    estimate_ddc,
    pool_size,
    taylor_polynomial,
    taylor_remainder,
    unit_pattern,
)

from .conftest import corpus_functions

SCALES = (1e-1, 1e-2, 1e-3, 1e-4)
EXP = FunctionSpec.from_expression("exp(z)", OpenDisk(0, 1))
ABS = FunctionSpec.from_expression("abs(z)", RealInterval(-1, 1))
SIN01 = FunctionSpec.from_expression("sin(z)", RealInterval(0, 1))
TCDIS_SCALES = (1.0, 0.5, 0.25, 0.125, 0.0625)


# -- sampling --------------------------------------------------------------------

def test_pool_size_respects_budget():
    cfg = RegularityConfig()
    for k in range(0, 8):
        m = pool_size(k, cfg)
        assert m >= k + 1
        assert m == cfg.max_pool or math.comb(m, k + 1) <= cfg.max_tuples < math.comb(m + 1, k + 1)


@pytest.mark.parametrize("one_d", [True, False])
def test_unit_pattern_in_shell(one_d):
    for k in range(0, 6):
        u = unit_pattern(k, one_d)
        assert len(u) >= k + 1
        assert np.all(np.abs(u) <= 1 + 1e-12) and np.all(np.abs(u) >= 0.5 - 1e-12)
        if one_d:
            assert np.all(u.imag == 0)
            np.testing.assert_allclose(np.sort(u.real), np.sort(-u.real))
        assert len(set(np.round(u, 12))) == len(u)


def test_config_validation():
    with pytest.raises(ValueError):
        RegularityConfig(contraction=0.6, stall=0.5)
    with pytest.raises(ValueError):
        RegularityConfig(bounded_ratio=2e3)
    with pytest.raises(ValueError):
        RegularityConfig(max_tuples=0)


def test_verdict_record_invariants():
    with pytest.raises(ValueError):
        RegularityVerdict("DDB(1)", FAIL, None, ())
    with pytest.raises(ValueError):
        RegularityVerdict("DDB(1)", PASS, None, (SweepPoint(1e-2, 1, 0, 1), SweepPoint(1e-1, 1, 0, 1)))
    with pytest.raises(ValueError):
        RegularityVerdict("DDB(1)", "maybe", None, ())
    v = RegularityVerdict("DDB(1)", FAIL, Witness((0j, 1j), 2.0), (SweepPoint(1e-1, 2, 0, 1),))
    assert v.to_report().to_csv().endswith("# verdict=fail\n")


# -- DDB ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", range(0, 6))
def test_exp_ddb_pass(k):
    v = estimate_ddb(EXP, k, 0, SCALES)
    assert v.verdict == PASS
    assert v.class_tested == f"DDB({k})"
    assert [p.h for p in v.sweep] == list(SCALES)


def test_abs_ddb2_fails_like_one_over_h():
    v = estimate_ddb(ABS, 2, 0, SCALES)
    assert v.verdict == FAIL and v.witness is not None
    for p in v.sweep:
        assert abs(p.statistic * p.h - 1) <= 0.1
    # the witness straddles the kink
    xs = [z.real for z in v.witness.nodes]
    assert min(xs) < 0 < max(xs)


def test_tcdis_ddb1_fails_with_exact_witness():
    f = tcdis_domain(20)
    v = estimate_ddb(f, 1, 0, TCDIS_SCALES)
    assert v.verdict == FAIL
    nodes = sorted(z.real for z in v.witness.nodes)
    n = round(1 / nodes[0])
    assert nodes == [1 / n, f.domain.nearest(1 / n + 3.0**-n).real]
    assert v.witness.magnitude == pytest.approx(1.5**n, rel=1e-12)


def test_domain_too_sparse():
    with pytest.raises(DomainTooSparse):
        estimate_ddb(tcdis_domain(3), 5, 0, (0.1,))
    with pytest.raises(ValueError):
        estimate_ddb(EXP, 1, 0, (1e-3, 1e-2))


@pytest.mark.parametrize("k", range(0, 5))
def test_sin_lipschitz_bound(k):
    v = estimate_ddb(SIN01, k, 0.5, (0.5, 0.1, 1e-2))
    assert v.verdict == PASS
    # |Delta_{k+1} sin| <= max |sin^(k)| / k! <= 1
    assert all(p.statistic <= 1 + 1e-6 for p in v.sweep)


# -- DDC ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", range(0, 5))
@pytest.mark.parametrize("a", [0, 0.3, 0.2j])
def test_exp_ddc_limit(k, a):
    v = estimate_ddc(EXP, k, a, SCALES)
    assert v.verdict == PASS
    want = np.exp(a) / math.factorial(k)
    assert abs(v.limit - want) <= 1e-5 * abs(want)


def test_abs_ddc1_fails():
    v = estimate_ddc(ABS, 1, 0, SCALES)
    assert v.verdict == FAIL
    assert v.witness.partner is not None
    assert v.witness.magnitude == pytest.approx(2, rel=0.1)


@pytest.mark.parametrize("k", range(1, 5))
def test_affine_ddc_limit(k):
    # k+1 nodes: the slope for k = 1, zero from k = 2 on
    f = FunctionSpec.from_expression("2*z + 3", OpenDisk(0, 1))
    v = estimate_ddc(f, k, 0, SCALES)
    assert v.verdict == PASS
    assert abs(v.limit - (2 if k == 1 else 0)) <= 1e-6


@pytest.mark.parametrize("k", range(0, 4))
def test_ddc_pass_implies_ddb_pass_on_corpus(k):
    for f in corpus_functions():
        c = estimate_ddc(f, k, 0, SCALES)
        b = estimate_ddb(f, k, 0, SCALES)
        if c.verdict == PASS:
            assert b.verdict == PASS, f.label


# -- Taylor ------------------------------------------------------------------------

def test_exp_taylor_remainder():
    # beyond 1e-4 the remainder h^3/6 drops under double rounding
    probes = [10.0**-m for m in range(1, 5)]
    v = taylor_remainder(EXP, 2, 0, probes)
    assert v.verdict == PASS
    for p in v.sweep:
        assert p.statistic == pytest.approx(p.h / 6, rel=0.2)


def test_polynomial_taylor_zero():
    f = FunctionSpec.from_expression("z^3 - z + 2")
    v = taylor_remainder(f, 3, 0.5, [0.9, 0.7, 0.6, 0.55])
    assert v.verdict == PASS
    assert all(p.statistic <= 1e-14 / p.h**3 for p in v.sweep)


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_tcdis_taylor_pass(k):
    f = tcdis_domain(20)
    v = taylor_remainder(f, k, 0, f.domain.points)
    assert v.verdict == PASS


def test_taylor_errors():
    with pytest.raises(NotDifferentiable):
        taylor_remainder(ABS, 1, 0, [0.1, 0.01])
    with pytest.raises(NotDifferentiable):
        taylor_remainder(EXP, 1, 5, [0.1])
    with pytest.raises(ValueError):
        taylor_polynomial(EXP, 2, 0, derivatives=[1, 1])


def test_explicit_derivatives_match_symbolic():
    T1, _ = taylor_polynomial(EXP, 3, 0.1)
    T2, _ = taylor_polynomial(EXP, 3, 0.1, [np.exp(0.1)] * 4)
    for z in (0.2, 0.3j, -0.4):
        assert abs(T1(z) - T2(z)) <= 1e-14


# -- defaults and determinism ------------------------------------------------------

def test_default_scales():
    assert default_scales(EXP, 0) == SCALES
    s = default_scales(tcdis_domain(5), 0)
    assert s[0] == 1.0 and all(b == a / 2 for a, b in zip(s, s[1:]))


@settings(max_examples=15)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(0, 3))
def test_determinism(seed, k):
    cfg = RegularityConfig(seed=seed, max_tuples=500)
    for est in (estimate_ddb, estimate_ddc):
        a = est(EXP, k, 0.1j, SCALES, cfg)
        b = est(EXP, k, 0.1j, SCALES, cfg)
        assert a.to_report().to_csv() == b.to_report().to_csv()
        assert a == b or all(
            (p.h, p.statistic, p.noise, p.n_tuples) == (q.h, q.statistic, q.noise, q.n_tuples)
            for p, q in zip(a.sweep, b.sweep)
        )
