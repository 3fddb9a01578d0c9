import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ppsm import (
    CoefficientVector,
    DegenerateModel,
    PositivityViolation,
    ProbabilityTable,
    SIGNS,
    ci_report,
    closed_form_shifts,
    coefficients_from_table,
    conditional_s,
    index_of,
    marginal_psiphi,
    shift_report,
    table_from_coefficients,
)
from ppsm.model import OUTCOMES, monomials

UNIFORM = CoefficientVector((0.0,) * 7)
CMAX = CoefficientVector((0.0,) * 6 + (1.0,))


def dirichlet_table(rng):
    return ProbabilityTable(tuple(rng.dirichlet(np.ones(8))))


def product_table(w, q_plus, q_minus, r_plus, r_minus):
    """Table that factorizes as Pr(psi) Pr(s|psi) Pr(phi|psi)."""
    entries = [0.0] * 8
    for psi, pr_psi, q, r in ((1, w, q_plus, r_plus), (-1, 1 - w, q_minus, r_minus)):
        for s in SIGNS:
            qs = q if s == 1 else 1 - q
            for phi in SIGNS:
                rphi = r if phi == 1 else 1 - r
                entries[index_of(psi, s, phi)] = pr_psi * qs * rphi
    return ProbabilityTable(tuple(entries))


class TestTableFromCoefficients:
    def test_uniform(self):
        t = table_from_coefficients(UNIFORM)
        assert t.p == (0.125,) * 8

    def test_pure_triple_correlation(self):
        t = table_from_coefficients(CMAX)
        for o in OUTCOMES:
            expected = 0.25 if o.psi * o.s * o.phi == 1 else 0.0
            assert t[o] == expected

    def test_positivity_violation_names_cell(self):
        with pytest.raises(PositivityViolation) as exc:
            table_from_coefficients(CoefficientVector((0, 0, 0, 2.0, 0, 0, 0)))
        assert exc.value.assignment == (1, -1, 1)

    def test_tiny_negative_clamped(self):
        c = CoefficientVector((0, 0, 0, 0, 0, 0, 1.0 + 1e-14))
        t = table_from_coefficients(c)
        assert min(t.p) == 0.0
        assert abs(sum(t.p) - 1.0) < 1e-15


class TestCoefficientsFromTable:
    def test_uniform(self):
        c = coefficients_from_table(ProbabilityTable((0.125,) * 8))
        assert c.c == (0.0,) * 7

    def test_strong_model_moments(self):
        theta = 0.7
        ct = math.cos(theta)
        from ppsm import quantum_strong

        c = coefficients_from_table(table_from_coefficients(quantum_strong(theta)))
        expected = (0, 0, 0, ct, -ct * ct, -ct, 0)
        assert c.c == pytest.approx(expected, abs=1e-15)

    def test_point_mass(self):
        entries = [0.0] * 8
        entries[index_of(1, -1, 1)] = 1.0
        c = coefficients_from_table(ProbabilityTable(tuple(entries)))
        assert c.c == (1, -1, 1, -1, 1, -1, -1)

    def test_round_trip_random(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            t = dirichlet_table(rng)
            t2 = table_from_coefficients(coefficients_from_table(t))
            assert max(abs(a - b) for a, b in zip(t.p, t2.p)) < 1e-12


class TestMarginal:
    def test_uniform(self):
        m = marginal_psiphi(ProbabilityTable((0.125,) * 8))
        assert all(v == 0.25 for v in m.values())

    def test_triple_correlation_vanishes(self):
        m = marginal_psiphi(table_from_coefficients(CMAX))
        assert all(v == pytest.approx(0.25, abs=1e-15) for v in m.values())

    def test_strong_model(self):
        from ppsm import quantum_strong

        theta = math.pi / 4
        m = marginal_psiphi(table_from_coefficients(quantum_strong(theta)))
        for (psi, phi), v in m.items():
            expected = (1 - math.cos(theta) ** 2 * psi * phi) / 4
            assert v == pytest.approx(expected, abs=1e-15)

    def test_sums_to_one(self):
        rng = np.random.default_rng(3)
        m = marginal_psiphi(dirichlet_table(rng))
        assert sum(m.values()) == pytest.approx(1.0, abs=1e-12)


class TestConditional:
    def test_triple_correlation_is_deterministic(self):
        dist = conditional_s(table_from_coefficients(CMAX), 1, -1)
        assert dist == (0.0, 1.0)

    def test_uniform(self):
        dist = conditional_s(ProbabilityTable((0.125,) * 8), -1, 1)
        assert dist == (0.5, 0.5)

    def test_null_event_is_undefined(self):
        entries = [0.0] * 8
        entries[index_of(1, 1, 1)] = 1.0
        assert conditional_s(ProbabilityTable(tuple(entries)), -1, -1) is None


class TestShiftReport:
    def test_maximal_model(self):
        r = shift_report(table_from_coefficients(CMAX))
        assert r.pre == {1: 0.0, -1: 0.0}
        for psi in SIGNS:
            for phi in SIGNS:
                assert r.post[(psi, phi)] == psi * phi
                assert r.margin[(psi, phi)] == 1.0
        assert r.apss and len(r.witnesses) == 4

    def test_weak_quantum_example(self):
        from ppsm import quantum_weak

        r = shift_report(table_from_coefficients(quantum_weak(math.pi / 3, 0.4)))
        assert r.pre[1] == pytest.approx(0.2, abs=1e-12)
        assert r.post[(1, -1)] == pytest.approx(0.8, abs=1e-12)

    def test_classical_disturbance_example(self):
        from ppsm import classical_disturbance

        r = shift_report(table_from_coefficients(classical_disturbance(0.5, 0.4)))
        assert r.pre[1] == pytest.approx(0.5, abs=1e-12)
        assert r.post[(1, -1)] == pytest.approx(0.5 / 0.6, abs=1e-12)
        assert r.apss

    def test_degenerate_rejected(self):
        table = ProbabilityTable((0.125,) * 8)
        object.__setattr__(table, "p", (0.0,) * 8)  # corrupt past validation
        with pytest.raises(DegenerateModel):
            shift_report(table)

    def test_closed_form_agrees_with_summation(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            t = dirichlet_table(rng)
            r = shift_report(t)
            pre_cf, post_cf = closed_form_shifts(coefficients_from_table(t))
            for psi in SIGNS:
                if r.pre[psi] is not None and pre_cf[psi] is not None:
                    assert abs(r.pre[psi] - pre_cf[psi]) < 1e-12
                for phi in SIGNS:
                    a, b = r.post[(psi, phi)], post_cf[(psi, phi)]
                    if a is not None and b is not None:
                        assert abs(a - b) < 1e-12

    def test_shift_bounds(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            r = shift_report(dirichlet_table(rng))
            for v in list(r.pre.values()) + list(r.post.values()):
                if v is not None:
                    assert abs(v) <= 1.0 + 1e-15


class TestCIReport:
    def test_product_model_is_ci(self):
        t = product_table(0.3, 0.6, 0.2, 0.7, 0.9)
        r = ci_report(t)
        assert r.is_ci
        assert all(v < 1e-14 for v in r.factor_residual.values())

    def test_strong_model_is_correlated(self):
        from ppsm import quantum_strong

        theta = math.pi / 4
        r = ci_report(table_from_coefficients(quantum_strong(theta)))
        assert not r.is_ci
        expected = math.cos(theta) * math.sin(theta) ** 2
        assert r.coefficient_residuals[0] == pytest.approx(expected, abs=1e-12)

    def test_maximal_model_residuals(self):
        r = ci_report(table_from_coefficients(CMAX))
        assert not r.is_ci
        assert r.coefficient_residuals == (0.0, 1.0)

    @given(st.integers(min_value=0, max_value=10**9))
    @settings(max_examples=200, deadline=None)
    def test_ci_forbids_anomalous_shift(self, seed):
        rng = np.random.default_rng(seed)
        t = product_table(*rng.uniform(size=5))
        r = shift_report(t)
        assert not r.apss
        for psi in SIGNS:
            for phi in SIGNS:
                if r.post[(psi, phi)] is not None:
                    assert abs(r.post[(psi, phi)] - r.pre[psi]) < 1e-10

    @given(st.integers(min_value=0, max_value=10**9))
    @settings(max_examples=200, deadline=None)
    def test_apss_implies_correlation(self, seed):
        rng = np.random.default_rng(seed)
        t = ProbabilityTable(tuple(rng.dirichlet(np.ones(8))))
        if shift_report(t).apss:
            assert not ci_report(t).is_ci

    def test_zero_c1_coefficient_equivalence(self):
        # with no psi bias the coefficient residuals characterize CI exactly
        rng = np.random.default_rng(19)
        for _ in range(100):
            w = 0.5
            t = product_table(w, *rng.uniform(size=4))
            r = ci_report(t)
            assert r.is_ci
            assert all(v < 1e-10 for v in r.coefficient_residuals)


class TestValidation:
    def test_negative_entry_rejected(self):
        with pytest.raises(PositivityViolation):
            ProbabilityTable((-0.1, 0.2, 0.1, 0.1, 0.2, 0.2, 0.2, 0.1))

    def test_bad_normalization_rejected(self):
        with pytest.raises(ValueError):
            ProbabilityTable((0.2,) * 8)

    def test_coefficient_arity(self):
        with pytest.raises(ValueError):
            CoefficientVector((0.0,) * 6)
