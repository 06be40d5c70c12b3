"""Greedy elimination tests.

Oracle: data generated exactly from a sparse polynomial is exactly
representable by any superset of its support, so every removal of a
superfluous monomial keeps the refit residual at rounding level while
removing a supported monomial lifts it by orders of magnitude.  The
selector must therefore stop at exactly the generating support.
"""

import numpy as np
import pytest

from rappfit import (
    InsufficientDataError,
    Monomial,
    OperatingPoint,
    PolynomialSurface,
    canonical_vsat_basis,
    choose_initial_degree,
    eliminate,
    export_trace,
    full_basis,
)

VSUPS = [round(2.4 + 0.2 * k, 1) for k in range(14)]
FREQS = [0.5, 1.0, 1.5, 2.0, 2.5]


def _samples(surface, noise=0.0, seed=0):
    rng = np.random.default_rng(seed)
    return [
        (OperatingPoint(v, f), surface.evaluate(v, f) + noise * rng.standard_normal())
        for v in VSUPS
        for f in FREQS
    ]


def test_sparse_support_recovered_exactly():
    truth = PolynomialSurface(
        [
            (Monomial(1, 0), 0.22),
            (Monomial(1, 1), 0.05),
            (Monomial(0, 2), 0.12),
            (Monomial(1, 2), -0.02),
        ]
    )
    trace = eliminate(_samples(truth), full_basis(3))
    assert set(trace.selected_basis) == set(canonical_vsat_basis())
    assert trace.stop_reason == "plateau-exceeded"
    assert len(trace.steps) == 6
    for step in trace.steps:
        assert step.rmse_after <= 1e-9


def test_trace_path_and_export():
    truth = PolynomialSurface([(Monomial(1, 0), 1.0), (Monomial(0, 1), -0.5)])
    trace = eliminate(_samples(truth), full_basis(2))
    path = trace.rmse_path()
    assert path[0] == (len(full_basis(2)), trace.initial_rmse)
    counts = [c for c, _ in path]
    assert counts == list(range(6, 6 - len(path), -1))
    rows = export_trace(trace)
    assert rows[0][2] == ""
    assert len(rows) == len(trace.steps) + 1
    removed = {row[2] for row in rows[1:]}
    assert all(label for label in removed)


def test_noisy_plateau_keeps_supported_terms():
    truth = PolynomialSurface([(Monomial(1, 0), 0.3), (Monomial(0, 1), 0.2)])
    trace = eliminate(_samples(truth, noise=1e-3, seed=7), full_basis(2))
    kept = set(trace.selected_basis)
    assert Monomial(1, 0) in kept
    assert Monomial(0, 1) in kept


def test_min_terms_floor():
    truth = PolynomialSurface([(Monomial(0, 0), 1.0)])
    basis = full_basis(1)
    trace = eliminate(_samples(truth), basis, min_terms=len(basis))
    assert trace.steps == ()
    assert trace.stop_reason == "min-terms-reached"
    assert trace.selected_basis == tuple(basis)
    # With a floor of 1 the constant-only truth reduces all the way down.
    trace = eliminate(_samples(truth), basis, min_terms=1)
    assert trace.selected_basis == (Monomial(0, 0),)
    assert trace.stop_reason == "min-terms-reached"


def test_eliminate_validation():
    samples = _samples(PolynomialSurface([(Monomial(0, 0), 1.0)]))
    with pytest.raises(ValueError):
        eliminate(samples, full_basis(1), plateau_factor=1.0)
    with pytest.raises(ValueError):
        eliminate(samples, full_basis(1), min_terms=0)
    with pytest.raises(ValueError):
        eliminate(samples, [Monomial(0, 0), Monomial(0, 0)])
    with pytest.raises(ValueError):
        eliminate(samples, [Monomial(0, 0)], min_terms=2)


def test_tie_break_prefers_higher_degree():
    # Constant data: removing any term is free, so ties decide everything.
    # The first removal must take the highest-degree, highest-freq-power
    # candidate.
    truth = PolynomialSurface([(Monomial(0, 0), 2.0)])
    trace = eliminate(_samples(truth), full_basis(2), min_terms=5)
    assert trace.steps[0].removed == Monomial(0, 2)


def test_choose_initial_degree_finds_quadratic():
    truth = PolynomialSurface([(Monomial(2, 0), 0.4), (Monomial(1, 1), -0.1)])
    samples = _samples(truth)
    assert choose_initial_degree(samples, max_degree_cap=5) == 2


def test_choose_initial_degree_honors_cap():
    truth = PolynomialSurface([(Monomial(2, 0), 0.4)])
    samples = _samples(truth)
    assert choose_initial_degree(samples, max_degree_cap=1) == 1


def test_choose_initial_degree_limited_by_samples():
    # Five samples support at most a degree-1 full basis (3 terms).
    truth = PolynomialSurface([(Monomial(1, 0), 1.0)])
    samples = [
        (OperatingPoint(v, f), truth.evaluate(v, f))
        for v, f in [(2.4, 0.5), (2.6, 1.0), (2.8, 1.5), (3.0, 2.0), (3.2, 2.5)]
    ]
    assert choose_initial_degree(samples, max_degree_cap=6) <= 1


def test_choose_initial_degree_constant_data():
    truth = PolynomialSurface([(Monomial(0, 0), 3.0)])
    assert choose_initial_degree(_samples(truth), max_degree_cap=6) == 0


def test_choose_initial_degree_errors():
    with pytest.raises(InsufficientDataError):
        choose_initial_degree([], max_degree_cap=3)
    with pytest.raises(ValueError):
        choose_initial_degree(
            [(OperatingPoint(2.4, 0.5), 1.0)], max_degree_cap=-1
        )
