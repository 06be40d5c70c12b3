"""Greedy structure selection for polynomial surfaces.

Starting from a full total-degree basis, :func:`eliminate` repeatedly
drops the monomial whose removal hurts the refit residual least, and
stops just before the residual would climb past a plateau factor times
the full-basis baseline.  :func:`choose_initial_degree` picks the
starting degree by probing when an extra degree stops paying.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, RankDeficientError
from .fitting import fit_surface_linear
from .surfaces import Monomial, full_basis, monomial_sort_key

# RMSE floor for plateau comparisons; below this the fit is exact to
# machine precision and ratios of rounding noise are meaningless.
RMSE_FLOOR = 1e-12


@dataclass(frozen=True)
class EliminationStep:
    """One committed removal: what left the basis and the refit quality."""

    removed: Monomial
    rmse_after: float
    candidates: tuple  # (monomial, rmse-if-removed) for every candidate tried


@dataclass(frozen=True)
class EliminationTrace:
    initial_basis: tuple
    initial_rmse: float
    steps: tuple
    selected_basis: tuple
    stop_reason: str  # "plateau-exceeded" or "min-terms-reached"

    def rmse_path(self):
        """(terms_count, rmse) pairs from the full basis down to the
        selected one."""
        path = [(len(self.initial_basis), self.initial_rmse)]
        count = len(self.initial_basis)
        for step in self.steps:
            count -= 1
            path.append((count, step.rmse_after))
        return path


def _removal_priority(item):
    # Sort key for picking the removal: lowest rmse first; among ties
    # prefer dropping the higher-degree monomial, then the higher freq
    # power.  Sub-floor rmse values are all rounding noise, so they
    # compare equal and the structural tie-break decides.
    monomial, rmse = item
    return (max(rmse, RMSE_FLOOR), -monomial.degree, -monomial.freq_power)


def eliminate(
    samples,
    initial_basis,
    plateau_factor: float = 1.1,
    min_terms: int = 1,
) -> EliminationTrace:
    """Backward-eliminate monomials until quality would degrade.

    Each round refits the surface with every single-term removal, commits
    the cheapest one, and stops (keeping the current basis) once the best
    candidate's rmse exceeds ``plateau_factor`` times the full-basis
    baseline rmse.  Ties prefer removing higher-degree terms.
    """
    if plateau_factor <= 1.0:
        raise ValueError("plateau_factor must be > 1")
    if min_terms < 1:
        raise ValueError("min_terms must be >= 1")
    initial = tuple(initial_basis)
    basis = sorted(set(initial), key=monomial_sort_key)
    if len(basis) != len(initial):
        raise ValueError("initial basis contains duplicate monomials")
    if len(basis) < min_terms:
        raise ValueError("initial basis smaller than min_terms")

    samples = tuple(samples)
    baseline = fit_surface_linear(samples, basis).rmse
    threshold = plateau_factor * max(baseline, RMSE_FLOOR)

    steps = []
    stop_reason = "min-terms-reached"
    while len(basis) > min_terms:
        candidates = []
        for monomial in basis:
            reduced = [m for m in basis if m != monomial]
            rmse = fit_surface_linear(samples, reduced).rmse
            candidates.append((monomial, rmse))
        best_monomial, best_rmse = min(candidates, key=_removal_priority)
        if best_rmse > threshold:
            stop_reason = "plateau-exceeded"
            break
        basis.remove(best_monomial)
        steps.append(
            EliminationStep(
                removed=best_monomial,
                rmse_after=best_rmse,
                candidates=tuple(candidates),
            )
        )
    return EliminationTrace(
        initial_basis=tuple(sorted(initial, key=monomial_sort_key)),
        initial_rmse=baseline,
        steps=tuple(steps),
        selected_basis=tuple(basis),
        stop_reason=stop_reason,
    )


def choose_initial_degree(
    samples,
    max_degree_cap: int = 6,
    improvement: float = 0.01,
) -> int:
    """Smallest total degree past which an extra degree buys < 1 percent.

    Returns the first N whose degree-(N+1) refit fails to improve rmse by
    at least ``improvement`` relative, capped by ``max_degree_cap`` and by
    the sample count (a degree is only probed when its full basis stays
    determined).
    """
    if max_degree_cap < 0:
        raise ValueError("max_degree_cap must be >= 0")
    samples = tuple(samples)
    n = len(samples)
    if n < 1:
        raise InsufficientDataError("need at least one sample")
    feasible_cap = max_degree_cap
    while feasible_cap > 0 and (feasible_cap + 1) * (feasible_cap + 2) // 2 > n:
        feasible_cap -= 1

    def rmse_at(degree):
        return fit_surface_linear(samples, full_basis(degree)).rmse

    current = rmse_at(0)
    for degree in range(feasible_cap):
        if current <= RMSE_FLOOR:
            return degree
        try:
            nxt = rmse_at(degree + 1)
        except (RankDeficientError, InsufficientDataError):
            return degree
        if nxt >= (1.0 - improvement) * current:
            return degree
        current = nxt
    return feasible_cap


def export_trace(trace: EliminationTrace):
    """Rows (terms_count, rmse, removed_label) for the trace artifact.

    The first row is the full basis with an empty removal label; each
    following row logs one committed removal.
    """
    rows = [(len(trace.initial_basis), trace.initial_rmse, "")]
    count = len(trace.initial_basis)
    for step in trace.steps:
        count -= 1
        rows.append((count, step.rmse_after, step.removed.label()))
    return rows
