"""Least-squares fitting machinery.

Three fit families:

* :func:`fit_rapp_point`: nonlinear amplitude-domain fit of the scalar
  Rapp parameters at one operating point (damped Gauss-Newton with an
  analytic Jacobian, parameters kept positive by optimizing their logs);
* :func:`fit_surface_linear`: linear least squares of a sparse bivariate
  polynomial over operating points (column-scaled orthogonal
  factorization, never normal equations);
* :func:`fit_log_product`: separable fit of (log(vsup) + a) * h(f) via an
  outer golden-section search over the offset with an inner linear fit.

:func:`fit_extended_model` chains them: scalar fits at every grid point,
then one surface fit per Rapp parameter.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    DegenerateDataError,
    DegenerateGridError,
    FitStageError,
    InsufficientDataError,
    NonConvergenceError,
    RankDeficientError,
    RappfitError,
)
from .rapp import OperatingPoint, RappParams
from .surfaces import (
    LogProductSurface,
    Monomial,
    PolynomialSurface,
    canonical_p_basis,
    canonical_vsat_basis,
    monomial_sort_key,
)


class AmAmPoint(NamedTuple):
    """One sample of the AM/AM characteristic, both amplitudes in volts."""

    input_amp: float
    output_amp: float


@dataclass(frozen=True)
class FitOptions:
    """Knobs of the iterative scalar fit.

    ``gtol`` is relative to the initial gradient norm.  With ``strict``
    the solver raises :class:`NonConvergenceError` when the iteration
    budget runs out; otherwise the report carries ``converged=False``.
    """

    max_iter: int = 200
    gtol: float = 1e-10
    xtol: float = 1e-14
    ftol: float = 1e-15
    strict: bool = True


@dataclass
class FitReport:
    """Result container shared by all fit routines."""

    result: object
    rmse: float
    iterations: int
    converged: bool
    residual_norm_history: list


def _as_amam_arrays(points):
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array of (input_amp, output_amp)")
    a, y = arr[:, 0], arr[:, 1]
    if not np.all(np.isfinite(arr)):
        raise ValueError("amplitudes must be finite")
    if np.any(a < 0.0) or np.any(y < 0.0):
        raise ValueError("amplitudes must be nonnegative")
    return a, y


def scalar_residual_jacobian(log_params, input_amps, output_amps):
    """Residuals and analytic Jacobian of the scalar Rapp fit.

    ``log_params`` is (log gain, log smoothness, log vsat); the residual
    is model amplitude minus measured amplitude, and the Jacobian columns
    are the partials with respect to the three log parameters.
    """
    a = np.asarray(input_amps, dtype=float)
    y = np.asarray(output_amps, dtype=float)
    gain, p, vsat = np.exp(np.asarray(log_params, dtype=float))

    m = np.zeros_like(a)
    jac = np.zeros((a.size, 3))
    pos = a > 0.0
    if np.any(pos):
        two_p = 2.0 * p
        big_l = two_p * (np.log(a[pos]) - np.log(vsat))
        log_s = np.logaddexp(0.0, big_l)
        m_pos = gain * a[pos] * np.exp(-log_s / two_p)
        sig = np.exp(big_l - log_s)  # ratio t/(1+t), stable for any t
        m[pos] = m_pos
        jac[pos, 0] = m_pos
        jac[pos, 1] = m_pos * (log_s - sig * big_l) / two_p
        jac[pos, 2] = m_pos * sig
    return m - y, jac


def _initial_guess(a, y):
    # Gain from a through-origin regression over the lowest-decile amplitudes.
    threshold = np.quantile(a, 0.1)
    low = (a <= threshold) & (a > 0.0)
    if np.count_nonzero(low) < 2 or np.dot(a[low], a[low]) <= 0.0:
        low = a > 0.0
    g0 = np.dot(a[low], y[low]) / np.dot(a[low], a[low])
    if not np.isfinite(g0) or g0 <= 0.0:
        g0 = max(float(np.max(y)) / float(np.max(a)), 1e-6)
    v0 = float(np.max(y)) / g0
    v0 = max(v0, 1e-6)
    return np.array([g0, 2.0, v0])


def fit_rapp_point(points, options: FitOptions | None = None) -> FitReport:
    """Fit (gain, smoothness, vsat) to AM/AM samples by damped least squares.

    ``points`` is any (n, 2) array-like of (input_amp, output_amp) pairs,
    e.g. a list of :class:`AmAmPoint`.  Requires at least 8 points with 3
    distinct input amplitudes.  The report carries the accepted-step
    residual-norm history (nonincreasing by construction).
    """
    opts = options or FitOptions()
    a, y = _as_amam_arrays(points)
    if a.size < 8:
        raise InsufficientDataError(f"need >= 8 AM/AM points, got {a.size}")
    if np.unique(a).size < 3:
        raise DegenerateDataError("need >= 3 distinct input amplitudes")
    if np.max(a) <= 0.0:
        raise DegenerateDataError("max input amplitude must be > 0")
    if np.max(y) <= 0.0:
        raise DegenerateDataError("output amplitudes are all zero")

    theta = np.log(_initial_guess(a, y))
    resid, jac = scalar_residual_jacobian(theta, a, y)
    cost = float(resid @ resid)
    grad = jac.T @ resid
    grad0_norm = float(np.linalg.norm(grad, np.inf))
    history = [float(np.sqrt(cost))]

    lam = 1e-3
    iterations = 0
    converged = grad0_norm == 0.0
    while iterations < opts.max_iter and not converged:
        jtj = jac.T @ jac
        diag = np.diag(jtj).copy()
        diag[diag <= 0.0] = 1.0
        # Inner damping loop: retry with stronger damping until the step
        # reduces the cost or damping saturates.
        stalled = False
        while True:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                theta_new = theta + step
                resid_new, jac_new = scalar_residual_jacobian(theta_new, a, y)
                cost_new = float(resid_new @ resid_new)
                if cost_new < cost:
                    break
            lam *= 10.0
            if lam > 1e14:
                stalled = True
                break
        if stalled:
            # No descent step exists at any damping: numerically stationary.
            converged = True
            break
        lam = max(lam / 10.0, 1e-14)
        iterations += 1
        cost_drop = cost - cost_new
        theta, resid, jac, cost = theta_new, resid_new, jac_new, cost_new
        grad = jac.T @ resid
        history.append(float(np.sqrt(cost)))
        if float(np.linalg.norm(grad, np.inf)) <= opts.gtol * grad0_norm:
            converged = True
        elif cost_drop <= opts.ftol * cost:
            converged = True
        elif float(np.linalg.norm(step)) <= opts.xtol * (1.0 + float(np.linalg.norm(theta))):
            converged = True

    if not converged and opts.strict:
        raise NonConvergenceError(
            f"scalar fit did not converge within {opts.max_iter} iterations"
        )
    gain, p, vsat = np.exp(theta)
    return FitReport(
        result=RappParams(gain=float(gain), smoothness=float(p), vsat=float(vsat)),
        rmse=float(np.sqrt(cost / a.size)),
        iterations=iterations,
        converged=converged,
        residual_norm_history=history,
    )


def _split_samples(samples):
    ops = [op for op, _ in samples]
    values = np.array([float(v) for _, v in samples])
    vsup = np.array([op.vsup for op in ops])
    freq = np.array([op.freq for op in ops])
    return ops, vsup, freq, values


def design_matrix(vsup, freq, basis) -> np.ndarray:
    """Design matrix with one column per monomial, rows per sample."""
    vsup = np.asarray(vsup, dtype=float)
    freq = np.asarray(freq, dtype=float)
    cols = [vsup**m.vsup_power * freq**m.freq_power for m in basis]
    return np.column_stack(cols)


def _scaled_lstsq(a_mat, values, cond_limit):
    # Normalize each column to unit RMS before the orthogonal solve; the
    # condition check applies to the scaled matrix.
    scale = np.sqrt(np.mean(a_mat**2, axis=0))
    scale[scale == 0.0] = 1.0
    scaled = a_mat / scale
    coef, _, rank, sv = np.linalg.lstsq(scaled, values, rcond=None)
    if rank < a_mat.shape[1] or sv[-1] <= 0.0 or sv[0] / sv[-1] > cond_limit:
        raise RankDeficientError(
            f"design matrix condition exceeds {cond_limit:g} after column scaling"
        )
    return coef / scale


def fit_surface_linear(samples, basis, cond_limit: float = 1e12) -> FitReport:
    """Least-squares polynomial surface fit over (vsup, freq) samples.

    ``samples`` is a sequence of (OperatingPoint, value).  Raises
    :class:`InsufficientDataError` with fewer samples than basis terms and
    :class:`RankDeficientError` when the scaled design matrix is closer to
    singular than ``cond_limit``.
    """
    basis = list(basis)
    if not basis:
        raise ValueError("basis must be nonempty")
    if len(set(basis)) != len(basis):
        raise ValueError("basis monomials must be distinct")
    _, vsup, freq, values = _split_samples(samples)
    if values.size < len(basis):
        raise InsufficientDataError(
            f"need >= {len(basis)} samples for {len(basis)} terms, got {values.size}"
        )
    a_mat = design_matrix(vsup, freq, basis)
    coef = _scaled_lstsq(a_mat, values, cond_limit)
    resid = a_mat @ coef - values
    rmse = float(np.sqrt(np.mean(resid**2)))
    return FitReport(
        result=PolynomialSurface(zip(basis, coef)),
        rmse=rmse,
        iterations=1,
        converged=True,
        residual_norm_history=[float(np.linalg.norm(resid))],
    )


def _freq_powers(freq_degree, include_f2):
    powers = list(range(freq_degree, -1, -1))
    if not include_f2 and freq_degree >= 2:
        powers.remove(2)
    return powers


def _log_product_inner(offset, log_vsup, freq, values, powers):
    u = log_vsup + offset
    a_mat = np.column_stack([u * freq**k for k in powers])
    coef, _, _, _ = np.linalg.lstsq(a_mat, values, rcond=None)
    resid = a_mat @ coef - values
    return coef, float(np.sqrt(np.mean(resid**2)))


def fit_log_product(
    samples,
    freq_degree: int = 3,
    include_f2: bool = True,
    a_bracket=(-10.0, 10.0),
    a_tol: float = 1e-8,
) -> FitReport:
    """Fit the separable surface (log(vsup) + a) * h(f).

    h is a polynomial in f of degree ``freq_degree`` (<= 3); with
    ``include_f2`` false the f^2 term is structurally absent.  The offset
    is found by a grid scan over ``a_bracket`` followed by golden-section
    refinement of the profiled residual; h is refit linearly at each trial
    offset.  When the best fit is identically zero the underdetermined
    offset is fixed to 0.
    """
    if not 0 <= freq_degree <= 3:
        raise ValueError("freq_degree must be in 0..3")
    ops, vsup, freq, values = _split_samples(samples)
    powers = _freq_powers(freq_degree, include_f2)
    if values.size < freq_degree + 3:
        raise InsufficientDataError(
            f"need >= {freq_degree + 3} samples, got {values.size}"
        )
    if np.unique(vsup).size < 2:
        raise DegenerateGridError("need >= 2 distinct vsup values")
    if np.unique(freq).size < 2:
        raise DegenerateGridError("need >= 2 distinct freq values")

    log_vsup = np.log(vsup)

    def profile(offset):
        return _log_product_inner(offset, log_vsup, freq, values, powers)[1]

    # Bracket the minimum of the profiled objective on a dense scan, then
    # refine by golden section.
    grid = np.linspace(a_bracket[0], a_bracket[1], 401)
    scan = np.array([profile(g) for g in grid])
    i_min = int(np.argmin(scan))
    lo = grid[max(i_min - 1, 0)]
    hi = grid[min(i_min + 1, grid.size - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    golden_iters = 0
    while hi - lo > a_tol:
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        if profile(c) <= profile(d):
            hi = d
        else:
            lo = c
        golden_iters += 1
    offset = 0.5 * (lo + hi)
    coef, rmse = _log_product_inner(offset, log_vsup, freq, values, powers)
    if np.all(coef == 0.0):
        offset = 0.0
    freq_coeffs = np.zeros(freq_degree + 1)
    for k, c in zip(powers, coef):
        freq_coeffs[freq_degree - k] = c
    surface = LogProductSurface(offset, freq_coeffs)
    return FitReport(
        result=surface,
        rmse=rmse,
        iterations=golden_iters,
        converged=True,
        residual_norm_history=[rmse * np.sqrt(values.size)],
    )


def fit_log_vsup(samples) -> FitReport:
    """Fit (log(vsup) + a) * h0 to samples at a single frequency.

    Solved exactly as a linear fit in (h0, a*h0); used for the
    frequency-independent model variant.
    """
    _, vsup, _, values = _split_samples(samples)
    if values.size < 2:
        raise InsufficientDataError("need >= 2 samples")
    if np.unique(vsup).size < 2:
        raise DegenerateGridError("need >= 2 distinct vsup values")
    a_mat = np.column_stack([np.log(vsup), np.ones_like(vsup)])
    coef, _, _, _ = np.linalg.lstsq(a_mat, values, rcond=None)
    slope, intercept = coef
    if slope == 0.0:
        if intercept != 0.0:
            raise DegenerateDataError("samples carry no log(vsup) dependence")
        surface = LogProductSurface(0.0, (0.0,))
    else:
        surface = LogProductSurface(intercept / slope, (slope,))
    resid = a_mat @ coef - values
    rmse = float(np.sqrt(np.mean(resid**2)))
    return FitReport(
        result=surface,
        rmse=rmse,
        iterations=1,
        converged=True,
        residual_norm_history=[float(np.linalg.norm(resid))],
    )


@dataclass(frozen=True)
class PolyForm:
    """Surface form: polynomial on an explicit monomial basis."""

    basis: tuple

    def __init__(self, basis):
        object.__setattr__(
            self, "basis", tuple(sorted(basis, key=monomial_sort_key))
        )


@dataclass(frozen=True)
class LogProductForm:
    """Surface form: (log(vsup) + a) * h(f)."""

    freq_degree: int = 3
    include_f2: bool = True


@dataclass(frozen=True)
class FormSpec:
    """Per-parameter surface forms for the two-stage extended fit."""

    gain: object
    smoothness: object
    vsat: object


def canonical_form_spec() -> FormSpec:
    """The published final forms: 4-term polynomials for vsat and
    smoothness, full-cubic log-product for gain."""
    return FormSpec(
        gain=LogProductForm(freq_degree=3, include_f2=True),
        smoothness=PolyForm(canonical_p_basis()),
        vsat=PolyForm(canonical_vsat_basis()),
    )


@dataclass
class ExtendedModelFit:
    """Everything the two-stage fit produced.

    ``scalar_params`` is the per-operating-point parameter map (the
    heatmap data); ``surface_reports`` holds one FitReport per parameter
    surface.
    """

    model: object
    scalar_params: dict
    scalar_reports: dict
    surface_reports: dict

    def param_map(self, name: str) -> dict:
        return {op: getattr(p, name) for op, p in self.scalar_params.items()}

    def surface_rmse(self) -> dict:
        return {name: report.rmse for name, report in self.surface_reports.items()}


def _fit_one_surface(samples, form):
    if isinstance(form, PolyForm):
        return fit_surface_linear(samples, form.basis)
    if isinstance(form, LogProductForm):
        return fit_log_product(samples, form.freq_degree, form.include_f2)
    raise TypeError(f"unknown surface form {form!r}")


def fit_extended_model(
    campaign,
    form_spec: FormSpec | None = None,
    options: FitOptions | None = None,
    clamp_floor: float = 1e-3,
) -> ExtendedModelFit:
    """Two-stage fit of an extended Rapp model to a measurement campaign.

    Stage 1 fits scalar Rapp parameters at every grid point (records are
    aligned first; alignment is idempotent).  Stage 2 fits one surface per
    parameter using ``form_spec`` (canonical forms by default).  Stage-1
    failures are re-raised with the offending operating point named.
    """
    from .signals import align  # local import to avoid a module cycle
    from .surfaces import ExtendedRappModel

    spec = form_spec or canonical_form_spec()
    if len(campaign.vsup_grid) < 3 or len(campaign.freq_grid) < 3:
        raise InsufficientDataError("campaign grid must be at least 3x3")

    scalar_params: dict[OperatingPoint, RappParams] = {}
    scalar_reports: dict[OperatingPoint, FitReport] = {}
    for op in campaign.sorted_ops():
        try:
            record = align(campaign.records[op])
            points = np.column_stack([np.abs(record.input), np.abs(record.output)])
            report = fit_rapp_point(points, options)
        except (RappfitError, ValueError) as exc:
            raise FitStageError(
                f"scalar fit failed at vsup={op.vsup} V, freq={op.freq} GHz: {exc}"
            ) from exc
        scalar_params[op] = report.result
        scalar_reports[op] = report

    ops = campaign.sorted_ops()
    surfaces = {}
    surface_reports = {}
    for name in ("gain", "smoothness", "vsat"):
        samples = [(op, getattr(scalar_params[op], name)) for op in ops]
        report = _fit_one_surface(samples, getattr(spec, name))
        surfaces[name] = report.result
        surface_reports[name] = report

    model = ExtendedRappModel(
        gain_surface=surfaces["gain"],
        smoothness_surface=surfaces["smoothness"],
        vsat_surface=surfaces["vsat"],
        clamp_floor=clamp_floor,
    )
    return ExtendedModelFit(
        model=model,
        scalar_params=scalar_params,
        scalar_reports=scalar_reports,
        surface_reports=surface_reports,
    )
