"""Parameter surfaces over (supply voltage, carrier frequency).

Two surface families are supported:

* sparse bivariate polynomials, sum of coef * vsup^i * f^j terms;
* separable log-products (log(vsup) + a) * h(f) with h a polynomial in f
  of degree <= 3 (natural log; supply in volts, frequency in GHz).

An :class:`ExtendedRappModel` bundles one surface per Rapp parameter so a
scalar parameter triple can be produced for any operating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rapp import OperatingPoint, RappParams, apply_to_frame


@dataclass(frozen=True, order=False)
class Monomial:
    """One vsup^i * f^j term of a polynomial surface."""

    vsup_power: int
    freq_power: int

    def __post_init__(self):
        if self.vsup_power < 0 or self.freq_power < 0:
            raise ValueError("monomial powers must be nonnegative")

    @property
    def degree(self) -> int:
        return self.vsup_power + self.freq_power

    def label(self) -> str:
        """Compact text form, e.g. ``1``, ``vsup``, ``f^2``, ``vsup*f^2``."""
        parts = []
        if self.vsup_power:
            parts.append("vsup" if self.vsup_power == 1 else f"vsup^{self.vsup_power}")
        if self.freq_power:
            parts.append("f" if self.freq_power == 1 else f"f^{self.freq_power}")
        return "*".join(parts) if parts else "1"


def parse_monomial(label: str) -> Monomial:
    """Inverse of :meth:`Monomial.label`."""
    text = label.strip()
    if text == "1":
        return Monomial(0, 0)
    powers = {}
    for part in text.split("*"):
        name, _, power_text = part.partition("^")
        try:
            power = int(power_text) if power_text else 1
        except ValueError as exc:
            raise ValueError(f"bad power in monomial factor {part!r}") from exc
        if name not in ("vsup", "f"):
            raise ValueError(f"unknown monomial factor {part!r} in {label!r}")
        if name in powers:
            raise ValueError(f"repeated factor {name!r} in {label!r}")
        if power < 1:
            raise ValueError(f"monomial factor {part!r} must have power >= 1")
        powers[name] = power
    return Monomial(powers.get("vsup", 0), powers.get("f", 0))


def monomial_sort_key(m: Monomial):
    """Graded ordering: total degree first, higher vsup power first within a degree."""
    return (m.degree, -m.vsup_power)


def full_basis(max_degree: int) -> tuple:
    """All monomials with total degree <= max_degree, canonically ordered."""
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    terms = [
        Monomial(i, d - i) for d in range(max_degree + 1) for i in range(d, -1, -1)
    ]
    return tuple(sorted(terms, key=monomial_sort_key))


def canonical_vsat_basis() -> tuple:
    """Four-term saturation-voltage basis: vsup, vsup*f, f^2, vsup*f^2."""
    terms = [Monomial(1, 0), Monomial(1, 1), Monomial(0, 2), Monomial(1, 2)]
    return tuple(sorted(terms, key=monomial_sort_key))


def canonical_p_basis() -> tuple:
    """Four-term smoothness basis: vsup, f, vsup^2, f^2."""
    terms = [Monomial(1, 0), Monomial(0, 1), Monomial(2, 0), Monomial(0, 2)]
    return tuple(sorted(terms, key=monomial_sort_key))


@dataclass(frozen=True)
class PolynomialSurface:
    """Sparse bivariate polynomial; terms held in canonical graded order."""

    terms: tuple = ()

    def __init__(self, terms):
        pairs = [(m, float(c)) for m, c in terms]
        monos = [m for m, _ in pairs]
        if len(set(monos)) != len(monos):
            raise ValueError("polynomial terms must have pairwise distinct monomials")
        pairs.sort(key=lambda mc: monomial_sort_key(mc[0]))
        object.__setattr__(self, "terms", tuple(pairs))

    def basis(self) -> tuple:
        return tuple(m for m, _ in self.terms)

    def coefficients(self) -> np.ndarray:
        return np.array([c for _, c in self.terms], dtype=float)

    def evaluate(self, vsup, freq):
        vsup = np.asarray(vsup, dtype=float)
        freq = np.asarray(freq, dtype=float)
        out = np.zeros(np.broadcast(vsup, freq).shape)
        for m, c in self.terms:
            out = out + c * vsup**m.vsup_power * freq**m.freq_power
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class LogProductSurface:
    """Separable surface (log(vsup) + offset) * h(f).

    ``freq_coeffs`` are the coefficients of h, highest power first and
    constant term last (numpy polyval convention), degree <= 3.  The log
    is natural; vsup must be positive for evaluation.
    """

    offset: float
    freq_coeffs: tuple = field(default=(0.0,))

    def __init__(self, offset, freq_coeffs):
        coeffs = tuple(float(c) for c in freq_coeffs)
        if not 1 <= len(coeffs) <= 4:
            raise ValueError("freq_coeffs must hold a degree <= 3 polynomial")
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "freq_coeffs", coeffs)

    def evaluate(self, vsup, freq):
        vsup = np.asarray(vsup, dtype=float)
        freq = np.asarray(freq, dtype=float)
        if np.any(vsup <= 0.0):
            raise ValueError("vsup must be positive for a log-product surface")
        out = (np.log(vsup) + self.offset) * np.polyval(self.freq_coeffs, freq)
        return out if out.ndim else float(out)


# A parameter surface is either of the two forms above.
ParamSurface = PolynomialSurface | LogProductSurface


def surface_eval(surface: ParamSurface, op: OperatingPoint) -> float:
    """Evaluate a parameter surface at one operating point."""
    return float(surface.evaluate(op.vsup, op.freq))


@dataclass(frozen=True)
class ExtendedRappModel:
    """Rapp model whose parameters are surfaces over (vsup, freq).

    Surface values below ``clamp_floor`` are lifted to the floor so the
    produced :class:`RappParams` always satisfies its positivity
    invariants; :meth:`params_at` reports whether clamping fired.
    """

    gain_surface: ParamSurface
    smoothness_surface: ParamSurface
    vsat_surface: ParamSurface
    clamp_floor: float = 1e-3

    def __post_init__(self):
        if not (np.isfinite(self.clamp_floor) and self.clamp_floor > 0.0):
            raise ValueError("clamp_floor must be finite and > 0")

    def params_at(self, op: OperatingPoint) -> tuple[RappParams, bool]:
        raw = (
            surface_eval(self.gain_surface, op),
            surface_eval(self.smoothness_surface, op),
            surface_eval(self.vsat_surface, op),
        )
        clamped = any(v < self.clamp_floor for v in raw)
        g, p, v = (max(v, self.clamp_floor) for v in raw)
        return RappParams(gain=g, smoothness=p, vsat=v), clamped

    def distort(self, op: OperatingPoint, frame) -> np.ndarray:
        """Apply the model to a frame at the given operating point."""
        params, _ = self.params_at(op)
        return apply_to_frame(params, frame)


def extended_params(model: ExtendedRappModel, op: OperatingPoint) -> tuple[RappParams, bool]:
    return model.params_at(op)


def extended_eval(model: ExtendedRappModel, op: OperatingPoint, frame) -> np.ndarray:
    return model.distort(op, frame)
