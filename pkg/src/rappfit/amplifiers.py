"""Reference device grids and a synthetic ground-truth amplifier.

The grids match a commercial connectorized amplifier characterized over
supply voltage and carrier frequency.  :func:`synth_2534` builds a fully
known extended Rapp model over those grids, shaped like real devices:
smoothness stays within (0.5, 3.0], saturation voltage grows with both
supply and frequency and spans more than a 2:1 range, and gain rises
with supply voltage at every frequency.
"""

from __future__ import annotations

from .surfaces import (
    ExtendedRappModel,
    LogProductSurface,
    Monomial,
    PolynomialSurface,
)

ZX60_2534_VSUP_GRID = tuple(round(2.4 + 0.2 * k, 1) for k in range(14))
ZX60_2534_FREQ_GRID = (0.5, 1.0, 1.5, 2.0, 2.5)


def synth_2534(clamp_floor: float = 1e-3) -> ExtendedRappModel:
    """Synthetic ground truth on the ZX60-2534 grids.

    All three surfaces are exactly representable by the canonical fit
    forms, so a noise-free round trip recovers them to machine precision.
    """
    gain = LogProductSurface(0.8, (-0.06, 0.15, 0.25, 1.1))
    smoothness = PolynomialSurface(
        [
            (Monomial(1, 0), 0.28),
            (Monomial(0, 1), 0.22),
            (Monomial(2, 0), -0.02),
            (Monomial(0, 2), 0.05),
        ]
    )
    vsat = PolynomialSurface(
        [
            (Monomial(1, 0), 0.22),
            (Monomial(1, 1), 0.05),
            (Monomial(0, 2), 0.12),
            (Monomial(1, 2), -0.02),
        ]
    )
    return ExtendedRappModel(
        gain_surface=gain,
        smoothness_surface=smoothness,
        vsat_surface=vsat,
        clamp_floor=clamp_floor,
    )
