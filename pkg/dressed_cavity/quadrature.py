"""
Fourier-type integrals over [0, inf) with QUADPACK.

The finite part is split at the resonance neighbourhood of the integrand and
integrated with the Chebyshev-moment rule for sin/cos weights (QAWO). The
remainder up to infinity goes through QAWF, which integrates cycle by cycle
and extrapolates the sequence of partial sums with the epsilon algorithm.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.integrate import quad

from dressed_cavity.errors import QuadratureStall
from dressed_cavity.settings import get_settings

logger = logging.getLogger(__name__)

_FINITE_EPSREL = 1e-12
_TAIL_CYCLES = 100


@dataclass(frozen=True)
class QuadratureReport:
    value: float
    abs_error_estimate: float
    intervals_used: int
    accelerated: bool

    def scaled(self, factor: float) -> "QuadratureReport":
        return QuadratureReport(
            value=factor * self.value,
            abs_error_estimate=abs(factor) * self.abs_error_estimate,
            intervals_used=self.intervals_used,
            accelerated=self.accelerated,
        )


def _unpack(result: tuple) -> tuple[float, float, int, Optional[str]]:
    value, error = float(result[0]), float(result[1])
    info = result[2] if len(result) > 2 and isinstance(result[2], dict) else {}
    count = int(info.get("last", info.get("lst", 0)))
    message = result[3] if len(result) > 3 else None
    return value, error, count, message


def fourier_integral(
    integrand: Callable[[float], float],
    t: float,
    kind: Literal["sin", "cos"],
    breakpoints: Sequence[float] = (),
    epsabs: Optional[float] = None,
    limit: Optional[int] = None,
) -> QuadratureReport:
    """Integral of integrand(y) * kind(y t) over [0, inf)."""
    if kind == "sin" and t == 0:
        return QuadratureReport(
            value=0.0, abs_error_estimate=0.0, intervals_used=0, accelerated=False
        )

    settings = get_settings()
    epsabs = epsabs or settings.quad_epsabs
    limit = limit or settings.quad_limit
    edges = [0.0, *sorted({float(p) for p in breakpoints if p > 0})]
    weighted = {} if t == 0 else {"weight": kind, "wvar": t}

    values, errors = [], []
    intervals = 0
    messages = []
    for a, b in zip(edges[:-1], edges[1:]):
        value, error, count, message = _unpack(
            quad(
                integrand,
                a,
                b,
                epsabs=epsabs,
                epsrel=_FINITE_EPSREL,
                limit=limit,
                full_output=1,
                **weighted,
            )
        )
        values.append(value)
        errors.append(error)
        intervals += count
        if message:
            messages.append(message)

    tail_options = dict(weighted, limlst=_TAIL_CYCLES) if weighted else {}
    value, error, count, message = _unpack(
        quad(
            integrand,
            edges[-1],
            np.inf,
            epsabs=epsabs,
            epsrel=_FINITE_EPSREL,
            limit=limit,
            full_output=1,
            **tail_options,
        )
    )
    values.append(value)
    errors.append(error)
    intervals += count
    if message:
        messages.append(message)

    report = QuadratureReport(
        value=float(np.sum(values)),
        abs_error_estimate=float(np.sum(errors)),
        intervals_used=intervals,
        accelerated=t != 0,
    )
    for message in messages:
        logger.debug("quadpack: %s", str(message).strip().splitlines()[0])
    return report


def check_target(
    report: QuadratureReport, target_abs: float, target_rel: float, **context
) -> None:
    """Raise QuadratureStall if the error estimate misses max(target_abs, target_rel |value|)."""
    allowed = max(target_abs, target_rel * abs(report.value))
    if not np.isfinite(report.value) or report.abs_error_estimate > allowed:
        raise QuadratureStall(
            f"error estimate {report.abs_error_estimate:.3e} above target {allowed:.3e}",
            report=report,
            module="quadrature",
            **context,
        )
