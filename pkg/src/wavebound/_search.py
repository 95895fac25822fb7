"""Golden-section maximisation on a bracket.

Used to refine the beta maximiser of the bound objectives after a coarse
grid scan.  Plain interval shrinking: robust for the smooth, unimodal (on
the bracket) objectives it is applied to.
"""

from __future__ import annotations

from typing import Callable, Tuple

_INV_PHI = 0.6180339887498949  # (sqrt(5) - 1) / 2
_INV_PHI2 = 0.3819660112501051  # 1 - _INV_PHI


def golden_max(
    f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-8
) -> Tuple[float, float]:
    """Return (x, f(x)) approximately maximising f on [lo, hi].

    The bracket is shrunk until its width falls below ``xtol``.  Endpoints
    are also sampled so a maximiser sitting on the bracket edge is not lost.
    """
    a, b = float(lo), float(hi)
    if not b > a:
        raise ValueError(f"empty bracket [{a}, {b}]")
    h = b - a
    c = a + _INV_PHI2 * h
    d = a + _INV_PHI * h
    fc = f(c)
    fd = f(d)
    while h > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INV_PHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = f(d)
    x = c if fc >= fd else d
    fx = fc if fc >= fd else fd
    # Guard against a maximum at the original bracket edges.
    fa, fb = f(lo), f(hi)
    if fa > fx:
        x, fx = float(lo), fa
    if fb > fx:
        x, fx = float(hi), fb
    return x, fx
