"""Synthetic stake distributions for fixtures and tests."""

from __future__ import annotations

from decimal import Decimal, localcontext


def zipf_weights(n: int, s: str | Decimal, scale: int) -> list[int]:
    """Integer weights ``floor(scale / rank**s)`` for ranks 1..n.

    Decimal power keeps the result identical across platforms.
    """
    with localcontext() as ctx:
        ctx.prec = 40
        exponent = Decimal(s)
        return [int(Decimal(scale) / (Decimal(rank) ** exponent)) for rank in range(1, n + 1)]


def distribute(total: int, weights: list[int], floor: int = 0, unit: int = 1) -> list[int]:
    """Split ``total`` into len(weights) integer parts in multiples of ``unit``.

    Each part gets at least ``floor`` (rounded up to a unit), the rest goes out
    in proportion to ``weights`` with largest-remainder rounding.  The parts sum
    to ``total`` exactly; ``total`` must be a multiple of ``unit``.
    """
    if total % unit:
        raise ValueError("total must be a multiple of unit")
    n = len(weights)
    floor_units = -(-floor // unit)
    pool = total // unit - floor_units * n
    if pool < 0:
        raise ValueError("total too small for the requested floor")
    wsum = sum(weights)
    shares = [pool * w // wsum for w in weights]
    remainders = sorted(range(n), key=lambda i: (-(pool * weights[i] % wsum), i))
    for i in remainders[: pool - sum(shares)]:
        shares[i] += 1
    return [(floor_units + s) * unit for s in shares]
