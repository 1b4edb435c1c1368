"""Capacity, the two simple converse bounds, and type counting."""

from __future__ import annotations

import math
import numbers
import warnings
from dataclasses import dataclass
from itertools import combinations

from .errors import CapacityError, ParameterDomainError

ENUMERATION_LIMIT = 10**6


def _check_positive(**kw):
    for name, v in kw.items():
        if not (isinstance(v, numbers.Real) and math.isfinite(v) and v > 0):
            raise ParameterDomainError(f"{name} must be finite and > 0, got {v}")


def index_genie_bound(c: float) -> float:
    """Rate ceiling when the decoder is told every sample's index: ``1 - e^-c``."""
    _check_positive(c=c)
    return -math.expm1(-c)


def type_count_bound(beta: float) -> float:
    """Raw ``1 - 1/beta``; negative for ``beta < 1``."""
    _check_positive(beta=beta)
    return 1.0 - 1.0 / beta


def capacity(beta: float, c: float) -> float:
    """``max(0, (1 - e^-c)(1 - 1/beta))``."""
    _check_positive(beta=beta, c=c)
    if beta <= 1:
        return 0.0
    return index_genie_bound(c) * type_count_bound(beta)


@dataclass(frozen=True)
class CapacityPoint:
    beta: float
    c: float
    capacity: float
    index_genie_bound: float
    type_count_bound: float


def capacity_point(beta: float, c: float) -> CapacityPoint:
    return CapacityPoint(beta, c, capacity(beta, c), index_genie_bound(c), type_count_bound(beta))


def type_count_exact(a: int, b: int) -> int:
    """Number of nonnegative integer vectors of length ``a`` summing to ``b``,
    i.e. ``C(a + b - 1, b)``, as an exact integer."""
    if a < 1 or b < 0:
        raise ParameterDomainError(f"need a >= 1, b >= 0 (a={a}, b={b})")
    n = a + b - 1
    r = min(b, a - 1)
    out = 1
    # each partial product is C(n - r + i, i), hence divisible exactly
    for i in range(1, r + 1):
        out = out * (n - r + i) // i
    return out


def type_count_upper_log(a: int, b: int) -> float:
    """Natural log of ``(e (a + b - 1) / b)^b``, a strict upper bound on
    ``ln C(a + b - 1, b)``."""
    if a < 1:
        raise ParameterDomainError(f"need a >= 1, got {a}")
    if b < 1:
        raise ParameterDomainError(f"log bound needs b >= 1, got {b}")
    return b * (1.0 + math.log((a + b - 1) / b))


def type_to_string(x) -> str:
    """Runs of ``x_i`` ones separated by single zeros."""
    return "0".join("1" * xi for xi in x)


def string_to_type(s: str) -> tuple[int, ...]:
    return tuple(len(run) for run in s.split("0"))


def enumerate_types(a: int, b: int, limit: int = ENUMERATION_LIMIT) -> list[tuple[int, ...]]:
    """All length-``a`` nonnegative vectors summing to ``b``, lexicographically.

    Walks placements of the ``a - 1`` separators among ``a + b - 1`` slots;
    separator positions in lexicographic order give the vectors in
    lexicographic order.
    """
    total = type_count_exact(a, b)
    if total > limit:
        raise CapacityError(f"{total} vectors exceed the enumeration limit {limit}")
    n = a + b - 1
    out = []
    for zeros in combinations(range(n), a - 1):
        prev = -1
        vec = []
        for z in zeros:
            vec.append(z - prev - 1)
            prev = z
        vec.append(n - prev - 1)
        out.append(tuple(vec))
    return out


class DegenerateBoundWarning(UserWarning):
    pass


def converse_alpha(M: float, beta: float, q: float) -> float:
    """Constant ``alpha`` with ``e + e M^(beta-1) / q <= alpha M^(beta-1)``.

    ``2e`` whenever it satisfies the inequality both at ``q`` and at
    ``q = 1``, otherwise the smallest constant that does.
    """
    scale = math.exp((1.0 - beta) * math.log(M))  # M^(1 - beta)
    needed = math.e * scale + math.e / min(q, 1.0)
    return max(2 * math.e, needed)


def rate_upper_bound_finite_M(M: float, beta: float, c: float, delta: float, P_E: float) -> float:
    """Finite-``M`` converse on the storage rate.

    ``P_E ((beta-1)/beta + g) + (1 - e^-c + delta)(1 - 1/beta + g) + 2/(M L)``
    with ``g = log(alpha) / (beta log M)`` and ``L = beta log2 M``.  Tends to
    ``(1 - e^-c + delta)(1 - 1/beta)`` as ``M`` grows.  For ``beta <= 1`` the
    raw expression is returned with a :class:`DegenerateBoundWarning`.
    """
    if not M >= 2:
        raise ParameterDomainError(f"M must be >= 2, got {M}")
    _check_positive(beta=beta, c=c, delta=delta)
    if not 0 <= P_E <= 1:
        raise ParameterDomainError(f"P_E must lie in [0, 1], got {P_E}")
    q = -math.expm1(-c) + delta
    alpha = converse_alpha(M, beta, q)
    if beta <= 1:
        warnings.warn(f"beta={beta} <= 1: finite-M bound is degenerate", DegenerateBoundWarning, stacklevel=2)
    lnM = math.log(M)
    g = math.log(alpha) / (beta * lnM)
    L = beta * lnM / math.log(2)
    return P_E * ((beta - 1) / beta + g) + q * (1 - 1 / beta + g) + 2 / (M * L)
