"""Exact values of the Ackermann approximations ``A_i`` and the re-scaled family ``F_i``.

``A_1(n) = 2n`` and ``A_{i+1}(n) = A_i^n(1)``; ``F_1(n) = 2n`` and
``F_{i+1}(n) = F_i^{n/4}(4)`` on positive multiples of 4. Level-1 iteration is
done in closed form (``x << t``), every higher level by literal iteration.
"""

from __future__ import annotations

from functools import lru_cache

DEFAULT_MAX_BITS = 1 << 20


class GrowthLimitExceeded(ArithmeticError):
    """A value would exceed the configured magnitude cap."""


def _check(x: int, max_bits: int) -> int:
    if x.bit_length() > max_bits:
        raise GrowthLimitExceeded(f"value exceeds 2^{max_bits}")
    return x


def _double_times(x: int, times: int, max_bits: int) -> int:
    if x.bit_length() + times > max_bits:
        raise GrowthLimitExceeded(f"value exceeds 2^{max_bits}")
    return x << times


@lru_cache(maxsize=4096)
def _ack(i: int, n: int, max_bits: int) -> int:
    if i == 1:
        return _check(2 * n, max_bits)
    # A_i(n) = A_{i-1}^n(1)
    if i == 2:
        return _double_times(1, n, max_bits)
    x = 1
    for _ in range(n):
        x = _ack(i - 1, x, max_bits)
    return x


def ack(i: int, n: int, max_bits: int = DEFAULT_MAX_BITS) -> int:
    if not (isinstance(i, int) and isinstance(n, int)) or i < 1 or n < 1:
        raise ValueError(f"ack needs i, n >= 1, got ({i}, {n})")
    return _ack(i, n, max_bits)


@lru_cache(maxsize=4096)
def _f(i: int, n: int, max_bits: int) -> int:
    if i == 1:
        return _check(2 * n, max_bits)
    # F_i(n) = F_{i-1}^{n/4}(4)
    if i == 2:
        return _double_times(4, n // 4, max_bits)
    x = 4
    for _ in range(n // 4):
        x = _f(i - 1, x, max_bits)
    return x


def f_value(i: int, n: int, max_bits: int = DEFAULT_MAX_BITS) -> int:
    if not (isinstance(i, int) and isinstance(n, int)) or i < 1:
        raise ValueError(f"f_value needs a level i >= 1, got {i}")
    if n < 4 or n % 4:
        raise ValueError(f"f_value needs n to be a positive multiple of 4, got {n}")
    return _f(i, n, max_bits)
