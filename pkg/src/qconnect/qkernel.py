"""Scalar building blocks: q-Pochhammer products, theta, principal powers,
the evaluation context, parameter containers and integer-index helpers.

Every quantity is a plain complex number computed from a truncated infinite
product whose length is fixed by the evaluation context, so results are
deterministic for a given context.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, PoleError, ResonanceError

__all__ = [
    "QContext",
    "ParamSet",
    "MultiIndex",
    "qpoch_inf",
    "qpoch",
    "theta",
    "cpow",
    "mindex_nl",
    "lattice_hit",
    "perm_identity",
    "perm_compose",
    "perm_inverse",
    "perm_transposition",
    "permute_seq",
    "q_shift",
]

# Nearness threshold (relative) for deciding that a value sits on the
# q-power lattice, and the scan range for the exponent.
LATTICE_RTOL = 1e-8
LATTICE_RANGE = 64

_POLE_TOL = 1e-8


def _default_prod_terms(q: complex) -> int:
    """Smallest K with |q|^K < 1e-17."""
    aq = abs(q)
    k = max(1, math.ceil(math.log(1e-17) / math.log(aq)))
    while aq**k >= 1e-17:
        k += 1
    return k


@dataclass(frozen=True)
class QContext:
    """Evaluation context: the base q plus truncation/tolerance policy.

    prod_terms   number of factors kept in infinite products
    series_cap   maximum shell (total degree) in multi-series evaluation
    tail_tol     relative shell size below which a series is considered done
    cmp_tol      default comparison tolerance for checks
    seed         seed for any randomized sampling driven by this context
    """

    q: complex
    prod_terms: int | None = None
    series_cap: int = 80
    tail_tol: float = 1e-12
    cmp_tol: float = 1e-9
    seed: int = 0

    def __post_init__(self) -> None:
        q = complex(self.q)
        object.__setattr__(self, "q", q)
        if not 0.0 < abs(q) < 1.0:
            raise DomainError(f"base must satisfy 0 < |q| < 1, got |q| = {abs(q):.6g}")
        if self.prod_terms is None:
            object.__setattr__(self, "prod_terms", _default_prod_terms(q))
        if not isinstance(self.prod_terms, int) or self.prod_terms <= 0:
            raise ValueError("prod_terms must be a positive integer")
        if self.series_cap <= 0:
            raise ValueError("series_cap must be positive")
        if not 0.0 < self.tail_tol < 1.0:
            raise ValueError("tail_tol must lie in (0, 1)")
        if abs(q) ** self.prod_terms >= self.tail_tol:
            raise ValueError(
                "prod_terms too small: |q|^prod_terms must fall below tail_tol"
            )

    @cached_property
    def _qpow_table(self) -> np.ndarray:
        """[q^0, q^1, ..., q^(prod_terms-1)]"""
        return np.power(self.q, np.arange(self.prod_terms))

    def qpow(self, z: complex) -> complex:
        """q**z on the principal branch of log q."""
        return cmath.exp(complex(z) * cmath.log(self.q))


def qpoch_inf(a: complex, ctx: QContext) -> complex:
    """Truncated infinite product prod_{k>=0} (1 - a q^k).

    Total function of a; the truncation length is ctx.prod_terms.
    """
    return complex(np.prod(1.0 - complex(a) * ctx._qpow_table))


def qpoch(a: complex, m: int, ctx: QContext) -> complex:
    """Finite product (a)_m for any integer m.

    m >= 0: prod_{k=0}^{m-1} (1 - a q^k).
    m < 0:  1 / prod_{k=m}^{-1} (1 - a q^k); raises PoleError when a falls on
    a lattice point q^{-k} (m <= k < 0) that annihilates a factor.
    """
    a = complex(a)
    q = ctx.q
    if m >= 0:
        out = 1.0 + 0j
        qk = 1.0 + 0j
        for _ in range(m):
            out *= 1.0 - a * qk
            qk *= q
        return out
    out = 1.0 + 0j
    qk = q ** (-1)
    for _ in range(-m):
        factor = 1.0 - a * qk  # k runs -1, -2, ..., m
        if abs(factor) <= _POLE_TOL:
            raise PoleError(
                f"(a)_m with m = {m} hits a pole: a is within tolerance of a "
                f"positive power of q (factor magnitude {abs(factor):.3e})"
            )
        out *= factor
        qk /= q
    return 1.0 / out


def theta(x: complex, ctx: QContext) -> complex:
    """Multiplicative theta: (x)_inf (q/x)_inf. Undefined at x = 0."""
    x = complex(x)
    if x == 0:
        raise DomainError("theta is undefined at x = 0")
    return qpoch_inf(x, ctx) * qpoch_inf(ctx.q / x, ctx)


def cpow(t: complex, alpha: complex) -> complex:
    """Principal-branch power t**alpha = exp(alpha (ln|t| + i Arg t)),
    Arg in (-pi, pi].

    t = 0 returns 0 when Re alpha > 0 and raises DomainError otherwise.
    """
    t = complex(t)
    alpha = complex(alpha)
    if t == 0:
        if alpha.real > 0:
            return 0j
        raise DomainError("0**alpha is undefined for Re(alpha) <= 0")
    return cmath.exp(alpha * cmath.log(t))


def lattice_hit(
    x: complex,
    q: complex,
    kmin: int = -LATTICE_RANGE,
    kmax: int = LATTICE_RANGE,
    rtol: float = LATTICE_RTOL,
) -> int | None:
    """Exponent k in [kmin, kmax] with |x - q^k| < rtol |q^k|, or None.

    Used to flag parameter ratios that degenerate onto the q-power lattice.
    """
    x = complex(x)
    if x == 0:
        return None
    qk = q**kmin
    for k in range(kmin, kmax + 1):
        if abs(x - qk) < rtol * abs(qk):
            return k
        qk *= q
    return None


# ---------------------------------------------------------------------------
# integer multi-indices


@dataclass(frozen=True)
class MultiIndex:
    """Nonnegative integer multi-index."""

    m: tuple[int, ...]

    def __post_init__(self) -> None:
        m = tuple(int(v) for v in self.m)
        if any(v < 0 for v in m):
            raise ValueError("multi-index entries must be nonnegative")
        object.__setattr__(self, "m", m)

    @property
    def total(self) -> int:
        return sum(self.m)

    def nl(self, l: int, primed: bool = False) -> int:
        return mindex_nl(self.m, l, primed=primed)


def mindex_nl(m, l: int, primed: bool = False) -> int:
    """Signed partial sum of a multi-index.

    Plain variant: sum of the first l entries minus the sum of the rest.
    Primed variant: same but entry l+1 is skipped entirely.
    l must lie in [0, len(m)].
    """
    seq = tuple(int(v) for v in (m.m if isinstance(m, MultiIndex) else m))
    size = len(seq)
    if not 0 <= l <= size:
        raise IndexError(f"split position {l} outside [0, {size}]")
    head = sum(seq[:l])
    tail = sum(seq[l + 1 :]) if primed else sum(seq[l:])
    return head - tail


# ---------------------------------------------------------------------------
# permutations of {1..M}, one-line notation, 1-based images


def perm_identity(size: int) -> tuple[int, ...]:
    return tuple(range(1, size + 1))


def _validate_perm(sigma) -> tuple[int, ...]:
    s = tuple(int(v) for v in sigma)
    if sorted(s) != list(range(1, len(s) + 1)):
        raise ValueError(f"not a permutation of 1..{len(s)}: {s}")
    return s


def perm_compose(s, t) -> tuple[int, ...]:
    """(s o t)(i) = s(t(i)); t acts first."""
    s = _validate_perm(s)
    t = _validate_perm(t)
    if len(s) != len(t):
        raise ValueError("size mismatch")
    return tuple(s[t[i] - 1] for i in range(len(s)))


def perm_inverse(sigma) -> tuple[int, ...]:
    s = _validate_perm(sigma)
    inv = [0] * len(s)
    for i, v in enumerate(s):
        inv[v - 1] = i + 1
    return tuple(inv)


def perm_transposition(size: int, r: int) -> tuple[int, ...]:
    """Adjacent transposition swapping r and r+1 (1 <= r <= size-1)."""
    if not 1 <= r <= size - 1:
        raise IndexError(f"transposition index {r} outside [1, {size - 1}]")
    out = list(range(1, size + 1))
    out[r - 1], out[r] = out[r], out[r - 1]
    return tuple(out)


def permute_seq(seq, sigma) -> tuple:
    """Position i of the result holds entry sigma(i) of the input."""
    s = _validate_perm(sigma)
    if len(s) != len(seq):
        raise ValueError("size mismatch")
    return tuple(seq[v - 1] for v in s)


def q_shift(t, q: complex, s: int, power: int = 1) -> tuple[complex, ...]:
    """Multiply coordinate s (1-based) of t by q**power."""
    tt = list(complex(v) for v in t)
    if not 1 <= s <= len(tt):
        raise IndexError(f"coordinate {s} outside [1, {len(tt)}]")
    tt[s - 1] *= q**power
    return tuple(tt)


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class ParamSet:
    """Exponent parameters (alpha, gamma of equal length N; beta of length M)
    together with the base q, plus the derived multiplicative values
    a_j = q^alpha_j, b_i = q^beta_i, c_j = q^gamma_j on the principal branch.

    Construction rejects c_j on the nonpositive q-power lattice, where the
    defining series has a vanishing denominator.
    """

    alpha: tuple[complex, ...]
    beta: tuple[complex, ...]
    gamma: tuple[complex, ...]
    q: complex
    a: tuple[complex, ...] = field(init=False, repr=False, compare=False)
    b: tuple[complex, ...] = field(init=False, repr=False, compare=False)
    c: tuple[complex, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        alpha = tuple(complex(v) for v in self.alpha)
        beta = tuple(complex(v) for v in self.beta)
        gamma = tuple(complex(v) for v in self.gamma)
        q = complex(self.q)
        if not 0.0 < abs(q) < 1.0:
            raise DomainError("base must satisfy 0 < |q| < 1")
        if len(alpha) < 1 or len(beta) < 1:
            raise ValueError("need at least one upper and one lower family")
        if len(alpha) != len(gamma):
            raise ValueError("alpha and gamma must have equal length")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "q", q)
        logq = cmath.log(q)
        object.__setattr__(self, "a", tuple(cmath.exp(v * logq) for v in alpha))
        object.__setattr__(self, "b", tuple(cmath.exp(v * logq) for v in beta))
        object.__setattr__(self, "c", tuple(cmath.exp(v * logq) for v in gamma))
        for j, cj in enumerate(self.c, start=1):
            k = lattice_hit(cj, q, kmin=-LATTICE_RANGE, kmax=0)
            if k is not None:
                raise ResonanceError(
                    f"c_{j} sits on the nonpositive power lattice: c_{j} ~ q^{k}"
                )

    @property
    def N(self) -> int:
        return len(self.alpha)

    @property
    def M(self) -> int:
        return len(self.beta)

    def permuted(self, sigma) -> "ParamSet":
        """Copy with the beta family permuted; alpha and gamma untouched."""
        return ParamSet(self.alpha, permute_seq(self.beta, sigma), self.gamma, self.q)

    def qpow(self, z: complex) -> complex:
        return cmath.exp(complex(z) * cmath.log(self.q))
