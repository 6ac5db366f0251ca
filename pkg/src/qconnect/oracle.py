"""Independent verification machinery: q-difference operator residuals,
the series transformation checks (argument swap, iterated q-integral,
single-variable connection sum), and Casorati-determinant independence.

Routes here deliberately avoid the convolution engine: reference values come
from direct shell enumeration or from re-evaluating a function at shifted
points, sharing only the scalar primitives with the series module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, ResonanceError
from .qkernel import ParamSet, QContext, lattice_hit, qpoch_inf, theta
from .hyperseries import eval_FNM, eval_nphi

__all__ = [
    "residual_eqn1",
    "residual_eqn2",
    "apply_factored_shift_operator",
    "eval_FNM_reference",
    "check_duality",
    "check_jackson",
    "check_watson",
    "casorati_independence",
    "leading_exponents",
    "DualityReport",
    "JacksonReport",
    "WatsonReport",
    "CasoratiReport",
]

_DEN_TOL = 1e-12


# ---------------------------------------------------------------------------
# q-difference operator residuals


def _shift_all(t, q: complex, power: int) -> tuple[complex, ...]:
    return tuple(v * q**power for v in t)


def _shift_coord(t, q: complex, s: int) -> tuple[complex, ...]:
    return tuple(v * q if i == s - 1 else v for i, v in enumerate(t))


def _factored_coeffs(mults) -> np.ndarray:
    """Coefficients C_p with prod_j (1 - mu_j X) = sum_p C_p X^p."""
    coeffs = np.array([1.0 + 0j])
    for mu in mults:
        coeffs = np.convolve(coeffs, [1.0, -complex(mu)])
    return coeffs


def apply_factored_shift_operator(mults, f, t, ctx: QContext) -> complex:
    """Apply prod_j (1 - mu_j T) to f at t, where T scales every coordinate
    by q. Expanded over subsets via the factored coefficients, so it costs
    len(mults) + 1 evaluations of f."""
    coeffs = _factored_coeffs(mults)
    total = 0j
    for p_, cp in enumerate(coeffs):
        total += cp * f(_shift_all(t, ctx.q, p_))
    return total


def residual_eqn1(f, p: ParamSet, s: int, t, ctx: QContext) -> float:
    """Relative residual of the coupled equation attached to slot s:

        [ t_s prod_j(1 - a_j T)(1 - b_s T_s)
          - prod_j(1 - c_j T / q)(1 - T_s) ] f = 0,

    T scaling all coordinates by q and T_s only coordinate s. Normalized by
    the largest signed term, so an identically satisfied equation gives ~0
    and a generic function gives O(1)."""
    if not 1 <= s <= p.M:
        raise IndexError(f"slot {s} outside [1, {p.M}]")
    t = tuple(complex(v) for v in t)
    q = ctx.q
    Ca = _factored_coeffs(p.a)
    Cc = _factored_coeffs(tuple(cj / q for cj in p.c))
    ts = t[s - 1]
    bs = p.b[s - 1]
    terms: list[complex] = []
    for p_ in range(p.N + 1):
        base = _shift_all(t, q, p_)
        f_base = f(base)
        f_extra = f(_shift_coord(base, q, s))
        terms.append(ts * Ca[p_] * f_base)
        terms.append(-ts * Ca[p_] * bs * f_extra)
        terms.append(-Cc[p_] * f_base)
        terms.append(Cc[p_] * f_extra)
    scale = max(abs(v) for v in terms)
    if scale == 0.0:
        return 0.0
    return abs(sum(terms)) / scale


def residual_eqn2(f, p: ParamSet, r: int, s: int, t, ctx: QContext) -> float:
    """Relative residual of the pairwise-compatibility equation:

        [ t_r (1 - b_r T_r)(1 - T_s) - t_s (1 - b_s T_s)(1 - T_r) ] f = 0.

    Antisymmetric in (r, s); r = s is rejected."""
    if not 1 <= r <= p.M:
        raise IndexError(f"slot {r} outside [1, {p.M}]")
    if not 1 <= s <= p.M:
        raise IndexError(f"slot {s} outside [1, {p.M}]")
    if r == s:
        raise ValueError("pairwise equation needs two distinct slots")
    t = tuple(complex(v) for v in t)
    q = ctx.q
    f00 = f(t)
    fr = f(_shift_coord(t, q, r))
    fs = f(_shift_coord(t, q, s))
    frs = f(_shift_coord(_shift_coord(t, q, r), q, s))
    tr, ts = t[r - 1], t[s - 1]
    br, bs = p.b[r - 1], p.b[s - 1]
    terms = [
        tr * f00,
        -tr * br * fr,
        -tr * fs,
        tr * br * frs,
        -ts * f00,
        ts * bs * fs,
        ts * fr,
        -ts * bs * frs,
    ]
    scale = max(abs(v) for v in terms)
    if scale == 0.0:
        return 0.0
    return abs(sum(terms)) / scale


# ---------------------------------------------------------------------------
# reference enumeration (independent of the convolution engine)


def _enum_series(a, b, c, t, ctx: QContext, cap: int | None = None) -> complex:
    """sum_m prod_j (a_j)_{|m|}/(c_j)_{|m|} prod_i (b_i)_{m_i}/(q)_{m_i} t^m
    by explicit walk over every multi-index, shell by shell.

    The walk costs nothing per shell beyond the term count, so the default
    cap is generous for one or two axes (arguments near the unit circle need
    hundreds of shells to clear the tail tolerance)."""
    q = ctx.q
    M = len(t)
    if cap is None:
        cap = 400 if M <= 2 else max(ctx.series_cap, 160)
    ws = []
    for bi, ti in zip(b, t):
        w = np.empty(cap + 1, dtype=complex)
        w[0] = 1.0
        qm = 1.0 + 0j
        for m in range(cap):
            den = 1.0 - q * qm
            w[m + 1] = w[m] * ti * (1.0 - bi * qm) / den
            qm *= q
        ws.append(w)
    g = np.empty(cap + 1, dtype=complex)
    g[0] = 1.0
    qn = 1.0 + 0j
    for n in range(cap):
        num = 1.0 + 0j
        den = 1.0 + 0j
        for aj in a:
            num *= 1.0 - aj * qn
        for cj in c:
            den *= 1.0 - cj * qn
        if abs(den) <= _DEN_TOL:
            raise ResonanceError(f"coupling denominator vanished at index {n}")
        g[n + 1] = g[n] * num / den
        qn *= q

    def shell(s: int) -> complex:
        acc = 0j

        def rec(axis: int, remaining: int, partial: complex) -> None:
            nonlocal acc
            if axis == M - 1:
                acc += partial * ws[axis][remaining]
                return
            for m in range(remaining + 1):
                rec(axis + 1, remaining - m, partial * ws[axis][m])

        rec(0, s, 1.0 + 0j)
        return acc

    total = 0j
    mag = 1e-300
    small = 0
    for s in range(cap + 1):
        sh = g[s] * shell(s)
        total += sh
        mag = max(mag, abs(total))
        if abs(sh) / mag < ctx.tail_tol:
            small += 1
            if small >= 3:
                return total
        else:
            small = 0
    raise ConvergenceError(f"reference enumeration did not settle in {cap} shells")


def eval_FNM_reference(p: ParamSet, t, ctx: QContext) -> complex:
    """Reference value of the principal multi-series by direct enumeration."""
    t = tuple(complex(v) for v in t)
    bad = [i for i, v in enumerate(t, start=1) if abs(v) >= 1.0]
    if bad:
        raise DomainError(f"|t_i| < 1 required; violated at i = {bad}")
    return _enum_series(p.a, p.b, p.c, t, ctx)


# ---------------------------------------------------------------------------
# transformation checks


@dataclass(frozen=True)
class DualityReport:
    lhs: complex
    rhs: complex
    residual: float


def check_duality(p: ParamSet, t, ctx: QContext) -> DualityReport:
    """Role-swap transformation: the (N, M) series against the (M, N) series
    in swapped arguments times an infinite-product prefactor. The swapped side
    is enumerated independently; needs every |a_j| < 1 and |t_i| < 1."""
    t = tuple(complex(v) for v in t)
    if len(t) != p.M:
        raise ValueError(f"expected {p.M} coordinates, got {len(t)}")
    bad = [j for j, aj in enumerate(p.a, start=1) if abs(aj) >= 1.0]
    if bad:
        raise DomainError(f"|a_j| < 1 required on the swapped side; violated at j = {bad}")
    bad = [i for i, v in enumerate(t, start=1) if abs(v) >= 1.0]
    if bad:
        raise DomainError(f"|t_i| < 1 required; violated at i = {bad}")
    for i in range(p.M):
        k = lattice_hit(p.b[i] * t[i], p.q, kmin=-64, kmax=0)
        if k is not None:
            raise ResonanceError(
                f"b_{i + 1} t_{i + 1} sits at q^{k}; swapped coupling degenerates"
            )
    lhs = eval_FNM(p, t, ctx).value
    pref = 1.0 + 0j
    for aj, cj in zip(p.a, p.c):
        pref *= qpoch_inf(aj, ctx) / qpoch_inf(cj, ctx)
    for bi, ti in zip(p.b, t):
        pref *= qpoch_inf(bi * ti, ctx) / qpoch_inf(ti, ctx)
    swapped = _enum_series(
        a=t,
        b=tuple(cj / aj for aj, cj in zip(p.a, p.c)),
        c=tuple(bi * ti for bi, ti in zip(p.b, t)),
        t=p.a,
        ctx=ctx,
    )
    rhs = pref * swapped
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return DualityReport(lhs=lhs, rhs=rhs, residual=residual)


@dataclass(frozen=True)
class JacksonReport:
    lhs: complex
    rhs: complex
    residual: float


def check_jackson(p: ParamSet, t, ctx: QContext, level_cap: int = 400) -> JacksonReport:
    """Iterated q-integral representation: N nested geometric sums over the
    grid z = q^m (m >= 0, endpoint included) against the series value.

    After absorbing constant products, the integral side reads
    prod_j (a_j)_inf/(c_j)_inf * sum_m prod_j a_j^{m_j} (c_j/a_j)_{m_j}/(q)_{m_j}
    * prod_i (b_i t_i Q)_inf/(t_i Q)_inf at Q = q^{m_1 + ... + m_N}.
    """
    t = tuple(complex(v) for v in t)
    if len(t) != p.M:
        raise ValueError(f"expected {p.M} coordinates, got {len(t)}")
    bad = [j for j, aj in enumerate(p.a, start=1) if abs(aj) >= 1.0]
    if bad:
        raise DomainError(f"|a_j| < 1 required for the q-integral; violated at j = {bad}")
    lhs = eval_FNM(p, t, ctx).value

    q = ctx.q
    N, M = p.N, p.M
    tables = []
    for j in range(N):
        ratio_param = p.c[j] / p.a[j]
        w = [1.0 + 0j]
        qm = 1.0 + 0j
        peak = 1.0
        for m in range(level_cap):
            nxt = w[-1] * p.a[j] * (1.0 - ratio_param * qm) / (1.0 - q * qm)
            w.append(nxt)
            qm *= q
            peak = max(peak, abs(nxt))
            if abs(nxt) < 1e-22 * peak:
                break
        tables.append(np.asarray(w))
    s_max = sum(len(w) - 1 for w in tables)
    P = np.empty(s_max + 2, dtype=complex)
    pref0 = 1.0 + 0j
    for bi, ti in zip(p.b, t):
        pref0 *= qpoch_inf(bi * ti, ctx) / qpoch_inf(ti, ctx)
    P[0] = pref0
    qS = 1.0 + 0j
    for S in range(s_max + 1):
        ratio = 1.0 + 0j
        for i in range(M):
            den = 1.0 - p.b[i] * t[i] * qS
            if abs(den) <= _DEN_TOL:
                raise ResonanceError("q-integrand factor degenerated")
            ratio *= (1.0 - t[i] * qS) / den
        P[S + 1] = P[S] * ratio
        qS *= q

    def level(j: int, S: int) -> complex:
        w = tables[j]
        if j == N - 1:
            return complex(np.dot(w, P[S : S + len(w)]))
        return sum(w[m] * level(j + 1, S + m) for m in range(len(w)))

    pref = 1.0 + 0j
    for aj, cj in zip(p.a, p.c):
        pref *= qpoch_inf(aj, ctx) / qpoch_inf(cj, ctx)
    rhs = pref * level(0, 0)
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return JacksonReport(lhs=lhs, rhs=rhs, residual=residual)


@dataclass(frozen=True)
class WatsonReport:
    lhs: complex
    rhs: complex
    residual: float


def check_watson(upper, lower, t: complex, ctx: QContext) -> WatsonReport:
    """Single-variable connection sum: the value at argument t against the
    weighted sum of companion series at the reflected argument
    q prod(lower) / (prod(upper) t). Both arguments must lie inside the unit
    disc; upper-parameter ratios must stay off the q-power lattice."""
    upper = tuple(complex(v) for v in upper)
    lower = tuple(complex(v) for v in lower)
    if len(upper) != len(lower) + 1:
        raise ValueError("need exactly one more upper than lower parameter")
    t = complex(t)
    q = ctx.q
    for j in range(len(upper)):
        for k in range(len(upper)):
            if j != k:
                hit = lattice_hit(upper[j] / upper[k], q)
                if hit is not None:
                    raise ResonanceError(
                        f"upper ratio {j + 1}/{k + 1} sits at q^{hit}"
                    )
    arg2 = q * math.prod(lower, start=1.0 + 0j) / (
        math.prod(upper, start=1.0 + 0j) * t
    )
    if abs(t) >= 1.0:
        raise DomainError(f"|t| < 1 required, got {abs(t):.6g}")
    if abs(arg2) >= 1.0:
        raise DomainError(
            f"reflected argument must satisfy |.| < 1, got {abs(arg2):.6g}"
        )
    lhs = eval_nphi(upper, lower, t, ctx).value
    th_t = theta(t, ctx)
    rhs = 0j
    for k, ak in enumerate(upper):
        coeff = 1.0 + 0j
        for bj in lower:
            coeff *= qpoch_inf(bj / ak, ctx) / qpoch_inf(bj, ctx)
        for j, aj in enumerate(upper):
            if j != k:
                coeff *= qpoch_inf(aj, ctx) / qpoch_inf(aj / ak, ctx)
        coeff *= theta(t * ak, ctx) / th_t
        new_upper = tuple(q * ak / bj for bj in lower) + (ak,)
        new_lower = tuple(q * ak / aj for j, aj in enumerate(upper) if j != k)
        rhs += coeff * eval_nphi(new_upper, new_lower, arg2, ctx).value
    residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    return WatsonReport(lhs=lhs, rhs=rhs, residual=residual)


# ---------------------------------------------------------------------------
# independence


@dataclass(frozen=True)
class CasoratiReport:
    """Casorati matrix of component functions along a q-power shift ladder,
    with each column scaled to unit max magnitude before the determinant."""

    det: complex
    matrix: np.ndarray
    shift: tuple[int, ...]


def casorati_independence(vectors, m, t, ctx: QContext) -> CasoratiReport:
    """Determinant test for linear independence over the field of q-shift
    invariants: row k evaluates every supplied function at t * q^{k m}.

    Swapping two functions flips the determinant's sign; a repeated function
    makes it vanish. Shifted points leaving a function's domain surface as
    whatever error the function raises."""
    funcs = list(vectors)
    n = len(funcs)
    if n < 1:
        raise ValueError("need at least one function")
    m = tuple(int(v) for v in m)
    t = tuple(complex(v) for v in t)
    if len(m) != len(t):
        raise ValueError("shift pattern and point must have equal length")
    q = ctx.q
    A = np.empty((n, n), dtype=complex)
    for k in range(n):
        tk = tuple(v * q ** (k * mv) for v, mv in zip(t, m))
        for i, fn in enumerate(funcs):
            A[k, i] = fn(tk)
    scaled = A.copy()
    for i in range(n):
        peak = np.max(np.abs(scaled[:, i]))
        if peak > 0.0:
            scaled[:, i] /= peak
    det = complex(np.linalg.det(scaled))
    return CasoratiReport(det=det, matrix=A, shift=m)


# ---------------------------------------------------------------------------
# leading-behavior extraction


def leading_exponents(fn, L: int, M: int, ctx: QContext, base: float = 1e-4):
    """Numerically extract the leading power vector of a function on the
    sector with coordinates 1..L small and the rest large.

    Uses chamber coordinates x (t_i = x_i ... x_L for i <= L and
    1/t_i = x_{L+1} ... x_i beyond), scales each x_j by q in turn, and reads
    the exponent off the principal logarithm of the value ratio. Accuracy is
    O(base)."""
    q = ctx.q
    logq = np.log(complex(q))

    def point(xs) -> tuple[complex, ...]:
        t = []
        for i in range(1, L + 1):
            t.append(math.prod(xs[i - 1 : L], start=1.0 + 0j))
        for i in range(L + 1, M + 1):
            t.append(1.0 / math.prod(xs[L : i], start=1.0 + 0j))
        return tuple(t)

    xs = [base * (1.0 + 0.13 * j) for j in range(M)]
    f0 = fn(point(xs))
    if f0 == 0:
        raise ValueError("function vanished at the probe point")
    e = [0j] * (M + 2)  # e[j] for j = 1..M, padded at both ends
    for j in range(1, M + 1):
        ys = list(xs)
        ys[j - 1] *= q
        fj = fn(point(ys))
        e[j] = np.log(fj / f0) / logq
    delta = [0j] * M
    for j in range(1, L + 1):
        delta[j - 1] = e[j] - e[j - 1]
    for j in range(M, L, -1):
        delta[j - 1] = e[j + 1] - e[j]
    return tuple(delta)
