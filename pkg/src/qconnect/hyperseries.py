"""Multi-axis q-hypergeometric series and their local solution families.

Every series handled here has the shape

    sum_{m in Z_{>=0}^M} g(<eps, m>) * prod_i w_i(m_i)

with per-axis weights w_i given by first-order term recurrences, axis signs
eps_i in {+1, -1}, and a coupling factor g indexed by the signed sum. The
engine builds one weight table per axis, convolves the plus-sign and
minus-sign tables separately, and accumulates the sum shell by shell (a shell
collects all m with fixed |m|), stopping once three consecutive shells are
negligible relative to the running magnitude.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchWarning,
    ConvergenceError,
    DomainError,
    ResonanceError,
)
from .qkernel import (
    ParamSet,
    QContext,
    cpow,
    lattice_hit,
    permute_seq,
)

__all__ = [
    "SeriesValue",
    "SolutionVector",
    "DomainSpec",
    "CharExponent",
    "ResonanceReport",
    "eval_FNM",
    "eval_nphi",
    "eval_FNM_L",
    "eval_FNM_Lkl",
    "eval_GNM_Lkl",
    "local_solution",
    "build_solution_vector",
    "in_domain",
    "char_exponents",
    "check_resonance",
    "component_order",
    "component_index",
]

_DEN_TOL = 1e-12
_SECTOR = math.pi / 4.0


@dataclass(frozen=True)
class SeriesValue:
    """Value of a truncated series together with how it was truncated.

    terms_used counts the shells consumed; tail_estimate is the largest
    relative shell magnitude among the final three (all below tail_tol on a
    successful evaluation).
    """

    value: complex
    terms_used: int
    tail_estimate: float


# ---------------------------------------------------------------------------
# engine


def _check_base(p: ParamSet, ctx: QContext) -> None:
    if p.q != ctx.q:
        raise ValueError("parameter set was built for a different base q")


def _axis_table(nums, dens, x: complex, cap: int, ctx: QContext) -> np.ndarray:
    """Weight table w[0..cap] with w[0] = 1 and
    w[k+1]/w[k] = x * prod(1 - n q^k) / prod(1 - d q^k)."""
    if cap == 0:
        return np.ones(1, dtype=complex)
    qp = np.power(ctx.q, np.arange(cap))
    num = np.ones(cap, dtype=complex)
    for u in nums:
        num *= 1.0 - complex(u) * qp
    den = np.ones(cap, dtype=complex)
    for v in dens:
        den *= 1.0 - complex(v) * qp
    if np.any(np.abs(den) <= _DEN_TOL):
        raise ResonanceError(
            "axis weight recurrence hit a vanishing denominator "
            "(a lower parameter degenerated onto the q-power lattice)"
        )
    ratios = complex(x) * num / den
    w = np.empty(cap + 1, dtype=complex)
    w[0] = 1.0
    np.cumprod(ratios, out=w[1:])
    return w


def _coupling_table(nums, dens, up: int, down: int, ctx: QContext) -> np.ndarray:
    """Coupling table g[n] for n in [-down, up] (stored with offset `down`),
    g(0) = 1 and g(n) = prod_j (nums_j)_n / (dens_j)_n."""
    q = ctx.q
    g = np.empty(up + down + 1, dtype=complex)
    g[down] = 1.0
    qk = 1.0 + 0j
    for n in range(up):
        num = 1.0 + 0j
        den = 1.0 + 0j
        for u in nums:
            num *= 1.0 - u * qk
        for v in dens:
            den *= 1.0 - v * qk
        if abs(den) <= _DEN_TOL:
            raise ResonanceError(
                f"coupling denominator vanished at index {n} "
                "(parameter ratio on the q-power lattice)"
            )
        g[down + n + 1] = g[down + n] * num / den
        qk *= q
    qk = 1.0 / q
    pairs = min(len(nums), len(dens))
    for n in range(down):
        # factors are paired before dividing: each quotient tends to a
        # finite constant as q^{-n} grows, while the separate products
        # overflow long before the table index range is exhausted
        ratio = 1.0 + 0j
        for j in range(pairs):
            fden = 1.0 - nums[j] * qk
            if abs(fden) <= _DEN_TOL * max(1.0, abs(nums[j] * qk)):
                raise ResonanceError(
                    f"coupling denominator vanished at index {-n - 1} "
                    "(parameter ratio on the q-power lattice)"
                )
            ratio *= (1.0 - dens[j] * qk) / fden
        for v in dens[pairs:]:
            ratio *= 1.0 - v * qk
        for u in nums[pairs:]:
            fden = 1.0 - u * qk
            if abs(fden) <= _DEN_TOL * max(1.0, abs(u * qk)):
                raise ResonanceError(
                    f"coupling denominator vanished at index {-n - 1} "
                    "(parameter ratio on the q-power lattice)"
                )
            ratio /= fden
        g[down - n - 1] = g[down - n] * ratio
        qk /= q
    return g


def _shell_series(plus_axes, minus_axes, g_nums, g_dens, ctx: QContext) -> SeriesValue:
    cap = ctx.series_cap

    def combined(axes) -> np.ndarray:
        c = np.ones(1, dtype=complex)
        for nums, dens, x in axes:
            w = _axis_table(nums, dens, x, cap, ctx)
            c = np.convolve(c, w)[: cap + 1]
        return c

    cp = combined(plus_axes)
    cm = combined(minus_axes)
    up = len(cp) - 1
    down = len(cm) - 1
    g = _coupling_table(g_nums, g_dens, up, down, ctx)

    total = 0j
    mag = 1e-300
    small = 0
    recent: list[float] = []
    for s in range(cap + 1):
        j0 = max(0, s - down)
        j1 = min(s, up)
        if j0 > j1:
            shell = 0j
        else:
            js = np.arange(j0, j1 + 1)
            shell = complex(np.sum(cp[js] * cm[s - js] * g[down + 2 * js - s]))
        total += shell
        mag = max(mag, abs(total))
        rel = abs(shell) / mag
        recent.append(rel)
        if rel < ctx.tail_tol:
            small += 1
            if small >= 3:
                return SeriesValue(total, s + 1, max(recent[-3:]))
        else:
            small = 0
    raise ConvergenceError(
        f"series did not settle within {cap} shells "
        f"(last relative shell size {recent[-1]:.3e})"
    )


def _plain_axis(b: complex, x: complex, q: complex):
    return ((b,), (q,), x)


# ---------------------------------------------------------------------------
# series evaluators


def eval_FNM(p: ParamSet, t, ctx: QContext) -> SeriesValue:
    """Principal multi-series: coupling (a_1..a_N | c_1..c_N) over the total
    degree, one plain axis (b_i; t_i) per lower slot. Requires |t_i| < 1."""
    _check_base(p, ctx)
    t = tuple(complex(v) for v in t)
    if len(t) != p.M:
        raise ValueError(f"expected {p.M} coordinates, got {len(t)}")
    bad = [i for i, v in enumerate(t, start=1) if abs(v) >= 1.0]
    if bad:
        raise DomainError(f"|t_i| < 1 required; violated at i = {bad}")
    plus = [_plain_axis(p.b[i], t[i], p.q) for i in range(p.M)]
    return _shell_series(plus, [], p.a, p.c, ctx)


def eval_nphi(upper, lower, t: complex, ctx: QContext) -> SeriesValue:
    """One-variable basic hypergeometric sum with len(upper) = len(lower) + 1.

    Term recurrence: T_{m+1}/T_m = t prod(1 - u q^m) /
    [(1 - q^{m+1}) prod(1 - l q^m)]. Requires |t| < 1.
    """
    upper = tuple(complex(v) for v in upper)
    lower = tuple(complex(v) for v in lower)
    if len(upper) != len(lower) + 1:
        raise ValueError("need exactly one more upper than lower parameter")
    t = complex(t)
    if abs(t) >= 1.0:
        raise DomainError(f"|t| < 1 required, got {abs(t):.6g}")
    for j, lv in enumerate(lower, start=1):
        k = lattice_hit(lv, ctx.q, kmin=-64, kmax=0)
        if k is not None:
            raise ResonanceError(f"lower parameter {j} sits at q^{k}")
    q = ctx.q
    term = 1.0 + 0j
    total = 0j
    mag = 1e-300
    small = 0
    recent: list[float] = []
    qm = 1.0 + 0j
    for m in range(ctx.series_cap + 1):
        total += term
        mag = max(mag, abs(total))
        rel = abs(term) / mag
        recent.append(rel)
        if rel < ctx.tail_tol:
            small += 1
            if small >= 3:
                return SeriesValue(total, m + 1, max(recent[-3:]))
        else:
            small = 0
        num = t
        for u in upper:
            num *= 1.0 - u * qm
        den = 1.0 - q * qm
        for lv in lower:
            den *= 1.0 - lv * qm
        if abs(den) <= _DEN_TOL:
            raise ResonanceError(f"term denominator vanished at index {m}")
        term *= num / den
        qm *= q
    raise ConvergenceError(
        f"single-variable sum did not settle within {ctx.series_cap} terms"
    )


def _require_range(name: str, value: int, lo: int, hi: int) -> None:
    if not lo <= value <= hi:
        raise IndexError(f"{name} = {value} outside [{lo}, {hi}]")


def _domain_check(labels_and_ratios) -> None:
    bad = [lab for lab, r in labels_and_ratios if not r < 1.0]
    if bad:
        raise DomainError("outside convergence region: " + "; ".join(bad))


def _abs_ratio(num: complex, den: complex) -> float:
    if den == 0:
        return math.inf
    return abs(num) / abs(den)


def eval_FNM_L(p: ParamSet, L: int, t, ctx: QContext) -> SeriesValue:
    """Split series: axes 1..L expand in t_i, axes L+1..M in q/(b_i t_i), the
    coupling runs over the signed split sum with parameter quotient
    (a_j / B | c_j / B), B = prod_{i>L} b_i."""
    _check_base(p, ctx)
    M = p.M
    _require_range("L", L, 0, M)
    t = tuple(complex(v) for v in t)
    if len(t) != M:
        raise ValueError(f"expected {M} coordinates, got {len(t)}")
    q = p.q
    big = math.prod((cj / aj for aj, cj in zip(p.a, p.c)), start=1.0 + 0j) * q
    checks = [(f"|t_{i + 1}| >= 1", abs(t[i])) for i in range(L)]
    checks += [
        (f"tail ratio at i = {i + 1} >= 1", _abs_ratio(big, p.b[i] * t[i]))
        for i in range(L, M)
    ]
    _domain_check(checks)
    plus = [_plain_axis(p.b[i], t[i], q) for i in range(L)]
    minus = [_plain_axis(p.b[i], q / (p.b[i] * t[i]), q) for i in range(L, M)]
    B = math.prod(p.b[L:], start=1.0 + 0j)
    g_nums = tuple(aj / B for aj in p.a)
    g_dens = tuple(cj / B for cj in p.c)
    return _shell_series(plus, minus, g_nums, g_dens, ctx)


def eval_FNM_Lkl(p: ParamSet, L: int, k: int, l: int, t, ctx: QContext) -> SeriesValue:
    """Split series attached to upper slot k and lower slot l (L+1 <= l <= M).

    Axes 1..L and the relabeled axes up to l expand in q t_i/(b_l t_l); one
    distinguished axis carries the ({q a_k/c_j} | {q a_k/a_j}) weights with
    argument C q/(b_l t_l), C = prod_j c_j/a_j; axes l+1..M expand in
    b_l t_l/(b_i t_i).
    """
    _check_base(p, ctx)
    N, M = p.N, p.M
    _require_range("L", L, 0, M)
    _require_range("l", l, L + 1, M)
    _require_range("k", k, 1, N)
    t = tuple(complex(v) for v in t)
    if len(t) != M:
        raise ValueError(f"expected {M} coordinates, got {len(t)}")
    q = p.q
    a_k = p.a[k - 1]
    bl_tl = p.b[l - 1] * t[l - 1]
    Cq = math.prod((cj / aj for aj, cj in zip(p.a, p.c)), start=1.0 + 0j) * q
    checks = [("distinguished ratio >= 1", _abs_ratio(Cq, bl_tl))]
    checks += [
        (f"ratio at i = {i + 1} >= 1", _abs_ratio(q * t[i], bl_tl))
        for i in range(l - 1)
    ]
    checks += [
        (f"ratio at i = {i + 1} >= 1", _abs_ratio(q * t[l - 1], p.b[i] * t[i]))
        for i in range(l, M)
    ]
    _domain_check(checks)
    plus = [_plain_axis(p.b[i], q * t[i] / bl_tl, q) for i in range(L)]
    plus.append(
        (
            tuple(q * a_k / cj for cj in p.c),
            tuple(q * a_k / aj for aj in p.a),
            Cq / bl_tl,
        )
    )
    plus += [_plain_axis(p.b[i], q * t[i] / bl_tl, q) for i in range(L, l - 1)]
    minus = [_plain_axis(p.b[i], bl_tl / (p.b[i] * t[i]), q) for i in range(l, M)]
    tail = math.prod(p.b[l:], start=1.0 + 0j)
    g_nums = (a_k / tail,)
    g_dens = (q * a_k / (p.b[l - 1] * tail),)
    return _shell_series(plus, minus, g_nums, g_dens, ctx)


def eval_GNM_Lkl(p: ParamSet, L: int, k: int, l: int, t, ctx: QContext) -> SeriesValue:
    """Split series attached to lower-coupling slot k and lower slot l
    (1 <= l <= L).

    Axes 1..l-1 expand in q t_i/(b_l t_l); the relabeled axes between l and L
    and all axes beyond L expand in b_l t_l/(b_i t_i) with one distinguished
    axis carrying ({q a_j/c_k} | {q c_j/c_k}) at argument b_l t_l/q.
    """
    _check_base(p, ctx)
    N, M = p.N, p.M
    _require_range("L", L, 0, M)
    _require_range("l", l, 1, L)
    _require_range("k", k, 1, N)
    t = tuple(complex(v) for v in t)
    if len(t) != M:
        raise ValueError(f"expected {M} coordinates, got {len(t)}")
    q = p.q
    c_k = p.c[k - 1]
    bl_tl = p.b[l - 1] * t[l - 1]
    checks = [(f"|t_{l}| >= 1", abs(t[l - 1]))]
    checks += [
        (f"ratio at i = {i + 1} >= 1", _abs_ratio(q * t[i], bl_tl))
        for i in range(l - 1)
    ]
    checks += [
        (f"ratio at i = {i + 1} >= 1", _abs_ratio(q * t[l - 1], p.b[i] * t[i]))
        for i in range(l, M)
    ]
    _domain_check(checks)
    plus = [_plain_axis(p.b[i], q * t[i] / bl_tl, q) for i in range(l - 1)]
    minus = [
        _plain_axis(p.b[i + 1], bl_tl / (p.b[i + 1] * t[i + 1]), q)
        for i in range(l - 1, L - 1)
    ]
    minus.append(
        (
            tuple(q * aj / c_k for aj in p.a),
            tuple(q * cj / c_k for cj in p.c),
            bl_tl / q,
        )
    )
    minus += [_plain_axis(p.b[i], bl_tl / (p.b[i] * t[i]), q) for i in range(L, M)]
    tail = math.prod(p.b[l:], start=1.0 + 0j)
    g_nums = (c_k / (q * tail),)
    g_dens = (c_k / (p.b[l - 1] * tail),)
    return _shell_series(plus, minus, g_nums, g_dens, ctx)


# ---------------------------------------------------------------------------
# component bookkeeping


def component_order(N: int, M: int) -> list:
    """Vector component labels: 0, then (k, l) for k = 1..N, l = 1..M."""
    return [0] + [(k, l) for k in range(1, N + 1) for l in range(1, M + 1)]


def component_index(comp, M: int) -> int:
    """Flat position of a component label inside the vector."""
    if comp == 0:
        return 0
    k, l = comp
    return (k - 1) * M + l


def _normalize_component(which, N: int, M: int):
    if which in (0, "u0", None):
        return 0
    k, l = which
    k, l = int(k), int(l)
    _require_range("k", k, 1, N)
    _require_range("l", l, 1, M)
    return (k, l)


# ---------------------------------------------------------------------------
# local solutions


def local_solution(p: ParamSet, L: int, sigma, which, t, ctx: QContext) -> complex:
    """Single component of the local solution vector at split level L and
    slot ordering sigma.

    The b/t slots are reordered by sigma first; prefactors are principal
    powers of the reordered coordinates, the series factor is the matching
    split series. Emits BranchWarning when a coordinate carrying a power
    prefactor lies outside the sector |Arg| < pi/4 (power laws for the
    composite shifts are then no longer guaranteed).
    """
    _check_base(p, ctx)
    M = p.M
    _require_range("L", L, 0, M)
    comp = _normalize_component(which, p.N, M)
    pp = p.permuted(sigma)
    tt = permute_seq(tuple(complex(v) for v in t), sigma)
    start = (L + 1) if comp == 0 else comp[1]
    risky = [
        i
        for i in range(start, M + 1)
        if tt[i - 1] != 0 and abs(cmath.phase(tt[i - 1])) >= _SECTOR
    ]
    if risky:
        warnings.warn(
            f"coordinates {risky} lie outside the branch-safe sector; "
            "principal powers may break shift identities",
            BranchWarning,
            stacklevel=2,
        )
    beta_tail = lambda l: sum(pp.beta[l:])  # noqa: E731  sum over i > l
    if comp == 0:
        pref = 1.0 + 0j
        for i in range(L + 1, M + 1):
            pref *= cpow(tt[i - 1], -pp.beta[i - 1])
        return pref * _shell_value(eval_FNM_L(pp, L, tt, ctx))
    k, l = comp
    if l <= L:
        expo = 1.0 + beta_tail(l) - pp.gamma[k - 1]
        series = eval_GNM_Lkl(pp, L, k, l, tt, ctx)
    else:
        expo = -pp.alpha[k - 1] + beta_tail(l)
        series = eval_FNM_Lkl(pp, L, k, l, tt, ctx)
    pref = cpow(tt[l - 1], expo)
    for i in range(l + 1, M + 1):
        pref *= cpow(tt[i - 1], -pp.beta[i - 1])
    return pref * _shell_value(series)


def _shell_value(sv: SeriesValue) -> complex:
    return sv.value


@dataclass(frozen=True)
class SolutionVector:
    """All components of a local solution family evaluated at one point."""

    L: int
    sigma: tuple[int, ...]
    t: tuple[complex, ...]
    components: tuple[complex, ...]
    params: ParamSet

    def as_array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=complex)


def build_solution_vector(p: ParamSet, L: int, sigma, t, ctx: QContext) -> SolutionVector:
    """Evaluate every component (the distinguished one first, then (k, l) in
    row-major order). Component failures are aggregated into one error that
    names the offending components."""
    comps = []
    failures: list[tuple[object, Exception]] = []
    for label in component_order(p.N, p.M):
        try:
            comps.append(local_solution(p, L, sigma, label, t, ctx))
        except Exception as exc:  # noqa: BLE001  aggregated below
            failures.append((label, exc))
    if failures:
        first = failures[0][1]
        detail = "; ".join(f"component {lab}: {exc}" for lab, exc in failures)
        raise type(first)(f"{len(failures)} component(s) failed: {detail}") from first
    return SolutionVector(
        L=L,
        sigma=tuple(int(v) for v in sigma),
        t=tuple(complex(v) for v in t),
        components=tuple(comps),
        params=p,
    )


# ---------------------------------------------------------------------------
# domains, exponents, resonance


@dataclass(frozen=True)
class DomainSpec:
    """Convergence sector of the solution family at split level L and slot
    ordering sigma: reordered coordinates 1..L small, the rest large, with
    pairwise separation conditions."""

    L: int
    sigma: tuple[int, ...]

    def slacks(self, p: ParamSet, t, ctx: QContext) -> list[tuple[str, float]]:
        tt = permute_seq(tuple(complex(v) for v in t), self.sigma)
        bb = permute_seq(p.b, self.sigma)
        q = p.q
        big = math.prod((cj / aj for aj, cj in zip(p.a, p.c)), start=1.0 + 0j) * q
        out: list[tuple[str, float]] = []
        for i in range(1, self.L + 1):
            out.append((f"small coordinate {i}", 1.0 - abs(tt[i - 1])))
        for i in range(self.L + 1, len(tt) + 1):
            out.append(
                (
                    f"large coordinate {i}",
                    1.0 - _abs_ratio(big, bb[i - 1] * tt[i - 1]),
                )
            )
        for i in range(1, len(tt) + 1):
            for j in range(i + 1, len(tt) + 1):
                out.append(
                    (
                        f"separation ({i}, {j})",
                        1.0 - _abs_ratio(q * tt[i - 1], bb[j - 1] * tt[j - 1]),
                    )
                )
        return out

    def check(self, p: ParamSet, t, ctx: QContext) -> tuple[bool, float]:
        slacks = self.slacks(p, t, ctx)
        margin = min(s for _, s in slacks)
        return margin > 0.0, margin


def in_domain(L: int, sigma, p: ParamSet, t, ctx: QContext) -> tuple[bool, float]:
    """Strict membership test for the solution family's sector; the margin is
    the smallest slack (negative when outside)."""
    spec = DomainSpec(L=L, sigma=tuple(int(v) for v in sigma))
    return spec.check(p, t, ctx)


@dataclass(frozen=True)
class CharExponent:
    """Leading power vector of one solution component at the sector center."""

    component: object
    delta: tuple[complex, ...]


def char_exponents(p: ParamSet, L: int) -> tuple[CharExponent, ...]:
    """Leading exponent vectors, identity slot ordering, component order as in
    build_solution_vector."""
    M = p.M
    _require_range("L", L, 0, M)
    out = [
        CharExponent(0, tuple([0.0 + 0j] * L + [-bv for bv in p.beta[L:]]))
    ]
    for k in range(1, p.N + 1):
        for l in range(1, M + 1):
            tail = sum(p.beta[l:])
            if l <= L:
                lead = 1.0 + tail - p.gamma[k - 1]
            else:
                lead = -p.alpha[k - 1] + tail
            delta = [0.0 + 0j] * (l - 1) + [lead] + [-bv for bv in p.beta[l:]]
            out.append(CharExponent((k, l), tuple(delta)))
    return tuple(out)


@dataclass(frozen=True)
class ResonanceReport:
    """Lattice degeneracies among parameter ratios for a slot ordering.

    Each violation records (description, offending value, lattice exponent).
    """

    sigma: tuple[int, ...]
    violations: tuple[tuple[str, complex, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_resonance(p: ParamSet, sigma) -> ResonanceReport:
    """Scan the ratios that the solution theory requires off the q-power
    lattice: upper/upper, coupling/coupling, and each upper or coupling value
    against every suffix product of the reordered b-family (empty suffix
    included)."""
    sigma = tuple(int(v) for v in sigma)
    bb = permute_seq(p.b, sigma)
    q = p.q
    bad: list[tuple[str, complex, int]] = []

    def scan(label: str, value: complex) -> None:
        k = lattice_hit(value, q)
        if k is not None:
            bad.append((label, value, k))

    for j in range(p.N):
        for k in range(p.N):
            if j != k:
                scan(f"a_{j + 1}/a_{k + 1}", p.a[j] / p.a[k])
                scan(f"c_{j + 1}/c_{k + 1}", p.c[j] / p.c[k])
    suffix = 1.0 + 0j
    suffixes = [(len(bb) + 1, suffix)]
    for i in range(len(bb), 0, -1):
        suffix = suffix * bb[i - 1]
        suffixes.append((i, suffix))
    for i, prod in suffixes:
        for j in range(p.N):
            scan(f"a_{j + 1}/suffix({i})", p.a[j] / prod)
            scan(f"c_{j + 1}/suffix({i})", p.c[j] / prod)
    return ResonanceReport(sigma=sigma, violations=tuple(bad))
