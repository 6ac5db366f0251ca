"""Rejection samplers for generic parameters and evaluation points.

Sampling policy lives here, not in the numerical library: evaluators take
explicit values and raise on bad input, and these helpers produce inputs
that pass those checks with margin. Exponents are drawn from a fixed box
far from degenerations, parameter sets are screened against q-power
lattice hits for every ratio the solution theory divides by, and points
are built as geometric ladders that keep every series in its region even
after the operator shifts a residual check applies.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ResonanceError
from .qkernel import (
    ParamSet,
    QContext,
    lattice_hit,
    perm_compose,
    perm_transposition,
    permute_seq,
    theta,
)
from .hyperseries import in_domain

__all__ = [
    "EXPONENT_RE",
    "EXPONENT_IM",
    "draw_exponent",
    "strong_nonresonant",
    "sample_params",
    "sample_interior_point",
    "sample_domain_point",
    "sample_level_overlap",
    "sample_swap_overlap",
    "sample_family_overlap",
    "sample_watson",
    "sample_spectral",
    "SamplingError",
]

EXPONENT_RE = (0.1, 0.9)
EXPONENT_IM = (-0.2, 0.2)
_LATTICE_RANGE = 64
_PHASE = 0.6
_THETA_CLEAR = 1e-6


class SamplingError(RuntimeError):
    """A rejection sampler ran out of attempts."""


def draw_exponent(rng: np.random.Generator) -> complex:
    return complex(
        rng.uniform(*EXPONENT_RE),
        rng.uniform(*EXPONENT_IM),
    )


def _on_lattice(x: complex, q: complex) -> bool:
    return lattice_hit(x, q, -_LATTICE_RANGE, _LATTICE_RANGE) is not None


def strong_nonresonant(p: ParamSet) -> bool:
    """Check every ratio the solution bases divide by, over all slot
    orderings at once: pairwise a and c ratios, and a_j, c_k against the
    product of b over every subset of slots (suffix products of any
    ordering are subsets)."""
    q = p.q
    for j in range(p.N):
        for k in range(p.N):
            if j != k:
                if _on_lattice(p.a[j] / p.a[k], q):
                    return False
                if _on_lattice(p.c[j] / p.c[k], q):
                    return False
    M = p.M
    for mask in range(1 << M):
        prod = 1.0 + 0j
        for i in range(M):
            if mask & (1 << i):
                prod *= p.b[i]
        for j in range(p.N):
            if _on_lattice(p.a[j] / prod, q) or _on_lattice(p.c[j] / prod, q):
                return False
    return True


def sample_params(
    N: int,
    M: int,
    q: complex,
    rng: np.random.Generator,
    tries: int = 400,
    coupling_cap: float | None = None,
    min_b: float | None = None,
) -> ParamSet:
    """Generic parameter set from the exponent box, screened so no ratio
    used by the local bases or connection entries sits on the q-power
    lattice.

    coupling_cap and min_b restrict to sets whose sector boundaries leave
    room for overlap points with fast-converging series: the coupling
    constant q prod c/a below the cap and every |b| above the floor. Used
    by the suites that evaluate two solution families at one point."""
    for _ in range(tries):
        try:
            p = ParamSet(
                alpha=tuple(draw_exponent(rng) for _ in range(N)),
                beta=tuple(draw_exponent(rng) for _ in range(M)),
                gamma=tuple(draw_exponent(rng) for _ in range(N)),
                q=q,
            )
        except ResonanceError:
            continue
        if coupling_cap is not None and _coupling_floor(p) > coupling_cap:
            continue
        if min_b is not None and min(abs(b) for b in p.b) < min_b:
            continue
        if strong_nonresonant(p):
            return p
    raise SamplingError(f"no nonresonant parameters in {tries} draws")


def _polar(rng: np.random.Generator, modulus: float) -> complex:
    phase = rng.uniform(-_PHASE, _PHASE)
    return modulus * complex(math.cos(phase), math.sin(phase))


def sample_interior_point(
    M: int, rng: np.random.Generator, lo: float = 0.2, hi: float = 0.55
) -> tuple[complex, ...]:
    """Point with every coordinate well inside the unit disc; shifts by
    positive q-powers only shrink it, so no extra margin is needed."""
    return tuple(_polar(rng, rng.uniform(lo, hi)) for _ in range(M))


def _coupling_floor(p: ParamSet) -> float:
    """Modulus of the two-sided coupling constant q prod_j c_j / a_j."""
    return abs(p.q) * math.prod(
        (abs(c / a) for a, c in zip(p.a, p.c)), start=1.0
    )


def _shift_points(t, q, N, M):
    """All points the operator residual checks evaluate at: uniform shifts
    by q^p (p <= N) with at most one extra single-coordinate shift, and the
    single/double single-coordinate shifts of the pairwise check."""
    pts = []
    for pw in range(N + 1):
        base = tuple(x * q**pw for x in t)
        pts.append(base)
        for s in range(M):
            pts.append(tuple(x * q if i == s else x for i, x in enumerate(base)))
    for r in range(M):
        for s in range(r + 1, M):
            pts.append(
                tuple(x * q if i in (r, s) else x for i, x in enumerate(t))
            )
    return pts


def sample_domain_point(
    p: ParamSet,
    L: int,
    sigma,
    ctx: QContext,
    rng: np.random.Generator,
    tries: int = 100,
    margin: float = 0.02,
) -> tuple[complex, ...]:
    """Geometric ladder inside the convergence sector of the (L, sigma)
    family, placed so the whole shift set of the operator residual checks
    stays inside with margin. Small coordinates descend by a fixed ratio;
    large ones start above the coupling floor inflated by the worst
    uniform shift and spread by a ratio that dominates the pair bounds."""
    M = p.M
    N = p.N
    sigma = tuple(int(v) for v in sigma)
    bp = permute_seq(p.b, sigma)
    Cq = _coupling_floor(p)
    aq = abs(p.q)
    for _ in range(tries):
        s_ratio = rng.uniform(0.25, 0.35)
        s_top = rng.uniform(0.25, 0.45)
        mods = [0.0] * M
        for i in range(L - 1, -1, -1):
            mods[i] = s_top * s_ratio ** (L - 1 - i)
        big_prev = 0.0
        for i in range(L, M):
            floor_i = Cq / abs(bp[i]) * aq ** -(N + 1) / 0.9
            b_ratio = 3.6 / abs(bp[i]) * rng.uniform(1.0, 1.3)
            base = max(floor_i, big_prev * b_ratio)
            mods[i] = base * rng.uniform(1.0, 1.15)
            big_prev = mods[i]
        tt_perm = [_polar(rng, m) for m in mods]
        inv = [0] * M
        for pos, coord in enumerate(sigma):
            inv[coord - 1] = pos
        t = tuple(tt_perm[inv[i]] for i in range(M))
        ok = True
        for pt in _shift_points(t, p.q, N, M):
            good, m = in_domain(L, sigma, p, pt, ctx)
            if not good or m < margin:
                ok = False
                break
        if ok:
            return t
    raise SamplingError(f"no ladder point found for level {L}, sigma {sigma}")


def _annulus_mid(lo: float, hi: float, rng: np.random.Generator) -> float:
    mid = math.sqrt(lo * hi)
    return mid * rng.uniform(0.9, 1.1)


def sample_level_overlap(
    p: ParamSet,
    L: int,
    sigma,
    ctx: QContext,
    rng: np.random.Generator,
    tries: int = 100,
    margin: float = 0.03,
) -> tuple[complex, ...]:
    """Point inside both the (L, sigma) and (L+1, sigma) sectors: the
    coordinate that changes roles sits near the log-midpoint of its
    annulus (balancing the two series' convergence rates), smaller slots
    ladder below it, larger ones ladder above the coupling floor."""
    M, N = p.M, p.N
    if not 0 <= L <= M - 1:
        raise IndexError(f"level {L} outside [0, {M - 1}]")
    sigma = tuple(int(v) for v in sigma)
    bp = permute_seq(p.b, sigma)
    Cq = _coupling_floor(p)
    for _ in range(tries):
        mods = [0.0] * M
        lo = Cq / abs(bp[L])
        mods[L] = min(max(_annulus_mid(lo, 1.0, rng), 1.12 * lo), 0.62)
        s_ratio = rng.uniform(0.25, 0.35)
        for i in range(L - 1, -1, -1):
            mods[i] = mods[i + 1] * s_ratio
        big_prev = mods[L]
        for i in range(L + 1, M):
            floor_i = Cq / abs(bp[i]) / 0.9
            b_ratio = 3.6 / abs(bp[i]) * rng.uniform(1.0, 1.3)
            mods[i] = max(floor_i, big_prev * b_ratio) * rng.uniform(1.0, 1.15)
            big_prev = mods[i]
        tt_perm = [_polar(rng, m) for m in mods]
        inv = [0] * M
        for pos, coord in enumerate(sigma):
            inv[coord - 1] = pos
        t = tuple(tt_perm[inv[i]] for i in range(M))
        ok_a, m_a = in_domain(L, sigma, p, t, ctx)
        ok_b, m_b = in_domain(L + 1, sigma, p, t, ctx)
        if ok_a and ok_b and min(m_a, m_b) >= margin:
            return t
    raise SamplingError(f"no overlap point for levels {L}/{L + 1}, sigma {sigma}")


def sample_swap_overlap(
    p: ParamSet,
    r: int,
    sigma,
    ctx: QContext,
    rng: np.random.Generator,
    tries: int = 100,
    margin: float = 0.03,
) -> tuple[complex, ...]:
    """Point inside the fully split sectors of both sigma and sigma o s_r:
    all coordinates small, with the swapped pair's ratio near the
    log-midpoint of the annulus both orderings allow."""
    M = p.M
    if not 1 <= r <= M - 1:
        raise IndexError(f"swap position {r} outside [1, {M - 1}]")
    sigma = tuple(int(v) for v in sigma)
    swapped = perm_compose(sigma, perm_transposition(M, r))
    bp = permute_seq(p.b, sigma)
    aq = abs(p.q)
    for _ in range(tries):
        mods = [rng.uniform(0.3, 0.5) for _ in range(M)]
        for i in range(1, M):
            mods[i] = min(mods[i], mods[i - 1] * rng.uniform(0.9, 1.1))
        ratio = _annulus_mid(aq / abs(bp[r - 1]), abs(bp[r]) / aq, rng)
        mods[r - 1] = mods[r] * ratio
        if mods[r - 1] >= 0.62:
            scale = 0.62 / mods[r - 1]
            mods = [m * scale for m in mods]
        tt_perm = [_polar(rng, m) for m in mods]
        inv = [0] * M
        for pos, coord in enumerate(sigma):
            inv[coord - 1] = pos
        t = tuple(tt_perm[inv[i]] for i in range(M))
        ok_a, m_a = in_domain(M, sigma, p, t, ctx)
        ok_b, m_b = in_domain(M, swapped, p, t, ctx)
        if ok_a and ok_b and min(m_a, m_b) >= margin:
            return t
    raise SamplingError(f"no swap overlap point at position {r}, sigma {sigma}")


def sample_family_overlap(
    p: ParamSet,
    fam1: tuple[int, tuple[int, ...]],
    fam2: tuple[int, tuple[int, ...]],
    ctx: QContext,
    rng: np.random.Generator,
    tries: int = 500,
    margin: float = 0.03,
) -> tuple[complex, ...]:
    """Point inside the sectors of two arbitrary families, by rejection
    from per-coordinate annuli balanced against the coupling floor. Works
    when both families keep every coordinate near the unit circle's
    inside (all levels close to M)."""
    M = p.M
    L1, s1 = fam1
    L2, s2 = fam2
    s1 = tuple(int(v) for v in s1)
    s2 = tuple(int(v) for v in s2)
    Cq = _coupling_floor(p)
    for _ in range(tries):
        t = []
        for i in range(M):
            lo = max(math.sqrt(Cq / abs(p.b[i])), 0.35)
            t.append(_polar(rng, rng.uniform(lo, 0.62) if lo < 0.62 else lo))
        t = tuple(t)
        ok_a, m_a = in_domain(L1, s1, p, t, ctx)
        ok_b, m_b = in_domain(L2, s2, p, t, ctx)
        if ok_a and ok_b and min(m_a, m_b) >= margin:
            return t
    raise SamplingError(f"no overlap point for families {fam1} and {fam2}")


def sample_watson(
    N: int, q: complex, rng: np.random.Generator, tries: int = 200
) -> tuple[tuple[complex, ...], tuple[complex, ...], complex]:
    """Upper/lower q-power parameters and an argument for the one-variable
    connection check. The lower exponents' real parts are kept ahead of
    the uppers' so the swapped-side argument stays small, and |t| balances
    the two expansion rates; theta denominators are kept clear of zeros."""
    ctx_probe = QContext(q=q)
    for _ in range(tries):
        alphas = [draw_exponent(rng) for _ in range(N + 1)]
        gammas = [draw_exponent(rng) for _ in range(N)]
        spread = sum(g.real for g in gammas) - sum(a.real for a in alphas[:-1])
        if spread < 0.1:
            continue
        ups = tuple(ctx_probe.qpow(a) for a in alphas)
        los = tuple(ctx_probe.qpow(g) for g in gammas)
        bad = False
        for j in range(N + 1):
            for k in range(N + 1):
                if j != k and _on_lattice(ups[j] / ups[k], q):
                    bad = True
        if bad:
            continue
        K = q * math.prod(los, start=1.0 + 0j) / math.prod(ups, start=1.0 + 0j)
        if abs(K) >= 0.3:
            continue
        tmod = min(max(math.sqrt(abs(K)), 0.3), 0.6)
        phase = rng.uniform(0, 2 * math.pi)
        t = tmod * complex(math.cos(phase), math.sin(phase))
        if abs(theta(t, ctx_probe)) < _THETA_CLEAR:
            continue
        if any(abs(theta(t * ak, ctx_probe)) < _THETA_CLEAR for ak in ups):
            continue
        return ups, los, t
    raise SamplingError(f"no balanced argument in {tries} draws")


def sample_spectral(
    rng: np.random.Generator, lo: float = 0.55, hi: float = 1.8
) -> complex:
    """Spectral argument in an annulus around the unit circle. The phase is
    kept small so products of two draws stay on the principal branch; the
    braid identities involve non-integer powers and need arguments composed
    without winding."""
    mod = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    return _polar(rng, mod)
