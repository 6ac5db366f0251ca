"""Elliptic face weights: braid identity, conjugacy, gauge, path basis."""

import math

import numpy as np
import pytest

from qconnect import (
    DomainError,
    ParamSet,
    PoleError,
    akm_P,
    akm_ybe_residual,
    bracket,
    build_S,
    build_Stilde,
    build_W_akm,
    build_Wprime,
    build_Wtilde,
    conj_f,
    perm_compose,
    perm_identity,
    perm_transposition,
    wprime_gauge_residual,
    wprime_path_ybe_residual,
    ybe_residual,
)
from conftest import ALPHA, GAMMA, Q

AL_W = 0.47 + 0.13j
BE_W = 0.31 - 0.09j
U_W = 0.7 + 0.3j
V_W = 0.9 - 0.25j


def test_bracket_against_trig_product(ctx):
    # odd Jacobi theta as the classical sine-times-product formula
    u = 0.37
    prod = 1.0
    for k in range(1, 201):
        prod *= (1 - 2 * Q**k * math.cos(2 * u) + Q ** (2 * k)) * (1 - Q**k)
    ref = 2 * Q**0.125 * math.sin(u) * prod
    got = bracket(np.exp(2j * u), ctx)
    assert abs(got - ref) < 1e-10 * abs(ref)


def test_bracket_symmetries(ctx):
    assert bracket(1.0, ctx) == 0.0
    x = 0.83 + 0.21j
    assert abs(bracket(1 / x, ctx) + bracket(x, ctx)) < 1e-12 * abs(bracket(x, ctx))
    with pytest.raises(DomainError):
        bracket(0.0, ctx)


def test_swap_weight_matches_ratio_form(p13, ctx):
    t3 = (0.45 + 0.05j, 0.4 - 0.03j, 0.35 + 0.02j)
    ident = perm_identity(3)
    S = build_S(p13, 1, ident, t3, ctx)
    St = build_Stilde(p13, 1, ident, t3[0] / t3[1], ctx)
    assert np.abs(S.entries - St.entries).max() < 1e-14


def test_swap_weight_validation(p13, ctx):
    ident = perm_identity(3)
    with pytest.raises(IndexError):
        build_Stilde(p13, 0, ident, 0.9, ctx)
    with pytest.raises(IndexError):
        build_Stilde(p13, 3, ident, 0.9, ctx)
    with pytest.raises(DomainError):
        build_Stilde(p13, 1, ident, 0.0, ctx)


def test_braid_identity(p13, ctx):
    assert ybe_residual(p13, 1, 0.9 + 0.2j, 1.1 - 0.15j, ctx) < 1e-12
    with pytest.raises(IndexError):
        ybe_residual(p13, 0, 0.9, 1.1, ctx)
    with pytest.raises(IndexError):
        ybe_residual(p13, 2, 0.9, 1.1, ctx)


def test_braid_identity_equal_exponents(ctx):
    bc = 0.41 - 0.06j
    p_eq = ParamSet(alpha=ALPHA[:1], beta=(bc, bc, bc), gamma=GAMMA[:1], q=Q)
    assert ybe_residual(p_eq, 1, 0.9 + 0.2j, 1.1 - 0.15j, ctx) < 1e-12


def _six_factor_residual(factors):
    lhs = factors[0] @ factors[1] @ factors[2]
    rhs = factors[3] @ factors[4] @ factors[5]
    scale = max(np.abs(lhs).max(), np.abs(rhs).max())
    return float(np.abs(lhs - rhs).max() / scale)


def test_braid_identity_is_sharp(p13, ctx):
    # the identity must break when one factor is nudged, and must not
    # depend on the overall normalization of the weights
    u, v = 0.9 + 0.2j, 1.1 - 0.15j
    ident = perm_identity(3)
    s1 = perm_transposition(3, 1)
    s2 = perm_transposition(3, 2)
    factors = [
        build_Stilde(p13, 1, perm_compose(s1, s2), u, ctx).entries,
        build_Stilde(p13, 2, s1, u * v, ctx).entries,
        build_Stilde(p13, 1, ident, v, ctx).entries,
        build_Stilde(p13, 2, perm_compose(s2, s1), v, ctx).entries,
        build_Stilde(p13, 1, s2, u * v, ctx).entries,
        build_Stilde(p13, 2, ident, u, ctx).entries,
    ]
    base = _six_factor_residual(factors)
    assert base < 1e-12

    nudged = [m.copy() for m in factors]
    nudged[0][1, 1] += 1e-3 * np.abs(nudged[0]).max()
    assert _six_factor_residual(nudged) > 1e-5

    lam = 2.3 - 0.7j
    scaled = [lam * m for m in factors]
    assert abs(_six_factor_residual(scaled) - base) < 1e-12


def test_two_state_weight_conjugacy(ctx):
    W = build_W_akm(AL_W, BE_W, U_W, ctx).as_array()
    Wt = build_Wtilde(AL_W, BE_W, U_W, ctx).as_array()
    f = conj_f(AL_W, BE_W, ctx)
    A = np.diag([1.0 + 0j, f])
    B = np.diag([f, 1.0 + 0j])
    scale = np.abs(W).max()
    assert np.abs(np.linalg.inv(A) @ Wt @ A - W).max() < 1e-12 * scale
    assert np.abs(B @ Wt @ np.linalg.inv(B) - W).max() < 1e-12 * scale
    # the conjugation is not vacuous: the two weights differ outright
    assert np.abs(Wt - W).max() > 1e-3 * scale


def test_two_state_weight_pole(ctx):
    u_pole = ctx.qpow(BE_W) * Q
    with pytest.raises(PoleError):
        build_W_akm(AL_W, BE_W, u_pole, ctx)


def test_face_weight_container(ctx):
    W = build_W_akm(AL_W, BE_W, U_W, ctx)
    arr = W.as_array()
    assert arr.shape == (2, 2)
    assert arr[0, 0] == W.e11 and arr[0, 1] == W.e12
    assert arr[1, 0] == W.e21 and arr[1, 1] == W.e22


def test_chain_embedding_and_braid(ctx):
    # site operator is the two-state weight with a shifted first exponent
    P = akm_P(AL_W, BE_W, 3, 2, U_W, ctx)
    W = build_W_akm(AL_W - BE_W, BE_W, U_W, ctx).as_array()
    manual = np.eye(3, dtype=complex)
    manual[1:3, 1:3] = W
    assert np.abs(P - manual).max() < 1e-14 * max(np.abs(W).max(), 1.0)

    assert akm_ybe_residual(AL_W, BE_W, 3, 1, U_W, V_W, ctx) < 1e-12
    assert akm_ybe_residual(AL_W, BE_W, 4, 2, U_W, V_W, ctx) < 1e-12

    with pytest.raises(IndexError):
        akm_P(AL_W, BE_W, 1, 1, U_W, ctx)
    with pytest.raises(IndexError):
        akm_P(AL_W, BE_W, 3, 3, U_W, ctx)
    with pytest.raises(IndexError):
        akm_ybe_residual(AL_W, BE_W, 3, 2, U_W, V_W, ctx)


def test_chain_embedding_shift_direction_matters(ctx):
    # shifting the exponent up the chain instead of down breaks the braid
    def site(i, uv):
        W = build_W_akm(AL_W + (i - 1) * BE_W, BE_W, uv, ctx)
        P = np.eye(3, dtype=complex)
        P[i - 1 : i + 1, i - 1 : i + 1] = W.as_array()
        return P

    lhs = site(1, U_W) @ site(2, U_W * V_W) @ site(1, V_W)
    rhs = site(2, V_W) @ site(1, U_W * V_W) @ site(2, U_W)
    scale = max(np.abs(lhs).max(), np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() / scale > 1e-2


def test_quotient_weight_basics(ctx):
    a0 = ctx.qpow(-AL_W - 2 * BE_W)
    unit = ctx.qpow(BE_W + 1)
    Wp = build_Wprime(a0, 1.0, unit, ctx).as_array()
    assert np.abs(Wp - np.eye(2)).max() < 1e-12
    with pytest.raises(PoleError):
        build_Wprime(1.0, U_W, unit, ctx)


def test_quotient_weight_path_braid(ctx):
    a0 = ctx.qpow(-AL_W - 2 * BE_W)
    unit = ctx.qpow(BE_W + 1)
    assert wprime_path_ybe_residual(a0, unit, 3, 1, U_W, V_W, ctx) < 1e-12
    assert (
        wprime_path_ybe_residual(a0, unit, 4, 2, 1.2 + 0.2j, 0.8 - 0.15j, ctx)
        < 1e-12
    )
    with pytest.raises(IndexError):
        wprime_path_ybe_residual(a0, unit, 1, 1, U_W, V_W, ctx)
    with pytest.raises(IndexError):
        wprime_path_ybe_residual(a0, unit, 3, 2, U_W, V_W, ctx)


def test_quotient_weight_needs_path_bookkeeping(ctx):
    # a flat tensor-product embedding of the same 2x2 weight fails the
    # braid identity; only the height-path basis carries it
    a0 = ctx.qpow(-AL_W - 2 * BE_W)
    unit = ctx.qpow(BE_W + 1)

    def flat_site(site, xval):
        Wp = build_Wprime(a0 * (1 / unit) ** (site - 1), xval, unit, ctx).as_array()
        cross = bracket(xval * unit, ctx) / bracket(unit, ctx)
        blk = np.array(
            [
                [cross, 0, 0, 0],
                [0, Wp[0, 0], Wp[0, 1], 0],
                [0, Wp[1, 0], Wp[1, 1], 0],
                [0, 0, 0, cross],
            ]
        )
        eye = np.eye(2, dtype=complex)
        return np.kron(blk, eye) if site == 1 else np.kron(eye, blk)

    lhs = flat_site(1, U_W) @ flat_site(2, U_W * V_W) @ flat_site(1, V_W)
    rhs = flat_site(2, V_W) @ flat_site(1, U_W * V_W) @ flat_site(2, U_W)
    scale = max(np.abs(lhs).max(), np.abs(rhs).max())
    assert np.abs(lhs - rhs).max() / scale > 1e-2


def test_gauge_identity(ctx):
    x = 0.64 + 0.18j
    assert wprime_gauge_residual(AL_W, BE_W, x, ctx) < 1e-12
    explicit = wprime_gauge_residual(
        AL_W, BE_W, x, ctx, twist=ctx.qpow((BE_W + 1) / 2)
    )
    balanced = wprime_gauge_residual(AL_W, BE_W, x, ctx)
    assert explicit == pytest.approx(balanced, rel=1e-10, abs=1e-15)
    # an untwisted comparison misses by an order-one margin
    assert wprime_gauge_residual(AL_W, BE_W, x, ctx, twist=1.0) > 1e-3
    with pytest.raises(DomainError):
        wprime_gauge_residual(AL_W, BE_W, x, ctx, twist=0.0)
