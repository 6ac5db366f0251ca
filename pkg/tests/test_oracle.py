"""Independent residual checks: difference equations, classical limits,
duality, Casorati independence."""

import numpy as np
import pytest

from qconnect import (
    DomainError,
    ParamSet,
    QContext,
    ResonanceError,
    apply_factored_shift_operator,
    casorati_independence,
    check_duality,
    check_jackson,
    check_watson,
    cpow,
    eval_FNM,
    eval_FNM_reference,
    leading_exponents,
    local_solution,
    qpoch_inf,
    residual_eqn1,
    residual_eqn2,
)
from conftest import ALPHA, BETA, GAMMA, Q

TP = (0.3 + 0.02j, 0.25 - 0.03j)


def test_factored_operator_on_monomial(p22, ctx):
    delta = (0.41 - 0.07j, -0.23 + 0.13j)
    t = (0.37 + 0.02j, 0.52 - 0.03j)

    def mono(tt):
        return cpow(tt[0], delta[0]) * cpow(tt[1], delta[1])

    got = apply_factored_shift_operator(p22.a, mono, t, ctx)
    factor = np.prod([1 - aj * ctx.qpow(sum(delta)) for aj in p22.a])
    want = factor * mono(t)
    assert abs(got - want) < 1e-13 * abs(want)


def test_equation_residuals_on_true_series(p12, ctx_long):
    f = lambda tt: eval_FNM(p12, tt, ctx_long).value
    assert residual_eqn1(f, p12, 1, TP, ctx_long) < 1e-10
    assert residual_eqn1(f, p12, 2, TP, ctx_long) < 1e-10
    assert residual_eqn2(f, p12, 1, 2, TP, ctx_long) < 1e-10


def test_equation_residual_scale_invariance(p12, ctx_long):
    f = lambda tt: eval_FNM(p12, tt, ctx_long).value
    g = lambda tt: 5.7 * f(tt)
    r_f = residual_eqn1(f, p12, 1, TP, ctx_long)
    r_g = residual_eqn1(g, p12, 1, TP, ctx_long)
    assert abs(r_f - r_g) < 1e-12


def test_equation_rejects_constant_function(p12, ctx_long):
    one = lambda tt: 1.0 + 0j
    assert residual_eqn1(one, p12, 1, (0.3, 0.25), ctx_long) > 1e-3


def test_pairwise_equation_antisymmetric_in_slots(p22, ctx_long):
    # a generic non-solution must score the same residual either way round
    f = lambda tt: 1.0 + 2.0 * tt[0] + 0.7 * tt[1] ** 2
    t = (0.31 + 0.04j, 0.27 - 0.05j)
    r12 = residual_eqn2(f, p22, 1, 2, t, ctx_long)
    r21 = residual_eqn2(f, p22, 2, 1, t, ctx_long)
    assert r12 > 1e-3
    assert r12 == pytest.approx(r21, rel=1e-10)


def test_equation_argument_validation(p12, ctx_long):
    f = lambda tt: 1.0 + 0j
    with pytest.raises(IndexError):
        residual_eqn1(f, p12, 0, TP, ctx_long)
    with pytest.raises(IndexError):
        residual_eqn1(f, p12, 3, TP, ctx_long)
    with pytest.raises(ValueError):
        residual_eqn2(f, p12, 2, 2, TP, ctx_long)


def test_reference_evaluator_agrees_with_fast_path(p12, ctx_long):
    ref = eval_FNM_reference(p12, TP, ctx_long)
    fast = eval_FNM(p12, TP, ctx_long).value
    assert abs(ref - fast) < 1e-13 * abs(fast)
    assert abs(ref - (1.277904030325 + 0.087706644683j)) < 1e-9


def test_duality_single_slot(p11, ctx_long):
    rep = check_duality(p11, (0.4,), ctx_long)
    assert rep.residual < 1e-10
    assert abs(rep.lhs - rep.rhs) < 1e-10 * abs(rep.lhs)


def test_duality_roundtrip_swaps_roles(p23, ctx_long):
    # writing t = q^tau, the partner series swaps rows with slots; applying
    # the same rewrite to the partner lands back on the original data
    tau = (0.7 + 0.1j, 1.0 - 0.2j, 1.2 + 0.15j)
    t = tuple(ctx_long.qpow(tv) for tv in tau)
    rep = check_duality(p23, t, ctx_long)
    assert rep.residual < 1e-10

    p_dual = ParamSet(
        alpha=tau,
        beta=tuple(g - a for a, g in zip(p23.alpha, p23.gamma)),
        gamma=tuple(b + tv for b, tv in zip(p23.beta, tau)),
        q=Q,
    )
    assert p_dual.N == 3 and p_dual.M == 2
    rep_back = check_duality(p_dual, p23.a, ctx_long)
    assert rep_back.residual < 1e-10

    pref = np.prod(
        [qpoch_inf(a, ctx_long) / qpoch_inf(c, ctx_long) for a, c in zip(p23.a, p23.c)]
    ) * np.prod(
        [
            qpoch_inf(b * tv, ctx_long) / qpoch_inf(tv, ctx_long)
            for b, tv in zip(p23.b, t)
        ]
    )
    lhs = eval_FNM(p23, t, ctx_long).value
    rhs = eval_FNM(p_dual, p23.a, ctx_long).value
    assert abs(lhs - pref * rhs) < 1e-10 * abs(lhs)


def test_duality_validation(p12, ctx_long):
    with pytest.raises(ValueError):
        check_duality(p12, (0.3,), ctx_long)
    with pytest.raises(DomainError):
        check_duality(p12, (0.3, 1.0), ctx_long)
    p_res = ParamSet(ALPHA[:1], (-0.5 + 0j, BETA[1]), GAMMA[:1], Q)
    with pytest.raises(ResonanceError):
        check_duality(p_res, (0.3**0.5, 0.2), ctx_long)


def test_jackson_sum(p11, ctx_long):
    assert check_jackson(p11, (0.0,), ctx_long).residual < 1e-12
    assert check_jackson(p11, (0.3,), ctx_long).residual < 1e-12


def test_jackson_sum_two_slots(p22, ctx_long):
    rng = np.random.default_rng(40)
    for _ in range(3):
        t = tuple(
            complex(rng.uniform(0.15, 0.4), rng.uniform(-0.05, 0.05))
            for _ in range(2)
        )
        assert check_jackson(p22, t, ctx_long).residual < 1e-10


def test_watson_transform_frozen():
    ctx35 = QContext(q=0.35, prod_terms=60, series_cap=200)
    ups = (ctx35.qpow(0.4), ctx35.qpow(0.25))
    los = (ctx35.qpow(1.2),)
    assert check_watson(ups, los, 0.45, ctx35).residual < 1e-12

    ups3 = tuple(ctx35.qpow(v) for v in (0.4, 0.25, 0.6))
    los3 = tuple(ctx35.qpow(v) for v in (1.2, 1.1))
    assert check_watson(ups3, los3, 0.341, ctx35).residual < 1e-12


def test_watson_validation():
    ctx35 = QContext(q=0.35, prod_terms=60, series_cap=200)
    ups = (ctx35.qpow(0.4), ctx35.qpow(0.25))
    los = (ctx35.qpow(1.2),)
    with pytest.raises(ValueError):
        check_watson(ups, (los[0], los[0]), 0.45, ctx35)
    with pytest.raises(DomainError):
        check_watson(ups, los, 1.0, ctx35)
    with pytest.raises(DomainError):
        # both sides converge only on an overlap strip; this t leaves it
        check_watson(ups, los, 0.05, ctx35)
    with pytest.raises(ResonanceError):
        check_watson((ups[0], ups[0] * 0.35**3), los, 0.45, ctx35)


def test_casorati_pair(p11, ctx_long):
    funcs = [
        lambda tt, c=c: local_solution(p11, 1, (1,), c, tt, ctx_long)
        for c in (0, (1, 1))
    ]
    rep = casorati_independence(funcs, (1,), (0.4,), ctx_long)
    assert abs(rep.det) == pytest.approx(0.2140864, abs=1e-6)
    assert rep.matrix.shape == (2, 2)
    assert rep.shift == (1,)

    swapped = casorati_independence(funcs[::-1], (1,), (0.4,), ctx_long)
    assert abs(rep.det + swapped.det) < 1e-12

    repeated = casorati_independence([funcs[0], funcs[0]], (1,), (0.4,), ctx_long)
    assert abs(repeated.det) < 1e-12


def test_casorati_validation(p11, ctx_long):
    f = lambda tt: 1.0 + 0j
    with pytest.raises(ValueError):
        casorati_independence([], (1,), (0.4,), ctx_long)
    with pytest.raises(ValueError):
        casorati_independence([f], (1, 2), (0.4,), ctx_long)


def test_leading_exponent_extraction(p11, ctx_long):
    fn = lambda tt: local_solution(p11, 1, (1,), (1, 1), tt, ctx_long)
    ext = leading_exponents(fn, 1, 1, ctx_long)
    assert abs(ext[0] - (1 - GAMMA[0])) < 1e-3
