"""Command-line front end: configured verification runs and one-off
evaluations.

The library takes explicit values and raises on bad input; this module owns
run configuration, sampling policy (via the sampling helpers), per-check
error capture, and report emission. Reports are deterministic for a fixed
config and seed: record timings are zeroed at emission unless measured
output is requested explicitly.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, QConnectError
from .qkernel import (
    ParamSet,
    QContext,
    perm_compose,
    perm_identity,
    perm_transposition,
)
from .hyperseries import (
    build_solution_vector,
    char_exponents,
    component_order,
    eval_FNM,
    eval_FNM_L,
    eval_FNM_Lkl,
    eval_GNM_Lkl,
    eval_nphi,
    local_solution,
)
from .oracle import (
    casorati_independence,
    check_duality,
    check_jackson,
    check_watson,
    eval_FNM_reference,
    residual_eqn1,
    residual_eqn2,
)
from .connection import (
    build_A,
    build_B,
    build_S,
    compose_connection,
    verify_connection,
)
from .facemodel import (
    build_W_akm,
    build_Wtilde,
    conj_f,
    wprime_gauge_residual,
    ybe_residual,
)
from . import sampling
from .sampling import SamplingError

SUITES = (
    "series",
    "system",
    "duality",
    "jackson",
    "watson",
    "connection",
    "theorem1",
    "independence",
    "ybe",
    "facemodel",
)

DEFAULT_TOL = {
    "series": 1e-10,
    "system": 1e-9,
    "duality": 1e-10,
    "jackson": 1e-9,
    "watson": 1e-9,
    "connection": 1e-7,
    "theorem1": 1e-6,
    "independence": 1e-6,
    "ybe": 1e-9,
    "facemodel": 1e-9,
}

_BUDGET = 12
_RETRIES = 8


@dataclass(frozen=True)
class RunConfig:
    q: complex = 0.3
    N: int = 2
    M: int = 2
    suites: tuple[str, ...] = SUITES
    samples: int = 8
    seed: int = 0
    tail_tol: float | None = None
    cmp_tol: float | None = None
    output: str | None = None

    def validate(self) -> None:
        if not self.suites:
            raise ConfigError("suites must be nonempty")
        unknown = [s for s in self.suites if s not in SUITES]
        if unknown:
            raise ConfigError(f"unknown suites: {unknown}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if self.N < 1 or self.M < 1:
            raise ConfigError(f"need N, M >= 1, got ({self.N}, {self.M})")
        if self.N * self.M > _BUDGET:
            raise ConfigError(
                f"N*M = {self.N * self.M} exceeds the compute budget {_BUDGET}"
            )
        if not 0.0 < abs(complex(self.q)) < 1.0:
            raise ConfigError(f"need 0 < |q| < 1, got |q| = {abs(complex(self.q))}")

    def tol(self, suite: str) -> float:
        if self.cmp_tol is not None:
            return self.cmp_tol
        return DEFAULT_TOL[suite]

    def context(self) -> QContext:
        kw = {"q": complex(self.q), "series_cap": 200, "seed": self.seed}
        if self.tail_tol is not None:
            kw["tail_tol"] = self.tail_tol
        if self.cmp_tol is not None:
            kw["cmp_tol"] = self.cmp_tol
        return QContext(**kw)

    def as_dict(self) -> dict:
        return {
            "q": _cplx_out(complex(self.q)),
            "N": self.N,
            "M": self.M,
            "suites": list(self.suites),
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {
                "tail_tol": self.tail_tol,
                "cmp_tol": self.cmp_tol,
            },
            "output": self.output,
        }


def config_from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {"q", "N", "M", "suites", "samples", "seed", "tolerances", "output"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")
    kw: dict = {}
    if "q" in raw:
        kw["q"] = _cplx_in(raw["q"])
    for key in ("N", "M", "samples", "seed"):
        if key in raw:
            kw[key] = int(raw[key])
    if "suites" in raw:
        suites = raw["suites"]
        if suites == "all":
            kw["suites"] = SUITES
        else:
            kw["suites"] = tuple(str(s) for s in suites)
    tols = raw.get("tolerances") or {}
    if "tail_tol" in tols and tols["tail_tol"] is not None:
        kw["tail_tol"] = float(tols["tail_tol"])
    if "cmp_tol" in tols and tols["cmp_tol"] is not None:
        kw["cmp_tol"] = float(tols["cmp_tol"])
    if raw.get("output") is not None:
        kw["output"] = str(raw["output"])
    cfg = RunConfig(**kw)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# report model


@dataclass(frozen=True)
class CheckRecord:
    """One sampled check: either a residual with a pass flag, or an error."""

    suite: str
    check: str
    digest: str
    point: tuple[complex, ...]
    residual: float | None
    passed: bool
    margin: float | None = None
    timing: float = 0.0
    error: str | None = None


@dataclass(frozen=True)
class Report:
    config: dict
    records: tuple[CheckRecord, ...]
    summary: dict

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


def _cplx_out(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _cplx_in(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def _record_key(r: CheckRecord):
    return (r.suite, r.check, r.digest, tuple((z.real, z.imag) for z in r.point))


def _summarize(records) -> dict:
    out: dict = {}
    for r in records:
        ent = out.setdefault(
            r.suite,
            {"checks": 0, "errors": 0, "max_residual": None, "pass": True},
        )
        ent["checks"] += 1
        if r.error is not None:
            ent["errors"] += 1
        if r.residual is not None:
            prev = ent["max_residual"]
            ent["max_residual"] = (
                r.residual if prev is None else max(prev, r.residual)
            )
        ent["pass"] = ent["pass"] and r.passed
    return out


def report_to_dict(rep: Report, with_timing: bool = False) -> dict:
    recs = []
    for r in rep.records:
        recs.append(
            {
                "suite": r.suite,
                "check": r.check,
                "digest": r.digest,
                "point": [_cplx_out(z) for z in r.point],
                "residual": r.residual,
                "pass": r.passed,
                "margin": r.margin,
                "timing": r.timing if with_timing else 0.0,
                "error": r.error,
            }
        )
    return {"config": rep.config, "records": recs, "summary": rep.summary}


def report_from_dict(raw: dict) -> Report:
    records = tuple(
        CheckRecord(
            suite=r["suite"],
            check=r["check"],
            digest=r["digest"],
            point=tuple(_cplx_in(z) for z in r["point"]),
            residual=r["residual"],
            passed=r["pass"],
            margin=r["margin"],
            timing=r["timing"],
            error=r["error"],
        )
        for r in raw["records"]
    )
    return Report(config=raw["config"], records=records, summary=raw["summary"])


def emit_report(
    rep: Report, format: str = "json", path: str | None = None,
    with_timing: bool = False,
) -> str:
    """Serialize the report; with a path, also write it there (OSError
    surfaces on an unwritable path)."""
    if format == "json":
        text = json.dumps(
            report_to_dict(rep, with_timing=with_timing),
            indent=2,
            sort_keys=True,
        )
    elif format == "table":
        text = _format_table(rep)
    else:
        raise ConfigError(f"unknown report format {format!r}")
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text


def _format_table(rep: Report) -> str:
    header = f"{'suite':<13}{'check':<24}{'digest':<14}{'residual':>12}  {'margin':>8}  status"
    lines = [header, "-" * len(header)]
    for r in rep.records:
        res = f"{r.residual:.3e}" if r.residual is not None else "-"
        mar = f"{r.margin:.3f}" if r.margin is not None else "-"
        status = "pass" if r.passed else "FAIL"
        if r.error is not None:
            status += f"  {r.error}"
        lines.append(
            f"{r.suite:<13}{r.check:<24}{r.digest:<14}{res:>12}  {mar:>8}  {status}"
        )
    lines.append("-" * len(header))
    for suite in sorted(rep.summary):
        ent = rep.summary[suite]
        res = (
            f"{ent['max_residual']:.3e}"
            if ent["max_residual"] is not None
            else "-"
        )
        lines.append(
            f"{suite:<13}{ent['checks']:>3} checks  max residual {res:>12}  "
            f"{'pass' if ent['pass'] else 'FAIL'}"
        )
    lines.append(f"overall: {'pass' if rep.passed else 'FAIL'}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# suite runners


def _digest(p: ParamSet) -> str:
    blob = json.dumps(
        {
            "alpha": [_cplx_out(v) for v in p.alpha],
            "beta": [_cplx_out(v) for v in p.beta],
            "gamma": [_cplx_out(v) for v in p.gamma],
            "q": _cplx_out(complex(p.q)),
        },
        sort_keys=True,
    )
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


def _run_check(records, cfg, suite, check, digest, point, fn, margin=None):
    """Execute one check; any library or sampling error becomes an explicit
    failing record instead of aborting the run."""
    start = time.perf_counter()
    try:
        residual = float(fn())
    except (QConnectError, SamplingError, ArithmeticError) as exc:
        records.append(
            CheckRecord(
                suite=suite,
                check=check,
                digest=digest,
                point=tuple(point),
                residual=None,
                passed=False,
                margin=margin,
                timing=time.perf_counter() - start,
                error=f"{type(exc).__name__}: {exc}",
            )
        )
        return
    records.append(
        CheckRecord(
            suite=suite,
            check=check,
            digest=digest,
            point=tuple(point),
            residual=residual,
            passed=residual < cfg.tol(suite),
            margin=margin,
            timing=time.perf_counter() - start,
        )
    )


def _suite_series(cfg, ctx, rng, records):
    for _ in range(cfg.samples):
        p = sampling.sample_params(cfg.N, cfg.M, ctx.q, rng)
        t = sampling.sample_interior_point(cfg.M, rng)

        def dual_route(p=p, t=t):
            lhs = eval_FNM(p, t, ctx).value
            rhs = eval_FNM_reference(p, t, ctx)
            return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)

        _run_check(records, cfg, "series", "two-route value", _digest(p), t, dual_route)


def _suite_system(cfg, ctx, rng, records):
    for _ in range(cfg.samples):
        p = sampling.sample_params(cfg.N, cfg.M, ctx.q, rng)
        t = sampling.sample_interior_point(cfg.M, rng)
        dg = _digest(p)
        f = lambda tt, p=p: eval_FNM(p, tt, ctx).value
        for s in range(1, cfg.M + 1):
            _run_check(
                records, cfg, "system", f"coupled slot {s}", dg, t,
                lambda s=s, p=p, t=t, f=f: residual_eqn1(f, p, s, t, ctx),
            )
        for r in range(1, cfg.M + 1):
            for s in range(r + 1, cfg.M + 1):
                _run_check(
                    records, cfg, "system", f"pairwise ({r},{s})", dg, t,
                    lambda r=r, s=s, p=p, t=t, f=f: residual_eqn2(f, p, r, s, t, ctx),
                )


def _suite_duality(cfg, ctx, rng, records):
    for _ in range(cfg.samples):
        p = sampling.sample_params(cfg.N, cfg.M, ctx.q, rng)
        t = sampling.sample_interior_point(cfg.M, rng)
        _run_check(
            records, cfg, "duality", "role swap", _digest(p), t,
            lambda p=p, t=t: check_duality(p, t, ctx).residual,
        )


def _suite_jackson(cfg, ctx, rng, records):
    for _ in range(cfg.samples):
        p = sampling.sample_params(cfg.N, cfg.M, ctx.q, rng)
        t = sampling.sample_interior_point(cfg.M, rng)
        _run_check(
            records, cfg, "jackson", "nested q-integral", _digest(p), t,
            lambda p=p, t=t: check_jackson(p, t, ctx).residual,
        )


def _suite_watson(cfg, ctx, rng, records):
    for _ in range(cfg.samples):
        try:
            upper, lower, t = sampling.sample_watson(cfg.N, ctx.q, rng)
        except SamplingError as exc:
            records.append(
                CheckRecord(
                    suite="watson", check="one-variable connection",
                    digest="-", point=(), residual=None, passed=False,
                    error=f"SamplingError: {exc}",
                )
            )
            continue
        dg = hashlib.sha1(
            json.dumps(
                [_cplx_out(v) for v in (*upper, *lower)]
            ).encode()
        ).hexdigest()[:12]
        _run_check(
            records, cfg, "watson", "one-variable connection", dg, (t,),
            lambda u=upper, l=lower, t=t: check_watson(u, l, t, ctx).residual,
        )


def _overlap_params(cfg, ctx, rng) -> ParamSet:
    return sampling.sample_params(
        cfg.N, cfg.M, ctx.q, rng, coupling_cap=0.16, min_b=0.5
    )


def _suite_connection(cfg, ctx, rng, records):
    sig = perm_identity(cfg.M)
    for _ in range(cfg.samples):
        p = _overlap_params(cfg, ctx, rng)
        dg = _digest(p)
        L = int(rng.integers(0, cfg.M))
        try:
            t = sampling.sample_level_overlap(p, L, sig, ctx, rng)
        except SamplingError as exc:
            records.append(
                CheckRecord(
                    suite="connection", check=f"split step L={L}", digest=dg,
                    point=(), residual=None, passed=False,
                    error=f"SamplingError: {exc}",
                )
            )
            continue

        def step_down(p=p, L=L, t=t):
            lo = build_solution_vector(p, L, sig, t, ctx)
            hi = build_solution_vector(p, L + 1, sig, t, ctx)
            A = build_A(p, L, sig, t, ctx)
            return verify_connection(lo, A, hi, ctx)

        def step_up(p=p, L=L, t=t):
            lo = build_solution_vector(p, L, sig, t, ctx)
            hi = build_solution_vector(p, L + 1, sig, t, ctx)
            B = build_B(p, L + 1, sig, t, ctx)
            return verify_connection(hi, B, lo, ctx)

        _run_check(records, cfg, "connection", f"split step L={L}", dg, t, step_down)
        _run_check(records, cfg, "connection", f"merge step L={L + 1}", dg, t, step_up)
        if cfg.M < 2:
            continue
        r = int(rng.integers(1, cfg.M))
        try:
            t2 = sampling.sample_swap_overlap(p, r, sig, ctx, rng)
        except SamplingError as exc:
            records.append(
                CheckRecord(
                    suite="connection", check=f"swap step r={r}", digest=dg,
                    point=(), residual=None, passed=False,
                    error=f"SamplingError: {exc}",
                )
            )
            continue

        def swap_step(p=p, r=r, t2=t2):
            sw = perm_compose(sig, perm_transposition(cfg.M, r))
            u_id = build_solution_vector(p, cfg.M, sig, t2, ctx)
            u_sw = build_solution_vector(p, cfg.M, sw, t2, ctx)
            S = build_S(p, r, sig, t2, ctx)
            return verify_connection(u_sw, S, u_id, ctx)

        _run_check(records, cfg, "connection", f"swap step r={r}", dg, t2, swap_step)


def _suite_theorem1(cfg, ctx, rng, records):
    if cfg.M < 2:
        # no swaps exist; exercise the composite machinery on the round trip
        sig = perm_identity(1)
        for _ in range(cfg.samples):
            p = _overlap_params(cfg, ctx, rng)
            dg = _digest(p)
            try:
                t = sampling.sample_level_overlap(p, 0, sig, ctx, rng)
            except SamplingError as exc:
                records.append(
                    CheckRecord(
                        suite="theorem1", check="round trip", digest=dg,
                        point=(), residual=None, passed=False,
                        error=f"SamplingError: {exc}",
                    )
                )
                continue

            def round_trip(p=p, t=t):
                C = compose_connection(p, 0, sig, 0, sig, t, ctx)
                u0 = build_solution_vector(p, 0, sig, t, ctx)
                return verify_connection(u0, C, u0, ctx)

            _run_check(records, cfg, "theorem1", "round trip", dg, t, round_trip)
        return
    sig1 = perm_identity(cfg.M)
    sig2 = perm_compose(sig1, perm_transposition(cfg.M, 1))
    L = cfg.M - 1
    for _ in range(cfg.samples):
        p = _overlap_params(cfg, ctx, rng)
        dg = _digest(p)
        try:
            t = sampling.sample_family_overlap(p, (L, sig1), (L, sig2), ctx, rng)
        except SamplingError as exc:
            records.append(
                CheckRecord(
                    suite="theorem1", check="composite path", digest=dg,
                    point=(), residual=None, passed=False,
                    error=f"SamplingError: {exc}",
                )
            )
            continue

        def composite(p=p, t=t):
            C = compose_connection(p, L, sig1, L, sig2, t, ctx)
            src = build_solution_vector(p, L, sig1, t, ctx)
            dst = build_solution_vector(p, L, sig2, t, ctx)
            return verify_connection(dst, C, src, ctx)

        def word_agreement(p=p, t=t):
            C1 = compose_connection(p, L, sig1, L, sig2, t, ctx, word=[1])
            C2 = compose_connection(p, L, sig1, L, sig2, t, ctx, word=[1, 1, 1])
            diff = float(np.abs(C1.entries - C2.entries).max())
            scale = float(max(np.abs(C1.entries).max(), np.abs(C2.entries).max()))
            return diff / scale

        _run_check(records, cfg, "theorem1", "composite path", dg, t, composite)
        _run_check(records, cfg, "theorem1", "word agreement", dg, t, word_agreement)


def _node_proxy(p: ParamSet, L: int, m, ctx: QContext) -> float:
    """Separation of the per-component shift multipliers q^{m . delta}: the
    scaled determinant tracks this Vandermonde-type product within a small
    factor, so it predicts conditioning without evaluating any series."""
    nodes = [
        ctx.qpow(sum(mm * d for mm, d in zip(m, ce.delta)))
        for ce in char_exponents(p, L)
    ]
    prod = 1.0
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            prod *= abs(nodes[i] - nodes[j])
    for x in nodes:
        prod /= max(1.0, abs(x)) ** (len(nodes) - 1)
    return prod


def _shift_candidates(M: int, n_rows: int, q: complex):
    """Uniform positive steps on the small slots, one negative step on the
    large slot. The large coordinate grows by |q|^{-b (n_rows - 1)} over the
    ladder; b is capped so prefactor magnitudes stay far from overflow."""
    bs = [b for b in (1, 2, 3) if abs(q) ** (-b * (n_rows - 1)) <= 1e5] or [1]
    if M == 1:
        return [(-b,) for b in bs]
    return [(a,) * (M - 1) + (-b,) for a in (1, 2, 3) for b in bs]


def _suite_independence(cfg, ctx, rng, records):
    sig = perm_identity(cfg.M)
    L = cfg.M - 1
    comps = component_order(cfg.N, cfg.M)
    n = len(comps)
    # per-pair separation 0.34 is comfortably generic; the floor is its
    # product over all node pairs
    proxy_floor = 0.34 ** (n * (n - 1) / 2)
    cands = _shift_candidates(cfg.M, n, ctx.q)
    for _ in range(cfg.samples):
        best_p, best_m, best_proxy = None, None, -1.0
        for _try in range(60):
            p = sampling.sample_params(cfg.N, cfg.M, ctx.q, rng)
            m = max(cands, key=lambda mm: _node_proxy(p, L, mm, ctx))
            prox = _node_proxy(p, L, m, ctx)
            if prox > best_proxy:
                best_p, best_m, best_proxy = p, m, prox
            if prox >= proxy_floor:
                break
        p, shift, prox = best_p, best_m, best_proxy
        dg = _digest(p)
        try:
            t = sampling.sample_domain_point(p, L, sig, ctx, rng)
        except SamplingError as exc:
            records.append(
                CheckRecord(
                    suite="independence", check="scaled determinant", digest=dg,
                    point=(), residual=None, passed=False,
                    error=f"SamplingError: {exc}",
                )
            )
            continue
        funcs = [
            (lambda tt, c=c: local_solution(p, L, sig, c, tt, ctx))
            for c in comps
        ]

        start = time.perf_counter()
        try:
            det = abs(casorati_independence(funcs, shift, t, ctx).det)
            # dependent column: a combination of columns that stay in the
            # matrix (only the first survives when n = 2)
            if n >= 3:
                forge_fn = lambda tt: 2.0 * funcs[0](tt) + 0.5 * funcs[1](tt)
            else:
                forge_fn = lambda tt: 2.0 * funcs[0](tt)
            forged = funcs[:-1] + [forge_fn]
            det_forged = abs(casorati_independence(forged, shift, t, ctx).det)
        except (QConnectError, ArithmeticError) as exc:
            records.append(
                CheckRecord(
                    suite="independence", check="scaled determinant", digest=dg,
                    point=t, residual=None, passed=False,
                    timing=time.perf_counter() - start,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
            continue
        elapsed = time.perf_counter() - start
        # the det scales with the node separation; for well-separated draws
        # this is at least the configured threshold
        threshold = min(cfg.tol("independence"), 0.05 * prox)
        records.append(
            CheckRecord(
                suite="independence", check="scaled determinant", digest=dg,
                point=t, residual=det, passed=det > threshold,
                margin=threshold, timing=elapsed,
            )
        )
        records.append(
            CheckRecord(
                suite="independence", check="forged dependence", digest=dg,
                point=t, residual=det_forged, passed=det_forged < 1e-10,
                timing=0.0,
            )
        )


def _suite_ybe(cfg, ctx, rng, records):
    M_eff = max(cfg.M, 3)
    r = 1
    for _ in range(cfg.samples):
        p = sampling.sample_params(cfg.N, M_eff, ctx.q, rng)
        u = sampling.sample_spectral(rng)
        v = sampling.sample_spectral(rng)
        _run_check(
            records, cfg, "ybe", f"braid move r={r}", _digest(p), (u, v),
            lambda p=p, u=u, v=v: ybe_residual(p, r, u, v, ctx),
        )


def _suite_facemodel(cfg, ctx, rng, records):
    for _ in range(cfg.samples):
        al = sampling.draw_exponent(rng)
        be = sampling.draw_exponent(rng)
        u = sampling.sample_spectral(rng, lo=0.6, hi=1.5)
        dg = hashlib.sha1(
            json.dumps([_cplx_out(al), _cplx_out(be)]).encode()
        ).hexdigest()[:12]

        def conjugacy(al=al, be=be, u=u):
            W = build_W_akm(al, be, u, ctx).as_array()
            Wt = build_Wtilde(al, be, u, ctx).as_array()
            f = conj_f(al, be, ctx)
            A = np.diag([1.0 + 0j, f])
            B = np.diag([f, 1.0 + 0j])
            scale = np.abs(W).max()
            d1 = np.abs(W - np.linalg.inv(A) @ Wt @ A).max()
            d2 = np.abs(W - B @ Wt @ np.linalg.inv(B)).max()
            return max(d1, d2) / scale

        _run_check(records, cfg, "facemodel", "weight conjugacy", dg, (u,), conjugacy)
        x = sampling.sample_spectral(rng, lo=0.6, hi=1.5)
        _run_check(
            records, cfg, "facemodel", "gauge transfer", dg, (x,),
            lambda al=al, be=be, x=x: wprime_gauge_residual(al, be, x, ctx),
        )


_RUNNERS = {
    "series": _suite_series,
    "system": _suite_system,
    "duality": _suite_duality,
    "jackson": _suite_jackson,
    "watson": _suite_watson,
    "connection": _suite_connection,
    "theorem1": _suite_theorem1,
    "independence": _suite_independence,
    "ybe": _suite_ybe,
    "facemodel": _suite_facemodel,
}


def run_suite(cfg: RunConfig) -> Report:
    """Execute every configured suite with seeded sampling; per-check errors
    become failing records, never exceptions."""
    cfg.validate()
    ctx = cfg.context()
    records: list[CheckRecord] = []
    for suite in SUITES:
        if suite not in cfg.suites:
            continue
        rng = np.random.default_rng([cfg.seed, SUITES.index(suite)])
        _RUNNERS[suite](cfg, ctx, rng, records)
    records.sort(key=_record_key)
    return Report(
        config=cfg.as_dict(),
        records=tuple(records),
        summary=_summarize(records),
    )


# ---------------------------------------------------------------------------
# one-off evaluation


def _parse_cplx_list(v) -> tuple[complex, ...]:
    return tuple(_cplx_in(x) for x in v)


def eval_spec(spec: dict) -> dict:
    """Evaluate one series from a JSON description. kind selects the family;
    parameters are exponents (alpha/beta/gamma) except for nphi, which takes
    upper/lower values directly."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("series spec must be a JSON object with a 'kind'")
    kind = spec["kind"]
    q = _cplx_in(spec.get("q", 0.3))
    ctx = QContext(q=q, series_cap=200)
    if kind == "nphi":
        upper = _parse_cplx_list(spec["upper"])
        lower = _parse_cplx_list(spec["lower"])
        t = _cplx_in(spec["t"])
        sv = eval_nphi(upper, lower, t, ctx)
        return {"kind": kind, "value": _cplx_out(sv.value), "terms": sv.terms_used}
    if kind not in ("FNM", "FNM_L", "FNM_Lkl", "GNM_Lkl"):
        raise ConfigError(f"unknown series kind {kind!r}")
    p = ParamSet(
        alpha=_parse_cplx_list(spec["alpha"]),
        beta=_parse_cplx_list(spec["beta"]),
        gamma=_parse_cplx_list(spec["gamma"]),
        q=q,
    )
    t = _parse_cplx_list(spec["t"])
    if kind == "FNM":
        sv = eval_FNM(p, t, ctx)
        return {"kind": kind, "value": _cplx_out(sv.value), "terms": sv.terms_used}
    if kind == "FNM_L":
        sv = eval_FNM_L(p, int(spec["L"]), t, ctx)
        return {"kind": kind, "value": _cplx_out(sv.value), "terms": sv.terms_used}
    fn = eval_FNM_Lkl if kind == "FNM_Lkl" else eval_GNM_Lkl
    sv = fn(p, int(spec["L"]), int(spec["k"]), int(spec["l"]), t, ctx)
    return {"kind": kind, "value": _cplx_out(sv.value), "terms": sv.terms_used}


def exponents_spec(
    N: int,
    M: int,
    L: int,
    alpha=None,
    beta=None,
    gamma=None,
    q: complex = 0.3,
    seed: int = 0,
) -> dict:
    """Leading exponent vectors for the level-L family; exponents are drawn
    from the generic sampler when not supplied."""
    if alpha is None or beta is None or gamma is None:
        rng = np.random.default_rng(seed)
        p = sampling.sample_params(N, M, q, rng)
    else:
        p = ParamSet(
            alpha=tuple(alpha), beta=tuple(beta), gamma=tuple(gamma), q=q
        )
    out = []
    for ce in char_exponents(p, L):
        comp = 0 if ce.component == 0 else list(ce.component)
        out.append(
            {"component": comp, "delta": [_cplx_out(d) for d in ce.delta]}
        )
    return {
        "N": N,
        "M": M,
        "L": L,
        "alpha": [_cplx_out(v) for v in p.alpha],
        "beta": [_cplx_out(v) for v in p.beta],
        "gamma": [_cplx_out(v) for v in p.gamma],
        "q": _cplx_out(complex(q)),
        "exponents": out,
    }


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qconnect",
        description="Verification runs and one-off evaluations for the "
        "q-hypergeometric connection library.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute verification suites")
    run.add_argument("config", nargs="?", help="JSON config file")
    run.add_argument("--q", type=str, default=None)
    run.add_argument("--N", type=int, default=None)
    run.add_argument("--M", type=int, default=None)
    run.add_argument(
        "--suite", action="append", default=None,
        help="suite name, repeatable or comma-separated",
    )
    run.add_argument("--samples", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument(
        "--tol", action="append", default=None,
        help="cmp=VALUE or tail=VALUE (bare value means cmp)",
    )
    run.add_argument("--out", type=str, default=None, help="JSON report path")
    run.add_argument(
        "--format", choices=("table", "json"), default="table",
        help="stdout format",
    )
    run.add_argument(
        "--with-timing", action="store_true",
        help="keep measured timings in the report (breaks byte determinism)",
    )

    ev = sub.add_parser("eval", help="evaluate one series from a JSON spec")
    ev.add_argument(
        "spec", help="JSON object (inline) or path to a JSON file"
    )

    ex = sub.add_parser("exponents", help="leading exponent vectors")
    ex.add_argument("--N", type=int, required=True)
    ex.add_argument("--M", type=int, required=True)
    ex.add_argument("--L", type=int, required=True)
    ex.add_argument("--alpha", type=str, default=None)
    ex.add_argument("--beta", type=str, default=None)
    ex.add_argument("--gamma", type=str, default=None)
    ex.add_argument("--q", type=str, default="0.3")
    ex.add_argument("--seed", type=int, default=0)
    return ap


def _split_cplx_csv(s: str) -> tuple[complex, ...]:
    return tuple(complex(part.replace(" ", "")) for part in s.split(","))


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    kw: dict = {}
    if args.q is not None:
        kw["q"] = complex(args.q.replace(" ", ""))
    if args.N is not None:
        kw["N"] = args.N
    if args.M is not None:
        kw["M"] = args.M
    if args.suite is not None:
        names: list[str] = []
        for item in args.suite:
            names.extend(s.strip() for s in item.split(",") if s.strip())
        kw["suites"] = SUITES if names == ["all"] else tuple(names)
    if args.samples is not None:
        kw["samples"] = args.samples
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.tol is not None:
        for item in args.tol:
            if "=" in item:
                key, _, val = item.partition("=")
                key = key.strip()
                if key in ("cmp", "cmp_tol"):
                    kw["cmp_tol"] = float(val)
                elif key in ("tail", "tail_tol"):
                    kw["tail_tol"] = float(val)
                else:
                    raise ConfigError(f"unknown tolerance {key!r}")
            else:
                kw["cmp_tol"] = float(item)
    if args.out is not None:
        kw["output"] = args.out
    return replace(cfg, **kw) if kw else cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if args.config is not None:
                with open(args.config) as fh:
                    cfg = config_from_dict(json.load(fh))
            else:
                cfg = RunConfig()
            cfg = _apply_overrides(cfg, args)
            cfg.validate()
            rep = run_suite(cfg)
            print(
                emit_report(rep, format=args.format, with_timing=args.with_timing)
            )
            if cfg.output is not None:
                emit_report(
                    rep, format="json", path=cfg.output,
                    with_timing=args.with_timing,
                )
            return 0 if rep.passed else 1
        if args.command == "eval":
            raw = args.spec.strip()
            if raw.startswith("{"):
                spec = json.loads(raw)
            else:
                with open(raw) as fh:
                    spec = json.load(fh)
            print(json.dumps(eval_spec(spec), indent=2, sort_keys=True))
            return 0
        if args.command == "exponents":
            out = exponents_spec(
                N=args.N,
                M=args.M,
                L=args.L,
                alpha=_split_cplx_csv(args.alpha) if args.alpha else None,
                beta=_split_cplx_csv(args.beta) if args.beta else None,
                gamma=_split_cplx_csv(args.gamma) if args.gamma else None,
                q=complex(args.q.replace(" ", "")),
                seed=args.seed,
            )
            print(json.dumps(out, indent=2, sort_keys=True))
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3
    raise AssertionError("unreachable command")


if __name__ == "__main__":
    sys.exit(main())
