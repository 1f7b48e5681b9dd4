"""Pluriclosed flow on left-invariant metrics.

The flow moves the fundamental form by minus the (1,1) part of the
Bismut-Ricci form while a torsion potential beta integrates the (2,0) part.
Both evolve with one fixed-step classical RK4; every accepted step is
policed for positivity and pluriclosed drift.

Invariant pluriclosed metrics form a linear slice of the Hermitian cone, so
the perturbation sampler draws inside that slice and rejects only draws that
fall off the positive-definite cone.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from samelson_lab import geometry as geo
from samelson_lab.samelson import InvariantMetric, SamelsonStructure, biinvariant_metric
from samelson_lab.tanre import aeppli_h11, build_model

__all__ = [
    "FlowConfig",
    "FlowResult",
    "FlowState",
    "aeppli_coordinates",
    "endpoint_report",
    "flow_rhs",
    "integrate_flow",
    "pluriclosed_basis",
    "pluriclosed_perturbation",
    "torsion_residual",
    "write_trace_csv",
]


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 0.01
    t_max: float = 100.0
    eps_conv: float = 1e-8
    eps_pc: float = 1e-6
    order: int = 4  # classical Runge-Kutta; nothing else is wired in

    def __post_init__(self):
        if not (self.dt > 0 and self.t_max > 0):
            raise ValueError("dt and t_max must be positive")
        if not (self.eps_conv > 0 and self.eps_pc > 0):
            raise ValueError("tolerances must be positive")
        if self.order != 4:
            raise ValueError("only the classical 4th-order integrator exists")


@dataclass(frozen=True)
class FlowState:
    t: float
    metric: InvariantMetric
    beta: Optional[np.ndarray]  # (2,0) components, complex antisymmetric
    ricci11_norm: float
    bismut_flat_norm: float
    pluriclosed_residual: float
    aeppli: np.ndarray


@dataclass(frozen=True)
class FlowResult:
    states: Tuple[FlowState, ...]
    flag: str  # converged | t-max | pd-loss | integrator-drift
    config: FlowConfig
    structure: SamelsonStructure

    @property
    def endpoint(self) -> FlowState:
        return self.states[-1]


# ---------------------------------------------------------------------------
# Aeppli coordinates of a flowing metric


def _aeppli_setup(S: SamelsonStructure):
    """Linear data turning a fundamental form into class coordinates.

    The class of an invariant pluriclosed form is pinned by its torus block:
    the difference against the matching eta/bar-eta combination is
    Aeppli-exact.  So restrict omega to the orthonormal torus frame, read
    off eta wedge bar-eta coefficients and apply the frozen functionals.
    """
    key = ("aeppli_setup", S.torus_J)
    cache = S.algebra._cache
    if key not in cache:
        from samelson_lab.samelson import orthonormal_torus_frame
        import math

        model = build_model(S, truncation=4)
        rep = aeppli_h11(model)
        r = S.cartan.rank
        m = r // 2
        W, N = orthonormal_torus_frame(S.cartan)
        frame = np.zeros((S.algebra.dimension, r))
        for l in range(r):
            for k in range(r):
                frame[S.cartan.torus_indices[k], l] = (
                    float(W[k][l]) / math.sqrt(float(N[l])))
        C = [[complex(x) for x in row] for row in model.eta]
        C += [[x.conjugate() for x in row] for row in C[:m]]
        Cinv = np.linalg.inv(np.array(C))
        slots = {}
        for idx, el in enumerate(model.basis[(1, 1)]):
            k, iy, Ss, T = el
            if k == 0 and len(Ss) == 1 and len(T) == 1:
                slots[(Ss[0], T[0])] = idx
        funcs = np.array([[complex(x) for x in row] for row in rep.functionals])
        cache[key] = (frame, Cinv, slots, len(model.basis[(1, 1)]), funcs, m)
    return cache[key]


def aeppli_coordinates(Gm, S: SamelsonStructure) -> np.ndarray:
    """Class coordinates of the metric with fundamental form J^T G."""
    frame, Cinv, slots, nbasis, funcs, m = _aeppli_setup(S)
    Jm = geo.j_array(S)
    Om = Jm.T @ np.asarray(Gm, dtype=float)
    # class generators are normalized as 2i sum xi^J(xi), 4i times the
    # real frame restriction of omega; match them so coordinates are real
    F = 4j * (frame.T @ Om @ frame)
    Gc = Cinv.T @ F @ Cinv
    vec = np.zeros(nbasis, dtype=complex)
    for (a, b), idx in slots.items():
        vec[idx] = Gc[a, m + b]
    out = funcs @ vec
    return np.real_if_close(out, tol=1e4).real


# ---------------------------------------------------------------------------
# right-hand side and the integrator


def _state_of(t, Gm, beta, S, data) -> FlowState:
    rho11J = data["rho11"] @ geo.j_array(S)
    return FlowState(
        t=float(t),
        metric=geo.as_metric(Gm, S),
        beta=None if beta is None else beta.copy(),
        ricci11_norm=float(np.abs(rho11J).max()),
        bismut_flat_norm=data["flat_norm"],
        pluriclosed_residual=data["pluriclosed_residual"],
        aeppli=aeppli_coordinates(Gm, S),
    )


def flow_rhs(state: FlowState, tol: float = 1e-6) -> np.ndarray:
    """Metric velocity -rho^{1,1}(., J.); errors off the pluriclosed cone."""
    S = state.metric.structure
    C = geo.structure_array(S.algebra)
    Jm = geo.j_array(S)
    Gm = geo.metric_array(state.metric)
    data = geo.bismut_tensors(C, Jm, Gm)
    if data["pluriclosed_residual"] > tol:
        raise ValueError(
            "metric is not pluriclosed (residual %.3e); the flow is undefined"
            % (data["pluriclosed_residual"],))
    return -(data["rho11"] @ Jm)


def _rhs_pair(C, Jm, Pp, Gm):
    data = geo.bismut_tensors(C, Jm, Gm)
    gdot = -(data["rho11"] @ Jm)
    rho20 = Pp.T @ data["rho"].astype(complex) @ Pp
    # rho is closed, so del rho11 = -delbar rho20 and the potential moving
    # the (2,1) identity del(omega_t) = del(omega_0) + delbar(beta) grows by
    # +rho20 when omega moves by -rho11
    return gdot, rho20, data


def integrate_flow(g0: InvariantMetric, cfg: FlowConfig,
                   S: Optional[SamelsonStructure] = None) -> FlowResult:
    S = g0.structure if S is None else S
    if S is None:
        raise ValueError("no Samelson structure attached to the metric")
    L = S.algebra
    C = geo.structure_array(L)
    Jm = geo.j_array(S)
    n = L.dimension
    Pp = 0.5 * (np.eye(n) - 1j * Jm)
    Gm = geo.metric_array(g0)
    geo._check_metric(Gm, Jm)
    beta = np.zeros((n, n), dtype=complex)
    dt = cfg.dt
    nsteps = int(round(cfg.t_max / dt))
    gdot, f20, data = _rhs_pair(C, Jm, Pp, Gm)
    if data["pluriclosed_residual"] > cfg.eps_pc:
        raise ValueError(
            "initial metric is not pluriclosed (residual %.3e)"
            % (data["pluriclosed_residual"],))
    states = [_state_of(0.0, Gm, beta, S, data)]
    flag = "t-max"
    quiet = 1 if np.abs(gdot).max() < cfg.eps_conv else 0
    t = 0.0
    for step in range(nsteps):
        if quiet >= 10:
            flag = "converged"
            break
        k2, _, _ = _rhs_pair(C, Jm, Pp, Gm + 0.5 * dt * gdot)
        k3, _, _ = _rhs_pair(C, Jm, Pp, Gm + 0.5 * dt * k2)
        k4, _, _ = _rhs_pair(C, Jm, Pp, Gm + dt * k3)
        Gnew = Gm + (dt / 6.0) * (gdot + 2 * k2 + 2 * k3 + k4)
        try:
            np.linalg.cholesky(Gnew)
        except np.linalg.LinAlgError:
            flag = "pd-loss"
            break
        gdot2, f202, data2 = _rhs_pair(C, Jm, Pp, Gnew)
        # Simpson step for beta with a Hermite midpoint estimate; its
        # truncation is independent of the metric stages, so the torsion
        # identity residual measures real 4th-order convergence
        Gmid = 0.5 * (Gm + Gnew) + (dt / 8.0) * (gdot - gdot2)
        _, f20m, _ = _rhs_pair(C, Jm, Pp, Gmid)
        beta = beta + (dt / 6.0) * (f20 + 4.0 * f20m + f202)
        Gm, gdot, f20, data = Gnew, gdot2, f202, data2
        t += dt
        states.append(_state_of(t, Gm, beta, S, data))
        if data["pluriclosed_residual"] > cfg.eps_pc:
            flag = "integrator-drift"
            break
        quiet = quiet + 1 if np.abs(gdot).max() < cfg.eps_conv else 0
    else:
        if quiet >= 10:
            flag = "converged"
    return FlowResult(states=tuple(states), flag=flag, config=cfg, structure=S)


# ---------------------------------------------------------------------------
# diagnostics


def torsion_residual(result: FlowResult, samples: int = 40) -> float:
    """max_t |del omega_t - del omega_0 - delbar beta(t)| over sampled states."""
    states = result.states
    if any(s.beta is None for s in states):
        raise ValueError("trajectory carries no torsion potential")
    S = result.structure
    C = geo.structure_array(S.algebra)
    Jm = geo.j_array(S)

    def del_omega(Gm):
        dom = geo._d2(C, Jm.T @ Gm)
        return geo.bigraded_part(dom, Jm, 2, 1)

    base = del_omega(geo.metric_array(states[0].metric))
    idx = sorted(set(np.linspace(0, len(states) - 1, samples).astype(int)))
    worst = 0.0
    for i in idx:
        st = states[i]
        lhs = del_omega(geo.metric_array(st.metric))
        dbeta = geo.bigraded_part(geo._d2(C, st.beta), Jm, 2, 1)
        worst = max(worst, float(np.abs(lhs - base - dbeta).max()))
    return worst


def pluriclosed_basis(S: SamelsonStructure) -> np.ndarray:
    """Orthonormal basis (as stacked matrices) of the pluriclosed slice."""
    key = ("pluriclosed_basis", S.torus_J)
    cache = S.algebra._cache
    if key not in cache:
        Jm = geo.j_array(S)
        C = geo.structure_array(S.algebra)
        n = Jm.shape[0]
        vecs = []
        for i in range(n):
            for j in range(i, n):
                Y = np.zeros((n, n))
                Y[i, j] = Y[j, i] = 1.0
                X = 0.5 * (Y + Jm.T @ Y @ Jm)
                vecs.append(X.ravel())
        A = np.array(vecs).T
        u, s, _ = np.linalg.svd(A, full_matrices=False)
        cols = u[:, s > 1e-10]
        rows = []
        for k in range(cols.shape[1]):
            X = cols[:, k].reshape(n, n)
            dom = geo._d2(C, Jm.T @ X)
            H = np.einsum("abc,ai,bj,ck->ijk", dom, Jm, Jm, Jm)
            rows.append(geo._d3(C, H).ravel())
        M = np.array(rows).T
        u2, s2, vt2 = np.linalg.svd(M, full_matrices=False)
        tol = 1e-9 * max(1.0, s2.max() if len(s2) else 0.0)
        ker = vt2.T[:, s2 < tol] if len(s2) else np.eye(cols.shape[1])
        cache[key] = np.array([(cols @ ker[:, k]).reshape(n, n)
                               for k in range(ker.shape[1])])
    return cache[key]


def pluriclosed_perturbation(S: SamelsonStructure, seed: int,
                             amplitude: float = 0.1,
                             base: Optional[InvariantMetric] = None,
                             max_tries: int = 100) -> InvariantMetric:
    """Seeded pluriclosed Hermitian metric near a bi-invariant base.

    Draws live inside the pluriclosed slice; a dense Hermitian draw would be
    rejected with probability one, so rejection only guards positivity.
    """
    if base is None:
        base = biinvariant_metric(S)
    G0 = geo.metric_array(base)
    Jm = geo.j_array(S)
    basis = pluriclosed_basis(S)
    rng = np.random.default_rng(seed)
    scale = amplitude * float(np.abs(G0).max())
    for _ in range(max_tries):
        w = rng.standard_normal(len(basis))
        X = np.tensordot(w, basis, axes=1)
        X = 0.5 * (X + X.T)
        nrm = np.abs(X).max()
        if nrm < 1e-14:
            continue
        G = G0 + (scale / nrm) * X
        try:
            geo._check_metric(G, Jm)
        except ValueError:
            continue
        return geo.as_metric(G, S)
    raise ValueError("no positive-definite draw in %d tries" % (max_tries,))


# ---------------------------------------------------------------------------
# traces and reports


def write_trace_csv(result: FlowResult, path: str) -> None:
    n = result.structure.algebra.dimension
    s = len(result.states[0].aeppli)
    cols = ["t"]
    cols += ["g_%d_%d" % (i, j) for i in range(n) for j in range(i, n)]
    cols += ["ricci11_norm", "bismut_flat_norm", "pluriclosed_residual"]
    cols += ["aeppli_c%d" % (k + 1) for k in range(s)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for st in result.states:
            Gm = geo.metric_array(st.metric)
            row = [st.t]
            row += [Gm[i, j] for i in range(n) for j in range(i, n)]
            row += [st.ricci11_norm, st.bismut_flat_norm,
                    st.pluriclosed_residual]
            row += list(st.aeppli)
            w.writerow(row)


def endpoint_report(result: FlowResult) -> dict:
    first, last = result.states[0], result.states[-1]
    return {
        "flag": result.flag,
        "steps": len(result.states) - 1,
        "t_end": last.t,
        "bismut_flat_norm": last.bismut_flat_norm,
        "ricci11_norm": last.ricci11_norm,
        "pluriclosed_residual": last.pluriclosed_residual,
        "aeppli_start": list(first.aeppli),
        "aeppli_end": list(last.aeppli),
        "aeppli_drift": float(np.abs(last.aeppli - first.aeppli).max()),
    }


def endpoint_report_json(result: FlowResult) -> str:
    return json.dumps(endpoint_report(result), indent=2, sort_keys=True)
