"""RB assignment and constrained power loading for the D2D tier.

Assignment minimizes the total CU-generated interference each pair would
receive on its reused RB (Kuhn-Munkres).  Power loading then maximizes the
sum of log(1 + predicted SINR) over the pairs' subcarriers subject to linear
per-CU protection constraints and per-pair power caps.  The predicted SINR
ignores inter-D2D coupling, which keeps the problem convex and separable in
the dual.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize

from . import interference as itf
from .waveform import WaveformType

KKT_TOLERANCE = 1e-6
MAX_DUAL_ITERATIONS = 10_000


class InfeasibleAssignmentError(ValueError):
    """More pairs than resource blocks: no injective assignment exists."""


class SolverStatus(Enum):
    OPTIMAL = "OPTIMAL"
    MAX_ITER = "MAX_ITER"
    INFEASIBLE_SKIPPED = "INFEASIBLE_SKIPPED"


@dataclass
class Assignment:
    """Injective pair -> RB map (one reused RB per pair)."""

    rb_of_pair: np.ndarray

    def validate(self, num_rbs):
        rbs = self.rb_of_pair.tolist()
        if len(set(rbs)) != len(rbs):
            raise ValueError("assignment must be injective")
        if rbs and not (0 <= min(rbs) and max(rbs) < num_rbs):
            raise ValueError("assignment out of RB range")
        return self

    def total_cost(self, cost):
        return float(cost[np.arange(len(self.rb_of_pair)), self.rb_of_pair].sum())


@dataclass
class PowerLoadingResult:
    powers: itf.PowerAllocation
    dual_cu: np.ndarray
    dual_cap: np.ndarray
    kkt_residual: float
    iterations_used: int
    status: SolverStatus


def hungarian(cost):
    """Minimum-cost injective assignment of pairs (rows) to RBs (columns).

    Exact ties between optimal assignments are broken toward the lowest RB
    indices by an infinitesimal column bias, so the result is deterministic.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2:
        raise ValueError("cost must be a matrix")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost must be finite")
    m, r = cost.shape
    if m > r:
        raise InfeasibleAssignmentError(
            "%d pairs cannot share %d RBs injectively" % (m, r))
    scale = max(np.abs(cost).max(initial=0.0), 1.0)
    # bias far below any representable cost gap; breaks ties only
    biased = cost + (1e-12 * scale / max(r, 1)) * np.arange(r)[None, :]
    rows, cols = linear_sum_assignment(biased)
    return Assignment(rb_of_pair=cols[np.argsort(rows)]).validate(r)


def cu_constraint_coefficients(gains, tables, smap, cu_powers, config, d2d_kind):
    """Linear CU-protection constraints sum_jm c[i, j, m] P_jm <= T[i] in W.

    ``c[i, j, m]`` is the leakage of a unit of pair-j power on subcarrier m
    into CU i's RB at the BS; ``T[i]`` is the interference headroom left once
    CU i must still meet its minimum SINR.  Negative headroom marks the
    snapshot infeasible.
    """
    table = tables[(d2d_kind, WaveformType.OFDM)]
    kern = table.band_kernels(smap.num_rbs, smap.subcarriers_per_rb)
    d = itf._offset_index(smap, smap.rb_of_cu[:, None], smap.rb_of_d2d[None, :])
    c = (gains.h_d2d_bs[None, :, None] * kern.by_interferer[d]
         / table.reference_power)
    gamma_min = 10.0 ** (config.cu_min_sinr / 10.0)
    sigma2_rb = config.noise_per_subcarrier_w * smap.subcarriers_per_rb
    thresholds = cu_powers * gains.h_cu_bs / gamma_min - sigma2_rb
    return c, thresholds


def _water_fill(duals, chat, g, num_cu, shape):
    lam, mu = duals[:num_cu], duals[num_cu:]
    w = np.einsum("i,ijm->jm", lam, chat) + mu[:, None]
    with np.errstate(divide="ignore"):
        x = 1.0 / np.maximum(w, 1e-300) - 1.0 / g
    return np.clip(x, 0.0, 1.0)


def power_loading(assignment, gains, tables, smap, config, d2d_kind):
    """Solve the simplified power-loading problem for one snapshot.

    Works on normalized powers x = P / P_max with the CU constraints rescaled
    to sum <= 1, so duals live on comparable scales.  The Lagrangian dual is
    minimized with L-BFGS-B (the inner water-filling solution makes objective
    and subgradient cheap), then the primal is rescaled into strict
    feasibility and the KKT residual reported in normalized units.
    """
    smap = smap.with_assignment(assignment.rb_of_pair)
    num_pairs = len(assignment.rb_of_pair)
    s = smap.subcarriers_per_rb
    p_max = config.max_tx_power_w
    cu_powers = itf.uniform_cu_powers(config)
    zero = itf.PowerAllocation(p_d2d=np.zeros((num_pairs, s)), p_cu=cu_powers)

    c, thresholds = cu_constraint_coefficients(gains, tables, smap, cu_powers,
                                               config, d2d_kind)
    if np.any(thresholds < 0):
        return PowerLoadingResult(
            powers=zero, dual_cu=np.zeros(len(thresholds)),
            dual_cap=np.zeros(num_pairs), kkt_residual=np.inf,
            iterations_used=0, status=SolverStatus.INFEASIBLE_SKIPPED)

    # normalized constraint matrix; a zero threshold leaves no headroom at all
    t_safe = np.maximum(thresholds, 1e-300)
    chat = c * p_max / t_safe[:, None, None]
    i_cu = itf.i_cu_matrix(gains, zero, tables[(WaveformType.OFDM, d2d_kind)],
                           smap)
    g = p_max * gains.h_self[:, None] / (config.noise_per_subcarrier_w + i_cu)
    num_cu = len(thresholds)

    def dual(z):
        x = _water_fill(z, chat, g, num_cu, (num_pairs, s))
        slack_cu = 1.0 - np.einsum("ijm,jm->i", chat, x)
        slack_cap = 1.0 - x.sum(axis=1)
        val = (np.log1p(g * x).sum() + z[:num_cu] @ slack_cu
               + z[num_cu:] @ slack_cap)
        return val, np.concatenate([slack_cu, slack_cap])

    bounds = [(0.0, None)] * (num_cu + num_pairs)
    z0 = np.zeros(num_cu + num_pairs)
    iters = 0
    best = None
    for attempt in range(4):
        res = minimize(dual, z0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options=dict(maxiter=MAX_DUAL_ITERATIONS - iters,
                                    ftol=1e-18, gtol=1e-14))
        iters += max(int(res.nit), 1)
        kkt, x, lam, mu = _primal_kkt(res.x, chat, g, num_cu, num_pairs, s)
        if best is None or kkt < best[0]:
            best = (kkt, x, lam, mu)
        # aim an order of magnitude below tolerance for margin
        if best[0] < 0.1 * KKT_TOLERANCE or iters >= MAX_DUAL_ITERATIONS:
            break
        # root-polish the active set: drive the tight slacks to zero exactly
        z = _polish_active(res.x, dual)
        if z is not None:
            iters += 1
            kkt, x, lam, mu = _primal_kkt(z, chat, g, num_cu, num_pairs, s)
            if kkt < best[0]:
                best = (kkt, x, lam, mu)
            if best[0] < 0.1 * KKT_TOLERANCE:
                break
        # restart from the polished point; a tiny nudge escapes flat spots
        z0 = res.x * (1.0 + 1e-3) + 1e-12
    kkt, x, lam, mu = best
    status = (SolverStatus.OPTIMAL if kkt < KKT_TOLERANCE
              else SolverStatus.MAX_ITER)
    powers = itf.PowerAllocation(p_d2d=x * p_max, p_cu=cu_powers)
    return PowerLoadingResult(powers=powers.validate(p_max), dual_cu=lam,
                              dual_cap=mu, kkt_residual=float(kkt),
                              iterations_used=iters, status=status)


def _polish_active(z, dual, threshold=1e-9):
    """Solve slack = 0 over the constraints with positive duals.

    L-BFGS-B leaves tiny slacks on active constraints; a few Newton steps on
    the active subsystem remove the complementary-slackness residual.
    """
    from scipy.optimize import root

    active = z > threshold
    if not np.any(active):
        return None

    def f(za):
        full = z.copy()
        full[active] = np.maximum(za, 0.0)
        _, slacks = dual(full)
        return slacks[active]

    sol = root(f, z[active], method="hybr", options=dict(xtol=1e-14))
    if not np.all(np.isfinite(sol.x)):
        return None
    out = z.copy()
    out[active] = np.maximum(sol.x, 0.0)
    return out


def _primal_kkt(z, chat, g, num_cu, num_pairs, s):
    """Recover the primal from duals, rescale into feasibility, score KKT."""
    x = _water_fill(z, chat, g, num_cu, (num_pairs, s))
    over = max(np.einsum("ijm,jm->i", chat, x).max(initial=0.0),
               x.sum(axis=1).max(initial=0.0))
    if over > 1.0:
        x = x / over
    slack_cu = 1.0 - np.einsum("ijm,jm->i", chat, x)
    slack_cap = 1.0 - x.sum(axis=1)
    lam, mu = z[:num_cu], z[num_cu:]
    kkt = max(-slack_cu.min(initial=0.0), -slack_cap.min(initial=0.0), 0.0,
              np.abs(lam * slack_cu).max(initial=0.0),
              np.abs(mu * slack_cap).max(initial=0.0))
    return float(kkt), x, lam, mu


def loading_objective(powers, gains, tables, smap, config, d2d_kind):
    """Objective value sum log(1 + predicted SINR) of a power allocation."""
    _, predicted = itf.d2d_sinr_matrices(gains, powers, tables, smap,
                                         config.noise_per_subcarrier_w, d2d_kind)
    return float(np.log1p(predicted).sum())


# ---------------------------------------------------------------------------
# JSON fixtures
# ---------------------------------------------------------------------------

def result_to_json(assignment, result, path):
    """Persist an assignment plus solved powers as a regression fixture."""
    doc = {
        "rb_of_pair": assignment.rb_of_pair.tolist(),
        "p_d2d": result.powers.p_d2d.tolist(),
        "p_cu": result.powers.p_cu.tolist(),
        "dual_cu": result.dual_cu.tolist(),
        "dual_cap": result.dual_cap.tolist(),
        "kkt_residual": result.kkt_residual,
        "iterations_used": result.iterations_used,
        "status": result.status.value,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def result_from_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    assignment = Assignment(rb_of_pair=np.asarray(doc["rb_of_pair"], dtype=int))
    result = PowerLoadingResult(
        powers=itf.PowerAllocation(p_d2d=np.asarray(doc["p_d2d"]),
                                   p_cu=np.asarray(doc["p_cu"])),
        dual_cu=np.asarray(doc["dual_cu"]),
        dual_cap=np.asarray(doc["dual_cap"]),
        kkt_residual=doc["kkt_residual"],
        iterations_used=doc["iterations_used"],
        status=SolverStatus(doc["status"]))
    return assignment, result
