"""Energy identity and sup-norm bookkeeping along a stored history."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..flow import FlowHistory
from ..functional import ModelParams, dissipation, rhs_values, sw_values


@dataclass(frozen=True)
class EnergyRecord:
    step: int
    t: float
    sw: float
    sup_phi: float
    dissipation: float
    dsw_dt: float | None = None
    identity_residual: float | None = None
    increased: bool = False


def energy_report(
    history: FlowHistory, params: ModelParams | None = None, rel_tol: float = 1e-10
) -> list[EnergyRecord]:
    """One record per snapshot.

    For consecutive snapshots ``k, k+1`` the record at ``k`` carries the
    difference quotient of SW and the residual of the energy identity,
    ``|dSW/dt + (dis_k + dis_{k+1}) / 2|`` where ``dis = h^m sum(2|psi|^2 + |b|^2)``.
    Averaging the two endpoint dissipations makes the residual second order
    in the snapshot spacing. ``increased`` flags an SW rise beyond
    ``rel_tol * max(1, |SW_k|)``. The last record has no residual.
    """
    params = params or history.params
    lat = params.lattice
    sws, dis, sups = [], [], []
    for state in history.snapshots:
        phi, a = state.phi.values, state.a.values
        sws.append(sw_values(lat, phi, a, params.S))
        dis.append(dissipation(lat, *rhs_values(lat, phi, a, params.S)))
        sups.append(float(np.max(state.phi.modulus())))

    records = []
    times = history.times
    for k in range(len(history)):
        if k + 1 < len(history):
            dt = times[k + 1] - times[k]
            rate = (sws[k + 1] - sws[k]) / dt
            residual = abs(rate + 0.5 * (dis[k] + dis[k + 1]))
            increased = sws[k + 1] > sws[k] + rel_tol * max(1.0, abs(sws[k]))
        else:
            rate = residual = None
            increased = False
        records.append(
            EnergyRecord(
                step=history.steps[k],
                t=float(times[k]),
                sw=sws[k],
                sup_phi=sups[k],
                dissipation=dis[k],
                dsw_dt=rate,
                identity_residual=residual,
                increased=increased,
            )
        )
    return records


@dataclass(frozen=True)
class MaxPrincipleResult:
    passed: bool
    bound: float
    margin: float
    sups: tuple[float, ...]


def max_principle_check(
    history: FlowHistory, params: ModelParams | None = None, rel_tol: float = 1e-9
) -> MaxPrincipleResult:
    """Check ``sup|phi(t)| <= max(sup|phi_0|, sqrt|S|)`` at every snapshot."""
    params = params or history.params
    sups = tuple(float(np.max(s.phi.modulus())) for s in history.snapshots)
    bound = max(sups[0], math.sqrt(abs(params.S)))
    allowed = bound * (1 + rel_tol)
    margin = allowed - max(sups)
    return MaxPrincipleResult(passed=margin >= 0, bound=bound, margin=margin, sups=sups)
