"""Deterministic SEIRS epidemic dynamics on a graph.

Each node carries compartment fractions (susceptible, exposed,
infectious, recovered) that always sum to 1. The update couples nodes
through the neighbor-averaged infectious pressure

    pressure(v) = (I_v + sum of I_u over neighbors u) / (1 + deg(v)),

a mean-field reading of contagion spreading across edges. Per step:

    S' = S - beta * S * pressure + xi * R
    E' = E + beta * S * pressure - alpha * E
    I' = I + alpha * E - gamma * I
    R' = R + gamma * I - xi * R

with alpha = 1/latency, gamma = 1/infectious period, xi = 1/immunity
period (0 for permanent immunity). The update conserves the per-node sum
exactly; clamping only engages if rates leave [0, 1] and is counted.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadPatientZeroError, DimensionMismatchError
from .graphs import Graph

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeirsParams:
    """Epidemic parameters; periods are in days (steps)."""

    beta: float
    latency_days: float
    infectious_days: float
    immunity_days: float = math.inf
    pop_per_node: int = 70
    t_steps: int = 100
    patient_zero: tuple[int, ...] = (0,)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "patient_zero", tuple(self.patient_zero))
        if not (0.0 <= self.beta <= 1.0):
            raise DimensionMismatchError(f"beta must lie in [0,1], got {self.beta}")
        if self.latency_days < 1.0 or self.infectious_days < 1.0:
            raise DimensionMismatchError("latency and infectious periods must be >= 1")
        for rate in (self.incubation_rate, self.recovery_rate, self.immunity_loss_rate):
            if not (0.0 <= rate <= 1.0):
                raise DimensionMismatchError(f"rate {rate} outside [0,1]")

    @property
    def incubation_rate(self) -> float:
        return 1.0 / self.latency_days

    @property
    def recovery_rate(self) -> float:
        return 1.0 / self.infectious_days

    @property
    def immunity_loss_rate(self) -> float:
        return 0.0 if math.isinf(self.immunity_days) else 1.0 / self.immunity_days


@dataclass(frozen=True, eq=False)
class SeirsState:
    """Per-node compartment fractions; s+e+i+r = 1 per node."""

    s: np.ndarray
    e: np.ndarray
    i: np.ndarray
    r: np.ndarray
    clamped: int = 0


def initial_state(n: int, p: SeirsParams) -> SeirsState:
    """All-susceptible state with 1/pop_per_node infectious at patient zeros."""
    if not p.patient_zero:
        raise BadPatientZeroError("patient_zero list is empty")
    if any(not (0 <= v < n) for v in p.patient_zero):
        raise BadPatientZeroError(f"patient_zero indices outside [0,{n})")
    s = np.ones(n)
    i = np.zeros(n)
    seed_fraction = 1.0 / p.pop_per_node
    for v in p.patient_zero:
        i[v] = seed_fraction
        s[v] = 1.0 - seed_fraction
    return SeirsState(s=s, e=np.zeros(n), i=i, r=np.zeros(n))


def seirs_step(state: SeirsState, g: Graph, p: SeirsParams) -> SeirsState:
    """Advance the epidemic by one step."""
    if state.s.shape != (g.n,):
        raise DimensionMismatchError(
            f"state has {state.s.shape[0]} nodes, graph has {g.n}"
        )
    contact = (g.adjacency > 0.0).astype(float)
    pressure = (state.i + contact @ state.i) / (1.0 + contact.sum(axis=1))
    new_exposures = p.beta * state.s * pressure
    regained = p.immunity_loss_rate * state.r
    incubated = p.incubation_rate * state.e
    recovered = p.recovery_rate * state.i

    s = state.s - new_exposures + regained
    e = state.e + new_exposures - incubated
    i = state.i + incubated - recovered
    r = state.r + recovered - regained

    clamped = state.clamped
    stacked = np.stack([s, e, i, r])
    if stacked.min() < 0.0 or stacked.max() > 1.0:
        clamped += int(np.sum((stacked < 0.0) | (stacked > 1.0)))
        stacked = np.clip(stacked, 0.0, 1.0)
        stacked /= stacked.sum(axis=0, keepdims=True)
        s, e, i, r = stacked
    return SeirsState(s=s, e=e, i=i, r=r, clamped=clamped)


def seirs_signal(g: Graph, p: SeirsParams) -> np.ndarray:
    """N x T matrix of infectious fractions, column t = state at step t."""
    state = initial_state(g.n, p)
    columns = [state.i]
    for _ in range(p.t_steps - 1):
        state = seirs_step(state, g, p)
        columns.append(state.i)
    if state.clamped:
        log.warning("SEIRS clamped %d compartment values", state.clamped)
    return np.column_stack(columns)


# Four scenarios: {low, high} contagion x {temporary, permanent} immunity.
SCENARIOS: dict[str, dict] = {
    "low-temp": {"beta": 0.3, "immunity_days": 30.0},
    "high-temp": {"beta": 0.7, "immunity_days": 30.0},
    "low-perm": {"beta": 0.3, "immunity_days": math.inf},
    "high-perm": {"beta": 0.7, "immunity_days": math.inf},
}


def scenario_params(
    name: str,
    t_steps: int,
    patient_zero: tuple[int, ...],
    seed: int = 0,
    **overrides,
) -> SeirsParams:
    """Named scenario with 2-day latency and 6-day infectious period."""
    if name not in SCENARIOS:
        raise DimensionMismatchError(
            f"unknown scenario {name!r}; choices: {sorted(SCENARIOS)}"
        )
    kwargs = {
        "latency_days": 2.0,
        "infectious_days": 6.0,
        "pop_per_node": 70,
        **SCENARIOS[name],
        **overrides,
    }
    return SeirsParams(
        t_steps=t_steps, patient_zero=patient_zero, seed=seed, **kwargs
    )


def load_scenario_config(path) -> dict:
    """Parse a TOML-style ``key = value`` scenario file.

    Recognized keys: preset, beta, latency_days, infectious_days,
    immunity_days ("inf" allowed), pop_per_node, t_steps, patient_zero
    (comma-separated node list), seed. Lines starting with # and inline
    # comments are ignored.
    """
    coercers = {
        "preset": str,
        "beta": float,
        "latency_days": float,
        "infectious_days": float,
        "immunity_days": lambda v: math.inf if v == "inf" else float(v),
        "pop_per_node": int,
        "t_steps": int,
        "patient_zero": lambda v: tuple(int(x) for x in v.split(",") if x.strip()),
        "seed": int,
    }
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            value = value.strip().strip('"')
            if not sep or key not in coercers:
                raise DimensionMismatchError(
                    f"{path}:{lineno}: expected '<key> = <value>' with key in "
                    f"{sorted(coercers)}, got {raw.strip()!r}"
                )
            try:
                out[key] = coercers[key](value)
            except ValueError as exc:
                raise DimensionMismatchError(f"{path}:{lineno}: {exc}") from exc
    return out
