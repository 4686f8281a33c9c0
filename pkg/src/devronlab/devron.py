"""System-agnostic harness for Devron pairs (U, V) of a birational map F.

A system adapter provides ``name``, ``parameters()``, ``expected_width()``,
``step(state, direction)``, ``in_class(state, "U" | "V")``,
``sample("U" | "V", rng)`` and the singularity depth bounds
``backward_bound`` / ``forward_bound``. Per trial the harness checks that
F^{-1} becomes singular within the backward bound from U, that some F^m
carries the sample into V, that the forward path is invertible, and that F
becomes singular within the forward bound from the terminal state.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Protocol

from . import rng as rngmod
from .errors import DevronError, NotReached, Singular, SingularBeforeV

FWD, BWD = "fwd", "bwd"
DEFAULT_REDRAWS = 5
DEFAULT_MAX_STEPS = 32
# height of sampled rationals for the example system
SAMPLE_BOUND = 1000


class DynSystem(Protocol):
    name: str
    backward_bound: int
    forward_bound: int

    def parameters(self) -> dict: ...
    def expected_width(self) -> int: ...
    def step(self, state: Any, direction: str) -> Any: ...
    def in_class(self, state: Any, which: str) -> bool: ...
    def sample(self, which: str, rng: random.Random) -> Any: ...


@dataclass
class Trajectory:
    """States reached (the input first) and the singularity that stopped the run, if any."""

    states: list
    singular: Singular | None = None

    @property
    def singular_at(self) -> int | None:
        """1-based index of the step that failed."""
        return None if self.singular is None else len(self.states)


def _as_singular(exc: Exception) -> Singular:
    return exc if isinstance(exc, Singular) else Singular(str(exc), [])


def iterate(sys: DynSystem, state, steps: int, direction: str = FWD) -> Trajectory:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    states = [state]
    for _ in range(steps):
        try:
            state = sys.step(state, direction)
        except (Singular, ZeroDivisionError, ArithmeticError) as exc:
            return Trajectory(states, _as_singular(exc))
        states.append(state)
    return Trajectory(states)


def singular_depth(sys: DynSystem, state, direction: str, bound: int) -> int | None:
    """Number of steps after which the map first fails (within ``bound``), else None."""
    return iterate(sys, state, bound, direction).singular_at


def measure_width(sys: DynSystem, u_state, max_steps: int = DEFAULT_MAX_STEPS) -> tuple[int, Any]:
    """Least m >= 1 with F^m(u_state) in V, and that terminal state."""
    state = u_state
    for m in range(1, max_steps + 1):
        try:
            state = sys.step(state, FWD)
        except (Singular, ArithmeticError) as exc:
            raise SingularBeforeV(m, exc) from exc
        if sys.in_class(state, "V"):
            return m, state
    raise NotReached(max_steps)


def round_trip(sys: DynSystem, start, terminal, steps: int) -> bool:
    """F^{-steps} is defined at ``terminal`` and returns ``start``."""
    traj = iterate(sys, terminal, steps, BWD)
    return traj.singular is None and traj.states[-1] == start


@dataclass
class TrialResult:
    trial_index: int
    width: int | None = None
    backward_singular_at: int | None = None
    forward_singular_at: int | None = None
    round_trip: bool | None = None
    redraws: list = field(default_factory=list)
    discarded: bool = False
    reason: str = ""
    ok: bool = False

    def to_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "width": self.width,
            "singular_at": {"backward_from_U": self.backward_singular_at, "forward_from_V": self.forward_singular_at},
            "round_trip": self.round_trip,
            "redraws": self.redraws,
            "discarded": self.discarded,
            "reason": self.reason,
            "ok": self.ok,
        }


@dataclass
class DevronReport:
    system: str
    parameters: dict
    seed: int
    mode: str
    expected_width: int
    trials: list[TrialResult]
    verdict: str

    def widths(self) -> list[int]:
        return [t.width for t in self.trials if t.width is not None and not t.discarded]

    def summary(self) -> dict:
        w = self.widths()
        return {
            "min": min(w) if w else None,
            "max": max(w) if w else None,
            "all_equal": bool(w) and len(set(w)) == 1,
            "passed": sum(t.ok for t in self.trials),
            "trials": len(self.trials),
        }

    def to_dict(self, timestamp: bool = True) -> dict:
        out = {
            "system": self.system,
            "parameters": _serializable(self.parameters),
            "seed": self.seed,
            "mode": self.mode,
            "expected_width": self.expected_width,
            "trials": [t.to_dict() for t in self.trials],
            "summary": self.summary(),
            "verdict": self.verdict,
        }
        if timestamp:
            out["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return out

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _serializable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {k: _serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_serializable(v) for v in value]
    return value


def run_trial(sys: DynSystem, index: int, seed: int, exact: bool, max_steps: int, redraws: int) -> TrialResult:
    result = TrialResult(index)
    rng = rngmod.make_rng(seed)
    expected = sys.expected_width()
    for _attempt in range(redraws + 1):
        try:
            u = sys.sample("U", rng)
        except DevronError as exc:
            result.redraws.append(f"sampling failed: {exc}")
            continue
        if not sys.in_class(u, "U"):
            result.reason = "sample is not in U"
            return result
        result.backward_singular_at = singular_depth(sys, u, BWD, sys.backward_bound)
        try:
            m, terminal = measure_width(sys, u, max_steps)
        except SingularBeforeV as exc:
            result.redraws.append(f"singular at step {exc.step} before reaching V")
            continue
        except NotReached:
            result.reason = f"V not reached within {max_steps} steps"
            return result
        if not round_trip(sys, u, terminal, m):
            result.redraws.append(f"forward path of length {m} not invertible")
            continue
        result.width = m
        result.round_trip = True
        result.forward_singular_at = singular_depth(sys, terminal, FWD, sys.forward_bound)
        failures = []
        if result.backward_singular_at is None:
            failures.append("backward map not singular on U within bound")
        if result.forward_singular_at is None:
            failures.append("forward map not singular on V within bound")
        if exact and m != expected:
            failures.append(f"width {m} differs from {expected}")
        if not exact and m > expected:
            failures.append(f"width {m} exceeds bound {expected}")
        result.reason = "; ".join(failures)
        result.ok = not failures
        return result
    result.discarded = True
    result.reason = f"no generic sample after {redraws + 1} draws"
    return result


def verify_pair(
    sys: DynSystem,
    trials: int,
    seed: int,
    exact: bool = True,
    max_steps: int = DEFAULT_MAX_STEPS,
    redraws: int = DEFAULT_REDRAWS,
) -> DevronReport:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    seeds = rngmod.trial_seeds(seed, trials)
    results = [run_trial(sys, i, s, exact, max_steps, redraws) for i, s in enumerate(seeds)]
    if all(r.reason.startswith("V not reached") for r in results):
        verdict = "no pair observed"
    elif all(r.ok for r in results):
        verdict = "pass"
    else:
        verdict = "fail"
    return DevronReport(
        system=sys.name,
        parameters=sys.parameters(),
        seed=seed,
        mode="exact" if exact else "bound",
        expected_width=sys.expected_width(),
        trials=results,
        verdict=verdict,
    )


# --- the six-coordinate example ---------------------------------------------


def example_forward(v):
    a, b, c, d, e, f = (Fraction(x) for x in v)
    try:
        return (d, (b * b - d * f) / e, f, (d * d - f * b) / a, b, (f * f - b * d) / c)
    except ZeroDivisionError as exc:
        raise Singular("zero divisor in F", []) from exc


def example_backward(v):
    a, b, c, d, e, f = (Fraction(x) for x in v)
    try:
        return ((a * a - c * e) / d, e, (c * c - e * a) / f, a, (e * e - a * c) / b, c)
    except ZeroDivisionError as exc:
        raise Singular("zero divisor in F^-1", []) from exc


class ExampleSystem:
    """Birational map of 6-space with U = {(t,b,t,d,t,f)} and V = {(a,t,c,t,e,t)}."""

    name = "example"
    backward_bound = 3
    forward_bound = 3

    def parameters(self) -> dict:
        return {"dimension": 6}

    def expected_width(self) -> int:
        return 2

    def step(self, state, direction: str):
        return example_forward(state) if direction == FWD else example_backward(state)

    def in_class(self, state, which: str) -> bool:
        picked = state[0::2] if which == "U" else state[1::2]
        return all(x == picked[0] for x in picked)

    def sample(self, which: str, rng: random.Random):
        t = rngmod.rational(rng, SAMPLE_BOUND, nonzero=True)
        free = [rngmod.rational(rng, SAMPLE_BOUND, nonzero=True) for _ in range(3)]
        if which == "U":
            return (t, free[0], t, free[1], t, free[2])
        return (free[0], t, free[1], t, free[2], t)
