"""Ground truth: exhaustive bijection testing of maps on a finite field.

Scans are deterministic over the canonical element order, so the reported
first collision and the cycle decomposition are reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .gf import Elem, FieldCtx

DEFAULT_CAP = 1 << 20


class FieldTooLargeError(Exception):
    """Raised when a scan would exceed the configured field-size cap."""


class NotBijectiveError(Exception):
    """Raised when a cycle decomposition is requested for a non-bijection."""


class HypothesisUnsatisfiedError(Exception):
    """Raised when an instance with failed hypotheses reaches the oracle."""


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exhaustive bijection scan."""

    bijective: bool
    collision: Optional[tuple[Elem, Elem]] = None
    missed: Optional[Elem] = None
    cycle_type: Optional[tuple[int, ...]] = None


def check_bijective(evaluator: Callable[[Elem], Elem], ctx: FieldCtx,
                    cap: int = DEFAULT_CAP) -> Verdict:
    """Scan every element once; report the first collision in canonical order.

    For bijections the cycle type (sorted multiset of cycle lengths) is
    included in the verdict.
    """
    if ctx.order > cap:
        raise FieldTooLargeError(
            f"field order {ctx.order} exceeds cap {cap}")
    order = ctx.order
    preimage = [-1] * order
    collision = None
    for x in ctx.elements():
        y = evaluator(x)
        c = y.code
        if preimage[c] >= 0:
            if collision is None:
                collision = (ctx._wrap(preimage[c]), x)
        else:
            preimage[c] = x.code
    if collision is not None:
        missed = next(ctx._wrap(c) for c in range(order) if preimage[c] < 0)
        return Verdict(bijective=False, collision=collision, missed=missed)
    return Verdict(bijective=True, cycle_type=_cycles_from_table(preimage))


def _cycles_from_table(preimage: list[int]) -> tuple[int, ...]:
    # preimage is the inverse permutation; cycle lengths match the forward map
    seen = bytearray(len(preimage))
    lengths = []
    for start in range(len(preimage)):
        if seen[start]:
            continue
        length = 0
        c = start
        while not seen[c]:
            seen[c] = 1
            c = preimage[c]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths))


def cycle_structure(evaluator: Callable[[Elem], Elem], ctx: FieldCtx,
                    cap: int = DEFAULT_CAP) -> tuple[int, ...]:
    """Cycle lengths of a bijective map, ascending."""
    verdict = check_bijective(evaluator, ctx, cap=cap)
    if not verdict.bijective:
        raise NotBijectiveError(f"map is not bijective: collision {verdict.collision}")
    return verdict.cycle_type


def format_cycle_type(cycle_type: tuple[int, ...]) -> str:
    """Compact census form, e.g. "1^3 2^1" for one transposition and 3 fixed points."""
    out = []
    i = 0
    while i < len(cycle_type):
        j = i
        while j < len(cycle_type) and cycle_type[j] == cycle_type[i]:
            j += 1
        out.append(f"{cycle_type[i]}^{j - i}")
        i = j
    return " ".join(out)


@dataclass(frozen=True)
class IffRecord:
    """Agreement between a family's predicted verdict and the scan."""

    family_id: str
    predicted: bool
    observed: bool
    verdict: Verdict

    @property
    def agree(self) -> bool:
        return self.predicted == self.observed


def check_iff(instance, cap: int = DEFAULT_CAP) -> IffRecord:
    """Compare a family instance's predicted verdict with brute force."""
    failed = [name for name, ok in instance.hypotheses if not ok]
    if failed:
        raise HypothesisUnsatisfiedError(
            f"unsatisfied hypotheses: {', '.join(failed)}")
    verdict = check_bijective(instance.evaluator, instance.ctx, cap=cap)
    return IffRecord(
        family_id=instance.family_id,
        predicted=instance.predicted_pp,
        observed=verdict.bijective,
        verdict=verdict,
    )
