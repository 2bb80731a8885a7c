"""Properly-intersecting elimination on multisets of sets.

Families are plain lists of frozensets; equal members may repeat. The
laminarization driver only uses the union+intersection replacement (type 1).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InternalConsistencyError, PreconditionError


def properly_intersecting(X, Y) -> bool:
    X, Y = frozenset(X), frozenset(Y)
    return bool(X & Y) and bool(X - Y) and bool(Y - X)


def _family(F: Iterable) -> list[frozenset]:
    return [frozenset(X) for X in F]


def pieo_step(F: Sequence, i: int, j: int, type: int = 1) -> list[frozenset]:
    """Replace members ``i`` and ``j`` of ``F``.

    Type 1 puts ``X | Y`` at position ``i`` and ``X & Y`` at ``j``; types 2 and
    3 keep only the union or only the intersection, at position ``i``.
    """
    F = _family(F)
    if i == j or not (0 <= i < len(F) and 0 <= j < len(F)):
        raise PreconditionError(f"invalid member pair ({i}, {j})")
    X, Y = F[i], F[j]
    if not properly_intersecting(X, Y):
        raise PreconditionError(f"members {i} and {j} are not properly intersecting")
    if type == 1:
        F[i], F[j] = X | Y, X & Y
        return F
    if type not in (2, 3):
        raise PreconditionError(f"unknown PIEO type {type!r}")
    F[i] = X | Y if type == 2 else X & Y
    del F[j]
    return F


def is_laminar(F: Sequence) -> bool:
    F = _family(F)
    return not any(properly_intersecting(F[a], F[b])
                   for a in range(len(F)) for b in range(a + 1, len(F)))


def properly_intersecting_pairs(F: Sequence) -> list[tuple[int, int]]:
    return [(a, b) for a in range(len(F)) for b in range(a + 1, len(F))
            if properly_intersecting(F[a], F[b])]


def is_disjoint_family(F: Sequence) -> bool:
    seen: set = set()
    for X in F:
        if seen & X:
            return False
        seen |= X
    return True


def split_maximal(F: Sequence) -> tuple[list[frozenset], list[frozenset]]:
    """Split a laminar family into its maximal members and the rest.

    A member is maximal when no other member strictly contains it. Among equal
    maximal members only the first occurrence counts as maximal; later copies
    go to the remainder, which keeps both parts pairwise disjoint.
    """
    F = _family(F)
    maximal, rest = [], []
    for a, X in enumerate(F):
        dominated = any(X < Y for Y in F) or any(F[b] == X for b in range(a))
        (rest if dominated else maximal).append(X)
    return maximal, rest


@dataclass(frozen=True)
class PieoStep:
    i: int
    j: int
    union: frozenset
    intersection: frozenset


@dataclass
class LaminarizationTrace:
    initial: list[frozenset]
    steps: list[PieoStep] = field(default_factory=list)
    final: list[frozenset] = field(default_factory=list)
    maximal: list[frozenset] = field(default_factory=list)
    remainder: list[frozenset] = field(default_factory=list)

    def to_dict(self) -> dict:
        def sets(F):
            return [_sorted(X) for X in F]
        return {
            "initial": sets(self.initial),
            "steps": [{"pair": [s.i, s.j], "union": _sorted(s.union),
                       "intersection": _sorted(s.intersection)} for s in self.steps],
            "final": sets(self.final),
            "maximal": sets(self.maximal),
            "remainder": sets(self.remainder),
        }


def _sorted(X) -> list:
    try:
        return sorted(X)
    except TypeError:
        return sorted(X, key=str)


def _check_maximal_pair(F: list[frozenset], i: int, j: int) -> None:
    for Z in F:
        if F[i] < Z or F[j] < Z:
            raise InternalConsistencyError(
                f"properly intersecting pair {sorted(map(str, F[i]))}, {sorted(map(str, F[j]))} "
                "is not maximal in the current family")


def laminarize_type1(F1: Iterable, F2: Iterable, rng: random.Random | None = None,
                     check: bool = True) -> LaminarizationTrace:
    """Uncross ``F1 + F2`` with type-1 steps until the family is laminar.

    Both inputs must be families of pairwise-disjoint nonempty sets. The pair
    eliminated at each step is the first properly intersecting pair in index
    order, or a uniformly random one when ``rng`` is given. With ``check``,
    each eliminated pair is asserted to consist of maximal members.
    """
    F1, F2 = _family(F1), _family(F2)
    for name, F in (("F1", F1), ("F2", F2)):
        if any(not X for X in F):
            raise PreconditionError(f"{name} contains an empty set")
        if not is_disjoint_family(F):
            raise PreconditionError(f"{name} is not a family of pairwise-disjoint sets")
    G = F1 + F2
    trace = LaminarizationTrace(initial=list(G))
    while True:
        if rng is None:
            pair = next(((a, b) for a in range(len(G)) for b in range(a + 1, len(G))
                         if properly_intersecting(G[a], G[b])), None)
        else:
            pairs = properly_intersecting_pairs(G)
            pair = rng.choice(pairs) if pairs else None
        if pair is None:
            break
        i, j = pair
        if check:
            _check_maximal_pair(G, i, j)
        G = pieo_step(G, i, j, type=1)
        trace.steps.append(PieoStep(i, j, G[i], G[j]))
    trace.final = G
    trace.maximal, trace.remainder = split_maximal(G)
    return trace
