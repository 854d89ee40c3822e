"""Pseudo-distance on timed words, 0-elimination of words and ε-capacity at desk scale."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .model import TimedWord, as_rational, format_rational

INF = math.inf


def directed_distance(w: TimedWord, v: TimedWord):
    """Largest gap from an event of ``w`` to the nearest same-letter event of ``v``.

    Exact ``Fraction`` result, or ``math.inf`` when ``v`` lacks a letter of ``w``.
    """
    by_letter: dict = {}
    for a, s in v.events:
        by_letter.setdefault(a, []).append(s)
    worst = Fraction(0)
    for a, t in w.events:
        times = by_letter.get(a)
        if not times:
            return INF
        worst = max(worst, min(abs(t - s) for s in times))
    return worst


def distance(w: TimedWord, v: TimedWord):
    return max(directed_distance(w, v), directed_distance(v, w))


@dataclass(frozen=True)
class ZeroClassKey:
    """Identifies a word up to zero distance."""

    time0_letters: frozenset
    events: frozenset  # (letter, positive timestamp)


def zero_class_key(w: TimedWord) -> ZeroClassKey:
    zero = frozenset(a for a, t in w.events if t == 0)
    positive = frozenset((a, t) for a, t in w.events if t > 0)
    return ZeroClassKey(zero, positive)


@dataclass(frozen=True)
class ZeroFreeWord:
    events: tuple[tuple[frozenset, Fraction], ...] = ()

    def __post_init__(self):
        times = [t for _, t in self.events]
        if any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("0-free words need strictly increasing positive timestamps")
        if any(not letters for letters, _ in self.events):
            raise ValueError("letter sets must be nonempty")

    def as_timed_word(self) -> TimedWord:
        return TimedWord(self.events)

    def __str__(self):
        return format_word(self.as_timed_word())


def nu_word(w: TimedWord) -> ZeroFreeWord:
    """Merge simultaneous events into letter sets and drop the events at time 0."""
    groups: dict[Fraction, set] = {}
    for a, t in w.events:
        if t > 0:
            groups.setdefault(t, set()).update(a if isinstance(a, frozenset) else {a})
    return ZeroFreeWord(tuple((frozenset(groups[t]), t) for t in sorted(groups)))


def upsilon(words: Iterable[TimedWord]) -> int:
    """Number of zero-distance classes."""
    return len({zero_class_key(w) for w in words})


def zero_separated_subset(words: Sequence[TimedWord]) -> list[TimedWord]:
    """A maximal subset with pairwise positive distances, using the distance only."""
    chosen: list[TimedWord] = []
    for w in words:
        if all(distance(w, c) > 0 for c in chosen):
            chosen.append(w)
    return chosen


# --------------------------------------------------------------------------
# ε-capacity

class CapacityCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CapacityResult:
    size: int
    words: tuple[TimedWord, ...]  # an ε-separated set of that size
    exact: bool

    @property
    def log2(self) -> float:
        return math.log2(self.size) if self.size else -math.inf


def _conflicts(words: Sequence[TimedWord], eps) -> list[set[int]]:
    n = len(words)
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if distance(words[i], words[j]) <= eps:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def eps_capacity(words: Iterable[TimedWord], eps, mode: str = "exact", node_cap: int = 10**6) -> CapacityResult:
    """Largest ε-separated subset (pairwise distance above ``eps``).

    ``exact`` runs branch and bound for a maximum independent set of the
    "distance at most ε" graph and raises once ``node_cap`` search nodes are
    used; ``greedy`` returns the greedy net, a lower bound.
    """
    eps = as_rational(eps)
    words = list(dict.fromkeys(words))
    if mode == "greedy":
        net = eps_net_greedy(words, eps)
        return CapacityResult(len(net), tuple(net), False)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    adj = _conflicts(words, eps)
    best: list[int] = []
    nodes = 0

    def search(chosen: list[int], candidates: list[int]):
        nonlocal best, nodes
        nodes += 1
        if nodes > node_cap:
            raise CapacityCapExceeded(f"exact ε-capacity needs more than {node_cap} search nodes")
        if not candidates:
            if len(chosen) > len(best):
                best = list(chosen)
            return
        if len(chosen) + len(candidates) <= len(best):
            return
        # branch on a vertex of maximum degree among the candidates
        cand = set(candidates)
        v = max(candidates, key=lambda u: len(adj[u] & cand))
        if not adj[v] & cand:
            # no conflicts left: take everything
            search(chosen + candidates, [])
            return
        search(chosen + [v], [u for u in candidates if u != v and u not in adj[v]])
        search(chosen, [u for u in candidates if u != v])

    search([], list(range(len(words))))
    return CapacityResult(len(best), tuple(words[i] for i in sorted(best)), True)


def eps_net_greedy(words: Iterable[TimedWord], eps) -> list[TimedWord]:
    """Greedy ε-net: a word joins the net unless some net point is within ``eps``.

    The result is also ε-separated, so its size sits between the covering
    and packing numbers.
    """
    eps = as_rational(eps)
    net: list[TimedWord] = []
    for w in words:
        if all(distance(w, c) > eps for c in net):
            net.append(w)
    return net


def is_eps_net(net: Sequence[TimedWord], words: Iterable[TimedWord], eps) -> bool:
    eps = as_rational(eps)
    return all(any(distance(w, c) <= eps for c in net) for w in words)


# --------------------------------------------------------------------------
# text form: ``a@1 {a,b}@5/2``

_EVENT = re.compile(r"\s*(\{[^}]*\}|[^\s@{}]+)@([0-9]+(?:/[0-9]+)?(?:\.[0-9]+)?)\s*")


def parse_word(text: str) -> TimedWord:
    text = text.strip()
    if text in ("", "ε"):
        return TimedWord()
    events, pos = [], 0
    while pos < len(text):
        m = _EVENT.match(text, pos)
        if m is None:
            raise ValueError(f"cannot read a timed event at position {pos + 1} of {text!r}")
        letter, stamp = m.groups()
        if letter.startswith("{"):
            letter = frozenset(x.strip() for x in letter[1:-1].split(",") if x.strip())
        events.append((letter, as_rational(stamp)))
        pos = m.end()
    return TimedWord(tuple(events))


def format_word(w: TimedWord) -> str:
    if not w.events:
        return "ε"
    out = []
    for a, t in w.events:
        letter = "{" + ",".join(sorted(map(str, a))) + "}" if isinstance(a, frozenset) else str(a)
        out.append(f"{letter}@{format_rational(t)}")
    return " ".join(out)
