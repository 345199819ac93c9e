"""Finite poset machinery: covers, purity, thinness, reflection orders
and EL-labelling verification.

Maximal chains of an interval are read from the top element downward; a
chain is increasing when its label tuple strictly ascends in that reading,
and the EL condition asks for exactly one increasing chain per interval,
lexicographically least among the interval's chains.  Edge labels live in
a reflection order extended by a bottom marker sitting between the labels
outside the distinguished parabolic and those inside it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
import random

from .coxeter import (
    CapExceeded,
    CoxeterError,
    CoxeterGroup,
    GroupElement,
    root_height,
    root_support,
)

BOTTOM = "bot"


class PosetError(ValueError):
    pass


class FinitePoset:
    """Explicit finite poset over an indexed element list."""

    def __init__(self, elements, up, names=None, rank=None):
        self.elements = list(elements)
        self.n = len(self.elements)
        self.up = [frozenset(s) for s in up]  # up[i] includes i
        self.names = list(names) if names is not None else [str(e) for e in elements]
        self.rank = list(rank) if rank is not None else None
        self._covers = None
        self._up_covers = None
        self._down_covers = None

    @classmethod
    def from_leq(cls, elements, leq, names=None, rank=None):
        els = list(elements)
        n = len(els)
        up = []
        for i in range(n):
            ups = {j for j in range(n) if leq(els[i], els[j])}
            if i not in ups:
                raise PosetError("relation is not reflexive")
            up.append(ups)
        poset = cls(els, up, names=names, rank=rank)
        poset._check_partial_order()
        return poset

    def _check_partial_order(self):
        for i in range(self.n):
            for j in self.up[i]:
                if i != j and i in self.up[j]:
                    raise PosetError(
                        f"antisymmetry fails between {self.names[i]} and {self.names[j]}"
                    )
                if not self.up[j] <= self.up[i]:
                    raise PosetError(
                        f"transitivity fails at {self.names[i]} <= {self.names[j]}"
                    )

    def leq_idx(self, i: int, j: int) -> bool:
        return j in self.up[i]

    def covers(self) -> tuple[tuple[int, int], ...]:
        """Transitive reduction as (lower, upper) index pairs."""
        if self._covers is None:
            out = []
            for i in range(self.n):
                above = self.up[i] - {i}
                for j in sorted(above):
                    if not any(j in self.up[k] for k in above if k != j):
                        out.append((i, j))
            self._covers = tuple(sorted(out))
        return self._covers

    def _adjacency(self):
        if self._up_covers is None:
            up_cov = [[] for _ in range(self.n)]
            down_cov = [[] for _ in range(self.n)]
            for i, j in self.covers():
                up_cov[i].append(j)
                down_cov[j].append(i)
            self._up_covers = up_cov
            self._down_covers = down_cov
        return self._up_covers, self._down_covers

    def minimal_indices(self) -> tuple[int, ...]:
        return tuple(
            i
            for i in range(self.n)
            if not any(i in self.up[k] and k != i for k in range(self.n))
        )

    def interval(self, i: int, j: int) -> tuple[int, ...]:
        return tuple(k for k in self.up[i] if j in self.up[k])

    def interval_chain_lengths(self, i: int, j: int) -> tuple[int, int]:
        """(shortest, longest) maximal-chain length from i to j along covers."""
        if not self.leq_idx(i, j):
            raise PosetError("not an interval")
        members = set(self.interval(i, j))
        up_cov, _ = self._adjacency()
        memo: dict[int, tuple[int, int]] = {j: (0, 0)}

        def walk(k):
            if k in memo:
                return memo[k]
            best = None
            for nxt in up_cov[k]:
                if nxt in members:
                    lo, hi = walk(nxt)
                    if best is None:
                        best = (lo + 1, hi + 1)
                    else:
                        best = (min(best[0], lo + 1), max(best[1], hi + 1))
            if best is None:
                raise PosetError("interval has a dead end; relation is corrupt")
            memo[k] = best
            return best

        return walk(i)


def transitive_reduction(poset: FinitePoset) -> tuple[tuple[int, int], ...]:
    return poset.covers()


def is_pure(poset: FinitePoset):
    """All maximal chains of every interval share one length."""
    for i in range(poset.n):
        for j in sorted(poset.up[i]):
            if i == j:
                continue
            lo, hi = poset.interval_chain_lengths(i, j)
            if lo != hi:
                return False, {
                    "interval": [poset.names[i], poset.names[j]],
                    "shortest": lo,
                    "longest": hi,
                }
    return True, None


def is_thin(poset: FinitePoset):
    """Pure, and every length-2 interval has exactly 4 elements."""
    ok, witness = is_pure(poset)
    if not ok:
        return False, witness
    for i in range(poset.n):
        for j in sorted(poset.up[i]):
            if i == j:
                continue
            lo, _ = poset.interval_chain_lengths(i, j)
            if lo == 2 and len(poset.interval(i, j)) != 4:
                return False, {
                    "interval": [poset.names[i], poset.names[j]],
                    "size": len(poset.interval(i, j)),
                }
    return True, None


def augment_zero_hat(poset: FinitePoset, minimal_indices, bottom_name: str = "0hat"):
    """Adjoin a global minimum below the given minimal elements.

    Returns the new poset and the new cover edges (0, shifted index); every
    original index shifts by one.
    """
    minimal = set(minimal_indices)
    for i in range(poset.n):
        if not any(poset.leq_idx(m, i) for m in minimal):
            raise PosetError(
                f"element {poset.names[i]} lies above no designated minimal element"
            )
    n = poset.n + 1
    up = [frozenset(range(n))]
    for i in range(poset.n):
        up.append(frozenset(j + 1 for j in poset.up[i]))
    names = [bottom_name] + list(poset.names)
    rank = None
    if poset.rank is not None:
        rank = [min(poset.rank) - 1] + list(poset.rank)
    bigger = FinitePoset([None] + list(poset.elements), up, names=names, rank=rank)
    new_edges = tuple((0, m + 1) for m in sorted(minimal))
    cover_bottoms = tuple(e for e in bigger.covers() if e[0] == 0)
    if cover_bottoms != new_edges:
        raise PosetError("augmented covers disagree with the designated minimal set")
    return bigger, new_edges


# -- reflection orders ------------------------------------------------------


@dataclass
class ReflectionOrderSpec:
    """Total order on a finite label set of reflections via exact slopes.

    Each reflection is keyed by (section, slope): section 0 for roots with
    support leaving the distinguished node set, section 2 inside it, with
    the bottom marker at section 1.  The slope is a perturbed rational
    weight-per-height so that rank-2 subsystems are traversed monotonically.
    """

    group: CoxeterGroup
    final_nodes: tuple[str, ...]
    seed: int
    roots: dict[GroupElement, tuple[int, ...]] = field(default_factory=dict)
    keys: dict[GroupElement, tuple] = field(default_factory=dict)

    def key(self, label):
        if label == BOTTOM:
            return (1, Fraction(0))
        return self.keys[label]

    def section(self, label) -> int:
        return self.key(label)[0]

    def in_final_section(self, label) -> bool:
        return label != BOTTOM and self.keys[label][0] == 2


def _rank2_subsets(order: ReflectionOrderSpec):
    """Group label roots into the rank-2 spans they generate pairwise."""
    roots = list(order.roots.values())
    n_axis = len(next(iter(roots))) if roots else 0
    items = list(order.roots.items())
    spans = []
    seen_spans = set()
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            beta = items[a][1]
            gamma = items[b][1]
            # pick two coordinates where (beta, gamma) has full rank
            base = None
            for i in range(n_axis):
                for j in range(i + 1, n_axis):
                    det = beta[i] * gamma[j] - beta[j] * gamma[i]
                    if det != 0:
                        base = (i, j, det)
                        break
                if base:
                    break
            if base is None:
                continue  # proportional roots cannot happen for distinct reflections
            i, j, det = base
            members = []
            for t, delta in items:
                ca = Fraction(delta[i] * gamma[j] - delta[j] * gamma[i], det)
                cb = Fraction(beta[i] * delta[j] - beta[j] * delta[i], det)
                if all(
                    Fraction(delta[k]) == ca * beta[k] + cb * gamma[k]
                    for k in range(n_axis)
                ):
                    members.append((t, ca, cb))
            if len(members) >= 3:
                span_key = frozenset(t for t, _, _ in members)
                if span_key not in seen_spans:
                    seen_spans.add(span_key)
                    spans.append(members)
    return spans


def _validate_reflection_order(order: ReflectionOrderSpec):
    """Check totality, the final-section split and dihedral monotonicity."""
    seen = {}
    for t, k in order.keys.items():
        if k in seen:
            return {"kind": "tie", "labels": [t.word_str, seen[k].word_str]}
        seen[k] = t
    for members in _rank2_subsets(order):
        def cmp(m1, m2):
            # angular order inside the half-plane cone
            cross = m1[1] * m2[2] - m1[2] * m2[1]
            return -1 if cross > 0 else (1 if cross < 0 else 0)

        members = sorted(members, key=cmp_to_key(cmp))
        keys = [order.keys[t] for t, _, _ in members]
        ascending = all(keys[i] < keys[i + 1] for i in range(len(keys) - 1))
        descending = all(keys[i] > keys[i + 1] for i in range(len(keys) - 1))
        if not (ascending or descending):
            return {
                "kind": "dihedral",
                "labels": [t.word_str for t, _, _ in members],
            }
    return None


def build_reflection_order(
    group: CoxeterGroup,
    labels,
    final_nodes,
    seed: int = 1729,
    retries: int = 8,
) -> ReflectionOrderSpec:
    """Slope construction: weight 1 on the distinguished nodes, 0 elsewhere,
    divided by root height, with a seeded rational perturbation to break
    ties; validated and re-perturbed on failure."""
    final_nodes = tuple(final_nodes)
    final_idx = frozenset(group.node_index(j) for j in final_nodes)
    reflections = sorted(set(labels), key=lambda t: t.sort_key)
    roots = {t: group.root_of_reflection(t) for t in reflections}
    heights = [root_height(r) for r in roots.values()]
    h_max = max(heights, default=1)
    denom = 8 * h_max**3 + 8
    rng = random.Random(seed)
    last_failure = None
    for _ in range(max(retries, 1)):
        eps = [
            Fraction(rng.randrange(1, 2**20), 2**20) / denom
            for _ in range(group.rank)
        ]
        order = ReflectionOrderSpec(group=group, final_nodes=final_nodes, seed=seed)
        order.roots = roots
        for t, r in roots.items():
            inside = root_support(r) <= final_idx
            theta1 = sum(c for i, c in enumerate(r) if i in final_idx)
            theta1 += sum(e * c for e, c in zip(eps, r))
            slope = Fraction(theta1) / root_height(r)
            order.keys[t] = (2 if inside else 0, slope)
        last_failure = _validate_reflection_order(order)
        if last_failure is None:
            return order
    raise PosetError(f"no valid reflection order found: {last_failure}")


# -- edge labelling and EL verification ---------------------------------------


def label_edges_by_reflection(poset: FinitePoset, element_of, ratio):
    """Label each cover (i, j) by the reflection ratio(lower, upper).

    `element_of` maps a poset index to a group element; `ratio` combines the
    two into the labelling reflection.  Oddness and involutivity are
    asserted for every label.
    """
    labels = {}
    for i, j in poset.covers():
        t = ratio(element_of(i), element_of(j))
        g = t.group
        if t.length % 2 != 1 or g.multiply(t, t) is not g.identity:
            raise PosetError(
                f"cover {poset.names[i]} < {poset.names[j]} has non-reflection label {t!r}"
            )
        labels[(i, j)] = t
    return labels


def _interval_chains(poset, labels, key, bottom, top, chain_cap):
    """All maximal chains of [bottom, top], read from the top down.

    Yields (label_key_tuple, chain_indices_top_to_bottom).
    """
    _, down_cov = poset._adjacency()
    members = set(poset.interval(bottom, top))
    out = []
    stack = [(top, [top], [])]
    while stack:
        cur, path, lab = stack.pop()
        if cur == bottom:
            out.append((tuple(lab), list(path)))
            if len(out) > chain_cap:
                raise CapExceeded(
                    f"more than {chain_cap} maximal chains in one interval"
                )
            continue
        for prev in down_cov[cur]:
            if prev in members:
                stack.append(
                    (prev, path + [prev], lab + [key(labels[(prev, cur)])])
                )
    return out


def _strictly_increasing(tup) -> bool:
    return all(tup[i] < tup[i + 1] for i in range(len(tup) - 1))


def el_check(
    poset: FinitePoset,
    labels,
    key,
    chain_cap: int = 100_000,
    collect_bottom: int | None = None,
):
    """Verify the EL property on every interval.

    For each interval the label tuples of all top-to-bottom maximal chains
    are enumerated; exactly one must strictly ascend and that one must be
    the lexicographic minimum.  When `collect_bottom` is given, the
    lexicographically least chain of every interval based there is
    returned for downstream scans.
    """
    violations = []
    chains_from_bottom = {}
    intervals = 0
    max_chain_count = 0
    for i in range(poset.n):
        for j in sorted(poset.up[i]):
            if i == j:
                continue
            intervals += 1
            chains = _interval_chains(poset, labels, key, i, j, chain_cap)
            max_chain_count = max(max_chain_count, len(chains))
            increasing = [c for c in chains if _strictly_increasing(c[0])]
            least = min(chains, key=lambda c: c[0])
            if collect_bottom is not None and i == collect_bottom:
                chains_from_bottom[j] = least
            if len(increasing) != 1:
                violations.append(
                    {
                        "interval": [poset.names[i], poset.names[j]],
                        "problem": f"{len(increasing)} increasing chains",
                        "chains": [
                            [poset.names[k] for k in c[1]] for c in chains[:8]
                        ],
                    }
                )
            elif increasing[0][0] != least[0]:
                violations.append(
                    {
                        "interval": [poset.names[i], poset.names[j]],
                        "problem": "increasing chain is not lexicographically least",
                        "increasing": [poset.names[k] for k in increasing[0][1]],
                        "least": [poset.names[k] for k in least[1]],
                    }
                )
    report = {
        "check": "el",
        "pass": not violations,
        "intervals": intervals,
        "max_chains_in_interval": max_chain_count,
        "violations": violations,
    }
    if collect_bottom is not None:
        report["least_chains_from_bottom"] = chains_from_bottom
    return report


# -- export -------------------------------------------------------------------


def poset_to_dict(poset: FinitePoset, labels=None, label_name=None) -> dict:
    out = {
        "elements": list(poset.names),
        "covers": [list(e) for e in poset.covers()],
    }
    if poset.rank is not None:
        out["rank"] = list(poset.rank)
    if labels is not None:
        if label_name is None:
            label_name = lambda t: t if isinstance(t, str) else t.word_str
        out["labels"] = {
            f"{i},{j}": label_name(t) for (i, j), t in sorted(labels.items())
        }
    return out


def poset_to_dot(poset: FinitePoset, labels=None, title: str = "poset") -> str:
    lines = [f'digraph "{title}" {{', "  rankdir=BT;"]
    for i, name in enumerate(poset.names):
        lines.append(f'  n{i} [label="{name}"];')
    if poset.rank is not None:
        by_rank: dict[int, list[int]] = {}
        for i, r in enumerate(poset.rank):
            by_rank.setdefault(r, []).append(i)
        for r in sorted(by_rank):
            row = "; ".join(f"n{i}" for i in by_rank[r])
            lines.append(f"  {{ rank=same; {row}; }}")
    for i, j in poset.covers():
        attr = ""
        if labels is not None and (i, j) in labels:
            t = labels[(i, j)]
            name = t if isinstance(t, str) else t.word_str
            attr = f' [label="{name}"]'
        lines.append(f"  n{i} -> n{j}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
