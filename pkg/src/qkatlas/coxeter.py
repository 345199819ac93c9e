"""Exact arithmetic in the Coxeter group of a generalized Cartan matrix.

Elements are stored as their integer action on the root lattice in the
simple-root basis (columns = images of the simple roots), which is a
faithful representation for any GCM-defined system.  All integers are
exact Python ints; entries grow without overflow in affine and wilder
types.  Every enumeration is length-windowed with explicit caps so that
infinite groups are first-class.

Convention: the generator for node j sends a root b to b - <a_j^vee, b> a_j
where <a_j^vee, a_i> = A[i][j].
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .cartan import GeneralizedCartanMatrix


class CoxeterError(ValueError):
    pass


class CapExceeded(RuntimeError):
    """A length-windowed enumeration ran past its configured cap."""


RootCoords = tuple[int, ...]


def root_is_positive(coords: RootCoords) -> bool:
    return any(c > 0 for c in coords) and all(c >= 0 for c in coords)


def root_is_negative(coords: RootCoords) -> bool:
    return any(c < 0 for c in coords) and all(c <= 0 for c in coords)


def root_negate(coords: RootCoords) -> RootCoords:
    return tuple(-c for c in coords)


def root_height(coords: RootCoords) -> int:
    return sum(coords)


def root_support(coords: RootCoords) -> frozenset[int]:
    return frozenset(i for i, c in enumerate(coords) if c != 0)


class GroupElement:
    """Immutable group element; equality and hashing via the action matrix."""

    __slots__ = ("group", "cols", "_length", "_word", "_inverse", "_lower")

    def __init__(self, group: "CoxeterGroup", cols: tuple[RootCoords, ...]):
        self.group = group
        self.cols = cols
        self._length: int | None = None
        self._word: tuple[int, ...] | None = None
        self._inverse: "GroupElement | None" = None
        self._lower = None

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.group is other.group
            and self.cols == other.cols
        )

    def __hash__(self):
        return hash(self.cols)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.multiply(self, other)

    @property
    def length(self) -> int:
        if self._length is None:
            self.group._strip(self)
        return self._length

    @property
    def word(self) -> tuple[int, ...]:
        """A canonical reduced word, as node indices."""
        if self._word is None:
            self.group._strip(self)
        return self._word

    @property
    def word_ids(self) -> tuple[str, ...]:
        return tuple(self.group.nodes[i] for i in self.word)

    @property
    def word_str(self) -> str:
        return " ".join(self.word_ids) if self.word else "e"

    @property
    def sort_key(self):
        return (self.length, self.word)

    def apply(self, coords: RootCoords) -> RootCoords:
        cols = self.cols
        n = len(cols)
        return tuple(
            sum(coords[j] * cols[j][i] for j in range(n)) for i in range(n)
        )

    def inverse(self) -> "GroupElement":
        return self.group.inverse(self)

    def to_json(self) -> dict:
        return {"word": list(self.word_ids), "length": self.length}

    def __repr__(self):
        return f"<{self.word_str}>"


class Reflection(NamedTuple):
    root: RootCoords
    element: GroupElement


class CoxeterGroup:
    def __init__(
        self,
        cartan: GeneralizedCartanMatrix,
        *,
        ball_cap: int = 1_000_000,
        length_cap: int = 10_000,
    ):
        self.cartan = cartan
        self.nodes: tuple[str, ...] = cartan.nodes
        self.rank = len(self.nodes)
        self.ball_cap = ball_cap
        self.length_cap = length_cap
        self._node_index = {n: i for i, n in enumerate(self.nodes)}
        self._intern: dict[tuple[RootCoords, ...], GroupElement] = {}

        n = self.rank
        eye = tuple(
            tuple(1 if i == j else 0 for i in range(n)) for j in range(n)
        )
        self.identity = self._make(eye)
        self.identity._length = 0
        self.identity._word = ()

        a = cartan.entries
        self._gens: list[GroupElement] = []
        for j in range(n):
            cols = []
            for i in range(n):
                col = list(self.identity.cols[i])
                col[j] -= a[i][j]
                cols.append(tuple(col))
            g = self._make(tuple(cols))
            g._length = 1
            g._word = (j,)
            self._gens.append(g)

        self._levels: dict = {}       # J-key -> list of levels (sorted lists)
        self._levels_seen: dict = {}  # J-key -> set of elements
        self._saturated: dict = {}    # J-key -> bool
        self._bruhat: dict = {}

    # -- basics ---------------------------------------------------------

    def node_index(self, node: str) -> int:
        try:
            return self._node_index[str(node)]
        except KeyError:
            raise CoxeterError(f"unknown node {node!r}") from None

    def _make(self, cols) -> GroupElement:
        el = self._intern.get(cols)
        if el is None:
            el = GroupElement(self, cols)
            self._intern[cols] = el
        return el

    def generator(self, node: str) -> GroupElement:
        return self._gens[self.node_index(node)]

    def generator_by_index(self, j: int) -> GroupElement:
        return self._gens[j]

    def multiply(self, u: GroupElement, v: GroupElement) -> GroupElement:
        if u.group is not self or v.group is not self:
            raise CoxeterError("elements belong to a different group")
        if u is self.identity:
            return v
        if v is self.identity:
            return u
        return self._make(tuple(u.apply(col) for col in v.cols))

    def inverse(self, u: GroupElement) -> GroupElement:
        if u._inverse is None:
            inv = self.identity
            for j in reversed(u.word):
                inv = self.multiply(inv, self._gens[j])
            u._inverse = inv
            inv._inverse = u
            if inv._length is None:
                inv._length = u.length
        return u._inverse

    def element_from_word(self, word: Iterable[str]) -> GroupElement:
        out = self.identity
        for node in word:
            out = self.multiply(out, self.generator(node))
        return out

    def element_from_indices(self, word: Iterable[int]) -> GroupElement:
        out = self.identity
        for j in word:
            out = self.multiply(out, self._gens[j])
        return out

    def parse_word(self, text: str) -> GroupElement:
        text = text.strip()
        if text in ("", "e"):
            return self.identity
        return self.element_from_word(text.split())

    # -- length, words, descents ----------------------------------------

    def _first_right_descent(self, w: GroupElement) -> int | None:
        for j, col in enumerate(w.cols):
            if root_is_negative(col):
                return j
        return None

    def _strip(self, w: GroupElement) -> None:
        """Greedy right-descent stripping; fills in length and a reduced word."""
        rev = []
        cur = w
        for _ in range(self.length_cap):
            j = self._first_right_descent(cur)
            if j is None:
                break
            rev.append(j)
            cur = self.multiply(cur, self._gens[j])
        else:
            raise CoxeterError("element failed to reduce within the length cap")
        if cur is not self.identity:
            raise CoxeterError("corrupted element: no descent but not the identity")
        if w._length is None:
            w._length = len(rev)
        w._word = tuple(reversed(rev))

    def has_right_descent(self, w: GroupElement, node: str) -> bool:
        return root_is_negative(w.cols[self.node_index(node)])

    def right_descents(self, w: GroupElement) -> tuple[str, ...]:
        return tuple(
            self.nodes[j] for j, col in enumerate(w.cols) if root_is_negative(col)
        )

    def has_left_descent(self, w: GroupElement, node: str) -> bool:
        return root_is_negative(self.inverse(w).cols[self.node_index(node)])

    # -- Bruhat order -----------------------------------------------------

    def bruhat_leq(self, v: GroupElement, w: GroupElement) -> bool:
        if v is w or v is self.identity:
            return True
        if v.length > w.length:
            return False
        key = (v, w)
        cached = self._bruhat.get(key)
        if cached is not None:
            return cached
        j = self._first_right_descent(w)
        ws = self.multiply(w, self._gens[j])
        if root_is_negative(v.cols[j]):
            res = self.bruhat_leq(self.multiply(v, self._gens[j]), ws)
        else:
            res = self.bruhat_leq(v, ws)
        self._bruhat[key] = res
        return res

    def bruhat_lower_set(self, w: GroupElement) -> frozenset[GroupElement]:
        """All v <= w, via products of subwords of a reduced word of w."""
        if w._lower is None:
            cur = {self.identity}
            for j in w.word:
                g = self._gens[j]
                cur |= {self.multiply(x, g) for x in cur}
            w._lower = frozenset(cur)
        return w._lower

    # -- windowed enumeration ---------------------------------------------

    def _j_key(self, J) -> tuple[int, ...] | None:
        if J is None:
            return None
        return tuple(sorted(self.node_index(j) for j in J))

    def _grow(self, key, want_levels: int | None, cap: int) -> bool:
        """Extend the BFS levels for a generator subset.

        Returns True once the group is saturated (last level empty).
        want_levels=None grows until saturation or cap.
        """
        gens = (
            self._gens
            if key is None
            else [self._gens[j] for j in key]
        )
        levels = self._levels.setdefault(key, [[self.identity]])
        seen = self._levels_seen.setdefault(key, {self.identity})
        if self._saturated.get(key):
            return True
        while want_levels is None or len(levels) - 1 < want_levels:
            depth = len(levels)
            nxt = set()
            for x in levels[-1]:
                for g in gens:
                    y = self.multiply(x, g)
                    if y not in seen:
                        nxt.add(y)
            for y in nxt:
                if y._length is None:
                    y._length = depth
            seen.update(nxt)
            if not nxt:
                self._saturated[key] = True
                return True
            if len(seen) > cap:
                raise CapExceeded(
                    f"enumeration cap exceeded: more than {cap} elements "
                    f"within length {depth}"
                )
            levels.append(sorted(nxt, key=lambda e: e.sort_key))
        return bool(self._saturated.get(key))

    def ball(self, max_length: int, J=None) -> tuple[GroupElement, ...]:
        """All elements of length <= max_length (of W_J when J is given)."""
        if max_length < 0:
            return ()
        key = self._j_key(J)
        self._grow(key, max_length, self.ball_cap)
        levels = self._levels[key]
        out = []
        for lv in levels[: max_length + 1]:
            out.extend(lv)
        return tuple(out)

    def enumerate_parabolic(self, J, max_length: int) -> tuple[GroupElement, ...]:
        return self.ball(max_length, J=J)

    def saturate_parabolic(self, J, cap: int | None = None) -> tuple[GroupElement, ...]:
        """Enumerate all of W_J, erroring if it does not close under the cap."""
        key = self._j_key(J)
        cap = self.ball_cap if cap is None else cap
        try:
            self._grow(key, None, cap)
        except CapExceeded:
            raise CoxeterError(
                f"parabolic on {sorted(J)} not finite (or cap {cap} too small): "
                f"saturation not reached within {cap} elements"
            ) from None
        out = []
        for lv in self._levels[key]:
            out.extend(lv)
        return tuple(out)

    def longest_element(self, J, cap: int | None = None) -> GroupElement:
        els = self.saturate_parabolic(J, cap)
        top_len = max(e.length for e in els)
        tops = [e for e in els if e.length == top_len]
        if len(tops) != 1:
            raise CoxeterError("parabolic has no unique longest element")
        return tops[0]

    def minus_wK_permutation(self, K, cap: int | None = None) -> dict[str, str]:
        """The involution j -> j' on K with w_K(a_j) = -a_{j'}."""
        K = tuple(K)
        wk = self.longest_element(K, cap)
        out = {}
        for k in K:
            img = wk.cols[self.node_index(k)]
            neg = root_negate(img)
            target = None
            for kp in K:
                i = self.node_index(kp)
                if neg == self.identity.cols[i]:
                    target = kp
                    break
            if target is None:
                raise CoxeterError(f"longest element does not send node {k!r} to minus a simple root")
            out[k] = target
        for k in K:
            if out[out[k]] != k:
                raise CoxeterError("computed permutation is not an involution")
        return out

    # -- cosets and parabolic factorization --------------------------------

    def min_coset_rep_right(self, w: GroupElement, J) -> GroupElement:
        """Representative of w W_J with no right descent in J."""
        idx = [self.node_index(j) for j in J]
        cur = w
        changed = True
        while changed:
            changed = False
            for j in idx:
                if root_is_negative(cur.cols[j]):
                    cur = self.multiply(cur, self._gens[j])
                    changed = True
        return cur

    def min_coset_rep_left(self, w: GroupElement, J) -> GroupElement:
        return self.inverse(self.min_coset_rep_right(self.inverse(w), J))

    def parabolic_factorize_left(self, w: GroupElement, J):
        """w = x*y with x in W_J and y having no left descent in J; lengths add."""
        y = self.min_coset_rep_left(w, J)
        x = self.multiply(w, self.inverse(y))
        return x, y

    def in_parabolic(self, w: GroupElement, J) -> bool:
        allowed = {self.node_index(j) for j in J}
        return all(j in allowed for j in w.word)

    # -- roots and reflections ----------------------------------------------

    def simple_root(self, node: str) -> RootCoords:
        return self.identity.cols[self.node_index(node)]

    def pairing(self, j: int, coords: RootCoords) -> int:
        """<a_j^vee, b> = sum_i b_i A[i][j]."""
        a = self.cartan.entries
        return sum(coords[i] * a[i][j] for i in range(self.rank))

    def reflect_root(self, j: int, coords: RootCoords) -> RootCoords:
        p = self.pairing(j, coords)
        out = list(coords)
        out[j] -= p
        return tuple(out)

    def positive_real_roots(self, bound: int) -> tuple[RootCoords, ...]:
        """Positive roots w(a_i) reachable with length(w) + 1 <= bound."""
        roots = set()
        for w in self.ball(max(bound - 1, -1)):
            for col in w.cols:
                if root_is_positive(col):
                    roots.add(col)
        return tuple(sorted(roots, key=lambda r: (root_height(r), r)))

    def reflection_from_root(self, root: RootCoords) -> Reflection:
        """The reflection with positive root `root`, independent of how the
        root was produced."""
        if not root_is_positive(root):
            raise CoxeterError(f"not a positive root vector: {root}")
        path = []
        cur = tuple(root)
        for _ in range(self.length_cap):
            simple = None
            for j in range(self.rank):
                if cur == self.identity.cols[j]:
                    simple = j
                    break
            if simple is not None:
                break
            j = next(
                (j for j in range(self.rank) if self.pairing(j, cur) > 0), None
            )
            if j is None or not root_is_positive(self.reflect_root(j, cur)):
                raise CoxeterError(f"not a real root vector: {root}")
            path.append(j)
            cur = self.reflect_root(j, cur)
        else:
            raise CoxeterError(f"root did not reduce within the cap: {root}")
        t = self._gens[simple]
        for j in reversed(path):
            g = self._gens[j]
            t = self.multiply(self.multiply(g, t), g)
        return Reflection(root=tuple(root), element=t)

    def root_of_reflection(self, t: GroupElement) -> RootCoords:
        """The unique positive root negated by the reflection t."""
        for beta in self.inversion_set(t):
            if t.apply(beta) == root_negate(beta):
                return beta
        raise CoxeterError(f"element {t!r} is not a reflection")

    def inversion_set(self, w: GroupElement, restrict_to_J=None) -> tuple[RootCoords, ...]:
        """Positive roots sent negative by w, from a reduced word (exact)."""
        word = w.word
        k = len(word)
        roots = []
        suffix = self.identity
        for m in range(k - 1, -1, -1):
            roots.append(suffix.apply(self.identity.cols[word[m]]))
            suffix = self.multiply(suffix, self._gens[word[m]])
        if restrict_to_J is not None:
            allowed = frozenset(self.node_index(j) for j in restrict_to_J)
            roots = [r for r in roots if root_support(r) <= allowed]
        return tuple(sorted(set(roots), key=lambda r: (root_height(r), r)))

    # -- word embeddings -----------------------------------------------------

    def embed_word(
        self, w: GroupElement, node_map: dict[str, str], target: "CoxeterGroup"
    ) -> GroupElement:
        """Relabel a reduced word along node_map and multiply in the target."""
        return target.element_from_word(node_map[c] for c in w.word_ids)
