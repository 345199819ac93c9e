"""The J-twisted Bruhat order and twisted length.

For a subset J of the nodes, every element w factors uniquely as x * m
with x in the J-parabolic and m without left J-descents; writing y = m^-1
(so y has no right J-descent and w = x * y^-1), the twisted length of w
is length(y) - length(x).  The order is decided by a finite witness
search: x'(y')^-1 is twisted-below x y^-1 iff some u in W_J satisfies
x <= x'u and y'u <= y, with length(u) bounded by length(y) - length(y').

A transitive-closure oracle over single-reflection moves is kept as an
independent cross-check; it is windowed and therefore only sound, not
complete, near the window boundary.
"""

from __future__ import annotations

from .coxeter import (
    CapExceeded,
    CoxeterError,
    CoxeterGroup,
    GroupElement,
    root_is_negative,
    root_is_positive,
    root_negate,
    root_support,
)


class TwistedContext:
    def __init__(self, group: CoxeterGroup, J):
        self.group = group
        self.J = tuple(sorted(J, key=group.node_index))
        self._Jidx = frozenset(group.node_index(j) for j in self.J)
        self._decomp: dict[GroupElement, tuple[GroupElement, GroupElement]] = {}
        self._jleq: dict[tuple[GroupElement, GroupElement], bool] = {}

    # -- roots ------------------------------------------------------------

    def root_in_delta_J(self, coords) -> bool:
        return root_support(coords) <= self._Jidx

    def psi_contains(self, coords) -> bool:
        """Membership in the twisting root set: negative J-roots together
        with positive roots outside the J-subsystem."""
        if root_is_positive(coords):
            return not self.root_in_delta_J(coords)
        if root_is_negative(coords):
            return self.root_in_delta_J(coords)
        raise CoxeterError(f"not a sign-coherent root: {coords}")

    # -- decomposition and twisted length ----------------------------------

    def decompose(self, w: GroupElement) -> tuple[GroupElement, GroupElement]:
        """w = x * y^-1 with x in W_J and y a minimal coset representative
        (no right J-descent)."""
        cached = self._decomp.get(w)
        if cached is not None:
            return cached
        x, m = self.group.parabolic_factorize_left(w, self.J)
        y = self.group.inverse(m)
        self._decomp[w] = (x, y)
        return x, y

    def jlength(self, w: GroupElement) -> int:
        x, y = self.decompose(w)
        return y.length - x.length

    def jlength_by_inversions(self, w: GroupElement) -> int:
        inv_j = self.group.inversion_set(w, restrict_to_J=self.J)
        return w.length - 2 * len(inv_j)

    # -- the order ----------------------------------------------------------

    def _witness_candidates(self, max_len: int):
        return self.group.ball(max_len, J=self.J)

    def jleq(self, a: GroupElement, b: GroupElement) -> bool:
        if a is b:
            return True
        key = (a, b)
        cached = self._jleq.get(key)
        if cached is not None:
            return cached
        xa, ya = self.decompose(a)
        xb, yb = self.decompose(b)
        delta = yb.length - ya.length
        res = False
        if delta >= 0:
            leq = self.group.bruhat_leq
            for u in self._witness_candidates(delta):
                if leq(xb, self.group.multiply(xa, u)) and leq(
                    self.group.multiply(ya, u), yb
                ):
                    res = True
                    break
        self._jleq[key] = res
        return res

    def jleq_witness(self, a: GroupElement, b: GroupElement) -> GroupElement | None:
        """First witness u (by length, then word) proving a below b, if any."""
        xa, ya = self.decompose(a)
        xb, yb = self.decompose(b)
        delta = yb.length - ya.length
        if delta < 0:
            return None
        leq = self.group.bruhat_leq
        for u in self._witness_candidates(delta):
            if leq(xb, self.group.multiply(xa, u)) and leq(
                self.group.multiply(ya, u), yb
            ):
                return u
        return None

    # -- windowed closure oracle ---------------------------------------------

    def reflections_with_length_upto(self, bound: int):
        """All reflections t with length(t) <= bound, with their positive roots."""
        depth = (bound + 1) // 2 + 1
        out = []
        for beta in self.group.positive_real_roots(depth):
            t = self.group.reflection_from_root(beta).element
            if t.length <= bound:
                out.append((beta, t))
        return out

    def jleq_closure_oracle(self, max_length: int) -> frozenset[tuple[GroupElement, GroupElement]]:
        """Reflexive-transitive closure, inside the length ball, of the
        single-reflection lowering moves.  Sound everywhere; complete only
        away from the window boundary."""
        ball = self.group.ball(max_length)
        ball_set = set(ball)
        refls = self.reflections_with_length_upto(2 * max_length + 1)
        down: dict[GroupElement, list[GroupElement]] = {w: [] for w in ball}
        for w in ball:
            winv = self.group.inverse(w)
            for beta, t in refls:
                psi_root = (
                    root_negate(beta) if self.root_in_delta_J(beta) else beta
                )
                if root_is_negative(winv.apply(psi_root)):
                    tw = self.group.multiply(t, w)
                    if tw in ball_set:
                        down[w].append(tw)
        rel: set[tuple[GroupElement, GroupElement]] = set()
        for top in ball:
            seen = {top}
            stack = [top]
            while stack:
                cur = stack.pop()
                for nxt in down[cur]:
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            for low in seen:
                rel.add((low, top))
        return frozenset(rel)

    # -- intervals -------------------------------------------------------------

    def coset_reps_ball(self, max_length: int) -> tuple[GroupElement, ...]:
        """Elements without right J-descent, up to the length bound."""
        J = self.J
        has = self.group.has_right_descent
        return tuple(
            w
            for w in self.group.ball(max_length)
            if not any(has(w, j) for j in J)
        )

    def jinterval(self, a: GroupElement, b: GroupElement) -> tuple[GroupElement, ...]:
        """Exact interval {c : a <= c <= b}; enumeration bounds are forced
        by the witness criterion, so nothing escapes the candidate set."""
        if not self.jleq(a, b):
            raise CoxeterError("interval endpoints are not comparable")
        xa, ya = self.decompose(a)
        xb, yb = self.decompose(b)
        x_bound = xa.length + yb.length - ya.length
        xs = self.group.ball(x_bound, J=self.J)
        ys = self.coset_reps_ball(yb.length)
        out = []
        for x in xs:
            for y in ys:
                c = self.group.multiply(x, self.group.inverse(y))
                if self.jleq(a, c) and self.jleq(c, b):
                    out.append(c)
        return tuple(sorted(set(out), key=lambda e: (self.jlength(e), e.sort_key)))

    def jcovers(self, a: GroupElement, b: GroupElement) -> tuple[tuple[GroupElement, GroupElement], ...]:
        """Cover pairs (lower, upper) of the interval [a, b]."""
        elements = self.jinterval(a, b)
        n = len(elements)
        idx = {e: i for i, e in enumerate(elements)}
        less = [[False] * n for _ in range(n)]
        for i, p in enumerate(elements):
            for j, q in enumerate(elements):
                if i != j and self.jleq(p, q):
                    less[i][j] = True
        covers = []
        for i in range(n):
            for j in range(n):
                if not less[i][j]:
                    continue
                if any(less[i][k] and less[k][j] for k in range(n)):
                    continue
                covers.append((elements[i], elements[j]))
        return tuple(covers)

    # -- auxiliary lemma-style search -------------------------------------------

    def lege_witness(
        self, x: GroupElement, x_prime: GroupElement, u: GroupElement
    ) -> GroupElement | None:
        """Given x <= x'u, search for u' <= u with x (u')^-1 <= x'."""
        g = self.group
        if not g.bruhat_leq(x, g.multiply(x_prime, u)):
            raise CoxeterError("precondition x <= x'u fails")
        for up in sorted(g.bruhat_lower_set(u), key=lambda e: e.sort_key):
            if g.bruhat_leq(g.multiply(x, g.inverse(up)), x_prime):
                return up
        return None
