"""The stratum poset Q_K, the glued atlas group and the order embeddings.

Q_K consists of pairs (v, w) with w a minimal coset representative for K
and v Bruhat-below w; (v', w') precedes (v, w) when some u in the
K-parabolic satisfies v <= v'u <= w'u <= w.  The embedding into the glued
group sends (v, w) to flat(v) * sharp(w^-1); its image is checked to be an
isomorphic, convex, explicitly characterized subposet for the twisted
order attached to the flat copy.  The involution-glued variant indexes by
flat(w * w_K) * sharp(v^-1) and is probed for its order direction rather
than asserted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .cartan import GeneralizedCartanMatrix, GluedDiagram, glue_breve, glue_tilde
from .coxeter import CoxeterError, CoxeterGroup, GroupElement
from .posets import (
    BOTTOM,
    FinitePoset,
    PosetError,
    augment_zero_hat,
    label_edges_by_reflection,
)
from .twisted import TwistedContext


class QKElement(NamedTuple):
    v: GroupElement
    w: GroupElement

    @property
    def name(self) -> str:
        return f"{self.v.word_str} | {self.w.word_str}"

    def sort_key(self):
        return (self.w.sort_key, self.v.sort_key)


class QKContext:
    def __init__(self, group: CoxeterGroup, K):
        self.group = group
        self.K = tuple(sorted(K, key=group.node_index))
        self._leq: dict[tuple[QKElement, QKElement], bool] = {}

    def coset_reps(self, max_length: int) -> tuple[GroupElement, ...]:
        has = self.group.has_right_descent
        return tuple(
            w
            for w in self.group.ball(max_length)
            if not any(has(w, k) for k in self.K)
        )

    def enumerate(self, max_length: int) -> tuple[QKElement, ...]:
        """All (v, w) with w a K-minimal representative of length <= bound.

        The window is downward closed, so intervals with their top inside
        are complete.
        """
        out = []
        for w in self.coset_reps(max_length):
            for v in sorted(self.group.bruhat_lower_set(w), key=lambda e: e.sort_key):
                out.append(QKElement(v, w))
        return tuple(sorted(out, key=QKElement.sort_key))

    def leq(self, p: QKElement, q: QKElement) -> bool:
        """p below q via a witness u in the K-parabolic."""
        if p == q:
            return True
        key = (p, q)
        cached = self._leq.get(key)
        if cached is not None:
            return cached
        g = self.group
        delta = q.w.length - p.w.length
        res = False
        if delta >= 0:
            for u in g.ball(delta, J=self.K):
                vu = g.multiply(p.v, u)
                wu = g.multiply(p.w, u)
                if (
                    g.bruhat_leq(q.v, vu)
                    and g.bruhat_leq(vu, wu)
                    and g.bruhat_leq(wu, q.w)
                ):
                    res = True
                    break
        self._leq[key] = res
        return res

    def minimal_elements(self, max_length: int) -> tuple[QKElement, ...]:
        return tuple(QKElement(r, r) for r in self.coset_reps(max_length))


class AtlasContext:
    """A base group with subset K, its glued diagram and twisted order."""

    def __init__(
        self,
        base: CoxeterGroup,
        K,
        mode: str = "tilde",
        finite_cap: int = 20_000,
        **group_opts,
    ):
        if mode not in ("tilde", "breve"):
            raise CoxeterError(f"unknown gluing mode {mode!r}")
        self.base = base
        self.mode = mode
        self.qk = QKContext(base, K)
        self.K = self.qk.K
        self.w_K = None
        if mode == "tilde":
            self.diagram: GluedDiagram = glue_tilde(base.cartan, self.K)
        else:
            partner = base.minus_wK_permutation(self.K, cap=finite_cap)
            self.w_K = base.longest_element(self.K, cap=finite_cap)
            self.diagram = glue_breve(base.cartan, self.K, partner)
        opts = {"ball_cap": base.ball_cap, "length_cap": base.length_cap}
        opts.update(group_opts)
        self.glued = CoxeterGroup(self.diagram.matrix, **opts)
        self.iflat = tuple(
            n for n in self.glued.nodes if n in self.diagram.flat_nodes
        )
        self.isharp = tuple(
            n for n in self.glued.nodes if n in self.diagram.sharp_nodes
        )
        self.twisted = TwistedContext(self.glued, self.iflat)
        self._nu: dict[QKElement, GroupElement] = {}

    def embed_flat(self, w: GroupElement) -> GroupElement:
        return self.base.embed_word(w, self.diagram.flat_map, self.glued)

    def embed_sharp(self, w: GroupElement) -> GroupElement:
        return self.base.embed_word(w, self.diagram.sharp_map, self.glued)

    def nu(self, p: QKElement) -> GroupElement:
        """Stratum index in the glued group."""
        cached = self._nu.get(p)
        if cached is not None:
            return cached
        g = self.glued
        if self.mode == "tilde":
            out = g.multiply(
                self.embed_flat(p.v), self.embed_sharp(self.base.inverse(p.w))
            )
        else:
            out = g.multiply(
                self.embed_flat(self.base.multiply(p.w, self.w_K)),
                self.embed_sharp(self.base.inverse(p.v)),
            )
        self._nu[p] = out
        return out

    def stratum_rank(self, p: QKElement) -> int:
        """Twisted length of the image; for the involution gluing the sign
        is flipped so that rank still increases upward in Q_K."""
        jl = self.twisted.jlength(self.nu(p))
        return jl if self.mode == "tilde" else -jl


def _pair_name(p: QKElement) -> str:
    return p.name


def verify_iso_tilde(atlas: AtlasContext, max_length: int) -> dict:
    """Order isomorphism between the window of Q_K and its image."""
    els = atlas.qk.enumerate(max_length)
    tw = atlas.twisted
    violations = []
    images = [atlas.nu(p) for p in els]
    if len(set(images)) != len(images):
        violations.append({"problem": "embedding is not injective on the window"})
    for i, p in enumerate(els):
        for j, q in enumerate(els):
            lhs = atlas.qk.leq(p, q)
            rhs = tw.jleq(images[i], images[j])
            if lhs != rhs:
                violations.append(
                    {
                        "pair": [_pair_name(p), _pair_name(q)],
                        "qk": lhs,
                        "twisted": rhs,
                    }
                )
    return {
        "check": "iso",
        "mode": atlas.mode,
        "pass": not violations,
        "elements": len(els),
        "violations": violations,
    }


def verify_image_tilde(atlas: AtlasContext, max_length: int) -> dict:
    """Image characterization inside the window of products x * y^-1."""
    g = atlas.glued
    tw = atlas.twisted
    els = atlas.qk.enumerate(max_length)
    image = {atlas.nu(p) for p in els}
    anchors = [
        atlas.nu(QKElement(r, r)) for r in atlas.qk.coset_reps(max_length)
    ]
    xs = g.ball(max_length, J=atlas.iflat)
    has = g.has_right_descent
    ys = [
        y
        for y in g.ball(max_length, J=atlas.isharp)
        if not any(has(y, j) for j in atlas.iflat)
    ]
    violations = []
    window = 0
    for x in xs:
        for y in ys:
            wt = g.multiply(x, g.inverse(y))
            window += 1
            member = wt in image
            x2, m2 = g.parabolic_factorize_left(wt, atlas.iflat)
            in_product = g.in_parabolic(m2, atlas.isharp)
            predicted = in_product and any(tw.jleq(anchor, wt) for anchor in anchors)
            if member != predicted:
                violations.append(
                    {
                        "element": wt.word_str,
                        "in_image": member,
                        "predicted": predicted,
                    }
                )
    return {
        "check": "image",
        "mode": atlas.mode,
        "pass": not violations,
        "window": window,
        "violations": violations,
    }


def verify_convexity_tilde(atlas: AtlasContext, max_length: int) -> dict:
    """Exact twisted intervals between image points stay inside the image."""
    tw = atlas.twisted
    els = atlas.qk.enumerate(max_length)
    image = {atlas.nu(p): p for p in els}
    points = sorted(image, key=lambda e: (tw.jlength(e), e.sort_key))
    violations = []
    intervals = 0
    for a in points:
        for b in points:
            if a is b or not tw.jleq(a, b):
                continue
            intervals += 1
            for c in tw.jinterval(a, b):
                if c not in image:
                    violations.append(
                        {
                            "endpoints": [a.word_str, b.word_str],
                            "escapee": c.word_str,
                        }
                    )
    return {
        "check": "convex",
        "mode": atlas.mode,
        "pass": not violations,
        "intervals": intervals,
        "violations": violations,
    }


def verify_iso_breve(atlas: AtlasContext, max_length: int) -> dict:
    """Empirically determine the order behaviour of the involution-glued
    indexing; the direction is recorded, not presumed."""
    if atlas.mode != "breve":
        raise CoxeterError("breve verification requires a breve atlas")
    els = atlas.qk.enumerate(max_length)
    tw = atlas.twisted
    images = [atlas.nu(p) for p in els]
    reversing = True
    preserving = True
    counterexamples = {"reversing": None, "preserving": None}
    for i, p in enumerate(els):
        for j, q in enumerate(els):
            lhs = atlas.qk.leq(p, q)
            rev = tw.jleq(images[j], images[i])
            pre = tw.jleq(images[i], images[j])
            if lhs != rev and reversing:
                reversing = False
                counterexamples["reversing"] = [_pair_name(p), _pair_name(q)]
            if lhs != pre and preserving:
                preserving = False
                counterexamples["preserving"] = [_pair_name(p), _pair_name(q)]
    if reversing and preserving:
        direction = "both"
    elif reversing:
        direction = "reversing"
    elif preserving:
        direction = "preserving"
    else:
        direction = "neither"
    return {
        "check": "breve",
        "mode": atlas.mode,
        "pass": direction != "neither",
        "direction": direction,
        "elements": len(els),
        "counterexamples": counterexamples,
    }


# -- poset bundle ---------------------------------------------------------------


@dataclass
class QKPosetBundle:
    atlas: AtlasContext
    max_length: int
    poset: FinitePoset                      # augmented when requested
    labels: dict
    augmented: bool
    minimal: tuple[int, ...]                # indices in the (possibly shifted) poset

    @property
    def bottom_index(self) -> int | None:
        return 0 if self.augmented else None


def build_qk_poset(atlas: AtlasContext, max_length: int, augment: bool = True) -> QKPosetBundle:
    """Window of Q_K as an explicit poset, ranked by the twisted length of
    the image, with reflection labels on covers and a labelled bottom."""
    els = atlas.qk.enumerate(max_length)
    ranks = [atlas.stratum_rank(p) for p in els]
    names = [p.name for p in els]
    poset = FinitePoset.from_leq(
        els, atlas.qk.leq, names=names, rank=ranks
    )
    minimal = poset.minimal_indices()
    expected_minimal = set(atlas.qk.minimal_elements(max_length))
    if {els[i] for i in minimal} != expected_minimal:
        raise PosetError("minimal strata are not exactly the diagonal pairs")

    tw_order = atlas.twisted
    glued = atlas.glued

    def ratio(p_low: QKElement, p_up: QKElement) -> GroupElement:
        lo, hi = atlas.nu(p_low), atlas.nu(p_up)
        if atlas.mode == "breve":
            lo, hi = hi, lo  # image order is probed as reversing
        # right ratio: upper = lower * t in the twisted order
        return glued.multiply(glued.inverse(lo), hi)

    labels = label_edges_by_reflection(poset, lambda i: poset.elements[i], ratio)
    if not augment:
        return QKPosetBundle(
            atlas=atlas,
            max_length=max_length,
            poset=poset,
            labels=labels,
            augmented=False,
            minimal=minimal,
        )
    big, new_edges = augment_zero_hat(poset, minimal)
    big_labels = {(i + 1, j + 1): t for (i, j), t in labels.items()}
    for e in new_edges:
        big_labels[e] = BOTTOM
    return QKPosetBundle(
        atlas=atlas,
        max_length=max_length,
        poset=big,
        labels=big_labels,
        augmented=True,
        minimal=tuple(m + 1 for m in minimal),
    )


def structural_scan(bundle: QKPosetBundle, el_report: dict) -> dict:
    """Post-hoc scan of the least chains from the bottom: they should avoid
    labels inside the flat parabolic and enter the bottom through the
    diagonal pair of the top's v-part."""
    if not bundle.augmented:
        raise PosetError("scan requires the augmented poset")
    chains = el_report.get("least_chains_from_bottom")
    if chains is None:
        raise PosetError("el report carries no collected chains")
    atlas = bundle.atlas
    poset = bundle.poset
    iflat = set(atlas.iflat)
    failures = []
    for top, (keys, path) in sorted(chains.items()):
        p = poset.elements[top]
        labels = [
            bundle.labels[(path[i + 1], path[i])] for i in range(len(path) - 1)
        ]
        flat_labels = [
            t.word_str
            for t in labels
            if t != BOTTOM and atlas.glued.in_parabolic(t, iflat)
        ]
        r = atlas.base.min_coset_rep_right(p.v, atlas.K)
        penultimate = poset.elements[path[-2]]
        expected = QKElement(r, r)
        entry = {
            "top": poset.names[top],
            "chain": [poset.names[i] for i in path],
        }
        if flat_labels:
            entry["flat_labels"] = flat_labels
            failures.append(entry)
        elif penultimate != expected:
            entry["expected_entry"] = expected.name
            failures.append(entry)
    return {
        "check": "structural-scan",
        "pass": not failures,
        "tops": len(chains),
        "failures": failures,
    }
