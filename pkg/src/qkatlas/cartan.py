"""Generalized Cartan matrices and glued diagrams.

A generalized Cartan matrix (GCM) has 2 on the diagonal, non-positive
integers off the diagonal and a symmetric zero pattern.  Given a GCM over
a node set I and a subset K, two doubled diagrams are built by gluing two
copies of I along K: the identity gluing and the gluing along the diagram
automorphism induced by the longest element of the K-parabolic (computed
elsewhere; here it enters as an explicit involution on K).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

INFINITE_BOND = float("inf")

_BOND_TABLE = {0: 2, 1: 3, 2: 4, 3: 6}


class CartanError(ValueError):
    """Invalid Cartan data or an ill-posed gluing request."""


def flat_name(node: str) -> str:
    return f"{node}#flat"


def sharp_name(node: str) -> str:
    return f"{node}#sharp"


@dataclass(frozen=True)
class GeneralizedCartanMatrix:
    """Integer Cartan data over an ordered tuple of string node ids."""

    nodes: tuple[str, ...]
    entries: tuple[tuple[int, ...], ...]
    symmetrizable: bool = True
    name: str = ""

    def index(self, node: str) -> int:
        try:
            return self.nodes.index(node)
        except ValueError:
            raise CartanError(f"unknown node {node!r}") from None

    def entry(self, i: str, j: str) -> int:
        return self.entries[self.index(i)][self.index(j)]

    def bond_order(self, i: str, j: str):
        """Coxeter bond order m(i, j), for display only."""
        p = self.entry(i, j) * self.entry(j, i)
        return _BOND_TABLE.get(p, INFINITE_BOND)

    def edges(self) -> list[tuple[str, str, object]]:
        out = []
        for a, i in enumerate(self.nodes):
            for b in range(a + 1, len(self.nodes)):
                j = self.nodes[b]
                if self.entries[a][b] != 0:
                    out.append((i, j, self.bond_order(i, j)))
        return out

    def ascii_diagram(self) -> str:
        lines = ["nodes: " + " ".join(self.nodes)]
        for i, j, m in self.edges():
            label = "inf" if m == INFINITE_BOND else str(int(m))
            lines.append(f"  {i} --{label}-- {j}")
        if not self.edges():
            lines.append("  (no bonds)")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "nodes": list(self.nodes),
            "cartan": [list(row) for row in self.entries],
        }


def _symmetrizable(entries: tuple[tuple[int, ...], ...]) -> bool:
    # chase d_j = d_i * a_ij / a_ji along diagram edges, then verify globally
    n = len(entries)
    d: list[Fraction | None] = [None] * n
    for root in range(n):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        queue = [root]
        while queue:
            i = queue.pop()
            for j in range(n):
                if i == j or entries[i][j] == 0:
                    continue
                ratio = d[i] * Fraction(entries[i][j], entries[j][i])
                if d[j] is None:
                    d[j] = ratio
                    queue.append(j)
                elif d[j] != ratio:
                    return False
    for i in range(n):
        for j in range(n):
            if entries[i][j] != 0 and d[i] * entries[i][j] != d[j] * entries[j][i]:
                return False
    return True


def validate(matrix, nodes, name: str = "") -> GeneralizedCartanMatrix:
    """Check GCM axioms; symmetrizability is recorded as a flag, not an error."""
    nodes = tuple(str(n) for n in nodes)
    if len(set(nodes)) != len(nodes):
        raise CartanError("duplicate node identifiers")
    entries = tuple(tuple(int(x) for x in row) for row in matrix)
    n = len(nodes)
    if len(entries) != n or any(len(row) != n for row in entries):
        raise CartanError(f"matrix shape does not match {n} nodes")
    for a in range(n):
        if entries[a][a] != 2:
            raise CartanError(f"diagonal entry at node {nodes[a]!r} is {entries[a][a]}, expected 2")
        for b in range(n):
            if a == b:
                continue
            if entries[a][b] > 0:
                raise CartanError(
                    f"positive off-diagonal entry {entries[a][b]} at ({nodes[a]!r}, {nodes[b]!r})"
                )
            if (entries[a][b] == 0) != (entries[b][a] == 0):
                raise CartanError(
                    f"zero-asymmetry at ({nodes[a]!r}, {nodes[b]!r}): "
                    f"{entries[a][b]} vs {entries[b][a]}"
                )
    return GeneralizedCartanMatrix(
        nodes=nodes,
        entries=entries,
        symmetrizable=_symmetrizable(entries),
        name=name,
    )


@dataclass(frozen=True)
class GluedDiagram:
    """Two copies of a base diagram glued along K.

    flat_map / sharp_map send base nodes into the glued node set; the
    natural maps project each copy back.  For the involution gluing the
    projections differ on the shared nodes.
    """

    matrix: GeneralizedCartanMatrix
    base: GeneralizedCartanMatrix
    K: tuple[str, ...]
    flat_map: dict[str, str]
    sharp_map: dict[str, str]
    natural_flat: dict[str, str]
    natural_sharp: dict[str, str]
    mode: str = "tilde"
    partner: tuple[tuple[str, str], ...] = ()

    @property
    def flat_nodes(self) -> frozenset[str]:
        return frozenset(self.flat_map.values())

    @property
    def sharp_nodes(self) -> frozenset[str]:
        return frozenset(self.sharp_map.values())

    def to_dict(self) -> dict:
        d = self.matrix.to_dict()
        d["K"] = list(self.K)
        d["flat_map"] = dict(sorted(self.flat_map.items()))
        d["sharp_map"] = dict(sorted(self.sharp_map.items()))
        return d


def _check_K(base: GeneralizedCartanMatrix, K) -> tuple[str, ...]:
    K = tuple(str(k) for k in K)
    for k in K:
        if k not in base.nodes:
            raise CartanError(f"K contains {k!r}, not a node of the diagram")
    if len(set(K)) != len(K):
        raise CartanError("K contains repeated nodes")
    # keep base node order
    return tuple(n for n in base.nodes if n in K)


def _build_glued(base, K, natural_flat, natural_sharp, glued_nodes, mode, partner):
    entries = []
    for p in glued_nodes:
        row = []
        for q in glued_nodes:
            vals = set()
            if p in natural_flat and q in natural_flat:
                vals.add(base.entry(natural_flat[p], natural_flat[q]))
            if p in natural_sharp and q in natural_sharp:
                vals.add(base.entry(natural_sharp[p], natural_sharp[q]))
            if len(vals) > 1:
                raise CartanError(
                    f"inconsistent gluing at ({p!r}, {q!r}): entries {sorted(vals)}"
                )
            row.append(vals.pop() if vals else 0)
        entries.append(tuple(row))
    suffix = "~" if mode == "tilde" else "^"
    matrix = validate(entries, glued_nodes, name=f"{base.name}{suffix}{{{','.join(K)}}}")
    flat_map = {n: flat_name(n) for n in base.nodes}
    if mode == "tilde":
        sharp_map = {n: flat_name(n) if n in K else sharp_name(n) for n in base.nodes}
    else:
        pmap = dict(partner)
        sharp_map = {
            n: flat_name(pmap[n]) if n in K else sharp_name(n) for n in base.nodes
        }
    return GluedDiagram(
        matrix=matrix,
        base=base,
        K=K,
        flat_map=flat_map,
        sharp_map=sharp_map,
        natural_flat=natural_flat,
        natural_sharp=natural_sharp,
        mode=mode,
        partner=tuple(sorted(partner)) if partner else (),
    )


def glue_tilde(base: GeneralizedCartanMatrix, K) -> GluedDiagram:
    """Glue two copies of the diagram along K, identifying k-flat with k-sharp."""
    K = _check_K(base, K)
    glued_nodes = [flat_name(n) for n in base.nodes]
    glued_nodes += [sharp_name(n) for n in base.nodes if n not in K]
    natural_flat = {flat_name(n): n for n in base.nodes}
    natural_sharp = {sharp_name(n): n for n in base.nodes if n not in K}
    natural_sharp.update({flat_name(k): k for k in K})
    return _build_glued(base, K, natural_flat, natural_sharp, glued_nodes, "tilde", ())


def glue_breve(base: GeneralizedCartanMatrix, K, partner: dict[str, str]) -> GluedDiagram:
    """Glue along K twisted by an involution j -> j' of K.

    The shared node carrying j-flat is identified with partner(j)-sharp;
    consistency a[j1][j2] == a[j1'][j2'] is asserted before gluing.
    """
    K = _check_K(base, K)
    if set(partner) != set(K) or set(partner.values()) != set(K):
        raise CartanError("partner must be a bijection of K onto itself")
    for j in K:
        if partner[partner[j]] != j:
            raise CartanError(f"partner is not an involution: {j!r} -> {partner[j]!r} -> {partner[partner[j]]!r}")
    for j1 in K:
        for j2 in K:
            if base.entry(j1, j2) != base.entry(partner[j1], partner[j2]):
                raise CartanError(
                    f"partner does not preserve Cartan entries at ({j1!r}, {j2!r})"
                )
    glued_nodes = [flat_name(n) for n in base.nodes]
    glued_nodes += [sharp_name(n) for n in base.nodes if n not in K]
    natural_flat = {flat_name(n): n for n in base.nodes}
    natural_sharp = {sharp_name(n): n for n in base.nodes if n not in K}
    # j#flat is partner(j)#sharp, so it projects to partner(j) on the sharp side
    natural_sharp.update({flat_name(j): partner[j] for j in K})
    return _build_glued(
        base, K, natural_flat, natural_sharp, glued_nodes, "breve", tuple(partner.items())
    )


def load_group_file(path) -> tuple[GeneralizedCartanMatrix, list[str]]:
    """Read {"name", "nodes", "cartan", "K"} from a JSON group definition."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        gcm = validate(data["cartan"], data["nodes"], name=data.get("name", ""))
    except KeyError as exc:
        raise CartanError(f"group file missing field {exc}") from None
    K = [str(k) for k in data.get("K", [])]
    for k in K:
        if k not in gcm.nodes:
            raise CartanError(f"group file K contains unknown node {k!r}")
    return gcm, K
