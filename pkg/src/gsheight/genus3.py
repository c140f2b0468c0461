"""Genus-3 specifics: h-type edge pairs, vanishing-order bounds for the
modular discriminant chi'_18, Horikawa-index bookkeeping, and the local
lower bound on per-place height contributions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (
    BadParameters,
    EliminableVerticesPresent,
    InconsistentOrd,
    WrongGenus,
)
from .electrical import lambda_invariant
from .pmgraph import PmGraph


def _require_genus3(graph: PmGraph):
    if graph.genus != 3:
        raise WrongGenus(f"operation needs genus 3, got {graph.genus}")


def find_h_type_pair(graph: PmGraph) -> tuple[str, str] | None:
    """The unique pair of edges {e, e'} whose complementary contraction is a
    two-gon with both vertices of induced genus 1, if it exists.

    The graph must have genus 3 and no eliminable vertices.
    """
    _require_genus3(graph)
    if graph.eliminable_vertices():
        raise EliminableVerticesPresent(
            "apply smooth_eliminable before searching for an h-type pair"
        )
    found = []
    for e1, e2 in combinations(graph.edges, 2):
        r = graph.restrict_to([e1.id, e2.id])
        if len(r.vertices) != 2:
            continue
        if any(e.is_loop for e in r.edges):
            continue  # loop + bridge is a wedge, not irreducible
        if all(v.genus == 1 for v in r.vertices):
            found.append((e1.id, e2.id))
    assert len(found) <= 1, f"multiple h-type pairs {found}"
    return found[0] if found else None


def h_invariant(graph: PmGraph) -> Fraction:
    """min of the two h-type pair weights, or 0 when no pair exists."""
    _require_genus3(graph)
    smooth = graph.smooth_eliminable()
    pair = find_h_type_pair(smooth)
    if pair is None:
        return Fraction(0)
    return min(smooth.edge(pair[0]).length, smooth.edge(pair[1]).length)


def ord_chi18_lower_bound(graph: PmGraph) -> Fraction:
    """Certified lower bound 2h + 2 delta_0 + 6 delta_1 for ord_v(chi'_18)."""
    _require_genus3(graph)
    delta = graph.delta()
    return 2 * h_invariant(graph) + 2 * delta[0] + 6 * delta[1]


def horikawa_index_from_ord(ord_chi18, delta, graph: PmGraph | None = None) -> Fraction:
    """Invert ord = 2 Ind + 2 delta for the Horikawa index.

    When a graph is supplied, additionally checks Ind >= h + 2 delta_1.
    """
    ord_chi18 = Fraction(ord_chi18)
    delta = Fraction(delta)
    if ord_chi18 < 2 * delta:
        raise InconsistentOrd(f"ord {ord_chi18} < 2 delta = {2 * delta}")
    ind = (ord_chi18 - 2 * delta) / 2
    if graph is not None:
        _require_genus3(graph)
        floor = h_invariant(graph) + 2 * graph.delta()[1]
        if ind < floor:
            raise InconsistentOrd(
                f"Horikawa index {ind} below graph bound h + 2 delta_1 = {floor}"
            )
    return ind


def local_contribution_bound(graph: PmGraph) -> Fraction:
    """B = h/9 + delta_0/9 + delta_1/3 - lambda, a lower bound for the local
    quantity (1/18) ord_v(chi'_18) - lambda.  May be negative in general."""
    _require_genus3(graph)
    delta = graph.delta()
    return (
        Fraction(h_invariant(graph), 9)
        + Fraction(delta[0], 9)
        + Fraction(delta[1], 3)
        - lambda_invariant(graph)
    )


@dataclass(frozen=True)
class TwogonBound:
    """Lower bound value for a two-gon fiber with thicknesses m1, m2 plus the
    quadratic-form witness certifying its positivity."""

    m1: Fraction
    m2: Fraction
    value: Fraction
    witness: Fraction  # 24 m^2 - 4 m n + n^2 with m = min, n = |m1 - m2|

    @property
    def positive(self) -> bool:
        return self.value > 0


def twogon_contribution(m1, m2) -> TwogonBound:
    """(m1+m2)/252 + min(m1,m2)/9 - m1 m2 / (7 (m1+m2)), with witness.

    The value equals witness / (252 (m1+m2)), so positivity of the quadratic
    form 24 m^2 - 4 m n + n^2 certifies positivity of the bound.
    """
    m1 = Fraction(m1)
    m2 = Fraction(m2)
    if m1 <= 0 or m2 <= 0:
        raise BadParameters(f"thicknesses must be positive, got ({m1}, {m2})")
    value = (
        Fraction(m1 + m2, 252)
        + Fraction(min(m1, m2), 9)
        - Fraction(1, 7) * m1 * m2 / (m1 + m2)
    )
    m = min(m1, m2)
    n = abs(m2 - m1)
    witness = 24 * m * m - 4 * m * n + n * n
    assert value == witness / (252 * (m1 + m2))
    return TwogonBound(m1, m2, value, witness)


def phi_yamaki(graph: PmGraph) -> Fraction:
    """Yamaki's Phi of the graph with all type-1 edges contracted, recovered
    from B(graph) = Phi(contracted)/12 + delta_1/21."""
    _require_genus3(graph)
    types, delta = graph.classify_edges()
    b = local_contribution_bound(graph)
    return 12 * (b - Fraction(delta[1], 21))


@dataclass(frozen=True)
class Genus3Report:
    h: Fraction
    h_type_pair: tuple[str, str] | None
    ord_lower_bound: Fraction
    local_bound: Fraction
    phi: Fraction

    def as_dict(self) -> dict:
        return {
            "h": str(self.h),
            "h_type_pair": list(self.h_type_pair) if self.h_type_pair else None,
            "ord_chi18_lower_bound": str(self.ord_lower_bound),
            "local_contribution_bound": str(self.local_bound),
            "local_bound_positive": self.local_bound > 0,
            "phi_yamaki": str(self.phi),
        }


def genus3_report(graph: PmGraph) -> Genus3Report:
    _require_genus3(graph)
    smooth = graph.smooth_eliminable()
    return Genus3Report(
        h=h_invariant(graph),
        h_type_pair=find_h_type_pair(smooth),
        ord_lower_bound=ord_chi18_lower_bound(graph),
        local_bound=local_contribution_bound(graph),
        phi=phi_yamaki(graph),
    )
