"""Exact resistance computations on pm-graphs and the derived invariants.

An edge of length l is a resistor of resistance l; loops carry no current.
Everything here is exact rational arithmetic: the grounded weighted
Laplacian is solved by Gaussian elimination over Fractions, and the tau
integral is evaluated symbolically from per-edge quadratic resistance
profiles obtained by subdivision sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadParameters,
    GenusTooSmall,
    ProfileInterpolationMismatch,
    UnknownVertex,
)
from .pmgraph import DeltaVector, PmGraph


# -- exact linear algebra ----------------------------------------------------


def _solve(A: list[list[Fraction]], rhs: list[list[Fraction]]) -> list[list[Fraction]]:
    """Solve A x = b for each column b of rhs, destructively, over Fractions."""
    n = len(A)
    m = [row[:] + [col[i] for col in rhs] for i, row in enumerate(A)]
    width = n + len(rhs)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular reduced Laplacian")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [[m[i][n + j] for i in range(n)] for j in range(len(rhs))]


def _reduced_laplacian(graph: PmGraph, base: str) -> tuple[list[str], list[list[Fraction]]]:
    order = [v.id for v in graph.vertices if v.id != base]
    idx = {vid: i for i, vid in enumerate(order)}
    n = len(order)
    L = [[Fraction(0)] * n for _ in range(n)]
    for e in graph.edges:
        if e.is_loop:
            continue
        c = 1 / e.length
        for a, b in ((e.u, e.v), (e.v, e.u)):
            if a in idx:
                L[idx[a]][idx[a]] += c
                if b in idx:
                    L[idx[a]][idx[b]] -= c
    return order, L


def effective_resistance(graph: PmGraph, p: str, q: str) -> Fraction:
    """Electrical resistance between vertices p and q, exactly."""
    graph.vertex(p)
    graph.vertex(q)
    if p == q:
        return Fraction(0)
    order, L = _reduced_laplacian(graph, p)
    idx = {vid: i for i, vid in enumerate(order)}
    rhs = [Fraction(0)] * len(order)
    rhs[idx[q]] = Fraction(1)
    (x,) = _solve(L, [rhs])
    return x[idx[q]]


def resistance_matrix(graph: PmGraph) -> dict[tuple[str, str], Fraction]:
    """All pairwise effective resistances from a single matrix inversion."""
    ids = [v.id for v in graph.vertices]
    if len(ids) == 1:
        return {(ids[0], ids[0]): Fraction(0)}
    base = ids[0]
    order, L = _reduced_laplacian(graph, base)
    n = len(order)
    eye = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    G = _solve(L, eye)  # columns of the inverse
    idx = {vid: i for i, vid in enumerate(order)}

    def green(a: str, b: str) -> Fraction:
        if a == base or b == base:
            return Fraction(0)
        return G[idx[b]][idx[a]]

    out: dict[tuple[str, str], Fraction] = {}
    for a in ids:
        for b in ids:
            out[(a, b)] = green(a, a) + green(b, b) - 2 * green(a, b)
    return out


# -- resistance profiles and tau ----------------------------------------------


@dataclass(frozen=True)
class ResistanceProfile:
    """Quadratic coefficients of t -> r(base, x(t)) along an edge.

    r = a t^2 + b t + c for arc length t in [0, length], measured from the
    edge's stored u endpoint.  a <= 0 always; a = 0 exactly for bridges.
    """

    edge_id: str
    base: str
    length: Fraction
    a: Fraction
    b: Fraction
    c: Fraction

    def __call__(self, t: Fraction) -> Fraction:
        return self.a * t * t + self.b * t + self.c

    def derivative_square_integral(self) -> Fraction:
        """Integral of (dr/dt)^2 over the edge."""
        a, b, L = self.a, self.b, self.length
        return Fraction(4, 3) * a * a * L**3 + 2 * a * b * L * L + b * b * L


def _subdivision_sample(graph: PmGraph, base: str, eid: str, t: Fraction) -> Fraction:
    sub = graph.subdivide_edge(eid, t)
    old = {v.id for v in graph.vertices}
    (wid,) = [v.id for v in sub.vertices if v.id not in old]
    return effective_resistance(sub, base, wid)


def _profile_from_samples(
    graph: PmGraph,
    base: str,
    eid: str,
    r_u: Fraction,
    r_v: Fraction,
) -> ResistanceProfile:
    e = graph.edge(eid)
    L = e.length
    mid = _subdivision_sample(graph, base, eid, L / 2)
    a = 2 * (r_u - 2 * mid + r_v) / (L * L)
    b = (4 * mid - 3 * r_u - r_v) / L
    prof = ResistanceProfile(eid, base, L, a, b, r_u)
    quarter = _subdivision_sample(graph, base, eid, L / 4)
    if prof(L / 4) != quarter:
        raise ProfileInterpolationMismatch(
            f"edge {eid!r}: quadratic through t=0,L/2,L misses the t=L/4 sample"
        )
    return prof


def resistance_profile(graph: PmGraph, base: str, eid: str) -> ResistanceProfile:
    """Exact quadratic profile of r(base, .) along an edge.

    Interpolates through the endpoint resistances and a midpoint subdivision
    sample, then verifies against an independent quarter-point sample.
    """
    graph.vertex(base)
    e = graph.edge(eid)
    r_u = effective_resistance(graph, base, e.u)
    r_v = effective_resistance(graph, base, e.v)
    return _profile_from_samples(graph, base, eid, r_u, r_v)


def tau(graph: PmGraph, base: str | None = None) -> Fraction:
    """The tau invariant (1/4) * integral of (dr(base,x)/dx)^2 over the graph.

    Independent of the base vertex; the default base is the smallest id.
    """
    if not graph.edges:
        return Fraction(0)
    if base is None:
        base = min(v.id for v in graph.vertices)
    else:
        graph.vertex(base)
    rvec: dict[str, Fraction] = {base: Fraction(0)}
    order, L = _reduced_laplacian(graph, base)
    if order:
        n = len(order)
        eye = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
        G = _solve(L, eye)
        for i, vid in enumerate(order):
            rvec[vid] = G[i][i]
    total = Fraction(0)
    for e in graph.edges:
        prof = _profile_from_samples(graph, base, e.id, rvec[e.u], rvec[e.v])
        total += prof.derivative_square_integral()
    return total / 4


def theta_invariant(graph: PmGraph) -> Fraction:
    """Sum of K(p) K(q) r(p,q) over ordered vertex pairs."""
    K = graph.canonical_divisor()
    r = resistance_matrix(graph)
    ids = [v.id for v in graph.vertices]
    out = Fraction(0)
    for i, p in enumerate(ids):
        for q in ids[i + 1 :]:
            out += 2 * K[p] * K[q] * r[(p, q)]
    return out


def lambda_invariant(graph: PmGraph) -> Fraction:
    """Zhang's lambda via the Cinkir expression
    (8g+4) lambda = 6(g-1) tau + theta/2 + (g+1) delta/2."""
    g = graph.genus
    t = tau(graph)
    th = theta_invariant(graph)
    d = graph.total_length
    return (6 * (g - 1) * t + Fraction(th, 2) + Fraction(g + 1, 2) * d) / (8 * g + 4)


def slope_mu(graph: PmGraph) -> Fraction:
    """Slope mu = (8g+4) lambda - g delta_0 - 4 sum_h h(g-h) delta_h; >= 0."""
    g = graph.genus
    lam = lambda_invariant(graph)
    delta = graph.delta()
    out = (8 * g + 4) * lam - g * delta[0]
    for h in range(1, g // 2 + 1):
        out -= 4 * h * (g - h) * delta[h]
    return out


def phi_from_lambda_epsilon(g: int, lam, eps, delta):
    """Invert lambda = (g-1)/(6(2g+1)) * phi + (delta + eps)/12 for phi."""
    if g < 2:
        raise GenusTooSmall(f"phi identity needs g >= 2, got {g}")
    return (lam - Fraction(1, 12) * (delta + eps)) * 6 * (2 * g + 1) / (g - 1)


def height_jump_twogon(g: int, h: int, m1, m2) -> Fraction:
    """Height jump for a family degenerating to two smooth components of
    genera h and g-h-1 joined at two points of thickness m1, m2."""
    m1 = Fraction(m1)
    m2 = Fraction(m2)
    if g < 2 or not 0 <= h <= g - 1 or m1 <= 0 or m2 <= 0:
        raise BadParameters(f"invalid two-gon parameters g={g}, h={h}, m=({m1},{m2})")
    return Fraction(4) * m1 * m2 * (g - h - 1) * h / (m1 + m2)


# -- report ---------------------------------------------------------------------


@dataclass(frozen=True)
class InvariantReport:
    genus: int
    delta: DeltaVector
    tau: Fraction
    theta: Fraction
    lambda_: Fraction
    mu: Fraction

    def as_dict(self) -> dict:
        return {
            "genus": self.genus,
            "delta": [str(x) for x in self.delta.by_type],
            "delta_total": str(self.delta.total),
            "tau": str(self.tau),
            "theta": str(self.theta),
            "lambda": str(self.lambda_),
            "mu": str(self.mu),
        }


def invariant_report(graph: PmGraph) -> InvariantReport:
    g = graph.genus
    t = tau(graph)
    th = theta_invariant(graph)
    delta = graph.delta()
    lam = (6 * (g - 1) * t + Fraction(th, 2) + Fraction(g + 1, 2) * delta.total) / (
        8 * g + 4
    )
    mu = (8 * g + 4) * lam - g * delta[0]
    for h in range(1, g // 2 + 1):
        mu -= 4 * h * (g - h) * delta[h]
    return InvariantReport(g, delta, t, th, lam, mu)
