"""Metric geometry of Cayley graphs: geodesics, hulls, δ, approximating trees."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2
from typing import Callable, Sequence

from .chains import Chain, as_chain, boundary
from .groups import CayleyBall, GroupElement, InvalidInput


# ---------------------------------------------------------------------------
# Geodesics and hulls
# ---------------------------------------------------------------------------

class PathSet(list):
    """List of geodesic vertex paths with a boundary-truncation flag."""

    truncated = False


class Hull(frozenset):
    """Element set with a boundary-truncation flag."""

    truncated = False

    def __new__(cls, items=(), truncated=False):
        obj = super().__new__(cls, items)
        obj.truncated = truncated
        return obj


def _geodesic_steps(x: GroupElement, y: GroupElement):
    model = x.model
    d = model.distance(x, y)
    out = []
    for s in model.generator_elements:
        z = model.multiply(x, s)
        if model.distance(z, y) == d - 1:
            out.append(z)
    return out


def all_geodesics(x: GroupElement, y: GroupElement) -> list[tuple]:
    """Every geodesic edge path from x to y in the Cayley graph, as vertex tuples."""
    if x is y:
        return [(x,)]
    out = []
    for z in _geodesic_steps(x, y):
        for tail in all_geodesics(z, y):
            out.append((x,) + tail)
    return out


def geodesics(ball: CayleyBall, x: GroupElement, y: GroupElement) -> PathSet:
    if x not in ball or y not in ball:
        raise InvalidInput("endpoints must lie in the ball")
    paths = PathSet(sorted(all_geodesics(x, y), key=lambda p: tuple(g.key for g in p)))
    paths.truncated = any(g not in ball or ball.on_boundary(g) for p in paths for g in p[1:-1])
    return paths


def interval(x: GroupElement, y: GroupElement) -> set:
    """geod({x, y}): all vertices on geodesics from x to y."""
    seen = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for z in frontier:
            if z is y:
                continue
            for w in _geodesic_steps(z, y):
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def geodesic_hull(ball: CayleyBall, Y, lam: int = 0) -> Hull:
    """geod_λ(Y) inside the ball: x with d(y,x)+d(x,y′) ≤ d(y,y′)+λ for some y,y′ ∈ Y."""
    Y = list(dict.fromkeys(Y))
    if any(y not in ball for y in Y):
        raise InvalidInput("hull witnesses must lie in the ball")
    pairs = [(y, z, ball.dist(y, z)) for i, y in enumerate(Y) for z in Y[i:]]
    members = []
    for x in ball.elements:
        for y, z, d in pairs:
            if ball.dist(y, x) + ball.dist(x, z) <= d + lam:
                members.append(x)
                break
    truncated = any(ball.on_boundary(x) for x in members) and ball.radius > 0
    # a hull point on the boundary sphere may have neighbours in the hull outside the ball
    return Hull(members, truncated and _escapes(ball, members, pairs, lam))


def _escapes(ball, members, pairs, lam) -> bool:
    model = ball.model
    for x in members:
        if not ball.on_boundary(x):
            continue
        for s in model.generator_elements:
            z = model.multiply(x, s)
            if z in ball:
                continue
            for y, w, d in pairs:
                if model.distance(y, z) + model.distance(z, w) <= d + lam:
                    return True
    return False


def group_hull(Y, lam: int = 0) -> set:
    """geod_λ(Y) in the whole group, by search outward from Y."""
    Y = list(dict.fromkeys(Y))
    model = Y[0].model
    pairs = [(y, z, model.distance(y, z)) for i, y in enumerate(Y) for z in Y[i:]]
    out = set()
    for y, z, d in pairs:
        # every hull point for (y, z) lies within (d + λ) of y; grow from y
        radius = d + lam
        seen = {y}
        frontier = [y]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                for s in model.generator_elements:
                    w = model.multiply(x, s)
                    if w not in seen and model.distance(y, w) + model.distance(w, z) <= d + lam:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        out |= seen
    return out


def hull_excess(points, Y) -> int:
    """Least λ with points ⊆ geod_λ(Y)."""
    Y = list(dict.fromkeys(Y))
    model = Y[0].model
    worst = 0
    for x in points:
        best = min(model.distance(y, x) + model.distance(x, z) - model.distance(y, z)
                   for i, y in enumerate(Y) for z in Y[i:])
        worst = max(worst, best)
    return worst


# ---------------------------------------------------------------------------
# δ estimation
# ---------------------------------------------------------------------------

@dataclass
class DeltaEstimate:
    value: Fraction
    triangles: int
    exhaustive: bool


def _dist_to_path(model, p, path) -> int:
    return min(model.distance(p, q) for q in path)


def triangle_delta(x: GroupElement, y: GroupElement, z: GroupElement) -> int:
    """Least δ such that every geodesic triangle on x, y, z is δ-thin (vertex points)."""
    model = x.model
    sides = [all_geodesics(x, y), all_geodesics(y, z), all_geodesics(z, x)]
    worst = 0
    for i in range(3):
        others = [sides[(i + 1) % 3], sides[(i + 2) % 3]]
        for path in sides[i]:
            for p in path:
                far = [max(_dist_to_path(model, p, q) for q in side) for side in others]
                worst = max(worst, min(far))
    return worst


def delta_estimate(ball: CayleyBall, budget: int = 4000, seed: int = 0) -> DeltaEstimate:
    """Thin-triangle constant over triangles (e, y, z) with y, z in the ball.

    Left invariance lets one vertex sit at e.  Exhaustive when the number of
    unordered pairs fits `budget`, otherwise a seeded random sample.
    """
    if ball.radius < 2:
        raise InvalidInput("delta_estimate needs radius at least 2")
    e = ball.model.identity
    els = ball.elements
    pairs_total = len(els) * (len(els) + 1) // 2
    if pairs_total <= budget:
        pairs = [(els[i], els[j]) for i in range(len(els)) for j in range(i, len(els))]
        exhaustive = True
    else:
        rng = random.Random(seed)
        pairs = [(rng.choice(els), rng.choice(els)) for _ in range(budget)]
        exhaustive = False
    worst = 0
    for y, z in pairs:
        worst = max(worst, triangle_delta(e, y, z))
    return DeltaEstimate(Fraction(worst), len(pairs), exhaustive)


def four_point_delta(points: Sequence, dist: Callable, base=None) -> Fraction:
    """Gromov-product hyperbolicity constant of a finite metric space.

    With a base point: max over x,y,z of min((x|z),(y|z)) − (x|y).  Without
    one: maximised over all base points.
    """
    bases = [base] if base is not None else list(points)
    worst = Fraction(0)
    for w in bases:
        gp = {}
        for x in points:
            for y in points:
                gp[x, y] = Fraction(dist(x, w) + dist(y, w) - dist(x, y), 2)
        for x in points:
            for y in points:
                for z in points:
                    worst = max(worst, min(gp[x, z], gp[y, z]) - gp[x, y])
    return worst


# ---------------------------------------------------------------------------
# Approximating trees
# ---------------------------------------------------------------------------

class MetricTree:
    """Finite rooted metric tree glued from rays, one per point of F.

    A point is (ray, height); two representatives (i, t) and (j, t) agree when
    t ≤ G[i][j], where G is the chain-closure of the Gromov products.  Points
    are stored canonically with the smallest such ray index.
    """

    def __init__(self, radial: list, closure: list):
        self.radial = radial  # height of the leaf of each ray
        self.G = closure
        self.base = (0, Fraction(0))
        n = len(radial)
        pts = {self.base}
        edges = set()
        for i in range(n):
            hs = sorted({Fraction(0), radial[i]} | {min(closure[i][j], radial[i]) for j in range(n)})
            prev = None
            for h in hs:
                p = self.canon(i, h)
                pts.add(p)
                if prev is not None and prev != p:
                    edges.add((prev, p, h - prev[1]))
                prev = p
        self.vertices = sorted(pts, key=lambda p: (p[1], p[0]))
        self.vertex_index = {p: k for k, p in enumerate(self.vertices)}
        self.edges = sorted(edges, key=lambda e: (self.vertex_index[e[0]], self.vertex_index[e[1]]))

    def canon(self, ray: int, t) -> tuple:
        t = Fraction(t)
        if t < 0 or t > self.radial[ray]:
            raise InvalidInput("height outside the ray")
        row = self.G[ray]
        for j in range(len(self.radial)):
            if row[j] >= t and self.radial[j] >= t:
                return (j, t)
        return (ray, t)

    def distance(self, p, q) -> Fraction:
        (i, s), (j, t) = p, q
        meet = min(s, t, self.G[i][j]) if i != j else min(s, t)
        return s + t - 2 * meet

    def on_segment(self, p, ray: int) -> bool:
        """Is p on the segment from the base to the leaf of `ray`?"""
        i, t = p
        return t <= self.radial[ray] and (i == ray or self.G[i][ray] >= t)

    def integer_points(self) -> list:
        """T′: points at integer distance from the base."""
        pts = set()
        for i, r in enumerate(self.radial):
            for t in range(int(r) + 1):
                pts.add(self.canon(i, t))
        return sorted(pts, key=lambda p: (p[1], p[0]))

    def path_from_base(self, p) -> list:
        i, t = p
        if t.denominator != 1:
            raise InvalidInput("point not in T′")
        return [self.canon(i, k) for k in range(int(t) + 1)]

    def edge_list_text(self) -> str:
        lines = [f"# vertices {len(self.vertices)} base {self.vertex_index[self.base]}"]
        for k, (ray, h) in enumerate(self.vertices):
            lines.append(f"v {k} ray={ray} height={h.numerator}/{h.denominator}")
        for a, b, ln in self.edges:
            lines.append(f"e {self.vertex_index[a]} {self.vertex_index[b]} {ln.numerator}/{ln.denominator}")
        return "\n".join(lines) + "\n"

    def is_tree(self) -> bool:
        n = len(self.vertices)
        if len(self.edges) != n - 1:
            return False
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for a, b, _ in self.edges:
            ra, rb = find(self.vertex_index[a]), find(self.vertex_index[b])
            if ra == rb:
                return False
            parent[ra] = rb
        return True


def approximating_tree(points: Sequence, dist: Callable, base_index: int = 0):
    """Gromov-product approximating tree of a finite pointed metric space.

    Returns (tree, phi) where phi[i] is the tree point of points[i].  The base
    point is moved to ray 0.
    """
    pts = list(points)
    if not pts:
        raise InvalidInput("empty point set")
    order = [base_index] + [i for i in range(len(pts)) if i != base_index]
    pts = [pts[i] for i in order]
    n = len(pts)
    x0 = pts[0]
    radial = [Fraction(dist(x0, x)) for x in pts]
    G = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            G[i][j] = (radial[i] + radial[j] - Fraction(dist(pts[i], pts[j]))) / 2
    for k in range(n):
        Gk = G[k]
        for i in range(n):
            gik = G[i][k]
            row = G[i]
            for j in range(n):
                m = gik if gik < Gk[j] else Gk[j]
                if m > row[j]:
                    row[j] = m
    tree = MetricTree(radial, G)
    phi_sorted = [tree.canon(i, radial[i]) for i in range(n)]
    phi = [None] * n
    for pos, orig in enumerate(order):
        phi[orig] = phi_sorted[pos]
    return tree, phi


def tree_log_bound(size: int) -> int:
    """k = ⌈log₂(|F| − 2)⌉, taken as 0 for |F| ≤ 3."""
    return 0 if size <= 3 else ceil(log2(size - 2))


# ---------------------------------------------------------------------------
# Round trip between a λ-hull and the approximating tree
# ---------------------------------------------------------------------------

class TreeApproximation:
    """φ: group points → T′ and ψ: T′ → geod(F) for a finite F ⊂ Γ with F[0] the base."""

    def __init__(self, F: Sequence[GroupElement]):
        F = list(dict.fromkeys(F))
        self.F = F
        self.model = F[0].model
        self.tree, self.Phi = approximating_tree(F, self.model.distance)
        self._intervals = [sorted(interval(F[0], x), key=lambda g: g.key) for x in F]
        self._phi: dict = {}
        self._psi: dict = {}

    def phi(self, x: GroupElement):
        hit = self._phi.get(x)
        if hit is not None:
            return hit
        model = self.model
        x0 = self.F[0]
        best = None
        for j, pts in enumerate(self._intervals):
            for k, y in enumerate(pts):
                key = (model.distance(x, y), j, k)
                if best is None or key < best[0]:
                    best = (key, j, y)
        _, j, y = best
        p = self.tree.canon(j, model.distance(x0, y))
        self._phi[x] = p
        return p

    def psi(self, p) -> GroupElement:
        hit = self._psi.get(p)
        if hit is not None:
            return hit
        i, t = p
        if t.denominator != 1:
            raise InvalidInput("ψ is defined on T′ only")
        model = self.model
        x0 = self.F[0]
        for k in range(len(self.F)):
            if self.tree.on_segment(p, k):
                xk = self.F[k]
                dk = model.distance(x0, xk)
                for z in self._intervals[k]:
                    if model.distance(x0, z) == t and model.distance(z, xk) == dk - t:
                        self._psi[p] = z
                        return z
        raise InvalidInput(f"{p} is not on the tree")

    def f(self, x: GroupElement) -> GroupElement:
        return self.psi(self.phi(x))


@dataclass
class RoundTrip:
    phi: dict
    psi: dict
    constant: Fraction
    truncated: bool = False
    tree: MetricTree | None = None
    parts: dict = field(default_factory=dict)


def tree_roundtrip(ball: CayleyBall, F: Sequence[GroupElement], lam: int = 0, delta=None) -> RoundTrip:
    """Project geod_λ(F) onto T′ and back; report the worst distortion.

    `delta` is accepted for the record only; the constant is measured.
    """
    F = list(dict.fromkeys(F))
    if len(F) < 2:
        return RoundTrip({}, {}, Fraction(0), False, None)
    hull = geodesic_hull(ball, F, lam)
    approx = TreeApproximation(F)
    tree = approx.tree
    phi = {x: approx.phi(x) for x in sorted(hull, key=lambda g: g.key)}
    psi = {p: approx.psi(p) for p in tree.integer_points()}
    model = ball.model
    xs = list(phi)
    ys = list(psi)
    c11 = max((tree.distance(phi[x], phi[y]) - model.distance(x, y) for x in xs for y in xs), default=0)
    c12 = max((model.distance(psi[p], psi[q]) - tree.distance(p, q) for p in ys for q in ys), default=0)
    c13 = max((model.distance(psi[phi[x]], x) for x in xs), default=0)
    const = max(Fraction(0), Fraction(c11), Fraction(c12), Fraction(c13))
    return RoundTrip(phi, psi, const, hull.truncated, tree,
                     {"phi_expansion": Fraction(c11), "psi_expansion": Fraction(c12),
                      "displacement": Fraction(c13)})


# ---------------------------------------------------------------------------
# Contraction of the Bar complex of T′
# ---------------------------------------------------------------------------

class TreeContraction:
    """Contracting homotopy σ_* of the augmented Bar complex on T′.

    σ_{-1}() = [y], σ_0[x] = radial path from y to x, and
    σ_k[x0..xk] = s_{x0}((Id − σ_{k-1}∘∂)[x0..xk]).
    """

    def __init__(self, tree: MetricTree):
        self.tree = tree
        self.base = tree.base
        self._cache: dict = {}

    def _check(self, p):
        i, t = p
        if Fraction(t).denominator != 1 or self.tree.canon(i, t) != p:
            raise InvalidInput(f"{p} is not a canonical point of T′")

    def sigma_simplex(self, verts: tuple) -> Chain:
        hit = self._cache.get(verts)
        if hit is not None:
            return hit
        if not verts:
            out = Chain.basis((self.base,))
        elif len(verts) == 1:
            self._check(verts[0])
            path = self.tree.path_from_base(verts[0])
            out = Chain()
            for a, b in zip(path, path[1:]):
                out.add_term((a, b), 1)
        else:
            for p in verts:
                self._check(p)
            rest = Chain.basis(verts) - self(boundary(Chain.basis(verts), augmented=True))
            x0 = verts[0]
            out = Chain()
            for k, c in rest.items():
                out.add_term((x0,) + k, c)
        self._cache[verts] = out
        return out

    def __call__(self, c) -> Chain:
        out = Chain()
        for key, coef in as_chain(c).items():
            out.add_chain(self.sigma_simplex(key), coef)
        return out


def tree_contraction(tree: MetricTree, y=None) -> TreeContraction:
    if y is not None and y != tree.base:
        raise InvalidInput("the contraction is centred at the tree's base point")
    return TreeContraction(tree)
