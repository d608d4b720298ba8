"""Geodesic bicombing, its extension Θ to all degrees, the Rips projection Θ′ and ∇̃."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .chains import (
    Chain,
    _join,
    _split,
    apply_map,
    as_chain,
    boundary,
    homotopy_h,
    identity_map,
    is_degenerate,
    signed_permutations,
    support,
    translate,
    weight,
)
from .geometry import TreeApproximation, TreeContraction, group_hull, hull_excess, interval
from .groups import CayleyBall, GroupElement, InvalidInput
from .linalg import Insoluble, solve


class MarginExhausted(RuntimeError):
    """No Rips filling was found within the allowed support margin."""


def diameter(points) -> int:
    pts = list(points)
    if len(pts) < 2:
        return 0
    model = pts[0].model
    return max(model.distance(x, y) for i, x in enumerate(pts) for y in pts[i + 1:])


# ---------------------------------------------------------------------------
# Bicombing
# ---------------------------------------------------------------------------

class Bicombing:
    """Θ₁[g0, g1] = g0·Θ₁[e, g0⁻¹g1], the uniform average over geodesic edge paths."""

    def __init__(self, model, ball: CayleyBall | None = None):
        self.model = model
        self.ball = ball
        self.table: dict = {}
        self.truncated = False

    def base(self, g: GroupElement) -> Chain:
        hit = self.table.get(g)
        if hit is not None:
            return hit
        model = self.model
        e = model.identity
        out = Chain()
        if g is not e:
            pts = interval(e, g)
            level = sorted(pts, key=lambda x: x.length)
            from_e = {e: 1}
            for x in level[1:]:
                from_e[x] = sum(from_e.get(model.multiply(x, s), 0) for s in model.generator_elements
                                if model.multiply(x, s).length == x.length - 1 and model.multiply(x, s) in pts)
            to_g = {g: 1}
            for x in reversed(level[:-1]):
                to_g[x] = sum(to_g.get(y, 0) for y in (model.multiply(x, s) for s in model.generator_elements)
                              if y in pts and y.length == x.length + 1)
            total = from_e[g]
            for x in level:
                for s in model.generator_elements:
                    y = model.multiply(x, s)
                    if y in pts and y.length == x.length + 1:
                        out.add_term((x, y), Fraction(from_e[x] * to_g[y], total))
            if self.ball is not None and any(x not in self.ball for x in pts):
                self.truncated = True
        self.table[g] = out
        return out

    def __call__(self, g0: GroupElement, g1: GroupElement) -> Chain:
        return translate(g0, self.base(self.model.multiply(g0.inverse(), g1)))


def bicombing_theta1(ball: CayleyBall) -> Bicombing:
    bic = Bicombing(ball.model, ball)
    for g in ball.elements:
        bic.base(g)
    return bic


@dataclass
class BicombingWitness:
    lam: int
    mu: Fraction
    boundary_exact: bool
    samples: int


def bicombing_witness(bic: Bicombing, pairs) -> BicombingWitness:
    """Measure the hull slack λ and weight μ; check ∂Θ₁[g0,g1] = [g1] − [g0]."""
    lam = 0
    mu = Fraction(0)
    ok = True
    count = 0
    model = bic.model
    for g0, g1 in pairs:
        count += 1
        c = bic(g0, g1)
        expect = Chain.basis((g1,)) - Chain.basis((g0,))
        ok = ok and boundary(c) == expect
        if c:
            lam = max(lam, hull_excess(support(c), [g0, g1]))
        mu = max(mu, Fraction(c.l1()) / (model.distance(g0, g1) + 1))
    return BicombingWitness(lam, mu, ok, count)


# ---------------------------------------------------------------------------
# Extension to all degrees through approximating trees
# ---------------------------------------------------------------------------

class Theta:
    """Equivariant chain map Θ: Bar → Bar extending a bicombing.

    For a base simplex α = [e, g1, …, gn], n ≥ 2, with z = Θ(∂α):
        Θ(α) = ψ_•σ_{n-1}φ_•(z) + h(ψ∘φ, Id)(z)
    where φ, ψ come from the approximating tree of Supp α and σ is the tree
    contraction.  Other simplices are handled by translation.
    """

    def __init__(self, bicombing: Bicombing):
        self.bicombing = bicombing
        self.model = bicombing.model
        self._cache: dict = {}

    def simplex(self, verts: tuple) -> Chain:
        n = len(verts) - 1
        if n < 0:
            return Chain.basis(())
        if n == 0:
            return Chain.basis(verts)
        g0 = verts[0]
        if n == 1:
            return self.bicombing(g0, verts[1])
        gi = g0.inverse()
        base = tuple(self.model.multiply(gi, x) for x in verts)
        hit = self._cache.get(base)
        if hit is None:
            hit = self._base(base)
            self._cache[base] = hit
        return hit if g0.is_identity() else translate(g0, hit)

    def _base(self, alpha: tuple) -> Chain:
        z = self(boundary(Chain.basis(alpha)))
        if not z:
            return Chain()
        approx = TreeApproximation(list(alpha))
        sigma = TreeContraction(approx.tree)
        phi = apply_map(lambda vs: Chain.basis(tuple(approx.phi(x) for x in vs)), z)
        lifted = sigma(phi)
        out = apply_map(lambda vs: Chain.basis(tuple(approx.psi(p) for p in vs)), lifted)
        f = lambda vs: Chain.basis(tuple(approx.f(x) for x in vs))
        out.add_chain(homotopy_h(f, identity_map, z))
        return out

    def __call__(self, c) -> Chain:
        return apply_map(self.simplex, c)


def extend_theta(bicombing: Bicombing) -> Theta:
    return Theta(bicombing)


@dataclass
class DegreeWitness:
    degree: int
    R: int = 0
    lam: int = 0
    mu: Fraction = Fraction(0)
    chain_map_exact: bool = True
    samples: int = 0


def theta_witnesses(theta, simplices) -> dict:
    """Per-degree measured Rips parameter R_n, hull slack λ_n, weight μ_n and the chain-map law."""
    out: dict = {}
    for verts in simplices:
        n = len(verts) - 1
        w = out.setdefault(n, DegreeWitness(n))
        w.samples += 1
        img = theta(Chain.basis(verts))
        lhs = boundary(img)
        rhs = theta(boundary(Chain.basis(verts)))
        w.chain_map_exact = w.chain_map_exact and lhs == rhs
        for k in img:
            w.R = max(w.R, diameter(k))
        if img:
            w.lam = max(w.lam, hull_excess(support(img), verts))
        w.mu = max(w.mu, Fraction(img.l1()) / (diameter(verts) + 1))
    return out


# ---------------------------------------------------------------------------
# Oriented simplices and the Rips projection
# ---------------------------------------------------------------------------

def _sorted_with_sign(verts):
    """Sort distinct vertices shortlex; return (sorted tuple, permutation sign)."""
    idx = sorted(range(len(verts)), key=lambda i: verts[i].key)
    inv = 0
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                inv += 1
    return tuple(verts[i] for i in idx), (-1 if inv % 2 else 1)


def to_oriented(c) -> Chain:
    """Write π_as(c) in the basis [[s]] = π_as(s) of sorted simplices with distinct vertices."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        if len(set(verts)) < len(verts):
            continue
        s, sgn = _sorted_with_sign(verts)
        out.add_term(_join(s, twist), coef * sgn)
    return out


def from_oriented(c) -> Chain:
    """Expand Σ c_s [[s]] into ordered simplices."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        m = len(verts)
        scale = Fraction(coef, _fact(m))
        for p, s in signed_permutations(m):
            out.add_term(_join(tuple(verts[i] for i in p), twist), scale * s)
    return out


def _fact(m):
    r = 1
    for k in range(2, m + 1):
        r *= k
    return r


def oriented_boundary(c) -> Chain:
    out = Chain()
    for key, coef in as_chain(c).items():
        n = len(key) - 1
        if n <= 0:
            continue
        for i in range(n + 1):
            out.add_term(key[:i] + key[i + 1:], coef if i % 2 == 0 else -coef)
    return out


def _translate_oriented(g, key):
    m = g.model
    return _sorted_with_sign(tuple(m.multiply(g, x) for x in key))


def canonical_translate(key):
    """(canonical sorted simplex t, g, sign) with g·[[key]] = sign·[[t]], t minimal over the orbit."""
    best = None
    for x in key:
        g = x.inverse()
        t, sgn = _translate_oriented(g, key)
        k = tuple(y.key for y in t)
        if best is None or k < best[0]:
            best = (k, t, g, sgn)
    _, t, g, sgn = best
    return t, g, sgn


def stabilizer(key):
    """[(g, sign)] with g·[[key]] = sign·[[key]]; key must contain e after canonical translation."""
    out = []
    kset = set(key)
    for x in key:
        t, sgn = _translate_oriented(x.inverse(), key)
        if set(t) == kset:
            out.append((x.inverse(), sgn))
    return out


def rips_cliques(vertices, size: int, R: int):
    """All sorted `size`-subsets of `vertices` with pairwise distance ≤ R."""
    vs = sorted(vertices, key=lambda g: g.key)
    if not vs:
        return []
    model = vs[0].model
    nbr = {x: {y for y in vs if y is not x and model.distance(x, y) <= R} for x in vs}
    pos = {x: i for i, x in enumerate(vs)}
    out = []

    def grow(clique, cands):
        if len(clique) == size:
            out.append(tuple(clique))
            return
        for y in cands:
            grow(clique + [y], [z for z in cands if pos[z] > pos[y] and z in nbr[y]])

    grow([], vs)
    return out


def rips_clique_number(model, R: int, cap: int = 50_000) -> int:
    """Largest set of pairwise distance ≤ R (translate so it contains e)."""
    ball = CayleyBall(model, R, cap)
    e = model.identity
    cands = [x for x in ball.elements if x is not e]
    nbr = {x: {y for y in cands if y is not x and model.distance(x, y) <= R} for x in cands}
    best = 1

    def expand(size, P, X):
        nonlocal best
        if not P and not X:
            best = max(best, size)
            return
        if size + len(P) <= best:
            return
        pivot = max(P | X, key=lambda u: len(nbr[u] & P))
        for u in list(P - nbr[pivot]):
            expand(size + 1, P & nbr[u], X & nbr[u])
            P = P - {u}
            X = X | {u}

    expand(1, set(cands), set())
    return best


class RipsProjection:
    """Θ′ = π_as∘η∘π_as∘Θ: Bar → Rips-R.

    η is realized on the antisymmetric subcomplex: identity on oriented
    simplices of diameter ≤ R, otherwise an equivariant filling of η(∂[[s]])
    over oriented Rips-R simplices in geod_C(s) for the least working margin C.
    """

    def __init__(self, theta: Theta, R: int, max_margin: int = 6, delta=None):
        if R < 1:
            raise InvalidInput("Rips parameter must be positive")
        self.theta = theta
        self.model = theta.model
        self.R = R
        self.max_margin = max_margin
        self.delta = delta
        self.certified = delta is not None and R >= 6 * delta + 4
        self._eta: dict = {}
        self._cache: dict = {}
        self.fill_margins: dict = {}
        self._d = None

    @property
    def vanishing_degree(self) -> int:
        """Least d with Θ′ = 0 in degrees ≥ d: the largest Rips-R clique size."""
        if self._d is None:
            self._d = rips_clique_number(self.model, self.R)
        return self._d

    # -- η on oriented simplices --------------------------------------------
    def eta_oriented(self, c) -> Chain:
        out = Chain()
        for key, coef in as_chain(c).items():
            out.add_chain(self._eta_key(key), coef)
        return out

    def _eta_key(self, key) -> Chain:
        if diameter(key) <= self.R:
            return Chain.basis(key)
        t, g, sgn = canonical_translate(key)
        w = self._eta.get(t)
        if w is None:
            w = self._fill(t)
            self._eta[t] = w
        gi = g.inverse()
        out = Chain()
        for k, coef in w.items():
            s, s2 = _translate_oriented(gi, k)
            out.add_term(s, coef * sgn * s2)
        return out

    def _fill(self, t) -> Chain:
        target = self.eta_oriented(oriented_boundary(Chain.basis(t)))
        size = len(t)
        for margin in range(self.max_margin + 1):
            pool = group_hull(list(t), margin)
            cands = rips_cliques(pool, size, self.R)
            cols = [oriented_boundary(Chain.basis(s)) for s in cands]
            try:
                sol = solve(cols, target, row_order=lambda k: tuple(y.key for y in k))
            except Insoluble:
                continue
            w = Chain()
            for pos, val in sol.items():
                w.add_term(cands[pos], val)
            self.fill_margins[t] = margin
            return self._average(t, w)
        raise MarginExhausted(f"no Rips-{self.R} filling of {t} within margin {self.max_margin}")

    def _average(self, t, w: Chain) -> Chain:
        stab = stabilizer(t)
        if len(stab) == 1:
            return w
        out = Chain()
        for g, sgn in stab:
            for k, coef in w.items():
                s, s2 = _translate_oriented(g, k)
                out.add_term(s, Fraction(coef * sgn * s2, len(stab)))
        return out

    # -- Θ′ -------------------------------------------------------------------
    def simplex(self, verts: tuple) -> Chain:
        if not verts:
            return Chain.basis(())
        if len(verts) == 1:
            return Chain.basis(verts)
        if is_degenerate(verts):
            return Chain()
        g0 = verts[0]
        gi = g0.inverse()
        base = tuple(self.model.multiply(gi, x) for x in verts)
        hit = self._cache.get(base)
        if hit is None:
            hit = from_oriented(self.eta_oriented(to_oriented(self.theta(Chain.basis(base)))))
            self._cache[base] = hit
        return hit if g0.is_identity() else translate(g0, hit)

    def __call__(self, c) -> Chain:
        return apply_map(self.simplex, c)


def rips_projection_thetaprime(ball: CayleyBall, R: int, delta=None, max_margin: int = 6) -> RipsProjection:
    return RipsProjection(Theta(bicombing_theta1(ball)), R, max_margin, delta)


@dataclass
class ProjectionConstants:
    C18: int
    C19: Fraction
    max_diameter: int
    chain_map_exact: bool
    samples: int


def thetaprime_constants(tp: RipsProjection, simplices) -> ProjectionConstants:
    c18, c19, diam, ok, count = 0, Fraction(0), 0, True, 0
    for verts in simplices:
        count += 1
        img = tp(Chain.basis(verts))
        ok = ok and boundary(img) == tp(boundary(Chain.basis(verts)))
        if img:
            c18 = max(c18, hull_excess(support(img), verts))
            diam = max(diam, max(diameter(k) for k in img))
        c19 = max(c19, Fraction(img.l1()) / (diameter(verts) + 1))
    return ProjectionConstants(c18, c19, diam, ok, count)


# ---------------------------------------------------------------------------
# ∇̃ = h(Θ′, Id) ⊗ Id on twisted chains
# ---------------------------------------------------------------------------

def drop_degenerate(c) -> Chain:
    return Chain({k: v for k, v in as_chain(c).items() if not is_degenerate(_split(k)[0])})


class Nabla:
    """∇̃ with ∂∇̃ + ∇̃∂ = Id − Θ′⊗Id; on the reduced complex degenerate outputs are dropped."""

    def __init__(self, tp: RipsProjection, reduced: bool = False):
        self.tp = tp
        self.reduced = reduced

    def __call__(self, c) -> Chain:
        out = homotopy_h(self.tp.simplex, identity_map, c)
        return drop_degenerate(out) if self.reduced else out

    def theta_prime(self, c) -> Chain:
        out = apply_map(self.tp.simplex, c)
        return drop_degenerate(out) if self.reduced else out


def nabla(c, tp: RipsProjection, reduced: bool = False) -> Chain:
    return Nabla(tp, reduced)(c)


@dataclass
class NablaConstants:
    C20: int
    C21: Fraction
    identity_exact: bool
    samples: int
    skipped: list = field(default_factory=list)


def nabla_constants(nb: Nabla, simplices) -> NablaConstants:
    """Weight growth C20 = max(|∇̃α| − |α|) and ℓ¹ ratio C21 over twisted simplices.

    The homotopy identity ∂∇̃ + ∇̃∂ = Id − Θ′⊗Id is checked on every sample.
    """
    d = nb.tp.vanishing_degree
    c20, c21, ok, count, skipped = None, Fraction(0), True, 0, []
    for key in simplices:
        count += 1
        a = Chain.basis(key)
        img = nb(a)
        lhs = boundary(img) + nb(boundary(a))
        rhs = a - nb.theta_prime(a)
        if nb.reduced:
            lhs, rhs = drop_degenerate(lhs), drop_degenerate(rhs)
        ok = ok and lhs == rhs
        verts = key.vertices
        if img:
            growth = max(weight(k) for k in img) - weight(key)
            c20 = growth if c20 is None else max(c20, growth)
        k = min(len(verts) - 1, d)
        path = sum(nb.tp.model.distance(verts[i], verts[i + 1]) for i in range(k))
        if path == 0:
            if img:
                skipped.append(key)
            continue
        c21 = max(c21, Fraction(img.l1()) / path)
    return NablaConstants(c20 if c20 is not None else 0, c21, ok, count, skipped)
