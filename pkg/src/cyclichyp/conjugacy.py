"""Conjugacy classes, conjugator sections, centralizers and stable length."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .groups import BoundaryTruncation, CayleyBall, GroupElement, InvalidInput


@dataclass
class ConjugacyClass:
    rep: GroupElement
    members: dict  # member -> witness c with member = c·rep·c⁻¹
    order: int | None
    truncated: bool = False

    @property
    def is_torsion(self) -> bool:
        return self.order is not None

    def __contains__(self, g) -> bool:
        return g in self.members


def default_work_radius(ball: CayleyBall, v: GroupElement | None = None) -> int:
    return 2 * ball.radius + (v.length if v is not None else 0)


def conjugacy_classes(ball: CayleyBall, work_radius: int | None = None) -> list[ConjugacyClass]:
    """Partition the ball into conjugacy classes, each with a minimal canonical rep."""
    if work_radius is None:
        work_radius = default_work_radius(ball)
    if work_radius < ball.radius:
        raise InvalidInput("work radius must be at least the ball radius")
    model = ball.model
    by_rep: dict = {}
    for g in ball.elements:
        rep, c = model.conjugacy_rep(g)
        by_rep.setdefault(rep, {})[g] = c
    out = []
    for rep in sorted(by_rep, key=lambda g: g.key):
        members = by_rep[rep]
        truncated = any(c.length > work_radius for c in members.values())
        out.append(ConjugacyClass(rep, members, model.order(rep), truncated))
    return out


def class_of(g: GroupElement) -> GroupElement:
    return g.model.conjugacy_rep(g)[0]


def _centralizer_generator(v: GroupElement):
    """Generators of Z(v): ('all', None), ('cyclic', r) or ('finite', [elements])."""
    model = v.model
    if v.is_identity():
        return "all", None
    if model.order(v) is None:
        return "cyclic", model.primitive_root(v)[0]
    centralizer = model.centralizer_model(v)
    if centralizer is model:
        return "all", None
    u, w = model.cyclic_reduction(v)
    f, _ = w.word[0]
    base = model._make(((f, 1),))
    n = model.orders[f]
    return "finite", [model.conjugate(u, model.power(base, k)) for k in range(n)]


def _shortest(cands):
    return min(cands, key=lambda g: g.key)


class Section:
    """u ↦ σ_v(u) with σ_v(u)·v·σ_v(u)⁻¹ = u, computed on demand.

    σ_v(u) is a minimal-length conjugator.  For v of infinite order, the
    midpoint construction (rotate v into u, then walk at most half of v) is
    preferred whenever it attains the minimal length; remaining ties go to the
    shortlex-smallest conjugator.
    """

    def __init__(self, v: GroupElement, work_radius: int | None = None):
        self.v = v
        self.model = v.model
        self.work_radius = work_radius
        self.table: dict = {}
        self.missing: set = set()
        self._rep, self._cv = self.model.conjugacy_rep(v)
        self._kind, self._z = _centralizer_generator(v)
        self._rotations = None
        if self._kind == "cyclic":
            self._rotations = self._letter_rotations()
        self._stable = max(1, self.model.stable_length(v)) if self._kind == "cyclic" else 1

    def _letter_rotations(self):
        model = self.model
        letters = self.v.letters
        m = len(letters)
        rots = []
        for k in range(m + 1):
            a = model.normalize(letters[:k])
            b = model.normalize(letters[k:])
            rots.append((a, b))
        return rots

    def _conjugator_coset(self, u):
        """Some c with c·v·c⁻¹ = u, or None when u is not conjugate to v."""
        rep, cu = self.model.conjugacy_rep(u)
        if rep is not self._rep:
            return None
        return self.model.multiply(cu, self._cv.inverse())

    def _all_short_conjugators(self, c):
        model = self.model
        if self._kind == "all":
            return [model.identity] if self.v.is_identity() else [c]
        if self._kind == "finite":
            return [model.multiply(c, z) for z in self._z]
        r = self._z
        bound = 2 * (c.length + self.v.length) // self._stable + 2
        return [model.multiply(c, model.power(r, j)) for j in range(-bound, bound + 1)]

    def __call__(self, u: GroupElement) -> GroupElement:
        hit = self.table.get(u)
        if hit is not None:
            return hit
        s = self.compute(u)
        if s is None:
            self.missing.add(u)
            raise BoundaryTruncation(f"no conjugator found for {u} in the class of {self.v}")
        return s

    def compute(self, u: GroupElement):
        model = self.model
        if u is self.v:
            self.table[u] = model.identity
            return model.identity
        c = self._conjugator_coset(u)
        if c is None:
            return None
        cands = self._all_short_conjugators(c)
        best = _shortest(cands)
        if self._rotations is not None:
            mid = self._midpoint(cands)
            if mid is not None and mid.length == best.length:
                best = mid
        if self.work_radius is not None and best.length > self.work_radius:
            return None
        self.table[u] = best
        return best

    def _midpoint(self, conjugators):
        """Case-1 construction: h minimal with h⁻¹uh = b·a a rotation of v = a·b,
        then σ = h·b if ℓ(b) ≤ ℓ(v)/2, else h·a⁻¹."""
        model = self.model
        m = self.v.length
        best = None
        for a, b in self._rotations:
            for s in conjugators:
                # s·v·s⁻¹ = u, and h = s·a satisfies h·(b·a)·h⁻¹ = u
                h = model.multiply(s, a)
                key = (h.length, h.key, a.length)
                if best is None or key < best[0]:
                    best = (key, h, a, b)
        if best is None:
            return None
        _, h, a, b = best
        if 2 * b.length <= m:
            return model.multiply(h, b)
        return model.multiply(h, a.inverse())

    def build(self, elements) -> dict:
        for u in elements:
            if u not in self.table:
                self.compute(u)
        return self.table

    def excess(self) -> Fraction:
        """Empirical sup of ℓ(σ(u)) − ℓ(u)/2 over computed entries."""
        vals = [Fraction(s.length) - Fraction(u.length, 2) for u, s in self.table.items()]
        return max(vals, default=Fraction(0))


def sigma_section(cls: ConjugacyClass | GroupElement, ball: CayleyBall | None = None,
                  work_radius: int | None = None) -> Section:
    v = cls.rep if isinstance(cls, ConjugacyClass) else cls
    if work_radius is None and ball is not None:
        work_radius = default_work_radius(ball, v)
    sec = Section(v, work_radius)
    if isinstance(cls, ConjugacyClass):
        sec.build(cls.members)
    return sec


@dataclass
class CentralizerData:
    v: GroupElement
    elements: list
    sigma_prime: list = field(default_factory=list)
    quotient_size: int | None = None
    complete: bool = True

    def sigma_prime_excess(self) -> int:
        """max ℓ(σ′(h)) − ℓ(⟨v⟩) over the coset representatives."""
        base = class_of(self.v).length
        return max((h.length - base for h in self.sigma_prime), default=0)


def centralizer(v: GroupElement, ball: CayleyBall, work_radius: int | None = None) -> CentralizerData:
    model = v.model
    elements = [h for h in ball.elements if model.multiply(h, v) is model.multiply(v, h)]
    if model.order(v) is not None:
        return CentralizerData(v, elements, [], None, True)
    stable = max(1, model.stable_length(v))
    reps = {}
    for z in elements:
        bound = 2 * z.length // stable + 2
        coset = min((model.multiply(z, model.power(v, j)) for j in range(-bound, bound + 1)),
                    key=lambda g: g.key)
        reps.setdefault(coset, coset)
    sigma_prime = sorted(reps, key=lambda g: g.key)
    _, k = model.primitive_root(v)
    return CentralizerData(v, elements, sigma_prime, len(sigma_prime), len(sigma_prime) == k)


def sigma_prime_exact(v: GroupElement) -> list:
    """Coset representatives of v^ℤ in Z(v) from model knowledge: r^0..r^{k-1} for v = r^k."""
    model = v.model
    r, k = model.primitive_root(v)
    return [model.power(r, j) for j in range(k)]


@dataclass
class StableLength:
    value: Fraction
    profile: list
    exact: int

    def __float__(self):
        return float(self.value)


def stable_length(g: GroupElement, max_power: int = 16) -> StableLength:
    """ℓ(gⁿ)/n at n = max_power with the running minimum profile min_{m≤k} ℓ(g^m)/m."""
    if max_power < 1:
        raise InvalidInput("max_power must be positive")
    model = g.model
    profile = []
    x = model.identity
    running = None
    for n in range(1, max_power + 1):
        x = model.multiply(x, g)
        r = Fraction(x.length, n)
        running = r if running is None else min(running, r)
        profile.append(running)
    return StableLength(Fraction(x.length, max_power), profile, model.stable_length(g))


def section_equivariance_constant(section: Section, pairs) -> Fraction:
    """Measured C with d(σ(gug⁻¹), g·σ(u)) ≤ 2ℓ(g) + ℓ(⟨v⟩) + C over sampled (g, u)."""
    model = section.model
    base = class_of(section.v).length
    worst = None
    for g, u in pairs:
        lhs = model.distance(section(model.conjugate(g, u)), model.multiply(g, section(u)))
        val = lhs - 2 * g.length - base
        worst = val if worst is None else max(worst, val)
    return Fraction(worst if worst is not None else 0)


def class_table_rows(classes: list[ConjugacyClass]) -> list[dict]:
    return [
        {"rep": str(c.rep), "size_in_ball": len(c.members), "torsion": c.is_torsion,
         "order": c.order if c.order is not None else "inf", "truncated": c.truncated}
        for c in classes
    ]
