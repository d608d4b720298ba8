"""Verification suites: exact operator identities, geometry checks and
resolution identities, each returning a SuiteResult with failing items named."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .chains import (
    Chain,
    TwistedSimplex,
    boundary,
    connes_B,
    contraction_s,
    cyclic_normal_form,
    format_key,
    hochschild_b,
    nu_v,
    p_map,
    s_split,
)
from .conjugacy import Section, sigma_prime_exact
from .geometry import (
    TreeContraction,
    approximating_tree,
    delta_estimate,
    tree_log_bound,
)
from .groups import CayleyBall, GroupModel
from .homology import ClassForms
from .resolutions import (
    Bicombing,
    Nabla,
    RipsProjection,
    Theta,
    bicombing_witness,
    drop_degenerate,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    checks: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def record(self, ok: bool, label) -> None:
        self.checks += 1
        if not ok:
            self.passed = False
            if len(self.failures) < 50:
                self.failures.append(str(label))

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks,
                "failures": self.failures, "details": self.details}


def all_reduced_forms(model: GroupModel, degree: int, length_cap: int) -> list:
    """Every g0 dg1 ⋯ dgn with g1..gn ≠ e and Σ ℓ(g_i) ≤ length_cap."""
    els = CayleyBall(model, length_cap).elements
    out = []

    def grow(prefix, used):
        if len(prefix) == degree + 1:
            out.append(tuple(prefix))
            return
        head = not prefix
        for g in els:
            if g.length > length_cap - used:
                break
            if not head and g.length == 0:
                continue
            prefix.append(g)
            grow(prefix, used + g.length)
            prefix.pop()

    grow([], 0)
    return out


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def operator_identities(model: GroupModel, degree_cap: int = 4, length_cap: int = 6) -> SuiteResult:
    """b² = 0, B² = 0 and bB + Bb = 0 on every reduced form in the range."""
    res = SuiteResult(f"operators:{model.name}")
    t = time.perf_counter()
    counts = []
    for n in range(degree_cap + 1):
        forms = all_reduced_forms(model, n, length_cap)
        counts.append(len(forms))
        for f in forms:
            c = Chain.basis(f)
            b = hochschild_b(c, reduced=True)
            B = connes_B(c, reduced=True)
            res.record(not hochschild_b(b, reduced=True), f"b^2 on {format_key(f)}")
            res.record(not connes_B(B, reduced=True), f"B^2 on {format_key(f)}")
            res.record(not (connes_B(b, reduced=True) + hochschild_b(B, reduced=True)),
                       f"bB+Bb on {format_key(f)}")
    res.details = {"forms_per_degree": counts, "degree_cap": degree_cap, "length_cap": length_cap}
    res.seconds = time.perf_counter() - t
    return res


def splitting_identity(model: GroupModel, v, degree_cap: int = 2, weight_cap: int = 6) -> SuiteResult:
    """I∘p_v∘s_split = Id on all class forms of an infinite-order class."""
    res = SuiteResult(f"splitting:{model.name}:<{v}>")
    sec = Section(v)
    sp = sigma_prime_exact(v)
    cf = ClassForms(model, v, weight_cap)
    counts = []
    for n in range(degree_cap + 1):
        forms = cf.forms(n)
        counts.append(len(forms))
        for f in forms:
            c = cyclic_normal_form(Chain.basis(f))
            if not c:
                continue
            back = cyclic_normal_form(p_map(s_split(c, sec, sp)))
            res.record(back == c, f"I p s != Id on {format_key(f)}")
    res.details = {"forms_per_degree": counts, "weight_cap": weight_cap}
    return res


def nu_identity(model: GroupModel, v, degree_cap: int = 3, weight_cap: int = 5) -> SuiteResult:
    """b∘ν_v = ν_v∘(b + B) on class-⟨v⟩ forms of an elliptic class."""
    res = SuiteResult(f"nu:{model.name}:<{v}>")
    sec = Section(v)
    cf = ClassForms(model, v, weight_cap)
    for n in range(degree_cap + 1):
        for f in cf.forms(n):
            c = Chain.basis(f)
            lhs = hochschild_b(nu_v(c, v, sec), reduced=True)
            rhs = nu_v(hochschild_b(c, reduced=True) + connes_B(c, reduced=True), v, sec)
            res.record(lhs == rhs, f"b nu != nu (b+B) on {format_key(f)}")
    return res


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------

def tree_checks(model: GroupModel, radius: int = 6, subsets: int = 100, max_size: int = 6,
                seed: int = 0, delta=None, delta_radius: int | None = None) -> SuiteResult:
    """Approximating-tree map Φ: contractive, radially isometric, and
    d(x,x′) − 2kδ ≤ d(Φx,Φx′) with k = ⌈log₂(|F|−2)⌉."""
    res = SuiteResult(f"tree:{model.name}")
    ball = CayleyBall(model, radius)
    if delta is None:
        est = delta_estimate(CayleyBall(model, delta_radius or min(radius, 4)), seed=seed)
        delta = est.value
        res.details["delta_exhaustive"] = est.exhaustive
    res.details["delta"] = str(delta)
    rng = random.Random(seed)
    els = ball.elements
    worst_gap = Fraction(0)
    for s in range(subsets):
        size = rng.randint(min(2, len(els)), min(max_size, len(els)))
        F = list(dict.fromkeys(rng.sample(els, size)))
        tree, phi = approximating_tree(F, model.distance)
        k = tree_log_bound(len(F))
        res.record(tree.is_tree(), f"subset {s}: not a tree")
        for i, x in enumerate(F):
            res.record(tree.distance(phi[0], phi[i]) == model.distance(F[0], x),
                       f"subset {s}: radial distance at {x}")
            for j in range(i + 1, len(F)):
                d = model.distance(x, F[j])
                dt = tree.distance(phi[i], phi[j])
                res.record(dt <= d, f"subset {s}: expansion between {x} and {F[j]}")
                res.record(d - 2 * k * delta <= dt, f"subset {s}: distortion bound between {x} and {F[j]}")
                worst_gap = max(worst_gap, d - dt)
    res.details["max_distortion"] = str(worst_gap)
    res.details["isometric"] = worst_gap == 0
    return res


def contraction_checks(model: GroupModel, samples: int = 200, seed: int = 0, radius: int = 2,
                       degree_cap: int = 3) -> SuiteResult:
    """Id = ∂s_e + s_e∂ on the augmented Bar complex, and the same for the
    tree contraction σ on random simplices of an approximating tree."""
    res = SuiteResult(f"contraction:{model.name}")
    rng = random.Random(seed)
    els = CayleyBall(model, radius).elements
    e = model.identity
    for s in range(samples):
        n = rng.randint(0, degree_cap)
        verts = tuple(rng.choice(els) for _ in range(n + 1))
        c = Chain.basis(verts)
        lhs = boundary(contraction_s(e, c), augmented=True) + contraction_s(e, boundary(c, augmented=True))
        res.record(lhs == c, f"s_e identity on {format_key(verts)}")
    for s in range(max(1, samples // 10)):
        F = list(dict.fromkeys(rng.sample(els, min(len(els), rng.randint(2, 5)))))
        tree, _ = approximating_tree(F, model.distance)
        pts = tree.integer_points()
        sigma = TreeContraction(tree)
        for _ in range(10):
            n = rng.randint(0, 2)
            verts = tuple(rng.choice(pts) for _ in range(n + 1))
            c = Chain.basis(verts)
            lhs = boundary(sigma(c), augmented=True) + sigma(boundary(c, augmented=True))
            res.record(lhs == c, f"tree contraction identity on {verts}")
    return res


# ---------------------------------------------------------------------------
# Resolutions
# ---------------------------------------------------------------------------

def _random_simplex(rng, els, n):
    return tuple(rng.choice(els) for _ in range(n + 1))


def resolution_checks(model: GroupModel, R: int = 4, samples: int = 200, seed: int = 0,
                      radius: int = 2, degree_cap: int = 3) -> SuiteResult:
    """Bicombing laws, Θ and Θ′ chain maps, Θ′ normalization, and the
    homotopy identity ∂∇̃ + ∇̃∂ = Id − Θ′ on twisted simplices."""
    res = SuiteResult(f"resolutions:{model.name}")
    rng = random.Random(seed)
    els = CayleyBall(model, radius).elements
    bic = Bicombing(model)
    pairs = [(rng.choice(els), rng.choice(els)) for _ in range(samples)]
    w = bicombing_witness(bic, pairs)
    res.record(w.boundary_exact, "bicombing boundary law")
    res.record(w.lam == 0, f"bicombing hull slack {w.lam}")
    res.record(w.mu <= 1, f"bicombing weight {w.mu}")
    theta = Theta(bic)
    tp = RipsProjection(theta, R)
    nb = Nabla(tp)
    nbr = Nabla(tp, reduced=True)
    twists = CayleyBall(model, 1).elements
    for s in range(samples):
        n = rng.randint(0, degree_cap)
        verts = _random_simplex(rng, els, n)
        c = Chain.basis(verts)
        res.record(boundary(theta(c)) == theta(boundary(c)), f"Θ chain map on {format_key(verts)}")
        img = tp(c)
        res.record(boundary(img) == tp(boundary(c)), f"Θ′ chain map on {format_key(verts)}")
        if n == 0:
            res.record(img == c, f"Θ′ not Id on {format_key(verts)}")
        if n >= 1:
            i = rng.randrange(n)
            degen = verts[: i + 1] + verts[i:]
            res.record(not tp(Chain.basis(degen)), f"Θ′ nonzero on degenerate {format_key(degen)}")
        a = Chain.basis(TwistedSimplex(verts, rng.choice(twists)))
        lhs = boundary(nb(a)) + nb(boundary(a))
        res.record(lhs == a - nb.theta_prime(a), f"∇̃ homotopy identity on {format_key(next(iter(a)))}")
        lhs = drop_degenerate(boundary(nbr(a)) + nbr(boundary(a)))
        rhs = drop_degenerate(a - nbr.theta_prime(a))
        res.record(lhs == rhs, f"reduced ∇̃ homotopy identity on {format_key(next(iter(a)))}")
    res.details = {"bicombing": {"lambda": w.lam, "mu": str(w.mu)}, "R": R,
                   "vanishing_degree": tp.vanishing_degree}
    return res
