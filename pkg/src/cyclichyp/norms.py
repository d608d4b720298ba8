"""Weights, weighted ℓ¹ norms, (ρ,m) seminorms and empirical operator-bound scans."""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .chains import (
    UNIT,
    Chain,
    TwistedSimplex,
    as_chain,
    boundary,
    chi,
    cyclic_normal_form,
    kernel_decomposition,
    lifted_B,
    lifted_T,
    p_map,
    s_split,
    translate,
    weight,
)
from .groups import GroupElement, InvalidInput

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------

def c_of(n: int) -> int:
    """c(2k) = c(2k+1) = k."""
    return n // 2


@dataclass(frozen=True)
class NormParams:
    lam: Fraction = Fraction(2)
    rho: Fraction = Fraction(2)
    m: int = 0

    def __post_init__(self):
        for name in ("lam", "rho"):
            val = Fraction(getattr(self, name))
            if val < 1:
                raise InvalidInput(f"{name} must be at least 1")
            object.__setattr__(self, name, val)
        if self.m < 0:
            raise InvalidInput("m must be nonnegative")


def norm_lambda(c, lam) -> Fraction:
    """Σ |a_α| λ^{|α|} over twisted simplices α."""
    lam = Fraction(lam)
    if lam < 1:
        raise InvalidInput("λ must be at least 1")
    return sum((abs(Fraction(coef)) * lam ** weight(key) for key, coef in as_chain(c).items()), Fraction(0))


def l1(c) -> Fraction:
    return sum((abs(Fraction(x)) for x in as_chain(c).values()), Fraction(0))


def _element_length(a) -> int:
    return 0 if a is UNIT else a.length


def seminorm_factor(n: int, params: NormParams) -> Fraction:
    k = c_of(n)
    return Fraction((2 + 2 * k) ** params.m, math.factorial(k)) / params.rho ** k


def seminorm_rho_m(omega, params: NormParams) -> Fraction:
    """Weighted ℓ¹ seminorm on forms: a monomial b⁰db¹⋯dbⁿ has norm
    (1/c(n)!)(2+2c(n))^m ρ^{-c(n)} Π λ^{ℓ(bⁱ)}."""
    total = Fraction(0)
    for key, coef in as_chain(omega).items():
        n = len(key) - 1
        letters = sum(_element_length(a) for a in key)
        total += abs(Fraction(coef)) * seminorm_factor(n, params) * params.lam ** letters
    return total


# ---------------------------------------------------------------------------
# Enumeration of twisted simplices by weight
# ---------------------------------------------------------------------------

def twisted_simplices(twist: GroupElement, degree: int, weight_cap: int, reduced: bool = True) -> list:
    """All [e, g1, …, gn; v] with |·| ≤ weight_cap (consecutive vertices distinct when reduced)."""
    model = twist.model
    e = model.identity
    steps_by_len: dict = {0: [e]}
    frontier = [e]
    seen = {e}
    for r in range(1, weight_cap + 1):
        nxt = []
        for x in frontier:
            for s in model.generator_elements:
                y = model.multiply(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        steps_by_len[r] = sorted(nxt, key=lambda g: g.key)
        frontier = nxt
    out = []

    def grow(verts, used):
        if len(verts) == degree + 1:
            close = model.distance(verts[-1], model.multiply(twist, verts[0]))
            if used + close <= weight_cap:
                out.append(TwistedSimplex(tuple(verts), twist))
            return
        last = verts[-1]
        for r in range(0 if not reduced else 1, weight_cap - used + 1):
            for s in steps_by_len.get(r, ()):
                # the closing edge needs at least |ℓ(last·s) − ℓ(v·e)| more; prune on it
                y = model.multiply(last, s)
                if used + r + abs(y.length - twist.length) > weight_cap:
                    continue
                grow(verts + [y], used + r)

    grow([e], 0)
    return out


# ---------------------------------------------------------------------------
# Weight audits
# ---------------------------------------------------------------------------

def weight_audit(simplices, centralizer=()) -> dict:
    """Weight invariance under the centralizer action and T̃; non-increase under ∂."""
    res = {"T_invariant": True, "Z_invariant": True, "boundary_nonincreasing": True, "samples": 0}
    for key in simplices:
        res["samples"] += 1
        w = weight(key)
        if any(weight(k) != w for k in lifted_T(Chain.basis(key))):
            res["T_invariant"] = False
        for z in centralizer:
            if any(weight(k) != w for k in translate(z, Chain.basis(key))):
                res["Z_invariant"] = False
        if any(weight(k) > w for k in boundary(Chain.basis(key))):
            res["boundary_nonincreasing"] = False
    return res


def chi_weight_ratio(simplices) -> Fraction:
    """max |χ(β)| / |β| over simplices of positive weight."""
    worst = Fraction(0)
    for key in simplices:
        w = weight(key)
        if w:
            worst = max(worst, Fraction(max(weight(k) for k in chi(Chain.basis(key))), w))
    return worst


def expansion_length_check(c, n: int, eps0: int) -> tuple:
    """(sup k_i, bound ε₀⁻¹(n+2)·diam(Supp c)) for a chain in Ker(I_v)."""
    cert = kernel_decomposition(c, eps0)
    sup_k = max((k for _, _, k in cert), default=0)
    pts = set()
    for key in as_chain(c):
        pts.update(key.vertices)
    pts = list(pts)
    model = pts[0].model if pts else None
    diam = max((model.distance(x, y) for x in pts for y in pts), default=0)
    return sup_k, Fraction((n + 2) * diam, eps0)


# ---------------------------------------------------------------------------
# Empirical constants
# ---------------------------------------------------------------------------

@dataclass
class EmpiricalConstant:
    name: str
    value: Fraction
    sample_spec: dict
    per_class: dict = field(default_factory=dict)
    samples: int = 0
    skipped: int = 0

    def finite(self) -> bool:
        return self.value is not None

    def to_row(self) -> dict:
        return {
            "name": self.name,
            "value": _frac_text(self.value),
            "samples": self.samples,
            "skipped": self.skipped,
            "per_class": {k: _frac_text(v) for k, v in sorted(self.per_class.items())},
            "sample_spec": self.sample_spec,
        }


def _frac_text(x) -> str:
    if x is None:
        return "none"
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def upper_rational(x: float, places: int = 6) -> Fraction:
    """Smallest multiple of 10^-places that is ≥ x."""
    scale = 10 ** places
    return Fraction(math.ceil(x * scale - 1e-12), scale)


@dataclass
class ScanContext:
    """Operators shared by the scans: Θ′ for ∇̃ and conjugator sections for s_split."""

    nabla: Callable | None = None
    vanishing_degree: int | None = None
    sections: dict = field(default_factory=dict)  # v -> (σ, σ′)


def _sample(items: list, budget: int, seed: int):
    if len(items) <= budget:
        return items, True
    rng = random.Random(seed)
    return sorted(rng.sample(items, budget), key=lambda k: (k.twist.key, tuple(g.key for g in k.vertices))), False


def _ratio(num: Fraction, den: Fraction) -> Fraction:
    return num / den


def bound_scan(op: str, twists: list, degree_cap: int, weight_cap: int, lam0, lam1,
               context: ScanContext | None = None, seed: int = 0, budget: int = 2000,
               k_max: int = 3, min_degree: int = 0) -> EmpiricalConstant:
    """Maximum of the bound-defining ratio of `op` over twisted simplices.

    ops: identity, C20, C21, C22, C25, C26.  Per-class maxima are kept for
    every op; for C26 they are the point of the scan.
    """
    lam0, lam1 = Fraction(lam0), Fraction(lam1)
    if not lam0 > lam1 >= 1:
        raise InvalidInput("need λ0 > λ1 ≥ 1")
    if op == "C26" and not lam1 ** 3 < lam0:
        raise InvalidInput("the s_split scan needs λ1³ < λ0")
    ctx = context or ScanContext()
    spec = {"op": op, "twists": [str(v) for v in twists], "model": twists[0].model.name if twists else "",
            "degree_cap": degree_cap, "weight_cap": weight_cap, "lambda0": _frac_text(lam0),
            "lambda1": _frac_text(lam1), "seed": seed, "budget": budget}
    if op == "C25":
        spec["k_max"] = k_max
    per_class: dict = {}
    samples = skipped = 0
    exhaustive = True
    for v in twists:
        pool = []
        for n in range(min_degree, degree_cap + 1):
            pool += twisted_simplices(v, n, weight_cap)
        pool, ex = _sample(pool, budget, seed)
        exhaustive = exhaustive and ex
        best = None
        for key in pool:
            try:
                val = _evaluate(op, key, lam0, lam1, ctx, k_max)
            except NotImplementedError as exc:
                log.info("skipped %s: %s", key, exc)
                skipped += 1
                continue
            samples += 1
            if val is None:
                skipped += 1
                continue
            best = val if best is None else max(best, val)
        per_class[str(v)] = best
    spec["exhaustive"] = exhaustive
    vals = [x for x in per_class.values() if x is not None]
    value = max(vals) if vals else None
    return EmpiricalConstant(op, value, spec, per_class, samples, skipped)


def _evaluate(op, key, lam0, lam1, ctx: ScanContext, k_max):
    a = Chain.basis(key)
    if op == "identity":
        return _ratio(norm_lambda(a, lam1), norm_lambda(a, lam0))
    if op in ("C20", "C21", "C22", "C25") and ctx.nabla is None:
        raise NotImplementedError("∇̃ not configured")
    if op == "C20":
        img = ctx.nabla(a)
        if not img:
            return None
        return Fraction(max(weight(k) for k in img) - weight(key))
    if op == "C21":
        d = ctx.vanishing_degree
        k = min(key.degree, d) if d is not None else key.degree
        model = key.twist.model
        path = sum(model.distance(key.vertices[i], key.vertices[i + 1]) for i in range(k))
        img = ctx.nabla(a)
        if path == 0:
            return None
        return _ratio(l1(img), Fraction(path))
    if op == "C22":
        return _ratio(norm_lambda(ctx.nabla(a), lam1), norm_lambda(a, lam0))
    if op == "C25":
        base = norm_lambda(a, lam0)
        cur = a
        best = Fraction(0)
        for k in range(1, k_max + 1):
            cur = ctx.nabla(lifted_B(cur))
            r = norm_lambda(cur, lam1) / (math.factorial(k) * base)
            if r:
                best = max(best, upper_rational(float(r) ** (1.0 / k)))
            if not cur:
                break
        return best
    if op == "C26":
        v = key.twist
        if v.model.order(v) is not None:
            raise NotImplementedError("s_split needs an infinite-order twist")
        if v not in ctx.sections:
            raise NotImplementedError(f"no section configured for {v}")
        sigma, sigma_prime = ctx.sections[v]
        form = cyclic_normal_form(p_map(a, reduced=True))
        return _ratio(norm_lambda(s_split(form, sigma, sigma_prime), lam1), norm_lambda(a, lam0))
    raise InvalidInput(f"unknown operator {op!r}")


def constants_csv(constants: list[EmpiricalConstant]) -> str:
    lines = ["name,value,samples,skipped,per_class,sample_spec"]
    for c in constants:
        row = c.to_row()
        per = ";".join(f"{k}={v}" for k, v in row["per_class"].items())
        spec = json.dumps(row["sample_spec"], sort_keys=True).replace('"', '""')
        lines.append(f'{row["name"]},{row["value"]},{row["samples"]},{row["skipped"]},{per},"{spec}"')
    return "\n".join(lines) + "\n"


def constants_json(constants: list[EmpiricalConstant]) -> str:
    return json.dumps([c.to_row() for c in constants], indent=2, sort_keys=True)
