"""Truncated chain complexes and their exact rational homology.

Group homology uses Rips coinvariants; Hochschild and cyclic homology of a
group ring are computed one conjugacy class at a time on weight-truncated
complexes of forms, with stabilization flags comparing two weight caps.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .chains import (
    Chain,
    boundary,
    connes_B,
    cyclic_normal_form,
    hochschild_b,
    p_map,
    s_split,
    sort_key,
)
from .conjugacy import Section, sigma_prime_exact
from .groups import CayleyBall, GroupModel, InvalidInput, ResourceLimit
from .linalg import exact_rank
from .resolutions import (
    Nabla,
    RipsProjection,
    Theta,
    Bicombing,
    canonical_translate,
    oriented_boundary,
    stabilizer,
)

log = logging.getLogger(__name__)


class TruncationError(ValueError):
    """A truncated basis is not closed under the differential."""


class ConsistencyError(RuntimeError):
    """∂∘∂ ≠ 0 on a constructed complex."""


@dataclass
class TruncationSpec:
    degree_cap: int
    weight_cap: int | None = None
    rips: int | None = None

    def __post_init__(self):
        for name in ("degree_cap", "weight_cap", "rips"):
            val = getattr(self, name)
            if val is not None and (not isinstance(val, int) or val < 0):
                raise InvalidInput(f"{name} must be a nonnegative integer")


@dataclass
class BettiRow:
    label: str
    degree: int
    dim: int
    stable: bool | None = None


@dataclass
class BettiTable:
    rows: list = field(default_factory=list)

    def add(self, label: str, dims: list, stable=None) -> None:
        for n, d in enumerate(dims):
            flag = stable[n] if isinstance(stable, (list, tuple)) else stable
            self.rows.append(BettiRow(label, n, d, flag))

    def dims(self, label: str) -> list:
        return [r.dim for r in sorted(self.rows, key=lambda r: r.degree) if r.label == label]

    def flags(self, label: str) -> list:
        return [r.stable for r in sorted(self.rows, key=lambda r: r.degree) if r.label == label]

    def labels(self) -> list:
        return list(dict.fromkeys(r.label for r in self.rows))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["class", "degree", "dimension", "stable"])
        for r in self.rows:
            w.writerow([r.label, r.degree, r.dim, "" if r.stable is None else str(r.stable).lower()])
        return buf.getvalue()

    def to_json(self) -> list:
        return [{"class": r.label, "degree": r.degree, "dimension": r.dim, "stable": r.stable} for r in self.rows]


# ---------------------------------------------------------------------------
# Finite complexes
# ---------------------------------------------------------------------------

class FiniteComplex:
    """Chain complex with finite bases in degrees 0..top.

    `differential(key)` returns a Chain whose keys are basis elements of the
    degree below (after any canonicalization the complex needs).
    """

    def __init__(self, bases: dict, differential: Callable, name: str = ""):
        self.bases = {n: list(b) for n, b in bases.items()}
        self.index = {n: {k: i for i, k in enumerate(b)} for n, b in self.bases.items()}
        self.differential = differential
        self.name = name
        self.top = max(self.bases) if self.bases else -1
        self._columns: dict = {}

    @classmethod
    def from_matrices(cls, sizes: list, matrices: dict, name: str = "") -> "FiniteComplex":
        """sizes[n] basis elements in degree n; matrices[n][(i, j)] = coefficient of ∂(e_j) on e_i."""
        bases = {n: [(n, j) for j in range(s)] for n, s in enumerate(sizes)}
        cols = {}
        for n, entries in matrices.items():
            for (i, j), c in entries.items():
                cols.setdefault((n, j), Chain()).add_term((n - 1, i), c)
        return cls(bases, lambda key: cols.get(key, Chain()), name)

    def dim(self, n: int) -> int:
        return len(self.bases.get(n, ()))

    def columns(self, n: int) -> list:
        """Sparse columns of ∂_n: C_n → C_{n-1}; checks closure of the truncation."""
        hit = self._columns.get(n)
        if hit is not None:
            return hit
        cols = []
        if n >= 1 and n in self.bases:
            idx = self.index.get(n - 1, {})
            for key in self.bases[n]:
                col = {}
                for k, c in self.differential(key).items():
                    pos = idx.get(k)
                    if pos is None:
                        raise TruncationError(f"{self.name}: ∂ of {_show(key)} leaves the truncation at {_show(k)}")
                    col[pos] = c
                cols.append(col)
        self._columns[n] = cols
        return cols

    def audit(self) -> None:
        """Raise ConsistencyError unless ∂_{n-1}∘∂_n = 0 for every n."""
        for n in range(2, self.top + 1):
            for key in self.bases[n]:
                img = self.differential(key)
                total = Chain()
                for k, c in img.items():
                    total.add_chain(self.differential(k), c)
                if total:
                    raise ConsistencyError(f"{self.name}: ∂∂ ≠ 0 on {_show(key)}")

    def rank(self, n: int) -> int:
        return exact_rank(self.columns(n))


def _show(key) -> str:
    try:
        from .chains import format_key
        return format_key(key)
    except Exception:
        return repr(key)


def homology(cx: FiniteComplex, audit: bool = True, degrees: int | None = None) -> list:
    """Betti numbers in degrees 0..top-1 (the top degree only feeds ranks)."""
    if audit:
        cx.audit()
    top = cx.top if degrees is None else degrees + 1
    ranks = {n: cx.rank(n) for n in range(1, top + 1)}
    return [cx.dim(n) - ranks.get(n, 0) - ranks.get(n + 1, 0) for n in range(top)]


def full_homology(cx: FiniteComplex, audit: bool = True) -> list:
    """Betti numbers in every degree, treating the complex as ending at its top."""
    if audit:
        cx.audit()
    ranks = {n: cx.rank(n) for n in range(1, cx.top + 1)}
    return [cx.dim(n) - ranks.get(n, 0) - ranks.get(n + 1, 0) for n in range(cx.top + 1)]


# ---------------------------------------------------------------------------
# Group homology complexes
# ---------------------------------------------------------------------------

def _is_infinite(model: GroupModel) -> bool:
    orders = getattr(model, "orders", None)
    if orders is None:
        return model.rank > 0
    return sum(1 for n in orders if n > 1) >= 2


def _finite_elements(model: GroupModel) -> list:
    if _is_infinite(model):
        raise InvalidInput(f"{model.name} is infinite")
    return CayleyBall(model, max(getattr(model, "orders", ()), default=1)).elements


def bar_coinvariants(model: GroupModel, N: int) -> FiniteComplex:
    """C_*(Γ)_Γ for a finite group with basis [e, g1, …, gn] (degenerates included)."""
    els = _finite_elements(model)
    e = model.identity
    bases = {0: [(e,)]}
    for n in range(1, N + 1):
        prev = bases[n - 1]
        bases[n] = [k + (g,) for k in prev for g in els]

    def diff(key):
        out = Chain()
        for k, c in boundary(Chain.basis(key)).items():
            out.add_term(_normalize_first(k), c)
        return out

    return FiniteComplex(bases, diff, f"bar({model.name})")


def _normalize_first(verts):
    if verts[0].is_identity():
        return verts
    gi = verts[0].inverse()
    m = gi.model
    return tuple(m.multiply(gi, x) for x in verts)


def rips_ordered(model: GroupModel, R: int, N: int, cap: int = 200_000) -> FiniteComplex:
    """Normalized ordered Rips coinvariants: [e, g1, …, gn], pairwise ≤ R, consecutive distinct."""
    ball = CayleyBall(model, R)
    pts = ball.elements
    e = model.identity
    bases = {0: [(e,)]}
    for n in range(1, N + 1):
        nxt = []
        for k in bases[n - 1]:
            for g in pts:
                if g is k[-1]:
                    continue
                if all(model.distance(x, g) <= R for x in k):
                    nxt.append(k + (g,))
            if len(nxt) > cap:
                raise ResourceLimit(f"ordered Rips degree {n} exceeds {cap} simplices")
        bases[n] = nxt

    def diff(key):
        out = Chain()
        for k, c in boundary(Chain.basis(key)).items():
            if any(k[i] is k[i + 1] for i in range(len(k) - 1)):
                continue
            out.add_term(_normalize_first(k), c)
        return out

    return FiniteComplex(bases, diff, f"rips-ordered({model.name},R={R})")


def _orbit_class(key):
    """(canonical sorted simplex, sign) of the Γ-orbit of an oriented simplex; sign 0 if the orbit dies."""
    t, _, sgn = canonical_translate(key)
    for _, s in stabilizer(t):
        if s == -1:
            return t, 0
    return t, sgn


def rips_alternating(model: GroupModel, R: int, N: int, cap: int = 200_000) -> FiniteComplex:
    """Coinvariants of the oriented Rips complex: one basis element per Γ-orbit of
    sets {x0 < … < xn} with pairwise distance ≤ R (orbits reversed by a stabilizer drop out)."""
    ball = CayleyBall(model, R)
    e = model.identity
    cands = [x for x in ball.elements if x is not e]
    nbr = {x: [y for y in cands if y.key > x.key and model.distance(x, y) <= R] for x in cands}
    bases = {0: [(e,)]}
    levels = {0: [()]}
    for n in range(1, N + 1):
        grown = []
        for tail in levels[n - 1]:
            pool = cands if not tail else nbr[tail[-1]]
            for y in pool:
                if all(model.distance(x, y) <= R for x in tail):
                    grown.append(tail + (y,))
            if len(grown) > cap:
                raise ResourceLimit(f"Rips degree {n} exceeds {cap} simplices")
        levels[n] = grown
        seen = {}
        for tail in grown:
            verts = tuple(sorted((e,) + tail, key=lambda g: g.key))
            t, s = _orbit_class(verts)
            if s and t not in seen:
                seen[t] = None
        bases[n] = sorted(seen, key=sort_key)

    def diff(key):
        out = Chain()
        for k, c in oriented_boundary(Chain.basis(key)).items():
            t, s = _orbit_class(k)
            if s:
                out.add_term(t, c * s)
        return out

    return FiniteComplex(bases, diff, f"rips-alternating({model.name},R={R})")


def group_homology_rips(model: GroupModel, R: int, N: int, route: str = "alternating",
                        delta=None) -> BettiTable:
    """H_n(Γ, ℚ) for n ≤ N from Rips coinvariants (exact once the Rips complex is contractible)."""
    if route == "alternating":
        cx = rips_alternating(model, R, N + 1)
    elif route == "ordered":
        cx = rips_ordered(model, R, N + 1)
    else:
        raise InvalidInput(f"unknown route {route!r}")
    betti = homology(cx)[: N + 1]
    certified = delta is not None and R >= 6 * delta + 4
    if not _is_infinite(model):
        # the Rips complex is a full simplex once R reaches the diameter
        certified = certified or R >= max(g.length for g in _finite_elements(model))
    table = BettiTable()
    table.add(model.name, betti, True if certified else None)
    return table


# ---------------------------------------------------------------------------
# Weight-truncated class components of forms
# ---------------------------------------------------------------------------

class ClassForms:
    """Enumerates forms a0 da1 ⋯ dan of one conjugacy class with Σ ℓ(a_i) ≤ W."""

    def __init__(self, model: GroupModel, rep, weight_cap: int):
        self.model = model
        self.rep = model.conjugacy_rep(rep)[0]
        self.W = weight_cap
        self.ball = CayleyBall(model, weight_cap).elements
        self._cls: dict = {}

    def _class(self, g):
        hit = self._cls.get(g)
        if hit is None:
            hit = self.model.conjugacy_rep(g)[0]
            self._cls[g] = hit
        return hit

    def forms(self, n: int, reduced: bool = True) -> list:
        model = self.model
        W = self.W
        ball = self.ball
        out = []

        def grow(tail, used, P):
            if len(tail) == n:
                r = W - used
                for x in ball:
                    if x.length > r:
                        break
                    if self._class(model.multiply(x, P)) is self.rep:
                        out.append((x,) + tuple(tail))
                return
            for g in ball:
                if reduced and g.length == 0:
                    continue
                if used + g.length > W:
                    break
                grow(tail + [g], used + g.length, model.multiply(P, g))

        grow([], 0, model.identity)
        return sorted(out, key=sort_key)


def weight_of_form(key) -> int:
    return sum(a.length for a in key if hasattr(a, "length"))


def hochschild_complex(model: GroupModel, rep, spec: TruncationSpec) -> FiniteComplex:
    """Class component of the reduced Hochschild complex (Ω̄*, b), weight ≤ W, degrees ≤ N+1."""
    cf = ClassForms(model, rep, _weight(spec))
    bases = {n: cf.forms(n) for n in range(spec.degree_cap + 2)}
    return FiniteComplex(bases, lambda k: hochschild_b(Chain.basis(k), reduced=True),
                         f"HH({model.name},<{cf.rep}>,W={cf.W})")


def cyclic_bicomplex(model: GroupModel, rep, spec: TruncationSpec) -> FiniteComplex:
    """Total complex of the reduced (b, B) bicomplex: degree n is ⊕_k Ω̄_{n-2k}."""
    cf = ClassForms(model, rep, _weight(spec))
    forms = {m: cf.forms(m) for m in range(spec.degree_cap + 2)}
    bases = {}
    for n in range(spec.degree_cap + 2):
        bases[n] = [(k, f) for k in range(n // 2 + 1) for f in forms[n - 2 * k]]

    def diff(key):
        k, f = key
        out = Chain()
        for g, c in hochschild_b(Chain.basis(f), reduced=True).items():
            out.add_term((k, g), c)
        if k >= 1:
            for g, c in connes_B(Chain.basis(f), reduced=True).items():
                out.add_term((k - 1, g), c)
        return out

    return FiniteComplex(bases, diff, f"CC({model.name},<{cf.rep}>,W={cf.W})")


def connes_complex(model: GroupModel, rep, spec: TruncationSpec) -> FiniteComplex:
    """Class component of Connes' complex C^λ = C/(1 − T) with b, weight ≤ W."""
    cf = ClassForms(model, rep, _weight(spec))
    bases = {}
    for n in range(spec.degree_cap + 2):
        reps = set()
        for f in cf.forms(n, reduced=False):
            c = cyclic_normal_form(Chain.basis(f))
            reps.update(c)
        bases[n] = sorted(reps, key=sort_key)
    return FiniteComplex(bases, lambda k: cyclic_normal_form(hochschild_b(Chain.basis(k))),
                         f"Clambda({model.name},<{cf.rep}>,W={cf.W})")


def _weight(spec: TruncationSpec) -> int:
    if spec.weight_cap is None:
        raise InvalidInput("this truncation needs a weight cap")
    return spec.weight_cap


def truncate_complex(kind: str, model: GroupModel, spec: TruncationSpec, rep=None) -> FiniteComplex:
    kind = kind.lower()
    if kind == "bar":
        return bar_coinvariants(model, spec.degree_cap)
    if kind in ("rips", "rips-ordered"):
        return rips_ordered(model, _rips(spec), spec.degree_cap)
    if kind == "rips-alternating":
        return rips_alternating(model, _rips(spec), spec.degree_cap)
    rep = model.identity if rep is None else rep
    if kind == "hochschild":
        return hochschild_complex(model, rep, spec)
    if kind in ("cyclic", "cyclic-bicomplex"):
        return cyclic_bicomplex(model, rep, spec)
    if kind == "connes":
        return connes_complex(model, rep, spec)
    raise InvalidInput(f"unknown complex kind {kind!r}")


def _rips(spec):
    if spec.rips is None:
        raise InvalidInput("this truncation needs a Rips parameter")
    return spec.rips


def full_weight_cap(model: GroupModel, degree_cap: int):
    """For a finite group, a weight cap at which nothing is truncated; None if infinite."""
    if _is_infinite(model):
        return None
    diam = max(g.length for g in _finite_elements(model))
    return diam * (degree_cap + 2)


# ---------------------------------------------------------------------------
# Per-class Hochschild, cyclic and periodic homology
# ---------------------------------------------------------------------------

@dataclass
class ClassHomology:
    rep: str
    theory: str
    dims: list
    stable: list
    caps: tuple
    extra: dict = field(default_factory=dict)


def _at_caps(builder, model, rep, spec: TruncationSpec):
    """Betti numbers at weight caps W−2 and W (or once, when W covers a finite group)."""
    full = full_weight_cap(model, spec.degree_cap)
    W = spec.weight_cap
    if full is not None and (W is None or W >= full):
        s = TruncationSpec(spec.degree_cap, full)
        dims = homology(builder(model, rep, s))[: spec.degree_cap + 1]
        return dims, [True] * len(dims), (full,)
    if W is None:
        raise InvalidInput("an infinite group needs a weight cap")
    lo = TruncationSpec(spec.degree_cap, max(W - 2, 0))
    hi = TruncationSpec(spec.degree_cap, W)
    d_lo = homology(builder(model, rep, lo))[: spec.degree_cap + 1]
    d_hi = homology(builder(model, rep, hi))[: spec.degree_cap + 1]
    return d_hi, [a == b for a, b in zip(d_lo, d_hi)], (lo.weight_cap, W)


def per_class_homology(model: GroupModel, rep, theory: str, spec: TruncationSpec,
                       route: str = "bicomplex") -> ClassHomology:
    """HH, HC or HP of the class component ⟨rep⟩ of the group ring.

    HC routes: 'bicomplex' (reduced (b, B) total complex) or 'connes'.
    HP of a torsion class comes from HH through the periodic sum of the
    twisted homology; `extra['from_hc']` holds the stabilized-HC reading.
    """
    theory = theory.upper()
    rep = model.conjugacy_rep(rep)[0]
    if theory == "HH":
        dims, stable, caps = _at_caps(hochschild_complex, model, rep, spec)
        return ClassHomology(str(rep), "HH", dims, stable, caps)
    if theory == "HC":
        builder = cyclic_bicomplex if route == "bicomplex" else connes_complex
        dims, stable, caps = _at_caps(builder, model, rep, spec)
        return ClassHomology(str(rep), "HC", dims, stable, caps, {"route": route})
    if theory == "HP":
        hh = per_class_homology(model, rep, "HH", spec)
        hc = per_class_homology(model, rep, "HC", spec)
        if model.order(rep) is None:
            even, odd = None, None
        else:
            even = sum(d for n, d in enumerate(hh.dims) if n % 2 == 0)
            odd = sum(d for n, d in enumerate(hh.dims) if n % 2 == 1)
        stable = [all(hh.stable), all(hh.stable)]
        return ClassHomology(str(rep), "HP", [even, odd], stable, hh.caps,
                             {"from_hc": hp_from_hc(hc), "hh": hh.dims, "hc": hc.dims})
    raise InvalidInput(f"unknown theory {theory!r}")


def hp_from_hc(hc: ClassHomology) -> dict:
    """Read (HP_even, HP_odd) off the top of a truncated HC table.

    S-degeneration is witnessed when HC_n = HC_{n-2} for the top two degrees.
    """
    d = hc.dims
    N = len(d) - 1
    top_even = N if N % 2 == 0 else N - 1
    top_odd = N if N % 2 == 1 else N - 1
    even = d[top_even] if top_even >= 0 else None
    odd = d[top_odd] if top_odd >= 0 else None
    degenerate = N >= 3 and d[N] == d[N - 2] and d[N - 1] == d[N - 3]
    return {"even": even, "odd": odd, "s_degenerate": degenerate,
            "stable": all(hc.stable[max(top_odd, 0):]) if d else False}


# ---------------------------------------------------------------------------
# Comparisons
# ---------------------------------------------------------------------------

def centralizer_homology(model: GroupModel, v, R: int, N: int) -> list:
    """H_n(Z(v), ℚ), n ≤ N, through a model of the centralizer."""
    cm = model.centralizer_model(v)
    return group_homology_rips(cm, R, N).dims(cm.name)


def burghelea_check(model: GroupModel, spec: TruncationSpec, classes: Iterable | None = None,
                    R: int = 4) -> dict:
    """Compare HH of each class with H_*(Z(v), ℚ) on stabilized rows."""
    if classes is None:
        classes = model.torsion_class_reps()
    report = {"model": model.name, "classes": [], "pass": True}
    for v in classes:
        hh = per_class_homology(model, v, "HH", spec)
        zh = centralizer_homology(model, v, R, spec.degree_cap)
        mismatches = [n for n in range(len(hh.dims)) if hh.stable[n] and hh.dims[n] != zh[n]]
        report["classes"].append({"class": hh.rep, "HH": hh.dims, "stable": hh.stable,
                                  "centralizer": zh, "mismatch_degrees": mismatches, "caps": list(hh.caps)})
        if mismatches:
            report["pass"] = False
    return report


def hyperbolic_class_checks(model: GroupModel, v, weight_cap: int = 3, R: int = 4, samples: int = 20) -> dict:
    """Evidence that an infinite-order class contributes nothing to HP.

    Checks the splitting identity I∘p∘s = Id on class forms and the ∇̃
    homotopy identity on twisted simplices with twist v.
    """
    from .norms import twisted_simplices

    sec = Section(v)
    sp = sigma_prime_exact(v)
    forms = []
    cf = ClassForms(model, v, weight_cap + v.length)
    for n in range(3):
        forms += cf.forms(n)
    split_ok = True
    for f in forms[:samples]:
        c = cyclic_normal_form(Chain.basis(f))
        if not c:
            continue
        back = cyclic_normal_form(p_map(s_split(c, sec, sp)))
        split_ok = split_ok and back == c
    nb = Nabla(RipsProjection(Theta(Bicombing(model)), R))
    nabla_ok = True
    count = 0
    for n in range(3):
        for key in twisted_simplices(v, n, v.length + weight_cap)[:samples]:
            a = Chain.basis(key)
            nabla_ok = nabla_ok and boundary(nb(a)) + nb(boundary(a)) == a - nb.theta_prime(a)
            count += 1
    return {"class": str(v), "split_identity": split_ok, "nabla_identity": nabla_ok,
            "forms_checked": min(len(forms), samples), "simplices_checked": count}


def hyperbolic_class_reps(model: GroupModel, radius: int = 2) -> list:
    """Representatives of the infinite-order classes met in the ball of the given radius."""
    reps = {}
    for g in CayleyBall(model, radius).elements:
        if model.order(g) is None:
            r = model.conjugacy_rep(g)[0]
            reps.setdefault(r, None)
    return sorted(reps, key=lambda g: g.key)


def gamma_tors_report(model: GroupModel, spec: TruncationSpec, R: int = 4,
                      hyperbolic: Iterable | None = None) -> dict:
    """Compare ⊕_{torsion ⟨v⟩} H_*(Z(v),ℚ) with the summed per-class HP in (even, odd)."""
    N = spec.degree_cap
    left = [0, 0]
    right = [0, 0]
    rows = []
    all_stable = True
    for v in model.torsion_class_reps():
        zh = centralizer_homology(model, v, R, N)
        hp = per_class_homology(model, v, "HP", spec)
        le = [sum(zh[0::2]), sum(zh[1::2])]
        for i in range(2):
            left[i] += le[i]
            right[i] += hp.dims[i]
        stable = all(hp.stable)
        all_stable = all_stable and stable
        rows.append({"class": str(v), "centralizer_homology": zh, "left": le,
                     "HP": hp.dims, "HP_from_HC": hp.extra["from_hc"], "stable": stable,
                     "agree": le == hp.dims})
    if hyperbolic is None:
        hyperbolic = hyperbolic_class_reps(model)
    hyp_rows = []
    for v in hyperbolic:
        chk = hyperbolic_class_checks(model, v)
        chk["contribution"] = 0 if (chk["split_identity"] and chk["nabla_identity"]) else "inconclusive"
        hyp_rows.append(chk)
    agree = left == right
    return {"model": model.name, "degree_cap": N, "left": left, "right": right,
            "classes": rows, "hyperbolic": hyp_rows, "stable": all_stable,
            "agree": agree and all(r["contribution"] == 0 for r in hyp_rows)}
