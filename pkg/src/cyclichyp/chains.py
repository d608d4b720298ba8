"""Bar, twisted Bar, Hochschild and cyclic chains with exact rational coefficients.

Basis conventions
-----------------
* Bar simplex: a tuple of group elements ``(g0, ..., gn)``.  The empty tuple
  spans the augmentation degree -1.
* Twisted Bar simplex: ``TwistedSimplex(vertices, twist)`` for [g0,...,gn; v].
* Form / tensor: a tuple ``(a0, a1, ..., an)`` read as a0·da1⋯dan (or
  a0⊗a1⊗⋯⊗an).  The head may be ``UNIT``, the adjoined formal unit; in reduced
  forms it is identified with the group identity.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product
from math import factorial
from typing import Callable, NamedTuple

from .groups import GroupElement, InvalidInput


class _FormalUnit:
    __slots__ = ()

    def __repr__(self):
        return "1~"

    def __reduce__(self):
        return "UNIT"


UNIT = _FormalUnit()


def _clean(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class Chain(dict):
    """Finitely supported {basis: coefficient}; zero coefficients are never stored."""

    __slots__ = ()

    @classmethod
    def basis(cls, key, coef=1) -> "Chain":
        return cls({key: coef}) if coef else cls()

    def add_term(self, key, coef) -> None:
        """In-place accumulation, only for building a fresh chain."""
        if not coef:
            return
        new = self.get(key, 0) + coef
        if new:
            self[key] = _clean(new)
        else:
            del self[key]

    def add_chain(self, other, scale=1) -> None:
        if not scale:
            return
        for k, c in other.items():
            self.add_term(k, c * scale)

    def __add__(self, other: "Chain") -> "Chain":
        out = Chain(self)
        out.add_chain(other)
        return out

    def __sub__(self, other: "Chain") -> "Chain":
        out = Chain(self)
        out.add_chain(other, -1)
        return out

    def __neg__(self) -> "Chain":
        return Chain({k: -c for k, c in self.items()})

    def __mul__(self, scalar) -> "Chain":
        if not scalar:
            return Chain()
        return Chain({k: _clean(c * scalar) for k, c in self.items()})

    __rmul__ = __mul__

    def l1(self):
        return sum((abs(c) for c in self.values()), 0)

    def sorted_terms(self):
        return sorted(self.items(), key=lambda kc: sort_key(kc[0]))

    def __repr__(self):
        if not self:
            return "0"
        return " + ".join(f"{c}*{format_key(k)}" for k, c in self.sorted_terms())


def as_chain(x) -> Chain:
    if isinstance(x, Chain):
        return x
    if isinstance(x, dict):
        return Chain({k: c for k, c in x.items() if c})
    return Chain.basis(x)


def linear(f: Callable) -> Callable:
    """Extend a basis-level map (key -> Chain) linearly to chains."""

    def extended(c, *args, **kwargs):
        out = Chain()
        for key, coef in as_chain(c).items():
            out.add_chain(f(key, *args, **kwargs), coef)
        return out

    extended.__name__ = getattr(f, "__name__", "linear_map")
    extended.__doc__ = f.__doc__
    return extended


class TwistedSimplex(NamedTuple):
    vertices: tuple
    twist: GroupElement

    @property
    def degree(self) -> int:
        return len(self.vertices) - 1

    @property
    def degenerate(self) -> bool:
        return is_degenerate(self.vertices)


def _split(key):
    if type(key) is TwistedSimplex:
        return key.vertices, key.twist
    return key, None


def _join(verts, twist):
    if twist is None:
        return verts
    return TwistedSimplex(verts, twist)


def sort_key(key):
    if type(key) is TwistedSimplex:
        return (1, tuple(g.key for g in key.vertices), key.twist.key)
    return (0, tuple((0, ()) if a is UNIT else a.key for a in key))


def format_key(key) -> str:
    if type(key) is TwistedSimplex:
        return "[" + ",".join(map(str, key.vertices)) + "; " + str(key.twist) + "]"
    return "(" + ",".join("1~" if a is UNIT else str(a) for a in key) + ")"


def degree(key) -> int:
    return len(_split(key)[0]) - 1


def is_degenerate(vertices) -> bool:
    return any(vertices[i] is vertices[i + 1] for i in range(len(vertices) - 1))


# ---------------------------------------------------------------------------
# Bar complex
# ---------------------------------------------------------------------------

def boundary(c, augmented: bool = False) -> Chain:
    """Alternating sum of faces; twist is carried along.  Degree 0 maps to the
    empty simplex when `augmented`."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        n = len(verts) - 1
        if n < 0:
            continue
        if n == 0:
            if augmented:
                out.add_term(_join((), twist), coef)
            continue
        for i in range(n + 1):
            out.add_term(_join(verts[:i] + verts[i + 1:], twist), coef if i % 2 == 0 else -coef)
    return out


def shifted_boundary(c) -> Chain:
    """Differential of C_{*-1}(Γ,ℂv)⊗ℂΓ read on [g0..gn] = [g0..g_{n-1}]⊗g_n:
    faces that keep the last vertex."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        n = len(verts) - 1
        for i in range(n):
            out.add_term(_join(verts[:i] + verts[i + 1:], twist), coef if i % 2 == 0 else -coef)
    return out


def degenerate_reduce(c) -> Chain:
    """Drop degenerate Bar simplices (for forms use `reduce_forms`)."""
    return Chain({k: v for k, v in as_chain(c).items() if not is_degenerate(_split(k)[0])})


def contraction_s(x: GroupElement, c) -> Chain:
    """s_x[x0..xn] = [x, x0..xn]; on the augmentation s_x() = [x]."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        out.add_term(_join((x,) + verts, twist), coef)
    return out


def support(c) -> set:
    out = set()
    for key in as_chain(c):
        out.update(_split(key)[0])
    return out


def weight(key) -> int:
    """Weight of a (twisted) simplex: Σ d(g_i, g_{i+1}) + d(g_n, v·g_0)."""
    verts, twist = _split(key)
    if not verts:
        return 0
    model = verts[0].model
    total = 0
    for i in range(len(verts) - 1):
        total += model.distance(verts[i], verts[i + 1])
    close = verts[0] if twist is None else model.multiply(twist, verts[0])
    return total + model.distance(verts[-1], close)


def max_weight(c) -> int:
    return max((weight(k) for k in as_chain(c)), default=0)


def translate(g: GroupElement, c) -> Chain:
    """Left action g·[g0..gn; v] = [g·g0..g·gn; g v g⁻¹]."""
    model = g.model
    out = Chain()
    gi = g.inverse()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        nv = tuple(model.multiply(g, x) for x in verts)
        nt = None if twist is None else model.multiply(model.multiply(g, twist), gi)
        out.add_term(_join(nv, nt), coef)
    return out


def attach_twist(c, v: GroupElement) -> Chain:
    return Chain({TwistedSimplex(k, v): coef for k, coef in as_chain(c).items()})


def strip_twist(c) -> Chain:
    out = Chain()
    for key, coef in as_chain(c).items():
        out.add_term(_split(key)[0], coef)
    return out


def concat(a, b) -> Chain:
    """Bilinear join [A, B] of two untwisted chains."""
    out = Chain()
    for ka, ca in a.items():
        for kb, cb in b.items():
            out.add_term(ka + kb, ca * cb)
    return out


def identity_map(key) -> Chain:
    return Chain.basis(key)


def homotopy_h(phi: Callable, psi: Callable, c) -> Chain:
    """h(φ,ψ)[x0..xn] = Σ_i (-1)^i [φ(x0..xi), ψ(xi..xn)], with ψ − φ = ∂h + h∂.

    φ and ψ act on vertex tuples; a twist on the input is passed through.
    """
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        n = len(verts) - 1
        for i in range(n + 1):
            joined = concat(phi(verts[: i + 1]), psi(verts[i:]))
            sgn = coef if i % 2 == 0 else -coef
            for k, v in joined.items():
                out.add_term(_join(k, twist), v * sgn)
    return out


def apply_map(f: Callable, c) -> Chain:
    """Apply a vertex-tuple chain map to a (possibly twisted) chain."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        for k, v in f(verts).items():
            out.add_term(_join(k, twist), v * coef)
    return out


def simplicial_map(f: Callable) -> Callable:
    """Chain map induced by a map of vertex sets."""

    def mapped(verts):
        return Chain.basis(tuple(f(x) for x in verts))

    return mapped


# ---------------------------------------------------------------------------
# Forms, Hochschild b, Connes B, cyclic T
# ---------------------------------------------------------------------------

def _mul_unit(x, y):
    if x is UNIT:
        return y
    if y is UNIT:
        return x
    return x.model.multiply(x, y)


def reduce_forms(c) -> Chain:
    """Image in the reduced forms: dg with g = e vanishes, the formal unit becomes e."""
    out = Chain()
    for key, coef in as_chain(c).items():
        if any((a is UNIT or a.is_identity()) for a in key[1:]):
            continue
        if key and key[0] is UNIT:
            tail = key[1:]
            if not tail:
                raise InvalidInput("the formal unit alone has no reduced image in this model")
            key = (tail[0].model.identity,) + tail
        out.add_term(key, coef)
    return out


def hochschild_b(c, reduced: bool = False) -> Chain:
    """b(a0da1⋯dan) = Σ_{i<n} (-1)^i a0⋯d(a_i a_{i+1})⋯ + (-1)^n a_n a0 da1⋯da_{n-1}."""
    out = Chain()
    for key, coef in as_chain(c).items():
        n = len(key) - 1
        if n <= 0:
            continue
        for i in range(n):
            k = key[:i] + (_mul_unit(key[i], key[i + 1]),) + key[i + 2:]
            out.add_term(k, coef if i % 2 == 0 else -coef)
        k = (_mul_unit(key[n], key[0]),) + key[1:n]
        out.add_term(k, coef if n % 2 == 0 else -coef)
    return reduce_forms(out) if reduced else out


def connes_B(c, reduced: bool = False) -> Chain:
    """B(a0da1⋯dan) = Σ_i (-1)^{in} da_i⋯da_n da_0⋯da_{i-1}; zero on a formal-unit head."""
    out = Chain()
    for key, coef in as_chain(c).items():
        if key[0] is UNIT:
            continue
        n = len(key) - 1
        for i in range(n + 1):
            k = (UNIT,) + key[i:] + key[:i]
            out.add_term(k, coef if (i * n) % 2 == 0 else -coef)
    return reduce_forms(out) if reduced else out


def cyclic_T(c) -> Chain:
    """T(a0⊗⋯⊗an) = (-1)^n a_n⊗a0⊗⋯⊗a_{n-1}."""
    out = Chain()
    for key, coef in as_chain(c).items():
        n = len(key) - 1
        out.add_term((key[n],) + key[:n], coef if n % 2 == 0 else -coef)
    return out


def form_product(key) -> GroupElement:
    model = next(a for a in key if a is not UNIT).model
    g = model.identity
    for a in key:
        if a is not UNIT:
            g = model.multiply(g, a)
    return g


def form_class(key) -> GroupElement:
    """Canonical representative of the conjugacy class of a0a1⋯an."""
    g = form_product(key)
    return g.model.conjugacy_rep(g)[0]


def homogeneous_component(c, rep: GroupElement) -> Chain:
    return Chain({k: v for k, v in as_chain(c).items() if form_class(k) is rep})


def cyclic_normal_form(c) -> Chain:
    """Canonical representative of a tensor chain modulo the image of (Id − T)."""
    out = Chain()
    for key, coef in as_chain(c).items():
        rep, sgn = _cyclic_canonical(key)
        if sgn:
            out.add_term(rep, coef * sgn)
    return out


_CYC_CACHE: dict = {}


def _cyclic_canonical(key):
    hit = _CYC_CACHE.get(key)
    if hit is not None:
        return hit
    n = len(key) - 1
    orbit = {}
    cur, sgn = key, 1
    killed = False
    for _ in range(n + 1):
        if cur in orbit and orbit[cur] != sgn:
            killed = True
        orbit.setdefault(cur, sgn)
        cur = (cur[n],) + cur[:n]
        if n % 2:
            sgn = -sgn
    rep = min(orbit, key=sort_key)
    result = (rep, 0 if killed else orbit[rep])
    if len(_CYC_CACHE) > 2_000_000:
        _CYC_CACHE.clear()
    _CYC_CACHE[key] = result
    return result


# ---------------------------------------------------------------------------
# Maps between twisted Bar chains and forms
# ---------------------------------------------------------------------------

def p_map(c, reduced: bool = False) -> Chain:
    """[g0..gn; v] ↦ (gn⁻¹ v g0)·d(g0⁻¹g1)⋯d(g_{n-1}⁻¹g_n)."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, v = key
        model = v.model
        head = model.multiply(model.multiply(verts[-1].inverse(), v), verts[0])
        tail = tuple(model.multiply(verts[i].inverse(), verts[i + 1]) for i in range(len(verts) - 1))
        out.add_term((head,) + tail, coef)
    return reduce_forms(out) if reduced else out


p_v = p_map


def q_map(c) -> Chain:
    """h0dh1⋯dhn ↦ [h0, h0h1, …, h0⋯hn; h0⋯hn]."""
    out = Chain()
    for key, coef in as_chain(c).items():
        if key[0] is UNIT:
            raise InvalidInput("q is defined on tensors with a group-element head")
        model = key[0].model
        acc = []
        g = model.identity
        for a in key:
            g = model.multiply(g, a)
            acc.append(g)
        out.add_term(TwistedSimplex(tuple(acc), g), coef)
    return out


def iota_v(c, sigma: Callable) -> Chain:
    """ι_{v,σ}(g0⊗⋯⊗gn) = σ(u)⁻¹·[g0, g0g1, …, u; u] with u = g0⋯gn."""
    out = Chain()
    for key, coef in as_chain(c).items():
        if key[0] is UNIT:
            key = (key[1].model.identity,) + key[1:]
        model = key[0].model
        acc = []
        g = model.identity
        for a in key:
            g = model.multiply(g, a)
            acc.append(g)
        s = sigma(g).inverse()
        verts = tuple(model.multiply(s, x) for x in acc)
        twist = model.multiply(model.multiply(s, g), s.inverse())
        out.add_term(TwistedSimplex(verts, twist), coef)
    return out


def lifted_T(c) -> Chain:
    """T̃[g0..gn; v] = (-1)^n [v⁻¹gn, g0, …, g_{n-1}; v]."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, v = key
        n = len(verts) - 1
        first = v.model.multiply(v.inverse(), verts[-1])
        out.add_term(TwistedSimplex((first,) + verts[:-1], v), coef if n % 2 == 0 else -coef)
    return out


def lifted_B(c) -> Chain:
    """B̃[g0..gn; v] = Σ_i (-1)^{(i+1)n} [v⁻¹g_i, …, v⁻¹g_n, g_0, …, g_i; v].

    The sign (-1)^{(i+1)n} makes B∘p̄ = p̄∘B̃ hold on the nose.
    """
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, v = key
        model = v.model
        vi = v.inverse()
        shifted = tuple(model.multiply(vi, x) for x in verts)
        n = len(verts) - 1
        for i in range(n + 1):
            k = TwistedSimplex(shifted[i:] + verts[: i + 1], v)
            out.add_term(k, coef if ((i + 1) * n) % 2 == 0 else -coef)
    return out


# ---------------------------------------------------------------------------
# Averaging operators for torsion twists
# ---------------------------------------------------------------------------

_PERM_CACHE: dict = {}


def signed_permutations(m: int):
    hit = _PERM_CACHE.get(m)
    if hit is None:
        hit = []
        for p in permutations(range(m)):
            inv = sum(1 for i in range(m) for j in range(i + 1, m) if p[i] > p[j])
            hit.append((p, -1 if inv % 2 else 1))
        _PERM_CACHE[m] = hit
    return hit


def pi_as(c) -> Chain:
    """Antisymmetrization (1/(n+1)!) Σ_σ sign(σ) [g_σ(0), …, g_σ(n)]."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        m = len(verts)
        if len(set(verts)) < m:
            continue
        scale = Fraction(coef, factorial(m))
        for p, s in signed_permutations(m):
            out.add_term(_join(tuple(verts[i] for i in p), twist), scale * s)
    return out


def torsion_subgroup(v: GroupElement) -> list:
    order = v.model.order(v)
    if order is None:
        raise InvalidInput(f"{v} has infinite order")
    return [v.model.power(v, k) for k in range(order)]


def pi_U(c, v: GroupElement) -> Chain:
    """Average over U = ⟨v⟩ acting independently on each vertex."""
    U = torsion_subgroup(v)
    model = v.model
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        scale = Fraction(coef, len(U) ** len(verts))
        for hs in product(U, repeat=len(verts)):
            nv = tuple(model.multiply(h, x) for h, x in zip(hs, verts))
            out.add_term(_join(nv, twist), scale)
    return out


def mu_v(c, v: GroupElement) -> Chain:
    return pi_as(pi_U(c, v))


def hbar_mu(c, v: GroupElement, sigma: Callable) -> Chain:
    """Coinvariant image of h(μ_v, Id) on reduced forms of class ⟨v⟩:
    lift by ι, apply the homotopy, project by p, then reduce."""
    lifted = iota_v(c, sigma)
    phi = lambda verts: mu_v(Chain.basis(verts), v)
    return p_map(homotopy_h(phi, identity_map, lifted), reduced=True)


def mu_bar(c, v: GroupElement, sigma: Callable) -> Chain:
    return p_map(apply_map(lambda verts: mu_v(Chain.basis(verts), v), iota_v(c, sigma)), reduced=True)


def nu_v(c, v: GroupElement, sigma: Callable) -> Chain:
    """ν_v = id + h̄(μ_v, id)∘B on reduced forms of the elliptic class ⟨v⟩."""
    if v.model.order(v) is None:
        raise InvalidInput(f"{v} has infinite order")
    c = as_chain(c)
    return c + hbar_mu(connes_B(c, reduced=True), v, sigma)


# ---------------------------------------------------------------------------
# Splitting for classes of infinite order
# ---------------------------------------------------------------------------

def N_cyc(c) -> Chain:
    """(1/(n+1)) Σ_i (-1)^{in} a_i⊗⋯⊗a_n⊗a_0⊗⋯⊗a_{i-1}."""
    out = Chain()
    for key, coef in as_chain(c).items():
        n = len(key) - 1
        scale = Fraction(coef, n + 1)
        for i in range(n + 1):
            out.add_term(key[i:] + key[:i], scale if (i * n) % 2 == 0 else -scale)
    return out


def N_sigma_prime(c, sigma_prime: list) -> Chain:
    """(1/|N(v)|) Σ_h σ′(h)·[g0..gn; v] over coset representatives σ′(h) ∈ Z(v)."""
    out = Chain()
    m = len(sigma_prime)
    for key, coef in as_chain(c).items():
        verts, v = key
        model = v.model
        scale = Fraction(coef, m)
        for h in sigma_prime:
            out.add_term(TwistedSimplex(tuple(model.multiply(h, x) for x in verts), v), scale)
    return out


def one_minus_T(c) -> Chain:
    """(Id − T̃) on C_n(Γ,ℂv), read as [g0..g_{n-1}]⊗g_n ↦ [g0..gn] − (-1)^n[v⁻¹gn, g0..g_{n-1}]."""
    return as_chain(c) - lifted_T(c)


def _translate_simplex(g, verts):
    m = g.model
    return tuple(m.multiply(g, x) for x in verts)


def _orbit_position(key, stable: int):
    """Locate a twisted simplex on its T̃-orbit.

    Returns (canonical simplex c0, m, s) with key = s·T̃^m(c0), s = ±1.
    """
    verts, v = key
    model = v.model
    n = len(verts) - 1
    vi = v.inverse()
    best = None
    cur = verts
    sgn = 1
    for r in range(n + 1):
        # cur = s_r · T̃^r(key) as unsigned simplex with sign sgn
        x = cur[0]
        bound = (2 * x.length) // max(stable, 1) + 2
        for j in range(-bound, bound + 1):
            g = model.power(v, j)
            cand = _translate_simplex(g, cur)
            k = tuple(y.key for y in cand)
            if best is None or k < best[0]:
                # v^j·γ = T̃^{-j(n+1)} γ, so c0 = sgn·T̃^{r - j(n+1)}(key)
                best = (k, cand, r - j * (n + 1), sgn)
        first = model.multiply(vi, cur[-1])
        cur = (first,) + cur[:-1]
        if n % 2:
            sgn = -sgn
    _, cand, shift, sgn = best
    return TwistedSimplex(cand, v), -shift, sgn


def _T_power(key, m: int) -> Chain:
    """T̃^m applied to a basis simplex, m ≥ 0."""
    c = Chain.basis(key)
    for _ in range(m):
        c = lifted_T(c)
    return c


def kernel_decomposition(c, stable: int | None = None):
    """Write c ∈ Ker(I_v) as Σ μ_i (Id − T̃^{k_i}) α_i.

    Returns a list of (μ_i, α_i, k_i).  Raises InvalidInput when c is not in
    the kernel of the T̃-coinvariant projection.
    """
    c = as_chain(c)
    if not c:
        return []
    any_key = next(iter(c))
    v = any_key.twist
    if stable is None:
        stable = v.model.stable_length(v)
    if stable <= 0:
        raise InvalidInput("the twist must have infinite order")
    orbits: dict = {}
    for key, coef in c.items():
        if key.twist is not v:
            raise InvalidInput("all terms must carry the same twist")
        c0, m, s = _orbit_position(key, stable)
        orbits.setdefault(c0, {})
        d = orbits[c0]
        d[m] = d.get(m, 0) + coef * s
    decomposition = []
    for c0 in sorted(orbits, key=sort_key):
        coeffs = {m: x for m, x in orbits[c0].items() if x}
        if not coeffs:
            continue
        if sum(coeffs.values()) != 0:
            raise InvalidInput(f"chain is not in Ker(I_v): orbit of {format_key(c0)} has nonzero total")
        lo = min(coeffs)
        # c restricted to the orbit = Σ_m x_m T̃^m c0 = Σ_m x_m (T̃^m − T̃^lo) c0
        #                           = -Σ_m x_m (Id − T̃^{m−lo}) T̃^lo c0
        start = _shift(c0, lo)
        for m in sorted(coeffs):
            if m == lo:
                continue
            decomposition.append((-coeffs[m], start, m - lo))
    return decomposition


def _shift(c0: TwistedSimplex, m: int) -> Chain:
    """T̃^m c0 for any integer m (negative powers via T̃^{-(n+1)} = v-translation)."""
    n = c0.degree
    v = c0.twist
    if m >= 0:
        return _T_power(c0, m)
    q = (-m + n) // (n + 1)
    rest = m + q * (n + 1)
    lifted = translate(v.model.power(v, q), Chain.basis(c0))
    key = next(iter(lifted))
    return _T_power(key, rest) * lifted[key]


def invert_one_minus_T(c, certificate=None, stable: int | None = None) -> Chain:
    """(Id − T̃)⁻¹ on Ker(I_v) via Σ μ_i Σ_{j<k_i} T̃^j α_i."""
    if certificate is None:
        certificate = kernel_decomposition(c, stable)
    out = Chain()
    for mu, alpha, k in certificate:
        term = as_chain(alpha)
        for _ in range(k):
            out.add_chain(term, mu)
            term = lifted_T(term)
    return out


def chi(c) -> Chain:
    """[g0..g_{n-1}; v]⊗g_n ↦ [g_n, g0..g_{n-1}; v]⊗g_n, i.e. [g0..gn] ↦ [gn, g0..gn]."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, twist = _split(key)
        out.add_term(_join((verts[-1],) + verts, twist), coef)
    return out


def chi_v(c, stable: int | None = None) -> Chain:
    """(Id − T̃)∘χ∘(Id − T̃)⁻¹ on Ker(I_v)."""
    return one_minus_T(chi(invert_one_minus_T(c, stable=stable)))


def s_prime(c, sigma: Callable, sigma_prime: list) -> Chain:
    return N_sigma_prime(iota_v(N_cyc(c), sigma), sigma_prime)


def s_split(c, sigma: Callable, sigma_prime: list) -> Chain:
    """s = s′ − χ_v(∂s′ − s′∂) with s′ = N_σ′∘ι_{v,σ}∘N_cyc."""
    c = as_chain(c)
    sp = s_prime(c, sigma, sigma_prime)
    defect = boundary(sp) - s_prime(hochschild_b(c), sigma, sigma_prime)
    if not defect:
        return sp
    return sp - chi_v(defect)


# ---------------------------------------------------------------------------
# Centralizer maps for torsion twists
# ---------------------------------------------------------------------------

def j_v(c, v: GroupElement) -> Chain:
    """[h0..hn] ↦ [h0..hn; v]."""
    return attach_twist(c, v)


def kappa_v(c, sigma: Callable) -> Chain:
    """[g0..gn; v] ↦ [g0·σ(g0⁻¹vg0), …, gn·σ(gn⁻¹vgn)] over Z(v)."""
    out = Chain()
    for key, coef in as_chain(c).items():
        verts, v = key
        m = v.model
        nv = tuple(m.multiply(g, sigma(m.multiply(m.multiply(g.inverse(), v), g))) for g in verts)
        out.add_term(nv, coef)
    return out


# ---------------------------------------------------------------------------
# Text serialization
# ---------------------------------------------------------------------------

def to_text(c) -> str:
    """One line per term: coefficient p/q, twist word (or '-'), vertex words."""
    lines = []
    for key, coef in as_chain(c).sorted_terms():
        q = Fraction(coef)
        cs = f"{q.numerator}/{q.denominator}"
        verts, twist = _split(key)
        tw = "-" if twist is None else str(twist)
        words = " ".join("1~" if a is UNIT else str(a) for a in verts)
        lines.append(f"{cs}\t{tw}\t{words}".rstrip())
    return "\n".join(lines) + ("\n" if lines else "")


def from_text(text: str, model) -> Chain:
    out = Chain()
    for line in text.splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        coef = Fraction(parts[0])
        tw = parts[1] if len(parts) > 1 else "-"
        words = parts[2].split(" ") if len(parts) > 2 and parts[2] else []
        verts = tuple(UNIT if w == "1~" else model.parse(w) for w in words)
        key = verts if tw == "-" else TwistedSimplex(verts, model.parse(tw))
        out.add_term(key, _clean(coef))
    return out
