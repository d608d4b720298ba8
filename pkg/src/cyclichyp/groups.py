"""Concrete group models with exact normal forms.

Supported: free groups, free products of finite cyclic groups (which covers
finite cyclic groups and the infinite dihedral group ⟨a,b | a², b²⟩).

Elements are interned per model, so equality and hashing are by identity.
"""

from __future__ import annotations

from collections import deque
from math import gcd
from typing import Iterable, Sequence

DEFAULT_BALL_CAP = 50_000


class InvalidInput(ValueError):
    """Input outside the domain of an operation."""


class ResourceLimit(RuntimeError):
    """An enumeration exceeded its configured cap."""


class BoundaryTruncation(RuntimeError):
    """A computation needed data beyond the finite ball it was given."""


class GroupElement:
    """An element in normal form.  Never construct directly; use the model."""

    __slots__ = ("model", "word", "letters", "key", "_inv", "__weakref__")

    def __init__(self, model, word, letters):
        self.model = model
        self.word = word
        self.letters = letters
        self.key = (len(letters), letters)
        self._inv = None

    @property
    def length(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return not self.word

    def inverse(self) -> "GroupElement":
        if self._inv is None:
            self._inv = self.model.inverse(self)
        return self._inv

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.model.multiply(self, other)

    def __pow__(self, k: int) -> "GroupElement":
        return self.model.power(self, k)

    def __lt__(self, other: "GroupElement") -> bool:
        return self.key < other.key

    def __le__(self, other: "GroupElement") -> bool:
        return self.key <= other.key

    def __gt__(self, other: "GroupElement") -> bool:
        return self.key > other.key

    def __ge__(self, other: "GroupElement") -> bool:
        return self.key >= other.key

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        names = self.model.generators
        return "".join(names[i] for i in self.letters)

    def __repr__(self) -> str:
        return f"<{self} in {self.model.name}>"

    def __reduce__(self):
        return (_unpickle_element, (self.model, self.word))


def _unpickle_element(model, word):
    return model._make(word)


class GroupModel:
    """Common interface.  Subclasses define the normal form on `word` tuples."""

    name = "group"
    generators: tuple[str, ...] = ()
    inverse_letter: tuple[int, ...] = ()

    def __init__(self):
        self._table: dict = {}
        self._mul_cache: dict = {}
        self.identity = self._make(())

    # -- interning ---------------------------------------------------------
    def _make(self, word) -> GroupElement:
        el = self._table.get(word)
        if el is None:
            el = GroupElement(self, word, self._letters_of(word))
            el = self._table.setdefault(word, el)
        return el

    def _letters_of(self, word) -> tuple[int, ...]:
        raise NotImplementedError

    # -- to be provided by subclasses --------------------------------------
    def _mul_words(self, x, y):
        raise NotImplementedError

    def _inv_word(self, x):
        raise NotImplementedError

    def _letter_word(self, letter: int):
        raise NotImplementedError

    def cyclic_reduction(self, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        """Return (u, w) with g = u·w·u⁻¹ and w cyclically reduced."""
        raise NotImplementedError

    def rotations(self, w: GroupElement) -> list[tuple[GroupElement, GroupElement]]:
        """Pairs (p, r) with r = p⁻¹·w·p ranging over the cyclic permutations of w."""
        raise NotImplementedError

    def primitive_root(self, g: GroupElement) -> tuple[GroupElement, int]:
        """(r, k) with g = r^k and k maximal.  Only meaningful for infinite order."""
        raise NotImplementedError

    def order(self, g: GroupElement) -> int | None:
        """Order of g, or None when g has infinite order."""
        raise NotImplementedError

    def centralizer_model(self, g: GroupElement) -> "GroupModel":
        """A model of the centralizer Z(g) up to isomorphism."""
        raise NotImplementedError

    # -- public api ---------------------------------------------------------
    @property
    def generator_elements(self) -> tuple[GroupElement, ...]:
        return tuple(self._make(self._letter_word(i)) for i in range(len(self.generators)))

    def _check(self, *xs):
        for x in xs:
            if not isinstance(x, GroupElement) or x.model is not self:
                raise InvalidInput(f"{x!r} does not belong to {self.name}")

    def multiply(self, x: GroupElement, y: GroupElement) -> GroupElement:
        key = (x, y)
        z = self._mul_cache.get(key)
        if z is not None:
            return z
        if x.model is not self or y.model is not self:
            self._check(x, y)
        if not x.word:
            z = y
        elif not y.word:
            z = x
        else:
            z = self._make(self._mul_words(x.word, y.word))
        if len(self._mul_cache) > 4_000_000:
            self._mul_cache.clear()
        self._mul_cache[key] = z
        return z

    def inverse(self, x: GroupElement) -> GroupElement:
        self._check(x)
        return self._make(self._inv_word(x.word))

    def power(self, x: GroupElement, k: int) -> GroupElement:
        if k < 0:
            x, k = x.inverse(), -k
        result = self.identity
        base = x
        while k:
            if k & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            k >>= 1
        return result

    def product(self, xs: Iterable[GroupElement]) -> GroupElement:
        result = self.identity
        for x in xs:
            result = self.multiply(result, x)
        return result

    def normalize(self, letters: Sequence) -> GroupElement:
        """Normal form of a raw letter sequence (generator names or indices)."""
        result = self.identity
        for letter in letters:
            result = self.multiply(result, self._make(self._letter_word(self._letter_index(letter))))
        return result

    def parse(self, text: str) -> GroupElement:
        text = text.strip()
        if text in ("", "e", "1"):
            return self.identity
        return self.normalize(list(text))

    def _letter_index(self, letter) -> int:
        if isinstance(letter, int) and not isinstance(letter, bool):
            if 0 <= letter < len(self.generators):
                return letter
        elif letter in self.generators:
            return self.generators.index(letter)
        raise InvalidInput(f"unknown letter {letter!r} for {self.name}")

    def conjugate(self, g: GroupElement, x: GroupElement) -> GroupElement:
        """g·x·g⁻¹."""
        return self.multiply(self.multiply(g, x), g.inverse())

    def distance(self, x: GroupElement, y: GroupElement) -> int:
        return self.multiply(x.inverse(), y).length

    def is_torsion(self, g: GroupElement) -> bool:
        return self.order(g) is not None

    def stable_length(self, g: GroupElement) -> int:
        """Exact stable length: 0 for torsion, else the cyclically reduced length."""
        if self.is_torsion(g):
            return 0
        return self.cyclic_reduction(g)[1].length

    def conjugacy_rep(self, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        """(rep, c) with rep the canonical minimal element of ⟨g⟩ and g = c·rep·c⁻¹."""
        u, w = self.cyclic_reduction(g)
        best = None
        for p, r in self.rotations(w):
            if best is None or r.key < best[1].key:
                best = (p, r)
        p, rep = best
        return rep, self.multiply(u, p)

    def torsion_class_reps(self) -> list[GroupElement]:
        """Canonical representatives of all conjugacy classes of finite-order elements."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (type(self), self._init_args())

    def _init_args(self):
        raise NotImplementedError


class FreeGroup(GroupModel):
    """Free group on r generators a, b, c, ... with inverses A, B, C, ..."""

    def __init__(self, rank: int, names: Sequence[str] | None = None):
        if rank < 0:
            raise InvalidInput("rank must be nonnegative")
        self.rank = rank
        names = list(names) if names else [chr(ord("a") + i) for i in range(rank)]
        if len(names) != rank:
            raise InvalidInput("one name per generator")
        self._names = tuple(names)
        gens = []
        inv = []
        for i, nm in enumerate(names):
            gens += [nm, nm.upper() if nm.upper() != nm else nm + "'"]
            inv += [2 * i + 1, 2 * i]
        self.generators = tuple(gens)
        self.inverse_letter = tuple(inv)
        self.name = f"FreeGroup({rank})"
        super().__init__()

    def _init_args(self):
        return (self.rank, self._names)

    def _letters_of(self, word):
        return word

    def _letter_word(self, letter):
        return (letter,)

    def _mul_words(self, x, y):
        inv = self.inverse_letter
        i = 0
        n = min(len(x), len(y))
        while i < n and x[-1 - i] == inv[y[i]]:
            i += 1
        return x[: len(x) - i] + y[i:]

    def _inv_word(self, x):
        inv = self.inverse_letter
        return tuple(inv[c] for c in reversed(x))

    def cyclic_reduction(self, g):
        w = g.word
        inv = self.inverse_letter
        i = 0
        while len(w) - 2 * i >= 2 and w[i] == inv[w[len(w) - 1 - i]]:
            i += 1
        return self._make(w[:i]), self._make(w[i: len(w) - i])

    def rotations(self, w):
        word = w.word
        out = []
        for i in range(max(len(word), 1)):
            p = self._make(word[:i])
            out.append((p, self._make(word[i:] + word[:i])))
        return out

    def primitive_root(self, g):
        u, w = self.cyclic_reduction(g)
        word = w.word
        m = len(word)
        for p in range(1, m + 1):
            if m % p == 0 and word[:p] * (m // p) == word:
                r = self.conjugate(u, self._make(word[:p]))
                return r, m // p
        return g, 1

    def order(self, g):
        return 1 if g.is_identity() else None

    def centralizer_model(self, g):
        if g.is_identity():
            return self
        return FreeGroup(1)

    def torsion_class_reps(self):
        return [self.identity]


class FreeProduct(GroupModel):
    """Free product of finite cyclic groups Z/n₁ ∗ … ∗ Z/n_k.

    Words are tuples of syllables (factor, exponent) with 0 < exponent < n and
    adjacent syllables from distinct factors.  Factor i has generator t_i
    (and t_i⁻¹ when n_i > 2); t_i^k is spelled with min(k, n_i − k) letters.
    """

    def __init__(self, orders: Sequence[int], names: Sequence[str] | None = None, label: str | None = None):
        orders = tuple(int(n) for n in orders)
        if any(n < 1 for n in orders):
            raise InvalidInput("factor orders must be positive")
        self.orders = orders
        names = list(names) if names else [chr(ord("a") + i) for i in range(len(orders))]
        if len(names) != len(orders):
            raise InvalidInput("one name per factor")
        self._names = tuple(names)
        gens = []
        inv = []
        self._gen_syllable = []
        self._factor_letters = {}
        for f, (n, nm) in enumerate(zip(orders, names)):
            if n == 1:
                continue
            if n == 2:
                idx = len(gens)
                gens.append(nm)
                inv.append(idx)
                self._gen_syllable.append((f, 1))
                self._factor_letters[f] = (idx, idx)
            else:
                idx = len(gens)
                gens += [nm, nm.upper() if nm.upper() != nm else nm + "'"]
                inv += [idx + 1, idx]
                self._gen_syllable += [(f, 1), (f, n - 1)]
                self._factor_letters[f] = (idx, idx + 1)
        self.generators = tuple(gens)
        self.inverse_letter = tuple(inv)
        self.name = label or ("FreeProduct(" + ",".join(f"Z/{n}" for n in orders) + ")")
        super().__init__()

    def _init_args(self):
        return (self.orders, self._names, self.name)

    def _letters_of(self, word):
        out = []
        for f, k in word:
            n = self.orders[f]
            up, down = self._factor_letters[f]
            if k <= n - k:
                out += [up] * k
            else:
                out += [down] * (n - k)
        return tuple(out)

    def _letter_word(self, letter):
        return (self._gen_syllable[letter],)

    def _mul_words(self, x, y):
        x = list(x)
        j = 0
        while x and j < len(y) and x[-1][0] == y[j][0]:
            f = x[-1][0]
            k = (x[-1][1] + y[j][1]) % self.orders[f]
            x.pop()
            j += 1
            if k:
                x.append((f, k))
                break
        return tuple(x) + tuple(y[j:])

    def _inv_word(self, x):
        return tuple((f, self.orders[f] - k) for f, k in reversed(x))

    def cyclic_reduction(self, g):
        u = self.identity
        w = g
        while len(w.word) >= 2 and w.word[0][0] == w.word[-1][0]:
            s = self._make((w.word[0],))
            u = self.multiply(u, s)
            w = self.multiply(self.multiply(s.inverse(), w), s)
        return u, w

    def rotations(self, w):
        word = w.word
        out = []
        for i in range(max(len(word), 1)):
            out.append((self._make(word[:i]), self._make(word[i:] + word[:i])))
        return out

    def primitive_root(self, g):
        u, w = self.cyclic_reduction(g)
        word = w.word
        m = len(word)
        for p in range(1, m + 1):
            if m % p == 0 and word[:p] * (m // p) == word:
                return self.conjugate(u, self._make(word[:p])), m // p
        return g, 1

    def order(self, g):
        _, w = self.cyclic_reduction(g)
        if not w.word:
            return 1
        if len(w.word) == 1:
            f, k = w.word[0]
            n = self.orders[f]
            return n // gcd(n, k)
        return None

    def centralizer_model(self, g):
        if g.is_identity() or self._is_abelian():
            return self
        _, w = self.cyclic_reduction(g)
        if len(w.word) == 1:
            return FiniteCyclic(self.orders[w.word[0][0]])
        return FreeGroup(1)

    def _is_abelian(self):
        return sum(1 for n in self.orders if n > 1) <= 1

    def torsion_class_reps(self):
        reps = [self.identity]
        for f, n in enumerate(self.orders):
            for k in range(1, n):
                reps.append(self._make(((f, k),)))
        return reps


def FiniteCyclic(n: int, name: str = "t") -> FreeProduct:
    """Z/n with generator t (and T = t⁻¹ when n > 2)."""
    return FreeProduct((n,), (name,), label=f"FiniteCyclic({n})")


def InfiniteDihedral() -> FreeProduct:
    """⟨a, b | a², b²⟩, realized as Z/2 ∗ Z/2."""
    return FreeProduct((2, 2), ("a", "b"), label="InfiniteDihedral")


def model_from_spec(spec: dict) -> GroupModel:
    """Build a model from a config mapping such as {'kind': 'FreeGroup', 'rank': 2}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidInput("group declaration needs a 'kind'")
    kind = str(spec["kind"]).replace("_", "").lower()
    try:
        if kind == "freegroup":
            return FreeGroup(int(spec["rank"]), spec.get("names"))
        if kind == "finitecyclic":
            return FiniteCyclic(int(spec["order"]), spec.get("name", "t"))
        if kind == "infinitedihedral":
            return InfiniteDihedral()
        if kind == "freeproduct":
            return FreeProduct([int(n) for n in spec["factors"]], spec.get("names"))
    except KeyError as exc:
        raise InvalidInput(f"group declaration missing field {exc}") from None
    raise InvalidInput(f"unknown group kind {spec['kind']!r}")


class CayleyBall:
    """The closed ball {g : ℓ(g) ≤ radius}, ordered shortlex, with exact distances."""

    def __init__(self, model: GroupModel, radius: int, cap: int = DEFAULT_BALL_CAP):
        if radius < 0:
            raise InvalidInput("radius must be nonnegative")
        self.model = model
        self.radius = radius
        gens = model.generator_elements
        seen = {model.identity}
        frontier = [model.identity]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                for s in gens:
                    y = model.multiply(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
                        if len(seen) > cap:
                            raise ResourceLimit(
                                f"ball of radius {radius} in {model.name} exceeds {cap} elements")
            if not nxt:
                break
            frontier = nxt
        self.elements = sorted(seen, key=lambda g: g.key)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self._dist: dict = {}

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return g in self.index

    def __iter__(self):
        return iter(self.elements)

    def dist(self, x: GroupElement, y: GroupElement) -> int:
        key = (x, y)
        d = self._dist.get(key)
        if d is None:
            d = self.model.distance(x, y)
            self._dist[key] = d
        return d

    def on_boundary(self, g: GroupElement) -> bool:
        return g.length >= self.radius

    def distance_matrix(self) -> list[list[int]]:
        n = len(self.elements)
        out = [[0] * n for _ in range(n)]
        for i, x in enumerate(self.elements):
            xi = x.inverse()
            for j in range(i + 1, n):
                out[i][j] = out[j][i] = self.model.multiply(xi, self.elements[j]).length
        return out

    def sphere(self, r: int) -> list[GroupElement]:
        return [g for g in self.elements if g.length == r]


def ball(model: GroupModel, radius: int, cap: int = DEFAULT_BALL_CAP) -> CayleyBall:
    return CayleyBall(model, radius, cap)


def bfs_distances(ball: CayleyBall, source: GroupElement) -> dict:
    """Graph distance inside the ball's induced Cayley subgraph (test oracle)."""
    gens = ball.model.generator_elements
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = x * s
            if y in ball.index and y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist
