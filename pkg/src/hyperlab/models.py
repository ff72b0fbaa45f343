"""Concrete group actions on hyperbolic spaces.

Three models are available:

* :class:`FreeTree` -- the free group ``F_r`` acting on its Cayley tree.
* :class:`SplitExtension` -- ``F_r`` extended by ``Z/q`` through a twist
  ``phi`` assigning a unit multiplier to each generator.  The torsion factor
  acts trivially on the tree; it is the maximal finite normal subgroup.
* :class:`HalfPlane` -- ``SL(2, Z)`` acting on the upper half plane by
  Mobius transformations.

Tree vertices are :class:`~hyperlab.words.Word` objects; plane points are
:class:`PlanePoint`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import reduce as _fold
from math import gcd
from typing import Iterable, Union

from .exceptions import ModelMismatchError, NotHyperbolicError, UnsupportedModelError
from .words import IDENTITY, Word, concat, cyclic_reduce, invert, parse_word, primitive_root


@dataclass(frozen=True)
class PlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"plane points need y > 0, got {self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


TreeVertex = Word
Point = Union[Word, PlanePoint]


# ---------------------------------------------------------------- elements


@dataclass(frozen=True)
class FreeWord:
    word: Word

    def __mul__(self, other):
        if not isinstance(other, FreeWord):
            raise ModelMismatchError(f"cannot multiply FreeWord by {type(other).__name__}")
        return FreeWord(concat(self.word, other.word))

    def inverse(self) -> "FreeWord":
        return FreeWord(invert(self.word))

    def __str__(self):
        return str(self.word)


@dataclass(frozen=True)
class ExtElement:
    """Pair ``(w, t)`` multiplied by ``(u,s)(v,t) = (uv, phi(v)*s + t)``."""

    word: Word
    t: int
    model: "SplitExtension" = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "t", self.t % self.model.q)

    def __mul__(self, other):
        if not isinstance(other, ExtElement) or other.model != self.model:
            raise ModelMismatchError("ExtElement factors must share a SplitExtension model")
        m = self.model
        t = (m.twist(other.word) * self.t + other.t) % m.q
        return ExtElement(concat(self.word, other.word), t, m)

    def inverse(self) -> "ExtElement":
        m = self.model
        # (u,s)(u^-1, x) = (e, phi(u)^-1 s + x) = identity
        return ExtElement(invert(self.word), -m.twist(invert(self.word)) * self.t, m)

    def __str__(self):
        return f"({self.word},{self.t})"


@dataclass(frozen=True)
class Mat:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"matrix {self.entries} does not have determinant 1")

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __mul__(self, o):
        if not isinstance(o, Mat):
            raise ModelMismatchError(f"cannot multiply Mat by {type(o).__name__}")
        return Mat(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def inverse(self) -> "Mat":
        return Mat(self.d, -self.b, -self.c, self.a)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


GroupElement = Union[FreeWord, ExtElement, Mat]


def mul(g: GroupElement, h: GroupElement) -> GroupElement:
    if type(g) is not type(h):
        raise ModelMismatchError(f"kind mismatch: {type(g).__name__} * {type(h).__name__}")
    return g * h


def inverse(g: GroupElement) -> GroupElement:
    return g.inverse()


def word_part(g: GroupElement) -> Word:
    if isinstance(g, (FreeWord, ExtElement)):
        return g.word
    raise UnsupportedModelError("matrix elements have no word part")


def act(g: GroupElement, p: Point) -> Point:
    if isinstance(g, (FreeWord, ExtElement)):
        if not isinstance(p, Word):
            raise ModelMismatchError("word elements act on tree vertices")
        return concat(g.word, p)
    if isinstance(g, Mat):
        if not isinstance(p, PlanePoint):
            raise ModelMismatchError("matrices act on plane points")
        return _mobius(g, p)
    raise ModelMismatchError(f"unknown element {g!r}")


def _mobius(g: Mat, p: PlanePoint) -> PlanePoint:
    # Im((az+b)/(cz+d)) = y / |cz+d|^2, since det = 1
    cx = g.c * p.x + g.d
    cy = g.c * p.y
    den = cx * cx + cy * cy
    nx = g.a * p.x + g.b
    ny = g.a * p.y
    return PlanePoint((nx * cx + ny * cy) / den, p.y / den)


# ------------------------------------------------------------------ models


class _WordModel:
    rank: int
    delta = 0.0
    K0 = 1.0

    @property
    def basepoint(self) -> Word:
        return IDENTITY

    def orbit_point(self, g) -> Word:
        return g.word

    def word_generators(self) -> list[Word]:
        return [Word._trusted((2 * i,)) for i in range(self.rank)]


@dataclass(frozen=True)
class FreeTree(_WordModel):
    rank: int = 2

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise ValueError("rank must be in 1..26")

    kind = "free"

    def element(self, w: Union[Word, str]) -> FreeWord:
        if isinstance(w, str):
            w = parse_word(w, self.rank)
        return FreeWord(w)

    def identity(self) -> FreeWord:
        return FreeWord(IDENTITY)

    def generators(self) -> list[FreeWord]:
        return [FreeWord(w) for w in self.word_generators()]

    def torsion(self) -> list[FreeWord]:
        """The finite normal subgroup E(G), trivial here."""
        return [self.identity()]

    def owns(self, g) -> bool:
        return isinstance(g, FreeWord) and all(c < 2 * self.rank for c in g.word.letters)

    def spec(self) -> str:
        return f"free:r={self.rank}"


@dataclass(frozen=True)
class SplitExtension(_WordModel):
    rank: int = 2
    q: int = 3
    phi: tuple = (1, 1)

    kind = "ext"

    def __post_init__(self):
        if not 1 <= self.rank <= 26:
            raise ValueError("rank must be in 1..26")
        if self.q < 1:
            raise ValueError("torsion order must be positive")
        phi = tuple(int(x) % self.q for x in self.phi)
        if len(phi) != self.rank:
            raise ValueError(f"phi needs {self.rank} multipliers, got {len(phi)}")
        for x in phi:
            if gcd(x, self.q) != 1:
                raise ValueError(f"multiplier {x} is not a unit mod {self.q}")
        object.__setattr__(self, "phi", phi)
        inv = tuple(pow(x, -1, self.q) for x in phi)
        # multiplier per letter code
        object.__setattr__(self, "_mult", tuple(m for pair in zip(phi, inv) for m in pair))

    def twist(self, w: Word) -> int:
        """Multiplier of the automorphism ``phi(w)`` of ``Z/q``."""
        m = self._mult
        out = 1
        for c in w.letters:
            out = out * m[c] % self.q
        return out % self.q

    def element(self, w: Union[Word, str], t: int = 0) -> ExtElement:
        if isinstance(w, str):
            w = parse_word(w, self.rank)
        return ExtElement(w, t, self)

    def identity(self) -> ExtElement:
        return ExtElement(IDENTITY, 0, self)

    def generators(self) -> list[ExtElement]:
        return [ExtElement(w, 0, self) for w in self.word_generators()]

    def torsion(self) -> list[ExtElement]:
        return [ExtElement(IDENTITY, t, self) for t in range(self.q)]

    def owns(self, g) -> bool:
        return isinstance(g, ExtElement) and g.model == self

    def spec(self) -> str:
        phi = ",".join(f"{chr(ord('a') + i)}:{_signed(x, self.q)}" for i, x in enumerate(self.phi))
        return f"ext:r={self.rank},q={self.q},phi={phi}"


def _signed(x: int, q: int) -> int:
    return x - q if x > q // 2 else x


@dataclass(frozen=True)
class HalfPlane:
    """SL(2, Z) acting on the upper half plane.

    ``delta`` is a slimness constant used only to size tolerances; ``K0`` is
    the certification threshold, exposed as configuration.
    """

    delta: float = 1.2
    K0: float | None = None

    kind = "sl2z"
    rank = 2

    @property
    def basepoint(self) -> PlanePoint:
        return PlanePoint(0.0, 1.0)

    @property
    def certification_threshold(self) -> float:
        return 10 * self.delta if self.K0 is None else self.K0

    def orbit_point(self, g: Mat) -> PlanePoint:
        return _mobius(g, self.basepoint)

    def identity(self) -> Mat:
        return Mat(1, 0, 0, 1)

    def generators(self) -> list[Mat]:
        return [Mat(1, 1, 0, 1), Mat(1, 0, 1, 1)]

    def torsion(self) -> list[Mat]:
        return [Mat(1, 0, 0, 1), Mat(-1, 0, 0, -1)]

    def element(self, a, b=None, c=None, d=None) -> Mat:
        if b is None:
            a, b, c, d = a
        return Mat(a, b, c, d)

    def owns(self, g) -> bool:
        return isinstance(g, Mat)

    def spec(self) -> str:
        return "sl2z"


ActionModel = Union[FreeTree, SplitExtension, HalfPlane]


def product(model: ActionModel, elements: Iterable[GroupElement]) -> GroupElement:
    return _fold(mul, elements, model.identity())


# ---------------------------------------------------------- E(g) and asymmetry


class Asymmetry(str, enum.Enum):
    NOT_WEAK = "not_weak"
    WEAK_ONLY = "weak_only"
    STRONG = "strong"


@dataclass(frozen=True)
class EgDescription:
    """``E(g) = <root> (x| torsion)`` for a hyperbolic word-model element."""

    root: GroupElement
    exponent: int
    torsion_order: int
    root_twist: int
    is_product: bool

    def describe(self) -> str:
        base = f"<{self.root}>"
        if self.torsion_order == 1:
            return base
        op = "x" if self.is_product else "|x"
        return f"{base} {op} Z/{self.torsion_order}"


def is_hyperbolic(g: GroupElement) -> bool:
    if isinstance(g, Mat):
        return abs(g.trace) > 2
    return len(cyclic_reduce(word_part(g))[1]) > 0


def _require_word_hyperbolic(g):
    if isinstance(g, Mat):
        raise UnsupportedModelError("E(g) is not computed in the matrix model")
    if not is_hyperbolic(g):
        raise NotHyperbolicError(f"{g} is not hyperbolic")


def eg_subgroup(g: GroupElement) -> EgDescription:
    _require_word_hyperbolic(g)
    root_word, k = primitive_root(g.word)
    if isinstance(g, ExtElement):
        m = g.model
        tw = m.twist(root_word)
        return EgDescription(ExtElement(root_word, 0, m), k, m.q, tw, tw == 1)
    return EgDescription(FreeWord(root_word), k, 1, 1, True)


def classify_asymmetry(g: GroupElement) -> Asymmetry:
    eg = eg_subgroup(g)
    if eg.exponent > 1:
        return Asymmetry.NOT_WEAK
    return Asymmetry.STRONG if eg.is_product else Asymmetry.WEAK_ONLY


# ------------------------------------------------------------ spec parsing


def parse_model(text: str) -> ActionModel:
    """Parse ``free:r=2``, ``ext:r=2,q=3,phi=a:-1,b:1`` or ``sl2z``."""
    text = text.strip()
    if text.startswith("model="):
        text = text[len("model="):]
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    opts: dict[str, str] = {}
    last = None
    for tok in filter(None, (t.strip() for t in rest.split(","))):
        if "=" in tok:
            key, _, val = tok.partition("=")
            opts[key.strip()] = val.strip()
            last = key.strip()
        elif last == "phi":
            opts["phi"] += "," + tok
        else:
            raise ValueError(f"cannot parse model option {tok!r}")
    if kind == "free":
        return FreeTree(int(opts.get("r", 2)))
    if kind == "ext":
        r = int(opts.get("r", 2))
        q = int(opts.get("q", 3))
        phi = [1] * r
        for item in filter(None, opts.get("phi", "").split(",")):
            letter, _, val = item.partition(":")
            i = ord(letter.strip()) - ord("a")
            if not 0 <= i < r:
                raise ValueError(f"phi refers to unknown generator {letter!r}")
            phi[i] = int(val)
        return SplitExtension(r, q, tuple(phi))
    if kind == "sl2z":
        kw = {}
        if "delta" in opts:
            kw["delta"] = float(opts["delta"])
        if "K0" in opts:
            kw["K0"] = float(opts["K0"])
        return HalfPlane(**kw)
    raise ValueError(f"unknown model kind {kind!r}")


def parse_element(model: ActionModel, text: str) -> GroupElement:
    """Parse a word (``abA``), an extension pair (``abA@2``) or four integers."""
    text = text.strip()
    if isinstance(model, HalfPlane):
        nums = [int(x) for x in text.replace(",", " ").replace("[", " ").replace("]", " ").split()]
        if len(nums) != 4:
            raise ValueError("matrices are entered as four integers")
        return Mat(*nums)
    if isinstance(model, SplitExtension):
        w, _, t = text.partition("@")
        return model.element(w, int(t) if t else 0)
    return model.element(text)
