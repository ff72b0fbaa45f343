"""Free group words.

Letters are encoded as small integers: generator ``i`` is ``2*i`` and its
inverse is ``2*i + 1``, so inversion is ``code ^ 1`` and integer order is the
letter order ``a < A < b < B < ...``.  The textual format uses ``a``..``z``
for generators and upper case for inverses.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence, Union

__all__ = [
    "Letter",
    "Word",
    "CyclicWord",
    "parse_word",
    "reduce",
    "concat",
    "invert",
    "cyclic_reduce",
    "primitive_root",
    "are_conjugate",
    "conjugate_to_inverse",
    "least_rotation",
    "all_reduced_words",
]


class Letter(NamedTuple):
    generator_index: int
    sign: int

    @property
    def code(self) -> int:
        return 2 * self.generator_index + (0 if self.sign > 0 else 1)

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        return cls(code >> 1, -1 if code & 1 else 1)

    def inverse(self) -> "Letter":
        return Letter(self.generator_index, -self.sign)


LetterLike = Union[int, Letter]


def _code(x: LetterLike) -> int:
    if isinstance(x, Letter):
        if x.sign not in (1, -1) or x.generator_index < 0:
            raise ValueError(f"invalid letter {x!r}")
        return x.code
    if x < 0:
        raise ValueError(f"invalid letter code {x}")
    return int(x)


def _letter_char(code: int) -> str:
    c = chr(ord("a") + (code >> 1))
    return c.upper() if code & 1 else c


class Word:
    """An immutable freely reduced word.

    The constructor checks reducedness; use :func:`reduce` for raw input.
    """

    __slots__ = ("letters", "_hash")

    def __init__(self, letters: Iterable[LetterLike] = ()):
        codes = tuple(_code(x) for x in letters)
        for i in range(len(codes) - 1):
            if codes[i] ^ 1 == codes[i + 1]:
                raise ValueError(f"word is not freely reduced at position {i}")
        object.__setattr__(self, "letters", codes)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _trusted(cls, codes: tuple) -> "Word":
        w = object.__new__(cls)
        object.__setattr__(w, "letters", codes)
        object.__setattr__(w, "_hash", None)
        return w

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, item):
        if isinstance(item, slice):
            # subwords of reduced words are reduced
            return Word._trusted(self.letters[item])
        return self.letters[item]

    def __eq__(self, other) -> bool:
        if isinstance(other, Word):
            return self.letters == other.letters
        return NotImplemented

    def __lt__(self, other: "Word") -> bool:
        return (len(self), self.letters) < (len(other), other.letters)

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(("Word", self.letters))
            object.__setattr__(self, "_hash", h)
        return h

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else invert(self)
        out = Word._trusted(())
        for _ in range(abs(k)):
            out = concat(out, base)
        return out

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        return "".join(_letter_char(c) for c in self.letters) or "e"

    def __repr__(self) -> str:
        return f"Word('{self}')"

    def __reduce__(self):
        return (Word._trusted, (self.letters,))

    @property
    def rank_needed(self) -> int:
        return 1 + max(self.letters) // 2 if self.letters else 0

    def to_letters(self) -> list[Letter]:
        return [Letter.from_code(c) for c in self.letters]

    def as_string(self) -> str:
        """Compact one-char-per-letter encoding used for substring search."""
        return "".join(map(chr, self.letters))


IDENTITY = Word._trusted(())


def parse_word(text: str, rank: int | None = None) -> Word:
    """Parse ``'abAB'`` style text (``e``, ``1`` or empty for the identity).

    The result is reduced.  Letters beyond ``rank`` are rejected.
    """
    text = text.strip()
    if text in ("", "e", "1"):
        return IDENTITY
    codes = []
    for ch in text:
        if ch.isspace() or ch == "*":
            continue
        if not ("a" <= ch.lower() <= "z"):
            raise ValueError(f"invalid letter {ch!r}")
        i = ord(ch.lower()) - ord("a")
        if rank is not None and i >= rank:
            raise ValueError(f"letter {ch!r} exceeds rank {rank}")
        codes.append(2 * i + (1 if ch.isupper() else 0))
    return reduce(codes)


def reduce(raw: Iterable[LetterLike]) -> Word:
    stack: list[int] = []
    for x in raw:
        c = _code(x)
        if stack and stack[-1] == c ^ 1:
            stack.pop()
        else:
            stack.append(c)
    return Word._trusted(tuple(stack))


def _cancellation(u: Sequence[int], v: Sequence[int]) -> int:
    k = 0
    n = min(len(u), len(v))
    while k < n and u[-1 - k] == v[k] ^ 1:
        k += 1
    return k


def concat(u: Word, v: Word) -> Word:
    a, b = u.letters, v.letters
    k = _cancellation(a, b)
    return Word._trusted(a[: len(a) - k] + b[k:])


def invert(w: Word) -> Word:
    return Word._trusted(tuple(c ^ 1 for c in reversed(w.letters)))


def least_rotation(s: Sequence[int]) -> int:
    """Index of the lexicographically least rotation (Booth's algorithm)."""
    n = len(s)
    if n == 0:
        return 0
    ss = list(s) + list(s)
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = ss[j]
        i = f[j - k - 1]
        while i != -1 and sj != ss[k + i + 1]:
            if sj < ss[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != ss[k + i + 1]:
            if sj < ss[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


class CyclicWord:
    """A cyclically reduced word up to rotation.

    Two cyclic words compare equal iff their canonical (least) rotations
    agree, i.e. iff they represent the same conjugacy class.
    """

    __slots__ = ("core", "canonical_rotation_index", "_canon")

    def __init__(self, core: Word):
        c = core.letters
        if len(c) > 1 and c[0] ^ 1 == c[-1]:
            raise ValueError("core is not cyclically reduced")
        self.core = core
        self.canonical_rotation_index = least_rotation(c)
        k = self.canonical_rotation_index
        self._canon = c[k:] + c[:k]

    def canonical(self) -> Word:
        return Word._trusted(self._canon)

    def rotations(self) -> list[Word]:
        c = self.core.letters
        return [Word._trusted(c[i:] + c[:i]) for i in range(max(len(c), 1))]

    def __len__(self) -> int:
        return len(self.core)

    def __eq__(self, other) -> bool:
        if isinstance(other, CyclicWord):
            return self._canon == other._canon
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("CyclicWord", self._canon))

    def __repr__(self) -> str:
        return f"CyclicWord('{self.canonical()}')"


def cyclic_reduce(w: Word) -> tuple[Word, CyclicWord]:
    """Split ``w = conjugator * core * conjugator^-1`` with a cyclically reduced core."""
    c = w.letters
    i, j = 0, len(c) - 1
    while i < j and c[i] ^ 1 == c[j]:
        i += 1
        j -= 1
    return Word._trusted(c[:i]), CyclicWord(Word._trusted(c[i : j + 1]))


def _period(s: Sequence[int]) -> int:
    n = len(s)
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and s[i] != s[k]:
            k = fail[k - 1]
        if s[i] == s[k]:
            k += 1
        fail[i] = k
    return n - fail[-1]


def primitive_root(w: Word) -> tuple[Word, int]:
    """Return ``(root, k)`` with ``root**k == w`` and ``k`` maximal."""
    if not w:
        raise ValueError("identity has no root")
    conj, cyc = cyclic_reduce(w)
    core = cyc.core.letters
    p = _period(core)
    n = len(core)
    if n % p:
        p = n
    root = Word._trusted(conj.letters + core[:p] + invert(conj).letters)
    return root, n // p


def are_conjugate(u: Word, v: Word) -> bool:
    return cyclic_reduce(u)[1] == cyclic_reduce(v)[1]


def conjugate_to_inverse(w: Word) -> bool:
    return are_conjugate(w, invert(w))


def all_reduced_words(rank: int, max_len: int, min_len: int = 0):
    """Yield every reduced word of length in ``[min_len, max_len]``, shortest first."""
    letters = range(2 * rank)
    level = [()]
    for length in range(max_len + 1):
        if length >= min_len:
            for t in level:
                yield Word._trusted(t)
        if length == max_len:
            break
        level = [t + (x,) for t in level for x in letters if not t or t[-1] != x ^ 1]


def count_reduced_words(rank: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)
