"""Four-factor graded algebra Λ(W) ⊗ S^{≤m}(V∨) ⊗ ∧(V∨) ⊗ ∧(V).

Finite constant-coefficient model of a global Koszul resolution: W holds
the e odd form directions (w_1..w_e), S^{≤m}(V∨) the symmetric algebra on
d even generators v_1..v_d truncated above total degree m, ∧(V∨) the
Koszul wedge slot (odd, written v̄_i / slot "a"), ∧(V) the dual wedge slot
used by the endomorphism tensor calculus (odd, written ē_i / slot "b").

A monomial key is (wmask, sym, amask, bmask): bitmasks over the odd slots
(bit i-1 <-> generator i) plus a sorted index tuple for the symmetric
word. Canonical word order is [w][s][a][b], ascending inside each slot;
every sign in the package is a transposition count against that order.
Parity of a key is (q + a + b) mod 2 — symmetric letters are even.

Products that would push the symmetric degree past m drop the term and
set a sticky `truncated` flag instead of raising; identity checks
downstream are only claimed where the flag stays clear.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

from .rational import format_rational, parse_rational


def bits(mask: int):
    """1-based generator indices of a bitmask, ascending."""
    i = 1
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(indices) -> int:
    m = 0
    for i in indices:
        b = 1 << (i - 1)
        if m & b:
            raise ValueError(f"repeated odd generator {i}")
        m |= b
    return m


def shuffle_sign(x: int, y: int) -> int:
    """Sign of merging two disjoint ascending odd words x, y into one."""
    if x & y:
        raise ValueError("words overlap")
    inv = 0
    for j in bits(y):
        inv += (x >> j).bit_count()  # x-letters strictly above j must hop over it
    return -1 if inv & 1 else 1


@dataclass(frozen=True)
class ModelConfig:
    d: int  # dim V
    e: int  # dim W
    m: int  # symmetric truncation degree

    def __post_init__(self):
        if not (1 <= self.d):
            raise ValueError("d must be >= 1")
        if not (0 <= self.e):
            raise ValueError("e must be >= 0")
        if not (0 <= self.m):
            raise ValueError("m must be >= 0")

    @property
    def full_b(self) -> int:
        return (1 << self.d) - 1


def key_parity(key) -> int:
    w, s, a, b = key
    return (w.bit_count() + a.bit_count() + b.bit_count()) & 1


def k_degree(key) -> int:
    """Total degree on K_Tot (b-slot empty): form degree minus wedge degree."""
    w, s, a, b = key
    return w.bit_count() - a.bit_count()


def end_degree(key) -> int:
    """Degree of an endomorphism-tensor monomial: q - a + b (Eq.-forced)."""
    w, s, a, b = key
    return w.bit_count() - a.bit_count() + b.bit_count()


class GradedElement:
    __slots__ = ("config", "terms", "truncated")

    def __init__(self, config: ModelConfig, terms=None, truncated: bool = False):
        self.config = config
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = Fraction(c)
        self.truncated = truncated

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(config: ModelConfig) -> "GradedElement":
        return GradedElement(config)

    @staticmethod
    def unit(config: ModelConfig) -> "GradedElement":
        return GradedElement(config, {(0, (), 0, 0): Fraction(1)})

    @staticmethod
    def monomial(config, wmask=0, sym=(), amask=0, bmask=0, coeff=1) -> "GradedElement":
        sym = tuple(sorted(sym))
        if wmask >> config.e or amask >> config.d or bmask >> config.d:
            raise ValueError("generator index out of range")
        if any(not 1 <= i <= config.d for i in sym):
            raise ValueError("symmetric index out of range")
        if len(sym) > config.m:
            raise ValueError("symmetric degree exceeds truncation")
        return GradedElement(config, {(wmask, sym, amask, bmask): Fraction(coeff)})

    @staticmethod
    def w_gen(config, i):
        return GradedElement.monomial(config, wmask=mask_of([i]))

    @staticmethod
    def s_gen(config, i):
        return GradedElement.monomial(config, sym=(i,))

    @staticmethod
    def a_gen(config, i):
        return GradedElement.monomial(config, amask=mask_of([i]))

    @staticmethod
    def b_gen(config, i):
        return GradedElement.monomial(config, bmask=mask_of([i]))

    # -- linear structure ---------------------------------------------
    def _check(self, other):
        if self.config != other.config:
            raise ValueError("config mismatch")

    def add(self, other) -> "GradedElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            nc = out.get(k, 0) + c
            if nc:
                out[k] = nc
            else:
                out.pop(k, None)
        return GradedElement(self.config, out, self.truncated or other.truncated)

    def sub(self, other) -> "GradedElement":
        return self.add(other.scale(-1))

    def scale(self, c) -> "GradedElement":
        c = Fraction(c)
        if not c:
            return GradedElement(self.config, {}, self.truncated)
        return GradedElement(self.config, {k: v * c for k, v in self.terms.items()}, self.truncated)

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.sub(other)

    def __neg__(self):
        return self.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, GradedElement)
            and self.config == other.config
            and self.terms == other.terms
        )

    def __hash__(self):
        raise TypeError("GradedElement is not hashable")

    # -- multiplication ------------------------------------------------
    def mul(self, other) -> "GradedElement":
        self._check(other)
        cfg = self.config
        out = {}
        truncated = self.truncated or other.truncated
        for (w1, s1, a1, b1), c1 in self.terms.items():
            for (w2, s2, a2, b2), c2 in other.terms.items():
                if w1 & w2 or a1 & a2 or b1 & b2:
                    continue
                if len(s1) + len(s2) > cfg.m:
                    truncated = True
                    continue
                sign = 1
                # y's w-letters hop over x's a- and b-letters
                if (w2.bit_count() & 1) and ((a1.bit_count() + b1.bit_count()) & 1):
                    sign = -sign
                # y's a-letters hop over x's b-letters
                if (a2.bit_count() & 1) and (b1.bit_count() & 1):
                    sign = -sign
                sign *= shuffle_sign(w1, w2) * shuffle_sign(a1, a2) * shuffle_sign(b1, b2)
                key = (w1 | w2, tuple(sorted(s1 + s2)), a1 | a2, b1 | b2)
                nc = out.get(key, 0) + sign * c1 * c2
                if nc:
                    out[key] = nc
                else:
                    out.pop(key, None)
        return GradedElement(cfg, out, truncated)

    def __mul__(self, other):
        if isinstance(other, GradedElement):
            return self.mul(other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    # -- inspection -----------------------------------------------------
    def max_sym_degree(self) -> int:
        return max((len(k[1]) for k in self.terms), default=0)

    def restrict(self, pred) -> "GradedElement":
        return GradedElement(
            self.config, {k: c for k, c in self.terms.items() if pred(k)}, self.truncated
        )

    def homogeneous_parity(self):
        ps = {key_parity(k) for k in self.terms}
        return ps.pop() if len(ps) == 1 else None

    def __repr__(self):
        if not self.terms:
            return "0"
        bits_str = lambda m: "".join(str(i) for i in bits(m))
        parts = []
        for (w, s, a, b), c in sorted(self.terms.items()):
            word = []
            if w:
                word.append("w" + bits_str(w))
            if s:
                word.append("v" + "".join(str(i) for i in s))
            if a:
                word.append("ā" + bits_str(a))
            if b:
                word.append("ē" + bits_str(b))
            parts.append(f"({c})·" + ("·".join(word) or "1"))
        tail = " [trunc]" if self.truncated else ""
        return " + ".join(parts) + tail


def truncation_safe(x: GradedElement) -> bool:
    """One more symmetric-degree raise cannot silently truncate."""
    return all(len(k[1]) < x.config.m for k in x.terms)


def interior_product(omega: GradedElement, eta: GradedElement) -> GradedElement:
    """ω ⌟ η: contract the ∧V∨ letters of ω into the ∧V letters of η.

    ě_A acts as the operator composite ι_{ě_{a_1}}∘…∘ι_{ě_{a_k}} (ascending
    index outermost — the same nesting that makes the wedge inclusion into
    the endomorphism algebra a homomorphism), each ι crossing the ΛW factor
    of η; so ⟨ě_A, e_A⟩ = (−1)^{|A|(|A|−1)/2}. Result lives in ΛW ⊗ ∧V.
    """
    if any(k[3] or k[1] for k in omega.terms):
        raise ValueError("left factor must have empty b- and s-slots")
    if any(k[2] or k[1] for k in eta.terms):
        raise ValueError("right factor must have empty a- and s-slots")
    cfg = omega.config
    out = {}
    for (wx, _sx, ax, _bx), cx in omega.terms.items():
        na = ax.bit_count()
        if (na * (na - 1) // 2) & 1:  # reversal: det-pairing loop below nests ascending-innermost
            cx = -cx
        for (wy, _sy, _ay, by), cy in eta.terms.items():
            if ax & ~by or wx & wy:
                continue
            sign = shuffle_sign(wx, wy)
            if (na & 1) and (wy.bit_count() & 1):
                sign = -sign
            rem = by
            for i in bits(ax):
                below = (rem & ((1 << (i - 1)) - 1)).bit_count()
                if below & 1:  # (-1)^{pos-1}, pos = below+1
                    sign = -sign
                rem &= ~(1 << (i - 1))
            key = (wx | wy, (), 0, rem)
            nc = out.get(key, 0) + sign * cx * cy
            if nc:
                out[key] = nc
            else:
                out.pop(key, None)
    return GradedElement(cfg, out, omega.truncated or eta.truncated)


# -- bases -------------------------------------------------------------

@lru_cache(maxsize=None)
def sym_words(d: int, m: int):
    """All symmetric words over v_1..v_d of degree 0..m, as sorted tuples."""
    words = []
    for deg in range(m + 1):
        words.extend(combinations_with_replacement(range(1, d + 1), deg))
    return tuple(words)


# -- serialization ------------------------------------------------------

def terms_to_json(x: GradedElement):
    """Canonical array-of-terms form; stable ordering for byte-stable output."""
    out = []
    for (w, s, a, b) in sorted(x.terms):
        out.append(
            {
                "w": list(bits(w)),
                "s": list(s),
                "a": list(bits(a)),
                "b": list(bits(b)),
                "c": format_rational(x.terms[(w, s, a, b)]),
            }
        )
    return out


def terms_from_json(config: ModelConfig, data) -> GradedElement:
    if isinstance(data, dict) and "terms" in data:
        data = data["terms"]
    if not isinstance(data, list):
        raise ValueError("element JSON must be a list of terms")
    acc = GradedElement.zero(config)
    for t in data:
        if not isinstance(t, dict):
            raise ValueError("term must be an object")
        coeff = parse_rational(t.get("c", "1"))
        mono = GradedElement.monomial(
            config,
            wmask=mask_of(t.get("w", [])),
            sym=tuple(t.get("s", [])),
            amask=mask_of(t.get("a", [])),
            bmask=mask_of(t.get("b", [])),
            coeff=coeff,
        )
        acc = acc.add(mono)
    return acc
