"""Basic perturbation lemma over finite-dimensional graded spaces.

Everything is an exact sparse matrix over ℚ.  A contraction is the five-tuple
(d_B, d_A, f, g, h) with f g = 1, 1 − g f = d_B h + h d_B and the side
conditions f h = 0, h h = 0, h g = 0; a perturbation is t with (d_B + t)²
= 0 and t h nilpotent.  The transferred data is computed from the finite
series X = t − t h t + t h t h t − ⋯ .
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .rng import SplitRng
from .sparse import LinearMap


@dataclass(frozen=True)
class Contraction:
    d_b: LinearMap
    d_a: LinearMap
    f: LinearMap
    g: LinearMap
    h: LinearMap

    def validate(self) -> None:
        db, da, f, g, h = self.d_b, self.d_a, self.f, self.g, self.h
        if f.dom != db.dom or f.cod != da.dom:
            raise ValueError("f must map B to A")
        if g.dom != da.dom or g.cod != db.dom:
            raise ValueError("g must map A to B")
        if h.dom != db.dom or h.cod != db.dom:
            raise ValueError("h must be an endomorphism of B")
        if not db.compose(db).is_zero():
            raise ValueError("d_B is not square-zero")
        if not da.compose(da).is_zero():
            raise ValueError("d_A is not square-zero")
        if f.compose(g) != LinearMap.identity(da.dom):
            raise ValueError("f g != 1")
        if not f.compose(db).sub(da.compose(f)).is_zero():
            raise ValueError("f is not a chain map")
        if not g.compose(da).sub(db.compose(g)).is_zero():
            raise ValueError("g is not a chain map")
        one_b = LinearMap.identity(db.dom)
        if one_b.sub(g.compose(f)) != db.compose(h).add(h.compose(db)):
            raise ValueError("h is not a contracting homotopy")
        if not f.compose(h).is_zero():
            raise ValueError("side condition f h = 0 fails")
        if not h.compose(h).is_zero():
            raise ValueError("side condition h h = 0 fails")
        if not h.compose(g).is_zero():
            raise ValueError("side condition h g = 0 fails")


@dataclass(frozen=True)
class Perturbation:
    t: LinearMap
    nilpotency: int  # least k with (t h)^k = 0


def make_perturbation(c: Contraction, t: LinearMap) -> Perturbation:
    if t.dom != c.d_b.dom or t.cod != c.d_b.dom:
        raise ValueError("t must be an endomorphism of B")
    d = c.d_b.add(t)
    if not d.compose(d).is_zero():
        raise ValueError("(d_B + t)² != 0")
    k = t.compose(c.h).nilpotency_index(t.dom + 1)
    if k is None:
        raise ValueError("t h is not nilpotent")
    return Perturbation(t, k)


def x_series(c: Contraction, t: LinearMap, bound: int) -> LinearMap:
    """X = Σ_k (−1)^k (t h)^k t, summed until a power vanishes."""
    acc = LinearMap.zero(t.dom, t.dom)
    term = t
    sign = 1
    for _ in range(bound + 1):
        if term.is_zero():
            return acc
        acc = acc.add(term.scale(sign))
        term = t.compose(c.h).compose(term)
        sign = -sign
    raise ValueError("x_series did not terminate within the nilpotency bound")


def transfer(c: Contraction, t: LinearMap, bound: int) -> Contraction:
    """The perturbed five-tuple, with no square-zero or output validation.

    The connection-perturbation route feeds in a t whose square-zero defect
    is itself under study, so the formula core must stay usable without the
    Perturbation invariants.
    """
    x = x_series(c, t, bound)
    if x != t.sub(t.compose(c.h).compose(x)):  # fixed point X = t − t h X
        raise ValueError("X series does not solve its fixed-point equation")
    one_b = LinearMap.identity(c.d_b.dom)
    return Contraction(
        d_b=c.d_b.add(t),
        d_a=c.d_a.add(c.f.compose(x).compose(c.g)),
        f=c.f.compose(one_b.sub(x.compose(c.h))),
        g=one_b.sub(c.h.compose(x)).compose(c.g),
        h=c.h.sub(c.h.compose(x).compose(c.h)),
    )


def perturb(c: Contraction, p: Perturbation) -> Contraction:
    c.validate()
    out = transfer(c, p.t, p.nilpotency)
    out.validate()
    return out


# -- random instances --------------------------------------------------------

def _exp_pair(nu: LinearMap, bound: int) -> tuple[LinearMap, LinearMap]:
    """(exp ν, exp −ν) for nilpotent ν."""
    u = LinearMap.identity(nu.dom)
    inv = LinearMap.identity(nu.dom)
    term = LinearMap.identity(nu.dom)
    fact = 1
    for k in range(1, bound + 1):
        term = nu.compose(term)
        if term.is_zero():
            return u, inv
        fact *= k
        u = u.add(term.scale(Fraction(1, fact)))
        inv = inv.add(term.scale(Fraction((-1) ** k, fact)))
    raise ValueError("nu is not nilpotent within the expected bound")


_LEVELS = 4  # filtration depth; exp(ν) then has ≤ _LEVELS + 1 terms


def _level(index: int, a_dim: int) -> int:
    return 0 if index < a_dim else 1 + ((index - a_dim) // 2) % _LEVELS


def _raising_map(rng: SplitRng, a_dim: int, cones: int) -> LinearMap:
    """Sparse map that strictly raises the cone-level filtration (A at level 0)."""
    b_dim = a_dim + 2 * cones
    cols = {}
    for j in range(b_dim):
        above = [i for i in range(b_dim) if _level(i, a_dim) > _level(j, a_dim)]
        col = {}
        for _ in range(min(2, len(above))):
            c = rng.maybe_zero_fraction()
            if c:
                col[rng.choice(above)] = c
        if col:
            cols[j] = col
    return LinearMap(b_dim, b_dim, cols)


def random_contraction(rng: SplitRng, a_dim: int, cones: int) -> Contraction:
    """B = A ⊕ (acyclic two-dim cones), conjugated by exp(ν).

    ν strictly raises a filtration that d_B and h preserve, so the conjugate
    is again a contraction and keeps all three side conditions.
    """
    b_dim = a_dim + 2 * cones
    db_cols = {}
    h_cols = {}
    for i in range(cones):
        x, y = a_dim + 2 * i, a_dim + 2 * i + 1
        c = rng.fraction()
        db_cols[x] = {y: c}
        h_cols[y] = {x: 1 / c}
    db = LinearMap(b_dim, b_dim, db_cols)
    h = LinearMap(b_dim, b_dim, h_cols)
    f = LinearMap(b_dim, a_dim, {j: {j: Fraction(1)} for j in range(a_dim)})
    g = LinearMap(a_dim, b_dim, {j: {j: Fraction(1)} for j in range(a_dim)})
    u, inv = _exp_pair(_raising_map(rng, a_dim, cones), _LEVELS + 1)
    return Contraction(
        d_b=u.compose(db).compose(inv),
        d_a=LinearMap.zero(a_dim, a_dim),
        f=f.compose(inv),
        g=u.compose(g),
        h=u.compose(h).compose(inv),
    )


def random_perturbation(rng: SplitRng, c: Contraction, a_dim: int, cones: int) -> Perturbation:
    """t = exp(μ) d_B exp(−μ) − d_B for a fresh strictly-raising μ.

    Square-zero of d_B + t is automatic (it is a conjugate of d_B), and t h
    raises the filtration, hence is nilpotent.
    """
    u, inv = _exp_pair(_raising_map(rng, a_dim, cones), _LEVELS + 1)
    t = u.compose(c.d_b).compose(inv).sub(c.d_b)
    return make_perturbation(c, t)
