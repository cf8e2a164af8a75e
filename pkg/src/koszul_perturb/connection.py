"""Recursive construction of the ℤ-connection on the truncated Koszul module.

The single input is a constant-coefficient curvature tensor R ∈ W ⊗ S²V∨ ⊗ V.
Component zero is d_K; component one is the sum of the symmetric-slot
derivation R̃ (v_k ↦ R(v_k)) and the wedge-slot derivation R̄ = ½·(polarized
R); components two and up come out of the homotopy recursion

    𝕂^{n+1} = P_T( −Σ_{i=1}^{n} 𝕂^i 𝕂^{n+1−i} )

applied to the wedge-generator values of the bracket.  The square-zero
defect of each bracket is recorded on the result instead of raised: with
constant coefficients R̃² need not vanish, and the coefficient claims about
the components hold regardless — keeping the defect as data lets callers
inspect exactly which degrees fail while everything downstream still runs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .algebra import GradedElement, ModelConfig
from .homcomplex import extend_derivation, p_t
from .koszul import d_k
from .rational import format_rational, parse_rational
from .rng import SplitRng

Operator = Callable[[GradedElement], GradedElement]


# -- curvature input ----------------------------------------------------------

@dataclass(frozen=True, eq=True)
class CurvatureInput:
    """Sparse R ∈ W ⊗ S²V∨ ⊗ V: (w, i, j, k) ↦ coefficient, i ≤ j."""

    d: int
    e: int
    entries: tuple  # sorted ((w, i, j, k), Fraction) pairs

    def __post_init__(self):
        if self.d < 1 or self.e < 1:
            raise ValueError("d and e must be positive")
        seen = set()
        for key, c in self.entries:
            w, i, j, k = key
            if not (1 <= w <= self.e and 1 <= i <= j <= self.d and 1 <= k <= self.d):
                raise ValueError(f"entry {key} out of range (need i ≤ j)")
            if key in seen:
                raise ValueError(f"duplicate entry {key}")
            if not isinstance(c, Fraction) or c == 0:
                raise ValueError(f"entry {key} must carry a nonzero Fraction")
            seen.add(key)

    @staticmethod
    def make(d: int, e: int, coeffs: Mapping[tuple, Fraction]) -> "CurvatureInput":
        entries = tuple(sorted((k, Fraction(v)) for k, v in coeffs.items() if v))
        return CurvatureInput(d, e, entries)

    @staticmethod
    def zero(d: int, e: int) -> "CurvatureInput":
        return CurvatureInput(d, e, ())

    def is_zero(self) -> bool:
        return not self.entries

    def to_json(self) -> str:
        items = [
            {"w": k[0], "i": k[1], "j": k[2], "k": k[3], "c": format_rational(c)}
            for k, c in self.entries
        ]
        return json.dumps({"d": self.d, "e": self.e, "entries": items}, indent=2)

    @staticmethod
    def from_json(text: str) -> "CurvatureInput":
        data = json.loads(text)
        coeffs = {}
        for item in data["entries"]:
            key = (item["w"], item["i"], item["j"], item["k"])
            if key in coeffs:
                raise ValueError(f"duplicate entry {key}")
            coeffs[key] = parse_rational(item["c"])
        return CurvatureInput.make(data["d"], data["e"], coeffs)


def random_curvature(rng: SplitRng, d: int, e: int) -> CurvatureInput:
    coeffs = {}
    for w in range(1, e + 1):
        for i in range(1, d + 1):
            for j in range(i, d + 1):
                for k in range(1, d + 1):
                    c = rng.maybe_zero_fraction()
                    if c:
                        coeffs[(w, i, j, k)] = c
    return CurvatureInput.make(d, e, coeffs)


# -- the two faces of R -------------------------------------------------------

def sym_generator_values(r: CurvatureInput, cfg: ModelConfig) -> dict[int, GradedElement]:
    """R̃'s values on the symmetric generators: v_k ↦ Σ c·w ⊗ v_i v_j."""
    vals = {k: GradedElement.zero(cfg) for k in range(1, cfg.d + 1)}
    for (w, i, j, k), c in r.entries:
        vals[k] = vals[k].add(
            GradedElement.monomial(cfg, 1 << (w - 1), (i, j), 0, 0).scale(c)
        )
    return vals


def wedge_generator_value(r: CurvatureInput, cfg: ModelConfig) -> GradedElement:
    """R̄ = ½·(polarized R) on the wedge generators, as a ⊗V-marked tensor.

    v̄_k ↦ ½ Σ c·w ⊗ (v_i v̄_j + v_j v̄_i); the diagonal i = j polarizes to a
    single term with full weight.
    """
    acc = GradedElement.zero(cfg)
    for (w, i, j, k), c in r.entries:
        wm, b = 1 << (w - 1), 1 << (k - 1)
        if i == j:
            acc = acc.add(GradedElement.monomial(cfg, wm, (i,), 1 << (j - 1), b).scale(c))
        else:
            half = c / 2
            acc = acc.add(GradedElement.monomial(cfg, wm, (i,), 1 << (j - 1), b).scale(half))
            acc = acc.add(GradedElement.monomial(cfg, wm, (j,), 1 << (i - 1), b).scale(half))
    return acc


def r_tilde_tensor(r: CurvatureInput, cfg: ModelConfig) -> GradedElement:
    """R̃ as a ⊗V-marked tensor in W ⊗ S²V∨ ⊗ V (no wedge slot)."""
    acc = GradedElement.zero(cfg)
    for (w, i, j, k), c in r.entries:
        acc = acc.add(
            GradedElement.monomial(cfg, 1 << (w - 1), (i, j), 0, 1 << (k - 1)).scale(c)
        )
    return acc


def extend_sym_derivation(values: dict[int, GradedElement], cfg: ModelConfig) -> Operator:
    """Odd derivation with the given values on symmetric generators, zero on
    wedge generators and on ΛW."""

    def op(x: GradedElement) -> GradedElement:
        if any(k[3] for k in x.terms):
            raise ValueError("operand must lie in K_Tot (empty ∧V slot)")
        out = GradedElement.zero(x.config)
        for key, c in x.terms.items():
            w, s, a, b = key
            qx = w.bit_count() & 1
            for t, letter in enumerate(s):
                g = values.get(letter)
                if g is None or g.is_zero():
                    continue
                pre = GradedElement.monomial(x.config, w, s[:t] + s[t + 1:], 0, 0)
                post = GradedElement.monomial(x.config, 0, (), a, b)
                piece = pre.mul(g).mul(post).scale(c if not qx else -c)
                out = out.add(piece)
        return out

    return op


def r_tilde_op(r: CurvatureInput, cfg: ModelConfig) -> Operator:
    return extend_sym_derivation(sym_generator_values(r, cfg), cfg)


def r_bar_op(r: CurvatureInput, cfg: ModelConfig) -> Operator:
    return extend_derivation(wedge_generator_value(r, cfg))


def k1(r: CurvatureInput, cfg: ModelConfig) -> Operator:
    """𝕂¹ = R̃ + R̄ (the model has no ∂̄ term)."""
    rt, rb = r_tilde_op(r, cfg), r_bar_op(r, cfg)
    return lambda x: rt(x).add(rb(x))


# -- the recursion ------------------------------------------------------------

@dataclass
class ConnectionComponents:
    config: ModelConfig
    curvature: CurvatureInput
    components: list  # Operator per order, index 0 = d_K
    generator_values: list  # GradedElement | None per order (None where not Ŝ-linear)
    closure_defects: list  # GradedElement per recursion step (order ≥ 2)

    @property
    def max_order(self) -> int:
        return len(self.components) - 1

    def total(self, x: GradedElement) -> GradedElement:
        out = GradedElement.zero(self.config)
        for op in self.components:
            out = out.add(op(x))
        return out

    def tail(self, x: GradedElement) -> GradedElement:
        """Σ_{k≥1} 𝕂^k — the connection minus its weight-zero part."""
        out = GradedElement.zero(self.config)
        for op in self.components[1:]:
            out = out.add(op(x))
        return out


def _bracket_values(cc: ConnectionComponents, n: int) -> tuple[GradedElement, GradedElement]:
    """(τ_D, defect) for D = −Σ_{i=1}^{n} 𝕂^i 𝕂^{n+1−i}.

    τ_D collects the wedge-generator values D(v̄_j) ⊗ ē_j; the defect collects
    d_K(D(v̄_j)) − D(v_j) ⊗ ē_j, the generator values of [d_K, D] (D is even).
    """
    cfg = cc.config
    tau = GradedElement.zero(cfg)
    defect = GradedElement.zero(cfg)
    for j in range(1, cfg.d + 1):
        vbar = GradedElement.a_gen(cfg, j)
        v = GradedElement.s_gen(cfg, j)
        marker = GradedElement.b_gen(cfg, j)
        dv_bar = GradedElement.zero(cfg)
        dv = GradedElement.zero(cfg)
        for i in range(1, n + 1):
            dv_bar = dv_bar.sub(cc.components[i](cc.components[n + 1 - i](vbar)))
            dv = dv.sub(cc.components[i](cc.components[n + 1 - i](v)))
        tau = tau.add(dv_bar.mul(marker))
        defect = defect.add(d_k(dv_bar).sub(dv).mul(marker))
    return tau, defect


def next_component(cc: ConnectionComponents) -> tuple[Operator, GradedElement, GradedElement]:
    """(𝕂^{n+1} operator, its generator value P_T(τ_D), the closure defect)."""
    n = cc.max_order
    tau, defect = _bracket_values(cc, n)
    g = p_t(tau)
    return extend_derivation(g), g, defect


def build_connection(
    r: CurvatureInput, cfg: ModelConfig, max_order: int | None = None
) -> ConnectionComponents:
    if cfg.d != r.d or cfg.e != r.e:
        raise ValueError("config and curvature dimensions disagree")
    if max_order is None:
        max_order = min(r.e, r.d, 6)
    if max_order < 0 or max_order > r.e:
        raise ValueError("max_order must lie in 0..e (higher orders vanish)")
    dk_value = GradedElement.zero(cfg)
    for j in range(1, cfg.d + 1):
        dk_value = dk_value.add(GradedElement.s_gen(cfg, j).mul(GradedElement.b_gen(cfg, j)))
    cc = ConnectionComponents(
        config=cfg,
        curvature=r,
        components=[d_k],
        generator_values=[dk_value],
        closure_defects=[],
    )
    if max_order >= 1:
        cc.components.append(k1(r, cfg))
        cc.generator_values.append(None)  # R̃ part acts on Ŝ, not wedge-generated
    while cc.max_order < max_order:
        op, g, defect = next_component(cc)
        cc.components.append(op)
        cc.generator_values.append(g)
        cc.closure_defects.append(defect)
    return cc


def first_order_part(g: GradedElement, k: int) -> GradedElement:
    """Component of a generator value in Λ^kW ⊗ S^{≤1}V∨ ⊗ ∧^kV∨ ⊗ V."""
    return g.restrict(
        lambda key: key[0].bit_count() == k and len(key[1]) <= 1 and key[2].bit_count() == k
    )


# -- antisymmetrized curvature powers ----------------------------------------

def _polarized_matrix(r: CurvatureInput, cfg: ModelConfig) -> list[list[GradedElement]]:
    """R as a d×d matrix over the even subalgebra ΛW ⊗ ∧V∨.

    Entry (out j, in k) = Σ c̃ · w∧ā_i where R(v_k) polarizes to Σ c̃ v_i ⊗ v_j
    with multiplicity (v_iv_j ↦ v_i⊗v_j + v_j⊗v_i, so the diagonal doubles);
    the N∨ slot i becomes a wedge factor, the End slot j indexes the matrix.
    """
    mat = [[GradedElement.zero(cfg) for _ in range(cfg.d)] for _ in range(cfg.d)]
    for (w, i, j, k), c in r.entries:
        wm = 1 << (w - 1)
        pairs = [(i, j, 2 * c)] if i == j else [(i, j, c), (j, i, c)]
        for slot, out, coeff in pairs:
            mono = GradedElement.monomial(cfg, wm, (), 1 << (slot - 1), 0).scale(coeff)
            mat[out - 1][k - 1] = mat[out - 1][k - 1].add(mono)
    return mat


def alt_power(r: CurvatureInput, cfg: ModelConfig, k: int) -> GradedElement:
    """Alt[R^{⊗k}] in Λ^kW ⊗ ∧^kV∨ ⊗ End(V∨), encoded as Σ entry·v_j ⊗ ē_i.

    Composition of End slots with wedging of W and N∨ slots is exactly the
    k-th power of the polarized matrix over the commutative even subalgebra.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    cfg_mat = _polarized_matrix(r, cfg)
    d = cfg.d
    power = [
        [GradedElement.unit(cfg) if i == j else GradedElement.zero(cfg) for j in range(d)]
        for i in range(d)
    ]
    for _ in range(k):
        nxt = [[GradedElement.zero(cfg) for _ in range(d)] for _ in range(d)]
        for i in range(d):
            for j in range(d):
                acc = GradedElement.zero(cfg)
                for t in range(d):
                    acc = acc.add(cfg_mat[i][t].mul(power[t][j]))
                nxt[i][j] = acc
        power = nxt
    out = GradedElement.zero(cfg)
    for i in range(d):
        for j in range(d):
            entry = power[i][j]
            if entry.is_zero():
                continue
            out = out.add(
                entry.mul(GradedElement.s_gen(cfg, i + 1)).mul(GradedElement.b_gen(cfg, j + 1))
            )
    return out


# -- the obstruction composite -------------------------------------------------

def gamma_compose(
    a: Mapping[tuple, Fraction], b: Mapping[tuple, Fraction], u_dim: int
) -> dict[tuple, Fraction]:
    """Contraction of A ∈ W⊗U∨⊗S²V∨ against B ∈ W⊗U⊗End(V∨) over the U slots.

    A keys: (w, u, i, j) with i ≤ j; B keys: (w, u, k, l) meaning v_k ↦ v_l.
    Output keys: (w₁, w₂, i, j, k, l) with w₁ < w₂ (wedged W slots; the
    antisymmetric coefficient carries the sign).
    """
    out: dict[tuple, Fraction] = {}
    for (w1, u1, i, j), ca in a.items():
        if not 1 <= u1 <= u_dim:
            raise ValueError("A has a U index out of range")
        for (w2, u2, k, l), cb in b.items():
            if not 1 <= u2 <= u_dim:
                raise ValueError("B has a U index out of range")
            if u1 != u2 or w1 == w2:
                continue
            sign = 1 if w1 < w2 else -1
            key = (min(w1, w2), max(w1, w2), i, j, k, l)
            out[key] = out.get(key, Fraction(0)) + sign * ca * cb
    return {k: v for k, v in out.items() if v}
