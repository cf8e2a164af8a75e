"""Endomorphism complex of K_Tot in tensor form ΛW ⊗ Ŝ ⊗ ∧V∨ ⊗ ∧V.

A monomial (w, s, A, B) is the Ŝ⊗ΛW-linear operator sending x = v̄_B·(rest)
to ±(w·s·v̄_A)·(rest): the ∧V slot is a dual functional on the ∧V∨ slot of
the operand, paired strictly (block B against block B, ⟨ē_B, v̄_B⟩ =
(−1)^{β(β−1)/2} for ascending words — the sign that makes the diagonal sum
Σ_C ε_C v̄_C⊗ē_C the identity). `apply_end` realizes the action,
`tensorize` inverts it column-by-column over the 2^d wedge monomials.

The differential is d_Hom = d_K⊗1 + δ·(1⊗d_Ǩ) with δ = (−1)^{q+α} read off
each monomial; both halves reuse the koszul term kernels. Two homotopy
series P_T and P_GV contract End onto ΛW ⊗ ∧V through π_T (constant term
of the Hom(−, K⁰) column) and π_GV (constant term of the Hom(K^{−d}, −)
row, re-read through the socle pairing). Every series here terminates
because each double step moves the ∧V degree strictly monotonically; the
hard iteration bound (m+1)(d+1)(e+1) only trips on an implementation bug.
"""

from .algebra import GradedElement, ModelConfig, bits, key_parity, sym_words, shuffle_sign
from .koszul import (
    KoszulSpace,
    _below,
    _dk_check_terms,
    _dk_terms,
    _pk_check_terms,
    _socle_sign,
    d_k_tensor,
    p_k_tensor,
)
from .sparse import LinearMap


def _eps(mask: int) -> int:
    """⟨ē_C, v̄_C⟩ = (−1)^{|C|(|C|−1)/2} under ascending-innermost contraction."""
    n = mask.bit_count()
    return -1 if (n * (n - 1) // 2) & 1 else 1


def _delta(key) -> int:
    """Sign of the 1⊗d_Ǩ half of d_Hom on this monomial."""
    w, _s, a, _b = key
    return -1 if (w.bit_count() + a.bit_count()) & 1 else 1


def series_bound(cfg: ModelConfig) -> int:
    return (cfg.m + 1) * (cfg.d + 1) * (cfg.e + 1)


# -- tensor <-> operator dictionary ----------------------------------------

def apply_end(f: GradedElement, x: GradedElement) -> GradedElement:
    """Act by the tensor f on x ∈ K_Tot."""
    if f.config != x.config:
        raise ValueError("config mismatch")
    if any(k[3] for k in x.terms):
        raise ValueError("operand must lie in K_Tot (empty ∧V slot)")
    cfg = f.config
    out = {}
    truncated = f.truncated or x.truncated
    for (wf, sf, A, B), cf in f.terms.items():
        nb = B.bit_count()
        base = cf * _eps(B)
        na_odd = A.bit_count() & 1
        for (wx, sx, C, _b), cx in x.terms.items():
            if C != B or wf & wx:
                continue
            if len(sf) + len(sx) > cfg.m:
                truncated = True
                continue
            sign = 1
            if wx.bit_count() & 1 and (nb ^ na_odd) & 1:
                # ē_B and then the residual v̄_A both cross the operand's ΛW word
                sign = -sign
            sign *= shuffle_sign(wf, wx)
            key = (wf | wx, tuple(sorted(sf + sx)), A, 0)
            nc = out.get(key, 0) + sign * base * cx
            if nc:
                out[key] = nc
            else:
                out.pop(key, None)
    return GradedElement(cfg, out, truncated)


def tensorize(op, cfg: ModelConfig) -> GradedElement:
    """Tensor form of an Ŝ⊗ΛW-linear operator, probed on the v̄_C columns."""
    out = {}
    truncated = False
    for c_mask in range(1 << cfg.d):
        y = op(GradedElement(cfg, {(0, (), c_mask, 0): 1}))
        truncated = truncated or y.truncated
        eps = _eps(c_mask)
        for (w, s, a, b), c in y.terms.items():
            if b:
                raise ValueError("operator image must lie in K_Tot")
            key = (w, s, a, c_mask)
            nc = out.get(key, 0) + eps * c
            if nc:
                out[key] = nc
            else:
                out.pop(key, None)
    return GradedElement(cfg, out, truncated)


def end_matrix(f: GradedElement, space: KoszulSpace) -> LinearMap:
    """Matrix of apply_end(f, −) on the K_Tot basis (truncation losses allowed)."""
    cols = {}
    for j, key in enumerate(space.keys):
        y = apply_end(f, space.element(key))
        col = {}
        for k, c in y.terms.items():
            col[space.index[k]] = c
        if col:
            cols[j] = col
    return LinearMap(space.dim, space.dim, cols)


def matrix_callable(M: LinearMap, space: KoszulSpace):
    """Wrap a K_Tot matrix as a GradedElement endo-function."""

    def op(x: GradedElement) -> GradedElement:
        vec = {space.index[k]: c for k, c in x.terms.items()}
        out = M.apply(vec)
        return GradedElement(space.config, {space.keys[i]: c for i, c in out.items()}, x.truncated)

    return op


def identity_end(cfg: ModelConfig) -> GradedElement:
    """The diagonal idempotent Σ_C ε_C v̄_C ⊗ ē_C."""
    return GradedElement(cfg, {(0, (), c, c): _eps(c) for c in range(1 << cfg.d)})


# -- differential and homotopies -------------------------------------------

def d_check_end(f: GradedElement) -> GradedElement:
    """The 1⊗d_Ǩ half of d_Hom: δ-dressed dual-differential kernel."""
    out = {}
    truncated = f.truncated
    for key, c in f.terms.items():
        if _dk_check_terms(f.config, key, c * _delta(key), out):
            truncated = True
    return GradedElement(f.config, out, truncated)


def d_hom(f: GradedElement) -> GradedElement:
    """d_Hom = d_K⊗1 + δ·(1⊗d_Ǩ); square-zero; matches [d_K, −] via apply_end."""
    out = {}
    truncated = f.truncated
    cfg = f.config
    for key, c in f.terms.items():
        wsign = -1 if key[0].bit_count() & 1 else 1
        if _dk_terms(cfg, key, c * wsign, out):
            truncated = True
        if _dk_check_terms(cfg, key, c * _delta(key), out):
            truncated = True
    return GradedElement(cfg, out, truncated)


def p_k_end(f: GradedElement) -> GradedElement:
    """P_K ⊗ 1 on tensors (prefactor from the ∧V∨/Ŝ bidegree only)."""
    return p_k_tensor(f)


def p_check_end(f: GradedElement) -> GradedElement:
    """δ·(1⊗P_Ǩ) on tensors."""
    out = {}
    for key, c in f.terms.items():
        _pk_check_terms(f.config, key, c * _delta(key), out)
    return GradedElement(f.config, out, f.truncated)


def p_t(f: GradedElement) -> GradedElement:
    """P_T = Σ_i (−1)^i P_K (δd_Ǩ P_K)^i — each step raises ∧V degree."""
    acc = GradedElement.zero(f.config)
    term = p_k_end(f)
    sign = 1
    for _ in range(series_bound(f.config)):
        if term.is_zero():
            return acc
        acc = acc.add(term.scale(sign))
        term = p_k_end(d_check_end(term))
        sign = -sign
    if term.is_zero():
        return acc
    raise RuntimeError("P_T series failed to terminate")


def p_gv(f: GradedElement) -> GradedElement:
    """P_GV = Σ_i (−1)^i δP_Ǩ (d_K δP_Ǩ)^i — each step lowers ∧V degree."""
    acc = GradedElement.zero(f.config)
    term = p_check_end(f)
    sign = 1
    for _ in range(series_bound(f.config)):
        if term.is_zero():
            return acc
        acc = acc.add(term.scale(sign))
        term = p_check_end(d_k_tensor(term))
        sign = -sign
    if term.is_zero():
        return acc
    raise RuntimeError("P_GV series failed to terminate")


# -- projections, inclusion, residue ----------------------------------------

def pi_t(f: GradedElement) -> GradedElement:
    """Constant term of the Hom(−, K⁰) column, read in ΛW ⊗ ∧V."""
    return f.restrict(lambda k: not k[1] and not k[2])


def res(f: GradedElement) -> GradedElement:
    """Same restriction as π_T but kept as an End tensor (the Hom(−, Ŝ) row)."""
    return f.restrict(lambda k: not k[1] and not k[2])


def pi_gv(f: GradedElement) -> GradedElement:
    """Constant term of the Hom(K^{−d}, −) row, re-read via the socle pairing."""
    cfg = f.config
    full = cfg.full_b
    out = {}
    for (w, s, a, b), c in f.terms.items():
        if s or b != full:
            continue
        u = full & ~a
        nc = out.get((w, (), 0, u), 0) + _eps(a) * _socle_sign(cfg, u) * c
        if nc:
            out[(w, (), 0, u)] = nc
        else:
            out.pop((w, (), 0, u), None)
    return GradedElement(cfg, out, f.truncated)


def _iota(cfg, j, x):
    """Single contraction ι_{e_j} on the ∧V∨ slot, crossing ΛW."""
    out = {}
    bit = 1 << (j - 1)
    for (w, s, a, b), c in x.terms.items():
        if not a & bit:
            continue
        sign = 1
        if w.bit_count() & 1:
            sign = -sign
        if _below(a, j) & 1:
            sign = -sign
        key = (w, s, a & ~bit, b)
        nc = out.get(key, 0) + sign * c
        if nc:
            out[key] = nc
        else:
            out.pop(key, None)
    return GradedElement(cfg, out, x.truncated)


def i_h(omega: GradedElement) -> GradedElement:
    """Algebra map ΛW⊗∧V → End: ω ↦ L_ω ∘ (ι_{e_{u₁}}∘…∘ι_{e_{u_k}}), u ascending."""
    cfg = omega.config
    if any(k[1] or k[2] for k in omega.terms):
        raise ValueError("argument must lie in ΛW ⊗ ∧V")

    def op(x: GradedElement) -> GradedElement:
        acc = GradedElement.zero(cfg)
        for (w, _s, _a, u_mask), c in omega.terms.items():
            y = x
            for u in sorted(bits(u_mask), reverse=True):
                y = _iota(cfg, u, y)
            if w:
                y = GradedElement(cfg, {(w, (), 0, 0): 1}).mul(y)
            acc = acc.add(y.scale(c))
        return acc

    return tensorize(op, cfg)


def r_residue(f: GradedElement) -> GradedElement:
    """r = Σ_i (−1)^i (P_K δd_Ǩ)^i Res — coincides with i_H∘π_T.

    The step homotopy must be the single P_K⊗1, not the full P_T series:
    with P_T the top ∧V∨⊗∧V blocks come out doubled and the identity
    fails from d = 2 on (checked both ways).
    """
    acc = GradedElement.zero(f.config)
    term = res(f)
    sign = 1
    for _ in range(series_bound(f.config)):
        if term.is_zero():
            return acc
        acc = acc.add(term.scale(sign))
        term = p_k_end(d_check_end(term))
        sign = -sign
    if term.is_zero():
        return acc
    raise RuntimeError("residue series failed to terminate")


# -- derivations -------------------------------------------------------------

def extend_derivation(g: GradedElement):
    """Ŝ-linear derivation of K_Tot from its ∧¹V∨-generator values.

    g lives in ΛW ⊗ Ŝ ⊗ ∧V∨ ⊗ V: a term (w, s, A, {j}) contributes
    w·s·v̄_A to D(v̄_j). Symmetric generators go to zero. Returns the
    operator as a callable on K_Tot elements.
    """
    cfg = g.config
    values = {}
    parities = set()
    for (w, s, a, b), c in g.terms.items():
        if b.bit_count() != 1:
            raise ValueError("generator slot must be a single ∧V letter")
        j = b.bit_length()
        tgt = values.setdefault(j, {})
        tgt[(w, s, a, 0)] = tgt.get((w, s, a, 0), 0) + c
        parities.add((w.bit_count() + a.bit_count() + 1) & 1)
    if len(parities) > 1:
        raise ValueError("mixed-parity derivation values")
    p = parities.pop() if parities else 0
    vals = {j: GradedElement(cfg, t) for j, t in values.items()}

    def D(x: GradedElement) -> GradedElement:
        acc = GradedElement.zero(cfg)
        for (wx, sx, C, bx), cx in x.terms.items():
            if bx:
                raise ValueError("operand must lie in K_Tot")
            base = -cx if (p and wx.bit_count() & 1) else cx
            c_list = list(bits(C))
            for t, j in enumerate(c_list):
                gj = vals.get(j)
                if gj is None:
                    continue
                sign = -1 if (p and t & 1) else 1
                prefix_mask = 0
                for i in c_list[:t]:
                    prefix_mask |= 1 << (i - 1)
                suffix_mask = C & ~prefix_mask & ~(1 << (j - 1))
                prefix = GradedElement(cfg, {(wx, sx, prefix_mask, 0): 1})
                suffix = GradedElement(cfg, {(0, (), suffix_mask, 0): 1})
                acc = acc.add(prefix.mul(gj).mul(suffix).scale(base * sign))
        return acc

    return D


# -- bases ---------------------------------------------------------------

class EndSpace:
    """Totally ordered basis of the full four-slot tensor space."""

    __slots__ = ("config", "keys", "index")

    def __init__(self, config: ModelConfig):
        self.config = config
        keys = []
        for w in range(1 << config.e):
            for s in sym_words(config.d, config.m):
                for a in range(1 << config.d):
                    for b in range(1 << config.d):
                        keys.append((w, s, a, b))
        self.keys = tuple(sorted(keys))
        self.index = {k: i for i, k in enumerate(self.keys)}

    @property
    def dim(self) -> int:
        return len(self.keys)

    def element(self, key) -> GradedElement:
        return GradedElement(self.config, {key: 1})

    def truncation_safe_indices(self):
        return tuple(i for i, k in enumerate(self.keys) if len(k[1]) < self.config.m)


class WedgeSpace:
    """Totally ordered basis of ΛW ⊗ ∧V (the contraction target)."""

    __slots__ = ("config", "keys", "index")

    def __init__(self, config: ModelConfig):
        self.config = config
        keys = []
        for w in range(1 << config.e):
            for b in range(1 << config.d):
                keys.append((w, (), 0, b))
        self.keys = tuple(sorted(keys))
        self.index = {k: i for i, k in enumerate(self.keys)}

    @property
    def dim(self) -> int:
        return len(self.keys)

    def element(self, key) -> GradedElement:
        return GradedElement(self.config, {key: 1})
