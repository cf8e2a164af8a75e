"""Koszul differential/homotopy pair, its socle-dual, and the twist bridge."""

from fractions import Fraction as F

import pytest

from koszul_perturb import GradedElement as G, ModelConfig
from koszul_perturb.koszul import (
    CheckSpace,
    KoszulSpace,
    d_k,
    d_k_check,
    d_k_tensor,
    i_k,
    i_k_check,
    p_k,
    p_k_check,
    p_k_tensor,
    p_k_tilde,
    pi_k,
    pi_k_check,
    twist,
    untwist,
)

C = ModelConfig(2, 1, 2)


def mono(cfg, w=0, s=(), a=0, b=0, c=1):
    return G.monomial(cfg, w, s, a, b, F(c))


def basis(space):
    for key in space.keys:
        yield key, G(space.config, {key: F(1)})


# -- frozen generator values ---------------------------------------------------

def test_dk_values():
    # d(ā₁ā₂) = v₁ā₂ − v₂ā₁
    assert dict(d_k(mono(C, a=0b11)).terms) == {
        (0, (1,), 0b10, 0): F(1),
        (0, (2,), 0b01, 0): F(-1),
    }
    # odd differential crosses w
    assert d_k(mono(C, w=0b1, a=0b01)) == mono(C, w=0b1, s=(1,), c=-1)
    assert d_k(G.unit(C)).is_zero()


def test_pk_values():
    assert p_k(G.s_gen(C, 1)) == mono(C, a=0b01)
    # 1/(|α|+|A|) normalization against the plain transpose kernel
    assert dict(p_k(mono(C, s=(1, 2))).terms) == {
        (0, (2,), 0b01, 0): F(1, 2),
        (0, (1,), 0b10, 0): F(1, 2),
    }
    assert p_k_tilde(mono(C, s=(1, 2))) == p_k(mono(C, s=(1, 2))).scale(2)
    assert p_k(mono(C, s=(1,), a=0b10)) == mono(C, a=0b11, c=F(1, 2))
    assert p_k(mono(C, s=(1,), a=0b01)).is_zero()


def test_dk_check_values():
    # socle-side differential on the unit: −Σ v_i ē_i
    assert dict(d_k_check(G.unit(C)).terms) == {
        (0, (1,), 0, 0b01): F(-1),
        (0, (2,), 0, 0b10): F(-1),
    }


def test_projection_pair():
    assert pi_k(G.unit(C)) == G.unit(C)
    assert pi_k(G.s_gen(C, 1)).is_zero()
    assert pi_k(mono(C, a=0b01)).is_zero()
    assert i_k(G.w_gen(C, 1)) == G.w_gen(C, 1)
    assert pi_k(i_k(G.w_gen(C, 1))) == G.w_gen(C, 1)


# -- complex identities, elementwise -------------------------------------------

def _skip_truncated(*elems):
    return any(x.truncated for x in elems)


@pytest.mark.parametrize("cfg", [ModelConfig(2, 1, 2), ModelConfig(2, 2, 3), ModelConfig(3, 1, 2)])
def test_koszul_contraction_identities(cfg):
    ks = KoszulSpace(cfg)
    checked = 0
    for _key, x in basis(ks):
        dd = d_k(d_k(x))
        if not dd.truncated:
            assert dd.is_zero()
        pp = p_k(p_k(x))
        if not pp.truncated:
            assert pp.is_zero()
        lhs = d_k(p_k(x)).add(p_k(d_k(x)))
        rhs = x.sub(i_k(pi_k(x)))
        if _skip_truncated(lhs, rhs):
            continue
        assert lhs == rhs, _key
        checked += 1
    assert checked > ks.dim // 3  # skip must not eat the whole basis


@pytest.mark.parametrize("cfg", [ModelConfig(2, 1, 2), ModelConfig(2, 2, 3)])
def test_socle_dual_contraction_identities(cfg):
    cs = CheckSpace(cfg)
    for _key, x in basis(cs):
        dd = d_k_check(d_k_check(x))
        if not dd.truncated:
            assert dd.is_zero()
        lhs = d_k_check(p_k_check(x)).add(p_k_check(d_k_check(x)))
        rhs = x.sub(i_k_check(pi_k_check(x)))
        if _skip_truncated(lhs, rhs):
            continue
        assert lhs == rhs, _key


def test_pk_tilde_commutator_is_degree_operator():
    # [d, P̃] x = (|α|+|A|) x on sym/wedge-homogeneous x away from truncation
    cfg = ModelConfig(2, 1, 3)
    for key, x in basis(KoszulSpace(cfg)):
        got = d_k(p_k_tilde(x)).add(p_k_tilde(d_k(x)))
        if got.truncated:
            continue
        weight = len(key[1]) + bin(key[2]).count("1")
        assert got == x.scale(weight), key


def test_domain_guards():
    with pytest.raises(ValueError):
        d_k(mono(C, b=0b01))  # K side carries no ∧V letters
    with pytest.raises(ValueError):
        d_k_check(mono(C, a=0b01))  # socle side carries no ∧V∨ letters


# -- twist ---------------------------------------------------------------------

def test_twist_values():
    assert twist(G.unit(C)) == mono(C, a=0b11, b=0b11)
    assert twist(mono(C, b=0b01)) == mono(C, a=0b10, b=0b11, c=-1)
    assert twist(mono(C, b=0b10)) == mono(C, a=0b01, b=0b11)
    assert twist(mono(C, b=0b11)) == mono(C, b=0b11)


@pytest.mark.parametrize("cfg", [ModelConfig(2, 1, 2), ModelConfig(3, 1, 2)])
def test_twist_roundtrip(cfg):
    for _key, x in basis(CheckSpace(cfg)):
        assert untwist(twist(x)) == x


@pytest.mark.parametrize("cfg", [ModelConfig(2, 1, 2), ModelConfig(3, 1, 2)])
def test_twist_conjugates_differential_and_homotopy(cfg):
    # twist∘ď = (−1)^{d−|B|} (d⊗1)∘twist and twist∘P̌ = −(−1)^{d−|B|} (P⊗1)∘twist
    for key, x in basis(CheckSpace(cfg)):
        sign = -1 if (cfg.d - bin(key[3]).count("1")) & 1 else 1
        lhs_d = twist(d_k_check(x))
        rhs_d = d_k_tensor(twist(x)).scale(sign)
        lhs_p = twist(p_k_check(x))
        rhs_p = p_k_tensor(twist(x)).scale(-sign)
        if _skip_truncated(lhs_d, rhs_d, lhs_p, rhs_p):
            continue
        assert lhs_d == rhs_d, key
        assert lhs_p == rhs_p, key
