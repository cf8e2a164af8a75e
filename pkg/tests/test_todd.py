"""Todd-type class from curvature powers: series data, two routes, q_σ laws."""

from fractions import Fraction as F

import pytest

from koszul_perturb import (
    CurvatureInput,
    GradedElement as G,
    ModelConfig,
    SplitRng,
    ToddClass,
    bernoulli,
    interior_product,
    q_sigma,
    q_sigma_step,
    q_sigma_via_contraction,
    random_curvature,
    rho,
    todd_det,
    todd_exp,
    todd_series_coeff,
)
from koszul_perturb.homcomplex import WedgeSpace
from koszul_perturb.todd import perturbation_t, perturbation_t_value, perturbed_contractions

from math import factorial


def mono(cfg, w=0, s=(), a=0, b=0, c=1):
    return G.monomial(cfg, w, s, a, b, F(c))


def wedge_basis(cfg):
    for key in WedgeSpace(cfg).keys:
        yield key, G(cfg, {key: F(1)})


# -- series data ----------------------------------------------------------------

def test_bernoulli_plus_convention():
    want = [
        F(1), F(1, 2), F(1, 6), F(0), F(-1, 30), F(0), F(1, 42), F(0),
        F(-1, 30), F(0), F(5, 66), F(0), F(-691, 2730),
    ]
    assert [bernoulli(n) for n in range(13)] == want
    with pytest.raises(ValueError):
        bernoulli(-1)


def test_todd_series_table():
    want = [F(1), F(1, 2), F(1, 12), F(0), F(-1, 720), F(0), F(1, 30240)]
    assert [todd_series_coeff(n) for n in range(7)] == want
    for n in range(9):
        assert todd_series_coeff(n) == bernoulli(n) / factorial(n)


# -- curvature traces -------------------------------------------------------------

def test_rho_dimension_one():
    cfg = ModelConfig(1, 1, 4)
    r = CurvatureInput.make(1, 1, {(1, 1, 1, 1): F(3, 2)})
    assert rho(r, cfg, 1) == mono(cfg, w=0b1, a=0b1, c=F(3, 2))


def test_rho_odd_orders_vanish():
    cfg = ModelConfig(3, 3, 3)
    r = random_curvature(SplitRng(9).split("x"), 3, 3)
    assert rho(r, cfg, 3).is_zero()


def test_perturbation_t_value_dimension_one():
    # diagonal entry polarizes to 2c, then picks up the series weight 1/2
    cfg = ModelConfig(1, 1, 4)
    r = CurvatureInput.make(1, 1, {(1, 1, 1, 1): F(3, 2)})
    val = perturbation_t_value(r, cfg)
    assert val == mono(cfg, w=0b1, s=(1,), a=0b1, b=0b1, c=F(3, 2))
    assert all(len(k[1]) == 1 for k in val.terms)


# -- the class and its two routes ---------------------------------------------------

def test_todd_dimension_one_value():
    cfg = ModelConfig(1, 1, 4)
    r = CurvatureInput.make(1, 1, {(1, 1, 1, 1): F(3, 2)})
    want = G.unit(cfg).add(mono(cfg, w=0b1, a=0b1, c=F(3, 2)))
    assert todd_exp(r, cfg).value == want
    assert todd_det(r, cfg).value == want


def test_todd_zero_curvature_is_unit():
    cfg = ModelConfig(2, 3, 4)
    td = todd_exp(CurvatureInput.zero(2, 3), cfg)
    assert td.value == G.unit(cfg)
    assert td.component(0) == G.unit(cfg)
    assert td.component(1).is_zero()


@pytest.mark.parametrize(
    "d,e", [(1, 4), (2, 3), (3, 3)], ids=["d1", "d2", "d3"]
)
def test_todd_routes_agree(d, e):
    cfg = ModelConfig(d, e, 4)
    rng = SplitRng(67)
    for trial in range(4):
        r = random_curvature(rng.split((d, trial)), d, e)
        assert todd_exp(r, cfg).value == todd_det(r, cfg).value, trial


def test_todd_det_guards_dimension():
    with pytest.raises(ValueError):
        todd_det(CurvatureInput.zero(4, 2), ModelConfig(4, 2, 2))


def test_todd_class_validation():
    cfg = ModelConfig(2, 2, 2)
    with pytest.raises(ValueError):
        ToddClass(cfg, G.s_gen(cfg, 1))  # sym letters forbidden
    with pytest.raises(ValueError):
        ToddClass(cfg, G.unit(cfg).add(G.w_gen(cfg, 1)))  # |w| must match |a|
    with pytest.raises(ValueError):
        ToddClass(cfg, mono(cfg, w=0b1, a=0b1))  # degree-0 part must be 1


def test_todd_json_roundtrip():
    from koszul_perturb import terms_from_json
    import json

    cfg = ModelConfig(2, 3, 4)
    r = random_curvature(SplitRng(71).split("j"), 2, 3)
    td = todd_exp(r, cfg)
    data = json.loads(td.to_json())
    assert (data["d"], data["e"], data["m"]) == (2, 3, 4)
    assert terms_from_json(cfg, data["terms"]) == td.value


# -- q_σ -----------------------------------------------------------------------------

def test_q_sigma_zero_curvature_is_identity():
    cfg = ModelConfig(2, 2, 4)
    r = CurvatureInput.zero(2, 2)
    for key, eta in wedge_basis(cfg):
        assert q_sigma(r, cfg, eta) == eta, key


def test_q_sigma_is_todd_contraction_at_top_degree():
    # d = 1: every wedge degree is top or trivial
    cfg = ModelConfig(1, 2, 4)
    rng = SplitRng(73)
    for trial in range(3):
        r = random_curvature(rng.split(trial), 1, 2)
        td = todd_det(r, cfg)
        t_op = perturbation_t(r, cfg)
        for key, eta in wedge_basis(cfg):
            if bin(key[3]).count("1") != cfg.d:
                continue
            assert q_sigma(r, cfg, eta, t_op) == interior_product(td.value, eta), (trial, key)


def test_q_sigma_is_todd_contraction_d2():
    cfg = ModelConfig(2, 3, 4)
    r = random_curvature(SplitRng(79).split("m"), 2, 3)
    td = todd_det(r, cfg)
    t_op = perturbation_t(r, cfg)
    for key, eta in wedge_basis(cfg):
        if bin(key[3]).count("1") != cfg.d:
            continue
        assert q_sigma(r, cfg, eta, t_op) == interior_product(td.value, eta), key


def test_q_sigma_matches_todd_below_top_degree_too():
    # stronger than the top-degree statement; holds on every basis vector
    cfg = ModelConfig(2, 3, 4)
    r = random_curvature(SplitRng(79).split("m"), 2, 3)
    td = todd_det(r, cfg)
    t_op = perturbation_t(r, cfg)
    for key, eta in wedge_basis(cfg):
        assert q_sigma(r, cfg, eta, t_op) == interior_product(td.value, eta), key


def test_q_sigma_is_lambda_w_linear():
    cfg = ModelConfig(2, 3, 4)
    r = random_curvature(SplitRng(83).split("w"), 2, 3)
    t_op = perturbation_t(r, cfg)
    for key, eta in wedge_basis(cfg):
        if key[0] & 0b1:
            continue
        w = G.w_gen(cfg, 1)
        assert q_sigma(r, cfg, w.mul(eta), t_op) == w.mul(q_sigma(r, cfg, eta, t_op)), key


# -- single-step laws ------------------------------------------------------------------

def _step_sums(r, cfg, eta, l):
    disp = G.zero(cfg)
    fresh = G.zero(cfg)
    for j in range(1, cfg.e + 1):
        rj = rho(r, cfg, j)
        if rj.is_zero():
            continue
        contr = interior_product(rj, eta)
        if contr.is_zero():
            continue
        disp = disp.add(contr.scale(F(1, cfg.d - l + j)))
        fresh = fresh.add(contr.scale(F(1, j)))
    return disp, fresh


def test_single_step_laws_dimension_one():
    # at d = 1 the two normalizations coincide wherever the contraction is nonzero
    cfg = ModelConfig(1, 3, 4)
    r = random_curvature(SplitRng(5).split("a"), 1, 3)
    t_op = perturbation_t(r, cfg)
    for key, eta in wedge_basis(cfg):
        l = bin(key[3]).count("1")
        step = q_sigma_step(r, cfg, eta, t_op)
        disp, fresh = _step_sums(r, cfg, eta, l)
        assert step == fresh, key
        assert step == disp, key


def test_single_step_fresh_law_d2_and_display_mismatch():
    # the measured law has weight 1/j at every l; the 1/(d−l+j) normalization
    # breaks at the middle degree l = 1 for generic curvature
    cfg = ModelConfig(2, 3, 4)
    r = random_curvature(SplitRng(5).split("a"), 2, 3)
    t_op = perturbation_t(r, cfg)
    mismatches = []
    for key, eta in wedge_basis(cfg):
        l = bin(key[3]).count("1")
        step = q_sigma_step(r, cfg, eta, t_op)
        disp, fresh = _step_sums(r, cfg, eta, l)
        assert step == fresh, key
        if step != disp:
            mismatches.append((key, l))
    assert mismatches
    assert {l for _k, l in mismatches} == {1}


# -- matrix-engine route ----------------------------------------------------------------

def test_perturbed_contraction_route_agrees():
    cfg = ModelConfig(1, 2, 4)
    r = random_curvature(SplitRng(2).split("pc"), 1, 2)
    pc = perturbed_contractions(r, cfg)
    for key, eta in wedge_basis(cfg):
        assert q_sigma_via_contraction(r, cfg, eta, pc=pc) == q_sigma(r, cfg, eta), key
