"""Tests for the divided-difference operators and the families they produce."""

import random

import pytest

from ddop import (
  GeneralParams, ParameterError, ReducedParams, apply_T_general, braid_condition,
  check_braid, check_hecke, classical_schubert, dz_polynomial, find_braid_witness,
  general_presets, generalized_schubert, key_polynomial, kirillov_family, kirillov_poly,
  kirillov_seed, kn_exponents, operators, require_braiding,
)
from poly import Polynomial, VarContext, nonneg_report
from weyl import (
  Composition, Partition, Permutation, all_permutations, all_reduced_words, identity,
  longest_element, parse_permutation,
)


def _worked_example(ctx):
  alpha, beta, gamma = Polynomial.params(ctx)
  x1, x2, x3 = (Polynomial.x(ctx, i) for i in (1, 2, 3))
  return x1 ** 3 * (1 + (alpha + gamma) * x2 + gamma * x3 + (alpha + gamma) * (beta + gamma) * x2 * x3)


class TestOperators:
  def test_T1_on_x1(self):
    ctx = VarContext(2)
    alpha, beta, gamma = Polynomial.params(ctx)
    x1, x2 = Polynomial.x(ctx, 1), Polynomial.x(ctx, 2)
    expected = 1 + (alpha + gamma) * x1 + gamma * x2 + (alpha + gamma) * (beta + gamma) * x1 * x2
    assert apply_T_general(ReducedParams(), 1, x1) == expected

  def test_constant_is_scaled_by_minus_beta(self):
    ctx = VarContext(3)
    beta = Polynomial.params(ctx)[1]
    assert apply_T_general(ReducedParams(), 2, Polynomial.one(ctx)) == -beta

  def test_index_out_of_range(self):
    ctx = VarContext(2)
    with pytest.raises(IndexError):
      operators(ReducedParams(), ctx).apply(2, Polynomial.one(ctx))

  def test_word_applies_rightmost_first(self):
    ctx = VarContext(3)
    ops = operators(ReducedParams(), ctx)
    f = Polynomial.x(ctx, 1) ** 2
    assert ops.apply_word([1, 2], f) == ops.apply(1, ops.apply(2, f))

  def test_reduced_parameters_braid(self):
    assert braid_condition(ReducedParams().general()).is_zero()
    assert braid_condition(ReducedParams.sign_changed().general()).is_zero()


class TestRelations:
  @pytest.mark.parametrize("n", [2, 3, 4])
  def test_hecke_relation(self, n):
    report = check_hecke(ReducedParams(), n, 15, random.Random(n))
    assert report.passed, report.failures

  @pytest.mark.parametrize("name", sorted(general_presets()))
  def test_presets_braid(self, name):
    report = check_braid(general_presets()[name], 3, 5, random.Random(11))
    assert report.passed, report.failures

  def test_non_braiding_parameters(self):
    bad = GeneralParams(1, 0, 0, 1, 0)
    assert braid_condition(bad) == 1
    with pytest.raises(ParameterError):
      require_braiding(bad)
    witness = find_braid_witness(bad)
    assert witness is not None

  def test_braiding_parameters_have_no_witness(self):
    assert find_braid_witness(ReducedParams(), max_degree=2) is None


class TestKirillov:
  def test_exponents(self):
    assert kn_exponents(Partition((1, 1, 0))) == (3, 1, 0)
    assert kn_exponents(Partition((0, 0, 0))) == (2, 1, 0)

  def test_identity_gives_seed(self):
    lam = Partition((2, 1, 0))
    assert kirillov_poly(identity(3), lam) == kirillov_seed(lam)

  def test_worked_example(self):
    w = parse_permutation("(2,3)", 3)
    assert kirillov_poly(w, Partition((1, 1, 0))) == _worked_example(VarContext(3))

  def test_partition_padded(self):
    w = parse_permutation("(2,3)", 3)
    assert kirillov_poly(w, Partition((1, 1))) == _worked_example(VarContext(3))

  @pytest.mark.parametrize("w", list(all_permutations(3)), ids=str)
  def test_reduced_word_independence(self, w):
    lam = Partition((1, 0, 0))
    values = {kirillov_poly(w, lam, word=list(word)) for word in all_reduced_words(w)}
    assert len(values) == 1

  @pytest.mark.parametrize("parts", [(0, 0, 0, 0), (1, 0, 0, 0)])
  def test_reduced_word_independence_s4(self, parts):
    lam = Partition(parts)
    for w in all_permutations(4):
      values = {kirillov_poly(w, lam, word=list(word)) for word in all_reduced_words(w)}
      assert len(values) == 1, w

  def test_family_matches_individual_computation(self):
    lam = Partition((1, 0, 0))
    family = kirillov_family(3, lam)
    assert len(family) == 6
    for w, poly in family.items():
      assert poly == kirillov_poly(w, lam)

  def test_gamma_zero_is_nonnegative_in_s3(self):
    for w in all_permutations(3):
      kn = kirillov_poly(w, Partition((0, 0, 0)), ReducedParams.hecke_grothendieck())
      assert nonneg_report(kn).all_nonneg


class TestSpecializations:
  def test_classical_schubert_small_cases(self):
    ctx = VarContext(3)
    assert classical_schubert(longest_element(3)) == Polynomial.x_monomial(ctx, (2, 1, 0))
    assert classical_schubert(Permutation((2, 1, 3))) == Polynomial.x(ctx, 1)
    assert classical_schubert(identity(3)) == 1

  @pytest.mark.parametrize("w", list(all_permutations(3)), ids=str)
  def test_kn_at_zero_is_schubert(self, w):
    u = longest_element(3) * w.inverse()
    kn = kirillov_poly(w, Partition((0, 0, 0)), ReducedParams.schubert())
    assert kn == classical_schubert(u)

  @pytest.mark.parametrize("w", list(all_permutations(3)), ids=str)
  def test_kn_at_alpha_gamma_zero_is_grothendieck(self, w):
    u = longest_element(3) * w.inverse()
    kn = kirillov_poly(w, Partition((0, 0, 0)), ReducedParams.grothendieck())
    assert kn == generalized_schubert(u, general_presets()["grothendieck"])

  def test_generalized_schubert_needs_braiding(self):
    with pytest.raises(ParameterError):
      generalized_schubert(identity(3), GeneralParams(1, 0, 0, 1, 0))

  def test_dz_s2(self):
    ctx = VarContext(2)
    x1, x2 = Polynomial.x(ctx, 1), Polynomial.x(ctx, 2)
    assert dz_polynomial(Permutation((2, 1))) == 1 + x1 + x1 * x2

  def test_sign_changed_s2_is_positive(self):
    ctx = VarContext(2)
    alpha, beta, _ = Polynomial.params(ctx)
    x1, x2 = Polynomial.x(ctx, 1), Polynomial.x(ctx, 2)
    kn = kirillov_poly(Permutation((2, 1)), Partition((0, 0)), ReducedParams.sign_changed())
    assert kn == 1 + beta * x1 + (alpha + beta) * x2 + alpha * beta * x1 * x2


class TestKeys:
  def test_partition_key_is_monomial(self):
    k = key_polynomial(Composition((2, 1, 0)))
    assert k == Polynomial.x_monomial(VarContext(3), (2, 1, 0))

  def test_demazure_character(self):
    ctx = VarContext(2)
    k = key_polynomial(Composition((0, 1)), general_presets()["demazure"])
    assert k == Polynomial.x(ctx, 1) + Polynomial.x(ctx, 2)

  def test_demazure_atom(self):
    k = key_polynomial(Composition((0, 1)), general_presets()["demazure_atom"])
    assert k == Polynomial.x(VarContext(2), 2)

  def test_single_application_is_positive(self):
    assert nonneg_report(key_polynomial(Composition((0, 1)))).all_nonneg

  def test_counterexample_has_negative_coefficient(self):
    assert not nonneg_report(key_polynomial(Composition((1, 2, 2, 1)))).all_nonneg
