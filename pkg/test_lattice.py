"""Tests for the coloured lattice model: weights, boundaries, states and partition functions."""

import os
import random

import pytest

from ddop import ReducedParams, kirillov_poly, operators
from lattice import (
  PLUS, BoundaryError, LatticeModel, WeightTable, bit, boundary_from, colors_of, colorset,
  count_states, dagger, dagger_neg, ddagger, ddagger_neg, enumerate_states, h_poly,
  partition_function, seed_closed_form, seed_scalar, system_for_kn, validate_state,
  vertex_weight,
)
from poly import Polynomial, VarContext
from repro import random_partition
from weyl import (
  Partition, all_permutations, from_word, identity, longest_element, parse_permutation,
)

SLOW = pytest.mark.skipif(not os.environ.get("KNLATTICE_SLOW"), reason="set KNLATTICE_SLOW=1")

LAMBDAS = ((), (1,), (1, 1), (2, 1))


def _padded(parts, n):
  return Partition(parts + (0,) * (n - len(parts)))


def _worked_example(ctx):
  alpha, beta, gamma = Polynomial.params(ctx)
  x1, x2, x3 = (Polynomial.x(ctx, i) for i in (1, 2, 3))
  return x1 ** 3 * (1 + (alpha + gamma) * x2 + gamma * x3 + (alpha + gamma) * (beta + gamma) * x2 * x3)


class TestColorSets:
  def test_bits(self):
    s = colorset([1, 3])
    assert colors_of(s) == [1, 3]
    assert s & bit(3)
    assert not s & bit(2)


class TestScalarWeights:
  def test_h_values(self):
    alpha, beta, _ = Polynomial.params(VarContext(1))
    assert h_poly(0) == 1
    assert h_poly(2) == alpha ** 2 + alpha * beta + beta ** 2

  def test_dagger_small_cases(self):
    x = Polynomial.x(VarContext(1), 1)
    alpha, beta, gamma = Polynomial.params(x.ctx)
    assert dagger(0, x) == 1
    assert dagger(1, x) == (alpha + gamma) * (beta + gamma) * x + gamma

  def test_ddagger_single_color(self):
    beta = Polynomial.params(VarContext(1))[1]
    assert ddagger(1, 0) == 1
    assert ddagger(1, 2) == beta ** 2

  def test_ddagger_two_colors(self):
    gamma = Polynomial.params(VarContext(1))[2]
    assert ddagger(2, 0) == gamma

  @pytest.mark.parametrize("k", range(13))
  def test_dagger_forms_agree(self, k):
    table = WeightTable(VarContext(1))
    assert table.dagger(k, 1) == table.dagger_alt(k, 1)

  @pytest.mark.parametrize("k", range(1, 13))
  def test_ddagger_forms_agree(self, k):
    table = WeightTable(VarContext(1))
    for m in range(k):
      assert table.ddagger(k, m) == table.ddagger_alt(k, m)

  @pytest.mark.parametrize("k", range(8))
  def test_rewritten_forms_at_gamma_minus_alpha_minus_beta(self, k):
    ctx = VarContext(1)
    alpha, beta, _ = Polynomial.params(ctx)
    params = ReducedParams(gamma=-alpha - beta)
    x = Polynomial.x(ctx, 1)
    assert dagger(k, x, params) == dagger_neg(k, x)
    if k >= 1:
      for m in range(k):
        assert ddagger(k, m, ctx, params) == ddagger_neg(k, m, ctx)

  def test_invalid_ddagger(self):
    with pytest.raises(ValueError):
      ddagger(2, 2)


class TestVertices:
  def test_uncolored_vertex(self):
    x = Polynomial.x(VarContext(1), 1)
    south, w = vertex_weight(PLUS, 0, PLUS, x)
    assert south == 0 and w == 1

  def test_color_turns_down(self):
    x = Polynomial.x(VarContext(1), 1)
    alpha, beta, gamma = Polynomial.params(x.ctx)
    south, w = vertex_weight(PLUS, 0, 1, x)
    assert south == bit(1)
    assert w == (1 + (alpha + gamma) * x) * (1 + (beta + gamma) * x)

  def test_color_already_below_is_inadmissible(self):
    x = Polynomial.x(VarContext(1), 1)
    assert vertex_weight(PLUS, bit(1), 1, x) is None

  def test_conservation_on_every_option(self):
    table = WeightTable(VarContext(1))
    for north in range(8):
      for east in range(4):
        for west, south, _ in table.west_options(north, east, 1):
          assert (bit(west) | south) == (bit(east) | north)


class TestBoundaries:
  def test_seed_boundary(self):
    b = boundary_from(identity(3), longest_element(3), Partition((2, 1, 0)), 2)
    assert b.left == (3, 2, 1)
    assert colors_of(b.top[2]) == [1]
    assert colors_of(b.top[1]) == [2]
    assert colors_of(b.top[0]) == [3]

  def test_three_state_boundary(self):
    b = boundary_from(from_word([1, 2], 3), from_word([2], 3), Partition((3, 1, 1)), 6)
    assert b.left == (1, 3, 2)
    assert colors_of(b.top[3]) == [3]
    assert colors_of(b.top[1]) == [1, 2]

  def test_kn_boundary(self):
    b = system_for_kn(parse_permutation("s2", 3), Partition((1, 1, 0)))
    assert b.N == 3
    assert colors_of(b.top[3]) == [1]
    assert colors_of(b.top[2]) == [2]

  def test_N_too_small(self):
    with pytest.raises(BoundaryError):
      boundary_from(identity(2), longest_element(2), Partition((3, 0)), 2)

  def test_boundary_error_is_input_error(self):
    with pytest.raises(ValueError):
      boundary_from(identity(2), identity(3), Partition((0, 0)), 1)


class TestStates:
  def test_worked_example_has_two_states(self):
    b = system_for_kn(parse_permutation("(2,3)", 3), Partition((1, 1, 0)))
    assert count_states(b) == 2
    assert len(list(enumerate_states(b))) == 2

  def test_three_states(self):
    b = boundary_from(from_word([1, 2], 3), from_word([2], 3), Partition((3, 1, 1)), 6)
    assert count_states(b) == 3

  def test_seed_has_unique_state(self):
    b = system_for_kn(identity(3), Partition((1, 0, 0)))
    assert count_states(b) == 1

  def test_states_are_valid(self):
    b = system_for_kn(longest_element(3), Partition((1, 1, 0)))
    states = list(enumerate_states(b))
    assert states
    for state in states:
      validate_state(state)
      assert state.horizontal[0][0] == b.left[0]

  def test_state_json_grid(self):
    b = system_for_kn(parse_permutation("s2", 3), Partition((1, 1, 0)))
    data = next(iter(enumerate_states(b))).to_json()
    assert len(data["horizontal"]) == 3
    assert len(data["vertical"]) == 4
    assert "terms" in data["weight"]


class TestPartitionFunction:
  def test_worked_example(self):
    b = system_for_kn(parse_permutation("(2,3)", 3), Partition((1, 1, 0)))
    assert partition_function(b) == _worked_example(VarContext(3))

  def test_row_transfer_matches_enumeration(self):
    b = system_for_kn(parse_permutation("3142"), Partition((1, 0, 0, 0)))
    model = LatticeModel(b)
    total = Polynomial.zero(VarContext(4))
    for state in model.states():
      total = total + state.weight
    assert total == model.partition_function()

  def test_single_path(self):
    b = boundary_from(identity(1), identity(1), Partition((0,)), 2)
    assert partition_function(b) == Polynomial.x(VarContext(1), 1) ** 2

  @pytest.mark.parametrize("n", [1, 2, 3])
  def test_oracles_agree(self, n):
    for parts in LAMBDAS:
      if len(parts) > n:
        continue
      lam = _padded(parts, n)
      for w in all_permutations(n):
        assert partition_function(system_for_kn(w, lam)) == kirillov_poly(w, lam), (w, lam)

  @SLOW
  def test_oracles_agree_s4(self):
    for parts in LAMBDAS:
      lam = _padded(parts, 4)
      for w in all_permutations(4):
        assert partition_function(system_for_kn(w, lam)) == kirillov_poly(w, lam), (w, lam)

  def test_oracles_agree_s4_zero_lambda(self):
    lam = Partition((0, 0, 0, 0))
    for w in all_permutations(4):
      assert partition_function(system_for_kn(w, lam)) == kirillov_poly(w, lam), w

  @pytest.mark.parametrize("params", [
    ReducedParams.hecke_grothendieck(), ReducedParams.dz(), ReducedParams.schubert(),
    ReducedParams.sign_changed(),
  ], ids=["gamma0", "dz", "schubert", "neg"])
  def test_specialized_weights(self, params):
    for w in all_permutations(3):
      lam = Partition((0, 0, 0))
      assert partition_function(system_for_kn(w, lam), params) == kirillov_poly(w, lam, params)


class TestRecursion:
  @pytest.mark.parametrize("w", list(all_permutations(3)), ids=str)
  def test_left_multiplication_applies_T(self, w):
    mu, N = Partition((2, 1, 1)), 3
    ops = operators(ReducedParams(), VarContext(3))
    w0 = longest_element(3)
    base = partition_function(boundary_from(w, w0, mu, N))
    inv = w.inverse().oneline
    for i in (1, 2):
      if inv[i - 1] < inv[i]:
        up = partition_function(boundary_from(w.left_multiply(i), w0, mu, N))
        assert up == ops.apply(i, base)

  @pytest.mark.parametrize("n", [3, 4])
  def test_random_boundaries(self, n):
    rng = random.Random(300 + n)
    ops = operators(ReducedParams(), VarContext(n))
    w0 = longest_element(n)
    perms = list(all_permutations(n))
    for _ in range(6):
      mu = random_partition(rng, n)
      N = mu[0] + rng.randint(0, 2)
      w = rng.choice(perms)
      base = partition_function(boundary_from(w, w0, mu, N))
      inv = w.inverse().oneline
      for i in range(1, n):
        if inv[i - 1] < inv[i]:
          up = partition_function(boundary_from(w.left_multiply(i), w0, mu, N))
          assert up == ops.apply(i, base), (w, i, mu, N)


class TestSeed:
  def test_distinct_parts_scalar_one(self):
    assert seed_scalar(Partition((3, 1, 0))) == 1

  def test_repeated_pair(self):
    gamma = Polynomial.params(VarContext(2))[2]
    assert seed_scalar(Partition((1, 1))) == gamma
    assert seed_scalar(Partition((1, 1)), printed=True) == -gamma

  def test_closed_form_single_path(self):
    assert seed_closed_form(Partition((0,)), 2) == Polynomial.x(VarContext(1), 1) ** 2

  def test_closed_form_pair(self):
    gamma = Polynomial.params(VarContext(2))[2]
    assert seed_closed_form(Partition((1, 1)), 1) == gamma

  def test_closed_form_rejects_small_N(self):
    with pytest.raises(BoundaryError):
      seed_closed_form(Partition((3, 1)), 2)

  def test_random_instances(self):
    rng = random.Random(2024)
    for _ in range(50):
      n = rng.randint(1, 4)
      mu = Partition(tuple(sorted((rng.randint(0, 3) for _ in range(n)), reverse=True)))
      N = mu[0] + rng.randint(0, 3)
      b = boundary_from(identity(n), longest_element(n), mu, N)
      assert partition_function(b) == seed_closed_form(mu, N, n), (mu, N)