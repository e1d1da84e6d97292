"""Tests for the R-matrix and the Yang-Baxter verifiers."""

import os
import random

import pytest

from ddop import ReducedParams
from lattice import PLUS, bit
from poly import Polynomial, VarContext
from ybe import (
  FAMILIES, GenericWeights, RTable, case_classes, degenerate_matrix, degenerate_r_check,
  generic_case, r_family, r_weight, train_recursion_identity, train_step, verify_rrr,
  verify_rtt, verify_rtt_generic,
)

SLOW = pytest.mark.skipif(not os.environ.get("KNLATTICE_SLOW"), reason="set KNLATTICE_SLOW=1")


@pytest.fixture
def rows():
  ctx = VarContext(2)
  return Polynomial.x(ctx, 1), Polynomial.x(ctx, 2)


class TestFamilies:
  @pytest.mark.parametrize("labels,family", [
    ((PLUS, PLUS, PLUS, PLUS), "A2"),
    ((2, 2, 2, 2), "A1"),
    ((1, 2, 1, 2), "B"),
    ((PLUS, 3, PLUS, 3), "B"),
    ((2, 1, 2, 1), "C"),
    ((3, PLUS, 3, PLUS), "C"),
    ((1, 2, 2, 1), "D1"),
    ((2, 1, 1, 2), "E1"),
    ((PLUS, 1, 1, PLUS), "D2"),
    ((1, PLUS, PLUS, 1), "E2"),
  ])
  def test_classification(self, labels, family):
    assert r_family(*labels) == family

  def test_non_conserving_labels(self):
    assert r_family(1, 2, 1, 3) is None
    assert r_family(1, 1, 1, PLUS) is None
    assert r_family(PLUS, 1, 2, PLUS) is None


class TestWeights:
  def test_uncolored_diagonal(self, rows):
    xi, xj = rows
    alpha, beta, gamma = Polynomial.params(xi.ctx)
    expected = (alpha + beta + gamma) * xi + gamma * xj + 1 + (beta + gamma) * (alpha + gamma) * xi * xj
    assert r_weight(PLUS, PLUS, PLUS, PLUS, xi, xj) == expected

  def test_colored_diagonal_swaps_rows(self, rows):
    xi, xj = rows
    alpha, beta, gamma = Polynomial.params(xi.ctx)
    expected = (alpha + beta + gamma) * xj + gamma * xi + 1 + (beta + gamma) * (alpha + gamma) * xi * xj
    assert r_weight(1, 1, 1, 1, xi, xj) == expected

  def test_straight_through(self, rows):
    xi, xj = rows
    assert r_weight(1, 2, 1, 2, xi, xj) == xj - xi

  def test_c_family_vanishes_at_alpha_zero(self, rows):
    xi, xj = rows
    assert r_weight(2, 1, 2, 1, xi, xj, ReducedParams(alpha=0)).is_zero()

  def test_zero_off_families(self, rows):
    xi, xj = rows
    assert r_weight(1, 2, 2, 2, xi, xj).is_zero()

  def test_color_relabeling_invariance(self, rows):
    xi, xj = rows
    rng = random.Random(5)
    labels = [PLUS, 1, 2]
    for _ in range(30):
      image = sorted(rng.sample(range(1, 20), 2))
      relabel = {PLUS: PLUS, 1: image[0], 2: image[1]}
      for a in labels:
        for b in labels:
          for c, d in RTable.outputs(a, b):
            moved = [relabel[v] for v in (a, b, c, d)]
            assert r_weight(a, b, c, d, xi, xj) == r_weight(*moved, xi, xj)

  def test_every_family_nonzero_symbolically(self):
    rtab = RTable(VarContext(2))
    for family in FAMILIES:
      assert not rtab.family_weight(family, 1, 2).is_zero()


class TestRTT:
  @pytest.mark.parametrize("colors", [1, 2, 3])
  def test_exhaustive(self, colors):
    report = verify_rtt(colors)
    assert report.passed, report.failures
    labels = colors + 1
    assert report.cases_checked == labels ** 4 * 4 ** colors

  @SLOW
  def test_four_colors(self):
    assert verify_rtt(4).passed

  def test_specialized_parameters(self):
    assert verify_rtt(2, ReducedParams.dz()).passed
    assert verify_rtt(2, ReducedParams.sign_changed()).passed


class TestGenericRTT:
  def test_worked_case(self):
    # a < d, a in S, d not in S; S' = S + {d} - {a}
    groups_by_out = generic_case(1, PLUS, PLUS, 2, bit(1))
    assert bit(2) in groups_by_out
    for groups in groups_by_out.values():
      for left, right in groups.values():
        assert left == right

  def test_all_plus_case(self):
    weights = GenericWeights(0)
    result = generic_case(PLUS, PLUS, PLUS, PLUS, 0, weights)
    assert list(result) == [0]
    pairs = list(result[0].values())
    assert all(left == right for left, right in pairs)
    assert any(not left.is_zero() for left, _ in pairs)

  def test_case_classes_use_consecutive_ranks(self):
    classes = list(case_classes())
    assert (PLUS, PLUS, PLUS, PLUS) in classes
    assert (1, 2, 1, 2) in classes
    assert (1, 3, 1, 3) not in classes

  def test_h_recursion(self):
    weights = GenericWeights(1)
    # h_{u-1} = alpha h_{u-2} + beta^{u-1}
    terms = weights.h(-1)
    assert len(terms) == 2

  @SLOW
  def test_all_case_classes(self):
    report = verify_rtt_generic()
    assert report.passed, report.failures


class TestRRR:
  def test_all_entries(self):
    report = verify_rrr()
    assert report.passed, report.failures
    assert report.cases_checked == 4096


class TestDegenerate:
  def test_check_passes(self):
    report = degenerate_r_check()
    assert report.passed, report.failures

  def test_printed_matrix_entries(self):
    ctx = VarContext(2)
    beta = Polynomial.params(ctx)[1]
    xi, xj = Polynomial.x(ctx, 1), Polynomial.x(ctx, 2)
    m = degenerate_matrix(RTable(ctx, ReducedParams(alpha=0, gamma=0)))
    assert m[0][0] == 1 + beta * xi
    assert m[1][1] == xj - xi
    assert m[2][2].is_zero()
    assert m[3][3] == 1 + beta * xj


class TestTrain:
  def test_constant(self):
    ctx = VarContext(3)
    beta = Polynomial.params(ctx)[1]
    assert train_step(Polynomial.one(ctx), 1) == -beta

  def test_worked_example(self):
    ctx = VarContext(3)
    alpha, beta, gamma = Polynomial.params(ctx)
    x1, x2, x3 = (Polynomial.x(ctx, i) for i in (1, 2, 3))
    expected = x1 ** 3 * (1 + (alpha + gamma) * x2 + gamma * x3 + (alpha + gamma) * (beta + gamma) * x2 * x3)
    assert train_step(x1 ** 3 * x2, 2) == expected

  @pytest.mark.parametrize("n", [2, 3, 4])
  def test_random_polynomials(self, n):
    rng = random.Random(100 + n)
    for i in range(1, n):
      report = train_recursion_identity(i, n, 25, rng)
      assert report.passed, report.failures

  def test_row_out_of_range(self):
    with pytest.raises(IndexError):
      train_recursion_identity(3, 3, 1, random.Random(0))
