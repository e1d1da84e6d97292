"""Tests for positivity scans, counterexamples and the cross-family checks."""

import os

import pytest

import analysis
from analysis import (
  ConsistencyError, dz_value_at_one, expected_negative_s4, gamma_divisibility_check,
  gamma_zero_structure_check, key_lattice_check, key_positivity_counterexample,
  negative_witnesses, resolve_mode, scan_positivity, specialization_crosschecks,
)
from ddop import dz_polynomial
from lattice import system_for_kn
from poly import Polynomial, VarContext
from report import CheckReport
from weyl import Composition, InputError, Partition, Permutation, all_permutations

SLOW = pytest.mark.skipif(not os.environ.get("KNLATTICE_SLOW"), reason="set KNLATTICE_SLOW=1")


class TestModes:
  def test_aliases(self):
    assert resolve_mode("gamma0") == "gamma_zero"
    assert resolve_mode("neg") == "gamma_eq_minus_alpha_minus_beta"
    assert resolve_mode("dz") == "dz"

  def test_unknown_mode(self):
    with pytest.raises(InputError):
      resolve_mode("imaginary")

  def test_n_out_of_range(self):
    with pytest.raises(InputError):
      scan_positivity(6)
    with pytest.raises(InputError):
      scan_positivity(0)


class TestScan:
  @pytest.mark.parametrize("mode", ["symbolic", "gamma_zero", "gamma_eq_minus_alpha_minus_beta", "dz"])
  def test_s3_is_nonnegative(self, mode):
    report = scan_positivity(3, mode)
    assert report.passed
    assert report.cases_checked == 6
    assert report.details["all_nonneg"]
    assert all(e["oracles_agree"] for e in report.details["permutations"])

  def test_dz_records_value_at_one(self):
    report = scan_positivity(2, "dz")
    values = {tuple(e["w"]): e["value_at_one"] for e in report.details["permutations"]}
    assert values[(2, 1)] == 3
    assert values[(1, 2)] == 1

  def test_worker_pool_matches_serial(self):
    serial = scan_positivity(3, "gamma_zero")
    pooled = scan_positivity(3, "gamma_zero", workers=2)
    assert pooled.details["permutations"] == serial.details["permutations"]

  def test_lattice_mismatch_raises(self, monkeypatch):
    monkeypatch.setattr(analysis, "partition_function",
                        lambda boundary, params=None: Polynomial.zero(VarContext(boundary.n)))
    with pytest.raises(ConsistencyError):
      scan_positivity(2)

  @pytest.mark.parametrize("mode,check", [
    ("symbolic", "gamma divisibility"), ("gamma_zero", "gamma zero structure"),
  ])
  def test_state_checks_run_during_scan(self, mode, check):
    report = scan_positivity(3, mode)
    for entry in report.details["permutations"]:
      assert entry["state_check"]["name"] == check
      assert entry["state_check"]["passed"]

  def test_state_check_failure_fails_scan(self, monkeypatch):
    def broken(boundary):
      failing = CheckReport("gamma divisibility")
      failing.fail({"reason": "forced"})
      return failing

    monkeypatch.setitem(analysis.STATE_CHECKS, "symbolic", broken)
    report = scan_positivity(2)
    assert not report.passed
    assert report.failures[0]["check"] == "gamma divisibility"

  def test_no_state_check_without_lattice(self):
    report = scan_positivity(3, "symbolic", with_lattice=False)
    assert all("state_check" not in e for e in report.details["permutations"])

  @SLOW
  def test_s4_gamma_zero(self):
    assert scan_positivity(4, "gamma_zero").details["all_nonneg"]


class TestNegativeWitnesses:
  @pytest.mark.parametrize("n", [2, 3])
  def test_small_groups_have_none(self, n):
    assert negative_witnesses(n) == []

  def test_s4_has_exactly_two(self):
    found = negative_witnesses(4)
    assert {w for w, _ in found} == expected_negative_s4()
    for _, witness in found:
      assert int(witness["coeff"]) < 0

  def test_expected_permutations(self):
    assert expected_negative_s4() == {Permutation((3, 4, 2, 1)), Permutation((4, 3, 1, 2))}


class TestKeys:
  def test_counterexample(self):
    report = key_positivity_counterexample()
    assert report.passed
    assert report.details["inside_staircase"]
    assert report.details["witness"] is not None

  def test_positive_key_fails_the_search(self):
    assert not key_positivity_counterexample(Composition((0, 1))).passed

  @pytest.mark.parametrize("parts,kn_form", [((0, 1), True), ((2, 0, 1), True), ((1, 2, 2, 1), False)])
  def test_lattice_matches_key(self, parts, kn_form):
    report = key_lattice_check(Composition(parts))
    assert report.passed, report.failures
    assert report.details["kn_form_checked"] is kn_form


class TestCrossChecks:
  def test_specializations_s3(self):
    report = specialization_crosschecks(3)
    assert report.passed, report.failures

  def test_specializations_limit(self):
    with pytest.raises(InputError):
      specialization_crosschecks(5)

  def test_dz_value_at_one(self):
    assert dz_value_at_one(dz_polynomial(Permutation((2, 1)))) == 3

  @pytest.mark.parametrize("w", list(all_permutations(3)), ids=str)
  def test_gamma_divides_multicolor_states(self, w):
    report = gamma_divisibility_check(system_for_kn(w, Partition((1, 1, 0))))
    assert report.passed, report.failures

  @pytest.mark.parametrize("w", list(all_permutations(3)), ids=str)
  def test_gamma_zero_structure(self, w):
    report = gamma_zero_structure_check(system_for_kn(w, Partition((1, 0, 0))))
    assert report.passed, report.failures
