"""Acceptance suite: every reproducible number, one report each."""

from __future__ import annotations

import random
from typing import Callable

from analysis import (
  expected_negative_s4, key_positivity_counterexample, scan_positivity, specialization_crosschecks,
)
from ddop import (
  GeneralParams, ReducedParams, check_braid, check_hecke, find_braid_witness,
  general_presets, kirillov_poly, operators,
)
from lattice import (
  WeightTable, boundary_from, count_states, partition_function, seed_closed_form,
  system_for_kn,
)
from log import get_logger
from poly import Polynomial, VarContext
from report import CheckReport
from weyl import (
  Partition, Permutation, all_permutations, all_reduced_words, from_word, identity,
  longest_element, parse_permutation,
)
from ybe import degenerate_r_check, train_recursion_identity, verify_rrr, verify_rtt, verify_rtt_generic

log = get_logger("repro")

AGREEMENT_LAMBDAS = ((), (1,), (1, 1), (2, 1))
WORD_LAMBDAS = ((0, 0, 0, 0), (1, 0, 0, 0), (2, 1, 0, 0))


def worked_example_poly() -> Polynomial:
  """x1^3 + (a+g) x1^3 x2 + g x1^3 x3 + (a+g)(b+g) x1^3 x2 x3."""
  ctx = VarContext(3)
  alpha, beta, gamma = Polynomial.params(ctx)
  x1, x2, x3 = (Polynomial.x(ctx, i) for i in (1, 2, 3))
  return x1 ** 3 * (1 + (alpha + gamma) * x2 + gamma * x3 + (alpha + gamma) * (beta + gamma) * x2 * x3)


def worked_example() -> CheckReport:
  report = CheckReport("worked example")
  w = parse_permutation("(2,3)", 3)
  lam = Partition((1, 1, 0))
  expected = worked_example_poly()
  boundary = system_for_kn(w, lam)
  checks = {
    "operators": kirillov_poly(w, lam) == expected,
    "lattice": partition_function(boundary) == expected,
    "two states": count_states(boundary) == 2,
  }
  for name, ok in checks.items():
    report.cases_checked += 1
    if not ok:
      report.fail({"check": name})
  return report


def three_state_example() -> CheckReport:
  report = CheckReport("three states")
  boundary = boundary_from(from_word([1, 2], 3), from_word([2], 3), Partition((3, 1, 1)), 6)
  count = count_states(boundary)
  report.cases_checked = 1
  report.details["states"] = count
  if count != 3:
    report.fail({"states": count})
  return report


def oracle_agreement(sizes: tuple[int, ...]) -> CheckReport:
  report = CheckReport(f"oracle agreement n={list(sizes)}")
  for n in sizes:
    for parts in AGREEMENT_LAMBDAS:
      if len(parts) > n:
        continue
      lam = Partition(parts + (0,) * (n - len(parts)))
      for w in all_permutations(n):
        report.cases_checked += 1
        if partition_function(system_for_kn(w, lam)) != kirillov_poly(w, lam):
          report.fail({"w": list(w.oneline), "lambda": list(lam.parts)})
    log.info("Oracle agreement: n=%d done", n)
  return report


def random_partition(rng: random.Random, n: int, max_part: int = 3) -> Partition:
  return Partition(tuple(sorted((rng.randint(0, max_part) for _ in range(n)), reverse=True)))


def seed_identity(rng: random.Random, samples: int = 50) -> CheckReport:
  report = CheckReport("seed closed form")
  for _ in range(samples):
    n = rng.randint(1, 4)
    mu = random_partition(rng, n)
    N = mu[0] + rng.randint(0, 3)
    boundary = boundary_from(identity(n), longest_element(n), mu, N)
    report.cases_checked += 1
    if partition_function(boundary) != seed_closed_form(mu, N, n):
      report.fail({"mu": list(mu.parts), "N": N})
  return report


def lattice_recursion(rng: random.Random, samples: int = 10,
                      sizes: tuple[int, ...] = (3, 4)) -> CheckReport:
  """Z(s_i w) = T_i Z(w) for random w, mu and N >= mu_1 whenever s_i w is longer."""
  report = CheckReport("lattice recursion")
  for n in sizes:
    ops = operators(ReducedParams(), VarContext(n))
    w0 = longest_element(n)
    perms = list(all_permutations(n))
    for _ in range(samples):
      mu = random_partition(rng, n)
      N = mu[0] + rng.randint(0, 2)
      w = rng.choice(perms)
      base = partition_function(boundary_from(w, w0, mu, N))
      inv = w.inverse().oneline
      for i in range(1, n):
        if inv[i - 1] > inv[i]:
          continue
        report.cases_checked += 1
        up = partition_function(boundary_from(w.left_multiply(i), w0, mu, N))
        if up != ops.apply(i, base):
          report.fail({"w": list(w.oneline), "i": i, "mu": list(mu.parts), "N": N})
  return report


def rtt_suite(slow: bool) -> CheckReport:
  report = CheckReport("rtt")
  for colors in range(1, 5 if slow else 4):
    report.merge(verify_rtt(colors))
  report.merge(verify_rtt_generic())
  return report


def hecke_and_braid(rng: random.Random, samples: int) -> CheckReport:
  report = CheckReport("hecke and braid")
  for n in range(2, 5):
    report.merge(check_hecke(ReducedParams(), n, samples, rng))
  for params in general_presets().values():
    report.merge(check_braid(params, 3, max(samples // 10, 1), rng))
  report.cases_checked += 1
  witness = find_braid_witness(GeneralParams(1, 0, 0, 1, 0))
  if witness is None:
    report.fail({"params": [1, 0, 0, 1, 0], "reason": "no braid violation found"})
  else:
    report.details["braid_witness"] = witness.to_json()
  return report


def train_suite(rng: random.Random, samples: int) -> CheckReport:
  report = CheckReport("train identity")
  for n in range(2, 5):
    for i in range(1, n):
      report.merge(train_recursion_identity(i, n, samples, rng))
  return report


def positivity_suite(workers: int) -> CheckReport:
  report = CheckReport("positivity")
  for mode in ("gamma_zero", "gamma_eq_minus_alpha_minus_beta", "dz"):
    scan = scan_positivity(4, mode, workers)
    report.merge(scan)
    if not scan.details["all_nonneg"]:
      report.fail({"mode": mode, "negative": scan.details["negative"]})
  # the symbolic scan also runs the per-state gamma-divisibility check
  symbolic = scan_positivity(4, "symbolic", workers)
  report.merge(symbolic)
  found = {Permutation(tuple(e["w"])) for e in symbolic.details["negative"]}
  report.cases_checked += 1
  if found != expected_negative_s4():
    report.fail({"mode": "symbolic", "negative": sorted(list(w.oneline) for w in found)})
  report.merge(key_positivity_counterexample())
  return report


def dual_forms() -> CheckReport:
  report = CheckReport("reduced words and dual forms")
  table = WeightTable(VarContext(1))
  for k in range(13):
    report.cases_checked += 1
    if table.dagger(k, 1) != table.dagger_alt(k, 1):
      report.fail({"form": "dagger", "k": k})
  for k in range(1, 13):
    for m in range(k):
      report.cases_checked += 1
      if table.ddagger(k, m) != table.ddagger_alt(k, m):
        report.fail({"form": "ddagger", "k": k, "m": m})
  report.merge(word_independence(4, WORD_LAMBDAS))
  return report


def word_independence(n: int, lambdas: tuple[tuple[int, ...], ...]) -> CheckReport:
  """Every reduced word of every w in S_n gives the same KN_w(x; lambda)."""
  report = CheckReport(f"reduced-word independence n={n}")
  for parts in lambdas:
    lam = Partition(parts)
    for w in all_permutations(n):
      values = {kirillov_poly(w, lam, word=list(word)) for word in all_reduced_words(w)}
      report.cases_checked += 1
      if len(values) != 1:
        report.fail({"w": list(w.oneline), "lambda": list(parts), "distinct_values": len(values)})
  return report


def acceptance_suite(rng: random.Random, samples: int = 100, workers: int = 1,
                     slow: bool = False) -> list[CheckReport]:
  steps: list[tuple[str, Callable[[], CheckReport]]] = [
    ("worked example", worked_example),
    ("three states", three_state_example),
    ("oracle agreement", lambda: oracle_agreement((2, 3, 4) if slow else (2, 3))),
    ("seed closed form", lambda: seed_identity(rng)),
    ("lattice recursion", lambda: lattice_recursion(rng)),
    ("rtt", lambda: rtt_suite(slow)),
    ("rrr", verify_rrr),
    ("degenerate", degenerate_r_check),
    ("hecke and braid", lambda: hecke_and_braid(rng, samples)),
    ("train", lambda: train_suite(rng, samples)),
    ("positivity", lambda: positivity_suite(workers)),
    ("specializations", lambda: specialization_crosschecks(4)),
    ("dual forms", dual_forms),
  ]
  reports = []
  for name, step in steps:
    log.info("Acceptance: running %s", name)
    report = step()
    log.info("Acceptance: %s %s (%d cases)", name, "passed" if report.passed else "FAILED",
             report.cases_checked)
    reports.append(report)
  return reports
