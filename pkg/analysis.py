"""Positivity scans, counterexamples and cross-family consistency checks."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Any

from ddop import (
  ReducedParams, classical_schubert, general_presets, generalized_schubert,
  key_polynomial, kirillov_poly,
)
from lattice import (
  LatticeBoundary, WeightTable, enumerate_states, key_partition, partition_function,
  seed_scalar, system_for_key, system_for_kn,
)
from log import get_logger
from poly import Polynomial, VarContext, divisible_by_var, nonneg_report
from report import CheckReport
from weyl import (
  Composition, InputError, Partition, Permutation, all_permutations, longest_element,
  cycles_to_oneline, parse_cycles, rho,
)

log = get_logger("analysis")

MAX_SCAN_N = 5

MODES = {
  "symbolic": ReducedParams.symbolic,
  "gamma_zero": ReducedParams.hecke_grothendieck,
  "gamma_eq_minus_alpha_minus_beta": ReducedParams.sign_changed,
  "dz": ReducedParams.dz,
}
MODE_ALIASES = {"gamma0": "gamma_zero", "neg": "gamma_eq_minus_alpha_minus_beta"}

# the two S_4 permutations whose symbolic KN polynomials have negative coefficients
NEGATIVE_S4_CYCLES = ("(1,3,2,4)", "(1,4,2,3)")


class ConsistencyError(RuntimeError):
  """The operator and lattice computations of the same polynomial disagree."""


def resolve_mode(mode: str) -> str:
  mode = MODE_ALIASES.get(mode, mode)
  if mode not in MODES:
    raise InputError(f"Unknown scan mode {mode!r}; expected one of {sorted(MODES) + sorted(MODE_ALIASES)}")
  return mode


def _check_n(n: int, limit: int = MAX_SCAN_N) -> None:
  if not 1 <= n <= limit:
    raise InputError(f"n must be in 1..{limit}, got {n}")


def _zero_partition(n: int) -> Partition:
  return Partition((0,) * n)


def _scan_one(oneline: tuple[int, ...], mode: str, with_lattice: bool) -> dict[str, Any]:
  """Worker body; returns plain JSON so results cross process boundaries cheaply."""
  w = Permutation(oneline)
  params = MODES[mode]()
  lam = _zero_partition(w.n)
  kn = kirillov_poly(w, lam, params)
  entry: dict[str, Any] = {
    "w": list(oneline),
    "kn": kn.to_json(),
    "nonneg": nonneg_report(kn).to_json(),
  }
  if with_lattice:
    boundary = system_for_kn(w, lam)
    z = partition_function(boundary, params)
    entry["oracles_agree"] = z == kn
    state_check = STATE_CHECKS.get(mode)
    if state_check is not None:
      checked = state_check(boundary)
      entry["state_check"] = {
        "name": checked.name,
        "passed": checked.passed,
        "cases_checked": checked.cases_checked,
        "failures": checked.failures,
      }
  if mode == "dz":
    entry["value_at_one"] = dz_value_at_one(kn)
  return entry


def dz_value_at_one(f: Polynomial) -> int:
  """Evaluate at x = 1 (the number of terms counted with multiplicity)."""
  value = f.substitute({f"x{k}": 1 for k in range(1, f.ctx.n + 1)})
  return value.coefficient((0,) * f.ctx.nvars)


def scan_positivity(n: int, mode: str = "symbolic", workers: int = 1,
                    with_lattice: bool = True) -> CheckReport:
  """KN_w(x; 0) for every w in S_n under one specialization, both oracles.

  With the lattice oracle on, symbolic scans also check gamma-divisibility of
  every multi-colour state and gamma = 0 scans check the one-colour structure.
  """
  _check_n(n)
  mode = resolve_mode(mode)
  perms = [w.oneline for w in all_permutations(n)]
  log.info("Positivity scan n=%d mode=%s over %d permutations (workers=%d)", n, mode, len(perms), workers)
  if workers > 1 and len(perms) > 1:
    with ProcessPoolExecutor(max_workers=workers) as pool:
      entries = list(pool.map(_scan_one, perms, [mode] * len(perms), [with_lattice] * len(perms)))
  else:
    entries = [_scan_one(p, mode, with_lattice) for p in perms]

  report = CheckReport(f"positivity n={n} mode={mode}")
  negative = []
  for entry in entries:
    report.cases_checked += 1
    if with_lattice and not entry["oracles_agree"]:
      raise ConsistencyError(f"Lattice and operator KN differ for w={entry['w']} in mode {mode}")
    state_check = entry.get("state_check")
    if state_check is not None and not state_check["passed"]:
      report.fail({"w": entry["w"], "check": state_check["name"], "failures": state_check["failures"]})
    if not entry["nonneg"]["all_nonneg"]:
      negative.append({"w": entry["w"], "witness": entry["nonneg"]["witness"]})
  report.details.update({
    "mode": mode,
    "permutations": entries,
    "negative": negative,
    "all_nonneg": not negative,
  })
  return report


def negative_witnesses(n: int, workers: int = 1) -> list[tuple[Permutation, dict[str, Any]]]:
  report = scan_positivity(n, "symbolic", workers, with_lattice=False)
  return [(Permutation(tuple(e["w"])), e["witness"]) for e in report.details["negative"]]


def expected_negative_s4() -> set[Permutation]:
  return {cycles_to_oneline(parse_cycles(c), 4) for c in NEGATIVE_S4_CYCLES}


def key_positivity_counterexample(zeta: Composition = Composition((1, 2, 2, 1))) -> CheckReport:
  """K_zeta with symbolic parameters; passes when a negative coefficient is found."""
  report = CheckReport(f"key positivity {list(zeta.parts)}")
  k = key_polynomial(zeta, ReducedParams())
  nonneg = nonneg_report(k)
  report.cases_checked = 1
  if nonneg.all_nonneg:
    report.fail({"zeta": list(zeta.parts), "reason": "no negative coefficient"})
  staircase = rho(zeta.n).parts
  report.details.update({
    "witness": nonneg.to_json()["witness"],
    "inside_staircase": all(a <= b + 1 for a, b in zip(zeta.parts, staircase)),
    "terms": len(k),
  })
  return report


def specialization_crosschecks(n: int) -> CheckReport:
  """KN against the independent Schubert, Grothendieck and DZ computations for all of S_n."""
  _check_n(n, 4)
  report = CheckReport(f"specializations n={n}")
  w0 = longest_element(n)
  lam = _zero_partition(n)
  groth = general_presets()["grothendieck"]
  specs = {
    "symbolic": ReducedParams.symbolic(),
    "gamma_zero": ReducedParams.hecke_grothendieck(),
    "schubert": ReducedParams.schubert(),
    "grothendieck": ReducedParams.grothendieck(),
    "dz": ReducedParams.dz(),
  }
  for w in all_permutations(n):
    u = w0 * w.inverse()
    kn = {name: kirillov_poly(w, lam, p) for name, p in specs.items()}

    report.cases_checked += 1
    if kn["schubert"] != classical_schubert(u):
      report.fail({"w": list(w.oneline), "check": "schubert"})

    report.cases_checked += 1
    if kn["grothendieck"] != generalized_schubert(u, groth):
      report.fail({"w": list(w.oneline), "check": "grothendieck"})

    report.cases_checked += 1
    dz = kn["dz"]
    if not nonneg_report(dz).all_nonneg or any(dz.uses(k) for k in range(3)):
      report.fail({"w": list(w.oneline), "check": "dz"})

    boundary = system_for_kn(w, lam)
    for name, p in specs.items():
      report.cases_checked += 1
      if partition_function(boundary, p) != kn[name]:
        report.fail({"w": list(w.oneline), "check": f"lattice {name}"})
  return report


def _vertex_weights(state, table: WeightTable) -> list[Polynomial]:
  weights = []
  for r, row in enumerate(state.horizontal, start=1):
    for k in range(len(row) - 1):
      found = table.vertex(row[k], state.vertical[r - 1][k], row[k + 1], r)
      if found is None or found[0] != state.vertical[r][k]:
        raise ConsistencyError(f"State vertex at row {r}, position {k} is not in the weight table")
      weights.append(found[1])
  return weights


def gamma_divisibility_check(boundary: LatticeBoundary) -> CheckReport:
  """Every state with a multi-colour vertical edge has weight divisible by gamma."""
  report = CheckReport("gamma divisibility")
  for state in enumerate_states(boundary):
    if state.max_vertical_colors() < 2:
      continue
    report.cases_checked += 1
    if not divisible_by_var(state.weight, "gamma"):
      report.fail({"state": state.to_json()})
  return report


def gamma_zero_structure_check(boundary: LatticeBoundary) -> CheckReport:
  """At gamma = 0 nonzero states carry one colour per vertical edge and non-negative vertex weights."""
  params = ReducedParams.hecke_grothendieck()
  table = WeightTable(VarContext(boundary.n), params)
  report = CheckReport("gamma zero structure")
  for state in enumerate_states(boundary, params):
    if state.weight.is_zero():
      continue
    report.cases_checked += 1
    if state.max_vertical_colors() > 1:
      report.fail({"state": state.to_json(), "reason": "multi-colour vertical edge"})
      continue
    if not all(nonneg_report(w).all_nonneg for w in _vertex_weights(state, table)):
      report.fail({"state": state.to_json(), "reason": "negative vertex weight"})
  return report


# per-state invariants asserted while scanning, keyed by scan mode
STATE_CHECKS = {
  "symbolic": gamma_divisibility_check,
  "gamma_zero": gamma_zero_structure_check,
}


def key_lattice_check(zeta: Composition, params: ReducedParams | None = None) -> CheckReport:
  """Z(key boundary) = C * K_zeta, plus the KN form when zeta+ has distinct parts."""
  params = params or ReducedParams()
  n = zeta.n
  zplus, mu, v = key_partition(zeta)
  report = CheckReport(f"key lattice {list(zeta.parts)}")
  k = key_polynomial(zeta, params)
  z = partition_function(system_for_key(zeta), params)
  c = seed_scalar(mu, params, n)
  report.cases_checked += 1
  if z != c * k:
    report.fail({"zeta": list(zeta.parts), "check": "Z = C K", "Z": str(z), "CK": str(c * k)})

  shifted = [m - r for m, r in zip(mu.parts, rho(n).parts)]
  if all(a >= b for a, b in zip(shifted, shifted[1:])) and min(shifted, default=0) >= 0:
    lam = Partition(tuple(shifted))
    ctx = VarContext(n)
    factor = Polynomial.x_monomial(ctx, [zplus[n - 1]] * n)
    report.cases_checked += 1
    if k != factor * kirillov_poly(v, lam, params):
      report.fail({"zeta": list(zeta.parts), "check": "K = (x1..xn)^k KN"})
    report.details["kn_form_checked"] = True
  else:
    report.details["kn_form_checked"] = False
  return report
