from __future__ import annotations

import argparse
import csv
import json
import os
import random
import sys
import time
from typing import Any, Callable

from analysis import ConsistencyError, MODE_ALIASES, MODES, resolve_mode, scan_positivity
from cache import CacheStore, cache_key, default_cache_dir
from ddop import (
  GeneralParams, ReducedParams, check_braid, check_hecke, classical_schubert, dz_polynomial,
  find_braid_witness, general_presets, generalized_schubert, key_polynomial, kirillov_poly,
)
from lattice import (
  LatticeModel, boundary_from, system_for_kn, validate_state,
)
from log import get_logger, set_console_level
from poly import InvariantViolation, Polynomial
from report import CheckReport
from repro import acceptance_suite
from weyl import (
  InputError, Permutation, from_word, parse_composition, parse_partition, parse_permutation,
)
from ybe import degenerate_r_check, train_recursion_identity, verify_rrr, verify_rtt, verify_rtt_generic

log = get_logger("main")

VERSION = "1.0.0"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

APP_DIR = os.path.dirname(os.path.abspath(__file__))
CONFIG_PATH = os.path.join(APP_DIR, "config.json")

CACHE_ENV = "KNLATTICE_CACHE_DIR"

CONFIG_VERSION = 1

DEFAULT_CONFIG = {
  "config_version": CONFIG_VERSION,
  "cache_dir": "",
  "use_cache": True,
  "workers": 1,
  "log_level": "INFO",
  "random_seed": 20240229,
  "property_samples": 100,
  "slow_checks": False,
}


def migrate_config(config: dict[str, Any]) -> bool:
  """Fill in missing keys from defaults and bump version. Returns True if changed."""
  version = config.get("config_version", 1)
  changed = False

  for key, default_val in DEFAULT_CONFIG.items():
    if key not in config:
      config[key] = default_val
      log.info("Config migration: added '%s' = %r", key, default_val)
      changed = True

  if version < CONFIG_VERSION:
    config["config_version"] = CONFIG_VERSION
    changed = True
    log.info("Config migrated from v%d to v%d", version, CONFIG_VERSION)

  return changed


def load_config() -> dict[str, Any]:
  if not os.path.exists(CONFIG_PATH):
    log.info("No config found, creating defaults at %s", CONFIG_PATH)
    save_config(DEFAULT_CONFIG)
    return dict(DEFAULT_CONFIG)
  try:
    with open(CONFIG_PATH) as f:
      config = json.load(f)
  except json.JSONDecodeError as e:
    log.error("Corrupted config file, resetting to defaults: %s", e)
    save_config(DEFAULT_CONFIG)
    return dict(DEFAULT_CONFIG)
  except OSError as e:
    log.error("Cannot read config file: %s", e)
    return dict(DEFAULT_CONFIG)

  if migrate_config(config):
    save_config(config)
  return config


def save_config(config: dict[str, Any]) -> None:
  try:
    with open(CONFIG_PATH, "w") as f:
      json.dump(config, f, indent=2)
      f.write("\n")
  except OSError as e:
    log.error("Failed to save config: %s", e)


def resolve_cache_dir(flag: str | None, config: dict[str, Any]) -> str:
  """--cache-dir flag > KNLATTICE_CACHE_DIR > config cache_dir > platform default."""
  return flag or os.environ.get(CACHE_ENV) or config.get("cache_dir") or default_cache_dir()


# -- argument helpers ----------------------------------------------------------

PARAM_MODES = {
  "symbolic": ReducedParams.symbolic,
  "gamma0": ReducedParams.hecke_grothendieck,
  "dz": ReducedParams.dz,
  "schubert": ReducedParams.schubert,
  "grothendieck": ReducedParams.grothendieck,
  "neg": ReducedParams.sign_changed,
}


def _add_param_flags(p: argparse.ArgumentParser) -> None:
  p.add_argument("--params", choices=sorted(PARAM_MODES), default="symbolic",
                 help="Named (beta, alpha, gamma) specialization (default: symbolic).")
  p.add_argument("--alpha", type=int, default=None, help="Integer value for alpha.")
  p.add_argument("--beta", type=int, default=None, help="Integer value for beta.")
  p.add_argument("--gamma", type=int, default=None, help="Integer value for gamma.")


def _params_from(args: argparse.Namespace) -> ReducedParams:
  base = PARAM_MODES[args.params]()
  overrides = {k: getattr(args, k) for k in ("alpha", "beta", "gamma") if getattr(args, k) is not None}
  if not overrides:
    return base
  return ReducedParams(
    alpha=overrides.get("alpha", base.alpha),
    beta=overrides.get("beta", base.beta),
    gamma=overrides.get("gamma", base.gamma),
  )


def _perm(args: argparse.Namespace, text: str) -> Permutation:
  return parse_permutation(text, args.n, args.format)


def _word(text: str | None) -> list[int] | None:
  if text is None:
    return None
  return [int(t) for t in text.replace("s", " ").replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
  parser = argparse.ArgumentParser(
    prog="knlattice",
    description="Exact twisted Kirillov polynomials from divided-difference operators and a coloured lattice model.",
  )
  parser.add_argument("--no-cache", action="store_true", help="Always recompute.")
  parser.add_argument("--cache-dir", default=None, help=f"Cache directory (overrides ${CACHE_ENV}).")
  parser.add_argument("--workers", type=int, default=None, help="Worker processes for scans.")
  parser.add_argument("--out", default=None, help="Write the result to this path (.json or .csv).")
  parser.add_argument("--format", choices=["auto", "oneline", "cycle", "word", "identity"],
                      default="auto", help="Permutation notation for --w/--w1/--w2.")
  verbosity = parser.add_mutually_exclusive_group()
  verbosity.add_argument("--verbose", action="store_true", help="Log DEBUG to stderr.")
  verbosity.add_argument("--quiet", action="store_true", help="Log only errors to stderr.")
  parser.add_argument("--timing", action="store_true", help="Include elapsed_ms in the output.")
  sub = parser.add_subparsers(dest="command", required=True)

  p = sub.add_parser("kn", help="KN_w(x; lambda) via operators.")
  p.add_argument("--n", type=int, default=None)
  p.add_argument("--w", required=True)
  p.add_argument("--lambda", dest="lam", default="")
  p.add_argument("--word", default=None, help="Explicit reduced word, e.g. 's1 s2'.")
  _add_param_flags(p)

  p = sub.add_parser("key", help="Key polynomial T_{v_zeta}(x^{zeta+}).")
  p.add_argument("--zeta", required=True)
  p.add_argument("--preset", default=None, choices=sorted(general_presets()),
                 help="General (a,b,c,h,e) preset instead of the reduced family.")
  _add_param_flags(p)

  p = sub.add_parser("schubert", help="Generalized Schubert polynomial T_{w^-1 w0}(x^rho).")
  p.add_argument("--n", type=int, default=None)
  p.add_argument("--w", required=True)
  p.add_argument("--preset", default="schubert", choices=sorted(general_presets()) + ["classical"])

  p = sub.add_parser("dz", help="KN at alpha = beta = 1, gamma = 0, lambda = 0.")
  p.add_argument("--n", type=int, default=None)
  p.add_argument("--w", required=True)

  p = sub.add_parser("lattice", help="Partition function of an explicit boundary.")
  p.add_argument("--n", type=int, default=None)
  p.add_argument("--w1", required=True)
  p.add_argument("--w2", required=True)
  p.add_argument("--mu", required=True)
  p.add_argument("--N", type=int, required=True)
  p.add_argument("--count-only", action="store_true")
  p.add_argument("--list-states", action="store_true")
  _add_param_flags(p)

  p = sub.add_parser("states", help="List the states of the KN_w(x; lambda) boundary.")
  p.add_argument("--n", type=int, default=None)
  p.add_argument("--w", required=True)
  p.add_argument("--lambda", dest="lam", default="")
  _add_param_flags(p)

  verify = sub.add_parser("verify", help="Yang-Baxter and operator identities.")
  vsub = verify.add_subparsers(dest="check", required=True)
  v = vsub.add_parser("rtt")
  v.add_argument("--colors", type=int, default=3)
  v.add_argument("--generic", action="store_true", help="Run the colour-count independent verifier.")
  vsub.add_parser("rrr")
  vsub.add_parser("degenerate")
  v = vsub.add_parser("train")
  v.add_argument("--n", type=int, default=4)
  v.add_argument("--i", type=int, default=None)
  v.add_argument("--samples", type=int, default=None)
  v = vsub.add_parser("braid")
  v.add_argument("--n", type=int, default=3)
  v.add_argument("--preset", default=None, choices=sorted(general_presets()))
  v.add_argument("--abche", default=None, help="Comma separated integers a,b,c,h,e.")
  v.add_argument("--samples", type=int, default=None)
  v = vsub.add_parser("hecke")
  v.add_argument("--n", type=int, default=4)
  v.add_argument("--samples", type=int, default=None)

  scan = sub.add_parser("scan", help="Positivity scans over S_n.")
  ssub = scan.add_subparsers(dest="scan", required=True)
  s = ssub.add_parser("positivity")
  s.add_argument("--n", type=int, default=4)
  s.add_argument("--mode", default="symbolic", choices=sorted(MODES) + sorted(MODE_ALIASES))

  p = sub.add_parser("repro", help="Run every acceptance check and emit a manifest.")
  p.add_argument("--skip-slow", action="store_true")
  return parser


# -- commands --------------------------------------------------------------------

class Outcome:
  """What a command produced: a result payload, or a report that can fail."""

  def __init__(self, inputs: dict[str, Any], result: Any = None,
               report: CheckReport | dict[str, Any] | None = None, passed: bool = True) -> None:
    self.inputs = inputs
    self.result = result
    self.report = report
    self.passed = passed


def _report_outcome(inputs: dict[str, Any], report: CheckReport) -> Outcome:
  return Outcome(inputs, report=report, passed=report.passed)


class App:
  def __init__(self, args: argparse.Namespace, config: dict[str, Any]) -> None:
    self.args = args
    self.config = config
    self.workers = args.workers if args.workers is not None else int(config.get("workers", 1))
    self.samples = int(config.get("property_samples", 100))
    self.rng = random.Random(config.get("random_seed", 0))
    use_cache = config.get("use_cache", True) and not args.no_cache
    self.cache = CacheStore(resolve_cache_dir(args.cache_dir, config)) if use_cache else None

  def cached(self, command: str, inputs: dict[str, Any], compute: Callable[[], Any]) -> Any:
    if self.cache is None:
      return compute()
    key = cache_key(command, inputs, VERSION)
    try:
      return self.cache.get_or_compute(key, compute)
    except OSError as e:
      log.warning("Cache unavailable (%s), computing directly", e)
      return compute()

  def poly_outcome(self, command: str, inputs: dict[str, Any],
                   compute: Callable[[], Polynomial]) -> Outcome:
    return Outcome(inputs, result=self.cached(command, inputs, lambda: compute().to_json()))

  # individual commands

  def cmd_kn(self) -> Outcome:
    a = self.args
    w = _perm(a, a.w)
    lam = parse_partition(a.lam or "0", w.n)
    params = _params_from(a)
    word = _word(a.word)
    if word is not None and (len(word) != w.length() or from_word(word, w.n) != w):
      raise InputError(f"Word {word} is not a reduced word for {w}")
    inputs = {"w": list(w.oneline), "lambda": list(lam.parts), "params": params.to_json(), "word": word}
    return self.poly_outcome("kn", inputs, lambda: kirillov_poly(w, lam, params, word))

  def cmd_key(self) -> Outcome:
    a = self.args
    zeta = parse_composition(a.zeta)
    params = general_presets()[a.preset] if a.preset else _params_from(a)
    inputs = {"zeta": list(zeta.parts), "params": params.to_json()}
    return self.poly_outcome("key", inputs, lambda: key_polynomial(zeta, params))

  def cmd_schubert(self) -> Outcome:
    a = self.args
    w = _perm(a, a.w)
    inputs = {"w": list(w.oneline), "preset": a.preset}
    if a.preset == "classical":
      return self.poly_outcome("schubert", inputs, lambda: classical_schubert(w))
    preset = general_presets()[a.preset]
    return self.poly_outcome("schubert", inputs, lambda: generalized_schubert(w, preset))

  def cmd_dz(self) -> Outcome:
    w = _perm(self.args, self.args.w)
    return self.poly_outcome("dz", {"w": list(w.oneline)}, lambda: dz_polynomial(w))

  def _lattice_outcome(self, command: str, boundary, inputs: dict[str, Any],
                       list_states: bool, count_only: bool) -> Outcome:
    params = _params_from(self.args)
    inputs = dict(inputs, params=params.to_json())
    model = LatticeModel(boundary, params)
    if count_only:
      return Outcome(inputs, result=self.cached(f"{command}-count", inputs, model.count))
    if list_states:
      states = []
      for state in model.states():
        validate_state(state)
        states.append(state.to_json())
      return Outcome(inputs, result={
        "boundary": boundary.to_json(),
        "count": len(states),
        "states": states,
      })
    return self.poly_outcome(command, inputs, model.partition_function)

  def cmd_lattice(self) -> Outcome:
    a = self.args
    w1, w2 = _perm(a, a.w1), _perm(a, a.w2)
    mu = parse_partition(a.mu, w1.n)
    boundary = boundary_from(w1, w2, mu, a.N)
    inputs = {"w1": list(w1.oneline), "w2": list(w2.oneline), "mu": list(mu.parts), "N": a.N}
    return self._lattice_outcome("lattice", boundary, inputs, a.list_states, a.count_only)

  def cmd_states(self) -> Outcome:
    a = self.args
    w = _perm(a, a.w)
    lam = parse_partition(a.lam or "0", w.n)
    inputs = {"w": list(w.oneline), "lambda": list(lam.parts)}
    return self._lattice_outcome("states", system_for_kn(w, lam), inputs, True, False)

  def cmd_verify(self) -> Outcome:
    a = self.args
    samples = getattr(a, "samples", None) or self.samples
    if a.check == "rtt":
      inputs = {"check": "rtt", "colors": a.colors, "generic": a.generic}
      report = verify_rtt_generic() if a.generic else verify_rtt(a.colors)
      return _report_outcome(inputs, report)
    if a.check == "rrr":
      return _report_outcome({"check": "rrr"}, verify_rrr())
    if a.check == "degenerate":
      return _report_outcome({"check": "degenerate"}, degenerate_r_check())
    if a.check == "train":
      rows = [a.i] if a.i is not None else list(range(1, a.n))
      report = CheckReport(f"train n={a.n}")
      for i in rows:
        report.merge(train_recursion_identity(i, a.n, samples, self.rng))
      return _report_outcome({"check": "train", "n": a.n, "i": a.i, "samples": samples}, report)
    if a.check == "braid":
      if a.abche:
        values = [int(t) for t in a.abche.split(",")]
        if len(values) != 5:
          raise ValueError(f"--abche needs five integers, got {a.abche!r}")
        params = GeneralParams(*values)
      elif a.preset:
        params = general_presets()[a.preset]
      else:
        params = ReducedParams()
      report = check_braid(params, a.n, samples, self.rng)
      if not report.passed:
        witness = find_braid_witness(params)
        report.details["monomial_witness"] = witness.to_json() if witness is not None else None
      inputs = {"check": "braid", "n": a.n, "params": params.to_json(), "samples": samples}
      return _report_outcome(inputs, report)
    report = check_hecke(ReducedParams(), a.n, samples, self.rng)
    return _report_outcome({"check": "hecke", "n": a.n, "samples": samples}, report)

  def cmd_scan(self) -> Outcome:
    a = self.args
    mode = resolve_mode(a.mode)
    report = scan_positivity(a.n, mode, self.workers)
    return Outcome({"scan": "positivity", "n": a.n, "mode": mode}, report=report)

  def cmd_repro(self) -> Outcome:
    slow = bool(self.config.get("slow_checks")) and not self.args.skip_slow
    reports = acceptance_suite(self.rng, self.samples, self.workers, slow)
    manifest = {
      "passed": all(r.passed for r in reports),
      "slow": slow,
      "criteria": [r.to_json() for r in reports],
    }
    return Outcome({"skip_slow": self.args.skip_slow}, report=manifest, passed=manifest["passed"])

  def run(self) -> Outcome:
    return getattr(self, f"cmd_{self.args.command}")()


# -- output ------------------------------------------------------------------------

def envelope(command: str, outcome: Outcome, elapsed_ms: float | None) -> dict[str, Any]:
  data: dict[str, Any] = {"command": command, "inputs": outcome.inputs, "version": VERSION}
  if outcome.report is not None:
    report = outcome.report
    data["report"] = report.to_json() if isinstance(report, CheckReport) else report
  else:
    data["result"] = outcome.result
  if elapsed_ms is not None:
    data["elapsed_ms"] = round(elapsed_ms, 3)
  return data


def _write_csv(path: str, result: dict[str, Any]) -> None:
  """One row per term: coefficient followed by the exponent vector."""
  with open(path, "w", newline="") as f:
    writer = csv.writer(f)
    n = result["n"]
    writer.writerow(["coeff", "alpha", "beta", "gamma"] + [f"x{k}" for k in range(1, n + 1)]
                    + list(result.get("extra", [])))
    for term in result["terms"]:
      writer.writerow([term["coeff"]] + term["exps"])


POLYNOMIAL_COMMANDS = ("kn", "key", "schubert", "dz", "lattice")


def _wants_csv(out: str | None) -> bool:
  return bool(out) and out.lower().endswith(".csv")


def _check_csv_request(args: argparse.Namespace) -> None:
  """CSV holds one polynomial per file; reject it up front for report commands."""
  if not _wants_csv(args.out):
    return
  polynomial = args.command in POLYNOMIAL_COMMANDS and not (
    getattr(args, "count_only", False) or getattr(args, "list_states", False))
  if not polynomial:
    raise InputError(f"--out {args.out} asks for CSV, but '{args.command}' does not produce a polynomial")


def emit(data: dict[str, Any], out: str | None) -> None:
  text = json.dumps(data, indent=2, sort_keys=True) + "\n"
  if out is None:
    sys.stdout.write(text)
    return
  if _wants_csv(out):
    result = data.get("result")
    if not (isinstance(result, dict) and "terms" in result):
      raise InputError(f"CSV output needs a polynomial result, got {sorted(data)}")
    _write_csv(out, result)
  else:
    with open(out, "w") as f:
      f.write(text)
  log.info("Wrote %s", out)


def dispatch(argv: list[str] | None = None) -> int:
  parser = build_parser()
  try:
    args = parser.parse_args(argv)
  except SystemExit as e:
    return EXIT_OK if e.code in (0, None) else EXIT_INPUT

  config = load_config()
  set_console_level(config.get("log_level", "INFO"))
  if args.verbose:
    set_console_level("DEBUG")
  elif args.quiet:
    set_console_level("ERROR")

  start = time.perf_counter()
  try:
    _check_csv_request(args)
    outcome = App(args, config).run()
  except (ConsistencyError, InvariantViolation) as e:
    log.error("Consistency failure: %s", e)
    error = {"command": args.command, "error": str(e), "version": VERSION}
    emit(error, None if _wants_csv(args.out) else args.out)
    return EXIT_FAILED
  except (ValueError, IndexError) as e:
    log.error("Invalid input: %s", e)
    return EXIT_INPUT
  elapsed = (time.perf_counter() - start) * 1000 if args.timing else None

  command = args.command
  if command in ("verify", "scan"):
    command = f"{command} {getattr(args, 'check', None) or args.scan}"
  try:
    emit(envelope(command, outcome, elapsed), args.out)
  except InputError as e:
    log.error("Invalid input: %s", e)
    return EXIT_INPUT
  except OSError as e:
    log.error("Failed to write output: %s", e)
    return EXIT_FAILED
  return EXIT_OK if outcome.passed else EXIT_FAILED


def main() -> int:
  return dispatch(sys.argv[1:])


if __name__ == "__main__":
  sys.exit(main())
