"""Divided-difference operators T_i^{(a,b,c,h,e)} and the polynomial families they generate."""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from typing import Any, Sequence, Union

from log import get_logger
from poly import (
  Polynomial, VarContext, divided_difference, random_polynomial,
)
from report import CheckReport
from weyl import (
  Composition, Partition, Permutation, longest_element, pad_partition,
  reduced_word, rho, sort_composition,
)

log = get_logger("ddop")

# Parameters only ever involve alpha, beta, gamma, so they live in the smallest context
PARAM_CTX = VarContext(1)

ParamValue = Union[int, Polynomial]


class ParameterError(ValueError):
  """Operator parameters that do not satisfy the braid relation."""


def _param_symbols() -> tuple[Polynomial, Polynomial, Polynomial]:
  return Polynomial.params(PARAM_CTX)


def _lift(value: ParamValue, ctx: VarContext) -> Polynomial:
  if isinstance(value, Polynomial):
    return value.embed(ctx)
  return Polynomial.constant(ctx, value)


def _param_json(value: ParamValue | None) -> Any:
  if value is None:
    return "symbolic"
  if isinstance(value, Polynomial):
    return value.to_json()
  return str(value)


@dataclass(frozen=True)
class GeneralParams:
  """T_i = a + (b x_i + c x_{i+1} + h + e x_i x_{i+1}) d_i."""
  a: ParamValue = 0
  b: ParamValue = 0
  c: ParamValue = 0
  h: ParamValue = 1
  e: ParamValue = 0

  def at(self, ctx: VarContext) -> tuple[Polynomial, ...]:
    return tuple(_lift(v, ctx) for v in (self.a, self.b, self.c, self.h, self.e))

  def to_json(self) -> dict[str, Any]:
    return {k: _param_json(getattr(self, k)) for k in "abche"}


@dataclass(frozen=True)
class ReducedParams:
  """The (beta, alpha, gamma) family; ``None`` keeps a parameter symbolic."""
  alpha: ParamValue | None = None
  beta: ParamValue | None = None
  gamma: ParamValue | None = None

  @property
  def mode(self) -> str:
    if self.alpha is None and self.beta is None and self.gamma is None:
      return "symbolic"
    return "specialized"

  def values(self, ctx: VarContext) -> tuple[Polynomial, Polynomial, Polynomial]:
    symbols = Polynomial.params(ctx)
    return tuple(
      sym if v is None else _lift(v, ctx)
      for sym, v in zip(symbols, (self.alpha, self.beta, self.gamma))
    )

  def general(self) -> GeneralParams:
    alpha, beta, gamma = self.values(PARAM_CTX)
    return GeneralParams(
      a=-beta,
      b=alpha + beta + gamma,
      c=gamma,
      h=1,
      e=(alpha + gamma) * (beta + gamma),
    )

  def to_json(self) -> dict[str, Any]:
    return {k: _param_json(getattr(self, k)) for k in ("alpha", "beta", "gamma")}

  # -- named specializations ------------------------------------------------

  @classmethod
  def symbolic(cls) -> ReducedParams:
    return cls()

  @classmethod
  def hecke_grothendieck(cls) -> ReducedParams:
    return cls(gamma=0)

  @classmethod
  def dz(cls) -> ReducedParams:
    return cls(alpha=1, beta=1, gamma=0)

  @classmethod
  def schubert(cls) -> ReducedParams:
    return cls(alpha=0, beta=0, gamma=0)

  @classmethod
  def grothendieck(cls) -> ReducedParams:
    return cls(alpha=0, gamma=0)

  @classmethod
  def sign_changed(cls) -> ReducedParams:
    """(beta, alpha, gamma) -> (-beta, -alpha, alpha + beta)."""
    alpha, beta, _ = _param_symbols()
    return cls(alpha=-alpha, beta=-beta, gamma=alpha + beta)


def general_presets() -> dict[str, GeneralParams]:
  _, beta, _ = _param_symbols()
  return {
    "schubert": GeneralParams(0, 0, 0, 1, 0),
    "grothendieck": GeneralParams(-beta, beta, 0, 1, 0),
    "dual_grothendieck": GeneralParams(0, beta, 0, 1, 0),
    "demazure": GeneralParams(1, 0, 1, 0, 0),
    "demazure_atom": GeneralParams(0, 0, 1, 0, 0),
    "key_grothendieck": GeneralParams(1, 0, 1, 0, beta),
    "reduced_key_grothendieck": GeneralParams(0, 0, 1, 0, beta),
  }


def as_general(params: GeneralParams | ReducedParams) -> GeneralParams:
  if isinstance(params, ReducedParams):
    return params.general()
  return params


def braid_condition(p: GeneralParams) -> Polynomial:
  """(a+b)(a-c) + he; zero exactly when the T_i satisfy the braid relation."""
  a, b, c, h, e = p.at(PARAM_CTX)
  return (a + b) * (a - c) + h * e


def require_braiding(p: GeneralParams) -> None:
  defect = braid_condition(p)
  if not defect.is_zero():
    raise ParameterError(f"Parameters do not braid: (a+b)(a-c)+he = {defect}")


class HeckeOperators:
  """T_1..T_{n-1} for one parameter choice, bound to one context."""

  def __init__(self, params: GeneralParams, ctx: VarContext) -> None:
    self.params = params
    self.ctx = ctx
    a, b, c, h, e = params.at(ctx)
    self._a = a
    self._coeffs = {}
    for i in range(1, ctx.n):
      xi, xj = Polynomial.x(ctx, i), Polynomial.x(ctx, i + 1)
      self._coeffs[i] = b * xi + c * xj + h + e * xi * xj

  def apply(self, i: int, f: Polynomial) -> Polynomial:
    if i not in self._coeffs:
      raise IndexError(f"T_{i} out of range for n={self.ctx.n}")
    dd = divided_difference(f, i)
    if self._a.is_zero():
      return self._coeffs[i] * dd
    return self._a * f + self._coeffs[i] * dd

  def apply_word(self, word: Sequence[int], f: Polynomial) -> Polynomial:
    """T_{i1} ... T_{il} f, rightmost operator first."""
    for i in reversed(word):
      f = self.apply(i, f)
    return f


@functools.lru_cache(maxsize=128)
def operators(params: GeneralParams | ReducedParams, ctx: VarContext) -> HeckeOperators:
  return HeckeOperators(as_general(params), ctx)


def apply_T_general(p: GeneralParams | ReducedParams, i: int, f: Polynomial) -> Polynomial:
  return operators(p, f.ctx).apply(i, f)


def apply_T_word(p: GeneralParams | ReducedParams, word: Sequence[int],
                 f: Polynomial) -> Polynomial:
  return operators(p, f.ctx).apply_word(word, f)


def kn_exponents(lam: Partition) -> tuple[int, ...]:
  """d_i = lambda_1 - lambda_{n+1-i} + n - i."""
  n = lam.n
  return tuple(lam[0] - lam[n - i] + n - i for i in range(1, n + 1))


def kirillov_seed(lam: Partition) -> Polynomial:
  return Polynomial.x_monomial(VarContext(lam.n), kn_exponents(lam))


def kirillov_poly(w: Permutation, lam: Partition,
                  params: ReducedParams | None = None,
                  word: Sequence[int] | None = None) -> Polynomial:
  """KN_w(x; lambda) for the canonical reduced word of w, or an explicit one."""
  params = params or ReducedParams()
  lam = pad_partition(lam, w.n)
  if word is None:
    word = reduced_word(w)
  return apply_T_word(params, word, kirillov_seed(lam))


def kirillov_family(n: int, lam: Partition,
                    params: ReducedParams | None = None) -> dict[Permutation, Polynomial]:
  """KN_w for every w in S_n, walking weak order with KN_{s_i w} = T_i KN_w."""
  params = params or ReducedParams()
  lam = pad_partition(lam, n)
  ops = operators(params, VarContext(n))
  start = Permutation(tuple(range(1, n + 1)))
  family = {start: kirillov_seed(lam)}
  frontier = [start]
  length = 0
  while frontier:
    nxt = []
    for w in frontier:
      inv = w.inverse().oneline
      for i in range(1, n):
        if inv[i - 1] < inv[i]:
          u = w.left_multiply(i)
          if u not in family:
            family[u] = ops.apply(i, family[w])
            nxt.append(u)
    frontier = nxt
    length += 1
    log.debug("KN family n=%d: length %d done, %d polynomials", n, length, len(family))
  return family


def generalized_schubert(w: Permutation, p: GeneralParams | ReducedParams) -> Polynomial:
  """T_{w^{-1} w0}(x^rho)."""
  p = as_general(p)
  require_braiding(p)
  n = w.n
  word = reduced_word(w.inverse() * longest_element(n))
  return apply_T_word(p, word, Polynomial.x_monomial(VarContext(n), rho(n).parts))


def key_polynomial(zeta: Composition, params: GeneralParams | ReducedParams | None = None) -> Polynomial:
  """T_{v_zeta}(x^{zeta+})."""
  p = as_general(params or ReducedParams())
  require_braiding(p)
  zplus, v = sort_composition(zeta)
  seed = Polynomial.x_monomial(VarContext(zeta.n), zplus.parts)
  return apply_T_word(p, reduced_word(v), seed)


def dz_polynomial(w: Permutation) -> Polynomial:
  return kirillov_poly(w, Partition((0,) * w.n), ReducedParams.dz())


def classical_schubert(w: Permutation) -> Polynomial:
  """Schubert polynomial from x^rho by the descending d_i recursion alone."""
  return _classical_schubert(w.oneline)


@functools.lru_cache(maxsize=1024)
def _classical_schubert(oneline: tuple[int, ...]) -> Polynomial:
  n = len(oneline)
  w = Permutation(oneline)
  if w == longest_element(n):
    return Polynomial.x_monomial(VarContext(n), rho(n).parts)
  i = next(k for k in range(1, n) if oneline[k - 1] < oneline[k])
  return divided_difference(_classical_schubert(w.right_multiply(i).oneline), i)


# -- relation checks ---------------------------------------------------------

def check_hecke(params: ReducedParams, n: int, samples: int,
                rng: random.Random) -> CheckReport:
  """T_i^2 = (alpha - beta) T_i + alpha beta on random polynomials."""
  ctx = VarContext(n)
  ops = operators(params, ctx)
  alpha, beta, _ = params.values(ctx)
  report = CheckReport(f"hecke n={n}")
  for i in range(1, n):
    for _ in range(samples):
      f = random_polynomial(ctx, rng)
      tf = ops.apply(i, f)
      lhs = ops.apply(i, tf)
      rhs = (alpha - beta) * tf + alpha * beta * f
      report.cases_checked += 1
      if lhs != rhs:
        report.fail({"i": i, "f": f.to_json()})
  return report


def check_braid(params: GeneralParams | ReducedParams, n: int, samples: int,
                rng: random.Random) -> CheckReport:
  """T_i T_{i+1} T_i = T_{i+1} T_i T_{i+1} on random polynomials."""
  ctx = VarContext(n)
  ops = operators(params, ctx)
  report = CheckReport(f"braid n={n}")
  for i in range(1, n - 1):
    for _ in range(samples):
      f = random_polynomial(ctx, rng)
      report.cases_checked += 1
      if ops.apply_word([i, i + 1, i], f) != ops.apply_word([i + 1, i, i + 1], f):
        report.fail({"i": i, "f": f.to_json()})
  return report


def find_braid_witness(params: GeneralParams | ReducedParams,
                       max_degree: int = 3) -> Polynomial | None:
  """Smallest monomial in x1, x2, x3 on which the braid relation fails, if any."""
  ctx = VarContext(3)
  ops = operators(params, ctx)
  for degree in range(max_degree + 1):
    for exps in itertools.product(range(degree + 1), repeat=3):
      if sum(exps) != degree:
        continue
      f = Polynomial.x_monomial(ctx, exps)
      if ops.apply_word([1, 2, 1], f) != ops.apply_word([2, 1, 2], f):
        return f
  return None
