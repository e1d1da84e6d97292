"""R-matrix weights and the Yang-Baxter checks (RTT, RRR, degenerate table, train identity)."""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from typing import Iterable

from ddop import ReducedParams, operators
from lattice import PLUS, WeightTable, bit, colors_of, label_json
from log import get_logger
from poly import InvariantViolation, Polynomial, VarContext, exact_div_xdiff, random_polynomial
from report import CheckReport

log = get_logger("ybe")

FAMILIES = ("A1", "A2", "B", "C", "D1", "E1", "D2", "E2")


def r_family(a: int, b: int, c: int, d: int) -> str | None:
  """Family of the R-vertex with corners (SW, NW, NE, SE) = (a, b, c, d); PLUS sorts lowest."""
  if a == b == c == d:
    return "A2" if a == PLUS else "A1"
  if a == b:
    return None
  if a == c and b == d:
    return "B" if a < b else "C"
  if a == d and b == c:
    if a == PLUS:
      return "D2"
    if b == PLUS:
      return "E2"
    return "D1" if a < b else "E1"
  return None


class RTable:
  """R-vertex weights R_{a,b}^{c,d}(x_i, x_j) for one parameter choice."""

  def __init__(self, ctx: VarContext, params: ReducedParams | None = None) -> None:
    self.ctx = ctx
    self.params = params or ReducedParams()
    self.alpha, self.beta, self.gamma = self.params.values(ctx)
    self._cache: dict[tuple[str, int, int], Polynomial] = {}

  def family_weight(self, family: str, i: int, j: int) -> Polynomial:
    key = (family, i, j)
    if key not in self._cache:
      self._cache[key] = self._family_weight(family, i, j)
    return self._cache[key]

  def _family_weight(self, family: str, i: int, j: int) -> Polynomial:
    a, b, g = self.alpha, self.beta, self.gamma
    xi, xj = Polynomial.x(self.ctx, i), Polynomial.x(self.ctx, j)
    prod = (b + g) * (a + g) * xi * xj
    if family == "A1":
      return (a + b + g) * xj + g * xi + 1 + prod
    if family == "A2":
      return (a + b + g) * xi + g * xj + 1 + prod
    if family == "B":
      return xj - xi
    if family == "C":
      return a * b * (xj - xi)
    if family == "D1":
      return (1 + (b + g) * xj) * (1 + (a + g) * xi)
    if family == "E1":
      return (1 + (b + g) * xi) * (1 + (a + g) * xj)
    if family == "D2":
      return (1 + (b + g) * xi) * (1 + (a + g) * xi)
    if family == "E2":
      return (1 + (b + g) * xj) * (1 + (a + g) * xj)
    raise ValueError(f"Unknown R family {family!r}")

  def weight(self, a: int, b: int, c: int, d: int, i: int, j: int) -> Polynomial:
    family = r_family(a, b, c, d)
    if family is None:
      return Polynomial.zero(self.ctx)
    return self.family_weight(family, i, j)

  @staticmethod
  def outputs(a: int, b: int) -> list[tuple[int, int]]:
    """Label pairs (NE, SE) that can carry nonzero weight for inputs (SW, NW)."""
    if a == b:
      return [(a, b)]
    return [(a, b), (b, a)]


def r_weight(a: int, b: int, c: int, d: int, xi: Polynomial, xj: Polynomial,
             params: ReducedParams | None = None) -> Polynomial:
  if xi.ctx != xj.ctx:
    raise ValueError("Row variables from different contexts")
  ctx = xi.ctx
  rows = {Polynomial.x(ctx, k): k for k in range(1, ctx.n + 1)}
  return RTable(ctx, params).weight(a, b, c, d, rows[xi], rows[xj])


# -- RTT, exhaustive over colours ------------------------------------------------

def _labels(n_colors: int) -> list[int]:
  return [PLUS] + list(range(1, n_colors + 1))


def rtt_sides(a: int, b: int, sigma: int, labels: Iterable[int], table: WeightTable,
              rtab: RTable) -> tuple[dict, dict]:
  """Both partition functions for inputs (a, b, sigma), keyed by (c, d, sigma')."""
  labels = list(labels)
  lhs: dict[tuple[int, int, int], Polynomial] = {}
  rhs: dict[tuple[int, int, int], Polynomial] = {}

  def add(side: dict, key: tuple[int, int, int], value: Polynomial) -> None:
    side[key] = side[key] + value if key in side else value

  for p, q in rtab.outputs(a, b):
    wr = rtab.weight(a, b, p, q, 1, 2)
    if wr.is_zero():
      continue
    for c in labels:
      top = table.vertex(p, sigma, c, 1)
      if top is None:
        continue
      tau, w1 = top
      for d in labels:
        bottom = table.vertex(q, tau, d, 2)
        if bottom is None:
          continue
        add(lhs, (c, d, bottom[0]), wr * w1 * bottom[1])

  for r in labels:
    top = table.vertex(b, sigma, r, 2)
    if top is None:
      continue
    tau, w1 = top
    for s in labels:
      bottom = table.vertex(a, tau, s, 1)
      if bottom is None:
        continue
      sigma2, w2 = bottom
      for c, d in rtab.outputs(s, r):
        wr = rtab.weight(s, r, c, d, 1, 2)
        if not wr.is_zero():
          add(rhs, (c, d, sigma2), w1 * w2 * wr)
  return lhs, rhs


def verify_rtt(n_colors: int, params: ReducedParams | None = None) -> CheckReport:
  """Compare both three-vertex diagrams for every boundary tuple (a, b, S, c, d, S')."""
  if not 1 <= n_colors <= 4:
    raise ValueError(f"n_colors must be in 1..4, got {n_colors}")
  ctx = VarContext(2)
  table = WeightTable(ctx, params)
  rtab = RTable(ctx, params)
  labels = _labels(n_colors)
  subsets = range(1 << n_colors)
  report = CheckReport(f"rtt colors={n_colors}")
  nonzero = 0
  for a, b in itertools.product(labels, repeat=2):
    for sigma in subsets:
      lhs, rhs = rtt_sides(a, b, sigma, labels, table, rtab)
      report.cases_checked += len(labels) ** 2 * len(subsets)
      for key in set(lhs) | set(rhs):
        left = lhs.get(key, table.zero)
        right = rhs.get(key, table.zero)
        if not left.is_zero():
          nonzero += 1
        if left != right:
          c, d, sigma2 = key
          report.fail({
            "a": label_json(a), "b": label_json(b), "sigma": colors_of(sigma),
            "c": label_json(c), "d": label_json(d), "sigma_out": colors_of(sigma2),
            "lhs": str(left), "rhs": str(right),
          })
    log.debug("RTT colors=%d: finished a=%s, b=%s", n_colors, a, b)
  report.details["nonzero_cases"] = nonzero
  return report


# -- RTT, all colour counts at once ---------------------------------------------

MAX_RANKS = 4
_VEC = MAX_RANKS + 1
_ZERO = (0,) * _VEC

# key: (alpha exponent vector, beta exponent vector, sign vector mod 2, alpha offset, beta offset)
SymKey = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], int, int]
SymSum = dict[SymKey, Polynomial]


def _vadd(u: tuple[int, ...], v: tuple[int, ...], mod2: bool = False) -> tuple[int, ...]:
  if mod2:
    return tuple((x + y) % 2 for x, y in zip(u, v))
  return tuple(x + y for x, y in zip(u, v))


def _sym_add(acc: SymSum, other: SymSum) -> None:
  for key, p in other.items():
    acc[key] = acc[key] + p if key in acc else p


def _sym_mul(x: SymSum, y: SymSum) -> SymSum:
  out: SymSum = {}
  for (av, bv, sv, ao, bo), p in x.items():
    for (av2, bv2, sv2, ao2, bo2), q in y.items():
      key = (_vadd(av, av2), _vadd(bv, bv2), _vadd(sv, sv2, True), ao + ao2, bo + bo2)
      prod = p * q
      out[key] = out[key] + prod if key in out else prod
  return out


class GenericWeights:
  """Vertex weights with |S| and |S_{[c+1,n]}| kept symbolic.

  A case fixes k marked colours (ranks 1..k, the colours on horizontal
  boundary edges). Unmarked colours of S only matter through the gap counts
  g_0..g_k, where g_t counts unmarked colours between ranks t and t+1. Powers
  alpha^{g_t}, beta^{g_t} and (-1)^{g_t} are tracked as exponent vectors; h_{u-2}
  with u = sum g_t is the auxiliary symbol H, and every other h is expanded by
  h_m = alpha h_{m-1} + beta^m.
  """

  def __init__(self, k: int) -> None:
    self.k = k
    self.ctx = VarContext(2, ("H",))
    self.alpha, self.beta, self.gamma = Polynomial.params(self.ctx)
    self.H = Polynomial.var(self.ctx, "H")
    self.ones = tuple(1 if t <= k else 0 for t in range(_VEC))
    self._h: dict[int, SymSum] = {-2: self._const(self.H)}
    self._vertex: dict[tuple[int, int, int, int], tuple[int, SymSum] | None] = {}

  @staticmethod
  def _const(p: Polynomial) -> SymSum:
    return {(_ZERO, _ZERO, _ZERO, 0, 0): p}

  def _suffix(self, r: int) -> tuple[int, ...]:
    """Gap vector counting unmarked colours above rank r."""
    return tuple(1 if r <= t <= self.k else 0 for t in range(_VEC))

  def _card(self, mask: int) -> tuple[tuple[int, ...], int]:
    return self.ones, mask.bit_count()

  def _above(self, mask: int, r: int) -> tuple[tuple[int, ...], int]:
    return self._suffix(r), (mask >> r).bit_count()

  def _pow(self, kind: str, exponent: tuple[tuple[int, ...], int]) -> SymSum:
    vec, const = exponent
    one = Polynomial.one(self.ctx)
    coeff = -one if const % 2 and kind in ("-alpha", "-beta", "sign") else one
    if kind == "-alpha":
      return {(vec, _ZERO, tuple(v % 2 for v in vec), const, 0): coeff}
    if kind == "-beta":
      return {(_ZERO, vec, tuple(v % 2 for v in vec), 0, const): coeff}
    if kind == "alphabeta":
      return {(vec, vec, _ZERO, const, const): coeff}
    if kind == "sign":
      return {(_ZERO, _ZERO, tuple(v % 2 for v in vec), 0, 0): coeff}
    raise ValueError(kind)

  def h(self, p: int) -> SymSum:
    """h_{u+p} for p >= -2."""
    if p not in self._h:
      beta_power = {(_ZERO, self.ones, _ZERO, 0, p): Polynomial.one(self.ctx)}
      value = _sym_mul(self._const(self.alpha), self.h(p - 1))
      _sym_add(value, beta_power)
      self._h[p] = value
    return self._h[p]

  def _row_terms(self, row: int) -> tuple[Polynomial, ...]:
    a, b, g = self.alpha, self.beta, self.gamma
    x = Polynomial.x(self.ctx, row)
    return x, 1 + (a + g) * x, 1 + (b + g) * x, 1 + (a + b + g) * x, (a + g) * (b + g) * x + g

  def vertex(self, west: int, north: int, east: int, row: int) -> tuple[int, SymSum] | None:
    key = (west, north, east, row)
    if key not in self._vertex:
      self._vertex[key] = self._vertex_uncached(west, north, east, row)
    return self._vertex[key]

  def _vertex_uncached(self, west: int, north: int, east: int, row: int) -> tuple[int, SymSum] | None:
    x, x_ag, x_bg, x_abg, lead = self._row_terms(row)
    q = north.bit_count()
    has = lambda s, c: bool(s >> (c - 1) & 1)
    if west == PLUS and east == PLUS:
      body = _sym_mul(self._const(lead), self.h(q - 1))
      _sym_add(body, _sym_mul(self._const(self.alpha * self.beta), self.h(q - 2)))
      vec, const = self._card(north)
      return north, _sym_mul(self._pow("sign", (vec, const + 1)), body)
    if west == east:
      c = west
      base = x_abg if has(north, c) else x
      return north, _sym_mul(self._const(base), self._pow("alphabeta", self._above(north, c)))
    if west == PLUS:
      c = east
      if has(north, c):
        return None
      return north | bit(c), _sym_mul(self._const(x_ag * x_bg), self._pow("-alpha", self._above(north, c)))
    if east == PLUS:
      c = west
      if not has(north, c):
        return None
      body = _sym_mul(self._const(self.alpha * self.beta), self.h(q - 3))
      _sym_add(body, _sym_mul(self._const(self.gamma), self.h(q - 2)))
      weight = _sym_mul(self._pow("sign", self._card(north)), self._pow("-beta", self._above(north, c)))
      return north & ~bit(c), _sym_mul(weight, body)
    if west < east:
      c, d = west, east
      if not has(north, c) or has(north, d):
        return None
      south = (north | bit(d)) & ~bit(c)
      weight = _sym_mul(self._pow("-alpha", self._above(north, d)), self._pow("-beta", self._above(north, c)))
      return south, _sym_mul(weight, self._const(x_ag))
    d, c = west, east
    if not has(north, d) or has(north, c):
      return None
    south = (north | bit(c)) & ~bit(d)
    weight = _sym_mul(self._pow("-alpha", self._above(south, c)), self._pow("-beta", self._above(north, d)))
    return south, _sym_mul(weight, self._const(x_bg))


def _normalize(lhs: SymSum, rhs: SymSum, ctx: VarContext) -> dict[tuple, tuple[Polynomial, Polynomial]]:
  """Cancel the shared alpha/beta offset per exponent-vector group; returns both residuals."""
  groups: dict[tuple, list[tuple[int, int, int, Polynomial]]] = defaultdict(list)
  for side, terms in ((0, lhs), (1, rhs)):
    for (av, bv, sv, ao, bo), p in terms.items():
      groups[(av, bv, sv)].append((side, ao, bo, p))
  alpha, beta, _ = Polynomial.params(ctx)
  out = {}
  for key, entries in groups.items():
    amin = min(e[1] for e in entries)
    bmin = min(e[2] for e in entries)
    sides = [Polynomial.zero(ctx), Polynomial.zero(ctx)]
    for side, ao, bo, p in entries:
      sides[side] = sides[side] + p * alpha ** (ao - amin) * beta ** (bo - bmin)
    out[key] = (sides[0], sides[1])
  return out


def generic_case(a: int, b: int, c: int, d: int, sigma: int,
                 weights: GenericWeights | None = None) -> dict[int, dict[tuple, tuple[Polynomial, Polynomial]]]:
  """Normalized (lhs, rhs) residuals per output mask S' for one boundary case class."""
  k = max(a, b, c, d)
  weights = weights or GenericWeights(k)
  rtab = RTable(weights.ctx)
  labels = [PLUS] + list(range(1, k + 1))
  lhs: dict[int, SymSum] = defaultdict(dict)
  rhs: dict[int, SymSum] = defaultdict(dict)

  for p, q in rtab.outputs(a, b):
    wr = rtab.weight(a, b, p, q, 1, 2)
    if wr.is_zero():
      continue
    top = weights.vertex(p, sigma, c, 1)
    if top is None:
      continue
    bottom = weights.vertex(q, top[0], d, 2)
    if bottom is None:
      continue
    _sym_add(lhs[bottom[0]], _sym_mul(_sym_mul(weights._const(wr), top[1]), bottom[1]))

  for r in labels:
    top = weights.vertex(b, sigma, r, 2)
    if top is None:
      continue
    for s in labels:
      wr = rtab.weight(s, r, c, d, 1, 2)
      if wr.is_zero():
        continue
      bottom = weights.vertex(a, top[0], s, 1)
      if bottom is None:
        continue
      _sym_add(rhs[bottom[0]], _sym_mul(_sym_mul(top[1], bottom[1]), weights._const(wr)))

  return {
    out: _normalize(lhs.get(out, {}), rhs.get(out, {}), weights.ctx)
    for out in set(lhs) | set(rhs)
  }


def case_classes() -> Iterable[tuple[int, int, int, int]]:
  """(a, b, c, d) patterns whose colours are exactly the ranks 1..k."""
  for labels in itertools.product(range(MAX_RANKS + 1), repeat=4):
    used = {x for x in labels if x != PLUS}
    if used == set(range(1, len(used) + 1)):
      yield labels


def verify_rtt_generic() -> CheckReport:
  report = CheckReport("rtt generic")
  weights_by_k = {k: GenericWeights(k) for k in range(MAX_RANKS + 1)}
  classes = 0
  for a, b, c, d in case_classes():
    classes += 1
    k = max(a, b, c, d)
    for sigma in range(1 << k):
      for out, groups in generic_case(a, b, c, d, sigma, weights_by_k[k]).items():
        for key, (left, right) in groups.items():
          report.cases_checked += 1
          if left != right:
            report.fail({
              "a": label_json(a), "b": label_json(b), "c": label_json(c), "d": label_json(d),
              "sigma_marked": colors_of(sigma), "sigma_out_marked": colors_of(out),
              "group": [list(v) for v in key], "lhs": str(left), "rhs": str(right),
            })
  report.details["case_classes"] = classes
  log.info("Generic RTT: %d case classes, %d comparisons, %d failures",
           classes, report.cases_checked, len(report.failures))
  return report


# -- RRR ---------------------------------------------------------------------------

RRR_COLORS = 3


def _apply_r(vec: dict[tuple[int, ...], Polynomial], rtab: RTable, p: int, q: int,
             rows: tuple[int, int]) -> dict[tuple[int, ...], Polynomial]:
  out: dict[tuple[int, ...], Polynomial] = {}
  for basis, coeff in vec.items():
    a, b = basis[p], basis[q]
    for c, d in rtab.outputs(a, b):
      w = rtab.weight(a, b, c, d, *rows)
      if w.is_zero():
        continue
      nb = list(basis)
      nb[p], nb[q] = c, d
      nb = tuple(nb)
      term = coeff * w
      out[nb] = out[nb] + term if nb in out else term
  return {k: v for k, v in out.items() if not v.is_zero()}


def verify_rrr(params: ReducedParams | None = None) -> CheckReport:
  """R12 R13 R23 = R23 R13 R12 on (C^4)^{(x)3}, entry by entry."""
  ctx = VarContext(3)
  rtab = RTable(ctx, params)
  labels = _labels(RRR_COLORS)
  r12 = (0, 1, (1, 2))
  r13 = (0, 2, (1, 3))
  r23 = (1, 2, (2, 3))
  basis = list(itertools.product(labels, repeat=3))
  report = CheckReport("rrr")
  zero = Polynomial.zero(ctx)
  for column in basis:
    left = {column: Polynomial.one(ctx)}
    for p, q, rows in (r23, r13, r12):
      left = _apply_r(left, rtab, p, q, rows)
    right = {column: Polynomial.one(ctx)}
    for p, q, rows in (r12, r13, r23):
      right = _apply_r(right, rtab, p, q, rows)
    for row in basis:
      report.cases_checked += 1
      lv, rv = left.get(row, zero), right.get(row, zero)
      if lv != rv:
        report.fail({
          "row": [label_json(x) for x in row], "column": [label_json(x) for x in column],
          "lhs": str(lv), "rhs": str(rv),
        })
  return report


# -- degenerate table ------------------------------------------------------------

def degenerate_matrix(rtab: RTable) -> list[list[Polynomial]]:
  """4x4 matrix M[(a,b)][(c,d)] = R_{a,b}^{c,d} for one colour, basis (+,+), (+,1), (1,+), (1,1)."""
  basis = [(PLUS, PLUS), (PLUS, 1), (1, PLUS), (1, 1)]
  return [[rtab.weight(a, b, c, d, 1, 2) for c, d in basis] for a, b in basis]


def degenerate_r_check() -> CheckReport:
  ctx = VarContext(2)
  rtab = RTable(ctx, ReducedParams(alpha=0, gamma=0))
  _, beta, _ = Polynomial.params(ctx)
  xi, xj = Polynomial.x(ctx, 1), Polynomial.x(ctx, 2)
  zero = Polynomial.zero(ctx)
  report = CheckReport("degenerate")

  fam = {f: rtab.family_weight(f, 1, 2) for f in FAMILIES}
  expected = {
    "A1": 1 + beta * xj, "A2": 1 + beta * xi, "B": xj - xi, "C": zero,
    "D1": 1 + beta * xj, "E2": 1 + beta * xj, "E1": 1 + beta * xi, "D2": 1 + beta * xi,
  }
  for name, value in expected.items():
    report.cases_checked += 1
    if fam[name] != value:
      report.fail({"family": name, "got": str(fam[name]), "expected": str(value)})

  printed = [
    [1 + beta * xi, zero, zero, zero],
    [zero, xj - xi, 1 + beta * xi, zero],
    [zero, 1 + beta * xj, zero, zero],
    [zero, zero, zero, 1 + beta * xj],
  ]
  matrix = degenerate_matrix(rtab)
  for r in range(4):
    for c in range(4):
      report.cases_checked += 1
      if matrix[r][c] != printed[r][c]:
        report.fail({"entry": [r + 1, c + 1], "got": str(matrix[r][c]), "expected": str(printed[r][c])})
  return report


# -- train argument ------------------------------------------------------------------

def train_step(f: Polynomial, i: int) -> Polynomial:
  """(A2 f^{s_i} - D1 f) / (x_{i+1} - x_i) with x_j = x_{i+1}."""
  rtab = RTable(f.ctx)
  a2 = rtab.family_weight("A2", i, i + 1)
  d1 = rtab.family_weight("D1", i, i + 1)
  return exact_div_xdiff(a2 * f.swap(i) - d1 * f, i)


def train_recursion_identity(i: int, n: int, samples: int, rng: random.Random,
                             extra: Iterable[Polynomial] = ()) -> CheckReport:
  if not 1 <= i <= n - 1:
    raise IndexError(f"Row index {i} out of range for n={n}")
  ctx = VarContext(n)
  ops = operators(ReducedParams(), ctx)
  report = CheckReport(f"train i={i} n={n}")
  candidates = [Polynomial.one(ctx)] + [p.embed(ctx) for p in extra]
  candidates += [random_polynomial(ctx, rng) for _ in range(samples)]
  for f in candidates:
    report.cases_checked += 1
    try:
      left = train_step(f, i)
    except InvariantViolation as e:
      report.fail({"f": f.to_json(), "error": str(e)})
      continue
    if left != ops.apply(i, f):
      report.fail({"f": f.to_json()})
  return report
