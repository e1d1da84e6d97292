"""Coloured lattice model: Boltzmann weights, boundaries, states and partition functions.

Horizontal edges carry ``PLUS`` (0) or a colour ``c >= 1``. Vertical edges carry a
set of colours stored as a bit field (bit c-1 for colour c). Columns are indexed
N..0 from left to right; rows 1..n from top to bottom, row i using x_i. Paths
enter at the top, move down and left, and leave through the left edge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Iterator

from ddop import ReducedParams
from log import get_logger
from poly import InvariantViolation, Polynomial, VarContext
from weyl import (
  Composition, InputError, Partition, Permutation, longest_element,
  pad_partition, rho, sort_composition,
)

log = get_logger("lattice")

PLUS = 0
MAX_COLORS = 64

HLabel = int
ColorSet = int


class BoundaryError(InputError):
  """Inconsistent or unsupported boundary data."""


def bit(c: HLabel) -> ColorSet:
  return 1 << (c - 1) if c else 0


def colorset(colors: Iterable[int]) -> ColorSet:
  s = 0
  for c in colors:
    s |= bit(c)
  return s


def colors_of(s: ColorSet) -> list[int]:
  out = []
  c = 1
  while s:
    if s & 1:
      out.append(c)
    s >>= 1
    c += 1
  return out


def has(s: ColorSet, c: int) -> bool:
  return bool(s >> (c - 1) & 1)


def above(s: ColorSet, c: int) -> int:
  """|S_{[c+1,n]}|: number of colours in s larger than c."""
  return (s >> c).bit_count()


def label_json(label: HLabel) -> str | int:
  return "+" if label == PLUS else label


class WeightTable:
  """Vertex weights for one parameter choice, memoized per configuration."""

  def __init__(self, ctx: VarContext, params: ReducedParams | None = None) -> None:
    self.ctx = ctx
    self.params = params or ReducedParams()
    self.alpha, self.beta, self.gamma = self.params.values(ctx)
    self.one = Polynomial.one(ctx)
    self.zero = Polynomial.zero(ctx)
    self._h = [self.one]
    self._powers: dict[tuple[str, int], Polynomial] = {}
    self._rows: dict[int, tuple[Polynomial, ...]] = {}
    self._vertex: dict[tuple[int, int, int, int], tuple[ColorSet, Polynomial] | None] = {}

  # -- scalar building blocks -----------------------------------------------

  def h(self, k: int) -> Polynomial:
    """h_k(alpha, beta); h_{-1} = 0."""
    if k == -1:
      return self.zero
    if k < 0:
      raise ValueError(f"h_{k} is never materialized")
    while len(self._h) <= k:
      j = len(self._h)
      self._h.append(self.alpha * self._h[j - 1] + self._power("beta", j))
    return self._h[k]

  def _power(self, which: str, m: int) -> Polynomial:
    key = (which, m)
    if key not in self._powers:
      base = {
        "beta": self.beta,
        "-alpha": -self.alpha,
        "-beta": -self.beta,
        "alphabeta": self.alpha * self.beta,
      }[which]
      self._powers[key] = base ** m
    return self._powers[key]

  def row_terms(self, row: int) -> tuple[Polynomial, ...]:
    """(x, 1+(a+g)x, 1+(b+g)x, 1+(a+b+g)x, (a+g)(b+g)x+g) for row x_row."""
    if row not in self._rows:
      x = Polynomial.x(self.ctx, row)
      a, b, g = self.alpha, self.beta, self.gamma
      self._rows[row] = (
        x,
        1 + (a + g) * x,
        1 + (b + g) * x,
        1 + (a + b + g) * x,
        (a + g) * (b + g) * x + g,
      )
    return self._rows[row]

  def dagger(self, k: int, row: int) -> Polynomial:
    """(-1)^{k+1}(((a+g)(b+g)x + g) h_{k-1} + ab h_{k-2}); 1 for k = 0."""
    if k < 0:
      raise ValueError(f"dagger needs k >= 0, got {k}")
    if k == 0:
      return self.one
    lead = self.row_terms(row)[4]
    tail = self.alpha * self.beta * self.h(k - 2) if k >= 2 else self.zero
    value = lead * self.h(k - 1) + tail
    return value if k % 2 else -value

  def ddagger(self, k: int, m: int) -> Polynomial:
    """(-1)^k (-b)^m (ab h_{k-3} + g h_{k-2}); (-b)^m for k = 1."""
    if k < 1 or not 0 <= m <= k - 1:
      raise ValueError(f"ddagger needs k >= 1 and 0 <= m < k, got k={k}, m={m}")
    sign_power = self._power("-beta", m)
    if k == 1:
      return sign_power
    tail = self.alpha * self.beta * self.h(k - 3) if k >= 3 else self.zero
    value = sign_power * (tail + self.gamma * self.h(k - 2))
    return value if k % 2 == 0 else -value

  def dagger_alt(self, k: int, row: int) -> Polynomial:
    """Second printed form: (-1)^k (b^k - (b+g) h_{k-1} (1+(a+g)x))."""
    x_ag = self.row_terms(row)[1]
    value = self._power("beta", k) - (self.beta + self.gamma) * self.h(k - 1) * x_ag
    return value if k % 2 == 0 else -value

  def ddagger_alt(self, k: int, m: int) -> Polynomial:
    """Second printed form: (-1)^{k-1} (-b)^m (b^{k-1} - (b+g) h_{k-2})."""
    value = self._power("-beta", m) * (
      self._power("beta", k - 1) - (self.beta + self.gamma) * self.h(k - 2))
    return value if k % 2 == 1 else -value

  # -- vertices -------------------------------------------------------------

  def vertex(self, west: HLabel, north: ColorSet, east: HLabel,
             row: int) -> tuple[ColorSet, Polynomial] | None:
    """South label and weight of an admissible vertex, or None."""
    key = (west, north, east, row)
    if key in self._vertex:
      return self._vertex[key]
    result = self._vertex_uncached(west, north, east, row)
    if result is not None and result[1].is_zero():
      result = None
    self._vertex[key] = result
    return result

  def _vertex_uncached(self, west: HLabel, north: ColorSet, east: HLabel,
                       row: int) -> tuple[ColorSet, Polynomial] | None:
    x, x_ag, x_bg, x_abg, _ = self.row_terms(row)
    if west == PLUS and east == PLUS:
      return north, self.dagger(north.bit_count(), row)
    if west == east:
      c = west
      base = x_abg if has(north, c) else x
      return north, base * self._power("alphabeta", above(north, c))
    if west == PLUS:
      c = east
      if has(north, c):
        return None
      return north | bit(c), self._power("-alpha", above(north, c)) * x_ag * x_bg
    if east == PLUS:
      c = west
      if not has(north, c):
        return None
      return north & ~bit(c), self.ddagger(north.bit_count(), above(north, c))
    if west < east:
      c, d = west, east
      if not has(north, c) or has(north, d):
        return None
      south = (north | bit(d)) & ~bit(c)
      weight = self._power("-alpha", above(north, d)) * self._power("-beta", above(north, c))
      return south, weight * x_ag
    d, c = west, east
    if not has(north, d) or has(north, c):
      return None
    south = (north | bit(c)) & ~bit(d)
    weight = self._power("-alpha", above(south, c)) * self._power("-beta", above(north, d))
    return south, weight * x_bg

  def west_options(self, north: ColorSet, east: HLabel,
                   row: int) -> list[tuple[HLabel, ColorSet, Polynomial]]:
    candidates = [PLUS] + colors_of(north)
    if east != PLUS and east not in candidates:
      candidates.append(east)
    options = []
    for west in candidates:
      result = self.vertex(west, north, east, row)
      if result is not None:
        options.append((west, result[0], result[1]))
    return options


def h_poly(k: int, params: ReducedParams | None = None, n: int = 1) -> Polynomial:
  if k < 0:
    raise ValueError(f"h_poly needs k >= 0, got {k}")
  return WeightTable(VarContext(n), params).h(k)


def dagger(k: int, x: Polynomial, params: ReducedParams | None = None) -> Polynomial:
  return WeightTable(x.ctx, params).dagger(k, _row_of(x))


def ddagger(k: int, m: int, ctx: VarContext | None = None,
            params: ReducedParams | None = None) -> Polynomial:
  return WeightTable(ctx or VarContext(1), params).ddagger(k, m)


def vertex_weight(west: HLabel, north: ColorSet, east: HLabel, x: Polynomial,
                  params: ReducedParams | None = None) -> tuple[ColorSet, Polynomial] | None:
  return WeightTable(x.ctx, params).vertex(west, north, east, _row_of(x))


def west_options(north: ColorSet, east: HLabel, x: Polynomial,
                 params: ReducedParams | None = None) -> list[tuple[HLabel, ColorSet, Polynomial]]:
  return WeightTable(x.ctx, params).west_options(north, east, _row_of(x))


def _row_of(x: Polynomial) -> int:
  ctx = x.ctx
  for row in range(1, ctx.n + 1):
    if x == Polynomial.x(ctx, row):
      return row
  raise ValueError(f"{x} is not a row variable")


def dagger_neg(k: int, x: Polynomial) -> Polynomial:
  """dagger at gamma = -alpha - beta: (-1)^k (h_k - ab h_{k-1} x)."""
  table = WeightTable(x.ctx)
  value = table.h(k) - table.alpha * table.beta * table.h(k - 1) * x
  return value if k % 2 == 0 else -value


def ddagger_neg(k: int, m: int, ctx: VarContext | None = None) -> Polynomial:
  """ddagger at gamma = -alpha - beta: (-1)^{k-1} (-b)^m h_{k-1}."""
  table = WeightTable(ctx or VarContext(1))
  value = (-table.beta) ** m * table.h(k - 1)
  return value if k % 2 == 1 else -value


# -- boundaries ----------------------------------------------------------------

@dataclass(frozen=True)
class LatticeBoundary:
  n: int
  N: int
  left: tuple[HLabel, ...]
  top: tuple[ColorSet, ...]

  def __post_init__(self) -> None:
    if self.n > MAX_COLORS:
      raise BoundaryError(f"At most {MAX_COLORS} colours are supported, got {self.n}")
    if sorted(self.left) != list(range(1, self.n + 1)):
      raise BoundaryError(f"Left labels {list(self.left)} are not a permutation of 1..{self.n}")
    if len(self.top) != self.N + 1:
      raise BoundaryError(f"Expected {self.N + 1} top sets, got {len(self.top)}")
    total = sum(s.bit_count() for s in self.top)
    union = 0
    for s in self.top:
      union |= s
    if total != self.n or union != (1 << self.n) - 1:
      raise BoundaryError("Each colour must enter the top boundary exactly once")

  def exit_row(self) -> dict[int, int]:
    return {c: r for r, c in enumerate(self.left, start=1)}

  def to_json(self) -> dict[str, Any]:
    return {
      "n": self.n,
      "N": self.N,
      "left": list(self.left),
      "top": {str(j): colors_of(s) for j, s in enumerate(self.top) if s},
    }


def boundary_from(w1: Permutation, w2: Permutation, mu: Partition, N: int,
                  n: int | None = None) -> LatticeBoundary:
  n = n or w1.n
  if w1.n != n or w2.n != n:
    raise BoundaryError(f"Permutations must lie in S_{n}")
  mu = pad_partition(mu, n)
  if N < mu[0]:
    raise BoundaryError(f"N={N} is smaller than mu_1={mu[0]}")
  w1_inv = w1.inverse()
  w2_inv = w2.inverse()
  left = tuple(n + 1 - w1_inv(i) for i in range(1, n + 1))
  top = [0] * (N + 1)
  for i in range(1, n + 1):
    top[mu[i - 1]] |= bit(n + 1 - w2_inv(i))
  return LatticeBoundary(n, N, left, tuple(top))


def system_for_kn(w: Permutation, lam: Partition) -> LatticeBoundary:
  n = w.n
  lam = pad_partition(lam, n)
  mu = Partition(tuple(a + b for a, b in zip(lam.parts, rho(n).parts)))
  return boundary_from(w, longest_element(n), mu, lam[0] + n - 1)


def key_partition(zeta: Composition) -> tuple[Partition, Partition, Permutation]:
  """(zeta+, mu, v) with mu_i = zeta+_1 - zeta+_{n+1-i}."""
  zplus, v = sort_composition(zeta)
  n = zeta.n
  mu = Partition(tuple(zplus[0] - zplus[n - i] for i in range(1, n + 1)))
  return zplus, mu, v


def system_for_key(zeta: Composition) -> LatticeBoundary:
  zplus, mu, v = key_partition(zeta)
  return boundary_from(v, longest_element(zeta.n), mu, zplus[0])


# -- states ----------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeState:
  """Edge labels listed left to right; ``vertical[0]`` is the top boundary."""
  boundary: LatticeBoundary
  horizontal: tuple[tuple[HLabel, ...], ...]
  vertical: tuple[tuple[ColorSet, ...], ...]
  weight: Polynomial

  def max_vertical_colors(self) -> int:
    return max(s.bit_count() for row in self.vertical for s in row)

  def to_json(self) -> dict[str, Any]:
    return {
      "horizontal": [[label_json(lab) for lab in row] for row in self.horizontal],
      "vertical": [[colors_of(s) for s in row] for row in self.vertical],
      "weight": self.weight.to_json(),
    }


@dataclass(frozen=True)
class _RowConfig:
  south: tuple[ColorSet, ...]
  horizontal: tuple[HLabel, ...]
  weights: tuple[Polynomial, ...]


def _conserves(west: HLabel, north: ColorSet, east: HLabel, south: ColorSet) -> bool:
  return (bit(west) & south) == 0 and (bit(east) & north) == 0 and \
    (bit(west) | south) == (bit(east) | north)


class LatticeModel:
  """Enumerates the admissible states of one boundary, row by row."""

  def __init__(self, boundary: LatticeBoundary, params: ReducedParams | None = None) -> None:
    self.boundary = boundary
    self.table = WeightTable(VarContext(boundary.n), params)
    # colours that must have left the grid by the end of each row
    self._gone = [0] * (boundary.n + 1)
    for r in range(1, boundary.n + 1):
      self._gone[r] = self._gone[r - 1] | bit(boundary.left[r - 1])
    self._row_cache: dict[tuple[int, tuple[ColorSet, ...]], list[_RowConfig]] = {}

  def row_configs(self, row: int, north: tuple[ColorSet, ...]) -> list[_RowConfig]:
    """All admissible fillings of ``row`` under the given north labels (column order 0..N)."""
    key = (row, north)
    if key in self._row_cache:
      return self._row_cache[key]
    target = self.boundary.left[row - 1]
    forbidden = self._gone[row]
    N = self.boundary.N
    found: list[_RowConfig] = []
    south: list[ColorSet] = []
    horiz: list[HLabel] = [PLUS]
    weights: list[Polynomial] = []

    def dfs(j: int, east: HLabel) -> None:
      if j > N:
        if east == target:
          found.append(_RowConfig(tuple(south), tuple(horiz), tuple(weights)))
        return
      for west, s, w in self.table.west_options(north[j], east, row):
        if s & forbidden:
          continue
        if not _conserves(west, north[j], east, s):
          raise InvariantViolation(
            f"Colour conservation broken at row {row}, column {j}: "
            f"{west}, {colors_of(north[j])}, {east} -> {colors_of(s)}")
        south.append(s)
        horiz.append(west)
        weights.append(w)
        dfs(j + 1, west)
        south.pop()
        horiz.pop()
        weights.pop()

    dfs(0, PLUS)
    self._row_cache[key] = found
    return found

  @staticmethod
  def _product(weights: Iterable[Polynomial], one: Polynomial) -> Polynomial:
    total = one
    for w in weights:
      total = total * w
    return total

  def states(self) -> Iterator[LatticeState]:
    b = self.boundary
    one = self.table.one

    def walk(row: int, north: tuple[ColorSet, ...], rows: list[_RowConfig]) -> Iterator[LatticeState]:
      if row > b.n:
        yield self._assemble(rows, one)
        return
      for config in self.row_configs(row, north):
        rows.append(config)
        yield from walk(row + 1, config.south, rows)
        rows.pop()

    yield from walk(1, b.top, [])

  def _assemble(self, rows: list[_RowConfig], one: Polynomial) -> LatticeState:
    b = self.boundary
    # stored right to left by column index; states list edges left to right
    horizontal = tuple(tuple(reversed(cfg.horizontal)) for cfg in rows)
    vertical = (tuple(reversed(b.top)),) + tuple(tuple(reversed(cfg.south)) for cfg in rows)
    weight = self._product((w for cfg in rows for w in cfg.weights), one)
    return LatticeState(b, horizontal, vertical, weight)

  def partition_function(self) -> Polynomial:
    """Row-transfer sum; rows sharing a south interface are merged before the next row."""
    b = self.boundary
    one = self.table.one
    layer = {b.top: one}
    for row in range(1, b.n + 1):
      nxt: dict[tuple[ColorSet, ...], Polynomial] = {}
      for north, acc in layer.items():
        row_sums: dict[tuple[ColorSet, ...], Polynomial] = {}
        for cfg in self.row_configs(row, north):
          w = self._product(cfg.weights, one)
          row_sums[cfg.south] = row_sums[cfg.south] + w if cfg.south in row_sums else w
        for south, w in row_sums.items():
          term = acc * w
          nxt[south] = nxt[south] + term if south in nxt else term
      layer = nxt
      log.debug("Row %d: %d interfaces", row, len(layer))
    return layer.get((0,) * (b.N + 1), self.table.zero)

  def count(self) -> int:
    b = self.boundary
    layer = Counter({b.top: 1})
    for row in range(1, b.n + 1):
      nxt: Counter = Counter()
      for north, k in layer.items():
        for cfg in self.row_configs(row, north):
          nxt[cfg.south] += k
      layer = nxt
    return layer.get((0,) * (b.N + 1), 0)


def enumerate_states(b: LatticeBoundary, params: ReducedParams | None = None) -> Iterator[LatticeState]:
  return LatticeModel(b, params).states()


def partition_function(b: LatticeBoundary, params: ReducedParams | None = None) -> Polynomial:
  return LatticeModel(b, params).partition_function()


def count_states(b: LatticeBoundary, params: ReducedParams | None = None) -> int:
  return LatticeModel(b, params).count()


def validate_state(state: LatticeState) -> None:
  """Re-check boundary agreement and colour conservation of a finished state."""
  b = state.boundary
  if state.vertical[0] != tuple(reversed(b.top)):
    raise InvariantViolation("Top boundary mismatch")
  if any(state.vertical[-1]):
    raise InvariantViolation("Bottom boundary must be empty")
  for r, row in enumerate(state.horizontal, start=1):
    if row[0] != b.left[r - 1] or row[-1] != PLUS:
      raise InvariantViolation(f"Row {r} boundary mismatch")
    for k in range(b.N + 1):
      west, east = row[k], row[k + 1]
      north, south = state.vertical[r - 1][k], state.vertical[r][k]
      if not _conserves(west, north, east, south):
        raise InvariantViolation(f"Colour conservation broken at row {r}, position {k}")


# -- closed forms -----------------------------------------------------------------

def seed_scalar(mu: Partition, params: ReducedParams | None = None, n: int | None = None,
                printed: bool = False) -> Polynomial:
  """Scalar of the unique state of the w1 = id, w2 = w0 boundary.

  Each group of n_i equal parts contributes the product over j = 1..n_i of the
  exit weight ddagger(j, 0) = (-1)^j (ab h_{j-3} + g h_{j-2}). With
  ``printed=True`` the factor is -(ab h_{j-3} + g h_{j-2}) for j >= 2 instead,
  which differs by (-1)^{floor(n_i/2)} per group.
  """
  n = n or mu.n
  table = WeightTable(VarContext(n), params)
  scalar = table.one
  for multiplicity in Counter(mu.parts).values():
    for j in range(1, multiplicity + 1):
      factor = table.ddagger(j, 0)
      if printed and j % 2 == 0:
        factor = -factor
      scalar = scalar * factor
  return scalar


def seed_closed_form(mu: Partition, N: int, n: int | None = None,
                     params: ReducedParams | None = None, printed: bool = False) -> Polynomial:
  n = n or mu.n
  mu = pad_partition(mu, n)
  if N < mu[0]:
    raise BoundaryError(f"N={N} is smaller than mu_1={mu[0]}")
  monomial = Polynomial.x_monomial(VarContext(n), [N - mu[n - i] for i in range(1, n + 1)])
  return seed_scalar(mu, params, n, printed) * monomial
