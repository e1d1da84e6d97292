"""Exact sparse polynomials over the integers in alpha, beta, gamma, x1..xn.

Thin immutable wrapper around sympy's sparse ``PolyRing`` elements. The wrapper
pins the variable order, the canonical (graded-lex, descending) term order used
for serialization, and the two primitives the operator and lattice code need:
the variable swap and exact division by ``x_{i+1} - x_i``.
"""

from __future__ import annotations

import functools
import json
import random
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, Union

from sympy.polys.domains import ZZ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as sympy_ring

from log import get_logger

log = get_logger("poly")

PARAM_NAMES = ("alpha", "beta", "gamma")
NUM_PARAMS = len(PARAM_NAMES)


class ContextError(ValueError):
  """Polynomials from different variable contexts were combined."""


class InvariantViolation(ArithmeticError):
  """An exact operation left a remainder; indicates an arithmetic bug."""


@dataclass(frozen=True)
class VarContext:
  """Variable order alpha, beta, gamma, x1..xn, then optional auxiliary symbols."""
  n: int
  extra: tuple[str, ...] = ()

  def __post_init__(self) -> None:
    if self.n < 1:
      raise ContextError(f"VarContext needs n >= 1, got {self.n}")
    if len(set(self.names)) != len(self.names):
      raise ContextError(f"Duplicate variable names in {self.names}")

  @property
  def names(self) -> tuple[str, ...]:
    return PARAM_NAMES + tuple(f"x{k}" for k in range(1, self.n + 1)) + self.extra

  @property
  def nvars(self) -> int:
    return NUM_PARAMS + self.n + len(self.extra)

  def index(self, name: str) -> int:
    try:
      return self.names.index(name)
    except ValueError:
      raise ContextError(f"No variable {name!r} in context {self.names}") from None

  def x_index(self, i: int) -> int:
    """Position of x_i in exponent vectors (1-based row index)."""
    if not 1 <= i <= self.n:
      raise IndexError(f"x{i} out of range for n={self.n}")
    return NUM_PARAMS + i - 1


@functools.lru_cache(maxsize=None)
def _ring_for(ctx: VarContext):
  return sympy_ring(",".join(ctx.names), ZZ, grlex)[0]


Scalar = Union[int, "Polynomial"]


class Polynomial:
  """Immutable polynomial bound to a VarContext."""

  __slots__ = ("_ctx", "_p")

  def __init__(self, ctx: VarContext, element: Any = None) -> None:
    self._ctx = ctx
    self._p = _ring_for(ctx).zero if element is None else element

  # -- constructors ---------------------------------------------------------

  @classmethod
  def zero(cls, ctx: VarContext) -> Polynomial:
    return cls(ctx)

  @classmethod
  def one(cls, ctx: VarContext) -> Polynomial:
    return cls.constant(ctx, 1)

  @classmethod
  def constant(cls, ctx: VarContext, c: int) -> Polynomial:
    return cls(ctx, _ring_for(ctx).ground_new(c))

  @classmethod
  def var(cls, ctx: VarContext, name: str) -> Polynomial:
    return cls(ctx, _ring_for(ctx).gens[ctx.index(name)])

  @classmethod
  def x(cls, ctx: VarContext, i: int) -> Polynomial:
    return cls(ctx, _ring_for(ctx).gens[ctx.x_index(i)])

  @classmethod
  def params(cls, ctx: VarContext) -> tuple[Polynomial, Polynomial, Polynomial]:
    """The generators alpha, beta, gamma."""
    gens = _ring_for(ctx).gens
    return cls(ctx, gens[0]), cls(ctx, gens[1]), cls(ctx, gens[2])

  @classmethod
  def monomial(cls, ctx: VarContext, exps: Iterable[int], coeff: int = 1) -> Polynomial:
    exps = tuple(exps)
    if len(exps) != ctx.nvars:
      raise ContextError(f"Exponent vector of length {len(exps)}, expected {ctx.nvars}")
    if any(e < 0 for e in exps):
      raise ValueError(f"Negative exponent in {exps}")
    return cls.from_terms(ctx, {exps: coeff})

  @classmethod
  def x_monomial(cls, ctx: VarContext, xexps: Iterable[int], coeff: int = 1) -> Polynomial:
    """x^d for d indexed by rows 1..n."""
    xexps = tuple(xexps)
    if len(xexps) != ctx.n:
      raise ContextError(f"x-exponent vector of length {len(xexps)}, expected {ctx.n}")
    pad = (0,) * NUM_PARAMS
    tail = (0,) * len(ctx.extra)
    return cls.monomial(ctx, pad + xexps + tail, coeff)

  @classmethod
  def from_terms(cls, ctx: VarContext, terms: Mapping[tuple[int, ...], int]) -> Polynomial:
    clean = {tuple(m): c for m, c in terms.items() if c}
    return cls(ctx, _ring_for(ctx).from_dict(clean) if clean else None)

  # -- inspection -----------------------------------------------------------

  @property
  def ctx(self) -> VarContext:
    return self._ctx

  def terms(self) -> list[tuple[tuple[int, ...], int]]:
    """Terms in canonical order: graded-lex, largest monomial first."""
    return [(m, int(c)) for m, c in self._p.terms()]

  def __iter__(self) -> Iterator[tuple[tuple[int, ...], int]]:
    return iter(self.terms())

  def __len__(self) -> int:
    return len(self._p)

  def __bool__(self) -> bool:
    return bool(self._p)

  def is_zero(self) -> bool:
    return not self._p

  def coefficient(self, exps: Iterable[int]) -> int:
    return int(self._p.get(tuple(exps), 0))

  def total_degree(self) -> int:
    return max((sum(m) for m in self._p.keys()), default=-1)

  def uses(self, position: int) -> bool:
    return any(m[position] for m in self._p.keys())

  # -- arithmetic -----------------------------------------------------------

  def _coerce(self, other: Scalar) -> Any:
    if isinstance(other, Polynomial):
      if other._ctx != self._ctx:
        raise ContextError(f"Context mismatch: {self._ctx} vs {other._ctx}")
      return other._p
    if isinstance(other, int):
      return _ring_for(self._ctx).ground_new(other)
    return NotImplemented

  def __add__(self, other: Scalar) -> Polynomial:
    o = self._coerce(other)
    if o is NotImplemented:
      return NotImplemented
    return Polynomial(self._ctx, self._p + o)

  __radd__ = __add__

  def __sub__(self, other: Scalar) -> Polynomial:
    o = self._coerce(other)
    if o is NotImplemented:
      return NotImplemented
    return Polynomial(self._ctx, self._p - o)

  def __rsub__(self, other: Scalar) -> Polynomial:
    o = self._coerce(other)
    if o is NotImplemented:
      return NotImplemented
    return Polynomial(self._ctx, o - self._p)

  def __mul__(self, other: Scalar) -> Polynomial:
    o = self._coerce(other)
    if o is NotImplemented:
      return NotImplemented
    return Polynomial(self._ctx, self._p * o)

  __rmul__ = __mul__

  def __neg__(self) -> Polynomial:
    return Polynomial(self._ctx, -self._p)

  def __pow__(self, k: int) -> Polynomial:
    if not isinstance(k, int) or k < 0:
      raise ValueError(f"Only non-negative integer powers, got {k!r}")
    return Polynomial(self._ctx, self._p ** k)

  def __eq__(self, other: object) -> bool:
    if isinstance(other, int):
      return self._p == other
    if not isinstance(other, Polynomial):
      return NotImplemented
    return self._ctx == other._ctx and dict(self._p) == dict(other._p)

  def __hash__(self) -> int:
    # constants compare equal to ints, so they must hash like them
    if self.total_degree() <= 0:
      return hash(self.coefficient((0,) * self._ctx.nvars))
    return hash((self._ctx, frozenset(self._p.items())))

  # -- structural operations ------------------------------------------------

  def swap(self, i: int) -> Polynomial:
    """f^{s_i}: exchange x_i and x_{i+1}."""
    u = self._ctx.x_index(i)
    v = u + 1
    if i + 1 > self._ctx.n:
      raise IndexError(f"swap index {i} needs i+1 <= n={self._ctx.n}")
    swapped = {}
    for m, c in self._p.items():
      m = list(m)
      m[u], m[v] = m[v], m[u]
      swapped[tuple(m)] = c
    return Polynomial.from_terms(self._ctx, swapped)

  def substitute(self, assignment: Mapping[str, Scalar]) -> Polynomial:
    """Simultaneous substitution of named variables by integers or polynomials."""
    if not assignment:
      return self
    ring = _ring_for(self._ctx)
    pairs = []
    for name, value in assignment.items():
      gen = ring.gens[self._ctx.index(name)]
      if isinstance(value, Polynomial):
        value = value.embed(self._ctx)._p
      else:
        value = ring.ground_new(value)
      pairs.append((gen, value))
    return Polynomial(self._ctx, self._p.compose(pairs))

  def embed(self, ctx: VarContext) -> Polynomial:
    """Re-home this polynomial in ``ctx``; every used variable must exist there."""
    if ctx == self._ctx:
      return self
    src = self._ctx.names
    target = {name: k for k, name in enumerate(ctx.names)}
    moved = {}
    for m, c in self._p.items():
      new = [0] * ctx.nvars
      for k, e in enumerate(m):
        if not e:
          continue
        if src[k] not in target:
          raise ContextError(f"Variable {src[k]} does not exist in {ctx.names}")
        new[target[src[k]]] = e
      moved[tuple(new)] = c
    return Polynomial.from_terms(ctx, moved)

  # -- output ---------------------------------------------------------------

  def to_json(self) -> dict[str, Any]:
    data: dict[str, Any] = {
      "n": self._ctx.n,
      "terms": [{"coeff": str(c), "exps": list(m)} for m, c in self.terms()],
    }
    if self._ctx.extra:
      data["extra"] = list(self._ctx.extra)
    return data

  def dumps(self) -> str:
    return canonical_dumps(self.to_json())

  def __str__(self) -> str:
    return str(self._p)

  def __repr__(self) -> str:
    return f"Polynomial(n={self._ctx.n}, {self._p})"


def canonical_dumps(data: Any) -> str:
  """Deterministic JSON text used for output and cache keys."""
  return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def from_json(data: Mapping[str, Any]) -> Polynomial:
  ctx = VarContext(int(data["n"]), tuple(data.get("extra", ())))
  terms = {}
  for term in data["terms"]:
    exps = tuple(int(e) for e in term["exps"])
    if len(exps) != ctx.nvars:
      raise ContextError(f"Term {term} does not fit context {ctx}")
    terms[exps] = int(term["coeff"])
  return Polynomial.from_terms(ctx, terms)


def arith(f: Polynomial, g: Polynomial, op: str) -> Polynomial:
  if f.ctx != g.ctx:
    raise ContextError(f"Context mismatch: {f.ctx} vs {g.ctx}")
  if op == "add":
    return f + g
  if op == "sub":
    return f - g
  if op == "mul":
    return f * g
  raise ValueError(f"Unknown operation {op!r}")


def swap_vars(f: Polynomial, i: int) -> Polynomial:
  return f.swap(i)


def substitute(f: Polynomial, assignment: Mapping[str, Scalar]) -> Polynomial:
  return f.substitute(assignment)


def exact_div_xdiff(g: Polynomial, i: int) -> Polynomial:
  """Divide ``g`` by ``x_{i+1} - x_i`` exactly.

  Synthetic division in x_{i+1} with root x_i, run separately for each
  combination of the remaining exponents. Raises InvariantViolation if the
  remainder is nonzero.
  """
  ctx = g.ctx
  if not 1 <= i <= ctx.n - 1:
    raise IndexError(f"Row index {i} out of range for n={ctx.n}")
  u = ctx.x_index(i)
  v = u + 1

  # rest exponents -> x_{i+1} degree -> x_i degree -> coefficient
  groups: dict[tuple[int, ...], dict[int, dict[int, int]]] = {}
  for m, c in g._p.items():
    rest = m[:u] + (0, 0) + m[v + 1:]
    by_v = groups.setdefault(rest, {})
    by_u = by_v.setdefault(m[v], {})
    by_u[m[u]] = by_u.get(m[u], 0) + int(c)

  quotient: dict[tuple[int, ...], int] = {}
  for rest, by_v in groups.items():
    acc: dict[int, int] = {}
    for k in range(max(by_v), 0, -1):
      step = {d + 1: c for d, c in acc.items()}
      for d, c in by_v.get(k, {}).items():
        step[d] = step.get(d, 0) + c
      acc = {d: c for d, c in step.items() if c}
      for d, c in acc.items():
        m = list(rest)
        m[u], m[v] = d, k - 1
        quotient[tuple(m)] = c
    remainder = {d + 1: c for d, c in acc.items()}
    for d, c in by_v.get(0, {}).items():
      remainder[d] = remainder.get(d, 0) + c
    if any(remainder.values()):
      raise InvariantViolation(
        f"Nonzero remainder dividing by x{i + 1} - x{i} (rest exponents {rest})")
  return Polynomial.from_terms(ctx, quotient)


def divided_difference(f: Polynomial, i: int) -> Polynomial:
  """(f^{s_i} - f) / (x_{i+1} - x_i)."""
  return exact_div_xdiff(f.swap(i) - f, i)


@dataclass(frozen=True)
class NonnegReport:
  all_nonneg: bool
  witness: tuple[tuple[int, ...], int] | None = None

  def to_json(self) -> dict[str, Any]:
    witness = None
    if self.witness is not None:
      witness = {"exps": list(self.witness[0]), "coeff": str(self.witness[1])}
    return {"all_nonneg": self.all_nonneg, "witness": witness}


def nonneg_report(f: Polynomial) -> NonnegReport:
  for m, c in f.terms():
    if c < 0:
      return NonnegReport(False, (m, c))
  return NonnegReport(True)


def divisible_by_var(f: Polynomial, name: str) -> bool:
  return f.substitute({name: 0}).is_zero()


def random_polynomial(ctx: VarContext, rng: random.Random, max_degree: int = 4,
                      max_terms: int = 6, coeff_range: int = 5,
                      use_params: bool = True) -> Polynomial:
  """Random polynomial for property tests; never uses auxiliary symbols."""
  positions = list(range(NUM_PARAMS if use_params else 0, NUM_PARAMS + ctx.n))
  terms: dict[tuple[int, ...], int] = {}
  for _ in range(rng.randint(0, max_terms)):
    m = [0] * ctx.nvars
    for _ in range(rng.randint(0, max_degree)):
      m[rng.choice(positions)] += 1
    c = rng.randint(-coeff_range, coeff_range)
    key = tuple(m)
    terms[key] = terms.get(key, 0) + c
  return Polynomial.from_terms(ctx, terms)
