"""Symmetric-group and partition combinatorics."""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from log import get_logger

log = get_logger("weyl")


class InputError(ValueError):
  """Malformed permutation, partition, composition, cycle or word."""


@dataclass(frozen=True)
class Permutation:
  """Permutation of {1..n} in one-line notation; ``w(i) = oneline[i-1]``."""
  oneline: tuple[int, ...]

  def __post_init__(self) -> None:
    if sorted(self.oneline) != list(range(1, len(self.oneline) + 1)):
      raise InputError(f"Not a permutation of 1..{len(self.oneline)}: {list(self.oneline)}")

  @property
  def n(self) -> int:
    return len(self.oneline)

  def __call__(self, i: int) -> int:
    return self.oneline[i - 1]

  def __mul__(self, other: Permutation) -> Permutation:
    """Composition as functions: (self * other)(i) = self(other(i))."""
    if other.n != self.n:
      raise InputError(f"Cannot compose permutations of sizes {self.n} and {other.n}")
    return Permutation(tuple(self.oneline[k - 1] for k in other.oneline))

  def inverse(self) -> Permutation:
    inv = [0] * self.n
    for pos, value in enumerate(self.oneline, start=1):
      inv[value - 1] = pos
    return Permutation(tuple(inv))

  def length(self) -> int:
    w = self.oneline
    return sum(1 for a, b in itertools.combinations(range(self.n), 2) if w[a] > w[b])

  def is_identity(self) -> bool:
    return all(v == k for k, v in enumerate(self.oneline, start=1))

  def left_descents(self) -> list[int]:
    """Indices i with l(s_i w) < l(w), i.e. i+1 appears before i in one-line notation."""
    inv = self.inverse().oneline
    return [i for i in range(1, self.n) if inv[i - 1] > inv[i]]

  def right_descents(self) -> list[int]:
    return [i for i in range(1, self.n) if self.oneline[i - 1] > self.oneline[i]]

  def left_multiply(self, i: int) -> Permutation:
    """s_i * w: exchange the values i and i+1."""
    _check_index(i, self.n)
    swap = {i: i + 1, i + 1: i}
    return Permutation(tuple(swap.get(v, v) for v in self.oneline))

  def right_multiply(self, i: int) -> Permutation:
    """w * s_i: exchange the positions i and i+1."""
    _check_index(i, self.n)
    w = list(self.oneline)
    w[i - 1], w[i] = w[i], w[i - 1]
    return Permutation(tuple(w))

  def act(self, parts: Sequence[int]) -> tuple[int, ...]:
    """(w . z)_i = z_{w(i)}."""
    if len(parts) != self.n:
      raise InputError(f"Vector of length {len(parts)} for permutation of size {self.n}")
    return tuple(parts[k - 1] for k in self.oneline)

  def __str__(self) -> str:
    if self.n <= 9:
      return "".join(str(v) for v in self.oneline)
    return ",".join(str(v) for v in self.oneline)


def _check_index(i: int, n: int) -> None:
  if not 1 <= i <= n - 1:
    raise IndexError(f"Simple reflection s{i} out of range for n={n}")


@dataclass(frozen=True)
class Partition:
  parts: tuple[int, ...]

  def __post_init__(self) -> None:
    if any(p < 0 for p in self.parts):
      raise InputError(f"Negative part in {list(self.parts)}")
    if any(a < b for a, b in zip(self.parts, self.parts[1:])):
      raise InputError(f"Parts not weakly decreasing: {list(self.parts)}")

  @property
  def n(self) -> int:
    return len(self.parts)

  def __getitem__(self, i: int) -> int:
    return self.parts[i]


@dataclass(frozen=True)
class Composition:
  parts: tuple[int, ...]

  def __post_init__(self) -> None:
    if any(p < 0 for p in self.parts):
      raise InputError(f"Negative part in {list(self.parts)}")

  @property
  def n(self) -> int:
    return len(self.parts)


def identity(n: int) -> Permutation:
  return Permutation(tuple(range(1, n + 1)))


def longest_element(n: int) -> Permutation:
  if n < 1:
    raise InputError(f"n must be positive, got {n}")
  return Permutation(tuple(range(n, 0, -1)))


def simple_reflection(i: int, n: int) -> Permutation:
  return identity(n).right_multiply(i)


def rho(n: int) -> Partition:
  return Partition(tuple(range(n - 1, -1, -1)))


def from_word(word: Sequence[int], n: int) -> Permutation:
  """The product s_{i1} s_{i2} ... s_{il}."""
  w = identity(n)
  for i in word:
    w = w.right_multiply(i)
  return w


def reduced_word(w: Permutation) -> list[int]:
  """Lexicographically smallest reduced word, peeling the smallest left descent."""
  word = []
  cur = w
  while not cur.is_identity():
    i = min(cur.left_descents())
    word.append(i)
    cur = cur.left_multiply(i)
  return word


def all_reduced_words(w: Permutation) -> list[tuple[int, ...]]:
  """Every reduced word of ``w``, in lexicographic order."""
  return sorted(_reduced_words(w.oneline))


@functools.lru_cache(maxsize=4096)
def _reduced_words(oneline: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
  w = Permutation(oneline)
  if w.is_identity():
    return ((),)
  words = []
  for i in w.left_descents():
    for tail in _reduced_words(w.left_multiply(i).oneline):
      words.append((i,) + tail)
  return tuple(words)


def all_permutations(n: int) -> Iterator[Permutation]:
  """S_n in lexicographic one-line order."""
  for p in itertools.permutations(range(1, n + 1)):
    yield Permutation(p)


def sort_composition(zeta: Composition) -> tuple[Partition, Permutation]:
  """Return (zeta+, v) with v . zeta = zeta+ and v of minimal length.

  A stable sort keeps equal parts in their original order, which gives the
  minimal coset representative.
  """
  order = sorted(range(1, zeta.n + 1), key=lambda p: -zeta.parts[p - 1])
  v = Permutation(tuple(order))
  return Partition(v.act(zeta.parts)), v


def cycles_to_oneline(cycles: Sequence[Sequence[int]], n: int) -> Permutation:
  image = list(range(1, n + 1))
  seen: set[int] = set()
  for cycle in cycles:
    for a in cycle:
      if not 1 <= a <= n:
        raise InputError(f"Cycle entry {a} outside 1..{n}")
      if a in seen:
        raise InputError(f"Element {a} repeated in cycles {cycles}")
      seen.add(a)
    for a, b in zip(cycle, list(cycle[1:]) + list(cycle[:1])):
      image[a - 1] = b
  return Permutation(tuple(image))


_CYCLE_RE = re.compile(r"\(([^()]*)\)")
_WORD_RE = re.compile(r"s(\d+)")


def parse_cycles(text: str) -> list[list[int]]:
  stripped = text.replace(" ", "")
  if not re.fullmatch(r"(\([0-9,]*\))+", stripped):
    raise InputError(f"Malformed cycle notation: {text!r}")
  cycles = []
  for body in _CYCLE_RE.findall(stripped):
    cycles.append([int(t) for t in body.split(",") if t])
  return cycles


def parse_permutation(text: str, n: int | None = None, fmt: str = "auto") -> Permutation:
  """Parse one-line ("231", "2,3,1"), cycle ("(1,3,2,4)") or word ("s1 s2") notation."""
  text = text.strip()
  if fmt == "auto":
    if text in ("id", "e", ""):
      fmt = "identity"
    elif text.startswith("("):
      fmt = "cycle"
    elif text.startswith("s"):
      fmt = "word"
    else:
      fmt = "oneline"

  if fmt == "identity":
    if n is None:
      raise InputError("The identity needs an explicit n")
    return identity(n)

  if fmt == "cycle":
    cycles = parse_cycles(text)
    size = n if n is not None else max((max(c) for c in cycles if c), default=1)
    return cycles_to_oneline(cycles, size)

  if fmt == "word":
    if not re.fullmatch(r"(\s*s\d+\s*)*", text):
      raise InputError(f"Malformed reflection word: {text!r}")
    word = [int(t) for t in _WORD_RE.findall(text)]
    size = n if n is not None else max(word, default=0) + 1
    return from_word(word, size)

  if fmt == "oneline":
    body = text.strip("[]")
    if "," in body:
      tokens = [t for t in body.split(",") if t.strip()]
    else:
      tokens = list(body)
    try:
      values = tuple(int(t) for t in tokens)
    except ValueError:
      raise InputError(f"Malformed one-line permutation: {text!r}") from None
    w = Permutation(values)
    if n is not None and w.n != n:
      raise InputError(f"Permutation {text!r} has size {w.n}, expected {n}")
    return w

  raise InputError(f"Unknown permutation format {fmt!r}")


def _parse_parts(text: str, n: int | None) -> tuple[int, ...]:
  tokens = [t for t in text.replace(" ", "").split(",") if t]
  try:
    parts = [int(t) for t in tokens]
  except ValueError:
    raise InputError(f"Malformed integer list: {text!r}") from None
  if n is not None:
    if len(parts) > n:
      raise InputError(f"{text!r} has more than {n} parts")
    parts += [0] * (n - len(parts))
  return tuple(parts)


def parse_partition(text: str, n: int | None = None) -> Partition:
  return Partition(_parse_parts(text, n))


def parse_composition(text: str, n: int | None = None) -> Composition:
  return Composition(_parse_parts(text, n))


def pad_partition(lam: Partition, n: int) -> Partition:
  if lam.n > n:
    if any(lam.parts[n:]):
      raise InputError(f"Partition {list(lam.parts)} has more than {n} nonzero parts")
    return Partition(lam.parts[:n])
  return Partition(lam.parts + (0,) * (n - lam.n))
