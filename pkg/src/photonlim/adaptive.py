"""Adaptive Dolinar receiver over a coded sequence of BPSK modes.

Modes are measured one after another.  Before mode ``j`` the receiver holds a
posterior ``g`` over the codewords given the outcomes so far, and runs a
Dolinar measurement whose prior parameter is the posterior probability that
bit ``j`` is 1.  Everything here is exact enumeration over codewords and
outcome strings.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from photonlim.binary_channel import state_likelihoods

MAX_BLOCK_LENGTH = 16
MAX_TABLE_ENTRIES = 1 << 22


class DegenerateEvidenceError(ArithmeticError):
    """An observed outcome has zero probability under every codeword."""


class EnumerationLimitError(ValueError):
    """The codeword x outcome table is too large to enumerate."""


class Mode(enum.Enum):
    ADAPTIVE = "adaptive"
    FIXED = "fixed"


@dataclass(frozen=True, eq=False)
class LinearCode:
    """Binary block code as an explicit codeword table (rows are codewords)."""

    n: int
    k: int
    codewords: np.ndarray
    name: str = "explicit"

    def __post_init__(self):
        words = np.asarray(self.codewords, dtype=np.uint8)
        if words.ndim != 2 or words.shape[1] != self.n:
            raise ValueError("codewords must be an array of shape (2**k, n)")
        if words.shape[0] != 1 << self.k:
            raise ValueError(f"expected {1 << self.k} codewords, got {words.shape[0]}")
        if np.any(words > 1):
            raise ValueError("codewords must be binary")
        if len({w.tobytes() for w in words}) != words.shape[0]:
            raise ValueError("codewords must be distinct")
        words.setflags(write=False)
        object.__setattr__(self, "codewords", words)

    def __len__(self) -> int:
        return self.codewords.shape[0]

    def words(self) -> list[str]:
        return ["".join(map(str, w)) for w in self.codewords]


def explicit_code(words: Iterable[Sequence[int] | str], name: str = "explicit") -> LinearCode:
    rows = [[int(c) for c in w] for w in words]
    if not rows:
        raise ValueError("explicit code needs at least one codeword")
    n = len(rows[0])
    if n == 0 or any(len(r) != n for r in rows):
        raise ValueError("codewords must share a nonzero length")
    count = len(rows)
    if count & (count - 1):
        raise ValueError(f"codeword count {count} is not a power of two")
    return LinearCode(n=n, k=count.bit_length() - 1, codewords=np.array(rows), name=name)


def uncoded(n: int) -> LinearCode:
    if n < 1:
        raise ValueError("block length must be >= 1")
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.uint8)
    return LinearCode(n=n, k=n, codewords=words, name=f"uncoded:{n}")


def parity32() -> LinearCode:
    """(3,2) even-parity code: x3 = x1 ^ x2."""
    words = [(a, b, a ^ b) for a, b in itertools.product((0, 1), repeat=2)]
    return LinearCode(n=3, k=2, codewords=np.array(words), name="parity32")


def hamming74() -> LinearCode:
    """(7,4) Hamming code with systematic bits x1..x4."""
    words = []
    for x1, x2, x3, x4 in itertools.product((0, 1), repeat=4):
        words.append((x1, x2, x3, x4, x1 ^ x2 ^ x3, x1 ^ x2 ^ x4, x1 ^ x3 ^ x4))
    return LinearCode(n=7, k=4, codewords=np.array(words), name="hamming74")


def load_code_file(path: str | Path) -> LinearCode:
    """Read a code file: one binary codeword per line, blank lines ignored."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    words = [ln for ln in lines if ln and not ln.startswith("#")]
    if any(set(w) - {"0", "1"} for w in words):
        raise ValueError(f"{path}: codewords must contain only 0 and 1")
    return explicit_code(words, name=f"file:{path}")


def make_code(kind: str | Iterable[Sequence[int] | str]) -> LinearCode:
    """Build a code from ``parity32``, ``hamming74``, ``uncoded:N``, ``file:PATH``
    or an explicit iterable of codewords."""
    if not isinstance(kind, str):
        return explicit_code(kind)
    if kind == "parity32":
        return parity32()
    if kind == "hamming74":
        return hamming74()
    if kind.startswith("uncoded:"):
        return uncoded(int(kind.split(":", 1)[1]))
    if kind.startswith("file:"):
        return load_code_file(kind.split(":", 1)[1])
    raise ValueError(f"unknown code kind {kind!r}")


# --- posterior recursion -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class PosteriorState:
    """Codeword posterior ``g`` before measuring mode ``j`` (1-based)."""

    g: np.ndarray
    j: int = 1


def initial_state(code: LinearCode) -> PosteriorState:
    return PosteriorState(np.full(len(code), 1.0 / len(code)), 1)


def next_xi(state: PosteriorState, code: LinearCode) -> float:
    """Posterior probability that bit ``state.j`` of the codeword is 1."""
    if not 1 <= state.j <= code.n:
        raise IndexError(f"mode index {state.j} outside 1..{code.n}")
    xi = float(np.dot(code.codewords[:, state.j - 1], state.g))
    return min(max(xi, 0.0), 1.0)


def _advance(state, code, y, likelihood):
    bits = code.codewords[:, state.j - 1]
    w = state.g * likelihood[bits, y]
    norm = float(w.sum())
    if norm <= 0.0:
        raise DegenerateEvidenceError(f"outcome {y} at mode {state.j} has zero probability")
    return PosteriorState(w / norm, state.j + 1), norm


def update_posterior(
    state: PosteriorState, code: LinearCode, y: int, likelihood: np.ndarray
) -> PosteriorState:
    """Bayes update after observing ``y`` on mode ``state.j``.

    ``likelihood[x, y]`` is ``P(Y=y | X=x)`` for the measurement applied to
    this mode.
    """
    if y not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    return _advance(state, code, y, np.asarray(likelihood))[0]


def _check_size(code: LinearCode):
    if code.n > MAX_BLOCK_LENGTH or len(code) << code.n > MAX_TABLE_ENTRIES:
        raise EnumerationLimitError(
            f"{len(code)} codewords x {1 << code.n} outcome strings exceeds the enumeration cap"
        )


def bpsk_overlap(E: float) -> float:
    return math.exp(-4.0 * E)


def posterior_tree(
    code: LinearCode, s: float, mode: Mode = Mode.ADAPTIVE
) -> Iterator[tuple[tuple[int, ...], float, PosteriorState]]:
    """Walk every outcome prefix depth-first.

    Yields ``(prefix, P(prefix), state)`` where ``state.g`` is the posterior
    after observing ``prefix``.  Zero-probability prefixes are pruned.
    """
    _check_size(code)
    mode = Mode(mode)
    stack = [((), 1.0, initial_state(code))]
    while stack:
        prefix, prob, state = stack.pop()
        yield prefix, prob, state
        if state.j > code.n:
            continue
        xi = next_xi(state, code) if mode is Mode.ADAPTIVE else 0.5
        lik = state_likelihoods(s, xi)
        for y in (1, 0):
            try:
                child, norm = _advance(state, code, y, lik)
            except DegenerateEvidenceError:
                continue
            stack.append((prefix + (y,), prob * norm, child))


@dataclass(frozen=True, eq=False)
class AdaptiveRunResult:
    """Exact joint law ``joint[l, y]`` of codeword ``l`` and outcome string ``y``.

    Outcome strings are indexed with ``y_1`` as the most significant bit.
    """

    joint: np.ndarray
    code: LinearCode
    energy: float
    mode: Mode

    def as_dict(self) -> dict[tuple[str, str], float]:
        n = self.code.n
        out = {}
        for l, word in enumerate(self.code.words()):
            for yi in range(1 << n):
                out[(word, format(yi, f"0{n}b"))] = float(self.joint[l, yi])
        return out


def run_exact(
    code: LinearCode, E: float, mode: Mode | str = Mode.ADAPTIVE, overlap: float | None = None
) -> AdaptiveRunResult:
    """Exact joint distribution for BPSK at ``E`` photons per mode.

    ``overlap`` replaces the BPSK overlap ``exp(-4E)`` for other binary
    constellations; ``E`` is then only used for photon accounting.
    """
    if not E > 0 or not math.isfinite(E):
        raise ValueError("energy per mode must be positive")
    _check_size(code)
    mode = Mode(mode)
    s = bpsk_overlap(E) if overlap is None else float(overlap)
    n = code.n
    joint = np.zeros((len(code), 1 << n))
    for prefix, prob, state in posterior_tree(code, s, mode):
        if len(prefix) == n:
            yi = int("".join(map(str, prefix)), 2)
            joint[:, yi] = prob * state.g
    return AdaptiveRunResult(joint=joint, code=code, energy=float(E), mode=mode)


@dataclass(frozen=True)
class Metrics:
    mi: float
    bit_error: tuple[float, ...]
    die: float
    pie: float


def mutual_information_bits(joint: np.ndarray) -> float:
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    ratio = joint[mask] / (px @ py)[mask]
    return max(float(np.sum(joint[mask] * np.log2(ratio))), 0.0)


def metrics(result: AdaptiveRunResult) -> Metrics:
    """Mutual information, raw per-bit error rates and efficiencies."""
    code, joint = result.code, result.joint
    n = code.n
    ys = ((np.arange(1 << n)[:, None] >> (n - 1 - np.arange(n))) & 1).astype(np.uint8)
    bit_error = []
    for j in range(n):
        wrong = code.codewords[:, j][:, None] != ys[:, j][None, :]
        bit_error.append(float(joint[wrong].sum()))
    mi = mutual_information_bits(joint)
    return Metrics(mi=mi, bit_error=tuple(bit_error), die=mi / n, pie=mi / (n * result.energy))
