"""Channel data model and the sampling-with-replacement channel."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterator, Sequence

import numpy as np

from .errors import DistinctnessError, ParameterDomainError
from .rng import draw_indices, trial_seed


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


@dataclass(frozen=True)
class ChannelParams:
    """Pool size ``M``, molecule length ``L``, draws ``N`` and their scaling
    exponents ``beta`` (``L = beta * log2 M``) and ``c`` (``N = c * M``)."""

    M: int
    L: int
    beta: float
    c: float
    N: int

    def __post_init__(self):
        if self.M < 1 or self.L < 1 or self.N < 1:
            raise ParameterDomainError(
                f"M, L, N must be positive (M={self.M}, L={self.L}, N={self.N})"
            )
        for name in ("beta", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ParameterDomainError(f"{name} must be finite and > 0, got {v}")
        # M = 1 is a test-only degenerate pool; log2(1) = 0 leaves beta unconstrained
        if self.M >= 2:
            lg = math.log2(self.M)
            if abs(self.L / lg - self.beta) > 1 / lg + 1e-12:
                raise ParameterDomainError(
                    f"beta={self.beta} inconsistent with L={self.L}, M={self.M}"
                )

    @classmethod
    def from_counts(cls, M: int, L: int, N: int) -> "ChannelParams":
        """Params for known integer sizes; beta and c are read off exactly."""
        beta = L / math.log2(M) if M >= 2 else float(L)
        return cls(M=M, L=L, beta=beta, c=N / M, N=N)

    def with_coverage(self, c: float) -> "ChannelParams":
        if not (math.isfinite(c) and c > 0):
            raise ParameterDomainError(f"c must be finite and > 0, got {c}")
        N = round_half_up(c * self.M)
        if N < 1:
            raise ParameterDomainError(f"c={c} gives N=0 draws for M={self.M}")
        return replace(self, c=c, N=N)


def derive_params(M: int, beta: float, c: float) -> ChannelParams:
    if M < 2:
        raise ParameterDomainError(f"M must be >= 2, got {M}")
    if not (math.isfinite(beta) and beta > 0):
        raise ParameterDomainError(f"beta must be finite and > 0, got {beta}")
    if not (math.isfinite(c) and c > 0):
        raise ParameterDomainError(f"c must be finite and > 0, got {c}")
    L = round_half_up(beta * math.log2(M))
    if L < 1:
        raise ParameterDomainError(f"beta={beta} rounds to L=0 at M={M}")
    N = round_half_up(c * M)
    if N < 1:
        raise ParameterDomainError(f"c={c} rounds to N=0 at M={M}")
    return ChannelParams(M=M, L=L, beta=beta, c=c, N=N)


@dataclass(frozen=True, order=True)
class Molecule:
    """An ``length``-bit string; bit 0 of the string is the MSB of ``value``."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise ParameterDomainError("molecule length must be >= 1")
        if not 0 <= self.value < (1 << self.length):
            raise ParameterDomainError(
                f"value {self.value} does not fit in {self.length} bits"
            )

    @classmethod
    def from_bits(cls, bits: str) -> "Molecule":
        return cls(int(bits, 2), len(bits))

    @classmethod
    def from_packed(cls, data: bytes, length: int) -> "Molecule":
        pad = 8 * len(data) - length
        return cls(int.from_bytes(data, "big") >> pad, length)

    @property
    def nbytes(self) -> int:
        return (self.length + 7) // 8

    def packed(self) -> bytes:
        """MSB-first bytes with the tail of the last byte zero-padded."""
        return (self.value << (8 * self.nbytes - self.length)).to_bytes(self.nbytes, "big")

    def bits(self) -> str:
        return format(self.value, f"0{self.length}b")

    def __str__(self) -> str:
        return self.bits()


@dataclass(frozen=True)
class MoleculePool:
    params: ChannelParams
    molecules: tuple[Molecule, ...]

    def __post_init__(self):
        object.__setattr__(self, "molecules", tuple(self.molecules))
        if len(self.molecules) != self.params.M:
            raise ParameterDomainError(
                f"pool holds {len(self.molecules)} molecules, params say M={self.params.M}"
            )
        L = self.params.L
        for i, m in enumerate(self.molecules):
            if m.length != L:
                raise ParameterDomainError(f"molecule {i} has length {m.length}, expected {L}")

    @classmethod
    def from_values(cls, params: ChannelParams, values: Sequence[int]) -> "MoleculePool":
        return cls(params, tuple(Molecule(int(v), params.L) for v in values))

    def __len__(self) -> int:
        return len(self.molecules)

    def is_distinct(self) -> bool:
        return len({m.value for m in self.molecules}) == len(self.molecules)

    def with_coverage(self, c: float) -> "MoleculePool":
        return MoleculePool(self.params.with_coverage(c), self.molecules)


def indexed_pool(params: ChannelParams) -> MoleculePool:
    """Pool whose molecule ``i`` encodes the integer ``i``; pairwise distinct."""
    if params.M > 1 << params.L:
        raise DistinctnessError(f"cannot fit {params.M} distinct molecules in {params.L} bits")
    return MoleculePool.from_values(params, range(params.M))


class SampleSet:
    """The ``N`` molecules drawn by the channel, optionally genie-tagged."""

    __slots__ = ("params", "molecules", "tags")

    def __init__(self, params: ChannelParams, molecules: Sequence[Molecule], tags=None):
        molecules = tuple(molecules)
        if len(molecules) != params.N:
            raise ParameterDomainError(
                f"sample set holds {len(molecules)} draws, params say N={params.N}"
            )
        if tags is not None:
            tags = np.asarray(tags, dtype=np.int64)
            if tags.shape != (params.N,):
                raise ParameterDomainError("tags must be present on every record")
            if tags.size and (tags.min() < 0 or tags.max() >= params.M):
                raise ParameterDomainError(f"tags must lie in [0, {params.M})")
            tags.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "molecules", molecules)
        object.__setattr__(self, "tags", tags)

    def __setattr__(self, name, value):
        raise AttributeError("SampleSet is immutable")

    def __len__(self) -> int:
        return len(self.molecules)

    @property
    def tagged(self) -> bool:
        return self.tags is not None

    def records(self) -> Iterator[tuple[Molecule, int | None]]:
        if self.tags is None:
            return ((m, None) for m in self.molecules)
        return zip(self.molecules, self.tags.tolist())

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        if self.params != other.params or self.molecules != other.molecules:
            return False
        if self.tags is None or other.tags is None:
            return self.tags is None and other.tags is None
        return bool(np.array_equal(self.tags, other.tags))

    __hash__ = None

    def __repr__(self) -> str:
        return f"SampleSet(N={len(self)}, L={self.params.L}, tagged={self.tagged})"


def sample_with_replacement(pool: MoleculePool, seed: int) -> SampleSet:
    idx = draw_indices(pool.params.M, pool.params.N, seed)
    mols = pool.molecules
    return SampleSet(pool.params, [mols[i] for i in idx.tolist()])


def map_trials(fn, seed: int, trials: int, workers: int | None = None) -> list:
    """``[fn(trial_seed(seed, t)) for t in range(trials)]``, optionally threaded.

    Results are always returned in trial order.
    """
    seeds = [trial_seed(seed, t) for t in range(trials)]
    if workers is None or workers <= 1 or trials <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, seeds))


def erasure_fractions(M: int, N: int, trials: int, seed: int, workers: int | None = None) -> np.ndarray:
    """Per-trial fraction of the ``M`` indices never hit by ``N`` draws."""

    def one(s: int) -> float:
        hit = np.zeros(M, dtype=bool)
        hit[draw_indices(M, N, s)] = True
        return (M - int(np.count_nonzero(hit))) / M

    return np.array(map_trials(one, seed, trials, workers), dtype=float)


def empirical_erasure_probability(
    pool: MoleculePool, trials: int, seed: int, workers: int | None = None
) -> float:
    if trials < 1:
        raise ParameterDomainError(f"trials must be >= 1, got {trials}")
    if not pool.is_distinct():
        raise DistinctnessError("erasure probability needs pairwise-distinct molecules")
    p = pool.params
    return float(erasure_fractions(p.M, p.N, trials, seed, workers).mean())
