"""Genie-aided channel: unique tags, duplicate removal, frequency vectors."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .errors import ContractError, FormatError, ParameterDomainError
from .model import ChannelParams, Molecule, MoleculePool, SampleSet
from .rng import draw_indices


@dataclass(frozen=True)
class TaggedPool:
    """A pool whose molecule ``i`` carries the out-of-band tag ``i``."""

    pool: MoleculePool

    @property
    def params(self) -> ChannelParams:
        return self.pool.params

    @property
    def tags(self) -> range:
        return range(self.pool.params.M)

    @property
    def tag_width(self) -> int:
        return max(1, math.ceil(math.log2(self.pool.params.M)))

    def records(self):
        return zip(self.pool.molecules, self.tags)


def tag_pool(pool: MoleculePool) -> TaggedPool:
    return TaggedPool(pool)


def sample_tagged(tagged: TaggedPool, seed: int) -> SampleSet:
    """Same index stream as :func:`sample_with_replacement`, plus tags."""
    p = tagged.params
    idx = draw_indices(p.M, p.N, seed)
    mols = tagged.pool.molecules
    return SampleSet(p, [mols[i] for i in idx.tolist()], idx)


def dedup_set(samples: SampleSet) -> set[tuple[Molecule, int]]:
    if not samples.tagged:
        raise ContractError("dedup_set needs genie tags on the samples")
    return set(samples.records())


@dataclass(frozen=True)
class FrequencyVector:
    """Sparse map from observed molecule content to its number of distinct tags."""

    params: ChannelParams
    counts: dict

    def __post_init__(self):
        L = self.params.L
        total = 0
        for y, n in self.counts.items():
            if y.length != L:
                raise ContractError(f"key {y} has length {y.length}, expected {L}")
            if n < 1:
                raise ContractError(f"count for {y} must be >= 1")
            total += n
        if total > min(self.params.M, self.params.N):
            raise ContractError(f"l1 norm {total} exceeds min(M, N)")

    @property
    def l1_norm(self) -> int:
        return sum(self.counts.values())

    def __getitem__(self, y: Molecule) -> int:
        return self.counts.get(y, 0)

    def __len__(self) -> int:
        return len(self.counts)

    def to_text(self) -> str:
        p = self.params
        lines = [f"# M={p.M} L={p.L} N={p.N} Q={self.l1_norm}"]
        for y in sorted(self.counts, key=lambda m: m.value):
            lines.append(f"{y.packed().hex()} {self.counts[y]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "FrequencyVector":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise FormatError("missing header line")
        try:
            head = dict(tok.split("=") for tok in lines[0][1:].split())
            M, L, N, Q = (int(head[k]) for k in ("M", "L", "N", "Q"))
        except (KeyError, ValueError) as exc:
            raise FormatError(f"bad header {lines[0]!r}") from exc
        counts = {}
        for line in lines[1:]:
            if not line.strip():
                continue
            hx, n = line.split()
            counts[Molecule.from_packed(bytes.fromhex(hx), L)] = int(n)
        fv = cls(ChannelParams.from_counts(M, L, N), counts)
        if fv.l1_norm != Q:
            raise FormatError(f"header Q={Q} but counts sum to {fv.l1_norm}")
        return fv


def frequency_vector(samples: SampleSet) -> FrequencyVector:
    counts = Counter(y for y, _ in dedup_set(samples))
    return FrequencyVector(samples.params, dict(counts))


@dataclass(frozen=True)
class AugmentedFrequencyVector:
    """``f`` with the leading coordinate ``f0 = (1 - e^-c + delta) M - |f|_1``."""

    f: FrequencyVector
    delta: float
    f0: float
    threshold: float
    event: bool  # |f|_1 exceeds the threshold (f0 < 0)

    @property
    def l1_norm(self) -> float:
        return self.f.l1_norm + self.f0


def augment(f: FrequencyVector, delta: float) -> AugmentedFrequencyVector:
    c, M = f.params.c, f.params.M
    if not 0 < delta <= math.exp(-c):
        raise ParameterDomainError(f"delta must lie in (0, e^-c] = (0, {math.exp(-c):.6g}], got {delta}")
    threshold = (-math.expm1(-c) + delta) * M
    l1 = f.l1_norm
    return AugmentedFrequencyVector(f, delta, threshold - l1, threshold, l1 > threshold)
