"""Index-prefixed molecules with a systematic MDS outer code.

Molecule ``i`` is ``index i (log2 M bits, big-endian) || payload i``.
Payloads are split into symbol columns; each column is an independent
length-``M``, dimension-``k`` code over GF(2^width): the information
symbols are the values of a degree ``k-1`` polynomial at points ``0..k-1``
and the parity symbols its values at ``k..M-1``.  Any ``k`` distinct
molecules therefore determine every payload.

Columns are ``w`` bits wide.  A remainder ``r = payload_bits mod w`` gets
its own GF(2^r) column when ``2^r > M``.  Otherwise the last full column
and the remainder are re-split into two near-equal columns if both still
exceed ``log2 M`` bits, or merged into one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import CapacityError, ConfigError, CorruptionDetected, FormatError, InsufficientCoverage
from .gf import MAX_BITS, field
from .model import ChannelParams, Molecule, MoleculePool, SampleSet

HEADER_BITS = 32
FIELD_WIDTHS = (8, 16)


@dataclass(frozen=True)
class CodecConfig:
    M: int
    L: int
    w: int
    k: int

    def __post_init__(self):
        M, L, w, k = self.M, self.L, self.w, self.k
        if M < 2 or M & (M - 1):
            raise ConfigError(f"M must be a power of two >= 2, got {M}")
        if w not in FIELD_WIDTHS:
            raise ConfigError(f"field width w must be one of {FIELD_WIDTHS}, got {w}")
        if 1 << w <= M:
            raise ConfigError(f"2^w = {1 << w} must exceed M = {M} (too few evaluation points)")
        if self.payload_bits < w:
            raise ConfigError(f"payload of {self.payload_bits} bits cannot hold a {w}-bit symbol (L={L})")
        if not 1 <= k <= M:
            raise ConfigError(f"k must lie in [1, M], got {k}")
        widths = self.column_widths
        if max(widths) > MAX_BITS:
            raise ConfigError(f"payload split {widths} needs a field wider than {MAX_BITS} bits")

    @property
    def index_bits(self) -> int:
        return self.M.bit_length() - 1

    @property
    def payload_bits(self) -> int:
        return self.L - self.index_bits

    @cached_property
    def column_widths(self) -> tuple[int, ...]:
        full, r = divmod(self.payload_bits, self.w)
        if r == 0:
            return (self.w,) * full
        if 1 << r > self.M:
            return (self.w,) * full + (r,)
        tail = self.w + r
        lo = tail // 2
        if 1 << lo > self.M:
            return (self.w,) * (full - 1) + (tail - lo, lo)
        return (self.w,) * (full - 1) + (tail,)

    @property
    def symbols_per_molecule(self) -> int:
        return len(self.column_widths)

    @property
    def data_capacity_bits(self) -> int:
        return self.k * self.payload_bits - HEADER_BITS

    @property
    def beta_eff(self) -> float:
        return self.L / self.index_bits

    def to_json(self) -> str:
        return json.dumps({"M": self.M, "L": self.L, "w": self.w, "k": self.k})

    @classmethod
    def from_json(cls, text: str) -> "CodecConfig":
        try:
            d = json.loads(text)
            return cls(int(d["M"]), int(d["L"]), int(d["w"]), int(d["k"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad codec config: {exc}") from exc


def achieved_rate(config: CodecConfig) -> float:
    return config.k * config.payload_bits / (config.M * config.L)


def suggest_k(M: int, c: float) -> int:
    """Mean distinct count minus three binomial standard deviations."""
    p = -math.expm1(-c)
    return max(1, math.floor(p * M - 3 * math.sqrt(M * p * (1 - p))))


def _bits_to_columns(bits: np.ndarray, widths) -> np.ndarray:
    """(n, payload_bits) 0/1 array -> (n, S) symbol values."""
    cols = []
    off = 0
    for wd in widths:
        weights = 1 << np.arange(wd - 1, -1, -1, dtype=np.int64)
        cols.append(bits[:, off:off + wd].astype(np.int64) @ weights)
        off += wd
    return np.stack(cols, axis=1)


def _columns_to_bits(cols: np.ndarray, widths) -> np.ndarray:
    parts = []
    for s, wd in enumerate(widths):
        shifts = np.arange(wd - 1, -1, -1, dtype=np.int64)
        parts.append(((cols[:, s:s + 1] >> shifts) & 1).astype(np.uint8))
    return np.concatenate(parts, axis=1)


def _payload_columns(payloads: list[int], widths) -> np.ndarray:
    out = np.empty((len(payloads), len(widths)), dtype=np.int64)
    shift = sum(widths)
    for s, wd in enumerate(widths):
        shift -= wd
        mask = (1 << wd) - 1
        out[:, s] = [(p >> shift) & mask for p in payloads]
    return out


def _interpolate_columns(config: CodecConfig, xs, ys: np.ndarray, targets) -> np.ndarray:
    out = np.empty((len(targets), ys.shape[1]), dtype=np.int64)
    for s, wd in enumerate(config.column_widths):
        out[:, s] = field(wd).interpolate(xs, ys[:, s], targets)
    return out


def encode(data: bytes, config: CodecConfig) -> MoleculePool:
    data = bytes(data)
    need = 8 * len(data)
    if need > config.data_capacity_bits:
        raise CapacityError(
            f"{len(data)} bytes exceed the code's capacity of {max(config.data_capacity_bits, 0) // 8} bytes"
        )
    M, k, P = config.M, config.k, config.payload_bits
    stream = np.unpackbits(np.frombuffer(len(data).to_bytes(4, "big") + data, dtype=np.uint8))
    bits = np.zeros(k * P, dtype=np.uint8)
    bits[:stream.size] = stream
    info = _bits_to_columns(bits.reshape(k, P), config.column_widths)
    parity = _interpolate_columns(config, np.arange(k), info, np.arange(k, M))
    symbols = np.concatenate([info, parity], axis=0)
    values = []
    for i, row in enumerate(symbols.tolist()):
        v = i
        for wd, sym in zip(config.column_widths, row):
            v = (v << wd) | sym
        values.append(v)
    params = ChannelParams.from_counts(M, config.L, M)
    return MoleculePool(params, tuple(Molecule(v, config.L) for v in values))


def decode(samples: SampleSet, config: CodecConfig, verify: bool = True) -> bytes:
    """Recover the encoded bytes from any ``k`` distinct sampled positions.

    With ``verify`` set, positions sampled beyond the ``k`` used for
    interpolation are checked against the decoded codeword.
    """
    if samples.params.L != config.L:
        raise FormatError(f"samples have L={samples.params.L}, config says L={config.L}")
    P, k, M = config.payload_bits, config.k, config.M
    mask = (1 << P) - 1
    known: dict[int, int] = {}
    for m in samples.molecules:
        pos, payload = m.value >> P, m.value & mask
        prev = known.setdefault(pos, payload)
        if prev != payload:
            raise CorruptionDetected(f"conflicting copies of molecule {pos}")
    if len(known) < k:
        raise InsufficientCoverage(len(known), k)

    info_known = sorted(p for p in known if p < k)
    basis = info_known + sorted(p for p in known if p >= k)[: k - len(info_known)]
    extra = sorted(set(known) - set(basis))
    missing = sorted(set(range(k)) - set(info_known))
    widths = config.column_widths

    info = np.empty((k, len(widths)), dtype=np.int64)
    info[info_known] = _payload_columns([known[p] for p in info_known], widths)
    if missing or (verify and extra):
        ys = _payload_columns([known[p] for p in basis], widths)
        targets = missing + (extra if verify else [])
        got = _interpolate_columns(config, np.array(basis), ys, np.array(targets))
        if missing:
            info[missing] = got[: len(missing)]
        if verify and extra:
            want = _payload_columns([known[p] for p in extra], widths)
            if not np.array_equal(got[len(missing):], want):
                raise CorruptionDetected("sampled molecules are inconsistent with any codeword")

    bits = _columns_to_bits(info, widths).ravel()
    n = int.from_bytes(np.packbits(bits[:HEADER_BITS]).tobytes(), "big")
    if 8 * n > config.data_capacity_bits:
        raise FormatError(f"length header {n} exceeds capacity")
    end = HEADER_BITS + 8 * n
    if bits[end:].any():
        raise FormatError("nonzero padding after payload")
    return np.packbits(bits[HEADER_BITS:end]).tobytes()
