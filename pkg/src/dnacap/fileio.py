"""Binary pool ("DNAP") and sample-set ("DNAS") files.

Layout, all multi-byte integers little-endian::

    magic[4] version:u8 count:u64 L:u32            (DNAP, count = M)
    magic[4] version:u8 count:u64 L:u32 tagged:u8  (DNAS, count = N)

An untagged body is ``ceil(count * L / 8)`` bytes: molecules concatenated,
MSB-first within each byte, zero-padded at the tail.  A tagged DNAS body
is ``count`` records of ``ceil(L / 8)`` packed molecule bytes followed by a
u64 tag.
"""

from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError
from .model import ChannelParams, Molecule, MoleculePool, SampleSet

POOL_MAGIC = b"DNAP"
SAMPLE_MAGIC = b"DNAS"
VERSION = 1

_HEADER = struct.Struct("<4sBQI")


def pack_values(values, L: int) -> bytes:
    """Concatenate ``L``-bit values MSB-first into bytes."""
    values = list(values)
    if not values:
        return b""
    nb = (L + 7) // 8
    shift = 8 * nb - L
    raw = b"".join((v << shift).to_bytes(nb, "big") for v in values)
    rows = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(len(values), nb), axis=1)
    return np.packbits(rows[:, :L].ravel()).tobytes()


def unpack_values(data: bytes, count: int, L: int) -> list[int]:
    nbits = count * L
    if len(data) != (nbits + 7) // 8:
        raise FormatError(f"expected {(nbits + 7) // 8} body bytes, found {len(data)}")
    if count == 0:
        return []
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if bits[nbits:].any():
        raise FormatError("nonzero tail padding")
    rows = bits[:nbits].reshape(count, L)
    nb = (L + 7) // 8
    padded = np.zeros((count, 8 * nb), dtype=np.uint8)
    padded[:, 8 * nb - L:] = rows
    packed = np.packbits(padded, axis=1)
    return [int.from_bytes(r.tobytes(), "big") for r in packed]


def pool_to_bytes(pool: MoleculePool) -> bytes:
    p = pool.params
    head = _HEADER.pack(POOL_MAGIC, VERSION, p.M, p.L)
    return head + pack_values((m.value for m in pool.molecules), p.L)


def samples_to_bytes(samples: SampleSet) -> bytes:
    p = samples.params
    head = _HEADER.pack(SAMPLE_MAGIC, VERSION, p.N, p.L) + bytes([1 if samples.tagged else 0])
    if not samples.tagged:
        return head + pack_values((m.value for m in samples.molecules), p.L)
    body = b"".join(m.packed() + struct.pack("<Q", t) for m, t in samples.records())
    return head + body


def _parse_header(data: bytes, magic: bytes) -> tuple[int, int]:
    if len(data) < _HEADER.size:
        raise FormatError("file too short for header")
    got, version, count, L = _HEADER.unpack_from(data)
    if got != magic:
        raise FormatError(f"bad magic {got!r}, expected {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    if L < 1:
        raise FormatError("L must be >= 1")
    return count, L


def pool_from_bytes(data: bytes, c: float = 1.0) -> MoleculePool:
    """Parse a DNAP image.  The file carries no coverage; ``c`` sets it."""
    M, L = _parse_header(data, POOL_MAGIC)
    values = unpack_values(data[_HEADER.size:], M, L)
    params = ChannelParams.from_counts(M, L, M).with_coverage(c)
    return MoleculePool.from_values(params, values)


def samples_from_bytes(data: bytes, M: int) -> SampleSet:
    """Parse a DNAS image; the pool size ``M`` is supplied by the caller."""
    N, L = _parse_header(data, SAMPLE_MAGIC)
    if len(data) < _HEADER.size + 1:
        raise FormatError("missing tag flag")
    flag = data[_HEADER.size]
    body = data[_HEADER.size + 1:]
    params = ChannelParams.from_counts(M, L, N)
    if flag == 0:
        mols = [Molecule(v, L) for v in unpack_values(body, N, L)]
        return SampleSet(params, mols)
    if flag != 1:
        raise FormatError(f"bad tag flag {flag}")
    nb = (L + 7) // 8
    rec = nb + 8
    if len(body) != N * rec:
        raise FormatError(f"expected {N * rec} body bytes, found {len(body)}")
    mols, tags = [], []
    for j in range(N):
        chunk = body[j * rec:(j + 1) * rec]
        mols.append(Molecule.from_packed(chunk[:nb], L))
        tags.append(struct.unpack("<Q", chunk[nb:])[0])
    return SampleSet(params, mols, tags)


def sniff(data: bytes) -> bytes:
    return data[:4]


def atomic_write(path: str | os.PathLike, data: bytes | str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_pool(pool: MoleculePool, path) -> None:
    atomic_write(path, pool_to_bytes(pool))


def read_pool(path, c: float = 1.0) -> MoleculePool:
    return pool_from_bytes(Path(path).read_bytes(), c)


def write_samples(samples: SampleSet, path) -> None:
    atomic_write(path, samples_to_bytes(samples))


def read_samples(path, M: int) -> SampleSet:
    return samples_from_bytes(Path(path).read_bytes(), M)
