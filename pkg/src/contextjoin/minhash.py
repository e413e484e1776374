"""MinHash signatures (100 permutations) with Hamming-distance KNN.

The fraction of matching signature positions between two columns estimates
their Jaccard similarity, so a small fixed-size signature table can stand in
for the full inverted index: 800 bytes per column instead of every value.

Instead of true permutations, each of the 100 hash functions is a seeded
64-bit mix of a shared per-value base hash: ``h_i(x) = mix64(base(x) ^ g_i)``
with the ``g_i`` derived deterministically from the permutation seed. All
arithmetic is uint64 wrap-around, which keeps the whole signature computation
vectorizable.
"""

from __future__ import annotations

from dataclasses import dataclass
from hashlib import blake2b
from pathlib import Path
from typing import Iterable

import numpy as np

from . import binio
from .errors import EmptySetError, IncompatibleSignatureError, InvalidKError
from .ingest import ColumnRef, LakeCatalog

NUM_PERMUTATIONS = 100

MAGIC = b"CJMH1"

_U = np.uint64


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = z + _U(0x9E3779B97F4A7C15)
    z = (z ^ (z >> _U(30))) * _U(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U(27))) * _U(0x94D049BB133111EB)
    return z ^ (z >> _U(31))


def _base_hash(value: str) -> int:
    return int.from_bytes(blake2b(value.encode("utf-8"), digest_size=8).digest(), "little")


def _gammas(perm_seed: int) -> np.ndarray:
    out = np.empty(NUM_PERMUTATIONS, dtype=np.uint64)
    for i in range(NUM_PERMUTATIONS):
        digest = blake2b(f"{perm_seed}\x1f{i}".encode("utf-8"), digest_size=8).digest()
        out[i] = int.from_bytes(digest, "little")
    return out


@dataclass
class MinHashSignature:
    sig: np.ndarray            # shape (100,), dtype uint64
    perm_seed: int
    ref: ColumnRef | None = None

    def __post_init__(self):
        self.sig = np.asarray(self.sig, dtype=np.uint64)
        if self.sig.shape != (NUM_PERMUTATIONS,):
            raise ValueError(f"signature must have exactly {NUM_PERMUTATIONS} slots")


def signature(
    values: Iterable[str], perm_seed: int, ref: ColumnRef | None = None
) -> MinHashSignature:
    """MinHash signature of a distinct normalized value set.

    Duplicates in ``values`` cannot change any minimum, so the result is
    invariant under value order and multiplicity.
    """
    bases = np.fromiter(
        (_base_hash(v) for v in set(values)), dtype=np.uint64
    )
    if bases.size == 0:
        raise EmptySetError("cannot sign an empty value set")
    sig = np.empty(NUM_PERMUTATIONS, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for i, gamma in enumerate(_gammas(perm_seed)):
            sig[i] = _mix64(bases ^ gamma).min()
    return MinHashSignature(sig=sig, perm_seed=perm_seed, ref=ref)


def estimate_jaccard(a: MinHashSignature, b: MinHashSignature) -> float:
    """(matching positions) / 100 — an unbiased Jaccard estimator."""
    if a.perm_seed != b.perm_seed:
        raise IncompatibleSignatureError(
            f"perm_seed mismatch: {a.perm_seed} vs {b.perm_seed}"
        )
    matches = int(np.count_nonzero(a.sig == b.sig))
    return matches / NUM_PERMUTATIONS


class MinHashIndex:
    """Fixed-record signature table with exact linear-scan Hamming KNN."""

    def __init__(self, perm_seed: int, refs: list[ColumnRef], sigs: np.ndarray):
        if sigs.shape != (len(refs), NUM_PERMUTATIONS):
            raise ValueError("signature matrix shape mismatch")
        self.perm_seed = perm_seed
        self.refs = refs
        self.sigs = np.asarray(sigs, dtype=np.uint64)
        self._by_ref = {ref: i for i, ref in enumerate(refs)}

    def __len__(self) -> int:
        return len(self.refs)

    def signature_for(self, ref: ColumnRef) -> MinHashSignature | None:
        i = self._by_ref.get(ref)
        if i is None:
            return None
        return MinHashSignature(sig=self.sigs[i], perm_seed=self.perm_seed, ref=ref)

    def save(self, path: str | Path) -> None:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            binio.write_i64(fh, self.perm_seed)
            binio.write_u32(fh, len(self.refs))
            for ref, sig in zip(self.refs, self.sigs):
                binio.write_str(fh, ref.table_id)
                binio.write_str(fh, ref.column_name)
                fh.write(sig.astype("<u8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "MinHashIndex":
        with open(path, "rb") as fh:
            binio.check_magic(fh, MAGIC)
            perm_seed = binio.read_i64(fh)
            n = binio.read_u32(fh)
            refs: list[ColumnRef] = []
            sigs = np.empty((n, NUM_PERMUTATIONS), dtype=np.uint64)
            for i in range(n):
                refs.append(ColumnRef(binio.read_str(fh), binio.read_str(fh)))
                raw = fh.read(NUM_PERMUTATIONS * 8)
                sigs[i] = np.frombuffer(raw, dtype="<u8")
        return cls(perm_seed, refs, sigs)


def build_minhash(catalog: LakeCatalog, perm_seed: int) -> MinHashIndex:
    """Sign every non-empty column of the catalog."""
    refs = [ref for ref in catalog.refs() if not catalog.profiles[ref].is_empty()]
    sigs = np.empty((len(refs), NUM_PERMUTATIONS), dtype=np.uint64)
    for i, ref in enumerate(refs):
        sigs[i] = signature(catalog.profiles[ref].distinct_values, perm_seed).sig
    return MinHashIndex(perm_seed, refs, sigs)


def knn_hamming(
    index: MinHashIndex, query_sig: MinHashSignature, k: int
) -> list[ColumnRef]:
    """Exact k nearest columns by signature Hamming distance.

    Ties break lexicographically; the query's own column (matched by ref) is
    excluded; k larger than the index clamps to everything.
    """
    if k < 1:
        raise InvalidKError(f"k must be >= 1, got {k}")
    if query_sig.perm_seed != index.perm_seed:
        raise IncompatibleSignatureError(
            f"index perm_seed {index.perm_seed} != query {query_sig.perm_seed}"
        )
    distances = np.count_nonzero(index.sigs != query_sig.sig, axis=1)
    order = sorted(
        (i for i in range(len(index.refs)) if index.refs[i] != query_sig.ref),
        key=lambda i: (distances[i], index.refs[i]),
    )
    return [index.refs[i] for i in order[:k]]
