#!/usr/bin/env python3
"""Independent golden values for the test suite.

Uses only hashlib/struct so the numbers do not depend on the C++ code:
  * the first words of the fixture weight stream
  * subset selections: SHA-256(seed || 0x1F || id), ascending
"""
import hashlib
import json
import struct
import sys
from pathlib import Path


def weight_stream(seed: str):
    counter = 0
    while True:
        block = hashlib.sha256(seed.encode() + struct.pack("<Q", counter)).digest()
        counter += 1
        for i in range(0, 32, 4):
            (u,) = struct.unpack("<I", block[i:i + 4])
            yield u, struct.unpack("<f", struct.pack("<f", -0.08 + 0.16 * u / 2**32))[0]


def subset(ids, seed, n):
    key = lambda i: (hashlib.sha256(seed.encode() + b"\x1f" + i.encode()).digest(), i)
    return sorted(ids, key=key)[:n]


def main(out_dir: Path):
    stream = weight_stream("eeprof-fixture-v1")
    first = [next(stream) for _ in range(10)]
    ids10 = [f"q{i}" for i in range(10)]
    ids1000 = [f"item-{i:04d}" for i in range(1000)]
    goldens = {
        "weight_stream_seed": "eeprof-fixture-v1",
        "weight_stream_words": [u for u, _ in first],
        "weight_stream_values": [v for _, v in first],
        "subset_10_s1_n3": {"ids": ids10, "seed": "s1", "n": 3,
                             "selected": subset(ids10, "s1", 3)},
        "subset_1000_paper_n100": {"id_format": "item-%04d", "count": 1000,
                                   "seed": "paper", "n": 100,
                                   "selected": subset(ids1000, "paper", 100)},
    }
    (out_dir / "goldens.json").write_text(json.dumps(goldens, indent=1) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures"))
