#!/usr/bin/env python3
"""Writes a small full-capture trace archive plus reference statistics.

The statistics are computed here with plain scalar loops in double precision
over the float32 values stored in the archive, so the C++ replay path can be
checked against numbers it did not produce.
"""
import json
import math
import random
import struct
import sys
from pathlib import Path

L, D, V, K = 6, 16, 32, 10
PROMPTS = [("p-a", 4), ("p-b", 5), ("p-c", 3)]
ALPHA = 0.5


def f32(x):
    return struct.unpack("<f", struct.pack("<f", x))[0]


def cosine(a, b):
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    return max(-1.0, min(1.0, dot / (na * nb)))


def topk_ids(values, k):
    order = sorted(range(len(values)), key=lambda i: (-values[i], i))
    return order[:k]


def make_steps(rng):
    w = [[rng.uniform(-1, 1) for _ in range(V)] for _ in range(D)]
    steps = []
    for step_index in range(sum(n for _, n in PROMPTS)):
        final = [rng.gauss(0, 1) for _ in range(D)]
        layers = []
        for layer in range(1, L + 1):
            scale = 1.5 * (L - layer) / L
            h = [f32(x + scale * rng.gauss(0, 1)) for x in final]
            logits = [f32(sum(h[i] * w[i][v] for i in range(D))) for v in range(V)]
            ids = topk_ids(logits, K)
            layers.append({"hidden": h, "logits": logits, "ids": ids,
                           "values": [logits[i] for i in ids]})
        chosen = layers[-1]["ids"][0]
        steps.append({"step": step_index, "chosen": chosen, "layers": layers})
    return steps


def encode(steps):
    manifest = {
        "model_id": "synthetic-l6", "num_layers": L, "d_model": D,
        "vocab_size": V, "capture": "full", "topk": K,
        "step_count": len(steps), "record_count": len(steps) * L,
        "prompts": [{"id": p, "steps": n} for p, n in PROMPTS],
    }
    m = json.dumps(manifest, separators=(",", ":")).encode()
    out = bytearray(b"EEPTRACE")
    out += struct.pack("<II", 1, len(m)) + m
    for s in steps:
        out += struct.pack("<II", s["step"], s["chosen"])
        for rec in s["layers"]:
            out += struct.pack(f"<{D}f", *rec["hidden"])
            out += struct.pack(f"<{V}f", *rec["logits"])
            out += struct.pack(f"<{K}I", *rec["ids"])
            out += struct.pack(f"<{K}f", *rec["values"])
    return bytes(out)


def profile(steps):
    samples = {"hidden": [[] for _ in range(L - 1)],
               "logits": [[] for _ in range(L - 1)],
               "topk": [[] for _ in range(L - 1)]}
    for s in steps:
        last = s["layers"][-1]
        for layer in range(L - 1):
            rec = s["layers"][layer]
            samples["hidden"][layer].append(cosine(rec["hidden"], last["hidden"]))
            samples["logits"][layer].append(cosine(rec["logits"], last["logits"]))
            inter = set(rec["ids"]) & set(last["ids"])
            samples["topk"][layer].append(len(inter) / K)
    out = {}
    for name, per_layer in samples.items():
        rows = []
        for values in per_layer:
            mean = math.fsum(values) / len(values)
            var = math.fsum((v - mean) ** 2 for v in values) / len(values)
            rows.append({"mean": mean, "std": math.sqrt(var), "count": len(values)})
        out[name] = rows
    return out


def eas(rows, identity):
    total = 0.0
    for i, row in enumerate(rows):
        layer = i + 1
        w = (L - layer) / L
        s = row["mean"] if identity else (row["mean"] + 1) / 2
        total += s ** ALPHA * w ** (1 - ALPHA)
    return total / (L - 1)


def main(out_dir: Path):
    steps = make_steps(random.Random(20260101))
    (out_dir / "synthetic.eetrace").write_bytes(encode(steps))
    prof = profile(steps)
    companion = {
        "num_layers": L, "topk": K, "steps": len(steps), "alpha": ALPHA,
        "profile": prof,
        "eas": {"hidden": eas(prof["hidden"], False),
                "logits": eas(prof["logits"], False),
                "topk": eas(prof["topk"], True)},
    }
    (out_dir / "synthetic_companion.json").write_text(
        json.dumps(companion, indent=1) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures"))
