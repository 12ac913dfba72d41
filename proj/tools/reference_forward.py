#!/usr/bin/env python3
"""Float64 reference forward pass over the fixture model.

Rebuilds the fixture weights from the SHA-256 stream and runs a plain,
cache-free forward pass with explicit causal attention. The results are
frozen into tests/fixtures/reference_forward.json.
"""
import hashlib
import json
import math
import struct
import sys
from pathlib import Path

import numpy as np

L, D, H, DFF, V, EOS = 4, 64, 4, 256, 257, 256
EPS, THETA = 1e-5, 10000.0
SEED = "eeprof-fixture-v1"
ORACLE_DELTAS = (0.6, 0.9)


def weights():
    def stream():
        counter = 0
        while True:
            block = hashlib.sha256(SEED.encode() + struct.pack("<Q", counter)).digest()
            counter += 1
            for (u,) in struct.iter_unpack("<I", block):
                yield np.float32(-0.08 + 0.16 * u / 2**32)

    s = stream()

    def mat(rows, cols):
        return np.array([next(s) for _ in range(rows * cols)],
                        dtype=np.float32).reshape(rows, cols).astype(np.float64)

    w = {"tok_embeddings": mat(V, D), "layers": []}
    for _ in range(L):
        w["layers"].append({"wq": mat(D, D), "wk": mat(D, D), "wv": mat(D, D),
                            "wo": mat(D, D), "w1": mat(D, DFF), "w2": mat(DFF, D)})
    w["lm_head"] = mat(D, V)
    return w


def rms(x):
    return x / np.sqrt(np.mean(x * x, axis=-1, keepdims=True) + EPS)


def rope(x):
    n, hd = x.shape[0], x.shape[-1]
    out = x.copy()
    for pos in range(n):
        for i in range(0, hd, 2):
            a = pos * THETA ** (-i / hd)
            c, s = math.cos(a), math.sin(a)
            x0, x1 = x[pos, :, i], x[pos, :, i + 1]
            out[pos, :, i] = x0 * c - x1 * s
            out[pos, :, i + 1] = x0 * s + x1 * c
    return out


def gelu(x):
    return 0.5 * x * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def forward(w, tokens):
    hd = D // H
    x = w["tok_embeddings"][tokens]
    n = len(tokens)
    taps = []
    for blk in w["layers"]:
        h = rms(x)
        q = rope((h @ blk["wq"]).reshape(n, H, hd))
        k = rope((h @ blk["wk"]).reshape(n, H, hd))
        v = (h @ blk["wv"]).reshape(n, H, hd)
        att = np.zeros((n, H, hd))
        for head in range(H):
            scores = q[:, head, :] @ k[:, head, :].T / math.sqrt(hd)
            scores[np.triu_indices(n, 1)] = -np.inf
            p = np.exp(scores - scores.max(axis=1, keepdims=True))
            p /= p.sum(axis=1, keepdims=True)
            att[:, head, :] = p @ v[:, head, :]
        x = x + att.reshape(n, D) @ blk["wo"]
        x = x + gelu(rms(x) @ blk["w1"]) @ blk["w2"]
        taps.append(x[-1].copy())
    return taps


def project(w, hidden):
    return rms(hidden) @ w["lm_head"]


def oracle(w, prompt, delta, steps=16):
    seq, exits, sims_at_exit, margin = list(prompt), [], [], math.inf
    for _ in range(steps):
        z = [project(w, h) for h in forward(w, seq)]
        sims = [float(zl @ z[-1] / (np.linalg.norm(zl) * np.linalg.norm(z[-1])))
                for zl in z]
        margin = min(margin, min(abs(x - delta) for x in sims[:-1]))
        k = next((i + 1 for i, x in enumerate(sims) if x >= delta), L)
        zk = z[k - 1]
        order = np.argsort(-zk, kind="stable")
        margin = min(margin, float(zk[order[0]] - zk[order[1]]))
        exits.append(k)
        sims_at_exit.append(sims[k - 1])
        seq.append(int(order[0]))
        if seq[-1] == EOS:
            break
    return {"delta": delta, "tokens": seq[len(prompt):], "exit_layers": exits,
            "exit_similarity": sims_at_exit, "min_margin": margin}


def main(out_dir: Path):
    w = weights()
    context = list(b"The quick brown fox")
    taps = forward(w, context)
    logits = [project(w, h) for h in taps]

    prompt = list(b"Question: 2+3?\nAnswer:")
    seq, margins = list(prompt), []
    for _ in range(32):
        z = project(w, forward(w, seq)[-1])
        order = np.argsort(-z, kind="stable")
        margins.append(float(z[order[0]] - z[order[1]]))
        seq.append(int(order[0]))
        if seq[-1] == EOS:
            break

    oracle_prompt = list(b"Question: 12 apples?\nAnswer:")
    transcripts = [oracle(w, oracle_prompt, delta) for delta in ORACLE_DELTAS]

    probe = np.array([math.sin(0.37 * i + 0.1) for i in range(D)], dtype=np.float32)
    probe = probe.astype(np.float64)
    ref = {
        "context": context,
        "final_logits_head": logits[-1][:8].tolist(),
        "final_logits_sum": float(logits[-1].sum()),
        "final_logits_abs_sum": float(np.abs(logits[-1]).sum()),
        "final_argmax": int(np.argmax(logits[-1])),
        "hidden_norms": [float(np.linalg.norm(h)) for h in taps],
        "layer_logits_sum": [float(z.sum()) for z in logits],
        "greedy_prompt": prompt,
        "greedy_tokens": seq[len(prompt):],
        "greedy_min_margin": min(margins),
        "oracle_prompt": oracle_prompt,
        "oracle_transcripts": transcripts,
        "probe_hidden": "sin(0.37 * i + 0.1), float32",
        "probe_logits_head": project(w, probe)[:8].tolist(),
        "probe_logits_sum": float(project(w, probe).sum()),
        "zero_logits_abs_max": float(np.abs(project(w, np.zeros(D))).max()),
    }
    (out_dir / "reference_forward.json").write_text(json.dumps(ref, indent=1) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures"))
