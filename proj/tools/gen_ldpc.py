#!/usr/bin/env python3
"""Generates the shipped rate-1/2 QC-LDPC parity-check matrix (alist format).

Construction: 12x24 base graph lifted by Z=682 (n=16368, k=8184). The parity
part is the usual dual-diagonal structure plus one weight-3 column with shifts
(1, 0, 1), which keeps encoding linear-time. Systematic columns mix weight-3
and weight-6 with pseudo-random circulant shifts, re-drawn until the lifted
graph has no 4-cycles.

Run from the repo root:  python3 tools/gen_ldpc.py [--check]
Writes core/data/ldpc_r12_n16368.alist. --check runs a short BPSK/AWGN
min-sum simulation to confirm the waterfall before shipping.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

MB, NB = 12, 24
Z = 682
SEED = 20240901
SYS_COL_WEIGHTS = [6, 3, 3, 6, 3, 3, 6, 3, 3, 6, 3, 3]


def build_base(rng):
    """Returns a MB x NB matrix of shifts, -1 for absent circulants."""
    base = -np.ones((MB, NB), dtype=int)

    # Parity part: special column + dual diagonal.
    base[0, MB] = 1
    base[MB // 2, MB] = 0
    base[MB - 1, MB] = 1
    for j in range(1, MB):
        base[j - 1, MB + j] = 0
        base[j, MB + j] = 0

    # Systematic columns: spread rows evenly, shifts drawn at random.
    row_load = base[:, MB:].astype(bool).sum(axis=1) * 0  # start from zero
    row_load = np.zeros(MB, dtype=int)
    for j, w in enumerate(SYS_COL_WEIGHTS):
        order = np.argsort(row_load + rng.random(MB) * 0.5)
        rows = np.sort(order[:w])
        for r in rows:
            base[r, j] = rng.integers(0, Z)
            row_load[r] += 1
    return base


def has_four_cycle(base):
    """4-cycle in the lifted graph: two columns sharing two rows with equal
    shift differences mod Z."""
    for c1 in range(NB):
        rows1 = np.flatnonzero(base[:, c1] >= 0)
        for c2 in range(c1 + 1, NB):
            shared = [r for r in rows1 if base[r, c2] >= 0]
            if len(shared) < 2:
                continue
            diffs = set()
            for i in range(len(shared)):
                for j in range(i + 1, len(shared)):
                    r1, r2 = shared[i], shared[j]
                    d1 = (base[r1, c1] - base[r2, c1]) % Z
                    d2 = (base[r1, c2] - base[r2, c2]) % Z
                    if d1 == d2:
                        return True
                    diffs.add((r1, r2, d1))
    return False


def lift(base):
    rows = [[] for _ in range(MB * Z)]
    cols = [[] for _ in range(NB * Z)]
    for bi in range(MB):
        for bj in range(NB):
            s = base[bi, bj]
            if s < 0:
                continue
            for z in range(Z):
                r = bi * Z + z
                c = bj * Z + (z + s) % Z
                rows[r].append(c)
                cols[c].append(r)
    return rows, cols


def write_alist(path, rows, cols):
    n, m = len(cols), len(rows)
    maxc = max(len(c) for c in cols)
    maxr = max(len(r) for r in rows)
    with open(path, "w") as f:
        f.write(f"{n} {m}\n{maxc} {maxr}\n")
        f.write(" ".join(str(len(c)) for c in cols) + " \n")
        f.write(" ".join(str(len(r)) for r in rows) + " \n")
        for c in cols:
            ent = [str(x + 1) for x in sorted(c)] + ["0"] * (maxc - len(c))
            f.write(" ".join(ent) + " \n")
        for r in rows:
            ent = [str(x + 1) for x in sorted(r)] + ["0"] * (maxr - len(r))
            f.write(" ".join(ent) + " \n")


def min_sum_check(rows, cols, ebn0_db, codewords=4, iters=50, alpha=0.75, seed=7):
    """All-zero-codeword BPSK/AWGN decode test; returns message bit errors."""
    n, m = len(cols), len(rows)
    rate = (n - m) / n
    esn0 = 10 ** (ebn0_db / 10) * 2 * rate  # BPSK: Es/N0 = 2 R Eb/N0
    sigma = np.sqrt(1.0 / esn0)
    rng = np.random.default_rng(seed)
    row_idx = [np.array(r) for r in rows]

    errors = 0
    for _ in range(codewords):
        y = 1.0 + sigma * rng.standard_normal(n)
        post = 2.0 * y / sigma**2
        msg = [np.zeros(len(r)) for r in rows]
        for _ in range(iters):
            for i, r in enumerate(row_idx):
                v = post[r] - msg[i]
                s = np.prod(np.sign(v + 1e-30))
                a = np.abs(v)
                k1 = np.argmin(a)
                m1 = a[k1]
                m2 = np.min(np.delete(a, k1)) if len(a) > 1 else m1
                mag = np.full(len(r), alpha * m1)
                mag[k1] = alpha * m2
                sign = s * np.sign(v + 1e-30)
                nm = sign * mag
                post[r] = v + nm
                msg[i] = nm
            hard = post < 0
            if not any(hard[r].sum() % 2 for r in row_idx):
                break
        errors += int(hard[: n - m].sum())
    return errors


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true", help="run the AWGN waterfall check")
    ap.add_argument("--out", default="core/data/ldpc_r12_n16368.alist")
    args = ap.parse_args()

    rng = np.random.default_rng(SEED)
    for attempt in range(200):
        base = build_base(rng)
        if not has_four_cycle(base):
            break
    else:
        sys.exit("could not find a 4-cycle-free base graph")

    rows, cols = lift(base)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_alist(out, rows, cols)
    print(f"wrote {out}: n={len(cols)} k={len(cols) - len(rows)} (attempt {attempt})")

    if args.check:
        for ebn0 in (1.2, 1.6, 2.0):
            e = min_sum_check(rows, cols, ebn0)
            print(f"  Eb/N0 {ebn0:.1f} dB: {e} message bit errors / {4 * (len(cols) - len(rows))}")


if __name__ == "__main__":
    main()
