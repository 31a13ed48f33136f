#!/usr/bin/env python3
"""Independent oracle for the golden comparison fixtures.

Recomputes the comparison statistics for each fixture case by direct
summation of the defining formulas (no FFT, no shared code with the crate),
then writes crates/specdiff/tests/fixtures/golden.json.

Usage:
  cargo test --test acceptance regenerate_golden_inputs -- --ignored
  python3 tools/golden_oracle.py
"""

import cmath
import json
import math
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
INPUTS = ROOT / "target" / "golden_inputs.json"
OUTPUT = ROOT / "crates" / "specdiff" / "tests" / "fixtures" / "golden.json"


def dft(x, lam):
    """sum_{t=1..n} x[t-1] * exp(-i*lam*t), time index starting at 1."""
    return sum(x[t - 1] * cmath.exp(complex(0.0, -lam * t)) for t in range(1, len(x) + 1))


def norm_sqr(z):
    return z.real * z.real + z.imag * z.imag


def stats(a, b):
    swapped = len(b) < len(a)
    x1, x2 = (b, a) if swapped else (a, b)
    n1, n2 = len(x1), len(x2)
    half = n1 // 2
    two_pi = 2.0 * math.pi

    i1, i2, i12 = [], [], []
    for k in range(1, half + 1):
        lam = two_pi * k / n1
        d1 = dft(x1, lam)
        d2 = dft(x2, lam)
        i1.append(norm_sqr(d1) / (two_pi * n1))
        i2.append(norm_sqr(d2) / (two_pi * n2))
        i12.append(d1 * d2.conjugate() / (two_pi * math.sqrt(n1 * n2)))

    d1s = sum(v * v for v in i1) / n1
    d2s = sum(v * v for v in i2) / n1
    d12 = sum(i1[j] * i2[j + 1] for j in range(half - 1)) / n1
    d_squared = (d1s + d2s) / 2.0 - 2.0 * d12
    r_squared = 2.0 * d_squared / (d1s + d2s)

    quart = sum(u**4 + v**4 for u, v in zip(i1, i2)) / (4.0 * n1)
    cross = sum(
        (i12[j] ** 2 * i12[j + 1].conjugate() ** 2).real for j in range(half - 1)
    ) / (2.0 * n1)
    raw = quart + cross
    return {
        "d1": d1s,
        "d2": d2s,
        "d12": d12,
        "d_squared": d_squared,
        "r_squared": r_squared,
        "sigma2_h0_raw": raw,
        "sigma2_h0": max(0.5 * raw, 0.0),
    }


def main():
    cases = json.loads(INPUTS.read_text())
    for case in cases:
        case.update(stats(case["a"], case["b"]))
    OUTPUT.parent.mkdir(parents=True, exist_ok=True)
    OUTPUT.write_text(json.dumps(cases, indent=1) + "\n")
    print(f"wrote {OUTPUT} ({len(cases)} cases)")


if __name__ == "__main__":
    main()
