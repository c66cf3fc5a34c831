#!/usr/bin/env python3
"""Generate a table of imaginary parts of the first nontrivial zeta zeros.

Output format matches the plain zero tables read by `spectral analyze --input`:
one height per line, nine decimals, no header.

The lowest zeros come from mpmath.zetazero. Above that the Hardy Z function is
evaluated with the Riemann-Siegel formula (remainder terms C0..C3, fitted as
Chebyshev series in the fractional part p), zeros are bracketed on a fine grid
and refined by vectorised bisection. Sampled zeros are checked against mpmath.

usage: gen_zeta_zeros.py COUNT OUTPUT
"""

import sys

import mpmath
import numpy as np
from numpy.polynomial import chebyshev as cheb

LOW_COUNT = 200
GRID_STEP = 0.02
CHUNK = 20000


def remainder_fits(degree=60):
    mpmath.mp.dps = 50
    pi = mpmath.pi

    def psi(p):
        return mpmath.cos(2 * pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * pi * p)

    nodes = np.cos(np.pi * (np.arange(degree + 1) + 0.5) / (degree + 1))
    rows = {0: [], 1: [], 2: [], 3: []}
    for x in nodes:
        # Chebyshev nodes never hit the removable points p = 1/4, 3/4 exactly.
        p = mpmath.mpf((x + 1) / 2)
        d = mpmath.taylor(psi, p, 9)
        d = [d[k] * mpmath.factorial(k) for k in range(10)]
        rows[0].append(d[0])
        rows[1].append(-d[3] / (96 * pi**2))
        rows[2].append(d[2] / (64 * pi**2) + d[6] / (18432 * pi**4))
        rows[3].append(-d[1] / (64 * pi**2) - d[5] / (3840 * pi**4) - d[9] / (5308416 * pi**6))
    fits = []
    for k in range(4):
        vals = np.array([float(v) for v in rows[k]])
        fits.append(cheb.chebfit(nodes, vals, degree))
    return fits


FITS = None


def theta(t):
    return (t / 2) * np.log(t / (2 * np.pi)) - t / 2 - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


def hardy_z(t):
    t = np.asarray(t, dtype=float)
    a = np.sqrt(t / (2 * np.pi))
    n_terms = np.floor(a).astype(int)
    p = a - n_terms
    nmax = int(n_terms.max())
    n = np.arange(1, nmax + 1, dtype=float)
    th = theta(t)
    phase = th[:, None] - t[:, None] * np.log(n)[None, :]
    terms = np.cos(phase) / np.sqrt(n)[None, :]
    mask = n[None, :] <= n_terms[:, None]
    main = 2.0 * np.sum(np.where(mask, terms, 0.0), axis=1)
    x = 2 * p - 1
    corr = np.zeros_like(t)
    for k, c in enumerate(FITS):
        corr += cheb.chebval(x, c) * a ** (-k)
    sign = np.where(n_terms % 2 == 1, 1.0, -1.0)
    return main + sign * a ** (-0.5) * corr


def refine(lo, hi, zlo):
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        zm = hardy_z(mid)
        same = np.sign(zm) == np.sign(zlo)
        lo = np.where(same, mid, lo)
        zlo = np.where(same, zm, zlo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def main():
    global FITS
    count = int(sys.argv[1])
    out = sys.argv[2]
    FITS = remainder_fits()

    mpmath.mp.dps = 20
    zeros = [float(mpmath.zetazero(n).imag) for n in range(1, LOW_COUNT + 1)]
    start = 0.5 * (zeros[-1] + float(mpmath.zetazero(LOW_COUNT + 1).imag))

    t0 = start
    while len(zeros) < count:
        grid = t0 + GRID_STEP * np.arange(CHUNK + 1)
        z = hardy_z(grid)
        idx = np.nonzero(np.sign(z[:-1]) != np.sign(z[1:]))[0]
        if idx.size:
            zeros.extend(refine(grid[idx], grid[idx + 1], z[idx]).tolist())
        t0 = grid[-1]
        print(f"t={t0:.1f} zeros={len(zeros)}", file=sys.stderr)
    zeros = zeros[:count]

    mpmath.mp.dps = 20
    checks = [LOW_COUNT + 1, 500, 1000, 5000, 20000, count]
    worst = 0.0
    for n in checks:
        if n <= count:
            ref = float(mpmath.zetazero(n).imag)
            err = abs(ref - zeros[n - 1])
            worst = max(worst, err)
            print(f"check n={n}: table={zeros[n-1]:.9f} mpmath={ref:.9f} err={err:.2e}", file=sys.stderr)
    if worst > 1e-6:
        sys.exit("zero table failed the mpmath cross-check")
    if np.any(np.diff(zeros) <= 0):
        sys.exit("zero table not strictly increasing")

    with open(out, "w") as f:
        for g in zeros:
            f.write(f"{g:.9f}\n")


if __name__ == "__main__":
    main()
