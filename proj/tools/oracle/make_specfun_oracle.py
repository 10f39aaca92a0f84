#!/usr/bin/env python3
"""Generate high-precision reference values for the special-function tests.

Runs at development time only (mpmath, 50 significant digits) and writes
tests/data/specfun_oracle.csv. The C++ library never depends on it.
"""
import csv
import random
import sys
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50
random.seed(20240611)

rows = []


def cplx(v):
    v = mp.mpc(v)
    return float(v.real), float(v.imag)


def add(kind, p1, p2, x, y, value, tag=""):
    p1r, p1i = cplx(p1)
    p2r, p2i = cplx(p2)
    vr, vi = cplx(value)
    rows.append([kind, tag, repr(p1r), repr(p1i), repr(p2r), repr(p2i),
                 repr(float(x)), repr(float(y)), repr(vr), repr(vi)])


def hyperu_integral(a, b, x):
    # Integral representation, valid for Re a > 0.
    f = lambda t: mp.exp(-x * t) * t ** (a - 1) * (1 + t) ** (b - a - 1)
    return mp.quad(f, [0, 1, mp.inf]) / mp.gamma(a)


def whitw(k, m, x):
    return mp.exp(-x / 2) * x ** (m + mp.mpf(1) / 2) * mp.hyperu(m - k + mp.mpf(1) / 2, 1 + 2 * m, x)


def pq(z, zp, side, x):
    z, zp, x = mp.mpc(z), mp.mpc(zp), mp.mpf(x)
    s = z + zp
    mu = (z - zp) / 2
    g = mp.gamma(1 + side * z) * mp.gamma(1 + side * zp)
    zz = (z * zp).real
    den = mp.sqrt((g * x).real)
    p = zz ** mp.mpf(0.25) / den * whitw((side * s + 1) / 2, mu, x)
    q = zz ** mp.mpf(0.75) / den * whitw((side * s - 1) / 2, mu, x)
    return p, q


def kernel(z, zp, x, y):
    if x > 0 and y > 0:
        px, qx = pq(z, zp, 1, x)
        py, qy = pq(z, zp, 1, y)
        return (px * qy - qx * py) / (x - y)
    if x > 0 and y < 0:
        px, qx = pq(z, zp, 1, x)
        py, qy = pq(z, zp, -1, -y)
        return (px * py + qx * qy) / (x - y)
    if x < 0 and y > 0:
        px, qx = pq(z, zp, -1, -x)
        py, qy = pq(z, zp, 1, y)
        return (px * py + qx * qy) / (x - y)
    px, qx = pq(z, zp, -1, -x)
    py, qy = pq(z, zp, -1, -y)
    return (px * qy - qx * py) / (y - x)


def random_params():
    if random.random() < 0.5:
        re = random.uniform(-0.9, 0.9)
        im = random.choice([-1, 1]) * random.uniform(0.05, 1.0)
        z = mp.mpc(re, im)
        return z, mp.conj(z), "conjugate"
    m = random.choice([-1, 0, 1])
    z = random.uniform(m + 0.05, m + 0.95)
    zp = random.uniform(m + 0.05, m + 0.95)
    return mp.mpf(z), mp.mpf(zp), "real_interval"


# Named spot values.
add("gamma", mp.mpc(0.3, 0.4), 0, 0, 0, mp.gamma(mp.mpc(0.3, 0.4)), "spot")
uv = hyperu_integral(mp.mpf("0.8"), mp.mpf("1.3"), mp.mpf(2))
assert abs(uv - mp.hyperu(mp.mpf("0.8"), mp.mpf("1.3"), 2)) < mp.mpf(10) ** -40
add("kummer_u", mp.mpf("0.8"), mp.mpf("1.3"), 2.0, 0, uv, "spot")
add("whittaker_w", mp.mpf("0.55"), mp.mpf("0.2"), 1.5, 0, whitw(mp.mpf("0.55"), mp.mpf("0.2"), mp.mpf("1.5")), "spot")
p, q = pq(mp.mpf("0.2"), mp.mpf("0.1"), 1, 1)
add("pq_p", mp.mpf("0.2"), mp.mpf("0.1"), 1.0, 1, p, "spot")
add("pq_q", mp.mpf("0.2"), mp.mpf("0.1"), 1.0, 1, q, "spot")
add("kernel", mp.mpf("0.2"), mp.mpf("0.1"), 0.5, -0.7,
    kernel(mp.mpf("0.2"), mp.mpf("0.1"), mp.mpf("0.5"), mp.mpf("-0.7")), "spot")
add("kernel", mp.mpc(0.3, 0.4), mp.mpc(0.3, -0.4), 0.5, -0.7,
    kernel(mp.mpc(0.3, 0.4), mp.mpc(0.3, -0.4), mp.mpf("0.5"), mp.mpf("-0.7")), "spot")
add("kernel", mp.mpf("0.2"), mp.mpf("0.1"), 1.3, 2.1,
    kernel(mp.mpf("0.2"), mp.mpf("0.1"), mp.mpf("1.3"), mp.mpf("2.1")), "spot")
add("kernel", mp.mpf("0.2"), mp.mpf("0.1"), -0.4, -2.5,
    kernel(mp.mpf("0.2"), mp.mpf("0.1"), mp.mpf("-0.4"), mp.mpf("-2.5")), "spot")

# Kummer U over a spread of parameters, including integer-adjacent b.
for _ in range(40):
    a = mp.mpc(random.uniform(-2.5, 2.5), random.uniform(-1, 1) if random.random() < 0.5 else 0)
    b = mp.mpc(random.uniform(-1.5, 3.5), random.uniform(-1, 1) if random.random() < 0.5 else 0)
    x = mp.mpf(10) ** random.uniform(-2.5, 1.9)
    add("kummer_u", a, b, x, 0, mp.hyperu(a, b, x), "sweep")
for b in (mp.mpf(1) + mp.mpf("3e-7"), mp.mpf(2) - mp.mpf("4e-8"), mp.mpf(1)):
    for x in (mp.mpf("0.05"), mp.mpf("0.6"), mp.mpf("4"), mp.mpf("45")):
        add("kummer_u", mp.mpf("-0.3"), b, x, 0, mp.hyperu(mp.mpf("-0.3"), b, x), "near_integer_b")

# Acceptance table: 100 gamma tuples + 100 Whittaker tuples drawn from both regimes.
n_gamma = 0
while n_gamma < 100:
    w = mp.mpc(random.uniform(-6, 8), random.uniform(-6, 6) if random.random() < 0.8 else 0)
    if abs(w.imag) < 1e-12 and w.real <= 0 and abs(w.real - round(float(w.real))) < 1e-3:
        continue
    add("gamma", w, 0, 0, 0, mp.gamma(w), "acceptance")
    n_gamma += 1

n_w = 0
while n_w < 100:
    z, zp, regime = random_params()
    s = z + zp
    mu = (z - zp) / 2
    side = random.choice([1, -1])
    shift = random.choice([1, -1])
    kappa = (side * s + shift) / 2
    x = mp.mpf(10) ** random.uniform(-3, mp.log10(60))
    add("whittaker_w", kappa, mu, x, 0, whitw(kappa, mu, x), "acceptance_" + regime)
    n_w += 1

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "tests/data/specfun_oracle.csv"
with open(out, "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["kind", "tag", "p1_re", "p1_im", "p2_re", "p2_im", "x", "y", "value_re", "value_im"])
    w.writerows(rows)
print(f"wrote {len(rows)} rows to {out}")
