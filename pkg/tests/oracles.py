"""Independent high-precision evaluations used to freeze expected values.

Run ``python tests/oracles.py`` to regenerate the constants in conftest.py.
Only mpmath and closed forms are used here; nothing from the package.
"""

import mpmath as mp

mp.mp.dps = 40


def taps(beta):
    r = 2 * mp.sqrt(2)
    s2 = mp.sqrt(2)
    return [
        (1 + s2 * mp.cos(beta)) / r,
        (1 + s2 * mp.sin(beta)) / r,
        (1 - s2 * mp.cos(beta)) / r,
        (1 - s2 * mp.sin(beta)) / r,
    ]


def principal_vector(a):
    a0, a1, a2, a3 = a
    p = a0**2 - (a1 + a2) * a0 + a1 * a2 - a0 * a3
    return p, [mp.mpf(1), (a0 - a2) * a2 / p, a3 * a2 / p]


def branch_mass(a, n):
    """||F0^n e0||^2 by exact-ish 40-digit matrix powers."""
    F0 = mp.matrix([[a[0], 0, 0], [a[2], a[1], a[0]], [0, a[3], a[2]]])
    x = mp.matrix([1, 0, 0])
    for _ in range(n):
        x = F0 * x
    return sum(t**2 for t in x)


if __name__ == "__main__":
    b = mp.mpf("0.3")
    a = taps(b)
    p, v = principal_vector(a)
    print("TAPS_03 =", tuple(mp.nstr(t, 17) for t in a))
    print("LAMBDA_03 =", mp.nstr((mp.sin(b) - mp.cos(b)) / 2, 17))
    print("ALPHA_03 =", mp.nstr(a[0] ** 2, 17))
    print("S_03 =", mp.nstr(-mp.log(a[0] ** 2) / mp.log(2), 17))
    print("P_A0_03 =", mp.nstr(p, 17))
    print("V_03 =", tuple(mp.nstr(t, 17) for t in v))
    print("V_NORM2_03 =", mp.nstr(sum(t**2 for t in v), 17))
    print("GAP_03 =", mp.nstr(1 / mp.sqrt(2) / a[0], 17))
    print("LOG3_2 =", mp.nstr(mp.log(2) / mp.log(3), 17))
    for n in (60, 80):
        mu = branch_mass(a, n)
        r = mu / a[0] ** (2 * n)
        print(f"n={n}: r_n/|v|^2 - 1 = {mp.nstr(r / sum(t**2 for t in v) - 1, 6)}, "
              f"exponent - s = {mp.nstr(mp.log(mu) / (-n * mp.log(2)) + mp.log(a[0]**2) / mp.log(2), 6)}")
