"""Independent high-precision oracle values frozen into the test suite.

Uses mpmath at 50 digits and only textbook formulas, none of the package code.
Run it to regenerate ``tests/oracle_values.json``.
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 50


def h2(p):
    p = mp.mpf(p)
    if p in (0, 1):
        return mp.mpf(0)
    return -p * mp.log(p, 2) - (1 - p) * mp.log(1 - p, 2)


def eq16(s, xi):
    s, xi = mp.mpf(s), mp.mpf(xi)
    root = mp.sqrt(1 - 4 * xi * (1 - xi) * s)
    p_even_plus = (1 + (1 - 2 * xi * s) / root) / 2
    p_even_minus = (1 - (1 - 2 * (1 - xi) * s) / root) / 2
    return p_even_plus, 1 - p_even_plus, p_even_minus, 1 - p_even_minus


def joint_mi(xi, rows):
    # I = H(Y) - H(Y|X) from an explicit 2x2 joint
    px = [1 - mp.mpf(xi), mp.mpf(xi)]
    joint = [[px[i] * rows[i][j] for j in range(2)] for i in range(2)]
    py = [joint[0][j] + joint[1][j] for j in range(2)]
    hy = -sum(p * mp.log(p, 2) for p in py if p > 0)
    hyx = -sum(joint[i][j] * mp.log(rows[i][j], 2) for i in range(2) for j in range(2) if joint[i][j] > 0)
    return hy - hyx


def _golden(f, a, b):
    g = (mp.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    for _ in range(200):
        if f(c) > f(d):
            b, d = d, c
            c = b - g * (b - a)
        else:
            a, c = c, d
            d = a + g * (b - a)
    x = (a + b) / 2
    return x, f(x)


def main():
    out = {}
    out["h2_0.11"] = h2("0.11")
    pep, pop, pem, pom = eq16("0.5", "0.25")
    out["p_even_plus_s0.5_xi0.25"] = pep
    out["discriminant_root_s0.5_xi0.25"] = mp.sqrt(1 - 4 * mp.mpf("0.25") * mp.mpf("0.75") * mp.mpf("0.5"))
    out["mi_s0.5_xi0.25"] = joint_mi("0.25", [[pep, pop], [pem, pom]])
    out["helstrom_s_e-2_xi0.5"] = (1 - mp.sqrt(1 - mp.e**-2)) / 2
    out["cap_per_use_s0.25"] = 1 - h2((1 - mp.sqrt(mp.mpf("0.75"))) / 2)
    E = mp.mpf(1)
    out["ppm_cp_estar1"] = (1 - mp.e**-E) ** 2 / (mp.log(2) * (1 - 2 * mp.e**-E))
    out["ppm_cap_E1_M2"] = 1 - mp.e**-1
    out["bpsk_dolinar_cd_E0.5"] = 1 - h2((1 - mp.sqrt(1 - mp.e**-2)) / 2)
    out["approx2_1"] = mp.e / 2

    # OOK capacities at E = 0.1 over the duty cycle by dense grid + golden refinement
    E = mp.mpf("0.1")

    def ook_counting(xi):
        s = mp.e ** (-E / xi)
        return h2(xi * (1 - s)) - xi * h2(s)

    def ook_dolinar(xi):
        s = mp.e ** (-E / xi)
        pep, pop, pem, pom = eq16(s, xi)
        return joint_mi(xi, [[pep, pop], [pem, pom]])

    def ook_holevo(xi):
        s = mp.e ** (-E / xi)
        return h2((1 - mp.sqrt(1 - 4 * xi * (1 - xi) * (1 - s))) / 2)

    for name, f, hi in (("ook_counting", ook_counting, 1), ("ook_dolinar", ook_dolinar, mp.mpf("0.5")),
                        ("ook_holevo", ook_holevo, mp.mpf("0.5"))):
        mp.mp.dps = 30
        # coarse log grid over (1e-6, hi]
        xs = [mp.mpf(10) ** (-6 + 6 * mp.mpf(i) / 2000) * hi for i in range(2001)]
        xs = [x for x in xs if x <= hi]
        vals = [f(x) for x in xs]
        i = max(range(len(xs)), key=lambda k: vals[k])
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        x, v = _golden(f, a, b)
        out[f"{name}_E0.1"] = v
        out[f"{name}_xi_E0.1"] = x
        mp.mp.dps = 50

    frozen = {k: float(v) for k, v in out.items()}
    path = Path(__file__).resolve().parents[1] / "tests" / "oracle_values.json"
    path.write_text(json.dumps(frozen, indent=2, sort_keys=True) + "\n")
    for k, v in sorted(frozen.items()):
        print(f"{k} = {v!r}")


if __name__ == "__main__":
    main()
