"""Reference values for the elliptic kernel tests.

Evaluates Weierstrass p, p', zeta, sigma through Jacobi theta functions
(mpmath.jtheta) and Jacobi sn through mpmath.ellipfun. None of this shares
a code path with the C++ Laurent/duplication implementation.

Writes a golden-vector file (JSON lines, decimal strings) and prints a few
scalar constants that are frozen into the unit tests.

    python3 theta_oracle.py --out ../data/golden_sample.jsonl
"""
import argparse
import json

import mpmath as mp


def lattice(m):
    """Half-periods and roots of the Lame-normalised lattice (e1 - e3 = 1)."""
    m = mp.mpf(m)
    e1 = (2 - m) / 3
    e2 = (2 * m - 1) / 3
    e3 = -(m + 1) / 3
    omega = mp.ellipk(m)
    tau = mp.ellipk(1 - m)
    return e1, e2, e3, omega, tau


class ThetaWeierstrass:
    def __init__(self, m):
        self.e1, self.e2, self.e3, self.omega, self.tau = lattice(m)
        self.q = mp.exp(-mp.pi * self.tau / self.omega)
        w = self.omega
        t1p0 = mp.jtheta(1, 0, self.q, 1)
        t1ppp0 = mp.jtheta(1, 0, self.q, 3)
        self.t1p0 = t1p0
        self.eta = -mp.pi ** 2 * t1ppp0 / (12 * w * t1p0)
        self.s = mp.pi / (2 * w)

    def _th(self, z, d):
        return mp.jtheta(1, self.s * z, self.q, d)

    def zeta(self, z):
        return self.eta * z / self.omega + self.s * self._th(z, 1) / self._th(z, 0)

    def wp(self, z):
        t0, t1, t2 = self._th(z, 0), self._th(z, 1), self._th(z, 2)
        r = t1 / t0
        return -self.eta / self.omega + self.s ** 2 * (r * r - t2 / t0)

    def wpp(self, z):
        t0, t1, t2, t3 = (self._th(z, d) for d in range(4))
        d2 = t3 / t0 - 3 * t1 * t2 / t0 ** 2 + 2 * (t1 / t0) ** 3
        return -self.s ** 3 * d2

    def sigma(self, z):
        return (1 / self.s) * mp.exp(self.eta * z * z / (2 * self.omega)) * self._th(z, 0) / self.t1p0


def lattice_sum_wp(z, m, n_max):
    """Raw symmetric lattice sum for p(z); slow, used only as a cross-check."""
    _, _, _, w, t = lattice(m)
    total = 1 / z ** 2
    for a in range(-n_max, n_max + 1):
        for b in range(-n_max, n_max + 1):
            if a == 0 and b == 0:
                continue
            lam = 2 * a * w + 2j * b * t
            total += 1 / (z - lam) ** 2 - 1 / lam ** 2
    return total


def evaluate(fn, m, z):
    if fn == "sn":
        return mp.mpc(mp.ellipfun("sn", mp.re(z), m=mp.mpf(m)))
    tw = ThetaWeierstrass(m)
    return getattr(tw, fn)(z)


POINTS = [
    "1.0", "0.8", "1.2", "0.7+0.3j", "0.3+0.9j", "0.5+0.2j", "-1.3+0.45j",
    "2.5-1.1j", "-3.1+4.2j", "0.9+1.7j",
]
SN_POINTS = ["0.9", "0.3", "1.7", "-2.4", "5.5"]
MODULI = ["0.25", "0.5", "0.75"]


def records(digits):
    mp.mp.dps = digits
    out = []
    for m in MODULI:
        for zs in POINTS:
            z = mp.mpc(complex(zs.replace("j", "j")).real, complex(zs).imag)
            for fn in ("wp", "wpp", "zeta", "sigma"):
                out.append((fn, m, z, evaluate(fn, m, z)))
        for xs in SN_POINTS:
            z = mp.mpc(mp.mpf(xs), 0)
            out.append(("sn", m, z, evaluate("sn", m, z)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", required=True)
    ap.add_argument("--digits", type=int, default=40)
    args = ap.parse_args()

    base = records(args.digits)
    doubled = records(2 * args.digits)
    mp.mp.dps = 2 * args.digits
    worst = mp.mpf(0)
    for (_, _, _, a), (_, _, _, b) in zip(base, doubled):
        worst = max(worst, abs(a - b) / max(abs(b), mp.mpf(1)))
    print("precision-doubling worst relative change:", mp.nstr(worst, 5))

    mp.mp.dps = args.digits
    with open(args.out, "w") as fh:
        for fn, m, z, v in base:
            rec = {
                "fn": fn, "m": m,
                "z_re": mp.nstr(mp.re(z), 35, min_fixed=-5, max_fixed=5),
                "z_im": mp.nstr(mp.im(z), 35, min_fixed=-5, max_fixed=5),
                "val_re": mp.nstr(mp.re(v), 35),
                "val_im": mp.nstr(mp.im(v), 35),
            }
            fh.write(json.dumps(rec) + "\n")

    # Cross-check the theta route against the raw lattice sum at one point.
    mp.mp.dps = 20
    tw = ThetaWeierstrass("0.5")
    ref = tw.wp(mp.mpf(1))
    approx = [lattice_sum_wp(mp.mpf(1), "0.5", n) for n in (20, 40)]
    # Richardson on the O(1/N^2) tail of the symmetric sum.
    rich = (4 * approx[1] - approx[0]) / 3
    print("wp(1; g2=1,g3=0) theta  :", mp.nstr(ref, 20))
    print("wp(1; g2=1,g3=0) lattice:", mp.nstr(rich, 20))

    mp.mp.dps = 30
    for m in MODULI:
        tw = ThetaWeierstrass(m)
        print(f"m={m}: omega={mp.nstr(tw.omega, 20)} tau={mp.nstr(tw.tau, 20)} "
              f"eta={mp.nstr(tw.eta, 20)} eta'={mp.nstr(tw.zeta(1j * tw.tau), 20)}")


if __name__ == "__main__":
    main()
