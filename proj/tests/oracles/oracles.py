"""Independent oracles for frozen test values.

Closed forms, symbolic differentiation and dense sampling only; nothing here
calls into the C++ implementation.
"""
import math

import numpy as np
import sympy as sp
from scipy import integrate


def reduced_action_identity(omega):
    # pi * int_0^pi [1 + (1/sin^2 - w^2) sin^2] sin dr  with phi = r
    val, _ = integrate.quad(lambda r: (2.0 - omega**2 * math.sin(r) ** 2) * math.sin(r), 0, math.pi)
    return math.pi * val


def bumpy_jet_at_pole(eps):
    r, e = sp.symbols("r e")
    f = sp.sin(r) * (1 + e * sp.sin(r) ** 2)
    k = sp.simplify(-sp.diff(f, r, 2) / f)
    k0 = sp.limit(k.subs(e, eps), r, 0)
    return (float(f.subs({r: 0, e: eps})), float(sp.diff(f, r).subs({r: 0, e: eps})),
            float(sp.diff(f, r, 2).subs({r: 0, e: eps})), float(k0))


def bumpy_max_curvature(eps):
    rr = np.linspace(1e-6, math.pi - 1e-6, 200001)
    s, c = np.sin(rr), np.cos(rr)
    k = (1 + 3 * eps * s**2 - 6 * eps * c**2) / (1 + eps * s**2)
    return float(k.max()), float(k.min())


def round_y(r, rp, th):
    c = math.cos(r) * math.cos(rp) + math.sin(r) * math.sin(rp) * math.cos(th)
    return math.acos(max(-1.0, min(1.0, c))) ** 2


def lemma5_interval():
    lo, hi = math.inf, -math.inf
    for r in np.linspace(0.05, 0.5, 10):
        for rp in np.linspace(0.05, 0.5, 10):
            for mu in np.linspace(0.1, 3.0, 15):
                ymu = round_y(r, rp, mu)
                for th in np.linspace(0, mu, 200, endpoint=False)[1:]:
                    m = (math.cos(th) - math.cos(mu)) / (ymu - round_y(r, rp, th))
                    lo, hi = min(lo, m * r * rp), max(hi, m * r * rp)
    return lo, hi


def lightcone_round(r, rp, s):
    # 2 * int_0^mu sin(rp) / sqrt(s^2 - y) dtheta with theta = mu sin(t)
    ymax = round_y(r, rp, math.pi)
    if s * s >= ymax:
        mu = math.pi
    else:
        from scipy.optimize import brentq
        mu = brentq(lambda th: round_y(r, rp, th) - s * s, 0.0, math.pi, xtol=1e-15)
    g = lambda t: mu * math.cos(t) * math.sin(rp) / math.sqrt(max(s * s - round_y(r, rp, mu * math.sin(t)), 1e-300))
    val, _ = integrate.quad(g, 0, math.pi / 2, limit=200)
    return 2 * val


def christoffel_constant(rho):
    best = 0.0
    for rad in np.linspace(rho / 50, rho, 50):
        for ang in np.linspace(0, 2 * math.pi, 97):
            x, y = rad * math.cos(ang), rad * math.sin(ang)
            D = 1 - x * x - y * y
            g = np.array([[1 - y * y, x * y], [x * y, 1 - x * x]]) / D
            X = np.array([x, y])
            # unit sphere graph chart: Gamma^m_ij = x_m g_ij
            G = np.einsum("m,ij->mij", X, g)
            best = max(best, np.linalg.norm(G) / math.hypot(x, y))
    return best


if __name__ == "__main__":
    print("H(id, w=0)   =", repr(reduced_action_identity(0.0)), "4pi =", repr(4 * math.pi))
    print("H(id, w=.5)  =", repr(reduced_action_identity(0.5)), "4pi-pi/3 =", repr(4 * math.pi - math.pi / 3))
    print("bumpy(0.1) jet at 0 =", bumpy_jet_at_pole(0.1))
    print("bumpy(0.05) k range =", bumpy_max_curvature(0.05))
    print("d round(0.2,0.3,pi/2) =", repr(math.acos(math.cos(0.2) * math.cos(0.3))))
    print("d0(0.3,0.4,pi/3) =", repr(math.sqrt(0.13)))
    print("dgxx/dx(0.1,0) =", repr(0.2 / 0.9801))
    print("c_1 round pi/2 =", 2 * (math.cos(math.pi / 2) - 1) / math.sin(math.pi / 2) ** 2)
    print("lemma5 m*r*r' interval (round) =", lemma5_interval())
    for r, rp in [(0.05, 0.02), (0.05, 0.08), (0.1, 0.1), (0.1, 0.3), (0.3, 0.1)]:
        s = abs(r - rp) + 1e-4 * r
        v = lightcone_round(r, rp, s)
        print(f"lightcone round r={r} rp={rp} s={s:.6g}: {v!r}  ratio/sqrt(rp/r) = {v / math.sqrt(rp / r)!r}")
    for rho in (0.1, 0.2, 0.3):
        print("christoffel C(rho=%g) =" % rho, christoffel_constant(rho))


def lightcone_round_mp(r, rp, s, dps=40):
    """High-precision kernel on the unit sphere with theta = mu sin t."""
    import mpmath as mp
    mp.mp.dps = dps
    r, rp, s = mp.mpf(r), mp.mpf(rp), mp.mpf(s)
    y = lambda th: mp.acos(mp.cos(r) * mp.cos(rp) + mp.sin(r) * mp.sin(rp) * mp.cos(th)) ** 2
    if s * s >= y(mp.pi):
        mu = mp.pi
    else:
        mu = mp.findroot(lambda th: y(th) - s * s, (mp.mpf(0), mp.pi), solver="anderson")
    def g(t):
        gap = s * s - y(mu * mp.sin(t))
        return mu * mp.cos(t) * mp.sin(rp) / mp.sqrt(gap) if gap > 0 else mp.mpf(0)
    return 2 * mp.quad(g, [0, mp.pi / 4, mp.pi / 2])


if __name__ == "__main__":
    for r, rp, s in [(0.1, 0.3, 0.20001), (0.3, 0.1, 0.20003), (0.2, 0.25, 0.3), (0.4, 0.4, 0.5)]:
        print("lightcone mp", r, rp, s, mp_val := lightcone_round_mp(r, rp, s))
