#!/usr/bin/env python3
"""Regenerates mlf_reference.inc: E_{rho,mu}(-t) and kernel integrals in mpmath.

Usage: python3 gen_mlf_reference.py > mlf_reference.inc
"""
import mpmath as mp


def mlf_neg(rho, mu, t):
    rho, mu, t = mp.mpf(rho), mp.mpf(mu), mp.mpf(t)
    if rho == 1 and mu == 1:
        return mp.exp(-t)
    w = t ** (1 / rho)
    if w > 2000 and rho < 1:
        return asymptotic(rho, mu, t)
    # Alternating series: working precision must absorb the e^w peak term.
    with mp.workdps(int(float(w) / 2.3) + 40):
        s, k, tk = mp.mpf(0), 0, mp.mpf(1)
        while True:
            term = tk * mp.rgamma(rho * k + mu)
            s += term
            if k > 5 and rho * k > 2 * w + 10 and abs(term) < mp.mpf(10) ** (-mp.mp.dps + 5) * abs(s):
                return +s
            k += 1
            tk *= -t


def asymptotic(rho, mu, t):
    # -sum_k (-t)^{-k} / Gamma(mu - rho k), truncated at its smallest term; the
    # exponentially small remainder is far below double precision once w > 2000.
    s, prev = mp.mpf(0), None
    for k in range(1, 5000):
        term = -((-t) ** -k) * mp.rgamma(mu - rho * k)
        arg = rho * k + 1 - mu
        env = mp.gamma(arg) * t ** -k if arg > 0 else abs(term)
        if prev is not None and arg > 1.5 and env > prev:
            break
        s += term
        prev = env
        if arg > 1.5 and env < mp.mpf(10) ** -35 * abs(s):
            break
    return s


def kernel(rho, lam, xi):
    return xi ** (rho - 1) * mlf_neg(rho, rho, lam * xi ** rho)


def main():
    mp.mp.dps = 30
    cases = []
    for rho in ("0.1", "0.25", "0.5", "0.75", "0.9", "1", "1.5"):
        for mu in ("1", rho, "0.5", "2"):
            for t in ("0", "0.01", "0.5", "1", "3", "10", "30", "100", "1000", "100000"):
                r, m, tt = mp.mpf(rho), mp.mpf(mu), mp.mpf(t)
                if tt ** (1 / r) > 2000 and r >= 1:
                    continue
                cases.append((rho, mu, t, mlf_neg(r, m, tt)))
    # Points near rho = 1 where only the slow branches certify.
    for rho, mu, t in (("0.999", "0.999", "40"), ("0.999", "1", "40"), ("0.9", "0.9", "20"),
                       ("0.99", "1", "100"), ("0.95", "0.95", "60")):
        cases.append((rho, mu, t, mlf_neg(mp.mpf(rho), mp.mpf(mu), mp.mpf(t))))
    print("// Generated by gen_mlf_reference.py; do not edit.")
    print("struct MlfRef { double rho, mu, t, value; };")
    print("inline constexpr MlfRef kMlfReference[] = {")
    seen = set()
    for rho, mu, t, v in cases:
        if (rho, mu, t) in seen or (v != 0 and abs(v) < mp.mpf("1e-300")):
            continue
        seen.add((rho, mu, t))
        print(f"    {{{rho}, {mu}, {t}, {mp.nstr(v, 20)}}},")
    print("};")

    print("struct PrimitiveRef { double rho, lambda, a, b, value; };")
    print("inline constexpr PrimitiveRef kPrimitiveReference[] = {")
    for rho, lam, a, b in (("0.6", "5", "0.1", "0.9"), ("0.3", "1", "0", "2"),
                           ("0.8", "10", "0.05", "0.5"), ("0.5", "100", "0.001", "0.01")):
        r, l = mp.mpf(rho), mp.mpf(lam)
        v = mp.quad(lambda x: kernel(r, l, x), [mp.mpf(a), (mp.mpf(a) + mp.mpf(b)) / 2, mp.mpf(b)])
        print(f"    {{{rho}, {lam}, {a}, {b}, {mp.nstr(v, 20)}}},")
    print("};")

    h = mp.fsum(mp.mpf(1) / n for n in range(1, 10001))
    print(f"inline constexpr double kHarmonic1e4 = {mp.nstr(h, 20)};")


if __name__ == "__main__":
    main()
