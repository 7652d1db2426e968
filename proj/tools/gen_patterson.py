#!/usr/bin/env python3
"""Generate nested Gauss-Patterson rules for the uniform density on [-1, 1].

Each level adds n+1 nodes to an n-node rule; the new nodes are the roots of the
degree n+1 polynomial p that satisfies  int pi_n(x) p(x) x^k dx = 0, k = 0..n,
where pi_n is the node polynomial of the previous level. Weights are exact
integrals of the nodal Lagrange basis against rho = 1/2.

Usage: gen_patterson.py [levels] > src/patterson_table.inc
"""
import sys
import mpmath as mp

mp.mp.dps = 120


def legendre_rule(n):
    # Newton on P_n from Chebyshev-like initial guesses.
    xs, ws = [], []
    for i in range(1, n + 1):
        x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
        for _ in range(100):
            P = legendre_values(x, n)
            dp = n * (x * P[n] - P[n - 1]) / (x * x - 1)
            dx = P[n] / dp
            x -= dx
            if abs(dx) < mp.mpf(10) ** (-mp.mp.dps + 5):
                break
        P = legendre_values(x, n)
        dp = n * (x * P[n] - P[n - 1]) / (x * x - 1)
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    return xs, ws


def legendre_values(x, nmax):
    p = [mp.mpf(1), x]
    for k in range(1, nmax):
        p.append(((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1))
    return p[: nmax + 1]


def extend(nodes, gx, gw):
    n = len(nodes)
    m = n + 1

    def pin(x):
        r = mp.mpf(1)
        for t in nodes:
            r *= x - t
        return r

    # Matrix G[k][j] = int pi_n P_j P_k dx for j = 0..m, k = 0..n.
    vals = [(pin(x), legendre_values(x, m), w) for x, w in zip(gx, gw)]
    A = mp.zeros(n + 1, n + 1)
    rhs = mp.zeros(n + 1, 1)
    for k in range(n + 1):
        for j in range(m + 1):
            s = mp.mpf(0)
            for pv, P, w in vals:
                s += w * pv * P[j] * P[k]
            if j == m:
                rhs[k] = -s
            else:
                A[k, j] = s
    a = mp.lu_solve(A, rhs)
    coef = [a[j] for j in range(m)] + [mp.mpf(1)]

    def p(x):
        P = legendre_values(x, m)
        return mp.fsum(c * v for c, v in zip(coef, P))

    srt = sorted(nodes)
    brackets = [mp.mpf(-1)] + srt + [mp.mpf(1)]
    roots = []
    for lo, hi in zip(brackets[:-1], brackets[1:]):
        roots.append(mp.findroot(p, (lo, hi), solver="anderson"))
    return roots


def lagrange_weights(nodes, gx, gw):
    n = len(nodes)
    ws = []
    for i in range(n):
        s = mp.mpf(0)
        for x, w in zip(gx, gw):
            l = mp.mpf(1)
            for j in range(n):
                if j != i:
                    l *= (x - nodes[j]) / (nodes[i] - nodes[j])
            s += w * l
        ws.append(s / 2)
    return ws


def main():
    levels = int(sys.argv[1]) if len(sys.argv) > 1 else 7
    nodes = [mp.mpf(0)]
    out = [(list(nodes), [mp.mpf(1)])]
    for lev in range(1, levels):
        n = len(nodes)
        gx, gw = legendre_rule(2 * n + 4)
        nodes = sorted(nodes + extend(nodes, gx, gw))
        gx, gw = legendre_rule(len(nodes) + 2)
        out.append((nodes, lagrange_weights(nodes, gx, gw)))
        print(f"level {lev}: {len(nodes)} nodes", file=sys.stderr)
    print("// Generated by tools/gen_patterson.py. Do not edit.")
    print(f"constexpr int kPattersonLevels = {levels};")
    for lev, (xs, ws) in enumerate(out):
        print(f"constexpr double kPattersonNodes{lev}[] = {{")
        for x in xs:
            print(f"    {mp.nstr(x, 20, min_fixed=-1, max_fixed=1) if x != 0 else '0.0'},")
        print("};")
        print(f"constexpr double kPattersonWeights{lev}[] = {{")
        for w in ws:
            print(f"    {mp.nstr(w, 20, min_fixed=-1, max_fixed=1)},")
        print("};")


if __name__ == "__main__":
    main()
