#!/usr/bin/env python3
"""Write an integral basis of the ring of integers of KL for the acceptance run.

Needs cypari2 (e.g. `pip install passagemath-pari`). Takes about four minutes and
several GB of PARI stack; the output is about 27 MB.

    python3 tools/kl_integral_basis.py data/kl_field.json kl_integral_basis.json
"""
import json
import sys

import cypari2


def main(field_path, out_path):
    pari = cypari2.Pari()
    pari.allocatemem(8 * 10**9)
    field = json.load(open(field_path))
    coeffs = field["defining_polynomial"]
    n = len(coeffs) - 1
    f = pari("Pol([" + ",".join(str(int(c)) for c in reversed(coeffs)) + "])")
    disc = pari.poldisc(f)
    ramified = [pari(int(p)) for p in field["ramified_primes"]]
    field_disc = pari(1)
    for p in ramified:
        field_disc *= p ** (n // 2)
    index = pari.sqrtint(abs(disc / field_disc))
    fa = pari.factor(index, 10**7)
    hints = [fa[i, 0] for i in range(int(pari.matsize(fa)[0]))] + ramified
    basis = pari.nfbasis([f, pari.Vec(hints)])
    hnf = pari.matrix(n, n, [pari.polcoef(b, j) for b in basis for j in range(n)])
    if abs(disc * pari.matdet(hnf) ** 2) != field_disc:
        sys.exit("basis discriminant does not match the ramified primes")

    # Coefficient-space LLL keeps the embedding well conditioned; the
    # non-constant coordinates are weighted up so that 1 stays in the basis.
    d = pari.denominator(hnf)
    weight = pari(2) ** (len(bin(int(d))) + 64)
    scaled = pari.matrix(n, n, [hnf[i, j] * d * (1 if j == 0 else weight) for i in range(n) for j in range(n)])
    u = pari.qflll(pari.mattranspose(scaled))
    if abs(pari.matdet(u)) != 1:
        sys.exit("qflll did not return a unimodular transform")
    reduced = pari.mattranspose(u) * hnf
    rows = [[str(reduced[i, j]) for j in range(n)] for i in range(n)]
    one = ["1"] + ["0"] * (n - 1)
    where = [i for i, r in enumerate(rows) if r in (one, ["-1"] + ["0"] * (n - 1))]
    if not where:
        sys.exit("1 did not survive the reduction; raise the weight")
    rows.pop(where[0])
    rows.insert(0, one)
    json.dump({"format_version": 1, "name": "kl-maximal-order",
               "provenance": "PARI/GP nfbasis (basis discriminant checked against the ramified primes), "
                             "then qflll on power-basis coordinates with 1 kept as the first element",
               "elements": rows}, open(out_path, "w"), separators=(",", ":"))


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(sys.argv[1], sys.argv[2])
