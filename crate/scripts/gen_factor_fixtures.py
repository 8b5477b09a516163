#!/usr/bin/env python3
"""Generate the bundled q^r - 1 factorization fixtures.

Each q^r - 1 is split into cyclotomic values Phi_d(q) for d | r, and each
piece is factored with python-flint (ECM + quadratic sieve) in a child
process with a wall-clock limit. Pieces that time out are skipped, so the
corresponding (q, r) entries are simply absent from the output; the Rust
side reports them as missing fixtures.

Usage: gen_factor_fixtures.py OUT [--timeout SECS] [--cache FILE] SPEC...
where SPEC is q:rmin-rmax[:even] (e.g. 5:2-103, 3:2-268:even).
"""
import argparse
import json
import multiprocessing as mp
import os
import sys

import flint


def cyclotomic_value(d, q):
    return int(flint.fmpz_poly.cyclotomic(d)(q))


def _factor_worker(n, conn):
    conn.send([(int(p), int(e)) for p, e in flint.fmpz(n).factor()])
    conn.close()


def factor_with_timeout(n, timeout):
    if n == 1:
        return []
    parent, child = mp.Pipe(duplex=False)
    proc = mp.Process(target=_factor_worker, args=(n, child))
    proc.start()
    proc.join(timeout)
    if proc.is_alive():
        proc.kill()
        proc.join()
        return None
    return parent.recv()


def divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out")
    ap.add_argument("specs", nargs="+")
    ap.add_argument("--timeout", type=float, default=60.0)
    ap.add_argument("--cache", default="phi_cache.json")
    args = ap.parse_args()

    cache = {}
    if os.path.exists(args.cache):
        with open(args.cache) as f:
            cache = json.load(f)

    def piece(q, d):
        key = f"{q}:{d}"
        if key not in cache:
            fac = factor_with_timeout(cyclotomic_value(d, q), args.timeout)
            cache[key] = fac
            with open(args.cache, "w") as f:
                json.dump(cache, f)
            status = "timeout" if fac is None else "ok"
            print(f"Phi_{d}({q}): {status}", file=sys.stderr, flush=True)
        return cache[key]

    entries = {}
    for spec in args.specs:
        parts = spec.split(":")
        q = int(parts[0])
        lo, hi = map(int, parts[1].split("-"))
        even_only = len(parts) > 2 and parts[2] == "even"
        for r in range(lo, hi + 1):
            if even_only and r % 2:
                continue
            total = {}
            for d in divisors(r):
                fac = piece(q, d)
                if fac is None:
                    total = None
                    break
                for p, e in fac:
                    total[p] = total.get(p, 0) + e
            if total is None:
                continue
            prod = 1
            for p, e in total.items():
                prod *= p ** e
            assert prod == q ** r - 1, (q, r)
            entries[(q, r)] = sorted(total.items())

    with open(args.out, "w") as f:
        f.write("# q r p1[^e1] p2[^e2] ...   (q^r - 1 = prod p^e)\n")
        for (q, r) in sorted(entries):
            toks = [f"{p}^{e}" if e > 1 else str(p) for p, e in entries[(q, r)]]
            f.write(f"{q} {r} {' '.join(toks)}\n")


if __name__ == "__main__":
    main()
