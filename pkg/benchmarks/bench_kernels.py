"""Benchmark the compiled kernel against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [repeats]

Times the three hot kernels (truncated product, series inversion, series
composition) at several precisions over a prime field and an extension
field, then an end-to-end round-trip workload.  Both backends produce
identical outputs (asserted here and in tests/test_kernels.py); only the
wall clock differs.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from orbipar import kernels
from orbipar.fields import make_field
from orbipar.prng import SplitMix64


def bench_kernel(ctx, fn_name, n, repeats):
    rng = SplitMix64(n * 31 + len(fn_name))
    q = ctx.q
    a = [rng.randrange(q) for _ in range(n)]
    a[0] = 1 + rng.randrange(q - 1)
    g = [0] + [rng.randrange(q) for _ in range(n - 1)]
    fn = getattr(kernels, fn_name)
    args = {"vec_mul": (ctx, a, g, n), "vec_inverse": (ctx, a, n),
            "vec_compose": (ctx, a, g, n)}[fn_name]
    out = fn(*args)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return time.perf_counter() - t0, out


def bench_roundtrips(repeats):
    from orbipar.groups import cyclic
    from orbipar.local_galois import make_kummer
    from orbipar.parabolic import CoverScene, ScenePoint, random_datum, roundtrip_check

    field = make_field(7)
    ext = make_kummer(field, 3, 16)
    scene = CoverScene(group=cyclic(6),
                       points=(ScenePoint("p", ext, (0, 2, 4), (0, 1)),))
    rng = SplitMix64(12345)
    data = [random_datum(ext, 2, rng, character_exponent=1) for _ in range(repeats)]
    t0 = time.perf_counter()
    for d in data:
        assert roundtrip_check(d, scene).ok
    return time.perf_counter() - t0


def main():
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 3000
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built (run: python setup.py build_ext --inplace);"
              " benchmarking the pure backend only")
    fields = [("GF(5)", make_field(5)), ("GF(49)", make_field(7, 2))]
    print(f"{'kernel':<14}{'field':<8}{'N':>4}" +
          "".join(f"{b:>12}" for b in backends) + ("   speedup" if len(backends) > 1 else ""))
    for fn_name in ("vec_mul", "vec_inverse", "vec_compose"):
        for fname, field in fields:
            for n in (8, 16, 32, 64):
                reps = max(repeats // (n if fn_name != "vec_compose" else n * 4), 10)
                times = {}
                outs = {}
                for b in backends:
                    kernels.set_backend(b)
                    times[b], outs[b] = bench_kernel(field.ctx, fn_name, n, reps)
                if len(backends) > 1:
                    assert outs["pure"] == outs["compiled"], "backend disagreement!"
                row = f"{fn_name:<14}{fname:<8}{n:>4}"
                for b in backends:
                    row += f"{times[b] / reps * 1e6:>10.1f}us"
                if len(backends) > 1:
                    row += f"{times['pure'] / times['compiled']:>9.1f}x"
                print(row)
    print()
    n_rt = 10
    for b in backends:
        kernels.set_backend(b)
        t = bench_roundtrips(n_rt)
        print(f"end-to-end: {n_rt} Z/6 round trips (rank 2, N=16), "
              f"{b}: {t:.2f}s ({t / n_rt * 1000:.0f} ms each)")


if __name__ == "__main__":
    main()
