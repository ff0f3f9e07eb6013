"""Small invocations of every subcommand, used by the determinism checks."""

SMOKE = [
    ["delta", "--x", "100", "10.5"],
    ["delta", "--lo", "1", "--hi", "200"],
    ["delta", "--primes", "1", "1000"],
    ["sweep", "--grid", "100,1000,10000,30000", "--segment-size", "4096"],
    ["mean-square", "--T", "1000", "--cross-check"],
    ["discrete-mean-square", "--x", "20000"],
    ["discrete-mean-square", "--x", "50", "--samples"],
    ["furuya", "--x", "1000"],
    ["shifted-moment", "--T", "1000", "--hmax", "5"],
    ["voronoi", "--x", "1000", "2500.5", "--N", "10"],
    ["voronoi", "--T", "1000", "--N", "5", "--samples", "101"],
    ["hb-verify", "--n-max", "1000", "--k", "2", "--z", "23"],
    ["hb-verify", "--n", "97", "--k", "3"],
    ["spacing", "--m1", "4", "--m2", "4", "--h", "4", "--tol", "0.01"],
    ["spacing", "--t", "2", "3", "2"],
    ["quadruplets", "--m", "30", "--delta", "0.001"],
    ["close-pairs", "--n", "1000", "--x", "10"],
    ["pair-proximity", "--instances", "50"],
    ["t-sum", "--n1", "64", "--n2", "64"],
    ["expsum-suite", "--instances", "50"],
    ["type-sum", "--m1", "4", "--m2", "4", "--h", "2", "--l", "8"],
    ["type-sum", "--m1", "4", "--m2", "4", "--h", "4", "--l", "16", "--eta-mode", "arbitrary", "--random-xi"],
    ["constants", "--n-terms", "10000"],
]


def run_smoke(tmp_dir, threads: int) -> dict[str, bytes]:
    """Run every smoke invocation into files; map command line to output bytes."""
    from primedelta.cli import main

    out = {}
    for i, argv in enumerate(SMOKE):
        path = tmp_dir / f"smoke-{threads}-{i}.csv"
        status = main(argv + ["--threads", str(threads), "--out", str(path)])
        assert status == 0, (argv, status)
        out[" ".join(argv)] = path.read_bytes()
    return out
