"""Smoke test for the randstab extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import math

import randstab


def check(name, ok, detail=""):
    print(f"{'pass' if ok else 'FAIL'}  {name}  {detail}")
    return ok


def main():
    results = []

    harris = randstab.Compounder("harris:a=3,k=2")
    gamma = randstab.Law("gamma:beta=0.5")
    c = 1.0 / 3.0
    residual = max(
        abs(harris.eval_real(gamma.eval(c * s).real) - gamma.eval(s).real)
        for s in (0.01, 0.1, 1.0, 10.0, 100.0)
    )
    results.append(check("harris stabilises gamma(1/2)", residual < 1e-12, f"{residual:.2e}"))

    report = randstab.verify("harris:a=3,k=2", transform="gamma:beta=0.5", c=c)
    results.append(check("verify report", report["pass"] and report["max_residual"] < 1e-12))

    found = randstab.identify(transform="gamma:beta=0.5", c=c)
    matched = found["matched"]
    results.append(
        check("identify harris", matched["family"] == "harris" and matched["params"]["k"] == 2)
    )
    bad = randstab.identify(transform="gamma:beta=0.7", c=0.5)
    results.append(check("gamma(0.7) is not a pgf", bad["verdict"] == "not-a-pgf"))

    table = randstab.extract_pmf("harris:a=2,k=2")
    results.append(
        check("harris(2,2) mass at 1", abs(table["coeffs"][1] - math.sqrt(0.5)) < 1e-12)
    )

    cf = randstab.Law("linnik:alpha=1.5,lambda=1")
    z = cf.eval(-2.0)
    results.append(check("linnik cf", cf.kind == "cf" and abs(z - 1 / (1 + 2**1.5)) < 1e-15))

    x = randstab.Law("gamma:beta=1").sample(5000, seed=1, stream=0)
    y = randstab.Law("gamma:beta=1").sample(5000, seed=1, stream=1)
    statistic, p_value = randstab.ks_two_sample(x, y)
    results.append(check("ks same law", p_value > 1e-3, f"p = {p_value:.3f}"))
    same = randstab.Law("gamma:beta=1").sample(5000, seed=1, stream=0)
    results.append(check("seeded batches repeat", same == x))

    poisson = randstab.DiscreteLaw("d:pstable:alpha=1,lambda=1")
    counts = poisson.sample(20000, seed=3)
    exact = [math.exp(-1) / math.factorial(k) for k in range(30)]
    tv = randstab.tv_distance_pmf(counts, exact)
    results.append(check("poisson tv", tv < 0.02, f"{tv:.4f}"))

    mc = randstab.monte_carlo("geometric1:p=0.25", "ml:alpha=0.5,lambda=1", 0.0625, samples=20000, seed=7)
    results.append(check("monte carlo", mc["pass"], f"p = {mc['p_value']:.3f}"))

    try:
        randstab.Compounder("poisson:lambda=1")
        results.append(check("unknown tag rejected", False))
    except randstab.RandstabError as e:
        results.append(check("unknown tag rejected", "poisson" in str(e)))

    suite = randstab.run_suite()
    results.append(check("suite paper", suite["pass"], f"{len(suite['entries'])} checks"))

    if not all(results):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
