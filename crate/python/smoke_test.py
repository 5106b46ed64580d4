"""Smoke test for the mwlab Python extension.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import mwlab


def main():
    q = mwlab.Group("mult")
    assert q.parse("6/4") == "3/2"
    assert q.order_mod("2", 7) == 3
    assert q.member_mod("4", ["2"], 7)
    assert not q.member_mod("3", ["2"], 7)

    e = mwlab.Group("ec:0,0,1,-1,0")
    p = "(0,0)"
    assert e.mul(p, 2) == "(1,0)"
    assert e.add(p, e.mul(p, -1)) == "O"
    order = e.group_order(5)
    assert abs(order - 6) <= 2 * 5 ** 0.5
    assert order % e.order_mod(p, 5) == 0

    code, r = mwlab.support_check(["2"], ["8"], primes=(3, 100))
    assert code == mwlab.EXIT_VIOLATED
    assert (r["witness"]["v"], r["witness"]["n"]) == (7, 1)

    code, r = mwlab.support_check(["2", "3"], ["3", "2"], primes=(3, 1000), workers=4)
    assert code == mwlab.EXIT_OK and r["verdict"] == "holds_on_scan"

    code, r = mwlab.cs_check("(1,0)", "(0,0)", backend="ec:0,0,1,-1,0", primes=(3, 300))
    assert code == mwlab.EXIT_VIOLATED

    code, r = mwlab.recover("2", "1024")
    assert code == mwlab.EXIT_OK and r["d"] == 10

    code, r = mwlab.detect(["360"], ["6", "10"], primes=(7, 10000))
    assert code == mwlab.EXIT_OK
    assert r["certificate"]["lambdas"] == [2, 1]

    code, r = mwlab.find_primes(["2", "3"], 5, [1, 0], max_hits=100, primes=(3, 1000))
    assert any(h["v"] == 41 and h["orders"] == [20, 8] for h in r["hits"])

    code, r = mwlab.experiment("erdos", 10, seed=3)
    assert code == mwlab.EXIT_OK and r["disagreements"] == 0

    code, text = mwlab.run(["cs-check", "--x", "2", "--y", "8", "--format", "text", "--primes", "3..100"])
    assert code == mwlab.EXIT_OK, text

    try:
        mwlab.run(["recover", "--p", "2"])
    except ValueError:
        pass
    else:
        raise AssertionError("missing --q accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
