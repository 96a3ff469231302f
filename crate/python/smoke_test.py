"""Smoke test for the l1minimax extension module.

Build and run from the repository root:

    cargo build -p l1minimax-py --features extension-module --release
    cp target/release/libl1minimax_py.so python/l1minimax.so
    python3 python/smoke_test.py
"""

import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import l1minimax as m  # noqa: E402


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    st = m.Measure.spike_and_tails(1.0)
    assert st.atoms() == [(0.0, 1.0)]
    assert close(st.log_partition(1.0), 0.3689811354013154, 1e-12)
    assert close(m.Measure.spike_and_tails_scaled(2.0, 4.0).log_partition(2.0), 0.3689811354013154, 1e-12)

    jeffreys = m.Measure.lebesgue()
    assert close(jeffreys.integrate_exp(1.0, 0.0, 0.0), 0.5 * math.log(2 * math.pi), 1e-14)

    custom = m.Measure([(0.5, 2.0)], [(1.0, math.inf, 0.25)])
    assert custom.density(3.0) == 0.25 and custom.density(0.0) == 0.0

    regret, argmax, divergent = st.worst_case_regret(1.0)
    assert not divergent and m.shtarkov_exact(1, 1.0) <= regret + 1e-12

    assert close(m.shtarkov_exact(1, 2.0), 0.008454859348146254, 1e-11)
    assert close(m.lambda_star(1.0, 100, 1_000_000), 47.98525912188081, 1e-12)
    ratio = m.regret_upper_bound(1.0, 1.0, 100, 1_000_000) / m.minimax_regret_lower(1.0, 100.0, 1_000_000)
    assert 2.0 <= ratio <= 2.1

    rows = m.sweep([0.5, 0.1, 2.0], grid=256)
    assert [r["lambda"] for r in rows] == [0.1, 0.5, 2.0]

    run = m.run_online(50, 20, data="gaussian", seed=3)
    assert run["cumulative_regret_ball"] <= run["bound"]
    assert run["telescoping_gap"] <= 1e-7

    assert all(close(a, b, 1e-12) for a, b in zip(m.l1_ball_project([0.9, -0.6], 1.0), [0.65, -0.35]))
    assert m.soft_threshold(-3.0, 1.0) == -2.0
    assert m.bayes_risk_three_point(0.01) <= m.prior_entropy(0.01)
    assert len(m.infinite_dim_weights(1.0, 5)) == 5

    for bad in (lambda: m.shtarkov_exact(1, -1.0), lambda: m.Measure([], [(2.0, 1.0, 1.0)]),
                lambda: m.run_online(5, 100)):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
