"""Smoke test for the conewise Python extension.

Build and install the extension first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/conewise-*.whl

then run ``python python/smoke_test.py``.
"""

import math

import conewise


def close(a, b, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def main():
    r3 = conewise.Space.standard(3)
    assert r3.dim == 3
    assert r3.is_disjoint([1.0, 0.0, 0.0], [0.0, 2.0, 0.0])
    assert not r3.is_disjoint([1.0, 1.0, 0.0], [0.0, 2.0, 0.0])
    assert r3.is_disjoint_oracle([1.0, 0.0, 0.0], [0.0, -3.0, 0.0]) is True
    assert len(r3.bands()) == 8

    four = conewise.Space.four_ray()
    again = conewise.Space.from_json(four.to_json())
    assert again.dual_rays == four.dual_rays
    assert four.contains([0.0, 0.0, 1.0])
    assert math.isclose(four.regular_norm([0.0, 0.0, 1.0]), 1.0, rel_tol=1e-9)

    diag = conewise.Operator([[1.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 2.0]])
    swap = conewise.Operator([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert conewise.is_local(r3, diag)["value"] == "true"
    verdict = conewise.is_local(r3, swap)
    assert verdict["value"] == "false"
    cert = verdict["certificate"]
    assert r3.is_disjoint(cert["x"], cert["y"])
    assert not r3.is_disjoint(swap.apply(cert["x"]), cert["y"])
    assert conewise.is_disjointness_preserving(r3, swap)["value"] == "true"
    assert conewise.is_positive(r3, diag)["value"] == "true"

    rot = conewise.expm([[0.0, -1.0], [1.0, 0.0]], math.pi / 2)
    assert close(rot[0], [0.0, -1.0]) and close(rot[1], [1.0, 0.0])

    gen = conewise.Operator([[-1.0, 0.0], [0.0, -2.0]])
    res = conewise.resolvent(gen, 10.0)
    assert math.isclose(res[0][0], 1.0 / 11.0, rel_tol=1e-12)
    a_l = conewise.yosida(gen, 10.0)
    assert math.isclose(a_l.matrix[1][1], -20.0 / 12.0, rel_tol=1e-12)

    r2 = conewise.Space.standard(2)
    bounded = conewise.thm_bounded_local(r2, gen)
    assert bounded["status"] == "pass", bounded["reason"]
    yos = conewise.thm_local_resolvents(r2, gen, lambdas=[10.0, 100.0], ts=[0.1, 1.0])
    assert yos["status"] == "pass"
    rotation = conewise.Operator([[0.0, -1.0], [1.0, 0.0]])
    unmet = conewise.thm_generator_local(r2, rotation)
    assert unmet["status"] == "not_applicable"
    assert conewise.cor_positive_resolvents(r2, gen, 1.0)["status"] == "pass"

    k = conewise.diffusion_kernel(0.1, 0.3, 0.6)
    assert k["value"] - k["tail_bound"] > 0.0
    w = conewise.diffusion_not_dp(0.05)
    assert w["inputs_disjoint"] == "true" and w["outputs_disjoint"] == "false"
    assert conewise.demos_all()["status"] == "pass"

    try:
        conewise.Space([[1.0, 0.0]])
    except ValueError as e:
        assert "not pointed" in str(e)
    else:
        raise AssertionError("a half-plane is not pointed")

    print("conewise smoke test passed")


if __name__ == "__main__":
    main()
