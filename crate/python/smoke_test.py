"""Smoke test for the confmap extension module.

Build and install first:  maturin develop --release -m crates/py/Cargo.toml
"""

import json
import sys

import confmap


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    disk = confmap.Domain.disk()
    f = confmap.conformal_map(disk, "disk", center=0j)
    assert f.residual < 1e-12, f.residual
    assert close(f([0.3 + 0.2j])[0], 0.3 + 0.2j, 1e-12)

    square = confmap.Domain.polygon([0, 1, 1 + 1j, 1j], quad=[0, 1, 2, 3])
    q = confmap.conformal_map(square, "rectangle")
    assert close(q.modulus, 1.0, 1e-8), q.modulus

    ring = confmap.Domain.annulus(1.0, 2.0)
    a = confmap.conformal_map(ring, "annulus")
    assert close(a.modulus, 2.0, 1e-10), a.modulus

    hexagon = confmap.Domain.polygon([0, 2.1 - 0.4j, 3 + 0.9j, 2.3 + 2.2j, 0.7 + 2.5j, -0.6 + 1.2j])
    h = confmap.conformal_map(hexagon, "disk", tol=1e-10)
    z = [1.0 + 1.0j, 2.0 + 0.5j]
    w = h(z)
    assert all(abs(p - q) < 1e-8 for p, q in zip(h.invert(w), z))
    assert h.green(1.0 + 1.0j) < 0

    forward, inverse = h.compress(samples=1000)
    assert forward.degree <= 200 and inverse.degree <= 200
    assert forward.accuracy < 1e-6 and inverse.accuracy < 1e-6
    again = confmap.RationalApproximant.from_json(forward.to_json())
    assert again(z) == forward(z)
    assert set(json.loads(forward.to_json())) >= {"support", "values", "weights", "direction"}

    asym, series, _ = confmap.end_hitting_probability(18.20539)
    assert close(asym, 9.692555e-13, 5e-19), asym
    assert close(series, asym, 1e-3 * asym)

    svg = h.grid_svg(4, 8)
    assert svg.count("<path") == 13

    try:
        confmap.Domain.from_json("{not json")
    except confmap.GeometryFailure:
        pass
    else:
        raise AssertionError("malformed domain accepted")

    print(f"confmap {confmap.__version__}: {h!r}, forward degree {forward.degree}, "
          f"inverse degree {inverse.degree}, mu(square) = {q.modulus:.12f}, R = {a.modulus:.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
