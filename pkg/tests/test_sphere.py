import itertools
import math
import random

import numpy as np
import pytest

from spherecount.sphere import (
    CubeGridSpec,
    GridTooLargeError,
    distance,
    exp_map,
    generate_grid,
    grid_lattice,
    pairwise_distances,
    project,
    project_inverse,
    project_many,
    tangent_basis,
)

from util import random_sphere_point


def expected_grid_size(n, k):
    return (2 ** (k + 1) + 1) ** (n + 1) - (2 ** (k + 1) - 1) ** (n + 1)


def test_grid_sizes_match_closed_form():
    for n in (1, 2, 3):
        for k in (1, 2, 3):
            if n == 3 and k == 3:
                continue
            spec = CubeGridSpec(n=n, k=k)
            lattice = grid_lattice(spec)
            assert len(lattice) == expected_grid_size(n, k) == spec.point_count()


def test_grid_no_duplicates_and_antipodal_closure():
    for n, k in [(1, 3), (2, 2)]:
        lattice = grid_lattice(CubeGridSpec(n=n, k=k))
        rows = {tuple(r) for r in lattice.tolist()}
        assert len(rows) == len(lattice)
        for r in rows:
            assert tuple(-v for v in r) in rows
        half = 2**k
        assert all(max(abs(v) for v in r) == half for r in rows)


def test_generate_grid_scales_lattice():
    spec = CubeGridSpec(n=1, k=2)
    pts = np.array(list(generate_grid(spec)))
    assert pts.shape == (spec.point_count(), 2)
    assert np.max(np.abs(pts), axis=1).min() == 1.0
    assert np.allclose(pts * 4, np.round(pts * 4))


def test_grid_cap():
    with pytest.raises(GridTooLargeError):
        grid_lattice(CubeGridSpec(n=2, k=12), cap=10**6)


def test_projection_basics():
    rng = random.Random(3)
    for _ in range(100):
        y = np.array([rng.uniform(-1, 1) for _ in range(3)])
        y[rng.randrange(3)] = rng.choice([-1.0, 1.0])
        x = project(y)
        assert abs(np.linalg.norm(x) - 1.0) < 1e-12
        back = project_inverse(x)
        assert abs(np.max(np.abs(back)) - 1.0) < 1e-12
        assert np.allclose(project(back), x, atol=1e-12)
    with pytest.raises(ValueError):
        project(np.zeros(3))


def test_projection_is_odd():
    rng = random.Random(5)
    Y = np.array([[rng.uniform(-1, 1) for _ in range(3)] for _ in range(50)])
    Y[:, 0] = 1.0
    assert np.allclose(project_many(-Y), -project_many(Y), atol=0)


def test_distance_properties():
    rng = random.Random(7)
    for _ in range(100):
        x = random_sphere_point(rng, 3)
        y = random_sphere_point(rng, 3)
        d = distance(x, y)
        assert 0.0 <= d <= math.pi
        assert abs(d - distance(y, x)) < 1e-15
    x = random_sphere_point(rng, 3)
    assert distance(x, x) == 0.0
    assert abs(distance(x, -x) - math.pi) < 1e-12


def test_pairwise_distances_matches_scalar():
    rng = random.Random(9)
    X = np.stack([random_sphere_point(rng, 3) for _ in range(12)])
    D = pairwise_distances(X)
    for i in range(12):
        for j in range(12):
            assert abs(D[i, j] - distance(X[i], X[j])) < 1e-12


def test_projection_distortion_bound():
    # d(phi(y1), phi(y2)) <= (pi/2) ||y1 - y2||_2 on the cube surface
    rng = random.Random(11)
    for _ in range(500):
        n = rng.choice([1, 2])
        y1 = np.array([rng.uniform(-1, 1) for _ in range(n + 1)])
        y1[rng.randrange(n + 1)] = rng.choice([-1.0, 1.0])
        y2 = y1 + np.array([rng.uniform(-0.2, 0.2) for _ in range(n + 1)])
        y2 /= np.max(np.abs(y2))
        d = distance(project(y1), project(y2))
        assert d <= 0.5 * math.pi * np.linalg.norm(y1 - y2) + 1e-12


@pytest.mark.parametrize("n,kmax", [(1, 4), (2, 2)])
def test_grid_separation_lemma_exhaustive(n, kmax):
    # distinct projected grid points are at least eta / (2 sqrt(n+1)) apart
    for k in range(1, kmax + 1):
        spec = CubeGridSpec(n=n, k=k)
        X = project_many(np.array(list(generate_grid(spec))))
        D = pairwise_distances(X)
        np.fill_diagonal(D, np.inf)
        assert D.min() >= spec.eta / (2.0 * math.sqrt(n + 1)) - 1e-12


def test_tangent_basis_orthonormal_and_tangent():
    rng = random.Random(13)
    for _ in range(200):
        dim = rng.choice([2, 3, 4])
        x = random_sphere_point(rng, dim)
        H = tangent_basis(x)
        assert H.shape == (dim, dim - 1)
        assert np.allclose(H.T @ H, np.eye(dim - 1), atol=1e-12)
        assert np.max(np.abs(x @ H)) < 1e-12


def test_tangent_basis_near_pole():
    e_last = np.zeros(3)
    e_last[-1] = 1.0
    H = tangent_basis(e_last)
    assert np.allclose(H, np.eye(3)[:, :2], atol=0)
    assert np.max(np.abs(e_last @ H)) == 0.0


def test_exp_map_properties():
    rng = random.Random(17)
    for _ in range(100):
        x = random_sphere_point(rng, 3)
        H = tangent_basis(x)
        w = np.array([rng.gauss(0, 1) for _ in range(2)])
        v = H @ (0.5 * w / max(1.0, np.linalg.norm(w)))
        y = exp_map(x, v)
        assert abs(np.linalg.norm(y) - 1.0) < 1e-12
        assert abs(distance(x, y) - np.linalg.norm(v)) < 1e-9
    x = random_sphere_point(rng, 3)
    assert np.array_equal(exp_map(x, np.zeros(3)), x)
    with pytest.raises(ValueError):
        exp_map(x, x)  # not tangent
