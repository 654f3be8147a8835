import numpy as np
import pytest
import scipy.fft
from scipy.spatial.distance import pdist
from scipy.stats import special_ortho_group

from stratkit import cli
from stratkit.detect import (
    GENERATORS,
    GridIndex,
    VgtCurve,
    agglomerative,
    ball_count,
    ball_counts,
    dct_matrix,
    dct_project,
    default_window,
    dic_feature,
    gen_circle,
    gen_half_cylinder,
    gen_hourglass,
    gen_line3d,
    gen_room_corridor,
    gen_segment,
    gen_segment_tube,
    gen_square,
    isomap_lite,
    kmeans,
    local_dim_ls,
    local_dims,
    purity,
    radius_grid,
    slope,
    standardize,
    two_nn_dim,
    vgt,
    vgt_dot,
    vgt_dot_features,
    vgt_matrix,
)
from stratkit.errors import StratError


@pytest.fixture(scope="module")
def square5000():
    return gen_square(5000, seed=0).points


@pytest.fixture(scope="module")
def segment5000():
    return gen_segment(5000, seed=0).points


# ball counts


def test_ball_count_examples():
    assert ball_count([[0.3, 0.3]], 0, 5.0) == 1
    line = np.array([[0.0], [1.0], [2.0]])
    assert ball_count(line, 1, 1.5) == 3
    assert ball_count(line, 1, 1.0) == 1  # strict inequality
    g = np.stack(np.meshgrid(np.arange(11) * 0.1, np.arange(11) * 0.1), -1).reshape(-1, 2)
    c = 5 * 11 + 5
    expected = sum(1 for p in g if np.hypot(*(p - g[c])) < 0.25)
    assert ball_count(g, c, 0.25) == expected == 21
    with pytest.raises(StratError) as e:
        ball_count(line, 3, 1.0)
    assert e.value.code == "index-out-of-range"


def test_grid_index_matches_bruteforce():
    X = gen_room_corridor(1500, seed=4).points
    idx = GridIndex(X, 0.1)
    radii = [0.02, 0.1, 0.33, 1.0, 5.0]
    counts = ball_counts(X, radii)
    for i in range(0, 1500, 37):
        for j, r in enumerate(radii):
            assert idx.ball_count(i, r) == counts[i, j] == ball_count(X, i, r)


def test_counts_monotone(square5000):
    X = square5000[:800]
    log_r, log_c = vgt_matrix(X)
    assert np.all(np.diff(log_c, axis=1) >= 0)
    assert np.all(log_c >= 0)


# vgt / vgt-dot


def test_vgt_examples(segment5000):
    grid = np.geomspace(0.01, 1, 20)
    assert np.all(vgt([[1.0, 2.0]], 0, grid).log_counts == 0)
    mid = int(np.argmin(np.abs(segment5000[:, 0] - 0.5)))
    c = vgt(segment5000, mid, np.geomspace(0.01, 0.2, 20))
    assert slope(c) == pytest.approx(1.0, abs=0.1)
    with pytest.raises(StratError) as e:
        vgt(segment5000, 0, [])
    assert e.value.code == "empty-grid"


def test_vgt_dot_examples():
    s = np.linspace(-3, 0, 40)
    assert np.allclose(vgt_dot(VgtCurve(s, 2 * s + 1)), 2, atol=1e-9)
    assert np.allclose(vgt_dot(VgtCurve(s, np.full(40, 3.0))), 0, atol=1e-9)
    knee = np.where(s < -1.5, s, 2 * s + 1.5)
    d = vgt_dot(VgtCurve(s, knee))
    assert d[0] == pytest.approx(1, abs=0.05) and d[-1] == pytest.approx(2, abs=0.05)
    assert np.all(np.diff(d) >= -1e-8)
    with pytest.raises(StratError) as e:
        vgt_dot(VgtCurve(s[:4], s[:4]))
    assert e.value.code == "curve-too-short"
    with pytest.raises(StratError):
        vgt_dot(VgtCurve(s, s), bandwidth=0)


def test_local_dim_exact_line():
    s = np.linspace(-2, 0, 16)
    assert slope(VgtCurve(s, 2 * s + 0.3)) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(StratError) as e:
        slope(VgtCurve(s, s), window=(0.5, 0.51))
    assert e.value.code == "degenerate-window"


def test_local_dim_bands(square5000):
    assert 1.8 <= np.median(local_dims(square5000)) <= 2.2
    seg = gen_segment(2000, seed=0).points
    assert 0.9 <= np.median(local_dims(seg)) <= 1.1


def test_local_dim_single_matches_batch(square5000):
    X = square5000[:1000]
    ds = local_dims(X, idx=[0, 5, 9])
    assert np.allclose(ds, [local_dim_ls(X, i) for i in (0, 5, 9)], atol=1e-12)


def test_two_nn(square5000, segment5000):
    d_sq, log_mu = two_nn_dim(square5000)
    assert 1.7 <= d_sq <= 2.4
    assert log_mu.shape == (5000,) and np.all(log_mu >= 0)
    d_seg, _ = two_nn_dim(segment5000)
    assert 0.8 <= d_seg <= 1.3
    # agreement with the least-squares estimator
    assert abs(d_sq - np.median(local_dims(square5000))) < 0.5
    assert abs(d_seg - np.median(local_dims(segment5000))) < 0.5
    with pytest.raises(StratError) as e:
        two_nn_dim([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
    assert e.value.code == "duplicate-points"


def test_scaling_invariance():
    X = gen_room_corridor(800, seed=1).points
    c = 3.7
    w = default_window(X)
    assert np.allclose(local_dims(c * X), local_dims(X), atol=1e-9)
    assert default_window(c * X) == pytest.approx((c * w[0], c * w[1]))
    g = radius_grid(X)
    a = vgt_dot_features(X, g)
    b = vgt_dot_features(c * X, c * g)
    assert np.allclose(a, b, atol=1e-9)
    lr, _ = vgt_matrix(c * X, c * g)
    assert np.allclose(lr, np.log(g) + np.log(c))


def test_isometry_invariance():
    X = np.column_stack([gen_hourglass(600, seed=2).points, np.zeros(600)])
    R = special_ortho_group.rvs(3, random_state=0)
    Y = X @ R.T + np.array([5.0, -2.0, 0.5])
    g = radius_grid(X)
    assert np.array_equal(ball_counts(X, g[::4]), ball_counts(Y, g[::4]))
    assert np.allclose(vgt_dot_features(X, g), vgt_dot_features(Y, g), atol=1e-9)
    assert np.allclose(local_dims(X), local_dims(Y), atol=1e-9)
    assert two_nn_dim(X)[0] == pytest.approx(two_nn_dim(Y)[0], abs=1e-9)


# DIC features


def test_dic_feature():
    X = gen_square(3000, seed=3).points
    F = dic_feature(X, 0.05)
    edge = np.min(np.minimum(X, 1 - X), axis=1) < 0.01
    inner = np.min(np.minimum(X, 1 - X), axis=1) > 0.1
    assert F[edge, 1].mean() < F[inner, 1].mean()
    mix = np.vstack([gen_square(2000, seed=4).points, gen_segment(2000, seed=4).points + [2.0, 0.5]])
    G = dic_feature(mix, 0.05)
    assert G[2000:, 0].mean() + 0.5 < G[:2000, 0].mean()
    single = dic_feature([[1.0, 1.0]], 0.1)
    assert single.shape == (1, 2) and single[0, 1] == 0


# clustering


def blobs(seed=0, n=100):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(size=(n, 2)), rng.normal(size=(n, 2)) + [10, 0]])
    return X, np.repeat([0, 1], n)


def test_kmeans_examples():
    X, truth = blobs()
    assert purity(kmeans(X, 2, seed=0), truth) == 1.0
    assert np.all(kmeans(X, 1) == 0)
    labels, inertia = kmeans(X[:20], 20, return_inertia=True)
    assert len(set(labels)) == 20 and inertia == 0
    with pytest.raises(StratError) as e:
        kmeans(X, 201)
    assert e.value.code == "k-too-large"


def test_kmeans_deterministic():
    X, _ = blobs(1)
    assert np.array_equal(kmeans(X, 3, seed=4), kmeans(X, 3, seed=4))


def test_agglomerative_examples():
    X, truth = blobs()
    assert purity(agglomerative(X, 2), truth) == 1.0
    assert len(set(agglomerative(X[:15], 15))) == 15
    F = np.array([[0.0], [0.0], [1.0], [5.0]])
    lab = agglomerative(F, 3)
    assert lab[0] == lab[1] and len(set(lab)) == 3
    with pytest.raises(StratError) as e:
        agglomerative(X, 500)
    assert e.value.code == "k-too-large"


def test_standardize():
    F = np.column_stack([np.arange(10.0), np.full(10, 3.0)])
    Z = standardize(F)
    assert np.allclose(Z.mean(0), 0) and Z[:, 0].std() == pytest.approx(1)
    assert np.all(Z[:, 1] == 0)


# embeddings


def test_isomap_line():
    s = gen_line3d(400, seed=0)
    e = isomap_lite(s.points, 10, 1)
    assert abs(np.corrcoef(e.coords[:, 0], s.params["arc"])[0, 1]) >= 0.999
    assert e.residual < 1e-3


def test_power_iteration_matches_eigh():
    from stratkit.detect.embed import _top_eigs

    rng = np.random.default_rng(0)
    Q = np.linalg.qr(rng.normal(size=(40, 40)))[0]
    B = (Q * np.r_[9.0, 5.0, 2.0, rng.uniform(0, 0.5, 37)]) @ Q.T
    vals, vecs = _top_eigs(B, 3)
    w, V = np.linalg.eigh(B)
    assert np.allclose(vals, w[::-1][:3], rtol=1e-8)
    for k in range(3):
        assert abs(vecs[:, k] @ V[:, -1 - k]) == pytest.approx(1, abs=1e-6)


def test_isomap_half_cylinder():
    s = gen_half_cylinder(800, seed=0)
    e = isomap_lite(s.points, 10, 2)
    assert abs(np.corrcoef(e.coords[:, 0], s.params["arc"])[0, 1]) >= 0.99


def test_isomap_errors():
    X = gen_square(200, seed=0).points
    with pytest.raises(StratError) as e:
        isomap_lite(X, 1, 1)
    assert e.value.code == "graph-disconnected"
    assert e.value.witness > 1
    with pytest.raises(StratError) as e:
        isomap_lite(X, 6, 6)
    assert e.value.code == "bad-parameters"


def test_dct_examples():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(50, 32))
    Y = dct_project(X, 32)
    assert np.allclose(pdist(Y), pdist(X), atol=1e-9)
    M = dct_matrix(32, 32)
    assert np.allclose(M @ M.T, np.eye(32), atol=1e-12)
    assert np.allclose(M @ X.T, scipy.fft.dct(X, type=2, norm="ortho").T, atol=1e-12)
    const = np.full((3, 16), 2.5)
    P = dct_project(const, 4, rescale=False)
    assert np.allclose(P[:, 0], 2.5 * np.sqrt(16)) and np.allclose(P[:, 1:], 0, atol=1e-12)
    Z = rng.normal(size=(200, 256))
    ratio = pdist(dct_project(Z, 100)) / pdist(Z)
    assert np.median(np.abs(ratio - 1)) < 0.15
    with pytest.raises(StratError) as e:
        dct_project(X, 33)
    assert e.value.code == "d_out-too-large"


# generators


@pytest.mark.parametrize("name", sorted(GENERATORS))
def test_generators_basic(name):
    a = GENERATORS[name](200, seed=3)
    b = GENERATORS[name](200, seed=3)
    assert a.points.shape[0] == 200 and np.array_equal(a.points, b.points)
    assert len(a.labels) == len(a.dims) == 200
    with pytest.raises(StratError) as e:
        GENERATORS[name](5, seed=0)
    assert e.value.code == "bad-parameters"


def test_generator_names_in_cli():
    assert tuple(sorted(cli.GENERATOR_NAMES)) == tuple(sorted(GENERATORS))


def test_gen_square_dims():
    assert np.all(gen_square(100).dims == 2)


def test_gen_room_corridor():
    s = gen_room_corridor(3000, noise=0.0, seed=0)
    assert s.probes == {"a": 0, "b": 1, "c": 2}
    assert np.allclose(s.points[:3], [[2, 1], [1, 1], [2.5, 0.5]])
    corr = s.labels == "corridor"
    x, y = s.points[corr].T
    assert np.allclose(y, 1 + 0.5 * np.sin(3 * np.pi * x), atol=1e-12)
    assert np.all((x >= 2) & (x <= 6))
    room = s.labels == "room"
    assert np.all((s.points[room] >= 0) & (s.points[room] <= 2))
    assert set(np.unique(s.labels)) == {"room", "corridor", "junction"}
    with pytest.raises(StratError):
        gen_room_corridor(100, noise=-1)


def test_gen_hourglass():
    s = gen_hourglass(2000, seed=1)
    x, y = s.points.T
    assert np.all(np.abs(y) <= np.abs(x) + 1e-12) and np.all(np.abs(x) <= 1)
    assert s.labels[0] == "neck" and np.all(s.points[0] == 0)
    assert set(np.unique(s.labels)) == {"neck", "left", "right"}


def test_gen_segment_tube():
    s = gen_segment_tube(2000, L=1.0, r=0.25, seed=0)
    p = s.points
    proj = np.clip(p[:, 0], 0, 1)
    assert np.all(np.hypot(p[:, 0] - proj, p[:, 1]) <= 0.25)
    frac = np.mean(s.labels == "tube")
    assert frac == pytest.approx(0.5 / (0.5 + np.pi * 0.0625), abs=0.04)


def test_gen_circle():
    s = gen_circle(300, seed=0)
    assert np.allclose(np.hypot(*s.points.T), 1)


def test_room_corridor_probe_b():
    s = gen_room_corridor(5000, seed=0)
    assert 1.8 <= local_dim_ls(s.points, s.probes["b"]) <= 2.2
