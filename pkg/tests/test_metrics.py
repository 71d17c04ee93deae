import json

import numpy as np
from pytest import approx, raises, mark, fixture, warns


def brute_ssim(x, y, window, data_range):
    """ Mean SSIM and cs of two H x W arrays, one window at a time. """
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    h, w = x.shape
    s, c = [], []
    for i in range(h - window + 1):
        for j in range(w - window + 1):
            a = x[i:i + window, j:j + window]
            b = y[i:i + window, j:j + window]
            ma, mb = a.mean(), b.mean()
            va, vb = a.var(), b.var()
            cov = ((a - ma) * (b - mb)).mean()
            cs = (2 * cov + c2) / (va + vb + c2)
            c.append(cs)
            s.append((2 * ma * mb + c1) / (ma ** 2 + mb ** 2 + c1) * cs)
    return np.mean(s), np.mean(c)


def brute_haar(x):
    """ LL, LH, HL, HH of a single H x W array. """
    a, b, c, d = x[0::2, 0::2], x[0::2, 1::2], x[1::2, 0::2], x[1::2, 1::2]
    return [(a + b + c + d) / 2, (a + b - c - d) / 2, (a - b + c - d) / 2, (a - b - c + d) / 2]


@fixture
def noisy_pair(np_rng):
    def make(size):
        real = np_rng.uniform(size=(1, size, size))
        gen = np.clip(real + np_rng.normal(scale=0.05, size=real.shape), 0, 1)
        return gen, real

    return make


def test_hlfr(checkerboard):
    from wavemask.errors import UndefinedMetricError
    from wavemask.metrics import hlfr, rdr

    assert hlfr(np.full((1, 8, 8), 0.3)) == 0
    assert hlfr(checkerboard(8, 8)) == 1.0
    with raises(UndefinedMetricError):
        hlfr(np.zeros((1, 4, 4)))

    img = np.full((1, 8, 8), 0.3)
    assert rdr(img, img) == 0
    assert rdr(checkerboard(8, 8), img) == 1.0


def test_hfe_and_hfei(checkerboard, np_rng):
    from wavemask.metrics import energy_audit, hfe, hfei, total_energy

    assert hfe(np.full((1, 8, 8), 0.7), 3) == 0
    assert hfe(checkerboard(8, 8), 1) == 16
    assert hfe(checkerboard(8, 8), 3) == 16

    img = np_rng.uniform(size=(2, 16, 16))
    assert total_energy(img, 2) == approx(np.sum(img ** 2), rel=1e-12)
    assert hfei(img, img, 2) == 0
    assert hfei(np.full((1, 8, 8), 0.5), checkerboard(8, 8), 3) == approx(-0.5)

    audit = energy_audit(checkerboard(8, 8), 2)
    assert audit["details"] == [16.0, 0.0]
    assert audit["total"] == 32.0


def test_ssim_matches_window_by_window_oracle(np_rng):
    from wavemask.metrics import ssim

    x, y = np_rng.uniform(size=(2, 12, 10))
    result = ssim(x, y, window=7)
    s, c = brute_ssim(x, y, 7, 1.0)
    assert result.ssim == approx(s, abs=1e-9)
    assert result.cs == approx(c, abs=1e-9)

    result = ssim(x, y, window=4, data_range=2.0)
    s, c = brute_ssim(x, y, 4, 2.0)
    assert result.ssim == approx(s, abs=1e-9)
    assert result.cs == approx(c, abs=1e-9)


def test_ssim_small_images_and_errors(np_rng):
    from wavemask.errors import InvalidArgumentError
    from wavemask.metrics import ssim

    x, y = np_rng.uniform(size=(2, 1, 4, 4))
    assert ssim(x, y).ssim == approx(brute_ssim(x[0], y[0], 4, 1.0)[0], abs=1e-9)
    assert ssim(x, x).ssim == 1.0
    with raises(InvalidArgumentError):
        ssim(x, np.zeros((1, 4, 5)))


def test_ms_ssim_scales():
    from wavemask.errors import InvalidArgumentError
    from wavemask.metrics import ms_ssim_scales

    assert ms_ssim_scales(8, 8) == 1
    assert ms_ssim_scales(16, 16) == 2
    assert ms_ssim_scales(64, 64) == 4
    assert ms_ssim_scales(256, 256) == 5
    assert ms_ssim_scales(24, 40) == 2
    with raises(InvalidArgumentError):
        ms_ssim_scales(4, 16)


def test_ms_ssim(noisy_pair, checkerboard):
    from wavemask.metrics import ms_ssim

    gen, real = noisy_pair(64)
    assert ms_ssim(real, real) == 1.0

    weights = np.array([0.0448, 0.2856, 0.3001, 0.2363])
    weights = weights / weights.sum()
    x, y = gen[0], real[0]
    expected = 1.0
    for k in range(4):
        s, c = brute_ssim(x, y, 7, 1.0)
        if k == 3:
            expected *= max(s, 0) ** weights[k]
        else:
            expected *= max(c, 0) ** weights[k]
            x = (x[0::2, 0::2] + x[0::2, 1::2] + x[1::2, 0::2] + x[1::2, 1::2]) / 4
            y = (y[0::2, 0::2] + y[0::2, 1::2] + y[1::2, 0::2] + y[1::2, 1::2]) / 4
    assert ms_ssim(gen, real) == approx(expected, abs=1e-9)
    assert 0 < ms_ssim(gen, real) < 1

    assert 0 <= ms_ssim(checkerboard(16, 16), 1 - checkerboard(16, 16)) < 1


def test_wqs_config():
    from wavemask.errors import InvalidArgumentError
    from wavemask.metrics import make_wqs_config

    cfg = make_wqs_config()
    assert cfg.depth == 3
    assert cfg.lambda_q == 0.1
    assert cfg.window == 7
    assert cfg.weights == [1 / 12] * 12

    assert make_wqs_config(depth=1, weights=[0.4, 0.2, 0.2, 0.2]).weights == [0.4, 0.2, 0.2, 0.2]
    for kwargs in ({"depth": 0}, {"lambda_q": -1}, {"depth": 1, "weights": [0.5, 0.5]},
                   {"depth": 1, "weights": [0.5, 0.5, 0.5, -0.5]}, {"depth": 1, "weights": [0.1] * 4}):
        with raises(InvalidArgumentError):
            make_wqs_config(**kwargs)


def test_wqs_identities(np_rng):
    from wavemask.metrics import make_wqs_config, wqs

    real = np_rng.uniform(size=(1, 32, 32))
    assert wqs(real, real) == 1.0
    assert wqs(real, real, make_wqs_config(depth=1)) == 1.0
    assert wqs(-real, real, make_wqs_config(depth=1)) < 1


def test_wqs_matches_oracle(noisy_pair):
    from wavemask.metrics import make_wqs_config, wqs

    gen, real = noisy_pair(32)
    cfg = make_wqs_config(depth=1, lambda_q=0.1, window=7)

    similarity, error = 0.0, 0.0
    for gb, rb in zip(brute_haar(gen[0]), brute_haar(real[0])):
        data_range = rb.max() - rb.min()
        similarity += 0.25 * brute_ssim(gb, rb, 7, data_range)[0]
        error += 0.25 * np.mean((gb - rb) ** 2) / data_range ** 2
    expected = min(1.0, max(0.0, similarity - 0.1 * error))
    assert 0 < expected < 1
    assert wqs(gen, real, cfg) == approx(expected, abs=1e-9)


def test_wqs_flat_reference_band_warns():
    from wavemask.metrics import make_wqs_config, wqs

    real = np.full((1, 8, 8), 0.5)
    with warns(UserWarning):
        score = wqs(real, real, make_wqs_config(depth=1))
    assert score == 1.0


def test_glcm_constant_image():
    from wavemask.metrics import glcm_stats

    stats = glcm_stats(np.full((1, 8, 8), 0.4), levels=64)
    assert stats.contrast == 0
    assert stats.energy == 1
    assert stats.homogeneity == 1


def test_glcm_checkerboard(checkerboard):
    from wavemask.metrics import glcm_matrix, glcm_stats, quantize

    board = checkerboard(8, 8)
    assert set(np.unique(quantize(board, 64))) == {0, 63}

    horizontal = glcm_stats(board, 64, offsets=[(0, 1)])
    assert horizontal.contrast == 63 ** 2
    vertical = glcm_stats(board, 64, offsets=[(1, 0)])
    assert vertical.contrast == 63 ** 2
    diagonal = glcm_stats(board, 64, offsets=[(1, 1), (1, -1)])
    assert diagonal.contrast == 0

    assert glcm_stats(board, 64).contrast == approx(63 ** 2 / 2)
    p = glcm_matrix(board, 64)
    assert p.sum() == approx(1)
    assert np.allclose(p, p.T)


def test_glcm_errors():
    from wavemask.errors import InvalidArgumentError
    from wavemask.metrics import glcm_matrix, offset_to_polar, quantize

    with raises(InvalidArgumentError):
        quantize(np.zeros((4, 4)), 1)
    with raises(InvalidArgumentError):
        glcm_matrix(np.zeros((1, 1)), 8)
    with raises(InvalidArgumentError):
        offset_to_polar((0, 0))
    with raises(InvalidArgumentError):
        offset_to_polar((2, 3))
    assert offset_to_polar((0, 1)) == (1, 0.0)


def test_evaluate_pair(noisy_pair):
    from wavemask.errors import InvalidArgumentError
    from wavemask.metrics import evaluate_pair, hlfr

    gen, real = noisy_pair(16)
    report = evaluate_pair(gen, real)
    assert report.hlfr_gen == hlfr(gen)
    assert report.rdr == abs(report.hlfr_gen - report.hlfr_real)
    assert 0 <= report.wqs <= 1
    assert 0 <= report.ms_ssim <= 1

    same = evaluate_pair(real, real)
    assert same.rdr == 0
    assert same.hfei == 0
    assert same.ms_ssim == 1.0
    assert same.wqs == 1.0

    with raises(InvalidArgumentError):
        evaluate_pair(gen, real[:, :8, :8])


def write_pairs(tmp_path, names, np_rng):
    from wavemask.tensor import write_netpbm

    gen_dir, real_dir = tmp_path / "gen", tmp_path / "real"
    gen_dir.mkdir()
    real_dir.mkdir()
    for name in names:
        write_netpbm(gen_dir / name, np_rng.uniform(size=(1, 16, 16)))
        write_netpbm(real_dir / name, np_rng.uniform(size=(1, 16, 16)))
    return gen_dir, real_dir


def test_match_files(tmp_path, np_rng):
    from wavemask.errors import InvalidArgumentError
    from wavemask.metrics import match_files

    gen_dir, real_dir = write_pairs(tmp_path, ["img10.pgm", "img2.pgm", "img1.pgm"], np_rng)
    pairs = match_files(str(gen_dir), str(real_dir))
    assert [p[0].split("/")[-1] for p in pairs] == ["img1.pgm", "img2.pgm", "img10.pgm"]

    (real_dir / "img2.pgm").rename(real_dir / "other.pgm")
    with raises(InvalidArgumentError) as err:
        match_files(str(gen_dir), str(real_dir))
    assert "img2.pgm" in str(err.value)
    assert "other.pgm" in str(err.value)

    with raises(FileNotFoundError):
        match_files(str(tmp_path / "nowhere"), str(real_dir))


@mark.parametrize("n_jobs", [1, 2])
def test_evaluate_dirs(tmp_path, np_rng, n_jobs):
    from wavemask.metrics import average_reports, evaluate_dirs, evaluate_pair
    from wavemask.tensor import read_image

    names = ["a.pgm", "b.pgm"]
    gen_dir, real_dir = write_pairs(tmp_path, names, np_rng)
    report = evaluate_dirs(str(gen_dir), str(real_dir), n_jobs=n_jobs)

    expected = average_reports(
        [evaluate_pair(read_image(gen_dir / n), read_image(real_dir / n)) for n in names]
    )
    assert report == expected

    report.to_json(tmp_path / "report.json")
    data = json.loads((tmp_path / "report.json").read_text())
    assert list(data) == list(report._fields)
    assert data["wqs"] == report.wqs


@mark.parametrize("seed", range(20))
def test_self_comparison_identities(seed):
    from wavemask.metrics import evaluate_pair

    gen = np.random.default_rng(seed)
    h, w = (8 * int(n) for n in gen.integers(2, 6, size=2))
    img = gen.uniform(size=(int(gen.integers(1, 4)), h, w))
    report = evaluate_pair(img, img.copy())
    assert report.rdr == 0
    assert report.wqs == approx(1, abs=1e-12)
    assert report.hfei == 0
    assert report.ms_ssim == approx(1, abs=1e-12)
