import numpy as np
from pytest import approx, raises, mark


SEED0_STREAM = [
    0x53175D61490B23DF, 0x61DA6F3DC380D507, 0x5C0FDF91EC9A7BFC, 0x02EEBF8C3BBE5E1A,
    0x7ECA04EBAF4A5EEA, 0x0543C37757F08D9A, 0xDB7490C75AB5026E, 0xD87343E6464BC959,
    0x4B7DA0A02389F0FF, 0x1300FC58C0424C16, 0x5084843206C19968, 0x10EA073DE9AA4DFC,
    0x1AAE554343960CC1, 0x1804139F10FAE720, 0x10D790E7B8AC10FA, 0x667D2BFFDD1496F7,
]
SEED42_HEAD = [0xD0764D4F4476689F, 0x519E4174576F3791, 0xFBE07CFB0C24ED8C, 0xB37D9F600CD835B8]


def test_splitmix64_golden():
    from wavemask.tensor.rng import splitmix64

    state = 0
    out = []
    for _ in range(4):
        state, value = splitmix64(state)
        out.append(value)
    assert out == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F, 0xF88BB8A8724C81EC]


def test_xoshiro_golden_stream():
    from wavemask.tensor import Rng

    rng = Rng(0)
    assert [rng.next_u64() for _ in range(16)] == SEED0_STREAM
    rng = Rng(42)
    assert [rng.next_u64() for _ in range(4)] == SEED42_HEAD


def test_uniform_and_randbelow():
    from wavemask.tensor import Rng

    rng = Rng(0)
    assert rng.uniform() == (SEED0_STREAM[0] >> 11) * 2.0 ** -53
    assert rng.uniform() == approx(0.32457526803140668, abs=1e-16)

    rng = Rng(7)
    values = [rng.randbelow(6) for _ in range(600)]
    assert set(values) == set(range(6))
    with raises(ValueError):
        rng.randbelow(0)

    arr = Rng(3).uniform_array((4, 5), -2, 3)
    assert arr.shape == (4, 5)
    assert np.all(arr >= -2) and np.all(arr < 3)


def test_gaussian_sample_determinism_and_moments():
    from wavemask.tensor import Rng, gaussian_sample

    a = gaussian_sample(Rng(5), (2, 2))
    b = gaussian_sample(Rng(5), (2, 2))
    assert np.array_equal(a, b)

    odd = gaussian_sample(Rng(5), (3,))
    assert odd.shape == (3,)

    big = gaussian_sample(Rng(11), (100000,))
    assert abs(big.mean()) < 0.02
    assert abs(big.var() - 1) < 0.03


def test_upsample_examples():
    from wavemask.tensor import bilinear_upsample2x

    out = bilinear_upsample2x(np.full((1, 1, 1), 2.5))
    assert out.shape == (1, 2, 2)
    assert np.all(out == 2.5)

    out = bilinear_upsample2x(np.array([[[0.0, 1.0], [2.0, 3.0]]]))
    assert out.shape == (1, 4, 4)
    assert out[0, 0, 0] == 0
    assert out[0, 3, 3] == 3
    assert out[0, 1, 1] == approx(0.75, abs=1e-15)


def test_upsample_properties(np_rng):
    from wavemask.tensor import bilinear_upsample2x

    src = np_rng.normal(size=(3, 5, 7))
    out = bilinear_upsample2x(src)
    assert out.shape == (3, 10, 14)
    for c in range(3):
        assert out[c].min() >= src[c].min()
        assert out[c].max() <= src[c].max()

    const = np.full((2, 4, 3), 0.1)
    assert np.array_equal(bilinear_upsample2x(const), np.full((2, 8, 6), 0.1))

    with raises(ValueError):
        bilinear_upsample2x(np.zeros((1, 0, 3)))


def test_avgpool_examples():
    from wavemask.tensor import avgpool2x

    assert avgpool2x(np.ones((1, 2, 2)))[0].tolist() == [[1.0]]
    assert avgpool2x(np.array([[[0.0, 2.0], [4.0, 6.0]]]))[0].tolist() == [[3.0]]
    ramp = np.arange(16, dtype=float).reshape(1, 4, 4)
    assert avgpool2x(ramp)[0].tolist() == [[2.5, 4.5], [10.5, 12.5]]

    with raises(ValueError):
        avgpool2x(np.zeros((1, 3, 4)))


def test_avgpool_preserves_mean(np_rng):
    from wavemask.tensor import avgpool2x

    src = np_rng.uniform(size=(2, 8, 6))
    assert avgpool2x(src).mean() == approx(src.mean(), rel=1e-14)


def test_adjoints(np_rng):
    from wavemask.tensor import (
        bilinear_upsample2x,
        bilinear_upsample2x_adjoint,
        avgpool2x,
        avgpool2x_adjoint,
    )

    x = np_rng.normal(size=(2, 3, 5))
    y = np_rng.normal(size=(2, 6, 10))
    assert np.sum(bilinear_upsample2x(x) * y) == approx(np.sum(x * bilinear_upsample2x_adjoint(y)), rel=1e-12)

    x = np_rng.normal(size=(2, 6, 4))
    y = np_rng.normal(size=(2, 3, 2))
    assert np.sum(avgpool2x(x) * y) == approx(np.sum(x * avgpool2x_adjoint(y)), rel=1e-12)


def test_tensor_round_trip(tmp_path, np_rng):
    from wavemask.tensor import read_tensor, write_tensor

    tensor = np_rng.normal(size=(3, 8, 8)).astype(np.float32).astype(np.float64)
    path = tmp_path / "t.lwt"
    write_tensor(path, tensor)
    back = read_tensor(path)
    assert back.dtype == np.float64
    assert back.shape == (3, 8, 8)
    assert np.array_equal(back, tensor)

    data = path.read_bytes()
    assert data[:4] == b"LWT1"
    assert int.from_bytes(data[4:8], "little") == 3
    assert len(data) == 8 + 3 * 4 + 3 * 8 * 8 * 4


@mark.parametrize(
    "data, offset",
    [
        (b"LWT", 3),
        (b"XWT1" + b"\x01\x00\x00\x00" + b"\x01\x00\x00\x00" + b"\x00" * 4, 0),
        (b"LWT1" + b"\x01\x00\x00\x00" + b"\x02\x00\x00\x00" + b"\x00" * 4, 16),
        (b"LWT1" + b"\x01\x00\x00\x00" + b"\x00\x00\x00\x00", 8),
        (b"LWT1" + b"\x02\x00\x00\x00" + b"\xff\xff\x00\x00" * 2, 12),
        (b"LWT1" + b"\x01\x00\x00\x00" + b"\x01\x00\x00\x00" + b"\x00" * 8, 16),
    ],
)
def test_tensor_format_errors(tmp_path, data, offset):
    from wavemask.errors import FormatError
    from wavemask.tensor import read_tensor

    path = tmp_path / "bad.lwt"
    path.write_bytes(data)
    with raises(FormatError) as err:
        read_tensor(path)
    assert err.value.offset == offset
    assert str(path) in str(err.value)


@mark.parametrize("value", [1e39, -1e39, np.inf, np.nan])
def test_tensor_rejects_values_outside_float32(tmp_path, value):
    from wavemask.errors import InvalidArgumentError
    from wavemask.tensor import write_tensor
    from wavemask.tensor.file_io import encode_tensor

    tensor = np.zeros((2, 2))
    tensor[1, 0] = value
    with raises(InvalidArgumentError):
        encode_tensor(tensor)
    with raises(InvalidArgumentError):
        write_tensor(tmp_path / "big.lwt", tensor)
    assert not (tmp_path / "big.lwt").exists()
    assert len(encode_tensor(np.full((1,), 3e38))) == 8 + 4 + 4


def test_netpbm_rejects_channel_counts(tmp_path):
    from wavemask.errors import InvalidArgumentError
    from wavemask.tensor import write_netpbm

    with raises(InvalidArgumentError):
        write_netpbm(tmp_path / "two.pgm", np.zeros((2, 4, 4)))


def test_netpbm_values(tmp_path):
    from wavemask.tensor import read_netpbm, write_netpbm

    path = tmp_path / "a.pgm"
    path.write_bytes(b"P5\n# comment\n2 1\n255\n" + bytes([255, 128]))
    img = read_netpbm(path)
    assert img.shape == (1, 1, 2)
    assert img[0, 0, 0] == 1.0
    assert img[0, 0, 1] == approx(128 / 255)

    rgb = np.zeros((3, 2, 2))
    rgb[0] = 1.0
    write_netpbm(tmp_path / "b.ppm", rgb)
    assert (tmp_path / "b.ppm").read_bytes()[:2] == b"P6"
    assert np.array_equal(read_netpbm(tmp_path / "b.ppm"), rgb)


def test_netpbm_errors(tmp_path):
    from wavemask.errors import FormatError
    from wavemask.tensor import read_netpbm

    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n4 4\n255\n" + bytes(3))
    with raises(FormatError):
        read_netpbm(path)

    path.write_bytes(b"P5\n1 1\n65535\n" + bytes(2))
    with raises(FormatError):
        read_netpbm(path)


def test_read_image_dispatch(tmp_path):
    from wavemask.tensor import read_image, write_image

    img = np.array([[[0.0, 1.0], [1.0, 0.0]]])
    write_image(tmp_path / "x.pgm", img)
    write_image(tmp_path / "x.lwt", img)
    assert np.array_equal(read_image(tmp_path / "x.pgm"), img)
    assert np.array_equal(read_image(tmp_path / "x.lwt"), img)


def test_as_chw():
    from wavemask.errors import InvalidArgumentError
    from wavemask.tensor import as_chw

    assert as_chw(np.zeros((2, 3))).shape == (1, 2, 3)
    with raises(InvalidArgumentError):
        as_chw(np.zeros(4))
