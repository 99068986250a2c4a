import math

import numpy as np
import pytest

from bellscan import _kernels_py
from bellscan.herald import count_selected
from bellscan.model import HeraldFilter
from bellscan.stats import chsh, nosignal, tabulate
from bellscan.synth import SynthConfig, generate, generate_batch, load_config, parse_config_text

FIELDS = ("click1", "click2", "clean", "a", "b", "x", "y", "contaminated")


def test_splitmix64_reference_vector():
    # splitmix64 from state 0 starts 0xE220A8397B1DCDAF
    rng = _kernels_py.Xoshiro256(0)
    assert rng.s[0] == 0xE220A8397B1DCDAF


def test_xoshiro256starstar_reference_vector():
    rng = _kernels_py.Xoshiro256(0)
    rng.s = [1, 2, 3, 4]
    assert [rng.next() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_raw_streams_agree(backend):
    assert backend.raw_stream(2**64 - 1, 50) == _kernels_py.raw_stream(2**64 - 1, 50)


def test_backends_generate_identical_data(backend):
    cfg = SynthConfig(n_attempts=3000, seed=123456789, w_ref=0.4, epsilon=0.2, invalid_rate=0.01)
    got = generate_batch(cfg, backend)
    want = generate_batch(cfg, _kernels_py)
    for name in FIELDS:
        assert np.array_equal(getattr(got, name), getattr(want, name)), name


def test_reproducible():
    cfg = SynthConfig(n_attempts=500, seed=77)
    assert generate(cfg) == generate(cfg)
    assert generate(cfg) != generate(cfg.with_(seed=78))


def test_event_fields():
    evs = generate(SynthConfig(n_attempts=400, seed=2, invalid_rate=0.05, run_id=3))
    assert [e.sync_index for e in evs] == list(range(400))
    assert {e.run_id for e in evs} == {3}
    assert all(0 <= e.clean_attempts <= 250 for e in evs)


@pytest.mark.parametrize("rate,expected", [(0.0, {250}), (1.0, {0})])
def test_invalid_rate_extremes(rate, expected):
    evs = generate(SynthConfig(n_attempts=200, seed=1, invalid_rate=rate))
    assert {e.clean_attempts for e in evs} == expected


def test_clean_run_is_geometric():
    b = generate_batch(SynthConfig(n_attempts=100_000, seed=8, invalid_rate=0.01))
    for m in (10, 50, 100, 250):
        want = (1 - 0.01) ** m
        got = (b.clean >= m).mean()
        assert abs(got - want) < 4 * math.sqrt(want * (1 - want) / 100_000)


def test_setting_balance():
    from scipy.stats import chisquare
    b = generate_batch(SynthConfig(n_attempts=40_000, seed=31))
    counts = np.bincount(b.a * 2 + b.b, minlength=4)
    assert chisquare(counts).pvalue > 1e-6


def test_singlet_chsh_target():
    b = generate_batch(SynthConfig(n_attempts=100_000, seed=4, visibility=1.0, w_ref=0.0))
    s = chsh(tabulate(b.events()))
    assert abs(s.value - 2 * math.sqrt(2)) < 3 * s.sigma


@pytest.mark.parametrize("visibility,w_ref", [(0.9, 0.0), (0.5, 0.7), (1.0, 1.0)])
def test_no_signal_without_epsilon(visibility, w_ref):
    b = generate_batch(SynthConfig(n_attempts=20_000, seed=12, visibility=visibility, w_ref=w_ref))
    for s in nosignal(tabulate(b.events())).as_tuple():
        assert abs(s.value) < 3 * s.sigma


def test_planted_signal_direction():
    b = generate_batch(SynthConfig(n_attempts=100_000, seed=6, w_ref=1.0, epsilon=0.3))
    ns = nosignal(tabulate(b.events()))
    # the contaminated law gives p_B(+|a) = 1/2 + eps(2a-1)/2, so S_A->B = -eps
    assert abs(ns.ab0.value + 0.3) < 3 * ns.ab0.sigma
    assert abs(ns.ab1.value + 0.3) < 3 * ns.ab1.sigma
    assert abs(ns.ba0.value) < 3 * ns.ba0.sigma
    assert abs(ns.ba1.value) < 3 * ns.ba1.sigma


def test_earlier_window_admits_more_contamination():
    b = generate_batch(SynthConfig(n_attempts=200_000, seed=13, w_ref=0.5))
    cols = b.columns()
    fractions = []
    for offset in (0, -2_000, -4_000, -6_000, -8_000):
        f = HeraldFilter(0, offset, 50_000, 0)
        mask = (cols.click_lo >= f.lower_ps) & (cols.click_hi <= f.window_stop_ps)
        fractions.append(b.contaminated[mask].mean())
    assert all(x < y for x, y in zip(fractions, fractions[1:]))


def test_config_validation():
    for bad in ({"visibility": 1.5}, {"w_ref": -0.1}, {"epsilon": 2.0}, {"tau_nv": 0.0},
                {"n_attempts": 0}, {"seed": -1}, {"invalid_rate": 1.1}):
        with pytest.raises(ValueError):
            SynthConfig(**bad)


def test_config_file(tmp_path):
    path = tmp_path / "synth.cfg"
    path.write_text("# demo\nn = 123\nseed=9\nwref = 0.25\ntau-nv = 10000  # ps\nepsilon=0.1\n")
    cfg = load_config(path)
    assert (cfg.n_attempts, cfg.seed, cfg.w_ref, cfg.tau_nv, cfg.epsilon) == (123, 9, 0.25, 10000.0, 0.1)
    with pytest.raises(ValueError, match="unknown key"):
        parse_config_text("colour = red")
    with pytest.raises(ValueError, match="line 1"):
        parse_config_text("seed")
