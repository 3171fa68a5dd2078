import numpy as np
import pandas as pd
import pytest

from plot import build_bmse_figure, cmd_plot, decade_limits

NAMES = ["blue", "re_blue", "bwlue", "wlmmse", "rbwlue"]


def experiment_like_results():
    sigma2 = np.logspace(-3, 2, 11)
    columns = {"sigma2": sigma2}
    for offset, name in enumerate(NAMES):
        columns[name] = sigma2 * (offset + 1) / 10
    return pd.DataFrame(columns)


def write_csv(tmp_path, frame, name="bmse.csv"):
    file_path = tmp_path / name
    frame.to_csv(file_path, index=False)
    return str(file_path)


@pytest.fixture
def figure():
    import matplotlib.pyplot as plt

    created = []

    def _build(frame):
        fig = build_bmse_figure(frame)
        created.append(fig)
        return fig

    yield _build
    for fig in created:
        plt.close(fig)


def test_one_line_per_estimator(figure):
    fig = figure(experiment_like_results())
    ax = fig.axes[0]
    assert len(ax.get_lines()) == 5
    assert [text.get_text() for text in ax.get_legend().get_texts()] == NAMES
    assert ax.get_xscale() == "log"
    assert ax.get_yscale() == "log"


def test_decade_ticks_cover_noise_range(figure):
    ax = figure(experiment_like_results()).axes[0]
    assert ax.get_xlim() == pytest.approx((1e-3, 1e2))
    ticks = ax.get_xticks()
    for decade in range(-3, 3):
        assert np.any(np.isclose(ticks, 10.0**decade))
    visible = ticks[(ticks >= 1e-3) & (ticks <= 1e2)]
    np.testing.assert_allclose(np.log10(visible), np.round(np.log10(visible)))


def test_single_row_draws_markers_only(figure):
    ax = figure(experiment_like_results().iloc[:1]).axes[0]
    for line in ax.get_lines():
        assert len(line.get_xdata()) == 1
        assert line.get_marker() == "o"


def test_decade_limits():
    assert decade_limits(np.array([2e-3, 50.0])) == (1e-3, 1e2)
    assert decade_limits(np.array([1.0])) == (0.1, 10.0)


def test_writes_reproducible_svg(tmp_path):
    input_path = write_csv(tmp_path, experiment_like_results())
    contents = []
    for index in range(2):
        out_path = tmp_path / "figures" / f"bmse_{index}.svg"
        assert cmd_plot(["--input", input_path, "--out", str(out_path)]) == 0
        contents.append(out_path.read_bytes())
    assert contents[0] == contents[1]
    assert b"<svg" in contents[0]
    assert b"<image" not in contents[0]
    assert b"xlink:href=\"http" not in contents[0]


def test_empty_data_section(tmp_path):
    input_path = tmp_path / "bmse.csv"
    input_path.write_text("sigma2,blue\n")
    assert cmd_plot(["--input", str(input_path), "--out", str(tmp_path / "f.svg")]) == 2


@pytest.mark.parametrize(
    "content",
    [
        "",
        "blue,sigma2\n1,1\n",
        "sigma2,blue\n1,abc\n",
        'sigma2,blue\n1,"2\n',
    ],
)
def test_malformed_results(content, tmp_path):
    input_path = tmp_path / "bmse.csv"
    input_path.write_text(content)
    assert cmd_plot(["--input", str(input_path), "--out", str(tmp_path / "f.svg")]) == 2


def test_missing_input(tmp_path):
    assert cmd_plot(["--input", str(tmp_path / "absent.csv"), "--out", str(tmp_path / "f.svg")]) == 2


def test_usage_error():
    assert cmd_plot(["--colour", "red"]) == 1


def test_svg_holds_one_series_per_estimator_and_decade_labels(tmp_path):
    input_path = write_csv(tmp_path, experiment_like_results())
    out_path = tmp_path / "bmse.svg"
    assert cmd_plot(["--input", input_path, "--out", str(out_path)]) == 0
    svg = out_path.read_text(encoding="utf-8")
    for name in NAMES:
        assert f'<g id="bmse_{name}">' in svg
    assert svg.count('<g id="bmse_') == 5
    for decade in range(-3, 3):
        assert f"10^{{{decade}}}" in svg
