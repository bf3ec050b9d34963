"""Figure rendering to standalone SVG text.

Figures are matplotlib line plots drawn without pyplot state; a fixed
``svg.hashsalt`` and stripped date metadata make the byte output a pure
function of the data, so repeated runs emit identical files.
"""

import io

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

__all__ = ["render_svg_plot", "figures_for_run"]

_HASHSALT = "cqedsim"
_FIGSIZE = (7.0, 4.0)


def render_svg_plot(times, series, xlabel, ylabel, title) -> str:
    """Plot one or more named series over a shared time axis.

    Parameters
    ----------
    times : array
        Shared x values, at least 2 points.
    series : dict
        Name -> real y array (same length as ``times``).

    A flat series (all y equal) gets a padded y range instead of a
    degenerate one. Output is deterministic for identical input.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 2:
        raise ValueError("need at least 2 points per series")
    if not series:
        raise ValueError("series set must not be empty")
    with matplotlib.rc_context({"svg.hashsalt": _HASHSALT}):
        fig = Figure(figsize=_FIGSIZE)
        FigureCanvasSVG(fig)
        ax = fig.add_subplot(111)
        lo = min(float(np.min(np.asarray(v, dtype=float))) for v in series.values())
        hi = max(float(np.max(np.asarray(v, dtype=float))) for v in series.values())
        for name, values in series.items():
            values = np.asarray(values, dtype=float)
            if values.shape != times.shape:
                raise ValueError(f"series {name!r} length mismatch")
            ax.plot(times, values, label=name, linewidth=1.0)
        if hi == lo:
            pad = max(0.5, abs(lo) * 0.1)
            ax.set_ylim(lo - pad, hi + pad)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        fig.set_layout_engine("tight")
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def figures_for_run(model, trajectory) -> dict:
    """Standard figure set per backend, as {file name: svg text}."""
    t = trajectory.times
    if len(t) < 2:
        return {}
    ch = trajectory.channels
    figures = {}
    if model == "meanfield":
        figures["fig_alpha.svg"] = render_svg_plot(
            t, {"|alpha|": ch["alpha_abs"], "Re alpha": ch["alpha"].real},
            "t", "field amplitude", "Field expectation")
        figures["fig_atom.svg"] = render_svg_plot(
            t, {"s": ch["s"], "|beta|": ch["beta_abs"]},
            "t", "inversion / coherence", "Atomic variables")
        figures["fig_beta_phase.svg"] = render_svg_plot(
            t, {"arg beta": ch["beta_phase"]},
            "t", "unwrapped phase (rad)", "Coherence phase")
    else:
        figures["fig_pe.svg"] = render_svg_plot(
            t, {"P_e": ch["pe"]}, "t", "excited-state probability",
            f"Excited-state probability ({model})")
        figures["fig_nbar.svg"] = render_svg_plot(
            t, {"<n>": ch["nbar"]}, "t", "mean photon number",
            f"Mean photon number ({model})")
    return figures


def compare_figure(times, pe_by_model) -> str:
    """Overlay of excited-state probability across backends."""
    return render_svg_plot(times, pe_by_model, "t",
                           "excited-state probability",
                           "Backend comparison")
