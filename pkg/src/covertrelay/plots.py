"""Figure rendering for the experiment CLI.

Each sweep command can render its CSV payload as a PNG next to the output
file. matplotlib is imported lazily (Agg backend) so that plain CSV runs do
not pay the import cost. The figures are a convenience view; the CSV is the
authoritative output.
"""

from __future__ import annotations

__all__ = [
    "render_detection_sweep",
    "render_minerror_sweep",
    "render_rate_sweep",
]


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _column(rows, header, name):
    i = header.index(name)
    return [row[i] for row in rows]


def _curve_groups(rows, header, vs_key):
    """Split rows into (label, rows) groups by the vs column, if any."""
    if vs_key is None:
        return [(None, rows)]
    i = header.index(vs_key)
    groups = []
    for row in rows:
        value = row[i]
        if not groups or groups[-1][0] != value:
            groups.append((value, []))
        groups[-1][1].append(row)
    return [(f"{vs_key} = {value:g}", grp) for value, grp in groups]


def render_detection_sweep(header, rows, vs_key, png_path) -> None:
    """Error rates versus detection threshold, analytic plus MC overlay."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    taus = _column(rows, header, "tau")
    ax.plot(taus, _column(rows, header, "p_fa"), "-", label="false alarm")
    ax.plot(taus, _column(rows, header, "p_md"), "--", label="miss detection")
    ax.plot(taus, _column(rows, header, "xi"), "-.", label="total error")
    if "mc_p_fa" in header:
        ax.errorbar(taus, _column(rows, header, "mc_p_fa"),
                    yerr=_column(rows, header, "mc_p_fa_half"),
                    fmt="o", ms=3, capsize=2, label="MC false alarm")
        ax.errorbar(taus, _column(rows, header, "mc_p_md"),
                    yerr=_column(rows, header, "mc_p_md_half"),
                    fmt="s", ms=3, capsize=2, label="MC miss detection")
    ax.set_xlabel("detection threshold tau")
    ax.set_ylabel("probability")
    ax.set_ylim(-0.02, 1.05)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def render_minerror_sweep(header, rows, vs_key, png_path) -> None:
    """Warden's minimum total error versus covert power, one line per curve."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for label, group in _curve_groups(rows, header, vs_key):
        ax.plot(_column(group, header, "p_delta"),
                _column(group, header, "xi_star"),
                "-o", ms=3, label=label)
    ax.set_xlabel("covert power p_delta")
    ax.set_ylabel("minimum total detection error xi_star")
    ax.set_ylim(-0.02, 1.05)
    ax.grid(True, alpha=0.4)
    if vs_key is not None:
        ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def render_rate_sweep(header, rows, vs_key, png_path) -> None:
    """Mean effective covert rate versus covert power with optimum markers."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    kind = header.index("kind")
    sweep_rows = [r for r in rows if r[kind] == "curve"]
    for label, group in _curve_groups(sweep_rows, header, vs_key):
        line, = ax.plot(_column(group, header, "p_delta"),
                        _column(group, header, "r_bar_c_closed"),
                        "-", label=label)
        ax.plot(_column(group, header, "p_delta"),
                _column(group, header, "r_bar_c_quadrature"),
                "x", ms=4, color=line.get_color(),
                label=None if label is None else f"{label} (quadrature)")
    for r in rows:
        if r[kind] == "p_delta_eps":
            ax.axvline(r[header.index("p_delta")], linestyle=":",
                       color="gray", alpha=0.8)
        elif r[kind] == "optimum":
            ax.plot(r[header.index("p_delta")],
                    r[header.index("r_bar_c_closed")],
                    "r*", ms=12, zorder=5)
    ax.set_xlabel("covert power p_delta")
    ax.set_ylabel("mean effective covert rate (bits/s/Hz)")
    ax.grid(True, alpha=0.4)
    handles, labels = ax.get_legend_handles_labels()
    if handles:
        ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
