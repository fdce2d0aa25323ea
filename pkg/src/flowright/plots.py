"""Figure rendering for solved schedules.

One two-panel figure per schedule: transmit power over time (with harvest
arrivals marked when an instance is supplied) above the two users' rate
staircases.  Written to a file; no interactive backends are touched.
"""

from __future__ import annotations


def _staircase(segments, attr):
    xs, ys = [], []
    for seg in segments:
        xs += [seg.t_start, seg.t_end]
        ys += [getattr(seg, attr)] * 2
    return xs, ys


def render_schedule(schedule, path, instance=None, dpi=150):
    """Render the schedule's power and rate profiles to `path` (PNG)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    segments = schedule.segments()
    t_end = schedule.completion_time
    hours = t_end > 3.0 * 3600.0
    div = 3600.0 if hours else 1.0
    unit = "h" if hours else "s"

    fig, (ax_p, ax_r) = plt.subplots(2, 1, figsize=(9, 6), sharex=True)

    xs, ps = _staircase(segments, "power")
    p_scale = 1e3 if segments and max(ps) < 0.5 else 1.0
    ax_p.plot([x / div for x in xs], [p * p_scale for p in ps], lw=2, color="tab:red")
    ax_p.set_ylabel("power [mW]" if p_scale == 1e3 else "power [W]")
    ax_p.axvline(t_end / div, ls=":", color="gray")
    if instance is not None:
        for h in instance.harvests:
            ax_p.axvline(h.time / div, ls="--", lw=0.6, color="tab:green", alpha=0.6)
            ax_p.annotate(
                f"{h.energy:g} J",
                (h.time / div, 1.0),
                xycoords=("data", "axes fraction"),
                fontsize=7,
                rotation=90,
                va="top",
            )
    ax_p.grid(alpha=0.3)
    ax_p.set_title(f"completion at T = {t_end / div:.4g} {unit}")

    for attr, label, color in (("r1", "user 1", "tab:blue"), ("r2", "user 2", "tab:orange")):
        xs, rs = _staircase(segments, attr)
        ax_r.plot([x / div for x in xs], rs, lw=2, label=label, color=color)
    ax_r.set_ylabel("rate [bits/s]")
    ax_r.set_xlabel(f"time [{unit}]")
    ax_r.legend(loc="upper left")
    ax_r.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
