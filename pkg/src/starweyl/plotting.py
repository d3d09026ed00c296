"""Figure rendering for the CLI report paths.

Each renderer reads the CSV its command just wrote and saves a PNG next to
it, so the figures always reflect exactly the delimited output.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _float(s):
    try:
        return float(s)
    except ValueError:
        return float("nan")


def _matrix_magnitude_plot(path, out_png, prefix_tail, title):
    header, rows = _read_csv(path)
    lam = [_float(r[0]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for c, name in enumerate(header):
        if name.endswith("_re") and prefix_tail in name:
            im_col = c + 1
            mags = [abs(complex(_float(r[c]), _float(r[im_col]))) for r in rows]
            if all(m in (0.0, 1.0) or m != m for m in mags):
                continue  # skip identity filler entries
            ax.plot(lam, mags, marker=".", label=name[:-3])
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("|entry|")
    ax.set_yscale("log")
    ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_png, dpi=130)
    plt.close(fig)


def render_basis(outdir):
    header, rows = _read_csv(f"{outdir}/basis.csv")
    lam = sorted({_float(r[0]) for r in rows})
    edges = sorted({r[2] for r in rows})
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for e in edges:
        sub = [r for r in rows if r[2] == e]
        xs = [_float(r[0]) for r in sub]
        drift = [_float(r[-1]) for r in sub]
        ax.plot(xs, drift, marker=".", label=f"edge {e}")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Wronskian drift")
    ax.set_yscale("log")
    ax.set_title(f"basis integration over {len(lam)} grid points")
    ax.legend()
    fig.tight_layout()
    fig.savefig(f"{outdir}/basis.png", dpi=130)
    plt.close(fig)
    return ["basis.png"]


def render_weyl(outdir):
    _matrix_magnitude_plot(f"{outdir}/weyl.csv", f"{outdir}/weyl.png",
                           "M_s", "boundary Weyl matrix entries")
    return ["weyl.png"]


def render_internal(outdir):
    _matrix_magnitude_plot(f"{outdir}/internal.csv", f"{outdir}/internal.png",
                           "m_j", "direct internal Weyl matrix entries")
    return ["internal.png"]


def render_eigs(outdir):
    header, rows = _read_csv(f"{outdir}/eigs.csv")
    fig, ax = plt.subplots(figsize=(7, 3.5))
    xs = [_float(r[0]) for r in rows]
    res = [_float(r[2]) for r in rows]
    conv = [r[3] == "1" for r in rows]
    ax.scatter([x for x, c in zip(xs, conv) if c],
               [y for y, c in zip(res, conv) if c], marker="o", label="converged")
    if not all(conv):
        ax.scatter([x for x, c in zip(xs, conv) if not c],
                   [y for y, c in zip(res, conv) if not c],
                   marker="x", color="red", label="not converged")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("|Delta| residual")
    ax.set_yscale("log")
    ax.set_title("located characteristic-function zeros")
    ax.legend()
    fig.tight_layout()
    fig.savefig(f"{outdir}/eigs.png", dpi=130)
    plt.close(fig)
    return ["eigs.png"]


def render_asym(outdir):
    header, rows = _read_csv(f"{outdir}/asym.csv")
    mags = [_float(r[0]) for r in rows]
    devs = [_float(r[1]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(mags, devs, marker="o")
    ax.set_xlabel("|rho|")
    ax.set_ylabel("deviation from leading asymptotics")
    ax.set_title("large-|rho| deviation of the seeded Weyl solution")
    fig.tight_layout()
    fig.savefig(f"{outdir}/asym.png", dpi=130)
    plt.close(fig)
    return ["asym.png"]


def render_reconstruct(outdir):
    _matrix_magnitude_plot(f"{outdir}/reconstruct.csv", f"{outdir}/reconstruct.png",
                           "m_N", "reconstructed internal Weyl matrix entries")
    return ["reconstruct.png"]


def render_roundtrip(outdir):
    header, rows = _read_csv(f"{outdir}/roundtrip.csv")
    vals = [_float(v) for v in rows[0][:3]]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(["max discrepancy", "source spread", "flagged fraction"], vals)
    ax.axhline(_float(rows[0][3]), color="red", linestyle="--", label="tolerance")
    ax.set_yscale("log")
    ax.set_title("round-trip summary"
                 + (" (passed)" if rows[0][4] == "1" else " (FAILED)"))
    ax.legend()
    fig.tight_layout()
    fig.savefig(f"{outdir}/roundtrip.png", dpi=130)
    plt.close(fig)
    return ["roundtrip.png"]


_RENDERERS = {
    "basis": render_basis,
    "weyl": render_weyl,
    "internal": render_internal,
    "eigs": render_eigs,
    "asym": render_asym,
    "reconstruct": render_reconstruct,
    "roundtrip": render_roundtrip,
}


def render(command: str, outdir: str):
    """Render the figure for a command's CSV output; returns written names."""
    fn = _RENDERERS.get(command)
    return fn(outdir) if fn else []
