"""Optional plotting helper: figures are saved only when matplotlib is installed."""

from __future__ import annotations

from pathlib import Path

OUT = Path(__file__).parent / "figures"


def save(fig_fn, name: str) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print(f"(matplotlib not installed; skipping {name}.png)")
        return
    OUT.mkdir(exist_ok=True)
    fig = fig_fn(plt)
    fig.savefig(OUT / f"{name}.png", dpi=120, bbox_inches="tight")
    plt.close(fig)
    print(f"wrote {OUT / (name + '.png')}")
