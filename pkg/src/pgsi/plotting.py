"""Benchmark figure rendering, kept apart so the CLI imports it lazily."""

from __future__ import annotations


def render_bench_plot(rows, path: str) -> None:
    """Two-panel comparison: solve times and visited counts per game size.

    `rows` are bench records with size, global_ms, local_ms,
    local_visited_mean attributes. Writes the figure to `path`; the file
    format follows the extension.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = sorted(rows, key=lambda r: r.size)
    sizes = [r.size for r in rows]
    fig, (ax_time, ax_visited) = plt.subplots(1, 2, figsize=(10, 4))

    ax_time.plot(sizes, [r.global_ms for r in rows], marker="o", label="global")
    ax_time.plot(sizes, [r.local_ms for r in rows], marker="s", label="local")
    ax_time.set_xlabel("game size (nodes)")
    ax_time.set_ylabel("mean solve time (ms)")
    ax_time.set_title("solve time")
    ax_time.legend()

    ax_visited.plot(
        sizes, [r.local_visited_mean for r in rows], marker="s", label="local visited"
    )
    ax_visited.plot(sizes, sizes, linestyle="--", color="gray", label="game size")
    ax_visited.set_xlabel("game size (nodes)")
    ax_visited.set_ylabel("mean visited nodes")
    ax_visited.set_title("locality")
    ax_visited.legend()

    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
