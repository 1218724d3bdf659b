"""Minimal SVG line plot, no plotting library needed."""
import numpy as np


def write_svg(path, x, y, xlabel="", ylabel="", log=False, w=480, h=320, pad=50):
    x, y = np.asarray(x, float), np.asarray(y, float)
    if log:
        keep = (x > 0) & (y > 0)
        x, y = np.log10(x[keep]), np.log10(y[keep])
    if len(x) == 0:
        x = y = np.zeros(1)

    def scale(v, lo, hi, a, b):
        return a + (b - a) * (v - lo) / (hi - lo if hi > lo else 1.0)

    px = scale(x, x.min(), x.max(), pad, w - pad / 2)
    py = scale(y, y.min(), y.max(), h - pad, pad / 2)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    tag = "log10 " if log else ""
    with open(path, "w") as f:
        f.write(f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">\n')
        f.write(f'<rect width="{w}" height="{h}" fill="white"/>\n')
        f.write(f'<polyline fill="none" stroke="black" points="{pts}"/>\n')
        for a, b in zip(px, py):
            f.write(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3"/>\n')
        f.write(f'<text x="{w / 2}" y="{h - 10}" text-anchor="middle">{tag}{xlabel} '
                f'[{x.min():.3g}, {x.max():.3g}]</text>\n')
        f.write(f'<text x="12" y="{h / 2}" transform="rotate(-90 12 {h / 2})" text-anchor="middle">'
                f'{tag}{ylabel} [{y.min():.3g}, {y.max():.3g}]</text>\n')
        f.write("</svg>\n")
    return path
