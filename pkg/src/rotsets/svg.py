"""Minimal SVG output for planar bodies and point sets."""
from xml.sax.saxutils import escape

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]


class Canvas:
    """Collects layers in data coordinates and maps them onto a square viewport."""

    def __init__(self, size=480, margin=24):
        self.size = size
        self.margin = margin
        self.layers = []
        self.points = []

    def polygon(self, vertices, stroke="#1f77b4", fill="none", width=1.5, opacity=1.0, label=None):
        pts = [(float(x), float(y)) for x, y in vertices]
        self.layers.append(("poly", pts, dict(stroke=stroke, fill=fill, width=width,
                                                opacity=opacity, label=label)))
        self.points.extend(pts)

    def markers(self, points, color="#d62728", radius=3.0):
        pts = [(float(x), float(y)) for x, y in points]
        self.layers.append(("dots", pts, dict(color=color, radius=radius)))
        self.points.extend(pts)

    def _transform(self):
        xs = [p[0] for p in self.points] or [0.0]
        ys = [p[1] for p in self.points] or [0.0]
        span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
        k = (self.size - 2 * self.margin) / span
        x0, y1 = min(xs), max(ys)
        return lambda p: (self.margin + (p[0] - x0) * k, self.margin + (y1 - p[1]) * k)

    def render(self):
        tf = self._transform()
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.size}" '
               f'height="{self.size}" viewBox="0 0 {self.size} {self.size}">',
               '<rect width="100%" height="100%" fill="white"/>']
        for kind, pts, st in self.layers:
            if kind == "poly":
                xy = [tf(p) for p in pts]
                if len(xy) == 1:
                    x, y = xy[0]
                    out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="{st["stroke"]}"/>')
                    continue
                d = "M" + " L".join(f"{x:.3f},{y:.3f}" for x, y in xy) + " Z"
                title = f"<title>{escape(st['label'])}</title>" if st["label"] else ""
                out.append(f'<path d="{d}" fill="{st["fill"]}" fill-rule="nonzero" '
                           f'stroke="{st["stroke"]}" stroke-width="{st["width"]}" '
                           f'stroke-opacity="{st["opacity"]}">{title}</path>')
            else:
                for p in pts:
                    x, y = tf(p)
                    out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{st["radius"]}" '
                               f'fill="{st["color"]}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def body_svg(K, corners=(), size=480):
    c = Canvas(size)
    c.polygon(K.vertices, fill="#dce9f5")
    if corners:
        c.markers(corners)
    return c.render()


def overlay_svg(K, snapshots, size=480):
    """K in black with successive vertex lists drawn in cycling colours."""
    c = Canvas(size)
    c.polygon(K.vertices, stroke="black", width=2.0, label="K")
    for i, verts in enumerate(snapshots):
        c.polygon(verts, stroke=PALETTE[i % len(PALETTE)], opacity=0.8, label=f"step {i}")
    return c.render()
