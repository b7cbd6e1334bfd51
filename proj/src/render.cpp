#include "morphogrid/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "morphogrid/error.hpp"

namespace morphogrid {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) {
    throw MorphoError(ErrorCode::kInvalidArgument, "non-finite coordinate in scene");
  }
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// World -> pixel transform for one panel.
class PanelTransform {
 public:
  explicit PanelTransform(const Panel& panel) {
    const auto& vp = panel.viewport;
    const auto& px = panel.pixels;
    if (!(vp.x.extent() > 0.0) || !(vp.y.extent() > 0.0) || !(px.width > 0.0) ||
        !(px.height > 0.0) || !std::isfinite(vp.x.extent()) || !std::isfinite(vp.y.extent())) {
      throw MorphoError(ErrorCode::kDegenerateViewport,
                        "panel '" + panel.title + "' has an empty viewport or pixel area");
    }
    scale_ = std::min(px.width / vp.x.extent(), px.height / vp.y.extent());
    offset_x_ = px.left + 0.5 * (px.width - scale_ * vp.x.extent()) - scale_ * vp.x.lo;
    offset_y_ = px.top + 0.5 * (px.height - scale_ * vp.y.extent()) + scale_ * vp.y.hi;
  }

  double scale() const { return scale_; }
  double x(double wx) const { return offset_x_ + scale_ * wx; }
  double y(double wy) const { return offset_y_ - scale_ * wy; }

 private:
  double scale_ = 1.0;
  double offset_x_ = 0.0;
  double offset_y_ = 0.0;
};

class SvgWriter {
 public:
  SvgWriter(std::ostringstream& out, const Style& style) : out_(out), style_(style) {}

  void panel(const Panel& panel) {
    const PanelTransform tf(panel);
    out_ << "<g class=\"panel\">\n";
    if (!panel.title.empty()) {
      out_ << "<text x=\"" << num(panel.pixels.left + 6) << "\" y=\""
           << num(panel.pixels.top + style_.font_size + 4) << "\" font-family=\"sans-serif\" font-size=\""
           << num(style_.font_size) << "\">" << escape(panel.title) << "</text>\n";
    }
    for (const auto& layer : panel.layers) {
      out_ << "<g class=\"" << escape(layer.name) << "\">\n";
      for (const auto& prim : layer.primitives) {
        std::visit([&](const auto& p) { emit(tf, p); }, prim);
      }
      out_ << "</g>\n";
    }
    out_ << "</g>\n";
  }

 private:
  double width(LineClass c) const {
    return c == LineClass::kHeavy ? style_.heavy_width : style_.light_width;
  }
  static const char* class_name(LineClass c) { return c == LineClass::kHeavy ? "heavy" : "light"; }

  void emit(const PanelTransform& tf, const PolylinePrimitive& p) {
    if (p.points.size() < 2) return;
    out_ << (p.closed ? "<polygon" : "<polyline") << " class=\"" << class_name(p.line)
         << "\" fill=\"none\" stroke=\"black\" stroke-width=\"" << num(width(p.line)) << "\" points=\"";
    for (std::size_t i = 0; i < p.points.size(); ++i) {
      if (i) out_ << ' ';
      out_ << num(tf.x(p.points[i].x)) << ',' << num(tf.y(p.points[i].y));
    }
    out_ << "\"/>\n";
  }

  void emit(const PanelTransform& tf, const MarkerPrimitive& m) {
    const double r = style_.marker_radius * (m.baseline ? style_.baseline_marker_ratio : 1.0);
    out_ << "<circle cx=\"" << num(tf.x(m.center.x)) << "\" cy=\"" << num(tf.y(m.center.y))
         << "\" r=\"" << num(r) << "\" stroke=\"black\" stroke-width=\"" << num(style_.light_width)
         << "\" fill=\"" << (m.filled ? "black" : "none") << "\"/>\n";
  }

  void emit(const PanelTransform& tf, const TextPrimitive& t) {
    out_ << "<text x=\"" << num(tf.x(t.anchor.x)) << "\" y=\"" << num(tf.y(t.anchor.y))
         << "\" font-family=\"sans-serif\" font-size=\"" << num(style_.font_size * 0.8) << "\">"
         << escape(t.text) << "</text>\n";
  }

  void emit(const PanelTransform& tf, const SegmentNetworkPrimitive& n) {
    for (const auto& s : n.segments) {
      if (s.i >= n.nodes.size() || s.j >= n.nodes.size()) {
        throw MorphoError(ErrorCode::kInvalidArgument, "segment references a missing node");
      }
      const Point2 a = n.nodes[s.i];
      const Point2 b = n.nodes[s.j];
      out_ << "<line class=\"" << class_name(n.line) << "\" x1=\"" << num(tf.x(a.x)) << "\" y1=\""
           << num(tf.y(a.y)) << "\" x2=\"" << num(tf.x(b.x)) << "\" y2=\"" << num(tf.y(b.y))
           << "\" stroke=\"black\" stroke-width=\"" << num(width(n.line)) << "\"/>\n";
    }
  }

  std::ostringstream& out_;
  const Style& style_;
};

void add_markers(Layer& layer, std::span<const Point2> points, bool filled,
                 std::optional<SegmentIndex> baseline) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool on_baseline = baseline && (i == baseline->i || i == baseline->j);
    layer.primitives.push_back(MarkerPrimitive{points[i], filled, on_baseline});
  }
}

}  // namespace

std::string render_scene(const Scene& scene) {
  if (!(scene.width > 0.0) || !(scene.height > 0.0)) {
    throw MorphoError(ErrorCode::kDegenerateViewport, "scene canvas has zero size");
  }
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(scene.width)
      << "\" height=\"" << num(scene.height) << "\" viewBox=\"0 0 " << num(scene.width) << ' '
      << num(scene.height) << "\">\n";
  SvgWriter writer(out, scene.style);
  for (const auto& panel : scene.panels) writer.panel(panel);
  out << "</svg>\n";
  return out.str();
}

Scene compose_grid(std::vector<Panel> panels, int columns, double panel_size) {
  if (columns < 1 || !(panel_size > 0.0)) {
    throw MorphoError(ErrorCode::kDegenerateViewport, "panel layout needs positive dimensions");
  }
  const int n = static_cast<int>(panels.size());
  const int rows = std::max(1, (n + columns - 1) / columns);
  Scene scene;
  scene.width = columns * panel_size;
  scene.height = rows * panel_size;
  for (int idx = 0; idx < n; ++idx) {
    auto& p = panels[idx];
    p.pixels = {(idx % columns) * panel_size, (idx / columns) * panel_size, panel_size, panel_size};
  }
  scene.panels = std::move(panels);
  return scene;
}

Scene compose_four_panel(Panel observed_spline, Panel fitted_spline, Panel trend,
                         Panel trimmed_trend, double panel_size) {
  std::vector<Panel> panels;
  panels.push_back(std::move(observed_spline));
  panels.push_back(std::move(fitted_spline));
  panels.push_back(std::move(trend));
  panels.push_back(std::move(trimmed_trend));
  return compose_grid(std::move(panels), 2, panel_size);
}

Viewport fit_viewport(std::span<const Point2> points, double pad) {
  if (points.empty()) return {{-1, 1}, {-1, 1}};
  Interval x{points[0].x, points[0].x};
  Interval y{points[0].y, points[0].y};
  for (const auto& p : points) {
    x.lo = std::min(x.lo, p.x);
    x.hi = std::max(x.hi, p.x);
    y.lo = std::min(y.lo, p.y);
    y.hi = std::max(y.hi, p.y);
  }
  double margin = pad * std::max(x.extent(), y.extent());
  if (!(margin > 0.0)) margin = 1.0;
  return {{x.lo - margin, x.hi + margin}, {y.lo - margin, y.hi + margin}};
}

Panel make_grid_panel(std::string title, const DeformedGrid& grid, const GridPanelOptions& options) {
  Panel panel;
  panel.title = std::move(title);
  Layer lines{"grid", {}};
  std::vector<Point2> extent;
  for (const auto* family : {&grid.vertical, &grid.horizontal}) {
    for (const auto& line : *family) {
      for (auto& run : visible_runs(line)) {
        extent.insert(extent.end(), run.begin(), run.end());
        lines.primitives.push_back(PolylinePrimitive{std::move(run), LineClass::kLight, false});
      }
    }
  }
  panel.layers.push_back(std::move(lines));
  if (options.outline.size() >= 3) {
    panel.layers.push_back({"outline", {PolylinePrimitive{options.outline, LineClass::kHeavy, true}}});
    extent.insert(extent.end(), options.outline.begin(), options.outline.end());
  }
  Layer markers{"landmarks", {}};
  add_markers(markers, options.observed, true, options.baseline);
  add_markers(markers, options.fitted, false, std::nullopt);
  extent.insert(extent.end(), options.observed.begin(), options.observed.end());
  extent.insert(extent.end(), options.fitted.begin(), options.fitted.end());
  panel.layers.push_back(std::move(markers));
  panel.viewport = fit_viewport(extent);
  return panel;
}

Panel make_overlay_panel(std::string title, std::span<const Point2> template_points,
                         std::span<const Point2> target_points,
                         std::optional<SegmentIndex> baseline) {
  Panel panel;
  panel.title = std::move(title);
  const std::vector<Point2> tp(template_points.begin(), template_points.end());
  const std::vector<Point2> gp(target_points.begin(), target_points.end());
  panel.layers.push_back({"template", {PolylinePrimitive{tp, LineClass::kLight, true}}});
  panel.layers.push_back({"target", {PolylinePrimitive{gp, LineClass::kHeavy, true}}});
  Layer markers{"landmarks", {}};
  add_markers(markers, target_points, true, baseline);
  for (std::size_t i = 0; i < target_points.size(); ++i) {
    markers.primitives.push_back(TextPrimitive{target_points[i], std::to_string(i + 1)});
  }
  panel.layers.push_back(std::move(markers));
  std::vector<Point2> extent = tp;
  extent.insert(extent.end(), gp.begin(), gp.end());
  panel.viewport = fit_viewport(extent, 0.12);
  return panel;
}

Panel make_network_panel(std::string title, std::span<const Point2> template_points,
                         std::span<const Point2> target_points,
                         const std::vector<SegmentIndex>& segments) {
  Panel panel;
  panel.title = std::move(title);
  const std::vector<Point2> tp(template_points.begin(), template_points.end());
  const std::vector<Point2> gp(target_points.begin(), target_points.end());
  panel.layers.push_back({"template", {SegmentNetworkPrimitive{tp, segments, LineClass::kLight}}});
  panel.layers.push_back({"target", {SegmentNetworkPrimitive{gp, segments, LineClass::kHeavy}}});
  Layer markers{"landmarks", {}};
  add_markers(markers, template_points, false, std::nullopt);
  add_markers(markers, target_points, true, std::nullopt);
  panel.layers.push_back(std::move(markers));
  std::vector<Point2> extent = tp;
  extent.insert(extent.end(), gp.begin(), gp.end());
  panel.viewport = fit_viewport(extent, 0.08);
  return panel;
}

}  // namespace morphogrid
