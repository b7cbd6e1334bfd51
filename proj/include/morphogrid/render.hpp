#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "morphogrid/core.hpp"
#include "morphogrid/gridlab.hpp"

namespace morphogrid {

enum class LineClass { kLight, kHeavy };

struct PolylinePrimitive {
  std::vector<Point2> points;
  LineClass line = LineClass::kLight;
  bool closed = false;
};

struct MarkerPrimitive {
  Point2 center;
  bool filled = true;
  bool baseline = false;  // drawn larger, with the fixed baseline radius ratio
};

struct TextPrimitive {
  Point2 anchor;
  std::string text;
};

struct SegmentNetworkPrimitive {
  std::vector<Point2> nodes;
  std::vector<SegmentIndex> segments;
  LineClass line = LineClass::kLight;
};

using Primitive =
    std::variant<PolylinePrimitive, MarkerPrimitive, TextPrimitive, SegmentNetworkPrimitive>;

struct Layer {
  std::string name;
  std::vector<Primitive> primitives;
};

/// World-coordinate rectangle shown in a panel.
struct Viewport {
  Interval x;
  Interval y;
};

/// Pixel rectangle on the canvas; y grows downward.
struct PixelRect {
  double left = 0.0;
  double top = 0.0;
  double width = 480.0;
  double height = 480.0;
};

struct Panel {
  std::string title;
  Viewport viewport;
  PixelRect pixels;
  std::vector<Layer> layers;
};

inline constexpr double kDefaultPanelSize = 480.0;

struct Style {
  double light_width = 0.75;
  double heavy_width = 1.5;
  double marker_radius = 3.0;
  double baseline_marker_ratio = 1.8;
  double font_size = 12.0;
};

/// A canvas of one or more panels. Each panel maps its viewport into its
/// pixel rectangle with a single isotropic scale, centered, y axis flipped.
struct Scene {
  double width = kDefaultPanelSize;
  double height = kDefaultPanelSize;
  Style style;
  std::vector<Panel> panels;
};

/// SVG 1.1 text. Byte-identical for identical scenes; numbers carry 6
/// significant digits. Throws kDegenerateViewport for empty viewports or
/// pixel rectangles and kInvalidArgument for non-finite coordinates.
std::string render_scene(const Scene& scene);

/// 2x2 layout, row-major: observed spline, fitted spline, trend with markers,
/// trimmed trend. Pixel rectangles are reassigned.
Scene compose_four_panel(Panel observed_spline, Panel fitted_spline, Panel trend,
                         Panel trimmed_trend, double panel_size = kDefaultPanelSize);

/// Panels laid out row-major in `columns` columns of square cells.
Scene compose_grid(std::vector<Panel> panels, int columns, double panel_size);

/// Bounding box of the points, padded by `pad` times the larger extent.
Viewport fit_viewport(std::span<const Point2> points, double pad = 0.06);

// Figure builders.

struct GridPanelOptions {
  std::vector<Point2> observed;  // solid circles
  std::vector<Point2> fitted;    // open circles
  std::optional<SegmentIndex> baseline;  // landmarks drawn as larger circles
  std::vector<Point2> outline;           // closed heavy polygon
};

/// Deformed grid (kept runs only) with optional landmark markers.
Panel make_grid_panel(std::string title, const DeformedGrid& grid, const GridPanelOptions& options);

/// Two configurations as closed polygons: template light, target heavy;
/// baseline endpoints circled.
Panel make_overlay_panel(std::string title, std::span<const Point2> template_points,
                         std::span<const Point2> target_points,
                         std::optional<SegmentIndex> baseline);

/// Segment network for both configurations: template light, target heavy.
Panel make_network_panel(std::string title, std::span<const Point2> template_points,
                         std::span<const Point2> target_points,
                         const std::vector<SegmentIndex>& segments);

}  // namespace morphogrid
