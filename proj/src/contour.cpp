#include "kinplume/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace kinplume::contour {

namespace {

struct Segment {
  std::uint64_t a, b;
  Point pa, pb;
};

// horizontal edge (ix, iy)-(ix+1, iy) and vertical edge (ix, iy)-(ix, iy+1)
std::uint64_t edge_id(int vertical, std::size_t ix, std::size_t iy) {
  return (static_cast<std::uint64_t>(iy) << 33) | (static_cast<std::uint64_t>(ix) << 1) |
         static_cast<std::uint64_t>(vertical);
}

Point lerp(double level, Point p, double vp, Point q, double vq) {
  const double s = (level - vp) / (vq - vp);
  return {p.first + s * (q.first - p.first), p.second + s * (q.second - p.second)};
}

std::vector<Segment> cell_segments(std::span<const double> xs, std::span<const double> ys,
                                   std::span<const double> v, double level) {
  const std::size_t nx = xs.size(), ny = ys.size();
  std::vector<Segment> out;
  for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      // corners counter-clockwise from lower left
      const double c[4] = {v[iy * nx + ix], v[iy * nx + ix + 1], v[(iy + 1) * nx + ix + 1],
                           v[(iy + 1) * nx + ix]};
      const Point p[4] = {{xs[ix], ys[iy]},
                          {xs[ix + 1], ys[iy]},
                          {xs[ix + 1], ys[iy + 1]},
                          {xs[ix], ys[iy + 1]}};
      int code = 0;
      for (int k = 0; k < 4; ++k) {
        if (c[k] >= level) code |= 1 << k;
      }
      if (code == 0 || code == 15) continue;
      // edge k joins corner k and corner k+1
      const std::uint64_t ids[4] = {edge_id(0, ix, iy), edge_id(1, ix + 1, iy),
                                    edge_id(0, ix, iy + 1), edge_id(1, ix, iy)};
      std::vector<int> crossings;
      for (int k = 0; k < 4; ++k) {
        const bool in_a = (code >> k) & 1;
        const bool in_b = (code >> ((k + 1) % 4)) & 1;
        if (in_a != in_b) crossings.push_back(k);
      }
      const auto point_on = [&](int k) { return lerp(level, p[k], c[k], p[(k + 1) % 4], c[(k + 1) % 4]); };
      if (crossings.size() == 2) {
        out.push_back({ids[crossings[0]], ids[crossings[1]], point_on(crossings[0]),
                       point_on(crossings[1])});
        continue;
      }
      // saddle: corners 0 and 2 share a side, 1 and 3 the other
      const double centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
      const bool corner0_in = code & 1;
      const bool join_around_0 = (centre >= level) != corner0_in;
      if (join_around_0) {
        // corner 0 and corner 2 isolated: cut them off
        out.push_back({ids[3], ids[0], point_on(3), point_on(0)});
        out.push_back({ids[1], ids[2], point_on(1), point_on(2)});
      } else {
        out.push_back({ids[0], ids[1], point_on(0), point_on(1)});
        out.push_back({ids[2], ids[3], point_on(2), point_on(3)});
      }
    }
  }
  return out;
}

std::vector<Polyline> stitch(const std::vector<Segment>& segs, double level) {
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_edge;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    by_edge[segs[s].a].push_back(s);
    by_edge[segs[s].b].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<Polyline> lines;
  const auto walk = [&](std::size_t start, std::uint64_t from_edge) {
    Polyline line;
    line.level = level;
    std::size_t s = start;
    std::uint64_t edge = from_edge;
    line.points.push_back(segs[s].a == edge ? segs[s].pa : segs[s].pb);
    while (true) {
      used[s] = true;
      const bool forward = segs[s].a == edge;
      edge = forward ? segs[s].b : segs[s].a;
      line.points.push_back(forward ? segs[s].pb : segs[s].pa);
      std::size_t next = segs.size();
      for (std::size_t cand : by_edge[edge]) {
        if (!used[cand]) {
          next = cand;
          break;
        }
      }
      if (next == segs.size()) break;
      s = next;
    }
    line.closed = line.points.size() > 2 && edge == from_edge;
    if (line.closed) line.points.back() = line.points.front();
    lines.push_back(std::move(line));
  };
  // open lines start at edges touched once (grid boundary)
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    for (std::uint64_t e : {segs[s].a, segs[s].b}) {
      if (!used[s] && by_edge[e].size() == 1) walk(s, e);
    }
  }
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (!used[s]) walk(s, segs[s].a);
  }
  return lines;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double dx = b.first - a.first, dy = b.second - a.second;
  const double len2 = dx * dx + dy * dy;
  double s = 0.0;
  if (len2 > 0.0) {
    s = ((p.first - a.first) * dx + (p.second - a.second) * dy) / len2;
    s = std::clamp(s, 0.0, 1.0);
  }
  return std::hypot(p.first - a.first - s * dx, p.second - a.second - s * dy);
}

double directed(std::span<const Polyline> from, std::span<const Polyline> to) {
  double worst = 0.0;
  for (const auto& line : from) {
    for (const auto& p : line.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& target : to) {
        if (target.points.size() == 1) best = std::min(best, point_segment_distance(p, target.points[0], target.points[0]));
        for (std::size_t k = 0; k + 1 < target.points.size(); ++k) {
          best = std::min(best, point_segment_distance(p, target.points[k], target.points[k + 1]));
        }
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

// vertical extent of a closed polyline along the line x = x0
double extent_at(const Polyline& line, double x0) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k + 1 < line.points.size(); ++k) {
    const auto [xa, ya] = line.points[k];
    const auto [xb, yb] = line.points[k + 1];
    if ((xa - x0) * (xb - x0) > 0.0 || xa == xb) continue;
    const double y = ya + (x0 - xa) / (xb - xa) * (yb - ya);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace

std::vector<Polyline> ContourSet::at_level(double level) const {
  std::vector<Polyline> out;
  for (const auto& l : lines) {
    if (l.level == level) out.push_back(l);
  }
  return out;
}

ContourSet marching_squares(std::span<const double> xs, std::span<const double> ys,
                            std::span<const double> values, std::span<const double> levels) {
  if (values.size() != xs.size() * ys.size()) {
    throw InvalidParameter("contour values do not match the grid dimensions");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidParameter("contour input contains non-finite values");
  }
  ContourSet set;
  for (double level : levels) {
    auto lines = stitch(cell_segments(xs, ys, values, level), level);
    if (lines.empty()) {
      set.empty_levels.push_back(level);
      std::ostringstream os;
      os << "contour level " << level << " does not intersect the field";
      set.warnings.push_back(os.str());
    }
    for (auto& l : lines) set.lines.push_back(std::move(l));
  }
  return set;
}

ContourSet contour_export(const planar::DensityField2D& field, std::span<const double> levels,
                          bool scaled) {
  const bool use_scaled = scaled && !field.x_hat.empty() && !field.y_hat.empty();
  return marching_squares(use_scaled ? field.x_hat : field.x, use_scaled ? field.y_hat : field.y,
                          field.values, levels);
}

Polyline ellipse(double cx, double cy, double ax, double ay, std::size_t n) {
  Polyline line;
  line.closed = true;
  for (std::size_t k = 0; k <= n; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    line.points.emplace_back(cx + ax * std::cos(phi), cy + ay * std::sin(phi));
  }
  return line;
}

double hausdorff_distance(std::span<const Polyline> a, std::span<const Polyline> b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed(a, b), directed(b, a));
}

double convexity_defect(const Polyline& line) {
  if (!line.closed || line.points.size() < 4) return INFINITY;
  std::vector<std::pair<double, double>> pts(line.points.begin(), line.points.end() - 1);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return INFINITY;
  const auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  // Andrew's monotone chain
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);

  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  for (const auto& [x, y] : pts) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  }
  const double diam = std::hypot(hi_x - lo_x, hi_y - lo_y);
  double worst = 0.0;
  for (const auto& p : pts) {
    double d = INFINITY;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      d = std::min(d, point_segment_distance(p, hull[i], hull[(i + 1) % hull.size()]));
    }
    worst = std::max(worst, d);
  }
  return worst / diam;
}

bool is_convex(const Polyline& line, double tolerance) {
  return convexity_defect(line) <= tolerance;
}

double width_asymmetry(const Polyline& line) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : line.points) {
    lo = std::min(lo, p.first);
    hi = std::max(hi, p.first);
  }
  const double centre = 0.5 * (lo + hi), d = 0.25 * (hi - lo);
  const double behind = extent_at(line, centre - d);
  return behind > 0.0 ? extent_at(line, centre + d) / behind : INFINITY;
}

void write_contours_csv(std::ostream& os, const ContourSet& set) {
  const auto old = os.precision(17);
  for (const auto& w : set.warnings) os << "# warning: " << w << '\n';
  os << "level,line,point,x,y\n";
  for (std::size_t l = 0; l < set.lines.size(); ++l) {
    const auto& line = set.lines[l];
    for (std::size_t k = 0; k < line.points.size(); ++k) {
      os << line.level << ',' << l << ',' << k << ',' << line.points[k].first << ','
         << line.points[k].second << '\n';
    }
  }
  os.precision(old);
}

}  // namespace kinplume::contour
