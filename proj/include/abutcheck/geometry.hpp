#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace abutcheck {

/// Database units; 1000 per micron unless the tech file says otherwise.
using Coord = std::int64_t;

struct Point {
  Coord x = 0;
  Coord y = 0;
  auto operator<=>(const Point&) const = default;
};

/// Closed axis-aligned rectangle. Degenerate (zero-width) rects are allowed
/// and show up as touch lines in short/gap reports.
struct Rect {
  Coord x_lo = 0;
  Coord y_lo = 0;
  Coord x_hi = 0;
  Coord y_hi = 0;

  Coord width() const { return x_hi - x_lo; }
  Coord height() const { return y_hi - y_lo; }
  Coord min_dimension() const { return std::min(width(), height()); }
  bool valid() const { return x_lo <= x_hi && y_lo <= y_hi; }
  Point center() const { return {(x_lo + x_hi) / 2, (y_lo + y_hi) / 2}; }

  auto operator<=>(const Rect&) const = default;
};

inline Rect make_rect(Coord x1, Coord y1, Coord x2, Coord y2) {
  return {std::min(x1, x2), std::min(y1, y2), std::max(x1, x2), std::max(y1, y2)};
}

/// Rect of the given size centred on c.
inline Rect centered_rect(Point c, Coord w, Coord h) {
  return {c.x - w / 2, c.y - h / 2, c.x - w / 2 + w, c.y - h / 2 + h};
}

/// Closed-interval intersection: sharing an edge or a corner counts.
inline bool touches(const Rect& a, const Rect& b) {
  return a.x_lo <= b.x_hi && b.x_lo <= a.x_hi && a.y_lo <= b.y_hi && b.y_lo <= a.y_hi;
}

/// Positive-area overlap.
inline bool overlaps_interior(const Rect& a, const Rect& b) {
  return a.x_lo < b.x_hi && b.x_lo < a.x_hi && a.y_lo < b.y_hi && b.y_lo < a.y_hi;
}

inline bool contains(const Rect& outer, const Rect& inner) {
  return outer.x_lo <= inner.x_lo && outer.y_lo <= inner.y_lo && inner.x_hi <= outer.x_hi &&
         inner.y_hi <= outer.y_hi;
}

inline Rect bbox_union(const Rect& a, const Rect& b) {
  return {std::min(a.x_lo, b.x_lo), std::min(a.y_lo, b.y_lo), std::max(a.x_hi, b.x_hi),
          std::max(a.y_hi, b.y_hi)};
}

inline Rect expanded(const Rect& r, Coord d) {
  return {r.x_lo - d, r.y_lo - d, r.x_hi + d, r.y_hi + d};
}

inline Coord gap_x(const Rect& a, const Rect& b) {
  return std::max<Coord>({0, a.x_lo - b.x_hi, b.x_lo - a.x_hi});
}

inline Coord gap_y(const Rect& a, const Rect& b) {
  return std::max<Coord>({0, a.y_lo - b.y_hi, b.y_lo - a.y_hi});
}

/// Squared Euclidean edge-to-edge distance; corner-to-corner distances count.
inline Coord distance_sq(const Rect& a, const Rect& b) {
  const Coord dx = gap_x(a, b);
  const Coord dy = gap_y(a, b);
  return dx * dx + dy * dy;
}

/// Region between two rectangles. Overlapping spans collapse to their
/// intersection, separated spans to the gap between them, so for touching
/// rects this is their intersection.
inline Rect gap_box(const Rect& a, const Rect& b) {
  auto span = [](Coord alo, Coord ahi, Coord blo, Coord bhi) {
    const Coord lo = std::max(alo, blo);
    const Coord hi = std::min(ahi, bhi);
    return lo <= hi ? std::pair{lo, hi} : std::pair{hi, lo};
  };
  const auto [xl, xh] = span(a.x_lo, a.x_hi, b.x_lo, b.x_hi);
  const auto [yl, yh] = span(a.y_lo, a.y_hi, b.y_lo, b.y_hi);
  return {xl, yl, xh, yh};
}

/// Clamps r into die; a rect fully outside collapses onto the nearest edge.
inline Rect clip_to(const Rect& r, const Rect& die) {
  auto clamp = [](Coord v, Coord lo, Coord hi) { return std::clamp(v, lo, hi); };
  return {clamp(r.x_lo, die.x_lo, die.x_hi), clamp(r.y_lo, die.y_lo, die.y_hi),
          clamp(r.x_hi, die.x_lo, die.x_hi), clamp(r.y_hi, die.y_lo, die.y_hi)};
}

/// Uniform-grid bucket index over rectangles. Queries return the ids of
/// every stored rect that touches the query window, ascending and unique.
class RectIndex {
 public:
  explicit RectIndex(Coord bucket = 256) : bucket_(std::max<Coord>(bucket, 1)) {}

  void insert(int id, const Rect& r) {
    if (static_cast<std::size_t>(id) >= rects_.size()) rects_.resize(id + 1);
    rects_[id] = r;
    for_each_bucket(r, [&](std::int64_t key) { buckets_[key].push_back(id); });
  }

  std::vector<int> query(const Rect& window) const {
    std::vector<int> out;
    for_each_bucket(window, [&](std::int64_t key) {
      auto it = buckets_.find(key);
      if (it == buckets_.end()) return;
      for (int id : it->second) {
        if (touches(rects_[id], window)) out.push_back(id);
      }
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  Coord floor_div(Coord v) const { return v >= 0 ? v / bucket_ : -((-v + bucket_ - 1) / bucket_); }

  template <class F>
  void for_each_bucket(const Rect& r, F&& f) const {
    for (Coord bx = floor_div(r.x_lo); bx <= floor_div(r.x_hi); ++bx) {
      for (Coord by = floor_div(r.y_lo); by <= floor_div(r.y_hi); ++by) {
        f((bx << 32) ^ (by & 0xffffffff));
      }
    }
  }

  Coord bucket_;
  std::vector<Rect> rects_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

}  // namespace abutcheck
