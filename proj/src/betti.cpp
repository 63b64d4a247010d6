#include "phseg/betti.hpp"

#include <stdexcept>

namespace phseg {
namespace {

constexpr std::uint32_t kInactive = 0xffffffffu;

// Union-find over pixel indices with explicit activation, so component
// counts track exactly the set of inserted pixels.
class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n, kInactive), size_(n, 0) {}

  bool active(std::uint32_t i) const { return parent_[i] != kInactive; }

  void activate(std::uint32_t i) {
    parent_[i] = i;
    size_[i] = 1;
    ++count_;
  }

  std::uint32_t find(std::uint32_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];  // path halving
      i = parent_[i];
    }
    return i;
  }

  // Returns {kept_root, absorbed_root} when two components merge.
  struct Merge {
    std::uint32_t root, absorbed;
    bool merged;
  };
  Merge unite(std::uint32_t a, std::uint32_t b) {
    std::uint32_t ra = find(a), rb = find(b);
    if (ra == rb) return {ra, ra, false};
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    --count_;
    return {ra, rb, true};
  }

  std::int32_t count() const { return count_; }

private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::int32_t count_ = 0;
};

struct Shape {
  Eigen::Index w, h;
  bool on_border(std::uint32_t i) const {
    const Eigen::Index x = i % w, y = i / w;
    return x == 0 || y == 0 || x == w - 1 || y == h - 1;
  }
};

// Calls fn(neighbor) for each in-bounds neighbor of pixel i.
template <bool EightConn, typename Fn>
inline void for_neighbors(const Shape& s, std::uint32_t i, Fn&& fn) {
  const Eigen::Index x = i % s.w, y = i / s.w;
  const bool l = x > 0, r = x < s.w - 1, u = y > 0, d = y < s.h - 1;
  if (l) fn(i - 1);
  if (r) fn(i + 1);
  if (u) fn(i - s.w);
  if (d) fn(i + s.w);
  if constexpr (EightConn) {
    if (l && u) fn(i - s.w - 1);
    if (r && u) fn(i - s.w + 1);
    if (l && d) fn(i + s.w - 1);
    if (r && d) fn(i + s.w + 1);
  }
}

}  // namespace

PixelOrder order_pixels(const GrayImage& img) {
  if (img.size() == 0) throw std::invalid_argument("order_pixels: empty image");
  PixelOrder order;
  order.width = img.cols();
  order.height = img.rows();
  const std::uint32_t n = static_cast<std::uint32_t>(img.size());
  const std::uint8_t* data = img.data();

  std::array<std::uint32_t, 257> counts{};
  for (std::uint32_t i = 0; i < n; ++i) ++counts[data[i] + 1];
  for (int v = 0; v < 256; ++v) counts[v + 1] += counts[v];
  order.level_start = counts;

  order.pixels.resize(n);
  std::array<std::uint32_t, 256> cursor{};
  for (int v = 0; v < 256; ++v) cursor[v] = counts[v];
  for (std::uint32_t i = 0; i < n; ++i) order.pixels[cursor[data[i]]++] = i;
  return order;
}

LevelCounts sweep_levels(const PixelOrder& order) {
  const Shape shape{order.width, order.height};
  const std::size_t n = order.pixels.size();
  LevelCounts out;

  // Ascending pass: 8-connected components of the growing sublevel sets.
  {
    UnionFind uf(n);
    for (int v = 0; v < 256; ++v) {
      for (std::uint32_t k = order.level_start[v]; k < order.level_start[v + 1]; ++k) {
        const std::uint32_t p = order.pixels[k];
        uf.activate(p);
        for_neighbors<true>(shape, p, [&](std::uint32_t q) {
          if (uf.active(q)) uf.unite(p, q);
        });
      }
      out.fg_leq[v] = uf.count();
    }
  }

  // Descending pass: 4-connected components of the strict superlevel sets,
  // i.e. the complements of the sublevel sets, with border bookkeeping.
  {
    UnionFind uf(n);
    std::vector<std::uint8_t> touches_border(n, 0);
    std::int32_t border_components = 0;
    out.comp_geq[256] = 0;
    out.comp_geq_border[256] = 0;
    for (int v = 255; v >= 0; --v) {
      for (std::uint32_t k = order.level_start[v]; k < order.level_start[v + 1]; ++k) {
        const std::uint32_t p = order.pixels[k];
        uf.activate(p);
        if (shape.on_border(p)) {
          touches_border[p] = 1;
          ++border_components;
        }
        for_neighbors<false>(shape, p, [&](std::uint32_t q) {
          if (!uf.active(q)) return;
          const auto m = uf.unite(p, q);
          if (m.merged) {
            if (touches_border[m.root] && touches_border[m.absorbed]) --border_components;
            touches_border[m.root] =
                static_cast<std::uint8_t>(touches_border[m.root] | touches_border[m.absorbed]);
          }
        });
      }
      out.comp_geq[v] = uf.count();
      out.comp_geq_border[v] = border_components;
    }
  }
  return out;
}

BettiCurves betti_curves(const PixelOrder& order, const Filtration& filtration,
                         ComplementMode mode) {
  const LevelCounts lc = sweep_levels(order);
  const auto& ts = filtration.thresholds();
  BettiCurves curves{Eigen::ArrayXi(ts.size()), Eigen::ArrayXi(ts.size())};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const int t = ts[i];
    curves.beta0[static_cast<Eigen::Index>(i)] = t <= 0 ? 0 : lc.fg_leq[std::min(t, 256) - 1];
    const std::int32_t comp = lc.comp_geq[std::min(t, 256)];
    curves.beta1[static_cast<Eigen::Index>(i)] =
        mode == ComplementMode::literal ? comp : comp - lc.comp_geq_border[std::min(t, 256)];
  }
  return curves;
}

BettiCurves betti_curves(const GrayImage& img, const Filtration& filtration,
                         ComplementMode mode) {
  return betti_curves(order_pixels(img), filtration, mode);
}

long betti0(const Mask& mask) {
  if (mask.size() == 0) return 0;
  const Shape shape{mask.cols(), mask.rows()};
  const std::uint32_t n = static_cast<std::uint32_t>(mask.size());
  const bool* m = mask.data();
  UnionFind uf(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!m[i]) continue;
    uf.activate(i);
    for_neighbors<true>(shape, i, [&](std::uint32_t q) {
      if (q < i && m[q]) uf.unite(i, q);
    });
  }
  return uf.count();
}

long betti1(const Mask& mask, ComplementMode mode) {
  if (mask.size() == 0) return 0;
  const Shape shape{mask.cols(), mask.rows()};
  const std::uint32_t n = static_cast<std::uint32_t>(mask.size());
  const bool* m = mask.data();
  UnionFind uf(n);
  std::vector<std::uint8_t> touches_border(n, 0);
  std::int32_t border_components = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (m[i]) continue;
    uf.activate(i);
    if (shape.on_border(i)) {
      touches_border[i] = 1;
      ++border_components;
    }
    for_neighbors<false>(shape, i, [&](std::uint32_t q) {
      if (q >= i || m[q]) return;
      const auto merge = uf.unite(i, q);
      if (merge.merged) {
        if (touches_border[merge.root] && touches_border[merge.absorbed]) --border_components;
        touches_border[merge.root] =
            static_cast<std::uint8_t>(touches_border[merge.root] | touches_border[merge.absorbed]);
      }
    });
  }
  return mode == ComplementMode::literal ? uf.count() : uf.count() - border_components;
}

}  // namespace phseg
