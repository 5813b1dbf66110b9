#include "ttl/polyline_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "ttl/error.hpp"
#include "ttl/geometry.hpp"

namespace ttl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxCells = std::size_t{1} << 22;

int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

int pos_mod(std::int64_t v, int g) {
  auto r = static_cast<int>(v % g);
  return r < 0 ? r + g : r;
}

// Calls f(lo, hi) with the bounding box of each piece of the segment a + s d,
// pieces no longer than piece_len.
template <class F>
void for_each_piece(const double* a, const double* d, int m, double piece_len, F&& f) {
  double len = 0.0;
  for (int i = 0; i < m; ++i) len += d[i] * d[i];
  len = std::sqrt(len);
  int pieces = std::max(1, static_cast<int>(std::ceil(len / piece_len)));
  double lo[kMaxDim], hi[kMaxDim];
  for (int p = 0; p < pieces; ++p) {
    double s0 = static_cast<double>(p) / pieces, s1 = static_cast<double>(p + 1) / pieces;
    for (int i = 0; i < m; ++i) {
      double u = a[i] + s0 * d[i], v = a[i] + s1 * d[i];
      lo[i] = std::min(u, v);
      hi[i] = std::max(u, v);
    }
    f(lo, hi);
  }
}

// Iterates the integer box [lo, hi] (inclusive) in m dimensions.
template <class F>
void for_each_in_box(const std::int64_t* lo, const std::int64_t* hi, int m, F&& f) {
  std::int64_t idx[kMaxDim];
  std::copy(lo, lo + m, idx);
  for (;;) {
    f(idx);
    int i = 0;
    while (i < m && idx[i] == hi[i]) {
      idx[i] = lo[i];
      ++i;
    }
    if (i == m) return;
    ++idx[i];
  }
}

void segment_arrays(const SampledPath& path, bool wrap_start, std::vector<double>& a,
                    std::vector<double>& d) {
  int m = path.m;
  std::size_t n = path.segments();
  a.resize(n * m);
  d.resize(n * m);
  for (std::size_t s = 0; s < n; ++s) {
    const double* p = path.point(s);
    const double* q = path.size() > 1 ? path.point(s + 1) : p;
    for (int i = 0; i < m; ++i) {
      a[s * m + i] = wrap_start ? p[i] - std::floor(p[i]) : p[i];
      d[s * m + i] = q[i] - p[i];
    }
  }
}

// Periodic 1D Chebyshev transform along one axis: out(x) = min_y max(|x-y|, in(y)).
void chebyshev_pass(std::vector<std::uint16_t>& f, int g, int m, int axis) {
  std::size_t stride = 1;
  for (int i = 0; i < axis; ++i) stride *= g;
  std::size_t total = f.size();
  std::vector<std::uint16_t> line(g), out(g);
  for (std::size_t base = 0; base < total; ++base) {
    if ((base / stride) % g != 0) continue;
    for (int k = 0; k < g; ++k) line[k] = f[base + k * stride];
    for (int x = 0; x < g; ++x) {
      int best = line[x];
      for (int k = 1; k < best && k <= g / 2; ++k) {
        int l = line[pos_mod(x - k, g)], r = line[pos_mod(x + k, g)];
        best = std::min(best, std::max(k, std::min(l, r)));
      }
      out[x] = static_cast<std::uint16_t>(best);
    }
    for (int k = 0; k < g; ++k) f[base + k * stride] = out[k];
  }
  (void)m;
}

}  // namespace

TorusIndex::TorusIndex(const SampledPath& path, double cell_hint) : m_(path.m) {
  check_dimension(m_);
  require(path.size() > 0, "TorusIndex: empty path");
  n_seg_ = path.segments();
  segment_arrays(path, true, a_, d_);

  int g_max = 1;
  while (static_cast<std::size_t>(ipow(g_max + 1, m_)) <= kMaxCells && g_max < 1024) ++g_max;
  if (cell_hint > 0.0) {
    g_ = std::clamp(static_cast<int>(std::floor(1.0 / cell_hint)), 1, g_max);
  } else {
    double total = 0.0;
    for (std::size_t s = 0; s < n_seg_; ++s) {
      double l2 = 0.0;
      for (int i = 0; i < m_; ++i) l2 += d_[s * m_ + i] * d_[s * m_ + i];
      total += std::sqrt(l2);
    }
    // aim for about eight registered pieces per cell
    g_ = 1;
    while (g_ < g_max && 1.5 * (total * g_ + static_cast<double>(n_seg_)) /
                                 std::pow(static_cast<double>(g_), m_) > 8.0)
      ++g_;
  }

  std::size_t n_cells = static_cast<std::size_t>(ipow(g_, m_));
  std::vector<std::uint32_t> cell_count(n_cells + 1, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;
  entries.reserve(n_seg_ * 4);
  std::vector<std::uint32_t> local;
  double piece = 0.5 / g_;
  for (std::size_t s = 0; s < n_seg_; ++s) {
    local.clear();
    for_each_piece(&a_[s * m_], &d_[s * m_], m_, piece, [&](const double* lo, const double* hi) {
      std::int64_t ilo[kMaxDim], ihi[kMaxDim];
      for (int i = 0; i < m_; ++i) {
        ilo[i] = static_cast<std::int64_t>(std::floor(lo[i] * g_));
        ihi[i] = static_cast<std::int64_t>(std::floor(hi[i] * g_));
        if (ihi[i] - ilo[i] >= g_) ihi[i] = ilo[i] + g_ - 1;
      }
      for_each_in_box(ilo, ihi, m_, [&](const std::int64_t* idx) {
        std::size_t c = 0;
        for (int i = m_ - 1; i >= 0; --i) c = c * g_ + pos_mod(idx[i], g_);
        local.push_back(static_cast<std::uint32_t>(c));
      });
    });
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    for (auto c : local) {
      entries.emplace_back(c, static_cast<std::uint32_t>(s));
      ++cell_count[c + 1];
    }
  }
  offsets_.assign(n_cells + 1, 0);
  for (std::size_t c = 0; c < n_cells; ++c) offsets_[c + 1] = offsets_[c] + cell_count[c + 1];
  items_.resize(entries.size());
  std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [c, s] : entries) items_[fill[c]++] = s;

  std::uint16_t far = static_cast<std::uint16_t>(std::min(g_, 65535));
  empty_.assign(n_cells, far);
  for (std::size_t c = 0; c < n_cells; ++c)
    if (offsets_[c + 1] > offsets_[c]) empty_[c] = 0;
  for (int axis = 0; axis < m_; ++axis) chebyshev_pass(empty_, g_, m_, axis);
}

std::size_t TorusIndex::cell_of(const double* x, int* idx) const {
  std::size_t c = 0;
  for (int i = m_ - 1; i >= 0; --i) {
    idx[i] = pos_mod(static_cast<std::int64_t>(std::floor(x[i] * g_)), g_);
    c = c * g_ + idx[i];
  }
  return c;
}

double TorusIndex::seg_dist_sq(const double* x, std::uint32_t s) const {
  const double* a = &a_[static_cast<std::size_t>(s) * m_];
  const double* d = &d_[static_cast<std::size_t>(s) * m_];
  double xi[kMaxDim];
  for (int i = 0; i < m_; ++i) xi[i] = x[i] - std::nearbyint(x[i] - a[i] - 0.5 * d[i]);
  return point_segment_distance_sq(xi, a, d, m_);
}

bool TorusIndex::scan_shell(const double* x, const int* idx, int L, double& best_sq) const {
  if (2 * L + 1 > g_) return false;
  auto visit = [&](std::size_t c) {
    for (std::uint32_t k = offsets_[c]; k < offsets_[c + 1]; ++k)
      best_sq = std::min(best_sq, seg_dist_sq(x, items_[k]));
  };
  if (L == 0) {
    std::size_t c = 0;
    for (int i = m_ - 1; i >= 0; --i) c = c * g_ + idx[i];
    visit(c);
    return true;
  }
  std::int64_t lo[kMaxDim], hi[kMaxDim];
  for (int i = 0; i < m_; ++i) {
    lo[i] = -L;
    hi[i] = L;
  }
  for_each_in_box(lo, hi, m_, [&](const std::int64_t* o) {
    bool on_shell = false;
    for (int i = 0; i < m_; ++i) on_shell |= (o[i] == L || o[i] == -L);
    if (!on_shell) return;
    std::size_t c = 0;
    for (int i = m_ - 1; i >= 0; --i) c = c * g_ + pos_mod(idx[i] + o[i], g_);
    visit(c);
  });
  return true;
}

void TorusIndex::scan_all(const double* x, double& best_sq) const {
  for (std::size_t s = 0; s < n_seg_; ++s)
    best_sq = std::min(best_sq, seg_dist_sq(x, static_cast<std::uint32_t>(s)));
}

double TorusIndex::brute(const double* x) const {
  int n_img = ipow(3, m_);
  double best = kInf;
  double x0[kMaxDim], xi[kMaxDim];
  for (std::size_t s = 0; s < n_seg_; ++s) {
    const double* a = &a_[s * m_];
    const double* d = &d_[s * m_];
    for (int i = 0; i < m_; ++i) x0[i] = x[i] - std::nearbyint(x[i] - a[i]);
    for (int code = 0; code < n_img; ++code) {
      int c = code;
      for (int i = 0; i < m_; ++i) {
        xi[i] = x0[i] + static_cast<double>(c % 3 - 1);
        c /= 3;
      }
      best = std::min(best, point_segment_distance_sq(xi, a, d, m_));
    }
  }
  return std::sqrt(best);
}

double TorusIndex::distance_capped(const double* x, double cap) const {
  int idx[kMaxDim];
  std::size_t c = cell_of(x, idx);
  double best_sq = kInf;
  const double cs = cell_size();
  for (int L = empty_[c];; ++L) {
    if (!scan_shell(x, idx, L, best_sq)) {
      scan_all(x, best_sq);
      break;
    }
    double reach = (L - 1e-9) * cs;
    if (best_sq <= reach * reach || reach >= cap) break;
  }
  double d = std::sqrt(best_sq);
  if (d > kMaxSegment && cap > kMaxSegment) d = brute(x);
  return std::min(d, cap);
}

double TorusIndex::distance(const double* x) const { return distance_capped(x, kInf); }

double TorusIndex::safe_radius(const double* x, double cap) const {
  int idx[kMaxDim];
  std::size_t c = cell_of(x, idx);
  const double cs = cell_size();
  int e = empty_[c];
  if (e >= 2) return std::min({(e - 1) * cs * (1.0 - 1e-9), cap, kMaxSegment});
  double best_sq = kInf;
  int last = std::max(e, 1);
  double reach = 0.0;
  for (int L = e; L <= last; ++L) {
    if (!scan_shell(x, idx, L, best_sq)) {
      scan_all(x, best_sq);
      reach = kInf;
      break;
    }
    reach = (L - 1e-9) * cs;
  }
  return std::min({std::sqrt(best_sq), reach, cap, kMaxSegment});
}

FarthestPoint farthest_point(const TorusIndex& index, double rel_tol) {
  require(rel_tol > 0.0, "farthest_point: tolerance must be positive");
  const int m = index.dim();
  struct Cube {
    double ub;
    double side;
    std::array<double, kMaxDim> c;
    bool operator<(const Cube& o) const { return ub < o.ub; }
  };
  const double diag = std::sqrt(static_cast<double>(m));
  int g0 = 1;
  while (ipow(2 * g0, m) <= 4096) g0 *= 2;

  FarthestPoint best;
  best.location.assign(m, 0.0);
  std::priority_queue<Cube> heap;
  auto consider = [&](const Cube& proto) {
    Cube q = proto;
    double d = index.distance(q.c.data());
    if (d > best.value) {
      best.value = d;
      std::copy(q.c.begin(), q.c.begin() + m, best.location.begin());
    }
    q.ub = d + 0.5 * q.side * diag;
    heap.push(q);
  };

  const int n0 = ipow(g0, m);
  for (int code = 0; code < n0; ++code) {
    Cube q{};
    q.side = 1.0 / g0;
    int c = code;
    for (int i = 0; i < m; ++i) {
      q.c[i] = (c % g0 + 0.5) * q.side;
      c /= g0;
    }
    consider(q);
  }
  while (!heap.empty()) {
    Cube top = heap.top();
    if (top.ub <= best.value * (1.0 + rel_tol)) {
      best.upper = top.ub;
      return best;
    }
    heap.pop();
    for (int bits = 0; bits < (1 << m); ++bits) {
      Cube q{};
      q.side = 0.5 * top.side;
      for (int i = 0; i < m; ++i) q.c[i] = top.c[i] + (((bits >> i) & 1) ? 0.5 : -0.5) * q.side;
      consider(q);
    }
  }
  best.upper = best.value;
  return best;
}

LiftIndex::LiftIndex(const SampledPath& path, double cell_size) : m_(path.m), c_(cell_size) {
  check_dimension(m_);
  require(cell_size > 0.0, "LiftIndex: cell size must be positive");
  require(path.size() > 0, "LiftIndex: empty path");
  n_seg_ = path.segments();
  segment_arrays(path, false, a_, d_);

  std::vector<double> lo(m_, kInf), hi(m_, -kInf);
  for (std::size_t k = 0; k < path.size(); ++k)
    for (int i = 0; i < m_; ++i) {
      lo[i] = std::min(lo[i], path.point(k)[i]);
      hi[i] = std::max(hi[i], path.point(k)[i]);
    }
  center_.resize(m_);
  for (int i = 0; i < m_; ++i) center_[i] = 0.5 * (lo[i] + hi[i]);
  for (std::size_t k = 0; k < path.size(); ++k) {
    double r2 = 0.0;
    for (int i = 0; i < m_; ++i) r2 += std::pow(path.point(k)[i] - center_[i], 2);
    rho_ = std::max(rho_, std::sqrt(r2));
  }

  std::vector<std::pair<std::uint64_t, std::uint32_t>> entries;
  coarse_.assign(kLevels, {});
  std::vector<std::uint64_t> local;
  for (std::size_t s = 0; s < n_seg_; ++s) {
    local.clear();
    for_each_piece(&a_[s * m_], &d_[s * m_], m_, 0.5 * c_, [&](const double* plo, const double* phi) {
      for (int level = 0; level < kLevels; ++level) {
        double cl = c_ * std::pow(4.0, level);
        std::int64_t ilo[kMaxDim], ihi[kMaxDim];
        for (int i = 0; i < m_; ++i) {
          ilo[i] = static_cast<std::int64_t>(std::floor(plo[i] / cl));
          ihi[i] = static_cast<std::int64_t>(std::floor(phi[i] / cl));
        }
        for_each_in_box(ilo, ihi, m_, [&](const std::int64_t* idx) {
          if (level == 0)
            local.push_back(key(idx));
          else
            coarse_[level].push_back(key(idx));
        });
      }
    });
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    for (auto k : local) entries.emplace_back(k, static_cast<std::uint32_t>(s));
  }
  for (auto& v : coarse_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  std::sort(entries.begin(), entries.end());

  std::size_t distinct = 0;
  for (std::size_t k = 0; k < entries.size(); ++k)
    if (k == 0 || entries[k].first != entries[k - 1].first) ++distinct;
  std::size_t slots = 16;
  while (slots < 2 * distinct) slots *= 2;
  mask_ = slots - 1;
  slot_key_.assign(slots, 0);
  slot_begin_.assign(slots, 0);
  slot_count_.assign(slots, 0);
  items_.resize(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t j = k;
    while (j < entries.size() && entries[j].first == entries[k].first) {
      items_[j] = entries[j].second;
      ++j;
    }
    std::uint64_t h = entries[k].first;
    std::size_t slot = h & mask_;
    while (slot_count_[slot] != 0) slot = (slot + 1) & mask_;
    slot_key_[slot] = h;
    slot_begin_[slot] = static_cast<std::uint32_t>(k);
    slot_count_[slot] = static_cast<std::uint32_t>(j - k);
    k = j;
  }
}

std::uint64_t LiftIndex::key(const std::int64_t* idx) const {
  // Key collisions only merge cell contents, which keeps every query conservative.
  std::uint64_t h = 0x8a5cd789635d2dffULL;
  for (int i = 0; i < m_; ++i) h = (h ^ static_cast<std::uint64_t>(idx[i])) * 0x9e3779b97f4a7c15ULL;
  return splitmix64(h);
}

const std::uint32_t* LiftIndex::find(std::uint64_t k, std::uint32_t& count) const {
  std::size_t slot = k & mask_;
  while (slot_count_[slot] != 0) {
    if (slot_key_[slot] == k) {
      count = slot_count_[slot];
      return &items_[slot_begin_[slot]];
    }
    slot = (slot + 1) & mask_;
  }
  count = 0;
  return nullptr;
}

bool LiftIndex::occupied(int level, const std::int64_t* idx) const {
  return std::binary_search(coarse_[level].begin(), coarse_[level].end(), key(idx));
}

double LiftIndex::safe_radius(const double* x) const {
  double r2 = 0.0;
  for (int i = 0; i < m_; ++i) r2 += (x[i] - center_[i]) * (x[i] - center_[i]);
  const double far = std::sqrt(r2) - rho_;
  const int cells = 1 << m_;

  // The 2^m cells around the cell corner nearest x; any path point outside
  // them is at least `wall` away, and wall >= cl / 2.
  std::int64_t lo[kMaxDim], idx[kMaxDim];
  auto block = [&](double cl) {
    double wall = kInf;
    for (int i = 0; i < m_; ++i) {
      double q = x[i] / cl;
      auto c = static_cast<std::int64_t>(std::floor(q));
      double frac = q - static_cast<double>(c);
      lo[i] = frac < 0.5 ? c - 1 : c;
      wall = std::min(wall, std::min(x[i] - static_cast<double>(lo[i]) * cl,
                                     static_cast<double>(lo[i] + 2) * cl - x[i]));
    }
    return wall * (1.0 - 1e-12);
  };
  auto corner = [&](int bits) {
    for (int i = 0; i < m_; ++i) idx[i] = lo[i] + ((bits >> i) & 1);
  };

  double cl = c_;
  int level = 0;
  while (level < kLevels && far >= 0.5 * cl) {
    cl *= 4.0;
    ++level;
  }
  if (level == kLevels) return far;

  if (level == 0) {
    double wall = block(cl);
    double best = kInf;
    for (int b = 0; b < cells; ++b) {
      corner(b);
      std::uint32_t n = 0;
      const std::uint32_t* it = find(key(idx), n);
      for (std::uint32_t k = 0; k < n; ++k) {
        std::size_t s = it[k];
        best = std::min(best, point_segment_distance_sq(x, &a_[s * m_], &d_[s * m_], m_));
      }
    }
    if (best < kInf) return std::max(far, std::min(std::sqrt(best), wall));
    cl *= 4.0;
    level = 1;
    double bound = wall;
    for (; level < kLevels; ++level, cl *= 4.0) {
      double w = block(cl);
      bool hit = false;
      for (int b = 0; b < cells && !hit; ++b) {
        corner(b);
        hit = occupied(level, idx);
      }
      if (hit) break;
      bound = w;
    }
    return std::max(far, bound);
  }

  double bound = far;
  for (; level < kLevels; ++level, cl *= 4.0) {
    double w = block(cl);
    bool hit = false;
    for (int b = 0; b < cells && !hit; ++b) {
      corner(b);
      hit = occupied(level, idx);
    }
    if (hit) break;
    bound = std::max(bound, w);
  }
  return bound;
}

double LiftIndex::distance(const double* x) const {
  double best = kInf;
  for (std::size_t s = 0; s < n_seg_; ++s)
    best = std::min(best, point_segment_distance_sq(x, &a_[s * m_], &d_[s * m_], m_));
  return std::sqrt(best);
}

}  // namespace ttl
