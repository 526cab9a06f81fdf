#ifndef BALLEAN_SPACE_HPP
#define BALLEAN_SPACE_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ballean/rational.hpp"

namespace ballean {

// Points are opaque 64-bit codes. Each space kind owns its encoding:
// grid lattices pack coordinate tuples, graphs and distance tables use node
// indices, groups pack canonical words. Only the owning space interprets a
// code; everything downstream moves codes around and asks the space.
using PointId = std::int64_t;

using PointFn = std::function<void(PointId)>;

enum class SpaceKind { Grid, Graph, FiniteTable, Group };

// A space descriptor: an at-most-countable carrier together with ball
// oracles B(x,r) and B*(x,r) = {y : x in B(y,r)}. Immutable after
// construction; all oracles are pure.
class Space {
 public:
  virtual ~Space() = default;

  virtual SpaceKind kind() const = 0;
  virtual std::string name() const = 0;

  virtual bool in_carrier(PointId x) const = 0;
  virtual std::string point_name(PointId x) const = 0;
  virtual std::optional<PointId> parse_point(const std::string& text) const = 0;

  // Canonical total order on points; every deterministic tie-break in the
  // toolkit reduces to this.
  virtual bool point_less(PointId a, PointId b) const = 0;

  // Least scale alpha on this space's scale grid with y in ball(x, alpha);
  // nullopt when no scale reaches (disconnected graphs, capped group search).
  virtual std::optional<Rational> min_scale(PointId x, PointId y) const = 0;

  // Streams the closed ball B(x,r) in canonical order.
  virtual void for_each_in_ball(PointId x, const Rational& r, const PointFn& fn) const = 0;

  // Streams B*(x,r). Coincides with the ball for metric kinds.
  virtual void for_each_in_star(PointId x, const Rational& r, const PointFn& fn) const {
    for_each_in_ball(x, r, fn);
  }

  // Membership shortcuts; kinds override with O(1)/O(len) paths.
  virtual bool in_ball(PointId center, const Rational& r, PointId y) const {
    auto d = min_scale(center, y);
    return d.has_value() && *d <= r;
  }
  bool in_star(PointId center, const Rational& r, PointId y) const { return in_ball(y, r, center); }

  virtual std::uint64_t ball_size(PointId x, const Rational& r) const {
    std::uint64_t n = 0;
    for_each_in_ball(x, r, [&](PointId) { ++n; });
    return n;
  }

  std::vector<PointId> ball_list(PointId x, const Rational& r) const {
    std::vector<PointId> out;
    for_each_in_ball(x, r, [&](PointId y) { out.push_back(y); });
    return out;
  }
  std::vector<PointId> star_list(PointId x, const Rational& r) const {
    std::vector<PointId> out;
    for_each_in_star(x, r, [&](PointId y) { out.push_back(y); });
    return out;
  }

  // Ascending distinct scales of the space up to and including cap, always
  // starting at 0. Grids use step multiples, graphs and groups use integers,
  // distance tables use the observed distance values.
  virtual std::vector<Rational> scale_grid(const Rational& cap) const = 0;

  // Largest scale on the grid that is <= q (q >= 0).
  virtual Rational scale_floor(const Rational& q) const = 0;

  // True when balls of every fixed radius have uniformly bounded size over
  // the whole (possibly infinite) carrier.
  virtual bool uniformly_locally_finite() const { return true; }
};

// ---------------------------------------------------------------------------
// GridSpace: the lattice (step * Z)^dim under the sup metric. dim 1 covers
// both the integers (step 1) and the rational grids step 1/D that stand in
// for dense subspaces of Q; refining D is the finitary substitute for
// density.
// ---------------------------------------------------------------------------
class GridSpace final : public Space {
 public:
  GridSpace(int dim, Rational step) : dim_(dim), step_(std::move(step)) {
    if (dim_ < 1 || dim_ > 3) throw std::invalid_argument("grid dim must be 1, 2 or 3");
    if (step_ <= Rational(0)) throw std::invalid_argument("grid step must be positive");
  }

  SpaceKind kind() const override { return SpaceKind::Grid; }
  int dim() const { return dim_; }
  const Rational& step() const { return step_; }

  std::string name() const override {
    return "grid(dim=" + std::to_string(dim_) + ",step=" + to_string(step_) + ")";
  }

  // Lattice coordinates <-> point codes. dim 1 stores the coordinate
  // directly; higher dims pack biased coordinates most-significant-first so
  // that code order equals lexicographic coordinate order.
  static constexpr std::int64_t kBias2 = std::int64_t(1) << 30;   // dim 2: 31 bits/coord
  static constexpr std::int64_t kBias3 = std::int64_t(1) << 19;   // dim 3: 20 bits/coord

  PointId encode(const std::vector<std::int64_t>& c) const {
    if (static_cast<int>(c.size()) != dim_) throw std::domain_error("coordinate arity mismatch");
    if (dim_ == 1) return c[0];
    if (dim_ == 2) {
      for (auto v : c)
        if (v <= -kBias2 || v >= kBias2) throw std::domain_error("grid coordinate out of range");
      return ((c[0] + kBias2) << 31) | (c[1] + kBias2);
    }
    for (auto v : c)
      if (v <= -kBias3 || v >= kBias3) throw std::domain_error("grid coordinate out of range");
    return ((c[0] + kBias3) << 40) | ((c[1] + kBias3) << 20) | (c[2] + kBias3);
  }

  std::vector<std::int64_t> decode(PointId p) const {
    if (dim_ == 1) return {p};
    if (dim_ == 2) return {(p >> 31) - kBias2, (p & ((std::int64_t(1) << 31) - 1)) - kBias2};
    const std::int64_t mask = (std::int64_t(1) << 20) - 1;
    return {(p >> 40) - kBias3, ((p >> 20) & mask) - kBias3, (p & mask) - kBias3};
  }

  bool in_carrier(PointId p) const override {
    if (dim_ == 1) return true;
    if (dim_ == 2) return p >= 0 && p < (std::int64_t(1) << 62);
    return p >= 0 && p < (std::int64_t(1) << 60);
  }

  // Exact value of a lattice point: coordinate * step.
  Rational value_of(PointId p) const {
    if (dim_ != 1) throw std::domain_error("value_of needs dim 1");
    return Rational(p) * step_;
  }
  std::vector<Rational> values_of(PointId p) const {
    std::vector<Rational> out;
    for (auto c : decode(p)) out.push_back(Rational(c) * step_);
    return out;
  }
  // Lattice point with the given exact value, if the value sits on the grid.
  std::optional<PointId> id_of_value(const Rational& v) const {
    if (dim_ != 1) return std::nullopt;
    Rational q = v / step_;
    if (q.denominator() != 1) return std::nullopt;
    return q.numerator();
  }

  std::string point_name(PointId p) const override {
    auto vals = values_of(p);
    if (dim_ == 1) return to_string(vals[0]);
    std::string s = "(";
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (i) s += ",";
      s += to_string(vals[i]);
    }
    return s + ")";
  }

  std::optional<PointId> parse_point(const std::string& text) const override {
    std::vector<Rational> vals;
    if (!text.empty() && text.front() == '(') {
      if (text.back() != ')') return std::nullopt;
      std::string body = text.substr(1, text.size() - 2);
      std::size_t start = 0;
      while (start <= body.size()) {
        std::size_t comma = body.find(',', start);
        std::string part = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto q = parse_rational(part);
        if (!q) return std::nullopt;
        vals.push_back(*q);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    } else {
      auto q = parse_rational(text);
      if (!q) return std::nullopt;
      vals.push_back(*q);
    }
    if (static_cast<int>(vals.size()) != dim_) return std::nullopt;
    std::vector<std::int64_t> coords;
    for (const auto& v : vals) {
      Rational q = v / step_;
      if (q.denominator() != 1) return std::nullopt;  // off-lattice
      coords.push_back(q.numerator());
    }
    try {
      return encode(coords);
    } catch (const std::domain_error&) {
      return std::nullopt;
    }
  }

  bool point_less(PointId a, PointId b) const override { return a < b; }

  std::optional<Rational> min_scale(PointId x, PointId y) const override {
    auto a = decode(x), b = decode(y);
    std::int64_t m = 0;
    for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return Rational(m) * step_;
  }

  // Lattice steps covered by scale r.
  std::int64_t steps_within(const Rational& r) const {
    if (r < Rational(0)) return -1;
    return rational_floor(r / step_);
  }

  void for_each_in_ball(PointId x, const Rational& r, const PointFn& fn) const override {
    std::int64_t k = steps_within(r);
    if (k < 0) return;
    auto c = decode(x);
    if (dim_ == 1) {
      for (std::int64_t i = c[0] - k; i <= c[0] + k; ++i) fn(i);
      return;
    }
    if (dim_ == 2) {
      std::vector<std::int64_t> p(2);
      for (p[0] = c[0] - k; p[0] <= c[0] + k; ++p[0])
        for (p[1] = c[1] - k; p[1] <= c[1] + k; ++p[1]) fn(encode(p));
      return;
    }
    std::vector<std::int64_t> p(3);
    for (p[0] = c[0] - k; p[0] <= c[0] + k; ++p[0])
      for (p[1] = c[1] - k; p[1] <= c[1] + k; ++p[1])
        for (p[2] = c[2] - k; p[2] <= c[2] + k; ++p[2]) fn(encode(p));
  }

  bool in_ball(PointId center, const Rational& r, PointId y) const override {
    std::int64_t k = steps_within(r);
    if (k < 0) return false;
    auto a = decode(center), b = decode(y);
    for (int i = 0; i < dim_; ++i)
      if (std::abs(a[i] - b[i]) > k) return false;
    return true;
  }

  std::uint64_t ball_size(PointId, const Rational& r) const override {
    std::int64_t k = steps_within(r);
    if (k < 0) return 0;
    std::uint64_t side = static_cast<std::uint64_t>(2 * k + 1);
    std::uint64_t n = 1;
    for (int i = 0; i < dim_; ++i) n *= side;
    return n;
  }

  std::vector<Rational> scale_grid(const Rational& cap) const override {
    std::int64_t k = steps_within(cap);
    if (k < 0) return {};
    if (k > (1 << 20)) throw std::invalid_argument("scale grid too large for cap " + to_string(cap));
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(k) + 1);
    for (std::int64_t i = 0; i <= k; ++i) out.push_back(Rational(i) * step_);
    return out;
  }

  Rational scale_floor(const Rational& q) const override {
    std::int64_t k = steps_within(q);
    return k < 0 ? Rational(0) : Rational(k) * step_;
  }

 private:
  int dim_;
  Rational step_;
};

// ---------------------------------------------------------------------------
// GraphSpace: a finite undirected graph under the path metric. Node indices
// are the points; disconnected pairs have no connecting scale.
// ---------------------------------------------------------------------------
class GraphSpace final : public Space {
 public:
  explicit GraphSpace(std::vector<std::vector<std::int32_t>> adjacency)
      : adj_(std::move(adjacency)) {
    for (std::size_t u = 0; u < adj_.size(); ++u) {
      for (auto v : adj_[u]) {
        if (v < 0 || static_cast<std::size_t>(v) >= adj_.size())
          throw std::invalid_argument("adjacency index out of range");
      }
      std::sort(adj_[u].begin(), adj_[u].end());
      adj_[u].erase(std::unique(adj_[u].begin(), adj_[u].end()), adj_[u].end());
    }
  }

  static GraphSpace from_edges(std::size_t n, const std::vector<std::pair<std::int32_t, std::int32_t>>& edges) {
    std::vector<std::vector<std::int32_t>> adj(n);
    for (auto [a, b] : edges) {
      if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
        throw std::invalid_argument("edge endpoint out of range");
      if (a == b) continue;
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    return GraphSpace(std::move(adj));
  }

  SpaceKind kind() const override { return SpaceKind::Graph; }
  std::size_t node_count() const { return adj_.size(); }
  const std::vector<std::vector<std::int32_t>>& adjacency() const { return adj_; }

  std::string name() const override { return "graph(n=" + std::to_string(adj_.size()) + ")"; }

  bool in_carrier(PointId x) const override {
    return x >= 0 && static_cast<std::size_t>(x) < adj_.size();
  }
  std::string point_name(PointId x) const override { return std::to_string(x); }

  std::optional<PointId> parse_point(const std::string& text) const override {
    auto q = parse_rational(text);
    if (!q || q->denominator() != 1) return std::nullopt;
    if (!in_carrier(q->numerator())) return std::nullopt;
    return q->numerator();
  }

  bool point_less(PointId a, PointId b) const override { return a < b; }

  std::optional<Rational> min_scale(PointId x, PointId y) const override {
    if (!in_carrier(x) || !in_carrier(y)) throw std::domain_error("node not in graph");
    const auto& dist = distances_from(x);
    if (dist[static_cast<std::size_t>(y)] < 0) return std::nullopt;
    return Rational(dist[static_cast<std::size_t>(y)]);
  }

  void for_each_in_ball(PointId x, const Rational& r, const PointFn& fn) const override {
    if (!in_carrier(x)) throw std::domain_error("node not in graph");
    std::int64_t k = rational_floor(r);
    if (k < 0) return;
    const auto& dist = distances_from(x);
    for (std::size_t v = 0; v < dist.size(); ++v)
      if (dist[v] >= 0 && dist[v] <= k) fn(static_cast<PointId>(v));
  }

  bool in_ball(PointId center, const Rational& r, PointId y) const override {
    const auto& dist = distances_from(center);
    std::int64_t k = rational_floor(r);
    auto d = dist[static_cast<std::size_t>(y)];
    return d >= 0 && d <= k;
  }

  std::vector<Rational> scale_grid(const Rational& cap) const override {
    std::vector<Rational> out;
    for (std::int64_t i = 0; i <= rational_floor(cap); ++i) out.push_back(Rational(i));
    return out;
  }

  Rational scale_floor(const Rational& q) const override {
    std::int64_t k = rational_floor(q);
    return Rational(k < 0 ? 0 : k);
  }

 private:
  const std::vector<std::int32_t>& distances_from(PointId source) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = dist_cache_.find(source);
    if (it != dist_cache_.end()) return it->second;
    std::vector<std::int32_t> dist(adj_.size(), -1);
    std::deque<std::int32_t> queue;
    dist[static_cast<std::size_t>(source)] = 0;
    queue.push_back(static_cast<std::int32_t>(source));
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      for (auto v : adj_[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    return dist_cache_.emplace(source, std::move(dist)).first->second;
  }

  std::vector<std::vector<std::int32_t>> adj_;
  mutable std::map<PointId, std::vector<std::int32_t>> dist_cache_;
  mutable std::mutex cache_mutex_;
};

// ---------------------------------------------------------------------------
// FiniteTableSpace: a finite metric space given by an exact rational
// distance table. The natural scale set is the set of observed distances.
// ---------------------------------------------------------------------------
class FiniteTableSpace final : public Space {
 public:
  explicit FiniteTableSpace(std::vector<std::vector<Rational>> table) : d_(std::move(table)) {
    const std::size_t n = d_.size();
    for (const auto& row : d_)
      if (row.size() != n) throw std::invalid_argument("distance table must be square");
    for (std::size_t i = 0; i < n; ++i) {
      if (d_[i][i] != Rational(0)) throw std::invalid_argument("distance table diagonal must be 0");
      for (std::size_t j = 0; j < n; ++j) {
        if (d_[i][j] < Rational(0)) throw std::invalid_argument("negative distance");
        if (d_[i][j] != d_[j][i]) throw std::invalid_argument("distance table must be symmetric");
        if (i != j && d_[i][j] == Rational(0)) throw std::invalid_argument("distinct points at distance 0");
      }
    }
  }

  // Builds from the strict lower triangle, row by row: d(1,0), d(2,0), d(2,1), ...
  static FiniteTableSpace from_lower_triangle(std::size_t n, const std::vector<Rational>& tri) {
    if (tri.size() != n * (n - 1) / 2) throw std::invalid_argument("triangle size mismatch");
    std::vector<std::vector<Rational>> t(n, std::vector<Rational>(n, Rational(0)));
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j) {
        t[i][j] = t[j][i] = tri[k++];
      }
    return FiniteTableSpace(std::move(t));
  }

  bool satisfies_triangle_inequality() const {
    const std::size_t n = d_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (d_[i][j] > d_[i][k] + d_[k][j]) return false;
    return true;
  }

  SpaceKind kind() const override { return SpaceKind::FiniteTable; }
  std::size_t size() const { return d_.size(); }
  const Rational& distance(PointId a, PointId b) const {
    return d_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  }

  std::string name() const override { return "table(n=" + std::to_string(d_.size()) + ")"; }

  bool in_carrier(PointId x) const override {
    return x >= 0 && static_cast<std::size_t>(x) < d_.size();
  }
  std::string point_name(PointId x) const override { return std::to_string(x); }

  std::optional<PointId> parse_point(const std::string& text) const override {
    auto q = parse_rational(text);
    if (!q || q->denominator() != 1) return std::nullopt;
    if (!in_carrier(q->numerator())) return std::nullopt;
    return q->numerator();
  }

  bool point_less(PointId a, PointId b) const override { return a < b; }

  std::optional<Rational> min_scale(PointId x, PointId y) const override {
    if (!in_carrier(x) || !in_carrier(y)) throw std::domain_error("point not in table");
    return distance(x, y);
  }

  void for_each_in_ball(PointId x, const Rational& r, const PointFn& fn) const override {
    if (!in_carrier(x)) throw std::domain_error("point not in table");
    if (r < Rational(0)) return;
    const auto& row = d_[static_cast<std::size_t>(x)];
    for (std::size_t y = 0; y < row.size(); ++y)
      if (row[y] <= r) fn(static_cast<PointId>(y));
  }

  bool in_ball(PointId center, const Rational& r, PointId y) const override {
    return r >= Rational(0) && distance(center, y) <= r;
  }

  std::vector<Rational> scale_grid(const Rational& cap) const override {
    std::vector<Rational> out{Rational(0)};
    for (const auto& row : d_)
      for (const auto& v : row)
        if (v <= cap) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Rational scale_floor(const Rational& q) const override {
    Rational best(0);
    for (const auto& row : d_)
      for (const auto& v : row)
        if (v <= q && v > best) best = v;
    return best;
  }

 private:
  std::vector<std::vector<Rational>> d_;
};

}  // namespace ballean

#endif  // BALLEAN_SPACE_HPP
