#include "exvocab/local_delta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <thread>

#include "exvocab/error.hpp"
#include "exvocab/io.hpp"

namespace exvocab {

namespace {
constexpr std::uint32_t kLeafSize = 16;
}

KdTree2D::KdTree2D(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size()) throw Error(ErrorCode::kShapeMismatch, "kd-tree: x/y size mismatch");
  order_.resize(xs_.size());
  std::iota(order_.begin(), order_.end(), 0U);
  if (!order_.empty()) build(0, static_cast<std::uint32_t>(order_.size()));
}

std::int32_t KdTree2D::build(std::uint32_t begin, std::uint32_t end) {
  Node node{begin, end};
  node.min_x = node.min_y = std::numeric_limits<double>::infinity();
  node.max_x = node.max_y = -std::numeric_limits<double>::infinity();
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t p = order_[i];
    node.min_x = std::min(node.min_x, xs_[p]);
    node.max_x = std::max(node.max_x, xs_[p]);
    node.min_y = std::min(node.min_y, ys_[p]);
    node.max_y = std::max(node.max_y, ys_[p]);
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  const std::uint8_t axis = (node.max_x - node.min_x) >= (node.max_y - node.min_y) ? 0 : 1;
  const std::vector<double>& c = axis == 0 ? xs_ : ys_;
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return c[a] < c[b] || (c[a] == c[b] && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = c[order_[mid]];
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<std::uint32_t> KdTree2D::nearest(double x, double y, std::size_t k) const {
  using Entry = std::pair<double, std::uint32_t>;  // (squared distance, index)
  std::priority_queue<Entry> heap;                  // worst on top
  if (k == 0 || nodes_.empty()) return {};

  auto box_dist2 = [&](const Node& n) {
    const double dx = x < n.min_x ? n.min_x - x : (x > n.max_x ? x - n.max_x : 0.0);
    const double dy = y < n.min_y ? n.min_y - y : (y > n.max_y ? y - n.max_y : 0.0);
    return dx * dx + dy * dy;
  };
  auto consider = [&](std::uint32_t p) {
    const double dx = xs_[p] - x, dy = ys_[p] - y;
    const Entry e{dx * dx + dy * dy, p};
    if (heap.size() < k) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
  };
  // Iterative depth-first search, nearer child first.
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const Node& n = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (heap.size() == k && box_dist2(n) > heap.top().first) continue;
    if (n.left < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) consider(order_[i]);
      continue;
    }
    const double coord = n.axis == 0 ? x : y;
    if (coord < n.split) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    } else {
      stack.push_back(n.left);
      stack.push_back(n.right);
    }
  }
  std::vector<std::uint32_t> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct YearIndex {
  std::vector<std::uint32_t> members;  // indices into points
  KdTree2D tree;
};

YearIndex index_year(const std::vector<EmbeddedPoint>& points, int year) {
  YearIndex yi;
  std::vector<double> xs, ys;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    if (points[i].year != year) continue;
    yi.members.push_back(i);
    xs.push_back(points[i].x);
    ys.push_back(points[i].y);
  }
  yi.tree = KdTree2D(std::move(xs), std::move(ys));
  return yi;
}

}  // namespace

std::vector<LocalDeltaResult> local_delta(const std::vector<EmbeddedPoint>& points,
                                          const LocalDeltaOptions& options) {
  if (options.k == 0) throw Error(ErrorCode::kInvalidArgument, "local_delta: k must be >= 1");
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::kInvalidArgument, "local_delta: point " + p.id + " has non-finite coordinates");
    }
  }
  const YearIndex ref = index_year(points, options.reference_year);
  const YearIndex tgt = index_year(points, options.target_year);

  std::vector<LocalDeltaResult> results(points.size());
  auto fractions = [&](const YearIndex& yi, double x, double y, double& rare, double& common) {
    const auto nn = yi.tree.nearest(x, y, options.k);
    std::size_t r = 0, c = 0;
    for (std::uint32_t j : nn) {
      const EmbeddedPoint& q = points[yi.members[j]];
      r += q.rare ? 1 : 0;
      c += q.common ? 1 : 0;
    }
    rare = static_cast<double>(r) / static_cast<double>(nn.size());
    common = static_cast<double>(c) / static_cast<double>(nn.size());
  };
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const EmbeddedPoint& p = points[i];
      LocalDeltaResult& out = results[i];
      out.id = p.id;
      out.x = p.x;
      out.y = p.y;
      if (ref.tree.size() < options.k || tgt.tree.size() < options.k) {
        out.error = "fewer than " + std::to_string(options.k) + " points in " +
                    std::to_string(ref.tree.size() < options.k ? options.reference_year
                                                               : options.target_year);
        continue;
      }
      double rr, rc, tr, tc;
      fractions(ref, p.x, p.y, rr, rc);
      fractions(tgt, p.x, p.y, tr, tc);
      out.delta_rare = tr - rr;
      out.delta_common = tc - rc;
      out.delta = (*out.delta_rare + *out.delta_common) / 2.0;
    }
  };

  const unsigned workers = std::max(1U, options.workers);
  if (workers == 1 || points.size() < 1024) {
    run(0, points.size());
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (points.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(points.size(), w * chunk);
      const std::size_t e = std::min(points.size(), b + chunk);
      threads.emplace_back(run, b, e);
    }
    for (auto& t : threads) t.join();
  }
  return results;
}

namespace {

bool parse_flag(std::string_view s, std::size_t line_no) {
  s = trim(s);
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false" || s.empty()) return false;
  throw Error(ErrorCode::kParse, "points line " + std::to_string(line_no) + ": bad flag '" +
                                     std::string(s) + "'");
}

double parse_number(std::string_view s, std::size_t line_no) {
  const std::string v(trim(s));
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) {
    throw Error(ErrorCode::kParse, "points line " + std::to_string(line_no) + ": bad number '" + v + "'");
  }
  return d;
}

}  // namespace

std::vector<EmbeddedPoint> parse_points_csv(std::string_view csv) {
  std::vector<EmbeddedPoint> out;
  std::size_t line_no = 0;
  std::vector<std::size_t> col;  // id, year, x, y, rare, common
  while (!csv.empty()) {
    std::size_t nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (col.empty()) {
      const char* names[] = {"id", "year", "x", "y", "rare", "common"};
      for (const char* n : names) {
        auto it = std::find_if(cells.begin(), cells.end(),
                               [&](const std::string& c) { return to_lower_ascii(trim(c)) == n; });
        if (it == cells.end()) {
          throw Error(ErrorCode::kParse, std::string("points header lacks column '") + n + "'");
        }
        col.push_back(static_cast<std::size_t>(it - cells.begin()));
      }
      continue;
    }
    const std::size_t need = *std::max_element(col.begin(), col.end());
    if (cells.size() <= need) {
      throw Error(ErrorCode::kParse, "points line " + std::to_string(line_no) + ": too few columns");
    }
    EmbeddedPoint p;
    p.id = cells[col[0]];
    p.year = static_cast<int>(parse_number(cells[col[1]], line_no));
    p.x = parse_number(cells[col[2]], line_no);
    p.y = parse_number(cells[col[3]], line_no);
    p.rare = parse_flag(cells[col[4]], line_no);
    p.common = parse_flag(cells[col[5]], line_no);
    out.push_back(std::move(p));
  }
  return out;
}

std::string local_delta_csv(const std::vector<LocalDeltaResult>& results) {
  std::string out = "id,x,y,delta,delta_rare,delta_common,error\n";
  for (const auto& r : results) {
    out += csv_escape(r.id) + ',' + format_double(r.x) + ',' + format_double(r.y) + ',';
    if (r.delta) {
      out += format_double(*r.delta) + ',' + format_double(*r.delta_rare) + ',' +
             format_double(*r.delta_common);
    } else {
      out += ",,";
    }
    out += ',' + csv_escape(r.error) + '\n';
  }
  return out;
}

}  // namespace exvocab
