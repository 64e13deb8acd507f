#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace exvocab {

struct EmbeddedPoint {
  std::string id;
  int year = 0;
  double x = 0;
  double y = 0;
  bool rare = false;    // document contains a rare-set word
  bool common = false;  // document contains a common-set word
};

// Static 2D k-d tree with exact k-nearest-neighbour queries. Ties in
// distance are broken by point index, so results are deterministic.
class KdTree2D {
 public:
  KdTree2D() = default;
  KdTree2D(std::vector<double> xs, std::vector<double> ys);

  std::size_t size() const { return xs_.size(); }
  // Indices (into the construction arrays) of the k nearest points, nearest
  // first. Returns fewer than k only when the tree has fewer points.
  std::vector<std::uint32_t> nearest(double x, double y, std::size_t k) const;

 private:
  struct Node {
    std::uint32_t begin, end;  // range in order_
    std::int32_t left = -1, right = -1;
    std::uint8_t axis = 0;
    double split = 0;
    double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  };
  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  std::vector<double> xs_, ys_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

struct LocalDeltaOptions {
  std::size_t k = 100;
  int reference_year = 2022;
  int target_year = 2024;
  unsigned workers = 1;
};

struct LocalDeltaResult {
  std::string id;
  double x = 0;
  double y = 0;
  std::optional<double> delta;  // mean of the rare and common differences
  std::optional<double> delta_rare;
  std::optional<double> delta_common;
  std::string error;  // set when delta is absent
};

// For every point: marker fractions among its k nearest reference-year and
// k nearest target-year points (the point itself included when it belongs to
// that year), and their raw difference target - reference. No smoothing and
// no extrapolation. Points with non-finite coordinates are rejected with
// Error(kInvalidArgument).
std::vector<LocalDeltaResult> local_delta(const std::vector<EmbeddedPoint>& points,
                                          const LocalDeltaOptions& options);

// Header id,year,x,y,rare,common (rare/common as 0/1).
std::vector<EmbeddedPoint> parse_points_csv(std::string_view csv);
// Header id,x,y,delta,delta_rare,delta_common,error
std::string local_delta_csv(const std::vector<LocalDeltaResult>& results);

}  // namespace exvocab
