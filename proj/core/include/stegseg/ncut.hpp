#pragma once

// Normalized-cut segmentation on a downsampled luminance graph.
//
// Affinity: w_ij = exp(-(I_i-I_j)^2 / sigma_i^2) * exp(-dist^2 / sigma_x^2) + 1e-9
// for pixel pairs closer than radius_r, else 0. Bipartitions come from the
// second eigenvector of (D - W) y = lambda D y, rounded by a threshold sweep
// that minimizes Ncut(A,B) = cut/assoc(A,V) + cut/assoc(B,V).

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stegseg/raster.hpp"

namespace stegseg {

struct NcutParams {
  std::uint32_t max_dim = 64;
  double radius_r = 5.0;
  double sigma_i = 0.1;
  double sigma_x = 4.0;
  std::uint32_t max_segments = 8;
  std::uint32_t min_nodes = 200;
  double ncut_stop = 0.2;
  std::uint32_t thresholds = 32;
  double eig_tol = 1e-8;
  std::uint32_t eig_max_iter = 5000;

  /// Throws InvalidParams.
  void validate() const;
};

inline constexpr double kWeightFloor = 1e-9;

struct GrayImage {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t scale = 1;  // full-resolution pixels per working cell, per axis
  std::vector<double> values;

  double at(std::uint32_t row, std::uint32_t col) const noexcept { return values[std::size_t{row} * width + col]; }
};

GrayImage downsample_luma(const RasterImage& image, std::uint32_t max_dim);

/// Symmetric sparse affinity graph in compressed-row form.
class PixelGraph {
 public:
  struct Coord {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
  };

  PixelGraph() = default;

  /// Builds from an n x n row-major dense matrix; entries <= 0 are dropped.
  static PixelGraph from_dense(std::size_t n, std::span<const double> dense);

  std::size_t size() const noexcept { return degrees_.size(); }
  std::span<const double> degrees() const noexcept { return degrees_; }
  std::span<const Coord> coords() const noexcept { return coords_; }

  std::span<const std::uint32_t> neighbors(std::size_t i) const noexcept {
    return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> weights(std::size_t i) const noexcept {
    return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// w_ij, or 0 when there is no edge.
  double weight(std::size_t i, std::size_t j) const noexcept;

  /// Graph restricted to `nodes` (ascending global ids); node k of the result
  /// is nodes[k]. Degrees are recomputed inside the subgraph.
  PixelGraph induced(std::span<const std::uint32_t> nodes) const;

  /// Connected components as lists of node ids, ordered by smallest member.
  std::vector<std::vector<std::uint32_t>> components() const;

  /// (D - W) x
  std::vector<double> laplacian_times(std::span<const double> x) const;

 private:
  friend PixelGraph build_graph(const GrayImage&, const NcutParams&);

  void finish();

  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  std::vector<double> degrees_;
  std::vector<Coord> coords_;
};

/// Throws ImageTooSmall for fewer than 2 pixels.
PixelGraph build_graph(const GrayImage& gray, const NcutParams& params);

struct FiedlerPair {
  std::vector<double> y;  // unit Euclidean norm, first nonzero entry positive
  double lambda = 0.0;
  double residual = 0.0;  // ||(D-W)y - lambda D y|| / ||y||
  std::uint32_t iterations = 0;
};

/// Throws NoConvergence when the residual bound is not reached within the
/// iteration budget, InvalidParams for graphs with fewer than 2 nodes.
FiedlerPair fiedler_vector(const PixelGraph& graph, const NcutParams& params);

/// ||(D-W)y - lambda D y|| / ||y|| evaluated directly on the graph.
double generalized_residual(const PixelGraph& graph, std::span<const double> y, double lambda);

/// side[i] true places node i in A. Throws EmptySide.
double ncut_value(const PixelGraph& graph, const std::vector<bool>& side);

struct Bipartition {
  std::vector<bool> side;
  double ncut = 0.0;
  double threshold = 0.0;
};

/// Throws DegenerateVector when y is constant.
Bipartition best_threshold_split(const PixelGraph& graph, std::span<const double> y, const NcutParams& params);

struct Partition {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t k = 0;
  std::vector<std::uint32_t> labels;  // one per full-resolution pixel

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Diagnostics gathered while segmenting.
struct SegmentStats {
  std::vector<FiedlerPair> accepted;  // every eigenpair used for a split
  std::uint32_t non_converged = 0;
};

Partition recursive_segment(const RasterImage& image, const NcutParams& params, SegmentStats* stats = nullptr);

/// Checks totality, dense label ids and 4-connectivity of every label.
bool partition_well_formed(const Partition& partition);

/// 8-bit debug rendering: label * floor(255 / max(k-1, 1)).
RasterImage label_image(const Partition& partition);

}  // namespace stegseg
