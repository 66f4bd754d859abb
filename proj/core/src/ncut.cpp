#include "stegseg/ncut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "stegseg/error.hpp"
#include "stegseg/msgcodec.hpp"

namespace stegseg {

void NcutParams::validate() const {
  const bool ok = max_dim >= 1 && radius_r > 1.0 && sigma_i > 0.0 && sigma_x > 0.0 && max_segments >= 1 &&
                  max_segments <= 65535 && min_nodes >= 1 && ncut_stop > 0.0 && ncut_stop <= 2.0 &&
                  thresholds >= 1 && eig_tol > 0.0 && eig_max_iter >= 1;
  if (!ok) throw Error(Errc::InvalidParams, "normalized-cut parameters out of range");
}

GrayImage downsample_luma(const RasterImage& image, std::uint32_t max_dim) {
  image.validate();
  if (max_dim == 0) throw Error(Errc::InvalidParams, "max_dim must be positive");
  const std::uint32_t longest = std::max(image.width, image.height);
  const std::uint32_t s = std::max<std::uint32_t>(1, (longest + max_dim - 1) / max_dim);

  GrayImage out;
  out.scale = s;
  out.width = (image.width + s - 1) / s;
  out.height = (image.height + s - 1) / s;
  std::vector<double> sum(std::size_t{out.width} * out.height, 0.0);
  std::vector<std::uint32_t> count(sum.size(), 0);

  const std::size_t c = image.channels;
  for (std::uint32_t y = 0; y < image.height; ++y) {
    for (std::uint32_t x = 0; x < image.width; ++x) {
      const std::uint8_t* p = &image.pixels[(std::size_t{y} * image.width + x) * c];
      const double luma = c == 1 ? p[0] / 255.0 : (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
      const std::size_t cell = std::size_t{y / s} * out.width + x / s;
      sum[cell] += luma;
      ++count[cell];
    }
  }
  out.values.resize(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) out.values[i] = sum[i] / count[i];
  return out;
}

// ---------------------------------------------------------------------------
// PixelGraph

void PixelGraph::finish() {
  const std::size_t n = row_ptr_.size() - 1;
  degrees_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) degrees_[i] += vals_[k];
}

PixelGraph PixelGraph::from_dense(std::size_t n, std::span<const double> dense) {
  if (dense.size() != n * n) throw Error(Errc::DimensionMismatch, "dense matrix must be n x n");
  PixelGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = dense[i * n + j];
      if (i != j && w > 0.0) {
        g.cols_.push_back(static_cast<std::uint32_t>(j));
        g.vals_.push_back(w);
      }
    }
    g.row_ptr_.push_back(g.cols_.size());
  }
  g.finish();
  return g;
}

double PixelGraph::weight(std::size_t i, std::size_t j) const noexcept {
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), static_cast<std::uint32_t>(j));
  if (it == nb.end() || *it != j) return 0.0;
  return vals_[row_ptr_[i] + static_cast<std::size_t>(it - nb.begin())];
}

PixelGraph PixelGraph::induced(std::span<const std::uint32_t> nodes) const {
  std::vector<std::int64_t> local(size(), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) local[nodes[k]] = static_cast<std::int64_t>(k);

  PixelGraph g;
  g.cols_.reserve(nodes.size() * 8);
  g.vals_.reserve(nodes.size() * 8);
  for (std::uint32_t global : nodes) {
    const auto nb = neighbors(global);
    const auto wt = weights(global);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (local[nb[k]] >= 0) {
        g.cols_.push_back(static_cast<std::uint32_t>(local[nb[k]]));
        g.vals_.push_back(wt[k]);
      }
    }
    g.row_ptr_.push_back(g.cols_.size());
    if (!coords_.empty()) g.coords_.push_back(coords_[global]);
  }
  g.finish();
  return g;
}

std::vector<std::vector<std::uint32_t>> PixelGraph::components() const {
  const std::size_t n = size();
  std::vector<bool> seen(n, false);
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::uint32_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::uint32_t> comp;
    seen[start] = true;
    stack.push_back(static_cast<std::uint32_t>(start));
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (std::uint32_t u : neighbors(v)) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<double> PixelGraph::laplacian_times(std::span<const double> x) const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    double acc = degrees_[i] * x[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc -= vals_[k] * x[cols_[k]];
    out[i] = acc;
  }
  return out;
}

PixelGraph build_graph(const GrayImage& gray, const NcutParams& params) {
  params.validate();
  const std::size_t n = std::size_t{gray.width} * gray.height;
  if (n < 2) throw Error(Errc::ImageTooSmall, "graph needs at least two pixels");

  // Neighbor offsets strictly inside the radius, in raster order so every
  // CSR row comes out with ascending column ids.
  struct Offset {
    int dy;
    int dx;
    double spatial;
  };
  std::vector<Offset> offsets;
  const int reach = static_cast<int>(std::ceil(params.radius_r));
  const double r2 = params.radius_r * params.radius_r;
  const double sx2 = params.sigma_x * params.sigma_x;
  for (int dy = -reach; dy <= reach; ++dy)
    for (int dx = -reach; dx <= reach; ++dx) {
      const double d2 = double(dy * dy + dx * dx);
      if ((dy != 0 || dx != 0) && d2 < r2) offsets.push_back({dy, dx, std::exp(-d2 / sx2)});
    }

  const double si2 = params.sigma_i * params.sigma_i;
  PixelGraph g;
  g.cols_.reserve(n * offsets.size());
  g.vals_.reserve(n * offsets.size());
  g.coords_.reserve(n);
  const int w = static_cast<int>(gray.width);
  const int h = static_cast<int>(gray.height);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double vi = gray.values[std::size_t(y) * gray.width + std::size_t(x)];
      for (const auto& off : offsets) {
        const int ny = y + off.dy;
        const int nx = x + off.dx;
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const std::size_t j = std::size_t(ny) * gray.width + std::size_t(nx);
        const double di = vi - gray.values[j];
        g.cols_.push_back(static_cast<std::uint32_t>(j));
        g.vals_.push_back(std::exp(-di * di / si2) * off.spatial + kWeightFloor);
      }
      g.row_ptr_.push_back(g.cols_.size());
      g.coords_.push_back({static_cast<std::uint32_t>(y), static_cast<std::uint32_t>(x)});
    }
  }
  g.finish();
  return g;
}

// ---------------------------------------------------------------------------
// Eigen-solver

namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void scale(std::span<double> a, double f) noexcept {
  for (double& v : a) v *= f;
}

struct RitzPair {
  double value = 0.0;
  double last_component = 0.0;
  std::vector<double> vector;  // coordinates in the Krylov basis, when requested
};

// Largest eigenpair of the symmetric tridiagonal matrix with diagonal `diag`
// and off-diagonal `off` (off.size() >= diag.size() - 1), by implicit QL.
// Without want_vector only the last row of the eigenvector matrix is tracked.
RitzPair top_ritz_pair(std::span<const double> diag, std::span<const double> off, bool want_vector) {
  const std::size_t m = diag.size();
  std::vector<double> dv(diag.begin(), diag.end());
  std::vector<double> e(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) e[i] = off[i];

  const std::size_t rows = want_vector ? m : 1;
  std::vector<double> z(rows * m, 0.0);
  if (want_vector)
    for (std::size_t i = 0; i < m; ++i) z[i * m + i] = 1.0;
  else
    z[m - 1] = 1.0;

  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < m; ++l) {
    int guard = 0;
    for (;;) {
      std::size_t sm = l;
      for (; sm + 1 < m; ++sm) {
        const double dd = std::abs(dv[sm]) + std::abs(dv[sm + 1]);
        if (std::abs(e[sm]) <= eps * dd) break;
      }
      if (sm == l) break;
      if (++guard > 200) break;
      double g = (dv[l + 1] - dv[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = dv[sm] - dv[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = sm; ii-- > l;) {
        const double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          dv[ii + 1] -= p;
          e[sm] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = dv[ii + 1] - p;
        r = (dv[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        dv[ii + 1] = g + p;
        g = c * r - b;
        for (std::size_t k = 0; k < rows; ++k) {
          const double zf = z[k * m + ii + 1];
          z[k * m + ii + 1] = s * z[k * m + ii] + c * zf;
          z[k * m + ii] = c * z[k * m + ii] - s * zf;
        }
      }
      if (underflow) continue;
      dv[l] -= p;
      e[l] = g;
      e[sm] = 0.0;
    }
  }

  const std::size_t best = static_cast<std::size_t>(std::max_element(dv.begin(), dv.end()) - dv.begin());
  RitzPair out;
  out.value = dv[best];
  out.last_component = z[(rows - 1) * m + best];
  if (want_vector) {
    out.vector.resize(m);
    for (std::size_t k = 0; k < m; ++k) out.vector[k] = z[k * m + best];
  }
  return out;
}

}  // namespace

double generalized_residual(const PixelGraph& graph, std::span<const double> y, double lambda) {
  const auto ly = graph.laplacian_times(y);
  const auto d = graph.degrees();
  double rr = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = ly[i] - lambda * d[i] * y[i];
    rr += r * r;
  }
  return std::sqrt(rr) / std::sqrt(dot(y, y));
}

FiedlerPair fiedler_vector(const PixelGraph& graph, const NcutParams& params) {
  const std::size_t n = graph.size();
  if (n < 2) throw Error(Errc::InvalidParams, "eigenproblem needs at least two nodes");
  const auto d = graph.degrees();
  for (double di : d)
    if (!(di > 0.0)) throw Error(Errc::NoConvergence, "graph has an isolated node");

  // Normalized operator N = D^-1/2 W D^-1/2 in the graph's sparsity pattern.
  std::vector<double> inv_sqrt_d(n), sqrt_d(n);
  for (std::size_t i = 0; i < n; ++i) {
    sqrt_d[i] = std::sqrt(d[i]);
    inv_sqrt_d[i] = 1.0 / sqrt_d[i];
  }
  std::vector<std::size_t> row_ptr(n + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> nvals;
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = graph.neighbors(i);
    const auto wt = graph.weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      cols.push_back(nb[k]);
      nvals.push_back(wt[k] * inv_sqrt_d[i] * inv_sqrt_d[nb[k]]);
    }
    row_ptr[i + 1] = cols.size();
  }
  auto apply_n = [&](std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += nvals[k] * x[cols[k]];
      out[i] = acc;
    }
  };

  // Known top eigenvector of N: D^1/2 * 1, normalized.
  std::vector<double> top = sqrt_d;
  scale(top, 1.0 / std::sqrt(dot(top, top)));
  auto deflate = [&](std::span<double> x) {
    const double c = dot(x, top);
    for (std::size_t i = 0; i < n; ++i) x[i] -= c * top[i];
    scale(x, 1.0 / std::sqrt(dot(x, x)));
  };

  std::vector<double> z(n), t(n);
  PrngStream rng(0x5EED0F1ED1E4ULL);
  for (double& v : z) v = double(rng.next() >> 11) * 0x1.0p-53 - 0.5;
  deflate(z);

  double dmax = 0.0;
  for (double di : d) dmax = std::max(dmax, di);

  // ||(D-W)y - lambda D y|| / ||y|| for y = D^-1/2 z, given t = N z and mu = z.t
  auto generalized_from_n = [&](std::span<const double> zz, std::span<const double> tt, double mu) {
    double rr = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = sqrt_d[i] * (tt[i] - mu * zz[i]);
      rr += r * r;
      yy += zz[i] * zz[i] / d[i];
    }
    return std::sqrt(rr / yy);
  };

  // Lanczos on N restricted to the complement of the top vector, with full
  // reorthogonalization and explicit restarts from the best Ritz vector.
  // eig_max_iter bounds the number of operator applications.
  const double loop_tol = 0.5 * params.eig_tol;
  const std::size_t krylov_max = std::min<std::size_t>(n - 1, 256);
  std::uint32_t iter = 0;
  bool converged = false;
  std::vector<std::vector<double>> basis;
  std::vector<double> alpha, beta, w(n);
  while (!converged && iter < params.eig_max_iter) {
    basis.clear();
    alpha.clear();
    beta.clear();
    std::vector<double> q = z;
    for (std::size_t j = 0; j < krylov_max && iter < params.eig_max_iter; ++j) {
      basis.push_back(q);
      apply_n(q, w);
      ++iter;
      const double a = dot(q, w);
      alpha.push_back(a);
      for (std::size_t i = 0; i < n; ++i) w[i] -= a * q[i] + (j > 0 ? beta[j - 1] * basis[j - 1][i] : 0.0);
      for (int pass = 0; pass < 2; ++pass) {
        const double c = dot(w, top);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * top[i];
        for (const auto& v : basis) {
          const double h = dot(w, v);
          for (std::size_t i = 0; i < n; ++i) w[i] -= h * v[i];
        }
      }
      const double b = std::sqrt(dot(w, w));
      const std::size_t m = j + 1;
      const bool exhausted = b <= 1e-13 * std::max(1.0, std::abs(a));
      const bool last = m == krylov_max || iter >= params.eig_max_iter;
      if (exhausted || last || m % 10 == 0) {
        const auto ritz = top_ritz_pair(alpha, beta, /*want_vector=*/false);
        const double estimate = b * std::abs(ritz.last_component);
        if (exhausted || last || dmax * estimate <= loop_tol) {
          const auto full = top_ritz_pair(alpha, beta, /*want_vector=*/true);
          std::fill(z.begin(), z.end(), 0.0);
          for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < n; ++i) z[i] += full.vector[k] * basis[k][i];
          deflate(z);
          apply_n(z, t);
          if (generalized_from_n(z, t, dot(z, t)) <= loop_tol) {
            converged = true;
            break;
          }
          if (exhausted || last) break;  // restart from the Ritz vector in z
        }
      }
      beta.push_back(b);
      for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b;
    }
  }

  FiedlerPair out;
  out.iterations = iter;
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.y[i] = z[i] * inv_sqrt_d[i];
  scale(out.y, 1.0 / std::sqrt(dot(out.y, out.y)));
  for (double v : out.y) {
    if (v != 0.0) {
      if (v < 0.0) scale(out.y, -1.0);
      break;
    }
  }
  const auto ly = graph.laplacian_times(out.y);
  double ydy = 0.0;
  for (std::size_t i = 0; i < n; ++i) ydy += d[i] * out.y[i] * out.y[i];
  out.lambda = dot(out.y, ly) / ydy;
  out.residual = generalized_residual(graph, out.y, out.lambda);
  if (!converged || out.residual > params.eig_tol)
    throw Error(Errc::NoConvergence, "Fiedler residual above tolerance after " + std::to_string(iter) + " iterations");
  return out;
}

// ---------------------------------------------------------------------------
// Cuts

double ncut_value(const PixelGraph& graph, const std::vector<bool>& side) {
  if (side.size() != graph.size()) throw Error(Errc::DimensionMismatch, "side vector length differs from graph");
  const auto d = graph.degrees();
  double cut = 0.0, assoc_a = 0.0, assoc_b = 0.0;
  bool any_a = false, any_b = false;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (side[i]) {
      any_a = true;
      assoc_a += d[i];
      const auto nb = graph.neighbors(i);
      const auto wt = graph.weights(i);
      for (std::size_t k = 0; k < nb.size(); ++k)
        if (!side[nb[k]]) cut += wt[k];
    } else {
      any_b = true;
      assoc_b += d[i];
    }
  }
  if (!any_a || !any_b) throw Error(Errc::EmptySide, "both sides of a cut must be non-empty");
  return cut / assoc_a + cut / assoc_b;
}

Bipartition best_threshold_split(const PixelGraph& graph, std::span<const double> y, const NcutParams& params) {
  if (y.size() != graph.size()) throw Error(Errc::DimensionMismatch, "vector length differs from graph");
  if (y.empty()) throw Error(Errc::DegenerateVector, "empty vector");
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) throw Error(Errc::DegenerateVector, "all vector components are equal");

  Bipartition best;
  bool have = false;
  std::vector<bool> side(y.size());
  for (std::uint32_t k = 1; k <= params.thresholds; ++k) {
    const double t = lo + (hi - lo) * double(k) / double(params.thresholds + 1);
    std::size_t above = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      side[i] = y[i] > t;
      above += side[i];
    }
    if (above == 0 || above == y.size()) continue;
    const double value = ncut_value(graph, side);
    if (!have || value < best.ncut) {
      best = {side, value, t};
      have = true;
    }
  }
  if (!have) throw Error(Errc::DegenerateVector, "no threshold separates the vector");
  return best;
}

// ---------------------------------------------------------------------------
// Recursive segmentation

namespace {

using Region = std::vector<std::uint32_t>;

struct LargerRegion {
  bool operator()(const Region& a, const Region& b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.front() > b.front();
  }
};

// 4-connected components of a label grid; returns component id per cell in
// raster order of first occurrence.
std::vector<std::uint32_t> grid_components(const std::vector<std::uint32_t>& labels, std::uint32_t w,
                                           std::uint32_t h, std::uint32_t& count) {
  const std::uint32_t unset = 0xFFFFFFFFU;
  std::vector<std::uint32_t> comp(labels.size(), unset);
  std::vector<std::size_t> stack;
  count = 0;
  for (std::size_t start = 0; start < labels.size(); ++start) {
    if (comp[start] != unset) continue;
    comp[start] = count;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      const std::size_t y = v / w, x = v % w;
      auto visit = [&](std::size_t u) {
        if (comp[u] == unset && labels[u] == labels[v]) {
          comp[u] = count;
          stack.push_back(u);
        }
      };
      if (x > 0) visit(v - 1);
      if (x + 1 < w) visit(v + 1);
      if (y > 0) visit(v - w);
      if (y + 1 < h) visit(v + w);
    }
    ++count;
  }
  return comp;
}

// Splits disconnected labels, then repeatedly merges the smallest region into
// the neighbor sharing the longest boundary while it is below min_size or
// there are more than max_regions regions.
std::vector<std::uint32_t> clean_labels(std::vector<std::uint32_t> labels, std::uint32_t w, std::uint32_t h,
                                        double min_size, std::uint32_t max_regions) {
  for (;;) {
    std::uint32_t count = 0;
    labels = grid_components(labels, w, h, count);
    if (count <= 1) return labels;

    std::vector<std::size_t> sizes(count, 0);
    for (auto l : labels) ++sizes[l];
    std::uint32_t smallest = 0;
    for (std::uint32_t c = 1; c < count; ++c)
      if (sizes[c] < sizes[smallest]) smallest = c;
    if (double(sizes[smallest]) >= min_size && count <= max_regions) return labels;

    std::vector<std::size_t> shared(count, 0);
    for (std::size_t v = 0; v < labels.size(); ++v) {
      const std::size_t x = v % w;
      if (x + 1 < w && labels[v] != labels[v + 1]) {
        if (labels[v] == smallest) ++shared[labels[v + 1]];
        if (labels[v + 1] == smallest) ++shared[labels[v]];
      }
      if (v + w < labels.size() && labels[v] != labels[v + w]) {
        if (labels[v] == smallest) ++shared[labels[v + w]];
        if (labels[v + w] == smallest) ++shared[labels[v]];
      }
    }
    std::uint32_t target = smallest;
    std::size_t longest = 0;
    for (std::uint32_t c = 0; c < count; ++c)
      if (c != smallest && shared[c] > longest) {
        target = c;
        longest = shared[c];
      }
    for (auto& l : labels)
      if (l == smallest) l = target;
  }
}

}  // namespace

Partition recursive_segment(const RasterImage& image, const NcutParams& params, SegmentStats* stats) {
  params.validate();
  const GrayImage gray = downsample_luma(image, params.max_dim);
  const std::size_t n = gray.values.size();

  std::vector<std::uint32_t> work(n, 0);
  if (n >= 2 && params.max_segments > 1) {
    const PixelGraph graph = build_graph(gray, params);
    std::priority_queue<Region, std::vector<Region>, LargerRegion> pending;
    for (auto& comp : graph.components()) pending.push(std::move(comp));
    std::size_t count = pending.size();
    std::vector<Region> done;

    while (!pending.empty()) {
      Region region = pending.top();
      pending.pop();
      if (count >= params.max_segments || region.size() < params.min_nodes) {
        done.push_back(std::move(region));
        continue;
      }
      const PixelGraph sub = graph.induced(region);
      auto comps = sub.components();
      Region a, b;
      if (comps.size() > 1) {
        // Disconnected: splitting off a component has zero cut.
        for (std::size_t c = 0; c < comps.size(); ++c)
          for (auto local : comps[c]) (c == 0 ? a : b).push_back(region[local]);
        std::sort(b.begin(), b.end());
      } else {
        Bipartition split;
        try {
          FiedlerPair pair = fiedler_vector(sub, params);
          split = best_threshold_split(sub, pair.y, params);
          if (split.ncut <= params.ncut_stop && stats) stats->accepted.push_back(std::move(pair));
        } catch (const Error& e) {
          if (e.code() != Errc::NoConvergence && e.code() != Errc::DegenerateVector) throw;
          if (stats) ++stats->non_converged;
          done.push_back(std::move(region));
          continue;
        }
        if (split.ncut > params.ncut_stop) {
          done.push_back(std::move(region));
          continue;
        }
        for (std::size_t i = 0; i < region.size(); ++i) (split.side[i] ? a : b).push_back(region[i]);
      }
      pending.push(std::move(a));
      pending.push(std::move(b));
      ++count;
    }
    for (std::uint32_t r = 0; r < done.size(); ++r)
      for (auto node : done[r]) work[node] = r;
  }

  work = clean_labels(std::move(work), gray.width, gray.height, params.min_nodes / 4.0, params.max_segments);

  Partition out;
  out.width = image.width;
  out.height = image.height;
  out.labels.resize(image.pixel_count());
  const std::uint32_t unset = 0xFFFFFFFFU;
  std::vector<std::uint32_t> renumber(n, unset);
  std::uint32_t k = 0;
  for (std::uint32_t y = 0; y < image.height; ++y)
    for (std::uint32_t x = 0; x < image.width; ++x) {
      std::uint32_t& id = renumber[work[std::size_t{y / gray.scale} * gray.width + x / gray.scale]];
      if (id == unset) id = k++;
      out.labels[std::size_t{y} * image.width + x] = id;
    }
  out.k = k;
  return out;
}

bool partition_well_formed(const Partition& partition) {
  if (partition.width == 0 || partition.height == 0 || partition.k == 0) return false;
  if (partition.labels.size() != std::size_t{partition.width} * partition.height) return false;
  std::vector<bool> used(partition.k, false);
  for (auto l : partition.labels) {
    if (l >= partition.k) return false;
    used[l] = true;
  }
  if (std::find(used.begin(), used.end(), false) != used.end()) return false;
  std::uint32_t comps = 0;
  grid_components(partition.labels, partition.width, partition.height, comps);
  return comps == partition.k;
}

RasterImage label_image(const Partition& partition) {
  RasterImage img(partition.width, partition.height, 1);
  const std::uint32_t step = 255 / std::max<std::uint32_t>(partition.k > 0 ? partition.k - 1 : 0, 1);
  for (std::size_t i = 0; i < partition.labels.size(); ++i)
    img.pixels[i] = static_cast<std::uint8_t>(std::min<std::uint32_t>(partition.labels[i] * step, 255));
  return img;
}

}  // namespace stegseg
