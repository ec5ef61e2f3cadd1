#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "semcse/error.hpp"
#include "semcse/ranking.hpp"

namespace semcse {

/// Dense row-major symmetric matrix.
struct SymmetricMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

struct EigenDecomposition {
  std::vector<double> values;                // descending
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k]
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi eigensolver. Stops once the off-diagonal Frobenius norm is
/// at most tol times the full norm, or after max_sweeps sweeps.
inline EigenDecomposition jacobi_eigen(SymmetricMatrix m, double tol = 1e-12, std::size_t max_sweeps = 100) {
  const std::size_t n = m.n;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    v[i * n + i] = 1.0;
  }
  double full = 0.0;
  for (const double x : m.a) {
    full += x * x;
  }
  full = std::sqrt(full);

  EigenDecomposition out;
  for (; out.sweeps < max_sweeps; ++out.sweeps) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        off += 2.0 * m(p, q) * m(p, q);
      }
    }
    if (std::sqrt(off) <= tol * full || full == 0.0) {
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) {
          continue;
        }
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = m(k, p);
          const double akq = m(k, q);
          m(k, p) = c * akp - s * akq;
          m(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = m(p, k);
          const double aqk = m(q, k);
          m(p, k) = c * apk - s * aqk;
          m(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return m(i, i) > m(j, j); });
  for (const auto k : order) {
    out.values.push_back(m(k, k));
    std::vector<double> col(n);
    for (std::size_t r = 0; r < n; ++r) {
      col[r] = v[r * n + k];
    }
    out.vectors.push_back(std::move(col));
  }
  return out;
}

/// Population covariance (denominator n) of mean-centered vectors.
inline SymmetricMatrix covariance(const std::vector<EmbeddingVector>& points, std::vector<double>* mean_out = nullptr) {
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& p : points) {
    for (std::size_t k = 0; k < dim; ++k) {
      mean[k] += p[k];
    }
  }
  for (auto& m : mean) {
    m /= static_cast<double>(n);
  }
  SymmetricMatrix c{dim, std::vector<double>(dim * dim, 0.0)};
  std::vector<double> centered(dim);
  for (const auto& p : points) {
    for (std::size_t k = 0; k < dim; ++k) {
      centered[k] = p[k] - mean[k];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = i; j < dim; ++j) {
        c(i, j) += centered[i] * centered[j];
      }
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      c(i, j) /= static_cast<double>(n);
      c(j, i) = c(i, j);
    }
  }
  if (mean_out != nullptr) {
    *mean_out = std::move(mean);
  }
  return c;
}

struct VarianceProfile {
  std::string source;
  std::size_t n_points = 0;
  std::size_t dimension = 0;
  std::vector<double> fractions;  // descending, sums to 1
};

/// Share of total variance carried by each principal component after
/// mean-centering.
inline VarianceProfile variance_profile(const EmbeddingSet& embs) {
  if (embs.size() < 2) {
    throw Error("variance profile needs at least 2 points");
  }
  if (embs.dim() < 1) {
    throw Error("variance profile needs dimension >= 1");
  }
  const auto eig = jacobi_eigen(covariance(embs.vectors()));
  double total = 0.0;
  std::vector<double> values;
  for (const double v : eig.values) {
    values.push_back(std::max(v, 0.0));
    total += values.back();
  }
  if (!(total > 0.0)) {
    throw Error("variance profile: points have zero total variance");
  }
  VarianceProfile out{embs.source(), embs.size(), embs.dim(), {}};
  for (const double v : values) {
    out.fractions.push_back(v / total);
  }
  return out;
}

inline double top_k_mass(const VarianceProfile& profile, std::size_t k) {
  if (k < 1 || k > profile.fractions.size()) {
    throw Error("top-k mass: k = " + std::to_string(k) + " outside [1, " + std::to_string(profile.fractions.size()) +
                "]");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    s += profile.fractions[i];
  }
  return s;
}

struct ProjectedPoint {
  std::string key;
  double x = 0.0;
  double y = 0.0;
};

/// Coordinates on the top two principal axes. Each axis is oriented so its
/// largest-magnitude loading is positive; an axis with no variance yields 0.
inline std::vector<ProjectedPoint> pca_project_2d(const EmbeddingSet& embs) {
  if (embs.size() < 3) {
    throw Error("2-D projection needs at least 3 points");
  }
  std::vector<double> mean;
  const auto eig = jacobi_eigen(covariance(embs.vectors(), &mean));
  double total = 0.0;
  for (const double v : eig.values) {
    total += std::max(v, 0.0);
  }
  if (!(total > 0.0)) {
    throw Error("2-D projection: points have zero total variance");
  }
  std::vector<std::vector<double>> axes;
  for (std::size_t a = 0; a < 2; ++a) {
    if (a >= eig.values.size() || eig.values[a] <= 1e-12 * total) {
      axes.emplace_back();
      continue;
    }
    auto axis = eig.vectors[a];
    std::size_t arg = 0;
    for (std::size_t k = 1; k < axis.size(); ++k) {
      if (std::abs(axis[k]) > std::abs(axis[arg])) {
        arg = k;
      }
    }
    if (axis[arg] < 0.0) {
      for (auto& x : axis) {
        x = -x;
      }
    }
    axes.push_back(std::move(axis));
  }
  std::vector<ProjectedPoint> out;
  for (std::size_t i = 0; i < embs.size(); ++i) {
    const auto& p = embs.vector(i);
    ProjectedPoint pt{embs.key(i), 0.0, 0.0};
    double* coord[2] = {&pt.x, &pt.y};
    for (std::size_t a = 0; a < 2; ++a) {
      if (axes[a].empty()) {
        continue;
      }
      for (std::size_t k = 0; k < p.size(); ++k) {
        *coord[a] += (p[k] - mean[k]) * axes[a][k];
      }
    }
    out.push_back(std::move(pt));
  }
  return out;
}

inline void write_profile_csv(const VarianceProfile& profile, std::ostream& out) {
  out << "component,fraction,cumulative\n" << std::setprecision(17);
  double cum = 0.0;
  for (std::size_t i = 0; i < profile.fractions.size(); ++i) {
    cum += profile.fractions[i];
    out << (i + 1) << ',' << profile.fractions[i] << ',' << cum << '\n';
  }
}

/// key,x,y,category; category empty when unknown.
inline void write_projection_csv(const std::vector<ProjectedPoint>& points,
                                 const std::map<std::string, std::string>& categories, std::ostream& out) {
  out << "key,x,y,category\n" << std::setprecision(17);
  for (const auto& p : points) {
    const auto it = categories.find(p.key);
    out << p.key << ',' << p.x << ',' << p.y << ',' << (it == categories.end() ? "" : it->second) << '\n';
  }
}

}  // namespace semcse
