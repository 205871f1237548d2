#pragma once

// Spatial locations, stationary covariance kernels, and the direct
// three-point correlation parameterization with its positive-definiteness
// check.

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nngpkl/format.hpp"
#include "nngpkl/numerics.hpp"

namespace nngpkl {

using Location = Eigen::RowVectorXd;

// Ordered list of n pairwise-distinct points in R^d, d in {1,2,3}, stored as
// an n x d matrix. Duplicate locations are rejected rather than deduplicated:
// they make a noise-free covariance matrix singular, and that should fail
// loudly at the input boundary.
class LocationSet {
 public:
  explicit LocationSet(Eigen::MatrixXd points) : points_(std::move(points)) {
    if (points_.rows() < 1) throw DimensionMismatch("LocationSet: need at least one point");
    if (points_.cols() < 1 || points_.cols() > 3) {
      throw DimensionMismatch("LocationSet: dimension must be 1, 2 or 3, got " +
                              std::to_string(points_.cols()));
    }
    if (!points_.array().isFinite().all()) {
      throw std::invalid_argument("LocationSet: coordinates must be finite");
    }
    for (Index i = 0; i < points_.rows(); ++i) {
      for (Index j = i + 1; j < points_.rows(); ++j) {
        if ((points_.row(i) - points_.row(j)).squaredNorm() == 0.0) {
          throw std::invalid_argument("LocationSet: duplicate points at rows " +
                                      std::to_string(i) + " and " + std::to_string(j));
        }
      }
    }
  }

  // CSV with a required header x1..xd and one row per point.
  static LocationSet from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("locations csv: empty input");
    const std::vector<std::string> header = split_csv(line);
    const Index d = static_cast<Index>(header.size());
    for (Index j = 0; j < d; ++j) {
      if (trimmed(header[static_cast<std::size_t>(j)]) != "x" + std::to_string(j + 1)) {
        throw IoError("locations csv: expected header x1..xd, got '" + line + "'");
      }
    }
    std::vector<double> values;
    Index rows = 0;
    while (std::getline(in, line)) {
      if (trimmed(line).empty()) continue;
      const std::vector<std::string> fields = split_csv(line);
      if (static_cast<Index>(fields.size()) != d) {
        throw IoError("locations csv: row '" + line + "' has " +
                      std::to_string(fields.size()) + " fields, expected " + std::to_string(d));
      }
      for (const std::string& f : fields) values.push_back(parse_double(f));
      ++rows;
    }
    if (rows == 0) throw IoError("locations csv: no data rows");
    Eigen::MatrixXd pts(rows, d);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < d; ++j) pts(i, j) = values[static_cast<std::size_t>(i * d + j)];
    return LocationSet(std::move(pts));
  }

  static LocationSet from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("locations csv: cannot open '" + path + "'");
    return from_csv(in);
  }

  void write_csv(std::ostream& out) const {
    for (Index j = 0; j < dim(); ++j) out << (j ? "," : "") << "x" << (j + 1);
    out << "\n";
    for (Index i = 0; i < size(); ++i) {
      for (Index j = 0; j < dim(); ++j) out << (j ? "," : "") << format_real(points_(i, j));
      out << "\n";
    }
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  Location point(Index i) const { return points_.row(i); }
  double distance(Index i, Index j) const { return (points_.row(i) - points_.row(j)).norm(); }
  const Eigen::MatrixXd& points() const { return points_; }

 private:
  static std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
  }
  static std::string trimmed(std::string s) {
    const auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
  }
  static double parse_double(const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(trimmed(s), &pos);
      if (pos != trimmed(s).size()) throw IoError("locations csv: bad number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw IoError("locations csv: bad number '" + s + "'");
    }
  }

  Eigen::MatrixXd points_;
};

// Smoothness is encoded by family choice (nu = 1/2, 3/2, 5/2, infinity); a
// continuous smoothness parameter would pull in Bessel functions for no
// benefit here.
enum class KernelFamily { exponential, matern32, matern52, gaussian };

inline std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::matern32: return "matern32";
    case KernelFamily::matern52: return "matern52";
    case KernelFamily::gaussian: return "gaussian";
  }
  return "?";
}

inline KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "exponential") return KernelFamily::exponential;
  if (s == "matern32") return KernelFamily::matern32;
  if (s == "matern52") return KernelFamily::matern52;
  if (s == "gaussian") return KernelFamily::gaussian;
  throw std::invalid_argument("unknown kernel family '" + s + "'");
}

struct KernelSpec {
  KernelFamily family;
  double sigma2;  // marginal variance
  double phi;     // range / decay

  KernelSpec(KernelFamily family_, double sigma2_, double phi_)
      : family(family_), sigma2(sigma2_), phi(phi_) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("KernelSpec: sigma2 must be > 0");
    if (!(phi > 0.0)) throw std::invalid_argument("KernelSpec: phi must be > 0");
  }
};

// Correlation rho(d) of the chosen family; rho(0) = 1 and rho decreases in d.
inline double correlation(const KernelSpec& k, double distance) {
  const double t = distance / k.phi;
  switch (k.family) {
    case KernelFamily::exponential:
      return std::exp(-t);
    case KernelFamily::matern32: {
      const double s = std::sqrt(3.0) * t;
      return (1.0 + s) * std::exp(-s);
    }
    case KernelFamily::matern52: {
      const double s = std::sqrt(5.0) * t;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
    case KernelFamily::gaussian:
      return std::exp(-t * t);
  }
  return 0.0;
}

// Nugget variance tau2 plus the noise-to-signal ratio delta2 = tau2/sigma2 of
// the paired kernel.
struct NoiseSpec {
  double tau2;
  double delta2;

  NoiseSpec(double tau2_, const KernelSpec& kernel) : tau2(tau2_), delta2(tau2_ / kernel.sigma2) {
    if (!(tau2 >= 0.0)) throw std::invalid_argument("NoiseSpec: tau2 must be >= 0");
  }
};

// The two inequalities that are necessary and sufficient for the 3x3
// unit-diagonal correlation matrix to be positive definite.
inline bool three_point_corr_valid(double rho12, double rho13, double rho23) {
  const double det = 1.0 - (rho12 * rho12 + rho13 * rho13 + rho23 * rho23) +
                     2.0 * rho12 * rho13 * rho23;
  return det > 0.0 && 1.0 - rho12 * rho12 > 0.0;
}

// Pairwise correlations of three points, validated on construction.
struct ThreePointCorr {
  double rho12;
  double rho13;
  double rho23;

  ThreePointCorr(double rho12_, double rho13_, double rho23_)
      : rho12(rho12_), rho13(rho13_), rho23(rho23_) {
    if (!(std::abs(rho12) < 1.0 && std::abs(rho13) < 1.0 && std::abs(rho23) < 1.0) ||
        !three_point_corr_valid(rho12, rho13, rho23)) {
      throw InvalidCorrelation("ThreePointCorr: (" + format_real(rho12) + ", " +
                               format_real(rho13) + ", " + format_real(rho23) +
                               ") is not a valid correlation triple");
    }
  }
};

inline SymMatrixd distance_matrix(const LocationSet& locs) {
  const Index n = locs.size();
  Eigen::MatrixXd d(n, n);
  for (Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = locs.distance(i, j);
  }
  return SymMatrixd(d);
}

// Covariance matrix sigma2 * rho(d_ij); the diagonal is set to sigma2 exactly.
inline SymMatrixd cov_matrix(const KernelSpec& kernel, const LocationSet& locs) {
  const Index n = locs.size();
  Eigen::MatrixXd c(n, n);
  for (Index i = 0; i < n; ++i) {
    c(i, i) = kernel.sigma2;
    for (Index j = i + 1; j < n; ++j) {
      c(i, j) = c(j, i) = kernel.sigma2 * correlation(kernel, locs.distance(i, j));
    }
  }
  return SymMatrixd(c);
}

// Unit-diagonal 3x3 correlation matrix of the triple; positive definite by
// the ThreePointCorr invariant.
inline SymMatrixd three_point_corr_matrix(const ThreePointCorr& c) {
  Eigen::Matrix3d r;
  r << 1.0, c.rho12, c.rho13,  //
      c.rho12, 1.0, c.rho23,   //
      c.rho13, c.rho23, 1.0;
  return SymMatrixd(r);
}

}  // namespace nngpkl
