#pragma once

// Reproducible experiment drivers binding the modules together: the
// hierarchical toy comparison, the three-point study with its zero-divergence
// special cases, the random-field study on the unit square behind the
// "latent tends to win" observation, and the shrinkage ensemble. Every driver
// is deterministic given its seeds; sweeps skip or record bad configurations
// instead of aborting.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nngpkl/analysis.hpp"
#include "nngpkl/covariance.hpp"
#include "nngpkl/divergence.hpp"
#include "nngpkl/format.hpp"
#include "nngpkl/models.hpp"
#include "nngpkl/rng.hpp"
#include "nngpkl/vecchia.hpp"

namespace nngpkl {

enum class Winner { response, latent, tie };

inline std::string to_string(Winner w) {
  switch (w) {
    case Winner::response: return "response";
    case Winner::latent: return "latent";
    case Winner::tie: return "tie";
  }
  return "?";
}

inline Winner winner_of(double kl_response, double kl_latent) {
  if (std::abs(kl_response - kl_latent) < kKlTieTolerance) return Winner::tie;
  return kl_response < kl_latent ? Winner::response : Winner::latent;
}

// One three-point configuration: both divergences from the parent model and
// which approximation came out closer.
struct ThreePointResult {
  double rho12;
  double rho13;
  double rho23;
  double delta2;
  double kl_response;
  double kl_latent;
  Winner winner;
};

// Parent covariance sigma2*R + tau2*I with tau2 = delta2*sigma2; candidate
// covariances from the closed forms. If rho13 = rho12*rho23/(1+delta2) the
// response divergence vanishes; if rho13 = rho12*rho23 the latent one does.
inline ThreePointResult run_three_point(const ThreePointCorr& corr, double sigma2, double delta2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("run_three_point: sigma2 must be > 0");
  if (!(delta2 >= 0.0)) throw std::invalid_argument("run_three_point: delta2 must be >= 0");
  const double tau2 = delta2 * sigma2;
  const GaussianModel parent = parent_model(sigma2 * three_point_corr_matrix(corr), tau2);
  const auto [sigma_response, sigma_latent] = three_point_closed_forms(sigma2, delta2, corr);
  ThreePointResult r;
  r.rho12 = corr.rho12;
  r.rho13 = corr.rho13;
  r.rho23 = corr.rho23;
  r.delta2 = delta2;
  r.kl_response = kl_gaussian(parent, GaussianModel::from_covariance(sigma_response));
  r.kl_latent = kl_gaussian(parent, GaussianModel::from_covariance(sigma_latent));
  r.winner = winner_of(r.kl_response, r.kl_latent);
  return r;
}

// Value lists whose cross product forms the three-point sweep.
struct SweepGrid {
  std::vector<double> rho12;
  std::vector<double> rho13;
  std::vector<double> rho23;
  std::vector<double> delta2;

  // Dense enough to exhibit wins for both models, small enough to run in
  // seconds.
  static SweepGrid default_grid() {
    const std::vector<double> rho = {-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9};
    return {rho, rho, rho, {0.1, 0.5, 1.0, 2.0}};
  }
};

struct SweepOutcome {
  std::vector<ThreePointResult> results;
  std::size_t skipped;  // grid points whose correlation triple is not valid
};

// Evaluates every valid grid point in lexicographic order (rho12 outermost,
// delta2 innermost); invalid triples are counted and skipped. sigma2 is fixed
// at 1: with zero means both divergences are invariant under a common scale.
inline SweepOutcome sweep_three_point(const SweepGrid& grid) {
  if (grid.rho12.empty() || grid.rho13.empty() || grid.rho23.empty() || grid.delta2.empty()) {
    throw std::invalid_argument("sweep_three_point: empty grid");
  }
  SweepOutcome out;
  out.skipped = 0;
  for (const double r12 : grid.rho12) {
    for (const double r13 : grid.rho13) {
      for (const double r23 : grid.rho23) {
        if (!(std::abs(r12) < 1.0 && std::abs(r13) < 1.0 && std::abs(r23) < 1.0) ||
            !three_point_corr_valid(r12, r13, r23)) {
          out.skipped += grid.delta2.size();
          continue;
        }
        const ThreePointCorr corr(r12, r13, r23);
        for (const double d2 : grid.delta2) {
          out.results.push_back(run_three_point(corr, 1.0, d2));
        }
      }
    }
  }
  return out;
}

// n points drawn uniformly on the unit square, deterministic per seed.
inline LocationSet random_locations(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd pts(n, 2);
  for (Index i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
  }
  return LocationSet(std::move(pts));
}

struct SeedComparison {
  std::uint64_t seed;
  double kl_response;
  double kl_latent;
  Winner winner;
};

struct StudySummary {
  std::size_t n_configs;
  std::size_t latent_wins;
  std::size_t response_wins;
  std::size_t ties;
  double mean_kl_response;
  double mean_kl_latent;
};

struct RandomStudy {
  std::vector<SeedComparison> per_seed;
  StudySummary summary;
};

// For each seed: locations on the unit square, coordinate ordering,
// m-nearest-predecessor DAG, both collapsed-space divergences from the
// parent. A fixed location set (e.g. read from CSV) replaces the per-seed
// draw when supplied, in which case every replicate sees the same points.
inline RandomStudy run_random_study(Index n, Index m, const KernelSpec& kernel, double tau2,
                                    std::size_t n_seeds, std::uint64_t seed0,
                                    const std::optional<LocationSet>& fixed_locations = {}) {
  if (n < 3) throw std::invalid_argument("run_random_study: n must be >= 3");
  if (m < 1) throw std::invalid_argument("run_random_study: m must be >= 1");
  if (n_seeds < 1) throw std::invalid_argument("run_random_study: n_seeds must be >= 1");
  if (!(tau2 >= 0.0)) throw std::invalid_argument("run_random_study: tau2 must be >= 0");

  RandomStudy study;
  study.per_seed.reserve(n_seeds);
  double sum_response = 0.0, sum_latent = 0.0;
  std::size_t latent_wins = 0, response_wins = 0, ties = 0;
  for (std::size_t k = 0; k < n_seeds; ++k) {
    const std::uint64_t seed = seed0 + k;
    try {
      const LocationSet locs = fixed_locations ? *fixed_locations : random_locations(n, seed);
      const Ordering ord = build_ordering(locs, CoordinateOrder{});
      const LocationSet ordered = reorder(locs, ord);
      const NeighborDag dag = build_neighbor_dag(locs, ord, m);
      const SymMatrixd c = cov_matrix(kernel, ordered);
      const ModelTriple models = model_triple(c, tau2, dag);
      SeedComparison row;
      row.seed = seed;
      row.kl_response = kl_gaussian(models.parent, models.response);
      row.kl_latent = kl_gaussian(models.parent, models.latent);
      row.winner = winner_of(row.kl_response, row.kl_latent);
      sum_response += row.kl_response;
      sum_latent += row.kl_latent;
      switch (row.winner) {
        case Winner::latent: ++latent_wins; break;
        case Winner::response: ++response_wins; break;
        case Winner::tie: ++ties; break;
      }
      study.per_seed.push_back(row);
    } catch (const Error& e) {
      throw Error("random study, seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  study.summary = {n_seeds,
                   latent_wins,
                   response_wins,
                   ties,
                   sum_response / static_cast<double>(n_seeds),
                   sum_latent / static_cast<double>(n_seeds)};
  return study;
}

struct ShrinkageConfig {
  Index n;
  Index m;
  double delta2;  // tau2 = delta2 * kernel.sigma2
  KernelSpec kernel;
  std::uint64_t seed;
};

struct ShrinkageRow {
  ShrinkageConfig config;
  bool ok;
  ShrinkageReport report;      // valid when ok
  double norm_k_error;         // || K^-1 - Ktilde^-1 ||_F, valid when ok
  std::string error;           // populated when !ok
};

// The default ensemble: n x m x delta2 x family, 256 configurations, each
// with its own location seed. The squared-exponential family runs at a
// shorter range: at phi = 0.3 its covariance is numerically near-singular by
// n = 100, which only measures round-off rather than the approximation.
inline std::vector<ShrinkageConfig> default_shrinkage_grid(std::uint64_t seed0 = 1000) {
  const std::vector<Index> ns = {10, 25, 50, 100};
  const std::vector<Index> ms = {1, 2, 5, 10};
  const std::vector<double> delta2s = {0.01, 0.1, 1.0, 10.0};
  const std::vector<KernelFamily> families = {KernelFamily::exponential, KernelFamily::matern32,
                                              KernelFamily::matern52, KernelFamily::gaussian};
  std::vector<ShrinkageConfig> grid;
  std::uint64_t seed = seed0;
  for (const Index n : ns)
    for (const Index m : ms)
      for (const double d2 : delta2s)
        for (const KernelFamily f : families) {
          const double phi = f == KernelFamily::gaussian ? 0.1 : 0.3;
          grid.push_back({n, m, d2, KernelSpec(f, 1.0, phi), seed++});
        }
  return grid;
}

// One report per configuration, in input order. Failures (e.g. a covariance
// that is numerically not positive definite) are recorded on the row and the
// study continues.
inline std::vector<ShrinkageRow> run_shrinkage_study(
    const std::vector<ShrinkageConfig>& grid,
    const std::optional<LocationSet>& fixed_locations = {}) {
  std::vector<ShrinkageRow> rows;
  rows.reserve(grid.size());
  for (const ShrinkageConfig& config : grid) {
    ShrinkageRow row{config, false, {}, 0.0, ""};
    try {
      const LocationSet locs =
          fixed_locations ? *fixed_locations : random_locations(config.n, config.seed);
      row.config.n = locs.size();
      const Ordering ord = build_ordering(locs, CoordinateOrder{});
      const LocationSet ordered = reorder(locs, ord);
      const NeighborDag dag = build_neighbor_dag(locs, ord, config.m);
      const SymMatrixd c = cov_matrix(config.kernel, ordered);
      const double tau2 = config.delta2 * config.kernel.sigma2;
      row.report = shrinkage_report(c, tau2, dag);
      row.norm_k_error = response_error_norm(c, tau2, dag);
      row.ok = true;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- Text output -----------------------------------------------------------
//
// All numbers go through format_real (17 significant digits), so output is
// byte-identical across runs and parses back to the exact double.

inline const char* three_point_csv_header() {
  return "rho12,rho13,rho23,delta2,kl_response,kl_latent,winner";
}

inline void write_three_point_csv_row(std::ostream& out, const ThreePointResult& r) {
  out << format_real(r.rho12) << ',' << format_real(r.rho13) << ',' << format_real(r.rho23) << ','
      << format_real(r.delta2) << ',' << format_real(r.kl_response) << ','
      << format_real(r.kl_latent) << ',' << to_string(r.winner) << '\n';
}

inline void write_sweep_csv(std::ostream& out, const SweepOutcome& sweep) {
  out << three_point_csv_header() << '\n';
  for (const ThreePointResult& r : sweep.results) write_three_point_csv_row(out, r);
}

inline void write_random_study_csv(std::ostream& out, const RandomStudy& study) {
  out << "seed,kl_response,kl_latent,winner\n";
  for (const SeedComparison& row : study.per_seed) {
    out << row.seed << ',' << format_real(row.kl_response) << ',' << format_real(row.kl_latent)
        << ',' << to_string(row.winner) << '\n';
  }
}

inline std::string study_summary_json(const StudySummary& s) {
  std::string json = "{";
  json += "\"n_configs\": " + std::to_string(s.n_configs);
  json += ", \"latent_wins\": " + std::to_string(s.latent_wins);
  json += ", \"response_wins\": " + std::to_string(s.response_wins);
  json += ", \"ties\": " + std::to_string(s.ties);
  json += ", \"mean_kl_response\": " + format_real(s.mean_kl_response);
  json += ", \"mean_kl_latent\": " + format_real(s.mean_kl_latent);
  json += "}";
  return json;
}

inline const char* shrinkage_csv_header() {
  return "n,m,delta2,kernel,norm_e,norm_b,norm_delta,norm_remainder,ratio_shrink,"
         "ratio_remainder,norm_k_error,bound_holds";
}

inline void write_shrinkage_csv_row(std::ostream& out, const ShrinkageRow& row) {
  out << row.config.n << ',' << row.config.m << ',' << format_real(row.config.delta2) << ','
      << to_string(row.config.kernel.family) << ',' << format_real(row.report.norm_e) << ','
      << format_real(row.report.norm_b) << ',' << format_real(row.report.norm_delta) << ','
      << format_real(row.report.norm_remainder) << ',' << format_real(row.report.ratio_shrink)
      << ',' << format_real(row.report.ratio_remainder) << ',' << format_real(row.norm_k_error)
      << ',' << (row.report.bound_holds ? "true" : "false") << '\n';
}

inline std::string kl_report_csv(const KlReport& r) {
  std::string out = "kl_joint_q1,kl_joint_q2,kl_marginal_q1,kl_marginal_q2,joint_order,"
                    "marginal_order\n";
  out += format_real(r.kl_joint_q1) + "," + format_real(r.kl_joint_q2) + "," +
         format_real(r.kl_marginal_q1) + "," + format_real(r.kl_marginal_q2) + "," +
         to_string(r.joint_order) + "," + to_string(r.marginal_order) + "\n";
  return out;
}

inline std::string kl_report_json(const KlReport& r) {
  std::string json = "{";
  json += "\"kl_joint_q1\": " + format_real(r.kl_joint_q1);
  json += ", \"kl_joint_q2\": " + format_real(r.kl_joint_q2);
  json += ", \"kl_marginal_q1\": " + format_real(r.kl_marginal_q1);
  json += ", \"kl_marginal_q2\": " + format_real(r.kl_marginal_q2);
  json += ", \"joint_order\": \"" + to_string(r.joint_order) + "\"";
  json += ", \"marginal_order\": \"" + to_string(r.marginal_order) + "\"";
  json += "}\n";
  return json;
}

}  // namespace nngpkl
