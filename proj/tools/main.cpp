// Experiment CLI. Subcommands:
//   toy           hierarchical two-variable comparison, joint vs collapsed
//   three-point   one three-point configuration
//   sweep         three-point grid sweep to CSV
//   random-study  seeded random-field comparison on the unit square
//   shrinkage     error-shrinkage report(s) to CSV
// Exit codes: 0 success, 2 invalid arguments or input files, 3 numerical
// failure (offending configuration on stderr).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nngpkl/experiments.hpp"

namespace {

using nngpkl::Index;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw nngpkl::IoError("cannot open output file '" + path + "'");
  return out;
}

nngpkl::SweepGrid load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw nngpkl::IoError("cannot open grid file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw nngpkl::IoError("grid file '" + path + "': " + e.what());
  }
  const auto values = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty()) {
      throw nngpkl::IoError("grid file '" + path + "': need a nonempty array '" +
                            std::string(key) + "'");
    }
    return j[key].get<std::vector<double>>();
  };
  return {values("rho12"), values("rho13"), values("rho23"), values("delta2")};
}

std::optional<nngpkl::LocationSet> load_locations(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return nngpkl::LocationSet::from_csv_file(path);
}

struct ToyOptions {
  int variant = 1;
  std::string format = "csv";
};

struct ThreePointOptions {
  double rho12 = 0.0, rho13 = 0.0, rho23 = 0.0, delta2 = 0.0, sigma2 = 1.0;
};

struct SweepOptions {
  std::string grid_file;
  std::string out;
};

struct RandomStudyOptions {
  Index n = 100;
  Index m = 5;
  std::string kernel = "exponential";
  double sigma2 = 1.0, phi = 0.3, tau2 = 0.1;
  std::size_t seeds = 50;
  std::uint64_t seed0 = 1;
  std::string out;
  std::string locations;
};

struct ShrinkageOptions {
  Index n = 50;
  Index m = 5;
  double tau2 = 0.1;
  std::string kernel = "exponential";
  double sigma2 = 1.0, phi = 0.3;
  std::uint64_t seed = 1;
  bool ensemble = false;
  std::string out;
  std::string locations;
};

int run_toy(const ToyOptions& opt) {
  const nngpkl::KlReport report = nngpkl::toy_example(
      opt.variant == 1 ? nngpkl::ToyVariant::one : nngpkl::ToyVariant::two);
  std::cout << (opt.format == "json" ? nngpkl::kl_report_json(report)
                                     : nngpkl::kl_report_csv(report));
  return 0;
}

int run_three_point(const ThreePointOptions& opt) {
  const nngpkl::ThreePointCorr corr(opt.rho12, opt.rho13, opt.rho23);
  const nngpkl::ThreePointResult result = nngpkl::run_three_point(corr, opt.sigma2, opt.delta2);
  std::cout << nngpkl::three_point_csv_header() << '\n';
  nngpkl::write_three_point_csv_row(std::cout, result);
  return 0;
}

int run_sweep(const SweepOptions& opt) {
  const nngpkl::SweepGrid grid =
      opt.grid_file.empty() ? nngpkl::SweepGrid::default_grid() : load_grid_file(opt.grid_file);
  const nngpkl::SweepOutcome outcome = nngpkl::sweep_three_point(grid);
  if (opt.out.empty()) {
    nngpkl::write_sweep_csv(std::cout, outcome);
  } else {
    std::ofstream out = open_output(opt.out);
    nngpkl::write_sweep_csv(out, outcome);
  }
  std::cerr << "sweep: " << outcome.results.size() << " configurations, " << outcome.skipped
            << " invalid grid points skipped\n";
  return 0;
}

int run_random_study(const RandomStudyOptions& opt) {
  const nngpkl::KernelSpec kernel(nngpkl::kernel_family_from_string(opt.kernel), opt.sigma2,
                                  opt.phi);
  const std::optional<nngpkl::LocationSet> locs = load_locations(opt.locations);
  const nngpkl::RandomStudy study =
      nngpkl::run_random_study(locs ? locs->size() : opt.n, opt.m, kernel, opt.tau2, opt.seeds,
                               opt.seed0, locs);
  if (opt.out.empty()) {
    nngpkl::write_random_study_csv(std::cout, study);
  } else {
    std::ofstream out = open_output(opt.out);
    nngpkl::write_random_study_csv(out, study);
  }
  std::cout << nngpkl::study_summary_json(study.summary) << '\n';
  return 0;
}

int run_shrinkage(const ShrinkageOptions& opt) {
  const std::optional<nngpkl::LocationSet> locs = load_locations(opt.locations);
  std::vector<nngpkl::ShrinkageConfig> grid;
  if (opt.ensemble) {
    grid = nngpkl::default_shrinkage_grid();
  } else {
    const nngpkl::KernelSpec kernel(nngpkl::kernel_family_from_string(opt.kernel), opt.sigma2,
                                    opt.phi);
    grid.push_back({opt.n, opt.m, opt.tau2 / kernel.sigma2, kernel, opt.seed});
  }
  const std::vector<nngpkl::ShrinkageRow> rows = nngpkl::run_shrinkage_study(grid, locs);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!opt.out.empty()) {
    file = open_output(opt.out);
    out = &file;
  }
  *out << nngpkl::shrinkage_csv_header() << '\n';
  std::size_t failures = 0;
  for (const nngpkl::ShrinkageRow& row : rows) {
    if (row.ok) {
      nngpkl::write_shrinkage_csv_row(*out, row);
    } else {
      ++failures;
      std::cerr << "shrinkage: config n=" << row.config.n << " m=" << row.config.m
                << " delta2=" << nngpkl::format_real(row.config.delta2)
                << " kernel=" << nngpkl::to_string(row.config.kernel.family) << " failed: "
                << row.error << '\n';
    }
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vecchia/NNGP approximations of a Gaussian process and exact KL comparisons"};
  app.require_subcommand(1);

  ToyOptions toy;
  CLI::App* toy_cmd = app.add_subcommand("toy", "Hierarchical two-variable KL comparison");
  toy_cmd->add_option("--variant", toy.variant, "Candidate pair variant")
      ->required()
      ->check(CLI::IsMember({1, 2}));
  toy_cmd->add_option("--format", toy.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  ThreePointOptions three;
  CLI::App* three_cmd = app.add_subcommand("three-point", "Single three-point configuration");
  three_cmd->add_option("--rho12", three.rho12)->required();
  three_cmd->add_option("--rho13", three.rho13)->required();
  three_cmd->add_option("--rho23", three.rho23)->required();
  three_cmd->add_option("--delta2", three.delta2, "Noise-to-signal ratio tau2/sigma2")
      ->required()
      ->check(CLI::NonNegativeNumber);
  three_cmd->add_option("--sigma2", three.sigma2)->check(CLI::PositiveNumber);

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Three-point grid sweep to CSV");
  sweep_cmd->add_option("--grid-file", sweep.grid_file,
                        "JSON file with value arrays rho12, rho13, rho23, delta2");
  sweep_cmd->add_option("--out", sweep.out, "Output CSV path (default: stdout)");

  RandomStudyOptions random_study;
  CLI::App* random_cmd =
      app.add_subcommand("random-study", "Seeded random-field KL comparison on the unit square");
  random_cmd->add_option("--n", random_study.n, "Points per replicate")->check(CLI::Range(3, 1000));
  random_cmd->add_option("--m", random_study.m, "Neighbors")->check(CLI::PositiveNumber);
  random_cmd->add_option("--kernel", random_study.kernel)
      ->check(CLI::IsMember({"exponential", "matern32", "matern52", "gaussian"}));
  random_cmd->add_option("--sigma2", random_study.sigma2)->check(CLI::PositiveNumber);
  random_cmd->add_option("--phi", random_study.phi)->check(CLI::PositiveNumber);
  random_cmd->add_option("--tau2", random_study.tau2)->check(CLI::NonNegativeNumber);
  random_cmd->add_option("--seeds", random_study.seeds, "Number of replicates")
      ->check(CLI::PositiveNumber);
  random_cmd->add_option("--seed0", random_study.seed0, "First seed");
  random_cmd->add_option("--out", random_study.out, "Per-seed CSV path (default: stdout)");
  random_cmd->add_option("--locations", random_study.locations,
                         "CSV of fixed locations instead of per-seed draws");

  ShrinkageOptions shrinkage;
  CLI::App* shrinkage_cmd = app.add_subcommand("shrinkage", "Error-shrinkage reports to CSV");
  shrinkage_cmd->add_option("--n", shrinkage.n)->check(CLI::Range(2, 1000));
  shrinkage_cmd->add_option("--m", shrinkage.m)->check(CLI::NonNegativeNumber);
  shrinkage_cmd->add_option("--tau2", shrinkage.tau2)->check(CLI::NonNegativeNumber);
  shrinkage_cmd->add_option("--kernel", shrinkage.kernel)
      ->check(CLI::IsMember({"exponential", "matern32", "matern52", "gaussian"}));
  shrinkage_cmd->add_option("--sigma2", shrinkage.sigma2)->check(CLI::PositiveNumber);
  shrinkage_cmd->add_option("--phi", shrinkage.phi)->check(CLI::PositiveNumber);
  shrinkage_cmd->add_option("--seed", shrinkage.seed, "Location seed");
  shrinkage_cmd->add_flag("--ensemble", shrinkage.ensemble,
                          "Run the full default configuration grid");
  shrinkage_cmd->add_option("--out", shrinkage.out, "Output CSV path (default: stdout)");
  shrinkage_cmd->add_option("--locations", shrinkage.locations,
                            "CSV of fixed locations instead of seeded draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (toy_cmd->parsed()) return run_toy(toy);
    if (three_cmd->parsed()) return run_three_point(three);
    if (sweep_cmd->parsed()) return run_sweep(sweep);
    if (random_cmd->parsed()) return run_random_study(random_study);
    if (shrinkage_cmd->parsed()) return run_shrinkage(shrinkage);
  } catch (const nngpkl::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nngpkl::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
