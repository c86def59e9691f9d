// pwca: train, evaluate and compare pairwise cluster analysis models, build
// synthetic aligned corpora, and compute PAC-Bayes bound diagnostics.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
// Errors are printed to stderr as one line: ERROR:<code>:<message>

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pwca/pwca_all.hpp"

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
  std::vector<std::string> views;
  std::string method = "pwca";
  double tau = 0.01;
  std::int64_t k = 100;
  std::string kernel = "linear";
  double bandwidth = 1.0;
  bool center = false;
  std::string out;
};

struct EvalArgs {
  std::string model;
  std::vector<std::string> test;
  int query_view = 0;
  int target_view = 1;
  std::string report;
  std::string csv;
  std::uint64_t seed = 0;
};

struct CompareArgs {
  std::vector<std::string> train;
  std::vector<std::string> test;
  double tau = 0.01;
  std::int64_t k = 100;
  std::string kernel = "linear";
  double bandwidth = 1.0;
  bool center = false;
  std::uint64_t seed = 0;
  std::string out;
};

struct SynthArgs {
  std::int64_t l = 700;
  int views = 2;
  std::int64_t latent = 20;
  std::string dims;
  double sigma = 0.1;
  std::uint64_t seed = 7;
  std::string out;
  std::int64_t train_rows = 0;
  std::int64_t test_rows = 0;
  std::uint64_t split_seed = 0;
  bool split_seed_set = false;
};

struct BoundArgs {
  std::int64_t n = 100;
  double delta = 0.05;
  double kl = 0.0;
  double q_emp = 0.0;
  std::string json;
};

struct GridArgs {
  std::int64_t cells = 5;
  std::string samples;
  double epsilon = 0.0;
  double delta = 0.05;
  std::string json;
  std::string csv;
};

pwca::KernelSpec make_spec(const std::string& kernel, double bandwidth, bool center) {
  pwca::KernelSpec spec;
  spec.kind = pwca::kernel_kind_from_name(kernel);
  spec.bandwidth = bandwidth;
  spec.center = center;
  spec.validate();
  return spec;
}

std::vector<pwca::ViewMatrix> load_views(const std::vector<std::string>& paths) {
  std::vector<pwca::ViewMatrix> views;
  views.reserve(paths.size());
  for (const auto& p : paths) views.push_back(pwca::load_view(p));
  return views;
}

int run_train(const TrainArgs& a) {
  if (a.views.size() < 2) throw pwca::UsageError("train: need at least two --views files");
  if (!(a.tau > 0.0)) throw pwca::UsageError("train: --tau must be > 0");
  if (a.k < 1) throw pwca::UsageError("train: --k must be >= 1");
  const auto spec = make_spec(a.kernel, a.bandwidth, a.center);
  const auto views = load_views(a.views);
  pwca::PwcaModel model;
  if (a.method == "pwca")
    model = pwca::train_pwca(views, spec, a.tau, a.k);
  else if (a.method == "kcca")
    model = pwca::train_kcca(views, spec, a.tau, a.k);
  else
    throw pwca::UsageError("train: --method must be pwca or kcca");
  model.train_view_paths = a.views;
  pwca::save_model(model, a.out);
  std::cout << "trained " << a.method << " model: s=" << model.s << " l=" << model.l
            << " k=" << model.k << " -> " << a.out << "\n";
  return 0;
}

int run_eval(const EvalArgs& a) {
  if (a.test.size() < 2) throw pwca::UsageError("eval: need at least two --test files");
  const auto model = pwca::load_model(a.model);
  const auto test_views = load_views(a.test);
  const auto rep = pwca::mate_retrieval(model, test_views, a.query_view, a.target_view, a.seed);
  pwca::write_text_file(a.report, pwca::report_to_json(rep));
  if (!a.csv.empty()) pwca::write_text_file(a.csv, pwca::ranks_to_csv(rep));
  std::cout << "ap=" << pwca::fmt17(rep.ap) << " n_queries=" << rep.n_queries
            << " random_baseline=" << pwca::fmt17(pwca::expected_random_ap(rep.n_queries))
            << " -> " << a.report << "\n";
  return 0;
}

int run_compare(const CompareArgs& a) {
  if (a.train.size() < 2 || a.test.size() != a.train.size())
    throw pwca::UsageError("compare: --train and --test must list the same views");
  if (!(a.tau > 0.0)) throw pwca::UsageError("compare: --tau must be > 0");
  const auto spec = make_spec(a.kernel, a.bandwidth, a.center);
  const auto train_views = load_views(a.train);
  const auto test_views = load_views(a.test);
  const int s = static_cast<int>(train_views.size());

  std::vector<pwca::RetrievalReport> reports;
  for (const auto method : {pwca::Method::pwca, pwca::Method::kcca}) {
    const auto model = (method == pwca::Method::pwca)
                           ? pwca::train_pwca(train_views, spec, a.tau, a.k)
                           : pwca::train_kcca(train_views, spec, a.tau, a.k);
    for (int q = 0; q < s; ++q)
      for (int t = 0; t < s; ++t)
        if (q != t) reports.push_back(pwca::mate_retrieval(model, test_views, q, t, a.seed));
  }
  // k can differ between the two trained models after component dropping;
  // the table requires one configuration, so report the requested k.
  for (auto& r : reports) r.k = a.k;
  const std::string table = pwca::emit_comparison_table(reports);
  pwca::write_text_file(a.out, table);
  std::cout << table;
  return 0;
}

int run_synth(const SynthArgs& a) {
  pwca::SyntheticConfig cfg;
  cfg.l_total = a.l;
  cfg.s = a.views;
  cfg.latent_dim = a.latent;
  cfg.sigma = a.sigma;
  cfg.seed = a.seed;
  std::stringstream ds(a.dims);
  std::string tok;
  while (std::getline(ds, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      cfg.dims.push_back(std::stol(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw pwca::UsageError("synth: bad --dims entry '" + tok + "'");
    }
  }
  const auto dataset = pwca::synth_generate(cfg);

  fs::create_directories(a.out);
  auto write_set = [&](const pwca::AlignedDataset& set, const std::string& prefix,
                       std::uint64_t seed) {
    std::vector<std::string> paths;
    for (std::size_t v = 0; v < set.views.size(); ++v) {
      const std::string p = (fs::path(a.out) / (prefix + "view" + std::to_string(v) + ".mtx")).string();
      pwca::save_view(set.views[v], p);
      paths.push_back(p);
    }
    pwca::write_text_file((fs::path(a.out) / (prefix + "manifest.json")).string(),
                          pwca::manifest_to_json(paths, set.names, seed));
  };

  if (a.train_rows > 0 || a.test_rows > 0) {
    if (a.train_rows < 1 || a.test_rows < 1)
      throw pwca::UsageError("synth: --train-rows and --test-rows must both be set");
    pwca::SplitSpec sp;
    sp.n_train = a.train_rows;
    sp.n_test = a.test_rows;
    sp.seed = a.split_seed_set ? a.split_seed : a.seed;
    const auto [train, test] = pwca::split(dataset, sp);
    write_set(train, "train_", a.seed);
    write_set(test, "test_", a.seed);
    std::cout << "wrote " << a.views << " views, " << a.train_rows << "/" << a.test_rows
              << " train/test rows under " << a.out << "\n";
  } else {
    write_set(dataset, "", a.seed);
    std::cout << "wrote " << a.views << " views, " << a.l << " rows under " << a.out << "\n";
  }
  return 0;
}

int run_bound(const BoundArgs& a) {
  const double rhs = pwca::pac_bound_rhs(a.n, a.delta, a.kl);
  const double upper = pwca::kl_inverse_upper(a.q_emp, rhs);
  std::ostringstream os;
  os << "{\"kl_qp\": " << pwca::fmt17(a.kl) << ", \"rhs\": " << pwca::fmt17(rhs)
     << ", \"risk_upper_bound\": " << pwca::fmt17(upper) << "}\n";
  if (a.json.empty())
    std::cout << os.str();
  else
    pwca::write_text_file(a.json, os.str());
  return 0;
}

// Sample file for grid-demo: one "z,y" pair per line, no header.
std::vector<std::pair<double, double>> load_samples_csv(const std::string& path) {
  std::istringstream in(pwca::read_text_file(path));
  std::vector<std::pair<double, double>> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double z = 0.0, y = 0.0;
    char comma = 0;
    ls >> z >> comma >> y;
    if (ls.fail() || comma != ',')
      throw pwca::ParseError(path + ":" + std::to_string(lineno) + ": expected 'z,y'");
    samples.push_back({z, y});
  }
  if (samples.empty()) throw pwca::EmptyInput(path + ": no samples");
  return samples;
}

int run_grid_demo(const GridArgs& a) {
  const auto samples = load_samples_csv(a.samples);
  double zlo = samples[0].first, zhi = samples[0].first;
  double ylo = samples[0].second, yhi = samples[0].second;
  for (const auto& [z, y] : samples) {
    zlo = std::min(zlo, z);
    zhi = std::max(zhi, z);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
  }
  // degenerate ranges get a unit pad so the grid is well formed
  if (!(zhi > zlo)) zhi = zlo + 1.0;
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  auto edges = [&](double lo, double hi) {
    std::vector<double> e(static_cast<std::size_t>(a.cells) + 1);
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(a.cells);
    return e;
  };
  const pwca::GridHypothesisSpace grid(edges(zlo, zhi), edges(ylo, yhi));
  const auto risks = pwca::grid_risks(grid, samples);
  const auto q = pwca::realizable_q(risks, a.epsilon);
  const auto uniform = pwca::DiscreteDistribution::uniform(grid.n_hypotheses());
  const double kl_qp = pwca::discrete_kl(q, uniform);

  std::ostringstream js;
  js << "{\"kl_qp\": " << pwca::fmt17(kl_qp) << ", \"rhs\": ";
  if (risks.n >= 8) {
    const double rhs = pwca::pac_bound_rhs(risks.n, a.delta, kl_qp);
    const double upper = pwca::kl_inverse_upper(pwca::expected_risk(q, risks), rhs);
    js << pwca::fmt17(rhs) << ", \"risk_upper_bound\": " << pwca::fmt17(upper);
  } else {
    js << "null, \"risk_upper_bound\": null";
  }
  js << "}\n";

  std::ostringstream csv;
  csv << "hypothesis,z_cell,y_cell,risk,weight\n";
  for (Eigen::Index iz = 0; iz < grid.cells_z(); ++iz)
    for (Eigen::Index iy = 0; iy < grid.cells_y(); ++iy) {
      const Eigen::Index h = grid.hypothesis_index(iz, iy);
      csv << h << "," << iz << "," << iy << "," << pwca::fmt17(risks.risk(h)) << ","
          << pwca::fmt17(q.w(h)) << "\n";
    }

  if (a.json.empty())
    std::cout << js.str();
  else
    pwca::write_text_file(a.json, js.str());
  if (!a.csv.empty()) pwca::write_text_file(a.csv, csv.str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairwise cluster analysis toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train a pwca or kcca model on aligned views");
  train->add_option("--views", train_args.views, "aligned view files, one per view (>= 2)")
      ->required()
      ->expected(-2);
  train->add_option("--method", train_args.method, "pwca or kcca")->capture_default_str();
  train->add_option("--tau", train_args.tau, "regularization (> 0)")->capture_default_str();
  train->add_option("--k", train_args.k, "retained components")->capture_default_str();
  train->add_option("--kernel", train_args.kernel, "linear or rbf")->capture_default_str();
  train->add_option("--bandwidth", train_args.bandwidth, "rbf bandwidth")->capture_default_str();
  train->add_flag("--center", train_args.center, "double-center the kernels");
  train->add_option("--out", train_args.out, "output model JSON")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "mate-retrieval evaluation of a trained model");
  eval->add_option("--model", eval_args.model, "model JSON from train")->required();
  eval->add_option("--test", eval_args.test, "aligned test view files")->required()->expected(-2);
  eval->add_option("--query-view", eval_args.query_view, "query view index")->capture_default_str();
  eval->add_option("--target-view", eval_args.target_view, "target view index")
      ->capture_default_str();
  eval->add_option("--report", eval_args.report, "output report JSON")->required();
  eval->add_option("--csv", eval_args.csv, "optional per-query rank CSV");
  eval->add_option("--seed", eval_args.seed, "provenance seed recorded in the report")
      ->capture_default_str();

  CompareArgs cmp_args;
  auto* cmp = app.add_subcommand("compare", "run pwca and kcca on one dataset, emit AP table");
  cmp->add_option("--train", cmp_args.train, "aligned training view files")->required()->expected(-2);
  cmp->add_option("--test", cmp_args.test, "aligned test view files")->required()->expected(-2);
  cmp->add_option("--tau", cmp_args.tau, "regularization (> 0)")->capture_default_str();
  cmp->add_option("--k", cmp_args.k, "retained components")->capture_default_str();
  cmp->add_option("--kernel", cmp_args.kernel, "linear or rbf")->capture_default_str();
  cmp->add_option("--bandwidth", cmp_args.bandwidth, "rbf bandwidth")->capture_default_str();
  cmp->add_flag("--center", cmp_args.center, "double-center the kernels");
  cmp->add_option("--seed", cmp_args.seed, "provenance seed recorded in the table")
      ->capture_default_str();
  cmp->add_option("--out", cmp_args.out, "output CSV table")->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "generate a synthetic aligned corpus");
  synth->add_option("--l", synth_args.l, "total aligned samples")->capture_default_str();
  synth->add_option("--views", synth_args.views, "number of views")->capture_default_str();
  synth->add_option("--latent", synth_args.latent, "latent dimension")->capture_default_str();
  synth->add_option("--dims", synth_args.dims, "per-view feature dims, comma separated")
      ->required();
  synth->add_option("--sigma", synth_args.sigma, "noise level (>= 0)")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "generator seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "output directory")->required();
  synth->add_option("--train-rows", synth_args.train_rows,
                    "write a seeded train/test split with this many training rows")
      ->capture_default_str();
  synth->add_option("--test-rows", synth_args.test_rows, "test rows for the split")
      ->capture_default_str();
  synth->add_option("--split-seed", synth_args.split_seed, "split permutation seed (default: --seed)")
      ->each([&](const std::string&) { synth_args.split_seed_set = true; });

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "PAC-Bayes bound right-hand side and risk bound");
  bound->add_option("--n", bound_args.n, "sample count (>= 8)")->capture_default_str();
  bound->add_option("--delta", bound_args.delta, "confidence level in (0,1)")
      ->capture_default_str();
  bound->add_option("--kl", bound_args.kl, "KL(Q,P) between posterior and prior weighting")
      ->capture_default_str();
  bound->add_option("--q-emp", bound_args.q_emp, "Q-average empirical risk")->capture_default_str();
  bound->add_option("--json", bound_args.json, "write JSON here instead of stdout");

  GridArgs grid_args;
  auto* grid = app.add_subcommand("grid-demo", "interval-grid clustering diagnostics");
  grid->add_option("--cells", grid_args.cells, "cells per domain")->capture_default_str();
  grid->add_option("--samples", grid_args.samples, "CSV of z,y sample pairs")->required();
  grid->add_option("--epsilon", grid_args.epsilon, "risk tolerance for the realizable set")
      ->capture_default_str();
  grid->add_option("--delta", grid_args.delta, "confidence level for the bound")
      ->capture_default_str();
  grid->add_option("--json", grid_args.json, "write JSON here instead of stdout");
  grid->add_option("--csv", grid_args.csv, "write per-hypothesis risks/weights CSV here");

  try {
    app.parse(argc, argv);
    if (train->parsed()) return run_train(train_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (cmp->parsed()) return run_compare(cmp_args);
    if (synth->parsed()) return run_synth(synth_args);
    if (bound->parsed()) return run_bound(bound_args);
    if (grid->parsed()) return run_grid_demo(grid_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help
    std::cerr << "ERROR:1:" << e.what() << "\n";
    return 1;
  } catch (const pwca::UsageError& e) {
    std::cerr << "ERROR:1:" << e.what() << "\n";
    return 1;
  } catch (const pwca::NumericalError& e) {
    std::cerr << "ERROR:3:" << e.what() << "\n";
    return 3;
  } catch (const pwca::DataError& e) {
    std::cerr << "ERROR:2:" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR:2:" << e.what() << "\n";
    return 2;
  }
}
