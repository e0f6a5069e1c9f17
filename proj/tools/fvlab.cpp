#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#ifdef FVLAB_HAVE_OPENMP
#include <omp.h>
#endif

#include "fvlab/experiment.hpp"

namespace {

using fvlab::Json;
using fvlab::Vec;

void apply_thread_cap() {
#ifdef FVLAB_HAVE_OPENMP
  if (const char* cap = std::getenv("FVLAB_THREADS")) {
    int threads = std::atoi(cap);
    if (threads > 0) omp_set_num_threads(threads);
  }
#endif
}

Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Json mat_to_json(const fvlab::Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Vec load_function_file(const std::string& path, int expected) {
  std::ifstream in(path);
  if (!in) throw fvlab::ParseError("cannot open function file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc = nlohmann::json::parse(buf.str());
  if (doc.is_object() && doc.contains("values")) doc = doc["values"];
  if (!doc.is_array() || static_cast<int>(doc.size()) != expected)
    throw fvlab::ParseError("function file must be an array of |D| numbers");
  Vec f(expected);
  for (int i = 0; i < expected; ++i) f(i) = doc[i].get<double>();
  return f;
}

int cmd_qsd(const std::string& chain_path, bool csv) {
  auto chain = fvlab::load_chain(chain_path);
  auto spec = fvlab::solve_qsd(chain);
  if (csv) {
    std::cout << "state,weight\n";
    for (int i = 0; i < chain.k(); ++i)
      std::cout << chain.domain[i] << ',' << spec.pi(i) << "\n";
    return 0;
  }
  Json out;
  out["schema_version"] = 1;
  out["lambda"] = spec.lambda;
  out["gamma"] = std::isinf(spec.gamma) ? Json("inf") : Json(spec.gamma);
  out["pi"] = vec_to_json(spec.pi);
  out["perron_residual"] = spec.perron_residual;
  out["pi_q_residual"] = std::abs(spec.pi.dot(chain.q) - spec.lambda);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_covariance(const std::string& chain_path, const std::string& f_path,
                   const std::string& route, double tol_quad) {
  auto chain = fvlab::load_chain(chain_path);
  auto spec = fvlab::solve_qsd(chain);
  fvlab::ReducedBasis basis(spec.pi);

  Json out;
  out["schema_version"] = 1;
  if (basis.dim() == 0) {
    out["K"] = Json::array();
    out["note"] = "one-state domain, K is the zero operator";
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  auto pr = fvlab::build_pi_return(chain, spec);
  auto K = fvlab::covariance_lyapunov(pr);

  std::vector<Vec> directions;
  if (!f_path.empty()) {
    Vec f = load_function_file(f_path, chain.k());
    f = fvlab::project_zero_mean(f, spec.pi);
    directions.push_back(f);
  } else {
    directions = fvlab::test_directions(pr, K, 5, 7);
  }

  bool do_lyap = route == "both" || route == "lyapunov";
  bool do_integral = route == "both" || route == "integral";
  if (do_lyap) {
    out["K_lyapunov"] = mat_to_json(K.reduced);
    out["lyapunov_residual"] = K.residual;
  }
  Json per_f = Json::array();
  bool all_ok = true;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    Json entry;
    entry["f"] = vec_to_json(directions[d]);
    double lyap = 0.0, integral = 0.0;
    if (do_lyap) {
      lyap = fvlab::quadratic_form(K, basis, directions[d]);
      entry["lyapunov"] = lyap;
    }
    if (do_integral) {
      auto value = fvlab::covariance_integral(pr, directions[d], tol_quad);
      integral = value.value;
      entry["integral"] = integral;
      entry["integral_pi_route"] = value.value_pi_route;
    }
    if (do_lyap && do_integral) {
      double delta = std::abs(lyap - integral);
      bool ok = delta <= fvlab::tol::route_agreement * (1.0 + std::abs(lyap));
      entry["delta"] = delta;
      entry["pass"] = ok;
      all_ok = all_ok && ok;
    }
    per_f.push_back(entry);
  }
  out["per_f"] = per_f;
  if (do_lyap && do_integral) out["routes_agree"] = all_ok;
  std::cout << out.dump(2) << "\n";
  return all_ok ? 0 : 2;
}

int cmd_simulate(const std::string& chain_path, const fvlab::SimParams& params,
                 const std::string& out_path) {
  auto chain = fvlab::load_chain(chain_path);
  auto spec = fvlab::solve_qsd(chain);
  auto samples = fvlab::sample_stationary(chain, spec, params);

  std::ostringstream csv;
  for (int i = 0; i < chain.k(); ++i) csv << (i ? "," : "") << chain.domain[i];
  csv << "\n";
  for (const auto& eta : samples) {
    for (int i = 0; i < chain.k(); ++i) csv << (i ? "," : "") << eta.counts[i];
    csv << "\n";
  }
  if (out_path.empty())
    std::cout << csv.str();
  else
    fvlab::write_text_file(out_path, csv.str());
  return 0;
}

int cmd_ou(const std::string& chain_path, double dt, double t_end, std::uint64_t seed,
           const std::string& out_path) {
  auto chain = fvlab::load_chain(chain_path);
  auto spec = fvlab::solve_qsd(chain);
  fvlab::ReducedBasis basis(spec.pi);
  std::ostringstream csv;
  csv << "time";
  for (int i = 0; i < basis.dim(); ++i) csv << ",xi" << i + 1;
  csv << "\n";
  if (basis.dim() > 0) {
    auto pr = fvlab::build_pi_return(chain, spec);
    auto B0 = fvlab::drift_operator(pr);
    auto decomp = fvlab::diagonalize_symmetric(fvlab::diffusion_operator(pr));
    auto states = fvlab::simulate_ou(B0, decomp, dt, t_end, seed, Vec::Zero(basis.dim()));
    for (const auto& state : states) {
      csv << state.time;
      for (int i = 0; i < state.xi.size(); ++i) csv << ',' << state.xi(i);
      csv << "\n";
    }
  }
  if (out_path.empty())
    std::cout << csv.str();
  else
    fvlab::write_text_file(out_path, csv.str());
  return 0;
}

int cmd_oracle(const std::string& chain_path, int n, const std::string& emit,
               const std::string& out_path) {
  auto chain = fvlab::load_chain(chain_path);
  auto spec = fvlab::solve_qsd(chain);
  std::ostringstream csv;

  if (emit == "generator") {
    auto gen = fvlab::build_fv_generator(chain, n);
    csv << "from,to,rate\n";
    for (int col = 0; col < gen.rates.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(gen.rates, col); it; ++it)
        csv << it.row() << ',' << it.col() << ',' << it.value() << "\n";
  } else if (emit == "stationary") {
    auto gen = fvlab::build_fv_generator(chain, n);
    Vec nu = fvlab::exact_stationary(gen);
    csv << "id";
    for (int i = 0; i < chain.k(); ++i) csv << ",count_" << chain.domain[i];
    csv << ",probability\n";
    for (int id = 0; id < gen.lattice.size(); ++id) {
      csv << id;
      for (int c : gen.lattice.states[id]) csv << ',' << c;
      csv << ',' << nu(id) << "\n";
    }
  } else if (emit == "covariance") {
    fvlab::ReducedBasis basis(spec.pi);
    fvlab::Mat exact = fvlab::exact_fluctuation_covariance(chain, spec, n);
    fvlab::Mat K;
    if (basis.dim() > 0) {
      auto pr = fvlab::build_pi_return(chain, spec);
      K = fvlab::covariance_lyapunov(pr).reduced;
    }
    csv << "n,i,j,exact_n_cov,distance_to_K\n";
    for (int i = 0; i < exact.rows(); ++i)
      for (int j = 0; j < exact.cols(); ++j)
        csv << n << ',' << i << ',' << j << ',' << exact(i, j) << ','
            << std::abs(exact(i, j) - K(i, j)) << "\n";
  } else if (emit == "moment") {
    fvlab::ReducedBasis basis(spec.pi);
    fvlab::OperatorOnZeroSum R{fvlab::Mat::Identity(basis.dim(), basis.dim()),
                               fvlab::BasisKind::function_side, 0};
    double value = fvlab::check_moment_estimate(chain, spec, n, R);
    csv << "n,value,n_times_abs\n";
    csv << n << ',' << value << ',' << n * std::abs(value) << "\n";
  } else {
    throw fvlab::InvalidParams("unknown --emit: " + emit);
  }

  if (out_path.empty())
    std::cout << csv.str();
  else
    fvlab::write_text_file(out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"quasistationary distributions, Fleming-Viot particle systems and their CLT covariance"};
  app.require_subcommand(1);

  std::string chain_path, f_path, out_path, route = "both", emit = "covariance", config_path;
  double tol_quad = 1e-8, dt = 1e-3, t_end = 100.0;
  fvlab::SimParams params;
  bool csv = false;
  int oracle_n = 2;

  auto* qsd = app.add_subcommand("qsd", "compute the QSD triple (pi, lambda, gamma)");
  qsd->add_option("chain", chain_path)->required();
  qsd->add_flag("--csv", csv, "emit pi as state,weight CSV");

  auto* cov = app.add_subcommand("covariance", "CLT covariance K by one or both routes");
  cov->add_option("chain", chain_path)->required();
  cov->add_option("--f", f_path, "function file (JSON array over D)");
  cov->add_option("--route", route)->check(CLI::IsMember({"both", "lyapunov", "integral"}));
  cov->add_option("--tol", tol_quad);

  auto* sim = app.add_subcommand("simulate", "stationary-regime Fleming-Viot samples");
  sim->add_option("chain", chain_path)->required();
  sim->add_option("--n", params.n)->required();
  sim->add_option("--burn-in", params.burn_in);
  sim->add_option("--spacing", params.spacing);
  sim->add_option("--samples", params.samples);
  sim->add_option("--seed", params.seed);
  sim->add_option("--out", out_path);

  auto* ou = app.add_subcommand("ou", "limiting fluctuation diffusion (Euler-Maruyama)");
  ou->add_option("chain", chain_path)->required();
  ou->add_option("--dt", dt);
  ou->add_option("--t-end", t_end);
  ou->add_option("--seed", params.seed);
  ou->add_option("--out", out_path);

  auto* oracle = app.add_subcommand("oracle", "exact finite-n analysis of the empirical-measure chain");
  oracle->add_option("chain", chain_path)->required();
  oracle->add_option("--n", oracle_n)->required();
  oracle->add_option("--emit", emit)
      ->check(CLI::IsMember({"generator", "stationary", "covariance", "moment"}));
  oracle->add_option("--out", out_path);

  auto* run = app.add_subcommand("run", "full verification pipeline from a config file");
  run->add_option("config", config_path)->required();

  auto* lln = app.add_subcommand("lln", "law-of-large-numbers distance check");
  lln->add_option("config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // normalize every usage error to exit code 1 (--help stays 0)
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (qsd->parsed()) return cmd_qsd(chain_path, csv);
    if (cov->parsed()) return cmd_covariance(chain_path, f_path, route, tol_quad);
    if (sim->parsed()) return cmd_simulate(chain_path, params, out_path);
    if (ou->parsed()) return cmd_ou(chain_path, dt, t_end, params.seed, out_path);
    if (oracle->parsed()) return cmd_oracle(chain_path, oracle_n, emit, out_path);
    if (run->parsed()) {
      auto result = fvlab::run_experiment(fvlab::load_config(config_path));
      std::cout << result.report.dump(2) << "\n";
      return result.all_pass ? 0 : 2;
    }
    if (lln->parsed()) {
      auto result = fvlab::lln_check(fvlab::load_config(config_path));
      std::cout << result.report.dump(2) << "\n";
      return result.all_pass ? 0 : 2;
    }
  } catch (const fvlab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fvlab::ReportWriteFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fvlab::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
