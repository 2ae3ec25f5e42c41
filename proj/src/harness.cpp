#include "tfde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace tfde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double round3(double t) { return std::round(t * 1000.0) / 1000.0; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Strides mapping the common (coarser) grid into each mesh; the coarser
// grid's nodes must be a subset of the finer's.
std::pair<Index, Index> nesting_strides(Index na, Index nb) {
  if (nb % na == 0) return {1, nb / na};
  if (na % nb == 0) return {na / nb, 1};
  throw std::domain_error("compute_err: meshes do not nest with integer ratio");
}

bool same_value(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

struct SchemeRunner {
  const ProblemSpec& spec;
  const ExperimentConfig& config;
  std::vector<std::string>* warnings;

  SchemeSolution run(const std::string& scheme, const Mesh& mesh, double krylov_tol) const {
    SchemeOptions opts;
    opts.krylov_tol = krylov_tol;
    opts.ell = config.newton.ell;
    opts.warnings = warnings;
    if (scheme == "liess") return liess_run(spec, mesh, opts);
    return nlies_step_run(spec, mesh, opts);
  }
};

void append_order_column(std::vector<ErrorTableRow>& rows, std::size_t first) {
  for (std::size_t r = first; r < rows.size(); ++r) {
    if (r == first) {
      rows[r].order = kNaN;
    } else {
      rows[r].order = compute_order(rows[r - 1].err, rows[r].err);
    }
  }
}

std::string precond_suffix(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
    return path + "_precond";
  return path.substr(0, dot) + "_precond" + path.substr(dot);
}

}  // namespace

bool operator==(const ErrorTableRow& a, const ErrorTableRow& b) {
  return a.problem == b.problem && same_value(a.alpha, b.alpha) &&
         same_value(a.lambda, b.lambda) && a.M == b.M && a.N == b.N &&
         a.scheme == b.scheme && same_value(a.err, b.err) && same_value(a.order, b.order) &&
         same_value(a.iter1, b.iter1) && same_value(a.iter2, b.iter2) &&
         same_value(a.time_s, b.time_s) && a.status == b.status;
}

double compute_err(const SchemeSolution& solution, const SchemeSolution& reference) {
  const auto [sol_sx, ref_sx] = nesting_strides(solution.mesh.N, reference.mesh.N);
  const auto [sol_st, ref_st] = nesting_strides(solution.mesh.M, reference.mesh.M);
  const Index common_N = std::min(solution.mesh.N, reference.mesh.N);
  const Index common_M = std::min(solution.mesh.M, reference.mesh.M);

  double err = 0.0;
  for (Index j = 0; j <= common_M; ++j)
    for (Index i = 1; i < common_N; ++i)
      err = std::max(err, std::abs(solution.values(j * sol_st, i * sol_sx) -
                                   reference.values(j * ref_st, i * ref_sx)));
  return err;
}

double compute_order(double err_coarse, double err_fine) {
  if (!(err_coarse > 0.0) || !(err_fine > 0.0)) return kNaN;
  return std::log2(err_coarse / err_fine);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  using Clock = std::chrono::steady_clock;
  ExperimentResult result;
  const ProblemSpec base = catalog(config.problem);

  std::vector<std::string> schemes;
  if (config.mode == ExperimentMode::Table1 || config.mode == ExperimentMode::Table2) {
    if (config.scheme == "both") {
      schemes = {"liess", "nlies"};
    } else if (config.scheme == "liess" || config.scheme == "nlies") {
      schemes = {config.scheme};
    } else {
      throw std::invalid_argument("run_experiment: unknown scheme '" + config.scheme + "'");
    }
  }

  for (double alpha : config.alphas) {
    for (double lambda : config.lambdas) {
      ProblemSpec spec = base;
      spec.alpha = alpha;
      spec.lambda = lambda;
      SchemeRunner runner{spec, config, &result.warnings};

      auto record_failure = [&](ErrorTableRow row, const std::string& what) {
        row.err = kNaN;
        row.order = kNaN;
        row.status = what;
        result.rows.push_back(std::move(row));
        result.exit_code = 2;
      };

      if (config.mode == ExperimentMode::Table1 || config.mode == ExperimentMode::Table2) {
        struct Cell {
          Index N, M;
        };
        std::vector<Cell> cells;
        Index ref_N = 0, ref_M = 0;
        if (config.mode == ExperimentMode::Table1) {
          const double h = std::ldexp(1.0, -config.h_exponent);
          const Index N = static_cast<Index>(std::llround((spec.b - spec.a) / h));
          for (Index M : config.M_list) cells.push_back({N, M});
          ref_N = N;
          ref_M = config.ref;
        } else {
          for (Index N : config.N_list) {
            const double h = (spec.b - spec.a) / static_cast<double>(N);
            cells.push_back({N, static_cast<Index>(std::llround(spec.T / h))});
          }
          ref_N = config.ref;
          const double h_ref = (spec.b - spec.a) / static_cast<double>(ref_N);
          ref_M = static_cast<Index>(std::llround(spec.T / h_ref));
        }

        for (const auto& scheme : schemes) {
          SchemeSolution reference;
          bool have_ref = false;
          const std::size_t first = result.rows.size();
          for (const auto& cell : cells) {
            ErrorTableRow row;
            row.problem = config.problem;
            row.alpha = alpha;
            row.lambda = lambda;
            row.N = cell.N;
            row.M = cell.M;
            row.scheme = scheme;
            try {
              if (!have_ref) {
                reference = runner.run(scheme, build_mesh(spec, ref_N, ref_M),
                                       config.reference_krylov_tol);
                have_ref = true;
              }
              const auto t0 = Clock::now();
              const SchemeSolution sol =
                  runner.run(scheme, build_mesh(spec, cell.N, cell.M), 1e-12);
              row.time_s = round3(std::chrono::duration<double>(Clock::now() - t0).count());
              row.err = compute_err(sol, reference);
              row.status = "ok";
              result.rows.push_back(std::move(row));
            } catch (const std::exception& e) {
              record_failure(std::move(row), std::string("failed:") + e.what());
            }
          }
          append_order_column(result.rows, first);
        }
      } else if (config.mode == ExperimentMode::Diff) {
        struct Cell {
          Index N, M;
        };
        std::vector<Cell> cells;
        if (config.diff_sweep == ExperimentMode::Table2) {
          for (Index N : config.N_list) {
            const double h = (spec.b - spec.a) / static_cast<double>(N);
            cells.push_back({N, static_cast<Index>(std::llround(spec.T / h))});
          }
        } else {
          const double h = std::ldexp(1.0, -config.h_exponent);
          const Index N = static_cast<Index>(std::llround((spec.b - spec.a) / h));
          for (Index M : config.M_list) cells.push_back({N, M});
        }
        const std::size_t first = result.rows.size();
        for (const auto& cell : cells) {
          ErrorTableRow row;
          row.problem = config.problem;
          row.alpha = alpha;
          row.lambda = lambda;
          row.N = cell.N;
          row.M = cell.M;
          row.scheme = "diff";
          try {
            const auto t0 = Clock::now();
            const Mesh mesh = build_mesh(spec, cell.N, cell.M);
            const SchemeSolution l = runner.run("liess", mesh, 1e-12);
            const SchemeSolution nl = runner.run("nlies", mesh, 1e-12);
            row.time_s = round3(std::chrono::duration<double>(Clock::now() - t0).count());
            row.err = compute_err(nl, l);
            row.status = "ok";
            result.rows.push_back(std::move(row));
          } catch (const std::exception& e) {
            record_failure(std::move(row), std::string("failed:") + e.what());
          }
        }
        append_order_column(result.rows, first);
      } else {  // Compare
        for (const auto& solver : config.solvers) {
          for (Index N : config.N_list) {
            ErrorTableRow row;
            row.problem = config.problem;
            row.alpha = alpha;
            row.lambda = lambda;
            row.N = N;
            row.M = N;
            row.scheme = "all_at_once:" + solver;
            row.order = kNaN;
            try {
              NewtonConfig nc = config.newton;
              if (solver == "preconditioned") {
                nc.inner = NewtonConfig::Inner::Preconditioned;
              } else if (solver == "unpreconditioned") {
                nc.inner = NewtonConfig::Inner::Unpreconditioned;
              } else if (solver == "dense-direct") {
                nc.inner = NewtonConfig::Inner::DenseDirect;
              } else {
                throw std::invalid_argument("unknown solver '" + solver + "'");
              }
              const AllAtOnceSystem sys(spec, build_mesh(spec, N, N));
              auto [sol, report] = newton_solve(sys, nc);
              row.err = kNaN;
              row.iter1 = report.iter1;
              row.iter2 = report.iter2;
              row.time_s = round3(report.wall_time_seconds);
              switch (report.status) {
                case SolveReport::Status::Ok:
                  row.status = report.converged ? "ok" : "failed:not-converged";
                  break;
                case SolveReport::Status::KrylovCap: row.status = "krylov_cap"; break;
                case SolveReport::Status::Breakdown: row.status = "breakdown"; break;
                case SolveReport::Status::MaxitReached: row.status = "maxit"; break;
              }
              if (row.status != "ok") result.exit_code = 2;
              result.rows.push_back(std::move(row));
            } catch (const ResourceLimitError&) {
              record_failure(std::move(row), "resource");
            } catch (const std::exception& e) {
              record_failure(std::move(row), std::string("failed:") + e.what());
            }
          }
        }
      }
    }
  }

  // meshes of one sweep repeat the same diagnostics; keep first occurrences
  std::vector<std::string> unique_warnings;
  for (auto& w : result.warnings)
    if (std::find(unique_warnings.begin(), unique_warnings.end(), w) ==
        unique_warnings.end())
      unique_warnings.push_back(std::move(w));
  result.warnings = std::move(unique_warnings);

  if (!config.out_path.empty()) write_outputs(result, config.out_path);
  return result;
}

void write_matrix_text(std::ostream& os, const MatrixXd& m) {
  char buf[40];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.16e", m(i, j));
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

std::pair<std::string, std::string> dump_matrices(const DumpConfig& config) {
  ProblemSpec spec = catalog(config.problem);
  spec.alpha = config.alpha;
  spec.lambda = config.lambda;
  const Index M = config.M.value_or(config.size);
  if (config.size > config.dense_cap || M > config.dense_cap)
    throw ResourceLimitError("dump: mesh size " + std::to_string(std::max(config.size, M)) +
                             " over cap " + std::to_string(config.dense_cap));
  const Mesh mesh = build_mesh(spec, config.size, M);
  const AllAtOnceSystem sys(spec, mesh);

  const VectorXd u0 = coarse_initial_guess(spec, mesh);
  const MatrixXd J0 = sys.dense_jacobian(u0, sys.dim());
  const MatrixXd P = sys.dense_preconditioner(config.ell, sys.dim());

  const std::string precond_path = precond_suffix(config.out_path);
  std::ofstream jf(config.out_path);
  if (!jf) throw std::runtime_error("dump: cannot open " + config.out_path);
  write_matrix_text(jf, J0);
  std::ofstream pf(precond_path);
  if (!pf) throw std::runtime_error("dump: cannot open " + precond_path);
  write_matrix_text(pf, P);
  return {config.out_path, precond_path};
}

std::string csv_header() {
  return "problem,alpha,lambda,M,N,scheme,err,order,iter1,iter2,time_s,status";
}

std::string to_csv(const std::vector<ErrorTableRow>& rows) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const auto& r : rows) {
    os << r.problem << ',' << fmt(r.alpha) << ',' << fmt(r.lambda) << ',' << r.M << ','
       << r.N << ',' << r.scheme << ',' << fmt(r.err) << ','
       << (std::isnan(r.order) ? "--" : fmt(r.order)) << ',' << fmt(r.iter1) << ','
       << fmt(r.iter2) << ',' << fmt(r.time_s) << ',' << r.status << '\n';
  }
  return os.str();
}

std::vector<ErrorTableRow> parse_csv(const std::string& text) {
  std::vector<ErrorTableRow> rows;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line == csv_header()) continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 12) throw std::invalid_argument("parse_csv: malformed row: " + line);
    ErrorTableRow r;
    r.problem = fields[0];
    r.alpha = std::stod(fields[1]);
    r.lambda = std::stod(fields[2]);
    r.M = std::stoll(fields[3]);
    r.N = std::stoll(fields[4]);
    r.scheme = fields[5];
    r.err = std::stod(fields[6]);
    r.order = fields[7] == "--" ? kNaN : std::stod(fields[7]);
    r.iter1 = std::stod(fields[8]);
    r.iter2 = std::stod(fields[9]);
    r.time_s = std::stod(fields[10]);
    r.status = fields[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string to_json(const std::vector<ErrorTableRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["problem"] = r.problem;
    j["alpha"] = r.alpha;
    j["lambda"] = r.lambda;
    j["M"] = r.M;
    j["N"] = r.N;
    j["scheme"] = r.scheme;
    j["err"] = r.err;
    if (std::isnan(r.order)) {
      j["order"] = nullptr;
    } else {
      j["order"] = r.order;
    }
    j["iter1"] = r.iter1;
    j["iter2"] = r.iter2;
    j["time_s"] = r.time_s;
    j["status"] = r.status;
    out.push_back(std::move(j));
  }
  return out.dump(2);
}

void write_outputs(const ExperimentResult& result, const std::string& out_path) {
  std::ofstream cf(out_path);
  if (!cf) throw std::runtime_error("cannot open " + out_path);
  cf << to_csv(result.rows);

  std::string json_path = out_path;
  const auto dot = json_path.find_last_of('.');
  if (dot != std::string::npos && json_path.find('/', dot) == std::string::npos) {
    json_path = json_path.substr(0, dot) + ".json";
  } else {
    json_path += ".json";
  }
  std::ofstream jf(json_path);
  if (!jf) throw std::runtime_error("cannot open " + json_path);
  jf << to_json(result.rows) << '\n';
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!value.empty() && value.front() == '"' && value.back() == '"' && value.size() >= 2)
      value = value.substr(1, value.size() - 2);
    entries[key] = value;
  }
  return entries;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(item);
  return out;
}

ExperimentMode parse_mode(const std::string& s) {
  if (s == "table1") return ExperimentMode::Table1;
  if (s == "table2") return ExperimentMode::Table2;
  if (s == "diff") return ExperimentMode::Diff;
  if (s == "compare") return ExperimentMode::Compare;
  throw std::invalid_argument("config: unknown mode '" + s + "'");
}

}  // namespace

void apply_config_entries(const std::map<std::string, std::string>& entries,
                          ExperimentConfig& config) {
  for (const auto& [key, value] : entries) {
    if (key == "problem") {
      config.problem = value;
    } else if (key == "alpha") {
      config.alphas.clear();
      for (const auto& v : split_list(value)) config.alphas.push_back(std::stod(v));
    } else if (key == "lambda") {
      config.lambdas.clear();
      for (const auto& v : split_list(value)) config.lambdas.push_back(std::stod(v));
    } else if (key == "mode") {
      config.mode = parse_mode(value);
    } else if (key == "h_exp") {
      config.h_exponent = std::stoi(value);
    } else if (key == "M") {
      config.M_list.clear();
      for (const auto& v : split_list(value)) config.M_list.push_back(std::stoll(v));
    } else if (key == "N") {
      config.N_list.clear();
      for (const auto& v : split_list(value)) config.N_list.push_back(std::stoll(v));
    } else if (key == "diff_sweep") {
      config.diff_sweep = parse_mode(value);
    } else if (key == "scheme") {
      config.scheme = value;
    } else if (key == "solver") {
      config.solvers = split_list(value);
    } else if (key == "ref") {
      config.ref = std::stoll(value);
    } else if (key == "paper_scale") {
      config.paper_scale = value == "true" || value == "1";
    } else if (key == "ell") {
      config.newton.ell = std::stoll(value);
    } else if (key == "out") {
      config.out_path = value;
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

}  // namespace tfde
