#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfde/all_at_once.hpp"
#include "tfde/problem.hpp"
#include "tfde/schemes.hpp"
#include "tfde/types.hpp"

namespace tfde {

/// One table cell. `order` is NaN where undefined (first row of a sweep,
/// or a nonpositive error ratio); iter/time fields are zero for pure
/// scheme rows.
struct ErrorTableRow {
  std::string problem;
  double alpha = 0.0;
  double lambda = 0.0;
  Index M = 0;
  Index N = 0;
  std::string scheme;  // liess | nlies | diff | all_at_once:P | all_at_once:I | all_at_once:BS
  double err = 0.0;
  double order = 0.0;  // NaN when undefined
  double iter1 = 0.0;
  double iter2 = 0.0;
  double time_s = 0.0;
  std::string status;  // ok | krylov_cap | breakdown | resource | failed:<what>
};

/// Field-wise equality with NaN == NaN (undefined orders compare equal).
bool operator==(const ErrorTableRow& a, const ErrorTableRow& b);

enum class ExperimentMode { Table1, Table2, Diff, Compare };

/// Sweep description mirroring the experimental protocol:
///  - Table1: fixed h = (b-a) * 2^-h_exponent, sweep over M values (Order1);
///  - Table2: tau = h, sweep over N values, M = round(T/h) (Order2);
///  - Diff:   NL-IES vs L-IES gap at the same mesh, sweep per diff_sweep;
///  - Compare: M = N sweep running the all-at-once solver variants.
struct ExperimentConfig {
  std::string problem = "example1";
  std::vector<double> alphas{1.5};
  std::vector<double> lambdas{0.0};
  ExperimentMode mode = ExperimentMode::Table1;
  int h_exponent = 8;
  std::vector<Index> M_list{32, 64, 128, 256};
  std::vector<Index> N_list{64, 128, 256};
  ExperimentMode diff_sweep = ExperimentMode::Table1;  // Table1 or Table2
  std::string scheme = "both";                         // liess | nlies | both
  std::vector<std::string> solvers{"preconditioned"};  // compare mode
  Index ref = 512;        // reference time subdivisions (and space for Table2)
  bool paper_scale = false;
  NewtonConfig newton;
  std::string out_path;   // empty -> no files written
  double reference_krylov_tol = 1e-13;
};

struct ExperimentResult {
  std::vector<ErrorTableRow> rows;
  int exit_code = 0;  // 0 clean, 2 partial cell failures
  std::vector<std::string> warnings;
};

/// Max-over-time of the max-over-space absolute gap between two solutions,
/// sampled at coinciding nodes. Meshes must nest with integer ratios in
/// each axis (either direction).
double compute_err(const SchemeSolution& solution, const SchemeSolution& reference);

/// log2(err_coarse / err_fine); NaN when either error is nonpositive.
double compute_order(double err_coarse, double err_fine);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Matrix dumps for external spectral analysis: writes the dense Jacobian
/// at the coarse-interpolated initial guess to `out_path`, and dense
/// blktridiag(-I, A_ell, 0) next to it (suffix "_precond").
/// Both use the text format: one matrix row per line, entries in
/// scientific notation with 17 significant digits, space separated.
struct DumpConfig {
  std::string problem = "example2";
  double alpha = 1.5;
  double lambda = 0.0;
  Index size = 65;  // M = N = size
  std::optional<Index> M;
  Index ell = 8;
  Index dense_cap = 2048;
  std::string out_path = "jacobian.txt";
};

std::pair<std::string, std::string> dump_matrices(const DumpConfig& config);

void write_matrix_text(std::ostream& os, const MatrixXd& m);

std::string csv_header();
std::string to_csv(const std::vector<ErrorTableRow>& rows);
std::vector<ErrorTableRow> parse_csv(const std::string& text);
std::string to_json(const std::vector<ErrorTableRow>& rows);

void write_outputs(const ExperimentResult& result, const std::string& out_path);

/// Key/value config file ("key = value", '#' comments, comma lists).
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config_entries(const std::map<std::string, std::string>& entries,
                          ExperimentConfig& config);

}  // namespace tfde
