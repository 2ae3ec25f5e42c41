// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit code is the number of failed criteria. Criterion 6 runs only with
// --paper-scale (it recomputes reference solutions at M = 1024 and takes
// tens of minutes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tfde/all_at_once.hpp"
#include "tfde/harness.hpp"
#include "tfde/schemes.hpp"
#include "tfde/weights.hpp"

using namespace tfde;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::mt19937 gen(0xacce97);

VectorXd random_vector(Index n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

double rel_gap(const VectorXd& got, const VectorXd& want) {
  const double scale = want.norm();
  return scale == 0.0 ? (got - want).norm() : (got - want).norm() / scale;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// ---- criterion 1: weight properties --------------------------------------

Outcome criterion1() {
  Outcome out;
  int checked = 0;
  for (double alpha : {1.1, 1.5, 1.9, 1.99})
    for (double lambda : {0.0, 1.0, 5.0, 10.0})
      for (int e = 4; e <= 10; ++e) {
        const auto w = tempered_weights(alpha, lambda, std::ldexp(1.0, -e), Index(4096));
        const auto rep = check_weight_properties(w);
        ++checked;
        if (!rep.all()) {
          out.pass = false;
          std::ostringstream os;
          os << "violation at alpha=" << alpha << " lambda=" << lambda << " h=2^-" << e
             << " index " << rep.first_violation;
          out.detail = os.str();
          return out;
        }
      }
  out.detail = std::to_string(checked) + " sequences, zero violations";
  return out;
}

// ---- criterion 2: structured kernels vs dense oracles --------------------

Outcome criterion2() {
  Outcome out;
  std::uniform_real_distribution<double> alpha_d(1.01, 1.99);
  std::uniform_real_distribution<double> lambda_d(0.0, 10.0);
  std::uniform_int_distribution<Index> n_d(2, 128);

  double worst_fft = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = n_d(gen);
    const double alpha = alpha_d(gen);
    const double lambda = lambda_d(gen);
    const double h = std::ldexp(1.0, -(4 + trial % 7));
    const auto w = tempered_weights(alpha, lambda, h, n + 1);
    const auto G = LowerHessenbergToeplitz::from_weights(w, n);
    const MatrixXd Gd = G.dense();
    const VectorXd x = random_vector(n);
    worst_fft = std::max(worst_fft, rel_gap(G.apply(x), Gd * x));
    worst_fft = std::max(worst_fft, rel_gap(G.apply(x, true), Gd.transpose() * x));
  }
  if (worst_fft > 1e-12) {
    out.pass = false;
    out.detail = "FFT matvec worst relative error " + sci(worst_fft);
    return out;
  }

  double worst_banded = 0.0;
  for (int trial = 0; trial < 24; ++trial) {
    const Index n = 2 + (trial * 37) % 511;
    const Index kl = trial % 6, ku = (trial / 6) % 4;
    BandedMatrix<double> A(n, kl, ku);
    for (Index i = 0; i < n; ++i) {
      for (Index j = std::max<Index>(0, i - kl); j <= std::min(n - 1, i + ku); ++j)
        A.at(i, j) = random_vector(1)[0];
      A.at(i, i) += 3.0;
    }
    const VectorXd b = random_vector(n);
    const VectorXd got = banded_solve(banded_lu(A), b);
    const VectorXd want = Eigen::FullPivLU<MatrixXd>(A.dense()).solve(b);
    worst_banded = std::max(worst_banded, rel_gap(got, want));
  }
  // and the operator band itself
  {
    ProblemSpec p = catalog("example1");
    p.alpha = 1.5;
    const Mesh mesh = build_mesh(p, 512, 8);
    const SpaceOperator op(p, mesh);
    const auto Ab = op.truncated(8);
    const auto F = banded_lu(Ab);
    const VectorXd b = random_vector(op.size());
    const VectorXd x = F.solve(b);
    worst_banded = std::max(worst_banded, (Ab.apply(x) - b).norm() / b.norm());
  }
  if (worst_banded > 1e-10) {
    out.pass = false;
    out.detail = "banded LU worst relative error " + sci(worst_banded);
    return out;
  }

  double worst_block = 0.0;
  for (const char* name : {"example1", "example2"}) {
    ProblemSpec p = catalog(name);
    p.alpha = 1.4;
    p.lambda = 5.0;
    const Mesh mesh = build_mesh(p, 16, 16);
    const AllAtOnceSystem sys(p, mesh);
    const Preconditioner prec = precond_build(sys, 8);
    const MatrixXd Pd = sys.dense_preconditioner(8);
    Eigen::FullPivLU<MatrixXd> lu(Pd);
    for (int rep = 0; rep < 5; ++rep) {
      const VectorXd r = random_vector(sys.dim());
      worst_block = std::max(worst_block, rel_gap(prec.apply(r), lu.solve(r)));
    }
  }
  if (worst_block > 1e-10) {
    out.pass = false;
    out.detail = "block forward substitution worst relative error " +
                 sci(worst_block);
    return out;
  }

  std::ostringstream os;
  os << "worst rel err: fft " << worst_fft << ", banded " << worst_banded << ", block "
     << worst_block;
  out.detail = os.str();
  return out;
}

// ---- criterion 3: Jacobian vs central finite differences -----------------

Outcome criterion3() {
  Outcome out;
  const double eps = 1e-6;
  double worst = 0.0;
  for (const char* name : {"example1", "example2"}) {
    ProblemSpec p = catalog(name);
    p.alpha = 1.5;
    p.lambda = 1.0;
    const Mesh mesh = build_mesh(p, 12, 12);
    const AllAtOnceSystem sys(p, mesh);
    for (int rep = 0; rep < 20; ++rep) {
      const VectorXd u = random_vector(sys.dim());
      const VectorXd x = random_vector(sys.dim());
      const VectorXd fd =
          (sys.residual(u + eps * x) - sys.residual(u - eps * x)) / (2.0 * eps);
      worst = std::max(worst, rel_gap(sys.jacobian_apply(u, x), fd));
    }
  }
  out.pass = worst <= 1e-6;
  out.detail = "worst relative gap " + sci(worst);
  return out;
}

// ---- criterion 4: cross-solver equivalence --------------------------------

Outcome criterion4() {
  Outcome out;
  double worst = 0.0;
  const std::pair<double, double> params[] = {{1.1, 0.0}, {1.5, 5.0}, {1.9, 10.0}};
  for (const char* name : {"example1", "example2"})
    for (auto [alpha, lambda] : params)
      for (Index size : {Index(8), Index(16), Index(32)}) {
        ProblemSpec p = catalog(name);
        p.alpha = alpha;
        p.lambda = lambda;
        const Mesh mesh = build_mesh(p, size, size);
        const AllAtOnceSystem sys(p, mesh);
        const auto [sol, report] = newton_solve(sys);
        if (!report.converged) {
          out.pass = false;
          out.detail = std::string("newton did not converge on ") + name;
          return out;
        }
        const SchemeSolution seq = nlies_step_run(p, mesh);
        worst = std::max(worst, (sol.values - seq.values).cwiseAbs().maxCoeff());
      }
  out.pass = worst <= 1e-8;
  out.detail = "worst max-norm gap " + sci(worst);
  return out;
}

// ---- criterion 5: convergence orders, desk scale ---------------------------

Outcome criterion5() {
  Outcome out;
  ExperimentConfig config;
  config.problem = "example1";
  config.alphas = {1.5};
  config.lambdas = {1.0};
  config.mode = ExperimentMode::Table1;
  config.h_exponent = 8;  // h = 2^-8, N = 512
  config.M_list = {32, 64, 128, 256};
  config.ref = 512;
  config.scheme = "both";
  const auto result = run_experiment(config);
  if (result.exit_code != 0) {
    out.pass = false;
    out.detail = "sweep reported cell failures";
    return out;
  }

  std::ostringstream os;
  for (std::size_t base : {std::size_t(0), std::size_t(4)}) {  // liess rows, nlies rows
    os << (base == 0 ? "liess orders:" : " | nlies orders:");
    for (std::size_t i = base + 1; i < base + 4; ++i) {
      const double order = result.rows[i].order;
      os << ' ' << order;
      if (!(order >= 0.6 && order <= 1.6)) out.pass = false;
      if (!(result.rows[i].err < result.rows[i - 1].err)) out.pass = false;  // monotone
    }
    const double final_order = result.rows[base + 3].order;
    if (!(final_order >= 0.95)) out.pass = false;
  }
  out.detail = os.str();
  return out;
}

// ---- criterion 6: paper-scale table cell (optional) ------------------------

Outcome criterion6() {
  Outcome out;
  ExperimentConfig config;
  config.problem = "example1";
  config.alphas = {1.1};
  config.lambdas = {0.0};
  config.mode = ExperimentMode::Table1;
  config.h_exponent = 10;  // h = 2^-10, N = 2048
  config.M_list = {64, 128, 256, 512};
  config.ref = 1024;
  config.paper_scale = true;
  config.scheme = "liess";
  const auto result = run_experiment(config);
  if (result.exit_code != 0 || result.rows.size() != 4) {
    out.pass = false;
    out.detail = "sweep reported cell failures";
    return out;
  }

  const double err64 = result.rows[0].err;
  const double printed = 8.0277e-2;
  const bool err_match = std::abs(err64 - printed) / printed <= 5e-3;

  const double printed_orders[3] = {1.0012, 1.1689, 1.5586};
  bool orders_match = true;
  std::ostringstream os;
  os << "Err(M=64) = " << err64 << " (printed 8.0277e-02)";
  os << ", orders:";
  for (int i = 0; i < 3; ++i) {
    const double order = result.rows[i + 1].order;
    os << ' ' << order;
    if (std::abs(order - printed_orders[i]) > 0.02) orders_match = false;
  }
  out.pass = err_match && orders_match;
  out.detail = os.str() + (err_match ? "" : " [Err mismatch]") +
               (orders_match ? "" : " [order mismatch]");
  return out;
}

// ---- criterion 7: iteration counts ----------------------------------------

Outcome criterion7() {
  Outcome out;
  std::ostringstream os;

  auto run = [](const std::string& name, double alpha, double lambda) {
    ProblemSpec p = catalog(name);
    p.alpha = alpha;
    p.lambda = lambda;
    const Mesh mesh = build_mesh(p, 129, 129);
    const AllAtOnceSystem sys(p, mesh);
    NewtonConfig config;
    config.ell = 8;
    return newton_solve(sys, config).second;
  };

  const SolveReport r1 = run("example1", 1.1, 0.0);
  os << "example1 Iter1=" << r1.iter1 << " Iter2=" << r1.iter2;
  if (r1.iter1 != 5 || !(r1.iter2 >= 3.0 && r1.iter2 <= 7.0) || !r1.converged)
    out.pass = false;

  const SolveReport r2 = run("example2", 1.1, 0.0);
  os << " | example2 Iter1=" << r2.iter1 << " Iter2=" << r2.iter2;
  if (r2.iter1 != 5 || !(r2.iter2 >= 2.0 && r2.iter2 <= 6.0) || !r2.converged)
    out.pass = false;

  // sensitivity: the cubic reading of example1's source
  const SolveReport rc = run("example1_cubic", 1.1, 0.0);
  os << " | [info] example1_cubic Iter1=" << rc.iter1 << " Iter2=" << rc.iter2
     << " (printed table: 5.0, 4.8)";
  out.detail = os.str();
  return out;
}

// ---- criterion 8: preconditioner effectiveness -----------------------------

Outcome criterion8() {
  Outcome out;
  ProblemSpec p = catalog("example1");
  p.alpha = 1.1;
  p.lambda = 0.0;
  const Mesh mesh = build_mesh(p, 257, 257);
  const AllAtOnceSystem sys(p, mesh);

  NewtonConfig preconditioned;
  preconditioned.ell = 8;
  const auto [psol, prep] = newton_solve(sys, preconditioned);

  NewtonConfig plain;
  plain.inner = NewtonConfig::Inner::Unpreconditioned;
  const auto [usol, urep] = newton_solve(sys, plain);

  const bool plain_slow_or_failed = urep.iter2 > 100.0 ||
                                    urep.status != SolveReport::Status::Ok ||
                                    !urep.converged;
  std::ostringstream os;
  os << "preconditioned Iter2=" << prep.iter2 << " (printed 6.6), unpreconditioned Iter2="
     << urep.iter2 << (urep.status != SolveReport::Status::Ok ? " [flagged]" : "")
     << " (printed 521.0)";
  out.pass = prep.converged && prep.iter2 <= 15.0 && plain_slow_or_failed;
  out.detail = os.str();
  return out;
}

// ---- criterion 9: Gershgorin margins ---------------------------------------

Outcome criterion9() {
  Outcome out;
  double min_margin = std::numeric_limits<double>::infinity();
  int checked = 0;
  for (const char* name : {"example1", "example2"})
    for (double alpha : {1.1, 1.5, 1.9, 1.99})
      for (double lambda : {0.0, 1.0, 5.0, 10.0})
        for (Index N : {Index(64), Index(128)}) {
          ProblemSpec p = catalog(name);
          p.alpha = alpha;
          p.lambda = lambda;
          const SpaceOperator op(p, build_mesh(p, N, N));
          const auto rep = gershgorin_check(op, 8);
          ++checked;
          min_margin = std::min(min_margin, rep.min_margin);
          if (!rep.all_positive) out.pass = false;
        }
  std::ostringstream os;
  os << checked << " combinations, min margin " << min_margin;
  out.detail = os.str();
  return out;
}

// ---- criterion 10: empirical stability -------------------------------------

Outcome criterion10() {
  Outcome out;
  ProblemSpec p = catalog("example2");
  p.alpha = 1.5;
  p.lambda = 1.0;
  const Mesh mesh = build_mesh(p, 64, 16);  // tau L = 3/16 < 1
  if (mesh.tau() * p.lipschitz_L >= 1.0) {
    out.pass = false;
    out.detail = "mesh violates tau L < 1";
    return out;
  }
  const SchemeSolution base = liess_run(p, mesh);
  const double delta = 1e-3;
  ProblemSpec perturbed = p;
  perturbed.u0 = [&p, delta](double x) { return p.u0(x) + delta; };
  const SchemeSolution shifted = liess_run(perturbed, mesh);

  double max_diff = 0.0;
  for (Index j = 1; j <= mesh.M; ++j)
    max_diff = std::max(max_diff,
                        (shifted.interior(j) - base.interior(j)).cwiseAbs().maxCoeff());
  const double bound = std::exp(p.T * p.lipschitz_L) * delta * (1.0 + 1e-6);
  out.pass = max_diff <= bound;
  std::ostringstream os;
  os << "max amplification " << max_diff << " <= bound " << bound;
  out.detail = os.str();
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  bool paper_scale = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--paper-scale") == 0) paper_scale = true;

  struct Criterion {
    int id;
    const char* label;
    std::function<Outcome()> run;
    double budget_seconds;  // <= 0: no budget
  };
  const std::vector<Criterion> criteria = {
      {1, "weight-property suite", criterion1, 5.0},
      {2, "structured-kernel oracles", criterion2, 30.0},
      {3, "jacobian finite-difference check", criterion3, 10.0},
      {4, "cross-solver equivalence", criterion4, 60.0},
      {5, "convergence orders (desk scale)", criterion5, 600.0},
      {6, "paper-scale table reproduction", criterion6, -1.0},
      {7, "iteration-count reproduction", criterion7, 60.0},
      {8, "preconditioner effectiveness", criterion8, 300.0},
      {9, "gershgorin margin suite", criterion9, 5.0},
      {10, "empirical stability", criterion10, 30.0},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (c.id == 6 && !paper_scale) {
      std::printf("[SKIP] %2d %-36s gated behind --paper-scale\n", c.id, c.label);
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = c.budget_seconds <= 0.0 || seconds < c.budget_seconds;
    if (!in_budget) outcome.pass = false;
    std::printf("[%s] %2d %-36s (%7.2f s)%s %s\n", outcome.pass ? "PASS" : "FAIL", c.id,
                c.label, seconds, in_budget ? "" : " [over budget]",
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
