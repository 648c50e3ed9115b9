#include "pacoord/lp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pacoord::lp {

namespace {
std::atomic<double> g_default_tol{kDefaultTolerance};
}

double default_tolerance() noexcept { return g_default_tol.load(std::memory_order_relaxed); }

void set_default_tolerance(double tol) {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("LP tolerance must lie in (0, 1)");
  g_default_tol.store(tol, std::memory_order_relaxed);
}

Problem::Problem(std::size_t num_vars)
    : num_vars_(num_vars),
      objective_(num_vars, 0.0),
      lower_(num_vars),
      upper_(num_vars) {}

void Problem::check_row(const std::vector<double>& row, const char* what) const {
  if (row.size() != num_vars_) {
    throw std::invalid_argument(std::string(what) + " has length " +
                                std::to_string(row.size()) + ", expected " +
                                std::to_string(num_vars_));
  }
}

void Problem::check_index(std::size_t j) const {
  if (j >= num_vars_) {
    throw std::invalid_argument("variable index " + std::to_string(j) +
                                " out of range");
  }
}

void Problem::set_objective(std::vector<double> c) {
  check_row(c, "objective");
  objective_ = std::move(c);
}

void Problem::set_objective_coeff(std::size_t j, double value) {
  check_index(j);
  objective_[j] = value;
}

void Problem::add_le(std::vector<double> row, double rhs) {
  check_row(row, "inequality row");
  ineq_.push_back({std::move(row), rhs});
}

void Problem::add_ge(std::vector<double> row, double rhs) {
  check_row(row, "inequality row");
  for (double& v : row) v = -v;
  ineq_.push_back({std::move(row), -rhs});
}

void Problem::add_eq(std::vector<double> row, double rhs) {
  check_row(row, "equality row");
  eq_.push_back({std::move(row), rhs});
}

void Problem::set_lower(std::size_t j, std::optional<double> lo) {
  check_index(j);
  lower_[j] = lo;
}

void Problem::set_upper(std::size_t j, std::optional<double> hi) {
  check_index(j);
  upper_[j] = hi;
}

void Problem::set_bounds(std::size_t j, std::optional<double> lo,
                         std::optional<double> hi) {
  check_index(j);
  lower_[j] = lo;
  upper_[j] = hi;
}

void Problem::validate() const {
  check_row(objective_, "objective");
  for (const auto& c : ineq_) check_row(c.coeffs, "inequality row");
  for (const auto& c : eq_) check_row(c.coeffs, "equality row");
  if (lower_.size() != num_vars_ || upper_.size() != num_vars_) {
    throw std::invalid_argument("bound vectors do not match num_vars");
  }
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr double kFeasTol = 1e-9;
constexpr double kPerturbation = 1e-7;

// How an original variable is expressed through nonnegative columns.
struct ColumnMap {
  enum class Kind { Shifted, Negated, Free } kind = Kind::Free;
  std::size_t col = 0;
  std::size_t col_neg = 0;  // Free only
  double offset = 0.0;      // x = offset + y  or  x = offset - y
};

enum class RowSense { Le, Eq };

struct StdRow {
  std::vector<double> coeffs;  // over structural columns
  double rhs;
  RowSense sense;
};

// Dense tableau with the reduced-cost row stored last. The rhs cell of the
// reduced-cost row holds -z where z is the current objective.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), stride_(cols + 1),
        data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return data_[i * stride_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[i * stride_ + j]; }
  double& rhs(std::size_t i) { return data_[i * stride_ + cols_]; }
  double rhs(std::size_t i) const { return data_[i * stride_ + cols_]; }
  double& cost(std::size_t j) { return at(rows_, j); }
  double objective() const { return -rhs(rows_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    double* prow = &data_[r * stride_];
    const double inv = 1.0 / prow[c];
    for (std::size_t j = 0; j < stride_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      double* row = &data_[i * stride_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < stride_; ++j) {
        if (prow[j] == 0.0) continue;
        double v = row[j] - f * prow[j];
        row[j] = std::abs(v) < kDropTol ? 0.0 : v;
      }
      row[c] = 0.0;
    }
    basis_[r] = c;
  }

  // Rebuilds the reduced-cost row from column costs c and the current basis.
  void price(const std::vector<double>& c) {
    for (std::size_t j = 0; j < cols_; ++j) cost(j) = c[j];
    rhs(rows_) = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(rows_, j) -= cb * at(i, j);
    }
    for (std::size_t i = 0; i < rows_; ++i) cost(basis_[i]) = 0.0;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t stride_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { Optimal, Unbounded, Infeasible };

// Primal simplex with Dantzig pricing and a two-pass (Harris) ratio test that
// prefers the largest pivot among rows within kFeasTol of the minimum ratio.
PhaseResult run_primal(Tableau& t, const std::vector<bool>& allowed, std::size_t& iterations,
                       std::size_t max_iterations) {
  const std::size_t m = t.rows();
  const std::size_t n = t.cols();
  for (;;) {
    std::size_t enter = n;
    double best = kReducedCostTol;
    for (std::size_t j = 0; j < n; ++j) {
      if (allowed[j] && t.cost(j) > best) {
        enter = j;
        best = t.cost(j);
      }
    }
    if (enter == n) return PhaseResult::Optimal;

    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      if (a > kPivotTol) bound = std::min(bound, (std::max(t.rhs(i), 0.0) + kFeasTol) / a);
    }
    if (bound == std::numeric_limits<double>::infinity()) return PhaseResult::Unbounded;

    std::size_t leave = m;
    double pivot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = t.at(i, enter);
      if (a > kPivotTol && std::max(t.rhs(i), 0.0) / a <= bound && a > pivot) {
        leave = i;
        pivot = a;
      }
    }
    if (t.rhs(leave) < 0.0) t.rhs(leave) = 0.0;
    t.pivot(leave, enter);
    if (++iterations > max_iterations) throw std::runtime_error("simplex iteration limit exceeded");
  }
}

// Dual simplex from a dual-feasible basis until every basic value is
// nonnegative. Infeasible when a negative row has no usable entry.
PhaseResult run_dual(Tableau& t, const std::vector<bool>& allowed, std::size_t& iterations,
                     std::size_t max_iterations) {
  const std::size_t m = t.rows();
  const std::size_t n = t.cols();
  for (;;) {
    std::size_t leave = m;
    double worst = -kFeasTol;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.rhs(i) < worst) {
        leave = i;
        worst = t.rhs(i);
      }
    }
    if (leave == m) return PhaseResult::Optimal;

    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double a = t.at(leave, j);
      if (allowed[j] && a < -kPivotTol)
        bound = std::min(bound, (std::max(-t.cost(j), 0.0) + kReducedCostTol) / -a);
    }
    if (bound == std::numeric_limits<double>::infinity()) return PhaseResult::Infeasible;

    std::size_t enter = n;
    double pivot = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = t.at(leave, j);
      if (allowed[j] && a < -kPivotTol && std::max(-t.cost(j), 0.0) / -a <= bound && -a > pivot) {
        enter = j;
        pivot = -a;
      }
    }
    t.pivot(leave, enter);
    if (++iterations > max_iterations) throw std::runtime_error("simplex iteration limit exceeded");
  }
}

// Optimizes the column costs c from the current basis. The rhs is perturbed
// first so degenerate vertices do not stall the primal pass; afterwards the
// true basic values B^-1 b are recomputed from the columns that formed the
// initial identity and any leftover infeasibility is removed by dual pivots.
PhaseResult optimize(Tableau& t, const std::vector<double>& c, const std::vector<bool>& allowed,
                     const std::vector<double>& b, const std::vector<std::size_t>& unit_cols,
                     std::size_t& iterations, std::size_t max_iterations) {
  const std::size_t m = t.rows();
  t.price(c);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = std::fmod(0.6180339887498949 * static_cast<double>(i + 1), 1.0);
    t.rhs(i) += kPerturbation * (1.0 + std::abs(t.rhs(i))) * (1.0 + u);
  }
  for (int round = 0;; ++round) {
    if (run_primal(t, allowed, iterations, max_iterations) == PhaseResult::Unbounded)
      return PhaseResult::Unbounded;
    for (std::size_t i = 0; i < m; ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < m; ++k) v += t.at(i, unit_cols[k]) * b[k];
      t.rhs(i) = v;
    }
    t.price(c);
    if (run_dual(t, allowed, iterations, max_iterations) == PhaseResult::Infeasible)
      return PhaseResult::Infeasible;
    bool improvable = false;
    for (std::size_t j = 0; j < t.cols() && !improvable; ++j)
      improvable = allowed[j] && t.cost(j) > kReducedCostTol;
    if (!improvable || round == 20) return PhaseResult::Optimal;
  }
}

}  // namespace

Solution solve(const Problem& p, double tol) {
  p.validate();
  const std::size_t n = p.num_vars();
  Solution out;

  // Singleton rows become bounds; everything else stays a row.
  std::vector<std::optional<double>> lo = p.lower();
  std::vector<std::optional<double>> hi = p.upper();
  auto singleton = [](const std::vector<double>& row, std::size_t& idx) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) {
        idx = j;
        if (++count > 1) return false;
      }
    }
    return count == 1;
  };
  auto tighten_lo = [&](std::size_t j, double v) {
    if (!lo[j] || v > *lo[j]) lo[j] = v;
  };
  auto tighten_hi = [&](std::size_t j, double v) {
    if (!hi[j] || v < *hi[j]) hi[j] = v;
  };

  std::vector<const Constraint*> le_rows;
  std::vector<const Constraint*> eq_rows;
  for (const auto& c : p.ineq()) {
    std::size_t j = 0;
    if (singleton(c.coeffs, j)) {
      const double a = c.coeffs[j];
      if (a > 0) tighten_hi(j, c.rhs / a);
      else tighten_lo(j, c.rhs / a);
    } else if (std::all_of(c.coeffs.begin(), c.coeffs.end(),
                           [](double v) { return v == 0.0; })) {
      if (c.rhs < -tol) return out;  // 0 <= negative
    } else {
      le_rows.push_back(&c);
    }
  }
  for (const auto& c : p.eq()) {
    std::size_t j = 0;
    if (singleton(c.coeffs, j)) {
      const double v = c.rhs / c.coeffs[j];
      tighten_lo(j, v);
      tighten_hi(j, v);
    } else if (std::all_of(c.coeffs.begin(), c.coeffs.end(),
                           [](double v) { return v == 0.0; })) {
      if (std::abs(c.rhs) > tol) return out;
    } else {
      eq_rows.push_back(&c);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (lo[j] && hi[j] && *lo[j] > *hi[j]) {
      if (*lo[j] > *hi[j] + tol) return out;
      hi[j] = lo[j];
    }
  }

  // Map every variable onto nonnegative structural columns.
  std::vector<ColumnMap> map(n);
  std::size_t ny = 0;
  std::vector<StdRow> rows;
  for (std::size_t j = 0; j < n; ++j) {
    ColumnMap& cm = map[j];
    if (lo[j]) {
      cm.kind = ColumnMap::Kind::Shifted;
      cm.col = ny++;
      cm.offset = *lo[j];
    } else if (hi[j]) {
      cm.kind = ColumnMap::Kind::Negated;
      cm.col = ny++;
      cm.offset = *hi[j];
    } else {
      cm.kind = ColumnMap::Kind::Free;
      cm.col = ny++;
      cm.col_neg = ny++;
    }
  }
  auto transform = [&](const Constraint& c, RowSense sense) {
    StdRow r{std::vector<double>(ny, 0.0), c.rhs, sense};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = c.coeffs[j];
      if (a == 0.0) continue;
      const ColumnMap& cm = map[j];
      switch (cm.kind) {
        case ColumnMap::Kind::Shifted:
          r.coeffs[cm.col] += a;
          r.rhs -= a * cm.offset;
          break;
        case ColumnMap::Kind::Negated:
          r.coeffs[cm.col] -= a;
          r.rhs -= a * cm.offset;
          break;
        case ColumnMap::Kind::Free:
          r.coeffs[cm.col] += a;
          r.coeffs[cm.col_neg] -= a;
          break;
      }
    }
    return r;
  };
  for (const Constraint* c : le_rows) rows.push_back(transform(*c, RowSense::Le));
  for (const Constraint* c : eq_rows) rows.push_back(transform(*c, RowSense::Eq));
  for (std::size_t j = 0; j < n; ++j) {
    if (map[j].kind == ColumnMap::Kind::Shifted && hi[j]) {
      StdRow r{std::vector<double>(ny, 0.0), *hi[j] - *lo[j], RowSense::Le};
      r.coeffs[map[j].col] = 1.0;
      rows.push_back(std::move(r));
    }
  }

  // Column layout: structural | slack (one per Le row) | artificial.
  const std::size_t m = rows.size();
  std::size_t num_slack = 0;
  std::size_t num_art = 0;
  for (const auto& r : rows) {
    if (r.sense == RowSense::Le) ++num_slack;
    if (r.sense == RowSense::Eq || r.rhs < 0) ++num_art;
  }
  const std::size_t cols = ny + num_slack + num_art;
  Tableau t(m, cols);
  std::vector<bool> is_art(cols, false);
  std::vector<std::size_t> unit_cols(m);
  {
    std::size_t s = ny;
    std::size_t a = ny + num_slack;
    for (std::size_t i = 0; i < m; ++i) {
      const StdRow& r = rows[i];
      const double sign = r.rhs < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < ny; ++j) t.at(i, j) = sign * r.coeffs[j];
      t.rhs(i) = sign * r.rhs;
      if (r.sense == RowSense::Le) {
        t.at(i, s) = sign;
        if (sign > 0) {
          t.basis()[i] = s;
          unit_cols[i] = s;
        } else {
          unit_cols[i] = a;
          t.at(i, a) = 1.0;
          is_art[a] = true;
          t.basis()[i] = a++;
        }
        ++s;
      } else {
        unit_cols[i] = a;
        t.at(i, a) = 1.0;
        is_art[a] = true;
        t.basis()[i] = a++;
      }
    }
  }

  std::vector<double> b(m);
  for (std::size_t i = 0; i < m; ++i) b[i] = t.rhs(i);

  const std::size_t max_iterations = 200000 + 50 * (m + cols);
  std::size_t iterations = 0;
  std::vector<bool> allowed(cols, true);

  if (num_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_art[j]) phase1[j] = -1.0;
    }
    optimize(t, phase1, allowed, b, unit_cols, iterations, max_iterations);
    if (-t.objective() > tol) {
      out.status = Status::Infeasible;
      out.iterations = iterations;
      return out;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_art[t.basis()[i]]) continue;
      std::size_t best_j = cols;
      double best_a = kPivotTol;
      for (std::size_t j = 0; j < cols; ++j) {
        if (is_art[j]) continue;
        const double a = std::abs(t.at(i, j));
        if (a > best_a) {
          best_a = a;
          best_j = j;
        }
      }
      if (best_j != cols) {
        t.rhs(i) = 0.0;
        t.pivot(i, best_j);
      }
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (is_art[j]) allowed[j] = false;
    }
  }

  std::vector<double> phase2(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = p.objective()[j];
    const ColumnMap& cm = map[j];
    switch (cm.kind) {
      case ColumnMap::Kind::Shifted: phase2[cm.col] += c; break;
      case ColumnMap::Kind::Negated: phase2[cm.col] -= c; break;
      case ColumnMap::Kind::Free:
        phase2[cm.col] += c;
        phase2[cm.col_neg] -= c;
        break;
    }
  }
  const PhaseResult r = optimize(t, phase2, allowed, b, unit_cols, iterations, max_iterations);
  out.iterations = iterations;
  if (r == PhaseResult::Unbounded) {
    out.status = Status::Unbounded;
    return out;
  }
  if (r == PhaseResult::Infeasible) {
    out.status = Status::Infeasible;
    return out;
  }

  std::vector<double> y(cols, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  out.primal.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const ColumnMap& cm = map[j];
    switch (cm.kind) {
      case ColumnMap::Kind::Shifted: out.primal[j] = cm.offset + y[cm.col]; break;
      case ColumnMap::Kind::Negated: out.primal[j] = cm.offset - y[cm.col]; break;
      case ColumnMap::Kind::Free: out.primal[j] = y[cm.col] - y[cm.col_neg]; break;
    }
  }
  out.status = Status::Optimal;
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += p.objective()[j] * out.primal[j];
  out.objective_value = obj;
  return out;
}

FeasibilityCheck check_feasible(const Problem& p, std::span<const double> v,
                                double tol) {
  if (v.size() != p.num_vars()) {
    throw std::invalid_argument("point length does not match num_vars");
  }
  double worst = -std::numeric_limits<double>::infinity();
  auto dot = [&](const std::vector<double>& row) {
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * v[j];
    return s;
  };
  for (const auto& c : p.ineq()) worst = std::max(worst, dot(c.coeffs) - c.rhs);
  for (const auto& c : p.eq()) worst = std::max(worst, std::abs(dot(c.coeffs) - c.rhs));
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    if (p.lower()[j]) worst = std::max(worst, *p.lower()[j] - v[j]);
    if (p.upper()[j]) worst = std::max(worst, v[j] - *p.upper()[j]);
  }
  if (worst == -std::numeric_limits<double>::infinity()) worst = 0.0;
  return {worst <= tol, worst};
}

}  // namespace pacoord::lp
