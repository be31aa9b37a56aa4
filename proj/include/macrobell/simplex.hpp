#pragma once

// Dense two-phase simplex for small standard-form programs
//
//   minimize c'x  subject to  A x = b,  x >= 0
//
// Bland's rule is used for both the entering and the leaving variable, so the
// method terminates without cycling. Redundant equality rows (common when the
// constraints are probability tables) are detected after phase 1 and dropped.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace macrobell::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

template <typename T>
struct Result {
  Status status = Status::IterationLimit;
  std::vector<T> x;
  T objective{};
  T phase1_residual{};  // sum of artificials at the end of phase 1
  int iterations = 0;
};

template <typename T>
struct Options {
  T pivot_tol = T(1e-11);
  T cost_tol = T(1e-11);
  T feasibility_tol = T(1e-8);
  int max_iterations = 5000;
};

template <typename T>
class DenseSimplex {
 public:
  using Matrix = std::vector<std::vector<T>>;

  DenseSimplex(Matrix a, std::vector<T> b, std::vector<T> c, Options<T> opt = {})
      : m_(b.size()), n_(c.size()), artificials_(b.size()), opt_(opt), cost_(std::move(c)) {
    // Tableau columns: n structural, m artificial, then the right-hand side.
    tab_.assign(m_, std::vector<T>(n_ + m_ + 1, T(0)));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const bool flip = b[i] < T(0);
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = flip ? -a[i][j] : a[i][j];
      tab_[i][n_ + i] = T(1);
      tab_[i][rhs()] = flip ? -b[i] : b[i];
      basis_[i] = n_ + i;
    }
  }

  Result<T> solve() {
    Result<T> res;

    // Phase 1: minimize the sum of artificials.
    std::vector<T> phase1(n_ + m_, T(0));
    for (std::size_t j = n_; j < n_ + m_; ++j) phase1[j] = T(1);
    const Status s1 = optimize(phase1, n_ + m_, res.iterations);
    if (s1 == Status::IterationLimit) {
      res.status = s1;
      return res;
    }
    T art = T(0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) art += tab_[i][rhs()];
    res.phase1_residual = art;
    if (art > opt_.feasibility_tol) {
      res.status = Status::Infeasible;
      return res;
    }

    // Drive zero-level artificials out of the basis, or drop their rows.
    for (std::size_t i = 0; i < m_;) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      std::size_t col = n_;
      T best = opt_.pivot_tol;
      for (std::size_t j = 0; j < n_; ++j)
        if (abs_(tab_[i][j]) > best) {
          best = abs_(tab_[i][j]);
          col = j;
        }
      if (col < n_) {
        pivot(i, col);
        ++i;
      } else {
        tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        --m_;
      }
    }

    // Phase 2 over structural columns only.
    std::vector<T> phase2(n_ + artificials_, T(0));
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = cost_[j];
    const Status s2 = optimize(phase2, n_, res.iterations);
    res.status = s2;
    res.x.assign(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) res.x[basis_[i]] = tab_[i][rhs()];
    res.objective = T(0);
    for (std::size_t j = 0; j < n_; ++j) res.objective += cost_[j] * res.x[j];
    return res;
  }

 private:
  static T abs_(T v) { return v < T(0) ? -v : v; }
  std::size_t rhs() const { return n_ + artificials_; }

  void pivot(std::size_t r, std::size_t c) {
    const std::size_t width = rhs() + 1;
    const T p = tab_[r][c];
    for (std::size_t j = 0; j < width; ++j) tab_[r][j] /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const T f = tab_[i][c];
      if (f == T(0)) continue;
      for (std::size_t j = 0; j < width; ++j) tab_[i][j] -= f * tab_[r][j];
    }
    basis_[r] = c;
  }

  // Minimizes cost over columns [0, allowed). Reduced costs are recomputed from
  // the current basis each iteration; the tableau is tiny.
  Status optimize(const std::vector<T>& cost, std::size_t allowed, int& iterations) {
    for (;;) {
      if (iterations >= opt_.max_iterations) return Status::IterationLimit;
      std::size_t enter = allowed;
      for (std::size_t j = 0; j < allowed; ++j) {
        T reduced = cost[j];
        for (std::size_t i = 0; i < m_; ++i) reduced -= cost[basis_[i]] * tab_[i][j];
        if (reduced < -opt_.cost_tol) {
          enter = j;
          break;
        }
      }
      if (enter == allowed) return Status::Optimal;

      std::size_t leave = m_;
      T best_ratio{};
      for (std::size_t i = 0; i < m_; ++i) {
        const T a = tab_[i][enter];
        if (a <= opt_.pivot_tol) continue;
        const T ratio = tab_[i][rhs()] / a;
        if (leave == m_ || ratio < best_ratio ||
            (!(best_ratio < ratio) && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return Status::Unbounded;
      pivot(leave, enter);
      ++iterations;
    }
  }

  std::size_t m_, n_, artificials_;
  Options<T> opt_;
  std::vector<T> cost_;
  Matrix tab_;
  std::vector<std::size_t> basis_;
};

template <typename T>
Result<T> solve(typename DenseSimplex<T>::Matrix a, std::vector<T> b, std::vector<T> c, Options<T> opt = {}) {
  return DenseSimplex<T>(std::move(a), std::move(b), std::move(c), opt).solve();
}

}  // namespace macrobell::lp
