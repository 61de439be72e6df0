#pragma once

// Dense two-phase primal simplex for the small linear programs that arise in
// the E_gamma converse solver. Sizes stay in the low hundreds of rows, so a
// plain tableau with Dantzig pricing (Bland fallback against cycling) is
// adequate.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace wiretap {

/// min c'x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  x >= 0
struct LpProblem {
    std::vector<double> c;
    std::vector<std::vector<double>> a_ub;
    std::vector<double> b_ub;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
};

struct LpSolution {
    bool feasible = false;
    bool bounded = true;
    double value = 0.0;
    std::vector<double> x;
};

namespace detail {

class SimplexTableau {
  public:
    SimplexTableau(const LpProblem& lp) {
        n_ = lp.c.size();
        m_ub_ = lp.a_ub.size();
        m_ = m_ub_ + lp.a_eq.size();
        cols_ = n_ + m_ub_ + m_;  // structurals, slacks, artificials
        t_.assign(m_ + 1, std::vector<double>(cols_ + 1, 0.0));
        basis_.assign(m_, 0);

        for (size_t i = 0; i < m_; ++i) {
            const auto& row = i < m_ub_ ? lp.a_ub[i] : lp.a_eq[i - m_ub_];
            double b = i < m_ub_ ? lp.b_ub[i] : lp.b_eq[i - m_ub_];
            if (row.size() != n_) throw std::domain_error("solve_lp: ragged constraint row");
            double sign = b < 0.0 ? -1.0 : 1.0;
            for (size_t j = 0; j < n_; ++j) t_[i][j] = sign * row[j];
            if (i < m_ub_) t_[i][n_ + i] = sign;  // slack
            t_[i][n_ + m_ub_ + i] = 1.0;          // artificial
            t_[i][cols_] = sign * b;
            basis_[i] = n_ + m_ub_ + i;
        }
    }

    bool phase1() {
        // objective: minimize the sum of artificials
        auto& obj = t_[m_];
        std::fill(obj.begin(), obj.end(), 0.0);
        for (size_t j = n_ + m_ub_; j < cols_; ++j) obj[j] = 1.0;
        price_out();
        run(/*artificials_allowed=*/true);
        if (t_[m_][cols_] < -1e-8) return false;  // positive artificial residue
        // pivot any leftover artificial out of the basis
        for (size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_ + m_ub_) continue;
            size_t enter = SIZE_MAX;
            for (size_t j = 0; j < n_ + m_ub_; ++j)
                if (std::abs(t_[i][j]) > 1e-10) {
                    enter = j;
                    break;
                }
            if (enter != SIZE_MAX) pivot(i, enter);
            // an all-zero row is a redundant constraint; the artificial stays
            // basic at value zero, which is harmless
        }
        return true;
    }

    void phase2(const std::vector<double>& c) {
        auto& obj = t_[m_];
        std::fill(obj.begin(), obj.end(), 0.0);
        for (size_t j = 0; j < n_; ++j) obj[j] = c[j];
        price_out();
        run(/*artificials_allowed=*/false);
    }

    bool bounded() const { return bounded_; }

    LpSolution extract(const std::vector<double>& c) const {
        LpSolution s;
        s.feasible = true;
        s.bounded = bounded_;
        s.x.assign(n_, 0.0);
        for (size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) s.x[basis_[i]] = t_[i][cols_];
        s.value = 0.0;
        for (size_t j = 0; j < n_; ++j) s.value += c[j] * s.x[j];
        return s;
    }

  private:
    void price_out() {
        for (size_t i = 0; i < m_; ++i) {
            double coef = t_[m_][basis_[i]];
            if (coef == 0.0) continue;
            for (size_t j = 0; j <= cols_; ++j) t_[m_][j] -= coef * t_[i][j];
        }
    }

    void pivot(size_t row, size_t col) {
        double pv = t_[row][col];
        for (size_t j = 0; j <= cols_; ++j) t_[row][j] /= pv;
        for (size_t i = 0; i <= m_; ++i) {
            if (i == row) continue;
            double f = t_[i][col];
            if (f == 0.0) continue;
            for (size_t j = 0; j <= cols_; ++j) t_[i][j] -= f * t_[row][j];
        }
        basis_[row] = col;
    }

    void run(bool artificials_allowed) {
        const size_t usable = artificials_allowed ? cols_ : n_ + m_ub_;
        for (long iter = 0; iter < 50000; ++iter) {
            const bool bland = iter > 5000;
            size_t enter = SIZE_MAX;
            double best = -1e-9;
            for (size_t j = 0; j < usable; ++j) {
                double rc = t_[m_][j];
                if (rc < best) {
                    enter = j;
                    if (bland && rc < -1e-9) break;
                    best = rc;
                }
            }
            if (enter == SIZE_MAX) return;  // optimal
            size_t leave = SIZE_MAX;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < m_; ++i) {
                double a = t_[i][enter];
                if (a > 1e-11) {
                    double ratio = t_[i][cols_] / a;
                    if (ratio < best_ratio - 1e-12 ||
                        (ratio < best_ratio + 1e-12 && leave != SIZE_MAX &&
                         basis_[i] < basis_[leave])) {
                        best_ratio = ratio;
                        leave = i;
                    }
                }
            }
            if (leave == SIZE_MAX) {
                bounded_ = false;
                return;
            }
            pivot(leave, enter);
        }
        throw std::runtime_error("solve_lp: simplex iteration limit reached");
    }

    size_t n_, m_ub_, m_, cols_;
    std::vector<std::vector<double>> t_;
    std::vector<size_t> basis_;
    bool bounded_ = true;
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& lp) {
    detail::SimplexTableau tab(lp);
    if (!tab.phase1()) return {};  // infeasible
    tab.phase2(lp.c);
    return tab.extract(lp.c);
}

}  // namespace wiretap
