#include "quantlets/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quantlets/errors.hpp"

namespace quantlets {

namespace {

constexpr double kTol = 1e-7;
constexpr int kMaxSweeps = 10000;

inline double soft_threshold(double g, double t) {
  if (g > t) return g - t;
  if (g < -t) return g + t;
  return 0.0;
}

// Cyclic coordinate descent in covariance form: the correlation vector
// c = X^T (y - X beta) is maintained incrementally, so a sweep over the
// working set costs O(|W|) reads plus O(p) per coefficient that moves, and
// KKT confirmation is a plain scan of c.  Gram rows are built lazily, in
// batches, for the columns that ever enter the working set.
//
// Overcomplete dictionaries carry many nearly collinear columns, where plain
// cyclic descent crawls (mass trades between near-duplicates at a geometric
// rate arbitrarily close to one).  An active-set refinement in the spirit of
// feature-sign search fixes that: solve the sign-fixed KKT system on the
// active columns exactly, line-search to the first zero crossing when a sign
// flips, and admit the worst violator one at a time.  Every refinement is
// confirmed by an ordinary sweep, so the solver still lands on a coordinate
// descent fixed point under the usual tolerance.
class CdSolver {
 public:
  CdSolver(const Eigen::Ref<const Eigen::MatrixXd>& X,
           const Eigen::Ref<const Eigen::VectorXd>& y, int n_unpenalized)
      : X_(X),
        y_(y),
        n_unpen_(n_unpenalized),
        beta_(Eigen::VectorXd::Zero(X.cols())),
        c0_(X.transpose() * y),
        c_(c0_),
        gram_index_(X.cols(), -1),
        in_working_(X.cols(), 0),
        is_active_(X.cols(), 0) {
    col_norm2_ = X.colwise().squaredNorm();
    gram_.resize(X.cols(), 0);
    std::vector<Eigen::Index> pair;
    for (Eigen::Index k = 0; k < n_unpen_; ++k) pair.push_back(k);
    admit(pair);
  }

  LassoFit solve(double lambda, std::vector<double>* objective_trace) {
    const Eigen::Index p = X_.cols();
    int sweeps = 0;
    bool converged = false;

    // sequential strong rule screen on the maintained correlations; the
    // exact KKT boundary is used when there is no previous lambda
    {
      const double screen =
          std::isfinite(last_lambda_) && last_lambda_ > lambda
              ? 2.0 * lambda - last_lambda_
              : lambda;
      std::vector<Eigen::Index> add;
      for (Eigen::Index k = n_unpen_; k < p; ++k)
        if (!in_working_[k] && std::fabs(c_[k]) >= 0.5 * screen)
          add.push_back(k);
      admit(add);
    }
    last_lambda_ = lambda;

    auto record = [&]() {
      if (!objective_trace) return;
      double l1 = 0.0;
      for (Eigen::Index k = n_unpen_; k < p; ++k) l1 += std::fabs(beta_[k]);
      objective_trace->push_back((y_ - X_ * beta_).squaredNorm() +
                                 lambda * l1);
    };

    record();
    while (sweeps < kMaxSweeps) {
      const bool refined = active_set_refine(lambda);
      double mc = 0.0;
      for (Eigen::Index k : working_) mc = std::max(mc, update(k, lambda));
      ++sweeps;
      record();
      if (mc >= kTol) {
        if (!refined) {
          // plain descent burst before the next refinement attempt
          const int burst_end = std::min(sweeps + 8, kMaxSweeps);
          while (sweeps < burst_end) {
            mc = 0.0;
            for (Eigen::Index k : working_)
              mc = std::max(mc, update(k, lambda));
            ++sweeps;
            record();
            if (mc < kTol) break;
          }
        }
        continue;
      }
      // stable on the working set: confirm KKT on the excluded columns
      std::vector<Eigen::Index> add;
      for (Eigen::Index k = n_unpen_; k < p; ++k)
        if (!in_working_[k] && std::fabs(c_[k]) > 0.5 * lambda * (1.0 + 1e-12))
          add.push_back(k);
      if (add.empty()) {
        converged = sweeps < kMaxSweeps;
        break;
      }
      admit(add);
    }
    return {beta_, converged, sweeps};
  }

  void set_state(const Eigen::VectorXd& beta) {
    beta_ = beta;
    c_ = X_.transpose() * (y_ - X_ * beta_);
    std::vector<Eigen::Index> add;
    for (Eigen::Index k = 0; k < X_.cols(); ++k)
      if (!in_working_[k] && beta_[k] != 0.0) add.push_back(k);
    admit(add);
    last_lambda_ = std::numeric_limits<double>::infinity();
  }

 private:
  void admit(const std::vector<Eigen::Index>& cols) {
    std::vector<Eigen::Index> fresh;
    for (Eigen::Index k : cols) {
      if (in_working_[k]) continue;
      in_working_[k] = 1;
      working_.push_back(k);
      if (gram_index_[k] < 0) fresh.push_back(k);
    }
    if (fresh.empty()) return;
    // batched gram rows: G(:, fresh) = X^T X_fresh
    Eigen::MatrixXd block(X_.rows(), fresh.size());
    for (std::size_t j = 0; j < fresh.size(); ++j)
      block.col(j) = X_.col(fresh[j]);
    const Eigen::Index base = gram_.cols();
    gram_.conservativeResize(Eigen::NoChange, base + fresh.size());
    gram_.rightCols(fresh.size()).noalias() = X_.transpose() * block;
    for (std::size_t j = 0; j < fresh.size(); ++j)
      gram_index_[fresh[j]] = static_cast<int>(base + j);
  }

  double update(Eigen::Index k, double lambda) {
    const double nk = col_norm2_[k];
    if (nk <= 0.0) return 0.0;
    const double bk = beta_[k];
    const double g = c_[k] + nk * bk;
    const double bn =
        (k < n_unpen_) ? g / nk : soft_threshold(g, 0.5 * lambda) / nk;
    const double delta = bn - bk;
    if (delta != 0.0) {
      c_.noalias() -= delta * gram_.col(gram_index_[k]);
      beta_[k] = bn;
    }
    return std::fabs(delta);
  }

  struct Member {
    Eigen::Index col;
    double sign;  // 0 for the unpenalized block
    int corrections = 0;
  };

  bool active_set_refine(double lambda) {
    std::vector<Member> active;
    for (Eigen::Index k : working_) {
      if (k < n_unpen_)
        active.push_back({k, 0.0, 0});
      else if (beta_[k] != 0.0)
        active.push_back({k, beta_[k] > 0.0 ? 1.0 : -1.0, 0});
    }
    if (active.size() > 800) return false;
    for (const Member& m : active) is_active_[m.col] = 1;
    const bool ok = refine_loop(lambda, active);
    for (const Member& m : active) is_active_[m.col] = 0;
    return ok;
  }

  bool refine_loop(double lambda, std::vector<Member>& active) {
    int additions = 60;
    bool installed = false;
    for (int round = 0; round < 400; ++round) {
      const Eigen::Index na = static_cast<Eigen::Index>(active.size());
      if (na == 0) return installed;
      Eigen::MatrixXd gaa(na, na);
      Eigen::VectorXd rhs(na), cur(na);
      for (Eigen::Index j = 0; j < na; ++j) {
        const auto col = gram_.col(gram_index_[active[j].col]);
        for (Eigen::Index i = 0; i < na; ++i) gaa(i, j) = col[active[i].col];
        rhs[j] = c0_[active[j].col] - 0.5 * lambda * active[j].sign;
        cur[j] = beta_[active[j].col];
      }
      // tiny ridge: near-duplicate columns leave the objective flat along
      // null directions and any point on the flat set is acceptable; the
      // confirmation sweep is the arbiter either way
      gaa.diagonal().array() += 1e-10 * gaa.trace() / na;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(gaa);
      if (ldlt.info() != Eigen::Success) return installed;
      const Eigen::VectorXd sol = ldlt.solve(rhs);
      if ((gaa * sol - rhs).cwiseAbs().maxCoeff() >
          1e-6 * (1.0 + rhs.cwiseAbs().maxCoeff()))
        return installed;

      // entering coordinates whose sign guess was wrong flip in place once,
      // then leave
      bool corrected = false;
      for (std::size_t j = 0; j < active.size();) {
        Member& m = active[j];
        if (m.sign != 0.0 && beta_[m.col] == 0.0 &&
            sol[static_cast<Eigen::Index>(j)] * m.sign < 0.0) {
          corrected = true;
          if (++m.corrections > 1) {
            is_active_[m.col] = 0;
            active.erase(active.begin() + j);
            continue;
          }
          m.sign = -m.sign;
        }
        ++j;
      }
      if (corrected) continue;

      // step toward the solution, stopping at the first zero crossing
      double t = 1.0;
      for (Eigen::Index j = 0; j < na; ++j) {
        if (active[j].sign == 0.0 || sol[j] * active[j].sign >= 0.0) continue;
        const double denom = cur[j] - sol[j];
        if (denom != 0.0) t = std::min(t, std::max(0.0, cur[j] / denom));
      }
      Eigen::VectorXd next = cur + t * (sol - cur);
      for (Eigen::Index j = 0; j < na; ++j) beta_[active[j].col] = next[j];

      if (t < 1.0) {
        const double scale = std::max(next.cwiseAbs().maxCoeff(), 1e-300);
        const std::size_t before = active.size();
        for (std::size_t j = 0; j < active.size();) {
          if (active[j].sign != 0.0 &&
              std::fabs(beta_[active[j].col]) <= 1e-14 * scale) {
            beta_[active[j].col] = 0.0;
            is_active_[active[j].col] = 0;
            active.erase(active.begin() + j);
          } else {
            ++j;
          }
        }
        if (active.size() == before) return installed;  // no progress
        continue;
      }

      // full step: refresh c exactly and admit the worst violator, if any
      c_ = c0_;
      for (const Member& m : active)
        if (beta_[m.col] != 0.0)
          c_.noalias() -= beta_[m.col] * gram_.col(gram_index_[m.col]);
      installed = true;
      if (additions-- <= 0) return true;
      Eigen::Index worst = -1;
      double worst_excess = 0.5 * lambda * 1e-12;
      for (Eigen::Index k = n_unpen_; k < X_.cols(); ++k) {
        if (is_active_[k]) continue;
        const double excess = std::fabs(c_[k]) - 0.5 * lambda;
        if (excess > worst_excess) {
          worst_excess = excess;
          worst = k;
        }
      }
      if (worst < 0) return true;
      admit({worst});
      is_active_[worst] = 1;
      active.push_back({worst, c_[worst] > 0.0 ? 1.0 : -1.0, 0});
    }
    return installed;
  }

  const Eigen::Ref<const Eigen::MatrixXd> X_;
  Eigen::VectorXd y_;
  Eigen::Index n_unpen_;
  Eigen::VectorXd col_norm2_;
  Eigen::VectorXd beta_;
  Eigen::VectorXd c0_;  // X^T y
  Eigen::VectorXd c_;   // X^T (y - X beta)
  Eigen::MatrixXd gram_;
  std::vector<int> gram_index_;
  std::vector<Eigen::Index> working_;
  std::vector<char> in_working_;
  std::vector<char> is_active_;
  double last_lambda_ = std::numeric_limits<double>::infinity();
};

}  // namespace

LassoFit lasso_fit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                   const Eigen::Ref<const Eigen::VectorXd>& y, double lambda,
                   int n_unpenalized, const Eigen::VectorXd* warm_start,
                   std::vector<double>* objective_trace) {
  if (!(lambda > 0.0)) throw ConfigError("lasso_fit: lambda must be > 0");
  if (X.rows() != y.size())
    throw ValidationError("lasso_fit: design/response size mismatch");
  CdSolver solver(X, y, n_unpenalized);
  if (warm_start) solver.set_state(*warm_start);
  return solver.solve(lambda, objective_trace);
}

Eigen::VectorXd lambda_path(const Eigen::Ref<const Eigen::MatrixXd>& X,
                            const Eigen::Ref<const Eigen::VectorXd>& y,
                            int n_unpenalized, int length, double min_ratio) {
  if (length < 2 || !(min_ratio > 0.0 && min_ratio < 1.0))
    throw ConfigError("lambda_path: degenerate path configuration");
  // residual after fitting the unpenalized block alone
  Eigen::VectorXd r = y;
  if (n_unpenalized > 0) {
    const auto Xu = X.leftCols(n_unpenalized);
    r -= Xu * (Xu.transpose() * Xu).ldlt().solve(Xu.transpose() * y);
  }
  double lmax = 0.0;
  for (Eigen::Index k = n_unpenalized; k < X.cols(); ++k)
    lmax = std::max(lmax, 2.0 * std::fabs(X.col(k).dot(r)));
  if (lmax <= 0.0) lmax = 1.0;  // response already in the unpenalized span
  Eigen::VectorXd path(length);
  const double step = std::pow(min_ratio, 1.0 / (length - 1));
  double v = lmax;
  for (int i = 0; i < length; ++i, v *= step) path[i] = v;
  return path;
}

CvChoice cv_lambda(const Eigen::Ref<const Eigen::MatrixXd>& X,
                   const Eigen::Ref<const Eigen::VectorXd>& y, int n_folds,
                   const Eigen::VectorXd& path_in, std::uint64_t seed,
                   int n_unpenalized) {
  (void)seed;  // folds are interleaved by rank, nothing random to drive
  const Eigen::Index m = X.rows();
  if (n_folds < 2) throw ConfigError("cv_lambda: need at least 2 folds");
  if (m < 2 * n_folds)
    throw ConfigError("cv_lambda: grid shorter than 2 * n_folds");

  CvChoice out;
  out.path = path_in.size() ? path_in : lambda_path(X, y, n_unpenalized);
  for (Eigen::Index i = 1; i < out.path.size(); ++i)
    if (!(out.path[i] < out.path[i - 1]))
      throw ConfigError("cv_lambda: path must be strictly decreasing");
  out.cv_error = Eigen::VectorXd::Zero(out.path.size());

  for (int f = 0; f < n_folds; ++f) {
    const Eigen::Index n_ho = (m - 1 - f) / n_folds + 1;
    Eigen::MatrixXd Xtr(m - n_ho, X.cols());
    Eigen::VectorXd ytr(m - n_ho);
    Eigen::MatrixXd Xho(n_ho, X.cols());
    Eigen::VectorXd yho(n_ho);
    Eigen::Index it = 0, ih = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j % n_folds == f) {
        Xho.row(ih) = X.row(j);
        yho[ih++] = y[j];
      } else {
        Xtr.row(it) = X.row(j);
        ytr[it++] = y[j];
      }
    }
    CdSolver solver(Xtr, ytr, n_unpenalized);
    for (Eigen::Index i = 0; i < out.path.size(); ++i) {
      const LassoFit fit = solver.solve(out.path[i], nullptr);
      // held-out error from the sparse coefficient vector
      Eigen::VectorXd pred = Eigen::VectorXd::Zero(n_ho);
      for (Eigen::Index k = 0; k < fit.beta.size(); ++k)
        if (fit.beta[k] != 0.0) pred += fit.beta[k] * Xho.col(k);
      out.cv_error[i] += (yho - pred).squaredNorm() / n_ho;
    }
  }
  out.cv_error /= n_folds;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < out.cv_error.size(); ++i)
    if (out.cv_error[i] < out.cv_error[best]) best = i;
  out.index = static_cast<int>(best);
  out.lambda = out.path[best];
  return out;
}

}  // namespace quantlets
