#include "dstyle/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <json.hpp>

#include "dstyle/csv.hpp"
#include "dstyle/errors.hpp"

namespace dstyle {

const char* to_string(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::kmeans: return "kmeans";
    case ClusterMethod::gmm: return "gmm";
    case ClusterMethod::fcm: return "fcm";
    case ClusterMethod::agglomerative: return "agglomerative";
  }
  return "unknown";
}

ClusterMethod cluster_method_from_string(const std::string& s) {
  if (s == "kmeans") return ClusterMethod::kmeans;
  if (s == "gmm") return ClusterMethod::gmm;
  if (s == "fcm") return ClusterMethod::fcm;
  if (s == "agglomerative") return ClusterMethod::agglomerative;
  throw ConfigError("InvalidMethod", "unknown clustering method '" + s + "'");
}

Standardization fit_standardization(const Eigen::MatrixXd& X) {
  Standardization s;
  s.mean = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - s.mean.transpose();
  s.stddev = (centered.array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < s.stddev.size(); ++j)
    if (s.stddev(j) <= 0.0) s.stddev(j) = 1.0;
  return s;
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& s) {
  Eigen::MatrixXd Y = X.rowwise() - s.mean.transpose();
  Y.array().rowwise() /= s.stddev.transpose().array();
  return Y;
}

namespace {

double sqdist(const Eigen::MatrixXd& X, Eigen::Index i, const Eigen::RowVectorXd& c) {
  return (X.row(i) - c).squaredNorm();
}

std::uint64_t mix_seed(unsigned long seed, int salt) {
  std::uint64_t z = static_cast<std::uint64_t>(seed) + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& X, int k, std::mt19937_64& rng) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd centers(k, X.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = X.row(first(rng));

  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = sqdist(X, i, centers.row(0));

  for (int c = 1; c < k; ++c) {
    double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = X.row(pick);
    for (Eigen::Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), sqdist(X, i, centers.row(c)));
  }
  return centers;
}

void assign_nearest(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers,
                    std::vector<int>& assign) {
  const Eigen::Index n = X.rows();
  const int k = static_cast<int>(centers.rows());
  assign.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double bd = sqdist(X, i, centers.row(0));
    for (int c = 1; c < k; ++c) {
      double d = sqdist(X, i, centers.row(c));
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    assign[i] = best;
  }
}

double wcss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& centers,
            const std::vector<int>& assign) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) s += sqdist(X, i, centers.row(assign[i]));
  return s;
}

struct KmeansRun {
  Eigen::MatrixXd centers;
  std::vector<int> assign;
  std::vector<double> trace;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_single(const Eigen::MatrixXd& X, int k, const ClusterOptions& opt,
                        std::mt19937_64& rng) {
  KmeansRun run;
  run.centers = kmeanspp_seed(X, k, rng);
  const Eigen::Index n = X.rows();

  for (int iter = 0; iter < opt.max_iter; ++iter) {
    assign_nearest(X, run.centers, run.assign);

    // Re-seat empty clusters on the point farthest from its center.
    for (int c = 0; c < k; ++c) {
      if (std::count(run.assign.begin(), run.assign.end(), c) > 0) continue;
      Eigen::Index far = 0;
      double fd = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double d = sqdist(X, i, run.centers.row(run.assign[i]));
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      run.centers.row(c) = X.row(far);
      run.assign[far] = c;
    }

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, X.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.row(run.assign[i]) += X.row(i);
      count(run.assign[i]) += 1.0;
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (count(c) > 0.0) next.row(c) /= count(c);
      else next.row(c) = run.centers.row(c);
      shift = std::max(shift, (next.row(c) - run.centers.row(c)).norm());
    }
    run.centers = next;
    run.trace.push_back(wcss(X, run.centers, run.assign));
    if (shift <= opt.tol) break;
  }
  assign_nearest(X, run.centers, run.assign);
  run.inertia = wcss(X, run.centers, run.assign);
  return run;
}

KmeansRun kmeans_fit(const Eigen::MatrixXd& X, const ClusterOptions& opt) {
  KmeansRun best;
  for (int r = 0; r < std::max(1, opt.restarts); ++r) {
    std::mt19937_64 rng(mix_seed(opt.seed, r));
    KmeansRun run = kmeans_single(X, opt.k, opt, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

// --- Gaussian mixture ---

struct GmmState {
  Eigen::MatrixXd means;                  // k x d
  std::vector<Eigen::MatrixXd> covs;      // k of d x d
  Eigen::VectorXd mixing;                 // k
};

struct CovFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double logdet = 0.0;
};

CovFactor factor_covariance(const Eigen::MatrixXd& cov) {
  CovFactor f;
  f.llt.compute(cov);
  if (f.llt.info() != Eigen::Success) {
    // One regularization retry before giving up.
    double bump = std::max(1e-3 * cov.trace() / cov.rows(), 1e-8);
    Eigen::MatrixXd fixed = cov + bump * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    f.llt.compute(fixed);
    if (f.llt.info() != Eigen::Success)
      throw NumericError("SingularCovariance", "mixture covariance is not positive definite");
  }
  const auto& L = f.llt.matrixL();
  f.logdet = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) f.logdet += 2.0 * std::log(L(i, i));
  return f;
}

// Returns the log-likelihood; fills log responsibilities.
double gmm_estep(const Eigen::MatrixXd& X, const GmmState& g, Eigen::MatrixXd& logr) {
  const Eigen::Index n = X.rows();
  const int k = static_cast<int>(g.means.rows());
  const double d = static_cast<double>(X.cols());
  logr.resize(n, k);

  std::vector<CovFactor> fac;
  fac.reserve(k);
  for (int c = 0; c < k; ++c) fac.push_back(factor_covariance(g.covs[c]));

  double ll = 0.0;
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      Eigen::VectorXd diff = (X.row(i) - g.means.row(c)).transpose();
      Eigen::VectorXd y = fac[c].llt.matrixL().solve(diff);
      double logp = -0.5 * (d * log2pi + fac[c].logdet + y.squaredNorm()) +
                    std::log(g.mixing(c));
      logr(i, c) = logp;
      mx = std::max(mx, logp);
    }
    double sum = 0.0;
    for (int c = 0; c < k; ++c) sum += std::exp(logr(i, c) - mx);
    double lse = mx + std::log(sum);
    for (int c = 0; c < k; ++c) logr(i, c) -= lse;
    ll += lse;
  }
  return ll;
}

// --- Ward agglomeration ---

struct WardState {
  std::vector<Eigen::RowVectorXd> mean;
  std::vector<double> size;
  std::vector<bool> alive;
};

double ward_cost(const WardState& w, std::size_t i, std::size_t j) {
  double ni = w.size[i], nj = w.size[j];
  return ni * nj / (ni + nj) * (w.mean[i] - w.mean[j]).squaredNorm();
}

}  // namespace

ClusterResult fit_clusters(const Eigen::MatrixXd& X, ClusterMethod method,
                           const ClusterOptions& opt) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (opt.k < 2) throw ConfigError("InvalidK", "need at least two clusters");
  if (opt.max_iter < 1) throw ConfigError("InvalidK", "max_iter must be positive");
  if (!(opt.fuzzifier > 1.0)) throw ConfigError("InvalidK", "fuzzifier must exceed 1");
  if (n < opt.k) throw DataError("TooFewSamples", "fewer samples than clusters");
  if (d < 1) throw DataError("TooFewSamples", "empty feature matrix");
  if (!X.allFinite()) throw DataError("NonFiniteInput", "feature matrix has non-finite entries");
  bool all_same = true;
  for (Eigen::Index i = 1; i < n && all_same; ++i)
    if ((X.row(i) - X.row(0)).norm() > 0.0) all_same = false;
  if (all_same) throw DataError("DegenerateInput", "all samples are identical");

  ClusterResult res;
  res.model.method = method;
  res.model.k = opt.k;
  res.model.standardized = opt.standardize;
  res.model.fuzzifier = opt.fuzzifier;
  res.model.transform = opt.standardize
                            ? fit_standardization(X)
                            : Standardization{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  const Eigen::MatrixXd W = apply_standardization(X, res.model.transform);
  const int k = opt.k;

  Eigen::MatrixXd centers_w;  // centers in the working space

  switch (method) {
    case ClusterMethod::kmeans: {
      KmeansRun run = kmeans_fit(W, opt);
      centers_w = run.centers;
      res.assignments = run.assign;
      res.objective_trace = run.trace;
      break;
    }
    case ClusterMethod::gmm: {
      KmeansRun init = kmeans_fit(W, opt);
      GmmState g;
      g.means = init.centers;
      g.covs.assign(k, Eigen::MatrixXd::Zero(d, d));
      g.mixing = Eigen::VectorXd::Zero(k);
      Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
      for (Eigen::Index i = 0; i < n; ++i) {
        int c = init.assign[i];
        Eigen::VectorXd diff = (W.row(i) - g.means.row(c)).transpose();
        g.covs[c] += diff * diff.transpose();
        count(c) += 1.0;
      }
      for (int c = 0; c < k; ++c) {
        if (count(c) > 0.0) g.covs[c] /= count(c);
        g.covs[c] += 1e-6 * Eigen::MatrixXd::Identity(d, d);
        g.mixing(c) = std::max(count(c), 1.0) / static_cast<double>(n);
      }
      g.mixing /= g.mixing.sum();

      Eigen::MatrixXd logr;
      double prev_ll = -std::numeric_limits<double>::infinity();
      for (int iter = 0; iter < opt.max_iter; ++iter) {
        double ll = gmm_estep(W, g, logr);
        res.objective_trace.push_back(ll);
        if (std::isfinite(prev_ll) && std::abs(ll - prev_ll) <= opt.tol * (1.0 + std::abs(ll)))
          break;
        prev_ll = ll;

        Eigen::MatrixXd r = logr.array().exp();
        Eigen::VectorXd rk = r.colwise().sum();
        for (int c = 0; c < k; ++c) {
          double w = rk(c);
          if (w < 1e-12) continue;  // dead component keeps its parameters
          g.means.row(c) = (r.col(c).transpose() * W) / w;
          Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
          for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd diff = (W.row(i) - g.means.row(c)).transpose();
            cov += r(i, c) * (diff * diff.transpose());
          }
          g.covs[c] = cov / w + 1e-6 * Eigen::MatrixXd::Identity(d, d);
          g.mixing(c) = w / static_cast<double>(n);
        }
        g.mixing /= g.mixing.sum();
      }
      gmm_estep(W, g, logr);  // responsibilities in sync with the final parameters

      centers_w = g.means;
      res.model.covariances = g.covs;
      res.model.mixing = g.mixing;
      res.memberships = logr.array().exp();
      res.assignments.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < k; ++c)
          if (res.memberships(i, c) > res.memberships(i, best)) best = c;
        res.assignments[i] = best;
      }
      break;
    }
    case ClusterMethod::fcm: {
      std::mt19937_64 rng(mix_seed(opt.seed, 0));
      centers_w = kmeanspp_seed(W, k, rng);
      Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, k);
      const double expo = 2.0 / (opt.fuzzifier - 1.0);

      auto update_memberships = [&] {
        for (Eigen::Index i = 0; i < n; ++i) {
          int zero = -1;
          Eigen::VectorXd dist(k);
          for (int c = 0; c < k; ++c) {
            dist(c) = std::sqrt(sqdist(W, i, centers_w.row(c)));
            if (dist(c) <= 0.0 && zero < 0) zero = c;
          }
          if (zero >= 0) {
            U.row(i).setZero();
            U(i, zero) = 1.0;
            continue;
          }
          for (int c = 0; c < k; ++c) {
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += std::pow(dist(c) / dist(l), expo);
            U(i, c) = 1.0 / s;
          }
        }
      };

      update_memberships();
      for (int iter = 0; iter < opt.max_iter; ++iter) {
        Eigen::MatrixXd Um = U.array().pow(opt.fuzzifier);
        for (int c = 0; c < k; ++c) {
          double w = Um.col(c).sum();
          if (w <= 0.0) continue;
          centers_w.row(c) = (Um.col(c).transpose() * W) / w;
        }
        Eigen::MatrixXd prev = U;
        update_memberships();

        double obj = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
          for (int c = 0; c < k; ++c)
            obj += std::pow(U(i, c), opt.fuzzifier) * sqdist(W, i, centers_w.row(c));
        res.objective_trace.push_back(obj);

        if ((U - prev).cwiseAbs().maxCoeff() <= opt.tol) break;
      }
      res.memberships = U;
      res.assignments.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < k; ++c)
          if (U(i, c) > U(i, best)) best = c;
        res.assignments[i] = best;
      }
      break;
    }
    case ClusterMethod::agglomerative: {
      WardState w;
      w.mean.reserve(n);
      std::vector<std::vector<int>> members(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        w.mean.push_back(W.row(i));
        w.size.push_back(1.0);
        w.alive.push_back(true);
        members[i] = {static_cast<int>(i)};
      }
      std::size_t active = n;
      while (active > static_cast<std::size_t>(k)) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < w.mean.size(); ++i) {
          if (!w.alive[i]) continue;
          for (std::size_t j = i + 1; j < w.mean.size(); ++j) {
            if (!w.alive[j]) continue;
            double c = ward_cost(w, i, j);
            if (c < best) {
              best = c;
              bi = i;
              bj = j;
            }
          }
        }
        double ni = w.size[bi], nj = w.size[bj];
        w.mean[bi] = (ni * w.mean[bi] + nj * w.mean[bj]) / (ni + nj);
        w.size[bi] = ni + nj;
        w.alive[bj] = false;
        members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
        members[bj].clear();
        res.objective_trace.push_back(best);
        --active;
      }
      centers_w.resize(k, d);
      res.assignments.assign(n, 0);
      int c = 0;
      for (std::size_t i = 0; i < w.mean.size(); ++i) {
        if (!w.alive[i]) continue;
        centers_w.row(c) = w.mean[i];
        for (int m : members[i]) res.assignments[m] = c;
        ++c;
      }
      break;
    }
  }

  res.model.centers.resize(k, d);
  for (int c = 0; c < k; ++c)
    res.model.centers.row(c) =
        ((centers_w.row(c).array() * res.model.transform.stddev.transpose().array()) +
         res.model.transform.mean.transpose().array())
            .matrix();
  return res;
}

std::vector<int> style_ranks(const ClusterModel& model) {
  const int k = model.k;
  if (k < 1 || model.centers.rows() != k)
    throw ConfigError("InvalidModel", "model has no centers");
  Eigen::MatrixXd std_centers = apply_standardization(model.centers, model.transform);
  std::vector<std::pair<double, int>> scored(k);
  for (int c = 0; c < k; ++c) scored[c] = {std_centers.row(c).mean(), c};
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (int i = 1; i < k; ++i)
    if (scored[i].first - scored[i - 1].first <= 1e-9)
      throw NumericError("AmbiguousOrdering",
                         "cluster activity scores coincide; styles cannot be ordered");
  std::vector<int> ranks(k);
  for (int i = 0; i < k; ++i) ranks[scored[i].second] = i;
  return ranks;
}

std::vector<std::string> style_names(int k) {
  if (k == 3) return {"Calm", "Moderate", "Aggressive"};
  std::vector<std::string> names(k);
  for (int i = 0; i < k; ++i) names[i] = "Style" + std::to_string(i + 1);
  return names;
}

ValidationScores internal_validation(const Eigen::MatrixXd& X, std::span<const int> assignments) {
  const Eigen::Index n = X.rows();
  if (static_cast<Eigen::Index>(assignments.size()) != n)
    throw DataError("LengthMismatch", "assignment count does not match sample count");
  if (n < 2) throw DataError("TooFewSamples", "validation needs at least two samples");
  if (!X.allFinite()) throw DataError("NonFiniteInput", "feature matrix has non-finite entries");

  std::vector<int> labels(assignments.begin(), assignments.end());
  std::vector<int> distinct = labels;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const int k = static_cast<int>(distinct.size());
  if (k < 2) throw DataError("SingleCluster", "validation needs at least two clusters");
  for (auto& l : labels)
    l = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), l) - distinct.begin());

  std::vector<double> count(k, 0.0);
  for (int l : labels) count[l] += 1.0;

  // Silhouette on Euclidean distances; singletons score zero.
  double sil_sum = 0.0;
  std::vector<double> dsum(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(dsum.begin(), dsum.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      dsum[labels[j]] += (X.row(i) - X.row(j)).norm();
    }
    int li = labels[i];
    if (count[li] <= 1.0) continue;
    double a = dsum[li] / (count[li] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == li) continue;
      b = std::min(b, dsum[c] / count[c]);
    }
    double m = std::max(a, b);
    sil_sum += m > 0.0 ? (b - a) / m : 0.0;
  }
  ValidationScores out;
  out.silhouette = sil_sum / static_cast<double>(n);

  Eigen::RowVectorXd overall = X.colwise().mean();
  Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(k, X.cols());
  for (Eigen::Index i = 0; i < n; ++i) centroid.row(labels[i]) += X.row(i);
  for (int c = 0; c < k; ++c) centroid.row(c) /= count[c];

  double between = 0.0, within = 0.0;
  std::vector<double> scatter(k, 0.0);
  for (int c = 0; c < k; ++c) between += count[c] * (centroid.row(c) - overall).squaredNorm();
  for (Eigen::Index i = 0; i < n; ++i) {
    within += (X.row(i) - centroid.row(labels[i])).squaredNorm();
    scatter[labels[i]] += (X.row(i) - centroid.row(labels[i])).norm();
  }
  for (int c = 0; c < k; ++c) scatter[c] /= count[c];

  out.calinski_harabasz = within > 0.0
                              ? (between / (k - 1)) / (within / static_cast<double>(n - k))
                              : std::numeric_limits<double>::infinity();

  double db = 0.0;
  for (int c = 0; c < k; ++c) {
    double worst = 0.0;
    for (int o = 0; o < k; ++o) {
      if (o == c) continue;
      double dist = (centroid.row(c) - centroid.row(o)).norm();
      double r = dist > 0.0 ? (scatter[c] + scatter[o]) / dist
                            : std::numeric_limits<double>::infinity();
      worst = std::max(worst, r);
    }
    db += worst;
  }
  out.davies_bouldin = db / k;
  return out;
}

namespace {

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw DataError("InvalidModel", what + " must be a 2d array");
  Eigen::MatrixXd m(j.size(), j[0].size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != j[0].size())
      throw DataError("InvalidModel", what + " must be rectangular");
    for (std::size_t c = 0; c < j[i].size(); ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array()) throw DataError("InvalidModel", what + " must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace

std::string model_to_json(const ClusterModel& model) {
  nlohmann::ordered_json doc;
  doc["method"] = to_string(model.method);
  doc["k"] = model.k;
  doc["standardized"] = model.standardized;
  doc["feature_mean"] = nlohmann::ordered_json::array();
  doc["feature_std"] = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < model.transform.mean.size(); ++i) {
    doc["feature_mean"].push_back(model.transform.mean(i));
    doc["feature_std"].push_back(model.transform.stddev(i));
  }
  doc["centers"] = matrix_to_json(model.centers);
  if (model.method == ClusterMethod::gmm) {
    doc["mixing"] = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < model.mixing.size(); ++i) doc["mixing"].push_back(model.mixing(i));
    doc["covariances"] = nlohmann::ordered_json::array();
    for (const auto& cov : model.covariances) doc["covariances"].push_back(matrix_to_json(cov));
  }
  if (model.method == ClusterMethod::fcm) doc["fuzzifier"] = model.fuzzifier;
  return doc.dump(2) + "\n";
}

void save_model_json(const ClusterModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model));
}

ClusterModel load_model_json(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("InvalidModel", path + ": " + e.what());
  }
  ClusterModel m;
  try {
    m.method = cluster_method_from_string(doc.at("method").get<std::string>());
    m.k = doc.at("k").get<int>();
    m.standardized = doc.at("standardized").get<bool>();
    m.transform.mean = vector_from_json(doc.at("feature_mean"), "feature_mean");
    m.transform.stddev = vector_from_json(doc.at("feature_std"), "feature_std");
    m.centers = matrix_from_json(doc.at("centers"), "centers");
    if (m.method == ClusterMethod::gmm) {
      m.mixing = vector_from_json(doc.at("mixing"), "mixing");
      for (const auto& cov : doc.at("covariances"))
        m.covariances.push_back(matrix_from_json(cov, "covariance"));
    }
    if (m.method == ClusterMethod::fcm) m.fuzzifier = doc.at("fuzzifier").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("InvalidModel", path + ": " + e.what());
  }
  if (m.centers.rows() != m.k) throw DataError("InvalidModel", path + ": center count mismatch");
  return m;
}

}  // namespace dstyle
