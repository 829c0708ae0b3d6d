#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dstyle {

enum class ClusterMethod { kmeans, gmm, fcm, agglomerative };

const char* to_string(ClusterMethod m);
ClusterMethod cluster_method_from_string(const std::string& s);

// Per-column affine transform used before clustering.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // zero-variance columns keep stddev 1
};

Standardization fit_standardization(const Eigen::MatrixXd& X);
Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& s);

// Sample matrix (rows = windows, columns = features) plus the transform that
// produced it, when one was applied.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::optional<Standardization> standardization;
};

struct ClusterOptions {
  int k = 3;
  unsigned long seed = 1;
  int max_iter = 300;
  double tol = 1e-8;
  bool standardize = true;
  int restarts = 10;      // k-means restarts, best inertia wins
  double fuzzifier = 2.0; // fuzzy c-means exponent
};

struct ClusterModel {
  ClusterMethod method = ClusterMethod::kmeans;
  int k = 0;
  bool standardized = false;
  Standardization transform;      // identity when standardized == false
  Eigen::MatrixXd centers;        // k x d, original units
  // Gaussian mixture extras (standardized space):
  std::vector<Eigen::MatrixXd> covariances;
  Eigen::VectorXd mixing;
  // Fuzzy c-means extra:
  double fuzzifier = 2.0;
};

struct ClusterResult {
  ClusterModel model;
  std::vector<int> assignments;     // hard assignment per row
  Eigen::MatrixXd memberships;      // n x k for gmm/fcm, empty otherwise
  std::vector<double> objective_trace;
};

// k-means: k-means++ seeding, Lloyd iterations, `restarts` runs.
// gmm: full-covariance EM initialised from k-means, covariance floor 1e-6 I.
// fcm: alternating center/membership updates, hard labels by max membership.
// agglomerative: Ward linkage grown from singletons, centers are cluster means.
// All methods are deterministic for a fixed seed.
ClusterResult fit_clusters(const Eigen::MatrixXd& X, ClusterMethod method,
                           const ClusterOptions& opt);

// Rank clusters by the mean of their standardized center coordinates,
// ascending: rank 0 is the calmest style. Throws AmbiguousOrdering when two
// cluster means coincide within 1e-9.
std::vector<int> style_ranks(const ClusterModel& model);

// Class names by rank; the three-cluster case uses the canonical style names.
std::vector<std::string> style_names(int k);

struct ValidationScores {
  double silhouette = 0.0;
  double calinski_harabasz = 0.0;
  double davies_bouldin = 0.0;
};

// Internal validation of a hard partition of X (same representation the
// clustering ran on). Needs at least two distinct labels.
ValidationScores internal_validation(const Eigen::MatrixXd& X, std::span<const int> assignments);

std::string model_to_json(const ClusterModel& model);
void save_model_json(const ClusterModel& model, const std::string& path);
ClusterModel load_model_json(const std::string& path);

}  // namespace dstyle
