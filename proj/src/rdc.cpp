#include "cardest/rdc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "cardest/rng.hpp"

namespace cardest {

namespace {

// Fractional ranks in (0, 1], ties averaged, so the transform depends on the
// ordering of values only.
std::vector<double> copula_transform(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = mean_rank / static_cast<double>(n);
    i = j + 1;
  }
  return ranks;
}

double gaussian(Rng& rng) {
  double u1 = rng.next_double();
  while (u1 <= 0.0) u1 = rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// sin(W^T [u; 1]) random features of a copula-transformed column.
Eigen::MatrixXd random_features(const std::vector<double>& u, int k, double sigma,
                                Rng& rng) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd w(2, k);
  for (int j = 0; j < k; ++j) {
    w(0, j) = sigma * gaussian(rng);
    w(1, j) = sigma * gaussian(rng);
  }
  Eigen::MatrixXd f(n, k);
  for (Eigen::Index r = 0; r < n; ++r)
    for (int j = 0; j < k; ++j)
      f(r, j) = std::sin(w(0, j) * u[static_cast<std::size_t>(r)] + w(1, j));
  return f;
}

// Largest canonical correlation between the column spaces of fx and fy,
// via the symmetric whitened cross-covariance eigenproblem with a small ridge.
double max_canonical_correlation(const Eigen::MatrixXd& fx, const Eigen::MatrixXd& fy) {
  const double n = static_cast<double>(fx.rows());
  Eigen::MatrixXd cx = fx.rowwise() - fx.colwise().mean();
  Eigen::MatrixXd cy = fy.rowwise() - fy.colwise().mean();
  const double ridge = 1e-8;
  Eigen::MatrixXd cxx = cx.transpose() * cx / n;
  Eigen::MatrixXd cyy = cy.transpose() * cy / n;
  Eigen::MatrixXd cxy = cx.transpose() * cy / n;
  cxx.diagonal().array() += ridge;
  cyy.diagonal().array() += ridge;

  Eigen::LLT<Eigen::MatrixXd> lx(cxx);
  Eigen::LLT<Eigen::MatrixXd> ly(cyy);
  // t = Lx^-1 Cxy Ly^-T ; largest singular value of t is the top correlation.
  Eigen::MatrixXd t = lx.matrixL().solve(cxy);
  t = ly.matrixL().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t * t.transpose());
  double lambda = es.eigenvalues().maxCoeff();
  if (lambda < 0.0) lambda = 0.0;
  if (lambda > 1.0) lambda = 1.0;
  return std::sqrt(lambda);
}

bool constant_column(const std::vector<double>& x) {
  for (double v : x)
    if (v != x.front()) return false;
  return true;
}

}  // namespace

double rdc(const std::vector<double>& x, const std::vector<double>& y,
           const RdcParams& params) {
  if (x.size() != y.size()) throw Error("rdc: column length mismatch");
  if (x.size() < 10) throw Error("rdc: need at least 10 observations");
  if (constant_column(x) || constant_column(y)) return 0.0;

  const auto ux = copula_transform(x);
  const auto uy = copula_transform(y);

  std::vector<double> reps;
  for (int r = 0; r < params.repetitions; ++r) {
    Rng rng(params.seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ULL);
    const auto fx = random_features(ux, params.k_features, params.sigma, rng);
    const auto fy = random_features(uy, params.k_features, params.sigma, rng);
    reps.push_back(max_canonical_correlation(fx, fy));
  }
  std::sort(reps.begin(), reps.end());
  double med;
  const std::size_t m = reps.size();
  if (m % 2 == 1)
    med = reps[m / 2];
  else
    med = 0.5 * (reps[m / 2 - 1] + reps[m / 2]);
  return std::clamp(med, 0.0, 1.0);
}

double table_pair_rdc(const EncodedTable& sample,
                      const std::vector<std::string>& attrs_left,
                      const std::vector<std::string>& attrs_right,
                      const RdcParams& params) {
  if (attrs_left.empty() || attrs_right.empty())
    throw Error("table_pair_rdc: empty attribute list");
  auto column_as_double = [&](const std::string& attr) {
    const int idx = sample.require_attr(attr);
    const auto& col = sample.columns[static_cast<std::size_t>(idx)];
    std::vector<double> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) out[i] = static_cast<double>(col[i]);
    return out;
  };
  double total = 0.0;
  for (const auto& a : attrs_left) {
    const auto xa = column_as_double(a);
    for (const auto& b : attrs_right) total += rdc(xa, column_as_double(b), params);
  }
  return total / (static_cast<double>(attrs_left.size()) *
                  static_cast<double>(attrs_right.size()));
}

int DependenceMatrix::index_of(const std::string& table) const {
  for (std::size_t i = 0; i < table_names.size(); ++i)
    if (table_names[i] == table) return static_cast<int>(i);
  throw Error("table " + table + " not in dependence matrix");
}

double DependenceMatrix::at(const std::string& a, const std::string& b) const {
  return scores[static_cast<std::size_t>(index_of(a))][static_cast<std::size_t>(index_of(b))];
}

void DependenceMatrix::check() const {
  const std::size_t n = table_names.size();
  if (scores.size() != n || attr_counts.size() != n)
    throw Error("dependence matrix dimensions mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (scores[i].size() != n) throw Error("dependence matrix is not square");
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (scores[i][j] < 0.0 || scores[i][j] > 1.0)
        throw Error("dependence score outside [0, 1]");
      if (std::abs(scores[i][j] - scores[j][i]) > 1e-12)
        throw Error("dependence matrix is not symmetric");
    }
  }
}

double merged_group_rdc(const DependenceMatrix& m,
                        const std::vector<std::string>& group_a,
                        const std::vector<std::string>& group_b) {
  std::set<std::string> sa(group_a.begin(), group_a.end());
  for (const auto& t : group_b)
    if (sa.count(t)) throw Error("merged_group_rdc: groups overlap on " + t);

  double num = 0.0, wa = 0.0, wb = 0.0;
  for (const auto& a : group_a)
    wa += static_cast<double>(m.attr_counts[static_cast<std::size_t>(m.index_of(a))]);
  for (const auto& b : group_b)
    wb += static_cast<double>(m.attr_counts[static_cast<std::size_t>(m.index_of(b))]);
  for (const auto& a : group_a) {
    const int ia = m.index_of(a);
    const double ca = static_cast<double>(m.attr_counts[static_cast<std::size_t>(ia)]);
    for (const auto& b : group_b) {
      const int ib = m.index_of(b);
      const double cb = static_cast<double>(m.attr_counts[static_cast<std::size_t>(ib)]);
      num += m.scores[static_cast<std::size_t>(ia)][static_cast<std::size_t>(ib)] * ca * cb;
    }
  }
  return num / (wa * wb);
}

}  // namespace cardest
