// Copyright (c) 2026 The fva Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fva/aamloss/aam.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fva/common/error.h"
#include "fva/diffcore/layers.h"

namespace fva {

void ValidateAamConfig(const AamConfig& cfg) {
  if (!(cfg.scale > 0.0) || !std::isfinite(cfg.scale)) {
    throw Error(ErrorKind::kConfig, "AAM scale must be > 0");
  }
  if (!(cfg.margin >= 0.0 && cfg.margin < std::numbers::pi / 2)) {
    throw Error(ErrorKind::kConfig, "AAM margin must lie in [0, pi/2)");
  }
}

SharedClassifier SharedClassifier::Init(size_t n_classes, size_t dim,
                                        Rng& rng) {
  if (n_classes == 0 || dim == 0) {
    throw Error(ErrorKind::kConfig, "classifier needs >= 1 class and dim");
  }
  SharedClassifier c;
  c.weight = Mat(n_classes, dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& v : c.weight.data()) v = scale * rng.Normal();
  return c;
}

namespace {

struct MarginTerms {
  double cos_m, sin_m, threshold, fallback_shift;
};

MarginTerms Terms(const AamConfig& cfg) {
  return {std::cos(cfg.margin), std::sin(cfg.margin),
          std::cos(std::numbers::pi - cfg.margin),
          cfg.margin * std::sin(cfg.margin)};
}

// cos(θ + m) with the fallback, plus its derivative w.r.t. cos θ.
std::pair<double, double> MarginCos(double c, const MarginTerms& t) {
  if (c <= t.threshold) return {c - t.fallback_shift, 1.0};
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double value = c * t.cos_m - sin_theta * t.sin_m;
  // d/dc of −sinθ·sin m is c·sin m / sinθ; undefined at sinθ = 0.
  const double slope =
      sin_theta > 1e-12 ? t.cos_m + c * t.sin_m / sin_theta : t.cos_m;
  return {value, slope};
}

void CheckInputs(const Mat& x, const SharedClassifier& clf,
                 std::span<const size_t> targets) {
  if (x.cols() != clf.dim()) {
    throw Error(ErrorKind::kShape, "aam: embeddings " + x.ShapeString() +
                                       " vs classifier " +
                                       clf.weight.ShapeString());
  }
  if (targets.size() != x.rows()) {
    throw Error(ErrorKind::kShape, "aam: " + std::to_string(targets.size()) +
                                       " targets for " +
                                       std::to_string(x.rows()) + " rows");
  }
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] >= clf.n_classes()) {
      std::ostringstream os;
      os << "target " << targets[i] << " at row " << i << " outside [0, "
         << clf.n_classes() << ")";
      throw Error(ErrorKind::kIndex, os.str());
    }
  }
}

}  // namespace

Mat AamLogits(const Mat& x, const SharedClassifier& clf, const AamConfig& cfg,
              std::span<const size_t> targets) {
  ValidateAamConfig(cfg);
  CheckInputs(x, clf, targets);
  const MarginTerms t = Terms(cfg);
  Mat logits = MatMulTransB(L2NormalizeRows(x), L2NormalizeRows(clf.weight));
  for (size_t i = 0; i < logits.rows(); ++i) {
    double& target = logits(i, targets[i]);
    target = MarginCos(target, t).first;
  }
  logits *= cfg.scale;
  return logits;
}

AamResult AamLossAndGrad(const Mat& x, const SharedClassifier& clf,
                         const AamConfig& cfg,
                         std::span<const size_t> targets) {
  ValidateAamConfig(cfg);
  CheckInputs(x, clf, targets);
  const MarginTerms t = Terms(cfg);
  const Mat xn = L2NormalizeRows(x);
  const Mat wn = L2NormalizeRows(clf.weight);
  const Mat cosines = MatMulTransB(xn, wn);
  const size_t batch = x.rows();
  const size_t n = clf.n_classes();

  AamResult res;
  Mat d_cos(batch, n);
  for (size_t i = 0; i < batch; ++i) {
    const size_t y = targets[i];
    const auto [target_cos, slope] = MarginCos(cosines(i, y), t);
    std::vector<double> logits(n);
    for (size_t j = 0; j < n; ++j) logits[j] = cfg.scale * cosines(i, j);
    logits[y] = cfg.scale * target_cos;
    const double mx = *std::max_element(logits.begin(), logits.end());
    // Non-target mass kept apart so a confident target still yields an
    // accurate loss (log1p) and target gradient (-other / z, not p - 1).
    double z = 0.0, other = 0.0;
    for (size_t j = 0; j < n; ++j) {
      const double e = std::exp(logits[j] - mx);
      z += e;
      if (j != y) other += e;
    }
    res.loss += logits[y] == mx ? std::log1p(other)
                                : mx + std::log(z) - logits[y];
    for (size_t j = 0; j < n; ++j) {
      const double d_logit =
          (j == y ? -other : std::exp(logits[j] - mx)) / z / batch;
      d_cos(i, j) = cfg.scale * d_logit * (j == y ? slope : 1.0);
    }
  }
  res.loss /= static_cast<double>(batch);
  res.grad_x = L2NormalizeRowsBackward(x, MatMul(d_cos, wn));
  res.grad_weight = L2NormalizeRowsBackward(clf.weight, MatMulTransA(d_cos, xn));
  return res;
}

}  // namespace fva
