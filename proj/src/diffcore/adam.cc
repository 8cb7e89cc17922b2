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

#include "fva/diffcore/adam.h"

#include <cmath>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

void ValidateAdamConfig(const AdamConfig& cfg) {
  std::ostringstream os;
  if (!(cfg.lr >= 0.0) || !std::isfinite(cfg.lr)) {
    os << "adam lr " << cfg.lr << " must be finite and >= 0";
  } else if (!(cfg.beta1 > 0.0 && cfg.beta1 < 1.0)) {
    os << "adam beta1 " << cfg.beta1 << " outside (0, 1)";
  } else if (!(cfg.beta2 > 0.0 && cfg.beta2 < 1.0)) {
    os << "adam beta2 " << cfg.beta2 << " outside (0, 1)";
  } else if (!(cfg.eps > 0.0)) {
    os << "adam eps " << cfg.eps << " must be > 0";
  } else {
    return;
  }
  throw Error(ErrorKind::kConfig, os.str());
}

AdamState AdamState::For(const Mat& param, const AdamConfig& config) {
  ValidateAdamConfig(config);
  AdamState s;
  s.first_moment = Mat(param.rows(), param.cols());
  s.second_moment = Mat(param.rows(), param.cols());
  s.config = config;
  return s;
}

void AdamStep(Mat* param, const Mat& grad, AdamState* state) {
  CheckSameShape(*param, grad, "adam step");
  CheckSameShape(*param, state->first_moment, "adam state");
  const AdamConfig& c = state->config;
  ++state->step;
  const double t = static_cast<double>(state->step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  auto& p = param->data();
  auto& m = state->first_moment.data();
  auto& v = state->second_moment.data();
  const auto& g = grad.data();
  for (size_t i = 0; i < p.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
  }
}

}  // namespace fva
