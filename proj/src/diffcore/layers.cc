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

#include "fva/diffcore/layers.h"

#include <sstream>

#include "fva/common/error.h"

namespace fva {

Mat L2NormalizeRows(const Mat& x) {
  Mat out(x.rows(), x.cols());
  for (size_t r = 0; r < x.rows(); ++r) {
    const double n = Norm2(x.Row(r));
    if (!(n > kEpsNorm)) {
      std::ostringstream os;
      os << "row " << r << " has norm " << n << " <= " << kEpsNorm;
      throw Error(ErrorKind::kDegenerate, os.str());
    }
    auto src = x.Row(r);
    auto dst = out.Row(r);
    for (size_t c = 0; c < x.cols(); ++c) dst[c] = src[c] / n;
  }
  return out;
}

Mat L2NormalizeRowsBackward(const Mat& x, const Mat& grad_out) {
  CheckSameShape(x, grad_out, "l2 normalize backward");
  Mat grad(x.rows(), x.cols());
  for (size_t r = 0; r < x.rows(); ++r) {
    const double n = Norm2(x.Row(r));
    if (!(n > kEpsNorm)) {
      std::ostringstream os;
      os << "row " << r << " has norm " << n << " <= " << kEpsNorm;
      throw Error(ErrorKind::kDegenerate, os.str());
    }
    auto xr = x.Row(r);
    auto gr = grad_out.Row(r);
    // u·g with u = x/n
    const double ug = Dot(xr, gr) / n;
    auto dst = grad.Row(r);
    for (size_t c = 0; c < x.cols(); ++c) {
      dst[c] = (gr[c] - (xr[c] / n) * ug) / n;
    }
  }
  return grad;
}

Mat DropoutMask(Rng& rng, size_t rows, size_t cols, double p_drop) {
  if (!(p_drop >= 0.0 && p_drop < 1.0)) {
    std::ostringstream os;
    os << "dropout probability " << p_drop << " outside [0, 1)";
    throw Error(ErrorKind::kConfig, os.str());
  }
  Mat mask(rows, cols, 1.0);
  if (p_drop == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - p_drop);
  for (double& v : mask.data()) v = rng.Uniform() < p_drop ? 0.0 : keep_scale;
  return mask;
}

Mat ApplyMask(const Mat& x, const Mat& mask) {
  CheckSameShape(x, mask, "dropout apply");
  Mat out = x;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] *= mask.data()[i];
  return out;
}

}  // namespace fva
