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

#include "fva/diffcore/gradcheck.h"

#include <cmath>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

Mat FiniteDifferenceGrad(const std::function<double(const Mat&)>& f, Mat x,
                         double h) {
  if (!(h > 0.0)) {
    throw Error(ErrorKind::kConfig, "finite difference step must be > 0");
  }
  Mat grad(x.rows(), x.cols());
  for (size_t i = 0; i < x.size(); ++i) {
    const double orig = x.data()[i];
    x.data()[i] = orig + h;
    const double fp = f(x);
    x.data()[i] = orig - h;
    const double fm = f(x);
    x.data()[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      std::ostringstream os;
      os << "non-finite function value at entry " << i;
      throw Error(ErrorKind::kNumeric, os.str());
    }
    grad.data()[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace fva
