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

#ifndef FVA_DIFFCORE_GRADCHECK_H_
#define FVA_DIFFCORE_GRADCHECK_H_

#include <functional>

#include "fva/diffcore/mat.h"

namespace fva {

// Central-difference gradient of a scalar function:
//   (f(x + h e_i) - f(x - h e_i)) / 2h   for every entry i.
// Throws a numeric error if f returns a non-finite value.
Mat FiniteDifferenceGrad(const std::function<double(const Mat&)>& f, Mat x,
                         double h);

}  // namespace fva

#endif  // FVA_DIFFCORE_GRADCHECK_H_
