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

#ifndef FVA_DIFFCORE_MAT_H_
#define FVA_DIFFCORE_MAT_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fva {

// Dense row-major matrix of doubles. All training math runs on this type;
// embeddings are upcast from their 32-bit storage on load.
class Mat {
 public:
  Mat() = default;
  Mat(size_t rows, size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Throws a shape error if the rows are ragged.
  Mat(std::initializer_list<std::initializer_list<double>> rows);

  static Mat Identity(size_t n);
  static Mat FromData(size_t rows, size_t cols, std::vector<double> data);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> Row(size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::string ShapeString() const;
  bool SameShape(const Mat& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }
  bool AllFinite() const;

  Mat Transposed() const;

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(double s, Mat a);

// Throws a shape error naming both shapes when they differ.
void CheckSameShape(const Mat& a, const Mat& b, const char* op);

Mat MatMul(const Mat& a, const Mat& b);
// a · bᵀ without materializing the transpose.
Mat MatMulTransB(const Mat& a, const Mat& b);
// aᵀ · b without materializing the transpose.
Mat MatMulTransA(const Mat& a, const Mat& b);

struct MatMulGrads {
  Mat grad_a;
  Mat grad_b;
};

// grad_a = grad_out · bᵀ, grad_b = aᵀ · grad_out.
MatMulGrads MatMulBackward(const Mat& a, const Mat& b, const Mat& grad_out);

double Sum(const Mat& m);
double Dot(std::span<const double> a, std::span<const double> b);
double Norm2(std::span<const double> a);
// Frobenius norm of the difference divided by the larger of the two norms;
// the metric every gradient check in this project uses.
double RelativeError(const Mat& analytic, const Mat& numeric);

}  // namespace fva

#endif  // FVA_DIFFCORE_MAT_H_
