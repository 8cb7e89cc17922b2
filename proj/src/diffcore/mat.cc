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

#include "fva/diffcore/mat.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fva/common/error.h"

namespace fva {

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorKind::kShape, "ragged initializer rows");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Mat Mat::Identity(size_t n) {
  Mat m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::FromData(size_t rows, size_t cols, std::vector<double> data) {
  if (data.size() != rows * cols) {
    std::ostringstream os;
    os << "data length " << data.size() << " != " << rows << "x" << cols;
    throw Error(ErrorKind::kShape, os.str());
  }
  Mat m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  return m;
}

std::string Mat::ShapeString() const {
  std::ostringstream os;
  os << "(" << rows_ << "x" << cols_ << ")";
  return os.str();
}

bool Mat::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

Mat Mat::Transposed() const {
  Mat t(cols_, rows_);
  for (size_t r = 0; r < rows_; ++r)
    for (size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Mat& Mat::operator+=(const Mat& o) {
  CheckSameShape(*this, o, "add");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  CheckSameShape(*this, o, "subtract");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }

void CheckSameShape(const Mat& a, const Mat& b, const char* op) {
  if (!a.SameShape(b)) {
    throw Error(ErrorKind::kShape, std::string(op) + ": shapes " +
                                       a.ShapeString() + " and " +
                                       b.ShapeString() + " differ");
  }
}

Mat MatMul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::kShape, "matmul: " + a.ShapeString() + " x " +
                                       b.ShapeString() +
                                       " inner dimensions differ");
  }
  Mat out(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.Row(i).data();
    for (size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* b_row = b.Row(k).data();
      for (size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Mat MatMulTransB(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorKind::kShape, "matmul (b transposed): " +
                                       a.ShapeString() + " x " +
                                       b.ShapeString() + "^T");
  }
  Mat out(a.rows(), b.rows());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < b.rows(); ++j) out(i, j) = Dot(a.Row(i), b.Row(j));
  return out;
}

Mat MatMulTransA(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::kShape, "matmul (a transposed): " +
                                       a.ShapeString() + "^T x " +
                                       b.ShapeString());
  }
  Mat out(a.cols(), b.cols());
  for (size_t k = 0; k < a.rows(); ++k) {
    const double* b_row = b.Row(k).data();
    for (size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double* out_row = out.Row(i).data();
      for (size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

MatMulGrads MatMulBackward(const Mat& a, const Mat& b, const Mat& grad_out) {
  if (a.cols() != b.rows() || grad_out.rows() != a.rows() ||
      grad_out.cols() != b.cols()) {
    throw Error(ErrorKind::kShape, "matmul backward: a " + a.ShapeString() +
                                       ", b " + b.ShapeString() +
                                       ", grad_out " +
                                       grad_out.ShapeString());
  }
  return {MatMulTransB(grad_out, b), MatMulTransA(a, grad_out)};
}

double Sum(const Mat& m) {
  double s = 0.0;
  for (double v : m.data()) s += v;
  return s;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm2(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

double RelativeError(const Mat& analytic, const Mat& numeric) {
  CheckSameShape(analytic, numeric, "relative error");
  const double diff = Norm2((analytic - numeric).data());
  const double scale =
      std::max({Norm2(analytic.data()), Norm2(numeric.data()), 1e-12});
  return diff / scale;
}

}  // namespace fva
