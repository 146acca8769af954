#pragma once

#include <functional>
#include <initializer_list>
#include <vector>

#include "archsage/common.hpp"

namespace archsage::num {

// Dense row-major matrix of 64-bit reals. Desk-scale sizes only; everything
// is a plain value and all arithmetic is single-threaded with one fixed
// accumulation order, so identical inputs give bitwise-identical results.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows_init);

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  double* row(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  bool operator==(const Matrix& o) const = default;
};

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const char* what);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix add(const Matrix& a, const Matrix& b);
void add_inplace(Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double s);
Matrix gather_rows(const Matrix& a, const std::vector<int>& idx);

// out = x * W + b, b is a 1 x k row broadcast over rows of x.
Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b);

struct AffineGrads {
  Matrix dx;
  Matrix dw;
  Matrix db;
};
AffineGrads affine_backward(const Matrix& x, const Matrix& w, const Matrix& dout);

// Elementwise max(0, x); subgradient at 0 is taken as 0.
Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& x, const Matrix& dout);

// Mean over rows of the squared l2 row difference: (1/n_rows) sum_i ||a_i - b_i||^2.
double mse(const Matrix& a, const Matrix& b);
Matrix mse_backward(const Matrix& a, const Matrix& b);  // d/da; d/db is its negation

// Row-wise x_i / ||x_i||. Rows with norm below 1e-12 pass through unchanged.
Matrix l2_normalize_rows(const Matrix& x);
Matrix l2_normalize_rows_backward(const Matrix& x, const Matrix& dout);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // no weight decay
};

struct AdamState {
  AdamConfig cfg;
  long t = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  static AdamState for_params(const std::vector<Matrix*>& params, AdamConfig cfg = {});
};

// Bias-corrected Adam update applied in place to every parameter tensor.
void adam_step(std::vector<Matrix*>& params, const std::vector<Matrix>& grads, AdamState& state);

struct GradReport {
  double max_rel_err = 0.0;
  double mean_rel_err = 0.0;
  bool pass = false;
};

// Evaluates the loss at the current parameter values; when grads_out is
// non-null, fills one gradient tensor per parameter (same order as params).
using LossFn = std::function<double(std::vector<Matrix>* grads_out)>;

// Central-difference check of analytic gradients. max_coords_per_tensor == 0
// checks every coordinate; otherwise a seeded random subsample per tensor.
GradReport grad_check(const LossFn& loss_fn, const std::vector<Matrix*>& params,
                      double eps = 1e-5, double tol = 1e-4,
                      size_t max_coords_per_tensor = 0, uint64_t subsample_seed = 0);

}  // namespace archsage::num
