#include "archsage/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace archsage::num {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (!a.same_shape(b)) {
    raise(ErrorCode::ShapeMismatch, std::string(what) + ": " + std::to_string(a.rows) + "x" +
                                        std::to_string(a.cols) + " vs " + std::to_string(b.rows) +
                                        "x" + std::to_string(b.cols));
  }
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows_init) {
  Matrix m(static_cast<int>(rows_init.size()),
           rows_init.size() ? static_cast<int>(rows_init.begin()->size()) : 0);
  int r = 0;
  for (const auto& row : rows_init) {
    if (static_cast<int>(row.size()) != m.cols) {
      raise(ErrorCode::ShapeMismatch, "ragged initializer");
    }
    std::copy(row.begin(), row.end(), m.row(r++));
  }
  return m;
}

bool all_finite(const Matrix& m) {
  for (double v : m.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) {
    raise(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf");
  }
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* src = a.row(i);
    for (int j = 0; j < a.cols; ++j) {
      out.at(j, i) = src[j];
    }
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    raise(ErrorCode::ShapeMismatch, "matmul " + std::to_string(a.rows) + "x" +
                                        std::to_string(a.cols) + " * " + std::to_string(b.rows) +
                                        "x" + std::to_string(b.cols));
  }
  require_finite(a, "matmul lhs");
  require_finite(b, "matmul rhs");
  Matrix out(a.rows, b.cols, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) {
        orow[j] += aik * brow[j];
      }
    }
  }
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add");
  Matrix out = a;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] += b.data[i];
  return out;
}

void add_inplace(Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "add_inplace");
  for (size_t i = 0; i < a.size(); ++i) a.data[i] += b.data[i];
}

Matrix scale(const Matrix& a, double s) {
  Matrix out = a;
  for (double& v : out.data) v *= s;
  return out;
}

Matrix gather_rows(const Matrix& a, const std::vector<int>& idx) {
  Matrix out(static_cast<int>(idx.size()), a.cols);
  for (size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || idx[r] >= a.rows) raise(ErrorCode::ShapeMismatch, "gather_rows index");
    std::copy(a.row(idx[r]), a.row(idx[r]) + a.cols, out.row(static_cast<int>(r)));
  }
  return out;
}

Matrix affine(const Matrix& x, const Matrix& w, const Matrix& b) {
  if (b.rows != 1 || b.cols != w.cols) {
    raise(ErrorCode::ShapeMismatch, "affine bias must be 1x" + std::to_string(w.cols));
  }
  Matrix out = matmul(x, w);
  for (int i = 0; i < out.rows; ++i) {
    double* orow = out.row(i);
    const double* brow = b.row(0);
    for (int j = 0; j < out.cols; ++j) orow[j] += brow[j];
  }
  return out;
}

AffineGrads affine_backward(const Matrix& x, const Matrix& w, const Matrix& dout) {
  if (dout.rows != x.rows || dout.cols != w.cols || x.cols != w.rows) {
    raise(ErrorCode::ShapeMismatch, "affine_backward");
  }
  require_finite(dout, "affine_backward dout");
  AffineGrads g;
  g.dx = matmul(dout, transpose(w));
  g.dw = matmul(transpose(x), dout);
  g.db = Matrix(1, w.cols, 0.0);
  for (int i = 0; i < dout.rows; ++i) {
    const double* drow = dout.row(i);
    for (int j = 0; j < dout.cols; ++j) g.db.at(0, j) += drow[j];
  }
  return g;
}

Matrix relu(const Matrix& x) {
  require_finite(x, "relu input");
  Matrix out = x;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

Matrix relu_backward(const Matrix& x, const Matrix& dout) {
  require_same_shape(x, dout, "relu_backward");
  Matrix out = dout;
  for (size_t i = 0; i < out.size(); ++i) {
    if (x.data[i] <= 0.0) out.data[i] = 0.0;
  }
  return out;
}

double mse(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mse");
  require_finite(a, "mse lhs");
  require_finite(b, "mse rhs");
  if (a.rows == 0) raise(ErrorCode::ShapeMismatch, "mse of empty matrix");
  double total = 0.0;
  for (int i = 0; i < a.rows; ++i) {
    const double* ar = a.row(i);
    const double* br = b.row(i);
    double row_sq = 0.0;
    for (int j = 0; j < a.cols; ++j) {
      const double d = ar[j] - br[j];
      row_sq += d * d;
    }
    total += row_sq;
  }
  return total / a.rows;
}

Matrix mse_backward(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mse_backward");
  Matrix out(a.rows, a.cols);
  const double inv = 2.0 / a.rows;
  for (size_t i = 0; i < out.size(); ++i) out.data[i] = inv * (a.data[i] - b.data[i]);
  return out;
}

Matrix l2_normalize_rows(const Matrix& x) {
  require_finite(x, "l2_normalize_rows input");
  Matrix out = x;
  for (int i = 0; i < x.rows; ++i) {
    const double* xr = x.row(i);
    double sq = 0.0;
    for (int j = 0; j < x.cols; ++j) sq += xr[j] * xr[j];
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) continue;
    double* orow = out.row(i);
    for (int j = 0; j < x.cols; ++j) orow[j] /= norm;
  }
  return out;
}

Matrix l2_normalize_rows_backward(const Matrix& x, const Matrix& dout) {
  require_same_shape(x, dout, "l2_normalize_rows_backward");
  Matrix dx(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    const double* xr = x.row(i);
    const double* dr = dout.row(i);
    double sq = 0.0;
    for (int j = 0; j < x.cols; ++j) sq += xr[j] * xr[j];
    const double norm = std::sqrt(sq);
    double* out = dx.row(i);
    if (norm < 1e-12) {
      std::copy(dr, dr + x.cols, out);
      continue;
    }
    double dot = 0.0;
    for (int j = 0; j < x.cols; ++j) dot += xr[j] * dr[j];
    const double inv = 1.0 / norm;
    const double inv3 = inv * inv * inv;
    for (int j = 0; j < x.cols; ++j) {
      out[j] = dr[j] * inv - xr[j] * dot * inv3;
    }
  }
  return dx;
}

AdamState AdamState::for_params(const std::vector<Matrix*>& params, AdamConfig cfg) {
  AdamState st;
  st.cfg = cfg;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const Matrix* p : params) {
    st.m.emplace_back(p->rows, p->cols, 0.0);
    st.v.emplace_back(p->rows, p->cols, 0.0);
  }
  return st;
}

void adam_step(std::vector<Matrix*>& params, const std::vector<Matrix>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    raise(ErrorCode::ShapeMismatch, "adam_step parameter/gradient count");
  }
  state.t += 1;
  const AdamConfig& c = state.cfg;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    const Matrix& g = grads[k];
    if (!p.same_shape(g)) raise(ErrorCode::ShapeMismatch, "adam_step gradient shape");
    require_finite(g, "adam_step gradient");
    Matrix& m = state.m[k];
    Matrix& v = state.v[k];
    for (size_t i = 0; i < p.size(); ++i) {
      m.data[i] = c.beta1 * m.data[i] + (1.0 - c.beta1) * g.data[i];
      v.data[i] = c.beta2 * v.data[i] + (1.0 - c.beta2) * g.data[i] * g.data[i];
      const double mhat = m.data[i] / bc1;
      const double vhat = v.data[i] / bc2;
      p.data[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

GradReport grad_check(const LossFn& loss_fn, const std::vector<Matrix*>& params, double eps,
                      double tol, size_t max_coords_per_tensor, uint64_t subsample_seed) {
  std::vector<Matrix> analytic;
  const double l_first = loss_fn(&analytic);
  const double l_second = loss_fn(nullptr);
  if (l_first != l_second) {
    raise(ErrorCode::NonDeterministicLoss,
          "two evaluations at identical parameters differ: " + std::to_string(l_first) + " vs " +
              std::to_string(l_second));
  }
  if (analytic.size() != params.size()) {
    raise(ErrorCode::ShapeMismatch, "grad_check: loss_fn returned wrong gradient count");
  }

  RngStream rng(subsample_seed);
  GradReport report;
  double sum_rel = 0.0;
  size_t n_checked = 0;

  for (size_t k = 0; k < params.size(); ++k) {
    Matrix& p = *params[k];
    const Matrix& g = analytic[k];
    if (!p.same_shape(g)) raise(ErrorCode::ShapeMismatch, "grad_check gradient shape");

    std::vector<size_t> coords;
    if (max_coords_per_tensor == 0 || p.size() <= max_coords_per_tensor) {
      coords.resize(p.size());
      for (size_t i = 0; i < p.size(); ++i) coords[i] = i;
    } else {
      for (size_t i = 0; i < max_coords_per_tensor; ++i) coords.push_back(rng.uniform_index(p.size()));
    }

    for (size_t c : coords) {
      const double saved = p.data[c];
      p.data[c] = saved + eps;
      const double lp = loss_fn(nullptr);
      p.data[c] = saved - eps;
      const double lm = loss_fn(nullptr);
      p.data[c] = saved;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double analytic_v = g.data[c];
      const double denom = std::max({std::fabs(numeric), std::fabs(analytic_v), 1e-6});
      const double rel = std::fabs(numeric - analytic_v) / denom;
      report.max_rel_err = std::max(report.max_rel_err, rel);
      sum_rel += rel;
      ++n_checked;
    }
  }

  report.mean_rel_err = n_checked ? sum_rel / static_cast<double>(n_checked) : 0.0;
  report.pass = report.max_rel_err < tol;
  return report;
}

}  // namespace archsage::num
