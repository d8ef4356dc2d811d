#include "lvp/operator.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "lvp/spectral.hpp"

namespace lvp {

using spectral::cplx;

double BlockLayout::frequency(int k) const {
  const int r = k < n / 2 ? k : k - n;
  return 2.0 * std::numbers::pi * r / period;
}

namespace {

// c_k = (-1)^k DFT(a)_k / n, so that the Fourier matrix of multiplication by
// a is c_{(r - s) mod n}.
std::vector<cplx> coefficient_series(int n, double period,
                                     const std::function<double(double)>& a) {
  BlockLayout probe{n, 1, period};
  std::vector<cplx> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a(probe.x(i));
  spectral::dft(v, -1);
  for (int k = 0; k < n; ++k) v[static_cast<size_t>(k)] *= ((k % 2) ? -1.0 : 1.0) / n;
  return v;
}

// Full Fourier matrix of a physical operator: (-1)^{r+s}/n DFT_i DFT^+_j A.
Eigen::MatrixXcd to_fourier(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXcd F = A.cast<cplx>();
  spectral::dft(F.data(), n, n, 1, n, -1);  // along rows index within columns
  spectral::dft(F.data(), n, n, n, 1, +1);  // along column index
  for (int s = 0; s < n; ++s)
    for (int r = 0; r < n; ++r)
      if ((r + s) % 2) F(r, s) = -F(r, s);
  F /= static_cast<double>(n);
  return F;
}

Eigen::MatrixXd from_fourier(Eigen::MatrixXcd F) {
  const int n = static_cast<int>(F.rows());
  for (int s = 0; s < n; ++s)
    for (int r = 0; r < n; ++r)
      if ((r + s) % 2) F(r, s) = -F(r, s);
  spectral::dft(F.data(), n, n, 1, n, +1);
  spectral::dft(F.data(), n, n, n, 1, -1);
  return F.real() / static_cast<double>(n);
}

}  // namespace

BlockLayout BlockLayout::for_coefficients(
    int n, double period, const std::vector<std::function<double(double)>>& coeffs) {
  if (n <= 0 || n % 2) throw std::invalid_argument("grid size must be positive and even");
  int g = n;
  for (const auto& a : coeffs) {
    const auto c = coefficient_series(n, period, a);
    double scale = 0.0;
    for (const auto& v : c) scale = std::max(scale, std::abs(v));
    for (int k = 1; k < n; ++k)
      if (std::abs(c[static_cast<size_t>(k)]) > 1e-13 * scale) g = std::gcd(g, k);
  }
  return BlockLayout{n, g, period};
}

BlockKernel::BlockKernel(const BlockLayout& layout) : layout_(layout) {
  if (layout.n % layout.blocks) throw std::invalid_argument("block count must divide n");
  const int b = layout.block_size();
  blocks_.assign(static_cast<size_t>(layout.blocks), Eigen::MatrixXcd::Zero(b, b));
}

BlockKernel BlockKernel::identity(const BlockLayout& layout) {
  BlockKernel out(layout);
  for (auto& blk : out.blocks_) blk.setIdentity();
  return out;
}

Eigen::VectorXd BlockKernel::mode_values(const BlockLayout& layout,
                                         const std::function<double(double)>& symbol) {
  Eigen::VectorXd v(layout.n);
  for (int k = 0; k < layout.n; ++k) v(k) = symbol(layout.frequency(k));
  return v;
}

BlockKernel BlockKernel::multiplier(const BlockLayout& layout,
                                    const std::function<double(double)>& symbol) {
  BlockKernel out(layout);
  const int b = layout.block_size();
  for (int c = 0; c < layout.blocks; ++c)
    for (int m = 0; m < b; ++m)
      out.blocks_[static_cast<size_t>(c)](m, m) = symbol(layout.frequency(layout.mode(c, m)));
  return out;
}

BlockKernel BlockKernel::multiplication(const BlockLayout& layout,
                                        const std::function<double(double)>& a) {
  const auto coef = coefficient_series(layout.n, layout.period, a);
  BlockKernel out(layout);
  const int b = layout.block_size(), n = layout.n;
  for (int c = 0; c < layout.blocks; ++c) {
    auto& blk = out.blocks_[static_cast<size_t>(c)];
    for (int j = 0; j < b; ++j)
      for (int i = 0; i < b; ++i) {
        const int d = ((layout.mode(c, i) - layout.mode(c, j)) % n + n) % n;
        blk(i, j) = coef[static_cast<size_t>(d)];
      }
  }
  return out;
}

BlockKernel BlockKernel::from_physical(const BlockLayout& layout, const Eigen::MatrixXd& A) {
  if (A.rows() != layout.n || A.cols() != layout.n)
    throw std::invalid_argument("operator size does not match the layout");
  const Eigen::MatrixXcd F = to_fourier(A);
  BlockKernel out(layout);
  const int b = layout.block_size();
  for (int c = 0; c < layout.blocks; ++c)
    for (int j = 0; j < b; ++j)
      for (int i = 0; i < b; ++i)
        out.blocks_[static_cast<size_t>(c)](i, j) = F(layout.mode(c, i), layout.mode(c, j));
  return out;
}

Eigen::MatrixXd BlockKernel::to_physical() const {
  const int n = layout_.n, b = layout_.block_size();
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(n, n);
  for (int c = 0; c < layout_.blocks; ++c)
    for (int j = 0; j < b; ++j)
      for (int i = 0; i < b; ++i)
        F(layout_.mode(c, i), layout_.mode(c, j)) = blocks_[static_cast<size_t>(c)](i, j);
  return from_fourier(std::move(F));
}

BlockKernel& BlockKernel::operator+=(const BlockKernel& o) {
  for (size_t c = 0; c < blocks_.size(); ++c) blocks_[c] += o.blocks_[c];
  return *this;
}

BlockKernel& BlockKernel::operator-=(const BlockKernel& o) {
  for (size_t c = 0; c < blocks_.size(); ++c) blocks_[c] -= o.blocks_[c];
  return *this;
}

BlockKernel& BlockKernel::operator*=(double s) {
  for (auto& blk : blocks_) blk *= s;
  return *this;
}

void BlockKernel::axpy(double s, const BlockKernel& o) {
  for (size_t c = 0; c < blocks_.size(); ++c) blocks_[c] += s * o.blocks_[c];
}

BlockKernel BlockKernel::operator*(const BlockKernel& o) const {
  BlockKernel out(layout_);
  for (size_t c = 0; c < blocks_.size(); ++c) out.blocks_[c].noalias() = blocks_[c] * o.blocks_[c];
  return out;
}

BlockKernel BlockKernel::operator+(const BlockKernel& o) const {
  BlockKernel out = *this;
  out += o;
  return out;
}

BlockKernel BlockKernel::operator-(const BlockKernel& o) const {
  BlockKernel out = *this;
  out -= o;
  return out;
}

BlockKernel BlockKernel::scaled(const Eigen::VectorXd* left,
                                const Eigen::VectorXd* right) const {
  BlockKernel out(layout_);
  out.add_scaled(1.0, left, *this, right);
  return out;
}

void BlockKernel::add_scaled(double s, const Eigen::VectorXd* left, const BlockKernel& o,
                             const Eigen::VectorXd* right) {
  const int b = layout_.block_size();
  Eigen::VectorXd lv(b), rv(b);
  for (int c = 0; c < layout_.blocks; ++c) {
    for (int m = 0; m < b; ++m) {
      const int k = layout_.mode(c, m);
      lv(m) = left ? (*left)(k) : 1.0;
      rv(m) = right ? (*right)(k) * s : s;
    }
    blocks_[static_cast<size_t>(c)] += lv.asDiagonal() * o.blocks_[static_cast<size_t>(c)] * rv.asDiagonal();
  }
}

double BlockKernel::max_abs() const {
  double m = 0.0;
  for (const auto& blk : blocks_) m = std::max(m, blk.cwiseAbs().maxCoeff());
  return m;
}

double row_l1_norm(const Eigen::MatrixXd& A) {
  return A.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace lvp
