#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace lvp {

/// Periodic grid of n points on [-P/2, P/2) whose Fourier modes are grouped by
/// residue modulo `blocks`. Multiplication by a function whose Fourier
/// support lies in multiples of `blocks` keeps every residue class invariant.
struct BlockLayout {
  int n = 0;
  int blocks = 1;
  double period = 0.0;

  [[nodiscard]] int block_size() const { return n / blocks; }
  [[nodiscard]] double step() const { return period / n; }
  [[nodiscard]] double x(int i) const { return (i - n / 2) * step(); }
  /// FFT index of the m-th mode in residue class c.
  [[nodiscard]] int mode(int c, int m) const { return c + m * blocks; }
  /// Angular frequency of FFT index k, folded to the symmetric range.
  [[nodiscard]] double frequency(int k) const;

  /// Coarsest grouping compatible with multiplication by every coefficient.
  [[nodiscard]] static BlockLayout for_coefficients(
      int n, double period, const std::vector<std::function<double(double)>>& coeffs);
};

/// Grid operator held as Fourier blocks. The physical matrix A acts on samples
/// f(x_j) as (A f)_i; its kernel is A / step.
class BlockKernel {
 public:
  BlockKernel() = default;
  explicit BlockKernel(const BlockLayout& layout);

  [[nodiscard]] static BlockKernel identity(const BlockLayout& layout);
  /// Fourier multiplier with the given symbol of the angular frequency.
  [[nodiscard]] static BlockKernel multiplier(const BlockLayout& layout,
                                              const std::function<double(double)>& symbol);
  /// Multiplication by a(x).
  [[nodiscard]] static BlockKernel multiplication(const BlockLayout& layout,
                                                  const std::function<double(double)>& a);
  [[nodiscard]] static BlockKernel from_physical(const BlockLayout& layout,
                                                 const Eigen::MatrixXd& A);

  [[nodiscard]] Eigen::MatrixXd to_physical() const;
  /// Diagonal of the mode symbol in FFT order (for `scaled`).
  [[nodiscard]] static Eigen::VectorXd mode_values(const BlockLayout& layout,
                                                   const std::function<double(double)>& symbol);

  [[nodiscard]] const BlockLayout& layout() const { return layout_; }
  [[nodiscard]] Eigen::MatrixXcd& block(int c) { return blocks_[static_cast<size_t>(c)]; }
  [[nodiscard]] const Eigen::MatrixXcd& block(int c) const { return blocks_[static_cast<size_t>(c)]; }

  BlockKernel& operator+=(const BlockKernel& o);
  BlockKernel& operator-=(const BlockKernel& o);
  BlockKernel& operator*=(double s);
  /// this += s * o
  void axpy(double s, const BlockKernel& o);
  [[nodiscard]] BlockKernel operator*(const BlockKernel& o) const;
  [[nodiscard]] BlockKernel operator+(const BlockKernel& o) const;
  [[nodiscard]] BlockKernel operator-(const BlockKernel& o) const;

  /// diag(left) * this * diag(right), diagonals given per FFT index.
  [[nodiscard]] BlockKernel scaled(const Eigen::VectorXd* left,
                                   const Eigen::VectorXd* right) const;
  /// this += s * diag(left) * o * diag(right)
  void add_scaled(double s, const Eigen::VectorXd* left, const BlockKernel& o,
                  const Eigen::VectorXd* right);

  [[nodiscard]] double max_abs() const;
  [[nodiscard]] bool empty() const { return blocks_.empty(); }

 private:
  BlockLayout layout_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

/// max_i sum_j |A_ij|, the sup-norm operator bound of a physical matrix.
[[nodiscard]] double row_l1_norm(const Eigen::MatrixXd& A);

}  // namespace lvp
