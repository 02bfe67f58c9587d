#pragma once

#include <map>
#include <string>
#include <vector>

#include "fedosov/jet.hpp"
#include "fedosov/weyl.hpp"

namespace fedosov {

/// Linear differential operator sum_alpha c_alpha(hbar, x) d^alpha on a configuration chart,
/// with coefficients polynomial in hbar.
class DiffOp {
 public:
  /// terms[alpha][k] is the coefficient of hbar^k d^alpha.
  using Terms = std::map<Monomial, std::vector<Jet>>;

  DiffOp() = default;
  explicit DiffOp(ChartPtr chart) : chart_(std::move(chart)) {}

  static DiffOp identity(const ChartPtr& chart, int order);
  static DiffOp multiplication(const Jet& f);
  /// d/dx_var
  static DiffOp derivative(const ChartPtr& chart, std::size_t var, int order);

  const ChartPtr& chart() const { return chart_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Highest hbar power present, -1 if zero.
  int max_hbar() const;
  /// Highest total derivative order present, -1 if zero.
  int derivative_order() const;
  /// Coefficient of hbar^k d^alpha (zero jet of order `order` if absent).
  Jet coeff(Monomial alpha, int k, int order) const;

  void add(Monomial alpha, int k, const Jet& c);

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  DiffOp& operator*=(const Complex& c);
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  friend DiffOp operator*(DiffOp a, const Complex& c) { return a *= c; }
  friend DiffOp operator*(const Complex& c, DiffOp a) { return a *= c; }

  /// Multiplies by hbar^k.
  DiffOp shift_hbar(int k) const;
  /// Keeps hbar powers <= k.
  DiffOp truncated_hbar(int k) const;

  std::string str() const;

 private:
  void check_chart(const DiffOp& o) const;
  void prune();

  ChartPtr chart_;
  Terms terms_;
};

/// Applies the operator; result index = hbar power.
HbarSeries diffop_apply(const DiffOp& a, const Jet& psi);
/// Operator product a o b with the Leibniz expansion of b's coefficients.
DiffOp diffop_compose(const DiffOp& a, const DiffOp& b);
DiffOp diffop_commutator(const DiffOp& a, const DiffOp& b);
/// Coefficientwise agreement through each pair's shared valid order.
bool agree(const DiffOp& a, const DiffOp& b);

}  // namespace fedosov
