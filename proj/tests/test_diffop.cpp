#include "doctest.h"
#include "fedosov/diffop.hpp"
#include "fedosov/error.hpp"
#include "support.hpp"

using namespace fedosov;
using fedosov::testing::Gen;

namespace {

DiffOp random_op(Gen& gen, const ChartPtr& chart, int order, int max_deriv) {
  DiffOp op(chart);
  for (int t = 0; t < 4; ++t) {
    Monomial alpha;
    for (std::size_t v = 0; v < chart->dim(); ++v) alpha = alpha.with(v, static_cast<unsigned>(gen.integer(0, max_deriv)));
    if (static_cast<int>(alpha.degree()) > max_deriv) continue;
    op.add(alpha, gen.integer(0, 2), gen.jet(chart, order, 3));
  }
  return op;
}

}  // namespace

TEST_CASE("DiffOp basics") {
  auto chart = make_chart({"q"}, {Complex(Rational(1, 3))});
  Jet psi = Jet::variable(chart, 8, 0) * Jet::variable(chart, 8, 0);
  HbarSeries id = diffop_apply(DiffOp::identity(chart, 8), psi);
  CHECK(agree(id[0], psi));
  DiffOp d = DiffOp::derivative(chart, 0, 8), q = DiffOp::multiplication(Jet::variable(chart, 8, 0));
  CHECK(agree(diffop_commutator(d, q), DiffOp::identity(chart, 8)));
  CHECK(agree(diffop_apply(d, psi)[0], Jet::variable(chart, 8, 0) * Complex(2)));
  CHECK(d.derivative_order() == 1);
  CHECK(d.shift_hbar(2).max_hbar() == 2);
  CHECK_THROWS_AS(diffop_apply(d, Jet(chart, 0)), OrderError);
  CHECK_THROWS_AS(diffop_compose(d, DiffOp::identity(make_chart({"x"}, {Complex(0)}), 3)), ChartMismatch);
}

TEST_CASE("composition agrees with successive application") {
  Gen gen(31);
  for (std::size_t n = 1; n <= 2; ++n) {
    std::vector<std::string> names = n == 1 ? std::vector<std::string>{"q"} : std::vector<std::string>{"q1", "q2"};
    auto chart = make_chart(names, std::vector<Complex>(n, Complex(Rational(1, 2))));
    for (int t = 0; t < 10; ++t) {
      DiffOp a = random_op(gen, chart, 9, 2), b = random_op(gen, chart, 9, 2);
      Jet psi = gen.jet(chart, 9, 4);
      HbarSeries lhs = diffop_apply(diffop_compose(a, b), psi);
      HbarSeries bpsi = diffop_apply(b, psi);
      std::vector<Jet> rhs(lhs.size() + 4, Jet(chart, 9));
      for (std::size_t j = 0; j < bpsi.size(); ++j) {
        HbarSeries abpsi = diffop_apply(a, bpsi[j]);
        for (std::size_t i = 0; i < abpsi.size(); ++i) rhs[i + j] += abpsi[i];
      }
      for (std::size_t k = 0; k < rhs.size(); ++k) {
        CHECK(agree(k < lhs.size() ? lhs[k] : Jet(chart, 9), rhs[k]));
      }
    }
  }
}
