#include "lvp/quad.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>

namespace lvp::quad {
namespace {

struct GslInit {
  GslInit() { gsl_set_error_handler_off(); }
};
const GslInit gsl_init;

double trampoline(double x, void* p) { return (*static_cast<const Fn*>(p))(x); }

gsl_function wrap(const Fn& f) {
  gsl_function g;
  g.function = &trampoline;
  g.params = const_cast<Fn*>(&f);
  return g;
}

struct Workspace {
  explicit Workspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)) {}
  ~Workspace() { gsl_integration_workspace_free(w); }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;
  gsl_integration_workspace* w;
};

void check(int status, const char* where, Result r) {
  if (status == GSL_SUCCESS) return;
  // Roundoff-limited results are still the best available estimate.
  if (status == GSL_EROUND && std::isfinite(r.value)) return;
  throw QuadratureError(std::string(where) + ": " + gsl_strerror(status), r);
}

}  // namespace

Result qags(const Fn& f, double a, double b, double epsabs, double epsrel,
            std::size_t limit) {
  if (!(b > a)) return {};
  Workspace ws(limit);
  gsl_function g = wrap(f);
  Result r;
  int st = gsl_integration_qags(&g, a, b, epsabs, epsrel, limit, ws.w, &r.value,
                                &r.abserr);
  check(st, "qags", r);
  return r;
}

Result qagiu(const Fn& f, double a, double epsabs, double epsrel,
             std::size_t limit) {
  Workspace ws(limit);
  gsl_function g = wrap(f);
  Result r;
  int st = gsl_integration_qagiu(&g, a, epsabs, epsrel, limit, ws.w, &r.value,
                                 &r.abserr);
  check(st, "qagiu", r);
  return r;
}

Result qawo_cos(const Fn& f, double a, double b, double omega, double epsabs,
                double epsrel, std::size_t limit) {
  if (!(b > a)) return {};
  Workspace ws(limit);
  std::unique_ptr<gsl_integration_qawo_table,
                  decltype(&gsl_integration_qawo_table_free)>
      tab(gsl_integration_qawo_table_alloc(omega, b - a, GSL_INTEG_COSINE, 50),
          &gsl_integration_qawo_table_free);
  gsl_function g = wrap(f);
  Result r;
  int st = gsl_integration_qawo(&g, a, epsabs, epsrel, limit, ws.w, tab.get(),
                                &r.value, &r.abserr);
  check(st, "qawo", r);
  return r;
}

Result qawf_cos(const Fn& f, double a, double omega, double epsabs,
                std::size_t limit) {
  Workspace ws(limit), cyc(limit);
  std::unique_ptr<gsl_integration_qawo_table,
                  decltype(&gsl_integration_qawo_table_free)>
      tab(gsl_integration_qawo_table_alloc(omega, 1.0, GSL_INTEG_COSINE, 50),
          &gsl_integration_qawo_table_free);
  gsl_function g = wrap(f);
  Result r;
  int st = gsl_integration_qawf(&g, a, epsabs, limit, ws.w, cyc.w, tab.get(),
                                &r.value, &r.abserr);
  check(st, "qawf", r);
  return r;
}

Result qags_pieces(const Fn& f, const std::vector<double>& breaks,
                   double epsabs, double epsrel) {
  Result total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    Result r = qags(f, breaks[i], breaks[i + 1], epsabs, epsrel);
    total.value += r.value;
    total.abserr += r.abserr;
  }
  return total;
}

Rule gauss_jacobi01(int n, double a, double b) {
  // GSL's weight on [lo, hi] is (hi - x)^alpha (x - lo)^beta.
  std::unique_ptr<gsl_integration_fixed_workspace,
                  decltype(&gsl_integration_fixed_free)>
      w(gsl_integration_fixed_alloc(gsl_integration_fixed_jacobi, n, 0.0, 1.0,
                                    b, a),
        &gsl_integration_fixed_free);
  if (!w) throw std::runtime_error("gauss_jacobi01: allocation failed");
  Rule rule;
  rule.nodes.assign(gsl_integration_fixed_nodes(w.get()),
                    gsl_integration_fixed_nodes(w.get()) + n);
  rule.weights.assign(gsl_integration_fixed_weights(w.get()),
                      gsl_integration_fixed_weights(w.get()) + n);
  return rule;
}

Rule gauss_legendre(int n, double lo, double hi) {
  std::unique_ptr<gsl_integration_fixed_workspace,
                  decltype(&gsl_integration_fixed_free)>
      w(gsl_integration_fixed_alloc(gsl_integration_fixed_legendre, n, lo, hi,
                                    0.0, 0.0),
        &gsl_integration_fixed_free);
  if (!w) throw std::runtime_error("gauss_legendre: allocation failed");
  Rule rule;
  rule.nodes.assign(gsl_integration_fixed_nodes(w.get()),
                    gsl_integration_fixed_nodes(w.get()) + n);
  rule.weights.assign(gsl_integration_fixed_weights(w.get()),
                      gsl_integration_fixed_weights(w.get()) + n);
  return rule;
}

}  // namespace lvp::quad
