#pragma once

// Adaptive Gauss-Kronrod (G10/K21) integration of matrix-valued functions over
// the whole real line. The finite region [-W, W] is split at caller-supplied
// breakpoints; the two tails are mapped onto (0, 1] by omega = +-W / t.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "cvrelay/errors.hpp"

namespace cvrelay {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  std::size_t max_evaluations = std::size_t{1} << 20;
  /// After convergence every panel is split into this many equal parts and
  /// re-evaluated; 2 is the "doubled resolution" used by convergence checks.
  int resolution_factor = 1;
};

template <class Value>
struct QuadratureResult {
  Value value;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  std::size_t panels = 0;
};

namespace detail {

// Abscissae and weights of the 21-point Kronrod extension of the 10-point
// Gauss rule (QUADPACK dqk21). Odd indices are the Gauss nodes.
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

enum class PanelMap { identity, right_tail, left_tail };

template <class Value>
struct Panel {
  double a;
  double b;
  PanelMap map;
  Value value;
  double error;
};

template <class Value>
double max_abs(const Value& v) {
  return v.cwiseAbs().maxCoeff();
}

// Neumaier compensated accumulation, entrywise.
template <class Value>
class CompensatedSum {
 public:
  explicit CompensatedSum(const Value& zero) : sum_(zero), comp_(zero) {}

  void add(const Value& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      auto& s = sum_.data()[i];
      auto& c = comp_.data()[i];
      const auto xi = x.data()[i];
      add_scalar(s, c, xi);
    }
  }

  Value result() const { return sum_ + comp_; }

 private:
  template <class T>
  static void add_scalar(T& s, T& c, const T& x) {
    if constexpr (std::is_floating_point_v<T>) {
      const T t = s + x;
      if (std::abs(s) >= std::abs(x)) {
        c += (s - t) + x;
      } else {
        c += (x - t) + s;
      }
      s = t;
    } else {
      auto re = s.real(), ce = c.real();
      auto im = s.imag(), ci = c.imag();
      add_scalar(re, ce, x.real());
      add_scalar(im, ci, x.imag());
      s = T(re, im);
      c = T(ce, ci);
    }
  }

  Value sum_;
  Value comp_;
};

template <class Value, class F>
Panel<Value> gauss_kronrod(F& f, double a, double b, PanelMap map, double width) {
  auto eval = [&](double x) -> Value {
    switch (map) {
      case PanelMap::identity:
        return f(x);
      case PanelMap::right_tail:
        return f(width / x) * (width / (x * x));
      case PanelMap::left_tail:
        return f(-width / x) * (width / (x * x));
    }
    return f(x);
  };
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Value fc = eval(center);
  Value kronrod = fc * kKronrodWeights[10];
  Value gauss = Value::Zero(fc.rows(), fc.cols());
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    const Value sum = eval(center - dx) + eval(center + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, map, kronrod, max_abs<Value>(Value(kronrod - gauss))};
}

}  // namespace detail

/// Integrates f over the real line. `width` is W; `breakpoints` lie inside
/// (-W, W) and mark narrow integrand features. f must decay at least like
/// 1/omega^2 so the mapped tails are bounded at t = 0.
template <class Value, class F>
QuadratureResult<Value> integrate_real_line(F&& f, double width, std::vector<double> breakpoints,
                                            const QuadratureOptions& options = {}) {
  using detail::Panel;
  using detail::PanelMap;
  constexpr std::size_t kEvalsPerPanel = 21;

  breakpoints.push_back(-width);
  breakpoints.push_back(width);
  std::erase_if(breakpoints, [&](double x) { return !(x >= -width && x <= width); });
  std::sort(breakpoints.begin(), breakpoints.end());
  const double merge = 1e-12 * width;
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end(),
                                [&](double x, double y) { return std::abs(x - y) <= merge; }),
                    breakpoints.end());

  auto worse = [](const Panel<Value>& x, const Panel<Value>& y) { return x.error < y.error; };
  std::priority_queue<Panel<Value>, std::vector<Panel<Value>>, decltype(worse)> queue(worse);

  std::size_t evaluations = 0;
  double error_sum = 0.0;
  auto push = [&](double a, double b, PanelMap map) {
    auto p = detail::gauss_kronrod<Value>(f, a, b, map, width);
    evaluations += kEvalsPerPanel;
    error_sum += p.error;
    queue.push(std::move(p));
  };

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) push(breakpoints[i], breakpoints[i + 1], PanelMap::identity);
  push(0.0, 1.0, PanelMap::right_tail);
  push(0.0, 1.0, PanelMap::left_tail);

  auto current_total = [&] {
    auto copy = queue;
    Value total = copy.top().value;
    copy.pop();
    while (!copy.empty()) {
      total += copy.top().value;
      copy.pop();
    }
    return total;
  };

  // Running sums drift when panels are replaced, so the target is refreshed
  // from a full recomputation whenever the cheap test says we are done.
  Value total = current_total();
  while (true) {
    const double target = std::max(options.abs_tol, options.rel_tol * detail::max_abs<Value>(total));
    if (error_sum <= target) {
      total = current_total();
      double fresh_error = 0.0;
      for (auto copy = queue; !copy.empty(); copy.pop()) fresh_error += copy.top().error;
      error_sum = fresh_error;
      if (error_sum <= std::max(options.abs_tol, options.rel_tol * detail::max_abs<Value>(total))) break;
    }
    if (evaluations + 2 * kEvalsPerPanel > options.max_evaluations) {
      std::ostringstream os;
      os << "adaptive quadrature did not converge after " << evaluations << " evaluations (error estimate "
         << error_sum << ", target " << target << ")";
      throw NumericalError(os.str(), error_sum);
    }
    Panel<Value> worst = queue.top();
    queue.pop();
    error_sum -= worst.error;
    total -= worst.value;
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = detail::gauss_kronrod<Value>(f, worst.a, mid, worst.map, width);
    auto right = detail::gauss_kronrod<Value>(f, mid, worst.b, worst.map, width);
    evaluations += 2 * kEvalsPerPanel;
    error_sum += left.error + right.error;
    total += left.value + right.value;
    queue.push(std::move(left));
    queue.push(std::move(right));
  }

  std::vector<Panel<Value>> panels;
  panels.reserve(queue.size());
  for (; !queue.empty(); queue.pop()) panels.push_back(queue.top());

  if (options.resolution_factor > 1) {
    std::vector<Panel<Value>> refined;
    refined.reserve(panels.size() * static_cast<std::size_t>(options.resolution_factor));
    for (const auto& p : panels) {
      const double step = (p.b - p.a) / options.resolution_factor;
      for (int k = 0; k < options.resolution_factor; ++k) {
        const double a = p.a + k * step;
        const double b = (k + 1 == options.resolution_factor) ? p.b : a + step;
        refined.push_back(detail::gauss_kronrod<Value>(f, a, b, p.map, width));
        evaluations += kEvalsPerPanel;
      }
    }
    panels = std::move(refined);
  }

  // Deterministic reduction order independent of refinement history.
  std::sort(panels.begin(), panels.end(), [](const Panel<Value>& x, const Panel<Value>& y) {
    if (x.map != y.map) return x.map < y.map;
    return x.a < y.a;
  });
  detail::CompensatedSum<Value> sum(Value::Zero(panels.front().value.rows(), panels.front().value.cols()));
  double error = 0.0;
  for (const auto& p : panels) {
    sum.add(p.value);
    error += p.error;
  }
  return {sum.result(), error, evaluations, panels.size()};
}

}  // namespace cvrelay
