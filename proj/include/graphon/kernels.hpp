#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "graphon/core.hpp"

namespace graphon::kernels {

inline KernelGraphon constant(double c, double domain = 1.0) {
  detail::require(std::isfinite(c) && c >= 0.0, "constant kernel needs c >= 0");
  const auto bound = c <= 1.0 ? KernelBound::kByOne : KernelBound::kUnbounded;
  return KernelGraphon([c](double, double) { return c; }, bound, domain,
                       "const:" + std::to_string(c));
}

// W(x, y) = x y
inline KernelGraphon product() {
  return KernelGraphon([](double x, double y) { return x * y; }, KernelBound::kByOne, 1.0,
                       "product");
}

// W(x, y) = 1[x + y >= 1]
inline KernelGraphon halfplane() {
  return KernelGraphon([](double x, double y) { return x + y >= 1.0 ? 1.0 : 0.0; },
                       KernelBound::kByOne, 1.0, "halfplane");
}

// Limit of half_graph(m) in its natural labeling: 1 when x and y sit on
// opposite sides of 1/2 and |x - y| <= 1/2.
inline KernelGraphon halfgraph() {
  return KernelGraphon(
      [](double x, double y) {
        const bool opposite = (x < 0.5) != (y < 0.5);
        return opposite && std::abs(x - y) <= 0.5 ? 1.0 : 0.0;
      },
      KernelBound::kByOne, 1.0, "halfgraph");
}

// W(x, y) = exp(-x - y) on [0, domain]^2
inline KernelGraphon expdecay(double domain = 1.0) {
  return KernelGraphon([](double x, double y) { return std::exp(-x - y); }, KernelBound::kByOne,
                       domain, "expdecay");
}

// W(x, y) = (x y)^(-1/4); unbounded but integrable.
inline KernelGraphon inverse_quarter() {
  return KernelGraphon(
      [](double x, double y) {
        const double xy = x * y;
        return xy > 0.0 ? std::pow(xy, -0.25) : HUGE_VAL;
      },
      KernelBound::kUnbounded, 1.0, "invquarter");
}

// Names accepted: const:<c>, product, halfplane, halfgraph, expdecay (alias
// exp), invquarter. `domain` only applies to expdecay and const.
inline KernelGraphon by_name(const std::string& name, double domain = 1.0) {
  if (name.rfind("const:", 0) == 0) {
    double c = 0.0;
    try {
      std::size_t used = 0;
      c = std::stod(name.substr(6), &used);
      if (used != name.size() - 6) throw InvalidParameter("");
    } catch (const std::exception&) {
      throw InvalidParameter("bad constant kernel '" + name + "'");
    }
    return constant(c, domain);
  }
  if (name == "product") return product();
  if (name == "halfplane") return halfplane();
  if (name == "halfgraph") return halfgraph();
  if (name == "expdecay" || name == "exp") return expdecay(domain);
  if (name == "invquarter") return inverse_quarter();
  throw InvalidParameter("unknown kernel '" + name + "'");
}

// Cell-average discretization on a k x k grid, each cell approximated by an
// oversample x oversample midpoint rule. The result is symmetrized exactly.
template <GraphonLike W>
StepGraphon discretize(const W& w, std::size_t k, std::size_t oversample = 8) {
  detail::require(k >= 1 && oversample >= 1, "discretize needs k >= 1 and oversample >= 1");
  const double side = w.domain() / static_cast<double>(k);
  const double sub = side / static_cast<double>(oversample);
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd grid(kk, kk);
  for (Eigen::Index a = 0; a < kk; ++a) {
    for (Eigen::Index b = a; b < kk; ++b) {
      double acc = 0.0;
      for (std::size_t s = 0; s < oversample; ++s) {
        for (std::size_t t = 0; t < oversample; ++t) {
          const double x = static_cast<double>(a) * side + (static_cast<double>(s) + 0.5) * sub;
          const double y = static_cast<double>(b) * side + (static_cast<double>(t) + 0.5) * sub;
          acc += 0.5 * (w.value(x, y) + w.value(y, x));
        }
      }
      grid(a, b) = grid(b, a) = acc / static_cast<double>(oversample * oversample);
    }
  }
  return StepGraphon(std::move(grid), w.domain());
}

}  // namespace graphon::kernels
