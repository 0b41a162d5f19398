// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#include "wpt/eh_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpt {

RectifierParams make_rectifier(double a, double b, double q_max) {
  if (!(a > 0.0) || !(b > 0.0) || !(q_max > 0.0)) {
    throw std::invalid_argument("rectifier constants a, b, q_max must be positive");
  }
  RectifierParams p;
  p.a = a;
  p.b = b;
  p.q_max = q_max;
  p.omega = 1.0 / (1.0 + std::exp(std::min(a * b, 700.0)));
  p.q_max_tilde = q_max / (1.0 - p.omega);
  return p;
}

RectifierBank uniform_bank(std::size_t l_count, double a, double b, double q_max) {
  if (l_count == 0) {
    throw std::invalid_argument("a rectifier bank needs at least one rectifier");
  }
  RectifierBank bank;
  bank.rectifiers.assign(l_count, make_rectifier(a, b, q_max));
  return bank;
}

double exp_term(const RectifierParams& p, double q_in_w) {
  const double t = std::clamp(-p.a * (q_in_w - p.b), -700.0, 700.0);
  return std::exp(t);
}

double sigmoid_dc(const RectifierParams& p, double q_in_w) {
  if (!(q_in_w >= 0.0)) {
    throw std::domain_error("input RF power must be non-negative");
  }
  return p.q_max / (1.0 + exp_term(p, q_in_w));
}

double harvested_dc(const RectifierParams& p, double q_in_w) {
  const double dc = (sigmoid_dc(p, q_in_w) - p.q_max * p.omega) / (1.0 - p.omega);
  // dc can land one ulp below zero at q_in = 0
  return dc > 0.0 ? dc : 0.0;
}

double total_dc(const RectifierBank& bank, std::span<const double> q_in_w) {
  if (q_in_w.size() != bank.size()) {
    throw std::invalid_argument("per-rectifier input count must match bank size");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < bank.size(); ++l) {
    sum += harvested_dc(bank[l], q_in_w[l]);
  }
  return sum;
}

double sigmoid_sum(const RectifierBank& bank, std::span<const double> s_w) {
  if (s_w.size() != bank.size()) {
    throw std::invalid_argument("per-rectifier input count must match bank size");
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < bank.size(); ++l) {
    sum += bank[l].q_max_tilde / (1.0 + exp_term(bank[l], s_w[l]));
  }
  return sum;
}

}  // namespace wpt
