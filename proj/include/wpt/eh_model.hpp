// SPDX-License-Identifier: Apache-2.0
//
// wptsim: MIMO wireless power transfer with non-linear energy harvesting

#ifndef WPT_EH_MODEL_HPP
#define WPT_EH_MODEL_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace wpt {

/// Sigmoidal rectifier model constants plus the derived quantities used
/// throughout the solvers. All powers are in watts; the CLI converts to mW
/// for display only.
///
/// The RF-to-DC response is
///   dc(q) = (sig(q) - q_max * omega) / (1 - omega),
///   sig(q) = q_max / (1 + exp(-a (q - b))),
///   omega  = 1 / (1 + exp(a b)),
/// which is zero at q = 0 and saturates at q_max.
struct RectifierParams {
  double a = 0.0;            // curvature constant, 1/W
  double b = 0.0;            // sigmoid turning point (input power), W
  double q_max = 0.0;        // saturation DC output, W
  double omega = 0.0;        // zero-input correction, in (0, 1/2)
  double q_max_tilde = 0.0;  // q_max / (1 - omega), W
};

/// Builds params and derives omega and q_max_tilde. Throws
/// std::invalid_argument unless a, b, q_max are all positive.
RectifierParams make_rectifier(double a, double b, double q_max);

/// Ordered rectifier list of an energy receiver (L >= 1).
struct RectifierBank {
  std::vector<RectifierParams> rectifiers;

  std::size_t size() const { return rectifiers.size(); }
  const RectifierParams& operator[](std::size_t l) const { return rectifiers[l]; }
};

/// L identical rectifiers.
RectifierBank uniform_bank(std::size_t l_count, double a, double b, double q_max);

/// exp(-a (q - b)) with the exponent clamped to [-700, 700]. Beyond that the
/// double result is exactly 0 or saturated anyway, so the clamp is
/// value-preserving.
double exp_term(const RectifierParams& p, double q_in_w);

/// Raw sigmoid output sig(q). Strictly increasing, bounded in (0, q_max).
/// Throws std::domain_error for negative input.
double sigmoid_dc(const RectifierParams& p, double q_in_w);

/// Harvested DC power dc(q); zero at zero input. Throws std::domain_error
/// for negative input.
double harvested_dc(const RectifierParams& p, double q_in_w);

/// Total DC over the bank for per-rectifier inputs. Throws
/// std::invalid_argument on length mismatch.
double total_dc(const RectifierBank& bank, std::span<const double> q_in_w);

/// sum_l q_max_tilde_l / (1 + exp(-a_l (s_l - b_l))). Differs from total_dc
/// by a constant, so maximizing either ranks candidate splits identically;
/// the solvers compare runs with this form.
double sigmoid_sum(const RectifierBank& bank, std::span<const double> s_w);

}  // namespace wpt

#endif  // WPT_EH_MODEL_HPP
