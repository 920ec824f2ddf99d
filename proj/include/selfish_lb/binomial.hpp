#pragma once

#include "selfish_lb/numeric.hpp"
#include "selfish_lb/rng.hpp"

namespace slb {

/// Exact Binomial(count, p) draw for count up to 2^50.
///
/// Small means (count * min(p, 1-p) < 10) use sequential inversion; larger
/// ones use Hormann's BTRD transformed rejection with a ratio-of-uniforms
/// squeeze. The last-resort acceptance test compares against a log-pmf
/// evaluated in saddle-point form, which keeps full double accuracy at very
/// large counts.
Load binomial(RngStream& rng, Load count, double p);

/// log P(X = k) for X ~ Binomial(count, p), accurate to a few ulps of the
/// result even for count near 2^50.
double binomial_log_pmf(Load k, Load count, double p);

namespace detail {
double stirling_error(double n);
double deviance_term(double x, double np);
}  // namespace detail

}  // namespace slb
