#pragma once

namespace merank {

// Standard normal density.
double normal_pdf(double x);

// Standard normal CDF, erfc-based. Absolute error below 1e-14 across the
// real line; monotone and saturating to exactly 0/1 in the far tails.
double normal_cdf(double x);

// log(Phi(x)), stable down to x ~ -1e8 (asymptotic tail expansion for very
// negative arguments, log1p form for positive ones).
double log_normal_cdf(double x);

// Inverse CDF. Rational initial guess refined by one Halley step against
// normal_cdf, giving |Phi(q(p)) - p| at machine precision for
// p in [1e-300, 1 - 1e-16]. Throws InvalidArgument unless 0 < p < 1.
double normal_quantile(double p);

}  // namespace merank
