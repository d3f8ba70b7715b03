#pragma once

// Gamma-family special functions used by the digamma loss and the Dirichlet
// KL regularizer. All functions throw DomainError for x <= 0 or non-finite x.

namespace evcore {

// ln Gamma(x) for x > 0.
double ln_gamma(double x);

// psi(x) = d/dx ln Gamma(x).
double digamma(double x);

// psi'(x). Needed by the analytic gradients of the digamma loss and the KL term.
double trigamma(double x);

}  // namespace evcore
